use crate::error::{Error, Result};

/// Largest sample accepted per arm.
pub const MAX_SAMPLES: usize = 100_000_000;

/// DKW half-width `sqrt(ln(2 / (1 - confidence)) / (2 n))`.
pub fn dkw_epsilon(n: usize, confidence: f64) -> f64 {
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * n as f64)).sqrt()
}

/// A sorted sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("empirical distribution needs at least one value".into()));
        }
        if values.len() > MAX_SAMPLES {
            return Err(Error::Config(format!(
                "{} values exceed the per-arm cap of {MAX_SAMPLES}",
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Input("sample contains NaN".into()));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Number of values `<= x`.
    pub fn count_le(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v <= x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.len() as f64
    }

    pub fn survival(&self, x: f64) -> f64 {
        (self.len() - self.count_le(x)) as f64 / self.len() as f64
    }

    /// Left-continuous quantile `inf{t : F(t) >= p}`: the value at index
    /// `ceil(p n) - 1`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        crate::distributions::check_probability(p)?;
        let idx = ((p * self.len() as f64).ceil() as usize).clamp(1, self.len()) - 1;
        Ok(self.values[idx])
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// `int_{-inf}^{x} F(t) dt = E[(x - X)_+]` at each point of the
    /// ascending `grid`, computed exactly from running sums.
    pub fn integrated_cdf(&self, grid: &[f64]) -> Vec<f64> {
        let n = self.len() as f64;
        let mut out = Vec::with_capacity(grid.len());
        let (mut idx, mut sum) = (0usize, 0.0f64);
        for &x in grid {
            while idx < self.values.len() && self.values[idx] <= x {
                sum += self.values[idx];
                idx += 1;
            }
            out.push((idx as f64 * x - sum) / n);
        }
        out
    }

    /// Kolmogorov distance to an analytic CDF.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.len() as f64;
        let mut worst: f64 = 0.0;
        let mut i = 0;
        while i < self.values.len() {
            let x = self.values[i];
            // step over ties so the jump is taken in one piece
            let mut j = i;
            while j < self.values.len() && self.values[j] == x {
                j += 1;
            }
            let f = cdf(x);
            worst = worst.max((j as f64 / n - f).abs()).max((f - i as f64 / n).abs());
            i = j;
        }
        worst
    }
}

/// Left-continuous empirical quantiles at each `p`.
pub fn quantile_curve(sample: &EmpiricalDistribution, p_grid: &[f64]) -> Result<Vec<f64>> {
    p_grid.iter().map(|&p| sample.quantile(p)).collect()
}
