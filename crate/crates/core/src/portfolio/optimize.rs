//! Exhaustive lattice optimizers for the constrained and free-total problems.

use std::path::Path;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::distributions::{Margin, MarginTransform};
use crate::error::{Error, Result};
use crate::exact::{two_point_eu_exact, TabulatedUtility};
use crate::majorization::{chain_points, TTransform, WeightVector};
use crate::montecarlo::StreamKey;
use crate::scenarios::{Dependence, Pairing, ScenarioSpec};

use super::preference::{PenaltySpec, PreferenceSpec};

/// Default subdivisions per axis of the simplex lattice.
pub const DEFAULT_RESOLUTION: usize = 20;

/// Default cap on the number of lattice points.
pub const DEFAULT_LATTICE_BUDGET: u64 = 200_000;

/// Multiple of the standard error used as the noise band.
pub const NOISE_Z: f64 = 2.0;

/// Row-major component draws shared by every lattice point.
#[derive(Clone, Debug)]
pub struct SampleBank {
    margins: Vec<Margin>,
    rows: usize,
    data: Vec<f64>,
}

impl SampleBank {
    pub fn new(
        margins: Vec<Margin>,
        dependence: Dependence,
        transform: MarginTransform,
        key: StreamKey,
        rows: usize,
    ) -> Result<Self> {
        let n = margins.len();
        let first = margins.first().cloned().ok_or_else(|| Error::Spec("at least one margin is required".into()))?;
        let flat = WeightVector::uniform(n, 1.0)?;
        let mut spec = ScenarioSpec::iid(first, flat.clone(), flat).with_dependence(dependence).with_transform(transform);
        spec.margins = margins.clone();
        spec.pairing = Pairing::AsGiven;
        spec.allow_finite_mean = true;
        let data = spec.build()?.sample_components(key, rows)?;
        Ok(SampleBank { margins, rows, data })
    }

    /// Independent copies of one margin.
    pub fn iid(margin: Margin, n: usize, key: StreamKey, rows: usize) -> Result<Self> {
        Self::new(vec![margin; n], Dependence::Independent, MarginTransform::Identity, key, rows)
    }

    pub fn dimension(&self) -> usize {
        self.margins.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn margins(&self) -> &[Margin] {
        &self.margins
    }

    /// `w . Y - shift` for every row.
    pub fn portfolio(&self, w: &[f64], shift: f64) -> Result<Vec<f64>> {
        let n = self.dimension();
        if w.len() != n {
            return Err(Error::Dimension { expected: n, got: w.len() });
        }
        Ok(self.data.chunks_exact(n).map(|y| crate::scenarios::dot(w, y) - shift).collect())
    }

    /// `rho(w . Y - shift)` and its standard error.
    fn score(&self, pref: &PreferenceSpec, w: &[f64], shift: f64) -> Result<(f64, f64)> {
        let mut v = self.portfolio(w, shift)?;
        let value = pref.evaluate_values(&mut v)?;
        Ok((value, pref.standard_error(&v)))
    }
}

/// Number of points of the simplex lattice, saturating.
pub fn lattice_size(n: usize, resolution: usize) -> u64 {
    // C(resolution + n - 1, n - 1)
    let mut c: u128 = 1;
    for k in 1..n as u128 {
        c = c * (resolution as u128 + k) / k;
        if c > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    c as u64
}

/// Integer compositions of `resolution` into `n` parts, in increasing
/// lexicographic order.
pub fn lattice_counts(n: usize, resolution: usize, budget: u64) -> Result<Vec<Vec<usize>>> {
    if n == 0 {
        return Err(Error::Input("dimension must be at least 1".into()));
    }
    let size = lattice_size(n, resolution);
    if size > budget {
        return Err(Error::Budget {
            nodes: size,
            message: format!("simplex lattice with n={n}, resolution={resolution} has {size} points (budget {budget})"),
        });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut cur = vec![0; n];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    rec(0, resolution, &mut cur, &mut out);
    Ok(out)
}

/// Lattice search settings.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeOptions {
    pub resolution: usize,
    pub penalty: PenaltySpec,
    pub budget: u64,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions { resolution: DEFAULT_RESOLUTION, penalty: PenaltySpec::None, budget: DEFAULT_LATTICE_BUDGET }
    }
}

/// Value surface of one constrained problem.
#[derive(Clone, Debug, PartialEq)]
pub struct P1Result {
    pub total: f64,
    pub resolution: usize,
    pub samples: usize,
    pub counts: Vec<Vec<usize>>,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub argmax: usize,
}

impl P1Result {
    pub fn argmax_weights(&self) -> &[f64] {
        &self.points[self.argmax]
    }

    pub fn value(&self) -> f64 {
        self.values[self.argmax]
    }

    /// `NOISE_Z` standard errors at the argmax.
    pub fn noise_band(&self) -> f64 {
        NOISE_Z * self.standard_errors[self.argmax]
    }

    /// Points whose value is within the noise band of the maximum.
    pub fn near_ties(&self) -> usize {
        let band = self.noise_band();
        self.values.iter().filter(|&&v| v >= self.value() - band).count() - 1
    }

    /// Euclidean distance from the argmax to the uniform vector.
    pub fn distance_to_uniform(&self) -> f64 {
        distance_to_uniform(&self.points[self.argmax], self.total)
    }

    /// Indices of the lattice points closest to the uniform vector.
    pub fn nearest_uniform(&self) -> Vec<usize> {
        nearest_to_uniform(&self.counts)
    }

    pub fn argmax_is_nearest_uniform(&self) -> bool {
        self.nearest_uniform().contains(&self.argmax)
    }

    /// Writes `w1, ..., wn, value, se` rows.
    pub fn write_surface_csv(&self, path: &Path) -> Result<()> {
        let n = self.points.first().map_or(0, Vec::len);
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
        header.extend(["value".to_string(), "se".to_string()]);
        w.write_record(&header)?;
        for ((p, v), se) in self.points.iter().zip(&self.values).zip(&self.standard_errors) {
            let mut rec: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
            rec.push(format!("{v:e}"));
            rec.push(format!("{se:e}"));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn distance_to_uniform(w: &[f64], total: f64) -> f64 {
    let u = total / w.len() as f64;
    w.iter().map(|x| (x - u).powi(2)).sum::<f64>().sqrt()
}

/// Indices of the compositions closest (in squared distance) to uniform.
fn nearest_to_uniform(counts: &[Vec<usize>]) -> Vec<usize> {
    // n |c - r/n|^2 = n sum c^2 - r^2, so compare sum c^2 exactly
    let sq: Vec<usize> = counts.iter().map(|c| c.iter().map(|k| k * k).sum()).collect();
    let best = sq.iter().copied().min().unwrap_or(0);
    sq.iter().enumerate().filter(|(_, &s)| s == best).map(|(i, _)| i).collect()
}

/// First index of the largest value; points are in increasing lexicographic
/// order, so this is the lexicographically smallest argmax.
fn first_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Maximizes `rho(w . X - g(w))` over `{w >= 0 : ||w|| = total}` on the
/// simplex lattice, with every point evaluated on the same draws.
pub fn optimize_p1(pref: &PreferenceSpec, bank: &SampleBank, total: f64, opts: &LatticeOptions) -> Result<P1Result> {
    if opts.resolution < 2 {
        return Err(Error::Input(format!("lattice resolution {} must be at least 2", opts.resolution)));
    }
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Input(format!("total weight {total} must be positive and finite")));
    }
    pref.check_margins(bank.margins())?;
    let n = bank.dimension();
    let counts = lattice_counts(n, opts.resolution, opts.budget)?;
    let step = total / opts.resolution as f64;
    let points: Vec<Vec<f64>> = counts.iter().map(|c| c.iter().map(|&k| k as f64 * step).collect()).collect();
    let scored = points
        .par_iter()
        .map(|w| bank.score(pref, w, opts.penalty.value(w)))
        .collect::<Result<Vec<_>>>()?;
    let (values, standard_errors): (Vec<f64>, Vec<f64>) = scored.into_iter().unzip();
    Ok(P1Result {
        total,
        resolution: opts.resolution,
        samples: bank.rows(),
        argmax: first_argmax(&values),
        counts,
        points,
        values,
        standard_errors,
    })
}

/// Constrained problems over a grid of totals.
#[derive(Clone, Debug, PartialEq)]
pub struct P2Result {
    pub per_total: Vec<P1Result>,
    /// Index into `per_total` of the global argmax.
    pub best: usize,
    pub warning: Option<String>,
}

impl P2Result {
    pub fn global(&self) -> &P1Result {
        &self.per_total[self.best]
    }

    /// Whether each per-total argmax is a lattice point nearest the uniform ray.
    pub fn on_uniform_ray(&self) -> Vec<bool> {
        self.per_total.iter().map(P1Result::argmax_is_nearest_uniform).collect()
    }
}

/// Maximizes `rho(w . X - g(w))` over `w >= 0` by running the constrained
/// problem at each total of `w_grid`.
pub fn optimize_p2(pref: &PreferenceSpec, bank: &SampleBank, w_grid: &[f64], opts: &LatticeOptions) -> Result<P2Result> {
    if w_grid.is_empty() {
        return Err(Error::Input("the grid of totals is empty".into()));
    }
    let per_total = w_grid.iter().map(|&t| optimize_p1(pref, bank, t, opts)).collect::<Result<Vec<_>>>()?;
    let best = first_argmax(&per_total.iter().map(P1Result::value).collect::<Vec<_>>());
    let largest = w_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let warning = (opts.penalty.is_zero() && per_total[best].total == largest).then(|| {
        format!(
            "penalty is zero and the best total is the grid maximum {largest}; \
             the value grows without bound in the total, so the free-total problem is degenerate"
        )
    });
    Ok(P2Result { per_total, best, warning })
}

/// Values along a chain of weight vectors, with standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult {
    pub points: Vec<WeightVector>,
    pub values: Vec<f64>,
    pub standard_errors: Vec<f64>,
}

impl ProbeResult {
    /// Per step: value does not drop by more than the noise band.
    pub fn steps_non_decreasing(&self) -> Vec<bool> {
        (1..self.values.len())
            .map(|i| {
                let band = NOISE_Z * self.standard_errors[i].max(self.standard_errors[i - 1]);
                self.values[i] >= self.values[i - 1] - band
            })
            .collect()
    }

    /// Per step: value rises by more than the noise band.
    pub fn steps_increasing_beyond_noise(&self) -> Vec<bool> {
        (1..self.values.len())
            .map(|i| {
                let band = NOISE_Z * self.standard_errors[i].max(self.standard_errors[i - 1]);
                self.values[i] > self.values[i - 1] + band
            })
            .collect()
    }
}

/// `rho(w . X)` at every point of the T-transform chain starting at `eta`.
pub fn schur_probe(
    pref: &PreferenceSpec,
    bank: &SampleBank,
    eta: &WeightVector,
    chain: &[TTransform],
) -> Result<ProbeResult> {
    pref.check_margins(bank.margins())?;
    let points = chain_points(eta, chain);
    let scored = points
        .par_iter()
        .map(|w| bank.score(pref, w.as_slice(), 0.0))
        .collect::<Result<Vec<_>>>()?;
    let (values, standard_errors) = scored.into_iter().unzip();
    Ok(ProbeResult { points, values, standard_errors })
}

/// Exact expected utilities over the unit-total simplex lattice for iid
/// two-point components.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactLattice {
    pub points: Vec<Vec<BigRational>>,
    pub values: Vec<BigRational>,
    /// Index of the uniform vector in `points`.
    pub uniform: usize,
}

impl ExactLattice {
    pub fn max_value(&self) -> &BigRational {
        self.values.iter().max().expect("lattice is never empty")
    }

    /// Uniform weights attain the maximum.
    pub fn uniform_maximizes(&self) -> bool {
        &self.values[self.uniform] == self.max_value()
    }

    /// A corner `(1, 0, ..., 0)` strictly beats the uniform vector.
    pub fn corner_beats_uniform(&self) -> bool {
        let corner = self.points.iter().position(|p| p[0].is_one()).expect("corner is a lattice point");
        self.values[corner] > self.values[self.uniform]
    }

    /// Lexicographically smallest maximizer.
    pub fn argmax(&self) -> &[BigRational] {
        let best = self.max_value();
        let mut idx: Vec<usize> = (0..self.points.len()).filter(|&i| &self.values[i] == best).collect();
        idx.sort_by(|&a, &b| self.points[a].cmp(&self.points[b]));
        &self.points[idx[0]]
    }
}

/// Enumerates the resolution-`r` lattice plus the uniform vector (added when
/// `n` does not divide `r`), each evaluated exactly.
pub fn two_point_lattice(
    a: &BigRational,
    b: &BigRational,
    prob_a: &BigRational,
    n: usize,
    resolution: usize,
    utility: &TabulatedUtility,
) -> Result<ExactLattice> {
    if resolution < 1 {
        return Err(Error::Input("lattice resolution must be at least 1".into()));
    }
    let r = BigRational::from_integer(resolution.into());
    let mut points: Vec<Vec<BigRational>> = lattice_counts(n, resolution, DEFAULT_LATTICE_BUDGET)?
        .into_iter()
        .map(|c| c.into_iter().map(|k| BigRational::from_integer(k.into()) / &r).collect())
        .collect();
    let uniform_point = vec![BigRational::one() / BigRational::from_integer(n.into()); n];
    let uniform = match points.iter().position(|p| *p == uniform_point) {
        Some(i) => i,
        None => {
            points.push(uniform_point);
            points.len() - 1
        }
    };
    let values = points
        .iter()
        .map(|w| two_point_eu_exact(a, b, prob_a, w, utility))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExactLattice { points, values, uniform })
}
