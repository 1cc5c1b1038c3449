//! Feller-Pareto margins and the common-shock multivariate constructions.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::montecarlo::engine::{fill_rows, StreamKey};

use super::pareto::check_probability;

fn unit_gamma(shape: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0).map_err(|e| Error::Domain(format!("gamma shape {shape}: {e}")))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name}={v} must be positive")))
    }
}

/// `mu + sigma (Z1 / Z)^gamma` with `Z1 ~ Gamma(beta)`, `Z ~ Gamma(alpha)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FellerParetoSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl FellerParetoSpec {
    pub fn new(alpha: f64, beta: f64, gamma: f64, mu: f64, sigma: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        positive("gamma", gamma)?;
        positive("sigma", sigma)?;
        if !mu.is_finite() {
            return Err(Error::Domain(format!("location mu={mu} must be finite")));
        }
        Ok(FellerParetoSpec { alpha, beta, gamma, mu, sigma })
    }

    /// `FP(alpha, beta, gamma)` with location 0 and scale 1.
    pub fn standard(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(alpha, beta, gamma, 0.0, 1.0)
    }

    pub fn has_infinite_mean(&self) -> bool {
        self.alpha <= self.gamma
    }

    /// Closed-form (Pareto type IV) CDF; only available for `beta = 1`.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        if self.beta != 1.0 {
            return None;
        }
        if x <= self.mu {
            return Some(0.0);
        }
        let t = ((x - self.mu) / self.sigma).powf(1.0 / self.gamma);
        Some(1.0 - (1.0 + t).powf(-self.alpha))
    }

    /// Closed-form quantile for `beta = 1`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        if self.beta != 1.0 {
            return Err(Error::Config(
                "Feller-Pareto quantile has no closed form unless beta = 1".into(),
            ));
        }
        Ok(self.mu + self.sigma * ((1.0 - p).powf(-1.0 / self.alpha) - 1.0).powf(self.gamma))
    }

    pub fn sampler(&self) -> Result<FellerParetoSampler> {
        Ok(FellerParetoSampler {
            spec: *self,
            numerator: unit_gamma(self.beta)?,
            shock: unit_gamma(self.alpha)?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct FellerParetoSampler {
    spec: FellerParetoSpec,
    numerator: Gamma<f64>,
    shock: Gamma<f64>,
}

impl FellerParetoSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z1 = self.numerator.sample(rng);
        let z = self.shock.sample(rng);
        self.spec.mu + self.spec.sigma * (z1 / z).powf(self.spec.gamma)
    }
}

/// Common-shock vector: `n` numerator gammas sharing one `Gamma(alpha)` shock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommonShockSpec {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl CommonShockSpec {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("common-shock dimension must be at least 1".into()));
        }
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        Ok(CommonShockSpec { n, alpha, beta })
    }

    /// `MP(alpha, n)`: unit numerators, every margin Pareto(alpha).
    pub fn multivariate_pareto(n: usize, alpha: f64) -> Result<Self> {
        Self::new(n, alpha, 1.0)
    }

    pub fn sampler(&self, gamma_exp: f64) -> Result<CommonShockSampler> {
        positive("gamma", gamma_exp)?;
        let form = if self.beta == 1.0 && gamma_exp == 1.0 {
            ShockForm::Shifted
        } else {
            ShockForm::Power(gamma_exp)
        };
        Ok(CommonShockSampler {
            n: self.n,
            form,
            numerator: unit_gamma(self.beta)?,
            shock: unit_gamma(self.alpha)?,
        })
    }
}

/// How a row is assembled from the shock `Z` and numerators `Z_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShockForm {
    /// `(Z_i + Z) / Z`
    Shifted,
    /// `(Z_i / Z)^gamma`
    Power(f64),
}

/// Assembles one row from explicit gamma variates.
pub fn common_shock_row(form: ShockForm, shock: f64, numerators: &[f64], out: &mut [f64]) {
    for (o, &zi) in out.iter_mut().zip(numerators) {
        *o = match form {
            ShockForm::Shifted => (zi + shock) / shock,
            ShockForm::Power(g) => (zi / shock).powf(g),
        };
    }
}

#[derive(Clone, Debug)]
pub struct CommonShockSampler {
    n: usize,
    form: ShockForm,
    numerator: Gamma<f64>,
    shock: Gamma<f64>,
}

impl CommonShockSampler {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> ShockForm {
        self.form
    }

    pub fn draw_row<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let z = self.shock.sample(rng);
        for o in out.iter_mut().take(self.n) {
            let zi = self.numerator.sample(rng);
            *o = match self.form {
                ShockForm::Shifted => (zi + z) / z,
                ShockForm::Power(g) => (zi / z).powf(g),
            };
        }
    }
}

/// `rows` draws of the common-shock vector, row-major with `spec.n` columns.
pub fn sample_common_shock(
    spec: &CommonShockSpec,
    gamma_exp: f64,
    key: StreamKey,
    rows: usize,
) -> Result<Vec<f64>> {
    let sampler = spec.sampler(gamma_exp)?;
    Ok(fill_rows(rows, spec.n, key, |rng, row| sampler.draw_row(rng, row)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FellerParetoSpec::standard(0.0, 1.0, 1.0).is_err());
        assert!(FellerParetoSpec::new(1.0, 1.0, 1.0, f64::NAN, 1.0).is_err());
        assert!(CommonShockSpec::new(0, 1.0, 1.0).is_err());
        let fp = FellerParetoSpec::standard(0.5, 2.0, 1.0).unwrap();
        assert!(fp.has_infinite_mean());
        assert!(fp.cdf(1.0).is_none());
        assert!(matches!(fp.quantile(0.5), Err(Error::Config(_))));
        assert!(!FellerParetoSpec::standard(2.0, 1.0, 1.0).unwrap().has_infinite_mean());
    }

    #[test]
    fn type_iv_quantile_inverts_cdf() {
        let fp = FellerParetoSpec::new(0.7, 1.0, 1.3, 1.0, 2.0).unwrap();
        for i in 1..20 {
            let p = i as f64 / 20.0;
            let x = fp.quantile(p).unwrap();
            assert!((fp.cdf(x).unwrap() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn shifted_rows_at_least_one() {
        let spec = CommonShockSpec::multivariate_pareto(4, 0.5).unwrap();
        let rows = sample_common_shock(&spec, 1.0, StreamKey::new(1), 5000).unwrap();
        assert_eq!(rows.len(), 20_000);
        assert!(rows.iter().all(|&v| v >= 1.0 && v.is_finite()));
    }

    #[test]
    fn numerator_moves_only_its_coordinate() {
        let numerators = [0.4, 1.2, 2.0];
        for form in [ShockForm::Shifted, ShockForm::Power(1.7)] {
            let mut base = [0.0; 3];
            common_shock_row(form, 0.8, &numerators, &mut base);
            for i in 0..3 {
                let mut bumped_n = numerators;
                bumped_n[i] += 0.5;
                let mut bumped = [0.0; 3];
                common_shock_row(form, 0.8, &bumped_n, &mut bumped);
                for j in 0..3 {
                    if i == j {
                        assert!(bumped[j] > base[j]);
                    } else {
                        assert_eq!(bumped[j], base[j]);
                    }
                }
            }
        }
    }
}
