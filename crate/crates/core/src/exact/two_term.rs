//! Semi-analytic CDF of `eta X1 + (1 - eta) X2` for independent
//! `X_i ~ Pareto(alpha_i)`, via a one-dimensional integral.
//!
//! With `r_i = -1/alpha_i` and `y0 = ((x - z)/(1 - z))^(1/r2)`,
//!
//! ```text
//! H(z) = y0 + int_{y0}^{1} ((x - (1 - z) y^r2) / z)^(1/r1) dy
//! ```
//!
//! is the survival probability `P(z X1 + (1 - z) X2 > x)`, and the CDF is
//! `1 - H(eta)`.

use crate::distributions::ParetoSpec;
use crate::error::{Error, Result};

use super::quadrature;

/// Absolute target for the quadrature.
pub const QUAD_TOL: f64 = 1e-12;
const MAX_INTERVALS: usize = 4000;
/// Relative offset of the extra split just above the lower limit.
const LOWER_SPLIT: f64 = 1e-6;

/// Parameters of the two-term integral representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoTermIntegrand {
    alpha1: f64,
    alpha2: f64,
    eta: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("tail parameter {alpha} outside (0, 1]")))
    }
}

impl TwoTermIntegrand {
    /// `eta` is the weight on `X1`; it must lie in `[0, 1/2]`.
    pub fn new(alpha1: f64, alpha2: f64, eta: f64) -> Result<Self> {
        check_alpha(alpha1)?;
        check_alpha(alpha2)?;
        if !(0.0..=0.5).contains(&eta) {
            return Err(Error::Domain(format!("weight eta={eta} outside [0, 1/2]")));
        }
        Ok(TwoTermIntegrand { alpha1, alpha2, eta })
    }

    /// Normalizes arbitrary non-negative weights `(w1, w2)` on
    /// `(Pareto(alpha1), Pareto(alpha2))`, relabelling so that the smaller
    /// weight comes first. Returns the integrand and the total weight.
    pub fn for_weights(alpha1: f64, alpha2: f64, w1: f64, w2: f64) -> Result<(Self, f64)> {
        let total = w1 + w2;
        if !(w1 >= 0.0 && w2 >= 0.0 && total > 0.0) {
            return Err(Error::Domain(format!("weights ({w1}, {w2}) must be non-negative, not both zero")));
        }
        let spec = if w1 <= w2 {
            Self::new(alpha1, alpha2, w1 / total)?
        } else {
            Self::new(alpha2, alpha1, w2 / total)?
        };
        Ok((spec, total))
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn r1(&self) -> f64 {
        -1.0 / self.alpha1
    }

    pub fn r2(&self) -> f64 {
        -1.0 / self.alpha2
    }

    /// `P(eta X1 + (1 - eta) X2 > x)`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        h_function(self.alpha1, self.alpha2, x, self.eta)
    }

    /// `P(eta X1 + (1 - eta) X2 <= x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if self.eta == 0.0 {
            return Ok(ParetoSpec::standard(self.alpha2)?.cdf(x));
        }
        Ok((1.0 - self.survival(x)?).clamp(0.0, 1.0))
    }

    /// Left-continuous quantile by bisection on the CDF.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        crate::distributions::check_probability(p)?;
        let mut hi = 2.0;
        while self.cdf(hi)? < p {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Domain(format!("quantile {p} beyond floating range")));
            }
        }
        let mut lo = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid)? >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

/// CDF of the two-term portfolio at `x`.
pub fn two_term_cdf(spec: &TwoTermIntegrand, x: f64) -> Result<f64> {
    spec.cdf(x)
}

/// `H(z)` at level `x`: the survival probability of `z X1 + (1 - z) X2`.
pub fn h_function(alpha1: f64, alpha2: f64, x: f64, z: f64) -> Result<f64> {
    check_alpha(alpha1)?;
    check_alpha(alpha2)?;
    if !(0.0..=0.5).contains(&z) {
        return Err(Error::Domain(format!("z={z} outside [0, 1/2]")));
    }
    if x.is_nan() {
        return Err(Error::Domain("x is NaN".into()));
    }
    if x <= 1.0 {
        return Ok(1.0);
    }
    let (r1, r2) = (-1.0 / alpha1, -1.0 / alpha2);
    if z == 0.0 {
        return Ok(x.powf(1.0 / r2));
    }
    let y0 = ((x - z) / (1.0 - z)).powf(1.0 / r2);
    if y0 >= 1.0 {
        return Ok(1.0);
    }
    let integrand = |y: f64| {
        let base = ((x - (1.0 - z) * y.powf(r2)) / z).max(1.0);
        base.powf(1.0 / r1)
    };
    let split = y0 + LOWER_SPLIT * (1.0 - y0);
    let est = quadrature::integrate(integrand, y0, 1.0, &[split], QUAD_TOL, MAX_INTERVALS)?;
    Ok((y0 + est.value).clamp(0.0, 1.0))
}
