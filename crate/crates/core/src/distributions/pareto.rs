use rand::Rng;

use crate::error::{Error, Result};

/// Draws from (0, 1], never returning zero.
#[inline]
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability {p} outside (0, 1)")))
    }
}

/// Pareto law with survival `(scale / x)^alpha` on `[scale, inf)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParetoSpec {
    alpha: f64,
    scale: f64,
}

impl ParetoSpec {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("tail parameter {alpha} must be positive")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("scale {scale} must be positive")));
        }
        Ok(ParetoSpec { alpha, scale })
    }

    /// Unit-scale Pareto(alpha).
    pub fn standard(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// True when the mean is infinite (`alpha <= 1`).
    pub fn is_extremely_heavy(&self) -> bool {
        self.alpha <= 1.0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.scale {
            0.0
        } else {
            1.0 - (self.scale / x).powf(self.alpha)
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x < self.scale {
            1.0
        } else {
            (self.scale / x).powf(self.alpha)
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(self.quantile_unchecked(p))
    }

    #[inline]
    pub(crate) fn quantile_unchecked(&self, p: f64) -> f64 {
        self.scale * (1.0 - p).powf(-1.0 / self.alpha)
    }

    /// Inverse transform on `1 - U`, so the draw is always finite.
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.scale * open_unit(rng).powf(-1.0 / self.alpha)
    }
}

/// Generalized Pareto law `G_{xi,beta}` on `[0, inf)` for `xi >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpdSpec {
    xi: f64,
    beta: f64,
}

impl GpdSpec {
    pub fn new(xi: f64, beta: f64) -> Result<Self> {
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::Domain(format!("shape xi={xi} must be non-negative")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("scale beta={beta} must be positive")));
        }
        Ok(GpdSpec { xi, beta })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn has_infinite_mean(&self) -> bool {
        self.xi >= 1.0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else if self.xi == 0.0 {
            1.0 - (-x / self.beta).exp()
        } else {
            1.0 - (1.0 + self.xi * x / self.beta).powf(-1.0 / self.xi)
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(self.quantile_unchecked(p))
    }

    pub(crate) fn quantile_unchecked(&self, p: f64) -> f64 {
        if self.xi == 0.0 {
            -self.beta * (1.0 - p).ln()
        } else {
            self.beta / self.xi * ((1.0 - p).powf(-self.xi) - 1.0)
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v = open_unit(rng);
        if self.xi == 0.0 {
            -self.beta * v.ln()
        } else {
            self.beta / self.xi * (v.powf(-self.xi) - 1.0)
        }
    }

    /// The unit Pareto law reached by the location-scale map `1 + xi x / beta`.
    pub fn equivalent_pareto(&self) -> Result<ParetoSpec> {
        if self.xi == 0.0 {
            return Err(Error::Domain("xi = 0 is exponential, not Pareto".into()));
        }
        ParetoSpec::standard(1.0 / self.xi)
    }

    pub fn to_pareto_scale(&self, x: f64) -> f64 {
        1.0 + self.xi * x / self.beta
    }

    pub fn from_pareto_scale(&self, y: f64) -> f64 {
        self.beta / self.xi * (y - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::engine::StreamKey;
    use proptest::prelude::*;

    #[test]
    fn cdf_examples() {
        assert_eq!(ParetoSpec::new(1.0, 1.0).unwrap().cdf(2.0), 0.5);
        assert_eq!(ParetoSpec::new(0.5, 1.0).unwrap().cdf(1.0), 0.0);
        assert_eq!(ParetoSpec::new(0.5, 2.0).unwrap().cdf(8.0), 0.5);
        assert_eq!(ParetoSpec::new(0.5, 2.0).unwrap().cdf(1.0), 0.0);
    }

    #[test]
    fn quantile_examples() {
        let q = |a: f64, s: f64, p: f64| ParetoSpec::new(a, s).unwrap().quantile(p).unwrap();
        assert!((q(0.5, 1.0, 0.75) - 16.0).abs() < 1e-12);
        assert!((q(1.0, 1.0, 0.5) - 2.0).abs() < 1e-12);
        assert!((q(1.0, 3.0, 0.9) - 30.0).abs() < 1e-9);
    }

    #[test]
    fn quantile_rejects_endpoints() {
        let p = ParetoSpec::standard(1.0).unwrap();
        assert!(matches!(p.quantile(0.0), Err(Error::Domain(_))));
        assert!(matches!(p.quantile(1.0), Err(Error::Domain(_))));
        assert!(p.quantile(f64::NAN).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(ParetoSpec::new(0.0, 1.0).is_err());
        assert!(ParetoSpec::new(1.0, -1.0).is_err());
        assert!(GpdSpec::new(-0.1, 1.0).is_err());
        assert!(GpdSpec::new(1.0, 0.0).is_err());
        assert!(ParetoSpec::standard(1.0).unwrap().is_extremely_heavy());
        assert!(!ParetoSpec::standard(1.01).unwrap().is_extremely_heavy());
        assert!(GpdSpec::new(1.0, 2.0).unwrap().has_infinite_mean());
        assert!(!GpdSpec::new(0.5, 2.0).unwrap().has_infinite_mean());
    }

    #[test]
    fn round_trip_to_twelve_digits() {
        for &alpha in &[0.15, 0.5, 1.0, 3.0] {
            let spec = ParetoSpec::new(alpha, 2.5).unwrap();
            for i in 1..=99 {
                let p = i as f64 / 100.0;
                let back = spec.cdf(spec.quantile(p).unwrap());
                assert!(((back - p) / p).abs() < 1e-12, "alpha={alpha} p={p} back={back}");
            }
        }
        let gpd = GpdSpec::new(1.5, 2.0).unwrap();
        for i in 1..=99 {
            let p = i as f64 / 100.0;
            assert!((gpd.cdf(gpd.quantile(p).unwrap()) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn gpd_maps_onto_pareto() {
        let gpd = GpdSpec::new(1.5, 2.0).unwrap();
        let pareto = gpd.equivalent_pareto().unwrap();
        for &x in &[0.0, 0.3, 1.0, 7.0, 100.0] {
            let y = gpd.to_pareto_scale(x);
            assert!((gpd.cdf(x) - pareto.cdf(y)).abs() < 1e-14);
            assert!((gpd.from_pareto_scale(y) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn scale_equivariance_pathwise() {
        let key = StreamKey::new(5);
        let unit = ParetoSpec::standard(0.7).unwrap();
        let scaled = ParetoSpec::new(0.7, 3.0).unwrap();
        let mut a = key.rng(0);
        let mut b = key.rng(0);
        for _ in 0..1000 {
            let x = unit.draw(&mut a);
            let y = scaled.draw(&mut b);
            assert!((3.0 * x - y).abs() <= 1e-12 * y);
        }
    }

    proptest! {
        #[test]
        fn cdf_is_monotone_and_bounded(alpha in 0.05f64..5.0, scale in 0.1f64..10.0,
                                       x in 0.0f64..1e6, dx in 0.0f64..1e3) {
            let spec = ParetoSpec::new(alpha, scale).unwrap();
            let (a, b) = (spec.cdf(x), spec.cdf(x + dx));
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(a <= b);
            prop_assert!((spec.survival(x) + a - 1.0).abs() < 1e-12);
        }
    }
}
