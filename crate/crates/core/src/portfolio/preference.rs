//! Preference functionals on portfolio samples and Schur-convex penalties.

use std::fmt;
use std::str::FromStr;

use crate::distributions::Margin;
use crate::error::{Error, Result};
use crate::exact::{parse_rational, TabulatedUtility};
use crate::montecarlo::EmpiricalDistribution;

/// Monotonicity class of a preference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    /// Never prefers a dominated law.
    Weak,
    /// Weak, and strictly prefers a law that is strictly larger on a set of
    /// positive probability.
    Mild,
}

/// Increasing utility functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Utility {
    Identity,
    Sqrt,
    /// `exp(x)`: convex and unbounded.
    Exp,
    Log1p,
    /// `min(x, c)`.
    Capped(f64),
    Tabulated { table: TabulatedUtility, xs: Vec<f64>, ys: Vec<f64> },
}

impl Utility {
    pub fn tabulated(table: TabulatedUtility) -> Self {
        let (xs, ys) = table.knots_f64();
        Utility::Tabulated { table, xs, ys }
    }

    /// Evaluates `u(x)` for `x >= 0`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Utility::Identity => x,
            Utility::Sqrt => x.max(0.0).sqrt(),
            Utility::Exp => x.exp(),
            Utility::Log1p => x.max(0.0).ln_1p(),
            Utility::Capped(c) => x.min(*c),
            Utility::Tabulated { xs, ys, .. } => interpolate(xs, ys, x),
        }
    }

    pub fn is_bounded_above(&self) -> bool {
        match self {
            Utility::Capped(_) => true,
            Utility::Tabulated { table, .. } => table.is_bounded_above(),
            _ => false,
        }
    }

    /// Constant on some interval of the sample range, so only weakly monotone.
    fn has_flat_part(&self) -> bool {
        match self {
            Utility::Capped(_) => true,
            Utility::Tabulated { ys, .. } => ys.windows(2).any(|w| w[0] == w[1]),
            _ => false,
        }
    }
}

/// Piecewise-linear interpolation with linear extrapolation at both ends.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1, y0, y1) = (xs[k - 1], xs[k], ys[k - 1], ys[k]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

impl fmt::Display for Utility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Utility::Identity => write!(f, "identity"),
            Utility::Sqrt => write!(f, "sqrt"),
            Utility::Exp => write!(f, "exp"),
            Utility::Log1p => write!(f, "log1p"),
            Utility::Capped(c) => write!(f, "cap:{c}"),
            Utility::Tabulated { xs, ys, .. } => {
                let pts: Vec<String> = xs.iter().zip(ys).map(|(x, y)| format!("{x}:{y}")).collect();
                write!(f, "table:{}", pts.join(";"))
            }
        }
    }
}

/// A preference `rho`; larger is better.
#[derive(Clone, Debug, PartialEq)]
pub enum PreferenceSpec {
    /// Left `p`-quantile.
    Quantile(f64),
    ExpectedUtility(Utility),
    /// Average of the left quantiles over `[lo, hi]`: a distortion with
    /// bounded support, insensitive to the far tail.
    RangeQuantile { lo: f64, hi: f64 },
}

impl PreferenceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PreferenceSpec::Quantile(p) if !(*p > 0.0 && *p < 1.0) => {
                Err(Error::Spec(format!("quantile level {p} must lie in (0, 1)")))
            }
            PreferenceSpec::RangeQuantile { lo, hi } if !(*lo > 0.0 && lo < hi && *hi < 1.0) => {
                Err(Error::Spec(format!("quantile range [{lo}, {hi}] must satisfy 0 < lo < hi < 1")))
            }
            PreferenceSpec::ExpectedUtility(Utility::Capped(c)) if !c.is_finite() => {
                Err(Error::Spec(format!("utility cap {c} must be finite")))
            }
            _ => Ok(()),
        }
    }

    pub fn monotonicity(&self) -> Monotonicity {
        match self {
            PreferenceSpec::ExpectedUtility(u) if u.has_flat_part() => Monotonicity::Weak,
            _ => Monotonicity::Mild,
        }
    }

    /// Refuses expected utilities that need not exist on the given margins.
    pub fn check_margins(&self, margins: &[Margin]) -> Result<()> {
        self.validate()?;
        if let PreferenceSpec::ExpectedUtility(u) = self {
            if !u.is_bounded_above() && margins.iter().any(Margin::has_infinite_mean) {
                return Err(Error::Spec(format!(
                    "expected utility with the unbounded utility '{u}' can be infinite on infinite-mean margins, \
                     and its sample mean does not converge; use a quantile preference or a capped utility"
                )));
            }
        }
        Ok(())
    }

    /// `rho` of a sample given as raw values; reorders `values`.
    pub fn evaluate_values(&self, values: &mut [f64]) -> Result<f64> {
        self.validate()?;
        if values.is_empty() {
            return Err(Error::Input("cannot evaluate a preference on an empty sample".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Input("sample contains NaN".into()));
        }
        let n = values.len();
        match self {
            PreferenceSpec::Quantile(p) => {
                let k = left_index(*p, n);
                let (_, v, _) = values.select_nth_unstable_by(k, f64::total_cmp);
                Ok(*v)
            }
            PreferenceSpec::ExpectedUtility(u) => {
                let mut sum = 0.0;
                for &v in values.iter() {
                    let uv = u.eval(v);
                    if !uv.is_finite() {
                        return Err(Error::Domain(format!("utility '{u}' is not finite at {v}")));
                    }
                    sum += uv;
                }
                Ok(sum / n as f64)
            }
            PreferenceSpec::RangeQuantile { lo, hi } => {
                let (a, b) = (left_index(*lo, n), left_index(*hi, n));
                values.select_nth_unstable_by(a, f64::total_cmp);
                let rest = &mut values[a..];
                rest.select_nth_unstable_by(b - a, f64::total_cmp);
                let window = &mut rest[..=b - a];
                window.sort_unstable_by(f64::total_cmp);
                Ok(window.iter().sum::<f64>() / window.len() as f64)
            }
        }
    }

    /// Approximate standard error of the estimate on `values` (sorted or not).
    pub fn standard_error(&self, values: &[f64]) -> f64 {
        let n = values.len();
        if n < 2 {
            return f64::INFINITY;
        }
        let nf = n as f64;
        match self {
            PreferenceSpec::Quantile(p) => quantile_se(values, *p),
            PreferenceSpec::RangeQuantile { lo, hi } => {
                // the endpoint quantile errors bound the error of the average
                quantile_se(values, *lo).max(quantile_se(values, *hi))
            }
            PreferenceSpec::ExpectedUtility(u) => {
                let us: Vec<f64> = values.iter().map(|&v| u.eval(v)).collect();
                let mean = us.iter().sum::<f64>() / nf;
                let var = us.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
                (var / nf).sqrt()
            }
        }
    }
}

/// Index of the left `p`-quantile among `n` sorted values.
fn left_index(p: f64, n: usize) -> usize {
    ((p * n as f64).ceil() as usize).clamp(1, n) - 1
}

/// Sparsity-based standard error `sqrt(p(1-p)/n) / f(q)`, with the density
/// estimated from the quantile spread over `p +- h`.
fn quantile_se(values: &[f64], p: f64) -> f64 {
    let n = values.len();
    let h = (n as f64).powf(-1.0 / 3.0).min(0.5 * p.min(1.0 - p));
    let mut buf = values.to_vec();
    let mut at = |q: f64| {
        let k = left_index(q, n);
        *buf.select_nth_unstable_by(k, f64::total_cmp).1
    };
    let spread = (at(p + h) - at(p - h)) / (2.0 * h);
    spread * (p * (1.0 - p) / n as f64).sqrt()
}

impl fmt::Display for PreferenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PreferenceSpec::Quantile(p) => write!(f, "quantile:{p}"),
            PreferenceSpec::ExpectedUtility(u) => write!(f, "eu:{u}"),
            PreferenceSpec::RangeQuantile { lo, hi } => write!(f, "range:{lo}:{hi}"),
        }
    }
}

impl FromStr for PreferenceSpec {
    type Err = Error;

    /// `quantile:P`, `range:LO:HI`, or `eu:U` with `U` one of `identity`,
    /// `sqrt`, `exp`, `log1p`, `cap:C`, `table:X:Y;X:Y;...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Spec(format!("cannot parse preference '{s}'"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let pref = match kind.trim() {
            "quantile" | "q" => PreferenceSpec::Quantile(num(rest)?),
            "range" => {
                let (lo, hi) = rest.split_once(':').ok_or_else(bad)?;
                PreferenceSpec::RangeQuantile { lo: num(lo)?, hi: num(hi)? }
            }
            "eu" => {
                let (u, arg) = match rest.split_once(':') {
                    Some((u, a)) => (u.trim(), Some(a)),
                    None => (rest.trim(), None),
                };
                let u = match (u, arg) {
                    ("identity", None) => Utility::Identity,
                    ("sqrt", None) => Utility::Sqrt,
                    ("exp", None) => Utility::Exp,
                    ("log1p", None) => Utility::Log1p,
                    ("cap", Some(c)) => Utility::Capped(num(c)?),
                    ("table", Some(t)) => {
                        let knots = t
                            .split(';')
                            .map(|kv| {
                                let (x, y) = kv.split_once(':').ok_or_else(bad)?;
                                Ok((parse_rational(x.trim())?, parse_rational(y.trim())?))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Utility::tabulated(TabulatedUtility::new(knots)?)
                    }
                    _ => return Err(bad()),
                };
                PreferenceSpec::ExpectedUtility(u)
            }
            _ => return Err(bad()),
        };
        pref.validate()?;
        Ok(pref)
    }
}

/// Schur-convex penalty `g(w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PenaltySpec {
    None,
    /// `c * sum w_i^2`.
    SumSquares(f64),
    /// `c * max w_i`.
    Max(f64),
}

impl PenaltySpec {
    pub fn value(&self, w: &[f64]) -> f64 {
        match self {
            PenaltySpec::None => 0.0,
            PenaltySpec::SumSquares(c) => c * w.iter().map(|v| v * v).sum::<f64>(),
            PenaltySpec::Max(c) => c * w.iter().copied().fold(0.0, f64::max),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PenaltySpec::None => true,
            PenaltySpec::SumSquares(c) | PenaltySpec::Max(c) => *c == 0.0,
        }
    }
}

impl fmt::Display for PenaltySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PenaltySpec::None => write!(f, "none"),
            PenaltySpec::SumSquares(c) => write!(f, "sumsq:{c}"),
            PenaltySpec::Max(c) => write!(f, "max:{c}"),
        }
    }
}

impl FromStr for PenaltySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Spec(format!("cannot parse penalty '{s}'"));
        if s.trim() == "none" {
            return Ok(PenaltySpec::None);
        }
        let (kind, c) = s.split_once(':').ok_or_else(bad)?;
        let c: f64 = c.trim().parse().map_err(|_| bad())?;
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::Spec(format!("penalty coefficient {c} must be finite and non-negative")));
        }
        match kind.trim() {
            "sumsq" => Ok(PenaltySpec::SumSquares(c)),
            "max" => Ok(PenaltySpec::Max(c)),
            _ => Err(bad()),
        }
    }
}

/// `rho` of an empirical distribution.
pub fn evaluate(pref: &PreferenceSpec, sample: &EmpiricalDistribution) -> Result<f64> {
    pref.evaluate_values(&mut sample.sorted_values().to_vec())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::majorization::random_majorizing_pair;
    use crate::montecarlo::StreamKey;

    #[test]
    fn parses_and_prints() {
        for s in ["quantile:0.95", "range:0.9:0.99", "eu:sqrt", "eu:exp", "eu:cap:100", "eu:identity", "eu:log1p"] {
            let p: PreferenceSpec = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        let t: PreferenceSpec = "eu:table:0:0;1:1;3:2".parse().unwrap();
        assert_eq!(t.to_string(), "eu:table:0:0;1:1;3:2");
        assert!("quantile:1.5".parse::<PreferenceSpec>().is_err());
        assert!("eu:cubic".parse::<PreferenceSpec>().is_err());
        // decreasing table is rejected
        assert!(matches!("eu:table:0:1;1:0".parse::<PreferenceSpec>(), Err(Error::Spec(_))));
        assert_eq!("sumsq:0.1".parse::<PenaltySpec>().unwrap(), PenaltySpec::SumSquares(0.1));
        assert_eq!("none".parse::<PenaltySpec>().unwrap(), PenaltySpec::None);
        assert!("max:-1".parse::<PenaltySpec>().is_err());
    }

    #[test]
    fn monotonicity_classes() {
        assert_eq!(PreferenceSpec::Quantile(0.9).monotonicity(), Monotonicity::Mild);
        assert_eq!(PreferenceSpec::ExpectedUtility(Utility::Capped(5.0)).monotonicity(), Monotonicity::Weak);
        assert_eq!(PreferenceSpec::ExpectedUtility(Utility::Sqrt).monotonicity(), Monotonicity::Mild);
    }

    #[test]
    fn quantile_matches_empirical_quantile() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let e = EmpiricalDistribution::new(v.clone()).unwrap();
        for p in [0.01, 0.5, 0.95, 0.999] {
            let got = evaluate(&PreferenceSpec::Quantile(p), &e).unwrap();
            assert_eq!(got, e.quantile(p).unwrap());
        }
        let r = evaluate(&PreferenceSpec::RangeQuantile { lo: 0.5, hi: 0.6 }, &e).unwrap();
        assert!((r - 55.0).abs() < 1e-12);
    }

    #[test]
    fn median_of_unit_pareto_is_two() {
        let m = Margin::pareto(1.0).unwrap();
        let x = crate::distributions::sample_independent(&[m], StreamKey::new(5), 200_000).unwrap();
        let mut x = x;
        let med = PreferenceSpec::Quantile(0.5).evaluate_values(&mut x).unwrap();
        assert!((med - 2.0).abs() < 0.03, "{med}");
    }

    #[test]
    fn capped_utility_is_finite_on_infinite_mean_sample() {
        let m = Margin::pareto(0.5).unwrap();
        let pref = PreferenceSpec::ExpectedUtility(Utility::Capped(100.0));
        pref.check_margins(&[m.clone()]).unwrap();
        let mut x = crate::distributions::sample_independent(&[m], StreamKey::new(2), 100_000).unwrap();
        let v = pref.evaluate_values(&mut x).unwrap();
        // E min(X, 100) = 2*10 - 1 = 19 for Pareto(1/2)
        assert!((v - 19.0).abs() < 0.3, "{v}");
    }

    #[test]
    fn unbounded_utility_refused_on_infinite_mean() {
        let heavy = Margin::pareto(0.5).unwrap();
        let light = Margin::pareto(2.0).unwrap();
        for u in [Utility::Exp, Utility::Sqrt, Utility::Identity, Utility::Log1p] {
            let p = PreferenceSpec::ExpectedUtility(u);
            assert!(matches!(p.check_margins(&[heavy.clone()]), Err(Error::Spec(_))));
            assert!(p.check_margins(&[light.clone()]).is_ok());
        }
        assert!(PreferenceSpec::Quantile(0.9).check_margins(&[heavy]).is_ok());
    }

    #[test]
    fn interpolation_extrapolates_linearly() {
        let u: PreferenceSpec = "eu:table:0:0;2:1;4:1".parse().unwrap();
        let PreferenceSpec::ExpectedUtility(u) = u else { unreachable!() };
        assert_eq!(u.eval(1.0), 0.5);
        assert_eq!(u.eval(10.0), 1.0);
        assert!(u.is_bounded_above());
    }

    #[test]
    fn penalties_are_schur_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let n = 2 + (rand::Rng::random::<u32>(&mut rng) % 5) as usize;
            let (eta, theta) = random_majorizing_pair(n, &mut rng).unwrap();
            for g in [PenaltySpec::SumSquares(0.7), PenaltySpec::Max(1.3), PenaltySpec::None] {
                assert!(g.value(theta.as_slice()) <= g.value(eta.as_slice()) + 1e-12);
            }
        }
    }

    #[test]
    fn standard_error_shrinks_with_n() {
        let m = Margin::pareto(1.0).unwrap();
        let small = crate::distributions::sample_independent(&[m.clone()], StreamKey::new(1), 10_000).unwrap();
        let big = crate::distributions::sample_independent(&[m], StreamKey::new(1), 1_000_000).unwrap();
        let p = PreferenceSpec::Quantile(0.5);
        let (a, b) = (p.standard_error(&small), p.standard_error(&big));
        // median density of Pareto(1) is 1/4, so se = 2/sqrt(n)
        assert!((b * 1000.0 - 2.0).abs() < 0.2, "{b}");
        assert!(a > 5.0 * b);
    }
}
