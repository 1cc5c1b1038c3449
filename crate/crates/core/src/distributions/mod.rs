//! Samplers, CDFs and quantiles for the univariate and multivariate laws
//! used by the scenarios.

mod feller;
mod pareto;

pub use feller::{
    common_shock_row, sample_common_shock, CommonShockSampler, CommonShockSpec,
    FellerParetoSampler, FellerParetoSpec, ShockForm,
};
pub use pareto::{GpdSpec, ParetoSpec};

pub(crate) use pareto::check_probability;

use rand::Rng;

use crate::error::{Error, Result};
use crate::montecarlo::engine::{fill_rows, StreamKey};

/// Highest St. Petersburg level produced by the sampler.
pub const STP_MAX_LEVEL: u32 = 62;

/// Draws the St. Petersburg payoff `2^k`, `P(k) = 2^-k`.
///
/// The level is one plus the number of trailing zero bits of a uniform word,
/// capped at [`STP_MAX_LEVEL`].
#[inline]
pub fn draw_st_petersburg<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let k = (rng.random::<u64>().trailing_zeros() + 1).min(STP_MAX_LEVEL);
    (k as f64).exp2()
}

/// Finite sum `sum_j lambda_j Y_j` of independent Pareto terms.
#[derive(Clone, Debug, PartialEq)]
pub struct ParetoSumSpec {
    terms: Vec<(f64, ParetoSpec)>,
}

impl ParetoSumSpec {
    pub fn new(terms: Vec<(f64, ParetoSpec)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("a Pareto sum needs at least one term".into()));
        }
        if terms.iter().any(|(l, _)| !(*l >= 0.0 && l.is_finite())) {
            return Err(Error::Domain("Pareto sum coefficients must be non-negative".into()));
        }
        Ok(ParetoSumSpec { terms })
    }

    pub fn terms(&self) -> &[(f64, ParetoSpec)] {
        &self.terms
    }

    pub fn heaviest_alpha(&self) -> f64 {
        self.terms.iter().map(|(_, p)| p.alpha()).fold(f64::INFINITY, f64::min)
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.terms.iter().map(|(l, p)| l * p.draw(rng)).sum()
    }
}

/// Two-point law: `a` with probability `prob_a`, otherwise `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPointSpec {
    pub a: f64,
    pub b: f64,
    pub prob_a: f64,
}

impl TwoPointSpec {
    pub fn new(a: f64, b: f64, prob_a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&prob_a) {
            return Err(Error::Domain(format!("probability {prob_a} outside [0, 1]")));
        }
        Ok(TwoPointSpec { a, b, prob_a })
    }
}

/// One marginal law.
#[derive(Clone, Debug, PartialEq)]
pub enum Margin {
    Pareto(ParetoSpec),
    Gpd(GpdSpec),
    FellerPareto(FellerParetoSpec),
    StPetersburg,
    ParetoSum(ParetoSumSpec),
    TwoPoint(TwoPointSpec),
}

impl Margin {
    pub fn pareto(alpha: f64) -> Result<Self> {
        Ok(Margin::Pareto(ParetoSpec::standard(alpha)?))
    }

    /// Tail index governing the margin, when it has one.
    pub fn tail_index(&self) -> Option<f64> {
        match self {
            Margin::Pareto(p) => Some(p.alpha()),
            Margin::Gpd(g) if g.xi() > 0.0 => Some(1.0 / g.xi()),
            Margin::FellerPareto(f) => Some(f.alpha / f.gamma),
            Margin::StPetersburg => Some(1.0),
            Margin::ParetoSum(s) => Some(s.heaviest_alpha()),
            _ => None,
        }
    }

    pub fn has_infinite_mean(&self) -> bool {
        match self {
            Margin::Pareto(p) => p.is_extremely_heavy(),
            Margin::Gpd(g) => g.has_infinite_mean(),
            Margin::FellerPareto(f) => f.has_infinite_mean(),
            Margin::StPetersburg => true,
            Margin::ParetoSum(s) => s.heaviest_alpha() <= 1.0,
            Margin::TwoPoint(_) => false,
        }
    }

    /// Analytic CDF, where one exists in closed form.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        match self {
            Margin::Pareto(p) => Some(p.cdf(x)),
            Margin::Gpd(g) => Some(g.cdf(x)),
            Margin::FellerPareto(f) => f.cdf(x),
            _ => None,
        }
    }

    /// Quantile, needed to drive comonotone draws from one shared uniform.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        match self {
            Margin::Pareto(s) => Ok(s.quantile_unchecked(p)),
            Margin::Gpd(g) => Ok(g.quantile_unchecked(p)),
            Margin::FellerPareto(f) => f.quantile(p),
            Margin::StPetersburg => {
                // smallest k with 1 - 2^-k >= p
                let k = (-(1.0 - p).log2()).ceil().max(1.0).min(STP_MAX_LEVEL as f64);
                Ok(k.exp2())
            }
            Margin::TwoPoint(t) => {
                let (lo, hi, p_lo) = if t.a <= t.b {
                    (t.a, t.b, t.prob_a)
                } else {
                    (t.b, t.a, 1.0 - t.prob_a)
                };
                Ok(if p <= p_lo { lo } else { hi })
            }
            Margin::ParetoSum(_) => Err(Error::Config(
                "Pareto sums have no closed-form quantile".into(),
            )),
        }
    }

    pub fn sampler(&self) -> Result<MarginSampler> {
        Ok(match self {
            Margin::Pareto(p) => MarginSampler::Pareto(*p),
            Margin::Gpd(g) => MarginSampler::Gpd(*g),
            Margin::FellerPareto(f) => MarginSampler::FellerPareto(f.sampler()?),
            Margin::StPetersburg => MarginSampler::StPetersburg,
            Margin::ParetoSum(s) => MarginSampler::ParetoSum(s.clone()),
            Margin::TwoPoint(t) => MarginSampler::TwoPoint(*t),
        })
    }
}

/// A margin with any gamma distributions pre-built.
#[derive(Clone, Debug)]
pub enum MarginSampler {
    Pareto(ParetoSpec),
    Gpd(GpdSpec),
    FellerPareto(FellerParetoSampler),
    StPetersburg,
    ParetoSum(ParetoSumSpec),
    TwoPoint(TwoPointSpec),
}

impl MarginSampler {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            MarginSampler::Pareto(p) => p.draw(rng),
            MarginSampler::Gpd(g) => g.draw(rng),
            MarginSampler::FellerPareto(f) => f.draw(rng),
            MarginSampler::StPetersburg => draw_st_petersburg(rng),
            MarginSampler::ParetoSum(s) => s.draw(rng),
            MarginSampler::TwoPoint(t) => {
                if rng.random::<f64>() < t.prob_a {
                    t.a
                } else {
                    t.b
                }
            }
        }
    }
}

/// Pointwise modification applied to each component before weighting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MarginTransform {
    Identity,
    /// `min(x, c)`
    Cap(f64),
    /// `max(x, c)`
    FloorMax(f64),
    /// `(x - c)_+`
    Excess(f64),
    /// Pareto survival `t^-alpha` only for `t >= c`; the body `[1, c)` is
    /// mapped affinely onto `[0, c)` so that `P(Y > 0) = 1`.
    TailBeyond(f64),
    /// Multiply by an event indicator with probability `p`.
    Trigger(f64),
}

impl MarginTransform {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MarginTransform::Identity => Ok(()),
            MarginTransform::Cap(c)
            | MarginTransform::FloorMax(c)
            | MarginTransform::Excess(c)
            | MarginTransform::TailBeyond(c) => {
                if c >= 1.0 && c.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("threshold c={c} must be at least 1")))
                }
            }
            MarginTransform::Trigger(p) => check_probability(p),
        }
    }

    /// Applies the deterministic part; triggers are handled by the caller.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            MarginTransform::Identity | MarginTransform::Trigger(_) => x,
            MarginTransform::Cap(c) => x.min(c),
            MarginTransform::FloorMax(c) => x.max(c),
            MarginTransform::Excess(c) => (x - c).max(0.0),
            MarginTransform::TailBeyond(c) => {
                if x >= c || c == 1.0 {
                    x
                } else {
                    c * (x - 1.0) / (c - 1.0)
                }
            }
        }
    }

    pub fn trigger_probability(&self) -> Option<f64> {
        match *self {
            MarginTransform::Trigger(p) => Some(p),
            _ => None,
        }
    }

    /// Checks that the transform makes sense on top of `margin`.
    pub fn check_margin(&self, margin: &Margin) -> Result<()> {
        self.validate()?;
        if let MarginTransform::TailBeyond(_) = self {
            match margin {
                Margin::Pareto(p) if p.scale() == 1.0 => {}
                _ => {
                    return Err(Error::Config(
                        "tail-beyond transform requires a unit-scale Pareto margin".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

/// `n` independent draws of `margin` with `transform` applied.
///
/// Trigger events are drawn independently of the margin.
pub fn sample(
    margin: &Margin,
    transform: MarginTransform,
    key: StreamKey,
    n: usize,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Input("sample count must be at least 1".into()));
    }
    transform.check_margin(margin)?;
    let sampler = margin.sampler()?;
    let trigger = transform.trigger_probability();
    Ok(fill_rows(n, 1, key, |rng, row| {
        let x = transform.apply(sampler.draw(rng));
        row[0] = match trigger {
            Some(p) if rng.random::<f64>() >= p => 0.0,
            _ => x,
        };
    }))
}

/// Clayton copula `(sum u_i^(-1/alpha) - n + 1)^(-alpha)`: the survival copula
/// of the common-shock Pareto vector.
pub fn clayton_survival_copula(u: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha={alpha} must be positive")));
    }
    if u.is_empty() {
        return Err(Error::Domain("copula needs at least one argument".into()));
    }
    for &ui in u {
        check_probability(ui)?;
    }
    let s: f64 = u.iter().map(|ui| ui.powf(-1.0 / alpha)).sum();
    Ok((s - u.len() as f64 + 1.0).powf(-alpha))
}

/// Draws `rows` vectors of independent margins (row-major).
pub fn sample_independent(margins: &[Margin], key: StreamKey, rows: usize) -> Result<Vec<f64>> {
    let samplers = margins.iter().map(Margin::sampler).collect::<Result<Vec<_>>>()?;
    Ok(fill_rows(rows, samplers.len(), key, |rng, row| {
        for (o, s) in row.iter_mut().zip(&samplers) {
            *o = s.draw(rng);
        }
    }))
}
