//! Declarative joint laws and the paired sampler built from them.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::distributions::{CommonShockSampler, CommonShockSpec, Margin, MarginSampler, MarginTransform};
use crate::error::{Error, Result};
use crate::majorization::{majorizes, Majorization, WeightVector};
use crate::montecarlo::engine::{fill_rows, map_chunks, StreamKey};
use crate::montecarlo::MAX_SAMPLES;

/// Dependence between the components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dependence {
    Independent,
    /// `(Z_i / Z)^gamma` with `Z_i ~ Gamma(beta)`, `Z ~ Gamma(alpha)`; the
    /// `beta = gamma = 1` case uses `(Z_i + Z) / Z`.
    CommonShock { alpha: f64, beta: f64, gamma: f64 },
    /// One shared uniform fed through every quantile function.
    Comonotone,
    /// Per-row choice among independence, comonotonicity and the Clayton
    /// (common-shock Pareto) vector.
    Mixture { independent: f64, comonotone: f64, clayton: f64 },
}

/// How trigger events are coupled across components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TriggerCoupling {
    /// One event for every component.
    Same,
    /// Mutually exclusive events; needs `n p <= 1`.
    Disjoint,
    Independent,
    /// Component `i` fires when `W_i < p`, with `W_i` a shared uniform with
    /// probability `rho` and an own uniform otherwise.
    CommonUniform { rho: f64 },
}

impl TriggerCoupling {
    pub fn label(&self) -> String {
        match self {
            TriggerCoupling::Same => "same".into(),
            TriggerCoupling::Disjoint => "disjoint".into(),
            TriggerCoupling::Independent => "independent".into(),
            TriggerCoupling::CommonUniform { rho } => format!("common-uniform:{rho}"),
        }
    }
}

/// How weights meet margins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// Margins sorted by increasing tail index receive the weights in
    /// increasing order: the smallest weight sits on the heaviest tail.
    Sorted,
    /// Weights and margins are used in the order given.
    AsGiven,
}

/// A complete comparison: joint law plus the two weight vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub margins: Vec<Margin>,
    pub dependence: Dependence,
    pub transform: MarginTransform,
    pub trigger_coupling: TriggerCoupling,
    /// The less diversified vector `eta`.
    pub weights_low: WeightVector,
    /// The more diversified vector `theta`, majorized by `eta`.
    pub weights_high: WeightVector,
    pub region: Option<(f64, f64)>,
    pub pairing: Pairing,
    /// Permit finite-mean margins (for the finite-mean contrast runs).
    pub allow_finite_mean: bool,
}

impl ScenarioSpec {
    /// Independent copies of `margin`.
    pub fn iid(margin: Margin, eta: WeightVector, theta: WeightVector) -> Self {
        let n = eta.len();
        ScenarioSpec {
            margins: vec![margin; n],
            dependence: Dependence::Independent,
            transform: MarginTransform::Identity,
            trigger_coupling: TriggerCoupling::Independent,
            weights_low: eta,
            weights_high: theta,
            region: None,
            pairing: Pairing::Sorted,
            allow_finite_mean: false,
        }
    }

    pub fn dimension(&self) -> usize {
        self.margins.len()
    }

    pub fn with_transform(mut self, t: MarginTransform) -> Self {
        self.transform = t;
        self
    }

    pub fn with_dependence(mut self, d: Dependence) -> Self {
        self.dependence = d;
        self
    }

    pub fn with_coupling(mut self, c: TriggerCoupling) -> Self {
        self.trigger_coupling = c;
        self
    }

    pub fn with_region(mut self, lo: f64, hi: f64) -> Self {
        self.region = Some((lo, hi));
        self
    }

    /// `b = ||eta|| / min(eta)` for bounded-support scenarios.
    pub fn bound_ratio(&self) -> f64 {
        self.weights_low.total() / self.weights_low.smallest()
    }

    /// The region on which the verdict is taken, after defaults implied by
    /// the transform.
    pub fn effective_region(&self) -> Result<Option<(f64, f64)>> {
        let total = self.weights_low.total();
        let implied = match self.transform {
            MarginTransform::Cap(c) => {
                let b = self.bound_ratio();
                if !b.is_finite() {
                    return Err(Error::Spec(
                        "bounded-support comparison needs every weight of eta positive".into(),
                    ));
                }
                Some((total, c / b * total))
            }
            MarginTransform::TailBeyond(c) => Some((c * total, f64::INFINITY)),
            MarginTransform::Excess(_) => Some((0.0, f64::INFINITY)),
            _ => None,
        };
        match (self.region, implied) {
            (None, r) => Ok(r),
            (Some(r), None) => Ok(Some(r)),
            (Some((lo, hi)), Some((ilo, ihi))) => {
                if lo >= ilo && hi <= ihi && lo < hi {
                    Ok(Some((lo, hi)))
                } else if matches!(self.transform, MarginTransform::Cap(_)) {
                    Err(Error::Spec(format!(
                        "region ({lo}, {hi}) leaves ({ilo}, {ihi}) = (||eta||, (c/b)||eta||) with b = ||eta||/min(eta)"
                    )))
                } else {
                    Err(Error::Spec(format!("region ({lo}, {hi}) leaves the valid range ({ilo}, {ihi})")))
                }
            }
        }
    }

    /// Checks every structural condition, naming the one that fails.
    pub fn validate(&self) -> Result<()> {
        let n = self.dimension();
        if n == 0 {
            return Err(Error::Spec("at least one margin is required".into()));
        }
        for w in [&self.weights_low, &self.weights_high] {
            if w.len() != n {
                return Err(Error::Dimension { expected: n, got: w.len() });
            }
        }
        match majorizes(&self.weights_low, &self.weights_high)? {
            Majorization::Holds { .. } => {}
            Majorization::Fails { index } => {
                return Err(Error::Order(format!(
                    "theta is not majorized by eta: increasing partial sums fail at k={}",
                    index
                )))
            }
            Majorization::IncomparableTotals => {
                return Err(Error::Order(format!(
                    "weight totals differ: ||eta|| = {}, ||theta|| = {}",
                    self.weights_low.total(),
                    self.weights_high.total()
                )))
            }
        }
        for m in &self.margins {
            self.transform.check_margin(m)?;
        }
        if !self.allow_finite_mean {
            if let Some(k) = self.margins.iter().position(|m| !m.has_infinite_mean()) {
                return Err(Error::Spec(format!(
                    "margin {} has a finite mean; the dominance claim needs tail index at most 1",
                    k + 1
                )));
            }
        }
        if let Some(p) = self.transform.trigger_probability() {
            match self.trigger_coupling {
                TriggerCoupling::Disjoint if n as f64 * p > 1.0 + 1e-12 => {
                    return Err(Error::Spec(format!("disjoint events need n p <= 1 (n={n}, p={p})")))
                }
                TriggerCoupling::CommonUniform { rho } if !(0.0..=1.0).contains(&rho) => {
                    return Err(Error::Spec(format!("coupling weight rho={rho} outside [0, 1]")))
                }
                _ => {}
            }
            if self.weights_low.as_slice().iter().chain(self.weights_high.as_slice()).any(|&w| w == 0.0) {
                return Err(Error::Spec("triggered comparisons require strictly positive weights".into()));
            }
        }
        match self.dependence {
            Dependence::Independent => {}
            Dependence::CommonShock { alpha, beta, gamma } => {
                let expected = common_shock_margin(alpha, beta, gamma)?;
                if self.margins.iter().any(|m| *m != expected) {
                    return Err(Error::Spec(
                        "common-shock margins must equal the implied Feller-Pareto law".into(),
                    ));
                }
            }
            Dependence::Comonotone => self.check_quantiles()?,
            Dependence::Mixture { independent, comonotone, clayton } => {
                let w = [independent, comonotone, clayton];
                if w.iter().any(|&x| !(x >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return Err(Error::Spec("mixture weights must be non-negative and sum to 1".into()));
                }
                if comonotone > 0.0 {
                    self.check_quantiles()?;
                }
                if clayton > 0.0 {
                    self.clayton_alpha()?;
                }
            }
        }
        if let Some((lo, hi)) = self.region {
            if !(lo < hi) {
                return Err(Error::Spec(format!("empty region ({lo}, {hi})")));
            }
        }
        self.effective_region()?;
        Ok(())
    }

    fn check_quantiles(&self) -> Result<()> {
        for m in &self.margins {
            m.quantile(0.5)?;
        }
        Ok(())
    }

    fn clayton_alpha(&self) -> Result<f64> {
        match self.margins.first() {
            Some(Margin::Pareto(p)) if p.scale() == 1.0 && self.margins.iter().all(|m| m == &self.margins[0]) => {
                Ok(p.alpha())
            }
            _ => Err(Error::Spec("the Clayton component needs identical unit-scale Pareto margins".into())),
        }
    }

    /// Validates and assembles the paired sampler.
    pub fn build(&self) -> Result<PairedSampler> {
        self.validate()?;
        let n = self.dimension();
        // component order after pairing, and the weights aligned to it
        let order: Vec<usize> = match self.pairing {
            Pairing::AsGiven => (0..n).collect(),
            Pairing::Sorted => {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| {
                    let ta = self.margins[a].tail_index().unwrap_or(f64::INFINITY);
                    let tb = self.margins[b].tail_index().unwrap_or(f64::INFINITY);
                    ta.total_cmp(&tb)
                });
                idx
            }
        };
        let margins: Vec<Margin> = order.iter().map(|&i| self.margins[i].clone()).collect();
        let (eta, theta) = match self.pairing {
            Pairing::AsGiven => (self.weights_low.as_slice().to_vec(), self.weights_high.as_slice().to_vec()),
            Pairing::Sorted => (self.weights_low.increasing(), self.weights_high.increasing()),
        };
        let samplers = margins.iter().map(Margin::sampler).collect::<Result<Vec<_>>>()?;
        let shock = match self.dependence {
            Dependence::CommonShock { alpha, beta, gamma } => {
                Some(CommonShockSpec::new(n, alpha, beta)?.sampler(gamma)?)
            }
            Dependence::Mixture { clayton, .. } if clayton > 0.0 => {
                Some(CommonShockSpec::multivariate_pareto(n, self.clayton_alpha()?)?.sampler(1.0)?)
            }
            _ => None,
        };
        Ok(PairedSampler {
            margins,
            samplers,
            shock,
            dependence: self.dependence,
            transform: self.transform,
            coupling: self.trigger_coupling,
            eta,
            theta,
        })
    }
}

/// Margin implied by a common-shock construction.
pub fn common_shock_margin(alpha: f64, beta: f64, gamma: f64) -> Result<Margin> {
    if beta == 1.0 && gamma == 1.0 {
        Margin::pareto(alpha)
    } else {
        Ok(Margin::FellerPareto(crate::distributions::FellerParetoSpec::standard(alpha, beta, gamma)?))
    }
}

/// Uniform on the open interval `(0, 1)`.
fn open_open(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Draws component vectors and the two weighted portfolios from them.
#[derive(Clone, Debug)]
pub struct PairedSampler {
    margins: Vec<Margin>,
    samplers: Vec<MarginSampler>,
    shock: Option<CommonShockSampler>,
    dependence: Dependence,
    transform: MarginTransform,
    coupling: TriggerCoupling,
    eta: Vec<f64>,
    theta: Vec<f64>,
}

impl PairedSampler {
    pub fn dimension(&self) -> usize {
        self.margins.len()
    }

    /// Weights aligned with the component order used by the sampler.
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn margins(&self) -> &[Margin] {
        &self.margins
    }

    fn comonotone(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let u = open_open(rng);
        for (o, m) in out.iter_mut().zip(&self.margins) {
            *o = m.quantile(u).expect("quantiles checked at validation");
        }
    }

    fn independent(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        for (o, s) in out.iter_mut().zip(&self.samplers) {
            *o = s.draw(rng);
        }
    }

    /// One component vector, transformed and triggered.
    pub fn draw_components(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match self.dependence {
            Dependence::Independent => self.independent(rng, out),
            Dependence::Comonotone => self.comonotone(rng, out),
            Dependence::CommonShock { .. } => {
                self.shock.as_ref().expect("built with a shock").draw_row(rng, out)
            }
            Dependence::Mixture { independent, comonotone, .. } => {
                let v: f64 = rng.random();
                if v < independent {
                    self.independent(rng, out);
                } else if v < independent + comonotone {
                    self.comonotone(rng, out);
                } else {
                    self.shock.as_ref().expect("built with a shock").draw_row(rng, out);
                }
            }
        }
        for o in out.iter_mut() {
            *o = self.transform.apply(*o);
        }
        if let Some(p) = self.transform.trigger_probability() {
            self.apply_triggers(rng, p, out);
        }
    }

    fn apply_triggers(&self, rng: &mut ChaCha8Rng, p: f64, out: &mut [f64]) {
        match self.coupling {
            TriggerCoupling::Independent => {
                for o in out.iter_mut() {
                    if rng.random::<f64>() >= p {
                        *o = 0.0;
                    }
                }
            }
            TriggerCoupling::Same => {
                if rng.random::<f64>() >= p {
                    out.fill(0.0);
                }
            }
            TriggerCoupling::Disjoint => {
                let u: f64 = rng.random();
                let fired = (u / p) as usize;
                for (i, o) in out.iter_mut().enumerate() {
                    if i != fired {
                        *o = 0.0;
                    }
                }
            }
            TriggerCoupling::CommonUniform { rho } => {
                let shared: f64 = rng.random();
                for o in out.iter_mut() {
                    let w = if rng.random::<f64>() < rho { shared } else { rng.random() };
                    if w >= p {
                        *o = 0.0;
                    }
                }
            }
        }
    }

    fn check_rows(rows: usize) -> Result<()> {
        if rows == 0 {
            return Err(Error::Input("sample count must be at least 1".into()));
        }
        if rows > MAX_SAMPLES {
            return Err(Error::Config(format!("{rows} samples exceed the per-arm cap of {MAX_SAMPLES}")));
        }
        Ok(())
    }

    /// Row-major component draws.
    pub fn sample_components(&self, key: StreamKey, rows: usize) -> Result<Vec<f64>> {
        Self::check_rows(rows)?;
        Ok(fill_rows(rows, self.dimension(), key, |rng, row| self.draw_components(rng, row)))
    }

    /// `(eta . Y, theta . Y)` for `rows` common draws `Y`.
    pub fn sample_pairs(&self, key: StreamKey, rows: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        Self::check_rows(rows)?;
        let n = self.dimension();
        let parts = map_chunks(rows, key, |rng, len| {
            let mut y = vec![0.0; n];
            let mut low = Vec::with_capacity(len);
            let mut high = Vec::with_capacity(len);
            for _ in 0..len {
                self.draw_components(rng, &mut y);
                low.push(dot(&self.eta, &y));
                high.push(dot(&self.theta, &y));
            }
            (low, high)
        });
        let mut low = Vec::with_capacity(rows);
        let mut high = Vec::with_capacity(rows);
        for (l, h) in parts {
            low.extend(l);
            high.extend(h);
        }
        Ok((low, high))
    }
}

#[inline]
pub(crate) fn dot(w: &[f64], y: &[f64]) -> f64 {
    w.iter().zip(y).map(|(a, b)| a * b).sum()
}
