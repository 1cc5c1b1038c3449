//! Non-negative weight vectors under the majorization preorder.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Relative tolerance for equality of totals.
pub const TOTAL_RTOL: f64 = 1e-12;

/// Absolute tolerance used when replaying chains and comparing sorted vectors.
pub const COORD_TOL: f64 = 1e-10;

/// Non-negative exposure vector.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("weight vector is empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::Input(format!("weight {w} is not a finite non-negative number")));
        }
        Ok(WeightVector(weights))
    }

    /// `total / n` in every coordinate.
    pub fn uniform(n: usize, total: f64) -> Result<Self> {
        Self::new(vec![total / n as f64; n])
    }

    /// `(total, 0, ..., 0)`.
    pub fn concentrated(n: usize, total: f64) -> Result<Self> {
        let mut w = vec![0.0; n];
        if let Some(first) = w.first_mut() {
            *first = total;
        }
        Self::new(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Usable as portfolio exposure: at least one positive entry.
    pub fn is_portfolio(&self) -> bool {
        self.0.iter().any(|&w| w > 0.0)
    }

    /// Increasing rearrangement (stable, ties keep original order).
    pub fn increasing(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Indices that sort the vector ascending; ties broken by index.
    pub fn increasing_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.0.len()).collect();
        idx.sort_by(|&a, &b| self.0[a].total_cmp(&self.0[b]));
        idx
    }

    pub fn smallest(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(w, x)| w * x).sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for WeightVector {
    type Err = Error;

    /// Parses a comma-separated decimal list such as `0.5,0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let weights = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Input(format!("cannot parse weight '{}'", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        WeightVector::new(weights)
    }
}

/// Outcome of comparing two vectors in majorization order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Majorization {
    /// `theta` is majorized by `eta`; `strict` when the sorted vectors differ.
    Holds { strict: bool },
    /// Partial sums fail at `index` (number of smallest entries summed).
    Fails { index: usize },
    /// Totals differ beyond the relative tolerance.
    IncomparableTotals,
}

impl Majorization {
    pub fn holds(&self) -> bool {
        matches!(self, Majorization::Holds { .. })
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Majorization::Holds { strict: true })
    }
}

fn totals_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOTAL_RTOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Is `theta` majorized by `eta` (`theta` more balanced)?
pub fn majorizes(eta: &WeightVector, theta: &WeightVector) -> Result<Majorization> {
    if eta.len() != theta.len() {
        return Err(Error::Dimension { expected: eta.len(), got: theta.len() });
    }
    let (te, tt) = (eta.total(), theta.total());
    if !totals_match(te, tt) {
        return Ok(Majorization::IncomparableTotals);
    }
    let (e, t) = (eta.increasing(), theta.increasing());
    let slack = TOTAL_RTOL * te.abs().max(tt.abs());
    let (mut se, mut st) = (0.0, 0.0);
    for k in 0..e.len().saturating_sub(1) {
        se += e[k];
        st += t[k];
        if st < se - slack {
            return Ok(Majorization::Fails { index: k + 1 });
        }
    }
    let strict = e.iter().zip(&t).any(|(a, b)| (a - b).abs() > slack.max(COORD_TOL * 1e-2));
    Ok(Majorization::Holds { strict })
}

/// Two-coordinate averaging step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
}

impl TTransform {
    pub fn new(i: usize, j: usize, lambda: f64) -> Result<Self> {
        if i == j {
            return Err(Error::Input("T-transform needs two distinct indices".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Input(format!("lambda={lambda} outside [0, 1]")));
        }
        Ok(TTransform { i, j, lambda })
    }

    pub fn apply(&self, v: &mut [f64]) {
        let (a, b) = (v[self.i], v[self.j]);
        v[self.i] = self.lambda * a + (1.0 - self.lambda) * b;
        v[self.j] = (1.0 - self.lambda) * a + self.lambda * b;
    }

    pub fn applied(&self, w: &WeightVector) -> WeightVector {
        let mut v = w.0.clone();
        self.apply(&mut v);
        WeightVector(v)
    }
}

/// Builds at most `n - 1` T-transforms taking `eta` to a permutation of `theta`.
///
/// Works on `eta` sorted decreasingly against `theta` sorted decreasingly: the
/// last surplus coordinate gives mass to the first deficit coordinate after
/// it, until one of the two matches its target. The sorted order is preserved
/// at every step, so the positions translate back to `eta`'s own indices.
pub fn t_transform_chain(eta: &WeightVector, theta: &WeightVector) -> Result<Vec<TTransform>> {
    match majorizes(eta, theta)? {
        Majorization::Holds { .. } => {}
        Majorization::Fails { index } => {
            return Err(Error::Order(format!(
                "theta is not majorized by eta: partial sum of the {index} smallest entries fails"
            )))
        }
        Majorization::IncomparableTotals => {
            return Err(Error::Order(format!(
                "totals differ: {} vs {}",
                eta.total(),
                theta.total()
            )))
        }
    }
    let n = eta.len();
    let mut order = eta.increasing_order();
    order.reverse();
    let mut x: Vec<f64> = order.iter().map(|&i| eta.0[i]).collect();
    let mut y = theta.increasing();
    y.reverse();
    let tol = COORD_TOL * 1e-2 * eta.total().abs().max(1.0);

    let mut chain = Vec::new();
    while chain.len() < n {
        let Some(j) = (0..n).rev().find(|&j| x[j] - y[j] > tol) else {
            break;
        };
        let Some(k) = (j + 1..n).find(|&k| y[k] - x[k] > tol) else {
            break;
        };
        let delta = (x[j] - y[j]).min(y[k] - x[k]);
        let lambda = (1.0 - delta / (x[j] - x[k])).clamp(0.0, 1.0);
        let t = TTransform { i: j, j: k, lambda };
        t.apply(&mut x);
        // snap the coordinate that reached its target
        if (x[j] - y[j]).abs() <= tol {
            x[j] = y[j];
        }
        if (x[k] - y[k]).abs() <= tol {
            x[k] = y[k];
        }
        chain.push(TTransform { i: order[j], j: order[k], lambda });
    }
    Ok(chain)
}

/// Vectors visited by `chain` starting from `start`, including both ends.
pub fn chain_points(start: &WeightVector, chain: &[TTransform]) -> Vec<WeightVector> {
    let mut points = vec![start.clone()];
    let mut cur = start.clone();
    for t in chain {
        cur = t.applied(&cur);
        points.push(cur.clone());
    }
    points
}

/// Random `(eta, theta)` on the unit simplex with `theta` strictly majorized by `eta`.
pub fn random_majorizing_pair<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(WeightVector, WeightVector)> {
    if n < 2 {
        return Err(Error::Input("majorizing pairs need dimension at least 2".into()));
    }
    loop {
        let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let s: f64 = raw.iter().sum();
        let mut eta: Vec<f64> = raw.iter().map(|v| v / s).collect();
        let total: f64 = eta.iter().sum();
        // push rounding into the largest coordinate so the total is exactly 1
        let imax = (0..n).max_by(|&a, &b| eta[a].total_cmp(&eta[b])).unwrap_or(0);
        eta[imax] += 1.0 - total;

        let mut theta = eta.clone();
        let steps = rng.random_range(1..n);
        for _ in 0..steps {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let lambda = rng.random_range(0.1..0.9);
            TTransform { i, j, lambda }.apply(&mut theta);
        }
        let (eta, theta) = (WeightVector(eta), WeightVector(theta));
        // reject the rare draw whose spread is too small to be strict
        if majorizes(&eta, &theta)?.is_strict() {
            return Ok((eta, theta));
        }
    }
}
