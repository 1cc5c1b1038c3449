//! Finite-sample first- and second-order dominance checks.

use std::fmt;

use crate::error::{Error, Result};

use super::empirical::{dkw_epsilon, EmpiricalDistribution};

/// Relative offset at which curves are read. Weighted sums that are equal in
/// exact arithmetic (shared atoms such as `c ||w||`) can differ in the last
/// bits between arms; reading just above `x` keeps such atoms on the same
/// side for both.
pub const TIE_RTOL: f64 = 1e-12;

#[inline]
pub fn read_at(x: f64) -> f64 {
    x + TIE_RTOL * x.abs()
}

/// How evaluation points are chosen.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    /// Lower pooled percentile, as a probability.
    pub lower: f64,
    /// Upper pooled percentile, as a probability.
    pub upper: f64,
    /// Open interval to which the grid is restricted.
    pub region: Option<(f64, f64)>,
    /// Fixed points; overrides the percentile construction.
    pub explicit: Option<Vec<f64>>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { points: 512, lower: 0.01, upper: 0.9999, region: None, explicit: None }
    }
}

fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 || hi <= lo {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == points {
                hi
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

impl GridSpec {
    pub fn with_points(points: usize) -> Self {
        GridSpec { points, ..Self::default() }
    }

    pub fn restricted(mut self, lo: f64, hi: f64) -> Self {
        self.region = Some((lo, hi));
        self
    }

    pub fn explicit(points: Vec<f64>) -> Self {
        GridSpec { explicit: Some(points), ..Self::default() }
    }

    fn inside(&self, x: f64) -> bool {
        self.region.is_none_or(|(lo, hi)| x > lo && x < hi)
    }

    /// Builds the ascending grid for a pair of samples.
    ///
    /// The percentile range covers both samples (lowest lower percentile to
    /// highest upper percentile). A non-positive lower end is kept as a
    /// point and the log spacing starts at the smallest positive value.
    pub fn build(&self, a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> Result<Vec<f64>> {
        if let Some(pts) = &self.explicit {
            let mut g: Vec<f64> = pts.iter().copied().filter(|&x| x.is_finite() && self.inside(x)).collect();
            g.sort_by(f64::total_cmp);
            g.dedup();
            return Ok(g);
        }
        if self.points == 0 || !(0.0 < self.lower && self.lower < self.upper && self.upper < 1.0) {
            return Err(Error::Config(format!(
                "grid needs points >= 1 and 0 < lower < upper < 1 (got {}, {}, {})",
                self.points, self.lower, self.upper
            )));
        }
        let mut lo = a.quantile(self.lower)?.min(b.quantile(self.lower)?);
        let mut hi = a.quantile(self.upper)?.max(b.quantile(self.upper)?);
        if let Some((rlo, rhi)) = self.region {
            lo = lo.max(rlo);
            hi = hi.min(rhi);
        }
        let mut grid = Vec::with_capacity(self.points + 1);
        if lo <= 0.0 {
            grid.push(lo);
            let smallest_positive = [a, b]
                .iter()
                .filter_map(|s| s.sorted_values().iter().copied().find(|&v| v > 0.0))
                .fold(f64::INFINITY, f64::min);
            lo = smallest_positive.max(f64::MIN_POSITIVE);
        }
        if lo <= hi && hi > 0.0 {
            grid.extend(log_space(lo, hi, self.points));
        }
        grid.retain(|&x| self.inside(x));
        grid.dedup();
        Ok(grid)
    }
}

/// Which comparison produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

/// Outcome of a dominance comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Consistent,
    Violated,
    /// Nothing was evaluated (empty grid).
    Inconclusive,
}

impl Relation {
    pub fn label(self, order: Order) -> &'static str {
        match (order, self) {
            (Order::First, Relation::Consistent) => "fsd-consistent",
            (Order::First, Relation::Violated) => "fsd-violated",
            (Order::Second, Relation::Consistent) => "ssd-consistent",
            (Order::Second, Relation::Violated) => "ssd-violated",
            (_, Relation::Inconclusive) => "inconclusive",
        }
    }
}

/// Per-point comparison of a low (less diversified) and a high arm.
#[derive(Clone, Debug, PartialEq)]
pub struct DominanceVerdict {
    pub order: Order,
    pub relation: Relation,
    pub grid: Vec<f64>,
    /// FSD: `survival(high) - survival(low)`;
    /// SSD: `integrated_cdf(low) - integrated_cdf(high)`.
    pub margins: Vec<f64>,
    /// Allowed shortfall at each point.
    pub band: Vec<f64>,
    /// `eps_low + eps_high`.
    pub epsilon: f64,
    pub confidence: f64,
    /// Smallest margin observed; positive values suggest strict dominance
    /// but cannot certify it.
    pub strictness: f64,
    pub n_low: usize,
    pub n_high: usize,
}

impl DominanceVerdict {
    pub fn label(&self) -> &'static str {
        self.relation.label(self.order)
    }

    pub fn is_consistent(&self) -> bool {
        self.relation == Relation::Consistent
    }

    /// Index of the worst point relative to its band.
    pub fn worst_index(&self) -> Option<usize> {
        (0..self.grid.len()).min_by(|&i, &j| {
            (self.margins[i] + self.band[i]).total_cmp(&(self.margins[j] + self.band[j]))
        })
    }

    /// Smallest `margin + band`; negative iff violated.
    pub fn min_slack(&self) -> f64 {
        self.worst_index().map_or(0.0, |i| self.margins[i] + self.band[i])
    }

    fn finish(order: Order, grid: Vec<f64>, margins: Vec<f64>, band: Vec<f64>, epsilon: f64, confidence: f64, n: (usize, usize)) -> Self {
        let relation = if grid.is_empty() {
            Relation::Inconclusive
        } else if margins.iter().zip(&band).all(|(m, b)| *m >= -b) {
            Relation::Consistent
        } else {
            Relation::Violated
        };
        let strictness = margins.iter().copied().fold(f64::INFINITY, f64::min);
        DominanceVerdict {
            order,
            relation,
            grid,
            margins,
            band,
            epsilon,
            confidence,
            strictness: if strictness.is_finite() { strictness } else { 0.0 },
            n_low: n.0,
            n_high: n.1,
        }
    }
}

impl fmt::Display for DominanceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (grid {} points, eps {:.3e}, min slack {:.3e}, strictness {:.3e})",
            self.label(),
            self.grid.len(),
            self.epsilon,
            self.min_slack(),
            self.strictness
        )
    }
}

fn check_confidence(confidence: f64) -> Result<()> {
    if confidence > 0.0 && confidence < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("confidence {confidence} outside (0, 1)")))
    }
}

/// Tests whether `high` first-order dominates `low`: consistent iff
/// `survival(high, x) >= survival(low, x) - (eps_low + eps_high)` at every
/// grid point.
pub fn empirical_fsd_test(
    low: &EmpiricalDistribution,
    high: &EmpiricalDistribution,
    grid: &GridSpec,
    confidence: f64,
) -> Result<DominanceVerdict> {
    check_confidence(confidence)?;
    let points = grid.build(low, high)?;
    let epsilon = dkw_epsilon(low.len(), confidence) + dkw_epsilon(high.len(), confidence);
    let margins = points.iter().map(|&x| high.survival(read_at(x)) - low.survival(read_at(x))).collect();
    let band = vec![epsilon; points.len()];
    Ok(DominanceVerdict::finish(Order::First, points, margins, band, epsilon, confidence, (low.len(), high.len())))
}

/// Tests whether `high` second-order dominates `low`: consistent iff
/// `int F_low >= int F_high - eps (x - m)` on the grid, where `m` is the
/// pooled sample minimum and the integrals run from minus infinity.
pub fn empirical_ssd_test(
    low: &EmpiricalDistribution,
    high: &EmpiricalDistribution,
    grid: &GridSpec,
    confidence: f64,
) -> Result<DominanceVerdict> {
    check_confidence(confidence)?;
    let points = grid.build(low, high)?;
    let epsilon = dkw_epsilon(low.len(), confidence) + dkw_epsilon(high.len(), confidence);
    let start = low.min().min(high.min());
    let il = low.integrated_cdf(&points);
    let ih = high.integrated_cdf(&points);
    let margins = il.iter().zip(&ih).map(|(l, h)| l - h).collect();
    let band = points.iter().map(|&x| epsilon * (x - start).max(0.0)).collect();
    Ok(DominanceVerdict::finish(Order::Second, points, margins, band, epsilon, confidence, (low.len(), high.len())))
}

/// A sign change of `F_a - F_b`, significant on both sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    /// Last significant point before the change.
    pub from: f64,
    /// First significant point after it.
    pub to: f64,
    /// Sign of `F_a - F_b` at `from`.
    pub sign_before: i8,
}

/// Intervals where `F_a - F_b` changes sign by more than the DKW band on
/// both sides.
pub fn crossing_detect(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    grid: &GridSpec,
    confidence: f64,
) -> Result<Vec<Crossing>> {
    check_confidence(confidence)?;
    let points = grid.build(a, b)?;
    let band = dkw_epsilon(a.len(), confidence) + dkw_epsilon(b.len(), confidence);
    let mut out = Vec::new();
    let mut last: Option<(f64, i8)> = None;
    for &x in &points {
        let d = a.cdf(read_at(x)) - b.cdf(read_at(x));
        let sign = if d > band {
            1
        } else if d < -band {
            -1
        } else {
            continue;
        };
        if let Some((from, s)) = last {
            if s != sign {
                out.push(Crossing { from, to: x, sign_before: s });
            }
        }
        last = Some((x, sign));
    }
    Ok(out)
}
