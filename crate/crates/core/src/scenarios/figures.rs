//! Plot data: equal-weight quantile curves and mixed-tail CDF curves.

use std::path::Path;

use crate::distributions::{Margin, ParetoSpec};
use crate::error::{Error, Result};
use crate::majorization::WeightVector;
use crate::montecarlo::engine::{map_chunks, StreamKey};
use crate::montecarlo::{
    empirical_fsd_test, paired_bootstrap_gaps, read_at, DominanceVerdict, EmpiricalDistribution, GapBand, GridSpec,
};

use super::model::{Pairing, ScenarioSpec};

/// Default probability levels for the quantile curves.
pub fn figure2_p_grid() -> Vec<f64> {
    (0..=12).map(|i| 0.90 + 0.005 * f64::from(i)).collect()
}

/// Levels at which the ordering in `n` is checked.
pub const FIGURE2_CHECK_P: [f64; 4] = [0.90, 0.92, 0.94, 0.96];

/// Quantiles of `(X_1 + ... + X_n) / n` for `n = 2..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct Figure2 {
    pub alpha: f64,
    pub ns: Vec<usize>,
    pub p_grid: Vec<f64>,
    /// `quantiles[j][k]`: `n = ns[j]`, `p = p_grid[k]`.
    pub quantiles: Vec<Vec<f64>>,
    pub samples: usize,
}

impl Figure2 {
    /// Strictly increasing in `n` at every `p`.
    pub fn monotone_in_n(&self) -> bool {
        self.quantiles.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b > a))
    }
}

/// Row-aligned columns `(X_1 + ... + X_n) / n`, `n = 2..=n_max`, all built
/// from the same iid Pareto draws.
pub fn figure2_columns(alpha: f64, n_max: usize, key: StreamKey, rows: usize) -> Result<Vec<Vec<f64>>> {
    if n_max < 2 {
        return Err(Error::Input("n_max must be at least 2".into()));
    }
    if rows == 0 {
        return Err(Error::Input("sample count must be at least 1".into()));
    }
    let spec = ParetoSpec::standard(alpha)?;
    let cols = n_max - 1;
    let parts = map_chunks(rows, key, |rng, len| {
        let mut out = vec![Vec::with_capacity(len); cols];
        for _ in 0..len {
            let mut sum = spec.draw(rng);
            for (j, col) in out.iter_mut().enumerate() {
                sum += spec.draw(rng);
                col.push(sum / (j + 2) as f64);
            }
        }
        out
    });
    let mut columns = vec![Vec::with_capacity(rows); cols];
    for part in parts {
        for (c, p) in columns.iter_mut().zip(part) {
            c.extend(p);
        }
    }
    Ok(columns)
}

/// Quantile curves from precomputed columns.
pub fn figure2_from_columns(alpha: f64, columns: &[Vec<f64>], p_grid: &[f64]) -> Result<Figure2> {
    let mut quantiles = Vec::with_capacity(columns.len());
    for c in columns {
        let e = EmpiricalDistribution::new(c.clone())?;
        quantiles.push(crate::montecarlo::quantile_curve(&e, p_grid)?);
    }
    Ok(Figure2 {
        alpha,
        ns: (2..columns.len() + 2).collect(),
        p_grid: p_grid.to_vec(),
        quantiles,
        samples: columns.first().map_or(0, Vec::len),
    })
}

pub fn figure2(alpha: f64, n_max: usize, p_grid: &[f64], key: StreamKey, rows: usize) -> Result<Figure2> {
    let columns = figure2_columns(alpha, n_max, key, rows)?;
    figure2_from_columns(alpha, &columns, p_grid)
}

/// Rows used by the bootstrap; larger samples are cut to their leading rows,
/// which widens (never narrows) the band.
pub const FIGURE2_BOOTSTRAP_ROWS: usize = 200_000;

/// Paired bootstrap band of the adjacent-`n` quantile gaps.
pub fn figure2_band(columns: &[Vec<f64>], check_p: &[f64], resamples: usize, key: StreamKey) -> Result<GapBand> {
    let rows = columns.first().map_or(0, Vec::len).min(FIGURE2_BOOTSTRAP_ROWS);
    let cut: Vec<Vec<f64>> = columns.iter().map(|c| c[..rows].to_vec()).collect();
    let mut band = paired_bootstrap_gaps(&cut, check_p, resamples, 2.576, key)?;
    // report gaps of the full sample against the subsample band
    let full: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| {
            let e = EmpiricalDistribution::new(c.clone())?;
            crate::montecarlo::quantile_curve(&e, check_p)
        })
        .collect::<Result<_>>()?;
    band.gaps = full.windows(2).map(|w| w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect()).collect();
    Ok(band)
}

/// Writes `p, n, quantile` rows.
pub fn write_figure2_csv(path: &Path, fig: &Figure2) -> Result<()> {
    write_figure2_to(std::fs::File::create(path)?, fig)
}

pub fn write_figure2_to<W: std::io::Write>(sink: W, fig: &Figure2) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["p", "n", "quantile"])?;
    for (j, n) in fig.ns.iter().enumerate() {
        for (k, p) in fig.p_grid.iter().enumerate() {
            w.write_record([format!("{p:.4}"), n.to_string(), format!("{:e}", fig.quantiles[j][k])])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Default tail indices and weight pairs for the mixed-tail comparison.
pub const FIGURE1_ALPHAS: (f64, f64) = (0.15, 0.75);
pub const FIGURE1_PAIRS: [([f64; 2], [f64; 2]); 2] = [([6.0, 2.0], [5.0, 3.0]), ([9.0, 1.0], [6.0, 4.0])];

/// Scenario with the larger weight on the heavier tail (anti-sorted).
pub fn figure1_scenario(alphas: (f64, f64), eta: [f64; 2], theta: [f64; 2]) -> Result<ScenarioSpec> {
    let mut s = ScenarioSpec::iid(Margin::pareto(alphas.0)?, WeightVector::new(eta.to_vec())?, WeightVector::new(theta.to_vec())?);
    s.margins = vec![Margin::pareto(alphas.0)?, Margin::pareto(alphas.1)?];
    s.pairing = Pairing::AsGiven;
    Ok(s)
}

/// Empirical CDFs of one weight pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Figure1Curve {
    pub eta: [f64; 2],
    pub theta: [f64; 2],
    pub grid: Vec<f64>,
    pub cdf_low: Vec<f64>,
    pub cdf_high: Vec<f64>,
    pub verdict: DominanceVerdict,
}

pub fn figure1(
    alphas: (f64, f64),
    pairs: &[([f64; 2], [f64; 2])],
    key: StreamKey,
    rows: usize,
    grid: &GridSpec,
    confidence: f64,
) -> Result<Vec<Figure1Curve>> {
    pairs
        .iter()
        .map(|&(eta, theta)| {
            let spec = figure1_scenario(alphas, eta, theta)?;
            let label = format!("{}-{}/{}-{}", eta[0], eta[1], theta[0], theta[1]);
            let (l, h) = spec.build()?.sample_pairs(key.with_domain(&label), rows)?;
            let (l, h) = (EmpiricalDistribution::new(l)?, EmpiricalDistribution::new(h)?);
            let verdict = empirical_fsd_test(&l, &h, grid, confidence)?;
            Ok(Figure1Curve {
                eta,
                theta,
                cdf_low: verdict.grid.iter().map(|&x| l.cdf(read_at(x))).collect(),
                cdf_high: verdict.grid.iter().map(|&x| h.cdf(read_at(x))).collect(),
                grid: verdict.grid.clone(),
                verdict,
            })
        })
        .collect()
}

/// Writes `pair, x, cdf_low, cdf_high` rows.
pub fn write_figure1_csv(path: &Path, curves: &[Figure1Curve]) -> Result<()> {
    write_figure1_to(std::fs::File::create(path)?, curves)
}

pub fn write_figure1_to<W: std::io::Write>(sink: W, curves: &[Figure1Curve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["pair", "x", "cdf_low", "cdf_high"])?;
    for c in curves {
        let pair = format!("({},{})/({},{})", c.eta[0], c.eta[1], c.theta[0], c.theta[1]);
        for i in 0..c.grid.len() {
            w.write_record([
                pair.clone(),
                format!("{:e}", c.grid[i]),
                format!("{:e}", c.cdf_low[i]),
                format!("{:e}", c.cdf_high[i]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
