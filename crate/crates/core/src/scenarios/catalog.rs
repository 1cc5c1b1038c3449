//! Named, reproducible comparisons with an expected outcome each.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::distributions::{FellerParetoSpec, GpdSpec, Margin, MarginTransform, ParetoSpec, ParetoSumSpec};
use crate::error::{Error, Result};
use crate::majorization::WeightVector;
use crate::montecarlo::engine::StreamKey;
use crate::montecarlo::{
    crossing_detect, dkw_epsilon, empirical_fsd_test, empirical_ssd_test, write_verdict_csv, Crossing,
    read_at, DominanceVerdict, EmpiricalDistribution, GridSpec, Order, ResultDocument,
};

use super::figures::{
    figure1, figure2_band, figure2_columns, figure2_from_columns, figure2_p_grid, write_figure1_csv,
    write_figure2_csv, FIGURE1_ALPHAS, FIGURE1_PAIRS, FIGURE2_CHECK_P,
};
use super::model::{Dependence, Pairing, ScenarioSpec, TriggerCoupling};

/// What an entry is expected to show.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    FsdConsistent,
    SsdConsistent,
    CrossingDetected,
    /// At least one pair shows an FSD violation (reported, not a theorem).
    ViolationObserved,
    /// Quantile curves increase in `n` beyond bootstrap noise.
    MonotoneInN,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::FsdConsistent => "fsd-consistent",
            Expectation::SsdConsistent => "ssd-consistent",
            Expectation::CrossingDetected => "crossing",
            Expectation::ViolationObserved => "violation-observed",
            Expectation::MonotoneInN => "monotone-in-n",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum EntryKind {
    Comparisons(Vec<(String, ScenarioSpec)>),
    Figure1,
    Figure2 { alpha: f64, n_max: usize, resamples: usize },
    Gpd { gpd: GpdSpec, eta: WeightVector, theta: WeightVector },
}

/// One catalog item.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub expectation: Expectation,
    kind: EntryKind,
}

impl CatalogEntry {
    /// The comparison scenarios, when the entry is made of plain comparisons.
    pub fn scenarios(&self) -> Vec<(String, ScenarioSpec)> {
        match &self.kind {
            EntryKind::Comparisons(v) => v.clone(),
            _ => Vec::new(),
        }
    }
}

/// Execution settings shared by all entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub samples: usize,
    pub seed: u64,
    pub confidence: f64,
    pub grid_points: usize,
    pub output_dir: Option<PathBuf>,
    /// Also evaluate region-restricted entries on the full line (reported
    /// only).
    pub full_line_diagnostic: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            samples: 1_000_000,
            seed: 0,
            confidence: 0.99,
            grid_points: 512,
            output_dir: None,
            full_line_diagnostic: false,
        }
    }
}

/// Result of one comparison inside an entry.
#[derive(Clone, Debug, PartialEq)]
pub struct SubRun {
    pub id: String,
    pub verdict: DominanceVerdict,
    pub crossings: Vec<Crossing>,
    pub diagnostic: Option<DominanceVerdict>,
}

/// Result of running an entry.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogOutcome {
    pub id: String,
    pub expected: Expectation,
    pub observed: String,
    pub met: bool,
    /// Smallest slack over the sub-runs (for figure 2: smallest gap minus band).
    pub min_margin: f64,
    pub seed: u64,
    pub runs: Vec<SubRun>,
    pub files: Vec<PathBuf>,
}

fn wv(v: &[f64]) -> WeightVector {
    WeightVector::new(v.to_vec()).expect("catalog weights are valid")
}

/// `eta` proportional to `(n, ..., 1)`, `theta` its average with uniform.
pub fn standard_pair(n: usize) -> (WeightVector, WeightVector) {
    let total = (n * (n + 1) / 2) as f64;
    let eta: Vec<f64> = (0..n).map(|i| (n - i) as f64 / total).collect();
    let theta: Vec<f64> = eta.iter().map(|e| 0.5 * (e + 1.0 / n as f64)).collect();
    (wv(&eta), wv(&theta))
}

fn pareto(alpha: f64) -> Margin {
    Margin::pareto(alpha).expect("catalog tail indices are valid")
}

fn iid(alpha: f64, n: usize) -> ScenarioSpec {
    let (eta, theta) = standard_pair(n);
    ScenarioSpec::iid(pareto(alpha), eta, theta)
}

fn sorted_nonid() -> ScenarioSpec {
    let mut s = ScenarioSpec::iid(pareto(0.3), wv(&[0.6, 0.3, 0.1]), wv(&[0.4, 0.35, 0.25]));
    s.margins = vec![pareto(0.3), pareto(0.6), pareto(0.9)];
    s
}

fn single(id: &str, s: ScenarioSpec) -> EntryKind {
    EntryKind::Comparisons(vec![(id.to_string(), s)])
}

/// Every catalog entry, in presentation order.
pub fn catalog() -> Vec<CatalogEntry> {
    use Expectation::*;
    let mut out = Vec::new();
    let mut push = |id, description, expectation, kind| out.push(CatalogEntry { id, description, expectation, kind });

    let mut t1 = Vec::new();
    for alpha in [0.3, 0.5, 1.0] {
        for n in [2, 3, 5] {
            t1.push((format!("a{alpha}-n{n}"), iid(alpha, n)));
        }
    }
    push("T1-iid", "iid Pareto, eta vs a more balanced theta", FsdConsistent, EntryKind::Comparisons(t1));
    push("T1-sorted", "independent non-identical Pareto with sorted pairing", FsdConsistent, single("sorted", sorted_nonid()));

    push("FIG1-reversed", "mixed tails with the larger weight on the heavier tail", ViolationObserved, EntryKind::Figure1);

    let couplings = [
        TriggerCoupling::Same,
        TriggerCoupling::Disjoint,
        TriggerCoupling::Independent,
        TriggerCoupling::CommonUniform { rho: 0.5 },
    ];
    let t2 = couplings
        .iter()
        .map(|&c| (c.label(), iid(0.5, 3).with_transform(MarginTransform::Trigger(0.1)).with_coupling(c)))
        .collect();
    push("T2-trigger", "Pareto losses switched on by events of equal probability", FsdConsistent, EntryKind::Comparisons(t2));

    push("P4-tail", "Pareto tail beyond c = 3, checked above c ||theta||", FsdConsistent, single("tail", iid(0.5, 3).with_transform(MarginTransform::TailBeyond(3.0))));
    push("C2-floor", "max(X, c) with c = 2", FsdConsistent, single("floor", iid(0.5, 3).with_transform(MarginTransform::FloorMax(2.0))));
    push("C2-excess", "(X - c)+ with c = 2", FsdConsistent, single("excess", iid(0.5, 3).with_transform(MarginTransform::Excess(2.0))));
    push("P5-excess-nonid", "(X_i - c)+ with non-identical tails, sorted pairing", FsdConsistent, single("excess-nonid", sorted_nonid().with_transform(MarginTransform::Excess(2.0))));
    push(
        "P6-bounded",
        "Pareto capped at c = 10, eta = (2, 1), on (||eta||, c ||eta|| / b)",
        FsdConsistent,
        single("capped", ScenarioSpec::iid(pareto(0.5), wv(&[2.0, 1.0]), wv(&[1.5, 1.5])).with_transform(MarginTransform::Cap(10.0))),
    );
    push(
        "T3-clayton",
        "common-shock Pareto MP(0.5, 3)",
        FsdConsistent,
        single("mp", iid(0.5, 3).with_dependence(Dependence::CommonShock { alpha: 0.5, beta: 1.0, gamma: 1.0 })),
    );
    let mfp = {
        let mut s = iid(0.5, 3).with_dependence(Dependence::CommonShock { alpha: 0.8, beta: 1.5, gamma: 1.2 });
        let fp = FellerParetoSpec::standard(0.8, 1.5, 1.2).expect("valid");
        s.margins = vec![Margin::FellerPareto(fp); 3];
        s
    };
    push("TA1-mfp", "common-shock Feller-Pareto FP(0.8, 1.5, 1.2)", FsdConsistent, single("mfp", mfp));
    push(
        "MIX",
        "equal mixture of independence, comonotonicity and the Clayton vector",
        FsdConsistent,
        single("mix", iid(0.5, 3).with_dependence(Dependence::Mixture { independent: 1.0 / 3.0, comonotone: 1.0 / 3.0, clayton: 1.0 / 3.0 })),
    );
    let finite = || {
        let mut s = ScenarioSpec::iid(pareto(2.0), wv(&[1.0, 0.0]), wv(&[0.5, 0.5]));
        s.allow_finite_mean = true;
        s
    };
    push("P1-finite", "finite mean (alpha = 2): the CDFs must cross", CrossingDetected, single("finite", finite()));
    push("P2-ssd", "finite mean (alpha = 2): second-order ordering", SsdConsistent, single("ssd", finite()));
    let psum = {
        let terms = [(0.5, 0.4), (0.3, 0.7), (0.2, 1.0)]
            .iter()
            .map(|&(l, a)| (l, ParetoSpec::standard(a).expect("valid")))
            .collect();
        let mut s = iid(0.5, 3);
        s.margins = vec![Margin::ParetoSum(ParetoSumSpec::new(terms).expect("valid")); 3];
        s
    };
    push("R2-paretosum", "iid sums 0.5 Y1 + 0.3 Y2 + 0.2 Y3 of Pareto(0.4, 0.7, 1.0)", FsdConsistent, single("paretosum", psum));
    push("FIG2", "equal-weight quantile curves, alpha = 0.5, n = 2..6", MonotoneInN, EntryKind::Figure2 { alpha: 0.5, n_max: 6, resamples: 200 });
    let (eta, theta) = standard_pair(3);
    push(
        "GPD",
        "generalized Pareto xi = 1.5, beta = 1, and its Pareto image",
        FsdConsistent,
        EntryKind::Gpd { gpd: GpdSpec::new(1.5, 1.0).expect("valid"), eta, theta },
    );
    out
}

pub fn catalog_ids() -> Vec<&'static str> {
    catalog().iter().map(|e| e.id).collect()
}

pub fn entry(id: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.id == id)
}

fn file_stem(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

fn base_document(entry: &CatalogEntry, opts: &RunOptions) -> ResultDocument {
    let mut d = ResultDocument::new(entry.id);
    d.push("description", entry.description)
        .push("expected", entry.expectation)
        .push("seed", opts.seed)
        .push("config.samples", opts.samples)
        .push("config.confidence", opts.confidence)
        .push("config.grid_points", opts.grid_points)
        .push("config.full_line_diagnostic", opts.full_line_diagnostic);
    d
}

struct Arms {
    low: EmpiricalDistribution,
    high: EmpiricalDistribution,
}

fn draw_arms(spec: &ScenarioSpec, key: StreamKey, rows: usize) -> Result<Arms> {
    let (l, h) = spec.build()?.sample_pairs(key, rows)?;
    Ok(Arms { low: EmpiricalDistribution::new(l)?, high: EmpiricalDistribution::new(h)? })
}

fn curves(v: &DominanceVerdict, arms: &Arms) -> (Vec<f64>, Vec<f64>) {
    match v.order {
        Order::First => (
            v.grid.iter().map(|&x| arms.low.survival(read_at(x))).collect(),
            v.grid.iter().map(|&x| arms.high.survival(read_at(x))).collect(),
        ),
        Order::Second => (arms.low.integrated_cdf(&v.grid), arms.high.integrated_cdf(&v.grid)),
    }
}

/// Runs one entry: builds each scenario, applies the test its expectation
/// calls for on the declared region, and writes the documents when an
/// output directory is set.
pub fn run_catalog(entry: &CatalogEntry, opts: &RunOptions) -> Result<CatalogOutcome> {
    if opts.samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    let key = StreamKey::new(opts.seed).with_domain(entry.id);
    let mut doc = base_document(entry, opts);
    let mut files = Vec::new();
    let out_dir = opts.output_dir.as_deref();
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let base_grid = GridSpec::with_points(opts.grid_points);

    let (runs, met, observed, min_margin) = match &entry.kind {
        EntryKind::Comparisons(list) => {
            let mut runs = Vec::new();
            for (sub, spec) in list {
                let arms = draw_arms(spec, key.with_domain(sub), opts.samples)?;
                let region = spec.effective_region()?;
                let grid = match region {
                    Some((lo, hi)) => base_grid.clone().restricted(lo, hi),
                    None => base_grid.clone(),
                };
                let verdict = match entry.expectation {
                    Expectation::SsdConsistent => empirical_ssd_test(&arms.low, &arms.high, &grid, opts.confidence)?,
                    _ => empirical_fsd_test(&arms.low, &arms.high, &grid, opts.confidence)?,
                };
                let crossings = if entry.expectation == Expectation::CrossingDetected {
                    crossing_detect(&arms.low, &arms.high, &grid, opts.confidence)?
                } else {
                    Vec::new()
                };
                let diagnostic = if opts.full_line_diagnostic && region.is_some() {
                    Some(empirical_fsd_test(&arms.low, &arms.high, &base_grid, opts.confidence)?)
                } else {
                    None
                };
                doc.push(&format!("{sub}.scenario"), format!("{spec:?}"));
                doc.push(&format!("{sub}.region"), format!("{region:?}"));
                doc.push_verdict(sub, &verdict);
                doc.push(&format!("{sub}.crossings"), crossings.len());
                for (i, c) in crossings.iter().enumerate() {
                    doc.push(&format!("{sub}.crossing.{i}"), format!("({:e}, {:e}) sign_before={}", c.from, c.to, c.sign_before));
                }
                if let Some(d) = &diagnostic {
                    doc.push_verdict(&format!("{sub}.full_line"), d);
                }
                if let Some(dir) = out_dir {
                    let path = dir.join(format!("{}__{}.csv", file_stem(entry.id), file_stem(sub)));
                    let (lc, hc) = curves(&verdict, &arms);
                    write_verdict_csv(&path, &verdict, &lc, &hc)?;
                    files.push(path);
                }
                runs.push(SubRun { id: sub.clone(), verdict, crossings, diagnostic });
            }
            let min_margin = runs.iter().map(|r| r.verdict.min_slack()).fold(f64::INFINITY, f64::min);
            let (met, observed) = match entry.expectation {
                Expectation::CrossingDetected => {
                    let k = runs.iter().filter(|r| !r.crossings.is_empty()).count();
                    (k == runs.len(), if k == runs.len() { "crossing".to_string() } else { "no-crossing".to_string() })
                }
                _ => {
                    let bad: Vec<&str> = runs.iter().filter(|r| !r.verdict.is_consistent()).map(|r| r.id.as_str()).collect();
                    let label = runs[0].verdict.label();
                    if bad.is_empty() {
                        (true, label.to_string())
                    } else {
                        (false, format!("{} in {}", runs.iter().find(|r| !r.verdict.is_consistent()).map_or(label, |r| r.verdict.label()), bad.join(",")))
                    }
                }
            };
            (runs, met, observed, min_margin)
        }
        EntryKind::Figure1 => {
            let curves = figure1(FIGURE1_ALPHAS, &FIGURE1_PAIRS, key, opts.samples, &base_grid, opts.confidence)?;
            let mut runs = Vec::new();
            for c in &curves {
                let sub = format!("{}-{}_vs_{}-{}", c.eta[0], c.eta[1], c.theta[0], c.theta[1]);
                doc.push_verdict(&sub, &c.verdict);
                runs.push(SubRun { id: sub, verdict: c.verdict.clone(), crossings: Vec::new(), diagnostic: None });
            }
            if let Some(dir) = out_dir {
                let path = dir.join("FIG1-reversed.csv");
                write_figure1_csv(&path, &curves)?;
                files.push(path);
            }
            let violated = runs.iter().filter(|r| !r.verdict.is_consistent()).count();
            let min_margin = runs.iter().map(|r| r.verdict.min_slack()).fold(f64::INFINITY, f64::min);
            let observed = format!("violation in {violated} of {} pairs", runs.len());
            (runs, violated > 0, observed, min_margin)
        }
        EntryKind::Figure2 { alpha, n_max, resamples } => {
            let columns = figure2_columns(*alpha, *n_max, key, opts.samples)?;
            let fig = figure2_from_columns(*alpha, &columns, &figure2_p_grid())?;
            let band = figure2_band(&columns, &FIGURE2_CHECK_P, *resamples, key.with_domain("bootstrap"))?;
            let mut min_margin = f64::INFINITY;
            for (j, (g, b)) in band.gaps.iter().zip(&band.band).enumerate() {
                for (k, p) in band.p_grid.iter().enumerate() {
                    min_margin = min_margin.min(g[k] - b[k]);
                    doc.push(&format!("gap.n{}-n{}.p{p}", j + 2, j + 3), format!("{:e} band {:e}", g[k], b[k]));
                }
            }
            doc.push("bootstrap.resamples", resamples);
            doc.push("bootstrap.rows", columns[0].len().min(super::figures::FIGURE2_BOOTSTRAP_ROWS));
            if let Some(dir) = out_dir {
                let path = dir.join("FIG2.csv");
                write_figure2_csv(&path, &fig)?;
                files.push(path);
            }
            let met = fig.monotone_in_n() && band.all_beyond_noise();
            let observed = if met { "monotone-in-n".to_string() } else { "not separated".to_string() };
            (Vec::new(), met, observed, min_margin)
        }
        EntryKind::Gpd { gpd, eta, theta } => {
            let mut g = ScenarioSpec::iid(Margin::Gpd(*gpd), eta.clone(), theta.clone());
            g.pairing = Pairing::Sorted;
            let arms = draw_arms(&g, key.with_domain("gpd"), opts.samples)?;
            let v_gpd = empirical_fsd_test(&arms.low, &arms.high, &base_grid, opts.confidence)?;
            // the same draws on the Pareto scale: ||w|| + (xi / beta) w . X
            let map = |e: &EmpiricalDistribution, total: f64| {
                EmpiricalDistribution::new(e.sorted_values().iter().map(|x| total + gpd.xi() / gpd.beta() * x).collect())
            };
            let mapped = Arms { low: map(&arms.low, eta.total())?, high: map(&arms.high, theta.total())? };
            // an independent run with Pareto(1 / xi) margins
            let pspec = ScenarioSpec::iid(Margin::Pareto(gpd.equivalent_pareto()?), eta.clone(), theta.clone());
            let direct = draw_arms(&pspec, key.with_domain("pareto"), opts.samples)?;
            let v_direct = empirical_fsd_test(&direct.low, &direct.high, &base_grid, opts.confidence)?;
            // the mapped GPD portfolio and the direct Pareto portfolio share a law
            let eps = 2.0 * dkw_epsilon(opts.samples, opts.confidence);
            let ks = two_sample_ks(&mapped.low, &direct.low).max(two_sample_ks(&mapped.high, &direct.high));
            doc.push_verdict("gpd", &v_gpd).push_verdict("pareto", &v_direct);
            doc.push("mapping.ks", format!("{ks:e}")).push("mapping.band", format!("{eps:e}"));
            if let Some(dir) = out_dir {
                for (name, v, a) in [("gpd", &v_gpd, &arms), ("pareto", &v_direct, &direct)] {
                    let path = dir.join(format!("GPD__{name}.csv"));
                    let (lc, hc) = curves(v, a);
                    write_verdict_csv(&path, v, &lc, &hc)?;
                    files.push(path);
                }
            }
            let met = v_gpd.is_consistent() && v_direct.is_consistent() && ks <= eps;
            let observed = if met {
                "fsd-consistent".to_string()
            } else if ks > eps {
                format!("mapping mismatch (ks {ks:.3e})")
            } else {
                format!("{} / {}", v_gpd.label(), v_direct.label())
            };
            let min_margin = v_gpd.min_slack().min(v_direct.min_slack());
            let runs = vec![
                SubRun { id: "gpd".into(), verdict: v_gpd, crossings: Vec::new(), diagnostic: None },
                SubRun { id: "pareto".into(), verdict: v_direct, crossings: Vec::new(), diagnostic: None },
            ];
            (runs, met, observed, min_margin)
        }
    };

    doc.push("observed", &observed).push("met", met).push("min_margin", format!("{min_margin:e}"));
    if let Some(dir) = out_dir {
        let path = dir.join(format!("{}.result.txt", file_stem(entry.id)));
        doc.write(&path)?;
        files.push(path);
    }
    Ok(CatalogOutcome {
        id: entry.id.to_string(),
        expected: entry.expectation,
        observed,
        met,
        min_margin,
        seed: opts.seed,
        runs,
        files,
    })
}

/// Two-sample Kolmogorov distance.
pub fn two_sample_ks(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (x, y) = (a.sorted_values(), b.sorted_values());
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut worst) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        worst = worst.max((i as f64 / n - j as f64 / m).abs());
    }
    worst
}

/// Runs every entry in catalog order.
pub fn run_all(opts: &RunOptions) -> Result<Vec<CatalogOutcome>> {
    catalog().iter().map(|e| run_catalog(e, opts)).collect()
}

/// Plain-text summary table.
pub fn summary_table(outcomes: &[CatalogOutcome]) -> String {
    let mut s = format!("{:<16} {:<20} {:<28} {:>12} {:>20} {}\n", "id", "expected", "observed", "min_margin", "seed", "status");
    for o in outcomes {
        s.push_str(&format!(
            "{:<16} {:<20} {:<28} {:>12.3e} {:>20} {}\n",
            o.id,
            o.expected.to_string(),
            o.observed,
            o.min_margin,
            o.seed,
            if o.met { "PASS" } else { "FAIL" }
        ));
    }
    s
}

pub fn write_summary(path: &Path, outcomes: &[CatalogOutcome]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["id", "expected", "observed", "min_margin", "seed", "met"])?;
    for o in outcomes {
        w.write_record([
            o.id.clone(),
            o.expected.to_string(),
            o.observed.clone(),
            format!("{:e}", o.min_margin),
            o.seed.to_string(),
            o.met.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_complete() {
        let ids = catalog_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
        for want in [
            "T1-iid", "T1-sorted", "FIG1-reversed", "T2-trigger", "P4-tail", "C2-floor", "C2-excess",
            "P5-excess-nonid", "P6-bounded", "T3-clayton", "TA1-mfp", "MIX", "P1-finite", "P2-ssd",
            "R2-paretosum", "FIG2", "GPD",
        ] {
            assert!(entry(want).is_some(), "{want}");
        }
        assert!(entry("NOPE").is_none());
    }

    #[test]
    fn every_scenario_validates() {
        for e in catalog() {
            for (sub, s) in e.scenarios() {
                s.validate().unwrap_or_else(|err| panic!("{}/{sub}: {err}", e.id));
            }
        }
        assert_eq!(entry("T1-iid").unwrap().scenarios().len(), 9);
        assert_eq!(entry("T2-trigger").unwrap().scenarios().len(), 4);
    }

    #[test]
    fn standard_pairs_are_strict() {
        for n in 2..6 {
            let (eta, theta) = standard_pair(n);
            assert!(crate::majorization::majorizes(&eta, &theta).unwrap().is_strict());
        }
    }

    #[test]
    fn bounded_entry_region() {
        let (_, s) = entry("P6-bounded").unwrap().scenarios().remove(0);
        assert_eq!(s.effective_region().unwrap(), Some((3.0, 10.0)));
    }

    #[test]
    fn small_run_writes_documents() {
        let dir = tempfile::tempdir().unwrap();
        let opts = RunOptions { samples: 20_000, seed: 1, output_dir: Some(dir.path().to_path_buf()), ..RunOptions::default() };
        let out = run_catalog(&entry("P6-bounded").unwrap(), &opts).unwrap();
        assert!(out.met, "{out:?}");
        let grid = &out.runs[0].verdict.grid;
        assert!(grid.iter().all(|&x| x > 3.0 && x < 10.0));
        assert_eq!(out.files.len(), 2);
        let doc = std::fs::read_to_string(&out.files[1]).unwrap();
        let doc = ResultDocument::parse(&doc).unwrap();
        assert_eq!(doc.get("anchor"), Some("P6-bounded"));
        assert_eq!(doc.get("seed"), Some("1"));
    }

    #[test]
    fn ks_of_identical_samples_is_zero() {
        let a = EmpiricalDistribution::new(vec![1.0, 2.0, 3.0]).unwrap();
        let b = EmpiricalDistribution::new(vec![1.5, 2.5, 3.5]).unwrap();
        assert_eq!(two_sample_ks(&a, &a), 0.0);
        assert!((two_sample_ks(&a, &b) - 1.0 / 3.0).abs() < 1e-15);
    }
}
