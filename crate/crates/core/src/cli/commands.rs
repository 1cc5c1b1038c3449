//! Command implementations.

use std::io::Write;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::exact::{format_fraction, parse_rational, stp_sum_cdf_with_budget};
use crate::majorization::WeightVector;
use crate::montecarlo::{
    crossing_detect, empirical_fsd_test, read_at, write_verdict_csv, EmpiricalDistribution, GridSpec, StreamKey,
};
use crate::portfolio::{optimize_p1, optimize_p2, LatticeOptions, Monotonicity, P1Result, PenaltySpec, PreferenceSpec, SampleBank};
use crate::scenarios::figures::{
    figure1, figure2_band, figure2_columns, figure2_from_columns, figure2_p_grid, write_figure1_to, write_figure2_to,
    FIGURE1_ALPHAS, FIGURE1_PAIRS, FIGURE2_CHECK_P,
};
use crate::scenarios::{catalog, catalog_ids, entry, run_catalog, summary_table, write_summary, RunOptions, ScenarioSpec};

use super::config::{parse_format, parse_samples, parse_seed, Overrides, RunConfig};
use super::{exit, parse, CatalogArgs, Cli, Command, CompareArgs, FigureArgs, FigureId, OptimizeArgs, Problem, StpArgs};

/// Below this many samples the figure curves are visibly noisy.
const FIGURE_NOISE_WARNING: usize = 100_000;

fn resolve_config(cli: &Cli, env_seed: Option<&str>) -> Result<RunConfig> {
    let c = &cli.common;
    let file = c.config.as_deref().map(Overrides::from_file).transpose()?;
    let flags = Overrides {
        seed: c.seed.as_deref().map(parse_seed).transpose()?,
        samples: c.samples.as_deref().map(parse_samples).transpose()?,
        confidence: c.confidence,
        grid_points: c.grid_points,
        output_dir: c.output_dir.clone(),
        format: c.format.as_deref().map(parse_format).transpose()?,
    };
    RunConfig::resolve(file, env_seed, flags)
}

pub(super) fn dispatch(
    cli: &Cli,
    env_seed: Option<&str>,
    command_line: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let cfg = resolve_config(cli, env_seed)?;
    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir)?;
    }
    match &cli.command {
        Command::Stp(a) => stp(a, out),
        Command::Compare(a) => {
            cfg.require_statistical()?;
            compare(a, &cfg, command_line, out)
        }
        Command::Catalog(a) => {
            cfg.require_statistical()?;
            run_catalog_cmd(a, &cfg, command_line, out)
        }
        Command::Figure(a) => {
            cfg.require_statistical()?;
            figure(a, &cfg, command_line, out, err)
        }
        Command::Optimize(a) => {
            cfg.require_statistical()?;
            optimize(a, &cfg, command_line, out, err)
        }
    }
}

fn stp(a: &StpArgs, out: &mut dyn Write) -> Result<i32> {
    let weights = a.weights.split(',').map(|w| parse_rational(w.trim())).collect::<Result<Vec<_>>>()?;
    let x = parse_rational(a.x.trim())?;
    let (p, _) = stp_sum_cdf_with_budget(&weights, &x, a.strict, a.budget)?;
    writeln!(out, "{}", format_fraction(&p))?;
    Ok(exit::CONSISTENT)
}

fn output_path(cfg: &RunConfig, name: &str) -> Option<PathBuf> {
    cfg.output_dir.as_ref().map(|d| d.join(name))
}

fn compare(a: &CompareArgs, cfg: &RunConfig, command_line: &str, out: &mut dyn Write) -> Result<i32> {
    let eta: WeightVector = a.eta.parse()?;
    let theta: WeightVector = a.theta.parse()?;
    let margins = parse::margins(a.margin.as_deref(), &a.alpha, eta.len())?;
    let mut spec = ScenarioSpec::iid(margins[0].clone(), eta, theta)
        .with_dependence(parse::dependence(&a.dependence)?)
        .with_transform(parse::transform(&a.transform)?)
        .with_coupling(parse::coupling(&a.coupling)?);
    spec.margins = margins;
    spec.pairing = parse::pairing(&a.pairing)?;
    spec.allow_finite_mean = true;
    if let Some(r) = &a.region {
        let v = parse::float_list(r)?;
        if v.len() != 2 {
            return Err(Error::Input(format!("region '{r}' must be LO,HI")));
        }
        spec = spec.with_region(v[0], v[1]);
    }
    let finite_mean = spec.margins.iter().any(|m| !m.has_infinite_mean());
    let sampler = spec.build()?;
    let region = spec.effective_region()?;
    let (low, high) = sampler.sample_pairs(StreamKey::new(cfg.seed).with_domain("compare"), cfg.samples)?;
    let (low, high) = (EmpiricalDistribution::new(low)?, EmpiricalDistribution::new(high)?);
    let mut grid = GridSpec::with_points(cfg.grid_points);
    if let Some((lo, hi)) = region {
        grid = grid.restricted(lo, hi);
    }
    let verdict = empirical_fsd_test(&low, &high, &grid, cfg.confidence)?;
    let crossings = if finite_mean || !verdict.is_consistent() {
        crossing_detect(&low, &high, &grid, cfg.confidence)?
    } else {
        Vec::new()
    };

    writeln!(out, "relation: {}", verdict.label())?;
    writeln!(out, "region: {}", region.map_or("full line".into(), |(l, h)| format!("[{l}, {h}]")))?;
    writeln!(out, "samples: {}  seed: {}  confidence: {}", cfg.samples, cfg.seed, cfg.confidence)?;
    writeln!(out, "epsilon: {:.3e}  min slack: {:.3e}  strictness: {:.3e}", verdict.epsilon, verdict.min_slack(), verdict.strictness)?;
    if let Some(i) = verdict.worst_index() {
        writeln!(out, "tightest point: x = {:.6e}", verdict.grid[i])?;
    }
    if finite_mean || !crossings.is_empty() {
        writeln!(out, "crossings: {}", crossings.len())?;
        for c in &crossings {
            let dir = if c.sign_before > 0 { "low above high, then below" } else { "low below high, then above" };
            writeln!(out, "  between {:.6e} and {:.6e} ({dir})", c.from, c.to)?;
        }
    }

    let mut doc = cfg.document("compare", command_line);
    doc.push("scenario", format!("{spec:?}"));
    doc.push("region", format!("{region:?}"));
    doc.push_verdict("verdict", &verdict);
    doc.push("crossings", crossings.len());
    if let Some(path) = output_path(cfg, "compare.csv") {
        let lc: Vec<f64> = verdict.grid.iter().map(|&x| low.survival(read_at(x))).collect();
        let hc: Vec<f64> = verdict.grid.iter().map(|&x| high.survival(read_at(x))).collect();
        write_verdict_csv(&path, &verdict, &lc, &hc)?;
        doc.write(&output_path(cfg, "compare.result.txt").expect("output dir set"))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(if verdict.is_consistent() { exit::CONSISTENT } else { exit::VIOLATED })
}

fn run_catalog_cmd(a: &CatalogArgs, cfg: &RunConfig, command_line: &str, out: &mut dyn Write) -> Result<i32> {
    let entries = if a.ids.iter().any(|i| i == "all") {
        catalog()
    } else {
        a.ids
            .iter()
            .map(|id| {
                entry(id).ok_or_else(|| {
                    Error::Config(format!("unknown catalog id '{id}'; known ids: {}", catalog_ids().join(", ")))
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    let opts = RunOptions {
        samples: cfg.samples,
        seed: cfg.seed,
        confidence: cfg.confidence,
        grid_points: cfg.grid_points,
        output_dir: cfg.output_dir.clone(),
        full_line_diagnostic: a.full_line,
    };
    let outcomes = entries.iter().map(|e| run_catalog(e, &opts)).collect::<Result<Vec<_>>>()?;
    write!(out, "{}", summary_table(&outcomes))?;
    if let Some(path) = output_path(cfg, "summary.csv") {
        write_summary(&path, &outcomes)?;
        let mut doc = cfg.document("catalog", command_line);
        for o in &outcomes {
            doc.push(&format!("{}.met", o.id), o.met);
        }
        doc.write(&output_path(cfg, "catalog.result.txt").expect("output dir set"))?;
    }
    Ok(if outcomes.iter().all(|o| o.met) { exit::CONSISTENT } else { exit::VIOLATED })
}

/// Writes CSV to the output directory when one is set, otherwise to `out`.
fn emit_csv(
    cfg: &RunConfig,
    name: &str,
    out: &mut dyn Write,
    write: impl Fn(&mut dyn Write) -> Result<()>,
) -> Result<Option<PathBuf>> {
    match output_path(cfg, name) {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write(&mut f)?;
            f.flush()?;
            Ok(Some(path))
        }
        None => {
            write(out)?;
            Ok(None)
        }
    }
}

fn figure(a: &FigureArgs, cfg: &RunConfig, command_line: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if cfg.samples < FIGURE_NOISE_WARNING {
        writeln!(
            err,
            "warning: {} samples per curve; the curves carry wide Monte Carlo noise (use at least {FIGURE_NOISE_WARNING})",
            cfg.samples
        )?;
    }
    let key = StreamKey::new(cfg.seed).with_domain("figure");
    let mut doc = cfg.document(
        match a.id {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
        },
        command_line,
    );
    let (name, summary) = match a.id {
        FigureId::Fig1 => {
            let alphas = match &a.alphas {
                Some(s) => match parse::float_list(s)?.as_slice() {
                    [a1, a2] => (*a1, *a2),
                    _ => return Err(Error::Input(format!("--alphas '{s}' must be A1,A2"))),
                },
                None => FIGURE1_ALPHAS,
            };
            let grid = GridSpec::with_points(cfg.grid_points);
            let curves = figure1(alphas, &FIGURE1_PAIRS, key.with_domain("fig1"), cfg.samples, &grid, cfg.confidence)?;
            let written = emit_csv(cfg, "fig1.csv", out, |w| write_figure1_to(w, &curves))?;
            let mut lines = Vec::new();
            for c in &curves {
                let pair = format!("({},{}) vs ({},{})", c.eta[0], c.eta[1], c.theta[0], c.theta[1]);
                doc.push_verdict(&pair.replace(' ', ""), &c.verdict);
                lines.push(format!("{pair}: {}", c.verdict.label()));
            }
            (written, lines)
        }
        FigureId::Fig2 => {
            let columns = figure2_columns(a.alpha, a.n_max, key.with_domain("fig2"), cfg.samples)?;
            let fig = figure2_from_columns(a.alpha, &columns, &figure2_p_grid())?;
            let band = figure2_band(&columns, &FIGURE2_CHECK_P, 200, key.with_domain("bootstrap"))?;
            let written = emit_csv(cfg, "fig2.csv", out, |w| write_figure2_to(w, &fig))?;
            doc.push("monotone_in_n", fig.monotone_in_n());
            doc.push("gaps_beyond_noise", band.all_beyond_noise());
            (
                written,
                vec![
                    format!("curves: n = 2..={}", a.n_max),
                    format!("monotone in n: {}", fig.monotone_in_n()),
                    format!("gaps beyond bootstrap noise: {}", band.all_beyond_noise()),
                ],
            )
        }
    };
    // keep stdout pure CSV when the data goes there
    let sink: &mut dyn Write = if name.is_some() { out } else { err };
    for l in summary {
        writeln!(sink, "{l}")?;
    }
    if let Some(path) = name {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        doc.write(&path.with_file_name(format!("{stem}.result.txt")))?;
        writeln!(sink, "wrote {}", path.display())?;
    }
    Ok(exit::CONSISTENT)
}

fn format_weights(w: &[f64]) -> String {
    let parts: Vec<String> = w.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

fn report_p1(out: &mut dyn Write, r: &P1Result) -> Result<()> {
    writeln!(out, "total: {}", r.total)?;
    writeln!(out, "argmax: {}", format_weights(r.argmax_weights()))?;
    writeln!(out, "value: {:.6e}  noise band: {:.3e}", r.value(), r.noise_band())?;
    writeln!(out, "distance from uniform: {:.4}", r.distance_to_uniform())?;
    writeln!(out, "argmax nearest uniform: {}", r.argmax_is_nearest_uniform())?;
    writeln!(out, "points within noise of the maximum: {}", r.near_ties())?;
    Ok(())
}

fn optimize(a: &OptimizeArgs, cfg: &RunConfig, command_line: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let pref: PreferenceSpec = a.pref.parse()?;
    let penalty: PenaltySpec = a.penalty.parse()?;
    let margins = parse::margins(a.margin.as_deref(), &a.alpha, a.n)?;
    // refuse before paying for the sample bank
    pref.check_margins(&margins)?;
    if pref.monotonicity() == Monotonicity::Weak {
        writeln!(err, "note: '{pref}' is only weakly monotone; ties on the surface are expected")?;
    }
    let bank = SampleBank::new(
        margins,
        parse::dependence(&a.dependence)?,
        crate::distributions::MarginTransform::Identity,
        StreamKey::new(cfg.seed).with_domain("optimize"),
        cfg.samples,
    )?;
    let opts = LatticeOptions { resolution: a.resolution, penalty, budget: a.lattice_budget };
    let mut doc = cfg.document(
        match a.problem {
            Problem::P1 => "optimize-p1",
            Problem::P2 => "optimize-p2",
        },
        command_line,
    );
    doc.push("preference", &pref).push("penalty", penalty).push("resolution", a.resolution);
    writeln!(out, "preference: {pref}  penalty: {penalty}  n: {}  resolution: {}", a.n, a.resolution)?;
    writeln!(out, "samples: {}  seed: {}", cfg.samples, cfg.seed)?;
    let surfaces: Vec<(String, P1Result)> = match a.problem {
        Problem::P1 => {
            let r = optimize_p1(&pref, &bank, a.total, &opts)?;
            report_p1(out, &r)?;
            vec![("p1_surface.csv".into(), r)]
        }
        Problem::P2 => {
            let grid = parse::float_list(&a.w_grid)?;
            let r = optimize_p2(&pref, &bank, &grid, &opts)?;
            for (p, on_ray) in r.per_total.iter().zip(r.on_uniform_ray()) {
                writeln!(
                    out,
                    "total {:>8}: argmax {}  value {:.6e}  on uniform ray: {on_ray}",
                    p.total,
                    format_weights(p.argmax_weights()),
                    p.value()
                )?;
            }
            writeln!(out, "global:")?;
            report_p1(out, r.global())?;
            if let Some(w) = &r.warning {
                writeln!(err, "warning: {w}")?;
                doc.push("warning", w);
            }
            r.per_total.into_iter().enumerate().map(|(i, p)| (format!("p2_surface_{i}.csv"), p)).collect()
        }
    };
    for (name, r) in &surfaces {
        doc.push(&format!("{name}.total"), r.total);
        doc.push(&format!("{name}.argmax"), format_weights(r.argmax_weights()));
        doc.push(&format!("{name}.value"), format!("{:e}", r.value()));
        doc.push(&format!("{name}.noise_band"), format!("{:e}", r.noise_band()));
        if let Some(path) = output_path(cfg, name) {
            r.write_surface_csv(&path)?;
            writeln!(out, "wrote {}", path.display())?;
        }
    }
    if let Some(path) = output_path(cfg, "optimize.result.txt") {
        doc.write(&path)?;
    }
    Ok(exit::CONSISTENT)
}
