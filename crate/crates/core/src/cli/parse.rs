//! Parsers for the compact scenario strings accepted on the command line.

use crate::distributions::{FellerParetoSpec, GpdSpec, Margin, MarginTransform, TwoPointSpec};
use crate::error::{Error, Result};
use crate::scenarios::{Dependence, Pairing, TriggerCoupling};

fn fields(s: &str) -> (String, Vec<&str>) {
    let mut it = s.trim().split(':');
    let head = it.next().unwrap_or("").trim().to_ascii_lowercase();
    (head, it.map(str::trim).collect())
}

fn numbers(what: &str, s: &str, args: &[&str], want: usize) -> Result<Vec<f64>> {
    if args.len() != want {
        return Err(Error::Input(format!("{what} '{s}' needs {want} numeric field(s)")));
    }
    args.iter()
        .map(|a| a.parse::<f64>().map_err(|_| Error::Input(format!("{what} '{s}': '{a}' is not a number"))))
        .collect()
}

/// Comma-separated floats.
pub fn float_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Input(format!("'{}' is not a number", t.trim()))))
        .collect()
}

/// `pareto:A`, `gpd:XI:BETA`, `fp:A:B:G`, `stp`, `twopoint:A:B:P`.
pub fn margin(s: &str) -> Result<Margin> {
    let (head, args) = fields(s);
    match head.as_str() {
        "pareto" => Margin::pareto(numbers("margin", s, &args, 1)?[0]),
        "gpd" => {
            let v = numbers("margin", s, &args, 2)?;
            Ok(Margin::Gpd(GpdSpec::new(v[0], v[1])?))
        }
        "fp" => {
            let v = numbers("margin", s, &args, 3)?;
            Ok(Margin::FellerPareto(FellerParetoSpec::standard(v[0], v[1], v[2])?))
        }
        "stp" if args.is_empty() => Ok(Margin::StPetersburg),
        "twopoint" => {
            let v = numbers("margin", s, &args, 3)?;
            Ok(Margin::TwoPoint(TwoPointSpec::new(v[0], v[1], v[2])?))
        }
        _ => Err(Error::Input(format!("unknown margin '{s}'; use pareto:A, gpd:XI:BETA, fp:A:B:G, stp or twopoint:A:B:P"))),
    }
}

/// `independent`, `comonotone`, `shock:A:B:G`, `mix:I:C:K`.
pub fn dependence(s: &str) -> Result<Dependence> {
    let (head, args) = fields(s);
    match head.as_str() {
        "independent" if args.is_empty() => Ok(Dependence::Independent),
        "comonotone" if args.is_empty() => Ok(Dependence::Comonotone),
        "shock" => {
            let v = numbers("dependence", s, &args, 3)?;
            Ok(Dependence::CommonShock { alpha: v[0], beta: v[1], gamma: v[2] })
        }
        "mix" => {
            let v = numbers("dependence", s, &args, 3)?;
            Ok(Dependence::Mixture { independent: v[0], comonotone: v[1], clayton: v[2] })
        }
        _ => Err(Error::Input(format!(
            "unknown dependence '{s}'; use independent, comonotone, shock:A:B:G or mix:I:C:K"
        ))),
    }
}

/// `identity`, `cap:C`, `floor:C`, `excess:C`, `tail:C`, `trigger:P`.
pub fn transform(s: &str) -> Result<MarginTransform> {
    let (head, args) = fields(s);
    let t = match head.as_str() {
        "identity" if args.is_empty() => MarginTransform::Identity,
        "cap" => MarginTransform::Cap(numbers("transform", s, &args, 1)?[0]),
        "floor" => MarginTransform::FloorMax(numbers("transform", s, &args, 1)?[0]),
        "excess" => MarginTransform::Excess(numbers("transform", s, &args, 1)?[0]),
        "tail" => MarginTransform::TailBeyond(numbers("transform", s, &args, 1)?[0]),
        "trigger" => MarginTransform::Trigger(numbers("transform", s, &args, 1)?[0]),
        _ => {
            return Err(Error::Input(format!(
                "unknown transform '{s}'; use identity, cap:C, floor:C, excess:C, tail:C or trigger:P"
            )))
        }
    };
    t.validate()?;
    Ok(t)
}

/// `same`, `disjoint`, `independent`, `common:RHO`.
pub fn coupling(s: &str) -> Result<TriggerCoupling> {
    let (head, args) = fields(s);
    match head.as_str() {
        "same" if args.is_empty() => Ok(TriggerCoupling::Same),
        "disjoint" if args.is_empty() => Ok(TriggerCoupling::Disjoint),
        "independent" if args.is_empty() => Ok(TriggerCoupling::Independent),
        "common" => Ok(TriggerCoupling::CommonUniform { rho: numbers("coupling", s, &args, 1)?[0] }),
        _ => Err(Error::Input(format!("unknown coupling '{s}'; use same, disjoint, independent or common:RHO"))),
    }
}

/// `sorted` or `given`.
pub fn pairing(s: &str) -> Result<Pairing> {
    match s.trim() {
        "sorted" => Ok(Pairing::Sorted),
        "given" => Ok(Pairing::AsGiven),
        _ => Err(Error::Input(format!("unknown pairing '{s}'; use sorted or given"))),
    }
}

/// Margins from an explicit list or from tail indices; a single entry is
/// repeated `n` times.
pub fn margins(explicit: Option<&str>, alphas: &str, n: usize) -> Result<Vec<Margin>> {
    let list: Vec<Margin> = match explicit {
        Some(m) => m.split(',').map(margin).collect::<Result<_>>()?,
        None => float_list(alphas)?.into_iter().map(Margin::pareto).collect::<Result<_>>()?,
    };
    match list.len() {
        1 => Ok(vec![list[0].clone(); n]),
        k if k == n => Ok(list),
        k => Err(Error::Dimension { expected: n, got: k }),
    }
}
