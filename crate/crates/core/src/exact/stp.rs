//! Exact distribution of weighted sums of iid St. Petersburg lotteries.
//!
//! Each lottery pays `2^k` with probability `2^-k`, `k >= 1`. Weighted sums
//! below a finite level only involve finitely many level combinations, so
//! their probabilities are finite sums of dyadic rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default cap on enumeration nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

fn half_pow(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

fn pow2(k: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << k)
}

/// Parses `"p/q"`, an integer, or a finite decimal like `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Input(format!("cannot parse '{s}' as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Input(format!("zero denominator in '{s}'")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Exact decimal expansion when the reduced denominator is `2^a 5^b`,
/// otherwise a floating approximation.
pub fn format_decimal(r: &BigRational) -> String {
    let mut d = r.denom().clone();
    let (two, five) = (BigInt::from(2u32), BigInt::from(5u32));
    let (mut a, mut b) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    if !d.is_one() {
        return r.to_f64().map_or_else(|| "nan".into(), |v| v.to_string());
    }
    let places = a.max(b);
    let scaled = (r * BigRational::from_integer(num_traits::pow(BigInt::from(10u32), places)))
        .to_integer();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let body = if places == 0 {
        digits
    } else {
        let padded = format!("{digits:0>width$}", width = places + 1);
        let (i, f) = padded.split_at(padded.len() - places);
        format!("{i}.{f}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Renders `p/q = decimal` (or `p = decimal` for integers).
pub fn format_fraction(r: &BigRational) -> String {
    format!("{} = {}", r, format_decimal(r))
}

fn validate(weights: &[BigRational], x: &BigRational) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Input("at least one weight is required".into()));
    }
    if weights.iter().any(|w| !w.is_positive()) {
        return Err(Error::Input("weights must be positive rationals".into()));
    }
    if !x.is_positive() {
        return Err(Error::Input("level x must be positive".into()));
    }
    Ok(())
}

struct Enumeration<'a> {
    weights: &'a [BigRational],
    /// `2 * sum_{j > i} w_j`: the smallest value the remaining terms can take.
    rest_min: Vec<BigRational>,
    strict: bool,
    nodes: u64,
    budget: u64,
}

impl Enumeration<'_> {
    fn below(&self, value: &BigRational, level: &BigRational) -> bool {
        if self.strict {
            value < level
        } else {
            value <= level
        }
    }

    fn charge(&mut self, partial: &BigRational) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget {
                nodes: self.nodes - 1,
                message: format!(
                    "enumeration stopped; probability is at least {} (~{:.6})",
                    partial,
                    partial.to_f64().unwrap_or(f64::NAN)
                ),
            });
        }
        Ok(())
    }

    /// `P(sum_{j >= i} w_j X_j < level)` (or `<=`), scaled by `mass`, added to `acc`.
    fn run(&mut self, i: usize, level: &BigRational, mass: &BigRational, acc: &mut BigRational) -> Result<()> {
        self.charge(acc)?;
        let w = &self.weights[i];
        if i + 1 == self.weights.len() {
            // closed form for the last term: 1 - 2^-K, K = #{k : w 2^k below level}
            let mut k = 0u32;
            while self.below(&(w * pow2(k + 1)), level) {
                k += 1;
            }
            *acc += mass * (BigRational::one() - half_pow(k));
            return Ok(());
        }
        let mut k = 1u32;
        loop {
            let spent = w * pow2(k);
            if !self.below(&(&spent + &self.rest_min[i]), level) {
                break;
            }
            let next_mass = mass * half_pow(k);
            self.run(i + 1, &(level - &spent), &next_mass, acc)?;
            k += 1;
        }
        Ok(())
    }
}

fn rest_minimums(weights: &[BigRational]) -> Vec<BigRational> {
    let two = BigRational::from_integer(BigInt::from(2u32));
    let mut out = vec![BigRational::zero(); weights.len()];
    let mut acc = BigRational::zero();
    for i in (0..weights.len()).rev() {
        out[i] = &two * &acc;
        acc += &weights[i];
    }
    out
}

/// `P(sum w_i X_i < x)` (`strict`) or `P(sum w_i X_i <= x)`, exactly.
pub fn stp_sum_cdf_exact(weights: &[BigRational], x: &BigRational, strict: bool) -> Result<BigRational> {
    stp_sum_cdf_with_budget(weights, x, strict, DEFAULT_NODE_BUDGET).map(|(p, _)| p)
}

/// As [`stp_sum_cdf_exact`], with an explicit node budget; also returns the
/// number of nodes visited.
pub fn stp_sum_cdf_with_budget(
    weights: &[BigRational],
    x: &BigRational,
    strict: bool,
    budget: u64,
) -> Result<(BigRational, u64)> {
    validate(weights, x)?;
    let mut e = Enumeration {
        weights,
        rest_min: rest_minimums(weights),
        strict,
        nodes: 0,
        budget,
    };
    let mut acc = BigRational::zero();
    e.run(0, x, &BigRational::one(), &mut acc)?;
    Ok((acc, e.nodes))
}

/// Exact pmf of a weighted St. Petersburg sum below a cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicPmf {
    atoms: BTreeMap<BigRational, BigRational>,
    tail_cut: BigRational,
    cutoff: BigRational,
}

impl DyadicPmf {
    pub fn atoms(&self) -> &BTreeMap<BigRational, BigRational> {
        &self.atoms
    }

    /// Mass of `{sum >= cutoff}`.
    pub fn tail_cut(&self) -> &BigRational {
        &self.tail_cut
    }

    pub fn cutoff(&self) -> &BigRational {
        &self.cutoff
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.values().fold(self.tail_cut.clone(), |acc, p| acc + p)
    }

    /// CDF at `x <= cutoff`.
    pub fn cdf(&self, x: &BigRational, strict: bool) -> Result<BigRational> {
        if x > &self.cutoff {
            return Err(Error::Domain(format!("{x} beyond the enumerated cutoff {}", self.cutoff)));
        }
        Ok(self
            .atoms
            .iter()
            .take_while(|(v, _)| if strict { *v < x } else { *v <= x })
            .fold(BigRational::zero(), |acc, (_, p)| acc + p))
    }
}

/// Enumerates every atom of `sum w_i X_i` strictly below `cutoff`.
///
/// The residual mass is accumulated from the pruned geometric tails, not as
/// one minus the atoms, so [`DyadicPmf::total_mass`] is a genuine check.
pub fn stp_sum_pmf(weights: &[BigRational], cutoff: &BigRational, budget: u64) -> Result<DyadicPmf> {
    validate(weights, cutoff)?;
    let rest_min = rest_minimums(weights);
    let mut atoms = BTreeMap::new();
    let mut tail = BigRational::zero();
    let mut nodes = 0u64;
    // (component, value so far, mass so far)
    let mut stack = vec![(0usize, BigRational::zero(), BigRational::one())];
    while let Some((i, value, mass)) = stack.pop() {
        nodes += 1;
        if nodes > budget {
            return Err(Error::Budget {
                nodes: budget,
                message: "pmf enumeration stopped".into(),
            });
        }
        let mut k = 1u32;
        loop {
            let v = &value + &weights[i] * pow2(k);
            if &v + &rest_min[i] >= *cutoff {
                // levels k, k+1, ... all land at or beyond the cutoff
                tail += &mass * half_pow(k - 1);
                break;
            }
            let m = &mass * half_pow(k);
            if i + 1 == weights.len() {
                *atoms.entry(v).or_insert_with(BigRational::zero) += m;
            } else {
                stack.push((i + 1, v, m));
            }
            k += 1;
        }
    }
    Ok(DyadicPmf { atoms, tail_cut: tail, cutoff: cutoff.clone() })
}

/// One grid point of the comparison of `gamma_k . X_k` and `gamma_l . X_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct StpComparison {
    pub x: BigRational,
    /// `P(gamma_k . X_k < x)`
    pub first: BigRational,
    /// `P(gamma_l . X_l < x)`
    pub second: BigRational,
}

impl StpComparison {
    /// The larger pool is no smaller at this point: `second <= first`.
    pub fn dominance_holds(&self) -> bool {
        self.second <= self.first
    }
}

impl fmt::Display for StpComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={} first={} second={}", self.x, format_fraction(&self.first), format_fraction(&self.second))
    }
}

/// Equal-weight pools of `k` and `l` lotteries compared on `grid` (strict CDFs).
pub fn stp_dominance_pair(k: usize, l: usize, grid: &[BigRational]) -> Result<Vec<StpComparison>> {
    if k == 0 || l == 0 {
        return Err(Error::Input("pool sizes must be at least 1".into()));
    }
    let equal = |n: usize| vec![BigRational::new(BigInt::one(), BigInt::from(n)); n];
    let (wk, wl) = (equal(k), equal(l));
    grid.iter()
        .map(|x| {
            Ok(StpComparison {
                x: x.clone(),
                first: stp_sum_cdf_exact(&wk, x, true)?,
                second: stp_sum_cdf_exact(&wl, x, true)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn example_values() {
        assert_eq!(stp_sum_cdf_exact(&[q("1/2"), q("1/2")], &q("8"), true).unwrap(), q("3/4"));
        let third = q("1/3");
        assert_eq!(
            stp_sum_cdf_exact(&[third.clone(), third.clone(), third], &q("8"), true).unwrap(),
            q("195/256")
        );
        assert_eq!(stp_sum_cdf_exact(&[q("1")], &q("32"), true).unwrap(), q("15/16"));
        assert_eq!(stp_sum_cdf_exact(&[q("1")], &q("2"), true).unwrap(), q("0"));
        assert_eq!(stp_sum_cdf_exact(&[q("1")], &q("2"), false).unwrap(), q("1/2"));
    }

    #[test]
    fn single_lottery_levels() {
        for m in 1..=20u32 {
            let x = pow2(m);
            let expect = BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << (m - 1));
            assert_eq!(stp_sum_cdf_exact(&[q("1")], &x, true).unwrap(), expect);
        }
    }

    #[test]
    fn brute_force_agreement() {
        // direct double sum over levels up to a generous bound
        let w = [q("2/5"), q("3/5")];
        for x in ["3", "7/2", "10", "51/4"] {
            let x = q(x);
            let mut brute = BigRational::zero();
            for k1 in 1..40u32 {
                for k2 in 1..40u32 {
                    if &w[0] * pow2(k1) + &w[1] * pow2(k2) <= x {
                        brute += half_pow(k1) * half_pow(k2);
                    }
                }
            }
            assert_eq!(stp_sum_cdf_exact(&w, &x, false).unwrap(), brute);
        }
    }

    #[test]
    fn pmf_normalizes_and_agrees() {
        let w = [q("1/3"), q("1/3"), q("1/3")];
        let pmf = stp_sum_pmf(&w, &q("20"), DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(pmf.total_mass(), BigRational::one());
        for x in ["2", "3", "8", "31/2", "20"] {
            let x = q(x);
            for strict in [true, false] {
                if !strict && x == q("20") {
                    continue;
                }
                assert_eq!(pmf.cdf(&x, strict).unwrap(), stp_sum_cdf_exact(&w, &x, strict).unwrap());
            }
        }
        assert!(pmf.cdf(&q("21"), true).is_err());
    }

    #[test]
    fn pair_examples() {
        let grid: Vec<_> = ["2", "3", "4", "6", "8"].iter().map(|s| q(s)).collect();
        let rows = stp_dominance_pair(1, 2, &grid).unwrap();
        assert!(rows.iter().all(StpComparison::dominance_holds));
        let rows = stp_dominance_pair(1, 3, &[q("8")]).unwrap();
        assert_eq!(rows[0].first, q("3/4"));
        assert_eq!(rows[0].second, q("195/256"));
        assert!(!rows[0].dominance_holds());
        let rows = stp_dominance_pair(2, 4, &[q("4")]).unwrap();
        assert!(rows[0].dominance_holds());
    }

    #[test]
    fn budget_reports_partial() {
        let w = vec![q("1/5"); 5];
        let err = stp_sum_cdf_with_budget(&w, &q("4096"), true, 50).unwrap_err();
        match err {
            Error::Budget { nodes, .. } => assert_eq!(nodes, 50),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn input_validation() {
        assert!(stp_sum_cdf_exact(&[], &q("2"), true).is_err());
        assert!(stp_sum_cdf_exact(&[q("0")], &q("2"), true).is_err());
        assert!(stp_sum_cdf_exact(&[q("1")], &q("-2"), true).is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
        assert_eq!(parse_rational("0.25").unwrap(), q("1/4"));
        assert_eq!(parse_rational(" 8 ").unwrap(), q("8"));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_fraction(&q("195/256")), "195/256 = 0.76171875");
        assert_eq!(format_fraction(&q("3/4")), "3/4 = 0.75");
        assert_eq!(format_fraction(&q("0")), "0 = 0");
        assert_eq!(format_decimal(&q("1/20")), "0.05");
        assert_eq!(format_decimal(&q("-3/8")), "-0.375");
        assert!(format_decimal(&q("1/3")).starts_with("0.3333"));
    }
}
