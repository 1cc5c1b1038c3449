//! Brute-force expected utility of weighted sums of iid two-point variables.
//!
//! Every one of the `2^n` outcome patterns is visited, so the result carries
//! no sampling error. The rational variant is exact end to end when the
//! utility is piecewise linear with rational knots.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::majorization::WeightVector;

/// Largest dimension accepted by the enumerators.
pub const MAX_TWO_POINT_DIM: usize = 20;

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Input("at least one weight is required".into()));
    }
    if n > MAX_TWO_POINT_DIM {
        return Err(Error::Budget {
            nodes: 1u64 << n.min(63),
            message: format!("2^{n} outcome patterns exceed the limit of 2^{MAX_TWO_POINT_DIM}"),
        });
    }
    Ok(())
}

/// Non-decreasing piecewise-linear utility through rational knots, extended
/// linearly beyond the outer knots.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedUtility {
    xs: Vec<BigRational>,
    ys: Vec<BigRational>,
}

impl TabulatedUtility {
    pub fn new(knots: Vec<(BigRational, BigRational)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Spec("a tabulated utility needs at least two knots".into()));
        }
        let (xs, ys): (Vec<_>, Vec<_>) = knots.into_iter().unzip();
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Spec("utility knots must have strictly increasing abscissae".into()));
        }
        if ys.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Spec("utility must be non-decreasing".into()));
        }
        Ok(TabulatedUtility { xs, ys })
    }

    pub fn knots(&self) -> impl Iterator<Item = (&BigRational, &BigRational)> {
        self.xs.iter().zip(&self.ys)
    }

    fn slopes(&self) -> Vec<BigRational> {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (&y[1] - &y[0]) / (&x[1] - &x[0]))
            .collect()
    }

    /// Slopes non-increasing.
    pub fn is_concave(&self) -> bool {
        self.slopes().windows(2).all(|s| s[0] >= s[1])
    }

    /// Slopes non-decreasing.
    pub fn is_convex(&self) -> bool {
        self.slopes().windows(2).all(|s| s[0] <= s[1])
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let last = self.xs.len() - 1;
        // segment index: first for x below the table, last for x above
        let seg = match self.xs.binary_search(x) {
            Ok(i) => return self.ys[i].clone(),
            Err(0) => 0,
            Err(i) if i > last => last - 1,
            Err(i) => i - 1,
        };
        let slope = (&self.ys[seg + 1] - &self.ys[seg]) / (&self.xs[seg + 1] - &self.xs[seg]);
        &self.ys[seg] + slope * (x - &self.xs[seg])
    }

    /// Knots as floats, for fast approximate evaluation.
    pub fn knots_f64(&self) -> (Vec<f64>, Vec<f64>) {
        let f = |v: &Vec<BigRational>| v.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
        (f(&self.xs), f(&self.ys))
    }

    /// Flat beyond the last knot.
    pub fn is_bounded_above(&self) -> bool {
        let k = self.ys.len();
        self.ys[k - 1] == self.ys[k - 2]
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match BigRational::from_float(x) {
            Some(q) => self.eval(&q).to_f64().unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }
}

/// `E[u(sum w_i X_i)]` with `X_i = a` w.p. `prob_a`, else `b`, in floating point.
pub fn two_point_eu_enumerate<U: Fn(f64) -> f64>(
    a: f64,
    b: f64,
    prob_a: f64,
    weights: &WeightVector,
    utility: U,
) -> Result<f64> {
    let w = weights.as_slice();
    check_dimension(w.len())?;
    if !(0.0..=1.0).contains(&prob_a) {
        return Err(Error::Domain(format!("probability {prob_a} outside [0, 1]")));
    }
    let mut total = 0.0;
    for pattern in 0u32..(1u32 << w.len()) {
        let mut value = 0.0;
        let mut prob = 1.0;
        for (i, &wi) in w.iter().enumerate() {
            if pattern >> i & 1 == 1 {
                value += wi * a;
                prob *= prob_a;
            } else {
                value += wi * b;
                prob *= 1.0 - prob_a;
            }
        }
        total += prob * utility(value);
    }
    Ok(total)
}

/// Rational counterpart of [`two_point_eu_enumerate`].
pub fn two_point_eu_exact(
    a: &BigRational,
    b: &BigRational,
    prob_a: &BigRational,
    weights: &[BigRational],
    utility: &TabulatedUtility,
) -> Result<BigRational> {
    check_dimension(weights.len())?;
    if prob_a.is_negative() || prob_a > &BigRational::one() {
        return Err(Error::Domain(format!("probability {prob_a} outside [0, 1]")));
    }
    if weights.iter().any(Signed::is_negative) {
        return Err(Error::Input("weights must be non-negative".into()));
    }
    let prob_b = BigRational::one() - prob_a;
    let n = weights.len();
    // P(pattern) depends only on the number of a's
    let mut by_count = Vec::with_capacity(n + 1);
    for k in 0..=n {
        by_count.push(num_traits::pow(prob_a.clone(), k) * num_traits::pow(prob_b.clone(), n - k));
    }
    let mut total = BigRational::zero();
    for pattern in 0u32..(1u32 << n) {
        let mut value = BigRational::zero();
        for (i, wi) in weights.iter().enumerate() {
            value += wi * if pattern >> i & 1 == 1 { a } else { b };
        }
        let k = pattern.count_ones() as usize;
        total += &by_count[k] * utility.eval(&value);
    }
    Ok(total)
}

/// Converts a weight vector to rationals exactly (binary floats are dyadic).
pub fn weights_to_rational(weights: &WeightVector) -> Vec<BigRational> {
    weights
        .as_slice()
        .iter()
        .map(|&w| BigRational::from_float(w).unwrap_or_else(|| BigRational::from_integer(BigInt::zero())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identity_utility_is_linear() {
        let eu = two_point_eu_enumerate(0.0, 4.0, 0.5, &wv(&[0.5, 0.5]), |x| x).unwrap();
        assert!((eu - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_utility_values() {
        let c = two_point_eu_enumerate(0.0, 4.0, 0.5, &wv(&[1.0, 0.0]), f64::sqrt).unwrap();
        assert!((c - 1.0).abs() < 1e-15);
        let d = two_point_eu_enumerate(0.0, 4.0, 0.5, &wv(&[0.5, 0.5]), f64::sqrt).unwrap();
        // outcomes 0, 2, 2, 4 each with probability 1/4
        let brute = (0.0 + 2f64.sqrt() * 2.0 + 2.0) / 4.0;
        assert!((d - brute).abs() < 1e-15);
        assert!((d - (2.0 + 2.0 * 2f64.sqrt()) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn convex_utility_prefers_concentration() {
        let c = two_point_eu_enumerate(0.0, 4.0, 0.5, &wv(&[1.0, 0.0]), f64::exp).unwrap();
        let d = two_point_eu_enumerate(0.0, 4.0, 0.5, &wv(&[0.5, 0.5]), f64::exp).unwrap();
        assert!(d < c);
    }

    #[test]
    fn exact_matches_float() {
        let u = TabulatedUtility::new(vec![(q("0"), q("0")), (q("1"), q("2")), (q("4"), q("3"))]).unwrap();
        assert!(u.is_concave() && !u.is_convex());
        let w = [q("1/4"), q("3/4")];
        let exact = two_point_eu_exact(&q("0"), &q("4"), &q("1/3"), &w, &u).unwrap();
        let float = two_point_eu_enumerate(0.0, 4.0, 1.0 / 3.0, &wv(&[0.25, 0.75]), |x| u.eval_f64(x)).unwrap();
        assert!((exact.to_f64().unwrap() - float).abs() < 1e-12);
        // by hand: outcomes 0 (1/9), 1 (2/9), 3 (2/9), 4 (4/9)
        // u: 0, 2, 8/3, 3
        let by_hand = q("2") * q("2/9") + q("8/3") * q("2/9") + q("3") * q("4/9");
        assert_eq!(exact, by_hand);
    }

    #[test]
    fn tabulated_extrapolates_linearly() {
        let u = TabulatedUtility::new(vec![(q("1"), q("1")), (q("2"), q("3"))]).unwrap();
        assert_eq!(u.eval(&q("0")), q("-1"));
        assert_eq!(u.eval(&q("5/2")), q("4"));
        assert_eq!(u.eval(&q("2")), q("3"));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TabulatedUtility::new(vec![(q("0"), q("1")), (q("1"), q("0"))]).is_err());
        assert!(TabulatedUtility::new(vec![(q("0"), q("1"))]).is_err());
        let big = WeightVector::uniform(21, 1.0).unwrap();
        assert!(matches!(
            two_point_eu_enumerate(0.0, 1.0, 0.5, &big, |x| x),
            Err(Error::Budget { .. })
        ));
        assert!(two_point_eu_enumerate(0.0, 1.0, 1.5, &wv(&[1.0]), |x| x).is_err());
    }
}
