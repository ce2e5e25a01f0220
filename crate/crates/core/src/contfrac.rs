//! Hirzebruch–Jung ("minus") and regular ("plus") continued fractions over
//! exact rationals, together with the rewriting rules that trade runs of
//! 2's for negative entries.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CfError {
    #[error("minus expansion needs x > 1, got {0}")]
    NotAboveOne(Rational),
    #[error("plus expansion needs x > 0, got {0}")]
    NotPositive(Rational),
    #[error("zero denominator while evaluating {0}")]
    Degenerate(String),
    #[error("empty continued fraction")]
    Empty,
    #[error("malformed run: {0}")]
    BadRun(String),
    #[error("sign condition violated in plus expansion: {0}")]
    SignCondition(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

/// A reduced fraction with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        // Ratio::new reduces and normalizes the sign of the denominator.
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn num(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn den(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    /// `(num, den)` as machine integers when they fit.
    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.num().to_i64()?, self.den().to_i64()?))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl FromStr for Rational {
    type Err = CfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CfError::Parse(s.to_string());
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    }
}

/// Coefficients `a_1..a_n` of `a_1 - 1/(a_2 - 1/(... - 1/a_n))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NegCF(pub Vec<BigInt>);

/// Coefficients `b_1..b_m` of `b_1 + 1/(b_2 + 1/(... + 1/b_m))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PosCF(pub Vec<BigInt>);

macro_rules! cf_common {
    ($t:ident) => {
        impl $t {
            pub fn from_i64s(coeffs: &[i64]) -> Self {
                $t(coeffs.iter().map(|&c| BigInt::from(c)).collect())
            }

            pub fn coeffs(&self) -> &[BigInt] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            /// Coefficients as `i64`, or `None` if any of them overflows.
            pub fn to_i64s(&self) -> Option<Vec<i64>> {
                self.0.iter().map(|c| c.to_i64()).collect()
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    };
}

cf_common!(NegCF);
cf_common!(PosCF);

/// Ceiling-division recurrence; every coefficient of the result is at least 2.
pub fn neg_expand(x: &Rational) -> Result<NegCF, CfError> {
    if x.0 <= BigRational::one() {
        return Err(CfError::NotAboveOne(x.clone()));
    }
    let mut num = x.num().clone();
    let mut den = x.den().clone();
    let mut out = Vec::new();
    // num/den > 1 is preserved: num/den = a - r/den with 0 <= r < den, next is den/r.
    while !den.is_zero() {
        let a = Integer::div_ceil(&num, &den);
        let r = &a * &den - &num;
        out.push(a);
        num = std::mem::replace(&mut den, r);
    }
    Ok(NegCF(out))
}

pub fn neg_eval(cf: &NegCF) -> Result<Rational, CfError> {
    let (last, rest) = cf.0.split_last().ok_or(CfError::Empty)?;
    let mut acc = BigRational::from_integer(last.clone());
    for a in rest.iter().rev() {
        if acc.is_zero() {
            return Err(CfError::Degenerate(cf.to_string()));
        }
        acc = BigRational::from_integer(a.clone()) - acc.recip();
    }
    Ok(Rational(acc))
}

/// Floor-division recurrence: `b_1 >= 0`, later entries positive, and the last
/// entry is at least 2 whenever there is more than one.
pub fn pos_expand(x: &Rational) -> Result<PosCF, CfError> {
    if !x.0.is_positive() {
        return Err(CfError::NotPositive(x.clone()));
    }
    let mut num = x.num().clone();
    let mut den = x.den().clone();
    let mut out = Vec::new();
    while !den.is_zero() {
        let (b, r) = num.div_mod_floor(&den);
        out.push(b);
        num = std::mem::replace(&mut den, r);
    }
    Ok(PosCF(out))
}

pub fn pos_eval(cf: &PosCF) -> Result<Rational, CfError> {
    let (last, rest) = cf.0.split_last().ok_or(CfError::Empty)?;
    let mut acc = BigRational::from_integer(last.clone());
    for b in rest.iter().rev() {
        if acc.is_zero() {
            return Err(CfError::Degenerate(cf.to_string()));
        }
        acc = BigRational::from_integer(b.clone()) + acc.recip();
    }
    Ok(Rational(acc))
}

/// `[.., r, 2^[s], t, ..] = [.., r-1, -(s+1), t-1, ..]` where `r` sits at
/// `position` and is followed by `run_length` 2's and then `t`.
pub fn hj_rewrite_interior(cf: &NegCF, position: usize, run_length: usize) -> Result<NegCF, CfError> {
    let t_idx = position + run_length + 1;
    if t_idx >= cf.len() {
        return Err(CfError::BadRun(format!(
            "run of {run_length} after index {position} does not fit in {cf}"
        )));
    }
    let two = BigInt::from(2);
    if cf.0[position + 1..t_idx].iter().any(|a| *a != two) {
        return Err(CfError::BadRun(format!(
            "entries {}..{} of {cf} are not all 2",
            position + 1,
            t_idx
        )));
    }
    let mut out = Vec::with_capacity(cf.len() + 1 - run_length);
    out.extend_from_slice(&cf.0[..position]);
    out.push(&cf.0[position] - 1);
    out.push(-BigInt::from(run_length as u64 + 1));
    out.push(&cf.0[t_idx] - 1);
    out.extend_from_slice(&cf.0[t_idx + 1..]);
    Ok(NegCF(out))
}

/// `[.., s, 2^[t]] = [.., s-1, -(t+1)]` for a trailing run of `run_length` 2's.
pub fn hj_rewrite_tail(cf: &NegCF, run_length: usize) -> Result<NegCF, CfError> {
    if run_length + 1 > cf.len() {
        return Err(CfError::BadRun(format!(
            "tail run of {run_length} needs a preceding entry in {cf}"
        )));
    }
    let s_idx = cf.len() - run_length - 1;
    let two = BigInt::from(2);
    if cf.0[s_idx + 1..].iter().any(|a| *a != two) {
        return Err(CfError::BadRun(format!("last {run_length} entries of {cf} are not all 2")));
    }
    let mut out = cf.0[..s_idx].to_vec();
    out.push(&cf.0[s_idx] - 1);
    out.push(-BigInt::from(run_length as u64 + 1));
    Ok(NegCF(out))
}

/// Vertex weights of the plumbing read off the band surface of the
/// Montesinos link, from the plus expansion of `p/(q-p)`.
///
/// A single-band input `[b_1]` yields `[b_1 + 2]`: the first band and the
/// last band coincide, and this is the only value compatible with
/// `neg_eval(result) = pos_eval(b) + 2`.
pub fn montesinos_coeffs(b: &PosCF) -> Result<NegCF, CfError> {
    let m = b.len();
    if m == 0 {
        return Err(CfError::Empty);
    }
    if b.0[0].is_negative() {
        return Err(CfError::SignCondition(format!("b_1 < 0 in {b}")));
    }
    if b.0[1..].iter().any(|x| !x.is_positive()) {
        return Err(CfError::SignCondition(format!("non-positive b_i (i > 1) in {b}")));
    }

    let two = BigInt::from(2);
    let mut out = Vec::new();
    if m == 1 {
        out.push(&b.0[0] + 2);
    } else {
        for (i, bi) in b.0.iter().enumerate() {
            let one_based = i + 1;
            if one_based % 2 == 0 {
                // b_{2k} contributes b_{2k} - 1 bands with two half-twists; empty runs vanish.
                let count = (bi - 1u32)
                    .to_usize()
                    .ok_or_else(|| CfError::SignCondition(format!("run length overflow in {b}")))?;
                out.extend(std::iter::repeat(two.clone()).take(count));
            } else if one_based == 1 {
                out.push(bi + 3);
            } else if one_based == m {
                out.push(bi + 1);
            } else {
                out.push(bi + 2);
            }
        }
    }
    let result = NegCF(out);

    let lhs = neg_eval(&result)?;
    let rhs = pos_eval(b)?;
    let expected = Rational(rhs.0 + BigRational::from_integer(two));
    if lhs != expected {
        return Err(CfError::SignCondition(format!(
            "band weights {result} evaluate to {lhs}, expected {expected}"
        )));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn neg(c: &[i64]) -> NegCF {
        NegCF::from_i64s(c)
    }

    #[test]
    fn neg_expand_examples() {
        assert_eq!(neg_expand(&r(19, 8)).unwrap(), neg(&[3, 2, 3, 2]));
        assert_eq!(neg_expand(&r(5, 1)).unwrap(), neg(&[5]));
        assert_eq!(neg_expand(&r(11, 2)).unwrap(), neg(&[6, 2]));
    }

    #[test]
    fn neg_expand_rejects_at_most_one() {
        assert!(matches!(neg_expand(&r(1, 1)), Err(CfError::NotAboveOne(_))));
        assert!(matches!(neg_expand(&r(1, 2)), Err(CfError::NotAboveOne(_))));
        assert!(matches!(neg_expand(&r(-7, 3)), Err(CfError::NotAboveOne(_))));
    }

    #[test]
    fn neg_eval_examples() {
        assert_eq!(neg_eval(&neg(&[3, 2, 3, 2])).unwrap(), r(19, 8));
        assert_eq!(neg_eval(&neg(&[7])).unwrap(), r(7, 1));
        assert_eq!(neg_eval(&neg(&[2, -3])).unwrap(), r(7, 3));
        assert_eq!(neg_eval(&neg(&[3, 2, 2])).unwrap(), r(7, 3));
    }

    #[test]
    fn neg_eval_degenerate() {
        // 1 - 1/1 = 0 in the tail, then division by zero
        assert!(matches!(neg_eval(&neg(&[2, 1, 1])), Err(CfError::Degenerate(_))));
        assert!(matches!(neg_eval(&neg(&[3, 0])), Err(CfError::Degenerate(_))));
        assert!(matches!(neg_eval(&NegCF(vec![])), Err(CfError::Empty)));
    }

    #[test]
    fn pos_examples() {
        assert_eq!(pos_expand(&r(7, 2)).unwrap(), PosCF::from_i64s(&[3, 2]));
        assert_eq!(pos_expand(&r(1, 9)).unwrap(), PosCF::from_i64s(&[0, 9]));
        assert_eq!(pos_expand(&r(5, 3)).unwrap(), PosCF::from_i64s(&[1, 1, 2]));
        assert_eq!(pos_eval(&PosCF::from_i64s(&[1, 1, 2])).unwrap(), r(5, 3));
        assert!(matches!(pos_expand(&r(0, 1)), Err(CfError::NotPositive(_))));
        assert!(matches!(pos_expand(&r(-2, 5)), Err(CfError::NotPositive(_))));
    }

    #[test]
    fn rewrite_tail_example() {
        let out = hj_rewrite_tail(&neg(&[3, 2, 2]), 2).unwrap();
        assert_eq!(out, neg(&[2, -3]));
        assert_eq!(neg_eval(&out).unwrap(), r(7, 3));
    }

    #[test]
    fn rewrite_interior_examples() {
        let cf = neg(&[4, 2, 3]);
        let out = hj_rewrite_interior(&cf, 0, 1).unwrap();
        assert_eq!(out, neg(&[3, -2, 2]));
        assert_eq!(neg_eval(&out).unwrap(), r(17, 5));
        assert_eq!(neg_eval(&cf).unwrap(), r(17, 5));

        // empty run: [r, t] -> [r-1, -1, t-1]
        let cf = neg(&[5, 4]);
        let out = hj_rewrite_interior(&cf, 0, 0).unwrap();
        assert_eq!(out, neg(&[4, -1, 3]));
        assert_eq!(neg_eval(&out).unwrap(), neg_eval(&cf).unwrap());
    }

    #[test]
    fn rewrite_rejects_malformed_runs() {
        assert!(hj_rewrite_interior(&neg(&[4, 3, 3]), 0, 1).is_err());
        assert!(hj_rewrite_interior(&neg(&[4, 2]), 0, 1).is_err());
        assert!(hj_rewrite_tail(&neg(&[3, 3, 2]), 2).is_err());
        assert!(hj_rewrite_tail(&neg(&[2, 2]), 2).is_err());
    }

    #[test]
    fn montesinos_examples() {
        assert_eq!(montesinos_coeffs(&PosCF::from_i64s(&[3, 2])).unwrap(), neg(&[6, 2]));
        assert_eq!(montesinos_coeffs(&PosCF::from_i64s(&[1, 1, 2])).unwrap(), neg(&[4, 3]));
        // q - p = 1: p/(q-p) = p is an integer
        assert_eq!(montesinos_coeffs(&PosCF::from_i64s(&[5])).unwrap(), neg(&[7]));
        // 3/8 for (p, q) = (3, 11)
        assert_eq!(
            montesinos_coeffs(&PosCF::from_i64s(&[0, 2, 1, 2])).unwrap(),
            neg(&[3, 2, 3, 2])
        );
    }

    #[test]
    fn montesinos_sign_conditions() {
        assert!(matches!(
            montesinos_coeffs(&PosCF::from_i64s(&[-1, 2])),
            Err(CfError::SignCondition(_))
        ));
        assert!(matches!(
            montesinos_coeffs(&PosCF::from_i64s(&[1, 0, 2])),
            Err(CfError::SignCondition(_))
        ));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!("19/8".parse::<Rational>().unwrap(), r(19, 8));
        assert_eq!("6/4".parse::<Rational>().unwrap(), r(3, 2));
        assert_eq!("5".parse::<Rational>().unwrap(), r(5, 1));
        assert_eq!("3/-6".parse::<Rational>().unwrap(), r(-1, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x/2".parse::<Rational>().is_err());
    }
}
