//! The realizable families of `P(p, q)` with `q > p`, the changemaker rows
//! that generate them, their verification, and the exhaustive census.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_integer::{Integer, Roots};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::changemaker::{
    complement_gram, enumerate_changemakers, standard_basis, supp, Changemaker, ChangemakerError, StandardBasis,
};
use crate::contfrac::{neg_eval, NegCF, Rational};
use crate::ctype::{chain_gram, ctype_coefficients, decide_ctype, CTypeError, CTypeMatch, GraphDiagnostics};
use crate::isometry::invert_unimodular;
use crate::lattice::LatticeVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("p must be odd and greater than 1, got {0}")]
    BadP(i64),
    #[error("need coprime q > p, got p = {p}, q = {q}")]
    BadQ { p: i64, q: i64 },
    #[error("row {row}: parameters (s = {s}, t = {t}) out of range")]
    OutOfRange { row: &'static str, s: i64, t: i64 },
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error(transparent)]
    CType(#[from] CTypeError),
    #[error(transparent)]
    Changemaker(#[from] ChangemakerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "1A")]
    F1A,
    #[serde(rename = "1B")]
    F1B,
    #[serde(rename = "2")]
    F2,
    #[serde(rename = "3A")]
    F3A,
    #[serde(rename = "3B")]
    F3B,
    #[serde(rename = "4")]
    F4,
    #[serde(rename = "5")]
    F5,
    Sporadic,
}

impl Family {
    pub const ALL: [Family; 8] =
        [Family::F1A, Family::F1B, Family::F2, Family::F3A, Family::F3B, Family::F4, Family::F5, Family::Sporadic];

    pub fn name(self) -> &'static str {
        match self {
            Family::F1A => "1A",
            Family::F1B => "1B",
            Family::F2 => "2",
            Family::F3A => "3A",
            Family::F3B => "3B",
            Family::F4 => "4",
            Family::F5 => "5",
            Family::Sporadic => "Sporadic",
        }
    }

    pub fn has_r(self) -> bool {
        !matches!(self, Family::F1A | Family::F1B | Family::Sporadic)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub family: Family,
    pub params: BTreeMap<String, i64>,
    pub p: i64,
    pub q: i64,
}

impl FamilyRecord {
    pub fn r(&self) -> Option<i64> {
        self.params.get("r").copied()
    }
}

/// `q` from the family's closed form, when `(p, r)` satisfies every range,
/// congruence and exclusion condition and the division is exact.
pub fn family_q(family: Family, p: i64, r: Option<i64>) -> Option<i64> {
    if p <= 1 || p % 2 == 0 {
        return None;
    }
    let (p, r) = (p as i128, r.map(|r| r as i128));
    let exact = |num: i128, den: i128| (den != 0 && num % den == 0).then(|| num / den);
    let q = match (family, r) {
        (Family::F1A, None) => exact(p * p + 3 * p + 4, 2),
        (Family::F1B, None) => {
            if ![3, 5].contains(&(p % 22)) || p == 3 || p == 5 {
                return None;
            }
            exact(p * p + 3 * p + 4, 22)
        }
        (Family::F2, Some(r)) => {
            let m = (4 * r + 2).abs();
            if r.rem_euclid(4) != 3 || [-5, -1, 3].contains(&r) || (p - (-2 * r + 3)).rem_euclid(m) != 0 {
                return None;
            }
            exact(r * r * p - 1, m)
        }
        (Family::F3A, Some(r)) => {
            if r < 5 || r % 2 == 0 || (p - 1).rem_euclid(2 * r) != 0 || p == 2 * r + 1 {
                return None;
            }
            exact((p - 1) * (p - 4), 2 * r)
        }
        (Family::F3B, Some(r)) => {
            if r < 1 || r % 2 == 0 || (p - r - 4).rem_euclid(2 * r) != 0 || p <= r + 4 {
                return None;
            }
            exact((p - 1) * (p - 4), 2 * r)
        }
        (Family::F4, Some(r)) => {
            let m = 2 * r * r;
            if r % 2 == 0 || r == 1 || r == -1 || (p - (-4 * r + 1)).rem_euclid(m) != 0 {
                return None;
            }
            exact((2 * r + 1) * (2 * r + 1) * p - 1, m)
        }
        (Family::F5, Some(r)) => {
            let m = r * r - 2 * r - 1;
            if r <= 1 || r % 2 == 0 || (p - (-2 * r + 5)).rem_euclid(m) != 0 {
                return None;
            }
            exact(r * r * p - 1, m)
        }
        (Family::Sporadic, None) => match p {
            11 => Some(19),
            13 => Some(34),
            _ => None,
        },
        _ => None,
    }?;
    let q = i64::try_from(q).ok()?;
    (q > p as i64).then_some(q)
}

/// Integer roots of `a x² + b x + c`.
fn integer_roots(a: i128, b: i128, c: i128) -> Vec<i128> {
    if a == 0 {
        return if b != 0 && c % b == 0 { vec![-c / b] } else { Vec::new() };
    }
    let d = b * b - 4 * a * c;
    if d < 0 {
        return Vec::new();
    }
    let s = d.sqrt();
    if s * s != d {
        return Vec::new();
    }
    let mut out: Vec<i128> =
        [-b + s, -b - s].into_iter().filter(|n| n % (2 * a) == 0).map(|n| n / (2 * a)).collect();
    out.dedup();
    out
}

/// Every `r` that could witness `(p, q)` in `family`, by solving the closed
/// form for `r` exactly.
fn r_candidates(family: Family, p: i64, q: i64) -> Vec<i64> {
    let (p, q) = (p as i128, q as i128);
    let roots = match family {
        Family::F2 => {
            let mut v: Vec<i128> = integer_roots(p, -4 * q, -(2 * q + 1)).into_iter().filter(|&r| r >= 0).collect();
            v.extend(integer_roots(p, 4 * q, 2 * q - 1).into_iter().filter(|&r| r < 0));
            v
        }
        Family::F3A | Family::F3B => {
            let num = (p - 1) * (p - 4);
            if num % (2 * q) == 0 { vec![num / (2 * q)] } else { Vec::new() }
        }
        Family::F4 => integer_roots(4 * p - 2 * q, 4 * p, p - 1),
        Family::F5 => integer_roots(q - p, -2 * q, -(q - 1)),
        _ => Vec::new(),
    };
    roots.into_iter().filter_map(|r| i64::try_from(r).ok()).collect()
}

/// All families, with all witnessing parameters, that contain `P(p, q)`.
pub fn classify(p: i64, q: i64) -> Result<Vec<FamilyRecord>, FamilyError> {
    if p <= 1 || p % 2 == 0 {
        return Err(FamilyError::BadP(p));
    }
    if q <= p || p.gcd(&q) != 1 {
        return Err(FamilyError::BadQ { p, q });
    }
    let mut out = BTreeSet::new();
    for family in Family::ALL {
        if family.has_r() {
            for r in r_candidates(family, p, q) {
                if family_q(family, p, Some(r)) == Some(q) {
                    out.insert(record(family, Some(r), p, q));
                }
            }
        } else if family_q(family, p, None) == Some(q) {
            out.insert(record(family, None, p, q));
        }
    }
    Ok(out.into_iter().collect())
}

fn record(family: Family, r: Option<i64>, p: i64, q: i64) -> FamilyRecord {
    let params = r.map(|r| BTreeMap::from([("r".to_string(), r)])).unwrap_or_default();
    FamilyRecord { family, params, p, q }
}

/// A vertex-basis element: `Σ coef · v_index`.
pub type Combination = Vec<(i64, usize)>;

#[derive(Clone, Copy, Debug)]
enum Seg {
    One(i64),
    /// `x^{[k]}`; `k = -1` truncates the sequence at this element and the
    /// one before it.
    Rep(i64, i64),
}

fn expand_norms(segs: &[Seg]) -> Vec<i64> {
    let mut out = Vec::new();
    for seg in segs {
        match *seg {
            Seg::One(x) => out.push(x),
            Seg::Rep(x, k) if k >= 0 => out.extend(std::iter::repeat(x).take(k as usize)),
            Seg::Rep(_, _) => {
                out.pop();
                break;
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowInstance {
    pub row_id: String,
    pub s: i64,
    pub t: i64,
    pub sigma: Vec<i64>,
    /// `x_1, …, x_n` as combinations of the standard basis.
    pub vertex_basis: Vec<Combination>,
    pub norms: Vec<i64>,
    pub p: i64,
    pub q: i64,
    pub family: Family,
    pub r: Option<i64>,
}

struct Raw {
    sigma: Vec<i64>,
    basis: Vec<Combination>,
    norms: Vec<Seg>,
    p: i64,
    q: i64,
    r: Option<i64>,
}

#[derive(Clone, Copy)]
pub struct Table3Row {
    pub id: &'static str,
    pub part: u8,
    pub family: Family,
    /// Least admissible `s`, or `None` when the row has no `s`.
    pub s_min: Option<i64>,
    pub t_min: Option<i64>,
    gen: fn(i64, i64) -> Raw,
}

impl fmt::Debug for Table3Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Table3Row").field("id", &self.id).field("family", &self.family).finish()
    }
}

impl Table3Row {
    pub fn in_range(&self, s: i64, t: i64) -> bool {
        let ok = |min: Option<i64>, x: i64| match min {
            Some(m) => x >= m,
            None => x == 0,
        };
        ok(self.s_min, s) && ok(self.t_min, t)
    }

    pub fn generate(&self, s: i64, t: i64) -> Result<RowInstance, FamilyError> {
        if !self.in_range(s, t) {
            return Err(FamilyError::OutOfRange { row: self.id, s, t });
        }
        let raw = (self.gen)(s, t);
        Ok(RowInstance {
            row_id: self.id.to_string(),
            s,
            t,
            sigma: raw.sigma,
            vertex_basis: raw.basis,
            norms: expand_norms(&raw.norms),
            p: raw.p,
            q: raw.q,
            family: self.family,
            r: raw.r,
        })
    }

    /// Admissible `(s, t)` with both at most `max`.
    pub fn params_up_to(&self, max: i64) -> Vec<(i64, i64)> {
        let range = |min: Option<i64>| match min {
            Some(m) => (m..=max.max(m)).collect::<Vec<_>>(),
            None => vec![0],
        };
        let mut out = Vec::new();
        for s in range(self.s_min) {
            for t in range(self.t_min) {
                out.push((s, t));
            }
        }
        out
    }
}

fn sig(parts: &[(i64, i64)]) -> Vec<i64> {
    parts.iter().flat_map(|&(x, k)| std::iter::repeat(x).take(k.max(0) as usize)).collect()
}

fn v(i: i64) -> Combination {
    vec![(1, i as usize)]
}

fn nv(i: i64) -> Combination {
    vec![(-1, i as usize)]
}

/// `v_[a,b]`
fn vr(a: i64, b: i64) -> Combination {
    (a..=b).map(|i| (1, i as usize)).collect()
}

fn plus(parts: &[Combination]) -> Combination {
    parts.concat()
}

fn minus(c: Combination) -> Combination {
    c.into_iter().map(|(k, i)| (-k, i)).collect()
}

/// `±v_a, …, ±v_b` listed in the written direction; empty when the range is.
fn run(sign: i64, a: i64, b: i64) -> Vec<Combination> {
    let idx: Vec<i64> = if a <= b { (a..=b).collect() } else { Vec::new() };
    idx.into_iter().map(|i| vec![(sign, i as usize)]).collect()
}

fn run_down(sign: i64, hi: i64, lo: i64) -> Vec<Combination> {
    let idx: Vec<i64> = if lo <= hi { (lo..=hi).rev().collect() } else { Vec::new() };
    idx.into_iter().map(|i| vec![(sign, i as usize)]).collect()
}

fn list(parts: Vec<Vec<Combination>>) -> Vec<Combination> {
    parts.concat()
}

use Seg::{One, Rep};

/// All rows of the changemaker table, in order.
pub fn table3_rows() -> Vec<Table3Row> {
    vec![
        Table3Row {
            id: "I.1",
            part: 2,
            family: Family::F1A,
            s_min: Some(2),
            t_min: None,
            gen: |s, _| Raw {
                sigma: sig(&[(1, 2), (2, s), (2 * s - 1, 1), (2 * s + 1, 1)]),
                basis: list(vec![run(-1, 2, s + 1), vec![vr(3, s + 2), v(1)]]),
                norms: vec![One(3), Rep(2, s - 1), One(s + 1), One(2)],
                p: 2 * s - 1,
                q: 2 * s * s + s + 1,
                r: None,
            },
        },
        Table3Row {
            id: "I.2",
            part: 2,
            family: Family::F1B,
            s_min: Some(1),
            t_min: None,
            gen: |s, _| Raw {
                sigma: sig(&[(1, 2), (2, s), (2 * s + 1, 1), (2 * s + 3, 1), (4 * s + 4, 1), (8 * s + 10, 1)]),
                basis: list(vec![run(-1, 2, s + 1), vec![nv(s + 5), v(s + 4), v(s + 2), v(1)]]),
                norms: vec![One(3), Rep(2, s - 1), One(5), One(3), One(s + 2), One(2)],
                p: 22 * s + 25,
                q: 22 * s * s + 53 * s + 32,
                r: None,
            },
        },
        Table3Row {
            id: "I.3",
            part: 2,
            family: Family::F1B,
            s_min: Some(1),
            t_min: None,
            gen: |s, _| Raw {
                sigma: sig(&[(1, 2), (2, s), (2 * s + 1, 1), (2 * s + 3, 1), (4 * s + 6, 1), (8 * s + 10, 1)]),
                basis: list(vec![run(-1, 2, s + 1), vec![nv(s + 4), v(s + 5), v(s + 2), v(1)]]),
                norms: vec![One(3), Rep(2, s - 1), One(4), One(4), One(s + 2), One(2)],
                p: 22 * s + 27,
                q: 22 * s * s + 57 * s + 37,
                r: None,
            },
        },
        Table3Row {
            id: "I.4",
            part: 2,
            family: Family::F4,
            s_min: Some(1),
            t_min: Some(0),
            gen: |s, t| {
                let r = 2 * s + 3;
                Raw {
                    sigma: sig(&[(1, 2), (2, 1), (3, 1), (5, 1), (8, s), (8 * s + 6, 1), (8 * s + 14, t)]),
                    basis: list(vec![
                        vec![nv(2), v(s + 5), v(1), minus(plus(&[v(3), v(1)]))],
                        run(-1, 5, s + 4),
                        run(-1, s + 6, s + t + 5),
                    ]),
                    norms: vec![One(3), One(s + 3), One(2), One(3), One(3), Rep(2, s - 1), One(3), Rep(2, t - 1)],
                    p: 2 * r * r * (t + 1) - 4 * r + 1,
                    q: (2 * r + 1) * (2 * r + 1) * (t + 1) - 8 * r - 6,
                    r: Some(r),
                }
            },
        },
        Table3Row {
            id: "I.5",
            part: 2,
            family: Family::F4,
            s_min: None,
            t_min: Some(0),
            gen: |_, t| Raw {
                sigma: sig(&[(1, 2), (2, 1), (3, 1), (5, 1), (6, 1), (14, t)]),
                basis: list(vec![vec![nv(2), plus(&[v(1), v(5)]), nv(1), nv(3)], run(-1, 6, t + 5)]),
                norms: vec![One(3), One(3), One(2), One(3), One(4), Rep(2, t - 1)],
                p: 18 * t + 7,
                q: 49 * t + 19,
                r: Some(3),
            },
        },
        Table3Row {
            id: "I.6",
            part: 2,
            family: Family::F3B,
            s_min: Some(1),
            t_min: Some(1),
            gen: |s, t| {
                let r = 2 * t + 1;
                Raw {
                    sigma: sig(&[(1, 2), (2, s), (2 * s + 3, 1), (2 * s + 5, 1), (4 * s + 6, t)]),
                    basis: list(vec![
                        run(-1, 2, s + 1),
                        vec![plus(&[vr(1, s + 1), vr(s + 4, s + t + 3), nv(s + 2)])],
                        run_down(-1, s + t + 3, s + 4),
                        vec![nv(1)],
                    ]),
                    norms: vec![One(3), Rep(2, s - 1), One(4), Rep(2, t - 1), One(s + 3), One(2)],
                    p: 2 * r * (s + 1) + r + 4,
                    q: (2 * r * s + 3 * (r + 1)) * (2 * s + 3) / 2,
                    r: Some(r),
                }
            },
        },
        Table3Row {
            id: "I.7",
            part: 2,
            family: Family::F3B,
            s_min: Some(1),
            t_min: None,
            gen: |s, _| Raw {
                sigma: sig(&[(1, 2), (2, s), (2 * s + 3, 1), (2 * s + 5, 1)]),
                basis: list(vec![run(-1, 2, s + 1), vec![plus(&[vr(1, s + 1), nv(s + 2)]), nv(1)]]),
                norms: vec![One(3), Rep(2, s - 1), One(s + 5), One(2)],
                p: 2 * s + 7,
                q: (s + 3) * (2 * s + 3),
                r: Some(1),
            },
        },
        Table3Row {
            id: "I.8",
            part: 2,
            family: Family::F3A,
            s_min: Some(1),
            t_min: Some(1),
            gen: |s, t| {
                let r = 2 * t + 3;
                Raw {
                    sigma: sig(&[(1, 2), (2, s), (2 * s + 3, 1), (2 * s + 5, 1), (4 * s + 6, 1), (4 * s + 8, t)]),
                    basis: list(vec![
                        run(-1, 2, s + 1),
                        run(-1, s + 5, s + t + 4),
                        vec![plus(&[vr(1, s + 1), vr(s + 4, s + t + 4), nv(s + 2)]), nv(s + 4), nv(1)],
                    ]),
                    norms: vec![One(3), Rep(2, s - 1), One(3), Rep(2, t - 1), One(3), One(s + 3), One(2)],
                    p: 2 * r * (s + 2) + 1,
                    q: (s + 2) * (2 * r * (s + 2) - 3),
                    r: Some(r),
                }
            },
        },
        Table3Row {
            id: "I.9",
            part: 2,
            family: Family::F3B,
            s_min: None,
            t_min: Some(1),
            gen: |_, t| Raw {
                sigma: sig(&[(1, 2), (3, 1), (5, 1), (6, t)]),
                basis: list(vec![
                    vec![plus(&[v(1), vr(4, t + 3), nv(2)])],
                    run_down(-1, t + 3, 4),
                    vec![nv(1)],
                ]),
                norms: vec![One(5), Rep(2, t - 1), One(3), One(2)],
                p: 6 * t + 7,
                q: 9 * t + 9,
                r: Some(2 * t + 1),
            },
        },
        Table3Row {
            id: "I.10",
            part: 2,
            family: Family::F3B,
            s_min: None,
            t_min: None,
            gen: |_, _| Raw {
                sigma: vec![1, 1, 3, 5],
                basis: vec![nv(2), v(1)],
                norms: vec![One(6), One(2)],
                p: 7,
                q: 9,
                r: Some(1),
            },
        },
        Table3Row {
            id: "I.11",
            part: 2,
            family: Family::F3A,
            s_min: None,
            t_min: Some(0),
            gen: |_, t| Raw {
                sigma: sig(&[(1, 2), (3, 1), (5, 1), (6, 1), (8, t + 1)]),
                basis: list(vec![
                    run(-1, 5, t + 5),
                    vec![plus(&[v(1), vr(4, t + 5), nv(2)]), nv(4), nv(1)],
                ]),
                norms: vec![One(4), Rep(2, t), One(3), One(3), One(2)],
                p: 8 * t + 21,
                q: 16 * t + 34,
                r: Some(2 * t + 5),
            },
        },
        Table3Row {
            id: "I.12",
            part: 3,
            family: Family::F5,
            s_min: Some(0),
            t_min: Some(0),
            gen: |s, t| {
                let r = 2 * t + 5;
                Raw {
                    sigma: sig(&[(1, 3), (3, 1), (4, 1), (4, t), (4 * t + 6, 1), (4 * t + 10, s)]),
                    basis: list(vec![
                        vec![nv(t + 5), nv(1), nv(2)],
                        run(-1, 4, t + 4),
                        run(-1, t + 6, t + s + 5),
                    ]),
                    norms: vec![One(t + 4), One(2), One(2), One(3), Rep(2, t), One(3), Rep(2, s - 1)],
                    p: (r * r - 2 * r - 1) * (s + 1) - 2 * r + 5,
                    q: r * r * (s + 1) - 2 * r + 1,
                    r: Some(r),
                }
            },
        },
        Table3Row {
            id: "I.13",
            part: 3,
            family: Family::F1B,
            s_min: None,
            t_min: None,
            gen: |_, _| Raw {
                sigma: vec![1, 1, 1, 3, 4, 10],
                basis: vec![nv(5), v(4), v(2), v(1)],
                norms: vec![One(6), One(3), One(2), One(2)],
                p: 25,
                q: 32,
                r: None,
            },
        },
        Table3Row {
            id: "I.14",
            part: 3,
            family: Family::F1B,
            s_min: None,
            t_min: None,
            gen: |_, _| Raw {
                sigma: vec![1, 1, 1, 3, 6, 10],
                basis: vec![nv(4), v(5), v(2), v(1)],
                norms: vec![One(5), One(4), One(2), One(2)],
                p: 27,
                q: 37,
                r: None,
            },
        },
        Table3Row {
            id: "I.15",
            part: 3,
            family: Family::F5,
            s_min: None,
            t_min: Some(1),
            gen: |_, t| Raw {
                sigma: sig(&[(1, 3), (2, 1), (3, 1), (6, t)]),
                basis: list(vec![vec![nv(3), nv(1), nv(2)], run(-1, 5, t + 4)]),
                norms: vec![One(3), One(2), One(2), One(4), Rep(2, t - 1)],
                p: 2 * t + 1,
                q: 9 * t + 4,
                r: Some(3),
            },
        },
        Table3Row {
            id: "I.16",
            part: 3,
            family: Family::Sporadic,
            s_min: None,
            t_min: None,
            gen: |_, _| Raw {
                sigma: vec![1, 2, 3, 4, 5, 9],
                basis: vec![nv(3), plus(&[vr(3, 4), nv(1)]), nv(4), v(2)],
                norms: vec![One(3), One(3), One(3), One(3)],
                p: 13,
                q: 34,
                r: None,
            },
        },
        Table3Row {
            id: "I.17",
            part: 3,
            family: Family::F4,
            s_min: Some(1),
            t_min: Some(0),
            gen: |s, t| {
                let r = -3 - 2 * s;
                Raw {
                    sigma: sig(&[(1, 1), (2, 1), (3, 2), (7, 1), (8, s), (8 * s + 10, t)]),
                    basis: list(vec![
                        vec![plus(&[vr(5, s + 4), nv(1)])],
                        run_down(-1, s + 4, 5),
                        vec![v(2), v(3)],
                        run(1, s + 5, s + t + 4),
                    ]),
                    norms: vec![One(4), Rep(2, s - 1), One(3), One(3), One(2), One(s + 3), Rep(2, t - 1)],
                    p: 2 * r * r * t - 4 * r + 1,
                    q: t * (2 * r + 1) * (2 * r + 1) - 8 * r - 6,
                    r: Some(r),
                }
            },
        },
        Table3Row {
            id: "I.18",
            part: 3,
            family: Family::F4,
            s_min: None,
            t_min: Some(0),
            gen: |_, t| Raw {
                sigma: sig(&[(1, 1), (2, 1), (3, 2), (7, 1), (10, t)]),
                basis: list(vec![vec![nv(1), v(2), v(3)], run(1, 5, t + 4)]),
                norms: vec![One(5), One(3), One(2), One(3), Rep(2, t - 1)],
                p: 18 * t + 13,
                q: 25 * t + 18,
                r: Some(-3),
            },
        },
        Table3Row {
            id: "I.19",
            part: 3,
            family: Family::F2,
            s_min: Some(1),
            t_min: Some(0),
            gen: |s, t| {
                let r = -5 - 4 * s;
                Raw {
                    sigma: sig(&[(1, 1), (2, 1), (3, 1), (4, s), (4 * s + 3, 1), (4 * s + 7, 1), (8 * s + 10, t)]),
                    basis: list(vec![
                        run(-1, 3, s + 2),
                        vec![plus(&[vr(3, s + 2), nv(1)]), v(2), v(s + 3)],
                        run(1, s + 5, s + t + 4),
                    ]),
                    norms: vec![One(3), Rep(2, s - 1), One(4), One(3), One(s + 2), One(3), Rep(2, t - 1)],
                    p: (-4 * r - 2) * t - 2 * r + 3,
                    q: r * r * t + (r * r - 2 * r + 1) / 2,
                    r: Some(r),
                }
            },
        },
        Table3Row {
            id: "I.20",
            part: 3,
            family: Family::Sporadic,
            s_min: None,
            t_min: None,
            gen: |_, _| Raw {
                sigma: vec![1, 2, 2, 3, 3, 7],
                basis: vec![plus(&[vr(3, 4), nv(1)]), nv(4), nv(3), nv(2)],
                norms: vec![One(4), One(2), One(3), One(2)],
                p: 11,
                q: 19,
                r: None,
            },
        },
        Table3Row {
            id: "I.21",
            part: 3,
            family: Family::F2,
            s_min: Some(1),
            t_min: Some(0),
            gen: |s, t| {
                let r = 7 + 4 * s;
                Raw {
                    sigma: sig(&[(1, 1), (2, 2), (3, 1), (4, s), (4 * s + 5, 1), (4 * s + 9, 1), (8 * s + 14, t)]),
                    basis: list(vec![
                        run(-1, 4, s + 3),
                        vec![plus(&[vr(3, s + 3), nv(1)]), nv(3), nv(2), nv(s + 4)],
                        run(-1, s + 6, s + t + 5),
                    ]),
                    norms: vec![One(3), Rep(2, s - 1), One(3), One(3), One(2), One(s + 3), One(3), Rep(2, t - 1)],
                    p: (4 * r + 2) * t + 2 * r + 5,
                    q: r * r * t + (r * r + 2 * r - 1) / 2,
                    r: Some(r),
                }
            },
        },
        Table3Row {
            id: "I.22",
            part: 3,
            family: Family::F2,
            s_min: None,
            t_min: Some(0),
            gen: |_, t| Raw {
                sigma: sig(&[(1, 1), (2, 2), (3, 1), (5, 1), (9, 1), (14, t)]),
                basis: list(vec![vec![plus(&[v(3), nv(1)]), nv(3), nv(2), nv(4)], run(-1, 6, t + 5)]),
                norms: vec![One(4), One(3), One(2), One(3), One(3), Rep(2, t - 1)],
                p: 30 * t + 19,
                q: 49 * t + 31,
                r: Some(7),
            },
        },
    ]
}

pub fn table3_row(id: &str) -> Option<Table3Row> {
    table3_rows().into_iter().find(|r| r.id == id)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Check {
    /// σ is a changemaker.
    A,
    /// The vertex basis, completed by `x_0`, has the C-type Gram matrix.
    B,
    /// The norms expand `(2q - p)/(q - p)`.
    C,
    /// `|σ|² = 4q`.
    D,
    /// The classifier places `(p, q)` in the row's family.
    E,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    pub row_id: String,
    pub s: i64,
    pub t: i64,
    pub sigma: Vec<i64>,
    pub p: i64,
    pub q: i64,
    pub norms: Vec<i64>,
    /// Coordinates of `x_0` in `Z^{n+2}` when one was found.
    pub x0: Option<Vec<i64>>,
    pub failure: Option<(Check, String)>,
}

impl RowReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn verify_row(row: &Table3Row, s: i64, t: i64) -> Result<RowReport, FamilyError> {
    Ok(verify_instance(&row.generate(s, t)?))
}

/// Runs checks (a)–(e) in order and stops at the first failure.
pub fn verify_instance(inst: &RowInstance) -> RowReport {
    let mut report = RowReport {
        row_id: inst.row_id.clone(),
        s: inst.s,
        t: inst.t,
        sigma: inst.sigma.clone(),
        p: inst.p,
        q: inst.q,
        norms: inst.norms.clone(),
        x0: None,
        failure: None,
    };
    let fail = |mut r: RowReport, c: Check, msg: String| {
        r.failure = Some((c, msg));
        r
    };

    let sigma = match Changemaker::new(inst.sigma.clone()) {
        Ok(s) if s.entries()[0] == 1 => s,
        Ok(_) => return fail(report, Check::A, "σ_0 ≠ 1".into()),
        Err(e) => return fail(report, Check::A, e.to_string()),
    };

    let basis = match standard_basis(&sigma) {
        Ok(b) => b,
        Err(e) => return fail(report, Check::B, e.to_string()),
    };
    match check_vertex_basis(&basis, inst) {
        Ok(x0) => report.x0 = Some(x0),
        Err(msg) => return fail(report, Check::B, msg),
    }

    match NegCF::from_i64s(&inst.norms).pipe(|cf| neg_eval(&cf)) {
        Ok(val) if val == Rational::new(2 * inst.q - inst.p, inst.q - inst.p) => {}
        Ok(val) => {
            let msg = format!("norms evaluate to {val}, expected ({}-{})/({}-{})", 2 * inst.q, inst.p, inst.q, inst.p);
            return fail(report, Check::C, msg);
        }
        Err(e) => return fail(report, Check::C, e.to_string()),
    }

    if sigma.norm() != 4 * inst.q {
        return fail(report, Check::D, format!("|σ|² = {} but 4q = {}", sigma.norm(), 4 * inst.q));
    }

    match classify(inst.p, inst.q) {
        Ok(recs) => {
            let hit = recs.iter().any(|rec| rec.family == inst.family && (inst.r.is_none() || rec.r() == inst.r));
            if !hit {
                let got: Vec<String> = recs.iter().map(|r| format!("{}{:?}", r.family, r.params)).collect();
                let msg = format!("expected family {} (r = {:?}), classifier gives {got:?}", inst.family, inst.r);
                return fail(report, Check::E, msg);
            }
        }
        Err(e) => return fail(report, Check::E, e.to_string()),
    }
    report
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}
impl<T> Pipe for T {}

/// Instantiates the vertex basis in `Z^{n+2}`, finds `x_0` and compares the
/// full Gram matrix with the chain. Returns `x_0`.
fn check_vertex_basis(basis: &StandardBasis, inst: &RowInstance) -> Result<Vec<i64>, String> {
    let dim = inst.sigma.len();
    let n = dim - 2;
    if inst.vertex_basis.len() != n || inst.norms.len() != n {
        return Err(format!(
            "need {n} vertices, got {} basis elements and {} norms",
            inst.vertex_basis.len(),
            inst.norms.len()
        ));
    }
    let mut xs = Vec::with_capacity(n);
    for comb in &inst.vertex_basis {
        let mut c = vec![0i64; n + 1];
        for &(k, i) in comb {
            if i == 0 || i > n + 1 {
                return Err(format!("v_{i} does not exist"));
            }
            c[i - 1] += k;
        }
        xs.push(basis.embed(&c));
    }
    let x0 = find_x0(&inst.sigma, &xs).ok_or("no x_0 in (σ)⊥ completes the chain")?;
    let mut all = vec![x0.clone()];
    all.extend(xs);
    let mut norms = vec![4];
    norms.extend_from_slice(&inst.norms);
    let want = chain_gram(&norms);
    for i in 0..=n {
        for j in 0..=n {
            let got = dot(&all[i], &all[j]);
            if got != want[i][j] {
                return Err(format!("⟨x_{i}, x_{j}⟩ = {got}, expected {}", want[i][j]));
            }
        }
    }
    Ok(x0)
}

/// `x_0 = e_a ± e_b ± e_c ± e_d` orthogonal to σ with `⟨x_0, x_1⟩ = -2` and
/// `⟨x_0, x_i⟩ = 0` for `i ≥ 2`.
fn find_x0(sigma: &[i64], xs: &[Vec<i64>]) -> Option<Vec<i64>> {
    let dim = sigma.len();
    for a in 0..dim {
        for b in a + 1..dim {
            for c in b + 1..dim {
                for d in c + 1..dim {
                    for signs in 0..8u8 {
                        let mut x = vec![0i64; dim];
                        x[a] = 1;
                        for (bit, &k) in [b, c, d].iter().enumerate() {
                            x[k] = if signs >> bit & 1 == 1 { -1 } else { 1 };
                        }
                        if dot(&x, sigma) != 0 {
                            continue;
                        }
                        let ok = xs.iter().enumerate().all(|(i, y)| dot(&x, y) == if i == 0 { -2 } else { 0 });
                        if ok {
                            return Some(x);
                        }
                    }
                }
            }
        }
    }
    None
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRef {
    pub family: Family,
    pub params: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub sigma: Vec<i64>,
    pub norm: i64,
    pub q: Option<i64>,
    pub is_ctype: bool,
    pub p: Option<i64>,
    pub vertex_norms: Option<Vec<i64>>,
    pub families: Vec<FamilyRef>,
    /// Columns are the vertex basis `x_0, …, x_n` in standard-basis
    /// coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Census {
    pub max_len: usize,
    pub max_norm: i64,
    pub records: Vec<CensusRecord>,
}

impl Census {
    pub fn realized(&self) -> BTreeSet<(i64, i64)> {
        self.records.iter().filter(|r| r.is_ctype).filter_map(|r| Some((r.p?, r.q?))).collect()
    }

    /// `(p, q)` that the classification predicts within the census bounds.
    pub fn expected(&self) -> BTreeSet<(i64, i64)> {
        expected_pairs(self.max_len, self.max_norm)
    }
}

/// Pairs in some family with `4q ≤ max_norm` whose chain fits in a
/// changemaker of length at most `max_len`.
pub fn expected_pairs(max_len: usize, max_norm: i64) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for q in 3..=max_norm / 4 {
        for p in (3..q).step_by(2) {
            if p.gcd(&q) != 1 || classify(p, q).map_or(true, |f| f.is_empty()) {
                continue;
            }
            if ctype_coefficients(p, q).is_ok_and(|a| a.len() + 2 <= max_len) {
                out.insert((p, q));
            }
        }
    }
    out
}

/// Decides every changemaker `σ` with `σ_0 = 1`, length `2..=max_len` and
/// `|σ|² ≤ max_norm`.
pub fn exhaustive_search(max_len: usize, max_norm: i64, keep_witness: bool) -> Result<Census, FamilyError> {
    let sigmas: Vec<Changemaker> = (2..=max_len).flat_map(|len| enumerate_changemakers(len, max_norm)).collect();
    let records = sigmas
        .par_iter()
        .map(|s| census_record(s, keep_witness))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Census { max_len, max_norm, records })
}

pub fn census_record(sigma: &Changemaker, keep_witness: bool) -> Result<CensusRecord, FamilyError> {
    let norm = sigma.norm();
    let mut rec = CensusRecord {
        sigma: sigma.entries().to_vec(),
        norm,
        q: (norm % 4 == 0).then_some(norm / 4),
        is_ctype: false,
        p: None,
        vertex_norms: None,
        families: Vec::new(),
        witness: None,
    };
    if rec.q.is_none() {
        return Ok(rec);
    }
    let gram = complement_gram(sigma)?;
    if let Some(m) = decide_ctype(&gram)? {
        rec.is_ctype = true;
        rec.p = Some(m.ctype.p);
        rec.q = Some(m.ctype.q);
        rec.vertex_norms = Some(m.ctype.norms[1..].to_vec());
        rec.families = classify(m.ctype.p, m.ctype.q)
            .unwrap_or_default()
            .into_iter()
            .map(|f| FamilyRef { family: f.family, params: f.params })
            .collect();
        if keep_witness {
            rec.witness = Some(m.isometry.matrix.clone());
        }
    }
    Ok(rec)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModifiedBasis {
    /// Index `k_3 = max supp x_0` in `Z^{n+2}`.
    pub k3: usize,
    pub x0: Vec<i64>,
    /// `S'` in vertex-basis coordinates, `x_0` first, then `v_j` for
    /// `j ≠ k_3` in order.
    pub elements: Vec<LatticeVector>,
    /// Standard-basis index of each element, `None` for `x_0`.
    pub labels: Vec<Option<usize>>,
    pub unbreakable: Vec<bool>,
}

/// `S' = (S \ {v_{k_3}}) ∪ {x_0}` read through a C-type witness.
pub fn modified_basis(sigma: &Changemaker, m: &CTypeMatch) -> Result<ModifiedBasis, FamilyError> {
    let basis = standard_basis(sigma)?;
    let x0_l = m.isometry.column(0);
    let x0 = basis.embed(&x0_l);
    let k3 = *supp(&x0).last().ok_or(CTypeError::Invariant("x_0 is zero".into()))?;
    let inv = invert_unimodular(&m.isometry.matrix).ok_or(CTypeError::Invariant("witness not unimodular".into()))?;
    let rank = m.ctype.rank();
    let mut elements = vec![unit(rank, 0)];
    let mut labels = vec![None];
    for j in 1..=rank {
        if j == k3 {
            continue;
        }
        elements.push((0..rank).map(|i| inv[i][j - 1]).collect());
        labels.push(Some(j));
    }
    let g = &m.ctype.gram;
    let unbreakable = elements
        .iter()
        .enumerate()
        .map(|(i, e)| Ok(i == 0 || !g.is_breakable(e)?))
        .collect::<Result<Vec<_>, crate::lattice::LatticeError>>()
        .map_err(CTypeError::from)?;
    Ok(ModifiedBasis { k3, x0, elements, labels, unbreakable })
}

/// Claw and heavy-triple diagnostics on the unbreakable part of `S'`.
pub fn modified_basis_diagnostics(
    sigma: &Changemaker,
    m: &CTypeMatch,
) -> Result<(ModifiedBasis, GraphDiagnostics), FamilyError> {
    let mb = modified_basis(sigma, m)?;
    let t: Vec<LatticeVector> =
        mb.elements.iter().zip(&mb.unbreakable).filter(|(_, &u)| u).map(|(e, _)| e.clone()).collect();
    let d = m.ctype.graph_diagnostics(&t)?;
    Ok((mb, d))
}

fn unit(n: usize, k: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[k] = 1;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fams(p: i64, q: i64) -> Vec<Family> {
        classify(p, q).unwrap().into_iter().map(|r| r.family).collect()
    }

    #[test]
    fn classify_examples() {
        let f = fams(5, 22);
        assert!(f.contains(&Family::F1A) && f.contains(&Family::F5));
        assert_eq!(fams(11, 19), vec![Family::Sporadic]);
        assert_eq!(fams(13, 34), vec![Family::Sporadic]);
        assert!(fams(5, 7).is_empty());
        assert!(classify(4, 7).is_err());
        assert!(classify(1, 7).is_err());
        assert!(classify(7, 5).is_err());
    }

    #[test]
    fn overlaps() {
        for s in 0..6 {
            let recs = classify(8 * s + 13, 16 * s + 18).unwrap();
            assert!(recs.iter().any(|r| r.family == Family::F4));
            assert!(recs.iter().any(|r| matches!(r.family, Family::F3A | Family::F3B)));
        }
        let f = fams(25, 36);
        assert!(f.contains(&Family::F3B) && f.contains(&Family::F5));
        let f = fams(43, 117);
        assert!(f.contains(&Family::F3A) && f.contains(&Family::F4));
    }

    #[test]
    fn truncation_rule() {
        assert_eq!(expand_norms(&[One(3), Rep(2, 1), One(4), One(3), Rep(2, -1)]), vec![3, 2, 4]);
        assert_eq!(expand_norms(&[One(3), Rep(2, 0), One(4)]), vec![3, 4]);
    }

    #[test]
    fn row_examples() {
        let i = table3_row("I.1").unwrap().generate(2, 0).unwrap();
        assert_eq!(i.sigma, vec![1, 1, 2, 2, 3, 5]);
        assert_eq!(i.norms, vec![3, 2, 3, 2]);
        assert_eq!((i.p, i.q), (3, 11));
        let i = table3_row("I.10").unwrap().generate(0, 0).unwrap();
        assert_eq!(i.sigma, vec![1, 1, 3, 5]);
        assert_eq!(i.vertex_basis, vec![vec![(-1, 2)], vec![(1, 1)]]);
        assert_eq!((i.norms.clone(), i.p, i.q), (vec![6, 2], 7, 9));
        let r = verify_instance(&i);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.x0, Some(vec![1, 1, 1, -1]));
        let i = table3_row("I.20").unwrap().generate(0, 0).unwrap();
        assert_eq!((i.sigma.clone(), i.norms.clone(), i.p, i.q), (vec![1, 2, 2, 3, 3, 7], vec![4, 2, 3, 2], 11, 19));
        assert!(table3_row("I.1").unwrap().generate(1, 0).is_err());
    }

    #[test]
    fn mutated_row_fails_b() {
        let mut i = table3_row("I.10").unwrap().generate(0, 0).unwrap();
        i.norms[0] = 7;
        assert_eq!(verify_instance(&i).failure.map(|f| f.0), Some(Check::B));
    }
}
