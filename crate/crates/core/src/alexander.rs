//! Torsion coefficients and the Alexander polynomial of a knot whose `4q`
//! surgery would realize `(σ)⊥`, obtained by minimizing `𝔠²` over
//! characteristic covectors in each residue class of `⟨𝔠, σ⟩` mod `8q`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::changemaker::Changemaker;

/// Growth steps allowed before the minimization is declared unstable.
pub const MAX_GROWTH_STEPS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlexanderError {
    #[error("|σ|² = {norm} but 4q = {four_q}")]
    NormMismatch { norm: i64, four_q: i64 },
    #[error("σ must have σ_0 = 1 and length at least 2")]
    Degenerate,
    #[error("minimum did not stabilize after {0} bound increases")]
    NotStabilized(usize),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionSequence {
    pub q: i64,
    /// `t_0, t_1, …` with trailing zeros trimmed.
    pub t: Vec<i64>,
}

impl TorsionSequence {
    pub fn new(q: i64, mut t: Vec<i64>) -> TorsionSequence {
        while t.last() == Some(&0) {
            t.pop();
        }
        TorsionSequence { q, t }
    }

    pub fn get(&self, i: usize) -> i64 {
        self.t.get(i).copied().unwrap_or(0)
    }
}

/// Per-coordinate bounds at which every residue-class minimum was already
/// attained and unchanged by one further growth step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationCertificate {
    pub bounds: Vec<i64>,
    pub growth_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionResult {
    pub torsion: TorsionSequence,
    pub certificate: StabilizationCertificate,
}

/// `Δ(T) = b_0 + Σ_{i>0} b_i (T^i + T^{-i})`; `b[i]` holds `b_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlexanderPolynomial {
    pub b: Vec<i64>,
}

impl AlexanderPolynomial {
    pub fn degree(&self) -> usize {
        self.b.iter().rposition(|&x| x != 0).unwrap_or(0)
    }

    pub fn eval_at_one(&self) -> i64 {
        self.b.first().copied().unwrap_or(0) + 2 * self.b.iter().skip(1).sum::<i64>()
    }

    /// Coefficients in `{-1, 0, 1}` whose nonzero terms alternate in sign
    /// from a leading `+1`.
    pub fn has_lspace_shape(&self) -> bool {
        let d = self.degree();
        let full: Vec<i64> = (0..=2 * d).map(|k| self.b[k.abs_diff(d)]).collect();
        let nz: Vec<i64> = full.into_iter().filter(|&x| x != 0).collect();
        nz.first() == Some(&1)
            && nz.iter().all(|x| x.abs() == 1)
            && nz.windows(2).all(|w| w[0] == -w[1])
    }
}

const INF: i64 = i64::MAX / 4;

/// Minimum of `Σ c_i²` over odd `c_i` with `|c_i| ≤ bounds[i]`, for every
/// residue of `Σ c_i σ_i` mod `modulus`.
fn residue_minima(sigma: &[i64], bounds: &[i64], modulus: i64) -> Vec<i64> {
    let m = modulus as usize;
    let mut cost = vec![INF; m];
    cost[0] = 0;
    for (&s, &b) in sigma.iter().zip(bounds) {
        let mut next = vec![INF; m];
        let mut c = -b;
        while c <= b {
            let shift = (c * s).rem_euclid(modulus) as usize;
            let add = c * c;
            for (r, &old) in cost.iter().enumerate() {
                if old < INF {
                    let tgt = (r + shift) % m;
                    let v = old + add;
                    if v < next[tgt] {
                        next[tgt] = v;
                    }
                }
            }
            c += 2;
        }
        cost = next;
    }
    cost
}

pub fn torsion_coefficients(sigma: &Changemaker, q: i64) -> Result<TorsionResult, AlexanderError> {
    let s = sigma.entries();
    if s.len() < 2 || s[0] != 1 || q < 1 {
        return Err(AlexanderError::Degenerate);
    }
    if sigma.norm() != 4 * q {
        return Err(AlexanderError::NormMismatch { norm: sigma.norm(), four_q: 4 * q });
    }
    let modulus = 8 * q;
    let targets: Vec<usize> = (0..=2 * q).map(|i| (2 * i - 4 * q).rem_euclid(modulus) as usize).collect();
    let mut bounds: Vec<i64> = s.iter().map(|&x| (2 * x + 1).max(3)).collect();
    let mut prev = residue_minima(s, &bounds, modulus);
    for step in 0..MAX_GROWTH_STEPS {
        let wider: Vec<i64> = bounds.iter().map(|b| b + 2).collect();
        let next = residue_minima(s, &wider, modulus);
        if prev == next && targets.iter().all(|&r| prev[r] < INF) {
            let dim = s.len() as i64;
            let mut t = Vec::with_capacity(targets.len());
            for &r in &targets {
                let num = prev[r] - dim;
                if num % 8 != 0 || num < 0 {
                    return Err(AlexanderError::Invariant(format!("(𝔠² - {dim}) = {num} is not a nonnegative multiple of 8")));
                }
                t.push(num / 8);
            }
            return Ok(TorsionResult {
                torsion: TorsionSequence::new(q, t),
                certificate: StabilizationCertificate { bounds, growth_steps: step },
            });
        }
        bounds = wider;
        prev = next;
    }
    Err(AlexanderError::NotStabilized(MAX_GROWTH_STEPS))
}

pub fn alexander_polynomial(t: &TorsionSequence) -> AlexanderPolynomial {
    let len = t.t.len() + 1;
    let mut b = vec![0i64; len.max(1)];
    for (i, bi) in b.iter_mut().enumerate().skip(1) {
        *bi = t.get(i - 1) - 2 * t.get(i) + t.get(i + 1);
    }
    b[0] = 1 - 2 * b.iter().skip(1).sum::<i64>();
    while b.len() > 1 && b.last() == Some(&0) {
        b.pop();
    }
    AlexanderPolynomial { b }
}

/// `t_k = Σ_{j ≥ 1} j · b_{k+j}`.
pub fn torsion_from_polynomial(poly: &AlexanderPolynomial, q: i64) -> TorsionSequence {
    let d = poly.b.len();
    let t = (0..d).map(|k| (1..d - k).map(|j| j as i64 * poly.b[k + j]).sum()).collect();
    TorsionSequence::new(q, t)
}
