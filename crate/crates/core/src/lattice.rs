//! Positive-definite integer lattices given by Gram matrices, and exact
//! short-vector enumeration.
//!
//! Enumeration is Fincke–Pohst over the fraction-free LDLᵀ decomposition:
//! with `Δ_k` the leading principal minors and `B` the Bareiss-eliminated
//! upper triangle, the quadratic form splits as
//! `Q(x) = Σ_k (Δ_{k+1} x_k + s_k)² / (Δ_k Δ_{k+1})`, `s_k = Σ_{j>k} B[k][j] x_j`.
//! The remaining budget is carried as an exact reduced fraction, so no
//! rounding can ever drop a vector.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type LatticeVector = Vec<i64>;

/// Leading minors above this are refused so that enumeration arithmetic
/// provably fits in `i128`.
pub const MAX_MINOR: i128 = 1_000_000_000;
/// Largest norm bound accepted by the enumerators.
pub const MAX_BOUND: i64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("Gram matrix is empty")]
    Empty,
    #[error("Gram matrix is not square (row {row} has length {len}, expected {rank})")]
    NotSquare { row: usize, len: usize, rank: usize },
    #[error("Gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("Gram matrix is not positive definite (leading minor {0} is {1})")]
    NotPositiveDefinite(usize, BigInt),
    #[error("leading minor {0} exceeds the supported range")]
    MinorTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("the zero vector has no decomposition")]
    ZeroVector,
    #[error("norm bound {0} out of range")]
    BadBound(i64),
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "GramRepr", into = "GramRepr")]
pub struct GramLattice {
    gram: Vec<Vec<i64>>,
    labels: Option<Vec<String>>,
    // Δ_0..Δ_n
    minors: Vec<i128>,
    // rows of the Bareiss elimination; elim[k][j] for j > k
    elim: Vec<Vec<i128>>,
}

#[derive(Serialize, Deserialize)]
struct GramRepr {
    gram: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<GramRepr> for GramLattice {
    type Error = LatticeError;
    fn try_from(r: GramRepr) -> Result<Self, Self::Error> {
        let l = GramLattice::new(r.gram)?;
        match r.labels {
            Some(labels) => l.with_labels(labels),
            None => Ok(l),
        }
    }
}

impl From<GramLattice> for GramRepr {
    fn from(l: GramLattice) -> Self {
        GramRepr { gram: l.gram, labels: l.labels }
    }
}

impl PartialEq for GramLattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for GramLattice {}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = gram.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(LatticeError::NotSquare { row: i, len: row.len(), rank: n });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
        }

        // Bareiss in BigInt first so that non-PD input is reported exactly
        // even when its minors would overflow.
        let mut m: Vec<Vec<BigInt>> =
            gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut prev = BigInt::one();
        let mut minors = vec![1i128];
        let mut elim = Vec::with_capacity(n);
        for k in 0..n {
            let pivot = m[k][k].clone();
            if !pivot.is_positive() {
                return Err(LatticeError::NotPositiveDefinite(k + 1, pivot));
            }
            let p128 = i128::try_from(&pivot).ok().filter(|&p| p <= MAX_MINOR);
            let p128 = p128.ok_or(LatticeError::MinorTooLarge(k + 1))?;
            minors.push(p128);
            let row: Vec<i128> = (0..n)
                .map(|j| if j > k { i128::try_from(&m[k][j]).map_err(|_| LatticeError::Overflow) } else { Ok(0) })
                .collect::<Result<_, _>>()?;
            elim.push(row);
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&pivot * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = v;
                }
            }
            prev = pivot;
        }
        Ok(GramLattice { gram, labels: None, minors, elim })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, LatticeError> {
        if labels.len() != self.rank() {
            return Err(LatticeError::Dimension { expected: self.rank(), got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i][j]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn max_diagonal(&self) -> i64 {
        (0..self.rank()).map(|i| self.gram[i][i]).max().unwrap_or(0)
    }

    /// Exact determinant (the last leading minor).
    pub fn det(&self) -> BigInt {
        BigInt::from(self.minors[self.rank()])
    }

    pub fn det_i128(&self) -> i128 {
        self.minors[self.rank()]
    }

    fn check_dim(&self, v: &[i64]) -> Result<(), LatticeError> {
        if v.len() != self.rank() {
            return Err(LatticeError::Dimension { expected: self.rank(), got: v.len() });
        }
        Ok(())
    }

    /// `vᵀ G w`, checked.
    pub fn pairing(&self, v: &[i64], w: &[i64]) -> Result<i64, LatticeError> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        let mut acc: i128 = 0;
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for (j, &wj) in w.iter().enumerate() {
                row = row
                    .checked_add(self.gram[i][j] as i128 * wj as i128)
                    .ok_or(LatticeError::Overflow)?;
            }
            acc = acc.checked_add(row.checked_mul(vi as i128).ok_or(LatticeError::Overflow)?)
                .ok_or(LatticeError::Overflow)?;
        }
        i64::try_from(acc).map_err(|_| LatticeError::Overflow)
    }

    pub fn norm(&self, v: &[i64]) -> Result<i64, LatticeError> {
        self.pairing(v, v)
    }

    /// Unchecked-dimension pairing for internal hot loops over vectors this
    /// module produced itself.
    pub(crate) fn dot(&self, v: &[i64], w: &[i64]) -> i64 {
        let mut acc: i64 = 0;
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            let row: i64 = self.gram[i].iter().zip(w).map(|(g, x)| g * x).sum();
            acc += vi * row;
        }
        acc
    }

    /// `G·v`, used to turn repeated pairings into dot products.
    pub(crate) fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.gram.iter().map(|row| row.iter().zip(v).map(|(g, x)| g * x).sum()).collect()
    }

    /// The lattice with Gram matrix `Uᵀ G U`, where the columns of `u` are the
    /// new basis vectors written in the old basis.
    pub fn change_basis(&self, u: &[Vec<i64>]) -> Result<GramLattice, LatticeError> {
        let n = self.rank();
        if u.len() != n || u.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Dimension { expected: n, got: u.len() });
        }
        let cols: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| u[i][j]).collect()).collect();
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = self.pairing(&cols[i], &cols[j])?;
            }
        }
        GramLattice::new(g)
    }

    /// Visit every `y` with `y ≡ residue (mod modulus)` coordinatewise and
    /// `Q(y) ≤ bound`, including zero if it qualifies. The callback receives
    /// the vector and its norm and may stop the walk early.
    pub fn for_each_in_coset<F>(
        &self,
        bound: i64,
        modulus: i64,
        residue: &[i64],
        mut f: F,
    ) -> Result<ControlFlow<()>, LatticeError>
    where
        F: FnMut(&[i64], i64) -> ControlFlow<()>,
    {
        if !(0..=MAX_BOUND).contains(&bound) {
            return Err(LatticeError::BadBound(bound));
        }
        if modulus < 1 {
            return Err(LatticeError::BadBound(modulus));
        }
        self.check_dim(residue)?;
        let n = self.rank();
        let res: Vec<i64> = residue.iter().map(|r| r.rem_euclid(modulus)).collect();
        let mut x = vec![0i64; n];
        let walker = Walker { lat: self, bound, modulus, res: &res };
        Ok(walker.descend(n - 1, bound as i128, 1, &mut x, &mut f))
    }

    /// Visit all nonzero vectors of norm at most `bound`.
    pub fn for_each_short<F>(&self, bound: i64, mut f: F) -> Result<ControlFlow<()>, LatticeError>
    where
        F: FnMut(&[i64], i64) -> ControlFlow<()>,
    {
        let zero = vec![0; self.rank()];
        self.for_each_in_coset(bound, 1, &zero, |y, nrm| {
            if nrm == 0 {
                ControlFlow::Continue(())
            } else {
                f(y, nrm)
            }
        })
    }

    /// All `v` with `0 < |v| ≤ bound`, both signs, sorted lexicographically.
    pub fn vectors_of_norm_at_most(&self, bound: i64) -> Result<Vec<LatticeVector>, LatticeError> {
        let mut out = Vec::new();
        let _ = self.for_each_short(bound, |y, _| {
            out.push(y.to_vec());
            ControlFlow::Continue(())
        })?;
        out.sort_unstable();
        Ok(out)
    }

    /// Like [`Self::vectors_of_norm_at_most`] but paired with norms and
    /// sorted by `(norm, coordinates)`.
    pub fn vectors_with_norms(&self, bound: i64) -> Result<Vec<(LatticeVector, i64)>, LatticeError> {
        let mut out = Vec::new();
        let _ = self.for_each_short(bound, |y, nrm| {
            out.push((y.to_vec(), nrm));
            ControlFlow::Continue(())
        })?;
        out.sort_unstable_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }

    /// Number of vectors of each norm `0..=bound` (index 0 is always 0).
    pub fn norm_counts(&self, bound: i64) -> Result<Vec<u64>, LatticeError> {
        let mut counts = vec![0u64; bound.max(0) as usize + 1];
        let _ = self.for_each_short(bound, |_, nrm| {
            counts[nrm as usize] += 1;
            ControlFlow::Continue(())
        })?;
        Ok(counts)
    }

    /// A splitting `v = x + (v - x)` with `x, v - x ≠ 0` and `⟨x, v - x⟩ ≥ 0`.
    ///
    /// With `y = 2x - v` the condition reads `Q(y) ≤ |v|`, so the search is a
    /// ball around `v/2` of the coset `v + 2L`.
    pub fn find_reducing_split(&self, v: &[i64]) -> Result<Option<LatticeVector>, LatticeError> {
        let nv = self.nonzero_norm(v)?;
        let neg: Vec<i64> = v.iter().map(|c| -c).collect();
        let mut found = None;
        let _ = self.for_each_in_coset(nv, 2, v, |y, _| {
            if y == v || y == neg.as_slice() {
                return ControlFlow::Continue(());
            }
            found = Some(y.iter().zip(v).map(|(a, b)| (a + b) / 2).collect());
            ControlFlow::Break(())
        })?;
        Ok(found)
    }

    pub fn is_irreducible(&self, v: &[i64]) -> Result<bool, LatticeError> {
        Ok(self.find_reducing_split(v)?.is_none())
    }

    /// A splitting `v = x + y` with `|x|, |y| ≥ 3` and `⟨x, y⟩ = -1`.
    ///
    /// Here `⟨x, v⟩ = |x| - 1`, i.e. `Q(2x - v) = |v| + 4`.
    pub fn find_breaking_split(&self, v: &[i64]) -> Result<Option<LatticeVector>, LatticeError> {
        let nv = self.nonzero_norm(v)?;
        if nv < 4 {
            return Ok(None);
        }
        let target = nv + 4;
        let mut found = None;
        let _ = self.for_each_in_coset(target, 2, v, |y, nrm| {
            if nrm != target {
                return ControlFlow::Continue(());
            }
            let x: Vec<i64> = y.iter().zip(v).map(|(a, b)| (a + b) / 2).collect();
            let rest: Vec<i64> = v.iter().zip(&x).map(|(a, b)| a - b).collect();
            if self.dot(&x, &x) >= 3 && self.dot(&rest, &rest) >= 3 {
                found = Some(x);
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })?;
        Ok(found)
    }

    pub fn is_breakable(&self, v: &[i64]) -> Result<bool, LatticeError> {
        Ok(self.find_breaking_split(v)?.is_some())
    }

    fn nonzero_norm(&self, v: &[i64]) -> Result<i64, LatticeError> {
        let nv = self.norm(v)?;
        if nv == 0 {
            return Err(LatticeError::ZeroVector);
        }
        if nv > MAX_BOUND / 2 {
            return Err(LatticeError::BadBound(nv));
        }
        Ok(nv)
    }
}

struct Walker<'a> {
    lat: &'a GramLattice,
    bound: i64,
    modulus: i64,
    res: &'a [i64],
}

impl Walker<'_> {
    // Remaining budget is num/den in lowest terms; den divides Δ_{k+1}.
    fn descend<F>(&self, k: usize, num: i128, den: i128, x: &mut [i64], f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[i64], i64) -> ControlFlow<()>,
    {
        let lat = self.lat;
        let n = lat.rank();
        let dk = lat.minors[k];
        let dk1 = lat.minors[k + 1];
        let row = &lat.elim[k];
        let s: i128 = (k + 1..n).map(|j| row[j] * x[j] as i128).sum();
        let scale = dk * dk1;
        let t = num * scale / den;
        let r = t.sqrt();
        let lo = Integer::div_ceil(&(-r - s), &dk1);
        let hi = Integer::div_floor(&(r - s), &dk1);
        if lo > hi {
            return ControlFlow::Continue(());
        }
        let m = self.modulus as i128;
        let mut xi = lo + (self.res[k] as i128 - lo).rem_euclid(m);
        while xi <= hi {
            let y = dk1 * xi + s;
            let mut nn = num * scale - y * y * den;
            let mut dd = den * scale;
            let g = nn.gcd(&dd);
            if g > 1 {
                nn /= g;
                dd /= g;
            }
            x[k] = xi as i64;
            if k == 0 {
                debug_assert_eq!(dd, 1);
                let nrm = self.bound - nn as i64;
                f(x, nrm)?;
            } else {
                self.descend(k - 1, nn, dd, x, f)?;
            }
            xi += m;
        }
        x[k] = 0;
        ControlFlow::Continue(())
    }
}

/// Canonical sign: first nonzero coordinate positive.
pub fn canonical_sign(v: &[i64]) -> LatticeVector {
    match v.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => v.iter().map(|x| -x).collect(),
        _ => v.to_vec(),
    }
}

pub fn is_zero(v: &[i64]) -> bool {
    v.iter().all(|&c| c == 0)
}

/// Exact determinant of an integer matrix by fraction-free elimination.
pub fn det_bigint(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Integer span of a set of vectors, kept in row Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    dim: usize,
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

impl Sublattice {
    pub fn span(dim: usize, gens: &[Vec<i64>]) -> Sublattice {
        let mut rows: Vec<Vec<i128>> = gens
            .iter()
            .filter(|g| !is_zero(g))
            .map(|g| g.iter().map(|&x| x as i128).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..dim {
            if r == rows.len() {
                break;
            }
            // Euclid on column c over rows r.., leaving one nonzero entry at row r.
            loop {
                let mut best: Option<usize> = None;
                for i in r..rows.len() {
                    if rows[i][c] != 0 && best.map_or(true, |b| rows[i][c].abs() < rows[b][c].abs()) {
                        best = Some(i);
                    }
                }
                let Some(b) = best else { break };
                rows.swap(r, b);
                let mut done = true;
                for i in r + 1..rows.len() {
                    if rows[i][c] != 0 {
                        let q = Integer::div_floor(&rows[i][c], &rows[r][c]);
                        for j in c..dim {
                            rows[i][j] -= q * rows[r][j];
                        }
                        if rows[i][c] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if r < rows.len() && rows[r][c] != 0 {
                if rows[r][c] < 0 {
                    for j in c..dim {
                        rows[r][j] = -rows[r][j];
                    }
                }
                for i in 0..r {
                    let q = Integer::div_floor(&rows[i][c], &rows[r][c]);
                    if q != 0 {
                        for j in c..dim {
                            rows[i][j] -= q * rows[r][j];
                        }
                    }
                }
                pivots.push(c);
                r += 1;
            }
        }
        rows.truncate(r);
        Sublattice { dim, rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.dim {
            return false;
        }
        let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if w[c] % row[c] != 0 {
                return false;
            }
            let q = w[c] / row[c];
            if q != 0 {
                for j in c..self.dim {
                    w[j] -= q * row[j];
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c79() -> GramLattice {
        GramLattice::new(vec![vec![4, -2, 0], vec![-2, 6, -1], vec![0, -1, 2]]).unwrap()
    }

    // Naive box search. Each coordinate satisfies x_i² ≤ B·(G⁻¹)_ii = B·adj_ii/det,
    // which gives a provably sufficient radius.
    fn brute(l: &GramLattice, bound: i64) -> Vec<Vec<i64>> {
        let n = l.rank();
        let det = l.det_i128() as i64;
        let radius = (0..n)
            .map(|i| {
                let minor: Vec<Vec<i64>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| l.entry(r, c)).collect())
                    .collect();
                let adj = if n == 1 { 1 } else { i64::try_from(det_bigint(&minor)).unwrap() };
                (bound * adj / det).sqrt() + 1
            })
            .max()
            .unwrap();
        let mut out = Vec::new();
        let mut x = vec![-radius; n];
        loop {
            let nrm = l.norm(&x).unwrap();
            if nrm > 0 && nrm <= bound {
                out.push(x.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    out.sort();
                    return out;
                }
                if x[i] < radius {
                    x[i] += 1;
                    break;
                }
                x[i] = -radius;
                i += 1;
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let l = c79();
        assert_eq!(l.pairing(&[1, 0, 0], &[1, 0, 0]).unwrap(), 4);
        assert_eq!(l.pairing(&[1, 0, 0], &[0, 1, 0]).unwrap(), -2);
        assert_eq!(l.pairing(&[0, 0, 0], &[3, -1, 7]).unwrap(), 0);
        assert!(matches!(l.pairing(&[1, 0], &[1, 0, 0]), Err(LatticeError::Dimension { .. })));
    }

    #[test]
    fn det_examples() {
        assert_eq!(c79().det(), BigInt::from(36));
        assert_eq!(GramLattice::new(vec![vec![4, -2], vec![-2, 4]]).unwrap().det(), BigInt::from(12));
        let id: Vec<Vec<i64>> = (0..5).map(|i| (0..5).map(|j| (i == j) as i64).collect()).collect();
        assert_eq!(GramLattice::new(id).unwrap().det(), BigInt::one());
        assert_eq!(det_bigint(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(det_bigint(&[vec![4, -2, 0], vec![-2, 6, -1], vec![0, -1, 2]]), BigInt::from(36));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(GramLattice::new(vec![]), Err(LatticeError::Empty)));
        assert!(matches!(GramLattice::new(vec![vec![1, 0], vec![1, 1]]), Err(LatticeError::NotSymmetric(1, 0))));
        assert!(matches!(
            GramLattice::new(vec![vec![1, 2], vec![2, 1]]),
            Err(LatticeError::NotPositiveDefinite(2, _))
        ));
        assert!(matches!(GramLattice::new(vec![vec![1, 0]]), Err(LatticeError::NotSquare { .. })));
    }

    #[test]
    fn short_vectors_examples() {
        let l = c79();
        assert_eq!(l.vectors_of_norm_at_most(2).unwrap(), vec![vec![0, 0, -1], vec![0, 0, 1]]);
        assert!(l.vectors_of_norm_at_most(0).unwrap().is_empty());
        let z2 = GramLattice::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(
            z2.vectors_of_norm_at_most(1).unwrap(),
            vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]
        );
    }

    #[test]
    fn enumeration_matches_box_search() {
        let cases = vec![
            vec![vec![4, -2, 0], vec![-2, 6, -1], vec![0, -1, 2]],
            vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 3]],
            vec![vec![5, 2, -1], vec![2, 3, 1], vec![-1, 1, 4]],
            vec![vec![2, -1], vec![-1, 7]],
        ];
        for g in cases {
            let l = GramLattice::new(g).unwrap();
            for b in 0..14 {
                assert_eq!(l.vectors_of_norm_at_most(b).unwrap(), brute(&l, b), "bound {b}");
            }
        }
    }

    #[test]
    fn irreducibility_examples() {
        let l = c79();
        for v in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            assert!(l.is_irreducible(&v).unwrap());
        }
        let v = [0, 1, 2];
        let x = l.find_reducing_split(&v).unwrap().expect("reducible");
        let y: Vec<i64> = v.iter().zip(&x).map(|(a, b)| a - b).collect();
        assert!(!is_zero(&x) && !is_zero(&y));
        assert!(l.pairing(&x, &y).unwrap() >= 0);
        let z3 = GramLattice::new(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(z3.is_irreducible(&[0, -1, 0]).unwrap());
        assert!(matches!(l.is_irreducible(&[0, 0, 0]), Err(LatticeError::ZeroVector)));
    }

    #[test]
    fn breakability_examples() {
        let l = c79();
        assert!(!l.is_breakable(&[0, 1, 0]).unwrap());
        assert!(!l.is_breakable(&[0, 0, 1]).unwrap());
        // C(3, 11): norms 4,3,2,3,2; the full interval holds two high-weight vertices
        let g = vec![
            vec![4, -2, 0, 0, 0],
            vec![-2, 3, -1, 0, 0],
            vec![0, -1, 2, -1, 0],
            vec![0, 0, -1, 3, -1],
            vec![0, 0, 0, -1, 2],
        ];
        let l = GramLattice::new(g).unwrap();
        let v = [1, 1, 1, 1, 1];
        let x = l.find_breaking_split(&v).unwrap().expect("breakable");
        let y: Vec<i64> = v.iter().zip(&x).map(|(a, b)| a - b).collect();
        assert!(l.norm(&x).unwrap() >= 3 && l.norm(&y).unwrap() >= 3);
        assert_eq!(l.pairing(&x, &y).unwrap(), -1);
    }

    #[test]
    fn sublattice_membership() {
        let s = Sublattice::span(3, &[vec![2, 0, 0], vec![1, 1, 0], vec![3, 1, 0]]);
        assert_eq!(s.rank(), 2);
        assert!(s.contains(&[1, 1, 0]));
        assert!(s.contains(&[0, 2, 0]));
        assert!(!s.contains(&[1, 0, 0]));
        assert!(!s.contains(&[0, 0, 1]));
        assert!(s.contains(&[0, 0, 0]));
        let t = Sublattice::span(2, &[vec![6, 4], vec![4, 6]]);
        assert_eq!(t.rank(), 2);
        assert!(t.contains(&[2, -2]));
        assert!(!t.contains(&[2, 0]));
        assert!(t.contains(&[10, 10]));
    }

    #[test]
    fn change_basis_preserves_det() {
        let l = c79();
        let u = vec![vec![1, 1, 0], vec![0, 1, 2], vec![0, 0, 1]];
        let m = l.change_basis(&u).unwrap();
        assert_eq!(m.det(), l.det());
        assert_eq!(m.entry(0, 0), 4);
    }
}
