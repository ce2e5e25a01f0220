//! Isometry testing for small positive-definite lattices.
//!
//! A witness is an integer matrix `M` with `Mᵀ G₂ M = G₁`; its columns are
//! the images of the basis of `L₁`, written in the basis of `L₂`. Searching
//! assigns basis vectors of one side, in a constraint-first order, to short
//! vectors of the other side with the right norm and pairings.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{canonical_sign, GramLattice, LatticeError, LatticeVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isometry {
    pub matrix: Vec<Vec<i64>>,
}

impl Isometry {
    pub fn identity(n: usize) -> Isometry {
        Isometry { matrix: (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect() }
    }

    /// Image of the `i`-th basis vector of the source.
    pub fn column(&self, i: usize) -> LatticeVector {
        self.matrix.iter().map(|r| r[i]).collect()
    }

    /// Express a source vector in target coordinates.
    pub fn apply(&self, v: &[i64]) -> LatticeVector {
        self.matrix.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn inverse(&self) -> Option<Isometry> {
        invert_unimodular(&self.matrix).map(|matrix| Isometry { matrix })
    }
}

/// Checks `Mᵀ G₂ M = G₁` exactly.
pub fn verify_isometry(l1: &GramLattice, l2: &GramLattice, m: &Isometry) -> bool {
    let n = l1.rank();
    if l2.rank() != n || m.matrix.len() != n || m.matrix.iter().any(|r| r.len() != n) {
        return false;
    }
    let cols: Vec<LatticeVector> = (0..n).map(|i| m.column(i)).collect();
    for i in 0..n {
        for j in i..n {
            match l2.pairing(&cols[i], &cols[j]) {
                Ok(x) if x == l1.entry(i, j) => {}
                _ => return false,
            }
        }
    }
    true
}

/// Norm counts up to some bound; equal fingerprints are necessary for an
/// isometry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    counts: Vec<u64>,
}

impl Fingerprint {
    pub fn of(l: &GramLattice, bound: i64) -> Result<Fingerprint, LatticeError> {
        Ok(Fingerprint { counts: l.norm_counts(bound)? })
    }

    pub fn bound(&self) -> i64 {
        self.counts.len() as i64 - 1
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    fn agrees_up_to(&self, other: &Fingerprint, bound: i64) -> bool {
        let b = bound as usize + 1;
        self.counts[..b] == other.counts[..b]
    }
}

/// Per-lattice fingerprint cache for pairwise searches. Each lattice is
/// fingerprinted up to its own largest diagonal entry, which covers every
/// comparison it can take part in.
#[derive(Default)]
pub struct FingerprintCache {
    map: RwLock<HashMap<Vec<Vec<i64>>, Fingerprint>>,
}

impl FingerprintCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, l: &GramLattice) -> Result<Fingerprint, LatticeError> {
        if let Some(f) = self.map.read().expect("cache lock").get(l.gram()) {
            return Ok(f.clone());
        }
        let f = Fingerprint::of(l, l.max_diagonal())?;
        self.map.write().expect("cache lock").insert(l.gram().to_vec(), f.clone());
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn are_isometric(l1: &GramLattice, l2: &GramLattice) -> Option<Isometry> {
    are_isometric_with(l1, l2, None)
}

pub fn are_isometric_cached(cache: &FingerprintCache, l1: &GramLattice, l2: &GramLattice) -> Option<Isometry> {
    are_isometric_with(l1, l2, Some(cache))
}

fn are_isometric_with(l1: &GramLattice, l2: &GramLattice, cache: Option<&FingerprintCache>) -> Option<Isometry> {
    if l1.rank() != l2.rank() || l1.det_i128() != l2.det_i128() {
        return None;
    }
    if l1 == l2 {
        return Some(Isometry::identity(l1.rank()));
    }
    let mut d1: Vec<i64> = (0..l1.rank()).map(|i| l1.entry(i, i)).collect();
    let mut d2: Vec<i64> = (0..l2.rank()).map(|i| l2.entry(i, i)).collect();
    d1.sort_unstable_by(|a, b| b.cmp(a));
    d2.sort_unstable_by(|a, b| b.cmp(a));
    // Search from the side whose basis is shorter so the candidate pool is small.
    let swap = d2 < d1;
    let (src, tgt) = if swap { (l2, l1) } else { (l1, l2) };
    let bound = src.max_diagonal();

    let fp = |l: &GramLattice| match cache {
        Some(c) => c.get(l),
        None => Fingerprint::of(l, bound),
    };
    let (fs, ft) = (fp(src).ok()?, fp(tgt).ok()?);
    if !fs.agrees_up_to(&ft, bound) {
        return None;
    }

    let m = search(src, tgt, bound)?;
    let iso = if swap { m.inverse()? } else { m };
    debug_assert!(verify_isometry(l1, l2, &iso));
    Some(iso)
}

struct Candidate {
    v: LatticeVector,
    gv: Vec<i64>,
}

fn search(src: &GramLattice, tgt: &GramLattice, bound: i64) -> Option<Isometry> {
    let n = src.rank();
    let mut by_norm: HashMap<i64, Vec<Candidate>> = HashMap::new();
    for (v, nrm) in tgt.vectors_with_norms(bound).ok()? {
        let gv = tgt.apply(&v);
        by_norm.entry(nrm).or_default().push(Candidate { v, gv });
    }

    let order = assignment_order(src);
    let pools: Vec<&[Candidate]> = order
        .iter()
        .map(|&i| by_norm.get(&src.entry(i, i)).map(|v| v.as_slice()).unwrap_or(&[]))
        .collect();
    if pools.iter().any(|p| p.is_empty()) {
        return None;
    }

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    if !backtrack(src, &order, &pools, &mut chosen) {
        return None;
    }
    let mut matrix = vec![vec![0i64; n]; n];
    for (pos, &i) in order.iter().enumerate() {
        let img = &pools[pos][chosen[pos]].v;
        for r in 0..n {
            matrix[r][i] = img[r];
        }
    }
    Some(Isometry { matrix })
}

fn backtrack(src: &GramLattice, order: &[usize], pools: &[&[Candidate]], chosen: &mut Vec<usize>) -> bool {
    let pos = chosen.len();
    if pos == order.len() {
        return true;
    }
    let i = order[pos];
    for (ci, c) in pools[pos].iter().enumerate() {
        // -1 is an automorphism of every lattice, so the first image can be
        // taken with canonical sign.
        if pos == 0 && canonical_sign(&c.v) != c.v {
            continue;
        }
        let ok = (0..pos).all(|p| {
            let prev = &pools[p][chosen[p]];
            dot(&c.v, &prev.gv) == src.entry(i, order[p])
        });
        if ok {
            chosen.push(ci);
            if backtrack(src, order, pools, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Start with the shortest, best-connected basis vector, then repeatedly take
// the one with the most nonzero pairings into the chosen set.
fn assignment_order(src: &GramLattice) -> Vec<usize> {
    let n = src.rank();
    let degree = |i: usize| (0..n).filter(|&j| j != i && src.entry(i, j) != 0).count();
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for _ in 0..n {
        let best = (0..n)
            .filter(|&i| !used[i])
            .max_by_key(|&i| {
                let links = order.iter().filter(|&&j| src.entry(i, j) != 0).count();
                (links, std::cmp::Reverse(src.entry(i, i)), degree(i), std::cmp::Reverse(i))
            })
            .expect("nonempty");
        used[best] = true;
        order.push(best);
    }
    order
}

/// Exact inverse of an integer matrix with determinant ±1.
pub fn invert_unimodular(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
            r.extend((0..n).map(|j| BigRational::from_integer(BigInt::from((i == j) as i64))));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x / &piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    a.iter()
        .map(|row| {
            row[n..]
                .iter()
                .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
                .collect::<Option<Vec<i64>>>()
        })
        .collect()
}
