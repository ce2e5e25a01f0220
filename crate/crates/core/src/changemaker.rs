//! Changemaker vectors `σ = (σ_0, …, σ_{n+1})`, the standard basis of the
//! orthogonal complement `(σ)⊥ ⊂ Z^{n+2}` and its Gram matrix.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{GramLattice, LatticeError, LatticeVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChangemakerError {
    #[error("entries must be nonnegative and nondecreasing: {0:?}")]
    Unsorted(Vec<i64>),
    #[error("{0:?} is not a changemaker vector")]
    NotChangemaker(Vec<i64>),
    #[error("the standard basis needs σ_0 = 1, got {0:?}")]
    LeadingEntry(Vec<i64>),
    #[error("cannot parse changemaker vector: {0}")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Subset-sum condition via the prefix criterion
/// `σ_i ≤ 1 + σ_0 + … + σ_{i-1}`.
pub fn is_changemaker(sigma: &[i64]) -> Result<bool, ChangemakerError> {
    if sigma.iter().any(|&s| s < 0) || sigma.windows(2).any(|w| w[0] > w[1]) {
        return Err(ChangemakerError::Unsorted(sigma.to_vec()));
    }
    let mut prefix = 0i64;
    for &s in sigma {
        if s > prefix + 1 {
            return Ok(false);
        }
        prefix += s;
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Changemaker(Vec<i64>);

impl Changemaker {
    pub fn new(sigma: Vec<i64>) -> Result<Changemaker, ChangemakerError> {
        if sigma.is_empty() || !is_changemaker(&sigma)? {
            return Err(ChangemakerError::NotChangemaker(sigma));
        }
        Ok(Changemaker(sigma))
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|σ|²`
    pub fn norm(&self) -> i64 {
        self.0.iter().map(|s| s * s).sum()
    }
}

impl TryFrom<Vec<i64>> for Changemaker {
    type Error = ChangemakerError;
    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        Changemaker::new(v)
    }
}

impl From<Changemaker> for Vec<i64> {
    fn from(c: Changemaker) -> Vec<i64> {
        c.0
    }
}

impl fmt::Display for Changemaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Accepts `1,1,3,5`, `(1,1,3,5)` or `[1, 1, 3, 5]`.
impl FromStr for Changemaker {
    type Err = ChangemakerError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let sigma = inner
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|e| ChangemakerError::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Changemaker::new(sigma)
    }
}

/// All changemakers with `σ_0 = 1`, the given length and `|σ|² ≤ norm_max`,
/// in lexicographic order.
pub fn enumerate_changemakers(length: usize, norm_max: i64) -> Vec<Changemaker> {
    if length == 0 || norm_max < length as i64 {
        return Vec::new();
    }
    let split = length.min(3);
    let mut prefixes = Vec::new();
    extend(&mut vec![1], 1, 1, split, norm_max, length, &mut |v| prefixes.push(v.to_vec()));
    prefixes
        .into_par_iter()
        .map(|p| {
            let mut out = Vec::new();
            let sum = p.iter().sum();
            let sq = p.iter().map(|x| x * x).sum();
            extend(&mut p.clone(), sum, sq, length, norm_max, length, &mut |v| out.push(Changemaker(v.to_vec())));
            out
        })
        .flatten_iter()
        .collect::<Vec<_>>()
}

/// Depth-first extension of `cur` to `target` entries. `total` is the full
/// length, used to reserve norm for the remaining entries (each ≥ the last).
fn extend(
    cur: &mut Vec<i64>,
    sum: i64,
    sq: i64,
    target: usize,
    norm_max: i64,
    total: usize,
    emit: &mut dyn FnMut(&[i64]),
) {
    if cur.len() == target {
        emit(cur);
        return;
    }
    let last = *cur.last().expect("nonempty prefix");
    let rest_after = (total - cur.len() - 1) as i64;
    for s in last..=sum + 1 {
        if sq + s * s * (1 + rest_after) > norm_max {
            break;
        }
        cur.push(s);
        extend(cur, sum + s, sq + s * s, target, norm_max, total, emit);
        cur.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Tight,
    JustRight,
    Gappy,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Tight => "tight",
            Kind::JustRight => "just_right",
            Kind::Gappy => "gappy",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisVector {
    /// Coordinates in `Z^{n+2}`.
    pub coords: LatticeVector,
    pub kind: Kind,
    pub gappy_indices: Vec<usize>,
}

/// `v_1, …, v_{n+1}`; entry `j - 1` holds `v_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardBasis {
    pub sigma: Changemaker,
    pub vectors: Vec<BasisVector>,
}

impl StandardBasis {
    /// `v_j` for `1 ≤ j ≤ n + 1`.
    pub fn v(&self, j: usize) -> &BasisVector {
        &self.vectors[j - 1]
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        let vs = &self.vectors;
        vs.iter().map(|a| vs.iter().map(|b| dot(&a.coords, &b.coords)).collect()).collect()
    }

    /// Expresses a combination `Σ c_j v_j` in `Z^{n+2}`.
    pub fn embed(&self, c: &[i64]) -> LatticeVector {
        let mut out = vec![0; self.sigma.len()];
        for (cj, v) in c.iter().zip(&self.vectors) {
            for (o, x) in out.iter_mut().zip(&v.coords) {
                *o += cj * x;
            }
        }
        out
    }
}

pub fn standard_basis(sigma: &Changemaker) -> Result<StandardBasis, ChangemakerError> {
    let s = sigma.entries();
    if s[0] != 1 {
        return Err(ChangemakerError::LeadingEntry(s.to_vec()));
    }
    let dim = s.len();
    let mut vectors = Vec::with_capacity(dim - 1);
    let mut prefix = vec![0i64; dim + 1];
    for i in 0..dim {
        prefix[i + 1] = prefix[i] + s[i];
    }
    for j in 1..dim {
        let mut coords = vec![0i64; dim];
        coords[j] = -1;
        if s[j] == 1 + prefix[j] {
            coords[0] = 2;
            for c in coords.iter_mut().take(j).skip(1) {
                *c = 1;
            }
            vectors.push(BasisVector { coords, kind: Kind::Tight, gappy_indices: Vec::new() });
            continue;
        }
        // Greedy from the top maximizes Σ 2^i; the changemaker prefix
        // condition makes every remainder ≤ prefix[i] reachable below i.
        let mut rem = s[j];
        let mut in_a = vec![false; j];
        for i in (0..j).rev() {
            if s[i] <= rem && rem - s[i] <= prefix[i] {
                in_a[i] = true;
                rem -= s[i];
            }
        }
        debug_assert_eq!(rem, 0);
        for (i, &b) in in_a.iter().enumerate() {
            if b {
                coords[i] = 1;
            }
        }
        let gappy_indices: Vec<usize> = (0..j.saturating_sub(1)).filter(|&i| in_a[i] && !in_a[i + 1]).collect();
        let kind = if gappy_indices.is_empty() { Kind::JustRight } else { Kind::Gappy };
        vectors.push(BasisVector { coords, kind, gappy_indices });
    }
    Ok(StandardBasis { sigma: sigma.clone(), vectors })
}

pub fn supp(v: &[i64]) -> Vec<usize> {
    (0..v.len()).filter(|&i| v[i] != 0).collect()
}

pub fn supp_plus(v: &[i64]) -> Vec<usize> {
    (0..v.len()).filter(|&i| v[i] > 0).collect()
}

pub fn complement_gram(sigma: &Changemaker) -> Result<GramLattice, ChangemakerError> {
    let basis = standard_basis(sigma)?;
    let labels = (1..sigma.len()).map(|j| format!("v{j}")).collect();
    Ok(GramLattice::new(basis.gram())?.with_labels(labels)?)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(v: &[i64]) -> Changemaker {
        Changemaker::new(v.to_vec()).unwrap()
    }

    #[test]
    fn recognition() {
        assert!(is_changemaker(&[1, 1, 2, 2, 3, 5]).unwrap());
        assert!(!is_changemaker(&[1, 3]).unwrap());
        assert!(is_changemaker(&[0, 1]).unwrap());
        assert!(is_changemaker(&[2, 1]).is_err());
        assert!(is_changemaker(&[-1, 1]).is_err());
        assert!("(1,1,3,5)".parse::<Changemaker>().is_ok());
        assert!("1, 3".parse::<Changemaker>().is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_changemakers(2, 8), vec![cm(&[1, 1]), cm(&[1, 2])]);
        assert_eq!(enumerate_changemakers(1, 5), vec![cm(&[1])]);
        assert!(enumerate_changemakers(4, 36).contains(&cm(&[1, 1, 3, 5])));
        assert!(enumerate_changemakers(4, 35).iter().all(|c| c.norm() <= 35));
    }

    #[test]
    fn basis_of_1135() {
        let b = standard_basis(&cm(&[1, 1, 3, 5])).unwrap();
        assert_eq!(b.v(1).coords, vec![1, -1, 0, 0]);
        assert_eq!(b.v(1).kind, Kind::JustRight);
        assert_eq!(b.v(2).coords, vec![2, 1, -1, 0]);
        assert_eq!(b.v(2).kind, Kind::Tight);
        assert_eq!(b.v(3).coords, vec![1, 1, 1, -1]);
        assert_eq!(b.v(3).kind, Kind::JustRight);
        let g = complement_gram(&cm(&[1, 1, 3, 5])).unwrap();
        assert_eq!(g.gram(), &[vec![2, 1, 0], vec![1, 6, 2], vec![0, 2, 4]]);
        assert_eq!(g.det_i128(), 36);
        assert_eq!(complement_gram(&cm(&[1, 1])).unwrap().gram(), &[vec![2]]);
    }

    #[test]
    fn gappy_example() {
        let b = standard_basis(&cm(&[1, 2, 3, 3, 7])).unwrap();
        // σ_4 = 7 = σ_3 + σ_2 + σ_0: index 0 is gappy.
        assert_eq!(b.v(4).coords, vec![1, 0, 1, 1, -1]);
        assert_eq!(b.v(4).kind, Kind::Gappy);
        assert_eq!(b.v(4).gappy_indices, vec![0]);
    }

    #[test]
    fn support_helpers() {
        assert_eq!(supp(&[1, 0, -1, 2]), vec![0, 2, 3]);
        assert_eq!(supp_plus(&[1, 0, -1, 2]), vec![0, 3]);
        assert!(standard_basis(&cm(&[0, 1])).is_err());
    }
}
