//! Shared fixtures for the benchmarks.

use prism_core::changemaker::Changemaker;
use prism_core::ctype::build_ctype;
use prism_core::GramLattice;

/// `C(p, q)` in a deterministic non-vertex basis, so recognition cannot
/// read the chain straight off the Gram matrix.
pub fn scrambled_ctype(p: i64, q: i64) -> GramLattice {
    let c = build_ctype(p, q).expect("coprime q > p > 1");
    let n = c.rank();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == (j + 1) % n)).collect()).collect();
    for k in 0..n {
        let (a, b) = (k, (3 * k + 1) % n);
        if a != b {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            for row in u.iter_mut() {
                row[a] += sign * row[b];
            }
        }
    }
    c.gram.change_basis(&u).expect("unimodular change of basis")
}

pub fn changemaker(entries: &[i64]) -> Changemaker {
    Changemaker::new(entries.to_vec()).expect("valid changemaker")
}

/// C-type changemakers of increasing size.
pub fn ctype_sigmas() -> Vec<(Changemaker, i64)> {
    [&[1, 1, 3, 5][..], &[1, 2, 2, 3, 3, 7], &[1, 2, 3, 4, 5, 9], &[1, 1, 2, 5, 7, 10, 12, 12]]
        .iter()
        .map(|s| {
            let c = changemaker(s);
            let q = c.norm() / 4;
            (c, q)
        })
        .collect()
}
