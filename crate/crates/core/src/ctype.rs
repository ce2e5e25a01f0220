//! C-type lattices `C(p, q)`: the chain `x_0, x_1, …, x_n` with norms
//! `(4, a_1, …, a_n)`, a doubled edge `⟨x_0, x_1⟩ = -2` and `⟨x_i, x_{i+1}⟩ = -1`
//! further along, where `(2q - p)/(q - p) = [a_1, …, a_n]⁻`.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contfrac::{neg_eval, neg_expand, NegCF, Rational};
use crate::isometry::{are_isometric, Isometry};
use crate::lattice::{canonical_sign, GramLattice, LatticeError, LatticeVector, Sublattice};

/// Largest `q` for which [`recover_pq`] will enumerate candidate `p`.
pub const MAX_RECOVER_Q: i64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CTypeError {
    #[error("need coprime q > p > 1, got p = {p}, q = {q}")]
    BadParameters { p: i64, q: i64 },
    #[error("interval [{left}, {right}] out of range for rank {rank}")]
    BadInterval { left: usize, right: usize, rank: usize },
    #[error("vector {0:?} is not ± an interval, so it is not irreducible")]
    NotInterval(LatticeVector),
    #[error("q = {0} is beyond the supported recovery range")]
    TooLarge(i64),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CTypeLattice {
    pub p: i64,
    pub q: i64,
    /// `(4, a_1, …, a_n)`
    pub norms: Vec<i64>,
    pub high_weight: Vec<bool>,
    pub gram: GramLattice,
}

/// `sign · (x_left + … + x_right)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub left: usize,
    pub right: usize,
    pub sign: i8,
}

impl Interval {
    pub fn new(left: usize, right: usize) -> Interval {
        Interval { left, right, sign: 1 }
    }

    pub fn negated(self) -> Interval {
        Interval { sign: -self.sign, ..self }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.left <= i && i <= self.right
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let l = self.left.max(o.left);
        let r = self.right.min(o.right);
        (l <= r).then_some(Interval::new(l, r))
    }

    pub fn distant(&self, o: &Interval) -> bool {
        self.right + 1 < o.left || o.right + 1 < self.left
    }

    pub fn consecutive(&self, o: &Interval) -> bool {
        self.right + 1 == o.left || o.right + 1 == self.left
    }

    pub fn share_end(&self, o: &Interval) -> bool {
        self.left == o.left || self.right == o.right
    }

    pub fn abuts(&self, o: &Interval) -> bool {
        self.consecutive(o) || self.share_end(o)
    }
}

/// Vertex weights `(a_1, …, a_n)` for `(p, q)`.
pub fn ctype_coefficients(p: i64, q: i64) -> Result<Vec<i64>, CTypeError> {
    if !(q > p && p > 1) || p.gcd(&q) != 1 {
        return Err(CTypeError::BadParameters { p, q });
    }
    let cf = neg_expand(&Rational::new(2 * q - p, q - p)).map_err(|e| CTypeError::Invariant(e.to_string()))?;
    cf.to_i64s().ok_or(CTypeError::Invariant("coefficient overflow".into()))
}

/// The chain Gram matrix for norms `(4, a_1, …, a_n)`.
pub fn chain_gram(norms: &[i64]) -> Vec<Vec<i64>> {
    let n = norms.len();
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        g[i][i] = norms[i];
        if i + 1 < n {
            let e = if i == 0 { -2 } else { -1 };
            g[i][i + 1] = e;
            g[i + 1][i] = e;
        }
    }
    g
}

pub fn build_ctype(p: i64, q: i64) -> Result<CTypeLattice, CTypeError> {
    let a = ctype_coefficients(p, q)?;
    let mut norms = vec![4];
    norms.extend_from_slice(&a);
    let high_weight = norms.iter().enumerate().map(|(i, &x)| i > 0 && x > 2).collect();
    let labels = (0..norms.len()).map(|i| format!("x{i}")).collect();
    let gram = GramLattice::new(chain_gram(&norms))?.with_labels(labels)?;
    Ok(CTypeLattice { p, q, norms, high_weight, gram })
}

impl CTypeLattice {
    pub fn rank(&self) -> usize {
        self.norms.len()
    }

    /// Index `n` of the last vertex.
    pub fn n(&self) -> usize {
        self.norms.len() - 1
    }

    fn check(&self, i: &Interval) -> Result<(), CTypeError> {
        if i.left > i.right || i.right > self.n() || !(i.sign == 1 || i.sign == -1) {
            return Err(CTypeError::BadInterval { left: i.left, right: i.right, rank: self.rank() });
        }
        Ok(())
    }

    pub fn interval_vector(&self, i: &Interval) -> Result<LatticeVector, CTypeError> {
        self.check(i)?;
        Ok((0..self.rank()).map(|k| if i.contains(k) { i.sign as i64 } else { 0 }).collect())
    }

    /// Norm from the closed form, cross-checked against the Gram matrix.
    pub fn interval_norm(&self, i: &Interval) -> Result<i64, CTypeError> {
        self.check(i)?;
        let closed = if i.left == 0 && i.right == 0 {
            4
        } else {
            2 + (i.left.max(1)..=i.right).map(|k| self.norms[k] - 2).sum::<i64>()
        };
        let direct = self.gram.norm(&self.interval_vector(i)?)?;
        if closed != direct {
            return Err(CTypeError::Invariant(format!(
                "interval {i:?}: closed-form norm {closed} but Gram norm {direct}"
            )));
        }
        Ok(closed)
    }

    /// At most one high-weight vertex, except that `x_0` alone splits as
    /// `[x_0, x_1] - x_1` when `a_1 = 3`.
    pub fn is_unbreakable_interval(&self, i: &Interval) -> bool {
        if i.left == 0 && i.right == 0 {
            return self.norms.get(1) != Some(&3);
        }
        (i.left..=i.right).filter(|&k| self.high_weight[k]).count() <= 1
    }

    /// Number of dangling edges of the chain graph with doubled first edge,
    /// checked against `⟨[I], [J]⟩ = |[I ∩ J]| - δ`.
    pub fn delta(&self, i: &Interval, j: &Interval) -> Result<i64, CTypeError> {
        self.check(i)?;
        self.check(j)?;
        let cap = i.intersect(j);
        let in_cap = |k: usize| cap.is_some_and(|c| c.contains(k));
        let mut d = 0;
        for a in 0..self.n() {
            let b = a + 1;
            let mult = if a == 0 { 2 } else { 1 };
            let crosses = (i.contains(a) && j.contains(b)) || (j.contains(a) && i.contains(b));
            if crosses && !(in_cap(a) && in_cap(b)) {
                d += mult;
            }
        }
        let ui = Interval { sign: 1, ..*i };
        let uj = Interval { sign: 1, ..*j };
        let lhs = self.gram.pairing(&self.interval_vector(&ui)?, &self.interval_vector(&uj)?)?;
        let cap_norm = match cap {
            Some(c) => self.interval_norm(&c)?,
            None => 0,
        };
        if lhs != cap_norm - d {
            return Err(CTypeError::Invariant(format!(
                "pairing {lhs} of {i:?}, {j:?} disagrees with |[I∩J]| - δ = {cap_norm} - {d}"
            )));
        }
        Ok(d)
    }

    /// Reads `v` as `±(x_a + … + x_b)` if it has that shape.
    pub fn interval_of(&self, v: &[i64]) -> Option<Interval> {
        if v.len() != self.rank() {
            return None;
        }
        let nz: Vec<usize> = (0..v.len()).filter(|&k| v[k] != 0).collect();
        let (&l, &r) = (nz.first()?, nz.last()?);
        let s = v[l];
        if s.abs() != 1 || r - l + 1 != nz.len() || nz.iter().any(|&k| v[k] != s) {
            return None;
        }
        Some(Interval { left: l, right: r, sign: s as i8 })
    }

    /// All signed intervals of norm at most `bound`, as vectors, sorted.
    pub fn intervals_up_to(&self, bound: i64) -> Result<Vec<LatticeVector>, CTypeError> {
        let mut out = Vec::new();
        for l in 0..self.rank() {
            for r in l..self.rank() {
                let i = Interval::new(l, r);
                if self.interval_norm(&i)? <= bound {
                    out.push(self.interval_vector(&i)?);
                    out.push(self.interval_vector(&i.negated())?);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Irreducible vectors of norm at most `bound`, found by exhaustive
    /// search and required to coincide with the signed intervals.
    pub fn irreducible_elements(&self, bound: i64) -> Result<Vec<LatticeVector>, CTypeError> {
        let mut out = Vec::new();
        for v in self.gram.vectors_of_norm_at_most(bound)? {
            if self.gram.is_irreducible(&v)? {
                out.push(v);
            }
        }
        let expected = self.intervals_up_to(bound)?;
        if out != expected {
            return Err(CTypeError::Invariant(format!(
                "irreducibles of norm ≤ {bound} are not exactly the intervals ({} vs {})",
                out.len(),
                expected.len()
            )));
        }
        Ok(out)
    }

    /// Pairing graph, intersection graph, claws and heavy triples for a set
    /// of irreducible vectors given in vertex-basis coordinates.
    pub fn graph_diagnostics(&self, t: &[LatticeVector]) -> Result<GraphDiagnostics, CTypeError> {
        let intervals: Vec<Interval> = t
            .iter()
            .map(|v| self.interval_of(v).ok_or_else(|| CTypeError::NotInterval(v.clone())))
            .collect::<Result<_, _>>()?;
        let m = t.len();
        let mut pairing_graph = Vec::new();
        let mut intersection_graph = Vec::new();
        let mut adj = vec![vec![false; m]; m];
        for a in 0..m {
            for b in a + 1..m {
                if self.gram.pairing(&t[a], &t[b])? != 0 {
                    pairing_graph.push((a, b));
                }
                if intervals[a].abuts(&intervals[b]) {
                    intersection_graph.push((a, b));
                    adj[a][b] = true;
                    adj[b][a] = true;
                }
            }
        }

        let mut claws = Vec::new();
        for v in 0..m {
            let nb: Vec<usize> = (0..m).filter(|&w| adj[v][w]).collect();
            for (x, &w1) in nb.iter().enumerate() {
                for (y, &w2) in nb.iter().enumerate().skip(x + 1) {
                    if adj[w1][w2] {
                        continue;
                    }
                    for &w3 in &nb[y + 1..] {
                        if !adj[w1][w3] && !adj[w2][w3] {
                            claws.push([v, w1, w2, w3]);
                        }
                    }
                }
            }
        }

        let heavy: Vec<usize> = (0..m)
            .filter(|&k| {
                let i = intervals[k];
                let is_x0 = i.left == 0 && i.right == 0;
                !is_x0 && self.is_unbreakable_interval(&i) && self.interval_norm(&i).is_ok_and(|n| n >= 3)
            })
            .collect();
        let mut heavy_triples = Vec::new();
        for (x, &a) in heavy.iter().enumerate() {
            for (y, &b) in heavy.iter().enumerate().skip(x + 1) {
                for &c in &heavy[y + 1..] {
                    if connected_avoiding(&adj, a, b, c)
                        && connected_avoiding(&adj, a, c, b)
                        && connected_avoiding(&adj, b, c, a)
                    {
                        heavy_triples.push([a, b, c]);
                    }
                }
            }
        }

        Ok(GraphDiagnostics { intervals, pairing_graph, intersection_graph, claws, heavy_triples })
    }
}

fn connected_avoiding(adj: &[Vec<bool>], from: usize, to: usize, avoid: usize) -> bool {
    let m = adj.len();
    let mut seen = vec![false; m];
    seen[avoid] = true;
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        if u == to {
            return true;
        }
        for w in 0..m {
            if adj[u][w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDiagnostics {
    pub intervals: Vec<Interval>,
    pub pairing_graph: Vec<(usize, usize)>,
    pub intersection_graph: Vec<(usize, usize)>,
    /// `(center, w1, w2, w3)` as indices into the input set.
    pub claws: Vec<[usize; 4]>,
    pub heavy_triples: Vec<[usize; 3]>,
}

#[derive(Clone, Debug)]
struct Candidate {
    p: i64,
    high: Vec<i64>,
    twos: usize,
}

/// Candidate `p` for a given `q` and rank, i.e. those whose chain has
/// exactly `rank - 1` coefficients.
fn candidates(q: i64, rank: usize) -> Vec<Candidate> {
    (2..q)
        .filter(|p| p.gcd(&q) == 1)
        .filter_map(|p| {
            let a = ctype_coefficients(p, q).ok()?;
            (a.len() + 1 == rank).then(|| {
                let mut high: Vec<i64> = a.iter().copied().filter(|&x| x > 2).collect();
                high.sort_unstable();
                Candidate { p, twos: a.len() - high.len(), high }
            })
        })
        .collect()
}

/// Recovers `(p, q)` from an abstract lattice by reconstructing the chain of
/// vertex norms: find `x_0`, the root sublattice `R`, the classes of
/// unbreakable irreducibles modulo `R`, and walk the resulting path.
///
/// A returned pair is what the reconstruction reads off; it is certified
/// only by [`decide_ctype`], which also produces an isometry.
pub fn recover_pq(l: &GramLattice) -> Option<(i64, i64)> {
    recover_pq_checked(l).ok().flatten()
}

pub fn recover_pq_checked(l: &GramLattice) -> Result<Option<(i64, i64)>, CTypeError> {
    let rank = l.rank();
    if rank < 2 {
        return Ok(None);
    }
    let det = l.det_i128();
    if det % 4 != 0 {
        return Ok(None);
    }
    let q = (det / 4).to_i64().ok_or(CTypeError::TooLarge(i64::MAX))?;
    if q < 3 {
        return Ok(None);
    }
    if q > MAX_RECOVER_Q {
        return Err(CTypeError::TooLarge(q));
    }
    if rank == 2 && q == 3 {
        // C(2,3) has three norm-4 vectors up to sign with even pairings, so
        // x_0 is not determined; compare with the one candidate directly.
        let c = build_ctype(2, 3)?;
        return Ok(are_isometric(&c.gram, l).map(|_| (2, 3)));
    }

    let cands = candidates(q, rank);
    if cands.is_empty() {
        return Ok(None);
    }

    let short = l.vectors_with_norms(4)?;
    if short.iter().any(|(_, n)| *n == 1) {
        return Ok(None);
    }

    let mut x0s = Vec::new();
    for (v, nrm) in &short {
        if *nrm != 4 || canonical_sign(v) != *v {
            continue;
        }
        if l.apply(v).iter().any(|x| x % 2 != 0) {
            continue;
        }
        if l.is_irreducible(v)? {
            x0s.push(v.clone());
        }
    }
    // x_0 is breakable when a_1 = 3, and then other even norm-4 irreducibles
    // can exist; each is tried and an ambiguous reading is confirmed.
    let ambiguous = x0s.len() > 1;
    for x0 in x0s {
        if let Some((p, q)) = reconstruct(l, &short, x0, q, cands.clone())? {
            if !ambiguous || are_isometric(&build_ctype(p, q)?.gram, l).is_some() {
                return Ok(Some((p, q)));
            }
        }
    }
    Ok(None)
}

fn reconstruct(
    l: &GramLattice,
    short: &[(LatticeVector, i64)],
    x0: LatticeVector,
    q: i64,
    mut cands: Vec<Candidate>,
) -> Result<Option<(i64, i64)>, CTypeError> {
    let rank = l.rank();

    let roots: Vec<LatticeVector> =
        short.iter().filter(|(v, n)| *n == 2 && canonical_sign(v) == *v).map(|(v, _)| v.clone()).collect();
    if roots.iter().any(|r| l.dot(r, &x0) != 0) {
        return Ok(None);
    }
    let mut gens = roots.clone();
    gens.push(x0.clone());
    let r_lat = Sublattice::span(rank, &gens);
    let twos = r_lat.rank() - 1;
    cands.retain(|c| c.twos == twos);
    if cands.is_empty() {
        return Ok(None);
    }
    let n_classes = rank - r_lat.rank();

    // Components of the root system; each must be a type-A system.
    let comps = components(roots.len(), |a, b| l.dot(&roots[a], &roots[b]) != 0);
    let mut comp_roots: Vec<Vec<usize>> = Vec::new();
    for comp in comps {
        let vs: Vec<LatticeVector> = comp.iter().map(|&i| roots[i].clone()).collect();
        let r = Sublattice::span(rank, &vs).rank();
        if vs.len() != r * (r + 1) / 2 {
            return Ok(None);
        }
        comp_roots.push(comp);
    }
    let comp_rank_total: usize =
        comp_roots.iter().map(|c| Sublattice::span(rank, &c.iter().map(|&i| roots[i].clone()).collect::<Vec<_>>()).rank()).sum();
    if comp_rank_total != twos {
        return Ok(None);
    }

    // Classes of unbreakable irreducibles of norm ≥ 3, by increasing norm.
    let cap = cands.iter().flat_map(|c| c.high.iter().copied()).max().unwrap_or(2);
    let needed: BTreeSet<i64> = cands.iter().flat_map(|c| c.high.iter().copied()).collect();
    let mut levels: BTreeMap<i64, Vec<LatticeVector>> = BTreeMap::new();
    if cap >= 3 {
        let _ = l.for_each_short(cap, |v, nrm| {
            if nrm >= 3 && needed.contains(&nrm) && canonical_sign(v) == v && v != x0.as_slice() {
                levels.entry(nrm).or_default().push(v.to_vec());
            }
            std::ops::ControlFlow::Continue(())
        })?;
    }
    let short_apply: Vec<(Vec<i64>, i64, &LatticeVector)> =
        short.iter().map(|(u, n)| (l.apply(u), *n, u)).collect();

    let mut classes: Vec<(i64, Vec<LatticeVector>)> = Vec::new();
    for (&nrm, vs) in levels.iter_mut() {
        if classes.len() == n_classes {
            break;
        }
        if !cands.iter().any(|c| c.high.contains(&nrm)) {
            continue;
        }
        vs.sort_unstable();
        for v in vs.iter() {
            let cheap_split =
                short_apply.iter().any(|(gu, nu, u)| u.as_slice() != v.as_slice() && dot(gu, v) >= *nu);
            if cheap_split || !l.is_irreducible(v)? || l.is_breakable(v)? {
                continue;
            }
            let home = classes.iter().position(|(_, members)| {
                let rep = &members[0];
                let diff: Vec<i64> = v.iter().zip(rep).map(|(a, b)| a - b).collect();
                let sum: Vec<i64> = v.iter().zip(rep).map(|(a, b)| a + b).collect();
                r_lat.contains(&diff) || r_lat.contains(&sum)
            });
            match home {
                Some(k) if classes[k].0 != nrm => return Ok(None),
                Some(k) => classes[k].1.push(v.clone()),
                None => classes.push((nrm, vec![v.clone()])),
            }
        }
        let mut found: Vec<i64> = classes.iter().map(|c| c.0).collect();
        found.sort_unstable();
        cands.retain(|c| c.high.iter().copied().filter(|&h| h <= nrm).collect::<Vec<_>>() == found);
        if cands.is_empty() {
            return Ok(None);
        }
    }
    if classes.len() != n_classes {
        return Ok(None);
    }

    // Path on {w_0} ∪ W ∪ V.
    let nw = comp_roots.len();
    let nodes = 1 + nw + classes.len();
    let mut adj = vec![Vec::new(); nodes];
    let mut link = |a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for (ci, (_, members)) in classes.iter().enumerate() {
        let vnode = 1 + nw + ci;
        if members.iter().any(|m| l.dot(m, &x0) != 0) {
            link(0, vnode);
        }
        for (wi, comp) in comp_roots.iter().enumerate() {
            if members.iter().any(|m| comp.iter().any(|&r| l.dot(m, &roots[r]) != 0)) {
                link(1 + wi, vnode);
            }
        }
        for (cj, (_, others)) in classes.iter().enumerate().skip(ci + 1) {
            if members.iter().all(|m| others.iter().all(|o| l.dot(m, o) != 0)) {
                link(vnode, 1 + nw + cj);
            }
        }
    }
    let edges: usize = adj.iter().map(|a| a.len()).sum::<usize>() / 2;
    if edges + 1 != nodes || adj.iter().any(|a| a.len() > 2) || adj[0].len() != 1 {
        return Ok(None);
    }
    let mut seq = Vec::new();
    let (mut prev, mut cur) = (0usize, adj[0][0]);
    let mut visited = 1;
    loop {
        visited += 1;
        if cur > nw {
            seq.push(classes[cur - 1 - nw].0);
        } else {
            let comp = &comp_roots[cur - 1];
            let r = Sublattice::span(rank, &comp.iter().map(|&i| roots[i].clone()).collect::<Vec<_>>()).rank();
            seq.extend(std::iter::repeat(2).take(r));
        }
        match adj[cur].iter().find(|&&w| w != prev) {
            Some(&next) => {
                prev = cur;
                cur = next;
            }
            None => break,
        }
    }
    if visited != nodes || seq.len() + 1 != rank || seq[0] < 3 {
        return Ok(None);
    }

    let val = neg_eval(&NegCF::from_i64s(&seq)).map_err(|e| CTypeError::Invariant(e.to_string()))?;
    let (num, den) = match val.to_i64_pair() {
        Some(x) => x,
        None => return Ok(None),
    };
    let (q2, p2) = (num - den, num - 2 * den);
    if q2 != q || p2 <= 1 || !cands.iter().any(|c| c.p == p2) {
        return Ok(None);
    }
    Ok(Some((p2, q2)))
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn components(n: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut k = 0;
        while k < members.len() {
            let u = members[k];
            for w in 0..n {
                if comp[w] == usize::MAX && edge(u, w) {
                    comp[w] = id;
                    members.push(w);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// A certified C-type identification: `isometry` maps the vertex basis of
/// `ctype` into the input lattice.
#[derive(Clone, Debug)]
pub struct CTypeMatch {
    pub ctype: CTypeLattice,
    pub isometry: Isometry,
}

/// Runs [`recover_pq`] and confirms the answer with an explicit isometry.
pub fn decide_ctype(l: &GramLattice) -> Result<Option<CTypeMatch>, CTypeError> {
    let Some((p, q)) = recover_pq_checked(l)? else {
        return Ok(None);
    };
    let ctype = build_ctype(p, q)?;
    Ok(are_isometric(&ctype.gram, l).map(|isometry| CTypeMatch { ctype, isometry }))
}
