//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_integer::Integer;
use prism_core::alexander::{alexander_polynomial, torsion_coefficients, torsion_from_polynomial};
use prism_core::changemaker::{complement_gram, standard_basis, supp, Changemaker, Kind};
use prism_core::contfrac::{montesinos_coeffs, neg_eval, neg_expand, pos_eval, pos_expand, Rational};
use prism_core::ctype::{build_ctype, decide_ctype, recover_pq, CTypeLattice, Interval};
use prism_core::families::{census_record, exhaustive_search, modified_basis_diagnostics, table3_rows, verify_row, Census};
use prism_core::isometry::{are_isometric, verify_isometry};
use prism_core::lattice::GramLattice;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn coprime_pairs(lo_p: i64, q_max: i64) -> Vec<(i64, i64)> {
    (2..=q_max).flat_map(|q| (lo_p..q).filter(move |p| p.gcd(&q) == 1).map(move |p| (p, q))).collect()
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for b in 2..=500i64 {
        for a in (1..b).filter(|a| a.gcd(&b) == 1) {
            let x = Rational::new(b, a);
            let neg = neg_expand(&x).map_err(|e| e.to_string())?;
            ensure(neg_eval(&neg).map_err(|e| e.to_string())? == x, || format!("neg round trip {b}/{a}"))?;
            let pos = pos_expand(&x).map_err(|e| e.to_string())?;
            ensure(pos_eval(&pos).map_err(|e| e.to_string())? == x, || format!("pos round trip {b}/{a}"))?;
            checked += 1;
        }
    }
    let mut mont = 0;
    for (p, q) in coprime_pairs(2, 200) {
        let b = pos_expand(&Rational::new(p, q - p)).map_err(|e| e.to_string())?;
        let a = montesinos_coeffs(&b).map_err(|e| e.to_string())?;
        let target = Rational::new(2 * q - p, q - p);
        ensure(neg_eval(&a).map_err(|e| e.to_string())? == target, || format!("montesinos value ({p},{q})"))?;
        ensure(a == neg_expand(&target).map_err(|e| e.to_string())?, || format!("montesinos coefficients ({p},{q})"))?;
        mont += 1;
    }
    Ok(format!("{checked} fractions round-trip, {mont} Montesinos identities"))
}

fn criterion_2() -> Outcome {
    let pairs = coprime_pairs(2, 60);
    for &(p, q) in &pairs {
        let c = build_ctype(p, q).map_err(|e| e.to_string())?;
        ensure(c.gram.det_i128() == 4 * q as i128, || format!("det C({p},{q}) = {}", c.gram.det_i128()))?;
    }
    Ok(format!("det = 4q for {} lattices", pairs.len()))
}

fn all_intervals(c: &CTypeLattice) -> Vec<Interval> {
    let r = c.rank();
    (0..r).flat_map(|a| (a..r).map(move |b| Interval::new(a, b))).collect()
}

fn criterion_3() -> Outcome {
    let pairs = coprime_pairs(2, 25);
    let total: usize = pairs
        .par_iter()
        .map(|&(p, q)| -> Result<usize, String> {
            let c = build_ctype(p, q).map_err(|e| e.to_string())?;
            let bound =
                all_intervals(&c).iter().map(|i| c.interval_norm(i)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
            let bound = *bound.iter().max().unwrap();
            // irreducible_elements fails unless the brute-force set is exactly ± intervals
            let irr = c.irreducible_elements(bound).map_err(|e| format!("C({p},{q}): {e}"))?;
            ensure(irr.len() == c.rank() * (c.rank() + 1), || format!("C({p},{q}): {} irreducibles", irr.len()))?;
            Ok(irr.len())
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    Ok(format!("{} lattices, {total} irreducibles, all intervals", pairs.len()))
}

fn scramble(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut u = vec![vec![0i64; n]; n];
    for (i, &j) in perm.iter().enumerate() {
        u[i][j] = if rng.gen_bool(0.5) { 1 } else { -1 };
    }
    for _ in 0..n {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n.max(2))) % n;
        if a != b {
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            for row in u.iter_mut() {
                row[a] += s * row[b];
            }
        }
    }
    u
}

fn criterion_4() -> Outcome {
    let pairs = coprime_pairs(2, 40);
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let lattices: Vec<CTypeLattice> = pairs.iter().map(|&(p, q)| build_ctype(p, q).unwrap()).collect();
    for c in &lattices {
        let u = scramble(&mut rng, c.rank());
        let g = c.gram.change_basis(&u).map_err(|e| e.to_string())?;
        ensure(recover_pq(&g) == Some((c.p, c.q)), || format!("recover failed on scrambled C({},{})", c.p, c.q))?;
    }
    let mut compared = 0;
    for (i, a) in lattices.iter().enumerate() {
        for b in &lattices[i + 1..] {
            if a.q == b.q && a.rank() == b.rank() {
                compared += 1;
                ensure(are_isometric(&a.gram, &b.gram).is_none(), || {
                    format!("C({},{}) ≅ C({},{})", a.p, a.q, b.p, b.q)
                })?;
            }
        }
    }
    Ok(format!("{} recovered after scrambling, {compared} matched pairs non-isometric", lattices.len()))
}

fn criterion_5() -> Outcome {
    let mut n = 0;
    for row in table3_rows() {
        for (s, t) in row.params_up_to(5) {
            let rep = verify_row(&row, s, t).map_err(|e| e.to_string())?;
            ensure(rep.passed(), || format!("row {} (s={s}, t={t}): {:?}", row.id, rep.failure))?;
            n += 1;
        }
    }
    let anchors: [(&[i64], (i64, i64)); 3] =
        [(&[1, 1, 3, 5], (7, 9)), (&[1, 2, 2, 3, 3, 7], (11, 19)), (&[1, 2, 3, 4, 5, 9], (13, 34))];
    let instances: Vec<_> = table3_rows()
        .iter()
        .flat_map(|row| row.params_up_to(5).into_iter().map(move |(s, t)| row.generate(s, t)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    for (sigma, pq) in anchors {
        ensure(instances.iter().any(|i| i.sigma == sigma && (i.p, i.q) == pq), || format!("anchor {sigma:?} → {pq:?} not in table"))?;
        let rec = census_record(&Changemaker::new(sigma.to_vec()).unwrap(), false).map_err(|e| e.to_string())?;
        ensure(rec.is_ctype && rec.p.zip(rec.q) == Some(pq), || format!("anchor {sigma:?} decides to {:?}", rec.p.zip(rec.q)))?;
    }
    let s = 2;
    let pq = (2 * s - 1, 2 * s * s + s + 1);
    let ex = instances.iter().find(|i| (i.p, i.q) == pq).ok_or_else(|| format!("no row instance gives {pq:?}"))?;
    let rec = census_record(&Changemaker::new(ex.sigma.clone()).unwrap(), false).map_err(|e| e.to_string())?;
    ensure(rec.p.zip(rec.q) == Some(pq), || format!("{:?} decides to {:?}", ex.sigma, rec.p.zip(rec.q)))?;
    Ok(format!("{n} row instances across {} rows pass checks (a)-(e)", table3_rows().len()))
}

fn criterion_6(census: &Census) -> Outcome {
    let realized = census.realized();
    let expected = census.expected();
    for r in census.records.iter().filter(|r| r.is_ctype) {
        ensure(r.q.map(|q| 4 * q) == Some(r.norm), || format!("{:?}: norm ≠ 4q", r.sigma))?;
        ensure(!r.families.is_empty(), || format!("{:?} is C-type but in no family", r.sigma))?;
    }
    ensure(realized == expected, || {
        format!(
            "missing {:?}, unexpected {:?}",
            expected.difference(&realized).collect::<Vec<_>>(),
            realized.difference(&expected).collect::<Vec<_>>()
        )
    })?;
    let ct = census.records.iter().filter(|r| r.is_ctype).count();
    Ok(format!(
        "{} changemakers, {ct} C-type complements, {} realized (p,q) = predicted",
        census.records.len(),
        realized.len()
    ))
}

/// A manifold `(p, q)` and the changemakers claimed to realize it.
type Overlap = ((i64, i64), Vec<Vec<i64>>);

fn overlap_sets() -> Vec<Overlap> {
    let mut out = Vec::new();
    for s in 0..=2usize {
        let eights = vec![8; s];
        let a = [vec![1, 2, 3, 3, 7], eights.clone()].concat();
        let b = [vec![1, 1, 3, 5, 6], eights].concat();
        out.push(((8 * s as i64 + 13, 16 * s as i64 + 18), vec![a, b]));
    }
    out.push((
        (37, 66),
        vec![vec![1, 2, 3, 3, 7, 8, 8, 8], vec![1, 1, 3, 5, 6, 8, 8, 8], vec![1, 1, 1, 3, 4, 6, 10, 10]],
    ));
    out.push(((5, 22), vec![vec![1, 1, 1, 2, 3, 6, 6], vec![1, 1, 2, 2, 2, 5, 7]]));
    out.push(((25, 36), vec![vec![1, 1, 3, 5, 6, 6, 6], vec![1, 1, 1, 3, 4, 4, 10]]));
    out.push(((43, 117), vec![vec![1, 1, 2, 5, 7, 10, 12, 12], vec![1, 1, 2, 3, 5, 6, 14, 14]]));
    out
}

fn criterion_7() -> Outcome {
    let mut witnesses = 0;
    for ((p, q), sigmas) in overlap_sets() {
        let c = build_ctype(p, q).map_err(|e| e.to_string())?;
        for s in sigmas {
            let sigma = Changemaker::new(s.clone()).map_err(|e| e.to_string())?;
            let g = complement_gram(&sigma).map_err(|e| e.to_string())?;
            let w = are_isometric(&c.gram, &g).ok_or_else(|| format!("{sigma} is not C({p},{q})"))?;
            ensure(verify_isometry(&c.gram, &g, &w), || format!("bad witness for {sigma}"))?;
            witnesses += 1;
        }
    }
    Ok(format!("{witnesses} verified witnesses over {} manifolds", overlap_sets().len()))
}

fn criterion_8(census: &Census) -> Outcome {
    let base = Changemaker::new(vec![1, 1, 3, 5]).unwrap();
    let r = torsion_coefficients(&base, 9).map_err(|e| e.to_string())?;
    ensure(r.torsion.get(0) == 4 && r.torsion.get(18) == 0, || format!("(1,1,3,5): {:?}", r.torsion.t))?;
    let ctype: Vec<_> = census.records.iter().filter(|r| r.is_ctype).collect();
    let lspace = ctype
        .par_iter()
        .map(|rec| -> Result<bool, String> {
            let sigma = Changemaker::new(rec.sigma.clone()).map_err(|e| e.to_string())?;
            let q = rec.q.unwrap();
            let res = torsion_coefficients(&sigma, q).map_err(|e| format!("{sigma}: {e}"))?;
            let t = &res.torsion;
            ensure(t.t.iter().all(|&x| x >= 0), || format!("{sigma}: negative torsion"))?;
            ensure(t.t.len() as i64 <= 2 * q + 1, || format!("{sigma}: torsion beyond 2q"))?;
            ensure(!res.certificate.bounds.is_empty(), || format!("{sigma}: no certificate"))?;
            let poly = alexander_polynomial(t);
            ensure(poly.eval_at_one() == 1, || format!("{sigma}: Δ(1) = {}", poly.eval_at_one()))?;
            ensure(&torsion_from_polynomial(&poly, q) == t, || format!("{sigma}: round trip"))?;
            Ok(poly.has_lspace_shape())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let shaped = lspace.iter().filter(|&&b| b).count();
    Ok(format!("{} C-type changemakers pass; L-space coefficient shape on {shaped}", ctype.len()))
}

fn criterion_9(census: &Census) -> Outcome {
    let bases = census
        .records
        .par_iter()
        .map(|rec| -> Result<(), String> {
            let sigma = Changemaker::new(rec.sigma.clone()).map_err(|e| e.to_string())?;
            let b = standard_basis(&sigma).map_err(|e| e.to_string())?;
            let g = complement_gram(&sigma).map_err(|e| e.to_string())?;
            let n = b.vectors.len();
            for j in 1..=n {
                let mut e = vec![0i64; n];
                e[j - 1] = 1;
                ensure(g.is_irreducible(&e).unwrap(), || format!("{sigma}: v_{j} reducible"))?;
                if g.is_breakable(&e).unwrap() {
                    ensure(b.v(j).kind == Kind::Tight, || format!("{sigma}: breakable v_{j} is {}", b.v(j).kind))?;
                }
                ensure(supp(&b.v(j).coords).contains(&(j - 1)), || format!("{sigma}: j-1 ∉ supp v_{j}"))?;
            }
            for k in 0..n {
                if g.gram()[k][k] == 2 {
                    ensure(b.vectors.iter().all(|v| !v.gappy_indices.contains(&k)), || {
                        format!("{sigma}: |v_{}| = 2 but {k} is gappy", k + 1)
                    })?;
                }
            }
            Ok(())
        })
        .collect::<Result<Vec<_>, _>>()?
        .len();
    let mut sets = 0;
    for rec in census.records.iter().filter(|r| r.is_ctype) {
        let sigma = Changemaker::new(rec.sigma.clone()).map_err(|e| e.to_string())?;
        let g: GramLattice = complement_gram(&sigma).map_err(|e| e.to_string())?;
        let m = decide_ctype(&g).map_err(|e| e.to_string())?.ok_or_else(|| format!("{sigma} lost its witness"))?;
        let (_, d) = modified_basis_diagnostics(&sigma, &m).map_err(|e| format!("{sigma}: {e}"))?;
        ensure(d.claws.is_empty(), || format!("{sigma}: claws {:?}", d.claws))?;
        ensure(d.heavy_triples.is_empty(), || format!("{sigma}: heavy triples {:?}", d.heavy_triples))?;
        sets += 1;
    }
    Ok(format!("structural properties hold on {bases} standard bases; {sets} modified bases free of claws and heavy triples"))
}

fn run(n: usize, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panic: {}", msg.unwrap_or_default()))
    });
    let took = start.elapsed();
    let out = match out {
        Ok(msg) if took > limit => Err(format!("{msg}; exceeded {limit:?}")),
        other => other,
    };
    match &out {
        Ok(msg) => println!("criterion {n}: PASS ({msg}) [{took:.2?}]"),
        Err(msg) => println!("criterion {n}: FAIL ({msg}) [{took:.2?}]"),
    }
    out.is_ok()
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let mut ok = true;
    ok &= run(1, Duration::from_secs(5), criterion_1);
    ok &= run(2, Duration::from_secs(10), criterion_2);
    ok &= run(3, min(2), criterion_3);
    ok &= run(4, min(5), criterion_4);
    ok &= run(5, min(2), criterion_5);

    let start = Instant::now();
    let census = exhaustive_search(8, 400, false);
    let census_time = start.elapsed();
    match census {
        Ok(census) => {
            ok &= run(6, min(30).saturating_sub(census_time), || criterion_6(&census));
            ok &= run(7, min(1), criterion_7);
            ok &= run(8, min(10), || criterion_8(&census));
            ok &= run(9, min(10), || criterion_9(&census));
        }
        Err(e) => {
            println!("criterion 6: FAIL (census: {e})");
            run(7, min(1), criterion_7);
            println!("criterion 8: FAIL (no census)");
            println!("criterion 9: FAIL (no census)");
            ok = false;
        }
    }
    println!("census of length ≤ 8, norm ≤ 400 took {census_time:.2?}");
    if !ok {
        std::process::exit(1);
    }
}
