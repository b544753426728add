//! Shared generators and exhaustive property checks.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;

use phorma::compositions::{comp_count, comp_rank, comp_unrank, enum_comps, from_lattice_path, occ, to_lattice_path};
use phorma::hfamily::{s_step, w_step};
use phorma::oracle::brute_enum;
use phorma::redgen::{from_grid_path, to_grid_path};
use phorma::seqcore::{recover, reduce, roof, sort_distinct};
use phorma::{AscendingSeq, BoolExpr, Bounds, CmpOp, CompConstraint, Composition, HVertexStore, PhormaIndex, PhormaSpec, Restriction};

pub type Check = Result<usize, String>;

pub fn random_expr<R: Rng>(rng: &mut R, n: usize, depth: u32) -> BoolExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        let op = CmpOp::ALL[rng.gen_range(0..6)];
        return BoolExpr::leaf(rng.gen_range(1..=n), op, rng.gen_range(1..=n));
    }
    match rng.gen_range(0..3) {
        0 => BoolExpr::Not(Box::new(random_expr(rng, n, depth - 1))),
        k => {
            let cs = (0..rng.gen_range(2..=3)).map(|_| random_expr(rng, n, depth - 1)).collect();
            if k == 1 {
                BoolExpr::And(cs)
            } else {
                BoolExpr::Or(cs)
            }
        }
    }
}

/// `kind` 0: all compositions, 1: explicit subset, 2: restricted by an expression.
pub fn random_spec<R: Rng>(rng: &mut R, kind: usize) -> PhormaSpec {
    let n = rng.gen_range(1..=4);
    let bounds: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
    let expr = random_expr(rng, n, 3);
    let constraint = match kind {
        0 => CompConstraint::All,
        1 => CompConstraint::Explicit(
            enum_comps(n, &CompConstraint::All)
                .filter(|_| rng.gen_bool(0.5))
                .collect(),
        ),
        _ => CompConstraint::Restricted(random_expr(rng, n, 2)),
    };
    PhormaSpec::new(Bounds::new(bounds).unwrap(), Restriction::Expr(expr), constraint).unwrap()
}

pub fn expr_strategy(n: usize, depth: u32) -> BoxedStrategy<BoolExpr> {
    let leaf = (1..=n, 0..6usize, 1..=n).prop_map(|(i, op, j)| BoolExpr::leaf(i, CmpOp::ALL[op], j));
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| BoolExpr::Not(Box::new(e))),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(BoolExpr::And),
            prop::collection::vec(inner, 2..=3).prop_map(BoolExpr::Or),
        ]
    })
    .boxed()
}

pub fn spec_strategy() -> impl Strategy<Value = PhormaSpec> {
    (1usize..=4).prop_flat_map(|n| {
        let comps: Vec<Composition> = enum_comps(n, &CompConstraint::All).collect();
        let k = comps.len();
        let constraint = prop_oneof![
            Just(CompConstraint::All),
            prop::sample::subsequence(comps, 0..=k).prop_map(CompConstraint::Explicit),
            expr_strategy(n, 2).prop_map(CompConstraint::Restricted),
        ];
        (prop::collection::vec(1u32..=5, n), expr_strategy(n, 3), constraint).prop_map(|(a, e, c)| {
            PhormaSpec::new(Bounds::new(a).unwrap(), Restriction::Expr(e), c).unwrap()
        })
    })
}

/// All sequences in `[1, hi]^n`, lexicographic.
pub fn cube(n: usize, hi: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=hi).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Ascending sequences of length `m` dominated entrywise by `roof`.
pub fn dominated(roof: &[u32]) -> Vec<Vec<u32>> {
    fn go(roof: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let k = cur.len();
        if k == roof.len() {
            out.push(cur.clone());
            return;
        }
        let lo = cur.last().map_or(1, |v| v + 1);
        for v in lo..=roof[k] {
            cur.push(v);
            go(roof, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(roof, &mut vec![], &mut out);
    out
}

/// Every path from `v` to the sink, `w` edges first; each path is returned
/// as the ascending sequence read from its falls, with the fall count.
pub fn paths_by_dfs(v: &AscendingSeq) -> Vec<(Vec<u32>, usize)> {
    fn go(v: &AscendingSeq, falls: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, usize)>) {
        if v.is_sink() {
            let mut g = falls.clone();
            g.reverse();
            out.push((g, falls.len()));
            return;
        }
        if let Some(w) = w_step(v).unwrap() {
            go(&w, falls, out);
        }
        falls.push(v.last().unwrap());
        go(&s_step(v).unwrap(), falls, out);
        falls.pop();
    }
    let mut out = vec![];
    go(v, &mut vec![], &mut out);
    out
}

pub fn check_recovery() -> Check {
    let mut n_checked = 0;
    for n in 1..=6 {
        for alpha in cube(n, 6) {
            let back = recover(&reduce(&alpha).unwrap(), &sort_distinct(&alpha).unwrap()).unwrap();
            if back != alpha {
                return Err(format!("{alpha:?} recovered as {back:?}"));
            }
            n_checked += 1;
        }
    }
    Ok(n_checked)
}

/// Within each reduction class the roof is shared, dominates every sorted
/// member and is itself attained by a member.
pub fn check_roof_invariance(spec: &PhormaSpec) -> Check {
    let members = brute_enum(spec, 10_000_000).map_err(|e| e.to_string())?;
    let a = spec.bounds();
    let mut attained = BTreeSet::new();
    for alpha in &members {
        let beta = reduce(alpha).unwrap();
        let r = roof(&beta, a).ok_or_else(|| format!("member {alpha:?} has no roof"))?;
        let g = sort_distinct(alpha).unwrap();
        if g.as_slice().iter().zip(r.as_slice()).any(|(x, y)| x > y) {
            return Err(format!("{alpha:?} not under roof {r}"));
        }
        if g == r {
            attained.insert(beta.clone());
        }
        let top = recover(&beta, &r).unwrap();
        if !phorma::seqcore::member(spec, &top).unwrap() {
            return Err(format!("roof image {top:?} of {alpha:?} is not a member"));
        }
    }
    let classes: BTreeSet<_> = members.iter().map(|a| reduce(a).unwrap()).collect();
    if classes != attained {
        return Err("some roof is not attained".into());
    }
    Ok(members.len())
}

/// Every roof with entries up to `hi`: the DFS path list matches the set of
/// dominated sequences, every path has exactly `m` falls, and `h_rank` is the
/// path position with `h_unrank` its inverse.
pub fn check_local_hash(hi: u32) -> Check {
    let mut n_checked = 0;
    for mask in 1u32..(1 << hi) {
        let r: Vec<u32> = (1..=hi).filter(|v| mask & (1 << (v - 1)) != 0).collect();
        let roof_seq = AscendingSeq::new(r.clone()).unwrap();
        let store = HVertexStore::<u64>::build(std::slice::from_ref(&roof_seq)).map_err(|e| e.to_string())?;
        let paths = paths_by_dfs(&roof_seq);
        let want: BTreeSet<Vec<u32>> = dominated(&r).into_iter().collect();
        let got: BTreeSet<Vec<u32>> = paths.iter().map(|(g, _)| g.clone()).collect();
        if got != want || got.len() != paths.len() {
            return Err(format!("paths below {roof_seq} do not biject onto dominated sequences"));
        }
        if store.order(&roof_seq).unwrap() != paths.len() as u64 {
            return Err(format!("order of {roof_seq} differs from its path count"));
        }
        for (pos, (g, falls)) in paths.iter().enumerate() {
            if *falls != r.len() {
                return Err(format!("path to {g:?} below {roof_seq} has {falls} falls"));
            }
            let gs = AscendingSeq::new(g.clone()).unwrap();
            let rank = store.h_rank(&roof_seq, &gs).map_err(|e| e.to_string())?;
            if rank != pos as u64 {
                return Err(format!("h_rank({roof_seq}, {gs}) = {rank}, path position {pos}"));
            }
            let back = store.h_unrank(&roof_seq, &rank).map_err(|e| e.to_string())?;
            if back != gs {
                return Err(format!("h_unrank({roof_seq}, {rank}) = {back}, expected {gs}"));
            }
            n_checked += 1;
        }
    }
    Ok(n_checked)
}

/// Bucket bound and store size bound on a compiled index.
pub fn check_store_bounds<C: phorma::Count>(idx: &PhormaIndex<C>) -> Check {
    let store = idx.store();
    let maximal = store.maximal_roofs().len();
    if idx.reduced().is_empty() {
        return Ok(0);
    }
    if let Some(b) = store.buckets().iter().find(|b| b.vertices.len() > maximal) {
        return Err(format!(
            "bucket (last {}, len {}) holds {} vertices but there are {maximal} maximal roofs",
            b.last,
            b.len,
            b.vertices.len()
        ));
    }
    let a = store.a_star() as i64;
    let n = store.n_star() as i64;
    let v = store.vertex_count() as i64;
    // |V| <= 1 + M (a - (n - 1)/2) n, doubled to stay integral
    if 2 * v > 2 + maximal as i64 * (2 * a - n + 1) * n {
        return Err(format!("{v} vertices exceed the bound for M={maximal}, a*={a}, n*={n}"));
    }
    Ok(store.buckets().len())
}

pub fn linf_bijection(max_n: usize) -> Check {
    let mut n_checked = 0;
    for n in 1..=max_n {
        let mut all = BTreeSet::new();
        for m in 1..=n {
            let total: u64 = comp_count(n, m).map_err(|e| e.to_string())?;
            for r in 0..total {
                let c = comp_unrank::<u64>(n, m, &r).map_err(|e| e.to_string())?;
                if c.m() != m || c.n() as usize != n {
                    return Err(format!("unrank({n},{m},{r}) = {c}"));
                }
                if comp_rank::<u64>(&c).map_err(|e| e.to_string())? != r {
                    return Err(format!("rank({c}) != {r}"));
                }
                if from_lattice_path(&to_lattice_path(&c)) != c || to_lattice_path(&c).len() != n - 1 {
                    return Err(format!("lattice path of {c} does not round-trip"));
                }
                all.insert(c);
                n_checked += 1;
            }
        }
        if all.len() != 1 << (n - 1) {
            return Err(format!("{} compositions of {n}", all.len()));
        }
    }
    Ok(n_checked)
}

pub fn jm_bijection(max_n: usize) -> Check {
    let mut n_checked = 0;
    for n in 1..=max_n {
        // reduced sequences of length n are exactly the surjections onto 1..m
        for alpha in cube(n, n as u32) {
            let delta = occ(&alpha).unwrap();
            let beta = reduce(&alpha).unwrap();
            if beta.as_slice() != alpha.as_slice() {
                continue;
            }
            let path = to_grid_path(&beta);
            if from_grid_path(&delta, &path).as_ref() != Some(&beta) {
                return Err(format!("grid path of {beta} does not round-trip"));
            }
            n_checked += 1;
        }
        // and every monotone path from delta to the origin is one of them
        for delta in enum_comps(n, &CompConstraint::All) {
            let m = delta.m();
            for path in cube(n, m as u32) {
                let path: Vec<usize> = path.into_iter().map(|v| v as usize).collect();
                let reaches = (1..=m).all(|k| path.iter().filter(|&&p| p == k).count() as u32 == delta.parts()[k - 1]);
                if reaches != from_grid_path(&delta, &path).is_some() {
                    return Err(format!("path {path:?} from {delta} misclassified"));
                }
            }
        }
    }
    Ok(n_checked)
}
