//! Generation of the reduced set by restricted implicit enumeration.
//!
//! For an occurrence vector `δ` with `m` parts, reduced sequences with
//! `occ = δ` are exactly the monotone paths from the point `δ` to the origin
//! of the integer grid `J^m`: step `i` moves parallel to axis `β_i`. A
//! depth-first walk over axes `1..m` therefore emits only reduced sequences,
//! in lexicographic order, and is cut as soon as a prefix cannot satisfy the
//! restriction or fit under the bounds.

use crate::boolexpr::Tri;
use crate::compositions::{enum_comps, occ, Composition};
use crate::error::{Error, Result};
use crate::seqcore::{roof, AscendingSeq, PhormaSpec, ReducedSeq, Restriction};

/// Pruning switches; results never depend on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenOptions {
    /// Cut prefixes whose three-valued restriction evaluation is false.
    pub prune_restriction: bool,
    /// Only place value `j` at position `i` when `j <= a_i`. A reduced
    /// sequence has a feasible roof exactly when it fits under the bounds.
    pub prune_bounds: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            prune_restriction: true,
            prune_bounds: true,
        }
    }
}

pub type ReducedWithRoof = (ReducedSeq, AscendingSeq);

pub fn gen_reduced_for(spec: &PhormaSpec, delta: &Composition) -> Result<Vec<ReducedWithRoof>> {
    gen_reduced_for_with(spec, delta, GenOptions::default())
}

pub fn gen_reduced_for_with(spec: &PhormaSpec, delta: &Composition, opts: GenOptions) -> Result<Vec<ReducedWithRoof>> {
    let n = spec.n();
    if delta.n() as usize != n {
        return Err(Error::InvalidComposition(format!("{delta} is not a composition of {n}")));
    }
    let a = spec.bounds();
    if let Restriction::List(list) = spec.restriction() {
        // already sorted and duplicate free
        return Ok(list
            .iter()
            .filter(|b| occ(b.as_slice()).is_ok_and(|o| &o == delta))
            .filter_map(|b| roof(b, a).map(|r| (b.clone(), r)))
            .collect());
    }
    let mut walk = GridWalk {
        spec,
        opts,
        remaining: delta.parts().to_vec(),
        prefix: Vec::with_capacity(n),
        partial: vec![None; n],
        out: Vec::new(),
    };
    walk.descend();
    Ok(walk.out)
}

struct GridWalk<'s> {
    spec: &'s PhormaSpec,
    opts: GenOptions,
    remaining: Vec<u32>,
    prefix: Vec<u32>,
    partial: Vec<Option<u32>>,
    out: Vec<ReducedWithRoof>,
}

impl GridWalk<'_> {
    fn descend(&mut self) {
        let pos = self.prefix.len();
        let n = self.partial.len();
        if pos == n {
            if self.spec.restriction().eval(&self.prefix) {
                let beta = ReducedSeq::new_unchecked(self.prefix.clone(), self.remaining.len());
                if let Some(r) = roof(&beta, self.spec.bounds()) {
                    self.out.push((beta, r));
                }
            }
            return;
        }
        let bound = self.spec.bounds().as_slice()[pos];
        for axis in 0..self.remaining.len() {
            let value = axis as u32 + 1;
            if self.remaining[axis] == 0 {
                continue;
            }
            if self.opts.prune_bounds && value > bound {
                break;
            }
            self.remaining[axis] -= 1;
            self.prefix.push(value);
            self.partial[pos] = Some(value);
            let viable = !self.opts.prune_restriction || self.spec.restriction().eval_partial(&self.partial) != Tri::False;
            if viable {
                self.descend();
            }
            self.partial[pos] = None;
            self.prefix.pop();
            self.remaining[axis] += 1;
        }
    }
}

/// The whole reduced set, lexicographically sorted, each with its roof.
pub fn gen_reduced_all(spec: &PhormaSpec) -> Result<Vec<ReducedWithRoof>> {
    gen_reduced_all_with(spec, GenOptions::default())
}

pub fn gen_reduced_all_with(spec: &PhormaSpec, opts: GenOptions) -> Result<Vec<ReducedWithRoof>> {
    let mut all = Vec::new();
    for delta in enum_comps(spec.n(), spec.constraint()) {
        all.extend(gen_reduced_for_with(spec, &delta, opts)?);
    }
    all.sort_unstable_by(|x, y| x.0.cmp(&y.0));
    // occurrence vectors partition the reduced set
    assert!(all.windows(2).all(|w| w[0].0 != w[1].0), "duplicate reduced sequence across compositions");
    Ok(all)
}

/// Axis sequence of the grid path encoding `beta` (axes are 1-based).
pub fn to_grid_path(beta: &ReducedSeq) -> Vec<usize> {
    beta.as_slice().iter().map(|&b| b as usize).collect()
}

/// Follows `path` from `delta` and returns the reduced sequence it encodes,
/// or `None` if it leaves the non-negative orthant or misses the origin.
pub fn from_grid_path(delta: &Composition, path: &[usize]) -> Option<ReducedSeq> {
    let mut point = delta.parts().to_vec();
    for &axis in path {
        let coord = point.get_mut(axis.checked_sub(1)?)?;
        *coord = coord.checked_sub(1)?;
    }
    point
        .iter()
        .all(|&c| c == 0)
        .then(|| ReducedSeq::new_unchecked(path.iter().map(|&a| a as u32).collect(), delta.m()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::compositions::CompConstraint;
    use crate::seqcore::{reduce, Bounds};

    fn comp(p: &[u32]) -> Composition {
        Composition::new(p.to_vec()).unwrap()
    }

    fn flat(v: &[ReducedWithRoof]) -> Vec<(Vec<u32>, Vec<u32>)> {
        v.iter()
            .map(|(b, r)| (b.as_slice().to_vec(), r.as_slice().to_vec()))
            .collect()
    }

    #[test]
    fn l_piece_single_value() {
        let spec = builtin::l_piece(7, 5).unwrap();
        let got = gen_reduced_for(&spec, &comp(&[4])).unwrap();
        assert_eq!(flat(&got), vec![(vec![1, 1, 1, 1], vec![5])]);
    }

    #[test]
    fn l_piece_four_values() {
        let spec = builtin::l_piece(7, 5).unwrap();
        let got = gen_reduced_for(&spec, &comp(&[1, 1, 1, 1])).unwrap();
        assert_eq!(
            flat(&got),
            vec![
                (vec![4, 2, 3, 1], vec![4, 5, 6, 7]),
                (vec![4, 3, 1, 2], vec![3, 4, 5, 7]),
                (vec![4, 3, 2, 1], vec![3, 4, 5, 7]),
            ]
        );
    }

    #[test]
    fn infeasible_bounds_yield_nothing() {
        let spec = PhormaSpec::new(
            Bounds::new(vec![1, 1]).unwrap(),
            Restriction::Expr(crate::boolexpr::BoolExpr::Empty),
            CompConstraint::All,
        )
        .unwrap();
        assert!(gen_reduced_for(&spec, &comp(&[1, 1])).unwrap().is_empty());
        assert!(gen_reduced_for(&spec, &comp(&[3])).is_err());
    }

    #[test]
    fn l_piece_reduced_set() {
        let spec = builtin::l_piece(7, 5).unwrap();
        let got: Vec<Vec<u32>> = gen_reduced_all(&spec)
            .unwrap()
            .into_iter()
            .map(|(b, _)| b.as_slice().to_vec())
            .collect();
        let expected = [
            [1, 1, 1, 1],
            [2, 1, 2, 1],
            [2, 2, 1, 1],
            [3, 2, 1, 1],
            [3, 2, 2, 1],
            [3, 3, 2, 1],
            [4, 2, 3, 1],
            [4, 3, 1, 2],
            [4, 3, 2, 1],
        ];
        assert_eq!(got, expected.map(|e| e.to_vec()).to_vec());
    }

    #[test]
    fn strict_pair_has_one_class() {
        let spec = builtin::sym_gt(2, 9).unwrap();
        let got = gen_reduced_all(&spec).unwrap();
        assert_eq!(flat(&got), vec![(vec![2, 1], vec![8, 9])]);
    }

    #[test]
    fn pruning_never_changes_output() {
        let spec = builtin::t_z_piece(vec![6, 6, 5, 5, 4, 4, 4]).unwrap();
        let reference = gen_reduced_all_with(
            &spec,
            GenOptions {
                prune_restriction: false,
                prune_bounds: false,
            },
        )
        .unwrap();
        for (pr, pb) in [(true, false), (false, true), (true, true)] {
            let got = gen_reduced_all_with(
                &spec,
                GenOptions {
                    prune_restriction: pr,
                    prune_bounds: pb,
                },
            )
            .unwrap();
            assert_eq!(got, reference);
        }
    }

    fn multiset_permutations(delta: &[u32]) -> Vec<Vec<usize>> {
        let n: u32 = delta.iter().sum();
        let mut out = vec![];
        let mut rem = delta.to_vec();
        let mut cur = vec![];
        fn go(rem: &mut Vec<u32>, cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for k in 0..rem.len() {
                if rem[k] > 0 {
                    rem[k] -= 1;
                    cur.push(k + 1);
                    go(rem, cur, n, out);
                    cur.pop();
                    rem[k] += 1;
                }
            }
        }
        go(&mut rem, &mut cur, n as usize, &mut out);
        out
    }

    #[test]
    fn grid_path_bijection() {
        for n in 1..=6 {
            for delta in enum_comps(n, &CompConstraint::All) {
                let paths = multiset_permutations(delta.parts());
                for path in &paths {
                    let beta = from_grid_path(&delta, path).expect("path reaches the origin");
                    assert_eq!(occ(beta.as_slice()).unwrap(), delta);
                    assert_eq!(reduce(beta.as_slice()).unwrap(), beta);
                    assert_eq!(&to_grid_path(&beta), path);
                }
                // every reduced sequence with this occurrence vector is one of those paths
                let spec = PhormaSpec::new(
                    Bounds::new(vec![n as u32; n]).unwrap(),
                    Restriction::Expr(crate::boolexpr::BoolExpr::Empty),
                    CompConstraint::All,
                )
                .unwrap();
                let gen = gen_reduced_for(&spec, &delta).unwrap();
                assert_eq!(gen.len(), paths.len());
            }
        }
        assert!(from_grid_path(&comp(&[1, 1]), &[1, 1]).is_none());
        assert!(from_grid_path(&comp(&[2, 1]), &[1, 2]).is_none());
    }
}
