//! Reduction, sorting, recovery and a-roofs.
//!
//! Every sequence `α` factors as `(reduce(α), sort_distinct(α))`: its order
//! type and its ascending set of distinct values. The a-roof of a reduced
//! sequence is the largest ascending value set it can be recovered with
//! while staying entrywise below the bounds.

use std::fmt;

use crate::boolexpr::{BoolExpr, Tri};
use crate::compositions::{occ, CompConstraint};
use crate::error::{fmt_seq, Error, Result, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bounds(Vec<u32>);

impl Bounds {
    pub fn new(a: Vec<u32>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::EmptySequence);
        }
        if a.contains(&0) {
            return Err(Error::NonPositiveEntry);
        }
        Ok(Bounds(a))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `a⋆`, the largest bound.
    pub fn max(&self) -> u32 {
        *self.0.iter().max().unwrap()
    }

    pub fn dominates(&self, alpha: &[u32]) -> bool {
        alpha.len() == self.0.len() && alpha.iter().zip(&self.0).all(|(x, a)| x <= a)
    }

    /// `ln Π a_i`.
    pub fn ln_volume(&self) -> f64 {
        self.0.iter().map(|&a| (a as f64).ln()).sum()
    }
}

/// A surjection onto `{1..m}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedSeq {
    seq: Vec<u32>,
    m: usize,
}

impl ReducedSeq {
    /// Accepts `seq` only if it is already reduced.
    pub fn new(seq: Vec<u32>) -> Result<Self> {
        if seq.is_empty() {
            return Err(Error::EmptySequence);
        }
        let m = *seq.iter().max().unwrap() as usize;
        let mut seen = vec![false; m + 1];
        for &v in &seq {
            if v == 0 {
                return Err(Error::NonPositiveEntry);
            }
            seen[v as usize] = true;
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(Error::InvalidSequence(format!("{} is not reduced", fmt_seq(&seq))));
        }
        Ok(ReducedSeq { seq, m })
    }

    pub(crate) fn new_unchecked(seq: Vec<u32>, m: usize) -> Self {
        ReducedSeq { seq, m }
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.seq
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }
}

impl fmt::Display for ReducedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_seq(&self.seq))
    }
}

/// Strictly increasing positive sequence; the empty sequence is the sink `t`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AscendingSeq(Vec<u32>);

impl AscendingSeq {
    pub fn new(seq: Vec<u32>) -> Result<Self> {
        if seq.first() == Some(&0) {
            return Err(Error::NonPositiveEntry);
        }
        if seq.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSequence(format!("{} is not strictly increasing", fmt_seq(&seq))));
        }
        Ok(AscendingSeq(seq))
    }

    pub(crate) fn new_unchecked(seq: Vec<u32>) -> Self {
        AscendingSeq(seq)
    }

    pub fn sink() -> Self {
        AscendingSeq(Vec::new())
    }

    pub fn is_sink(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }
}

impl fmt::Display for AscendingSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_sink() {
            f.write_str("t")
        } else {
            f.write_str(&fmt_seq(&self.0))
        }
    }
}

/// The entry restriction `B`: a boolean expression or, for small reduced
/// sets, the explicit list of admitted reduced sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Restriction {
    Expr(BoolExpr),
    List(Vec<ReducedSeq>),
}

impl Restriction {
    pub fn eval(&self, alpha: &[u32]) -> bool {
        match self {
            Restriction::Expr(e) => e.eval_unchecked(alpha),
            Restriction::List(list) => match reduce(alpha) {
                Ok(r) => list.binary_search(&r).is_ok(),
                Err(_) => false,
            },
        }
    }

    /// Sound three-valued check of a partial assignment.
    pub fn eval_partial(&self, partial: &[Option<u32>]) -> Tri {
        match self {
            Restriction::Expr(e) => e.eval_partial_unchecked(partial),
            Restriction::List(_) => match partial.iter().copied().collect::<Option<Vec<u32>>>() {
                Some(total) => self.eval(&total).into(),
                None => Tri::Unknown,
            },
        }
    }
}

/// A phorma `(a, B, C)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhormaSpec {
    bounds: Bounds,
    restriction: Restriction,
    constraint: CompConstraint,
}

impl PhormaSpec {
    pub fn new(bounds: Bounds, restriction: Restriction, constraint: CompConstraint) -> Result<Self> {
        let n = bounds.n();
        let restriction = match restriction {
            Restriction::Expr(e) => {
                e.check_dim(n, 'a')?;
                Restriction::Expr(e)
            }
            Restriction::List(mut list) => {
                if let Some(bad) = list.iter().find(|r| r.len() != n) {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        actual: bad.len(),
                    });
                }
                list.sort();
                list.dedup();
                Restriction::List(list)
            }
        };
        constraint.validate(n)?;
        Ok(PhormaSpec {
            bounds,
            restriction,
            constraint,
        })
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    pub fn constraint(&self) -> &CompConstraint {
        &self.constraint
    }

    pub fn n(&self) -> usize {
        self.bounds.n()
    }
}

pub fn reduce(alpha: &[u32]) -> Result<ReducedSeq> {
    let distinct = sort_distinct(alpha)?;
    let seq = alpha
        .iter()
        .map(|v| distinct.0.binary_search(v).unwrap() as u32 + 1)
        .collect();
    Ok(ReducedSeq::new_unchecked(seq, distinct.m()))
}

pub fn sort_distinct(alpha: &[u32]) -> Result<AscendingSeq> {
    if alpha.is_empty() {
        return Err(Error::EmptySequence);
    }
    if alpha.contains(&0) {
        return Err(Error::NonPositiveEntry);
    }
    let mut v = alpha.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(AscendingSeq(v))
}

/// Inverse of the factorisation: `α_i = γ_{β_i}`.
pub fn recover(beta: &ReducedSeq, gamma: &AscendingSeq) -> Result<Vec<u32>> {
    if beta.m() != gamma.m() {
        return Err(Error::LengthMismatch {
            expected: beta.m(),
            actual: gamma.m(),
        });
    }
    Ok(beta.seq.iter().map(|&b| gamma.0[b as usize - 1]).collect())
}

/// The a-roof of `beta`, or `None` when no ascending value set fits under `a`.
pub fn roof(beta: &ReducedSeq, a: &Bounds) -> Option<AscendingSeq> {
    assert_eq!(beta.len(), a.n(), "reduced sequence and bounds differ in length");
    let m = beta.m();
    let mut min_bound = vec![u32::MAX; m];
    for (&b, &bound) in beta.seq.iter().zip(&a.0) {
        let slot = &mut min_bound[b as usize - 1];
        *slot = (*slot).min(bound);
    }
    let mut gamma = vec![0u32; m];
    let mut cap = u32::MAX;
    for k in (0..m).rev() {
        let g = min_bound[k].min(cap);
        if (g as usize) < k + 1 {
            return None;
        }
        gamma[k] = g;
        cap = g - 1;
    }
    Some(AscendingSeq(gamma))
}

/// Membership in `A(a, B, C)`, reporting the first failed condition.
pub fn check_member(spec: &PhormaSpec, alpha: &[u32]) -> Result<std::result::Result<(), Violation>> {
    if alpha.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            actual: alpha.len(),
        });
    }
    if alpha.contains(&0) || !spec.bounds.dominates(alpha) {
        return Ok(Err(Violation::Bounds));
    }
    if !spec.restriction.eval(alpha) {
        return Ok(Err(Violation::Restriction));
    }
    if !matches!(spec.constraint, CompConstraint::All) && !spec.constraint.admits(&occ(alpha)?) {
        return Ok(Err(Violation::Composition));
    }
    Ok(Ok(()))
}

pub fn member(spec: &PhormaSpec, alpha: &[u32]) -> Result<bool> {
    Ok(check_member(spec, alpha)?.is_ok())
}
