//! n-compositions: the `L∞` lattice family for counting and ranking, plus
//! the constraint `C` that selects admissible occurrence vectors.
//!
//! A composition with `m` parts of `n` corresponds to a path from `(n, m)`
//! to `(1, 1)` in the lattice whose west edge `(p, q) → (p-1, q)` extends
//! the current part and whose southwest edge `(p, q) → (p-1, q-1)` closes it.
//! The west edge carries local label 0 whenever it exists.

use std::fmt;

use crate::boolexpr::{BoolExpr, Tri};
use crate::count::Count;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidComposition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidComposition("parts must be positive".into()));
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Sum of the parts.
    pub fn n(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of parts.
    pub fn m(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::error::fmt_seq(&self.0))
    }
}

/// Which occurrence vectors are admitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompConstraint {
    All,
    Explicit(Vec<Composition>),
    /// Restriction over parts `d1..dn`; a literal naming a part beyond the
    /// composition's length is false.
    Restricted(BoolExpr),
}

impl CompConstraint {
    pub fn admits(&self, delta: &Composition) -> bool {
        match self {
            CompConstraint::All => true,
            CompConstraint::Explicit(list) => list.contains(delta),
            CompConstraint::Restricted(e) => e.eval_lenient(delta.parts()),
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        match self {
            CompConstraint::All => Ok(()),
            CompConstraint::Explicit(list) => {
                for c in list {
                    if c.n() as usize != n {
                        return Err(Error::InvalidComposition(format!("{c} is not a composition of {n}")));
                    }
                }
                Ok(())
            }
            CompConstraint::Restricted(e) => e.check_dim(n, 'd'),
        }
    }
}

/// The occurrence composition: part `i` is the multiplicity of the i-th
/// smallest distinct value.
pub fn occ(seq: &[u32]) -> Result<Composition> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if seq.contains(&0) {
        return Err(Error::NonPositiveEntry);
    }
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    let mut parts = Vec::new();
    let mut k = 0;
    while k < sorted.len() {
        let run = sorted[k..].iter().take_while(|&&v| v == sorted[k]).count();
        parts.push(run as u32);
        k += run;
    }
    Ok(Composition(parts))
}

/// One step of an `L∞` path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeStep {
    West,
    SouthWest,
}

/// Encodes a composition as its `(n, m) → (1, 1)` lattice path (n-1 steps).
pub fn to_lattice_path(delta: &Composition) -> Vec<LatticeStep> {
    let mut path = Vec::with_capacity(delta.n() as usize - 1);
    for (k, &part) in delta.parts().iter().enumerate() {
        path.extend(std::iter::repeat_n(LatticeStep::West, part as usize - 1));
        if k + 1 < delta.m() {
            path.push(LatticeStep::SouthWest);
        }
    }
    path
}

/// Decodes a lattice path starting at `(path.len() + 1, m)`.
pub fn from_lattice_path(path: &[LatticeStep]) -> Composition {
    let mut parts = vec![1u32];
    for step in path.iter().rev() {
        match step {
            LatticeStep::West => parts[0] += 1,
            LatticeStep::SouthWest => parts.insert(0, 1),
        }
    }
    Composition(parts)
}

/// Path counts to `(1, 1)` for every lattice point with `q <= p <= n`.
struct LatticeOrders<C> {
    m: usize,
    table: Vec<C>,
}

impl<C: Count> LatticeOrders<C> {
    fn new(n: usize, m: usize) -> Result<Self> {
        let mut table = vec![C::zero(); (n + 1) * (m + 1)];
        let w = m + 1;
        table[w + 1] = C::one();
        for p in 2..=n {
            for q in 1..=m.min(p) {
                let mut v = C::zero();
                if q < p {
                    v = v.add_checked(&table[(p - 1) * w + q])?;
                }
                if q >= 2 {
                    v = v.add_checked(&table[(p - 1) * w + q - 1])?;
                }
                table[p * w + q] = v;
            }
        }
        Ok(LatticeOrders { m, table })
    }

    fn get(&self, p: usize, q: usize) -> &C {
        &self.table[p * (self.m + 1) + q]
    }

    fn has_west(p: usize, q: usize) -> bool {
        p >= 2 && q < p
    }
}

fn check_domain(n: usize, m: usize) -> Result<()> {
    if m < 1 || m > n {
        return Err(Error::InvalidComposition(format!("no composition of {n} into {m} parts")));
    }
    Ok(())
}

/// `|C^n_m|`, counted as lattice paths.
pub fn comp_count<C: Count>(n: usize, m: usize) -> Result<C> {
    check_domain(n, m)?;
    Ok(LatticeOrders::<C>::new(n, m)?.get(n, m).clone())
}

/// Rank of `delta` among the compositions of its sum with the same length.
pub fn comp_rank<C: Count>(delta: &Composition) -> Result<C> {
    let (n, m) = (delta.n() as usize, delta.m());
    let orders = LatticeOrders::<C>::new(n, m)?;
    let (mut p, mut q) = (n, m);
    let mut rank = C::zero();
    for step in to_lattice_path(delta) {
        match step {
            LatticeStep::West => {}
            LatticeStep::SouthWest => {
                if LatticeOrders::<C>::has_west(p, q) {
                    rank = rank.add_checked(orders.get(p - 1, q))?;
                }
                q -= 1;
            }
        }
        p -= 1;
    }
    Ok(rank)
}

pub fn comp_unrank<C: Count>(n: usize, m: usize, rank: &C) -> Result<Composition> {
    check_domain(n, m)?;
    let orders = LatticeOrders::<C>::new(n, m)?;
    if rank >= orders.get(n, m) {
        return Err(Error::RankOutOfRange {
            rank: rank.to_string(),
            total: orders.get(n, m).to_string(),
        });
    }
    let mut r = rank.clone();
    let (mut p, mut q) = (n, m);
    let mut path = Vec::with_capacity(n - 1);
    while p > 1 {
        let take_west = if LatticeOrders::<C>::has_west(p, q) {
            let west = orders.get(p - 1, q);
            if &r < west {
                true
            } else {
                r = r.checked_sub(west).expect("r >= west");
                false
            }
        } else {
            false
        };
        if take_west {
            path.push(LatticeStep::West);
        } else {
            path.push(LatticeStep::SouthWest);
            q -= 1;
        }
        p -= 1;
    }
    Ok(from_lattice_path(&path))
}

/// Admissible compositions of `n`, lexicographic by parts.
pub fn enum_comps(n: usize, constraint: &CompConstraint) -> Box<dyn Iterator<Item = Composition> + '_> {
    if n == 0 {
        return Box::new(std::iter::empty());
    }
    match constraint {
        CompConstraint::All => Box::new(AllComps {
            next: Some(vec![1; n]),
        }),
        CompConstraint::Explicit(list) => {
            let mut list: Vec<Composition> = list.iter().filter(|c| c.n() as usize == n).cloned().collect();
            list.sort();
            list.dedup();
            Box::new(list.into_iter())
        }
        CompConstraint::Restricted(expr) => Box::new(RestrictedComps::new(n, expr)),
    }
}

struct AllComps {
    next: Option<Vec<u32>>,
}

impl Iterator for AllComps {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let last = succ.pop().unwrap();
        if let Some(tail) = succ.last_mut() {
            *tail += 1;
            succ.extend(std::iter::repeat_n(1, last as usize - 1));
            self.next = Some(succ);
        }
        Some(Composition(current))
    }
}

/// Depth-first search over parts with three-valued pruning on prefixes.
struct RestrictedComps<'e> {
    n: u32,
    expr: &'e BoolExpr,
    parts: Vec<u32>,
    partial: Vec<Option<u32>>,
    next_value: Vec<u32>,
    sum: u32,
}

impl<'e> RestrictedComps<'e> {
    fn new(n: usize, expr: &'e BoolExpr) -> Self {
        RestrictedComps {
            n: n as u32,
            expr,
            parts: Vec::with_capacity(n),
            partial: vec![None; n.max(expr.max_index())],
            next_value: vec![1],
            sum: 0,
        }
    }

    fn pop(&mut self) {
        let v = self.parts.pop().unwrap();
        self.partial[self.parts.len()] = None;
        self.sum -= v;
    }
}

impl Iterator for RestrictedComps<'_> {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        loop {
            let depth = self.parts.len();
            let v = self.next_value[depth];
            if self.sum + v > self.n {
                if depth == 0 {
                    return None;
                }
                self.next_value.pop();
                self.pop();
                continue;
            }
            self.next_value[depth] = v + 1;
            self.parts.push(v);
            self.partial[depth] = Some(v);
            self.sum += v;
            if self.expr.eval_partial_unchecked(&self.partial) == Tri::False {
                self.pop();
                continue;
            }
            if self.sum == self.n {
                let hit = self.expr.eval_lenient(&self.parts).then(|| Composition(self.parts.clone()));
                self.pop();
                if hit.is_some() {
                    return hit;
                }
            } else {
                self.next_value.push(1);
            }
        }
    }
}
