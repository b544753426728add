//! The compiled digraph: a source `s`, one vertex per reduced sequence
//! (lexicographic, so its label is its position), each pointing at its roof
//! inside the shared ascending-sequence store.
//!
//! The rank of `α` is `offset(reduce(α)) + h_rank(roof, sort_distinct(α))`,
//! where `offset(β)` sums the roof orders of all reduced sequences below `β`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::count::Count;
use crate::error::{Error, Result};
use crate::hfamily::HVertexStore;
use crate::redgen::gen_reduced_all;
use crate::seqcore::{check_member, recover, reduce, sort_distinct, AscendingSeq, PhormaSpec, ReducedSeq};

/// One row of the reduced layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedEntry<C> {
    pub beta: ReducedSeq,
    pub roof: AscendingSeq,
    /// Paths below the roof, i.e. members sharing this reduction.
    pub order: C,
    /// Members whose reduction is lexicographically smaller.
    pub offset: C,
}

/// Size parameters of a compiled index.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexStats<C> {
    /// Vertices of the whole digraph: source, reduced layer and store.
    pub v_g: usize,
    /// Store vertices including the sink.
    pub v_h: usize,
    pub red_count: usize,
    pub total: C,
    /// Distinct roofs.
    pub roof_count: usize,
    /// Roofs not reachable from another roof.
    pub max_roof_count: usize,
    /// Largest bucket.
    pub lambda: usize,
    /// Non-empty buckets, the sink counting as one.
    pub nu: usize,
    pub mu: f64,
    /// `total / Π a_i`.
    pub density: f64,
    pub a_star: u32,
    pub n_star: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhormaIndex<C> {
    spec: PhormaSpec,
    reduced: Vec<ReducedEntry<C>>,
    store: HVertexStore<C>,
    total: C,
    stats: IndexStats<C>,
}

impl<C: Count> PhormaIndex<C> {
    pub fn compile(spec: &PhormaSpec) -> Result<Self> {
        let reduced = gen_reduced_all(spec)?;
        let mut roofs: Vec<AscendingSeq> = reduced.iter().map(|(_, r)| r.clone()).collect();
        roofs.sort();
        roofs.dedup();
        let store = HVertexStore::build(&roofs)?;
        Self::assemble(spec.clone(), reduced, store)
    }

    /// Builds the reduced layer on top of an existing store.
    pub(crate) fn assemble(spec: PhormaSpec, rows: Vec<(ReducedSeq, AscendingSeq)>, store: HVertexStore<C>) -> Result<Self> {
        let mut offset = C::zero();
        let mut reduced = Vec::with_capacity(rows.len());
        for (beta, roof) in rows {
            let order = store.order(&roof)?;
            let next = offset.add_checked(&order)?;
            reduced.push(ReducedEntry {
                beta,
                roof,
                order,
                offset,
            });
            offset = next;
        }
        let total = offset;
        let stats = compute_stats(&spec, &reduced, &store, &total);
        Ok(PhormaIndex {
            spec,
            reduced,
            store,
            total,
            stats,
        })
    }

    pub fn spec(&self) -> &PhormaSpec {
        &self.spec
    }

    pub fn reduced(&self) -> &[ReducedEntry<C>] {
        &self.reduced
    }

    pub fn store(&self) -> &HVertexStore<C> {
        &self.store
    }

    /// `|A(a, B, C)|`.
    pub fn count(&self) -> &C {
        &self.total
    }

    pub fn stats(&self) -> &IndexStats<C> {
        &self.stats
    }

    pub fn entry(&self, beta: &ReducedSeq) -> Option<&ReducedEntry<C>> {
        self.reduced
            .binary_search_by(|e| e.beta.cmp(beta))
            .ok()
            .map(|k| &self.reduced[k])
    }

    /// Perfect hash of a member.
    pub fn rank(&self, alpha: &[u32]) -> Result<C> {
        check_member(&self.spec, alpha)?.map_err(Error::NotAMember)?;
        let beta = reduce(alpha)?;
        let entry = self
            .entry(&beta)
            .ok_or_else(|| Error::Corrupt(format!("reduced sequence {beta} missing from index")))?;
        let local = self.store.h_rank(&entry.roof, &sort_distinct(alpha)?)?;
        entry.offset.add_checked(&local)
    }

    pub fn unrank(&self, rank: &C) -> Result<Vec<u32>> {
        if rank >= &self.total {
            return Err(Error::RankOutOfRange {
                rank: rank.to_string(),
                total: self.total.to_string(),
            });
        }
        // every row has a positive order, so offsets strictly increase
        let k = self.reduced.partition_point(|e| &e.offset <= rank) - 1;
        let entry = &self.reduced[k];
        let local = rank.checked_sub(&entry.offset).expect("offset <= rank");
        let gamma = self.store.h_unrank(&entry.roof, &local)?;
        recover(&entry.beta, &gamma)
    }

    /// The member ranked immediately after `alpha`.
    pub fn next(&self, alpha: &[u32]) -> Result<Option<Vec<u32>>> {
        let r = self.rank(alpha)?.add_checked(&C::one())?;
        if r == self.total {
            return Ok(None);
        }
        self.unrank(&r).map(Some)
    }

    /// Uniform member drawn with a generator seeded by `seed`.
    pub fn sample(&self, seed: u64) -> Result<Vec<u32>> {
        Ok(self.sample_many(seed, 1)?.pop().expect("one draw"))
    }

    /// `count` independent draws from a single seeded stream.
    pub fn sample_many(&self, seed: u64, count: usize) -> Result<Vec<Vec<u32>>> {
        if self.total.is_zero() {
            return Err(Error::EmptyFamily);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| self.unrank(&C::uniform_below(&self.total, &mut rng)))
            .collect()
    }

    /// Members with ranks in `from..to` (clamped to the family), in rank order.
    pub fn range(&self, from: C, to: Option<C>) -> RankRange<'_, C> {
        let end = match to {
            Some(t) if t < self.total => t,
            _ => self.total.clone(),
        };
        RankRange {
            index: self,
            next: from,
            end,
        }
    }
}

pub struct RankRange<'a, C> {
    index: &'a PhormaIndex<C>,
    next: C,
    end: C,
}

impl<C: Count> Iterator for RankRange<'_, C> {
    type Item = Result<Vec<u32>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let item = self.index.unrank(&self.next);
        self.next = self.next.clone() + C::one();
        Some(item)
    }
}

fn compute_stats<C: Count>(spec: &PhormaSpec, reduced: &[ReducedEntry<C>], store: &HVertexStore<C>, total: &C) -> IndexStats<C> {
    let mut roofs: Vec<&AscendingSeq> = reduced.iter().map(|e| &e.roof).collect();
    roofs.sort();
    roofs.dedup();
    let v_h = store.vertex_count();
    let nu = store.bucket_count();
    let density = if total.is_zero() {
        0.0
    } else {
        (total.ln() - spec.bounds().ln_volume()).exp()
    };
    IndexStats {
        v_g: 1 + reduced.len() + v_h,
        v_h,
        red_count: reduced.len(),
        total: total.clone(),
        roof_count: roofs.len(),
        max_roof_count: if roofs.is_empty() { 0 } else { store.maximal_roofs().len() },
        lambda: store.max_bucket(),
        nu,
        mu: v_h as f64 / nu as f64,
        density,
        a_star: spec.bounds().max(),
        n_star: reduced.iter().map(|e| e.roof.m()).max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::BoolExpr;
    use crate::builtin;
    use crate::compositions::{CompConstraint, Composition};
    use crate::seqcore::{Bounds, Restriction};

    type Index = PhormaIndex<u64>;

    fn l75() -> Index {
        Index::compile(&builtin::l_piece(7, 5).unwrap()).unwrap()
    }

    #[test]
    fn l_piece_parameters() {
        let idx = l75();
        let s = idx.stats();
        assert_eq!((s.v_g, s.v_h, s.red_count, s.total), (32, 22, 9, 190));
        assert_eq!((s.roof_count, s.max_roof_count, s.lambda), (7, 4, 2));
        assert!((s.mu - 1.0476).abs() < 1e-4);
        assert!((s.density * 1e4 - 1551.0).abs() < 1.0);
    }

    #[test]
    fn offsets_accumulate() {
        let idx = l75();
        let mut acc = 0;
        for e in idx.reduced() {
            assert_eq!(e.offset, acc);
            assert!(e.order > 0);
            acc += e.order;
        }
        assert_eq!(acc, 190);
    }

    #[test]
    fn rank_examples() {
        let idx = l75();
        assert_eq!(idx.rank(&[1, 1, 1, 1]), Ok(0));
        assert_eq!(idx.unrank(&0).unwrap(), vec![1, 1, 1, 1]);
        assert!(matches!(idx.unrank(&190), Err(Error::RankOutOfRange { .. })));
        assert_eq!(
            idx.rank(&[5, 5, 7, 5]),
            Err(Error::NotAMember(crate::error::Violation::Restriction))
        );
        for r in 0..190 {
            let alpha = idx.unrank(&r).unwrap();
            assert_eq!(idx.rank(&alpha), Ok(r));
        }
    }

    #[test]
    fn next_sweep() {
        let idx = l75();
        let mut cur = idx.unrank(&0).unwrap();
        let mut visited = 1;
        while let Some(n) = idx.next(&cur).unwrap() {
            assert_eq!(idx.rank(&n).unwrap(), idx.rank(&cur).unwrap() + 1);
            cur = n;
            visited += 1;
        }
        assert_eq!(visited, 190);
        assert_eq!(idx.next(&idx.unrank(&189).unwrap()), Ok(None));
    }

    #[test]
    fn symmetric_pair() {
        let idx = Index::compile(&builtin::sym_ge(2, 9).unwrap()).unwrap();
        assert_eq!((*idx.count(), idx.stats().red_count), (45, 2));
        assert!((idx.stats().density * 1e4 - 5556.0).abs() < 1.0);
    }

    #[test]
    fn empty_family() {
        let spec = PhormaSpec::new(
            Bounds::new(vec![1, 1]).unwrap(),
            Restriction::Expr(BoolExpr::Empty),
            CompConstraint::Explicit(vec![Composition::new(vec![1, 1]).unwrap()]),
        )
        .unwrap();
        let idx = Index::compile(&spec).unwrap();
        assert_eq!(*idx.count(), 0);
        assert!(idx.reduced().is_empty());
        assert_eq!(idx.sample(1), Err(Error::EmptyFamily));
        assert!(matches!(idx.unrank(&0), Err(Error::RankOutOfRange { .. })));
        assert_eq!(idx.stats().v_g, 2);
    }

    #[test]
    fn single_member_family() {
        let idx = Index::compile(&builtin::sym_gt(9, 9).unwrap()).unwrap();
        assert_eq!(*idx.count(), 1);
        for seed in 0..5 {
            assert_eq!(idx.sample(seed).unwrap(), vec![9, 8, 7, 6, 5, 4, 3, 2, 1]);
        }
    }

    #[test]
    fn samples_are_deterministic_members() {
        let idx = l75();
        for seed in 0..50 {
            let s = idx.sample(seed).unwrap();
            assert_eq!(idx.sample(seed).unwrap(), s);
            assert!(crate::seqcore::member(idx.spec(), &s).unwrap());
        }
    }

    #[test]
    fn big_counts_agree() {
        let spec = builtin::l_piece(9, 6).unwrap();
        let small = Index::compile(&spec).unwrap();
        let big = PhormaIndex::<num_bigint::BigUint>::compile(&spec).unwrap();
        assert_eq!(big.count().to_string(), small.count().to_string());
        for r in 0..*small.count() {
            let alpha = small.unrank(&r).unwrap();
            assert_eq!(big.unrank(&num_bigint::BigUint::from(r)).unwrap(), alpha);
        }
    }

    #[test]
    fn overflow_surfaces() {
        // C(1011, 12) is about 2e27
        let spec = builtin::sym_ge(12, 1000).unwrap();
        assert_eq!(Index::compile(&spec).err(), Some(Error::Overflow));
        assert!(PhormaIndex::<u128>::compile(&spec).is_ok());
    }

    #[test]
    fn range_iterates_in_rank_order() {
        let idx = l75();
        let got: Vec<Vec<u32>> = idx.range(10, Some(15)).map(|r| r.unwrap()).collect();
        let want: Vec<Vec<u32>> = (10..15).map(|r| idx.unrank(&r).unwrap()).collect();
        assert_eq!(got, want);
        assert_eq!(idx.range(185, None).count(), 5);
    }
}
