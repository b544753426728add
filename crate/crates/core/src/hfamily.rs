//! The ascending-sequence family `H`: vertices are strictly increasing
//! sequences, with two successor operators.
//!
//! * `w_step` lowers the last entry by one and pulls earlier entries down
//!   just enough to stay strictly increasing (local label 0).
//! * `s_step` drops the last entry (local label 1 when `w_step` exists,
//!   0 otherwise).
//!
//! A path from a roof `γ*` to the sink `t` takes exactly `m` drop steps; the
//! vertices it leaves by a drop step are its *falls*, and their last entries
//! read in reverse spell an ascending `γ ≤ γ*`. The rank of `γ` is the sum
//! of the orders of the `w_step` successors of its falls.
//!
//! Edges are never stored. Vertices live in buckets keyed by
//! `(last entry, length)`, each sorted lexicographically and reached through
//! a dense `a⋆ × n⋆` table.

use std::collections::{BTreeMap, HashSet};

use crate::count::Count;
use crate::error::{fmt_seq, Error, Result};
use crate::seqcore::AscendingSeq;

pub fn w_step(gamma: &AscendingSeq) -> Result<Option<AscendingSeq>> {
    if gamma.is_sink() {
        return Err(Error::Sink);
    }
    Ok(w_raw(gamma.as_slice()).map(AscendingSeq::new_unchecked))
}

pub fn s_step(gamma: &AscendingSeq) -> Option<AscendingSeq> {
    let s = gamma.as_slice();
    (!s.is_empty()).then(|| AscendingSeq::new_unchecked(s[..s.len() - 1].to_vec()))
}

fn w_raw(g: &[u32]) -> Option<Vec<u32>> {
    let m = g.len();
    if g[m - 1] as usize == m {
        return None;
    }
    let mut out = g.to_vec();
    out[m - 1] -= 1;
    for i in (0..m - 1).rev() {
        out[i] = out[i].min(out[i + 1] - 1);
    }
    Some(out)
}

/// The vertex reached from `v` by repeated `w_step`s until the last entry is
/// `x`: entry `i` becomes `min(v_i, x - (k - 1 - i))`. Requires `len <= x <= v_last`.
fn lowered(v: &[u32], x: u32) -> Vec<u32> {
    let k = v.len() as u32;
    v.iter()
        .enumerate()
        .map(|(i, &vi)| vi.min(x + 1 + i as u32 - k))
        .collect()
}

/// A fall with its post-fall and the post-fall's order, if any.
pub type Fall<C> = (AscendingSeq, Option<(AscendingSeq, C)>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex<C> {
    seq: Box<[u32]>,
    order: C,
    w_order: Option<C>,
}

impl<C> Vertex<C> {
    pub fn seq(&self) -> &[u32] {
        &self.seq
    }

    /// Number of paths to the sink.
    pub fn order(&self) -> &C {
        &self.order
    }

    /// Order of the `w_step` successor, if it exists.
    pub fn w_order(&self) -> Option<&C> {
        self.w_order.as_ref()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket<C> {
    pub last: u32,
    pub len: usize,
    pub vertices: Vec<Vertex<C>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HVertexStore<C> {
    a_star: u32,
    n_star: usize,
    /// `(last - 1) * n_star + (len - 1)` → bucket position, `u32::MAX` if empty.
    table: Vec<u32>,
    buckets: Vec<Bucket<C>>,
    maximal: Vec<AscendingSeq>,
    one: C,
}

const NO_BUCKET: u32 = u32::MAX;

impl<C: Count> HVertexStore<C> {
    /// The union of the families below every roof. An empty roof set yields
    /// a store holding only the sink.
    pub fn build(roofs: &[AscendingSeq]) -> Result<Self> {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut stack: Vec<Vec<u32>> = roofs.iter().filter(|r| !r.is_sink()).map(|r| r.as_slice().to_vec()).collect();
        while let Some(v) = stack.pop() {
            if seen.contains(&v) {
                continue;
            }
            if let Some(w) = w_raw(&v) {
                if !seen.contains(&w) {
                    stack.push(w);
                }
            }
            if v.len() > 1 {
                let s = v[..v.len() - 1].to_vec();
                if !seen.contains(&s) {
                    stack.push(s);
                }
            }
            seen.insert(v);
        }
        Self::from_vertex_set(seen, roofs)
    }

    /// Assembles a store from a vertex set closed under both steps and
    /// computes every order. `roofs` determines the maximal elements.
    pub fn from_vertex_set(vertices: HashSet<Vec<u32>>, roofs: &[AscendingSeq]) -> Result<Self> {
        let mut has_pred: HashSet<&[u32]> = HashSet::new();
        let mut wsucc: Vec<Vec<u32>> = Vec::new();
        for v in &vertices {
            if let Some(w) = w_raw(v) {
                if !vertices.contains(&w) {
                    return Err(Error::Corrupt(format!("successor {} missing", fmt_seq(&w))));
                }
                wsucc.push(w);
            }
            if v.len() > 1 {
                let s = &v[..v.len() - 1];
                if !vertices.contains(s) {
                    return Err(Error::Corrupt(format!("successor {} missing", fmt_seq(s))));
                }
                has_pred.insert(s);
            }
        }
        for w in &wsucc {
            has_pred.insert(w.as_slice());
        }
        let mut maximal: Vec<AscendingSeq> = roofs
            .iter()
            .filter(|r| r.is_sink() || !has_pred.contains(r.as_slice()))
            .cloned()
            .collect();
        maximal.sort();
        maximal.dedup();
        // the sink is only maximal when it is the sole roof
        if maximal.len() > 1 {
            maximal.retain(|r| !r.is_sink());
        }
        for r in roofs {
            if !r.is_sink() && !vertices.contains(r.as_slice()) {
                return Err(Error::VertexNotFound(r.to_string()));
            }
        }

        let mut grouped: BTreeMap<(usize, u32), Vec<Vec<u32>>> = BTreeMap::new();
        let mut a_star = 0;
        let mut n_star = 0;
        for v in vertices {
            let last = *v.last().ok_or_else(|| Error::Corrupt("empty vertex".into()))?;
            a_star = a_star.max(last);
            n_star = n_star.max(v.len());
            grouped.entry((v.len(), last)).or_default().push(v);
        }
        let mut store = HVertexStore {
            a_star,
            n_star,
            table: vec![NO_BUCKET; a_star as usize * n_star],
            buckets: Vec::with_capacity(grouped.len()),
            maximal,
            one: C::one(),
        };
        // (len, last) ascending: both successors of a vertex are settled first
        for ((len, last), mut seqs) in grouped {
            seqs.sort();
            let mut bucket = Bucket {
                last,
                len,
                vertices: Vec::with_capacity(seqs.len()),
            };
            for seq in seqs {
                let s_order = store.order_of(&seq[..len - 1])?.clone();
                let w_order = match w_raw(&seq) {
                    Some(w) => Some(store.order_of(&w)?.clone()),
                    None => None,
                };
                let order = match &w_order {
                    Some(w) => s_order.add_checked(w)?,
                    None => s_order,
                };
                bucket.vertices.push(Vertex {
                    seq: seq.into_boxed_slice(),
                    order,
                    w_order,
                });
            }
            let slot = store.slot(last, len).expect("within table");
            store.table[slot] = store.buckets.len() as u32;
            store.buckets.push(bucket);
        }
        Ok(store)
    }

    fn slot(&self, last: u32, len: usize) -> Option<usize> {
        (last >= 1 && last <= self.a_star && len >= 1 && len <= self.n_star)
            .then(|| (last as usize - 1) * self.n_star + len - 1)
    }

    pub fn bucket(&self, last: u32, len: usize) -> Option<&Bucket<C>> {
        let slot = self.slot(last, len)?;
        match self.table[slot] {
            NO_BUCKET => None,
            b => Some(&self.buckets[b as usize]),
        }
    }

    pub fn vertex(&self, seq: &[u32]) -> Option<&Vertex<C>> {
        let last = *seq.last()?;
        let bucket = self.bucket(last, seq.len())?;
        bucket
            .vertices
            .binary_search_by(|v| v.seq.as_ref().cmp(seq))
            .ok()
            .map(|k| &bucket.vertices[k])
    }

    pub fn contains(&self, seq: &[u32]) -> bool {
        seq.is_empty() || self.vertex(seq).is_some()
    }

    fn order_of(&self, seq: &[u32]) -> Result<&C> {
        if seq.is_empty() {
            return Ok(&self.one);
        }
        self.vertex(seq)
            .map(|v| &v.order)
            .ok_or_else(|| Error::VertexNotFound(fmt_seq(seq)))
    }

    /// Number of paths from `gamma` to the sink.
    pub fn order(&self, gamma: &AscendingSeq) -> Result<C> {
        self.order_of(gamma.as_slice()).cloned()
    }

    fn check_pair(&self, roof: &AscendingSeq, gamma: &AscendingSeq) -> Result<()> {
        let dominated = roof.m() == gamma.m() && gamma.as_slice().iter().zip(roof.as_slice()).all(|(g, r)| g <= r);
        if !dominated {
            return Err(Error::NotDominated {
                gamma: gamma.to_string(),
                roof: roof.to_string(),
            });
        }
        if !self.contains(roof.as_slice()) {
            return Err(Error::VertexNotFound(roof.to_string()));
        }
        Ok(())
    }

    /// The falls of the path encoding `gamma` below `roof`, in path order,
    /// paired with their `w_step` successors (the post-falls) and orders.
    pub fn post_falls(&self, roof: &AscendingSeq, gamma: &AscendingSeq) -> Result<Vec<Fall<C>>> {
        self.check_pair(roof, gamma)?;
        let mut out = Vec::with_capacity(gamma.m());
        let mut v = roof.as_slice().to_vec();
        for k in (1..=gamma.m()).rev() {
            let fall = lowered(&v, gamma.as_slice()[k - 1]);
            let vert = self.vertex(&fall).ok_or_else(|| Error::VertexNotFound(fmt_seq(&fall)))?;
            let post = match (w_raw(&fall), &vert.w_order) {
                (Some(w), Some(o)) => Some((AscendingSeq::new_unchecked(w), o.clone())),
                _ => None,
            };
            v = fall[..k - 1].to_vec();
            out.push((AscendingSeq::new_unchecked(fall), post));
        }
        Ok(out)
    }

    /// Local perfect hash of `gamma` within the family below `roof`:
    /// one bucket lookup per fall.
    pub fn h_rank(&self, roof: &AscendingSeq, gamma: &AscendingSeq) -> Result<C> {
        self.check_pair(roof, gamma)?;
        let g = gamma.as_slice();
        let mut rank = C::zero();
        let mut v: Vec<u32> = roof.as_slice().to_vec();
        for k in (1..=g.len()).rev() {
            let fall = lowered(&v, g[k - 1]);
            let vert = self.vertex(&fall).ok_or_else(|| Error::VertexNotFound(fmt_seq(&fall)))?;
            if let Some(w) = &vert.w_order {
                rank = rank.add_checked(w)?;
            }
            v = fall;
            v.pop();
        }
        Ok(rank)
    }

    pub fn h_unrank(&self, roof: &AscendingSeq, rank: &C) -> Result<AscendingSeq> {
        let total = self.order(roof)?;
        if rank >= &total {
            return Err(Error::RankOutOfRange {
                rank: rank.to_string(),
                total: total.to_string(),
            });
        }
        let m = roof.m();
        let mut r = rank.clone();
        let mut gamma = vec![0u32; m];
        let mut v: Vec<u32> = roof.as_slice().to_vec();
        for k in (1..=m).rev() {
            // Walking down the w-chain from v, the path keeps taking w while
            // r < order(w-successor). Those orders grow with the last entry,
            // so the stopping point is the largest x whose w-successor order
            // is <= r (or the chain's end at x = k).
            let top = v[k - 1];
            let below = |x: u32| -> Result<C> { self.order_of(&lowered(&v, x - 1)).cloned() };
            let (mut lo, mut hi) = (k as u32, top);
            while lo < hi {
                let mid = lo + (hi - lo).div_ceil(2);
                if below(mid)? <= r {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            let x = lo;
            if x > k as u32 {
                let skipped = below(x)?;
                r = r.checked_sub(&skipped).expect("skipped <= r");
            }
            gamma[k - 1] = x;
            v = lowered(&v, x);
            v.pop();
        }
        Ok(AscendingSeq::new_unchecked(gamma))
    }

    /// Vertex count including the sink.
    pub fn vertex_count(&self) -> usize {
        1 + self.buckets.iter().map(|b| b.vertices.len()).sum::<usize>()
    }

    /// Non-empty buckets, counting the sink as its own bucket.
    pub fn bucket_count(&self) -> usize {
        1 + self.buckets.len()
    }

    /// Largest bucket size (at least 1, the sink).
    pub fn max_bucket(&self) -> usize {
        self.buckets.iter().map(|b| b.vertices.len()).max().unwrap_or(1)
    }

    pub fn buckets(&self) -> &[Bucket<C>] {
        &self.buckets
    }

    /// Maximal roofs: those not reachable from another roof.
    pub fn maximal_roofs(&self) -> &[AscendingSeq] {
        &self.maximal
    }

    /// Largest stored last entry.
    pub fn a_star(&self) -> u32 {
        self.a_star
    }

    /// Longest stored vertex.
    pub fn n_star(&self) -> usize {
        self.n_star
    }

    /// Every non-sink vertex, bucket by bucket.
    pub fn vertices(&self) -> impl Iterator<Item = &Vertex<C>> {
        self.buckets.iter().flat_map(|b| b.vertices.iter())
    }
}
