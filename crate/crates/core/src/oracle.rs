//! Brute-force reference: scan every `α ≤ a` and keep the members.
//!
//! Shares nothing with the generator or the H family beyond membership.

use serde::Serialize;

use crate::count::Count;
use crate::error::{fmt_seq, Error, Result};
use crate::index::PhormaIndex;
use crate::seqcore::{member, PhormaSpec};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Number of candidates the scan would visit, saturating.
pub fn candidate_count(spec: &PhormaSpec) -> u128 {
    spec.bounds()
        .as_slice()
        .iter()
        .fold(1u128, |acc, &a| acc.saturating_mul(a as u128))
}

/// All members, lexicographically sorted.
pub fn brute_enum(spec: &PhormaSpec, budget: u64) -> Result<Vec<Vec<u32>>> {
    let candidates = candidate_count(spec);
    if candidates > budget as u128 {
        return Err(Error::BudgetExceeded {
            candidates: candidates.to_string(),
            budget,
        });
    }
    let a = spec.bounds().as_slice();
    let mut alpha = vec![1u32; a.len()];
    let mut out = Vec::new();
    loop {
        if member(spec, &alpha)? {
            out.push(alpha.clone());
        }
        // odometer, last position fastest
        let mut pos = a.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if alpha[pos] < a[pos] {
                alpha[pos] += 1;
                break;
            }
            alpha[pos] = 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub spec_id: String,
    pub brute_count: u64,
    pub index_count: String,
    pub set_equal: bool,
    /// Ranks where `rank(unrank(r)) != r`.
    pub round_trip_failures: Vec<String>,
    pub first_divergence: Option<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.set_equal && self.round_trip_failures.is_empty() && self.first_divergence.is_none()
    }
}

/// Cross-checks every query of `idx` against the brute-force scan.
pub fn verify<C: Count>(spec: &PhormaSpec, idx: &PhormaIndex<C>, budget: u64) -> Result<OracleReport> {
    let brute = brute_enum(spec, budget)?;
    let mut report = OracleReport {
        spec_id: crate::specio::spec_id(spec),
        brute_count: brute.len() as u64,
        index_count: idx.count().to_string(),
        set_equal: false,
        round_trip_failures: Vec::new(),
        first_divergence: None,
    };
    let note = |msg: String, report: &mut OracleReport| {
        report.first_divergence.get_or_insert(msg);
    };

    let total = idx.count().to_u64();
    if total != Some(brute.len() as u64) {
        note(
            format!("count {} but brute force found {}", idx.count(), brute.len()),
            &mut report,
        );
    }

    // unrank over the full range, then rank each image
    let mut images = Vec::with_capacity(brute.len());
    let limit = total.unwrap_or(0).min(brute.len() as u64 + 1);
    for r in 0..limit {
        let rc = C::from_u64(r).ok_or(Error::Overflow)?;
        match idx.unrank(&rc) {
            Ok(alpha) => {
                match idx.rank(&alpha) {
                    Ok(back) if back == rc => {}
                    Ok(back) => {
                        report.round_trip_failures.push(r.to_string());
                        note(format!("rank(unrank({r})) = {back}"), &mut report);
                    }
                    Err(e) => {
                        report.round_trip_failures.push(r.to_string());
                        note(format!("rank({}) failed: {e}", fmt_seq(&alpha)), &mut report);
                    }
                }
                images.push(alpha);
            }
            Err(e) => {
                report.round_trip_failures.push(r.to_string());
                note(format!("unrank({r}) failed: {e}"), &mut report);
            }
        }
    }
    let mut sorted = images.clone();
    sorted.sort();
    sorted.dedup();
    report.set_equal = sorted.len() == images.len() && sorted == brute;
    if !report.set_equal {
        let diff = brute
            .iter()
            .zip(&sorted)
            .position(|(x, y)| x != y)
            .unwrap_or(brute.len().min(sorted.len()));
        note(
            format!(
                "sets differ at sorted position {diff}: brute {:?}, index {:?}",
                brute.get(diff).map(|s| fmt_seq(s)),
                sorted.get(diff).map(|s| fmt_seq(s))
            ),
            &mut report,
        );
    }

    // unrank after rank, from the brute side
    for alpha in &brute {
        match idx.rank(alpha).and_then(|r| idx.unrank(&r)) {
            Ok(back) if &back == alpha => {}
            Ok(back) => note(
                format!("unrank(rank({})) = {}", fmt_seq(alpha), fmt_seq(&back)),
                &mut report,
            ),
            Err(e) => note(format!("rank({}) failed: {e}", fmt_seq(alpha)), &mut report),
        }
    }

    // successor sweep follows rank order
    if let Some(first) = images.first() {
        let mut cur = first.clone();
        let mut steps = 1usize;
        loop {
            match idx.next(&cur) {
                Ok(Some(n)) => {
                    if images.get(steps) != Some(&n) {
                        note(format!("next({}) = {}", fmt_seq(&cur), fmt_seq(&n)), &mut report);
                        break;
                    }
                    cur = n;
                    steps += 1;
                }
                Ok(None) => break,
                Err(e) => {
                    note(format!("next({}) failed: {e}", fmt_seq(&cur)), &mut report);
                    break;
                }
            }
        }
        if steps != images.len() && report.first_divergence.is_none() {
            note(format!("next sweep visited {steps} of {}", images.len()), &mut report);
        }
    }
    Ok(report)
}
