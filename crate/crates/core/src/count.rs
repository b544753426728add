//! Natural-number types used for path counts, offsets and ranks.
//!
//! Every index structure is generic over [`Count`]. Fixed-width types fail
//! with [`Error::Overflow`](crate::Error::Overflow) instead of wrapping;
//! [`BigUint`] never overflows.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedSub, FromPrimitive, ToPrimitive, Unsigned, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub trait Count:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + FromStr
    + Unsigned
    + CheckedAdd
    + CheckedSub
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Uniform draw from `0..bound`; `bound` must be positive.
    fn uniform_below<R: Rng + ?Sized>(bound: &Self, rng: &mut R) -> Self;

    fn add_checked(&self, other: &Self) -> Result<Self> {
        self.checked_add(other).ok_or(Error::Overflow)
    }

    fn from_usize_checked(v: usize) -> Result<Self> {
        Self::from_usize(v).ok_or(Error::Overflow)
    }

    fn ln(&self) -> f64 {
        self.to_f64().map_or(f64::INFINITY, f64::ln)
    }
}

impl Count for u64 {
    fn uniform_below<R: Rng + ?Sized>(bound: &Self, rng: &mut R) -> Self {
        rng.gen_range(0..*bound)
    }
}

impl Count for u128 {
    fn uniform_below<R: Rng + ?Sized>(bound: &Self, rng: &mut R) -> Self {
        rng.gen_range(0..*bound)
    }
}

impl Count for BigUint {
    fn uniform_below<R: Rng + ?Sized>(bound: &Self, rng: &mut R) -> Self {
        // rejection sampling on the bit length of `bound`
        let bits = bound.bits();
        let bytes = bits.div_ceil(8) as usize;
        let spare = (bytes as u64) * 8 - bits;
        let mut buf = vec![0u8; bytes];
        loop {
            rng.fill(buf.as_mut_slice());
            if let Some(top) = buf.last_mut() {
                *top &= 0xffu8 >> spare;
            }
            let candidate = BigUint::from_bytes_le(&buf);
            if &candidate < bound {
                return candidate;
            }
        }
    }

    fn ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.bits();
        if bits < 1000 {
            return self.to_f64().map_or(f64::INFINITY, f64::ln);
        }
        let shift = bits - 64;
        let top = (self >> shift).to_f64().unwrap_or(f64::MAX);
        top.ln() + (shift as f64) * std::f64::consts::LN_2
    }
}
