//! Adaptive Golomb-Rice residual coding. Signed values are zigzag-mapped to
//! unsigned (v -> 2|v| - [v > 0]), the Rice parameter follows the running
//! magnitude mean (smallest k with count << k >= sum), and oversized
//! quotients escape to a raw 32-bit word so no value can blow up the prefix.

use super::bits::{BitReader, BitWriter};
use crate::error::Result;

const UNARY_LIMIT: u32 = 20;
const MAX_K: u32 = 24;
/// Halve the adaptation sums at this count so the coder keeps tracking
/// local statistics.
const RENEW_AT: u32 = 64;

#[derive(Debug, Clone, Default)]
pub struct RiceState {
    sum: u64,
    count: u32,
}

impl RiceState {
    pub fn k(&self) -> u32 {
        let mut k = 0;
        while k < MAX_K && (self.count as u64) << k < self.sum {
            k += 1;
        }
        k
    }

    fn update(&mut self, u: u32) {
        self.sum += u as u64;
        self.count += 1;
        if self.count >= RENEW_AT {
            self.sum >>= 1;
            self.count >>= 1;
        }
    }
}

#[inline]
fn to_unsigned(v: i32) -> u32 {
    if v > 0 {
        (v as u32) * 2 - 1
    } else {
        v.unsigned_abs() * 2
    }
}

#[inline]
fn to_signed(u: u32) -> i32 {
    if u & 1 == 1 {
        ((u >> 1) + 1) as i32
    } else {
        -((u >> 1) as i32)
    }
}

pub fn encode_value(w: &mut BitWriter, st: &mut RiceState, v: i32) {
    let u = to_unsigned(v);
    let k = st.k();
    let q = u >> k;
    if q < UNARY_LIMIT {
        for _ in 0..q {
            w.put_bit(1);
        }
        w.put_bit(0);
        w.put_bits(u & ((1 << k) - 1), k);
    } else {
        for _ in 0..UNARY_LIMIT {
            w.put_bit(1);
        }
        w.put_bit(0);
        w.put_bits(u, 32);
    }
    st.update(u);
}

pub fn decode_value(r: &mut BitReader, st: &mut RiceState) -> Result<i32> {
    let k = st.k();
    let mut q = 0u32;
    while r.get_bit()? == 1 {
        q += 1;
        if q == UNARY_LIMIT {
            // consume the terminating zero of the escape prefix
            let _ = r.get_bit()?;
            let u = r.get_bits(32)?;
            st.update(u);
            return Ok(to_signed(u));
        }
    }
    let u = (q << k) | r.get_bits(k)?;
    st.update(u);
    Ok(to_signed(u))
}

/// Exact coded length of `v` under the current state (without writing),
/// updating the state exactly as encode_value would.
pub fn cost_value(st: &mut RiceState, v: i32) -> u64 {
    let u = to_unsigned(v);
    let k = st.k();
    let q = u >> k;
    let bits = if q < UNARY_LIMIT { (q + 1 + k) as u64 } else { (UNARY_LIMIT + 1 + 32) as u64 };
    st.update(u);
    bits
}
