//! Deterministic seed derivation.
//!
//! Per-day seeds are a fixed mix of the base seed and the day identity, so
//! results do not depend on worker scheduling and reruns are bit-identical.

use chrono::{Datelike, NaiveDate};

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix two 64-bit values into one seed.
#[inline]
pub fn mix(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Seed for a specific calendar day under a base seed.
pub fn day_seed(base: u64, date: NaiveDate) -> u64 {
    mix(base, date.num_days_from_ce() as u64)
}

/// Seed for an index-addressed task (synthetic day, bootstrap replicate, ...).
pub fn task_seed(base: u64, index: u64) -> u64 {
    mix(base, index)
}
