//! Exact Delsarte linear-programming bounds for codes in Hamming, Johnson
//! and explicit distance-regular schemes.

// Errors carry the exact rational that violated a check.
#![allow(clippy::result_large_err)]

pub mod asymptotics;
pub mod certificates;
pub mod exact;
pub mod lp;
pub mod oracle;
pub mod params;
pub mod scheme;
