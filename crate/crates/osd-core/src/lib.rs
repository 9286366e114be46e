//! Soft-decision decoding of binary linear block codes.
//!
//! Implements ordered-statistics decoding (OSD) in its classic form and with
//! reduced per-frame Gaussian elimination via staged generator matrices,
//! including the `B_max`-restricted variant and an elimination cost model.
//! A Chase-2 baseline, BCH code construction, and a reproducible AWGN
//! Monte-Carlo harness round out the toolkit.

pub mod bch;
pub mod channel;
pub mod chase;
pub mod code;
pub mod gf2;
pub mod osd;
pub mod sim;
pub mod staged;
