//! Achievable rate regions of K-receiver discrete memoryless broadcast
//! channels under exhaustive message splitting.
//!
//! Every private message is split into one submessage per receiver subset,
//! each submessage rides on its own auxiliary codeword, and the codewords of
//! all `2^K - 1` nonempty subsets are kept jointly typical by oversizing the
//! subcodebooks level by level. This crate provides the pieces needed to
//! compute and cross-check the resulting rate region numerically:
//!
//! * [`subset`] / [`setfam`] — exact combinatorics over the power set of
//!   receivers: superset families, per-receiver subset families, and the
//!   disjoint block decompositions indexed by receiver orderings.
//! * [`dist`] — dense joint distributions over the auxiliaries, channel
//!   input, and outputs, with conditional entropy and mutual information
//!   queries in bits.
//! * [`constraints`] — generators for the covering lower bounds, the packing
//!   upper bounds, the closed-form per-ordering rate system, and the explicit
//!   three-receiver system.
//! * [`region`] / [`simplex`] — polytope analysis: support functions via a
//!   self-contained dense simplex, membership, the pre-elimination split-rate
//!   LP, region comparison, and local search over input pmfs.
//! * [`mcsim`] — Monte Carlo validation of the hierarchical covering step:
//!   level-descending codebook generation and joint-typicality index search.
//!
//! The crate is `no_std` (with `alloc`); all file formats and the command
//! line front end live in the companion `bcregion` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod constraints;
pub mod dist;
pub mod error;
pub mod mcsim;
pub mod region;
pub mod rng;
pub mod setfam;
pub mod simplex;
pub mod subset;

pub use error::{Error, Result};
pub use subset::{ReceiverOrder, Subset, SubsetFamily};
