//! Time-sliced mapping of gate-level quantum circuits onto clustered machines.
//!
//! The toolflow: pack a circuit into time slices ([`circuit`]), build
//! lookahead-weighted slice graphs ([`graph`]), partition each slice with
//! relaxed OEE seeded by the previous slice ([`partition`], [`mapper`]), then
//! count and insert the inter-cluster swaps and estimate latency.

pub mod benchgen;
pub mod circuit;
pub mod error;
pub mod exec;
pub mod graph;
pub mod mapper;
pub mod partition;

pub use error::{Error, Result};
pub use exec::Exec;
