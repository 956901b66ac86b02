//! Liveness and structural liveness for immediate-observation Petri nets.
//!
//! The crate covers the BIMO family (branching immediate multi-observation
//! nets) and its subclasses BIO, IMO and IO:
//!
//! * [`net`] — nets, markings, firing, the text format;
//! * [`classify`] — class flags and transition presentations;
//! * [`structure`] — relaxed nets, components, siphons;
//! * [`liveness`] — exact liveness by exploration, DL-markings, witnesses;
//! * [`slp`] — the capped liveness decision and structural liveness search;
//! * [`reduce_lba`] — nets simulating linear bounded automata;
//! * [`ordinarize`] — weighted-to-ordinary transformation;
//! * [`gen`] — seeded random nets of a requested class.

use serde::Serialize;
use thiserror::Error;

pub mod classify;
pub mod coverability;
pub mod gen;
pub mod liveness;
pub mod net;
pub mod ordinarize;
pub mod par;
pub mod reduce_lba;
pub mod slp;
pub mod structure;

pub use classify::{classify, NetClass};
pub use net::{parse_net, serialize_net, Marking, Net, PlaceId, TransId};
pub use par::Parallelism;

/// An exploration stopped after visiting its allowed number of states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize)]
#[error("exploration budget exceeded after {explored} states")]
pub struct BudgetExceeded {
    pub explored: usize,
}
