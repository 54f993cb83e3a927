//! Link-level simulator for simultaneous wireless information and power
//! transfer (SWIPT) over a single-antenna link.
//!
//! The transmit side builds an 8-tone multisine power waveform
//! ([`multisine`]) and an 802.11g-style OFDM information waveform ([`wit`])
//! and combines them by time-sharing or superposition ([`combiner`]). The
//! [`channel`] pins the received power and adds noise, the receiver front
//! end ([`frontend`]) splits the signal between the energy harvester and
//! the information decoder by power splitting or time switching, and the
//! [`rectifier`] models turn the harvester's input into DC. The
//! [`harness`] runs Monte-Carlo trials over the ratio grids and extracts
//! harvested-energy/throughput frontiers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod combiner;
pub mod config;
pub mod error;
pub mod frontend;
pub mod harness;
pub mod iq;
pub mod multisine;
pub mod rectifier;
pub mod seed;
pub mod signal;
pub mod spectrum;
pub mod wit;

pub use error::{Error, Result};
pub use signal::{IqBuffer, PowerLevel};
