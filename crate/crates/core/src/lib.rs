//! Link-level Monte Carlo models for coordinated direct/relay transmission
//! in a relay-aided cell.
//!
//! A base station serves two populations through Rayleigh fading: direct
//! users it reaches in one hop, and relayed users it reaches through an
//! amplify-and-forward relay. Four coordinated transmission schemes let one
//! direct and one relayed user share a two-slot block (the relay doubles as
//! a spatial branch, and linear MMSE combining separates the streams at the
//! receivers), with an optional prioritizing factor trading rate between the
//! two users. On top of the per-pair rates, frame schedulers serve whole
//! waiting lists of users under several disciplines, from a plain one-slot
//! reference round-robin to an exhaustive pair search.
//!
//! Module map:
//! - [`channel`]: fading draws, SNRs, capacities, reproducible substreams.
//! - [`mmse`]: closed-form and matrix-inversion SINRs of the 2x2 virtual
//!   arrays the coordinated schemes create.
//! - [`schemes`]: per-scheme rate formulas and prioritized time sharing.
//! - [`signal_model`]: independent power-chain reconstructions of the same
//!   rates, used for validation only.
//! - [`scheduler`]: waiting lists, frame building, scheduling disciplines.
//! - [`session`]: Monte Carlo sessions, aggregation, rate sweeps.
//! - [`selfcheck`]: runtime validation battery and the brute-force frame
//!   enumerator backing it.

pub mod channel;
pub mod error;
pub mod mmse;
pub mod scheduler;
pub mod schemes;
pub mod selfcheck;
pub mod session;
pub mod signal_model;

pub use error::Error;
