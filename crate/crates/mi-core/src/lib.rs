//! Modeling library for through-the-earth magnetic-induction (MI) communication.
//!
//! The crate covers point-to-point MI links and small MI networks:
//!
//! - [`em`] — electromagnetic primitives of the propagation medium
//!   (complex wavenumber, skin depth, near-field boundary);
//! - [`antennas`] — coil and rotating-permanent-magnet antenna records and
//!   their derived circuit quantities (resistance, inductance, impedance,
//!   mutual inductance);
//! - [`gain`] — the four-factor channel power gain decomposition
//!   `G = C·S·E·J` (circuit, space, eddy, polarization) plus the full
//!   mixed-field dipole solution;
//! - [`fading`] — fast-fading statistics from antenna vibration and
//!   misalignment, with analytic laws, samplers and ergodic metrics;
//! - [`metrics`] — per-link SNR, bandwidth, capacity and range solvers;
//! - [`relays`] — passive relay chains (waveguide), crosstalk analysis and
//!   amplify-and-forward cooperative relaying via a general KVL solver;
//! - [`network`] — per-frequency connectivity graphs, frequency-switchable
//!   routing, isolation Monte Carlo and best-response power allocation.
//!
//! All operations are pure functions over value types; Monte-Carlo samplers
//! take explicit seeded generators so that parallel sweeps stay reproducible.

pub mod antennas;
pub mod defaults;
pub mod em;
pub mod error;
pub mod fading;
pub mod gain;
pub mod metrics;
pub mod network;
pub mod quad;
pub mod relays;

pub use error::{MiError, Result};
