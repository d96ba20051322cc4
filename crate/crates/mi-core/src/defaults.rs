//! Reference link defaults.
//!
//! One place for the default parameter set used by the CLI scenario loader
//! and by the test suite: a 0.6 m / 15-turn transmit coil, a 0.4 m / 30-turn
//! receive coil, 10 kHz resonance, 5 W transmit power, −103 dBm/2 kHz noise,
//! a 60 m link in σ = 0.01 S/m soil, and opposed coaxial coil axes.

use crate::antennas::{CoilSpec, Pose, RpmaSpec};
use crate::em::Medium;
use nalgebra::Vector3;

/// Transmit power P_S (W).
pub const TX_POWER: f64 = 5.0;

/// Noise power spectral density N_of (W/Hz), from −103 dBm per 2 kHz.
pub const NOISE_PSD: f64 = 2.5059361681363612e-17;

/// Link distance d_SD (m).
pub const DISTANCE: f64 = 60.0;

/// Resonance / carrier frequency f₀ (Hz).
pub const F0: f64 = 1e4;

/// Default wire resistance per meter ρ_w (Ω/m).
pub const WIRE_RESISTANCE_PER_M: f64 = 0.166;

/// Default wire radius r_w (m). Together with [`LOAD_RESISTANCE`] this is
/// calibrated so the numeric 3-dB bandwidth of the reference link sits near
/// 450 Hz across f₀ ∈ [1 kHz, 1 MHz], the regime VLF TTE links operate in.
pub const WIRE_RADIUS: f64 = 5e-5;

/// Default load resistance R_L (Ω). See [`WIRE_RADIUS`].
pub const LOAD_RESISTANCE: f64 = 0.5;

/// Reference transmit coil (0.6 m, 15 turns).
pub fn tx_coil() -> CoilSpec {
    CoilSpec {
        radius: 0.6,
        turns: 15,
        wire_resistance_per_m: WIRE_RESISTANCE_PER_M,
        wire_radius: WIRE_RADIUS,
        load_resistance: LOAD_RESISTANCE,
        tuned_frequency: F0,
    }
}

/// Reference receive coil (0.4 m, 30 turns).
pub fn rx_coil() -> CoilSpec {
    CoilSpec {
        radius: 0.4,
        turns: 30,
        wire_resistance_per_m: WIRE_RESISTANCE_PER_M,
        wire_radius: WIRE_RADIUS,
        load_resistance: LOAD_RESISTANCE,
        tuned_frequency: F0,
    }
}

/// Default medium (soil, σ = 0.01 S/m).
pub fn medium() -> Medium {
    Medium::default_soil()
}

/// Transmitter pose: origin, axis along +x (θ_S = 0 toward the receiver).
pub fn tx_pose() -> Pose {
    Pose::new(Vector3::zeros(), Vector3::x()).unwrap()
}

/// Receiver pose at the default distance with the axis opposed (θ_D = π),
/// which maximizes |𝒥| at 2 for a coaxial pair.
pub fn rx_pose() -> Pose {
    rx_pose_at(DISTANCE)
}

/// Receiver pose at distance `d` on the +x axis, axis opposed.
pub fn rx_pose_at(d: f64) -> Pose {
    Pose::new(Vector3::new(d, 0.0, 0.0), -Vector3::x()).unwrap()
}

/// Reference rotating-permanent-magnet antenna. The ramp time corresponds to
/// spinning up to 10 kHz at the rated acceleration of 539 Hz/s.
pub fn rpma() -> RpmaSpec {
    RpmaSpec {
        remanence: 1.2,
        volume: 1e-4,
        efficiency: 0.9,
        friction_torque: 1e-3,
        moment_of_inertia: 3.75e-4,
        ramp_time: F0 / 539.0,
        friction_corner: 1e3,
    }
}
