//! Antenna construction records and derived circuit quantities.

use crate::em::{skin_depth, Medium, SkinDepthMode, MU0};
use crate::error::{MiError, Result};
use crate::gain::polarization_factor;
use nalgebra::Vector3;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Multi-turn circular coil antenna with a series matching capacitor and a
/// resistive load.
#[derive(Debug, Clone, PartialEq)]
pub struct CoilSpec {
    /// Coil radius a (m).
    pub radius: f64,
    /// Number of turns N.
    pub turns: u32,
    /// Wire resistance per meter ρ_w (Ω/m).
    pub wire_resistance_per_m: f64,
    /// Wire radius r_w (m).
    pub wire_radius: f64,
    /// Load resistance R_L (Ω).
    pub load_resistance: f64,
    /// Resonance frequency f₀ the matching capacitor is tuned to (Hz).
    pub tuned_frequency: f64,
}

impl CoilSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(MiError::domain(format!("coil radius must be > 0, got {}", self.radius)));
        }
        if self.turns < 1 {
            return Err(MiError::domain("coil turns must be >= 1"));
        }
        if !(self.wire_resistance_per_m >= 0.0) {
            return Err(MiError::domain(format!(
                "wire_resistance_per_m must be >= 0, got {}",
                self.wire_resistance_per_m
            )));
        }
        if !(self.wire_radius > 0.0 && self.wire_radius < self.radius) {
            return Err(MiError::domain(format!(
                "wire_radius must satisfy 0 < r_w < radius, got {}",
                self.wire_radius
            )));
        }
        if !(self.load_resistance > 0.0) {
            return Err(MiError::domain(format!(
                "load_resistance must be > 0, got {}",
                self.load_resistance
            )));
        }
        if !(self.tuned_frequency > 0.0) {
            return Err(MiError::domain(format!(
                "tuned_frequency must be > 0, got {}",
                self.tuned_frequency
            )));
        }
        Ok(())
    }

    /// Same coil retuned to a different resonance frequency.
    pub fn retuned(&self, f0: f64) -> CoilSpec {
        CoilSpec { tuned_frequency: f0, ..self.clone() }
    }

    /// Wire resistance R_c = ρ_w · 2πa · N (Ω).
    pub fn resistance(&self) -> f64 {
        self.wire_resistance_per_m * 2.0 * PI * self.radius * self.turns as f64
    }

    /// Self-inductance of the multi-turn circular loop,
    /// L = μ₀ N² a (ln(8a/r_w) − 2) (H).
    pub fn inductance(&self) -> f64 {
        let n = self.turns as f64;
        MU0 * n * n * self.radius * ((8.0 * self.radius / self.wire_radius).ln() - 2.0)
    }

    /// Series capacitance that puts the resonance at `tuned_frequency`:
    /// C = 1/((2πf₀)²L) (F).
    pub fn matching_capacitance(&self) -> f64 {
        let w0 = 2.0 * PI * self.tuned_frequency;
        1.0 / (w0 * w0 * self.inductance())
    }

    /// Total series impedance Z = j2πfL + 1/(j2πfC) + R_c + R_L (Ω).
    pub fn impedance(&self, f: f64) -> Complex64 {
        let w = 2.0 * PI * f;
        let jwl = Complex64::new(0.0, w * self.inductance());
        let jwc = Complex64::new(0.0, -1.0 / (w * self.matching_capacitance()));
        jwl + jwc + Complex64::new(self.resistance() + self.load_resistance, 0.0)
    }

    /// Reactive part of the series impedance plus the wire resistance,
    /// excluding the load: the per-coil term used in relay-chain models.
    pub fn impedance_unloaded(&self, f: f64) -> Complex64 {
        self.impedance(f) - Complex64::new(self.load_resistance, 0.0)
    }

    /// Loop quality factor Q = 2πf₀L/(R_c + R_L).
    pub fn q_factor(&self) -> f64 {
        2.0 * PI * self.tuned_frequency * self.inductance()
            / (self.resistance() + self.load_resistance)
    }
}

/// Rotating-permanent-magnet antenna (RPMA): a spinning magnet whose rotation
/// rate is the carrier frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct RpmaSpec {
    /// Magnet remanence B_rm (T).
    pub remanence: f64,
    /// Magnet volume V_m (m³).
    pub volume: f64,
    /// Drive-train energy conversion efficiency η ∈ (0, 1].
    pub efficiency: f64,
    /// Bearing friction torque τ_fr (N·m).
    pub friction_torque: f64,
    /// Rotor moment of inertia I_nr (kg·m²).
    pub moment_of_inertia: f64,
    /// Frequency ramp time dt (s) used for the inertial torque term.
    pub ramp_time: f64,
    /// Corner frequency f_c (Hz) of the friction-loss model
    /// ℵ_S(f) = η/(1 + f/f_c).
    pub friction_corner: f64,
}

impl RpmaSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.remanence >= 0.0) {
            return Err(MiError::domain("rpma remanence must be >= 0"));
        }
        if !(self.volume > 0.0) {
            return Err(MiError::domain("rpma volume must be > 0"));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(MiError::domain("rpma efficiency must be in (0, 1]"));
        }
        if !(self.friction_torque >= 0.0) {
            return Err(MiError::domain("rpma friction_torque must be >= 0"));
        }
        if !(self.moment_of_inertia > 0.0) {
            return Err(MiError::domain("rpma moment_of_inertia must be > 0"));
        }
        if !(self.ramp_time > 0.0) {
            return Err(MiError::domain("rpma ramp_time must be > 0"));
        }
        if !(self.friction_corner > 0.0) {
            return Err(MiError::domain("rpma friction_corner must be > 0"));
        }
        Ok(())
    }

    /// Magnetic moment of the magnet, |m| = B_rm V_m / μ₀ (A·m²).
    pub fn moment(&self) -> f64 {
        self.remanence * self.volume / MU0
    }

    /// Mechanical input power P = (τ_fr + τ_nr)·2πf/η with the inertial
    /// torque τ_nr = I_nr·2πf/dt. Returns the power (W) together with the
    /// inertia share τ_nr/(τ_fr + τ_nr).
    pub fn input_power(&self, f: f64) -> Result<(f64, f64)> {
        if !(f > 0.0) {
            return Err(MiError::domain(format!("frequency must be > 0, got {f}")));
        }
        let w = 2.0 * PI * f;
        let tau_nr = self.moment_of_inertia * w / self.ramp_time;
        let tau = self.friction_torque + tau_nr;
        Ok((tau * w / self.efficiency, tau_nr / tau))
    }

    /// Friction-loss factor ℵ_S(f) = η/(1 + f/f_c): unity-efficiency drive at
    /// DC, rolling off as the spin rate grows.
    pub fn friction_loss(&self, f: f64) -> f64 {
        self.efficiency / (1.0 + f / self.friction_corner)
    }
}

/// A transmit antenna: either a coil or an RPMA. Receivers are always coils.
#[derive(Debug, Clone, PartialEq)]
pub enum Antenna {
    Coil(CoilSpec),
    Rpma(RpmaSpec),
}

/// Position and axis orientation of an antenna in 3-D space. The axis is the
/// coil normal (or the RPMA moment direction at phase zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub axis: Vector3<f64>,
}

impl Pose {
    /// Builds a pose, normalizing the axis. Errors on a zero axis.
    pub fn new(position: Vector3<f64>, axis: Vector3<f64>) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0) && n.is_finite() {
            return Err(MiError::domain("pose axis must be a non-zero vector"));
        }
        if !n.is_finite() {
            return Err(MiError::domain("pose axis must be finite"));
        }
        Ok(Pose { position, axis: axis / n })
    }

    pub fn validate(&self) -> Result<()> {
        if (self.axis.norm() - 1.0).abs() > 1e-12 {
            return Err(MiError::domain("pose axis must be a unit vector"));
        }
        Ok(())
    }
}

/// Signed mutual inductance between two coils together with a weak-coupling
/// validity flag (false when the separation does not exceed both radii).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInductance {
    pub henries: f64,
    pub weak_coupling: bool,
}

/// Mutual inductance of two magnetically coupled coils in a (possibly
/// conductive) medium:
///
/// M = π a_tx² a_rx² N_tx N_rx μ /(4d³) · 𝒥 · √ℰ,
///
/// where 𝒥 ∈ [−2, 2] is the signed polarization factor of the two axes and
/// √ℰ = e^{−d/δ} the one-way eddy attenuation. The d⁻³ prefactor is the
/// magnetoquasistatic dipole coupling; the link power gain squares √ℰ.
pub fn mutual_inductance(
    tx: &CoilSpec,
    rx: &CoilSpec,
    pose_tx: &Pose,
    pose_rx: &Pose,
    medium: &Medium,
    f: f64,
) -> Result<MutualInductance> {
    tx.validate()?;
    rx.validate()?;
    pose_tx.validate()?;
    pose_rx.validate()?;
    let d = (pose_rx.position - pose_tx.position).norm();
    if !(d > 0.0) {
        return Err(MiError::domain("mutual_inductance: coincident coil positions"));
    }
    let jcal = polarization_factor(pose_tx, pose_rx)?;
    let delta = skin_depth(f, medium, SkinDepthMode::Exact)?;
    let sqrt_eddy = if delta.is_infinite() { 1.0 } else { (-d / delta).exp() };
    let m = PI
        * tx.radius.powi(2)
        * rx.radius.powi(2)
        * tx.turns as f64
        * rx.turns as f64
        * medium.mu
        / (4.0 * d.powi(3))
        * jcal
        * sqrt_eddy;
    Ok(MutualInductance { henries: m, weak_coupling: d > tx.radius.max(rx.radius) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults;
    use approx::assert_relative_eq;

    fn tx() -> CoilSpec {
        defaults::tx_coil()
    }
    fn rx() -> CoilSpec {
        defaults::rx_coil()
    }

    #[test]
    fn coil_resistance_value() {
        assert_relative_eq!(tx().resistance(), 9.387078848926302, max_relative = 1e-12);
        assert_relative_eq!(rx().resistance(), 12.516105131901737, max_relative = 1e-12);
        let mut c = tx();
        c.wire_resistance_per_m = 0.0;
        assert_eq!(c.resistance(), 0.0);
        let mut d = tx();
        d.turns *= 2;
        assert_relative_eq!(d.resistance(), 2.0 * tx().resistance(), max_relative = 1e-12);
    }

    #[test]
    fn coil_inductance_value() {
        // Independent cross-check against a loop-inductance calculation with
        // a 1.5 mm wire radius.
        let c = CoilSpec { wire_radius: 1.5e-3, ..tx() };
        assert_relative_eq!(c.inductance(), 1.029904954335145e-3, max_relative = 1e-12);
        assert_relative_eq!(c.matching_capacitance(), 2.4594789843434055e-7, max_relative = 1e-12);
        // quadrupling N multiplies L by 16
        let c16 = CoilSpec { turns: 4 * c.turns, ..c.clone() };
        assert_relative_eq!(c16.inductance(), 16.0 * c.inductance(), max_relative = 1e-12);
        // larger wire radius -> smaller L
        let cfat = CoilSpec { wire_radius: 3e-3, ..c.clone() };
        assert!(cfat.inductance() < c.inductance());
        // default wire radius
        assert_relative_eq!(tx().inductance(), 1.6069044965476328e-3, max_relative = 1e-12);
        assert_relative_eq!(rx().inductance(), 4.101650563951932e-3, max_relative = 1e-12);
    }

    #[test]
    fn resonance_round_trip() {
        for c in [tx(), rx()] {
            let l = c.inductance();
            let cap = c.matching_capacitance();
            let f0 = 1.0 / (2.0 * PI * (l * cap).sqrt());
            assert_relative_eq!(f0, c.tuned_frequency, max_relative = 1e-12);
            let z = c.impedance(c.tuned_frequency);
            assert!(z.im.abs() < 1e-9 * z.re);
            assert_relative_eq!(z.re, c.resistance() + c.load_resistance, max_relative = 1e-12);
        }
    }

    #[test]
    fn impedance_off_resonance() {
        let c = tx();
        // slightly above resonance: inductive
        assert!(c.impedance(c.tuned_frequency * 1.01).im > 0.0);
        // far below resonance: capacitive and huge
        assert!(c.impedance(c.tuned_frequency * 1e-4).norm() > 1e4);
        assert!(c.impedance(c.tuned_frequency * 1e-4).im < 0.0);
    }

    #[test]
    fn q_factors() {
        assert_relative_eq!(tx().q_factor(), 10.211791447223398, max_relative = 1e-12);
        assert_relative_eq!(rx().q_factor(), 19.799648433572745, max_relative = 1e-12);
    }

    #[test]
    fn rpma_moment_and_power() {
        let r = defaults::rpma();
        assert_relative_eq!(r.moment(), 95.4929658551372, max_relative = 1e-12);
        let r2 = RpmaSpec { volume: 2.0 * r.volume, ..r.clone() };
        assert_relative_eq!(r2.moment(), 2.0 * r.moment(), max_relative = 1e-12);
        let r0 = RpmaSpec { remanence: 0.0, ..r.clone() };
        assert_eq!(r0.moment(), 0.0);

        // fixed torques: P(2f)/P(f) between 2 and 4
        let (p1, _) = r.input_power(100.0).unwrap();
        let (p2, share) = r.input_power(200.0).unwrap();
        assert!(p2 / p1 > 2.0 && p2 / p1 < 4.0);
        assert!(share > 0.0 && share < 1.0);

        // frictionless, f -> 0: P -> 0
        let rf = RpmaSpec { friction_torque: 0.0, ..r };
        let (p, _) = rf.input_power(1e-6).unwrap();
        assert!(p < 1e-9);
    }

    #[test]
    fn mutual_inductance_values_and_symmetries() {
        let m = Medium::air();
        let pa = Pose::new(Vector3::zeros(), Vector3::x()).unwrap();
        let pb = Pose::new(Vector3::new(60.0, 0.0, 0.0), Vector3::x()).unwrap();
        let coax = mutual_inductance(&tx(), &rx(), &pa, &pb, &m, 1e4).unwrap();
        assert_relative_eq!(coax.henries, 2.3687050562614466e-10, max_relative = 1e-12);
        assert!(coax.weak_coupling);

        // eddy factor in conductive medium
        let soil = Medium::default_soil();
        let lossy = mutual_inductance(&tx(), &rx(), &pa, &pb, &soil, 1e4).unwrap();
        assert_relative_eq!(
            lossy.henries / coax.henries,
            0.3036470484584236,
            max_relative = 1e-12
        );

        // symmetry under swap
        let swapped = mutual_inductance(&rx(), &tx(), &pb, &pa, &m, 1e4).unwrap();
        assert_relative_eq!(swapped.henries, coax.henries, max_relative = 1e-12);

        // sign flip under axis negation
        let pb_neg = Pose::new(pb.position, -Vector3::x()).unwrap();
        let neg = mutual_inductance(&tx(), &rx(), &pa, &pb_neg, &m, 1e4).unwrap();
        assert_relative_eq!(neg.henries, -coax.henries, max_relative = 1e-12);

        // d^-3 decay in lossless medium
        let pb2 = Pose::new(Vector3::new(120.0, 0.0, 0.0), Vector3::x()).unwrap();
        let far = mutual_inductance(&tx(), &rx(), &pa, &pb2, &m, 1e4).unwrap();
        assert_relative_eq!(far.henries, coax.henries / 8.0, max_relative = 1e-9);

        // perpendicular tx axis to line of sight, rx along it -> zero
        let pa_perp = Pose::new(Vector3::zeros(), Vector3::y()).unwrap();
        let zero = mutual_inductance(&tx(), &rx(), &pa_perp, &pb, &m, 1e4).unwrap();
        assert!(zero.henries.abs() < 1e-25);

        // coincident positions -> domain error
        assert!(mutual_inductance(&tx(), &rx(), &pa, &pa, &m, 1e4).is_err());

        // too close -> weak-coupling flag dropped
        let near = Pose::new(Vector3::new(0.3, 0.0, 0.0), Vector3::x()).unwrap();
        assert!(!mutual_inductance(&tx(), &rx(), &pa, &near, &m, 1e4).unwrap().weak_coupling);
    }
}
