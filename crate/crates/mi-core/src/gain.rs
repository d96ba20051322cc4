//! The four-factor channel power gain decomposition G = 𝒞·𝒮·ℰ·J and the full
//! mixed-field magnetic-dipole solution it reduces to in the near field.

use crate::antennas::{Antenna, CoilSpec, Pose, RpmaSpec};
use crate::em::{near_field_boundary, skin_depth, Medium, SkinDepthMode, MU0};
use crate::error::{MiError, Result};
use nalgebra::Vector3;
use num_complex::Complex64;
use std::f64::consts::PI;

/// The four multiplicative gain factors and their product for one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainBreakdown {
    /// Circuit gain 𝒞: in-device (coil/RPMA) energy behavior incl. resonance.
    pub circuit: f64,
    /// Space gain 𝒮 = μ²/d⁶: ideal geometric near-field attenuation.
    pub space: f64,
    /// Eddy gain ℰ = e^{−2d/δ} ∈ (0, 1]: conductive-medium skin-effect loss.
    pub eddy: f64,
    /// Polarization gain J = 𝒥² ∈ [0, 4].
    pub polarization: f64,
    /// Total channel power gain, the product of the four factors.
    pub total: f64,
    /// Whether |k₀·d| ≤ 1, i.e. the quasi-static model is self-consistent.
    pub near_field_valid: bool,
}

/// Signed polarization factor 𝒥 = n_D·(3r̂(n_S·r̂) − n_S) ∈ [−2, 2] of two
/// dipole axes separated along r̂.
pub fn polarization_factor(pose_tx: &Pose, pose_rx: &Pose) -> Result<f64> {
    let r = pose_rx.position - pose_tx.position;
    let d = r.norm();
    if !(d > 0.0) {
        return Err(MiError::domain("polarization_factor: coincident positions"));
    }
    let rhat = r / d;
    let ns = pose_tx.axis;
    let nd = pose_rx.axis;
    Ok(nd.dot(&(rhat * (3.0 * ns.dot(&rhat)) - ns)))
}

/// Coplanar form of the polarization factor, 𝒥 = 2cosθ_S cosθ_D + sinθ_S sinθ_D,
/// for axes tilted by θ_S and θ_D from the line of sight within one plane
/// (θ_D measured in the field's tangential sense).
pub fn polarization_factor_coplanar(theta_s: f64, theta_d: f64) -> f64 {
    2.0 * theta_s.cos() * theta_d.cos() + theta_s.sin() * theta_d.sin()
}

/// Eddy gain ℰ = e^{−2d/δ} with the exact skin depth.
pub fn eddy_gain(d: f64, f: f64, medium: &Medium) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(MiError::domain(format!("distance must be >= 0, got {d}")));
    }
    let delta = skin_depth(f, medium, SkinDepthMode::Exact)?;
    Ok(if delta.is_infinite() { 1.0 } else { (-2.0 * d / delta).exp() })
}

/// Space gain 𝒮 = μ²/d⁶.
pub fn space_gain(d: f64, medium: &Medium) -> Result<f64> {
    if !(d > 0.0) {
        return Err(MiError::domain(format!("distance must be > 0, got {d}")));
    }
    Ok(medium.mu * medium.mu / d.powi(6))
}

/// Circuit gain of a coil-to-coil link:
///
/// 𝒞 = (π a_S² a_D² N_S N_D)²/16 · |(2πf)² R_L / (Z_S Z_D²)|.
///
/// The constant is placed so that 𝒞·𝒮·ℰ·J equals the end-to-end two-coil
/// KVL power gain |I_D|²R_L/(U_S I_S) in the weak-coupling regime.
pub fn circuit_gain_coil(tx: &CoilSpec, rx: &CoilSpec, f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(MiError::domain(format!("frequency must be > 0, got {f}")));
    }
    tx.validate()?;
    rx.validate()?;
    let w = 2.0 * PI * f;
    let zs = tx.impedance(f);
    let zd = rx.impedance(f);
    let geo = PI * tx.radius.powi(2) * rx.radius.powi(2) * tx.turns as f64 * rx.turns as f64;
    Ok(geo * geo / 16.0 * (w * w * rx.load_resistance / (zs * zd * zd).norm()))
}

/// Circuit gain of an RPMA-to-coil link:
///
/// 𝒞 = (B_rm V_m/(4πμ₀))² ℵ_S(f) ℵ_D(f), with the receive-side factor
/// ℵ_D(f) = π² f a_cD / (2|Z_D|) and the mechanical friction-loss model
/// ℵ_S(f) = η/(1 + f/f_c).
pub fn circuit_gain_rpma(rpma: &RpmaSpec, rx: &CoilSpec, f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(MiError::domain(format!("frequency must be > 0, got {f}")));
    }
    rpma.validate()?;
    rx.validate()?;
    let moment_factor = rpma.remanence * rpma.volume / (4.0 * PI * MU0);
    let aleph_d = PI * PI * f * rx.radius / (2.0 * rx.impedance(f).norm());
    Ok(moment_factor * moment_factor * rpma.friction_loss(f) * aleph_d)
}

/// Full four-factor gain breakdown for one link at frequency `f`.
pub fn channel_gain(
    tx: &Antenna,
    rx: &CoilSpec,
    pose_tx: &Pose,
    pose_rx: &Pose,
    medium: &Medium,
    f: f64,
) -> Result<GainBreakdown> {
    pose_tx.validate()?;
    pose_rx.validate()?;
    let d = (pose_rx.position - pose_tx.position).norm();
    let circuit = match tx {
        Antenna::Coil(c) => circuit_gain_coil(c, rx, f)?,
        Antenna::Rpma(r) => circuit_gain_rpma(r, rx, f)?,
    };
    let space = space_gain(d, medium)?;
    let eddy = eddy_gain(d, f, medium)?;
    let jcal = polarization_factor(pose_tx, pose_rx)?;
    let polarization = jcal * jcal;
    Ok(GainBreakdown {
        circuit,
        space,
        eddy,
        polarization,
        total: circuit * space * eddy * polarization,
        near_field_valid: d <= near_field_boundary(f, medium, 1.0)?,
    })
}

/// Complex magnetic field H (A/m) of an oscillating magnetic dipole with real
/// moment vector `moment` (A·m²) at displacement `r` in the given medium:
///
/// H = e^{jk r}/(4π) [ k²((r̂×m)×r̂)/r + (3r̂(r̂·m) − m)(1/r³ − jk/r²) ],
///
/// under the e^{−jωt} time convention, so the Im(k) ≥ 0 wavenumber gives the
/// decaying magnitude e^{−Im(k)·r}. The k → 0 limit recovers the
/// quasi-static (2cosθ, sinθ)/(4πd³) structure that the four-factor
/// decomposition is built on.
pub fn dipole_field(
    moment: &Vector3<f64>,
    displacement: &Vector3<f64>,
    f: f64,
    medium: &Medium,
) -> Result<Vector3<Complex64>> {
    let r = displacement.norm();
    if !(r > 0.0) {
        return Err(MiError::domain("dipole_field: zero displacement"));
    }
    let k = crate::em::wavenumber(f, medium)?;
    let rhat = displacement / r;
    let radial = rhat * (3.0 * moment.dot(&rhat)) - moment; // 3r̂(r̂·m) − m
    let transverse = rhat.cross(moment).cross(&rhat); // (r̂×m)×r̂
    let phase = (Complex64::new(0.0, 1.0) * k * r).exp() / (4.0 * PI);
    let near = Complex64::new(1.0 / (r * r * r), 0.0) - Complex64::new(0.0, 1.0) * k / (r * r);
    let far = k * k / r;
    Ok(Vector3::new(
        phase * (near * radial.x + far * transverse.x),
        phase * (near * radial.y + far * transverse.y),
        phase * (near * radial.z + far * transverse.z),
    ))
}

/// Flux linkage Ψ = μ (H·n_D) N_D πa_D² (Wb-turns) of a receive coil in a
/// locally uniform field — the weak-coupling approximation the whole model
/// assumes.
pub fn flux_linkage(
    field: &Vector3<Complex64>,
    rx: &CoilSpec,
    pose_rx: &Pose,
    medium: &Medium,
) -> Result<Complex64> {
    rx.validate()?;
    pose_rx.validate()?;
    let h_axial = field.x * pose_rx.axis.x + field.y * pose_rx.axis.y + field.z * pose_rx.axis.z;
    Ok(h_axial * medium.mu * rx.turns as f64 * PI * rx.radius.powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antennas::mutual_inductance;
    use crate::defaults;
    use approx::assert_relative_eq;

    #[test]
    fn polarization_examples() {
        let pa = Pose::new(Vector3::zeros(), Vector3::x()).unwrap();
        let pb = Pose::new(Vector3::new(10.0, 0.0, 0.0), Vector3::x()).unwrap();
        assert_relative_eq!(polarization_factor(&pa, &pb).unwrap(), 2.0, max_relative = 1e-12);

        // tx axis perpendicular to line of sight, rx along it
        let pa_perp = Pose::new(Vector3::zeros(), Vector3::y()).unwrap();
        assert!(polarization_factor(&pa_perp, &pb).unwrap().abs() < 1e-15);

        // both perpendicular in the same plane: 𝒥 = 1
        let pb_perp = Pose::new(pb.position, Vector3::y()).unwrap();
        assert_relative_eq!(
            polarization_factor(&pa_perp, &pb_perp).unwrap().abs(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            polarization_factor_coplanar(PI / 2.0, PI / 2.0),
            1.0,
            max_relative = 1e-12
        );

        assert!(polarization_factor(&pa, &pa).is_err());
    }

    #[test]
    fn coplanar_reduction_matches_3d_form() {
        // In-plane poses: θ_D enters the 3-D form through the tangential
        // component of the field, which points along −θ̂ in these Cartesian
        // coordinates.
        for (ts, td) in [(0.3, 1.1), (0.0, PI), (1.2, -0.4), (PI / 2.0, PI / 2.0)] {
            let pa = Pose::new(Vector3::zeros(), Vector3::new(ts.cos(), ts.sin(), 0.0)).unwrap();
            let pb = Pose::new(
                Vector3::new(25.0, 0.0, 0.0),
                Vector3::new(td.cos(), -td.sin(), 0.0),
            )
            .unwrap();
            assert_relative_eq!(
                polarization_factor(&pa, &pb).unwrap(),
                polarization_factor_coplanar(ts, td),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn eddy_and_space_gains() {
        let soil = Medium::default_soil();
        assert_relative_eq!(eddy_gain(0.0, 1e4, &soil).unwrap(), 1.0, max_relative = 1e-12);
        let delta = skin_depth(1e4, &soil, SkinDepthMode::Exact).unwrap();
        assert_relative_eq!(
            eddy_gain(delta, 1e4, &soil).unwrap(),
            (-2.0f64).exp(),
            max_relative = 1e-12
        );
        assert_relative_eq!(eddy_gain(100.0, 1e4, &Medium::air()).unwrap(), 1.0, max_relative = 1e-12);

        assert_relative_eq!(
            space_gain(2.0, &soil).unwrap(),
            space_gain(1.0, &soil).unwrap() / 64.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(space_gain(1.0, &soil).unwrap(), MU0 * MU0, max_relative = 1e-12);
        assert!(space_gain(0.0, &soil).is_err());
    }

    #[test]
    fn circuit_gain_coil_value_and_resonance_peak() {
        let tx = defaults::tx_coil();
        let rx = defaults::rx_coil();
        let c0 = circuit_gain_coil(&tx, &rx, 1e4).unwrap();
        assert_relative_eq!(c0, 488370480.2961293, max_relative = 1e-12);
        // resonance form
        let geo = PI * tx.radius.powi(2) * rx.radius.powi(2) * 15.0 * 30.0;
        let expect = geo * geo / 16.0 * (2.0 * PI * 1e4).powi(2) * rx.load_resistance
            / ((tx.resistance() + tx.load_resistance)
                * (rx.resistance() + rx.load_resistance).powi(2));
        assert_relative_eq!(c0, expect, max_relative = 1e-12);
        // peak near f0
        assert!(circuit_gain_coil(&tx, &rx, 1.02e4).unwrap() < c0);
        assert!(circuit_gain_coil(&tx, &rx, 0.98e4).unwrap() < c0);
    }

    #[test]
    fn circuit_gain_rpma_model() {
        let rpma = defaults::rpma();
        let rx = defaults::rx_coil();
        let c = circuit_gain_rpma(&rpma, &rx, 1e4).unwrap();
        assert!(c > 0.0);
        // doubling remanence quadruples the gain
        let rp2 = RpmaSpec { remanence: 2.0 * rpma.remanence, ..rpma.clone() };
        assert_relative_eq!(
            circuit_gain_rpma(&rp2, &rx, 1e4).unwrap(),
            4.0 * c,
            max_relative = 1e-12
        );
        // at the corner frequency the friction loss halves the DC-efficiency value
        assert_relative_eq!(
            rpma.friction_loss(rpma.friction_corner),
            rpma.efficiency / 2.0,
            max_relative = 1e-12
        );
        // ideal-friction resonance form
        let ideal = (rpma.remanence * rpma.volume / (4.0 * PI * MU0)).powi(2)
            * PI
            * PI
            * 1e4
            * rx.radius
            / (2.0 * (rx.resistance() + rx.load_resistance));
        assert_relative_eq!(
            c,
            ideal * rpma.friction_loss(1e4),
            max_relative = 1e-12
        );
    }

    #[test]
    fn channel_gain_reference_value() {
        let g = channel_gain(
            &Antenna::Coil(defaults::tx_coil()),
            &defaults::rx_coil(),
            &defaults::tx_pose(),
            &defaults::rx_pose(),
            &defaults::medium(),
            1e4,
        )
        .unwrap();
        assert_relative_eq!(g.total, 6.0962076288169005e-15, max_relative = 1e-12);
        assert_relative_eq!(g.polarization, 4.0, max_relative = 1e-12);
        assert_relative_eq!(
            g.total,
            g.circuit * g.space * g.eddy * g.polarization,
            max_relative = 1e-14
        );
        assert!(!g.near_field_valid); // 60 m > 1/|k0| ≈ 35.6 m at 10 kHz

        // air total = soil total / eddy
        let air = channel_gain(
            &Antenna::Coil(defaults::tx_coil()),
            &defaults::rx_coil(),
            &defaults::tx_pose(),
            &defaults::rx_pose(),
            &Medium::air(),
            1e4,
        )
        .unwrap();
        assert_relative_eq!(air.total, g.total / g.eddy, max_relative = 1e-9);

        // J = 0 orientation kills the link
        let perp = Pose::new(Vector3::zeros(), Vector3::y()).unwrap();
        let dead = channel_gain(
            &Antenna::Coil(defaults::tx_coil()),
            &defaults::rx_coil(),
            &perp,
            &defaults::rx_pose(),
            &defaults::medium(),
            1e4,
        )
        .unwrap();
        assert!(dead.total < 1e-40);
    }

    #[test]
    fn dipole_field_structure() {
        let soil = Medium::default_soil();
        let m = Vector3::new(100.0, 0.0, 0.0);

        // θ = 0: purely radial at any distance
        let h = dipole_field(&m, &Vector3::new(30.0, 0.0, 0.0), 1e4, &soil).unwrap();
        assert!(h.y.norm() < 1e-18 && h.z.norm() < 1e-18);

        // near-field ratio |H_r|/|H_θ| -> 2cosθ/sinθ at 45°
        let r45 = Vector3::new(1.0, 1.0, 0.0) * (0.05 / 2f64.sqrt());
        let h45 = dipole_field(&m, &r45, 1e4, &soil).unwrap();
        let rhat = r45.normalize();
        let hr = h45.x * rhat.x + h45.y * rhat.y;
        let that = Vector3::new(rhat.y, -rhat.x, 0.0); // tangential, toward +θ from m
        let ht = h45.x * that.x + h45.y * that.y;
        assert_relative_eq!(hr.norm() / ht.norm(), 2.0, max_relative = 1e-3);

        // far field in air: |H| ∝ 1/d
        let air = Medium::air();
        let f = 1e9;
        let d1 = dipole_field(&m, &Vector3::new(0.0, 100.0, 0.0), f, &air).unwrap();
        let d2 = dipole_field(&m, &Vector3::new(0.0, 200.0, 0.0), f, &air).unwrap();
        assert_relative_eq!(d1.norm() / d2.norm(), 2.0, max_relative = 1e-2);

        assert!(dipole_field(&m, &Vector3::zeros(), 1e4, &soil).is_err());
    }

    #[test]
    fn flux_linkage_consistency_with_mutual_inductance() {
        // Deep near-field check: |k0 d| < 0.01 so the mixed-field solution
        // reduces to the quasi-static coupling.
        let soil = Medium::default_soil();
        let f = 0.3;
        let tx = defaults::tx_coil();
        let rx = defaults::rx_coil();
        let pa = defaults::tx_pose();
        let pb = defaults::rx_pose();
        let i_s = 1.0;
        let m_vec = Vector3::x() * (tx.turns as f64 * PI * tx.radius.powi(2) * i_s);
        let h = dipole_field(&m_vec, &(pb.position - pa.position), f, &soil).unwrap();
        let psi = flux_linkage(&h, &rx, &pb, &soil).unwrap();
        let m = mutual_inductance(&tx, &rx, &pa, &pb, &soil, f).unwrap();
        assert_relative_eq!(psi.norm(), (m.henries * i_s).abs(), max_relative = 1e-2);

        // orthogonal field -> zero linkage; linear in turns
        let hy = Vector3::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let pb_x = Pose::new(pb.position, Vector3::x()).unwrap();
        assert!(flux_linkage(&hy, &rx, &pb_x, &soil).unwrap().norm() < 1e-18);
        let rx2 = CoilSpec { turns: 2 * rx.turns, ..rx.clone() };
        let l1 = flux_linkage(&h, &rx, &pb, &soil).unwrap().norm();
        let l2 = flux_linkage(&h, &rx2, &pb, &soil).unwrap().norm();
        assert_relative_eq!(l2, 2.0 * l1, max_relative = 1e-12);
    }

    #[test]
    fn frequency_tradeoff_has_interior_argmax() {
        // 𝒞(f)·ℰ(f) at fixed d peaks at a finite interior frequency for σ>0
        // when the coils are retuned to each carrier.
        let soil = Medium::default_soil();
        let d = 60.0;
        let eval = |f: f64| {
            let tx = defaults::tx_coil().retuned(f);
            let rx = defaults::rx_coil().retuned(f);
            circuit_gain_coil(&tx, &rx, f).unwrap() * eddy_gain(d, f, &soil).unwrap()
        };
        let grid: Vec<f64> = (0..60).map(|i| 10f64.powf(2.0 + i as f64 * 0.1)).collect();
        let vals: Vec<f64> = grid.iter().map(|&f| eval(f)).collect();
        let (imax, _) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        assert!(imax > 0 && imax < grid.len() - 1);
    }
}
