//! Passive and active relay systems: the general KVL constellation solver,
//! the three-coil crosstalk closed form, the waveguide ladder gain, and
//! amplify-and-forward (AF) cooperative relaying.

use crate::antennas::{mutual_inductance, Antenna, CoilSpec, Pose};
use crate::em::Medium;
use crate::error::{MiError, Result};
use crate::metrics::{half_power_band, tx_psd, LinkSpec};
use crate::quad;
use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use std::f64::consts::PI;

/// A constellation of magnetically coupled coils driven by per-coil source
/// voltages at a single frequency.
#[derive(Debug, Clone)]
pub struct KvlSystem {
    pub coils: Vec<(CoilSpec, Pose)>,
    /// Complex drive voltage per coil (V); zero for passive coils.
    pub drives: Vec<Complex64>,
    pub frequency: f64,
    pub medium: Medium,
}

/// Solved coil currents with solution-quality diagnostics.
#[derive(Debug, Clone)]
pub struct KvlSolution {
    /// Complex current per coil (A), same order as the system's coils.
    pub currents: Vec<Complex64>,
    /// Relative residual ‖Z·i − u‖/‖u‖.
    pub residual: f64,
    /// 1-norm condition estimate ‖Z‖₁‖Z⁻¹‖₁.
    pub condition: f64,
}

impl KvlSystem {
    pub fn validate(&self) -> Result<()> {
        if self.coils.len() < 2 {
            return Err(MiError::domain("kvl system needs at least 2 coils"));
        }
        if self.drives.len() != self.coils.len() {
            return Err(MiError::domain(format!(
                "kvl system has {} coils but {} drives",
                self.coils.len(),
                self.drives.len()
            )));
        }
        if !(self.frequency > 0.0) {
            return Err(MiError::domain(format!("frequency must be > 0, got {}", self.frequency)));
        }
        for (c, p) in &self.coils {
            c.validate()?;
            p.validate()?;
        }
        self.medium.validate()?;
        Ok(())
    }

    /// Symmetric impedance matrix: Z_kk = Z_LC,k (loaded), Z_kl = j2πfM_kl.
    pub fn impedance_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.validate()?;
        let n = self.coils.len();
        let w = 2.0 * PI * self.frequency;
        let mut z = DMatrix::<Complex64>::zeros(n, n);
        for k in 0..n {
            z[(k, k)] = self.coils[k].0.impedance(self.frequency);
            for l in (k + 1)..n {
                let m = mutual_inductance(
                    &self.coils[k].0,
                    &self.coils[l].0,
                    &self.coils[k].1,
                    &self.coils[l].1,
                    &self.medium,
                    self.frequency,
                )?;
                let zm = Complex64::new(0.0, w * m.henries);
                z[(k, l)] = zm;
                z[(l, k)] = zm;
            }
        }
        Ok(z)
    }
}

fn one_norm(z: &DMatrix<Complex64>) -> f64 {
    (0..z.ncols())
        .map(|j| (0..z.nrows()).map(|i| z[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves Z·i = u for an explicit impedance matrix, with residual and
/// condition checks.
pub fn kvl_solve_matrix(z: &DMatrix<Complex64>, drives: &[Complex64]) -> Result<KvlSolution> {
    let n = z.nrows();
    if z.ncols() != n || drives.len() != n {
        return Err(MiError::domain("kvl_solve_matrix: dimension mismatch"));
    }
    let u = DVector::from_column_slice(drives);
    let lu = z.clone().lu();
    let inv = lu.try_inverse().ok_or_else(|| singular_error(z))?;
    let condition = one_norm(z) * one_norm(&inv);
    if !condition.is_finite() || condition > 1e12 {
        return Err(singular_error(z));
    }
    let i = lu.solve(&u).ok_or_else(|| singular_error(z))?;
    let residual = (z * &i - &u).norm() / u.norm().max(f64::MIN_POSITIVE);
    if residual > 1e-10 {
        return Err(MiError::numeric(format!("kvl solve residual {residual:.3e} exceeds 1e-10")));
    }
    Ok(KvlSolution { currents: i.iter().copied().collect(), residual, condition })
}

fn singular_error(z: &DMatrix<Complex64>) -> MiError {
    // name the most strongly coupled pair: it is the usual degeneracy source
    let n = z.nrows();
    let mut best = (0usize, 1usize.min(n - 1), 0.0f64);
    for k in 0..n {
        for l in (k + 1)..n {
            if z[(k, l)].norm() > best.2 {
                best = (k, l, z[(k, l)].norm());
            }
        }
    }
    MiError::numeric(format!(
        "kvl impedance matrix is singular or ill-conditioned (condition > 1e12); \
         strongest coupling is between coils {} and {}",
        best.0, best.1
    ))
}

/// Solves the full constellation for all coil currents.
pub fn kvl_solve(system: &KvlSystem) -> Result<KvlSolution> {
    kvl_solve_matrix(&system.impedance_matrix()?, &system.drives)
}

/// Closed-form receive current of the three-coil (S, D, passive R) system:
///
/// I_D = −U_S(Z_SD·Z_LC² − Z_pa1)/(Z_LC⁴ + Z_pa2),
/// Z_pa1 = Z_RD·Z_SR·Z_LC,
/// Z_pa2 = 2Z_RD·Z_SD·Z_SR·Z_LC − (Z_RD² + Z_SD² + Z_SR²)·Z_LC²,
///
/// with Z_ij = j2πfM_ij. Returns (I_D, Z_pa1, Z_pa2).
pub fn three_coil_closed_form(
    u_s: Complex64,
    z_lc: Complex64,
    z_sd: Complex64,
    z_sr: Complex64,
    z_rd: Complex64,
) -> (Complex64, Complex64, Complex64) {
    let z_pa1 = z_rd * z_sr * z_lc;
    let z_pa2 = 2.0 * z_rd * z_sd * z_sr * z_lc
        - (z_rd * z_rd + z_sd * z_sd + z_sr * z_sr) * z_lc * z_lc;
    let i_d = -u_s * (z_sd * z_lc * z_lc - z_pa1) / (z_lc.powu(4) + z_pa2);
    (i_d, z_pa1, z_pa2)
}

/// Sign of the passive relay's net effect on the S→D link gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrosstalkClass {
    /// Gain ratio > 1.01: the relay helps (waveguide-like).
    Positive,
    /// Gain ratio < 0.99: the relay hurts.
    Negative,
    /// |ratio − 1| ≤ 1%: crosstalk is negligible.
    Negligible,
}

/// Crosstalk impedances and the with/without-relay gain ratio of one S→D
/// link disturbed by a passive relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosstalkReport {
    pub z_pa1: Complex64,
    pub z_pa2: Complex64,
    /// G_SD,p / G_SD with G = |I_D|²R_L/|I_S·U_S|.
    pub ratio: f64,
    pub classification: CrosstalkClass,
}

/// Evaluates the crosstalk effect of a passive relay on an S→D link built
/// from three identical coils at the given poses.
pub fn crosstalk_impedances(
    coil: &CoilSpec,
    pose_s: &Pose,
    pose_d: &Pose,
    pose_r: &Pose,
    f: f64,
    medium: &Medium,
) -> Result<CrosstalkReport> {
    let u_s = Complex64::new(1.0, 0.0);
    let make = |poses: Vec<Pose>| KvlSystem {
        coils: poses.into_iter().map(|p| (coil.clone(), p)).collect(),
        drives: {
            let mut d = vec![Complex64::new(0.0, 0.0); 0];
            d.push(u_s);
            d
        },
        frequency: f,
        medium: *medium,
    };
    let mut three = make(vec![*pose_s, *pose_d, *pose_r]);
    three.drives = vec![u_s, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    let mut two = make(vec![*pose_s, *pose_d]);
    two.drives = vec![u_s, Complex64::new(0.0, 0.0)];
    let s3 = kvl_solve(&three)?;
    let s2 = kvl_solve(&two)?;
    let gain = |i_s: Complex64, i_d: Complex64| {
        i_d.norm_sqr() * coil.load_resistance / (i_s * u_s).norm()
    };
    let ratio = gain(s3.currents[0], s3.currents[1]) / gain(s2.currents[0], s2.currents[1]);
    let z3 = three.impedance_matrix()?;
    let (_, z_pa1, z_pa2) =
        three_coil_closed_form(u_s, z3[(0, 0)], z3[(0, 1)], z3[(0, 2)], z3[(1, 2)]);
    let classification = if (ratio - 1.0).abs() <= 0.01 {
        CrosstalkClass::Negligible
    } else if ratio > 1.0 {
        CrosstalkClass::Positive
    } else {
        CrosstalkClass::Negative
    };
    Ok(CrosstalkReport { z_pa1, z_pa2, ratio, classification })
}

/// Chebyshev-style ladder polynomial Fn(Z_M, k) via the three-term recurrence
/// F(k+1) = Z_M·F(k) − F(k−1), F(0) = 1, F(−1) = 0. Errors on overflow.
pub fn ladder_polynomial(z_m: Complex64, k: i64) -> Result<Complex64> {
    if k < -1 {
        return Err(MiError::domain(format!("ladder polynomial index must be >= -1, got {k}")));
    }
    let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)); // F(-1), F(0)
    if k == -1 {
        return Ok(prev);
    }
    for step in 1..=k {
        let next = z_m * cur - prev;
        if !next.norm().is_finite() || next.norm() > 1e300 {
            return Err(MiError::numeric(format!(
                "ladder polynomial overflow at index {step} (|Z_M| = {:.3e})",
                z_m.norm()
            )));
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

fn ladder_sn(z_m: Complex64, z_l: Complex64, k: i64) -> Result<Complex64> {
    Ok(ladder_polynomial(z_m, k)? + z_l * ladder_polynomial(z_m, k - 1)?)
}

/// Waveguide channel gain of `n` identical equally spaced passive relays with
/// nearest-neighbor coupling `m_adjacent` between consecutive coils:
///
/// G_wg = R_L/(Sn(Z_M, Z_L, n)·Sn(Z_M, Z_L, n+1)),
/// Sn(k) = Fn(k) + Z_L·Fn(k−1), Z_M = (Z_LC + R_ci)/(j2πfM), Z_L = R_L/(j2πfM),
///
/// where Z_LC + R_ci is the relay coil's unloaded series impedance. The
/// complex value equals −I_D²R_L/(I_S·I_1) of the (n+2)-coil
/// nearest-neighbor KVL ladder; take its modulus for a power-gain magnitude.
pub fn waveguide_gain(relay: &CoilSpec, n: usize, m_adjacent: f64, f: f64) -> Result<Complex64> {
    relay.validate()?;
    if !(m_adjacent > 0.0) {
        return Err(MiError::domain(format!("m_adjacent must be > 0, got {m_adjacent}")));
    }
    if !(f > 0.0) {
        return Err(MiError::domain(format!("frequency must be > 0, got {f}")));
    }
    let jwm = Complex64::new(0.0, 2.0 * PI * f * m_adjacent);
    let z_m = relay.impedance_unloaded(f) / jwm;
    let z_l = Complex64::new(relay.load_resistance, 0.0) / jwm;
    let denom = ladder_sn(z_m, z_l, n as i64)? * ladder_sn(z_m, z_l, n as i64 + 1)?;
    if denom.norm() == 0.0 {
        return Err(MiError::numeric("waveguide gain denominator vanished"));
    }
    Ok(Complex64::new(relay.load_resistance, 0.0) / denom)
}

/// AF cooperative relaying outcome for one source–relay–destination triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmicResult {
    /// Combined AF SNR at the carrier.
    pub snr_af: f64,
    /// Direct-link SNR at the carrier.
    pub snr_dmi: f64,
    /// Half-duplex AF rate 𝔠_AF = ½∫ log₂(1+Υ_AF) df over the AF band (bits/s).
    pub capacity_af: f64,
    /// Direct-link rate over its own band (bits/s).
    pub capacity_dmi: f64,
    /// Capacity multiplication gain 𝔠_AF/𝔠_DMI.
    pub cmg: f64,
    /// 3-dB bandwidth of the combined AF response (Hz).
    pub bandwidth_af: f64,
    /// 3-dB bandwidth of the direct link (Hz).
    pub bandwidth_dmi: f64,
}

/// Two-slot amplify-and-forward with maximal-ratio combining at D:
///
/// Υ_AF(f) = Υ_SD(f) + Υ_SR(f)·Υ_RD(f)/(1 + Υ_SR(f) + Υ_RD(f)),
///
/// with all three hop SNRs using the direct link's transmit PSD. The relay is
/// a coil that receives on the S→R hop and re-transmits on the R→D hop.
pub fn cmic_af(link: &LinkSpec, relay: &CoilSpec, relay_pose: &Pose) -> Result<CmicResult> {
    link.validate()?;
    relay.validate()?;
    relay_pose.validate()?;
    let f0 = link.carrier();
    let psd = tx_psd(link)?;

    let sr = LinkSpec {
        rx: relay.clone(),
        rx_pose: *relay_pose,
        ..link.clone()
    };
    let rd = LinkSpec {
        tx: Antenna::Coil(relay.clone()),
        tx_pose: *relay_pose,
        ..link.clone()
    };

    let y_sd = |f: f64| -> Result<f64> { Ok(psd * link.gain(f)? / link.noise_psd) };
    let y_af = |f: f64| -> Result<f64> {
        let sd = y_sd(f)?;
        let a = psd * sr.gain(f)? / link.noise_psd;
        let b = psd * rd.gain(f)? / link.noise_psd;
        Ok(sd + a * b / (1.0 + a + b))
    };

    let (dlo, dhi, _) = half_power_band(&y_sd, f0)?;
    let (alo, ahi, _) = half_power_band(&y_af, f0)?;
    let cap_dmi = quad::integrate(&|f| (1.0 + y_sd(f).unwrap_or(0.0)).log2(), dlo, dhi, 96);
    let cap_af = 0.5 * quad::integrate(&|f| (1.0 + y_af(f).unwrap_or(0.0)).log2(), alo, ahi, 96);
    Ok(CmicResult {
        snr_af: y_af(f0)?,
        snr_dmi: y_sd(f0)?,
        capacity_af: cap_af,
        capacity_dmi: cap_dmi,
        cmg: cap_af / cap_dmi,
        bandwidth_af: ahi - alo,
        bandwidth_dmi: dhi - dlo,
    })
}

/// CMG over a rectangular grid of relay positions in the S–D plane (z = 0).
#[derive(Debug, Clone)]
pub struct RelayAreaMap {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// cmg[iy][ix] for the relay at (xs[ix], ys[iy], 0).
    pub cmg: Vec<Vec<f64>>,
    pub max_cmg: f64,
    /// (ix, iy) of the maximum cell.
    pub max_at: (usize, usize),
}

/// Sweeps [`cmic_af`] over a grid of relay positions with a fixed relay axis.
pub fn relay_area_map(
    link: &LinkSpec,
    relay: &CoilSpec,
    relay_axis: &Vector3<f64>,
    xs: &[f64],
    ys: &[f64],
) -> Result<RelayAreaMap> {
    if xs.is_empty() || ys.is_empty() {
        return Err(MiError::domain("relay_area_map: empty grid"));
    }
    let mut cmg = Vec::with_capacity(ys.len());
    let mut max_cmg = f64::NEG_INFINITY;
    let mut max_at = (0, 0);
    for (iy, &y) in ys.iter().enumerate() {
        let mut row = Vec::with_capacity(xs.len());
        for (ix, &x) in xs.iter().enumerate() {
            let pose = Pose::new(Vector3::new(x, y, 0.0), *relay_axis)?;
            let v = cmic_af(link, relay, &pose)?.cmg;
            if v > max_cmg {
                max_cmg = v;
                max_at = (ix, iy);
            }
            row.push(v);
        }
        cmg.push(row);
    }
    Ok(RelayAreaMap { xs: xs.to_vec(), ys: ys.to_vec(), cmg, max_cmg, max_at })
}

/// Default AF-vs-direct bandwidth sweep: identical 0.6 m/15-turn coils at
/// both ends, the receiver axis tilted 30°, and the relay on the link's
/// perpendicular bisector at a lateral offset equal to d_SD. Returns
/// (d_SD, B_AF, B_DMI) per distance.
pub fn bandwidth_comparison_sweep(distances: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    use crate::defaults;
    let coil = defaults::tx_coil();
    let theta_d = 30f64.to_radians();
    let mut out = Vec::with_capacity(distances.len());
    for &dsd in distances {
        if !(dsd > 0.0) {
            return Err(MiError::domain(format!("sweep distance must be > 0, got {dsd}")));
        }
        let link = LinkSpec {
            tx: Antenna::Coil(coil.clone()),
            tx_pose: defaults::tx_pose(),
            rx: coil.clone(),
            rx_pose: Pose::new(
                Vector3::new(dsd, 0.0, 0.0),
                Vector3::new(theta_d.cos(), theta_d.sin(), 0.0),
            )?,
            medium: defaults::medium(),
            tx_power: defaults::TX_POWER,
            noise_psd: defaults::NOISE_PSD,
            fading: crate::fading::FadingModel::None,
        };
        let relay_pose = Pose::new(Vector3::new(dsd / 2.0, dsd, 0.0), Vector3::x())?;
        let r = cmic_af(&link, &coil, &relay_pose)?;
        out.push((dsd, r.bandwidth_af, r.bandwidth_dmi));
    }
    Ok(out)
}
