//! Fast-fading statistics for MI links.
//!
//! Antenna vibration makes the polarization gain J a random process. Two
//! laws are modeled: the boundary chi-square (BCS) law of a single vibrating
//! end, which has a closed-form mixed density, and the uniform 3-D
//! misalignment law for fully random axes. A geometric two-ended sampler ties
//! the laws back to actual pose perturbations.

use crate::antennas::Pose;
use crate::error::{MiError, Result};
use crate::gain::polarization_factor;
use crate::quad;
use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use std::f64::consts::PI;

/// Gaussian tail function Q(x) = erfc(x/√2)/2.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Boundary chi-square vibration parameters for one antenna end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcsSpec {
    /// Vibration intensity σ: standard deviation of the underlying normal
    /// tilt angle (rad).
    pub sigma: f64,
    /// Vibration boundary ς ∈ (0, 1]: the tilt is clipped at √ς.
    pub varsigma: f64,
}

/// How to evaluate the BCS expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectationMode {
    /// The closed-form expression (omits the boundary atom's contribution).
    ClosedForm,
    /// Quadrature of the mixed density, the crate's ground truth.
    Integral,
}

impl BcsSpec {
    pub fn new(sigma: f64, varsigma: f64) -> Result<Self> {
        let s = BcsSpec { sigma, varsigma };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(MiError::domain(format!("bcs sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.varsigma > 0.0 && self.varsigma <= 1.0) {
            return Err(MiError::domain(format!(
                "bcs varsigma must be in (0, 1], got {}",
                self.varsigma
            )));
        }
        Ok(())
    }

    /// Weight of the point mass at J = 1 − ς: w₀ = 1 − erf(√(ς/(2σ²))).
    pub fn point_mass_weight(&self) -> f64 {
        1.0 - libm::erf((self.varsigma / (2.0 * self.sigma * self.sigma)).sqrt())
    }

    /// Continuous density on (1−ς, 1]: e^{−(1−x)/(2σ²)}/√(2πσ²(1−x));
    /// zero elsewhere (the point mass is reported separately).
    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 1.0 - self.varsigma || x > 1.0 {
            return 0.0;
        }
        let s2 = self.sigma * self.sigma;
        (-(1.0 - x) / (2.0 * s2)).exp() / (2.0 * PI * s2 * (1.0 - x)).sqrt()
    }

    /// CDF of the mixed law (point mass included, right-continuous):
    /// F(x) = 1 − erf(√((1−x)/(2σ²))) on [1−ς, 1].
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 1.0 - self.varsigma {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            1.0 - libm::erf(((1.0 - x) / (2.0 * self.sigma * self.sigma)).sqrt())
        }
    }

    /// One draw of J = 1 − min(g², ς) with g ~ Normal(0, σ²): the generative
    /// form whose induced law is exactly the mixed density above.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g: f64 = self.sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
        1.0 - (g * g).min(self.varsigma)
    }

    /// E[h(J)] over the mixed law: the atom plus quadrature of the continuous
    /// part after the substitutions u = √(1−x), u = σt, which tame the edge
    /// singularity and keep the Gaussian mass resolved at small σ.
    pub fn expect<F: Fn(f64) -> f64>(&self, h: F) -> Result<f64> {
        let s2 = self.sigma * self.sigma;
        let t_max = (self.varsigma.sqrt() / self.sigma).min(40.0);
        let integrand =
            |t: f64| h(1.0 - s2 * t * t) * (2.0 / PI).sqrt() * (-t * t / 2.0).exp();
        let (cont, err) = quad::integrate_with_error(&integrand, 0.0, t_max, 128);
        if !cont.is_finite() || err > 1e-8 * cont.abs().max(1.0) {
            return Err(MiError::numeric(format!(
                "bcs expectation quadrature did not converge (residual {err:.3e})"
            )));
        }
        Ok(cont + self.point_mass_weight() * h(1.0 - self.varsigma))
    }

    /// E[J]. The closed form drops the boundary atom's (1−ς)w₀ contribution,
    /// so it undershoots the integral mode slightly; the integral mode is the
    /// ground truth.
    pub fn expectation(&self, mode: ExpectationMode) -> Result<f64> {
        match mode {
            ExpectationMode::ClosedForm => {
                let s2 = self.sigma * self.sigma;
                let arg = (self.varsigma / (2.0 * s2)).sqrt();
                Ok((1.0 - s2) * libm::erf(arg)
                    + (2.0 * self.varsigma * s2).sqrt() * (-self.varsigma / (2.0 * s2)).exp()
                        / PI.sqrt())
            }
            ExpectationMode::Integral => self.expect(|x| x),
        }
    }
}

/// Normalized uniform-misalignment density of x = 𝒥/2 ∈ [−1, 1] when both
/// axes are independently uniform on the sphere.
pub fn uniform_misalignment_pdf(x: f64) -> f64 {
    let ax = x.abs();
    let s3 = 3f64.sqrt();
    if ax <= 0.5 {
        s3.asinh() / s3
    } else if ax <= 1.0 {
        (s3.asinh() - (4.0 * x * x - 1.0).sqrt().asinh()) / s3
    } else {
        0.0
    }
}

/// One draw of the normalized signed polarization factor 𝒥/2 with both axes
/// uniform on the unit sphere.
pub fn uniform_misalignment_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let ns: [f64; 3] = UnitSphere.sample(rng);
    let nd: [f64; 3] = UnitSphere.sample(rng);
    // r̂ along +x without loss of generality (the law is rotation invariant)
    let proj = ns[0];
    let field = [3.0 * proj - ns[0], -ns[1], -ns[2]]; // 3r̂(n_S·r̂) − n_S
    (nd[0] * field[0] + nd[1] * field[1] + nd[2] * field[2]) / 2.0
}

/// Tagged fading model selection for a link.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum FadingModel {
    /// Quasi-static link: J stays at its nominal value.
    #[default]
    None,
    /// Per-end BCS vibration; `None` at an end means that end is rigid.
    Bcs { tx: Option<BcsSpec>, rx: Option<BcsSpec> },
    /// Both axes uniformly random on the sphere.
    UniformMisalignment,
}

fn perturb_axis<R: Rng + ?Sized>(axis: &Vector3<f64>, spec: &BcsSpec, rng: &mut R) -> Vector3<f64> {
    let g: f64 = spec.sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
    let tilt = g.abs().min(spec.varsigma.sqrt());
    let phi = rng.gen_range(0.0..2.0 * PI);
    // Orthonormal frame around the nominal axis.
    let helper = if axis.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = axis.cross(&helper).normalize();
    let e2 = axis.cross(&e1);
    axis * tilt.cos() + (e1 * phi.cos() + e2 * phi.sin()) * tilt.sin()
}

/// One geometric draw of the raw polarization gain J ∈ [0, 4] for a link
/// with vibrating or misaligned ends. Horizontal (azimuth) and vertical
/// (tilt) perturbation components are independent.
pub fn link_fading_sample<R: Rng + ?Sized>(
    rng: &mut R,
    model: &FadingModel,
    pose_tx: &Pose,
    pose_rx: &Pose,
) -> Result<f64> {
    let jcal = match model {
        FadingModel::None => polarization_factor(pose_tx, pose_rx)?,
        FadingModel::Bcs { tx, rx } => {
            let ax_tx = match tx {
                Some(s) => perturb_axis(&pose_tx.axis, s, rng),
                None => pose_tx.axis,
            };
            let ax_rx = match rx {
                Some(s) => perturb_axis(&pose_rx.axis, s, rng),
                None => pose_rx.axis,
            };
            let pt = Pose { position: pose_tx.position, axis: ax_tx };
            let pr = Pose { position: pose_rx.position, axis: ax_rx };
            polarization_factor(&pt, &pr)?
        }
        FadingModel::UniformMisalignment => {
            let d = (pose_rx.position - pose_tx.position).norm();
            if !(d > 0.0) {
                return Err(MiError::domain("link_fading_sample: coincident positions"));
            }
            2.0 * uniform_misalignment_sample(rng)
        }
    };
    Ok(jcal * jcal)
}

/// Normalized fading law of x = J/J_nominal used by the ergodic metrics:
/// analytic where a closed form exists, empirical otherwise.
#[derive(Debug, Clone)]
pub enum JLaw {
    /// No fading: x ≡ value (1 for a calibrated mean-SNR chain).
    Degenerate(f64),
    /// Single vibrating end: the exact BCS mixed law.
    Bcs(BcsSpec),
    /// Monte-Carlo sample set (normalized).
    Empirical(Vec<f64>),
}

/// A metric value together with its Monte-Carlo standard error when the
/// underlying law is empirical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub mc_std: Option<f64>,
}

impl JLaw {
    /// Builds the normalized law for a link. Single-end BCS maps to the
    /// analytic law; two-ended or misalignment models fall back to `n`
    /// geometric Monte-Carlo draws normalized by the nominal J.
    pub fn from_model<R: Rng + ?Sized>(
        model: &FadingModel,
        pose_tx: &Pose,
        pose_rx: &Pose,
        rng: &mut R,
        n: usize,
    ) -> Result<JLaw> {
        match model {
            FadingModel::None => Ok(JLaw::Degenerate(1.0)),
            FadingModel::Bcs { tx: None, rx: Some(s) } | FadingModel::Bcs { tx: Some(s), rx: None } => {
                s.validate()?;
                Ok(JLaw::Bcs(*s))
            }
            FadingModel::Bcs { tx: None, rx: None } => Ok(JLaw::Degenerate(1.0)),
            _ => {
                let j_nom = {
                    let j = polarization_factor(pose_tx, pose_rx)?;
                    j * j
                };
                if !(j_nom > 0.0) {
                    return Err(MiError::domain(
                        "empirical fading law needs a non-zero nominal polarization gain",
                    ));
                }
                if n == 0 {
                    return Err(MiError::domain("empirical fading law needs n >= 1 samples"));
                }
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    v.push(link_fading_sample(rng, model, pose_tx, pose_rx)? / j_nom);
                }
                Ok(JLaw::Empirical(v))
            }
        }
    }

    /// P[x ≤ q].
    pub fn cdf(&self, q: f64) -> Estimate {
        match self {
            JLaw::Degenerate(v) => Estimate { value: if *v <= q { 1.0 } else { 0.0 }, mc_std: None },
            JLaw::Bcs(s) => Estimate { value: s.cdf(q), mc_std: None },
            JLaw::Empirical(v) => {
                let p = v.iter().filter(|&&x| x <= q).count() as f64 / v.len() as f64;
                Estimate {
                    value: p,
                    mc_std: Some((p * (1.0 - p) / v.len() as f64).sqrt()),
                }
            }
        }
    }

    /// E[h(x)].
    pub fn expect<F: Fn(f64) -> f64>(&self, h: F) -> Result<Estimate> {
        match self {
            JLaw::Degenerate(v) => Ok(Estimate { value: h(*v), mc_std: None }),
            JLaw::Bcs(s) => Ok(Estimate { value: s.expect(h)?, mc_std: None }),
            JLaw::Empirical(v) => {
                let n = v.len() as f64;
                let mean = v.iter().map(|&x| h(x)).sum::<f64>() / n;
                let var = v.iter().map(|&x| (h(x) - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                Ok(Estimate { value: mean, mc_std: Some((var / n).sqrt()) })
            }
        }
    }

    /// Mean of the law.
    pub fn mean(&self) -> Result<Estimate> {
        self.expect(|x| x)
    }
}

/// Outage probability P[mean_snr·x < Υ_th].
pub fn outage_probability(law: &JLaw, mean_snr: f64, threshold: f64) -> Result<Estimate> {
    if !(mean_snr > 0.0) {
        return Err(MiError::domain(format!("mean_snr must be > 0, got {mean_snr}")));
    }
    let q = threshold / mean_snr;
    // The instantaneous SNR is strictly below threshold; for the continuous
    // part P[x < q] = P[x ≤ q], and the boundary atom only matters exactly at
    // q = 1 − ς where either convention is defensible. CDF convention used.
    Ok(law.cdf(q))
}

/// Ergodic capacity E[log₂(1 + mean_snr·x)] (bits/s/Hz).
pub fn ergodic_capacity(law: &JLaw, mean_snr: f64) -> Result<Estimate> {
    if !(mean_snr > 0.0) {
        return Err(MiError::domain(format!("mean_snr must be > 0, got {mean_snr}")));
    }
    law.expect(|x| (1.0 + mean_snr * x.max(0.0)).log2())
}

/// Ergodic BER E[Q(√(ebn0·x))] for the unit-rate reference modulation.
pub fn ergodic_ber(law: &JLaw, ebn0: f64) -> Result<Estimate> {
    if !(ebn0 >= 0.0) {
        return Err(MiError::domain(format!("ebn0 must be >= 0, got {ebn0}")));
    }
    law.expect(|x| q_function((ebn0 * x.max(0.0)).sqrt()))
}
