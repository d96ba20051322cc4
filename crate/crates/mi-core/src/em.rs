//! Electromagnetic primitives of the propagation medium.

use crate::error::{MiError, Result};
use num_complex::Complex64;

/// Vacuum permeability (H/m).
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854e-12;

/// Electromagnetic properties of the propagation material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    /// Permeability μ (H/m).
    pub mu: f64,
    /// Permittivity ε (F/m).
    pub epsilon: f64,
    /// Conductivity σ (S/m).
    pub sigma: f64,
}

impl Medium {
    pub fn new(mu: f64, epsilon: f64, sigma: f64) -> Result<Self> {
        let m = Medium { mu, epsilon, sigma };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(MiError::domain(format!("medium.mu must be > 0, got {}", self.mu)));
        }
        if !(self.epsilon > 0.0) {
            return Err(MiError::domain(format!(
                "medium.epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.sigma >= 0.0) {
            return Err(MiError::domain(format!(
                "medium.sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Lossless air (σ = 0).
    pub fn air() -> Self {
        Medium { mu: MU0, epsilon: EPS0, sigma: 0.0 }
    }

    /// Default underground medium used across the simulation presets
    /// (σ = 0.01 S/m).
    pub fn default_soil() -> Self {
        Medium { mu: MU0, epsilon: 6.978e-11, sigma: 1e-2 }
    }

    /// Dry soil (ε = 7ε₀, σ = 0.01 S/m).
    pub fn dry_soil() -> Self {
        Medium { mu: MU0, epsilon: 7.0 * EPS0, sigma: 1e-2 }
    }

    /// Wet soil (ε = 29ε₀, σ = 0.077 S/m).
    pub fn wet_soil() -> Self {
        Medium { mu: MU0, epsilon: 29.0 * EPS0, sigma: 0.077 }
    }

    /// Seawater-like high-conductivity medium (σ = 4.8 S/m).
    pub fn seawater() -> Self {
        Medium { mu: MU0, epsilon: 6.978e-11, sigma: 4.8 }
    }
}

/// Complex wavenumber k₀ = 2πf √(μ(ε + jσ/(2πf))) (1/m).
///
/// Principal square root, so Im(k₀) ≥ 0; the imaginary part carries the
/// per-meter field decay in a conductive medium.
pub fn wavenumber(f: f64, medium: &Medium) -> Result<Complex64> {
    if !(f > 0.0) {
        return Err(MiError::domain(format!("frequency must be > 0, got {f}")));
    }
    medium.validate()?;
    let w = 2.0 * std::f64::consts::PI * f;
    let arg = Complex64::new(medium.epsilon, medium.sigma / w) * medium.mu;
    Ok(arg.sqrt() * w)
}

/// Which skin-depth expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkinDepthMode {
    /// Full expression, valid for any σ/(2πfε) ratio.
    Exact,
    /// Good-conductor (VLF) approximation δ ≈ √(1/(πfμσ)).
    Vlf,
}

/// Skin depth δ (m). Returns `+∞` for σ = 0 (lossless medium), so the eddy
/// gain degrades gracefully to 1.
pub fn skin_depth(f: f64, medium: &Medium, mode: SkinDepthMode) -> Result<f64> {
    if !(f > 0.0) {
        return Err(MiError::domain(format!("frequency must be > 0, got {f}")));
    }
    medium.validate()?;
    if medium.sigma == 0.0 {
        return Ok(f64::INFINITY);
    }
    let w = 2.0 * std::f64::consts::PI * f;
    Ok(match mode {
        SkinDepthMode::Exact => {
            let loss_tangent = medium.sigma / (w * medium.epsilon);
            let inner = (1.0 + loss_tangent * loss_tangent).sqrt() - 1.0;
            1.0 / (w * (medium.mu * medium.epsilon / 2.0 * inner).sqrt())
        }
        SkinDepthMode::Vlf => (1.0 / (std::f64::consts::PI * f * medium.mu * medium.sigma)).sqrt(),
    })
}

/// Distance at which |k₀|·d reaches `kappa`: the quasi-static near-field
/// region ends around here. `kappa` defaults to 1 in callers; the exact
/// threshold is a modeling convention, so it stays configurable.
pub fn near_field_boundary(f: f64, medium: &Medium, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(MiError::domain(format!("kappa must be > 0, got {kappa}")));
    }
    let k = wavenumber(f, medium)?;
    Ok(kappa / k.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lossless_wavenumber_is_real() {
        let m = Medium { mu: MU0, epsilon: EPS0, sigma: 0.0 };
        let k = wavenumber(1e4, &m).unwrap();
        assert_relative_eq!(
            k.re,
            2.0 * std::f64::consts::PI * 1e4 * (MU0 * EPS0).sqrt(),
            max_relative = 1e-12
        );
        assert!(k.im.abs() < 1e-18);
    }

    #[test]
    fn wavenumber_magnitudes_at_default_soil() {
        let m = Medium::default_soil();
        assert_relative_eq!(
            wavenumber(1e4, &m).unwrap().norm(),
            0.028099260274544503,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            wavenumber(1e5, &m).unwrap().norm(),
            0.08885808578827527,
            max_relative = 1e-12
        );
    }

    #[test]
    fn skin_depth_values() {
        let m = Medium::default_soil();
        assert_relative_eq!(
            skin_depth(1e4, &m, SkinDepthMode::Exact).unwrap(),
            50.340246500327616,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            skin_depth(1e4, &m, SkinDepthMode::Vlf).unwrap(),
            50.32921210448704,
            max_relative = 1e-12
        );
        // exact vs vlf differ below 1% where sigma >> 2*pi*f*eps
        let rel = (skin_depth(1e4, &m, SkinDepthMode::Exact).unwrap()
            - skin_depth(1e4, &m, SkinDepthMode::Vlf).unwrap())
        .abs()
            / skin_depth(1e4, &m, SkinDepthMode::Vlf).unwrap();
        assert!(rel < 0.01);
    }

    #[test]
    fn skin_depth_lossless_is_infinite() {
        let m = Medium::air();
        assert!(skin_depth(1e4, &m, SkinDepthMode::Exact).unwrap().is_infinite());
        assert!(skin_depth(1e4, &m, SkinDepthMode::Vlf).unwrap().is_infinite());
    }

    #[test]
    fn skin_depth_equals_inverse_imag_wavenumber() {
        let m = Medium::default_soil();
        for f in [1e3, 1e4, 1e5, 1e6] {
            let d = skin_depth(f, &m, SkinDepthMode::Exact).unwrap();
            let k = wavenumber(f, &m).unwrap();
            assert_relative_eq!(d, 1.0 / k.im, max_relative = 1e-9);
        }
    }

    #[test]
    fn skin_depth_monotone_in_f_and_sigma() {
        let m = Medium::default_soil();
        let mut prev = f64::INFINITY;
        for f in [1e3, 3e3, 1e4, 3e4, 1e5] {
            let d = skin_depth(f, &m, SkinDepthMode::Vlf).unwrap();
            assert!(d < prev);
            prev = d;
        }
        let mut prev = f64::INFINITY;
        for sigma in [1e-3, 1e-2, 1e-1, 1.0] {
            let m = Medium { sigma, ..Medium::default_soil() };
            let d = skin_depth(1e4, &m, SkinDepthMode::Vlf).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn near_field_boundary_values() {
        let m = Medium::default_soil();
        assert_relative_eq!(
            near_field_boundary(1e5, &m, 1.0).unwrap(),
            11.253899868862007,
            max_relative = 1e-12
        );
        // linear in kappa
        assert_relative_eq!(
            near_field_boundary(1e5, &m, 2.0).unwrap(),
            2.0 * near_field_boundary(1e5, &m, 1.0).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn invalid_inputs_are_domain_errors() {
        let m = Medium::default_soil();
        assert!(wavenumber(0.0, &m).is_err());
        assert!(wavenumber(-1.0, &m).is_err());
        assert!(near_field_boundary(1e4, &m, 0.0).is_err());
        assert!(Medium::new(MU0, EPS0, -1.0).is_err());
    }
}
