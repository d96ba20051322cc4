//! JSON scenario files.
//!
//! A scenario is a single JSON object, versioned by `schema_version`. Every
//! field is optional and defaults to the reference link: 0.6 m/15-turn
//! transmitter, 0.4 m/30-turn receiver, 10 kHz, 5 W, −103 dBm/2 kHz noise,
//! 60 m through σ = 0.01 S/m soil. An empty file is the full default
//! scenario. Unknown keys are rejected with a location-bearing diagnostic.

use crate::error::{CliError, Result};
use mi_core::antennas::{Antenna, CoilSpec, Pose};
use mi_core::defaults;
use mi_core::em::Medium;
use mi_core::fading::FadingModel;
use mi_core::metrics::LinkSpec;
use mi_core::network::{NetScenario, Node};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

/// The one supported scenario schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Coil overrides; unset fields inherit the per-end reference coil.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoilScenario {
    /// Coil radius a (m).
    pub radius: Option<f64>,
    /// Turn count N.
    pub turns: Option<u32>,
    /// Wire resistance per meter ρ_w (Ω/m).
    pub wire_resistance_per_m: Option<f64>,
    /// Wire radius r_w (m).
    pub wire_radius: Option<f64>,
    /// Load resistance R_L (Ω).
    pub load_resistance: Option<f64>,
}

impl CoilScenario {
    fn build(&self, base: &CoilSpec, f0: f64) -> CoilSpec {
        CoilSpec {
            radius: self.radius.unwrap_or(base.radius),
            turns: self.turns.unwrap_or(base.turns),
            wire_resistance_per_m: self
                .wire_resistance_per_m
                .unwrap_or(base.wire_resistance_per_m),
            wire_radius: self.wire_radius.unwrap_or(base.wire_radius),
            load_resistance: self.load_resistance.unwrap_or(base.load_resistance),
            tuned_frequency: f0,
        }
    }

    fn validate(&self, end: &str) -> Result<()> {
        let pos = |name: &str, v: Option<f64>| -> Result<()> {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(CliError::config(format!("{end}.{name} must be > 0, got {x}")));
                }
            }
            Ok(())
        };
        pos("radius", self.radius)?;
        pos("wire_resistance_per_m", self.wire_resistance_per_m)?;
        pos("wire_radius", self.wire_radius)?;
        pos("load_resistance", self.load_resistance)?;
        if let Some(n) = self.turns {
            if n == 0 {
                return Err(CliError::config(format!("{end}.turns must be >= 1")));
            }
        }
        Ok(())
    }
}

/// Propagation-medium overrides; defaults to σ = 0.01 S/m soil.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumScenario {
    /// Conductivity σ (S/m).
    pub sigma: Option<f64>,
    /// Absolute permittivity ε (F/m).
    pub epsilon: Option<f64>,
    /// Relative permeability μ/μ₀.
    pub mu_r: Option<f64>,
}

impl MediumScenario {
    fn build(&self) -> Result<Medium> {
        let base = defaults::medium();
        Medium::new(
            self.mu_r.unwrap_or(1.0) * mi_core::em::MU0,
            self.epsilon.unwrap_or(base.epsilon),
            self.sigma.unwrap_or(base.sigma),
        )
        .map_err(CliError::from)
    }

    fn validate(&self) -> Result<()> {
        if let Some(s) = self.sigma {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(CliError::config(format!("medium.sigma must be >= 0, got {s}")));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(CliError::config(format!("medium.epsilon must be > 0, got {e}")));
            }
        }
        if let Some(m) = self.mu_r {
            if !(m > 0.0 && m.is_finite()) {
                return Err(CliError::config(format!("medium.mu_r must be > 0, got {m}")));
            }
        }
        Ok(())
    }
}

/// One node of the multi-node section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeScenario {
    pub id: String,
    /// Position (m).
    pub position: [f64; 3],
    /// Coil axis (need not be normalized).
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
    /// Per-node transmit power (W); defaults to the scenario `tx_power`.
    #[serde(default)]
    pub tx_power: Option<f64>,
}

fn default_axis() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

/// Multi-node deployment: nodes share the scenario's transmit-coil design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkScenario {
    pub nodes: Vec<NodeScenario>,
    /// Candidate operating frequencies (Hz).
    pub frequency_set: Vec<f64>,
    /// Connectivity SNR threshold Υ_th.
    pub snr_threshold: f64,
}

impl Default for NetworkScenario {
    /// A three-node chain along +x at the reference hop distance.
    fn default() -> Self {
        NetworkScenario {
            nodes: vec![
                NodeScenario {
                    id: "a".into(),
                    position: [0.0, 0.0, 0.0],
                    axis: default_axis(),
                    tx_power: None,
                },
                NodeScenario {
                    id: "b".into(),
                    position: [defaults::DISTANCE, 0.0, 0.0],
                    axis: default_axis(),
                    tx_power: None,
                },
                NodeScenario {
                    id: "c".into(),
                    position: [2.0 * defaults::DISTANCE, 0.0, 0.0],
                    axis: default_axis(),
                    tx_power: None,
                },
            ],
            frequency_set: vec![1e3, 1e4, 1e5],
            snr_threshold: 1.0,
        }
    }
}

/// A complete run scenario (see the module docs for defaults).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub schema_version: u32,
    /// Carrier / resonance frequency f₀ (Hz).
    pub frequency: f64,
    /// Link distance d (m).
    pub distance: f64,
    /// Transmit power P_S (W).
    pub tx_power: f64,
    /// Noise power spectral density N_of (W/Hz).
    pub noise_psd: f64,
    /// Receive-axis tilt from the opposed-coaxial orientation (degrees).
    pub rx_tilt_deg: f64,
    pub tx: CoilScenario,
    pub rx: CoilScenario,
    pub medium: MediumScenario,
    pub network: NetworkScenario,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            frequency: defaults::F0,
            distance: defaults::DISTANCE,
            tx_power: defaults::TX_POWER,
            noise_psd: defaults::NOISE_PSD,
            rx_tilt_deg: 0.0,
            tx: CoilScenario::default(),
            rx: CoilScenario::default(),
            medium: MediumScenario::default(),
            network: NetworkScenario::default(),
        }
    }
}

impl Scenario {
    /// Loads from a file; `None` or an empty file yields the defaults.
    pub fn load(path: Option<&Path>) -> Result<Scenario> {
        let text = match path {
            Some(p) => fs::read_to_string(p)
                .map_err(|e| CliError::config(format!("scenario {}: {e}", p.display())))?,
            None => String::new(),
        };
        Scenario::from_text(&text)
    }

    /// Parses scenario JSON; whitespace-only text yields the defaults.
    pub fn from_text(text: &str) -> Result<Scenario> {
        let sc: Scenario = if text.trim().is_empty() {
            Scenario::default()
        } else {
            serde_json::from_str(text)
                .map_err(|e| CliError::config(format!("scenario: {e}")))?
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version must be {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        let pos = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::config(format!("{name} must be > 0, got {v}")));
            }
            Ok(())
        };
        pos("frequency", self.frequency)?;
        pos("distance", self.distance)?;
        pos("tx_power", self.tx_power)?;
        pos("noise_psd", self.noise_psd)?;
        if !self.rx_tilt_deg.is_finite() {
            return Err(CliError::config("rx_tilt_deg must be finite".to_string()));
        }
        self.tx.validate("tx")?;
        self.rx.validate("rx")?;
        self.medium.validate()?;
        if self.network.nodes.is_empty() {
            return Err(CliError::config("network.nodes must be non-empty".to_string()));
        }
        if self.network.frequency_set.is_empty() {
            return Err(CliError::config("network.frequency_set must be non-empty".to_string()));
        }
        for &f in &self.network.frequency_set {
            pos("network.frequency_set entry", f)?;
        }
        pos("network.snr_threshold", self.network.snr_threshold)?;
        let mut ids: Vec<&str> = self.network.nodes.iter().map(|n| n.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.network.nodes.len() {
            return Err(CliError::config("network.nodes ids must be unique".to_string()));
        }
        for n in &self.network.nodes {
            if let Some(p) = n.tx_power {
                pos(&format!("network.nodes[{}].tx_power", n.id), p)?;
            }
            if Vector3::from(n.axis).norm() == 0.0 {
                return Err(CliError::config(format!(
                    "network.nodes[{}].axis must be non-zero",
                    n.id
                )));
            }
        }
        Ok(())
    }

    /// Transmit coil tuned to `f0`.
    pub fn tx_coil_at(&self, f0: f64) -> CoilSpec {
        self.tx.build(&defaults::tx_coil(), f0)
    }

    /// Receive coil tuned to `f0`.
    pub fn rx_coil_at(&self, f0: f64) -> CoilSpec {
        self.rx.build(&defaults::rx_coil(), f0)
    }

    pub fn medium(&self) -> Result<Medium> {
        self.medium.build()
    }

    /// Receive-coil axis: opposed coaxial (−x) rotated by `rx_tilt_deg` in
    /// the link plane.
    pub fn rx_axis(&self) -> Vector3<f64> {
        let t = self.rx_tilt_deg.to_radians();
        Vector3::new(-t.cos(), t.sin(), 0.0)
    }

    /// The point-to-point link this scenario describes.
    pub fn link(&self) -> Result<LinkSpec> {
        self.link_at(self.frequency, self.distance)
    }

    /// Same link retuned to `f0` and moved to distance `d`.
    pub fn link_at(&self, f0: f64, d: f64) -> Result<LinkSpec> {
        let link = LinkSpec {
            tx: Antenna::Coil(self.tx_coil_at(f0)),
            tx_pose: Pose::new(Vector3::zeros(), Vector3::x())?,
            rx: self.rx_coil_at(f0),
            rx_pose: Pose::new(Vector3::new(d, 0.0, 0.0), self.rx_axis())?,
            medium: self.medium()?,
            tx_power: self.tx_power,
            noise_psd: self.noise_psd,
            fading: FadingModel::None,
        };
        link.validate()?;
        Ok(link)
    }

    /// The multi-node instantiation: every node carries the transmit-coil
    /// design tuned to the scenario frequency.
    pub fn net_scenario(&self) -> Result<NetScenario> {
        let coil = self.tx_coil_at(self.frequency);
        let nodes = self
            .network
            .nodes
            .iter()
            .map(|n| -> Result<Node> {
                Ok(Node {
                    id: n.id.clone(),
                    antenna: Antenna::Coil(coil.clone()),
                    pose: Pose::new(Vector3::from(n.position), Vector3::from(n.axis))?,
                    tx_power: n.tx_power.unwrap_or(self.tx_power),
                    noise_psd: self.noise_psd,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let sc = NetScenario {
            medium: self.medium()?,
            nodes,
            frequency_set: self.network.frequency_set.clone(),
            snr_threshold: self.network.snr_threshold,
        };
        sc.validate()?;
        Ok(sc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_default_scenario() {
        let sc = Scenario::from_text("  \n ").unwrap();
        assert_eq!(sc, Scenario::default());
        assert_eq!(sc.frequency, 1e4);
        assert_eq!(sc.distance, 60.0);
        assert_eq!(sc.tx_power, 5.0);
        let link = sc.link().unwrap();
        assert_eq!(link.carrier(), 1e4);
        assert_eq!(link.distance(), 60.0);
    }

    #[test]
    fn defaults_round_trip() {
        let sc = Scenario::default();
        let json = serde_json::to_string_pretty(&sc).unwrap();
        let back = Scenario::from_text(&json).unwrap();
        assert_eq!(sc, back);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = Scenario::from_text(r#"{"schema_version":1,"boost":9}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("boost"), "{err}");
    }

    #[test]
    fn negative_radius_names_field() {
        let err =
            Scenario::from_text(r#"{"schema_version":1,"tx":{"radius":-0.6}}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("tx.radius"), "{err}");
    }

    #[test]
    fn partial_override_keeps_rest() {
        let sc = Scenario::from_text(r#"{"frequency":2.0e4,"tx":{"turns":20}}"#).unwrap();
        assert_eq!(sc.tx_coil_at(sc.frequency).turns, 20);
        assert_eq!(sc.tx_coil_at(sc.frequency).radius, 0.6);
        assert_eq!(sc.rx_coil_at(sc.frequency).turns, 30);
        assert_eq!(sc.frequency, 2e4);
    }

    #[test]
    fn default_network_builds() {
        let sc = Scenario::default().net_scenario().unwrap();
        assert_eq!(sc.nodes.len(), 3);
        assert_eq!(sc.frequency_set.len(), 3);
    }
}
