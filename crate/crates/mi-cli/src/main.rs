//! `milink` — scenario-driven studies of through-the-earth magnetic-induction
//! links and small MI networks.
//!
//! Every command reads one JSON scenario (`--scenario`, defaults to the
//! built-in reference link), writes RFC-4180 CSV files under `--out`, and
//! prints a short summary. All randomness derives from `--seed` via per-cell
//! substreams, so results do not depend on `--jobs`.
//!
//! Exit codes: 0 success, 1 usage error, 2 scenario/configuration error,
//! 3 numerical failure.

mod commands;
mod error;
mod fig;
mod output;
mod scenario;

use clap::{Parser, Subcommand, ValueEnum};
use error::{CliError, Result};
use scenario::Scenario;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "milink", version, about = "Magnetic-induction link and network studies")]
struct Cli {
    /// Scenario JSON file; omitted or empty means the built-in defaults.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Master seed for every Monte-Carlo substream.
    #[arg(long, global = true, default_value_t = output::DEFAULT_SEED)]
    seed: u64,

    /// Worker threads for sweeps; 0 picks the machine default. Results are
    /// independent of this value.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Sample count for Monte-Carlo estimates.
    #[arg(long, global = true, default_value_t = 100_000)]
    mc_samples: usize,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepVar {
    /// Link distance d (m).
    Distance,
    /// Carrier frequency f₀ (Hz); both coils are retuned per cell.
    Frequency,
}

/// Figure-reproduction presets (each writes `<preset>.csv`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FigPreset {
    /// Capacity vs distance for {air, soil, seawater} × {1, 10, 1000} kHz.
    /// Columns: distance_m, capacity_bps_<medium>_<freq>.
    FigCapacity,
    /// Communication range vs carrier frequency in dry and wet soil.
    /// Requires --snr-threshold. Columns: frequency_hz, range_dry_m, range_wet_m.
    FigRange,
    /// Ergodic capacity vs mean SNR across vibration intensities.
    /// Requires --varsigma. Columns: snr_db, ec_none_bps_hz, ec_sigma_<σ>.
    FigFading,
    /// Ergodic BER vs Eb/N0 across vibration intensities, with lower bounds.
    /// Requires --varsigma. Columns: ebn0_db, ber_sigma_<σ>, bound_sigma_<σ>.
    FigBer,
    /// Passive-relay crosstalk ratio vs link distance at 10 kHz and 1 MHz.
    /// Columns: d_sd_m, ratio_10khz, ratio_1mhz.
    FigCrosstalk,
    /// AF-relay vs direct-link 3-dB bandwidth over the default sweep.
    /// Columns: d_sd_m, bandwidth_af_hz, bandwidth_dmi_hz.
    FigCmiBw,
    /// Capacity-multiplication-gain map over relay positions.
    /// Columns: x_m, y_m, cmg.
    FigCmg,
    /// Mean fading gain E[J] over the (σ, ς) grid.
    /// Columns: sigma, varsigma, e_j.
    FigEj,
    /// Near-field boundary vs frequency per medium.
    /// Columns: frequency_hz, boundary_<medium>_m.
    FigNearfield,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the scenario link: gain factors, bandwidth, SNR, capacity.
    /// CSV link.csv columns: frequency_hz, distance_m, gain_circuit,
    /// gain_space, gain_eddy, gain_polarization, gain_total, bandwidth_hz,
    /// snr, capacity_flat_bps, capacity_integral_bps.
    Link,
    /// Sweep one link variable. CSV sweep.csv columns: <var>, gain_total,
    /// bandwidth_hz, snr, capacity_flat_bps.
    Sweep {
        /// Swept variable.
        #[arg(long, value_enum)]
        var: SweepVar,
        /// Grid start (inclusive).
        #[arg(long)]
        start: f64,
        /// Grid stop (inclusive).
        #[arg(long)]
        stop: f64,
        /// Grid size.
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Logarithmic grid spacing.
        #[arg(long)]
        log: bool,
    },
    /// Fast-fading statistics and ergodic metrics. CSV fading.csv columns:
    /// x, pdf, cdf (the normalized fading-gain law).
    Fading {
        /// Receiver-end vibration intensity σ_D.
        #[arg(long)]
        sigma_d: f64,
        /// Transmitter-end vibration intensity σ_S (both ends vibrate when
        /// set; metrics then come from Monte Carlo).
        #[arg(long)]
        sigma_s: Option<f64>,
        /// Misalignment-loss cap ς ∈ (0, 1].
        #[arg(long)]
        varsigma: f64,
        /// Mean SNR of the ergodic metrics (linear).
        #[arg(long, default_value_t = 10.0)]
        snr: f64,
    },
    /// Amplify-and-forward relay study at one relay position. CSV relay.csv
    /// columns: relay_x_m, relay_y_m, relay_z_m, snr_dmi, snr_af,
    /// capacity_dmi_bps, capacity_af_bps, cmg, bandwidth_dmi_hz,
    /// bandwidth_af_hz.
    Relay {
        /// Relay x position (m).
        #[arg(long)]
        relay_x: f64,
        /// Relay y position (m).
        #[arg(long)]
        relay_y: f64,
        /// Relay z position (m).
        #[arg(long, default_value_t = 0.0)]
        relay_z: f64,
    },
    /// Passive relay chain (waveguide) gain vs relay count. CSV
    /// waveguide.csv columns: relays, spacing_m, gain, gain_db.
    Waveguide {
        /// Maximum relay count (the CSV covers 0..=relays).
        #[arg(long, default_value_t = 5)]
        relays: usize,
        /// Adjacent-coil spacing (m); defaults to distance/(relays+1).
        #[arg(long)]
        spacing: Option<f64>,
    },
    /// Crosstalk of one passive relay on the scenario link. CSV
    /// crosstalk.csv columns: relay_x_m, relay_y_m, frequency_hz, ratio,
    /// z_pa1_ohm3, z_pa2_ohm4, classification.
    Crosstalk {
        /// Relay x position (m); defaults to d/2.
        #[arg(long)]
        relay_x: Option<f64>,
        /// Relay y position (m); defaults to d.
        #[arg(long)]
        relay_y: Option<f64>,
        /// Evaluation frequency (Hz); the coils are retuned to it. Defaults
        /// to the scenario frequency.
        #[arg(long)]
        frequency: Option<f64>,
    },
    /// Multi-node connectivity, routing, isolation and power allocation.
    /// CSVs: network_edges.csv (frequency_hz, from, to, snr, capacity_bps);
    /// route.csv (hop, from, to, frequency_hz, capacity_bps) with --src/--dst;
    /// isolation.csv (density_per_m3, probability, std) with
    /// --isolation-density; power.csv (node, power_w, utility) with
    /// --game-weight.
    Network {
        /// Route source node id (with --dst).
        #[arg(long, requires = "dst")]
        src: Option<String>,
        /// Route destination node id (with --src).
        #[arg(long, requires = "src")]
        dst: Option<String>,
        /// Receivers track the local field direction (J = 1 + 3cos²θ).
        #[arg(long)]
        optimal_rx: bool,
        /// Run the isolation Monte Carlo at this node density (nodes/m³).
        #[arg(long)]
        isolation_density: Option<f64>,
        /// Isolation region cube edge (m).
        #[arg(long, default_value_t = 120.0)]
        region: f64,
        /// Isolation model: random axes instead of pairwise-aligned coils.
        #[arg(long)]
        random_axes: bool,
        /// Run the best-response power game with this pricing weight w.
        #[arg(long)]
        game_weight: Option<f64>,
        /// Per-node power cap of the game (W).
        #[arg(long, default_value_t = 5.0)]
        p_max: f64,
    },
    /// Figure-reproduction presets; see the preset list for columns.
    Fig {
        #[arg(value_enum)]
        preset: FigPreset,
        /// Connectivity SNR threshold Υ_th (required by fig-range).
        #[arg(long)]
        snr_threshold: Option<f64>,
        /// Misalignment-loss cap ς (required by fig-fading and fig-ber).
        #[arg(long)]
        varsigma: Option<f64>,
    },
}

/// Everything a command needs besides its own flags.
pub struct Ctx {
    pub scenario: Scenario,
    pub seed: u64,
    pub out: PathBuf,
    pub mc_samples: usize,
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        scenario: Scenario::load(cli.scenario.as_deref())?,
        seed: cli.seed,
        out: cli.out,
        mc_samples: cli.mc_samples,
    };
    if ctx.mc_samples == 0 {
        return Err(CliError::usage("--mc-samples must be >= 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::usage(format!("--jobs: {e}")))?;
    pool.install(|| match cli.cmd {
        Cmd::Link => commands::link(&ctx),
        Cmd::Sweep { var, start, stop, points, log } => {
            commands::sweep(&ctx, var, start, stop, points, log)
        }
        Cmd::Fading { sigma_d, sigma_s, varsigma, snr } => {
            commands::fading(&ctx, sigma_d, sigma_s, varsigma, snr)
        }
        Cmd::Relay { relay_x, relay_y, relay_z } => {
            commands::relay(&ctx, relay_x, relay_y, relay_z)
        }
        Cmd::Waveguide { relays, spacing } => commands::waveguide(&ctx, relays, spacing),
        Cmd::Crosstalk { relay_x, relay_y, frequency } => {
            commands::crosstalk(&ctx, relay_x, relay_y, frequency)
        }
        Cmd::Network {
            src,
            dst,
            optimal_rx,
            isolation_density,
            region,
            random_axes,
            game_weight,
            p_max,
        } => commands::network(
            &ctx,
            commands::NetworkArgs {
                src,
                dst,
                optimal_rx,
                isolation_density,
                region,
                random_axes,
                game_weight,
                p_max,
            },
        ),
        Cmd::Fig { preset, snr_threshold, varsigma } => {
            fig::run(&ctx, preset, snr_threshold, varsigma)
        }
    })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
