//! Figure-reproduction presets.
//!
//! Each preset freezes the sweep axes and parameter families of one study
//! and writes a single CSV named after the preset. Presets whose source
//! figure leaves a parameter implicit (the SNR threshold of the range
//! study, the misalignment cap of the fading studies) require it as an
//! explicit flag instead of guessing.

use crate::commands::grid;
use crate::error::{CliError, Result};
use crate::output::{num, write_csv};
use crate::{Ctx, FigPreset};
use mi_core::em::{near_field_boundary, Medium};
use mi_core::fading::{ergodic_ber, ergodic_capacity, q_function, BcsSpec, ExpectationMode, JLaw};
use mi_core::metrics::{capacity, mic_range, CapacityMode, LinkSpec};
use mi_core::relays::{bandwidth_comparison_sweep, crosstalk_impedances, relay_area_map};
use mi_core::{antennas::Pose, MiError};
use nalgebra::Vector3;
use rayon::prelude::*;

/// Vibration-intensity family shared by the fading and BER presets.
const SIGMA_FAMILY: [f64; 7] = [0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0];

/// Maps a per-cell numerical failure to NaN so one infeasible cell (e.g. an
/// unreachable range) does not abort a whole preset sweep.
fn nan_on_numeric(r: mi_core::Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(MiError::Numeric(_)) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

pub fn run(
    ctx: &Ctx,
    preset: FigPreset,
    snr_threshold: Option<f64>,
    varsigma: Option<f64>,
) -> Result<()> {
    match preset {
        FigPreset::FigCapacity => fig_capacity(ctx),
        FigPreset::FigRange => {
            let th = snr_threshold.ok_or_else(|| {
                CliError::usage("fig-range needs an explicit --snr-threshold")
            })?;
            fig_range(ctx, th)
        }
        FigPreset::FigFading => fig_fading(ctx, require_varsigma(varsigma, "fig-fading")?),
        FigPreset::FigBer => fig_ber(ctx, require_varsigma(varsigma, "fig-ber")?),
        FigPreset::FigCrosstalk => fig_crosstalk(ctx),
        FigPreset::FigCmiBw => fig_cmi_bw(ctx),
        FigPreset::FigCmg => fig_cmg(ctx),
        FigPreset::FigEj => fig_ej(ctx),
        FigPreset::FigNearfield => fig_nearfield(ctx),
    }
}

fn require_varsigma(varsigma: Option<f64>, preset: &str) -> Result<f64> {
    let v = varsigma
        .ok_or_else(|| CliError::usage(format!("{preset} needs an explicit --varsigma")))?;
    if !(v > 0.0 && v <= 1.0) {
        return Err(CliError::usage(format!("--varsigma must be in (0, 1], got {v}")));
    }
    Ok(v)
}

/// The three media of the capacity and range studies.
fn capacity_media() -> [(&'static str, Medium); 3] {
    [("air", Medium::air()), ("soil", Medium::default_soil()), ("sea", Medium::seawater())]
}

fn fig_capacity(ctx: &Ctx) -> Result<()> {
    let freqs = [1e3, 1e4, 1e6];
    let distances = grid(5.0, 200.0, 40, false)?;
    let media = capacity_media();
    let mut header: Vec<String> = vec!["distance_m".into()];
    for (name, _) in &media {
        for f in freqs {
            header.push(format!("capacity_bps_{name}_{f:.0}hz"));
        }
    }
    let rows = distances
        .par_iter()
        .map(|&d| -> Result<Vec<String>> {
            let mut row = vec![num(d)];
            for (_, medium) in &media {
                for f in freqs {
                    let mut link = ctx.scenario.link_at(f, d)?;
                    link.medium = *medium;
                    row.push(num(nan_on_numeric(capacity(&link, CapacityMode::Flat))?));
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(&ctx.out, "fig-capacity.csv", &header_refs, &rows)?;
    Ok(())
}

fn fig_range(ctx: &Ctx, snr_threshold: f64) -> Result<()> {
    if !(snr_threshold > 0.0) {
        return Err(CliError::usage(format!(
            "--snr-threshold must be > 0, got {snr_threshold}"
        )));
    }
    let freqs = [1e3, 2e3, 5e3, 1e4, 2e4, 5e4, 1e5];
    let soils = [("dry", Medium::dry_soil()), ("wet", Medium::wet_soil())];
    let rows = freqs
        .par_iter()
        .map(|&f| -> Result<Vec<String>> {
            let mut row = vec![num(f)];
            for (_, medium) in &soils {
                let mut link = ctx.scenario.link_at(f, ctx.scenario.distance)?;
                link.medium = *medium;
                let r = nan_on_numeric(mic_range(&link, snr_threshold).map(|r| r.meters))?;
                row.push(num(r));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &ctx.out,
        "fig-range.csv",
        &["frequency_hz", "range_dry_m", "range_wet_m"],
        &rows,
    )?;
    Ok(())
}

fn fig_fading(ctx: &Ctx, varsigma: f64) -> Result<()> {
    let mut header: Vec<String> = vec!["snr_db".into(), "ec_none_bps_hz".into()];
    for s in SIGMA_FAMILY {
        header.push(format!("ec_sigma_{s}"));
    }
    let snr_dbs = grid(0.0, 20.0, 21, false)?;
    let rows = snr_dbs
        .par_iter()
        .map(|&db| -> Result<Vec<String>> {
            let snr = 10f64.powf(db / 10.0);
            let mut row = vec![num(db), num((1.0 + snr).log2())];
            for s in SIGMA_FAMILY {
                let law = JLaw::Bcs(BcsSpec::new(s, varsigma)?);
                row.push(num(ergodic_capacity(&law, snr)?.value));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(&ctx.out, "fig-fading.csv", &header_refs, &rows)?;
    Ok(())
}

fn fig_ber(ctx: &Ctx, varsigma: f64) -> Result<()> {
    let mut header: Vec<String> = vec!["ebn0_db".into()];
    for s in SIGMA_FAMILY {
        header.push(format!("ber_sigma_{s}"));
        header.push(format!("bound_sigma_{s}"));
    }
    let ebn0_dbs = grid(0.0, 15.0, 16, false)?;
    let rows = ebn0_dbs
        .par_iter()
        .map(|&db| -> Result<Vec<String>> {
            let ebn0 = 10f64.powf(db / 10.0);
            let mut row = vec![num(db)];
            for s in SIGMA_FAMILY {
                let spec = BcsSpec::new(s, varsigma)?;
                let law = JLaw::Bcs(spec);
                let e_j = spec.expectation(ExpectationMode::ClosedForm)?;
                row.push(num(ergodic_ber(&law, ebn0)?.value));
                row.push(num(q_function((ebn0 * e_j).sqrt())));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(&ctx.out, "fig-ber.csv", &header_refs, &rows)?;
    Ok(())
}

fn fig_crosstalk(ctx: &Ctx) -> Result<()> {
    let distances = grid(2.0, 100.0, 50, false)?;
    let medium = ctx.scenario.medium()?;
    let rows = distances
        .par_iter()
        .map(|&d| -> Result<Vec<String>> {
            let mut row = vec![num(d)];
            // relay halfway along the link, one link-length off-axis
            let ps = Pose::new(Vector3::zeros(), Vector3::x())?;
            let pd = Pose::new(Vector3::new(d, 0.0, 0.0), Vector3::x())?;
            let pr = Pose::new(Vector3::new(d / 2.0, d, 0.0), Vector3::x())?;
            for f in [1e4, 1e6] {
                let coil = ctx.scenario.tx_coil_at(f);
                row.push(num(crosstalk_impedances(&coil, &ps, &pd, &pr, f, &medium)?.ratio));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &ctx.out,
        "fig-crosstalk.csv",
        &["d_sd_m", "ratio_10khz", "ratio_1mhz"],
        &rows,
    )?;
    Ok(())
}

fn fig_cmi_bw(ctx: &Ctx) -> Result<()> {
    let distances = grid(20.0, 100.0, 17, false)?;
    let rows: Vec<Vec<String>> = bandwidth_comparison_sweep(&distances)?
        .into_iter()
        .map(|(d, b_af, b_dmi)| vec![num(d), num(b_af), num(b_dmi)])
        .collect();
    write_csv(
        &ctx.out,
        "fig-cmi-bw.csv",
        &["d_sd_m", "bandwidth_af_hz", "bandwidth_dmi_hz"],
        &rows,
    )?;
    Ok(())
}

fn fig_cmg(ctx: &Ctx) -> Result<()> {
    // the relay-position study tilts the receive axis 30° off coaxial
    let mut sc = ctx.scenario.clone();
    sc.rx_tilt_deg = 30.0;
    let link: LinkSpec = sc.link()?;
    let relay = sc.tx_coil_at(sc.frequency);
    let d = sc.distance;
    let xs = grid(0.0, d, 13, false)?;
    let ys = grid(d / 12.0, d, 12, false)?;
    let map = relay_area_map(&link, &relay, &Vector3::x(), &xs, &ys)?;
    println!(
        "max CMG {:.6} at relay ({:.3}, {:.3}) m",
        map.max_cmg,
        map.xs[map.max_at.0],
        map.ys[map.max_at.1]
    );
    let mut rows = Vec::with_capacity(xs.len() * ys.len());
    for (iy, &y) in map.ys.iter().enumerate() {
        for (ix, &x) in map.xs.iter().enumerate() {
            rows.push(vec![num(x), num(y), num(map.cmg[iy][ix])]);
        }
    }
    write_csv(&ctx.out, "fig-cmg.csv", &["x_m", "y_m", "cmg"], &rows)?;
    Ok(())
}

fn fig_ej(ctx: &Ctx) -> Result<()> {
    let sigmas = grid(0.05, 1.0, 20, false)?;
    let varsigmas = grid(0.1, 1.0, 10, false)?;
    let mut rows = Vec::with_capacity(sigmas.len() * varsigmas.len());
    for &s in &sigmas {
        for &v in &varsigmas {
            let e = BcsSpec::new(s, v)?.expectation(ExpectationMode::ClosedForm)?;
            rows.push(vec![num(s), num(v), num(e)]);
        }
    }
    write_csv(&ctx.out, "fig-ej.csv", &["sigma", "varsigma", "e_j"], &rows)?;
    Ok(())
}

fn fig_nearfield(ctx: &Ctx) -> Result<()> {
    let freqs = grid(1e3, 1e6, 31, true)?;
    let media = [
        ("air", Medium::air()),
        ("dry", Medium::dry_soil()),
        ("wet", Medium::wet_soil()),
        ("sea", Medium::seawater()),
    ];
    let rows = freqs
        .iter()
        .map(|&f| -> Result<Vec<String>> {
            let mut row = vec![num(f)];
            for (_, m) in &media {
                row.push(num(near_field_boundary(f, m, 1.0)?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &ctx.out,
        "fig-nearfield.csv",
        &["frequency_hz", "boundary_air_m", "boundary_dry_m", "boundary_wet_m", "boundary_sea_m"],
        &rows,
    )?;
    Ok(())
}
