//! The non-preset subcommands: link, sweep, fading, relay, waveguide,
//! crosstalk and network.

use crate::error::{CliError, Result};
use crate::output::{num, substream, write_csv};
use crate::{Ctx, SweepVar};
use mi_core::antennas::{mutual_inductance, Pose};
use mi_core::fading::{
    ergodic_ber, ergodic_capacity, q_function, BcsSpec, ExpectationMode, FadingModel, JLaw,
};
use mi_core::gain::channel_gain;
use mi_core::metrics::{bandwidth_numeric, capacity, snr, CapacityMode, LinkSpec};
use mi_core::network::{
    best_path, isolation_probability, link_graph, power_allocation_br, OrientationMode,
    OrientationModel,
};
use mi_core::relays::{cmic_af, crosstalk_impedances, waveguide_gain};
use nalgebra::Vector3;
use rayon::prelude::*;

fn breakdown(link: &LinkSpec, f: f64) -> Result<mi_core::gain::GainBreakdown> {
    Ok(channel_gain(&link.tx, &link.rx, &link.tx_pose, &link.rx_pose, &link.medium, f)?)
}

pub fn link(ctx: &Ctx) -> Result<()> {
    let link = ctx.scenario.link()?;
    let f0 = link.carrier();
    let gb = breakdown(&link, f0)?;
    let bw = bandwidth_numeric(&link)?;
    let snr0 = snr(&link, f0)?;
    let cap_flat = capacity(&link, CapacityMode::Flat)?;
    let cap_int = capacity(&link, CapacityMode::Integral)?;
    println!("link: f0 = {f0} Hz, d = {} m", link.distance());
    println!(
        "gain: circuit {:.6e} · space {:.6e} · eddy {:.6e} · polarization {:.6e} = {:.6e}",
        gb.circuit, gb.space, gb.eddy, gb.polarization, gb.total
    );
    println!("near-field model valid: {}", gb.near_field_valid);
    println!("bandwidth: {:.6} Hz", bw.value);
    println!("snr at carrier: {:.6e}", snr0);
    println!("capacity: flat {:.6} bit/s, integral {:.6} bit/s", cap_flat, cap_int);
    write_csv(
        &ctx.out,
        "link.csv",
        &[
            "frequency_hz",
            "distance_m",
            "gain_circuit",
            "gain_space",
            "gain_eddy",
            "gain_polarization",
            "gain_total",
            "bandwidth_hz",
            "snr",
            "capacity_flat_bps",
            "capacity_integral_bps",
        ],
        &[vec![
            num(f0),
            num(link.distance()),
            num(gb.circuit),
            num(gb.space),
            num(gb.eddy),
            num(gb.polarization),
            num(gb.total),
            num(bw.value),
            num(snr0),
            num(cap_flat),
            num(cap_int),
        ]],
    )?;
    Ok(())
}

/// Inclusive linear or logarithmic grid.
pub fn grid(start: f64, stop: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(CliError::usage(format!("--points must be >= 2, got {points}")));
    }
    if !(start.is_finite() && stop.is_finite() && start < stop) {
        return Err(CliError::usage(format!(
            "grid must be strictly increasing, got start {start}, stop {stop}"
        )));
    }
    if log && !(start > 0.0) {
        return Err(CliError::usage(format!("--log needs start > 0, got {start}")));
    }
    let n = points as f64 - 1.0;
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / n;
            if log {
                start * (stop / start).powf(t)
            } else {
                start + (stop - start) * t
            }
        })
        .collect())
}

pub fn sweep(
    ctx: &Ctx,
    var: SweepVar,
    start: f64,
    stop: f64,
    points: usize,
    log: bool,
) -> Result<()> {
    let values = grid(start, stop, points, log)?;
    let sc = &ctx.scenario;
    let rows = values
        .par_iter()
        .map(|&v| -> Result<Vec<String>> {
            let link = match var {
                SweepVar::Distance => sc.link_at(sc.frequency, v)?,
                SweepVar::Frequency => sc.link_at(v, sc.distance)?,
            };
            let bw = bandwidth_numeric(&link)?;
            let s = snr(&link, link.carrier())?;
            Ok(vec![
                num(v),
                num(link.gain(link.carrier())?),
                num(bw.value),
                num(s),
                num(capacity(&link, CapacityMode::Flat)?),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let var_name = match var {
        SweepVar::Distance => "distance_m",
        SweepVar::Frequency => "frequency_hz",
    };
    write_csv(
        &ctx.out,
        "sweep.csv",
        &[var_name, "gain_total", "bandwidth_hz", "snr", "capacity_flat_bps"],
        &rows,
    )?;
    Ok(())
}

pub fn fading(
    ctx: &Ctx,
    sigma_d: f64,
    sigma_s: Option<f64>,
    varsigma: f64,
    mean_snr: f64,
) -> Result<()> {
    if !(mean_snr > 0.0) {
        return Err(CliError::usage(format!("--snr must be > 0, got {mean_snr}")));
    }
    let spec_d =
        BcsSpec::new(sigma_d, varsigma).map_err(|e| CliError::usage(e.to_string()))?;
    let link = ctx.scenario.link()?;
    let law = match sigma_s {
        None => JLaw::Bcs(spec_d),
        Some(ss) => {
            let spec_s =
                BcsSpec::new(ss, varsigma).map_err(|e| CliError::usage(e.to_string()))?;
            let model = FadingModel::Bcs { tx: Some(spec_s), rx: Some(spec_d) };
            let mut rng = substream(ctx.seed, 0);
            JLaw::from_model(&model, &link.tx_pose, &link.rx_pose, &mut rng, ctx.mc_samples)?
        }
    };
    let w0 = spec_d.point_mass_weight();
    let ej_closed = spec_d.expectation(ExpectationMode::ClosedForm)?;
    let ej_quad = spec_d.expectation(ExpectationMode::Integral)?;
    let mean = law.mean()?;
    let ec = ergodic_capacity(&law, mean_snr)?;
    let ec_none = (1.0 + mean_snr).log2();
    let ber = ergodic_ber(&law, mean_snr)?;
    let bound = q_function((mean_snr * mean.value).sqrt());
    let pm = |e: Option<f64>| e.map(|s| format!(" ± {s:.2e}")).unwrap_or_default();
    println!("fading law: sigma_d {sigma_d}, sigma_s {sigma_s:?}, varsigma {varsigma}");
    println!("no-loss point mass w0: {w0:.6}");
    println!("mean fading gain: closed {ej_closed:.6}, quadrature {ej_quad:.6}");
    println!("law mean: {:.6}{}", mean.value, pm(mean.mc_std));
    println!("ergodic capacity (fading): {:.6}{} bit/s/Hz", ec.value, pm(ec.mc_std));
    println!("ergodic capacity (no fading): {ec_none:.6} bit/s/Hz");
    println!(
        "ergodic BER at Eb/N0 {mean_snr}: {:.6e}{} (lower bound {:.6e})",
        ber.value,
        pm(ber.mc_std),
        bound
    );
    let xs = grid(1.0 - varsigma, 1.0, 401, false)?;
    let rows: Vec<Vec<String>> = xs
        .iter()
        .map(|&x| vec![num(x), num(spec_d.pdf(x)), num(spec_d.cdf(x))])
        .collect();
    write_csv(&ctx.out, "fading.csv", &["x", "pdf", "cdf"], &rows)?;
    Ok(())
}

pub fn relay(ctx: &Ctx, relay_x: f64, relay_y: f64, relay_z: f64) -> Result<()> {
    let link = ctx.scenario.link()?;
    let coil = ctx.scenario.tx_coil_at(ctx.scenario.frequency);
    let pose = Pose::new(Vector3::new(relay_x, relay_y, relay_z), Vector3::x())?;
    let r = cmic_af(&link, &coil, &pose)?;
    println!("relay at ({relay_x}, {relay_y}, {relay_z}) m");
    println!("snr: direct {:.6e}, AF {:.6e}", r.snr_dmi, r.snr_af);
    println!("capacity: direct {:.6} bit/s, AF {:.6} bit/s", r.capacity_dmi, r.capacity_af);
    println!("capacity multiplication gain: {:.6}", r.cmg);
    println!("bandwidth: direct {:.6} Hz, AF {:.6} Hz", r.bandwidth_dmi, r.bandwidth_af);
    write_csv(
        &ctx.out,
        "relay.csv",
        &[
            "relay_x_m",
            "relay_y_m",
            "relay_z_m",
            "snr_dmi",
            "snr_af",
            "capacity_dmi_bps",
            "capacity_af_bps",
            "cmg",
            "bandwidth_dmi_hz",
            "bandwidth_af_hz",
        ],
        &[vec![
            num(relay_x),
            num(relay_y),
            num(relay_z),
            num(r.snr_dmi),
            num(r.snr_af),
            num(r.capacity_dmi),
            num(r.capacity_af),
            num(r.cmg),
            num(r.bandwidth_dmi),
            num(r.bandwidth_af),
        ]],
    )?;
    Ok(())
}

pub fn waveguide(ctx: &Ctx, relays: usize, spacing: Option<f64>) -> Result<()> {
    if relays > 1000 {
        return Err(CliError::usage(format!("--relays must be <= 1000, got {relays}")));
    }
    let sc = &ctx.scenario;
    let f0 = sc.frequency;
    let coil = sc.tx_coil_at(f0);
    let spacing = spacing.unwrap_or(sc.distance / (relays as f64 + 1.0));
    if !(spacing > 0.0) {
        return Err(CliError::usage(format!("--spacing must be > 0, got {spacing}")));
    }
    let medium = sc.medium()?;
    let p0 = Pose::new(Vector3::zeros(), Vector3::x())?;
    let p1 = Pose::new(Vector3::new(spacing, 0.0, 0.0), Vector3::x())?;
    let m = mutual_inductance(&coil, &coil, &p0, &p1, &medium, f0)?.henries;
    println!("waveguide: spacing {spacing} m, adjacent mutual inductance {m:.6e} H");
    let rows = (0..=relays)
        .map(|n| -> Result<Vec<String>> {
            let g = waveguide_gain(&coil, n, m, f0)?.norm();
            Ok(vec![n.to_string(), num(spacing), num(g), num(10.0 * g.log10())])
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(&ctx.out, "waveguide.csv", &["relays", "spacing_m", "gain", "gain_db"], &rows)?;
    Ok(())
}

pub fn crosstalk(
    ctx: &Ctx,
    relay_x: Option<f64>,
    relay_y: Option<f64>,
    frequency: Option<f64>,
) -> Result<()> {
    let sc = &ctx.scenario;
    let d = sc.distance;
    let (rx, ry) = (relay_x.unwrap_or(d / 2.0), relay_y.unwrap_or(d));
    let f = frequency.unwrap_or(sc.frequency);
    if !(f > 0.0) {
        return Err(CliError::usage(format!("--frequency must be > 0, got {f}")));
    }
    let coil = sc.tx_coil_at(f);
    let medium = sc.medium()?;
    let ps = Pose::new(Vector3::zeros(), Vector3::x())?;
    let pd = Pose::new(Vector3::new(d, 0.0, 0.0), Vector3::x())?;
    let pr = Pose::new(Vector3::new(rx, ry, 0.0), Vector3::x())?;
    let rep = crosstalk_impedances(&coil, &ps, &pd, &pr, f, &medium)?;
    println!("crosstalk: relay at ({rx}, {ry}) m, f = {f} Hz");
    println!("gain ratio with/without relay: {:.9}", rep.ratio);
    println!("classification: {:?}", rep.classification);
    println!("|Z_pa1| = {:.6e}, |Z_pa2| = {:.6e}", rep.z_pa1.norm(), rep.z_pa2.norm());
    write_csv(
        &ctx.out,
        "crosstalk.csv",
        &[
            "relay_x_m",
            "relay_y_m",
            "frequency_hz",
            "ratio",
            "z_pa1_ohm3",
            "z_pa2_ohm4",
            "classification",
        ],
        &[vec![
            num(rx),
            num(ry),
            num(f),
            num(rep.ratio),
            num(rep.z_pa1.norm()),
            num(rep.z_pa2.norm()),
            format!("{:?}", rep.classification),
        ]],
    )?;
    Ok(())
}

pub struct NetworkArgs {
    pub src: Option<String>,
    pub dst: Option<String>,
    pub optimal_rx: bool,
    pub isolation_density: Option<f64>,
    pub region: f64,
    pub random_axes: bool,
    pub game_weight: Option<f64>,
    pub p_max: f64,
}

pub fn network(ctx: &Ctx, args: NetworkArgs) -> Result<()> {
    let sc = ctx.scenario.net_scenario()?;
    let mode = if args.optimal_rx { OrientationMode::OptimalRx } else { OrientationMode::Fixed };
    let mut edge_rows = Vec::new();
    let mut total = 0usize;
    for &f in &sc.frequency_set {
        let g = link_graph(&sc, f, mode)?;
        total += g.edges.len();
        for e in &g.edges {
            edge_rows.push(vec![
                num(f),
                sc.nodes[e.from].id.clone(),
                sc.nodes[e.to].id.clone(),
                num(e.snr),
                num(e.capacity),
            ]);
        }
    }
    println!(
        "network: {} nodes, {} frequencies, {} feasible directed edges",
        sc.nodes.len(),
        sc.frequency_set.len(),
        total
    );
    write_csv(
        &ctx.out,
        "network_edges.csv",
        &["frequency_hz", "from", "to", "snr", "capacity_bps"],
        &edge_rows,
    )?;

    if let (Some(src), Some(dst)) = (&args.src, &args.dst) {
        match best_path(&sc, src, dst, mode)? {
            Some(route) => {
                println!(
                    "route {src} -> {dst}: {} hops, bottleneck {:.6} bit/s",
                    route.hops.len(),
                    route.bottleneck
                );
                let rows: Vec<Vec<String>> = route
                    .hops
                    .iter()
                    .enumerate()
                    .map(|(i, h)| {
                        vec![
                            i.to_string(),
                            h.from.clone(),
                            h.to.clone(),
                            num(h.frequency),
                            num(h.capacity),
                        ]
                    })
                    .collect();
                write_csv(
                    &ctx.out,
                    "route.csv",
                    &["hop", "from", "to", "frequency_hz", "capacity_bps"],
                    &rows,
                )?;
            }
            None => println!("route {src} -> {dst}: unreachable"),
        }
    }

    if let Some(density) = args.isolation_density {
        let model = if args.random_axes {
            OrientationModel::RandomAxes
        } else {
            OrientationModel::Aligned
        };
        let region = Vector3::new(args.region, args.region, args.region);
        let mut rng = substream(ctx.seed, 0);
        let (p, std) = isolation_probability(
            &sc.nodes[0],
            &sc.medium,
            sc.frequency_set[0],
            sc.snr_threshold,
            density,
            &region,
            model,
            ctx.mc_samples,
            &mut rng,
        )?;
        println!("isolation probability at density {density}: {p:.4} ± {std:.4}");
        write_csv(
            &ctx.out,
            "isolation.csv",
            &["density_per_m3", "probability", "std"],
            &[vec![num(density), num(p), num(std)]],
        )?;
    }

    if let Some(w) = args.game_weight {
        if !(w >= 0.0) {
            return Err(CliError::usage(format!("--game-weight must be >= 0, got {w}")));
        }
        if !(args.p_max > 0.0) {
            return Err(CliError::usage(format!("--p-max must be > 0, got {}", args.p_max)));
        }
        let p_max = vec![args.p_max; sc.nodes.len()];
        let r = power_allocation_br(&sc, w, &p_max, 1000, 1e-10)?;
        println!(
            "power game: {} iterations, converged: {}",
            r.iterations, r.converged
        );
        let rows: Vec<Vec<String>> = sc
            .nodes
            .iter()
            .zip(r.powers.iter().zip(&r.utilities))
            .map(|(n, (&p, &u))| vec![n.id.clone(), num(p), num(u)])
            .collect();
        write_csv(&ctx.out, "power.csv", &["node", "power_w", "utility"], &rows)?;
    }
    Ok(())
}
