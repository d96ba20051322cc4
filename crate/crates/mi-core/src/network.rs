//! Small multi-node layer: per-frequency connectivity graphs, routing with
//! per-hop frequency switching, Monte-Carlo isolation probability, and a
//! best-response power-allocation game.

use crate::antennas::{Antenna, CoilSpec, Pose};
use crate::em::Medium;
use crate::error::{MiError, Result};
use crate::fading::FadingModel;
use crate::gain::{channel_gain, circuit_gain_coil, circuit_gain_rpma, eddy_gain, space_gain};
use crate::metrics::{bandwidth_numeric, LinkSpec};
use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Poisson, UnitSphere};

/// One network node.
#[derive(Debug, Clone)]
pub struct Node {
    pub id: String,
    pub antenna: Antenna,
    pub pose: Pose,
    /// Transmit power P_S (W).
    pub tx_power: f64,
    /// Noise PSD at this node's receiver (W/Hz).
    pub noise_psd: f64,
}

/// A multi-node deployment with its frequency plan and SNR threshold.
#[derive(Debug, Clone)]
pub struct NetScenario {
    pub medium: Medium,
    pub nodes: Vec<Node>,
    /// Candidate operating frequencies (Hz).
    pub frequency_set: Vec<f64>,
    /// Connectivity threshold Υ_th.
    pub snr_threshold: f64,
}

impl NetScenario {
    pub fn validate(&self) -> Result<()> {
        self.medium.validate()?;
        if self.frequency_set.is_empty() {
            return Err(MiError::domain("scenario frequency_set must be non-empty"));
        }
        for &f in &self.frequency_set {
            if !(f > 0.0) {
                return Err(MiError::domain(format!("frequency must be > 0, got {f}")));
            }
        }
        if !(self.snr_threshold > 0.0) {
            return Err(MiError::domain(format!(
                "snr_threshold must be > 0, got {}",
                self.snr_threshold
            )));
        }
        let mut ids: Vec<&str> = self.nodes.iter().map(|n| n.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.nodes.len() {
            return Err(MiError::domain("node ids must be unique"));
        }
        for n in &self.nodes {
            match &n.antenna {
                Antenna::Coil(c) => c.validate()?,
                Antenna::Rpma(r) => r.validate()?,
            }
            n.pose.validate()?;
            if !(n.tx_power > 0.0) {
                return Err(MiError::domain(format!("node {}: tx_power must be > 0", n.id)));
            }
            if !(n.noise_psd > 0.0) {
                return Err(MiError::domain(format!("node {}: noise_psd must be > 0", n.id)));
            }
        }
        Ok(())
    }

    fn index_of(&self, id: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n.id == id)
            .ok_or_else(|| MiError::domain(format!("unknown node id {id:?}")))
    }
}

/// How receive-coil orientation enters the polarization gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrientationMode {
    /// Both axes as posed: J = 𝒥².
    #[default]
    Fixed,
    /// The receiver tracks the local field direction: J = 1 + 3cos²θ with θ
    /// the angle between the transmit axis and the line of sight.
    OptimalRx,
}

/// One directed feasible link at a given frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub frequency: f64,
    pub snr: f64,
    /// Flat-band Shannon capacity (bits/s).
    pub capacity: f64,
}

/// The per-frequency connectivity slice.
#[derive(Debug, Clone)]
pub struct LinkGraph {
    pub frequency: f64,
    pub edges: Vec<Edge>,
}

fn rx_coil_of(node: &Node) -> Option<&CoilSpec> {
    match &node.antenna {
        Antenna::Coil(c) => Some(c),
        Antenna::Rpma(_) => None, // a spinning magnet cannot receive
    }
}

/// Directed SNR and flat capacity of one node pair at frequency `f`, with
/// the coils retuned to `f`. `j_override` replaces the pose-derived
/// polarization gain with a fixed J (used by the aligned isolation model).
/// Returns `Ok(None)` when the pair cannot form a link at all: the receiver
/// cannot receive, or the pair response has no resolvable 3-dB band.
fn evaluate_pair(
    sc: &NetScenario,
    tx: &Node,
    rx: &Node,
    f: f64,
    mode: OrientationMode,
    j_override: Option<f64>,
) -> Result<Option<(f64, f64)>> {
    let Some(rx_coil) = rx_coil_of(rx) else {
        return Ok(None);
    };
    let rx_coil = rx_coil.retuned(f);
    let tx_ant = match &tx.antenna {
        Antenna::Coil(c) => Antenna::Coil(c.retuned(f)),
        Antenna::Rpma(r) => Antenna::Rpma(r.clone()),
    };
    let link = LinkSpec {
        tx: tx_ant.clone(),
        tx_pose: tx.pose,
        rx: rx_coil.clone(),
        rx_pose: rx.pose,
        medium: sc.medium,
        tx_power: tx.tx_power,
        noise_psd: rx.noise_psd,
        fading: FadingModel::None,
    };
    // The polarization gain is frequency-independent, so the 3-dB band can be
    // taken from a canonical coaxial pair at the same distance. This also
    // keeps the band well defined when the posed pair happens to have J = 0.
    let d_pair = (rx.pose.position - tx.pose.position).norm();
    let band_link = LinkSpec {
        tx_pose: Pose::new(Vector3::zeros(), Vector3::x())?,
        rx_pose: Pose::new(Vector3::new(d_pair, 0.0, 0.0), -Vector3::x())?,
        ..link.clone()
    };
    let bw = match bandwidth_numeric(&band_link) {
        Ok(b) => b.value,
        // a flat or vanishing pair response has no resolvable 3-dB band:
        // the pair is infeasible, not a caller error
        Err(MiError::Numeric(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let factored_gain = |j: f64| -> Result<f64> {
        let sep = rx.pose.position - tx.pose.position;
        let d = sep.norm();
        if !(d > 0.0) {
            return Err(MiError::domain("evaluate_pair: coincident node positions"));
        }
        let circuit = match &tx_ant {
            Antenna::Coil(c) => circuit_gain_coil(c, &rx_coil, f)?,
            Antenna::Rpma(r) => circuit_gain_rpma(r, &rx_coil, f)?,
        };
        Ok(circuit * space_gain(d, &sc.medium)? * eddy_gain(d, f, &sc.medium)? * j)
    };
    let gain = if let Some(j) = j_override {
        factored_gain(j)?
    } else {
        match mode {
            OrientationMode::Fixed => link.gain(f)?,
            OrientationMode::OptimalRx => {
                let sep = rx.pose.position - tx.pose.position;
                let d = sep.norm();
                if !(d > 0.0) {
                    return Err(MiError::domain("evaluate_pair: coincident node positions"));
                }
                let cos = tx.pose.axis.dot(&(sep / d));
                factored_gain(1.0 + 3.0 * cos * cos)?
            }
        }
    };
    let snr = tx.tx_power / bw * gain / rx.noise_psd;
    let capacity = bw * (1.0 + snr).log2();
    Ok(Some((snr, capacity)))
}

/// Builds the connectivity slice at one frequency: a directed edge exists iff
/// the pair SNR meets the scenario threshold.
pub fn link_graph(sc: &NetScenario, f: f64, mode: OrientationMode) -> Result<LinkGraph> {
    sc.validate()?;
    if !(f > 0.0) {
        return Err(MiError::domain(format!("frequency must be > 0, got {f}")));
    }
    let mut edges = Vec::new();
    for (i, tx) in sc.nodes.iter().enumerate() {
        for (j, rx) in sc.nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            if let Some((snr, capacity)) = evaluate_pair(sc, tx, rx, f, mode, None)? {
                if snr >= sc.snr_threshold {
                    edges.push(Edge { from: i, to: j, frequency: f, snr, capacity });
                }
            }
        }
    }
    Ok(LinkGraph { frequency: f, edges })
}

/// One hop of a route.
#[derive(Debug, Clone, PartialEq)]
pub struct Hop {
    pub from: String,
    pub to: String,
    pub frequency: f64,
    pub capacity: f64,
}

/// A routing outcome: the hop list and the bottleneck (minimum hop) capacity.
/// `src == dst` yields an empty hop list with infinite bottleneck.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub hops: Vec<Hop>,
    pub bottleneck: f64,
}

/// Widest path from `src` to `dst` where every hop independently picks its
/// best frequency from the scenario's frequency set. Returns `None` when no
/// path exists. Ties break by (bottleneck desc, hop count asc, id path asc).
pub fn best_path(sc: &NetScenario, src: &str, dst: &str, mode: OrientationMode) -> Result<Option<Route>> {
    sc.validate()?;
    let s = sc.index_of(src)?;
    let t = sc.index_of(dst)?;
    if s == t {
        return Ok(Some(Route { hops: Vec::new(), bottleneck: f64::INFINITY }));
    }
    let n = sc.nodes.len();
    // Per ordered pair: the best-capacity feasible frequency (hops choose
    // frequencies independently, so this reduction is exact).
    let mut best_edge: Vec<Vec<Option<(f64, f64)>>> = vec![vec![None; n]; n]; // (capacity, f)
    for f in &sc.frequency_set {
        let g = link_graph(sc, *f, mode)?;
        for e in g.edges {
            let slot = &mut best_edge[e.from][e.to];
            if slot.map_or(true, |(c, _)| e.capacity > c) {
                *slot = Some((e.capacity, e.frequency));
            }
        }
    }
    // Bellman–Ford-style widest path with deterministic tie-breaks.
    #[derive(Clone, PartialEq)]
    struct Label {
        bottleneck: f64,
        hops: usize,
        path: Vec<usize>,
    }
    let better = |a: &Label, b: &Label| -> bool {
        if a.bottleneck != b.bottleneck {
            return a.bottleneck > b.bottleneck;
        }
        if a.hops != b.hops {
            return a.hops < b.hops;
        }
        let ida: Vec<&str> = a.path.iter().map(|&i| sc.nodes[i].id.as_str()).collect();
        let idb: Vec<&str> = b.path.iter().map(|&i| sc.nodes[i].id.as_str()).collect();
        ida < idb
    };
    let mut labels: Vec<Option<Label>> = vec![None; n];
    labels[s] = Some(Label { bottleneck: f64::INFINITY, hops: 0, path: vec![s] });
    for _ in 0..n {
        let mut changed = false;
        for u in 0..n {
            let Some(lu) = labels[u].clone() else { continue };
            for v in 0..n {
                let Some((cap, _)) = best_edge[u][v] else { continue };
                if lu.path.contains(&v) {
                    continue;
                }
                let mut path = lu.path.clone();
                path.push(v);
                let cand =
                    Label { bottleneck: lu.bottleneck.min(cap), hops: lu.hops + 1, path };
                if labels[v].as_ref().map_or(true, |cur| better(&cand, cur)) {
                    labels[v] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let Some(label) = labels[t].clone() else {
        return Ok(None);
    };
    let hops = label
        .path
        .windows(2)
        .map(|w| {
            let (cap, f) = best_edge[w[0]][w[1]].unwrap();
            Hop {
                from: sc.nodes[w[0]].id.clone(),
                to: sc.nodes[w[1]].id.clone(),
                frequency: f,
                capacity: cap,
            }
        })
        .collect();
    Ok(Some(Route { hops, bottleneck: label.bottleneck }))
}

/// How randomly placed nodes are oriented in the isolation Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationModel {
    /// Every pairwise link evaluated at the maximum polarization gain J = 4,
    /// as if each coil pair were servo-aligned along its line of sight. This
    /// is the best case: any fixed-orientation deployment can only lose edges
    /// relative to it.
    Aligned,
    /// Axes drawn once per node, uniform on the unit sphere.
    RandomAxes,
}

/// Monte-Carlo isolation probability of a reference node at the center of a
/// box-shaped region, against a Poisson field of peer nodes.
///
/// Each trial draws K ~ Poisson(density·V) peers uniformly in the box; the
/// reference is isolated when it has no feasible edge in either direction at
/// the scenario's first frequency. Returns (probability, binomial std).
pub fn isolation_probability<R: Rng + ?Sized>(
    prototype: &Node,
    medium: &Medium,
    frequency: f64,
    snr_threshold: f64,
    density: f64,
    region: &Vector3<f64>,
    orientations: OrientationModel,
    trials: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(MiError::domain("isolation_probability needs trials >= 1"));
    }
    if !(density >= 0.0) {
        return Err(MiError::domain(format!("density must be >= 0, got {density}")));
    }
    if !(region.x > 0.0 && region.y > 0.0 && region.z > 0.0) {
        return Err(MiError::domain("region dimensions must be positive"));
    }
    let volume = region.x * region.y * region.z;
    let lambda = density * volume;
    let center = region / 2.0;
    let mut isolated = 0usize;
    for _ in 0..trials {
        let k = if lambda > 0.0 {
            Poisson::new(lambda)
                .map_err(|e| MiError::domain(format!("invalid poisson rate: {e}")))?
                .sample(rng) as usize
        } else {
            0
        };
        let mut nodes = Vec::with_capacity(k + 1);
        let mut reference = prototype.clone();
        reference.id = "ref".into();
        reference.pose = Pose::new(center, Vector3::x())?;
        nodes.push(reference);
        for idx in 0..k {
            let pos = Vector3::new(
                rng.gen::<f64>() * region.x,
                rng.gen::<f64>() * region.y,
                rng.gen::<f64>() * region.z,
            );
            // Draw the axis under both models so paired seeds give paired
            // peer placements; the aligned model simply ignores it.
            let a: [f64; 3] = UnitSphere.sample(rng);
            let axis = match orientations {
                OrientationModel::Aligned => Vector3::x(),
                OrientationModel::RandomAxes => Vector3::new(a[0], a[1], a[2]),
            };
            let mut peer = prototype.clone();
            peer.id = format!("peer{idx}");
            peer.pose = Pose::new(pos, axis)?;
            nodes.push(peer);
        }
        let sc = NetScenario {
            medium: *medium,
            nodes,
            frequency_set: vec![frequency],
            snr_threshold,
        };
        let j_override = match orientations {
            OrientationModel::Aligned => Some(4.0),
            OrientationModel::RandomAxes => None,
        };
        let mut connected = false;
        for j in 1..sc.nodes.len() {
            let out =
                evaluate_pair(&sc, &sc.nodes[0], &sc.nodes[j], frequency, OrientationMode::Fixed, j_override)?;
            let inn =
                evaluate_pair(&sc, &sc.nodes[j], &sc.nodes[0], frequency, OrientationMode::Fixed, j_override)?;
            if out.map_or(false, |(s, _)| s >= snr_threshold)
                || inn.map_or(false, |(s, _)| s >= snr_threshold)
            {
                connected = true;
                break;
            }
        }
        if !connected {
            isolated += 1;
        }
    }
    let p = isolated as f64 / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}

/// Outcome of the best-response power-allocation game.
#[derive(Debug, Clone)]
pub struct PowerGameResult {
    /// Final transmit power per node (W).
    pub powers: Vec<f64>,
    /// Final utility u_i = 𝔠_i − w·p_i per node.
    pub utilities: Vec<f64>,
    pub iterations: usize,
    /// Whether the power change fell below tolerance before max_iters.
    pub converged: bool,
}

/// Fixed channel coefficients of the game: node i transmits to node (i+1)
/// mod n; all gains and bandwidths are frozen at each receiver's carrier.
struct GameChannels {
    /// bandwidth of link i → rx(i)
    bw: Vec<f64>,
    /// g[i][j]: gain from transmitter j to receiver rx(i)
    g: Vec<Vec<f64>>,
    noise: Vec<f64>,
}

fn game_channels(sc: &NetScenario) -> Result<GameChannels> {
    let n = sc.nodes.len();
    let mut bw = vec![0.0; n];
    let mut g = vec![vec![0.0; n]; n];
    let mut noise = vec![0.0; n];
    for i in 0..n {
        let rx_node = &sc.nodes[(i + 1) % n];
        let rx_coil = rx_coil_of(rx_node).ok_or_else(|| {
            MiError::domain(format!("node {} cannot receive (RPMA antenna)", rx_node.id))
        })?;
        let f0 = rx_coil.tuned_frequency;
        noise[i] = rx_node.noise_psd;
        let link = LinkSpec {
            tx: sc.nodes[i].antenna.clone(),
            tx_pose: sc.nodes[i].pose,
            rx: rx_coil.clone(),
            rx_pose: rx_node.pose,
            medium: sc.medium,
            tx_power: sc.nodes[i].tx_power,
            noise_psd: rx_node.noise_psd,
            fading: FadingModel::None,
        };
        bw[i] = bandwidth_numeric(&link)?.value;
        for j in 0..n {
            if j == (i + 1) % n {
                continue; // a node's own transmission does not interfere with
                          // its own receiver (self-interference cancelled)
            }
            g[i][j] = channel_gain(
                &sc.nodes[j].antenna,
                rx_coil,
                &sc.nodes[j].pose,
                &rx_node.pose,
                &sc.medium,
                f0,
            )?
            .total;
        }
    }
    Ok(GameChannels { bw, g, noise })
}

fn utility(ch: &GameChannels, powers: &[f64], i: usize, w: f64) -> f64 {
    let n = powers.len();
    let interference: f64 = (0..n).filter(|&j| j != i).map(|j| powers[j] * ch.g[i][j]).sum();
    let sinr = powers[i] * ch.g[i][i] / (ch.bw[i] * ch.noise[i] + interference);
    ch.bw[i] * (1.0 + sinr).log2() - w * powers[i]
}

/// Damped synchronous best-response iteration for the utility
/// u_i = B_i log₂(1+SINR_i) − w·p_i, SINR with all other transmitters'
/// received power treated as in-band noise. The analytic best response is the
/// water-filling point p̂ = B/(w ln2) − (B·N_of + I)/G clamped to [0, p_max].
pub fn power_allocation_br(
    sc: &NetScenario,
    w: f64,
    p_max: &[f64],
    max_iters: usize,
    tol: f64,
) -> Result<PowerGameResult> {
    sc.validate()?;
    if !(w >= 0.0) {
        return Err(MiError::domain(format!("weight must be >= 0, got {w}")));
    }
    let n = sc.nodes.len();
    if p_max.len() != n {
        return Err(MiError::domain(format!("expected {n} power bounds, got {}", p_max.len())));
    }
    if !(tol > 0.0) {
        return Err(MiError::domain(format!("tol must be > 0, got {tol}")));
    }
    let ch = game_channels(sc)?;
    let mut powers: Vec<f64> = sc.nodes.iter().zip(p_max).map(|(nd, &pm)| nd.tx_power.min(pm)).collect();
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        let mut next = powers.clone();
        let mut max_delta: f64 = 0.0;
        for i in 0..n {
            let interference: f64 =
                (0..n).filter(|&j| j != i).map(|j| powers[j] * ch.g[i][j]).sum();
            let best = if w == 0.0 {
                p_max[i]
            } else {
                (ch.bw[i] / (w * std::f64::consts::LN_2)
                    - (ch.bw[i] * ch.noise[i] + interference) / ch.g[i][i])
                    .clamp(0.0, p_max[i])
            };
            // damping factor 0.5: plain best response can oscillate in
            // interference games
            let p_new = powers[i] + 0.5 * (best - powers[i]);
            max_delta = max_delta.max((p_new - powers[i]).abs());
            next[i] = p_new;
        }
        powers = next;
        if max_delta < tol {
            converged = true;
            break;
        }
    }
    let utilities = (0..n).map(|i| utility(&ch, &powers, i, w)).collect();
    Ok(PowerGameResult { powers, utilities, iterations, converged })
}

/// Utility of node `i` at the given power profile (for oracles and traces).
pub fn game_utility(sc: &NetScenario, powers: &[f64], i: usize, w: f64) -> Result<f64> {
    sc.validate()?;
    if powers.len() != sc.nodes.len() || i >= powers.len() {
        return Err(MiError::domain("game_utility: bad profile or index"));
    }
    Ok(utility(&game_channels(sc)?, powers, i, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coil_node(id: &str, pos: Vector3<f64>, axis: Vector3<f64>) -> Node {
        Node {
            id: id.into(),
            antenna: Antenna::Coil(defaults::tx_coil()),
            pose: Pose::new(pos, axis).unwrap(),
            tx_power: defaults::TX_POWER,
            noise_psd: defaults::NOISE_PSD,
        }
    }

    fn two_node_scenario(d: f64) -> NetScenario {
        NetScenario {
            medium: defaults::medium(),
            nodes: vec![
                coil_node("a", Vector3::zeros(), Vector3::x()),
                coil_node("b", Vector3::new(d, 0.0, 0.0), -Vector3::x()),
            ],
            frequency_set: vec![1e4],
            snr_threshold: 0.5,
        }
    }

    #[test]
    fn coaxial_pair_connects_bidirectionally() {
        let sc = two_node_scenario(60.0);
        let g = link_graph(&sc, 1e4, OrientationMode::Fixed).unwrap();
        assert_eq!(g.edges.len(), 2);
        assert!(g.edges.iter().any(|e| e.from == 0 && e.to == 1));
        assert!(g.edges.iter().any(|e| e.from == 1 && e.to == 0));
        // perpendicular orientation kills the link regardless of power
        let mut blind = sc.clone();
        blind.nodes[1].pose = Pose::new(blind.nodes[1].pose.position, Vector3::y()).unwrap();
        blind.nodes[0].tx_power = 1e9;
        blind.nodes[1].tx_power = 1e9;
        let g2 = link_graph(&blind, 1e4, OrientationMode::Fixed).unwrap();
        assert!(g2.edges.iter().all(|e| !(e.from == 0 && e.to == 1)));
        // optimal-Rx mode restores it (J = 4 coaxial)
        let g3 = link_graph(&blind, 1e4, OrientationMode::OptimalRx).unwrap();
        assert!(g3.edges.iter().any(|e| e.from == 0 && e.to == 1));
    }

    #[test]
    fn edge_threshold_monotonicity() {
        let mut sc = two_node_scenario(60.0);
        let n_low = link_graph(&sc, 1e4, OrientationMode::Fixed).unwrap().edges.len();
        sc.snr_threshold *= 100.0;
        let n_high = link_graph(&sc, 1e4, OrientationMode::Fixed).unwrap().edges.len();
        assert!(n_high <= n_low);
    }

    #[test]
    fn optimal_rx_petal_anisotropy() {
        // broadside J = 1 vs coaxial J = 4 at equal distance
        let sc = NetScenario {
            medium: defaults::medium(),
            nodes: vec![
                coil_node("c", Vector3::zeros(), Vector3::x()),
                coil_node("x", Vector3::new(60.0, 0.0, 0.0), Vector3::x()),
                coil_node("y", Vector3::new(0.0, 60.0, 0.0), Vector3::x()),
            ],
            frequency_set: vec![1e4],
            snr_threshold: 1e-12,
        };
        let g = link_graph(&sc, 1e4, OrientationMode::OptimalRx).unwrap();
        let co = g.edges.iter().find(|e| e.from == 0 && e.to == 1).unwrap();
        let br = g.edges.iter().find(|e| e.from == 0 && e.to == 2).unwrap();
        assert_relative_eq!(co.snr / br.snr, 4.0, max_relative = 1e-9);
    }

    #[test]
    fn trivial_routes() {
        let sc = two_node_scenario(60.0);
        let r = best_path(&sc, "a", "a", OrientationMode::Fixed).unwrap().unwrap();
        assert!(r.hops.is_empty() && r.bottleneck.is_infinite());
        let r = best_path(&sc, "a", "b", OrientationMode::Fixed).unwrap().unwrap();
        assert_eq!(r.hops.len(), 1);
        // out of range → unreachable
        let far = two_node_scenario(5000.0);
        assert!(best_path(&far, "a", "b", OrientationMode::Fixed).unwrap().is_none());
        assert!(best_path(&far, "a", "zz", OrientationMode::Fixed).is_err());
    }

    #[test]
    fn frequency_switching_route() {
        // chain a → b → c; hop lengths differ so the best frequency differs
        // per hop (eddy loss punishes high f on the long hop).
        let sc = NetScenario {
            medium: defaults::medium(),
            nodes: vec![
                coil_node("a", Vector3::zeros(), Vector3::x()),
                coil_node("b", Vector3::new(15.0, 0.0, 0.0), Vector3::x()),
                coil_node("c", Vector3::new(115.0, 0.0, 0.0), Vector3::x()),
            ],
            frequency_set: vec![5e3, 2e5],
            snr_threshold: 1e-6,
        };
        let r = best_path(&sc, "a", "c", OrientationMode::Fixed).unwrap().unwrap();
        assert_eq!(r.hops.len(), 2);
        assert_relative_eq!(r.hops[0].frequency, 2e5);
        assert_relative_eq!(r.hops[1].frequency, 5e3);
        // never worse than the best single-frequency widest path
        for f in [5e3, 2e5] {
            let single = NetScenario { frequency_set: vec![f], ..sc.clone() };
            if let Some(rs) = best_path(&single, "a", "c", OrientationMode::Fixed).unwrap() {
                assert!(r.bottleneck >= rs.bottleneck - 1e-9);
            }
        }
    }

    #[test]
    fn isolation_probability_limits() {
        let proto = coil_node("p", Vector3::zeros(), Vector3::x());
        let region = Vector3::new(120.0, 120.0, 120.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // zero density → certainly isolated
        let (p0, _) = isolation_probability(
            &proto,
            &defaults::medium(),
            1e4,
            0.5,
            0.0,
            &region,
            OrientationModel::Aligned,
            50,
            &mut rng,
        )
        .unwrap();
        assert_eq!(p0, 1.0);
        // high density → essentially connected
        let (p_hi, _) = isolation_probability(
            &proto,
            &defaults::medium(),
            1e4,
            0.5,
            5e-6,
            &region,
            OrientationModel::Aligned,
            50,
            &mut rng,
        )
        .unwrap();
        assert!(p_hi < 0.3, "p_hi = {p_hi}");
        // random orientations can only lose edges vs pairwise-aligned coils:
        // paired seeds give identical peer placements, and J ≤ 4 always
        let mid = 8e-7;
        let mut r1 = ChaCha8Rng::seed_from_u64(77);
        let (p_al, _) = isolation_probability(
            &proto,
            &defaults::medium(),
            1e4,
            0.5,
            mid,
            &region,
            OrientationModel::Aligned,
            200,
            &mut r1,
        )
        .unwrap();
        let mut r2 = ChaCha8Rng::seed_from_u64(77);
        let (p_rand, _) = isolation_probability(
            &proto,
            &defaults::medium(),
            1e4,
            0.5,
            mid,
            &region,
            OrientationModel::RandomAxes,
            200,
            &mut r2,
        )
        .unwrap();
        assert!(p_rand >= p_al - 1e-12, "random {p_rand} vs aligned {p_al}");
    }

    #[test]
    fn power_game_limits() {
        let sc = two_node_scenario(60.0);
        // w = 0 → both nodes at p_max
        let r = power_allocation_br(&sc, 0.0, &[3.0, 3.0], 200, 1e-10).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.powers[0], 3.0, epsilon = 1e-8);
        assert_relative_eq!(r.powers[1], 3.0, epsilon = 1e-8);
        // symmetric game → equal powers
        let r = power_allocation_br(&sc, 1e4, &[5.0, 5.0], 500, 1e-12).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.powers[0], r.powers[1], max_relative = 1e-6);
    }

    #[test]
    fn single_transmitter_matches_scalar_oracle() {
        let sc = two_node_scenario(60.0);
        let w = 1e4;
        // node 1 silenced: the game reduces to one concave scalar problem
        let r = power_allocation_br(&sc, w, &[5.0, 0.0], 800, 1e-13).unwrap();
        assert!(r.converged);
        // golden-section maximization of node 0's utility
        let u = |p: f64| game_utility(&sc, &[p, 0.0], 0, w).unwrap();
        let (mut a, mut b) = (0.0f64, 5.0f64);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if u(c) < u(d) {
                a = c;
            } else {
                b = d;
            }
        }
        let p_star = 0.5 * (a + b);
        assert!((r.powers[0] - p_star).abs() < 1e-6, "{} vs {}", r.powers[0], p_star);
        // each damped update weakly improves the updating node's own utility
        let before = game_utility(&sc, &[1.0, 0.0], 0, w).unwrap();
        let step_to = 1.0 + 0.5 * (p_star - 1.0);
        let after = game_utility(&sc, &[step_to, 0.0], 0, w).unwrap();
        assert!(after >= before - 1e-12);
    }
}
