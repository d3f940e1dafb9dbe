//! QAOA for MaxCut: graph generation, circuit construction, grid search.

use std::f64::consts::PI;

use qsample_core::{BitString, Circuit, GateKind, GateOp, SampleResult, SimError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{run_sampler, Backend, CliResult};

/// Exhaustive max-cut search is limited to this many nodes.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxCutInstance {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    /// Generation seed and edge probability for random graphs.
    pub seed: Option<u64>,
    pub edge_prob: Option<f64>,
}

impl MaxCutInstance {
    /// Graph from an explicit edge list; edges are stored as `(min, max)`.
    pub fn new(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, SimError> {
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b || a >= n_nodes || b >= n_nodes {
                return Err(SimError::InvalidSpec(format!("bad edge ({a}, {b})")));
            }
            let e = (a.min(b), a.max(b));
            if out.contains(&e) {
                return Err(SimError::InvalidSpec(format!("duplicate edge ({a}, {b})")));
            }
            out.push(e);
        }
        Ok(MaxCutInstance { n_nodes, edges: out, seed: None, edge_prob: None })
    }

    /// Erdos-Renyi G(n, p): each pair `i < j` is an edge with probability `p`.
    pub fn erdos_renyi(n_nodes: usize, edge_prob: f64, seed: u64) -> Result<Self, SimError> {
        if n_nodes == 0 {
            return Err(SimError::InvalidSpec("graph needs at least one node".into()));
        }
        if !(0.0..=1.0).contains(&edge_prob) {
            return Err(SimError::InvalidSpec(format!("edge probability {edge_prob} outside [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n_nodes {
            for j in i + 1..n_nodes {
                if rng.random_bool(edge_prob) {
                    edges.push((i, j));
                }
            }
        }
        Ok(MaxCutInstance { n_nodes, edges, seed: Some(seed), edge_prob: Some(edge_prob) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QaoaParams {
    pub gamma: f64,
    pub beta: f64,
    pub layers: usize,
}

/// `H^n`, then per layer `CNOT(i,j)·RZ(2γ)_j·CNOT(i,j)` for each edge and
/// `RX(2β)` on every qubit, then a terminal measurement. Every layer uses
/// the same `(γ, β)`.
pub fn build_qaoa_maxcut_circuit(instance: &MaxCutInstance, params: &QaoaParams) -> Circuit {
    let n = instance.n_nodes;
    let mut ops = Vec::new();
    for q in 0..n {
        ops.push(GateOp::single(GateKind::H, q));
    }
    for _ in 0..params.layers.max(1) {
        for &(i, j) in &instance.edges {
            ops.push(GateOp::pair(GateKind::Cnot, i, j));
            ops.push(GateOp::single(GateKind::rz(2.0 * params.gamma), j));
            ops.push(GateOp::pair(GateKind::Cnot, i, j));
        }
        for q in 0..n {
            ops.push(GateOp::single(GateKind::rx(2.0 * params.beta), q));
        }
    }
    let mut circuit = Circuit::from_ops(n, ops).expect("instance edges are in range");
    circuit.measure_all().expect("measure after unitary ops");
    circuit
}

pub fn cut_value(instance: &MaxCutInstance, b: &BitString) -> usize {
    assert_eq!(b.len(), instance.n_nodes, "bitstring length differs from node count");
    instance.edges.iter().filter(|&&(i, j)| b.get(i) != b.get(j)).count()
}

/// Exact maximum cut by enumerating every partition; `None` above
/// [`BRUTE_FORCE_LIMIT`] nodes.
pub fn brute_force_max_cut(instance: &MaxCutInstance) -> Option<usize> {
    let n = instance.n_nodes;
    if n > BRUTE_FORCE_LIMIT {
        return None;
    }
    let best = (0..1u64 << n)
        .map(|mask| {
            let side = |q: usize| mask >> (n - 1 - q) & 1;
            instance.edges.iter().filter(|&&(i, j)| side(i) != side(j)).count()
        })
        .max()
        .unwrap_or(0);
    Some(best)
}

pub fn mean_cut(instance: &MaxCutInstance, result: &SampleResult) -> f64 {
    let total: u64 = result.counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let sum: f64 = result
        .counts
        .iter()
        .map(|(b, &c)| cut_value(instance, b) as f64 * c as f64)
        .sum();
    sum / total as f64
}

/// Sampled bitstring with the largest cut; ties go to the smallest bitstring.
pub fn best_sample(instance: &MaxCutInstance, result: &SampleResult) -> Option<(BitString, usize)> {
    let mut best: Option<(BitString, usize)> = None;
    for b in result.counts.keys() {
        let cut = cut_value(instance, b);
        if best.as_ref().is_none_or(|(_, c)| cut > *c) {
            best = Some((b.clone(), cut));
        }
    }
    best
}

/// Uniform grid `γ_i = iπ/g`, `β_j = jπ/(2g)` in row-major `(γ, β)` order.
pub fn parameter_grid(grid_size: usize, layers: usize) -> Vec<QaoaParams> {
    let g = grid_size as f64;
    let mut grid = Vec::with_capacity(grid_size * grid_size);
    for i in 0..grid_size {
        for j in 0..grid_size {
            grid.push(QaoaParams {
                gamma: i as f64 * PI / g,
                beta: j as f64 * PI / (2.0 * g),
                layers,
            });
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaConfig {
    pub nodes: usize,
    pub edge_prob: f64,
    pub layers: usize,
    pub grid_size: usize,
    pub sweep_shots: u64,
    pub final_shots: u64,
    pub backend: Backend,
    pub chi_max: Option<usize>,
    pub seed: u64,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        QaoaConfig {
            nodes: 10,
            edge_prob: 0.3,
            layers: 1,
            grid_size: 8,
            sweep_shots: 100,
            final_shots: 1000,
            backend: Backend::Mps,
            chi_max: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub gamma: f64,
    pub beta: f64,
    pub mean_cut: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QaoaReport {
    pub graph: MaxCutInstance,
    pub backend: Backend,
    pub grid_size: usize,
    pub sweep_shots: u64,
    pub final_shots: u64,
    pub best_params: QaoaParams,
    pub sweep_mean_cut: f64,
    pub best_bitstring: BitString,
    pub best_cut: usize,
    pub mean_cut: f64,
    pub brute_force_max_cut: Option<usize>,
    pub sweep: Vec<SweepPoint>,
    pub runtime_s: f64,
}

/// Generates the graph, sweeps the grid with `sweep_shots` per point, keeps
/// the first point with the highest mean cut and reruns it with
/// `final_shots`. Point `k` samples with seed `seed + 1 + k`; the final run
/// uses `seed + 1 + grid_size²`.
pub fn run_qaoa(config: &QaoaConfig) -> CliResult<QaoaReport> {
    let start = std::time::Instant::now();
    if config.layers == 0 || config.grid_size == 0 {
        return Err(SimError::InvalidSpec("layers and grid size must be positive".into()).into());
    }
    let graph = MaxCutInstance::erdos_renyi(config.nodes, config.edge_prob, config.seed)?;
    let grid = parameter_grid(config.grid_size, config.layers);
    let mut sweep = Vec::with_capacity(grid.len());
    let mut best: Option<(usize, f64)> = None;
    for (k, params) in grid.iter().enumerate() {
        let circuit = build_qaoa_maxcut_circuit(&graph, params);
        let seed = config.seed.wrapping_add(1 + k as u64);
        let result = run_sampler(&circuit, config.backend, config.sweep_shots, seed, config.chi_max)?;
        let mean = mean_cut(&graph, &result);
        if best.is_none_or(|(_, m)| mean > m) {
            best = Some((k, mean));
        }
        sweep.push(SweepPoint { gamma: params.gamma, beta: params.beta, mean_cut: mean });
    }
    let (best_k, sweep_mean_cut) = best.expect("grid is non-empty");
    let best_params = grid[best_k];
    let circuit = build_qaoa_maxcut_circuit(&graph, &best_params);
    let final_seed = config.seed.wrapping_add(1 + grid.len() as u64);
    let result = run_sampler(&circuit, config.backend, config.final_shots, final_seed, config.chi_max)?;
    let (best_bitstring, best_cut) =
        best_sample(&graph, &result).unwrap_or((BitString::zeros(graph.n_nodes), 0));
    Ok(QaoaReport {
        mean_cut: mean_cut(&graph, &result),
        brute_force_max_cut: brute_force_max_cut(&graph),
        graph,
        backend: config.backend,
        grid_size: config.grid_size,
        sweep_shots: config.sweep_shots,
        final_shots: config.final_shots,
        best_params,
        sweep_mean_cut,
        best_bitstring,
        best_cut,
        sweep,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}
