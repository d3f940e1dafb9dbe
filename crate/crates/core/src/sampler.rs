//! Gate-by-gate and qubit-by-qubit bitstring samplers.
//!
//! The gate-by-gate sampler walks the circuit once. After each op it
//! resamples the bits on the op's support from the Born probabilities of
//! the candidate bitstrings that agree with the current record elsewhere.
//! When the state evolution is deterministic, one evolution serves every
//! shot: unique records are tracked with their multiplicities and each key
//! draws its `count` updates from a multinomial.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::{DenseState, StateBackend};
use crate::circuit::{BitString, Circuit, GateKind, GateOp};
use crate::error::{Result, SimError};
use crate::rng::RngStream;

/// Candidate probability sums below this abort the shot.
pub const UNDERFLOW_THRESHOLD: f64 = 1e-300;

/// All bitstrings that agree with `b` off `support`, in increasing
/// big-endian order. Includes `b` itself.
pub fn candidates(b: &BitString, support: &[usize]) -> Vec<BitString> {
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    let k = sorted.len();
    (0..1usize << k)
        .map(|j| {
            let mut c = b.clone();
            for (pos, &q) in sorted.iter().enumerate() {
                c.set(q, (j >> (k - 1 - pos)) & 1 == 1);
            }
            c
        })
        .collect()
}

/// Unique in-flight records and how many shots currently hold each.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiplicityMap {
    counts: BTreeMap<BitString, u64>,
}

impl MultiplicityMap {
    pub fn singleton(b: BitString, count: u64) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(b, count);
        MultiplicityMap { counts }
    }

    pub fn add(&mut self, b: BitString, count: u64) {
        if count > 0 {
            *self.counts.entry(b).or_insert(0) += count;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, &u64)> {
        self.counts.iter()
    }

    pub fn into_counts(self) -> BTreeMap<BitString, u64> {
        self.counts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub counts: BTreeMap<BitString, u64>,
    pub shots: u64,
    pub seed: u64,
    pub runtime_s: f64,
    pub backend: String,
}

impl SampleResult {
    /// Empirical distribution over all `2^n` outcomes (big-endian index).
    pub fn distribution(&self, n_qubits: usize) -> Vec<f64> {
        let mut p = vec![0.0; 1 << n_qubits];
        for (b, &c) in &self.counts {
            p[b.to_index() as usize] += c as f64 / self.shots as f64;
        }
        p
    }
}

fn check_supported<B: StateBackend>(circuit: &Circuit, backend: &B) -> Result<()> {
    for (i, op) in circuit.ops().iter().enumerate() {
        if !backend.supports(&op.kind) {
            return Err(backend.unsupported(&op.kind));
        }
        let mid_measure = op.kind == GateKind::Measure && !circuit.is_terminal(i);
        if mid_measure && !backend.supports_projection() {
            return Err(backend.unsupported(&op.kind));
        }
    }
    Ok(())
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(SimError::InvalidSpec("shots must be at least 1".into()));
    }
    Ok(())
}

/// Candidate probabilities renormalized to sum to one.
fn candidate_weights<B: StateBackend>(
    state: &B,
    cands: &[BitString],
    op_index: usize,
) -> Result<Vec<f64>> {
    let mut probs: Vec<f64> = cands.iter().map(|c| state.probability(c).max(0.0)).collect();
    let sum: f64 = probs.iter().sum();
    if sum.is_nan() || sum < UNDERFLOW_THRESHOLD {
        return Err(SimError::NumericalUnderflow { op_index, sum });
    }
    probs.iter_mut().for_each(|p| *p /= sum);
    Ok(probs)
}

fn draw_index(weights: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the final partial sum
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Splits `count` draws over `weights` by sequential binomials.
pub fn multinomial(count: u64, weights: &[f64], rng: &mut impl Rng) -> Vec<u64> {
    let mut out = vec![0u64; weights.len()];
    if count == 1 {
        out[draw_index(weights, rng)] = 1;
        return out;
    }
    let mut remaining = count;
    let mut mass = 1.0;
    let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    for (i, &w) in weights.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == last {
            out[i] = remaining;
            break;
        }
        let p = if mass > 0.0 { (w / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(remaining, p).expect("valid binomial").sample(rng);
        out[i] = k;
        remaining -= k;
        mass -= w;
    }
    out
}

/// Samples `shots` bitstrings with the gate-by-gate algorithm.
///
/// Deterministic evolutions share one state through a [`MultiplicityMap`];
/// circuits with channels, mid-circuit measurements or stochastic backend
/// ops fall back to [`sample_with_trajectories`].
pub fn sample_gate_by_gate<B, F>(
    circuit: &Circuit,
    factory: F,
    shots: u64,
    seed: u64,
) -> Result<SampleResult>
where
    B: StateBackend,
    F: Fn(usize) -> B + Sync,
{
    sample_gate_by_gate_observed(circuit, factory, shots, seed, |_, _| {})
}

/// [`sample_gate_by_gate`] with a hook called after every op with the op
/// index and the current multiplicity map (not called in trajectory mode).
pub fn sample_gate_by_gate_observed<B, F, O>(
    circuit: &Circuit,
    factory: F,
    shots: u64,
    seed: u64,
    mut observer: O,
) -> Result<SampleResult>
where
    B: StateBackend,
    F: Fn(usize) -> B + Sync,
    O: FnMut(usize, &MultiplicityMap),
{
    check_shots(shots)?;
    let start = Instant::now();
    let mut state = factory(circuit.n_qubits());
    check_supported(circuit, &state)?;
    if circuit.is_non_unitary() || state.needs_trajectories(circuit) {
        return sample_with_trajectories(circuit, factory, shots, seed);
    }

    let mut rng = RngStream::new(seed, 0);
    let mut map = MultiplicityMap::singleton(BitString::zeros(circuit.n_qubits()), shots);
    for (i, op) in circuit.ops().iter().enumerate() {
        if circuit.is_terminal(i) {
            continue;
        }
        state.apply_op(op, &mut rng)?;
        let mut next = MultiplicityMap::default();
        for (b, &count) in map.iter() {
            let cands = candidates(b, &op.support);
            let weights = candidate_weights(&state, &cands, i)?;
            for (c, k) in cands.into_iter().zip(multinomial(count, &weights, &mut rng)) {
                next.add(c, k);
            }
        }
        map = next;
        observer(i, &map);
    }
    Ok(SampleResult {
        counts: map.into_counts(),
        shots,
        seed,
        runtime_s: start.elapsed().as_secs_f64(),
        backend: state.name().to_string(),
    })
}

fn run_trajectory<B: StateBackend>(
    circuit: &Circuit,
    mut state: B,
    rng: &mut RngStream,
) -> Result<BitString> {
    let mut b = BitString::zeros(circuit.n_qubits());
    for (i, op) in circuit.ops().iter().enumerate() {
        if circuit.is_terminal(i) {
            continue;
        }
        let measure = op.kind == GateKind::Measure;
        if !measure {
            state.apply_op(op, rng)?;
        }
        let cands = candidates(&b, &op.support);
        let weights = candidate_weights(&state, &cands, i)?;
        b = cands.into_iter().nth(draw_index(&weights, rng)).expect("candidate");
        if measure {
            let q = op.support[0];
            state.project(q, b.get(q))?;
        }
    }
    Ok(b)
}

/// One independent state evolution per shot, shot `k` drawing from
/// `RngStream(seed, k)`. Handles channels, mid-circuit measurements and
/// stochastic backends.
pub fn sample_with_trajectories<B, F>(
    circuit: &Circuit,
    factory: F,
    shots: u64,
    seed: u64,
) -> Result<SampleResult>
where
    B: StateBackend,
    F: Fn(usize) -> B + Sync,
{
    check_shots(shots)?;
    let start = Instant::now();
    let template = factory(circuit.n_qubits());
    check_supported(circuit, &template)?;
    let name = template.name().to_string();
    let records = (0..shots)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::new(seed, k);
            run_trajectory(circuit, template.clone(), &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = BTreeMap::new();
    for b in records {
        *counts.entry(b).or_insert(0) += 1;
    }
    Ok(SampleResult {
        counts,
        shots,
        seed,
        runtime_s: start.elapsed().as_secs_f64(),
        backend: name,
    })
}

/// Baseline: evolve the dense state once, then sample qubit 0, 1, … in turn
/// from marginals conditioned on the bits already fixed.
pub fn sample_qubit_by_qubit(circuit: &Circuit, shots: u64, seed: u64) -> Result<SampleResult> {
    check_shots(shots)?;
    if let Some(op) = circuit.ops().iter().find(|op| op.kind.is_channel()) {
        return Err(baseline_unsupported(op));
    }
    if circuit.is_non_unitary() {
        return Err(SimError::UnsupportedOp {
            backend: "qubit-by-qubit".into(),
            kind: "mid-circuit measure".into(),
        });
    }
    let start = Instant::now();
    let n = circuit.n_qubits();
    let state = DenseState::simulate(circuit)?;
    // tree[k][prefix] = P(first k bits equal prefix)
    let mut tree = vec![state.probabilities()];
    for _ in 0..n {
        let below = tree.last().unwrap();
        let above: Vec<f64> = below.chunks_exact(2).map(|c| c[0] + c[1]).collect();
        tree.push(above);
    }
    tree.reverse();

    let mut rng = RngStream::new(seed, 0);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let mut node = 0usize;
        for level in tree.iter().skip(1) {
            let (p0, p1) = (level[2 * node], level[2 * node + 1]);
            let one = rng.random::<f64>() * (p0 + p1) >= p0;
            node = 2 * node + one as usize;
        }
        *counts.entry(BitString::from_index(node as u64, n)).or_insert(0) += 1;
    }
    Ok(SampleResult {
        counts,
        shots,
        seed,
        runtime_s: start.elapsed().as_secs_f64(),
        backend: "statevector".into(),
    })
}

fn baseline_unsupported(op: &GateOp) -> SimError {
    SimError::UnsupportedOp {
        backend: "qubit-by-qubit".into(),
        kind: op.kind.to_string(),
    }
}
