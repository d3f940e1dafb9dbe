//! Seeded random circuit generators. Every generator is a pure function of
//! its arguments.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{Result, SimError};

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a concrete gate from a template; rotation templates get a uniform
/// random angle.
fn instantiate(template: &GateKind, rng: &mut impl Rng) -> GateKind {
    match template {
        GateKind::Rx(_) => GateKind::rx(rng.random_range(0.0..TAU)),
        GateKind::Ry(_) => GateKind::ry(rng.random_range(0.0..TAU)),
        GateKind::Rz(_) => GateKind::rz(rng.random_range(0.0..TAU)),
        other => other.clone(),
    }
}

/// Random circuit of `n_moments` moments. Each moment visits the qubits in a
/// random order; where a two-qubit kind is available and at least two
/// unvisited qubits remain, a two-qubit gate is placed with probability
/// `two_qubit_fraction`, otherwise a single-qubit gate. Rotation kinds in
/// `gate_set` act as templates whose angle is redrawn uniformly.
pub fn generate_random_circuit(
    n_qubits: usize,
    n_moments: usize,
    gate_set: &[GateKind],
    two_qubit_fraction: f64,
    seed: u64,
) -> Result<Circuit> {
    if gate_set.is_empty() {
        return Err(SimError::InvalidSpec("gate set is empty".into()));
    }
    if !(0.0..=1.0).contains(&two_qubit_fraction) {
        return Err(SimError::InvalidSpec("two_qubit_fraction outside [0, 1]".into()));
    }
    if gate_set.contains(&GateKind::Measure) {
        return Err(SimError::InvalidSpec("measure is not a random gate".into()));
    }
    let singles: Vec<&GateKind> = gate_set.iter().filter(|k| k.arity() == Some(1)).collect();
    let pairs: Vec<&GateKind> = gate_set.iter().filter(|k| k.arity() == Some(2)).collect();
    if !pairs.is_empty() && n_qubits < 2 {
        return Err(SimError::InvalidSpec("two-qubit gates need at least 2 qubits".into()));
    }
    let mut circuit = Circuit::new(n_qubits)?;
    let mut rng = rng_for(seed);
    let mut order: Vec<usize> = (0..n_qubits).collect();
    for _ in 0..n_moments {
        order.shuffle(&mut rng);
        let mut i = 0;
        while i < n_qubits {
            let room = n_qubits - i >= 2;
            let want_pair = singles.is_empty() || rng.random_bool(two_qubit_fraction);
            if !pairs.is_empty() && room && want_pair {
                let kind = pairs[rng.random_range(0..pairs.len())];
                circuit.push(GateOp::pair(instantiate(kind, &mut rng), order[i], order[i + 1]))?;
                i += 2;
            } else if !singles.is_empty() {
                let kind = singles[rng.random_range(0..singles.len())];
                circuit.push(GateOp::single(instantiate(kind, &mut rng), order[i]))?;
                i += 1;
            } else {
                i += 1;
            }
        }
    }
    Ok(circuit)
}

/// H on qubit 0 followed by a CNOT ladder.
pub fn generate_ghz(n_qubits: usize) -> Result<Circuit> {
    if n_qubits < 2 {
        return Err(SimError::InvalidSpec("GHZ needs at least 2 qubits".into()));
    }
    let mut c = Circuit::new(n_qubits)?;
    c.push(GateOp::single(GateKind::H, 0))?;
    for q in 1..n_qubits {
        c.push(GateOp::pair(GateKind::Cnot, q - 1, q))?;
    }
    Ok(c)
}

/// GHZ preparation with randomly sequenced CNOTs: H on a random qubit, then
/// each CNOT takes a random already-entangled control and a random fresh
/// target.
pub fn generate_ghz_random_cnot(n_qubits: usize, seed: u64) -> Result<Circuit> {
    if n_qubits < 2 {
        return Err(SimError::InvalidSpec("GHZ needs at least 2 qubits".into()));
    }
    let mut rng = rng_for(seed);
    let mut fresh: Vec<usize> = (0..n_qubits).collect();
    fresh.shuffle(&mut rng);
    let root = fresh.pop().unwrap();
    let mut entangled = vec![root];
    let mut c = Circuit::new(n_qubits)?;
    c.push(GateOp::single(GateKind::H, root))?;
    while let Some(target) = fresh.pop() {
        let control = entangled[rng.random_range(0..entangled.len())];
        c.push(GateOp::pair(GateKind::Cnot, control, target))?;
        entangled.push(target);
    }
    Ok(c)
}

/// Replaces the first `count` single-qubit ops, in a seed-determined random
/// order, with T on the same qubit. Larger counts extend smaller ones.
pub fn replace_with_t(circuit: &Circuit, count: usize, seed: u64) -> Result<Circuit> {
    let mut slots: Vec<usize> = circuit
        .ops()
        .iter()
        .enumerate()
        .filter(|(_, op)| op.kind.arity() == Some(1) && op.kind.is_unitary())
        .map(|(i, _)| i)
        .collect();
    if count > slots.len() {
        return Err(SimError::InvalidSpec(format!(
            "cannot place {count} T gates on {} single-qubit slots",
            slots.len()
        )));
    }
    slots.shuffle(&mut rng_for(seed));
    let chosen = &slots[..count];
    let ops = circuit
        .ops()
        .iter()
        .enumerate()
        .map(|(i, op)| {
            if chosen.contains(&i) {
                GateOp::single(GateKind::T, op.support[0])
            } else {
                op.clone()
            }
        })
        .collect();
    Circuit::from_ops(circuit.n_qubits(), ops)
}

/// Random H/S/CNOT circuit with `t_count` single-qubit gates swapped for T.
pub fn generate_clifford_t_circuit(
    n_qubits: usize,
    n_moments: usize,
    t_count: usize,
    two_qubit_fraction: f64,
    seed: u64,
) -> Result<Circuit> {
    let base = generate_random_circuit(
        n_qubits,
        n_moments,
        &[GateKind::H, GateKind::S, GateKind::Cnot],
        two_qubit_fraction,
        seed,
    )?;
    replace_with_t(&base, t_count, seed.wrapping_add(1))
}

/// `n_cnots` CNOTs on random qubit pairs interleaved at random with
/// `n_single` random single-qubit gates (H, S, T or a random-angle Rx).
/// The gate budget does not grow with width.
pub fn generate_fixed_cnot_circuit(
    n_qubits: usize,
    n_cnots: usize,
    n_single: usize,
    seed: u64,
) -> Result<Circuit> {
    if n_cnots > 0 && n_qubits < 2 {
        return Err(SimError::InvalidSpec("CNOTs need at least 2 qubits".into()));
    }
    let mut rng = rng_for(seed);
    let mut slots: Vec<bool> = std::iter::repeat_n(true, n_cnots)
        .chain(std::iter::repeat_n(false, n_single))
        .collect();
    slots.shuffle(&mut rng);
    let singles = [GateKind::H, GateKind::S, GateKind::T, GateKind::rx(0.0)];
    let mut c = Circuit::new(n_qubits)?;
    for is_cnot in slots {
        if is_cnot {
            let a = rng.random_range(0..n_qubits);
            let mut b = rng.random_range(0..n_qubits - 1);
            if b >= a {
                b += 1;
            }
            c.push(GateOp::pair(GateKind::Cnot, a, b))?;
        } else {
            let kind = instantiate(&singles[rng.random_range(0..singles.len())], &mut rng);
            c.push(GateOp::single(kind, rng.random_range(0..n_qubits)))?;
        }
    }
    Ok(c)
}
