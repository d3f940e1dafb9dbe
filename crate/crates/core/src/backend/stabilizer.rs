//! CH-form stabilizer states with sum-over-Cliffords handling of `Rz(θ)`.
//!
//! A stabilizer state is stored as `ω U_C U_H |s>` where `U_C` is a product
//! of S, CZ and CNOT gates, `U_H = ⊗ H^{v_j}` and `|s>` is a basis state.
//! `U_C` is tracked through its action on Paulis:
//!
//! ```text
//! U_C⁻¹ Z_p U_C = Π_j Z_j^{G[p][j]}
//! U_C⁻¹ X_p U_C = i^{γ_p} Π_j X_j^{F[p][j]} Z_j^{M[p][j]}
//! ```
//!
//! Gates applied to the state left-multiply `U_C`; the Hadamard update
//! re-expresses the resulting superposition of two basis states and
//! right-multiplies `U_C` by C-type gates.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;

use super::StateBackend;
use crate::circuit::{BitString, GateKind, GateOp};
use crate::error::Result;
use crate::rng::RngStream;

/// Angles within this distance of a multiple of π/2 count as Clifford.
pub const CLIFFORD_ANGLE_TOL: f64 = 1e-12;

/// Packed GF(2) vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(n: usize) -> Self {
        Bits { words: vec![0; n.div_ceil(64)] }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    fn toggle(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    fn xor_assign(&mut self, other: &Bits) {
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a ^= b);
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut b = Bits::zeros(n);
        (0..n).filter(|&i| f(i)).for_each(|i| b.set(i, true));
        b
    }
}

/// Parity of the popcount of `a & b & c...`, computed word-wise.
fn and_parity(rows: &[&Bits]) -> bool {
    let words = rows[0].words.len();
    let mut ones = 0u32;
    for w in 0..words {
        ones += rows.iter().fold(!0u64, |acc, r| acc & r.words[w]).count_ones();
    }
    ones & 1 == 1
}

/// Square GF(2) matrix stored as packed rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<Bits>,
}

impl BitMatrix {
    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| Bits::from_fn(n, |j| i == j)).collect();
        BitMatrix { rows }
    }

    pub fn zeros(n: usize) -> Self {
        BitMatrix { rows: vec![Bits::zeros(n); n] }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn row(&self, r: usize) -> &Bits {
        &self.rows[r]
    }

    fn xor_row(&mut self, dst: usize, src: usize) {
        let src = self.rows[src].clone();
        self.rows[dst].xor_assign(&src);
    }

    /// Column `dst` ^= column `src` of `other` (may be `self`'s own data when
    /// called through [`BitMatrix::xor_col_self`]).
    fn xor_col_from(&mut self, dst: usize, other: &BitMatrix, src: usize) {
        for (r, row) in self.rows.iter_mut().enumerate() {
            if other.get(r, src) {
                row.toggle(dst);
            }
        }
    }

    fn xor_col_self(&mut self, dst: usize, src: usize) {
        for row in self.rows.iter_mut() {
            if row.get(src) {
                row.toggle(dst);
            }
        }
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let n = self.rows.len();
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| rows[r].get(col)) else { continue };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Coefficients of `R(θ) = c_i·I + c_s·S` with `R(θ) = diag(e^{-iθ/2}, e^{iθ/2})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RzDecomposition {
    pub c_i: Complex64,
    pub c_s: Complex64,
}

impl RzDecomposition {
    /// Probability of choosing the `S` branch: `|c_s| / (|c_i| + |c_s|)`.
    pub fn s_weight(&self) -> f64 {
        let (a, b) = (self.c_i.norm(), self.c_s.norm());
        b / (a + b)
    }
}

pub fn decompose_rz(theta: f64) -> RzDecomposition {
    let (sin, cos) = half_angle_sin_cos(theta);
    RzDecomposition {
        c_i: Complex64::new(cos - sin, 0.0),
        // sqrt(2) e^{-iπ/4} = 1 - i
        c_s: Complex64::new(sin, -sin),
    }
}

/// `sin(θ/2), cos(θ/2)`, exact when θ is a multiple of π/2.
fn half_angle_sin_cos(theta: f64) -> (f64, f64) {
    let k = (theta / (PI / 2.0)).round();
    if (theta - k * PI / 2.0).abs() > 1e-15 * theta.abs().max(1.0) {
        return (theta / 2.0).sin_cos();
    }
    // (sin, cos) of kπ/4 for k mod 8
    const TABLE: [(f64, f64); 8] = [
        (0.0, 1.0),
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        (1.0, 0.0),
        (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        (0.0, -1.0),
        (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        (-1.0, 0.0),
        (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    ];
    TABLE[(k as i64).rem_euclid(8) as usize]
}

/// True for Clifford kinds and for `Rz` at multiples of π/2.
pub fn has_stabilizer_effect(kind: &GateKind) -> bool {
    match kind {
        GateKind::H
        | GateKind::X
        | GateKind::Y
        | GateKind::Z
        | GateKind::S
        | GateKind::Sdg
        | GateKind::Cnot
        | GateKind::Cz
        | GateKind::Swap => true,
        GateKind::Rz(a) => a.quarter_turns(CLIFFORD_ANGLE_TOL).is_some(),
        _ => false,
    }
}

/// Non-Clifford diagonal rotation angle handled by branch sampling.
fn non_clifford_angle(kind: &GateKind) -> Option<f64> {
    match kind {
        GateKind::T => Some(PI / 4.0),
        GateKind::Tdg => Some(-PI / 4.0),
        GateKind::Rz(a) if a.quarter_turns(CLIFFORD_ANGLE_TOL).is_none() => Some(a.radians()),
        _ => None,
    }
}

/// CH-form stabilizer state `ω U_C U_H |s>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChForm {
    n: usize,
    f: BitMatrix,
    g: BitMatrix,
    m: BitMatrix,
    gamma: Vec<u8>,
    v: Bits,
    s: Bits,
    omega: Complex64,
}

impl ChForm {
    /// `|0…0>`: F = G = I, M = 0, γ = v = s = 0, ω = 1.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "CH form needs at least one qubit");
        ChForm {
            n,
            f: BitMatrix::identity(n),
            g: BitMatrix::identity(n),
            m: BitMatrix::zeros(n),
            gamma: vec![0; n],
            v: Bits::zeros(n),
            s: Bits::zeros(n),
            omega: Complex64::new(1.0, 0.0),
        }
    }

    pub fn f(&self) -> &BitMatrix {
        &self.f
    }

    pub fn g(&self) -> &BitMatrix {
        &self.g
    }

    pub fn m(&self) -> &BitMatrix {
        &self.m
    }

    pub fn gamma(&self) -> &[u8] {
        &self.gamma
    }

    pub fn v(&self) -> &Bits {
        &self.v
    }

    pub fn s(&self) -> &Bits {
        &self.s
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    // Left multiplication by C-type gates.

    fn left_s(&mut self, q: usize) {
        self.m.rows[q].xor_assign(&self.g.rows[q].clone());
        self.gamma[q] = (self.gamma[q] + 3) % 4;
    }

    fn left_cz(&mut self, q: usize, r: usize) {
        let (gq, gr) = (self.g.rows[q].clone(), self.g.rows[r].clone());
        self.m.rows[q].xor_assign(&gr);
        self.m.rows[r].xor_assign(&gq);
    }

    fn left_cnot(&mut self, q: usize, r: usize) {
        let phase = 2 * and_parity(&[&self.m.rows[q], &self.f.rows[r]]) as u8;
        self.gamma[q] = (self.gamma[q] + self.gamma[r] + phase) % 4;
        self.g.xor_row(r, q);
        self.f.xor_row(q, r);
        self.m.xor_row(q, r);
    }

    // Right multiplication by C-type gates.

    fn right_s(&mut self, q: usize) {
        self.m.xor_col_from(q, &self.f, q);
        for p in 0..self.n {
            if self.f.get(p, q) {
                self.gamma[p] = (self.gamma[p] + 3) % 4;
            }
        }
    }

    fn right_cz(&mut self, q: usize, r: usize) {
        self.m.xor_col_from(q, &self.f, r);
        self.m.xor_col_from(r, &self.f, q);
        for p in 0..self.n {
            if self.f.get(p, q) && self.f.get(p, r) {
                self.gamma[p] = (self.gamma[p] + 2) % 4;
            }
        }
    }

    fn right_cnot(&mut self, q: usize, r: usize) {
        self.g.xor_col_self(q, r);
        self.f.xor_col_self(r, q);
        self.m.xor_col_self(q, r);
    }

    fn apply_h(&mut self, q: usize) {
        let n = self.n;
        let (gq, fq, mq) = (&self.g.rows[q], &self.f.rows[q], &self.m.rows[q]);
        let not_v = Bits::from_fn(n, |j| !self.v.get(j));
        let mut t = self.s.clone();
        let mut u = self.s.clone();
        for j in 0..n {
            if self.v.get(j) {
                if gq.get(j) {
                    t.toggle(j);
                }
                if mq.get(j) {
                    u.toggle(j);
                }
            } else if fq.get(j) {
                u.toggle(j);
            }
        }
        let alpha = and_parity(&[gq, &not_v, &self.s]) as u8;
        let beta = (and_parity(&[mq, &not_v, &self.s]) as u8
            + and_parity(&[fq, &self.v, mq]) as u8
            + and_parity(&[fq, &self.v, &self.s]) as u8)
            % 2;
        let delta = (self.gamma[q] + 2 * (alpha + beta)) % 4;
        self.update_sum(t, u, delta, alpha);
        // 1/sqrt(2) of the Hadamard is folded into update_sum
    }

    /// Rewrites `(-1)^α U_C U_H (|t> + i^δ |u>) / √2` back into CH form.
    fn update_sum(&mut self, t: Bits, u: Bits, delta: u8, alpha: u8) {
        let sign = if alpha % 2 == 1 { -1.0 } else { 1.0 };
        if t == u {
            self.s = t;
            self.omega *= FRAC_1_SQRT_2 * sign * (Complex64::new(1.0, 0.0) + i_pow(delta));
            return;
        }
        let n = self.n;
        let diff: Vec<usize> = (0..n).filter(|&j| t.get(j) != u.get(j)).collect();
        let set0: Vec<usize> = diff.iter().copied().filter(|&j| !self.v.get(j)).collect();
        let set1: Vec<usize> = diff.iter().copied().filter(|&j| self.v.get(j)).collect();
        let q = if let Some(&q) = set0.first() {
            for &i in &set0[1..] {
                self.right_cnot(q, i);
            }
            for &i in &set1 {
                self.right_cz(q, i);
            }
            q
        } else {
            let q = set1[0];
            for &i in &set1[1..] {
                self.right_cnot(i, q);
            }
            q
        };
        let (y, z) = if t.get(q) {
            let mut y = u.clone();
            y.toggle(q);
            (y, u)
        } else {
            let mut z = t.clone();
            z.toggle(q);
            (t, z)
        };
        let (omega, a, b, c) = h_decompose(self.v.get(q), y.get(q), z.get(q), delta);
        self.s = y;
        self.s.set(q, c);
        if a {
            self.right_s(q);
        }
        self.v.set(q, b);
        self.omega *= omega * sign;
    }

    /// Applies a Clifford gate exactly (including global phase).
    pub fn apply_clifford(&mut self, op: &GateOp) -> Result<()> {
        let q = op.support[0];
        match &op.kind {
            GateKind::H => self.apply_h(q),
            GateKind::S => self.left_s(q),
            GateKind::Sdg => {
                self.left_s(q);
                self.left_s(q);
                self.left_s(q);
            }
            GateKind::Z => {
                self.left_s(q);
                self.left_s(q);
            }
            GateKind::X => {
                // X = H Z H
                self.apply_h(q);
                self.left_s(q);
                self.left_s(q);
                self.apply_h(q);
            }
            GateKind::Y => {
                // Y = i X Z
                self.left_s(q);
                self.left_s(q);
                self.apply_h(q);
                self.left_s(q);
                self.left_s(q);
                self.apply_h(q);
                self.omega *= Complex64::new(0.0, 1.0);
            }
            GateKind::Cnot => self.left_cnot(q, op.support[1]),
            GateKind::Cz => self.left_cz(q, op.support[1]),
            GateKind::Swap => {
                let r = op.support[1];
                self.left_cnot(q, r);
                self.left_cnot(r, q);
                self.left_cnot(q, r);
            }
            GateKind::Rz(a) => match a.quarter_turns(CLIFFORD_ANGLE_TOL) {
                Some(k) => {
                    // Rz(kπ/2) = e^{-ikπ/4} S^k
                    for _ in 0..k {
                        self.left_s(q);
                    }
                    self.omega *= Complex64::from_polar(1.0, -(k as f64) * PI / 4.0);
                }
                None => return Err(self.unsupported(&op.kind)),
            },
            GateKind::Measure => {}
            other => return Err(self.unsupported(other)),
        }
        Ok(())
    }

    /// Clifford ops apply exactly; `T`, `Tdg` and non-Clifford `Rz(θ)` are
    /// replaced by `I` or `S`, drawn with weights `|c_i|` and `|c_s|`.
    pub fn act_on_near_clifford(&mut self, op: &GateOp, rng: &mut RngStream) -> Result<()> {
        match non_clifford_angle(&op.kind) {
            Some(theta) => {
                let d = decompose_rz(theta);
                if rng.random::<f64>() < d.s_weight() {
                    self.left_s(op.support[0]);
                }
                Ok(())
            }
            None => self.apply_clifford(op),
        }
    }

    /// `<b|ψ>`, including the global phase. O(n²).
    pub fn amplitude(&self, bits: &BitString) -> Complex64 {
        let (u, mu) = self.row_combination(bits);
        for j in 0..self.n {
            if !self.v.get(j) && u.get(j) != self.s.get(j) {
                return Complex64::new(0.0, 0.0);
            }
        }
        let sign = if and_parity(&[&self.v, &u, &self.s]) { -1.0 } else { 1.0 };
        let scale = 2f64.powf(-(self.v.count_ones() as f64) / 2.0);
        self.omega * scale * sign * i_pow((mu % 4) as u8)
    }

    /// `u = bF` over GF(2) and the phase exponent μ of `<b| U_C`.
    fn row_combination(&self, bits: &BitString) -> (Bits, u32) {
        let mut u = Bits::zeros(self.n);
        let mut mu = 0u32;
        for p in 0..self.n {
            if bits.get(p) {
                mu += self.gamma[p] as u32;
                u.xor_assign(&self.f.rows[p]);
                mu += 2 * and_parity(&[&self.m.rows[p], &u]) as u32;
            }
        }
        (u, mu)
    }

    /// `|ω|² 2^{-|v|}` on the affine support `{b : (bF)_j = s_j ∀ j with v_j = 0}`, else 0.
    pub fn probability_of(&self, bits: &BitString) -> f64 {
        let mut u = Bits::zeros(self.n);
        for p in 0..self.n {
            if bits.get(p) {
                u.xor_assign(&self.f.rows[p]);
            }
        }
        let off_support = u
            .words
            .iter()
            .zip(&self.s.words)
            .zip(&self.v.words)
            .any(|((uw, sw), vw)| (uw ^ sw) & !vw != 0);
        if off_support {
            return 0.0;
        }
        self.omega.norm_sqr() * 2f64.powi(-(self.v.count_ones() as i32))
    }
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Single-qubit identity `H^v (|y> + i^δ |z>) = ω S^a H^b |c>` for `y != z`,
/// with the `1/√2` of the outer Hadamard absorbed into `ω`.
fn h_decompose(v: bool, y: bool, z: bool, delta: u8) -> (Complex64, bool, bool, bool) {
    debug_assert!(y != z);
    if !v {
        let omega = i_pow(((delta as u32 * y as u32) % 4) as u8);
        let delta2 = if y { (4 - delta) % 4 } else { delta % 4 };
        (omega, delta2 & 1 == 1, true, delta2 >> 1 == 1)
    } else if delta.is_multiple_of(2) {
        let c = (delta >> 1) & 1 == 1;
        let omega = if c && y { -1.0 } else { 1.0 };
        (Complex64::new(omega, 0.0), false, false, c)
    } else {
        let omega = FRAC_1_SQRT_2 * (Complex64::new(1.0, 0.0) + i_pow(delta));
        let c = !(((delta >> 1) & 1 == 1) ^ y);
        (omega, true, true, c)
    }
}

impl StateBackend for ChForm {
    fn name(&self) -> &'static str {
        "stabilizer"
    }

    fn n_qubits(&self) -> usize {
        self.n
    }

    fn supports(&self, kind: &GateKind) -> bool {
        has_stabilizer_effect(kind)
            || matches!(kind, GateKind::T | GateKind::Tdg | GateKind::Rz(_) | GateKind::Measure)
    }

    fn apply_op(&mut self, op: &GateOp, rng: &mut RngStream) -> Result<()> {
        self.act_on_near_clifford(op, rng)
    }

    fn probability(&self, bits: &BitString) -> f64 {
        self.probability_of(bits)
    }

    fn is_stochastic(&self, kind: &GateKind) -> bool {
        non_clifford_angle(kind).is_some()
    }
}

/// Independent reconstruction of a CH-form state from its tableau data,
/// used to verify the update rules against dense simulation.
pub mod reconstruct {
    use super::*;

    /// Rebuilds `U_C` as a dense `2^n × 2^n` matrix (row-major) from the
    /// X-relation and `U_C|0> = |0>`, then checks both defining relations.
    /// Returns `None` if the tableau is inconsistent.
    pub fn c_type_unitary(state: &ChForm) -> Option<Vec<Complex64>> {
        let n = state.n;
        assert!(n <= 10, "dense reconstruction limited to 10 qubits");
        let dim = 1usize << n;
        let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1 == 1;
        let row_index = |m: &BitMatrix, p: usize| {
            (0..n).fold(0usize, |acc, j| (acc << 1) | m.get(p, j) as usize)
        };
        let parity = |a: usize, b: usize| (a & b).count_ones() % 2 == 1;

        // column y of U_C is phase[y] |image[y]>
        let mut image: Vec<Option<(usize, Complex64)>> = vec![None; dim];
        image[0] = Some((0, Complex64::new(1.0, 0.0)));
        let mut queue = vec![0usize];
        while let Some(y) = queue.pop() {
            let (x, ph) = image[y].unwrap();
            for p in 0..n {
                // U_C |y ^ F_p> = i^{-γ_p} (-1)^{M_p·y} X_p U_C |y>
                let fp = row_index(&state.f, p);
                let mp = row_index(&state.m, p);
                let sign = if parity(mp, y) { -1.0 } else { 1.0 };
                let phase = ph * i_pow((4 - state.gamma[p] % 4) % 4) * sign;
                let target = (y ^ fp, x ^ (1 << (n - 1 - p)), phase);
                match image[target.0] {
                    None => {
                        image[target.0] = Some((target.1, target.2));
                        queue.push(target.0);
                    }
                    Some((x2, ph2)) => {
                        if x2 != target.1 || (ph2 - target.2).norm() > 1e-9 {
                            return None;
                        }
                    }
                }
            }
        }
        let mut used = vec![false; dim];
        let mut u = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (y, entry) in image.iter().enumerate() {
            let (x, ph) = (*entry)?;
            if used[x] {
                return None;
            }
            used[x] = true;
            // Z relation: Z_p U_C |y> = (-1)^{G_p·y} U_C |y>
            for p in 0..n {
                if bit(x, p) != parity(row_index(&state.g, p), y) {
                    return None;
                }
            }
            u[x * dim + y] = ph;
        }
        Some(u)
    }

    /// `ω U_C U_H |s>` as a dense vector, or `None` if the relations fail.
    pub fn state_vector(state: &ChForm) -> Option<Vec<Complex64>> {
        let n = state.n;
        let dim = 1usize << n;
        let uc = c_type_unitary(state)?;
        // U_H |s>
        let mut hs = vec![Complex64::new(1.0, 0.0)];
        for j in 0..n {
            let amp = if state.v.get(j) {
                let sgn = if state.s.get(j) { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
                [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(sgn, 0.0)]
            } else if state.s.get(j) {
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
            } else {
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
            };
            hs = hs.iter().flat_map(|&a| [a * amp[0], a * amp[1]]).collect();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (x, o) in out.iter_mut().enumerate() {
            let acc: Complex64 = (0..dim).map(|y| uc[x * dim + y] * hs[y]).sum();
            *o = state.omega * acc;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::DenseState;
    use crate::circuit::Circuit;
    use rand::SeedableRng;

    fn op1(kind: GateKind, q: usize) -> GateOp {
        GateOp::single(kind, q)
    }

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn initial_state() {
        let st = ChForm::new(3);
        assert_eq!(st.amplitude(&bits("000")), Complex64::new(1.0, 0.0));
        assert_eq!(st.amplitude(&bits("010")), Complex64::new(0.0, 0.0));
        assert_eq!(st.probability_of(&bits("000")), 1.0);
        assert_eq!(st.probability_of(&bits("100")), 0.0);
        let psi = reconstruct::state_vector(&st).unwrap();
        assert_eq!(psi[0], Complex64::new(1.0, 0.0));
        assert!(psi[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn hadamard_gives_uniform_qubit() {
        let mut st = ChForm::new(1);
        st.apply_clifford(&op1(GateKind::H, 0)).unwrap();
        assert!((st.probability_of(&bits("0")) - 0.5).abs() < 1e-12);
        assert!((st.probability_of(&bits("1")) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn x_then_cnot() {
        let mut st = ChForm::new(2);
        st.apply_clifford(&op1(GateKind::X, 0)).unwrap();
        st.apply_clifford(&GateOp::pair(GateKind::Cnot, 0, 1)).unwrap();
        assert!((st.probability_of(&bits("11")) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz4_probabilities() {
        let mut st = ChForm::new(4);
        st.apply_clifford(&op1(GateKind::H, 0)).unwrap();
        for q in 1..4 {
            st.apply_clifford(&GateOp::pair(GateKind::Cnot, q - 1, q)).unwrap();
        }
        for i in 0..16 {
            let b = BitString::from_index(i, 4);
            let expect = if i == 0 || i == 15 { 0.5 } else { 0.0 };
            assert!((st.probability_of(&b) - expect).abs() < 1e-12, "{b}");
        }
    }

    #[test]
    fn non_clifford_kinds_rejected_by_exact_path() {
        let mut st = ChForm::new(1);
        assert!(st.apply_clifford(&op1(GateKind::T, 0)).is_err());
        assert!(st.apply_clifford(&op1(GateKind::rx(0.1), 0)).is_err());
        let mut rng = RngStream::new(0, 0);
        assert!(st.act_on_near_clifford(&op1(GateKind::ry(0.1), 0), &mut rng).is_err());
        assert!(!st.supports(&GateKind::rx(0.3)));
        assert!(st.supports(&GateKind::T));
    }

    #[test]
    fn stabilizer_effect_flags() {
        assert!(has_stabilizer_effect(&GateKind::rz(PI / 2.0)));
        assert!(has_stabilizer_effect(&GateKind::rz(3.0 * PI)));
        assert!(!has_stabilizer_effect(&GateKind::rz(PI / 4.0)));
        assert!(!has_stabilizer_effect(&GateKind::T));
        assert!(has_stabilizer_effect(&GateKind::S));
    }

    #[test]
    fn rz_decomposition_endpoints() {
        let d = decompose_rz(0.0);
        assert_eq!((d.c_i, d.c_s), (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
        let d = decompose_rz(PI / 2.0);
        assert_eq!(d.c_i, Complex64::new(0.0, 0.0));
        assert_eq!(d.c_s, Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2));
        assert_eq!(d.s_weight(), 1.0);
    }

    #[test]
    fn rz_at_clifford_angle_matches_s() {
        let mut a = ChForm::new(1);
        let mut b = ChForm::new(1);
        let mut rng = RngStream::new(1, 0);
        for st in [&mut a, &mut b] {
            st.apply_clifford(&op1(GateKind::H, 0)).unwrap();
        }
        a.act_on_near_clifford(&op1(GateKind::rz(PI / 2.0), 0), &mut rng).unwrap();
        b.apply_clifford(&op1(GateKind::S, 0)).unwrap();
        a.apply_clifford(&op1(GateKind::H, 0)).unwrap();
        b.apply_clifford(&op1(GateKind::H, 0)).unwrap();
        for i in 0..2 {
            let x = BitString::from_index(i, 1);
            assert!((a.probability_of(&x) - b.probability_of(&x)).abs() < 1e-12);
        }
        assert!(!a.is_stochastic(&GateKind::rz(PI / 2.0)));
        assert!(a.is_stochastic(&GateKind::rz(0.3)));
    }

    fn random_clifford_op(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> GateOp {
        let kinds1 = [GateKind::H, GateKind::S, GateKind::Sdg, GateKind::X, GateKind::Y, GateKind::Z];
        let kinds2 = [GateKind::Cnot, GateKind::Cz, GateKind::Swap];
        if n >= 2 && rng.random_bool(0.4) {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            GateOp::pair(kinds2[rng.random_range(0..3)].clone(), a, b)
        } else {
            op1(kinds1[rng.random_range(0..6)].clone(), rng.random_range(0..n))
        }
    }

    #[test]
    fn random_clifford_matches_dense_at_every_step() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..10 {
            let n = 1 + trial % 5;
            let mut ch = ChForm::new(n);
            let mut circ = Circuit::new(n).unwrap();
            for step in 0..200 {
                let op = random_clifford_op(&mut rng, n);
                ch.apply_clifford(&op).unwrap();
                circ.push(op).unwrap();
                let dense = DenseState::simulate(&circ).unwrap();
                let recon = reconstruct::state_vector(&ch)
                    .unwrap_or_else(|| panic!("relations broken at trial {trial} step {step}"));
                for i in 0..(1u64 << n) {
                    let b = BitString::from_index(i, n);
                    let want = dense.amplitudes()[i as usize];
                    assert!((recon[i as usize] - want).norm() < 1e-10, "recon {trial}/{step}");
                    assert!((ch.amplitude(&b) - want).norm() < 1e-10, "amp {trial}/{step}");
                    assert!((ch.probability_of(&b) - want.norm_sqr()).abs() < 1e-10);
                }
            }
            assert_eq!(ch.f().rank(), n);
            assert_eq!(ch.g().rank(), n);
        }
    }
}
