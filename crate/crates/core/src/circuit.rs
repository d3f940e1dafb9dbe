//! Circuit intermediate representation.
//!
//! Qubit 0 is the leftmost character of a rendered [`BitString`], and the
//! integer encoding of a bitstring is big-endian in qubit index: qubit 0 is
//! the most significant bit.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, SimError};

pub type Mat2 = [Complex64; 4];
pub type Mat4 = [Complex64; 16];

const UNITARY_TOL: f64 = 1e-10;

/// Rotation angle in radians, reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Self {
        let r = radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        Angle(if r >= TAU { 0.0 } else { r })
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// If the angle is a multiple of π/2 (within `tol`), the multiple mod 4.
    pub fn quarter_turns(self, tol: f64) -> Option<u8> {
        let q = self.0 / (PI / 2.0);
        let k = q.round();
        if (q - k).abs() * (PI / 2.0) <= tol {
            Some((k as i64).rem_euclid(4) as u8)
        } else {
            None
        }
    }
}

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Probability(p))
        } else {
            Err(SimError::InvalidSpec(format!("probability {p} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Row-major 2×2 unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary1(Mat2);

/// Row-major 4×4 unitary; row index is `2·bit(support[0]) + bit(support[1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary2(Mat4);

fn is_unitary(m: &[Complex64], dim: usize) -> bool {
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += m[k * dim + i].conj() * m[k * dim + j];
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            if (acc - expect).norm() > UNITARY_TOL {
                return false;
            }
        }
    }
    true
}

impl Unitary1 {
    pub fn new(m: Mat2) -> Result<Self> {
        if is_unitary(&m, 2) {
            Ok(Unitary1(m))
        } else {
            Err(SimError::InvalidSpec("MATRIX1Q entries are not unitary".into()))
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }
}

impl Unitary2 {
    pub fn new(m: Mat4) -> Result<Self> {
        if is_unitary(&m, 4) {
            Ok(Unitary2(m))
        } else {
            Err(SimError::InvalidSpec("MATRIX2Q entries are not unitary".into()))
        }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx(Angle),
    Ry(Angle),
    Rz(Angle),
    Cnot,
    Cz,
    Swap,
    Measure,
    BitFlip(Probability),
    Depolarize(Probability),
    Matrix1(Box<Unitary1>),
    Matrix2(Box<Unitary2>),
}

/// Dense matrix of a unitary gate kind.
#[derive(Debug, Clone, PartialEq)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [c(0.0, 0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            out[i * 2 + j] = a[i * 2] * b[j] + a[i * 2 + 1] * b[2 + j];
        }
    }
    out
}

impl GateKind {
    pub fn rx(theta: f64) -> Self {
        GateKind::Rx(Angle::new(theta))
    }

    pub fn ry(theta: f64) -> Self {
        GateKind::Ry(Angle::new(theta))
    }

    pub fn rz(theta: f64) -> Self {
        GateKind::Rz(Angle::new(theta))
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        Ok(GateKind::BitFlip(Probability::new(p)?))
    }

    pub fn depolarize(p: f64) -> Result<Self> {
        Ok(GateKind::Depolarize(Probability::new(p)?))
    }

    pub fn matrix1(m: Mat2) -> Result<Self> {
        Ok(GateKind::Matrix1(Box::new(Unitary1::new(m)?)))
    }

    pub fn matrix2(m: Mat4) -> Result<Self> {
        Ok(GateKind::Matrix2(Box::new(Unitary2::new(m)?)))
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Cnot => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Measure => "measure",
            GateKind::BitFlip(_) => "bit_flip",
            GateKind::Depolarize(_) => "depolarize",
            GateKind::Matrix1(_) => "matrix1q",
            GateKind::Matrix2(_) => "matrix2q",
        }
    }

    /// Number of qubits the kind acts on; `None` for `Measure` (any width).
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Measure => None,
            GateKind::Cnot | GateKind::Cz | GateKind::Swap | GateKind::Matrix2(_) => Some(2),
            _ => Some(1),
        }
    }

    pub fn is_channel(&self) -> bool {
        matches!(self, GateKind::BitFlip(_) | GateKind::Depolarize(_))
    }

    pub fn is_unitary(&self) -> bool {
        !self.is_channel() && *self != GateKind::Measure
    }

    pub fn matrix(&self) -> Option<GateMatrix> {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let h = FRAC_1_SQRT_2;
        let m = match self {
            GateKind::H => GateMatrix::One([c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
            GateKind::X => GateMatrix::One([z, o, o, z]),
            GateKind::Y => GateMatrix::One([z, c(0.0, -1.0), c(0.0, 1.0), z]),
            GateKind::Z => GateMatrix::One([o, z, z, -o]),
            GateKind::S => GateMatrix::One([o, z, z, c(0.0, 1.0)]),
            GateKind::Sdg => GateMatrix::One([o, z, z, c(0.0, -1.0)]),
            GateKind::T => GateMatrix::One([o, z, z, Complex64::from_polar(1.0, PI / 4.0)]),
            GateKind::Tdg => GateMatrix::One([o, z, z, Complex64::from_polar(1.0, -PI / 4.0)]),
            GateKind::Rx(a) => {
                let (s, co) = (a.0 / 2.0).sin_cos();
                GateMatrix::One([c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
            }
            GateKind::Ry(a) => {
                let (s, co) = (a.0 / 2.0).sin_cos();
                GateMatrix::One([c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
            }
            GateKind::Rz(a) => GateMatrix::One([
                Complex64::from_polar(1.0, -a.0 / 2.0),
                z,
                z,
                Complex64::from_polar(1.0, a.0 / 2.0),
            ]),
            GateKind::Cnot => {
                let mut m = [z; 16];
                m[0] = o;
                m[5] = o;
                m[11] = o;
                m[14] = o;
                GateMatrix::Two(m)
            }
            GateKind::Cz => {
                let mut m = [z; 16];
                m[0] = o;
                m[5] = o;
                m[10] = o;
                m[15] = -o;
                GateMatrix::Two(m)
            }
            GateKind::Swap => {
                let mut m = [z; 16];
                m[0] = o;
                m[6] = o;
                m[9] = o;
                m[15] = o;
                GateMatrix::Two(m)
            }
            GateKind::Matrix1(u) => GateMatrix::One(u.0),
            GateKind::Matrix2(u) => GateMatrix::Two(u.0),
            GateKind::Measure | GateKind::BitFlip(_) | GateKind::Depolarize(_) => return None,
        };
        Some(m)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) => {
                write!(f, "{}({})", self.name(), a.0)
            }
            GateKind::BitFlip(p) | GateKind::Depolarize(p) => write!(f, "{}({})", self.name(), p.0),
            _ => f.write_str(self.name()),
        }
    }
}

/// A gate kind applied to an ordered list of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub support: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, support: Vec<usize>) -> Self {
        GateOp { kind, support }
    }

    pub fn single(kind: GateKind, q: usize) -> Self {
        GateOp::new(kind, vec![q])
    }

    pub fn pair(kind: GateKind, a: usize, b: usize) -> Self {
        GateOp::new(kind, vec![a, b])
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.support.is_empty() {
            return Err(SimError::InvalidSpec(format!("{} has empty support", self.kind)));
        }
        if let Some(arity) = self.kind.arity() {
            if arity != self.support.len() {
                return Err(SimError::InvalidSpec(format!(
                    "{} expects {arity} qubits, got {}",
                    self.kind,
                    self.support.len()
                )));
            }
        }
        for (i, &q) in self.support.iter().enumerate() {
            if q >= n_qubits {
                return Err(SimError::InvalidSpec(format!(
                    "{} acts on qubit {q} but the circuit has {n_qubits}",
                    self.kind
                )));
            }
            if self.support[..i].contains(&q) {
                return Err(SimError::InvalidSpec(format!(
                    "{} lists qubit {q} twice",
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.kind, self.support)
    }
}

/// Ordered gate list over a fixed number of qubits.
///
/// A `Measure` op is *terminal* when it is the last op. Any other `Measure`
/// is a mid-circuit measurement and must act on a single qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(SimError::InvalidSpec("circuit needs at least one qubit".into()));
        }
        Ok(Circuit { n_qubits, ops: Vec::new() })
    }

    pub fn from_ops(n_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        let mut c = Circuit::new(n_qubits)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    /// Appends an op. Fails if the op is malformed or if the circuit already
    /// ends in a multi-qubit measurement.
    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        if let Some(last) = self.ops.last() {
            if last.kind == GateKind::Measure && last.support.len() > 1 {
                return Err(SimError::InvalidSpec(
                    "only single-qubit measurements may appear mid-circuit".into(),
                ));
            }
        }
        self.ops.push(op);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Appends a terminal measurement of every qubit.
    pub fn measure_all(&mut self) -> Result<()> {
        self.push(GateOp::new(GateKind::Measure, (0..self.n_qubits).collect()))
    }

    pub fn has_terminal_measure(&self) -> bool {
        matches!(self.ops.last(), Some(op) if op.kind == GateKind::Measure)
    }

    pub fn is_terminal(&self, index: usize) -> bool {
        index + 1 == self.ops.len() && self.ops[index].kind == GateKind::Measure
    }

    /// True when the circuit contains channels or mid-circuit measurements.
    pub fn is_non_unitary(&self) -> bool {
        self.ops.iter().enumerate().any(|(i, op)| {
            op.kind.is_channel() || (op.kind == GateKind::Measure && !self.is_terminal(i))
        })
    }

    pub fn count_two_qubit(&self) -> usize {
        self.ops.iter().filter(|op| op.kind.arity() == Some(2)).count()
    }
}

/// Fixed-length measurement record. Ordering and the integer encoding are
/// big-endian in qubit index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    // qubit q lives in words[q / 64] at bit 63 - q % 64, so the derived
    // lexicographic order is the big-endian integer order
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString { words: vec![0; len.div_ceil(64).max(1)], len }
    }

    /// Builds from the big-endian integer encoding. Requires `len <= 64`.
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= 64, "from_index supports at most 64 qubits");
        let mut b = BitString::zeros(len);
        for q in 0..len {
            b.set(q, (index >> (len - 1 - q)) & 1 == 1);
        }
        b
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut b = BitString::zeros(bits.len());
        for (q, &bit) in bits.iter().enumerate() {
            b.set(q, bit);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, q: usize) -> bool {
        debug_assert!(q < self.len);
        (self.words[q / 64] >> (63 - q % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: usize, bit: bool) {
        debug_assert!(q < self.len);
        let mask = 1u64 << (63 - q % 64);
        if bit {
            self.words[q / 64] |= mask;
        } else {
            self.words[q / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, q: usize) {
        let v = self.get(q);
        self.set(q, !v);
    }

    /// Big-endian integer encoding. Requires `len <= 64`.
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 64, "to_index supports at most 64 qubits");
        (0..self.len).fold(0u64, |acc, q| (acc << 1) | self.get(q) as u64)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |q| self.get(q))
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for q in 0..self.len {
            out.flip(q);
        }
        out
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(SimError::InvalidSpec(format!("bad bit character `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitString::from_bits(&bits))
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
