//! Open-chain matrix product state with a bond-dimension cap.
//!
//! Site `q` holds a tensor of shape `(χ_left, 2, χ_right)` stored row-major.
//! The chain is kept in mixed canonical form around `center`, so the
//! singular values of a two-site block are its Schmidt coefficients and
//! truncation discards the smallest Schmidt weight.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StateBackend;
use crate::circuit::{BitString, GateKind, GateMatrix, GateOp, Mat2, Mat4};
use crate::error::Result;
use crate::rng::RngStream;

/// Singular values below this fraction of the largest are dropped even when
/// the bond dimension is unbounded.
const SVD_CUTOFF: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
struct SiteTensor {
    left: usize,
    right: usize,
    data: Vec<Complex64>,
}

impl SiteTensor {
    fn basis_zero() -> Self {
        SiteTensor { left: 1, right: 1, data: vec![Complex64::new(1.0, 0.0), ZERO] }
    }

    #[inline]
    fn at(&self, a: usize, s: usize, b: usize) -> Complex64 {
        self.data[(a * 2 + s) * self.right + b]
    }

    /// `(left·2) × right` matrix view.
    fn as_left_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.left * 2, self.right, &self.data)
    }

    /// `left × (2·right)` matrix view.
    fn as_right_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.left, 2 * self.right, &self.data)
    }

    fn from_matrix(left: usize, right: usize, m: &DMatrix<Complex64>) -> Self {
        // nalgebra is column-major; rebuild the row-major buffer
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(m[(r, c)]);
            }
        }
        SiteTensor { left, right, data }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpsState {
    sites: Vec<SiteTensor>,
    chi_max: Option<usize>,
    center: usize,
    truncation_error: f64,
}

impl MpsState {
    /// `|0…0>` with every bond of dimension 1. `chi_max = None` is unbounded.
    pub fn new(n_qubits: usize, chi_max: Option<usize>) -> Self {
        assert!(n_qubits >= 1, "MPS needs at least one qubit");
        assert!(chi_max != Some(0), "chi_max must be positive");
        MpsState {
            sites: vec![SiteTensor::basis_zero(); n_qubits],
            chi_max,
            center: 0,
            truncation_error: 0.0,
        }
    }

    pub fn chi_max(&self) -> Option<usize> {
        self.chi_max
    }

    /// Accumulated discarded squared Schmidt weight.
    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    /// Dimensions of the `n - 1` internal bonds.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.sites.len() - 1].iter().map(|t| t.right).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    fn apply_single(&mut self, q: usize, m: &Mat2) {
        let t = &mut self.sites[q];
        let (l, r) = (t.left, t.right);
        for a in 0..l {
            for b in 0..r {
                let x0 = t.data[(a * 2) * r + b];
                let x1 = t.data[(a * 2 + 1) * r + b];
                t.data[(a * 2) * r + b] = m[0] * x0 + m[1] * x1;
                t.data[(a * 2 + 1) * r + b] = m[2] * x0 + m[3] * x1;
            }
        }
    }

    fn move_center(&mut self, target: usize) {
        while self.center < target {
            let i = self.center;
            let qr = self.sites[i].as_left_matrix().qr();
            let (q, r) = (qr.q(), qr.r());
            let k = q.ncols();
            let left = self.sites[i].left;
            self.sites[i] = SiteTensor::from_matrix(left, k, &q);
            let next = &self.sites[i + 1];
            let merged = &r * next.as_right_matrix();
            self.sites[i + 1] = SiteTensor::from_matrix(k, next.right, &merged);
            self.center += 1;
        }
        while self.center > target {
            let i = self.center;
            // LQ via QR of the adjoint
            let qr = self.sites[i].as_right_matrix().adjoint().qr();
            let (q, r) = (qr.q().adjoint(), qr.r().adjoint());
            let k = q.nrows();
            let right = self.sites[i].right;
            self.sites[i] = SiteTensor::from_matrix(k, right, &q);
            let prev = &self.sites[i - 1];
            let merged = prev.as_left_matrix() * &r;
            self.sites[i - 1] = SiteTensor::from_matrix(prev.left, k, &merged);
            self.center -= 1;
        }
    }

    /// Applies a 4×4 gate to sites `(i, i+1)`; the matrix row index is
    /// `2·bit(i) + bit(i+1)`.
    fn apply_adjacent(&mut self, i: usize, gate: &Mat4) {
        self.move_center(i);
        let (a_t, b_t) = (&self.sites[i], &self.sites[i + 1]);
        let (l, mid, r) = (a_t.left, a_t.right, b_t.right);
        // theta[a, s1, s2, b]
        let mut theta = vec![ZERO; l * 4 * r];
        for a in 0..l {
            for s1 in 0..2 {
                for s2 in 0..2 {
                    for b in 0..r {
                        let mut acc = ZERO;
                        for k in 0..mid {
                            acc += a_t.at(a, s1, k) * b_t.at(k, s2, b);
                        }
                        theta[((a * 2 + s1) * 2 + s2) * r + b] = acc;
                    }
                }
            }
        }
        let mut mat = DMatrix::from_element(l * 2, 2 * r, ZERO);
        for a in 0..l {
            for b in 0..r {
                let v: [Complex64; 4] =
                    std::array::from_fn(|j| theta[((a * 2 + j / 2) * 2 + j % 2) * r + b]);
                for (out, row) in gate.chunks_exact(4).enumerate() {
                    let val = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
                    mat[(a * 2 + out / 2, (out % 2) * r + b)] = val;
                }
            }
        }
        self.split(i, l, r, mat);
    }

    fn split(&mut self, i: usize, l: usize, r: usize, mat: DMatrix<Complex64>) {
        let Svd { u, s: sv, v_t } = jacobi_svd(&mat);
        let total: f64 = sv.iter().map(|s| s * s).sum();
        let largest = sv[0];
        let mut keep = sv.iter().take_while(|&&s| s > SVD_CUTOFF * largest).count().max(1);
        if let Some(cap) = self.chi_max {
            keep = keep.min(cap);
        }
        let kept: f64 = sv[..keep].iter().map(|s| s * s).sum();
        if total > 0.0 {
            self.truncation_error += ((total - kept) / total).max(0.0);
        }
        let scale = if kept > 0.0 { 1.0 / kept.sqrt() } else { 0.0 };
        let left = u.columns(0, keep).into_owned();
        let mut right = v_t.rows(0, keep).into_owned();
        for (k, mut row) in right.row_iter_mut().enumerate() {
            row *= Complex64::new(sv[k] * scale, 0.0);
        }
        self.sites[i] = SiteTensor::from_matrix(l, keep, &left);
        self.sites[i + 1] = SiteTensor::from_matrix(keep, r, &right);
        self.center = i + 1;
    }

    fn apply_pair(&mut self, q0: usize, q1: usize, gate: &Mat4) {
        let swap = match GateKind::Swap.matrix() {
            Some(GateMatrix::Two(m)) => m,
            _ => unreachable!(),
        };
        // bring q0 next to q1 with nearest-neighbour swaps, then undo them
        let mut pos = q0;
        let mut trail = Vec::new();
        while pos.abs_diff(q1) > 1 {
            let next = if pos < q1 { pos + 1 } else { pos - 1 };
            let lo = pos.min(next);
            self.apply_adjacent(lo, &swap);
            trail.push(lo);
            pos = next;
        }
        if pos < q1 {
            self.apply_adjacent(pos, gate);
        } else {
            self.apply_adjacent(q1, &reverse_qubits(gate));
        }
        for lo in trail.into_iter().rev() {
            self.apply_adjacent(lo, &swap);
        }
    }

    /// Amplitude `<b|ψ>` by selecting each site's physical slice and
    /// contracting the bond chain left to right.
    pub fn amplitude(&self, bits: &BitString) -> Complex64 {
        let mut env = vec![Complex64::new(1.0, 0.0)];
        for (q, t) in self.sites.iter().enumerate() {
            let s = bits.get(q) as usize;
            let mut next = vec![ZERO; t.right];
            for (a, e) in env.iter().enumerate() {
                if *e == ZERO {
                    continue;
                }
                let row = &t.data[(a * 2 + s) * t.right..(a * 2 + s + 1) * t.right];
                for (n, x) in next.iter_mut().zip(row) {
                    *n += e * x;
                }
            }
            env = next;
        }
        env[0]
    }

    /// Same scalar as [`MpsState::amplitude`], contracted right to left.
    pub fn amplitude_rtl(&self, bits: &BitString) -> Complex64 {
        let mut env = vec![Complex64::new(1.0, 0.0)];
        for (q, t) in self.sites.iter().enumerate().rev() {
            let s = bits.get(q) as usize;
            let next: Vec<Complex64> = (0..t.left)
                .map(|a| (0..t.right).map(|b| t.at(a, s, b) * env[b]).sum())
                .collect();
            env = next;
        }
        env[0]
    }

    /// Full contraction into a dense vector (big-endian indexing).
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.sites.len();
        assert!(n <= 24, "to_dense limited to 24 qubits");
        (0..1u64 << n)
            .map(|i| self.amplitude(&BitString::from_index(i, n)))
            .collect()
    }
}

struct Svd {
    u: DMatrix<Complex64>,
    s: Vec<f64>,
    v_t: DMatrix<Complex64>,
}

/// Thin SVD `m = u·diag(s)·v_t` by one-sided Jacobi rotations, singular
/// values in descending order (stable for ties).
fn jacobi_svd(m: &DMatrix<Complex64>) -> Svd {
    if m.nrows() < m.ncols() {
        let Svd { u, s, v_t } = jacobi_svd(&m.adjoint());
        return Svd { u: v_t.adjoint(), s, v_t: u.adjoint() };
    }
    let n = m.ncols();
    let mut a = m.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase = (gamma / g).conj();
                rotate(&mut a, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = DMatrix::from_element(m.nrows(), n, ZERO);
    let mut v_t = DMatrix::from_element(n, n, ZERO);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(k, &(a.column(j) / Complex64::new(norms[j], 0.0)));
        }
        v_t.set_row(k, &v.column(j).adjoint());
        s.push(norms[j]);
    }
    Svd { u, s, v_t }
}

/// Columns `(p, q) ← (c·p − s·e·q, s·p + c·e·q)` with `e` a unit phase.
fn rotate(m: &mut DMatrix<Complex64>, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    for row in 0..m.nrows() {
        let x = m[(row, p)];
        let y = m[(row, q)] * phase;
        m[(row, p)] = x * c - y * s;
        m[(row, q)] = x * s + y * c;
    }
}

/// Reorders a 4×4 matrix from `(a, b)` to `(b, a)` qubit order.
fn reverse_qubits(m: &Mat4) -> Mat4 {
    let perm = |i: usize| ((i & 1) << 1) | (i >> 1);
    std::array::from_fn(|k| m[perm(k / 4) * 4 + perm(k % 4)])
}

impl StateBackend for MpsState {
    fn name(&self) -> &'static str {
        "mps"
    }

    fn n_qubits(&self) -> usize {
        self.sites.len()
    }

    fn supports(&self, kind: &GateKind) -> bool {
        !kind.is_channel()
    }

    fn apply_op(&mut self, op: &GateOp, _rng: &mut RngStream) -> Result<()> {
        match op.kind.matrix() {
            Some(GateMatrix::One(m)) => self.apply_single(op.support[0], &m),
            Some(GateMatrix::Two(m)) => self.apply_pair(op.support[0], op.support[1], &m),
            None if op.kind == GateKind::Measure => {}
            None => return Err(self.unsupported(&op.kind)),
        }
        Ok(())
    }

    fn probability(&self, bits: &BitString) -> f64 {
        self.amplitude(bits).norm_sqr()
    }
}
