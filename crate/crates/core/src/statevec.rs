//! Dense statevector storage and the in-place gate kernels.
//!
//! Qubit `i` is bit `i` of a basis index (qubit 0 is the least-significant bit).

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance on `Σ|c_j|² = 1` accepted by the checked constructors.
pub const NORM_TOL: f64 = 1e-12;
/// Imaginary parts below this are treated as zero when deciding `is_real`.
pub const REAL_TOL: f64 = 1e-14;
/// Largest register held densely.
pub const MAX_QUBITS: usize = 30;

const DUMP_MAGIC: &[u8; 6] = b"PSVEC1";

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    n_qubits: usize,
    is_real: bool,
}

impl StateVector {
    /// Build a state from amplitudes that are already normalized.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::pre(format!("state norm² = {norm}, expected 1")));
        }
        let is_real = amps.iter().all(|c| c.im.abs() < REAL_TOL);
        Ok(Self { amps, n_qubits, is_real })
    }

    /// Build a state from arbitrary nonzero amplitudes, rescaling to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::arg("cannot normalize a zero or non-finite vector"));
        }
        let inv = 1.0 / norm;
        for c in &mut amps {
            *c *= inv;
        }
        let is_real = amps.iter().all(|c| c.im.abs() < REAL_TOL);
        Ok(Self { amps, n_qubits, is_real })
    }

    pub fn from_real(amps: Vec<f64>) -> Result<Self> {
        Self::normalized(amps.into_iter().map(|a| C64::new(a, 0.0)).collect())
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let d = 1usize << n_qubits;
        if index >= d {
            return Err(Error::arg(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps, n_qubits, is_real: true })
    }

    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// `|+⟩^⊗N`.
    pub fn plus(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let d = 1usize << n_qubits;
        let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        Ok(Self { amps: vec![a; d], n_qubits, is_real: true })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn is_real(&self) -> bool {
        self.is_real
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::pre(format!("state norm² = {norm}, expected 1")));
        }
        Ok(())
    }

    /// Multiply every amplitude by `e^{iφ}`.
    pub fn apply_global_phase(&mut self, phi: f64) {
        let phase = C64::from_polar(1.0, phi);
        for c in &mut self.amps {
            *c *= phase;
        }
        self.refresh_realness();
    }

    /// `self ⊗ other`, with `self` on the low qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        check_qubits(self.n_qubits + other.n_qubits)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { amps, n_qubits: self.n_qubits + other.n_qubits, is_real: self.is_real && other.is_real })
    }

    /// Apply a two-qubit gate to qubits `(i, j)` in place.
    ///
    /// The gate's local basis index is `b_i + 2·b_j`, so `qubit_i` plays the
    /// role of the low bit.
    pub fn apply_two_qubit_gate(&mut self, gate: &TwoQubitGate, i: usize, j: usize) -> Result<()> {
        if i == j {
            return Err(Error::arg("two-qubit gate needs distinct qubits"));
        }
        if i >= self.n_qubits || j >= self.n_qubits {
            return Err(Error::arg(format!("qubits ({i}, {j}) out of range for {} qubits", self.n_qubits)));
        }
        if !gate.is_unitary(1e-10) {
            return Err(Error::pre("gate is not unitary within 1e-10"));
        }
        self.apply_two_qubit_unchecked(gate, i, j);
        Ok(())
    }

    pub(crate) fn apply_two_qubit_unchecked(&mut self, gate: &TwoQubitGate, i: usize, j: usize) {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let bi = 1usize << i;
        let bj = 1usize << j;
        let m = &gate.0;
        for k in 0..self.amps.len() >> 2 {
            let base = insert_zero_bit(insert_zero_bit(k, lo), hi);
            let idx = [base, base | bi, base | bj, base | bi | bj];
            let v = [self.amps[idx[0]], self.amps[idx[1]], self.amps[idx[2]], self.amps[idx[3]]];
            for (r, &out) in idx.iter().enumerate() {
                self.amps[out] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
        if !(self.is_real && gate.is_real()) {
            self.refresh_realness();
        }
    }

    /// Apply a single-qubit gate `[[a, b], [c, d]]` to `qubit`.
    pub fn apply_single_qubit_gate(&mut self, gate: &[[C64; 2]; 2], qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::arg(format!("qubit {qubit} out of range")));
        }
        let bit = 1usize << qubit;
        for k in 0..self.amps.len() >> 1 {
            let i0 = insert_zero_bit(k, qubit);
            let i1 = i0 | bit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = gate[0][0] * a0 + gate[0][1] * a1;
            self.amps[i1] = gate[1][0] * a0 + gate[1][1] * a1;
        }
        let real_gate = gate.iter().flatten().all(|c| c.im == 0.0);
        if !(self.is_real && real_gate) {
            self.refresh_realness();
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<()> {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_single_qubit_gate(&[[h, h], [h, -h]], qubit)
    }

    /// Phase gate `diag(1, i)`.
    pub fn apply_s(&mut self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::arg(format!("qubit {qubit} out of range")));
        }
        let bit = 1usize << qubit;
        for (idx, c) in self.amps.iter_mut().enumerate() {
            if idx & bit != 0 {
                *c = C64::new(-c.im, c.re);
            }
        }
        self.refresh_realness();
        Ok(())
    }

    pub fn apply_cz(&mut self, i: usize, j: usize) -> Result<()> {
        if i == j || i >= self.n_qubits || j >= self.n_qubits {
            return Err(Error::arg(format!("invalid CZ qubits ({i}, {j})")));
        }
        let mask = (1usize << i) | (1usize << j);
        for (idx, c) in self.amps.iter_mut().enumerate() {
            if idx & mask == mask {
                *c = -*c;
            }
        }
        Ok(())
    }

    fn refresh_realness(&mut self) {
        self.is_real = self.amps.iter().all(|c| c.im.abs() < REAL_TOL);
    }

    /// Write the binary dump: `"PSVEC1"`, two zero bytes, `N` as u64 LE, then
    /// interleaved little-endian `(re, im)` f64 pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&[0u8; 2])?;
        w.write_all(&(self.n_qubits as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.amps.len());
        for c in &self.amps {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..6] != DUMP_MAGIC {
            return Err(Error::Format("bad statevector magic".into()));
        }
        let n = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
        check_qubits(n).map_err(|_| Error::Format(format!("qubit count {n} out of range")))?;
        let d = 1usize << n;
        let mut buf = vec![0u8; 16 * d];
        r.read_exact(&mut buf)?;
        let amps = buf
            .chunks_exact(16)
            .map(|ch| {
                C64::new(
                    f64::from_le_bytes(ch[..8].try_into().unwrap()),
                    f64::from_le_bytes(ch[8..].try_into().unwrap()),
                )
            })
            .collect();
        Self::from_amplitudes(amps)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(f))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_binary(std::io::BufReader::new(f))
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::arg(format!("size mismatch: {} vs {}", a.dim(), b.dim())));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// A 4×4 complex matrix acting on a pair of qubits.
#[derive(Clone, Copy, PartialEq)]
pub struct TwoQubitGate(pub [[C64; 4]; 4]);

impl TwoQubitGate {
    pub fn identity() -> Self {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = C64::new(1.0, 0.0);
        }
        Self(m)
    }

    pub fn swap() -> Self {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[r][c] = C64::new(1.0, 0.0);
        }
        Self(m)
    }

    pub fn adjoint(&self) -> Self {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.0[c][r].conj();
            }
        }
        Self(m)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().flatten().all(|c| c.im == 0.0)
    }

    /// `max |(G†G)_{rc} − δ_{rc}| ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..4 {
                    acc += self.0[k][r].conj() * self.0[k][c];
                }
                let target = if r == c { 1.0 } else { 0.0 };
                if (acc - target).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for TwoQubitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[inline]
pub(crate) fn insert_zero_bit(k: usize, pos: usize) -> usize {
    let low = k & ((1usize << pos) - 1);
    ((k >> pos) << (pos + 1)) | low
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::arg(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
    }
    Ok(())
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::arg(format!("amplitude count {len} is not a power of two ≥ 2")));
    }
    let n = len.trailing_zeros() as usize;
    check_qubits(n)?;
    Ok(n)
}
