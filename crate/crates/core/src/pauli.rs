//! Pauli strings in symplectic `(x_mask, z_mask)` form and the O(d)
//! expectation-value kernel.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::StateVector;

/// Longest string representable with `u64` masks.
pub const MAX_PAULI_QUBITS: usize = 63;

/// Single-site Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A phase-free Pauli string on `n_qubits` qubits.
///
/// Bit `i` of `x_mask` (`z_mask`) marks an X (Z) factor on qubit `i`; both bits
/// set means Y. Operators are always taken as their Hermitian representative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    x_mask: u64,
    z_mask: u64,
    n_qubits: usize,
}

impl PauliString {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_PAULI_QUBITS {
            return Err(Error::arg(format!("qubit count {n_qubits} outside 1..={MAX_PAULI_QUBITS}")));
        }
        let full = (1u64 << n_qubits) - 1;
        if (x_mask | z_mask) & !full != 0 {
            return Err(Error::arg(format!("masks exceed {n_qubits} qubits")));
        }
        Ok(Self { x_mask, z_mask, n_qubits })
    }

    #[inline]
    pub(crate) fn from_masks_unchecked(n_qubits: usize, x_mask: u64, z_mask: u64) -> Self {
        Self { x_mask, z_mask, n_qubits }
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 0, 0)
    }

    /// A single-site operator at 0-based `site`.
    pub fn single(n_qubits: usize, site: usize, op: Pauli) -> Result<Self> {
        Self::from_sites(n_qubits, &[(site, op)])
    }

    /// Build from `(0-based site, operator)` pairs. Repeated sites are an error.
    pub fn from_sites(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        let mut seen = 0u64;
        for &(site, op) in ops {
            if site >= n_qubits {
                return Err(Error::arg(format!("site {site} out of range for {n_qubits} qubits")));
            }
            if seen & (1 << site) != 0 {
                return Err(Error::arg(format!("site {site} given twice")));
            }
            seen |= 1 << site;
            let (bx, bz) = op.bits();
            x |= (bx as u64) << site;
            z |= (bz as u64) << site;
        }
        Self::new(n_qubits, x, z)
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn op_at(&self, site: usize) -> Pauli {
        Pauli::from_bits(self.x_mask >> site & 1 == 1, self.z_mask >> site & 1 == 1)
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    #[inline]
    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// Parity of the number of Y factors. Odd strings are antisymmetric
    /// (`P^T = −P`) and vanish on every real state.
    pub fn y_parity(&self) -> Parity {
        if self.y_count() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Product of two strings with the global phase discarded.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::arg(format!(
                "cannot multiply strings on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(Self { x_mask: self.x_mask ^ other.x_mask, z_mask: self.z_mask ^ other.z_mask, n_qubits: self.n_qubits })
    }

    /// Dense index `x_mask · 2^N + z_mask` into a `4^N` spectrum array.
    #[inline]
    pub fn spectrum_index(&self) -> usize {
        ((self.x_mask as usize) << self.n_qubits) | self.z_mask as usize
    }

    pub fn from_spectrum_index(n_qubits: usize, index: usize) -> Result<Self> {
        let d = 1usize << n_qubits;
        if index >= d * d {
            return Err(Error::arg(format!("spectrum index {index} out of range")));
        }
        Self::new(n_qubits, (index >> n_qubits) as u64, (index & (d - 1)) as u64)
    }

    /// The same operator placed `shift` sites to the right.
    pub fn translated(&self, shift: usize) -> Result<PauliString> {
        let support = self.x_mask | self.z_mask;
        if shift >= 64 || (support != 0 && 64 - support.leading_zeros() as usize + shift > self.n_qubits) {
            return Err(Error::arg(format!("translation by {shift} leaves the chain")));
        }
        Ok(Self { x_mask: self.x_mask << shift, z_mask: self.z_mask << shift, n_qubits: self.n_qubits })
    }

    /// Parse the textual form `"X1 Z3 Y4"` (1-based sites; `"I"` is the identity).
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("I") || text.is_empty() {
            return Self::identity(n_qubits);
        }
        let mut ops = Vec::new();
        for token in text.split_whitespace() {
            let mut chars = token.chars();
            let op = match chars.next().map(|c| c.to_ascii_uppercase()) {
                Some('X') => Pauli::X,
                Some('Y') => Pauli::Y,
                Some('Z') => Pauli::Z,
                Some('I') => Pauli::I,
                _ => return Err(Error::arg(format!("bad Pauli token {token:?}"))),
            };
            let site: usize = chars.as_str().parse().map_err(|_| Error::arg(format!("bad site in token {token:?}")))?;
            if site == 0 {
                return Err(Error::arg("sites are 1-based"));
            }
            if op != Pauli::I {
                ops.push((site - 1, op));
            }
        }
        Self::from_sites(n_qubits, &ops)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for site in 0..self.n_qubits {
            let op = self.op_at(site);
            if op != Pauli::I {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}{}", op.symbol(), site + 1)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self}; n={})", self.n_qubits)
    }
}

/// `⟨Ψ|P|Ψ⟩` for the Hermitian representative of `p`.
pub fn expectation(state: &StateVector, p: &PauliString) -> Result<f64> {
    if state.n_qubits() != p.n_qubits() {
        return Err(Error::arg(format!("state has {} qubits, string has {}", state.n_qubits(), p.n_qubits())));
    }
    state.check_normalized()?;
    Ok(expectation_unchecked(state, p))
}

/// Kernel behind [`expectation`]; the caller guarantees matching sizes.
///
/// With `P|j⟩ = i^{#Y} (−1)^{|j∧z|} |j⊕x⟩` the expectation is
/// `Re(i^{#Y} Σ_j conj(c_{j⊕x}) c_j (−1)^{|j∧z|})`.
#[inline]
pub fn expectation_unchecked(state: &StateVector, p: &PauliString) -> f64 {
    let amps = state.amplitudes();
    let x = p.x_mask() as usize;
    let z = p.z_mask() as usize;
    if state.is_real() {
        if p.y_count() % 2 == 1 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (j, c) in amps.iter().enumerate() {
            let term = amps[j ^ x].re * c.re;
            if (j & z).count_ones() & 1 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        return if p.y_count() % 4 == 0 { acc } else { -acc };
    }
    let mut acc = C64::new(0.0, 0.0);
    for (j, c) in amps.iter().enumerate() {
        let term = amps[j ^ x].conj() * c;
        if (j & z).count_ones() & 1 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    rotate_by_i_power(acc, p.y_count()).re
}

/// `i^k · c`.
#[inline]
pub(crate) fn rotate_by_i_power(c: C64, k: u32) -> C64 {
    match k % 4 {
        0 => c,
        1 => C64::new(-c.im, c.re),
        2 => -c,
        _ => C64::new(c.im, -c.re),
    }
}
