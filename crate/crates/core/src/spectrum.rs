//! Exact Pauli spectra, their moments ζ_q, and the entropies M_q and M̃_q.
//!
//! The full spectrum is produced by a fast Pauli transform. Writing
//! `P = i^{#Y} X^x Z^z`, the expectation is
//!
//! ```text
//! ⟨Ψ|P|Ψ⟩ = Re( i^{|x∧z|} Σ_j conj(c_{j⊕x}) c_j (−1)^{|j∧z|} ),
//! ```
//!
//! so for every X-pattern `x` the `2^N` values over `z` are one Walsh–Hadamard
//! transform of the `x`-th off-diagonal of `ρ = |Ψ⟩⟨Ψ|`. The whole spectrum
//! costs `O(N·4^N)` time with `O(2^N)` scratch per worker.

use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{expectation_unchecked, rotate_by_i_power, PauliString};
use crate::statevec::StateVector;

/// Largest N for which the `4^N` spectrum is enumerated.
pub const ENUMERATION_MAX_QUBITS: usize = 13;
/// Largest N for the naive `O(8^N)` per-string path.
pub const NAIVE_MAX_QUBITS: usize = 10;
/// Spectrum entries below this modulus are symmetry zeros.
pub const ZERO_TOL: f64 = 1e-12;

fn check_enumeration_size(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Capability(format!(
            "exact enumeration of 4^{n} Pauli expectations exceeds the N ≤ {cap} cap; use the sampler"
        )));
    }
    Ok(())
}

enum Scratch {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

struct RowTransform<'a> {
    state: &'a StateVector,
    re: Option<Vec<f64>>,
}

impl<'a> RowTransform<'a> {
    fn new(state: &'a StateVector) -> Self {
        let re = state.is_real().then(|| state.amplitudes().iter().map(|c| c.re).collect());
        Self { state, re }
    }

    fn scratch(&self) -> Scratch {
        match self.re {
            Some(_) => Scratch::Real(vec![0.0; self.state.dim()]),
            None => Scratch::Complex(vec![C64::new(0.0, 0.0); self.state.dim()]),
        }
    }

    /// Fill `out[z] = ⟨Ψ|P_{x,z}|Ψ⟩` for every `z`.
    fn row(&self, x: usize, scratch: &mut Scratch, out: &mut [f64]) {
        match (scratch, &self.re) {
            (Scratch::Real(buf), Some(re)) => {
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = re[j ^ x] * re[j];
                }
                walsh_hadamard_real(buf);
                for (z, (o, s)) in out.iter_mut().zip(buf.iter()).enumerate() {
                    *o = match (x & z).count_ones() % 4 {
                        0 => *s,
                        2 => -*s,
                        _ => 0.0,
                    };
                }
            }
            (Scratch::Complex(buf), None) => {
                let amps = self.state.amplitudes();
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = amps[j ^ x].conj() * amps[j];
                }
                walsh_hadamard_complex(buf);
                for (z, (o, s)) in out.iter_mut().zip(buf.iter()).enumerate() {
                    *o = rotate_by_i_power(*s, (x & z).count_ones()).re;
                }
            }
            _ => unreachable!("scratch kind matches state kind"),
        }
    }
}

fn walsh_hadamard_real(a: &mut [f64]) {
    let n = a.len();
    let mut h = 1;
    while h < n {
        for block in a.chunks_exact_mut(2 * h) {
            let (l, r) = block.split_at_mut(h);
            for (u, v) in l.iter_mut().zip(r.iter_mut()) {
                let (p, q) = (*u, *v);
                *u = p + q;
                *v = p - q;
            }
        }
        h *= 2;
    }
}

fn walsh_hadamard_complex(a: &mut [C64]) {
    let n = a.len();
    let mut h = 1;
    while h < n {
        for block in a.chunks_exact_mut(2 * h) {
            let (l, r) = block.split_at_mut(h);
            for (u, v) in l.iter_mut().zip(r.iter_mut()) {
                let (p, q) = (*u, *v);
                *u = p + q;
                *v = p - q;
            }
        }
        h *= 2;
    }
}

/// All `4^N` expectations, indexed by [`PauliString::spectrum_index`].
pub fn fast_pauli_transform(state: &StateVector) -> Result<Vec<f64>> {
    check_enumeration_size(state.n_qubits(), ENUMERATION_MAX_QUBITS)?;
    let d = state.dim();
    let tr = RowTransform::new(state);
    let mut out = vec![0.0; d * d];
    out.par_chunks_mut(d).enumerate().for_each_init(|| tr.scratch(), |scratch, (x, row)| tr.row(x, scratch, row));
    Ok(out)
}

/// Reduce every row of the spectrum with `f(x, values_over_z)` without
/// storing the spectrum. Results come back in row order.
pub fn map_spectrum_rows<R, F>(state: &StateVector, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize, &[f64]) -> R + Sync,
{
    check_enumeration_size(state.n_qubits(), ENUMERATION_MAX_QUBITS)?;
    let d = state.dim();
    let tr = RowTransform::new(state);
    Ok((0..d)
        .into_par_iter()
        .map_init(
            || (tr.scratch(), vec![0.0; d]),
            |(scratch, row), x| {
                tr.row(x, scratch, row);
                f(x, row)
            },
        )
        .collect())
}

/// The `O(8^N)` reference path: one [`expectation`](crate::pauli::expectation) per string.
pub fn naive_spectrum(state: &StateVector) -> Result<Vec<f64>> {
    check_enumeration_size(state.n_qubits(), NAIVE_MAX_QUBITS)?;
    state.check_normalized()?;
    let n = state.n_qubits();
    let d = state.dim();
    Ok((0..d * d)
        .into_par_iter()
        .map(|k| {
            let p = PauliString::from_masks_unchecked(n, (k >> n) as u64, (k & (d - 1)) as u64);
            expectation_unchecked(state, &p)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumData {
    /// All `4^N` values in spectrum-index order.
    Exact(Vec<f64>),
    /// Importance-reweighted histogram from the sampler.
    Sampled(Histogram),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliSpectrum {
    n_qubits: usize,
    is_real: bool,
    data: SpectrumData,
}

impl PauliSpectrum {
    pub fn exact(n_qubits: usize, is_real: bool, values: Vec<f64>) -> Result<Self> {
        let d = 1usize << n_qubits;
        if values.len() != d * d {
            return Err(Error::arg(format!("expected {} values, got {}", d * d, values.len())));
        }
        Ok(Self { n_qubits, is_real, data: SpectrumData::Exact(values) })
    }

    pub fn sampled(n_qubits: usize, is_real: bool, histogram: Histogram) -> Self {
        Self { n_qubits, is_real, data: SpectrumData::Sampled(histogram) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn mode(&self) -> SpectrumMode {
        match self.data {
            SpectrumData::Exact(_) => SpectrumMode::Exact,
            SpectrumData::Sampled(_) => SpectrumMode::Sampled,
        }
    }

    pub fn data(&self) -> &SpectrumData {
        &self.data
    }

    pub fn exact_values(&self) -> Option<&[f64]> {
        match &self.data {
            SpectrumData::Exact(v) => Some(v),
            SpectrumData::Sampled(_) => None,
        }
    }

    pub fn value(&self, p: &PauliString) -> Option<f64> {
        self.exact_values().map(|v| v[p.spectrum_index()])
    }

    /// Non-identity values, optionally without the `|x| < ZERO_TOL` entries.
    pub fn regular_values(&self, drop_zeros: bool) -> Option<Vec<f64>> {
        self.exact_values().map(|v| v[1..].iter().copied().filter(|x| !drop_zeros || x.abs() >= ZERO_TOL).collect())
    }
}

/// Exact spectrum of `state` via the fast transform.
pub fn enumerate_spectrum(state: &StateVector) -> Result<PauliSpectrum> {
    state.check_normalized()?;
    let values = fast_pauli_transform(state)?;
    PauliSpectrum::exact(state.n_qubits(), state.is_real(), values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Enumeration,
    FastTransform,
    Sampler,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub q: f64,
    /// ζ_q
    pub zeta: f64,
    /// M_q
    #[serde(rename = "M")]
    pub m: f64,
    /// ζ̃_q
    pub zeta_filtered: f64,
    /// M̃_q
    #[serde(rename = "M_filtered")]
    pub m_filtered: f64,
    pub method: Method,
    pub n_qubits: usize,
    pub seed: Option<u64>,
}

impl EntropyReport {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// `x^{2q}` given `x²`, with integer and half-integer orders kept exact.
#[inline]
pub(crate) fn pow_q(x2: f64, q: f64) -> f64 {
    if q.fract() == 0.0 && q <= 64.0 {
        x2.powi(q as i32)
    } else if (2.0 * q).fract() == 0.0 && q <= 64.0 {
        x2.sqrt().powi((2.0 * q) as i32)
    } else {
        x2.powf(q)
    }
}

#[inline]
fn xlogx2(x2: f64) -> f64 {
    if x2 > 0.0 {
        x2 * x2.log2()
    } else {
        0.0
    }
}

/// Running sums that determine ζ_q and ζ̃_q for a fixed list of orders.
#[derive(Clone, Debug)]
pub struct MomentSums {
    qs: Vec<f64>,
    /// per q: Σ over all strings of x^{2q} (q ≠ 1) or x² log₂ x² (q = 1)
    all: Vec<f64>,
    /// same, without the identity
    filtered: Vec<f64>,
    /// Σ_{P≠I} x²
    filtered_norm: f64,
    /// Σ_P x²
    norm: f64,
}

impl MomentSums {
    pub fn new(qs: &[f64]) -> Result<Self> {
        if let Some(q) = qs.iter().find(|q| !(**q > 0.0) || !q.is_finite()) {
            return Err(Error::arg(format!("Rényi order must be positive and finite, got {q}")));
        }
        Ok(Self {
            qs: qs.to_vec(),
            all: vec![0.0; qs.len()],
            filtered: vec![0.0; qs.len()],
            filtered_norm: 0.0,
            norm: 0.0,
        })
    }

    /// Accumulate values; `contains_identity` marks `values[0]` as ⟨I⟩.
    pub fn add(&mut self, values: &[f64], contains_identity: bool) {
        let (identity, rest) = if contains_identity { (values.first().copied(), &values[1..]) } else { (None, values) };
        for (k, &q) in self.qs.iter().enumerate() {
            let s: f64 = if q == 1.0 {
                rest.iter().map(|x| xlogx2(x * x)).sum()
            } else {
                rest.iter().map(|x| pow_q(x * x, q)).sum()
            };
            let id = identity.map_or(0.0, |x| if q == 1.0 { xlogx2(x * x) } else { pow_q(x * x, q) });
            self.filtered[k] += s;
            self.all[k] += s + id;
        }
        let rest_norm = rest.iter().map(|x| x * x).sum::<f64>();
        self.filtered_norm += rest_norm;
        self.norm += rest_norm + identity.map_or(0.0, |x| x * x);
    }

    pub fn merge(&mut self, other: &MomentSums) {
        for k in 0..self.qs.len() {
            self.all[k] += other.all[k];
            self.filtered[k] += other.filtered[k];
        }
        self.filtered_norm += other.filtered_norm;
        self.norm += other.norm;
    }

    pub fn reports(&self, n_qubits: usize, method: Method) -> Vec<EntropyReport> {
        let d = (1usize << n_qubits) as f64;
        let dm1 = d - 1.0;
        self.qs
            .iter()
            .enumerate()
            .map(|(k, &q)| {
                if q == 1.0 {
                    // Shannon limits; ζ₁ and ζ̃₁ are the normalizations.
                    let m = -self.all[k] / d;
                    let m_filtered = if dm1 > 0.0 {
                        -self.filtered[k] / dm1 + dm1.log2() * (self.filtered_norm / dm1) - dm1.log2()
                    } else {
                        0.0
                    };
                    EntropyReport {
                        q,
                        zeta: self.norm / d,
                        m,
                        zeta_filtered: self.filtered_norm / dm1,
                        m_filtered,
                        method,
                        n_qubits,
                        seed: None,
                    }
                } else {
                    let zeta = self.all[k] / d;
                    let zeta_filtered = self.filtered[k] / dm1;
                    EntropyReport {
                        q,
                        zeta,
                        m: zeta.log2() / (1.0 - q),
                        zeta_filtered,
                        m_filtered: zeta_filtered.log2() / (1.0 - q),
                        method,
                        n_qubits,
                        seed: None,
                    }
                }
            })
            .collect()
    }
}

/// Entropies of an exact spectrum at order `q`.
pub fn entropies(spectrum: &PauliSpectrum, q: f64) -> Result<EntropyReport> {
    Ok(entropies_many(spectrum, &[q])?.remove(0))
}

pub fn entropies_many(spectrum: &PauliSpectrum, qs: &[f64]) -> Result<Vec<EntropyReport>> {
    let values = spectrum
        .exact_values()
        .ok_or_else(|| Error::arg("entropies need an exact spectrum; use the sampler estimators"))?;
    let mut sums = MomentSums::new(qs)?;
    let d = spectrum.dim();
    // fixed-order reduction: one partial per X-row, merged in row order
    let partials: Vec<MomentSums> = values
        .par_chunks(d)
        .enumerate()
        .map(|(x, row)| {
            let mut s = MomentSums::new(qs).expect("orders validated");
            s.add(row, x == 0);
            s
        })
        .collect();
    for p in &partials {
        sums.merge(p);
    }
    Ok(sums.reports(spectrum.n_qubits(), Method::Enumeration))
}

/// Entropies of `state` straight from the fast transform, without storing
/// the `4^N` spectrum.
pub fn state_entropies(state: &StateVector, qs: &[f64]) -> Result<Vec<EntropyReport>> {
    state.check_normalized()?;
    MomentSums::new(qs)?;
    let partials = map_spectrum_rows(state, |x, row| {
        let mut s = MomentSums::new(qs).expect("orders validated");
        s.add(row, x == 0);
        s
    })?;
    let mut sums = MomentSums::new(qs)?;
    for p in &partials {
        sums.merge(p);
    }
    Ok(sums.reports(state.n_qubits(), Method::FastTransform))
}

/// A Dirac component of the spectrum distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub x: f64,
    pub weight: f64,
}

/// Binned density of the regular part of a spectrum plus its point masses.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub density: Vec<f64>,
    /// Raw number of entries (strings or chain records) per bin.
    pub counts: Vec<u64>,
    pub point_masses: Vec<PointMass>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramOptions {
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
    /// Report `|x| < ZERO_TOL` entries as a point mass at 0.
    pub separate_zeros: bool,
}

impl Default for HistogramOptions {
    fn default() -> Self {
        Self { bins: 101, lo: -1.0, hi: 1.0, separate_zeros: true }
    }
}

impl HistogramOptions {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 10 {
            return Err(Error::arg(format!("need at least 10 bins, got {}", self.bins)));
        }
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::arg(format!("empty histogram range [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }
}

impl Histogram {
    pub fn empty(opts: &HistogramOptions) -> Result<Self> {
        opts.validate()?;
        Ok(Self {
            lo: opts.lo,
            hi: opts.hi,
            density: vec![0.0; opts.bins],
            counts: vec![0; opts.bins],
            point_masses: Vec::new(),
        })
    }

    pub fn bins(&self) -> usize {
        self.density.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..self.bins()).map(|k| self.lo + (k as f64 + 0.5) * w).collect()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if x < self.lo || x > self.hi {
            return None;
        }
        let k = ((x - self.lo) / self.bin_width()) as usize;
        Some(k.min(self.bins() - 1))
    }

    /// Add `weight` of probability mass at `x` (density is mass per unit x).
    pub fn add_mass(&mut self, x: f64, weight: f64) {
        if let Some(k) = self.bin_of(x) {
            self.density[k] += weight / self.bin_width();
            self.counts[k] += 1;
        }
    }

    pub fn add_point_mass(&mut self, x: f64, weight: f64) {
        match self.point_masses.iter_mut().find(|p| p.x == x) {
            Some(p) => p.weight += weight,
            None => {
                self.point_masses.push(PointMass { x, weight });
                self.point_masses.sort_by(|a, b| a.x.total_cmp(&b.x));
            }
        }
    }

    pub fn regular_mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width()
    }

    pub fn point_mass_at(&self, x: f64) -> f64 {
        self.point_masses.iter().filter(|p| p.x == x).map(|p| p.weight).sum()
    }

    /// CSV with header `bin_center,density`; point masses follow as
    /// `# delta,x,weight` comment lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "bin_center,density")?;
        for (c, v) in self.bin_centers().iter().zip(&self.density) {
            writeln!(w, "{c},{v}")?;
        }
        for p in &self.point_masses {
            writeln!(w, "# delta,{},{}", p.x, p.weight)?;
        }
        Ok(())
    }
}

/// Bin an exact spectrum. Every string carries weight `1/d²`; the identity,
/// entries at `±1` and (optionally) symmetry zeros become point masses.
pub fn histogram(spectrum: &PauliSpectrum, opts: &HistogramOptions) -> Result<Histogram> {
    opts.validate()?;
    match spectrum.data() {
        SpectrumData::Sampled(h) => {
            if h.bins() == opts.bins && h.lo == opts.lo && h.hi == opts.hi {
                Ok(h.clone())
            } else {
                Err(Error::arg("a sampled spectrum cannot be re-binned"))
            }
        }
        SpectrumData::Exact(values) => {
            let d = spectrum.dim() as f64;
            let w = 1.0 / (d * d);
            let mut h = Histogram::empty(opts)?;
            let (mut at_one, mut at_minus_one, mut at_zero) = (w, 0.0, 0.0);
            for &x in &values[1..] {
                if (x - 1.0).abs() < ZERO_TOL {
                    at_one += w;
                } else if (x + 1.0).abs() < ZERO_TOL {
                    at_minus_one += w;
                } else if opts.separate_zeros && x.abs() < ZERO_TOL {
                    at_zero += w;
                } else {
                    h.add_mass(x, w);
                }
            }
            for (x, m) in [(-1.0, at_minus_one), (0.0, at_zero), (1.0, at_one)] {
                if m > 0.0 {
                    h.add_point_mass(x, m);
                }
            }
            Ok(h)
        }
    }
}
