//! Mixed-field Ising chains, mid-spectrum eigenstates, level statistics and
//! local-observable (ETH) statistics.
//!
//! ```text
//! H = Σ_i g X_i + Σ_i h_i Z_i + Σ_i J Z_i Z_{i+1}      (open chain)
//!   [+ Y_{N−2} Z_{N−1} + Y_{N−1} Z_N]                   (breaks time reversal)
//! ```
//!
//! with `h_1` replaced by an override and `h_i += w_i`, `w_i ~ U[−W, W]`.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensembles::{derive_seed, rng_from_seed, Group};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, eigh_window, HermitianMatrix};
use crate::pauli::{Pauli, PauliString};
use crate::spectrum::state_entropies;
use crate::statevec::StateVector;
use crate::stats::{linear_fit, mean, std_error, variance, LinearFit};

/// Largest chain handled by dense diagonalization.
pub const DENSE_MAX_QUBITS: usize = 14;
/// Eigenvector residual bound `‖Hv − Ev‖`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Fewest levels accepted by [`gap_ratio`].
pub const MIN_GAP_RATIO_LEVELS: usize = 100;
/// Widest translatable pattern accepted by [`eth_local_statistics`].
pub const MAX_PATTERN_WIDTH: usize = 4;
/// Mean gap ratio of uncorrelated levels, `2 ln 2 − 1`.
pub const POISSON_GAP_RATIO: f64 = 2.0 * std::f64::consts::LN_2 - 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainBoundary {
    #[default]
    Open,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n_qubits: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub g: f64,
    pub h_bulk: f64,
    /// Field on the first site; `None` means `−J`.
    pub h1_override: Option<f64>,
    pub tri_breaking: bool,
    #[serde(rename = "disorder_W")]
    pub disorder_w: f64,
    #[serde(default)]
    pub boundary: ChainBoundary,
    pub seed: u64,
}

impl HamiltonianSpec {
    /// Clean chain with the default couplings `J = 1`, `g = (√5+5)/8`,
    /// `h = (√5+1)/4`, `h_1 = −J`.
    pub fn new(n_qubits: usize) -> Self {
        let s5 = 5f64.sqrt();
        Self {
            n_qubits,
            j: 1.0,
            g: (s5 + 5.0) / 8.0,
            h_bulk: (s5 + 1.0) / 4.0,
            h1_override: None,
            tri_breaking: false,
            disorder_w: 0.0,
            boundary: ChainBoundary::Open,
            seed: 0,
        }
    }

    pub fn with_tri_breaking(mut self, on: bool) -> Self {
        self.tri_breaking = on;
        self
    }

    pub fn with_disorder(mut self, w: f64, seed: u64) -> Self {
        self.disorder_w = w;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n < 2 {
            return Err(Error::arg(format!("need at least 2 sites, got {n}")));
        }
        if self.tri_breaking && n < 4 {
            return Err(Error::arg("the time-reversal breaking term needs N ≥ 4"));
        }
        if n > DENSE_MAX_QUBITS {
            return Err(Error::Capability(format!(
                "N = {n} exceeds the dense diagonalization cap of {DENSE_MAX_QUBITS}"
            )));
        }
        if !(self.disorder_w >= 0.0) || !self.disorder_w.is_finite() {
            return Err(Error::arg(format!("disorder strength must be ≥ 0, got {}", self.disorder_w)));
        }
        let h1 = self.h1_override.unwrap_or(0.0);
        if ![self.j, self.g, self.h_bulk, h1].iter().all(|v| v.is_finite()) {
            return Err(Error::arg("couplings must be finite"));
        }
        Ok(())
    }

    /// On-site longitudinal fields including the override and disorder.
    pub fn fields(&self) -> Vec<f64> {
        let mut h = vec![self.h_bulk; self.n_qubits];
        h[0] = self.h1_override.unwrap_or(-self.j);
        if self.disorder_w > 0.0 {
            let mut rng = rng_from_seed(self.seed);
            for hi in &mut h {
                *hi += rng.gen_range(-self.disorder_w..=self.disorder_w);
            }
        }
        h
    }
}

/// `Σ_k c_k P_k` with real coefficients, hence Hermitian.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseOperator {
    pub n_qubits: usize,
    pub terms: Vec<(f64, PauliString)>,
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// True when every term is real in the computational basis.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.y_count() % 2 == 0)
    }

    pub fn mean_energy(&self) -> f64 {
        self.terms.iter().filter(|(_, p)| p.is_identity()).map(|(c, _)| c).sum()
    }

    /// `H|v⟩` without forming the matrix.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (c, p) in &self.terms {
            let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
            let phase = crate::pauli::rotate_by_i_power(C64::new(*c, 0.0), p.y_count());
            for (j, a) in v.iter().enumerate() {
                let s = if (j & z).count_ones() % 2 == 0 { phase } else { -phase };
                out[j ^ x] += s * a;
            }
        }
        out
    }

    /// Dense column-major matrix, real when possible, checked Hermitian to 1e−12.
    pub fn to_dense(&self) -> Result<HermitianMatrix> {
        let d = self.dim();
        let m = if self.is_real() {
            let mut a = vec![0.0; d * d];
            for (c, p) in &self.terms {
                let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
                let c = if p.y_count() % 4 == 2 { -c } else { *c };
                for j in 0..d {
                    a[j * d + (j ^ x)] += if (j & z).count_ones() % 2 == 0 { c } else { -c };
                }
            }
            HermitianMatrix::Real { n: d, a }
        } else {
            let mut a = vec![C64::new(0.0, 0.0); d * d];
            for (c, p) in &self.terms {
                let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
                let phase = crate::pauli::rotate_by_i_power(C64::new(*c, 0.0), p.y_count());
                for j in 0..d {
                    a[j * d + (j ^ x)] += if (j & z).count_ones() % 2 == 0 { phase } else { -phase };
                }
            }
            HermitianMatrix::Complex { n: d, a }
        };
        let defect = m.hermiticity_defect();
        if defect > 1e-12 {
            return Err(Error::Invariant(format!("Hamiltonian not Hermitian: defect {defect}")));
        }
        Ok(m)
    }
}

/// The Ising chain of `spec` as a list of Pauli terms.
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<SparseOperator> {
    spec.validate()?;
    let n = spec.n_qubits;
    let mut terms = Vec::new();
    let push = |terms: &mut Vec<(f64, PauliString)>, c: f64, ops: &[(usize, Pauli)]| -> Result<()> {
        if c != 0.0 {
            terms.push((c, PauliString::from_sites(n, ops)?));
        }
        Ok(())
    };
    for i in 0..n {
        push(&mut terms, spec.g, &[(i, Pauli::X)])?;
    }
    for (i, h) in spec.fields().into_iter().enumerate() {
        push(&mut terms, h, &[(i, Pauli::Z)])?;
    }
    for i in 0..n - 1 {
        push(&mut terms, spec.j, &[(i, Pauli::Z), (i + 1, Pauli::Z)])?;
    }
    if spec.tri_breaking {
        push(&mut terms, 1.0, &[(n - 3, Pauli::Y), (n - 2, Pauli::Z)])?;
        push(&mut terms, 1.0, &[(n - 2, Pauli::Y), (n - 1, Pauli::Z)])?;
    }
    Ok(SparseOperator { n_qubits: n, terms })
}

/// Where "mid-spectrum" is anchored.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Center {
    /// `tr H / d`.
    #[default]
    MeanEnergy,
    /// `(E_min + E_max)/2`.
    Midpoint,
    Energy(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct EigenSelection {
    /// Retained eigenstates; `None` means `min(d/10, 1000)`.
    pub n_ev: Option<usize>,
    #[serde(default)]
    pub center: Center,
}

impl EigenSelection {
    pub fn with_count(n_ev: usize) -> Self {
        Self { n_ev: Some(n_ev), center: Center::MeanEnergy }
    }

    pub fn centered(mut self, center: Center) -> Self {
        self.center = center;
        self
    }

    pub fn resolved_count(&self, d: usize) -> Result<usize> {
        let n = self.n_ev.unwrap_or((d / 10).clamp(1, 1000));
        if n == 0 || n > d {
            return Err(Error::arg(format!("n_ev = {n} outside 1..={d}")));
        }
        Ok(n)
    }
}

/// Start of the `count` ascending energies nearest `center`; ties go to the
/// lower index.
pub fn nearest_window(sorted: &[f64], center: f64, count: usize) -> usize {
    let mut lo = sorted.partition_point(|&e| e < center);
    let mut hi = lo;
    while hi - lo < count {
        let take_left = lo > 0 && (hi == sorted.len() || center - sorted[lo - 1] <= sorted[hi] - center);
        if take_left {
            lo -= 1;
        } else {
            hi += 1;
        }
    }
    lo
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenstates {
    pub energies: Vec<f64>,
    pub states: Vec<StateVector>,
    /// The full ascending spectrum.
    pub all_energies: Vec<f64>,
    pub center: f64,
}

/// Dense diagonalization followed by extraction of the eigenstates nearest
/// the selection center. Every returned pair is checked against
/// `‖Hv − Ev‖ < 1e−8`.
pub fn mid_spectrum_eigenstates(spec: &HamiltonianSpec, selection: &EigenSelection) -> Result<Eigenstates> {
    let h = build_hamiltonian(spec)?;
    let d = h.dim();
    let count = selection.resolved_count(d)?;
    let mut center = 0.0;
    let res = eigh_window(h.to_dense()?, |all| {
        center = match selection.center {
            Center::MeanEnergy => h.mean_energy(),
            Center::Midpoint => 0.5 * (all[0] + all[all.len() - 1]),
            Center::Energy(e) => e,
        };
        (nearest_window(all, center, count), count)
    })?;
    let mut states = Vec::with_capacity(count);
    for (k, &e) in res.energies.iter().enumerate() {
        let v = res.vector(k);
        let hv = h.apply(&v);
        let r = hv.iter().zip(&v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
        if r >= RESIDUAL_TOL {
            return Err(Error::Invariant(format!("eigenpair {k} has residual {r}")));
        }
        states.push(if h.is_real() {
            StateVector::from_real(v.iter().map(|c| c.re).collect())?
        } else {
            StateVector::normalized(v)?
        });
    }
    Ok(Eigenstates { energies: res.energies, states, all_energies: res.all_eigenvalues, center })
}

/// Full ascending spectrum of `spec`.
pub fn hamiltonian_eigenvalues(spec: &HamiltonianSpec) -> Result<Vec<f64>> {
    eigenvalues(build_hamiltonian(spec)?.to_dense()?)
}

/// Middle half of an ascending spectrum.
pub fn spectral_bulk(sorted: &[f64]) -> &[f64] {
    let n = sorted.len();
    &sorted[n / 4..n - n / 4]
}

/// Mean of `r_n = min(δ_n, δ_{n+1})/max(δ_n, δ_{n+1})` over consecutive gaps.
pub fn gap_ratio(energies: &[f64]) -> Result<f64> {
    if energies.len() < MIN_GAP_RATIO_LEVELS {
        return Err(Error::arg(format!("need at least {MIN_GAP_RATIO_LEVELS} levels, got {}", energies.len())));
    }
    let mut e = energies.to_vec();
    e.sort_by(f64::total_cmp);
    let scale = (e[e.len() - 1] - e[0]).abs().max(f64::MIN_POSITIVE);
    let gaps: Vec<f64> = e.windows(2).map(|w| w[1] - w[0]).collect();
    if let Some(k) = gaps.iter().position(|&g| g <= 1e-13 * scale) {
        return Err(Error::Degenerate(format!("levels {k} and {} coincide at {}", k + 1, e[k])));
    }
    let rs: Vec<f64> = gaps.windows(2).map(|g| g[0].min(g[1]) / g[0].max(g[1])).collect();
    Ok(mean(&rs))
}

/// Gap ratio reference from `samples` Gaussian random matrices of size `dim`:
/// real symmetric (orthogonal class) or complex Hermitian (unitary class),
/// using the middle half of each spectrum.
pub fn random_matrix_gap_ratio(group: Group, dim: usize, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::arg("need at least one sample"));
    }
    let mut total = 0.0;
    for s in 0..samples as u64 {
        let mut rng = rng_from_seed(derive_seed(seed, s));
        let mut normal = || -> f64 { rng.sample(rand_distr::StandardNormal) };
        let m = match group {
            Group::Orthogonal => {
                let mut a = vec![0.0; dim * dim];
                for c in 0..dim {
                    for r in c..dim {
                        let v = if r == c { 2f64.sqrt() * normal() } else { normal() };
                        a[c * dim + r] = v;
                        a[r * dim + c] = v;
                    }
                }
                HermitianMatrix::Real { n: dim, a }
            }
            Group::Unitary => {
                let mut a = vec![C64::new(0.0, 0.0); dim * dim];
                for c in 0..dim {
                    for r in c..dim {
                        let v =
                            if r == c { C64::new(normal(), 0.0) } else { C64::new(normal(), normal()) / 2f64.sqrt() };
                        a[c * dim + r] = v;
                        a[r * dim + c] = v.conj();
                    }
                }
                HermitianMatrix::Complex { n: dim, a }
            }
        };
        total += gap_ratio(spectral_bulk(&eigenvalues(m)?))?;
    }
    Ok(total / samples as f64)
}

/// Pooled statistics of a local expectation value at one chain length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EthSize {
    pub n_qubits: usize,
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EthReport {
    pub sizes: Vec<EthSize>,
    /// Fit of `log₂ std` against `N`; the slope is the decay exponent.
    pub log2_std_fit: Option<LinearFit>,
}

/// Expectations of `pattern` translated over sites `3..=N−3` (1-based, the
/// pattern's first site), pooled over each family of eigenstates. `pattern`
/// may be written on any number of qubits; only its support matters.
pub fn eth_local_statistics(families: &[Vec<StateVector>], pattern: &PauliString) -> Result<EthReport> {
    let support = pattern.x_mask() | pattern.z_mask();
    if support == 0 {
        return Err(Error::arg("the identity is not a local pattern"));
    }
    let offset = support.trailing_zeros();
    let width = (64 - support.leading_zeros() - offset) as usize;
    if width > MAX_PATTERN_WIDTH {
        return Err(Error::arg(format!("pattern spans {width} sites; at most {MAX_PATTERN_WIDTH} allowed")));
    }
    let (px, pz) = (pattern.x_mask() >> offset, pattern.z_mask() >> offset);
    let mut sizes = Vec::new();
    for family in families {
        let Some(first) = family.first() else {
            return Err(Error::arg("empty eigenstate family"));
        };
        let n = first.n_qubits();
        if family.iter().any(|s| s.n_qubits() != n) {
            return Err(Error::arg("a family mixes chain lengths"));
        }
        let starts: Vec<usize> = (2..n.saturating_sub(3)).filter(|i| i + width <= n).collect();
        if starts.is_empty() {
            return Err(Error::arg(format!("no bulk sites for a width-{width} pattern at N = {n}")));
        }
        let mut values = Vec::with_capacity(family.len() * starts.len());
        for state in family {
            for &i in &starts {
                let p = PauliString::new(n, px << i, pz << i)?;
                values.push(crate::pauli::expectation(state, &p)?);
            }
        }
        sizes.push(EthSize { n_qubits: n, mean: mean(&values), std: variance(&values).sqrt(), samples: values.len() });
    }
    let log2_std_fit = if sizes.len() >= 2 && sizes.iter().all(|s| s.std > 0.0) {
        let xs: Vec<f64> = sizes.iter().map(|s| s.n_qubits as f64).collect();
        let ys: Vec<f64> = sizes.iter().map(|s| s.std.log2()).collect();
        Some(linear_fit(&xs, &ys)?)
    } else {
        None
    };
    Ok(EthReport { sizes, log2_std_fit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderScanConfig {
    /// Chain template; its disorder strength is overridden by each `W`.
    pub template: HamiltonianSpec,
    #[serde(rename = "W")]
    pub ws: Vec<f64>,
    pub qs: Vec<f64>,
    pub realizations: usize,
    /// Eigenstates per realization, capped at `d`.
    pub n_ev: usize,
    #[serde(default)]
    pub center: Center,
}

impl DisorderScanConfig {
    pub fn new(template: HamiltonianSpec, ws: Vec<f64>, qs: Vec<f64>, realizations: usize) -> Self {
        Self { template, ws, qs, realizations, n_ev: 100, center: Center::MeanEnergy }
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations < 10 {
            return Err(Error::arg(format!("need at least 10 realizations, got {}", self.realizations)));
        }
        if self.ws.is_empty() || self.qs.is_empty() {
            return Err(Error::arg("W and q lists must be nonempty"));
        }
        if self.n_ev == 0 {
            return Err(Error::arg("n_ev must be at least 1"));
        }
        for &w in &self.ws {
            self.template.clone().with_disorder(w, 0).validate()?;
        }
        if let Some(q) = self.qs.iter().find(|q| !(**q > 0.0)) {
            return Err(Error::arg(format!("Rényi order must be positive, got {q}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(rename = "W")]
    pub w: f64,
    pub q: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// `M̃_q/N` averaged over eigenstates and realizations.
    pub fse_density: f64,
    /// Standard error across realization means.
    pub std_error: f64,
    pub realizations: usize,
}

/// Per-realization mean `M̃_q/N` over mid-spectrum eigenstates, one entry per `q`.
fn realization_densities(spec: &HamiltonianSpec, cfg: &DisorderScanConfig) -> Result<Vec<f64>> {
    let d = 1usize << spec.n_qubits;
    let sel = EigenSelection { n_ev: Some(cfg.n_ev.min(d)), center: cfg.center };
    let eig = mid_spectrum_eigenstates(spec, &sel)?;
    let mut sums = vec![0.0; cfg.qs.len()];
    for state in &eig.states {
        for (k, r) in state_entropies(state, &cfg.qs)?.iter().enumerate() {
            sums[k] += r.m_filtered / spec.n_qubits as f64;
        }
    }
    Ok(sums.into_iter().map(|s| s / eig.states.len() as f64).collect())
}

/// Disorder-averaged FSE density for each `(W, q)`; realization `r` uses
/// disorder seed `seed ⊕ r`.
pub fn disorder_scan(cfg: &DisorderScanConfig) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &w in &cfg.ws {
        let per: Vec<Vec<f64>> = (0..cfg.realizations as u64)
            .into_par_iter()
            .map(|r| {
                let spec = cfg.template.clone().with_disorder(w, derive_seed(cfg.template.seed, r));
                realization_densities(&spec, cfg)
            })
            .collect::<Result<_>>()?;
        for (k, &q) in cfg.qs.iter().enumerate() {
            let xs: Vec<f64> = per.iter().map(|v| v[k]).collect();
            rows.push(ScanRow {
                w,
                q,
                n: cfg.template.n_qubits,
                fse_density: mean(&xs),
                std_error: std_error(&xs),
                realizations: cfg.realizations,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `W,q,N,fse_density,std_error,realizations`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut w: W) -> Result<()> {
    writeln!(w, "W,q,N,fse_density,std_error,realizations")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{},{}", r.w, r.q, r.n, r.fse_density, r.std_error, r.realizations)?;
    }
    Ok(())
}

/// Hex SHA-256 of the canonical JSON of `(spec, selection)`.
pub fn spec_hash(spec: &HamiltonianSpec, selection: &EigenSelection) -> Result<String> {
    let text = serde_json::to_string(&(spec, selection))?;
    Ok(Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Serialize, Deserialize)]
struct CacheSidecar {
    spec_hash: String,
    energies: Vec<f64>,
    all_energies: Vec<f64>,
    center: f64,
}

/// Stores `<hash>.json` and `<hash>-<k>.psvec` files under `dir`.
pub fn save_eigenstates(
    dir: impl AsRef<Path>,
    spec: &HamiltonianSpec,
    selection: &EigenSelection,
    eig: &Eigenstates,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let hash = spec_hash(spec, selection)?;
    for (k, s) in eig.states.iter().enumerate() {
        s.save(dir.join(format!("{hash}-{k}.psvec")))?;
    }
    let side = CacheSidecar {
        spec_hash: hash.clone(),
        energies: eig.energies.clone(),
        all_energies: eig.all_energies.clone(),
        center: eig.center,
    };
    std::fs::write(dir.join(format!("{hash}.json")), serde_json::to_vec_pretty(&side)?)?;
    Ok(())
}

/// Cached eigenstates for `(spec, selection)`, if present.
pub fn load_eigenstates(
    dir: impl AsRef<Path>,
    spec: &HamiltonianSpec,
    selection: &EigenSelection,
) -> Result<Option<Eigenstates>> {
    let dir = dir.as_ref();
    let hash = spec_hash(spec, selection)?;
    let side_path = dir.join(format!("{hash}.json"));
    if !side_path.exists() {
        return Ok(None);
    }
    let side: CacheSidecar = serde_json::from_slice(&std::fs::read(side_path)?)?;
    if side.spec_hash != hash {
        return Err(Error::Format("cache sidecar hash mismatch".into()));
    }
    let states = (0..side.energies.len())
        .map(|k| StateVector::load(dir.join(format!("{hash}-{k}.psvec"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(Eigenstates { energies: side.energies, states, all_energies: side.all_energies, center: side.center }))
}

/// Cached diagonalization: loads from `dir` when present, otherwise computes and stores.
pub fn cached_eigenstates(
    dir: impl AsRef<Path>,
    spec: &HamiltonianSpec,
    selection: &EigenSelection,
) -> Result<Eigenstates> {
    if let Some(e) = load_eigenstates(&dir, spec, selection)? {
        return Ok(e);
    }
    let e = mid_spectrum_eigenstates(spec, selection)?;
    save_eigenstates(&dir, spec, selection, &e)?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::expectation;
    use crate::statevec::inner;

    fn zz_pair() -> HamiltonianSpec {
        HamiltonianSpec { g: 0.0, h_bulk: 0.0, h1_override: Some(0.0), ..HamiltonianSpec::new(2) }
    }

    #[test]
    fn two_site_zz() {
        let w = hamiltonian_eigenvalues(&zz_pair()).unwrap();
        assert_eq!(w, vec![-1.0, -1.0, 1.0, 1.0]);
        let eig = mid_spectrum_eigenstates(&zz_pair(), &EigenSelection::with_count(4)).unwrap();
        let zz = PauliString::parse("Z1 Z2", 2).unwrap();
        for s in &eig.states {
            let v = expectation(s, &zz).unwrap();
            assert!((v.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn default_couplings() {
        let spec = HamiltonianSpec::new(6);
        let h = spec.fields();
        assert_eq!(h[0], -1.0);
        assert!((h[1] - 0.809_016_994_374_947_4).abs() < 1e-15);
        assert!((spec.g - 0.904_508_497_187_473_7).abs() < 1e-15);
        let op = build_hamiltonian(&spec).unwrap();
        assert_eq!(op.terms.len(), 6 + 6 + 5);
        assert!(op.is_real());
    }

    #[test]
    fn clean_matrix_is_real_symmetric() {
        let m = build_hamiltonian(&HamiltonianSpec::new(5)).unwrap().to_dense().unwrap();
        let HermitianMatrix::Real { n, a } = &m else { panic!("expected a real matrix") };
        for r in 0..*n {
            for c in 0..*n {
                assert_eq!(a[c * n + r], a[r * n + c]);
            }
        }
    }

    #[test]
    fn tri_breaking_matrix_is_complex_hermitian() {
        let spec = HamiltonianSpec::new(5).with_tri_breaking(true);
        let op = build_hamiltonian(&spec).unwrap();
        assert!(!op.is_real());
        let m = op.to_dense().unwrap();
        assert!(!m.is_real());
        assert_eq!(m.hermiticity_defect(), 0.0);
        let asym = (0..32).flat_map(|r| (0..32).map(move |c| (r, c))).any(|(r, c)| m.get(r, c) != m.get(c, r));
        assert!(asym);
        assert!(HamiltonianSpec::new(3).with_tri_breaking(true).validate().is_err());
    }

    #[test]
    fn size_cap_is_a_capability_error() {
        assert!(matches!(HamiltonianSpec::new(15).validate(), Err(Error::Capability(_))));
    }

    #[test]
    fn dense_matches_sparse_apply() {
        for tri in [false, true] {
            let spec = HamiltonianSpec::new(5).with_tri_breaking(tri).with_disorder(1.5, 3);
            let op = build_hamiltonian(&spec).unwrap();
            let m = op.to_dense().unwrap();
            let v = crate::ensembles::haar_state(5, Group::Unitary, 1).unwrap();
            let hv = op.apply(v.amplitudes());
            for (r, h) in hv.iter().enumerate() {
                let dense: C64 = (0..32).map(|c| m.get(r, c) * v.amplitudes()[c]).sum();
                assert!((dense - h).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn disorder_is_seeded_and_bounded() {
        let a = HamiltonianSpec::new(8).with_disorder(2.0, 5).fields();
        let b = HamiltonianSpec::new(8).with_disorder(2.0, 5).fields();
        let c = HamiltonianSpec::new(8).with_disorder(2.0, 6).fields();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let clean = HamiltonianSpec::new(8).fields();
        assert!(a.iter().zip(&clean).all(|(x, y)| (x - y).abs() <= 2.0));
    }

    #[test]
    fn window_selection_prefers_lower_index_on_ties() {
        let e = [-3.0, -1.0, 0.0, 1.0, 3.0];
        assert_eq!(nearest_window(&e, 0.0, 1), 2);
        assert_eq!(nearest_window(&e, 0.0, 2), 1);
        assert_eq!(nearest_window(&e, 0.0, 3), 1);
        assert_eq!(nearest_window(&e, 0.0, 4), 0);
        assert_eq!(nearest_window(&e, 10.0, 2), 3);
        assert_eq!(nearest_window(&e, -10.0, 2), 0);
    }

    #[test]
    fn eigenstates_are_orthonormal_and_real_when_symmetric() {
        for tri in [false, true] {
            let spec = HamiltonianSpec::new(8).with_tri_breaking(tri);
            let eig = mid_spectrum_eigenstates(&spec, &EigenSelection::with_count(20)).unwrap();
            assert_eq!(eig.states.len(), 20);
            assert!(eig.states.iter().all(|s| s.is_real() != tri));
            for i in 0..20 {
                for j in 0..=i {
                    let o = inner(&eig.states[i], &eig.states[j]).unwrap();
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((o - C64::new(target, 0.0)).norm() < 1e-8);
                }
            }
            let lo = eig.energies[0];
            let hi = eig.energies[19];
            let outside = eig.all_energies.iter().filter(|&&e| e < lo - 1e-9 || e > hi + 1e-9);
            let nearest_outside = outside.map(|e| (e - eig.center).abs()).fold(f64::INFINITY, f64::min);
            let farthest_inside = eig.energies.iter().map(|e| (e - eig.center).abs()).fold(0.0, f64::max);
            assert!(nearest_outside >= farthest_inside - 1e-9);
        }
    }

    #[test]
    fn gap_ratio_of_poisson_levels() {
        let mut rng = rng_from_seed(17);
        let e: Vec<f64> = (0..100_001).map(|_| rng.gen::<f64>()).collect();
        let r = gap_ratio(&e).unwrap();
        assert!((r - POISSON_GAP_RATIO).abs() < 0.01, "{r}");
    }

    #[test]
    fn gap_ratio_errors() {
        assert!(gap_ratio(&[0.0; 10]).is_err());
        let mut e: Vec<f64> = (0..200).map(|i| i as f64 * i as f64).collect();
        e[5] = e[4];
        assert!(matches!(gap_ratio(&e), Err(Error::Degenerate(_))));
    }

    #[test]
    fn eth_rejects_wide_or_trivial_patterns() {
        let s = vec![StateVector::zero(10).unwrap()];
        assert!(eth_local_statistics(std::slice::from_ref(&s), &PauliString::identity(2).unwrap()).is_err());
        let wide = PauliString::parse("X1 X6", 6).unwrap();
        assert!(eth_local_statistics(std::slice::from_ref(&s), &wide).is_err());
        let zz = PauliString::parse("Z1 Z2", 2).unwrap();
        let rep = eth_local_statistics(&[s], &zz).unwrap();
        assert_eq!(rep.sizes[0].mean, 1.0);
        assert_eq!(rep.sizes[0].std, 0.0);
        // sites 3..=7 (1-based starts) for N = 10
        assert_eq!(rep.sizes[0].samples, 5);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = HamiltonianSpec::new(6);
        let sel = EigenSelection::with_count(3);
        assert!(load_eigenstates(dir.path(), &spec, &sel).unwrap().is_none());
        let e = cached_eigenstates(dir.path(), &spec, &sel).unwrap();
        let back = load_eigenstates(dir.path(), &spec, &sel).unwrap().unwrap();
        assert_eq!(e, back);
        let other = spec_hash(&HamiltonianSpec::new(7), &sel).unwrap();
        assert_ne!(other, spec_hash(&spec, &sel).unwrap());
    }

    #[test]
    fn scan_csv_and_validation() {
        let cfg = DisorderScanConfig::new(HamiltonianSpec::new(6), vec![0.5], vec![2.0], 3);
        assert!(cfg.validate().is_err());
        let row = ScanRow { w: 0.25, q: 2.0, n: 12, fse_density: 0.9, std_error: 0.01, realizations: 20 };
        let mut buf = Vec::new();
        write_scan_csv(&[row], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "W,q,N,fse_density,std_error,realizations\n0.25,2,12,0.9,0.01,20\n"
        );
    }
}
