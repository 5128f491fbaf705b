//! Metropolis–Hastings walk over Pauli strings with stationary law
//! `ρ(P) = ⟨Ψ|P|Ψ⟩²/(d−1)` on non-identity strings.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{derive_seed, rng_from_seed};
use crate::error::{Error, Result};
use crate::pauli::{expectation_unchecked, PauliString};
use crate::spectrum::{Histogram, HistogramOptions, PauliSpectrum};
use crate::statevec::StateVector;
use crate::stats::{batch_means, mean, std_error};

/// Default initialization threshold on `ρ(P₁)`.
pub const DEFAULT_EPS: f64 = 1e-14;
/// Initialization draws before giving up.
pub const MAX_INIT_DRAWS: usize = 1_000_000;
/// Batches used for batch-means error bars.
pub const DEFAULT_BATCHES: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Recorded steps per chain.
    pub steps: usize,
    /// Discarded prefix; `None` means `10·N²`.
    pub burn_in: Option<usize>,
    pub eps: f64,
    pub seed: u64,
    pub n_chains: usize,
}

impl SamplerConfig {
    pub fn new(steps: usize, seed: u64) -> Self {
        Self { steps, burn_in: None, eps: DEFAULT_EPS, seed, n_chains: 1 }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = Some(burn_in);
        self
    }

    pub fn with_chains(mut self, n_chains: usize) -> Self {
        self.n_chains = n_chains;
        self
    }

    pub fn resolved_burn_in(&self, n_qubits: usize) -> usize {
        self.burn_in.unwrap_or(10 * n_qubits * n_qubits)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::arg("steps must be at least 1"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::arg(format!("eps must be positive, got {}", self.eps)));
        }
        if self.n_chains == 0 {
            return Err(Error::arg("n_chains must be at least 1"));
        }
        Ok(())
    }
}

/// One recorded step of the walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainRecord {
    pub pauli: PauliString,
    pub rho: f64,
    /// Signed `⟨P⟩`, so histograms can keep the sign that `ρ` discards.
    pub expectation: f64,
    pub accepted: bool,
}

/// Walker state shared by the per-chain loop.
struct Walker<'a> {
    state: &'a StateVector,
    n: usize,
    norm: f64,
}

impl Walker<'_> {
    fn eval(&self, x: u64, z: u64) -> (f64, f64) {
        if x == 0 && z == 0 {
            return (0.0, 0.0);
        }
        let p = PauliString::from_masks_unchecked(self.n, x, z);
        let e = expectation_unchecked(self.state, &p);
        (e, e * e / self.norm)
    }

    fn generator(&self, k: usize) -> (u64, u64) {
        if k < self.n {
            (1 << k, 0)
        } else {
            (0, 1 << (k - self.n))
        }
    }

    /// Multiplies by two generators drawn uniformly with replacement from
    /// `{X_1, Z_1, …, X_N, Z_N}`; when the draws coincide the move applies
    /// that single generator. Every move is its own inverse, so the proposal
    /// is symmetric, and single-generator moves make the walk ergodic (two
    /// distinct generators alone preserve the parity of `|x| + |z|`).
    fn propose<R: Rng>(&self, x: u64, z: u64, rng: &mut R) -> (u64, u64) {
        let a = rng.gen_range(0..2 * self.n);
        let b = rng.gen_range(0..2 * self.n);
        let (ax, az) = self.generator(a);
        if a == b {
            return (x ^ ax, z ^ az);
        }
        let (bx, bz) = self.generator(b);
        (x ^ ax ^ bx, z ^ az ^ bz)
    }
}

/// Runs one chain seeded by `config.seed`; `config.n_chains` is ignored.
pub fn run_chain(state: &StateVector, config: &SamplerConfig) -> Result<Vec<ChainRecord>> {
    config.validate()?;
    state.check_normalized()?;
    let n = state.n_qubits();
    if n == 0 {
        return Err(Error::arg("the sampler needs at least one qubit"));
    }
    let walker = Walker { state, n, norm: (state.dim() - 1) as f64 };
    let mut rng = rng_from_seed(config.seed);
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    let mut current = None;
    for _ in 0..MAX_INIT_DRAWS {
        let (x, z) = (rng.gen::<u64>() & mask, rng.gen::<u64>() & mask);
        if x == 0 && z == 0 {
            continue;
        }
        let (e, rho) = walker.eval(x, z);
        if rho > config.eps {
            current = Some((x, z, e, rho));
            break;
        }
    }
    let Some((mut x, mut z, mut e, mut rho)) = current else {
        return Err(Error::Initialization(format!(
            "no string with ρ > {} in {MAX_INIT_DRAWS} draws; the state is too close to a stabilizer state",
            config.eps
        )));
    };

    let burn_in = config.resolved_burn_in(n);
    let mut records = Vec::with_capacity(config.steps);
    for step in 0..burn_in + config.steps {
        let (px, pz) = walker.propose(x, z, &mut rng);
        let (pe, prho) = walker.eval(px, pz);
        let u: f64 = rng.gen();
        let accepted = prho > 0.0 && u * rho < prho;
        if accepted {
            (x, z, e, rho) = (px, pz, pe, prho);
        }
        if step >= burn_in {
            records.push(ChainRecord {
                pauli: PauliString::from_masks_unchecked(n, x, z),
                rho,
                expectation: e,
                accepted,
            });
        }
    }
    Ok(records)
}

/// Runs `config.n_chains` independent chains; chain `i` uses seed `seed ⊕ i`.
pub fn run_chains(state: &StateVector, config: &SamplerConfig) -> Result<Vec<Vec<ChainRecord>>> {
    config.validate()?;
    (0..config.n_chains as u64)
        .into_par_iter()
        .map(|i| {
            let mut c = config.clone();
            c.seed = derive_seed(config.seed, i);
            run_chain(state, &c)
        })
        .collect()
}

pub fn acceptance_rate(chain: &[ChainRecord]) -> f64 {
    chain.iter().filter(|r| r.accepted).count() as f64 / chain.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FseEstimate {
    pub q: f64,
    #[serde(rename = "M_filtered")]
    pub m_filtered: f64,
    pub std_error: f64,
}

/// FSE estimate with the default number of batches.
pub fn estimate_fse(chain: &[ChainRecord], q: f64, d: usize) -> Result<FseEstimate> {
    estimate_fse_with(chain, q, d, DEFAULT_BATCHES)
}

/// `ζ̃̂_q = (1/𝒩) Σ_k ((d−1)ρ_k)^{q−1}`, `M̃_q = log₂ ζ̃̂_q/(1−q)`; at `q = 1`,
/// `M̃₁ = −(1/𝒩) Σ_k log₂((d−1)ρ_k)`. Error bars come from batch means,
/// propagated through the logarithm.
pub fn estimate_fse_with(chain: &[ChainRecord], q: f64, d: usize, batches: usize) -> Result<FseEstimate> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::arg(format!("Rényi order must be positive and finite, got {q}")));
    }
    if chain.is_empty() {
        return Err(Error::arg("empty chain"));
    }
    if d < 2 {
        return Err(Error::arg(format!("dimension must be at least 2, got {d}")));
    }
    if let Some(k) = chain.iter().position(|r| !(r.rho > 0.0)) {
        return Err(Error::Invariant(format!("record {k} has ρ = {}", chain[k].rho)));
    }
    let dm1 = (d - 1) as f64;
    if q == 1.0 {
        let f: Vec<f64> = chain.iter().map(|r| -(dm1 * r.rho).log2()).collect();
        let b = batch_means(&f, batches);
        return Ok(FseEstimate { q, m_filtered: mean(&f), std_error: std_error(&b) });
    }
    let f: Vec<f64> = chain.iter().map(|r| (dm1 * r.rho).powf(q - 1.0)).collect();
    let zeta = mean(&f);
    let b = batch_means(&f, batches);
    let se_zeta = std_error(&b);
    Ok(FseEstimate {
        q,
        m_filtered: zeta.log2() / (1.0 - q),
        std_error: se_zeta / (zeta * std::f64::consts::LN_2 * (1.0 - q).abs()),
    })
}

/// Importance-reweighted spectrum: each record carries weight `1/ρ` and the
/// identity contributes a point mass `1/d²` at `x = 1`. For a complex state the
/// regular part is normalized to `(d²−1)/d²`. For a real state the chain never
/// visits the `d(d−1)/2` Y-odd strings, so the regular part is normalized to
/// `(d(d+1)/2 − 1)/d²` and their exact zeros are restored at `x = 0`, as a
/// point mass or in the bin holding zero depending on `opts.separate_zeros`.
/// Values are binned with their recorded sign.
pub fn estimate_spectrum(
    chain: &[ChainRecord],
    n_qubits: usize,
    is_real: bool,
    opts: &HistogramOptions,
) -> Result<PauliSpectrum> {
    if chain.is_empty() {
        return Err(Error::arg("empty chain"));
    }
    let mut h = Histogram::empty(opts)?;
    let total: f64 = chain.iter().map(|r| 1.0 / r.rho).sum();
    let d = (1u64 << n_qubits) as f64;
    let zeros = if is_real { d * (d - 1.0) / 2.0 } else { 0.0 };
    let scale = (d * d - 1.0 - zeros) / (d * d) / total;
    for r in chain {
        h.add_mass(r.expectation, scale / r.rho);
    }
    if zeros > 0.0 {
        let mass = zeros / (d * d);
        if opts.separate_zeros {
            h.add_point_mass(0.0, mass);
        } else {
            h.add_mass(0.0, mass);
        }
    }
    h.add_point_mass(1.0, 1.0 / (d * d));
    Ok(PauliSpectrum::sampled(n_qubits, is_real, h))
}

/// Diagnostic dump with header `step,x_mask_hex,z_mask_hex,rho,accepted`.
pub fn write_chain_csv<W: Write>(chain: &[ChainRecord], mut w: W) -> Result<()> {
    writeln!(w, "step,x_mask_hex,z_mask_hex,rho,accepted")?;
    for (k, r) in chain.iter().enumerate() {
        writeln!(w, "{k},{:x},{:x},{:e},{}", r.pauli.x_mask(), r.pauli.z_mask(), r.rho, r.accepted)?;
    }
    Ok(())
}

/// Machine-readable FSE result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FseReport {
    pub q: f64,
    #[serde(rename = "M_filtered")]
    pub m_filtered: f64,
    pub std_error: f64,
    pub steps: usize,
    pub burn_in: usize,
    pub n_chains: usize,
    pub seed: u64,
}

/// Runs all chains of `config` and reports `M̃_q` for each `q` from the
/// concatenated records.
pub fn sample_fse(state: &StateVector, config: &SamplerConfig, qs: &[f64]) -> Result<Vec<FseReport>> {
    let chains = run_chains(state, config)?;
    let all: Vec<ChainRecord> = chains.into_iter().flatten().collect();
    let batches = DEFAULT_BATCHES * config.n_chains;
    qs.iter()
        .map(|&q| {
            let est = estimate_fse_with(&all, q, state.dim(), batches)?;
            Ok(FseReport {
                q,
                m_filtered: est.m_filtered,
                std_error: est.std_error,
                steps: config.steps,
                burn_in: config.resolved_burn_in(state.n_qubits()),
                n_chains: config.n_chains,
                seed: config.seed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{haar_state, random_stabilizer_state, Group};
    use crate::pauli::expectation;
    use crate::spectrum::{entropies, enumerate_spectrum};

    #[test]
    fn plus_state_walks_on_x_strings() {
        let n = 5;
        let s = StateVector::plus(n).unwrap();
        let chain = run_chain(&s, &SamplerConfig::new(5000, 3)).unwrap();
        let inv = 1.0 / ((1 << n) - 1) as f64;
        for r in &chain {
            assert_eq!(r.pauli.z_mask(), 0);
            assert!(!r.pauli.is_identity());
            assert!((r.rho - inv).abs() < 1e-15);
        }
        for q in [0.5, 1.0, 2.0, 5.0] {
            let est = estimate_fse(&chain, q, 1 << n).unwrap();
            assert!(est.m_filtered.abs() < 1e-12, "q={q}");
        }
    }

    #[test]
    fn constant_chain_has_zero_fse() {
        for n in [1usize, 4, 10, 20] {
            let d = 1usize << n;
            let r = ChainRecord {
                pauli: PauliString::single(n, 0, crate::pauli::Pauli::X).unwrap(),
                rho: 1.0 / (d - 1) as f64,
                expectation: 1.0,
                accepted: true,
            };
            let chain = vec![r; 100];
            for q in [0.5, 1.0, 2.0, 3.0, 6.0] {
                let est = estimate_fse(&chain, q, d).unwrap();
                assert_eq!(est.m_filtered, 0.0);
                assert_eq!(est.std_error, 0.0);
            }
        }
    }

    #[test]
    fn records_are_consistent() {
        let s = haar_state(6, Group::Unitary, 11).unwrap();
        let chain = run_chain(&s, &SamplerConfig::new(2000, 1)).unwrap();
        assert_eq!(chain.len(), 2000);
        for r in &chain {
            assert!(!r.pauli.is_identity());
            let e = expectation(&s, &r.pauli).unwrap();
            assert!((r.rho - e * e / 63.0).abs() < 1e-12);
            assert!((r.expectation - e).abs() < 1e-12);
        }
    }

    #[test]
    fn reproducible() {
        let s = haar_state(5, Group::Orthogonal, 2).unwrap();
        let cfg = SamplerConfig::new(500, 99);
        assert_eq!(run_chain(&s, &cfg).unwrap(), run_chain(&s, &cfg).unwrap());
        let other = run_chain(&s, &SamplerConfig::new(500, 100)).unwrap();
        assert_ne!(run_chain(&s, &cfg).unwrap(), other);
    }

    #[test]
    fn detailed_balance_small_system() {
        let n = 4;
        let s = haar_state(n, Group::Unitary, 5).unwrap();
        let exact = enumerate_spectrum(&s).unwrap();
        let values = exact.exact_values().unwrap();
        let cfg = SamplerConfig::new(10_000_000, 8);
        let chain = run_chain(&s, &cfg).unwrap();
        let mut freq = vec![0u64; 256];
        for r in &chain {
            freq[r.pauli.spectrum_index()] += 1;
        }
        let tv: f64 =
            (1..256).map(|i| (freq[i] as f64 / chain.len() as f64 - values[i] * values[i] / 15.0).abs()).sum::<f64>()
                / 2.0;
        assert!(tv < 0.02, "total variation {tv}");
        assert_eq!(freq[0], 0);
    }

    #[test]
    fn unreachable_threshold_fails_to_initialize() {
        // ρ ≤ 1/(d−1) < 1 for every string, so no draw can pass.
        let s = random_stabilizer_state(2, 1).unwrap();
        let mut cfg = SamplerConfig::new(10, 0);
        cfg.eps = 1.0;
        let err = run_chain(&s, &cfg).unwrap_err();
        assert!(matches!(err, Error::Initialization(_)));
    }

    #[test]
    fn estimator_rejects_bad_input() {
        assert!(estimate_fse(&[], 2.0, 4).is_err());
        let p = PauliString::identity(2).unwrap();
        let bad = [ChainRecord { pauli: p, rho: 0.0, expectation: 0.0, accepted: false }];
        assert!(matches!(estimate_fse(&bad, 2.0, 4), Err(Error::Invariant(_))));
    }

    #[test]
    fn estimate_tracks_enumeration() {
        let s = haar_state(8, Group::Unitary, 21).unwrap();
        let chain = run_chain(&s, &SamplerConfig::new(200_000, 4)).unwrap();
        let spec = enumerate_spectrum(&s).unwrap();
        for q in [1.0, 2.0, 3.0] {
            let exact = entropies(&spec, q).unwrap().m_filtered;
            let est = estimate_fse(&chain, q, 256).unwrap();
            assert!(
                (est.m_filtered - exact).abs() < 4.0 * est.std_error + 0.01,
                "q={q}: {} ± {} vs {exact}",
                est.m_filtered,
                est.std_error
            );
        }
    }

    #[test]
    fn real_state_spectrum_restores_the_y_odd_zeros() {
        let n = 6;
        let s = haar_state(n, Group::Orthogonal, 4).unwrap();
        let chain = run_chain(&s, &SamplerConfig::new(20_000, 5)).unwrap();
        let d = 64.0;
        let spec = estimate_spectrum(&chain, n, true, &HistogramOptions::default()).unwrap();
        let crate::spectrum::SpectrumData::Sampled(h) = spec.data() else { panic!() };
        assert!((h.regular_mass() - (d * (d + 1.0) / 2.0 - 1.0) / (d * d)).abs() < 1e-9);
        assert!((h.point_mass_at(0.0) - (d - 1.0) / (2.0 * d)).abs() < 1e-12);
        let folded =
            estimate_spectrum(&chain, n, true, &HistogramOptions { separate_zeros: false, ..Default::default() })
                .unwrap();
        let crate::spectrum::SpectrumData::Sampled(g) = folded.data() else { panic!() };
        assert_eq!(g.point_mass_at(0.0), 0.0);
        assert!((g.regular_mass() - (d * d - 1.0) / (d * d)).abs() < 1e-9);
    }

    #[test]
    fn reweighted_spectrum_normalization_and_symmetry() {
        let n = 8;
        let s = haar_state(n, Group::Unitary, 9).unwrap();
        let chain = run_chain(&s, &SamplerConfig::new(200_000, 2)).unwrap();
        let spec = estimate_spectrum(&chain, n, false, &HistogramOptions::default()).unwrap();
        let crate::spectrum::SpectrumData::Sampled(h) = spec.data() else { panic!() };
        let d2 = 65536.0;
        assert!((h.regular_mass() - (d2 - 1.0) / d2).abs() < 1e-9);
        assert_eq!(h.point_mass_at(1.0), 1.0 / d2);
        let half = h.bins() / 2;
        let w = h.bin_width();
        let left: f64 = h.density[..half].iter().sum::<f64>() * w;
        let right: f64 = h.density[half + 1..].iter().sum::<f64>() * w;
        assert!((left - right).abs() < 0.05, "{left} vs {right}");
    }

    #[test]
    fn chain_csv_format() {
        let s = StateVector::plus(3).unwrap();
        let chain = run_chain(&s, &SamplerConfig::new(3, 0).with_burn_in(0)).unwrap();
        let mut buf = Vec::new();
        write_chain_csv(&chain, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,x_mask_hex,z_mask_hex,rho,accepted");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
    }
}
