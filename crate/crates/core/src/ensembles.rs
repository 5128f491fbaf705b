//! Generators for the state families studied here: Haar states, brick-wall
//! circuit states, product states, random stabilizer states and subspace phase
//! states. Every generator is a pure function of its spec and seed.

use num_complex::Complex64 as C64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{check_qubits, StateVector, TwoQubitGate};

/// Which compact group a random state or gate is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    /// 𝒰(d): complex states.
    Unitary,
    /// 𝒪(d): real states.
    Orthogonal,
}

/// Seed of realization `index` in a family seeded by `seed`.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `U|0…0⟩` with `U` Haar on 𝒰(d) (or 𝒪(d)): a uniform point on the unit
/// sphere of `ℂ^d` (or `ℝ^d`), drawn as a normalized Gaussian vector.
pub fn haar_state(n_qubits: usize, group: Group, seed: u64) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let mut rng = rng_from_seed(seed);
    haar_state_with(n_qubits, group, &mut rng)
}

pub fn haar_state_with<R: Rng + ?Sized>(n_qubits: usize, group: Group, rng: &mut R) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let d = 1usize << n_qubits;
    let amps: Vec<C64> = match group {
        Group::Unitary => (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect(),
        Group::Orthogonal => (0..d).map(|_| C64::new(rng.sample(StandardNormal), 0.0)).collect(),
    };
    StateVector::normalized(amps)
}

/// Haar-random element of 𝒰(4): Gram–Schmidt QR of a complex Ginibre matrix.
///
/// Gram–Schmidt yields `R` with a positive real diagonal, which is exactly the
/// phase normalization that makes `Q` Haar distributed.
pub fn haar_two_qubit_unitary<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitGate {
    let mut cols = [[C64::new(0.0, 0.0); 4]; 4];
    for col in cols.iter_mut() {
        for v in col.iter_mut() {
            *v = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    gram_schmidt_columns(cols)
}

/// Haar-random element of 𝒪(4): Gram–Schmidt QR of a real Ginibre matrix.
pub fn haar_two_qubit_orthogonal<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitGate {
    let mut cols = [[C64::new(0.0, 0.0); 4]; 4];
    for col in cols.iter_mut() {
        for v in col.iter_mut() {
            *v = C64::new(rng.sample(StandardNormal), 0.0);
        }
    }
    gram_schmidt_columns(cols)
}

pub fn haar_two_qubit_gate<R: Rng + ?Sized>(group: Group, rng: &mut R) -> TwoQubitGate {
    match group {
        Group::Unitary => haar_two_qubit_unitary(rng),
        Group::Orthogonal => haar_two_qubit_orthogonal(rng),
    }
}

fn gram_schmidt_columns(mut cols: [[C64; 4]; 4]) -> TwoQubitGate {
    for k in 0..4 {
        // two passes keep the columns orthogonal to machine precision
        for _ in 0..2 {
            for prev in 0..k {
                let proj: C64 = (0..4).map(|r| cols[prev][r].conj() * cols[k][r]).sum();
                let p = cols[prev];
                for (x, pv) in cols[k].iter_mut().zip(p) {
                    *x -= proj * pv;
                }
            }
        }
        let norm = cols[k].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[k].iter_mut() {
            *v /= norm;
        }
    }
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            m[r][c] = *v;
        }
    }
    TwoQubitGate(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
}

/// A brick-wall circuit of Haar two-qubit gates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    pub depth: usize,
    pub gate_ensemble: Group,
    #[serde(default)]
    pub boundary: Boundary,
    pub seed: u64,
}

impl CircuitSpec {
    /// Depth defaults to the number of qubits.
    pub fn new(n_qubits: usize, gate_ensemble: Group, seed: u64) -> Self {
        Self { n_qubits, depth: n_qubits, gate_ensemble, boundary: Boundary::Periodic, seed }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_qubits(self.n_qubits)?;
        if self.n_qubits < 2 || self.n_qubits % 2 != 0 {
            return Err(Error::arg(format!("brick-wall circuits need an even N ≥ 2, got {}", self.n_qubits)));
        }
        Ok(())
    }

    /// Qubit pairs acted on in layer `t` (0-based): even layers pair
    /// (0,1)(2,3)…, odd layers pair (1,2)(3,4)…(N−1,0).
    pub fn layer_pairs(&self, t: usize) -> Vec<(usize, usize)> {
        let n = self.n_qubits;
        let offset = t % 2;
        (0..n / 2).map(|k| ((2 * k + offset) % n, (2 * k + 1 + offset) % n)).collect()
    }
}

/// `|0…0⟩` evolved through `spec.depth` brick-wall layers.
pub fn brickwall_state(spec: &CircuitSpec) -> Result<StateVector> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let mut state = StateVector::zero(spec.n_qubits)?;
    for t in 0..spec.depth {
        for (i, j) in spec.layer_pairs(t) {
            let gate = haar_two_qubit_gate(spec.gate_ensemble, &mut rng);
            state.apply_two_qubit_unchecked(&gate, i, j);
        }
    }
    Ok(state)
}

/// `(cos(θ/2)|0⟩ + e^{−iφ} sin(θ/2)|1⟩)^⊗N`.
pub fn product_state(theta: f64, phi: f64, n_qubits: usize) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let single = [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), -phi)];
    let d = 1usize << n_qubits;
    let amps =
        (0..d).map(|idx| (0..n_qubits).fold(C64::new(1.0, 0.0), |acc, q| acc * single[(idx >> q) & 1])).collect();
    StateVector::normalized(amps)
}

/// Angles `(θ, φ)` of the single-qubit state whose X, Y and Z expectations
/// all have square 1/3.
pub fn theta_angles() -> (f64, f64) {
    let theta = 2.0 * (2.0 - 3f64.sqrt()).sqrt().atan();
    let phi = 2.0 * (1.0 - 2f64.sqrt()).atan();
    (theta, phi)
}

/// Apply `n_gates` gates drawn from {H_i, S_i, CZ_ij}: first a gate type
/// uniformly, then its qubits uniformly.
pub fn apply_random_clifford_gates<R: Rng + ?Sized>(
    state: &mut StateVector,
    n_gates: usize,
    rng: &mut R,
) -> Result<()> {
    let n = state.n_qubits();
    let kinds = if n >= 2 { 3 } else { 2 };
    for _ in 0..n_gates {
        match rng.gen_range(0..kinds) {
            0 => state.apply_hadamard(rng.gen_range(0..n))?,
            1 => state.apply_s(rng.gen_range(0..n))?,
            _ => {
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                state.apply_cz(i, j)?;
            }
        }
    }
    Ok(())
}

/// A stabilizer state: `4N²` random Clifford gates applied to `|0…0⟩`.
///
/// The distribution is not uniform over stabilizer states.
pub fn random_stabilizer_state(n_qubits: usize, seed: u64) -> Result<StateVector> {
    let mut state = StateVector::zero(n_qubits)?;
    let mut rng = rng_from_seed(seed);
    apply_random_clifford_gates(&mut state, 4 * n_qubits * n_qubits, &mut rng)?;
    Ok(state)
}

/// Subspace phase state parameters: `|S| = 2^k` basis states out of `2^N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpsSpec {
    pub n_qubits: usize,
    pub subset_log_size: usize,
    pub seed: u64,
}

impl SpsSpec {
    pub fn validate(&self) -> Result<()> {
        check_qubits(self.n_qubits)?;
        if self.subset_log_size > self.n_qubits {
            return Err(Error::arg(format!(
                "subset size 2^{} exceeds Hilbert space 2^{}",
                self.subset_log_size, self.n_qubits
            )));
        }
        Ok(())
    }
}

/// Uniform-magnitude random-sign superposition over a random `2^k`-element
/// subset of basis states. Signs are independent fair coins.
pub fn sps_state(spec: &SpsSpec) -> Result<StateVector> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let d = 1usize << spec.n_qubits;
    let size = 1usize << spec.subset_log_size;
    let mut subset = index::sample(&mut rng, d, size).into_vec();
    subset.sort_unstable();
    let signs: Vec<bool> = (0..size).map(|_| rng.gen()).collect();
    subspace_phase_state(spec.n_qubits, &subset, &signs)
}

/// `Σ_{σ∈S} (−1)^{f(σ)} |σ⟩ / √|S|` with `f(σ_k) = signs[k]`.
pub fn subspace_phase_state(n_qubits: usize, subset: &[usize], signs: &[bool]) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    if subset.len() != signs.len() || subset.is_empty() {
        return Err(Error::arg("subset and signs must be nonempty and of equal length"));
    }
    let d = 1usize << n_qubits;
    let amp = 1.0 / (subset.len() as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); d];
    for (&s, &neg) in subset.iter().zip(signs) {
        if s >= d {
            return Err(Error::arg(format!("basis index {s} out of range")));
        }
        if amps[s] != C64::new(0.0, 0.0) {
            return Err(Error::arg(format!("basis index {s} repeated")));
        }
        amps[s] = C64::new(if neg { -amp } else { amp }, 0.0);
    }
    StateVector::from_amplitudes(amps)
}
