//! Closed-form predictions for Pauli spectra and stabilizer entropies.
//!
//! Two families are covered:
//!
//! * the Gaussian typicality model, where every non-identity expectation is
//!   an independent centered Gaussian of variance `b` (complex states) or,
//!   for real states, only the `D_e` Y-even strings fluctuate while the `D_o`
//!   Y-odd strings vanish identically;
//! * exact Haar averages for states `U|0…0⟩` with `U` drawn from 𝒰(d) or 𝒪(d).
//!   The regular part of the spectrum is then a symmetric Beta law on
//!   `(1 + x)/2` with shape `d/2` (unitary) or `d/4` (orthogonal).
//!
//! All Gamma-function ratios are evaluated as log-Gamma differences so that
//! `d` up to `2^20` stays finite.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::erf::erf;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::ensembles::Group;
use crate::error::{Error, Result};
use crate::spectrum::PointMass;

/// Typicality model flavour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Typicality {
    /// Generic complex states.
    Complex,
    /// Time-reversal invariant (real) states.
    Real,
}

impl From<Group> for Typicality {
    fn from(g: Group) -> Self {
        match g {
            Group::Unitary => Typicality::Complex,
            Group::Orthogonal => Typicality::Real,
        }
    }
}

/// A typicality ensemble at Hilbert-space dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleKind {
    pub kind: Typicality,
    pub d: f64,
}

impl EnsembleKind {
    pub fn new(kind: Typicality, n_qubits: usize) -> Self {
        Self { kind, d: (1u64 << n_qubits) as f64 }
    }

    pub fn with_dim(kind: Typicality, d: f64) -> Result<Self> {
        if !(d >= 2.0) || (d.log2().fract() != 0.0) {
            return Err(Error::arg(format!("dimension {d} is not a power of two ≥ 2")));
        }
        Ok(Self { kind, d })
    }

    /// Variance of the Gaussian core.
    pub fn b(&self) -> f64 {
        match self.kind {
            Typicality::Complex => 1.0 / (self.d + 1.0),
            Typicality::Real => 1.0 / (self.d / 2.0 + 1.0),
        }
    }

    /// Number of Y-odd strings, `d(d−1)/2`.
    pub fn d_odd(&self) -> f64 {
        self.d * (self.d - 1.0) / 2.0
    }

    pub fn d_even(&self) -> f64 {
        self.d * self.d - self.d_odd()
    }

    /// Number of fluctuating strings plus the identity.
    pub fn eta(&self) -> f64 {
        match self.kind {
            Typicality::Complex => self.d * self.d,
            Typicality::Real => self.d_even(),
        }
    }

    /// Total weight of the Gaussian (regular) part.
    pub fn regular_weight(&self) -> f64 {
        (self.eta() - 1.0) / (self.d * self.d)
    }
}

fn gaussian(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Regular part of the typical spectrum at `x`.
pub fn typical_density(x: f64, ens: &EnsembleKind) -> f64 {
    ens.regular_weight() * gaussian(x, ens.b())
}

/// Dirac components of the typical spectrum.
pub fn typical_point_masses(ens: &EnsembleKind) -> Vec<PointMass> {
    let dd = ens.d * ens.d;
    let mut out = Vec::new();
    if ens.kind == Typicality::Real {
        out.push(PointMass { x: 0.0, weight: ens.d_odd() / dd });
    }
    out.push(PointMass { x: 1.0, weight: 1.0 / dd });
    out
}

/// CDF of the regular typical part, normalized to one.
pub fn typical_regular_cdf(x: f64, ens: &EnsembleKind) -> f64 {
    0.5 * (1.0 + erf(x / (2.0 * ens.b()).sqrt()))
}

fn beta_shape(group: Group, d: f64) -> f64 {
    match group {
        Group::Unitary => d / 2.0,
        Group::Orthogonal => d / 4.0,
    }
}

/// Weight of the regular part of the exact Haar spectrum.
pub fn haar_regular_weight(group: Group, d: f64) -> f64 {
    EnsembleKind { kind: group.into(), d }.regular_weight()
}

/// Regular part of the exact Haar spectrum at `x ∈ (−1, 1)`:
///
/// ```text
/// unitary:    (d²−1)/d² · (1−x²)^{d/2−1} Γ((d+1)/2) / (√π Γ(d/2))
/// orthogonal: (D_e−1)/d² · (1−x²)^{d/4−1} Γ((d+2)/4) / (√π Γ(d/4))
/// ```
pub fn haar_density(x: f64, group: Group, d: f64) -> Result<f64> {
    if !(x.abs() < 1.0) {
        return Err(Error::Domain(format!("Haar density is defined on (−1, 1), got x = {x}")));
    }
    let a = beta_shape(group, d);
    let log = haar_regular_weight(group, d).ln() + (a - 1.0) * (1.0 - x * x).ln() + ln_gamma(a + 0.5)
        - 0.5 * PI.ln()
        - ln_gamma(a);
    Ok(log.exp())
}

pub fn haar_point_masses(group: Group, d: f64) -> Vec<PointMass> {
    typical_point_masses(&EnsembleKind { kind: group.into(), d })
}

/// CDF of the regular Haar part normalized to one: a regularized incomplete
/// Beta function of `(1 + x)/2`.
pub fn haar_regular_cdf(x: f64, group: Group, d: f64) -> f64 {
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = beta_shape(group, d);
    beta_reg(a, a, 0.5 * (1.0 + x))
}

/// `(2q−1)!!` continued to real `q` as `2^q Γ(q+½)/√π`.
pub fn odd_double_factorial(q: f64) -> f64 {
    (q * LN_2 + ln_gamma(q + 0.5) - 0.5 * PI.ln()).exp()
}

/// Haar average of the filtered moment ζ̃_q:
///
/// ```text
/// unitary:    2 Γ(q+½) Γ((d+3)/2) / (√π Γ((2q+d+1)/2))
/// orthogonal: 2 Γ(q+½) Γ((d+6)/4) / (√π Γ((d+2+4q)/4))
/// ```
pub fn haar_zeta_filtered_mean(q: f64, group: Group, d: f64) -> f64 {
    let log = match group {
        Group::Unitary => ln_gamma((d + 3.0) / 2.0) - ln_gamma((2.0 * q + d + 1.0) / 2.0),
        Group::Orthogonal => ln_gamma((d + 6.0) / 4.0) - ln_gamma((d + 2.0 + 4.0 * q) / 4.0),
    };
    (2f64.ln() + ln_gamma(q + 0.5) - 0.5 * PI.ln() + log).exp()
}

/// Haar average ζ̄_q = (1 + (d−1) ζ̃̄_q)/d.
pub fn haar_zeta_mean(q: f64, group: Group, d: f64) -> f64 {
    (1.0 + (d - 1.0) * haar_zeta_filtered_mean(q, group, d)) / d
}

/// An `(M_q, M̃_q)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyPair {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "M_filtered")]
    pub m_filtered: f64,
}

const Q1_STEP: f64 = 1e-5;

fn renyi_from_log_zeta(q: f64, log2_zeta: impl Fn(f64) -> f64) -> f64 {
    if q == 1.0 {
        -(log2_zeta(1.0 + Q1_STEP) - log2_zeta(1.0 - Q1_STEP)) / (2.0 * Q1_STEP)
    } else {
        log2_zeta(q) / (1.0 - q)
    }
}

fn check_order(q: f64) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::arg(format!("Rényi order must be positive and finite, got {q}")));
    }
    Ok(())
}

/// Exact Haar `M_q` and `M̃_q` from the averaged moments. At `q = 1` the
/// Shannon limit is a central difference of `log₂ ζ̄_q`.
pub fn haar_entropy_exact(q: f64, group: Group, d: f64) -> Result<EntropyPair> {
    check_order(q)?;
    Ok(EntropyPair {
        m: renyi_from_log_zeta(q, |s| haar_zeta_mean(s, group, d).log2()),
        m_filtered: renyi_from_log_zeta(q, |s| haar_zeta_filtered_mean(s, group, d).log2()),
    })
}

/// `ln` of the Gaussian contribution `(η−1)(2b)^q Γ(q+½)/√π`.
fn typical_log_term(q: f64, ens: &EnsembleKind) -> f64 {
    (ens.eta() - 1.0).ln() + q * (2.0 * ens.b()).ln() + ln_gamma(q + 0.5) - 0.5 * PI.ln()
}

/// Typical-state SRE and FSE from the Gaussian model:
///
/// ```text
/// ζ_q = (η−1)(2b)^q Γ(q+½)/(√π d) + 1/d,   ζ̃_q = (dζ_q − 1)/(d − 1).
/// ```
pub fn typical_entropy(q: f64, ens: &EnsembleKind) -> Result<(f64, f64)> {
    check_order(q)?;
    let d = ens.d;
    if q == 1.0 {
        let slope = (2.0 * ens.b()).ln() + digamma(1.5);
        let term = typical_log_term(1.0, ens).exp();
        let zeta1 = term / d + 1.0 / d;
        let m = -(term / d) * slope / (zeta1 * LN_2);
        let m_filtered = -slope / LN_2;
        return Ok((m, m_filtered));
    }
    let log_term = typical_log_term(q, ens);
    let zeta = (log_term - d.ln()).exp() + 1.0 / d;
    let zeta_filtered = (log_term - (d - 1.0).ln()).exp();
    Ok((zeta.log2() / (1.0 - q), zeta_filtered.log2() / (1.0 - q)))
}

/// Large-N scaling `M_q ≈ D_q N + c_q`, `M̃_q ≈ D̃_q N + c̃_q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub magic_density: f64,
    pub offset: f64,
    pub filtered_density: f64,
    pub filtered_offset: f64,
}

/// Leading scaling of the typical entropies.
///
/// For `q < 2` the Gaussian part of ζ_q dominates and `M_q` shares the
/// filtered scaling; at `q = 2` both parts are `O(1/d)`; for `q > 2` the
/// identity dominates, giving `D_q = 1/(q−1)` and `c_q = 0`.
pub fn asymptotic_constants(q: f64, kind: Typicality) -> Result<AsymptoticConstants> {
    check_order(q)?;
    let shift = match kind {
        Typicality::Complex => 0.0,
        Typicality::Real => -1.0,
    };
    let filtered_offset = if q == 1.0 {
        // limit of log₂((2q−1)!!)/(1−q)
        -(LN_2 + digamma(1.5)) / LN_2 + shift
    } else {
        odd_double_factorial(q).log2() / (1.0 - q) + shift
    };
    let (magic_density, offset) = if q < 2.0 {
        (1.0, filtered_offset)
    } else if q == 2.0 {
        // ζ₂ ≈ 4/d (complex) or 7/d (real)
        let gaussian = odd_double_factorial(2.0) * 2f64.powf(-shift);
        (1.0, -(1.0 + gaussian).log2())
    } else {
        (1.0 / (q - 1.0), 0.0)
    };
    Ok(AsymptoticConstants { magic_density, offset, filtered_density: 1.0, filtered_offset })
}
