//! End-to-end acceptance checks, one line of output per criterion.
//!
//! Runs as a plain binary (`harness = false`). Set `ACCEPTANCE_ONLY=2,7` to
//! run a subset. Failing criteria are always reported; the process exits
//! with an error only when `ACCEPTANCE_STRICT=1`.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use paulispec::analytics::{
    asymptotic_constants, haar_entropy_exact, haar_regular_cdf, haar_zeta_mean, typical_density, typical_regular_cdf,
    EnsembleKind, Typicality,
};
use paulispec::ensembles::{
    brickwall_state, derive_seed, haar_state, product_state, random_stabilizer_state, sps_state, theta_angles,
    CircuitSpec, Group, SpsSpec,
};
use paulispec::hamiltonians::{
    disorder_scan, gap_ratio, mid_spectrum_eigenstates, random_matrix_gap_ratio, spectral_bulk, DisorderScanConfig,
    EigenSelection, HamiltonianSpec,
};
use paulispec::sampler::{estimate_fse, run_chain, SamplerConfig};
use paulispec::spectrum::{
    entropies, entropies_many, enumerate_spectrum, histogram, state_entropies, HistogramOptions,
};
use paulispec::stats::{ks_distance, mean, std_error};
use paulispec::StateVector;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: paulispec::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Haar moment oracle: mean ζ₂ over 10⁴ Haar states against the closed form.
fn haar_moment_oracle() -> Outcome {
    let mut notes = Vec::new();
    for n in [2usize, 3, 4] {
        let d = (1u64 << n) as f64;
        let zetas: Vec<f64> = (0..10_000u64)
            .map(|i| {
                let s = lib(haar_state(n, Group::Unitary, derive_seed(1000 + n as u64, i)))?;
                Ok(lib(state_entropies(&s, &[2.0]))?[0].zeta)
            })
            .collect::<Result<_, String>>()?;
        let (m, se) = (mean(&zetas), std_error(&zetas));
        let exact = haar_zeta_mean(2.0, Group::Unitary, d);
        ensure((m - exact).abs() <= 3.0 * se, || format!("N={n}: mean ζ₂ {m:.6} ± {se:.6} vs {exact:.6}"))?;
        notes.push(format!("N={n}: {m:.5}±{se:.5} vs {exact:.5}"));
    }
    Ok(notes.join("; "))
}

/// Full spectrum of one Haar-unitary state against the Beta law.
fn unitary_spectrum_ks() -> Outcome {
    let n = 10;
    let d = 1024.0;
    let s = lib(haar_state(n, Group::Unitary, 2024))?;
    let spec = lib(enumerate_spectrum(&s))?;
    let mut values = spec.regular_values(false).unwrap();
    ensure(values.len() == (1 << (2 * n)) - 1, || "wrong number of values".into())?;
    let ks = ks_distance(&mut values, |x| haar_regular_cdf(x, Group::Unitary, d));
    ensure(ks < 0.01, || format!("KS = {ks:.5}"))?;
    Ok(format!("KS = {ks:.5}"))
}

/// Y-odd zeros of a real Haar state and the Beta law of the remainder.
fn orthogonal_zero_structure() -> Outcome {
    let n = 10;
    let d = 1024usize;
    let s = lib(haar_state(n, Group::Orthogonal, 77))?;
    let spec = lib(enumerate_spectrum(&s))?;
    let all = spec.regular_values(false).unwrap();
    let zeros = all.iter().filter(|x| x.abs() < 1e-12).count();
    let d_odd = d * (d - 1) / 2;
    ensure(zeros == d_odd, || format!("{zeros} zeros, expected {d_odd}"))?;
    let mut rest: Vec<f64> = all.into_iter().filter(|x| x.abs() >= 1e-12).collect();
    let ks = ks_distance(&mut rest, |x| haar_regular_cdf(x, Group::Orthogonal, d as f64));
    ensure(ks < 0.01, || format!("KS = {ks:.5}"))?;
    Ok(format!("{zeros} zeros, KS = {ks:.5}"))
}

/// Random stabilizer states have d unit-modulus entries and zero entropies.
fn stabilizer_ground_truth() -> Outcome {
    let n = 8;
    let d = 256;
    let qs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let s = lib(random_stabilizer_state(n, derive_seed(4, i)))?;
        let spec = lib(enumerate_spectrum(&s))?;
        let v = spec.exact_values().unwrap();
        let unit = v.iter().filter(|x| (x.abs() - 1.0).abs() < 1e-10).count();
        let zero = v.iter().filter(|x| x.abs() < 1e-10).count();
        ensure(unit == d && unit + zero == v.len(), || format!("state {i}: {unit} unit entries, {zero} zeros"))?;
        for r in lib(entropies_many(&spec, &qs))? {
            worst = worst.max(r.m.abs()).max(r.m_filtered.abs());
        }
    }
    ensure(worst < 1e-10, || format!("largest |M| = {worst:e}"))?;
    Ok(format!("100 states, max |M_q|, |M̃_q| = {worst:.1e}"))
}

fn mixed_states() -> paulispec::Result<Vec<StateVector>> {
    let (theta, phi) = theta_angles();
    let mut states = Vec::new();
    for i in 0..100u64 {
        let n = 3 + (i % 6) as usize;
        let even_n = n + n % 2;
        let s = match i % 7 {
            0 => haar_state(n, Group::Unitary, i)?,
            1 => haar_state(n, Group::Orthogonal, i)?,
            2 => brickwall_state(&CircuitSpec::new(even_n, Group::Unitary, i).with_depth(3))?,
            3 => random_stabilizer_state(n, i)?,
            4 => product_state(theta + 0.01 * i as f64, phi, n)?,
            5 => sps_state(&SpsSpec { n_qubits: n, subset_log_size: n / 2, seed: i })?,
            _ => mid_spectrum_eigenstates(&HamiltonianSpec::new(n.max(4)), &EigenSelection::with_count(1))?
                .states
                .remove(0),
        };
        states.push(s);
    }
    Ok(states)
}

/// ζ̃_q = (dζ_q − 1)/(d − 1) on states of every provenance.
fn filtered_identity() -> Outcome {
    let qs = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0];
    let mut worst = 0.0f64;
    for s in lib(mixed_states())? {
        let d = s.dim() as f64;
        for r in lib(state_entropies(&s, &qs))? {
            worst = worst.max((r.zeta_filtered - (d * r.zeta - 1.0) / (d - 1.0)).abs());
        }
    }
    ensure(worst < 1e-12, || format!("largest deviation {worst:e}"))?;
    Ok(format!("100 states, max deviation {worst:.1e}"))
}

/// Θ product state: closed-form SRE, closing magic-density gap, and the
/// linear-in-N filtered separation from Haar states.
fn product_state_analytics() -> Outcome {
    let (theta, phi) = theta_angles();
    let per_site = |q: f64| -> f64 {
        if q == 1.0 {
            3f64.log2() / 2.0
        } else {
            ((1.0 + 3f64.powf(1.0 - q)) / 2.0).log2() / (1.0 - q)
        }
    };
    let enumerate = |n: usize| -> Result<Vec<paulispec::EntropyReport>, String> {
        let s = lib(product_state(theta, phi, n))?;
        lib(entropies_many(&lib(enumerate_spectrum(&s))?, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]))
    };
    let r8 = enumerate(8)?;
    let r10 = enumerate(10)?;
    let mut worst = 0.0f64;
    for r in &r8 {
        worst = worst.max((r.m - 8.0 * per_site(r.q)).abs());
    }
    ensure(worst < 1e-10, || format!("M_q deviates from closed form by {worst:e}"))?;

    // Magic-density gap to typical states: 0 < D_typ − D_Θ ≤ 3^{1−q}/((q−1) ln 2), decreasing.
    let mut prev = f64::INFINITY;
    for r in r8.iter().filter(|r| r.q >= 3.0) {
        let d_typ = lib(asymptotic_constants(r.q, Typicality::Complex))?.magic_density;
        let gap = d_typ - r.m / 8.0;
        let bound = 3f64.powf(1.0 - r.q) / ((r.q - 1.0) * std::f64::consts::LN_2);
        ensure(gap > 0.0 && gap <= bound * (1.0 + 1e-9) && gap < prev, || {
            format!("q={}: density gap {gap:e}, bound {bound:e}, previous {prev:e}", r.q)
        })?;
        prev = gap;
    }

    // Filtered separation from Haar grows by ≈ (1 − D_Θ) bits per qubit.
    let mut slopes = Vec::new();
    for (a, b) in r8.iter().zip(&r10).filter(|(a, _)| (2.0..=6.0).contains(&a.q)) {
        let q = a.q;
        let sep8 = lib(haar_entropy_exact(q, Group::Unitary, 256.0))?.m_filtered - a.m_filtered;
        let sep10 = lib(haar_entropy_exact(q, Group::Unitary, 1024.0))?.m_filtered - b.m_filtered;
        let slope = (sep10 - sep8) / 2.0;
        let predicted = 1.0 - per_site(q);
        ensure(sep8 > 1.0, || format!("q={q}: filtered separation {sep8:.3} bits at N=8"))?;
        ensure((slope / predicted - 1.0).abs() < 0.1, || {
            format!("q={q}: separation slope {slope:.4} vs 1 − D_Θ = {predicted:.4}")
        })?;
        slopes.push(format!("q={q}:{slope:.3}/{predicted:.3}"));
    }
    Ok(format!("M_q err {worst:.1e}; density gap at q=8 {prev:.1e}; slopes {}", slopes.join(" ")))
}

/// Sampler estimate against enumeration at N = 10.
fn sampler_vs_enumeration() -> Outcome {
    let s = lib(haar_state(10, Group::Unitary, 31337))?;
    let spec = lib(enumerate_spectrum(&s))?;
    let chain = lib(run_chain(&s, &SamplerConfig::new(1_000_000, 5)))?;
    let mut notes = Vec::new();
    for q in [2.0, 3.0] {
        let exact = lib(entropies(&spec, q))?.m_filtered;
        let est = lib(estimate_fse(&chain, q, 1024))?;
        let rel = (est.m_filtered - exact).abs() / exact;
        ensure(rel < 0.02, || format!("q={q}: {:.4} vs {exact:.4} ({:.2}%)", est.m_filtered, 100.0 * rel))?;
        notes.push(format!("q={q}: {:.4}±{:.4} vs {exact:.4}", est.m_filtered, est.std_error));
    }
    Ok(notes.join("; "))
}

/// Brick-wall circuits at depth N reproduce the exact Haar FSE.
fn circuit_convergence() -> Outcome {
    let n = 12;
    let d = 4096.0;
    let qs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for group in [Group::Unitary, Group::Orthogonal] {
        let mut per_q = vec![Vec::with_capacity(200); qs.len()];
        for i in 0..200u64 {
            let s = lib(brickwall_state(&CircuitSpec::new(n, group, derive_seed(8, i))))?;
            for (k, r) in lib(state_entropies(&s, &qs))?.into_iter().enumerate() {
                per_q[k].push(r.m_filtered);
            }
        }
        for (k, &q) in qs.iter().enumerate() {
            let (m, se) = (mean(&per_q[k]), std_error(&per_q[k]));
            let exact = lib(haar_entropy_exact(q, group, d))?.m_filtered;
            let line = format!("{group:?} q={q}: {m:.5}±{se:.5} vs {exact:.5} ({:.1}σ)", (m - exact) / se);
            if (m - exact).abs() > 3.0 * se {
                failures.push(line);
            } else if q == 2.0 || q == 6.0 {
                notes.push(line);
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(notes.join("; "))
}

/// Pooled regular-part histogram over `[lo, hi]` and mean fraction of
/// strings with `|x| > cut`, from one enumeration per state.
fn core_and_tail(
    states: &[StateVector],
    opts: &HistogramOptions,
    cut: f64,
) -> Result<(Vec<f64>, Vec<f64>, f64), String> {
    let mut density = vec![0.0; opts.bins];
    let mut centers = Vec::new();
    let mut tail = 0.0;
    let k = states.len() as f64;
    for s in states {
        let spec = lib(enumerate_spectrum(s))?;
        let h = lib(histogram(&spec, opts))?;
        centers = h.bin_centers();
        for (acc, v) in density.iter_mut().zip(&h.density) {
            *acc += v / k;
        }
        let v = spec.exact_values().unwrap();
        tail += v[1..].iter().filter(|x| x.abs() > cut).count() as f64 / v.len() as f64 / k;
    }
    Ok((centers, density, tail))
}

/// Mid-spectrum eigenstates of the clean and TRI-broken chains.
fn chaotic_eigenstates() -> Outcome {
    let goe = lib(random_matrix_gap_ratio(Group::Orthogonal, 2000, 5, 9))?;
    let gue = lib(random_matrix_gap_ratio(Group::Unitary, 2000, 5, 9))?;
    let mut notes = vec![format!("GOE ref {goe:.4}, GUE ref {gue:.4}")];
    for (tri_breaking, kind, reference) in [(false, Typicality::Real, goe), (true, Typicality::Complex, gue)] {
        let label = if tri_breaking { "TRI-broken" } else { "clean" };
        let sel = EigenSelection::with_count(100);
        let e12 = lib(mid_spectrum_eigenstates(&HamiltonianSpec::new(12).with_tri_breaking(tri_breaking), &sel))?;
        let e10 = lib(mid_spectrum_eigenstates(&HamiltonianSpec::new(10).with_tri_breaking(tri_breaking), &sel))?;

        let ens = EnsembleKind::new(kind, 12);
        let sb = ens.b().sqrt();
        let opts = HistogramOptions { bins: 30, lo: -3.0 * sb, hi: 3.0 * sb, separate_zeros: true };
        let (centers, density, t12) = core_and_tail(&e12.states, &opts, 5.0 * sb)?;
        let w = (opts.hi - opts.lo) / opts.bins as f64;
        let peak = typical_density(0.0, &ens);
        let mut worst = 0.0f64;
        for (c, v) in centers.iter().zip(&density) {
            // bin average of the Gaussian core
            let cdf = |x: f64| typical_regular_cdf(x, &ens);
            let expected = ens.regular_weight() * (cdf(c + w / 2.0) - cdf(c - w / 2.0)) / w;
            worst = worst.max((v - expected).abs());
        }
        ensure(worst <= 0.05 * peak, || format!("{label}: core deviation {:.2}% of peak", 100.0 * worst / peak))?;

        let s10 = EnsembleKind::new(kind, 10).b().sqrt();
        let (_, _, t10) = core_and_tail(&e10.states, &HistogramOptions::default(), 5.0 * s10)?;
        ensure(t12 < t10, || format!("{label}: tail weight {t12:e} (N=12) not below {t10:e} (N=10)"))?;

        let r = lib(gap_ratio(spectral_bulk(&e12.all_energies)))?;
        ensure((r - reference).abs() < 0.02, || format!("{label}: ⟨r⟩ = {r:.4} vs reference {reference:.4}"))?;
        notes.push(format!(
            "{label}: core dev {:.2}% of peak, tails {t10:.2e}→{t12:.2e}, ⟨r⟩ {r:.4}",
            100.0 * worst / peak
        ));
    }
    Ok(notes.join("; "))
}

/// Disorder scan: ergodic at weak disorder, size-insensitive deficit at strong disorder.
fn disorder_scan_check() -> Outcome {
    let real_haar = |n: usize| -> Result<f64, String> {
        Ok(lib(haar_entropy_exact(2.0, Group::Orthogonal, (1u64 << n) as f64))?.m_filtered / n as f64)
    };
    let run = |n: usize, w: f64, realizations: usize| -> Result<(f64, f64), String> {
        let template = HamiltonianSpec::new(n).with_disorder(0.0, 4242);
        let rows = lib(disorder_scan(&DisorderScanConfig::new(template, vec![w], vec![2.0], realizations)))?;
        Ok((rows[0].fse_density, rows[0].std_error))
    };
    let haar12 = real_haar(12)?;
    let (weak, weak_se) = run(12, 0.25, 10)?;
    ensure((weak - haar12).abs() < 0.05, || format!("W=0.25: {weak:.4} vs real-Haar {haar12:.4}"))?;
    let (s12, se12) = run(12, 5.0, 20)?;
    let (s10, se10) = run(10, 5.0, 20)?;
    ensure(haar12 - s12 > 0.2, || format!("W=5: {s12:.4} not 0.2 below {haar12:.4}"))?;
    ensure((s12 - s10).abs() <= se10 + se12, || format!("W=5: N=10 {s10:.4}±{se10:.4} vs N=12 {s12:.4}±{se12:.4}"))?;
    Ok(format!(
        "real Haar {haar12:.4}; W=0.25 {weak:.4}±{weak_se:.4}; W=5 N=10 {s10:.4}±{se10:.4}, N=12 {s12:.4}±{se12:.4}"
    ))
}

/// Subspace phase states: bounded FSE and the filtered/unfiltered contrast with Haar.
fn sps_bound() -> Outcome {
    let (n, k) = (12usize, 6usize);
    let qs: Vec<f64> = (1..=12).map(|i| 0.5 * i as f64).collect();
    let mut m6 = Vec::new();
    let mut mt6 = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..100u64 {
        let s = lib(sps_state(&SpsSpec { n_qubits: n, subset_log_size: k, seed: derive_seed(11, i) }))?;
        let reports = lib(state_entropies(&s, &qs))?;
        for r in &reports {
            worst = worst.max(r.m_filtered);
        }
        let r6 = reports.last().unwrap();
        m6.push(r6.m);
        mt6.push(r6.m_filtered);
    }
    ensure(worst <= 2.0 * k as f64 + 1e-9, || format!("max M̃_q = {worst:.4} exceeds 2k"))?;
    let haar = lib(haar_entropy_exact(6.0, Group::Unitary, 4096.0))?;
    let filtered_gap = haar.m_filtered - mean(&mt6);
    let plain_gap = haar.m - mean(&m6);
    ensure(filtered_gap > 1.0, || format!("filtered gap at q=6 is {filtered_gap:.3} bits"))?;
    ensure(plain_gap.abs() < 0.5, || format!("unfiltered gap at q=6 is {plain_gap:.3} bits"))?;
    Ok(format!("max M̃ {worst:.3}; q=6 gaps: filtered {filtered_gap:.3}, unfiltered {plain_gap:.3}"))
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "Haar moment oracle", haar_moment_oracle),
        (2, "unitary spectrum vs Beta law", unitary_spectrum_ks),
        (3, "orthogonal zero structure", orthogonal_zero_structure),
        (4, "stabilizer ground truth", stabilizer_ground_truth),
        (5, "filtered/unfiltered identity", filtered_identity),
        (6, "product-state analytics", product_state_analytics),
        (7, "sampler vs enumeration", sampler_vs_enumeration),
        (8, "circuit convergence", circuit_convergence),
        (9, "chaotic eigenstates", chaotic_eigenstates),
        (10, "disorder scan", disorder_scan_check),
        (11, "subspace phase state bound", sps_bound),
    ];
    let only: Option<Vec<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {id} ({name}): PASS [{secs:.1}s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} ({name}): FAIL [{secs:.1}s] {detail}");
            }
        }
    }
    if failed == 0 {
        println!("all selected criteria passed");
        return ExitCode::SUCCESS;
    }
    println!("{failed} criteria failed");
    if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
