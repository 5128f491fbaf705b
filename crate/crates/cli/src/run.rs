//! Execution of a resolved [`RunConfig`].

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use paulispec::analytics::{self, EnsembleKind};
use paulispec::ensembles::{self, derive_seed};
use paulispec::hamiltonians::{self, DisorderScanConfig, EthReport};
use paulispec::sampler::{self, SamplerConfig};
use paulispec::spectrum::{self, Histogram};
use paulispec::stats::{mean, std_error};
use paulispec::{
    CircuitSpec, EigenSelection, EntropyReport, Error, Group, HamiltonianSpec, PauliString, SpsSpec, StateVector,
    VERSION,
};

use crate::config::*;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PAULISPEC_OUT_DIR";

/// Output directory plus the manifest echoed next to every file.
struct Sink {
    dir: PathBuf,
    manifest: serde_json::Value,
    written: Vec<PathBuf>,
}

impl Sink {
    fn new(config: &RunConfig) -> Result<Self> {
        let dir = match &config.out {
            Some(p) => p.clone(),
            None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
        };
        fs::create_dir_all(&dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let rerun =
            RunConfig { schema_version: config.schema_version, threads: None, out: None, task: config.task.clone() };
        let manifest = serde_json::json!({
            "tool": "paulispec",
            "version": VERSION,
            "config": rerun,
        });
        Ok(Self { dir, manifest, written: Vec::new() })
    }

    /// Write `name` through `fill`, then `name.manifest.json`.
    fn emit(&mut self, name: &str, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        let mut w = BufWriter::new(file);
        fill(&mut w)?;
        w.flush()?;
        let mut manifest = self.manifest.clone();
        manifest["output"] = serde_json::Value::String(name.to_string());
        let mpath = self.dir.join(format!("{name}.manifest.json"));
        write_json_file(&mpath, &manifest)?;
        self.written.push(path);
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.emit(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("cannot write {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Runs `config` and returns the paths written.
pub fn execute(mut config: RunConfig) -> Result<Vec<PathBuf>> {
    if config.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidArgument(format!(
            "config schema_version {} is not supported (expected {SCHEMA_VERSION})",
            config.schema_version
        ))
        .into());
    }
    config.resolve();
    let mut sink = Sink::new(&config)?;
    match &config.task {
        Task::Spectrum(a) => run_spectrum(a, &mut sink)?,
        Task::Entropy(a) => run_entropy(a, &mut sink)?,
        Task::Sample(a) => run_sample(a, &mut sink)?,
        Task::Circuit(a) => run_circuit(a, &mut sink)?,
        Task::Hamiltonian(a) => run_hamiltonian(a, &mut sink)?,
        Task::Sps(a) => run_sps(a, &mut sink)?,
        Task::DisorderScan(a) => run_disorder_scan(a, &mut sink)?,
        Task::ReferenceCurve(a) => run_reference_curve(a, &mut sink)?,
    }
    Ok(sink.written)
}

fn build_state(src: &SourceArgs) -> Result<StateVector> {
    let n = src.n;
    let state = match src.kind {
        SourceKind::HaarUnitary => ensembles::haar_state(n, Group::Unitary, src.seed)?,
        SourceKind::HaarOrthogonal => ensembles::haar_state(n, Group::Orthogonal, src.seed)?,
        SourceKind::CircuitUnitary | SourceKind::CircuitOrthogonal => {
            let group = if src.kind == SourceKind::CircuitUnitary { Group::Unitary } else { Group::Orthogonal };
            let spec = CircuitSpec::new(n, group, src.seed).with_depth(src.depth.unwrap_or(n));
            ensembles::brickwall_state(&spec)?
        }
        SourceKind::Stabilizer => ensembles::random_stabilizer_state(n, src.seed)?,
        SourceKind::Theta => {
            let (theta, phi) = ensembles::theta_angles();
            ensembles::product_state(theta, phi, n)?
        }
        SourceKind::Sps => {
            ensembles::sps_state(&SpsSpec { n_qubits: n, subset_log_size: src.k.unwrap_or(n / 2), seed: src.seed })?
        }
        SourceKind::Eigenstate => {
            let spec =
                HamiltonianSpec::new(n).with_tri_breaking(src.tri_breaking).with_disorder(src.disorder, src.seed);
            let mut eig = hamiltonians::mid_spectrum_eigenstates(&spec, &EigenSelection::with_count(1))?;
            eig.states.remove(0)
        }
        SourceKind::File => {
            let Some(path) = &src.path else {
                return Err(Error::InvalidArgument("source `file` needs a path".into()).into());
            };
            let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            let state = StateVector::read_binary(std::io::BufReader::new(f))?;
            if state.n_qubits() != n {
                return Err(Error::InvalidArgument(format!(
                    "{} holds {} qubits, config says {n}",
                    path.display(),
                    state.n_qubits()
                ))
                .into());
            }
            state
        }
    };
    Ok(state)
}

fn run_spectrum(a: &SpectrumArgs, sink: &mut Sink) -> Result<()> {
    let opts = a.binning.options();
    opts.validate()?;
    if a.source.n > spectrum::ENUMERATION_MAX_QUBITS {
        return Err(Error::Capability(format!(
            "exact spectra are capped at N = {}; use `sample --histogram`",
            spectrum::ENUMERATION_MAX_QUBITS
        ))
        .into());
    }
    let state = build_state(&a.source)?;
    let h = spectrum::histogram(&spectrum::enumerate_spectrum(&state)?, &opts)?;
    sink.emit("spectrum.csv", |w| Ok(h.write_csv(w)?))
}

fn run_entropy(a: &EntropyArgs, sink: &mut Sink) -> Result<()> {
    if a.source.n > spectrum::ENUMERATION_MAX_QUBITS {
        return Err(Error::Capability(format!(
            "exact entropies are capped at N = {}; use `sample`",
            spectrum::ENUMERATION_MAX_QUBITS
        ))
        .into());
    }
    let state = build_state(&a.source)?;
    let reports: Vec<EntropyReport> =
        spectrum::state_entropies(&state, &a.qs)?.into_iter().map(|r| r.with_seed(a.source.seed)).collect();
    sink.emit_json("entropy.json", &reports)
}

fn run_sample(a: &SampleArgs, sink: &mut Sink) -> Result<()> {
    let mut config = SamplerConfig::new(a.steps, a.chain_seed).with_chains(a.chains);
    config.burn_in = a.burn_in;
    config.validate()?;
    if a.qs.is_empty() {
        return Err(Error::InvalidArgument("at least one Rényi order is required".into()).into());
    }
    let state = build_state(&a.source)?;
    let chains = sampler::run_chains(&state, &config)?;
    let all: Vec<_> = chains.iter().flatten().copied().collect();
    let batches = sampler::DEFAULT_BATCHES * config.n_chains;
    let mut reports = Vec::with_capacity(a.qs.len());
    for &q in &a.qs {
        let est = sampler::estimate_fse_with(&all, q, state.dim(), batches)?;
        reports.push(sampler::FseReport {
            q,
            m_filtered: est.m_filtered,
            std_error: est.std_error,
            steps: config.steps,
            burn_in: config.resolved_burn_in(state.n_qubits()),
            n_chains: config.n_chains,
            seed: config.seed,
        });
    }
    sink.emit_json("fse.json", &reports)?;
    if a.dump_chain {
        sink.emit("chain.csv", |w| Ok(sampler::write_chain_csv(&chains[0], w)?))?;
    }
    if a.histogram {
        let est = sampler::estimate_spectrum(&all, state.n_qubits(), state.is_real(), &Default::default())?;
        let h = spectrum::histogram(&est, &Default::default())?;
        sink.emit("spectrum.csv", |w| Ok(h.write_csv(w)?))?;
    }
    Ok(())
}

fn check_realizations(r: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 realizations for error bars, got {r}")).into());
    }
    Ok(())
}

/// Per-realization entropies, one row per `(realization, q)`.
#[derive(Serialize)]
struct EnsembleSummary {
    q: f64,
    #[serde(rename = "M_mean")]
    m_mean: f64,
    #[serde(rename = "M_std_error")]
    m_std_error: f64,
    #[serde(rename = "M_filtered_mean")]
    m_filtered_mean: f64,
    #[serde(rename = "M_filtered_std_error")]
    m_filtered_std_error: f64,
    #[serde(rename = "haar_M")]
    haar_m: f64,
    #[serde(rename = "haar_M_filtered")]
    haar_m_filtered: f64,
    realizations: usize,
}

fn ensemble_outputs(
    name: &str,
    group: Group,
    n: usize,
    qs: &[f64],
    seed: u64,
    reports: &[Vec<EntropyReport>],
    sink: &mut Sink,
) -> Result<()> {
    sink.emit(&format!("{name}.csv"), |w| {
        writeln!(w, "realization,seed,q,M,M_filtered")?;
        for (r, rep) in reports.iter().enumerate() {
            for e in rep {
                writeln!(w, "{r},{},{},{},{}", derive_seed(seed, r as u64), e.q, e.m, e.m_filtered)?;
            }
        }
        Ok(())
    })?;
    let d = (1u64 << n) as f64;
    let mut summary = Vec::with_capacity(qs.len());
    for (k, &q) in qs.iter().enumerate() {
        let m: Vec<f64> = reports.iter().map(|r| r[k].m).collect();
        let mf: Vec<f64> = reports.iter().map(|r| r[k].m_filtered).collect();
        let haar = analytics::haar_entropy_exact(q, group, d)?;
        summary.push(EnsembleSummary {
            q,
            m_mean: mean(&m),
            m_std_error: std_error(&m),
            m_filtered_mean: mean(&mf),
            m_filtered_std_error: std_error(&mf),
            haar_m: haar.m,
            haar_m_filtered: haar.m_filtered,
            realizations: reports.len(),
        });
    }
    sink.emit_json(&format!("{name}-summary.json"), &summary)
}

fn run_circuit(a: &CircuitArgs, sink: &mut Sink) -> Result<()> {
    check_realizations(a.realizations)?;
    let group: Group = a.group.into();
    let depth = a.depth.unwrap_or(a.n);
    CircuitSpec::new(a.n, group, a.seed).with_depth(depth).validate()?;
    let reports = (0..a.realizations as u64)
        .into_par_iter()
        .map(|r| {
            let spec = CircuitSpec::new(a.n, group, derive_seed(a.seed, r)).with_depth(depth);
            spectrum::state_entropies(&ensembles::brickwall_state(&spec)?, &a.qs)
        })
        .collect::<paulispec::Result<Vec<_>>>()?;
    ensemble_outputs("circuit", group, a.n, &a.qs, a.seed, &reports, sink)
}

fn run_sps(a: &SpsArgs, sink: &mut Sink) -> Result<()> {
    check_realizations(a.realizations)?;
    let k = a.k.unwrap_or(a.n / 2);
    SpsSpec { n_qubits: a.n, subset_log_size: k, seed: a.seed }.validate()?;
    let reports = (0..a.realizations as u64)
        .into_par_iter()
        .map(|r| {
            let spec = SpsSpec { n_qubits: a.n, subset_log_size: k, seed: derive_seed(a.seed, r) };
            spectrum::state_entropies(&ensembles::sps_state(&spec)?, &a.qs)
        })
        .collect::<paulispec::Result<Vec<_>>>()?;
    ensemble_outputs("sps", Group::Orthogonal, a.n, &a.qs, a.seed, &reports, sink)
}

#[derive(Serialize)]
struct LevelStats {
    n_levels: usize,
    bulk_levels: usize,
    /// Mean gap ratio over the spectral bulk; `None` if degenerate.
    gap_ratio: Option<f64>,
    gap_ratio_error: Option<String>,
    poisson_gap_ratio: f64,
    center: f64,
}

fn run_hamiltonian(a: &HamiltonianArgs, sink: &mut Sink) -> Result<()> {
    let spec = HamiltonianSpec::new(a.n).with_tri_breaking(a.tri_breaking).with_disorder(a.disorder, a.seed);
    spec.validate()?;
    let pattern = a.eth_pattern.as_deref().map(|p| PauliString::parse(p, a.n)).transpose()?;
    let selection = EigenSelection { n_ev: a.n_ev, center: center(a.center, a.energy) };
    let eig = match &a.cache_dir {
        Some(dir) => hamiltonians::cached_eigenstates(dir, &spec, &selection)?,
        None => hamiltonians::mid_spectrum_eigenstates(&spec, &selection)?,
    };
    let rows =
        eig.states.par_iter().map(|s| spectrum::state_entropies(s, &a.qs)).collect::<paulispec::Result<Vec<_>>>()?;
    sink.emit("eigenstates.csv", |w| {
        writeln!(w, "index,energy,q,M,M_filtered")?;
        for (k, (e, rep)) in eig.energies.iter().zip(&rows).enumerate() {
            for r in rep {
                writeln!(w, "{k},{e},{},{},{}", r.q, r.m, r.m_filtered)?;
            }
        }
        Ok(())
    })?;
    let bulk = hamiltonians::spectral_bulk(&eig.all_energies);
    let (gap_ratio, gap_ratio_error) = match hamiltonians::gap_ratio(bulk) {
        Ok(r) => (Some(r), None),
        Err(e @ (Error::Degenerate(_) | Error::InvalidArgument(_))) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let stats = LevelStats {
        n_levels: eig.all_energies.len(),
        bulk_levels: bulk.len(),
        gap_ratio,
        gap_ratio_error,
        poisson_gap_ratio: hamiltonians::POISSON_GAP_RATIO,
        center: eig.center,
    };
    sink.emit_json("levels.json", &stats)?;
    if let Some(p) = pattern {
        let report: EthReport = hamiltonians::eth_local_statistics(&[eig.states], &p)?;
        sink.emit_json("eth.json", &report)?;
    }
    Ok(())
}

fn run_disorder_scan(a: &DisorderScanArgs, sink: &mut Sink) -> Result<()> {
    let template = HamiltonianSpec::new(a.n).with_tri_breaking(a.tri_breaking).with_disorder(0.0, a.seed);
    let mut cfg = DisorderScanConfig::new(template, a.ws.clone(), a.qs.clone(), a.realizations);
    cfg.n_ev = a.n_ev;
    cfg.center = center(a.center, None);
    let rows = hamiltonians::disorder_scan(&cfg)?;
    sink.emit("scan.csv", |w| Ok(hamiltonians::write_scan_csv(&rows, w)?))
}

fn run_reference_curve(a: &ReferenceCurveArgs, sink: &mut Sink) -> Result<()> {
    let opts = a.binning.options();
    opts.validate()?;
    if a.n == 0 || a.n > 62 {
        bail!(Error::InvalidArgument(format!("reference curves need 1 ≤ N ≤ 62, got {}", a.n)));
    }
    let group: Group = a.group.into();
    let d = (1u64 << a.n) as f64;
    let ens = EnsembleKind::with_dim(group.into(), d)?;
    let cdf = |x: f64| match a.model {
        CurveModel::Haar => analytics::haar_regular_cdf(x, group, d),
        CurveModel::Typical => analytics::typical_regular_cdf(x, &ens),
    };
    let mut h = Histogram::empty(&opts)?;
    let width = h.bin_width();
    let weight = ens.regular_weight();
    for k in 0..h.bins() {
        let lo = h.lo + k as f64 * width;
        h.density[k] = weight * (cdf(lo + width) - cdf(lo)) / width;
    }
    let masses = match a.model {
        CurveModel::Haar => analytics::haar_point_masses(group, d),
        CurveModel::Typical => analytics::typical_point_masses(&ens),
    };
    for p in masses {
        match h.bin_of(p.x) {
            Some(k) if a.binning.keep_zeros && p.x == 0.0 => h.density[k] += p.weight / width,
            _ => h.add_point_mass(p.x, p.weight),
        }
    }
    sink.emit("reference-curve.csv", |w| Ok(h.write_csv(w)?))
}
