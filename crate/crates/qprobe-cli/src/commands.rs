//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qprobe::{
    adaptive_grid, assemble_spectrum, compare_densities, density_open, density_sine_coupling,
    density_uniform_periodic, ed_hamiltonian, equal_time_qq, equal_time_spectrum, extract_peaks,
    lehmann_density, max_array_size, max_array_size_general,
    oracle::{q_matrix_fermion, q_matrix_spin, spectrum_contains_gap},
    solve, solve_open, solve_periodic, spectral_density, Boundary, ChainModel, CouplingKind,
    CouplingProfile, EigenSystem, Error as CoreError, FermionSolution, OccupationStatistics,
    OracleBasis, Peak, SpectralDensity, ThermalState,
};
use rayon::prelude::*;

use crate::config::{format_f64, OutputFormat, RunConfig};
use crate::output::{self, SweepPoint};

/// Failure modes mapped to process exit codes.
pub enum CliError {
    /// Exit 2.
    Config(String),
    /// Exit 3.
    ResourceGuard(String),
    /// Exit 4.
    Certification(String),
    /// Exit 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::ResourceGuard(_) => 3,
            CliError::Certification(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::ResourceGuard(m)
            | CliError::Certification(m)
            | CliError::Io(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::ResourceGuard { .. } => CliError::ResourceGuard(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn open_output(path: &Path) -> Result<BufWriter<File>, CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

/// Peak-extraction floor: far above tail noise, far below any real line.
fn peak_floor(series: &qprobe::SpectrumSeries) -> f64 {
    1e-6 * series.total().iter().cloned().fold(0.0, f64::max)
}

fn compute_point(config: &RunConfig) -> Result<(qprobe::SpectrumSeries, SpectralDensity, Vec<Peak>), CliError> {
    let chain = config.chain()?;
    let probe = config.probe()?;
    let state = config.thermal_state()?;
    let density = spectral_density(&chain, &state)?;
    let grid = adaptive_grid(&probe, &chain, &density);
    let series = assemble_spectrum(&probe, &density, &grid);
    let peaks = extract_peaks(&series, peak_floor(&series))?;
    Ok((series, density, peaks))
}

pub fn run_spectrum(
    config: &RunConfig,
    out_path: &Path,
    format: OutputFormat,
) -> Result<(), CliError> {
    let (series, _, peaks) = compute_point(config)?;
    let mut w = open_output(out_path)?;
    match format {
        OutputFormat::Csv => output::spectrum_csv(&mut w, config, &series)?,
        OutputFormat::Json => output::spectrum_json(&mut w, config, &series, &peaks)?,
    }
    w.flush()?;
    Ok(())
}

pub fn run_sweep(config: &RunConfig, out_path: &Path, format: OutputFormat) -> Result<(), CliError> {
    let Some(sweep) = &config.sweep else {
        return Err(CliError::Config(
            "sweep mode needs sweep_param/sweep_start/sweep_stop/sweep_steps".into(),
        ));
    };
    let values = sweep.values();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let results: Vec<Result<SweepPoint, CliError>> = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(index, &value)| {
                let point_config = config.at_sweep_value(value);
                let (series, density, peaks) = compute_point(&point_config)?;
                Ok(SweepPoint {
                    index,
                    value,
                    series,
                    peaks,
                    gap_over_j: density.min_positive_center(),
                })
            })
            .collect()
    });
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        points.push(r?);
    }
    let mut w = open_output(out_path)?;
    match format {
        OutputFormat::Csv => output::sweep_csv(&mut w, config, &points)?,
        OutputFormat::Json => output::sweep_json(&mut w, config, &points)?,
    }
    w.flush()?;
    Ok(())
}

pub fn run_equal_time(
    config: &RunConfig,
    out_path: &Path,
    format: OutputFormat,
) -> Result<(), CliError> {
    let chain = config.chain()?;
    let probe = config.probe()?;
    let state = config.thermal_state()?;
    let result = equal_time_spectrum(&probe, &chain, &state, config.pair)?;
    if !result.scale_separated {
        eprintln!(
            "warning: omega_c = {:.3} J is below 5 (4J + 2 h_x); the equal-time \
             approximation degrades",
            probe.omega_c
        );
    }
    let mut rows: Vec<(&str, String)> = vec![
        ("c_t0", format_f64(result.value)),
        ("qq", format_f64(result.qq)),
        ("scale_separated", result.scale_separated.to_string()),
    ];
    if let Some((i, j)) = config.pair {
        rows.push(("pair_i", i.to_string()));
        rows.push(("pair_j", j.to_string()));
        let solution = solve(&chain)?;
        let sxx = qprobe::sigma_x_expectation(&solution, &state, i, j)?;
        rows.push(("sigma_x_pair", format_f64(sxx)));
    }
    let mut w = open_output(out_path)?;
    match format {
        OutputFormat::Csv => output::report_csv(&mut w, config, &rows)?,
        OutputFormat::Json => output::report_json(&mut w, config, &rows)?,
    }
    w.flush()?;
    Ok(())
}

pub fn run_backaction(
    config: &RunConfig,
    out_path: &Path,
    format: OutputFormat,
) -> Result<(), CliError> {
    let chain = config.chain()?;
    let probe = config.probe()?;
    let named = max_array_size(&probe, &chain)?;
    let general = max_array_size_general(&probe, &chain)?;
    let rows: Vec<(&str, String)> = vec![
        ("photon_bound", format_f64(named.photon_bound)),
        ("shift_over_j", format_f64(named.shift)),
        ("spacing_over_j", format_f64(named.spacing)),
        ("regime", format!("{:?}", named.regime)),
        ("max_n", named.max_n.to_string()),
        ("max_n_general", general.max_n.to_string()),
        ("valid", named.valid.to_string()),
        (
            "perturbative_validity",
            qprobe::perturbative_validity(&probe, &chain).to_string(),
        ),
        ("q0_exact", format_f64(named.q0_exact)),
        ("q0_half_n", format_f64(named.q0_half_n)),
    ];
    let mut w = open_output(out_path)?;
    match format {
        OutputFormat::Csv => output::report_csv(&mut w, config, &rows)?,
        OutputFormat::Json => output::report_json(&mut w, config, &rows)?,
    }
    w.flush()?;
    Ok(())
}

/// Certification tolerance on merged centers (units of J) and weights
/// (relative).
const CERTIFY_TOL: f64 = 1e-6;
/// Tolerance for the boundary-parity gap cross-check.
const GAP_TOL: f64 = 1e-9;

struct CertifyOutcome {
    label: String,
    deviation: f64,
}

fn certify_case(
    scenario: &str,
    n: usize,
    h2j: f64,
    t_mk: f64,
    j_ghz: f64,
) -> Result<CertifyOutcome, CliError> {
    let state = ThermalState::new(t_mk, j_ghz, OccupationStatistics::FermiDirac)?;
    let label = format!("{scenario:16} N={n} h_x/2J={h2j:<4} T={t_mk:>5} mK");
    let deviation = match scenario {
        "uniform-periodic" | "sine-coupling" => {
            let profile = if scenario == "uniform-periodic" {
                CouplingProfile::Uniform
            } else {
                CouplingProfile::SineLowestEvenMode
            };
            let coupling = if scenario == "uniform-periodic" {
                CouplingKind::UniformSigmaX
            } else {
                CouplingKind::SineSigmaX
            };
            let chain = ChainModel::new(n, j_ghz, h2j, Boundary::Periodic, profile)?;
            let modes = solve_periodic(&chain)?;
            let density = match profile {
                CouplingProfile::Uniform => density_uniform_periodic(&modes, &state)?,
                CouplingProfile::SineLowestEvenMode => density_sine_coupling(&modes, &state)?,
            };
            let oracle =
                lehmann_density(&chain, &state, coupling, OracleBasis::FermionizedPeriodic)?;
            let cmp = compare_densities(&density, &oracle, CERTIFY_TOL);
            // the spin chain only has to reproduce line positions: its
            // boundary parity term moves weights between momentum sectors
            let spin = EigenSystem::new(&ed_hamiltonian(&chain)?)?;
            for comp in density.components() {
                if !spectrum_contains_gap(spin.energies(), comp.center.abs(), GAP_TOL) {
                    return Err(CliError::Certification(format!(
                        "{label}: line at {:.6} J is not a spin-chain gap",
                        comp.center
                    )));
                }
            }
            cmp.max_deviation()
        }
        "open-boundary" => {
            let chain =
                ChainModel::new(n, j_ghz, h2j, Boundary::Open, CouplingProfile::Uniform)?;
            let modes = solve_open(&chain)?;
            let density = density_open(&modes, &state)?;
            let oracle =
                lehmann_density(&chain, &state, CouplingKind::UniformSigmaX, OracleBasis::Spin)?;
            compare_densities(&density, &oracle, CERTIFY_TOL).max_deviation()
        }
        "pair-equal-time" => {
            let pair = (1, n / 2 + 1);
            let mut worst: f64 = 0.0;
            for boundary in [Boundary::Periodic, Boundary::Open] {
                let chain =
                    ChainModel::new(n, j_ghz, h2j, boundary, CouplingProfile::Uniform)?;
                let (solution, q, h) = match boundary {
                    Boundary::Periodic => (
                        FermionSolution::Periodic(solve_periodic(&chain)?),
                        q_matrix_fermion(n, CouplingKind::PairSigmaX(pair.0, pair.1))?,
                        qprobe::fermionized_hamiltonian(&chain)?,
                    ),
                    Boundary::Open => (
                        FermionSolution::Open(solve_open(&chain)?),
                        q_matrix_spin(n, CouplingKind::PairSigmaX(pair.0, pair.1))?,
                        ed_hamiltonian(&chain)?,
                    ),
                };
                let qq = equal_time_qq(&solution, &state, Some(pair))?;
                let eig = EigenSystem::new(&h)?;
                let reference = eig.thermal_expectation(&(&q * &q), &state);
                worst = worst.max((qq - reference).abs() / reference.abs().max(1.0));
            }
            worst
        }
        other => return Err(CliError::Config(format!("unknown scenario {other}"))),
    };
    Ok(CertifyOutcome { label, deviation })
}

pub fn run_certify(config: &RunConfig, out_path: Option<&Path>) -> Result<(), CliError> {
    let sizes: Vec<usize> = [2usize, 3, 4, 6]
        .into_iter()
        .filter(|&n| n <= config.n_sites.clamp(2, 6))
        .collect();
    let mut lines = Vec::new();
    let mut max_dev: f64 = 0.0;
    let mut failed = false;
    for scenario in [
        "uniform-periodic",
        "sine-coupling",
        "open-boundary",
        "pair-equal-time",
    ] {
        for &n in &sizes {
            for h2j in [0.2, 1.0, 1.5] {
                for t_mk in [0.0, 100.0] {
                    let outcome = certify_case(scenario, n, h2j, t_mk, config.j_ghz)?;
                    let ok = outcome.deviation < CERTIFY_TOL;
                    failed |= !ok;
                    max_dev = max_dev.max(outcome.deviation);
                    lines.push(format!(
                        "{} deviation {:.3e} {}",
                        outcome.label,
                        outcome.deviation,
                        if ok { "ok" } else { "FAIL" }
                    ));
                }
            }
        }
    }
    lines.push(format!(
        "max deviation {max_dev:.3e} over {} cases (tolerance {CERTIFY_TOL:.0e})",
        lines.len()
    ));
    let report = lines.join("\n");
    println!("{report}");
    if let Some(path) = out_path {
        let mut w = open_output(path)?;
        writeln!(w, "{report}")?;
        w.flush()?;
    }
    if failed {
        return Err(CliError::Certification(format!(
            "max deviation {max_dev:.3e} exceeds {CERTIFY_TOL:.0e}"
        )));
    }
    Ok(())
}
