//! Microwave spectroscopy of a transverse-field Ising chain through a damped
//! resonator probe.
//!
//! A resonator coupled to the chain by hbar lambda (a + a^dag) Q picks up
//! sidebands at the frequencies of Q's fluctuations, so its measured
//! spectrum C(omega) reads out the chain's elementary excitations. This
//! crate computes C(omega) for three coupling scenarios (uniform and
//! sine-profile coupling on periodic chains, uniform coupling on open
//! chains), bounds the probe backaction, derives the coupling strength from
//! flux-qubit circuit constants, and certifies every closed-form spectral
//! density against an independent exact-diagonalization oracle on small
//! chains.
//!
//! Internally all frequencies are angular and in units of the Ising coupling
//! J; [`model`] owns the conversion to laboratory units and the thermal
//! occupation factors.

pub mod backaction;
pub mod circuit;
pub mod error;
pub mod fermionization;
pub mod model;
pub mod oracle;
pub mod response;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{
    Boundary, ChainModel, CouplingProfile, MomentumGrid, OccupationStatistics, ProbeModel,
    ThermalState,
};
pub use fermionization::{
    bogoliubov_angle, dispersion, sigma_x_expectation, solve, solve_open, solve_periodic,
    FermionSolution, OpenModes, PeriodicModes,
};
pub use spectral::{
    density_open, density_sine_coupling, density_uniform_periodic, equal_time_qq,
    spectral_density, SpectralComponent, SpectralDensity,
};
pub use response::{
    adaptive_grid, assemble_spectrum, bath_spectrum, equal_time_spectrum, extract_peaks,
    kernel_response, kernel_spectrum, lorentzian, total_spectrum, total_spectrum_auto,
    EqualTimeSpectrum, Peak, PeakList, SpectrumSeries,
};
pub use backaction::{
    frequency_shift_estimate, max_array_size, max_array_size_general, perturbative_validity,
    photon_number_bound, BackactionReport, Regime,
};
pub use circuit::{
    build_models, coupling_strength, josephson_potential, FluxQubitCircuit, ProbeGeometry,
};
pub use oracle::{
    compare_densities, ed_hamiltonian, fermionized_hamiltonian, lehmann_density, oracle_spectrum,
    CouplingKind, DensityComparison, EigenSystem, OracleBasis,
};
