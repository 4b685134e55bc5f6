//! Physical configuration shared by every other module: chain and probe
//! parameters, unit conventions, momentum grids, and thermal occupation
//! factors.
//!
//! Internally every frequency is an angular frequency in units of the Ising
//! coupling `J` (so `J = 1`). Externally, configuration is written the way
//! experiments quote it: ordinary frequencies `nu = omega/2pi` in Hz-derived
//! units and temperatures in millikelvin. The conversion between the two
//! happens here and nowhere else.

use crate::error::{Error, Result};

/// Planck constant, J s (exact SI value).
pub const H_PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact SI value).
pub const K_BOLTZMANN: f64 = 1.380_649e-23;

/// Frequencies closer to zero than this (in units of J) are treated as exact
/// zero modes. A zero mode is its own particle-hole partner, so its
/// occupation is pinned to 1/2 at every temperature, including T = 0 where it
/// is the degenerate-ground-manifold average.
pub const ZERO_MODE_FLOOR: f64 = 1e-12;

/// Smallest `beta*hbar*omega` admitted by the Bose reproduction mode before
/// the occupation is considered divergent.
pub const BOSE_BETA_OMEGA_FLOOR: f64 = 1e-6;

/// Boundary condition of the Ising chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Spatial profile of the resonator-chain coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingProfile {
    /// Every site couples with the same strength: Q = sum_i sigma_i^x.
    Uniform,
    /// Sites sample the lowest even resonator mode:
    /// Q = sum_i sin(2 pi i / N) sigma_i^x. Defined on the periodic momentum
    /// grid only.
    SineLowestEvenMode,
}

/// Occupation statistics used for the quasiparticle modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OccupationStatistics {
    /// 1/(e^{beta hbar omega} + 1). The eigenmodes are fermions, so this is
    /// the choice consistent with the Wick contractions and the one
    /// certified against exact diagonalization.
    FermiDirac,
    /// 1/(e^{beta hbar omega} - 1), kept as an opt-in reproduction mode.
    /// Diverges as omega -> 0 at finite temperature and is not guaranteed to
    /// produce nonnegative spectral weights.
    Bose,
}

/// Transverse-field Ising chain parameters.
///
/// `hx_over_2j` is the dimensionless field h_x/2J, which puts the quantum
/// critical point at 1. The coupling `J` itself enters only through `j_ghz`
/// (the ordinary frequency J/2pi in GHz) used for unit conversion; all
/// internal formulas take J = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainModel {
    n_sites: usize,
    j_ghz: f64,
    hx_over_2j: f64,
    boundary: Boundary,
    coupling_profile: CouplingProfile,
}

impl ChainModel {
    pub fn new(
        n_sites: usize,
        j_ghz: f64,
        hx_over_2j: f64,
        boundary: Boundary,
        coupling_profile: CouplingProfile,
    ) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_sites = {n_sites}, need at least 2"
            )));
        }
        if j_ghz <= 0.0 || !j_ghz.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "J/2pi = {j_ghz} GHz, need J > 0"
            )));
        }
        if hx_over_2j < 0.0 || !hx_over_2j.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "h_x/2J = {hx_over_2j}, need h_x >= 0"
            )));
        }
        if coupling_profile == CouplingProfile::SineLowestEvenMode && boundary != Boundary::Periodic
        {
            return Err(Error::InvalidParameter(
                "the sine coupling profile is defined on the periodic momentum grid only".into(),
            ));
        }
        Ok(Self {
            n_sites,
            j_ghz,
            hx_over_2j,
            boundary,
            coupling_profile,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Ising coupling in internal units: identically 1.
    pub fn ising_coupling(&self) -> f64 {
        1.0
    }

    /// Transverse field h_x in units of J.
    pub fn transverse_field(&self) -> f64 {
        2.0 * self.hx_over_2j
    }

    pub fn hx_over_2j(&self) -> f64 {
        self.hx_over_2j
    }

    /// Ordinary frequency J/2pi in GHz, the anchor for unit conversion.
    pub fn j_ghz(&self) -> f64 {
        self.j_ghz
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn coupling_profile(&self) -> CouplingProfile {
        self.coupling_profile
    }

    /// Returns a copy with a different field ratio (used by parameter sweeps).
    pub fn with_hx_over_2j(&self, hx_over_2j: f64) -> Result<Self> {
        Self::new(
            self.n_sites,
            self.j_ghz,
            hx_over_2j,
            self.boundary,
            self.coupling_profile,
        )
    }

    /// Converts an ordinary frequency in GHz to an angular frequency in
    /// units of J. The 2pi factors cancel, so this is nu/nu_J.
    pub fn frequency_to_j_units(&self, nu_ghz: f64) -> f64 {
        nu_ghz / self.j_ghz
    }

    /// Inverse of [`Self::frequency_to_j_units`].
    pub fn frequency_to_ghz(&self, omega_j: f64) -> f64 {
        omega_j * self.j_ghz
    }

    /// The N momenta k = 2 pi m / N with -N/2 < m <= N/2, sorted ascending.
    pub fn momentum_grid(&self) -> Result<MomentumGrid> {
        if self.boundary != Boundary::Periodic {
            return Err(Error::BoundaryMismatch {
                operation: "momentum_grid",
                required: Boundary::Periodic,
            });
        }
        Ok(MomentumGrid::new(self.n_sites))
    }
}

/// Momentum grid of a periodic chain: k = 2 pi m / N, -N/2 < m <= N/2.
///
/// The integer labels `m` are kept so that shifted momenta (k - 2pi/N and
/// momentum reflections) can be looked up exactly, without floating-point
/// wraparound.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    n_sites: usize,
    m: Vec<i64>,
    values: Vec<f64>,
}

impl MomentumGrid {
    fn new(n_sites: usize) -> Self {
        let n = n_sites as i64;
        let m: Vec<i64> = (-n..=n).filter(|mk| 2 * *mk > -n && 2 * *mk <= n).collect();
        debug_assert_eq!(m.len(), n_sites);
        let values = m.iter().map(|&mk| Self::momentum(mk, n)).collect();
        Self { n_sites, m, values }
    }

    fn momentum(m: i64, n: i64) -> f64 {
        2.0 * std::f64::consts::PI * m as f64 / n as f64
    }

    pub fn len(&self) -> usize {
        self.n_sites
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[i64] {
        &self.m
    }

    /// Index of the momentum with integer label `m`, wrapped into
    /// -N/2 < m <= N/2.
    pub fn index_of_label(&self, m: i64) -> usize {
        let n = self.n_sites as i64;
        let mut mw = m.rem_euclid(n);
        if 2 * mw > n {
            mw -= n;
        }
        self.m
            .iter()
            .position(|&x| x == mw)
            .expect("wrapped label is always on the grid")
    }

    /// Index of -k for the grid point at `index`. The endpoints k = 0 and
    /// (even N) k = pi map to themselves.
    pub fn negation_index(&self, index: usize) -> usize {
        self.index_of_label(-self.m[index])
    }

    /// Index of the shifted momentum k - 2 pi/N, wrapping -pi to +pi.
    pub fn shifted_index(&self, index: usize) -> usize {
        self.index_of_label(self.m[index] - 1)
    }
}

/// Thermal environment of the chain.
///
/// Stores `beta * hbar * J` (dimensionless, infinite at T = 0) so that
/// occupation factors only ever see frequencies in units of J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    temperature_mk: f64,
    beta_hbar_j: f64,
    statistics: OccupationStatistics,
}

impl ThermalState {
    pub fn new(
        temperature_mk: f64,
        j_ghz: f64,
        statistics: OccupationStatistics,
    ) -> Result<Self> {
        if temperature_mk < 0.0 || !temperature_mk.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "temperature = {temperature_mk} mK, need T >= 0"
            )));
        }
        if j_ghz <= 0.0 || j_ghz.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "J/2pi = {j_ghz} GHz, need J > 0"
            )));
        }
        let beta_hbar_j = if temperature_mk == 0.0 {
            f64::INFINITY
        } else {
            // beta hbar J = h nu_J / (k_B T)
            H_PLANCK * j_ghz * 1e9 / (K_BOLTZMANN * temperature_mk * 1e-3)
        };
        Ok(Self {
            temperature_mk,
            beta_hbar_j,
            statistics,
        })
    }

    pub fn temperature_mk(&self) -> f64 {
        self.temperature_mk
    }

    pub fn statistics(&self) -> OccupationStatistics {
        self.statistics
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta_hbar_j.is_infinite()
    }

    /// `beta * hbar * J`; multiply by a frequency in units of J to get the
    /// exponent of the occupation factor.
    pub fn beta_hbar_j(&self) -> f64 {
        self.beta_hbar_j
    }

    /// Mean occupation of a mode at frequency `omega` (units of J).
    ///
    /// Fermi-Dirac: 1/(e^{beta hbar omega} + 1). At T = 0 every mode with
    /// omega > 0 is empty, exactly. A mode at omega = 0 (within
    /// [`ZERO_MODE_FLOOR`]) sits at the particle-hole symmetric point, so its
    /// occupation is 1/2 at every temperature; at T = 0 this is the average
    /// over the degenerate ground manifold, which is what a thermal ensemble
    /// relaxes to.
    ///
    /// Bose: 1/(e^{beta hbar omega} - 1); rejects `beta hbar omega` below
    /// [`BOSE_BETA_OMEGA_FLOOR`] at T > 0, returns 0 at T = 0.
    pub fn occupancy(&self, omega: f64) -> Result<f64> {
        if omega < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "occupancy of negative frequency {omega}"
            )));
        }
        match self.statistics {
            OccupationStatistics::FermiDirac => {
                if omega <= ZERO_MODE_FLOOR {
                    return Ok(0.5);
                }
                if self.is_zero_temperature() {
                    return Ok(0.0);
                }
                let x = self.beta_hbar_j * omega;
                Ok(1.0 / (x.exp() + 1.0))
            }
            OccupationStatistics::Bose => {
                if self.is_zero_temperature() {
                    return Ok(0.0);
                }
                let x = self.beta_hbar_j * omega;
                if x < BOSE_BETA_OMEGA_FLOOR {
                    return Err(Error::OccupancyDiverges {
                        beta_omega: x,
                        floor: BOSE_BETA_OMEGA_FLOOR,
                    });
                }
                Ok(1.0 / (x.exp_m1()))
            }
        }
    }
}

/// Damped resonator probe. All frequencies in units of J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeModel {
    pub omega_c: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub n_th: f64,
}

impl ProbeModel {
    pub fn new(omega_c: f64, kappa: f64, lambda: f64, epsilon: f64, n_th: f64) -> Result<Self> {
        for (name, value, strictly_positive) in [
            ("omega_c", omega_c, true),
            ("kappa", kappa, true),
            ("epsilon", epsilon, true),
            ("lambda", lambda, false),
            ("n_th", n_th, false),
        ] {
            if !value.is_finite()
                || (strictly_positive && value <= 0.0)
                || (!strictly_positive && value < 0.0)
            {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {value} (in units of J)"
                )));
            }
        }
        Ok(Self {
            omega_c,
            kappa,
            lambda,
            epsilon,
            n_th,
        })
    }

    /// Builds a probe from the units experiments quote: resonator frequency
    /// in GHz, linewidths in kHz, coupling in MHz, all as ordinary
    /// frequencies, anchored to J/2pi in GHz.
    pub fn from_lab_units(
        omega_c_ghz: f64,
        kappa_khz: f64,
        epsilon_khz: f64,
        lambda_mhz: f64,
        n_th: f64,
        j_ghz: f64,
    ) -> Result<Self> {
        if j_ghz <= 0.0 || j_ghz.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "J/2pi = {j_ghz} GHz, need J > 0"
            )));
        }
        Self::new(
            omega_c_ghz / j_ghz,
            kappa_khz * 1e-6 / j_ghz,
            lambda_mhz * 1e-3 / j_ghz,
            epsilon_khz * 1e-6 / j_ghz,
            n_th,
        )
    }

    /// Effective bath linewidth kappa + epsilon.
    pub fn kappa_tilde(&self) -> f64 {
        self.kappa + self.epsilon
    }
}
