//! Flux-qubit circuit constants to model parameters.
//!
//! A four-junction persistent-current qubit threaded by a resonator field
//! picks up a sigma-x coupling through its SQUID loop: modulating the SQUID
//! flux by delta Phi_sq (a + a^dag) turns the tunneling term into
//! hbar lambda (a + a^dag) sum_i sigma_i^x with
//! hbar lambda = -s2 E_J (delta Phi_sq / Phi_0). The dimensionless s2 comes
//! from the SQUID potential expansion and is taken as an input constant
//! (about 0.2 for alpha = 0.8). The spectrum depends on lambda only through
//! lambda^2, so the magnitude is kept and the sign dropped.

use crate::error::{Error, Result};
use crate::model::{Boundary, ChainModel, CouplingProfile, ProbeModel};

/// Four-junction flux qubit biased for persistent-current operation.
/// Energies are quoted as ordinary frequencies (E/2 pi hbar) in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxQubitCircuit {
    /// Main-junction Josephson energy E_J / 2 pi hbar, GHz.
    pub e_j_ghz: f64,
    /// SQUID-junction to main-junction energy ratio.
    pub alpha: f64,
    /// SQUID expansion coefficient entering the coupling.
    pub s2: f64,
    /// Resonator-induced SQUID flux modulation, units of Phi_0.
    pub delta_phi_sq: f64,
    /// Inductive qubit-qubit energy hbar J = M_qq I_cir^2, as J / 2 pi hbar
    /// in GHz.
    pub mutual_coupling_ghz: f64,
    /// Flux-difference bias of the main loops, units of Phi_0.
    pub f_d: f64,
    /// SQUID flux bias, units of Phi_0.
    pub f_sq: f64,
}

impl FluxQubitCircuit {
    /// Checks the operating-point invariants: positive Josephson energy,
    /// 0 < alpha < 2, sub-quantum flux modulation, and main loops biased at
    /// the degeneracy point f_d = 1.
    pub fn validate(&self) -> Result<()> {
        if self.e_j_ghz <= 0.0 || self.e_j_ghz.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "E_J/2 pi hbar = {} GHz, need > 0",
                self.e_j_ghz
            )));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 || self.alpha >= 2.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha = {}, need 0 < alpha < 2",
                self.alpha
            )));
        }
        if self.delta_phi_sq.is_nan() || self.delta_phi_sq.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "delta Phi_sq = {} Phi_0, need |.| < 1",
                self.delta_phi_sq
            )));
        }
        if (self.f_d - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "f_d = {}, persistent-current operation needs the degeneracy point f_d = 1",
                self.f_d
            )));
        }
        Ok(())
    }
}

/// Coupling strength |s2 E_J delta Phi_sq / Phi_0| as an ordinary frequency
/// in GHz. Linear in both s2 and the flux modulation.
pub fn coupling_strength(circuit: &FluxQubitCircuit) -> Result<f64> {
    circuit.validate()?;
    Ok((circuit.s2 * circuit.e_j_ghz * circuit.delta_phi_sq).abs())
}

/// Total Josephson energy
/// U_J = -E_J [cos phi_t + cos phi_b]
///       - 2 alpha E_J cos(pi f_sq) cos(phi_t + phi_b + pi f_d),
/// in the same GHz units as E_J. Pure evaluation; used for sanity plots and
/// the flux-sensitivity cross-check of the coupling strength.
pub fn josephson_potential(circuit: &FluxQubitCircuit, phi_t: f64, phi_b: f64) -> f64 {
    use std::f64::consts::PI;
    -circuit.e_j_ghz * (phi_t.cos() + phi_b.cos())
        - 2.0
            * circuit.alpha
            * circuit.e_j_ghz
            * (PI * circuit.f_sq).cos()
            * (phi_t + phi_b + PI * circuit.f_d).cos()
}

/// Analytic flux sensitivity dU_J/df_sq at fixed phases.
pub fn josephson_flux_sensitivity(circuit: &FluxQubitCircuit, phi_t: f64, phi_b: f64) -> f64 {
    use std::f64::consts::PI;
    2.0 * PI
        * circuit.alpha
        * circuit.e_j_ghz
        * (PI * circuit.f_sq).sin()
        * (phi_t + phi_b + PI * circuit.f_d).cos()
}

/// Array geometry and probe line parameters that do not come from the qubit
/// circuit itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeGeometry {
    pub n_sites: usize,
    pub omega_c_ghz: f64,
    pub kappa_khz: f64,
    pub epsilon_khz: f64,
    /// Transverse field as h_x/2J. The tunneling splitting is tuned by the
    /// SQUID flux in a device-specific way, so it stays a direct input.
    pub hx_over_2j: f64,
    pub n_th: f64,
    pub boundary: Boundary,
    pub coupling_profile: CouplingProfile,
}

/// Assembles the chain and probe models from circuit constants: J from the
/// mutual inductive energy, lambda from the SQUID flux modulation. Returns
/// any advisory diagnostics (currently the weak-probe check
/// lambda <= J/10).
pub fn build_models(
    circuit: &FluxQubitCircuit,
    geometry: &ProbeGeometry,
) -> Result<(ChainModel, ProbeModel, Vec<String>)> {
    circuit.validate()?;
    let j_ghz = circuit.mutual_coupling_ghz;
    let lambda_ghz = coupling_strength(circuit)?;
    let chain = ChainModel::new(
        geometry.n_sites,
        j_ghz,
        geometry.hx_over_2j,
        geometry.boundary,
        geometry.coupling_profile,
    )?;
    let probe = ProbeModel::from_lab_units(
        geometry.omega_c_ghz,
        geometry.kappa_khz,
        geometry.epsilon_khz,
        lambda_ghz * 1e3,
        geometry.n_th,
        j_ghz,
    )?;
    let mut warnings = Vec::new();
    if lambda_ghz > j_ghz / 10.0 {
        warnings.push(format!(
            "weak-probe assumption strained: lambda/2pi = {:.4} GHz exceeds J/20pi = {:.4} GHz",
            lambda_ghz,
            j_ghz / 10.0
        ));
    }
    Ok((chain, probe, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn paper_circuit() -> FluxQubitCircuit {
        FluxQubitCircuit {
            e_j_ghz: 200.0,
            alpha: 0.8,
            s2: 0.2,
            delta_phi_sq: 1e-3,
            mutual_coupling_ghz: 1.0,
            f_d: 1.0,
            f_sq: 0.25,
        }
    }

    fn paper_geometry() -> ProbeGeometry {
        ProbeGeometry {
            n_sites: 20,
            omega_c_ghz: 12.0,
            kappa_khz: 100.0,
            epsilon_khz: 600.0,
            hx_over_2j: 0.5,
            n_th: 0.0,
            boundary: Boundary::Periodic,
            coupling_profile: CouplingProfile::Uniform,
        }
    }

    #[test]
    fn coupling_strength_benchmark_forty_mhz() {
        let lambda = coupling_strength(&paper_circuit()).unwrap();
        assert_relative_eq!(lambda, 0.04, max_relative = 1e-15);
    }

    #[test]
    fn coupling_strength_linear_and_zero_cases() {
        let mut c = paper_circuit();
        c.delta_phi_sq = 0.0;
        assert_eq!(coupling_strength(&c).unwrap(), 0.0);
        c.delta_phi_sq = 0.5e-3;
        let half = coupling_strength(&c).unwrap();
        c.delta_phi_sq = 1e-3;
        let full = coupling_strength(&c).unwrap();
        assert_relative_eq!(full, 2.0 * half, max_relative = 1e-14);
        c.s2 = 0.1;
        assert_relative_eq!(
            coupling_strength(&c).unwrap(),
            0.5 * full,
            max_relative = 1e-14
        );
    }

    #[test]
    fn invariants_rejected() {
        let mut c = paper_circuit();
        c.f_d = 0.5;
        assert!(coupling_strength(&c).is_err());
        let mut c = paper_circuit();
        c.alpha = 2.5;
        assert!(c.validate().is_err());
        let mut c = paper_circuit();
        c.delta_phi_sq = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn potential_frustration_point() {
        let mut c = paper_circuit();
        c.f_sq = 0.5;
        // cos(pi/2) kills the SQUID term
        let u = josephson_potential(&c, 0.3, -0.7);
        assert_relative_eq!(
            u,
            -200.0 * (0.3_f64.cos() + 0.7_f64.cos()),
            max_relative = 1e-14
        );
    }

    #[test]
    fn potential_direct_substitution() {
        let mut c = paper_circuit();
        c.f_sq = 0.0;
        let u = josephson_potential(&c, 0.0, 0.0);
        // cos(pi f_d) = cos(pi) = -1
        assert_relative_eq!(
            u,
            -2.0 * c.e_j_ghz + 2.0 * c.alpha * c.e_j_ghz,
            max_relative = 1e-14
        );
    }

    #[test]
    fn potential_periodic_in_both_fluxes() {
        let c = paper_circuit();
        let u0 = josephson_potential(&c, 0.4, 0.9);
        let mut shifted = c;
        shifted.f_sq += 2.0;
        assert_relative_eq!(
            josephson_potential(&shifted, 0.4, 0.9),
            u0,
            max_relative = 1e-12
        );
        let mut shifted = c;
        shifted.f_d += 2.0;
        assert_relative_eq!(
            josephson_potential(&shifted, 0.4, 0.9),
            u0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn flux_sensitivity_matches_finite_difference() {
        let c = paper_circuit();
        let (phi_t, phi_b) = (0.12, -0.05);
        let h = 1e-6;
        let mut plus = c;
        plus.f_sq += h;
        let mut minus = c;
        minus.f_sq -= h;
        let fd = (josephson_potential(&plus, phi_t, phi_b)
            - josephson_potential(&minus, phi_t, phi_b))
            / (2.0 * h);
        let analytic = josephson_flux_sensitivity(&c, phi_t, phi_b);
        assert_relative_eq!(fd, analytic, max_relative = 1e-8);
    }

    #[test]
    fn build_models_paper_defaults() {
        let (chain, probe, warnings) =
            build_models(&paper_circuit(), &paper_geometry()).unwrap();
        assert_eq!(chain.j_ghz(), 1.0);
        assert_relative_eq!(probe.lambda, 0.04, max_relative = 1e-12);
        assert_relative_eq!(probe.omega_c, 12.0, max_relative = 1e-15);
        assert!(warnings.is_empty());
    }

    #[test]
    fn build_models_weak_probe_warning() {
        let mut c = paper_circuit();
        c.delta_phi_sq = 5e-3; // lambda = 0.2 GHz > J/10
        let (_, probe, warnings) = build_models(&c, &paper_geometry()).unwrap();
        assert!(probe.lambda > 0.1);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn build_models_zero_coupling() {
        let mut c = paper_circuit();
        c.delta_phi_sq = 0.0;
        let (_, probe, _) = build_models(&c, &paper_geometry()).unwrap();
        assert_eq!(probe.lambda, 0.0);
    }
}
