//! Brute-force certification: dense diagonalization of the full 2^N
//! Hamiltonian and Lehmann-representation spectral densities, independent of
//! every closed-form path in this crate.
//!
//! Two Hamiltonians are available. `ed_hamiltonian` is the spin chain itself,
//! assembled from Pauli operators in the sigma-z product basis; for open
//! boundaries the Jordan-Wigner mapping is an exact isomorphism, so this is
//! the reference for every open-chain result. `fermionized_hamiltonian` is
//! the strictly periodic fermion chain (the boundary parity term dropped),
//! which is the model the analytic Bogoliubov solution actually
//! diagonalizes; periodic closed forms are certified against it. The
//! difference between the two at small N is the documented boundary-parity
//! residual: the spin chain samples the half-integer momentum grid in its
//! even-parity sector, so only peak positions, not weights, can be compared
//! there.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{Boundary, ChainModel, ProbeModel, ThermalState};
use crate::response::{kernel_spectrum, SpectrumSeries};
use crate::spectral::SpectralDensity;

/// Largest chain the dense Hamiltonian builders accept.
pub const ED_HAMILTONIAN_GUARD: usize = 12;
/// Largest chain the Lehmann decomposition accepts (needs every matrix
/// element).
pub const ED_LEHMANN_GUARD: usize = 10;

/// Degeneracy tolerance when forming thermal weights at T = 0.
const DEGENERACY_TOL: f64 = 1e-12;

/// Lehmann components below this absolute weight are numerical noise from
/// the 4^N matrix-element sum and are dropped.
const WEIGHT_NOISE_FLOOR: f64 = 1e-12;

/// Coupling operator choices for the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    /// Q = sum_i sigma_i^x.
    UniformSigmaX,
    /// Q = sum_i sin(2 pi i / N) sigma_i^x.
    SineSigmaX,
    /// Q = sigma_i^x + sigma_j^x, one-based sites.
    PairSigmaX(usize, usize),
}

impl CouplingKind {
    fn site_weights(&self, n: usize) -> Result<Vec<f64>> {
        match *self {
            CouplingKind::UniformSigmaX => Ok(vec![1.0; n]),
            CouplingKind::SineSigmaX => Ok((1..=n)
                .map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).sin())
                .collect()),
            CouplingKind::PairSigmaX(i, j) => {
                let mut w = vec![0.0; n];
                for site in [i, j] {
                    if site == 0 || site > n {
                        return Err(Error::SiteOutOfRange { site, n_sites: n });
                    }
                    w[site - 1] += 1.0;
                }
                Ok(w)
            }
        }
    }
}

fn guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::ResourceGuard {
            n_sites: n,
            limit,
        });
    }
    Ok(())
}

/// Spin Hamiltonian H = -J sum_i sigma_i^z sigma_{i+1}^z minus
/// (h_x/2) sum_i sigma_i^x in the sigma-z product basis (bit b_i of the
/// basis index is site i, sigma_z eigenvalue 1 - 2 b_i). The wrap bond is
/// included iff the boundary is periodic.
pub fn ed_hamiltonian(chain: &ChainModel) -> Result<DMatrix<f64>> {
    let n = chain.n_sites();
    guard(n, ED_HAMILTONIAN_GUARD)?;
    let j = chain.ising_coupling();
    let hx = chain.transverse_field();
    let dim = 1usize << n;
    let n_bonds = match chain.boundary() {
        Boundary::Periodic => n,
        Boundary::Open => n - 1,
    };
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let mut diag = 0.0;
        for b in 0..n_bonds {
            let zi = 1.0 - 2.0 * ((s >> b) & 1) as f64;
            let zj = 1.0 - 2.0 * ((s >> ((b + 1) % n)) & 1) as f64;
            diag += -j * zi * zj;
        }
        h[(s, s)] = diag;
        for b in 0..n {
            h[(s ^ (1 << b), s)] += -0.5 * hx;
        }
    }
    Ok(h)
}

/// Jordan-Wigner annihilation operators as dense 2^N matrices in the
/// occupation basis: c_i = (prod_{j<i} Z_j) |0><1|_i.
fn fermion_operators(n: usize) -> Vec<DMatrix<f64>> {
    let dim = 1usize << n;
    (0..n)
        .map(|i| {
            let mut c = DMatrix::zeros(dim, dim);
            for s in 0..dim {
                if (s >> i) & 1 == 1 {
                    let string = (s & ((1 << i) - 1)).count_ones();
                    let sign = if string % 2 == 0 { 1.0 } else { -1.0 };
                    c[(s ^ (1 << i), s)] = sign;
                }
            }
            c
        })
        .collect()
}

/// The strictly periodic fermion chain with Hamiltonian
/// -J sum_{i=1..N} (c_i^dag c_{i+1}^dag + c_i^dag c_{i+1} + h.c.) plus
/// h_x sum_i c_i^dag c_i, where c_{N+1} = c_1 and no boundary parity factor:
/// exactly the Hamiltonian the momentum-space Bogoliubov solution
/// diagonalizes. For open boundaries the wrap bond is simply absent and the
/// result is unitarily identical to `ed_hamiltonian`.
pub fn fermionized_hamiltonian(chain: &ChainModel) -> Result<DMatrix<f64>> {
    let n = chain.n_sites();
    guard(n, ED_HAMILTONIAN_GUARD)?;
    let j = chain.ising_coupling();
    let hx = chain.transverse_field();
    let dim = 1usize << n;
    let cs = fermion_operators(n);
    let mut h = DMatrix::zeros(dim, dim);
    let n_bonds = match chain.boundary() {
        Boundary::Periodic => n,
        Boundary::Open => n - 1,
    };
    for b in 0..n_bonds {
        let ci = &cs[b];
        let cj = &cs[(b + 1) % n];
        let hop_pair = ci.transpose() * (cj.transpose() + cj);
        h += -j * (&hop_pair + hop_pair.transpose());
    }
    for c in &cs {
        h += hx * (c.transpose() * c);
    }
    Ok(h)
}

/// The coupling operator in the same basis as `ed_hamiltonian`
/// (sigma_i^x flips bit i).
pub fn q_matrix_spin(n: usize, coupling: CouplingKind) -> Result<DMatrix<f64>> {
    let w = coupling.site_weights(n)?;
    let dim = 1usize << n;
    let mut q = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        for (i, wi) in w.iter().enumerate() {
            q[(s ^ (1 << i), s)] += wi;
        }
    }
    Ok(q)
}

/// The coupling operator in the fermion occupation basis, where
/// sigma_i^x = 1 - 2 c_i^dag c_i is diagonal.
pub fn q_matrix_fermion(n: usize, coupling: CouplingKind) -> Result<DMatrix<f64>> {
    let w = coupling.site_weights(n)?;
    let dim = 1usize << n;
    let mut q = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let mut d = 0.0;
        for (i, wi) in w.iter().enumerate() {
            d += wi * (1.0 - 2.0 * ((s >> i) & 1) as f64);
        }
        q[(s, s)] = d;
    }
    Ok(q)
}

/// Dense eigensystem with thermal weights.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    energies: Vec<f64>,
    states: DMatrix<f64>,
}

impl EigenSystem {
    /// Diagonalizes a real symmetric Hamiltonian; energies ascending.
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        let asym = (h - h.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::Diagonalization {
                message: format!("Hamiltonian not symmetric (|H - H^T| = {asym:.3e})"),
                condition: f64::NAN,
            });
        }
        let eig = SymmetricEigen::new(h.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut states = DMatrix::zeros(h.nrows(), h.ncols());
        for (col, &i) in order.iter().enumerate() {
            states.set_column(col, &eig.eigenvectors.column(i));
        }
        Ok(Self { energies, states })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn states(&self) -> &DMatrix<f64> {
        &self.states
    }

    /// Largest deviation of the eigenbasis from orthonormality.
    pub fn orthonormality_deviation(&self) -> f64 {
        let gram = self.states.transpose() * &self.states;
        let dim = gram.nrows();
        (gram - DMatrix::<f64>::identity(dim, dim)).amax()
    }

    /// Boltzmann weights at the given thermal state. At T = 0 the weight is
    /// shared uniformly over the (numerically) degenerate ground manifold,
    /// which is the T -> 0 limit of the thermal ensemble.
    pub fn partition_weights(&self, state: &ThermalState) -> Vec<f64> {
        let e0 = self.energies[0];
        if state.is_zero_temperature() {
            let deg = self
                .energies
                .iter()
                .take_while(|&&e| e - e0 <= DEGENERACY_TOL)
                .count();
            let mut w = vec![0.0; self.energies.len()];
            for wi in w.iter_mut().take(deg) {
                *wi = 1.0 / deg as f64;
            }
            return w;
        }
        let beta = state.beta_hbar_j();
        let mut w: Vec<f64> = self
            .energies
            .iter()
            .map(|&e| (-beta * (e - e0)).exp())
            .collect();
        let z: f64 = w.iter().sum();
        for wi in &mut w {
            *wi /= z;
        }
        w
    }

    /// Thermal expectation Tr(rho O).
    pub fn thermal_expectation(&self, op: &DMatrix<f64>, state: &ThermalState) -> f64 {
        let w = self.partition_weights(state);
        let transformed = self.states.transpose() * op * &self.states;
        w.iter()
            .enumerate()
            .map(|(b, wb)| wb * transformed[(b, b)])
            .sum()
    }
}

/// Which Hamiltonian the Lehmann density diagonalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleBasis {
    /// The spin chain, Eq.-of-motion exact for open boundaries.
    Spin,
    /// The strictly periodic fermion chain, the analytic solution's model.
    FermionizedPeriodic,
}

/// Ground-truth <Q^2(omega)>: components at omega = E_a - E_b with weights
/// sum_b p_b |<a|Q|b>|^2, merged like every other spectral density.
/// Degenerate levels are summed by the merge, which makes the result
/// basis-independent within degenerate subspaces.
pub fn lehmann_density(
    chain: &ChainModel,
    state: &ThermalState,
    coupling: CouplingKind,
    basis: OracleBasis,
) -> Result<SpectralDensity> {
    let n = chain.n_sites();
    guard(n, ED_LEHMANN_GUARD)?;
    let (h, q) = match basis {
        OracleBasis::Spin => (ed_hamiltonian(chain)?, q_matrix_spin(n, coupling)?),
        OracleBasis::FermionizedPeriodic => (
            fermionized_hamiltonian(chain)?,
            q_matrix_fermion(n, coupling)?,
        ),
    };
    let eig = EigenSystem::new(&h)?;
    let weights = eig.partition_weights(state);
    let q_eig = eig.states().transpose() * q * eig.states();
    let dim = eig.energies().len();
    let mut raw = Vec::new();
    for b in 0..dim {
        if weights[b] == 0.0 {
            continue;
        }
        for a in 0..dim {
            let me = q_eig[(a, b)];
            let w = weights[b] * me * me;
            if w > WEIGHT_NOISE_FLOOR {
                raw.push((eig.energies()[a] - eig.energies()[b], w));
            }
        }
    }
    Ok(SpectralDensity::from_raw(0.0, raw))
}

/// The reference resonator spectrum: the response kernel applied to the
/// Lehmann density. The bath line is omitted; it is common to both routes,
/// so the series is pure C_QQ.
pub fn oracle_spectrum(
    chain: &ChainModel,
    probe: &ProbeModel,
    state: &ThermalState,
    coupling: CouplingKind,
    basis: OracleBasis,
    grid: &[f64],
) -> Result<SpectrumSeries> {
    let density = lehmann_density(chain, state, coupling, basis)?;
    Ok(kernel_spectrum(probe, &density, grid))
}

/// Outcome of matching a closed-form density against a Lehmann density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityComparison {
    /// Largest |center difference| over matched components, units of J.
    pub max_center_deviation: f64,
    /// Largest relative weight mismatch over matched components (floored by
    /// an absolute scale of 1e-9 of the total weight).
    pub max_weight_deviation: f64,
    /// Heaviest component that found no partner, relative to total weight.
    pub max_unmatched_weight: f64,
    pub matched_components: usize,
}

impl DensityComparison {
    pub fn max_deviation(&self) -> f64 {
        self.max_center_deviation
            .max(self.max_weight_deviation)
            .max(self.max_unmatched_weight)
    }
}

/// Matches two merged densities component by component with a center window
/// `center_tol` (units of J). The zero weights are compared like a
/// component.
pub fn compare_densities(
    closed_form: &SpectralDensity,
    reference: &SpectralDensity,
    center_tol: f64,
) -> DensityComparison {
    let total = reference.total_weight().abs().max(1.0);
    let floor = 1e-9 * total;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(floor);
    let mut max_center: f64 = 0.0;
    let mut max_weight: f64 = if closed_form
        .zero_weight()
        .abs()
        .max(reference.zero_weight().abs())
        > floor
    {
        rel(closed_form.zero_weight(), reference.zero_weight())
    } else {
        0.0
    };
    let mut max_unmatched: f64 = 0.0;
    let a = closed_form.components();
    let b = reference.components();
    let (mut i, mut j) = (0usize, 0usize);
    let mut matched = 0usize;
    while i < a.len() || j < b.len() {
        if i < a.len() && j < b.len() && (a[i].center - b[j].center).abs() <= center_tol {
            max_center = max_center.max((a[i].center - b[j].center).abs());
            max_weight = max_weight.max(rel(a[i].weight, b[j].weight));
            matched += 1;
            i += 1;
            j += 1;
        } else if j >= b.len() || (i < a.len() && a[i].center < b[j].center) {
            max_unmatched = max_unmatched.max(a[i].weight / total);
            i += 1;
        } else {
            max_unmatched = max_unmatched.max(b[j].weight / total);
            j += 1;
        }
    }
    DensityComparison {
        max_center_deviation: max_center,
        max_weight_deviation: max_weight,
        max_unmatched_weight: max_unmatched,
        matched_components: matched,
    }
}

/// True when `gap` appears as a level difference of `energies` (sorted
/// ascending) within `tol`.
pub fn spectrum_contains_gap(energies: &[f64], gap: f64, tol: f64) -> bool {
    for (i, &ei) in energies.iter().enumerate() {
        let target = ei + gap;
        let j = energies[i..].partition_point(|&e| e < target - tol) + i;
        if j < energies.len() && (energies[j] - target).abs() <= tol {
            return true;
        }
    }
    false
}
