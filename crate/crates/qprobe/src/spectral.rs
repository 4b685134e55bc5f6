//! Spectral decomposition of the coupling-operator fluctuations,
//! <Q^2(omega)> = sum_c weight_c * delta(omega - center_c), for each of the
//! three coupling scenarios, plus the equal-time <Q Q> used by spatial
//! correlation probes.
//!
//! Weights come from Wick contractions of the free-fermion thermal state and
//! are certified term by term against exact diagonalization (see the
//! `oracle` module). Positive centers are emission lines that survive at
//! T = 0; negative centers carry occupation factors and vanish there.

use crate::error::{Error, Result};
use crate::fermionization::{FermionSolution, OpenModes, PeriodicModes};
use crate::model::{Boundary, ChainModel, CouplingProfile, ThermalState};

/// Components whose centers differ by less than this (units of J) are merged.
/// Keeps the flat-band limit from producing N copies of the same delta.
pub const MERGE_TOL: f64 = 1e-9;

/// One delta component of <Q^2(omega)>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralComponent {
    pub center: f64,
    pub weight: f64,
}

/// Weighted delta decomposition of <Q^2(omega)>. The omega = 0 weight is
/// kept apart from the finite-frequency components: it feeds the elastic
/// (zero-frequency) part of the resonator response.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralDensity {
    zero_weight: f64,
    components: Vec<SpectralComponent>,
}

impl SpectralDensity {
    /// Builds a density from raw (center, weight) pairs: sorts, merges
    /// centers within [`MERGE_TOL`], folds near-zero centers into the zero
    /// weight, and drops exactly-zero weights.
    pub fn from_raw(zero_weight: f64, raw: Vec<(f64, f64)>) -> Self {
        let mut raw: Vec<(f64, f64)> = raw.into_iter().filter(|&(_, w)| w != 0.0).collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut zero = zero_weight;
        let mut components: Vec<SpectralComponent> = Vec::with_capacity(raw.len());
        for (center, weight) in raw {
            if center.abs() < MERGE_TOL {
                zero += weight;
                continue;
            }
            match components.last_mut() {
                Some(last) if (center - last.center).abs() < MERGE_TOL => {
                    // weight-averaged center keeps merged lines where the
                    // cluster actually sits
                    let total = last.weight + weight;
                    last.center = (last.center * last.weight + center * weight) / total;
                    last.weight = total;
                }
                _ => components.push(SpectralComponent { center, weight }),
            }
        }
        components.retain(|c| c.weight != 0.0);
        Self {
            zero_weight: zero,
            components,
        }
    }

    pub fn zero_weight(&self) -> f64 {
        self.zero_weight
    }

    pub fn components(&self) -> &[SpectralComponent] {
        &self.components
    }

    /// zero weight plus all component weights: the equal-time <Q^2>.
    pub fn total_weight(&self) -> f64 {
        self.zero_weight + self.components.iter().map(|c| c.weight).sum::<f64>()
    }

    pub fn negative_weight(&self) -> f64 {
        self.components
            .iter()
            .filter(|c| c.center < 0.0)
            .map(|c| c.weight)
            .sum()
    }

    /// Smallest positive component center, if any.
    pub fn min_positive_center(&self) -> Option<f64> {
        self.components
            .iter()
            .filter(|c| c.center > 0.0)
            .map(|c| c.center)
            .fold(None, |acc, c| Some(acc.map_or(c, |a: f64| a.min(c))))
    }

    pub fn is_empty(&self) -> bool {
        self.zero_weight == 0.0 && self.components.is_empty()
    }

    /// Scales every weight (used by linearity checks).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            zero_weight: self.zero_weight * factor,
            components: self
                .components
                .iter()
                .map(|c| SpectralComponent {
                    center: c.center,
                    weight: c.weight * factor,
                })
                .collect(),
        }
    }
}

/// <Q^2(omega)> for the uniform coupling Q = sum_i sigma_i^x on a periodic
/// chain.
///
/// With a_k = u_k^2 - v_k^2 and q0 = N - 2 sum_k v_k^2, the static part
/// contributes Y0 = q0^2 + 4 sum_k (a_k^2 - q0 a_k) n_k plus the
/// double sum 4 sum over k != k' of a_k a_k' n_k n_k', all at omega = 0.
/// Each grid momentum with a nonvanishing pairing amplitude u_k v_k adds
/// pair lines at both signs of 2 omega_k with weights
/// 8 u_k^2 v_k^2 (1 - n_k)^2 and 8 u_k^2 v_k^2 n_k^2; the momentum
/// reflection degeneracy then merges them into 16 u^2 v^2 per distinct
/// line, the constant fixed by matching the exact-diagonalization Lehmann
/// weights.
pub fn density_uniform_periodic(
    modes: &PeriodicModes,
    state: &ThermalState,
) -> Result<SpectralDensity> {
    let n = modes.n_sites();
    let nk = modes.occupations(state)?;
    let a: Vec<f64> = (0..n)
        .map(|i| {
            let (u, v) = (modes.u(i), modes.v(i));
            u * u - v * v
        })
        .collect();
    let q0 = n as f64 - 2.0 * (0..n).map(|i| modes.v(i).powi(2)).sum::<f64>();

    let sum_an: f64 = a.iter().zip(&nk).map(|(ai, ni)| ai * ni).sum();
    let sum_a2n: f64 = a.iter().zip(&nk).map(|(ai, ni)| ai * ai * ni).sum();
    let sum_a2n2: f64 = a.iter().zip(&nk).map(|(ai, ni)| ai * ai * ni * ni).sum();
    let y0 = q0 * q0 + 4.0 * (sum_a2n - q0 * sum_an) + 4.0 * (sum_an * sum_an - sum_a2n2);

    let mut raw = Vec::with_capacity(2 * n);
    for (i, &ni) in nk.iter().enumerate() {
        let uv = modes.u(i) * modes.v(i);
        if uv == 0.0 {
            continue;
        }
        let w = modes.omega()[i];
        let uv2 = 8.0 * uv * uv;
        raw.push((2.0 * w, uv2 * (1.0 - ni) * (1.0 - ni)));
        raw.push((-2.0 * w, uv2 * ni * ni));
    }
    Ok(SpectralDensity::from_raw(y0, raw))
}

/// <Q^2(omega)> for the site-dependent coupling
/// Q = sum_i sin(2 pi i / N) sigma_i^x on a periodic chain.
///
/// The sine profile exchanges momentum 2 pi / N, so the lines sit at the
/// one-particle exchange frequencies +-(omega_k - omega_kbar) and the pair
/// frequencies +-(omega_k + omega_kbar), kbar = k - 2 pi/N wrapped onto the
/// grid. The Wick amplitudes per grid momentum are
/// (u_k u_kbar - v_k v_kbar)^2 for the exchange lines and
/// (u_k v_kbar + v_k u_kbar)^2 for the pair lines; both certified against
/// exact diagonalization.
pub fn density_sine_coupling(
    modes: &PeriodicModes,
    state: &ThermalState,
) -> Result<SpectralDensity> {
    if modes.chain().coupling_profile() != CouplingProfile::SineLowestEvenMode {
        return Err(Error::ProfileMismatch {
            operation: "density_sine_coupling",
        });
    }
    let n = modes.n_sites();
    if n == 2 {
        // sin(pi i) vanishes on every site: the coupling operator is
        // identically zero.
        return Ok(SpectralDensity::from_raw(0.0, Vec::new()));
    }
    let nk = modes.occupations(state)?;
    let grid = modes.grid();
    let mut raw = Vec::with_capacity(4 * n);
    for i in 0..n {
        let j = grid.shifted_index(i);
        let (wk, wkb) = (modes.omega()[i], modes.omega()[j]);
        let (u, v) = (modes.u(i), modes.v(i));
        let (ub, vb) = (modes.u(j), modes.v(j));
        let (nkk, nkb) = (nk[i], nk[j]);
        let exchange = (u * ub - v * vb).powi(2);
        let pair = (u * vb + v * ub).powi(2);
        raw.push((-(wk - wkb), exchange * nkk * (1.0 - nkb)));
        raw.push((wk - wkb, exchange * (1.0 - nkk) * nkb));
        raw.push((-(wk + wkb), pair * nkk * nkb));
        raw.push((wk + wkb, pair * (1.0 - nkk) * (1.0 - nkb)));
    }
    Ok(SpectralDensity::from_raw(0.0, raw))
}

/// <Q^2(omega)> for the uniform coupling on an open chain.
///
/// The coefficients are not tabulated anywhere in closed form; they follow
/// from Wick's theorem applied to Q = N - 2 sum_i c_i^dag c_i expressed in
/// the eta modes. With G = g g^T, H = h h^T and Gamma = g h^T:
/// exchange lines at omega_n - omega_m weigh
/// 4 (G_mn - H_mn)^2 n_m (1 - n_n); pair lines at +-(omega_m + omega_n)
/// weigh 4 (Gamma_mn - Gamma_nm)^2 times (1-n_m)(1-n_n) or n_m n_n; the
/// omega = 0 weight is the full static second moment including the
/// disconnected <Q>^2 piece.
pub fn density_open(modes: &OpenModes, state: &ThermalState) -> Result<SpectralDensity> {
    let dev = modes.canonical_deviation();
    if dev > 1e-8 {
        return Err(Error::NonCanonicalModes { deviation: dev });
    }
    let n = modes.n_sites();
    let nm = modes.occupations(state)?;
    let g = modes.g();
    let h = modes.h();
    let gg = g * g.transpose();
    let hh = h * h.transpose();
    let gh = g * h.transpose();

    // static part: Q_0 = c0 + sum_m b_m eta_m^dag eta_m
    let c0 = n as f64 - 2.0 * hh.diagonal().sum();
    let b: Vec<f64> = (0..n).map(|m| -2.0 * (gg[(m, m)] - hh[(m, m)])).collect();
    let sum_bn: f64 = b.iter().zip(&nm).map(|(bm, nmm)| bm * nmm).sum();
    let sum_b2n: f64 = b.iter().zip(&nm).map(|(bm, nmm)| bm * bm * nmm).sum();
    let sum_b2n2: f64 = b
        .iter()
        .zip(&nm)
        .map(|(bm, nmm)| bm * bm * nmm * nmm)
        .sum();
    let zero = c0 * c0 + 2.0 * c0 * sum_bn + (sum_bn * sum_bn - sum_b2n2) + sum_b2n;

    let mut raw = Vec::with_capacity(2 * n * n);
    for m in 0..n {
        for q in 0..n {
            if m == q {
                continue;
            }
            let amp = gg[(m, q)] - hh[(m, q)];
            raw.push((
                modes.omega()[q] - modes.omega()[m],
                4.0 * amp * amp * nm[m] * (1.0 - nm[q]),
            ));
        }
    }
    for m in 0..n {
        for q in m + 1..n {
            let amp = gh[(m, q)] - gh[(q, m)];
            let amp2 = 4.0 * amp * amp;
            let wsum = modes.omega()[m] + modes.omega()[q];
            raw.push((wsum, amp2 * (1.0 - nm[m]) * (1.0 - nm[q])));
            raw.push((-wsum, amp2 * nm[m] * nm[q]));
        }
    }
    Ok(SpectralDensity::from_raw(zero, raw))
}

/// Dispatches to the density builder selected by the chain's boundary and
/// coupling profile.
pub fn spectral_density(chain: &ChainModel, state: &ThermalState) -> Result<SpectralDensity> {
    match (chain.boundary(), chain.coupling_profile()) {
        (Boundary::Periodic, CouplingProfile::Uniform) => {
            let modes = crate::fermionization::solve_periodic(chain)?;
            density_uniform_periodic(&modes, state)
        }
        (Boundary::Periodic, CouplingProfile::SineLowestEvenMode) => {
            let modes = crate::fermionization::solve_periodic(chain)?;
            density_sine_coupling(&modes, state)
        }
        (Boundary::Open, CouplingProfile::Uniform) => {
            let modes = crate::fermionization::solve_open(chain)?;
            density_open(&modes, state)
        }
        (Boundary::Open, CouplingProfile::SineLowestEvenMode) => Err(Error::ProfileMismatch {
            operation: "spectral_density",
        }),
    }
}

/// Equal-time <Q Q> by Wick contraction in the site basis.
///
/// With `pair = Some((i, j))` (one-based sites) the operator is
/// Q = sigma_i^x + sigma_j^x and the value is 2 + 2 <sigma_i^x sigma_j^x>;
/// otherwise Q is the chain's configured coupling operator.
pub fn equal_time_qq(
    solution: &FermionSolution,
    state: &ThermalState,
    pair: Option<(usize, usize)>,
) -> Result<f64> {
    let n = solution.n_sites();
    match pair {
        Some((i, j)) => {
            for site in [i, j] {
                if site == 0 || site > n {
                    return Err(Error::SiteOutOfRange { site, n_sites: n });
                }
            }
            let sxx = crate::fermionization::sigma_x_expectation(solution, state, i, j)?;
            Ok(2.0 + 2.0 * sxx)
        }
        None => {
            let weights: Vec<f64> = match solution.chain().coupling_profile() {
                CouplingProfile::Uniform => vec![1.0; n],
                CouplingProfile::SineLowestEvenMode => (1..=n)
                    .map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).sin())
                    .collect(),
            };
            let corr = solution.correlations(state)?;
            let mut total = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let sxx = if i == j { 1.0 } else { corr.sigma_x_pair(i, j) };
                    total += weights[i] * weights[j] * sxx;
                }
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermionization::{solve, solve_open, solve_open_raw, solve_periodic};
    use crate::model::OccupationStatistics;
    use approx::assert_relative_eq;

    fn chain(n: usize, h2j: f64, boundary: Boundary, profile: CouplingProfile) -> ChainModel {
        ChainModel::new(n, 1.0, h2j, boundary, profile).unwrap()
    }

    fn fermi(t_mk: f64) -> ThermalState {
        ThermalState::new(t_mk, 1.0, OccupationStatistics::FermiDirac).unwrap()
    }

    #[test]
    fn merging_weight_averages_centers() {
        let d = SpectralDensity::from_raw(
            0.5,
            vec![(1.0, 1.0), (1.0 + 1e-10, 3.0), (2.0, 1.0), (1e-12, 0.25)],
        );
        assert_eq!(d.components().len(), 2);
        assert_relative_eq!(d.zero_weight(), 0.75);
        assert_relative_eq!(d.components()[0].weight, 4.0);
        assert_relative_eq!(d.components()[0].center, 1.0 + 0.75e-10, epsilon = 1e-12);
    }

    #[test]
    fn uniform_negative_lines_vanish_at_zero_temperature() {
        for h2j in [0.2, 1.0, 1.5] {
            let modes =
                solve_periodic(&chain(8, h2j, Boundary::Periodic, CouplingProfile::Uniform))
                    .unwrap();
            let d = density_uniform_periodic(&modes, &fermi(0.0)).unwrap();
            assert_eq!(d.negative_weight(), 0.0);
            assert!(d.components().iter().all(|c| c.center > 0.0));
        }
    }

    #[test]
    fn uniform_flat_band_merges_to_single_line() {
        // h_x = 0: all pair lines at exactly 4J
        let modes =
            solve_periodic(&chain(10, 0.0, Boundary::Periodic, CouplingProfile::Uniform)).unwrap();
        let d = density_uniform_periodic(&modes, &fermi(0.0)).unwrap();
        assert_eq!(d.components().len(), 1);
        assert_eq!(d.components()[0].center, 4.0);
        // u_k v_k = sin(k)/2 at h_x = 0: total pair weight
        // sum_k 8 (sin k / 2)^2 = 2 sum_k sin^2 k = N
        assert_relative_eq!(d.components()[0].weight, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn uniform_n20_has_nine_positive_lines() {
        let modes =
            solve_periodic(&chain(20, 0.2, Boundary::Periodic, CouplingProfile::Uniform)).unwrap();
        let d = density_uniform_periodic(&modes, &fermi(20.0)).unwrap();
        let pos = d.components().iter().filter(|c| c.center > 0.0).count();
        let neg = d.components().iter().filter(|c| c.center < 0.0).count();
        assert_eq!(pos, 9);
        assert_eq!(neg, 9);
    }

    #[test]
    fn sine_profile_mismatch_rejected() {
        let modes =
            solve_periodic(&chain(6, 0.5, Boundary::Periodic, CouplingProfile::Uniform)).unwrap();
        assert!(matches!(
            density_sine_coupling(&modes, &fermi(0.0)),
            Err(Error::ProfileMismatch { .. })
        ));
    }

    #[test]
    fn sine_two_sites_is_empty() {
        let modes = solve_periodic(&chain(
            2,
            0.5,
            Boundary::Periodic,
            CouplingProfile::SineLowestEvenMode,
        ))
        .unwrap();
        let d = density_sine_coupling(&modes, &fermi(100.0)).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn sine_zero_temperature_keeps_only_pair_emission() {
        let modes = solve_periodic(&chain(
            8,
            0.5,
            Boundary::Periodic,
            CouplingProfile::SineLowestEvenMode,
        ))
        .unwrap();
        let d = density_sine_coupling(&modes, &fermi(0.0)).unwrap();
        assert_eq!(d.negative_weight(), 0.0);
        // every surviving line is a pair line at omega_k + omega_kbar,
        // above the one-particle band minimum
        let grid = modes.grid();
        for c in d.components() {
            assert!(c.center > 0.0);
            let is_pair_sum = (0..8).any(|i| {
                let j = grid.shifted_index(i);
                (modes.omega()[i] + modes.omega()[j] - c.center).abs() < 1e-9
            });
            assert!(is_pair_sum, "unexpected line at {}", c.center);
        }
    }

    #[test]
    fn open_density_zero_temperature_four_clusters_n4() {
        let modes = solve_open(&chain(4, 0.2, Boundary::Open, CouplingProfile::Uniform)).unwrap();
        let d = density_open(&modes, &fermi(0.0)).unwrap();
        assert_eq!(d.negative_weight(), 0.0);
        let w = modes.omega();
        let expected = [w[0] + w[1], w[3] + w[0], w[1] + w[2], w[2] + w[3]];
        let centers: Vec<f64> = d
            .components()
            .iter()
            .filter(|c| c.center > 0.0 && c.weight > 1e-12)
            .map(|c| c.center)
            .collect();
        assert_eq!(centers.len(), 4, "centers {centers:?}");
        for e in expected {
            assert!(
                centers.iter().any(|c| (c - e).abs() < 1e-9),
                "missing cluster at {e}"
            );
        }
    }

    #[test]
    fn open_density_rejects_tampered_modes() {
        let modes = solve_open(&chain(4, 0.5, Boundary::Open, CouplingProfile::Uniform))
            .unwrap()
            .tamper_g(1.5);
        assert!(matches!(
            density_open(&modes, &fermi(0.0)),
            Err(Error::NonCanonicalModes { .. })
        ));
    }

    #[test]
    fn equal_time_pair_same_site_is_four() {
        let sol = solve(&chain(6, 0.7, Boundary::Periodic, CouplingProfile::Uniform)).unwrap();
        let v = equal_time_qq(&sol, &fermi(50.0), Some((3, 3))).unwrap();
        assert_relative_eq!(v, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn equal_time_polarized_product_state() {
        // J = 0, T = 0: <(sigma_i^x + sigma_j^x)^2> = 4 for any pair
        let modes = solve_open_raw(5, 0.0, 1.2).unwrap();
        let sol = FermionSolution::Open(modes);
        for (i, j) in [(1, 2), (1, 5), (2, 4)] {
            let v = equal_time_qq(&sol, &fermi(0.0), Some((i, j))).unwrap();
            assert_relative_eq!(v, 4.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn equal_time_rejects_bad_sites() {
        let sol = solve(&chain(4, 0.5, Boundary::Periodic, CouplingProfile::Uniform)).unwrap();
        assert!(equal_time_qq(&sol, &fermi(0.0), Some((0, 1))).is_err());
        assert!(equal_time_qq(&sol, &fermi(0.0), Some((1, 9))).is_err());
    }

    #[test]
    fn sum_rule_matches_site_wick_route() {
        // Parseval: zero weight + sum of component weights equals the
        // equal-time <Q^2> contracted independently in the site basis.
        for n in [3usize, 4, 6, 8] {
            for h2j in [0.2, 1.0, 1.5] {
                for t in [0.0, 40.0, 100.0] {
                    let state = fermi(t);
                    // uniform periodic
                    let c = chain(n, h2j, Boundary::Periodic, CouplingProfile::Uniform);
                    let modes = solve_periodic(&c).unwrap();
                    let d = density_uniform_periodic(&modes, &state).unwrap();
                    let sol = FermionSolution::Periodic(modes);
                    let qq = equal_time_qq(&sol, &state, None).unwrap();
                    assert_relative_eq!(d.total_weight(), qq, epsilon = 1e-8 * n as f64);
                    // sine
                    let c = chain(n, h2j, Boundary::Periodic, CouplingProfile::SineLowestEvenMode);
                    let modes = solve_periodic(&c).unwrap();
                    let d = density_sine_coupling(&modes, &state).unwrap();
                    let sol = FermionSolution::Periodic(modes);
                    let qq = equal_time_qq(&sol, &state, None).unwrap();
                    assert_relative_eq!(d.total_weight(), qq, epsilon = 1e-8 * n as f64);
                    // open
                    let c = chain(n, h2j, Boundary::Open, CouplingProfile::Uniform);
                    let modes = solve_open(&c).unwrap();
                    let d = density_open(&modes, &state).unwrap();
                    let sol = FermionSolution::Open(modes);
                    let qq = equal_time_qq(&sol, &state, None).unwrap();
                    assert_relative_eq!(d.total_weight(), qq, epsilon = 1e-8 * n as f64);
                }
            }
        }
    }

    #[test]
    fn detailed_balance_of_pair_lines() {
        let c = chain(6, 0.5, Boundary::Periodic, CouplingProfile::Uniform);
        let modes = solve_periodic(&c).unwrap();
        let state = fermi(100.0);
        let d = density_uniform_periodic(&modes, &state).unwrap();
        let nk = modes.occupations(&state).unwrap();
        for (i, &ni) in nk.iter().enumerate() {
            if modes.u(i) * modes.v(i) == 0.0 {
                continue;
            }
            let center = 2.0 * modes.omega()[i];
            let wp = d
                .components()
                .iter()
                .find(|cm| (cm.center - center).abs() < 1e-9)
                .unwrap()
                .weight;
            let wm = d
                .components()
                .iter()
                .find(|cm| (cm.center + center).abs() < 1e-9)
                .unwrap()
                .weight;
            let ratio = ni * ni / ((1.0 - ni) * (1.0 - ni));
            assert_relative_eq!(wm / wp, ratio, max_relative = 1e-10);
        }
    }
}
