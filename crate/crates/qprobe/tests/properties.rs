//! Property tests over randomized parameter draws.

use proptest::prelude::*;
use qprobe::{
    density_open, density_sine_coupling, density_uniform_periodic, dispersion, equal_time_qq,
    fermionization::solve_open_raw, lorentzian, solve_open, solve_periodic, Boundary, ChainModel,
    CouplingProfile, FermionSolution, OccupationStatistics, SpectralDensity, ThermalState,
};

fn fermi(t_mk: f64) -> ThermalState {
    ThermalState::new(t_mk, 1.0, OccupationStatistics::FermiDirac).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // The open-chain Bogoliubov-de Gennes transformation stays canonical for
    // arbitrary couplings, including the near-null regime at small fields.
    #[test]
    fn open_transformation_canonical(
        n in 2usize..14,
        j in 0.05f64..3.0,
        hx in 0.0f64..6.0,
    ) {
        let modes = solve_open_raw(n, j, hx).unwrap();
        prop_assert!(modes.canonical_deviation() < 1e-10);
        prop_assert!(modes.reconstruction_deviation() < 1e-10);
        for w in modes.omega() {
            prop_assert!(*w >= 0.0);
        }
    }

    // Every spectral weight is nonnegative and the delta decomposition obeys
    // the equal-time sum rule against the independent site-basis
    // contraction.
    #[test]
    fn densities_nonnegative_with_sum_rule(
        n in 3usize..9,
        h2j in 0.0f64..2.0,
        t_mk in 0.0f64..200.0,
    ) {
        let state = fermi(t_mk);
        let scenarios: [(Boundary, CouplingProfile); 3] = [
            (Boundary::Periodic, CouplingProfile::Uniform),
            (Boundary::Periodic, CouplingProfile::SineLowestEvenMode),
            (Boundary::Open, CouplingProfile::Uniform),
        ];
        for (boundary, profile) in scenarios {
            let chain = ChainModel::new(n, 1.0, h2j, boundary, profile).unwrap();
            let (density, solution) = match boundary {
                Boundary::Periodic => {
                    let modes = solve_periodic(&chain).unwrap();
                    let d = match profile {
                        CouplingProfile::Uniform => density_uniform_periodic(&modes, &state),
                        CouplingProfile::SineLowestEvenMode => {
                            density_sine_coupling(&modes, &state)
                        }
                    }
                    .unwrap();
                    (d, FermionSolution::Periodic(modes))
                }
                Boundary::Open => {
                    let modes = solve_open(&chain).unwrap();
                    let d = density_open(&modes, &state).unwrap();
                    (d, FermionSolution::Open(modes))
                }
            };
            prop_assert!(density.zero_weight() >= -1e-12);
            for c in density.components() {
                prop_assert!(c.weight >= 0.0, "weight {} at {}", c.weight, c.center);
            }
            let qq = equal_time_qq(&solution, &state, None).unwrap();
            prop_assert!((density.total_weight() - qq).abs() < 1e-8 * (n * n) as f64);
        }
    }

    // Occupation factors are monotone: increasing in T at fixed omega,
    // decreasing in omega at fixed T, in both statistics.
    #[test]
    fn occupancy_monotonicity(
        t_lo in 1.0f64..150.0,
        dt in 1.0f64..150.0,
        om_lo in 0.05f64..4.0,
        dom in 0.05f64..4.0,
    ) {
        for stats in [OccupationStatistics::FermiDirac, OccupationStatistics::Bose] {
            let cold = ThermalState::new(t_lo, 1.0, stats).unwrap();
            let hot = ThermalState::new(t_lo + dt, 1.0, stats).unwrap();
            prop_assert!(cold.occupancy(om_lo).unwrap() < hot.occupancy(om_lo).unwrap());
            prop_assert!(
                cold.occupancy(om_lo).unwrap() > cold.occupancy(om_lo + dom).unwrap()
            );
        }
    }

    // Dispersion is even in k and bounded below by the gap |2J - h_x|.
    #[test]
    fn dispersion_even_and_gapped(
        k in -std::f64::consts::PI..std::f64::consts::PI,
        h2j in 0.0f64..2.5,
    ) {
        let hx = 2.0 * h2j;
        prop_assert_eq!(dispersion(1.0, hx, k), dispersion(1.0, hx, -k));
        prop_assert!(dispersion(1.0, hx, k) >= (2.0 - hx).abs() - 1e-12);
    }

    // Lorentzian shape facts: positive, even, maximal at zero.
    #[test]
    fn lorentzian_shape(omega in -50.0f64..50.0, x in 1e-4f64..2.0) {
        prop_assert!(lorentzian(omega, x) > 0.0);
        prop_assert_eq!(lorentzian(omega, x), lorentzian(-omega, x));
        prop_assert!(lorentzian(omega, x) <= lorentzian(0.0, x));
    }

    // Merging never loses weight.
    #[test]
    fn merging_preserves_total_weight(
        raw in prop::collection::vec((-5.0f64..5.0, 0.0f64..3.0), 0..40),
        zero in 0.0f64..2.0,
    ) {
        let expected: f64 = zero + raw.iter().map(|(_, w)| w).sum::<f64>();
        let d = SpectralDensity::from_raw(zero, raw);
        prop_assert!((d.total_weight() - expected).abs() < 1e-9 * expected.abs().max(1.0));
    }
}
