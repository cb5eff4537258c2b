use jtcqed::{
    build_dimensionless_hamiltonian, build_liouvillian, evolve, steady_state, Density, DissipationParams, EvolveOptions,
    QubitLevel, SpaceSpec,
};
use proptest::prelude::*;

fn rates() -> impl Strategy<Value = DissipationParams<f64>> {
    (0.0..0.05f64, 0.0..0.05f64, 0.0..0.05f64, 0.0..0.05f64, 0.0..0.5f64).prop_map(|(k1, k2, g, gp, n)| {
        DissipationParams {
            kappa1: k1,
            kappa2: k2,
            gamma: g,
            gamma_phi: gp,
            n_th: n,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolution_stays_physical(k in 0.0..0.8f64, delta in -1.0..1.0f64, d in rates(), t in 1.0..40.0f64) {
        let space = SpaceSpec::two_modes_one_qubit(2, 3).unwrap();
        let h = build_dimensionless_hamiltonian(&space, k, delta, true, None).unwrap();
        let l = build_liouvillian(&h, &d).unwrap();
        let rho0 = Density::basis_state(&space, &[1, 0], &[QubitLevel::Excited]).unwrap();
        let traj = evolve(&l, &rho0, &[0.0, t / 2.0, t], &EvolveOptions::default()).unwrap();
        for rho in &traj.states {
            prop_assert!((rho.trace() - 1.0).abs() <= 1e-8);
            prop_assert!(rho.min_eigenvalue() >= -1e-7);
        }
    }

    #[test]
    fn hamiltonian_is_hermitian(k in 0.0..2.0f64, delta in -1.0..1.0f64, j in proptest::option::of(-1.0..1.0f64)) {
        let space = SpaceSpec::two_modes_one_qubit(3, 2).unwrap();
        let h = build_dimensionless_hamiltonian(&space, k, delta, true, j).unwrap();
        prop_assert!(h.is_hermitian());
    }
}

#[test]
fn single_precision_tracks_double() {
    let space = SpaceSpec::two_modes_one_qubit(2, 2).unwrap();
    let h64 = build_dimensionless_hamiltonian::<f64>(&space, 0.3, 0.2, true, None).unwrap();
    let h32 = build_dimensionless_hamiltonian::<f32>(&space, 0.3, 0.2, true, None).unwrap();
    let e64 = h64.eigen_lowest(5).unwrap();
    let e32 = h32.eigen_lowest(5).unwrap();
    for (a, b) in e64.iter().zip(&e32) {
        assert!((a - *b as f64).abs() < 1e-4);
    }
    let l = build_liouvillian(&h32, &DissipationParams::default()).unwrap();
    let rho = steady_state(&l).unwrap();
    assert!((rho.trace() - 1.0).abs() < 1e-4);
}
