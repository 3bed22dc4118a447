use multiphase_core::constructor::{psi_map, ConstructOptions};
use multiphase_core::dtn::{jump_to_neumann, DtnSpectrum, Inverse};
use multiphase_core::layered::SolverConfig;
use multiphase_core::radial::PhaseConfig;
use multiphase_core::FourierField;
use proptest::prelude::*;

fn field(truncation: usize, scale: f64) -> impl Strategy<Value = FourierField> {
    (
        -scale..scale,
        prop::collection::vec((-scale..scale, -scale..scale), truncation),
    )
        .prop_map(move |(mean, modes)| {
            let triples: Vec<_> = modes.iter().enumerate().map(|(i, &(a, b))| (i + 1, a, b)).collect();
            FourierField::from_modes(mean, &triples, truncation).unwrap()
        })
}

fn benchmark() -> PhaseConfig {
    PhaseConfig::planar(vec![0.5, 1.0, 1.5], vec![2.0, 1.0, 3.0]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_then_projecting_is_identity(f in field(12, 1.0), extra in 0usize..8) {
        let m = 2 * 12 + 1 + extra;
        let back = FourierField::from_samples(&f.sample(m), 12).unwrap();
        prop_assert!((&back - &f).coefficient_norm() <= 1e-12);
    }

    #[test]
    fn spectrum_apply_is_linear_and_invertible(f in field(10, 1.0), g in field(10, 1.0), c in -3.0f64..3.0) {
        let spec = DtnSpectrum::new(0.5, 2.0, 2, 10).unwrap();
        let lhs = spec.apply(&(&f + &(c * &g))).unwrap();
        let rhs = &spec.apply(&f).unwrap() + &(c * &spec.apply(&g).unwrap());
        prop_assert!((&lhs - &rhs).coefficient_norm() <= 1e-12);
        let z = f.zero_mean_part();
        let round = spec.invert(&spec.apply(&z).unwrap(), Inverse::Dtn).unwrap();
        prop_assert!((&round - &z).coefficient_norm() <= 1e-12);
        let shifted = spec.invert(&f, Inverse::IdPlusDtn).unwrap();
        let back = &shifted + &spec.apply(&shifted).unwrap();
        prop_assert!((&back - &f).coefficient_norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn jump_to_neumann_is_linear(f in field(6, 1.0), g in field(6, 1.0)) {
        let solver = SolverConfig::with_truncation(6);
        let config = benchmark();
        let jf = jump_to_neumann(&config, &f, &solver).unwrap().neumann;
        let jg = jump_to_neumann(&config, &g, &solver).unwrap().neumann;
        let jfg = jump_to_neumann(&config, &(&f + &g), &solver).unwrap().neumann;
        prop_assert!((&jfg - &(&jf + &jg)).coefficient_norm() <= 1e-12);
    }

    #[test]
    fn even_inputs_give_even_residuals(xi in field(4, 0.004), eta in field(4, 0.004)) {
        let even = |f: &FourierField| {
            let modes: Vec<_> = f.modes().map(|(k, a, _)| (k, a, 0.0)).collect();
            FourierField::from_modes(0.0, &modes, 16).unwrap()
        };
        let eval = psi_map(&even(&xi), &even(&eta), &benchmark(), &ConstructOptions::default()).unwrap();
        let odd = eval.residual.modes().map(|(_, _, b)| b.abs()).fold(0.0, f64::max);
        prop_assert!(odd <= 1e-12, "sine content {odd:e}");
    }
}
