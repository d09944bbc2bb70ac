use proptest::prelude::*;
use qcorr::basis::CMatrix;
use qcorr::measure::{
    all_sequences, correlation_matrix, degenerate_spread, sequence_from_tensor, sequence_with_random_choice,
    subsystem_correlation, total_correlation_max, total_correlation_sequence, Variant,
};
use qcorr::zoo::{build, random_local_unitary, random_mixed, random_probabilities, random_unitary, StateSpec};
use qcorr::DensityMatrix;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;

const SHAPES: [&[usize]; 6] = [&[2, 2], &[2, 3], &[3, 2], &[3, 3], &[2, 2, 2], &[2, 3, 2]];

fn state(shape: usize, rank_hint: usize, seed: u64) -> DensityMatrix {
    let dims = SHAPES[shape % SHAPES.len()];
    let total: usize = dims.iter().product();
    random_mixed(dims, 1 + rank_hint % total, seed).unwrap()
}

fn mixed_state(shape: usize, rank_hint: usize, seed: u64) -> DensityMatrix {
    let dims = SHAPES[shape % SHAPES.len()];
    let total: usize = dims.iter().product();
    random_mixed(dims, 2 + rank_hint % (total - 1), seed).unwrap()
}

fn sorted_eigs(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_are_nonnegative_and_sum_to_total(shape in 0usize..6, rank in 0usize..18, seed in any::<u64>()) {
        let rho = state(shape, rank, seed);
        for r in all_sequences(&rho.coefficient_tensor().unwrap(), Variant::Plain).unwrap() {
            prop_assert!(r.steps.iter().all(|s| s.value_plain >= -1e-12 && s.value_mu >= -1e-12));
            let sum: f64 = r.steps.iter().map(|s| s.value_plain).sum();
            prop_assert!((sum - r.total_plain).abs() <= 1e-12);
        }
    }

    #[test]
    fn maximum_dominates_every_ordering(shape in 0usize..6, rank in 0usize..18, seed in any::<u64>()) {
        let rho = state(shape, rank, seed);
        for v in [Variant::Plain, Variant::Mu] {
            let best = total_correlation_max(&rho, v).unwrap();
            for r in all_sequences(&rho.coefficient_tensor().unwrap(), v).unwrap() {
                prop_assert!(best.total() >= r.total() - 1e-12);
            }
        }
    }

    #[test]
    fn local_unitaries_leave_mixed_state_values_unchanged(shape in 0usize..6, rank in 0usize..18, seed in any::<u64>(), useed in any::<u64>()) {
        let rho = mixed_state(shape, rank, seed);
        let rot = rho.transformed(&random_local_unitary(rho.dims(), useed)).unwrap();
        let (c, cr) = (rho.coefficient_tensor().unwrap(), rot.coefficient_tensor().unwrap());
        for v in [Variant::Plain, Variant::Mu] {
            for s in 1..=rho.parties() {
                let a = subsystem_correlation(&c, s, v).unwrap().value;
                let b = subsystem_correlation(&cr, s, v).unwrap().value;
                prop_assert!((a - b).abs() <= 1e-8);
            }
            let a = total_correlation_max(&rho, v).unwrap().total();
            let b = total_correlation_max(&rot, v).unwrap().total();
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn mu_value_ignores_unitaries_on_the_complement(da in 2usize..4, db in 2usize..4, seed in any::<u64>()) {
        let rho = random_mixed(&[da, db], 3, seed).unwrap();
        let mut rng = SplitMix64::seed_from_u64(seed ^ 0x55);
        let u = CMatrix::identity(da, da).kronecker(&random_unitary(db, &mut rng));
        let a = subsystem_correlation(&rho.coefficient_tensor().unwrap(), 1, Variant::Mu).unwrap().value;
        let b = subsystem_correlation(&rho.transformed(&u).unwrap().coefficient_tensor().unwrap(), 1, Variant::Mu).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-8);
    }

    #[test]
    fn first_party_spectrum_matches_bipartite_cut(rank in 1usize..12, seed in any::<u64>()) {
        let rho = random_mixed(&[2, 3, 2], rank, seed).unwrap();
        let multi = correlation_matrix(&rho.coefficient_tensor().unwrap(), 1, Variant::Plain, 1.0).unwrap();
        let bi = correlation_matrix(&rho.regrouped(1).unwrap().coefficient_tensor().unwrap(), 1, Variant::Plain, 1.0).unwrap();
        for (a, b) in sorted_eigs(multi.eigenvalues()).iter().zip(sorted_eigs(bi.eigenvalues())) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn classical_states_have_no_correlation(shape in 0usize..6, seed in any::<u64>()) {
        let dims = SHAPES[shape].to_vec();
        let total: usize = dims.iter().product();
        let rho = build(&StateSpec::ClassicalDiagonal { dims, probs: random_probabilities(total, seed) }).unwrap();
        let c = rho.coefficient_tensor().unwrap();
        for s in 1..=rho.parties() {
            let d = rho.dims()[s - 1];
            let eig = correlation_matrix(&c, s, Variant::Plain, 1.0).unwrap().eigenvalues();
            prop_assert!(eig[d - 1..].iter().sum::<f64>() <= 1e-10);
        }
        prop_assert!(total_correlation_max(&rho, Variant::Mu).unwrap().total() <= 1e-9);
    }
}

#[test]
fn maximization_is_deterministic() {
    let rho = random_mixed(&[2, 2, 2], 3, 99).unwrap();
    let a = total_correlation_max(&rho, Variant::Plain).unwrap();
    let b = total_correlation_max(&rho, Variant::Plain).unwrap();
    assert_eq!(a, b);
}

#[test]
fn symmetric_state_has_equal_orderings() {
    let rho = build(&StateSpec::WernerGhz { lambda: 0.6 }).unwrap();
    let reports = all_sequences(&rho.coefficient_tensor().unwrap(), Variant::Plain).unwrap();
    assert_eq!(reports.len(), 6);
    for r in &reports {
        assert!((r.total_plain - 0.75 * 0.36).abs() < 1e-12);
    }
    assert_eq!(total_correlation_max(&rho, Variant::Plain).unwrap().permutation, vec![1, 2, 3]);
}

#[test]
fn werner_second_step_vanishes_for_any_degenerate_choice() {
    for x in [-0.6, 0.1, 0.9] {
        let c = build(&StateSpec::Werner { m: 2, x }).unwrap().coefficient_tensor().unwrap();
        for seed in 0..20 {
            let r = sequence_with_random_choice(&c, &[1, 2], seed).unwrap();
            assert!(r.steps[0].degenerate);
            assert!(r.steps[1].value_plain.abs() <= 1e-10);
        }
    }
}

#[test]
fn werner_ghz_total_depends_on_degenerate_choice() {
    let c = build(&StateSpec::WernerGhz { lambda: 0.8 }).unwrap().coefficient_tensor().unwrap();
    let spread = degenerate_spread(&c, &[1, 2, 3], 50, 7).unwrap();
    assert!((spread.canonical_plain - 0.75 * 0.64).abs() < 1e-12);
    assert!(spread.min_plain < spread.canonical_plain - 1e-3);
    assert!(spread.max_plain <= spread.canonical_plain + 1e-12);
}

#[test]
fn mixture_projector_along_largest_coefficient() {
    let rho = build(&StateSpec::BdProductMixture { lambda: 0.5, t: [0.6, 0.3, -0.1], r: [0.2, 0.4, 0.1] }).unwrap();
    let c = rho.coefficient_tensor().unwrap();
    let q = subsystem_correlation(&c, 1, Variant::Plain).unwrap();
    let p = q.projector.matrix();
    assert!((p[(0, 0)] - 1.0).abs() < 1e-12);
    assert!((q.value - 0.25 * 0.25 * (0.09 + 0.01)).abs() < 1e-12);
    // T^B after the projection is (1/2)[(1−λ) r | λ t₁ e₁ | 0 | 0]
    let projected = qcorr::apply_projector(&c, 1, &q.projector).unwrap();
    let tb = correlation_matrix(&projected, 2, Variant::Plain, 1.0).unwrap();
    let m = tb.matrix();
    let expected = [[0.1, 0.3, 0.0, 0.0], [0.2, 0.0, 0.0, 0.0], [0.05, 0.0, 0.0, 0.0]];
    for (i, row) in expected.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((m[(i, j)] - v / 2.0).abs() < 1e-12, "({i},{j}) {} vs {}", m[(i, j)], v / 2.0);
        }
    }
    let (h, k) = (0.09 + 0.25 * 0.21, 2.0 * 0.25 * 0.6 * (0.16f64 + 0.01).sqrt());
    let second = sequence_from_tensor(&c, &[1, 2], Variant::Plain).unwrap().steps[1].value_plain;
    assert!((second - (h - (h * h - k * k).sqrt()) / 8.0).abs() < 1e-12);
}

#[test]
fn pure_states_with_a_qutrit_hit_degenerate_cuts() {
    let rho = random_mixed(&[2, 3, 2], 1, 5084).unwrap();
    let reports = all_sequences(&rho.coefficient_tensor().unwrap(), Variant::Plain).unwrap();
    assert!(reports.iter().any(|r| r.degenerate()));
}

#[test]
fn product_state_has_no_correlation() {
    let a = random_mixed(&[2], 2, 1).unwrap();
    let b = random_mixed(&[3], 2, 2).unwrap();
    let rho = DensityMatrix::new(vec![2, 3], a.matrix().kronecker(b.matrix())).unwrap();
    for r in all_sequences(&rho.coefficient_tensor().unwrap(), Variant::Mu).unwrap() {
        assert!(r.total_plain.abs() < 1e-14 && r.total_mu.abs() < 1e-14);
    }
}

#[test]
fn bell_state_total() {
    let rho = build(&StateSpec::BellDiagonal { t: [1.0, -1.0, 1.0] }).unwrap();
    let r = total_correlation_sequence(&rho, &[1, 2], Variant::Plain).unwrap();
    assert!((r.total_plain - 0.5).abs() < 1e-12);
    assert!(r.steps[1].value_plain.abs() < 1e-12);
}
