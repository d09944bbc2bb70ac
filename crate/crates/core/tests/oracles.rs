use qcorr::measure::{subsystem_correlation, Variant};
use qcorr::oracle::{brute_force_projector_min, geometric_discord_qubit_oracle};
use qcorr::zoo::{build, random_mixed, StateSpec};

#[test]
fn qubit_measurement_oracle_agrees() {
    for k in 0..40u64 {
        let dims: &[usize] = if k % 2 == 0 { &[2, 2] } else { &[2, 3] };
        let rho = random_mixed(dims, 1 + k as usize % 4, 10 + k).unwrap();
        let q = subsystem_correlation(&rho.coefficient_tensor().unwrap(), 1, Variant::Plain).unwrap().value;
        assert!((q - geometric_discord_qubit_oracle(&rho).unwrap()).abs() <= 1e-6);
    }
}

#[test]
fn bell_state_oracles_give_one_half() {
    let rho = build(&StateSpec::BellDiagonal { t: [1.0, -1.0, 1.0] }).unwrap();
    let c = rho.coefficient_tensor().unwrap();
    assert!((brute_force_projector_min(&c, 1, Variant::Plain, 10, 500, 3).unwrap().best - 0.5).abs() <= 1e-6);
    assert!((geometric_discord_qubit_oracle(&rho).unwrap() - 0.5).abs() <= 1e-9);
}

#[test]
fn projector_oracle_on_tripartite_and_qutrit_states() {
    for k in 0..6u64 {
        let dims: &[usize] = if k % 2 == 0 { &[2, 2, 2] } else { &[3, 2] };
        let rho = random_mixed(dims, 3, 50 + k).unwrap();
        let c = rho.coefficient_tensor().unwrap();
        for s in 1..=dims.len() {
            for v in [Variant::Plain, Variant::Mu] {
                let q = subsystem_correlation(&c, s, v).unwrap().value;
                let search = brute_force_projector_min(&c, s, v, 30, 500, 70 + k).unwrap();
                assert!((search.best - q).abs() <= 1e-6, "dims {dims:?} s={s}");
                assert!(search.start_values.iter().all(|&x| q <= x + 1e-9));
            }
        }
    }
}

#[test]
fn oracle_is_reproducible() {
    let c = random_mixed(&[3, 2], 2, 1).unwrap().coefficient_tensor().unwrap();
    let a = brute_force_projector_min(&c, 1, Variant::Plain, 8, 100, 5).unwrap();
    let b = brute_force_projector_min(&c, 1, Variant::Plain, 8, 100, 5).unwrap();
    assert_eq!(a, b);
}
