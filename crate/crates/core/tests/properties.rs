mod common;

use common::{random_density, random_pure, rng};
use dicke_witness::criterion::evaluate_with;
use dicke_witness::dicke::{Bipartition, DensityOperator, ElementSource, StateFamily};
use dicke_witness::measurements::{
    evaluate_from_expectations, expand_element, expectation_table_from_state, ExpectationTable,
    PauliString,
};
use dicke_witness::{evaluate_criterion, real_part_mode, Tolerances};
use num_complex::Complex64;
use proptest::prelude::*;

/// Every Pauli expectation of `rho`, computed as tr(rho P) from explicit matrices.
fn full_table(rho: &DensityOperator) -> ExpectationTable {
    let n = rho.qubits();
    let dim = 1u64 << n;
    let mut table = ExpectationTable::new(n);
    for x in 0..dim {
        for z in 0..dim {
            let op = PauliString::new(n, x, z).unwrap();
            if op.is_identity() {
                continue;
            }
            // P|c> = phase(c) |c ^ x> with phase from the letters
            let mut sum = Complex64::new(0.0, 0.0);
            for c in 0..dim {
                let r = c ^ x;
                let mut phase = Complex64::new(1.0, 0.0);
                for q in 0..n {
                    let bit = 1u64 << q;
                    let cb = c & bit != 0;
                    match (x & bit != 0, z & bit != 0) {
                        (false, true) if cb => phase = -phase,
                        (true, true) => {
                            phase *= if cb { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) }
                        }
                        _ => {}
                    }
                }
                sum += phase * rho.entry(c, r);
            }
            table.insert(op, sum.re.clamp(-1.0, 1.0)).unwrap();
        }
    }
    table
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_qubits_preserves_the_value(seed in any::<u64>(), n in 3usize..=6, m_raw in 1usize..6) {
        let m = 1 + m_raw % (n - 1);
        let mut r = rng(seed);
        let state = random_pure(n, &mut r);
        let mut perm: Vec<usize> = (1..=n).collect();
        let k = (seed % n as u64) as usize;
        perm.rotate_left(k);
        perm.swap(0, n - 1);
        let a = evaluate_criterion(&state, n, m).unwrap().value;
        let b = evaluate_criterion(&state.permute_qubits(&perm).unwrap(), n, m).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn real_part_never_exceeds_absolute(seed in any::<u64>(), n in 3usize..=5, m_raw in 1usize..5) {
        let m = 1 + m_raw % (n - 1);
        let rho = random_density(n, &mut rng(seed));
        let abs = evaluate_criterion(&rho, n, m).unwrap().value;
        let re = real_part_mode(&rho, n, m).unwrap().value;
        prop_assert!(re <= abs + 1e-12);
    }

    #[test]
    fn closed_form_family_matches_dense(n in 4usize..=8, p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        prop_assume!(p + q <= 1.0);
        let family = StateFamily::two_three_mixture(n, p, q).unwrap();
        let dense = family.to_density().unwrap();
        for m in [2, 3] {
            let a = evaluate_criterion(&family, n, m).unwrap().value;
            let b = evaluate_criterion(&dense, n, m).unwrap().value;
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn bipartitions_are_canonical(n in 2usize..=10, raw in any::<u64>()) {
        let side = 1 + raw % ((1u64 << n) - 2);
        let cut = Bipartition::new(n, side).unwrap().canonical();
        prop_assert!(cut.is_canonical());
        prop_assert!(cut.in_a(1));
        prop_assert_eq!(cut.qubits_a().len() + cut.qubits_b().len(), n);
    }
}

#[test]
fn element_expansions_are_exact() {
    let mut r = rng(11);
    for n in 1..=6usize {
        let dim = 1u64 << n;
        let trials = if n <= 3 { 100 } else { 250 };
        for _ in 0..trials {
            let rho = random_density(n, &mut r);
            let table = full_table(&rho);
            use rand::Rng;
            let row = r.random_range(0..dim);
            let col = r.random_range(0..dim);
            let got = expand_element(row, col, n).unwrap().evaluate(&table).unwrap();
            let want = rho.entry(row, col);
            assert!((got - want).norm() < 1e-10, "n={n} ({row},{col}): {got} vs {want}");
        }
    }
}

#[test]
fn table_pathway_matches_real_part_mode() {
    let mut r = rng(12);
    for n in 3..=6usize {
        for m in 1..n {
            let rho = random_density(n, &mut r);
            let table = expectation_table_from_state(&rho, n, m).unwrap();
            let a = evaluate_from_expectations(&table, n, m).unwrap().value;
            let b = real_part_mode(&rho, n, m).unwrap().value;
            assert!((a - b).abs() < 1e-10, "n={n} m={m}: {a} vs {b}");
        }
    }
}

#[test]
fn detection_requires_clearing_the_tolerance() {
    use dicke_witness::criterion::OffDiagonalMode::Absolute;
    // just inside the threshold the value is positive but far below 1e-9
    let family = StateFamily::dicke_with_noise(4, 2, 8.0 / 17.0 - 1e-11).unwrap();
    let loose = evaluate_with(&family, 4, 2, Absolute, &Tolerances::DEFAULT).unwrap();
    let strict = evaluate_with(&family, 4, 2, Absolute, &Tolerances::DEFAULT.with_detection(0.0)).unwrap();
    assert!(loose.value > 0.0 && loose.value < 1e-9, "{}", loose.value);
    assert!(!loose.detected());
    assert!(strict.detected());
}
