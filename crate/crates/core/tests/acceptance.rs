//! End-to-end checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails; run with `cargo test --test acceptance`.

mod common;

use std::time::Instant;

use common::{random_density, rng};
use dicke_witness::bisep::{check_offdiag_lemma, random_product_state, verify_no_detection};
use dicke_witness::criterion::{gamma_pairs, n_d, p_term, p_term_two_copy_oracle};
use dicke_witness::dicke::Bipartition;
use dicke_witness::dicke::{dicke_state, StateFamily};
use dicke_witness::measurements::{
    evaluate_from_expectations, expectation_table_from_state, required_elements,
    required_operators, tomography_count,
};
use dicke_witness::thresholds::{
    analytic_threshold, region_scan, scaling_curve, white_noise_threshold, GridSpec,
};
use dicke_witness::{evaluate_criterion, real_part_mode, Tolerances};
use rand::Rng;

fn criterion_01_dicke_states_violate_maximally() -> (bool, String) {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=10 {
        for m in 1..n {
            let state = dicke_state(n, m).unwrap();
            let value = evaluate_criterion(&state, n, m).unwrap().value;
            worst = worst.max((value - m as f64).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst <= 1e-10 && secs < 10.0,
        format!("max |I - m| = {worst:.2e} over n <= 10, {secs:.2} s"),
    )
}

fn criterion_02_four_qubit_threshold() -> (bool, String) {
    let analytic = analytic_threshold(4, 2).unwrap();
    let r = white_noise_threshold(4, 2, &Tolerances::DEFAULT).unwrap();
    let family = StateFamily::dicke_with_noise(4, 2, 8.0 / 17.0).unwrap();
    let at_threshold = evaluate_criterion(&family, 4, 2).unwrap().value;
    let ok =
        (analytic - 8.0 / 17.0).abs() < 1e-15 && r.agreement < 1e-6 && at_threshold.abs() <= 1e-10;
    (
        ok,
        format!(
            "analytic {analytic}, bisection {}, I(8/17) = {at_threshold:.2e}",
            r.numeric_p
        ),
    )
}

fn criterion_03_threshold_formula() -> (bool, String) {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 5..=12 {
        for m in 2..n {
            if 2 * m >= n {
                continue;
            }
            let r = white_noise_threshold(n, m, &Tolerances::DEFAULT).unwrap();
            worst = worst.max(r.agreement);
            cases += 1;
        }
    }
    let p20 = analytic_threshold(20, 2).unwrap();
    let secs = start.elapsed().as_secs_f64();
    (
        cases > 0 && worst < 1e-6 && p20 > 0.99 && secs < 60.0,
        format!("{cases} cases, max disagreement {worst:.2e}, p(20,2) = {p20:.6}, {secs:.2} s"),
    )
}

fn criterion_04_setting_counts() -> (bool, String) {
    let ops = required_operators(4, 2).unwrap().len();
    let tomo = tomography_count(4).unwrap();
    let mut worst_ratio = 0.0f64;
    for n in 4..=12 {
        let elements = required_elements(n, 2).unwrap().total();
        let ratio = elements as f64 / (n * n * n) as f64;
        worst_ratio = worst_ratio.max(ratio);
        let ops_n = required_operators(n, 2).unwrap().len();
        println!(
            "  n={n:2}: {elements} elements, {ops_n} Pauli settings, {} for tomography",
            tomography_count(n).unwrap()
        );
    }
    (
        ops == 39 && tomo == 255 && worst_ratio <= 1.0,
        format!("{ops} settings at (4,2), tomography {tomo}, max elements/n^3 = {worst_ratio:.3}"),
    )
}

fn criterion_05_p_term_oracle() -> (bool, String) {
    let mut rng = rng(5);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for _ in 0..200 {
        let rho = random_density(4, &mut rng);
        for m in 1..4 {
            for pair in gamma_pairs(4, m).unwrap() {
                let reduced = p_term(&rho, &pair).unwrap();
                let two_copy = p_term_two_copy_oracle(&rho, &pair).unwrap();
                worst = worst.max((reduced - two_copy).abs());
                checks += 1;
            }
        }
    }
    (
        worst <= 1e-10,
        format!("{checks} pairs on 200 states, max difference {worst:.2e}"),
    )
}

fn criterion_06_biseparable_states_never_detected() -> (bool, String) {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, m) in [(5, 2), (6, 2), (7, 2), (7, 3)] {
        match verify_no_detection(10_000, n, m, 6) {
            Ok(r) => {
                ok &= r.violations == 0;
                lines.push(format!("({n},{m}) max {:.2e}", r.max_value));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("({n},{m}) {e}"));
            }
        }
    }

    let mut rng = rng(66);
    let mut lemma_failures = 0;
    for i in 0..1000u64 {
        let side_a = rng.random_range(1..15u64);
        let cut = Bipartition::new(4, side_a).unwrap();
        let state = random_product_state(&cut, i).unwrap();
        if check_offdiag_lemma(&state, &cut, 4, 2).is_err() {
            lemma_failures += 1;
        }
    }
    ok &= lemma_failures == 0;
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    (
        ok,
        format!(
            "{}; lemma failures {lemma_failures}/1000; {secs:.1} s",
            lines.join(", ")
        ),
    )
}

fn criterion_07_detection_regions() -> (bool, String) {
    let grid = region_scan(&GridSpec::square(201)).unwrap();
    let cell = 1.0 / 200.0;
    let d2 = grid.i_d2_onset_on_p_axis();
    let d3 = grid.i_d3_onset_on_q_axis();
    let d2_ok = d2.is_some_and(|p| (p - 105.0 / 169.0).abs() <= cell);
    let d3_ok = d3.is_some_and(|q| (q - 25.0 / 41.0).abs() <= cell);
    let outside = grid.witness_only_cells();
    let detail = format!(
        "I:D2 onset {d2:?} (want {:.4}), I:D3 onset {d3:?} (want {:.4}), {} cells where only the fidelity witness detects{}",
        105.0 / 169.0,
        25.0 / 41.0,
        outside.len(),
        outside.first().map(|c| format!(", first at p={} q={}", c.p, c.q)).unwrap_or_default()
    );
    (d2_ok && d3_ok && outside.is_empty(), detail)
}

/// `2^n / (2^n + (2n-2m-1) C(n,m))` in exact integer arithmetic.
fn threshold_oracle(n: usize, m: usize) -> f64 {
    let mut c: u128 = 1;
    for i in 0..m as u128 {
        c = c * (n as u128 - i) / (i + 1);
    }
    let pow = 1u128 << n;
    let k = (2 * n - 2 * m - 1) as u128;
    pow as f64 / (pow + k * c) as f64
}

fn criterion_08_scaling_curves() -> (bool, String) {
    let rows = scaling_curve(&[1, 2, 3, 4, 5], 40).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for m in 1..=5 {
        let curve: Vec<(usize, f64)> = rows
            .iter()
            .filter(|r| r.m == m)
            .map(|r| (r.n, r.threshold))
            .collect();
        let exact = curve.iter().all(|&(n, t)| t == threshold_oracle(n, m));
        let argmin = curve
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, _)| i)
            .unwrap();
        let falls = curve[..=argmin].windows(2).all(|w| w[1].1 < w[0].1);
        let rises = curve[argmin..].windows(2).all(|w| w[1].1 > w[0].1);
        let last = curve.last().unwrap().1;
        ok &= exact && falls && rises && last > 0.99 && last < 1.0;
        notes.push(format!(
            "m={m}: dip at n={}, p(40)={last:.5}",
            curve[argmin].0
        ));
    }
    (ok, notes.join("; "))
}

fn criterion_09_expectation_pathway() -> (bool, String) {
    let mut rng = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = random_density(4, &mut rng);
        let table = expectation_table_from_state(&rho, 4, 2).unwrap();
        let from_table = evaluate_from_expectations(&table, 4, 2).unwrap().value;
        let direct = real_part_mode(&rho, 4, 2).unwrap().value;
        worst = worst.max((from_table - direct).abs());
    }
    (
        worst <= 1e-10,
        format!("max difference {worst:.2e} over 100 states"),
    )
}

/// Largest coefficient of a single population among the same-side pair bounds,
/// maximized over bipartitions and excitation sets.
fn same_side_budget(n: usize, m: usize) -> usize {
    let pairs = gamma_pairs(n, m).unwrap();
    let mut best = 0;
    for cut in Bipartition::all_canonical(n).unwrap() {
        let mut partners = vec![0usize; 1 << n];
        for pair in &pairs {
            if cut.same_side(pair.x, pair.y) {
                partners[pair.alpha.index() as usize] += 1;
            }
        }
        best = best.max(partners.into_iter().max().unwrap_or(0));
    }
    best
}

fn criterion_10_diagonal_budget() -> (bool, String) {
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for n in 2..=8 {
        for m in 1..n {
            cases += 1;
            let brute = same_side_budget(n, m);
            let formula = n_d(n, m).unwrap();
            if brute != formula {
                mismatches.push(format!("(n={n},m={m}: {brute} vs {formula})"));
            }
        }
    }
    (
        mismatches.is_empty(),
        format!(
            "{}/{cases} cases match; mismatches {}",
            cases - mismatches.len(),
            mismatches.join(" ")
        ),
    )
}

fn main() {
    let checks: [(&str, fn() -> (bool, String)); 10] = [
        ("1", criterion_01_dicke_states_violate_maximally),
        ("2", criterion_02_four_qubit_threshold),
        ("3", criterion_03_threshold_formula),
        ("4", criterion_04_setting_counts),
        ("5", criterion_05_p_term_oracle),
        ("6", criterion_06_biseparable_states_never_detected),
        ("7", criterion_07_detection_regions),
        ("8", criterion_08_scaling_curves),
        ("9", criterion_09_expectation_pathway),
        ("10", criterion_10_diagonal_budget),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let (ok, detail) = check();
        println!(
            "{} criterion {name}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!ok);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
