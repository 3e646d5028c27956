//! Frozen circuit texts and CSV layouts.
//!
//! Regenerate with `UPDATE_GOLDEN=1 cargo test --test golden` after an
//! intentional change, and review the diff.

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::PathBuf;

use parity_ndc::bench::{compute_n_ndc, write_metric_csv, write_results_csv, ResultRow};
use parity_ndc::circuit::{count_lnn_cnots, depth, parse, serialize, validate_lnn, Circuit};
use parity_ndc::transpile::{
    build_lnn, build_lnn_controlled, build_reference, build_reference_controlled,
    check_equivalence_on, LnnOptions, MethodKind, C1, C2, CP,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn check_golden(name: &str, text: &str) {
    let path = fixture(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, text).unwrap();
    }
    let frozen = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; run with UPDATE_GOLDEN=1", path.display()));
    assert_eq!(text, frozen, "{name} drifted from its golden file");
}

fn circuits() -> Vec<(&'static str, Circuit)> {
    use MethodKind::*;
    vec![
        ("h_reference_n4.qc", build_reference_controlled(HMethod, 4, FRAC_PI_4).unwrap()),
        ("h_lnn_n4.qc", build_lnn_controlled(HMethod, 4, FRAC_PI_4, LnnOptions::default()).unwrap()),
        (
            "h_lnn_measured_n10.qc",
            build_lnn(HMethod, 10, FRAC_PI_4, true, LnnOptions::physical()).unwrap(),
        ),
        ("m_reference_n8.qc", build_reference_controlled(MMethod, 8, FRAC_PI_4).unwrap()),
        ("m_lnn_n8.qc", build_lnn_controlled(MMethod, 8, FRAC_PI_4, LnnOptions::default()).unwrap()),
        (
            "m_lnn_physical_n8.qc",
            build_lnn_controlled(MMethod, 8, FRAC_PI_4, LnnOptions::physical()).unwrap(),
        ),
        ("naive_h_lnn_n4.qc", build_lnn_controlled(NaiveH, 4, FRAC_PI_4, LnnOptions::physical()).unwrap()),
    ]
}

#[test]
fn circuit_texts_are_frozen() {
    for (name, c) in circuits() {
        let text = serialize(&c);
        check_golden(name, &text);
        assert_eq!(parse(&text).unwrap(), c, "{name} does not round-trip");
    }
}

#[test]
fn frozen_lnn_circuits_are_adjacent_and_equivalent() {
    use MethodKind::*;
    for (name, method, n) in [
        ("h_lnn_n4.qc", HMethod, 4),
        ("m_lnn_n8.qc", MMethod, 8),
        ("m_lnn_physical_n8.qc", MMethod, 8),
    ] {
        let reference = build_reference_controlled(method, n, FRAC_PI_4).unwrap();
        let c = parse(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        let v = check_equivalence_on(&reference, &c, &[C2], &[C2], 10, 1e-10).unwrap();
        assert!(v.passed, "{name}: {}", v.max_deviation);
        let measured = |c: &Circuit| c.resolve_classical_control(CP, true);
        let v = check_equivalence_on(&measured(&reference), &measured(&c), &[C1, C2], &[C1, C2], 10, 1e-10)
            .unwrap();
        // The H circuit leaves c1 unread unless asked to recover it.
        assert_eq!(v.passed, method == MMethod, "{name}: {}", v.max_deviation);
        if name != "m_lnn_n8.qc" {
            assert!(validate_lnn(&c).is_empty(), "{name}");
        }
    }
    let with_c1 = build_lnn(HMethod, 4, FRAC_PI_4, true, LnnOptions {
        record_first_parity: true,
        ..LnnOptions::physical()
    })
    .unwrap();
    let reference = build_reference(HMethod, 4, FRAC_PI_4, true).unwrap();
    let v = check_equivalence_on(&reference, &with_c1, &[C1, C2], &[C1, C2], 10, 1e-10).unwrap();
    assert!(v.passed, "{}", v.max_deviation);
}

#[test]
fn frozen_n10_h_circuit_metrics() {
    let c = parse(&std::fs::read_to_string(fixture("h_lnn_measured_n10.qc")).unwrap()).unwrap();
    assert_eq!(count_lnn_cnots(&c).unwrap(), 32);
    assert_eq!(depth(&c).unwrap(), 19);
}

fn sample_rows() -> Vec<ResultRow> {
    let row = |n, theta, v_mean, v_sigma| ResultRow {
        method: MethodKind::HMethod,
        n,
        theta,
        v_mean,
        v_sigma,
        n_runs: 20,
        n_shots: 4000,
        seed: 42,
        noise_fingerprint: "0123456789ab".into(),
    };
    vec![
        row(2, FRAC_PI_4, 0.25, 0.01),
        row(2, PI, 0.0, 0.01),
        row(3, FRAC_PI_4, 0.125, 0.02),
        row(3, PI, -0.01, 0.015),
    ]
}

#[test]
fn results_csv_layout_is_frozen() {
    check_golden("results.csv", &write_results_csv(&sample_rows()).unwrap());
}

#[test]
fn metric_csv_layout_is_frozen() {
    let report = compute_n_ndc(MethodKind::HMethod, &sample_rows(), false).unwrap();
    check_golden("metric.csv", &write_metric_csv(&[report]).unwrap());
}
