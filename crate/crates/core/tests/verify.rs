use swapping_core::verify::{run_suite, VerifyOptions, SUITES};
use swapping_core::Error;

fn small(seed: u64) -> VerifyOptions {
    VerifyOptions { seed, size: Some(4), steps: 1024, tolerance: None }
}

#[test]
fn every_suite_passes_small_and_is_deterministic() {
    for name in SUITES {
        let a = run_suite(name, &small(7)).unwrap();
        let b = run_suite(name, &small(7)).unwrap();
        assert!(a.passed(), "{}", a.render());
        assert_eq!(a.render(), b.render(), "{}", name);
    }
}

#[test]
fn summary_block() {
    let r = run_suite("jacobi", &small(3)).unwrap().render();
    let summary: Vec<&str> = r.lines().skip_while(|l| !l.is_empty()).skip(1).collect();
    assert_eq!(summary[0], "suite=jacobi");
    assert_eq!(summary[1], "seed=3");
    assert!(summary.contains(&"status=pass"));
    assert!(summary.iter().all(|l| l.contains('=')));
}

#[test]
fn seeds_change_the_cases() {
    let a = run_suite("wolpert", &small(1)).unwrap();
    let b = run_suite("wolpert", &small(2)).unwrap();
    assert_ne!(a.checks[1].worst, b.checks[1].worst);
}

#[test]
fn tightened_tolerance_names_the_identity() {
    let opts = VerifyOptions { tolerance: Some(1e-300), ..small(42) };
    let r = run_suite("period-width", &opts).unwrap();
    assert!(!r.passed());
    let text = r.render();
    assert!(text.contains("violated: period equals width (SL2)"), "{}", text);
    assert!(text.contains("status=fail"));
}

#[test]
fn unknown_suite() {
    assert!(matches!(run_suite("nope", &VerifyOptions::default()), Err(Error::InvalidInput(_))));
}
