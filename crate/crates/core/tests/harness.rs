use bfkit_core::harness::{
    emit, render, run_suite, run_suite_with, ConfigError, Execution, FamilyKind, FamilySpec, Format, ResidualReport,
    Suite, SuiteConfig,
};

fn config(suite: Suite, kind: FamilyKind) -> SuiteConfig {
    let mut c = SuiteConfig::new(suite);
    c.family = FamilySpec { kind, ..FamilySpec::default() };
    c.grid = "0.5:1.5:5,0.5:1.5:5,-0.5:0.5:5".parse().unwrap();
    c
}

#[test]
fn plus_solution_on_125_points() {
    let r = run_suite(&config(Suite::VerifySolution, FamilyKind::Plus)).unwrap();
    assert!(r.pass);
    assert!(r.checks.iter().all(|c| c.n == 125 && c.max_abs < 1e-9));
}

#[test]
fn minus_resolving_passes() {
    let r = run_suite(&config(Suite::VerifyResolving, FamilyKind::Minus)).unwrap();
    assert!(r.pass, "{:#?}", r.checks);
}

#[test]
fn extra_relations_reject_plus() {
    let r = run_suite(&config(Suite::VerifyHodographExtra, FamilyKind::Plus)).unwrap();
    assert!(!r.pass);
    assert!(r.failed().count() >= 1);
}

#[test]
fn hodograph_family_passes_every_identity_suite() {
    for suite in [Suite::VerifySolution, Suite::VerifyFoliation, Suite::VerifyHodograph, Suite::VerifyHodographExtra] {
        let mut c = config(suite, FamilyKind::Hodograph);
        c.family.alpha = "u".into();
        let r = run_suite(&c).unwrap();
        assert!(r.pass, "{suite}: {:#?}", r.checks);
    }
}

#[test]
fn symmetry_suite_picks_picture_from_family() {
    let mut c = config(Suite::VerifySymmetry, FamilyKind::Minus);
    c.generator = Some("X:exp(z)".into());
    assert!(run_suite(&c).unwrap().pass);
    let mut c = config(Suite::VerifySymmetry, FamilyKind::Hodograph);
    c.family.alpha = "u".into();
    c.generator = Some("hod:a=u,h=sin(u)".into());
    let r = run_suite(&c).unwrap();
    assert!(r.pass && r.checks.len() == 2, "{:#?}", r.checks);
}

#[test]
fn execution_modes_agree() {
    let c = config(Suite::VerifyHodograph, FamilyKind::Plus);
    let a = run_suite_with(&c, Execution::Sequential).unwrap();
    let b = run_suite_with(&c, Execution::Parallel).unwrap();
    assert_eq!(a.checks, b.checks);
}

#[test]
fn reports_are_reproducible() {
    let mut c = config(Suite::Scan, FamilyKind::Random);
    c.seed = 3;
    let strip = |mut r: ResidualReport| {
        r.timestamp = 0;
        render(&r, Format::Json).unwrap()
    };
    assert_eq!(strip(run_suite(&c).unwrap()), strip(run_suite(&c).unwrap()));
}

#[test]
fn too_many_skips_fail() {
    // roots u = 2 ln(t / 2x) lie beyond the default bracket
    let mut c = config(Suite::VerifySolution, FamilyKind::Hodograph);
    c.grid = "1e4:2e4:3,0.5:1.5:3,-0.5:0.5:3".parse().unwrap();
    let r = run_suite(&c).unwrap();
    assert!(r.checks.iter().all(|k| k.skipped > 0));
    assert!(!r.pass);
}

#[test]
fn config_errors() {
    let mut c = config(Suite::VerifySolution, FamilyKind::Plus);
    c.family.c = "1".into();
    assert!(matches!(run_suite(&c), Err(ConfigError::Family(_))));
    let mut c = config(Suite::VerifySolution, FamilyKind::Plus);
    c.family.b = "w".into();
    assert!(matches!(run_suite(&c), Err(ConfigError::Expr { .. })));
    let mut c = config(Suite::VerifySolution, FamilyKind::Random);
    c.family.degree = 5;
    assert!(matches!(run_suite(&c), Err(ConfigError::Degree(5))));
    let mut c = config(Suite::VerifySolution, FamilyKind::Plus);
    c.tol = -1.0;
    assert!(matches!(run_suite(&c), Err(ConfigError::Tol(_))));
}

#[test]
fn emit_writes_files() {
    let dir = std::env::temp_dir().join(format!("bfkit-emit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let r = run_suite(&config(Suite::VerifySolution, FamilyKind::Minus)).unwrap();
    let json = dir.join("r.json");
    emit(&r, Format::Json, Some(&json)).unwrap();
    let back: ResidualReport = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back, r);
    let csv = dir.join("r.csv");
    emit(&r, Format::Csv, Some(&csv)).unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), r.checks.len() + 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
