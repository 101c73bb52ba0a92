use num_complex::Complex64;

use super::config::{ConfigError, FamilyKind, Suite, SuiteConfig};
use super::report::{Accumulator, CheckResult, Mode, ResidualReport, ScanRow};
use super::{map_points, Execution};
use crate::diffexpr::{AnalyticFn, Coord, Picture};
use crate::families::{conformal_transform, Field, FieldKind, Kappa};
use crate::foliation::{
    bf_expr, bf_residual, commutator_residuals, invariant_frame, particular_check, resolving_residuals,
    FoliationError, TestScalar,
};
use crate::hodograph::{
    ansatz_expr, cross_check, extra_relation_residuals, hod_equation_expr, hod_equation_residuals,
    hod_resolving_residuals, operator_action_residuals, HodographError,
};
use crate::jets::{hodograph_invert, Jet};
use crate::symmetry::{parse_generator, symmetry_residual};

/// Residual tolerance of the PDE on implicit (root-solved) fields.
pub const IMPLICIT_TOL: f64 = 1e-8;
pub const ANSATZ_TOL: f64 = 1e-10;
pub const ROUND_TRIP_TOL: f64 = 1e-10;

const CONFORMAL_MAPS: [&str; 3] = ["z + 1", "z^2", "exp(z)"];
const RESOLVING_NAMES: [&str; 5] = ["I", "II", "III", "III_bar", "IV"];

struct Check {
    name: String,
    tol: f64,
    mode: Mode,
}

impl Check {
    fn below(name: impl Into<String>, tol: f64) -> Check {
        Check { name: name.into(), tol, mode: Mode::Below }
    }

    fn info(name: impl Into<String>, tol: f64) -> Check {
        Check { name: name.into(), tol, mode: Mode::Info }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cell {
    Value(f64),
    /// Singular at this point; counted.
    Skip,
    /// Outside the check's domain; not counted.
    Excluded,
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Cell {
        v.map_or(Cell::Skip, Cell::Value)
    }
}

/// One cell per check.
type Row = Vec<Cell>;

fn aggregate(checks: &[Check], rows: &[Row]) -> Vec<CheckResult> {
    let mut acc = vec![Accumulator::default(); checks.len()];
    for row in rows {
        for (a, v) in acc.iter_mut().zip(row) {
            match v {
                Cell::Value(x) => a.push(*x),
                Cell::Skip => a.skip(),
                Cell::Excluded => {}
            }
        }
    }
    checks.iter().zip(acc).map(|(c, a)| a.finish_with(c.name.clone(), c.tol, c.mode)).collect()
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn jet_reality(j: &Jet) -> f64 {
    let scale = j.coeffs().map(|(_, c)| c.norm()).fold(1.0, f64::max);
    j.reality_check() / scale
}

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    field: Field,
    kappa: Kappa,
    points: Vec<(f64, Complex64)>,
    exec: Execution,
}

impl Ctx<'_> {
    fn order(&self, min: usize) -> usize {
        self.cfg.order.max(min)
    }

    fn is_implicit(&self) -> bool {
        self.field.kind() == FieldKind::ImplicitHodograph
    }

    fn is_particular(&self) -> bool {
        matches!(self.cfg.family.kind, FamilyKind::Plus | FamilyKind::Minus)
    }

    fn rows<C, F>(&self, width: usize, f: F) -> Vec<Row>
    where
        C: Into<Cell>,
        F: Fn(f64, Complex64) -> Vec<C> + Sync + Send,
    {
        map_points(self.exec, &self.points, |&(t, z)| {
            let r: Row = f(t, z).into_iter().map(Into::into).collect();
            debug_assert_eq!(r.len(), width);
            r
        })
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<ResidualReport, ConfigError> {
    run_suite_with(cfg, Execution::default())
}

pub fn run_suite_with(cfg: &SuiteConfig, exec: Execution) -> Result<ResidualReport, ConfigError> {
    cfg.validate()?;
    let field = cfg.family.build(cfg.seed)?;
    let kappa = cfg.kappa.or(field.kappa()).unwrap_or(Kappa::Plus);
    let points: Vec<_> = cfg.grid.points().into_iter().filter(|&(t, z)| field.in_domain(t, z)).collect();
    if points.is_empty() {
        return Err(ConfigError::EmptyGrid);
    }
    let ctx = Ctx { cfg, field, kappa, points, exec };
    let mut landscape = None;
    let checks = match cfg.suite {
        Suite::VerifySolution => verify_solution(&ctx),
        Suite::VerifyFoliation => verify_foliation(&ctx)?,
        Suite::VerifyResolving => verify_resolving(&ctx),
        Suite::VerifyHodograph => verify_hodograph(&ctx),
        Suite::VerifyHodographExtra => verify_hodograph_extra(&ctx),
        Suite::VerifySymmetry => verify_symmetry(&ctx)?,
        Suite::Scan => {
            let (checks, rows) = scan(&ctx);
            landscape = Some(rows);
            checks
        }
    };
    let echo = serde_json::to_value(cfg).expect("config serializes");
    let mut report = ResidualReport::new(cfg.suite.name().into(), echo, checks);
    report.landscape = landscape;
    Ok(report)
}

fn verify_solution(ctx: &Ctx) -> Vec<CheckResult> {
    let closed = ctx.cfg.closed_tol;
    let order = ctx.order(3);
    if ctx.is_implicit() {
        let checks = [
            Check::below("bf_residual", closed.max(IMPLICIT_TOL)),
            Check::below("hod_equation", closed),
            Check::below("ansatz", ANSATZ_TOL),
            Check::below("jet_reality", closed),
        ];
        let rows = ctx.rows(checks.len(), |t, z| {
            let direct = ctx.field.jet(t, z, order).ok();
            let hod = ctx.field.hodograph_jet(t, z, order).ok();
            let bf = direct.as_ref().and_then(|j| bf_residual(j, Kappa::Plus).ok());
            let he = hod.as_ref().and_then(|j| hod_equation_residuals(j, Kappa::Plus).ok());
            vec![
                bf.map(|r| r.full.norm()),
                he.map(|r| r.full.norm()),
                he.map(|r| r.ansatz.norm()),
                direct.as_ref().map(jet_reality),
            ]
        });
        return aggregate(&checks, &rows);
    }
    let mut checks = vec![
        Check::below("bf_residual", closed),
        Check::below("bf_invariant_form", closed),
        Check::below("jet_reality", closed),
    ];
    if ctx.is_particular() {
        checks.push(Check::below("u_zzbar_t", closed));
    }
    let rows = ctx.rows(checks.len(), |t, z| {
        let Ok(j) = ctx.field.jet(t, z, order) else { return vec![None; checks.len()] };
        let r = bf_residual(&j, ctx.kappa).ok();
        let mut row = vec![r.map(|r| r.full.norm()), r.map(|r| r.invariant.norm()), Some(jet_reality(&j))];
        if ctx.is_particular() {
            row.push(Some(j.at(1, 1, 1).norm()));
        }
        row
    });
    aggregate(&checks, &rows)
}

/// Largest relative difference of the frame invariants.
fn invariant_distance(a: &Jet, b: &Jet, kappa: Kappa) -> Result<f64, FoliationError> {
    let (fa, fb) = (invariant_frame(a, kappa)?, invariant_frame(b, kappa)?);
    Ok(fa
        .invariants()
        .iter()
        .zip(fb.invariants())
        .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
        .fold(0.0, f64::max))
}

fn verify_foliation(ctx: &Ctx) -> Result<Vec<CheckResult>, ConfigError> {
    let order = ctx.order(4);
    let maps = CONFORMAL_MAPS
        .iter()
        .map(|s| {
            let g = AnalyticFn::parse(s, Coord::Z).expect("fixed map parses");
            Ok((conformal_transform(&ctx.field, &g)?, g))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    let mut checks: Vec<Check> =
        CONFORMAL_MAPS.iter().map(|s| Check::below(format!("invariance[{s}]"), ctx.cfg.closed_tol)).collect();
    for s in ["u_t", "rho"] {
        for c in ["delta_Y", "delta_Ybar", "Y_Ybar"] {
            checks.push(Check::below(format!("commutator[{c}; {s}]"), ctx.cfg.tol));
        }
    }
    let rows = ctx.rows(checks.len(), |t, w| {
        let mut row = Vec::with_capacity(checks.len());
        for (tf, g) in &maps {
            if !tf.in_domain(t, w) {
                row.push(Cell::Excluded);
                continue;
            }
            let v = (|| {
                let z = g.eval(w).ok()?;
                let a = tf.jet(t, w, order).ok()?;
                let b = ctx.field.jet(t, z, order).ok()?;
                invariant_distance(&a, &b, ctx.kappa).ok()
            })();
            row.push(v.into());
        }
        let j = ctx.field.jet(t, w, order).ok();
        for s in [TestScalar::Ut, TestScalar::Rho] {
            match j.as_ref().map(|j| commutator_residuals(j, ctx.kappa, s)) {
                Some(Ok(r)) => row.extend(r.iter().map(|c| Cell::Value(c.norm()))),
                _ => row.extend([Cell::Skip; 3]),
            }
        }
        row
    });
    Ok(aggregate(&checks, &rows))
}

fn verify_resolving(ctx: &Ctx) -> Vec<CheckResult> {
    let order = ctx.order(4);
    let mut checks: Vec<Check> =
        RESOLVING_NAMES.iter().map(|n| Check::below(format!("resolving[{n}]"), ctx.cfg.tol)).collect();
    let particular = ctx.is_particular();
    if particular {
        for n in ["tau", "lambda", "lambda_bar"] {
            checks.push(Check::below(format!("particular[{n}]"), ctx.cfg.closed_tol));
        }
    }
    let rows = ctx.rows(checks.len(), |t, z| {
        let Ok(j) = ctx.field.jet(t, z, order) else { return vec![None; checks.len()] };
        let mut row: Vec<Option<f64>> = match resolving_residuals(&j, ctx.kappa) {
            Ok(r) => r.iter().map(|c| Some(c.norm())).collect(),
            Err(_) => vec![None; 5],
        };
        if particular {
            let check = invariant_frame(&j, ctx.kappa).and_then(|f| particular_check(&f));
            match check {
                Ok(p) => row.extend([Some(p.tau), p.lambda, p.lambda_bar]),
                // a real root is part of the claim; its absence counts as a violation
                Err(FoliationError::NegativeDiscriminant(d)) => row.extend([Some(d.abs()); 3]),
                Err(_) => row.extend([None; 3]),
            }
        }
        row
    });
    aggregate(&checks, &rows)
}

fn verify_hodograph(ctx: &Ctx) -> Vec<CheckResult> {
    let order = ctx.order(4);
    let implicit = ctx.is_implicit();
    let (tol, closed) = (ctx.cfg.tol, ctx.cfg.closed_tol);
    let mut checks = vec![Check::below("hod_equation", tol), Check::below("hod_equation_invariant", tol)];
    if implicit {
        checks.push(Check::below("ansatz", ANSATZ_TOL));
    } else {
        checks.extend([
            Check::below("cross_rho", closed),
            Check::below("cross_eta", closed),
            Check::below("inversion_round_trip", ROUND_TRIP_TOL),
        ]);
    }
    checks.push(Check::below("hod_resolving", tol));
    checks.push(Check::below("operator_actions", tol));
    let kappa = if implicit { Kappa::Plus } else { ctx.kappa };
    let rows = ctx.rows(checks.len(), |t, z| {
        let Ok(tj) = ctx.field.hodograph_jet(t, z, order) else { return vec![None; checks.len()] };
        let eq = hod_equation_residuals(&tj, kappa).ok();
        let mut row = vec![eq.map(|r| r.full.norm()), eq.map(|r| r.invariant.norm())];
        if implicit {
            row.push(eq.map(|r| r.ansatz.norm()));
        } else {
            let uj = ctx.field.jet(t, z, order).ok();
            let cross = uj.as_ref().and_then(|j| cross_check(j, kappa).ok());
            row.push(cross.map(|c| c.0));
            row.push(cross.map(|c| c.1));
            let back = hodograph_invert(&tj, order).ok();
            row.push(uj.zip(back).map(|(a, b)| {
                let scale = a.coeffs().map(|(_, c)| c.norm()).fold(1.0, f64::max);
                a.coeffs().zip(b.coeffs()).map(|((_, x), (_, y))| (x - y).norm()).fold(0.0, f64::max) / scale
            }));
        }
        row.push(hod_resolving_residuals(&tj, kappa).ok().map(|r| max_norm(&r)));
        row.push(operator_action_residuals(&tj, kappa).ok().map(|r| max_norm(&r)));
        row
    });
    aggregate(&checks, &rows)
}

fn verify_hodograph_extra(ctx: &Ctx) -> Vec<CheckResult> {
    let order = ctx.order(4);
    let checks = ["eq1", "eq2", "eq2_conj"].map(|n| Check::below(n, ctx.cfg.tol));
    let rows = ctx.rows(checks.len(), |t, z| {
        let Ok(tj) = ctx.field.hodograph_jet(t, z, order) else { return vec![None; 3] };
        match extra_relation_residuals(&tj) {
            Ok(r) => vec![Some(r.eq1.norm()), Some(r.eq2.norm()), Some(r.eq2_conj.norm())],
            Err(HodographError::NegativeDiscriminant(d)) => vec![Some(d.abs()); 3],
            Err(_) => vec![None; 3],
        }
    });
    aggregate(&checks, &rows)
}

fn verify_symmetry(ctx: &Ctx) -> Result<Vec<CheckResult>, ConfigError> {
    let spec = ctx.cfg.generator.as_deref().ok_or(ConfigError::MissingGenerator)?;
    let gen = parse_generator(spec).map_err(|e| ConfigError::Generator(e.to_string()))?;
    let (picture, equations) = if ctx.is_implicit() {
        (
            Picture::Hodograph,
            vec![("hod_equation".to_string(), hod_equation_expr(ctx.kappa)), ("ansatz".to_string(), ansatz_expr(ctx.kappa))],
        )
    } else {
        (Picture::Direct, vec![("bf_equation".to_string(), bf_expr(ctx.kappa))])
    };
    let gen = gen.in_picture(picture);
    symmetry_residual(&gen, &equations, &ctx.field, &ctx.points, ctx.cfg.tol, ctx.exec)
        .map_err(|e| ConfigError::Generator(e.to_string()))
}

fn scan(ctx: &Ctx) -> (Vec<CheckResult>, Vec<ScanRow>) {
    let order = ctx.order(4);
    let tol = ctx.cfg.tol;
    let checks = ["bf_residual", "resolving_max", "hod_equation", "hod_resolving_max", "extra_max", "jet_reality"]
        .map(|n| Check::info(n, tol));
    let rows = ctx.rows(checks.len(), |t, z| {
        let uj = ctx.field.jet(t, z, order).ok();
        let tj = ctx.field.hodograph_jet(t, z, order).ok();
        vec![
            uj.as_ref().and_then(|j| bf_residual(j, ctx.kappa).ok()).map(|r| r.full.norm()),
            uj.as_ref().and_then(|j| resolving_residuals(j, ctx.kappa).ok()).map(|r| max_norm(&r)),
            tj.as_ref().and_then(|j| hod_equation_residuals(j, ctx.kappa).ok()).map(|r| r.full.norm()),
            tj.as_ref().and_then(|j| hod_resolving_residuals(j, ctx.kappa).ok()).map(|r| max_norm(&r)),
            tj.as_ref().and_then(|j| extra_relation_residuals(j).ok()).map(|r| r.max_abs()),
            uj.as_ref().map(jet_reality),
        ]
    });
    let landscape = ctx
        .points
        .iter()
        .zip(&rows)
        .map(|(&(t, z), r)| ScanRow {
            t,
            x: z.re,
            y: z.im,
            values: r
                .iter()
                .map(|c| match c {
                    Cell::Value(x) => Some(*x),
                    _ => None,
                })
                .collect(),
        })
        .collect();
    (aggregate(&checks, &rows), landscape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::FamilySpec;

    fn cfg(suite: Suite, kind: FamilyKind) -> SuiteConfig {
        let mut c = SuiteConfig::new(suite);
        c.family = FamilySpec { kind, ..FamilySpec::default() };
        c.grid = "0.5:1.5:3,0.5:1.5:3,0.25:1.25:3".parse().unwrap();
        c
    }

    #[test]
    fn solution_plus_passes() {
        let r = run_suite(&cfg(Suite::VerifySolution, FamilyKind::Plus)).unwrap();
        assert!(r.pass, "{:#?}", r.checks);
        assert!(r.checks[0].max_abs < 1e-9);
    }

    #[test]
    fn random_fails_solution() {
        let r = run_suite(&cfg(Suite::VerifySolution, FamilyKind::Random)).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn resolving_minus_passes() {
        let r = run_suite(&cfg(Suite::VerifyResolving, FamilyKind::Minus)).unwrap();
        assert!(r.pass, "{:#?}", r.checks);
    }

    #[test]
    fn extra_on_plus_fails() {
        let r = run_suite(&cfg(Suite::VerifyHodographExtra, FamilyKind::Plus)).unwrap();
        assert!(!r.pass, "{:#?}", r.checks);
    }

    #[test]
    fn sequential_matches_parallel() {
        let c = cfg(Suite::VerifyFoliation, FamilyKind::Plus);
        let a = run_suite_with(&c, Execution::Sequential).unwrap();
        let b = run_suite_with(&c, Execution::Parallel).unwrap();
        assert_eq!(a.checks, b.checks);
    }

    #[test]
    fn empty_grid_is_config_error() {
        let mut c = cfg(Suite::VerifySolution, FamilyKind::Plus);
        c.grid = "1:1:1,-2:-1:2,0:0:1".parse().unwrap();
        assert!(matches!(run_suite(&c), Err(ConfigError::EmptyGrid)));
    }
}
