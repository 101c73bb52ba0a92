use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffexpr::{AnalyticFn, Coord, ExprError, MAX_ORDER};
use crate::families::{make_hodograph, make_sol_minus, make_sol_plus, random_field, Field, FieldError, Kappa};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_CLOSED_TOL: f64 = 1e-9;
pub const DEFAULT_ORDER: usize = 4;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("bad grid `{0}`: expected T0:T1:NT,X0:X1:NX,Y0:Y1:NY with counts >= 1")]
    Grid(String),
    #[error("jet order {0} outside 1..={MAX_ORDER}")]
    Order(usize),
    #[error("tolerance must be positive and finite, got {0}")]
    Tol(f64),
    #[error("random degree {0} above 4")]
    Degree(usize),
    #[error("bad expression `{text}`: {source}")]
    Expr { text: String, source: ExprError },
    #[error("family: {0}")]
    Family(#[from] FieldError),
    #[error("suite verify-symmetry needs a generator")]
    MissingGenerator,
    #[error("generator: {0}")]
    Generator(String),
    #[error("no grid point lies in the family's domain")]
    EmptyGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    VerifySolution,
    VerifyFoliation,
    VerifyResolving,
    VerifyHodograph,
    VerifyHodographExtra,
    VerifySymmetry,
    Scan,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::VerifySolution,
        Suite::VerifyFoliation,
        Suite::VerifyResolving,
        Suite::VerifyHodograph,
        Suite::VerifyHodographExtra,
        Suite::VerifySymmetry,
        Suite::Scan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::VerifySolution => "verify-solution",
            Suite::VerifyFoliation => "verify-foliation",
            Suite::VerifyResolving => "verify-resolving",
            Suite::VerifyHodograph => "verify-hodograph",
            Suite::VerifyHodographExtra => "verify-hodograph-extra",
            Suite::VerifySymmetry => "verify-symmetry",
            Suite::Scan => "scan",
        }
    }
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| ConfigError::UnknownSuite(s.into()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Plus,
    Minus,
    Hodograph,
    Random,
}

impl FromStr for FamilyKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" => Ok(FamilyKind::Plus),
            "minus" => Ok(FamilyKind::Minus),
            "hodograph" => Ok(FamilyKind::Hodograph),
            "random" => Ok(FamilyKind::Random),
            _ => Err(ConfigError::UnknownFamily(s.into())),
        }
    }
}

/// `b`, `c` are functions of `z`; `alpha`, `h` functions of `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub b: String,
    pub c: String,
    pub alpha: String,
    pub h: String,
    pub degree: usize,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            kind: FamilyKind::Plus,
            b: "z".into(),
            c: "z".into(),
            alpha: "0".into(),
            h: "0".into(),
            degree: 3,
        }
    }
}

fn parse_fn(text: &str, var: Coord) -> Result<AnalyticFn, ConfigError> {
    AnalyticFn::parse(text, var).map_err(|source| ConfigError::Expr { text: text.into(), source })
}

impl FamilySpec {
    /// The random family draws from `seed`.
    pub fn build(&self, seed: u64) -> Result<Field, ConfigError> {
        Ok(match self.kind {
            FamilyKind::Plus => make_sol_plus(&parse_fn(&self.b, Coord::Z)?, &parse_fn(&self.c, Coord::Z)?)?,
            FamilyKind::Minus => make_sol_minus(&parse_fn(&self.b, Coord::Z)?, &parse_fn(&self.c, Coord::Z)?)?,
            FamilyKind::Hodograph => make_hodograph(&parse_fn(&self.alpha, Coord::U)?, &parse_fn(&self.h, Coord::U)?)?,
            FamilyKind::Random => {
                if self.degree > 4 {
                    return Err(ConfigError::Degree(self.degree));
                }
                random_field(seed, self.degree)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| {
            if self.n == 1 {
                self.lo
            } else {
                self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64
            }
        })
    }
}

/// Tensor grid over `(t, x, y)`, with `z = x + i y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t: Axis,
    pub x: Axis,
    pub y: Axis,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            t: Axis { lo: 0.5, hi: 1.5, n: 5 },
            x: Axis { lo: 0.5, hi: 1.5, n: 5 },
            y: Axis { lo: 0.25, hi: 1.25, n: 5 },
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<(f64, Complex64)> {
        let mut out = Vec::with_capacity(self.t.n * self.x.n * self.y.n);
        for t in self.t.points() {
            for x in self.x.points() {
                for y in self.y.points() {
                    out.push((t, Complex64::new(x, y)));
                }
            }
        }
        out
    }
}

impl FromStr for GridSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::Grid(s.into());
        let axes = s
            .split(',')
            .map(|a| {
                let parts: Vec<&str> = a.trim().split(':').collect();
                let [lo, hi, n] = parts[..] else { return Err(bad()) };
                let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
                let n: usize = n.trim().parse().map_err(|_| bad())?;
                if n == 0 || !lo.is_finite() || !hi.is_finite() {
                    return Err(bad());
                }
                Ok(Axis { lo, hi, n })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let [t, x, y] = axes[..] else { return Err(bad()) };
        Ok(GridSpec { t, x, y })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub family: FamilySpec,
    /// Defaults to the family's own sign, or `+1` for the random field.
    pub kappa: Option<Kappa>,
    pub grid: GridSpec,
    pub order: usize,
    /// Tolerance for identities on derived quantities.
    pub tol: f64,
    /// Tolerance for closed-form solutions and exact relations.
    pub closed_tol: f64,
    pub seed: u64,
    pub generator: Option<String>,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> SuiteConfig {
        SuiteConfig {
            suite,
            family: FamilySpec::default(),
            kappa: None,
            grid: GridSpec::default(),
            order: DEFAULT_ORDER,
            tol: DEFAULT_TOL,
            closed_tol: DEFAULT_CLOSED_TOL,
            seed: 0,
            generator: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.order == 0 || self.order > MAX_ORDER {
            return Err(ConfigError::Order(self.order));
        }
        for tol in [self.tol, self.closed_tol] {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(ConfigError::Tol(tol));
            }
        }
        if self.suite == Suite::VerifySymmetry && self.generator.is_none() {
            return Err(ConfigError::MissingGenerator);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parse() {
        let g: GridSpec = "0:1:3, -1:1:2,0.5:0.5:1".parse().unwrap();
        assert_eq!(g.t, Axis { lo: 0.0, hi: 1.0, n: 3 });
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], (0.0, Complex64::new(-1.0, 0.5)));
        assert_eq!(pts[5], (1.0, Complex64::new(1.0, 0.5)));
        for bad in ["0:1:0,0:1:1,0:1:1", "0:1:2,0:1:2", "a:1:1,0:1:1,0:1:1", "0:1,0:1:1,0:1:1"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_value(s).unwrap(), serde_json::json!(s.name()));
        }
        assert!("verify".parse::<Suite>().is_err());
    }

    #[test]
    fn validation() {
        let mut c = SuiteConfig::new(Suite::VerifySolution);
        assert!(c.validate().is_ok());
        c.order = 7;
        assert!(matches!(c.validate(), Err(ConfigError::Order(7))));
        let c = SuiteConfig::new(Suite::VerifySymmetry);
        assert!(matches!(c.validate(), Err(ConfigError::MissingGenerator)));
    }
}
