//! Declarative TOML problem files.
//!
//! ```toml
//! [domain]
//! kind = "interval"        # or "polygon" with vertices = [[x, y], ...] and h
//! x0 = 0.0
//! x1 = 1.0
//! cells = 8
//!
//! [time]
//! final = 1.0
//! dt = 0.05
//!
//! [gamma2]
//! pieces = [{ upper = 0.0, expr = "0" }]
//! tail = "1"
//! c = 1.0
//! theta = 0.0
//! ```
//!
//! Every section except `[domain]` and `[time]` is optional. Unknown keys are
//! rejected. Errors carry the line and column in the file.

use std::ops::Range;
use std::path::PathBuf;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::graph::{GrowthParams, MollifierKernel, PiecewiseGraph};
use crate::mesh::DomainSpec;
use crate::solver::{EpsSchedule, InitialMethod, SolveConfig, SpaceTimeFn};
use crate::verify::{HviOptions, InclusionOptions};

type Text = Spanned<String>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    domain: RawDomain,
    #[serde(default)]
    boundary: RawBoundary,
    time: RawTime,
    #[serde(default)]
    mollifier: RawMollifier,
    gamma1: Option<RawGraph>,
    gamma2: Option<RawGraph>,
    #[serde(default)]
    sources: RawSources,
    #[serde(default)]
    newton: RawNewton,
    #[serde(default)]
    check: RawCheck,
    #[serde(default)]
    study: RawStudy,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    kind: Spanned<String>,
    x0: Option<f64>,
    x1: Option<f64>,
    cells: Option<usize>,
    vertices: Option<Vec<[f64; 2]>>,
    h: Option<f64>,
    #[serde(default)]
    level: usize,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawBoundary {
    a: Option<Text>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    #[serde(rename = "final")]
    final_time: f64,
    dt: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMollifier {
    #[serde(default = "default_eps")]
    eps: f64,
    #[serde(default)]
    schedule: RawSchedule,
}

impl Default for RawMollifier {
    fn default() -> Self {
        Self {
            eps: default_eps(),
            schedule: RawSchedule::default(),
        }
    }
}

fn default_eps() -> f64 {
    0.1
}

#[derive(Debug, Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum RawSchedule {
    #[default]
    Geometric,
    Constant,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    upper: f64,
    expr: Text,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    #[serde(default)]
    pieces: Vec<RawPiece>,
    tail: Text,
    c: Option<Spanned<f64>>,
    theta: Option<Spanned<f64>>,
    d: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSources {
    f1: Option<Text>,
    f2: Option<Text>,
    u0: Option<Text>,
    exact: Option<Text>,
    #[serde(default)]
    initial: RawInitial,
}

#[derive(Debug, Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum RawInitial {
    #[default]
    Interpolate,
    Project,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNewton {
    #[serde(default = "default_newton_tol")]
    tol: f64,
    #[serde(default = "default_newton_iter")]
    max_iter: usize,
}

impl Default for RawNewton {
    fn default() -> Self {
        Self {
            tol: default_newton_tol(),
            max_iter: default_newton_iter(),
        }
    }
}

fn default_newton_tol() -> f64 {
    1e-10
}

fn default_newton_iter() -> usize {
    25
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    #[serde(default = "default_range")]
    range: [f64; 2],
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_energy_tol")]
    energy_tol: f64,
    #[serde(default = "default_factor")]
    inclusion_factor: f64,
    #[serde(default = "default_hvi_tests")]
    hvi_tests: usize,
    #[serde(default = "default_factor")]
    hvi_factor: f64,
}

impl Default for RawCheck {
    fn default() -> Self {
        Self {
            range: default_range(),
            samples: default_samples(),
            energy_tol: default_energy_tol(),
            inclusion_factor: default_factor(),
            hvi_tests: default_hvi_tests(),
            hvi_factor: default_factor(),
        }
    }
}

fn default_range() -> [f64; 2] {
    [-10.0, 10.0]
}
fn default_samples() -> usize {
    2001
}
fn default_energy_tol() -> f64 {
    1e-10
}
fn default_factor() -> f64 {
    10.0
}
fn default_hvi_tests() -> usize {
    50
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStudy {
    #[serde(default = "default_levels")]
    levels: usize,
}

impl Default for RawStudy {
    fn default() -> Self {
        Self {
            levels: default_levels(),
        }
    }
}

fn default_levels() -> usize {
    3
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
}

/// Sampling range and tolerances for the hypothesis and estimate checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub range: (f64, f64),
    pub samples: usize,
    pub energy_tol: f64,
    pub inclusion: InclusionOptions,
    pub hvi: HviOptions,
}

/// A parsed and validated problem file.
#[derive(Debug, Clone)]
pub struct ProblemConfig {
    pub solve: SolveConfig,
    pub schedule: EpsSchedule,
    /// Sign-condition constants `d` for the two graphs, when given.
    pub sign_constants: (Option<f64>, Option<f64>),
    pub check: CheckOptions,
    pub levels: usize,
    pub out_dir: PathBuf,
    pub seed: u64,
}

/// 1-based line and column of byte offset `pos` in `src`.
fn line_col(src: &str, pos: usize) -> (usize, usize) {
    let pos = pos.min(src.len());
    let before = &src[..pos];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(pos, |nl| pos - nl - 1) + 1;
    (line, col)
}

struct Ctx<'a> {
    src: &'a str,
}

impl Ctx<'_> {
    fn at(&self, span: Range<usize>, message: impl Into<String>) -> Error {
        let (line, column) = line_col(self.src, span.start);
        Error::ConfigParse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Parses an expression string, mapping its error column into the file.
    fn expr(&self, text: &Text, vars: &[&str], what: &str) -> Result<Expr> {
        Expr::parse(text.get_ref(), vars).map_err(|e| match e {
            Error::Expression { column, message } => {
                // The span starts at the opening quote and `column` is 1-based.
                let start = text.span().start + column;
                let (line, col) = line_col(self.src, start);
                Error::ConfigParse {
                    line,
                    column: col,
                    message: format!("{what}: {message}"),
                }
            }
            other => other,
        })
    }

    fn source(&self, text: Option<&Text>, what: &str) -> Result<SpaceTimeFn> {
        match text {
            Some(t) => Ok(SpaceTimeFn(self.expr(t, &SpaceTimeFn::VARS, what)?)),
            None => Ok(SpaceTimeFn::constant(0.0)),
        }
    }

    fn graph(&self, raw: Option<&RawGraph>, name: &str) -> Result<(PiecewiseGraph, Option<GrowthParams>, Option<f64>)> {
        let Some(raw) = raw else {
            return Ok((PiecewiseGraph::zero(), None, None));
        };
        let mut bps = Vec::new();
        let mut exprs = Vec::new();
        for p in &raw.pieces {
            bps.push(p.upper);
            exprs.push(self.expr(&p.expr, &["t"], &format!("{name} piece"))?);
        }
        exprs.push(self.expr(&raw.tail, &["t"], &format!("{name} tail"))?);
        let span = raw.tail.span();
        let graph = PiecewiseGraph::new(bps, exprs)
            .map_err(|e| self.at(span.clone(), format!("{name}: {e}")))?;

        let growth = match (&raw.c, &raw.theta) {
            (Some(c), Some(th)) => {
                if !(0.0..=1.0).contains(th.get_ref()) {
                    return Err(self.at(
                        th.span(),
                        format!("{name}.theta must lie in [0, 1], got {}", th.get_ref()),
                    ));
                }
                Some(
                    GrowthParams::new(*c.get_ref(), *th.get_ref())
                        .map_err(|e| self.at(c.span(), format!("{name}: {e}")))?,
                )
            }
            (None, None) => None,
            (Some(c), None) => return Err(self.at(c.span(), format!("{name}.c given without theta"))),
            (None, Some(t)) => return Err(self.at(t.span(), format!("{name}.theta given without c"))),
        };
        let d = match &raw.d {
            Some(d) if !(*d.get_ref() >= 0.0) => {
                return Err(self.at(d.span(), format!("{name}.d must be >= 0")))
            }
            Some(d) => Some(*d.get_ref()),
            None => None,
        };
        Ok((graph, growth, d))
    }
}

impl ProblemConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(src).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_col(src, s.start));
            Error::ConfigParse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let cx = Ctx { src };

        let d = &raw.domain;
        let kind_span = d.kind.span();
        let domain = match d.kind.get_ref().as_str() {
            "interval" => DomainSpec::Interval {
                x0: d.x0.unwrap_or(0.0),
                x1: d.x1.unwrap_or(1.0),
                cells: d
                    .cells
                    .ok_or_else(|| cx.at(kind_span.clone(), "interval domain needs `cells`"))?,
            },
            "polygon" => DomainSpec::Polygon {
                vertices: d
                    .vertices
                    .clone()
                    .ok_or_else(|| cx.at(kind_span.clone(), "polygon domain needs `vertices`"))?,
                h: d.h.ok_or_else(|| cx.at(kind_span.clone(), "polygon domain needs `h`"))?,
            },
            other => {
                return Err(cx.at(
                    kind_span,
                    format!("unknown domain kind `{other}`, expected `interval` or `polygon`"),
                ))
            }
        };

        let a = match &raw.boundary.a {
            Some(t) => cx.expr(t, &["x", "y"], "boundary.a")?,
            None => Expr::constant(1.0),
        };
        let (gamma1, growth1, d1) = cx.graph(raw.gamma1.as_ref(), "gamma1")?;
        let (gamma2, growth2, d2) = cx.graph(raw.gamma2.as_ref(), "gamma2")?;
        let s = &raw.sources;

        let solve = SolveConfig {
            domain,
            level: d.level,
            a,
            final_time: raw.time.final_time,
            dt: raw.time.dt,
            eps: raw.mollifier.eps,
            gamma1,
            gamma2,
            growth1,
            growth2,
            f1: cx.source(s.f1.as_ref(), "sources.f1")?,
            f2: cx.source(s.f2.as_ref(), "sources.f2")?,
            u0: cx.source(s.u0.as_ref(), "sources.u0")?,
            exact: s
                .exact
                .as_ref()
                .map(|t| cx.source(Some(t), "sources.exact"))
                .transpose()?,
            initial: match s.initial {
                RawInitial::Interpolate => InitialMethod::Interpolate,
                RawInitial::Project => InitialMethod::Project,
            },
            newton_tol: raw.newton.tol,
            newton_max_iter: raw.newton.max_iter,
            kernel: MollifierKernel::bump(),
        };
        solve.validate().map_err(|e| Error::Config(e.to_string()))?;

        let c = &raw.check;
        if !(c.range[0] < c.range[1]) || c.samples < 2 {
            return Err(Error::Config(
                "check.range must be increasing and check.samples >= 2".into(),
            ));
        }
        if raw.study.levels < 2 {
            return Err(Error::Config(format!(
                "study.levels must be at least 2, got {}",
                raw.study.levels
            )));
        }
        Ok(Self {
            solve,
            schedule: match raw.mollifier.schedule {
                RawSchedule::Geometric => EpsSchedule::Geometric,
                RawSchedule::Constant => EpsSchedule::Constant,
            },
            sign_constants: (d1, d2),
            check: CheckOptions {
                range: (c.range[0], c.range[1]),
                samples: c.samples,
                energy_tol: c.energy_tol,
                inclusion: InclusionOptions {
                    factor: c.inclusion_factor,
                    ..InclusionOptions::default()
                },
                hvi: HviOptions {
                    tests_per_step: c.hvi_tests,
                    seed: raw.output.seed,
                    factor: c.hvi_factor,
                },
            },
            levels: raw.study.levels,
            out_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from("out")),
            seed: raw.output.seed,
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&src)
    }
}
