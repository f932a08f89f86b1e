use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use wentzell::config::ProblemConfig;
use wentzell::fem::estimate_coercivity;
use wentzell::graph::{GrowthReport, SignReport};
use wentzell::verify::{
    apriori_stability, reaction_growth_check, AprioriReport, EnergyReport, HviOptions, HviReport,
    InclusionReport, ReactionGrowthReport, SmallnessVerdict, StabilityReport,
};
use wentzell::{
    apriori_check, assemble, check_growth, check_sign_condition, energy_check, hvi_residual,
    refine_study, smallness_check, Error, Expr, PiecewiseGraph, SolveOutput,
};

use crate::output::{self, EnvelopeRow};
use crate::{Common, EnvelopeArgs, Which, OUT_DIR_ENV};

/// Bounded ratio of the observed a priori constants across study levels.
const STABILITY_LIMIT: f64 = 4.0;
/// Smallest acceptable inclusion fraction at the finest study level.
const INCLUSION_FLOOR: f64 = 0.99;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for anything wrong with the input, 1 for failures while computing.
    pub fn status(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Io { .. } => 1,
            Self::Core(e) => match e {
                Error::ConfigParse { .. }
                | Error::Config(_)
                | Error::Expression { .. }
                | Error::Hypothesis { .. }
                | Error::Domain(_)
                | Error::Mesh(_) => 2,
                _ => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "{m}"),
            Self::Core(e) => write!(f, "{e}"),
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

type CmdResult = Result<bool, CliError>;

fn out_dir(flag: Option<&PathBuf>, config: &Path) -> PathBuf {
    flag.cloned()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| config.to_path_buf())
}

fn load(common: &Common) -> Result<(ProblemConfig, PathBuf), CliError> {
    let mut cfg = ProblemConfig::from_file(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
        cfg.check.hvi.seed = seed;
    }
    let dir = out_dir(common.out_dir.as_ref(), &cfg.out_dir);
    Ok((cfg, dir))
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct SolveVerdict<'a> {
    pass: bool,
    coercivity: f64,
    steps: usize,
    dt: f64,
    eps: f64,
    l2_error: Option<f64>,
    smallness: Option<SmallnessVerdict>,
    energy: &'a EnergyReport,
    apriori: AprioriReport,
    reaction_growth: Option<ReactionGrowthReport>,
}

pub fn solve(common: &Common) -> CmdResult {
    let (cfg, dir) = load(common)?;
    let out = wentzell::solve(&cfg.solve)?;
    let energy = energy_check(&out.ops, &out.trajectory, &out.ledger, cfg.check.energy_tol)?;
    let growth = growth_pair(&cfg);
    let apriori = apriori_check(&out.ops, &out.trajectory, &out.ledger, growth, out.eps)?;
    let reaction_growth = growth.map(|(g1, g2)| reaction_growth_check(&out.ops, &out.trajectory, g1, g2, out.eps));
    let l2_error = cfg
        .solve
        .exact
        .as_ref()
        .map(|_| wentzell::solver::l2_time_error(&out));

    output::write(&dir, "trajectory.csv", &output::trajectory_csv(&out.ops, &out.trajectory))?;
    output::write(&dir, "ledger.csv", &output::ledger_csv(&out.ledger, &out.trajectory))?;
    let verdict = SolveVerdict {
        pass: energy.pass,
        coercivity: out.ledger.coercivity,
        steps: out.trajectory.len() - 1,
        dt: out.dt,
        eps: out.eps,
        l2_error,
        smallness: out.ledger.smallness,
        energy: &energy,
        apriori,
        reaction_growth,
    };
    output::write(&dir, "verdict.json", &output::json_report("solve", &verdict))?;

    println!(
        "solved {} steps on {} vertices, M = {:.6e}",
        verdict.steps,
        out.ops.dim(),
        verdict.coercivity
    );
    println!(
        "energy inequality: {} (worst relative violation {:.3e})",
        pass_fail(energy.pass),
        energy.worst_violation
    );
    if let Some(e) = l2_error {
        println!("L2(0,T;H) error: {e:.6e}");
    }
    println!("wrote {}", dir.display());
    Ok(energy.pass)
}

fn growth_pair(cfg: &ProblemConfig) -> Option<(&wentzell::GrowthParams, &wentzell::GrowthParams)> {
    cfg.solve.growth1.as_ref().zip(cfg.solve.growth2.as_ref())
}

#[derive(Serialize)]
struct LevelVerdict {
    level: usize,
    h: f64,
    dt: f64,
    eps: f64,
    l2_error: Option<f64>,
    energy_pass: bool,
    energy_worst_violation: f64,
    inclusion: InclusionReport,
    hvi: HviReport,
    apriori: AprioriReport,
}

#[derive(Serialize)]
struct StudyVerdict {
    pass: bool,
    schedule: wentzell::EpsSchedule,
    levels: Vec<LevelVerdict>,
    differences: Vec<f64>,
    difference_rates: Vec<f64>,
    error_rates: Vec<f64>,
    inclusion_fractions: Vec<f64>,
    inclusion_ok: bool,
    hvi_min_scaled: Vec<f64>,
    hvi_ok: bool,
    energy_ok: bool,
    apriori_constants: Vec<f64>,
    stability: StabilityReport,
    note: Option<String>,
}

fn level_checks(
    cfg: &ProblemConfig,
    out: &SolveOutput,
    inclusion: InclusionReport,
    level: usize,
    h: f64,
    error: Option<f64>,
) -> Result<LevelVerdict, CliError> {
    let s = &cfg.solve;
    let energy = energy_check(&out.ops, &out.trajectory, &out.ledger, cfg.check.energy_tol)?;
    let hvi_opts = HviOptions {
        seed: cfg.seed,
        ..cfg.check.hvi
    };
    let hvi = hvi_residual(&out.ops, &out.trajectory, &s.gamma1, &s.gamma2, out.eps, &hvi_opts);
    let apriori = apriori_check(&out.ops, &out.trajectory, &out.ledger, growth_pair(cfg), out.eps)?;
    Ok(LevelVerdict {
        level,
        h,
        dt: out.dt,
        eps: out.eps,
        l2_error: error,
        energy_pass: energy.pass,
        energy_worst_violation: energy.worst_violation,
        inclusion,
        hvi,
        apriori,
    })
}

pub fn study(common: &Common, levels: Option<usize>) -> CmdResult {
    let (cfg, dir) = load(common)?;
    let levels = levels.unwrap_or(cfg.levels);
    if levels < 2 {
        return Err(CliError::Usage(format!(
            "a refinement study needs at least 2 levels, got {levels}"
        )));
    }
    let report = refine_study(&cfg.solve, levels, cfg.schedule, &cfg.check.inclusion)?;
    let per_level = report
        .levels
        .iter()
        .map(|l| level_checks(&cfg, &l.output, l.inclusion, l.level, l.h, l.error))
        .collect::<Result<Vec<_>, _>>()?;

    let fractions: Vec<f64> = per_level.iter().map(|l| l.inclusion.fraction_inside).collect();
    let inclusion_ok = fractions.windows(2).all(|w| w[1] >= w[0])
        && fractions.last().is_some_and(|&f| f >= INCLUSION_FLOOR);
    let hvi_ok = per_level.iter().all(|l| l.hvi.pass);
    let energy_ok = per_level.iter().all(|l| l.energy_pass);
    let constants: Vec<f64> = per_level.iter().map(|l| l.apriori.c_observed).collect();
    let stability = apriori_stability(&constants, STABILITY_LIMIT);
    let pass = inclusion_ok && hvi_ok && energy_ok && stability.ok;

    let verdict = StudyVerdict {
        pass,
        schedule: report.schedule,
        hvi_min_scaled: per_level.iter().map(|l| l.hvi.min_scaled_residual).collect(),
        levels: per_level,
        differences: report.differences,
        difference_rates: report.difference_rates,
        error_rates: report.error_rates,
        inclusion_fractions: fractions,
        inclusion_ok,
        hvi_ok,
        energy_ok,
        apriori_constants: constants,
        stability,
        note: report.note,
    };
    output::write(&dir, "study.json", &output::json_report("study", &verdict))?;

    println!("level        h           dt          eps         error       inclusion  hvi_scaled");
    for l in &verdict.levels {
        println!(
            "{:>5}  {:.4e}  {:.4e}  {:.4e}  {:>10}  {:.6}   {:.3e}",
            l.level,
            l.h,
            l.dt,
            l.eps,
            l.l2_error.map_or("-".to_string(), |e| format!("{e:.4e}")),
            l.inclusion.fraction_inside,
            l.hvi.min_scaled_residual
        );
    }
    if !verdict.error_rates.is_empty() {
        println!("error rates: {:.3?}", verdict.error_rates);
    }
    println!("difference rates: {:.3?}", verdict.difference_rates);
    println!(
        "energy {}  inclusion {}  hvi {}  a priori stability {} (ratio {:.3})",
        pass_fail(energy_ok),
        pass_fail(inclusion_ok),
        pass_fail(hvi_ok),
        pass_fail(verdict.stability.ok),
        verdict.stability.ratio
    );
    if let Some(n) = &verdict.note {
        println!("note: {n}");
    }
    println!("wrote {}", dir.join("study.json").display());
    Ok(pass)
}

/// Parses `sign`, `heaviside`, `zero`, `identity` or `expr;upper;expr;...`.
pub fn parse_graph_spec(spec: &str) -> Result<PiecewiseGraph, CliError> {
    match spec.trim() {
        "sign" => return Ok(PiecewiseGraph::sign()),
        "heaviside" => return Ok(PiecewiseGraph::heaviside()),
        "zero" => return Ok(PiecewiseGraph::zero()),
        "identity" => return Ok(PiecewiseGraph::identity()),
        _ => {}
    }
    let parts: Vec<&str> = spec.split(';').map(str::trim).collect();
    if parts.len().is_multiple_of(2) {
        return Err(CliError::Usage(
            "graph spec must alternate expressions and breakpoints: expr;upper;...;expr".into(),
        ));
    }
    let mut bps = Vec::new();
    let mut exprs = Vec::new();
    for (k, p) in parts.iter().enumerate() {
        if k % 2 == 1 {
            bps.push(
                p.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("breakpoint `{p}` is not a number")))?,
            );
        } else {
            exprs.push(Expr::parse(p, &["t"])?);
        }
    }
    Ok(PiecewiseGraph::new(bps, exprs)?)
}

fn parse_range(r: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("--range takes two numbers `a,b`, got `{r}`"));
    let (a, b) = r.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn envelope(args: &EnvelopeArgs) -> CmdResult {
    let (graph, default_range, config_dir) = match (&args.graph, &args.config) {
        (Some(spec), _) => (parse_graph_spec(spec)?, (-1.0, 1.0), PathBuf::from("out")),
        (None, Some(path)) => {
            let cfg = ProblemConfig::from_file(path)?;
            let g = match args.which {
                Which::Gamma1 => cfg.solve.gamma1,
                Which::Gamma2 => cfg.solve.gamma2,
            };
            (g, cfg.check.range, cfg.out_dir)
        }
        (None, None) => return Err(CliError::Usage("need --graph or --config".into())),
    };
    let (a, b) = match &args.range {
        Some(r) => parse_range(r)?,
        None => default_range,
    };
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(CliError::Usage(format!("empty sampling range [{a}, {b}]")));
    }
    if args.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    if let Some(e) = args.eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(CliError::Usage(format!("mollification radius must be positive, got {e}")));
    }

    let kernel = wentzell::MollifierKernel::bump();
    let n = args.samples;
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let t = if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 };
        let (left, right) = graph.one_sided_limits(t);
        let mollified = args
            .eps_list
            .iter()
            .map(|&e| graph.mollify(&kernel, e, t))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(EnvelopeRow {
            t,
            left,
            right,
            envelope: graph.chang_envelope(t),
            mollified,
        });
    }
    let dir = out_dir(args.out_dir.as_ref(), &config_dir);
    output::write(&dir, "envelope.csv", &output::envelope_csv(&args.eps_list, &rows))?;
    println!("wrote {} rows to {}", n, dir.join("envelope.csv").display());
    Ok(true)
}

#[derive(Serialize)]
struct CheckRow {
    name: String,
    ok: bool,
    detail: String,
}

#[derive(Serialize)]
struct CheckVerdict {
    pass: bool,
    coercivity: f64,
    checks: Vec<CheckRow>,
    growth: [Option<GrowthReport>; 2],
    sign: [Option<SignReport>; 2],
    smallness: Option<SmallnessVerdict>,
}

pub fn check(common: &Common) -> CmdResult {
    let (cfg, dir) = load(common)?;
    let s = &cfg.solve;
    let mesh = wentzell::mesh::build_mesh_at_level(&s.domain, s.level)?;
    let ops = assemble(&mesh, &s.a)?;
    let m = estimate_coercivity(&ops)?;
    let (range, samples) = (cfg.check.range, cfg.check.samples);

    let mut rows = Vec::new();
    let mut growth = [None, None];
    let mut sign = [None, None];
    let graphs = [(&s.gamma1, s.growth1, cfg.sign_constants.0), (&s.gamma2, s.growth2, cfg.sign_constants.1)];
    for (k, (g, p, d)) in graphs.into_iter().enumerate() {
        let name = format!("gamma{}", k + 1);
        if let Some(p) = p {
            let r = check_growth(g, &p, range, samples)?;
            rows.push(CheckRow {
                name: format!("H({name}) growth c={} theta={}", p.c, p.theta),
                ok: r.ok,
                detail: format!("worst ratio {:.4} at t = {:.4}", r.worst_ratio, r.worst_t),
            });
            growth[k] = Some(r);
        }
        if let Some(d) = d {
            let r = check_sign_condition(g, d, range, samples)?;
            rows.push(CheckRow {
                name: format!("H({name}) sign d={d}"),
                ok: r.ok,
                detail: format!("worst excess {:.4e} at t = {:.4}", r.worst_excess, r.worst_t),
            });
            sign[k] = Some(r);
        }
    }
    let smallness = match (s.growth1, s.growth2) {
        (Some(p1), Some(p2)) => {
            let v = smallness_check(p1.theta, p2.theta, p1.c, p2.c, m)?;
            rows.push(CheckRow {
                name: format!("smallness case {}", v.case),
                ok: v.ok,
                detail: if v.margin.is_finite() {
                    format!("margin {:.6e} with M = {m:.6e}", v.margin)
                } else {
                    format!("unconditional, M = {m:.6e}")
                },
            });
            Some(v)
        }
        _ => None,
    };

    let pass = rows.iter().all(|r| r.ok);
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    println!("M = {m:.6e}");
    for r in &rows {
        println!("{:<width$}  {}  {}", r.name, if r.ok { "ok" } else { "NOT OK" }, r.detail);
    }
    if rows.is_empty() {
        println!("no growth or sign constants given; nothing to check");
    }
    let verdict = CheckVerdict {
        pass,
        coercivity: m,
        checks: rows,
        growth,
        sign,
        smallness,
    };
    output::write(&dir, "check.json", &output::json_report("check", &verdict))?;
    Ok(pass)
}
