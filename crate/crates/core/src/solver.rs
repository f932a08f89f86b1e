//! Backward Euler time stepping of the mollified Galerkin system, plus the
//! joint mesh/time/mollifier refinement study.

use std::sync::Arc;
use std::thread;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fem::{assemble, AssembledOperators, ProductVector};
use crate::graph::{GrowthParams, MollifierKernel, PiecewiseGraph};
use crate::linalg::{dot, BandLu, CsrMatrix};
use crate::mesh::{build_mesh_at_level, refine, DomainSpec};
use crate::verify::{inclusion_check, smallness_check, InclusionOptions, InclusionReport, SmallnessVerdict};

/// How the initial datum is brought into the discrete space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialMethod {
    #[default]
    Interpolate,
    Project,
}

/// Mollification radius across refinement levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsSchedule {
    /// `eps_m = eps_0 2^{-m}`.
    #[default]
    Geometric,
    Constant,
}

/// A scalar field of `(t, x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeFn(pub Expr);

impl SpaceTimeFn {
    pub const VARS: [&'static str; 3] = ["t", "x", "y"];

    pub fn parse(src: &str) -> Result<Self> {
        Ok(Self(Expr::parse(src, &Self::VARS)?))
    }

    pub fn constant(c: f64) -> Self {
        Self(Expr::constant(c))
    }

    pub fn eval(&self, t: f64, x: [f64; 2]) -> f64 {
        self.0.eval(&[t, x[0], x[1]])
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub domain: DomainSpec,
    /// Extra uniform refinements applied to `domain`.
    pub level: usize,
    /// Boundary coefficient in `x`, `y`.
    pub a: Expr,
    pub final_time: f64,
    pub dt: f64,
    pub eps: f64,
    pub gamma1: PiecewiseGraph,
    pub gamma2: PiecewiseGraph,
    pub growth1: Option<GrowthParams>,
    pub growth2: Option<GrowthParams>,
    pub f1: SpaceTimeFn,
    pub f2: SpaceTimeFn,
    pub u0: SpaceTimeFn,
    /// Known solution, for error columns and convergence rates.
    pub exact: Option<SpaceTimeFn>,
    pub initial: InitialMethod,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub kernel: MollifierKernel,
}

impl SolveConfig {
    /// A 1D unit-interval problem with zero data; fields are public for
    /// further customization.
    pub fn new(domain: DomainSpec) -> Self {
        Self {
            domain,
            level: 0,
            a: Expr::constant(1.0),
            final_time: 1.0,
            dt: 0.05,
            eps: 0.1,
            gamma1: PiecewiseGraph::zero(),
            gamma2: PiecewiseGraph::zero(),
            growth1: None,
            growth2: None,
            f1: SpaceTimeFn::constant(0.0),
            f2: SpaceTimeFn::constant(0.0),
            u0: SpaceTimeFn::constant(0.0),
            exact: None,
            initial: InitialMethod::Interpolate,
            newton_tol: 1e-10,
            newton_max_iter: 25,
            kernel: MollifierKernel::bump(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        pos(self.final_time, "final time")?;
        pos(self.dt, "time step")?;
        pos(self.eps, "mollification radius")?;
        pos(self.newton_tol, "Newton tolerance")?;
        if self.newton_max_iter == 0 {
            return Err(Error::Domain("Newton needs at least one iteration".into()));
        }
        Ok(())
    }

    /// Number of uniform steps and the step actually used.
    pub fn time_grid(&self) -> (usize, f64) {
        let n = ((self.final_time / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (n, self.final_time / n as f64)
    }
}

/// Nodal mollified reactions at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reaction {
    /// `γ_{1ε}(u_i)` at every vertex.
    pub xi1: Vec<f64>,
    /// `γ_{2ε}(u_i)` at boundary vertices, in `boundary_vertices` order.
    pub xi2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ProductVector>,
    pub reactions: Vec<Reaction>,
    /// Load vector `F(tⁿ)` used at each time.
    pub loads: Vec<Vec<f64>>,
    pub boundary_vertices: Vec<usize>,
    pub newton_iterations: Vec<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Piecewise-linear interpolation in time.
    pub fn state_at(&self, t: f64) -> Vec<f64> {
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            return self.states[0].coeffs.clone();
        }
        if k >= self.times.len() {
            return self.states.last().unwrap().coeffs.clone();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        if (t1 - t).abs() <= 1e-12 * t1.abs().max(1.0) {
            return self.states[k].coeffs.clone();
        }
        let s = (t - t0) / (t1 - t0);
        self.states[k - 1]
            .coeffs
            .iter()
            .zip(&self.states[k].coeffs)
            .map(|(a, b)| (1.0 - s) * a + s * b)
            .collect()
    }
}

/// Per-step terms of the discrete energy inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerRow {
    pub time: f64,
    pub dt: f64,
    /// `|Uⁿ|²_ℍ`.
    pub h_norm_sq: f64,
    /// `‖Uⁿ‖²_𝕍`.
    pub v_norm_sq: f64,
    /// `‖Fⁿ‖_{𝕍*}`.
    pub f_dual: f64,
    /// `Σ ℓ_Ω,i ξ₁,i u_i`.
    pub pairing_omega: f64,
    /// `Σ ℓ_Γ,i ξ₂,i u_i`.
    pub pairing_gamma: f64,
    /// `dt |⟨rⁿ, Uⁿ⟩|` from the Newton residual `rⁿ`.
    pub rho: f64,
    /// Error against the exact solution in ℍ, when one is known.
    pub error: Option<f64>,
}

/// Constants of the growth chain, evaluated at the final time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthConstants {
    pub a1: f64,
    pub a1p: f64,
    pub a2: f64,
    pub a2p: f64,
}

impl GrowthConstants {
    /// `a₁ = c₁√(2tλ)`, `a₁′ = c₁√(2λ^{1-θ₁}t^{1-θ₁})` and the boundary analogues
    /// with `σ(Γ)`.
    pub fn new(
        g1: &GrowthParams,
        g2: &GrowthParams,
        t: f64,
        volume: f64,
        boundary_measure: f64,
    ) -> Self {
        let pair = |g: &GrowthParams, meas: f64| {
            (
                g.c * (2.0 * t * meas).sqrt(),
                g.c * (2.0 * meas.powf(1.0 - g.theta) * t.powf(1.0 - g.theta)).sqrt(),
            )
        };
        let (a1, a1p) = pair(g1, volume);
        let (a2, a2p) = pair(g2, boundary_measure);
        Self { a1, a1p, a2, a2p }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub coercivity: f64,
    pub rows: Vec<LedgerRow>,
    /// `|U⁰|²_ℍ`.
    pub initial_h_norm_sq: f64,
    pub constants: Option<GrowthConstants>,
    pub smallness: Option<SmallnessVerdict>,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub ops: Arc<AssembledOperators>,
    pub trajectory: Trajectory,
    pub ledger: EnergyLedger,
    pub eps: f64,
    pub dt: f64,
}

/// Discrete initial state per `cfg.initial`.
pub fn project_initial(ops: &AssembledOperators, cfg: &SolveConfig) -> Result<ProductVector> {
    let f = |x: [f64; 2]| cfg.u0.eval(0.0, x);
    match cfg.initial {
        InitialMethod::Interpolate => ops.interpolate(f),
        InitialMethod::Project => ops.project(f),
    }
}

/// Reaction load `L_Ω γ_{1ε}(U) + L_Γ γ_{2ε}(U|_Γ)` and the nodal reactions.
pub fn nemytskii(
    ops: &AssembledOperators,
    cfg: &SolveConfig,
    u: &[f64],
) -> Result<(Vec<f64>, Reaction)> {
    let (load, reaction, _) = reaction_terms(ops, cfg, cfg.eps, u, false)?;
    Ok((load, reaction))
}

/// Load, reactions and (optionally) the diagonal Jacobian of the load.
fn reaction_terms(
    ops: &AssembledOperators,
    cfg: &SolveConfig,
    eps: f64,
    u: &[f64],
    with_jacobian: bool,
) -> Result<(Vec<f64>, Reaction, Vec<f64>)> {
    let n = u.len();
    let mut load = vec![0.0; n];
    let mut jac = vec![0.0; if with_jacobian { n } else { 0 }];
    let mut xi1 = Vec::with_capacity(n);
    for (i, &ui) in u.iter().enumerate() {
        let (v, d) = eval_mollified(&cfg.gamma1, &cfg.kernel, eps, ui, with_jacobian)?;
        xi1.push(v);
        load[i] += ops.lumped_omega[i] * v;
        if with_jacobian {
            jac[i] += ops.lumped_omega[i] * d;
        }
    }
    let bv = ops.mesh.boundary_vertices();
    let mut xi2 = Vec::with_capacity(bv.len());
    for &i in bv {
        let (v, d) = eval_mollified(&cfg.gamma2, &cfg.kernel, eps, u[i], with_jacobian)?;
        xi2.push(v);
        load[i] += ops.lumped_gamma[i] * v;
        if with_jacobian {
            jac[i] += ops.lumped_gamma[i] * d;
        }
    }
    if load.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("reaction term is not finite".into()));
    }
    Ok((load, Reaction { xi1, xi2 }, jac))
}

fn eval_mollified(
    g: &PiecewiseGraph,
    k: &MollifierKernel,
    eps: f64,
    t: f64,
    with_derivative: bool,
) -> Result<(f64, f64)> {
    if with_derivative {
        g.mollify_with_derivative(k, eps, t)
    } else {
        Ok((g.mollify(k, eps, t)?, 0.0))
    }
}

fn load_at(ops: &AssembledOperators, cfg: &SolveConfig, t: f64) -> Result<Vec<f64>> {
    let f = ops.load_vector(|x| cfg.f1.eval(t, x), |x| cfg.f2.eval(t, x));
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input(format!("source is not finite at t = {t}")));
    }
    Ok(f)
}

/// One accepted time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Stepped {
    pub time: f64,
    pub state: ProductVector,
    pub reaction: Reaction,
    pub load: Vec<f64>,
    pub iterations: usize,
    /// Newton residual vector at the accepted state.
    pub residual: Vec<f64>,
}

/// Residual norm in the lumped dual ℍ metric `sqrt(Σ rᵢ² / ℓᵢ)`.
fn lumped_dual_norm(ops: &AssembledOperators, r: &[f64]) -> f64 {
    r.iter()
        .zip(ops.lumped_omega.iter().zip(&ops.lumped_gamma))
        .map(|(v, (a, b))| v * v / (a + b))
        .sum::<f64>()
        .sqrt()
}

fn newton_step(
    ops: &AssembledOperators,
    cfg: &SolveConfig,
    eps: f64,
    u_prev: &[f64],
    t_next: f64,
    dt: f64,
) -> Result<Stepped> {
    let load = load_at(ops, cfg, t_next)?;
    let mh_prev = ops.mass_h.mul_vec(u_prev);
    let rhs: Vec<f64> = mh_prev.iter().zip(&load).map(|(m, f)| m / dt + f).collect();
    let target = cfg.newton_tol * (1.0 + lumped_dual_norm(ops, &rhs));

    let residual = |u: &[f64], with_jac: bool| -> Result<(Vec<f64>, Reaction, Vec<f64>)> {
        let (nl, reaction, jac) = reaction_terms(ops, cfg, eps, u, with_jac)?;
        let mu = ops.mass_h.mul_vec(u);
        let au = ops.operator.mul_vec(u);
        let r = (0..u.len())
            .map(|i| mu[i] / dt + au[i] + nl[i] - rhs[i])
            .collect();
        Ok((r, reaction, jac))
    };

    let mut u = u_prev.to_vec();
    let (mut r, mut reaction, mut jac) = residual(&u, true)?;
    let mut norm = lumped_dual_norm(ops, &r);
    let base = CsrMatrix::linear_combination(&[(1.0 / dt, &ops.mass_h), (1.0, &ops.operator)]);
    for it in 0..=cfg.newton_max_iter {
        if norm <= target {
            return Ok(Stepped {
                time: t_next,
                state: ProductVector::new(u),
                reaction,
                load,
                iterations: it,
                residual: r,
            });
        }
        if it == cfg.newton_max_iter {
            break;
        }
        let j = CsrMatrix::linear_combination(&[(1.0, &base), (1.0, &CsrMatrix::from_diagonal(&jac))]);
        let delta = match BandLu::factor(&j).and_then(|lu| lu.solve(&r)) {
            Ok(d) => d,
            Err(_) => break,
        };
        // Backtracking on the residual norm.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a - lambda * d).collect();
            let (tr, treact, tjac) = residual(&trial, true)?;
            let tn = lumped_dual_norm(ops, &tr);
            if tn <= (1.0 - 1e-4 * lambda) * norm || tn <= target {
                u = trial;
                r = tr;
                reaction = treact;
                jac = tjac;
                norm = tn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NewtonDiverged {
        time: t_next,
        iterations: cfg.newton_max_iter,
        residual: norm,
    })
}

/// Advances from `(t_prev, u_prev)` to `t_next`. If Newton fails, retries
/// once with two half steps; the returned list then holds both levels.
pub fn step(
    ops: &AssembledOperators,
    cfg: &SolveConfig,
    u_prev: &ProductVector,
    t_prev: f64,
    t_next: f64,
) -> Result<Vec<Stepped>> {
    step_with_eps(ops, cfg, cfg.eps, &u_prev.coeffs, t_prev, t_next)
}

fn step_with_eps(
    ops: &AssembledOperators,
    cfg: &SolveConfig,
    eps: f64,
    u_prev: &[f64],
    t_prev: f64,
    t_next: f64,
) -> Result<Vec<Stepped>> {
    if u_prev.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("previous state is not finite".into()));
    }
    let dt = t_next - t_prev;
    match newton_step(ops, cfg, eps, u_prev, t_next, dt) {
        Ok(s) => Ok(vec![s]),
        Err(Error::NewtonDiverged { .. }) => {
            let t_mid = t_prev + 0.5 * dt;
            let first = newton_step(ops, cfg, eps, u_prev, t_mid, 0.5 * dt)?;
            let second = newton_step(ops, cfg, eps, &first.state.coeffs, t_next, 0.5 * dt)?;
            Ok(vec![first, second])
        }
        Err(e) => Err(e),
    }
}

/// Assembles and integrates `cfg` over `[0, T]`.
pub fn solve(cfg: &SolveConfig) -> Result<SolveOutput> {
    cfg.validate()?;
    let mesh = build_mesh_at_level(&cfg.domain, cfg.level)?;
    let ops = Arc::new(assemble(&mesh, &cfg.a)?);
    solve_with(ops, cfg, cfg.eps)
}

/// Integrates on already assembled operators with mollification radius `eps`.
pub fn solve_with(ops: Arc<AssembledOperators>, cfg: &SolveConfig, eps: f64) -> Result<SolveOutput> {
    cfg.validate()?;
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("mollification radius must be positive, got {eps}")));
    }
    let (nsteps, dt) = cfg.time_grid();
    let u0 = project_initial(&ops, cfg)?;
    let (_, r0, _) = reaction_terms(&ops, cfg, eps, &u0.coeffs, false)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![u0],
        reactions: vec![r0],
        loads: vec![load_at(&ops, cfg, 0.0)?],
        boundary_vertices: ops.mesh.boundary_vertices().to_vec(),
        newton_iterations: vec![0],
    };
    let mut residuals: Vec<Vec<f64>> = vec![vec![0.0; ops.dim()]];
    for k in 1..=nsteps {
        let t_prev = *traj.times.last().unwrap();
        let t_next = if k == nsteps { cfg.final_time } else { k as f64 * dt };
        let prev = traj.states.last().unwrap().coeffs.clone();
        for s in step_with_eps(&ops, cfg, eps, &prev, t_prev, t_next)? {
            traj.times.push(s.time);
            traj.states.push(s.state);
            traj.reactions.push(s.reaction);
            traj.loads.push(s.load);
            traj.newton_iterations.push(s.iterations);
            residuals.push(s.residual);
        }
    }
    let ledger = build_ledger(&ops, cfg, &traj, &residuals)?;
    Ok(SolveOutput {
        ops,
        trajectory: traj,
        ledger,
        eps,
        dt,
    })
}

fn build_ledger(
    ops: &AssembledOperators,
    cfg: &SolveConfig,
    traj: &Trajectory,
    residuals: &[Vec<f64>],
) -> Result<EnergyLedger> {
    let bv = &traj.boundary_vertices;
    let mut rows = Vec::with_capacity(traj.len().saturating_sub(1));
    for n in 1..traj.len() {
        let u = &traj.states[n].coeffs;
        let dt = traj.times[n] - traj.times[n - 1];
        let react = &traj.reactions[n];
        let pairing_omega: f64 = (0..u.len())
            .map(|i| ops.lumped_omega[i] * react.xi1[i] * u[i])
            .sum();
        let pairing_gamma: f64 = bv
            .iter()
            .zip(&react.xi2)
            .map(|(&i, x)| ops.lumped_gamma[i] * x * u[i])
            .sum();
        let error = cfg.exact.as_ref().map(|ex| {
            let t = traj.times[n];
            ops.h_error(u, |x| ex.eval(t, x))
        });
        rows.push(LedgerRow {
            time: traj.times[n],
            dt,
            h_norm_sq: ops.mass_h.bilinear(u, u),
            v_norm_sq: ops.gram.bilinear(u, u),
            f_dual: ops.riesz_dual_norm(&traj.loads[n])?,
            pairing_omega,
            pairing_gamma,
            rho: dt * dot(&residuals[n], u).abs(),
            error,
        });
    }
    let u0 = &traj.states[0].coeffs;
    let (constants, smallness) = match (&cfg.growth1, &cfg.growth2) {
        (Some(g1), Some(g2)) => (
            Some(GrowthConstants::new(
                g1,
                g2,
                cfg.final_time,
                ops.volume,
                ops.boundary_measure,
            )),
            Some(smallness_check(g1.theta, g2.theta, g1.c, g2.c, ops.coercivity)?),
        ),
        _ => (None, None),
    };
    Ok(EnergyLedger {
        coercivity: ops.coercivity,
        rows,
        initial_h_norm_sq: ops.mass_h.bilinear(u0, u0),
        constants,
        smallness,
    })
}

/// Outcome of one level of a refinement study.
#[derive(Debug, Clone)]
pub struct StudyLevel {
    pub level: usize,
    pub h: f64,
    pub dt: f64,
    pub eps: f64,
    pub output: SolveOutput,
    pub inclusion: InclusionReport,
    /// `L²(0,T;ℍ)` error against the exact solution, when known.
    pub error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub levels: Vec<StudyLevel>,
    /// `‖U_{m+1} − P U_m‖_{L²(0,T;ℍ)}` on the finer mesh.
    pub differences: Vec<f64>,
    /// `log₂` ratios of consecutive differences.
    pub difference_rates: Vec<f64>,
    pub error_rates: Vec<f64>,
    pub schedule: EpsSchedule,
    /// Set when the mollification radius is held fixed: the reactions then
    /// converge to the mollified graph, not to the envelope.
    pub note: Option<String>,
}

/// Runs `levels` solves on nested meshes with `h`, `dt` (and `eps` under the
/// geometric schedule) halved per level. Levels run concurrently.
pub fn refine_study(
    base: &SolveConfig,
    levels: usize,
    schedule: EpsSchedule,
    inclusion: &InclusionOptions,
) -> Result<StudyReport> {
    if levels < 2 {
        return Err(Error::Domain(format!(
            "a refinement study needs at least 2 levels, got {levels}"
        )));
    }
    base.validate()?;
    let mut meshes = vec![build_mesh_at_level(&base.domain, base.level)?];
    let mut prolongations = Vec::new();
    for _ in 1..levels {
        let (fine, p) = refine(meshes.last().unwrap());
        meshes.push(fine);
        prolongations.push(p);
    }

    let results: Vec<Result<StudyLevel>> = thread::scope(|scope| {
        let handles: Vec<_> = meshes
            .iter()
            .enumerate()
            .map(|(m, mesh)| {
                scope.spawn(move || -> Result<StudyLevel> {
                    let scale = 0.5f64.powi(m as i32);
                    let mut cfg = base.clone();
                    cfg.dt = base.dt * scale;
                    let eps = match schedule {
                        EpsSchedule::Geometric => base.eps * scale,
                        EpsSchedule::Constant => base.eps,
                    };
                    cfg.eps = eps;
                    let ops = Arc::new(assemble(mesh, &cfg.a)?);
                    let output = solve_with(ops, &cfg, eps)?;
                    let inc = inclusion_check(
                        &output.trajectory,
                        &cfg.gamma1,
                        &cfg.gamma2,
                        eps,
                        inclusion,
                    );
                    let error = cfg.exact.as_ref().map(|_| l2_time_error(&output));
                    Ok(StudyLevel {
                        level: base.level + m,
                        h: mesh.max_edge(),
                        dt: output.dt,
                        eps,
                        output,
                        inclusion: inc,
                        error,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("study worker panicked"))
            .collect()
    });
    let levels_out: Vec<StudyLevel> = results.into_iter().collect::<Result<_>>()?;

    let mut differences = Vec::new();
    for (m, p) in prolongations.iter().enumerate() {
        let (coarse, fine) = (&levels_out[m].output, &levels_out[m + 1].output);
        let mut sum = 0.0;
        let times = &coarse.trajectory.times;
        for n in 1..times.len() {
            let dtn = times[n] - times[n - 1];
            let up = p.apply(&coarse.trajectory.states[n].coeffs);
            let uf = fine.trajectory.state_at(times[n]);
            let d: Vec<f64> = up.iter().zip(&uf).map(|(a, b)| a - b).collect();
            sum += dtn * fine.ops.mass_h.bilinear(&d, &d);
        }
        differences.push(sum.sqrt());
    }
    let rates = |v: &[f64]| -> Vec<f64> { v.windows(2).map(|w| (w[0] / w[1]).log2()).collect() };
    let difference_rates = rates(&differences);
    let errors: Vec<f64> = levels_out.iter().filter_map(|l| l.error).collect();
    let error_rates = if errors.len() == levels_out.len() {
        rates(&errors)
    } else {
        Vec::new()
    };
    let note = (schedule == EpsSchedule::Constant).then(|| {
        "constant mollification radius: reactions converge to the mollified graph, not to the envelope"
            .to_string()
    });
    Ok(StudyReport {
        levels: levels_out,
        differences,
        difference_rates,
        error_rates,
        schedule,
        note,
    })
}

/// `(Σ dt |Uⁿ − u(tⁿ)|²_ℍ)^{1/2}` from the ledger error column.
pub fn l2_time_error(out: &SolveOutput) -> f64 {
    out.ledger
        .rows
        .iter()
        .map(|r| r.dt * r.error.unwrap_or(f64::NAN).powi(2))
        .sum::<f64>()
        .sqrt()
}
