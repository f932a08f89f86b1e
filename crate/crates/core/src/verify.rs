//! Executable checks of the estimates behind the scheme.
//!
//! Every check recomputes its quantities from the trajectory and the
//! assembled operators instead of trusting the solver's bookkeeping, so a bug
//! in one does not hide in the other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fem::AssembledOperators;
use crate::graph::{GrowthParams, PiecewiseGraph};
use crate::linalg::dot;
use crate::solver::{EnergyLedger, GrowthConstants, Trajectory};

/// Writes non-finite floats as `null`.
fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallnessVerdict {
    /// 1: both exponents below one; 2: only `θ₂ = 1`; 3: only `θ₁ = 1`;
    /// 4: both equal to one.
    pub case: u8,
    pub ok: bool,
    /// `M/(2√2)` minus the constrained sum; infinite in case 1.
    #[serde(serialize_with = "finite_or_null")]
    pub margin: f64,
}

/// Which smallness condition the growth exponents trigger, and whether it
/// holds. The inequality is strict.
pub fn smallness_check(theta1: f64, theta2: f64, c1: f64, c2: f64, m: f64) -> Result<SmallnessVerdict> {
    for (name, th) in [("theta1", theta1), ("theta2", theta2)] {
        if !(0.0..=1.0).contains(&th) {
            return Err(Error::Domain(format!("{name} must lie in [0, 1], got {th}")));
        }
    }
    for (name, c) in [("c1", c1), ("c2", c2), ("M", m)] {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {c}")));
        }
    }
    let limit = m / (2.0 * std::f64::consts::SQRT_2);
    let (case, margin) = match (theta1 == 1.0, theta2 == 1.0) {
        (false, false) => (1, f64::INFINITY),
        (false, true) => (2, limit - c2),
        (true, false) => (3, limit - c1),
        (true, true) => (4, limit - (c1 + c2)),
    };
    Ok(SmallnessVerdict {
        case,
        ok: margin > 0.0,
        margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyStep {
    pub time: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `(lhs − rhs) / scale`, positive when violated.
    pub violation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub steps: Vec<EnergyStep>,
    pub worst_violation: f64,
    /// Worst relative violation of the summed inequality over `[0, tⁿ]`.
    pub worst_integrated_violation: f64,
    pub pass: bool,
    /// `|Uⁿ|_ℍ` never increased along the run.
    pub h_norm_nonincreasing: bool,
}

/// Checks, at every step,
/// `½|Uⁿ|² − ½|Uⁿ⁻¹|² + dt M ‖Uⁿ‖²/2 + dt⟨N(Uⁿ),Uⁿ⟩ ≤ dt ‖Fⁿ‖²_{𝕍*}/(2M) + ρⁿ`,
/// and its running sum, with `M` taken from the ledger and everything else
/// recomputed. `ρⁿ = dt|⟨rⁿ,Uⁿ⟩|` uses the step residual rebuilt from the
/// stored reactions and loads.
pub fn energy_check(
    ops: &AssembledOperators,
    traj: &Trajectory,
    ledger: &EnergyLedger,
    tol: f64,
) -> Result<EnergyReport> {
    let m = ledger.coercivity;
    let mut steps = Vec::new();
    let (mut cum_lhs, mut cum_rhs, mut cum_scale) = (0.0, 0.0, 0.0f64);
    let mut worst_integrated = f64::NEG_INFINITY;
    let mut nonincreasing = true;
    for n in 1..traj.len() {
        let u = &traj.states[n].coeffs;
        let up = &traj.states[n - 1].coeffs;
        let dt = traj.times[n] - traj.times[n - 1];
        let nl = reaction_load(ops, traj, n);
        let diff: Vec<f64> = u.iter().zip(up).map(|(a, b)| (a - b) / dt).collect();
        let md = ops.mass_h.mul_vec(&diff);
        let au = ops.operator.mul_vec(u);
        let r: Vec<f64> = (0..u.len())
            .map(|i| md[i] + au[i] + nl[i] - traj.loads[n][i])
            .collect();

        let hn = 0.5 * ops.mass_h.bilinear(u, u);
        let hp = 0.5 * ops.mass_h.bilinear(up, up);
        let coer = dt * m * ops.gram.bilinear(u, u) / 2.0;
        let pairing = dt * dot(&nl, u);
        let fd = ops.riesz_dual_norm(&traj.loads[n])?;
        let source = dt * fd * fd / (2.0 * m);
        let rho = dt * dot(&r, u).abs();

        let lhs = hn - hp + coer + pairing;
        let rhs = source + rho;
        let scale = [hn, hp, coer, pairing.abs(), source, rho]
            .into_iter()
            .fold(f64::MIN_POSITIVE, f64::max);
        let violation = (lhs - rhs) / scale;
        steps.push(EnergyStep {
            time: traj.times[n],
            lhs,
            rhs,
            violation,
            pass: violation <= tol,
        });
        if hn > hp * (1.0 + 1e-14) {
            nonincreasing = false;
        }

        if n == 1 {
            cum_lhs -= hp;
            cum_scale = cum_scale.max(hp);
        }
        cum_lhs += coer + pairing;
        cum_rhs += source + rho;
        cum_scale = cum_scale.max(hn).max(coer).max(pairing.abs()).max(source).max(rho);
        worst_integrated = worst_integrated.max((cum_lhs + hn - cum_rhs) / cum_scale);
    }
    let worst_violation = steps
        .iter()
        .map(|s| s.violation)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EnergyReport {
        pass: steps.iter().all(|s| s.pass) && worst_integrated <= tol,
        steps,
        worst_violation,
        worst_integrated_violation: worst_integrated,
        h_norm_nonincreasing: nonincreasing,
    })
}

/// `L_Ω ξ₁ + L_Γ ξ₂` from the stored reactions at step `n`.
fn reaction_load(ops: &AssembledOperators, traj: &Trajectory, n: usize) -> Vec<f64> {
    let react = &traj.reactions[n];
    let mut nl: Vec<f64> = react
        .xi1
        .iter()
        .zip(&ops.lumped_omega)
        .map(|(x, l)| x * l)
        .collect();
    for (&i, x) in traj.boundary_vertices.iter().zip(&react.xi2) {
        nl[i] += ops.lumped_gamma[i] * x;
    }
    nl
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriReport {
    /// `(‖U‖_{L²(0,T;𝕍)} + ‖U′‖_{L²(0,T;𝕍*)}) / (1 + |U⁰|_ℍ + ‖f‖_{L²(0,T;𝕍*)})`.
    pub c_observed: f64,
    pub l2_v_norm: f64,
    pub derivative_dual_norm: f64,
    pub data_norm: f64,
    pub max_h_norm: f64,
    /// Closed-form bound on `‖U‖_{L²(0,T;𝕍)}`; infinite when the growth
    /// constants are too large for the chain to close.
    #[serde(serialize_with = "finite_or_null")]
    pub bound_l2_v: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub bound_max_h: f64,
    /// `None` when no growth constants were supplied.
    pub bound_ok: Option<bool>,
}

/// Observed a priori constant and, given growth constants for both graphs,
/// the closed-form bounds from the summed energy inequality.
///
/// The chain bounds `Σ dt |⟨N(U),U⟩|` by `(a₁ + a₁′ ‖u‖^θ₁)‖u‖ + (boundary)`
/// in lumped norms, then uses `|U|_lumped ≤ κ ‖U‖_𝕍` with `κ²` the lumped
/// embedding constant. With `X = ‖U‖_{L²(0,T;𝕍)}` this gives `g(X) ≤ 0` for
/// `g(X) = (M/2)X² − (a₁+a₂)κX − a₁′κ^{1+θ₁}X^{1+θ₁} − a₂′κ^{1+θ₂}X^{1+θ₂} − B`,
/// `B = ½|U⁰|² + Σ dt ‖Fⁿ‖²/(2M) + Σ ρⁿ`. The growth constants are those of
/// the mollified graphs, `c (1 + ε^θ)` (or `c` when `θ = 0`).
pub fn apriori_check(
    ops: &AssembledOperators,
    traj: &Trajectory,
    ledger: &EnergyLedger,
    growth: Option<(&GrowthParams, &GrowthParams)>,
    eps: f64,
) -> Result<AprioriReport> {
    let m = ledger.coercivity;
    let (mut xv, mut xd, mut xf, mut b_src, mut rho) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut max_h: f64 = ops.h_norm(&traj.states[0].coeffs);
    for n in 1..traj.len() {
        let u = &traj.states[n].coeffs;
        let up = &traj.states[n - 1].coeffs;
        let dt = traj.times[n] - traj.times[n - 1];
        let diff: Vec<f64> = u.iter().zip(up).map(|(a, b)| (a - b) / dt).collect();
        let ud = ops.riesz_dual_norm(&ops.mass_h.mul_vec(&diff))?;
        let fd = ops.riesz_dual_norm(&traj.loads[n])?;
        xv += dt * ops.gram.bilinear(u, u);
        xd += dt * ud * ud;
        xf += dt * fd * fd;
        b_src += dt * fd * fd / (2.0 * m);
        max_h = max_h.max(ops.h_norm(u));
        let nl = reaction_load(ops, traj, n);
        let md = ops.mass_h.mul_vec(&diff);
        let au = ops.operator.mul_vec(u);
        let r: Vec<f64> = (0..u.len())
            .map(|i| md[i] + au[i] + nl[i] - traj.loads[n][i])
            .collect();
        rho += dt * dot(&r, u).abs();
    }
    let (l2v, dnorm) = (xv.sqrt(), xd.sqrt());
    let u0 = ops.h_norm(&traj.states[0].coeffs);
    let data = 1.0 + u0 + xf.sqrt();
    let mut report = AprioriReport {
        c_observed: (l2v + dnorm) / data,
        l2_v_norm: l2v,
        derivative_dual_norm: dnorm,
        data_norm: data,
        max_h_norm: max_h,
        bound_l2_v: f64::INFINITY,
        bound_max_h: f64::INFINITY,
        bound_ok: None,
    };
    if let Some((g1, g2)) = growth {
        let t = traj.times.last().copied().unwrap_or(0.0) - traj.times[0];
        let e1 = GrowthParams { c: g1.mollified_constant(eps), ..*g1 };
        let e2 = GrowthParams { c: g2.mollified_constant(eps), ..*g2 };
        let k = GrowthConstants::new(&e1, &e2, t, ops.volume, ops.boundary_measure);
        let kappa = ops.lumped_embedding_sq.sqrt();
        let b = 0.5 * u0 * u0 + b_src + rho;
        let forcing = |x: f64| {
            (k.a1 + k.a2) * kappa * x
                + k.a1p * kappa.powf(1.0 + g1.theta) * x.powf(1.0 + g1.theta)
                + k.a2p * kappa.powf(1.0 + g2.theta) * x.powf(1.0 + g2.theta)
        };
        let x_star = largest_root(m, b, &forcing);
        report.bound_l2_v = x_star;
        report.bound_max_h = if x_star.is_finite() {
            (2.0 * (b + forcing(x_star))).sqrt()
        } else {
            f64::INFINITY
        };
        let slack = 1.0 + 1e-9;
        report.bound_ok = Some(l2v <= x_star * slack && max_h <= report.bound_max_h * slack);
    }
    Ok(report)
}

/// `sup { X ≥ 0 : (M/2)X² ≤ B + forcing(X) }`. `forcing(X)/X²` is
/// non-increasing, so the set is an interval and bisection applies.
fn largest_root(m: f64, b: f64, forcing: &dyn Fn(f64) -> f64) -> f64 {
    let h = |x: f64| 0.5 * m - (b + forcing(x)) / (x * x);
    let mut hi = 1.0;
    while !(h(hi) > 0.0) {
        hi *= 2.0;
        if hi > 1e150 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    #[serde(serialize_with = "finite_or_null")]
    pub ratio: f64,
    pub ok: bool,
}

/// Ratio `max/min` of observed a priori constants across levels; bounded by
/// `limit` when no level blows up. All-zero runs count as ratio 1.
pub fn apriori_stability(c_observed: &[f64], limit: f64) -> StabilityReport {
    let max = c_observed.iter().copied().fold(0.0, f64::max);
    let min = c_observed.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if max == 0.0 {
        1.0
    } else if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    };
    StabilityReport {
        ratio,
        ok: ratio <= limit,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReactionGrowthReport {
    pub interior_norm: f64,
    pub interior_bound: f64,
    pub boundary_norm: f64,
    pub boundary_bound: f64,
    pub ok: bool,
}

/// `‖ξ₁‖ ≤ a₁ + a₁′‖u‖^θ₁` and its boundary analogue, in the discrete lumped
/// `L²(0,T;L²)` norms, with the mollified constants `c (1 + ε^θ)`.
pub fn reaction_growth_check(
    ops: &AssembledOperators,
    traj: &Trajectory,
    g1: &GrowthParams,
    g2: &GrowthParams,
    eps: f64,
) -> ReactionGrowthReport {
    let (mut x1, mut x2, mut u1, mut u2) = (0.0, 0.0, 0.0, 0.0);
    for n in 1..traj.len() {
        let dt = traj.times[n] - traj.times[n - 1];
        let u = &traj.states[n].coeffs;
        let r = &traj.reactions[n];
        for (i, (&x, &l)) in r.xi1.iter().zip(&ops.lumped_omega).enumerate() {
            x1 += dt * l * x * x;
            u1 += dt * l * u[i] * u[i];
        }
        for (&i, &x) in traj.boundary_vertices.iter().zip(&r.xi2) {
            let l = ops.lumped_gamma[i];
            x2 += dt * l * x * x;
            u2 += dt * l * u[i] * u[i];
        }
    }
    let t = traj.times.last().copied().unwrap_or(0.0) - traj.times[0];
    let e1 = GrowthParams { c: g1.mollified_constant(eps), ..*g1 };
    let e2 = GrowthParams { c: g2.mollified_constant(eps), ..*g2 };
    let k = GrowthConstants::new(&e1, &e2, t, ops.volume, ops.boundary_measure);
    let interior_bound = k.a1 + k.a1p * u1.sqrt().powf(g1.theta);
    let boundary_bound = k.a2 + k.a2p * u2.sqrt().powf(g2.theta);
    let slack = 1.0 + 1e-10;
    ReactionGrowthReport {
        interior_norm: x1.sqrt(),
        interior_bound,
        boundary_norm: x2.sqrt(),
        boundary_bound,
        ok: x1.sqrt() <= interior_bound * slack && x2.sqrt() <= boundary_bound * slack,
    }
}

/// Tolerances for [`inclusion_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InclusionOptions {
    /// Multiplier of `eps · local jump height`.
    pub factor: f64,
    pub absolute: f64,
    /// Extra enlargement of every envelope.
    pub widen: f64,
}

impl Default for InclusionOptions {
    fn default() -> Self {
        Self {
            factor: 10.0,
            absolute: 1e-8,
            widen: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InclusionReport {
    /// Node-time pairs checked (interior and boundary reactions separately).
    pub total: usize,
    pub fraction_inside: f64,
    /// Largest distance to the `eps`-windowed envelope.
    pub worst_distance: f64,
    pub worst_time: f64,
    pub worst_node: usize,
    /// Same statistics against the envelope at `u` itself.
    pub pointwise_fraction_inside: f64,
    pub worst_pointwise_distance: f64,
}

/// Distance of each stored reaction to the filled-in graph near the state.
///
/// A reaction `ξ = γ_ε(u)` is an average of `γ` over `[u − ε, u + ε]`, so it
/// is compared with the envelope `[inf, sup]` of `γ` over that window, which
/// shrinks to the Chang envelope at `u` as `ε → 0`. A pair passes when the
/// distance is at most `factor · ε · (largest jump in the window) + absolute`.
/// The distance to the envelope at `u` alone is reported alongside.
pub fn inclusion_check(
    traj: &Trajectory,
    g1: &PiecewiseGraph,
    g2: &PiecewiseGraph,
    eps: f64,
    opts: &InclusionOptions,
) -> InclusionReport {
    let mut total = 0usize;
    let (mut inside, mut inside_pt) = (0usize, 0usize);
    let (mut worst, mut worst_pt) = (0.0f64, 0.0f64);
    let (mut worst_time, mut worst_node) = (traj.times.first().copied().unwrap_or(0.0), 0);
    let mut visit = |g: &PiecewiseGraph, u: f64, xi: f64, t: f64, node: usize| {
        let window = g.windowed_bounds(u, eps).widen(opts.widen);
        let pointwise = g.chang_envelope(u).widen(opts.widen);
        let tol = opts.factor * eps * g.max_jump_in(u - eps, u + eps) + opts.absolute;
        let d = window.distance(xi);
        let dp = pointwise.distance(xi);
        total += 1;
        if d <= tol {
            inside += 1;
        }
        if dp <= tol {
            inside_pt += 1;
        }
        if d > worst {
            worst = d;
            worst_time = t;
            worst_node = node;
        }
        worst_pt = worst_pt.max(dp);
    };
    for (n, (state, react)) in traj.states.iter().zip(&traj.reactions).enumerate() {
        let t = traj.times[n];
        for (i, (&u, &xi)) in state.coeffs.iter().zip(&react.xi1).enumerate() {
            visit(g1, u, xi, t, i);
        }
        for (&i, &xi) in traj.boundary_vertices.iter().zip(&react.xi2) {
            visit(g2, state.coeffs[i], xi, t, i);
        }
    }
    let frac = |k: usize| if total == 0 { 1.0 } else { k as f64 / total as f64 };
    InclusionReport {
        total,
        fraction_inside: frac(inside),
        worst_distance: worst,
        worst_time,
        worst_node,
        pointwise_fraction_inside: frac(inside_pt),
        worst_pointwise_distance: worst_pt,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HviOptions {
    pub tests_per_step: usize,
    pub seed: u64,
    /// Tolerance multiplier on `eps + h + dt`.
    pub factor: f64,
}

impl Default for HviOptions {
    fn default() -> Self {
        Self {
            tests_per_step: 50,
            seed: 0,
            factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HviReport {
    /// Smallest raw residual over all steps and test functions.
    pub min_residual: f64,
    /// Smallest residual divided by its scale `Σ ℓᵢ|wᵢ| · max(1, jump)`.
    pub min_scaled_residual: f64,
    /// `factor · (eps + h + dt)`; pass iff `min_scaled_residual ≥ −tolerance`.
    pub tolerance: f64,
    pub worst_time: f64,
    /// Largest `|residual|` at `V = Uⁿ`; zero by definition.
    pub zero_direction_max: f64,
    pub evaluations: usize,
    pub pass: bool,
}

/// Evaluates the discrete hemivariational inequality
/// `⟨M(Uⁿ−Uⁿ⁻¹)/dt + (K+R)Uⁿ − Fⁿ, w⟩ + Σ ℓ_Ω,i φ₁°(uᵢ; wᵢ) + Σ_Γ ℓ_Γ,i φ₂°(uᵢ; wᵢ)`
/// with `w = V − Uⁿ` over a seeded battery of test functions: nodal bumps,
/// interpolated low-frequency sinusoids and random fields around `Uⁿ`.
pub fn hvi_residual(
    ops: &AssembledOperators,
    traj: &Trajectory,
    g1: &PiecewiseGraph,
    g2: &PiecewiseGraph,
    eps: f64,
    opts: &HviOptions,
) -> HviReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n_nodes = ops.dim();
    let h = ops.mesh.max_edge();
    let jump = g1.max_jump().max(g2.max_jump()).max(1.0);
    let pts = ops.mesh.vertices();
    let mut min_raw = f64::INFINITY;
    let mut min_scaled = f64::INFINITY;
    let mut worst_time = 0.0;
    let mut zero_max: f64 = 0.0;
    let mut evaluations = 0;
    let mut max_dt: f64 = 0.0;

    for n in 1..traj.len() {
        let u = &traj.states[n].coeffs;
        let up = &traj.states[n - 1].coeffs;
        let dt = traj.times[n] - traj.times[n - 1];
        max_dt = max_dt.max(dt);
        let diff: Vec<f64> = u.iter().zip(up).map(|(a, b)| (a - b) / dt).collect();
        let md = ops.mass_h.mul_vec(&diff);
        let au = ops.operator.mul_vec(u);
        let base: Vec<f64> = (0..n_nodes)
            .map(|i| md[i] + au[i] - traj.loads[n][i])
            .collect();
        let amp = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));

        let eval = |w: &[f64]| -> f64 {
            let mut s = dot(&base, w);
            for i in 0..n_nodes {
                s += ops.lumped_omega[i] * g1.clarke_dd(u[i], w[i]);
            }
            for &i in &traj.boundary_vertices {
                s += ops.lumped_gamma[i] * g2.clarke_dd(u[i], w[i]);
            }
            s
        };

        zero_max = zero_max.max(eval(&vec![0.0; n_nodes]).abs());

        for j in 0..opts.tests_per_step {
            let scale = amp * rng.gen_range(0.05..1.0);
            let w: Vec<f64> = match j % 3 {
                0 => {
                    let mut w = vec![0.0; n_nodes];
                    let node = if rng.gen_bool(0.5) && !traj.boundary_vertices.is_empty() {
                        traj.boundary_vertices[rng.gen_range(0..traj.boundary_vertices.len())]
                    } else {
                        rng.gen_range(0..n_nodes)
                    };
                    w[node] = if rng.gen_bool(0.5) { scale } else { -scale };
                    w
                }
                1 => {
                    let (kx, ky) = (rng.gen_range(0..4) as f64, rng.gen_range(0..4) as f64);
                    let (px, py) = (
                        rng.gen_range(0.0..std::f64::consts::TAU),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    );
                    pts.iter()
                        .map(|x| {
                            scale
                                * (kx * std::f64::consts::PI * x[0] + px).cos()
                                * (ky * std::f64::consts::PI * x[1] + py).cos()
                        })
                        .collect()
                }
                _ => (0..n_nodes).map(|_| scale * rng.gen_range(-1.0..1.0)).collect(),
            };
            let weight: f64 = (0..n_nodes)
                .map(|i| (ops.lumped_omega[i] + ops.lumped_gamma[i]) * w[i].abs())
                .sum::<f64>()
                * jump;
            let res = eval(&w);
            evaluations += 1;
            if res < min_raw {
                min_raw = res;
            }
            if weight > 0.0 && res / weight < min_scaled {
                min_scaled = res / weight;
                worst_time = traj.times[n];
            }
        }
    }
    let tolerance = opts.factor * (eps + h + max_dt);
    if evaluations == 0 {
        min_raw = 0.0;
        min_scaled = 0.0;
    }
    HviReport {
        min_residual: min_raw,
        min_scaled_residual: min_scaled,
        tolerance,
        worst_time,
        zero_direction_max: zero_max,
        evaluations,
        pass: min_scaled >= -tolerance && zero_max == 0.0,
    }
}
