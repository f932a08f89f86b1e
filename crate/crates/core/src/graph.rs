//! Locally bounded nonmonotone graphs and the set-valued calculus built on them.
//!
//! A [`PiecewiseGraph`] is a real function that is continuous on each open
//! interval between consecutive breakpoints and has finite one-sided limits
//! everywhere. From it we derive:
//!
//! * the filled-in envelope `[min(γ(t-0), γ(t+0)), max(γ(t-0), γ(t+0))]`,
//!   which is the Clarke gradient of the primitive `φ(t) = ∫₀ᵗ γ`;
//! * the Clarke directional derivative of `φ` and of separated sums
//!   `φ₁(t) + φ₂(s)`;
//! * mollifications `γ_ε = p_ε * γ` used by the regularized scheme;
//! * sampled checks of the growth and sign hypotheses.
//!
//! All values are immutable once constructed.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Func};
use crate::poly::Polynomial;
use crate::quadrature;

/// Which one-sided limit `eval` returns at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BreakpointConvention {
    Left,
    #[default]
    Right,
}

#[derive(Debug, Clone, PartialEq)]
enum Segment {
    Poly(Polynomial),
    Expr(Expr),
}

impl Segment {
    fn from_expr(e: Expr) -> Self {
        match e.to_polynomial() {
            Some(p) => Segment::Poly(p),
            None => Segment::Expr(e),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        match self {
            Segment::Poly(p) => p.eval(t),
            Segment::Expr(e) => e.eval(&[t]),
        }
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Segment::Poly(p) => {
                let q = p.antiderivative();
                q.eval(b) - q.eval(a)
            }
            Segment::Expr(e) => quadrature::integrate(|s| e.eval(&[s]), a, b, 1e-13),
        }
    }

    /// (min, max) over the closed interval `[a, b]`.
    fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut visit = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        match self {
            Segment::Poly(p) => {
                visit(p.eval(a));
                visit(p.eval(b));
                for c in p.derivative().real_roots() {
                    if c > a && c < b {
                        visit(p.eval(c));
                    }
                }
            }
            Segment::Expr(e) => {
                const N: usize = 512;
                for k in 0..=N {
                    let s = a + (b - a) * k as f64 / N as f64;
                    visit(e.eval(&[s]));
                }
            }
        }
        (lo, hi)
    }
}

/// The closed interval `[lo, hi]` filling a graph at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub lo: f64,
    pub hi: f64,
}

impl Envelope {
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Distance from `v` to the interval; zero inside.
    pub fn distance(&self, v: f64) -> f64 {
        (self.lo - v).max(v - self.hi).max(0.0)
    }

    /// Enlarged by `delta` on both sides.
    pub fn widen(&self, delta: f64) -> Self {
        Self {
            lo: self.lo - delta,
            hi: self.hi + delta,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseGraph {
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
    convention: BreakpointConvention,
}

impl PiecewiseGraph {
    /// Builds a graph from strictly increasing `breakpoints` and one expression
    /// in `t` per interval (`breakpoints.len() + 1` of them, tails included).
    ///
    /// `sign(q)` and `abs(q)` with polynomial `q` are resolved by splitting the
    /// interval at the real roots of `q`, so every stored segment is continuous.
    /// `sign` of a non-polynomial argument is rejected.
    pub fn new(breakpoints: Vec<f64>, exprs: Vec<Expr>) -> Result<Self> {
        if exprs.len() != breakpoints.len() + 1 {
            return Err(Error::Domain(format!(
                "{} breakpoints need {} segment expressions, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                exprs.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Domain("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "breakpoints must be strictly increasing".into(),
            ));
        }

        let mut out_bps = Vec::new();
        let mut out_segs = Vec::new();
        for (i, e) in exprs.into_iter().enumerate() {
            let lo = if i == 0 { f64::NEG_INFINITY } else { breakpoints[i - 1] };
            let hi = breakpoints.get(i).copied().unwrap_or(f64::INFINITY);

            let mut cuts = Vec::new();
            for (f, arg) in e.kink_arguments() {
                match arg.to_polynomial() {
                    Some(p) => cuts.extend(p.real_roots().into_iter().map(|r| r + 0.0).filter(|&r| {
                        r > lo && r < hi && (r - lo).abs() > 1e-14 && (hi - r).abs() > 1e-14
                    })),
                    None if f == Func::Sign => {
                        return Err(Error::Domain(
                            "sign() argument must be a polynomial in t; split the graph at its zeros explicitly"
                                .into(),
                        ))
                    }
                    None => {}
                }
            }
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);

            let mut edges = vec![lo];
            edges.extend(&cuts);
            edges.push(hi);
            for (k, w) in edges.windows(2).enumerate() {
                let probe = interior_point(w[0], w[1]);
                out_segs.push(Segment::from_expr(e.freeze_kinks(&[probe])));
                if k + 1 < edges.len() - 1 {
                    out_bps.push(w[1]);
                }
            }
            if i < breakpoints.len() {
                out_bps.push(hi);
            }
        }

        let g = Self {
            breakpoints: out_bps,
            segments: out_segs,
            convention: BreakpointConvention::Right,
        };
        for (k, &b) in g.breakpoints.iter().enumerate() {
            let (l, r) = (g.segments[k].eval(b), g.segments[k + 1].eval(b));
            if !l.is_finite() || !r.is_finite() {
                return Err(Error::Domain(format!(
                    "one-sided limits at breakpoint {b} are not finite"
                )));
            }
        }
        Ok(g)
    }

    /// Builds a graph from polynomial segments.
    pub fn from_polynomials(breakpoints: Vec<f64>, polys: Vec<Polynomial>) -> Result<Self> {
        if polys.len() != breakpoints.len() + 1 {
            return Err(Error::Domain(
                "need one polynomial per interval between breakpoints".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1])
            || breakpoints.iter().any(|b| !b.is_finite())
        {
            return Err(Error::Domain(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            segments: polys.into_iter().map(Segment::Poly).collect(),
            convention: BreakpointConvention::Right,
        })
    }

    /// Parses the declarative form: `(upper_breakpoint, expression)` entries in
    /// increasing order, then the expression for the last unbounded tail.
    pub fn from_pieces(pieces: &[(f64, &str)], tail: &str) -> Result<Self> {
        let mut bps = Vec::with_capacity(pieces.len());
        let mut exprs = Vec::with_capacity(pieces.len() + 1);
        for (b, src) in pieces {
            bps.push(*b);
            exprs.push(Expr::parse(src, &["t"])?);
        }
        exprs.push(Expr::parse(tail, &["t"])?);
        Self::new(bps, exprs)
    }

    pub fn with_convention(mut self, convention: BreakpointConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::from_polynomials(vec![], vec![Polynomial::constant(c)]).unwrap()
    }

    pub fn identity() -> Self {
        Self::linear(1.0)
    }

    /// `t ↦ k t`.
    pub fn linear(k: f64) -> Self {
        Self::from_polynomials(vec![], vec![Polynomial::new(vec![0.0, k])]).unwrap()
    }

    /// 0 for `t < 0`, 1 for `t ≥ 0`.
    pub fn heaviside() -> Self {
        Self::from_polynomials(
            vec![0.0],
            vec![Polynomial::constant(0.0), Polynomial::constant(1.0)],
        )
        .unwrap()
    }

    /// -1, 0 (at zero), 1; the primitive is `|t|`.
    pub fn sign() -> Self {
        Self::from_polynomials(
            vec![0.0],
            vec![Polynomial::constant(-1.0), Polynomial::constant(1.0)],
        )
        .unwrap()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn convention(&self) -> BreakpointConvention {
        self.convention
    }

    /// True when every segment is a polynomial.
    pub fn is_piecewise_polynomial(&self) -> bool {
        self.segments.iter().all(|s| matches!(s, Segment::Poly(_)))
    }

    /// `Ok(i)` if `t` is breakpoint `i`, `Err(k)` if `t` lies in segment `k`.
    fn locate(&self, t: f64) -> std::result::Result<usize, usize> {
        // partial_cmp so that -0.0 and 0.0 coincide
        self.breakpoints
            .binary_search_by(|b| b.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
    }

    fn segment_at(&self, t: f64) -> &Segment {
        let k = self.breakpoints.partition_point(|&b| b < t);
        &self.segments[k]
    }

    /// Pointwise value; at a breakpoint the limit chosen by the convention.
    pub fn eval(&self, t: f64) -> f64 {
        match self.locate(t) {
            Ok(i) => match self.convention {
                BreakpointConvention::Left => self.segments[i].eval(t),
                BreakpointConvention::Right => self.segments[i + 1].eval(t),
            },
            Err(k) => self.segments[k].eval(t),
        }
    }

    /// `(γ(t-0), γ(t+0))`.
    pub fn one_sided_limits(&self, t: f64) -> (f64, f64) {
        match self.locate(t) {
            Ok(i) => (self.segments[i].eval(t), self.segments[i + 1].eval(t)),
            Err(k) => {
                let v = self.segments[k].eval(t);
                (v, v)
            }
        }
    }

    pub fn chang_envelope(&self, t: f64) -> Envelope {
        let (l, r) = self.one_sided_limits(t);
        Envelope {
            lo: l.min(r),
            hi: l.max(r),
        }
    }

    /// Primitive `φ(t) = ∫₀ᵗ γ(s) ds`.
    pub fn potential(&self, t: f64) -> f64 {
        self.integral(0.0, t)
    }

    /// `∫ₐᵇ γ(s) ds`, exact on polynomial segments.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        if a > b {
            return -self.integral(b, a);
        }
        let mut total = 0.0;
        let mut left = a;
        let start = self.breakpoints.partition_point(|&x| x <= a);
        for (k, &bp) in self.breakpoints.iter().enumerate().skip(start) {
            if bp >= b {
                break;
            }
            total += self.segments[k].integral(left, bp);
            left = bp;
        }
        total += self.segment_at(interior_point(left, b)).integral(left, b);
        total
    }

    /// Clarke directional derivative of the primitive at `t` in direction `v`.
    pub fn clarke_dd(&self, t: f64, v: f64) -> f64 {
        let env = self.chang_envelope(t);
        if v > 0.0 {
            v * env.hi
        } else if v < 0.0 {
            v * env.lo
        } else {
            0.0
        }
    }

    /// Infimum and supremum of the graph over the closed window `[t - r, t + r]`,
    /// both one-sided limits included at interior breakpoints.
    pub fn windowed_bounds(&self, t: f64, r: f64) -> Envelope {
        let (a, b) = (t - r, t + r);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (x0, x1, seg) in self.pieces_on(a, b) {
            let (l, h) = seg.range_on(x0, x1);
            lo = lo.min(l);
            hi = hi.max(h);
        }
        Envelope { lo, hi }
    }

    /// Largest jump `|γ(b+0) - γ(b-0)|` over breakpoints in `[a, b]`.
    pub fn max_jump_in(&self, a: f64, b: f64) -> f64 {
        self.breakpoints
            .iter()
            .enumerate()
            .filter(|(_, &x)| x >= a && x <= b)
            .map(|(k, &x)| (self.segments[k + 1].eval(x) - self.segments[k].eval(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest jump over all breakpoints.
    pub fn max_jump(&self) -> f64 {
        self.max_jump_in(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Consecutive sub-intervals of `[a, b]` with the segment active on each.
    fn pieces_on(&self, a: f64, b: f64) -> Vec<(f64, f64, &Segment)> {
        let mut out = Vec::new();
        let mut left = a;
        for &bp in self.breakpoints.iter().filter(|&&x| x > a && x < b) {
            out.push((left, bp, self.segment_at(interior_point(left, bp))));
            left = bp;
        }
        out.push((left, b, self.segment_at(interior_point(left, b))));
        out
    }

    /// Value and derivative of the mollification `γ_ε(ξ) = ∫ p_ε(η) γ(ξ - η) dη`.
    ///
    /// Integrates in the kernel variable over `[-1, 1]`, split at every image
    /// of a breakpoint, with absolute tolerance `1e-10` on the value. The
    /// derivative differentiates the kernel: `γ_ε'(ξ) = ε⁻¹ ∫ p'(x) γ(ξ - εx) dx`.
    pub fn mollify_with_derivative(
        &self,
        kernel: &MollifierKernel,
        eps: f64,
        xi: f64,
    ) -> Result<(f64, f64)> {
        check_eps(eps)?;
        let mut value = 0.0;
        let mut slope = 0.0;
        for (x0, x1, seg) in self.kernel_pieces(eps, xi) {
            value += quadrature::integrate(
                |x| kernel.density(x) * seg.eval(xi - eps * x),
                x0,
                x1,
                MOLLIFY_TOL * (x1 - x0) / 2.0,
            );
            slope += quadrature::integrate(
                |x| kernel.density_derivative(x) * seg.eval(xi - eps * x),
                x0,
                x1,
                1e-9 * (x1 - x0) / 2.0,
            );
        }
        Ok((value, slope / eps))
    }

    pub fn mollify(&self, kernel: &MollifierKernel, eps: f64, xi: f64) -> Result<f64> {
        check_eps(eps)?;
        Ok(self
            .kernel_pieces(eps, xi)
            .into_iter()
            .map(|(x0, x1, seg)| {
                quadrature::integrate(
                    |x| kernel.density(x) * seg.eval(xi - eps * x),
                    x0,
                    x1,
                    MOLLIFY_TOL * (x1 - x0) / 2.0,
                )
            })
            .sum())
    }

    /// Pieces of `[-1, 1]` in kernel coordinates `x = (ξ - s) / ε`.
    fn kernel_pieces(&self, eps: f64, xi: f64) -> Vec<(f64, f64, &Segment)> {
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .filter(|&&b| b > xi - eps && b < xi + eps)
            .map(|&b| ((xi - b) / eps).clamp(-1.0, 1.0))
            .collect();
        cuts.push(-1.0);
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                let xm = 0.5 * (w[0] + w[1]);
                (w[0], w[1], self.segment_at(xi - eps * xm))
            })
            .collect()
    }
}

const MOLLIFY_TOL: f64 = 1e-11;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "mollification radius must be positive, got {eps}"
        )))
    }
}

/// A point strictly inside `(a, b)`, which may have infinite ends.
fn interior_point(a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    }
}

/// Clarke directional derivative of `(t, s) ↦ φ₁(t) + φ₂(s)` at `(t, s)` in
/// direction `(v1, v2)`.
pub fn product_clarke_dd(
    g1: &PiecewiseGraph,
    g2: &PiecewiseGraph,
    t: f64,
    s: f64,
    v1: f64,
    v2: f64,
) -> f64 {
    g1.clarke_dd(t, v1) + g2.clarke_dd(s, v2)
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Nonnegative smooth kernel supported in `[-1, 1]` with unit mass.
#[derive(Clone)]
pub struct MollifierKernel {
    profile: ScalarFn,
    derivative: ScalarFn,
    scale: f64,
}

impl fmt::Debug for MollifierKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MollifierKernel")
            .field("scale", &self.scale)
            .finish_non_exhaustive()
    }
}

impl Default for MollifierKernel {
    fn default() -> Self {
        Self::bump()
    }
}

impl MollifierKernel {
    /// `exp(-1 / (1 - x²))` on `(-1, 1)`, normalized.
    pub fn bump() -> Self {
        fn raw(x: f64) -> f64 {
            let q = 1.0 - x * x;
            if q <= 0.0 {
                0.0
            } else {
                (-1.0 / q).exp()
            }
        }
        Self::from_profile(raw, |x| {
            let q = 1.0 - x * x;
            if q <= 0.0 {
                0.0
            } else {
                raw(x) * (-2.0 * x / (q * q))
            }
        })
        .expect("bump profile is a valid kernel")
    }

    /// Normalizes an arbitrary nonnegative profile (and its derivative);
    /// values outside `(-1, 1)` are ignored.
    pub fn from_profile(
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        const N: usize = 2000;
        for k in 1..N {
            let x = -1.0 + 2.0 * k as f64 / N as f64;
            let v = profile(x);
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "kernel profile must be finite and nonnegative, got {v} at {x}"
                )));
            }
        }
        let mass = quadrature::integrate(&profile, -1.0, 1.0, 1e-15);
        if mass <= 0.0 {
            return Err(Error::Domain("kernel profile has zero mass".into()));
        }
        Ok(Self {
            profile: Arc::new(profile),
            derivative: Arc::new(derivative),
            scale: 1.0 / mass,
        })
    }

    /// Normalized density `p(x)`, zero outside `(-1, 1)`.
    pub fn density(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            self.scale * (self.profile)(x)
        }
    }

    pub fn density_derivative(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            self.scale * (self.derivative)(x)
        }
    }

    /// `p_ε(y) = p(y / ε) / ε`.
    pub fn scaled(&self, eps: f64, y: f64) -> f64 {
        self.density(y / eps) / eps
    }

    /// `∫ p`, recomputed by quadrature.
    pub fn mass(&self) -> f64 {
        quadrature::integrate(|x| self.density(x), -1.0, 1.0, 1e-15)
    }
}

/// Growth constants `|γ(t)| ≤ c (1 + |t|^θ)`, plus the optional sign-condition
/// constant `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthParams {
    pub c: f64,
    pub theta: f64,
    pub d: Option<f64>,
}

impl GrowthParams {
    pub fn new(c: f64, theta: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("growth constant c must be positive, got {c}")));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Domain(format!(
                "growth exponent theta must lie in [0, 1], got {theta}"
            )));
        }
        Ok(Self { c, theta, d: None })
    }

    pub fn with_sign_constant(mut self, d: f64) -> Result<Self> {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::Domain(format!("sign constant d must be >= 0, got {d}")));
        }
        self.d = Some(d);
        Ok(self)
    }

    /// `c (1 + |t|^θ)`.
    pub fn bound(&self, t: f64) -> f64 {
        self.c * (1.0 + t.abs().powf(self.theta))
    }

    /// Bound valid for the ε-mollified graph: `c (1 + (|t| + ε)^θ)`.
    pub fn windowed_bound(&self, t: f64, eps: f64) -> f64 {
        self.c * (1.0 + (t.abs() + eps).powf(self.theta))
    }

    /// Constant `c'` with `c (1 + (|t| + ε)^θ) ≤ c' (1 + |t|^θ)` for all `t`.
    pub fn mollified_constant(&self, eps: f64) -> f64 {
        if self.theta == 0.0 {
            self.c
        } else {
            self.c * (1.0 + eps.powf(self.theta))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthReport {
    pub ok: bool,
    pub worst_ratio: f64,
    pub worst_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignReport {
    pub ok: bool,
    /// Largest `φ°(t; -t) - d (1 + |t|)` observed.
    pub worst_excess: f64,
    pub worst_t: f64,
}

fn sample_points(g: &PiecewiseGraph, range: (f64, f64), n: usize) -> Result<Vec<f64>> {
    let (a, b) = range;
    if n < 2 {
        return Err(Error::Domain("need at least two sample points".into()));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!("invalid sampling range [{a}, {b}]")));
    }
    let mut pts: Vec<f64> = (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect();
    pts.extend(g.breakpoints().iter().filter(|&&x| x >= a && x <= b));
    Ok(pts)
}

/// Samples `|γ(t)| / (c (1 + |t|^θ))` on a grid plus both one-sided limits at
/// every breakpoint in range.
pub fn check_growth(
    g: &PiecewiseGraph,
    p: &GrowthParams,
    range: (f64, f64),
    n: usize,
) -> Result<GrowthReport> {
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_t = range.0;
    for t in sample_points(g, range, n)? {
        let (l, r) = g.one_sided_limits(t);
        let ratio = l.abs().max(r.abs()) / p.bound(t);
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_t = t;
        }
    }
    Ok(GrowthReport {
        ok: worst_ratio <= 1.0,
        worst_ratio,
        worst_t,
    })
}

/// Samples `φ°(t; -t) ≤ d (1 + |t|)`.
pub fn check_sign_condition(
    g: &PiecewiseGraph,
    d: f64,
    range: (f64, f64),
    n: usize,
) -> Result<SignReport> {
    if !(d >= 0.0) {
        return Err(Error::Domain(format!("sign constant d must be >= 0, got {d}")));
    }
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_t = range.0;
    for t in sample_points(g, range, n)? {
        let excess = g.clarke_dd(t, -t) - d * (1.0 + t.abs());
        if excess > worst_excess {
            worst_excess = excess;
            worst_t = t;
        }
    }
    Ok(SignReport {
        ok: worst_excess <= 0.0,
        worst_excess,
        worst_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign_plus_t() -> PiecewiseGraph {
        PiecewiseGraph::from_pieces(&[], "sign(t) + t").unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(PiecewiseGraph::heaviside().eval(0.0), 1.0);
        assert_eq!(
            PiecewiseGraph::heaviside()
                .with_convention(BreakpointConvention::Left)
                .eval(0.0),
            0.0
        );
        assert_eq!(PiecewiseGraph::identity().eval(3.5), 3.5);
        assert_eq!(sign_plus_t().eval(-2.0), -3.0);
    }

    #[test]
    fn sign_expression_is_split_at_its_root() {
        let g = sign_plus_t();
        assert_eq!(g.breakpoints(), &[0.0]);
        assert!(g.is_piecewise_polynomial());
        assert_eq!(g.one_sided_limits(0.0), (-1.0, 1.0));
        let g = PiecewiseGraph::from_pieces(&[(0.0, "0")], "sign(t^2 - 1)").unwrap();
        assert_eq!(g.breakpoints(), &[0.0, 1.0]);
        assert_eq!(g.one_sided_limits(1.0), (-1.0, 1.0));
        assert_eq!(g.one_sided_limits(0.0), (0.0, -1.0));
        assert!(PiecewiseGraph::from_pieces(&[], "sign(sin(t))").is_err());
    }

    #[test]
    fn limits_and_envelopes() {
        assert_eq!(PiecewiseGraph::heaviside().one_sided_limits(0.0), (0.0, 1.0));
        assert_eq!(PiecewiseGraph::identity().one_sided_limits(1.0), (1.0, 1.0));
        let step_down = PiecewiseGraph::from_pieces(&[(0.0, "1")], "-1").unwrap();
        assert_eq!(step_down.chang_envelope(0.0), Envelope { lo: -1.0, hi: 1.0 });
        assert_eq!(PiecewiseGraph::identity().chang_envelope(2.0), Envelope::point(2.0));
        assert_eq!(sign_plus_t().chang_envelope(0.0), Envelope { lo: -1.0, hi: 1.0 });
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(PiecewiseGraph::from_pieces(&[(1.0, "0"), (0.0, "1")], "2").is_err());
        assert!(PiecewiseGraph::new(vec![0.0], vec![Expr::constant(1.0)]).is_err());
        assert!(PiecewiseGraph::from_pieces(&[], "t +").is_err());
    }

    #[test]
    fn potentials() {
        assert_eq!(PiecewiseGraph::sign().potential(-3.0), 3.0);
        assert_eq!(sign_plus_t().potential(0.0), 0.0);
        assert_eq!(PiecewiseGraph::heaviside().potential(2.0), 2.0);
        let oracle = quadrature::integrate_split(
            |s| PiecewiseGraph::heaviside().eval(s),
            &[0.0, 2.0],
            1e-13,
        );
        assert!((oracle - 2.0).abs() < 1e-12);
        // Non-polynomial segment goes through quadrature.
        let g = PiecewiseGraph::from_pieces(&[(0.0, "cos(t)")], "exp(t)").unwrap();
        assert!((g.potential(1.0) - (1f64.exp() - 1.0)).abs() < 1e-12);
        assert!((g.potential(-1.0) + 1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn clarke_examples() {
        let s = PiecewiseGraph::sign();
        assert_eq!(s.clarke_dd(0.0, 1.0), 1.0);
        assert_eq!(s.clarke_dd(0.0, -1.0), 1.0);
        assert_eq!(PiecewiseGraph::identity().clarke_dd(3.0, 2.0), 6.0);
        assert_eq!(sign_plus_t().clarke_dd(0.0, -1.0), 1.0);
        assert_eq!(s.clarke_dd(0.0, 0.0), 0.0);
        assert_eq!(product_clarke_dd(&s, &s, 0.0, 0.0, 1.0, 1.0), 2.0);
        assert_eq!(
            product_clarke_dd(
                &PiecewiseGraph::identity(),
                &PiecewiseGraph::zero(),
                1.0,
                5.0,
                1.0,
                1.0
            ),
            1.0
        );
        assert_eq!(
            product_clarke_dd(&PiecewiseGraph::heaviside(), &s, 0.0, 0.0, -1.0, -1.0),
            1.0
        );
    }

    #[test]
    fn mollifier_examples() {
        let k = MollifierKernel::bump();
        assert!((k.mass() - 1.0).abs() < 1e-12);
        let h = PiecewiseGraph::heaviside();
        assert!((h.mollify(&k, 0.1, 0.0).unwrap() - 0.5).abs() < 1e-10);
        assert!((h.mollify(&k, 0.1, 0.1).unwrap() - 1.0).abs() < 1e-12);
        let v = PiecewiseGraph::identity().mollify(&k, 0.1, 2.0).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        assert!(h.mollify(&k, 0.0, 0.0).is_err());
        assert!(h.mollify(&k, -1.0, 0.0).is_err());
    }

    #[test]
    fn mollified_derivative_matches_finite_difference() {
        let k = MollifierKernel::bump();
        let g = sign_plus_t();
        for &xi in &[-0.03, 0.0, 0.02, 0.5] {
            let (v, d) = g.mollify_with_derivative(&k, 0.05, xi).unwrap();
            assert!((v - g.mollify(&k, 0.05, xi).unwrap()).abs() < 1e-14);
            let hstep = 1e-5;
            let fd = (g.mollify(&k, 0.05, xi + hstep).unwrap()
                - g.mollify(&k, 0.05, xi - hstep).unwrap())
                / (2.0 * hstep);
            assert!((d - fd).abs() < 1e-4 * (1.0 + fd.abs()), "xi={xi}: {d} vs {fd}");
        }
    }

    #[test]
    fn growth_examples() {
        let r = check_growth(
            &PiecewiseGraph::sign(),
            &GrowthParams::new(1.0, 0.0).unwrap(),
            (-10.0, 10.0),
            101,
        )
        .unwrap();
        assert!(r.ok);
        assert_eq!(r.worst_ratio, 0.5);
        let r = check_growth(
            &PiecewiseGraph::identity(),
            &GrowthParams::new(1.0, 1.0).unwrap(),
            (-10.0, 10.0),
            101,
        )
        .unwrap();
        assert!(r.ok);
        let r = check_growth(
            &PiecewiseGraph::linear(2.0),
            &GrowthParams::new(1.0, 1.0).unwrap(),
            (-10.0, 10.0),
            101,
        )
        .unwrap();
        assert!(!r.ok);
        assert!((r.worst_ratio - 20.0 / 11.0).abs() < 1e-14);
        assert_eq!(r.worst_t.abs(), 10.0);
        assert!(check_growth(
            &PiecewiseGraph::sign(),
            &GrowthParams::new(1.0, 0.0).unwrap(),
            (0.0, 1.0),
            1
        )
        .is_err());
    }

    #[test]
    fn sign_condition_examples() {
        let range = (-10.0, 10.0);
        assert!(check_sign_condition(&PiecewiseGraph::sign(), 0.0, range, 201).unwrap().ok);
        assert!(
            check_sign_condition(&PiecewiseGraph::identity(), 0.0, range, 201)
                .unwrap()
                .ok
        );
        let minus_sign = PiecewiseGraph::from_pieces(&[(0.0, "1")], "-1").unwrap();
        let r = check_sign_condition(&minus_sign, 0.9, range, 201).unwrap();
        assert!(!r.ok);
        assert!(check_sign_condition(&minus_sign, -0.1, range, 201).is_err());
    }

    #[test]
    fn growth_params_validate() {
        assert!(GrowthParams::new(0.0, 0.5).is_err());
        assert!(GrowthParams::new(1.0, 1.5).is_err());
        assert!(GrowthParams::new(1.0, -0.1).is_err());
        assert!(GrowthParams::new(1.0, 0.5).unwrap().with_sign_constant(-1.0).is_err());
    }

    #[test]
    fn windowed_bounds_and_jumps() {
        let g = sign_plus_t();
        let w = g.windowed_bounds(0.0, 0.1);
        assert!((w.lo + 1.1).abs() < 1e-14 && (w.hi - 1.1).abs() < 1e-14);
        assert_eq!(g.max_jump_in(-0.1, 0.1), 2.0);
        assert_eq!(g.max_jump_in(0.5, 1.0), 0.0);
        let w = PiecewiseGraph::identity().windowed_bounds(1.0, 0.25);
        assert_eq!((w.lo, w.hi), (0.75, 1.25));
    }
}
