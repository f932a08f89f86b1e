//! Independent oracles shared by the integration tests. Nothing here calls
//! into the graph module except to build the graph under test.

#![allow(dead_code)]

use rand::Rng;
use wentzell::graph::PiecewiseGraph;
use wentzell::poly::Polynomial;

/// A piecewise polynomial kept in raw form so the oracles can evaluate it
/// without going through the library.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub breakpoints: Vec<f64>,
    /// Ascending coefficients, one list per interval.
    pub pieces: Vec<Vec<f64>>,
}

pub fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect()
}

/// Real roots of a polynomial of degree at most 2.
fn low_degree_roots(c: &[f64]) -> Vec<f64> {
    let c: Vec<f64> = {
        let mut v = c.to_vec();
        while v.last() == Some(&0.0) {
            v.pop();
        }
        v
    };
    match c.len() {
        0 | 1 => vec![],
        2 => vec![-c[0] / c[1]],
        3 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc < 0.0 {
                vec![]
            } else {
                let s = disc.sqrt();
                vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
            }
        }
        _ => panic!("degree too high for the closed-form oracle"),
    }
}

impl RawGraph {
    pub fn random(rng: &mut impl Rng, max_breakpoints: usize, max_degree: usize) -> Self {
        let k = rng.gen_range(0..=max_breakpoints);
        let mut bps: Vec<f64> = Vec::new();
        while bps.len() < k {
            let b = rng.gen_range(-2.0..2.0);
            if bps.iter().all(|&x: &f64| (x - b).abs() > 1e-2) {
                bps.push(b);
            }
        }
        bps.sort_by(f64::total_cmp);
        let pieces = (0..=k)
            .map(|_| {
                let d = rng.gen_range(0..=max_degree);
                (0..=d).map(|_| rng.gen_range(-2.0..2.0)).collect()
            })
            .collect();
        Self {
            breakpoints: bps,
            pieces,
        }
    }

    pub fn to_graph(&self) -> PiecewiseGraph {
        PiecewiseGraph::from_polynomials(
            self.breakpoints.clone(),
            self.pieces.iter().map(|c| Polynomial::new(c.clone())).collect(),
        )
        .unwrap()
    }

    /// Index of the open interval containing `t`; meaningless at a breakpoint.
    pub fn piece_of(&self, t: f64) -> usize {
        self.breakpoints.iter().filter(|&&b| b < t).count()
    }

    /// Value off the breakpoints.
    pub fn value(&self, t: f64) -> f64 {
        horner(&self.pieces[self.piece_of(t)], t)
    }

    /// Essential inf and sup near `t` from samples on both sides, `t`
    /// itself excluded.
    pub fn sampled_envelope(&self, t: f64, radius: f64, samples: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 1..=samples {
            let d = radius * j as f64 / samples as f64;
            for s in [t - d, t + d] {
                let v = self.value(s);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// `(1/λ) ∫_y^{y+λv} γ` with `y = t + off`, by two-point Gauss per smooth
    /// piece (exact to degree 3). Interval ends are kept as
    /// offsets from `t` so the tiny widths are not lost to cancellation.
    pub fn quotient(&self, t: f64, off: f64, lambda: f64, v: f64) -> f64 {
        if v == 0.0 {
            return 0.0;
        }
        let (a, b) = if v > 0.0 { (off, off + lambda * v) } else { (off + lambda * v, off) };
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints.iter().map(|&x| x - t).filter(|&x| x > a && x < b));
        cuts.push(b);
        let g = 1.0 / 3f64.sqrt();
        let integral: f64 = cuts
            .windows(2)
            .map(|w| {
                let (m, r) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                let c = &self.pieces[self.piece_of(t + m)];
                r * (horner(c, t + m - r * g) + horner(c, t + m + r * g))
            })
            .sum();
        v.signum() * integral / lambda
    }

    /// Exact inf and sup of γ over `[a, b]`: endpoint values, one-sided
    /// limits at interior breakpoints and interior critical points.
    pub fn window_range(&self, a: f64, b: f64) -> (f64, f64) {
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for w in cuts.windows(2) {
            let c = &self.pieces[self.piece_of(0.5 * (w[0] + w[1]))];
            let mut pts = vec![w[0], w[1]];
            pts.extend(low_degree_roots(&derivative(c)).into_iter().filter(|&r| r > w[0] && r < w[1]));
            for p in pts {
                let v = horner(c, p);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Largest `|γ′|` over `[a, b]`, assuming no breakpoint inside.
    pub fn lipschitz_on(&self, a: f64, b: f64) -> f64 {
        let c = derivative(&self.pieces[self.piece_of(0.5 * (a + b))]);
        let mut pts = vec![a, b];
        pts.extend(low_degree_roots(&derivative(&c)).into_iter().filter(|&r| r > a && r < b));
        pts.into_iter().map(|p| horner(&c, p).abs()).fold(0.0, f64::max)
    }
}

/// `limsup_{y→t, λ↓0} (1/λ)∫_y^{y+λv} γ` over a grid of base points within
/// `delta` of `t` and step lengths down to `delta/16`.
pub fn limsup_quotient(g: &RawGraph, t: f64, v: f64, delta: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in -8..=8 {
        let off = delta * i as f64 / 8.0;
        for j in 0..5 {
            let lambda = delta / 2f64.powi(j);
            best = best.max(g.quotient(t, off, lambda, v));
        }
    }
    best
}

/// The same limsup for the separated functional `φ₁(t) + φ₂(s)`, searched
/// jointly over both base points and a shared step length.
pub fn limsup_quotient_2d(
    g1: &RawGraph,
    g2: &RawGraph,
    t: f64,
    s: f64,
    v1: f64,
    v2: f64,
    delta: f64,
) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for j in 0..5 {
        let lambda = delta / 2f64.powi(j);
        for i1 in -4..=4 {
            let q1 = g1.quotient(t, delta * i1 as f64 / 4.0, lambda, v1);
            for i2 in -4..=4 {
                let q2 = g2.quotient(s, delta * i2 as f64 / 4.0, lambda, v2);
                best = best.max(q1 + q2);
            }
        }
    }
    best
}
