//! Problem builders shared by the benchmarks in `benches/`.

use wentzell::solver::SpaceTimeFn;
use wentzell::{DomainSpec, PiecewiseGraph, SolveConfig};

/// Interior-free switch problem: the boundary trace is driven across a
/// Heaviside jump by a constant source.
pub fn heaviside_switch(cells: usize) -> SolveConfig {
    let mut cfg = SolveConfig::new(DomainSpec::unit_interval(cells));
    cfg.gamma2 = PiecewiseGraph::heaviside();
    cfg.u0 = SpaceTimeFn::constant(-1.0);
    cfg.f2 = SpaceTimeFn::constant(3.0);
    cfg.final_time = 0.5;
    cfg.dt = 0.05;
    cfg.eps = 0.05;
    cfg
}

/// Unit square with a nonmonotone boundary law and a smooth interior one.
pub fn square_sign(h: f64) -> SolveConfig {
    let mut cfg = SolveConfig::new(DomainSpec::unit_square(h));
    cfg.gamma1 = PiecewiseGraph::from_pieces(&[], "tanh(t)").unwrap();
    cfg.gamma2 =
        PiecewiseGraph::from_pieces(&[(-0.5, "-1"), (0.5, "-0.5*sin(pi*t)")], "1").unwrap();
    cfg.u0 = SpaceTimeFn::parse("sin(pi*x)*sin(pi*y) - 0.5").unwrap();
    cfg.final_time = 0.2;
    cfg.dt = 0.05;
    cfg
}
