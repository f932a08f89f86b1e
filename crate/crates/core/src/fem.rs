//! P1 finite elements on the product space of interior and boundary functions.
//!
//! A discrete state is a single nodal vector; its boundary component is the
//! restriction to boundary vertices. Two measures act on it: Lebesgue measure
//! on the domain and surface measure on the boundary (counting measure at the
//! endpoints in 1D).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{
    dot, largest_generalized_eigen, smallest_generalized_eigen, BandLu, CsrMatrix,
};
use crate::mesh::Mesh;
use crate::quadrature::gauss_legendre;

/// Nodal coefficients of `U = (u, u|_Γ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductVector {
    pub coeffs: Vec<f64>,
}

impl ProductVector {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Boundary component, ordered like `mesh.boundary_vertices()`.
    pub fn trace(&self, mesh: &Mesh) -> Vec<f64> {
        mesh.boundary_vertices()
            .iter()
            .map(|&v| self.coeffs[v])
            .collect()
    }
}

/// Degree-4 symmetric rule on the reference triangle: barycentric points and
/// weights summing to one.
const TRI_RULE: [([f64; 3], f64); 6] = [
    ([0.108_103_018_168_070, 0.445_948_490_915_965, 0.445_948_490_915_965], 0.223_381_589_678_011),
    ([0.445_948_490_915_965, 0.108_103_018_168_070, 0.445_948_490_915_965], 0.223_381_589_678_011),
    ([0.445_948_490_915_965, 0.445_948_490_915_965, 0.108_103_018_168_070], 0.223_381_589_678_011),
    ([0.816_847_572_980_459, 0.091_576_213_509_771, 0.091_576_213_509_771], 0.109_951_743_655_322),
    ([0.091_576_213_509_771, 0.816_847_572_980_459, 0.091_576_213_509_771], 0.109_951_743_655_322),
    ([0.091_576_213_509_771, 0.091_576_213_509_771, 0.816_847_572_980_459], 0.109_951_743_655_322),
];

/// Calls `f(point, weight, shape_values)` for every quadrature point of a cell,
/// with weights already scaled by the cell measure.
fn cell_quadrature(mesh: &Mesh, c: usize, mut f: impl FnMut([f64; 2], f64, &[f64])) {
    let cell = &mesh.cells()[c];
    let vol = mesh.cell_measure(c);
    let pts = mesh.vertices();
    match mesh.dim() {
        1 => {
            let (x, w) = gauss_legendre(5);
            let (a, b) = (pts[cell[0]][0], pts[cell[1]][0]);
            for (xi, wi) in x.iter().zip(&w) {
                let s = 0.5 * (1.0 + xi);
                f([a + (b - a) * s, 0.0], 0.5 * wi * vol, &[1.0 - s, s]);
            }
        }
        _ => {
            for (lam, w) in TRI_RULE {
                let mut p = [0.0; 2];
                for k in 0..3 {
                    p[0] += lam[k] * pts[cell[k]][0];
                    p[1] += lam[k] * pts[cell[k]][1];
                }
                f(p, w * vol, &lam);
            }
        }
    }
}

/// Same for a boundary facet with an `n`-point Gauss rule (ignored in 1D).
fn facet_quadrature(
    mesh: &Mesh,
    fidx: usize,
    rule: &(Vec<f64>, Vec<f64>),
    mut f: impl FnMut([f64; 2], f64, &[f64]),
) {
    let facet = &mesh.boundary_facets()[fidx];
    let pts = mesh.vertices();
    match mesh.dim() {
        1 => f(pts[facet[0]], 1.0, &[1.0]),
        _ => {
            let (a, b) = (pts[facet[0]], pts[facet[1]]);
            let len = mesh.facet_measure(fidx);
            for (xi, wi) in rule.0.iter().zip(&rule.1) {
                let s = 0.5 * (1.0 + xi);
                let p = [a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s];
                f(p, 0.5 * wi * len, &[1.0 - s, s]);
            }
        }
    }
}

/// Gauss rule used for boundary integrals of `a φ_i φ_j`: exact when `a` is a
/// polynomial of total degree `d`, three points otherwise.
fn robin_rule(a: &Expr) -> (Vec<f64>, Vec<f64>) {
    let n = match a.poly_degree() {
        Some(d) => (d as usize + 3).div_ceil(2),
        None => 3,
    };
    gauss_legendre(n.max(1))
}

/// Everything assembled from a mesh and the boundary coefficient `a`.
#[derive(Debug, Clone)]
pub struct AssembledOperators {
    pub mesh: Mesh,
    /// `∫_Ω φ_i φ_j`.
    pub m_omega: CsrMatrix,
    /// `∫_Γ φ_i φ_j`.
    pub m_gamma: CsrMatrix,
    /// `∫_Ω ∇φ_i · ∇φ_j`.
    pub stiffness: CsrMatrix,
    /// `∫_Γ a φ_i φ_j`.
    pub robin: CsrMatrix,
    /// `K + R`, the matrix of the operator.
    pub operator: CsrMatrix,
    /// `K + M_Ω + M_Γ`.
    pub gram: CsrMatrix,
    /// `M_Ω + M_Γ`.
    pub mass_h: CsrMatrix,
    pub lumped_omega: Vec<f64>,
    pub lumped_gamma: Vec<f64>,
    /// Smallest sampled value of `a` on the boundary.
    pub a_min: f64,
    /// Smallest generalized eigenvalue of `(K + R, G_V)`.
    pub coercivity: f64,
    /// Largest generalized eigenvalue of `(diag(ℓ_Ω + ℓ_Γ), G_V)`: the squared
    /// embedding constant from the 𝕍-norm into the lumped ℍ-norm.
    pub lumped_embedding_sq: f64,
    pub volume: f64,
    pub boundary_measure: f64,
    gram_lu: BandLu,
}

/// Assembles all matrices for `mesh` with boundary coefficient `a(x, y)`
/// (variables `x`, `y`) and estimates the coercivity constant.
///
/// Fails with a hypothesis error if `a` is not bounded below by a positive
/// constant on the boundary.
pub fn assemble(mesh: &Mesh, a: &Expr) -> Result<AssembledOperators> {
    let n = mesh.num_vertices();
    let pts = mesh.vertices();
    let mut tm = Vec::new();
    let mut tk = Vec::new();
    for (c, cell) in mesh.cells().iter().enumerate() {
        let vol = mesh.cell_measure(c);
        match mesh.dim() {
            1 => {
                let h = vol;
                for (p, &i) in cell.iter().enumerate() {
                    for (q, &j) in cell.iter().enumerate() {
                        tm.push((i, j, h / 6.0 * if p == q { 2.0 } else { 1.0 }));
                        tk.push((i, j, if p == q { 1.0 } else { -1.0 } / h));
                    }
                }
            }
            _ => {
                let x = |k: usize| pts[cell[k]];
                // Gradients of barycentric coordinates.
                let mut grad = [[0.0; 2]; 3];
                for k in 0..3 {
                    let (b, c) = (x((k + 1) % 3), x((k + 2) % 3));
                    grad[k] = [(b[1] - c[1]) / (2.0 * vol), (c[0] - b[0]) / (2.0 * vol)];
                }
                for p in 0..3 {
                    for q in 0..3 {
                        let (i, j) = (cell[p], cell[q]);
                        tm.push((i, j, vol / 12.0 * if p == q { 2.0 } else { 1.0 }));
                        tk.push((
                            i,
                            j,
                            vol * (grad[p][0] * grad[q][0] + grad[p][1] * grad[q][1]),
                        ));
                    }
                }
            }
        }
    }

    let rule = robin_rule(a);
    let mut tg = Vec::new();
    let mut tr = Vec::new();
    let mut a_min = f64::INFINITY;
    for &v in mesh.boundary_vertices() {
        a_min = a_min.min(a.eval(&pts[v]));
    }
    for (fidx, facet) in mesh.boundary_facets().iter().enumerate() {
        match mesh.dim() {
            1 => {
                let v = facet[0];
                tg.push((v, v, 1.0));
                tr.push((v, v, a.eval(&pts[v])));
            }
            _ => {
                let len = mesh.facet_measure(fidx);
                for p in 0..2 {
                    for q in 0..2 {
                        tg.push((facet[p], facet[q], len / 6.0 * if p == q { 2.0 } else { 1.0 }));
                    }
                }
                let mut local = [[0.0; 2]; 2];
                facet_quadrature(mesh, fidx, &rule, |x, w, phi| {
                    let av = a.eval(&x);
                    a_min = a_min.min(av);
                    for p in 0..2 {
                        for q in 0..2 {
                            local[p][q] += w * av * phi[p] * phi[q];
                        }
                    }
                });
                for p in 0..2 {
                    for q in 0..2 {
                        tr.push((facet[p], facet[q], local[p][q]));
                    }
                }
            }
        }
    }
    if !(a_min > 0.0) || !a_min.is_finite() {
        return Err(Error::Hypothesis {
            hypothesis: "a ≥ a₀ > 0",
            detail: format!("boundary coefficient attains {a_min}"),
        });
    }

    let m_omega = CsrMatrix::from_triplets(n, tm);
    let stiffness = CsrMatrix::from_triplets(n, tk);
    let m_gamma = CsrMatrix::from_triplets(n, tg);
    let robin = CsrMatrix::from_triplets(n, tr);
    let operator = CsrMatrix::linear_combination(&[(1.0, &stiffness), (1.0, &robin)]);
    let mass_h = CsrMatrix::linear_combination(&[(1.0, &m_omega), (1.0, &m_gamma)]);
    let gram = CsrMatrix::linear_combination(&[(1.0, &stiffness), (1.0, &mass_h)]);
    let gram_lu = BandLu::factor(&gram)?;
    let lumped_omega = m_omega.row_sums();
    let lumped_gamma = m_gamma.row_sums();

    let mut ops = AssembledOperators {
        mesh: mesh.clone(),
        volume: mesh.volume(),
        boundary_measure: mesh.boundary_measure(),
        m_omega,
        m_gamma,
        stiffness,
        robin,
        operator,
        gram,
        mass_h,
        lumped_omega,
        lumped_gamma,
        a_min,
        coercivity: f64::NAN,
        lumped_embedding_sq: f64::NAN,
        gram_lu,
    };
    ops.coercivity = estimate_coercivity(&ops)?;
    let lumped: Vec<f64> = ops
        .lumped_omega
        .iter()
        .zip(&ops.lumped_gamma)
        .map(|(a, b)| a + b)
        .collect();
    let l = CsrMatrix::from_diagonal(&lumped);
    ops.lumped_embedding_sq =
        largest_generalized_eigen(&l, &ops.gram, &ops.gram_lu, 1e-10, 100_000)?.value
            * (1.0 + 1e-8);
    Ok(ops)
}

/// Smallest generalized eigenvalue of `(K + R) x = λ G_V x`.
pub fn estimate_coercivity(ops: &AssembledOperators) -> Result<f64> {
    let pair = smallest_generalized_eigen(&ops.operator, &ops.gram, 1e-8, 50_000)?;
    if !(pair.value > 0.0) {
        return Err(Error::Hypothesis {
            hypothesis: "coercivity of A",
            detail: format!("smallest generalized eigenvalue is {}", pair.value),
        });
    }
    Ok(pair.value)
}

impl AssembledOperators {
    pub fn dim(&self) -> usize {
        self.mesh.num_vertices()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len == self.dim() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.dim(),
                got: len,
            })
        }
    }

    /// `⟨U, V⟩_ℍ = Uᵀ (M_Ω + M_Γ) V`.
    pub fn product_inner(&self, u: &ProductVector, v: &ProductVector) -> Result<f64> {
        self.check(u.len())?;
        self.check(v.len())?;
        Ok(self.mass_h.bilinear(&u.coeffs, &v.coeffs))
    }

    pub fn h_norm(&self, u: &[f64]) -> f64 {
        self.mass_h.bilinear(u, u).max(0.0).sqrt()
    }

    /// `sqrt(Uᵀ G_V U)`.
    pub fn v_norm(&self, u: &ProductVector) -> f64 {
        self.v_norm_of(&u.coeffs)
    }

    pub fn v_norm_of(&self, u: &[f64]) -> f64 {
        assert_eq!(u.len(), self.dim(), "v_norm dimension mismatch");
        self.gram.bilinear(u, u).max(0.0).sqrt()
    }

    /// Norm of `U` in the lumped ℍ inner product `Σ (ℓ_Ω + ℓ_Γ)_i U_i²`.
    pub fn lumped_h_norm(&self, u: &[f64]) -> f64 {
        u.iter()
            .zip(self.lumped_omega.iter().zip(&self.lumped_gamma))
            .map(|(x, (a, b))| (a + b) * x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Discrete 𝕍*-norm `sqrt(Fᵀ G_V⁻¹ F)`.
    pub fn riesz_dual_norm(&self, f: &[f64]) -> Result<f64> {
        self.check(f.len())?;
        let y = self.gram_lu.solve(f)?;
        Ok(dot(f, &y).max(0.0).sqrt())
    }

    /// Consistent load vector `∫_Ω f1 φ_i + ∫_Γ f2 φ_i`.
    pub fn load_vector(
        &self,
        f1: impl Fn([f64; 2]) -> f64,
        f2: impl Fn([f64; 2]) -> f64,
    ) -> Vec<f64> {
        let mesh = &self.mesh;
        let mut out = vec![0.0; self.dim()];
        for c in 0..mesh.cells().len() {
            let cell = &mesh.cells()[c];
            cell_quadrature(mesh, c, |x, w, phi| {
                let v = f1(x) * w;
                for (k, &i) in cell.iter().enumerate() {
                    out[i] += v * phi[k];
                }
            });
        }
        let rule = gauss_legendre(4);
        for (fidx, facet) in mesh.boundary_facets().iter().enumerate() {
            facet_quadrature(mesh, fidx, &rule, |x, w, phi| {
                let v = f2(x) * w;
                for (k, &i) in facet.iter().enumerate() {
                    out[i] += v * phi[k];
                }
            });
        }
        out
    }

    /// Nodal interpolant; fails on non-finite values.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Result<ProductVector> {
        let mut out = Vec::with_capacity(self.dim());
        for (i, &x) in self.mesh.vertices().iter().enumerate() {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::Input(format!(
                    "value {v} at vertex {i} ({}, {})",
                    x[0], x[1]
                )));
            }
            out.push(v);
        }
        Ok(ProductVector::new(out))
    }

    /// ℍ-orthogonal projection of `(f, f|_Γ)` onto the discrete space.
    pub fn project(&self, f: impl Fn([f64; 2]) -> f64) -> Result<ProductVector> {
        let rhs = self.load_vector(&f, &f);
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("projected function is not finite".into()));
        }
        Ok(ProductVector::new(BandLu::factor(&self.mass_h)?.solve(&rhs)?))
    }

    /// `‖(u_h - u, u_h - u)‖_ℍ` computed with element quadrature.
    pub fn h_error(&self, u: &[f64], exact: impl Fn([f64; 2]) -> f64) -> f64 {
        let mesh = &self.mesh;
        let mut sum = 0.0;
        for c in 0..mesh.cells().len() {
            let cell = &mesh.cells()[c];
            cell_quadrature(mesh, c, |x, w, phi| {
                let uh: f64 = cell.iter().zip(phi).map(|(&i, p)| u[i] * p).sum();
                sum += w * (uh - exact(x)).powi(2);
            });
        }
        let rule = gauss_legendre(5);
        for (fidx, facet) in mesh.boundary_facets().iter().enumerate() {
            facet_quadrature(mesh, fidx, &rule, |x, w, phi| {
                let uh: f64 = facet.iter().zip(phi).map(|(&i, p)| u[i] * p).sum();
                sum += w * (uh - exact(x)).powi(2);
            });
        }
        sum.sqrt()
    }

    /// Named matrices for debugging exports.
    pub fn named_matrices(&self) -> [(&'static str, &CsrMatrix); 6] {
        [
            ("m_omega", &self.m_omega),
            ("m_gamma", &self.m_gamma),
            ("stiffness", &self.stiffness),
            ("robin", &self.robin),
            ("gram", &self.gram),
            ("operator", &self.operator),
        ]
    }
}
