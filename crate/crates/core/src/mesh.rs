//! Simplicial meshes of intervals and star-shaped polygons, with nested
//! uniform refinement.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Geometry description accepted by [`build_mesh`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Interval { x0: f64, x1: f64, cells: usize },
    /// Closed vertex loop (either orientation). Must be star-shaped with
    /// respect to its vertex centroid; triangulated by a fan from that point
    /// and refined until every edge is at most `h`.
    Polygon { vertices: Vec<[f64; 2]>, h: f64 },
}

impl DomainSpec {
    pub fn unit_interval(cells: usize) -> Self {
        Self::Interval {
            x0: 0.0,
            x1: 1.0,
            cells,
        }
    }

    pub fn unit_square(h: f64) -> Self {
        Self::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            h,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<[f64; 2]>,
    /// Two vertices per cell in 1D, three (counter-clockwise) in 2D.
    cells: Vec<Vec<usize>>,
    /// One vertex per facet in 1D; in 2D an edge oriented so the domain lies
    /// to its left, i.e. the outward normal points to the right.
    boundary_facets: Vec<Vec<usize>>,
    boundary_vertices: Vec<usize>,
    is_boundary: Vec<bool>,
}

/// Maps coarse nodal vectors onto the refined mesh: each fine vertex is the
/// midpoint of two coarse vertices (equal for inherited vertices).
#[derive(Debug, Clone, PartialEq)]
pub struct Prolongation {
    parents: Vec<(usize, usize)>,
    coarse_len: usize,
}

impl Prolongation {
    pub fn apply(&self, coarse: &[f64]) -> Vec<f64> {
        assert_eq!(coarse.len(), self.coarse_len, "prolongation input size");
        self.parents
            .iter()
            .map(|&(a, b)| 0.5 * (coarse[a] + coarse[b]))
            .collect()
    }

    pub fn fine_len(&self) -> usize {
        self.parents.len()
    }
}

impl Mesh {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn boundary_facets(&self) -> &[Vec<usize>] {
        &self.boundary_facets
    }

    /// Sorted indices of boundary vertices.
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    /// Signed measure (length or area) of a cell; positive for a valid mesh.
    pub fn cell_measure(&self, c: usize) -> f64 {
        let cell = &self.cells[c];
        let p = |k: usize| self.vertices[cell[k]];
        match self.dim {
            1 => p(1)[0] - p(0)[0],
            _ => {
                let (a, b, c) = (p(0), p(1), p(2));
                0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
            }
        }
    }

    /// Facet measure; the counting measure in 1D.
    pub fn facet_measure(&self, f: usize) -> f64 {
        match self.dim {
            1 => 1.0,
            _ => {
                let e = &self.boundary_facets[f];
                let (a, b) = (self.vertices[e[0]], self.vertices[e[1]]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            }
        }
    }

    /// `λ_N(Ω)`.
    pub fn volume(&self) -> f64 {
        (0..self.cells.len()).map(|c| self.cell_measure(c)).sum()
    }

    /// `σ(Γ)`.
    pub fn boundary_measure(&self) -> f64 {
        (0..self.boundary_facets.len())
            .map(|f| self.facet_measure(f))
            .sum()
    }

    /// Longest cell edge.
    pub fn max_edge(&self) -> f64 {
        let mut h: f64 = 0.0;
        for cell in &self.cells {
            for i in 0..cell.len() {
                for j in i + 1..cell.len() {
                    let (a, b) = (self.vertices[cell[i]], self.vertices[cell[j]]);
                    h = h.max((b[0] - a[0]).hypot(b[1] - a[1]));
                }
            }
        }
        h
    }

    /// Checks the structural invariants: positive cells, conformity, and that
    /// the boundary facets are exactly the unshared facets with the right
    /// orientation.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Mesh("non-finite vertex coordinate".into()));
        }
        for (c, cell) in self.cells.iter().enumerate() {
            if cell.len() != self.dim + 1 || cell.iter().any(|&v| v >= n) {
                return Err(Error::Mesh(format!("cell {c} has invalid vertices")));
            }
            if !(self.cell_measure(c) > 0.0) {
                return Err(Error::Mesh(format!("cell {c} has non-positive measure")));
            }
        }
        // Count directed facets of every cell; interior facets appear once in
        // each direction, boundary facets once with domain-left orientation.
        let mut directed: HashMap<Vec<usize>, usize> = HashMap::new();
        for cell in &self.cells {
            for f in cell_facets(self.dim, cell) {
                *directed.entry(f).or_default() += 1;
            }
        }
        let mut expected_boundary: Vec<Vec<usize>> = Vec::new();
        for (f, &count) in &directed {
            if count > 1 {
                return Err(Error::Mesh(format!("facet {f:?} shared with equal orientation")));
            }
            if !directed.contains_key(&reversed(self.dim, f)) {
                expected_boundary.push(match self.dim {
                    1 => vec![f[0]],
                    _ => f.clone(),
                });
            }
        }
        let mut got = self.boundary_facets.clone();
        got.sort();
        expected_boundary.sort();
        if got != expected_boundary {
            return Err(Error::Mesh(
                "boundary facets do not match the unshared, outward-oriented cell facets".into(),
            ));
        }
        let mut bv: Vec<usize> = self.boundary_facets.iter().flatten().copied().collect();
        bv.sort_unstable();
        bv.dedup();
        if bv != self.boundary_vertices {
            return Err(Error::Mesh("boundary vertex set inconsistent with facets".into()));
        }
        Ok(())
    }

    fn from_parts(
        dim: usize,
        vertices: Vec<[f64; 2]>,
        cells: Vec<Vec<usize>>,
        boundary_facets: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut boundary_vertices: Vec<usize> =
            boundary_facets.iter().flatten().copied().collect();
        boundary_vertices.sort_unstable();
        boundary_vertices.dedup();
        let mut is_boundary = vec![false; vertices.len()];
        for &v in &boundary_vertices {
            is_boundary[v] = true;
        }
        let m = Self {
            dim,
            vertices,
            cells,
            boundary_facets,
            boundary_vertices,
            is_boundary,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Directed facets of a cell. A 1D facet is a vertex plus a marker for which
/// end of the cell it is, so the two orientations of a point differ.
fn cell_facets(dim: usize, cell: &[usize]) -> Vec<Vec<usize>> {
    match dim {
        1 => vec![vec![cell[0], 0], vec![cell[1], 1]],
        _ => vec![
            vec![cell[0], cell[1]],
            vec![cell[1], cell[2]],
            vec![cell[2], cell[0]],
        ],
    }
}

fn reversed(dim: usize, f: &[usize]) -> Vec<usize> {
    match dim {
        1 => vec![f[0], 1 - f[1]],
        _ => vec![f[1], f[0]],
    }
}

pub fn build_mesh(spec: &DomainSpec) -> Result<Mesh> {
    match spec {
        DomainSpec::Interval { x0, x1, cells } => {
            let (x0, x1, n) = (*x0, *x1, *cells);
            if !(x0.is_finite() && x1.is_finite() && x0 < x1) {
                return Err(Error::Mesh(format!("invalid interval ({x0}, {x1})")));
            }
            if n == 0 {
                return Err(Error::Mesh("an interval needs at least one cell".into()));
            }
            let vertices = (0..=n)
                .map(|i| [x0 + (x1 - x0) * i as f64 / n as f64, 0.0])
                .collect();
            let cells = (0..n).map(|i| vec![i, i + 1]).collect();
            Mesh::from_parts(1, vertices, cells, vec![vec![0], vec![n]])
        }
        DomainSpec::Polygon { vertices, h } => polygon_mesh(vertices, *h),
    }
}

fn polygon_mesh(loop_: &[[f64; 2]], h: f64) -> Result<Mesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Mesh(format!("target mesh size must be positive, got {h}")));
    }
    if loop_.len() < 3 {
        return Err(Error::Mesh("a polygon needs at least three vertices".into()));
    }
    if loop_.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Mesh("non-finite polygon vertex".into()));
    }
    let mut pts = loop_.to_vec();
    let area2: f64 = (0..pts.len())
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    if area2.abs() <= 1e-14 * bbox_scale(&pts).powi(2) {
        return Err(Error::Mesh("polygon has zero area".into()));
    }
    if area2 < 0.0 {
        pts.reverse();
    }
    let n = pts.len();
    let c = [
        pts.iter().map(|p| p[0]).sum::<f64>() / n as f64,
        pts.iter().map(|p| p[1]).sum::<f64>() / n as f64,
    ];
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let cross = (a[0] - c[0]) * (b[1] - c[1]) - (b[0] - c[0]) * (a[1] - c[1]);
        if !(cross > 1e-14 * bbox_scale(&pts).powi(2)) {
            return Err(Error::Mesh(
                "polygon must be simple and star-shaped with respect to its vertex centroid".into(),
            ));
        }
    }
    // Star-shapedness alone does not exclude loops winding twice.
    let total_angle: f64 = (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            let (ax, ay, bx, by) = (a[0] - c[0], a[1] - c[1], b[0] - c[0], b[1] - c[1]);
            (ax * by - ay * bx).atan2(ax * bx + ay * by)
        })
        .sum();
    if (total_angle - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
        return Err(Error::Mesh("polygon winds around its centroid more than once".into()));
    }

    let mut vertices = pts.clone();
    vertices.push(c);
    let cells = (0..n).map(|i| vec![n, i, (i + 1) % n]).collect();
    let facets = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    let mut mesh = Mesh::from_parts(2, vertices, cells, facets)?;
    while mesh.max_edge() > h * (1.0 + 1e-12) {
        mesh = refine(&mesh).0;
    }
    Ok(mesh)
}

fn bbox_scale(pts: &[[f64; 2]]) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (hi[0] - lo[0]).max(hi[1] - lo[1])
}

/// Uniform refinement: cells are bisected (1D) or split into four by edge
/// midpoints (2D). Coarse vertices keep their indices.
pub fn refine(mesh: &Mesh) -> (Mesh, Prolongation) {
    let mut vertices = mesh.vertices.clone();
    let mut parents: Vec<(usize, usize)> = (0..vertices.len()).map(|i| (i, i)).collect();
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |a: usize, b: usize| -> usize {
        let key = (a.min(b), a.max(b));
        *mids.entry(key).or_insert_with(|| {
            let (p, q) = (vertices[a], vertices[b]);
            vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            parents.push(key);
            vertices.len() - 1
        })
    };

    let (cells, facets) = match mesh.dim {
        1 => {
            let mut cells = Vec::with_capacity(2 * mesh.cells.len());
            for c in &mesh.cells {
                let m = midpoint(c[0], c[1]);
                cells.push(vec![c[0], m]);
                cells.push(vec![m, c[1]]);
            }
            (cells, mesh.boundary_facets.clone())
        }
        _ => {
            let mut cells = Vec::with_capacity(4 * mesh.cells.len());
            for c in &mesh.cells {
                let (a, b, d) = (c[0], c[1], c[2]);
                let (ab, bd, da) = (midpoint(a, b), midpoint(b, d), midpoint(d, a));
                cells.push(vec![a, ab, da]);
                cells.push(vec![ab, b, bd]);
                cells.push(vec![da, bd, d]);
                cells.push(vec![ab, bd, da]);
            }
            let mut facets = Vec::with_capacity(2 * mesh.boundary_facets.len());
            for f in &mesh.boundary_facets {
                let m = midpoint(f[0], f[1]);
                facets.push(vec![f[0], m]);
                facets.push(vec![m, f[1]]);
            }
            (cells, facets)
        }
    };
    let coarse_len = mesh.vertices.len();
    let mut boundary_vertices: Vec<usize> = facets.iter().flatten().copied().collect();
    boundary_vertices.sort_unstable();
    boundary_vertices.dedup();
    let mut is_boundary = vec![false; vertices.len()];
    for &v in &boundary_vertices {
        is_boundary[v] = true;
    }
    let fine = Mesh {
        dim: mesh.dim,
        vertices,
        cells,
        boundary_facets: facets,
        boundary_vertices,
        is_boundary,
    };
    debug_assert!(fine.validate().is_ok());
    (
        fine,
        Prolongation {
            parents,
            coarse_len,
        },
    )
}

/// Builds the mesh for `spec` and applies `level` further refinements.
pub fn build_mesh_at_level(spec: &DomainSpec, level: usize) -> Result<Mesh> {
    let mut m = build_mesh(spec)?;
    for _ in 0..level {
        m = refine(&m).0;
    }
    Ok(m)
}
