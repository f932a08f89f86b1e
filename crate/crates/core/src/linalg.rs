//! Sparse matrices and the few direct/iterative solvers the FEM layer needs.
//!
//! Systems are small and banded after reordering, so a reverse Cuthill-McKee
//! permutation followed by a banded LU with partial pivoting is enough.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::error::{Error, Result};

/// Square sparse matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries. Indices must be `< n`.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside {n}x{n}");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_triplets(n, Vec::new())
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::from_triplets(d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "matrix-vector dimension mismatch");
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `Σ cₖ Aₖ` over matrices of equal size.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Self {
        let n = terms.first().map_or(0, |t| t.1.n);
        let mut trip = Vec::new();
        for (c, m) in terms {
            assert_eq!(m.n, n, "linear combination of differently sized matrices");
            trip.extend(m.triplets().map(|(i, j, v)| (i, j, c * v)));
        }
        Self::from_triplets(n, trip)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    /// Writes the matrix in Matrix Market coordinate format (1-based).
    pub fn write_matrix_market(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n, self.n, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Reverse Cuthill-McKee ordering of the symmetrized sparsity pattern.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.triplets() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for nb in &mut adj {
        nb.sort_unstable();
        nb.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        // Start each component from a vertex of minimum degree.
        let start = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| degree[v])
            .unwrap();
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| degree[u]);
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// LU factorization with partial pivoting of a band matrix, after an RCM
/// reordering of the input.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row `i` holds columns `i - kl ..= i + ku + kl` at offset `j + kl - i`.
    band: Vec<f64>,
    pivots: Vec<usize>,
    perm: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let (mut kl, mut ku) = (0, 0);
        for (i, j, _) in a.triplets() {
            let (pi, pj) = (inv[i], inv[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
        let width = 2 * kl + ku + 1;
        let mut band = vec![0.0; n * width];
        for (i, j, v) in a.triplets() {
            let (pi, pj) = (inv[i], inv[j]);
            band[pi * width + pj + kl - pi] += v;
        }

        let mut lu = Self {
            n,
            kl,
            ku,
            band,
            pivots: vec![0; n],
            perm,
        };
        lu.eliminate()?;
        Ok(lu)
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width() + j + self.kl - i
    }

    fn eliminate(&mut self) -> Result<()> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let scale = self.band.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = self.band[self.idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.band[self.idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > scale * 1e-300) || !best.is_finite() {
                return Err(Error::Singular {
                    column: self.perm[k],
                });
            }
            self.pivots[k] = p;
            if p != k {
                for c in k..=last_col {
                    let (a, b) = (self.idx(k, c), self.idx(p, c));
                    self.band.swap(a, b);
                }
            }
            let pivot = self.band[self.idx(k, k)];
            for r in k + 1..=last_row {
                let ir = self.idx(r, k);
                let l = self.band[ir] / pivot;
                self.band[ir] = l;
                if l != 0.0 {
                    for c in k + 1..=last_col {
                        let (rc, kc) = (self.idx(r, c), self.idx(k, c));
                        self.band[rc] -= l * self.band[kc];
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        if b.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: b.len(),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            if xk != 0.0 {
                for r in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                    x[r] -= self.band[self.idx(r, k)] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for c in k + 1..=(k + kl + ku).min(n - 1) {
                s -= self.band[self.idx(k, c)] * x[c];
            }
            x[k] = s / self.band[self.idx(k, k)];
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular { column: 0 });
        }
        Ok(out)
    }
}

/// Result of a generalized symmetric eigenvalue iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `‖A x - λ B x‖ / ‖A x‖` at exit.
    pub residual: f64,
}

fn b_normalize(b: &CsrMatrix, x: &mut [f64]) {
    let nrm = b.bilinear(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= nrm);
}

fn pencil_residual(a: &CsrMatrix, b: &CsrMatrix, x: &[f64]) -> (f64, f64) {
    let ax = a.mul_vec(x);
    let bx = b.mul_vec(x);
    let lambda = dot(x, &ax) / dot(x, &bx);
    let r: f64 = ax
        .iter()
        .zip(&bx)
        .map(|(p, q)| (p - lambda * q).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = dot(&ax, &ax).sqrt().max(f64::MIN_POSITIVE);
    (lambda, r / scale)
}

/// Smallest eigenvalue of `A x = λ B x` for symmetric `A ⪰ 0`, `B ≻ 0`.
///
/// Inverse iteration from the all-ones start; once the residual is below
/// `1e-4` the shift is moved to the current Rayleigh quotient, which is then
/// close enough to `λ_min` that the shifted iteration cannot jump to another
/// eigenvalue.
pub fn smallest_generalized_eigen(
    a: &CsrMatrix,
    b: &CsrMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.dim(),
        });
    }
    let mut x = vec![1.0; n];
    // A deterministic perturbation keeps the start from being orthogonal to
    // the wanted vector on symmetric meshes.
    for (i, v) in x.iter_mut().enumerate() {
        *v += 1e-3 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract();
    }
    b_normalize(b, &mut x);

    let mut lu = BandLu::factor(a)?;
    let mut shifted = false;
    let mut res = f64::INFINITY;
    for it in 1..=max_iter {
        let mut y = lu.solve(&b.mul_vec(&x))?;
        b_normalize(b, &mut y);
        x = y;
        let (lambda, r) = pencil_residual(a, b, &x);
        res = r;
        if res <= tol {
            return Ok(EigenPair {
                value: lambda,
                vector: x,
                iterations: it,
                residual: res,
            });
        }
        if !shifted && res < 1e-4 {
            let sigma = lambda * (1.0 - 1e-6);
            let shifted_a = CsrMatrix::linear_combination(&[(1.0, a), (-sigma, b)]);
            if let Ok(f) = BandLu::factor(&shifted_a) {
                lu = f;
                shifted = true;
            }
        }
    }
    Err(Error::EigenNotConverged {
        iterations: max_iter,
        residual: res,
    })
}

/// Largest eigenvalue of `A x = λ B x` by power iteration on `B⁻¹A`, with
/// `B` already factored.
pub fn largest_generalized_eigen(
    a: &CsrMatrix,
    b: &CsrMatrix,
    b_lu: &BandLu,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    let n = a.dim();
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 1e-3 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
        .collect();
    b_normalize(b, &mut x);
    let mut res = f64::INFINITY;
    for it in 1..=max_iter {
        let mut y = b_lu.solve(&a.mul_vec(&x))?;
        b_normalize(b, &mut y);
        x = y;
        let (lambda, r) = pencil_residual(a, b, &x);
        res = r;
        if res <= tol {
            return Ok(EigenPair {
                value: lambda,
                vector: x,
                iterations: it,
                residual: res,
            });
        }
    }
    Err(Error::EigenNotConverged {
        iterations: max_iter,
        residual: res,
    })
}
