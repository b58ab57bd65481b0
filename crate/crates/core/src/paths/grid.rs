use nalgebra::{DMatrix, DVector};

use crate::error::{contract, shape, Error, Result};
use crate::liealg::LieAlgebra;
use crate::ode::derivative;

use super::evolution::solve_evolution;
use super::path::APath;

/// Dense `ad(e_i)` matrices for fast brackets of `f64` vectors.
#[derive(Debug, Clone)]
pub(crate) struct Structure {
    ad: Vec<DMatrix<f64>>,
}

impl Structure {
    pub(crate) fn new(alg: &LieAlgebra<f64>) -> Self {
        Self { ad: (0..alg.dim()).map(|i| alg.ad_basis(i).into_matrix().to_dmatrix()).collect() }
    }

    pub(crate) fn dim(&self) -> usize {
        self.ad.len()
    }

    pub(crate) fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        x.iter().zip(&self.ad).fold(DMatrix::zeros(n, n), |acc, (c, m)| acc + m * *c)
    }

    pub(crate) fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.ad(x) * y
    }
}

/// Vectors sampled on the uniform grid `(t_i, ε_j) = (i/N, j/M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    m: usize,
    dim: usize,
    data: Vec<DVector<f64>>,
}

impl Grid {
    pub fn zeros(dim: usize, n: usize, m: usize) -> Self {
        Self { n, m, dim, data: vec![DVector::zeros(dim); (n + 1) * (m + 1)] }
    }

    pub fn from_fn(dim: usize, n: usize, m: usize, f: impl Fn(f64, f64) -> DVector<f64>) -> Self {
        let mut g = Self::zeros(dim, n, m);
        for j in 0..=m {
            for i in 0..=n {
                g.data[j * (n + 1) + i] = f(i as f64 / n as f64, j as f64 / m as f64);
            }
        }
        g
    }

    /// `rows[j][i]` is the value at `(t_i, ε_j)`.
    pub fn from_rows(rows: Vec<Vec<DVector<f64>>>) -> Result<Self> {
        let m = rows.len().checked_sub(1).ok_or_else(|| shape("grid needs at least one ε row"))?;
        let n = rows[0].len().checked_sub(1).ok_or_else(|| shape("grid needs at least one t sample"))?;
        let dim = rows[0][0].len();
        if rows.iter().any(|r| r.len() != n + 1 || r.iter().any(|v| v.len() != dim)) {
            return Err(shape("grid rows must share length and vector dimension"));
        }
        Ok(Self { n, m, dim, data: rows.into_iter().flatten().collect() })
    }

    /// Number of `t` intervals.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of `ε` intervals.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &DVector<f64> {
        &self.data[j * (self.n + 1) + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: DVector<f64>) {
        self.data[j * (self.n + 1) + i] = v;
    }

    /// Samples along `t` at `ε_j`.
    pub fn t_slice(&self, j: usize) -> Vec<DVector<f64>> {
        self.data[j * (self.n + 1)..(j + 1) * (self.n + 1)].to_vec()
    }

    /// Samples along `ε` at `t_i`.
    pub fn e_slice(&self, i: usize) -> Vec<DVector<f64>> {
        (0..=self.m).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<DVector<f64>>> {
        (0..=self.m).map(|j| self.t_slice(j)).collect()
    }

    pub fn map(&self, f: impl Fn(&DVector<f64>) -> DVector<f64>) -> Self {
        let data: Vec<_> = self.data.iter().map(f).collect();
        let dim = data.first().map_or(self.dim, |v| v.len());
        Self { n: self.n, m: self.m, dim, data }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.amax()).fold(0.0, f64::max)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        (self.n, self.m, self.dim) == (other.n, other.m, other.dim)
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        if !self.same_shape(other) {
            return Err(shape("grids have different shapes"));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max))
    }

    /// `∂/∂t` at every node, sixth order when the grid allows.
    pub fn d_dt(&self) -> Self {
        let mut out = Self::zeros(self.dim, self.n, self.m);
        for j in 0..=self.m {
            for (i, v) in derivative(&self.t_slice(j), 1.0 / self.n as f64, stencil(self.n)).into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }

    /// `∂/∂ε` at every node, sixth order when the grid allows.
    pub fn d_de(&self) -> Self {
        let mut out = Self::zeros(self.dim, self.n, self.m);
        for i in 0..=self.n {
            for (j, v) in derivative(&self.e_slice(i), 1.0 / self.m as f64, stencil(self.m)).into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }
}

fn stencil(intervals: usize) -> usize {
    if intervals >= 6 { 7 } else { 5 }
}

/// Default grid tolerance `10⁻⁴ h²` with `h` the coarser spacing.
pub fn tol_grid(n: usize, m: usize) -> f64 {
    let h = 1.0 / n.min(m) as f64;
    1e-4 * h * h
}

/// A sampled morphism `a dt + b dε : TI² → A`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyGrid {
    algebra: LieAlgebra<f64>,
    a: Grid,
    b: Grid,
}

impl HomotopyGrid {
    /// Checks shapes and that the morphism residual is within [`tol_grid`].
    pub fn new(algebra: LieAlgebra<f64>, a: Grid, b: Grid) -> Result<Self> {
        let tol = tol_grid(a.n, a.m);
        Self::with_tolerance(algebra, a, b, tol)
    }

    pub fn with_tolerance(algebra: LieAlgebra<f64>, a: Grid, b: Grid, tol: f64) -> Result<Self> {
        let g = Self::unchecked(algebra, a, b)?;
        let r = g.morphism_residual();
        if r > tol {
            return Err(Error::Numerical(format!("morphism residual {r:e} exceeds {tol:e}")));
        }
        Ok(g)
    }

    /// Shape checks only.
    pub fn unchecked(algebra: LieAlgebra<f64>, a: Grid, b: Grid) -> Result<Self> {
        if !a.same_shape(&b) || a.dim != algebra.dim() {
            return Err(shape("a and b must be grids of the same shape in the algebra"));
        }
        if a.n < 4 || a.m < 4 {
            return Err(shape("grids need at least 4 intervals in each direction"));
        }
        Ok(Self { algebra, a, b })
    }

    /// Builds `b` from `a` by solving the evolution equation with `b(0, ε) = 0`.
    pub fn from_a(algebra: LieAlgebra<f64>, a: Grid, steps: usize) -> Result<Self> {
        let b = solve_evolution(&algebra, &a, &vec![DVector::zeros(algebra.dim()); a.m + 1], steps)?;
        Self::unchecked(algebra, a, b)
    }

    pub fn algebra(&self) -> &LieAlgebra<f64> {
        &self.algebra
    }

    pub fn a(&self) -> &Grid {
        &self.a
    }

    pub fn b(&self) -> &Grid {
        &self.b
    }

    /// The `t`-path `a(·, ε_j)`.
    pub fn path(&self, j: usize) -> APath {
        APath::new(self.algebra.clone(), self.a.t_slice(j)).expect("grid rows are valid paths")
    }

    /// `max ‖∂_ε a − ∂_t b − [a, b]‖∞` over interior nodes, with
    /// fourth-order differences.
    pub fn morphism_residual(&self) -> f64 {
        let st = Structure::new(&self.algebra);
        let (da, db) = (self.a.d_de(), self.b.d_dt());
        let mut worst = 0.0_f64;
        for j in 1..self.a.m {
            for i in 1..self.a.n {
                let r = da.get(i, j) - db.get(i, j) - st.bracket(self.a.get(i, j), self.b.get(i, j));
                worst = worst.max(r.amax());
            }
        }
        worst
    }
}

/// A homotopy grid with `a = 0` on `ε ∈ {0, 1}` and `b = 0` on `t ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ASphere {
    grid: HomotopyGrid,
}

impl ASphere {
    pub fn new(grid: HomotopyGrid) -> Result<Self> {
        let (a, b) = (&grid.a, &grid.b);
        for i in 0..=a.n {
            if a.get(i, 0).amax() != 0.0 || a.get(i, a.m).amax() != 0.0 {
                return Err(contract(format!("a does not vanish on the ε = 0, 1 edges at t-node {i}")));
            }
        }
        for j in 0..=b.m {
            if b.get(0, j).amax() != 0.0 || b.get(b.n, j).amax() != 0.0 {
                return Err(contract(format!("b does not vanish on the t = 0, 1 edges at ε-node {j}")));
            }
        }
        Ok(Self { grid })
    }

    pub fn grid(&self) -> &HomotopyGrid {
        &self.grid
    }
}
