use nalgebra::{DMatrix, DVector};

use crate::error::{shape, Result};
use crate::extension::Couple;
use crate::liealg::{automorphism_defect, LieAlgebra};
use crate::linalg::Matrix;
use crate::ode::{rk4, rk4_nodes, substeps_for};
use crate::paths::APath;

/// `Φ_{t1,t0}`, an automorphism of the kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    pub matrix: DMatrix<f64>,
    pub t0: f64,
    pub t1: f64,
}

impl Transport {
    /// `‖Φ[x,y] − [Φx,Φy]‖∞` over basis pairs of the kernel.
    pub fn defect(&self, kernel: &LieAlgebra<f64>) -> f64 {
        automorphism_defect(kernel, &self.matrix)
    }
}

/// `D` and `ω` of a couple as dense `f64` data.
#[derive(Debug, Clone)]
pub(crate) struct Connection {
    pub(crate) n_k: usize,
    pub(crate) n_b: usize,
    d: Vec<DMatrix<f64>>,
    omega: Vec<(usize, usize, DVector<f64>)>,
}

impl Connection {
    pub(crate) fn new(cpl: &Couple<f64>) -> Self {
        let (n_k, n_b) = (cpl.kernel().dim(), cpl.base().dim());
        let d = cpl.d().iter().map(Matrix::to_dmatrix).collect();
        let mut omega = Vec::new();
        for i in 0..n_b {
            for j in i + 1..n_b {
                let w = DVector::from_vec(cpl.omega(i, j));
                if w.amax() != 0.0 {
                    omega.push((i, j, w));
                }
            }
        }
        Self { n_k, n_b, d, omega }
    }

    pub(crate) fn d_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        x.iter().zip(&self.d).fold(DMatrix::zeros(self.n_k, self.n_k), |acc, (c, m)| acc + m * *c)
    }

    pub(crate) fn omega(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.omega
            .iter()
            .fold(DVector::zeros(self.n_k), |acc, (i, j, w)| acc + w * (x[*i] * y[*j] - x[*j] * y[*i]))
    }

    pub(crate) fn check_base_path(&self, a_b: &APath) -> Result<()> {
        if a_b.dim() != self.n_b {
            return Err(shape(format!("base path has dimension {}, base algebra {}", a_b.dim(), self.n_b)));
        }
        Ok(())
    }

    /// `Φ_{t_i,0}` at every node of `a_b`.
    pub(crate) fn nodes(&self, a_b: &APath, steps: usize) -> Vec<DMatrix<f64>> {
        let s = a_b.sampled();
        let n = a_b.intervals();
        rk4_nodes(
            |t, phi: &DMatrix<f64>| -(self.d_of(&s.eval(t)) * phi),
            DMatrix::identity(self.n_k, self.n_k),
            n,
            substeps_for(n, steps),
        )
    }
}

/// Parallel transport `Φ_{t,0}` along a base path: the solution of
/// `Φ' = −D_{a_B(s)} Φ`, `Φ(0) = id`, i.e. the flow of the linear vector
/// field of `D_{a_B}`. Uses `⌈steps · t⌉` RK4 steps.
pub fn parallel_transport(cpl: &Couple<f64>, a_b: &APath, t: f64, steps: usize) -> Result<Transport> {
    let conn = Connection::new(cpl);
    conn.check_base_path(a_b)?;
    let t = t.clamp(0.0, 1.0);
    let s = a_b.sampled();
    let k = ((steps as f64 * t).ceil() as usize).max(1);
    let matrix = rk4(
        |r, phi: &DMatrix<f64>| -(conn.d_of(&s.eval(r)) * phi),
        DMatrix::identity(conn.n_k, conn.n_k),
        0.0,
        t,
        k,
    );
    Ok(Transport { matrix, t0: 0.0, t1: t })
}

/// `Φ_{t_i,0}` at every sample node of the base path.
pub fn transport_nodes(cpl: &Couple<f64>, a_b: &APath, steps: usize) -> Result<Vec<Transport>> {
    let conn = Connection::new(cpl);
    conn.check_base_path(a_b)?;
    let n = a_b.intervals() as f64;
    Ok(conn
        .nodes(a_b, steps)
        .into_iter()
        .enumerate()
        .map(|(i, matrix)| Transport { matrix, t0: 0.0, t1: i as f64 / n })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::heisenberg_couple;
    use crate::liealg::{abelian, so3};
    use crate::paths::{concatenate, reverse};

    fn rotation_couple() -> Couple<f64> {
        let k = so3();
        Couple::new(abelian(1), k.clone(), vec![k.ad_basis(2).into_matrix()], &[]).unwrap().to_f64()
    }

    #[test]
    fn central_transport_is_identity() {
        let cpl = heisenberg_couple().to_f64();
        let a = APath::from_fn(cpl.base().clone(), 16, |t| DVector::from_vec(vec![t, 1.0 - t])).unwrap();
        let phi = parallel_transport(&cpl, &a, 0.7, 64).unwrap();
        assert_eq!(phi.matrix, DMatrix::identity(1, 1));
    }

    #[test]
    fn constant_rotation_closed_form() {
        let cpl = rotation_couple();
        let theta = 0.9;
        let a = APath::from_fn(cpl.base().clone(), 8, |_| DVector::from_vec(vec![theta])).unwrap();
        for t in [0.25, 1.0] {
            let phi = parallel_transport(&cpl, &a, t, 512).unwrap();
            // exp(−tθ ad e3): ad e3 rotates e1 → e2
            let (c, s) = ((t * theta).cos(), (t * theta).sin());
            let expected = DMatrix::from_row_slice(3, 3, &[c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0]);
            assert!((phi.matrix - expected).amax() < 1e-12);
        }
    }

    #[test]
    fn roundtrip_with_reverse_is_identity() {
        let cpl = so3_kernel();
        let a = APath::from_fn(cpl.base().clone(), 64, |t| DVector::from_vec(vec![t.sin(), 1.0 + t * t])).unwrap();
        let there = parallel_transport(&cpl, &a, 1.0, 512).unwrap().matrix;
        let back = parallel_transport(&cpl, &reverse(&a), 1.0, 512).unwrap().matrix;
        assert!((back * there - DMatrix::identity(3, 3)).amax() < 1e-8);
        let both = concatenate(&a, &reverse(&a)).unwrap();
        let loop_phi = parallel_transport(&cpl, &both, 1.0, 1024).unwrap().matrix;
        assert!((loop_phi - DMatrix::identity(3, 3)).amax() < 1e-6);
    }

    fn so3_kernel() -> Couple<f64> {
        crate::extension::so3_kernel_couple(true).to_f64()
    }

    #[test]
    fn transport_preserves_brackets() {
        let cpl = so3_kernel();
        let a = APath::from_fn(cpl.base().clone(), 64, |t| DVector::from_vec(vec![(3.0 * t).cos(), t])).unwrap();
        for phi in transport_nodes(&cpl, &a, 512).unwrap() {
            assert!(phi.defect(&cpl.kernel().clone()) < 1e-9);
        }
    }
}
