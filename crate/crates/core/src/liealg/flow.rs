use nalgebra::DMatrix;

use crate::error::{contract, shape, Result};
use crate::linalg::Matrix;
use crate::ode::{rk4, Sampled};
use crate::scalar::Scalar;

use super::algebra::LieAlgebra;

/// Flow of a time-dependent derivation: solves `Ψ' = D(t) Ψ`, `Ψ(t0) = id`
/// and returns `Ψ(t1)`.
///
/// `samples` are the values of `D` at uniform nodes running from `t0` to
/// `t1`; a single sample means a constant derivation. Every sample must be
/// a derivation of `alg`.
pub fn derivation_flow<S: Scalar>(
    alg: &LieAlgebra<S>,
    samples: &[Matrix<S>],
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<DMatrix<f64>> {
    let n = alg.dim();
    if samples.is_empty() {
        return Err(shape("derivation_flow needs at least one sample"));
    }
    if steps == 0 {
        return Err(contract("steps must be at least 1"));
    }
    for (i, m) in samples.iter().enumerate() {
        if m.rows() != n || m.cols() != n {
            return Err(shape(format!("sample {i} is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
        }
        if !alg.is_derivation(m) {
            return Err(contract(format!("sample {i} is not a derivation")));
        }
    }
    let mut mats: Vec<DMatrix<f64>> = samples.iter().map(Matrix::to_dmatrix).collect();
    if mats.len() == 1 {
        mats.push(mats[0].clone());
    }
    let d = Sampled::new(mats);
    let span = t1 - t0;
    // reparametrize to s in [0, 1]: dΨ/ds = span · D(s) Ψ
    Ok(rk4(|s, psi: &DMatrix<f64>| d.eval(s) * psi * span, DMatrix::identity(n, n), 0.0, 1.0, steps))
}

/// `max_{i<j} ‖Ψ[e_i,e_j] − [Ψe_i, Ψe_j]‖∞`
pub fn automorphism_defect(alg: &LieAlgebra<f64>, psi: &DMatrix<f64>) -> f64 {
    let n = alg.dim();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            let lhs = psi * nalgebra::DVector::from_vec(alg.bracket_basis(i, j));
            let x: Vec<f64> = psi.column(i).iter().copied().collect();
            let y: Vec<f64> = psi.column(j).iter().copied().collect();
            let rhs = alg.bracket(&x, &y).expect("matching lengths");
            for (a, b) in lhs.iter().zip(&rhs) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::algebra::{sl2, so3};
    use crate::scalar::Rational;

    #[test]
    fn zero_derivation_gives_identity() {
        let alg = so3();
        let psi = derivation_flow(&alg, &[Matrix::<Rational>::zeros(3, 3)], 0.0, 1.0, 64).unwrap();
        assert!((psi - DMatrix::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn rotation_closed_form() {
        let alg = so3();
        let theta = 1.3_f64;
        let psi = derivation_flow(&alg, &[alg.ad_basis(2).into_matrix()], 0.0, theta, 512).unwrap();
        let (c, s) = (theta.cos(), theta.sin());
        let expected = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        assert!((psi - expected).amax() < 1e-12);
    }

    #[test]
    fn reversibility() {
        let alg = sl2();
        let d = alg.ad(&[Rational::from_i64(1), Rational::from_i64(2), Rational::from_i64(-1)]).unwrap().into_matrix();
        let fwd = derivation_flow(&alg, std::slice::from_ref(&d), 0.0, 1.0, 512).unwrap();
        let back = derivation_flow(&alg, &[d], 1.0, 0.0, 512).unwrap();
        assert!((back * fwd - DMatrix::identity(3, 3)).amax() < 1e-9);
    }

    #[test]
    fn time_dependent_flow_preserves_bracket() {
        let alg = so3();
        let samples: Vec<Matrix<Rational>> = (0..=8)
            .map(|i| {
                let t = Rational::new(i.into(), 8.into());
                let x = vec![t.clone(), Rational::from_i64(1) - t.clone() * t.clone(), Rational::from_i64(2) * t];
                alg.ad(&x).unwrap().into_matrix()
            })
            .collect();
        let psi = derivation_flow(&alg, &samples, 0.0, 1.0, 512).unwrap();
        assert!(automorphism_defect(&alg.to_f64(), &psi) < 1e-9);
    }

    #[test]
    fn rejects_non_derivation() {
        let alg = so3();
        assert!(derivation_flow(&alg, &[Matrix::<Rational>::identity(3)], 0.0, 1.0, 8).is_err());
    }
}
