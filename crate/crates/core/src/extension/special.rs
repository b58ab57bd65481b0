use crate::error::{contract, Result};
use crate::liealg::{abelian, ce_differential, so3, unit, LieAlgebra};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

use super::couple::{curv_d, Couple};

/// Semidirect couple `(D, 0)`; requires `D` to be flat (`Curv_D = 0`).
pub fn semidirect<S: Scalar>(base: LieAlgebra<S>, kernel: LieAlgebra<S>, d: Vec<Matrix<S>>) -> Result<Couple<S>> {
    let cpl = Couple::new(base, kernel, d, &[])?;
    let curv = curv_d(&cpl);
    if curv.iter().any(|c| !c.is_zero()) {
        let worst = curv.iter().map(Matrix::max_abs).fold(0.0, f64::max);
        return Err(contract(format!("D is not flat: max |Curv_D| = {worst}")));
    }
    Ok(cpl)
}

/// Central couple: kernel `ℝⁿ`, `D = 0`, scalar-closed `ω`.
///
/// `omega` lists `(i, j, ω(e_i, e_j) ∈ ℝⁿ)`. Each component of `ω` must be
/// closed for the Chevalley-Eilenberg differential of the base.
pub fn central<S: Scalar>(base: LieAlgebra<S>, n: usize, omega: &[(usize, usize, Vec<S>)]) -> Result<Couple<S>> {
    let nb = base.dim();
    let names = if n == 1 { vec!["z".to_string()] } else { (1..=n).map(|i| format!("z{i}")).collect() };
    let kernel = LieAlgebra::from_brackets(names, &[])?;
    let cpl = Couple::new(base, kernel, vec![Matrix::zeros(n, n); nb], omega)?;
    if nb >= 3 {
        let d2 = ce_differential(cpl.base(), None, 2)?;
        let w = cpl.omega_cochain();
        for a in 0..n {
            let comp: Vec<S> = w.iter().skip(a).step_by(n).cloned().collect();
            let dw = d2.apply(&comp);
            if dw.iter().any(|v| !v.is_negligible()) {
                let worst = dw.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
                return Err(contract(format!("omega component {a} is not closed: max |dω| = {worst}")));
            }
        }
    }
    Ok(cpl)
}

/// The central extension of `ℝ²` by `ℝ` with `ω(e1, e2) = z`; builds `h₃`.
pub fn heisenberg_couple() -> Couple<Rational> {
    central(abelian(2), 1, &[(0, 1, vec![Rational::from_i64(1)])]).expect("closed")
}

/// Base `ℝ²`, kernel `so(3)`, `D = (ad e1, ad e2)`, and `ω(e1, e2) = e3`
/// when `with_omega` (otherwise the non-admissible `ω = 0`).
pub fn so3_kernel_couple(with_omega: bool) -> Couple<Rational> {
    let k = so3();
    let d = vec![k.ad_basis(0).into_matrix(), k.ad_basis(1).into_matrix()];
    let omega = if with_omega { vec![(0, 1, unit(3, 2))] } else { vec![] };
    Couple::new(abelian(2), k, d, &omega).expect("derivations")
}

/// `so(3) ⋉ ℝ³` with the defining action.
pub fn so3_semidirect() -> Couple<Rational> {
    let b = so3();
    let d = (0..3).map(|i| b.ad_basis(i).into_matrix()).collect();
    semidirect(b, abelian(3), d).expect("representation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::SubsetBasis;
    use crate::extension::build::build_extension;
    use crate::extension::couple::is_admissible;
    use crate::liealg::{heisenberg, sl2};

    #[test]
    fn semidirect_so3() {
        let cpl = so3_semidirect();
        assert!(is_admissible(&cpl).ok());
        let ext = build_extension(&cpl);
        assert_eq!(ext.total().dim(), 6);
        assert!(ext.total().check_jacobi().ok());
    }

    #[test]
    fn semidirect_rejects_curved_d() {
        let k = so3();
        let d = vec![k.ad_basis(0).into_matrix(), k.ad_basis(1).into_matrix()];
        assert!(semidirect(abelian(2), k, d).is_err());
    }

    #[test]
    fn central_gives_heisenberg() {
        let cpl = heisenberg_couple();
        assert!(is_admissible(&cpl).ok());
        assert_eq!(build_extension(&cpl).total().bracket_entries().len(), heisenberg().bracket_entries().len());
    }

    #[test]
    fn central_on_so3_accepts_everything() {
        let q = Rational::from_i64;
        assert!(central(so3(), 1, &[(0, 1, vec![q(3)]), (1, 2, vec![q(-1)])]).is_ok());
    }

    #[test]
    fn central_rejects_non_closed_form() {
        // brute force over e^i ∧ e^j on sl(2) ⊕ ℝ for a non-closed form
        let base = sl2().direct_sum(&abelian(1));
        let d2 = ce_differential(&base, None, 2).unwrap();
        let pairs = SubsetBasis::new(4, 2);
        let found: Vec<(usize, usize)> = pairs
            .subsets()
            .iter()
            .enumerate()
            .filter(|(p, _)| !d2.col(*p).iter().all(|v| v.is_negligible()))
            .map(|(_, s)| (s[0], s[1]))
            .collect();
        assert!(found.contains(&(0, 3)), "h*∧c* should not be closed: {found:?}");
        let (i, j) = found[0];
        let err = central(base, 1, &[(i, j, vec![Rational::from_i64(1)])]).unwrap_err();
        assert!(err.to_string().contains("not closed"));
    }
}
