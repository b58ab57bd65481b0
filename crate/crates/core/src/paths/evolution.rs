use nalgebra::{DMatrix, DVector};

use crate::error::{contract, shape, Result};
use crate::extension::Check;
use crate::liealg::{LieAlgebra, Representation};
use crate::linalg::Matrix;
use crate::ode::{cumulative_simpson, rk4, rk4_nodes, substeps_for, Sampled, DEFAULT_TOL_ODE};

use super::grid::{Grid, HomotopyGrid, Structure};
use super::path::{flatten, flatten_rate, APath};

fn check_inputs(alg: &LieAlgebra<f64>, alpha: &Grid, beta0: &[DVector<f64>]) -> Result<()> {
    if alpha.dim() != alg.dim() {
        return Err(shape(format!("alpha has dimension {}, algebra {}", alpha.dim(), alg.dim())));
    }
    if beta0.len() != alpha.m() + 1 || beta0.iter().any(|v| v.len() != alg.dim()) {
        return Err(shape(format!("beta0 needs {} samples of length {}", alpha.m() + 1, alg.dim())));
    }
    if alpha.m() < 4 {
        return Err(shape("the ε direction needs at least 4 intervals"));
    }
    Ok(())
}

/// Solves `∂_ε α − ∂_t β = [α, β]` for `β` with `β(0, ε) = beta0(ε)` by
/// RK4 in `t` (at least `steps` steps over `[0, 1]`).
pub fn solve_evolution(alg: &LieAlgebra<f64>, alpha: &Grid, beta0: &[DVector<f64>], steps: usize) -> Result<Grid> {
    check_inputs(alg, alpha, beta0)?;
    let st = Structure::new(alg);
    let da = alpha.d_de();
    let (n, m) = (alpha.n(), alpha.m());
    let sub = substeps_for(n, steps);
    let mut rows = Vec::with_capacity(m + 1);
    for (j, b0) in beta0.iter().enumerate() {
        let a = Sampled::new(alpha.t_slice(j));
        let d = Sampled::new(da.t_slice(j));
        rows.push(rk4_nodes(|t, b: &DVector<f64>| d.eval(t) - st.bracket(&a.eval(t), b), b0.clone(), n, sub));
    }
    Grid::from_rows(rows)
}

/// Same problem as [`solve_evolution`], via the integral formula
/// `β(t) = ψ_{t,0} β(0) + ∫₀ᵗ ψ_{t,s} ∂_ε α(s) ds` where `ψ` is the flow
/// `ψ' = −ad_α ψ`, with cumulative Simpson quadrature on the nodes.
pub fn solve_evolution_integral(
    alg: &LieAlgebra<f64>,
    alpha: &Grid,
    beta0: &[DVector<f64>],
    steps: usize,
) -> Result<Grid> {
    check_inputs(alg, alpha, beta0)?;
    let st = Structure::new(alg);
    let da = alpha.d_de();
    let (n, m, dim) = (alpha.n(), alpha.m(), alg.dim());
    let sub = substeps_for(n, steps);
    let mut rows = Vec::with_capacity(m + 1);
    for (j, b0) in beta0.iter().enumerate() {
        let a = Sampled::new(alpha.t_slice(j));
        let psi = rk4_nodes(|t, p: &DMatrix<f64>| -(st.ad(&a.eval(t)) * p), DMatrix::identity(dim, dim), n, sub);
        let inv: Vec<DMatrix<f64>> =
            psi.iter().map(|p| p.clone().try_inverse().expect("flows are invertible")).collect();
        let integrand: Vec<DVector<f64>> = (0..=n).map(|i| &inv[i] * da.get(i, j)).collect();
        let cum = cumulative_simpson(&integrand);
        rows.push((0..=n).map(|i| &psi[i] * (b0 + &cum[i])).collect());
    }
    Grid::from_rows(rows)
}

/// Homotopy condition: with `β(0, ε) = 0`, reports `max_ε ‖β(1, ε)‖∞`.
pub fn is_homotopy(g: &HomotopyGrid, tol_ode: f64, steps: usize) -> Result<Check> {
    let zero = vec![DVector::zeros(g.algebra().dim()); g.a().m() + 1];
    let beta = solve_evolution(g.algebra(), g.a(), &zero, steps)?;
    let n = beta.n();
    let r = (0..=beta.m()).map(|j| beta.get(n, j).amax()).fold(0.0, f64::max);
    Ok(Check::within(r, tol_ode))
}

/// [`is_homotopy`] at the default tolerance.
pub fn is_homotopy_default(g: &HomotopyGrid, steps: usize) -> Result<Check> {
    is_homotopy(g, DEFAULT_TOL_ODE, steps)
}

/// The family `a_ε(t) = τ_ε'(t) a(τ_ε(t))` with
/// `τ_ε(t) = (1 − ε) t + ε τ(t)`, `τ` the flattening map; `M` ε-intervals.
pub fn reparametrization_family(a: &APath, m: usize) -> Grid {
    let s = a.sampled();
    Grid::from_fn(a.dim(), a.intervals(), m, |t, e| {
        let tau = (1.0 - e) * t + e * flatten(t);
        let rate = (1.0 - e) + e * flatten_rate(t);
        s.eval(tau) * rate
    })
}

pub(crate) fn faithful(rep: &Representation<f64>) -> bool {
    let cols: Vec<Vec<f64>> =
        rep.matrices().iter().map(|m| m.to_rows().into_iter().flatten().collect()).collect();
    let d = rep.dim();
    cols.is_empty() || Matrix::from_cols(d * d, &cols).rank() == cols.len()
}

/// Flow `G' = −ρ(x(s)) G` over `s ∈ [0, 1]` of uniformly sampled `x`.
pub(crate) fn rep_flow(rep: &Representation<f64>, samples: Vec<DVector<f64>>, steps: usize) -> DMatrix<f64> {
    let mats: Vec<DMatrix<f64>> = rep.matrices().iter().map(Matrix::to_dmatrix).collect();
    let d = rep.dim();
    let x = Sampled::new(samples);
    rk4(
        |s, g: &DMatrix<f64>| {
            let v = x.eval(s);
            let r = v.iter().zip(&mats).fold(DMatrix::zeros(d, d), |acc, (c, m)| acc + m * *c);
            -(r * g)
        },
        DMatrix::identity(d, d),
        0.0,
        1.0,
        steps,
    )
}

/// Flow commutation for a solution `(α, β)` of the evolution equation:
/// `‖Φ^{X¹}_{1,0} Φ^{Y⁰}_{1,0} − Φ^{Y¹}_{1,0} Φ^{X⁰}_{1,0}‖∞` where
/// `X^ε = α(·, ε)` flows in `t`, `Y^t = β(t, ·)` flows in `ε`, and each
/// flow solves `G' = −ρ(·) G` in the representation.
pub fn verify_hgeom(
    alg: &LieAlgebra<f64>,
    alpha: &Grid,
    beta: &Grid,
    rep: &Representation<f64>,
    steps: usize,
) -> Result<f64> {
    if !alpha.same_shape(beta) || alpha.dim() != alg.dim() {
        return Err(shape("alpha and beta must be grids of the same shape in the algebra"));
    }
    rep.check(alg)?;
    if !faithful(rep) {
        return Err(contract("representation is not faithful (nonzero kernel, e.g. a center in the adjoint)"));
    }
    let (n, m) = (alpha.n(), alpha.m());
    let x1 = rep_flow(rep, alpha.t_slice(m), steps);
    let x0 = rep_flow(rep, alpha.t_slice(0), steps);
    let y0 = rep_flow(rep, beta.e_slice(0), steps);
    let y1 = rep_flow(rep, beta.e_slice(n), steps);
    Ok((x1 * y0 - y1 * x0).amax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{abelian, heisenberg, sl2, so3};
    use crate::ode::simpson;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn zero_data_gives_zero() {
        let alg = so3().to_f64();
        let b = solve_evolution(&alg, &Grid::zeros(3, 8, 8), &vec![DVector::zeros(3); 9], 64).unwrap();
        assert_eq!(b.max_abs(), 0.0);
    }

    #[test]
    fn abelian_reduces_to_quadrature() {
        let alg = abelian(2).to_f64();
        let alpha = Grid::from_fn(2, 32, 32, |t, e| v(&[e * e * t.sin(), (e * t).exp()]));
        let beta0: Vec<_> = (0..=32).map(|j| v(&[j as f64 / 32.0, 1.0])).collect();
        let b = solve_evolution(&alg, &alpha, &beta0, 128).unwrap();
        for j in [0, 7, 32] {
            let e = j as f64 / 32.0;
            for i in [5, 32] {
                let t = i as f64 / 32.0;
                // β = β₀ + ∫₀ᵗ ∂_ε α ds, ∂_ε α = (2ε sin s, s e^{εs})
                let samples: Vec<_> =
                    (0..=64).map(|k| t * k as f64 / 64.0).map(|s| v(&[2.0 * e * s.sin(), s * (e * s).exp()])).collect();
                let exact = &beta0[j] + simpson(&samples) * t;
                assert!((b.get(i, j) - &exact).amax() < 1e-6, "{}", (b.get(i, j) - &exact).amax());
            }
        }
    }

    fn so3_alpha(n: usize) -> Grid {
        Grid::from_fn(3, n, n, |t, e| v(&[e * t, (2.0 * t).sin() * e * e, (t * e).cos()]))
    }

    #[test]
    fn dual_solvers_agree_on_so3() {
        let alg = so3().to_f64();
        let alpha = so3_alpha(64);
        let beta0: Vec<_> = (0..=64).map(|j| v(&[0.0, j as f64 / 64.0, 0.5])).collect();
        let b1 = solve_evolution(&alg, &alpha, &beta0, 64).unwrap();
        let b2 = solve_evolution_integral(&alg, &alpha, &beta0, 64).unwrap();
        assert!(b1.distance(&b2).unwrap() < 1e-7, "{}", b1.distance(&b2).unwrap());
    }

    #[test]
    fn evolution_solution_is_a_morphism() {
        let alg = so3().to_f64();
        let alpha = so3_alpha(64);
        let g = HomotopyGrid::from_a(alg, alpha, 256).unwrap();
        assert!(g.morphism_residual() < 1e-6, "{}", g.morphism_residual());
    }

    #[test]
    fn constant_family_is_a_homotopy() {
        let alg = so3().to_f64();
        let a = Grid::from_fn(3, 32, 16, |t, _| v(&[t, 1.0, -t * t]));
        let g = HomotopyGrid::from_a(alg, a, 128).unwrap();
        let c = is_homotopy(&g, 1e-6, 128).unwrap();
        assert!(c.pass && c.residual < 1e-12, "{}", c.residual);
    }

    #[test]
    fn reparametrizations_are_homotopies() {
        let alg = so3().to_f64();
        let a = APath::from_fn(alg.clone(), 128, |t| v(&[t.cos(), 2.0 * t, (3.0 * t).sin()])).unwrap();
        let g = HomotopyGrid::from_a(alg, reparametrization_family(&a, 16), 512).unwrap();
        let c = is_homotopy(&g, 1e-6, 512).unwrap();
        assert!(c.pass, "{}", c.residual);
    }

    #[test]
    fn shrinking_abelian_path_is_not_a_homotopy() {
        let alg = abelian(2).to_f64();
        let a = APath::from_fn(alg.clone(), 32, |t| v(&[1.0 + t, t.sin()])).unwrap();
        let integral = a.integral();
        let grid = Grid::from_fn(2, 32, 16, |t, e| a.eval(t) * (1.0 - e));
        let beta = solve_evolution(&alg, &grid, &vec![DVector::zeros(2); 17], 128).unwrap();
        for j in [0, 4, 16] {
            // β(1, ε) = ∫ ∂_ε α = −∫ a
            let r = (beta.get(32, j) + &integral).amax();
            assert!(r < 1e-7, "{r}");
        }
        let g = HomotopyGrid::from_a(alg, grid, 128).unwrap();
        let c = is_homotopy(&g, 1e-6, 128).unwrap();
        assert!(!c.pass);
        assert!((c.residual - integral.amax()).abs() < 1e-7);
    }

    #[test]
    fn hgeom_trivial_cases() {
        let alg = sl2().to_f64();
        let rep = Representation::adjoint(&alg);
        let alpha = Grid::from_fn(3, 16, 16, |t, _| v(&[t, 0.5, -t * t]));
        assert!(verify_hgeom(&alg, &alpha, &Grid::zeros(3, 16, 16), &rep, 256).unwrap() < 1e-12);
        let ab = abelian(2).to_f64();
        let rep = Representation::new(2, vec![Matrix::identity(2), Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, -1.0]])]).unwrap();
        let alpha = Grid::from_fn(2, 16, 16, |t, e| v(&[t * e, e]));
        let beta = Grid::from_fn(2, 16, 16, |t, e| v(&[0.5 * t * t - e, t]));
        let r = verify_hgeom(&ab, &alpha, &beta, &rep, 256).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn hgeom_sl2_adjoint() {
        let alg = sl2().to_f64();
        let rep = Representation::adjoint(&alg);
        let alpha = Grid::from_fn(3, 128, 128, |t, e| v(&[t, e * t * t, 0.5 * e]));
        let beta0: Vec<_> = (0..=128).map(|j| j as f64 / 128.0).map(|e| v(&[e, 0.0, e * e])).collect();
        let beta = solve_evolution(&alg, &alpha, &beta0, 512).unwrap();
        let r = verify_hgeom(&alg, &alpha, &beta, &rep, 512).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn hgeom_rejects_non_faithful() {
        let alg = heisenberg().to_f64();
        let rep = Representation::adjoint(&alg);
        let g = Grid::zeros(3, 8, 8);
        assert!(verify_hgeom(&alg, &g, &g, &rep, 16).is_err());
    }
}
