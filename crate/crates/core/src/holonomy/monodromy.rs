use nalgebra::{DMatrix, DVector};

use crate::error::{contract, shape, Error, Result};
use crate::extension::{build_extension, Check, Couple};
use crate::liealg::Representation;
use crate::ode::{rk4_nodes, simpson, substeps_for, Sampled};
use crate::paths::{faithful, flatten, flatten_rate, is_homotopy, rep_flow, solve_evolution, APath, ASphere, Grid, HomotopyGrid, Structure};

use super::transport::Connection;

/// A kernel path standing for an element of the simply connected group of
/// `K`, with that element when it can be materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyElement {
    pub kpath: APath,
    /// Solution at `1` of `g' = g ρ(k)`, `g(0) = id`, when a
    /// representation of `K` was supplied.
    pub group_element: Option<DMatrix<f64>>,
    /// `∫ k` when `K` is abelian (the group is `K` itself).
    pub abelian_element: Option<DVector<f64>>,
}

impl MonodromyElement {
    fn new(kpath: APath, rep: Option<&Representation<f64>>, steps: usize) -> Self {
        let group_element = rep.map(|r| group_element(&kpath, r, steps));
        let abelian_element = kpath.algebra().is_abelian().then(|| kpath.integral());
        Self { kpath, group_element, abelian_element }
    }
}

/// `g(1)` for `g' = g ρ(k(s))`, `g(0) = id`.
pub fn group_element(kpath: &APath, rep: &Representation<f64>, steps: usize) -> DMatrix<f64> {
    rep_flow(rep, kpath.samples().to_vec(), steps).try_inverse().expect("flows are invertible")
}

fn check_base(cpl: &Couple<f64>, g: &HomotopyGrid) -> Result<()> {
    if g.algebra() != cpl.base() {
        return Err(shape("homotopy grid must live in the base algebra"));
    }
    Ok(())
}

fn check_rep(cpl: &Couple<f64>, rep: Option<&Representation<f64>>) -> Result<()> {
    if let Some(r) = rep {
        r.check(cpl.kernel())?;
    }
    Ok(())
}

/// `ε_j ↦ ∫₀¹ Φ^{a^ε}_{s,0}⁻¹ ω(a, b)(s, ε_j) ds`, Simpson in `s`.
pub fn transported_curvature(cpl: &Couple<f64>, h_b: &HomotopyGrid, steps: usize) -> Result<APath> {
    check_base(cpl, h_b)?;
    let conn = Connection::new(cpl);
    let (a, b) = (h_b.a(), h_b.b());
    let samples = (0..=a.m())
        .map(|j| {
            let phi = conn.nodes(&h_b.path(j), steps);
            let integrand: Vec<DVector<f64>> = (0..=a.n())
                .map(|i| {
                    let inv = phi[i].clone().try_inverse().expect("transports are invertible");
                    inv * conn.omega(a.get(i, j), b.get(i, j))
                })
                .collect();
            simpson(&integrand)
        })
        .collect();
    APath::new(cpl.kernel().clone(), samples)
}

/// The monodromy `∂(h_B)` of a base homotopy, as the kernel path of
/// transported curvature integrals.
pub fn monodromy_partial(
    cpl: &Couple<f64>,
    h_b: &HomotopyGrid,
    rep: Option<&Representation<f64>>,
    steps: usize,
) -> Result<MonodromyElement> {
    check_rep(cpl, rep)?;
    let kpath = transported_curvature(cpl, h_b, steps)?;
    Ok(MonodromyElement::new(kpath, rep, steps))
}

/// A family of split paths: the base homotopy and `a_K(t, ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitHomotopy {
    pub base: HomotopyGrid,
    pub a_k: Grid,
}

/// Whether the unsplit family is a homotopy in the extension, through the
/// split criterion: `a_B` is a homotopy and the solution of
/// `∂_ε a_K − ∂_t μ = [a_K, μ]`, `μ(0, ε) = 0`, ends at the transported
/// curvature integral. The residual is the larger of the two defects.
pub fn split_homotopy_check(cpl: &Couple<f64>, family: &SplitHomotopy, tol_ode: f64, steps: usize) -> Result<Check> {
    check_base(cpl, &family.base)?;
    let a = family.base.a();
    if (family.a_k.n(), family.a_k.m(), family.a_k.dim()) != (a.n(), a.m(), cpl.kernel().dim()) {
        return Err(shape("a_K must be a kernel grid shaped like the base homotopy"));
    }
    let base = is_homotopy(&family.base, tol_ode, steps)?;
    let zero = vec![DVector::zeros(cpl.kernel().dim()); a.m() + 1];
    let mu = solve_evolution(cpl.kernel(), &family.a_k, &zero, steps)?;
    let f = transported_curvature(cpl, &family.base, steps)?;
    let r = (0..=a.m()).map(|j| (mu.get(a.n(), j) - &f.samples()[j]).amax()).fold(0.0, f64::max);
    let residual = r.max(base.residual);
    Ok(Check { pass: base.pass && r <= tol_ode, residual })
}

/// The extension-valued family `(Φ^{a^ε}_{t,0} a_K, a_B)` with `b` solved
/// from the evolution equation.
pub fn unsplit_family(cpl: &Couple<f64>, family: &SplitHomotopy, steps: usize) -> Result<HomotopyGrid> {
    check_base(cpl, &family.base)?;
    let conn = Connection::new(cpl);
    let a = family.base.a();
    let mut rows = Vec::with_capacity(a.m() + 1);
    for j in 0..=a.m() {
        let phi = conn.nodes(&family.base.path(j), steps);
        rows.push(
            (0..=a.n())
                .map(|i| {
                    let v = &phi[i] * family.a_k.get(i, j);
                    DVector::from_iterator(conn.n_k + conn.n_b, v.iter().chain(a.get(i, j).iter()).copied())
                })
                .collect(),
        );
    }
    HomotopyGrid::from_a(build_extension(cpl).total().clone(), Grid::from_rows(rows)?, steps)
}

/// `∂₂` of a base sphere: solves `∂_ε α − ∂_t h(β_B) = [α, h(β_B)]` in the
/// extension with `α(ε = 0) = 0` and returns the kernel path `α(·, 1)`.
/// Fails with a numerical error when the horizontal part of `α(·, 1)`
/// exceeds `tol_ode`.
pub fn connecting_partial2(
    cpl: &Couple<f64>,
    s: &ASphere,
    rep: Option<&Representation<f64>>,
    tol_ode: f64,
    steps: usize,
) -> Result<MonodromyElement> {
    check_base(cpl, s.grid())?;
    check_rep(cpl, rep)?;
    let ext = build_extension(cpl);
    let st = Structure::new(ext.total());
    let (nk, nb) = (ext.kernel_dim(), ext.base_dim());
    let lift = |v: &DVector<f64>| DVector::from_iterator(nk + nb, std::iter::repeat_n(0.0, nk).chain(v.iter().copied()));
    let b = s.grid().b().map(lift);
    let db = b.d_dt();
    let (n, m) = (b.n(), b.m());
    let sub = substeps_for(m, steps);
    let mut end = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let beta = Sampled::new(b.e_slice(i));
        let dbeta = Sampled::new(db.e_slice(i));
        let states =
            rk4_nodes(|e, al: &DVector<f64>| dbeta.eval(e) + st.bracket(al, &beta.eval(e)), DVector::zeros(nk + nb), m, sub);
        end.push(states.into_iter().last().expect("at least one node"));
    }
    let leak = end.iter().map(|v| v.rows(nk, nb).amax()).fold(0.0, f64::max);
    if leak > tol_ode {
        return Err(Error::Numerical(format!("horizontal leakage {leak:e} exceeds {tol_ode:e}")));
    }
    let kpath = APath::new(cpl.kernel().clone(), end.iter().map(|v| v.rows(0, nk).into_owned()).collect())?;
    Ok(MonodromyElement::new(kpath, rep, steps))
}

/// `h₁` followed by `h₂` in `ε`, each half reparametrized by the flattening
/// map; requires `a₁(·, 1) = a₂(·, 0)` on samples.
pub fn concatenate_homotopies(h1: &HomotopyGrid, h2: &HomotopyGrid) -> Result<HomotopyGrid> {
    let (a1, a2) = (h1.a(), h2.a());
    if h1.algebra() != h2.algebra() || a1.n() != a2.n() {
        return Err(shape("homotopies must share the algebra and the t grid"));
    }
    let gap = (0..=a1.n()).map(|i| (a1.get(i, a1.m()) - a2.get(i, 0)).amax()).fold(0.0, f64::max);
    if gap > 1e-12 {
        return Err(contract(format!("homotopies are not composable: end and start differ by {gap:e}")));
    }
    let m = 2 * a1.m().max(a2.m());
    let n = a1.n();
    let dim = h1.algebra().dim();
    let (mut a, mut b) = (Grid::zeros(dim, n, m), Grid::zeros(dim, n, m));
    for i in 0..=n {
        let s = [
            (Sampled::new(h1.a().e_slice(i)), Sampled::new(h1.b().e_slice(i))),
            (Sampled::new(h2.a().e_slice(i)), Sampled::new(h2.b().e_slice(i))),
        ];
        for j in 0..=m {
            let e = j as f64 / m as f64;
            let (x, (sa, sb)) = if 2 * j <= m { (2.0 * e, &s[0]) } else { (2.0 * e - 1.0, &s[1]) };
            a.set(i, j, sa.eval(flatten(x)));
            b.set(i, j, sb.eval(flatten(x)) * (2.0 * flatten_rate(x)));
        }
    }
    HomotopyGrid::unchecked(h1.algebra().clone(), a, b)
}

/// `‖g(∂(h₁ then h₂)) − g(∂h₁) g(∂h₂)‖∞` in a faithful representation of
/// `K`; the order matches `g' = g ρ(k)`.
pub fn cocycle_check(
    cpl: &Couple<f64>,
    h1: &HomotopyGrid,
    h2: &HomotopyGrid,
    rep: &Representation<f64>,
    steps: usize,
) -> Result<f64> {
    rep.check(cpl.kernel())?;
    if !faithful(rep) {
        return Err(contract("representation of K is not faithful"));
    }
    let joined = concatenate_homotopies(h1, h2)?;
    let g = |h: &HomotopyGrid| -> Result<DMatrix<f64>> {
        Ok(monodromy_partial(cpl, h, Some(rep), steps)?.group_element.expect("representation given"))
    };
    Ok((g(&joined)? - g(h1)? * g(h2)?).amax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{heisenberg_couple, so3_kernel_couple, so3_semidirect};
    use crate::linalg::Matrix;
    use crate::paths::{ExponentialFamily, SphereFamily};
    use std::f64::consts::PI;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    /// Base homotopy `F = (t, (k₀ + ε k) sin πt)` in `ℝ²`, ω-area `2k/π`.
    fn area_homotopy(k0: f64, k: f64, n: usize, m: usize) -> HomotopyGrid {
        let alg = heisenberg_couple().to_f64().base().clone();
        let a = Grid::from_fn(2, n, m, |t, e| v(&[1.0, (k0 + e * k) * PI * (PI * t).cos()]));
        let b = Grid::from_fn(2, n, m, |t, _| v(&[0.0, k * (PI * t).sin()]));
        HomotopyGrid::new(alg, a, b).unwrap()
    }

    fn line_rep() -> Representation<f64> {
        Representation::new(2, vec![Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]])]).unwrap()
    }

    #[test]
    fn heisenberg_monodromy_is_the_area() {
        let cpl = heisenberg_couple().to_f64();
        for s in [1.0, 0.5, -2.0] {
            let h = area_homotopy(0.3, s * PI / 2.0, 128, 64);
            let el = monodromy_partial(&cpl, &h, Some(&line_rep()), 512).unwrap();
            let area = el.abelian_element.unwrap()[0];
            assert!((area - s).abs() < 1e-6 * s.abs(), "{area} vs {s}");
            assert!((el.group_element.unwrap()[(0, 1)] - s).abs() < 1e-6 * s.abs());
        }
    }

    #[test]
    fn semidirect_and_constant_families_are_trivial() {
        let cpl = so3_semidirect().to_f64();
        let fam = ExponentialFamily::random(cpl.base().clone(), 3, false);
        let el = monodromy_partial(&cpl, &fam.grid(0.0, 32, 32).unwrap(), None, 256).unwrap();
        assert_eq!(el.kpath.integral().amax(), 0.0);
        let cpl = so3_kernel_couple(true).to_f64();
        let a = Grid::from_fn(2, 16, 8, |t, _| v(&[t, 1.0]));
        let h = HomotopyGrid::new(cpl.base().clone(), a, Grid::zeros(2, 16, 8)).unwrap();
        let el = monodromy_partial(&cpl, &h, Some(&Representation::adjoint(cpl.kernel())), 64).unwrap();
        assert_eq!(el.kpath.integral().amax(), 0.0);
        assert!((el.group_element.unwrap() - DMatrix::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn split_check_agrees_with_direct_check() {
        let cpl = heisenberg_couple().to_f64();
        let h = area_homotopy(0.0, 0.4, 64, 32);
        let f = transported_curvature(&cpl, &h, 256).unwrap();
        // a_K(t, ε) = 6t(1 − t) F(ε) makes μ(1, ε) = ∫∂_ε a_K ... match when F is
        // replaced by its ε-antiderivative: μ(1) = d/dε ∫ a_K dt
        let anti = crate::ode::cumulative_simpson(f.samples());
        let good = Grid::from_fn(1, 64, 32, |t, e| &anti[(e * 32.0).round() as usize] * (6.0 * t * (1.0 - t)));
        let family = SplitHomotopy { base: h.clone(), a_k: good };
        let c = split_homotopy_check(&cpl, &family, 1e-6, 256).unwrap();
        assert!(c.pass, "{}", c.residual);
        assert!(is_homotopy(&unsplit_family(&cpl, &family, 256).unwrap(), 1e-6, 256).unwrap().pass);
        let broken = SplitHomotopy { base: h, a_k: Grid::zeros(1, 64, 32) };
        let c = split_homotopy_check(&cpl, &broken, 1e-6, 256).unwrap();
        let direct = is_homotopy(&unsplit_family(&cpl, &broken, 256).unwrap(), 1e-6, 256).unwrap();
        assert!(!c.pass && !direct.pass);
        // the defect is the curvature integral, 2k/π at ε = 1
        assert!((c.residual - 0.8 / PI).abs() < 1e-8, "{}", c.residual);
    }

    #[test]
    fn spheres_over_heisenberg_base() {
        let cpl = heisenberg_couple().to_f64();
        let fam = ExponentialFamily::random(cpl.base().clone(), 5, true);
        let s = fam.sphere(0.0, 64, 64).unwrap();
        let c2 = connecting_partial2(&cpl, &s, None, 1e-6, 256).unwrap();
        let mono = monodromy_partial(&cpl, s.grid(), None, 256).unwrap();
        let (x, y) = (c2.abelian_element.unwrap()[0], mono.abelian_element.unwrap()[0]);
        assert!((x - y).abs() < 1e-6, "{x} {y}");
    }

    #[test]
    fn areas_add_under_concatenation() {
        let cpl = heisenberg_couple().to_f64();
        let (k1, k2) = (0.7, -0.2);
        let h1 = area_homotopy(0.0, k1, 64, 32);
        let h2 = area_homotopy(k1, k2, 64, 32);
        let r = cocycle_check(&cpl, &h1, &h2, &line_rep(), 512).unwrap();
        assert!(r < 1e-6, "{r}");
        let joined = concatenate_homotopies(&h1, &h2).unwrap();
        let total = monodromy_partial(&cpl, &joined, None, 512).unwrap().abelian_element.unwrap()[0];
        assert!((total - 2.0 * (k1 + k2) / PI).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_composable() {
        let h1 = area_homotopy(0.0, 0.5, 64, 32);
        assert!(concatenate_homotopies(&h1, &h1).is_err());
    }
}
