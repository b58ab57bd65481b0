use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, shape, Result};
use crate::liealg::LieAlgebra;
use crate::ode::{rk4_nodes, substeps_for, DEFAULT_TOL_ODE};

use super::grid::{ASphere, Grid, HomotopyGrid, Structure};

/// `β` and the partial derivatives the sphere lemma needs, at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaJet {
    pub b: DVector<f64>,
    pub b_t: DVector<f64>,
    pub b_u: DVector<f64>,
    pub b_tu: DVector<f64>,
}

/// A `u`-family of morphisms `a dt + b dε` given in closed form; `b`
/// extends to the sections `β(t, ε, u)`.
pub trait SphereFamily {
    fn algebra(&self) -> &LieAlgebra<f64>;
    fn a(&self, t: f64, e: f64, u: f64) -> DVector<f64>;
    fn jet(&self, t: f64, e: f64, u: f64) -> BetaJet;

    /// Samples the member at `u` on an `n x m` grid.
    fn grid(&self, u: f64, n: usize, m: usize) -> Result<HomotopyGrid> {
        let dim = self.algebra().dim();
        let a = Grid::from_fn(dim, n, m, |t, e| self.a(t, e, u));
        let b = Grid::from_fn(dim, n, m, |t, e| self.jet(t, e, u).b);
        HomotopyGrid::new(self.algebra().clone(), a, b)
    }

    fn sphere(&self, u: f64, n: usize, m: usize) -> Result<ASphere> {
        ASphere::new(self.grid(u, n, m)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaReport {
    /// `θ(t_i, ε_j)`
    pub theta: Grid,
    /// `max ‖∂_t θ − ∂_u α − [θ, α]‖∞` over the grid
    pub pde_residual: f64,
    /// `max ‖θ(t, ε)‖∞` over `t ∈ {0, 1}`
    pub boundary_residual: f64,
    /// `max ‖α − a‖∞`, `α` re-solved from `β` against the sphere's `a`
    pub alpha_defect: f64,
}

impl ThetaReport {
    pub fn ok(&self, tol_grid: f64, tol_ode: f64) -> bool {
        self.pde_residual <= tol_grid && self.boundary_residual <= tol_ode && self.alpha_defect <= tol_ode
    }
}

/// Solves `∂_ε θ − ∂_u β = [θ, β]` with `θ(ε = 0) = 0` along every `t`
/// node, together with `∂_ε α − ∂_t β = [α, β]`, `α(ε = 0) = 0`.
///
/// `∂_t θ` and `∂_u α` are carried as tangent equations (the `t`- and
/// `u`-derivatives of the two evolutions), so the second equation of the
/// lemma is checked without differencing the solution.
pub fn sphere_theta(s: &ASphere, family: &dyn SphereFamily, u: f64, steps: usize) -> Result<ThetaReport> {
    let g = s.grid();
    if g.algebra() != family.algebra() {
        return Err(shape("sphere and family live in different algebras"));
    }
    let (n, m, dim) = (g.a().n(), g.a().m(), g.algebra().dim());
    for j in 0..=m {
        for i in 0..=n {
            let b = family.jet(i as f64 / n as f64, j as f64 / m as f64, u).b;
            if (&b - g.b().get(i, j)).amax() > 1e-12 * (1.0 + b.amax()) {
                return Err(contract(format!("family does not extend b at node ({i}, {j})")));
            }
        }
    }
    let st = Structure::new(g.algebra());
    let sub = substeps_for(m, steps);
    let mut theta = Grid::zeros(dim, n, m);
    let (mut pde, mut boundary, mut alpha_defect) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..=n {
        let t = i as f64 / n as f64;
        // state = (α, θ, ∂_u α, ∂_t θ)
        let rhs = |e: f64, y: &DVector<f64>| {
            let jet = family.jet(t, e, u);
            let (al, th) = (y.rows(0, dim).into_owned(), y.rows(dim, dim).into_owned());
            let (al_u, th_t) = (y.rows(2 * dim, dim).into_owned(), y.rows(3 * dim, dim).into_owned());
            let mut out = DVector::zeros(4 * dim);
            out.rows_mut(0, dim).copy_from(&(&jet.b_t + st.bracket(&al, &jet.b)));
            out.rows_mut(dim, dim).copy_from(&(&jet.b_u + st.bracket(&th, &jet.b)));
            out.rows_mut(2 * dim, dim)
                .copy_from(&(&jet.b_tu + st.bracket(&al_u, &jet.b) + st.bracket(&al, &jet.b_u)));
            out.rows_mut(3 * dim, dim)
                .copy_from(&(&jet.b_tu + st.bracket(&th_t, &jet.b) + st.bracket(&th, &jet.b_t)));
            out
        };
        let states = rk4_nodes(rhs, DVector::zeros(4 * dim), m, sub);
        for (j, y) in states.into_iter().enumerate() {
            let (al, th) = (y.rows(0, dim).into_owned(), y.rows(dim, dim).into_owned());
            let (al_u, th_t) = (y.rows(2 * dim, dim).into_owned(), y.rows(3 * dim, dim).into_owned());
            pde = pde.max((th_t - al_u - st.bracket(&th, &al)).amax());
            alpha_defect = alpha_defect.max((&al - g.a().get(i, j)).amax());
            if i == 0 || i == n {
                boundary = boundary.max(th.amax());
            }
            theta.set(i, j, th);
        }
    }
    Ok(ThetaReport { theta, pde_residual: pde, boundary_residual: boundary, alpha_defect })
}

/// [`ThetaReport::ok`] at the default tolerances for the sphere's grid.
pub fn sphere_theta_ok(r: &ThetaReport, s: &ASphere) -> bool {
    let g = s.grid().a();
    r.ok(super::grid::tol_grid(g.n(), g.m()), DEFAULT_TOL_ODE)
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, k| acc * x + k)
}

fn poly_diff(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `f(t, ε, u) = c t + (A₀ + A₁ u) T(t) E(ε)` with `T(t) = t(1 − t) P(t)`
/// and `E(ε) = ε(1 − ε) Q(ε)` when pinned, `Q(ε)` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub c: f64,
    pub amp: (f64, f64),
    pub t_poly: Vec<f64>,
    pub e_poly: Vec<f64>,
    pub pinned: bool,
}

impl Profile {
    fn t_factor(&self) -> Vec<f64> {
        poly_mul(&[0.0, 1.0, -1.0], &self.t_poly)
    }

    fn e_factor(&self) -> Vec<f64> {
        if self.pinned {
            poly_mul(&[0.0, 1.0, -1.0], &self.e_poly)
        } else {
            self.e_poly.clone()
        }
    }

    /// `d[k][j][i] = ∂_u^k ∂_ε^j ∂_t^i f` for `i, j, k ∈ {0, 1}`.
    fn jet(&self, t: f64, e: f64, u: f64) -> [[[f64; 2]; 2]; 2] {
        let tp = self.t_factor();
        let ep = self.e_factor();
        let tv = [poly_eval(&tp, t), poly_eval(&poly_diff(&tp), t)];
        let ev = [poly_eval(&ep, e), poly_eval(&poly_diff(&ep), e)];
        let av = [self.amp.0 + self.amp.1 * u, self.amp.1];
        let mut d = [[[0.0; 2]; 2]; 2];
        for (k, ak) in av.iter().enumerate() {
            for (j, ej) in ev.iter().enumerate() {
                for (i, ti) in tv.iter().enumerate() {
                    d[k][j][i] = ak * ej * ti;
                }
            }
        }
        d[0][0][0] += self.c * t;
        d[0][0][1] += self.c;
        d
    }
}

/// Morphisms from `g(t, ε) = exp(f₁ X) exp(f₂ Y)` trivialized on the left:
/// `a = g⁻¹∂_t g`, `b = g⁻¹∂_ε g`, computed in the algebra through
/// `Ad_{exp(−f₂ Y)} = exp(−f₂ ad_Y)`.
///
/// With pinned profiles and `c = 0` every member is an `A`-sphere; with
/// `c ≠ 0` and unpinned `ε`-factors the members are homotopies between the
/// `ε = 0` and `ε = 1` paths.
#[derive(Debug, Clone)]
pub struct ExponentialFamily {
    algebra: LieAlgebra<f64>,
    x: DVector<f64>,
    y: DVector<f64>,
    ad_y: DMatrix<f64>,
    pub f1: Profile,
    pub f2: Profile,
}

impl ExponentialFamily {
    pub fn new(algebra: LieAlgebra<f64>, x: DVector<f64>, y: DVector<f64>, f1: Profile, f2: Profile) -> Result<Self> {
        if x.len() != algebra.dim() || y.len() != algebra.dim() {
            return Err(shape("generators must lie in the algebra"));
        }
        let ad_y = Structure::new(&algebra).ad(&y);
        Ok(Self { algebra, x, y, ad_y, f1, f2 })
    }

    /// Seeded family with random generators and small polynomial profiles.
    pub fn random(algebra: LieAlgebra<f64>, seed: u64, sphere: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = algebra.dim();
        let vec = |rng: &mut ChaCha8Rng| DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let x = vec(&mut rng);
        let y = vec(&mut rng);
        let profile = |rng: &mut ChaCha8Rng| Profile {
            c: if sphere { 0.0 } else { rng.random_range(-1.0..1.0) },
            amp: (rng.random_range(0.5..2.0), rng.random_range(-0.5..0.5)),
            t_poly: vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            e_poly: vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            pinned: sphere,
        };
        let f1 = profile(&mut rng);
        let f2 = profile(&mut rng);
        Self::new(algebra, x, y, f1, f2).expect("generators have the right length")
    }

    /// `w = exp(−f₂ ad_Y) X`, `M w`, `M² w` with `M = ad_Y`.
    fn rotated(&self, f2: f64) -> [DVector<f64>; 3] {
        let w = (&self.ad_y * -f2).exp() * &self.x;
        let mw = &self.ad_y * &w;
        let mmw = &self.ad_y * &mw;
        [w, mw, mmw]
    }
}

impl SphereFamily for ExponentialFamily {
    fn algebra(&self) -> &LieAlgebra<f64> {
        &self.algebra
    }

    fn a(&self, t: f64, e: f64, u: f64) -> DVector<f64> {
        let (p, q) = (self.f1.jet(t, e, u), self.f2.jet(t, e, u));
        let [w, _, _] = self.rotated(q[0][0][0]);
        w * p[0][0][1] + &self.y * q[0][0][1]
    }

    fn jet(&self, t: f64, e: f64, u: f64) -> BetaJet {
        // p[k][j][i] = ∂_u^k ∂_ε^j ∂_t^i f₁, likewise q for f₂
        let (p, q) = (self.f1.jet(t, e, u), self.f2.jet(t, e, u));
        let [w, mw, mmw] = self.rotated(q[0][0][0]);
        let y = &self.y;
        let b = &w * p[0][1][0] + y * q[0][1][0];
        let b_t = &w * p[0][1][1] - &mw * (p[0][1][0] * q[0][0][1]) + y * q[0][1][1];
        let b_u = &w * p[1][1][0] - &mw * (p[0][1][0] * q[1][0][0]) + y * q[1][1][0];
        let b_tu = &w * p[1][1][1]
            - &mw * (p[0][1][1] * q[1][0][0] + p[1][1][0] * q[0][0][1] + p[0][1][0] * q[1][0][1])
            + &mmw * (p[0][1][0] * q[0][0][1] * q[1][0][0])
            + y * q[1][1][1];
        BetaJet { b, b_t, b_u, b_tu }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{abelian, heisenberg, so3};

    fn fd_check(fam: &ExponentialFamily) {
        let (t, e, u, h) = (0.37, 0.61, 0.4, 1e-4);
        let j = fam.jet(t, e, u);
        let d = |f: &dyn Fn(f64) -> DVector<f64>| (f(h) - f(-h)) / (2.0 * h);
        let bt = d(&|s| fam.jet(t + s, e, u).b);
        let bu = d(&|s| fam.jet(t, e, u + s).b);
        let btu = d(&|s| fam.jet(t, e, u + s).b_t);
        assert!((bt - &j.b_t).amax() < 1e-6);
        assert!((bu - &j.b_u).amax() < 1e-6);
        assert!((btu - &j.b_tu).amax() < 1e-6);
        // morphism: ∂_ε a − ∂_t b = [a, b]
        let st = Structure::new(fam.algebra());
        let ae = d(&|s| fam.a(t, e + s, u));
        let r = ae - &j.b_t - st.bracket(&fam.a(t, e, u), &j.b);
        assert!(r.amax() < 1e-6, "{}", r.amax());
    }

    #[test]
    fn jets_match_finite_differences() {
        for seed in 0..4 {
            fd_check(&ExponentialFamily::random(so3().to_f64(), seed, true));
            fd_check(&ExponentialFamily::random(heisenberg().to_f64(), seed, false));
        }
    }

    #[test]
    fn generated_spheres_satisfy_the_lemma() {
        for (seed, alg) in [(1, so3()), (2, heisenberg())] {
            let fam = ExponentialFamily::random(alg.to_f64(), seed, true);
            let s = fam.sphere(0.3, 64, 64).unwrap();
            let r = sphere_theta(&s, &fam, 0.3, 256).unwrap();
            assert!(r.boundary_residual < 1e-12, "{}", r.boundary_residual);
            assert!(r.pde_residual < 1e-9, "{}", r.pde_residual);
            assert!(r.alpha_defect < 1e-8, "{}", r.alpha_defect);
        }
    }

    #[test]
    fn zero_b_gives_zero_theta() {
        let flat = Profile { c: 0.0, amp: (0.0, 0.0), t_poly: vec![1.0], e_poly: vec![1.0], pinned: true };
        let alg = so3().to_f64();
        let fam = ExponentialFamily::new(alg, DVector::from_vec(vec![1.0, 0.0, 0.0]), DVector::from_vec(vec![0.0, 1.0, 0.0]), flat.clone(), flat).unwrap();
        let s = fam.sphere(0.5, 16, 16).unwrap();
        assert_eq!(sphere_theta(&s, &fam, 0.5, 64).unwrap().theta.max_abs(), 0.0);
    }

    #[test]
    fn abelian_theta_is_an_integral() {
        let alg = abelian(2).to_f64();
        let fam = ExponentialFamily::random(alg, 9, true);
        let s = fam.sphere(0.2, 16, 32).unwrap();
        let r = sphere_theta(&s, &fam, 0.2, 256).unwrap();
        // θ(t, ε) = ∫₀^ε ∂_u b
        let (i, j) = (5, 20);
        let (t, e) = (5.0 / 16.0, 20.0 / 32.0);
        let pts: Vec<_> = (0..=64).map(|k| fam.jet(t, e * k as f64 / 64.0, 0.2).b_u).collect();
        let exact = crate::ode::simpson(&pts) * e;
        assert!((r.theta.get(i, j) - exact).amax() < 1e-10);
    }
}
