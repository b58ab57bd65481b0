//! Fixed-step integration, interpolation of uniformly sampled data and
//! composite quadrature.

use nalgebra::{DMatrix, DVector};

/// Number of RK4 steps used when the caller does not say otherwise.
pub const DEFAULT_STEPS: usize = 512;

/// Absolute tolerance for quantities produced by ODE integration.
pub const DEFAULT_TOL_ODE: f64 = 1e-6;

/// State vectors the integrator can combine.
pub trait OdeState: Clone {
    /// `self + h * k`
    fn add_scaled(&self, k: &Self, h: f64) -> Self;
}

impl OdeState for DVector<f64> {
    fn add_scaled(&self, k: &Self, h: f64) -> Self {
        self + k * h
    }
}

impl OdeState for DMatrix<f64> {
    fn add_scaled(&self, k: &Self, h: f64) -> Self {
        self + k * h
    }
}

impl OdeState for Vec<f64> {
    fn add_scaled(&self, k: &Self, h: f64) -> Self {
        self.iter().zip(k).map(|(a, b)| a + h * b).collect()
    }
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<Y: OdeState>(f: &mut impl FnMut(f64, &Y) -> Y, t: f64, y: &Y, h: f64) -> Y {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &y.add_scaled(&k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &y.add_scaled(&k2, 0.5 * h));
    let k4 = f(t + h, &y.add_scaled(&k3, h));
    let sum = k1.add_scaled(&k2, 2.0).add_scaled(&k3, 2.0).add_scaled(&k4, 1.0);
    y.add_scaled(&sum, h / 6.0)
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` in `steps` equal steps.
/// `t1 < t0` integrates backwards.
pub fn rk4<Y: OdeState>(mut f: impl FnMut(f64, &Y) -> Y, y0: Y, t0: f64, t1: f64, steps: usize) -> Y {
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        y = rk4_step(&mut f, t0 + i as f64 * h, &y, h);
    }
    y
}

/// Like [`rk4`] on `[0, 1]`, but returns the state at every node `i / nodes`
/// (`nodes + 1` states), taking `substeps` RK4 steps per node interval.
pub fn rk4_nodes<Y: OdeState>(
    mut f: impl FnMut(f64, &Y) -> Y,
    y0: Y,
    nodes: usize,
    substeps: usize,
) -> Vec<Y> {
    let substeps = substeps.max(1);
    let h = 1.0 / (nodes * substeps) as f64;
    let mut out = Vec::with_capacity(nodes + 1);
    let mut y = y0;
    out.push(y.clone());
    for i in 0..nodes {
        for s in 0..substeps {
            let t = (i * substeps + s) as f64 * h;
            y = rk4_step(&mut f, t, &y, h);
        }
        out.push(y.clone());
    }
    out
}

/// Substeps per node interval so that at least `steps` steps cover `[0, 1]`.
pub fn substeps_for(nodes: usize, steps: usize) -> usize {
    steps.div_ceil(nodes.max(1)).max(1)
}

/// Values sampled at the uniform nodes `t_i = i / N` of `[0, 1]`.
///
/// Off-node values use Lagrange interpolation through the four nearest
/// nodes (fewer when `N < 3`), which keeps RK4 stage evaluations fourth-order
/// accurate.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled<T> {
    values: Vec<T>,
}

impl<T: OdeState> Sampled<T> {
    pub fn new(values: Vec<T>) -> Self {
        assert!(values.len() >= 2, "need at least two samples");
        Self { values }
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn node(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn eval(&self, t: f64) -> T {
        let n = self.intervals();
        let x = t.clamp(0.0, 1.0) * n as f64;
        let nearest = x.round();
        if (x - nearest).abs() < 1e-12 {
            return self.values[nearest as usize].clone();
        }
        let width = (n + 1).min(4);
        let left = (x.floor() as isize - 1).clamp(0, (n + 1 - width) as isize) as usize;
        let nodes: Vec<usize> = (left..left + width).collect();
        let mut acc: Option<T> = None;
        for &j in &nodes {
            let w = nodes
                .iter()
                .filter(|&&m| m != j)
                .map(|&m| (x - m as f64) / (j as f64 - m as f64))
                .product::<f64>();
            acc = Some(match acc {
                None => scaled(&self.values[j], w),
                Some(a) => a.add_scaled(&self.values[j], w),
            });
        }
        acc.expect("at least two nodes")
    }
}

fn scaled<T: OdeState>(v: &T, w: f64) -> T {
    // v * w == v + (w - 1) v
    v.add_scaled(v, w - 1.0)
}

/// Composite Simpson weights on `N + 1` uniform nodes of an interval of
/// length `len`; falls back to Simpson 3/8 on the last three intervals when
/// `N` is odd, and to the trapezoid rule for `N = 1`.
pub fn simpson_weights(n: usize, len: f64) -> Vec<f64> {
    assert!(n >= 1);
    let h = len / n as f64;
    let mut w = vec![0.0; n + 1];
    if n == 1 {
        w[0] = h / 2.0;
        w[1] = h / 2.0;
        return w;
    }
    let (simpson_end, tail) = if n % 2 == 0 { (n, false) } else { (n - 3, true) };
    let mut i = 0;
    while i + 2 <= simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if tail {
        let s = n - 3;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

/// Integral over `[0, 1]` of uniformly sampled vectors.
pub fn simpson(values: &[DVector<f64>]) -> DVector<f64> {
    let w = simpson_weights(values.len() - 1, 1.0);
    values.iter().zip(&w).fold(DVector::zeros(values[0].len()), |acc, (v, &wi)| acc + v * wi)
}

/// Cumulative integrals `∫_0^{t_i}` at every node, fourth-order accurate at
/// each node (Simpson on pairs, with a 3/8 closing panel for odd nodes).
pub fn cumulative_simpson(values: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let n = values.len() - 1;
    let h = 1.0 / n as f64;
    let dim = values[0].len();
    let mut out = Vec::with_capacity(n + 1);
    out.push(DVector::zeros(dim));
    for i in 1..=n {
        let val = if i == 1 {
            // cubic through nodes 0..3 integrated over the first interval
            if n >= 3 {
                (&values[0] * 9.0 + &values[1] * 19.0 - &values[2] * 5.0 + &values[3]) * (h / 24.0)
            } else {
                (&values[0] + &values[1]) * (h / 2.0)
            }
        } else if i % 2 == 0 {
            &out[i - 2] + (&values[i - 2] + &values[i - 1] * 4.0 + &values[i]) * (h / 3.0)
        } else {
            &out[i - 3]
                + (&values[i - 3] + &values[i - 2] * 3.0 + &values[i - 1] * 3.0 + &values[i]) * (3.0 * h / 8.0)
        };
        out.push(val);
    }
    out
}

/// Fourth-order finite difference derivative of uniformly spaced samples
/// (spacing `h`): central in the interior, one-sided near the ends.
pub fn derivative_4th(values: &[DVector<f64>], h: f64) -> Vec<DVector<f64>> {
    assert!(values.len() >= 5, "fourth-order stencil needs five samples");
    derivative(values, h, 5)
}

/// Finite-difference weights for the first derivative at `x0` from nodes `xs`.
pub fn fd_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // Fornberg's recursion, keeping orders 0 and 1
    let mut c = vec![[0.0_f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    for i in 1..n {
        let mut c2 = 1.0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                c[i][1] = c1 * (c[i - 1][0] - (xs[i - 1] - x0) * c[i - 1][1]) / c2;
                c[i][0] = -c1 * (xs[i - 1] - x0) * c[i - 1][0] / c2;
            }
            c[j][1] = ((xs[i] - x0) * c[j][1] - c[j][0]) / c3;
            c[j][0] = (xs[i] - x0) * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// First derivative of uniformly spaced samples from `width`-point stencils,
/// centered in the interior and shifted inwards near the ends.
pub fn derivative(values: &[DVector<f64>], h: f64, width: usize) -> Vec<DVector<f64>> {
    let n = values.len();
    assert!(width >= 2 && n >= width, "stencil wider than the samples");
    let half = width / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half).min(n - width);
            let xs: Vec<f64> = (lo..lo + width).map(|k| k as f64 - i as f64).collect();
            fd_weights(0.0, &xs)
                .iter()
                .enumerate()
                .fold(DVector::zeros(values[0].len()), |acc, (k, w)| acc + &values[lo + k] * *w)
                / h
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential_growth() {
        let y = rk4(|_, y: &Vec<f64>| y.clone(), vec![1.0], 0.0, 1.0, 64);
        assert!((y[0] - 1f64.exp()).abs() < 1e-8);
        let back = rk4(|_, y: &Vec<f64>| y.clone(), y, 1.0, 0.0, 64);
        assert!((back[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |n| (rk4(|t, _y: &Vec<f64>| vec![t.cos()], vec![0.0], 0.0, 1.0, n)[0] - 1f64.sin()).abs();
        let f = |t: f64, y: &Vec<f64>| vec![-y[0] * t];
        let exact = (-0.5f64).exp();
        let e1 = (rk4(f, vec![1.0], 0.0, 1.0, 8)[0] - exact).abs();
        let e2 = (rk4(f, vec![1.0], 0.0, 1.0, 16)[0] - exact).abs();
        assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
        assert!(err(64) < 1e-9);
    }

    #[test]
    fn interpolation_is_cubic_exact() {
        let s = Sampled::new((0..=10).map(|i| {
            let t = i as f64 / 10.0;
            DVector::from_vec(vec![t * t * t - 2.0 * t])
        }).collect());
        for &t in &[0.03, 0.47, 0.951] {
            assert!((s.eval(t)[0] - (t * t * t - 2.0 * t)).abs() < 1e-13);
        }
        let lin = Sampled::new(vec![DVector::from_vec(vec![0.0]), DVector::from_vec(vec![2.0])]);
        assert!((lin.eval(0.25)[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn simpson_rules_integrate_cubics() {
        for n in [1usize, 2, 3, 5, 8] {
            let vals: Vec<DVector<f64>> = (0..=n)
                .map(|i| DVector::from_vec(vec![(i as f64 / n as f64).powi(if n == 1 { 1 } else { 3 })]))
                .collect();
            let exact = if n == 1 { 0.5 } else { 0.25 };
            assert!((simpson(&vals)[0] - exact).abs() < 1e-14, "n = {n}");
        }
        let vals: Vec<DVector<f64>> = (0..=9).map(|i| DVector::from_vec(vec![(i as f64 / 9.0).powi(3)])).collect();
        let cum = cumulative_simpson(&vals);
        for (i, c) in cum.iter().enumerate() {
            let t = i as f64 / 9.0;
            assert!((c[0] - t.powi(4) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn wide_stencils_are_exact_on_polynomials() {
        let h = 0.125;
        let vals: Vec<DVector<f64>> = (0..=8).map(|i| DVector::from_vec(vec![(i as f64 * h).powi(6)])).collect();
        for (i, d) in derivative(&vals, h, 7).iter().enumerate() {
            let t = i as f64 * h;
            assert!((d[0] - 6.0 * t.powi(5)).abs() < 1e-11, "{i}");
        }
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fourth_order_derivative_exact_on_quartics() {
        let h = 0.1;
        let vals: Vec<DVector<f64>> = (0..8).map(|i| DVector::from_vec(vec![(i as f64 * h).powi(4)])).collect();
        let d = derivative_4th(&vals, h);
        for (i, v) in d.iter().enumerate() {
            let t = i as f64 * h;
            assert!((v[0] - 4.0 * t.powi(3)).abs() < 1e-10, "i = {i}");
        }
    }
}
