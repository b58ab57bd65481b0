use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{shape, Result};
use crate::liealg::LieAlgebra;
use crate::ode::{simpson, Sampled};

/// A path `a : [0, 1] → A` sampled at the uniform nodes `t_i = i / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct APath {
    algebra: LieAlgebra<f64>,
    samples: Vec<DVector<f64>>,
}

impl APath {
    pub fn new(algebra: LieAlgebra<f64>, samples: Vec<DVector<f64>>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(shape("a path needs at least two samples (N >= 1)"));
        }
        if let Some(i) = samples.iter().position(|s| s.len() != algebra.dim()) {
            return Err(shape(format!("sample {i} has length {}, expected {}", samples[i].len(), algebra.dim())));
        }
        Ok(Self { algebra, samples })
    }

    pub fn from_fn(algebra: LieAlgebra<f64>, n: usize, f: impl Fn(f64) -> DVector<f64>) -> Result<Self> {
        let samples = (0..=n).map(|i| f(i as f64 / n as f64)).collect();
        Self::new(algebra, samples)
    }

    pub fn zero(algebra: LieAlgebra<f64>, n: usize) -> Self {
        let dim = algebra.dim();
        Self { algebra, samples: vec![DVector::zeros(dim); n.max(1) + 1] }
    }

    pub fn algebra(&self) -> &LieAlgebra<f64> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn intervals(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn samples(&self) -> &[DVector<f64>] {
        &self.samples
    }

    pub fn sampled(&self) -> Sampled<DVector<f64>> {
        Sampled::new(self.samples.clone())
    }

    /// Value at `t`, interpolated between nodes.
    pub fn eval(&self, t: f64) -> DVector<f64> {
        self.sampled().eval(t)
    }

    /// `∫₀¹ a(t) dt` by composite Simpson.
    pub fn integral(&self) -> DVector<f64> {
        simpson(&self.samples)
    }

    /// Largest sample-wise sup-norm distance; paths must share `N`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.samples.len() != other.samples.len() || self.dim() != other.dim() {
            return Err(shape("paths have different sample counts or dimensions"));
        }
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max))
    }

    /// The path with every sample replaced by `f(t_i, a(t_i))`.
    pub fn map_samples(&self, algebra: LieAlgebra<f64>, f: impl Fn(f64, &DVector<f64>) -> DVector<f64>) -> Result<Self> {
        let n = self.intervals() as f64;
        let samples = self.samples.iter().enumerate().map(|(i, s)| f(i as f64 / n, s)).collect();
        Self::new(algebra, samples)
    }
}

/// The flattening map `τ(t) = t − sin(2πt)/(2π)`, with `τ'(0) = τ'(1) = 0`.
pub fn flatten(t: f64) -> f64 {
    t - (2.0 * PI * t).sin() / (2.0 * PI)
}

/// `τ'(t) = 1 − cos(2πt)`
pub fn flatten_rate(t: f64) -> f64 {
    1.0 - (2.0 * PI * t).cos()
}

/// `a₁` followed by `a₂`, each half reparametrized by [`flatten`] so the
/// result vanishes at the junction. Sampled at `2 max(N₁, N₂)` intervals.
pub fn concatenate(a1: &APath, a2: &APath) -> Result<APath> {
    if a1.algebra != a2.algebra {
        return Err(shape("cannot concatenate paths in different algebras"));
    }
    let n = 2 * a1.intervals().max(a2.intervals());
    let (s1, s2) = (a1.sampled(), a2.sampled());
    let samples = (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let (s, half) = if 2 * i <= n { (2.0 * t, &s1) } else { (2.0 * t - 1.0, &s2) };
            half.eval(flatten(s)) * (2.0 * flatten_rate(s))
        })
        .collect();
    APath::new(a1.algebra.clone(), samples)
}

/// `t ↦ −a(1 − t)`
pub fn reverse(a: &APath) -> APath {
    let samples = a.samples.iter().rev().map(|s| -s).collect();
    APath { algebra: a.algebra.clone(), samples }
}
