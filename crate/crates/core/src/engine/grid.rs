use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform centered lattice: n points (i − n/2)·step, period n·step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub n: usize,
    pub step: f64,
}

impl Axis {
    pub fn new(n: usize, step: f64) -> Self {
        Axis { n, step }
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.step
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    pub fn period(&self) -> f64 {
        self.n as f64 * self.step
    }

    /// Lattice of the Fourier variable.
    pub fn dual(&self) -> Axis {
        Axis { n: self.n, step: 1.0 / self.period() }
    }

    pub fn same_as(&self, other: &Axis) -> bool {
        self.n == other.n && (self.step - other.step).abs() <= 1e-12 * self.step.abs()
    }
}

/// N samples on [−T/2, T/2); frequencies k/T for k in [−N/2, N/2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: f64,
}

impl Grid1D {
    pub fn new(n: usize, t: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("N = {n} must be a power of two >= 8")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("T = {t} must be positive")));
        }
        Ok(Grid1D { n, t })
    }

    pub fn default_grid() -> Self {
        Grid1D { n: 256, t: 16.0 }
    }

    pub fn dx(&self) -> f64 {
        self.t / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        1.0 / self.t
    }

    pub fn x(&self, i: usize) -> f64 {
        self.axis().coord(i)
    }

    pub fn xi(&self, k: usize) -> f64 {
        self.freq_axis().coord(k)
    }

    pub fn axis(&self) -> Axis {
        Axis::new(self.n, self.dx())
    }

    pub fn freq_axis(&self) -> Axis {
        Axis::new(self.n, self.dxi())
    }

    pub fn xs(&self) -> Vec<f64> {
        self.axis().coords()
    }

    fn check_same(&self, other: &Grid1D) -> Result<()> {
        if self.n != other.n || (self.t - other.t).abs() > 1e-12 * self.t {
            return Err(Error::GridMismatch(format!(
                "(N={}, T={}) vs (N={}, T={})",
                self.n, self.t, other.n, other.t
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSignal {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
}

impl DiscreteSignal {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::Dimension(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("signal has non-finite samples".into()));
        }
        Ok(DiscreteSignal { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.xs().into_iter().map(f).collect();
        DiscreteSignal { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        DiscreteSignal { grid, values: vec![Complex64::new(0.0, 0.0); grid.n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ⟨f, g⟩ = Δx Σ f conj(g).
    pub fn inner(&self, other: &DiscreteSignal) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.dx())
    }

    pub fn norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, p, self.grid.dx())
    }

    /// x ↦ f(−x).
    pub fn flip(&self) -> DiscreteSignal {
        let n = self.len();
        let values = (0..n).map(|i| self.values[(n - i) % n]).collect();
        DiscreteSignal { grid: self.grid, values }
    }

    pub fn conj(&self) -> DiscreteSignal {
        DiscreteSignal { grid: self.grid, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn scale(&self, c: Complex64) -> DiscreteSignal {
        DiscreteSignal { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &DiscreteSignal) -> Result<DiscreteSignal> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(DiscreteSignal { grid: self.grid, values })
    }

    pub(crate) fn same_grid(&self, other: &DiscreteSignal) -> Result<()> {
        self.grid.check_same(&other.grid)
    }
}

/// Quadrature Lp norm with cell measure `w`; p = ∞ gives the max.
pub fn lp_norm(values: &[Complex64], p: f64, w: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let s: f64 = values.iter().map(|v| v.norm().powf(p)).sum();
    (s * w).powf(1.0 / p)
}
