use std::collections::BTreeMap;

use num_complex::Complex64;

use super::fft::CenteredFft;
use super::grid::{lp_norm, Axis, DiscreteSignal};
use crate::error::{Error, Result};

/// Complex values on a product lattice. Row index follows axes[0], column index axes[1].
#[derive(Clone, Debug, PartialEq)]
pub struct TfGrid {
    pub axes: [Axis; 2],
    pub values: Vec<Complex64>,
    pub label: String,
    pub params: BTreeMap<String, f64>,
}

impl TfGrid {
    pub fn new(axes: [Axis; 2], values: Vec<Complex64>) -> Result<Self> {
        if values.len() != axes[0].n * axes[1].n {
            return Err(Error::Dimension(format!(
                "{} values for a {}x{} lattice",
                values.len(),
                axes[0].n,
                axes[1].n
            )));
        }
        Ok(TfGrid { axes, values, label: String::new(), params: BTreeMap::new() })
    }

    pub fn zeros(axes: [Axis; 2]) -> Self {
        TfGrid::new(axes, vec![Complex64::new(0.0, 0.0); axes[0].n * axes[1].n]).expect("sizes agree")
    }

    pub fn from_fn(axes: [Axis; 2], f: impl Fn(f64, f64) -> Complex64) -> Self {
        let xs = axes[0].coords();
        let ys = axes[1].coords();
        let mut values = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                values.push(f(x, y));
            }
        }
        TfGrid { axes, values, label: String::new(), params: BTreeMap::new() }
    }

    /// f ⊗ conj(g) on the square lattice of the signal grid.
    pub fn tensor(f: &DiscreteSignal, g: &DiscreteSignal) -> Result<Self> {
        f.same_grid(g)?;
        let ax = f.grid.axis();
        let mut values = Vec::with_capacity(f.len() * g.len());
        for a in &f.values {
            for b in &g.values {
                values.push(a * b.conj());
            }
        }
        Ok(TfGrid { axes: [ax, ax], values, label: "tensor".into(), params: BTreeMap::new() })
    }

    pub fn labeled(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn with_param(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn rows(&self) -> usize {
        self.axes[0].n
    }

    pub fn cols(&self) -> usize {
        self.axes[1].n
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.cols() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let c = self.cols();
        self.values[i * c + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let c = self.cols();
        &self.values[i * c..(i + 1) * c]
    }

    pub fn cell(&self) -> f64 {
        self.axes[0].step * self.axes[1].step
    }

    pub fn same_lattice(&self, other: &TfGrid) -> bool {
        self.axes[0].same_as(&other.axes[0]) && self.axes[1].same_as(&other.axes[1])
    }

    pub(crate) fn check_lattice(&self, other: &TfGrid) -> Result<()> {
        if !self.same_lattice(other) {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.axes, other.axes)));
        }
        Ok(())
    }

    /// ⟨F, G⟩ = Δ₀Δ₁ Σ F conj(G).
    pub fn inner(&self, other: &TfGrid) -> Result<Complex64> {
        self.check_lattice(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.cell())
    }

    pub fn norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, p, self.cell())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> TfGrid {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    pub fn zip_with(&self, other: &TfGrid, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<TfGrid> {
        self.check_lattice(other)?;
        let mut out = self.clone();
        out.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a = f(*a, *b));
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> TfGrid {
        self.map(|v| v * c)
    }

    pub fn transpose(&self) -> TfGrid {
        let (r, c) = (self.rows(), self.cols());
        let mut values = vec![Complex64::new(0.0, 0.0); r * c];
        for i in 0..r {
            for j in 0..c {
                values[j * r + i] = self.values[i * c + j];
            }
        }
        TfGrid { axes: [self.axes[1], self.axes[0]], values, label: self.label.clone(), params: self.params.clone() }
    }

    /// Apply `f(line_index, line)` to every line along `axis` (0: columns vary the row index).
    pub fn for_each_line(&mut self, axis: usize, mut f: impl FnMut(usize, &mut [Complex64])) {
        let (r, c) = (self.rows(), self.cols());
        if axis == 1 {
            for i in 0..r {
                f(i, &mut self.values[i * c..(i + 1) * c]);
            }
        } else {
            let mut buf = vec![Complex64::new(0.0, 0.0); r];
            for j in 0..c {
                for i in 0..r {
                    buf[i] = self.values[i * c + j];
                }
                f(j, &mut buf);
                for i in 0..r {
                    self.values[i * c + j] = buf[i];
                }
            }
        }
    }

    /// Continuous Fourier transform along `axis` (e^{−2πi}), step h → 1/(n h).
    pub fn fourier_axis(&mut self, axis: usize, inverse: bool) {
        let ax = self.axes[axis];
        let fft = CenteredFft::new(ax.n);
        let h = ax.step;
        self.for_each_line(axis, |_, line| {
            if inverse {
                fft.inverse(line);
            } else {
                fft.forward(line);
            }
            line.iter_mut().for_each(|v| *v *= h);
        });
        self.axes[axis] = ax.dual();
    }

    /// Two-dimensional Fourier transform, returning values on the dual lattice.
    pub fn fourier2(&self) -> TfGrid {
        let mut out = self.clone();
        out.fourier_axis(0, false);
        out.fourier_axis(1, false);
        out
    }

    pub fn inverse_fourier2(&self) -> TfGrid {
        let mut out = self.clone();
        out.fourier_axis(0, true);
        out.fourier_axis(1, true);
        out
    }

    /// (i, j) ↦ (−i, −j) on the centered lattice.
    pub fn flip(&self) -> TfGrid {
        let (r, c) = (self.rows(), self.cols());
        let mut out = self.clone();
        for i in 0..r {
            for j in 0..c {
                out.values[i * c + j] = self.values[((r - i) % r) * c + (c - j) % c];
            }
        }
        out
    }
}

/// max |a − b| / max |b|.
pub fn max_rel_error(a: &TfGrid, b: &TfGrid) -> f64 {
    let diff = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    diff / b.max_abs().max(f64::MIN_POSITIVE)
}

/// ‖a − b‖₂ / ‖b‖₂.
pub fn rel_l2_error(a: &TfGrid, b: &TfGrid) -> f64 {
    let diff: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm_sqr()).sum();
    let base: f64 = b.values.iter().map(|y| y.norm_sqr()).sum();
    (diff / base.max(f64::MIN_POSITIVE)).sqrt()
}
