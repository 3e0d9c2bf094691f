//! Execution of metaplectic programs on sampled functions of one or two
//! variables, together with the exact adjoint of each discrete step.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft::{interpolation_matrix, Shifter};
use super::grid::{Axis, DiscreteSignal};
use super::tfgrid::TfGrid;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::program::{GeneratorStep, MetaplecticProgram};

/// Pivoted factorization E = P·L·D·U of a 2×2 matrix.
#[derive(Clone, Copy, Debug)]
struct Ldu {
    swap: bool,
    l: f64,
    d: [f64; 2],
    u: f64,
}

fn ldu(e: &Mat) -> Result<Ldu> {
    let swap = e[(1, 0)].abs() > e[(0, 0)].abs();
    let (r0, r1) = if swap { (1, 0) } else { (0, 1) };
    let (a, b, c, d) = (e[(r0, 0)], e[(r0, 1)], e[(r1, 0)], e[(r1, 1)]);
    if a == 0.0 {
        return Err(Error::Singular(0.0));
    }
    let d2 = d - c * b / a;
    if d2 == 0.0 {
        return Err(Error::Singular(0.0));
    }
    Ok(Ldu { swap, l: c / a, d: [a, d2], u: b / a })
}

/// Shift each line along `axis` by `coef` times the coordinate of the other axis.
fn shear(f: &mut TfGrid, axis: usize, coef: f64) {
    if coef == 0.0 {
        return;
    }
    let period = f.axes[axis].period();
    let other = f.axes[1 - axis];
    f.for_each_line(axis, |k, line| {
        let s = coef * other.coord(k);
        let sh = Shifter::new(line, period);
        sh.shift_into(s, line);
    });
}

/// Replace samples along `axis` by h(a·x), or by its adjoint map.
fn scale_axis(f: &mut TfGrid, axis: usize, a: f64, adjoint: bool) {
    if a == 1.0 {
        return;
    }
    let ax = f.axes[axis];
    let n = ax.n;
    if a == -1.0 {
        f.for_each_line(axis, |_, line| {
            let src = line.to_vec();
            for (i, v) in line.iter_mut().enumerate() {
                *v = src[(n - i) % n];
            }
        });
        return;
    }
    let pts: Vec<f64> = ax.coords().iter().map(|x| a * x).collect();
    let s = interpolation_matrix(&pts, n, ax.step);
    f.for_each_line(axis, |_, line| {
        let src = line.to_vec();
        for (i, v) in line.iter_mut().enumerate() {
            *v = if adjoint {
                (0..n).map(|j| s[j * n + i].conj() * src[j]).sum()
            } else {
                (0..n).map(|j| s[i * n + j] * src[j]).sum()
            };
        }
    });
}

fn coords(f: &TfGrid, dims: usize, i: usize, j: usize) -> [f64; 2] {
    if dims == 1 {
        [f.axes[0].coord(i), 0.0]
    } else {
        [f.axes[0].coord(i), f.axes[1].coord(j)]
    }
}

fn quad(c: &Mat, z: [f64; 2], dims: usize) -> f64 {
    if dims == 1 {
        c[(0, 0)] * z[0] * z[0]
    } else {
        c[(0, 0)] * z[0] * z[0] + (c[(0, 1)] + c[(1, 0)]) * z[0] * z[1] + c[(1, 1)] * z[1] * z[1]
    }
}

fn multiply_chirp(f: &mut TfGrid, dims: usize, c: &Mat, sign: f64) {
    let cols = f.cols();
    for i in 0..f.rows() {
        for j in 0..cols {
            let z = coords(f, dims, i, j);
            f.values[i * cols + j] *= Complex64::from_polar(1.0, sign * PI * quad(c, z, dims));
        }
    }
}

fn fourier(f: &mut TfGrid, dims: usize, axes: &[usize], inverse: bool) {
    for &a in axes {
        if a < dims {
            f.fourier_axis(a, inverse);
        }
    }
}

fn apply_step(f: &mut TfGrid, dims: usize, step: &GeneratorStep, adjoint: bool) -> Result<()> {
    match step {
        GeneratorStep::FourierFull => fourier(f, dims, &[0, 1], adjoint),
        GeneratorStep::FourierPartial2 => {
            if dims != 2 {
                return Err(Error::Dimension("partial Fourier transform needs two variables".into()));
            }
            fourier(f, dims, &[1], adjoint)
        }
        GeneratorStep::ChirpMul { c } => multiply_chirp(f, dims, c, if adjoint { -1.0 } else { 1.0 }),
        GeneratorStep::ChirpConv { c } => {
            let axes = f.axes;
            fourier(f, dims, &[0, 1], false);
            multiply_chirp(f, dims, c, if adjoint { 1.0 } else { -1.0 });
            fourier(f, dims, &[0, 1], true);
            f.axes = axes;
        }
        GeneratorStep::ScalarPhase { re, im } => {
            let c = Complex64::new(*re, *im);
            let c = if adjoint { c.conj() } else { c };
            f.values.iter_mut().for_each(|v| *v *= c);
        }
        GeneratorStep::Flip => {
            for a in 0..dims {
                scale_axis(f, a, -1.0, false);
            }
        }
        GeneratorStep::LinearChange { e } => linear_change(f, dims, e, adjoint)?,
    }
    Ok(())
}

/// F ↦ |det E|^{1/2} F(E·) (or its adjoint).
fn linear_change(f: &mut TfGrid, dims: usize, e: &Mat, adjoint: bool) -> Result<()> {
    let det = e.determinant();
    if det.abs() <= 1e-14 {
        return Err(Error::Singular(det.abs()));
    }
    let amp = det.abs().sqrt();
    if dims == 1 {
        scale_axis(f, 0, e[(0, 0)], adjoint);
    } else {
        let p = ldu(e)?;
        if !adjoint {
            if p.swap {
                *f = f.transpose();
            }
            shear(f, 1, p.l);
            scale_axis(f, 0, p.d[0], false);
            scale_axis(f, 1, p.d[1], false);
            shear(f, 0, p.u);
        } else {
            shear(f, 0, -p.u);
            scale_axis(f, 1, p.d[1], true);
            scale_axis(f, 0, p.d[0], true);
            shear(f, 1, -p.l);
            if p.swap {
                *f = f.transpose();
            }
        }
    }
    f.values.iter_mut().for_each(|v| *v *= amp);
    Ok(())
}

fn check_dims(p: &MetaplecticProgram, f: &TfGrid) -> Result<usize> {
    match p.n {
        1 if f.cols() == 1 => Ok(1),
        2 if f.cols() > 1 => Ok(2),
        1 | 2 => Err(Error::Dimension(format!(
            "program acts on {} variable(s) but the array is {}x{}",
            p.n,
            f.rows(),
            f.cols()
        ))),
        n => Err(Error::Dimension(format!("execution is implemented for n <= 2, got n = {n}"))),
    }
}

/// Applies the program (steps in order, then the amplitude) to sampled data.
pub fn execute_program(p: &MetaplecticProgram, f: &TfGrid) -> Result<TfGrid> {
    let dims = check_dims(p, f)?;
    for s in &p.steps {
        s.validate(p.n, 1e-12)?;
    }
    let mut out = f.clone();
    for s in &p.steps {
        apply_step(&mut out, dims, s, false)?;
    }
    if p.amplitude != 1.0 {
        out.values.iter_mut().for_each(|v| *v *= p.amplitude);
    }
    Ok(out)
}

/// Adjoint of [`execute_program`] with respect to the lattice inner products.
/// `g` must live on the output lattice of the program.
pub fn execute_adjoint(p: &MetaplecticProgram, g: &TfGrid) -> Result<TfGrid> {
    let dims = check_dims(p, g)?;
    let mut out = g.clone();
    if p.amplitude != 1.0 {
        out.values.iter_mut().for_each(|v| *v *= p.amplitude);
    }
    for s in p.steps.iter().rev() {
        apply_step(&mut out, dims, s, true)?;
    }
    Ok(out)
}

/// Wraps a signal as a one-variable array for program execution.
pub fn signal_field(f: &DiscreteSignal) -> TfGrid {
    TfGrid::new([f.grid.axis(), Axis::new(1, 1.0)], f.values.clone()).expect("sizes agree")
}

/// Applies a one-variable program to a signal; the result carries its own lattice.
pub fn execute_on_signal(p: &MetaplecticProgram, f: &DiscreteSignal) -> Result<TfGrid> {
    execute_program(p, &signal_field(f))
}

/// W_A(f, g) = Â(f ⊗ ḡ) for a two-variable program.
pub fn metaplectic_wigner(p: &MetaplecticProgram, f: &DiscreteSignal, g: &DiscreteSignal) -> Result<TfGrid> {
    Ok(execute_program(p, &TfGrid::tensor(f, g)?)?.labeled("metaplectic"))
}

/// W_A(f, φ) · conj(W_B(g, ψ)).
pub fn metaplectic_spectrogram(
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    phi: &DiscreteSignal,
    psi: &DiscreteSignal,
    pa: &MetaplecticProgram,
    pb: &MetaplecticProgram,
) -> Result<TfGrid> {
    let a = metaplectic_wigner(pa, f, phi)?;
    let b = metaplectic_wigner(pb, g, psi)?;
    Ok(a.zip_with(&b, |x, y| x * y.conj())?.labeled("metaspec"))
}
