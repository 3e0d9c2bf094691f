//! Pseudodifferential operators defined by duality against metaplectic Wigner
//! distributions, and Lp probes for the Wigner family.

use num_complex::Complex64;
use serde::Serialize;

use crate::classify::{conjugate_exponent, shift_invertibility_test, TOL_CLASSIFY};
use crate::engine::fft::{CenteredFft, Shifter};
use crate::engine::{execute_adjoint, gaussian, metaplectic_wigner, DiscreteSignal, Grid1D, TfGrid};
use crate::error::{Error, Result};
use crate::linalg::BlockMatrix4d;
use crate::program::MetaplecticProgram;

/// Symbols live on the same lattice as the time-frequency representations.
pub type SymbolGrid = TfGrid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_symbol(a: &SymbolGrid, grid: &Grid1D) -> Result<()> {
    let expect = [grid.axis(), grid.freq_axis()];
    if !(a.axes[0].same_as(&expect[0]) && a.axes[1].same_as(&expect[1])) {
        return Err(Error::GridMismatch(format!(
            "symbol lattice {:?} does not match the signal's time-frequency lattice {:?}",
            a.axes, expect
        )));
    }
    Ok(())
}

/// B[n][m] = Δξ Σ_k a[n][k] e^{2πi t_m ξ_k}, returned lag-major: out[m][n].
fn symbol_lags(a: &SymbolGrid, grid: &Grid1D) -> Vec<Vec<Complex64>> {
    let n = grid.n;
    let fft = CenteredFft::new(n);
    let mut out = vec![vec![ZERO; n]; n];
    let mut line = vec![ZERO; n];
    for i in 0..n {
        line.copy_from_slice(a.row(i));
        fft.inverse(&mut line);
        for m in 0..n {
            out[m][i] = line[m] * grid.dxi();
        }
    }
    out
}

/// Op_τ(a)f, the adjoint of g ↦ W_τ(g, f) applied to a.
pub fn op_tau(a: &SymbolGrid, f: &DiscreteSignal, tau: f64) -> Result<DiscreteSignal> {
    let grid = f.grid;
    check_symbol(a, &grid)?;
    let n = grid.n;
    let b = symbol_lags(a, &grid);
    let fsh = Shifter::new(&f.values, grid.t);
    let mut acc = vec![ZERO; n];
    let mut x = vec![ZERO; n];
    for m in 0..n {
        let t = grid.x(m);
        fsh.shift_into((tau - 1.0) * t, &mut x);
        for i in 0..n {
            x[i] *= b[m][i];
        }
        let back = Shifter::new(&x, grid.t).shift(-tau * t);
        for i in 0..n {
            acc[i] += back[i];
        }
    }
    let dx = grid.dx();
    DiscreteSignal::new(grid, acc.into_iter().map(|v| v * dx).collect())
}

/// Weyl quantization: the exact adjoint of g ↦ W(g, f) as computed by [`crate::engine::wigner`].
pub fn op_weyl(a: &SymbolGrid, f: &DiscreteSignal) -> Result<DiscreteSignal> {
    let grid = f.grid;
    check_symbol(a, &grid)?;
    let n = grid.n;
    let b = symbol_lags(a, &grid);
    let f_half = Shifter::new(&f.values, grid.t).shift(-grid.dx() / 2.0);
    let wrap = |i: isize| i.rem_euclid(n as isize) as usize;
    let mut y_even = vec![ZERO; n];
    let mut y_half = vec![ZERO; n];
    for m in 0..n {
        let r = m as isize - (n / 2) as isize;
        let (fs, s, y) = if r.rem_euclid(2) == 0 {
            (&f.values, r / 2, &mut y_even)
        } else {
            (&f_half, (r - 1).div_euclid(2), &mut y_half)
        };
        for i in 0..n {
            let xv = fs[wrap(i as isize - s)] * b[m][i];
            y[wrap(i as isize + s)] += xv;
        }
    }
    let y_half = Shifter::new(&y_half, grid.t).shift(-grid.dx() / 2.0);
    let dx = grid.dx();
    DiscreteSignal::new(grid, y_even.iter().zip(&y_half).map(|(a, b)| (a + b) * dx).collect())
}

/// Op_A(a)f defined through ⟨Op_A(a)f, g⟩ = ⟨a, W_A(g, f)⟩; `a` lives on the
/// output lattice of the program.
pub fn op_metaplectic(a: &SymbolGrid, f: &DiscreteSignal, p: &MetaplecticProgram) -> Result<DiscreteSignal> {
    if p.n != 2 {
        return Err(Error::Dimension("Op_A needs a program on two variables".into()));
    }
    let kernel = execute_adjoint(p, a)?;
    let ax = f.grid.axis();
    if !(kernel.axes[0].same_as(&ax) && kernel.axes[1].same_as(&ax)) {
        return Err(Error::GridMismatch(
            "symbol lattice is not the program's output lattice for this signal grid".into(),
        ));
    }
    let n = f.len();
    let dx = f.grid.dx();
    let values = (0..n)
        .map(|i| kernel.row(i).iter().zip(&f.values).map(|(k, v)| k * v).sum::<Complex64>() * dx)
        .collect();
    DiscreteSignal::new(f.grid, values)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub lambda: f64,
    pub ratio: f64,
    /// Ratio computed from the closed-form Gaussian norms of the windows.
    pub ratio_analytic_windows: f64,
    /// Largest relative deviation of a quadrature window norm from its closed form.
    pub window_norm_error: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: f64,
}

/// ‖e^{−πλx²}‖_r = (rλ)^{−1/(2r)}.
pub fn gaussian_lp_norm(lambda: f64, r: f64) -> f64 {
    if r.is_infinite() {
        1.0
    } else {
        (r * lambda).powf(-1.0 / (2.0 * r))
    }
}

/// Lattice resolving both e^{−πλx²} and e^{−πx²} and the shears of their tensor product.
pub fn probe_grid(lambda: f64) -> Grid1D {
    let reach = |l: f64| (30.0 / (std::f64::consts::PI * l)).sqrt();
    let extent = reach(lambda) + reach(1.0);
    let band = reach(1.0 / lambda) + reach(1.0);
    let t = 2.3 * extent;
    let n = ((2.2 * t * band).ceil() as usize).next_power_of_two().max(64);
    Grid1D { n, t }
}

/// R(λ) = ‖W_A(φ_λ, φ)‖_q / (‖φ_λ‖_{p'} ‖φ‖_p) for each λ.
pub fn lp_norm_probe(pa: &MetaplecticProgram, p: f64, q: f64, lambdas: &[f64]) -> Result<Vec<ProbeRow>> {
    let pc = conjugate_exponent(p)?;
    conjugate_exponent(q)?;
    let proj = pa.projection()?;
    let block = BlockMatrix4d::new(proj.into_matrix())?;
    let shift = shift_invertibility_test(&block, TOL_CLASSIFY)?;
    if !shift.is_shift_invertible {
        return Err(Error::Domain("the probe needs a shift-invertible distribution".into()));
    }
    lambdas
        .iter()
        .map(|&lambda| {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
            }
            let grid = probe_grid(lambda);
            let phi_l = gaussian(&grid, lambda, 0.0, 0.0);
            let phi = gaussian(&grid, 1.0, 0.0, 0.0);
            let w = metaplectic_wigner(pa, &phi_l, &phi)?;
            let wq = w.lp_norm(q);
            let num_l = phi_l.lp_norm(pc);
            let num_1 = phi.lp_norm(p);
            let an_l = gaussian_lp_norm(lambda, pc);
            let an_1 = gaussian_lp_norm(1.0, p);
            let err = ((num_l - an_l).abs() / an_l).max((num_1 - an_1).abs() / an_1);
            Ok(ProbeRow {
                lambda,
                ratio: wq / (num_l * num_1),
                ratio_analytic_windows: wq / (an_l * an_1),
                window_norm_error: err,
                n: grid.n,
                t: grid.t,
            })
        })
        .collect()
}

/// max R / min R over a sweep.
pub fn ratio_variation(rows: &[ProbeRow]) -> f64 {
    let max = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    max / min
}

/// λ = 2^k for k in lo..=hi.
pub fn dyadic_lambdas(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}
