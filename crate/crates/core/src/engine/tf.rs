//! Time-frequency representations on the signal lattice.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft::{interpolation_matrix, CenteredFft, Shifter};
use super::grid::{DiscreteSignal, Grid1D};
use super::tfgrid::TfGrid;
use crate::classify::WindowSpec;
use crate::error::{Error, Result};
use crate::kernels::cohen_multiplier;
use crate::linalg::Mat;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn tf_axes(grid: &Grid1D) -> [super::grid::Axis; 2] {
    [grid.axis(), grid.freq_axis()]
}

/// Given lag columns F[m][n] = f-part and G[m][n] = g-part at lag t_m,
/// returns Δ Σ_m F conj(G) e^{−2πi t_m ξ_k} laid out as [n][k].
fn lag_transform(grid: &Grid1D, fcols: &[Vec<Complex64>], gcols: &[Vec<Complex64>]) -> TfGrid {
    let n = grid.n;
    let fft = CenteredFft::new(n);
    let dx = grid.dx();
    let mut out = TfGrid::zeros(tf_axes(grid));
    let mut line = vec![ZERO; n];
    for i in 0..n {
        for m in 0..n {
            line[m] = fcols[m][i] * gcols[m][i].conj();
        }
        fft.forward(&mut line);
        for k in 0..n {
            out.values[i * n + k] = line[k] * dx;
        }
    }
    out
}

/// V_g f(x, ξ) = ∫ f(t) conj(g(t − x)) e^{−2πitξ} dt with the window wrapped periodically.
pub fn stft(f: &DiscreteSignal, g: &DiscreteSignal) -> Result<TfGrid> {
    f.same_grid(g)?;
    let n = f.grid.n;
    let fft = CenteredFft::new(n);
    let dx = f.grid.dx();
    let mut out = TfGrid::zeros(tf_axes(&f.grid));
    let mut line = vec![ZERO; n];
    for i in 0..n {
        for m in 0..n {
            line[m] = f.values[m] * g.values[(m + n + n / 2 - i) % n].conj();
        }
        fft.forward(&mut line);
        for k in 0..n {
            out.values[i * n + k] = line[k] * dx;
        }
    }
    Ok(out.labeled("stft"))
}

/// STFT with a window given as a function, evaluated at the exact (unwrapped) offsets t − x.
pub fn stft_with(f: &DiscreteSignal, window: &dyn Fn(f64) -> Complex64) -> TfGrid {
    let grid = f.grid;
    let n = grid.n;
    let fft = CenteredFft::new(n);
    let dx = grid.dx();
    let xs = grid.xs();
    let mut out = TfGrid::zeros(tf_axes(&grid));
    let mut line = vec![ZERO; n];
    for i in 0..n {
        for m in 0..n {
            line[m] = f.values[m] * window(xs[m] - xs[i]).conj();
        }
        fft.forward(&mut line);
        for k in 0..n {
            out.values[i * n + k] = line[k] * dx;
        }
    }
    out.labeled("stft")
}

/// Columns h(x_n + c·t_m) for every lag t_m, by band-limited periodic shifts.
fn lag_shifts(h: &DiscreteSignal, c: f64) -> Vec<Vec<Complex64>> {
    let grid = h.grid;
    let sh = Shifter::new(&h.values, grid.t);
    (0..grid.n).map(|m| sh.shift(c * grid.x(m))).collect()
}

/// W(f, g)(x, ξ) = ∫ f(x + t/2) conj(g(x − t/2)) e^{−2πitξ} dt on the signal lattice,
/// using exact half-sample shifts.
pub fn wigner(f: &DiscreteSignal, g: &DiscreteSignal) -> Result<TfGrid> {
    f.same_grid(g)?;
    let grid = f.grid;
    let n = grid.n;
    let half = grid.dx() / 2.0;
    let f_half = Shifter::new(&f.values, grid.t).shift(half);
    let g_half = Shifter::new(&g.values, grid.t).shift(-half);
    let wrap = |i: isize| i.rem_euclid(n as isize) as usize;
    let mut fcols = Vec::with_capacity(n);
    let mut gcols = Vec::with_capacity(n);
    for m in 0..n {
        let r = m as isize - (n / 2) as isize; // t_m = r Δ
        let (fs, gs, s) = if r.rem_euclid(2) == 0 {
            (&f.values, &g.values, r / 2)
        } else {
            (&f_half, &g_half, (r - 1).div_euclid(2))
        };
        // odd r: x + rΔ/2 = x + sΔ + Δ/2 and x − rΔ/2 = x − sΔ − Δ/2
        fcols.push((0..n).map(|i| fs[wrap(i as isize + s)]).collect::<Vec<_>>());
        gcols.push((0..n).map(|i| gs[wrap(i as isize - s)]).collect::<Vec<_>>());
    }
    Ok(lag_transform(&grid, &fcols, &gcols).labeled("wigner"))
}

/// W_τ(f, g)(x, ξ) = ∫ f(x + τt) conj(g(x − (1 − τ)t)) e^{−2πitξ} dt.
pub fn tau_wigner(f: &DiscreteSignal, g: &DiscreteSignal, tau: f64) -> Result<TfGrid> {
    f.same_grid(g)?;
    if !tau.is_finite() {
        return Err(Error::InvalidParameter("tau must be finite".into()));
    }
    let fcols = lag_shifts(f, tau);
    let gcols = lag_shifts(g, tau - 1.0);
    Ok(lag_transform(&f.grid, &fcols, &gcols).labeled("tau").with_param("tau", tau))
}

/// Samples of h at A·x_n + s for all n, by trigonometric interpolation.
fn affine_samples(h: &DiscreteSignal, a: f64, shifts: &[f64]) -> Vec<Vec<Complex64>> {
    let grid = h.grid;
    let n = grid.n;
    let xs = grid.xs();
    if a == 1.0 || a == -1.0 {
        let base = if a == 1.0 { h.clone() } else { h.flip() };
        let sh = Shifter::new(&base.values, grid.t);
        // h(−x + s) = flip(h)(x − s)
        return shifts.iter().map(|&s| sh.shift(a * s)).collect();
    }
    shifts
        .iter()
        .map(|&s| {
            let pts: Vec<f64> = xs.iter().map(|&x| a * x + s).collect();
            let m = interpolation_matrix(&pts, n, grid.dx());
            (0..n).map(|i| (0..n).map(|j| m[i * n + j] * h.values[j]).sum()).collect()
        })
        .collect()
}

/// B_A(f, g)(x, ξ) = ∫ f(A11x + A12y) conj(g(A21x + A22y)) e^{−2πiyξ} dy.
pub fn ba_distribution(f: &DiscreteSignal, g: &DiscreteSignal, a: &Mat) -> Result<TfGrid> {
    f.same_grid(g)?;
    if a.nrows() != 2 || a.ncols() != 2 {
        return Err(Error::Dimension("the engine supports 2x2 matrices (d = 1)".into()));
    }
    let det = a.determinant();
    if det.abs() <= 1e-12 {
        return Err(Error::Singular(det.abs()));
    }
    let ys = f.grid.xs();
    let fshift: Vec<f64> = ys.iter().map(|y| a[(0, 1)] * y).collect();
    let gshift: Vec<f64> = ys.iter().map(|y| a[(1, 1)] * y).collect();
    let fcols = affine_samples(f, a[(0, 0)], &fshift);
    let gcols = affine_samples(g, a[(1, 0)], &gshift);
    Ok(lag_transform(&f.grid, &fcols, &gcols).labeled("ba"))
}

/// W ∗ ℱ⁻¹(e^{−iπM_Aζ·ζ}) computed as a Fourier multiplier.
pub fn cohen_convolve(w: &TfGrid, m_a: &Mat) -> Result<TfGrid> {
    if m_a.nrows() != 2 || m_a.ncols() != 2 {
        return Err(Error::Dimension("the engine supports 2x2 M_A (d = 1)".into()));
    }
    let mult = cohen_multiplier(m_a)?;
    let mut spec = w.fourier2();
    let (wa, ea) = (spec.axes[0], spec.axes[1]);
    let c = spec.cols();
    for i in 0..spec.rows() {
        let om = wa.coord(i);
        for j in 0..c {
            spec.values[i * c + j] *= mult.eval2(om, ea.coord(j));
        }
    }
    let mut out = spec.inverse_fourier2();
    out.axes = w.axes;
    out.label = "cohen".into();
    Ok(out)
}

/// V_φ f · conj(V_ψ g).
pub fn generalized_spectrogram(
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    phi: &DiscreteSignal,
    psi: &DiscreteSignal,
) -> Result<TfGrid> {
    let a = stft(f, phi)?;
    let b = stft(g, psi)?;
    Ok(a.zip_with(&b, |x, y| x * y.conj())?.labeled("genspec"))
}

/// Same as [`generalized_spectrogram`] with function-valued windows evaluated off-lattice.
pub fn generalized_spectrogram_with(
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    phi: &dyn Fn(f64) -> Complex64,
    psi: &dyn Fn(f64) -> Complex64,
) -> Result<TfGrid> {
    f.same_grid(g)?;
    let a = stft_with(f, phi);
    let b = stft_with(g, psi);
    Ok(a.zip_with(&b, |x, y| x * y.conj())?.labeled("genspec"))
}

/// Samples a window spec on the grid; deltas become normalized Gaussians of width eps.
pub fn realize_window(w: &WindowSpec, grid: &Grid1D, eps: f64) -> Result<DiscreteSignal> {
    if w.dim() != 1 {
        return Err(Error::Dimension("windows are realized for d = 1 only".into()));
    }
    if !w.delta_set.is_empty() && !(eps > 0.0) {
        return Err(Error::InvalidParameter("a positive mollifier width is required".into()));
    }
    Ok(DiscreteSignal::from_fn(*grid, |x| w.eval_mollified(&[x], eps)))
}

/// e^{−πa(x − c)²} e^{2πiωx}: the building block of the test signals.
pub fn gaussian(grid: &Grid1D, a: f64, c: f64, omega: f64) -> DiscreteSignal {
    DiscreteSignal::from_fn(*grid, |x| Complex64::from_polar((-PI * a * (x - c).powi(2)).exp(), 2.0 * PI * omega * x))
}
