//! FFT helpers on centered lattices.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized centered DFT of length n (n divisible by 4):
/// X[k] = Σ_m h[m] e^{∓2πi(m − n/2)(k − n/2)/n}.
#[derive(Clone)]
pub struct CenteredFft {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl CenteredFft {
    pub fn new(n: usize) -> Self {
        assert!(n.is_multiple_of(4), "centered DFT needs n divisible by 4");
        let (fwd, inv) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(n), p.plan_fft_inverse(n))
        });
        CenteredFft { n, fwd, inv }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn alternate(buf: &mut [Complex64]) {
        for v in buf.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        Self::alternate(buf);
        self.fwd.process(buf);
        Self::alternate(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        Self::alternate(buf);
        self.inv.process(buf);
        Self::alternate(buf);
    }

    /// Plain (uncentered) transforms, used for periodic shifts.
    pub fn raw_forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    pub fn raw_inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
    }
}

/// Symmetric frequency index of FFT bin j: j for j < n/2, else j − n.
pub fn sym_index(j: usize, n: usize) -> f64 {
    if j < n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

/// Periodic band-limited shifter: evaluates x ↦ h(x + s) on the same lattice.
pub struct Shifter {
    fft: CenteredFft,
    spectrum: Vec<Complex64>,
    period: f64,
}

impl Shifter {
    pub fn new(values: &[Complex64], period: f64) -> Self {
        let fft = CenteredFft::new(values.len());
        let mut spectrum = values.to_vec();
        fft.raw_forward(&mut spectrum);
        let n = values.len() as f64;
        for v in spectrum.iter_mut() {
            *v /= n;
        }
        Shifter { fft, spectrum, period }
    }

    pub fn shift_into(&self, s: f64, out: &mut [Complex64]) {
        let n = self.spectrum.len();
        let w = 2.0 * PI * s / self.period;
        for (j, (o, c)) in out.iter_mut().zip(&self.spectrum).enumerate() {
            *o = c * Complex64::from_polar(1.0, w * sym_index(j, n));
        }
        self.fft.raw_inverse(out);
    }

    pub fn shift(&self, s: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.spectrum.len()];
        self.shift_into(s, &mut out);
        out
    }
}

pub fn shift_periodic(values: &[Complex64], period: f64, s: f64) -> Vec<Complex64> {
    Shifter::new(values, period).shift(s)
}

/// Periodic Dirichlet kernel: value at offset u of the trigonometric
/// interpolant through a unit sample at the origin (n points, period p).
pub fn dirichlet(u: f64, n: usize, p: f64) -> Complex64 {
    let theta = u / p;
    let s = (PI * theta).sin();
    if s.abs() < 1e-9 {
        let half = (n / 2) as i64;
        let sum: Complex64 = (-half..half).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 * theta)).sum();
        return sum / n as f64;
    }
    Complex64::from_polar((PI * n as f64 * theta).sin() / (s * n as f64), -PI * theta)
}

/// Matrix S with (S h)_i = trigonometric interpolant of h at `points[i]`.
/// Row-major, points.len() × n.
pub fn interpolation_matrix(points: &[f64], n: usize, step: f64) -> Vec<Complex64> {
    let p = n as f64 * step;
    let x0 = -((n / 2) as f64) * step;
    let mut out = Vec::with_capacity(points.len() * n);
    for &x in points {
        for j in 0..n {
            out.push(dirichlet(x - (x0 + j as f64 * step), n, p));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_dft_matches_definition() {
        let n = 16;
        let h: Vec<Complex64> = (0..n).map(|m| Complex64::new((m as f64).sin(), (m * m) as f64 * 0.01)).collect();
        let mut buf = h.clone();
        CenteredFft::new(n).forward(&mut buf);
        for k in 0..n {
            let direct: Complex64 = (0..n)
                .map(|m| {
                    let ph = -2.0 * PI * (m as f64 - 8.0) * (k as f64 - 8.0) / n as f64;
                    h[m] * Complex64::from_polar(1.0, ph)
                })
                .sum();
            assert!((direct - buf[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn shift_by_whole_samples_is_cyclic() {
        let n = 32;
        let h: Vec<Complex64> = (0..n).map(|m| Complex64::new(m as f64, -(m as f64))).collect();
        let out = shift_periodic(&h, n as f64, 3.0);
        for i in 0..n {
            assert!((out[i] - h[(i + 3) % n]).norm() < 1e-11);
        }
    }

    #[test]
    fn interpolation_reproduces_samples_and_trig_polynomials() {
        let n = 16;
        let step = 0.5;
        let p = n as f64 * step;
        let f = |x: f64| Complex64::from_polar(1.0, 2.0 * PI * 3.0 * x / p) + (2.0 * PI * x / p).cos();
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 - 8.0) * step).collect();
        let h: Vec<Complex64> = xs.iter().map(|&x| f(x)).collect();
        let pts = [0.13, -2.7, 3.99, xs[5]];
        let s = interpolation_matrix(&pts, n, step);
        for (i, &x) in pts.iter().enumerate() {
            let v: Complex64 = (0..n).map(|j| s[i * n + j] * h[j]).sum();
            assert!((v - f(x)).norm() < 1e-12, "{x}");
        }
    }
}
