//! Fourier transforms of (possibly degenerate) chirps and closed-form Cohen kernels.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, generalized_inverse, sym_eig, Mat};

/// amplitude · e^{iπQξ·ξ} · ∏_{j∈delta_set} δ((Σξ)_j).
#[derive(Clone, Debug, Serialize)]
pub struct ChirpDelta {
    pub amplitude: Complex64,
    #[serde(serialize_with = "rows")]
    pub chirp: Mat,
    /// Zero-based indices of the delta coordinates.
    pub delta_set: Vec<usize>,
    #[serde(serialize_with = "rows")]
    pub rotation: Mat,
}

fn rows<S: serde::Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    linalg::to_rows(m).serialize(s)
}

fn chirp_phase(q: &Mat, x: &[f64]) -> Complex64 {
    let v = DVector::from_column_slice(x);
    Complex64::from_polar(1.0, PI * (q * &v).dot(&v))
}

impl ChirpDelta {
    pub fn dim(&self) -> usize {
        self.chirp.nrows()
    }

    pub fn is_function(&self) -> bool {
        self.delta_set.is_empty()
    }

    /// Pointwise value; only defined when there are no delta factors.
    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if !self.is_function() {
            return Err(Error::Domain("a delta-carrying kernel has no pointwise value".into()));
        }
        Ok(self.amplitude * chirp_phase(&self.chirp, xi))
    }

    /// Value with every delta replaced by a normalized Gaussian of width eps.
    pub fn eval_mollified(&self, xi: &[f64], eps: f64) -> Complex64 {
        let v = DVector::from_column_slice(xi);
        let rv = &self.rotation * &v;
        let mut out = self.amplitude * chirp_phase(&self.chirp, xi);
        for &j in &self.delta_set {
            let u = rv[j] / eps;
            out *= (-PI * u * u).exp() / eps;
        }
        out
    }

    /// Exact pairing ∫ K(ξ) h(ξ) dξ against a smooth, rapidly decaying test
    /// function. The delta coordinates are integrated out analytically and the
    /// remaining ones by the trapezoid rule on [-half_width, half_width] with
    /// `points` nodes per axis (spectrally accurate for Gaussian-type h).
    pub fn pair(&self, h: &dyn Fn(&[f64]) -> Complex64, half_width: f64, points: usize) -> Complex64 {
        let n = self.dim();
        let free: Vec<usize> = (0..n).filter(|j| !self.delta_set.contains(j)).collect();
        let step = 2.0 * half_width / points as f64;
        let total = points.pow(free.len() as u32);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut u = vec![0.0; n];
        for idx in 0..total {
            let mut rem = idx;
            for &j in &free {
                u[j] = -half_width + (rem % points) as f64 * step;
                rem /= points;
            }
            for &j in &self.delta_set {
                u[j] = 0.0;
            }
            // ξ = Σᵀu; the delta factors pin the rotated delta coordinates at zero
            let xi: Vec<f64> = (self.rotation.transpose() * DVector::from_column_slice(&u)).iter().copied().collect();
            acc += chirp_phase(&self.chirp, &xi) * h(&xi);
        }
        self.amplitude * acc * step.powi(free.len() as i32)
    }
}

/// ℱ[e^{iπCx·x}] = s |pdet C|^{-1/2} e^{-iπC⁻ξ·ξ} δ_Z(Σξ).
pub fn fourier_of_chirp(c: &Mat) -> Result<ChirpDelta> {
    let eig = sym_eig(c, 1e-9 * linalg::frobenius(c).max(1.0))?;
    let mut phase = 0.0;
    let mut pdet = 1.0;
    for &l in &eig.lambdas {
        if l != 0.0 {
            phase += l.signum() * PI / 4.0;
            pdet *= l;
        }
    }
    let cinv = generalized_inverse(c);
    Ok(ChirpDelta {
        amplitude: Complex64::from_polar(pdet.abs().powf(-0.5), phase),
        chirp: -cinv,
        delta_set: eig.zero_set(),
        rotation: eig.sigma,
    })
}

/// σ_τ(x, ξ) = 2^d/|2τ−1|^d e^{2πi(2/(2τ−1))x·ξ}.
#[derive(Clone, Copy, Debug)]
pub struct TauKernel {
    pub tau: f64,
    pub d: usize,
}

pub fn tau_kernel(tau: f64, d: usize) -> Result<TauKernel> {
    if (2.0 * tau - 1.0).abs() <= 1e-12 {
        return Err(Error::InvalidParameter("the tau = 1/2 kernel is a delta".into()));
    }
    Ok(TauKernel { tau, d })
}

impl TauKernel {
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        let s = 2.0 * self.tau - 1.0;
        let dot: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
        let amp = (2.0 / s.abs()).powi(self.d as i32);
        Complex64::from_polar(amp, 2.0 * PI * (2.0 / s) * dot)
    }
}

/// Kernel θ_M of the distribution B_{A_M} = W ∗ θ_M, built from the block
/// matrix [[0, M], [Mᵀ, 0]] with eigenvectors ordered +s_j first, then −s_j.
pub fn theta_m(m: &Mat) -> Result<ChirpDelta> {
    if !m.is_square() {
        return Err(Error::Dimension("M must be square".into()));
    }
    let d = m.nrows();
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v requested");
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let snap = linalg::zero_threshold(m);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut sigma = Mat::zeros(2 * d, 2 * d);
    let mut lambdas = vec![0.0; 2 * d];
    for (r, &k) in order.iter().enumerate() {
        let s = svd.singular_values[k];
        let s = if s < snap { 0.0 } else { s };
        lambdas[r] = s;
        lambdas[d + r] = -s;
        for i in 0..d {
            sigma[(r, i)] = h * u[(i, k)];
            sigma[(r, d + i)] = h * vt[(k, i)];
            sigma[(d + r, i)] = h * u[(i, k)];
            sigma[(d + r, d + i)] = -h * vt[(k, i)];
        }
    }
    let zero: Vec<usize> = (0..2 * d).filter(|&j| lambdas[j] == 0.0).collect();
    let inv: Vec<f64> = lambdas.iter().map(|&l| if l == 0.0 { 0.0 } else { 1.0 / l }).collect();
    let mm_inv = sigma.transpose() * Mat::from_diagonal(&inv.into()) * &sigma;
    let pdet: f64 = lambdas.iter().filter(|&&l| l != 0.0).map(|l| l.abs()).product();
    Ok(ChirpDelta {
        amplitude: Complex64::new(pdet.powf(-0.5), 0.0),
        chirp: (&mm_inv + mm_inv.transpose()) * 0.5,
        delta_set: zero,
        rotation: sigma,
    })
}

/// ζ ↦ e^{−iπ M_A ζ·ζ}, the Fourier multiplier of the Cohen kernel.
#[derive(Clone, Debug)]
pub struct CohenMultiplier {
    pub m_a: Mat,
}

pub fn cohen_multiplier(m_a: &Mat) -> Result<CohenMultiplier> {
    let a = linalg::asymmetry(m_a);
    if a > 1e-9 * linalg::frobenius(m_a).max(1.0) {
        return Err(Error::NotSymmetric(a));
    }
    Ok(CohenMultiplier { m_a: (m_a + m_a.transpose()) * 0.5 })
}

impl CohenMultiplier {
    pub fn eval(&self, zeta: &[f64]) -> Complex64 {
        chirp_phase(&self.m_a, zeta).conj()
    }

    /// Value for d = 1 at ζ = (ω, η), without allocation.
    pub fn eval2(&self, w: f64, e: f64) -> Complex64 {
        let m = &self.m_a;
        let q = m[(0, 0)] * w * w + 2.0 * m[(0, 1)] * w * e + m[(1, 1)] * e * e;
        Complex64::from_polar(1.0, -PI * q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresnel_example() {
        let k = fourier_of_chirp(&Mat::from_element(1, 1, 1.0)).unwrap();
        assert!((k.amplitude - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        assert_eq!(k.chirp[(0, 0)], -1.0);
        assert!(k.is_function());
    }

    #[test]
    fn zero_chirp_is_pure_delta() {
        let k = fourier_of_chirp(&linalg::zeros(2)).unwrap();
        assert_eq!(k.delta_set, vec![0, 1]);
        assert_eq!(k.amplitude, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn partially_singular_chirp() {
        let k = fourier_of_chirp(&Mat::from_diagonal(&vec![2.0, 0.0].into())).unwrap();
        assert!((k.amplitude - Complex64::from_polar(0.5f64.sqrt(), PI / 4.0)).norm() < 1e-15);
        assert!((k.chirp[(0, 0)] + 0.5).abs() < 1e-15 && k.chirp[(1, 1)] == 0.0);
        assert_eq!(k.delta_set, vec![1]);
        assert_eq!(k.rotation, linalg::identity(2));
    }

    #[test]
    fn tau_kernel_examples() {
        assert!((tau_kernel(1.0, 1).unwrap().eval(&[0.0], &[0.0]) - 2.0).norm() < 1e-15);
        assert!((tau_kernel(0.0, 1).unwrap().eval(&[0.5], &[0.5]) + 2.0).norm() < 1e-14);
        assert!((tau_kernel(1.0, 2).unwrap().eval(&[0.0, 0.0], &[0.0, 0.0]) - 4.0).norm() < 1e-15);
        assert!(tau_kernel(0.5, 1).is_err());
    }

    #[test]
    fn theta_examples() {
        let th = theta_m(&Mat::from_element(1, 1, 2.0)).unwrap();
        for &(x, xi) in &[(0.3, -1.2), (1.0, 1.0), (-2.5, 0.7)] {
            let expect = Complex64::from_polar(0.5, 2.0 * PI * x * xi / 2.0);
            assert!((th.eval(&[x, xi]).unwrap() - expect).norm() < 1e-12);
        }
        let th = theta_m(&linalg::zeros(1)).unwrap();
        assert_eq!(th.delta_set, vec![0, 1]);
        assert_eq!(th.amplitude, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn theta_matches_tau_kernel() {
        for tau in [0.0, 1.0, 2.0] {
            let th = theta_m(&Mat::from_element(1, 1, tau - 0.5)).unwrap();
            let k = tau_kernel(tau, 1).unwrap();
            for &(x, xi) in &[(0.3, -1.2), (1.0, 1.0), (-2.5, 0.7)] {
                assert!((th.eval(&[x, xi]).unwrap() - k.eval(&[x], &[xi])).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn multiplier_examples() {
        let m = cohen_multiplier(&linalg::zeros(2)).unwrap();
        assert_eq!(m.eval(&[1.3, -0.2]), Complex64::new(1.0, 0.0));
        let ma = Mat::from_row_slice(2, 2, &[0.0, -0.2, -0.2, 0.0]);
        let m = cohen_multiplier(&ma).unwrap();
        let expect = Complex64::from_polar(1.0, 0.4 * PI);
        assert!((m.eval(&[1.0, 1.0]) - expect).norm() < 1e-14);
        assert!((m.eval2(1.0, 1.0) - expect).norm() < 1e-14);
    }

    #[test]
    fn pairing_of_pure_delta_is_evaluation() {
        let k = fourier_of_chirp(&linalg::zeros(1)).unwrap();
        let h = |x: &[f64]| Complex64::new((-PI * (x[0] - 0.1).powi(2)).exp(), 0.0);
        let v = k.pair(&h, 6.0, 64);
        assert!((v.re - (-PI * 0.01f64).exp()).abs() < 1e-14);
    }
}
