#![allow(dead_code)]
//! Closed-form oracles and helpers shared by the integration tests.

use std::f64::consts::PI;

use metaplectic::engine::{Axis, DiscreteSignal, Grid1D, TfGrid};
use metaplectic::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cis(ph: f64) -> Complex64 {
    Complex64::from_polar(1.0, ph)
}

/// e^{−πa(x − c)²} e^{2πiωx}
#[derive(Clone, Copy, Debug)]
pub struct Gauss {
    pub a: f64,
    pub c: f64,
    pub w: f64,
    pub amp: Complex64,
}

impl Gauss {
    pub fn new(a: f64, c: f64, w: f64) -> Self {
        Gauss { a, c, w, amp: c1() }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.amp * (-PI * self.a * (x - self.c).powi(2)).exp() * cis(2.0 * PI * self.w * x)
    }

    /// ∫ g(x) e^{−2πixξ} dx
    pub fn ft(&self, xi: f64) -> Complex64 {
        let u = xi - self.w;
        self.amp * self.a.powf(-0.5) * (-PI * u * u / self.a).exp() * cis(-2.0 * PI * self.c * u)
    }

    pub fn sample(&self, grid: &Grid1D) -> DiscreteSignal {
        DiscreteSignal::from_fn(*grid, |x| self.eval(x))
    }
}

pub fn c1() -> Complex64 {
    c(1.0, 0.0)
}

/// Sum of Gaussian atoms.
#[derive(Clone, Debug)]
pub struct Mixture(pub Vec<Gauss>);

impl Mixture {
    pub fn random(rng: &mut ChaCha8Rng, atoms: usize) -> Self {
        Mixture(
            (0..atoms)
                .map(|_| Gauss {
                    a: rng.random_range(0.6..1.6),
                    c: rng.random_range(-1.5..1.5),
                    w: rng.random_range(-1.5..1.5),
                    amp: c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                })
                .collect(),
        )
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.0.iter().map(|g| g.eval(x)).sum()
    }

    pub fn sample(&self, grid: &Grid1D) -> DiscreteSignal {
        DiscreteSignal::from_fn(*grid, |x| self.eval(x))
    }

    /// Exact ⟨f, g⟩ over the real line.
    pub fn inner(&self, other: &Mixture) -> Complex64 {
        let mut s = c(0.0, 0.0);
        for p in &self.0 {
            for q in &other.0 {
                s += gauss_inner(p, q);
            }
        }
        s
    }
}

/// ∫ p conj(q) dx in closed form.
pub fn gauss_inner(p: &Gauss, q: &Gauss) -> Complex64 {
    // exponent: −π[a(x−c)² + b(x−d)²] + 2πi(ω − ν)x
    let s = p.a + q.a;
    let m = (p.a * p.c + q.a * q.c) / s;
    let rest = p.a * q.a / s * (p.c - q.c).powi(2);
    let k = p.w - q.w;
    p.amp * q.amp.conj() * s.powf(-0.5) * (-PI * rest).exp() * (-PI * k * k / s).exp() * cis(2.0 * PI * k * m)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tf_from_fn(grid: &Grid1D, f: impl Fn(f64, f64) -> Complex64) -> TfGrid {
    TfGrid::from_fn([grid.axis(), grid.freq_axis()], f)
}

pub fn axes(grid: &Grid1D) -> [Axis; 2] {
    [grid.axis(), grid.freq_axis()]
}

/// Least-squares scalar c minimizing ‖a − c b‖ and the resulting relative residual.
pub fn scalar_fit(a: &TfGrid, b: &TfGrid) -> (Complex64, f64) {
    let num: Complex64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y.conj()).sum();
    let den: f64 = b.values.iter().map(|y| y.norm_sqr()).sum();
    let cst = num / den;
    let res: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - cst * y).norm_sqr()).sum();
    let base: f64 = a.values.iter().map(|x| x.norm_sqr()).sum();
    (cst, (res / base).sqrt())
}
