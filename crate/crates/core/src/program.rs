//! Metaplectic operators written as ordered programs of generator steps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, SymplecticMatrix};

mod rows {
    use super::Mat;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Mat, s: S) -> Result<S::Ok, S::Error> {
        crate::linalg::to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        crate::linalg::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// One generator of the metaplectic group acting on functions of n variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorStep {
    /// Fourier transform in all variables.
    FourierFull,
    /// Fourier transform in the second half of the variables.
    FourierPartial2,
    /// F ↦ |det E|^{1/2} F(E·).
    LinearChange {
        #[serde(with = "rows")]
        e: Mat,
    },
    /// Multiplication by e^{iπCx·x}.
    ChirpMul {
        #[serde(with = "rows")]
        c: Mat,
    },
    /// Fourier multiplier e^{-iπCξ·ξ}, i.e. conjugation of ChirpMul by the Fourier transform.
    ChirpConv {
        #[serde(with = "rows")]
        c: Mat,
    },
    ScalarPhase { re: f64, im: f64 },
    /// F ↦ F(−·).
    Flip,
}

impl GeneratorStep {
    pub fn scalar_phase(c: Complex64) -> Self {
        GeneratorStep::ScalarPhase { re: c.re, im: c.im }
    }

    pub fn validate(&self, n: usize, tol: f64) -> Result<()> {
        let check_dim = |m: &Mat| {
            if m.nrows() != n || m.ncols() != n {
                Err(Error::Dimension(format!(
                    "step matrix is {}x{}, program acts on {} variables",
                    m.nrows(),
                    m.ncols(),
                    n
                )))
            } else {
                Ok(())
            }
        };
        match self {
            GeneratorStep::FourierPartial2 if !n.is_multiple_of(2) => Err(Error::Dimension(
                "partial Fourier transform needs an even number of variables".into(),
            )),
            GeneratorStep::LinearChange { e } => {
                check_dim(e)?;
                let det = e.determinant();
                if det.abs() <= tol {
                    return Err(Error::Singular(det.abs()));
                }
                Ok(())
            }
            GeneratorStep::ChirpMul { c } | GeneratorStep::ChirpConv { c } => {
                check_dim(c)?;
                let a = linalg::asymmetry(c);
                if a > tol {
                    return Err(Error::NotSymmetric(a));
                }
                Ok(())
            }
            GeneratorStep::ScalarPhase { re, im } => {
                let m = (re * re + im * im).sqrt();
                if (m - 1.0).abs() > tol {
                    return Err(Error::InvalidParameter(format!(
                        "scalar phase must have unit modulus, got {m}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Symplectic projection of a single step acting on n variables.
pub fn step_projection(step: &GeneratorStep, n: usize) -> Result<SymplecticMatrix> {
    let m = match step {
        GeneratorStep::FourierFull => linalg::j_matrix(n),
        GeneratorStep::FourierPartial2 => {
            if !n.is_multiple_of(2) {
                return Err(Error::Dimension("partial Fourier transform needs even n".into()));
            }
            linalg::partial_fourier_2(n / 2)
        }
        GeneratorStep::LinearChange { e } => linalg::dilation(e)?,
        GeneratorStep::ChirpMul { c } => linalg::lower_shear(c),
        GeneratorStep::ChirpConv { c } => linalg::lower_shear(c).transpose(),
        GeneratorStep::ScalarPhase { .. } => linalg::identity(2 * n),
        GeneratorStep::Flip => linalg::dilation(&(-linalg::identity(n)))?,
    };
    SymplecticMatrix::new(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaplecticProgram {
    /// Number of variables of the functions the operator acts on.
    pub n: usize,
    pub steps: Vec<GeneratorStep>,
    /// Real prefactor applied after the steps (used by the B_A family).
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<SymplecticMatrix>,
}

fn one() -> f64 {
    1.0
}

impl MetaplecticProgram {
    pub fn new(n: usize, steps: Vec<GeneratorStep>) -> Self {
        MetaplecticProgram { n, steps, amplitude: 1.0, target: None }
    }

    pub fn with_target(mut self, target: SymplecticMatrix) -> Self {
        self.target = Some(target);
        self
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, vec![])
    }

    /// STFT program on functions of 2d variables: F(x, y) ↦ ℱ₂[F(y, y − x)].
    pub fn stft(d: usize) -> Self {
        Self::new(
            2 * d,
            vec![
                GeneratorStep::LinearChange { e: linalg::stft_change(d) },
                GeneratorStep::FourierPartial2,
            ],
        )
    }

    pub fn tau_wigner(tau: f64, d: usize) -> Self {
        Self::new(
            2 * d,
            vec![
                GeneratorStep::LinearChange { e: linalg::tau_change(tau, d) },
                GeneratorStep::FourierPartial2,
            ],
        )
    }

    pub fn wigner(d: usize) -> Self {
        Self::tau_wigner(0.5, d)
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.steps {
            s.validate(self.n, 1e-12)?;
        }
        if let Some(t) = &self.target {
            let p = compose_projection(self)?;
            if t.n() != self.n {
                return Err(Error::Dimension("target size does not match the program".into()));
            }
            let err = linalg::frobenius(&(p.matrix() - t.matrix()));
            if err > linalg::TOL_SYMP * linalg::frobenius(t.matrix()).max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "program projection differs from its target by {err:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn projection(&self) -> Result<SymplecticMatrix> {
        compose_projection(self)
    }
}

/// Product of step projections; the first-applied step is the rightmost factor.
pub fn compose_projection(p: &MetaplecticProgram) -> Result<SymplecticMatrix> {
    let mut acc = linalg::identity(2 * p.n);
    for s in &p.steps {
        acc = step_projection(s, p.n)?.matrix() * acc;
    }
    SymplecticMatrix::new(acc)
}

/// B_A(f, g) = |det A|^{-1/2} ℱ₂ 𝔗_A (f ⊗ ḡ).
pub fn program_for_ba(a: &Mat) -> Result<MetaplecticProgram> {
    if !a.is_square() || !a.nrows().is_multiple_of(2) {
        return Err(Error::Dimension("B_A needs a 2d x 2d matrix".into()));
    }
    let det = a.determinant();
    if det.abs() <= 1e-12 {
        return Err(Error::Singular(det.abs()));
    }
    let mut p = MetaplecticProgram::new(
        a.nrows(),
        vec![GeneratorStep::LinearChange { e: a.clone() }, GeneratorStep::FourierPartial2],
    );
    p.amplitude = det.abs().powf(-0.5);
    Ok(p)
}
