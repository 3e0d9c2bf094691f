//! Structural predicates on 4d×4d symplectic matrices: Cohen class,
//! shift-invertibility and generalized spectrograms, plus the Lp predicates.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius, generalized_inverse, identity, sym_eig, BlockMatrix4d, Mat};

/// Base tolerance for block equalities; scaled by max(1, ‖A‖_F).
pub const TOL_CLASSIFY: f64 = 1e-9;

pub fn relative_tol(a: &BlockMatrix4d, tol: f64) -> f64 {
    tol * frobenius(a.whole()).max(1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct CohenReport {
    pub is_cohen: bool,
    #[serde(serialize_with = "opt_rows")]
    pub m_a: Option<Mat>,
    pub violations: Vec<String>,
}

fn opt_rows<S: serde::Serializer>(m: &Option<Mat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    m.as_ref().map(linalg::to_rows).serialize(s)
}

fn rows<S: serde::Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    linalg::to_rows(m).serialize(s)
}

fn require_symplectic(a: &BlockMatrix4d, tol: f64) -> Result<()> {
    let res = linalg::symplectic_residual(a.whole())?;
    if res > tol * frobenius(a.whole()).powi(2).max(1.0) {
        return Err(Error::NotSymplectic(res));
    }
    Ok(())
}

/// M_A = [[A13, I/2 − A11], [I/2 − A11ᵀ, −A21]].
pub fn cohen_m(a11: &Mat, a13: &Mat, a21: &Mat) -> Mat {
    let d = a11.nrows();
    let h = identity(d) * 0.5;
    linalg::from_blocks(&[
        vec![a13.clone(), &h - a11],
        vec![&h - a11.transpose(), -a21],
    ])
}

/// The Cohen-class matrix determined by (A11, A13, A21).
pub fn cohen_matrix(a11: &Mat, a13: &Mat, a21: &Mat) -> BlockMatrix4d {
    let d = a11.nrows();
    let i = identity(d);
    let z = linalg::zeros(d);
    BlockMatrix4d::from_blocks(&[
        vec![a11.clone(), &i - a11, a13.clone(), a13.clone()],
        vec![a21.clone(), -a21, &i - a11.transpose(), -a11.transpose()],
        vec![z.clone(), z.clone(), i.clone(), i.clone()],
        vec![-&i, i.clone(), z.clone(), z],
    ])
    .expect("blocks are consistent")
}

pub fn cohen_class_test(a: &BlockMatrix4d, tol: f64) -> Result<CohenReport> {
    require_symplectic(a, tol)?;
    let t = relative_tol(a, tol);
    let d = a.d();
    let i = identity(d);
    let z = linalg::zeros(d);
    let a11 = a.get(1, 1);
    let a13 = a.get(1, 3);
    let a21 = a.get(2, 1);
    let checks: Vec<(&str, Mat, Mat)> = vec![
        ("A12 = I - A11", a.get(1, 2), &i - &a11),
        ("A14 = A13", a.get(1, 4), a13.clone()),
        ("A13 symmetric", a13.transpose(), a13.clone()),
        ("A21 symmetric", a21.transpose(), a21.clone()),
        ("A22 = -A21", a.get(2, 2), -&a21),
        ("A23 = I - A11^T", a.get(2, 3), &i - a11.transpose()),
        ("A24 = -A11^T", a.get(2, 4), -a11.transpose()),
        ("A31 = 0", a.get(3, 1), z.clone()),
        ("A32 = 0", a.get(3, 2), z.clone()),
        ("A33 = I", a.get(3, 3), i.clone()),
        ("A34 = I", a.get(3, 4), i.clone()),
        ("A41 = -I", a.get(4, 1), -&i),
        ("A42 = I", a.get(4, 2), i.clone()),
        ("A43 = 0", a.get(4, 3), z.clone()),
        ("A44 = 0", a.get(4, 4), z),
    ];
    let violations: Vec<String> = checks
        .into_iter()
        .filter(|(_, x, y)| frobenius(&(x - y)) > t)
        .map(|(name, _, _)| name.to_string())
        .collect();
    let is_cohen = violations.is_empty();
    let m_a = is_cohen.then(|| {
        let m = cohen_m(&a11, &a13, &a21);
        (&m + m.transpose()) * 0.5
    });
    Ok(CohenReport { is_cohen, m_a, violations })
}

fn require_cohen(a: &BlockMatrix4d, tol: f64) -> Result<CohenReport> {
    let r = cohen_class_test(a, tol)?;
    if !r.is_cohen {
        return Err(Error::Domain(format!(
            "matrix is not in the Cohen class (failed: {})",
            r.violations.join(", ")
        )));
    }
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftInvertibility {
    pub is_shift_invertible: bool,
    #[serde(serialize_with = "rows")]
    pub e_a: Mat,
    pub det: f64,
}

/// E_A = [[A11, A13], [A21, I − A11]]; shift-invertible iff |det E_A| > tol.
pub fn shift_invertibility_test(a: &BlockMatrix4d, tol: f64) -> Result<ShiftInvertibility> {
    require_cohen(a, tol)?;
    let d = a.d();
    let a11 = a.get(1, 1);
    let e_a = linalg::from_blocks(&[
        vec![a11.clone(), a.get(1, 3)],
        vec![a.get(2, 1), identity(d) - &a11],
    ]);
    let det = e_a.determinant();
    Ok(ShiftInvertibility { is_shift_invertible: det.abs() > tol, det, e_a })
}

/// A window e^{iπQx·x} multiplied by ∏_{j∈delta_set} δ(R_j·x), up to a constant.
#[derive(Clone, Debug, Serialize)]
pub struct WindowSpec {
    pub amplitude: Complex64,
    #[serde(serialize_with = "rows")]
    pub chirp: Mat,
    /// Zero-based indices of the delta constraints.
    pub delta_set: Vec<usize>,
    #[serde(serialize_with = "rows")]
    pub delta_matrix: Mat,
}

impl WindowSpec {
    pub fn chirp_only(q: Mat) -> Self {
        let d = q.nrows();
        WindowSpec { amplitude: Complex64::new(1.0, 0.0), chirp: q, delta_set: vec![], delta_matrix: linalg::zeros(d) }
    }

    pub fn dim(&self) -> usize {
        self.chirp.nrows()
    }

    /// Value with each delta replaced by a normalized Gaussian of width eps.
    pub fn eval_mollified(&self, x: &[f64], eps: f64) -> Complex64 {
        let v = DVector::from_column_slice(x);
        let q = (&self.chirp * &v).dot(&v);
        let mut out = self.amplitude * Complex64::from_polar(1.0, std::f64::consts::PI * q);
        for &j in &self.delta_set {
            let u = self.delta_matrix.row(j).transpose().dot(&v) / eps;
            out *= (-std::f64::consts::PI * u * u).exp() / eps;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrogramFailure {
    A13NotSymmetric,
    A21NotSymmetric,
    CouplingResidual,
    ZeroRowCondition,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrogramReport {
    pub is_spectrogram: bool,
    pub psi: Option<WindowSpec>,
    pub phi: Option<WindowSpec>,
    pub z: Vec<usize>,
    pub z1: Vec<usize>,
    pub z2: Vec<usize>,
    pub failure_reason: Option<SpectrogramFailure>,
    pub coupling_residual: f64,
}

impl SpectrogramReport {
    fn fail(reason: SpectrogramFailure, z: Vec<usize>, coupling_residual: f64) -> Self {
        SpectrogramReport {
            is_spectrogram: false,
            psi: None,
            phi: None,
            z,
            z1: vec![],
            z2: vec![],
            failure_reason: Some(reason),
            coupling_residual,
        }
    }
}

/// Orthonormal basis (as rows) of the null space of `m` restricted to the span of `basis` rows.
fn null_within(basis: &Mat, m: &Mat, tol: f64) -> Mat {
    // vectors v = basisᵀ c with vᵀ m = 0  <=>  (basis m) c-combination vanishes
    let k = basis.nrows();
    if k == 0 {
        return Mat::zeros(0, basis.ncols());
    }
    let bm = basis * m; // k × d, rows are vᵀm for basis vectors
    let g = &bm * bm.transpose(); // k × k Gram matrix, null space gives combinations
    let e = linalg::sym_eig(&((&g + g.transpose()) * 0.5), f64::INFINITY).expect("symmetric");
    let rows: Vec<usize> = (0..k).filter(|&r| e.lambdas[r].abs() <= tol * tol).collect();
    let mut out = Mat::zeros(rows.len(), basis.ncols());
    for (i, &r) in rows.iter().enumerate() {
        let c = e.sigma.row(r);
        let v = c * basis;
        out.row_mut(i).copy_from(&v);
    }
    out
}

/// Decide whether the Cohen-class W_A is a generalized spectrogram and, if so,
/// produce the two windows. Covers the invertible, fully singular and mixed
/// cases of A13 in one dispatcher.
pub fn spectrogram_test(a: &BlockMatrix4d, tol: f64) -> Result<SpectrogramReport> {
    require_cohen(a, tol)?;
    let t = relative_tol(a, tol);
    let d = a.d();
    let i = identity(d);
    let a11 = a.get(1, 1);
    let a13 = a.get(1, 3);
    let a21 = a.get(2, 1);
    if linalg::asymmetry(&a13) > t {
        return Ok(SpectrogramReport::fail(SpectrogramFailure::A13NotSymmetric, vec![], f64::NAN));
    }
    if linalg::asymmetry(&a21) > t {
        return Ok(SpectrogramReport::fail(SpectrogramFailure::A21NotSymmetric, vec![], f64::NAN));
    }
    let a13 = (&a13 + a13.transpose()) * 0.5;
    let a21 = (&a21 + a21.transpose()) * 0.5;
    let eig = sym_eig(&a13, f64::INFINITY)?;
    let mut sigma = eig.sigma.clone();
    let z = eig.zero_set();
    let a13_inv = generalized_inverse(&a13);
    let coupling = frobenius(&(&a21 - a11.transpose() * &a13_inv * (&i - &a11)));

    if z.len() < d && coupling > t {
        return Ok(SpectrogramReport::fail(SpectrogramFailure::CouplingResidual, z, coupling));
    }

    // Inside a degenerate kernel the eigenbasis is not unique; prefer a basis
    // aligned with the kernels of A11ᵀ and (I − A11)ᵀ when they split it orthogonally.
    if z.len() > 1 {
        let mut kb = Mat::zeros(z.len(), d);
        for (r, &j) in z.iter().enumerate() {
            kb.row_mut(r).copy_from(&eig.sigma.row(j));
        }
        let k1 = null_within(&kb, &a11, t);
        let k2 = null_within(&kb, &(&i - &a11), t);
        if k1.nrows() + k2.nrows() == z.len() && frobenius(&(&k1 * k2.transpose())) <= t {
            let mut r = 0;
            for part in [&k1, &k2] {
                for row in 0..part.nrows() {
                    sigma.row_mut(z[r]).copy_from(&part.row(row));
                    r += 1;
                }
            }
        }
    }

    let s_a11 = &sigma * &a11;
    let s_comp = &sigma * (&i - &a11);
    let mut z1 = vec![];
    let mut z2 = vec![];
    for &j in &z {
        let comp_zero = s_comp.row(j).norm() <= t;
        let a11_zero = s_a11.row(j).norm() <= t;
        if a11_zero {
            z1.push(j);
        } else if comp_zero {
            z2.push(j);
        } else {
            return Ok(SpectrogramReport::fail(SpectrogramFailure::ZeroRowCondition, z, coupling));
        }
    }

    let (psi_chirp, phi_chirp) = if !z.is_empty() && z.len() == d {
        (a21.clone(), -&a21)
    } else {
        (&a13_inv * (&i - &a11), -(a11.transpose() * &a13_inv))
    };
    let sym = |m: Mat| (&m + m.transpose()) * 0.5;
    let psi = WindowSpec {
        amplitude: Complex64::new(1.0, 0.0),
        chirp: sym(psi_chirp),
        delta_set: z1.clone(),
        delta_matrix: s_comp.clone(),
    };
    let phi = WindowSpec {
        amplitude: Complex64::new(1.0, 0.0),
        chirp: sym(phi_chirp),
        delta_set: z2.clone(),
        delta_matrix: -s_a11,
    };
    Ok(SpectrogramReport {
        is_spectrogram: true,
        psi: Some(psi),
        phi: Some(phi),
        z,
        z1,
        z2,
        failure_reason: None,
        coupling_residual: coupling,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Trichotomy {
    pub cohen_discriminant: f64,
    pub is_spectrogram: bool,
    pub is_shift_invertible: bool,
    /// |discriminant| ≤ tol.
    pub discriminant_vanishes: bool,
}

impl Trichotomy {
    pub fn consistent(&self) -> bool {
        self.is_spectrogram == self.discriminant_vanishes
            && self.is_shift_invertible != self.discriminant_vanishes
    }
}

/// One-dimensional Cohen data: compares the discriminant with the two structural tests.
pub fn trichotomy_1d(a11: f64, a13: f64, a21: f64, tol: f64) -> Result<Trichotomy> {
    let m = |v: f64| Mat::from_element(1, 1, v);
    let a = cohen_matrix(&m(a11), &m(a13), &m(a21));
    let disc = a11 * (1.0 - a11) - a21 * a13;
    let spec = spectrogram_test(&a, tol)?;
    let shift = shift_invertibility_test(&a, tol)?;
    Ok(Trichotomy {
        cohen_discriminant: disc,
        is_spectrogram: spec.is_spectrogram,
        is_shift_invertible: shift.is_shift_invertible,
        discriminant_vanishes: disc.abs() <= tol,
    })
}

/// Hölder conjugate exponent, with 1' = ∞ and ∞' = 1.
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    })
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("exponent {p} is not in [1, inf]")));
    }
    Ok(())
}

/// Whether W: L^p × L^{p'} → L^q is bounded.
pub fn lp_wigner_bounded(p: f64, q: f64) -> Result<bool> {
    check_exponent(p)?;
    let qc = conjugate_exponent(q)?;
    Ok(q >= 2.0 && qc <= p && p <= q)
}

/// Whether Op_w(a): L^p → L^p is bounded for all a ∈ L^q.
pub fn lp_op_bounded(p: f64, q: f64) -> Result<bool> {
    check_exponent(p)?;
    let qc = conjugate_exponent(q)?;
    Ok(q <= 2.0 && q <= p && p <= qc)
}

#[derive(Clone, Debug, Serialize)]
pub struct WignerForm {
    #[serde(serialize_with = "rows")]
    pub e: Mat,
    #[serde(serialize_with = "rows")]
    pub c: Mat,
    /// The new window operator is the flip composed with the old one.
    pub flip: bool,
}

/// Rewrites a shift-invertible form (E, C, S) in terms of the Wigner distribution:
/// E' = E/2, C' = 4C − 2E^{-T} L E^{-1}, S' = flip ∘ S.
pub fn stft_form_to_wigner_form(e: &Mat, c: &Mat) -> Result<WignerForm> {
    if e.nrows() != c.nrows() || !e.is_square() || !c.is_square() || !e.nrows().is_multiple_of(2) {
        return Err(Error::Dimension("E and C must be 2d x 2d".into()));
    }
    let asym = linalg::asymmetry(c);
    if asym > 1e-9 * frobenius(c).max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let einv = linalg::invert(e)?;
    let l = linalg::l_matrix(e.nrows() / 2);
    let c2 = c * 4.0 - einv.transpose() * l * &einv * 2.0;
    Ok(WignerForm { e: e * 0.5, c: (&c2 + c2.transpose()) * 0.5, flip: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1(v: f64) -> Mat {
        Mat::from_element(1, 1, v)
    }

    fn tau_block(tau: f64) -> BlockMatrix4d {
        BlockMatrix4d::new(linalg::a_tau(tau, 1)).unwrap()
    }

    #[test]
    fn cohen_examples() {
        let r = cohen_class_test(&tau_block(0.3), TOL_CLASSIFY).unwrap();
        assert!(r.is_cohen);
        let expect = Mat::from_row_slice(2, 2, &[0.0, -0.2, -0.2, 0.0]);
        assert!(frobenius(&(r.m_a.unwrap() - expect)) < 1e-14);

        let r = cohen_class_test(&tau_block(0.5), TOL_CLASSIFY).unwrap();
        assert!(frobenius(&r.m_a.unwrap()) < 1e-15);

        let st = BlockMatrix4d::new(linalg::a_st(1)).unwrap();
        let r = cohen_class_test(&st, TOL_CLASSIFY).unwrap();
        assert!(!r.is_cohen);
        assert!(r.violations.iter().any(|v| v.starts_with("A3")));
    }

    #[test]
    fn non_symplectic_is_a_precondition_error() {
        let a = BlockMatrix4d::new(linalg::identity(4) * 2.0).unwrap();
        assert!(matches!(cohen_class_test(&a, TOL_CLASSIFY), Err(Error::NotSymplectic(_))));
    }

    #[test]
    fn cohen_matrix_is_symplectic() {
        let a = cohen_matrix(&m1(0.37), &m1(-1.3), &m1(0.4));
        assert!(linalg::is_symplectic(a.whole(), 1e-12).unwrap());
        assert!(cohen_class_test(&a, TOL_CLASSIFY).unwrap().is_cohen);
    }

    #[test]
    fn shift_invertibility_examples() {
        let s = shift_invertibility_test(&tau_block(0.5), TOL_CLASSIFY).unwrap();
        assert!(s.is_shift_invertible);
        assert!(frobenius(&(s.e_a - Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]))) < 1e-15);
        assert!(!shift_invertibility_test(&tau_block(0.0), TOL_CLASSIFY).unwrap().is_shift_invertible);
        let a = cohen_matrix(&m1(1.0), &m1(1.0), &m1(0.0));
        assert!(!shift_invertibility_test(&a, TOL_CLASSIFY).unwrap().is_shift_invertible);
        let st = BlockMatrix4d::new(linalg::a_st(1)).unwrap();
        assert!(matches!(shift_invertibility_test(&st, TOL_CLASSIFY), Err(Error::Domain(_))));
    }

    #[test]
    fn spectrogram_examples() {
        let a = 0.3;
        let r = spectrogram_test(&cohen_matrix(&m1(a), &m1(1.0), &m1(a * (1.0 - a))), TOL_CLASSIFY).unwrap();
        assert!(r.is_spectrogram);
        let psi = r.psi.unwrap();
        let phi = r.phi.unwrap();
        assert!((psi.chirp[(0, 0)] - 0.7).abs() < 1e-14 && psi.delta_set.is_empty());
        assert!((phi.chirp[(0, 0)] + 0.3).abs() < 1e-14 && phi.delta_set.is_empty());

        let r = spectrogram_test(&tau_block(0.0), TOL_CLASSIFY).unwrap();
        assert!(r.is_spectrogram);
        assert_eq!(r.z2, vec![0]);
        assert!(r.z1.is_empty());
        let psi = r.psi.unwrap();
        assert!(psi.delta_set.is_empty() && psi.chirp[(0, 0)] == 0.0);
        assert_eq!(r.phi.unwrap().delta_set, vec![0]);

        let r = spectrogram_test(&tau_block(0.5), TOL_CLASSIFY).unwrap();
        assert!(!r.is_spectrogram);
        assert_eq!(r.failure_reason, Some(SpectrogramFailure::ZeroRowCondition));
    }

    #[test]
    fn coupling_failure_reported() {
        let r = spectrogram_test(&cohen_matrix(&m1(0.3), &m1(1.0), &m1(0.3)), TOL_CLASSIFY).unwrap();
        assert_eq!(r.failure_reason, Some(SpectrogramFailure::CouplingResidual));
    }

    #[test]
    fn mixed_branch_in_two_dimensions() {
        // A13 = diag(1, 0); second coordinate behaves like the tau = 0 case
        let a11 = Mat::from_diagonal(&vec![0.4, 1.0].into());
        let a13 = Mat::from_diagonal(&vec![1.0, 0.0].into());
        let a21 = Mat::from_diagonal(&vec![0.4 * 0.6, 0.0].into());
        let r = spectrogram_test(&cohen_matrix(&a11, &a13, &a21), TOL_CLASSIFY).unwrap();
        assert!(r.is_spectrogram, "{r:?}");
        assert_eq!(r.z, vec![1]);
        assert_eq!(r.z2, vec![1]);
    }

    #[test]
    fn trichotomy_examples() {
        let t = trichotomy_1d(1.0, 0.0, 0.0, TOL_CLASSIFY).unwrap();
        assert!(t.is_spectrogram && !t.is_shift_invertible && t.consistent());
        let t = trichotomy_1d(0.5, 0.0, 0.0, TOL_CLASSIFY).unwrap();
        assert!((t.cohen_discriminant - 0.25).abs() < 1e-15);
        assert!(!t.is_spectrogram && t.is_shift_invertible && t.consistent());
        let t = trichotomy_1d(0.3, 2.0, 0.105, TOL_CLASSIFY).unwrap();
        assert!(t.is_spectrogram && t.consistent());
    }

    #[test]
    fn lp_predicates() {
        assert!(lp_wigner_bounded(2.0, 2.0).unwrap());
        assert!(!lp_wigner_bounded(1.0, 2.0).unwrap());
        assert!(!lp_wigner_bounded(2.0, 1.0).unwrap());
        assert!(lp_wigner_bounded(4.0, 4.0).unwrap());
        assert!(lp_op_bounded(2.0, 2.0).unwrap());
        assert!(!lp_op_bounded(4.0, 2.0).unwrap());
        assert!(lp_op_bounded(2.0, 1.0).unwrap());
        assert!(lp_wigner_bounded(0.5, 2.0).is_err());
        assert!(lp_wigner_bounded(f64::INFINITY, f64::INFINITY).unwrap());
    }

    #[test]
    fn wigner_form_examples() {
        let f = stft_form_to_wigner_form(&linalg::identity(2), &linalg::zeros(2)).unwrap();
        assert!(frobenius(&(f.e - linalg::identity(2) * 0.5)) < 1e-15);
        assert!(frobenius(&(f.c + linalg::l_matrix(1) * 2.0)) < 1e-15);
        let f = stft_form_to_wigner_form(&(linalg::identity(2) * 2.0), &linalg::zeros(2)).unwrap();
        assert!(frobenius(&(f.e - linalg::identity(2))) < 1e-15);
        assert!(frobenius(&(f.c + linalg::l_matrix(1) * 0.5)) < 1e-15);
        assert!(stft_form_to_wigner_form(&linalg::zeros(2), &linalg::zeros(2)).is_err());
    }
}
