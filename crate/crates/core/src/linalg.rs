//! Real matrix algebra for symplectic matrices: block access, the standard
//! generators, symmetric eigendecompositions, generalized inverses and
//! pseudo-determinants.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;

/// Default tolerance for symplectic structure checks.
pub const TOL_SYMP: f64 = 1e-9;

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn zeros(n: usize) -> Mat {
    Mat::zeros(n, n)
}

pub fn frobenius(m: &Mat) -> f64 {
    m.norm()
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    Ok(Mat::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Assemble a matrix from a square grid of equally sized square blocks.
pub fn from_blocks(blocks: &[Vec<Mat>]) -> Mat {
    let k = blocks.len();
    let d = blocks[0][0].nrows();
    let mut out = Mat::zeros(k * d, k * d);
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, b) in row.iter().enumerate() {
            out.view_mut((bi * d, bj * d), (d, d)).copy_from(b);
        }
    }
    out
}

pub fn block(m: &Mat, size: usize, i: usize, j: usize) -> Mat {
    m.view((i * size, j * size), (size, size)).into_owned()
}

/// Standard symplectic form J = [[0, I], [-I, 0]] of size 2n.
pub fn j_matrix(n: usize) -> Mat {
    from_blocks(&[vec![zeros(n), identity(n)], vec![-identity(n), zeros(n)]])
}

/// L = [[0, I], [I, 0]] of size 2n.
pub fn l_matrix(n: usize) -> Mat {
    from_blocks(&[vec![zeros(n), identity(n)], vec![identity(n), zeros(n)]])
}

/// D_E = diag(E^{-1}, E^T).
pub fn dilation(e: &Mat) -> Result<Mat> {
    let n = e.nrows();
    let inv = invert(e)?;
    Ok(from_blocks(&[vec![inv, zeros(n)], vec![zeros(n), e.transpose()]]))
}

/// V_C = [[I, 0], [C, I]].
pub fn lower_shear(c: &Mat) -> Mat {
    let n = c.nrows();
    from_blocks(&[vec![identity(n), zeros(n)], vec![c.clone(), identity(n)]])
}

/// Projection of the partial Fourier transform in the second d variables (size 4d).
pub fn partial_fourier_2(d: usize) -> Mat {
    let i = identity(d);
    let z = zeros(d);
    from_blocks(&[
        vec![i.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), i.clone()],
        vec![z.clone(), z.clone(), i.clone(), z.clone()],
        vec![z.clone(), -i.clone(), z.clone(), z],
    ])
}

/// Change of variables (x, y) -> (y, y - x) underlying the STFT.
pub fn stft_change(d: usize) -> Mat {
    let i = identity(d);
    from_blocks(&[vec![zeros(d), i.clone()], vec![-i.clone(), i]])
}

/// Change of variables (x, y) -> (x + tau y, x - (1 - tau) y) underlying W_tau.
pub fn tau_change(tau: f64, d: usize) -> Mat {
    let i = identity(d);
    from_blocks(&[
        vec![i.clone(), &i * tau],
        vec![i.clone(), &i * (tau - 1.0)],
    ])
}

/// A_M = [[I, M + I/2], [I, M - I/2]].
pub fn ba_change_m(m: &Mat) -> Mat {
    let d = m.nrows();
    let h = identity(d) * 0.5;
    from_blocks(&[vec![identity(d), m + &h], vec![identity(d), m - &h]])
}

/// Projection of the STFT as a metaplectic Wigner distribution.
pub fn a_st(d: usize) -> Mat {
    partial_fourier_2(d) * dilation(&stft_change(d)).expect("stft change is invertible")
}

/// Projection of the tau-Wigner distribution.
pub fn a_tau(tau: f64, d: usize) -> Mat {
    partial_fourier_2(d) * dilation(&tau_change(tau, d)).expect("tau change is invertible")
}

pub fn invert(e: &Mat) -> Result<Mat> {
    if !e.is_square() {
        return Err(Error::Dimension("cannot invert a non-square matrix".into()));
    }
    let det = e.determinant();
    let scale = frobenius(e).max(1.0).powi(e.nrows() as i32);
    if det.abs() <= 1e-14 * scale {
        return Err(Error::Singular(det.abs()));
    }
    e.clone().try_inverse().ok_or(Error::Singular(det.abs()))
}

pub fn asymmetry(c: &Mat) -> f64 {
    frobenius(&(c - c.transpose()))
}

/// True iff ‖MᵀJM − J‖_F ≤ tol·max(1, ‖M‖_F²).
pub fn is_symplectic(m: &Mat, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(m)? <= tol * frobenius(m).powi(2).max(1.0))
}

pub fn symplectic_residual(m: &Mat) -> Result<f64> {
    if !m.is_square() || !m.nrows().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "symplectic test needs an even square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let j = j_matrix(m.nrows() / 2);
    Ok(frobenius(&(m.transpose() * &j * m - j)))
}

/// A real 2n×2n matrix known to be symplectic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct SymplecticMatrix {
    n: usize,
    m: Mat,
}

impl SymplecticMatrix {
    pub fn new(m: Mat) -> Result<Self> {
        Self::with_tol(m, TOL_SYMP)
    }

    pub fn with_tol(m: Mat, tol: f64) -> Result<Self> {
        let res = symplectic_residual(&m)?;
        if res > tol * frobenius(&m).powi(2).max(1.0) {
            return Err(Error::NotSymplectic(res));
        }
        Ok(SymplecticMatrix { n: m.nrows() / 2, m })
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix { n, m: identity(2 * n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn into_matrix(self) -> Mat {
        self.m
    }

    pub fn a(&self) -> Mat {
        block(&self.m, self.n, 0, 0)
    }
    pub fn b(&self) -> Mat {
        block(&self.m, self.n, 0, 1)
    }
    pub fn c(&self) -> Mat {
        block(&self.m, self.n, 1, 0)
    }
    pub fn d(&self) -> Mat {
        block(&self.m, self.n, 1, 1)
    }

    pub fn inverse(&self) -> SymplecticMatrix {
        symplectic_inverse(self)
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "cannot compose Sp({}) with Sp({})",
                self.n, other.n
            )));
        }
        Ok(SymplecticMatrix { n: self.n, m: &self.m * &other.m })
    }
}

/// [[Dᵀ, −Bᵀ], [−Cᵀ, Aᵀ]].
pub fn symplectic_inverse(s: &SymplecticMatrix) -> SymplecticMatrix {
    let m = from_blocks(&[
        vec![s.d().transpose(), -s.b().transpose()],
        vec![-s.c().transpose(), s.a().transpose()],
    ]);
    SymplecticMatrix { n: s.n, m }
}

/// A 4d×4d matrix viewed through its sixteen d×d blocks (1-based indices).
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix4d {
    d: usize,
    whole: Mat,
}

impl BlockMatrix4d {
    pub fn new(whole: Mat) -> Result<Self> {
        if !whole.is_square() || !whole.nrows().is_multiple_of(4) || whole.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "expected a 4d x 4d matrix, got {}x{}",
                whole.nrows(),
                whole.ncols()
            )));
        }
        Ok(BlockMatrix4d { d: whole.nrows() / 4, whole })
    }

    pub fn from_blocks(blocks: &[Vec<Mat>]) -> Result<Self> {
        if blocks.len() != 4 || blocks.iter().any(|r| r.len() != 4) {
            return Err(Error::Dimension("expected a 4x4 grid of blocks".into()));
        }
        let d = blocks[0][0].nrows();
        if blocks.iter().flatten().any(|b| b.nrows() != d || b.ncols() != d) {
            return Err(Error::Dimension("blocks must all be d x d".into()));
        }
        Self::new(from_blocks(blocks))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn whole(&self) -> &Mat {
        &self.whole
    }

    /// Block A_ij with i, j in 1..=4.
    pub fn get(&self, i: usize, j: usize) -> Mat {
        assert!((1..=4).contains(&i) && (1..=4).contains(&j), "block index out of range");
        block(&self.whole, self.d, i - 1, j - 1)
    }

    pub fn blocks(&self) -> Vec<Vec<Mat>> {
        (1..=4).map(|i| (1..=4).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// C = Σᵀ diag(λ) Σ; the rows of Σ are the eigenvectors.
#[derive(Clone, Debug)]
pub struct SymEig {
    pub matrix: Mat,
    pub sigma: Mat,
    pub lambdas: Vec<f64>,
}

impl SymEig {
    /// Indices j with λ_j exactly zero after snapping.
    pub fn zero_set(&self) -> Vec<usize> {
        self.lambdas
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn reconstruct(&self) -> Mat {
        self.sigma.transpose() * Mat::from_diagonal(&self.lambdas.clone().into()) * &self.sigma
    }
}

pub fn zero_threshold(c: &Mat) -> f64 {
    1e-10 * spectral_norm(c).max(1.0)
}

pub fn sym_eig(c: &Mat, tol: f64) -> Result<SymEig> {
    if !c.is_square() {
        return Err(Error::Dimension("eigendecomposition needs a square matrix".into()));
    }
    let asym = asymmetry(c);
    if asym > tol {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(sym_eig_unchecked(c))
}

fn sym_eig_unchecked(c: &Mat) -> SymEig {
    let n = c.nrows();
    let sym = (c + c.transpose()) * 0.5;
    if n == 0 {
        return SymEig { matrix: sym, sigma: Mat::zeros(0, 0), lambdas: vec![] };
    }
    let snap = zero_threshold(&sym);
    let eig = SymmetricEigen::new(sym.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut sigma = Mat::zeros(n, n);
    let mut lambdas = Vec::with_capacity(n);
    for (row, &k) in order.iter().enumerate() {
        let l = eig.eigenvalues[k];
        lambdas.push(if l.abs() < snap { 0.0 } else { l });
        let v = eig.eigenvectors.column(k);
        // fix the sign: largest-magnitude component positive
        let mut best = 0;
        for i in 1..n {
            if v[i].abs() > v[best].abs() + 1e-12 {
                best = i;
            }
        }
        let sgn = if v[best] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            sigma[(row, i)] = sgn * v[i];
        }
    }
    SymEig { matrix: sym, sigma, lambdas }
}

/// C⁻ = Σᵀ diag(λ⁻) Σ, inverting only the nonzero eigenvalues.
pub fn generalized_inverse(c: &Mat) -> Mat {
    let e = sym_eig_unchecked(c);
    let inv: Vec<f64> = e.lambdas.iter().map(|&l| if l == 0.0 { 0.0 } else { 1.0 / l }).collect();
    e.sigma.transpose() * Mat::from_diagonal(&inv.into()) * &e.sigma
}

/// Product of the nonzero eigenvalues; 1 for the zero matrix.
pub fn pseudo_determinant(c: &Mat) -> f64 {
    sym_eig_unchecked(c).lambdas.iter().filter(|&&l| l != 0.0).product()
}

/// Wire format for matrices: {"d": .., "rows": [[..], ..]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub d: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Mat, d: usize) -> Self {
        MatrixJson { d, rows: to_rows(m) }
    }

    pub fn to_matrix(&self) -> Result<Mat> {
        let m = from_rows(&self.rows)?;
        if !m.is_square() {
            return Err(Error::Dimension("matrix must be square".into()));
        }
        Ok(m)
    }
}

impl TryFrom<MatrixJson> for SymplecticMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        SymplecticMatrix::new(j.to_matrix()?)
    }
}

impl From<SymplecticMatrix> for MatrixJson {
    fn from(s: SymplecticMatrix) -> Self {
        MatrixJson { d: s.n, rows: to_rows(&s.m) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
        frobenius(&(a - b)) <= tol
    }

    #[test]
    fn j_is_symplectic_and_inverts_to_minus_j() {
        let j = j_matrix(1);
        assert!(is_symplectic(&j, 1e-12).unwrap());
        let s = SymplecticMatrix::new(j.clone()).unwrap();
        assert!(close(symplectic_inverse(&s).matrix(), &(-j), 0.0));
    }

    #[test]
    fn stft_projection_is_symplectic() {
        assert!(is_symplectic(&a_st(1), 1e-12).unwrap());
        assert!(is_symplectic(&a_st(2), 1e-12).unwrap());
    }

    #[test]
    fn broken_identity_is_not_symplectic() {
        let mut m = identity(2);
        m[(0, 0)] = 2.0;
        assert!(!is_symplectic(&m, 1e-9).unwrap());
    }

    #[test]
    fn odd_dimension_rejected() {
        assert!(matches!(is_symplectic(&identity(3), 1e-9), Err(Error::Dimension(_))));
    }

    #[test]
    fn inverse_of_dilation_and_shear() {
        let e = Mat::from_element(1, 1, 2.0);
        let d = SymplecticMatrix::new(dilation(&e).unwrap()).unwrap();
        let dinv = dilation(&Mat::from_element(1, 1, 0.5)).unwrap();
        assert!(close(symplectic_inverse(&d).matrix(), &dinv, 1e-15));

        let v = SymplecticMatrix::new(lower_shear(&Mat::from_element(1, 1, 1.0))).unwrap();
        // direct 2x2 product: [[1,0],[1,1]] * [[1,0],[-1,1]] = I
        let vinv = Mat::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 1.0]);
        assert!(close(symplectic_inverse(&v).matrix(), &vinv, 0.0));
        assert!(close(&(v.matrix() * vinv), &identity(2), 0.0));
    }

    #[test]
    fn eig_examples() {
        let e = sym_eig(&Mat::from_diagonal(&vec![2.0, 0.0].into()), 1e-12).unwrap();
        assert_eq!(e.lambdas, vec![2.0, 0.0]);
        assert!(close(&e.sigma, &identity(2), 0.0));

        let e = sym_eig(&Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]), 1e-12).unwrap();
        assert!((e.lambdas[0] - 1.0).abs() < 1e-14 && (e.lambdas[1] + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.sigma[(0, 0)] - h).abs() < 1e-14 && (e.sigma[(0, 1)] - h).abs() < 1e-14);

        // M_A for M = [[m]] has eigenvalues ±m
        let m = 0.7;
        let ma = Mat::from_row_slice(2, 2, &[0.0, m, m, 0.0]);
        let e = sym_eig(&ma, 1e-12).unwrap();
        assert!((e.lambdas[0] - m).abs() < 1e-14 && (e.lambdas[1] + m).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_asymmetric() {
        let c = Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(sym_eig(&c, 1e-9), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn generalized_inverse_examples() {
        let c = Mat::from_diagonal(&vec![2.0, 0.0].into());
        assert!(close(&generalized_inverse(&c), &Mat::from_diagonal(&vec![0.5, 0.0].into()), 1e-15));
        let c = Mat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        assert!(close(&generalized_inverse(&c), &c.clone().try_inverse().unwrap(), 1e-14));
    }

    #[test]
    fn pseudo_determinant_examples() {
        assert_eq!(pseudo_determinant(&Mat::from_diagonal(&vec![3.0, 0.0].into())), 3.0);
        assert!((pseudo_determinant(&Mat::from_diagonal(&vec![2.0, 5.0].into())) - 10.0).abs() < 1e-13);
        assert_eq!(pseudo_determinant(&zeros(2)), 1.0);
    }

    #[test]
    fn paper_projections_have_expected_shape() {
        // A_tau at tau = 1/2 has lower-left 2x2 of [[0,0,I,I],[-I,I,0,0]] rows
        let a = BlockMatrix4d::new(a_tau(0.5, 1)).unwrap();
        assert_eq!(a.get(3, 3)[(0, 0)], 1.0);
        assert_eq!(a.get(3, 4)[(0, 0)], 1.0);
        assert_eq!(a.get(4, 1)[(0, 0)], -1.0);
        assert_eq!(a.get(4, 2)[(0, 0)], 1.0);
        assert!(is_symplectic(a.whole(), 1e-12).unwrap());
    }

    #[test]
    fn block_round_trip() {
        let m = Mat::from_fn(8, 8, |i, j| (i * 8 + j) as f64);
        let b = BlockMatrix4d::new(m.clone()).unwrap();
        let again = BlockMatrix4d::from_blocks(&b.blocks()).unwrap();
        assert_eq!(again.whole(), &m);
    }

    #[test]
    fn matrix_json_rejects_non_symplectic() {
        let j: std::result::Result<SymplecticMatrix, _> =
            serde_json::from_str(r#"{"d":1,"rows":[[2,0],[0,2]]}"#);
        assert!(j.is_err());
    }
}
