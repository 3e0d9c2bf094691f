mod common;

use common::*;
use metaplectic::classify::{cohen_class_test, stft_form_to_wigner_form, trichotomy_1d, TOL_CLASSIFY};
use metaplectic::engine::{tau_wigner, wigner, DiscreteSignal, Grid1D};
use metaplectic::linalg::{self, frobenius, generalized_inverse, BlockMatrix4d, Mat, SymplecticMatrix};
use metaplectic::program::{compose_projection, program_for_ba, GeneratorStep, MetaplecticProgram};
use metaplectic::Complex64;
use proptest::prelude::*;

fn mat(d: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-2.0..2.0f64, d * d).prop_map(move |v| Mat::from_row_slice(d, d, &v))
}

fn sym(d: usize) -> impl Strategy<Value = Mat> {
    mat(d).prop_map(|m| (&m + m.transpose()) * 0.5)
}

fn invertible(d: usize) -> impl Strategy<Value = Mat> {
    mat(d).prop_filter("well conditioned", |m| m.determinant().abs() > 0.2)
}

/// Products of dilations, shears and J cover a generic part of Sp(d).
fn symplectic(d: usize) -> impl Strategy<Value = Mat> {
    (invertible(d), sym(d), sym(d), any::<bool>()).prop_map(move |(e, c, q, j)| {
        let mut m = linalg::lower_shear(&c) * linalg::dilation(&e).unwrap();
        if j {
            m = linalg::j_matrix(d) * m;
        }
        linalg::lower_shear(&q) * m
    })
}

/// Symmetric matrix with a prescribed number of zero eigenvalues.
fn low_rank_sym(d: usize) -> impl Strategy<Value = Mat> {
    (invertible(d), prop::collection::vec(prop_oneof![Just(0.0), 0.3..2.0f64, -2.0..-0.3f64], d)).prop_map(
        |(m, l)| {
            let q = m.qr().q();
            &q * Mat::from_diagonal(&l.into()) * q.transpose()
        },
    )
}

fn step(d: usize) -> impl Strategy<Value = GeneratorStep> {
    prop_oneof![
        Just(GeneratorStep::FourierFull),
        Just(GeneratorStep::FourierPartial2),
        invertible(d).prop_map(|e| GeneratorStep::LinearChange { e }),
        sym(d).prop_map(|c| GeneratorStep::ChirpMul { c }),
        sym(d).prop_map(|c| GeneratorStep::ChirpConv { c }),
        Just(GeneratorStep::Flip),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_symplectic_inverse(m in (1usize..3).prop_flat_map(symplectic)) {
        let s = SymplecticMatrix::new(m.clone()).unwrap();
        let j = linalg::j_matrix(s.n());
        let expect = -&j * m.transpose() * &j;
        prop_assert!(frobenius(&(s.inverse().matrix() - expect)) <= 1e-12 * frobenius(&m).max(1.0));
        let scale = frobenius(&m).powi(2).max(1.0);
        prop_assert!(frobenius(&(s.matrix() * s.inverse().matrix() - linalg::identity(2 * s.n()))) <= 1e-9 * scale);
    }

    #[test]
    fn generalized_inverse_identities(c in (1usize..4).prop_flat_map(low_rank_sym)) {
        let g = generalized_inverse(&c);
        let tol = 1e-9 * frobenius(&c).max(1.0).powi(3);
        prop_assert!(frobenius(&(&c * &g * &c - &c)) <= tol);
        prop_assert!(frobenius(&(&g * &c * &g - &g)) <= tol);
        prop_assert!(linalg::asymmetry(&g) <= tol);
    }

    #[test]
    fn program_projection_is_symplectic(steps in prop::collection::vec(step(2), 0..6)) {
        let p = MetaplecticProgram::new(2, steps);
        let s = compose_projection(&p).unwrap();
        prop_assert!(linalg::is_symplectic(s.matrix(), 1e-9).unwrap());
    }

    #[test]
    fn ba_distributions_are_cohen(m in (1usize..3).prop_flat_map(sym)) {
        let d = m.nrows();
        let p = program_for_ba(&linalg::ba_change_m(&m)).unwrap();
        let a = BlockMatrix4d::new(p.projection().unwrap().into_matrix()).unwrap();
        let r = cohen_class_test(&a, TOL_CLASSIFY).unwrap();
        prop_assert!(r.is_cohen, "{:?}", r.violations);
        let ma = r.m_a.unwrap();
        let z = linalg::zeros(d);
        let expect = linalg::from_blocks(&[vec![z.clone(), m.clone()], vec![m.clone(), z]]);
        prop_assert!(frobenius(&(ma - expect)) <= 1e-10 * frobenius(&m).max(1.0));
    }

    #[test]
    fn trichotomy_is_consistent(a11 in -3.0..3.0f64, a13 in -3.0..3.0f64, a21 in -3.0..3.0f64, on_locus in any::<bool>()) {
        let a21 = if on_locus && a13.abs() > 0.1 { a11 * (1.0 - a11) / a13 } else { a21 };
        let t = trichotomy_1d(a11, a13, a21, TOL_CLASSIFY).unwrap();
        prop_assert!(t.consistent());
    }

    #[test]
    fn wigner_form_chirp_is_symmetric(e in invertible(2), c in sym(2)) {
        let w = stft_form_to_wigner_form(&e, &c).unwrap();
        let einv = e.clone().try_inverse().unwrap();
        let raw = &c * 4.0 - einv.transpose() * linalg::l_matrix(1) * &einv * 2.0;
        prop_assert!(frobenius(&(&w.c - &raw)) <= 1e-10 * frobenius(&raw).max(1.0));
        prop_assert!(frobenius(&(w.e - &e * 0.5)) == 0.0);
    }
}

fn signal() -> impl Strategy<Value = Mixture> {
    any::<u64>().prop_map(|s| Mixture::random(&mut rng(s), 2))
}

fn scalar() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn lin(a: Complex64, f: &DiscreteSignal, b: Complex64, h: &DiscreteSignal) -> DiscreteSignal {
    let v = f.values.iter().zip(&h.values).map(|(x, y)| a * x + b * y).collect();
    DiscreteSignal::new(f.grid, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn distributions_are_sesquilinear(f in signal(), h in signal(), g in signal(), a in scalar(), b in scalar(), tau in 0.0..1.0f64) {
        let grid = Grid1D::new(64, 8.0).unwrap();
        let (f, h, g) = (f.sample(&grid), h.sample(&grid), g.sample(&grid));
        let fh = lin(a, &f, b, &h);
        for dist in [
            Box::new(|x: &DiscreteSignal, y: &DiscreteSignal| wigner(x, y).unwrap()) as Box<dyn Fn(&DiscreteSignal, &DiscreteSignal) -> _>,
            Box::new(move |x: &DiscreteSignal, y: &DiscreteSignal| tau_wigner(x, y, tau).unwrap()),
        ] {
            let left = dist(&fh, &g);
            let expect = dist(&f, &g).zip_with(&dist(&h, &g), |x, y| a * x + b * y).unwrap();
            prop_assert!(metaplectic::engine::rel_l2_error(&left, &expect) < 1e-12);
            let right = dist(&g, &fh);
            let expect = dist(&g, &f).zip_with(&dist(&g, &h), |x, y| a.conj() * x + b.conj() * y).unwrap();
            prop_assert!(metaplectic::engine::rel_l2_error(&right, &expect) < 1e-12);
        }
    }

    #[test]
    fn grid_moyal_norm(f in signal(), g in signal()) {
        // products f·conj(g) need the doubled bandwidth of the default grid
        let grid = Grid1D::default_grid();
        let (fs, gs) = (f.sample(&grid), g.sample(&grid));
        let w = wigner(&fs, &gs).unwrap();
        let gap = (w.norm() - fs.norm() * gs.norm()).abs() / (fs.norm() * gs.norm());
        prop_assert!(gap <= 1e-10, "gap {gap:e}");
    }
}
