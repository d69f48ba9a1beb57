use proptest::prelude::*;
use superplucker::galgebra::{rat, GrassmannElement as G, Parity};
use superplucker::random::{random_element, random_even_matrix, random_invertible, rng};
use superplucker::smatrix::{det, GhostColumnSpec};
use superplucker::{SuperMatrix, SuperShape};

const N: usize = 4;

fn shape() -> impl Strategy<Value = SuperShape> {
    (0usize..=2, 0usize..=2).prop_filter("nonempty", |(p, q)| p + q > 0).prop_map(|(p, q)| SuperShape::new(p, q))
}

/// Matrix with one odd-valued column in slot `j` (entries of the wrong parity).
fn with_ghost(m: &SuperMatrix, j: usize, v: &[G]) -> SuperMatrix {
    m.with_column(j, v)
}

fn wrong_column(m: &SuperMatrix, j: usize, seed: u64) -> Vec<G> {
    let mut r = rng(seed);
    let slot = m.col_parities()[j];
    m.row_parities().iter().map(|&p| random_element(N, p + slot.flip(), &mut r)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multiplicative(sh in shape(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_invertible(N, sh, &mut r);
        let b = random_invertible(N, sh, &mut r);
        prop_assert_eq!(a.matmul(&b).unwrap().ber().unwrap(), &a.ber().unwrap() * &b.ber().unwrap());
    }

    #[test]
    fn schur_formulas_and_parity_reversal(sh in shape(), seed in any::<u64>()) {
        let a = random_invertible(N, sh, &mut rng(seed));
        let (x, y) = a.ber_schur_pair().unwrap();
        prop_assert_eq!(x.clone().unwrap(), y.unwrap());
        prop_assert_eq!(a.parity_reverse().ber().unwrap(), x.unwrap().inverse().unwrap());
        prop_assert_eq!(a.ber_star().unwrap(), a.parity_reverse().ber().unwrap());
    }

    #[test]
    fn inverse_matrix_roundtrip(sh in shape(), seed in any::<u64>()) {
        let a = random_invertible(N, sh, &mut rng(seed));
        let inv = a.inverse_matrix().unwrap();
        prop_assert_eq!(a.matmul(&inv).unwrap(), SuperMatrix::identity(N, sh));
    }

    #[test]
    fn ghost_additive_and_homogeneous(seed in any::<u64>(), j in 0usize..3) {
        let sh = SuperShape::new(2, 1);
        let mut r = rng(seed);
        let m = random_invertible(N, sh, &mut r);
        let spec = GhostColumnSpec { position: j, declared_parity: m.col_parities()[j] };
        let v = wrong_column(&m, j, seed ^ 1);
        let w = wrong_column(&m, j, seed ^ 2);
        let sum: Vec<G> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        let f = |c: &[G]| with_ghost(&m, j, c).ber_ghost(spec);
        if v.iter().all(|x| x.is_zero()) || w.iter().all(|x| x.is_zero()) || sum.iter().all(|x| x.is_zero()) {
            return Ok(());
        }
        prop_assert_eq!(f(&sum).unwrap(), &f(&v).unwrap() + &f(&w).unwrap());
        let lambda = random_element(N, Parity::Even, &mut r);
        let scaled: Vec<G> = v.iter().map(|x| &lambda * x).collect();
        prop_assert_eq!(f(&scaled).unwrap(), &lambda * &f(&v).unwrap());
    }
}

#[test]
fn purely_even_and_purely_odd_shapes() {
    let mut r = rng(5);
    for k in 1..=3 {
        let a = random_invertible(N, SuperShape::new(k, 0), &mut r);
        assert_eq!(a.ber().unwrap(), det(a.entries(), N));
        let b = random_invertible(N, SuperShape::new(0, k), &mut r);
        assert_eq!(b.ber().unwrap(), det(b.entries(), N).inverse().unwrap());
    }
}

#[test]
fn fixture_value() {
    let t = |i| G::generator(2, i).unwrap();
    let m = SuperMatrix::from_shapes(2, SuperShape::new(1, 1), SuperShape::new(1, 1), vec![vec![G::from_int(2, 2), t(1)], vec![t(2), G::from_int(2, 3)]]).unwrap();
    let want = &G::scalar(2, rat(2, 3)) - &(&t(1) * &t(2)).scale(&rat(1, 9));
    assert_eq!(m.ber().unwrap(), want);
    assert_eq!(want.to_string(), "2/3 - 1/9*t1*t2");
}

#[test]
fn odd_odd_block_singular() {
    let m = SuperMatrix::from_shapes(0, SuperShape::new(1, 1), SuperShape::new(1, 1), vec![vec![G::one(0), G::zero(0)], vec![G::zero(0), G::zero(0)]]).unwrap();
    assert!(m.ber().is_err());
    assert!(!m.is_invertible());
}

#[test]
fn cramer_solves() {
    let mut r = rng(11);
    let sh = SuperShape::new(2, 2);
    for parity in [Parity::Even, Parity::Odd] {
        let a = random_invertible(N, sh, &mut r);
        let b: Vec<G> = sh.parities().iter().map(|&p| random_element(N, p + parity, &mut r)).collect();
        let c = a.super_cramer_solve(&b).unwrap();
        let col = SuperMatrix::new(N, sh.parities(), vec![parity], c.into_iter().map(|x| vec![x]).collect()).unwrap();
        let prod = a.matmul(&col).unwrap();
        assert_eq!(prod.column(0), b, "{parity:?} right-hand side");
    }
}

#[test]
fn rectangular_products() {
    let mut r = rng(3);
    let a = random_even_matrix(N, SuperShape::new(1, 1), SuperShape::new(2, 1), &mut r);
    let b = random_even_matrix(N, SuperShape::new(2, 1), SuperShape::new(0, 2), &mut r);
    let c = a.matmul(&b).unwrap();
    assert_eq!((c.row_shape(), c.col_shape()), (SuperShape::new(1, 1), SuperShape::new(0, 2)));
    assert!(c.is_even());
}
