//! Seeded random generation of Grassmann elements, supermatrices and planes.
//!
//! Bodies are small nonzero rationals; souls use monomials of degree at most
//! two (degree one for odd entries) with coefficients in `{−3..3} \ {0}`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::galgebra::{rat, GrassmannElement as G, Monomial, Parity, Rational};
use crate::smatrix::{SuperMatrix, SuperShape};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_coeff(rng: &mut impl Rng) -> i64 {
    let v = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Nonzero rational with numerator in `±1..=5` and denominator in `1..=3`.
pub fn random_body(rng: &mut impl Rng) -> Rational {
    let n = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
    rat(n, rng.gen_range(1..=3))
}

/// Random homogeneous soul of the given parity (degree 2 if even, 1 if odd).
pub fn random_soul(gens: usize, parity: Parity, rng: &mut impl Rng) -> G {
    let mut monos: Vec<Monomial> = Vec::new();
    match parity {
        Parity::Odd => monos.extend((1..=gens).map(Monomial::generator)),
        Parity::Even => {
            for i in 1..=gens {
                for j in i + 1..=gens {
                    monos.push(Monomial::from_product(&[i, j]).unwrap().0);
                }
            }
        }
    }
    if monos.is_empty() {
        return G::zero(gens);
    }
    let count = rng.gen_range(0..=3.min(monos.len()));
    let picked: Vec<Monomial> = monos.choose_multiple(rng, count).copied().collect();
    G::from_terms(gens, picked.into_iter().map(|m| (m, rat(small_coeff(rng), 1))))
}

/// Random homogeneous element; even ones get a nonzero body.
pub fn random_element(gens: usize, parity: Parity, rng: &mut impl Rng) -> G {
    let soul = random_soul(gens, parity, rng);
    match parity {
        Parity::Even => &G::scalar(gens, random_body(rng)) + &soul,
        Parity::Odd => soul,
    }
}

/// Even supermatrix with random entries of the correct parity.
pub fn random_even_matrix(gens: usize, rows: SuperShape, cols: SuperShape, rng: &mut impl Rng) -> SuperMatrix {
    let rp = rows.parities();
    let cp = cols.parities();
    let entries = rp.iter().map(|&r| cp.iter().map(|&c| random_element(gens, r + c, rng)).collect()).collect();
    SuperMatrix::new(gens, rp, cp, entries).expect("consistent shapes")
}

/// Even square supermatrix with invertible diagonal blocks (retries until so).
pub fn random_invertible(gens: usize, shape: SuperShape, rng: &mut impl Rng) -> SuperMatrix {
    loop {
        let m = random_even_matrix(gens, shape, shape, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Random strictly increasing `k`-subset of `1..=n`.
pub fn random_subset(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let all: Vec<usize> = (1..=n).collect();
    let mut v: Vec<usize> = all.choose_multiple(rng, k).copied().collect();
    v.sort_unstable();
    v
}
