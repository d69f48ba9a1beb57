//! Exact arithmetic in the Grassmann algebra `Λ[t1..tN]` over the rationals.
//!
//! Every scalar in the crate is a [`GrassmannElement`]. Elements carry their
//! generator count `N` (the context); mixing contexts is an error for the
//! checked operations and a panic for the operator overloads.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Largest supported generator count (monomials are `u32` bit sets).
pub const MAX_GENERATORS: usize = 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(b: usize) -> Parity {
        if b.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn flip(self) -> Parity {
        Parity::from_bit(self.bit() + 1)
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(-1)^(self * other)` as a boolean "negate" flag.
    pub fn sign_with(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// A product `t_{i1} t_{i2} ... ` with `i1 < i2 < ...`, stored as a bit set
/// (bit `i-1` stands for `t_i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(u32);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_bits(bits: u32) -> Monomial {
        Monomial(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// The generator `t_i` (1-based).
    pub fn generator(i: usize) -> Monomial {
        assert!((1..=MAX_GENERATORS).contains(&i), "generator index {i} out of range");
        Monomial(1 << (i - 1))
    }

    /// Builds the monomial for an ordered product of generators, returning the
    /// normalized monomial and whether reordering introduced a minus sign.
    /// `None` when a generator repeats (the product vanishes).
    pub fn from_product(indices: &[usize]) -> Option<(Monomial, bool)> {
        let mut acc = Monomial::ONE;
        let mut neg = false;
        for &i in indices {
            let (m, s) = acc.mul(Monomial::generator(i))?;
            acc = m;
            neg ^= s;
        }
        Some((acc, neg))
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn parity(self) -> Parity {
        Parity::from_bit(self.degree())
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_GENERATORS).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    /// Generator indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b as usize + 1).collect()
    }

    /// Highest generator index present (0 for the unit).
    pub fn max_index(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// Product of two monomials with its sign; `None` if they share a generator.
    pub fn mul(self, other: Monomial) -> Option<(Monomial, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Count pairs (i in self, j in other) with i > j: each needs one swap.
        let mut swaps = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let j = rest.trailing_zeros();
            rest &= rest - 1;
            swaps += (self.0 >> j).count_ones();
        }
        Some((Monomial(self.0 | other.0), swaps % 2 == 1))
    }
}

impl Ord for Monomial {
    /// Degree first, then lexicographic on the increasing index sequence.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        // The lowest differing generator decides: whoever holds it is smaller.
        let low = diff & diff.wrapping_neg();
        if self.0 & low != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of `Λ[t1..tN] ⊗ ℚ` in canonical form: terms sorted by
/// [`Monomial`] order, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    gens: usize,
    terms: Vec<(Monomial, Rational)>,
}

impl GrassmannElement {
    pub fn zero(gens: usize) -> Self {
        assert!(gens <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators supported");
        GrassmannElement { gens, terms: Vec::new() }
    }

    pub fn one(gens: usize) -> Self {
        Self::scalar(gens, Rational::one())
    }

    pub fn scalar(gens: usize, q: Rational) -> Self {
        let mut x = Self::zero(gens);
        if !q.is_zero() {
            x.terms.push((Monomial::ONE, q));
        }
        x
    }

    pub fn from_int(gens: usize, n: i64) -> Self {
        Self::scalar(gens, rat(n, 1))
    }

    /// The generator `t_i`, 1-based.
    pub fn generator(gens: usize, i: usize) -> Result<Self> {
        if i == 0 || i > gens {
            return Err(Error::Parse { pos: 0, msg: format!("generator t{i} outside context of {gens}") });
        }
        Ok(Self::term(gens, Monomial::generator(i), Rational::one()))
    }

    pub fn term(gens: usize, m: Monomial, q: Rational) -> Self {
        assert!(m.max_index() <= gens, "monomial outside context");
        let mut x = Self::zero(gens);
        if !q.is_zero() {
            x.terms.push((m, q));
        }
        x
    }

    /// Collects arbitrary (possibly repeated) terms into canonical form.
    pub fn from_terms(gens: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut v: Vec<(Monomial, Rational)> = terms.into_iter().collect();
        for (m, _) in &v {
            assert!(m.max_index() <= gens, "monomial outside context");
        }
        v.sort_by_key(|a| a.0);
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(v.len());
        for (m, q) in v {
            match out.last_mut() {
                Some((lm, lq)) if *lm == m => *lq += q,
                _ => out.push((m, q)),
            }
        }
        out.retain(|(_, q)| !q.is_zero());
        GrassmannElement { gens, terms: out }
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == Monomial::ONE && self.terms[0].1.is_one()
    }

    pub fn coefficient(&self, m: Monomial) -> Rational {
        self.terms
            .binary_search_by(|(k, _)| k.cmp(&m))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// The purely numeric part.
    pub fn body(&self) -> Rational {
        self.coefficient(Monomial::ONE)
    }

    /// The nilpotent part `x - body(x)`.
    pub fn soul(&self) -> Self {
        GrassmannElement {
            gens: self.gens,
            terms: self.terms.iter().filter(|(m, _)| *m != Monomial::ONE).cloned().collect(),
        }
    }

    pub fn is_invertible(&self) -> bool {
        !self.body().is_zero()
    }

    /// `Some(parity)` if homogeneous, `None` if mixed. Zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.iter().map(|(m, _)| m.parity());
        let first = it.next().unwrap_or(Parity::Even);
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    /// True if every term has parity `p` (vacuously true for zero).
    pub fn has_parity(&self, p: Parity) -> bool {
        self.terms.iter().all(|(m, _)| m.parity() == p)
    }

    /// Same element viewed in a context with more generators.
    pub fn lift(&self, gens: usize) -> Self {
        assert!(gens >= self.gens && gens <= MAX_GENERATORS);
        GrassmannElement { gens, terms: self.terms.clone() }
    }

    /// Drops to a smaller context; panics if a dropped generator occurs.
    pub fn restrict(&self, gens: usize) -> Self {
        for (m, _) in &self.terms {
            assert!(m.max_index() <= gens, "element uses generators beyond {gens}");
        }
        GrassmannElement { gens, terms: self.terms.clone() }
    }

    fn check_context(&self, other: &Self) -> Result<()> {
        if self.gens != other.gens {
            return Err(Error::ContextMismatch { left: self.gens, right: other.gens });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        Ok(self.product(other))
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let rhs = |q: &Rational| if negate { -q.clone() } else { q.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0, rhs(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let q = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !q.is_zero() {
                        out.push((a[i].0, q));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, q)| (*m, rhs(q))));
        GrassmannElement { gens: self.gens, terms: out }
    }

    fn product(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.gens);
        }
        if let [(Monomial::ONE, q)] = self.terms.as_slice() {
            return other.scale(q);
        }
        if let [(Monomial::ONE, q)] = other.terms.as_slice() {
            return self.scale(q);
        }
        if self.gens <= 12 {
            if let Some(x) = self.product_small(other) {
                return x;
            }
            let mut acc: Vec<Option<Rational>> = vec![None; 1 << self.gens];
            for (ma, qa) in &self.terms {
                for (mb, qb) in &other.terms {
                    if let Some((m, neg)) = ma.mul(*mb) {
                        let p = qa * qb;
                        let slot = &mut acc[m.bits() as usize];
                        let p = if neg { -p } else { p };
                        match slot {
                            Some(v) => *v += p,
                            None => *slot = Some(p),
                        }
                    }
                }
            }
            let mut terms: Vec<(Monomial, Rational)> = acc
                .into_iter()
                .enumerate()
                .filter_map(|(bits, q)| q.filter(|q| !q.is_zero()).map(|q| (Monomial(bits as u32), q)))
                .collect();
            terms.sort_by_key(|a| a.0);
            return GrassmannElement { gens: self.gens, terms };
        }
        let mut raw = Vec::new();
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                if let Some((m, neg)) = ma.mul(*mb) {
                    let p = qa * qb;
                    raw.push((m, if neg { -p } else { p }));
                }
            }
        }
        Self::from_terms(self.gens, raw)
    }

    /// Coefficients as `i64` numerators over a common denominator.
    fn integer_form(&self) -> Option<(Vec<(Monomial, i64)>, BigInt)> {
        let den = self.terms.iter().fold(BigInt::one(), |l, (_, q)| l.lcm(q.denom()));
        let nums = self
            .terms
            .iter()
            .map(|(m, q)| i64::try_from(q.numer() * (&den / q.denom())).ok().map(|n| (*m, n)))
            .collect::<Option<Vec<_>>>()?;
        Some((nums, den))
    }

    /// Product with `i128` accumulation; `None` if anything overflows.
    fn product_small(&self, other: &Self) -> Option<Self> {
        let (a, da) = self.integer_form()?;
        let (b, db) = other.integer_form()?;
        let mut acc = vec![0i128; 1 << self.gens];
        let mut used = vec![false; 1 << self.gens];
        for &(ma, qa) in &a {
            for &(mb, qb) in &b {
                if let Some((m, neg)) = ma.mul(mb) {
                    let p = qa as i128 * qb as i128;
                    let slot = &mut acc[m.bits() as usize];
                    *slot = if neg { slot.checked_sub(p)? } else { slot.checked_add(p)? };
                    used[m.bits() as usize] = true;
                }
            }
        }
        let den = da * db;
        let mut terms: Vec<(Monomial, Rational)> = acc
            .into_iter()
            .enumerate()
            .filter(|&(bits, q)| used[bits] && q != 0)
            .map(|(bits, q)| (Monomial(bits as u32), Rational::new(BigInt::from(q), den.clone())))
            .collect();
        terms.sort_by_key(|x| x.0);
        Some(GrassmannElement { gens: self.gens, terms })
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(self.gens);
        }
        GrassmannElement { gens: self.gens, terms: self.terms.iter().map(|(m, c)| (*m, c * q)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.gens);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `x⁻¹ = b⁻¹ Σ_k (−b⁻¹ n)^k` for `x = b + n`; the series stops because
    /// the soul is nilpotent.
    pub fn inverse(&self) -> Result<Self> {
        let b = self.body();
        if b.is_zero() {
            return Err(Error::NotInvertible);
        }
        let binv = b.recip();
        let step = self.soul().scale(&-binv.clone());
        let mut sum = Self::one(self.gens);
        let mut power = Self::one(self.gens);
        loop {
            power = &power * &step;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(sum.scale(&binv))
    }

    /// `self · other⁻¹`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inverse()?)
    }

    /// Keeps only the terms of the given parity.
    pub fn part(&self, p: Parity) -> Self {
        GrassmannElement {
            gens: self.gens,
            terms: self.terms.iter().filter(|(m, _)| m.parity() == p).cloned().collect(),
        }
    }

    /// Applies `f` to every coefficient (zero results dropped).
    pub fn map_terms(&self, mut f: impl FnMut(Monomial, &Rational) -> Option<(Monomial, Rational)>) -> Self {
        Self::from_terms(self.gens, self.terms.iter().filter_map(|(m, q)| f(*m, q)))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&GrassmannElement> for &GrassmannElement {
            type Output = GrassmannElement;
            fn $method(self, rhs: &GrassmannElement) -> GrassmannElement {
                self.$inner(rhs).expect("Grassmann context mismatch")
            }
        }
        impl $tr<GrassmannElement> for GrassmannElement {
            type Output = GrassmannElement;
            fn $method(self, rhs: GrassmannElement) -> GrassmannElement {
                (&self).$inner(&rhs).expect("Grassmann context mismatch")
            }
        }
        impl $tr<&GrassmannElement> for GrassmannElement {
            type Output = GrassmannElement;
            fn $method(self, rhs: &GrassmannElement) -> GrassmannElement {
                (&self).$inner(rhs).expect("Grassmann context mismatch")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl AddAssign<&GrassmannElement> for GrassmannElement {
    fn add_assign(&mut self, rhs: &GrassmannElement) {
        *self = &*self + rhs;
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        GrassmannElement { gens: self.gens, terms: self.terms.iter().map(|(m, q)| (*m, -q)).collect() }
    }
}

impl Neg for GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        -&self
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, q: &Rational) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GrassmannElement {
    /// Canonical text form, e.g. `2/3 - 1/9*t1*t2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, q)) in self.terms.iter().enumerate() {
            let neg = q.is_negative();
            let mag = q.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let gens: Vec<String> = m.indices().iter().map(|i| format!("t{i}")).collect();
            if gens.is_empty() {
                write_rational(f, &mag)?;
            } else {
                if !mag.is_one() {
                    write_rational(f, &mag)?;
                    f.write_str("*")?;
                }
                f.write_str(&gens.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: usize) -> GrassmannElement {
        GrassmannElement::generator(4, i).unwrap()
    }

    fn c(n: i64, d: i64) -> GrassmannElement {
        GrassmannElement::scalar(4, rat(n, d))
    }

    #[test]
    fn spec_addition_examples() {
        let x = &c(1, 1) + &(&t(1) * &t(2));
        assert_eq!(&x + &(-(&t(1) * &t(2))), c(1, 1));
        assert_eq!(&GrassmannElement::zero(4) + &x, x);
        assert_eq!(&t(1).scale(&rat(1, 2)) + &t(1).scale(&rat(1, 2)), t(1));
    }

    #[test]
    fn anticommutation_and_nilpotence() {
        assert_eq!(&t(2) * &t(1), -(&t(1) * &t(2)));
        assert!((&t(1) * &t(1)).is_zero());
    }

    #[test]
    fn expand_by_hand() {
        // (2 + t1)(3 + t2) = 6 + 2 t2 + 3 t1 + t1 t2
        let lhs = &(&c(2, 1) + &t(1)) * &(&c(3, 1) + &t(2));
        let rhs = &(&(&c(6, 1) + &t(2).scale(&rat(2, 1))) + &t(1).scale(&rat(3, 1))) + &(&t(1) * &t(2));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_string(), "6 + 3*t1 + 2*t2 + t1*t2");
    }

    #[test]
    fn parity_classification() {
        let t12 = &t(1) * &t(2);
        assert_eq!((&c(1, 1) + &t12).parity(), Some(Parity::Even));
        assert_eq!((&t(1) + &(&t12 * &t(3))).parity(), Some(Parity::Odd));
        assert_eq!((&c(1, 1) + &t(1)).parity(), None);
    }

    #[test]
    fn inverse_examples() {
        let t12 = &t(1) * &t(2);
        assert_eq!((&c(1, 1) + &t12).inverse().unwrap(), &c(1, 1) - &t12);
        assert_eq!(c(2, 1).inverse().unwrap(), c(1, 2));
        let x = &c(3, 1) - &(&t(2) * &t(1)).scale(&rat(1, 2));
        let xi = x.inverse().unwrap();
        assert!((&x * &xi).is_one());
        // x = 3 + 1/2 t1 t2, so x⁻¹ = 1/3 - 1/18 t1 t2
        assert_eq!(xi, &c(1, 3) - &t12.scale(&rat(1, 18)));
        assert_eq!(t(1).inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = GrassmannElement::one(2);
        let b = GrassmannElement::one(3);
        assert_eq!(a.try_add(&b), Err(Error::ContextMismatch { left: 2, right: 3 }));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn monomial_order_is_degree_then_lex() {
        let m = |v: &[usize]| Monomial::from_product(v).unwrap().0;
        let mut v = [m(&[2, 3]), m(&[1]), m(&[]), m(&[1, 3]), m(&[1, 2]), m(&[2])];
        v.sort();
        let shown: Vec<Vec<usize>> = v.iter().map(|x| x.indices()).collect();
        assert_eq!(shown, vec![vec![], vec![1], vec![2], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn display_forms() {
        let x = &c(2, 3) - &(&t(1) * &t(2)).scale(&rat(1, 9));
        assert_eq!(x.to_string(), "2/3 - 1/9*t1*t2");
        assert_eq!((-t(3)).to_string(), "-t3");
        assert_eq!(GrassmannElement::zero(3).to_string(), "0");
    }

    #[test]
    fn integer_fast_path_matches_rational_product() {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut random = |big: bool| {
            let terms: Vec<(Monomial, Rational)> = (0..6)
                .map(|_| {
                    let n: i64 = if big { r.gen_range(i64::MAX / 4..i64::MAX) } else { r.gen_range(-9..10) };
                    (Monomial(r.gen_range(0..16)), rat(n, r.gen_range(1..7)))
                })
                .collect();
            GrassmannElement::from_terms(4, terms)
        };
        for big in [false, true] {
            for _ in 0..200 {
                let (a, b) = (random(big), random(false));
                let mut raw = Vec::new();
                for (ma, qa) in &a.terms {
                    for (mb, qb) in &b.terms {
                        if let Some((m, neg)) = ma.mul(*mb) {
                            let p = qa * qb;
                            raw.push((m, if neg { -p } else { p }));
                        }
                    }
                }
                assert_eq!(&a * &b, GrassmannElement::from_terms(4, raw));
            }
        }
    }
}
