//! Supermatrices over the Grassmann algebra: products, parity reversal,
//! Berezinian and inverse Berezinian, ghost-column Berezinians, block
//! inversion and the super Cramer rule.
//!
//! Ghost columns are right-linear: putting `v·λ` (λ odd) into a slot gives
//! `ber_ghost(.., v, ..)·λ`. See [`SuperMatrix::ber_ghost`].

use std::fmt;

use crate::error::{Error, Result};
use crate::galgebra::{GrassmannElement as G, Monomial, Parity, Rational, MAX_GENERATORS};

/// `r|s`: numbers of even and odd rows (or columns).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SuperShape {
    pub even: usize,
    pub odd: usize,
}

impl SuperShape {
    pub fn new(even: usize, odd: usize) -> Self {
        SuperShape { even, odd }
    }

    pub fn total(self) -> usize {
        self.even + self.odd
    }

    /// Parity labels in standard order (evens first).
    pub fn parities(self) -> Vec<Parity> {
        let mut v = vec![Parity::Even; self.even];
        v.extend(std::iter::repeat_n(Parity::Odd, self.odd));
        v
    }

    pub fn reversed(self) -> Self {
        SuperShape { even: self.odd, odd: self.even }
    }
}

impl fmt::Display for SuperShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.even, self.odd)
    }
}

impl std::str::FromStr for SuperShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { pos: 0, msg: format!("expected shape `r|s`, got `{s}`") };
        let (a, b) = s.trim().split_once('|').ok_or_else(bad)?;
        Ok(SuperShape::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
    }
}

/// Column `position` holds a vector of the wrong parity for its slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GhostColumnSpec {
    pub position: usize,
    /// Parity of the slot (not of the vector placed there).
    pub declared_parity: Parity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperMatrix {
    gens: usize,
    row_parities: Vec<Parity>,
    col_parities: Vec<Parity>,
    entries: Vec<Vec<G>>,
}

impl SuperMatrix {
    pub fn new(gens: usize, row_parities: Vec<Parity>, col_parities: Vec<Parity>, entries: Vec<Vec<G>>) -> Result<Self> {
        if entries.len() != row_parities.len() {
            return Err(Error::Shape(format!("{} rows but {} row labels", entries.len(), row_parities.len())));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != col_parities.len() {
                return Err(Error::Shape(format!("row {} has {} entries, expected {}", i + 1, row.len(), col_parities.len())));
            }
            for x in row {
                if x.gens() != gens {
                    return Err(Error::ContextMismatch { left: gens, right: x.gens() });
                }
            }
        }
        Ok(SuperMatrix { gens, row_parities, col_parities, entries })
    }

    /// Matrix with standard-order labels `rows` × `cols`.
    pub fn from_shapes(gens: usize, rows: SuperShape, cols: SuperShape, entries: Vec<Vec<G>>) -> Result<Self> {
        Self::new(gens, rows.parities(), cols.parities(), entries)
    }

    pub fn zeros(gens: usize, rows: Vec<Parity>, cols: Vec<Parity>) -> Self {
        let entries = vec![vec![G::zero(gens); cols.len()]; rows.len()];
        SuperMatrix { gens, row_parities: rows, col_parities: cols, entries }
    }

    pub fn identity(gens: usize, shape: SuperShape) -> Self {
        let mut m = Self::zeros(gens, shape.parities(), shape.parities());
        for i in 0..shape.total() {
            m.entries[i][i] = G::one(gens);
        }
        m
    }

    pub fn gens(&self) -> usize {
        self.gens
    }
    pub fn nrows(&self) -> usize {
        self.row_parities.len()
    }
    pub fn ncols(&self) -> usize {
        self.col_parities.len()
    }
    pub fn row_parities(&self) -> &[Parity] {
        &self.row_parities
    }
    pub fn col_parities(&self) -> &[Parity] {
        &self.col_parities
    }
    pub fn entries(&self) -> &[Vec<G>] {
        &self.entries
    }
    pub fn get(&self, i: usize, j: usize) -> &G {
        &self.entries[i][j]
    }
    pub fn set(&mut self, i: usize, j: usize, x: G) {
        assert_eq!(x.gens(), self.gens);
        self.entries[i][j] = x;
    }

    pub fn row_shape(&self) -> SuperShape {
        shape_of(&self.row_parities)
    }
    pub fn col_shape(&self) -> SuperShape {
        shape_of(&self.col_parities)
    }

    pub fn column(&self, j: usize) -> Vec<G> {
        self.entries.iter().map(|r| r[j].clone()).collect()
    }

    /// Copy with column `j` replaced by `v` (labels unchanged).
    pub fn with_column(&self, j: usize, v: &[G]) -> Self {
        assert_eq!(v.len(), self.nrows());
        let mut m = self.clone();
        for (i, x) in v.iter().enumerate() {
            m.entries[i][j] = x.clone();
        }
        m
    }

    /// Submatrix with the given columns, in the given order, labels kept.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        SuperMatrix {
            gens: self.gens,
            row_parities: self.row_parities.clone(),
            col_parities: cols.iter().map(|&j| self.col_parities[j]).collect(),
            entries: self.entries.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect(),
        }
    }

    /// Same matrix with relabeled column parities.
    pub fn with_col_parities(&self, cols: Vec<Parity>) -> Self {
        assert_eq!(cols.len(), self.ncols());
        SuperMatrix { col_parities: cols, ..self.clone() }
    }

    /// Cells whose entry parity differs from row + column parity.
    pub fn parity_violations(&self) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.has_parity(self.row_parities[i] + self.col_parities[j]) {
                    bad.push((i, j));
                }
            }
        }
        bad
    }

    pub fn is_even(&self) -> bool {
        self.parity_violations().is_empty()
    }

    fn require_even(&self, what: &str) -> Result<()> {
        let bad = self.parity_violations();
        if bad.is_empty() {
            Ok(())
        } else {
            let cells: Vec<String> = bad.iter().map(|(i, j)| format!("({},{})", i + 1, j + 1)).collect();
            Err(Error::Parity(format!("{what}: entries of wrong parity at {}", cells.join(", "))))
        }
    }

    pub fn lift(&self, gens: usize) -> Self {
        SuperMatrix {
            gens,
            row_parities: self.row_parities.clone(),
            col_parities: self.col_parities.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(|x| x.lift(gens)).collect()).collect(),
        }
    }

    pub fn matmul(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        if self.gens != other.gens {
            return Err(Error::ContextMismatch { left: self.gens, right: other.gens });
        }
        if self.col_parities != other.row_parities {
            return Err(Error::Shape(format!(
                "cannot multiply: column labels {} vs row labels {}",
                labels(&self.col_parities),
                labels(&other.row_parities)
            )));
        }
        let entries = (0..self.nrows())
            .map(|i| {
                (0..other.ncols())
                    .map(|j| {
                        let mut acc = G::zero(self.gens);
                        for k in 0..self.ncols() {
                            let a = &self.entries[i][k];
                            let b = &other.entries[k][j];
                            if !a.is_zero() && !b.is_zero() {
                                acc += &(a * b);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(SuperMatrix {
            gens: self.gens,
            row_parities: self.row_parities.clone(),
            col_parities: other.col_parities.clone(),
            entries,
        })
    }

    /// Row and column orders that bring the labels to standard form (stable).
    fn standard_order(p: &[Parity]) -> (Vec<usize>, Vec<usize>) {
        let ev = (0..p.len()).filter(|&i| p[i] == Parity::Even).collect();
        let od = (0..p.len()).filter(|&i| p[i] == Parity::Odd).collect();
        (ev, od)
    }

    /// The four blocks `[[A00, A01], [A10, A11]]` with respect to the labels.
    pub fn blocks(&self) -> [Vec<Vec<G>>; 4] {
        let (re, ro) = Self::standard_order(&self.row_parities);
        let (ce, co) = Self::standard_order(&self.col_parities);
        let pick = |rows: &[usize], cols: &[usize]| -> Vec<Vec<G>> {
            rows.iter().map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect()).collect()
        };
        [pick(&re, &ce), pick(&re, &co), pick(&ro, &ce), pick(&ro, &co)]
    }

    /// `A^Π`: labels flipped, blocks swapped to `[[A11, A10], [A01, A00]]`.
    pub fn parity_reverse(&self) -> SuperMatrix {
        let (re, ro) = Self::standard_order(&self.row_parities);
        let (ce, co) = Self::standard_order(&self.col_parities);
        let rows: Vec<usize> = ro.iter().chain(re.iter()).copied().collect();
        let cols: Vec<usize> = co.iter().chain(ce.iter()).copied().collect();
        SuperMatrix {
            gens: self.gens,
            row_parities: rows.iter().map(|&i| self.row_parities[i].flip()).collect(),
            col_parities: cols.iter().map(|&j| self.col_parities[j].flip()).collect(),
            entries: rows.iter().map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect()).collect(),
        }
    }

    fn require_square(&self) -> Result<()> {
        if self.row_shape() != self.col_shape() {
            return Err(Error::Shape(format!("not square: rows {} vs columns {}", self.row_shape(), self.col_shape())));
        }
        Ok(())
    }

    /// Both Schur-complement formulas for `Ber`, each `None` when its
    /// defining inverse does not exist:
    /// `det(g00 − g01 g11⁻¹ g10) / det g11` and `det g00 / det(g11 − g10 g00⁻¹ g01)`.
    pub fn ber_schur_pair(&self) -> Result<(Option<G>, Option<G>)> {
        self.require_square()?;
        self.require_even("ber")?;
        let n = self.gens;
        let [a00, a01, a10, a11] = self.blocks();
        let first = match inverse_commuting(&a11, n) {
            Some(inv11) => {
                let s = mat_sub(&a00, &mat_mul(&mat_mul(&a01, &inv11, n), &a10, n));
                Some(det(&s, n) * det(&a11, n).inverse().expect("invertible block has invertible det"))
            }
            None => None,
        };
        let second = match inverse_commuting(&a00, n) {
            Some(inv00) => {
                let s = mat_sub(&a11, &mat_mul(&mat_mul(&a10, &inv00, n), &a01, n));
                det(&s, n).inverse().ok().map(|d| det(&a00, n) * d)
            }
            None => None,
        };
        Ok((first, second))
    }

    /// Berezinian of an even square supermatrix, by the first Schur formula
    /// when the odd-odd block is invertible and by the second otherwise.
    pub fn ber(&self) -> Result<G> {
        self.require_square()?;
        self.require_even("ber")?;
        let n = self.gens;
        let [a00, a01, a10, a11] = self.blocks();
        if let Some(inv11) = inverse_commuting(&a11, n) {
            let s = mat_sub(&a00, &mat_mul(&mat_mul(&a01, &inv11, n), &a10, n));
            return Ok(det(&s, n) * det(&a11, n).inverse().expect("invertible block has invertible det"));
        }
        match self.ber_schur_pair()? {
            (_, Some(b)) => Ok(b),
            _ => Err(Error::BerezinianUndefined("odd-odd block is not invertible".into())),
        }
    }

    /// An even square supermatrix is invertible iff the bodies of both
    /// diagonal blocks are.
    pub fn is_invertible(&self) -> bool {
        if self.require_square().is_err() || !self.is_even() {
            return false;
        }
        let body = |b: &[Vec<G>]| -> Vec<Vec<G>> {
            b.iter().map(|r| r.iter().map(|x| G::scalar(0, x.body())).collect()).collect()
        };
        let [a00, _, _, a11] = self.blocks();
        inverse_commuting(&body(&a00), 0).is_some() && inverse_commuting(&body(&a11), 0).is_some()
    }

    /// `Ber*(g) = Ber(g^Π)`.
    pub fn ber_star(&self) -> Result<G> {
        self.parity_reverse().ber()
    }

    /// Berezinian (even slot) or inverse Berezinian (odd slot) with one ghost
    /// column, i.e. a column whose entries have the wrong parity for its slot.
    ///
    /// The ghost column `v` is multiplied on the right by a fresh odd
    /// generator `τ = t_{N+1}`, which makes the matrix even. Its (inverse)
    /// Berezinian equals `X·τ`, and `X` is the returned value. Since `τ` has
    /// the highest index, `X` is read off by deleting `τ` from every monomial.
    pub fn ber_ghost(&self, ghost: GhostColumnSpec) -> Result<G> {
        self.require_square()?;
        let j = ghost.position;
        if j >= self.ncols() {
            return Err(Error::Shape(format!("ghost column {} out of range", j + 1)));
        }
        if ghost.declared_parity != self.col_parities[j] {
            return Err(Error::Parity(format!("ghost slot {} is labeled {}", j + 1, self.col_parities[j])));
        }
        let mut offending: Vec<usize> = Vec::new();
        for (jj, _) in self.col_parities.iter().enumerate() {
            if jj == j {
                continue;
            }
            if (0..self.nrows()).any(|i| !self.entries[i][jj].has_parity(self.row_parities[i] + self.col_parities[jj])) {
                offending.push(jj);
            }
        }
        if !offending.is_empty() {
            let proper_wrong = (0..self.nrows()).all(|i| {
                self.entries[i][j].has_parity(self.row_parities[i] + self.col_parities[j])
            });
            if proper_wrong && offending.len() == 1 {
                return Err(Error::Parity(format!("ghost declared at column {} but column {} has the wrong parity", j + 1, offending[0] + 1)));
            }
            return Err(Error::MultipleGhosts);
        }
        for i in 0..self.nrows() {
            if !self.entries[i][j].has_parity(self.row_parities[i] + self.col_parities[j].flip()) {
                return Err(Error::Parity(format!("ghost column {} is not homogeneous of the wrong parity at row {}", j + 1, i + 1)));
            }
        }
        let n = self.gens;
        if n + 1 > MAX_GENERATORS {
            return Err(Error::Shape("no room for the auxiliary generator".into()));
        }
        let tau = G::term(n + 1, Monomial::generator(n + 1), Rational::from_integer(1.into()));
        let mut lifted = self.lift(n + 1);
        for i in 0..self.nrows() {
            let x = &lifted.entries[i][j] * &tau;
            lifted.entries[i][j] = x;
        }
        let full = match ghost.declared_parity {
            Parity::Even => lifted.ber()?,
            Parity::Odd => lifted.ber_star()?,
        };
        let tau_bit = Monomial::generator(n + 1);
        let mut terms = Vec::new();
        for (m, q) in full.terms() {
            assert!(m.contains(n + 1), "ghost Berezinian has a part without the auxiliary generator");
            terms.push((Monomial::from_bits(m.bits() & !tau_bit.bits()), q.clone()));
        }
        Ok(G::from_terms(n, terms))
    }

    /// Inverse of an even invertible square supermatrix by block (Schur) inversion.
    pub fn inverse_matrix(&self) -> Result<SuperMatrix> {
        self.require_square()?;
        self.require_even("inverse")?;
        let n = self.gens;
        let [a00, a01, a10, a11] = self.blocks();
        let inv11 = inverse_commuting(&a11, n).ok_or(Error::NotInvertible)?;
        // S = A00 − A01 A11⁻¹ A10 has the same body as A00.
        let s = mat_sub(&a00, &mat_mul(&mat_mul(&a01, &inv11, n), &a10, n));
        let sinv = inverse_commuting(&s, n).ok_or(Error::NotInvertible)?;
        let b00 = sinv.clone();
        let b01 = mat_neg(&mat_mul(&mat_mul(&sinv, &a01, n), &inv11, n));
        let b10 = mat_neg(&mat_mul(&mat_mul(&inv11, &a10, n), &sinv, n));
        let b11 = mat_add(&inv11, &mat_mul(&mat_mul(&mat_mul(&mat_mul(&inv11, &a10, n), &sinv, n), &a01, n), &inv11, n));
        // Assemble in standard order, then permute back to the given labels.
        let (re, ro) = Self::standard_order(&self.row_parities);
        let (ce, co) = Self::standard_order(&self.col_parities);
        // The inverse maps row space to column space: its rows follow the
        // columns of `self` and its columns follow the rows.
        let mut out = SuperMatrix::zeros(n, self.col_parities.clone(), self.row_parities.clone());
        for (bi, &i) in ce.iter().enumerate() {
            for (bj, &j) in re.iter().enumerate() {
                out.entries[i][j] = b00[bi][bj].clone();
            }
            for (bj, &j) in ro.iter().enumerate() {
                out.entries[i][j] = b01[bi][bj].clone();
            }
        }
        for (bi, &i) in co.iter().enumerate() {
            for (bj, &j) in re.iter().enumerate() {
                out.entries[i][j] = b10[bi][bj].clone();
            }
            for (bj, &j) in ro.iter().enumerate() {
                out.entries[i][j] = b11[bi][bj].clone();
            }
        }
        Ok(out)
    }

    /// Solves `A c = b` by the super Cramer rule. Even slots use `Ber` with
    /// `b` in place of the column, odd slots use `Ber*`; a wrong-parity
    /// substitution becomes a ghost column.
    pub fn super_cramer_solve(&self, b: &[G]) -> Result<Vec<G>> {
        self.require_square()?;
        self.require_even("cramer")?;
        if b.len() != self.nrows() {
            return Err(Error::Shape(format!("right-hand side has {} entries, expected {}", b.len(), self.nrows())));
        }
        let vec_parity = column_parity(b, &self.row_parities)
            .ok_or_else(|| Error::Parity("right-hand side is not a homogeneous column".into()))?;
        let ber = self.ber().map_err(|_| Error::NotInvertible)?;
        let ber_star = self.ber_star().map_err(|_| Error::NotInvertible)?;
        let ber_inv = ber.inverse()?;
        let ber_star_inv = ber_star.inverse()?;
        let mut c = Vec::with_capacity(self.ncols());
        for j in 0..self.ncols() {
            let slot = self.col_parities[j];
            let m = self.with_column(j, b);
            let num = if vec_parity == Parity::Even {
                // proper in even slots, ghost in odd ones
                match slot {
                    Parity::Even => m.ber()?,
                    Parity::Odd => m.ber_ghost(GhostColumnSpec { position: j, declared_parity: slot })?,
                }
            } else {
                match slot {
                    Parity::Even => m.ber_ghost(GhostColumnSpec { position: j, declared_parity: slot })?,
                    Parity::Odd => m.ber_star()?,
                }
            };
            c.push(match slot {
                Parity::Even => &num * &ber_inv,
                Parity::Odd => &num * &ber_star_inv,
            });
        }
        Ok(c)
    }

    /// Column determinant `Σ_σ sgn σ · M[σ(1)][0] · M[σ(2)][1] ⋯`, products
    /// taken in column order; entries need not commute.
    pub fn det_col(&self) -> Result<G> {
        if self.nrows() != self.ncols() {
            return Err(Error::Shape("det_col needs a square array".into()));
        }
        Ok(det_col(&self.entries, self.gens))
    }
}

/// Parity of a column vector relative to row labels: even if each entry has
/// the parity of its row. `None` if mixed.
pub fn column_parity(v: &[G], rows: &[Parity]) -> Option<Parity> {
    if v.iter().zip(rows).all(|(x, &p)| x.has_parity(p)) {
        Some(Parity::Even)
    } else if v.iter().zip(rows).all(|(x, &p)| x.has_parity(p.flip())) {
        Some(Parity::Odd)
    } else {
        None
    }
}

fn shape_of(p: &[Parity]) -> SuperShape {
    let even = p.iter().filter(|&&x| x == Parity::Even).count();
    SuperShape::new(even, p.len() - even)
}

fn labels(p: &[Parity]) -> String {
    p.iter().map(|x| if *x == Parity::Even { 'e' } else { 'o' }).collect()
}

pub(crate) fn mat_mul(a: &[Vec<G>], b: &[Vec<G>], gens: usize) -> Vec<Vec<G>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = G::zero(gens);
                    for k in 0..inner.min(row.len()) {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

// Products through an empty block come back with empty rows; such a
// missing entry counts as zero.
fn entry_or_zero(b: &[Vec<G>], i: usize, j: usize) -> Option<&G> {
    b.get(i).and_then(|r| r.get(j))
}

fn mat_add(a: &[Vec<G>], b: &[Vec<G>]) -> Vec<Vec<G>> {
    a.iter()
        .enumerate()
        .map(|(i, x)| x.iter().enumerate().map(|(j, p)| entry_or_zero(b, i, j).map_or_else(|| p.clone(), |q| p + q)).collect())
        .collect()
}

fn mat_sub(a: &[Vec<G>], b: &[Vec<G>]) -> Vec<Vec<G>> {
    a.iter()
        .enumerate()
        .map(|(i, x)| x.iter().enumerate().map(|(j, p)| entry_or_zero(b, i, j).map_or_else(|| p.clone(), |q| p - q)).collect())
        .collect()
}

fn mat_neg(a: &[Vec<G>]) -> Vec<Vec<G>> {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// Determinant of a square array of mutually commuting (even) entries.
///
/// Cofactor expansion up to size 4. Larger arrays use Gaussian elimination
/// with pivots of nonzero body; if some column has no such pivot the body
/// matrix is singular and the determinant is computed by Laplace expansion
/// over column subsets, which needs no division.
pub fn det(a: &[Vec<G>], gens: usize) -> G {
    let n = a.len();
    if n == 0 {
        return G::one(gens);
    }
    if n <= 4 {
        return det_cofactor(a, gens);
    }
    det_eliminate(a, gens).unwrap_or_else(|| det_laplace(a, gens))
}

fn det_cofactor(a: &[Vec<G>], gens: usize) -> G {
    let n = a.len();
    match n {
        0 => G::one(gens),
        1 => a[0][0].clone(),
        2 => &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0]),
        _ => {
            let mut acc = G::zero(gens);
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<G>> =
                    a[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
                let term = &a[0][j] * &det_cofactor(&minor, gens);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

fn det_eliminate(a: &[Vec<G>], gens: usize) -> Option<G> {
    let n = a.len();
    let mut m: Vec<Vec<G>> = a.to_vec();
    let mut d = G::one(gens);
    for col in 0..n {
        let p = (col..n).find(|&r| m[r][col].is_invertible())?;
        if p != col {
            m.swap(p, col);
            d = -d;
        }
        let pivot = m[col][col].clone();
        let pinv = pivot.inverse().ok()?;
        d = &d * &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &pinv;
            for k in col..n {
                let v = &m[r][k] - &(&f * &m[col][k]);
                m[r][k] = v;
            }
        }
    }
    Some(d)
}

fn det_laplace(a: &[Vec<G>], gens: usize) -> G {
    // dp[S] = det of the rows 0..|S| restricted to the column set S.
    let n = a.len();
    let mut dp: Vec<Option<G>> = vec![None; 1 << n];
    dp[0] = Some(G::one(gens));
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = G::zero(gens);
        for j in 0..n {
            if mask & (1 << j) == 0 || a[row][j].is_zero() {
                continue;
            }
            let rest = mask & !(1 << j);
            let sub = dp[rest].as_ref().expect("filled in increasing order");
            // sign: number of chosen columns to the right of j
            let above = (rest >> j).count_ones();
            let t = &a[row][j] * sub;
            acc = if above % 2 == 0 { &acc + &t } else { &acc - &t };
        }
        dp[mask] = Some(acc);
    }
    dp[(1 << n) - 1].take().unwrap()
}

/// Inverse of a square array of commuting entries (Gauss–Jordan on body
/// pivots). `None` when the body is singular.
pub fn inverse_commuting(a: &[Vec<G>], gens: usize) -> Option<Vec<Vec<G>>> {
    let n = a.len();
    let mut m: Vec<Vec<G>> = a.to_vec();
    let mut inv: Vec<Vec<G>> = (0..n).map(|i| (0..n).map(|j| if i == j { G::one(gens) } else { G::zero(gens) }).collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| m[r][col].is_invertible())?;
        m.swap(p, col);
        inv.swap(p, col);
        let pinv = m[col][col].inverse().ok()?;
        for k in 0..n {
            m[col][k] = &m[col][k] * &pinv;
            inv[col][k] = &inv[col][k] * &pinv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for k in 0..n {
                let v = &m[r][k] - &(&f * &m[col][k]);
                m[r][k] = v;
                let w = &inv[r][k] - &(&f * &inv[col][k]);
                inv[r][k] = w;
            }
        }
    }
    Some(inv)
}

/// Column determinant of a square array (entries need not commute).
pub fn det_col(a: &[Vec<G>], gens: usize) -> G {
    let n = a.len();
    let mut acc = G::zero(gens);
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p, odd| {
        let mut prod = G::one(gens);
        for (col, &row) in p.iter().enumerate() {
            if prod.is_zero() {
                break;
            }
            prod = &prod * &a[row][col];
        }
        if !prod.is_zero() {
            acc = if odd { &acc - &prod } else { &acc + &prod };
        }
    });
    acc
}

/// Visits all permutations of `v[k..]` with their sign relative to the input.
pub(crate) fn permutations(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize], bool)) {
    fn go(v: &mut Vec<usize>, k: usize, odd: bool, f: &mut dyn FnMut(&[usize], bool)) {
        if k == v.len() {
            f(v, odd);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            go(v, k + 1, odd ^ (i != k), f);
            v.swap(k, i);
        }
    }
    go(v, k, false, f)
}

/// Convenience: is a Grassmann element numerically zero in every coefficient.
pub fn is_zero_matrix(m: &SuperMatrix) -> bool {
    m.entries.iter().all(|r| r.iter().all(|x| x.is_zero()))
}
