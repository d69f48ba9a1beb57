//! Points of the super Grassmannian `G_{r|s}(n|m)` as matrices of homogeneous
//! coordinates, with affine charts, chart changes and Π-duality.
//!
//! Index conventions: chart columns are 1-based, even columns `1..=n` and
//! odd columns `1..=m`; in the matrix the odd column `μ` sits at `n + μ − 1`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::galgebra::{GrassmannElement as G, Parity, Rational};
use crate::random::{self, SeededRng};
use crate::smatrix::{SuperMatrix, SuperShape};

/// Chart `(a1<…<ar | μ1<…<μs)`: the columns whose submatrix is made the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChartIndex {
    pub even_cols: Vec<usize>,
    pub odd_cols: Vec<usize>,
}

impl ChartIndex {
    pub fn new(even_cols: Vec<usize>, odd_cols: Vec<usize>) -> Self {
        ChartIndex { even_cols, odd_cols }
    }

    pub fn shape(&self) -> SuperShape {
        SuperShape::new(self.even_cols.len(), self.odd_cols.len())
    }

    pub fn validate(&self, ambient: SuperShape) -> Result<()> {
        let ok = |v: &[usize], max: usize| v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|&i| i >= 1 && i <= max);
        if !ok(&self.even_cols, ambient.even) || !ok(&self.odd_cols, ambient.odd) {
            return Err(Error::ChartNotAdmissible(format!("{self} (indices must increase and fit {ambient})")));
        }
        Ok(())
    }

    /// 0-based matrix columns, even ones first.
    pub fn matrix_columns(&self, ambient: SuperShape) -> Vec<usize> {
        self.even_cols.iter().map(|a| a - 1).chain(self.odd_cols.iter().map(|m| ambient.even + m - 1)).collect()
    }
}

impl fmt::Display for ChartIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", j(&self.even_cols), j(&self.odd_cols))
    }
}

impl FromStr for ChartIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("chart `{s}` needs a `|`") })?;
        let list = |t: &str, offset: usize| -> Result<Vec<usize>> {
            if t.trim().is_empty() {
                return Ok(Vec::new());
            }
            t.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse { pos: offset, msg: format!("bad chart index `{}`", x.trim()) })
                })
                .collect()
        };
        Ok(ChartIndex::new(list(a, 0)?, list(b, a.len() + 1)?))
    }
}

/// All charts of `G_{r|s}(n|m)` in lexicographic order of `(even_cols, odd_cols)`.
pub fn charts(shape: SuperShape, ambient: SuperShape) -> Vec<ChartIndex> {
    let mut out = Vec::new();
    for e in subsets(ambient.even, shape.even) {
        for o in subsets(ambient.odd, shape.odd) {
            out.push(ChartIndex::new(e.clone(), o));
        }
    }
    out
}

/// Strictly increasing `k`-subsets of `1..=n`, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(1, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// An `r|s`-plane in `n|m`-space given by an even `r|s × n|m` matrix `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneRep {
    u: SuperMatrix,
}

impl PlaneRep {
    /// Validates labels (standard order), evenness and the rank condition on the body.
    pub fn new(u: SuperMatrix) -> Result<Self> {
        let shape = u.row_shape();
        let ambient = u.col_shape();
        if u.row_parities() != shape.parities().as_slice() || u.col_parities() != ambient.parities().as_slice() {
            return Err(Error::Shape("plane matrices list even rows/columns before odd ones".into()));
        }
        if shape.even > ambient.even || shape.odd > ambient.odd {
            return Err(Error::ImpossibleShape(format!("{shape} in {ambient}")));
        }
        let bad = u.parity_violations();
        if !bad.is_empty() {
            let (i, j) = bad[0];
            return Err(Error::Parity(format!("plane matrix is not even (cell ({},{}))", i + 1, j + 1)));
        }
        let body = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| -> Vec<Vec<Rational>> {
            rows.map(|i| cols.clone().map(|j| u.get(i, j).body()).collect()).collect()
        };
        let r0 = rational_rank(body(0..shape.even, 0..ambient.even));
        let r1 = rational_rank(body(shape.even..shape.total(), ambient.even..ambient.total()));
        if r0 != shape.even || r1 != shape.odd {
            return Err(Error::Shape(format!("rank condition fails: body ranks {r0}|{r1} for a {shape}-plane")));
        }
        Ok(PlaneRep { u })
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.u
    }
    pub fn shape(&self) -> SuperShape {
        self.u.row_shape()
    }
    pub fn ambient(&self) -> SuperShape {
        self.u.col_shape()
    }
    pub fn gens(&self) -> usize {
        self.u.gens()
    }

    /// The square submatrix `U^c`.
    pub fn chart_block(&self, c: &ChartIndex) -> Result<SuperMatrix> {
        c.validate(self.ambient())?;
        if c.shape() != self.shape() {
            return Err(Error::ChartNotAdmissible(format!("{c} has shape {}, plane has {}", c.shape(), self.shape())));
        }
        Ok(self.u.select_columns(&c.matrix_columns(self.ambient())))
    }

    pub fn is_admissible(&self, c: &ChartIndex) -> bool {
        self.chart_block(c).map(|b| b.is_invertible()).unwrap_or(false)
    }

    /// `(U^c)⁻¹ U`.
    pub fn normalize_to_chart(&self, c: &ChartIndex) -> Result<PlaneRep> {
        let block = self.chart_block(c)?;
        let inv = block.inverse_matrix().map_err(|_| Error::ChartNotAdmissible(c.to_string()))?;
        Ok(PlaneRep { u: inv.matmul(&self.u)? })
    }

    /// True if the `c`-columns form the identity.
    pub fn is_normalized_in(&self, c: &ChartIndex) -> bool {
        match self.chart_block(c) {
            Ok(b) => b == SuperMatrix::identity(self.gens(), self.shape()),
            Err(_) => false,
        }
    }

    /// Passes from the affine coordinates of chart `from` to those of `to`.
    pub fn change_chart(&self, from: &ChartIndex, to: &ChartIndex) -> Result<PlaneRep> {
        if !self.is_normalized_in(from) {
            return Err(Error::ChartNotAdmissible(format!("plane is not normalized in {from}")));
        }
        self.normalize_to_chart(to)
    }

    pub fn admissible_charts(&self) -> Vec<ChartIndex> {
        charts(self.shape(), self.ambient()).into_iter().filter(|c| self.is_admissible(c)).collect()
    }

    /// `U^Π`, a `s|r`-plane in `m|n`-space.
    pub fn pi_dual(&self) -> PlaneRep {
        PlaneRep { u: self.u.parity_reverse() }
    }

    /// `g·U`.
    pub fn transform(&self, g: &SuperMatrix) -> Result<PlaneRep> {
        PlaneRep::new(g.matmul(&self.u)?)
    }

    /// Counts the non-chart entries of a normalized matrix by parity.
    pub fn free_coordinate_count(&self, c: &ChartIndex) -> Result<SuperShape> {
        if !self.is_normalized_in(c) {
            return Err(Error::ChartNotAdmissible(format!("plane is not normalized in {c}")));
        }
        let fixed = c.matrix_columns(self.ambient());
        let mut count = SuperShape::new(0, 0);
        for i in 0..self.u.nrows() {
            for j in 0..self.u.ncols() {
                if fixed.contains(&j) {
                    continue;
                }
                match self.u.row_parities()[i] + self.u.col_parities()[j] {
                    Parity::Even => count.even += 1,
                    Parity::Odd => count.odd += 1,
                }
            }
        }
        Ok(count)
    }
}

/// `r(n−r)+s(m−s) | r(m−s)+s(n−r)`.
pub fn dimension(shape: SuperShape, ambient: SuperShape) -> Result<SuperShape> {
    let (r, s, n, m) = (shape.even, shape.odd, ambient.even, ambient.odd);
    if r > n || s > m {
        return Err(Error::ImpossibleShape(format!("{shape} in {ambient}")));
    }
    Ok(SuperShape::new(r * (n - r) + s * (m - s), r * (m - s) + s * (n - r)))
}

/// Random plane: identity in a random chart, random entries elsewhere.
pub fn random_plane(shape: SuperShape, ambient: SuperShape, gens: usize, seed: u64) -> Result<PlaneRep> {
    let mut rng = random::rng(seed);
    random_plane_with(shape, ambient, gens, &mut rng)
}

pub fn random_plane_with(shape: SuperShape, ambient: SuperShape, gens: usize, rng: &mut SeededRng) -> Result<PlaneRep> {
    if shape.even > ambient.even || shape.odd > ambient.odd {
        return Err(Error::ImpossibleShape(format!("{shape} in {ambient}")));
    }
    let chart = ChartIndex::new(
        random::random_subset(ambient.even, shape.even, rng),
        random::random_subset(ambient.odd, shape.odd, rng),
    );
    let cols = chart.matrix_columns(ambient);
    let rp = shape.parities();
    let cp = ambient.parities();
    let mut entries = Vec::with_capacity(rp.len());
    for (i, &pr) in rp.iter().enumerate() {
        let mut row = Vec::with_capacity(cp.len());
        for (j, &pc) in cp.iter().enumerate() {
            if let Some(k) = cols.iter().position(|&c| c == j) {
                row.push(if k == i { G::one(gens) } else { G::zero(gens) });
            } else {
                row.push(random_entry(gens, pr + pc, rng));
            }
        }
        entries.push(row);
    }
    PlaneRep::new(SuperMatrix::new(gens, rp, cp, entries)?)
}

fn random_entry(gens: usize, p: Parity, rng: &mut SeededRng) -> G {
    // Occasional exact zeros keep some minors degenerate.
    if rng.gen_ratio(1, 8) {
        return G::zero(gens);
    }
    random::random_element(gens, p, rng)
}

/// Rank of a rational matrix by exact elimination.
pub fn rational_rank(mut a: Vec<Vec<Rational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(p, rank);
        for r in 0..rows {
            if r != rank && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[rank][col];
                for k in col..cols {
                    let v = &a[r][k] - &(&f * &a[rank][k]);
                    a[r][k] = v;
                }
            }
        }
        rank += 1;
    }
    rank
}
