//! Plücker transforms `pl(U)(P) = Ber(UP)` and `pl*(U)(P) = Ber*(UP)`,
//! essential super Plücker coordinates of an `r|s`-plane, the local inverse
//! map, the weighted `(λ, λ⁻¹)` equivalence and the relation families for
//! `r|0`, `1|1` and general `r|s`.
//!
//! Coordinates are keyed by two index groups, the even slots and the odd
//! slots. `u` keys carry at most one odd index in the even slots (the ghost,
//! stored at the last even slot); `u*` keys carry at most one even index in
//! the odd slots (stored at the first odd slot).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::galgebra::{GrassmannElement as G, Parity};
use crate::grassmannian::{subsets, ChartIndex, PlaneRep};
use crate::multivector::{parse_tuple, tuple_to_string, SIdx};
use crate::smatrix::{GhostColumnSpec, SuperMatrix, SuperShape};

/// An array of `r|s` covectors as an `n|m × r|s` matrix, possibly with one
/// column of the wrong parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovectorArray {
    pub p: SuperMatrix,
    pub ghost: Option<GhostColumnSpec>,
}

impl CovectorArray {
    pub fn new(p: SuperMatrix, ghost: Option<GhostColumnSpec>) -> Self {
        CovectorArray { p, ghost }
    }

    /// Basis covectors `(e^{x_1}, …, e^{x_r} | e^{y_1}, …, e^{y_s})`; a
    /// basis covector of the wrong parity for its slot becomes the ghost.
    pub fn basis(ambient: SuperShape, even_args: &[SIdx], odd_args: &[SIdx], gens: usize) -> Result<Self> {
        let shape = SuperShape::new(even_args.len(), odd_args.len());
        let mut p = SuperMatrix::zeros(gens, ambient.parities(), shape.parities());
        let mut ghost = None;
        for (j, (&x, slot)) in even_args.iter().zip(std::iter::repeat(Parity::Even)).chain(odd_args.iter().zip(std::iter::repeat(Parity::Odd))).enumerate() {
            if !x.fits(ambient) {
                return Err(Error::Shape(format!("index {x} does not fit {ambient}")));
            }
            p.set(x.column(ambient), j, G::one(gens));
            if x.parity() != slot {
                if ghost.is_some() {
                    return Err(Error::MultipleGhosts);
                }
                ghost = Some(GhostColumnSpec { position: j, declared_parity: slot });
            }
        }
        Ok(CovectorArray { p, ghost })
    }
}

fn product(l: &PlaneRep, p: &CovectorArray) -> Result<SuperMatrix> {
    if p.p.col_parities() != l.shape().parities().as_slice() {
        return Err(Error::Shape(format!("covector array must have {} columns in standard order", l.shape())));
    }
    l.matrix().matmul(&p.p)
}

/// `pl(U)(P) = Ber(UP)`; a ghost column must sit in an even slot.
pub fn plucker_eval(l: &PlaneRep, p: &CovectorArray) -> Result<G> {
    let up = product(l, p)?;
    match p.ghost {
        None => up.ber(),
        Some(g) if g.declared_parity == Parity::Even => up.ber_ghost(g),
        Some(_) => Err(Error::Parity("pl(U) accepts a ghost only in an even slot".into())),
    }
}

/// `pl*(U)(P) = Ber*(UP)`; a ghost column must sit in an odd slot.
pub fn plucker_dual_eval(l: &PlaneRep, p: &CovectorArray) -> Result<G> {
    let up = product(l, p)?;
    match p.ghost {
        None => up.ber_star(),
        Some(g) if g.declared_parity == Parity::Odd => up.ber_ghost(g),
        Some(_) => Err(Error::Parity("pl*(U) accepts a ghost only in an odd slot".into())),
    }
}

/// Index data of one coordinate: even slots, then odd slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordKey {
    pub even: Vec<SIdx>,
    pub odd: Vec<SIdx>,
}

impl CoordKey {
    pub fn new(even: Vec<SIdx>, odd: Vec<SIdx>) -> Self {
        CoordKey { even, odd }
    }
}

impl fmt::Display for CoordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", tuple_to_string(&self.even), tuple_to_string(&self.odd))
    }
}

impl FromStr for CoordKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("coordinate key `{s}` needs a `|`") })?;
        Ok(CoordKey::new(parse_tuple(a)?, parse_tuple(b)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    U,
    UGhost,
    UStar,
    UStarGhost,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::U, Family::UGhost, Family::UStar, Family::UStarGhost];

    pub fn weight(self) -> i32 {
        match self {
            Family::U | Family::UGhost => 1,
            Family::UStar | Family::UStarGhost => -1,
        }
    }

    pub fn parity(self) -> Parity {
        match self {
            Family::U | Family::UStar => Parity::Even,
            Family::UGhost | Family::UStarGhost => Parity::Odd,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::U => "u",
            Family::UGhost => "u_ghost",
            Family::UStar => "ustar",
            Family::UStarGhost => "ustar_ghost",
        }
    }
}

/// Essential coordinates. `None` marks a coordinate whose (inverse)
/// Berezinian does not exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssentialCoords {
    pub ambient: SuperShape,
    pub shape: SuperShape,
    pub gens: usize,
    pub families: BTreeMap<Family, BTreeMap<CoordKey, Option<G>>>,
}

/// Canonical keys of each family.
pub fn canonical_keys(family: Family, shape: SuperShape, ambient: SuperShape) -> Vec<CoordKey> {
    let (r, s, n, m) = (shape.even, shape.odd, ambient.even, ambient.odd);
    let ev = |v: &[usize]| v.iter().map(|&a| SIdx::Even(a)).collect::<Vec<_>>();
    let od = |v: &[usize]| v.iter().map(|&a| SIdx::Odd(a)).collect::<Vec<_>>();
    let mut out = Vec::new();
    match family {
        Family::U | Family::UStar => {
            for a in subsets(n, r) {
                for mu in subsets(m, s) {
                    out.push(CoordKey::new(ev(&a), od(&mu)));
                }
            }
        }
        Family::UGhost if r >= 1 => {
            for a in subsets(n, r - 1) {
                for mu in subsets(m, s) {
                    for nu in (1..=m).filter(|x| !mu.contains(x)) {
                        let mut e = ev(&a);
                        e.push(SIdx::Odd(nu));
                        out.push(CoordKey::new(e, od(&mu)));
                    }
                }
            }
        }
        Family::UStarGhost if s >= 1 => {
            for a in subsets(n, r) {
                for mu in subsets(m, s - 1) {
                    for b in (1..=n).filter(|x| !a.contains(x)) {
                        let mut o = vec![SIdx::Even(b)];
                        o.extend(od(&mu));
                        out.push(CoordKey::new(ev(&a), o));
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// Bubble sort with the sign of the permutation. Reports whether two equal
/// entries became adjacent.
fn sort_signed(v: &mut [SIdx]) -> (bool, bool) {
    let mut neg = false;
    for i in 0..v.len() {
        for j in 0..v.len().saturating_sub(1 + i) {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                neg = !neg;
            }
        }
    }
    let repeated = v.windows(2).any(|w| w[0] == w[1]);
    (neg, repeated)
}

impl EssentialCoords {
    pub fn empty(ambient: SuperShape, shape: SuperShape, gens: usize) -> Self {
        EssentialCoords { ambient, shape, gens, families: Family::ALL.iter().map(|&f| (f, BTreeMap::new())).collect() }
    }

    pub fn family(&self, f: Family) -> &BTreeMap<CoordKey, Option<G>> {
        &self.families[&f]
    }

    pub fn family_mut(&mut self, f: Family) -> &mut BTreeMap<CoordKey, Option<G>> {
        self.families.get_mut(&f).expect("all families present")
    }

    pub fn iter(&self) -> impl Iterator<Item = (Family, &CoordKey, &Option<G>)> {
        self.families.iter().flat_map(|(&f, m)| m.iter().map(move |(k, v)| (f, k, v)))
    }

    fn stored(&self, f: Family, key: &CoordKey) -> Result<G> {
        match self.family(f).get(key) {
            Some(Some(x)) => Ok(x.clone()),
            Some(None) => Err(Error::BerezinianUndefined(format!("{} at {key}", f.name()))),
            None => Err(Error::Unknown(format!("{} at {key}", f.name()))),
        }
    }

    fn check_slots(&self, even: &[SIdx], odd: &[SIdx]) -> Result<()> {
        if even.len() != self.shape.even || odd.len() != self.shape.odd {
            return Err(Error::Shape(format!("index groups of sizes {}|{} for shape {}", even.len(), odd.len(), self.shape)));
        }
        if let Some(x) = even.iter().chain(odd).find(|x| !x.fits(self.ambient)) {
            return Err(Error::Shape(format!("index {x} does not fit {}", self.ambient)));
        }
        Ok(())
    }

    /// `u^{even|odd}` for arbitrary index data, with at most one odd index
    /// among the even slots.
    pub fn u(&self, even: &[SIdx], odd: &[SIdx]) -> Result<G> {
        self.check_slots(even, odd)?;
        let ghosts = even.iter().filter(|x| x.parity() == Parity::Odd).count();
        if ghosts > 1 {
            return Err(Error::MultipleGhosts);
        }
        if odd.iter().any(|x| x.parity() == Parity::Even) {
            return Err(Error::Parity("u takes odd indices in odd slots".into()));
        }
        let mut o = odd.to_vec();
        let (neg_o, rep_o) = sort_signed(&mut o);
        if rep_o {
            return Err(Error::BerezinianUndefined(format!("repeated odd index in u^{{{}|{}}}", tuple_to_string(even), tuple_to_string(odd))));
        }
        let mut e = even.to_vec();
        let (neg_e, rep_e) = sort_signed(&mut e);
        if rep_e || e.iter().any(|x| x.parity() == Parity::Odd && o.contains(x)) {
            return Ok(G::zero(self.gens));
        }
        let f = if ghosts == 1 { Family::UGhost } else { Family::U };
        let v = self.stored(f, &CoordKey::new(e, o))?;
        Ok(if neg_e ^ neg_o { -v } else { v })
    }

    /// `u*^{even|odd}` for arbitrary index data, with at most one even index
    /// among the odd slots.
    pub fn ustar(&self, even: &[SIdx], odd: &[SIdx]) -> Result<G> {
        self.check_slots(even, odd)?;
        let ghosts = odd.iter().filter(|x| x.parity() == Parity::Even).count();
        if ghosts > 1 {
            return Err(Error::MultipleGhosts);
        }
        if even.iter().any(|x| x.parity() == Parity::Odd) {
            return Err(Error::Parity("u* takes even indices in even slots".into()));
        }
        let mut e = even.to_vec();
        let (neg_e, rep_e) = sort_signed(&mut e);
        if rep_e {
            return Err(Error::BerezinianUndefined(format!("repeated even index in u*^{{{}|{}}}", tuple_to_string(even), tuple_to_string(odd))));
        }
        let mut o = odd.to_vec();
        let (neg_o, rep_o) = sort_signed(&mut o);
        if rep_o || o.iter().any(|x| x.parity() == Parity::Even && e.contains(x)) {
            return Ok(G::zero(self.gens));
        }
        let f = if ghosts == 1 { Family::UStarGhost } else { Family::UStar };
        let v = self.stored(f, &CoordKey::new(e, o))?;
        Ok(if neg_e ^ neg_o { -v } else { v })
    }

    /// Multiplies weight `+1` entries by `λ` and weight `−1` entries by `λ⁻¹`.
    pub fn rescale(&self, lambda: &G) -> Result<Self> {
        let inv = lambda.inverse()?;
        let mut out = self.clone();
        for (f, m) in out.families.iter_mut() {
            let k = if f.weight() > 0 { lambda } else { &inv };
            for v in m.values_mut().flatten() {
                *v = k * &*v;
            }
        }
        Ok(out)
    }
}

fn submatrix(l: &PlaneRep, even: &[SIdx], odd: &[SIdx]) -> SuperMatrix {
    let amb = l.ambient();
    let cols: Vec<usize> = even.iter().chain(odd).map(|x| x.column(amb)).collect();
    l.matrix().select_columns(&cols).with_col_parities(l.shape().parities())
}

/// All four families as (ghost) Berezinians of column-selected submatrices.
pub fn essential_coordinates(l: &PlaneRep) -> EssentialCoords {
    let (shape, amb) = (l.shape(), l.ambient());
    let mut c = EssentialCoords::empty(amb, shape, l.gens());
    for f in Family::ALL {
        for key in canonical_keys(f, shape, amb) {
            let m = submatrix(l, &key.even, &key.odd);
            let v = match f {
                Family::U => m.ber(),
                Family::UStar => m.ber_star(),
                Family::UGhost => m.ber_ghost(GhostColumnSpec { position: shape.even - 1, declared_parity: Parity::Even }),
                Family::UStarGhost => m.ber_ghost(GhostColumnSpec { position: shape.even, declared_parity: Parity::Odd }),
            };
            c.family_mut(f).insert(key, v.ok());
        }
    }
    c
}

fn chart_key(chart: &ChartIndex) -> (Vec<SIdx>, Vec<SIdx>) {
    (chart.even_cols.iter().map(|&a| SIdx::Even(a)).collect(), chart.odd_cols.iter().map(|&m| SIdx::Odd(m)).collect())
}

fn replaced(v: &[SIdx], i: usize, x: SIdx) -> Vec<SIdx> {
    let mut w = v.to_vec();
    w[i] = x;
    w
}

/// The matrix `W = (U^c)⁻¹U` from coordinates: row `j` of the even part is
/// `u^{a[j→x]|μ} / u^{a|μ}`, row `β` of the odd part is `u*^{a|μ[β→x]} / u*^{a|μ}`.
pub fn inverse_plucker(coords: &EssentialCoords, chart: &ChartIndex) -> Result<PlaneRep> {
    let (shape, amb, gens) = (coords.shape, coords.ambient, coords.gens);
    chart.validate(amb)?;
    if chart.shape() != shape {
        return Err(Error::ChartNotAdmissible(format!("{chart} has shape {}, coordinates have {shape}", chart.shape())));
    }
    let (a, mu) = chart_key(chart);
    let not_adm = || Error::ChartNotAdmissible(chart.to_string());
    let inv_u = coords.u(&a, &mu).map_err(|_| not_adm())?.inverse().map_err(|_| not_adm())?;
    let inv_us = coords.ustar(&a, &mu).map_err(|_| not_adm())?.inverse().map_err(|_| not_adm())?;
    let mut rows = Vec::with_capacity(shape.total());
    for j in 0..shape.even {
        let mut row = Vec::with_capacity(amb.total());
        for x in SIdx::all(amb) {
            row.push(&coords.u(&replaced(&a, j, x), &mu)? * &inv_u);
        }
        rows.push(row);
    }
    for b in 0..shape.odd {
        let mut row = Vec::with_capacity(amb.total());
        for x in SIdx::all(amb) {
            row.push(&coords.ustar(&a, &replaced(&mu, b, x))? * &inv_us);
        }
        rows.push(row);
    }
    PlaneRep::new(SuperMatrix::from_shapes(gens, shape, amb, rows)?)
}

/// `Some(λ)` if `c2 = λ^{weight} · c1` entrywise for an invertible even `λ`.
/// `λ` is read off at the first `u` entry of `c1` with invertible body.
pub fn coords_equivalent(c1: &EssentialCoords, c2: &EssentialCoords) -> Option<G> {
    if c1.shape != c2.shape || c1.ambient != c2.ambient || c1.gens != c2.gens {
        return None;
    }
    let (key, x1) = c1.family(Family::U).iter().find_map(|(k, v)| v.as_ref().filter(|x| x.is_invertible()).map(|x| (k, x)))?;
    let x2 = c2.family(Family::U).get(key)?.as_ref()?;
    let lambda = x2.div(x1).ok()?;
    if !lambda.is_invertible() {
        return None;
    }
    let scaled = c1.rescale(&lambda).ok()?;
    (scaled == *c2).then_some(lambda)
}

/// One family's verdicts.
#[derive(Clone, Debug, Default)]
pub struct FamilyOutcome {
    pub name: &'static str,
    pub checked: usize,
    /// `(index data, residual)` of violated instances.
    pub violations: Vec<(String, G)>,
    /// Instances where some entry or the Berezinian is undefined.
    pub inconclusive: Vec<String>,
}

impl FamilyOutcome {
    fn new(name: &'static str) -> Self {
        FamilyOutcome { name, ..Default::default() }
    }

    fn record(&mut self, label: impl FnOnce() -> String, outcome: Result<(G, G)>) {
        self.checked += 1;
        match outcome {
            Ok((lhs, rhs)) => {
                if lhs != rhs {
                    self.violations.push((label(), &lhs - &rhs));
                }
            }
            Err(_) => self.inconclusive.push(label()),
        }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct RelationReport {
    pub families: Vec<FamilyOutcome>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.families.iter().all(|f| f.holds())
    }

    pub fn family(&self, name: &str) -> Option<&FamilyOutcome> {
        self.families.iter().find(|f| f.name == name)
    }

    pub fn violation_count(&self) -> usize {
        self.families.iter().map(|f| f.violations.len()).sum()
    }

    pub fn inconclusive_count(&self) -> usize {
        self.families.iter().map(|f| f.inconclusive.len()).sum()
    }
}

fn ev(v: &[usize]) -> Vec<SIdx> {
    v.iter().map(|&a| SIdx::Even(a)).collect()
}

fn od(v: &[usize]) -> Vec<SIdx> {
    v.iter().map(|&a| SIdx::Odd(a)).collect()
}

/// Ordered `r`-tuples of distinct elements of `1..=n`.
fn arrangements(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for s in subsets(n, r) {
        let mut idx: Vec<usize> = (0..r).collect();
        crate::smatrix::permutations(&mut idx, 0, &mut |p, _| out.push(p.iter().map(|&i| s[i]).collect()));
    }
    out
}

/// Relations for `r|0` coordinates `u^{a_1…a_r}`, `u^{a_1…a_{r−1}μ̂}`:
///
/// * even: `u^{a}u^{b} = Σ_j u^{b_j a_2…a_r} u^{b[j→a_1]}`
/// * odd:  `u^{a}u^{b' μ̂} = Σ_{j<r} u^{b_j a_2…a_r} u^{b'[j→a_1] μ̂} + u^{μ̂ a_2…a_r} u^{b' a_1}`
///
/// over ordered `a` with distinct entries and increasing `b`, `b'`.
pub fn relations_check_r0(c: &EssentialCoords) -> Result<RelationReport> {
    let (r, n, m) = (c.shape.even, c.ambient.even, c.ambient.odd);
    if c.shape.odd != 0 || r == 0 {
        return Err(Error::Shape(format!("r|0 relations need shape r|0 with r ≥ 1, got {}", c.shape)));
    }
    let u = |e: &[SIdx]| c.u(e, &[]);
    let mut even = FamilyOutcome::new("even");
    let mut odd = FamilyOutcome::new("odd");
    for a in arrangements(n, r) {
        let ae = ev(&a);
        for b in subsets(n, r) {
            let be = ev(&b);
            let res = (|| {
                let lhs = &u(&ae)? * &u(&be)?;
                let mut rhs = G::zero(c.gens);
                for j in 0..r {
                    rhs = &rhs + &(&u(&replaced(&ae, 0, be[j]))? * &u(&replaced(&be, j, ae[0]))?);
                }
                Ok((lhs, rhs))
            })();
            even.record(|| format!("a={} b={}", tuple_to_string(&ae), tuple_to_string(&be)), res);
        }
        for b in subsets(n, r - 1) {
            for mu in 1..=m {
                let mut bm = ev(&b);
                bm.push(SIdx::Odd(mu));
                let res = (|| {
                    let lhs = &u(&ae)? * &u(&bm)?;
                    let mut rhs = G::zero(c.gens);
                    for j in 0..r - 1 {
                        rhs = &rhs + &(&u(&replaced(&ae, 0, bm[j]))? * &u(&replaced(&bm, j, ae[0]))?);
                    }
                    let mut ba = ev(&b);
                    ba.push(ae[0]);
                    rhs = &rhs + &(&u(&replaced(&ae, 0, SIdx::Odd(mu)))? * &u(&ba)?);
                    Ok((lhs, rhs))
                })();
                odd.record(|| format!("a={} b={}", tuple_to_string(&ae), tuple_to_string(&bm)), res);
            }
        }
    }
    Ok(RelationReport { families: vec![even, odd] })
}

fn ber2(gens: usize, m: [[G; 2]; 2], ghost: Option<GhostColumnSpec>, star: bool) -> Result<G> {
    let [[a, b], [c, d]] = m;
    let mat = SuperMatrix::from_shapes(gens, SuperShape::new(1, 1), SuperShape::new(1, 1), vec![vec![a, b], vec![c, d]])?;
    match (ghost, star) {
        (Some(g), _) => mat.ber_ghost(g),
        (None, false) => mat.ber(),
        (None, true) => mat.ber_star(),
    }
}

/// Relations for `1|1` coordinates, in Berezinian form (`sp0`–`sp3`) and
/// denominator-free form (`altsp1`–`altsp3`), each reported separately.
pub fn relations_check_11(c: &EssentialCoords) -> Result<RelationReport> {
    if c.shape != SuperShape::new(1, 1) {
        return Err(Error::Shape(format!("1|1 relations need shape 1|1, got {}", c.shape)));
    }
    let (n, m, gens) = (c.ambient.even, c.ambient.odd, c.gens);
    let u = |x: SIdx, y: usize| c.u(&[x], &[SIdx::Odd(y)]);
    let us = |a: usize, x: SIdx| c.ustar(&[SIdx::Even(a)], &[x]);
    let e = SIdx::Even;
    let o = SIdx::Odd;
    let even_ghost = Some(GhostColumnSpec { position: 0, declared_parity: Parity::Even });
    let odd_ghost = Some(GhostColumnSpec { position: 1, declared_parity: Parity::Odd });
    let mut fams: Vec<FamilyOutcome> =
        ["sp0", "sp1", "sp2", "sp3", "altsp1", "altsp2", "altsp3"].into_iter().map(FamilyOutcome::new).collect();

    for a in 1..=n {
        for mu in 1..=m {
            fams[0].record(|| format!("a={a} mu={mu}"), (|| Ok((&u(e(a), mu)? * &us(a, o(mu))?, G::one(gens))))());
        }
    }
    for a in 1..=n {
        for b in 1..=n {
            for mu in 1..=m {
                for nu in 1..=m {
                    let label = || format!("a={a} b={b} mu={mu} nu={nu}");
                    fams[1].record(label, (|| {
                        let lhs = &u(e(a), mu)? * &u(e(b), nu)?;
                        let rhs = ber2(gens, [[u(e(b), mu)?, u(o(nu), mu)?], [us(a, e(b))?, us(a, o(nu))?]], None, false)?;
                        Ok((lhs, rhs))
                    })());
                    fams[4].record(label, (|| {
                        let lhs = &u(e(a), mu)? * &u(e(b), nu)?;
                        let sq = &u(e(a), mu)? * &u(e(a), mu)?;
                        let rhs = &(&u(e(a), nu)? * &u(e(b), mu)?) + &(&(&u(o(mu), nu)? * &us(a, e(b))?) * &sq);
                        Ok((lhs, rhs))
                    })());
                }
            }
        }
    }
    for a in 1..=n {
        for l in 1..=m {
            for mu in 1..=m {
                for nu in 1..=m {
                    let label = || format!("a={a} lambda={l} mu={mu} nu={nu}");
                    fams[2].record(label, (|| {
                        let lhs = &u(e(a), mu)? * &u(o(l), nu)?;
                        let rhs = ber2(gens, [[u(o(l), mu)?, u(o(nu), mu)?], [us(a, o(l))?, us(a, o(nu))?]], even_ghost, false)?;
                        Ok((lhs, rhs))
                    })());
                    fams[5].record(label, (|| {
                        let lhs = &u(e(a), nu)? * &u(o(l), mu)?;
                        let sq = &u(e(a), nu)? * &u(e(a), nu)?;
                        let rhs = &(&u(e(a), mu)? * &u(o(l), nu)?) + &(&(&u(o(nu), mu)? * &us(a, o(l))?) * &sq);
                        Ok((lhs, rhs))
                    })());
                }
            }
        }
    }
    for a in 1..=n {
        for b in 1..=n {
            for cc in 1..=n {
                for mu in 1..=m {
                    let label = || format!("a={a} b={b} c={cc} mu={mu}");
                    fams[3].record(label, (|| {
                        let lhs = &us(a, o(mu))? * &us(b, e(cc))?;
                        let rhs = ber2(gens, [[u(e(b), mu)?, u(e(cc), mu)?], [us(a, e(b))?, us(a, e(cc))?]], odd_ghost, true)?;
                        Ok((lhs, rhs))
                    })());
                    fams[6].record(label, (|| {
                        let lhs = &(&u(e(a), mu)? * &us(a, e(cc))?) * &u(e(b), mu)?;
                        let sq = &u(e(b), mu)? * &u(e(b), mu)?;
                        let rhs = &(&(&u(e(a), mu)? * &us(a, e(b))?) * &u(e(cc), mu)?) + &(&us(b, e(cc))? * &sq);
                        Ok((lhs, rhs))
                    })());
                }
            }
        }
    }
    Ok(RelationReport { families: fams })
}

/// Relations for general `r|s` coordinates (`relrs0`–`relrs3`), for every
/// chart `a|μ`. The `(r+s)×(r+s)` matrices have rows `i` (even) then `α`
/// (odd) with entries `u^{a[i→x]|μ}` and `u*^{a|μ[α→x]}` for the column
/// index `x`. Undefined entries or Berezinians make an instance inconclusive.
pub fn relations_check_rs(c: &EssentialCoords) -> Result<RelationReport> {
    let (r, s) = (c.shape.even, c.shape.odd);
    let (n, m, gens) = (c.ambient.even, c.ambient.odd, c.gens);
    let mut f0 = FamilyOutcome::new("relrs0");
    let mut f1 = FamilyOutcome::new("relrs1");
    let mut f2 = FamilyOutcome::new("relrs2");
    let mut f3 = FamilyOutcome::new("relrs3");
    let shape = c.shape;

    // Matrix with the given column indices; entries may be undefined.
    let build = |a: &[SIdx], mu: &[SIdx], cols: &[SIdx]| -> Result<SuperMatrix> {
        let mut rows = Vec::with_capacity(r + s);
        for i in 0..r {
            rows.push(cols.iter().map(|&x| c.u(&replaced(a, i, x), mu)).collect::<Result<Vec<_>>>()?);
        }
        for al in 0..s {
            rows.push(cols.iter().map(|&x| c.ustar(a, &replaced(mu, al, x))).collect::<Result<Vec<_>>>()?);
        }
        SuperMatrix::from_shapes(gens, shape, shape, rows)
    };

    for a in subsets(n, r) {
        for mu in subsets(m, s) {
            let (ae, me) = (ev(&a), od(&mu));
            let chart = format!("{}|{}", tuple_to_string(&ae), tuple_to_string(&me));
            f0.record(|| chart.clone(), (|| Ok((&c.u(&ae, &me)? * &c.ustar(&ae, &me)?, G::one(gens))))());
            let power = |k: u32| -> Result<G> { Ok(c.u(&ae, &me)?.pow(k)) };

            for b in subsets(n, r) {
                for nu in subsets(m, s) {
                    let (be, ne) = (ev(&b), od(&nu));
                    let cols: Vec<SIdx> = be.iter().chain(&ne).copied().collect();
                    let label = || format!("chart {chart}; b|nu={}|{}", tuple_to_string(&be), tuple_to_string(&ne));
                    f1.record(label, (|| {
                        let lhs = build(&ae, &me, &cols)?.ber()?;
                        let rhs = &power((r + s - 1) as u32)? * &c.u(&be, &ne)?;
                        Ok((lhs, rhs))
                    })());
                }
            }
            if r >= 1 {
                for b in subsets(n, r - 1) {
                    for l in 1..=m {
                        for nu in subsets(m, s) {
                            let mut bl = ev(&b);
                            bl.push(SIdx::Odd(l));
                            let ne = od(&nu);
                            let cols: Vec<SIdx> = bl.iter().chain(&ne).copied().collect();
                            let label = || format!("chart {chart}; b,lambda|nu={}|{}", tuple_to_string(&bl), tuple_to_string(&ne));
                            f2.record(label, (|| {
                                let g = GhostColumnSpec { position: r - 1, declared_parity: Parity::Even };
                                let lhs = build(&ae, &me, &cols)?.ber_ghost(g)?;
                                let rhs = &power((r + s - 1) as u32)? * &c.u(&bl, &ne)?;
                                Ok((lhs, rhs))
                            })());
                        }
                    }
                }
            }
            if s >= 1 {
                for b in subsets(n, r) {
                    for cc in 1..=n {
                        for nu in subsets(m, s - 1) {
                            let be = ev(&b);
                            let mut cn = vec![SIdx::Even(cc)];
                            cn.extend(od(&nu));
                            let cols: Vec<SIdx> = be.iter().chain(&cn).copied().collect();
                            let label = || format!("chart {chart}; b|c,nu={}|{}", tuple_to_string(&be), tuple_to_string(&cn));
                            f3.record(label, (|| {
                                let g = GhostColumnSpec { position: r, declared_parity: Parity::Odd };
                                let lhs = build(&ae, &me, &cols)?.ber_ghost(g)?;
                                let rhs = &power((r + s - 1) as u32)?.inverse()? * &c.ustar(&be, &cn)?;
                                Ok((lhs, rhs))
                            })());
                        }
                    }
                }
            }
        }
    }
    let mut families = vec![f0, f1];
    if r >= 1 {
        families.push(f2);
    }
    if s >= 1 {
        families.push(f3);
    }
    Ok(RelationReport { families })
}
