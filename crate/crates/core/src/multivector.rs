//! Multivectors `T ∈ Λ^k(V)` for even `k|0` planes: components, wedge
//! products, the associated space `L_T`, simplicity, and the quadratic
//! relation families (super Plücker, the five `k = 2` families, the reduced
//! relations and the Khudaverdian relations).
//!
//! Components follow the tensor convention `T = T^{a1…ak} e_{a1} ⊗ … ⊗ e_{ak}`
//! summed over all tuples, so `u ∧ w` has `T^{ab} = ½ (u^a w^b − …)`. Minors
//! are `k!` times these components (see [`Multivector::minor`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::galgebra::{rat, GrassmannElement as G, Parity};
use crate::grassmannian::{rational_rank, subsets, PlaneRep};
use crate::smatrix::{det_col, SuperShape};

/// An even index `a` (1..=n) or an odd index `μ̂` (1..=m).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SIdx {
    Even(usize),
    Odd(usize),
}

impl SIdx {
    pub fn parity(self) -> Parity {
        match self {
            SIdx::Even(_) => Parity::Even,
            SIdx::Odd(_) => Parity::Odd,
        }
    }

    fn bit(self) -> usize {
        self.parity().bit()
    }

    /// The index without its parity.
    pub fn number(self) -> usize {
        match self {
            SIdx::Even(a) | SIdx::Odd(a) => a,
        }
    }

    /// 0-based column in a matrix with `n` even columns first.
    pub fn column(self, ambient: SuperShape) -> usize {
        match self {
            SIdx::Even(a) => a - 1,
            SIdx::Odd(m) => ambient.even + m - 1,
        }
    }

    pub fn all(ambient: SuperShape) -> Vec<SIdx> {
        (1..=ambient.even).map(SIdx::Even).chain((1..=ambient.odd).map(SIdx::Odd)).collect()
    }

    pub fn fits(self, ambient: SuperShape) -> bool {
        match self {
            SIdx::Even(a) => a >= 1 && a <= ambient.even,
            SIdx::Odd(m) => m >= 1 && m <= ambient.odd,
        }
    }
}

impl fmt::Display for SIdx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SIdx::Even(a) => write!(f, "{a}"),
            SIdx::Odd(m) => write!(f, "{m}^"),
        }
    }
}

impl FromStr for SIdx {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse { pos: 0, msg: format!("bad index `{s}`") };
        match s.strip_suffix('^') {
            Some(x) => Ok(SIdx::Odd(x.parse().map_err(|_| bad())?)),
            None => Ok(SIdx::Even(s.parse().map_err(|_| bad())?)),
        }
    }
}

pub fn tuple_to_string(t: &[SIdx]) -> String {
    t.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_tuple(s: &str) -> Result<Vec<SIdx>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(SIdx::from_str).collect()
}

fn parity_sum(t: &[SIdx]) -> usize {
    t.iter().map(|i| i.bit()).sum()
}

fn sign_bit(negate: bool, x: G) -> G {
    if negate {
        -x
    } else {
        x
    }
}

/// Sorts a tuple into canonical order (evens increasing, then odds), using
/// `T^{…ab…} = −(−1)^{ãb̃} T^{…ba…}`. Returns the sign flag, or `None` if an
/// even index repeats (the component vanishes).
pub fn canonicalize(t: &[SIdx]) -> Option<(Vec<SIdx>, bool)> {
    let mut v = t.to_vec();
    let mut neg = false;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                if !(v[j].parity().is_odd() && v[j + 1].parity().is_odd()) {
                    neg = !neg;
                }
                v.swap(j, j + 1);
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1] && w[0].parity() == Parity::Even) {
        return None;
    }
    Some((v, neg))
}

/// Canonical `k`-tuples: `j` strictly increasing evens then `k−j` weakly
/// increasing odds.
pub fn canonical_tuples(k: usize, ambient: SuperShape) -> Vec<Vec<SIdx>> {
    let mut out = Vec::new();
    for j in (0..=k.min(ambient.even)).rev() {
        let evens = subsets(ambient.even, j);
        let odds = multisets(ambient.odd, k - j);
        for e in &evens {
            for o in &odds {
                out.push(e.iter().map(|&a| SIdx::Even(a)).chain(o.iter().map(|&m| SIdx::Odd(m))).collect());
            }
        }
    }
    out.sort();
    out
}

fn multisets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=m {
            cur.push(i);
            go(i, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 || m > 0 {
        go(1, m, k, &mut Vec::new(), &mut out);
    }
    out
}

/// A super-antisymmetric tensor of degree `k`, stored on canonical tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multivector {
    degree: usize,
    ambient: SuperShape,
    gens: usize,
    parity: Parity,
    components: BTreeMap<Vec<SIdx>, G>,
}

impl Multivector {
    pub fn zero(degree: usize, ambient: SuperShape, gens: usize) -> Self {
        Multivector { degree, ambient, gens, parity: Parity::Even, components: BTreeMap::new() }
    }

    /// Builds a multivector from components at arbitrary tuples; each value is
    /// moved to its canonical tuple with the antisymmetry sign. Repeated even
    /// indices must carry zero.
    pub fn from_components(
        degree: usize,
        ambient: SuperShape,
        gens: usize,
        comps: impl IntoIterator<Item = (Vec<SIdx>, G)>,
    ) -> Result<Self> {
        let mut t = Self::zero(degree, ambient, gens);
        for (idx, x) in comps {
            if idx.len() != degree || !idx.iter().all(|i| i.fits(ambient)) {
                return Err(Error::Shape(format!("tuple ({}) does not fit degree {degree} in {ambient}", tuple_to_string(&idx))));
            }
            if x.gens() != gens {
                return Err(Error::ContextMismatch { left: gens, right: x.gens() });
            }
            match canonicalize(&idx) {
                Some((c, neg)) => {
                    let v = sign_bit(neg, x);
                    let prev = t.components.remove(&c).unwrap_or_else(|| G::zero(gens));
                    let sum = &prev + &v;
                    if !sum.is_zero() {
                        t.components.insert(c, sum);
                    }
                }
                None if x.is_zero() => {}
                None => return Err(Error::Shape(format!("repeated even index in ({})", tuple_to_string(&idx)))),
            }
        }
        t.parity = t.detect_parity().unwrap_or(Parity::Even);
        Ok(t)
    }

    fn detect_parity(&self) -> Option<Parity> {
        let mut p = None;
        for (idx, x) in &self.components {
            for cand in [Parity::Even, Parity::Odd] {
                if x.has_parity(Parity::from_bit(parity_sum(idx)) + cand) {
                    match p {
                        None => p = Some(cand),
                        Some(q) if q == cand => {}
                        Some(_) => return None,
                    }
                    break;
                }
            }
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn ambient(&self) -> SuperShape {
        self.ambient
    }
    pub fn gens(&self) -> usize {
        self.gens
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }
    pub fn components(&self) -> &BTreeMap<Vec<SIdx>, G> {
        &self.components
    }
    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// True if every component has parity (sum of index parities) + `parity`.
    pub fn is_homogeneous(&self) -> bool {
        self.components.iter().all(|(idx, x)| x.has_parity(Parity::from_bit(parity_sum(idx)) + self.parity))
    }

    /// Component at any tuple, through the antisymmetry rule.
    pub fn get(&self, t: &[SIdx]) -> G {
        match canonicalize(t) {
            Some((c, neg)) => sign_bit(neg, self.components.get(&c).cloned().unwrap_or_else(|| G::zero(self.gens))),
            None => G::zero(self.gens),
        }
    }

    /// The minor-valued coordinate `k! · T^{…}`.
    pub fn minor(&self, t: &[SIdx]) -> G {
        self.get(t).scale(&rat(factorial(self.degree) as i64, 1))
    }

    pub fn scale(&self, x: &G) -> Self {
        let comps = self.components.iter().map(|(k, v)| (k.clone(), x * v)).filter(|(_, v)| !v.is_zero()).collect();
        Multivector { components: comps, ..self.clone() }
    }

    pub fn add(&self, other: &Multivector) -> Result<Self> {
        if self.degree != other.degree || self.ambient != other.ambient || self.gens != other.gens {
            return Err(Error::Shape("multivectors of different type".into()));
        }
        Multivector::from_components(
            self.degree,
            self.ambient,
            self.gens,
            self.components.iter().chain(other.components.iter()).map(|(k, v)| (k.clone(), v.clone())),
        )
    }

    /// Changes one canonical component (used to build perturbed samples).
    pub fn with_component(&self, t: &[SIdx], x: G) -> Result<Self> {
        let (c, neg) = canonicalize(t).ok_or_else(|| Error::Shape("repeated even index".into()))?;
        let mut out = self.clone();
        let v = sign_bit(neg, x);
        if v.is_zero() {
            out.components.remove(&c);
        } else {
            out.components.insert(c, v);
        }
        Ok(out)
    }
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// `u_1 ∧ … ∧ u_k` for even row vectors `u_i` (length `n+m`, left coordinates):
/// `T^{a1…ak} = (1/k!) (−1)^{Σ_{i<j} ã_i ã_j} det_col(u_i^{a_j})`.
pub fn wedge_vectors(rows: &[Vec<G>], ambient: SuperShape, gens: usize) -> Multivector {
    let k = rows.len();
    let inv_fact = rat(1, factorial(k) as i64);
    let mut comps = BTreeMap::new();
    for t in canonical_tuples(k, ambient) {
        let m: Vec<Vec<G>> = rows.iter().map(|r| t.iter().map(|i| r[i.column(ambient)].clone()).collect()).collect();
        let d = det_col(&m, gens);
        if d.is_zero() {
            continue;
        }
        let mut odd_pairs = 0;
        for i in 0..k {
            for j in i + 1..k {
                odd_pairs += t[i].bit() * t[j].bit();
            }
        }
        let v = sign_bit(odd_pairs % 2 == 1, d.scale(&inv_fact));
        comps.insert(t, v);
    }
    Multivector { degree: k, ambient, gens, parity: Parity::Even, components: comps }
}

/// Wedge product of the rows of a `k|0` plane.
pub fn wedge_rows(plane: &PlaneRep) -> Result<Multivector> {
    let shape = plane.shape();
    if shape.odd != 0 {
        return Err(Error::Shape(format!("wedge_rows needs a k|0 plane, got {shape}")));
    }
    let u = plane.matrix();
    Ok(wedge_vectors(u.entries(), plane.ambient(), plane.gens()))
}

/// `w ∧ T = Alt(w ⊗ T)` for a homogeneous vector `w` of parity `wp`.
///
/// `(w ⊗ T)^{b c…} = (−1)^{b̃ (c̃… + T̃)} w^b T^{c…}`; alternation over the
/// position of the first index.
pub fn wedge(w: &[G], wp: Parity, t: &Multivector) -> Result<Multivector> {
    let amb = t.ambient;
    if w.len() != amb.total() {
        return Err(Error::Shape(format!("vector of length {} in {amb}", w.len())));
    }
    let k = t.degree + 1;
    let inv = rat(1, k as i64);
    let mut comps = Vec::new();
    for d in canonical_tuples(k, amb) {
        let mut acc = G::zero(t.gens);
        for j in 0..k {
            // sign to bring d_j to the front in an antisymmetric tensor
            let mut neg = false;
            for i in 0..j {
                neg ^= !(d[i].parity().is_odd() && d[j].parity().is_odd());
            }
            let b = d[j];
            let rest: Vec<SIdx> = d.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, x)| *x).collect();
            let wb = &w[b.column(amb)];
            if wb.is_zero() {
                continue;
            }
            let tc = t.get(&rest);
            if tc.is_zero() {
                continue;
            }
            let swap = b.bit() * (parity_sum(&rest) + t.parity.bit()) % 2 == 1;
            let x = wb * &tc;
            acc = &acc + &sign_bit(neg ^ swap, x);
        }
        if !acc.is_zero() {
            comps.push((d, acc.scale(&inv)));
        }
    }
    let mut out = Multivector::from_components(k, amb, t.gens, comps)?;
    out.parity = wp + t.parity;
    Ok(out)
}

/// One generator of `L_T`: `Σ_b T^{a… b} (−1)^{b̃ (ã1+…)} e_b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocRow {
    pub index: Vec<SIdx>,
    pub parity: Parity,
    pub coords: Vec<G>,
}

pub fn associated_space(t: &Multivector) -> Vec<AssocRow> {
    let amb = t.ambient;
    let mut rows = Vec::new();
    if t.degree == 0 {
        return rows;
    }
    for a in canonical_tuples(t.degree - 1, amb) {
        let pa = parity_sum(&a);
        let coords: Vec<G> = SIdx::all(amb)
            .into_iter()
            .map(|b| {
                let mut idx = a.clone();
                idx.push(b);
                sign_bit(b.bit() * pa % 2 == 1, t.get(&idx))
            })
            .collect();
        if coords.iter().all(|x| x.is_zero()) {
            continue;
        }
        rows.push(AssocRow { parity: Parity::from_bit(pa) + t.parity, index: a, coords });
    }
    rows
}

/// Some component with only even indices has nonzero body.
pub fn is_nondegenerate(t: &Multivector) -> bool {
    t.components.iter().any(|(idx, x)| idx.iter().all(|i| i.parity() == Parity::Even) && x.is_invertible())
}

#[derive(Clone, Debug)]
pub struct SimplicityReport {
    pub nondegenerate: bool,
    /// Generators `w` of `L_T` with `w ∧ T ≠ 0`.
    pub failing_generators: Vec<Vec<SIdx>>,
    /// Even vectors `v_1…v_k` with `T = v_1 ∧ … ∧ v_k`, when simple.
    pub witness: Option<Vec<Vec<G>>>,
}

impl SimplicityReport {
    pub fn is_simple(&self) -> bool {
        self.nondegenerate && self.failing_generators.is_empty()
    }
}

/// Simplicity test: non-degenerate and `w ∧ T = 0` for every generator of `L_T`.
///
/// On success the factorization is built from an invertible all-even
/// component `T^{a1…ak}`: the generators `v_i` indexed by `a` without `a_i`
/// are `k` independent even vectors of `L_T`, and `T = c · v_1 ∧ … ∧ v_k`
/// with `c` read off at `a`.
pub fn is_simple(t: &Multivector) -> Result<SimplicityReport> {
    let nondegenerate = is_nondegenerate(t);
    let mut failing = Vec::new();
    if nondegenerate {
        for row in associated_space(t) {
            if !wedge(&row.coords, row.parity, t)?.is_zero() {
                failing.push(row.index);
            }
        }
    }
    let mut report = SimplicityReport { nondegenerate, failing_generators: failing, witness: None };
    if report.is_simple() {
        report.witness = factorize(t);
    }
    Ok(report)
}

fn factorize(t: &Multivector) -> Option<Vec<Vec<G>>> {
    let k = t.degree;
    let amb = t.ambient;
    let (a, ta) = t
        .components
        .iter()
        .find(|(idx, x)| idx.iter().all(|i| i.parity() == Parity::Even) && x.is_invertible())?;
    let mut vs: Vec<Vec<G>> = Vec::with_capacity(k);
    for i in 0..k {
        let rest: Vec<SIdx> = a.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect();
        vs.push(
            SIdx::all(amb)
                .into_iter()
                .map(|b| {
                    let mut idx = rest.clone();
                    idx.push(b);
                    t.get(&idx)
                })
                .collect(),
        );
    }
    let w = wedge_vectors(&vs, amb, t.gens);
    let c = ta.div(&w.get(a)).ok()?;
    for x in vs[0].iter_mut() {
        *x = &c * &*x;
    }
    if wedge_vectors(&vs, amb, t.gens) == *t {
        Some(vs)
    } else {
        None
    }
}

/// A violated instance of a relation family, by its index data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub family: &'static str,
    pub indices: Vec<Vec<SIdx>>,
    pub residual: G,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups: Vec<String> = self.indices.iter().map(|g| tuple_to_string(g)).collect();
        write!(f, "{} at ({}): residual {}", self.family, groups.join(" ; "), self.residual)
    }
}

/// Residual `LHS − RHS` of the `k`-plane relation for `(a_1…a_{k−1}; b; c_1…c_k)`:
/// `T^{a b} T^{c} (−1)^{b̃(Σã+Σc̃)} = Σ_j T^{a c_j} T^{c[j→b]} (−1)^{b̃(c̃_1+…+c̃_{j−1}) + c̃_j(Σã + c̃_{j+1}+…+c̃_k)}`.
pub fn plucker_residual(t: &Multivector, a: &[SIdx], b: SIdx, c: &[SIdx]) -> G {
    let sa = parity_sum(a);
    let sc = parity_sum(c);
    let mut ab = a.to_vec();
    ab.push(b);
    let mut acc = sign_bit(b.bit() * (sa + sc) % 2 == 1, &t.get(&ab) * &t.get(c));
    for j in 0..c.len() {
        let mut acj = a.to_vec();
        acj.push(c[j]);
        let left = t.get(&acj);
        if left.is_zero() {
            continue;
        }
        let mut cb = c.to_vec();
        cb[j] = b;
        let right = t.get(&cb);
        if right.is_zero() {
            continue;
        }
        let e = b.bit() * parity_sum(&c[..j]) + c[j].bit() * (sa + parity_sum(&c[j + 1..]));
        acc = &acc - &sign_bit(e % 2 == 1, &left * &right);
    }
    acc
}

/// All violated super Plücker relations, over canonical `a`, `c` and all `b`.
pub fn plucker_relations_check(t: &Multivector) -> Vec<Violation> {
    let k = t.degree;
    let amb = t.ambient;
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let cs = canonical_tuples(k, amb);
    for a in canonical_tuples(k - 1, amb) {
        for b in SIdx::all(amb) {
            for c in &cs {
                let r = plucker_residual(t, &a, b, c);
                if !r.is_zero() {
                    out.push(Violation { family: "k-plane", indices: vec![a.clone(), vec![b], c.clone()], residual: r });
                }
            }
        }
    }
    out
}

/// The `k = 2` relation `T^{ab}T^{cd}(−1)^{b̃(ã+c̃+d̃)} = T^{ac}T^{bd}(−1)^{c̃(ã+d̃)} + T^{ad}T^{cb}(−1)^{b̃c̃+ãd̃}` as a residual.
pub fn plucker_k2_residual(t: &Multivector, a: SIdx, b: SIdx, c: SIdx, d: SIdx) -> G {
    let (pa, pb, pc, pd) = (a.bit(), b.bit(), c.bit(), d.bit());
    let lhs = sign_bit(pb * (pa + pc + pd) % 2 == 1, &t.get(&[a, b]) * &t.get(&[c, d]));
    let r1 = sign_bit(pc * (pa + pd) % 2 == 1, &t.get(&[a, c]) * &t.get(&[b, d]));
    let r2 = sign_bit((pb * pc + pa * pd) % 2 == 1, &t.get(&[a, d]) * &t.get(&[c, b]));
    &(&lhs - &r1) - &r2
}

/// Per-family violations of the five `k = 2` families.
#[derive(Clone, Debug, Default)]
pub struct FamilyReport {
    pub families: Vec<(&'static str, Vec<Violation>)>,
}

impl FamilyReport {
    pub fn all_hold(&self) -> bool {
        self.families.iter().all(|(_, v)| v.is_empty())
    }
    pub fn family(&self, name: &str) -> &[Violation] {
        self.families.iter().find(|(n, _)| *n == name).map(|(_, v)| v.as_slice()).unwrap_or(&[])
    }
}

/// The five `k = 2` families written with `T^{ab}`, `θ^{aμ} = T^{aμ̂}`, `S^{λμ} = T^{λ̂μ̂}`:
///
/// * `ev`:   `T^{ab}T^{cd} = T^{ac}T^{bd} + T^{ad}T^{cb}`
/// * `eeeo`: `T^{ab}θ^{cμ} = T^{ac}θ^{bμ} + T^{cb}θ^{aμ}`
/// * `eeoo`: `T^{ab}S^{λμ} = −θ^{aλ}θ^{bμ} − θ^{aμ}θ^{bλ}`
/// * `eooo`: `θ^{aν}S^{λμ} = −θ^{aλ}S^{μν} − θ^{aμ}S^{λν}`
/// * `oooo`: `S^{κν}S^{λμ} = −S^{κλ}S^{μν} − S^{κμ}S^{λν}`
pub fn k2_family_check(t: &Multivector) -> Result<FamilyReport> {
    if t.degree != 2 {
        return Err(Error::UnsupportedDegree(t.degree));
    }
    let (n, m) = (t.ambient.even, t.ambient.odd);
    let tt = |a: usize, b: usize| t.get(&[SIdx::Even(a), SIdx::Even(b)]);
    let th = |a: usize, mu: usize| t.get(&[SIdx::Even(a), SIdx::Odd(mu)]);
    let ss = |l: usize, mu: usize| t.get(&[SIdx::Odd(l), SIdx::Odd(mu)]);
    let e = |v: &[usize]| v.iter().map(|&x| SIdx::Even(x)).collect::<Vec<_>>();
    let o = |v: &[usize]| v.iter().map(|&x| SIdx::Odd(x)).collect::<Vec<_>>();
    let mut rep = FamilyReport::default();
    let push = |fam: &'static str, idx: Vec<Vec<SIdx>>, r: G, v: &mut Vec<Violation>| {
        if !r.is_zero() {
            v.push(Violation { family: fam, indices: idx, residual: r });
        }
    };
    let range = |k: usize| 1..=k;

    let mut ev = Vec::new();
    for a in range(n) {
        for b in range(n) {
            for c in range(n) {
                for d in range(n) {
                    let r = &(&(&tt(a, b) * &tt(c, d)) - &(&tt(a, c) * &tt(b, d))) - &(&tt(a, d) * &tt(c, b));
                    push("ev", vec![e(&[a, b, c, d])], r, &mut ev);
                }
            }
        }
    }
    rep.families.push(("ev", ev));

    let mut eeeo = Vec::new();
    for a in range(n) {
        for b in range(n) {
            for c in range(n) {
                for mu in range(m) {
                    let r = &(&(&tt(a, b) * &th(c, mu)) - &(&tt(a, c) * &th(b, mu))) - &(&tt(c, b) * &th(a, mu));
                    push("eeeo", vec![e(&[a, b, c]), o(&[mu])], r, &mut eeeo);
                }
            }
        }
    }
    rep.families.push(("eeeo", eeeo));

    let mut eeoo = Vec::new();
    for a in range(n) {
        for b in range(n) {
            for l in range(m) {
                for mu in range(m) {
                    let r = &(&(&tt(a, b) * &ss(l, mu)) + &(&th(a, l) * &th(b, mu))) + &(&th(a, mu) * &th(b, l));
                    push("eeoo", vec![e(&[a, b]), o(&[l, mu])], r, &mut eeoo);
                }
            }
        }
    }
    rep.families.push(("eeoo", eeoo));

    let mut eooo = Vec::new();
    for a in range(n) {
        for nu in range(m) {
            for l in range(m) {
                for mu in range(m) {
                    let r = &(&(&th(a, nu) * &ss(l, mu)) + &(&th(a, l) * &ss(mu, nu))) + &(&th(a, mu) * &ss(l, nu));
                    push("eooo", vec![e(&[a]), o(&[nu, l, mu])], r, &mut eooo);
                }
            }
        }
    }
    rep.families.push(("eooo", eooo));

    let mut oooo = Vec::new();
    for k in range(m) {
        for nu in range(m) {
            for l in range(m) {
                for mu in range(m) {
                    let r = &(&(&ss(k, nu) * &ss(l, mu)) + &(&ss(k, l) * &ss(mu, nu))) + &(&ss(k, mu) * &ss(l, nu));
                    push("oooo", vec![o(&[k, nu, l, mu])], r, &mut oooo);
                }
            }
        }
    }
    rep.families.push(("oooo", oooo));
    Ok(rep)
}

/// Output of [`reduce_to_essential`].
#[derive(Clone, Debug)]
pub struct Reduction {
    pub pivot: (usize, usize),
    /// `T^{cd}` for all `c < d` and `θ^{aμ}`, `θ^{bμ}`.
    pub essential: BTreeMap<Vec<SIdx>, G>,
    /// Reconstructed `θ^{cμ}` (`c ∉ {a,b}`) and `S^{λμ}`.
    pub eliminated: BTreeMap<Vec<SIdx>, G>,
    /// Tuples where the reconstruction differs from `T`.
    pub mismatches: Vec<Vec<SIdx>>,
    /// Violations of the reduced even/odd families.
    pub reduced_violations: Vec<Violation>,
    /// Odd indices `μ` with `(S^{μμ})² ≠ 0`, and pairs with `2(S^{μν})² ≠ −S^{μμ}S^{νν}`.
    pub nilpotence_failures: Vec<Vec<SIdx>>,
}

impl Reduction {
    pub fn all_hold(&self) -> bool {
        self.mismatches.is_empty() && self.reduced_violations.is_empty() && self.nilpotence_failures.is_empty()
    }
}

/// Eliminates `θ^{cμ}` and `S^{λμ}` through a pivot `T^{ab}`:
/// `θ^{cμ} = (T^{ac}θ^{bμ} + T^{cb}θ^{aμ}) / T^{ab}` and
/// `S^{λμ} = −(θ^{aλ}θ^{bμ} + θ^{aμ}θ^{bλ}) / T^{ab}`.
pub fn reduce_to_essential(t: &Multivector, pivot: (usize, usize)) -> Result<Reduction> {
    if t.degree != 2 {
        return Err(Error::UnsupportedDegree(t.degree));
    }
    let (a, b) = pivot;
    let (n, m) = (t.ambient.even, t.ambient.odd);
    let tt = |x: usize, y: usize| t.get(&[SIdx::Even(x), SIdx::Even(y)]);
    let th = |x: usize, mu: usize| t.get(&[SIdx::Even(x), SIdx::Odd(mu)]);
    let tab = tt(a, b);
    let inv = tab.inverse().map_err(|_| Error::PivotNotInvertible(format!("T^{a}{b}")))?;

    let mut essential = BTreeMap::new();
    for c in 1..=n {
        for d in c + 1..=n {
            essential.insert(vec![SIdx::Even(c), SIdx::Even(d)], tt(c, d));
        }
    }
    for mu in 1..=m {
        essential.insert(vec![SIdx::Even(a), SIdx::Odd(mu)], th(a, mu));
        essential.insert(vec![SIdx::Even(b), SIdx::Odd(mu)], th(b, mu));
    }

    let mut eliminated = BTreeMap::new();
    let mut mismatches = Vec::new();
    for c in 1..=n {
        if c == a || c == b {
            continue;
        }
        for mu in 1..=m {
            let v = &(&(&tt(a, c) * &th(b, mu)) + &(&tt(c, b) * &th(a, mu))) * &inv;
            let key = vec![SIdx::Even(c), SIdx::Odd(mu)];
            if v != t.get(&key) {
                mismatches.push(key.clone());
            }
            eliminated.insert(key, v);
        }
    }
    for l in 1..=m {
        for mu in l..=m {
            let v = -(&(&(&th(a, l) * &th(b, mu)) + &(&th(a, mu) * &th(b, l))) * &inv);
            let key = vec![SIdx::Odd(l), SIdx::Odd(mu)];
            if v != t.get(&key) {
                mismatches.push(key.clone());
            }
            eliminated.insert(key, v);
        }
    }

    let full = k2_family_check(t)?;
    let mut reduced_violations: Vec<Violation> = full.family("ev").to_vec();
    reduced_violations.extend(full.family("eeeo").iter().cloned());

    let ss = |l: usize, mu: usize| t.get(&[SIdx::Odd(l), SIdx::Odd(mu)]);
    let mut nilpotence_failures = Vec::new();
    for mu in 1..=m {
        if !(&ss(mu, mu) * &ss(mu, mu)).is_zero() {
            nilpotence_failures.push(vec![SIdx::Odd(mu)]);
        }
        for nu in 1..=m {
            let lhs = (&ss(mu, nu) * &ss(mu, nu)).scale(&rat(2, 1));
            if lhs != -(&ss(mu, mu) * &ss(nu, nu)) {
                nilpotence_failures.push(vec![SIdx::Odd(mu), SIdx::Odd(nu)]);
            }
        }
    }
    Ok(Reduction { pivot, essential, eliminated, mismatches, reduced_violations, nilpotence_failures })
}

/// Verdicts of the Khudaverdian relations next to the Plücker relations.
#[derive(Clone, Debug)]
pub struct KhudaverdianReport {
    pub degree: usize,
    /// Violations of the Khudaverdian component identity.
    pub khudaverdian: Vec<Violation>,
    /// Violations of the Plücker relations on the same index data
    /// (`k = 2`: the two-index form; `k = 3`: the four-term form).
    pub plucker: Vec<Violation>,
    /// `k = 2`: every Khudaverdian residual equals ± the Plücker residual.
    pub proportional: bool,
}

/// Coefficient of `p¹_c p²_d` in `∂T/∂p¹_a ∂T/∂p²_b − ∂T/∂p²_a ∂T/∂p¹_b − T ∂²T/∂p¹_a∂p²_b`
/// for `T(p) = T^{cd} p¹_c p²_d`, with
/// `∂T/∂p¹_a = (−1)^{ã+d̃} p²_d T^{ad}`, `∂T/∂p²_b = (−1)^{c̃+b̃+c̃b̃} p¹_c T^{cb}`,
/// `∂²T/∂p¹_a∂p²_b = (−1)^{ã+b̃+ãb̃} T^{ab}`; the covector variable `p^i_c` has parity `c̃`.
pub fn khudaverdian_k2_residual(t: &Multivector, a: SIdx, b: SIdx, c: SIdx, d: SIdx) -> G {
    let (pa, pb, pc, pd) = (a.bit(), b.bit(), c.bit(), d.bit());
    // term 1: p²_d T^{ad} p¹_c T^{cb}; move p¹_c to the front past T^{ad} and p²_d
    let e1 = pa + pd + pc + pb + pc * pb + pc * (pa + pd) + pc * pd;
    let t1 = sign_bit(e1 % 2 == 1, &t.get(&[a, d]) * &t.get(&[c, b]));
    // term 2: −p¹_c T^{ca} p²_d T^{bd}; move p²_d past T^{ca}
    let e2 = pc + pa + pc * pa + pb + pd + pd * (pc + pa);
    let t2 = sign_bit(e2 % 2 == 1, &t.get(&[c, a]) * &t.get(&[b, d]));
    // term 3: −p¹_c p²_d T^{cd} T^{ab}
    let e3 = pc + pd + pa + pb + pa * pb;
    let t3 = sign_bit(e3 % 2 == 1, &t.get(&[c, d]) * &t.get(&[a, b]));
    &(&t1 - &t2) - &t3
}

/// One quadratic term `±T^{x}T^{y}` of a trivector relation.
pub type QuadTerm = (bool, [usize; 3], [usize; 3]);

/// Khudaverdian's relations derived for purely even trivectors:
/// `T^{a1a2a3}T^{b1b2b3} + T^{a1a2b3}T^{b1b2a3} − T^{b1a2a3}T^{a1b2b3}
///  + T^{b2a2a3}T^{a1b1b3} − T^{b1a2b3}T^{a1b2a3} + T^{b2a2b3}T^{a1b1a3} = 0`.
/// Each term is `(negated, x, y)`.
pub fn khudaverdian_k3_terms(a: [usize; 3], b: [usize; 3]) -> [QuadTerm; 6] {
    let [a1, a2, a3] = a;
    let [b1, b2, b3] = b;
    [
        (false, [a1, a2, a3], [b1, b2, b3]),
        (false, [a1, a2, b3], [b1, b2, a3]),
        (true, [b1, a2, a3], [a1, b2, b3]),
        (false, [b2, a2, a3], [a1, b1, b3]),
        (true, [b1, a2, b3], [a1, b2, a3]),
        (false, [b2, a2, b3], [a1, b1, a3]),
    ]
}

/// The four-term Plücker relation for trivectors:
/// `T^{a1a2a3}T^{b1b2b3} = T^{b1a2a3}T^{a1b2b3} + T^{b2a2a3}T^{b1a1b3} + T^{b3a2a3}T^{b1b2a1}`.
pub fn plucker_k3_terms(a: [usize; 3], b: [usize; 3]) -> [QuadTerm; 4] {
    let [a1, a2, a3] = a;
    let [b1, b2, b3] = b;
    [
        (false, [a1, a2, a3], [b1, b2, b3]),
        (true, [b1, a2, a3], [a1, b2, b3]),
        (true, [b2, a2, a3], [b1, a1, b3]),
        (true, [b3, a2, a3], [b1, b2, a1]),
    ]
}

fn quad_residual(t: &Multivector, terms: &[QuadTerm]) -> G {
    let g = |x: [usize; 3]| t.get(&x.map(SIdx::Even));
    terms.iter().fold(G::zero(t.gens), |acc, (neg, x, y)| {
        let v = &g(*x) * &g(*y);
        if *neg {
            &acc - &v
        } else {
            &acc + &v
        }
    })
}

pub fn khudaverdian_k3_residual(t: &Multivector, a: [usize; 3], b: [usize; 3]) -> G {
    quad_residual(t, &khudaverdian_k3_terms(a, b))
}

pub fn plucker_k3_residual(t: &Multivector, a: [usize; 3], b: [usize; 3]) -> G {
    quad_residual(t, &plucker_k3_terms(a, b))
}

/// Ranks of the spans of the six-term relations, the four-term relations
/// and both together, as quadratic forms in the `C(n,3)` coordinates of a
/// trivector in `n|0`. A witness (six-term true, four-term false) exists
/// only if the union rank exceeds the six-term rank.
pub fn k3_quadric_ranks(n: usize) -> (usize, usize, usize) {
    use std::collections::BTreeSet;
    let basis = subsets(n, 3);
    let pos: BTreeMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let nb = basis.len();
    let coord = |x: [usize; 3]| -> Option<(usize, bool)> {
        let (c, neg) = canonicalize(&x.map(SIdx::Even))?;
        let key: Vec<usize> = c.iter().map(|i| i.number()).collect();
        Some((pos[&key], neg))
    };
    let row = |terms: &[QuadTerm]| -> Vec<i64> {
        let mut r = vec![0i64; nb * nb];
        for (neg, x, y) in terms {
            if let (Some((i, si)), Some((j, sj))) = (coord(*x), coord(*y)) {
                let (i, j) = (i.min(j), i.max(j));
                r[i * nb + j] += if neg ^ si ^ sj { -1 } else { 1 };
            }
        }
        r
    };
    // primitive rows up to sign, deduplicated
    let normalize = |mut r: Vec<i64>| -> Option<Vec<i64>> {
        let first = *r.iter().find(|&&x| x != 0)?;
        let g = r.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
        let g = if first < 0 { -g } else { g };
        r.iter_mut().for_each(|x| *x /= g);
        Some(r)
    };
    let tri = even_triples(n);
    let mut six = BTreeSet::new();
    let mut four = BTreeSet::new();
    for &a in &tri {
        for &b in &tri {
            if a[1] != a[2] {
                six.extend(normalize(row(&khudaverdian_k3_terms(a, b))));
            }
            four.extend(normalize(row(&plucker_k3_terms(a, b))));
        }
    }
    let to_q = |s: &BTreeSet<Vec<i64>>| s.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect::<Vec<Vec<_>>>();
    let union: BTreeSet<Vec<i64>> = six.union(&four).cloned().collect();
    (rational_rank(to_q(&six)), rational_rank(to_q(&four)), rational_rank(to_q(&union)))
}

fn even_triples(n: usize) -> Vec<[usize; 3]> {
    let mut v = Vec::new();
    for x in 1..=n {
        for y in 1..=n {
            for z in 1..=n {
                v.push([x, y, z]);
            }
        }
    }
    v
}

/// Khudaverdian relations for `k = 2` (all index combinations) or for the
/// purely even components of a `k = 3` multivector.
pub fn khudaverdian_check(t: &Multivector, k: usize) -> Result<KhudaverdianReport> {
    if t.degree != k {
        return Err(Error::Shape(format!("multivector has degree {}, asked for {k}", t.degree)));
    }
    match k {
        2 => {
            let idx = SIdx::all(t.ambient);
            let mut kh = Vec::new();
            let mut pl = Vec::new();
            let mut proportional = true;
            for &a in &idx {
                for &b in &idx {
                    for &c in &idx {
                        for &d in &idx {
                            let x = khudaverdian_k2_residual(t, a, b, c, d);
                            let y = plucker_k2_residual(t, a, b, c, d);
                            if x != y && x != -&y {
                                proportional = false;
                            }
                            let ix = vec![vec![a, b, c, d]];
                            if !x.is_zero() {
                                kh.push(Violation { family: "khudaverdian-2", indices: ix.clone(), residual: x });
                            }
                            if !y.is_zero() {
                                pl.push(Violation { family: "plucker-2", indices: ix, residual: y });
                            }
                        }
                    }
                }
            }
            Ok(KhudaverdianReport { degree: 2, khudaverdian: kh, plucker: pl, proportional })
        }
        3 => {
            let tri = even_triples(t.ambient.even);
            let mut kh = Vec::new();
            let mut pl = Vec::new();
            for &a in &tri {
                if a[1] == a[2] {
                    continue;
                }
                for &b in &tri {
                    let to_idx = |x: [usize; 3]| x.iter().map(|&i| SIdx::Even(i)).collect::<Vec<_>>();
                    let x = khudaverdian_k3_residual(t, a, b);
                    if !x.is_zero() {
                        kh.push(Violation { family: "khudaverdian-3", indices: vec![to_idx(a), to_idx(b)], residual: x });
                    }
                    let y = plucker_k3_residual(t, a, b);
                    if !y.is_zero() {
                        pl.push(Violation { family: "plucker-3", indices: vec![to_idx(a), to_idx(b)], residual: y });
                    }
                }
            }
            Ok(KhudaverdianReport { degree: 3, khudaverdian: kh, plucker: pl, proportional: true })
        }
        other => Err(Error::UnsupportedDegree(other)),
    }
}

/// Searches sums of up to `max_terms` basis trivectors `e_a∧e_b∧e_c` in `n|0`
/// with coefficients from `coeffs` for one that satisfies every six-term
/// Khudaverdian relation but violates a four-term Plücker relation.
/// Returns the first hit and the number of candidates examined.
pub fn search_k3_witness(n: usize, max_terms: usize, coeffs: &[i64]) -> (Option<Multivector>, usize) {
    let amb = SuperShape::new(n, 0);
    let basis = subsets(n, 3);
    let pos: BTreeMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    // each index triple resolved once to (basis slot, sign)
    let slot = |x: [usize; 3]| -> Option<(usize, i64)> {
        let (c, neg) = canonicalize(&x.map(SIdx::Even))?;
        Some((pos[&c.iter().map(|i| i.number()).collect::<Vec<_>>()], if neg { -1 } else { 1 }))
    };
    let resolve = |terms: &[QuadTerm]| -> Vec<(i64, usize, usize)> {
        terms
            .iter()
            .filter_map(|(neg, x, y)| {
                let ((i, si), (j, sj)) = (slot(*x)?, slot(*y)?);
                Some((if *neg { -si * sj } else { si * sj }, i, j))
            })
            .collect()
    };
    let tri = even_triples(n);
    let mut six = Vec::new();
    let mut four = Vec::new();
    for &a in &tri {
        for &b in &tri {
            if a[1] != a[2] {
                six.push(resolve(&khudaverdian_k3_terms(a, b)));
            }
            four.push(resolve(&plucker_k3_terms(a, b)));
        }
    }
    let holds = |rel: &[(i64, usize, usize)], v: &[i64]| rel.iter().map(|&(s, i, j)| s * v[i] * v[j]).sum::<i64>() == 0;

    let mut examined = 0;
    let mut v = vec![0i64; basis.len()];
    for terms in 1..=max_terms {
        for support in subsets(basis.len(), terms) {
            let mut choice = vec![0usize; terms];
            loop {
                examined += 1;
                v.iter_mut().for_each(|x| *x = 0);
                for (&s, &ci) in support.iter().zip(&choice) {
                    v[s - 1] = coeffs[ci];
                }
                if six.iter().all(|r| holds(r, &v)) && !four.iter().all(|r| holds(r, &v)) {
                    let comps = basis.iter().zip(&v).filter(|(_, &c)| c != 0).map(|(b, &c)| {
                        (b.iter().map(|&x| SIdx::Even(x)).collect::<Vec<_>>(), G::from_int(0, c))
                    });
                    let t = Multivector::from_components(3, amb, 0, comps).expect("valid basis tuples");
                    return (Some(t), examined);
                }
                // next coefficient choice
                let mut i = 0;
                while i < terms {
                    choice[i] += 1;
                    if choice[i] < coeffs.len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == terms {
                    break;
                }
            }
        }
    }
    (None, examined)
}
