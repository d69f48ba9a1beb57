//! Text and JSON forms of the crate's values.
//!
//! Expressions follow
//!
//! ```text
//! expression := ['+'|'-'] term (('+'|'-') term)*
//! term       := rational ('*'? gen)* | gen ('*'? gen)*
//! rational   := digits ['/' digits]
//! gen        := 't' digits
//! ```
//!
//! and print in the canonical form of [`GrassmannElement`]'s `Display`.
//! JSON entries may be expression strings or integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::clusters::{build_g2_41, build_g2_51, ClusterVars, MutationGraph, SuperCluster, Var};
use crate::error::{Error, Result};
use crate::essential::{CoordKey, EssentialCoords, Family};
use crate::galgebra::{GrassmannElement as G, Monomial, Parity, Rational, MAX_GENERATORS};
use crate::grassmannian::PlaneRep;
use crate::multivector::{parse_tuple, tuple_to_string, Multivector};
use crate::smatrix::{SuperMatrix, SuperShape};

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

/// One parsed term before it is placed in a context.
struct RawTerm {
    coef: Rational,
    gens: Vec<(usize, usize)>,
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Lexer<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(perr(start, "expected digits"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(txt.parse().expect("digit string"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let num = self.digits()?;
        if self.s.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let at = self.pos;
            let den = self.digits()?;
            if den.is_zero() {
                return Err(perr(at, "zero denominator"));
            }
            return Ok(Rational::new(num, den));
        }
        if self.s.get(self.pos) == Some(&b'.') {
            return Err(perr(self.pos, "decimals are not accepted; write p/q"));
        }
        Ok(Rational::from_integer(num))
    }

    fn generator(&mut self) -> Result<(usize, usize)> {
        let at = self.pos;
        self.pos += 1; // 't'
        let i = self.digits().map_err(|_| perr(at, "expected generator index after `t`"))?;
        let i: usize = i.try_into().ok().filter(|&i| (1..=MAX_GENERATORS).contains(&i)).ok_or_else(|| {
            perr(at, format!("generator index must be between 1 and {MAX_GENERATORS}"))
        })?;
        Ok((i, at))
    }

    fn term(&mut self) -> Result<RawTerm> {
        let mut coef = Rational::one();
        let mut gens = Vec::new();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => coef = self.rational()?,
            Some(b't') => gens.push(self.generator()?),
            Some(c) => return Err(perr(self.pos, format!("expected a number or generator, found `{}`", c as char))),
            None => return Err(perr(self.pos, "unexpected end of expression")),
        }
        loop {
            let star = self.peek() == Some(b'*');
            if star {
                self.pos += 1;
            }
            match self.peek() {
                Some(b't') => {
                    let (i, at) = self.generator()?;
                    if gens.iter().any(|&(j, _)| j == i) {
                        return Err(perr(at, format!("repeated generator t{i} in one monomial")));
                    }
                    gens.push((i, at));
                }
                _ if star => return Err(perr(self.pos, "expected generator after `*`")),
                _ => break,
            }
        }
        Ok(RawTerm { coef, gens })
    }

    fn expression(&mut self) -> Result<Vec<RawTerm>> {
        let mut out = Vec::new();
        let mut neg = false;
        match self.peek() {
            Some(b'-') => {
                neg = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let mut t = self.term()?;
            if neg {
                t.coef = -t.coef;
            }
            out.push(t);
            match self.peek() {
                None => return Ok(out),
                Some(b'+') => neg = false,
                Some(b'-') => neg = true,
                Some(c) => return Err(perr(self.pos, format!("expected `+` or `-`, found `{}`", c as char))),
            }
            self.pos += 1;
        }
    }
}

fn raw_terms(text: &str) -> Result<Vec<RawTerm>> {
    Lexer { s: text.as_bytes(), pos: 0 }.expression()
}

/// Parses an expression in the context of `gens` generators.
pub fn parse_expr(text: &str, gens: usize) -> Result<G> {
    let terms = raw_terms(text)?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if let Some(&(i, at)) = t.gens.iter().find(|&&(i, _)| i > gens) {
            return Err(perr(at, format!("t{i} exceeds the context of {gens} generators")));
        }
        let idx: Vec<usize> = t.gens.iter().map(|&(i, _)| i).collect();
        let (m, neg) = Monomial::from_product(&idx).expect("repeats rejected by the lexer");
        out.push((m, if neg { -t.coef } else { t.coef }));
    }
    Ok(G::from_terms(gens, out))
}

/// Largest generator index mentioned in `text` (0 if none).
pub fn max_generator(text: &str) -> Result<usize> {
    Ok(raw_terms(text)?.iter().flat_map(|t| t.gens.iter().map(|g| g.0)).max().unwrap_or(0))
}

/// Parses with the smallest context that fits.
pub fn parse_expr_auto(text: &str) -> Result<G> {
    parse_expr(text, max_generator(text)?)
}

fn json_err(e: serde_json::Error) -> Error {
    perr(e.column(), format!("JSON: {e}"))
}

fn value_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() => Ok(n.to_string()),
        other => Err(perr(0, format!("expected an expression string or integer, found {other}"))),
    }
}

fn context_of<'a>(declared: Option<usize>, texts: impl IntoIterator<Item = &'a str>) -> Result<usize> {
    let mut need = 0;
    for t in texts {
        need = need.max(max_generator(t)?);
    }
    match declared {
        Some(n) if n < need => Err(perr(0, format!("t{need} exceeds declared gens {n}"))),
        Some(n) if n > MAX_GENERATORS => Err(perr(0, format!("at most {MAX_GENERATORS} generators supported"))),
        Some(n) => Ok(n),
        None => Ok(need),
    }
}

fn parse_parity(s: &str) -> Result<Parity> {
    match s {
        "e" | "even" | "0" => Ok(Parity::Even),
        "o" | "odd" | "1" => Ok(Parity::Odd),
        _ => Err(perr(0, format!("bad parity label `{s}` (use \"e\" or \"o\")"))),
    }
}

fn parity_label(p: Parity) -> &'static str {
    match p {
        Parity::Even => "e",
        Parity::Odd => "o",
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gens: Option<usize>,
    row_parities: Vec<String>,
    col_parities: Vec<String>,
    entries: Vec<Vec<Value>>,
}

fn matrix_from_doc(d: &MatrixDoc, strict: bool) -> Result<SuperMatrix> {
    let texts: Vec<Vec<String>> =
        d.entries.iter().map(|row| row.iter().map(value_text).collect::<Result<_>>()).collect::<Result<_>>()?;
    let gens = context_of(d.gens, texts.iter().flatten().map(|s| s.as_str()))?;
    let rows: Vec<Parity> = d.row_parities.iter().map(|s| parse_parity(s)).collect::<Result<_>>()?;
    let cols: Vec<Parity> = d.col_parities.iter().map(|s| parse_parity(s)).collect::<Result<_>>()?;
    if texts.len() != rows.len() {
        return Err(Error::Shape(format!("{} rows of entries for {} row parities", texts.len(), rows.len())));
    }
    if let Some(i) = texts.iter().position(|r| r.len() != cols.len()) {
        return Err(Error::Shape(format!("row {} has {} entries, expected {}", i + 1, texts[i].len(), cols.len())));
    }
    let entries: Vec<Vec<G>> = texts
        .iter()
        .map(|row| row.iter().map(|t| parse_expr(t, gens)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let m = SuperMatrix::new(gens, rows, cols, entries)?;
    if strict {
        let bad = m.parity_violations();
        if !bad.is_empty() {
            let cells: Vec<String> = bad.iter().map(|(i, j)| format!("({},{})", i + 1, j + 1)).collect();
            return Err(Error::Parity(format!("entries of the wrong parity at {}", cells.join(", "))));
        }
    }
    Ok(m)
}

/// Reads a supermatrix document. With `strict`, every entry must have the
/// parity of its slot.
pub fn parse_matrix(json: &str, strict: bool) -> Result<SuperMatrix> {
    matrix_from_doc(&serde_json::from_str(json).map_err(json_err)?, strict)
}

pub fn matrix_to_json(m: &SuperMatrix) -> Value {
    let doc = MatrixDoc {
        gens: Some(m.gens()),
        row_parities: m.row_parities().iter().map(|p| parity_label(*p).to_string()).collect(),
        col_parities: m.col_parities().iter().map(|p| parity_label(*p).to_string()).collect(),
        entries: m.entries().iter().map(|r| r.iter().map(|x| Value::String(x.to_string())).collect()).collect(),
    };
    serde_json::to_value(doc).expect("serializable")
}

/// A plane is an even full-rank matrix document.
pub fn parse_plane(json: &str) -> Result<PlaneRep> {
    PlaneRep::new(parse_matrix(json, true)?)
}

pub fn plane_to_json(p: &PlaneRep) -> Value {
    matrix_to_json(p.matrix())
}

#[derive(Serialize, Deserialize)]
struct MultivectorDoc {
    degree: usize,
    ambient: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gens: Option<usize>,
    components: BTreeMap<String, Value>,
}

pub fn parse_multivector(json: &str) -> Result<Multivector> {
    let d: MultivectorDoc = serde_json::from_str(json).map_err(json_err)?;
    let ambient: SuperShape = d.ambient.parse()?;
    let texts: Vec<(Vec<_>, String)> =
        d.components.iter().map(|(k, v)| Ok((parse_tuple(k)?, value_text(v)?))).collect::<Result<_>>()?;
    let gens = context_of(d.gens, texts.iter().map(|(_, t)| t.as_str()))?;
    let comps: Vec<_> = texts.into_iter().map(|(k, t)| Ok((k, parse_expr(&t, gens)?))).collect::<Result<_>>()?;
    Multivector::from_components(d.degree, ambient, gens, comps)
}

pub fn multivector_to_json(t: &Multivector) -> Value {
    let doc = MultivectorDoc {
        degree: t.degree(),
        ambient: t.ambient().to_string(),
        gens: Some(t.gens()),
        components: t.components().iter().map(|(k, x)| (tuple_to_string(k), Value::String(x.to_string()))).collect(),
    };
    serde_json::to_value(doc).expect("serializable")
}

#[derive(Serialize, Deserialize)]
struct CoordsDoc {
    ambient: String,
    shape: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gens: Option<usize>,
    #[serde(default)]
    u: BTreeMap<String, Option<Value>>,
    #[serde(default)]
    u_ghost: BTreeMap<String, Option<Value>>,
    #[serde(default)]
    ustar: BTreeMap<String, Option<Value>>,
    #[serde(default)]
    ustar_ghost: BTreeMap<String, Option<Value>>,
}

impl CoordsDoc {
    fn family(&self, f: Family) -> &BTreeMap<String, Option<Value>> {
        match f {
            Family::U => &self.u,
            Family::UGhost => &self.u_ghost,
            Family::UStar => &self.ustar,
            Family::UStarGhost => &self.ustar_ghost,
        }
    }

    fn family_mut(&mut self, f: Family) -> &mut BTreeMap<String, Option<Value>> {
        match f {
            Family::U => &mut self.u,
            Family::UGhost => &mut self.u_ghost,
            Family::UStar => &mut self.ustar,
            Family::UStarGhost => &mut self.ustar_ghost,
        }
    }
}

/// Reads essential coordinates; `null` marks an undefined coordinate.
pub fn parse_coords(json: &str) -> Result<EssentialCoords> {
    let d: CoordsDoc = serde_json::from_str(json).map_err(json_err)?;
    let mut texts = Vec::new();
    for f in Family::ALL {
        for (k, v) in d.family(f) {
            let t = v.as_ref().map(value_text).transpose()?;
            texts.push((f, k.parse::<CoordKey>()?, t));
        }
    }
    let gens = context_of(d.gens, texts.iter().filter_map(|(_, _, t)| t.as_deref()))?;
    let mut c = EssentialCoords::empty(d.ambient.parse()?, d.shape.parse()?, gens);
    for (f, k, t) in texts {
        let x = t.map(|t| parse_expr(&t, gens)).transpose()?;
        c.family_mut(f).insert(k, x);
    }
    Ok(c)
}

pub fn coords_to_json(c: &EssentialCoords) -> Value {
    let mut doc = CoordsDoc {
        ambient: c.ambient.to_string(),
        shape: c.shape.to_string(),
        gens: Some(c.gens),
        u: BTreeMap::new(),
        u_ghost: BTreeMap::new(),
        ustar: BTreeMap::new(),
        ustar_ghost: BTreeMap::new(),
    };
    for f in Family::ALL {
        let out = doc.family_mut(f);
        for (k, v) in c.family(f) {
            out.insert(k.to_string(), v.as_ref().map(|x| Value::String(x.to_string())));
        }
    }
    serde_json::to_value(doc).expect("serializable")
}

/// Named cluster graphs: `4_1` and `5_1`.
pub fn graph_for_case(case: &str) -> Result<MutationGraph> {
    match case {
        "4_1" => Ok(build_g2_41()),
        "5_1" => Ok(build_g2_51()),
        _ => Err(Error::Unknown(format!("cluster case `{case}` (expected 4_1 or 5_1)"))),
    }
}

#[derive(Serialize, Deserialize)]
struct ClusterDoc {
    case: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gens: Option<usize>,
    even: Vec<String>,
    odd: Vec<String>,
    assignment: BTreeMap<String, Value>,
}

/// Reads a cluster state; the cluster must be a vertex of the named graph.
pub fn parse_cluster_state(json: &str) -> Result<(String, SuperCluster)> {
    let d: ClusterDoc = serde_json::from_str(json).map_err(json_err)?;
    let graph = graph_for_case(&d.case)?;
    let parse_vars = |v: &[String]| v.iter().map(|s| s.parse::<Var>()).collect::<Result<Vec<_>>>();
    let vars = ClusterVars { even: parse_vars(&d.even)?.into_iter().collect(), odd: parse_vars(&d.odd)?.into_iter().collect() };
    let vertex = graph.vertex_of(&vars).ok_or_else(|| Error::Unknown(format!("{vars} is not a cluster of case {}", d.case)))?;
    let texts: Vec<(Var, String)> =
        d.assignment.iter().map(|(k, v)| Ok((k.parse()?, value_text(v)?))).collect::<Result<_>>()?;
    let gens = context_of(d.gens, texts.iter().map(|(_, t)| t.as_str()))?;
    let values = texts.into_iter().map(|(k, t)| Ok((k, parse_expr(&t, gens)?))).collect::<Result<BTreeMap<_, _>>>()?;
    Ok((d.case, graph.state(vertex, &values)?))
}

pub fn cluster_state_to_json(case: &str, s: &SuperCluster) -> Value {
    let gens = s.assignment.values().next().map(|x| x.gens());
    let doc = ClusterDoc {
        case: case.to_string(),
        gens,
        even: s.vars.even.iter().map(|v| v.to_string()).collect(),
        odd: s.vars.odd.iter().map(|v| v.to_string()).collect(),
        assignment: s.assignment.iter().map(|(k, x)| (k.to_string(), Value::String(x.to_string()))).collect(),
    };
    serde_json::to_value(doc).expect("serializable")
}

/// Values keyed by variable name, for `generate_all` output.
pub fn values_to_json(values: &BTreeMap<Var, G>) -> Value {
    Value::Object(values.iter().map(|(k, x)| (k.to_string(), Value::String(x.to_string()))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galgebra::rat;

    #[test]
    fn grammar() {
        assert_eq!(parse_expr("0", 3).unwrap(), G::zero(3));
        assert_eq!(parse_expr("t2*t1", 2).unwrap(), -&parse_expr("t1*t2", 2).unwrap());
        assert_eq!(parse_expr("2t1 t2", 2).unwrap(), parse_expr("2*t1*t2", 2).unwrap());
        assert_eq!(parse_expr("-1/2 + 3/6", 0).unwrap(), G::zero(0));
        assert_eq!(parse_expr(" 2/3 - 1/9*t1*t2 ", 2).unwrap().to_string(), "2/3 - 1/9*t1*t2");
        assert_eq!(parse_expr("4/2", 0).unwrap(), G::scalar(0, rat(2, 1)));
    }

    #[test]
    fn diagnostics() {
        let pos = |s: &str, n: usize| match parse_expr(s, n) {
            Err(Error::Parse { pos, .. }) => pos,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(pos("t1*t1", 2), 3);
        assert_eq!(pos("1 + t3", 2), 4);
        assert_eq!(pos("1 +", 2), 3);
        assert_eq!(pos("1/0", 2), 2);
        assert_eq!(pos("0.5", 2), 1);
        assert_eq!(pos("2 x", 2), 2);
        assert_eq!(pos("t1*", 2), 3);
    }
}
