//! Super cluster structures on `G_2(n|1)`: clusters of even variables
//! `T^{ab}` (diagonals of an `n`-gon) and odd variables `θ^a`, with even
//! mutations (one diagonal flip together with its two odd companions) and
//! odd mutations (one odd variable), all driven by two exchange templates:
//!
//! * even: `T^{ab}T^{cd} = T^{ac}T^{bd} + T^{ad}T^{cb}`
//! * odd:  `T^{ab}θ^c = T^{ac}θ^b + θ^a T^{cb}`
//!
//! solved for `T^{cd}` resp. `θ^c` by dividing by the pivot `T^{ab}`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::essential::EssentialCoords;
use crate::galgebra::GrassmannElement as G;
use crate::multivector::SIdx;

/// A cluster or stable variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// `T^{ab}` with `a < b`.
    T(usize, usize),
    Theta(usize),
}

impl Var {
    pub fn t(a: usize, b: usize) -> Var {
        Var::T(a.min(b), a.max(b))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T(a, b) => write!(f, "T{a}{b}"),
            Var::Theta(a) => write!(f, "th{a}"),
        }
    }
}

impl FromStr for Var {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { pos: 0, msg: format!("bad cluster variable `{s}` (expected e.g. T13 or th2)") };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("th") {
            return rest.parse().map(Var::Theta).map_err(|_| bad());
        }
        let rest = s.strip_prefix('T').ok_or_else(bad)?;
        // single-digit indices ("T13") or comma-separated ("T1,3")
        let (a, b) = match rest.split_once(',') {
            Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
            None if rest.len() == 2 => (rest[..1].parse().map_err(|_| bad())?, rest[1..].parse().map_err(|_| bad())?),
            None => return Err(bad()),
        };
        if a == b {
            return Err(bad());
        }
        Ok(Var::t(a, b))
    }
}

/// Writes `T^{ab}` with the given index order ("T43" means `−T^{34}`).
fn t_label(a: usize, b: usize) -> String {
    format!("T{a}{b}")
}

/// One exchange identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `T^{ab}T^{cd} = T^{ac}T^{bd} + T^{ad}T^{cb}`, solved for `T^{cd}`.
    Even { a: usize, b: usize, c: usize, d: usize },
    /// `T^{ab}θ^c = T^{ac}θ^b + θ^a T^{cb}`, solved for `θ^c`.
    Odd { a: usize, b: usize, c: usize },
}

impl Relation {
    pub fn target(&self) -> Var {
        match *self {
            Relation::Even { c, d, .. } => Var::t(c, d),
            Relation::Odd { c, .. } => Var::Theta(c),
        }
    }

    pub fn pivot(&self) -> Var {
        match *self {
            Relation::Even { a, b, .. } | Relation::Odd { a, b, .. } => Var::t(a, b),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Relation::Even { a, b, c, d } => write!(
                f,
                "{}*{} = {}*{} + {}*{}",
                t_label(a, b),
                t_label(c, d),
                t_label(a, c),
                t_label(b, d),
                t_label(a, d),
                t_label(c, b)
            ),
            Relation::Odd { a, b, c } => {
                write!(f, "{}*th{c} = {}*th{b} + th{a}*{}", t_label(a, b), t_label(a, c), t_label(c, b))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationKind {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mutation {
    pub kind: MutationKind,
    pub pivot: Var,
    pub outgoing: Vec<Var>,
    pub incoming: Vec<Var>,
    pub relations: Vec<Relation>,
}

impl Mutation {
    /// Edge label: the pivot and the new diagonal for even mutations, the
    /// exchanged odd pair for odd ones.
    pub fn label(&self) -> String {
        match self.kind {
            MutationKind::Even => format!("{}/{}", self.pivot, self.incoming[0]),
            MutationKind::Odd => {
                let mut pair = [self.outgoing[0], self.incoming[0]];
                pair.sort();
                format!("{},{}", pair[0], pair[1])
            }
        }
    }
}

/// The variables of one super cluster.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClusterVars {
    pub even: BTreeSet<Var>,
    pub odd: BTreeSet<Var>,
}

impl ClusterVars {
    pub fn new(even: &[(usize, usize)], odd: &[usize]) -> Self {
        ClusterVars {
            even: even.iter().map(|&(a, b)| Var::t(a, b)).collect(),
            odd: odd.iter().map(|&a| Var::Theta(a)).collect(),
        }
    }

    fn odd_indices(&self) -> Vec<usize> {
        self.odd.iter().filter_map(|v| if let Var::Theta(a) = v { Some(*a) } else { None }).collect()
    }

    /// The even variable accompanied by the odd pair.
    pub fn companion(&self) -> Option<Var> {
        let o = self.odd_indices();
        if o.len() != 2 {
            return None;
        }
        let v = Var::t(o[0], o[1]);
        self.even.contains(&v).then_some(v)
    }
}

impl fmt::Display for ClusterVars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |s: &BTreeSet<Var>| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "({} | {})", j(&self.even), j(&self.odd))
    }
}

/// A cluster together with values for its variables and the stable ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperCluster {
    pub vars: ClusterVars,
    pub stable: BTreeSet<Var>,
    pub assignment: BTreeMap<Var, G>,
}

impl SuperCluster {
    pub fn value(&self, v: Var) -> Result<&G> {
        self.assignment.get(&v).ok_or_else(|| Error::Unknown(format!("no value for {v}")))
    }

    /// Checks that every cluster and stable variable has a value and every
    /// even cluster variable is invertible.
    pub fn validate(&self) -> Result<()> {
        for v in self.vars.even.iter().chain(&self.vars.odd).chain(&self.stable) {
            self.value(*v)?;
        }
        for v in &self.vars.even {
            if !self.value(*v)?.is_invertible() {
                return Err(Error::PivotNotInvertible(v.to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub mutation: Mutation,
}

/// Clusters of `G_2(n|1)` and the mutations between them (both directions
/// stored as separate directed edges).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationGraph {
    pub n: usize,
    pub stable: BTreeSet<Var>,
    pub vertices: Vec<ClusterVars>,
    pub edges: Vec<Edge>,
}

fn sides(n: usize) -> BTreeSet<Var> {
    (1..=n).map(|i| Var::t(i, i % n + 1)).collect()
}

/// The two polygon vertices `c`, `d` completing the triangles on both sides
/// of diagonal `(a, b)` within the triangulation.
fn flip(n: usize, diagonals: &BTreeSet<Var>, a: usize, b: usize) -> Option<(usize, usize)> {
    let edges: BTreeSet<Var> = sides(n).union(diagonals).copied().collect();
    let apex: Vec<usize> =
        (1..=n).filter(|&c| c != a && c != b && edges.contains(&Var::t(a, c)) && edges.contains(&Var::t(b, c))).collect();
    match apex.as_slice() {
        [c, d] => Some((*c, *d)),
        _ => None,
    }
}

impl MutationGraph {
    /// Builds the graph on the listed clusters. Even edges flip the diagonal
    /// accompanied by the odd pair; odd edges join clusters with equal even
    /// variables. Every derived neighbour must be listed.
    pub fn from_clusters(n: usize, vertices: Vec<ClusterVars>) -> Result<Self> {
        let index: BTreeMap<&ClusterVars, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            let pivot = v.companion().ok_or_else(|| Error::Shape(format!("{v}: odd pair has no companion diagonal")))?;
            let Var::T(a, b) = pivot else { unreachable!() };
            let (c, d) = flip(n, &v.even, a, b).ok_or_else(|| Error::Shape(format!("{v}: cannot flip {pivot}")))?;
            let mut even = v.even.clone();
            even.remove(&pivot);
            even.insert(Var::t(c, d));
            let target = ClusterVars { even, odd: [Var::Theta(c), Var::Theta(d)].into_iter().collect() };
            let to = *index.get(&target).ok_or_else(|| Error::Shape(format!("{v}: even neighbour {target} is not listed")))?;
            edges.push(Edge {
                from: i,
                to,
                mutation: Mutation {
                    kind: MutationKind::Even,
                    pivot,
                    outgoing: vec![pivot, Var::Theta(a), Var::Theta(b)],
                    incoming: vec![Var::t(c, d), Var::Theta(c), Var::Theta(d)],
                    relations: vec![
                        Relation::Even { a, b, c, d },
                        Relation::Odd { a, b, c },
                        Relation::Odd { a, b, c: d },
                    ],
                },
            });

            for (j, w) in vertices.iter().enumerate() {
                if j == i || w.even != v.even {
                    continue;
                }
                let out: Vec<&Var> = v.odd.difference(&w.odd).collect();
                let inc: Vec<&Var> = w.odd.difference(&v.odd).collect();
                let (&[&Var::Theta(b_out)], &[&Var::Theta(c_in)]) = (out.as_slice(), inc.as_slice()) else {
                    return Err(Error::Shape(format!("{v} and {w} differ in more than one odd variable")));
                };
                let shared = if a == b_out { b } else { a };
                if !v.even.contains(&Var::t(shared, c_in)) {
                    return Err(Error::Shape(format!("{v} -> {w}: T{shared}{c_in} is not a cluster variable")));
                }
                edges.push(Edge {
                    from: i,
                    to: j,
                    mutation: Mutation {
                        kind: MutationKind::Odd,
                        pivot,
                        outgoing: vec![Var::Theta(b_out)],
                        incoming: vec![Var::Theta(c_in)],
                        relations: vec![Relation::Odd { a: shared, b: b_out, c: c_in }],
                    },
                });
            }
        }
        Ok(MutationGraph { n, stable: sides(n), vertices, edges })
    }

    pub fn vertex_of(&self, vars: &ClusterVars) -> Option<usize> {
        self.vertices.iter().position(|v| v == vars)
    }

    pub fn edges_from(&self, i: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == i)
    }

    /// Number of undirected edges (mutation pairs).
    pub fn edge_pairs(&self) -> usize {
        self.edges.iter().filter(|e| e.from < e.to).count()
    }

    /// Undirected degree of vertex `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.edges_from(i).count()
    }

    /// The mutation from `i` selected by a walk step `even:T14` (pivot) or
    /// `odd:th3th4` (exchanged pair, either order).
    pub fn select(&self, i: usize, step: &str) -> Result<&Edge> {
        let (kind, what) = step
            .split_once(':')
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("walk step `{step}` needs `even:` or `odd:`") })?;
        let found = match kind.trim() {
            "even" => {
                let pivot: Var = what.parse()?;
                self.edges_from(i).find(|e| e.mutation.kind == MutationKind::Even && e.mutation.pivot == pivot)
            }
            "odd" => {
                let parts: Vec<&str> = what.trim().split("th").filter(|s| !s.is_empty()).collect();
                let pair: BTreeSet<Var> =
                    parts.iter().map(|p| p.trim_end_matches(',').parse::<usize>().map(Var::Theta)).collect::<std::result::Result<_, _>>().map_err(
                        |_| Error::Parse { pos: 0, msg: format!("bad odd pair `{what}`") },
                    )?;
                self.edges_from(i).find(|e| {
                    e.mutation.kind == MutationKind::Odd
                        && [e.mutation.outgoing[0], e.mutation.incoming[0]].into_iter().collect::<BTreeSet<_>>() == pair
                })
            }
            other => return Err(Error::Parse { pos: 0, msg: format!("unknown mutation kind `{other}`") }),
        };
        found.ok_or_else(|| Error::Unknown(format!("no mutation `{step}` from {}", self.vertices[i])))
    }

    /// A cluster state on vertex `i` with values from `values`.
    pub fn state(&self, i: usize, values: &BTreeMap<Var, G>) -> Result<SuperCluster> {
        let vars = self.vertices[i].clone();
        let mut assignment = BTreeMap::new();
        for v in vars.even.iter().chain(&vars.odd).chain(&self.stable) {
            let x = values.get(v).ok_or_else(|| Error::Unknown(format!("no value for {v}")))?;
            assignment.insert(*v, x.clone());
        }
        let s = SuperCluster { vars, stable: self.stable.clone(), assignment };
        s.validate()?;
        Ok(s)
    }
}

/// `G_2(4|1)`: clusters `(T13 | th1, th3)` and `(T24 | th2, th4)`.
pub fn build_g2_41() -> MutationGraph {
    MutationGraph::from_clusters(4, vec![ClusterVars::new(&[(1, 3)], &[1, 3]), ClusterVars::new(&[(2, 4)], &[2, 4])])
        .expect("static cluster list is consistent")
}

/// `G_2(5|1)`: ten clusters, two over each triangulation of the pentagon.
pub fn build_g2_51() -> MutationGraph {
    let list: [(&[(usize, usize)], [usize; 2]); 10] = [
        (&[(1, 3), (1, 4)], [1, 3]),
        (&[(1, 3), (3, 5)], [3, 5]),
        (&[(2, 5), (3, 5)], [2, 5]),
        (&[(2, 4), (2, 5)], [2, 4]),
        (&[(1, 4), (2, 4)], [1, 4]),
        (&[(1, 3), (1, 4)], [1, 4]),
        (&[(1, 3), (3, 5)], [1, 3]),
        (&[(2, 5), (3, 5)], [3, 5]),
        (&[(2, 4), (2, 5)], [2, 5]),
        (&[(1, 4), (2, 4)], [2, 4]),
    ];
    MutationGraph::from_clusters(5, list.iter().map(|(e, o)| ClusterVars::new(e, o)).collect())
        .expect("static cluster list is consistent")
}

/// `T^{ab}` with sign for either index order.
fn t_value(values: &BTreeMap<Var, G>, a: usize, b: usize) -> Result<G> {
    let v = values.get(&Var::t(a, b)).ok_or_else(|| Error::Unknown(format!("no value for {}", Var::t(a, b))))?;
    Ok(if a < b { v.clone() } else { -v })
}

fn theta(values: &BTreeMap<Var, G>, a: usize) -> Result<G> {
    values.get(&Var::Theta(a)).cloned().ok_or_else(|| Error::Unknown(format!("no value for th{a}")))
}

/// Evaluates the right-hand side of `rel` divided by its pivot; returns the
/// value and the divisor used.
pub fn solve(rel: &Relation, values: &BTreeMap<Var, G>) -> Result<(G, Var)> {
    let pivot = rel.pivot();
    let (a, b) = match *rel {
        Relation::Even { a, b, .. } | Relation::Odd { a, b, .. } => (a, b),
    };
    let inv = t_value(values, a, b)?.inverse().map_err(|_| Error::PivotNotInvertible(pivot.to_string()))?;
    let rhs = match *rel {
        Relation::Even { a, b, c, d } => {
            &(&t_value(values, a, c)? * &t_value(values, b, d)?) + &(&t_value(values, a, d)? * &t_value(values, c, b)?)
        }
        Relation::Odd { a, b, c } => {
            &(&t_value(values, a, c)? * &theta(values, b)?) + &(&theta(values, a)? * &t_value(values, c, b)?)
        }
    };
    Ok((&rhs * &inv, pivot))
}

/// Applies `m` to a state; also returns the variables divided by.
pub fn mutate_traced(state: &SuperCluster, m: &Mutation) -> Result<(SuperCluster, Vec<Var>)> {
    state.validate()?;
    if !state.vars.even.contains(&m.pivot) {
        return Err(Error::PivotNotInvertible(format!("{} is not a cluster variable of {}", m.pivot, state.vars)));
    }
    for v in &m.outgoing {
        if !state.vars.even.contains(v) && !state.vars.odd.contains(v) {
            return Err(Error::Unknown(format!("{v} is not in {}", state.vars)));
        }
    }
    let mut trace = Vec::new();
    let mut new_values = Vec::new();
    for rel in &m.relations {
        let (x, div) = solve(rel, &state.assignment)?;
        trace.push(div);
        new_values.push((rel.target(), x));
    }
    let mut out = state.clone();
    for v in &m.outgoing {
        out.assignment.remove(v);
        out.vars.even.remove(v);
        out.vars.odd.remove(v);
    }
    for (v, x) in new_values {
        match v {
            Var::T(..) => out.vars.even.insert(v),
            Var::Theta(_) => out.vars.odd.insert(v),
        };
        out.assignment.insert(v, x);
    }
    Ok((out, trace))
}

pub fn mutate(state: &SuperCluster, m: &Mutation) -> Result<SuperCluster> {
    mutate_traced(state, m).map(|(s, _)| s)
}

/// Follows mutations through the whole graph from `state` (breadth first)
/// and collects every variable's value. A variable reached with two
/// different values is an inconsistent seed.
pub fn generate_all(state: &SuperCluster, graph: &MutationGraph) -> Result<BTreeMap<Var, G>> {
    let start = graph
        .vertex_of(&state.vars)
        .ok_or_else(|| Error::Unknown(format!("{} is not a vertex of the graph", state.vars)))?;
    let mut values: BTreeMap<Var, G> = state.assignment.clone();
    let mut seen = vec![false; graph.vertices.len()];
    let mut queue = VecDeque::from([(start, state.clone())]);
    seen[start] = true;
    while let Some((i, s)) = queue.pop_front() {
        for e in graph.edges_from(i) {
            let next = mutate(&s, &e.mutation)?;
            for v in &e.mutation.incoming {
                let x = &next.assignment[v];
                match values.get(v) {
                    Some(y) if y != x => {
                        return Err(Error::InconsistentSeed(format!("{v} reached as {y} and as {x}")));
                    }
                    Some(_) => {}
                    None => {
                        values.insert(*v, x.clone());
                    }
                }
            }
            if !seen[e.to] {
                seen[e.to] = true;
                queue.push_back((e.to, next));
            }
        }
    }
    Ok(values)
}

/// Values of all `T^{ab}` and `θ^a` from essential coordinates of a `2|0`
/// plane in `n|1`: `T^{ab} = u^{ab}`, `θ^a = u^{a1̂}`.
pub fn values_from_coords(c: &EssentialCoords) -> Result<BTreeMap<Var, G>> {
    if c.shape.even != 2 || c.shape.odd != 0 || c.ambient.odd != 1 {
        return Err(Error::Shape(format!("cluster seeding needs a 2|0 plane in n|1, got {} in {}", c.shape, c.ambient)));
    }
    let n = c.ambient.even;
    let mut out = BTreeMap::new();
    for a in 1..=n {
        for b in a + 1..=n {
            out.insert(Var::T(a, b), c.u(&[SIdx::Even(a), SIdx::Even(b)], &[])?);
        }
        out.insert(Var::Theta(a), c.u(&[SIdx::Even(a), SIdx::Odd(1)], &[])?);
    }
    Ok(out)
}

/// Undirected DOT rendering: solid edges for even mutations, dashed for odd.
pub fn export_dot(graph: &MutationGraph) -> String {
    let mut s = String::from("graph supercluster {\n");
    for (i, v) in graph.vertices.iter().enumerate() {
        s.push_str(&format!("  c{i} [label=\"{v}\"];\n"));
    }
    for e in graph.edges.iter().filter(|e| e.from < e.to) {
        let style = match e.mutation.kind {
            MutationKind::Even => "solid",
            MutationKind::Odd => "dashed",
        };
        // label even edges by the unordered diagonal pair
        let label = match e.mutation.kind {
            MutationKind::Even => {
                let mut p = [e.mutation.pivot, e.mutation.incoming[0]];
                p.sort();
                format!("{}/{}", p[0], p[1])
            }
            MutationKind::Odd => e.mutation.label(),
        };
        s.push_str(&format!("  c{} -- c{} [style={style}, label=\"{label}\"];\n", e.from, e.to));
    }
    s.push_str("}\n");
    s
}
