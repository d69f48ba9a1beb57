use std::collections::BTreeMap;

use superplucker::clusters::*;
use superplucker::essential::essential_coordinates;
use superplucker::galgebra::{rat, GrassmannElement as G};
use superplucker::grassmannian::random_plane;
use superplucker::SuperShape;

fn t(i: usize) -> G {
    G::generator(2, i).unwrap()
}

fn one_stable_seed(g: &MutationGraph) -> BTreeMap<Var, G> {
    let mut v: BTreeMap<Var, G> = g.stable.iter().map(|s| (*s, G::one(2))).collect();
    v.insert(Var::t(1, 3), G::from_int(2, 2));
    v.insert(Var::Theta(1), t(1));
    v.insert(Var::Theta(3), t(2));
    v
}

#[test]
fn g2_41_shape_and_example() {
    let g = build_g2_41();
    assert_eq!(g.vertices.len(), 2);
    assert_eq!(g.edge_pairs(), 1);
    assert!(export_dot(&g).contains("label=\"T13/T24\""));

    let s = g.state(0, &one_stable_seed(&g)).unwrap();
    let (next, trace) = mutate_traced(&s, &g.edges_from(0).next().unwrap().mutation).unwrap();
    assert!(trace.iter().all(|v| *v == Var::t(1, 3)));
    assert_eq!(next.assignment[&Var::t(2, 4)], G::one(2));
    assert_eq!(next.assignment[&Var::Theta(2)], (&t(1) + &t(2)).scale(&rat(1, 2)));
    // T13 θ4 = T14 θ3 + θ1 T43
    assert_eq!(next.assignment[&Var::Theta(4)], (&t(2) - &t(1)).scale(&rat(1, 2)));

    // the inverse mutation recovers θ1 (and everything else)
    let back = mutate(&next, &g.edges_from(1).next().unwrap().mutation).unwrap();
    assert_eq!(back, s);
}

#[test]
fn g2_51_is_a_ten_cycle() {
    let g = build_g2_51();
    assert_eq!(g.vertices.len(), 10);
    assert_eq!(g.edge_pairs(), 10);
    assert!((0..10).all(|i| g.degree(i) == 2));
    let odd = g.edges.iter().filter(|e| e.mutation.kind == MutationKind::Odd).count();
    assert_eq!(odd, 10);
    let dot = export_dot(&g);
    assert_eq!(dot.matches("dashed").count(), 5);
    assert_eq!(dot.matches("solid").count(), 5);
}

#[test]
fn odd_mutation_example_and_roundtrip() {
    let g = build_g2_51();
    let b1 = g.vertex_of(&ClusterVars::new(&[(1, 3), (1, 4)], &[1, 4])).unwrap();
    let e = g.select(b1, "odd:th3th4").unwrap();
    assert_eq!(e.mutation.relations[0].to_string(), "T14*th3 = T13*th4 + th1*T34");
    let mut seed: BTreeMap<Var, G> = g.stable.iter().map(|s| (*s, G::from_int(2, 1))).collect();
    seed.insert(Var::t(1, 3), G::from_int(2, 5));
    seed.insert(Var::t(1, 4), G::from_int(2, 7));
    seed.insert(Var::Theta(1), t(1));
    seed.insert(Var::Theta(4), t(2));
    let s = g.state(b1, &seed).unwrap();
    let a1 = mutate(&s, &e.mutation).unwrap();
    let back = mutate(&a1, &g.select(e.to, "odd:th4th3").unwrap().mutation).unwrap();
    assert_eq!(back, s);
}

#[test]
fn even_mutation_from_b1() {
    let g = build_g2_51();
    let b1 = g.vertex_of(&ClusterVars::new(&[(1, 3), (1, 4)], &[1, 4])).unwrap();
    let e = g.select(b1, "even:T14").unwrap();
    let rels: Vec<String> = e.mutation.relations.iter().map(|r| r.to_string()).collect();
    assert_eq!(rels, ["T14*T35 = T13*T45 + T15*T34", "T14*th3 = T13*th4 + th1*T34", "T14*th5 = T15*th4 + th1*T54"]);
    assert_eq!(g.vertices[e.to], ClusterVars::new(&[(1, 3), (3, 5)], &[3, 5]));
}

#[test]
fn generate_all_reproduces_minors() {
    for (n, graph) in [(4, build_g2_41()), (5, build_g2_51())] {
        let mut checked = 0;
        for seed in 0..40 {
            let p = random_plane(SuperShape::new(2, 0), SuperShape::new(n, 1), 3, seed).unwrap();
            let truth = values_from_coords(&essential_coordinates(&p)).unwrap();
            if !truth.iter().all(|(v, x)| matches!(v, Var::Theta(_)) || x.is_invertible()) {
                continue;
            }
            checked += 1;
            for v in 0..graph.vertices.len() {
                let Ok(s) = graph.state(v, &truth) else { continue };
                assert_eq!(generate_all(&s, &graph).unwrap(), truth, "n={n} seed={seed} start={}", graph.vertices[v]);
            }
        }
        assert!(checked >= 5, "only {checked} generic planes");
    }
}

#[test]
fn non_invertible_pivot_is_rejected() {
    let g = build_g2_41();
    let mut seed = one_stable_seed(&g);
    seed.insert(Var::t(1, 3), t(1));
    assert!(matches!(g.state(0, &seed), Err(superplucker::Error::PivotNotInvertible(_))));
}

#[test]
fn parse_vars() {
    assert_eq!("T31".parse::<Var>().unwrap(), Var::T(1, 3));
    assert_eq!("th2".parse::<Var>().unwrap(), Var::Theta(2));
    assert!("T11".parse::<Var>().is_err());
}

#[test]
fn random_walks_stay_on_the_plane() {
    use superplucker::random::rng;
    use rand::Rng;
    let g = build_g2_51();
    let mut r = rng(31);
    let mut walked = 0;
    for seed in 0..30 {
        let p = random_plane(SuperShape::new(2, 0), SuperShape::new(5, 1), 4, seed).unwrap();
        let truth = values_from_coords(&essential_coordinates(&p)).unwrap();
        if truth.iter().any(|(v, x)| matches!(v, Var::T(..)) && !x.is_invertible()) {
            continue;
        }
        let mut v = 0;
        let mut s = g.state(v, &truth).unwrap();
        for _ in 0..12 {
            let edges: Vec<_> = g.edges_from(v).collect();
            let e = edges[r.gen_range(0..edges.len())];
            s = mutate(&s, &e.mutation).unwrap();
            v = e.to;
            assert_eq!(s.vars, g.vertices[v]);
            for (k, x) in &s.assignment {
                assert_eq!(x, &truth[k], "{k} after walking to {}", s.vars);
            }
        }
        walked += 1;
    }
    assert!(walked >= 5);
}
