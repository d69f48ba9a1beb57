use superplucker::essential::*;
use superplucker::galgebra::{rat, GrassmannElement as G, Monomial};
use superplucker::grassmannian::{random_plane, ChartIndex, PlaneRep};
use superplucker::multivector::SIdx;
use superplucker::random::{random_invertible, rng};
use superplucker::{SuperMatrix, SuperShape};

fn e(i: usize) -> SIdx {
    SIdx::Even(i)
}
fn o(i: usize) -> SIdx {
    SIdx::Odd(i)
}

fn t(i: usize) -> G {
    G::generator(2, i).unwrap()
}

fn n(q: i64) -> G {
    G::from_int(2, q)
}

/// `U = [[x, 1 | ξ, 0], [η, 0 | y, 1]]` with `x = 2, y = 3, ξ = t1, η = t2`.
fn fixture() -> PlaneRep {
    let u = SuperMatrix::from_shapes(
        2,
        SuperShape::new(1, 1),
        SuperShape::new(2, 2),
        vec![vec![n(2), n(1), t(1), n(0)], vec![t(2), n(0), n(3), n(1)]],
    )
    .unwrap();
    PlaneRep::new(u).unwrap()
}

fn pl(even: &[SIdx], odd: &[SIdx]) -> G {
    plucker_eval(&fixture(), &CovectorArray::basis(SuperShape::new(2, 2), even, odd, 2).unwrap()).unwrap()
}

fn pls(even: &[SIdx], odd: &[SIdx]) -> G {
    plucker_dual_eval(&fixture(), &CovectorArray::basis(SuperShape::new(2, 2), even, odd, 2).unwrap()).unwrap()
}

#[test]
fn fixture_evaluations() {
    assert_eq!(pl(&[e(1)], &[o(2)]), n(2));
    assert_eq!(pl(&[e(2)], &[o(1)]), G::scalar(2, rat(1, 3)));
    assert_eq!(pl(&[o(2)], &[o(1)]), t(1).scale(&rat(-1, 9)));
    assert_eq!(pls(&[e(2)], &[o(1)]), n(3));
    assert_eq!(pls(&[e(2)], &[e(1)]), t(2));
}

#[test]
fn fixture_coordinates() {
    let c = essential_coordinates(&fixture());
    let t1t2 = G::term(2, Monomial::from_bits(0b11), rat(1, 1));
    assert_eq!(c.u(&[e(1)], &[o(1)]).unwrap(), &G::scalar(2, rat(2, 3)) - &t1t2.scale(&rat(1, 9)));
    assert_eq!(c.u(&[e(2)], &[o(1)]).unwrap(), G::scalar(2, rat(1, 3)));
    assert_eq!(c.u(&[o(1)], &[o(2)]).unwrap(), t(1));
    assert_eq!(c.ustar(&[e(2)], &[e(1)]).unwrap(), t(2));
    // sp0 at 1|1
    assert!((&c.u(&[e(1)], &[o(1)]).unwrap() * &c.ustar(&[e(1)], &[o(1)]).unwrap()).is_one());
    // recover x, ξ, y, η in chart 2|2
    let w = inverse_plucker(&c, &ChartIndex::new(vec![2], vec![2])).unwrap();
    assert_eq!(w, fixture());
}

#[test]
fn lookup_rules() {
    let c = essential_coordinates(&random_plane(SuperShape::new(2, 1), SuperShape::new(3, 2), 3, 5).unwrap());
    // antisymmetry in even slots, including the ghost
    assert_eq!(c.u(&[e(2), e(1)], &[o(1)]).unwrap(), -c.u(&[e(1), e(2)], &[o(1)]).unwrap());
    assert_eq!(c.u(&[o(2), e(1)], &[o(1)]).unwrap(), -c.u(&[e(1), o(2)], &[o(1)]).unwrap());
    assert!(c.u(&[e(1), e(1)], &[o(1)]).unwrap().is_zero());
    assert!(c.u(&[e(1), o(1)], &[o(1)]).unwrap().is_zero());
    assert!(c.ustar(&[e(1), e(2)], &[e(2)]).unwrap().is_zero());
    assert!(c.ustar(&[e(1), e(1)], &[o(1)]).is_err());
}

#[test]
fn roundtrip_every_admissible_chart() {
    for (shape, amb, seed) in [((1, 1), (3, 2), 1), ((2, 0), (4, 2), 2), ((2, 1), (3, 3), 3), ((1, 2), (2, 3), 4), ((0, 2), (2, 3), 5)] {
        let l = random_plane(SuperShape::new(shape.0, shape.1), SuperShape::new(amb.0, amb.1), 3, seed).unwrap();
        let c = essential_coordinates(&l);
        for chart in l.admissible_charts() {
            assert_eq!(inverse_plucker(&c, &chart).unwrap(), l.normalize_to_chart(&chart).unwrap(), "chart {chart}");
        }
    }
}

#[test]
fn equivariance_and_equivalence() {
    let mut r = rng(17);
    let l = random_plane(SuperShape::new(1, 1), SuperShape::new(3, 2), 4, 8).unwrap();
    let g = random_invertible(4, SuperShape::new(1, 1), &mut r);
    let c = essential_coordinates(&l);
    let cg = essential_coordinates(&l.transform(&g).unwrap());
    assert_eq!(coords_equivalent(&c, &cg), Some(g.ber().unwrap()));
    assert_eq!(coords_equivalent(&c, &c), Some(G::one(4)));
    let mut bad = c.clone();
    let key = bad.family(Family::UGhost).keys().next().unwrap().clone();
    let v = bad.family(Family::UGhost)[&key].clone().unwrap();
    bad.family_mut(Family::UGhost).insert(key, Some(&v + &G::generator(4, 1).unwrap()));
    assert_eq!(coords_equivalent(&c, &bad), None);
}

#[test]
fn relations_hold_on_planes() {
    for (shape, amb, seed) in [((2, 0), (4, 2), 1), ((3, 0), (5, 1), 2)] {
        let l = random_plane(SuperShape::new(shape.0, shape.1), SuperShape::new(amb.0, amb.1), 3, seed).unwrap();
        let c = essential_coordinates(&l);
        let rep = relations_check_r0(&c).unwrap();
        assert!(rep.all_hold(), "{:?}", rep.families.iter().map(|f| (f.name, f.violations.len())).collect::<Vec<_>>());
        assert!(relations_check_rs(&c).unwrap().all_hold());
    }
    for (amb, seed) in [((2, 2), 3), ((3, 2), 4)] {
        let l = random_plane(SuperShape::new(1, 1), SuperShape::new(amb.0, amb.1), 4, seed).unwrap();
        let c = essential_coordinates(&l);
        let rep = relations_check_11(&c).unwrap();
        for f in &rep.families {
            assert!(f.holds(), "{}: {:?}", f.name, f.violations.first());
        }
        assert!(relations_check_rs(&c).unwrap().all_hold());
    }
    let l = random_plane(SuperShape::new(2, 1), SuperShape::new(3, 2), 3, 9).unwrap();
    let rep = relations_check_rs(&essential_coordinates(&l)).unwrap();
    for f in &rep.families {
        assert!(f.holds(), "{}: {:?}", f.name, f.violations.first());
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;
    use superplucker::galgebra::Parity;
    use superplucker::random::{random_element, random_even_matrix};

    fn shape_case() -> impl Strategy<Value = (SuperShape, SuperShape, u64)> {
        prop_oneof![
            Just((SuperShape::new(1, 1), SuperShape::new(2, 2))),
            Just((SuperShape::new(2, 1), SuperShape::new(3, 2))),
            Just((SuperShape::new(2, 0), SuperShape::new(3, 1))),
            Just((SuperShape::new(0, 2), SuperShape::new(1, 3))),
        ]
        .prop_flat_map(|(s, a)| (Just(s), Just(a), any::<u64>()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn covariance((shape, amb, seed) in shape_case()) {
            let mut r = rng(seed);
            let l = random_plane(shape, amb, 3, seed).unwrap();
            let p = CovectorArray::new(random_even_matrix(3, amb, shape, &mut r), None);
            let g = random_invertible(3, shape, &mut r);
            let pg = CovectorArray::new(p.p.matmul(&g).unwrap(), None);
            if let Ok(v) = plucker_eval(&l, &p) {
                prop_assert_eq!(plucker_eval(&l, &pg).unwrap(), &v * &g.ber().unwrap());
            }
        }

        #[test]
        fn degree_homogeneity((shape, amb, seed) in shape_case()) {
            let mut r = rng(seed);
            let l = random_plane(shape, amb, 3, seed).unwrap();
            let p = random_even_matrix(3, amb, shape, &mut r);
            let Ok(base) = plucker_eval(&l, &CovectorArray::new(p.clone(), None)) else { return Ok(()) };
            for j in 0..shape.total() {
                let lambda = random_element(3, Parity::Even, &mut r);
                let col: Vec<G> = p.column(j).iter().map(|x| x * &lambda).collect();
                let scaled = plucker_eval(&l, &CovectorArray::new(p.with_column(j, &col), None)).unwrap();
                let factor = if j < shape.even { lambda.clone() } else { lambda.inverse().unwrap() };
                prop_assert_eq!(scaled, &base * &factor);
            }
        }

        #[test]
        fn pi_duality_swaps_families((shape, amb, seed) in shape_case()) {
            let l = random_plane(shape, amb, 3, seed).unwrap();
            let c = essential_coordinates(&l);
            let d = essential_coordinates(&l.pi_dual());
            let flip = |v: &[SIdx]| v.iter().map(|i| match *i { SIdx::Even(a) => o(a), SIdx::Odd(a) => e(a) }).collect::<Vec<_>>();
            for (key, v) in c.family(Family::U) {
                prop_assert_eq!(d.ustar(&flip(&key.odd), &flip(&key.even)).ok(), v.clone());
            }
            for (key, v) in c.family(Family::UStar) {
                prop_assert_eq!(d.u(&flip(&key.odd), &flip(&key.even)).ok(), v.clone());
            }
            for (key, v) in c.family(Family::UGhost) {
                prop_assert_eq!(d.ustar(&flip(&key.odd), &flip(&key.even)).ok(), v.clone(), "u_ghost {}", key);
            }
            for (key, v) in c.family(Family::UStarGhost) {
                prop_assert_eq!(d.u(&flip(&key.odd), &flip(&key.even)).ok(), v.clone(), "ustar_ghost {}", key);
            }
        }
    }
}
