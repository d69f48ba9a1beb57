use proptest::prelude::*;
use superplucker::grassmannian::*;
use superplucker::random::{random_invertible, rng};
use superplucker::{Error, SuperShape};

fn case() -> impl Strategy<Value = (SuperShape, SuperShape, u64)> {
    (0usize..=2, 0usize..=2, 0usize..=2, 0usize..=2, any::<u64>()).prop_filter_map("fits", |(r, s, dn, dm, seed)| {
        (r + s > 0 && dn + dm > 0).then(|| (SuperShape::new(r, s), SuperShape::new(r + dn, s + dm), seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chart_count_is_dimension((shape, amb, seed) in case()) {
        let l = random_plane(shape, amb, 3, seed).unwrap();
        for c in l.admissible_charts() {
            let w = l.normalize_to_chart(&c).unwrap();
            prop_assert!(w.is_normalized_in(&c));
            prop_assert_eq!(w.free_coordinate_count(&c).unwrap(), dimension(shape, amb).unwrap());
        }
    }

    #[test]
    fn normalization_is_gl_invariant((shape, amb, seed) in case()) {
        let l = random_plane(shape, amb, 3, seed).unwrap();
        let g = random_invertible(3, shape, &mut rng(seed ^ 9));
        let gl = l.transform(&g).unwrap();
        for c in l.admissible_charts() {
            prop_assert_eq!(gl.normalize_to_chart(&c).unwrap(), l.normalize_to_chart(&c).unwrap());
        }
    }

    #[test]
    fn pi_dual_commutes_with_normalization((shape, amb, seed) in case()) {
        let l = random_plane(shape, amb, 3, seed).unwrap();
        let d = l.pi_dual();
        prop_assert_eq!((d.shape(), d.ambient()), (shape.reversed(), amb.reversed()));
        for c in l.admissible_charts() {
            let swapped = ChartIndex::new(c.odd_cols.clone(), c.even_cols.clone());
            prop_assert_eq!(d.normalize_to_chart(&swapped).unwrap(), l.normalize_to_chart(&c).unwrap().pi_dual());
        }
    }
}

#[test]
fn chart_order_and_parsing() {
    let cs = charts(SuperShape::new(1, 1), SuperShape::new(2, 2));
    let txt: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
    assert_eq!(txt, ["1|1", "1|2", "2|1", "2|2"]);
    assert_eq!("1,3|2".parse::<ChartIndex>().unwrap(), ChartIndex::new(vec![1, 3], vec![2]));
    assert!("1,x|2".parse::<ChartIndex>().is_err());
}

#[test]
fn quoted_dimensions() {
    assert_eq!(dimension(SuperShape::new(1, 1), SuperShape::new(2, 2)).unwrap(), SuperShape::new(2, 2));
    assert_eq!(dimension(SuperShape::new(2, 0), SuperShape::new(5, 3)).unwrap(), SuperShape::new(6, 6));
    assert!(matches!(dimension(SuperShape::new(3, 0), SuperShape::new(2, 1)), Err(Error::ImpossibleShape(_))));
}

#[test]
fn change_chart_requires_normalized_input() {
    let l = random_plane(SuperShape::new(1, 1), SuperShape::new(2, 2), 2, 3).unwrap();
    let cs = l.admissible_charts();
    let w = l.normalize_to_chart(&cs[0]).unwrap();
    let to = cs.last().unwrap();
    assert_eq!(w.change_chart(&cs[0], to).unwrap(), l.normalize_to_chart(to).unwrap());
    if !l.is_normalized_in(&cs[0]) {
        assert!(l.change_chart(&cs[0], to).is_err());
    }
}

#[test]
fn rank_condition() {
    use superplucker::galgebra::GrassmannElement as G;
    let z = G::zero(1);
    let u = superplucker::SuperMatrix::from_shapes(1, SuperShape::new(1, 0), SuperShape::new(1, 1), vec![vec![z, G::generator(1, 1).unwrap()]]).unwrap();
    assert!(PlaneRep::new(u).is_err());
}
