use proptest::prelude::*;
use superplucker::clusters::{build_g2_51, values_from_coords};
use superplucker::essential::essential_coordinates;
use superplucker::exprio::*;
use superplucker::galgebra::{rat, GrassmannElement as G, Monomial};
use superplucker::grassmannian::random_plane;
use superplucker::multivector::wedge_rows;
use superplucker::{Error, SuperShape};

const FIXTURE: &str = r#"{
  "row_parities": ["e", "o"],
  "col_parities": ["e", "o"],
  "entries": [[2, "t1"], ["t2", 3]]
}"#;

#[test]
fn fixture_berezinian() {
    let m = parse_matrix(FIXTURE, true).unwrap();
    assert_eq!(m.gens(), 2);
    // (x − ξ y⁻¹ η) / y with x = 2, y = 3
    let x = G::from_int(2, 2);
    let y_inv = G::scalar(2, rat(1, 3));
    let xi = G::generator(2, 1).unwrap();
    let eta = G::generator(2, 2).unwrap();
    let oracle = &(&x - &(&(&xi * &y_inv) * &eta)) * &y_inv;
    assert_eq!(m.ber().unwrap(), oracle);
    assert_eq!(m.ber().unwrap(), parse_expr("2/3 - 1/9*t1*t2", 2).unwrap());
}

#[test]
fn matrix_documents() {
    let m = parse_matrix(FIXTURE, true).unwrap();
    assert_eq!(parse_matrix(&matrix_to_json(&m).to_string(), true).unwrap(), m);
    let empty = parse_matrix(r#"{"row_parities":[],"col_parities":[],"entries":[]}"#, true).unwrap();
    assert_eq!(empty.nrows(), 0);
    let bad = r#"{"row_parities":["e","o"],"col_parities":["e","o"],"entries":[["t1",0],[0,1]]}"#;
    match parse_matrix(bad, true) {
        Err(Error::Parity(msg)) => assert!(msg.contains("(1,1)"), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(parse_matrix(bad, false).is_ok());
    let ragged = r#"{"row_parities":["e"],"col_parities":["e","e"],"entries":[[1]]}"#;
    assert!(matches!(parse_matrix(ragged, false), Err(Error::Shape(_))));
    assert!(matches!(parse_matrix("{", false), Err(Error::Parse { .. })));
    let over = r#"{"gens":1,"row_parities":["e"],"col_parities":["e"],"entries":[["t2*t1"]]}"#;
    assert!(matches!(parse_matrix(over, false), Err(Error::Parse { .. })));
}

#[test]
fn multivector_coords_and_cluster_roundtrip() {
    let p = random_plane(SuperShape::new(2, 0), SuperShape::new(5, 1), 3, 4).unwrap();
    let t = wedge_rows(&p).unwrap();
    assert_eq!(parse_multivector(&multivector_to_json(&t).to_string()).unwrap(), t);
    assert_eq!(parse_plane(&plane_to_json(&p).to_string()).unwrap(), p);

    let q = random_plane(SuperShape::new(1, 1), SuperShape::new(2, 2), 3, 8).unwrap();
    let c = essential_coordinates(&q);
    assert_eq!(parse_coords(&coords_to_json(&c).to_string()).unwrap(), c);

    let g = build_g2_51();
    let values = values_from_coords(&essential_coordinates(&p)).unwrap();
    if let Some(s) = (0..10).find_map(|v| g.state(v, &values).ok()) {
        let (case, back) = parse_cluster_state(&cluster_state_to_json("5_1", &s).to_string()).unwrap();
        assert_eq!(case, "5_1");
        assert_eq!(back, s);
    }
}

fn element(gens: usize) -> impl Strategy<Value = G> {
    prop::collection::vec((0u32..(1 << gens), -20i64..20, 1i64..6), 0..6).prop_map(move |terms| {
        G::from_terms(gens, terms.into_iter().map(|(m, n, d)| (Monomial::from_bits(m), rat(n, d))))
    })
}

proptest! {
    #[test]
    fn print_parse_roundtrip(x in element(4)) {
        prop_assert_eq!(parse_expr(&x.to_string(), 4).unwrap(), x);
    }
}
