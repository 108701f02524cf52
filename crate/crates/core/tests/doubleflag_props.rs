//! The thickening embedding of the double flag poset, checked exhaustively.

use tnnflag::doubleflag::{extend_cartan, h_map, q_leq, TripleIndex};
use tnnflag::{CartanMatrix, WeylElement, WeylGroup};

fn triples(g: &WeylGroup) -> Vec<TripleIndex> {
    let elems = g.elements().unwrap();
    let mut out = Vec::new();
    for w in &elems {
        for u in &elems {
            for v in &elems {
                let t = TripleIndex::new(w.clone(), v.clone(), u.clone()).unwrap();
                if t.is_member() {
                    out.push(t);
                }
            }
        }
    }
    out
}

#[test]
fn h_is_an_order_embedding_into_intervals() {
    let a1xa1 = CartanMatrix::new(vec![vec![2, 0], vec![0, 2]]).unwrap();
    for (name, base) in [
        ("A1", CartanMatrix::type_a(1)),
        ("A2", CartanMatrix::type_a(2)),
        ("A1xA1", a1xa1),
    ] {
        let tc = extend_cartan(&base).unwrap();
        let ctx = tc.parabolic();
        let ts = triples(&WeylGroup::new(base));
        let images: Vec<(WeylElement, WeylElement)> =
            ts.iter().map(|t| h_map(t, &tc).unwrap()).collect();
        for (t, (x, y)) in ts.iter().zip(&images) {
            assert!(ctx.j_leq(x, y).unwrap(), "{name}: h{} is empty", t.key());
            // The image is one step longer: `th` adds the thickening node.
            assert_eq!(
                ctx.j_length(y) - ctx.j_length(x),
                t.dimension() + 1,
                "{name}: {}",
                t.key()
            );
        }
        for (a, (xa, ya)) in ts.iter().zip(&images) {
            for (b, (xb, yb)) in ts.iter().zip(&images) {
                let inside = ctx.j_leq(xb, xa).unwrap() && ctx.j_leq(ya, yb).unwrap();
                assert_eq!(
                    q_leq(a, b).unwrap(),
                    inside,
                    "{name}: {} vs {}",
                    a.key(),
                    b.key()
                );
            }
        }
    }
}

#[test]
fn h_is_injective() {
    let base = CartanMatrix::from_name("A2").unwrap();
    let tc = extend_cartan(&base).unwrap();
    let ts = triples(&WeylGroup::new(base));
    let mut images: Vec<_> = ts.iter().map(|t| h_map(t, &tc).unwrap()).collect();
    images.sort();
    images.dedup();
    assert_eq!(images.len(), ts.len());
}
