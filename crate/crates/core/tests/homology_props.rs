//! Reduced homology against classical complexes and topological invariants.

use num_bigint::BigInt;
use proptest::prelude::*;
use tnnflag::homology::{reduced_homology, smith_normal_form, HomologyProfile};
use tnnflag::poset::{order_complex, ComplexMode, FinitePoset, SimplicialComplex};

fn complex(vertices: usize, facets: Vec<Vec<usize>>) -> SimplicialComplex {
    SimplicialComplex::new(vertices, facets).unwrap()
}

/// The boundary of the simplex on `k + 1` vertices.
fn simplex_boundary(k: usize) -> SimplicialComplex {
    let facets = (0..=k)
        .map(|skip| (0..=k).filter(|&v| v != skip).collect())
        .collect();
    complex(k + 1, facets)
}

fn cone(c: &SimplicialComplex) -> SimplicialComplex {
    let apex = c.vertices;
    let facets = c
        .facets
        .iter()
        .map(|f| f.iter().copied().chain([apex]).collect())
        .collect();
    complex(c.vertices + 1, facets)
}

fn suspension(c: &SimplicialComplex) -> SimplicialComplex {
    let (north, south) = (c.vertices, c.vertices + 1);
    let facets = c
        .facets
        .iter()
        .flat_map(|f| [north, south].map(|p| f.iter().copied().chain([p]).collect()))
        .collect();
    complex(c.vertices + 2, facets)
}

fn is_acyclic(h: &HomologyProfile) -> bool {
    h.minus_one == 0 && h.betti.iter().all(|&b| b == 0) && h.torsion.iter().all(Vec::is_empty)
}

#[test]
fn simplex_boundaries_are_spheres() {
    for k in 1..=6 {
        let h = reduced_homology(&simplex_boundary(k)).unwrap();
        assert_eq!(
            h.sphere_dimension(),
            Some(k as i64 - 1),
            "boundary of the {k}-simplex"
        );
    }
    assert_eq!(
        reduced_homology(&complex(0, vec![vec![]]))
            .unwrap()
            .sphere_dimension(),
        Some(-1)
    );
}

#[test]
fn projective_plane_has_two_torsion() {
    let facets = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 1, 5],
        [1, 2, 4],
        [1, 3, 4],
        [1, 3, 5],
        [2, 3, 5],
        [2, 4, 5],
    ];
    let h = reduced_homology(&complex(6, facets.iter().map(|f| f.to_vec()).collect())).unwrap();
    assert_eq!(h.betti, vec![0, 0, 0]);
    assert_eq!(h.torsion, vec![vec![], vec![BigInt::from(2)], vec![]]);
    assert_eq!(h.sphere_dimension(), None);
}

#[test]
fn seven_vertex_torus() {
    let facets = (0..7)
        .flat_map(|i| {
            [
                vec![i, (i + 1) % 7, (i + 3) % 7],
                vec![i, (i + 2) % 7, (i + 3) % 7],
            ]
        })
        .collect();
    let h = reduced_homology(&complex(7, facets)).unwrap();
    assert_eq!(h.betti, vec![0, 2, 1]);
    assert!(h.torsion.iter().all(Vec::is_empty));
}

#[test]
fn smith_form_of_a_classical_example() {
    let snf = smith_normal_form(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    assert_eq!(snf.diag, [2, 6, 12].map(BigInt::from).to_vec());
    assert_eq!(snf.rank, 3);
}

#[test]
fn order_complex_of_boolean_lattice_interval_is_a_sphere() {
    // Proper part of the Boolean lattice on three atoms: the barycentric
    // subdivision of a triangle boundary.
    let keys: Vec<String> = (0..8).map(|m: usize| format!("{m:03b}")).collect();
    let mut covers = Vec::new();
    for a in 0..8usize {
        for bit in 0..3 {
            if a & 1 << bit == 0 {
                covers.push((a, a | 1 << bit));
            }
        }
    }
    let p = FinitePoset::new(keys, covers, None).unwrap();
    let c = order_complex(&p, ComplexMode::OpenInterval).unwrap();
    assert_eq!(reduced_homology(&c).unwrap().sphere_dimension(), Some(1));
    let full = order_complex(&p, ComplexMode::Full).unwrap();
    assert!(is_acyclic(&reduced_homology(&full).unwrap()));
}

fn random_complex() -> impl Strategy<Value = SimplicialComplex> {
    (2usize..7).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::btree_set(0..n, 1..=4.min(n)), 1..6).prop_map(
            move |fs| complex(n, fs.into_iter().map(|f| f.into_iter().collect()).collect()),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cones_are_acyclic(c in random_complex()) {
        prop_assert!(is_acyclic(&reduced_homology(&cone(&c)).unwrap()));
    }

    #[test]
    fn suspension_shifts_homology(c in random_complex()) {
        let h = reduced_homology(&c).unwrap();
        let s = reduced_homology(&suspension(&c)).unwrap();
        prop_assert_eq!(s.minus_one, 0);
        prop_assert_eq!(s.betti.first().copied().unwrap_or(0), h.minus_one);
        for (k, &b) in h.betti.iter().enumerate() {
            prop_assert_eq!(s.betti.get(k + 1).copied().unwrap_or(0), b);
            prop_assert_eq!(s.torsion.get(k + 1).cloned().unwrap_or_default(), h.torsion[k].clone());
        }
    }

    #[test]
    fn smith_factors_divide_and_rank_is_preserved(
        m in prop::collection::vec(prop::collection::vec(-6i64..7, 4), 1..5)
    ) {
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.diag.len(), snf.rank);
        for pair in snf.diag.windows(2) {
            prop_assert!((&pair[1] % &pair[0]) == BigInt::from(0));
        }
        let mut t = m.clone();
        for row in &mut t {
            row.reverse();
        }
        prop_assert_eq!(smith_normal_form(&t), snf);
    }
}
