//! Finite posets checked on divisor lattices, whose structure is known in
//! closed form.

use proptest::prelude::*;
use tnnflag::homology::reduced_homology;
use tnnflag::io::PosetJson;
use tnnflag::poset::{order_complex, ComplexMode, FinitePoset};

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn prime_exponents(mut n: u64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while n > 1 {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push(e);
        }
        p += 1;
    }
    out
}

fn divisor_lattice(n: u64) -> (Vec<u64>, FinitePoset) {
    let ds = divisors(n);
    let mut covers = Vec::new();
    for (i, a) in ds.iter().enumerate() {
        for (j, b) in ds.iter().enumerate() {
            if b % a == 0 && prime_exponents(b / a).iter().sum::<u32>() == 1 {
                covers.push((i, j));
            }
        }
    }
    let rank = ds
        .iter()
        .map(|&d| prime_exponents(d).iter().sum::<u32>() as i64)
        .collect();
    let p = FinitePoset::new(ds.iter().map(u64::to_string).collect(), covers, Some(rank)).unwrap();
    (ds, p)
}

fn factorial(k: u64) -> u64 {
    (1..=k).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_is_divisibility(n in 1u64..400) {
        let (ds, p) = divisor_lattice(n);
        for (i, a) in ds.iter().enumerate() {
            for (j, b) in ds.iter().enumerate() {
                prop_assert_eq!(p.leq(i, j), b % a == 0);
                prop_assert_eq!(p.dual().leq(j, i), b % a == 0);
            }
        }
        prop_assert_eq!(p.minimum(), Some(0));
        prop_assert_eq!(p.maximum(), Some(ds.len() - 1));
    }

    #[test]
    fn chain_count_is_multinomial(n in 1u64..400) {
        let (ds, p) = divisor_lattice(n);
        let es = prime_exponents(n);
        let total: u32 = es.iter().sum();
        let expected = factorial(total as u64) / es.iter().map(|&e| factorial(e as u64)).product::<u64>();
        prop_assert_eq!(p.maximal_chains(0, ds.len() - 1).len() as u64, expected);
        prop_assert!(p.check_pure().pure);
        prop_assert_eq!(p.height(), total as usize);
    }

    #[test]
    fn thin_iff_squarefree(n in 1u64..400) {
        let (_, p) = divisor_lattice(n);
        let squarefree = prime_exponents(n).iter().all(|&e| e == 1);
        prop_assert_eq!(p.check_thin().unwrap().thin, squarefree);
    }

    #[test]
    fn json_round_trip(n in 1u64..400) {
        let (_, p) = divisor_lattice(n);
        let json = PosetJson::from_poset(&p);
        let back: PosetJson = serde_json::from_str(&serde_json::to_string(&json).unwrap()).unwrap();
        prop_assert_eq!(PosetJson::from_poset(&back.to_poset().unwrap()), json);
    }
}

#[test]
fn boolean_intervals_are_spheres() {
    // 2, 6, 30, 210: Boolean lattices of rank 1..4.
    for (k, n) in [2u64, 6, 30, 210].into_iter().enumerate() {
        let (_, p) = divisor_lattice(n);
        let c = order_complex(&p, ComplexMode::OpenInterval).unwrap();
        assert_eq!(
            reduced_homology(&c).unwrap().sphere_dimension(),
            Some(k as i64 - 1),
            "n = {n}"
        );
    }
}

#[test]
fn non_boolean_intervals_are_contractible() {
    // The open interval (1, 12) is the path 4 - 2 - 6 - 3, hence contractible.
    let (_, p) = divisor_lattice(12);
    let c = order_complex(&p, ComplexMode::OpenInterval).unwrap();
    let h = reduced_homology(&c).unwrap();
    assert!(h.betti.iter().all(|&b| b == 0) && h.minus_one == 0);
}
