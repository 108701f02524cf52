use proptest::prelude::*;
use tnnflag::twisted::ParabolicContext;
use tnnflag::{CartanMatrix, WeylGroup, Word};

fn groups() -> Vec<WeylGroup> {
    ["A3", "B3", "G2", "A1~", "H3,3"]
        .iter()
        .map(|n| WeylGroup::new(CartanMatrix::from_name(n).unwrap()))
        .collect()
}

fn group_and_word() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0usize..5).prop_flat_map(|g| {
        let rank: usize = if g < 2 { 3 } else { 2 };
        (Just(g), prop::collection::vec(0..rank, 0..12))
    })
}

proptest! {
    #[test]
    fn canonical_word_is_reduced_and_equivalent((g, word) in group_and_word()) {
        let group = &groups()[g];
        let w = group.from_word(&word).unwrap();
        let canon = w.canonical_word().clone();
        prop_assert!(canon.len() <= word.len());
        prop_assert_eq!(canon.len() % 2, word.len() % 2);
        let again = group.from_word(canon.letters()).unwrap();
        prop_assert_eq!(&again, &w);
        prop_assert_eq!(w.length(), w.inverse().length());
        prop_assert_eq!(w.inversion_set().len(), w.length());
    }

    #[test]
    fn subwords_are_below((g, word) in group_and_word(), mask in any::<u16>()) {
        let group = &groups()[g];
        let w = group.from_word(&word).unwrap();
        let reduced = w.canonical_word().letters().to_vec();
        let sub: Vec<usize> = reduced.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i).collect();
        let v = group.from_word(&sub).unwrap();
        prop_assert!(v.bruhat_leq(&w));
        prop_assert!(group.identity().bruhat_leq(&w));
        if v != w {
            prop_assert!(!w.bruhat_leq(&v));
        }
    }

    #[test]
    fn parabolic_decomposition_is_length_additive((g, word) in group_and_word(), jmask in 0u8..8) {
        let group = &groups()[g];
        let w = group.from_word(&word).unwrap();
        let j: Vec<usize> = (0..group.rank()).filter(|i| jmask >> i & 1 == 1).collect();
        let ctx = ParabolicContext::new(group, &j).unwrap();
        let (rep, part) = ctx.decompose(&w);
        prop_assert_eq!(&(&rep * &part), &w);
        prop_assert_eq!(rep.length() + part.length(), w.length());
        prop_assert!(ctx.is_min_rep(&rep));
        prop_assert!(part.canonical_word().letters().iter().all(|i| j.contains(i)));
    }

    #[test]
    fn descents_match_length_changes((g, word) in group_and_word()) {
        let group = &groups()[g];
        let w = group.from_word(&word).unwrap();
        for i in 0..group.rank() {
            prop_assert_eq!(w.has_right_descent(i), w.mul_simple_right(i).length() < w.length());
            prop_assert_eq!(w.has_left_descent(i), w.mul_simple_left(i).length() < w.length());
        }
    }
}

#[test]
fn word_parsing_reports_positions() {
    let a2 = CartanMatrix::type_a(2);
    assert_eq!(Word::parse("1, 2 1", &a2).unwrap().letters(), &[0, 1, 0]);
    assert!(Word::parse("", &a2).unwrap().is_empty());
    let err = Word::parse("1 3", &a2).unwrap_err().to_string();
    assert!(err.contains("position"), "{err}");
}

#[test]
fn reduced_word_counts_of_longest_elements() {
    // Known counts: A2 has 2, B2 has 2, A3 has 16, G2 has 2.
    for (name, count) in [("A2", 2), ("B2", 2), ("A3", 16), ("G2", 2)] {
        let g = WeylGroup::new(CartanMatrix::from_name(name).unwrap());
        let all: Vec<usize> = (0..g.rank()).collect();
        let w0 = g.longest_element(&all).unwrap();
        let words = w0.reduced_words(usize::MAX);
        assert_eq!(words.len(), count, "{name}");
        for word in &words {
            assert_eq!(word.len(), w0.length());
            assert_eq!(g.from_word(word.letters()).unwrap(), w0);
        }
        assert_eq!(words[0], *w0.canonical_word());
    }
}
