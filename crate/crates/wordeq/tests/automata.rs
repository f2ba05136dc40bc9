use proptest::prelude::*;

use wordeq::automata::Nfa;
use wordeq::{Alphabet, Sym, Word};

fn alphabet() -> Alphabet {
    Alphabet::constants_from(&["a", "b"], &[]).unwrap()
}

prop_compose! {
    fn nfa()(n in 1usize..4)(
        n in Just(n),
        finals in prop::collection::vec(any::<bool>(), n),
        edges in prop::collection::vec((0..n, prop::option::weighted(0.9, 0usize..4), 0..n), 1..8),
    ) -> Nfa {
        let letters = alphabet().constants();
        let mut a = Nfa::new(n);
        a.set_initial(0);
        for (p, f) in finals.into_iter().enumerate() {
            if f {
                a.set_final(p);
            }
        }
        for (p, l, q) in edges {
            a.add_transition(p, l.map(|i| letters[i]), q);
        }
        a
    }
}

fn words(max: usize) -> Vec<Word> {
    let letters: Vec<Sym> = alphabet().constants();
    let mut all = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w| letters.iter().map(move |&c| [w.as_slice(), &[c]].concat()))
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boolean_operations(a in nfa(), b in nfa()) {
        let al = alphabet();
        let prod = a.product(&b);
        let uni = a.union(&b);
        let det = a.determinize(&al, 1 << 10).unwrap();
        let comp = a.complement(&al, 1 << 10).unwrap();
        let no_eps = a.remove_epsilon();
        prop_assert!(det.is_deterministic());
        prop_assert!(no_eps.is_epsilon_free());
        for w in words(4) {
            let (x, y) = (a.accepts(&w), b.accepts(&w));
            prop_assert_eq!(prod.accepts(&w), x && y);
            prop_assert_eq!(uni.accepts(&w), x || y);
            prop_assert_eq!(det.accepts(&w), x);
            prop_assert_eq!(comp.accepts(&w), !x);
            prop_assert_eq!(no_eps.accepts(&w), x);
        }
    }

    #[test]
    fn saturation(a in nfa()) {
        let al = alphabet();
        let sat = a.benois_saturate(&al);
        let again = sat.benois_saturate(&al);
        for w in words(4) {
            let r = al.free_reduce(&w);
            // Reduction never leaves the saturated language.
            if a.accepts(&w) || sat.accepts(&w) {
                prop_assert!(sat.accepts(&r));
            }
            prop_assert_eq!(again.accepts(&w), sat.accepts(&w));
        }
    }

    #[test]
    fn group_complement_partitions_reduced_words(a in nfa()) {
        let al = alphabet();
        let sat = a.benois_saturate(&al);
        let comp = a.group_complement(&al, 1 << 12).unwrap();
        for w in words(4).into_iter().filter(|w| al.is_reduced(w)) {
            prop_assert_ne!(sat.accepts(&w), comp.accepts(&w));
        }
    }

    #[test]
    fn text_round_trip(a in nfa()) {
        let al = alphabet();
        let b = Nfa::parse(&al, &a.render(&al)).unwrap();
        for w in words(4) {
            prop_assert_eq!(a.accepts(&w), b.accepts(&w));
        }
    }
}
