use proptest::prelude::*;

use wordeq::automata::Nfa;
use wordeq::constraints::{hom_from_automata, idempotent_exponent, BoolMat, MonElem};
use wordeq::{Alphabet, Word};

fn alphabet() -> Alphabet {
    Alphabet::constants_from(&["a", "b"], &[]).unwrap()
}

prop_compose! {
    fn mat(n: usize)(bits in prop::collection::vec(any::<bool>(), n * n)) -> BoolMat {
        let mut m = BoolMat::zero(n);
        for (k, b) in bits.into_iter().enumerate() {
            m.set(k / n, k % n, b);
        }
        m
    }
}

prop_compose! {
    fn elem(n: usize)(a in mat(n), b in mat(n)) -> MonElem {
        MonElem { a, b }
    }
}

fn triple() -> impl Strategy<Value = (MonElem, MonElem, MonElem)> {
    (1usize..5).prop_flat_map(|n| (elem(n), elem(n), elem(n)))
}

fn word() -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(alphabet().constants()), 0..10)
}

prop_compose! {
    fn nfa()(n in 1usize..4)(
        n in Just(n),
        finals in prop::collection::vec(any::<bool>(), n),
        edges in prop::collection::vec((0..n, 0usize..4, 0..n), 1..8),
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
            a.add_transition(p, Some(letters[l]), q);
        }
        a
    }
}

proptest! {
    #[test]
    fn monoid_laws((x, y, z) in triple()) {
        let n = x.dim();
        let one = MonElem::unit(n);
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&one), x.clone());
        prop_assert_eq!(one.mul(&x), x.clone());
        prop_assert_eq!(x.mul(&y).involute(), y.involute().mul(&x.involute()));
        prop_assert_eq!(x.involute().involute(), x.clone());
        prop_assert_eq!(x.pow(3), x.mul(&x).mul(&x));
        prop_assert_eq!(x.pow(0), one);
    }

    #[test]
    fn idempotent_power((x, _, _) in triple()) {
        let c = idempotent_exponent(x.dim()).unwrap();
        let e = x.pow(c);
        prop_assert_eq!(e.mul(&e), e);
    }

    #[test]
    fn hom_matches_automata(a in nfa(), b in nfa(), u in word(), v in word()) {
        let al = alphabet();
        let (h, vecs, n) = hom_from_automata(&al, &[a.clone(), b.clone()]);
        prop_assert_eq!(n, a.states() + b.states());
        prop_assert!(h.is_involution_compatible(&al));
        let uv: Word = u.iter().chain(&v).copied().collect();
        let hu = h.hom_image(&u).unwrap();
        prop_assert_eq!(h.hom_image(&uv).unwrap(), hu.mul(&h.hom_image(&v).unwrap()));
        prop_assert_eq!(h.hom_image(&al.involute(&u)).unwrap(), hu.involute());
        prop_assert_eq!(vecs[0].accepts(&hu), a.accepts(&u));
        prop_assert_eq!(vecs[1].accepts(&hu), b.accepts(&u));
    }
}
