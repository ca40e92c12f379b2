use fnconf::exactnum::{format_rational, parse_rational, rat};
use fnconf::plmap::{
    alpha_conjugate, compose, product, random_element, random_signed_element, standard_generators,
    PLMap,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn elements(seed: u64, n: u32, k: usize) -> Vec<PLMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| random_element(&mut rng, n, 3)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn associativity_and_inverses(seed in any::<u64>(), n in 2u32..=4) {
        let v = elements(seed, n, 3);
        let (f, g, h) = (&v[0], &v[1], &v[2]);
        let left = compose(&compose(f, g).unwrap(), h).unwrap();
        let right = compose(f, &compose(g, h).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert!(compose(f, &f.invert()).unwrap().is_identity());
        prop_assert_eq!(&compose(&PLMap::identity(n), f).unwrap(), f);
    }

    #[test]
    fn characters_are_additive(seed in any::<u64>(), n in 2u32..=3) {
        let v = elements(seed, n, 2);
        let fg = compose(&v[0], &v[1]).unwrap();
        prop_assert_eq!(fg.chi0().unwrap(), v[0].chi0().unwrap() + v[1].chi0().unwrap());
        prop_assert_eq!(fg.chi1().unwrap(), v[0].chi1().unwrap() + v[1].chi1().unwrap());
    }

    #[test]
    fn alpha_swaps_characters(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_signed_element(&mut rng, 2, 3);
        let h = random_signed_element(&mut rng, 2, 3);
        let ga = alpha_conjugate(&g);
        if g.orientation() == 1 {
            prop_assert_eq!(ga.chi0().unwrap(), g.chi1().unwrap());
        }
        let gh = compose(&g, &h).unwrap();
        prop_assert_eq!(gh.epsilon(), g.epsilon() * h.epsilon());
        let al = PLMap::alpha(2);
        prop_assert!(compose(&al, &al).unwrap().is_identity());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 2u32..=3) {
        let g = &elements(seed, n, 1)[0];
        let s = serde_json::to_string(g).unwrap();
        let back: PLMap = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(&back, g);
    }

    #[test]
    fn rational_text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let x = rat(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }
}

#[test]
fn generators_commute() {
    for n in 2..=4u32 {
        let gens = standard_generators(n).unwrap();
        assert!(gens.violations().is_empty());
        for a in &gens.maps {
            for b in &gens.maps {
                let ab = product(n, [a, b]);
                let ba = product(n, [b, a]);
                assert_eq!(ab, ba);
            }
        }
    }
}
