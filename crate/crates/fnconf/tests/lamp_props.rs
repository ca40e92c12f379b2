use std::collections::BTreeMap;

use fnconf::lamplighter::{lamp_inv, lamp_mul, lamp_shift, LampElt, IntLamp};
use proptest::prelude::*;

fn elt() -> impl Strategy<Value = LampElt<i64>> {
    (
        -5i64..=5,
        proptest::collection::btree_map(-6i64..=6, (-4i64..=4).prop_filter("nonzero", |x| *x != 0), 0..5),
    )
        .prop_map(|(shift, lamps)| LampElt { shift, lamps })
}

proptest! {
    #[test]
    fn wreath_group_laws(u in elt(), v in elt(), w in elt()) {
        let g = IntLamp;
        let uv_w = lamp_mul(&g, &lamp_mul(&g, &u, &v).unwrap(), &w).unwrap();
        let u_vw = lamp_mul(&g, &u, &lamp_mul(&g, &v, &w).unwrap()).unwrap();
        prop_assert_eq!(&uv_w, &u_vw);
        let e = lamp_mul(&g, &u, &lamp_inv(&g, &u)).unwrap();
        prop_assert_eq!(e, LampElt::identity());
    }

    #[test]
    fn shift_is_conjugation(u in elt(), k in -4i64..=4) {
        let g = IntLamp;
        let conj = lamp_mul(&g, &lamp_mul(&g, &LampElt::z(-k), &u).unwrap(), &LampElt::z(k)).unwrap();
        prop_assert_eq!(conj, lamp_shift(&u, k));
    }

    #[test]
    fn json_round_trip(u in elt()) {
        let s = serde_json::to_string(&u).unwrap();
        let back: LampElt<i64> = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, u);
    }
}

#[test]
fn single_lamp_json() {
    let u = LampElt { shift: 1, lamps: BTreeMap::from([(-2, 3i64)]) };
    assert_eq!(serde_json::to_string(&u).unwrap(), r#"{"shift":1,"lamps":{"-2":3}}"#);
}
