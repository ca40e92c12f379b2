use fnconf::exactnum::rat;
use fnconf::plmap::{compose, random_element};
use fnconf::treesim::{tree_ball, HNNData, IsometryType};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tree_metric_laws(seed in any::<u64>()) {
        let h = HNNData::new(2, &rat(1, 4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_element(&mut rng, 2, 3);
        let k = random_element(&mut rng, 2, 3);
        let dg = h.tree_distance(&g).unwrap();
        let dk = h.distance(&k).unwrap();
        let gk = compose(&g, &k).unwrap();
        prop_assert!(h.distance(&gk).unwrap() <= dg.d + dk);
        prop_assert_eq!(h.distance_between(&k, &compose(&k, &g).unwrap()).unwrap(), dg.d);
        prop_assert_eq!(dg.q as i64 - dg.p as i64, g.chi0().unwrap());
        let lox = h.isometry_type(&g).unwrap() == IsometryType::Loxodromic;
        prop_assert_eq!(lox, g.chi0().unwrap() != 0);
    }
}

#[test]
fn depth_four_ball_matches_normal_form() {
    let h = HNNData::new(2, &rat(1, 4)).unwrap();
    let ball = tree_ball(&h, 4).unwrap();
    assert!(ball.summary().acyclic);
    for i in 0..ball.vertices() {
        assert_eq!(h.distance(&ball.reps[i]).unwrap(), ball.dist(i));
    }
}
