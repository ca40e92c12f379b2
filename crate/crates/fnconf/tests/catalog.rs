use fnconf::confining::{ConfCtx, ConfFamily};
use fnconf::exactnum::rat;
use fnconf::verdict::Budget;

#[test]
fn rigid_stabilizers_are_equivalent() {
    let ctx = ConfCtx::new(2).unwrap();
    let b = Budget::default().with_samples(20);
    let f = ConfFamily::RigidStab { t: rat(1, 4) };
    let g = ConfFamily::RigidStab { t: rat(3, 8) };
    assert!(ctx.compare(&f, &g, &b).unwrap().dominates().is_some());
    assert!(ctx.compare(&g, &f, &b).unwrap().dominates().is_some());
}

#[test]
fn cross_orbit_fixators_are_refuted_with_replay() {
    let ctx = ConfCtx::new(2).unwrap();
    let b = Budget::default().with_samples(20);
    let f = ConfFamily::OrbitFixator { t: rat(1, 4) };
    let g = ConfFamily::OrbitFixator { t: rat(1, 5) };
    let v = ctx.compare(&f, &g, &b).unwrap();
    assert!(v.is_refuted());
    assert!(ctx.replay(&f, &g, &v).unwrap());
}

#[test]
fn catalog_passes_axioms_small_budget() {
    let ctx = ConfCtx::new(2).unwrap();
    let b = Budget::default().with_samples(15);
    for f in [
        ConfFamily::RigidStab { t: rat(1, 4) },
        ConfFamily::OrbitFixator { t: rat(1, 8) },
        ConfFamily::NbhdOrbitFixator { t: rat(1, 4) },
    ] {
        let r = ctx.axiom_check(&f, &b).unwrap();
        assert!(r.passed(), "{}", f.name());
    }
}
