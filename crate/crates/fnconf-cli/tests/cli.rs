use fnconf::confining::{ConfFamily, IndexSet};
use fnconf::exactnum::rat;
use fnconf::lamplighter::{LampFamily, LampSubgroup};
use fnconf_cli::grammar::{format_family, format_lamp_family, parse_family, parse_lamp_family};
use fnconf_cli::run_with;
use proptest::prelude::*;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["fnconf"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn result(out: &str) -> Value {
    serde_json::from_str::<Value>(out).unwrap()["result"].clone()
}

#[test]
fn rigid_stabilizers_dominate_both_ways() {
    let (code, out, _) = run(&["conf", "compare", "rigidstab:1/4", "rigidstab:3/8", "--n", "2", "--budget", "20", "--strict"]);
    assert_eq!(code, 0);
    let r = result(&out);
    assert_eq!(r["forward"]["verdict"], "dominates");
    assert_eq!(r["backward"]["verdict"], "dominates");
}

#[test]
fn strict_refutation_exits_two() {
    let args = ["conf", "compare", "orbitfix:1/4", "orbitfix:1/5", "--budget", "20"];
    assert_eq!(run(&args).0, 0);
    let mut strict = args.to_vec();
    strict.push("--strict");
    let (code, out, _) = run(&strict);
    assert_eq!(code, 2);
    assert_eq!(result(&out)["forward"]["verdict"], "refuted");
}

#[test]
fn compose_files_and_hash_inputs() {
    let dir = std::env::temp_dir().join(format!("fnconf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (_, gen, _) = run(&["elt", "canonical", "gen:0"]);
    let f = dir.join("a0.json");
    std::fs::write(&f, result(&gen).to_string()).unwrap();
    let fp = f.to_str().unwrap();
    let (code, out, _) = run(&["elt", "compose", fp, "gen:0"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["manifest"]["inputs"][fp].as_str().unwrap().len(), 64);
    let (_, inv, _) = run(&["elt", "invert", fp]);
    let g = dir.join("inv.json");
    std::fs::write(&g, result(&inv).to_string()).unwrap();
    let (_, id, _) = run(&["elt", "compose", fp, g.to_str().unwrap()]);
    let (_, canon_id, _) = run(&["elt", "canonical", "id"]);
    assert_eq!(result(&id), result(&canon_id));

    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"n\": 2,\n \"orientation\": 1, \"points\": [[\"0\", \"0\"], [\"1/3\"").unwrap();
    let (code, _, err) = run(&["elt", "invert", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn invariant_violations_are_named() {
    let dir = std::env::temp_dir().join(format!("fnconf-cli-inv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (_, gen, _) = run(&["elt", "canonical", "gen:0"]);
    let mut v = result(&gen);
    v["breakpoints"][1][1] = Value::String("3/2^3".into());
    let f = dir.join("bad.json");
    std::fs::write(&f, v.to_string()).unwrap();
    let (code, _, err) = run(&["elt", "invert", f.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("invalid value") && err.contains("slope"), "{err}");
}

#[test]
fn manifest_replays_byte_for_byte() {
    let dir = std::env::temp_dir().join(format!("fnconf-cli-replay-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (_, out, _) = run(&["tree", "busemann", "gen:0", "--m", "6"]);
    let (_, again, _) = run(&["tree", "busemann", "gen:0", "--m", "6"]);
    assert_eq!(out, again);
    let p = dir.join("report.json");
    std::fs::write(&p, &out).unwrap();
    let (code, rep, _) = run(&["harness", "replay", p.to_str().unwrap(), "--strict"]);
    assert_eq!(code, 0);
    assert_eq!(result(&rep)["identical"], true);
}

#[test]
fn other_subcommands() {
    let (code, out, _) = run(&["tree", "dist", "gen:0"]);
    assert_eq!(code, 0);
    let r = result(&out);
    assert_eq!((r["d"].as_u64(), r["p"].as_u64(), r["q"].as_u64()), (Some(1), Some(0), Some(1)));
    assert_eq!(r["oracle_checked"], true);
    let (code, out, _) = run(&["lamp", "compare", "subgroup:trivial", "balls", "--budget", "20"]);
    assert_eq!(code, 0);
    assert_eq!(result(&out)["verdict"], "dominates");
    let (_, out, _) = run(&["nonlamplike", "odd-set", "--count", "4"]);
    assert_eq!(result(&out), serde_json::json!([3, 5, 9, 17]));
    let (code, out, _) = run(&["lamp", "nonsplit", "--p-max", "4", "--budget", "20"]);
    assert_eq!(code, 0);
    assert_eq!(result(&out)["holds"], true);
    let (code, _, err) = run(&["conf", "axioms", "rigidstab:1/x"]);
    assert_eq!(code, 1);
    assert!(err.contains("position 10"), "{err}");
    assert_eq!(run(&["bogus"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

fn point() -> impl Strategy<Value = fnconf::exactnum::Rational> {
    (1i64..40, 41i64..90).prop_map(|(p, q)| rat(p, q))
}

fn index_set() -> impl Strategy<Value = IndexSet> {
    (any::<bool>(), proptest::collection::btree_set(1u64..20, 0..4)).prop_map(|(fin, xs)| {
        if fin {
            IndexSet::Finite { elements: xs }
        } else {
            IndexSet::Cofinite { missing: xs }
        }
    })
}

fn family() -> impl Strategy<Value = ConfFamily> {
    let leaf = prop_oneof![
        Just(ConfFamily::Full),
        point().prop_map(|t| ConfFamily::RigidStab { t }),
        point().prop_map(|t| ConfFamily::OpenRigidStab { t }),
        point().prop_map(|t| ConfFamily::OrbitFixator { t }),
        point().prop_map(|t| ConfFamily::NbhdOrbitFixator { t }),
        (point(), point(), index_set()).prop_map(|(t, x, set)| ConfFamily::LamplikeProduct { t, x, set }),
        (proptest::collection::vec(1u64..50, 1..4), point())
            .prop_map(|(s, tau1)| ConfFamily::NonLamplike { s, tau1 }),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), -5i64..5).prop_map(|(f, k)| ConfFamily::Conjugate { inner: Box::new(f), k }),
            (inner.clone(), inner.clone())
                .prop_map(|(l, r)| ConfFamily::Intersection { left: Box::new(l), right: Box::new(r) }),
            (inner, point()).prop_map(|(f, t)| ConfFamily::SplitClosure { inner: Box::new(f), t }),
        ]
    })
}

fn lamp_family() -> impl Strategy<Value = LampFamily> {
    let leaf = prop_oneof![
        Just(LampFamily::FullL),
        Just(LampFamily::Balls),
        Just(LampFamily::NonSplit),
        (1u64..9).prop_map(|c| LampFamily::Machado { c }),
        Just(LampFamily::Subgroup { h: LampSubgroup::Trivial }),
        Just(LampFamily::Subgroup { h: LampSubgroup::Whole }),
        (1u64..9).prop_map(|m| LampFamily::Subgroup { h: LampSubgroup::Multiples { m } }),
        index_set().prop_map(|set| LampFamily::Subgroup { h: LampSubgroup::Coordinates { set } }),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| LampFamily::SplitClosureL { inner: Box::new(f) }),
            (inner.clone(), -5i64..5).prop_map(|(f, k)| LampFamily::ShiftConjugate { inner: Box::new(f), k }),
            (inner.clone(), inner)
                .prop_map(|(l, r)| LampFamily::IntersectionL { left: Box::new(l), right: Box::new(r) }),
        ]
    })
}

proptest! {
    #[test]
    fn family_literals_round_trip(f in family()) {
        prop_assert_eq!(parse_family(&format_family(&f), 2).unwrap(), f);
    }

    #[test]
    fn lamp_literals_round_trip(f in lamp_family()) {
        prop_assert_eq!(parse_lamp_family(&format_lamp_family(&f)).unwrap(), f);
    }

    #[test]
    fn parser_never_panics(s in "[a-z(){};:,@/0-9-]{0,30}") {
        let _ = parse_family(&s, 2);
        let _ = parse_lamp_family(&s);
    }

    #[test]
    fn family_json_round_trip(f in family()) {
        let s = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<ConfFamily>(&s).unwrap(), f);
    }
}
