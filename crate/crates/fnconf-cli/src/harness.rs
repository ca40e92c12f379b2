//! The acceptance suite: one deterministic check per criterion, seeded throughout.

use std::collections::BTreeMap;

use fnconf::confining::{catalog, ConfCtx, ConfFamily, IndexSet};
use fnconf::exactnum::{int, log_n, nadic_above, nadic_below, rat, Rational};
use fnconf::lamplighter::{
    lamp_axiom_check, lamp_compare, lamp_replay, lamp_sample, machado_escape, machado_in,
    nonsplit_certificate, xi_section, xi_t, FreeAbelianLamp, IntLamp, LampFamily, LampGroup,
    LampSubgroup,
};
use fnconf::nonlamplike::{
    conj_a, good_odd_set, moving_witness, qs_compare, qs_member, stilde, stilde_estimate_holds,
    verify_odd_set, TauSequence,
};
use fnconf::plmap::{
    alpha_conjugate, compose, conj, fix_classification, power, product, random_element,
    random_signed_element, rational_slope_fix_element, standard_generators, window_commutator,
    FixClass, PLMap,
};
use fnconf::treesim::{tree_ball, HNNData, IsometryType};
use fnconf::verdict::{Budget, Verdict};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "group laws"),
    (2, "generator certificate"),
    (3, "fixed-point trichotomy"),
    (4, "confining axioms"),
    (5, "largest elements"),
    (6, "orbit comparisons"),
    (7, "non-lamplike certificate"),
    (8, "number theory"),
    (9, "lamplighters"),
    (10, "slope bridge"),
    (11, "tree suite"),
    (12, "signed algebra"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    /// The first few failed checks.
    pub failures: Vec<String>,
    pub details: Value,
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failed: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < 10 {
            self.failures.push(msg);
        }
    }

    fn result<T, E: std::fmt::Display>(&mut self, r: Result<T, E>, what: &str) -> Option<T> {
        self.checks += 1;
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{what}: {e}"));
                None
            }
        }
    }

    fn finish(self, id: u8, details: Value) -> Criterion {
        let name = CRITERIA[id as usize - 1].1.to_string();
        Criterion {
            id,
            name,
            passed: self.failed == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            details,
        }
    }
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

pub fn run_criterion(id: u8, seed: u64) -> Option<Criterion> {
    Some(match id {
        1 => group_laws(seed),
        2 => generators(),
        3 => fixed_points(seed),
        4 => confining_axioms(seed),
        5 => largest_elements(seed),
        6 => orbit_comparisons(seed),
        7 => nonlamplike_certificate(seed),
        8 => number_theory(),
        9 => lamplighters(seed),
        10 => slope_bridge(seed),
        11 => tree_suite(seed),
        12 => signed_algebra(seed),
        _ => return None,
    })
}

pub fn run_all(seed: u64) -> Vec<Criterion> {
    CRITERIA
        .iter()
        .filter_map(|(id, _)| run_criterion(*id, seed))
        .collect()
}

fn group_laws(seed: u64) -> Criterion {
    let mut t = Tally::default();
    for n in [2u32, 3] {
        let mut r = rng(seed, n as u64);
        let id = PLMap::identity(n);
        for i in 0..1000 {
            let f = random_element(&mut r, n, 3);
            let g = random_element(&mut r, n, 3);
            let h = random_element(&mut r, n, 3);
            let laws = (|| -> Result<bool, String> {
                let c = |x: &PLMap, y: &PLMap| compose(x, y).map_err(|e| e.to_string());
                let fg = c(&f, &g)?;
                let assoc = c(&fg, &h)? == c(&f, &c(&g, &h)?)?;
                let ident = c(&id, &f)? == f && c(&f, &id)? == f;
                let inv = c(&f, &f.invert())?.is_identity() && c(&f.invert(), &f)?.is_identity();
                let ch = |x: &PLMap| -> Result<(i64, i64), String> {
                    Ok((
                        x.chi0().map_err(|e| e.to_string())?,
                        x.chi1().map_err(|e| e.to_string())?,
                    ))
                };
                let (a0, a1) = ch(&f)?;
                let (b0, b1) = ch(&g)?;
                let add = ch(&fg)? == (a0 + b0, a1 + b1);
                Ok(assoc && ident && inv && add)
            })();
            match laws {
                Ok(ok) => t.check(ok, || format!("n = {n}, sample {i}: a group law fails")),
                Err(e) => t.fail(format!("n = {n}, sample {i}: {e}")),
            }
        }
    }
    t.finish(1, json!({ "samples_per_n": 1000, "n": [2, 3] }))
}

fn generators() -> Criterion {
    let mut t = Tally::default();
    for n in [2u32, 3, 4] {
        let Some(g) = t.result(standard_generators(n), "standard_generators") else {
            continue;
        };
        let v = g.violations();
        t.check(v.is_empty(), || format!("n = {n}: {v:?}"));
        let chi_ok = g.a(0).chi0() == Ok(1) && g.a(n as usize - 1).chi1() == Ok(1);
        t.check(chi_ok, || format!("n = {n}: χ conditions"));
        for (i, a) in g.maps.iter().enumerate() {
            for (j, b) in g.maps.iter().enumerate() {
                t.check(product(n, [a, b]) == product(n, [b, a]), || {
                    format!("n = {n}: a_{i}, a_{j} do not commute")
                });
            }
        }
    }
    t.finish(2, json!({ "n": [2, 3, 4] }))
}

fn rational_grid(count: usize) -> Vec<Rational> {
    let mut out = vec![];
    let mut q = 2i64;
    while out.len() < count {
        for p in 1..q {
            if p.gcd(&q) == 1 && out.len() < count {
                out.push(rat(p, q));
            }
        }
        q += 1;
    }
    out
}

fn nadic_window(t: &Rational, n: u32) -> (Rational, Rational) {
    let mut e = 2;
    loop {
        let lo = nadic_below(t, n, e, false);
        let hi = nadic_above(t, n, e, false);
        if lo > int(0) && hi < int(1) {
            return (lo, hi);
        }
        e += 1;
    }
}

fn fixed_points(seed: u64) -> Criterion {
    let n = 2u32;
    let mut t = Tally::default();
    let grid = rational_grid(200);
    let mut r = rng(seed, 3);
    let mut elements: Vec<PLMap> = (0..150).map(|_| random_element(&mut r, n, 3)).collect();
    for p in grid.iter().filter(|p| !fnconf::exactnum::is_nadic_value(p, n)).take(50) {
        let (lo, hi) = nadic_window(p, n);
        if let Some(g) = t.result(rational_slope_fix_element(p, (&lo, &hi), n), "construction") {
            elements.push(g);
        }
    }
    let (mut events, mut nontrivial) = (0u64, 0u64);
    for p in &grid {
        let Some(class) = t.result(fix_classification(p, n), "classification") else {
            continue;
        };
        for g in &elements {
            if g.apply(p) != *p {
                continue;
            }
            events += 1;
            let (sl, sr) = (g.slope_left_at(p), g.slope_right_at(p));
            let (el, er) = (log_n(&sl, n), log_n(&sr, n));
            t.check(el.is_some() && er.is_some(), || "slope is not a power of n".into());
            if let FixClass::RationalNonNAry { order } = class {
                let e = er.unwrap_or(1);
                if e != 0 {
                    nontrivial += 1;
                }
                t.check(sl == sr && e % order as i64 == 0, || {
                    format!("slope n^{e} at non-n-ary fixed point with order {order}")
                });
            }
        }
    }
    let third = rat(1, 3);
    let order = fix_classification(&third, 2);
    t.check(order == Ok(FixClass::RationalNonNAry { order: 2 }), || {
        format!("1/3 classified as {order:?}")
    });
    let slope = rational_slope_fix_element(&third, (&rat(1, 4), &rat(1, 2)), 2)
        .map(|g| (g.apply(&third), g.slope_right_at(&third)));
    t.check(slope == Ok((third.clone(), int(4))), || format!("1/3 element: {slope:?}"));
    t.finish(
        3,
        json!({ "points": grid.len(), "elements": elements.len(), "fixation_events": events,
                "nontrivial_rational_events": nontrivial, "slope_at_one_third": 4 }),
    )
}

fn acceptance_budget(seed: u64) -> Budget {
    Budget::default().with_seed(seed)
}

fn confining_axioms(seed: u64) -> Criterion {
    let mut t = Tally::default();
    let budget = acceptance_budget(seed);
    let mut rows = vec![];
    for n in [2u32, 3] {
        let Some(ctx) = t.result(ConfCtx::new(n), "context") else { continue };
        for f in catalog(n) {
            let Some(rep) = t.result(ctx.axiom_check(&f, &budget), &f.name()) else {
                continue;
            };
            t.check(rep.passed(), || format!("n = {n}: {} fails an axiom", f.name()));
            if let ConfFamily::NonLamplike { .. } = f {
                t.check(rep.prod.k == Some(5), || {
                    format!("NonLamplike product witness {:?}", rep.prod.k)
                });
            }
            rows.push(json!({ "n": n, "family": f.name(), "prod_k": rep.prod.k,
                              "sampled_least_k": rep.prod.sampled_least_k }));
        }
    }
    t.finish(4, json!({ "samples": budget.samples, "k_max": budget.k_max, "families": rows }))
}

fn largest_elements(seed: u64) -> Criterion {
    let mut t = Tally::default();
    let budget = acceptance_budget(seed);
    let mut rows = vec![];
    for n in [2u32, 3] {
        let Some(ctx) = t.result(ConfCtx::new(n), "context") else { continue };
        for f in catalog(n) {
            if let Some(l) = t.result(ctx.largest_element_witness(&f, &budget), &f.name()) {
                t.check(l.k <= 32, || format!("{}: k = {}", f.name(), l.k));
                rows.push(json!({ "n": n, "family": f.name(), "k": l.k }));
            }
        }
    }
    t.finish(5, json!({ "families": rows }))
}

fn compare_case(
    t: &mut Tally,
    ctx: &ConfCtx,
    f1: &ConfFamily,
    f2: &ConfFamily,
    expect: bool,
    budget: &Budget,
) {
    let Some(v) = t.result(ctx.compare(f1, f2, budget), "compare") else {
        return;
    };
    let label = || format!("compare({}, {})", f1.name(), f2.name());
    match &v {
        Verdict::Dominates { .. } => t.check(expect, || format!("{}: unexpected domination", label())),
        Verdict::Refuted { .. } => {
            t.check(!expect, || format!("{}: unexpected refutation", label()));
            let replay = ctx.replay(f1, f2, &v);
            t.check(replay == Ok(true), || format!("{}: witness does not replay", label()));
        }
        Verdict::Inconclusive { note, .. } => t.fail(format!("{}: inconclusive ({note})", label())),
    }
}

fn orbit_comparisons(seed: u64) -> Criterion {
    let mut t = Tally::default();
    let ctx = ConfCtx::new(2).expect("n = 2");
    let budget = acceptance_budget(seed).with_samples(40);
    let grid: Vec<Rational> = (1..=20).map(|k| rat(k, 42)).collect();
    for a in &grid {
        for b in &grid {
            let fa = ConfFamily::RigidStab { t: a.clone() };
            let fb = ConfFamily::RigidStab { t: b.clone() };
            compare_case(&mut t, &ctx, &fa, &fb, true, &budget);
        }
    }
    let mut points = vec![];
    for (base, p) in [rat(1, 4), rat(1, 3), rat(1, 5), rat(1, 7)].iter().enumerate() {
        for k in -2..=1 {
            points.push((base, ctx.orbit(p, k)));
        }
    }
    for (b1, p1) in &points {
        for (b2, p2) in &points {
            let f1 = ConfFamily::OrbitFixator { t: p1.clone() };
            let f2 = ConfFamily::OrbitFixator { t: p2.clone() };
            compare_case(&mut t, &ctx, &f1, &f2, b1 == b2, &budget);
        }
    }
    let lt = rat(1, 4);
    let lx = ctx.orbit(&lt, -1);
    let mut sets = vec![];
    for m in 0..8u64 {
        let xs: Vec<u64> = (0..3).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect();
        sets.push(IndexSet::finite(xs.clone()));
        sets.push(IndexSet::cofinite(xs));
    }
    for x in &sets {
        for y in &sets {
            let q = |s: &IndexSet| ConfFamily::LamplikeProduct {
                t: lt.clone(),
                x: lx.clone(),
                set: s.clone(),
            };
            let expect = y.finite_difference(x).is_some();
            compare_case(&mut t, &ctx, &q(x), &q(y), expect, &budget);
        }
    }
    let odd = good_odd_set(4).map(|o| o.elements).unwrap_or_default();
    let subsets: Vec<Vec<u64>> = (0..8u32)
        .map(|m| {
            let mut s = vec![odd[0]];
            s.extend((1..4).filter(|i| m >> (i - 1) & 1 == 1).map(|i| odd[i]));
            s
        })
        .collect();
    for s in &subsets {
        for r in &subsets {
            let q = |s: &Vec<u64>| ConfFamily::NonLamplike { s: s.clone(), tau1: rat(1, 4) };
            let expect = s.iter().all(|x| r.contains(x));
            compare_case(&mut t, &ctx, &q(s), &q(r), expect, &budget);
        }
    }
    t.finish(
        6,
        json!({ "rigid_grid": grid.len(), "orbit_points": points.len(), "lamplike_patterns": sets.len(),
                "odd_set": odd, "qs_subsets": subsets.len() }),
    )
}

fn nonlamplike_certificate(seed: u64) -> Criterion {
    let mut t = Tally::default();
    let tau = TauSequence::new(2);
    let odd = good_odd_set(4).map(|o| o.elements).unwrap_or_default();
    for k in 1..=50 {
        let p = rat(k, 102);
        let g = moving_witness(&p, &tau);
        t.check(g.apply(&p) != p, || format!("witness fixes {k}/102"));
        for s in [&odd[..1], &odd[..]] {
            let m = qs_member(&g, s, &tau);
            t.check(m == Ok(true), || format!("witness at {k}/102 not in Q_{s:?}"));
        }
    }
    let budget = acceptance_budget(seed);
    let subsets: Vec<Vec<u64>> = (0..16u32)
        .map(|m| (0..4).filter(|i| m >> i & 1 == 1).map(|i| odd[i]).collect())
        .collect();
    let mut relations = 0;
    for s in &subsets {
        for r in &subsets {
            let Some(v) = t.result(qs_compare(s, r, &tau, &budget), "qs_compare") else {
                continue;
            };
            let le = s.iter().all(|x| r.contains(x));
            match v {
                Verdict::Dominates { .. } => t.check(le, || format!("Q_{s:?} ⪯ Q_{r:?}")),
                Verdict::Refuted { witness, k_max, .. } => {
                    let back = conj_a(&witness, &tau, -(k_max as i64));
                    let ok = !le
                        && qs_member(&back, r, &tau) == Ok(true)
                        && qs_member(&witness, s, &tau) == Ok(false);
                    t.check(ok, || format!("refutation of Q_{s:?} ⪯ Q_{r:?}"));
                }
                Verdict::Inconclusive { .. } => t.fail(format!("Q_{s:?} vs Q_{r:?} inconclusive")),
            }
            relations += 1;
        }
    }
    t.finish(7, json!({ "grid": 50, "odd_set": odd, "relations": relations }))
}

fn number_theory() -> Criterion {
    let mut t = Tally::default();
    let bound = 1_000_000u64;
    let set = stilde(&[3], bound);
    let mut violations = 0u64;
    for &x in &set {
        if !stilde_estimate_holds(&[3], x) {
            violations += 1;
        }
    }
    t.check(violations == 0, || format!("{violations} estimate violations"));
    let odd = t.result(good_odd_set(6), "good_odd_set");
    let elements = odd.map(|o| o.elements).unwrap_or_default();
    t.check(elements.first() == Some(&3), || format!("odd set {elements:?}"));
    let sweep = verify_odd_set(&elements, 40);
    t.check(sweep.is_ok(), || format!("sweep: {sweep:?}"));
    t.finish(
        8,
        json!({ "stilde_size": set.len(), "bound": bound, "violations": violations, "odd_set": elements }),
    )
}

fn axiom_row<G: LampGroup>(
    t: &mut Tally,
    g: &G,
    f: &LampFamily,
    budget: &Budget,
    want_k: u64,
) -> Value {
    match t.result(lamp_axiom_check(g, f, budget), &f.name()) {
        Some(r) => {
            t.check(r.passed() && r.prod_k == want_k, || {
                format!("{} on {}: passed = {}, k = {}", f.name(), g.name(), r.passed(), r.prod_k)
            });
            json!({ "family": f.name(), "group": g.name(), "prod_k": r.prod_k })
        }
        None => Value::Null,
    }
}

fn lamplighters(seed: u64) -> Criterion {
    let mut t = Tally::default();
    let budget = acceptance_budget(seed);
    let coords = |xs: &[u64]| LampFamily::Subgroup {
        h: LampSubgroup::Coordinates { set: IndexSet::finite(xs.iter().copied()) },
    };
    let rows = vec![
        axiom_row(&mut t, &IntLamp, &LampFamily::Balls, &budget, 1),
        axiom_row(&mut t, &IntLamp, &LampFamily::Machado { c: 1 }, &budget, 1),
        axiom_row(&mut t, &IntLamp, &LampFamily::Subgroup { h: LampSubgroup::Multiples { m: 2 } }, &budget, 0),
        axiom_row(&mut t, &FreeAbelianLamp, &coords(&[1, 3]), &budget, 0),
        axiom_row(&mut t, &FreeAbelianLamp, &LampFamily::NonSplit, &budget, 0),
    ];
    let g = FreeAbelianLamp;
    let sets: Vec<Vec<u64>> = (0..16u64)
        .map(|m| (0..4).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect())
        .collect();
    for x in &sets {
        for y in &sets {
            let Some(v) = t.result(lamp_compare(&g, &coords(y), &coords(x), &budget), "lamp_compare")
            else {
                continue;
            };
            let le = x.iter().all(|i| y.contains(i));
            t.check(v.dominates().is_some() == le, || format!("Q_{y:?} vs Q_{x:?}"));
            let replay = lamp_replay(&g, &coords(y), &coords(x), &v);
            t.check(replay == Ok(true), || format!("replay Q_{y:?} vs Q_{x:?}"));
        }
    }
    let mut r = rng(seed, 9);
    let machado = LampFamily::Machado { c: 1 };
    let mut escapes = 0u64;
    for _ in 0..100 {
        let Some(u) = t.result(lamp_sample(&IntLamp, &mut r, &machado, 8), "machado sample") else {
            continue;
        };
        for (i, x) in u.lamps.range(..-1) {
            let j = machado_escape(1, *x, *i);
            let ok = j.is_some_and(|j| {
                !machado_in(1, x * j as i64, *i) && (j == 1 || machado_in(1, x * (j as i64 - 1), *i))
            });
            t.check(ok, || format!("lamp {x} at {i}: escape {j:?}"));
            escapes += 1;
        }
    }
    if let Some(c) = t.result(nonsplit_certificate(16, &budget), "nonsplit certificate") {
        t.check(c.holds, || "non-split certificate fails".into());
    }
    t.finish(
        9,
        json!({ "axioms": rows, "subgroup_patterns": sets.len(), "escape_checks": escapes, "nonsplit_p_max": 16 }),
    )
}

fn shift_window(v: &BTreeMap<i64, i64>) -> BTreeMap<i64, i64> {
    v.iter()
        .map(|(k, c)| (k + 1, *c))
        .filter(|(k, _)| *k <= 0)
        .collect()
}

fn add(a: &BTreeMap<i64, i64>, b: &BTreeMap<i64, i64>) -> BTreeMap<i64, i64> {
    let mut out = a.clone();
    for (k, c) in b {
        *out.entry(*k).or_insert(0) += c;
    }
    out.retain(|_, c| *c != 0);
    out
}

fn random_vector(r: &mut ChaCha8Rng) -> BTreeMap<i64, i64> {
    let mut v = BTreeMap::new();
    for _ in 0..r.gen_range(0..4) {
        let c = r.gen_range(-2..=2);
        if c != 0 {
            v.insert(r.gen_range(-5..=0), c);
        }
    }
    v
}

fn slope_bridge(seed: u64) -> Criterion {
    let mut t = Tally::default();
    let (n, p) = (2u32, rat(1, 3));
    let a = standard_generators(n).expect("n = 2").maps[0].clone();
    let below = a.apply_inverse(&p);
    let mut r = rng(seed, 10);
    let mut sample = |r: &mut ChaCha8Rng| -> Option<PLMap> {
        let v = random_vector(r);
        let s = t.result(xi_section(&v, &p, n), "xi_section")?;
        let mut parts = vec![s];
        for _ in 0..r.gen_range(0..3) {
            let k = window_commutator(r, n, &below, &p, 1);
            parts.push(conj(&k, &power(&a, -r.gen_range(0..4))));
        }
        if r.gen_bool(0.5) {
            parts.push(window_commutator(r, n, &p, &int(1), 1));
        }
        Some(product(n, parts.iter()))
    };
    let mut pairs = vec![];
    for _ in 0..200 {
        if let (Some(g), Some(h)) = (sample(&mut r), sample(&mut r)) {
            pairs.push((g, h));
        }
    }
    for (g, h) in &pairs {
        let xg = t.result(xi_t(g, &p, None), "xi_t");
        let xh = t.result(xi_t(h, &p, None), "xi_t");
        let xgh = t.result(xi_t(&product(n, [g, h]), &p, None), "xi_t");
        let xga = t.result(xi_t(&conj(g, &a), &p, None), "xi_t");
        if let (Some(xg), Some(xh), Some(xgh), Some(xga)) = (xg, xh, xgh, xga) {
            t.check(xgh == add(&xg, &xh), || "ξ is not multiplicative".into());
            t.check(xga == shift_window(&xg), || "ξ does not intertwine σ".into());
        }
    }
    let mut r = rng(seed, 11);
    for _ in 0..50 {
        let v = random_vector(&mut r);
        if let Some(s) = t.result(xi_section(&v, &p, n), "xi_section") {
            let back = t.result(xi_t(&s, &p, None), "xi_t");
            t.check(back.as_ref() == Some(&v), || format!("section of {v:?} gives {back:?}"));
        }
    }
    t.finish(10, json!({ "t": "1/3", "n": n, "pairs": pairs.len(), "section_vectors": 50 }))
}

fn tree_suite(seed: u64) -> Criterion {
    let mut t = Tally::default();
    let Some(h) = t.result(HNNData::new(2, &rat(1, 4)), "HNN data") else {
        return t.finish(11, Value::Null);
    };
    let mut details = json!({});
    if let Some(mut ball) = t.result(tree_ball(&h, 4), "tree_ball") {
        let s = ball.summary();
        t.check(s.acyclic, || format!("ball {s:?}"));
        for i in 0..ball.vertices() {
            let d = h.distance(&ball.reps[i]);
            t.check(d == Ok(ball.dist(i)), || format!("vertex {i}: {d:?} vs {}", ball.dist(i)));
        }
        let a = h.stable_letter().clone();
        t.check(ball.locate(&h, &a) == Ok(1), || "d(v₀, a v₀) in the ball".into());
        details["ball"] = json!(s);
    }
    let a = h.stable_letter().clone();
    let tl = h.translation_length(&a, 8).map(|r| r.length);
    t.check(tl == Ok(1), || format!("translation_length(a) = {tl:?}"));
    let mut r = rng(seed, 12);
    let mut lox = 0;
    for _ in 0..200 {
        let g = random_element(&mut r, 2, 3);
        if let Some(kind) = t.result(h.isometry_type(&g), "isometry_type") {
            let want = g.chi0() != Ok(0);
            lox += (kind == IsometryType::Loxodromic) as u64;
            t.check((kind == IsometryType::Loxodromic) == want, || "isometry type".into());
        }
    }
    let mut m0s = vec![];
    for _ in 0..50 {
        let g = random_element(&mut r, 2, 3);
        if let Some(b) = t.result(h.busemann_estimate(&g, 16), "busemann") {
            t.check(b.value.is_some() && b.value == g.chi0().ok(), || {
                format!("Busemann {:?} vs χ₀ {:?}", b.values, g.chi0())
            });
            m0s.push(b.m0);
        }
    }
    details["loxodromic_samples"] = json!(lox);
    details["busemann_m0"] = json!(m0s);
    t.finish(11, details)
}

fn signed_algebra(seed: u64) -> Criterion {
    let mut t = Tally::default();
    let mut r = rng(seed, 13);
    let al = PLMap::alpha(2);
    t.check(product(2, [&al, &al]).is_identity(), || "α² ≠ 1".into());
    for _ in 0..1000 {
        let g = random_element(&mut r, 2, 3);
        let ga = alpha_conjugate(&g);
        t.check(ga.chi0() == g.chi1() && ga.chi1() == g.chi0(), || "χ₀(g^α) ≠ χ₁(g)".into());
        let x = random_signed_element(&mut r, 2, 3);
        let y = random_signed_element(&mut r, 2, 3);
        let xy = product(2, [&x, &y]);
        t.check(xy.epsilon() == x.epsilon() * y.epsilon(), || "ε is not multiplicative".into());
    }
    t.finish(12, json!({ "samples": 1000 }))
}
