//! Non-lamplike confining subsets Q_S built from a contracting τ-sequence.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{self, format_rational, int, rat, simplest_nadic_between, Rational};
use crate::plmap::{
    self, commutator_mover, compose_unchecked, conj, default_shadow, point_mover, power,
    shadow_commutator, standard_generators, window_commutator, PLMap, PlError,
};
use crate::verdict::{Budget, Verdict};

/// The closure constant 2⁵ of S̃.
pub const CLOSURE_SHIFT: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NlError {
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error("τ_1 = {0} must be an n-adic point of (0, r)")]
    BadTau(String),
    #[error("element has base {0}, sequence has base {1}")]
    BaseMismatch(u32, u32),
    #[error("element does not fix a neighborhood of 0")]
    NotCompactAtZero,
    #[error("{0} is not odd")]
    NotOdd(u64),
    #[error("not drawn from a good odd set: {0}")]
    NotGood(String),
    #[error("odd-set search exceeded its cap at candidate {0}")]
    Budget(u64),
}

/// 0 < ⋯ < τ_j < τ_{j−1} < ⋯ < τ_1 < r with τ_j.a^{−i} = τ_{2^i j}.
#[derive(Debug)]
pub struct TauSequence {
    n: u32,
    a: PLMap,
    r: Rational,
    tau1: Rational,
    memo: Mutex<HashMap<u64, Rational>>,
}

static SHARED: OnceLock<Mutex<HashMap<(u32, Rational), Arc<TauSequence>>>> = OnceLock::new();

impl TauSequence {
    pub fn new(n: u32) -> Self {
        let nn = n as i64;
        Self::with_tau1(n, rat(1, nn * nn)).expect("default τ_1")
    }

    pub fn with_tau1(n: u32, tau1: Rational) -> Result<Self, NlError> {
        let gens = standard_generators(n)?;
        let r = gens.supports[0].1.clone();
        if !(tau1 > int(0) && tau1 < r) || !exactnum::is_nadic_value(&tau1, n) {
            return Err(NlError::BadTau(format_rational(&tau1)));
        }
        Ok(TauSequence {
            n,
            a: gens.maps[0].clone(),
            r,
            tau1,
            memo: Mutex::new(HashMap::new()),
        })
    }

    /// Process-wide memoized sequence for (n, τ_1).
    pub fn shared(n: u32, tau1: &Rational) -> Result<Arc<TauSequence>, NlError> {
        let map = SHARED.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (n, tau1.clone());
        if let Some(t) = map.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let seq = Arc::new(TauSequence::with_tau1(n, tau1.clone())?);
        map.lock().unwrap().insert(key, seq.clone());
        Ok(seq)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn tau1(&self) -> &Rational {
        &self.tau1
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn a(&self) -> &PLMap {
        &self.a
    }

    /// τ_j; τ_0 is taken to be r.
    pub fn tau(&self, j: u64) -> Rational {
        if j == 0 {
            return self.r.clone();
        }
        if let Some(v) = self.memo.lock().unwrap().get(&j) {
            return v.clone();
        }
        let v = if j % 2 == 0 {
            self.a.apply_inverse(&self.tau(j / 2))
        } else if j == 1 {
            self.tau1.clone()
        } else {
            let k = (j - 1) / 2;
            simplest_nadic_between(&self.tau(2 * k + 2), &self.tau(2 * k), self.n)
        };
        self.memo.lock().unwrap().insert(j, v.clone());
        v
    }

    /// Least j ≥ 1 with τ_j < x (x > 0).
    pub fn first_below(&self, x: &Rational) -> u64 {
        assert!(x > &int(0));
        if &self.tau(1) < x {
            return 1;
        }
        let mut hi = 2u64;
        while &self.tau(hi) >= x {
            hi = hi.checked_mul(2).expect("index overflow");
        }
        let mut lo = hi / 2; // τ_lo ≥ x
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if &self.tau(mid) < x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Least power of two N with τ_N ≤ ε; every s ≥ N then has τ_s ≤ ε.
    pub fn index_bound(&self, eps: &Rational) -> u64 {
        let mut j = 1u64;
        while &self.tau(j) > eps {
            j *= 2;
        }
        j
    }
}

/// Is j in S̃? Every element has at most one possible predecessor, so this is a walk.
pub fn in_stilde(s: &BTreeSet<u64>, mut j: u64) -> bool {
    let m = 1u64 << CLOSURE_SHIFT;
    loop {
        if j == 0 {
            return false;
        }
        if s.contains(&j) {
            return true;
        }
        if j % 2 == 0 {
            j /= 2;
        } else if j > 1 && (j - 1) % m == 0 {
            j = (j - 1) / m;
        } else if (j + 1) % m == 0 {
            j = (j + 1) / m;
        } else {
            return false;
        }
    }
}

/// S̃ ∩ [1, N] by breadth-first saturation.
pub fn stilde(s: &[u64], bound: u64) -> BTreeSet<u64> {
    let m = 1u64 << CLOSURE_SHIFT;
    let mut out = BTreeSet::new();
    let mut queue: Vec<u64> = s.iter().copied().filter(|&x| x >= 1 && x <= bound).collect();
    while let Some(x) = queue.pop() {
        if !out.insert(x) {
            continue;
        }
        for y in [x.checked_mul(2), x.checked_mul(m).map(|v| v + 1), x.checked_mul(m).map(|v| v - 1)]
            .into_iter()
            .flatten()
        {
            if y <= bound && !out.contains(&y) {
                queue.push(y);
            }
        }
    }
    out
}

/// S̃ ∩ [lo, hi] without enumerating everything below lo.
pub fn stilde_in_range(s: &BTreeSet<u64>, lo: u64, hi: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let min = match s.iter().next() {
        Some(&m) => m,
        None => return out,
    };
    range_rec(s, min, lo.max(1), hi, &mut out, 1, 0);
    out
}

fn range_rec(
    s: &BTreeSet<u64>,
    min: u64,
    lo: u64,
    hi: u64,
    out: &mut BTreeSet<u64>,
    mul: u64,
    add: i64,
) {
    // collects mul·y + add for y ∈ S̃ ∩ [lo, hi]
    if lo > hi || hi < min {
        return;
    }
    let m = 1u64 << CLOSURE_SHIFT;
    let emit = |y: u64, out: &mut BTreeSet<u64>| {
        out.insert((mul as i128 * y as i128 + add as i128) as u64);
    };
    for &y in s.range(lo..=hi) {
        emit(y, out);
    }
    let mut sub = BTreeSet::new();
    // y = 2z
    range_rec(s, min, lo.div_ceil(2), hi / 2, &mut sub, 2, 0);
    // y = 32z + 1
    if hi >= 1 {
        range_rec(s, min, lo.saturating_sub(1).div_ceil(m).max(1), (hi - 1) / m, &mut sub, m, 1);
    }
    // y = 32z − 1
    range_rec(s, min, (lo + 1).div_ceil(m), (hi + 1) / m, &mut sub, m, -1);
    for y in sub {
        if y >= lo && y <= hi {
            emit(y, out);
        }
    }
}

/// Every element of S̃ has the form 2^p s + ε with s ∈ S and |ε| < 2^{p−4}.
pub fn stilde_estimate_holds(s: &[u64], x: u64) -> bool {
    s.iter().any(|&q| {
        (0..64u32).any(|p| {
            let base = (q as i128) << p;
            if base > (x as i128) * 2 + 64 {
                return false;
            }
            let eps = (x as i128 - base).abs();
            16 * eps < (1i128 << p)
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub candidate: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddSet {
    pub elements: Vec<u64>,
    pub log: Vec<Rejection>,
}

/// Why x cannot extend the set, if it cannot: parity, size, or some |x − 2^p x_i| ≤ 2^{p−3}.
pub fn check_candidate(chosen: &[u64], x: u64) -> Result<(), Rejection> {
    let reject = |reason: String| Err(Rejection { candidate: x, reason });
    if x % 2 == 0 {
        return reject("even".into());
    }
    let k = chosen.len() as u32;
    if let Some(&last) = chosen.last() {
        if x <= last {
            return reject(format!("not above {}", last));
        }
    }
    if k > 0 && (x as u128) <= 1u128 << (k + 1) {
        return reject(format!("not above 2^{}", k + 1));
    }
    for &y in chosen {
        for p in 1..=60u32 {
            let big = (y as u128) << p;
            if big > 2 * (x as u128) + 2 {
                break;
            }
            let diff = (x as i128 - big as i128).unsigned_abs();
            if 8 * diff <= 1u128 << p {
                return reject(format!("|x - 2^{} * {}| <= 2^{}", p, y, p as i64 - 3));
            }
        }
    }
    Ok(())
}

/// Greedy construction starting at 3.
pub fn good_odd_set(count: usize) -> Result<OddSet, NlError> {
    let mut elements: Vec<u64> = Vec::new();
    let mut log = Vec::new();
    let mut x = 3u64;
    while elements.len() < count {
        if x > 1 << 60 {
            return Err(NlError::Budget(x));
        }
        match check_candidate(&elements, x) {
            Ok(()) => elements.push(x),
            Err(rej) => log.push(rej),
        }
        x += 1;
    }
    Ok(OddSet { elements, log })
}

/// Exhaustive pairwise check |x_j − 2^p x_i| > 2^{p−3} for i ≠ j, 1 ≤ p ≤ p_max.
pub fn verify_odd_set(elements: &[u64], p_max: u32) -> Result<(), String> {
    for (i, &x) in elements.iter().enumerate() {
        if x % 2 == 0 {
            return Err(format!("{} is even", x));
        }
        for (j, &y) in elements.iter().enumerate() {
            if i == j {
                continue;
            }
            for p in 1..=p_max {
                let big = (y as i128) << p;
                let diff = (x as i128 - big).unsigned_abs();
                if 8 * diff <= 1u128 << p {
                    return Err(format!("|{} - 2^{} * {}| <= 2^{}", x, p, y, p as i64 - 3));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QsMembership {
    pub member: bool,
    /// An index s ∈ S̃ whose window condition fails.
    pub violating: Option<u64>,
    /// N(ε): indices at or beyond it sit inside the fixed neighborhood of 0.
    pub bound: u64,
}

/// Membership in Q_S with the violating index and enumeration bound reported.
pub fn qs_check(g: &PLMap, s: &[u64], tau: &TauSequence) -> Result<QsMembership, NlError> {
    if g.n() != tau.n {
        return Err(NlError::BaseMismatch(g.n(), tau.n));
    }
    if g.is_identity() {
        return Ok(QsMembership {
            member: true,
            violating: None,
            bound: 1,
        });
    }
    let eps = g.identity_prefix();
    if eps <= int(0) {
        return Err(NlError::NotCompactAtZero);
    }
    let bound = tau.index_bound(&eps);
    let set: BTreeSet<u64> = s.iter().copied().collect();
    let ginv = g.invert();
    for (c, d) in g.support() {
        if c >= *tau.r() {
            continue;
        }
        let lo = tau.first_below(&d);
        if tau.tau(lo) <= c {
            continue;
        }
        let hi = last_above(tau, &c, lo);
        for j in stilde_in_range(&set, lo, hi) {
            if !window_ok(g, &ginv, j, tau) {
                return Ok(QsMembership {
                    member: false,
                    violating: Some(j),
                    bound,
                });
            }
        }
    }
    Ok(QsMembership {
        member: true,
        violating: None,
        bound,
    })
}

/// Largest j ≥ lo with τ_j > c, given τ_lo > c > 0.
fn last_above(tau: &TauSequence, c: &Rational, lo: u64) -> u64 {
    tau.first_below_or_equal(c, lo) - 1
}

impl TauSequence {
    /// Least j ≥ start with τ_j ≤ x.
    fn first_below_or_equal(&self, x: &Rational, start: u64) -> u64 {
        let mut step = 1u64;
        let mut lo = start; // τ_lo > x
        let mut hi = start + 1;
        while &self.tau(hi) > x {
            lo = hi;
            step *= 2;
            hi = start + step;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if &self.tau(mid) <= x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

fn window_ok(g: &PLMap, ginv: &PLMap, j: u64, tau: &TauSequence) -> bool {
    let t = tau.tau(j);
    let lo = tau.tau(j + 1);
    let hi = tau.tau(j - 1);
    let a = g.apply(&t);
    let b = ginv.apply(&t);
    lo < a && a < hi && lo < b && b < hi
}

pub fn qs_member(g: &PLMap, s: &[u64], tau: &TauSequence) -> Result<bool, NlError> {
    Ok(qs_check(g, s, tau)?.member)
}

/// The window (x, y) around t meeting τ in at most one point.
pub fn quiet_window(t: &Rational, tau: &TauSequence) -> (Rational, Rational) {
    if t >= tau.tau1() {
        let lo = if t == tau.tau1() { tau.tau(2) } else { tau.tau1().clone() };
        return (lo, int(1));
    }
    let j = tau.first_below(t); // τ_j < t ≤ τ_{j−1}
    let above = tau.tau(j - 1);
    if &above == t {
        (tau.tau(j), tau.tau(j - 2))
    } else {
        (tau.tau(j), above)
    }
}

/// A member of every Q_S moving t, supported in a window meeting τ at most once.
pub fn moving_witness(t: &Rational, tau: &TauSequence) -> PLMap {
    let (x, y) = quiet_window(t, tau);
    commutator_mover(tau.n, &x, &y, t)
}

fn check_good(s: &[u64], r: &[u64]) -> Result<(), NlError> {
    for &x in s.iter().chain(r) {
        if x % 2 == 0 {
            return Err(NlError::NotOdd(x));
        }
    }
    let union: BTreeSet<u64> = s.iter().chain(r).copied().collect();
    let v: Vec<u64> = union.into_iter().collect();
    verify_odd_set(&v, 60).map_err(NlError::NotGood)
}

/// Decides Q_S ⪯ Q_R, i.e. whether Q_R^{a^k} ⊆ Q_S for some k.
pub fn qs_compare(
    s: &[u64],
    r: &[u64],
    tau: &TauSequence,
    budget: &Budget,
) -> Result<Verdict<PLMap>, NlError> {
    check_good(s, r)?;
    let rset: BTreeSet<u64> = r.iter().copied().collect();
    let missing: Vec<u64> = s.iter().copied().filter(|x| !rset.contains(x)).collect();
    if missing.is_empty() {
        return Ok(Verdict::exact(0, "S is contained in R, so Q_R is contained in Q_S"));
    }
    let big_k = budget.k_max;
    for &t in &missing {
        for l in big_k + 1..=big_k + 24 {
            let base = match (t as u128).checked_shl(l as u32) {
                Some(b) if b + (1u128 << big_k) + 2 < 1u128 << 62 => b as u64,
                _ => break,
            };
            let top = base + (1u64 << big_k);
            if !stilde_in_range(&rset, base, top).is_empty() {
                continue;
            }
            let h = refuting_mover(tau, base, top)?;
            let a_k = power(tau.a(), big_k as i64);
            let g = conj(&h, &a_k);
            return Ok(Verdict::Refuted {
                witness: g,
                k_max: big_k,
                reason: format!(
                    "{} is in S but not R; the witness is h^(a^{}) with h in Q_R moving tau_{} below tau_{}",
                    t, big_k, base, top
                ),
            });
        }
    }
    Ok(Verdict::Inconclusive {
        budget: *budget,
        note: "no index window free of R-tilde found within the search depth".into(),
    })
}

/// h ∈ Q_R supported in (τ_{top+1}, τ_{base−1}) with τ_base.h < τ_top, assuming
/// R̃ ∩ [base, top] = ∅.
fn refuting_mover(tau: &TauSequence, base: u64, top: u64) -> Result<PLMap, NlError> {
    let n = tau.n;
    let lo = tau.tau(top + 1);
    let hi = tau.tau(base - 1);
    let p = tau.tau(base);
    let w = simplest_nadic_between(&lo, &tau.tau(top), n);
    let (b, _) = point_mover(n, &lo, &hi, &p, &w)?;
    let (c, d) = default_shadow(n);
    Ok(shadow_commutator(&b, &lo, &hi, &c, &d)?)
}

/// Seeded members of Q_S: window elements around single τ points, products of such,
/// free elements between consecutive points of S̃, and elements above τ_1.
pub fn qs_sample<R: Rng>(
    rng: &mut R,
    s: &[u64],
    tau: &TauSequence,
    complexity: usize,
) -> PLMap {
    let n = tau.n;
    let set = stilde(s, 1 << 12);
    let pick_index = |rng: &mut R| -> u64 {
        if rng.gen_bool(0.6) && !set.is_empty() {
            let v: Vec<&u64> = set.iter().collect();
            let base = *v[rng.gen_range(0..v.len().min(40))];
            (base as i64 + rng.gen_range(-1i64..=1)).max(1) as u64
        } else {
            rng.gen_range(1..120)
        }
    };
    match rng.gen_range(0..4) {
        0 => {
            let j = pick_index(rng);
            window_commutator(rng, n, &tau.tau(j + 1), &tau.tau(j - 1), complexity)
        }
        1 => {
            let mut js: BTreeSet<u64> = BTreeSet::new();
            for _ in 0..rng.gen_range(2..4) {
                let j = pick_index(rng);
                if js.iter().all(|&k| k.abs_diff(j) >= 2) {
                    js.insert(j);
                }
            }
            let parts: Vec<PLMap> = js
                .iter()
                .map(|&j| window_commutator(rng, n, &tau.tau(j + 1), &tau.tau(j - 1), complexity))
                .collect();
            plmap::product(n, parts.iter())
        }
        2 => {
            let v: Vec<u64> = set.iter().copied().take(40).collect();
            let gaps: Vec<(u64, u64)> = v
                .windows(2)
                .filter(|w| w[1] - w[0] >= 2)
                .map(|w| (w[0], w[1]))
                .collect();
            if gaps.is_empty() {
                return window_commutator(rng, n, tau.tau1(), &int(1), complexity);
            }
            let (s1, s2) = gaps[rng.gen_range(0..gaps.len())];
            window_commutator(rng, n, &tau.tau(s2), &tau.tau(s1), complexity)
        }
        _ => window_commutator(rng, n, tau.tau1(), &int(1), complexity),
    }
}

/// g^{a^k}.
pub fn conj_a(g: &PLMap, tau: &TauSequence, k: i64) -> PLMap {
    conj(g, &power(tau.a(), k))
}

pub fn compose(g: &PLMap, h: &PLMap) -> PLMap {
    compose_unchecked(g, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::orbit_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tau_defaults_and_coherence() {
        let tau = TauSequence::new(2);
        assert_eq!(tau.tau(1), rat(1, 4));
        assert_eq!(tau.tau(2), orbit_point(&tau.tau(1), -1, tau.a()));
        assert_eq!(tau.tau(3), rat(3, 32));
        for j in 1..=64u64 {
            assert!(tau.tau(j + 1) < tau.tau(j), "j = {j}");
            for i in 0..4 {
                assert_eq!(tau.tau(j << i), orbit_point(&tau.tau(j), -(i as i64), tau.a()));
            }
            assert!(exactnum::is_nadic_value(&tau.tau(j), 2));
        }
        let t3 = TauSequence::new(3);
        for j in 1..=40u64 {
            assert!(t3.tau(j + 1) < t3.tau(j));
        }
    }

    #[test]
    fn tau_search_helpers() {
        let tau = TauSequence::new(2);
        let x = rat(1, 10);
        let j = tau.first_below(&x);
        assert!(tau.tau(j) < x && tau.tau(j - 1) >= x);
        let n = tau.index_bound(&rat(1, 1000));
        assert!(n.is_power_of_two() && tau.tau(n) <= rat(1, 1000));
    }

    #[test]
    fn stilde_examples() {
        let got: Vec<u64> = stilde(&[1], 40).into_iter().collect();
        assert_eq!(got, vec![1, 2, 4, 8, 16, 31, 32, 33]);
        assert!(stilde(&[], 100).is_empty());
        for s in [vec![3u64], vec![3, 5, 9]] {
            for x in stilde(&s, 1 << 20) {
                assert!(stilde_estimate_holds(&s, x), "{x}");
            }
        }
        assert!(!stilde_estimate_holds(&[3], 7));
    }

    #[test]
    fn stilde_walk_and_range_agree_with_bfs() {
        for s in [vec![1u64], vec![3], vec![3, 5], vec![5, 9, 17]] {
            let all = stilde(&s, 200_000);
            let set: BTreeSet<u64> = s.iter().copied().collect();
            for j in 1..=200_000u64 {
                assert_eq!(in_stilde(&set, j), all.contains(&j), "j = {j}, S = {s:?}");
            }
            for (lo, hi) in [(1, 200_000), (90, 110), (3000, 3200), (97, 97), (150_000, 151_000)] {
                let want: BTreeSet<u64> = all.range(lo..=hi).copied().collect();
                assert_eq!(stilde_in_range(&set, lo, hi), want);
            }
        }
    }

    #[test]
    fn stilde_is_minimal() {
        let s = [3u64];
        let all = stilde(&s, 5000);
        for &x in &all {
            if s.contains(&x) {
                continue;
            }
            let removed: BTreeSet<u64> = all.iter().copied().filter(|&y| y != x).collect();
            let closed = removed.iter().all(|&y| {
                [2 * y, 32 * y + 1, 32 * y - 1]
                    .iter()
                    .all(|z| *z > 5000 || removed.contains(z))
            });
            assert!(!closed, "removing {x} kept closure");
        }
    }

    #[test]
    fn good_odd_sets() {
        assert_eq!(good_odd_set(1).unwrap().elements, vec![3]);
        let o = good_odd_set(6).unwrap();
        assert_eq!(&o.elements[..4], &[3, 5, 9, 17]);
        verify_odd_set(&o.elements, 40).unwrap();
        assert_eq!(check_candidate(&[3, 5], 6).unwrap_err().reason, "even");
        assert!(check_candidate(&[3], 25).is_err());
        assert!(o.log.iter().any(|r| r.reason == "even"));
    }

    #[test]
    fn qs_member_basics() {
        let tau = TauSequence::new(2);
        let s = [3u64];
        assert!(qs_member(&PLMap::identity(2), &s, &tau).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for j in [3u64, 6, 12, 95, 97] {
            let g = window_commutator(&mut rng, 2, &tau.tau(j + 1), &tau.tau(j - 1), 2);
            assert!(qs_member(&g, &s, &tau).unwrap());
        }
        // move τ_3 below τ_4
        let (b, _) = point_mover(2, &tau.tau(5), &tau.tau(2), &tau.tau(3), &((tau.tau(4) + tau.tau(5)) / int(2))).unwrap();
        let res = qs_check(&b, &s, &tau).unwrap();
        assert!(!res.member);
        assert_eq!(res.violating, Some(3));
        // the same move at an index outside S̃ is allowed
        let (b, _) = point_mover(2, &tau.tau(9), &tau.tau(6), &tau.tau(7), &((tau.tau(8) + tau.tau(9)) / int(2))).unwrap();
        assert!(qs_member(&b, &s, &tau).unwrap());
    }

    #[test]
    fn samples_are_members_and_stay() {
        let tau = TauSequence::new(2);
        let s = [3u64, 5];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = tau.a().clone();
        for _ in 0..60 {
            let g = qs_sample(&mut rng, &s, &tau, 2);
            assert!(qs_member(&g, &s, &tau).unwrap());
            assert!(qs_member(&conj(&g, &a), &s, &tau).unwrap());
        }
    }

    #[test]
    fn moving_witnesses() {
        let tau = TauSequence::new(2);
        let s = [3u64];
        for k in 1..30i64 {
            let t = rat(k, 61);
            let g = moving_witness(&t, &tau);
            assert_ne!(g.apply(&t), t);
            assert!(qs_member(&g, &s, &tau).unwrap());
        }
        let t = tau.tau(6);
        let g = moving_witness(&t, &tau);
        assert_ne!(g.apply(&t), t);
        assert!(qs_member(&g, &s, &tau).unwrap());
    }

    #[test]
    fn compare_small() {
        let tau = TauSequence::new(2);
        let budget = Budget {
            k_max: 6,
            ..Budget::default()
        };
        assert_eq!(qs_compare(&[3], &[3, 5], &tau, &budget).unwrap().dominates(), Some(0));
        assert_eq!(qs_compare(&[3], &[3], &tau, &budget).unwrap().dominates(), Some(0));
        let v = qs_compare(&[3, 5], &[3], &tau, &budget).unwrap();
        match v {
            Verdict::Refuted { witness, k_max, .. } => {
                let h = conj_a(&witness, &tau, -(k_max as i64));
                assert!(qs_member(&h, &[3], &tau).unwrap());
                assert!(!qs_member(&witness, &[3, 5], &tau).unwrap());
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(qs_compare(&[3], &[4], &tau, &budget), Err(NlError::NotOdd(4))));
    }

    #[test]
    fn compare_refutes_in_base_three() {
        let tau = TauSequence::new(3);
        let budget = Budget {
            k_max: 4,
            ..Budget::default()
        };
        match qs_compare(&[3, 5], &[5], &tau, &budget).unwrap() {
            Verdict::Refuted { witness, k_max, .. } => {
                assert_eq!(witness.chi0().unwrap(), 0);
                assert_eq!(witness.chi1().unwrap(), 0);
                let h = conj_a(&witness, &tau, -(k_max as i64));
                assert!(qs_member(&h, &[5], &tau).unwrap());
                assert!(!qs_member(&witness, &[3, 5], &tau).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }
}
