//! Bass–Serre tree of F_n as an ascending HNN extension with base K = Fix[0,t] and stable
//! letter a. Vertices are cosets gK; the up-neighbour of gK is gaK, and the down-neighbours
//! are gka⁻¹K for k ∈ K.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Mutex;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{self, format_rational, int, is_nadic_value, pow_n, Rational};
use crate::plmap::{
    compose_unchecked, make_bump, power, product, random_word_in, standard_generators, transplant,
    PLMap, PlError,
};
use crate::verdict::Budget;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error("invalid HNN data: {0}")]
    Param(String),
    #[error("element has base {0}, tree has base {1}")]
    BaseMismatch(u32, u32),
    #[error("no normal form with p ≤ {cap}")]
    SearchCap { cap: u64 },
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

const SEARCH_CAP: u64 = 1 << 12;
const BALL_CAP: u64 = 6;

pub struct HNNData {
    n: u32,
    t: Rational,
    a: PLMap,
    ray: i64,
    powers: Mutex<HashMap<i64, PLMap>>,
}

impl std::fmt::Debug for HNNData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HNNData")
            .field("n", &self.n)
            .field("t", &format_rational(&self.t))
            .field("ray", &self.ray)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeMetricReport {
    pub d: u64,
    pub p: u64,
    pub q: u64,
    pub oracle_checked: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsometryType {
    Elliptic,
    Loxodromic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub length: u64,
    pub kind: IsometryType,
    /// d(v₀, g^m v₀) for m = 1..=M.
    pub distances: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusemannReport {
    pub value: Option<i64>,
    pub m0: Option<u64>,
    pub values: Vec<i64>,
    pub stabilized: bool,
}

/// Element of K: fixes [0, t] pointwise.
pub fn in_base(g: &PLMap, t: &Rational) -> bool {
    g.orientation() == 1 && g.fixes_interval(&int(0), t)
}

/// gK = hK iff g⁻¹ and h⁻¹ agree on [0, t], so the restriction of g⁻¹ is a coset code.
pub fn coset_code(g: &PLMap, t: &Rational) -> Vec<(Rational, Rational)> {
    let inv = g.invert();
    let mut code: Vec<_> = inv
        .points()
        .iter()
        .take_while(|(x, _)| x < t)
        .cloned()
        .collect();
    code.push((t.clone(), inv.apply(t)));
    code
}

impl HNNData {
    /// Base F_n[t, 1] with the stable letter a_0.
    pub fn new(n: u32, t: &Rational) -> Result<Self, TreeError> {
        let a = standard_generators(n)?.maps[0].clone();
        Self::with_stable_letter(t, a)
    }

    /// a must satisfy χ₀(a) = 1 and move every point of (0, t] upwards.
    pub fn with_stable_letter(t: &Rational, a: PLMap) -> Result<Self, TreeError> {
        let n = a.n();
        if !(t > &int(0) && t < &int(1)) || !is_nadic_value(t, n) {
            return Err(TreeError::Param(format!(
                "t = {} must be an n-adic point of (0, 1)",
                format_rational(t)
            )));
        }
        if a.orientation() != 1 || a.chi0()? != 1 {
            return Err(TreeError::Param("stable letter needs χ₀ = 1".into()));
        }
        let fs = a.fixed_set();
        let zero = int(0);
        if fs.points.iter().any(|x| x > &zero && x <= t)
            || fs.intervals.iter().any(|(l, _)| l > &zero && l <= t)
            || a.apply(t) <= *t
        {
            return Err(TreeError::Param(format!(
                "stable letter must push (0, {}] upwards",
                format_rational(t)
            )));
        }
        let mut h = HNNData {
            n,
            t: t.clone(),
            a,
            ray: 0,
            powers: Mutex::new(HashMap::new()),
        };
        h.ray = h.calibrate()?;
        Ok(h)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn stable_letter(&self) -> &PLMap {
        &self.a
    }

    /// +1 if the Busemann ray runs through a^m v₀, −1 if through a^{−m} v₀.
    pub fn ray_direction(&self) -> i64 {
        self.ray
    }

    pub fn a_power(&self, k: i64) -> PLMap {
        if let Some(p) = self.powers.lock().unwrap().get(&k) {
            return p.clone();
        }
        let p = power(&self.a, k);
        self.powers.lock().unwrap().insert(k, p.clone());
        p
    }

    pub fn in_base(&self, g: &PLMap) -> bool {
        in_base(g, &self.t)
    }

    fn check_elt(&self, g: &PLMap) -> Result<(), TreeError> {
        if g.n() != self.n {
            return Err(TreeError::BaseMismatch(g.n(), self.n));
        }
        if g.orientation() != 1 {
            return Err(TreeError::Param("orientation-reversing element".into()));
        }
        Ok(())
    }

    fn normal_form_holds(&self, g: &PLMap, p: u64, q: u64) -> bool {
        let w = product(
            self.n,
            [&self.a_power(-(q as i64)), g, &self.a_power(p as i64)],
        );
        self.in_base(&w)
    }

    /// Least p ≥ 0 with q = p + χ₀(g) ≥ 0 and a^{−q} g a^p ∈ K, so that gK lies q steps up and
    /// p steps down from v₀. Membership is monotone in p, so the search gallops then bisects.
    pub fn tree_distance(&self, g: &PLMap) -> Result<TreeMetricReport, TreeError> {
        self.check_elt(g)?;
        let chi = g.chi0()?;
        let p0 = (-chi).max(0) as u64;
        let q_of = |p: u64| (p as i64 + chi) as u64;
        let mut lo = p0;
        let mut step = 1u64;
        let mut hi = p0;
        while !self.normal_form_holds(g, hi, q_of(hi)) {
            lo = hi + 1;
            hi = p0 + step;
            step *= 2;
            if hi > SEARCH_CAP {
                return Err(TreeError::SearchCap { cap: SEARCH_CAP });
            }
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.normal_form_holds(g, mid, q_of(mid)) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let (p, q) = (hi, q_of(hi));
        Ok(TreeMetricReport {
            d: p + q,
            p,
            q,
            oracle_checked: false,
        })
    }

    pub fn distance(&self, g: &PLMap) -> Result<u64, TreeError> {
        Ok(self.tree_distance(g)?.d)
    }

    /// Distance between g·v₀ and h·v₀.
    pub fn distance_between(&self, g: &PLMap, h: &PLMap) -> Result<u64, TreeError> {
        self.distance(&compose_unchecked(&g.invert(), h))
    }

    /// tree_distance, cross-checked against `ball` after adding g's up-chain to it.
    pub fn tree_distance_checked(
        &self,
        g: &PLMap,
        ball: &mut TreeBall,
    ) -> Result<TreeMetricReport, TreeError> {
        let mut rep = self.tree_distance(g)?;
        let od = ball.locate(self, g)?;
        if od != rep.d {
            return Err(TreeError::Internal(format!(
                "normal form gives {}, oracle gives {od}",
                rep.d
            )));
        }
        rep.oracle_checked = true;
        Ok(rep)
    }

    /// ℓ = max(0, d(g²) − d(g)), with d(g^m) checked against the tree formula for m ≤ M.
    pub fn translation_length(&self, g: &PLMap, m_max: u64) -> Result<TranslationReport, TreeError> {
        if m_max < 2 {
            return Err(TreeError::Param("M must be at least 2".into()));
        }
        let mut distances = Vec::new();
        let mut gm = PLMap::identity(self.n);
        for _ in 0..m_max {
            gm = compose_unchecked(&gm, g);
            distances.push(self.distance(&gm)?);
        }
        let (d1, d2) = (distances[0], distances[1]);
        let length = d2.saturating_sub(d1);
        for (i, d) in distances.iter().enumerate() {
            let m = i as u64 + 1;
            let ok = if length > 0 {
                *d == d1 + (m - 1) * length
            } else {
                *d <= d1
            };
            if !ok {
                return Err(TreeError::Internal(format!(
                    "d(g^{m}) = {d} breaks the translation formula (d(g) = {d1}, ℓ = {length})"
                )));
            }
        }
        let kind = if length > 0 {
            IsometryType::Loxodromic
        } else {
            IsometryType::Elliptic
        };
        Ok(TranslationReport {
            length,
            kind,
            distances,
        })
    }

    pub fn isometry_type(&self, g: &PLMap) -> Result<IsometryType, TreeError> {
        Ok(self.translation_length(g, 4)?.kind)
    }

    fn busemann_values(&self, g: &PLMap, m: u64, ray: i64) -> Result<Vec<i64>, TreeError> {
        let ginv = g.invert();
        (1..=m)
            .map(|j| {
                let x = self.a_power(ray * j as i64);
                let to_x = self.distance(&x)? as i64;
                let from_g = self.distance(&compose_unchecked(&ginv, &x))? as i64;
                Ok(to_x - from_g)
            })
            .collect()
    }

    fn calibrate(&self) -> Result<i64, TreeError> {
        for ray in [1, -1] {
            let r = stabilization(self.busemann_values(&self.a, 8, ray)?);
            if r.value == Some(1) {
                return Ok(ray);
            }
        }
        Err(TreeError::Internal(
            "neither end of the axis of a gives Busemann value 1".into(),
        ))
    }

    /// d(v₀, x_j) − d(g·v₀, x_j) for j ≤ m along the calibrated a-ray.
    pub fn busemann_estimate(&self, g: &PLMap, m: u64) -> Result<BusemannReport, TreeError> {
        self.check_elt(g)?;
        if m == 0 {
            return Err(TreeError::Param("m must be at least 1".into()));
        }
        Ok(stabilization(self.busemann_values(g, m, self.ray)?))
    }

    /// Random element of K: a word of bumps supported in (t, 1).
    pub fn sample_base<R: Rng>(&self, rng: &mut R, len: usize) -> PLMap {
        random_word_in(rng, self.n, &self.t, &int(1), len)
    }

    /// K^a ⊆ K and every standard generator has a normal form; ⟨a⟩ ∩ K = {1} holds because
    /// χ₀(a) = 1 while χ₀ vanishes on K.
    pub fn check_invariants<R: Rng>(&self, rng: &mut R, budget: &Budget) -> Vec<String> {
        let mut out = Vec::new();
        let a = &self.a;
        for _ in 0..budget.samples {
            let k = self.sample_base(rng, budget.complexity.max(1));
            let conj = product(self.n, [&a.invert(), &k, a]);
            if !self.in_base(&conj) {
                out.push("K^a ⊄ K on a sampled element".into());
                break;
            }
        }
        if let Ok(gens) = standard_generators(self.n) {
            for (i, g) in gens.maps.iter().enumerate() {
                if self.tree_distance(g).is_err() {
                    out.push(format!("a_{i} has no normal form"));
                }
            }
        }
        out
    }

    /// Coset representatives of K over a⁻¹Ka = Fix[0, t.a]: the identity and a bump inside
    /// (t, t.a) together with its inverse.
    fn down_reps(&self) -> Result<Vec<PLMap>, TreeError> {
        let hi = self.a.apply(&self.t);
        let mut e = 1i64;
        while pow_n(self.n, -e) * int(3) > &hi - &self.t {
            e += 1;
        }
        let w = pow_n(self.n, -e);
        let l = exactnum::nadic_above(&self.t, self.n, e as u32, false);
        let b = transplant(&make_bump(self.n), &l, &(&l + &w))?;
        Ok(vec![PLMap::identity(self.n), b.clone(), b.invert()])
    }
}

fn stabilization(values: Vec<i64>) -> BusemannReport {
    let last = *values.last().expect("m ≥ 1");
    let from = values.iter().rposition(|v| *v != last).map_or(0, |i| i + 1);
    let stabilized = values.len() - from >= 3;
    BusemannReport {
        value: stabilized.then_some(last),
        m0: stabilized.then_some(from as u64 + 1),
        values,
        stabilized,
    }
}

/// Finite piece of the tree, built from coset codes and the up-adjacency only.
#[derive(Debug, Clone)]
pub struct TreeBall {
    pub depth: u64,
    pub reps: Vec<PLMap>,
    codes: BTreeMap<Vec<(Rational, Rational)>, usize>,
    up: Vec<Option<usize>>,
    dist: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallSummary {
    pub depth: u64,
    pub vertices: usize,
    pub edges: usize,
    pub connected: bool,
    pub acyclic: bool,
}

impl TreeBall {
    pub fn vertices(&self) -> usize {
        self.reps.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.up
            .iter()
            .enumerate()
            .filter_map(|(i, u)| u.map(|j| (i, j)))
            .collect()
    }

    /// Graph distance from v₀ to the i-th vertex.
    pub fn dist(&self, i: usize) -> u64 {
        self.dist[i]
    }

    pub fn summary(&self) -> BallSummary {
        let connected = self.dist.iter().all(|d| *d != u64::MAX);
        let edges = self.edges().len();
        BallSummary {
            depth: self.depth,
            vertices: self.vertices(),
            edges,
            connected,
            acyclic: connected && edges + 1 == self.vertices(),
        }
    }

    fn insert(&mut self, h: &HNNData, g: PLMap) -> (usize, bool) {
        let code = coset_code(&g, &h.t);
        if let Some(i) = self.codes.get(&code) {
            return (*i, false);
        }
        let i = self.reps.len();
        self.codes.insert(code, i);
        self.reps.push(g);
        self.up.push(None);
        (i, true)
    }

    fn link(&mut self, h: &HNNData) {
        let a = h.a.clone();
        for i in 0..self.reps.len() {
            if self.up[i].is_none() {
                let code = coset_code(&compose_unchecked(&self.reps[i], &a), &h.t);
                self.up[i] = self.codes.get(&code).copied();
            }
        }
        let mut adj = vec![Vec::new(); self.reps.len()];
        for (i, j) in self.edges() {
            adj[i].push(j);
            adj[j].push(i);
        }
        self.dist = vec![u64::MAX; self.reps.len()];
        self.dist[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if self.dist[w] == u64::MAX {
                    self.dist[w] = self.dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }

    /// Adds gK and its up-chain until it meets the ball, then returns the graph distance.
    pub fn locate(&mut self, h: &HNNData, g: &PLMap) -> Result<u64, TreeError> {
        let mut x = g.clone();
        for _ in 0..SEARCH_CAP {
            let (_, fresh) = self.insert(h, x.clone());
            if !fresh {
                self.link(h);
                let i = self.codes[&coset_code(g, &h.t)];
                let s = self.summary();
                if !s.acyclic {
                    return Err(TreeError::Oracle(format!(
                        "graph is not a tree: {} vertices, {} edges",
                        s.vertices, s.edges
                    )));
                }
                return Ok(self.dist[i]);
            }
            x = compose_unchecked(&x, &h.a);
        }
        Err(TreeError::Oracle("up-chain never met the ball".into()))
    }
}

/// All vertices reached from v₀ by at most D moves g ↦ ga, g ↦ gka⁻¹ (k a down
/// representative), with all Bass–Serre edges among them; fails unless the graph is a tree.
pub fn tree_ball(h: &HNNData, depth: u64) -> Result<TreeBall, TreeError> {
    if depth > BALL_CAP {
        return Err(TreeError::Param(format!("depth {depth} exceeds {BALL_CAP}")));
    }
    let mut moves = vec![h.a.clone()];
    let ainv = h.a.invert();
    for k in h.down_reps()? {
        moves.push(compose_unchecked(&k, &ainv));
    }
    let mut ball = TreeBall {
        depth,
        reps: Vec::new(),
        codes: BTreeMap::new(),
        up: Vec::new(),
        dist: Vec::new(),
    };
    ball.insert(h, PLMap::identity(h.n));
    let mut frontier = vec![PLMap::identity(h.n)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for g in &frontier {
            for m in &moves {
                let x = compose_unchecked(g, m);
                if ball.insert(h, x.clone()).1 {
                    next.push(x);
                }
            }
        }
        frontier = next;
    }
    ball.link(h);
    let s = ball.summary();
    if !s.acyclic {
        return Err(TreeError::Oracle(format!(
            "graph is not a tree: {} vertices, {} edges, connected = {}",
            s.vertices, s.edges, s.connected
        )));
    }
    Ok(ball)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::plmap::random_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hnn(n: u32) -> HNNData {
        let t = rat(1, (n * n) as i64);
        HNNData::new(n, &t).unwrap()
    }

    #[test]
    fn base_membership() {
        let h = hnn(2);
        let a = h.stable_letter().clone();
        assert!(h.in_base(&PLMap::identity(2)));
        assert!(!h.in_base(&a));
        let b = transplant(&make_bump(2), &rat(1, 2), &int(1)).unwrap();
        assert!(h.in_base(&b));
        assert!(HNNData::new(2, &rat(1, 3)).is_err());
        assert!(HNNData::new(2, &rat(3, 4)).is_err());
    }

    #[test]
    fn distance_examples() {
        for n in [2, 3] {
            let h = hnn(n);
            let a = h.stable_letter().clone();
            let r = h.tree_distance(&a).unwrap();
            assert_eq!((r.d, r.p, r.q), (1, 0, 1));
            let r = h.tree_distance(&a.invert()).unwrap();
            assert_eq!((r.d, r.p, r.q), (1, 1, 0));
            for k in 1..6 {
                assert_eq!(h.distance(&h.a_power(k)).unwrap(), k as u64);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..20 {
                let k = h.sample_base(&mut rng, 3);
                assert_eq!(h.distance(&k).unwrap(), 0);
            }
            assert_eq!(h.ray_direction(), 1);
        }
    }

    #[test]
    fn normal_form_and_symmetry() {
        let h = hnn(2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let g = random_element(&mut rng, 2, 3);
            let r = h.tree_distance(&g).unwrap();
            assert_eq!(r.q as i64 - r.p as i64, g.chi0().unwrap());
            assert_eq!(h.distance(&g.invert()).unwrap(), r.d);
            let k = random_element(&mut rng, 2, 2);
            let gk = compose_unchecked(&g, &k);
            let dk = h.distance(&k).unwrap();
            assert!(h.distance(&gk).unwrap() <= r.d + dk);
            assert_eq!(h.distance_between(&k, &compose_unchecked(&k, &g)).unwrap(), r.d);
        }
    }

    #[test]
    fn oracle_agrees() {
        let h = hnn(2);
        let mut ball = tree_ball(&h, 3).unwrap();
        let s = ball.summary();
        assert!(s.acyclic && s.vertices > 20, "{s:?}");
        for i in 0..ball.vertices() {
            assert_eq!(h.distance(&ball.reps[i]).unwrap(), ball.dist(i));
        }
        let a = h.stable_letter().clone();
        assert_eq!(ball.locate(&h, &a).unwrap(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let g = random_element(&mut rng, 2, 3);
            let r = h.tree_distance_checked(&g, &mut ball).unwrap();
            assert!(r.oracle_checked);
        }
        assert!(ball.summary().acyclic);
        assert!(tree_ball(&h, 7).is_err());
    }

    #[test]
    fn translation_and_types() {
        let h = hnn(3);
        let a = h.stable_letter().clone();
        let r = h.translation_length(&a, 6).unwrap();
        assert_eq!(r.length, 1);
        assert_eq!(r.distances, vec![1, 2, 3, 4, 5, 6]);
        assert!(h.translation_length(&a, 1).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(
            h.isometry_type(&h.sample_base(&mut rng, 2)).unwrap(),
            IsometryType::Elliptic
        );
        for _ in 0..40 {
            let g = random_element(&mut rng, 3, 3);
            let lox = g.chi0().unwrap() != 0;
            let r = h.translation_length(&g, 4).unwrap();
            assert_eq!(r.kind == IsometryType::Loxodromic, lox);
            assert_eq!(r.length, g.chi0().unwrap().unsigned_abs());
        }
    }

    #[test]
    fn busemann_matches_chi0() {
        let h = hnn(2);
        let a = h.stable_letter().clone();
        let r = h.busemann_estimate(&a, 8).unwrap();
        assert_eq!(r.value, Some(1));
        assert_eq!(r.m0, Some(1));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k = h.sample_base(&mut rng, 2);
        assert_eq!(h.busemann_estimate(&k, 6).unwrap().value, Some(0));
        for _ in 0..25 {
            let g = random_element(&mut rng, 2, 3);
            let r = h.busemann_estimate(&g, 16).unwrap();
            assert_eq!(r.value, Some(g.chi0().unwrap()), "{r:?}");
        }
        let short = h.busemann_estimate(&a, 2).unwrap();
        assert!(!short.stabilized);
    }

    #[test]
    fn invariants_hold() {
        let h = hnn(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = Budget::default().with_samples(30);
        assert!(h.check_invariants(&mut rng, &b).is_empty());
    }

    #[test]
    fn report_json() {
        let h = hnn(2);
        let r = h.tree_distance(h.stable_letter()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"d":1,"p":0,"q":1,"oracle_checked":false}"#);
    }
}
