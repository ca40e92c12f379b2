//! Symbolic catalog of χ₀-confining subsets of F_n' with membership, axiom checks,
//! the domination oracle and the constructive emptiness factorizations.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{
    self, format_rational, int, pow_n, rat, simplest_nadic_between,
    Rational,
};
use crate::nonlamplike::{self, NlError, TauSequence};
use crate::plmap::{
    commutator_mover, compose_unchecked, conj, default_shadow, orbit_point, point_mover, power,
    product, rational_slope_fix_element, shadow_commutator, standard_generators, transplant,
    window_commutator, FixedSet, GeneratorTuple, PLMap, PlError, make_bump,
};
use crate::verdict::{Budget, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfError {
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error(transparent)]
    Nl(#[from] NlError),
    #[error("parameter {name} = {value} must lie in {range}")]
    Param {
        name: &'static str,
        value: String,
        range: String,
    },
    #[error("element has base {0}, family has base {1}")]
    BaseMismatch(u32, u32),
    #[error("{0} is not a certified global fixed point")]
    NotFixed(String),
    #[error("scenario inconsistent with f: {0}")]
    Scenario(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
}

fn param(name: &'static str, value: &Rational, range: String) -> ConfError {
    ConfError::Param {
        name,
        value: format_rational(value),
        range,
    }
}

/// A character on the splitting Z^n, by its values on a_0, …, a_{n−1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharVector {
    pub n: u32,
    #[serde(with = "exactnum::rational_text_vec")]
    pub values: Vec<Rational>,
}

/// Which emptiness argument (if any) applies to a character.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharClass {
    Zero,
    TwoNonzero { i: usize, j: usize },
    Middle { i: usize },
    PositiveFirst,
    NegativeFirst,
    PositiveLast,
    NegativeLast,
}

impl CharVector {
    pub fn chi0(n: u32) -> Self {
        let mut values = vec![int(0); n as usize];
        values[0] = int(1);
        CharVector { n, values }
    }

    pub fn chi1(n: u32) -> Self {
        let mut values = vec![int(0); n as usize];
        values[n as usize - 1] = int(1);
        CharVector { n, values }
    }

    pub fn eval(&self, z: &[i64]) -> Rational {
        self.values
            .iter()
            .zip(z)
            .map(|(v, &k)| v * int(k))
            .fold(int(0), |a, b| a + b)
    }

    pub fn classify(&self) -> CharClass {
        let nz: Vec<usize> = (0..self.values.len())
            .filter(|&i| self.values[i] != int(0))
            .collect();
        let last = self.values.len() - 1;
        match nz.as_slice() {
            [] => CharClass::Zero,
            [i] if *i == 0 => {
                if self.values[0] > int(0) {
                    CharClass::PositiveFirst
                } else {
                    CharClass::NegativeFirst
                }
            }
            [i] if *i == last => {
                if self.values[last] > int(0) {
                    CharClass::PositiveLast
                } else {
                    CharClass::NegativeLast
                }
            }
            [i] => CharClass::Middle { i: *i },
            [i, j, ..] => CharClass::TwoNonzero { i: *i, j: *j },
        }
    }
}

/// A subset of N = {1, 2, …} given by a finite list or a finite complement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexSet {
    Finite { elements: BTreeSet<u64> },
    Cofinite { missing: BTreeSet<u64> },
}

impl IndexSet {
    pub fn finite(xs: impl IntoIterator<Item = u64>) -> Self {
        IndexSet::Finite {
            elements: xs.into_iter().collect(),
        }
    }

    pub fn cofinite(xs: impl IntoIterator<Item = u64>) -> Self {
        IndexSet::Cofinite {
            missing: xs.into_iter().collect(),
        }
    }

    pub fn all() -> Self {
        Self::cofinite([])
    }

    pub fn contains(&self, i: u64) -> bool {
        match self {
            IndexSet::Finite { elements } => elements.contains(&i),
            IndexSet::Cofinite { missing } => i >= 1 && !missing.contains(&i),
        }
    }

    /// Some(max(self ∖ other)) (0 when empty) if the difference is finite, else None.
    pub fn finite_difference(&self, other: &IndexSet) -> Option<u64> {
        match (self, other) {
            (IndexSet::Finite { elements }, _) => Some(
                elements
                    .iter()
                    .copied()
                    .filter(|&i| !other.contains(i))
                    .max()
                    .unwrap_or(0),
            ),
            (IndexSet::Cofinite { missing: a }, IndexSet::Cofinite { missing: b }) => Some(
                b.iter()
                    .copied()
                    .filter(|i| !a.contains(i))
                    .max()
                    .unwrap_or(0),
            ),
            (IndexSet::Cofinite { .. }, IndexSet::Finite { .. }) => None,
        }
    }

    /// Least element of self ∖ other exceeding `above`.
    pub fn difference_element_above(&self, other: &IndexSet, above: u64) -> Option<u64> {
        let cap = match (self, other) {
            (IndexSet::Finite { elements }, _) => elements.iter().max().copied().unwrap_or(0),
            (IndexSet::Cofinite { missing }, IndexSet::Finite { elements }) => {
                missing.iter().chain(elements).max().copied().unwrap_or(0) + above + 2
            }
            (IndexSet::Cofinite { missing }, IndexSet::Cofinite { missing: m2 }) => {
                missing.iter().chain(m2).max().copied().unwrap_or(0)
            }
        };
        (above + 1..=cap.max(above + 1)).find(|&i| self.contains(i) && !other.contains(i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConfFamily {
    Full,
    RigidStab {
        #[serde(with = "exactnum::rational_text")]
        t: Rational,
    },
    OpenRigidStab {
        #[serde(with = "exactnum::rational_text")]
        t: Rational,
    },
    OrbitFixator {
        #[serde(with = "exactnum::rational_text")]
        t: Rational,
    },
    NbhdOrbitFixator {
        #[serde(with = "exactnum::rational_text")]
        t: Rational,
    },
    LamplikeProduct {
        #[serde(with = "exactnum::rational_text")]
        t: Rational,
        #[serde(with = "exactnum::rational_text")]
        x: Rational,
        set: IndexSet,
    },
    NonLamplike {
        s: Vec<u64>,
        #[serde(with = "exactnum::rational_text")]
        tau1: Rational,
    },
    Conjugate {
        inner: Box<ConfFamily>,
        k: i64,
    },
    Intersection {
        left: Box<ConfFamily>,
        right: Box<ConfFamily>,
    },
    SplitClosure {
        inner: Box<ConfFamily>,
        #[serde(with = "exactnum::rational_text")]
        t: Rational,
    },
}

impl ConfFamily {
    pub fn conjugate(self, k: i64) -> Self {
        ConfFamily::Conjugate {
            inner: Box::new(self),
            k,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ConfFamily::Full => "Full".into(),
            ConfFamily::RigidStab { t } => format!("RigidStab({})", format_rational(t)),
            ConfFamily::OpenRigidStab { t } => format!("OpenRigidStab({})", format_rational(t)),
            ConfFamily::OrbitFixator { t } => format!("OrbitFixator({})", format_rational(t)),
            ConfFamily::NbhdOrbitFixator { t } => {
                format!("NbhdOrbitFixator({})", format_rational(t))
            }
            ConfFamily::LamplikeProduct { t, x, set } => format!(
                "LamplikeProduct({}, {}, {:?})",
                format_rational(t),
                format_rational(x),
                set
            ),
            ConfFamily::NonLamplike { s, .. } => format!("NonLamplike({:?})", s),
            ConfFamily::Conjugate { inner, k } => format!("{}^(a^{})", inner.name(), k),
            ConfFamily::Intersection { left, right } => {
                format!("({} & {})", left.name(), right.name())
            }
            ConfFamily::SplitClosure { inner, t } => {
                format!("Split({}, {})", inner.name(), format_rational(t))
            }
        }
    }

    /// Every catalog constructor except NonLamplike is a subgroup.
    pub fn is_subgroup(&self) -> bool {
        match self {
            ConfFamily::NonLamplike { .. } => false,
            ConfFamily::Conjugate { inner, .. } | ConfFamily::SplitClosure { inner, .. } => {
                inner.is_subgroup()
            }
            ConfFamily::Intersection { left, right } => left.is_subgroup() && right.is_subgroup(),
            _ => true,
        }
    }
}

/// Shared data for queries at a fixed base n: the generators, a = a_0 and r = 1/n.
#[derive(Debug)]
pub struct ConfCtx {
    n: u32,
    gens: GeneratorTuple,
    a: PLMap,
    r: Rational,
    powers: Mutex<HashMap<i64, PLMap>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StayReport {
    pub pass: bool,
    pub samples: usize,
    pub counterexample: Option<PLMap>,
    pub rule: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GetInEntry {
    pub element: PLMap,
    /// Least k ≤ k_max with element^{a^k} in the family.
    pub k: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProdReport {
    /// The exponent k with (Q·Q)^{a^k} ⊆ Q (the z₀ of the product axiom).
    pub k: Option<u64>,
    pub exact: bool,
    pub rule: String,
    pub pairs: usize,
    /// Least k passing on every sampled pair.
    pub sampled_least_k: Option<u64>,
    pub counterexample: Option<(PLMap, PLMap)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub family: ConfFamily,
    pub budget: Budget,
    pub stay: StayReport,
    pub getin: Vec<GetInEntry>,
    pub prod: ProdReport,
    pub inconclusive: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.stay.pass && self.getin.iter().all(|e| e.k.is_some()) && self.prod.k.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointReport {
    /// Global fixed points in (0, 1) established by the constructor's definition.
    #[serde(with = "exactnum::rational_text_vec")]
    pub points: Vec<Rational>,
    #[serde(with = "exactnum::rational_text_pairs")]
    pub intervals: Vec<(Rational, Rational)>,
    /// The lists are exactly the global fixed points (within the orbit window).
    pub certified: bool,
    /// Common fixed set of sampled members, when the lists are only a lower bound.
    pub upper_bound: Option<FixedSet>,
    pub note: String,
}

impl FixedPointReport {
    pub fn contains(&self, t: &Rational) -> bool {
        self.points.contains(t) || self.intervals.iter().any(|(a, b)| a <= t && t <= b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargestElement {
    pub k: u64,
    /// F_n'[reference.a^k, 1) is contained in the family.
    #[serde(with = "exactnum::rational_text")]
    pub reference: Rational,
    #[serde(with = "exactnum::rational_text")]
    pub threshold: Rational,
    pub strict: bool,
    pub samples_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorSet {
    /// Elements of F_n' fixing I_i pointwise.
    Fixator { interval: usize },
    /// An auxiliary element the argument posits (f′, q_ℓ, q_r, q).
    Auxiliary { name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    /// base^{a_generator^power}.
    pub element: PLMap,
    pub base: PLMap,
    pub set: FactorSet,
    pub generator: usize,
    pub power: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub factors: Vec<Factor>,
    pub auxiliary: Vec<(String, PLMap)>,
}

impl Factorization {
    pub fn replay(&self, n: u32) -> PLMap {
        product(n, self.factors.iter().map(|f| &f.element))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// ρ(a_i), ρ(a_j) ≠ 0 with i ≠ j; f_prime must fix I_j and push the support past I_i.
    TwoNonzero {
        i: usize,
        j: usize,
        f_prime: Option<PLMap>,
    },
    /// ρ nonzero only at a middle generator a_i; q_left moves x_left below ℓ_i, q_right
    /// moves x_right above r_i.
    Middle {
        i: usize,
        q_left: Option<(PLMap, String)>,
        q_right: Option<(PLMap, String)>,
    },
    /// ρ = −χ₀ on the splitting; q moves x above r_0.
    NegativeChi { q: Option<(PLMap, String)> },
}

fn fix_factor(g: PLMap, interval: usize) -> Factor {
    Factor {
        element: g.clone(),
        base: g,
        set: FactorSet::Fixator { interval },
        generator: 0,
        power: 0,
    }
}

fn aux_factor(g: PLMap, name: &str) -> Factor {
    Factor {
        element: g.clone(),
        base: g,
        set: FactorSet::Auxiliary { name: name.into() },
        generator: 0,
        power: 0,
    }
}

/// Intersection of two fixed sets.
pub fn intersect_fixed(a: &FixedSet, b: &FixedSet) -> FixedSet {
    let mut points: BTreeSet<Rational> = BTreeSet::new();
    for p in &a.points {
        if b.contains(p) {
            points.insert(p.clone());
        }
    }
    for p in &b.points {
        if a.contains(p) {
            points.insert(p.clone());
        }
    }
    let mut intervals = Vec::new();
    for (a0, a1) in &a.intervals {
        for (b0, b1) in &b.intervals {
            let lo = a0.max(b0).clone();
            let hi = a1.min(b1).clone();
            if lo < hi {
                intervals.push((lo, hi));
            } else if lo == hi {
                points.insert(lo);
            }
        }
    }
    intervals.sort();
    let points = points
        .into_iter()
        .filter(|p| !intervals.iter().any(|(x, y)| x <= p && p <= y))
        .collect();
    FixedSet { points, intervals }
}

/// All prime powers p_i^k ≤ n_max with i ∈ X, primes indexed from 1 (p_1 = 2).
pub fn prime_power_embedding(x: &BTreeSet<u64>, n_max: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    if x.is_empty() || n_max < 2 {
        return out;
    }
    let mut idx = 0u64;
    let mut p = 1u64;
    let top = *x.iter().max().unwrap();
    while idx < top {
        p += 1;
        if (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            idx += 1;
            if x.contains(&idx) {
                let mut q = p;
                while q <= n_max {
                    out.insert(q);
                    q = match q.checked_mul(p) {
                        Some(v) => v,
                        None => break,
                    };
                }
            }
            if p > n_max {
                break;
            }
        }
    }
    out
}

impl ConfCtx {
    pub fn new(n: u32) -> Result<Self, ConfError> {
        let gens = standard_generators(n)?;
        let a = gens.maps[0].clone();
        let r = gens.supports[0].1.clone();
        Ok(ConfCtx {
            n,
            gens,
            a,
            r,
            powers: Mutex::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn a(&self) -> &PLMap {
        &self.a
    }

    pub fn generators(&self) -> &GeneratorTuple {
        &self.gens
    }

    pub fn a_power(&self, k: i64) -> PLMap {
        if let Some(p) = self.powers.lock().unwrap().get(&k) {
            return p.clone();
        }
        let p = power(&self.a, k);
        self.powers.lock().unwrap().insert(k, p.clone());
        p
    }

    /// g^{a^k}.
    pub fn conj_a(&self, g: &PLMap, k: i64) -> PLMap {
        if k == 0 {
            return g.clone();
        }
        conj(g, &self.a_power(k))
    }

    pub fn orbit(&self, t: &Rational, k: i64) -> Rational {
        orbit_point(t, k, &self.a)
    }

    fn in_range(&self, name: &'static str, t: &Rational) -> Result<(), ConfError> {
        if t > &int(0) && t < &self.r {
            Ok(())
        } else {
            Err(param(name, t, format!("(0, {})", format_rational(&self.r))))
        }
    }

    pub fn validate(&self, f: &ConfFamily) -> Result<(), ConfError> {
        match f {
            ConfFamily::Full => Ok(()),
            ConfFamily::RigidStab { t }
            | ConfFamily::OpenRigidStab { t }
            | ConfFamily::OrbitFixator { t }
            | ConfFamily::NbhdOrbitFixator { t } => self.in_range("t", t),
            ConfFamily::LamplikeProduct { t, x, .. } => {
                self.in_range("t", t)?;
                let lo = self.orbit(t, -1);
                if !(x >= &lo && x < t) {
                    return Err(param(
                        "x",
                        x,
                        format!("[{}, {})", format_rational(&lo), format_rational(t)),
                    ));
                }
                Ok(())
            }
            ConfFamily::NonLamplike { s, tau1 } => {
                if s.is_empty() {
                    return Err(ConfError::Param {
                        name: "S",
                        value: "{}".into(),
                        range: "non-empty sets of odd integers".into(),
                    });
                }
                if let Some(&e) = s.iter().find(|&&v| v % 2 == 0) {
                    return Err(NlError::NotOdd(e).into());
                }
                self.in_range("tau1", tau1)?;
                TauSequence::shared(self.n, tau1)?;
                Ok(())
            }
            ConfFamily::Conjugate { inner, .. } => self.validate(inner),
            ConfFamily::Intersection { left, right } => {
                self.validate(left)?;
                self.validate(right)
            }
            ConfFamily::SplitClosure { inner, t } => {
                self.validate(inner)?;
                self.in_range("t", t)
            }
        }
    }

    fn tau(&self, tau1: &Rational) -> Result<Arc<TauSequence>, ConfError> {
        Ok(TauSequence::shared(self.n, tau1)?)
    }

    /// Cut point p_i = t − (t − x)/2^i of a lamplike product; p_0 = x.
    pub fn cut_point(t: &Rational, x: &Rational, i: u64) -> Rational {
        t - (t - x) / Rational::from_integer(num_bigint::BigInt::from(2u8).pow(i as u32))
    }

    pub fn member(&self, g: &PLMap, f: &ConfFamily) -> Result<bool, ConfError> {
        if g.n() != self.n {
            return Err(ConfError::BaseMismatch(g.n(), self.n));
        }
        if g.orientation() != 1 {
            return Ok(false);
        }
        if g.is_identity() {
            return Ok(true);
        }
        Ok(match f {
            ConfFamily::Full => true,
            ConfFamily::RigidStab { t } => g.fixes_interval(&int(0), t),
            ConfFamily::OpenRigidStab { t } => &g.identity_prefix() > t,
            ConfFamily::OrbitFixator { t } => self.fixes_orbit(g, t, false),
            ConfFamily::NbhdOrbitFixator { t } => self.fixes_orbit(g, t, true),
            ConfFamily::LamplikeProduct { t, x, set } => self.lamplike_member(g, t, x, set),
            ConfFamily::NonLamplike { s, tau1 } => {
                nonlamplike::qs_member(g, s, &*self.tau(tau1)?)?
            }
            ConfFamily::Conjugate { inner, k } => self.member(&self.conj_a(g, -k), inner)?,
            ConfFamily::Intersection { left, right } => {
                self.member(g, left)? && self.member(g, right)?
            }
            ConfFamily::SplitClosure { inner, t } => {
                &g.apply(t) == t && self.member(&g.restrict_below(t), inner)?
            }
        })
    }

    fn fixes_orbit(&self, g: &PLMap, t: &Rational, nbhd: bool) -> bool {
        let eps = g.identity_prefix();
        if eps <= int(0) {
            return false;
        }
        let mut tk = t.clone();
        while tk > eps {
            let ok = if nbhd {
                g.fixes_neighborhood(&tk)
            } else {
                g.apply(&tk) == tk
            };
            if !ok {
                return false;
            }
            tk = self.a.apply_inverse(&tk);
        }
        true
    }

    fn lamplike_member(&self, g: &PLMap, t: &Rational, x: &Rational, set: &IndexSet) -> bool {
        if !self.fixes_orbit(g, t, true) {
            return false;
        }
        for (c, d) in g.support() {
            if &c >= t {
                continue;
            }
            // c ∈ [t_{k−1}, t_k)
            let mut k = 0i64;
            let mut tk = t.clone();
            let mut below = self.a.apply_inverse(&tk);
            while c < below {
                k -= 1;
                tk = below;
                below = self.a.apply_inverse(&tk);
            }
            if d > tk {
                return false;
            }
            let xk = self.orbit(x, k);
            if d <= xk {
                continue;
            }
            let c0 = self.orbit(&c, -k);
            let d0 = self.orbit(&d, -k);
            let mut i = 1u64;
            while Self::cut_point(t, x, i) <= c0 {
                i += 1;
            }
            let fits = Self::cut_point(t, x, i - 1) < c0 && d0 < Self::cut_point(t, x, i);
            if !(fits && set.contains(i) && i > k.unsigned_abs()) {
                return false;
            }
        }
        true
    }

    fn window_elt(&self, rng: &mut ChaCha8Rng, l: &Rational, r: &Rational, cx: usize) -> PLMap {
        window_commutator(rng, self.n, l, r, cx)
    }

    /// A seeded member of F; orbit-indexed families spread their samples over k ∈ [−depth, 0].
    pub fn sample(
        &self,
        rng: &mut ChaCha8Rng,
        f: &ConfFamily,
        depth: u64,
        cx: usize,
    ) -> Result<PLMap, ConfError> {
        let n = self.n;
        let depth = depth as i64;
        Ok(match f {
            ConfFamily::Full => self.window_elt(rng, &int(0), &int(1), cx),
            ConfFamily::RigidStab { t } | ConfFamily::OpenRigidStab { t } => {
                self.window_elt(rng, t, &int(1), cx)
            }
            ConfFamily::OrbitFixator { t } | ConfFamily::NbhdOrbitFixator { t } => {
                let mut parts = vec![];
                for _ in 0..rng.gen_range(1..4) {
                    let k = rng.gen_range(-depth..=1);
                    let (lo, hi) = if k == 1 {
                        (t.clone(), int(1))
                    } else {
                        (self.orbit(t, k - 1), self.orbit(t, k))
                    };
                    parts.push(self.window_elt(rng, &lo, &hi, cx));
                }
                product(n, parts.iter())
            }
            ConfFamily::LamplikeProduct { t, x, set } => {
                let mut parts = vec![];
                for _ in 0..rng.gen_range(1..5) {
                    let k = rng.gen_range(-depth..=0);
                    match rng.gen_range(0..3) {
                        0 => {
                            let i = k.unsigned_abs() + rng.gen_range(1..6);
                            if set.contains(i) {
                                let lo = self.orbit(&Self::cut_point(t, x, i - 1), k);
                                let hi = self.orbit(&Self::cut_point(t, x, i), k);
                                parts.push(self.window_elt(rng, &lo, &hi, cx));
                            }
                        }
                        1 => {
                            let lo = self.orbit(t, k - 1);
                            let hi = self.orbit(x, k);
                            if lo < hi {
                                parts.push(self.window_elt(rng, &lo, &hi, cx));
                            }
                        }
                        _ => parts.push(self.window_elt(rng, t, &int(1), cx)),
                    }
                }
                product(n, parts.iter())
            }
            ConfFamily::NonLamplike { s, tau1 } => {
                nonlamplike::qs_sample(rng, s, &*self.tau(tau1)?, cx)
            }
            ConfFamily::Conjugate { inner, k } => {
                let g = self.sample(rng, inner, depth as u64 + k.unsigned_abs(), cx)?;
                self.conj_a(&g, *k)
            }
            ConfFamily::Intersection { left, right } => {
                for _ in 0..12 {
                    let (p, q) = if rng.gen_bool(0.5) {
                        (left, right)
                    } else {
                        (right, left)
                    };
                    let g = self.sample(rng, p, depth as u64, cx)?;
                    if self.member(&g, q)? {
                        return Ok(g);
                    }
                }
                let le = self.threshold(f)?;
                let lo = if le.1 {
                    simplest_nadic_between(&le.0, &self.r, n)
                } else {
                    le.0.clone()
                };
                self.window_elt(rng, &lo, &int(1), cx)
            }
            ConfFamily::SplitClosure { inner, t } => {
                let mut q = PLMap::identity(n);
                for _ in 0..12 {
                    let g = self.sample(rng, inner, depth as u64, cx)?;
                    if &g.apply(t) == t {
                        q = g;
                        break;
                    }
                }
                let h = self.window_elt(rng, t, &int(1), cx);
                compose_unchecked(&q, &h)
            }
        })
    }

    /// (u, strict): F_n'[u, 1) ⊆ F, or F_n'(u, 1) ⊆ F when strict.
    pub fn threshold(&self, f: &ConfFamily) -> Result<(Rational, bool), ConfError> {
        Ok(match f {
            ConfFamily::Full => (int(0), false),
            ConfFamily::RigidStab { t } | ConfFamily::OrbitFixator { t } => (t.clone(), false),
            ConfFamily::OpenRigidStab { t }
            | ConfFamily::NbhdOrbitFixator { t }
            | ConfFamily::LamplikeProduct { t, .. } => (t.clone(), true),
            ConfFamily::NonLamplike { s, tau1 } => {
                let m = *s.iter().min().expect("non-empty");
                (self.tau(tau1)?.tau(m), false)
            }
            ConfFamily::Conjugate { inner, k } => {
                let (u, st) = self.threshold(inner)?;
                (self.orbit(&u, *k), st)
            }
            ConfFamily::Intersection { left, right } => {
                let (u1, s1) = self.threshold(left)?;
                let (u2, s2) = self.threshold(right)?;
                if u1 == u2 {
                    (u1, s1 || s2)
                } else if u1 > u2 {
                    (u1, s1)
                } else {
                    (u2, s2)
                }
            }
            ConfFamily::SplitClosure { inner, t } => {
                let (u, st) = self.threshold(inner)?;
                if t <= &u {
                    (t.clone(), false)
                } else {
                    (u, st)
                }
            }
        })
    }

    fn reference_point(&self, f: &ConfFamily) -> Rational {
        let nn = self.n as i64;
        match f {
            ConfFamily::RigidStab { t }
            | ConfFamily::OpenRigidStab { t }
            | ConfFamily::OrbitFixator { t }
            | ConfFamily::NbhdOrbitFixator { t }
            | ConfFamily::LamplikeProduct { t, .. } => t.clone(),
            ConfFamily::Full | ConfFamily::NonLamplike { .. } => rat(1, nn * nn * nn),
            ConfFamily::Conjugate { inner, .. } | ConfFamily::SplitClosure { inner, .. } => {
                self.reference_point(inner)
            }
            ConfFamily::Intersection { left, right } => {
                self.reference_point(left).min(self.reference_point(right))
            }
        }
    }

    /// Least k with v.a^k ≥ u (or > u), up to `cap`.
    fn climb(&self, v: &Rational, u: &Rational, strict: bool, cap: u64) -> Option<u64> {
        let mut p = v.clone();
        for k in 0..=cap {
            if (strict && &p > u) || (!strict && &p >= u) {
                return Some(k);
            }
            p = self.a.apply(&p);
        }
        None
    }

    /// Least k with F_n'[t.a^k, 1) ⊆ F for the family's reference point t, verified on samples.
    pub fn largest_element_witness(
        &self,
        f: &ConfFamily,
        budget: &Budget,
    ) -> Result<LargestElement, ConfError> {
        let (u, strict) = self.threshold(f)?;
        let reference = self.reference_point(f);
        let k = self
            .climb(&reference, &u, strict, budget.k_max)
            .ok_or_else(|| ConfError::Budget(format!("no k <= {} reaches the threshold", budget.k_max)))?;
        let lo = self.orbit(&reference, k as i64);
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let checks = budget.samples.min(64);
        for _ in 0..checks {
            let g = self.window_elt(&mut rng, &lo, &int(1), budget.complexity);
            if !self.member(&g, f)? {
                return Err(ConfError::Budget(format!(
                    "sampled member of F_n'[{}, 1) left the family",
                    format_rational(&lo)
                )));
            }
        }
        Ok(LargestElement {
            k,
            reference,
            threshold: u,
            strict,
            samples_checked: checks,
        })
    }

    pub fn axiom_check(&self, f: &ConfFamily, budget: &Budget) -> Result<AxiomReport, ConfError> {
        self.validate(f)?;
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let depth = 8u64;
        let cx = budget.complexity;
        let mut stay = StayReport {
            pass: true,
            samples: 0,
            counterexample: None,
            rule: stay_rule(f),
        };
        let mut members = Vec::with_capacity(budget.samples);
        for _ in 0..budget.samples {
            let g = self.sample(&mut rng, f, depth, cx)?;
            if !self.member(&g, f)? {
                return Err(ConfError::Budget(format!(
                    "sampler produced a non-member of {}",
                    f.name()
                )));
            }
            stay.samples += 1;
            if stay.pass && !self.member(&self.conj_a(&g, 1), f)? {
                stay.pass = false;
                stay.counterexample = Some(g.clone());
            }
            members.push(g);
        }
        let mut getin = Vec::new();
        for _ in 0..budget.samples.min(50) {
            let g = self.window_elt(&mut rng, &int(0), &int(1), cx);
            let mut h = g.clone();
            let mut found = None;
            for k in 0..=budget.k_max {
                if self.member(&h, f)? {
                    found = Some(k);
                    break;
                }
                h = conj(&h, &self.a);
            }
            getin.push(GetInEntry { element: g, k: found });
        }
        let prod = self.prod_check(f, &members, budget)?;
        let inconclusive = getin.iter().any(|e| e.k.is_none()) || prod.k.is_none();
        Ok(AxiomReport {
            family: f.clone(),
            budget: *budget,
            stay,
            getin,
            prod,
            inconclusive,
        })
    }

    fn prod_check(
        &self,
        f: &ConfFamily,
        members: &[PLMap],
        budget: &Budget,
    ) -> Result<ProdReport, ConfError> {
        if f.is_subgroup() {
            return Ok(ProdReport {
                k: Some(0),
                exact: true,
                rule: "subgroup".into(),
                pairs: 0,
                sampled_least_k: None,
                counterexample: None,
            });
        }
        let pairs = budget.samples.min(members.len().saturating_sub(1));
        let mut least = 0u64;
        let mut rule_ok = true;
        let mut counterexample = None;
        let rule_k = if matches!(f, ConfFamily::NonLamplike { .. }) {
            Some(nonlamplike::CLOSURE_SHIFT as u64)
        } else {
            None
        };
        for p in 0..pairs {
            let (g, h) = (&members[p], &members[(p * 7 + 3) % members.len()]);
            let gh = compose_unchecked(g, h);
            if let Some(rk) = rule_k {
                if !self.member(&self.conj_a(&gh, rk as i64), f)? {
                    rule_ok = false;
                    counterexample = Some((g.clone(), h.clone()));
                }
            }
            let mut cur = self.conj_a(&gh, least as i64);
            let mut k = least;
            while !self.member(&cur, f)? {
                k += 1;
                if k > budget.k_max {
                    return Ok(ProdReport {
                        k: None,
                        exact: false,
                        rule: "sampled search exhausted".into(),
                        pairs: p + 1,
                        sampled_least_k: None,
                        counterexample: Some((g.clone(), h.clone())),
                    });
                }
                cur = conj(&cur, &self.a);
            }
            least = k;
        }
        Ok(match rule_k {
            Some(rk) => ProdReport {
                k: if rule_ok { Some(rk) } else { None },
                exact: true,
                rule: format!("closure of S under s -> 2^{rk} s +- 1"),
                pairs,
                sampled_least_k: Some(least),
                counterexample,
            },
            None => ProdReport {
                k: Some(least),
                exact: false,
                rule: "least k passing every sampled pair".into(),
                pairs,
                sampled_least_k: Some(least),
                counterexample: None,
            },
        })
    }

    /// Intersection node; the join of the two classes.
    pub fn join(&self, f1: &ConfFamily, f2: &ConfFamily) -> ConfFamily {
        ConfFamily::Intersection {
            left: Box::new(f1.clone()),
            right: Box::new(f2.clone()),
        }
    }

    pub fn split_representative(
        &self,
        f: &ConfFamily,
        t: &Rational,
    ) -> Result<ConfFamily, ConfError> {
        self.validate(f)?;
        self.in_range("t", t)?;
        let rep = self.global_fixed_points(f, -8, &Budget::default())?;
        if !rep.contains(t) {
            return Err(ConfError::NotFixed(format_rational(t)));
        }
        Ok(ConfFamily::SplitClosure {
            inner: Box::new(f.clone()),
            t: t.clone(),
        })
    }

    /// A member of F moving t, for families without global fixed points in (0, r).
    pub fn moving_member(&self, f: &ConfFamily, t: &Rational) -> Result<Option<PLMap>, ConfError> {
        if !(t > &int(0) && t < &int(1)) {
            return Err(param("t", t, "(0, 1)".into()));
        }
        Ok(match f {
            ConfFamily::Full => Some(commutator_mover(self.n, &int(0), &int(1), t)),
            ConfFamily::NonLamplike { tau1, .. } => {
                Some(nonlamplike::moving_witness(t, &*self.tau(tau1)?))
            }
            ConfFamily::Conjugate { inner, k } => {
                let t0 = self.orbit(t, -k);
                self.moving_member(inner, &t0)?.map(|g| self.conj_a(&g, *k))
            }
            _ => None,
        })
    }

    pub fn global_fixed_points(
        &self,
        f: &ConfFamily,
        k_min: i64,
        budget: &Budget,
    ) -> Result<FixedPointReport, ConfError> {
        let k_min = k_min.min(0);
        let orbit_list = |t: &Rational| -> Vec<Rational> {
            let mut v: Vec<Rational> = (k_min..=0).map(|k| self.orbit(t, k)).collect();
            v.sort();
            v
        };
        Ok(match f {
            ConfFamily::Full => FixedPointReport {
                points: vec![],
                intervals: vec![],
                certified: true,
                upper_bound: None,
                note: "no global fixed point in (0, 1); moving_member certifies any point".into(),
            },
            ConfFamily::RigidStab { t } | ConfFamily::OpenRigidStab { t } => FixedPointReport {
                points: vec![],
                intervals: vec![(int(0), t.clone())],
                certified: true,
                upper_bound: None,
                note: String::new(),
            },
            ConfFamily::OrbitFixator { t } | ConfFamily::NbhdOrbitFixator { t } => {
                FixedPointReport {
                    points: orbit_list(t),
                    intervals: vec![],
                    certified: true,
                    upper_bound: None,
                    note: format!("orbit points t.a^k for {} <= k <= 0", k_min),
                }
            }
            ConfFamily::LamplikeProduct { t, x, set } => {
                let mut points = vec![];
                let mut intervals = vec![];
                for k in k_min..=0 {
                    let m = k.unsigned_abs();
                    points.push(self.orbit(t, k));
                    let xk = self.orbit(x, k);
                    let pm = self.orbit(&Self::cut_point(t, x, m), k);
                    if xk < pm {
                        intervals.push((xk, pm));
                    } else {
                        points.push(xk);
                    }
                    for i in m + 1..=m + 6 {
                        let lo = self.orbit(&Self::cut_point(t, x, i - 1), k);
                        let hi = self.orbit(&Self::cut_point(t, x, i), k);
                        if set.contains(i) {
                            points.push(hi);
                        } else {
                            intervals.push((lo, hi));
                        }
                    }
                }
                points.sort();
                points.dedup();
                intervals.sort();
                FixedPointReport {
                    points,
                    intervals,
                    certified: false,
                    upper_bound: None,
                    note: "cut points listed for i <= |k| + 6 in each window".into(),
                }
            }
            ConfFamily::NonLamplike { .. } => FixedPointReport {
                points: vec![],
                intervals: vec![],
                certified: true,
                upper_bound: None,
                note: "no global fixed point in (0, r); moving_member certifies any point".into(),
            },
            ConfFamily::Conjugate { inner, k } => {
                let rep = self.global_fixed_points(inner, k_min - k.abs(), budget)?;
                FixedPointReport {
                    points: rep.points.iter().map(|p| self.orbit(p, *k)).collect(),
                    intervals: rep
                        .intervals
                        .iter()
                        .map(|(a, b)| (self.orbit(a, *k), self.orbit(b, *k)))
                        .collect(),
                    certified: rep.certified,
                    upper_bound: None,
                    note: rep.note,
                }
            }
            ConfFamily::Intersection { left, right } => {
                let l = self.global_fixed_points(left, k_min, budget)?;
                let r = self.global_fixed_points(right, k_min, budget)?;
                let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
                let mut upper: Option<FixedSet> = None;
                for _ in 0..budget.samples.min(40) {
                    let g = self.sample(&mut rng, f, 8, budget.complexity)?;
                    let fs = g.fixed_set();
                    upper = Some(match upper {
                        None => fs,
                        Some(u) => intersect_fixed(&u, &fs),
                    });
                }
                let mut points = l.points;
                points.extend(r.points);
                points.sort();
                points.dedup();
                let mut intervals = l.intervals;
                intervals.extend(r.intervals);
                intervals.sort();
                FixedPointReport {
                    points,
                    intervals,
                    certified: false,
                    upper_bound: upper,
                    note: "union of the components' fixed points (lower bound) and the common \
                           fixed set of sampled members (upper bound)"
                        .into(),
                }
            }
            ConfFamily::SplitClosure { inner, t } => {
                let rep = self.global_fixed_points(inner, k_min, budget)?;
                FixedPointReport {
                    points: rep.points.into_iter().filter(|p| p <= t).collect(),
                    intervals: rep
                        .intervals
                        .into_iter()
                        .filter(|(a, _)| a <= t)
                        .map(|(a, b)| (a, b.min(t.clone())))
                        .collect(),
                    certified: rep.certified,
                    upper_bound: None,
                    note: rep.note,
                }
            }
        })
    }

    /// Least d with s.a^d = t, searched within |d| ≤ cap.
    pub fn orbit_offset(&self, s: &Rational, t: &Rational, cap: u64) -> Option<i64> {
        let mut p = s.clone();
        let up = t >= s;
        for d in 0..=cap as i64 {
            if &p == t {
                return Some(if up { d } else { -d });
            }
            if (up && &p > t) || (!up && &p < t) {
                return None;
            }
            p = if up {
                self.a.apply(&p)
            } else {
                self.a.apply_inverse(&p)
            };
        }
        None
    }

    /// Decides F1 ⪯ F2, i.e. whether F2^{a^k} ⊆ F1 for some k ≥ 0.
    pub fn compare(
        &self,
        f1: &ConfFamily,
        f2: &ConfFamily,
        budget: &Budget,
    ) -> Result<Verdict<PLMap>, ConfError> {
        self.validate(f1)?;
        self.validate(f2)?;
        if let Some(v) = self.compare_exact(f1, f2, budget)? {
            return Ok(v);
        }
        self.compare_sampled(f1, f2, budget)
    }

    fn compare_exact(
        &self,
        f1: &ConfFamily,
        f2: &ConfFamily,
        budget: &Budget,
    ) -> Result<Option<Verdict<PLMap>>, ConfError> {
        use ConfFamily as F;
        let kmax = budget.k_max;
        if f1 == f2 {
            return Ok(Some(Verdict::exact(0, "reflexivity")));
        }
        if matches!(f1, F::Full) {
            return Ok(Some(Verdict::exact(0, "every family lies in F_n'")));
        }
        match (f1, f2) {
            (
                F::RigidStab { t } | F::OpenRigidStab { t },
                F::RigidStab { t: s } | F::OpenRigidStab { t: s },
            ) => {
                let strict = matches!(f1, F::OpenRigidStab { .. }) && matches!(f2, F::RigidStab { .. });
                let k = self.climb(s, t, strict, 1 << 16).expect("orbit reaches r");
                return Ok(Some(Verdict::exact(
                    k,
                    "rigid stabilizers: F[s,1)^(a^k) = F[s.a^k,1) is contained once s.a^k passes t",
                )));
            }
            (
                F::OrbitFixator { t } | F::NbhdOrbitFixator { t },
                F::OrbitFixator { t: s } | F::NbhdOrbitFixator { t: s },
            ) => {
                let nbhd_needed =
                    matches!(f1, F::NbhdOrbitFixator { .. }) && matches!(f2, F::OrbitFixator { .. });
                if !nbhd_needed {
                    if let Some(d) = self.orbit_offset(s, t, 1 << 14) {
                        return Ok(Some(Verdict::exact(
                            d.max(0) as u64,
                            "same orbit: the fixed orbit points of the conjugate cover t_k, k <= 0",
                        )));
                    }
                }
                return Ok(self.refute_orbit(f1, t, s, nbhd_needed, kmax)?);
            }
            (
                F::LamplikeProduct { t, x, set: y },
                F::LamplikeProduct {
                    t: t2,
                    x: x2,
                    set: xs,
                },
            ) if t == t2 && x == x2 => {
                return Ok(Some(match xs.finite_difference(y) {
                    Some(j) => Verdict::exact(j, "X \\ Y is finite; k = max(X \\ Y)"),
                    None => {
                        let i = xs
                            .difference_element_above(y, kmax)
                            .expect("infinite difference");
                        let k = kmax as i64;
                        let lo = self.orbit(&Self::cut_point(t, x, i - 1), -k);
                        let hi = self.orbit(&Self::cut_point(t, x, i), -k);
                        let mid = simplest_nadic_between(&lo, &hi, self.n);
                        let h = commutator_mover(self.n, &lo, &hi, &mid);
                        Verdict::Refuted {
                            witness: self.conj_a(&h, k),
                            k_max: kmax,
                            reason: format!(
                                "index {} lies in X but not Y and exceeds k_max; the witness \
                                 moves a point of the block ({}, {})",
                                i,
                                format_rational(&Self::cut_point(t, x, i - 1)),
                                format_rational(&Self::cut_point(t, x, i))
                            ),
                        }
                    }
                }));
            }
            (F::NonLamplike { s, tau1 }, F::NonLamplike { s: r, tau1: tau2 }) if tau1 == tau2 => {
                let tau = self.tau(tau1)?;
                return Ok(Some(nonlamplike::qs_compare(s, r, &tau, budget)?));
            }
            _ => {}
        }
        if let F::RigidStab { t: s } | F::OpenRigidStab { t: s } = f2 {
            let (u, strict) = self.threshold(f1)?;
            let strict = strict && matches!(f2, F::RigidStab { .. });
            if let Some(k) = self.climb(s, &u, strict, 1 << 16) {
                return Ok(Some(Verdict::exact(
                    k,
                    "threshold: F1 contains the rigid stabilizer above its threshold",
                )));
            }
        }
        match f2 {
            F::Conjugate { inner, k: j } => {
                if inner.as_ref() == f1 && *j >= 0 {
                    return Ok(Some(Verdict::exact(0, "stay: Q^(a^j) is contained in Q for j >= 0")));
                }
                let b2 = Budget {
                    k_max: kmax + j.unsigned_abs(),
                    ..*budget
                };
                return Ok(Some(match self.compare(f1, inner, &b2)? {
                    Verdict::Dominates { k, exact, rule } => Verdict::Dominates {
                        k: (k as i64 - j).max(0) as u64,
                        exact,
                        rule: format!("conjugate shift of: {rule}"),
                    },
                    Verdict::Refuted {
                        witness,
                        k_max,
                        reason,
                    } if k_max as i64 - j >= 0 => Verdict::Refuted {
                        witness,
                        k_max: (k_max as i64 - j) as u64,
                        reason,
                    },
                    _ => return Ok(None),
                }));
            }
            F::Intersection { left, right } => {
                let vl = self.compare(f1, left, budget)?;
                let vr = self.compare(f1, right, budget)?;
                let best = [&vl, &vr]
                    .iter()
                    .filter_map(|v| match v {
                        Verdict::Dominates { k, exact: true, .. } => Some(*k),
                        _ => None,
                    })
                    .min();
                if let Some(k) = best {
                    return Ok(Some(Verdict::exact(k, "a component of the intersection is dominated")));
                }
            }
            F::SplitClosure { inner, t } => {
                let v = self.compare(f1, inner, budget)?;
                if let Verdict::Dominates { k, exact: true, .. } = v {
                    let m = self.split_exponent(inner, t, budget)?;
                    if let Some(m) = m {
                        return Ok(Some(Verdict::exact(
                            2 * m + k,
                            "split representative: Q_split^(a^2m) is contained in Q",
                        )));
                    }
                }
            }
            _ => {}
        }
        match f1 {
            F::Conjugate { inner, k: j } => {
                let b2 = Budget {
                    k_max: kmax + j.unsigned_abs(),
                    ..*budget
                };
                return Ok(Some(match self.compare(inner, f2, &b2)? {
                    Verdict::Dominates { k, exact, rule } => Verdict::Dominates {
                        k: (k as i64 + j).max(0) as u64,
                        exact,
                        rule: format!("conjugate shift of: {rule}"),
                    },
                    Verdict::Refuted {
                        witness,
                        k_max,
                        reason,
                    } if k_max as i64 + j >= 0 => Verdict::Refuted {
                        witness: self.conj_a(&witness, *j),
                        k_max: (k_max as i64 + j) as u64,
                        reason,
                    },
                    _ => return Ok(None),
                }));
            }
            F::Intersection { left, right } => {
                let vl = self.compare(left, f2, budget)?;
                if vl.is_refuted() {
                    return Ok(Some(vl));
                }
                let vr = self.compare(right, f2, budget)?;
                if vr.is_refuted() {
                    return Ok(Some(vr));
                }
                if let (
                    Verdict::Dominates { k: k1, exact: e1, .. },
                    Verdict::Dominates { k: k2, exact: e2, .. },
                ) = (&vl, &vr)
                {
                    return Ok(Some(Verdict::Dominates {
                        k: (*k1).max(*k2),
                        exact: *e1 && *e2,
                        rule: "both components dominate".into(),
                    }));
                }
            }
            F::SplitClosure { inner, .. } => {
                if let Verdict::Dominates { k, exact: true, .. } = self.compare(inner, f2, budget)? {
                    return Ok(Some(Verdict::exact(k, "Q is contained in Q_split")));
                }
            }
            _ => {}
        }
        Ok(None)
    }

    /// max(k_le, k_prod): t.a^k passes the threshold of Q and (Q·Q)^{a^k} ⊆ Q.
    fn split_exponent(
        &self,
        inner: &ConfFamily,
        t: &Rational,
        budget: &Budget,
    ) -> Result<Option<u64>, ConfError> {
        let (u, _) = self.threshold(inner)?;
        let k_le = match self.climb(t, &u, true, 1 << 16) {
            Some(k) => k,
            None => return Ok(None),
        };
        let k_prod = if inner.is_subgroup() {
            0
        } else {
            match self.axiom_check(inner, budget)?.prod {
                ProdReport {
                    k: Some(k),
                    exact: true,
                    ..
                } => k,
                _ => return Ok(None),
            }
        };
        Ok(Some(k_le.max(k_prod)))
    }

    /// Refutes (N)OF(t) ⪯ (N)OF(s) with an element fixing s.a^j for j ≤ k_max that moves
    /// t (or fails to fix a neighborhood of t).
    fn refute_orbit(
        &self,
        f1: &ConfFamily,
        t: &Rational,
        s: &Rational,
        nbhd_needed: bool,
        kmax: u64,
    ) -> Result<Option<Verdict<PLMap>>, ConfError> {
        let n = self.n;
        let k = kmax as i64;
        let top = self.orbit(s, k);
        // consecutive points of {s.a^j : j ≤ k} ∪ {1} around t
        let (lo, hi, on_orbit) = if t > &top {
            (top, int(1), false)
        } else {
            let mut j = k;
            let mut p = top.clone();
            while &p > t {
                j -= 1;
                p = self.orbit(s, j);
            }
            if &p == t {
                (self.orbit(s, j - 1), self.orbit(s, j + 1), true)
            } else {
                (p, self.orbit(s, j + 1), false)
            }
        };
        let g = if !on_orbit {
            commutator_mover(n, &lo, &hi, t)
        } else {
            // t is a fixed point of every member; fail to fix a neighborhood of it
            debug_assert!(nbhd_needed);
            match self.one_sided_fixer(t, &lo, &hi)? {
                Some(g) => g,
                None => return Ok(None),
            }
        };
        let reason = if on_orbit {
            "t lies on the orbit of s; the witness fixes t but no neighborhood of it".to_string()
        } else {
            "t is not on the orbit of s; the witness fixes every s.a^j, j <= k_max, and moves t"
                .to_string()
        };
        debug_assert!(!self.member(&g, f1)?);
        Ok(Some(Verdict::Refuted {
            witness: g,
            k_max: kmax,
            reason,
        }))
    }

    /// An F_n' element supported in (lo, hi) fixing t but not any neighborhood of t.
    pub fn one_sided_fixer(
        &self,
        t: &Rational,
        lo: &Rational,
        hi: &Rational,
    ) -> Result<Option<PLMap>, ConfError> {
        let n = self.n;
        if exactnum::is_nadic_value(t, n) {
            let mut e = 1i64;
            let start = loop {
                let c = t - pow_n(n, -e);
                if &c > lo {
                    break c;
                }
                e += 1;
            };
            let b = transplant(&make_bump(n), &start, t)?;
            let (c, d) = default_shadow(n);
            return Ok(Some(shadow_commutator(&b, &start, t, &c, &d)?));
        }
        let u = simplest_nadic_between(lo, t, n);
        let v = simplest_nadic_between(t, hi, n);
        match rational_slope_fix_element(t, (&u, &v), n) {
            Ok(g) => Ok(Some(g)),
            Err(PlError::ClosingSearchExhausted(_)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    fn compare_sampled(
        &self,
        f1: &ConfFamily,
        f2: &ConfFamily,
        budget: &Budget,
    ) -> Result<Verdict<PLMap>, ConfError> {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let depth = budget.k_max + 8;
        let mut need = 0u64;
        for _ in 0..budget.samples {
            let g = self.sample(&mut rng, f2, depth, budget.complexity)?;
            let mut h = self.conj_a(&g, need as i64);
            let mut k = need;
            loop {
                if self.member(&h, f1)? {
                    break;
                }
                if k >= budget.k_max {
                    let w = self.conj_a(&g, budget.k_max as i64);
                    return Ok(Verdict::Refuted {
                        witness: w,
                        k_max: budget.k_max,
                        reason: "sampled member of F2 whose a^k_max conjugate leaves F1".into(),
                    });
                }
                k += 1;
                h = conj(&h, &self.a);
            }
            need = k;
        }
        Ok(Verdict::Dominates {
            k: need,
            exact: false,
            rule: format!("no sampled counterexample among {} members", budget.samples),
        })
    }

    /// Replays a verdict: Refuted witnesses must lie in F2^{a^k_max} and outside F1.
    pub fn replay(
        &self,
        f1: &ConfFamily,
        f2: &ConfFamily,
        v: &Verdict<PLMap>,
    ) -> Result<bool, ConfError> {
        Ok(match v {
            Verdict::Refuted { witness, k_max, .. } => {
                self.member(&self.conj_a(witness, -(*k_max as i64)), f2)?
                    && !self.member(witness, f1)?
            }
            _ => true,
        })
    }

    /// Writes f as a short product over the fixators and auxiliary elements of a scenario.
    pub fn emptiness_factorization(
        &self,
        f: &PLMap,
        scenario: &Scenario,
    ) -> Result<Factorization, ConfError> {
        let n = self.n;
        if f.n() != n {
            return Err(ConfError::BaseMismatch(f.n(), n));
        }
        let eps = f.identity_prefix();
        let delta = f.identity_suffix();
        if !f.is_identity() && (eps <= int(0) || delta >= int(1)) {
            return Err(ConfError::Scenario("f is not compactly supported".into()));
        }
        let sup = &self.gens.supports;
        let nn = n as i64;
        match scenario {
            Scenario::TwoNonzero { i, j, f_prime } => {
                let (i, j) = (*i, *j);
                if i == j || i >= n as usize || j >= n as usize {
                    return Err(ConfError::Scenario(format!("bad indices {i}, {j}")));
                }
                let (li, ri) = &sup[i];
                let clear = f.is_identity() || if i < j { &eps >= ri } else { &delta <= li };
                if clear {
                    return Ok(Factorization {
                        factors: vec![fix_factor(f.clone(), i)],
                        auxiliary: vec![],
                    });
                }
                let fp = match f_prime {
                    Some(g) => g.clone(),
                    None => self.two_nonzero_aux(f, i, j)?,
                };
                let (lj, rj) = &sup[j];
                if !fp.fixes_interval(lj, rj) {
                    return Err(ConfError::Scenario("f' does not fix I_j".into()));
                }
                let moved = if i < j {
                    &fp.apply(&eps) > ri
                } else {
                    &fp.apply(&delta) < li
                };
                if !moved {
                    return Err(ConfError::Scenario("f' does not push supp f off I_i".into()));
                }
                let core = conj(f, &fp);
                Ok(Factorization {
                    factors: vec![
                        fix_factor(fp.clone(), j),
                        fix_factor(core, i),
                        fix_factor(fp.invert(), j),
                    ],
                    auxiliary: vec![("f_prime".into(), fp)],
                })
            }
            Scenario::Middle { i, q_left, q_right } => {
                let i = *i;
                if n < 3 || i == 0 || i + 1 >= n as usize {
                    return Err(ConfError::Scenario(format!("a_{i} is not a middle generator")));
                }
                let a = self.gens.maps[i].clone();
                let (l, r) = sup[i].clone();
                if f.is_identity() || delta <= l {
                    return Ok(Factorization {
                        factors: vec![fix_factor(f.clone(), i)],
                        auxiliary: vec![],
                    });
                }
                let (ql, xl) = match q_left {
                    Some((q, x)) => (q.clone(), exactnum::parse_rational(x).map_err(PlError::from)?),
                    None => {
                        let x = &l + (&r - &l) / int(nn);
                        let lo = sup[i - 1].1.clone();
                        let w = simplest_nadic_between(&lo, &l, n);
                        let (b, _) = point_mover(n, &lo, &r, &x, &w)?;
                        let (c, d) = default_shadow(n);
                        (shadow_commutator(&b, &lo, &r, &c, &d)?, x)
                    }
                };
                if !(xl > l && xl < r && ql.apply(&xl) < l) {
                    return Err(ConfError::Scenario("q_left does not move x_left below l".into()));
                }
                let mut aux = vec![("q_left".to_string(), ql.clone())];
                let mut prefix: Vec<Factor> = vec![];
                let mut suffix: Vec<Factor> = vec![];
                let mut y = delta.clone();
                if delta >= r {
                    let (qr, xr) = match q_right {
                        Some((q, x)) => {
                            (q.clone(), exactnum::parse_rational(x).map_err(PlError::from)?)
                        }
                        None => {
                            let x = &r - (&r - &l) / int(nn);
                            let hi = &r + pow_n(n, -3);
                            let w = simplest_nadic_between(&r, &hi, n);
                            let (b, _) = point_mover(n, &l, &hi, &x, &w)?;
                            let (c, d) = default_shadow(n);
                            (shadow_commutator(&b, &l, &hi, &c, &d)?, x)
                        }
                    };
                    if !(xr > l && xr < r && qr.apply(&xr) > r) {
                        return Err(ConfError::Scenario(
                            "q_right does not move x_right above r".into(),
                        ));
                    }
                    let target = qr.apply(&xr);
                    let fp = if delta < target {
                        PLMap::identity(n)
                    } else {
                        let hi = &delta + (int(1) - &delta) / int(nn);
                        let w = simplest_nadic_between(&r, &target, n);
                        let (b, _) = point_mover(n, &r, &hi, &delta, &w)?;
                        let c = &l / int(nn * nn);
                        let d = &l / int(nn);
                        shadow_commutator(&b, &r, &hi, &c, &d)?
                    };
                    y = qr.apply_inverse(&fp.apply(&delta));
                    prefix.push(fix_factor(fp.clone(), i));
                    prefix.push(aux_factor(qr.invert(), "q_right^-1"));
                    suffix.push(aux_factor(qr.clone(), "q_right"));
                    suffix.push(fix_factor(fp.invert(), i));
                    aux.push(("q_right".into(), qr));
                    aux.push(("f_prime".into(), fp));
                }
                let mut k = 0i64;
                while y >= xl {
                    y = a.apply_inverse(&y);
                    k += 1;
                    if k > 1 << 14 {
                        return Err(ConfError::Budget("a_i-orbit did not reach x_left".into()));
                    }
                }
                let ak = power(&a, k);
                let conj_k = |g: &PLMap| conj(g, &ak);
                // core = f^{c⁻¹} with c = (prefix) a^{-k} q_left
                let pre = product(n, prefix.iter().map(|p| &p.element));
                let c = product(n, [&pre, &power(&a, -k), &ql]);
                let core = conj(f, &c);
                let mid = |g: PLMap, set: FactorSet| Factor {
                    element: conj_k(&g),
                    base: g,
                    set,
                    generator: i,
                    power: k,
                };
                let mut factors = prefix;
                factors.push(mid(ql.clone(), FactorSet::Auxiliary { name: "q_left".into() }));
                factors.push(mid(core, FactorSet::Fixator { interval: i }));
                factors.push(mid(ql.invert(), FactorSet::Auxiliary { name: "q_left^-1".into() }));
                factors.extend(suffix);
                Ok(Factorization {
                    factors,
                    auxiliary: aux,
                })
            }
            Scenario::NegativeChi { q } => {
                let (l0, r0) = sup[0].clone();
                let _ = l0;
                if f.is_identity() || eps >= r0 {
                    return Ok(Factorization {
                        factors: vec![fix_factor(f.clone(), 0)],
                        auxiliary: vec![],
                    });
                }
                let (qq, x) = match q {
                    Some((g, x)) => (g.clone(), exactnum::parse_rational(x).map_err(PlError::from)?),
                    None => {
                        let x = &r0 / int(nn);
                        let lo = &x / int(nn);
                        let hi = &r0 + pow_n(n, -3);
                        let w = simplest_nadic_between(&r0, &hi, n);
                        let (b, _) = point_mover(n, &lo, &hi, &x, &w)?;
                        let (c, d) = default_shadow(n);
                        (shadow_commutator(&b, &lo, &hi, &c, &d)?, x)
                    }
                };
                if !(x > int(0) && x < r0 && qq.apply(&x) > r0) {
                    return Err(ConfError::Scenario("q does not move x above r_0".into()));
                }
                let mut k = 0i64;
                let mut e = eps.clone();
                while e <= x {
                    e = self.a.apply(&e);
                    k += 1;
                    if k > 1 << 14 {
                        return Err(ConfError::Budget("a_0-orbit did not pass x".into()));
                    }
                }
                let c = compose_unchecked(&self.a_power(k), &qq);
                let core = conj(f, &c);
                let back = self.a_power(-k);
                let wrap = |g: PLMap, set: FactorSet| Factor {
                    element: conj(&g, &back),
                    base: g,
                    set,
                    generator: 0,
                    power: -k,
                };
                Ok(Factorization {
                    factors: vec![
                        wrap(qq.clone(), FactorSet::Auxiliary { name: "q".into() }),
                        wrap(core, FactorSet::Fixator { interval: 0 }),
                        wrap(qq.invert(), FactorSet::Auxiliary { name: "q^-1".into() }),
                    ],
                    auxiliary: vec![("q".into(), qq)],
                })
            }
        }
    }

    /// f′ fixing I_j with supp(f)^{f′} clear of I_i.
    fn two_nonzero_aux(&self, f: &PLMap, i: usize, j: usize) -> Result<PLMap, ConfError> {
        let n = self.n;
        let sup = &self.gens.supports;
        let (li, ri) = &sup[i];
        let (lj, rj) = &sup[j];
        // the gap between I_i and I_j holds the far end of the mover and the shadow
        if i < j {
            let eps = f.identity_prefix();
            let m1 = simplest_nadic_between(ri, lj, n);
            let hi = simplest_nadic_between(ri, &m1, n);
            let w = simplest_nadic_between(ri, &hi, n);
            let lo = simplest_nadic_between(&(&eps / int(n as i64)), &eps, n);
            let (b, _) = point_mover(n, &lo, &hi, &eps, &w)?;
            Ok(shadow_commutator(&b, &lo, &hi, &m1, lj)?)
        } else {
            let delta = f.identity_suffix();
            let m1 = simplest_nadic_between(rj, li, n);
            let lo = simplest_nadic_between(&m1, li, n);
            let w = simplest_nadic_between(&lo, li, n);
            let hi = simplest_nadic_between(&delta, &int(1), n);
            let (b, _) = point_mover(n, &lo, &hi, &delta, &w)?;
            Ok(shadow_commutator(&b, &lo, &hi, rj, &m1)?)
        }
    }
}

fn stay_rule(f: &ConfFamily) -> Option<String> {
    Some(
        match f {
            ConfFamily::Full => "F_n' is normal",
            ConfFamily::RigidStab { .. } | ConfFamily::OpenRigidStab { .. } => {
                "conjugation by a raises the threshold"
            }
            ConfFamily::OrbitFixator { .. } | ConfFamily::NbhdOrbitFixator { .. } => {
                "the conjugate fixes t_k for k <= 1"
            }
            ConfFamily::LamplikeProduct { .. } => "P_{k-1,X} is contained in P_{k,X}",
            ConfFamily::NonLamplike { .. } => "S-tilde is closed under doubling",
            _ => return None,
        }
        .to_string(),
    )
}

/// One representative of each catalog constructor, plus an intersection.
pub fn catalog(n: u32) -> Vec<ConfFamily> {
    let nn = n as i64;
    let t = rat(1, 2 * nn);
    vec![
        ConfFamily::Full,
        ConfFamily::RigidStab { t: t.clone() },
        ConfFamily::OpenRigidStab { t: t.clone() },
        ConfFamily::OrbitFixator { t: t.clone() },
        ConfFamily::NbhdOrbitFixator { t: rat(1, 3 * nn) },
        ConfFamily::LamplikeProduct {
            t: t.clone(),
            x: orbit_point(&t, -1, standard_generators(n).unwrap().a(0)),
            set: IndexSet::finite([1, 2, 3, 5, 8]),
        },
        ConfFamily::NonLamplike {
            s: vec![3, 5],
            tau1: rat(1, nn * nn),
        },
        ConfFamily::Intersection {
            left: Box::new(ConfFamily::OrbitFixator { t: t.clone() }),
            right: Box::new(ConfFamily::NonLamplike {
                s: vec![3],
                tau1: rat(1, nn * nn),
            }),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32) -> ConfCtx {
        ConfCtx::new(n).unwrap()
    }

    fn small() -> Budget {
        Budget {
            samples: 30,
            k_max: 12,
            seed: 3,
            complexity: 2,
        }
    }

    #[test]
    fn identity_is_everywhere() {
        let c = ctx(2);
        let id = PLMap::identity(2);
        for f in catalog(2) {
            assert!(c.member(&id, &f).unwrap(), "{}", f.name());
        }
    }

    #[test]
    fn rigid_membership() {
        let c = ctx(2);
        let f = ConfFamily::RigidStab { t: rat(1, 4) };
        let b = transplant(&make_bump(2), &rat(1, 4), &rat(1, 2)).unwrap();
        assert!(c.member(&b, &f).unwrap());
        assert!(!c.member(&b, &ConfFamily::OpenRigidStab { t: rat(1, 4) }).unwrap());
        let b2 = transplant(&make_bump(2), &rat(1, 8), &rat(1, 4)).unwrap();
        assert!(!c.member(&b2, &f).unwrap());
        assert!(c.member(&b2, &ConfFamily::OrbitFixator { t: rat(1, 4) }).unwrap());
    }

    #[test]
    fn axioms_small_budget() {
        for n in [2u32, 3] {
            let c = ctx(n);
            for f in catalog(n) {
                let rep = c.axiom_check(&f, &small()).unwrap();
                assert!(rep.passed(), "{} n={n}: {:?} {:?}", f.name(), rep.stay.pass, rep.prod);
                if matches!(f, ConfFamily::NonLamplike { .. }) {
                    assert_eq!(rep.prod.k, Some(5));
                }
            }
        }
    }

    #[test]
    fn rigid_examples() {
        let c = ctx(2);
        let b = small();
        let f14 = ConfFamily::RigidStab { t: rat(1, 4) };
        let f38 = ConfFamily::RigidStab { t: rat(3, 8) };
        assert_eq!(c.compare(&f14, &f38, &b).unwrap().dominates(), Some(0));
        let k = c.compare(&f38, &f14, &b).unwrap().dominates().unwrap();
        assert!(k >= 1);
        assert!(c.orbit(&rat(1, 4), k as i64) >= rat(3, 8));
        assert!(c.orbit(&rat(1, 4), k as i64 - 1) < rat(3, 8));
    }

    #[test]
    fn orbit_comparisons() {
        let c = ctx(2);
        let b = small();
        let t = rat(1, 4);
        let s = c.orbit(&t, -2);
        let of = |t: &Rational| ConfFamily::OrbitFixator { t: t.clone() };
        assert_eq!(c.compare(&of(&t), &of(&s), &b).unwrap().dominates(), Some(2));
        assert_eq!(c.compare(&of(&s), &of(&t), &b).unwrap().dominates(), Some(0));
        let other = rat(1, 5);
        let v = c.compare(&of(&t), &of(&other), &b).unwrap();
        assert!(v.is_refuted());
        assert!(c.replay(&of(&t), &of(&other), &v).unwrap());
        let nb = ConfFamily::NbhdOrbitFixator { t: t.clone() };
        let v = c.compare(&nb, &of(&t), &b).unwrap();
        assert!(v.is_refuted(), "{v:?}");
        assert!(c.replay(&nb, &of(&t), &v).unwrap());
        let v = c.compare(&nb, &of(&rat(1, 6)), &b).unwrap();
        assert!(c.replay(&nb, &of(&rat(1, 6)), &v).unwrap());
    }

    #[test]
    fn lamplike_order() {
        let c = ctx(2);
        let b = small();
        let t = rat(1, 4);
        let x = c.orbit(&t, -1);
        let q = |set: IndexSet| ConfFamily::LamplikeProduct {
            t: t.clone(),
            x: x.clone(),
            set,
        };
        let xs = q(IndexSet::cofinite([2]));
        let ys = q(IndexSet::finite([1, 3]));
        let v = c.compare(&ys, &xs, &b).unwrap();
        assert!(v.is_refuted());
        assert!(c.replay(&ys, &xs, &v).unwrap());
        assert_eq!(c.compare(&xs, &ys, &b).unwrap().dominates(), Some(0));
        let zs = q(IndexSet::cofinite([2, 4, 6]));
        assert_eq!(c.compare(&zs, &xs, &b).unwrap().dominates(), Some(6));
    }

    #[test]
    fn lamplike_membership_blocks() {
        let c = ctx(2);
        let t = rat(1, 4);
        let x = c.orbit(&t, -1);
        let f = ConfFamily::LamplikeProduct {
            t: t.clone(),
            x: x.clone(),
            set: IndexSet::finite([2]),
        };
        let p1 = ConfCtx::cut_point(&t, &x, 1);
        let p2 = ConfCtx::cut_point(&t, &x, 2);
        let mid = simplest_nadic_between(&p1, &p2, 2);
        let g = commutator_mover(2, &p1, &p2, &mid);
        assert!(c.member(&g, &f).unwrap());
        let p0 = ConfCtx::cut_point(&t, &x, 0);
        let mid = simplest_nadic_between(&p0, &p1, 2);
        let g = commutator_mover(2, &p0, &p1, &mid);
        assert!(!c.member(&g, &f).unwrap());
        // block 2 survives one conjugation (2 > 1) but not two
        let g2 = c.conj_a(&commutator_mover(2, &p1, &p2, &simplest_nadic_between(&p1, &p2, 2)), -1);
        assert!(c.member(&g2, &f).unwrap());
        let g3 = c.conj_a(&g2, -1);
        assert!(!c.member(&g3, &f).unwrap());
    }

    #[test]
    fn largest_elements() {
        let c = ctx(2);
        let b = small();
        let ks: Vec<u64> = catalog(2)
            .iter()
            .map(|f| c.largest_element_witness(f, &b).unwrap().k)
            .collect();
        assert_eq!(ks[1], 0);
        assert_eq!(ks[3], 0);
        assert_eq!(ks[4], 1);
    }

    #[test]
    fn fixed_points() {
        let c = ctx(2);
        let b = small();
        let t = rat(1, 4);
        let rep = c
            .global_fixed_points(&ConfFamily::OrbitFixator { t: t.clone() }, -3, &b)
            .unwrap();
        let want: Vec<Rational> = (-3..=0).rev().map(|k| c.orbit(&t, k)).rev().collect();
        let mut want = want;
        want.sort();
        assert_eq!(rep.points, want);
        let nl = ConfFamily::NonLamplike {
            s: vec![3],
            tau1: rat(1, 4),
        };
        for k in 1..20 {
            let t = rat(k, 41);
            let g = c.moving_member(&nl, &t).unwrap().unwrap();
            assert_ne!(g.apply(&t), t);
            assert!(c.member(&g, &nl).unwrap());
        }
    }

    #[test]
    fn joins_and_splits() {
        let c = ctx(2);
        let b = small();
        let f1 = ConfFamily::RigidStab { t: rat(1, 4) };
        let f2 = ConfFamily::RigidStab { t: rat(3, 8) };
        let j = c.join(&f1, &f2);
        assert_eq!(c.compare(&f1, &j, &b).unwrap().dominates(), Some(0));
        assert_eq!(c.compare(&f2, &j, &b).unwrap().dominates(), Some(0));
        assert_eq!(c.compare(&j, &f2, &b).unwrap().dominates(), Some(0));
        let of = ConfFamily::OrbitFixator { t: rat(1, 4) };
        let sp = c.split_representative(&of, &rat(1, 4)).unwrap();
        assert!(c.compare(&sp, &of, &b).unwrap().dominates().is_some());
        let k = c.compare(&of, &sp, &b).unwrap().dominates().unwrap();
        assert_eq!(k % 2, 0);
        let h = window_commutator(&mut ChaCha8Rng::seed_from_u64(1), 2, &rat(1, 4), &int(1), 2);
        assert!(c.member(&h, &sp).unwrap());
        assert!(c.split_representative(&of, &rat(1, 5)).is_err());
    }

    #[test]
    fn factorizations() {
        for n in [2u32, 3, 4] {
            let c = ctx(n);
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..6 {
                let f = window_commutator(&mut rng, n, &rat(1, 64), &rat(63, 64), 2);
                let sc = Scenario::TwoNonzero {
                    i: 0,
                    j: n as usize - 1,
                    f_prime: None,
                };
                let w = c.emptiness_factorization(&f, &sc).unwrap();
                assert!(w.factors.len() <= 3);
                assert_eq!(w.replay(n), f);
                let sc = Scenario::NegativeChi { q: None };
                let w = c.emptiness_factorization(&f, &sc).unwrap();
                assert!(w.factors.len() <= 3);
                assert_eq!(w.replay(n), f);
                for fac in &w.factors {
                    if let FactorSet::Fixator { interval } = fac.set {
                        let (l, r) = &c.generators().supports[interval];
                        assert!(fac.base.fixes_interval(l, r));
                    }
                }
                if n >= 3 {
                    let sc = Scenario::Middle {
                        i: 1,
                        q_left: None,
                        q_right: None,
                    };
                    let w = c.emptiness_factorization(&f, &sc).unwrap();
                    assert!(w.factors.len() <= 7);
                    assert_eq!(w.replay(n), f);
                    for fac in &w.factors {
                        if let FactorSet::Fixator { interval } = fac.set {
                            let (l, r) = &c.generators().supports[interval];
                            assert!(fac.base.fixes_interval(l, r));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prime_powers() {
        let one: BTreeSet<u64> = [1].into();
        assert_eq!(
            prime_power_embedding(&one, 20).into_iter().collect::<Vec<_>>(),
            vec![2, 4, 8, 16]
        );
        assert!(prime_power_embedding(&BTreeSet::new(), 100).is_empty());
        let x: BTreeSet<u64> = [1, 3].into();
        let y: BTreeSet<u64> = [1, 2, 3].into();
        let z: BTreeSet<u64> = [2].into();
        for nmax in [100u64, 1000, 10000] {
            assert!(prime_power_embedding(&x, nmax)
                .difference(&prime_power_embedding(&y, nmax))
                .next()
                .is_none());
        }
        let d1 = prime_power_embedding(&x, 100).difference(&prime_power_embedding(&z, 100)).count();
        let d2 = prime_power_embedding(&x, 10000).difference(&prime_power_embedding(&z, 10000)).count();
        assert!(d2 > d1);
    }

    #[test]
    fn char_classes() {
        assert_eq!(CharVector::chi0(3).classify(), CharClass::PositiveFirst);
        assert_eq!(CharVector::chi1(3).classify(), CharClass::PositiveLast);
        let v = CharVector {
            n: 4,
            values: vec![int(0), int(2), int(0), int(0)],
        };
        assert_eq!(v.classify(), CharClass::Middle { i: 1 });
        assert_eq!(v.eval(&[1, 1, 1, 1]), int(2));
    }

    #[test]
    fn family_json_round_trip() {
        for f in catalog(3) {
            let s = serde_json::to_string(&f).unwrap();
            let back: ConfFamily = serde_json::from_str(&s).unwrap();
            assert_eq!(back, f);
        }
    }
}
