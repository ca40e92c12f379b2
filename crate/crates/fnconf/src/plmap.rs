//! The groups F_n and F_n± as exact piecewise-linear homeomorphisms of [0,1].
//!
//! Maps act on the right: `x.g`, and `compose(g, h)` is x ↦ (x.g).h.
//! Conjugation is g^h = h⁻¹gh, so Supp(g^h) = Supp(g).h.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{
    self, format_rational, int, is_nadic, log_n, nadic_above, nadic_below, pow_n, rat, NAdic,
    NumError, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("point {0} lies outside [0,1]")]
    OutOfDomain(String),
    #[error("characters are undefined on orientation-reversing maps")]
    UndefinedCharacter,
    #[error("breakpoint {index}: {msg}")]
    Invalid { index: usize, msg: String },
    #[error("transplant interval ({0}, {1}) rejected: {2}")]
    BadInterval(String, String, String),
    #[error("{0} is n-ary; no rational slope element exists")]
    NAryPoint(String),
    #[error("window does not contain the point: {0}")]
    BadWindow(String),
    #[error("closing search exhausted: {0}")]
    ClosingSearchExhausted(String),
    #[error("no PL map with slopes in n^Z between the given intervals ({0})")]
    LengthClass(String),
}

/// Canonical-form piecewise-linear homeomorphism of [0,1].
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PLMapRepr", into = "PLMapRepr")]
pub struct PLMap {
    n: u32,
    orientation: i8,
    pts: Vec<(Rational, Rational)>,
}

#[derive(Serialize, Deserialize)]
struct PLMapRepr {
    n: u32,
    orientation: i8,
    breakpoints: Vec<(NAdic, NAdic)>,
}

impl TryFrom<PLMapRepr> for PLMap {
    type Error = PlError;

    fn try_from(r: PLMapRepr) -> Result<Self, PlError> {
        for (i, (x, y)) in r.breakpoints.iter().enumerate() {
            if x.base() != r.n || y.base() != r.n {
                return Err(PlError::Invalid {
                    index: i,
                    msg: format!("coordinate base differs from n = {}", r.n),
                });
            }
        }
        let pts = r
            .breakpoints
            .iter()
            .map(|(x, y)| (x.to_rational(), y.to_rational()))
            .collect();
        PLMap::from_breakpoints(r.n, r.orientation, pts)
    }
}

impl From<PLMap> for PLMapRepr {
    fn from(g: PLMap) -> Self {
        let breakpoints = g
            .pts
            .iter()
            .map(|(x, y)| {
                (
                    is_nadic(x, g.n).ok().flatten().expect("validated n-adic"),
                    is_nadic(y, g.n).ok().flatten().expect("validated n-adic"),
                )
            })
            .collect();
        PLMapRepr {
            n: g.n,
            orientation: g.orientation,
            breakpoints,
        }
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLMap[n={}, o={}; ", self.n, self.orientation)?;
        for (i, (x, y)) in self.pts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", format_rational(x), format_rational(y))?;
        }
        write!(f, "]")
    }
}

fn seg_slope(p: &(Rational, Rational), q: &(Rational, Rational)) -> Rational {
    (&q.1 - &p.1) / (&q.0 - &p.0)
}

fn canonicalize(pts: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(pts.len());
    for p in pts {
        if let Some(last) = out.last() {
            if last.0 == p.0 {
                continue;
            }
        }
        while out.len() >= 2 {
            let a = &out[out.len() - 2];
            let b = &out[out.len() - 1];
            // collinear iff (b - a) x (p - a) = 0
            let lhs = (&b.1 - &a.1) * (&p.0 - &a.0);
            let rhs = (&p.1 - &a.1) * (&b.0 - &a.0);
            if lhs == rhs {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

impl PLMap {
    /// Validates every PLMap invariant and returns the canonical form.
    pub fn from_breakpoints(
        n: u32,
        orientation: i8,
        pts: Vec<(Rational, Rational)>,
    ) -> Result<Self, PlError> {
        exactnum::check_base(n)?;
        if orientation != 1 && orientation != -1 {
            return Err(PlError::Invalid {
                index: 0,
                msg: "orientation must be 1 or -1".into(),
            });
        }
        if pts.len() < 2 {
            return Err(PlError::Invalid {
                index: 0,
                msg: "need at least two breakpoints".into(),
            });
        }
        let (y0, y1) = if orientation == 1 {
            (int(0), int(1))
        } else {
            (int(1), int(0))
        };
        if pts[0] != (int(0), y0) {
            return Err(PlError::Invalid {
                index: 0,
                msg: "first breakpoint must be the image of 0".into(),
            });
        }
        let last = pts.len() - 1;
        if pts[last] != (int(1), y1) {
            return Err(PlError::Invalid {
                index: last,
                msg: "last breakpoint must be the image of 1".into(),
            });
        }
        for (i, (x, y)) in pts.iter().enumerate() {
            if is_nadic(x, n)?.is_none() || is_nadic(y, n)?.is_none() {
                return Err(PlError::Invalid {
                    index: i,
                    msg: format!("coordinates are not in Z[1/{}]", n),
                });
            }
        }
        for i in 0..last {
            let (p, q) = (&pts[i], &pts[i + 1]);
            if p.0 >= q.0 {
                return Err(PlError::Invalid {
                    index: i + 1,
                    msg: if p.0 == q.0 {
                        "zero-length segment".into()
                    } else {
                        "x coordinates not increasing".into()
                    },
                });
            }
            let s = seg_slope(p, q);
            let mag = s.abs();
            if s.is_zero() || (s.is_positive() != (orientation == 1)) {
                return Err(PlError::Invalid {
                    index: i + 1,
                    msg: "not a homeomorphism of the stated orientation".into(),
                });
            }
            if log_n(&mag, n).is_none() {
                return Err(PlError::Invalid {
                    index: i + 1,
                    msg: format!("slope {} is not ±{}^k", format_rational(&s), n),
                });
            }
        }
        Ok(PLMap {
            n,
            orientation,
            pts: canonicalize(pts),
        })
    }

    /// PL map with arbitrary rational breakpoints, used only for dynamical predicates
    /// (restrictions at non-n-ary points). Not an element of F_n in general.
    pub(crate) fn raw(n: u32, pts: Vec<(Rational, Rational)>) -> Self {
        PLMap {
            n,
            orientation: 1,
            pts: canonicalize(pts),
        }
    }

    pub fn identity(n: u32) -> Self {
        PLMap {
            n,
            orientation: 1,
            pts: vec![(int(0), int(0)), (int(1), int(1))],
        }
    }

    /// α: x ↦ 1 − x.
    pub fn alpha(n: u32) -> Self {
        PLMap {
            n,
            orientation: -1,
            pts: vec![(int(0), int(1)), (int(1), int(0))],
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.pts
    }

    pub fn breakpoints(&self) -> Vec<(NAdic, NAdic)> {
        PLMapRepr::from(self.clone()).breakpoints
    }

    pub fn is_identity(&self) -> bool {
        self.orientation == 1 && self.pts.len() == 2
    }

    fn segment_for_x(&self, x: &Rational) -> usize {
        // index i with x_i <= x <= x_{i+1}
        let mut lo = 0usize;
        let mut hi = self.pts.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if &self.pts[mid].0 <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn segment_for_y(&self, y: &Rational) -> usize {
        let mut lo = 0usize;
        let mut hi = self.pts.len() - 1;
        let inc = self.orientation == 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let before = if inc {
                &self.pts[mid].1 <= y
            } else {
                &self.pts[mid].1 >= y
            };
            if before {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// x.g for x in [0,1]; panics outside the domain.
    pub fn apply(&self, x: &Rational) -> Rational {
        let i = self.segment_for_x(x);
        let (p, q) = (&self.pts[i], &self.pts[i + 1]);
        if x == &p.0 {
            return p.1.clone();
        }
        if x == &q.0 {
            return q.1.clone();
        }
        &p.1 + (x - &p.0) * seg_slope(p, q)
    }

    pub fn apply_inverse(&self, y: &Rational) -> Rational {
        let i = self.segment_for_y(y);
        let (p, q) = (&self.pts[i], &self.pts[i + 1]);
        if y == &p.1 {
            return p.0.clone();
        }
        if y == &q.1 {
            return q.0.clone();
        }
        &p.0 + (y - &p.1) / seg_slope(p, q)
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational, PlError> {
        if x < &int(0) || x > &int(1) {
            return Err(PlError::OutOfDomain(format_rational(x)));
        }
        Ok(self.apply(x))
    }

    pub fn invert(&self) -> PLMap {
        let mut pts: Vec<(Rational, Rational)> =
            self.pts.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        if self.orientation == -1 {
            pts.reverse();
        }
        PLMap {
            n: self.n,
            orientation: self.orientation,
            pts,
        }
    }

    /// Slope of the segment starting at breakpoint i.
    pub fn segment_slope(&self, i: usize) -> Rational {
        seg_slope(&self.pts[i], &self.pts[i + 1])
    }

    pub fn slope_right_at(&self, x: &Rational) -> Rational {
        let mut i = self.segment_for_x(x);
        if i == self.pts.len() - 1 {
            i -= 1;
        }
        if &self.pts[i + 1].0 == x && i + 2 < self.pts.len() {
            i += 1;
        }
        self.segment_slope(i)
    }

    pub fn slope_left_at(&self, x: &Rational) -> Rational {
        let mut i = self.segment_for_x(x);
        if &self.pts[i].0 == x && i > 0 {
            i -= 1;
        }
        if i == self.pts.len() - 1 {
            i -= 1;
        }
        self.segment_slope(i)
    }

    pub fn chi0(&self) -> Result<i64, PlError> {
        if self.orientation != 1 {
            return Err(PlError::UndefinedCharacter);
        }
        Ok(log_n(&self.segment_slope(0), self.n).expect("validated slope"))
    }

    pub fn chi1(&self) -> Result<i64, PlError> {
        if self.orientation != 1 {
            return Err(PlError::UndefinedCharacter);
        }
        let last = self.pts.len() - 2;
        Ok(log_n(&self.segment_slope(last), self.n).expect("validated slope"))
    }

    pub fn epsilon(&self) -> i8 {
        self.orientation
    }

    pub fn fixed_set(&self) -> FixedSet {
        let mut comps: Vec<(Rational, Rational)> = Vec::new();
        for i in 0..self.pts.len() - 1 {
            let (p, q) = (&self.pts[i], &self.pts[i + 1]);
            let s = seg_slope(p, q);
            let c = &p.1 - &s * &p.0;
            if s.is_one() {
                if c.is_zero() {
                    comps.push((p.0.clone(), q.0.clone()));
                }
            } else {
                let x = &c / (int(1) - &s);
                if x >= p.0 && x <= q.0 {
                    comps.push((x.clone(), x));
                }
            }
        }
        comps.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (a, b) in comps {
            if let Some(last) = merged.last_mut() {
                if a <= last.1 {
                    if b > last.1 {
                        last.1 = b;
                    }
                    continue;
                }
            }
            merged.push((a, b));
        }
        let mut fs = FixedSet::default();
        for (a, b) in merged {
            if a == b {
                fs.points.push(a);
            } else {
                fs.intervals.push((a, b));
            }
        }
        fs
    }

    /// Maximal open intervals on which x.g ≠ x.
    pub fn support(&self) -> Vec<(Rational, Rational)> {
        let fs = self.fixed_set();
        let mut comps: Vec<(Rational, Rational)> = fs
            .points
            .iter()
            .map(|p| (p.clone(), p.clone()))
            .chain(fs.intervals.iter().cloned())
            .collect();
        comps.sort();
        let mut out = Vec::new();
        let mut cursor = int(0);
        let mut started = false;
        for (a, b) in comps {
            if started && a > cursor {
                out.push((cursor.clone(), a.clone()));
            } else if !started && a > int(0) {
                out.push((int(0), a.clone()));
            }
            started = true;
            cursor = b;
        }
        if !started {
            out.push((int(0), int(1)));
        } else if cursor < int(1) {
            out.push((cursor, int(1)));
        }
        out
    }

    /// Largest e such that g is the identity on [0, e].
    pub fn identity_prefix(&self) -> Rational {
        if self.orientation == 1 && self.pts[1].1 == self.pts[1].0 {
            self.pts[1].0.clone()
        } else {
            int(0)
        }
    }

    /// Smallest e such that g is the identity on [e, 1].
    pub fn identity_suffix(&self) -> Rational {
        let k = self.pts.len() - 2;
        if self.orientation == 1 && self.pts[k].1 == self.pts[k].0 {
            self.pts[k].0.clone()
        } else {
            int(1)
        }
    }

    /// g is the identity on [a, b].
    pub fn fixes_interval(&self, a: &Rational, b: &Rational) -> bool {
        if self.orientation != 1 {
            return false;
        }
        if a == b {
            return &self.apply(a) == a;
        }
        let i = self.segment_for_x(a);
        let mut j = i;
        while j + 1 < self.pts.len() && &self.pts[j].0 < b {
            let (p, q) = (&self.pts[j], &self.pts[j + 1]);
            if p.0 != p.1 || q.0 != q.1 {
                return false;
            }
            j += 1;
        }
        true
    }

    /// t lies in the interior of the fixed set.
    pub fn fixes_neighborhood(&self, t: &Rational) -> bool {
        if self.orientation != 1 {
            return false;
        }
        self.fixed_set()
            .intervals
            .iter()
            .any(|(a, b)| (a < t && t < b) || (t == a && a.is_zero()) || (t == b && b.is_one()))
    }

    /// Equals g on [0, t] and the identity on [t, 1]. Requires t.g = t.
    pub fn restrict_below(&self, t: &Rational) -> PLMap {
        debug_assert_eq!(&self.apply(t), t);
        let mut pts: Vec<(Rational, Rational)> = self
            .pts
            .iter()
            .filter(|(x, _)| x < t)
            .cloned()
            .collect();
        pts.push((t.clone(), t.clone()));
        if !t.is_one() {
            pts.push((int(1), int(1)));
        }
        PLMap::raw(self.n, pts)
    }

    fn check_base(&self, other: &PLMap) -> Result<(), PlError> {
        if self.n != other.n {
            Err(PlError::BaseMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }
}

/// x ↦ (x.g).h in canonical form.
pub fn compose(g: &PLMap, h: &PLMap) -> Result<PLMap, PlError> {
    g.check_base(h)?;
    Ok(compose_unchecked(g, h))
}

pub(crate) fn compose_unchecked(g: &PLMap, h: &PLMap) -> PLMap {
    let mut xs: Vec<Rational> = g.pts.iter().map(|(x, _)| x.clone()).collect();
    for (hx, _) in &h.pts[1..h.pts.len() - 1] {
        xs.push(g.apply_inverse(hx));
    }
    xs.sort();
    xs.dedup();
    let pts = xs
        .into_iter()
        .map(|x| {
            let y = h.apply(&g.apply(&x));
            (x, y)
        })
        .collect();
    PLMap {
        n: g.n,
        orientation: g.orientation * h.orientation,
        pts: canonicalize(pts),
    }
}

/// Product of a word, left to right.
pub fn product<'a>(n: u32, word: impl IntoIterator<Item = &'a PLMap>) -> PLMap {
    word.into_iter()
        .fold(PLMap::identity(n), |acc, g| compose_unchecked(&acc, g))
}

/// g^h = h⁻¹gh.
pub fn conj(g: &PLMap, h: &PLMap) -> PLMap {
    compose_unchecked(&compose_unchecked(&h.invert(), g), h)
}

/// [g,h] = g⁻¹h⁻¹gh.
pub fn commutator(g: &PLMap, h: &PLMap) -> PLMap {
    product(g.n, [&g.invert(), &h.invert(), g, h])
}

pub fn power(g: &PLMap, k: i64) -> PLMap {
    let base = if k < 0 { g.invert() } else { g.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = PLMap::identity(g.n);
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = compose_unchecked(&acc, &sq);
        }
        e >>= 1;
        if e > 0 {
            sq = compose_unchecked(&sq, &sq);
        }
    }
    acc
}

pub fn invert(g: &PLMap) -> PLMap {
    g.invert()
}

pub fn evaluate(g: &PLMap, x: &Rational) -> Result<Rational, PlError> {
    g.evaluate(x)
}

pub fn canonical_form(g: &PLMap) -> PLMap {
    PLMap {
        n: g.n,
        orientation: g.orientation,
        pts: canonicalize(g.pts.clone()),
    }
}

/// Fixed points of a PL map: isolated points and closed intervals, sorted and disjoint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedSet {
    #[serde(with = "exactnum::rational_text_vec")]
    pub points: Vec<Rational>,
    #[serde(with = "exactnum::rational_text_pairs")]
    pub intervals: Vec<(Rational, Rational)>,
}

impl FixedSet {
    pub fn contains(&self, t: &Rational) -> bool {
        self.points.contains(t) || self.intervals.iter().any(|(a, b)| a <= t && t <= b)
    }

    pub fn contains_interval(&self, a: &Rational, b: &Rational) -> bool {
        self.intervals.iter().any(|(c, d)| c <= a && b <= d) || (a == b && self.contains(a))
    }
}

pub fn make_bump(n: u32) -> PLMap {
    let nn = n as i64;
    PLMap::from_breakpoints(
        n,
        1,
        vec![
            (int(0), int(0)),
            (rat(1, nn * nn), rat(1, nn)),
            (rat(nn - 1, nn), rat(nn * nn - 1, nn * nn)),
            (int(1), int(1)),
        ],
    )
    .expect("bump is valid")
}

/// Conjugates g by the affine map [0,1] → [l,r]; r − l must be a power of n.
pub fn transplant(g: &PLMap, l: &Rational, r: &Rational) -> Result<PLMap, PlError> {
    let n = g.n;
    let bad = |msg: &str| PlError::BadInterval(format_rational(l), format_rational(r), msg.into());
    if is_nadic(l, n)?.is_none() || is_nadic(r, n)?.is_none() {
        return Err(bad("endpoints are not n-adic"));
    }
    if !(l >= &int(0) && l < r && r <= &int(1)) {
        return Err(bad("not a subinterval of [0,1]"));
    }
    let len = r - l;
    if log_n(&len, n).is_none() {
        return Err(bad("length is not a power of n"));
    }
    if g.orientation != 1 {
        return Err(bad("only orientation-preserving maps can be transplanted"));
    }
    let mut pts = Vec::new();
    if l > &int(0) {
        pts.push((int(0), int(0)));
    }
    for (x, y) in &g.pts {
        pts.push((l + &len * x, l + &len * y));
    }
    if r < &int(1) {
        pts.push((int(1), int(1)));
    }
    PLMap::from_breakpoints(n, 1, pts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorTuple {
    pub n: u32,
    pub maps: Vec<PLMap>,
    #[serde(with = "exactnum::rational_text_pairs")]
    pub supports: Vec<(Rational, Rational)>,
}

impl GeneratorTuple {
    pub fn a(&self, i: usize) -> &PLMap {
        &self.maps[i]
    }

    /// Checks every tuple invariant; returns the list of violations.
    pub fn violations(&self) -> Vec<String> {
        let n = self.n as usize;
        let mut out = Vec::new();
        if self.maps.len() != n || self.supports.len() != n {
            out.push(format!("expected {} generators", n));
            return out;
        }
        for (i, (g, (l, r))) in self.maps.iter().zip(&self.supports).enumerate() {
            let supp = g.support();
            if supp != vec![(l.clone(), r.clone())] {
                out.push(format!("a_{} support {:?} is not exactly I_{}", i, supp, i));
            }
            if i > 0 && self.supports[i - 1].1 >= *l {
                out.push(format!("r_{} < l_{} fails", i - 1, i));
            }
        }
        if !self.supports[0].0.is_zero() {
            out.push("l_0 != 0".into());
        }
        if !self.supports[n - 1].1.is_one() {
            out.push("r_{n-1} != 1".into());
        }
        if self.maps[0].chi0() != Ok(1) {
            out.push("chi0(a_0) != 1".into());
        }
        if self.maps[n - 1].chi1() != Ok(1) {
            out.push("chi1(a_{n-1}) != 1".into());
        }
        for i in 0..n {
            for j in i + 1..n {
                let ab = compose_unchecked(&self.maps[i], &self.maps[j]);
                let ba = compose_unchecked(&self.maps[j], &self.maps[i]);
                if ab != ba {
                    out.push(format!("a_{} and a_{} do not commute", i, j));
                }
            }
        }
        out
    }
}

/// Default one-bump generators a_0, …, a_{n−1} with pairwise separated supports.
pub fn standard_generators(n: u32) -> Result<GeneratorTuple, PlError> {
    exactnum::check_base(n)?;
    let nn = n as i64;
    let bump = make_bump(n);
    let mut supports = vec![(int(0), rat(1, nn))];
    for i in 1..nn - 1 {
        supports.push((rat(nn + 2 * i - 1, nn * nn), rat(nn + 2 * i, nn * nn)));
    }
    supports.push((rat(nn * nn - 1, nn * nn), int(1)));
    let mut maps = Vec::new();
    for (i, (l, r)) in supports.iter().enumerate() {
        let g = if i as i64 == nn - 1 {
            transplant(&bump.invert(), l, r)?
        } else {
            transplant(&bump, l, r)?
        };
        maps.push(g);
    }
    Ok(GeneratorTuple { n, maps, supports })
}

/// t.a^k.
pub fn orbit_point(t: &Rational, k: i64, a: &PLMap) -> Rational {
    let mut x = t.clone();
    if k >= 0 {
        for _ in 0..k {
            x = a.apply(&x);
        }
    } else {
        for _ in 0..(-k) {
            x = a.apply_inverse(&x);
        }
    }
    x
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FixClass {
    NAry,
    RationalNonNAry { order: u64 },
    /// Documented for symmetry; irrational points are not representable inputs.
    IrrationalNotRepresentable,
}

pub fn fix_classification(t: &Rational, n: u32) -> Result<FixClass, PlError> {
    if !(t > &int(0) && t < &int(1)) {
        return Err(PlError::OutOfDomain(format_rational(t)));
    }
    if is_nadic(t, n)?.is_some() {
        return Ok(FixClass::NAry);
    }
    let (qp, _) = exactnum::coprime_part(t.denom().magnitude(), n);
    let order = exactnum::mult_order(n as u64, &qp)?;
    Ok(FixClass::RationalNonNAry { order })
}

/// Residue of an n-adic length in Z[1/n] / (n−1)Z[1/n] ≅ Z/(n−1).
fn length_class(len: &Rational, n: u32) -> BigInt {
    let na = is_nadic(len, n).ok().flatten().expect("n-adic length");
    na.mantissa().mod_floor(&BigInt::from(n - 1))
}

fn max_exponent(vals: &[&Rational], n: u32) -> u32 {
    vals.iter()
        .map(|v| is_nadic(v, n).ok().flatten().expect("n-adic").exponent())
        .max()
        .unwrap_or(0)
}

/// Breakpoints of a PL map [a,b] → [c,d] with slopes in n^Z, or None when the
/// lengths lie in different classes mod (n−1).
pub fn pl_interval_map(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    n: u32,
) -> Option<Vec<(Rational, Rational)>> {
    let l1 = b - a;
    let l2 = d - c;
    if n > 2 && length_class(&l1, n) != length_class(&l2, n) {
        return None;
    }
    let j = max_exponent(&[a, b, c, d], n);
    let bn = BigInt::from(n);
    let scale = Rational::from_integer(bn.pow(j));
    let mut c1 = (&l1 * &scale).to_integer();
    let mut c2 = (&l2 * &scale).to_integer();
    let (mut j1, mut j2) = (j as i64, j as i64);
    while &c1 * &bn <= c2 {
        c1 *= &bn;
        j1 += 1;
    }
    while &c2 * &bn <= c1 {
        c2 *= &bn;
        j2 += 1;
    }
    let step1 = pow_n(n, -j1);
    let step2 = pow_n(n, -j2);
    let mut pts = vec![(a.clone(), c.clone())];
    let nm1 = BigInt::from(n - 1);
    if c1 < c2 {
        let k = (&c2 - &c1) / &nm1;
        if !k.is_zero() {
            let kr = Rational::from_integer(k);
            pts.push((
                a + &kr * &step1,
                c + &kr * Rational::from_integer(bn.clone()) * &step2,
            ));
        }
    } else if c2 < c1 {
        let k = (&c1 - &c2) / &nm1;
        if !k.is_zero() {
            let kr = Rational::from_integer(k);
            pts.push((
                a + &kr * Rational::from_integer(bn.clone()) * &step1,
                c + &kr * &step2,
            ));
        }
    }
    pts.push((b.clone(), d.clone()));
    Some(pts)
}

/// The PL map through the given n-adic control points, including (0,0) and (1,1).
pub fn pl_through(n: u32, ctrl: &[(Rational, Rational)]) -> Result<PLMap, PlError> {
    let mut pts: Vec<(Rational, Rational)> = Vec::new();
    for (i, w) in ctrl.windows(2).enumerate() {
        let (p, q) = (&w[0], &w[1]);
        if p.0 >= q.0 || p.1 >= q.1 {
            return Err(PlError::Invalid {
                index: i + 1,
                msg: "control points not increasing".into(),
            });
        }
        for v in [&p.0, &p.1, &q.0, &q.1] {
            if is_nadic(v, n)?.is_none() {
                return Err(PlError::Invalid {
                    index: i,
                    msg: format!("control point {} is not n-adic", format_rational(v)),
                });
            }
        }
        let seg = pl_interval_map(&p.0, &q.0, &p.1, &q.1, n).ok_or_else(|| {
            PlError::LengthClass(format!(
                "[{}, {}] -> [{}, {}]",
                format_rational(&p.0),
                format_rational(&q.0),
                format_rational(&p.1),
                format_rational(&q.1)
            ))
        })?;
        if pts.is_empty() {
            pts.extend(seg);
        } else {
            pts.extend(seg.into_iter().skip(1));
        }
    }
    PLMap::from_breakpoints(n, 1, pts)
}

/// Shifts the target q by a tiny n-adic so that [u,p] → [u,q] has matching length class.
pub fn adjust_target(u: &Rational, p: &Rational, q: &Rational, n: u32, e: u32) -> Rational {
    if n == 2 {
        return q.clone();
    }
    let want = length_class(&(p - u), n);
    let have = length_class(&(q - u), n);
    let m = BigInt::from(n - 1);
    let delta = (want - have).mod_floor(&m);
    q + Rational::new(delta, BigInt::from(n).pow(e))
}

fn small_exponent(n: u32, room: &Rational, pts: &[&Rational]) -> u32 {
    let mut e = max_exponent(pts, n) + 1;
    while pow_n(n, -(e as i64)) * int(n as i64) >= *room {
        e += 1;
    }
    e
}

/// F_n element supported in [lo, hi] that sends p close to w. For n > 2 the target is
/// nudged into the length class forced by the slopes; the actual image is returned.
pub fn point_mover(
    n: u32,
    lo: &Rational,
    hi: &Rational,
    p: &Rational,
    w: &Rational,
) -> Result<(PLMap, Rational), PlError> {
    if !(lo < p && p < hi && lo < w && w < hi) {
        return Err(PlError::BadWindow(format!(
            "need {} < {}, {} < {}",
            format_rational(lo),
            format_rational(p),
            format_rational(w),
            format_rational(hi)
        )));
    }
    for v in [lo, hi, p, w] {
        if is_nadic(v, n)?.is_none() {
            return Err(PlError::BadWindow(format!("{} is not n-adic", format_rational(v))));
        }
    }
    let room = std::cmp::min(w - lo, hi - w) / int(2);
    let e = small_exponent(n, &room, &[lo, hi, p, w]);
    let w2 = adjust_target(lo, p, w, n, e);
    let mut ctrl = vec![];
    if lo > &int(0) {
        ctrl.push((int(0), int(0)));
    }
    ctrl.push((lo.clone(), lo.clone()));
    ctrl.push((p.clone(), w2.clone()));
    ctrl.push((hi.clone(), hi.clone()));
    if hi < &int(1) {
        ctrl.push((int(1), int(1)));
    }
    Ok((pl_through(n, &ctrl)?, w2))
}

/// Window above r = 1/n and clear of every standard generator support.
pub fn default_shadow(n: u32) -> (Rational, Rational) {
    let nn = n as i64;
    (rat(nn - 1, nn), rat(nn * nn - 1, nn * nn))
}

/// b · (b^x)⁻¹ = [b⁻¹, x] where x carries [lo, hi] into (c, d): an element of F_n' that
/// agrees with b on [lo, hi]. Requires supp(b) ⊆ [lo, hi] and (c, d) disjoint from it.
/// For n = 2 a compactly supported b already lies in F_2' and is returned unchanged.
pub fn shadow_commutator(
    b: &PLMap,
    lo: &Rational,
    hi: &Rational,
    c: &Rational,
    d: &Rational,
) -> Result<PLMap, PlError> {
    let n = b.n;
    if b.is_identity() {
        return Ok(b.clone());
    }
    if n == 2 && b.chi0()? == 0 && b.chi1()? == 0 {
        return Ok(b.clone());
    }
    if !(d <= lo || c >= hi) || c >= d {
        return Err(PlError::BadWindow("shadow window overlaps the support".into()));
    }
    let len = hi - lo;
    let room = (d - c) / int(4);
    let mut m = 0i64;
    while &len * pow_n(n, -m) >= room {
        m += 1;
    }
    let e = small_exponent(n, &room, &[lo, hi, c, d]);
    let c0 = nadic_above(c, n, e, false);
    let c1 = adjust_target(&int(0), lo, &c0, n, e + 1);
    let d1 = &c1 + &len * pow_n(n, -m);
    let x = pl_through(
        n,
        &[
            (int(0), int(0)),
            (lo.clone(), c1.clone()),
            (hi.clone(), d1),
            (int(1), int(1)),
        ],
    )?;
    Ok(compose_unchecked(b, &conj(b, &x).invert()))
}

/// g with g(t) = t, slope n^o at t, support inside (u,v) and χ0 = χ1 = 0.
pub fn rational_slope_fix_element(
    t: &Rational,
    window: (&Rational, &Rational),
    n: u32,
) -> Result<PLMap, PlError> {
    let (u, v) = window;
    let order = match fix_classification(t, n)? {
        FixClass::NAry => return Err(PlError::NAryPoint(format_rational(t))),
        FixClass::RationalNonNAry { order } => order,
        FixClass::IrrationalNotRepresentable => unreachable!(),
    };
    if is_nadic(u, n)?.is_none() || is_nadic(v, n)?.is_none() {
        return Err(PlError::BadWindow("window endpoints must be n-adic".into()));
    }
    if !(u > &int(0) && u < t && t < v && v < &int(1)) {
        return Err(PlError::BadWindow(format!(
            "need 0 < {} < {} < {} < 1",
            format_rational(u),
            format_rational(t),
            format_rational(v)
        )));
    }
    let no = pow_n(n, order as i64);
    // t = n^o t − y
    let y = (&no - int(1)) * t;
    debug_assert!(is_nadic(&y, n).unwrap().is_some());
    let f = |x: &Rational| &no * x - &y;
    for e in 1..=96u32 {
        let w1 = nadic_below(t, n, e, false);
        let w2 = nadic_above(t, n, e, false);
        let (f1, f2) = (f(&w1), f(&w2));
        if !(&w1 > u && &f1 > u && &w2 < v && &f2 < v) {
            continue;
        }
        let ctrl = vec![
            (int(0), int(0)),
            (u.clone(), u.clone()),
            (w1.clone(), f1.clone()),
            (w2.clone(), f2.clone()),
            (v.clone(), v.clone()),
            (int(1), int(1)),
        ];
        return match pl_through(n, &ctrl) {
            Ok(g) => Ok(g),
            Err(PlError::LengthClass(_)) => Err(PlError::ClosingSearchExhausted(format!(
                "the class of (n^o - 1) w - y mod {} is nonzero for every n-adic w, so no \
                 closing segments exist (t = {}, o = {})",
                n - 1,
                format_rational(t),
                order
            ))),
            Err(e) => Err(e),
        };
    }
    Err(PlError::ClosingSearchExhausted(
        "no n-adic subwindow found within exponent 96".into(),
    ))
}

/// g^α with α: x ↦ 1 − x.
pub fn alpha_conjugate(g: &PLMap) -> PLMap {
    let mut pts: Vec<(Rational, Rational)> = g
        .pts
        .iter()
        .map(|(x, y)| (int(1) - x, int(1) - y))
        .collect();
    pts.reverse();
    PLMap {
        n: g.n,
        orientation: g.orientation,
        pts,
    }
}

pub fn epsilon(g: &PLMap) -> i8 {
    g.orientation
}

/// An n-adic interval of length n^{-j} inside the open interval (l, r), chosen at random.
pub fn random_nadic_window<R: Rng>(
    rng: &mut R,
    n: u32,
    l: &Rational,
    r: &Rational,
    extra_depth: u32,
) -> (Rational, Rational) {
    assert!(l < r);
    let width = r - l;
    let mut j = 0u32;
    while pow_n(n, -(j as i64)) * int(3) > width {
        j += 1;
    }
    j += rng.gen_range(0..=extra_depth);
    let step = pow_n(n, -(j as i64));
    let lo = nadic_above(l, n, j, false);
    let hi_start = nadic_below(r, n, j, false) - &step;
    let slots = ((&hi_start - &lo) / &step).to_integer();
    let slots: i64 = slots.try_into().unwrap_or(i64::MAX).clamp(0, 1 << 40);
    let m = rng.gen_range(0..=slots);
    let a = lo + &step * int(m);
    let b = &a + &step;
    (a, b)
}

fn random_bump_in<R: Rng>(rng: &mut R, n: u32, l: &Rational, r: &Rational) -> PLMap {
    let (a, b) = random_nadic_window(rng, n, l, r, 2);
    let bump = make_bump(n);
    let g = transplant(&bump, &a, &b).expect("n-adic window of power length");
    if rng.gen_bool(0.5) {
        g.invert()
    } else {
        g
    }
}

/// Word of `len` random bumps supported in (l, r).
pub fn random_word_in<R: Rng>(rng: &mut R, n: u32, l: &Rational, r: &Rational, len: usize) -> PLMap {
    let word: Vec<PLMap> = (0..len).map(|_| random_bump_in(rng, n, l, r)).collect();
    product(n, word.iter())
}

/// Random element of F_n': a nontrivial commutator of words supported in (l, r).
pub fn window_commutator<R: Rng>(
    rng: &mut R,
    n: u32,
    l: &Rational,
    r: &Rational,
    complexity: usize,
) -> PLMap {
    let complexity = complexity.max(1);
    for _ in 0..8 {
        let g = random_word_in(rng, n, l, r, complexity);
        let h = random_word_in(rng, n, l, r, complexity);
        let c = commutator(&g, &h);
        if !c.is_identity() {
            return c;
        }
    }
    // overlapping bumps never commute
    let (a, b) = random_nadic_window(rng, n, l, r, 0);
    let len = &b - &a;
    let step = &len / int(n as i64);
    let bump = make_bump(n);
    let g = transplant(&bump, &a, &b).expect("window");
    let a2 = &a + &step * int((n as i64 - 1).max(1)) - &step / int(n as i64);
    let h = transplant(&bump, &a2, &(&a2 + &step)).expect("subwindow");
    commutator(&g, &h)
}

/// F_n' element supported in (l, r) that moves t, for l < t < r.
pub fn commutator_mover(n: u32, l: &Rational, r: &Rational, t: &Rational) -> PLMap {
    assert!(l < t && t < r);
    let bump = make_bump(n);
    // b0 is a bump on a window of length n^-j around t, c a bump on a much smaller
    // window J ∋ t with J.b0 ∩ J = ∅, so [b0, c] = (c⁻¹)^{b0}·c moves t.
    for j in 1u32..256 {
        let (a0, a1) = window_around(t, n, j);
        if &a0 <= l || &a1 >= r {
            continue;
        }
        let b0 = transplant(&bump, &a0, &a1).expect("window");
        for k in j + 1..j + 64 {
            let (ca, cb) = window_around(t, n, k);
            let disjoint = b0.apply(&ca) >= cb || b0.apply(&cb) <= ca;
            if disjoint {
                let c = transplant(&bump, &ca, &cb).expect("window");
                let g = commutator(&b0, &c);
                if &g.apply(t) != t {
                    return g;
                }
            }
        }
    }
    panic!("no window found");
}

/// A window of length n^-k holding t in its interior.
fn window_around(t: &Rational, n: u32, k: u32) -> (Rational, Rational) {
    let s = pow_n(n, -(k as i64));
    let mut lo = nadic_below(t, n, k, false);
    if &(&lo + &s) == t {
        lo = t - &s / int(n as i64);
    }
    let hi = &lo + &s;
    (lo, hi)
}

/// Random generator-style element of F_n: standard generators and bumps on n-adic windows.
pub fn random_element<R: Rng>(rng: &mut R, n: u32, len: usize) -> PLMap {
    let gens = standard_generators(n).expect("n >= 2");
    let mut word = Vec::with_capacity(len);
    for _ in 0..len {
        let g = if rng.gen_bool(0.5) {
            gens.maps[rng.gen_range(0..n as usize)].clone()
        } else {
            random_bump_in(rng, n, &int(0), &int(1))
        };
        word.push(if rng.gen_bool(0.5) { g.invert() } else { g });
    }
    product(n, word.iter())
}

/// [g, h] for random words g, h of the given length; deterministic per seed.
pub fn random_commutator(seed: u64, complexity: usize, n: u32) -> PLMap {
    if complexity == 0 {
        return PLMap::identity(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_element(&mut rng, n, complexity);
    let h = random_element(&mut rng, n, complexity);
    commutator(&g, &h)
}

/// Element of F_n±: a random element, times α half of the time.
pub fn random_signed_element<R: Rng>(rng: &mut R, n: u32, len: usize) -> PLMap {
    let g = random_element(rng, n, len);
    if rng.gen_bool(0.5) {
        compose_unchecked(&g, &PLMap::alpha(n))
    } else {
        g
    }
}

impl PartialOrd for PLMap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PLMap {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.orientation, &self.pts).cmp(&(other.n, other.orientation, &other.pts))
    }
}

pub fn biguint(x: u64) -> BigUint {
    BigUint::from(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gens2() -> GeneratorTuple {
        standard_generators(2).unwrap()
    }

    #[test]
    fn point_mover_and_shadow() {
        for n in 2..=5u32 {
            let nn = n as i64;
            let (lo, hi) = (rat(1, nn * nn * nn), rat(1, nn * nn));
            let p = exactnum::simplest_nadic_between(&lo, &hi, n);
            let w = exactnum::simplest_nadic_between(&lo, &p, n);
            let (b, img) = point_mover(n, &lo, &hi, &p, &w).unwrap();
            assert_eq!(b.apply(&p), img);
            assert!(lo < img && img < p);
            assert!(b.fixes_interval(&int(0), &lo) && b.fixes_interval(&hi, &int(1)));
            let (c, d) = default_shadow(n);
            let s = shadow_commutator(&b, &lo, &hi, &c, &d).unwrap();
            assert_eq!(s.chi0().unwrap(), 0);
            assert_eq!(s.chi1().unwrap(), 0);
            assert_eq!(s.apply(&p), img);
            for k in 0..=8 {
                let x = &lo + (&hi - &lo) * rat(k, 8);
                assert_eq!(s.apply(&x), b.apply(&x));
            }
            assert!(s.identity_prefix() > int(0));
        }
    }

    #[test]
    fn bump_n2_breakpoints() {
        let b = make_bump(2);
        assert_eq!(
            b.points().to_vec(),
            vec![
                (int(0), int(0)),
                (rat(1, 4), rat(1, 2)),
                (rat(1, 2), rat(3, 4)),
                (int(1), int(1))
            ]
        );
        assert_eq!(b.evaluate(&rat(1, 8)).unwrap(), rat(1, 4));
        assert_eq!(b.chi0().unwrap(), 1);
        assert_eq!(b.chi1().unwrap(), -1);
        assert_eq!(b.support(), vec![(int(0), int(1))]);
        let bb = compose(&b, &b).unwrap();
        assert_eq!(bb.evaluate(&rat(1, 16)).unwrap(), rat(1, 4));
    }

    #[test]
    fn invert_reflects_pairs() {
        let b = make_bump(3);
        let inv = b.invert();
        let expect: Vec<_> = b.points().iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        assert_eq!(inv.points().to_vec(), expect);
        assert!(compose(&b, &inv).unwrap().is_identity());
    }

    #[test]
    fn alpha_squared_is_identity() {
        let a = PLMap::alpha(2);
        assert!(compose(&a, &a).unwrap().is_identity());
        assert_eq!(a.epsilon(), -1);
        assert_eq!(a.chi0(), Err(PlError::UndefinedCharacter));
        assert!(alpha_conjugate(&PLMap::identity(2)).is_identity());
    }

    #[test]
    fn alpha_conjugate_matches_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_element(&mut rng, 2, 4);
            let a = PLMap::alpha(2);
            let direct = alpha_conjugate(&g);
            assert_eq!(direct, product(2, [&a, &g, &a]));
            assert_eq!(direct.chi0().unwrap(), g.chi1().unwrap());
        }
    }

    #[test]
    fn evaluate_endpoints_and_domain() {
        let g = gens2().maps[0].clone();
        assert_eq!(g.evaluate(&int(0)).unwrap(), int(0));
        assert_eq!(g.evaluate(&int(1)).unwrap(), int(1));
        assert!(matches!(g.evaluate(&rat(3, 2)), Err(PlError::OutOfDomain(_))));
        assert_eq!(PLMap::identity(2).evaluate(&rat(1, 3)).unwrap(), rat(1, 3));
    }

    #[test]
    fn generators_n2() {
        let g = gens2();
        assert_eq!(g.supports, vec![(int(0), rat(1, 2)), (rat(3, 4), int(1))]);
        assert!(g.violations().is_empty(), "{:?}", g.violations());
        assert_eq!(g.maps[0].chi0().unwrap(), 1);
        assert_eq!(g.maps[1].chi0().unwrap(), 0);
        assert_eq!(g.maps[0].chi1().unwrap(), 0);
        let fs = g.maps[0].fixed_set();
        assert_eq!(fs.points, vec![int(0)]);
        assert_eq!(fs.intervals, vec![(rat(1, 2), int(1))]);
        assert_eq!(orbit_point(&rat(1, 4), 1, &g.maps[0]), rat(3, 8));
    }

    #[test]
    fn generators_other_bases() {
        for n in 2..=6 {
            let g = standard_generators(n).unwrap();
            assert!(g.violations().is_empty(), "n={n}: {:?}", g.violations());
        }
    }

    #[test]
    fn orbit_increases_to_r() {
        let a = gens2().maps[0].clone();
        let mut prev = rat(1, 4);
        for k in 1..20 {
            let x = orbit_point(&rat(1, 4), k, &a);
            assert!(x > prev && x < rat(1, 2));
            prev = x;
        }
        assert_eq!(orbit_point(&rat(1, 4), 0, &a), rat(1, 4));
        assert_eq!(orbit_point(&orbit_point(&rat(1, 5), 3, &a), -3, &a), rat(1, 5));
    }

    #[test]
    fn transplant_checks() {
        let b = make_bump(2);
        let g = transplant(&b, &int(0), &rat(1, 2)).unwrap();
        assert_eq!(g.chi0().unwrap(), 1);
        assert_eq!(g.support(), vec![(int(0), rat(1, 2))]);
        assert!(matches!(
            transplant(&b, &int(0), &rat(1, 3)),
            Err(PlError::BadInterval(..))
        ));
        assert!(matches!(
            transplant(&b, &int(0), &rat(3, 4)),
            Err(PlError::BadInterval(..))
        ));
    }

    #[test]
    fn fix_classification_examples() {
        assert_eq!(fix_classification(&rat(3, 8), 2).unwrap(), FixClass::NAry);
        assert_eq!(
            fix_classification(&rat(1, 3), 2).unwrap(),
            FixClass::RationalNonNAry { order: 2 }
        );
        assert_eq!(
            fix_classification(&rat(5, 12), 2).unwrap(),
            FixClass::RationalNonNAry { order: 2 }
        );
        assert!(fix_classification(&int(1), 2).is_err());
    }

    #[test]
    fn rational_slope_element_at_one_third() {
        let t = rat(1, 3);
        let g = rational_slope_fix_element(&t, (&rat(1, 4), &rat(1, 2)), 2).unwrap();
        assert_eq!(g.apply(&t), t);
        assert_eq!(g.slope_left_at(&t), int(4));
        assert_eq!(g.slope_right_at(&t), int(4));
        // middle piece y = 4x − 1
        let x = &t + rat(1, 1000);
        assert_eq!(g.apply(&x), int(4) * &x - int(1));
        assert_eq!(g.chi0().unwrap(), 0);
        assert_eq!(g.chi1().unwrap(), 0);
        let fs = g.fixed_set();
        assert!(fs.contains_interval(&int(0), &rat(1, 4)));
        assert!(fs.contains_interval(&rat(1, 2), &int(1)));
        assert!(matches!(
            rational_slope_fix_element(&rat(1, 4), (&rat(1, 8), &rat(1, 2)), 2),
            Err(PlError::NAryPoint(_))
        ));
    }

    #[test]
    fn rational_slope_element_obstruction_is_certified() {
        // n = 3, t = 1/2: (n^o − 1) t = 1 is odd, so the outer pieces cannot close up.
        let r = rational_slope_fix_element(&rat(1, 2), (&rat(1, 3), &rat(2, 3)), 3);
        assert!(matches!(r, Err(PlError::ClosingSearchExhausted(_))));
        // n = 3, t = 1/4: order 2, y = 8/4 = 2 is even, so this one closes.
        let g = rational_slope_fix_element(&rat(1, 4), (&rat(1, 9), &rat(1, 3)), 3).unwrap();
        assert_eq!(g.slope_left_at(&rat(1, 4)), int(9));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = gens2().maps[0].clone();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"breakpoints\":[[\"0/2^0\",\"0/2^0\"],[\"1/2^3\",\"1/2^2\"]"));
        let back: PLMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"n":2,"orientation":1,"breakpoints":[["0/2^0","0/2^0"],["1/2^1","1/2^2"],["1/2^1","3/2^2"],["1/2^0","1/2^0"]]}"#;
        let err = serde_json::from_str::<PLMap>(bad).unwrap_err().to_string();
        assert!(err.contains("breakpoint 2"), "{err}");
        let slope = r#"{"n":2,"orientation":1,"breakpoints":[["0/2^0","0/2^0"],["1/2^1","3/2^2"],["1/2^0","1/2^0"]]}"#;
        let err = serde_json::from_str::<PLMap>(slope).unwrap_err().to_string();
        assert!(err.contains("slope"), "{err}");
    }

    #[test]
    fn pl_interval_maps_close_up() {
        let cases = [
            (rat(0, 1), rat(1, 2), rat(0, 1), rat(1, 4), 2),
            (rat(1, 4), rat(21, 64), rat(1, 4), rat(5, 16), 2),
            (rat(1, 9), rat(2, 9), rat(1, 9), rat(4, 9), 3),
            (rat(0, 1), rat(1, 1), rat(0, 1), rat(1, 27), 3),
        ];
        for (a, b, c, d, n) in cases {
            let pts = pl_interval_map(&a, &b, &c, &d, n).unwrap();
            let mut full = vec![];
            if a > int(0) {
                full.push((int(0), int(0)));
            }
            full.extend(pts);
            assert_eq!(full.last().unwrap(), &(b.clone(), d.clone()));
            for w in full.windows(2) {
                assert!(log_n(&seg_slope(&w[0], &w[1]), n).is_some());
            }
        }
        // lengths 1/9 vs 1/3 in base 3: classes 1 and 1 agree; 1/9 vs 2/9 do not
        assert!(pl_interval_map(&int(0), &rat(1, 9), &int(0), &rat(2, 9), 3).is_none());
    }

    #[test]
    fn commutator_mover_moves() {
        for (l, r, t) in [
            (rat(1, 8), rat(1, 4), rat(1, 5)),
            (rat(0, 1), rat(1, 2), rat(1, 3)),
            (rat(1, 100), rat(1, 90), rat(1, 95)),
        ] {
            let g = commutator_mover(2, &l, &r, &t);
            assert_ne!(g.apply(&t), t);
            for (a, b) in g.support() {
                assert!(a >= l && b <= r);
            }
        }
    }

    #[test]
    fn random_commutator_properties() {
        assert!(random_commutator(1, 0, 2).is_identity());
        for seed in 0..100 {
            let c = random_commutator(seed, 3, 2);
            assert_eq!(c.chi0().unwrap(), 0);
            assert_eq!(c.chi1().unwrap(), 0);
            assert!(c.identity_prefix() > int(0));
            assert!(c.identity_suffix() < int(1));
            assert_eq!(c, random_commutator(seed, 3, 2));
        }
    }

    #[test]
    fn support_and_fixed_set_are_complementary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let g = random_element(&mut rng, 2, 5);
            let fs = g.fixed_set();
            for (a, b) in g.support() {
                let mid = (&a + &b) / int(2);
                assert_ne!(g.apply(&mid), mid);
                assert!(fs.contains(&a) || a.is_zero());
                assert!(fs.contains(&b) || b.is_one());
            }
            for p in &fs.points {
                assert_eq!(&g.apply(p), p);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn group_axioms(seed in 0u64..1_000_000, n in 2u32..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_element(&mut rng, n, 3);
            let g = random_element(&mut rng, n, 3);
            let h = random_element(&mut rng, n, 3);
            let lhs = compose_unchecked(&compose_unchecked(&f, &g), &h);
            let rhs = compose_unchecked(&f, &compose_unchecked(&g, &h));
            prop_assert_eq!(lhs, rhs);
            prop_assert!(compose_unchecked(&f, &f.invert()).is_identity());
            prop_assert_eq!(compose_unchecked(&f, &PLMap::identity(n)), f.clone());
            prop_assert_eq!(canonical_form(&canonical_form(&f)), f.clone());
            let fg = compose_unchecked(&f, &g);
            prop_assert_eq!(fg.chi0().unwrap(), f.chi0().unwrap() + g.chi0().unwrap());
            prop_assert_eq!(fg.chi1().unwrap(), f.chi1().unwrap() + g.chi1().unwrap());
        }

        #[test]
        fn alpha_is_an_involutive_automorphism(seed in 0u64..1_000_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_signed_element(&mut rng, 2, 3);
            let g = random_signed_element(&mut rng, 2, 3);
            prop_assert_eq!(alpha_conjugate(&alpha_conjugate(&f)), f.clone());
            prop_assert_eq!(
                alpha_conjugate(&compose_unchecked(&f, &g)),
                compose_unchecked(&alpha_conjugate(&f), &alpha_conjugate(&g))
            );
            prop_assert_eq!(compose_unchecked(&f, &g).epsilon(), f.epsilon() * g.epsilon());
        }

        #[test]
        fn isolated_fixed_points_are_rational_with_expected_denominators(seed in 0u64..1_000_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_element(&mut rng, 2, 4);
            for p in g.fixed_set().points {
                if p.is_zero() || p.is_one() { continue; }
                let s = g.slope_left_at(&p);
                if let FixClass::RationalNonNAry { order } = fix_classification(&p, 2).unwrap() {
                    let k = log_n(&s, 2).unwrap();
                    prop_assert_eq!(k % order as i64, 0);
                }
            }
        }
    }
}
