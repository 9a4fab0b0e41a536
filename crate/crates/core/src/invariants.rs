//! KR-class vector of `[H_m] − [γ_0]` from the south-pole preimage.
//!
//! The preimage of the south pole under `φ` consists of the fixed points
//! `(x, 0)`, `x ∈ {±1}^k`, with `Σ x_j + m < 0`. The class is
//! `χ Σ (−1)^{#(−1 in x)} x_!`, and `x_!` projects onto the summand labeled
//! by `I ⊆ {1..d}` as the standard generator iff `x_i = +1` for all `i ∈ I`
//! and `|I| ≤ 2`. The global sign `χ` is never resolved.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::bloch::{ensure_gapped, validate_axes, ModelSpec};
use crate::error::{KrError, Result};

/// A fixed point `(x, 0)` of the involution on the torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedPoint {
    coords: Vec<i8>,
}

impl FixedPoint {
    pub fn new(coords: Vec<i8>) -> Self {
        debug_assert!(coords.iter().all(|&c| c == 1 || c == -1));
        Self { coords }
    }

    pub fn coords(&self) -> &[i8] {
        &self.coords
    }

    /// Number of `−1` coordinates.
    pub fn sign_count(&self) -> usize {
        self.coords.iter().filter(|&&c| c == -1).count()
    }

    /// `(−1)^{sign_count}`.
    pub fn orientation(&self) -> i64 {
        if self.sign_count().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    fn from_bits(bits: u32, k: usize) -> Self {
        Self::new((0..k).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
    }
}

/// Subset of `{1..d}` as a bitmask (bit `i−1` for element `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u32);

impl Subset {
    pub fn from_elements(elems: &[usize]) -> Self {
        Subset(elems.iter().fold(0, |acc, &i| acc | 1 << (i - 1)))
    }

    pub fn elements(self) -> Vec<usize> {
        (1..=32).filter(|&i| self.0 >> (i - 1) & 1 == 1).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficient {
    #[serde(rename = "Z")]
    Integer,
    #[serde(rename = "Z2")]
    Mod2,
}

/// Component of a class in the summand labeled by `I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Integer(i64),
    Mod2(u8),
}

/// Interval label `p`: `d − 2p − 2 < m < d − 2p`. It is the largest
/// number of `+1` coordinates a preimage point can have.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalIndex {
    pub d: usize,
    pub p: usize,
}

pub fn interval_index(d: usize, m: f64) -> Result<IntervalIndex> {
    ensure_gapped(d, m)?;
    if m.abs() > d as f64 {
        return Err(KrError::OutOfRange { m, d });
    }
    let p = ((d as f64 - m) / 2.0).floor() as usize;
    Ok(IntervalIndex { d, p })
}

/// Invariant vector: one integer for `I = ∅` and `ℤ/2` entries for
/// `|I| ∈ {1, 2}`; higher components vanish and are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct KRClassVector {
    d: usize,
    m: f64,
    p: Option<usize>,
    strong: i64,
    weak1: Vec<u8>,
    /// Pairs `(i, j)`, `i < j`, in lexicographic order.
    weak2: Vec<u8>,
    coefficient: Coefficient,
}

fn pair_index(d: usize, i: usize, j: usize) -> usize {
    // number of pairs (a, b) with a < i, plus offset of j
    let (i0, j0) = (i - 1, j - 1);
    i0 * d - i0 * (i0 + 1) / 2 + (j0 - i0 - 1)
}

fn pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=d).flat_map(move |i| (i + 1..=d).map(move |j| (i, j)))
}

impl KRClassVector {
    pub fn zero(d: usize, m: f64, p: Option<usize>) -> Self {
        Self {
            d,
            m,
            p,
            strong: 0,
            weak1: vec![0; d],
            weak2: vec![0; d * d.saturating_sub(1) / 2],
            coefficient: Coefficient::Integer,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn p(&self) -> Option<usize> {
        self.p
    }

    pub fn strong(&self) -> i64 {
        self.strong
    }

    pub fn coefficient(&self) -> Coefficient {
        self.coefficient
    }

    /// Entry for `I = {i}`.
    pub fn weak1(&self, i: usize) -> u8 {
        self.weak1[i - 1]
    }

    /// Entry for `I = {i, j}`.
    pub fn weak2(&self, i: usize, j: usize) -> u8 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.weak2[pair_index(self.d, i, j)]
    }

    pub fn component(&self, subset: Subset) -> Component {
        let elems = subset.elements();
        match elems.as_slice() {
            [] => match self.coefficient {
                Coefficient::Integer => Component::Integer(self.strong),
                Coefficient::Mod2 => Component::Mod2(self.strong as u8),
            },
            [i] => Component::Mod2(self.weak1(*i)),
            [i, j] => Component::Mod2(self.weak2(*i, *j)),
            _ => Component::Mod2(0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.strong == 0 && self.weak1.iter().chain(&self.weak2).all(|&w| w == 0)
    }

    /// Same magnitudes and `ℤ/2` entries, ignoring the strong sign.
    pub fn agrees_up_to_sign(&self, other: &Self) -> bool {
        self.d == other.d
            && self.strong.abs() == other.strong.abs()
            && self.weak1 == other.weak1
            && self.weak2 == other.weak2
    }

    /// Re-tags the class with `ℤ/2` coefficients.
    pub fn reduce_mod2(mut self) -> Self {
        self.coefficient = Coefficient::Mod2;
        self.strong = self.strong.rem_euclid(2);
        self
    }

    pub fn to_json(&self) -> KRClassJson {
        KRClassJson {
            d: self.d,
            m: format!("{}", self.m),
            p: self.p,
            strong: self.strong,
            weak1: (1..=self.d).map(|i| (format!("[{i}]"), self.weak1(i))).collect(),
            weak2: pairs(self.d)
                .map(|(i, j)| (format!("[{i},{j}]"), self.weak2(i, j)))
                .collect(),
            coefficient: self.coefficient,
            sign_convention: SIGN_CONVENTION.to_string(),
        }
    }

    pub fn from_json(json: &KRClassJson) -> Result<Self> {
        let bad = |what: &str| KrError::InvalidSpec(format!("class JSON: {what}"));
        let m: f64 = json.m.parse().map_err(|_| bad("m is not a decimal"))?;
        let mut out = Self::zero(json.d, m, json.p);
        out.strong = json.strong;
        out.coefficient = json.coefficient;
        for i in 1..=json.d {
            out.weak1[i - 1] = *json.weak1.get(&format!("[{i}]")).ok_or_else(|| bad("weak1"))?;
        }
        for (i, j) in pairs(json.d) {
            out.weak2[pair_index(json.d, i, j)] =
                *json.weak2.get(&format!("[{i},{j}]")).ok_or_else(|| bad("weak2"))?;
        }
        if out.weak1.iter().chain(&out.weak2).any(|&w| w > 1) {
            return Err(bad("weak entries must be 0 or 1"));
        }
        Ok(out)
    }
}

pub const SIGN_CONVENTION: &str = "chi-undetermined";

/// Wire format of [`KRClassVector`]; reals are decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRClassJson {
    pub d: usize,
    pub m: String,
    pub p: Option<usize>,
    pub strong: i64,
    pub weak1: IndexMap<String, u8>,
    pub weak2: IndexMap<String, u8>,
    pub coefficient: Coefficient,
    pub sign_convention: String,
}

impl fmt::Display for KRClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p.map_or("-".to_string(), |p| p.to_string());
        writeln!(f, "d = {}, m = {}, p = {}", self.d, self.m, p)?;
        let coeff = match self.coefficient {
            Coefficient::Integer => "Z",
            Coefficient::Mod2 => "Z/2",
        };
        writeln!(f, "I = {{}}       strong  {:>4}  ({coeff}, sign up to chi)", self.strong)?;
        for i in 1..=self.d {
            writeln!(f, "I = {{{i}}}      weak    {:>4}", self.weak1(i))?;
        }
        for (i, j) in pairs(self.d) {
            writeln!(f, "I = {{{i},{j}}}    weak    {:>4}", self.weak2(i, j))?;
        }
        Ok(())
    }
}

/// Fixed points `x ∈ {±1}^k` with `Σx + m < 0`, over the active axes.
pub fn preimage_of_south(spec: &ModelSpec) -> Result<Vec<FixedPoint>> {
    let k = spec.k();
    ensure_gapped(k, spec.m())?;
    Ok((0..1u32 << k)
        .map(|bits| FixedPoint::from_bits(bits, k))
        .filter(|x| x.coords.iter().map(|&c| c as f64).sum::<f64>() + spec.m() < 0.0)
        .collect())
}

fn interval_label(k: usize, m: f64) -> Option<usize> {
    interval_index(k, m).ok().map(|ix| ix.p)
}

/// Enumerated class on the full torus of `spec`; axes outside `spec.axes()`
/// carry zero components.
pub fn kr_class(spec: &ModelSpec) -> Result<KRClassVector> {
    let points = preimage_of_south(spec)?;
    let (d, axes) = (spec.d(), spec.axes());
    let mut out = KRClassVector::zero(d, spec.m(), interval_label(spec.k(), spec.m()));
    out.strong = points.iter().map(FixedPoint::orientation).sum();
    for (a, &i) in axes.iter().enumerate() {
        let count = points.iter().filter(|x| x.coords[a] == 1).count();
        out.weak1[i - 1] = (count % 2) as u8;
        for (b, &j) in axes.iter().enumerate().skip(a + 1) {
            let count = points
                .iter()
                .filter(|x| x.coords[a] == 1 && x.coords[b] == 1)
                .count();
            out.weak2[pair_index(d, i, j)] = (count % 2) as u8;
        }
    }
    if spec.extra_b() > 0 {
        out = out.reduce_mod2();
    }
    Ok(out)
}

/// Binomial coefficient, extended to negative upper index by
/// `C(n, k) = (−1)^k C(k − n − 1, k)`; zero for `k < 0`.
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 {
        return 0;
    }
    if n < 0 {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        return sign * binomial(k - n - 1, k);
    }
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1))
}

fn mod2(v: i64) -> u8 {
    v.rem_euclid(2) as u8
}

/// Binomial closed forms for the full `d`-torus model:
/// `strong = (−1)^{d+p} C(d−1, p)`, `|I| = 1` entries `C(d−2, p−1) mod 2`,
/// `|I| = 2` entries `C(d−3, p−2) mod 2`. For `m < −d` the same formulas
/// are evaluated at `p = d` (every fixed point lies over the south pole).
pub fn closed_form(d: usize, m: f64) -> Result<KRClassVector> {
    if d == 0 {
        return Err(KrError::InvalidSpec("torus dimension must be at least 1".into()));
    }
    ensure_gapped(d, m)?;
    if m > d as f64 {
        return Ok(KRClassVector::zero(d, m, None));
    }
    let (p, label) = if m < -(d as f64) {
        (d, None)
    } else {
        let p = interval_index(d, m)?.p;
        (p, Some(p))
    };
    let (d_i, p_i) = (d as i64, p as i64);
    let sign = if (d + p).is_multiple_of(2) { 1 } else { -1 };
    let mut out = KRClassVector::zero(d, m, label);
    out.strong = sign * binomial(d_i - 1, p_i);
    out.weak1.fill(mod2(binomial(d_i - 2, p_i - 1)));
    out.weak2.fill(mod2(binomial(d_i - 3, p_i - 2)));
    Ok(out)
}

/// Pulls a class on the torus of `axes` back along the coordinate
/// projection `T^d → T^k`.
pub fn pullback_stacked(base: &KRClassVector, axes: &[usize], d: usize) -> Result<KRClassVector> {
    validate_axes(axes, d)?;
    if base.d != axes.len() {
        return Err(KrError::DimensionMismatch {
            expected: axes.len(),
            found: base.d,
        });
    }
    let mut out = KRClassVector::zero(d, base.m, base.p);
    out.strong = base.strong;
    out.coefficient = base.coefficient;
    for (a, &i) in axes.iter().enumerate() {
        out.weak1[i - 1] = base.weak1[a];
        for (b, &j) in axes.iter().enumerate().skip(a + 1) {
            out.weak2[pair_index(d, i, j)] = base.weak2(a + 1, b + 1);
        }
    }
    Ok(out)
}
