//! The bialgebra of words in the two quantum difference operators.
//!
//! A [`Word`] `σ₁σ₂…σₙ` stands for the composed operator `∇_σ₁ ∇_σ₂ … ∇_σₙ`
//! (applied right to left). Coefficients are polynomials in `eps` so that
//! identities can be compared exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::SampledPath;
use crate::scale_ops::{quantum_diff, Side};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Side>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(side: Side) -> Self {
        Word(vec![side])
    }

    pub fn new(letters: Vec<Side>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Side] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Every word of length `0..=max_len`, shortest first.
    pub fn all_up_to(max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        let mut layer = vec![Word::identity()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w| {
                    [Side::Plus, Side::Minus].map(|s| {
                        let mut v = w.0.clone();
                        v.push(s);
                        Word(v)
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// `"+-"` is `∇₊∇₋`; `""` and `"I"` are the identity.
    fn from_str(s: &str) -> Result<Self> {
        if s == "I" {
            return Ok(Word::identity());
        }
        s.chars()
            .map(|c| match c {
                '+' => Ok(Side::Plus),
                '-' => Ok(Side::Minus),
                other => Err(Error::Format(format!("letter {other:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Polynomial in `eps`, lowest power first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EpsPoly(Vec<f64>);

impl EpsPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        EpsPoly(coeffs)
    }

    pub fn zero() -> Self {
        EpsPoly(Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c * eps^power`
    pub fn monomial(c: f64, power: usize) -> Self {
        let mut v = vec![0.0; power + 1];
        v[power] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, eps: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * eps + c)
    }
}

impl Add for &EpsPoly {
    type Output = EpsPoly;
    fn add(self, o: &EpsPoly) -> EpsPoly {
        let n = self.0.len().max(o.0.len());
        let v = (0..n)
            .map(|i| self.0.get(i).unwrap_or(&0.0) + o.0.get(i).unwrap_or(&0.0))
            .collect();
        EpsPoly::new(v)
    }
}

impl Mul for &EpsPoly {
    type Output = EpsPoly;
    fn mul(self, o: &EpsPoly) -> EpsPoly {
        if self.is_zero() || o.is_zero() {
            return EpsPoly::zero();
        }
        let mut v = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        EpsPoly::new(v)
    }
}

/// Finitely supported formal sums `Σ c_k(eps) k` over a basis `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<K: Ord>(BTreeMap<K, EpsPoly>);

pub type WordSeries = Series<Word>;
pub type TensorSeries = Series<(Word, Word)>;
pub type Tensor3Series = Series<(Word, Word, Word)>;

impl<K: Ord + Clone> Series<K> {
    pub fn zero() -> Self {
        Series(BTreeMap::new())
    }

    pub fn term(key: K, coeff: EpsPoly) -> Self {
        let mut s = Self::zero();
        s.add_term(key, coeff);
        s
    }

    /// Adds `coeff * key`, dropping the entry if it cancels.
    pub fn add_term(&mut self, key: K, coeff: EpsPoly) {
        if coeff.is_zero() {
            return;
        }
        let sum = match self.0.get(&key) {
            Some(c) => c + &coeff,
            None => coeff,
        };
        if sum.is_zero() {
            self.0.remove(&key);
        } else {
            self.0.insert(key, sum);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &EpsPoly)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, key: &K) -> Option<&EpsPoly> {
        self.0.get(key)
    }

    /// Coefficients evaluated at a numeric `eps`.
    pub fn eval(&self, eps: f64) -> BTreeMap<K, f64> {
        self.0
            .iter()
            .map(|(k, c)| (k.clone(), c.eval(eps)))
            .collect()
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl WordSeries {
    pub fn word(w: Word) -> Self {
        Self::term(w, EpsPoly::constant(1.0))
    }

    /// Product in the algebra: concatenation of words.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        out
    }
}

impl TensorSeries {
    /// `(a⊗b)(c⊗d) = ac⊗bd`
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c1) in self.iter() {
            for ((c, d), c2) in other.iter() {
                out.add_term((a.concat(c), b.concat(d)), c1 * c2);
            }
        }
        out
    }

    /// `τ(a⊗b) = b⊗a`
    pub fn swap(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in self.iter() {
            out.add_term((b.clone(), a.clone()), c.clone());
        }
        out
    }
}

impl<K: Ord + Clone + Serialize> Serialize for Series<K>
where
    K: SeriesKey,
{
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, c) in &self.0 {
            m.serialize_entry(&k.key_string(), c)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for WordSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, Vec<f64>>::deserialize(d)?;
        let mut out = WordSeries::zero();
        for (k, c) in raw {
            let w: Word = k.parse().map_err(de::Error::custom)?;
            out.add_term(w, EpsPoly::new(c));
        }
        Ok(out)
    }
}

/// String form of a series basis element; tensor factors joined by `|`.
pub trait SeriesKey {
    fn key_string(&self) -> String;
}

impl SeriesKey for Word {
    fn key_string(&self) -> String {
        self.to_string()
    }
}

impl SeriesKey for (Word, Word) {
    fn key_string(&self) -> String {
        format!("{}|{}", self.0, self.1)
    }
}

impl SeriesKey for (Word, Word, Word) {
    fn key_string(&self) -> String {
        format!("{}|{}|{}", self.0, self.1, self.2)
    }
}

/// `Δ(σ) = σ⊗I + I⊗σ + σ eps σ⊗σ`
pub fn coproduct_letter(side: Side) -> TensorSeries {
    let w = Word::letter(side);
    let mut out = TensorSeries::zero();
    out.add_term((w.clone(), Word::identity()), EpsPoly::constant(1.0));
    out.add_term((Word::identity(), w.clone()), EpsPoly::constant(1.0));
    out.add_term((w.clone(), w), EpsPoly::monomial(side.sign(), 1));
    out
}

/// Coproduct of a word as the product of its letters' coproducts.
pub fn coproduct_word(w: &Word) -> TensorSeries {
    w.letters().iter().fold(
        TensorSeries::term((Word::identity(), Word::identity()), EpsPoly::constant(1.0)),
        |acc, &s| acc.mul(&coproduct_letter(s)),
    )
}

/// Coproduct of a word by direct enumeration: each letter goes left, right
/// or to both factors, the last choice weighted by `σ eps`.
pub fn coproduct_word_combinatorial(w: &Word) -> TensorSeries {
    let n = w.len();
    let mut out = TensorSeries::zero();
    for code in 0..3usize.pow(n as u32) {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        let mut coeff = EpsPoly::constant(1.0);
        let mut c = code;
        for &s in w.letters() {
            match c % 3 {
                0 => left.push(s),
                1 => right.push(s),
                _ => {
                    left.push(s);
                    right.push(s);
                    coeff = &coeff * &EpsPoly::monomial(s.sign(), 1);
                }
            }
            c /= 3;
        }
        out.add_term((Word::new(left), Word::new(right)), coeff);
    }
    out
}

pub fn coproduct_symbolic(s: &WordSeries) -> TensorSeries {
    let mut out = TensorSeries::zero();
    for (w, c) in s.iter() {
        for (k, d) in coproduct_word(w).iter() {
            out.add_term(k.clone(), c * d);
        }
    }
    out
}

/// `Δ(s)` with its `eps`-polynomial coefficients evaluated at `eps`.
pub fn coproduct(s: &WordSeries, eps: f64) -> BTreeMap<(Word, Word), f64> {
    coproduct_symbolic(s).eval(eps)
}

/// Constant term: the coefficient of the identity word.
pub fn counit(s: &WordSeries) -> EpsPoly {
    s.get(&Word::identity()).cloned().unwrap_or_default()
}

/// `(u⊗id)(t)` when `left` is true, else `(id⊗u)(t)`.
pub fn counit_contract(t: &TensorSeries, left: bool) -> WordSeries {
    let mut out = WordSeries::zero();
    for ((a, b), c) in t.iter() {
        let (kill, keep) = if left { (a, b) } else { (b, a) };
        if kill.is_empty() {
            out.add_term(keep.clone(), c.clone());
        }
    }
    out
}

/// `(Δ⊗id)(t)` when `left` is true, else `(id⊗Δ)(t)`.
pub fn coproduct_side(t: &TensorSeries, left: bool) -> Tensor3Series {
    let mut out = Tensor3Series::zero();
    for ((a, b), c) in t.iter() {
        let inner = coproduct_word(if left { a } else { b });
        for ((x, y), d) in inner.iter() {
            let key = if left {
                (x.clone(), y.clone(), b.clone())
            } else {
                (a.clone(), x.clone(), y.clone())
            };
            out.add_term(key, c * d);
        }
    }
    out
}

/// Outcome of the exact bialgebra checks over all words up to a length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub max_word_len: usize,
    pub words: usize,
    pub homomorphism: bool,
    pub counit: bool,
    pub coassociativity: bool,
    pub cocommutativity: bool,
    /// First failing identity, if any.
    pub failure: Option<String>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.homomorphism && self.counit && self.coassociativity && self.cocommutativity
    }
}

/// Values of `eps` at which polynomial identities are also spot-evaluated.
pub const CHECK_EPS: [f64; 3] = [0.5, 0.125, 0.03125];

fn series_agree<K: Ord + Clone>(a: &Series<K>, b: &Series<K>) -> bool {
    a == b && CHECK_EPS.iter().all(|&e| a.eval(e) == b.eval(e))
}

pub fn check_bialgebra(max_word_len: usize) -> AlgebraReport {
    let words = Word::all_up_to(max_word_len);
    let mut failure = None;
    let mut note = |ok: bool, what: String| {
        if !ok && failure.is_none() {
            failure = Some(what);
        }
        ok
    };
    let mut homomorphism = true;
    for a in &words {
        for b in &words {
            let lhs = coproduct_word_combinatorial(&a.concat(b));
            let rhs = coproduct_word(a).mul(&coproduct_word(b));
            homomorphism &= note(
                series_agree(&lhs, &rhs),
                format!("Δ({a}{b}) ≠ Δ({a})Δ({b})"),
            );
        }
    }
    let (mut counit_ok, mut coassoc, mut cocomm) = (true, true, true);
    for w in &words {
        let d = coproduct_word(w);
        let id = WordSeries::word(w.clone());
        counit_ok &= note(
            counit_contract(&d, true) == id && counit_contract(&d, false) == id,
            format!("counit axiom fails on {w:?}"),
        );
        coassoc &= note(
            series_agree(&coproduct_side(&d, true), &coproduct_side(&d, false)),
            format!("coassociativity fails on {w:?}"),
        );
        cocomm &= note(series_agree(&d.swap(), &d), format!("Δ^op ≠ Δ on {w:?}"));
    }
    AlgebraReport {
        max_word_len,
        words: words.len(),
        homomorphism,
        counit: counit_ok,
        coassociativity: coassoc,
        cocommutativity: cocomm,
        failure,
    }
}

/// Applies the letters of `w` right to left as quantum differences.
pub fn eval_word(w: &Word, f: &SampledPath, eps: f64) -> Result<SampledPath> {
    w.letters()
        .iter()
        .rev()
        .try_fold(f.clone(), |acc, &s| quantum_diff(&acc, eps, s))
}

/// `Σ c(eps) w(f)` on the window shared by every term.
pub fn eval_series(s: &WordSeries, f: &SampledPath, eps: f64) -> Result<SampledPath> {
    let terms = s
        .iter()
        .map(|(w, c)| Ok((c.eval(eps), eval_word(w, f, eps)?)))
        .collect::<Result<Vec<_>>>()?;
    combine(terms.iter().map(|(c, p)| (*c, vec![p])), f)
}

/// Sums `c * Π paths` over the time window common to all paths.
fn combine<'a>(
    terms: impl Iterator<Item = (f64, Vec<&'a SampledPath>)> + Clone,
    reference: &SampledPath,
) -> Result<SampledPath> {
    let dt = reference.dt();
    let (mut lo, mut hi) = (reference.t0(), reference.t_end());
    for (_, ps) in terms.clone() {
        for p in ps {
            lo = lo.max(p.t0());
            hi = hi.min(p.t_end());
        }
    }
    if hi < lo - 0.5 * dt {
        return Err(Error::Grid("terms share no grid points".into()));
    }
    let len = ((hi - lo) / dt).round() as usize + 1;
    let mut out = vec![0.0; len];
    for (c, ps) in terms {
        let offsets: Vec<usize> = ps
            .iter()
            .map(|p| ((lo - p.t0()) / dt).round() as usize)
            .collect();
        for (i, o) in out.iter_mut().enumerate() {
            let prod: f64 = ps
                .iter()
                .zip(&offsets)
                .map(|(p, &off)| p.values()[off + i])
                .product();
            *o += c * prod;
        }
    }
    SampledPath::new(lo, dt, out)
}

/// Max pointwise gap between `S(f g)` and `ν(Δ(S)(f⊗g))`.
pub fn check_commuting_diagram(
    s: &WordSeries,
    f: &SampledPath,
    g: &SampledPath,
    eps: f64,
) -> Result<f64> {
    let o = f.overlap(g)?;
    if o.a_start != 0 || o.b_start != 0 || f.len() != g.len() {
        return Err(Error::GridMismatch {
            width: g.t0() - f.t0(),
            dt: f.dt(),
        });
    }
    let fg = SampledPath::new(
        f.t0(),
        f.dt(),
        f.values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| a * b)
            .collect(),
    )?;
    let lhs = eval_series(s, &fg, eps)?;
    let delta = coproduct(s, eps);
    let evaluated = delta
        .iter()
        .map(|((a, b), c)| Ok((*c, eval_word(a, f, eps)?, eval_word(b, g, eps)?)))
        .collect::<Result<Vec<_>>>()?;
    let rhs = combine(evaluated.iter().map(|(c, p, q)| (*c, vec![p, q])), f)?;
    let o = lhs.overlap(&rhs)?;
    Ok((0..o.len)
        .map(|i| (lhs.values()[o.a_start + i] - rhs.values()[o.b_start + i]).abs())
        .fold(0.0, f64::max))
}
