//! Free associative algebra T(V) and shuffle algebra on a finite alphabet,
//! with both Hopf structures, truncated exp/log, the Dynkin operator, and
//! Lie-element (primitivity) tests.
//!
//! Letters are opaque indices `0, 1, 2, ...`; a word is a finite sequence of
//! letters. The two Hopf structures on the span of words are
//! - concatenation product with unshuffling coproduct (cocommutative), and
//! - shuffle product with deconcatenation coproduct (commutative).
//! The antipode is the same signed reversal for both.

use crate::rat::{factorial, Q};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FreeAlgebraError {
    #[error("series argument has the wrong constant term")]
    WrongConstantTerm,
    #[error("input is not a Lie element (fails primitivity in degree {0})")]
    NotLie(usize),
}

/// A word in the alphabet: a sequence of letter indices. The empty word is
/// the algebra unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i])
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

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }
}

/// Degree-lexicographic order: shorter words first, then lexicographic on
/// letter indices. This is the canonical term order for display and
/// serialization.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("w{i}")).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Maps letter indices to display strings for pretty printing; the algebra
/// kernel itself only sees indices.
#[derive(Debug, Clone)]
pub struct AlphabetNames(pub Vec<String>);

impl AlphabetNames {
    pub fn xy() -> Self {
        AlphabetNames(vec!["x".into(), "y".into()])
    }

    pub fn display(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.0.iter()
            .map(|&i| self.0.get(i).cloned().unwrap_or_else(|| format!("w{i}")))
            .collect::<Vec<_>>()
            .join("")
    }
}

/// Noncommutative polynomial: finite rational linear combination of words,
/// optionally truncated above `maxdeg`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreePoly {
    terms: BTreeMap<Word, Q>,
    pub maxdeg: Option<usize>,
}

fn merge_maxdeg(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl FreePoly {
    pub fn zero() -> Self {
        FreePoly { terms: BTreeMap::new(), maxdeg: None }
    }

    pub fn one() -> Self {
        FreePoly::monomial(Word::empty(), Q::one())
    }

    pub fn letter(i: usize) -> Self {
        FreePoly::monomial(Word::letter(i), Q::one())
    }

    pub fn monomial(w: Word, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        FreePoly { terms, maxdeg: None }
    }

    pub fn with_maxdeg(mut self, maxdeg: usize) -> Self {
        self.maxdeg = Some(maxdeg);
        self.terms.retain(|w, _| w.len() <= maxdeg);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        if let Some(n) = self.maxdeg {
            if w.len() > n {
                return;
            }
        }
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &FreePoly) -> FreePoly {
        let mut out = FreePoly { terms: self.terms.clone(), maxdeg: merge_maxdeg(self.maxdeg, other.maxdeg) };
        out.terms.retain(|w, _| out.maxdeg.map_or(true, |n| w.len() <= n));
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FreePoly) -> FreePoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FreePoly {
        FreePoly {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
            maxdeg: self.maxdeg,
        }
    }

    pub fn scale(&self, c: &Q) -> FreePoly {
        if c.is_zero() {
            return FreePoly { terms: BTreeMap::new(), maxdeg: self.maxdeg };
        }
        FreePoly {
            terms: self.terms.iter().map(|(w, k)| (w.clone(), k * c)).collect(),
            maxdeg: self.maxdeg,
        }
    }

    /// Homogeneous component of the given degree.
    pub fn component(&self, d: usize) -> FreePoly {
        FreePoly {
            terms: self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())).collect(),
            maxdeg: self.maxdeg,
        }
    }

    pub fn truncated(&self, maxdeg: usize) -> FreePoly {
        self.clone().with_maxdeg(maxdeg)
    }

    /// Canonical text form: terms sorted degree-lex, "<num>/<den> * w0.w1".
    pub fn canonical_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut keys: Vec<&Word> = self.terms.keys().collect();
        keys.sort();
        keys.iter()
            .map(|w| {
                let c = &self.terms[*w];
                format!("{}/{} * {}", c.numer(), c.denom(), w)
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.terms
            .iter()
            .map(|(w, c)| JsonTerm {
                word: w.0.clone(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect()
    }
}

/// One serialized term of a FreePoly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonTerm {
    pub word: Vec<usize>,
    pub num: String,
    pub den: String,
}

/// Bilinear extension of word concatenation.
pub fn concat_mul(p: &FreePoly, q: &FreePoly) -> FreePoly {
    let mut out = FreePoly { terms: BTreeMap::new(), maxdeg: merge_maxdeg(p.maxdeg, q.maxdeg) };
    for (u, a) in &p.terms {
        for (v, b) in &q.terms {
            out.add_term(u.concat(v), a * b);
        }
    }
    out
}

/// All shuffles of two words: interleavings preserving the relative order of
/// each factor, enumerated by the subset of positions taken from `u`.
fn word_shuffles(u: &[usize], v: &[usize], out: &mut FreePoly) {
    let (p, qn) = (u.len(), v.len());
    let n = p + qn;
    // iterate over p-subsets of {0..n} via combinations
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        let mut w = vec![0usize; n];
        let mut ui = 0usize;
        let mut vi = 0usize;
        for (pos, slot) in w.iter_mut().enumerate() {
            if ui < p && idx[ui] == pos {
                *slot = u[ui];
                ui += 1;
            } else {
                *slot = v[vi];
                vi += 1;
            }
        }
        out.add_term(Word(w), Q::one());
        // next combination
        if p == 0 {
            break;
        }
        let mut i = p;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - p {
                break;
            }
        }
        if idx[i] == i + n - p {
            return;
        }
        idx[i] += 1;
        for j in i + 1..p {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Commutative shuffle product.
pub fn shuffle_mul(p: &FreePoly, q: &FreePoly) -> FreePoly {
    let maxdeg = merge_maxdeg(p.maxdeg, q.maxdeg);
    let mut out = FreePoly { terms: BTreeMap::new(), maxdeg };
    for (u, a) in &p.terms {
        for (v, b) in &q.terms {
            if let Some(n) = maxdeg {
                if u.len() + v.len() > n {
                    continue;
                }
            }
            let mut sh = FreePoly::zero();
            word_shuffles(&u.0, &v.0, &mut sh);
            for (w, c) in &sh.terms {
                out.add_term(w.clone(), c * a * b);
            }
        }
    }
    out
}

/// Element of H ⊗ H: finite linear combination of word pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorPoly {
    terms: BTreeMap<(Word, Word), Q>,
    pub maxdeg: Option<usize>,
}

impl TensorPoly {
    pub fn zero() -> Self {
        TensorPoly { terms: BTreeMap::new(), maxdeg: None }
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        if let Some(n) = self.maxdeg {
            if u.len() + v.len() > n {
                return;
            }
        }
        let key = (u, v);
        let cur = self.terms.remove(&key).unwrap_or_else(Q::zero) + c;
        if !cur.is_zero() {
            self.terms.insert(key, cur);
        }
    }

    pub fn coeff(&self, u: &Word, v: &Word) -> Q {
        self.terms.get(&(u.clone(), v.clone())).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &Q)> {
        self.terms.iter()
    }

    pub fn sub(&self, other: &TensorPoly) -> TensorPoly {
        let mut out = self.clone();
        for ((u, v), c) in &other.terms {
            out.add_term(u.clone(), v.clone(), -c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Swap the tensor legs.
    pub fn flip(&self) -> TensorPoly {
        let mut out = TensorPoly { terms: BTreeMap::new(), maxdeg: self.maxdeg };
        for ((u, v), c) in &self.terms {
            out.add_term(v.clone(), u.clone(), c.clone());
        }
        out
    }
}

/// Deconcatenation coproduct: Δw = Σ prefix ⊗ suffix.
pub fn deconcat(p: &FreePoly) -> TensorPoly {
    let mut out = TensorPoly { terms: BTreeMap::new(), maxdeg: p.maxdeg };
    for (w, c) in &p.terms {
        for cut in 0..=w.len() {
            out.add_term(Word(w.0[..cut].to_vec()), Word(w.0[cut..].to_vec()), c.clone());
        }
    }
    out
}

/// Unshuffling coproduct: letters are primitive; Δw sums over all ways to
/// distribute the letters of w into two subwords keeping relative order.
pub fn unshuffle(p: &FreePoly) -> TensorPoly {
    let mut out = TensorPoly { terms: BTreeMap::new(), maxdeg: p.maxdeg };
    for (w, c) in &p.terms {
        let n = w.len();
        for mask in 0u64..(1u64 << n) {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for (i, &letter) in w.0.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    left.push(letter);
                } else {
                    right.push(letter);
                }
            }
            out.add_term(Word(left), Word(right), c.clone());
        }
    }
    out
}

/// Antipode: S(v1…vn) = (−1)^n vn…v1, the same formula on both Hopf sides.
pub fn antipode(p: &FreePoly) -> FreePoly {
    let mut out = FreePoly { terms: BTreeMap::new(), maxdeg: p.maxdeg };
    for (w, c) in &p.terms {
        let sign = if w.len() % 2 == 0 { c.clone() } else { -c };
        out.add_term(w.reversed(), sign);
    }
    out
}

/// Truncated exponential; the argument must have zero constant term.
pub fn series_exp(p: &FreePoly, n: usize) -> Result<FreePoly, FreeAlgebraError> {
    if !p.coeff(&Word::empty()).is_zero() {
        return Err(FreeAlgebraError::WrongConstantTerm);
    }
    let p = p.truncated(n);
    let mut out = FreePoly::one().with_maxdeg(n);
    let mut power = FreePoly::one().with_maxdeg(n);
    for k in 1..=n {
        power = concat_mul(&power, &p);
        if power.is_zero() {
            break;
        }
        out = out.add(&power.scale(&(Q::one() / factorial(k))));
    }
    Ok(out)
}

/// Truncated logarithm; the argument must have constant term 1.
pub fn series_log(p: &FreePoly, n: usize) -> Result<FreePoly, FreeAlgebraError> {
    if p.coeff(&Word::empty()) != Q::one() {
        return Err(FreeAlgebraError::WrongConstantTerm);
    }
    let z = p.truncated(n).sub(&FreePoly::one().with_maxdeg(n));
    let mut out = FreePoly::zero().with_maxdeg(n);
    let mut power = FreePoly::one().with_maxdeg(n);
    for k in 1..=n {
        power = concat_mul(&power, &z);
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { Q::one() } else { -Q::one() };
        out = out.add(&power.scale(&(sign / crate::rat::qi(k as i64))));
    }
    Ok(out)
}

/// Left-to-right bracketing of a single word: [...[[v1,v2],v3],...,vn].
fn dynkin_word(w: &Word) -> FreePoly {
    if w.is_empty() {
        return FreePoly::zero();
    }
    let mut acc = FreePoly::letter(w.0[0]);
    for &letter in &w.0[1..] {
        let x = FreePoly::letter(letter);
        acc = concat_mul(&acc, &x).sub(&concat_mul(&x, &acc));
    }
    acc
}

/// Dynkin operator D: bilinear extension of left-to-right bracketing.
/// On a primitive homogeneous element of degree n, D acts by n.
pub fn dynkin(p: &FreePoly) -> FreePoly {
    let mut out = FreePoly { terms: BTreeMap::new(), maxdeg: p.maxdeg };
    for (w, c) in &p.terms {
        let b = dynkin_word(w);
        for (u, k) in &b.terms {
            out.add_term(u.clone(), k * c);
        }
    }
    out
}

/// Per-degree primitivity diagnostics of a Lie-element test.
#[derive(Debug, Clone)]
pub struct LieDiagnostics {
    pub is_lie: bool,
    /// (degree, primitive in that degree)
    pub per_degree: Vec<(usize, bool)>,
}

/// True iff p has no constant term and every homogeneous component is
/// primitive for the unshuffling coproduct.
pub fn is_lie_element(p: &FreePoly) -> LieDiagnostics {
    let mut per_degree = Vec::new();
    let mut is_lie = p.coeff(&Word::empty()).is_zero();
    for d in 1..=p.degree() {
        let comp = p.component(d);
        if comp.is_zero() {
            continue;
        }
        let mut expected = TensorPoly::zero();
        for (w, c) in comp.terms() {
            expected.add_term(w.clone(), Word::empty(), c.clone());
            expected.add_term(Word::empty(), w.clone(), c.clone());
        }
        let ok = unshuffle(&comp).sub(&expected).is_zero();
        per_degree.push((d, ok));
        is_lie &= ok;
    }
    LieDiagnostics { is_lie, per_degree }
}

/// Grouplike criterion: (Z, u ⧢ v) = (Z, u)(Z, v) for all word pairs with
/// |u| + |v| ≤ maxdeg, |u|,|v| ≥ 1, and constant term 1.
pub fn ree_grouplike_check(z: &FreePoly, alphabet: usize, maxdeg: usize) -> bool {
    if z.coeff(&Word::empty()) != Q::one() {
        return false;
    }
    let words = all_words(alphabet, maxdeg);
    for u in &words {
        if u.is_empty() || u.len() >= maxdeg {
            continue;
        }
        for v in &words {
            if v.is_empty() || u.len() + v.len() > maxdeg {
                continue;
            }
            let sh = shuffle_mul(
                &FreePoly::monomial(u.clone(), Q::one()),
                &FreePoly::monomial(v.clone(), Q::one()),
            );
            let mut lhs = Q::zero();
            for (w, c) in sh.terms() {
                lhs += c * z.coeff(w);
            }
            if lhs != z.coeff(u) * z.coeff(v) {
                return false;
            }
        }
    }
    true
}

/// All words over `alphabet` letters of length ≤ maxdeg, in degree-lex order.
pub fn all_words(alphabet: usize, maxdeg: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..maxdeg {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..alphabet {
                let mut v = w.0.clone();
                v.push(a);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Words of exactly length `d` over `alphabet` letters, lexicographic order.
pub fn words_of_degree(alphabet: usize, d: usize) -> Vec<Word> {
    let mut layer = vec![Word::empty()];
    for _ in 0..d {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..alphabet {
                let mut v = w.0.clone();
                v.push(a);
                next.push(Word(v));
            }
        }
        layer = next;
    }
    layer
}

/// Pairing coefficient ⟨p, u⊗v⟩ of a TensorPoly against a word pair.
pub fn tensor_coeff(t: &TensorPoly, u: &Word, v: &Word) -> Q {
    t.coeff(u, v)
}
