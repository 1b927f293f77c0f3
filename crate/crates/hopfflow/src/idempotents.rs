//! Convolution algebra of graded endomorphisms of the word Hopf algebras:
//! Eulerian idempotents, Adams operations, and the closed descent-number
//! formula for the first idempotent on multilinear words.

use crate::freetensor::{
    concat_mul, deconcat, shuffle_mul, unshuffle, words_of_degree, FreePoly, TensorPoly, Word,
};
use crate::rat::{binomial, factorial, qi, Q, RatMat};
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EndoError {
    #[error("graded endomorphisms live on different Hopf sides or truncations")]
    SideMismatch,
    #[error("index {0} out of range for truncation degree {1}")]
    DegreeOutOfRange(usize, usize),
}

/// Which product/coproduct pair a graded endomorphism convolves against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopfSide {
    /// Concatenation product with unshuffling coproduct (cocommutative).
    ConcatUnshuffle,
    /// Shuffle product with deconcatenation coproduct (commutative).
    ShuffleDeconcat,
}

impl HopfSide {
    fn mul(&self, p: &FreePoly, q: &FreePoly) -> FreePoly {
        match self {
            HopfSide::ConcatUnshuffle => concat_mul(p, q),
            HopfSide::ShuffleDeconcat => shuffle_mul(p, q),
        }
    }

    fn coproduct(&self, p: &FreePoly) -> TensorPoly {
        match self {
            HopfSide::ConcatUnshuffle => unshuffle(p),
            HopfSide::ShuffleDeconcat => deconcat(p),
        }
    }
}

/// A degree-preserving linear endomorphism of the span of words of degree
/// ≤ trunc, stored as one exact-rational matrix per degree. Columns are
/// indexed by the lexicographic word basis of each degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedEndo {
    pub side: HopfSide,
    pub alphabet: usize,
    pub trunc: usize,
    blocks: Vec<RatMat>,
}

fn word_index(alphabet: usize, w: &Word) -> usize {
    let mut idx = 0usize;
    for &a in &w.0 {
        idx = idx * alphabet + a;
    }
    idx
}

impl GradedEndo {
    /// Builds the endomorphism sending each basis word to `f(word)`.
    /// The image must be homogeneous of the same degree (checked).
    pub fn from_fn(
        side: HopfSide,
        alphabet: usize,
        trunc: usize,
        mut f: impl FnMut(&Word) -> FreePoly,
    ) -> Self {
        let mut blocks = Vec::with_capacity(trunc + 1);
        for d in 0..=trunc {
            let basis = words_of_degree(alphabet, d);
            let dim = basis.len();
            let mut m = RatMat::zeros(dim, dim);
            for (j, w) in basis.iter().enumerate() {
                let img = f(w);
                for (u, c) in img.terms() {
                    assert_eq!(u.len(), d, "image not homogeneous of degree {d}");
                    m[(word_index(alphabet, u), j)] = c.clone();
                }
            }
            blocks.push(m);
        }
        GradedEndo { side, alphabet, trunc, blocks }
    }

    pub fn identity(side: HopfSide, alphabet: usize, trunc: usize) -> Self {
        GradedEndo::from_fn(side, alphabet, trunc, |w| {
            FreePoly::monomial(w.clone(), Q::one())
        })
    }

    /// The convolution unit uη: projection onto the span of the empty word.
    pub fn unit_counit(side: HopfSide, alphabet: usize, trunc: usize) -> Self {
        GradedEndo::from_fn(side, alphabet, trunc, |w| {
            if w.is_empty() {
                FreePoly::one()
            } else {
                FreePoly::zero()
            }
        })
    }

    pub fn antipode_endo(side: HopfSide, alphabet: usize, trunc: usize) -> Self {
        GradedEndo::from_fn(side, alphabet, trunc, |w| {
            crate::freetensor::antipode(&FreePoly::monomial(w.clone(), Q::one()))
        })
    }

    /// The grading operator Y: multiplication by the degree.
    pub fn grading(side: HopfSide, alphabet: usize, trunc: usize) -> Self {
        GradedEndo::from_fn(side, alphabet, trunc, |w| {
            FreePoly::monomial(w.clone(), qi(w.len() as i64))
        })
    }

    pub fn zero_like(&self) -> Self {
        let blocks = self.blocks.iter().map(|b| RatMat::zeros(b.rows, b.cols)).collect();
        GradedEndo { side: self.side, alphabet: self.alphabet, trunc: self.trunc, blocks }
    }

    pub fn add(&self, other: &GradedEndo) -> Result<GradedEndo, EndoError> {
        self.check_compatible(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect();
        Ok(GradedEndo { blocks, ..*self })
    }

    pub fn sub(&self, other: &GradedEndo) -> Result<GradedEndo, EndoError> {
        self.check_compatible(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.sub(b)).collect();
        Ok(GradedEndo { blocks, ..*self })
    }

    pub fn scale(&self, c: &Q) -> GradedEndo {
        let blocks = self.blocks.iter().map(|b| b.scale(c)).collect();
        GradedEndo { blocks, ..*self }
    }

    /// Composition of endomorphisms (matrix product per degree).
    pub fn compose(&self, other: &GradedEndo) -> Result<GradedEndo, EndoError> {
        self.check_compatible(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.mul(b)).collect();
        Ok(GradedEndo { blocks, ..*self })
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(RatMat::is_zero)
    }

    fn check_compatible(&self, other: &GradedEndo) -> Result<(), EndoError> {
        if self.side != other.side || self.alphabet != other.alphabet || self.trunc != other.trunc {
            return Err(EndoError::SideMismatch);
        }
        Ok(())
    }

    /// Applies the endomorphism to a single word (degree ≤ trunc).
    pub fn apply_word(&self, w: &Word) -> FreePoly {
        let d = w.len();
        assert!(d <= self.trunc, "word degree exceeds truncation");
        let basis = words_of_degree(self.alphabet, d);
        let j = word_index(self.alphabet, w);
        let mut out = FreePoly::zero();
        for (i, u) in basis.iter().enumerate() {
            out.add_term(u.clone(), self.blocks[d][(i, j)].clone());
        }
        out
    }

    /// Applies the endomorphism to a polynomial degreewise.
    pub fn apply(&self, p: &FreePoly) -> FreePoly {
        let mut out = FreePoly::zero();
        out.maxdeg = p.maxdeg;
        for (w, c) in p.terms() {
            let img = self.apply_word(w);
            for (u, k) in img.terms() {
                out.add_term(u.clone(), k * c);
            }
        }
        out
    }
}

/// Convolution product f*g = m(f⊗g)Δ on the chosen Hopf side.
pub fn convolve(f: &GradedEndo, g: &GradedEndo) -> Result<GradedEndo, EndoError> {
    f.check_compatible(g)?;
    let side = f.side;
    let mut out = f.zero_like();
    for d in 0..=f.trunc {
        let basis = words_of_degree(f.alphabet, d);
        for (j, w) in basis.iter().enumerate() {
            let cop = side.coproduct(&FreePoly::monomial(w.clone(), Q::one()));
            let mut img = FreePoly::zero();
            for ((u, v), c) in cop.terms() {
                let fu = f.apply_word(u);
                let gv = g.apply_word(v);
                let prod = side.mul(&fu, &gv);
                for (word, k) in prod.terms() {
                    img.add_term(word.clone(), k * c);
                }
            }
            for (u, c) in img.terms() {
                let i = word_index(f.alphabet, u);
                out.blocks[d][(i, j)] = out.blocks[d][(i, j)].clone() + c.clone();
            }
        }
    }
    Ok(out)
}

/// Convolution power f^{*k}, with f^{*0} = uη.
pub fn convolve_pow(f: &GradedEndo, k: usize) -> Result<GradedEndo, EndoError> {
    let mut acc = GradedEndo::unit_counit(f.side, f.alphabet, f.trunc);
    for _ in 0..k {
        acc = convolve(&acc, f)?;
    }
    Ok(acc)
}

/// First Eulerian idempotent π₁ = log*(id): the convolution logarithm of the
/// identity. The series terminates degreewise because (id − uη)^{*k} kills
/// degrees below k.
pub fn pi1(side: HopfSide, alphabet: usize, trunc: usize) -> GradedEndo {
    let id = GradedEndo::identity(side, alphabet, trunc);
    let ue = GradedEndo::unit_counit(side, alphabet, trunc);
    let j = id.sub(&ue).unwrap();
    let mut out = j.zero_like();
    let mut power = ue;
    for k in 1..=trunc.max(1) {
        power = convolve(&power, &j).unwrap();
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { Q::one() } else { -Q::one() };
        out = out.add(&power.scale(&(sign / qi(k as i64)))).unwrap();
    }
    out
}

/// n-th Eulerian idempotent π_n = π₁^{*n}/n!, with π₀ = uη.
pub fn eulerian(n: usize, side: HopfSide, alphabet: usize, trunc: usize) -> Result<GradedEndo, EndoError> {
    if n > trunc {
        return Err(EndoError::DegreeOutOfRange(n, trunc));
    }
    if n == 0 {
        return Ok(GradedEndo::unit_counit(side, alphabet, trunc));
    }
    let p1 = pi1(side, alphabet, trunc);
    Ok(convolve_pow(&p1, n)?.scale(&(Q::one() / factorial(n))))
}

/// Adams operation id^{*l}.
pub fn adams(l: usize, side: HopfSide, alphabet: usize, trunc: usize) -> GradedEndo {
    let id = GradedEndo::identity(side, alphabet, trunc);
    convolve_pow(&id, l).unwrap()
}

/// A permutation of {1..n} with its descent count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// images[i] = σ(i+1), values in 1..=n
    pub images: Vec<usize>,
    pub descents: usize,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Self {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            assert!(v >= 1 && v <= n && !seen[v], "not a permutation of 1..={n}");
            seen[v] = true;
        }
        let descents = images.windows(2).filter(|p| p[0] > p[1]).count();
        Permutation { images, descents }
    }
}

/// All permutations of {1..n} in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=n).collect();
    loop {
        out.push(Permutation::new(cur.clone()));
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Closed form of the multilinear first idempotent: σ carries coefficient
/// (−1)^{d(σ)} / (n · binom(n−1, d(σ))).
pub fn descent_pi1(n: usize) -> Vec<(Permutation, Q)> {
    assert!(n >= 1);
    all_permutations(n)
        .into_iter()
        .map(|sigma| {
            let d = sigma.descents;
            let sign = if d % 2 == 0 { Q::one() } else { -Q::one() };
            let coeff = sign / (qi(n as i64) * binomial(n - 1, d));
            (sigma, coeff)
        })
        .collect()
}

/// Applies the descent formula to the multilinear word x₁…x_n with the given
/// letter indices: Σ_σ coeff(σ) x_{σ(1)}…x_{σ(n)}.
pub fn descent_pi1_apply(letters: &[usize]) -> FreePoly {
    let n = letters.len();
    let mut out = FreePoly::zero();
    for (sigma, coeff) in descent_pi1(n) {
        let word = Word(sigma.images.iter().map(|&i| letters[i - 1]).collect());
        out.add_term(word, coeff);
    }
    out
}

/// Direct action of π₁ on a polynomial over an arbitrary alphabet, avoiding
/// the per-degree matrices. Used for many-letter inputs where the dense
/// basis would be large.
pub fn pi1_apply(p: &FreePoly, side: HopfSide) -> FreePoly {
    let mut out = FreePoly::zero();
    out.maxdeg = p.maxdeg;
    for (w, c) in p.terms() {
        let n = w.len();
        if n == 0 {
            continue;
        }
        for k in 1..=n {
            let sign = if k % 2 == 1 { Q::one() } else { -Q::one() };
            let factor = sign / qi(k as i64);
            // (id − uη)^{*k}(w): sum over ordered splittings of w into k
            // nonempty coproduct parts, multiplied back together.
            let parts = convolution_splittings(w, k, side);
            for (word, mult) in parts.terms() {
                out.add_term(word.clone(), mult * &factor * c);
            }
        }
    }
    out
}

/// m^{(k)} (J ⊗ … ⊗ J) Δ^{(k−1)} applied to a single word, J = id − uη.
fn convolution_splittings(w: &Word, k: usize, side: HopfSide) -> FreePoly {
    let n = w.0.len();
    let mut out = FreePoly::zero();
    match side {
        HopfSide::ConcatUnshuffle => {
            // iterated unshuffling: assign each letter position to one of k
            // slots; surjective assignments only; concatenate slot words.
            let mut assign = vec![0usize; n];
            loop {
                let mut used = vec![false; k];
                for &a in &assign {
                    used[a] = true;
                }
                if used.iter().all(|&b| b) {
                    let mut word = Vec::with_capacity(n);
                    for slot in 0..k {
                        for (i, &a) in assign.iter().enumerate() {
                            if a == slot {
                                word.push(w.0[i]);
                            }
                        }
                    }
                    out.add_term(Word(word), Q::one());
                }
                // odometer
                let mut i = 0;
                while i < n {
                    assign[i] += 1;
                    if assign[i] < k {
                        break;
                    }
                    assign[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
                if n == 0 {
                    break;
                }
            }
        }
        HopfSide::ShuffleDeconcat => {
            // iterated deconcatenation into k nonempty blocks, then shuffle
            // the blocks back together.
            fn comps(n: usize, k: usize) -> Vec<Vec<usize>> {
                if k == 1 {
                    return if n >= 1 { vec![vec![n]] } else { vec![] };
                }
                let mut out = Vec::new();
                for first in 1..=n.saturating_sub(k - 1) {
                    for mut rest in comps(n - first, k - 1) {
                        let mut v = vec![first];
                        v.append(&mut rest);
                        out.push(v);
                    }
                }
                out
            }
            for comp in comps(n, k) {
                let mut blocks = Vec::new();
                let mut pos = 0;
                for len in comp {
                    blocks.push(FreePoly::monomial(Word(w.0[pos..pos + len].to_vec()), Q::one()));
                    pos += len;
                }
                let mut prod = blocks[0].clone();
                for b in &blocks[1..] {
                    prod = shuffle_mul(&prod, b);
                }
                for (word, c) in prod.terms() {
                    out.add_term(word.clone(), c.clone());
                }
            }
        }
    }
    out
}
