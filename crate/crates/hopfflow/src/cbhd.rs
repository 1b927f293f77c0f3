//! The CBHD development: homogeneous polynomials Φ_m(X₁,…,X_n) obtained from
//! the first Eulerian idempotent, rewriting of Lie elements as nested
//! commutators via the Dynkin operator, and numeric validation of
//! log(e^X e^Y) on matrices.

use crate::freetensor::{concat_mul, is_lie_element, series_exp, series_log, FreePoly, Word};
use crate::idempotents::{pi1_apply, HopfSide};
use crate::rat::{factorial, qi, Q};
use nalgebra::DMatrix;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CbhdError {
    #[error("input is not a Lie element")]
    NotLie,
    #[error("matrix shapes are incompatible")]
    ShapeMismatch,
}

/// A binary bracket tree with letter leaves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BracketTree {
    Leaf(usize),
    Node(Box<BracketTree>, Box<BracketTree>),
}

impl BracketTree {
    /// Left-to-right bracketing of a word: [...[[v1,v2],v3],...,vn].
    pub fn left_nested(word: &Word) -> Self {
        assert!(!word.is_empty());
        let mut it = word.0.iter();
        let mut acc = BracketTree::Leaf(*it.next().unwrap());
        for &letter in it {
            acc = BracketTree::Node(Box::new(acc), Box::new(BracketTree::Leaf(letter)));
        }
        acc
    }

    /// Expands the tree into the free algebra via [a,b] = ab − ba.
    pub fn expand(&self) -> FreePoly {
        match self {
            BracketTree::Leaf(i) => FreePoly::letter(*i),
            BracketTree::Node(l, r) => {
                let a = l.expand();
                let b = r.expand();
                concat_mul(&a, &b).sub(&concat_mul(&b, &a))
            }
        }
    }
}

/// A bracket tree with a rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTerm {
    pub coefficient: Q,
    pub tree: BracketTree,
}

/// Expands a list of bracket terms into the free algebra.
pub fn expand_bracket_terms(terms: &[BracketTerm]) -> FreePoly {
    let mut out = FreePoly::zero();
    for t in terms {
        out = out.add(&t.tree.expand().scale(&t.coefficient));
    }
    out
}

/// All compositions (i₁,…,i_n) of m into n nonnegative parts.
fn weak_compositions(m: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for first in 0..=m {
        for mut rest in weak_compositions(m - first, n - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// The degree-m homogeneous CBHD polynomial in n letters:
/// Φ_m = Σ over (i₁,…,i_n) with Σi = m of (1/(i₁!…i_n!)) π₁(X₁^{i₁}…X_n^{i_n}).
pub fn phi_m(n_letters: usize, m: usize) -> FreePoly {
    assert!(n_letters >= 1 && m >= 1);
    let mut out = FreePoly::zero();
    for comp in weak_compositions(m, n_letters) {
        let mut letters = Vec::with_capacity(m);
        for (letter, &count) in comp.iter().enumerate() {
            letters.extend(std::iter::repeat(letter).take(count));
        }
        let mut denom = Q::one();
        for &count in &comp {
            denom *= factorial(count);
        }
        let word = FreePoly::monomial(Word(letters), Q::one());
        out = out.add(&pi1_apply(&word, HopfSide::ConcatUnshuffle).scale(&(Q::one() / denom)));
    }
    out
}

/// Rewrites a Lie element as nested left-to-right commutators: each
/// homogeneous degree-n word w with coefficient c contributes (c/n) times
/// the left-nested bracketing of w.
pub fn to_nested_commutators(p: &FreePoly) -> Result<Vec<BracketTerm>, CbhdError> {
    if !is_lie_element(p).is_lie {
        return Err(CbhdError::NotLie);
    }
    let mut acc: std::collections::BTreeMap<BracketTree, Q> = std::collections::BTreeMap::new();
    for (w, c) in p.terms() {
        let n = w.len();
        if n == 0 {
            continue;
        }
        // canonicalize the innermost pair: [b,a] = −[a,b] for letters a < b
        let mut letters = w.0.clone();
        let mut coeff = c / qi(n as i64);
        if n >= 2 && letters[0] > letters[1] {
            letters.swap(0, 1);
            coeff = -coeff;
        }
        let tree = BracketTree::left_nested(&Word(letters));
        let entry = acc.entry(tree).or_insert_with(Q::zero);
        *entry += coeff;
    }
    Ok(acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(tree, coefficient)| BracketTerm { coefficient, tree })
        .collect())
}

/// log(e^x e^y) in the free algebra on two letters, truncated at degree N.
pub fn cbhd_log(n: usize) -> FreePoly {
    let x = FreePoly::letter(0);
    let y = FreePoly::letter(1);
    let prod = concat_mul(&series_exp(&x, n).unwrap(), &series_exp(&y, n).unwrap());
    series_log(&prod, n).unwrap()
}

/// Substitutes a word by the corresponding product of matrices.
fn eval_word(word: &Word, mats: &[DMatrix<f64>], dim: usize) -> DMatrix<f64> {
    let mut acc = DMatrix::identity(dim, dim);
    for &i in &word.0 {
        acc = acc * &mats[i];
    }
    acc
}

/// Evaluates a FreePoly by substituting matrices for letters.
pub fn eval_poly(p: &FreePoly, mats: &[DMatrix<f64>]) -> Result<DMatrix<f64>, CbhdError> {
    let dim = mats.first().map(|m| m.nrows()).unwrap_or(0);
    for m in mats {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(CbhdError::ShapeMismatch);
        }
    }
    let mut acc = DMatrix::zeros(dim, dim);
    for (w, c) in p.terms() {
        let cf = rat_to_f64(c);
        acc += eval_word(w, mats, dim) * cf;
    }
    Ok(acc)
}

pub fn rat_to_f64(c: &Q) -> f64 {
    crate::rat::q_to_f64(c)
}

/// Substitutes matrices A, B into the degree-N truncation of log(e^x e^y).
pub fn cbhd_eval(a: &DMatrix<f64>, b: &DMatrix<f64>, n: usize) -> Result<DMatrix<f64>, CbhdError> {
    if a.nrows() != a.ncols() || a.shape() != b.shape() {
        return Err(CbhdError::ShapeMismatch);
    }
    eval_poly(&cbhd_log(n), &[a.clone(), b.clone()])
}

/// Σ_{m=1}^{N} Φ_m for a given letter count: the CBHD series truncation
/// computed through the Eulerian idempotent rather than the formal log.
pub fn cbhd_via_phi(n_letters: usize, n: usize) -> FreePoly {
    let mut out = FreePoly::zero();
    for m in 1..=n {
        out = out.add(&phi_m(n_letters, m));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freetensor::dynkin;
    use crate::rat::q;

    fn br(a: &FreePoly, b: &FreePoly) -> FreePoly {
        concat_mul(a, b).sub(&concat_mul(b, a))
    }

    #[test]
    fn phi_one_and_two() {
        let x = FreePoly::letter(0);
        let y = FreePoly::letter(1);
        assert_eq!(phi_m(2, 1), x.add(&y));
        assert_eq!(phi_m(2, 2), br(&x, &y).scale(&q(1, 2)));
    }

    #[test]
    fn phi_three_and_four() {
        let x = FreePoly::letter(0);
        let y = FreePoly::letter(1);
        let xy = br(&x, &y);
        let expected3 = br(&xy, &y).sub(&br(&xy, &x)).scale(&q(1, 12));
        assert_eq!(phi_m(2, 3), expected3);
        let expected4 = br(&br(&xy, &x), &y).scale(&q(-1, 24));
        assert_eq!(phi_m(2, 4), expected4);
    }

    #[test]
    fn phi_is_primitive() {
        for m in 1..=6 {
            assert!(is_lie_element(&phi_m(2, m)).is_lie, "Φ_{m} not primitive");
        }
    }

    #[test]
    fn phi_multilinear_part() {
        // the coefficient of squarefree words in Φ_n over n letters matches
        // the first idempotent on the multilinear word
        for n in 1..=5usize {
            let letters: Vec<usize> = (0..n).collect();
            let multilinear = crate::idempotents::descent_pi1_apply(&letters);
            let phi = phi_m(n, n);
            for (w, c) in multilinear.terms() {
                assert_eq!(&phi.coeff(w), c, "n = {n}, word {w}");
            }
        }
    }

    #[test]
    fn dynkin_eigenvalue_on_phi() {
        for m in 1..=6 {
            let phi = phi_m(2, m);
            assert_eq!(dynkin(&phi), phi.scale(&qi(m as i64)));
        }
    }

    #[test]
    fn log_pipeline_matches_phi_pipeline() {
        for n in 1..=6 {
            assert_eq!(cbhd_log(n), cbhd_via_phi(2, n).truncated(n), "degree {n}");
        }
    }

    #[test]
    fn nested_commutators_roundtrip() {
        let x = FreePoly::letter(0);
        let y = FreePoly::letter(1);
        let comm = br(&x, &y);
        let terms = to_nested_commutators(&comm).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].coefficient, Q::one());
        assert_eq!(expand_bracket_terms(&terms), comm);

        for m in 2..=5 {
            let phi = phi_m(2, m);
            let terms = to_nested_commutators(&phi).unwrap();
            assert_eq!(expand_bracket_terms(&terms), phi, "Φ_{m} roundtrip");
        }

        assert_eq!(
            to_nested_commutators(&concat_mul(&x, &y)),
            Err(CbhdError::NotLie)
        );
    }

    #[test]
    fn phi_two_commutators_display() {
        // Φ₂ rewrites as exactly (1/2)[x,y]
        let terms = to_nested_commutators(&phi_m(2, 2)).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].coefficient, q(1, 2));
        assert_eq!(
            terms[0].tree,
            BracketTree::Node(Box::new(BracketTree::Leaf(0)), Box::new(BracketTree::Leaf(1)))
        );
    }

    #[test]
    fn cbhd_eval_commuting_and_inverse() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.3, -0.1, 0.7]));
        let b = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-0.2, 0.5, 0.4]));
        let z = cbhd_eval(&a, &b, 6).unwrap();
        assert!((&z - (&a + &b)).norm() < 1e-14);

        let z = cbhd_eval(&a, &(-a.clone()), 6).unwrap();
        assert!(z.norm() < 1e-14);
    }

    #[test]
    fn cbhd_eval_matches_matrix_log_product() {
        // small random-ish matrices: exp(cbhd_eval(A,B,N)) → e^A e^B as N grows
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 0.12, -0.08, 0.05, 0.0, 0.11, -0.04, 0.06, 0.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.02, -0.1, 0.07, 0.0, 0.03, -0.05, 0.09, 0.0, -0.06]);
        let target = a.exp() * b.exp();
        let mut prev = f64::INFINITY;
        for n in [2usize, 4, 6] {
            let z = cbhd_eval(&a, &b, n).unwrap();
            let err = (z.exp() - &target).norm();
            assert!(err < prev, "error not shrinking at N = {n}");
            prev = err;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = DMatrix::zeros(2, 2);
        let b = DMatrix::zeros(3, 3);
        assert!(matches!(cbhd_eval(&a, &b, 2), Err(CbhdError::ShapeMismatch)));
    }
}
