//! The Faà di Bruno Hopf algebra: partial exponential Bell polynomials,
//! composition of exponential power series, the composition coproduct on
//! the polynomial algebra in a₂, a₃, … (with a₁ = 1), the graded-dual
//! Witt-type bracket [b′_n, b′_m] = (m−n)b′_{n+m} computed from the
//! convolution product, the antipode, and the primitive-space dimensions.

use crate::rat::{factorial, Q, RatMat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FdbError {
    #[error("require 1 <= k <= n (got n = {0}, k = {1})")]
    IndexError(usize, usize),
    #[error("series must start with a nonzero linear coefficient")]
    NotInvertible,
}

/// Partition vectors λ = (λ₁, …, λ_n) with Σ i·λ_i = n and Σ λ_i = k.
fn partition_vectors(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(part: usize, rem_n: usize, rem_k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if part == 0 {
            if rem_n == 0 && rem_k == 0 {
                let mut v = cur.clone();
                v.reverse();
                out.push(v);
            }
            return;
        }
        // choose λ_part = m
        let max_m = (rem_n / part).min(rem_k);
        for m in 0..=max_m {
            cur.push(m);
            rec(part - 1, rem_n - m * part, rem_k - m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, k, &mut Vec::new(), &mut out);
    out
}

/// Multinomial-partition count binom(n; λ; k) = n!/(Π λ_i!·(i!)^{λ_i}).
fn partition_multinomial(n: usize, lambda: &[usize]) -> Q {
    let mut den = Q::one();
    for (i, &l) in lambda.iter().enumerate() {
        den *= factorial(l);
        let f = factorial(i + 1);
        for _ in 0..l {
            den *= &f;
        }
    }
    factorial(n) / den
}

/// Partial exponential Bell polynomial B_{n,k} evaluated at g₁, g₂, …
/// (g[i] is g_{i+1}; entries beyond the supplied slice are treated as 0).
pub fn bell(n: usize, k: usize, g: &[Q]) -> Result<Q, FdbError> {
    if k == 0 || k > n {
        return Err(FdbError::IndexError(n, k));
    }
    let mut out = Q::zero();
    for lambda in partition_vectors(n, k) {
        let mut term = partition_multinomial(n, &lambda);
        let mut skip = false;
        for (i, &l) in lambda.iter().enumerate() {
            if l == 0 {
                continue;
            }
            let gi = g.get(i).cloned().unwrap_or_else(Q::zero);
            if gi.is_zero() {
                skip = true;
                break;
            }
            for _ in 0..l {
                term *= &gi;
            }
        }
        if !skip {
            out += term;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Exponential power series and composition
// ---------------------------------------------------------------------------

/// Formal series f(t) = Σ_{n≥1} f_n tⁿ/n! truncated at order N; coeffs[i]
/// stores f_{i+1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpSeries {
    pub coeffs: Vec<Q>,
}

impl ExpSeries {
    pub fn new(coeffs: Vec<Q>) -> Self {
        ExpSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> Q {
        self.coeffs.get(n - 1).cloned().unwrap_or_else(Q::zero)
    }

    /// The identity series t.
    pub fn identity(n: usize) -> Self {
        let mut coeffs = vec![Q::zero(); n];
        coeffs[0] = Q::one();
        ExpSeries { coeffs }
    }
}

/// Composition f∘g through order N via h_n = Σ_k f_k·B_{n,k}(g₁, g₂, …).
pub fn compose_series(f: &ExpSeries, g: &ExpSeries, n_max: usize) -> ExpSeries {
    let mut coeffs = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut h = Q::zero();
        for k in 1..=n {
            let fk = f.coeff(k);
            if fk.is_zero() {
                continue;
            }
            h += fk * bell(n, k, &g.coeffs).unwrap();
        }
        coeffs.push(h);
    }
    ExpSeries { coeffs }
}

/// Independent chain-rule oracle: composes via truncated ordinary power
/// series (h_ord = Σ_k (f_k/k!)·g_ord^k) and converts back.
pub fn compose_series_oracle(f: &ExpSeries, g: &ExpSeries, n_max: usize) -> ExpSeries {
    let g_ord: Vec<Q> = (1..=n_max).map(|i| g.coeff(i) / factorial(i)).collect();
    // powers of g_ord as polynomials with zero constant term
    let mut h_ord = vec![Q::zero(); n_max + 1];
    let mut g_pow = vec![Q::zero(); n_max + 1];
    g_pow[0] = Q::one();
    for k in 1..=n_max {
        // g_pow <- g_pow * g_ord
        let mut next = vec![Q::zero(); n_max + 1];
        for i in 0..=n_max {
            if g_pow[i].is_zero() {
                continue;
            }
            for (j, gc) in g_ord.iter().enumerate() {
                let deg = i + j + 1;
                if deg > n_max {
                    break;
                }
                next[deg] += &g_pow[i] * gc;
            }
        }
        g_pow = next;
        let fk = f.coeff(k) / factorial(k);
        if !fk.is_zero() {
            for d in 0..=n_max {
                h_ord[d] += &fk * &g_pow[d];
            }
        }
    }
    ExpSeries::new((1..=n_max).map(|n| &h_ord[n] * factorial(n)).collect())
}

/// Compositional inverse of f (f₁ must be nonzero), solved order by order
/// from compose(f, g) = id.
pub fn inverse_series(f: &ExpSeries, n_max: usize) -> Result<ExpSeries, FdbError> {
    let f1 = f.coeff(1);
    if f1.is_zero() {
        return Err(FdbError::NotInvertible);
    }
    let mut g = ExpSeries::new(vec![Q::zero(); n_max]);
    g.coeffs[0] = Q::one() / &f1;
    for n in 2..=n_max {
        // h_n depends linearly on g_n through f₁·B_{n,n-?}: isolate it
        let h = compose_series(f, &g, n).coeff(n);
        let target = if n == 1 { Q::one() } else { Q::zero() };
        // coefficient of g_n in h_n is f₁ (from B_{n,1} = g_n)
        g.coeffs[n - 1] = (target - h) / &f1;
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// The Hopf algebra on R[a₂, a₃, …]
// ---------------------------------------------------------------------------

/// Monomial in the generators a₂, a₃, …: sorted (generator, exponent) pairs.
pub type Mono = Vec<(usize, u32)>;

/// Grading |a_n| = n − 1, extended additively.
pub fn mono_degree(m: &Mono) -> usize {
    m.iter().map(|&(n, e)| (n - 1) * e as usize).sum()
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut map: BTreeMap<usize, u32> = a.iter().cloned().collect();
    for &(n, e) in b {
        *map.entry(n).or_insert(0) += e;
    }
    map.into_iter().collect()
}

/// Polynomial in the generators with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FdBPoly {
    pub terms: BTreeMap<Mono, Q>,
}

impl FdBPoly {
    pub fn zero() -> Self {
        FdBPoly::default()
    }

    pub fn one() -> Self {
        FdBPoly::term(vec![], Q::one())
    }

    pub fn generator(n: usize) -> Self {
        assert!(n >= 2);
        FdBPoly::term(vec![(n, 1)], Q::one())
    }

    pub fn term(m: Mono, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        FdBPoly { terms }
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &FdBPoly) -> FdBPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> FdBPoly {
        if c.is_zero() {
            return FdBPoly::zero();
        }
        FdBPoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &FdBPoly) -> FdBPoly {
        let mut out = FdBPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    /// Evaluates at a series: a_n ↦ f_n.
    pub fn eval(&self, f: &ExpSeries) -> Q {
        let mut out = Q::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for &(n, e) in m {
                let fc = f.coeff(n);
                for _ in 0..e {
                    v *= &fc;
                }
            }
            out += v;
        }
        out
    }
}

/// Element of F ⊗ F.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FdBTensor {
    pub terms: BTreeMap<(Mono, Mono), Q>,
}

impl FdBTensor {
    pub fn zero() -> Self {
        FdBTensor::default()
    }

    pub fn add_term(&mut self, l: Mono, r: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((l, r)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &FdBTensor) -> FdBTensor {
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &FdBTensor) -> FdBTensor {
        let mut out = FdBTensor::zero();
        for ((la, ra), ca) in &self.terms {
            for ((lb, rb), cb) in &other.terms {
                out.add_term(mono_mul(la, lb), mono_mul(ra, rb), ca * cb);
            }
        }
        out
    }

    pub fn sub(&self, other: &FdBTensor) -> FdBTensor {
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), -c.clone());
        }
        out
    }
}

/// B_{n,k}(1, a₂, …, a_{n+1−k}) as a polynomial (the a₁ = 1 reduction).
pub fn bell_poly_reduced(n: usize, k: usize) -> Result<FdBPoly, FdbError> {
    if k == 0 || k > n {
        return Err(FdbError::IndexError(n, k));
    }
    let mut out = FdBPoly::zero();
    for lambda in partition_vectors(n, k) {
        let coeff = partition_multinomial(n, &lambda);
        let mono: Mono = lambda
            .iter()
            .enumerate()
            .filter(|&(i, &l)| i + 1 >= 2 && l > 0)
            .map(|(i, &l)| (i + 1, l as u32))
            .collect();
        out.add_term(mono, coeff);
    }
    Ok(out)
}

/// Coproduct of a generator: Δa_n = Σ_k B_{n,k}(1, a₂, …) ⊗ a_k, with
/// a₁ ≡ 1 (so the k = 1 right leg is the counit part a_n ⊗ 1).
pub fn fdb_coproduct(n: usize) -> FdBTensor {
    assert!(n >= 1);
    let mut out = FdBTensor::zero();
    for k in 1..=n {
        let left = bell_poly_reduced(n, k).unwrap();
        let right: Mono = if k >= 2 { vec![(k, 1)] } else { vec![] };
        for (m, c) in &left.terms {
            out.add_term(m.clone(), right.clone(), c.clone());
        }
    }
    out
}

/// Coproduct extended multiplicatively to polynomials.
pub fn coproduct_poly(p: &FdBPoly) -> FdBTensor {
    let mut out = FdBTensor::zero();
    for (m, c) in &p.terms {
        let mut acc = FdBTensor::zero();
        acc.add_term(vec![], vec![], Q::one());
        for &(n, e) in m {
            let dn = fdb_coproduct(n);
            for _ in 0..e {
                acc = acc.mul(&dn);
            }
        }
        for ((l, r), v) in &acc.terms {
            out.add_term(l.clone(), r.clone(), c * v);
        }
    }
    out
}

/// All monomials of grading degree d in the generators a₂, a₃, ….
pub fn monomials_of_degree(d: usize) -> Vec<Mono> {
    // partitions of d into parts (n−1), n ≥ 2 → ordinary partitions of d
    fn rec(d: usize, max_part: usize, cur: &mut Vec<usize>, out: &mut Vec<Mono>) {
        if d == 0 {
            let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
            for &p in cur.iter() {
                *counts.entry(p + 1).or_insert(0) += 1;
            }
            out.push(counts.into_iter().collect());
            return;
        }
        for p in (1..=max_part.min(d)).rev() {
            cur.push(p);
            rec(d - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        out.push(vec![]);
        return out;
    }
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Graded dual: functionals, convolution, the b′ bracket
// ---------------------------------------------------------------------------

/// A linear functional on F with finite support over the monomial basis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Functional {
    pub values: BTreeMap<Mono, Q>,
}

impl Functional {
    pub fn zero() -> Self {
        Functional::default()
    }

    /// a′_n: 1 on the generator a_n, 0 elsewhere.
    pub fn a_prime(n: usize) -> Self {
        let mut values = BTreeMap::new();
        values.insert(vec![(n, 1)], Q::one());
        Functional { values }
    }

    /// b′_n = (n+1)!·a′_{n+1}.
    pub fn b_prime(n: usize) -> Self {
        Functional::a_prime(n + 1).scale(&factorial(n + 1))
    }

    pub fn scale(&self, c: &Q) -> Functional {
        Functional { values: self.values.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn sub(&self, other: &Functional) -> Functional {
        let mut out = self.clone();
        for (m, c) in &other.values {
            let e = out.values.entry(m.clone()).or_insert_with(Q::zero);
            *e -= c;
        }
        out.values.retain(|_, v| !v.is_zero());
        out
    }

    pub fn apply_mono(&self, m: &Mono) -> Q {
        self.values.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn apply(&self, p: &FdBPoly) -> Q {
        let mut out = Q::zero();
        for (m, c) in &p.terms {
            out += self.apply_mono(m) * c;
        }
        out
    }

    /// Convolution product (f*g)(P) = Σ f(P₍₁₎)·g(P₍₂₎), evaluated on all
    /// monomials of grading degree ≤ max_degree.
    pub fn convolve(&self, other: &Functional, max_degree: usize) -> Functional {
        let mut out = Functional::zero();
        for d in 0..=max_degree {
            for m in monomials_of_degree(d) {
                let cop = coproduct_poly(&FdBPoly::term(m.clone(), Q::one()));
                let mut v = Q::zero();
                for ((l, r), c) in &cop.terms {
                    let fl = self.apply_mono(l);
                    if fl.is_zero() {
                        continue;
                    }
                    v += fl * other.apply_mono(r) * c;
                }
                if !v.is_zero() {
                    out.values.insert(m, v);
                }
            }
        }
        out
    }
}

/// Convolution commutator [b′_n, b′_m], computed from the coproduct; equals
/// (m−n)·b′_{n+m}.
pub fn dual_bracket(n: usize, m: usize) -> Functional {
    let bn = Functional::b_prime(n);
    let bm = Functional::b_prime(m);
    let deg = n + m;
    bn.convolve(&bm, deg).sub(&bm.convolve(&bn, deg))
}

// ---------------------------------------------------------------------------
// Antipode and primitives
// ---------------------------------------------------------------------------

/// Antipode of a generator by the connected-graded recursion
/// S(a_n) = −a_n − Σ S(P)·a_k over the reduced coproduct terms.
pub fn antipode(n: usize) -> FdBPoly {
    if n == 1 {
        return FdBPoly::one();
    }
    let mut out = FdBPoly::generator(n).scale(&-Q::one());
    for k in 2..n {
        let left = bell_poly_reduced(n, k).unwrap();
        // S extended multiplicatively to the left leg
        for (m, c) in &left.terms {
            let mut s_left = FdBPoly::one();
            for &(g, e) in m {
                let sg = antipode(g);
                for _ in 0..e {
                    s_left = s_left.mul(&sg);
                }
            }
            out = out.add(&s_left.mul(&FdBPoly::generator(k)).scale(&-c.clone()));
        }
    }
    out
}

/// Basis of the primitive elements in grading degree d, by exact null-space
/// computation for Δ − (·⊗1 + 1⊗·) on the monomial basis.
pub fn primitive_space(d: usize) -> Vec<FdBPoly> {
    let monos = monomials_of_degree(d);
    // collect the target tensor basis
    let mut rows: BTreeMap<(Mono, Mono), usize> = BTreeMap::new();
    let mut columns: Vec<FdBTensor> = Vec::new();
    for m in &monos {
        let p = FdBPoly::term(m.clone(), Q::one());
        let mut t = coproduct_poly(&p);
        t = t.sub(&{
            let mut s = FdBTensor::zero();
            s.add_term(m.clone(), vec![], Q::one());
            s.add_term(vec![], m.clone(), Q::one());
            s
        });
        for key in t.terms.keys() {
            let next = rows.len();
            rows.entry(key.clone()).or_insert(next);
        }
        columns.push(t);
    }
    let mut mat = RatMat::zeros(rows.len().max(1), monos.len());
    for (j, t) in columns.iter().enumerate() {
        for (key, c) in &t.terms {
            mat[(rows[key], j)] = c.clone();
        }
    }
    crate::rat::null_space(&mat)
        .into_iter()
        .map(|v| {
            let mut p = FdBPoly::zero();
            for (j, c) in v.into_iter().enumerate() {
                p.add_term(monos[j].clone(), c);
            }
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_series(rng: &mut ChaCha8Rng, n: usize, unit_linear: bool) -> ExpSeries {
        let mut coeffs: Vec<Q> =
            (0..n).map(|_| q(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect();
        if unit_linear {
            coeffs[0] = Q::one();
        } else if coeffs[0].is_zero() {
            coeffs[0] = Q::one();
        }
        ExpSeries::new(coeffs)
    }

    #[test]
    fn bell_basic_values() {
        let g: Vec<Q> = vec![qi(7), qi(3), qi(5), qi(2), qi(1), qi(1)];
        // B_{n,1} = g_n, B_{n,n} = g₁ⁿ
        for n in 1..=5usize {
            assert_eq!(bell(n, 1, &g).unwrap(), g[n - 1]);
            let mut p = Q::one();
            for _ in 0..n {
                p *= &g[0];
            }
            assert_eq!(bell(n, n, &g).unwrap(), p);
        }
        // B_{3,2}(g₁, g₂) = 3g₁g₂
        assert_eq!(bell(3, 2, &g).unwrap(), qi(3) * &g[0] * &g[1]);
        assert_eq!(bell(3, 4, &g), Err(FdbError::IndexError(3, 4)));
    }

    #[test]
    fn compose_identity_and_h2() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let f = rand_series(&mut rng, 6, false);
        let id = ExpSeries::identity(6);
        assert_eq!(compose_series(&f, &id, 6), f);
        assert_eq!(compose_series(&id, &f, 6), f);
        let g = rand_series(&mut rng, 6, false);
        let h = compose_series(&f, &g, 6);
        // h₂ = f₁g₂ + f₂g₁²
        let expect = f.coeff(1) * g.coeff(2) + f.coeff(2) * g.coeff(1) * g.coeff(1);
        assert_eq!(h.coeff(2), expect);
    }

    #[test]
    fn compose_matches_chain_rule_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..10 {
            let f = rand_series(&mut rng, 8, false);
            let g = rand_series(&mut rng, 8, false);
            assert_eq!(compose_series(&f, &g, 8), compose_series_oracle(&f, &g, 8));
        }
    }

    #[test]
    fn compose_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let f = rand_series(&mut rng, 6, false);
        let g = rand_series(&mut rng, 6, false);
        let h = rand_series(&mut rng, 6, false);
        let lhs = compose_series(&compose_series(&f, &g, 6), &h, 6);
        let rhs = compose_series(&f, &compose_series(&g, &h, 6), 6);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn coproduct_low_degrees() {
        // Δa₂ = a₂ ⊗ 1 + 1 ⊗ a₂
        let d2 = fdb_coproduct(2);
        let mut expect = FdBTensor::zero();
        expect.add_term(vec![(2, 1)], vec![], Q::one());
        expect.add_term(vec![], vec![(2, 1)], Q::one());
        assert_eq!(d2, expect);
        // Δa₃ = a₃ ⊗ 1 + 1 ⊗ a₃ + 3a₂ ⊗ a₂
        let d3 = fdb_coproduct(3);
        let mut expect = FdBTensor::zero();
        expect.add_term(vec![(3, 1)], vec![], Q::one());
        expect.add_term(vec![], vec![(3, 1)], Q::one());
        expect.add_term(vec![(2, 1)], vec![(2, 1)], qi(3));
        assert_eq!(d3, expect);
    }

    #[test]
    fn coproduct_duality_with_composition() {
        // Δa_n(g, f) = a_n(f∘g): left leg pairs with g, right leg with f
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..5 {
            let f = rand_series(&mut rng, 6, true);
            let g = rand_series(&mut rng, 6, true);
            let h = compose_series(&f, &g, 6);
            for n in 2..=6usize {
                let cop = fdb_coproduct(n);
                let mut paired = Q::zero();
                for ((l, r), c) in &cop.terms {
                    let lv = FdBPoly::term(l.clone(), Q::one()).eval(&g);
                    let rv = FdBPoly::term(r.clone(), Q::one()).eval(&f);
                    paired += lv * rv * c;
                }
                assert_eq!(paired, h.coeff(n), "n = {n}");
            }
        }
    }

    #[test]
    fn coproduct_coassociative() {
        // flatten (Δ⊗id)Δ and (id⊗Δ)Δ over triples of monomials
        for n in 2..=6usize {
            let d = fdb_coproduct(n);
            let mut lhs: BTreeMap<(Mono, Mono, Mono), Q> = BTreeMap::new();
            let mut rhs: BTreeMap<(Mono, Mono, Mono), Q> = BTreeMap::new();
            for ((l, r), c) in &d.terms {
                for ((l2, r2), c2) in &coproduct_poly(&FdBPoly::term(l.clone(), Q::one())).terms {
                    let e = lhs.entry((l2.clone(), r2.clone(), r.clone())).or_insert_with(Q::zero);
                    *e += c * c2;
                }
                for ((l2, r2), c2) in &coproduct_poly(&FdBPoly::term(r.clone(), Q::one())).terms {
                    let e = rhs.entry((l.clone(), l2.clone(), r2.clone())).or_insert_with(Q::zero);
                    *e += c * c2;
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn dual_product_formula() {
        // a′_n a′_m = binom(m+n−1, n)·a′_{n+m−1} + (1 + δ_nm)·(a_n a_m)′,
        // for the generators of the reduced algebra (n, m ≥ 2)
        for n in 2..=4usize {
            for m in 2..=4usize {
                let prod = Functional::a_prime(n).convolve(&Functional::a_prime(m), n + m - 2);
                let mut expect = Functional::zero();
                if n + m - 1 >= 2 {
                    expect
                        .values
                        .insert(vec![(n + m - 1, 1)], crate::rat::binomial(m + n - 1, n));
                }
                if n >= 2 && m >= 2 {
                    let mono = mono_mul(&vec![(n, 1)], &vec![(m, 1)]);
                    let c = if n == m { qi(2) } else { qi(1) };
                    expect.values.insert(mono, c);
                }
                // compare on every monomial of the right degree
                for d in 0..=(n + m - 2) {
                    for mono in monomials_of_degree(d) {
                        assert_eq!(
                            prod.apply_mono(&mono),
                            expect.apply_mono(&mono),
                            "n = {n}, m = {m}, mono {mono:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn b_prime_bracket_table() {
        // [b′_n, b′_m] = (m−n)·b′_{n+m} for n + m ≤ 10, verified on the
        // full monomial basis of the matching degree
        for n in 1..=5usize {
            for m in 1..=5usize {
                if n + m > 10 {
                    continue;
                }
                let br = dual_bracket(n, m);
                let expect = Functional::b_prime(n + m).scale(&qi(m as i64 - n as i64));
                for d in 0..=(n + m) {
                    for mono in monomials_of_degree(d) {
                        assert_eq!(
                            br.apply_mono(&mono),
                            expect.apply_mono(&mono),
                            "n = {n}, m = {m}, mono {mono:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn a_prime_primitive() {
        // a′_n kills non-trivial products
        for n in 2..=6usize {
            let f = Functional::a_prime(n);
            for d in 1..n {
                for mono in monomials_of_degree(d) {
                    if mono.len() == 1 && mono[0].1 == 1 {
                        continue;
                    }
                    assert!(f.apply_mono(&mono).is_zero());
                }
            }
        }
    }

    #[test]
    fn antipode_convolution_inverse() {
        // m(S⊗id)Δa_n = 0 = m(id⊗S)Δa_n for n ≥ 2
        for n in 2..=6usize {
            let cop = fdb_coproduct(n);
            let mut left = FdBPoly::zero();
            let mut right = FdBPoly::zero();
            for ((l, r), c) in &cop.terms {
                let mut s_l = FdBPoly::one();
                for &(g, e) in l {
                    let sg = antipode(g);
                    for _ in 0..e {
                        s_l = s_l.mul(&sg);
                    }
                }
                let mut s_r = FdBPoly::one();
                for &(g, e) in r {
                    let sg = antipode(g);
                    for _ in 0..e {
                        s_r = s_r.mul(&sg);
                    }
                }
                let lp = FdBPoly::term(l.clone(), Q::one());
                let rp = FdBPoly::term(r.clone(), Q::one());
                left = left.add(&s_l.mul(&rp).scale(c));
                right = right.add(&lp.mul(&s_r).scale(c));
            }
            assert!(left.terms.is_empty(), "S*id at n = {n}: {left:?}");
            assert!(right.terms.is_empty(), "id*S at n = {n}");
        }
    }

    #[test]
    fn antipode_gives_compositional_inverse() {
        // evaluating S(a_n) at f yields the coefficients of f^{-1}
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let f = rand_series(&mut rng, 6, true);
        let finv = inverse_series(&f, 6).unwrap();
        for n in 2..=6usize {
            assert_eq!(antipode(n).eval(&f), finv.coeff(n), "n = {n}");
        }
    }

    #[test]
    fn primitive_space_dimensions() {
        let dims: Vec<usize> = (1..=5).map(|d| primitive_space(d).len()).collect();
        assert_eq!(dims, vec![1, 1, 0, 0, 0]);
        // degree 1: span{a₂}
        let p1 = &primitive_space(1)[0];
        let ratio = p1.terms[&vec![(2, 1)]].clone();
        assert_eq!(p1, &FdBPoly::generator(2).scale(&ratio));
        // degree 2: span{a₃ − (3/2)a₂²}
        let p2 = &primitive_space(2)[0];
        let c3 = p2.terms.get(&vec![(3, 1)]).cloned().unwrap();
        let expected = FdBPoly::generator(3)
            .add(&FdBPoly::term(vec![(2, 2)], q(-3, 2)))
            .scale(&c3);
        assert_eq!(p2, &expected);
    }
}
