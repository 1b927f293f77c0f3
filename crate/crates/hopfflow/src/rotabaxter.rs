//! Rota-Baxter algebras of arbitrary weight θ: the defining relation
//! R(a)R(b) = R(R(a)b) + R(aR(b)) − θR(ab), the double and pre-Lie
//! products, Atkinson's factorization on complete filtered carriers, and a
//! family of concrete instances (cumulative quadrature, geometric summation,
//! Jackson-type operators on monomials, matrix-pair projections, and
//! truncated matrix power series).

use crate::rat::{q_to_f64, qi, Q, RatMat};
use nalgebra::DMatrix;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RbError {
    #[error("grid must contain at least two nodes")]
    EmptyGrid,
    #[error("parameter outside the valid domain: {0}")]
    DomainError(String),
    #[error("operation requires a filtered carrier with a unit")]
    NotFiltered,
}

/// A Rota-Baxter algebra: a carrier with bilinear product and a linear
/// operator `apply_r` satisfying the weight-θ relation. The relation is
/// checked by [`RotaBaxter::rb_residual`], not assumed.
pub trait RotaBaxter {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    /// Multiplicative unit, when the carrier has one.
    fn one(&self) -> Option<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &Q, a: &Self::Elem) -> Self::Elem;
    fn apply_r(&self, a: &Self::Elem) -> Self::Elem;
    fn weight(&self) -> Q;
    /// A nonnegative size measure; 0 exactly for the zero element on exact
    /// carriers, a norm on float carriers.
    fn magnitude(&self, a: &Self::Elem) -> f64;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// R̃ = θ·id − R, a Rota-Baxter map of the same weight.
    fn apply_r_tilde(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.scale(&self.weight(), a), &self.apply_r(a))
    }

    /// R(a)R(b) − R(R(a)b) − R(aR(b)) + θR(ab); zero on a valid instance.
    fn rb_residual(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ra = self.apply_r(a);
        let rb = self.apply_r(b);
        let mut out = self.mul(&ra, &rb);
        out = self.sub(&out, &self.apply_r(&self.mul(&ra, b)));
        out = self.sub(&out, &self.apply_r(&self.mul(a, &rb)));
        self.add(&out, &self.apply_r(&self.scale(&self.weight(), &self.mul(a, b))))
    }

    /// Same residual for R̃ in place of R.
    fn rb_tilde_residual(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ra = self.apply_r_tilde(a);
        let rb = self.apply_r_tilde(b);
        let mut out = self.mul(&ra, &rb);
        out = self.sub(&out, &self.apply_r_tilde(&self.mul(&ra, b)));
        out = self.sub(&out, &self.apply_r_tilde(&self.mul(a, &rb)));
        self.add(&out, &self.apply_r_tilde(&self.scale(&self.weight(), &self.mul(a, b))))
    }

    /// Double Rota-Baxter product a *_R b = aR(b) + R(a)b − θab.
    fn double_product(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = self.mul(a, &self.apply_r(b));
        out = self.add(&out, &self.mul(&self.apply_r(a), b));
        self.sub(&out, &self.scale(&self.weight(), &self.mul(a, b)))
    }

    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(&self.mul(a, b), &self.mul(b, a))
    }

    /// Right pre-Lie product a ·_R b = [a, R(b)] + θba.
    fn pre_lie(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let out = self.commutator(a, &self.apply_r(b));
        self.add(&out, &self.scale(&self.weight(), &self.mul(b, a)))
    }

    /// [R(x),R(y)] + θR([x,y]) − R([R(x),y] + [x,R(y)]): the Rota-Baxter
    /// relation for the commutator bracket.
    fn rb_lie_residual(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let rx = self.apply_r(x);
        let ry = self.apply_r(y);
        let mut out = self.commutator(&rx, &ry);
        out = self.add(&out, &self.apply_r(&self.scale(&self.weight(), &self.commutator(x, y))));
        let inner = self.add(&self.commutator(&rx, y), &self.commutator(x, &ry));
        self.sub(&out, &self.apply_r(&inner))
    }
}

/// Carriers that are complete with respect to a decreasing filtration, as
/// needed by fixed-point constructions (Atkinson, the CBHD recursions).
pub trait FilteredRotaBaxter: RotaBaxter {
    /// Smallest filtration degree with a nonzero component; None for zero.
    fn filtration_degree(&self, a: &Self::Elem) -> Option<usize>;
    /// The truncation order of the carrier.
    fn truncation(&self) -> usize;
}

/// Solves Atkinson's equations X = 1 + R(aX), Y = 1 + R̃(Ya) by fixed-point
/// iteration; by the filtration at most `truncation()+1` iterations are
/// needed. `a` must have filtration degree ≥ 1.
pub fn atkinson_solve<B: FilteredRotaBaxter>(
    inst: &B,
    a: &B::Elem,
) -> Result<(B::Elem, B::Elem), RbError> {
    let one = inst.one().ok_or(RbError::NotFiltered)?;
    if inst.filtration_degree(a) == Some(0) {
        return Err(RbError::NotFiltered);
    }
    let n = inst.truncation();
    let mut x = one.clone();
    let mut y = one.clone();
    for _ in 0..=n {
        x = inst.add(&one, &inst.apply_r(&inst.mul(a, &x)));
        y = inst.add(&one, &inst.apply_r_tilde(&inst.mul(&y, a)));
    }
    Ok((x, y))
}

/// Residual of Atkinson's factorization Y(1 − θa)X − 1.
pub fn atkinson_factorization_residual<B: FilteredRotaBaxter>(
    inst: &B,
    a: &B::Elem,
    x: &B::Elem,
    y: &B::Elem,
) -> Result<B::Elem, RbError> {
    let one = inst.one().ok_or(RbError::NotFiltered)?;
    let middle = inst.sub(&one, &inst.scale(&inst.weight(), a));
    Ok(inst.sub(&inst.mul(&inst.mul(y, &middle), x), &one))
}

// ---------------------------------------------------------------------------
// Projection instance: pairs of k×k rational matrices, componentwise
// product, R(a, b) = θ(a, 0). A weight-θ Rota-Baxter map obtained by
// scaling the idempotent projection onto the first component.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ProjectionRB {
    pub k: usize,
    pub theta: Q,
}

impl ProjectionRB {
    pub fn new(k: usize, theta: Q) -> Result<Self, RbError> {
        if theta.is_zero() {
            return Err(RbError::DomainError("projection weight must be nonzero".into()));
        }
        Ok(ProjectionRB { k, theta })
    }
}

impl RotaBaxter for ProjectionRB {
    type Elem = (RatMat, RatMat);

    fn zero(&self) -> Self::Elem {
        (RatMat::zeros(self.k, self.k), RatMat::zeros(self.k, self.k))
    }

    fn one(&self) -> Option<Self::Elem> {
        Some((RatMat::identity(self.k), RatMat::identity(self.k)))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (a.0.add(&b.0), a.1.add(&b.1))
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        (a.0.neg(), a.1.neg())
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (a.0.mul(&b.0), a.1.mul(&b.1))
    }

    fn scale(&self, c: &Q, a: &Self::Elem) -> Self::Elem {
        (a.0.scale(c), a.1.scale(c))
    }

    fn apply_r(&self, a: &Self::Elem) -> Self::Elem {
        (a.0.scale(&self.theta), RatMat::zeros(self.k, self.k))
    }

    fn weight(&self) -> Q {
        self.theta.clone()
    }

    fn magnitude(&self, a: &Self::Elem) -> f64 {
        let mut m: f64 = 0.0;
        for part in [&a.0, &a.1] {
            for i in 0..part.rows {
                for j in 0..part.cols {
                    m = m.max(q_to_f64(&part[(i, j)]).abs());
                }
            }
        }
        m
    }
}

// ---------------------------------------------------------------------------
// Summation instance: the carrier is spanned by geometric grid functions
// x ↦ c·r^{x/θ} with ratio r ∈ (0,1); the summation operator
// Z(f)(x) = Σ_{n≥1} θf(x+θn) acts in closed form as c ↦ c·θr/(1−r).
// Z obeys Z(f)Z(g) = Z(Z(f)g) + Z(fZ(g)) + θZ(fg), i.e. it is Rota-Baxter
// of weight −θ in the standard sign convention.
// ---------------------------------------------------------------------------

/// Linear combination of geometric functions, keyed by ratio.
pub type GeomSum = BTreeMap<Q, Q>;

#[derive(Debug, Clone)]
pub struct SummationRB {
    pub theta: Q,
}

impl SummationRB {
    pub fn new(theta: Q) -> Result<Self, RbError> {
        if theta <= Q::zero() {
            return Err(RbError::DomainError("summation step must be positive".into()));
        }
        Ok(SummationRB { theta })
    }

    /// The basis function x ↦ c·r^{x/θ}; requires r ∈ (0,1).
    pub fn geom(&self, c: Q, r: Q) -> Result<GeomSum, RbError> {
        if r <= Q::zero() || r >= Q::one() {
            return Err(RbError::DomainError(format!("ratio {r} outside (0,1)")));
        }
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(r, c);
        }
        Ok(m)
    }

    /// Finite-difference partner δ(f)(x) = (f(x−θ) − f(x))/θ, a
    /// skewderivation of weight −θ and the two-sided inverse of Z.
    pub fn delta(&self, a: &GeomSum) -> GeomSum {
        let mut out = BTreeMap::new();
        for (r, c) in a {
            // (r^{-1} − 1)/θ multiplier
            let factor = (Q::one() / r - Q::one()) / &self.theta;
            out.insert(r.clone(), c * factor);
        }
        out
    }
}

fn geom_add(a: &GeomSum, b: &GeomSum) -> GeomSum {
    let mut out = a.clone();
    for (r, c) in b {
        let v = out.remove(r).unwrap_or_else(Q::zero) + c;
        if !v.is_zero() {
            out.insert(r.clone(), v);
        } else {
            out.remove(r);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl RotaBaxter for SummationRB {
    type Elem = GeomSum;

    fn zero(&self) -> Self::Elem {
        BTreeMap::new()
    }

    fn one(&self) -> Option<Self::Elem> {
        // the constant function has ratio 1, outside the carrier
        None
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        geom_add(a, b)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|(r, c)| (r.clone(), -c)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out: GeomSum = BTreeMap::new();
        for (r1, c1) in a {
            for (r2, c2) in b {
                let r = r1 * r2;
                let v = out.remove(&r).unwrap_or_else(Q::zero) + c1 * c2;
                if !v.is_zero() {
                    out.insert(r, v);
                }
            }
        }
        out
    }

    fn scale(&self, c: &Q, a: &Self::Elem) -> Self::Elem {
        if c.is_zero() {
            return BTreeMap::new();
        }
        a.iter().map(|(r, k)| (r.clone(), k * c)).collect()
    }

    fn apply_r(&self, a: &Self::Elem) -> Self::Elem {
        a.iter()
            .map(|(r, c)| {
                let factor = &self.theta * r / (Q::one() - r);
                (r.clone(), c * factor)
            })
            .collect()
    }

    fn weight(&self) -> Q {
        -self.theta.clone()
    }

    fn magnitude(&self, a: &Self::Elem) -> f64 {
        a.values().map(|c| q_to_f64(c).abs()).sum()
    }
}

// ---------------------------------------------------------------------------
// Jackson-type instance: monomials x^m (m ≥ 1) with exact rational
// coefficients. P_q[x^m] = q^m/(1−q^m)·x^m is Rota-Baxter of weight −1;
// the modified Jackson integral J̄ = (1−q)(id + P_q) has weight 1−q.
// ---------------------------------------------------------------------------

/// Polynomial without constant term, keyed by exponent m ≥ 1.
pub type QPoly = BTreeMap<u32, Q>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacksonKind {
    /// P_q, weight −1.
    Pq,
    /// J̄ = (1−q)(id + P_q), weight 1−q.
    Modified,
}

#[derive(Debug, Clone)]
pub struct JacksonRB {
    pub q: Q,
    pub kind: JacksonKind,
}

impl JacksonRB {
    pub fn new(q: Q, kind: JacksonKind) -> Result<Self, RbError> {
        if q <= Q::zero() || q >= Q::one() {
            return Err(RbError::DomainError(format!("q = {q} outside (0,1)")));
        }
        Ok(JacksonRB { q, kind })
    }

    /// The monomial c·x^m; constants (m = 0) are outside the carrier.
    pub fn monomial(&self, c: Q, m: u32) -> Result<QPoly, RbError> {
        if m == 0 {
            return Err(RbError::DomainError("constant term not in the carrier".into()));
        }
        let mut p = BTreeMap::new();
        if !c.is_zero() {
            p.insert(m, c);
        }
        Ok(p)
    }

    fn pq_factor(&self, m: u32) -> Q {
        let qm = num_traits::pow::pow(self.q.clone(), m as usize);
        qm.clone() / (Q::one() - qm)
    }
}

impl RotaBaxter for JacksonRB {
    type Elem = QPoly;

    fn zero(&self) -> Self::Elem {
        BTreeMap::new()
    }

    fn one(&self) -> Option<Self::Elem> {
        None
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = a.clone();
        for (m, c) in b {
            let v = out.remove(m).unwrap_or_else(Q::zero) + c;
            if !v.is_zero() {
                out.insert(*m, v);
            }
        }
        out
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|(m, c)| (*m, -c)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out: QPoly = BTreeMap::new();
        for (m1, c1) in a {
            for (m2, c2) in b {
                let m = m1 + m2;
                let v = out.remove(&m).unwrap_or_else(Q::zero) + c1 * c2;
                if !v.is_zero() {
                    out.insert(m, v);
                }
            }
        }
        out
    }

    fn scale(&self, c: &Q, a: &Self::Elem) -> Self::Elem {
        if c.is_zero() {
            return BTreeMap::new();
        }
        a.iter().map(|(m, k)| (*m, k * c)).collect()
    }

    fn apply_r(&self, a: &Self::Elem) -> Self::Elem {
        match self.kind {
            JacksonKind::Pq => a.iter().map(|(m, c)| (*m, c * self.pq_factor(*m))).collect(),
            JacksonKind::Modified => {
                let scale = Q::one() - &self.q;
                a.iter()
                    .map(|(m, c)| (*m, c * &scale * (Q::one() + self.pq_factor(*m))))
                    .collect()
            }
        }
    }

    fn weight(&self) -> Q {
        match self.kind {
            JacksonKind::Pq => -Q::one(),
            JacksonKind::Modified => Q::one() - self.q.clone(),
        }
    }

    fn magnitude(&self, a: &Self::Elem) -> f64 {
        a.values().map(|c| q_to_f64(c).abs()).sum()
    }
}

// ---------------------------------------------------------------------------
// Riemann instance: matrix-valued grid functions on a uniform grid over
// [0, T]; R is the cumulative integral computed by a per-interval quintic
// interpolation rule (exact on polynomials of degree ≤ 5). Weight 0.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RiemannRB {
    /// Grid nodes 0 = t_0 < … < t_{n−1} = T, uniform.
    pub grid: Vec<f64>,
    pub dim: usize,
    /// weights[o][k]: integral over [u_o, u_{o+1}] of the k-th Lagrange
    /// basis polynomial on nodes u = 0..5, in units of the grid step.
    weights: [[f64; 6]; 5],
}

/// Exact Lagrange-basis integrals for the 6-node stencil: the weight of node
/// k when integrating the interpolant over the sub-interval [o, o+1].
fn quintic_weights() -> [[f64; 6]; 5] {
    let mut out = [[0.0; 6]; 5];
    for (o, row) in out.iter_mut().enumerate() {
        for (k, w) in row.iter_mut().enumerate() {
            // numerator polynomial Π_{j≠k} (u − j), coefficients low-to-high
            let mut poly = vec![Q::one()];
            let mut denom = Q::one();
            for j in 0..6usize {
                if j == k {
                    continue;
                }
                denom *= qi(k as i64 - j as i64);
                let mut next = vec![Q::zero(); poly.len() + 1];
                for (d, c) in poly.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= c * qi(j as i64);
                }
                poly = next;
            }
            let mut integral = Q::zero();
            for (d, c) in poly.iter().enumerate() {
                let upper = num_traits::pow::pow(qi(o as i64 + 1), d + 1);
                let lower = num_traits::pow::pow(qi(o as i64), d + 1);
                integral += c * (upper - lower) / qi(d as i64 + 1);
            }
            *w = q_to_f64(&(integral / denom));
        }
    }
    out
}

impl RiemannRB {
    pub fn uniform(t_end: f64, n_nodes: usize, dim: usize) -> Result<Self, RbError> {
        if n_nodes < 6 {
            return Err(RbError::EmptyGrid);
        }
        let h = t_end / (n_nodes - 1) as f64;
        let grid = (0..n_nodes).map(|i| i as f64 * h).collect();
        Ok(RiemannRB { grid, dim, weights: quintic_weights() })
    }

    /// Samples a matrix-valued function on the grid.
    pub fn sample(&self, f: impl Fn(f64) -> DMatrix<f64>) -> Vec<DMatrix<f64>> {
        self.grid.iter().map(|&t| f(t)).collect()
    }

    /// Samples a scalar function (1×1 matrices).
    pub fn sample_scalar(&self, f: impl Fn(f64) -> f64) -> Vec<DMatrix<f64>> {
        self.grid.iter().map(|&t| DMatrix::from_element(1, 1, f(t))).collect()
    }

    /// Integral over one interval [t_i, t_{i+1}] of the quintic through six
    /// neighbouring nodes, clamped at the ends of the grid.
    fn interval_integral(&self, f: &[DMatrix<f64>], i: usize) -> DMatrix<f64> {
        let n = self.grid.len();
        let h = self.grid[1] - self.grid[0];
        let s = i.saturating_sub(2).min(n - 6);
        let o = i - s;
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        for k in 0..6 {
            acc += &f[s + k] * self.weights[o][k];
        }
        acc * h
    }
}

impl RotaBaxter for RiemannRB {
    type Elem = Vec<DMatrix<f64>>;

    fn zero(&self) -> Self::Elem {
        vec![DMatrix::zeros(self.dim, self.dim); self.grid.len()]
    }

    fn one(&self) -> Option<Self::Elem> {
        Some(vec![DMatrix::identity(self.dim, self.dim); self.grid.len()])
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| -x).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| x * y).collect()
    }

    fn scale(&self, c: &Q, a: &Self::Elem) -> Self::Elem {
        let cf = q_to_f64(c);
        a.iter().map(|x| x * cf).collect()
    }

    fn apply_r(&self, a: &Self::Elem) -> Self::Elem {
        let mut out = Vec::with_capacity(a.len());
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        out.push(acc.clone());
        for i in 0..a.len() - 1 {
            acc += self.interval_integral(a, i);
            out.push(acc.clone());
        }
        out
    }

    fn weight(&self) -> Q {
        Q::zero()
    }

    fn magnitude(&self, a: &Self::Elem) -> f64 {
        a.iter().map(|m| m.abs().max()).fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Truncated power series over a base Rota-Baxter carrier, with R lifted
// coefficientwise. Complete filtered by the order of the first nonzero
// coefficient.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SeriesRB<B: RotaBaxter> {
    pub base: B,
    pub trunc: usize,
}

impl<B: RotaBaxter> SeriesRB<B> {
    pub fn new(base: B, trunc: usize) -> Self {
        SeriesRB { base, trunc }
    }

    /// The monomial a·t^k.
    pub fn monomial(&self, a: B::Elem, k: usize) -> Vec<B::Elem> {
        let mut v = vec![self.base.zero(); self.trunc + 1];
        if k <= self.trunc {
            v[k] = a;
        }
        v
    }
}

impl<B: RotaBaxter> RotaBaxter for SeriesRB<B> {
    type Elem = Vec<B::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.trunc + 1]
    }

    fn one(&self) -> Option<Self::Elem> {
        let mut v = vec![self.base.zero(); self.trunc + 1];
        v[0] = self.base.one()?;
        Some(v)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = self.zero();
        for i in 0..=self.trunc {
            for j in 0..=self.trunc - i {
                let term = self.base.mul(&a[i], &b[j]);
                out[i + j] = self.base.add(&out[i + j], &term);
            }
        }
        out
    }

    fn scale(&self, c: &Q, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.scale(c, x)).collect()
    }

    fn apply_r(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.apply_r(x)).collect()
    }

    fn weight(&self) -> Q {
        self.base.weight()
    }

    fn magnitude(&self, a: &Self::Elem) -> f64 {
        a.iter().map(|x| self.base.magnitude(x)).fold(0.0, f64::max)
    }
}

impl<B: RotaBaxter> FilteredRotaBaxter for SeriesRB<B> {
    fn filtration_degree(&self, a: &Self::Elem) -> Option<usize> {
        a.iter().position(|x| self.base.magnitude(x) != 0.0)
    }

    fn truncation(&self) -> usize {
        self.trunc
    }
}

// ---------------------------------------------------------------------------
// Weight-0 "integration" on truncated matrix power series:
// R(Σ a_n tⁿ) = Σ a_n t^{n+1}/(n+1), exact in rationals.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct IntSeriesRB {
    pub k: usize,
    pub trunc: usize,
}

impl IntSeriesRB {
    pub fn new(k: usize, trunc: usize) -> Self {
        IntSeriesRB { k, trunc }
    }

    pub fn monomial(&self, a: RatMat, n: usize) -> Vec<RatMat> {
        let mut v = vec![RatMat::zeros(self.k, self.k); self.trunc + 1];
        if n <= self.trunc {
            v[n] = a;
        }
        v
    }
}

impl RotaBaxter for IntSeriesRB {
    type Elem = Vec<RatMat>;

    fn zero(&self) -> Self::Elem {
        vec![RatMat::zeros(self.k, self.k); self.trunc + 1]
    }

    fn one(&self) -> Option<Self::Elem> {
        let mut v = self.zero();
        v[0] = RatMat::identity(self.k);
        Some(v)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(RatMat::neg).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = self.zero();
        for i in 0..=self.trunc {
            for j in 0..=self.trunc - i {
                out[i + j] = out[i + j].add(&a[i].mul(&b[j]));
            }
        }
        out
    }

    fn scale(&self, c: &Q, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| x.scale(c)).collect()
    }

    fn apply_r(&self, a: &Self::Elem) -> Self::Elem {
        let mut out = self.zero();
        for n in 0..self.trunc {
            out[n + 1] = a[n].scale(&(Q::one() / qi(n as i64 + 1)));
        }
        out
    }

    fn weight(&self) -> Q {
        Q::zero()
    }

    fn magnitude(&self, a: &Self::Elem) -> f64 {
        let mut m: f64 = 0.0;
        for mat in a {
            for i in 0..mat.rows {
                for j in 0..mat.cols {
                    m = m.max(q_to_f64(&mat[(i, j)]).abs());
                }
            }
        }
        m
    }
}

impl FilteredRotaBaxter for IntSeriesRB {
    fn filtration_degree(&self, a: &Self::Elem) -> Option<usize> {
        a.iter().position(|m| !m.is_zero())
    }

    fn truncation(&self) -> usize {
        self.trunc
    }
}

/// Random rational matrix with entries n/d, |n| ≤ bound, 1 ≤ d ≤ 4.
pub fn random_ratmat(rng: &mut impl rand::Rng, k: usize, bound: i64) -> RatMat {
    RatMat::from_fn(k, k, |_, _| {
        crate::rat::q(rng.gen_range(-bound..=bound), rng.gen_range(1..=4))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_exact_zero<B: RotaBaxter>(inst: &B, e: &B::Elem) {
        assert_eq!(inst.magnitude(e), 0.0, "nonzero residual: {e:?}");
    }

    #[test]
    fn projection_battery() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for theta in [qi(1), qi(2), q(-3, 2)] {
            let inst = ProjectionRB::new(2, theta).unwrap();
            for _ in 0..100 {
                let a = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
                let b = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
                assert_exact_zero(&inst, &inst.rb_residual(&a, &b));
                assert_exact_zero(&inst, &inst.rb_tilde_residual(&a, &b));
                assert_exact_zero(&inst, &inst.rb_lie_residual(&a, &b));
            }
        }
    }

    #[test]
    fn projection_idempotent_up_to_scale() {
        let inst = ProjectionRB::new(2, qi(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
        let lhs = inst.apply_r(&inst.apply_r(&a));
        let rhs = inst.scale(&qi(3), &inst.apply_r(&a));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn projection_images_closed_under_product() {
        // images of R and of θid − R are subalgebras
        let inst = ProjectionRB::new(2, qi(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4));
            let b = (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4));
            let ra = inst.apply_r(&a);
            let rb = inst.apply_r(&b);
            let prod = inst.mul(&ra, &rb);
            assert!(prod.1.is_zero(), "image of R not closed");
            let ta = inst.apply_r_tilde(&a);
            let tb = inst.apply_r_tilde(&b);
            let prod = inst.mul(&ta, &tb);
            assert!(prod.0.is_zero(), "image of R-tilde not closed");
        }
    }

    #[test]
    fn summation_closed_forms() {
        // Z on f(x) = (1/2)^x with θ = 1: factor θr/(1−r) = 1
        let inst = SummationRB::new(qi(1)).unwrap();
        let f = inst.geom(qi(1), q(1, 2)).unwrap();
        assert_eq!(inst.apply_r(&f), f);
    }

    #[test]
    fn summation_battery() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for theta in [qi(1), q(1, 2), qi(3)] {
            let inst = SummationRB::new(theta).unwrap();
            for _ in 0..100 {
                let f = inst
                    .geom(q(rng.gen_range(-5..=5), rng.gen_range(1..=3)), q(rng.gen_range(1..=4), 5))
                    .unwrap();
                let g = inst
                    .geom(q(rng.gen_range(-5..=5), rng.gen_range(1..=3)), q(rng.gen_range(1..=6), 7))
                    .unwrap();
                assert_exact_zero(&inst, &inst.rb_residual(&f, &g));
                assert_exact_zero(&inst, &inst.rb_tilde_residual(&f, &g));
            }
        }
    }

    #[test]
    fn summation_delta_inverse_and_skew() {
        let inst = SummationRB::new(q(1, 2)).unwrap();
        let f = inst.geom(qi(3), q(2, 5)).unwrap();
        let g = inst.geom(q(-1, 2), q(3, 4)).unwrap();
        assert_eq!(inst.delta(&inst.apply_r(&f)), f);
        assert_eq!(inst.apply_r(&inst.delta(&f)), f);

        // δ(ab) = aδ(b) + δ(a)b − θ_w δ(a)δ(b) with θ_w = −θ = weight
        let lhs = inst.delta(&inst.mul(&f, &g));
        let mut rhs = inst.mul(&f, &inst.delta(&g));
        rhs = inst.add(&rhs, &inst.mul(&inst.delta(&f), &g));
        rhs = inst.sub(
            &rhs,
            &inst.scale(&inst.weight(), &inst.mul(&inst.delta(&f), &inst.delta(&g))),
        );
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn summation_leibniz_powers() {
        // δ(a^n) = Σ_{i=1}^{n} binom(n,i)(−θ_w)^{i−1} a^{n−i} δ(a)^i on the
        // commutative carrier, n ≤ 4
        let inst = SummationRB::new(q(2, 3)).unwrap();
        let a = inst.geom(q(5, 3), q(1, 3)).unwrap();
        let theta_w = inst.weight();
        for n in 1..=4usize {
            let mut an = a.clone();
            for _ in 1..n {
                an = inst.mul(&an, &a);
            }
            let lhs = inst.delta(&an);
            let mut rhs = inst.zero();
            let da = inst.delta(&a);
            for i in 1..=n {
                // a^{n−i} δ(a)^i, built without a unit element
                let mut t: Option<GeomSum> = None;
                for _ in 0..n - i {
                    t = Some(match t {
                        None => a.clone(),
                        Some(prev) => inst.mul(&prev, &a),
                    });
                }
                for _ in 0..i {
                    t = Some(match t {
                        None => da.clone(),
                        Some(prev) => inst.mul(&prev, &da),
                    });
                }
                let mut term = t.unwrap();
                let mut coeff = crate::rat::binomial(n, i);
                for _ in 1..i {
                    coeff *= -theta_w.clone();
                }
                term = inst.scale(&coeff, &term);
                rhs = inst.add(&rhs, &term);
            }
            assert_eq!(lhs, rhs, "power formula fails at n = {n}");
        }
    }

    #[test]
    fn summation_iterated_leibniz() {
        // δ^n(ab) = Σ_i Σ_j binom(n,i)binom(n−i,j)(−θ_w)^i δ^{n−j}(a)δ^{i+j}(b)
        let inst = SummationRB::new(qi(1)).unwrap();
        let a = inst.geom(qi(2), q(1, 2)).unwrap();
        let b = inst.geom(q(1, 3), q(2, 3)).unwrap();
        let theta_w = inst.weight();
        let pow_delta = |x: &GeomSum, n: usize| {
            let mut out = x.clone();
            for _ in 0..n {
                out = inst.delta(&out);
            }
            out
        };
        for n in 1..=4usize {
            let lhs = pow_delta(&inst.mul(&a, &b), n);
            let mut rhs = inst.zero();
            for i in 0..=n {
                for j in 0..=n - i {
                    let mut coeff = crate::rat::binomial(n, i) * crate::rat::binomial(n - i, j);
                    for _ in 0..i {
                        coeff *= -theta_w.clone();
                    }
                    let term = inst.mul(&pow_delta(&a, n - j), &pow_delta(&b, i + j));
                    rhs = inst.add(&rhs, &inst.scale(&coeff, &term));
                }
            }
            assert_eq!(lhs, rhs, "iterated Leibniz fails at n = {n}");
        }
    }

    #[test]
    fn jackson_pq_and_modified() {
        let q13 = q(1, 3);
        let pq = JacksonRB::new(q13.clone(), JacksonKind::Pq).unwrap();
        // P_q[x^1] = q/(1−q) x = (1/3)/(2/3) x = (1/2)x
        let x = pq.monomial(qi(1), 1).unwrap();
        assert_eq!(pq.apply_r(&x), pq.monomial(q(1, 2), 1).unwrap());

        let jb = JacksonRB::new(q13, JacksonKind::Modified).unwrap();
        let f = jb.monomial(qi(1), 1).unwrap();
        let g = jb.monomial(qi(1), 2).unwrap();
        // J̄[f]J̄[g] + (1−q)J̄[fg] − J̄[fJ̄[g]] − J̄[J̄[f]g] = 0
        assert_exact_zero(&jb, &jb.rb_residual(&f, &g));
    }

    #[test]
    fn jackson_battery() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in [JacksonKind::Pq, JacksonKind::Modified] {
            let inst = JacksonRB::new(q(2, 5), kind).unwrap();
            for _ in 0..100 {
                let f = inst
                    .monomial(q(rng.gen_range(-6..=6), rng.gen_range(1..=3)), rng.gen_range(1..=5))
                    .unwrap();
                let g = inst
                    .monomial(q(rng.gen_range(-6..=6), rng.gen_range(1..=3)), rng.gen_range(1..=5))
                    .unwrap();
                assert_exact_zero(&inst, &inst.rb_residual(&f, &g));
                assert_exact_zero(&inst, &inst.rb_tilde_residual(&f, &g));
            }
        }
    }

    #[test]
    fn jackson_domain_errors() {
        assert!(JacksonRB::new(qi(2), JacksonKind::Pq).is_err());
        let inst = JacksonRB::new(q(1, 2), JacksonKind::Pq).unwrap();
        assert!(inst.monomial(qi(1), 0).is_err());
    }

    #[test]
    fn riemann_exact_on_polynomials() {
        let inst = RiemannRB::uniform(1.0, 33, 1).unwrap();
        let one = inst.sample_scalar(|_| 1.0);
        let r_one = inst.apply_r(&one);
        for (i, &t) in inst.grid.iter().enumerate() {
            assert!((r_one[i][(0, 0)] - t).abs() < 1e-14);
        }
        let lin = inst.sample_scalar(|t| t);
        let r_lin = inst.apply_r(&lin);
        for (i, &t) in inst.grid.iter().enumerate() {
            assert!((r_lin[i][(0, 0)] - t * t / 2.0).abs() < 1e-14);
        }
        let cub = inst.sample_scalar(|t| t * t * t);
        let r_cub = inst.apply_r(&cub);
        for (i, &t) in inst.grid.iter().enumerate() {
            assert!((r_cub[i][(0, 0)] - t.powi(4) / 4.0).abs() < 1e-13);
        }
    }

    #[test]
    fn riemann_integration_by_parts() {
        // f(t) = t, g(t) = t²: I(f)I(g) = I(I(f)g) + I(fI(g)) exactly on cubics
        let inst = RiemannRB::uniform(1.0, 65, 1).unwrap();
        let f = inst.sample_scalar(|t| t);
        let g = inst.sample_scalar(|t| t * t);
        let res = inst.rb_residual(&f, &g);
        assert!(inst.magnitude(&res) <= 1e-12, "residual {}", inst.magnitude(&res));
    }

    #[test]
    fn riemann_battery_and_lie() {
        let inst = RiemannRB::uniform(1.0, 129, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let ca: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let cb: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let poly = |c: &[f64], t: f64, k: usize| c[3 * k] + c[3 * k + 1] * t + c[3 * k + 2] * t * t;
            let a = inst.sample(|t| {
                DMatrix::from_fn(2, 2, |i, j| poly(&ca, t, 2 * i + j))
            });
            let b = inst.sample(|t| {
                DMatrix::from_fn(2, 2, |i, j| poly(&cb, t, 2 * i + j))
            });
            assert!(inst.magnitude(&inst.rb_residual(&a, &b)) <= 1e-12);
            assert!(inst.magnitude(&inst.rb_lie_residual(&a, &b)) <= 1e-12);
        }
    }

    #[test]
    fn double_and_pre_lie_products() {
        let inst = ProjectionRB::new(2, qi(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let a = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
            let b = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
            // R is multiplicative for the double product
            let lhs = inst.apply_r(&inst.double_product(&a, &b));
            let rhs = inst.mul(&inst.apply_r(&a), &inst.apply_r(&b));
            assert_eq!(lhs, rhs);
            // R(a·_Rb) − R(b·_Ra) = [R(a), R(b)]
            let lhs = inst.sub(&inst.apply_r(&inst.pre_lie(&a, &b)), &inst.apply_r(&inst.pre_lie(&b, &a)));
            let rhs = inst.commutator(&inst.apply_r(&a), &inst.apply_r(&b));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pre_lie_associator_symmetry() {
        // right pre-Lie: (a·b)·c − a·(b·c) symmetric in b ↔ c
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for theta in [qi(1), qi(2)] {
            let inst = ProjectionRB::new(2, theta).unwrap();
            for _ in 0..25 {
                let a = (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4));
                let b = (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4));
                let c = (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4));
                let assoc = |x: &_, y: &_, z: &_| {
                    inst.sub(
                        &inst.pre_lie(&inst.pre_lie(x, y), z),
                        &inst.pre_lie(x, &inst.pre_lie(y, z)),
                    )
                };
                assert_eq!(assoc(&a, &b, &c), assoc(&a, &c, &b));
            }
        }
    }

    #[test]
    fn pre_lie_vanishes_commutative_weight0() {
        let inst = IntSeriesRB::new(1, 4);
        let a = inst.monomial(RatMat::from_fn(1, 1, |_, _| qi(2)), 1);
        let b = inst.monomial(RatMat::from_fn(1, 1, |_, _| q(1, 3)), 2);
        let p = inst.pre_lie(&a, &b);
        assert_eq!(inst.magnitude(&p), 0.0);
    }

    #[test]
    fn atkinson_on_projection_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = ProjectionRB::new(2, qi(1)).unwrap();
        let inst = SeriesRB::new(base, 5);
        let a = inst.monomial(
            (random_ratmat(&mut rng, 2, 3), random_ratmat(&mut rng, 2, 3)),
            1,
        );
        let (x, y) = atkinson_solve(&inst, &a).unwrap();
        // fixed-point equations hold
        let one = inst.one().unwrap();
        let eq_x = inst.sub(&x, &inst.add(&one, &inst.apply_r(&inst.mul(&a, &x))));
        assert_eq!(inst.magnitude(&eq_x), 0.0);
        let eq_y = inst.sub(&y, &inst.add(&one, &inst.apply_r_tilde(&inst.mul(&y, &a))));
        assert_eq!(inst.magnitude(&eq_y), 0.0);
        // factorization Y(1−θa)X = 1
        let res = atkinson_factorization_residual(&inst, &a, &x, &y).unwrap();
        assert_eq!(inst.magnitude(&res), 0.0);
    }

    #[test]
    fn atkinson_trivial_and_weight0() {
        let base = ProjectionRB::new(2, qi(1)).unwrap();
        let inst = SeriesRB::new(base, 4);
        let (x, y) = atkinson_solve(&inst, &inst.zero()).unwrap();
        assert_eq!(x, inst.one().unwrap());
        assert_eq!(y, inst.one().unwrap());

        // θ = 0: YX = 1
        let inst0 = IntSeriesRB::new(2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = inst0.monomial(random_ratmat(&mut rng, 2, 3), 1);
        let (x, y) = atkinson_solve(&inst0, &a).unwrap();
        let res = inst0.sub(&inst0.mul(&y, &x), &inst0.one().unwrap());
        assert_eq!(inst0.magnitude(&res), 0.0);
    }

    #[test]
    fn atkinson_rejects_unfiltered_argument() {
        let base = ProjectionRB::new(2, qi(1)).unwrap();
        let inst = SeriesRB::new(base, 3);
        let a = inst.monomial(inst.base.one().unwrap(), 0);
        assert!(matches!(atkinson_solve(&inst, &a), Err(RbError::NotFiltered)));
    }

    #[test]
    fn linearity_of_apply_r_sampled() {
        let inst = ProjectionRB::new(2, q(5, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
            let b = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
            let c = q(rng.gen_range(-4..=4), rng.gen_range(1..=3));
            let lhs = inst.apply_r(&inst.add(&inst.scale(&c, &a), &b));
            let rhs = inst.add(&inst.scale(&c, &inst.apply_r(&a)), &inst.apply_r(&b));
            assert_eq!(lhs, rhs);
        }
    }
}
