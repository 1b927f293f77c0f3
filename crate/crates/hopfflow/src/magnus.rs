//! Magnus expansion machinery: symbolic Ω terms from the weight-zero
//! recursion, conversions between Chen iterated integrals and Magnus
//! logarithms, Strichartz's permutation formula and its Heaviside
//! rewriting as numeric cross-checks, and Magnus/Dyson integrators for
//! matrix ODEs Ḟ = A(t)F including the affine case.

use crate::rat::{factorial, q_to_f64, qi, Q};
use crate::rotabaxter::{RbError, RiemannRB, RotaBaxter};
use crate::spitzer::{bernoulli_b, compositions};
use nalgebra::DMatrix;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MagnusError {
    #[error("permutation/quadrature budget exceeded (n = {0})")]
    QuadratureBudgetExceeded(usize),
    #[error("non-finite matrix entries at t = {0}")]
    StepRejected(f64),
    #[error("incompatible shapes")]
    ShapeMismatch,
    #[error("order {0} not supported (use 2 or 4)")]
    OrderUnsupported(usize),
    #[error(transparent)]
    Rb(#[from] RbError),
}

// ---------------------------------------------------------------------------
// Symbolic layer: formal expressions in a, R, and commutators
// ---------------------------------------------------------------------------

/// A formal expression built from the generator `a`, the operator `R`,
/// and commutator brackets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sym {
    A,
    R(Box<Sym>),
    Br(Box<Sym>, Box<Sym>),
}

impl Sym {
    /// Number of occurrences of the generator.
    pub fn order(&self) -> usize {
        match self {
            Sym::A => 1,
            Sym::R(x) => x.order(),
            Sym::Br(x, y) => x.order() + y.order(),
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::A => write!(f, "a"),
            Sym::R(x) => write!(f, "R({x})"),
            Sym::Br(x, y) => write!(f, "[{x}, {y}]"),
        }
    }
}

/// Rational linear combination of formal expressions; brackets are kept in
/// a canonical orientation ([x, y] with x < y, antisymmetry applied).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymComb {
    pub terms: BTreeMap<Sym, Q>,
}

impl SymComb {
    pub fn zero() -> Self {
        SymComb::default()
    }

    pub fn generator() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Sym::A, Q::one());
        SymComb { terms }
    }

    pub fn add_term(&mut self, s: Sym, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(s).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            // re-borrow to remove; find the key again
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &SymComb) -> SymComb {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> SymComb {
        if c.is_zero() {
            return SymComb::zero();
        }
        SymComb {
            terms: self.terms.iter().map(|(s, v)| (s.clone(), v * c)).collect(),
        }
    }

    /// Canonically oriented commutator, bilinear in both arguments.
    pub fn bracket(&self, other: &SymComb) -> SymComb {
        let mut out = SymComb::zero();
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                if x == y {
                    continue;
                }
                let c = cx * cy;
                if x < y {
                    out.add_term(Sym::Br(Box::new(x.clone()), Box::new(y.clone())), c);
                } else {
                    out.add_term(Sym::Br(Box::new(y.clone()), Box::new(x.clone())), -c);
                }
            }
        }
        out
    }

    pub fn r_op(&self) -> SymComb {
        SymComb {
            terms: self
                .terms
                .iter()
                .map(|(s, c)| (Sym::R(Box::new(s.clone())), c.clone()))
                .collect(),
        }
    }

    /// Part with exactly n generator occurrences.
    pub fn component(&self, n: usize) -> SymComb {
        SymComb {
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| s.order() == n)
                .map(|(s, c)| (s.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn truncate(&self, n: usize) -> SymComb {
        SymComb {
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| s.order() <= n)
                .map(|(s, c)| (s.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn canonical_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push_str(&format!("{c} {s}"));
        }
        out
    }
}

/// Graded components of the formal weight-zero recursion
/// χ⁰ = a + Σ_{m≥1} (B_m/m!)·(ad R(χ⁰))^m(a), orders 1..N.
pub fn chi_zero_symbolic(n_max: usize) -> Vec<SymComb> {
    let a = SymComb::generator();
    let mut chi = a.clone();
    for _ in 0..n_max {
        let r_chi = chi.r_op();
        let mut next = a.clone();
        let mut ad = a.clone();
        for m in 1..n_max {
            ad = r_chi.bracket(&ad).truncate(n_max);
            let b = bernoulli_b(m);
            if !b.is_zero() {
                next = next.add(&ad.scale(&b));
            }
        }
        chi = next.truncate(n_max);
    }
    (1..=n_max).map(|n| chi.component(n)).collect()
}

/// Magnus terms Ω_n = R(χ⁰_n) as formal expressions, n = 1..N.
pub fn omega_terms(n_max: usize) -> Vec<SymComb> {
    chi_zero_symbolic(n_max).iter().map(SymComb::r_op).collect()
}

/// Evaluates a formal expression in any Rota-Baxter carrier.
pub fn eval_sym<B: RotaBaxter>(inst: &B, s: &Sym, a: &B::Elem) -> B::Elem {
    match s {
        Sym::A => a.clone(),
        Sym::R(x) => inst.apply_r(&eval_sym(inst, x, a)),
        Sym::Br(x, y) => inst.commutator(&eval_sym(inst, x, a), &eval_sym(inst, y, a)),
    }
}

/// Evaluates a formal linear combination in any Rota-Baxter carrier.
pub fn eval_sym_comb<B: RotaBaxter>(inst: &B, comb: &SymComb, a: &B::Elem) -> B::Elem {
    let mut out = inst.zero();
    for (s, c) in &comb.terms {
        out = inst.add(&out, &inst.scale(c, &eval_sym(inst, s, a)));
    }
    out
}

// ---------------------------------------------------------------------------
// Chen <-> Magnus conversion tables
// ---------------------------------------------------------------------------

/// Noncommutative polynomial in graded symbols X₁, X₂, …: words of indices
/// with rational coefficients, graded by the index sum.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompPoly {
    pub terms: BTreeMap<Vec<usize>, Q>,
}

impl CompPoly {
    pub fn zero() -> Self {
        CompPoly::default()
    }

    pub fn word(w: Vec<usize>, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        CompPoly { terms }
    }

    pub fn add_term(&mut self, w: Vec<usize>, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &CompPoly) -> CompPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    /// Concatenation product truncated at total grade `maxdeg`.
    pub fn mul(&self, other: &CompPoly, maxdeg: usize) -> CompPoly {
        let mut out = CompPoly::zero();
        for (u, cu) in &self.terms {
            let du: usize = u.iter().sum();
            for (v, cv) in &other.terms {
                let dv: usize = v.iter().sum();
                if du + dv > maxdeg {
                    continue;
                }
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, cu * cv);
            }
        }
        out
    }
}

/// Ω_n as a polynomial in the Chen symbols W_l = (Ra)^{[l]}:
/// Ω_n = Σ_k ((−1)^{k+1}/k) Σ_{compositions l₁+…+l_k = n} W_{l₁}…W_{l_k}.
pub fn chen_to_magnus(n_max: usize) -> Vec<CompPoly> {
    (1..=n_max)
        .map(|n| {
            let mut out = CompPoly::zero();
            for comp in compositions(n) {
                let k = comp.len();
                let sign = if k % 2 == 1 { Q::one() } else { -Q::one() };
                out.add_term(comp, sign / qi(k as i64));
            }
            out
        })
        .collect()
}

/// W_n = (Ra)^{[n]} as a polynomial in the Magnus symbols Ω_l:
/// W_n = Σ_k (1/k!) Σ_{compositions l₁+…+l_k = n} Ω_{l₁}…Ω_{l_k}.
pub fn magnus_to_chen(n_max: usize) -> Vec<CompPoly> {
    (1..=n_max)
        .map(|n| {
            let mut out = CompPoly::zero();
            for comp in compositions(n) {
                let k = comp.len();
                out.add_term(comp, Q::one() / factorial(k));
            }
            out
        })
        .collect()
}

/// Substitutes `table[i−1]` for the symbol i in every word of `p`,
/// truncating at total grade `maxdeg`.
pub fn substitute(p: &CompPoly, table: &[CompPoly], maxdeg: usize) -> CompPoly {
    let mut out = CompPoly::zero();
    for (w, c) in &p.terms {
        let mut acc = CompPoly::word(vec![], Q::one());
        for &i in w {
            acc = acc.mul(&table[i - 1], maxdeg);
        }
        for (v, cv) in &acc.terms {
            out.add_term(v.clone(), c * cv);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Sampled matrix functions and quadrature
// ---------------------------------------------------------------------------

/// A time-dependent k×k matrix coefficient given by a closed-form evaluator.
pub struct SampledMatrixFn {
    pub dim: usize,
    f: Box<dyn Fn(f64) -> DMatrix<f64>>,
}

impl SampledMatrixFn {
    pub fn new(dim: usize, f: impl Fn(f64) -> DMatrix<f64> + 'static) -> Self {
        SampledMatrixFn { dim, f: Box::new(f) }
    }

    pub fn eval(&self, t: f64) -> DMatrix<f64> {
        (self.f)(t)
    }

    pub fn constant(m: DMatrix<f64>) -> Self {
        let dim = m.nrows();
        SampledMatrixFn::new(dim, move |_| m.clone())
    }

    /// f(t)·M: a commuting family.
    pub fn scalar_multiple(f: impl Fn(f64) -> f64 + 'static, m: DMatrix<f64>) -> Self {
        let dim = m.nrows();
        SampledMatrixFn::new(dim, move |t| &m * f(t))
    }

    /// The Airy-type system [[0, 1], [−t, 0]].
    pub fn airy() -> Self {
        SampledMatrixFn::new(2, |t| DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -t, 0.0]))
    }

    /// Named presets used by the command-line surface.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "airy" => Some(SampledMatrixFn::airy()),
            "rotation" => Some(SampledMatrixFn::new(2, |t| {
                DMatrix::from_row_slice(2, 2, &[0.0, 1.0 + t, -(1.0 + t), 0.0])
            })),
            _ => None,
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Quadrature configuration for the simplex cross-checks.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub nodes_per_axis: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { nodes_per_axis: 24 }
    }
}

/// Integrates f over the ordered simplex t > s₁ > s₂ > … > s_n > 0 with
/// nested Gauss-Legendre quadrature.
fn simplex_integral(
    n: usize,
    t: f64,
    quad: &QuadConfig,
    dim: usize,
    f: &dyn Fn(&[f64]) -> DMatrix<f64>,
) -> DMatrix<f64> {
    let (nodes, weights) = gauss_legendre(quad.nodes_per_axis);
    let mut point = vec![0.0; n];
    fn rec(
        level: usize,
        n: usize,
        upper: f64,
        point: &mut Vec<f64>,
        nodes: &[f64],
        weights: &[f64],
        dim: usize,
        f: &dyn Fn(&[f64]) -> DMatrix<f64>,
    ) -> DMatrix<f64> {
        let mut acc = DMatrix::<f64>::zeros(dim, dim);
        let half = upper / 2.0;
        for (x, w) in nodes.iter().zip(weights) {
            let s = half * (x + 1.0);
            point[level] = s;
            let inner = if level + 1 == n {
                f(point)
            } else {
                rec(level + 1, n, s, point, nodes, weights, dim, f)
            };
            acc += inner * (w * half);
        }
        acc
    }
    rec(0, n, t, &mut point, &nodes, &weights, dim, f)
}

/// Left-nested bracket [[…[m₁, m₂], …], m_n].
fn nested_bracket(ms: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut acc = ms[0].clone();
    for m in &ms[1..] {
        acc = &acc * m - m * &acc;
    }
    acc
}

/// Strichartz's permutation formula for the n-th Magnus term:
/// Ω_n[a](t) = Σ_{σ∈S_n} (−1)^{d(σ)}/(n²·binom(n−1, d(σ))) times the
/// ordered-simplex integral of [[a(t_{σ(1)}), a(t_{σ(2)})], …, a(t_{σ(n)})].
pub fn strichartz_term(
    a: &SampledMatrixFn,
    n: usize,
    t: f64,
    quad: &QuadConfig,
) -> Result<DMatrix<f64>, MagnusError> {
    if n == 0 || n > 4 {
        return Err(MagnusError::QuadratureBudgetExceeded(n));
    }
    if n == 1 {
        return Ok(simplex_integral(1, t, quad, a.dim, &|s: &[f64]| a.eval(s[0])));
    }
    let mut out = DMatrix::<f64>::zeros(a.dim, a.dim);
    for sigma in crate::idempotents::all_permutations(n) {
        let d = sigma.descents;
        let coeff = q_to_f64(
            &(qi(if d % 2 == 0 { 1 } else { -1 })
                / (qi((n * n) as i64) * crate::rat::binomial(n - 1, d))),
        );
        let img = sigma.images.clone();
        let integral = simplex_integral(n, t, quad, a.dim, &|s: &[f64]| {
            let ms: Vec<DMatrix<f64>> = (0..n).map(|i| a.eval(s[img[i] - 1])).collect();
            nested_bracket(&ms)
        });
        out += integral * coeff;
    }
    Ok(out)
}

/// Ω₃ via the Heaviside rewriting over the cube [0, t]³:
/// (1/3)·∫ (Θ₁₂Θ₂₃ − ½Θ₁₂ − ½Θ₂₃ + ⅓)·[[a(t₁), a(t₂)], a(t₃)] dt₁dt₂dt₃,
/// evaluated by splitting the cube into the six order simplices (on which
/// the step functions are constant). The 1/3 is the Dynkin normalization
/// for passing from words to left-nested commutators in degree 3.
pub fn heaviside_omega3(
    a: &SampledMatrixFn,
    t: f64,
    quad: &QuadConfig,
) -> Result<DMatrix<f64>, MagnusError> {
    let mut out = DMatrix::<f64>::zeros(a.dim, a.dim);
    for sigma in crate::idempotents::all_permutations(3) {
        // region t_{σ(1)} > t_{σ(2)} > t_{σ(3)}; recover t_j from simplex vars
        let img = sigma.images.clone();
        let mut pos = [0usize; 3];
        for (slot, &j) in img.iter().enumerate() {
            pos[j - 1] = slot;
        }
        let theta12 = if pos[0] < pos[1] { 1.0 } else { 0.0 };
        let theta23 = if pos[1] < pos[2] { 1.0 } else { 0.0 };
        let weight = theta12 * theta23 - 0.5 * theta12 - 0.5 * theta23 + 1.0 / 3.0;
        let integral = simplex_integral(3, t, quad, a.dim, &|s: &[f64]| {
            let t1 = s[pos[0]];
            let t2 = s[pos[1]];
            let t3 = s[pos[2]];
            let ms = [a.eval(t1), a.eval(t2), a.eval(t3)];
            nested_bracket(&ms)
        });
        out += integral * weight;
    }
    Ok(out / 3.0)
}

// ---------------------------------------------------------------------------
// Matrix exponential: scaling and squaring with Padé(6)
// ---------------------------------------------------------------------------

/// exp(M) by scaling-and-squaring with a diagonal Padé(6) approximant.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let k = m.nrows();
    let norm = m.iter().map(|x| x.abs()).fold(0.0, f64::max) * k as f64;
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a = m / 2f64.powi(s as i32);
    // Padé(6) coefficients (12−j)!·6!/(12!·j!·(6−j)!)
    let c = [
        1.0,
        0.5,
        5.0 / 44.0,
        1.0 / 66.0,
        1.0 / 792.0,
        1.0 / 15840.0,
        1.0 / 665280.0,
    ];
    let id = DMatrix::<f64>::identity(k, k);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let even = &id * c[0] + &a2 * c[2] + &a4 * c[4] + &a6 * c[6];
    let odd = &a * (&id * c[1] + &a2 * c[3] + &a4 * c[5]);
    let num = &even + &odd;
    let den = &even - &odd;
    let mut x = den
        .lu()
        .solve(&num)
        .unwrap_or_else(|| id.clone());
    for _ in 0..s {
        x = &x * &x;
    }
    x
}

// ---------------------------------------------------------------------------
// Integrators
// ---------------------------------------------------------------------------

/// Fundamental-matrix flow of Ḟ = A(t)F on a uniform grid.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub times: Vec<f64>,
    pub flows: Vec<DMatrix<f64>>,
    pub method: String,
    pub dets: Vec<f64>,
}

fn check_finite(m: &DMatrix<f64>, t: f64) -> Result<(), MagnusError> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(MagnusError::StepRejected(t))
    }
}

fn grid(t0: f64, t1: f64, h: f64) -> Vec<f64> {
    let n = ((t1 - t0) / h).round().max(1.0) as usize;
    (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect()
}

/// One Magnus step over [t, t+h].
fn magnus_step(a: &SampledMatrixFn, t: f64, h: f64, order: usize) -> Result<DMatrix<f64>, MagnusError> {
    let omega = match order {
        2 => a.eval(t + h / 2.0) * h,
        4 => {
            // two-point Gauss-Legendre samples
            let c = 3f64.sqrt() / 6.0;
            let a1 = a.eval(t + h * (0.5 - c));
            let a2 = a.eval(t + h * (0.5 + c));
            (&a1 + &a2) * (h / 2.0) + (&a2 * &a1 - &a1 * &a2) * (3f64.sqrt() / 12.0 * h * h)
        }
        other => return Err(MagnusError::OrderUnsupported(other)),
    };
    check_finite(&omega, t)?;
    Ok(expm(&omega))
}

/// Magnus integrator of order 2 or 4: F ← exp(Ω_step)·F per step.
pub fn magnus_solve(
    a: &SampledMatrixFn,
    t0: f64,
    t1: f64,
    h: f64,
    order: usize,
) -> Result<FlowResult, MagnusError> {
    let times = grid(t0, t1, h);
    let k = a.dim;
    let mut flows = vec![DMatrix::<f64>::identity(k, k)];
    for w in times.windows(2) {
        let step = magnus_step(a, w[0], w[1] - w[0], order)?;
        let next = &step * flows.last().unwrap();
        check_finite(&next, w[1])?;
        flows.push(next);
    }
    let dets = flows.iter().map(|f| f.clone().lu().determinant()).collect();
    Ok(FlowResult { times, flows, method: format!("magnus{order}"), dets })
}

/// Dyson-Chen integrator: per step the depth-d partial sum of the
/// time-ordered exponential, computed by Picard iteration on a local grid
/// with exact-degree-5 quadrature.
pub fn dyson_solve(
    a: &SampledMatrixFn,
    t0: f64,
    t1: f64,
    h: f64,
    depth: usize,
) -> Result<FlowResult, MagnusError> {
    assert!(depth >= 1);
    let times = grid(t0, t1, h);
    let k = a.dim;
    let n_sub = 7;
    let mut flows = vec![DMatrix::<f64>::identity(k, k)];
    for w in times.windows(2) {
        let hs = w[1] - w[0];
        let local = RiemannRB::uniform(hs, n_sub, k)?;
        let samples: Vec<DMatrix<f64>> = (0..n_sub)
            .map(|i| a.eval(w[0] + hs * i as f64 / (n_sub - 1) as f64))
            .collect();
        let one = local.one().unwrap();
        let mut y = one.clone();
        for _ in 0..depth {
            y = local.add(&one, &local.apply_r(&local.mul(&samples, &y)));
        }
        let step = y.last().unwrap().clone();
        check_finite(&step, w[1])?;
        flows.push(&step * flows.last().unwrap());
    }
    let dets = flows.iter().map(|f| f.clone().lu().determinant()).collect();
    Ok(FlowResult { times, flows, method: format!("dyson{depth}"), dets })
}

/// Affine system ẋ = A(t)x + b(t) via the flow's Green-function formula:
/// x_{j+1} = P x_j + ∫ over the step of G(t_{j+1}, s) b(s) ds (Simpson with
/// half-step Magnus propagators).
pub fn affine_solve(
    a: &SampledMatrixFn,
    b: &dyn Fn(f64) -> DMatrix<f64>,
    x0: &DMatrix<f64>,
    t0: f64,
    t1: f64,
    h: f64,
) -> Result<(Vec<f64>, Vec<DMatrix<f64>>), MagnusError> {
    if x0.nrows() != a.dim || x0.ncols() != 1 {
        return Err(MagnusError::ShapeMismatch);
    }
    if b(t0).nrows() != a.dim || b(t0).ncols() != 1 {
        return Err(MagnusError::ShapeMismatch);
    }
    let times = grid(t0, t1, h);
    let mut xs = vec![x0.clone()];
    for w in times.windows(2) {
        let hs = w[1] - w[0];
        let p1 = magnus_step(a, w[0], hs / 2.0, 4)?;
        let p2 = magnus_step(a, w[0] + hs / 2.0, hs / 2.0, 4)?;
        let p = &p2 * &p1;
        let inhom = (&p * b(w[0]) + &p2 * b(w[0] + hs / 2.0) * 4.0 + b(w[1])) * (hs / 6.0);
        let next = &p * xs.last().unwrap() + inhom;
        check_finite(&next, w[1])?;
        xs.push(next);
    }
    Ok((times, xs))
}

/// Fixed fine-step classical RK4 reference flow for Ḟ = A(t)F.
pub fn rk4_flow(a: &SampledMatrixFn, t0: f64, t1: f64, steps: usize) -> DMatrix<f64> {
    let k = a.dim;
    let h = (t1 - t0) / steps as f64;
    let mut f = DMatrix::<f64>::identity(k, k);
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = a.eval(t) * &f;
        let k2 = a.eval(t + h / 2.0) * (&f + &k1 * (h / 2.0));
        let k3 = a.eval(t + h / 2.0) * (&f + &k2 * (h / 2.0));
        let k4 = a.eval(t + h) * (&f + &k3 * h);
        f += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    f
}

/// Least-squares slope of log(err) against log(h).
pub fn convergence_slope(hs: &[f64], errs: &[f64]) -> f64 {
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

pub fn matrix_max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
