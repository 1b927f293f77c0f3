//! The sl(2;R) Riccati worked example of Lie-Scheffers theory: canonical
//! coordinates of the second kind and the u-variable system, the general
//! solution formula, reduction by known particular solutions via the
//! coefficient cocycle action, and the cross-ratio superposition principle.

use crate::magnus::{FlowResult, MagnusError, SampledMatrixFn};
use nalgebra::DMatrix;
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchefError {
    #[error("solution escapes to infinity near t = {0}")]
    BlowUp(f64),
    #[error("denominator vanishes near t = {0}")]
    PoleCrossing(f64),
    #[error("particular solutions are degenerate (coincident or zero where inversion is needed)")]
    DegenerateTriple,
    #[error("supplied curve is not a solution (residual {0})")]
    NotASolution(f64),
    #[error("trajectories do not share a grid")]
    ShapeMismatch,
    #[error(transparent)]
    Flow(#[from] MagnusError),
}

/// Riccati coefficients ẋ = a₀(t) + a₁(t)x + a₂(t)x².
#[derive(Clone)]
pub struct RiccatiCoeffs {
    pub a0: Rc<dyn Fn(f64) -> f64>,
    pub a1: Rc<dyn Fn(f64) -> f64>,
    pub a2: Rc<dyn Fn(f64) -> f64>,
}

impl RiccatiCoeffs {
    pub fn new(
        a0: impl Fn(f64) -> f64 + 'static,
        a1: impl Fn(f64) -> f64 + 'static,
        a2: impl Fn(f64) -> f64 + 'static,
    ) -> Self {
        RiccatiCoeffs { a0: Rc::new(a0), a1: Rc::new(a1), a2: Rc::new(a2) }
    }

    pub fn constant(c0: f64, c1: f64, c2: f64) -> Self {
        RiccatiCoeffs::new(move |_| c0, move |_| c1, move |_| c2)
    }

    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        ((self.a0)(t), (self.a1)(t), (self.a2)(t))
    }

    /// Right-hand side a₀ + a₁x + a₂x².
    pub fn rhs(&self, t: f64, x: f64) -> f64 {
        let (a0, a1, a2) = self.eval(t);
        a0 + a1 * x + a2 * x * x
    }
}

/// The sl(2;R) basis (E′₊, H′, E′₋) with [H′,E′₊] = E′₊, [E′₊,E′₋] = −2H′,
/// [H′,E′₋] = −E′₋.
pub fn sl2_basis() -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    (
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.5]),
        DMatrix::from_row_slice(2, 2, &[0.0, 0.0, -1.0, 0.0]),
    )
}

/// L(t) = a₀E′₊ + a₁H′ + a₂E′₋.
pub fn l_matrix(c: &RiccatiCoeffs, t: f64) -> DMatrix<f64> {
    let (a0, a1, a2) = c.eval(t);
    DMatrix::from_row_slice(2, 2, &[a1 / 2.0, a0, -a2, -a1 / 2.0])
}

/// Projective action (αx + β)/(γx + δ); x may be infinite (handled in the
/// reciprocal chart).
pub fn mobius(g: &DMatrix<f64>, x: f64) -> f64 {
    let (al, be, ga, de) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    if x.is_infinite() {
        if ga == 0.0 {
            return f64::INFINITY;
        }
        return al / ga;
    }
    let den = ga * x + de;
    if den == 0.0 {
        return f64::INFINITY;
    }
    (al * x + be) / den
}

/// Canonical u-coordinate trajectories on a uniform grid.
#[derive(Debug, Clone)]
pub struct UTrajectories {
    pub times: Vec<f64>,
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

const BLOWUP_BOUND: f64 = 1e8;

/// Solves the canonical-coordinate system
/// u̇⁰ = a₀ + a₁u⁰ + a₂(u⁰)², u̇¹ = a₁ + 2a₂u⁰, u̇² = a₂e^{u¹}
/// with zero initial conditions, by classical RK4 on the given step.
pub fn solve_u_system(
    c: &RiccatiCoeffs,
    t0: f64,
    t1: f64,
    h: f64,
) -> Result<UTrajectories, SchefError> {
    let n = ((t1 - t0) / h).round().max(1.0) as usize;
    let hs = (t1 - t0) / n as f64;
    let rhs = |t: f64, u: [f64; 3]| -> [f64; 3] {
        let (a0, a1, a2) = c.eval(t);
        [
            a0 + a1 * u[0] + a2 * u[0] * u[0],
            a1 + 2.0 * a2 * u[0],
            a2 * u[1].exp(),
        ]
    };
    let mut times = Vec::with_capacity(n + 1);
    let (mut u0, mut u1, mut u2) = (Vec::new(), Vec::new(), Vec::new());
    let mut u = [0.0f64; 3];
    for i in 0..=n {
        let t = t0 + i as f64 * hs;
        times.push(t);
        u0.push(u[0]);
        u1.push(u[1]);
        u2.push(u[2]);
        if i == n {
            break;
        }
        let k1 = rhs(t, u);
        let step = |uu: [f64; 3], kk: [f64; 3], f: f64| {
            [uu[0] + f * kk[0], uu[1] + f * kk[1], uu[2] + f * kk[2]]
        };
        let k2 = rhs(t + hs / 2.0, step(u, k1, hs / 2.0));
        let k3 = rhs(t + hs / 2.0, step(u, k2, hs / 2.0));
        let k4 = rhs(t + hs, step(u, k3, hs));
        for j in 0..3 {
            u[j] += hs / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if !u.iter().all(|v| v.is_finite()) || u[0].abs() > BLOWUP_BOUND {
            return Err(SchefError::BlowUp(t + hs));
        }
    }
    Ok(UTrajectories { times, u0, u1, u2 })
}

/// General solution x(t) = e^{u¹}x₀/(1 − u²x₀) + u⁰ along the u-grid;
/// x₀ = ∞ is handled in the reciprocal chart (value u⁰ − e^{u¹}/u²).
pub fn riccati_general_curve(u: &UTrajectories, x0: f64) -> Result<Vec<f64>, SchefError> {
    let mut out = Vec::with_capacity(u.times.len());
    for i in 0..u.times.len() {
        let v = if x0.is_infinite() {
            if u.u2[i] == 0.0 {
                f64::INFINITY
            } else {
                u.u0[i] - u.u1[i].exp() / u.u2[i]
            }
        } else {
            let den = 1.0 - u.u2[i] * x0;
            if den == 0.0 {
                return Err(SchefError::PoleCrossing(u.times[i]));
            }
            u.u1[i].exp() * x0 / den + u.u0[i]
        };
        out.push(v);
    }
    Ok(out)
}

/// Convenience: x(t) for a single initial value.
pub fn riccati_general(
    c: &RiccatiCoeffs,
    x0: f64,
    t0: f64,
    t: f64,
    h: f64,
) -> Result<f64, SchefError> {
    let u = solve_u_system(c, t0, t, h)?;
    let curve = riccati_general_curve(&u, x0)?;
    Ok(*curve.last().unwrap())
}

/// Per-node cross-ratio k = (x−x₂)(x₁−x₃)/((x−x₁)(x₂−x₃)); constant in t
/// when all four curves solve the same Riccati equation.
pub fn superposition_check(
    x: &[f64],
    x1: &[f64],
    x2: &[f64],
    x3: &[f64],
) -> Result<Vec<f64>, SchefError> {
    if x.len() != x1.len() || x.len() != x2.len() || x.len() != x3.len() {
        return Err(SchefError::ShapeMismatch);
    }
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let den = (x[i] - x1[i]) * (x2[i] - x3[i]);
        if den == 0.0 {
            return Err(SchefError::DegenerateTriple);
        }
        out.push((x[i] - x2[i]) * (x1[i] - x3[i]) / den);
    }
    Ok(out)
}

/// Transformed system after gauging away known particular solutions.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub times: Vec<f64>,
    /// per-node (a₂′, a₁′, a₀′)
    pub coeffs: Vec<(f64, f64, f64)>,
    /// per-node accumulated gauge matrix (A₃A₂A₁ or prefix)
    pub gauge: Vec<DMatrix<f64>>,
}

/// One application of the coefficient cocycle action for the gauge
/// A = [[α, β], [γ, δ]] with entry derivatives.
#[allow(clippy::too_many_arguments)]
pub fn cocycle_apply(
    a2: f64,
    a1: f64,
    a0: f64,
    al: f64,
    be: f64,
    ga: f64,
    de: f64,
    dal: f64,
    dbe: f64,
    dga: f64,
    dde: f64,
) -> (f64, f64, f64) {
    let a2p = de * de * a2 - de * ga * a1 + ga * ga * a0 + (ga * dde - de * dga);
    let a1p = -2.0 * be * de * a2 + (al * de + be * ga) * a1 - 2.0 * al * ga * a0
        + (de * dal - al * dde + be * dga - ga * dbe);
    let a0p = be * be * a2 - al * be * a1 + al * al * a0 + (al * dbe - be * dal);
    (a2p, a1p, a0p)
}

fn solution_residual(c: &RiccatiCoeffs, times: &[f64], x: &[f64]) -> f64 {
    // fourth-order central difference on the interior
    let mut worst = 0.0f64;
    for i in 2..times.len().saturating_sub(2) {
        let h = times[i + 1] - times[i];
        let dx = (-x[i + 2] + 8.0 * x[i + 1] - 8.0 * x[i - 1] + x[i - 2]) / (12.0 * h);
        worst = worst.max((dx - c.rhs(times[i], x[i])).abs());
    }
    worst
}

/// Gauges away one, two, or three known particular solutions: with one the
/// transformed equation is linear (a₂′ = 0), with two homogeneous linear
/// (additionally a₀′ = 0), with three fully reduced (all coefficients 0).
pub fn reduce_by_solutions(
    c: &RiccatiCoeffs,
    times: &[f64],
    sols: &[Vec<f64>],
) -> Result<Reduction, SchefError> {
    assert!(!sols.is_empty() && sols.len() <= 3);
    for s in sols {
        if s.len() != times.len() {
            return Err(SchefError::ShapeMismatch);
        }
        let res = solution_residual(c, times, s);
        if res > 1e-3 {
            return Err(SchefError::NotASolution(res));
        }
    }
    let n = times.len();
    let mut coeffs = Vec::with_capacity(n);
    let mut gauge = Vec::with_capacity(n);
    for i in 0..n {
        let t = times[i];
        let (a0, a1, a2) = c.eval(t);
        let x: Vec<f64> = sols.iter().map(|s| s[i]).collect();
        let dx: Vec<f64> = x.iter().map(|&xi| c.rhs(t, xi)).collect();
        // stage 1: A₁ = [[1, 0], [−1/x₁, 1]]
        if x[0] == 0.0 {
            return Err(SchefError::DegenerateTriple);
        }
        let ga = -1.0 / x[0];
        let dga = dx[0] / (x[0] * x[0]);
        let (mut a2c, mut a1c, mut a0c) =
            cocycle_apply(a2, a1, a0, 1.0, 0.0, ga, 1.0, 0.0, 0.0, dga, 0.0);
        let mut g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, ga, 1.0]);
        if sols.len() >= 2 {
            // stage 2: A₂ = [[1, −x₁x₂/(x₁−x₂)], [0, 1]] (original solutions)
            let d12 = x[0] - x[1];
            if d12 == 0.0 {
                return Err(SchefError::DegenerateTriple);
            }
            let be = -x[0] * x[1] / d12;
            let dbe = -((dx[0] * x[1] + x[0] * dx[1]) * d12 - x[0] * x[1] * (dx[0] - dx[1]))
                / (d12 * d12);
            let (b2, b1, b0) =
                cocycle_apply(a2c, a1c, a0c, 1.0, be, 0.0, 1.0, 0.0, dbe, 0.0, 0.0);
            a2c = b2;
            a1c = b1;
            a0c = b0;
            g = DMatrix::from_row_slice(2, 2, &[1.0, be, 0.0, 1.0]) * g;
        }
        if sols.len() == 3 {
            // stage 3: A₃ = diag(z^{−1/2}, z^{1/2}) with
            // z = x₁²(x₂−x₃)/((x₂−x₁)(x₁−x₃))
            let num = x[0] * x[0] * (x[1] - x[2]);
            let den = (x[1] - x[0]) * (x[0] - x[2]);
            if den == 0.0 || num / den <= 0.0 {
                return Err(SchefError::DegenerateTriple);
            }
            let z = num / den;
            // logarithmic derivative of z
            let dz = z
                * (2.0 * dx[0] / x[0] + (dx[1] - dx[2]) / (x[1] - x[2])
                    - (dx[1] - dx[0]) / (x[1] - x[0])
                    - (dx[0] - dx[2]) / (x[0] - x[2]));
            let al = z.powf(-0.5);
            let de = z.powf(0.5);
            let dal = -0.5 * z.powf(-1.5) * dz;
            let dde = 0.5 * z.powf(-0.5) * dz;
            let (b2, b1, b0) =
                cocycle_apply(a2c, a1c, a0c, al, 0.0, 0.0, de, dal, 0.0, 0.0, dde);
            a2c = b2;
            a1c = b1;
            a0c = b0;
            g = DMatrix::from_row_slice(2, 2, &[al, 0.0, 0.0, de]) * g;
        }
        coeffs.push((a2c, a1c, a0c));
        gauge.push(g);
    }
    Ok(Reduction { times: times.to_vec(), coeffs, gauge })
}

/// Integration method for the sl(2) fundamental flow.
#[derive(Debug, Clone, Copy)]
pub enum FlowMethod {
    Magnus2,
    Magnus4,
    Dyson(usize),
}

/// Fundamental solution of dg/dt = L(t)g, g(t₀) = 1, in SL(2;R).
pub fn sl2_flow(
    c: &RiccatiCoeffs,
    t0: f64,
    t1: f64,
    h: f64,
    method: FlowMethod,
) -> Result<FlowResult, SchefError> {
    let c2 = c.clone();
    let a = SampledMatrixFn::new(2, move |t| l_matrix(&c2, t));
    let flow = match method {
        FlowMethod::Magnus2 => crate::magnus::magnus_solve(&a, t0, t1, h, 2)?,
        FlowMethod::Magnus4 => crate::magnus::magnus_solve(&a, t0, t1, h, 4)?,
        FlowMethod::Dyson(d) => crate::magnus::dyson_solve(&a, t0, t1, h, d)?,
    };
    Ok(flow)
}
