//! Lie-Scheffers superposition for the scalar Riccati equation: the general
//! solution from three quadrature variables, the constant cross-ratio of
//! any four solutions, and coefficient reduction by known solutions.
//!
//! Run with `cargo run --example riccati_superposition`.

use hopfflow::scheffers::{
    reduce_by_solutions, riccati_general, riccati_general_curve, solve_u_system,
    superposition_check, RiccatiCoeffs,
};

fn main() {
    // x' = 1 + x^2, x(0) = 0 has the solution tan(t)
    let c = RiccatiCoeffs::constant(1.0, 0.0, 1.0);
    let x = riccati_general(&c, 0.0, 0.0, 0.5, 0.001).unwrap();
    println!("x(0.5) = {x:.10}  (tan(0.5) = {:.10})", 0.5f64.tan());
    assert!((x - 0.5f64.tan()).abs() < 1e-8);

    // four solutions of the same equation share a constant cross-ratio
    let u = solve_u_system(&c, 0.0, 0.4, 1e-4).unwrap();
    let curves: Vec<Vec<f64>> = [0.3, 1.0, 2.0, 3.0]
        .iter()
        .map(|&x0| riccati_general_curve(&u, x0).unwrap())
        .collect();
    let ks = superposition_check(&curves[0], &curves[1], &curves[2], &curves[3]).unwrap();
    let mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let std = (ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / ks.len() as f64).sqrt();
    println!("cross-ratio of four solutions: mean {mean:.8}, stddev {std:.2e}");
    assert!(std < 1e-8);

    // knowing particular solutions simplifies the equation step by step:
    // one kills a2 (Riccati -> linear), two kill a1 (-> homogeneous),
    // three reduce it to quadratures
    let coeffs = RiccatiCoeffs::constant(1.0, 0.0, 1.0);
    let t0 = 0.0;
    let t1 = 0.3;
    let h: f64 = 1e-4;
    let times: Vec<f64> = {
        let n = ((t1 - t0) / h).round() as usize;
        (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect()
    };
    let u2 = solve_u_system(&coeffs, t0, t1, h).unwrap();
    let sols: Vec<Vec<f64>> = [0.5, 1.5, 2.5]
        .iter()
        .map(|&x0| riccati_general_curve(&u2, x0).unwrap())
        .collect();
    let red = reduce_by_solutions(&coeffs, &times, &sols).unwrap();
    let worst = red
        .coeffs
        .iter()
        .map(|&(a2, a1, a0)| a2.abs().max(a1.abs()).max(a0.abs()))
        .fold(0.0, f64::max);
    println!("after the three-solution reduction, max |coefficient| = {worst:.2e}");
    assert!(worst < 1e-8);
}
