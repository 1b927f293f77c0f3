//! Magnus vs Dyson integration of a non-autonomous linear system: measured
//! convergence order, determinant preservation for traceless generators,
//! and the symbolic Magnus terms as Rota-Baxter words.
//!
//! Run with `cargo run --example magnus_integrator` (release mode is faster).

use hopfflow::magnus::{
    convergence_slope, dyson_solve, magnus_solve, matrix_max_abs, omega_terms, rk4_flow,
    SampledMatrixFn,
};

fn main() {
    // symbolic Magnus terms Omega_n = R(chi^0_n) through order 3
    for (n, term) in omega_terms(3).iter().enumerate() {
        println!("Omega_{}: {}", n + 1, term.canonical_text());
    }

    // Airy-type 2x2 system x'' = -t x as a first-order flow
    let airy = SampledMatrixFn::airy();
    let oracle = rk4_flow(&airy, 0.0, 1.0, 20000);

    let hs: Vec<f64> = (3..=7).map(|k| 1.0 / (1 << k) as f64).collect();
    let errs: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let flow = magnus_solve(&airy, 0.0, 1.0, h, 4).unwrap();
            matrix_max_abs(&(flow.flows.last().unwrap() - &oracle))
        })
        .collect();
    let slope = convergence_slope(&hs, &errs);
    println!("order-4 Magnus measured convergence slope: {slope:.3}");
    assert!((slope - 4.0).abs() < 0.3);

    // determinant preservation: the generator is traceless, so det F = 1;
    // the Magnus flow is a matrix exponential and keeps this exactly
    let flow = magnus_solve(&airy, 0.0, 1.0, 0.25, 4).unwrap();
    let det_defect = flow.dets.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
    println!("Magnus det defect at h = 1/4:  {det_defect:.2e}");
    assert!(det_defect < 1e-10);

    // a truncated Dyson series is not in the group: its det drifts
    let dyson = dyson_solve(&airy, 0.0, 1.0, 0.25, 2).unwrap();
    let dyson_defect = dyson.dets.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
    println!("Dyson depth-2 det defect:      {dyson_defect:.2e}");
    assert!(dyson_defect > 1e-6);
}
