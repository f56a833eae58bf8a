//! RB decays A·α^m + B for a strongly leaking 3 ns pulse set. The ratio of the
//! restless to the standard A sets the loss of ORBIT sensitivity.
//!
//!     cargo run --release --example orbit_sensitivity

use restless_sim::experiments::{max_sensitivity_approx, optimal_depth, orbit_depth_curve, OrbitConfig};
use restless_sim::postprocess::fit_rb_decay;
use restless_sim::restless::ExecutionMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let depths: Vec<usize> = (0..=30).collect();
    let x: Vec<f64> = depths.iter().map(|&m| m as f64).collect();
    let mut a = Vec::new();
    for mode in [ExecutionMode::Standard, ExecutionMode::Restless] {
        let config = OrbitConfig { duration: 3e-9, mode, seed: 9, ..Default::default() };
        let curve = orbit_depth_curve(&config, &depths, -2.0)?;
        let y: Vec<f64> = curve.iter().map(|p| p.f_seq).collect();
        let fit = fit_rb_decay(&x, &y)?;
        println!("{mode:<8} A = {:.4}  α = {:.4}  B = {:.4}", fit.a, fit.alpha, fit.b);
        a.push(fit.a);
    }
    println!("A_restless / A_standard = {:.3}", a[1] / a[0]);

    let r_c = 0.01;
    let m = optimal_depth(r_c).expect("0 < r_c < 1/2");
    println!(
        "r_c = {r_c}: m* = {m:.1}, |dF/dr_c| ≈ {:.1} (A = 2/3) vs {:.1} (A = 4/9)",
        -max_sensitivity_approx(2.0 / 3.0, r_c),
        -max_sensitivity_approx(4.0 / 9.0, r_c)
    );
    Ok(())
}
