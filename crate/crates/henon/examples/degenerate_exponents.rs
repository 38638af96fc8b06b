//! Locate a degenerate exponent p_k — a value of p where the linearized
//! operator acquires a kernel on spherical-harmonic mode k — and
//! cross-validate it with the independent mode shot.
//!
//! For N = 3 the eigenvalue curve ν(p) saturates quickly, so roots of
//! ν(p) = -λ_k land inside [ (N+2)/(N-2), p_α(N) ) only when λ_k sits
//! just under the saturation value (2+α)(4+α)/4. With α = 2.05 the k = 2
//! eigenvalue λ_2 = 6 does, and the root appears near p ≈ 5.089.

use henon::problem::{ProblemParams, SphericalSpectrum};
use henon::radial_shoot::solve_henon_radial;
use henon::spectrum::{find_pk, mode_shoot, sweep_nu, NuOptions};

fn main() {
    let (n_dim, alpha) = (3u32, 2.05);
    let opts = NuOptions::default();
    let grid: Vec<f64> = (0..25).map(|i| 5.0 + 0.8 * i as f64 / 24.0).collect();
    println!("sweeping ν(p) on [{}, {}] ...", grid[0], grid.last().unwrap());
    let curve = sweep_nu(n_dim, alpha, &grid, &opts);
    let spectrum = SphericalSpectrum::new(n_dim, 4);
    let table = find_pk(&curve, &spectrum, 4, &opts).unwrap();

    println!("{:>3} {:>10} {:>18} {:>14}", "k", "lambda_k", "p_k", "|a_k(1)|");
    for e in &table.entries {
        println!(
            "{:3} {:10.1} {:18.12} {:14.3e}",
            e.k, e.lambda, e.p_k, e.mode_shot_residual
        );
    }

    // the mode shot is far from zero away from the root
    if let Some(e) = table.entries.first() {
        for offset in [-0.05, 0.05] {
            let p = e.p_k + offset;
            let params = ProblemParams::new(n_dim, alpha, p).unwrap();
            let vp = solve_henon_radial(&params, 1e-10).unwrap();
            let shot = mode_shoot(&vp, e.k, 1e-10).unwrap();
            println!(
                "mode-{} shot at p_k {offset:+}: |a_k(1)| = {:.3e}",
                e.k,
                shot.boundary_value.abs()
            );
        }
    }
}
