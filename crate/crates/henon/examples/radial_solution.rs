//! Solve the radial problem `-Δv = r^α v^p` on the unit ball and show the
//! fractional-dimension reduction at work: the weighted problem in
//! dimension `N` is an unweighted Lane–Emden problem in dimension
//! `N(α) = 2(N + α)/(2 + α)`.

use henon::problem::{remove_weight, ProblemParams};
use henon::radial_shoot::{ode_residual_sup, solve_henon_radial};

fn main() {
    for (n_dim, alpha, p) in [(3u32, 0.0, 3.0), (3, 2.0, 3.0), (4, 1.0, 2.5), (3, 1.0, 5.0)] {
        let params = ProblemParams::new(n_dim, alpha, p).unwrap();
        let vp = solve_henon_radial(&params, 1e-10).unwrap();
        let residual = ode_residual_sup(&vp, 0.01, 0.99);
        println!(
            "N = {n_dim}, α = {alpha}, p = {p}:  N(α) = {:.6}, p_α(N) = {:.4}",
            params.fractional_dimension(),
            params.critical_exponent()
        );
        println!(
            "  v(0) = {:.8}, first zero of the unit shot R0 = {:.8}",
            vp.central_value,
            vp.first_zero.unwrap()
        );
        println!(
            "  boundary value {:.2e}, interior ODE residual {:.2e}",
            vp.boundary_value(),
            residual
        );
        // map back to the unweighted problem and verify the reduction
        let flat = remove_weight(&vp).unwrap();
        println!(
            "  transformed profile lives in dimension {:.6} with weight 0, ũ(0) = {:.8}\n",
            flat.dimension, flat.central_value
        );
    }

    // the supercritical range is rejected with a diagnostic
    let supercritical = ProblemParams::new(3, 1.0, 7.5).unwrap();
    match solve_henon_radial(&supercritical, 1e-10) {
        Err(e) => println!("p above p_α(N) is rejected: {e}"),
        Ok(_) => unreachable!("no radial solution exists above the critical exponent"),
    }
}
