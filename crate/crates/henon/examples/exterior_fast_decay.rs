//! Build a fast-decay solution of `-Δu = u^p` outside the unit ball: pick
//! the weight `α* = p(N-2) - N - 2` so the Kelvin transform of the
//! interior solution solves the unweighted exterior problem (`β = 0`),
//! then verify the `|x|^{2-N}` decay by least squares.

use henon::analysis::{fast_decay_pipeline, ExteriorOptions, FastDecayOptions};

fn main() {
    let opts = FastDecayOptions {
        exterior: ExteriorOptions {
            s_max: 1000.0,
            n_nodes: 16384,
        },
        ..FastDecayOptions::default()
    };
    for (n_dim, p) in [(3u32, 6.0), (4u32, 4.0)] {
        let report = fast_decay_pipeline(n_dim, p, &opts).unwrap();
        println!("N = {n_dim}, p = {p}:");
        println!(
            "  alpha* = {}, beta = {} (unweighted exterior problem)",
            report.alpha_star, report.beta
        );
        println!(
            "  guard: nearest degenerate exponent distance = {}",
            match report.guard.nearest_pk {
                Some(pk) => format!("{:.3e} (p_k = {pk:.6})", report.guard.distance),
                None => "none in the scanned window".to_string(),
            }
        );
        println!(
            "  exterior residual {:.2e}, fitted decay exponent {:.5} (fast decay target {})",
            report.exterior.residual_sup,
            report.exterior.decay_exponent,
            n_dim - 2
        );
        let w = &report.exterior;
        let tail = w.values.last().unwrap();
        println!(
            "  w(1) = {:.2e}, w({}) = {:.4e}\n",
            w.values[0],
            w.s_grid.last().unwrap(),
            tail
        );
    }
}
