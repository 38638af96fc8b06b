use henon::ode::{integrate_until_zero, OdeOptions};
use std::time::Instant;

fn main() {
    let m = 2.0 * (3.0 + 1.0) / (2.0 + 1.0);
    let p = 6.97;
    let rs = 1e-3;
    let c2 = -1.0 / (2.0 * m);
    let c4 = p / (8.0 * m * (m + 2.0));
    let y0 = [1.0 + c2 * rs * rs + c4 * rs * rs * rs * rs, 2.0 * c2 * rs + 4.0 * c4 * rs * rs * rs];
    let rhs = move |r: f64, y: [f64; 2]| {
        [y[1], -(m - 1.0) / r * y[1] - y[0].abs().powf(p - 1.0) * y[0]]
    };
    let t0 = Instant::now();
    eprintln!("entering integrate_until_zero");
    let opts = OdeOptions { max_steps: 1000, ..OdeOptions::default() };
    let (dense, zero) = match integrate_until_zero(rhs, rs, 1e4, y0, opts) {
        Ok(v) => v,
        Err(e) => {
            println!("after {:?}: {e}", t0.elapsed());
            return;
        }
    };
    println!(
        "shot: {:?}, zero = {zero:?}, steps = {}, rejected = {}",
        t0.elapsed(),
        dense.stats.steps,
        dense.stats.rejected
    );
}
