//! The perturbation geometry on its own: forward map, numeric inversion,
//! the exact Jacobian identity for the inverse, and the transplanted
//! operator coefficients.

use henon::domain_map::{assemble_lt, invert_map, DomainMapSpec, MapFamily};

fn main() {
    let t = 0.01;
    for (name, family) in [
        ("dilation", MapFamily::Dilation),
        (
            "translation",
            MapFamily::Translation {
                direction: [0.0, 0.0, 1.0],
            },
        ),
        (
            "bump",
            MapFamily::Bump {
                coeffs: [0.5, 0.0, 1.0, 0.0, 0.0],
            },
        ),
    ] {
        let spec = DomainMapSpec::new(family, t).unwrap();
        let points = vec![
            [0.3, 0.0, 0.1],
            [0.0, 0.4, -0.5],
            [0.1, 0.2, 0.6],
            [0.7, 0.0, 0.0],
        ];
        let field = invert_map(&spec, &points).unwrap();
        println!(
            "{name:12} t = {t}: Lip(ψ) ≈ {:.3}, round-trip error {:.2e}",
            spec.lipschitz_estimate(),
            field.round_trip_error
        );
        // transplanted-operator values for the quadratic v = 1 - |x|²
        let grads: Vec<[f64; 3]> = points
            .iter()
            .map(|x| [-2.0 * x[0], -2.0 * x[1], -2.0 * x[2]])
            .collect();
        let hess = vec![[[-2.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, -2.0]]; points.len()];
        let lt = assemble_lt(&field, &grads, &hess).unwrap();
        println!("  L_t(1 - |x|²) at the sample points: {lt:.8?}");
    }
    println!(
        "\n(dilation: L_t(1-|x|²) = 12t/(1+t) - 6t²/(1+t)² = {:.8}; translation: L_t ≡ 0)",
        12.0 * t / (1.0 + t) - 6.0 * t * t / ((1.0 + t) * (1.0 + t))
    );
}
