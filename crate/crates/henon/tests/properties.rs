//! Property checks that need randomized probes or cross-module setups:
//! the measured contraction factor over random iterate pairs, symmetry
//! inheritance, angular-truncation convergence, and the degeneracy
//! criteria agreeing away from the located roots.

use henon::domain_map::{DomainMapSpec, MapFamily};
use henon::perturbed::{HarmonicField, PerturbedOptions, PerturbedSolver};
use henon::problem::ProblemParams;
use henon::radial_shoot::solve_henon_radial;
use henon::spectrum::{mode_shoot, nu_schrodinger};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random smooth mode field with Dirichlet boundary and the right origin
/// behavior, scaled to a target trust ratio.
fn random_field(solver: &PerturbedSolver, rng: &mut ChaCha8Rng, trust: f64) -> HarmonicField {
    let mut field = solver.zero_field();
    let nodes = solver.radial_nodes().to_vec();
    let k_max = field.coeffs.len() - 1;
    for k in 0..=k_max.min(6) {
        let amp: f64 = rng.random_range(-1.0..1.0);
        let freq: f64 = rng.random_range(1.0..3.0);
        for (i, &r) in nodes.iter().enumerate() {
            // r^k (1 - r²) envelope keeps the regular branch and the
            // Dirichlet end; the cosine adds radial texture
            let envelope = r.powi(k as i32) * (1.0 - r * r);
            field.coeffs[k][i] = amp * envelope * (freq * r).cos();
        }
    }
    // scale to the requested trust ratio
    let pts = solver.synthesize(&field);
    let ratio = solver.trust_ratio(&pts);
    if ratio > 0.0 {
        field.scale(trust / ratio);
    }
    field
}

#[test]
fn contraction_factor_over_random_pairs_and_t_monotonicity() {
    let params = ProblemParams::new(3, 1.0, 5.0).unwrap();
    let opts = PerturbedOptions {
        k_max: 8,
        r_nodes: 384,
        certificate: false,
        ..PerturbedOptions::default()
    };
    let map = MapFamily::Bump {
        coeffs: [0.6, 0.0, 0.8, 0.0, 0.0],
    };
    let mut kappas = Vec::new();
    for &t in &[1e-2, 1e-3] {
        let spec = DomainMapSpec::new(map.clone(), t).unwrap();
        let solver = PerturbedSolver::new(&params, &spec, &opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut kappa: f64 = 0.0;
        for _pair in 0..20 {
            let phi_a = random_field(&solver, &mut rng, 0.05);
            let phi_b = random_field(&solver, &mut rng, 0.05);
            let (ta, _) = solver.apply_t(&phi_a).unwrap();
            let (tb, _) = solver.apply_t(&phi_b).unwrap();
            let num = solver.sup_diff(&ta, &tb);
            let den = solver.sup_diff(&phi_a, &phi_b);
            kappa = kappa.max(num / den);
        }
        assert!(kappa < 1.0, "t = {t}: measured kappa {kappa}");
        kappas.push(kappa);
    }
    // the Lipschitz bound has a C(t) part: smaller t cannot be worse
    assert!(
        kappas[1] <= kappas[0] + 1e-3,
        "kappa did not decrease with t: {kappas:?}"
    );
}

#[test]
fn equatorial_symmetry_is_inherited_mode_by_mode() {
    // even g(μ) ⇒ the correction has no odd Legendre content
    let params = ProblemParams::new(3, 1.0, 5.0).unwrap();
    let spec = DomainMapSpec::new(
        MapFamily::Bump {
            coeffs: [0.5, 0.0, 1.0, 0.0, 0.25],
        },
        1e-2,
    )
    .unwrap();
    let opts = PerturbedOptions {
        k_max: 12,
        r_nodes: 512,
        ..PerturbedOptions::default()
    };
    let solver = PerturbedSolver::new(&params, &spec, &opts).unwrap();
    let (phi, report) = solver.solve().unwrap();
    assert!(report.kappa < 1.0);
    for k in (1..=opts.k_max).step_by(2) {
        let sup = phi.coeffs[k].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(sup <= 1e-9, "odd mode {k} has amplitude {sup}");
    }
    // and the even modes genuinely carry the correction
    let even_sup = phi.coeffs[2].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(even_sup > 1e-6);
}

#[test]
fn angular_truncation_is_converged() {
    // K_max 16 -> 32 moves the solution by <= 1e-7 for the bump family
    let params = ProblemParams::new(3, 1.0, 5.0).unwrap();
    let spec = DomainMapSpec::new(
        MapFamily::Bump {
            coeffs: [0.6, 0.2, 0.8, 0.1, 0.0],
        },
        1e-2,
    )
    .unwrap();
    let mut sups = Vec::new();
    for k_max in [16usize, 32] {
        let opts = PerturbedOptions {
            k_max,
            r_nodes: 512,
            ..PerturbedOptions::default()
        };
        let solver = PerturbedSolver::new(&params, &spec, &opts).unwrap();
        let (phi, _) = solver.solve().unwrap();
        // compare on a fixed angular set: sup over the k<=16 coefficients
        let mut per_node = vec![0.0f64; solver.radial_nodes().len()];
        for k in 0..=16 {
            for (i, v) in phi.coeffs[k].iter().enumerate() {
                per_node[i] += v; // P_k(1) = 1: value along the axis
            }
        }
        sups.push(per_node);
    }
    let drift = sups[0]
        .iter()
        .zip(&sups[1])
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(drift <= 1e-7, "truncation drift {drift}");
}

#[test]
fn degeneracy_criteria_agree_at_random_non_roots() {
    // away from the single located root p_2 of (N=3, α=2.05), the
    // eigenvalue criterion and the mode shot must both report
    // nondegeneracy (the shot boundary value stays off zero)
    let n_dim = 3u32;
    let alpha = 2.05;
    let p_2 = 5.089066485870;
    let mut rng = ChaCha8Rng::seed_from_u64(20240811);
    let mut checked = 0;
    while checked < 20 {
        let p: f64 = rng.random_range(5.0..6.2);
        if (p - p_2).abs() < 0.02 {
            continue;
        }
        let params = ProblemParams::new(n_dim, alpha, p).unwrap();
        let vp = solve_henon_radial(&params, 1e-10).unwrap();
        let nu = nu_schrodinger(&vp, 40.0, 2000).unwrap();
        for k in 1..=3usize {
            let lambda = (k * (k + 1)) as f64;
            let shot = mode_shoot(&vp, k, 1e-10).unwrap();
            if (nu + lambda).abs() > 0.05 {
                assert!(
                    shot.boundary_value.abs() > 1e-4,
                    "mode {k} shot vanished at non-root p = {p} (nu = {nu})"
                );
            }
        }
        checked += 1;
    }
}

#[test]
fn fast_decay_perturbed_variant_composes_residuals() {
    // solve on the perturbed ball first, then transform: the exterior
    // residual on the mapped grid composes through the Kelvin factor
    use henon::analysis::{fast_decay_pipeline, FastDecayOptions};
    let opts = FastDecayOptions {
        map: Some(
            henon::domain_map::DomainMapSpec::new(
                henon::domain_map::MapFamily::Bump {
                    coeffs: [0.6, 0.0, 0.8, 0.0, 0.0],
                },
                1e-3,
            )
            .unwrap(),
        ),
        ..FastDecayOptions::default()
    };
    let report = fast_decay_pipeline(3, 6.0, &opts).unwrap();
    let ext = report
        .perturbed_exterior_residual
        .expect("perturbed variant must report the composed residual");
    assert!(ext <= 1e-5, "composed exterior residual {ext}");
    let interior = report.perturbed_interior_residual.unwrap();
    assert!(interior <= 1e-5, "perturbed interior residual {interior}");
}

#[test]
fn radial_solutions_decrease_strictly_across_parameters() {
    for (n_dim, alpha, p) in [(3u32, 0.5, 3.0), (3, 2.0, 6.0), (4, 1.0, 3.0), (5, 1.5, 2.2)] {
        let params = ProblemParams::new(n_dim, alpha, p).unwrap();
        let vp = solve_henon_radial(&params, 1e-10).unwrap();
        for i in 1..vp.len() {
            assert!(
                vp.dvalues[i] < 0.0,
                "(N={n_dim}, α={alpha}, p={p}): v' at r = {}",
                vp.grid[i]
            );
        }
        assert!(vp.boundary_value().abs() <= 1e-10);
        assert!(vp.values[..vp.len() - 1].iter().all(|&v| v > 0.0));
    }
}
