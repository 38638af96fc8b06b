//! Pohozaev-identity diagnostics, the shifted-domain nonexistence
//! certificate, and the Kelvin-transform pipeline producing fast-decay
//! exterior solutions.
//!
//! For the radial solution on the unit ball the Pohozaev identity reads
//! (after dividing out the surface measure of `S^{N-1}`)
//!
//! ```text
//! [ (N-2)/2 - (N+α)/(p+1) ] ∫₀¹ r^{N-1+α} v^{p+1} dr + ½ |v'(1)|² = 0 ,
//! ```
//!
//! so the bracket vanishes exactly at `p = p_α(N)` and the identity forces
//! nonexistence above it on star-shaped domains. The same argument on a
//! far-shifted domain `x_m + Ω` carries a correction `ε_m(x)` whose sup
//! tends to zero as `|x_m| → ∞`; [`nonexistence_certificate`] evaluates
//! the resulting sign condition on a grid.
//!
//! The Kelvin transform `w(x) = |x|^{2-N} v(x/|x|²)` maps interior
//! solutions to exterior solutions with weight `|x|^β`,
//! `β = (N-2)p - N - 2 - α`; picking `α* = p(N-2) - N - 2` gives `β = 0`
//! and `|x|^{2-N}` (fast) decay.

use crate::domain_map::DomainMapSpec;
use crate::perturbed::{contraction_solve, PerturbedOptions};
use crate::problem::{alpha_for_fast_decay, ProblemParams, RadialProfile, SphericalSpectrum};
use crate::quad::integrate_composite;
use crate::radial_shoot::solve_henon_radial;
use crate::spectrum::{
    certificate_for_profile, find_pk, sweep_nu, NuOptions,
};
use crate::{Error, Result};

/// Both sides of the Pohozaev identity for a radial ball solution.
#[derive(Debug, Clone, Copy)]
pub struct PohozaevReport {
    /// `c_poh ∫₀¹ r^{N-1+α} v^{p+1} dr`
    pub volume_term: f64,
    /// `½ |v'(1)|²`
    pub boundary_term: f64,
    /// `volume_term + boundary_term` (zero in exact arithmetic)
    pub residual: f64,
    /// `|residual| / (|volume| + |boundary|)`
    pub relative_residual: f64,
    /// `(N-2)/2 - (N+α)/(p+1)`
    pub coefficient: f64,
    pub quadrature_panels: usize,
    pub quadrature_order: usize,
}

/// Quadrature resolution: composite Gauss–Legendre, 4096 panels on [0,1].
const POHOZAEV_PANELS: usize = 4096;
const POHOZAEV_ORDER: usize = 4;

/// The Pohozaev coefficient `(N-2)/2 - (N+α)/(p+1)`.
pub fn pohozaev_coefficient(params: &ProblemParams) -> f64 {
    (params.n_dim() as f64 - 2.0) / 2.0
        - (params.n_dim() as f64 + params.alpha()) / (params.p() + 1.0)
}

/// Evaluate the identity on a converged radial solution by high-order
/// quadrature of the volume term against the boundary flux term.
pub fn pohozaev_residual(vp: &RadialProfile, params: &ProblemParams) -> PohozaevReport {
    let n = params.n_dim() as f64;
    let alpha = params.alpha();
    let p = params.p();
    let c = pohozaev_coefficient(params);
    let integral = integrate_composite(
        |r| r.powf(n - 1.0 + alpha) * vp.eval(r).abs().powf(p + 1.0),
        0.0,
        1.0,
        POHOZAEV_PANELS,
        POHOZAEV_ORDER,
    );
    let volume_term = c * integral;
    let dv1 = vp.eval_deriv(1.0);
    let boundary_term = 0.5 * dv1 * dv1;
    let residual = volume_term + boundary_term;
    let scale = volume_term.abs() + boundary_term.abs();
    PohozaevReport {
        volume_term,
        boundary_term,
        residual,
        relative_residual: if scale > 0.0 {
            residual.abs() / scale
        } else {
            residual.abs()
        },
        coefficient: c,
        quadrature_panels: POHOZAEV_PANELS,
        quadrature_order: POHOZAEV_ORDER,
    }
}

/// Star-shaped domains accepted by the nonexistence certificate.
#[derive(Debug, Clone)]
pub enum StarDomain {
    /// The closed unit ball.
    Ball,
    /// Axisymmetric radial graph `r < ρ(cos θ)`, `ρ(μ) = Σ_j c_j μ^j`.
    /// Positive radial graphs are star-shaped with respect to the origin.
    RadialGraph { coeffs: Vec<f64> },
}

impl StarDomain {
    /// Boundary radius in the direction with polar cosine `μ`.
    fn rho(&self, mu: f64) -> f64 {
        match self {
            StarDomain::Ball => 1.0,
            StarDomain::RadialGraph { coeffs } => {
                let mut acc = 0.0;
                for &c in coeffs.iter().rev() {
                    acc = acc * mu + c;
                }
                acc
            }
        }
    }

    fn validate(&self) -> Result<()> {
        for j in 0..=64 {
            let mu = -1.0 + 2.0 * j as f64 / 64.0;
            if !(self.rho(mu) > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "domain boundary radius is not positive at mu = {mu}: not a star-shaped \
                     radial graph"
                )));
            }
        }
        Ok(())
    }
}

/// Certificate verdict. `Inconclusive` is not an existence claim: the
/// criterion is one-sided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateVerdict {
    CertifiedNonexistence,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct NonexistenceReport {
    pub verdict: CertificateVerdict,
    /// `min over the grid of (N-2)/2 - N/(p+1) - ε_m(x)/(p+1)`
    pub min_margin: f64,
    /// `sup |ε_m|` over the grid
    pub sup_eps: f64,
    /// Closed-form bound `α γ (1+γ)/(1-γ)²` (ball geometry)
    pub eps_bound: f64,
    /// `γ = 1/|x_m|`
    pub gamma: f64,
    pub shift: f64,
}

/// Pohozaev-type nonexistence certificate for the problem on the shifted
/// domain `x_m + Ω` with `|x_m| = shift`.
///
/// The rescaled identity carries the correction
/// `ε_m(x) = α γ (x·ẑ + γ|x|²) / |ẑ + γx|²` with `γ = 1/|x_m|` and `ẑ`
/// the shift direction (taken along the symmetry axis). Nonexistence is
/// certified when `(N-2)/2 - N/(p+1) - ε_m(x)/(p+1) > 0` on the whole
/// domain; otherwise the verdict is inconclusive.
pub fn nonexistence_certificate(
    domain: &StarDomain,
    shift: f64,
    params: &ProblemParams,
) -> Result<NonexistenceReport> {
    let n = params.n_dim() as f64;
    let p = params.p();
    let alpha = params.alpha();
    if p <= (n + 2.0) / (n - 2.0) {
        return Err(Error::InvalidParams(format!(
            "certificate requires p > (N+2)/(N-2) = {}, got p = {p}",
            (n + 2.0) / (n - 2.0)
        )));
    }
    if !(shift > 0.0) {
        return Err(Error::InvalidParams(format!(
            "shift |x_m| = {shift} must be positive"
        )));
    }
    domain.validate()?;
    let gamma = 1.0 / shift;
    let base = (n - 2.0) / 2.0 - n / (p + 1.0);
    let mut min_margin = f64::INFINITY;
    let mut sup_eps = 0.0f64;
    let n_mu = 129usize;
    let n_r = 65usize;
    for jm in 0..n_mu {
        let mu = -1.0 + 2.0 * jm as f64 / (n_mu - 1) as f64;
        let rho = domain.rho(mu);
        for jr in 0..=n_r {
            let r = rho * jr as f64 / n_r as f64;
            // ε = α γ (r μ + γ r²) / (1 + 2 γ r μ + γ² r²)
            let denom = 1.0 + 2.0 * gamma * r * mu + gamma * gamma * r * r;
            let eps = alpha * gamma * (r * mu + gamma * r * r) / denom;
            sup_eps = sup_eps.max(eps.abs());
            min_margin = min_margin.min(base - eps / (p + 1.0));
        }
    }
    let eps_bound = alpha * gamma * (1.0 + gamma) / ((1.0 - gamma) * (1.0 - gamma));
    Ok(NonexistenceReport {
        verdict: if min_margin > 0.0 {
            CertificateVerdict::CertifiedNonexistence
        } else {
            CertificateVerdict::Inconclusive
        },
        min_margin,
        sup_eps,
        eps_bound: if gamma < 1.0 { eps_bound } else { f64::INFINITY },
        gamma,
        shift,
    })
}

/// An exterior radial profile `w(s)` on `[1, S_max]`, stored on a
/// log-uniform grid together with `dw/dξ` (`ξ = log s`).
#[derive(Debug, Clone)]
pub struct ExteriorProfile {
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// derivative with respect to `ξ = log s`
    pub dvalues_log: Vec<f64>,
    pub beta: f64,
    /// fitted decay exponent `d` in `w ~ s^{-d}` over the fit window
    pub decay_exponent: f64,
    pub fit_window: (f64, f64),
    /// sup of the plug-in exterior-equation residual
    pub residual_sup: f64,
    pub n_dim: u32,
    pub p: f64,
}

impl ExteriorProfile {
    /// Hermite evaluation in the log variable.
    pub fn eval(&self, s: f64) -> f64 {
        let xi: Vec<f64> = self.s_grid.iter().map(|v| v.ln()).collect();
        crate::grid::hermite_eval(&xi, &self.values, &self.dvalues_log, s.ln())
    }
}

/// Kelvin transform values `w(s) = s^{2-N} v(1/s)` and the log-derivative
/// `dw/dξ` on an arbitrary `s >= 1` grid.
pub fn kelvin_transform_values(
    vp: &RadialProfile,
    n_dim: f64,
    s_grid: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let mut values = Vec::with_capacity(s_grid.len());
    let mut dlog = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let r = 1.0 / s;
        let v = vp.eval(r);
        let dv = vp.eval_deriv(r);
        let w = s.powf(2.0 - n_dim) * v;
        // dw/ds = (2-N) s^{1-N} v - s^{-N} v'; dw/dξ = s dw/ds
        let dw_ds = (2.0 - n_dim) * s.powf(1.0 - n_dim) * v - s.powf(-n_dim) * dv;
        values.push(w);
        dlog.push(s * dw_ds);
    }
    (values, dlog)
}

#[derive(Debug, Clone, Copy)]
pub struct ExteriorOptions {
    pub s_max: f64,
    /// log-uniform intervals on `[1, s_max]`
    pub n_nodes: usize,
}

impl Default for ExteriorOptions {
    fn default() -> Self {
        Self {
            s_max: 100.0,
            n_nodes: 8192,
        }
    }
}

/// Kelvin-transform a converged interior solution to the exterior domain
/// and verify the exterior equation `-w'' - (N-1)w'/s = s^β w^p` by a
/// 4th-order plug-in residual in the log variable; fit the decay exponent
/// on `s ∈ [S_max/4, S_max]`.
pub fn kelvin_exterior(
    vp: &RadialProfile,
    params: &ProblemParams,
    opts: &ExteriorOptions,
) -> Result<ExteriorProfile> {
    let n = params.n_dim() as f64;
    let beta = params.kelvin_beta();
    let p = params.p();
    let xi_max = opts.s_max.ln();
    let n_nodes = opts.n_nodes.max(64);
    let xi: Vec<f64> = (0..=n_nodes)
        .map(|i| xi_max * i as f64 / n_nodes as f64)
        .collect();
    let s_grid: Vec<f64> = xi.iter().map(|x| x.exp()).collect();
    let (values, dvalues_log) = kelvin_transform_values(vp, n, &s_grid);

    // residual: -w'' - (N-1) w'/s = -s^{-2}(w_ξξ + (N-2) w_ξ)
    let h = xi[1] - xi[0];
    let d1 = crate::grid::deriv1_o4(&values, h);
    let d2 = crate::grid::deriv2_o4(&values, h);
    let mut residual_sup = 0.0f64;
    for i in 3..n_nodes.saturating_sub(2) {
        let s = s_grid[i];
        let lhs = -(d2[i] + (n - 2.0) * d1[i]) / (s * s);
        let w = values[i];
        let rhs = s.powf(beta) * w.abs().powf(p - 1.0) * w;
        residual_sup = residual_sup.max((lhs - rhs).abs());
    }

    // least-squares decay fit of log w against log s on [S_max/4, S_max]
    let fit_lo = opts.s_max / 4.0;
    let fit_hi = opts.s_max;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut count = 0.0;
    for i in 0..=n_nodes {
        let s = s_grid[i];
        if s < fit_lo || s > fit_hi || values[i] <= 0.0 {
            continue;
        }
        let x = s.ln();
        let y = values[i].ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        count += 1.0;
    }
    if count < 8.0 {
        return Err(Error::InvalidParams(
            "decay fit window contains too few positive samples".into(),
        ));
    }
    let slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    Ok(ExteriorProfile {
        s_grid,
        values,
        dvalues_log,
        beta,
        decay_exponent: -slope,
        fit_window: (fit_lo, fit_hi),
        residual_sup,
        n_dim: params.n_dim(),
        p,
    })
}

/// Guard data for the fast-decay pipeline: distance from `p` to the
/// nearest located degenerate exponent of `(N, α*)`, plus the
/// mode-by-mode certificate at `p` itself.
#[derive(Debug, Clone)]
pub struct DegeneracyGuard {
    /// Nearest root of `ν(q) = -λ_k` in the scanned window, if any.
    pub nearest_pk: Option<f64>,
    pub distance: f64,
    pub certificate_min_residual: f64,
    pub certificate_degenerate: bool,
}

/// Minimal distance to a degenerate exponent tolerated by the pipeline.
pub const GUARD_DISTANCE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct FastDecayReport {
    pub n_dim: u32,
    pub p: f64,
    pub alpha_star: f64,
    pub beta: f64,
    pub interior: RadialProfile,
    pub exterior: ExteriorProfile,
    pub guard: DegeneracyGuard,
    /// Set when the perturbed variant ran: sup of the exterior residual
    /// composed through the Kelvin factor `s^{-N-2}` on the mapped grid,
    /// and the interior report residual.
    pub perturbed_exterior_residual: Option<f64>,
    pub perturbed_interior_residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FastDecayOptions {
    pub shoot_tol: f64,
    pub exterior: ExteriorOptions,
    /// Scan window half-width for the degeneracy guard.
    pub guard_window: f64,
    pub guard_samples: usize,
    /// Optional perturbed variant: solve on `Ω_t` first, then transform.
    pub map: Option<DomainMapSpec>,
    pub perturbed: PerturbedOptions,
}

impl Default for FastDecayOptions {
    fn default() -> Self {
        Self {
            shoot_tol: 1e-10,
            exterior: ExteriorOptions::default(),
            guard_window: 0.05,
            guard_samples: 11,
            map: None,
            perturbed: PerturbedOptions::default(),
        }
    }
}

/// Fast-decay exterior solution for `-Δu = u^p` outside a perturbation of
/// the unit ball: set `α* = p(N-2) - N - 2`, check `p` clears the
/// degenerate set of `(N, α*)`, solve the interior problem, and
/// Kelvin-transform. Exits with the forbidden-exponent error when the
/// guard trips.
pub fn fast_decay_pipeline(n_dim: u32, p: f64, opts: &FastDecayOptions) -> Result<FastDecayReport> {
    let alpha_star = alpha_for_fast_decay(n_dim, p)?;
    let params = ProblemParams::new(n_dim, alpha_star, p)?;
    debug_assert!(params.is_subcritical());
    let beta = params.kelvin_beta();

    // degeneracy guard: certificate at p, then a local root scan
    let vp = solve_henon_radial(&params, opts.shoot_tol)?;
    let cert = certificate_for_profile(&params, &vp, opts.shoot_tol)?;
    if cert.degenerate {
        return Err(Error::ForbiddenExponent {
            p,
            mode: cert.min_mode,
            residual: cert.min_residual,
        });
    }
    let guard = {
        let lo = (p - opts.guard_window).max(1.0 + 1e-3);
        let hi = (p + opts.guard_window).min(params.critical_exponent() - 0.05);
        let grid: Vec<f64> = (0..opts.guard_samples)
            .map(|i| lo + (hi - lo) * i as f64 / (opts.guard_samples - 1) as f64)
            .collect();
        let nu_opts = NuOptions {
            shoot_tol: opts.shoot_tol,
            ..NuOptions::default()
        };
        let curve = sweep_nu(n_dim, alpha_star, &grid, &nu_opts);
        let spectrum = SphericalSpectrum::new(n_dim, cert.k_checked);
        let table = find_pk(&curve, &spectrum, cert.k_checked, &nu_opts)?;
        let nearest = table
            .entries
            .iter()
            .map(|e| e.p_k)
            .min_by(|a, b| (a - p).abs().total_cmp(&(b - p).abs()));
        let distance = nearest.map(|pk| (pk - p).abs()).unwrap_or(f64::INFINITY);
        DegeneracyGuard {
            nearest_pk: nearest,
            distance,
            certificate_min_residual: cert.min_residual,
            certificate_degenerate: cert.degenerate,
        }
    };
    if guard.distance < GUARD_DISTANCE {
        return Err(Error::ForbiddenExponent {
            p,
            mode: 0,
            residual: guard.distance,
        });
    }

    let exterior = kelvin_exterior(&vp, &params, &opts.exterior)?;

    let (mut pert_ext, mut pert_int) = (None, None);
    if let Some(map) = &opts.map {
        let (_phi, report, _solver) = contraction_solve(&params, map, &opts.perturbed)?;
        pert_int = Some(report.residual_sup);
        // the Kelvin transform maps an interior residual field ρ(y) to
        // the exterior residual |x|^{-N-2} ρ(x/|x|²); on the image of the
        // mapped ball |x| ≥ 1/max|y|, so the sup composes as
        // ρ_sup (1 + t max|ψ|)^{N+2}
        let stretch = 1.0 + map.t * map.psi_sup_estimate();
        pert_ext = Some(report.residual_sup * stretch.powi(n_dim as i32 + 2));
    }

    Ok(FastDecayReport {
        n_dim,
        p,
        alpha_star,
        beta,
        interior: vp,
        exterior,
        guard,
        perturbed_exterior_residual: pert_ext,
        perturbed_interior_residual: pert_int,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pohozaev_coefficient_vanishes_at_critical() {
        for &(n, alpha) in &[(3u32, 0.5), (3, 1.0), (3, 2.0), (4, 1.0), (5, 2.0)] {
            let params = ProblemParams::new(n, alpha, 2.0).unwrap();
            let pc = params.critical_exponent();
            let at_crit = ProblemParams::new(n, alpha, pc).unwrap();
            assert!(
                pohozaev_coefficient(&at_crit).abs() < 1e-15,
                "N={n}, alpha={alpha}"
            );
            // below critical the coefficient is negative
            let below = ProblemParams::new(n, alpha, pc - 0.5).unwrap();
            assert!(pohozaev_coefficient(&below) < 0.0);
        }
    }

    #[test]
    fn pohozaev_identity_balances_for_lane_emden() {
        let params = ProblemParams::new(3, 0.0, 3.0).unwrap();
        let vp = solve_henon_radial(&params, 1e-11).unwrap();
        let report = pohozaev_residual(&vp, &params);
        assert!(
            report.relative_residual < 1e-6,
            "relative residual {}",
            report.relative_residual
        );
        assert!(report.volume_term < 0.0 && report.boundary_term > 0.0);
    }

    #[test]
    fn pohozaev_identity_balances_for_weighted_case() {
        let params = ProblemParams::new(3, 2.0, 4.0).unwrap();
        let vp = solve_henon_radial(&params, 1e-11).unwrap();
        let report = pohozaev_residual(&vp, &params);
        assert!(
            report.relative_residual < 1e-6,
            "relative residual {}",
            report.relative_residual
        );
    }

    #[test]
    fn certificate_certifies_far_shifted_ball() {
        let params = ProblemParams::new(3, 1.0, 6.0).unwrap();
        let report =
            nonexistence_certificate(&StarDomain::Ball, 100.0, &params).unwrap();
        assert_eq!(report.verdict, CertificateVerdict::CertifiedNonexistence);
        // sup|ε| stays below the closed-form bound ≈ 0.0102
        assert!(report.sup_eps <= report.eps_bound);
        assert!((report.eps_bound - 0.0103).abs() < 1e-3);
    }

    #[test]
    fn certificate_monotone_in_shift() {
        let params = ProblemParams::new(3, 1.0, 6.0).unwrap();
        let mut last = f64::INFINITY;
        for &shift in &[10.0, 100.0, 1000.0] {
            let report =
                nonexistence_certificate(&StarDomain::Ball, shift, &params).unwrap();
            assert!(report.sup_eps < last);
            last = report.sup_eps;
        }
    }

    #[test]
    fn certificate_is_one_sided() {
        // near shift 1.01 with large α the margin can go nonpositive:
        // verdict inconclusive, never an existence claim
        let params = ProblemParams::new(3, 8.0, 6.0).unwrap();
        let report =
            nonexistence_certificate(&StarDomain::Ball, 1.01, &params).unwrap();
        assert_eq!(report.verdict, CertificateVerdict::Inconclusive);
        assert!(report.min_margin <= 0.0);
    }

    #[test]
    fn certificate_rejects_subcritical_p_and_bad_domains() {
        let params = ProblemParams::new(3, 1.0, 4.0).unwrap();
        assert!(nonexistence_certificate(&StarDomain::Ball, 10.0, &params).is_err());
        let params = ProblemParams::new(3, 1.0, 6.0).unwrap();
        let bad = StarDomain::RadialGraph {
            coeffs: vec![0.2, -1.0],
        };
        assert!(nonexistence_certificate(&bad, 10.0, &params).is_err());
    }

    #[test]
    fn eps_vanishes_in_flat_limit() {
        // γ → 0: ε ≡ 0 and the certificate reduces to the unweighted
        // Pohozaev condition p > (N+2)/(N-2)
        let params = ProblemParams::new(3, 1.0, 5.5).unwrap();
        let report =
            nonexistence_certificate(&StarDomain::Ball, 1e9, &params).unwrap();
        assert!(report.sup_eps < 1e-8);
        assert_eq!(report.verdict, CertificateVerdict::CertifiedNonexistence);
    }

    #[test]
    fn kelvin_fixes_harmonic_profiles() {
        // v ≡ 1 maps to w = s^{2-N}: pure fast decay, harmonic outside
        let one = RadialProfile::from_fn(101, |_| 1.0, |_| 0.0);
        let s: Vec<f64> = (0..=100).map(|i| (i as f64 * 0.04).exp()).collect();
        let (w, dw_log) = kelvin_transform_values(&one, 3.0, &s);
        for (i, &si) in s.iter().enumerate() {
            assert!((w[i] - 1.0 / si).abs() < 1e-12);
            assert!((dw_log[i] + 1.0 / si).abs() < 1e-10);
        }
    }

    #[test]
    fn kelvin_involution_recovers_interior() {
        let params = ProblemParams::new(3, 1.0, 6.0).unwrap();
        let vp = solve_henon_radial(&params, 1e-11).unwrap();
        let ext = kelvin_exterior(&vp, &params, &ExteriorOptions::default()).unwrap();
        // v(r) = r^{2-N} w(1/r) on the overlap
        for &r in &[0.012, 0.05, 0.3, 0.7, 0.95] {
            let w = ext.eval(1.0 / r);
            let back = r.powf(2.0 - 3.0) * w;
            assert!(
                (back - vp.eval(r)).abs() < 1e-8,
                "r = {r}: {back} vs {}",
                vp.eval(r)
            );
        }
    }

    #[test]
    fn exterior_profile_invariants_hold() {
        // positivity off the boundary, zero boundary value, and the
        // plug-in exterior residual for a second parameter set
        let params = ProblemParams::new(4, 2.0, 4.0).unwrap();
        let vp = solve_henon_radial(&params, 1e-11).unwrap();
        assert_eq!(params.kelvin_beta(), 0.0);
        let ext = kelvin_exterior(&vp, &params, &ExteriorOptions::default()).unwrap();
        assert!(ext.values[0].abs() <= 1e-10, "w(1) = {}", ext.values[0]);
        assert!(ext.values[1..].iter().all(|&w| w > 0.0));
        assert!(ext.residual_sup <= 1e-6, "residual {}", ext.residual_sup);
    }

    #[test]
    fn fast_decay_rejects_critical_boundary() {
        assert!(matches!(
            fast_decay_pipeline(3, 5.0, &FastDecayOptions::default()),
            Err(Error::InvalidParams(_))
        ));
    }
}
