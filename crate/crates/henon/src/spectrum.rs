//! Spectrum of the linearized operator at the radial solution.
//!
//! The linearization `L(φ) = -Δφ - p r^α v_p^{p-1} φ` decomposes over
//! spherical harmonics; the mode-`k` radial part is
//!
//! ```text
//! a_k'' + (N-1)/r a_k' + p r^α v_p^{p-1} a_k - λ_k a_k / r² = 0 .
//! ```
//!
//! Degeneracy of `v_p` on mode `k` means the regular-branch shot of this
//! equation vanishes at `r = 1`; equivalently the first eigenvalue `ν(p)`
//! of `r²(-Δ - p r^α v_p^{p-1})` on radial functions in
//! `L²(B, |x|^{-2}dx)` equals `-λ_k`.
//!
//! `ν(p)` is computed two independent ways and the agreement is the
//! module's primary correctness gate:
//!
//! * [`nu_schrodinger`] — the log-radius similarity reduction
//!   `t = -log r`, `ψ = r^{-(N-2)/2} χ` turns the weighted problem into a
//!   regular 1-D Schrödinger operator on `[0, T]` with Dirichlet ends.
//! * [`nu_direct`] — a conservative finite-volume discretization of the
//!   weighted radial form itself on a geometrically graded mesh, solved as
//!   a generalized symmetric-definite tridiagonal eigenproblem.
//!
//! Both use Sturm-count bisection with inverse-iteration polish and a
//! two-grid Richardson extrapolation.
//!
//! The discretizations realize the Friedrichs-type extension selected by
//! the regular branch at the origin (`a_k ~ r^k`); the singular branch is
//! excluded by the mesh truncation, matching the shot's launch condition.

use crate::linalg::tridiag_eigenvalue;
use crate::ode::{self, OdeOptions};
use crate::problem::{lambda_k, ProblemParams, RadialProfile, SphericalSpectrum};
use crate::radial_shoot::solve_henon_radial;
use crate::{Error, Result};
use rayon::prelude::*;

/// Radius below which the mode shot uses its series launch.
const SERIES_RADIUS: f64 = 1e-3;

/// One regular-branch shot of the mode-`k` linearized equation.
#[derive(Debug, Clone)]
pub struct ModeShot {
    pub k: usize,
    pub lambda: f64,
    /// `a_k(1)` with the shot normalized so that `max |a_k| = 1`.
    pub boundary_value: f64,
    /// The (normalized) mode profile `a_k` on `[0, 1]`.
    pub profile: RadialProfile,
}

/// Integrate the mode-`k` equation from the regular branch at the origin.
///
/// Works in the scaled variable `b = a_k / r^k`, which satisfies the
/// regular equation `b'' + (N + 2k - 1)/r b' + p r^α v^{p-1} b = 0` with
/// `b(0) = 1`, `b'(0) = 0` (the `λ_k/r²` term cancels identically), so no
/// underflow occurs for large `k`.
pub fn mode_shoot(vp: &RadialProfile, k: usize, tol: f64) -> Result<ModeShot> {
    let n_dim = vp.dimension;
    let alpha = vp.weight_alpha;
    let p = vp.p;
    let m_eff = n_dim + 2.0 * k as f64;
    let v0 = vp.central_value;
    // b ≈ 1 - c r^{2+α} near the origin
    let c = p * v0.abs().powf(p - 1.0) / ((alpha + 2.0) * (alpha + m_eff));
    let rs = SERIES_RADIUS;
    let b0 = 1.0 - c * rs.powf(2.0 + alpha);
    let db0 = -c * (2.0 + alpha) * rs.powf(1.0 + alpha);
    let rhs = move |r: f64, y: [f64; 2]| {
        let w = p * r.powf(alpha) * vp.eval(r).abs().powf(p - 1.0);
        [y[1], -(m_eff - 1.0) / r * y[1] - w * y[0]]
    };
    let opts = OdeOptions {
        rel_tol: tol,
        abs_tol: tol,
        ..OdeOptions::default()
    };
    let dense = ode::integrate(rhs, rs, 1.0, [b0, db0], opts)?;

    let n = 2001usize;
    let grid = crate::grid::linspace(0.0, 1.0, n);
    let mut values = Vec::with_capacity(n);
    let mut dvalues = Vec::with_capacity(n);
    for &r in &grid {
        let (b, db) = if r < rs {
            (
                1.0 - c * r.powf(2.0 + alpha),
                -c * (2.0 + alpha) * r.powf(1.0 + alpha),
            )
        } else {
            let y = dense.eval(r);
            (y[0], y[1])
        };
        // a = r^k b, a' = k r^{k-1} b + r^k b'
        let (a, da) = if k == 0 {
            (b, db)
        } else if r == 0.0 {
            (0.0, if k == 1 { b } else { 0.0 })
        } else {
            let rk = r.powi(k as i32);
            (rk * b, k as f64 * rk / r * b + rk * db)
        };
        values.push(a);
        dvalues.push(da);
    }
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(sup > 0.0) || !sup.is_finite() {
        return Err(Error::Integration("mode shot degenerated to zero".into()));
    }
    for v in values.iter_mut().chain(dvalues.iter_mut()) {
        *v /= sup;
    }
    let boundary_value = *values.last().unwrap();
    let central_value = values[0];
    Ok(ModeShot {
        k,
        lambda: lambda_k(n_dim.round() as u32, k),
        boundary_value,
        profile: RadialProfile {
            grid,
            values,
            dvalues,
            dimension: n_dim,
            weight_alpha: alpha,
            p,
            central_value,
            first_zero: None,
        },
    })
}

/// Smallest (index `which`) eigenvalue of `-χ'' + q(t) χ` on `(0, t_max)`
/// with Dirichlet ends, by 2nd-order finite differences on `n` intervals.
pub fn schrodinger_eigenvalue<Q: Fn(f64) -> f64>(
    q: Q,
    t_max: f64,
    n: usize,
    which: usize,
) -> Result<f64> {
    if n < 100 {
        return Err(Error::InvalidParams(format!(
            "schrodinger grid needs at least 100 intervals, got {n}"
        )));
    }
    let h = t_max / n as f64;
    let mut diag = Vec::with_capacity(n - 1);
    for i in 1..n {
        diag.push(2.0 / (h * h) + q(i as f64 * h));
    }
    let off = vec![-1.0 / (h * h); n - 2];
    tridiag_eigenvalue(&diag, &off, which)
}

/// Controls for the eigenvalue computations.
#[derive(Debug, Clone, Copy)]
pub struct NuOptions {
    /// Log-radius truncation for the Schrödinger form (`r_min = e^{-t_max}`).
    pub t_max: f64,
    /// Intervals for the Schrödinger grid (doubled for the Richardson pass).
    pub n_schrodinger: usize,
    /// Mesh depth for the direct form (`r_min = e^{-t_depth}`).
    pub t_depth: f64,
    /// Mesh intervals for the direct form (doubled for Richardson).
    pub n_direct: usize,
    /// Shooting tolerance for the radial solution.
    pub shoot_tol: f64,
}

impl Default for NuOptions {
    fn default() -> Self {
        Self {
            t_max: 40.0,
            n_schrodinger: 4000,
            t_depth: 30.0,
            n_direct: 4000,
            shoot_tol: 1e-10,
        }
    }
}

/// First eigenvalue `ν(p)` through the log-radius reduction, Richardson
/// extrapolated over grids `n` and `2n`.
pub fn nu_schrodinger(vp: &RadialProfile, t_max: f64, n_nodes: usize) -> Result<f64> {
    nu_schrodinger_k(vp, t_max, n_nodes, 0)
}

/// `which`-th smallest eigenvalue of the reduced operator.
pub fn nu_schrodinger_k(
    vp: &RadialProfile,
    t_max: f64,
    n_nodes: usize,
    which: usize,
) -> Result<f64> {
    let n_dim = vp.dimension;
    let alpha = vp.weight_alpha;
    let p = vp.p;
    let c2 = ((n_dim - 2.0) / 2.0).powi(2);
    let q = |t: f64| {
        let r = (-t).exp();
        c2 - p * (-(2.0 + alpha) * t).exp() * vp.eval(r).abs().powf(p - 1.0)
    };
    let e1 = schrodinger_eigenvalue(q, t_max, n_nodes, which)?;
    let e2 = schrodinger_eigenvalue(q, t_max, 2 * n_nodes, which)?;
    Ok((4.0 * e2 - e1) / 3.0)
}

/// `which`-th smallest eigenvalue of the weighted radial operator
/// `r²(-Δ - W(r))` discretized directly in `r`: conservative finite
/// volumes for `-(r^{N-1} ψ')' - W r^{N-1} ψ = ν r^{N-3} ψ` on the
/// geometric mesh `r_i = e^{-t_depth + i Δ}`, Dirichlet at both ends,
/// reduced to a standard symmetric tridiagonal problem by the diagonal
/// congruence with the mass matrix.
pub fn direct_eigenvalue<W: Fn(f64) -> f64>(
    potential: W,
    n_dim: f64,
    t_depth: f64,
    n: usize,
    which: usize,
) -> Result<f64> {
    if n < 100 {
        return Err(Error::InvalidParams(format!(
            "direct mesh needs at least 100 intervals, got {n}"
        )));
    }
    let delta = t_depth / n as f64;
    let r: Vec<f64> = (0..=n).map(|i| (-t_depth + i as f64 * delta).exp()).collect();
    let faces: Vec<f64> = (0..n).map(|i| 0.5 * (r[i] + r[i + 1])).collect();
    let hcell: Vec<f64> = (0..n).map(|i| r[i + 1] - r[i]).collect();
    // flux coefficient across face i (between nodes i and i+1)
    let cf: Vec<f64> = (0..n)
        .map(|i| faces[i].powf(n_dim - 1.0) / hcell[i])
        .collect();
    let mut diag = Vec::with_capacity(n - 1);
    let mut mass = Vec::with_capacity(n - 1);
    for i in 1..n {
        let vol = faces[i] - faces[i - 1];
        let ri = r[i];
        diag.push(cf[i - 1] + cf[i] - potential(ri) * ri.powf(n_dim - 1.0) * vol);
        mass.push(ri.powf(n_dim - 3.0) * vol);
    }
    let off: Vec<f64> = (1..n - 1).map(|i| -cf[i]).collect();
    // congruence to a standard symmetric problem
    let s: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let d_std: Vec<f64> = diag.iter().zip(&s).map(|(d, si)| d * si * si).collect();
    let e_std: Vec<f64> = off
        .iter()
        .enumerate()
        .map(|(i, e)| e * s[i] * s[i + 1])
        .collect();
    tridiag_eigenvalue(&d_std, &e_std, which)
}

/// First eigenvalue `ν(p)` by the direct weighted discretization,
/// Richardson extrapolated. Independent oracle for [`nu_schrodinger`].
pub fn nu_direct(vp: &RadialProfile, n_nodes: usize) -> Result<f64> {
    nu_direct_k(vp, n_nodes, 0)
}

/// `which`-th smallest eigenvalue of the direct discretization.
pub fn nu_direct_k(vp: &RadialProfile, n_nodes: usize, which: usize) -> Result<f64> {
    let alpha = vp.weight_alpha;
    let p = vp.p;
    let n_dim = vp.dimension;
    let w = |r: f64| p * r.powf(alpha) * vp.eval(r).abs().powf(p - 1.0);
    let t_depth = 30.0;
    let e1 = direct_eigenvalue(w, n_dim, t_depth, n_nodes, which)?;
    let e2 = direct_eigenvalue(w, n_dim, t_depth, 2 * n_nodes, which)?;
    Ok((4.0 * e2 - e1) / 3.0)
}

/// One sample of the spectral curve.
#[derive(Debug, Clone, Copy)]
pub struct NuSample {
    pub p: f64,
    /// Primary value (log-radius reduction).
    pub nu: f64,
    /// Independent direct-discretization value.
    pub nu_direct: f64,
    /// `nu - nu_direct`.
    pub gap: f64,
    /// Second-smallest eigenvalue of the direct discretization.
    pub nu_second: f64,
    /// Sup of the potential `p r^{2+α} v_p^{p-1}` (bounds `|ν|`).
    pub potential_sup: f64,
}

/// Sampled `ν(p)` over a `p` grid, with per-sample agreement records.
#[derive(Debug, Clone)]
pub struct SpectralCurve {
    pub n_dim: u32,
    pub alpha: f64,
    pub samples: Vec<NuSample>,
    /// Samples that failed, with diagnostics; never silently dropped.
    pub failures: Vec<(f64, String)>,
    pub method: &'static str,
}

/// Sweep `ν(p)` over the grid. Samples run in parallel and are merged in
/// grid order, so output is deterministic for a fixed configuration.
pub fn sweep_nu(n_dim: u32, alpha: f64, p_grid: &[f64], opts: &NuOptions) -> SpectralCurve {
    let results: Vec<(f64, Result<NuSample>)> = p_grid
        .par_iter()
        .map(|&p| (p, nu_sample(n_dim, alpha, p, opts)))
        .collect();
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (p, res) in results {
        match res {
            Ok(s) => samples.push(s),
            Err(e) => failures.push((p, e.to_string())),
        }
    }
    SpectralCurve {
        n_dim,
        alpha,
        samples,
        failures,
        method: "schrodinger+direct",
    }
}

/// Compute one `(p, ν)` sample with both discretizations.
pub fn nu_sample(n_dim: u32, alpha: f64, p: f64, opts: &NuOptions) -> Result<NuSample> {
    let params = ProblemParams::new(n_dim, alpha, p)?;
    let vp = solve_henon_radial(&params, opts.shoot_tol)?;
    let nu = nu_schrodinger(&vp, opts.t_max, opts.n_schrodinger)?;
    let nu_d = nu_direct(&vp, opts.n_direct)?;
    let nu_second = nu_direct_k(&vp, opts.n_direct, 1)?;
    let potential_sup = potential_sup(&vp);
    Ok(NuSample {
        p,
        nu,
        nu_direct: nu_d,
        gap: nu - nu_d,
        nu_second,
        potential_sup,
    })
}

/// `sup_r p r^{2+α} v_p^{p-1}` over the profile grid.
pub fn potential_sup(vp: &RadialProfile) -> f64 {
    let p = vp.p;
    let alpha = vp.weight_alpha;
    vp.grid
        .iter()
        .zip(&vp.values)
        .map(|(&r, &v)| p * r.powf(2.0 + alpha) * v.abs().powf(p - 1.0))
        .fold(0.0f64, f64::max)
}

/// One located degenerate exponent.
#[derive(Debug, Clone, Copy)]
pub struct DegeneracyEntry {
    pub k: usize,
    pub lambda: f64,
    pub p_k: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
    /// `|a_k(1)|` of the normalized mode shot at `p_k`.
    pub mode_shot_residual: f64,
}

/// Roots of `ν(p) = -λ_k` inside the sweep range, sorted by `p_k`.
#[derive(Debug, Clone)]
pub struct DegeneracyTable {
    pub n_dim: u32,
    pub alpha: f64,
    pub entries: Vec<DegeneracyEntry>,
}

/// Locate every root of `g_k(p) = ν(p) + λ_k` bracketed by the sweep
/// samples, for `k = 1..=k_max`. Brackets are confirmed by an 11-point
/// refinement (a cell holding more than one crossing after two refinement
/// levels is reported as an error), bisected to `|Δp| <= 1e-8`, and
/// cross-checked against the independent mode shot.
pub fn find_pk(
    curve: &SpectralCurve,
    spectrum: &SphericalSpectrum,
    k_max: usize,
    opts: &NuOptions,
) -> Result<DegeneracyTable> {
    let n_dim = curve.n_dim;
    let alpha = curve.alpha;
    let nu_at = |p: f64| -> Result<f64> {
        let params = ProblemParams::new(n_dim, alpha, p)?;
        let vp = solve_henon_radial(&params, opts.shoot_tol)?;
        nu_schrodinger(&vp, opts.t_max, opts.n_schrodinger)
    };
    let mut entries = Vec::new();
    for mode in spectrum.entries.iter().filter(|m| m.k >= 1 && m.k <= k_max) {
        let lam = mode.lambda;
        for pair in curve.samples.windows(2) {
            let (g0, g1) = (pair[0].nu + lam, pair[1].nu + lam);
            if g0 == 0.0 || g0 * g1 >= 0.0 {
                continue;
            }
            let brackets =
                confirm_brackets(&nu_at, lam, pair[0].p, pair[1].p, g0, g1, 2)?;
            for (lo, hi, glo) in brackets {
                let (p_k, bracket) = bisect_root(&nu_at, lam, lo, hi, glo)?;
                let params = ProblemParams::new(n_dim, alpha, p_k)?;
                let vp = solve_henon_radial(&params, opts.shoot_tol)?;
                let shot = mode_shoot(&vp, mode.k, opts.shoot_tol)?;
                entries.push(DegeneracyEntry {
                    k: mode.k,
                    lambda: lam,
                    p_k,
                    bracket,
                    mode_shot_residual: shot.boundary_value.abs(),
                });
            }
        }
    }
    entries.sort_by(|a, b| a.p_k.total_cmp(&b.p_k));
    Ok(DegeneracyTable {
        n_dim,
        alpha,
        entries,
    })
}

/// Split a sign-change cell into 10 subcells and return every subcell that
/// brackets a crossing. Recurses when a subcell still shows more than one
/// crossing; two levels of ambiguity is an error.
fn confirm_brackets<F: Fn(f64) -> Result<f64>>(
    nu_at: &F,
    lam: f64,
    lo: f64,
    hi: f64,
    g_lo: f64,
    g_hi: f64,
    levels: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    let n_sub = 10usize;
    let mut gs = Vec::with_capacity(n_sub + 1);
    gs.push(g_lo);
    for j in 1..n_sub {
        let p = lo + (hi - lo) * j as f64 / n_sub as f64;
        gs.push(nu_at(p)? + lam);
    }
    gs.push(g_hi);
    let mut out = Vec::new();
    for j in 0..n_sub {
        let a = lo + (hi - lo) * j as f64 / n_sub as f64;
        let b = lo + (hi - lo) * (j + 1) as f64 / n_sub as f64;
        if gs[j] == 0.0 {
            out.push((a, a, 0.0));
        } else if gs[j] * gs[j + 1] < 0.0 {
            out.push((a, b, gs[j]));
        }
    }
    if out.len() <= 1 {
        return Ok(out);
    }
    if levels == 0 {
        return Err(Error::Eigensolve(format!(
            "ambiguous bracket for lambda = {lam}: {} crossings in [{lo}, {hi}]",
            out.len()
        )));
    }
    let mut refined = Vec::new();
    for (a, b, ga) in out {
        if a == b {
            refined.push((a, b, ga));
            continue;
        }
        let gb = nu_at(b)? + lam;
        refined.extend(confirm_brackets(nu_at, lam, a, b, ga, gb, levels - 1)?);
    }
    Ok(refined)
}

fn bisect_root<F: Fn(f64) -> Result<f64>>(
    nu_at: &F,
    lam: f64,
    mut lo: f64,
    mut hi: f64,
    g_lo: f64,
) -> Result<(f64, (f64, f64))> {
    if lo == hi {
        return Ok((lo, (lo, hi)));
    }
    let mut sign_lo = g_lo.signum();
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        let g_mid = nu_at(mid)? + lam;
        if g_mid == 0.0 {
            return Ok((mid, (lo, hi)));
        }
        if g_mid.signum() == sign_lo {
            lo = mid;
            sign_lo = g_mid.signum();
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), (lo, hi)))
}

/// Verdict of the mode-by-mode degeneracy check.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub n_dim: u32,
    pub alpha: f64,
    pub p: f64,
    /// Largest mode checked; beyond it `λ_k` dominates the potential sup
    /// and the mode operator is positive.
    pub k_checked: usize,
    pub potential_sup: f64,
    /// `(k, |a_k(1)|)` for each checked mode, shot normalized to sup 1.
    pub boundary_values: Vec<(usize, f64)>,
    pub min_residual: f64,
    pub min_mode: usize,
    pub degenerate: bool,
}

/// Verdict threshold on the normalized boundary value.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

/// Shoot every mode up to the positivity cutoff and report the smallest
/// normalized boundary value. A verdict of `degenerate` is a result, not
/// an error.
pub fn nondegeneracy_certificate(params: &ProblemParams, tol: f64) -> Result<CertificateReport> {
    let vp = solve_henon_radial(params, tol)?;
    certificate_for_profile(params, &vp, tol)
}

/// As [`nondegeneracy_certificate`] reusing an existing radial solution.
pub fn certificate_for_profile(
    params: &ProblemParams,
    vp: &RadialProfile,
    tol: f64,
) -> Result<CertificateReport> {
    let q_sup = potential_sup(vp);
    let n = params.n_dim() as f64;
    // smallest k with k(k + N - 2) >= q_sup
    let k_cut = (0.5 * (-(n - 2.0) + ((n - 2.0) * (n - 2.0) + 4.0 * q_sup).sqrt())).ceil() as usize;
    let k_checked = k_cut.max(1);
    let mut boundary_values = Vec::with_capacity(k_checked + 1);
    let mut min_residual = f64::INFINITY;
    let mut min_mode = 0usize;
    for k in 0..=k_checked {
        let shot = mode_shoot(vp, k, tol)?;
        let res = shot.boundary_value.abs();
        boundary_values.push((k, res));
        if res < min_residual {
            min_residual = res;
            min_mode = k;
        }
    }
    Ok(CertificateReport {
        n_dim: params.n_dim(),
        alpha: params.alpha(),
        p: params.p(),
        k_checked,
        potential_sup: q_sup,
        boundary_values,
        min_residual,
        min_mode,
        degenerate: min_residual <= DEGENERACY_THRESHOLD,
    })
}
