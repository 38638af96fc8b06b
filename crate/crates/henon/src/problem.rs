//! Problem parameters and the closed-form exponent and transform formulas
//! shared by every solver in the crate.
//!
//! The weighted radial equation `-Δ_N u = r^α u^p` on the unit ball turns
//! into the unweighted equation `-Δ_m ũ = ũ^p` in the (possibly fractional)
//! effective dimension `m = 2(N + α)/(2 + α)` under
//! `u(r) = (1 + α/2)^{2/(p-1)} ũ(r^{1+α/2})`. [`remove_weight`] and
//! [`restore_weight`] implement the two directions on sampled profiles.

use crate::grid::{hermite_eval, hermite_eval_deriv, linspace};
use crate::{Error, Result};

/// Parameters of the Hénon problem `-Δu = |x|^α u^p`.
///
/// Construction validates `N >= 3`, `α > -2` and `p > 1`. The transform
/// formulas are meaningful for every `α > -2`; the solver pipelines
/// additionally require `α >= 0` and check it at their entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    n_dim: u32,
    alpha: f64,
    p: f64,
}

impl ProblemParams {
    pub fn new(n_dim: u32, alpha: f64, p: f64) -> Result<Self> {
        if n_dim < 3 {
            return Err(Error::InvalidParams(format!(
                "dimension N = {n_dim} is below 3"
            )));
        }
        if !(alpha > -2.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "weight exponent alpha = {alpha} must satisfy alpha > -2"
            )));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParams(format!(
                "nonlinearity exponent p = {p} must satisfy p > 1"
            )));
        }
        Ok(Self { n_dim, alpha, p })
    }

    pub fn n_dim(&self) -> u32 {
        self.n_dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The weighted critical exponent `p_α(N) = (N + 2 + 2α)/(N - 2)`.
    pub fn critical_exponent(&self) -> f64 {
        (self.n_dim as f64 + 2.0 + 2.0 * self.alpha) / (self.n_dim as f64 - 2.0)
    }

    /// The effective dimension `N(α) = 2(N + α)/(2 + α)` in which the
    /// weighted radial problem becomes unweighted. Identity at `α = 0`.
    pub fn fractional_dimension(&self) -> f64 {
        2.0 * (self.n_dim as f64 + self.alpha) / (2.0 + self.alpha)
    }

    /// Exterior weight exponent `β = (N-2)p - N - 2 - α` produced by the
    /// Kelvin transform of an interior solution.
    pub fn kelvin_beta(&self) -> f64 {
        (self.n_dim as f64 - 2.0) * self.p - self.n_dim as f64 - 2.0 - self.alpha
    }

    /// True when `p < p_α(N)` (the existence range for the radial solution).
    pub fn is_subcritical(&self) -> bool {
        self.p < self.critical_exponent()
    }
}

/// The weight `α* = p(N-2) - N - 2` for which the Kelvin transform of the
/// interior solution solves the unweighted exterior problem (`β = 0`).
///
/// Requires `p > (N+2)/(N-2)`, which is exactly `α* > 0`.
pub fn alpha_for_fast_decay(n_dim: u32, p: f64) -> Result<f64> {
    if n_dim < 3 {
        return Err(Error::InvalidParams(format!(
            "dimension N = {n_dim} is below 3"
        )));
    }
    let alpha = p * (n_dim as f64 - 2.0) - n_dim as f64 - 2.0;
    if alpha <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "p = {p} is not above the critical exponent {} (alpha* = {alpha} <= 0)",
            (n_dim as f64 + 2.0) / (n_dim as f64 - 2.0)
        )));
    }
    Ok(alpha)
}

/// Laplace–Beltrami spectrum on the unit sphere `S^{N-1}`:
/// `λ_k = k (k + N - 2)` with the standard multiplicities.
#[derive(Debug, Clone)]
pub struct SphericalSpectrum {
    pub n_dim: u32,
    pub entries: Vec<SphericalMode>,
}

#[derive(Debug, Clone, Copy)]
pub struct SphericalMode {
    pub k: usize,
    pub lambda: f64,
    pub multiplicity: u64,
}

impl SphericalSpectrum {
    pub fn new(n_dim: u32, k_max: usize) -> Self {
        let entries = (0..=k_max)
            .map(|k| SphericalMode {
                k,
                lambda: lambda_k(n_dim, k),
                multiplicity: multiplicity(n_dim, k),
            })
            .collect();
        Self { n_dim, entries }
    }
}

/// `λ_k = k (k + N - 2)`.
pub fn lambda_k(n_dim: u32, k: usize) -> f64 {
    let k = k as f64;
    k * (k + n_dim as f64 - 2.0)
}

/// Dimension of the space of degree-`k` spherical harmonics on `S^{N-1}`.
pub fn multiplicity(n_dim: u32, k: usize) -> u64 {
    let n = n_dim as u64;
    match k {
        0 => 1,
        1 => n,
        _ => {
            let k = k as u64;
            binomial(n + k - 1, k) - binomial(n + k - 3, k - 2)
        }
    }
}

fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc = 1u64;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A radial function sampled on a uniform grid over `[0, 1]` together with
/// its first derivative and the metadata of the problem it solves.
///
/// `dimension` may be fractional (profiles produced by the weight-removing
/// transform live in dimension `N(α)`).
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub dvalues: Vec<f64>,
    /// Dimension `m` of the radial Laplacian the profile solves.
    pub dimension: f64,
    /// Weight exponent of the nonlinearity (`0` for transformed profiles).
    pub weight_alpha: f64,
    pub p: f64,
    pub central_value: f64,
    /// First zero of the underlying unit-central-value shot, when known.
    pub first_zero: Option<f64>,
}

impl RadialProfile {
    /// Build from a callable; `n` nodes on `[0, 1]`.
    pub fn from_fn<F, G>(n: usize, value: F, deriv: G) -> Self
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        let grid = linspace(0.0, 1.0, n);
        let values: Vec<f64> = grid.iter().map(|&r| value(r)).collect();
        let dvalues: Vec<f64> = grid.iter().map(|&r| deriv(r)).collect();
        let central_value = values[0];
        Self {
            grid,
            values,
            dvalues,
            dimension: 0.0,
            weight_alpha: 0.0,
            p: 0.0,
            central_value,
            first_zero: None,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Cubic-Hermite value at `r ∈ [0, 1]`.
    pub fn eval(&self, r: f64) -> f64 {
        hermite_eval(&self.grid, &self.values, &self.dvalues, r)
    }

    /// Cubic-Hermite derivative at `r ∈ [0, 1]`.
    pub fn eval_deriv(&self, r: f64) -> f64 {
        hermite_eval_deriv(&self.grid, &self.values, &self.dvalues, r)
    }

    /// Value at the outer boundary.
    pub fn boundary_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Map a radial profile of the weighted problem in dimension `N` to the
/// unweighted problem in dimension `N(α)`:
/// `ũ(s) = (1 + α/2)^{-2/(p-1)} u(s^{1/(1+α/2)})`.
///
/// Inverse of [`restore_weight`]; identity at `α = 0`.
pub fn remove_weight(profile: &RadialProfile) -> Result<RadialProfile> {
    let alpha = profile.weight_alpha;
    if alpha <= -2.0 {
        return Err(Error::InvalidParams(format!(
            "transform requires alpha > -2, got {alpha}"
        )));
    }
    let kappa = 1.0 + 0.5 * alpha;
    let amp = kappa.powf(-2.0 / (profile.p - 1.0));
    let n = profile.len();
    let grid = linspace(0.0, 1.0, n);
    let mut values = Vec::with_capacity(n);
    let mut dvalues = Vec::with_capacity(n);
    for &s in &grid {
        let r = if s == 0.0 { 0.0 } else { s.powf(1.0 / kappa) };
        values.push(amp * profile.eval(r));
        // dũ/ds = amp u'(r) (1/κ) s^{1/κ - 1}
        let d = if s == 0.0 {
            0.0 // provisional; fixed below from the sampled values
        } else {
            amp * profile.eval_deriv(r) / kappa * s.powf(1.0 / kappa - 1.0)
        };
        dvalues.push(d);
    }
    // the chain rule is indeterminate at s = 0 (the limit depends on the
    // vanishing order of u'); use a one-sided second-order difference
    dvalues[0] = if kappa == 1.0 {
        amp * profile.eval_deriv(0.0)
    } else {
        let h = grid[1];
        (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
    };
    let m = 2.0 * (profile.dimension + alpha) / (2.0 + alpha);
    let central_value = values[0];
    Ok(RadialProfile {
        grid,
        values,
        dvalues,
        dimension: m,
        weight_alpha: 0.0,
        p: profile.p,
        central_value,
        first_zero: profile.first_zero,
    })
}

/// Map a profile of the unweighted problem in dimension `m = N(α)` back to
/// the weighted problem in the integer dimension `N`:
/// `u(r) = (1 + α/2)^{2/(p-1)} ũ(r^{1+α/2})`.
pub fn restore_weight(profile: &RadialProfile, alpha: f64) -> Result<RadialProfile> {
    if alpha <= -2.0 {
        return Err(Error::InvalidParams(format!(
            "transform requires alpha > -2, got {alpha}"
        )));
    }
    let kappa = 1.0 + 0.5 * alpha;
    let amp = kappa.powf(2.0 / (profile.p - 1.0));
    let n = profile.len();
    let grid = linspace(0.0, 1.0, n);
    let mut values = Vec::with_capacity(n);
    let mut dvalues = Vec::with_capacity(n);
    for &r in &grid {
        let s = if r == 0.0 { 0.0 } else { r.powf(kappa) };
        values.push(amp * profile.eval(s));
        // du/dr = amp ũ'(s) κ r^{κ-1}: for κ > 1 the limit at r = 0 is 0
        let d = if r == 0.0 {
            if kappa == 1.0 {
                amp * profile.eval_deriv(0.0)
            } else {
                0.0
            }
        } else {
            amp * profile.eval_deriv(s) * kappa * r.powf(kappa - 1.0)
        };
        dvalues.push(d);
    }
    let n_dim = dim_from_fractional(profile.dimension, alpha);
    let central_value = values[0];
    Ok(RadialProfile {
        grid,
        values,
        dvalues,
        dimension: n_dim,
        weight_alpha: alpha,
        p: profile.p,
        central_value,
        first_zero: profile.first_zero,
    })
}

/// Recover `N` from `m = 2(N + α)/(2 + α)`: `N = (m(2 + α) - 2α)/2`.
/// When called with an integer-dimension profile (the forward direction)
/// this returns the input dimension unchanged for `α = 0`.
fn dim_from_fractional(m: f64, alpha: f64) -> f64 {
    (m * (2.0 + alpha) - 2.0 * alpha) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponent_values() {
        // (N=3, α=1) -> 7
        let p = ProblemParams::new(3, 1.0, 2.0).unwrap();
        assert_eq!(p.critical_exponent(), 7.0);
        // (N=3, α=0) -> 5, the Sobolev exponent
        let p = ProblemParams::new(3, 0.0, 2.0).unwrap();
        assert_eq!(p.critical_exponent(), 5.0);
        // (N=5, α=2) -> 11/3
        let p = ProblemParams::new(5, 2.0, 2.0).unwrap();
        assert!((p.critical_exponent() - 11.0 / 3.0).abs() < 1e-15);
        // N < 3 rejected
        assert!(ProblemParams::new(2, 1.0, 2.0).is_err());
    }

    #[test]
    fn fractional_dimension_values() {
        let p = ProblemParams::new(3, 2.0, 2.0).unwrap();
        assert_eq!(p.fractional_dimension(), 2.5);
        let p = ProblemParams::new(4, 0.0, 2.0).unwrap();
        assert_eq!(p.fractional_dimension(), 4.0);
        let p = ProblemParams::new(3, 1.0, 2.0).unwrap();
        assert!((p.fractional_dimension() - 8.0 / 3.0).abs() < 1e-15);
        // alpha <= -2 rejected at construction
        assert!(ProblemParams::new(3, -2.0, 2.0).is_err());
        assert!(ProblemParams::new(3, -2.5, 2.0).is_err());
    }

    #[test]
    fn kelvin_beta_values() {
        let p = ProblemParams::new(3, 1.0, 6.0).unwrap();
        assert_eq!(p.kelvin_beta(), 0.0);
        let p = ProblemParams::new(3, 0.0, 5.0).unwrap();
        assert_eq!(p.kelvin_beta(), 0.0);
        let p = ProblemParams::new(5, 1.0, 3.0).unwrap();
        assert_eq!(p.kelvin_beta(), 1.0);
    }

    #[test]
    fn alpha_for_fast_decay_values() {
        assert_eq!(alpha_for_fast_decay(3, 6.0).unwrap(), 1.0);
        assert_eq!(alpha_for_fast_decay(4, 4.0).unwrap(), 2.0);
        // boundary p = (N+2)/(N-2) rejected
        assert!(alpha_for_fast_decay(3, 5.0).is_err());
    }

    #[test]
    fn fast_decay_weight_stays_subcritical() {
        // p < p_{α*}(N) must hold for the constructed weight
        for &(n, p) in &[(3u32, 5.5), (3, 6.0), (3, 9.0), (4, 3.5), (5, 2.5), (6, 2.5)] {
            let alpha = alpha_for_fast_decay(n, p).unwrap();
            let params = ProblemParams::new(n, alpha, p).unwrap();
            assert!(
                params.is_subcritical(),
                "(N={n}, p={p}): p_alpha = {}",
                params.critical_exponent()
            );
            assert_eq!(params.kelvin_beta(), 0.0);
        }
    }

    #[test]
    fn exponent_identity_across_parameter_grid() {
        // (N(α)+2)/(N(α)-2) == p_α(N), exact algebraic identity
        for n in 3..=8u32 {
            for i in 1..=40 {
                let alpha = 0.25 * i as f64;
                let params = ProblemParams::new(n, alpha, 2.0).unwrap();
                let m = params.fractional_dimension();
                assert!(m > 2.0 && m < n as f64 + 1e-12);
                if alpha > 0.0 {
                    assert!(m < n as f64);
                }
                let classical = (m + 2.0) / (m - 2.0);
                assert!(
                    (classical - params.critical_exponent()).abs() < 1e-12,
                    "N={n}, alpha={alpha}"
                );
            }
        }
    }

    #[test]
    fn spherical_spectrum_values() {
        let s = SphericalSpectrum::new(3, 6);
        assert_eq!(s.entries[0].lambda, 0.0);
        assert_eq!(s.entries[1].lambda, 2.0);
        assert_eq!(s.entries[2].lambda, 6.0);
        assert_eq!(s.entries[1].multiplicity, 3);
        assert_eq!(s.entries[2].multiplicity, 5);
        // λ_1 = N - 1 and strict growth
        for n in 3..=8u32 {
            let s = SphericalSpectrum::new(n, 10);
            assert_eq!(s.entries[1].lambda, n as f64 - 1.0);
            for w in s.entries.windows(2) {
                assert!(w[1].lambda > w[0].lambda);
            }
        }
        // N = 4 harmonics have multiplicity (k+1)^2
        let s = SphericalSpectrum::new(4, 5);
        for e in &s.entries {
            assert_eq!(e.multiplicity, ((e.k + 1) * (e.k + 1)) as u64);
        }
    }

    #[test]
    fn transforms_are_identity_at_alpha_zero() {
        let mut profile = RadialProfile::from_fn(101, |r| 1.0 - r * r, |r| -2.0 * r);
        profile.dimension = 3.0;
        profile.weight_alpha = 0.0;
        profile.p = 3.0;
        let fwd = remove_weight(&profile).unwrap();
        for i in 0..profile.len() {
            assert!((fwd.values[i] - profile.values[i]).abs() < 1e-14);
            assert!((fwd.dvalues[i] - profile.dvalues[i]).abs() < 1e-14);
        }
        let back = restore_weight(&fwd, 0.0).unwrap();
        for i in 0..profile.len() {
            assert!((back.values[i] - profile.values[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn transforms_map_zero_to_zero() {
        let mut profile = RadialProfile::from_fn(51, |_| 0.0, |_| 0.0);
        profile.dimension = 3.0;
        profile.weight_alpha = 2.0;
        profile.p = 3.0;
        let fwd = remove_weight(&profile).unwrap();
        assert!(fwd.values.iter().all(|&v| v == 0.0));
        let back = restore_weight(&fwd, 2.0).unwrap();
        assert!(back.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn round_trip_on_shooting_solution() {
        // the transform pair must be mutually inverse on an actual
        // solution profile of (N=3, α=2, p=2)
        let params = ProblemParams::new(3, 2.0, 2.0).unwrap();
        let vp = crate::radial_shoot::solve_henon_radial(&params, 1e-11).unwrap();
        let fwd = remove_weight(&vp).unwrap();
        let back = restore_weight(&fwd, 2.0).unwrap();
        let mut worst = 0.0f64;
        for i in 0..vp.len() {
            worst = worst.max((back.values[i] - vp.values[i]).abs());
        }
        assert!(worst <= 1e-8, "round trip error {worst}");
    }

    #[test]
    fn round_trip_on_smooth_profile() {
        // smooth profile playing the role of a solution in (N=3, α=2)
        let mut profile = RadialProfile::from_fn(
            2001,
            |r| (1.0 - r * r) * (1.0 + 0.3 * r * r * r * r),
            |r| -2.0 * r * (1.0 + 0.3 * r.powi(4)) + (1.0 - r * r) * 1.2 * r.powi(3),
        );
        profile.dimension = 3.0;
        profile.weight_alpha = 2.0;
        profile.p = 2.0;
        let fwd = remove_weight(&profile).unwrap();
        assert!((fwd.dimension - 2.5).abs() < 1e-14);
        let back = restore_weight(&fwd, 2.0).unwrap();
        assert!((back.dimension - 3.0).abs() < 1e-14);
        let mut worst = 0.0f64;
        for i in 0..profile.len() {
            worst = worst.max((back.values[i] - profile.values[i]).abs());
        }
        assert!(worst < 1e-8, "round trip error {worst}");
    }
}
