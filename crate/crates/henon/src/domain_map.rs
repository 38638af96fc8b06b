//! Perturbations of the unit ball `Ω_t = {x + tψ(x) : x ∈ B}` and the
//! coefficient data of the transplanted operator.
//!
//! With `y = x + tψ(x)` and the inverse map `x = y + tψ̃(y)`, a function
//! `u(y) = v(x)` satisfies `Δ_y u = Δ_x v + L_t(v)` where
//!
//! ```text
//! L_t(v) = 2t Σ_{i,k} v_{x_i x_k} ∂_{y_i}ψ̃_k
//!        +  t Σ_{i,k} v_{x_k}     ∂_{y_i y_i}ψ̃_k
//!        + t² Σ_{i,j,k} v_{x_j x_k} ∂_{y_i}ψ̃_j ∂_{y_i}ψ̃_k .
//! ```
//!
//! [`invert_map`] computes `ψ̃` and its first derivatives from the exact
//! Jacobian identity `Dψ̃(y) = -Dψ(x)(I + tDψ(x))^{-1}`, and the pure
//! second derivatives by centered differencing of the first.

use crate::{Error, Result};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Supported perturbation fields `ψ` on the closed unit ball.
#[derive(Debug, Clone, PartialEq)]
pub enum MapFamily {
    /// `ψ(x) = x`: `Ω_t` is the ball of radius `1 + t`.
    Dilation,
    /// `ψ(x) = e`, a constant direction: `Ω_t` is the shifted ball.
    Translation { direction: Vec3 },
    /// Axisymmetric boundary bump `ψ(x) = η(|x|) g(cos θ) x/|x|` with
    /// `η(r) = r²(3 - 2r)` and `g(μ) = Σ_j c_j μ^j`, degree ≤ 4.
    Bump { coeffs: [f64; 5] },
}

/// A perturbation family together with its scale `t ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMapSpec {
    pub family: MapFamily,
    pub t: f64,
}

impl DomainMapSpec {
    pub fn new(family: MapFamily, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParams(format!(
                "perturbation scale t = {t} must be a finite nonnegative number"
            )));
        }
        let spec = Self { family, t };
        let lip = spec.lipschitz_estimate();
        if t * lip >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "t * Lip(psi) = {:.3} >= 1: the map x + t psi(x) need not be invertible",
                t * lip
            )));
        }
        Ok(spec)
    }

    /// `ψ(x)`.
    pub fn psi(&self, x: Vec3) -> Vec3 {
        match &self.family {
            MapFamily::Dilation => x,
            MapFamily::Translation { direction } => *direction,
            MapFamily::Bump { coeffs } => {
                let r = norm(x);
                if r == 0.0 {
                    return [0.0; 3];
                }
                let eta = r * r * (3.0 - 2.0 * r);
                let mu = x[2] / r;
                let g = poly(coeffs, mu);
                let s = eta * g / r;
                [s * x[0], s * x[1], s * x[2]]
            }
        }
    }

    /// Jacobian `(Dψ)_{ij} = ∂ψ_i/∂x_j`, analytic per family.
    pub fn dpsi(&self, x: Vec3) -> Mat3 {
        match &self.family {
            MapFamily::Dilation => identity(),
            MapFamily::Translation { .. } => [[0.0; 3]; 3],
            MapFamily::Bump { coeffs } => {
                let r = norm(x);
                if r == 0.0 {
                    return [[0.0; 3]; 3];
                }
                let unit = [x[0] / r, x[1] / r, x[2] / r];
                let eta = r * r * (3.0 - 2.0 * r);
                let deta = 6.0 * r - 6.0 * r * r;
                let mu = x[2] / r;
                let g = poly(coeffs, mu);
                let dg = dpoly(coeffs, mu);
                // ∂μ/∂x_j = δ_{3j}/r - μ u_j / r
                let dmu = [
                    -mu * unit[0] / r,
                    -mu * unit[1] / r,
                    (1.0 - mu * unit[2]) / r,
                ];
                let mut out = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        let mut d = 0.0;
                        // ψ_i = η(r) g(μ) u_i with u = x/r
                        d += deta * unit[j] * g * unit[i];
                        d += eta * dg * dmu[j] * unit[i];
                        d += eta * g * ((delta(i, j) - unit[i] * unit[j]) / r);
                        out[i][j] = d;
                    }
                }
                out
            }
        }
    }

    /// `max ‖Dψ‖_F` over a deterministic sample grid of the closed ball
    /// (Frobenius bounds the operator norm from above).
    pub fn lipschitz_estimate(&self) -> f64 {
        match &self.family {
            MapFamily::Dilation => 1.0,
            MapFamily::Translation { .. } => 0.0,
            MapFamily::Bump { .. } => {
                let mut worst = 0.0f64;
                for ir in 1..=20 {
                    let r = ir as f64 / 20.0;
                    for it in 0..=24 {
                        let theta = std::f64::consts::PI * it as f64 / 24.0;
                        let x = [r * theta.sin(), 0.0, r * theta.cos()];
                        let d = self.dpsi(x);
                        let mut f2 = 0.0;
                        for row in &d {
                            for v in row {
                                f2 += v * v;
                            }
                        }
                        worst = worst.max(f2.sqrt());
                    }
                }
                worst
            }
        }
    }

    /// `max |ψ|` over a deterministic sample grid of the closed ball.
    pub fn psi_sup_estimate(&self) -> f64 {
        match &self.family {
            MapFamily::Dilation => 1.0,
            MapFamily::Translation { direction } => norm(*direction),
            MapFamily::Bump { coeffs } => {
                // sup η = η(1) = 1; scan g over the polar cosine
                let mut worst = 0.0f64;
                for j in 0..=64 {
                    let mu = -1.0 + 2.0 * j as f64 / 64.0;
                    worst = worst.max(poly(coeffs, mu).abs());
                }
                worst
            }
        }
    }

    /// Forward image `y = x + tψ(x)`.
    pub fn forward(&self, x: Vec3) -> Vec3 {
        let p = self.psi(x);
        [
            x[0] + self.t * p[0],
            x[1] + self.t * p[1],
            x[2] + self.t * p[2],
        ]
    }

    /// Solve `x = y - tψ(x)` by fixed-point iteration (contractive for
    /// `t·Lip(ψ) < 1`).
    pub fn invert_point(&self, y: Vec3) -> Result<Vec3> {
        if self.t == 0.0 {
            return Ok(y);
        }
        let mut x = y;
        let mut last_step = f64::INFINITY;
        let mut growth = 0usize;
        for _ in 0..500 {
            let p = self.psi(x);
            let x_new = [
                y[0] - self.t * p[0],
                y[1] - self.t * p[1],
                y[2] - self.t * p[2],
            ];
            let step = dist(x_new, x);
            x = x_new;
            if step <= 1e-13 {
                return Ok(x);
            }
            if step > last_step {
                growth += 1;
                if growth >= 5 {
                    return Err(Error::MapInversion(
                        "perturbation too large: fixed-point iteration diverges".into(),
                    ));
                }
            } else {
                growth = 0;
            }
            last_step = step;
        }
        Err(Error::MapInversion(format!(
            "fixed-point iteration stalled at step size {last_step:.3e}"
        )))
    }

    /// `ψ̃(y) = (x - y)/t` for `t > 0`, continuous limit `-ψ(y)` at `t = 0`.
    pub fn psi_tilde(&self, y: Vec3) -> Result<Vec3> {
        if self.t == 0.0 {
            let p = self.psi(y);
            return Ok([-p[0], -p[1], -p[2]]);
        }
        let x = self.invert_point(y)?;
        Ok([
            (x[0] - y[0]) / self.t,
            (x[1] - y[1]) / self.t,
            (x[2] - y[2]) / self.t,
        ])
    }

    /// `Dψ̃(y) = -Dψ(x) (I + t Dψ(x))^{-1}` at `x = x(y)`.
    pub fn dpsi_tilde(&self, y: Vec3) -> Result<Mat3> {
        let x = self.invert_point(y)?;
        let dp = self.dpsi(x);
        let mut m = identity();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += self.t * dp[i][j];
            }
        }
        let inv = invert3(&m).ok_or_else(|| {
            Error::MapInversion("I + t Dpsi is singular at an evaluation point".into())
        })?;
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for l in 0..3 {
                    acc += dp[i][l] * inv[l][j];
                }
                out[i][j] = -acc;
            }
        }
        Ok(out)
    }
}

/// Inverse-map data evaluated at the images of a collocation grid.
#[derive(Debug, Clone)]
pub struct InverseMapField {
    /// Collocation points `x` in the closed unit ball.
    pub points_x: Vec<Vec3>,
    /// Their images `y = x + tψ(x)`.
    pub points_y: Vec<Vec3>,
    /// `ψ̃(y)`.
    pub psi_tilde: Vec<Vec3>,
    /// `(Dψ̃)_{kj} = ∂ψ̃_k/∂y_j`.
    pub dpsi_tilde: Vec<Mat3>,
    /// Pure second derivatives `d2[k][i] = ∂²ψ̃_k/∂y_i²`.
    pub d2psi_tilde: Vec<Mat3>,
    pub t: f64,
    /// Largest round-trip error `|invert(forward(x)) - x|` over the grid.
    pub round_trip_error: f64,
}

/// Differencing step for the pure second derivatives of `ψ̃`.
const D2_STEP: f64 = 1e-5;

/// Invert the map at the images of the given collocation points and
/// assemble first and second derivative data.
pub fn invert_map(spec: &DomainMapSpec, points: &[Vec3]) -> Result<InverseMapField> {
    let mut field = InverseMapField {
        points_x: points.to_vec(),
        points_y: Vec::with_capacity(points.len()),
        psi_tilde: Vec::with_capacity(points.len()),
        dpsi_tilde: Vec::with_capacity(points.len()),
        d2psi_tilde: Vec::with_capacity(points.len()),
        t: spec.t,
        round_trip_error: 0.0,
    };
    for &x in points {
        let y = spec.forward(x);
        let x_back = spec.invert_point(y)?;
        field.round_trip_error = field.round_trip_error.max(dist(x_back, x));
        field.points_y.push(y);
        field.psi_tilde.push(spec.psi_tilde(y)?);
        field.dpsi_tilde.push(spec.dpsi_tilde(y)?);

        let mut d2 = [[0.0; 3]; 3];
        let h = D2_STEP;
        for i in 0..3 {
            let mut yp = y;
            yp[i] += h;
            let mut ym = y;
            ym[i] -= h;
            let dp = spec.dpsi_tilde(yp)?;
            let dm = spec.dpsi_tilde(ym)?;
            for k in 0..3 {
                // ∂/∂y_i of ∂ψ̃_k/∂y_i
                d2[k][i] = (dp[k][i] - dm[k][i]) / (2.0 * h);
            }
        }
        field.d2psi_tilde.push(d2);
    }
    Ok(field)
}

/// Evaluate `L_t(v)` pointwise from gradient and Hessian data of `v` at
/// the collocation points. The three sums are formed exactly as written;
/// every term carries a factor of `t`, so `L_0 ≡ 0`.
pub fn assemble_lt(field: &InverseMapField, grad: &[Vec3], hess: &[Mat3]) -> Result<Vec<f64>> {
    let n = field.points_x.len();
    if grad.len() != n || hess.len() != n {
        return Err(Error::InvalidParams(
            "assemble_lt: derivative data does not match the grid".into(),
        ));
    }
    let t = field.t;
    let mut out = Vec::with_capacity(n);
    for idx in 0..n {
        let dpt = &field.dpsi_tilde[idx];
        let d2 = &field.d2psi_tilde[idx];
        let h = &hess[idx];
        let g = &grad[idx];
        let mut term1 = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                term1 += h[i][k] * dpt[k][i];
            }
        }
        let mut term2 = 0.0;
        for k in 0..3 {
            let mut lap = 0.0;
            for i in 0..3 {
                lap += d2[k][i];
            }
            term2 += g[k] * lap;
        }
        let mut term3 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    term3 += h[j][k] * dpt[j][i] * dpt[k][i];
                }
            }
        }
        out.push(2.0 * t * term1 + t * term2 + t * t * term3);
    }
    Ok(out)
}

fn poly(c: &[f64; 5], mu: f64) -> f64 {
    c[0] + mu * (c[1] + mu * (c[2] + mu * (c[3] + mu * c[4])))
}

fn dpoly(c: &[f64; 5], mu: f64) -> f64 {
    c[1] + mu * (2.0 * c[2] + mu * (3.0 * c[3] + mu * 4.0 * c[4]))
}

fn norm(x: Vec3) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn dist(a: Vec3, b: Vec3) -> f64 {
    norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn invert3(m: &Mat3) -> Option<Mat3> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut out = [[0.0; 3]; 3];
    out[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
    out[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
    out[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
    out[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
    out[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
    out[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
    out[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
    out[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
    out[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_points() -> Vec<Vec3> {
        let mut pts = Vec::new();
        for ir in 1..=5 {
            let r = ir as f64 / 5.5;
            for it in 0..6 {
                let theta = std::f64::consts::PI * (it as f64 + 0.5) / 6.0;
                pts.push([r * theta.sin(), 0.0, r * theta.cos()]);
            }
        }
        pts
    }

    #[test]
    fn dilation_has_closed_form_inverse() {
        // y = (1+t)x  =>  psi_tilde(y) = -y/(1+t)
        let spec = DomainMapSpec::new(MapFamily::Dilation, 0.01).unwrap();
        for &y in &sample_points() {
            let pt = spec.psi_tilde(y).unwrap();
            for i in 0..3 {
                assert!((pt[i] + y[i] / 1.01).abs() < 1e-12);
            }
            let dpt = spec.dpsi_tilde(y).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { -1.0 / 1.01 } else { 0.0 };
                    assert!((dpt[i][j] - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn translation_inverse_is_exact_shift() {
        let e = [0.0, 0.0, 1.0];
        let spec = DomainMapSpec::new(MapFamily::Translation { direction: e }, 0.05).unwrap();
        let field = invert_map(&spec, &sample_points()).unwrap();
        for (pt, d) in field.psi_tilde.iter().zip(&field.dpsi_tilde) {
            assert!((pt[2] + 1.0).abs() < 1e-12 && pt[0].abs() < 1e-12);
            for row in d {
                for v in row {
                    assert!(v.abs() < 1e-12);
                }
            }
        }
        assert!(field.round_trip_error < 1e-14);
    }

    #[test]
    fn t_zero_gives_continuous_limit() {
        let spec = DomainMapSpec::new(
            MapFamily::Bump {
                coeffs: [0.5, 0.0, 1.0, 0.0, 0.0],
            },
            0.0,
        )
        .unwrap();
        for &y in &sample_points() {
            let pt = spec.psi_tilde(y).unwrap();
            let p = spec.psi(y);
            for i in 0..3 {
                assert!((pt[i] + p[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bump_jacobian_matches_finite_differences() {
        let spec = DomainMapSpec::new(
            MapFamily::Bump {
                coeffs: [0.3, 0.2, 0.7, 0.1, 0.05],
            },
            0.0,
        )
        .unwrap();
        let h = 1e-6;
        for &x in &sample_points() {
            let d = spec.dpsi(x);
            for j in 0..3 {
                let mut xp = x;
                xp[j] += h;
                let mut xm = x;
                xm[j] -= h;
                let pp = spec.psi(xp);
                let pm = spec.psi(xm);
                for i in 0..3 {
                    let fd = (pp[i] - pm[i]) / (2.0 * h);
                    assert!(
                        (d[i][j] - fd).abs() < 1e-8,
                        "entry ({i},{j}) at {x:?}: {} vs {fd}",
                        d[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn bump_round_trip_and_jacobian_identity() {
        let spec = DomainMapSpec::new(
            MapFamily::Bump {
                coeffs: [0.4, 0.0, 0.8, 0.0, 0.2],
            },
            0.01,
        )
        .unwrap();
        let pts = sample_points();
        let field = invert_map(&spec, &pts).unwrap();
        assert!(field.round_trip_error <= 1e-10, "{}", field.round_trip_error);
        // Jacobian of psi_tilde vs finite differences of psi_tilde itself
        let h = 1e-6;
        for &y in &field.points_y {
            let d = spec.dpsi_tilde(y).unwrap();
            for j in 0..3 {
                let mut yp = y;
                yp[j] += h;
                let mut ym = y;
                ym[j] -= h;
                let pp = spec.psi_tilde(yp).unwrap();
                let pm = spec.psi_tilde(ym).unwrap();
                for i in 0..3 {
                    let fd = (pp[i] - pm[i]) / (2.0 * h);
                    assert!(
                        (d[i][j] - fd).abs() < 1e-6,
                        "entry ({i},{j}): {} vs {fd}",
                        d[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn lt_vanishes_at_t_zero_and_for_constants() {
        let spec = DomainMapSpec::new(MapFamily::Dilation, 0.0).unwrap();
        let pts = sample_points();
        let field = invert_map(&spec, &pts).unwrap();
        let grad = vec![[1.0, 2.0, 3.0]; pts.len()];
        let hess = vec![[[1.0, 0.1, 0.0], [0.1, 2.0, 0.0], [0.0, 0.0, 0.5]]; pts.len()];
        for v in assemble_lt(&field, &grad, &hess).unwrap() {
            assert_eq!(v, 0.0);
        }
        // constant v: all derivative data zero => L_t = 0 for any t
        let spec = DomainMapSpec::new(MapFamily::Dilation, 0.01).unwrap();
        let field = invert_map(&spec, &pts).unwrap();
        let zeros3 = vec![[0.0; 3]; pts.len()];
        let zeros33 = vec![[[0.0; 3]; 3]; pts.len()];
        for v in assemble_lt(&field, &zeros3, &zeros33).unwrap() {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn lt_matches_symbolic_value_for_dilation_quadratic() {
        // v = 1 - |x|²: hess = -2I, grad = -2x;
        // Dψ̃ = -I/(1+t), Δψ̃ = 0:
        // L_t = 2t(-2)(-3/(1+t)) + t²·(-2)·3/(1+t)² = 12t/(1+t) - 6t²/(1+t)²
        let t = 0.01;
        let spec = DomainMapSpec::new(MapFamily::Dilation, t).unwrap();
        let pts = sample_points();
        let field = invert_map(&spec, &pts).unwrap();
        let grad: Vec<Vec3> = pts.iter().map(|x| [-2.0 * x[0], -2.0 * x[1], -2.0 * x[2]]).collect();
        let hess = vec![[[-2.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, -2.0]]; pts.len()];
        let expect = 12.0 * t / (1.0 + t) - 6.0 * t * t / ((1.0 + t) * (1.0 + t));
        for v in assemble_lt(&field, &grad, &hess).unwrap() {
            assert!((v - expect).abs() < 1e-10, "{v} vs {expect}");
        }
    }

    #[test]
    fn transplanted_laplacian_identity() {
        // -Δ_y u(y) with u(y) = v(x(y)) equals -Δ_x v - L_t(v):
        // check by finite differences of u at mapped points.
        let t = 0.01;
        let spec = DomainMapSpec::new(
            MapFamily::Bump {
                coeffs: [0.5, 0.0, 0.6, 0.0, 0.0],
            },
            t,
        )
        .unwrap();
        let v = |x: Vec3| (1.0 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]) * (1.0 + 0.5 * x[2]);
        let grad_v = |x: Vec3| -> Vec3 {
            let b = 1.0 + 0.5 * x[2];
            let q = 1.0 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2];
            [
                -2.0 * x[0] * b,
                -2.0 * x[1] * b,
                -2.0 * x[2] * b + 0.5 * q,
            ]
        };
        let hess_v = |x: Vec3| -> Mat3 {
            let b = 1.0 + 0.5 * x[2];
            [
                [-2.0 * b, 0.0, -x[0]],
                [0.0, -2.0 * b, -x[1]],
                [-x[0], -x[1], -2.0 * b - 2.0 * x[2]],
            ]
        };
        let lap_v = |x: Vec3| {
            let h = hess_v(x);
            h[0][0] + h[1][1] + h[2][2]
        };
        let pts: Vec<Vec3> = sample_points().into_iter().filter(|x| norm(*x) < 0.8).collect();
        let field = invert_map(&spec, &pts).unwrap();
        let grads: Vec<Vec3> = pts.iter().map(|&x| grad_v(x)).collect();
        let hesses: Vec<Mat3> = pts.iter().map(|&x| hess_v(x)).collect();
        let lt = assemble_lt(&field, &grads, &hesses).unwrap();
        let h = 1e-4;
        for (idx, &x) in pts.iter().enumerate() {
            let y = field.points_y[idx];
            let u = |yy: Vec3| -> f64 { v(spec.invert_point(yy).unwrap()) };
            let mut lap_u = 0.0;
            let u0 = u(y);
            for i in 0..3 {
                let mut yp = y;
                yp[i] += h;
                let mut ym = y;
                ym[i] -= h;
                lap_u += (u(yp) - 2.0 * u0 + u(ym)) / (h * h);
            }
            let rhs = lap_v(x) + lt[idx];
            // O(h²) differencing + O(t·h)-level inversion noise
            assert!(
                (lap_u - rhs).abs() < 5e-4,
                "point {x:?}: {lap_u} vs {rhs}"
            );
        }
    }

    #[test]
    fn excessive_t_is_rejected() {
        assert!(DomainMapSpec::new(MapFamily::Dilation, 1.0).is_err());
        let big_bump = MapFamily::Bump {
            coeffs: [5.0, 0.0, 0.0, 0.0, 0.0],
        };
        assert!(DomainMapSpec::new(big_bump, 0.2).is_err());
    }
}
