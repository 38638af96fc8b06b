//! Uniform-grid helpers: cubic Hermite interpolation of sampled functions
//! with derivative data, and high-order finite-difference stencils used by
//! the plug-in residual checks.

/// `n` equally spaced nodes covering `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + i as f64 * h).collect()
}

/// Cubic Hermite interpolation on a uniform grid from values and first
/// derivatives. Exact for cubics; error `O(h^4 |f''''|)` otherwise.
///
/// `x` outside the grid is clamped to the end intervals.
pub fn hermite_eval(grid: &[f64], values: &[f64], dvalues: &[f64], x: f64) -> f64 {
    let (i, s, h) = locate(grid, x);
    let (h00, h10, h01, h11) = hermite_basis(s);
    h00 * values[i] + h10 * h * dvalues[i] + h01 * values[i + 1] + h11 * h * dvalues[i + 1]
}

/// Derivative of the cubic Hermite interpolant.
pub fn hermite_eval_deriv(grid: &[f64], values: &[f64], dvalues: &[f64], x: f64) -> f64 {
    let (i, s, h) = locate(grid, x);
    // d/ds of the basis polynomials, divided by h
    let d00 = 6.0 * s * s - 6.0 * s;
    let d10 = 3.0 * s * s - 4.0 * s + 1.0;
    let d01 = -6.0 * s * s + 6.0 * s;
    let d11 = 3.0 * s * s - 2.0 * s;
    (d00 * values[i] + d01 * values[i + 1]) / h + d10 * dvalues[i] + d11 * dvalues[i + 1]
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

fn locate(grid: &[f64], x: f64) -> (usize, f64, f64) {
    let n = grid.len();
    debug_assert!(n >= 2);
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let raw = ((x - grid[0]) / h).floor();
    let i = (raw.max(0.0) as usize).min(n - 2);
    let s = (x - grid[i]) / h;
    (i, s, h)
}

/// Cubic (4-point) Lagrange interpolation on a uniform grid, values only.
pub fn lagrange4(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    debug_assert!(n >= 4);
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let raw = ((x - grid[0]) / h).floor() as isize;
    // center the 4-point stencil around the containing interval
    let i0 = raw.clamp(1, n as isize - 3) as usize - 1;
    let mut acc = 0.0;
    for a in 0..4 {
        let mut basis = 1.0;
        for b in 0..4 {
            if a != b {
                basis *= (x - grid[i0 + b]) / (grid[i0 + a] - grid[i0 + b]);
            }
        }
        acc += basis * values[i0 + a];
    }
    acc
}

/// First derivative on a uniform grid by 4th-order central differences.
/// Near the ends one-sided 4th-order stencils are used.
pub fn deriv1_o4(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5);
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = if i >= 2 && i + 2 < n {
            (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * h)
        } else if i < 2 {
            (-25.0 * values[i] + 48.0 * values[i + 1] - 36.0 * values[i + 2]
                + 16.0 * values[i + 3]
                - 3.0 * values[i + 4])
                / (12.0 * h)
        } else {
            (25.0 * values[i] - 48.0 * values[i - 1] + 36.0 * values[i - 2]
                - 16.0 * values[i - 3]
                + 3.0 * values[i - 4])
                / (12.0 * h)
        };
    }
    out
}

/// Second derivative on a uniform grid by 4th-order central differences
/// (one-sided near the ends).
pub fn deriv2_o4(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 6);
    let h2 = h * h;
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = if i >= 2 && i + 2 < n {
            (-values[i - 2] + 16.0 * values[i - 1] - 30.0 * values[i] + 16.0 * values[i + 1]
                - values[i + 2])
                / (12.0 * h2)
        } else if i < 2 {
            (45.0 * values[i] - 154.0 * values[i + 1] + 214.0 * values[i + 2]
                - 156.0 * values[i + 3]
                + 61.0 * values[i + 4]
                - 10.0 * values[i + 5])
                / (12.0 * h2)
        } else {
            (45.0 * values[i] - 154.0 * values[i - 1] + 214.0 * values[i - 2]
                - 156.0 * values[i - 3]
                + 61.0 * values[i - 4]
                - 10.0 * values[i - 5])
                / (12.0 * h2)
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubics_exactly() {
        let grid = linspace(0.0, 2.0, 21);
        let f = |x: f64| 1.5 * x * x * x - 2.0 * x * x + 0.5 * x - 3.0;
        let df = |x: f64| 4.5 * x * x - 4.0 * x + 0.5;
        let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let dvalues: Vec<f64> = grid.iter().map(|&x| df(x)).collect();
        for k in 0..200 {
            let x = 2.0 * k as f64 / 199.0;
            assert!((hermite_eval(&grid, &values, &dvalues, x) - f(x)).abs() < 1e-13);
            assert!((hermite_eval_deriv(&grid, &values, &dvalues, x) - df(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_error_scales_as_h4() {
        let f = |x: f64| (3.0 * x).sin();
        let df = |x: f64| 3.0 * (3.0 * x).cos();
        let mut errs = Vec::new();
        for &n in &[11usize, 21, 41] {
            let grid = linspace(0.0, 1.0, n);
            let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
            let dvalues: Vec<f64> = grid.iter().map(|&x| df(x)).collect();
            let mut worst: f64 = 0.0;
            for k in 0..500 {
                let x = k as f64 / 499.0;
                worst = worst.max((hermite_eval(&grid, &values, &dvalues, x) - f(x)).abs());
            }
            errs.push(worst);
        }
        // halving h should shrink the error by ~16
        assert!(errs[0] / errs[1] > 10.0);
        assert!(errs[1] / errs[2] > 10.0);
    }

    #[test]
    fn fd_stencils_are_fourth_order() {
        let f = |x: f64| (2.0 * x).sin() + x * x;
        let d1 = |x: f64| 2.0 * (2.0 * x).cos() + 2.0 * x;
        let d2 = |x: f64| -4.0 * (2.0 * x).sin() + 2.0;
        for &n in &[101usize, 201] {
            let grid = linspace(0.0, 1.0, n);
            let h = grid[1] - grid[0];
            let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
            let g1 = deriv1_o4(&values, h);
            let g2 = deriv2_o4(&values, h);
            let tol1 = 30.0 * h.powi(4);
            let tol2 = 300.0 * h.powi(4);
            for i in 0..n {
                assert!((g1[i] - d1(grid[i])).abs() < tol1, "d1 at {}", grid[i]);
                assert!((g2[i] - d2(grid[i])).abs() < tol2, "d2 at {}", grid[i]);
            }
        }
    }
}
