//! Symmetric tridiagonal eigensolver (Sturm-count bisection plus inverse
//! iteration) and a partially pivoted tridiagonal LU solver.
//!
//! No external linear-algebra dependency: the matrices here are banded,
//! deterministic `O(n)` kernels are all that is needed.

use crate::{Error, Result};

/// Number of eigenvalues of the symmetric tridiagonal matrix
/// `(diag, off)` strictly below `lambda`, by the LDLT Sturm sequence.
pub fn sturm_count(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    debug_assert_eq!(off.len(), n - 1);
    let guard = 1e-300;
    let mut count = 0usize;
    let mut q = diag[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let q_safe = if q.abs() < guard {
            if q >= 0.0 {
                guard
            } else {
                -guard
            }
        } else {
            q
        };
        q = (diag[i] - lambda) - off[i - 1] * off[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (`k = 0` is the smallest) by bisection
/// on the Sturm count inside the Gershgorin bounds, refined to relative
/// machine-level width, then polished by inverse iteration with Rayleigh
/// quotient.
pub fn tridiag_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> Result<f64> {
    let n = diag.len();
    if k >= n {
        return Err(Error::Eigensolve(format!(
            "eigenvalue index {k} out of range for size {n}"
        )));
    }
    let (mut lo, mut hi) = gershgorin(diag, off);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }
    let approx = 0.5 * (lo + hi);
    // polish: inverse iteration + Rayleigh quotient
    match inverse_iteration(diag, off, approx) {
        Ok((value, _)) if value.is_finite() && value >= lo - (hi - lo) && value <= hi + (hi - lo) => {
            Ok(value)
        }
        _ => Ok(approx),
    }
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    let pad = 1e-10 * (hi - lo).abs().max(1.0);
    (lo - pad, hi + pad)
}

/// Inverse iteration for the eigenpair nearest `shift`; returns the
/// Rayleigh-quotient eigenvalue and the normalized eigenvector.
pub fn inverse_iteration(diag: &[f64], off: &[f64], shift: f64) -> Result<(f64, Vec<f64>)> {
    let n = diag.len();
    let shifted: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let lu = TridiagLu::factor(&shifted, off, off)?;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut value = shift;
    for _ in 0..4 {
        let mut w = lu.solve(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Eigensolve("inverse iteration broke down".into()));
        }
        for x in &mut w {
            *x /= norm;
        }
        // Rayleigh quotient of the original matrix
        let mut num = 0.0;
        for i in 0..n {
            let mut av = diag[i] * w[i];
            if i > 0 {
                av += off[i - 1] * w[i - 1];
            }
            if i + 1 < n {
                av += off[i] * w[i + 1];
            }
            num += w[i] * av;
        }
        value = num;
        v = w;
    }
    Ok((value, v))
}

/// LU factorization of a (generally nonsymmetric) tridiagonal matrix with
/// partial pivoting. Fill-in adds one extra superdiagonal.
pub struct TridiagLu {
    n: usize,
    low: Vec<f64>,    // multipliers
    diag: Vec<f64>,   // U main diagonal
    up1: Vec<f64>,    // U first superdiagonal
    up2: Vec<f64>,    // U second superdiagonal (pivoting fill)
    swapped: Vec<bool>,
}

impl TridiagLu {
    /// Factor the matrix with diagonal `d`, subdiagonal `dl`, superdiagonal
    /// `du` (lengths `n`, `n-1`, `n-1`).
    pub fn factor(d: &[f64], dl: &[f64], du: &[f64]) -> Result<Self> {
        let n = d.len();
        assert!(n >= 1);
        assert_eq!(dl.len(), n.saturating_sub(1));
        assert_eq!(du.len(), n.saturating_sub(1));
        let mut diag = d.to_vec();
        let mut up1 = vec![0.0; n];
        let mut up2 = vec![0.0; n];
        let mut low = vec![0.0; n];
        let mut swapped = vec![false; n];
        up1[..n - 1].copy_from_slice(du);
        for i in 0..n - 1 {
            let sub = dl[i];
            if diag[i].abs() >= sub.abs() {
                if diag[i] == 0.0 {
                    return Err(Error::Eigensolve("singular tridiagonal matrix".into()));
                }
                let m = sub / diag[i];
                low[i] = m;
                diag[i + 1] -= m * up1[i];
                up1[i + 1] -= m * up2[i];
            } else {
                // swap rows i and i+1; the old row i+1 entry at column i+2
                // becomes fill in up2[i]
                swapped[i] = true;
                let m = diag[i] / sub;
                low[i] = m;
                let old_diag_next = diag[i + 1];
                let old_up1 = up1[i];
                let old_up2 = up2[i];
                diag[i] = sub;
                up1[i] = old_diag_next;
                up2[i] = if i + 2 < n { du[i + 1] } else { 0.0 };
                diag[i + 1] = old_up1 - m * up1[i];
                up1[i + 1] = old_up2 - m * up2[i];
            }
        }
        if diag[n - 1] == 0.0 {
            return Err(Error::Eigensolve("singular tridiagonal matrix".into()));
        }
        Ok(Self {
            n,
            low,
            diag,
            up1,
            up2,
            swapped,
        })
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.low[i] * x[i];
        }
        x[n - 1] /= self.diag[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - self.up1[n - 2] * x[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.up1[i] * x[i + 1] - self.up2[i] * x[i + 2]) / self.diag[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dirichlet Laplacian -u'' on n interior nodes of [0,1]:
    /// eigenvalues (2 - 2cos(k pi h)) / h^2.
    fn laplacian(n: usize) -> (Vec<f64>, Vec<f64>, f64) {
        let h = 1.0 / (n as f64 + 1.0);
        (vec![2.0 / (h * h); n], vec![-1.0 / (h * h); n - 1], h)
    }

    #[test]
    fn sturm_bisection_finds_laplacian_spectrum() {
        let (d, e, h) = laplacian(200);
        for k in 0..5 {
            let exact = (2.0 - 2.0 * ((k as f64 + 1.0) * std::f64::consts::PI * h).cos()) / (h * h);
            let got = tridiag_eigenvalue(&d, &e, k).unwrap();
            assert!(
                (got - exact).abs() < 1e-8 * exact.abs(),
                "k={k}: got {got}, exact {exact}"
            );
        }
    }

    #[test]
    fn sturm_count_is_monotone_and_consistent() {
        let (d, e, h) = laplacian(50);
        let lam3 = (2.0 - 2.0 * (3.0 * std::f64::consts::PI * h).cos()) / (h * h);
        assert_eq!(sturm_count(&d, &e, lam3 + 1.0), 3);
        assert_eq!(sturm_count(&d, &e, 0.0), 0);
        assert_eq!(sturm_count(&d, &e, 1e12), 50);
    }

    #[test]
    fn pivoted_lu_solves_indefinite_tridiagonal() {
        // shifted Laplacian: indefinite, still solvable
        let n = 120;
        let (mut d, e, _) = laplacian(n);
        let shift = tridiag_eigenvalue(&d, &e, 2).unwrap() + 1.0;
        for v in &mut d {
            *v -= shift;
        }
        let lu = TridiagLu::factor(&d, &e, &e).unwrap();
        // manufactured solution
        let x_true: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.1).sin()).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = d[i] * x_true[i];
            if i > 0 {
                b[i] += e[i - 1] * x_true[i - 1];
            }
            if i + 1 < n {
                b[i] += e[i] * x_true[i + 1];
            }
        }
        let x = lu.solve(&b);
        let err: f64 = x
            .iter()
            .zip(&x_true)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "err = {err}");
    }

    #[test]
    fn inverse_iteration_polishes_eigenpair() {
        let (d, e, h) = laplacian(150);
        let exact = (2.0 - 2.0 * (std::f64::consts::PI * h).cos()) / (h * h);
        let (val, vec) = inverse_iteration(&d, &e, exact * (1.0 + 1e-6)).unwrap();
        assert!((val - exact).abs() < 1e-9 * exact);
        // eigenvector should look like sin(pi x)
        let mid = vec[75] / (std::f64::consts::PI * h * 76.0).sin();
        for (i, v) in vec.iter().enumerate() {
            let expect = (std::f64::consts::PI * h * (i as f64 + 1.0)).sin() * mid;
            assert!((v - expect).abs() < 1e-6 * mid.abs());
        }
    }
}
