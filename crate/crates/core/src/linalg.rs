//! Dense linear algebra on complex matrices: spectra, singular values, linear solves, and
//! the numerical radius via Lanczos on the Hermitian part.

use std::f64::consts::PI;

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::dtd::{matvec, matvec_adjoint, CMat};
use crate::error::{Error, Result};

pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    m.eigenvalues().map_err(|e| Error::EigenFailure(format!("{e:?}")))
}

pub fn spectral_radius(m: &CMat) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    m.singular_values().map_err(|e| Error::EigenFailure(format!("{e:?}")))
}

pub fn top_singular_value(m: &CMat) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Top singular value by power iteration on `m^H m`, stopped when the Rayleigh quotient
/// changes by less than `tol` relative. Returns the estimate and the iterations used.
pub fn power_top_singular_value(m: &CMat, start: &[Complex64], tol: f64, max_iters: usize) -> Result<(f64, usize)> {
    let mut x = start.to_vec();
    let n0 = norm(&x);
    if n0 == 0.0 || x.len() != m.ncols() {
        return Err(Error::InvalidInput("power iteration needs a nonzero start vector of matching length".into()));
    }
    x.iter_mut().for_each(|v| *v /= n0);
    let mut prev = 0.0;
    for it in 1..=max_iters {
        let y = matvec_adjoint(m, &matvec(m, &x));
        let q = dot(&x, &y).re;
        let ny = norm(&y);
        if ny == 0.0 {
            return Ok((0.0, it));
        }
        x = y.into_iter().map(|v| v / ny).collect();
        if (q - prev).abs() <= tol * q.abs() {
            return Ok((q.max(0.0).sqrt(), it));
        }
        prev = q;
    }
    Err(Error::EigenFailure(format!("power iteration did not reach {tol:e} in {max_iters} steps")))
}

/// Solves `m x = b` by partially pivoted LU and reports the relative residual.
pub fn solve(m: &CMat, b: &[Complex64]) -> (Vec<Complex64>, f64) {
    use faer::linalg::solvers::Solve;
    let rhs = Mat::from_fn(b.len(), 1, |r, _| b[r]);
    let x = m.partial_piv_lu().solve(&rhs);
    let x: Vec<Complex64> = (0..b.len()).map(|r| x[(r, 0)]).collect();
    let r = matvec(m, &x);
    let res = norm(&r.iter().zip(b).map(|(a, b)| a - b).collect::<Vec<_>>());
    (x, res / norm(b).max(f64::MIN_POSITIVE))
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Largest eigenvalue and eigenvector of a Hermitian operator given by its action, by
/// restarted Lanczos with full reorthogonalization.
pub fn lanczos_max(
    n: usize,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    start: Option<&[Complex64]>,
    tol: f64,
) -> Result<(f64, Vec<Complex64>)> {
    if n == 0 {
        return Ok((0.0, Vec::new()));
    }
    let krylov = n.min(40);
    let generic: Vec<Complex64> =
        (0..n).map(|k| Complex64::new(1.0 + (k as f64 * 0.618).sin() * 0.5, (k as f64 * 1.3).cos() * 0.3)).collect();
    // A warm start may be an exact eigenvector of an invariant subspace; keep every direction present.
    let mut v0: Vec<Complex64> = match start {
        Some(s) if norm(s) > 0.0 => {
            let (ns, ng) = (norm(s), norm(&generic));
            s.iter().zip(&generic).map(|(a, b)| a / ns + b * (1e-3 / ng)).collect()
        }
        _ => generic,
    };
    let mut last = f64::NAN;
    for _ in 0..200 {
        let s = norm(&v0);
        v0.iter_mut().for_each(|x| *x /= s);
        let mut basis: Vec<Vec<Complex64>> = vec![v0.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for k in 0..krylov {
            let mut w = apply(&basis[k]);
            alpha.push(dot(&basis[k], &w).re);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let nb = norm(&w);
            beta.push(nb);
            if k + 1 == krylov || nb < 1e-14 * alpha.iter().fold(1e-300, |m: f64, a| m.max(a.abs())) {
                break;
            }
            w.iter_mut().for_each(|x| *x /= nb);
            basis.push(w);
        }
        let m = alpha.len();
        let t = Mat::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r == c + 1 {
                beta[c]
            } else if c == r + 1 {
                beta[r]
            } else {
                0.0
            }
        });
        let eig = t.self_adjoint_eigen(Side::Lower).map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
        let theta = eig.S().column_vector()[m - 1];
        let u = eig.U();
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for (k, b) in basis.iter().enumerate().take(m) {
            let coef = u[(k, m - 1)];
            y.iter_mut().zip(b).for_each(|(a, x)| *a += x * coef);
        }
        let residual = beta[m - 1] * u[(m - 1, m - 1)].abs();
        if residual <= tol * theta.abs().max(1e-300) || m == n || (theta - last).abs() <= 1e-15 * theta.abs() {
            return Ok((theta, y));
        }
        last = theta;
        v0 = y;
    }
    Err(Error::EigenFailure("Lanczos did not converge".into()))
}

/// `lambda_max((e^{i phi} M + e^{-i phi} M^H) / 2)` as a function of `phi` with warm starts.
struct RotatedHermitian<'a> {
    m: &'a CMat,
    warm: Option<Vec<Complex64>>,
    tol: f64,
}

impl RotatedHermitian<'_> {
    fn eval(&mut self, phi: f64) -> Result<f64> {
        let e = Complex64::from_polar(1.0, phi);
        let m = self.m;
        let apply = |x: &[Complex64]| {
            let a = matvec(m, x);
            let b = matvec_adjoint(m, x);
            a.iter().zip(&b).map(|(a, b)| (e * a + e.conj() * b) * 0.5).collect()
        };
        let (lam, v) = lanczos_max(m.nrows(), apply, self.warm.as_deref(), self.tol)?;
        self.warm = Some(v);
        Ok(lam)
    }
}

/// Largest singular value of `(e^{i phi} G1 + e^{-i phi} G2^H) / 2`, the Hermitian-part
/// maximum of `e^{i phi} offdiag(G1, G2)`.
struct OffDiagonal<'a> {
    g1: &'a CMat,
    g2: &'a CMat,
    warm: Option<Vec<Complex64>>,
    tol: f64,
}

impl OffDiagonal<'_> {
    fn eval(&mut self, phi: f64) -> Result<f64> {
        let e = Complex64::from_polar(1.0, phi);
        let (g1, g2) = (self.g1, self.g2);
        let c = |x: &[Complex64]| -> Vec<Complex64> {
            let a = matvec(g1, x);
            let b = matvec_adjoint(g2, x);
            a.iter().zip(&b).map(|(a, b)| (e * a + e.conj() * b) * 0.5).collect()
        };
        let ch = |x: &[Complex64]| -> Vec<Complex64> {
            let a = matvec_adjoint(g1, x);
            let b = matvec(g2, x);
            a.iter().zip(&b).map(|(a, b)| (e.conj() * a + e * b) * 0.5).collect()
        };
        let apply = |x: &[Complex64]| ch(&c(x));
        let (lam, v) = lanczos_max(g1.ncols(), apply, self.warm.as_deref(), self.tol)?;
        self.warm = Some(v);
        Ok(lam.max(0.0).sqrt())
    }
}

/// Grid search over `[lo, hi]` followed by golden-section refinement around the best node.
fn maximize(mut f: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64, grid: usize) -> Result<(f64, f64)> {
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for k in 0..grid {
        let phi = lo + k as f64 * step;
        let v = f(phi)?;
        if v > best.1 {
            best = (phi, v);
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..40 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    let refined = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Ok(if refined.1 >= best.1 { refined } else { best })
}

/// Numerical radius `sup |<x, M x>|` over unit vectors. Returns the value and the maximizing
/// rotation angle.
pub fn numerical_radius(m: &CMat, grid: usize, tol: f64) -> Result<(f64, f64)> {
    let mut h = RotatedHermitian { m, warm: None, tol };
    let (phi, w) = maximize(|p| h.eval(p), 0.0, 2.0 * PI, grid.max(3))?;
    Ok((w, phi))
}

/// Numerical radius of `offdiag(G1, G2)`. The numerical range is symmetric about 0, so
/// rotations over `[0, pi]` suffice.
pub fn numerical_radius_offdiag(g1: &CMat, g2: &CMat, grid: usize, tol: f64) -> Result<(f64, f64)> {
    let mut h = OffDiagonal { g1, g2, warm: None, tol };
    let (phi, w) = maximize(|p| h.eval(p), 0.0, PI, grid.max(3))?;
    Ok((w, phi))
}

/// Largest singular value by Lanczos on `M^H M`.
pub fn top_singular_value_lanczos(m: &CMat, tol: f64) -> Result<f64> {
    let apply = |x: &[Complex64]| matvec_adjoint(m, &matvec(m, x));
    let (lam, _) = lanczos_max(m.ncols(), apply, None, tol)?;
    Ok(lam.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn dense_hermitian_max(m: &CMat, phi: f64) -> f64 {
        let e = Complex64::from_polar(1.0, phi);
        let h = Mat::from_fn(m.nrows(), m.ncols(), |r, k| (e * m[(r, k)] + e.conj() * m[(k, r)].conj()) * 0.5);
        *h.self_adjoint_eigenvalues(Side::Lower).unwrap().last().unwrap()
    }

    #[test]
    fn power_iteration_matches_svd() {
        for seed in 0..4 {
            let m = random(12, seed);
            let start = vec![c(1.0, 0.0); 12];
            let (s, iters) = power_top_singular_value(&m, &start, 1e-12, 10_000).unwrap();
            let want = top_singular_value(&m).unwrap();
            assert!((s - want).abs() < 1e-6 * want, "{s} {want} after {iters}");
        }
        let zero = Mat::<Complex64>::zeros(3, 3);
        assert_eq!(power_top_singular_value(&zero, &[c(1.0, 0.0); 3], 1e-12, 10).unwrap().0, 0.0);
        assert!(power_top_singular_value(&zero, &[c(0.0, 0.0); 3], 1e-12, 10).is_err());
    }

    #[test]
    fn jordan_block() {
        // Numerical range of [[0, 1], [0, 0]] is the disk of radius 1/2.
        let m = Mat::from_fn(2, 2, |r, k| if r == 0 && k == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let (w, _) = numerical_radius(&m, 33, 1e-13).unwrap();
        assert!((w - 0.5).abs() < 1e-12);
        assert_eq!(spectral_radius(&m).unwrap(), 0.0);
    }

    #[test]
    fn normal_matrix_radius_is_spectral_radius() {
        let d = [c(0.3, 0.1), c(-0.7, 0.2), c(0.1, -0.5)];
        let m = Mat::from_fn(3, 3, |r, k| if r == k { d[r] } else { c(0.0, 0.0) });
        let (w, _) = numerical_radius(&m, 361, 1e-13).unwrap();
        assert!((w - d[1].norm()).abs() < 1e-10, "{w} {}", d[1].norm());
    }

    #[test]
    fn lanczos_matches_dense() {
        let m = random(60, 3);
        for phi in [0.0, 1.0, 2.5] {
            let mut h = RotatedHermitian { m: &m, warm: None, tol: 1e-13 };
            assert!((h.eval(phi).unwrap() - dense_hermitian_max(&m, phi)).abs() < 1e-9);
        }
        let top = top_singular_value(&m).unwrap();
        assert!((top_singular_value_lanczos(&m, 1e-14).unwrap() - top).abs() < 1e-9);
    }

    #[test]
    fn offdiag_matches_general() {
        let (g1, g2) = (random(7, 11), random(7, 12));
        let n = 7;
        let b = Mat::from_fn(2 * n, 2 * n, |r, k| match (r < n, k < n) {
            (true, false) => g1[(r, k - n)],
            (false, true) => g2[(r - n, k)],
            _ => c(0.0, 0.0),
        });
        let (w, _) = numerical_radius(&b, 721, 1e-13).unwrap();
        let (wb, _) = numerical_radius_offdiag(&g1, &g2, 361, 1e-13).unwrap();
        assert!((w - wb).abs() < 1e-9);
    }

    #[test]
    fn solve_residual() {
        let mut m = random(30, 5);
        for k in 0..30 {
            m[(k, k)] += c(10.0, 0.0);
        }
        let b: Vec<_> = (0..30).map(|k| c(k as f64, 1.0)).collect();
        let (x, res) = solve(&m, &b);
        assert!(res < 1e-14);
        assert_eq!(x.len(), 30);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn radius_sandwich(seed in 0u64..1000) {
            // rho(M) <= w(M) <= ||M|| <= 2 w(M)
            let m = random(8, seed);
            let (w, _) = numerical_radius(&m, 181, 1e-13).unwrap();
            let rho = spectral_radius(&m).unwrap();
            let s = top_singular_value(&m).unwrap();
            prop_assert!(rho <= w + 1e-9);
            prop_assert!(w <= s + 1e-9);
            prop_assert!(s <= 2.0 * w + 1e-9);
        }
    }
}
