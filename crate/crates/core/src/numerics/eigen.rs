use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Relative Hermiticity tolerance applied when a matrix is constructed.
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-13;

/// Dense complex Hermitian matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(n, data, DEFAULT_HERMITIAN_TOL)
    }

    /// Validates finiteness and `|a_ij - conj(a_ji)| <= tol * max|a|`.
    pub fn with_tolerance(n: usize, data: Vec<Complex64>, tol: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("matrix dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::Argument(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Argument(format!(
                "non-finite entry at ({}, {})",
                pos / n,
                pos % n
            )));
        }
        let m = Self { n, data };
        let defect = m.hermitian_defect();
        let bound = tol * m.max_abs().max(f64::MIN_POSITIVE);
        if defect > bound {
            return Err(Error::NotHermitian { defect, tol: bound });
        }
        Ok(m)
    }

    pub fn from_fn<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::new(n, data)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::zero()
            }
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_real_diagonal(&vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    /// Largest `|a_ij - conj(a_ji)|` over all index pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Ascending eigenvalues with optional orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    n: usize,
    // row-major n x n; column j is the eigenvector of values[j]
    vectors: Option<Vec<Complex64>>,
}

impl EigenDecomposition {
    pub fn has_vectors(&self) -> bool {
        self.vectors.is_some()
    }

    pub fn vector(&self, j: usize) -> Option<Vec<Complex64>> {
        let n = self.n;
        self.vectors
            .as_ref()
            .map(|v| (0..n).map(|i| v[i * n + j]).collect())
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Householder reflections bring the matrix to complex Hermitian tridiagonal
/// form, a diagonal unitary rescaling makes the off-diagonal real, and
/// implicit QL iterations with Wilkinson-type shifts diagonalize the result.
pub fn hermitian_eigenvalues(h: &HermitianMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    let n = h.dim();
    let mut a = h.data.clone();
    for i in 0..n {
        a[i * n + i].im = 0.0;
    }
    let mut sub = vec![Complex64::zero(); n];
    let mut reflectors: Vec<(Vec<Complex64>, f64)> = Vec::new();

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<Complex64> = (0..m).map(|i| a[(k + 1 + i) * n + k]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            sub[k] = Complex64::zero();
            if want_vectors {
                reflectors.push((Vec::new(), 0.0));
            }
            continue;
        }
        let x0 = x[0];
        let x0_abs = x0.norm();
        let phase = if x0_abs > 0.0 { x0 / x0_abs } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v = x;
        v[0] -= alpha;
        let tau = 1.0 / (norm * (norm + x0_abs));

        // p = tau * A22 v
        let mut p = vec![Complex64::zero(); m];
        for i in 0..m {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            let mut acc = Complex64::zero();
            for (aij, vj) in row.iter().zip(&v) {
                acc += aij * vj;
            }
            p[i] = acc * tau;
        }
        let vp: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let kf = 0.5 * tau * vp.re;
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kf).collect();
        let vc: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        let wc: Vec<Complex64> = w.iter().map(|z| z.conj()).collect();
        for i in 0..m {
            let vi = v[i];
            let wi = w[i];
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            for ((aij, wcj), vcj) in row.iter_mut().zip(&wc).zip(&vc) {
                *aij -= vi * wcj + wi * vcj;
            }
        }
        sub[k] = alpha;
        if want_vectors {
            reflectors.push((v, tau));
        }
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1) * n + n - 2];
    }

    let mut diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    drop(a);

    // unitary diagonal scaling making the sub-diagonal real and non-negative
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    let mut off = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let e = sub[k];
        let r = e.norm();
        off[k] = r;
        phases[k + 1] = if r > 0.0 { phases[k] * (e / r) } else { phases[k] };
    }

    let mut zt = if want_vectors {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        Some(z)
    } else {
        None
    };
    tridiagonal_ql(&mut diag, &mut off, zt.as_deref_mut(), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();

    let vectors = zt.map(|z| {
        // Y[i][j] = phase_i * z_{order[j]}[i]
        let mut y = vec![Complex64::zero(); n * n];
        for (j, &src) in order.iter().enumerate() {
            for i in 0..n {
                y[i * n + j] = phases[i] * z[src * n + i];
            }
        }
        for (k, (v, tau)) in reflectors.iter().enumerate().rev() {
            if *tau == 0.0 {
                continue;
            }
            let off_row = k + 1;
            let mut s = vec![Complex64::zero(); n];
            for (i, vi) in v.iter().enumerate() {
                let vic = vi.conj();
                let row = &y[(off_row + i) * n..(off_row + i + 1) * n];
                for (sj, yij) in s.iter_mut().zip(row) {
                    *sj += vic * yij;
                }
            }
            for (i, vi) in v.iter().enumerate() {
                let f = vi * *tau;
                let row = &mut y[(off_row + i) * n..(off_row + i + 1) * n];
                for (yij, sj) in row.iter_mut().zip(&s) {
                    *yij -= f * sj;
                }
            }
        }
        y
    });

    Ok(EigenDecomposition { values, n, vectors })
}

/// Ascending eigenvalues of the real symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off` (`off.len() == diag.len() - 1`).
pub fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::Argument(format!(
            "tridiagonal shape mismatch: {} diagonal and {} off-diagonal entries",
            n,
            off.len()
        )));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return Err(Error::Argument("non-finite tridiagonal entry".into()));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    tridiagonal_ql(&mut d, &mut e, None, n)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Implicit QL on a real symmetric tridiagonal matrix (`off[i]` couples `i`
/// and `i + 1`). When given, `zt` holds eigenvectors as rows.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>, n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                return Err(Error::Internal(format!("QL iteration did not converge at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (head, tail) = z.split_at_mut((i + 1) * n);
                    let zi = &mut head[i * n..];
                    let zi1 = &mut tail[..n];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let fk = *b;
                        *b = s * *a + c * fk;
                        *a = c * *a - s * fk;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::find_root_bracketed;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
    }

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        let mut rng = Lcg(seed);
        let mut data = vec![Complex64::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = c(rng.next(), 0.0);
            for j in (i + 1)..n {
                let z = c(rng.next(), rng.next());
                data[i * n + j] = z;
                data[j * n + i] = z.conj();
            }
        }
        HermitianMatrix::new(n, data).unwrap()
    }

    fn det(m: &[Complex64], n: usize) -> Complex64 {
        if n == 1 {
            return m[0];
        }
        let mut total = Complex64::zero();
        for col in 0..n {
            let minor: Vec<Complex64> = (1..n)
                .flat_map(|i| (0..n).filter(move |&j| j != col).map(move |j| (i, j)))
                .map(|(i, j)| m[i * n + j])
                .collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            total += m[col] * det(&minor, n - 1) * sign;
        }
        total
    }

    #[test]
    fn pauli_z() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]).unwrap();
        let e = hermitian_eigenvalues(&h, false).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn discrete_laplacian_tridiagonal() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2cos(jπ/(n+1))
        let n = 50;
        let v = symmetric_tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (j, x) in v.iter().enumerate() {
            let exact = 2.0 - 2.0 * (PI * (j + 1) as f64 / (n + 1) as f64).cos();
            assert!((x - exact).abs() < 1e-13);
        }
        assert!(symmetric_tridiagonal_eigenvalues(&[1.0, 2.0], &[]).is_err());
    }

    #[test]
    fn supersymmetric_two_by_two_block() {
        let (xi, lam) = (0.5, PI / 4.0);
        let h = HermitianMatrix::new(2, vec![c(lam, 0.0), c(xi, 0.0), c(xi, 0.0), c(-lam, 0.0)]).unwrap();
        let e = hermitian_eigenvalues(&h, true).unwrap();
        let expected = (0.25f64 + PI * PI / 16.0).sqrt();
        assert!((e.values[0] + expected).abs() < 1e-14);
        assert!((e.values[1] - expected).abs() < 1e-14);
    }

    #[test]
    fn random_three_by_three_matches_characteristic_polynomial() {
        let h = random_hermitian(3, 7);
        let charpoly = |x: f64| {
            let mut m = h.as_slice().to_vec();
            for i in 0..3 {
                m[i * 3 + i] -= x;
            }
            det(&m, 3).re
        };
        let bound = h.frobenius_norm() + 1.0;
        let grid: Vec<f64> = (0..=4000).map(|i| -bound + 2.0 * bound * i as f64 / 4000.0).collect();
        let mut roots = Vec::new();
        for w in grid.windows(2) {
            if charpoly(w[0]).signum() != charpoly(w[1]).signum() {
                roots.push(find_root_bracketed(charpoly, w[0], w[1], 1e-15).unwrap());
            }
        }
        assert_eq!(roots.len(), 3);
        let e = hermitian_eigenvalues(&h, false).unwrap();
        for (a, b) in e.values.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let err = HermitianMatrix::new(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn residual_and_orthonormality() {
        for &n in &[1usize, 2, 5, 17, 60] {
            let h = random_hermitian(n, 100 + n as u64);
            let e = hermitian_eigenvalues(&h, true).unwrap();
            let norm = h.frobenius_norm();
            let vecs: Vec<_> = (0..n).map(|j| e.vector(j).unwrap()).collect();
            for (j, v) in vecs.iter().enumerate() {
                let hv = h.mul_vec(v);
                let res = hv
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - b * e.values[j]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-10 * norm, "n={n} j={j} residual {res}");
            }
            for i in 0..n {
                for j in 0..n {
                    let g: Complex64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a.conj() * b).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((g - target).norm() < 1e-10, "n={n} gram({i},{j}) = {g}");
                }
            }
        }
    }

    #[test]
    fn values_only_path_agrees_with_vector_path() {
        let h = random_hermitian(40, 3);
        let a = hermitian_eigenvalues(&h, false).unwrap();
        let b = hermitian_eigenvalues(&h, true).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let h = HermitianMatrix::identity(6).unwrap();
        let e = hermitian_eigenvalues(&h, true).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    proptest! {
        #[test]
        fn trace_and_determinant(seed in 0u64..10_000, n in 1usize..5) {
            let h = random_hermitian(n, seed);
            let e = hermitian_eigenvalues(&h, false).unwrap();
            let norm = h.frobenius_norm();
            let sum: f64 = e.values.iter().sum();
            prop_assert!((sum - h.trace()).abs() <= 1e-10 * n as f64 * norm.max(1.0));
            let prod: f64 = e.values.iter().product();
            let d = det(h.as_slice(), n);
            prop_assert!((prod - d.re).abs() <= 1e-9, "prod {} det {}", prod, d);
        }

        #[test]
        fn trace_identity_larger(seed in 0u64..10_000, n in 5usize..40) {
            let h = random_hermitian(n, seed);
            let e = hermitian_eigenvalues(&h, false).unwrap();
            let sum: f64 = e.values.iter().sum();
            prop_assert!((sum - h.trace()).abs() <= 1e-10 * n as f64 * h.frobenius_norm());
        }
    }
}
