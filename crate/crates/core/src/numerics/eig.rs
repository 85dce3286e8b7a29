use crate::{PlateError, Result};

/// Dense symmetric matrix. `set` writes both triangles, so symmetry is
/// exact by storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(order: usize, mut f: F) -> Self {
        let mut m = SymMatrix::zeros(order);
        for i in 0..order {
            for j in i..order {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
        self.data[j * self.order + i] = v;
    }

    pub fn identity(order: usize) -> Self {
        SymMatrix::from_fn(order, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.order)
            .map(|i| {
                (0..self.order)
                    .map(|j| self.get(i, j) * x[j])
                    .sum::<f64>()
            })
            .collect()
    }

    /// Rows as a nested vector, for JSON export.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.order)
            .map(|i| self.data[i * self.order..(i + 1) * self.order].to_vec())
            .collect()
    }

    /// Lower Cholesky factor; fails with the offending pivot index if
    /// the matrix is not positive definite.
    pub fn cholesky(&self) -> Result<Vec<f64>> {
        let n = self.order;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(PlateError::NotPositiveDefinite { pivot: i, value: s });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(l)
    }
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// Solve the generalized symmetric eigenproblem `A w = μ B w` with `B`
/// positive definite.
///
/// `B` is factored as `L Lᵀ`, the problem reduced to the standard
/// symmetric `C = L⁻¹ A L⁻ᵀ`, and `C` diagonalized by cyclic Jacobi
/// rotations. Eigenvalues come back ascending; eigenvectors are
/// B-orthonormal, `wᵢᵀ B wⱼ = δᵢⱼ`.
pub fn sym_generalized_eig(a: &SymMatrix, b: &SymMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    assert_eq!(a.order(), b.order(), "A and B must have the same order");
    let n = a.order();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    // equilibrate the pencil: (A, B) -> (DAD, DBD) with D =
    // diag(B)^{-1/2} leaves the eigenvalues unchanged and keeps the
    // Cholesky factor well scaled for polynomial Gram matrices
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let bii = b.get(i, i);
            if bii > 0.0 {
                1.0 / bii.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let a = SymMatrix::from_fn(n, |i, j| d[i] * a.get(i, j) * d[j]);
    let b = SymMatrix::from_fn(n, |i, j| d[i] * b.get(i, j) * d[j]);
    let l = b.cholesky()?;

    // X = L^{-1} A  (forward substitution on each column of A)
    let mut x = vec![0.0; n * n];
    for col in 0..n {
        for i in 0..n {
            let mut s = a.get(i, col);
            for k in 0..i {
                s -= l[i * n + k] * x[k * n + col];
            }
            x[i * n + col] = s / l[i * n + i];
        }
    }
    // C = X L^{-T}  (forward substitution on each row of X)
    let mut c = vec![0.0; n * n];
    for row in 0..n {
        for j in 0..n {
            let mut s = x[row * n + j];
            for k in 0..j {
                s -= l[j * n + k] * c[row * n + k];
            }
            c[row * n + j] = s / l[j * n + j];
        }
    }

    // cyclic Jacobi on C, accumulating rotations in V
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut converged = false;
    let mut prev_off = f64::INFINITY;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += c[i * n + i] * c[i * n + i];
            for j in i + 1..n {
                off += c[i * n + j] * c[i * n + j];
            }
        }
        let off_n = off.sqrt();
        let diag_n = diag.sqrt().max(1e-300);
        // accept either full convergence or stagnation at the roundoff
        // floor (large matrices cannot always reach 1e-13 relative)
        if off_n <= 1e-13 * diag_n || (off_n <= 1e-10 * diag_n && off_n >= 0.5 * prev_off) {
            converged = true;
            break;
        }
        prev_off = off_n;
        for p in 0..n {
            for q in p + 1..n {
                let apq = c[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = c[p * n + p];
                let aqq = c[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cos = 1.0 / (t * t + 1.0).sqrt();
                let sin = t * cos;
                for k in 0..n {
                    let ckp = c[k * n + p];
                    let ckq = c[k * n + q];
                    c[k * n + p] = cos * ckp - sin * ckq;
                    c[k * n + q] = sin * ckp + cos * ckq;
                }
                for k in 0..n {
                    let cpk = c[p * n + k];
                    let cqk = c[q * n + k];
                    c[p * n + k] = cos * cpk - sin * cqk;
                    c[q * n + k] = sin * cpk + cos * cqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = cos * vkp - sin * vkq;
                    v[k * n + q] = sin * vkp + cos * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(PlateError::NoConvergence(MAX_JACOBI_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| c[i * n + i].partial_cmp(&c[j * n + j]).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &idx in &order {
        eigenvalues.push(c[idx * n + idx]);
        // w = L^{-T} y  (back substitution), then undo the
        // equilibration so w is orthonormal in the original B
        let mut w = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = v[i * n + idx];
            for k in i + 1..n {
                s -= l[k * n + i] * w[k];
            }
            w[i] = s / l[i * n + i];
        }
        for i in 0..n {
            w[i] *= d[i];
        }
        eigenvectors.push(w);
    }
    Ok((eigenvalues, eigenvectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &SymMatrix, b: &SymMatrix, mu: f64, w: &[f64]) -> f64 {
        let aw = a.mul_vec(w);
        let bw = b.mul_vec(w);
        let num: f64 = aw
            .iter()
            .zip(&bw)
            .map(|(x, y)| (x - mu * y) * (x - mu * y))
            .sum::<f64>()
            .sqrt();
        let wn: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        num / wn
    }

    #[test]
    fn diagonal_case() {
        let a = SymMatrix::from_fn(2, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let b = SymMatrix::identity(2);
        let (mu, w) = sym_generalized_eig(&a, &b).unwrap();
        assert!((mu[0] - 1.0).abs() < 1e-13 && (mu[1] - 2.0).abs() < 1e-13);
        assert!(w[0][0].abs() > 0.99 && w[1][1].abs() > 0.99);
    }

    #[test]
    fn two_by_two_closed_form() {
        let mut a = SymMatrix::zeros(2);
        a.set(0, 0, 2.0);
        a.set(1, 1, 2.0);
        a.set(0, 1, 1.0);
        let b = SymMatrix::identity(2);
        let (mu, w) = sym_generalized_eig(&a, &b).unwrap();
        assert!((mu[0] - 1.0).abs() < 1e-13 && (mu[1] - 3.0).abs() < 1e-13);
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((w[0][0].abs() - s).abs() < 1e-12 && (w[0][1].abs() - s).abs() < 1e-12);
        assert!(w[0][0] * w[0][1] < 0.0); // (1, -1)/sqrt(2) direction
        assert!(w[1][0] * w[1][1] > 0.0);
    }

    #[test]
    fn random_pencil_residuals() {
        // deterministic pseudo-random 6x6 pencil; the residual is its
        // own oracle
        let mut state = 0x2545f4914f6cdd1d_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = 6;
        let a = SymMatrix::from_fn(n, |_, _| next());
        let mut m = vec![0.0; n * n];
        for v in m.iter_mut() {
            *v = next();
        }
        let b = SymMatrix::from_fn(n, |i, j| {
            let mut s = if i == j { 1.0 } else { 0.0 };
            for k in 0..n {
                s += m[k * n + i] * m[k * n + j];
            }
            s
        });
        let (mu, w) = sym_generalized_eig(&a, &b).unwrap();
        for i in 0..n {
            assert!(residual(&a, &b, mu[i], &w[i]) < 1e-10);
            if i > 0 {
                assert!(mu[i] >= mu[i - 1]);
            }
            for j in 0..n {
                let bw = b.mul_vec(&w[j]);
                let dot: f64 = w[i].iter().zip(&bw).map(|(x, y)| x * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10, "B-orthonormality {i},{j}");
            }
        }
    }

    #[test]
    fn reports_failing_pivot() {
        let mut b = SymMatrix::identity(3);
        b.set(2, 2, -1.0);
        let a = SymMatrix::identity(3);
        match sym_generalized_eig(&a, &b) {
            Err(PlateError::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 2),
            other => panic!("expected pivot error, got {other:?}"),
        }
    }
}
