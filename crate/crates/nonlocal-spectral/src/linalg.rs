//! Dense symmetric matrices and a deterministic cyclic-Jacobi eigensolver
//! with full eigenvector recovery.

use crate::error::{Error, Result};

/// Dense symmetric matrix. Entries are stored fully; `set` writes both
/// triangles so the matrix stays symmetric by construction.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Quadratic form vᵀ M v.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let mv = self.mul_vec(v);
        v.iter().zip(&mv).map(|(a, b)| a * b).sum()
    }

    /// M − other, entrywise.
    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Drop the first `k` rows and columns (realizes c₀ = … = c_{k−1} = 0).
    pub fn restrict(&self, drop_first: usize) -> Result<SymMatrix> {
        if drop_first >= self.n {
            return Err(Error::InvalidInput(format!(
                "cannot drop {} rows from a {}×{} matrix",
                drop_first, self.n, self.n
            )));
        }
        let m = self.n - drop_first;
        Ok(SymMatrix::from_fn(m, |i, j| {
            self.get(i + drop_first, j + drop_first)
        }))
    }
}

/// Eigenvalues sorted descending with the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// eigenvectors[i] pairs with eigenvalues[i]
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi sweeps until the largest off-diagonal entry is below
/// 1e−12·‖M‖_F, at most 100 sweeps. Eigenvectors are sign-fixed so the
/// largest-magnitude entry is positive.
pub fn eigh(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.size();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            eigenvectors: vec![],
        });
    }
    let scale = m.frobenius_norm();
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let mut a = m.clone();
    // v[i][j]: row i, column j; columns accumulate the rotations
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let mut converged = scale == 0.0 || n == 1;
    let mut sweeps = 0;
    let mut max_off = 0.0f64;
    while !converged && sweeps < 100 {
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol * 1e-3 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotate rows/columns p, q of a
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                }
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
        max_off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                max_off = max_off.max(a.get(p, q).abs());
            }
        }
        converged = max_off < tol;
    }
    if !converged {
        return Err(Error::EigenConvergence {
            sweeps,
            residual: max_off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable descending sort preserves sweep output order on ties
    order.sort_by(|&i, &j| a.get(j, j).partial_cmp(&a.get(i, i)).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut eigenvectors = Vec::with_capacity(n);
    for &col in &order {
        let mut vec_i: Vec<f64> = v.iter().map(|row| row[col]).collect();
        let mut best = 0;
        for (k, x) in vec_i.iter().enumerate() {
            if x.abs() > vec_i[best].abs() {
                best = k;
            }
        }
        if vec_i[best] < 0.0 {
            for x in &mut vec_i {
                *x = -*x;
            }
        }
        eigenvectors.push(vec_i);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> SymMatrix {
        SymMatrix::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let d = eigh(&diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![3.0, 2.0, 1.0]);
        assert_eq!(d.eigenvectors[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(d.eigenvectors[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(d.eigenvectors[2], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_exchange() {
        let mut m = SymMatrix::zeros(2);
        m.set(0, 1, 1.0);
        let d = eigh(&m).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] + 1.0).abs() < 1e-14);
        assert!((d.eigenvectors[0][0] - s).abs() < 1e-12);
        assert!((d.eigenvectors[0][1] - s).abs() < 1e-12);
        assert!((d.eigenvectors[1][0].abs() - s).abs() < 1e-12);
    }

    #[test]
    fn residual_and_orthonormality_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [5, 20, 60] {
            let m = SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let d = eigh(&m).unwrap();
            let scale = m.frobenius_norm();
            for i in 0..n {
                let mv = m.mul_vec(&d.eigenvectors[i]);
                let res: f64 = mv
                    .iter()
                    .zip(&d.eigenvectors[i])
                    .map(|(a, b)| (a - d.eigenvalues[i] * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-10 * scale, "n={n} i={i} res={res:e}");
                for j in 0..n {
                    let dot: f64 = d.eigenvectors[i]
                        .iter()
                        .zip(&d.eigenvectors[j])
                        .map(|(a, b)| a * b)
                        .sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn reconstruction_up_to_size_200() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200;
        let m = SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let d = eigh(&m).unwrap();
        // ‖VΛVᵀ − M‖_F ≤ 1e−9 ‖M‖_F
        let mut err2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += d.eigenvectors[k][i] * d.eigenvalues[k] * d.eigenvectors[k][j];
                }
                err2 += (s - m.get(i, j)).powi(2);
            }
        }
        assert!(err2.sqrt() <= 1e-9 * m.frobenius_norm());
    }

    #[test]
    fn char_poly_oracle_3x3() {
        // eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2, 2±√2
        let m = SymMatrix::from_fn(3, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                1.0
            } else {
                0.0
            }
        });
        let d = eigh(&m).unwrap();
        let r2 = 2.0f64.sqrt();
        let want = [2.0 + r2, 2.0, 2.0 - r2];
        for (got, want) in d.eigenvalues.iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn restrict_trailing_block() {
        let m = SymMatrix::from_fn(3, |i, j| (i * 3 + j) as f64 + (j * 3 + i) as f64);
        let r = m.restrict(1).unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(r.get(0, 0), m.get(1, 1));
        assert_eq!(r.get(1, 1), m.get(2, 2));
        assert_eq!(r.get(0, 1), m.get(1, 2));
    }

    #[test]
    fn restrict_zero_is_identity() {
        let m = SymMatrix::from_fn(3, |i, j| (i + j) as f64);
        let r = m.restrict(0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(r.get(i, j), m.get(i, j));
            }
        }
    }

    #[test]
    fn restrict_degenerate_multiplicity() {
        let m = diag(&[9.0, 5.0, 5.0]);
        let r = m.restrict(1).unwrap();
        let d = eigh(&r).unwrap();
        assert_eq!(d.eigenvalues, vec![5.0, 5.0]);
    }

    #[test]
    fn restrict_rejects_too_many() {
        let m = SymMatrix::zeros(3);
        assert!(m.restrict(3).is_err());
    }

    #[test]
    fn cauchy_interlacing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let n = 8;
            let m = SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let full = eigh(&m).unwrap().eigenvalues;
            let sub = eigh(&m.restrict(1).unwrap()).unwrap().eigenvalues;
            for i in 0..n - 1 {
                assert!(
                    full[i] >= sub[i] - 1e-10 && sub[i] >= full[i + 1] - 1e-10,
                    "interlacing violated at {i}: {} {} {}",
                    full[i],
                    sub[i],
                    full[i + 1]
                );
            }
        }
    }
}
