use num_complex::Complex;

use super::CalculusError;
use crate::Scalar;

/// Largest dimension accepted by [`hermitian_min_eig`].
pub const MAX_DIM: usize = 8;

/// Dense row-major complex `n x n` matrix, expected to be Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> HermitianMatrix<T> {
    pub fn from_rows(n: usize, data: Vec<Complex<T>>) -> Result<Self, CalculusError> {
        if n == 0 || data.len() != n * n {
            return Err(CalculusError::InvalidArgument(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex::new(T::zero(), T::zero()); n * n] }
    }

    pub fn diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, Complex::new(*v, T::zero()));
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.data[j * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, v: Complex<T>) {
        self.data[j * self.n + k] = v;
    }

    /// Largest `|H_jk - conj(H_kj)| / (1 + |H_jk|)`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.n {
            for k in 0..self.n {
                let a = self.get(j, k);
                let d = (a - self.get(k, j).conj()).norm() / (T::one() + a.norm());
                worst = worst.max(d);
            }
        }
        worst
    }

    /// The Levi-form contraction `sum_jk H_jk xi_j conj(xi_k)` (real part).
    pub fn form(&self, xi: &[Complex<T>]) -> Result<T, CalculusError> {
        if xi.len() != self.n {
            return Err(CalculusError::DimensionMismatch { expected: self.n, found: xi.len() });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..self.n {
            for k in 0..self.n {
                acc = acc + self.get(j, k) * xi[j] * xi[k].conj();
            }
        }
        Ok(acc.re)
    }

    /// Spectral norm bound `max_j sum_k |H_jk|`, exact for diagonal matrices.
    pub fn row_norm(&self) -> T {
        (0..self.n).map(|j| (0..self.n).fold(T::zero(), |acc, k| acc + self.get(j, k).norm())).fold(T::zero(), T::max)
    }

    /// Real symmetric `2n x 2n` embedding `[[A, -B], [B, A]]` of `H = A + iB`.
    fn real_embedding(&self) -> Vec<T> {
        let n = self.n;
        let m = 2 * n;
        let mut out = vec![T::zero(); m * m];
        for j in 0..n {
            for k in 0..n {
                let h = self.get(j, k);
                out[j * m + k] = h.re;
                out[(j + n) * m + k + n] = h.re;
                out[j * m + k + n] = -h.im;
                out[(j + n) * m + k] = h.im;
            }
        }
        out
    }
}

/// Smallest eigenvalue of a Hermitian matrix of dimension at most [`MAX_DIM`].
///
/// Uses the closed form for `n <= 2` and cyclic Jacobi on the real embedding otherwise.
pub fn hermitian_min_eig<T: Scalar>(h: &HermitianMatrix<T>) -> Result<T, CalculusError> {
    if h.dim() > MAX_DIM {
        return Err(CalculusError::InvalidArgument(format!("dimension {} exceeds {MAX_DIM}", h.dim())));
    }
    let asym = h.asymmetry();
    if !(asym <= T::symmetry_tol()) {
        return Err(CalculusError::NotHermitian(asym.as_f64()));
    }
    match h.dim() {
        1 => Ok(h.get(0, 0).re),
        2 => Ok(min_eig_2x2(h)),
        _ => Ok(hermitian_eigenvalues(h)[0]),
    }
}

/// `(a+d)/2 - sqrt(((a-d)/2)^2 + |b|^2)` for `[[a, b], [conj b, d]]`.
pub fn min_eig_2x2<T: Scalar>(h: &HermitianMatrix<T>) -> T {
    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let radius = ((a - d) * half).hypot(h.get(0, 1).norm());
    mean - radius
}

/// All eigenvalues in ascending order.
pub fn hermitian_eigenvalues<T: Scalar>(h: &HermitianMatrix<T>) -> Vec<T> {
    let n = h.dim();
    let mut ev = symmetric_eigenvalues(h.real_embedding(), 2 * n);
    // The embedding doubles every eigenvalue; keep one of each pair.
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev.into_iter().step_by(2).collect()
}

/// Eigenvalues of a real symmetric `m x m` matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Scalar>(mut a: Vec<T>, m: usize) -> Vec<T> {
    debug_assert_eq!(a.len(), m * m);
    let idx = |i: usize, j: usize| i * m + j;
    let scale = a.iter().fold(T::zero(), |acc, x| acc + *x * *x).sqrt();
    let threshold = T::epsilon() * T::epsilon() * scale * scale;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..m {
            for j in (i + 1)..m {
                off = off + a[idx(i, j)] * a[idx(i, j)];
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[idx(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..m).map(|i| a[idx(i, i)]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}
