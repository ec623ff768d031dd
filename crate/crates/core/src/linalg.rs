//! Minimal exact-size complex linear algebra for dimensions 1 to 4.
//!
//! Everything here is small and dense. Hermitian spectra up to 3×3 use the
//! closed-form characteristic-polynomial roots; the 4×4 case (two-qubit
//! operators) falls back to cyclic Jacobi sweeps.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const MAX_DIM: usize = 4;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Complex column vector of length 1..=4.
#[derive(Clone, PartialEq)]
pub struct ComplexVec {
    entries: Vec<C64>,
}

impl ComplexVec {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() || entries.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension {
                rows: entries.len(),
                cols: 1,
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![ZERO; len])
    }

    /// Computational basis ket `|index⟩` of the given dimension.
    pub fn basis(len: usize, index: usize) -> Result<Self> {
        let mut v = vec![ZERO; len];
        if index >= len {
            return Err(Error::DimensionMismatch(index, len));
        }
        v[index] = ONE;
        Self::new(v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> C64 {
        self.entries[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Unit vector along `self`; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(self.len(), other.len()));
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Tensor product `self ⊗ other`; the result must still fit in 4 entries.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.entries {
            for b in &other.entries {
                out.push(a * b);
            }
        }
        Self::new(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(self.len(), other.len()));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl fmt::Debug for ComplexVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.iter()).finish()
    }
}

/// `Σ conj(a_i) b_i`, conjugate-linear in the first argument.
pub fn inner_product(a: &ComplexVec, b: &ComplexVec) -> Result<C64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Row-major complex matrix with 1..=4 rows and columns.
#[derive(Clone, PartialEq)]
pub struct ComplexMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMat {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::UnsupportedDimension { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(data.len(), rows * cols));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        Ok(m)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut m = Self::zeros(n, n)?;
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = C64::new(v, 0.0);
        }
        Ok(m)
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &ComplexVec, b: &ComplexVec) -> Result<Self> {
        let mut data = Vec::with_capacity(a.len() * b.len());
        for x in a.entries() {
            for y in b.entries() {
                data.push(x * y.conj());
            }
        }
        Self::new(a.len(), b.len(), data)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVec]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, ComplexVec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch(rows, cols));
        }
        let mut data = vec![ZERO; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for i in 0..rows {
                data[i * cols + j] = c.get(i);
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> ComplexVec {
        ComplexVec {
            entries: (0..self.rows).map(|i| self.get(i, j)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut data = vec![ZERO; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(self.cols, other.rows));
        }
        let mut data = vec![ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for j in 0..other.cols {
                data[i * other.cols + j] = (0..self.cols)
                    .map(|k| self.get(i, k) * other.get(k, j))
                    .sum();
            }
        }
        Self::new(self.rows, other.cols, data)
    }

    pub fn apply(&self, v: &ComplexVec) -> Result<ComplexVec> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(self.cols, v.len()));
        }
        ComplexVec::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|k| self.get(i, k) * v.get(k)).sum())
                .collect(),
        )
    }

    fn zip_with(&self, other: &Self, op: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                self.rows * self.cols,
                other.rows * other.cols,
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::UnsupportedDimension { rows, cols });
        }
        let mut data = vec![ZERO; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        data[(i * other.rows + k) * cols + j * other.cols + l] =
                            self.get(i, j) * other.get(k, l);
                    }
                }
            }
        }
        Self::new(rows, cols, data)
    }

    /// Submatrix keeping the listed rows and columns (in the given order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                if i >= self.rows || j >= self.cols {
                    return Err(Error::DimensionMismatch(i.max(j), self.rows.max(self.cols)));
                }
                data.push(self.get(i, j));
            }
        }
        Self::new(rows.len(), cols.len(), data)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self
            .sub(other)?
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// Largest entry modulus.
    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for ComplexMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[C64]> = self.data.chunks(self.cols).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// The imaginary parts of the diagonal and the anti-Hermitian part are ignored;
/// callers validate Hermiticity first.
pub fn hermitian_eigenvalues(m: &ComplexMat) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let mut eig = match m.rows() {
        1 => vec![m.get(0, 0).re],
        2 => eig_2x2(m).to_vec(),
        3 => eig_3x3(m).to_vec(),
        _ => eig_jacobi(m),
    };
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn eig_2x2(m: &ComplexMat) -> [f64; 2] {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = m.get(0, 1);
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - half_gap, mean + half_gap]
}

// Trigonometric solution of the characteristic cubic (Smith's method).
fn eig_3x3(m: &ComplexMat) -> [f64; 3] {
    let off = m.get(0, 1).norm_sqr() + m.get(0, 2).norm_sqr() + m.get(1, 2).norm_sqr();
    let diag = [m.get(0, 0).re, m.get(1, 1).re, m.get(2, 2).re];
    let q = diag.iter().sum::<f64>() / 3.0;
    let p2 = diag.iter().map(|d| (d - q) * (d - q)).sum::<f64>() + 2.0 * off;
    if p2 <= f64::MIN_POSITIVE {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    let inv_p = C64::new(1.0 / p, 0.0);
    let shifted = |i: usize, j: usize| {
        let z = m.get(i, j) - if i == j { C64::new(q, 0.0) } else { ZERO };
        z * inv_p
    };
    let det = shifted(0, 0) * (shifted(1, 1) * shifted(2, 2) - shifted(1, 2) * shifted(2, 1))
        - shifted(0, 1) * (shifted(1, 0) * shifted(2, 2) - shifted(1, 2) * shifted(2, 0))
        + shifted(0, 2) * (shifted(1, 0) * shifted(2, 1) - shifted(1, 1) * shifted(2, 0));
    let r = (0.5 * det.re).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    [lo, 3.0 * q - hi - lo, hi]
}

// Cyclic complex Jacobi; only reached for 4×4 inputs.
fn eig_jacobi(m: &ComplexMat) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<C64> = m.entries().to_vec();
    let at = |a: &[C64], i: usize, j: usize| a[i * n + j];
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| at(&a, i, j).norm_sqr())
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = at(&a, p, q);
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let app = at(&a, p, p).re;
                let aqq = at(&a, q, q).re;
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A ← J† A J with J = [[c, s·u], [−s·ū, c]] on (p, q), u = a_pq/|a_pq|.
                let sp = phase * s;
                for k in 0..n {
                    let akp = at(&a, k, p);
                    let akq = at(&a, k, q);
                    a[k * n + p] = akp * c - akq * sp.conj();
                    a[k * n + q] = akp * sp + akq * c;
                }
                for k in 0..n {
                    let apk = at(&a, p, k);
                    let aqk = at(&a, q, k);
                    a[p * n + k] = apk * c - aqk * sp;
                    a[q * n + k] = apk * sp.conj() + aqk * c;
                }
            }
        }
    }
    (0..n).map(|i| at(&a, i, i).re).collect()
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values(m: &ComplexMat) -> Vec<f64> {
    let adj = m.adjoint();
    let gram = if m.cols() <= m.rows() {
        adj.matmul(m)
    } else {
        m.matmul(&adj)
    }
    .expect("shapes are compatible by construction");
    let mut sv: Vec<f64> = hermitian_eigenvalues(&gram)
        .expect("Gram matrix is square")
        .into_iter()
        .map(|e| e.max(0.0).sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMat) -> f64 {
    singular_values(m)[0]
}

/// True iff `max |(m† m − I)_ij| ≤ tol`.
pub fn is_unitary(m: &ComplexMat, tol: f64) -> Result<bool> {
    Ok(unitarity_deviation(m)? <= tol)
}

pub fn unitarity_deviation(m: &ComplexMat) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    m.adjoint()
        .matmul(m)?
        .max_abs_diff(&ComplexMat::identity(m.rows())?)
}

/// True iff every eigenvalue is at least `-tol`. Rejects non-Hermitian input.
pub fn is_psd(m: &ComplexMat, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(m, tol)? >= -tol)
}

/// Smallest eigenvalue of a matrix that is Hermitian within `tol`.
pub fn min_eigenvalue(m: &ComplexMat, tol: f64) -> Result<f64> {
    let dev = m.hermitian_deviation()?;
    if dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    Ok(hermitian_eigenvalues(m)?[0])
}


fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; u1 is kept away from 0 so the log is finite.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn gaussian_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVec {
    let data = (0..d).map(|_| C64::new(gaussian(rng), gaussian(rng))).collect();
    ComplexVec::new(data).expect("finite samples")
}

/// Haar-like random pure state in dimension `d`.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVec {
    loop {
        if let Some(v) = gaussian_vec(d, rng).normalized() {
            return v;
        }
    }
}

/// Random unitary from Gram-Schmidt on complex Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMat> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::UnsupportedDimension { rows: d, cols: d });
    }
    let mut cols: Vec<ComplexVec> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = gaussian_vec(d, rng);
        for q in &cols {
            let proj = inner_product(q, &v)?;
            v = v.add(&q.scale(-proj))?;
        }
        if v.norm() > 1e-6 {
            cols.push(v.normalized().expect("nonzero"));
        }
    }
    ComplexMat::from_columns(&cols)
}

/// Random full-rank density matrix `GG†/tr(GG†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMat> {
    let cols: Vec<ComplexVec> = (0..d).map(|_| gaussian_vec(d, rng)).collect();
    let g = ComplexMat::from_columns(&cols)?;
    let gg = g.matmul(&g.adjoint())?;
    let tr = gg.trace().re;
    Ok(gg.scale(C64::new(1.0 / tr, 0.0)))
}
