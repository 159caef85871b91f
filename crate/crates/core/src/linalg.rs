//! Dense complex matrices and the Hermitian spectral routines built on them.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tol;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim(format!("matrix shape {rows}x{cols} is empty")));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// |u⟩⟨v|
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// |v⟩⟨v|
    pub fn projector(v: &[Complex64]) -> Self {
        Self::outer(v, v)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let n = columns.first().map(Vec::len).unwrap_or(0);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::dim("columns have different lengths"));
        }
        let mut data = vec![ZERO; n * columns.len()];
        for (j, col) in columns.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                data[i * columns.len() + j] = z;
            }
        }
        Self::new(n, columns.len(), data)
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    fn same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    fn zip_map(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::dim(format!(
                "{}x{} matrix applied to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::dim(format!(
                "trace of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Tr[self · other] without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::dim(format!(
                "Tr[AB] with {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(acc)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other, "comparison")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// (M + M†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawMatrix {
            rows: self.rows,
            cols: self.cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(d)?;
        if raw.re.len() != raw.im.len() {
            return Err(serde::de::Error::custom(format!(
                "re has {} entries but im has {}",
                raw.re.len(),
                raw.im.len()
            )));
        }
        let data = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(raw.rows, raw.cols, data).map_err(serde::de::Error::custom)
    }
}

/// Spectral decomposition `M = V diag(λ) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)].conj())
                .sum()
        })
    }

    /// Projector onto the span of the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projector(&self, keep: impl Fn(f64) -> bool) -> ComplexMatrix {
        let n = self.values.len();
        let chosen: Vec<usize> = (0..n).filter(|&k| keep(self.values[k])).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            chosen
                .iter()
                .map(|&k| self.vectors[(i, k)] * self.vectors[(j, k)].conj())
                .sum()
        })
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }
}

const EIGEN_MAX_ITER: usize = 10_000;
// Eigenvalues closer than this are treated as degenerate when ordering.
const TIE_GAP: f64 = 1e-12;

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
///
/// Degenerate eigenvalues are ordered by the lexicographic order of the real
/// parts of their eigenvectors (largest first), after fixing each vector's
/// phase so that its first non-negligible component is real and positive.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::dim(format!(
            "eigendecomposition of a non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let herr = m.hermiticity_error();
    if herr > tol::HERM {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (max deviation {herr:.3e})"
        )));
    }
    let n = m.rows;
    let eig = SymmetricEigen::try_new(m.hermitian_part().to_nalgebra(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical(format!("eigensolver did not converge on {n}x{n} input")))?;

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
            fix_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    if pairs.iter().any(|(l, _)| !l.is_finite()) {
        return Err(Error::Numerical("eigensolver produced non-finite eigenvalues".into()));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end - 1].0 - pairs[end].0 <= TIE_GAP {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| {
                let ka = a.1.iter().map(|z| z.re);
                let kb = b.1.iter().map(|z| z.re);
                kb.zip(ka)
                    .map(|(x, y)| x.total_cmp(&y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        }
        start = end;
    }

    let values = pairs.iter().map(|p| p.0).collect();
    let columns: Vec<Vec<Complex64>> = pairs.into_iter().map(|p| p.1).collect();
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix::from_columns(&columns)?,
    })
}

fn fix_phase(v: &mut [Complex64]) {
    if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

/// Standard Schatten-1 (trace) norm `Σ|λᵢ|` of a Hermitian matrix.
pub fn schatten1(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|l| l.abs()).sum())
}

/// Euclidean norm of a vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨u|v⟩
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::diag(&[1.0, -1.0])
    }

    fn zero_minus_plus() -> ComplexMatrix {
        // |0⟩⟨0| − |+⟩⟨+|
        ComplexMatrix::from_real(2, 2, &[0.5, -0.5, -0.5, -0.5]).unwrap()
    }

    #[test]
    fn add_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.add(&i2).unwrap(), ComplexMatrix::diag(&[2.0, 2.0]));
    }

    #[test]
    fn adjoint_is_involution() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 - 0.3 * j as f64, (i * j) as f64 + 0.7));
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn orthogonal_projectors_have_zero_trace_product() {
        let p0 = ComplexMatrix::diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag(&[0.0, 1.0]);
        assert_eq!(p0.matmul(&p1).unwrap().trace().unwrap(), ZERO);
    }

    #[test]
    fn shape_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 2);
        assert!(matches!(a.add(&b), Err(Error::Dimension(_))));
        assert!(matches!(b.matmul(&ComplexMatrix::zeros(3, 3)), Err(Error::Dimension(_))));
        assert!(matches!(a.trace(), Err(Error::Dimension(_))));
        assert!(ComplexMatrix::new(2, 2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![Complex64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
        let p0 = ComplexMatrix::diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag(&[0.0, 1.0]);
        assert_eq!(p0.kron(&p1), ComplexMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));
        let xx = sigma_x().kron(&sigma_x());
        let out = xx.mul_vec(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        assert_eq!(out, vec![ZERO, ZERO, ZERO, ONE]);
    }

    #[test]
    fn pauli_spectra() {
        for m in [sigma_z(), sigma_x()] {
            let e = hermitian_eigen(&m).unwrap();
            assert!((e.values[0] - 1.0).abs() < 1e-14);
            assert!((e.values[1] + 1.0).abs() < 1e-14);
            assert!(e.reconstruct().max_abs_diff(&m).unwrap() < 1e-12);
        }
    }

    #[test]
    fn zero_minus_plus_spectrum_and_norm() {
        let m = zero_minus_plus();
        let vals = hermitian_eigenvalues(&m).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((vals[0] - h).abs() < 1e-12);
        assert!((vals[1] + h).abs() < 1e-12);
        assert!((schatten1(&m).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn schatten1_basics() {
        assert!((schatten1(&sigma_z()).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(schatten1(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eigen(&m), Err(Error::Invalid(_))));
    }

    #[test]
    fn degenerate_order_is_deterministic() {
        let e = hermitian_eigen(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.vectors, ComplexMatrix::identity(3));
        let e2 = hermitian_eigen(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.vectors, e2.vectors);
    }

    #[test]
    fn json_shape() {
        let m = ComplexMatrix::new(1, 2, vec![c(1.0), Complex64::new(0.0, -2.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"re":[1.0,0.0],"im":[0.0,-2.0]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"re":[1],"im":[0]}"#).is_err());
    }
}
