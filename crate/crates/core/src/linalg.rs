//! Small dense complex linear algebra.
//!
//! Matrices are stored row-major; `as_slice` is the row-major vectorization
//! used by every vec/unvec identity in the crate, so that
//! `vec(a * x * b) = kron(a, b^T) * vec(x)`.
//! Decompositions (SVD, Schur, LU) delegate to nalgebra.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};

/// Default relative tolerance used when the caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("ragged matrix rows"));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    /// Real literal, panics on ragged input. Intended for constants.
    pub fn real(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix literal");
        Self::from_fn(rows.len(), cols, |i, j| C64::from(rows[i][j]))
    }

    /// Complex literal, panics on ragged input.
    pub fn complex(rows: &[&[C64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix literal");
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn diag(d: &[C64]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i] } else { ZERO })
    }

    /// Matrix-unit E_ij of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major vectorization.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    /// Reinterprets the row-major entries with a new shape.
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<Self> {
        Self::from_vec(rows, cols, self.data.clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    /// Checked product.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[l * m..(l + 1) * m];
                let dst = &mut out[i * m..(i + 1) * m];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Self { rows: n, cols: m, data: out }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn det(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(invalid("determinant of a non-square matrix"));
        }
        Ok(match self.rows {
            0 => ONE,
            1 => self.data[0],
            2 => self.data[0] * self.data[3] - self.data[1] * self.data[2],
            _ => self.to_na().determinant(),
        })
    }

    /// True when the smallest singular value exceeds `tol` times the largest.
    pub fn is_regular(&self, tol: f64) -> bool {
        if !self.is_square() || self.rows == 0 {
            return false;
        }
        let sv = self.singular_values();
        sv[0] > 0.0 && sv[sv.len() - 1] > tol * sv[0]
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(invalid("inverse of a non-square matrix"));
        }
        if !self.is_regular(1e-13) {
            return Err(invalid("matrix is singular"));
        }
        self.to_na()
            .try_inverse()
            .map(|m| Self::from_na(&m))
            .ok_or_else(|| invalid("matrix is singular"))
    }

    /// Integer power of a square matrix by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.data.is_empty() {
            return Vec::new();
        }
        let mut sv: Vec<f64> = self.to_na().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Moore-Penrose pseudo-inverse; singular values below `tol·σ_max` are dropped.
    pub fn pinv(&self, tol: f64) -> Result<Self> {
        let smax = self.singular_values().first().copied().unwrap_or(0.0);
        let eps = (tol * smax).max(f64::MIN_POSITIVE);
        self.to_na()
            .pseudo_inverse(eps)
            .map(|m| Self::from_na(&m))
            .map_err(|e| Error::Numerical(e.to_string()))
    }

    /// Orthonormal basis of the right null space: singular vectors whose
    /// singular value is at most `tol·max(σ_max, 1)`.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<C64>> {
        let (sv, vh) = full_svd_right(self);
        let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
        sv.iter()
            .enumerate()
            .filter(|(_, &s)| s <= tol * scale)
            .map(|(k, _)| vh[k].clone())
            .collect()
    }

    pub fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_na(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Relative Frobenius distance `‖self − other‖ / max(‖other‖, tiny)`.
    pub fn rel_dist(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        let diff: Vec<C64> = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        norm(&diff) / other.frobenius_norm().max(f64::MIN_POSITIVE)
    }
}

/// Full right singular basis, padding with zero rows so `V` is square.
/// Returns (σ sorted descending with zeros appended, rows of V^H in the same order).
fn full_svd_right(m: &CMatrix) -> (Vec<f64>, Vec<Vec<C64>>) {
    let n = m.cols;
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let padded_rows = m.rows.max(n);
    let mut a = DMatrix::<C64>::zeros(padded_rows, n);
    for i in 0..m.rows {
        for j in 0..n {
            a[(i, j)] = m[(i, j)];
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&p, &q| svd.singular_values[q].total_cmp(&svd.singular_values[p]));
    let sv = idx.iter().map(|&k| svd.singular_values[k]).collect();
    let rows = idx.iter().map(|&k| (0..n).map(|j| vt[(k, j)].conj()).collect()).collect();
    (sv, rows)
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Mul<C64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: C64) -> CMatrix {
        self.scale(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-ONE)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; entry `(i·rows_b + k, j·cols_b + l) = a_ij b_kl`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = b.shape();
    CMatrix::from_fn(a.rows * br, a.cols * bc, |r, s| a[(r / br, s / bc)] * b[(r % br, s % bc)])
}

/// Number of singular values above `tol` times the largest one.
pub fn rank(m: &CMatrix, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(invalid("rank tolerance must be positive"));
    }
    if !m.is_finite() {
        return Err(invalid("rank of a matrix with non-finite entries"));
    }
    let sv = m.singular_values();
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * smax).count())
}

/// Eigenvalues with multiplicity, read off the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(invalid("eigenvalues of a non-square matrix"));
    }
    if !m.is_finite() {
        return Err(invalid("eigenvalues of a matrix with non-finite entries"));
    }
    if m.rows == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m.to_na(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..m.rows).map(|i| t[(i, i)]).collect())
}

/// An eigenvalue cluster with its algebraic multiplicity and an orthonormal
/// basis of the (numerical) eigenspace.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub value: C64,
    pub multiplicity: usize,
    pub basis: Vec<Vec<C64>>,
}

/// Groups eigenvalues into clusters and computes each eigenspace as the
/// null space of `M − λ𝟙`. A defective cluster yields fewer basis vectors
/// than its multiplicity; at least one vector is always returned.
pub fn eigenspaces(m: &CMatrix, tol: f64) -> Result<Vec<Eigenspace>> {
    let vals = eigenvalues(m)?;
    let n = m.rows;
    let scale = m.frobenius_norm().max(1.0);
    let cluster_tol = 1e-7 * scale;
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for v in vals {
        match clusters.iter_mut().find(|cl| cl.iter().any(|w| (w - v).norm() <= cluster_tol)) {
            Some(cl) => cl.push(v),
            None => clusters.push(vec![v]),
        }
    }
    clusters.sort_by(|a, b| {
        let (x, y) = (mean(a), mean(b));
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    let mut out = Vec::with_capacity(clusters.len());
    for cl in clusters {
        let lambda = mean(&cl);
        let shifted = m - &CMatrix::identity(n).scale(lambda);
        let (sv, vh) = full_svd_right(&shifted);
        let thresh = tol * scale;
        let mut basis: Vec<Vec<C64>> = sv
            .iter()
            .enumerate()
            .rev()
            .take(cl.len())
            .filter(|(_, &s)| s <= thresh)
            .map(|(k, _)| vh[k].clone())
            .collect();
        if basis.is_empty() {
            basis.push(vh[n - 1].clone());
        }
        out.push(Eigenspace { value: lambda, multiplicity: cl.len(), basis });
    }
    Ok(out)
}

fn mean(v: &[C64]) -> C64 {
    v.iter().sum::<C64>() / v.len() as f64
}

/// Eigenvalue/unit-eigenvector pairs, one per eigenvalue counted with
/// algebraic multiplicity. Inside a defective cluster the available
/// eigenvectors are reused cyclically.
pub fn eigenpairs(m: &CMatrix, tol: f64) -> Result<Vec<(C64, Vec<C64>)>> {
    let spaces = eigenspaces(m, tol)?;
    let mut out = Vec::with_capacity(m.rows);
    for sp in spaces {
        for k in 0..sp.multiplicity {
            out.push((sp.value, sp.basis[k % sp.basis.len()].clone()));
        }
    }
    Ok(out)
}

/// Outcome of a proportionality test `u ≈ s·v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropResult {
    pub proportional: bool,
    /// Least-squares scalar; `None` when not proportional.
    pub scalar: Option<C64>,
    /// `min_s ‖u − s v‖ / max(‖u‖, ‖v‖)`.
    pub residual: f64,
}

impl PropResult {
    pub fn scalar_or_zero(&self) -> C64 {
        self.scalar.unwrap_or(ZERO)
    }
}

/// Tests `u ∝ v`. Two zero vectors count as proportional with scalar 1;
/// a nonzero `u` against a zero `v` is not proportional.
pub fn prop_check(u: &[C64], v: &[C64], tol: f64) -> PropResult {
    if u.len() != v.len() {
        return PropResult { proportional: false, scalar: None, residual: f64::INFINITY };
    }
    let (nu, nv) = (norm(u), norm(v));
    if nv == 0.0 {
        return if nu == 0.0 {
            PropResult { proportional: true, scalar: Some(ONE), residual: 0.0 }
        } else {
            PropResult { proportional: false, scalar: None, residual: 1.0 }
        };
    }
    let s = inner(v, u) / (nv * nv);
    let resid: f64 = u.iter().zip(v).map(|(a, b)| (a - s * b).norm_sqr()).sum::<f64>().sqrt();
    let rel = resid / nu.max(nv);
    let ok = rel <= tol;
    PropResult { proportional: ok, scalar: ok.then_some(s), residual: rel }
}

/// Conjugate-linear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn sigma1() -> CMatrix {
    CMatrix::real(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn sigma2() -> CMatrix {
    CMatrix::complex(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn sigma3() -> CMatrix {
    CMatrix::real(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// `σ₁^k` for k ∈ {0, 1}.
pub fn sigma1_pow(k: usize) -> CMatrix {
    if k % 2 == 1 {
        sigma1()
    } else {
        CMatrix::identity(2)
    }
}

/// Unnormalized Hadamard `H_ij = (−1)^{ij}`.
pub fn hadamard() -> CMatrix {
    CMatrix::real(&[&[1.0, 1.0], &[1.0, -1.0]])
}

/// `P_z = diag(z, 1/z)`.
pub fn p_mat(z: C64) -> CMatrix {
    CMatrix::diag(&[z, z.inv()])
}

/// Rescales `m` to unit Frobenius norm with its leading significant entry
/// real positive. Returns the normalized matrix and the factor `f` with
/// `m = f · normalized`.
pub fn phase_normalize(m: &[C64]) -> (Vec<C64>, C64) {
    let n = norm(m);
    if n == 0.0 {
        return (m.to_vec(), ONE);
    }
    let big = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = m.iter().find(|z| z.norm() > 1e-6 * big).copied().unwrap_or(ONE);
    let f = lead / lead.norm() * n;
    (m.iter().map(|z| z / f).collect(), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_matrix(seed: u64, n: usize, m: usize) -> CMatrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMatrix::from_fn(n, m, |_, _| c64(next(), next()))
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(rank(&CMatrix::identity(4), 1e-10).unwrap(), 4);
        assert_eq!(rank(&CMatrix::zeros(3, 3), 1e-10).unwrap(), 0);
    }

    #[test]
    fn rank_rejects_non_finite() {
        let mut m = CMatrix::identity(2);
        m[(0, 1)] = c64(f64::NAN, 0.0);
        assert!(matches!(rank(&m, 1e-10), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
        let k = kron(&sigma1(), &sigma3());
        let expect = CMatrix::real(&[
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0, 0.0],
        ]);
        assert_eq!(k, expect);
    }

    #[test]
    fn kron_matches_index_loop() {
        let a = rand_matrix(1, 2, 2);
        let b = rand_matrix(2, 2, 2);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(2 * i + p, 2 * j + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn row_major_vec_identity() {
        let (a, x, b) = (rand_matrix(3, 2, 2), rand_matrix(4, 2, 2), rand_matrix(5, 2, 2));
        let lhs = &(&a * &x) * &b;
        let rhs = kron(&a, &b.transpose()).apply(x.as_slice());
        assert!(prop_check(lhs.as_slice(), &rhs, 1e-12).scalar.unwrap().re > 0.999);
        assert!(norm(&lhs.as_slice().iter().zip(&rhs).map(|(p, q)| p - q).collect::<Vec<_>>()) < 1e-12);
    }

    #[test]
    fn eigenpairs_identity_twice() {
        let pairs = eigenpairs(&CMatrix::identity(2), 1e-10).unwrap();
        assert_eq!(pairs.len(), 2);
        for (l, _) in &pairs {
            assert!((l - ONE).norm() < 1e-12);
        }
        let (v0, v1) = (&pairs[0].1, &pairs[1].1);
        assert!(inner(v0, v1).norm() < 1e-12);
    }

    #[test]
    fn eigenpairs_pauli_x() {
        let pairs = eigenpairs(&sigma1(), 1e-10).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!((pairs[0].0 + ONE).norm() < 1e-12);
        assert!((pairs[1].0 - ONE).norm() < 1e-12);
        let s = 1.0 / 2f64.sqrt();
        let plus = [c64(s, 0.0), c64(s, 0.0)];
        let minus = [c64(s, 0.0), c64(-s, 0.0)];
        assert!(prop_check(&pairs[1].1, &plus, 1e-10).proportional);
        assert!(prop_check(&pairs[0].1, &minus, 1e-10).proportional);
    }

    #[test]
    fn eigenpairs_residuals_random() {
        for seed in 0..20 {
            let m = rand_matrix(seed, 4, 4);
            let pairs = eigenpairs(&m, 1e-10).unwrap();
            assert_eq!(pairs.len(), 4);
            for (l, v) in pairs {
                let mv = m.apply(&v);
                let r: Vec<C64> = mv.iter().zip(&v).map(|(a, b)| a - l * b).collect();
                assert!(norm(&r) <= 1e-10 * m.frobenius_norm().max(1.0));
                assert!((norm(&v) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn defective_block_keeps_multiplicity() {
        let j = CMatrix::real(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let sp = eigenspaces(&j, 1e-10).unwrap();
        assert_eq!(sp.len(), 1);
        assert_eq!(sp[0].multiplicity, 2);
        assert_eq!(sp[0].basis.len(), 1);
        assert_eq!(eigenpairs(&j, 1e-10).unwrap().len(), 2);
    }

    #[test]
    fn eigenpairs_rejects_non_square() {
        assert!(eigenpairs(&CMatrix::zeros(2, 3), 1e-10).is_err());
    }

    #[test]
    fn prop_check_cases() {
        let v = [c64(1.0, 2.0), c64(-0.5, 0.3)];
        let u: Vec<C64> = v.iter().map(|z| z * c64(0.0, 2.0)).collect();
        let r = prop_check(&u, &v, 1e-12);
        assert!(r.proportional);
        assert!((r.scalar.unwrap() - c64(0.0, 2.0)).norm() < 1e-14);
        assert!(!prop_check(&[ONE, ZERO], &[ZERO, ONE], 1e-10).proportional);
        let z = prop_check(&[ZERO, ZERO], &[ZERO, ZERO], 1e-10);
        assert!(z.proportional && z.scalar == Some(ONE));
        assert!(!prop_check(&[ONE, ZERO], &[ZERO, ZERO], 1e-10).proportional);
    }

    #[test]
    fn inverse_and_det() {
        let m = rand_matrix(9, 3, 3);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).rel_dist(&CMatrix::identity(3)) < 1e-12);
        let d = m.det().unwrap();
        let prod: C64 = eigenvalues(&m).unwrap().iter().product();
        assert!((d - prod).norm() < 1e-10 * d.norm().max(1.0));
        assert!(CMatrix::zeros(2, 2).inverse().is_err());
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let m = rand_matrix(11, 2, 4);
        let ns = m.nullspace(1e-10);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(norm(&m.apply(&v)) < 1e-12);
        }
    }

    #[test]
    fn power_by_squaring() {
        let m = rand_matrix(12, 2, 2).scale(c64(0.5, 0.0));
        let mut naive = CMatrix::identity(2);
        for _ in 0..13 {
            naive = &naive * &m;
        }
        assert!(m.pow(13).rel_dist(&naive) < 1e-12);
    }

    #[test]
    fn phase_normalize_is_gauge_fixing() {
        let m = rand_matrix(13, 2, 2);
        let (a, f) = phase_normalize(m.as_slice());
        let (b, _) = phase_normalize(m.scale(c64(-0.3, 1.7)).as_slice());
        assert!(norm(&a.iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>()) < 1e-13);
        assert!((norm(&a) - 1.0).abs() < 1e-14);
        let back: Vec<C64> = a.iter().map(|z| z * f).collect();
        assert!(prop_check(&back, m.as_slice(), 1e-14).scalar.unwrap().re > 0.9999);
    }
}
