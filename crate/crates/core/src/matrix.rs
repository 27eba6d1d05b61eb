//! Sparse complex operator matrices (CSR) with exact-zero pruning and the
//! restricted norms used for truncation-aware residuals.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};

type C64 = Complex64;

/// Square sparse complex matrix. Exact zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    mat: CsMat<C64>,
}

impl OperatorMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut tri = TriMat::new((dim, dim));
        for (r, c, v) in entries {
            if v != C64::new(0.0, 0.0) {
                tri.add_triplet(r, c, v);
            }
        }
        Self::from_csr(tri.to_csr())
    }

    fn from_csr(mat: CsMat<C64>) -> Self {
        let zero = C64::new(0.0, 0.0);
        if mat.data().iter().all(|v| *v != zero) {
            return Self { mat };
        }
        let dim = mat.rows();
        let mut tri = TriMat::new((dim, dim));
        for (v, (r, c)) in mat.iter() {
            if *v != zero {
                tri.add_triplet(r, c, *v);
            }
        }
        Self { mat: tri.to_csr() }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: CsMat::zero((dim, dim)) }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, C64::new(1.0, 0.0))))
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, v)| (i, i, *v)))
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator matrices are square");
        let n = m.nrows();
        Self::from_triplets(n, (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| (r, c, m[(r, c)])))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn nnz(&self) -> usize {
        self.mat.nnz()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat.get(row, col).copied().unwrap_or_default()
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.mat.iter().map(|(v, (r, c))| (r, c, *v))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_csr(&self.mat + &other.mat))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_csr(&self.mat - &other.mat))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_csr(&self.mat * &other.mat))
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == C64::new(0.0, 0.0) {
            return Self::zeros(self.dim());
        }
        Self { mat: self.mat.map(|v| v * s) }
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let t = self.mat.transpose_view().to_csr();
        Self { mat: t.map(|v| v.conj()) }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let m = other.dim();
        let dim = self.dim() * m;
        let entries: Vec<_> = self
            .entries()
            .flat_map(|(r1, c1, v1)| other.entries().map(move |(r2, c2, v2)| (r1 * m + r2, c1 * m + c2, v1 * v2)))
            .collect();
        Self::from_triplets(dim, entries)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (row, vec) in self.mat.outer_iterator().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (col, a) in vec.iter() {
                acc += a * v[col];
            }
            out[row] = acc;
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.data().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the columns selected by `mask`.
    pub fn frobenius_on(&self, mask: &[bool]) -> f64 {
        self.entries().filter(|(_, c, _)| mask[*c]).map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest 2-norm among the columns selected by `mask`; a lower bound on
    /// the operator norm restricted to that subspace.
    pub fn max_column_norm_on(&self, mask: &[bool]) -> f64 {
        let mut cols = vec![0.0f64; self.dim()];
        for (_, c, v) in self.entries() {
            cols[c] += v.norm_sqr();
        }
        cols.iter().zip(mask).filter(|(_, m)| **m).map(|(s, _)| s.sqrt()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut d = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.entries() {
            d[(r, c)] = v;
        }
        d
    }

    /// Writes `row,col,re,im` lines for every stored entry; absent entries are zero.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row", "col", "re", "im"])?;
        for (r, c, v) in self.entries() {
            w.write_record([r.to_string(), c.to_string(), format!("{:e}", v.re), format!("{:e}", v.im)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`OperatorMatrix::write_csv`].
    pub fn read_csv<R: std::io::Read>(dim: usize, input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut entries = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse("short csv record".into()));
            let r: usize = field(0)?.trim().parse().map_err(|_| Error::Parse("row".into()))?;
            let c: usize = field(1)?.trim().parse().map_err(|_| Error::Parse("col".into()))?;
            let re: f64 = field(2)?.trim().parse().map_err(|_| Error::Parse("re".into()))?;
            let im: f64 = field(3)?.trim().parse().map_err(|_| Error::Parse("im".into()))?;
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.max(c) + 1 });
            }
            entries.push((r, c, C64::new(re, im)));
        }
        Ok(Self::from_triplets(dim, entries))
    }
}

/// Sum of a list of equally sized operators.
pub fn sum_ops<'a>(dim: usize, ops: impl IntoIterator<Item = &'a OperatorMatrix>) -> Result<OperatorMatrix> {
    let mut acc = OperatorMatrix::zeros(dim);
    for op in ops {
        acc = acc.add(op)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> OperatorMatrix {
        OperatorMatrix::from_triplets(3, [(0, 1, c(1.0, 2.0)), (2, 0, c(-0.5, 0.0)), (1, 1, c(0.0, 1.0))])
    }

    #[test]
    fn identity_commutes() {
        let a = sample();
        let i = OperatorMatrix::identity(3);
        assert_eq!(i.commutator(&a).unwrap().nnz(), 0);
    }

    #[test]
    fn commutator_antisymmetric() {
        let a = sample();
        let b = a.adjoint().scale(c(0.3, -1.0));
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        assert_eq!(ab.add(&ba).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn exact_zeros_pruned() {
        let a = sample();
        assert_eq!(a.sub(&a).unwrap().nnz(), 0);
    }

    #[test]
    fn adjoint_matches_dense() {
        let a = sample();
        assert_eq!(a.adjoint().to_dense(), a.to_dense().adjoint());
    }

    #[test]
    fn kron_matches_dense() {
        let a = sample();
        let b = OperatorMatrix::from_triplets(2, [(0, 1, c(1.0, 0.0)), (1, 0, c(0.0, 1.0))]);
        let k = a.kron(&b).to_dense();
        assert_eq!(k, a.to_dense().kronecker(&b.to_dense()));
    }

    #[test]
    fn dimension_mismatch() {
        let a = sample();
        let b = OperatorMatrix::identity(2);
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch { .. })));
        assert!(a.apply(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn restricted_norms() {
        let a = OperatorMatrix::from_triplets(2, [(0, 0, c(3.0, 0.0)), (1, 0, c(0.0, 4.0)), (0, 1, c(1.0, 0.0))]);
        assert_eq!(a.frobenius_on(&[true, false]), 5.0);
        assert_eq!(a.max_column_norm_on(&[true, true]), 5.0);
        assert_eq!(a.max_column_norm_on(&[false, true]), 1.0);
    }

    #[test]
    fn csv_roundtrip() {
        let a = sample();
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("row,col,re,im\n"));
        assert_eq!(OperatorMatrix::read_csv(3, buf.as_slice()).unwrap(), a);
    }
}
