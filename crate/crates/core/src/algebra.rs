//! Commutator residuals for vector operators on a column mask.
//!
//! Equality checks use the Frobenius norm of the residual restricted to the
//! masked columns. Violation checks use the largest masked column norm, a
//! lower bound on the restricted operator norm, so "residual ≥ threshold"
//! certifies a genuine violation.

use num_complex::Complex64;

use crate::error::Result;
use crate::matrix::OperatorMatrix;

const CYCLIC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    /// Frobenius norm of the masked columns.
    Frobenius,
    /// Largest 2-norm among the masked columns.
    MaxColumn,
}

pub fn masked_norm(op: &OperatorMatrix, mask: &[bool], norm: Norm) -> f64 {
    match norm {
        Norm::Frobenius => op.frobenius_on(mask),
        Norm::MaxColumn => op.max_column_norm_on(mask),
    }
}

/// `max_(ijk cyclic) ‖[A_i, A_j] − i B_k‖`; with `B = A` this is the su(2) residual.
pub fn closure_residual(a: &[OperatorMatrix], b: &[OperatorMatrix], mask: &[bool], norm: Norm) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, j, k) in CYCLIC {
        let r = a[i].commutator(&a[j])?.sub(&b[k].scale(Complex64::new(0.0, 1.0)))?;
        worst = worst.max(masked_norm(&r, mask, norm));
    }
    Ok(worst)
}

pub fn su2_residual(a: &[OperatorMatrix], mask: &[bool], norm: Norm) -> Result<f64> {
    closure_residual(a, a, mask, norm)
}

/// `max_(i<j) ‖[A_i, A_j]‖`.
pub fn self_commutator_residual(a: &[OperatorMatrix], mask: &[bool], norm: Norm) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            worst = worst.max(masked_norm(&a[i].commutator(&a[j])?, mask, norm));
        }
    }
    Ok(worst)
}

/// `max_(ij) ‖[A_i, B_j]‖`.
pub fn cross_residual(a: &[OperatorMatrix], b: &[OperatorMatrix], mask: &[bool], norm: Norm) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in a {
        for y in b {
            worst = worst.max(masked_norm(&x.commutator(y)?, mask, norm));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn pauli_half() -> Vec<OperatorMatrix> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let z = c(0.0, 0.0);
        let mats = [
            DMatrix::from_row_slice(2, 2, &[z, c(0.5, 0.0), c(0.5, 0.0), z]),
            DMatrix::from_row_slice(2, 2, &[z, c(0.0, -0.5), c(0.0, 0.5), z]),
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), z, z, c(-0.5, 0.0)]),
        ];
        mats.iter().map(OperatorMatrix::from_dense).collect()
    }

    #[test]
    fn spin_half_is_su2() {
        let s = pauli_half();
        let mask = [true, true];
        assert!(su2_residual(&s, &mask, Norm::Frobenius).unwrap() < 1e-15);
        assert!(self_commutator_residual(&s, &mask, Norm::MaxColumn).unwrap() > 0.4);
    }

    #[test]
    fn doubled_generators_violate() {
        let s: Vec<_> = pauli_half().iter().map(|m| m.scale(Complex64::new(2.0, 0.0))).collect();
        // [2s_x, 2s_y] − i·2s_z = 2i s_z, column norm 1
        let r = su2_residual(&s, &[true, true], Norm::MaxColumn).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn masked_columns_ignored() {
        let s = pauli_half();
        assert_eq!(cross_residual(&s, &s, &[false, false], Norm::Frobenius).unwrap(), 0.0);
    }
}
