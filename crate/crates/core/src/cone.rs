//! Membership tests for the two self-dual cones used by the certifiers:
//! the nonnegative orthant and the cone of symmetric PSD matrices.
//!
//! Both cones are self-dual, so the dual-interior test is the same as an
//! interior test with a positive margin.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, DenseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeId {
    NonnegOrthant(usize),
    Psd(usize),
}

impl ConeId {
    pub fn dim(&self) -> usize {
        match *self {
            ConeId::NonnegOrthant(d) | ConeId::Psd(d) => d,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum ConeElement<'a> {
    Vector(&'a [f64]),
    Matrix(&'a DenseMatrix),
}

impl<'a> From<&'a [f64]> for ConeElement<'a> {
    fn from(v: &'a [f64]) -> Self {
        ConeElement::Vector(v)
    }
}

impl<'a> From<&'a Vec<f64>> for ConeElement<'a> {
    fn from(v: &'a Vec<f64>) -> Self {
        ConeElement::Vector(v)
    }
}

impl<'a> From<&'a DenseMatrix> for ConeElement<'a> {
    fn from(m: &'a DenseMatrix) -> Self {
        ConeElement::Matrix(m)
    }
}

/// The "smallest coordinate" of `v` with respect to the cone: minimum entry
/// for the orthant, minimum eigenvalue of the symmetrized matrix for PSD.
fn min_coordinate(cone: ConeId, v: ConeElement<'_>) -> Result<f64> {
    if cone.dim() == 0 {
        return Err(Error::input("cone dimension must be at least 1"));
    }
    match (cone, v) {
        (ConeId::NonnegOrthant(d), ConeElement::Vector(x)) => {
            if x.len() != d {
                return Err(Error::dims("orthant element", d, x.len()));
            }
            Ok(x.iter().copied().fold(f64::INFINITY, f64::min))
        }
        (ConeId::Psd(d), ConeElement::Matrix(m)) => {
            if m.shape() != (d, d) {
                return Err(Error::dims(
                    "PSD cone element",
                    format!("{d}x{d}"),
                    format!("{}x{}", m.rows(), m.cols()),
                ));
            }
            let vals = symmetric_eigenvalues(m)?;
            Ok(vals[0])
        }
        (ConeId::NonnegOrthant(_), ConeElement::Matrix(_)) => {
            Err(Error::input("orthant membership expects a vector"))
        }
        (ConeId::Psd(_), ConeElement::Vector(_)) => {
            Err(Error::input("PSD membership expects a symmetric matrix"))
        }
    }
}

/// `true` iff `v` lies in the cone up to `tol`.
pub fn in_cone<'a>(cone: ConeId, v: impl Into<ConeElement<'a>>, tol: f64) -> Result<bool> {
    if !(tol >= 0.0) {
        return Err(Error::input(format!("tolerance must be nonnegative, got {tol}")));
    }
    Ok(min_coordinate(cone, v.into())? >= -tol)
}

/// `true` iff `v` lies in the interior of the dual cone with at least `margin`
/// clearance from its boundary.
pub fn in_dual_interior<'a>(cone: ConeId, v: impl Into<ConeElement<'a>>, margin: f64) -> Result<bool> {
    if !(margin > 0.0) {
        return Err(Error::input(format!("interior margin must be positive, got {margin}")));
    }
    Ok(min_coordinate(cone, v.into())? >= margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn orthant_membership() {
        assert!(in_cone(ConeId::NonnegOrthant(2), &vec![0.0, 0.0], 0.0).unwrap());
        assert!(!in_cone(ConeId::NonnegOrthant(2), &vec![1.0, -1e-3], 1e-6).unwrap());
        assert!(in_dual_interior(ConeId::NonnegOrthant(3), &vec![1.0, 1.0, 1.0], 1e-6).unwrap());
    }

    #[test]
    fn psd_membership() {
        let indefinite = mat(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(!in_cone(ConeId::Psd(2), &indefinite, 1e-9).unwrap());
        assert!(in_dual_interior(ConeId::Psd(2), &DenseMatrix::identity(2), 0.5).unwrap());
        let singular = mat(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(!in_dual_interior(ConeId::Psd(2), &singular, 1e-9).unwrap());
        assert!(in_cone(ConeId::Psd(2), &singular, 0.0).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_error() {
        assert!(in_cone(ConeId::NonnegOrthant(3), &vec![1.0], 0.0).is_err());
        assert!(in_cone(ConeId::Psd(3), &DenseMatrix::identity(2), 0.0).is_err());
        assert!(in_cone(ConeId::Psd(2), &vec![1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn asymmetric_psd_input_rejected() {
        let m = mat(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(in_cone(ConeId::Psd(2), &m, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn interior_implies_member(v in prop::collection::vec(-2.0f64..2.0, 3), m in 1e-6f64..1.0) {
            let c = ConeId::NonnegOrthant(3);
            if in_dual_interior(c, &v, m).unwrap() {
                prop_assert!(in_cone(c, &v, 0.0).unwrap());
            }
        }

        #[test]
        fn membership_is_scale_invariant(entries in prop::collection::vec(-1.0f64..1.0, 3), alpha in 0.01f64..100.0) {
            let a = mat(&[&[entries[0], entries[1]], &[entries[1], entries[2]]]);
            let scaled = a.scale(alpha);
            // Boundary cases are ambiguous in floating point; skip near-singular draws.
            let d = entries[0] * entries[2] - entries[1] * entries[1];
            prop_assume!(d.abs() > 1e-9);
            prop_assert_eq!(
                in_cone(ConeId::Psd(2), &a, 0.0).unwrap(),
                in_cone(ConeId::Psd(2), &scaled, 0.0).unwrap()
            );
            let v = entries.clone();
            let sv: Vec<f64> = v.iter().map(|x| x * alpha).collect();
            prop_assert_eq!(
                in_cone(ConeId::NonnegOrthant(3), &v, 0.0).unwrap(),
                in_cone(ConeId::NonnegOrthant(3), &sv, 0.0).unwrap()
            );
        }

        #[test]
        fn psd_test_matches_eigenvalue_sign(entries in prop::collection::vec(-1.0f64..1.0, 6)) {
            let a = mat(&[
                &[entries[0], entries[1], entries[2]],
                &[entries[1], entries[3], entries[4]],
                &[entries[2], entries[4], entries[5]],
            ]);
            let min = symmetric_eigenvalues(&a).unwrap()[0];
            prop_assume!(min.abs() > 1e-9);
            prop_assert_eq!(in_cone(ConeId::Psd(3), &a, 0.0).unwrap(), min > 0.0);
        }
    }
}
