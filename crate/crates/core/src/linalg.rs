//! Small dense helpers on top of nalgebra; every matrix here is at most 5x5
//! except the Killing sample matrices.

use nalgebra::{DMatrix, DVector};

/// Inverse together with its 1-norm condition number.
#[derive(Debug, Clone)]
pub struct Inverse {
    pub inverse: DMatrix<f64>,
    pub determinant: f64,
    pub condition: f64,
}

/// Condition numbers above this are flagged in reports.
pub const ILL_CONDITIONED: f64 = 1e8;

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU with partial pivoting; `None` when `|det| <= det_floor`.
pub fn invert(m: &DMatrix<f64>, det_floor: f64) -> Option<Inverse> {
    let lu = m.clone().lu();
    let determinant = lu.determinant();
    if !(determinant.abs() > det_floor) {
        return None;
    }
    let inverse = lu.try_inverse()?;
    let condition = norm1(m) * norm1(&inverse);
    Some(Inverse {
        inverse,
        determinant,
        condition,
    })
}

/// Numerical rank from singular values relative to the largest one.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

pub fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

/// Least-squares solution of `a x = b` for a tall matrix of full column rank,
/// via Householder QR. `None` when `a` is wide or numerically rank deficient.
///
/// nalgebra's SVD with singular vectors loses accuracy on some small
/// structured matrices, so it is avoided here.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let (m, n) = a.shape();
    if m < n || b.len() != m {
        return None;
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let diag_max = r.diagonal().amax();
    if !(diag_max > 0.0) || r.diagonal().iter().any(|d| d.abs() <= 1e-14 * diag_max) {
        return None;
    }
    let qtb = qr.q().transpose() * b;
    r.solve_upper_triangular(&qtb)
}

/// Smallest eigenvalue of `m` measured in a `g`-orthonormal frame, i.e. the
/// smallest `lambda` with `m v = lambda g v`. Requires `g` positive definite.
pub fn min_relative_eigenvalue(m: &DMatrix<f64>, g: &DMatrix<f64>) -> Option<f64> {
    let chol = g.clone().cholesky()?;
    let l_inv = chol.l().try_inverse()?;
    let sym = &l_inv * m * l_inv.transpose();
    let sym = (&sym + sym.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().cloned().reduce(f64::min)
}

/// Counts of strictly positive and strictly negative eigenvalues.
pub fn inertia(m: &DMatrix<f64>) -> (usize, usize) {
    let sym = (m + m.transpose()) * 0.5;
    let ev = sym.symmetric_eigenvalues();
    let pos = ev.iter().filter(|&&x| x > 0.0).count();
    let neg = ev.iter().filter(|&&x| x < 0.0).count();
    (pos, neg)
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_diag() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -4.0, 0.5]));
        let inv = invert(&m, 1e-12).unwrap();
        assert!((inv.inverse[(1, 1)] + 0.25).abs() < 1e-15);
        assert!((inv.determinant + 4.0).abs() < 1e-14);
        assert!((inv.condition - 8.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(invert(&m, 1e-12).is_none());
    }

    #[test]
    fn rank_and_lstsq() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(rank(&a, 1e-12), 2);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = least_squares(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
        let deficient = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert!(least_squares(&deficient, &b).is_none());
    }

    #[test]
    fn lstsq_on_structured_jacobian() {
        // A polar-chart Jacobian on which an SVD-based solve misses by ~1e-3.
        let j = DMatrix::from_row_slice(5, 4, &[
            -0.3829017872285183, 0.0, 0.0, 0.0,
            0.08511373573398692, 0.13224512247931683, -0.03739209213674884, -0.04045771859928338,
            -0.11314166721591075, -0.17579340760280535, 0.0497052985462296, -0.03043536173714049,
            -0.1739436171007085, -0.2702641911979095, -0.05062744550468051, 0.0,
            0.9745246190830333, -0.0801992736641818, 0.0, 0.0,
        ]);
        let x = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        let b = &j * &x;
        let y = least_squares(&j, &b).unwrap();
        assert!((&j * y - b).norm() < 1e-14);
    }

    #[test]
    fn relative_eigenvalue() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]));
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0]));
        assert!((min_relative_eigenvalue(&m, &g).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn inertia_counts() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -2.0, -3.0, 4.0]));
        assert_eq!(inertia(&m), (2, 2));
    }
}
