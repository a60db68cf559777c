//! Pseudo-Euclidean ambient spaces and the quadrics embedded in them.
//!
//! Coordinates are always ordered `(xi0, xi1, ..., xi_{n-1})`; the sign of each
//! axis lives in the [`Signature`], so the hyperboloid and its Wick-rotated
//! sphere differ only in the sign attached to `xi0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};

/// Diagonal flat metric, one `+1`/`-1` per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    signs: Vec<i8>,
}

impl Signature {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.len() < 2 {
            return Err(GeomError::InvalidSignature(format!(
                "need at least 2 axes, got {}",
                signs.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(GeomError::InvalidSignature(format!(
                "entries must be +1 or -1, got {signs:?}"
            )));
        }
        if !signs.contains(&1) {
            return Err(GeomError::InvalidSignature(
                "at least one positive axis is required".into(),
            ));
        }
        Ok(Signature { signs })
    }

    /// All-plus signature of dimension `n`.
    pub fn euclidean(n: usize) -> Self {
        Signature::new(vec![1; n]).expect("euclidean signature is valid")
    }

    /// `(-, +, ..., +)` with the negative axis first.
    pub fn lorentzian(n: usize) -> Self {
        let mut signs = vec![1; n];
        signs[0] = -1;
        Signature::new(signs).expect("lorentzian signature is valid")
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, axis: usize) -> f64 {
        f64::from(self.signs[axis])
    }

    /// `(positive, negative)` axis counts.
    pub fn counts(&self) -> (usize, usize) {
        let pos = self.signs.iter().filter(|&&s| s > 0).count();
        (pos, self.signs.len() - pos)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.signs.iter().map(|&s| f64::from(s)),
        ))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// A point (or vector) of the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint(pub Vec<f64>);

impl AmbientPoint {
    pub fn new(xi: Vec<f64>) -> Self {
        AmbientPoint(xi)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

impl std::ops::Index<usize> for AmbientPoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `sum_A sign_A a^A b^A`.
pub fn flat_inner(sig: &Signature, a: &[f64], b: &[f64]) -> Result<f64> {
    sig.check_dim(a.len())?;
    sig.check_dim(b.len())?;
    Ok(sig
        .signs
        .iter()
        .zip(a.iter().zip(b))
        .map(|(&s, (x, y))| f64::from(s) * (x * y))
        .sum())
}

/// Level set `<xi, xi> = R^2` of the flat quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadric {
    signature: Signature,
    radius: f64,
}

impl Quadric {
    pub fn new(signature: Signature, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeomError::InvalidRadius(radius));
        }
        Ok(Quadric { signature, radius })
    }

    /// Round sphere of radius `R` in Euclidean `n`-space.
    pub fn sphere(n: usize, radius: f64) -> Result<Self> {
        Quadric::new(Signature::euclidean(n), radius)
    }

    /// One-sheeted hyperboloid `-xi0^2 + xi1^2 + ... = R^2`.
    pub fn hyperboloid(n: usize, radius: f64) -> Result<Self> {
        Quadric::new(Signature::lorentzian(n), radius)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.signature.dim()
    }

    /// `<p, p> - R^2`; zero exactly on the quadric.
    pub fn residual(&self, p: &[f64]) -> Result<f64> {
        Ok(flat_inner(&self.signature, p, p)? - self.radius * self.radius)
    }
}

/// Free-function form of [`Quadric::residual`].
pub fn constraint_residual(q: &Quadric, p: &AmbientPoint) -> Result<f64> {
    q.residual(p.coords())
}

/// Rotation by `angle` in the `(a, b)` plane; an isometry when both axes share a sign.
pub fn plane_rotation(n: usize, a: usize, b: usize, angle: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    let (s, c) = angle.sin_cos();
    m[(a, a)] = c;
    m[(b, b)] = c;
    m[(a, b)] = -s;
    m[(b, a)] = s;
    m
}

/// Boost with rapidity `rapidity` in the `(a, b)` plane; an isometry when the signs differ.
pub fn plane_boost(n: usize, a: usize, b: usize, rapidity: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    let (s, c) = (rapidity.sinh(), rapidity.cosh());
    m[(a, a)] = c;
    m[(b, b)] = c;
    m[(a, b)] = s;
    m[(b, a)] = s;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lor5() -> Signature {
        Signature::lorentzian(5)
    }

    #[test]
    fn flat_inner_examples() {
        let e0 = [1.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(flat_inner(&Signature::euclidean(5), &e0, &e0).unwrap(), 1.0);
        assert_eq!(flat_inner(&lor5(), &e0, &e0).unwrap(), -1.0);
        let a = [3.0, 4.0, 0.0, 0.0, 0.0];
        assert_eq!(flat_inner(&lor5(), &a, &a).unwrap(), 7.0);
    }

    #[test]
    fn flat_inner_dimension_mismatch() {
        let err = flat_inner(&lor5(), &[1.0, 2.0], &[1.0, 2.0]).unwrap_err();
        assert_eq!(
            err,
            GeomError::DimensionMismatch {
                expected: 5,
                found: 2
            }
        );
    }

    #[test]
    fn residual_examples() {
        let h = Quadric::hyperboloid(5, 1.0).unwrap();
        assert_eq!(h.residual(&[0.0, 1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(h.residual(&[1.0, 1.0, 0.0, 0.0, 0.0]).unwrap(), -1.0);
        let s = Quadric::sphere(5, 2.0).unwrap();
        assert_eq!(
            constraint_residual(&s, &AmbientPoint::new(vec![0.0, 0.0, 0.0, 0.0, 2.0])).unwrap(),
            0.0
        );
    }

    #[test]
    fn signature_validation() {
        assert!(Signature::new(vec![1]).is_err());
        assert!(Signature::new(vec![-1, -1, -1]).is_err());
        assert!(Signature::new(vec![1, 0, 1]).is_err());
        assert_eq!(Signature::new(vec![-1, 1, 1]).unwrap().counts(), (2, 1));
    }

    #[test]
    fn quadric_rejects_bad_radius() {
        assert!(Quadric::sphere(3, 0.0).is_err());
        assert!(Quadric::sphere(3, f64::NAN).is_err());
        assert!(Quadric::hyperboloid(3, -1.0).is_err());
    }

    #[test]
    fn rotation_and_boost_preserve_form() {
        let sig = lor5();
        let eta = sig.matrix();
        for m in [
            plane_rotation(5, 1, 3, 0.7),
            plane_rotation(5, 2, 4, -2.1),
            plane_boost(5, 0, 2, 0.9),
            plane_boost(5, 0, 4, -1.3),
        ] {
            let d = m.transpose() * &eta * &m - &eta;
            assert!(d.amax() < 1e-14);
        }
    }
}
