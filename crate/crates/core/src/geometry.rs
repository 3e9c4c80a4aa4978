//! Points of the ambient space and similarity maps.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

/// A point of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Point { coords: vec![0.0; dim] }
    }

    pub fn scalar(x: f64) -> Self {
        Point { coords: vec![x] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub(crate) fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coords)
    }

    pub(crate) fn from_vector(v: &DVector<f64>) -> Self {
        Point { coords: v.iter().copied().collect() }
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords)
    }
}

const ORTHOGONALITY_TOL: f64 = 1e-12;

/// `x -> ratio * Q x + translation` with `Q` orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMap {
    ratio: f64,
    orthogonal: DMatrix<f64>,
    translation: DVector<f64>,
}

impl SimilarityMap {
    pub fn new(ratio: f64, orthogonal: DMatrix<f64>, translation: Point) -> Result<Self> {
        if !(ratio > 0.0) || !ratio.is_finite() {
            return invalid(format!("similarity ratio must be positive and finite, got {ratio}"));
        }
        let d = translation.dim();
        if orthogonal.nrows() != d || orthogonal.ncols() != d {
            return invalid(format!(
                "orthogonal part is {}x{} but translation has dimension {d}",
                orthogonal.nrows(),
                orthogonal.ncols()
            ));
        }
        let defect = (orthogonal.transpose() * &orthogonal - DMatrix::identity(d, d)).abs().max();
        if defect > ORTHOGONALITY_TOL {
            return invalid(format!("matrix is not orthogonal (max |Q^T Q - I| = {defect:e})"));
        }
        Ok(SimilarityMap { ratio, orthogonal, translation: translation.to_vector() })
    }

    /// `x -> ratio * x + t` with no rotation.
    pub fn scaling(ratio: f64, translation: Point) -> Result<Self> {
        let d = translation.dim();
        SimilarityMap::new(ratio, DMatrix::identity(d, d), translation)
    }

    pub fn identity(dim: usize) -> Self {
        SimilarityMap { ratio: 1.0, orthogonal: DMatrix::identity(dim, dim), translation: DVector::zeros(dim) }
    }

    /// Planar similarity with rotation by `angle` radians.
    pub fn planar(ratio: f64, angle: f64, translation: [f64; 2]) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        let q = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        SimilarityMap::new(ratio, q, Point::new(translation.to_vec()))
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn orthogonal(&self) -> &DMatrix<f64> {
        &self.orthogonal
    }

    pub fn translation(&self) -> Point {
        Point::from_vector(&self.translation)
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.dim() {
            return invalid(format!("point has dimension {} but map acts on R^{}", x.dim(), self.dim()));
        }
        Ok(Point::from_vector(&self.apply_vector(&x.to_vector())))
    }

    pub(crate) fn apply_vector(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.orthogonal * x * self.ratio + &self.translation
    }

    /// Inverse map: ratio `1/ratio`, rotation `Q^T`, translation `-Q^T t / ratio`.
    pub fn inverse(&self) -> SimilarityMap {
        let qt = self.orthogonal.transpose();
        let translation = -(&qt * &self.translation) / self.ratio;
        SimilarityMap { ratio: 1.0 / self.ratio, orthogonal: qt, translation }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SimilarityMap) -> SimilarityMap {
        SimilarityMap {
            ratio: self.ratio * other.ratio,
            orthogonal: &self.orthogonal * &other.orthogonal,
            translation: self.apply_vector(&other.translation),
        }
    }
}

pub fn apply_similarity(map: &SimilarityMap, x: &Point) -> Result<Point> {
    map.apply(x)
}

pub fn invert_similarity(map: &SimilarityMap) -> SimilarityMap {
    map.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: &Point, b: &[f64]) -> bool {
        a.coords().iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn identity_fixes_points() {
        let x = Point::new(vec![0.3, 0.4]);
        let y = apply_similarity(&SimilarityMap::identity(2), &x).unwrap();
        assert!(close(&y, &[0.3, 0.4]));
    }

    #[test]
    fn translation_of_origin() {
        let t = SimilarityMap::scaling(0.5, Point::new(vec![1.0, 0.0])).unwrap();
        assert!(close(&t.apply(&Point::origin(2)).unwrap(), &[1.0, 0.0]));
    }

    #[test]
    fn quarter_turn_with_half_ratio() {
        let t = SimilarityMap::planar(0.5, FRAC_PI_2, [0.0, 0.0]).unwrap();
        let x = Point::new(vec![1.0, 0.0]);
        let y = t.apply(&x).unwrap();
        assert!(close(&y, &[0.0, 0.5]));
        let o = t.apply(&Point::origin(2)).unwrap();
        assert!((y.distance(&o) - 0.5 * x.norm()).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let t = SimilarityMap::identity(2);
        assert!(matches!(t.apply(&Point::scalar(1.0)), Err(crate::Error::InvalidArgument(_))));
    }

    #[test]
    fn non_orthogonal_matrix_is_rejected() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(SimilarityMap::new(0.5, q, Point::origin(2)).is_err());
    }

    #[test]
    fn inverse_of_identity_is_identity() {
        let inv = invert_similarity(&SimilarityMap::identity(3));
        assert_eq!(inv, SimilarityMap::identity(3));
    }

    #[test]
    fn inverse_of_half_translation() {
        let t = SimilarityMap::scaling(0.5, Point::new(vec![1.0, 0.0])).unwrap();
        let inv = t.inverse();
        assert_eq!(inv.ratio(), 2.0);
        assert!(close(&inv.translation(), &[-2.0, 0.0]));
        for x in [[0.0, 0.0], [0.7, -1.3]] {
            let p = Point::new(x.to_vec());
            assert!(close(&inv.apply(&t.apply(&p).unwrap()).unwrap(), &x));
        }
    }

    #[test]
    fn inverse_rotation_is_transpose() {
        let theta = 0.7;
        let t = SimilarityMap::planar(0.25, theta, [0.1, 0.2]).unwrap();
        let inv = t.inverse();
        let expected = SimilarityMap::planar(4.0, -theta, [0.0, 0.0]).unwrap();
        assert!((inv.orthogonal() - expected.orthogonal()).abs().max() < 1e-15);
        assert_eq!(inv.ratio(), 4.0);
    }
}
