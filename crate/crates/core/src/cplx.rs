//! Complex scalar and point helpers.

use crate::{Error, Result};
use num_complex::Complex64;

/// Scalar type of every map in the crate.
pub type C = Complex64;

/// A point of ℂⁿ.
pub type Point = Vec<C>;

pub const ZERO: C = Complex64::new(0.0, 0.0);
pub const ONE: C = Complex64::new(1.0, 0.0);
pub const I: C = Complex64::new(0.0, 1.0);

/// Rejects NaN/infinite components at public entry points.
pub fn ensure_finite(z: &[C], context: &'static str) -> Result<()> {
    for c in z {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::NonFinite(context));
        }
    }
    Ok(())
}

pub fn ensure_finite_scalar(c: C, context: &'static str) -> Result<()> {
    if !c.re.is_finite() || !c.im.is_finite() {
        return Err(Error::NonFinite(context));
    }
    Ok(())
}

/// Euclidean norm of a complex point.
pub fn norm(z: &[C]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Max coordinate modulus.
pub fn norm_inf(z: &[C]) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn dist(a: &[C], b: &[C]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[C], b: &[C]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[C], b: &[C]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[C], s: C) -> Point {
    a.iter().map(|x| x * s).collect()
}

/// Hermitian inner product Σ aᵢ·conj(bᵢ).
pub fn inner(a: &[C], b: &[C]) -> C {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Total order on points: lexicographic over (re, im) coordinate pairs.
/// Used wherever deterministic output ordering is required.
pub fn cmp_points(a: &[C], b: &[C]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Diameter of a finite point set.
pub fn diameter(points: &[Point]) -> f64 {
    let mut d = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = f64::max(d, dist(&points[i], &points[j]));
        }
    }
    d
}

/// Minimum pairwise distance; +inf for fewer than two points.
pub fn min_separation(points: &[Point]) -> f64 {
    let mut s = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            s = f64::min(s, dist(&points[i], &points[j]));
        }
    }
    s
}
