//! Worked example maps: curve involutions over polynomial and Blaschke
//! branches, reflections of a periodically punctured plane, and the
//! coordinate-wise inversion of a product of annuli.

use crate::cplx::{self, Point, C};
use crate::poly::MultiPoly;
use crate::solver::{self, DiffMap, PointSet};
use crate::{tol, Error, Result};
use nalgebra::DMatrix;

/// Finite Blaschke product with stored zeros and a truncation count.
#[derive(Clone, Debug)]
pub struct BlaschkeProduct {
    zeros: Vec<C>,
    truncation: usize,
}

impl BlaschkeProduct {
    /// Keeps the first `truncation` zeros; all zeros must be interior to the
    /// unit disc.
    pub fn new(zeros: Vec<C>, truncation: usize) -> Result<Self> {
        if truncation == 0 || truncation > zeros.len() {
            return Err(Error::BadInput(format!(
                "truncation must lie in 1..={}",
                zeros.len()
            )));
        }
        for z in &zeros {
            cplx::ensure_finite_scalar(*z, "blaschke zero")?;
            if z.norm() >= 1.0 - tol::INTERIOR_MARGIN {
                return Err(Error::NotInterior(z.norm()));
            }
        }
        Ok(BlaschkeProduct { zeros, truncation })
    }

    pub fn zeros_used(&self) -> &[C] {
        &self.zeros[..self.truncation]
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Evaluates the product of factors (|a|/a)·(a − x)/(1 − ā x); a zero at
    /// the origin contributes the factor x.
    pub fn eval(&self, x: C) -> Result<C> {
        cplx::ensure_finite_scalar(x, "blaschke argument")?;
        if x.norm() >= 1.0 {
            return Err(Error::NotInterior(x.norm()));
        }
        let mut acc = cplx::ONE;
        for &a in self.zeros_used() {
            acc *= blaschke_factor(a, x);
        }
        Ok(acc)
    }
}

pub fn blaschke_factor(a: C, x: C) -> C {
    if a == cplx::ZERO {
        x
    } else {
        let unimodular = C::new(a.norm(), 0.0) / a;
        unimodular * (a - x) / (cplx::ONE - a.conj() * x)
    }
}

/// The branch data of a curve y² = B(x).
#[derive(Clone, Debug)]
pub enum CurveBranch {
    Polynomial(MultiPoly),
    Blaschke(BlaschkeProduct),
}

/// The involution (x, y) ↦ (x, −y) restricted to the curve y² = B(x).
#[derive(Clone, Debug)]
pub struct CurveInvolution {
    branch: CurveBranch,
}

impl CurveInvolution {
    pub fn from_branch_roots(roots: &[C]) -> Result<Self> {
        Ok(CurveInvolution {
            branch: CurveBranch::Polynomial(MultiPoly::from_roots(1, 0, roots)?),
        })
    }

    pub fn from_polynomial(p: MultiPoly) -> Result<Self> {
        if p.as_univariate().is_none() || p.degree() == 0 {
            return Err(Error::BadInput(
                "branch polynomial must be univariate of degree >= 1".into(),
            ));
        }
        Ok(CurveInvolution {
            branch: CurveBranch::Polynomial(p),
        })
    }

    pub fn from_blaschke(b: BlaschkeProduct) -> Self {
        CurveInvolution {
            branch: CurveBranch::Blaschke(b),
        }
    }

    /// The involution itself; exact by construction.
    pub fn apply(&self, p: &[C; 2]) -> [C; 2] {
        [p[0], -p[1]]
    }

    /// Residual |y² − B(x)| of curve membership.
    pub fn on_curve_residual(&self, p: &[C; 2]) -> Result<f64> {
        let b = match &self.branch {
            CurveBranch::Polynomial(q) => q.eval(&[p[0]])?,
            CurveBranch::Blaschke(b) => b.eval(p[0])?,
        };
        Ok((p[1] * p[1] - b).norm())
    }

    /// Fixed points of the involution on the curve: y = 0 forces B(x) = 0,
    /// so they are exactly the branch zeros paired with 0.
    pub fn fixed_points(&self) -> Result<PointSet> {
        let zeros: Vec<C> = match &self.branch {
            CurveBranch::Polynomial(p) => solver::univariate_roots(p)?
                .into_iter()
                .map(|r| r.value)
                .collect(),
            CurveBranch::Blaschke(b) => b.zeros_used().to_vec(),
        };
        let pts: Vec<Point> = zeros.into_iter().map(|x| vec![x, cplx::ZERO]).collect();
        Ok(PointSet::from_points(pts, tol::DEDUP_TOL))
    }
}

/// The reflection z ↦ −z + (2k + 1) of the plane punctured by the closed
/// discs of radius 1/3 around the integers. Swaps the discs pairwise and
/// fixes exactly k + 1/2.
#[derive(Clone, Copy, Debug)]
pub struct StripReflection {
    pub k: i64,
}

impl StripReflection {
    pub fn new(k: i64) -> Self {
        StripReflection { k }
    }

    pub fn eval(&self, z: C) -> C {
        -z + C::new(2.0 * self.k as f64 + 1.0, 0.0)
    }

    /// Membership in ℂ minus the closed discs Δ(n, 1/3), n ∈ ℤ.
    pub fn domain_contains(&self, z: C) -> bool {
        let nearest = z.re.round();
        (z - C::new(nearest, 0.0)).norm() > 1.0 / 3.0
    }

    pub fn fixed_point(&self) -> C {
        C::new(self.k as f64 + 0.5, 0.0)
    }

    /// Index arithmetic behind domain invariance: the disc around n maps onto
    /// the disc around 2k + 1 − n.
    pub fn disc_image_index(&self, n: i64) -> i64 {
        2 * self.k + 1 - n
    }
}

impl DiffMap for StripReflection {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, z: &[C]) -> Result<Point> {
        Ok(vec![StripReflection::eval(self, z[0])])
    }
    fn jacobian(&self, _z: &[C]) -> Result<DMatrix<C>> {
        Ok(DMatrix::from_element(1, 1, -cplx::ONE))
    }
}

/// Coordinate-wise inversion z_j ↦ r_j / z_j on a product of annuli
/// {r_j < |z_j| < 1}; a self-inverse automorphism with the 2ⁿ fixed points
/// (±√r₁, …, ±√rₙ).
#[derive(Clone, Debug)]
pub struct AnnuliInversion {
    radii: Vec<f64>,
}

impl AnnuliInversion {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::BadInput("need at least one annulus".into()));
        }
        for &r in &radii {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::BadInput(format!(
                    "annulus radius {r} outside (0, 1)"
                )));
            }
        }
        Ok(AnnuliInversion { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn domain_contains(&self, z: &[C]) -> bool {
        z.len() == self.radii.len()
            && z.iter()
                .zip(&self.radii)
                .all(|(c, &r)| c.norm() > r && c.norm() < 1.0)
    }

    /// All sign choices (±√r₁, …, ±√rₙ), in canonical order.
    pub fn fixed_points(&self) -> PointSet {
        let n = self.radii.len();
        let mut pts = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let p: Point = self
                .radii
                .iter()
                .enumerate()
                .map(|(j, &r)| {
                    let s = if mask >> j & 1 == 0 { 1.0 } else { -1.0 };
                    C::new(s * r.sqrt(), 0.0)
                })
                .collect();
            pts.push(p);
        }
        PointSet::from_points(pts, tol::DEDUP_TOL)
    }
}

impl DiffMap for AnnuliInversion {
    fn dim(&self) -> usize {
        self.radii.len()
    }

    fn eval(&self, z: &[C]) -> Result<Point> {
        if z.len() != self.radii.len() {
            return Err(Error::ArityMismatch {
                expected: self.radii.len(),
                got: z.len(),
            });
        }
        z.iter()
            .zip(&self.radii)
            .map(|(c, &r)| {
                if c.norm() == 0.0 {
                    Err(Error::Numerical("pole of the inversion at 0".into()))
                } else {
                    Ok(C::new(r, 0.0) / c)
                }
            })
            .collect()
    }

    fn jacobian(&self, z: &[C]) -> Result<DMatrix<C>> {
        let n = self.radii.len();
        let mut j = DMatrix::<C>::zeros(n, n);
        for i in 0..n {
            if z[i].norm() == 0.0 {
                return Err(Error::Numerical("pole of the inversion at 0".into()));
            }
            j[(i, i)] = -C::new(self.radii[i], 0.0) / (z[i] * z[i]);
        }
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use crate::solver::{fixed_points_numeric, is_isolated, SolveOptions};
    use rand::Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn blaschke_single_zero_at_origin_is_identity_factor() {
        let b = BlaschkeProduct::new(vec![cplx::ZERO], 1).unwrap();
        for i in 0..20 {
            let h = sample::halton(i, 2, 3);
            let x = C::new(0.9 * (2.0 * h[0] - 1.0), 0.9 * (2.0 * h[1] - 1.0));
            if x.norm() >= 1.0 {
                continue;
            }
            assert_eq!(b.eval(x).unwrap(), x);
        }
    }

    #[test]
    fn blaschke_vanishes_at_zeros_and_contracts() {
        let zeros = vec![c(0.3, 0.2), c(-0.5, 0.1), cplx::ZERO, c(0.0, -0.7)];
        let b = BlaschkeProduct::new(zeros.clone(), 4).unwrap();
        for &a in &zeros {
            assert!(b.eval(a).unwrap().norm() < 1e-15);
        }
        let mut rng = sample::rng(77);
        for _ in 0..1000 {
            let x = sample::ball_point(&mut rng, 1, 0.999)[0];
            let v = b.eval(x).unwrap();
            assert!(v.norm() < 1.0, "|B(x)| = {} at x = {x}", v.norm());
        }
    }

    #[test]
    fn blaschke_matches_per_factor_oracle() {
        let zeros = vec![c(0.3, 0.2), c(-0.5, 0.1), c(0.2, 0.6)];
        let b = BlaschkeProduct::new(zeros.clone(), 3).unwrap();
        let mut rng = sample::rng(78);
        for _ in 0..200 {
            let x = sample::ball_point(&mut rng, 1, 0.95)[0];
            let mut expect = cplx::ONE;
            for &a in &zeros {
                // independent factor-by-factor recomputation
                let phase = C::new(a.norm(), 0.0) / a;
                expect *= phase * (a - x) / (cplx::ONE - a.conj() * x);
            }
            let got = b.eval(x).unwrap();
            assert!((got - expect).norm() / expect.norm().max(1.0) < 1e-13);
        }
    }

    #[test]
    fn blaschke_rejects_boundary_arguments_and_zeros() {
        assert!(BlaschkeProduct::new(vec![cplx::ONE], 1).is_err());
        let b = BlaschkeProduct::new(vec![c(0.5, 0.0)], 1).unwrap();
        assert!(b.eval(cplx::ONE).is_err());
    }

    #[test]
    fn truncation_controls_the_zero_count() {
        let zeros: Vec<C> = (0..9).map(|i| c(0.08 * i as f64, 0.03)).collect();
        let b = BlaschkeProduct::new(zeros, 7).unwrap();
        assert_eq!(b.zeros_used().len(), 7);
        let curve = CurveInvolution::from_blaschke(b);
        assert_eq!(curve.fixed_points().unwrap().len(), 7);
    }

    #[test]
    fn curve_fixed_points_are_branch_roots() {
        let roots = [cplx::ZERO, cplx::ONE, c(-1.0, 0.0)];
        let curve = CurveInvolution::from_branch_roots(&roots).unwrap();
        let fixed = curve.fixed_points().unwrap();
        assert_eq!(fixed.len(), 3);
        for r in roots {
            assert!(fixed.contains(&[r, cplx::ZERO], 1e-10));
        }
        // y^2 = x has the single fixed point (0, 0)
        let single = CurveInvolution::from_polynomial(MultiPoly::var(1, 0)).unwrap();
        let fs = single.fixed_points().unwrap();
        assert_eq!(fs.len(), 1);
        assert!(fs.contains(&[cplx::ZERO, cplx::ZERO], 1e-12));
    }

    #[test]
    fn involution_squares_to_identity_exactly() {
        let curve = CurveInvolution::from_branch_roots(&[cplx::ZERO, cplx::ONE]).unwrap();
        let p = [c(0.3, 0.7), c(-1.2, 0.4)];
        assert_eq!(curve.apply(&curve.apply(&p)), p);
    }

    #[test]
    fn involution_preserves_the_curve() {
        let curve = CurveInvolution::from_branch_roots(&[cplx::ZERO, cplx::ONE, c(2.0, 0.0)])
            .unwrap();
        // take x, compute y = sqrt(B(x)) numerically, check (x, -y) stays on
        let x = c(0.4, 0.3);
        let bx = match &curve.branch {
            CurveBranch::Polynomial(p) => p.eval(&[x]).unwrap(),
            _ => unreachable!(),
        };
        let y = bx.sqrt();
        let p = [x, y];
        assert!(curve.on_curve_residual(&p).unwrap() < 1e-14);
        assert!(curve.on_curve_residual(&curve.apply(&p)).unwrap() < 1e-14);
    }

    #[test]
    fn strip_reflection_fixes_half_integer() {
        let f = StripReflection::new(3);
        assert_eq!(f.fixed_point(), c(3.5, 0.0));
        assert_eq!(f.eval(c(3.5, 0.0)), c(3.5, 0.0));
        // affine involution
        let z = c(1.25, -0.8);
        assert_eq!(f.eval(f.eval(z)), z);
    }

    #[test]
    fn strip_domain_is_invariant() {
        let f = StripReflection::new(3);
        let mut rng = sample::rng(91);
        let mut checked = 0;
        while checked < 1000 {
            let z = C::new(
                20.0 * (sample::gaussian(&mut rng) / 3.0),
                4.0 * (sample::gaussian(&mut rng) / 3.0),
            );
            if !f.domain_contains(z) {
                continue;
            }
            checked += 1;
            assert!(
                f.domain_contains(f.eval(z)),
                "image of {z} left the domain"
            );
        }
        // disc index arithmetic: disc n maps to disc 2k+1-n
        for n in -5..=5 {
            let center = C::new(n as f64, 0.0);
            let image = f.eval(center);
            assert_eq!(image, C::new(f.disc_image_index(n) as f64, 0.0));
        }
    }

    #[test]
    fn strip_numeric_fixed_point() {
        let f = StripReflection::new(3);
        let report = fixed_points_numeric(&f, 8.0, 100, tol::FIX_TOL, SolveOptions::default())
            .unwrap();
        assert_eq!(report.found.len(), 1);
        assert!(cplx::dist(&report.found.points()[0], &[c(3.5, 0.0)]) < 1e-12);
    }

    #[test]
    fn annuli_fixed_points_single_factor() {
        let a = AnnuliInversion::new(vec![0.25]).unwrap();
        let fixed = a.fixed_points();
        assert_eq!(fixed.len(), 2);
        assert!(fixed.contains(&[c(0.5, 0.0)], 1e-15));
        assert!(fixed.contains(&[c(-0.5, 0.0)], 1e-15));
        // both inside the annulus
        for p in fixed.points() {
            assert!(a.domain_contains(p));
        }
    }

    #[test]
    fn annuli_inversion_is_an_involution() {
        let a = AnnuliInversion::new(vec![0.25, 0.5]).unwrap();
        let z = vec![c(0.6, 0.2), c(-0.7, 0.1)];
        let rt = a.eval(&a.eval(&z).unwrap()).unwrap();
        assert!(cplx::dist(&rt, &z) < 1e-15);
    }

    #[test]
    fn annuli_numeric_matches_closed_form() {
        let a = AnnuliInversion::new(vec![0.25, 0.25]).unwrap();
        let report = fixed_points_numeric(&a, 1.0, 2000, tol::FIX_TOL, SolveOptions::default())
            .unwrap();
        assert_eq!(report.found.len(), 4, "expected 2^2 fixed points");
        assert!(report.found.hausdorff(&a.fixed_points()) < 1e-10);
        for (p, flag) in report.found.points().iter().zip(&report.isolation_flags) {
            assert!(flag, "fixed point {p:?} not flagged isolated");
            assert!(is_isolated(&a, p, 1e-8).unwrap());
        }
    }

    #[test]
    fn annuli_jacobian_matches_finite_differences() {
        let a = AnnuliInversion::new(vec![0.25, 0.5]).unwrap();
        let z = vec![c(0.6, 0.2), c(-0.7, 0.1)];
        let j = a.jacobian(&z).unwrap();
        let h = 1e-6;
        for col in 0..2 {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[col] += c(h, 0.0);
            zm[col] -= c(h, 0.0);
            let fp = a.eval(&zp).unwrap();
            let fm = a.eval(&zm).unwrap();
            for row in 0..2 {
                let fd = (fp[row] - fm[row]) / c(2.0 * h, 0.0);
                assert!((fd - j[(row, col)]).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn gallery_maps_are_not_retractions() {
        use crate::solver::{is_retraction, Trivial};
        // strip reflection on its domain
        let f = StripReflection::new(1);
        let strip_samples: Vec<Point> = (0..100)
            .map(|i| {
                let h = sample::halton(i, 2, 5);
                vec![c(6.0 * h[0] - 3.0, 2.0 * h[1] - 1.0)]
            })
            .filter(|z| f.domain_contains(z[0]))
            .collect();
        let rep = is_retraction(
            |z| Ok(vec![f.eval(z[0])]),
            &strip_samples,
            1e-10,
        )
        .unwrap();
        assert!(!rep.retraction);
        assert_eq!(rep.trivial, Trivial::None);

        // annuli inversion on its domain
        let a = AnnuliInversion::new(vec![0.25, 0.25]).unwrap();
        let mut rng = sample::rng(13);
        let mut annuli_samples = Vec::new();
        while annuli_samples.len() < 100 {
            let z: Point = (0..2)
                .map(|_| {
                    let r = 0.3 + 0.65 * rng.gen::<f64>();
                    let t = std::f64::consts::TAU * rng.gen::<f64>();
                    C::new(r * t.cos(), r * t.sin())
                })
                .collect();
            if a.domain_contains(&z) {
                annuli_samples.push(z);
            }
        }
        let rep = is_retraction(|z| a.eval(z), &annuli_samples, 1e-10).unwrap();
        assert!(!rep.retraction);

        // curve involution on curve points with y != 0
        let curve = CurveInvolution::from_branch_roots(&[cplx::ZERO, cplx::ONE]).unwrap();
        let curve_samples: Vec<Point> = (0..50)
            .map(|i| {
                let h = sample::halton(i, 2, 9);
                let x = c(2.0 * h[0] + 0.1, h[1]);
                let y = match &curve.branch {
                    CurveBranch::Polynomial(p) => p.eval(&[x]).unwrap().sqrt(),
                    _ => unreachable!(),
                };
                vec![x, y]
            })
            .filter(|p| p[1].norm() > 0.1)
            .collect();
        let rep = is_retraction(
            |z| {
                let out = curve.apply(&[z[0], z[1]]);
                Ok(out.to_vec())
            },
            &curve_samples,
            1e-10,
        )
        .unwrap();
        assert!(!rep.retraction);
    }

    #[test]
    fn annuli_rejects_bad_radii() {
        assert!(AnnuliInversion::new(vec![]).is_err());
        assert!(AnnuliInversion::new(vec![1.5]).is_err());
        assert!(AnnuliInversion::new(vec![0.0]).is_err());
    }
}
