//! Kobayashi geometry of the unit ball 𝔹ⁿ ⊂ ℂⁿ.
//!
//! Möbius involutions, the Kobayashi distance k(z, w) = arctanh ‖φ_z(w)‖,
//! Kobayashi balls, constrained nearest points on spheres, and automorphisms
//! fixing a prescribed pair of points together with everything on the complex
//! line through them.

use crate::cplx::{self, Point, C};
use crate::json::{self, CxJson};
use crate::sample;
use crate::{tol, Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A point strictly interior to the unit ball: ‖z‖ < 1 − INTERIOR_MARGIN.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    coords: Point,
}

impl BallPoint {
    pub fn new(coords: Point) -> Result<Self> {
        cplx::ensure_finite(&coords, "ball point")?;
        let n = cplx::norm(&coords);
        if n >= 1.0 - tol::INTERIOR_MARGIN {
            return Err(Error::NotInterior(n));
        }
        Ok(BallPoint { coords })
    }

    pub fn origin(n: usize) -> Self {
        BallPoint {
            coords: vec![cplx::ZERO; n],
        }
    }

    pub fn coords(&self) -> &[C] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        cplx::norm(&self.coords)
    }
}

/// Precomputed data for the Möbius involution φ_a.
///
/// For a ≠ 0, with P the projection onto span(a), Q = I − P and
/// s = √(1 − ‖a‖²):
///
///   φ_a(z) = (a − P z − s Q z) / (1 − ⟨z, a⟩),
///
/// which swaps 0 and a and is an involution of 𝔹ⁿ. The degenerate center
/// a = 0 uses the limit normalization φ₀ = −id, keeping the involution
/// property universal (some references use φ₀ = id instead).
#[derive(Clone, Debug)]
struct Mobius {
    a: Point,
    norm_a2: f64,
    s: f64,
}

impl Mobius {
    fn new(a: &BallPoint) -> Self {
        let norm_a2 = cplx::norm(&a.coords).powi(2);
        Mobius {
            a: a.coords.clone(),
            norm_a2,
            s: (1.0 - norm_a2).max(0.0).sqrt(),
        }
    }

    fn apply(&self, z: &[C]) -> Point {
        let n = self.a.len();
        if self.norm_a2 == 0.0 {
            return z.iter().map(|c| -c).collect();
        }
        let za = cplx::inner(z, &self.a); // ⟨z, a⟩
        let proj = za / C::new(self.norm_a2, 0.0);
        let denom = cplx::ONE - za;
        let mut out = Vec::with_capacity(n);
        for (ai, zi) in self.a.iter().zip(z) {
            let pz = proj * ai;
            let qz = zi - pz;
            out.push((ai - pz - qz * C::new(self.s, 0.0)) / denom);
        }
        out
    }

    /// Holomorphic Jacobian of φ_a at z.
    fn jacobian(&self, z: &[C]) -> DMatrix<C> {
        let n = self.a.len();
        if self.norm_a2 == 0.0 {
            return DMatrix::from_diagonal_element(n, n, -cplx::ONE);
        }
        let za = cplx::inner(z, &self.a);
        let denom = cplx::ONE - za;
        let denom2 = denom * denom;
        // M = P + s Q as a matrix; numerator N(z) = a − M z
        let mut m = DMatrix::<C>::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let p_rc = self.a[r] * self.a[c].conj() / C::new(self.norm_a2, 0.0);
                let q_rc = if r == c { cplx::ONE - p_rc } else { -p_rc };
                m[(r, c)] = p_rc + q_rc * C::new(self.s, 0.0);
            }
        }
        let mz: Vec<C> = (0..n)
            .map(|r| (0..n).map(|c| m[(r, c)] * z[c]).sum())
            .collect();
        // d/dz [ (a - Mz) / (1 - <z,a>) ] = -M/(1-<z,a>) + (a - Mz) ā^T /(1-<z,a>)^2
        let mut j = DMatrix::<C>::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let first = -m[(r, c)] / denom;
                let second = (self.a[r] - mz[r]) * self.a[c].conj() / denom2;
                j[(r, c)] = first + second;
            }
        }
        j
    }
}

/// One factor of a ball-automorphism word.
#[derive(Clone, Debug)]
pub enum BallFactor {
    Mobius(BallPoint),
    Unitary(DMatrix<C>),
}

/// An automorphism of 𝔹ⁿ as a word of Möbius involutions and unitaries,
/// applied left to right.
#[derive(Clone, Debug)]
pub struct BallAutomorphism {
    dim: usize,
    word: Vec<BallFactor>,
}

impl BallAutomorphism {
    pub fn identity(n: usize) -> Self {
        BallAutomorphism {
            dim: n,
            word: Vec::new(),
        }
    }

    pub fn mobius(a: &BallPoint) -> Self {
        BallAutomorphism {
            dim: a.dim(),
            word: vec![BallFactor::Mobius(a.clone())],
        }
    }

    /// Wraps a unitary matrix; U·U* must equal I to 1e-12.
    pub fn unitary(u: DMatrix<C>) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n {
            return Err(Error::DimensionMismatch("unitary must be square".into()));
        }
        let defect = (&u * u.adjoint() - DMatrix::<C>::identity(n, n)).norm();
        if defect > 1e-12 {
            return Err(Error::Precondition(format!(
                "unitarity defect {defect:.3e} exceeds 1e-12"
            )));
        }
        Ok(BallAutomorphism {
            dim: n,
            word: vec![BallFactor::Unitary(u)],
        })
    }

    /// Word concatenation: self applied first, then `next`.
    pub fn then(mut self, next: &BallAutomorphism) -> Result<Self> {
        if self.dim != next.dim {
            return Err(Error::DimensionMismatch(
                "cannot compose ball automorphisms of different dimension".into(),
            ));
        }
        self.word.extend(next.word.iter().cloned());
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn word_len(&self) -> usize {
        self.word.len()
    }

    pub fn eval(&self, z: &[C]) -> Result<Point> {
        if z.len() != self.dim {
            return Err(Error::ArityMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        let mut v = z.to_vec();
        for f in &self.word {
            v = match f {
                BallFactor::Mobius(a) => Mobius::new(a).apply(&v),
                BallFactor::Unitary(u) => (0..self.dim)
                    .map(|r| (0..self.dim).map(|c| u[(r, c)] * v[c]).sum())
                    .collect(),
            };
        }
        Ok(v)
    }

    /// Chain-rule holomorphic Jacobian.
    pub fn jacobian(&self, z: &[C]) -> Result<DMatrix<C>> {
        let mut v = z.to_vec();
        let mut j = DMatrix::<C>::identity(self.dim, self.dim);
        for f in &self.word {
            match f {
                BallFactor::Mobius(a) => {
                    let m = Mobius::new(a);
                    j = m.jacobian(&v) * j;
                    v = m.apply(&v);
                }
                BallFactor::Unitary(u) => {
                    j = u * &j;
                    v = (0..self.dim)
                        .map(|r| (0..self.dim).map(|c| u[(r, c)] * v[c]).sum())
                        .collect();
                }
            }
        }
        Ok(j)
    }

    /// The image of the origin — the Möbius parameter of the normal form.
    pub fn center_param(&self) -> Result<BallPoint> {
        BallPoint::new(self.eval(&vec![cplx::ZERO; self.dim])?)
    }

    /// Normal form f = φ_a ∘ U with a = f(0): returns (a, U) where
    /// U = Dφ_a(a)·Df(0) is unitary up to roundoff.
    pub fn normal_form(&self) -> Result<(BallPoint, DMatrix<C>)> {
        let a = self.center_param()?;
        let df0 = self.jacobian(&vec![cplx::ZERO; self.dim])?;
        let u = Mobius::new(&a).jacobian(a.coords()) * df0;
        Ok((a, u))
    }
}

/// The Möbius involution φ_a as a ball automorphism.
pub fn mobius_involution(a: &BallPoint) -> BallAutomorphism {
    BallAutomorphism::mobius(a)
}

fn require_interior(z: &[C]) -> Result<()> {
    let n = cplx::norm(z);
    if n >= 1.0 - tol::INTERIOR_MARGIN {
        return Err(Error::NotInterior(n));
    }
    Ok(())
}

/// Kobayashi distance on the unit ball: arctanh ‖φ_z(w)‖.
///
/// Arguments are ordered canonically before evaluating, so the result is
/// bitwise symmetric in (z, w).
pub fn kobayashi_distance(z: &[C], w: &[C]) -> Result<f64> {
    if z.len() != w.len() {
        return Err(Error::ArityMismatch {
            expected: z.len(),
            got: w.len(),
        });
    }
    cplx::ensure_finite(z, "kobayashi argument")?;
    cplx::ensure_finite(w, "kobayashi argument")?;
    require_interior(z)?;
    require_interior(w)?;
    let (first, second) = if cplx::cmp_points(z, w) == std::cmp::Ordering::Greater {
        (w, z)
    } else {
        (z, w)
    };
    let a = BallPoint::new(first.to_vec())?;
    let image = Mobius::new(&a).apply(second);
    let r = cplx::norm(&image);
    if r >= 1.0 {
        return Err(Error::NonFinite("kobayashi distance"));
    }
    Ok(r.atanh())
}

/// A Kobayashi metric ball b(center, σ).
#[derive(Clone, Debug)]
pub struct KobayashiBallDesc {
    pub center: BallPoint,
    pub sigma: f64,
}

impl KobayashiBallDesc {
    /// Membership: ‖φ_center(z)‖ < tanh σ.
    pub fn contains(&self, z: &[C]) -> Result<bool> {
        require_interior(z)?;
        let image = Mobius::new(&self.center).apply(z);
        Ok(cplx::norm(&image) < self.sigma.tanh())
    }

    /// Signed boundary residual ‖φ_center(z)‖ − tanh σ (negative inside).
    pub fn boundary_residual(&self, z: &[C]) -> Result<f64> {
        require_interior(z)?;
        let image = Mobius::new(&self.center).apply(z);
        Ok(cplx::norm(&image) - self.sigma.tanh())
    }

    /// For a centered ball this is the Euclidean radius: tanh σ.
    pub fn euclidean_radius_if_centered(&self) -> Option<f64> {
        if self.center.norm() == 0.0 {
            Some(self.sigma.tanh())
        } else {
            None
        }
    }
}

/// Kobayashi ball descriptor; σ ≥ 0 (σ = 0 degenerates to the singleton).
pub fn kobayashi_ball(center: BallPoint, sigma: f64) -> Result<KobayashiBallDesc> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::BadInput("kobayashi radius must be >= 0".into()));
    }
    Ok(KobayashiBallDesc { center, sigma })
}

/// A Euclidean sphere in ℂⁿ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Vec<CxJson>,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: &[C], radius: f64) -> Self {
        Sphere {
            center: json::point_to_json(center),
            radius,
        }
    }

    pub fn center_point(&self) -> Point {
        json::point_from_json(&self.center)
    }

    pub fn membership_residual(&self, z: &[C]) -> f64 {
        (cplx::dist(z, &self.center_point()) - self.radius).abs()
    }
}

/// Half-space constraint on Im z₂ (index 1 in code).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "bound")]
pub enum HalfSpace {
    /// Im z₂ ≥ bound.
    ImZ2AtLeast(f64),
    /// Im z₂ ≤ bound.
    ImZ2AtMost(f64),
}

impl HalfSpace {
    /// Nonnegative iff satisfied: distance to the bounding hyperplane.
    pub fn margin(&self, z: &[C]) -> f64 {
        match self {
            HalfSpace::ImZ2AtLeast(b) => z[1].im - b,
            HalfSpace::ImZ2AtMost(b) => b - z[1].im,
        }
    }

    /// Projects onto the boundary hyperplane when violated.
    pub fn clamp(&self, z: &mut [C]) {
        match self {
            HalfSpace::ImZ2AtLeast(b) => {
                if z[1].im < *b {
                    z[1].im = *b;
                }
            }
            HalfSpace::ImZ2AtMost(b) => {
                if z[1].im > *b {
                    z[1].im = *b;
                }
            }
        }
    }
}

/// Result of a constrained nearest-point search on a sphere.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NearestPoint {
    pub point: Vec<CxJson>,
    pub distance: f64,
    /// Distance of the second-best descent cluster minus the best; `None`
    /// when every start converged to the same point.
    pub uniqueness_gap: Option<f64>,
    /// True when the minimizer sits on the half-space boundary.
    pub cap_boundary: bool,
    pub starts: usize,
    pub converged: usize,
    pub tolerances: BTreeMap<String, f64>,
}

impl NearestPoint {
    pub fn point_coords(&self) -> Point {
        json::point_from_json(&self.point)
    }
}

/// Options for the projected descent.
#[derive(Clone, Copy, Debug)]
pub struct NearestOptions {
    pub starts: usize,
    pub max_iters: usize,
    pub pos_tol: f64,
    pub seed: u64,
}

impl Default for NearestOptions {
    fn default() -> Self {
        NearestOptions {
            starts: tol::NEAREST_STARTS,
            max_iters: 300,
            pos_tol: tol::NEAREST_POS_TOL,
            seed: 0,
        }
    }
}

/// Kobayashi distance from p, extended continuously for probes that graze
/// the boundary; +inf outside the admissible region.
fn nearest_objective(p: &[C], x: &[C]) -> f64 {
    let nx = cplx::norm(x);
    if nx >= 1.0 - 1e-9 {
        return f64::INFINITY;
    }
    let a = BallPoint { coords: p.to_vec() };
    let r = cplx::norm(&Mobius::new(&a).apply(x));
    r.min(1.0 - 1e-15).atanh()
}

/// Retraction onto the sphere, then onto the feasible cap.
fn project_feasible(sphere_center: &[C], radius: f64, constraint: Option<HalfSpace>, x: &mut Point) {
    for _ in 0..8 {
        // sphere retraction
        let mut dir = cplx::sub(x, sphere_center);
        let n = cplx::norm(&dir);
        if n == 0.0 {
            dir[0] = C::new(radius, 0.0);
        } else {
            let s = radius / n;
            for c in dir.iter_mut() {
                *c *= C::new(s, 0.0);
            }
        }
        *x = cplx::add(sphere_center, &dir);
        match constraint {
            Some(h) if h.margin(x) < 0.0 => {
                h.clamp(x);
                // loop to re-project onto the sphere
            }
            _ => break,
        }
    }
}

/// Minimizes the Kobayashi distance from `p` over the sphere intersected with
/// the ball and an optional half-space, by multi-start projected descent with
/// central finite-difference gradients.
pub fn nearest_on_sphere(
    p: &[C],
    sphere: &Sphere,
    constraint: Option<HalfSpace>,
    opts: NearestOptions,
) -> Result<NearestPoint> {
    cplx::ensure_finite(p, "nearest-point probe")?;
    require_interior(p)?;
    let center = sphere.center_point();
    let radius = sphere.radius;
    let n = center.len();
    if p.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: p.len(),
        });
    }
    if radius <= 0.0 {
        return Err(Error::BadInput("sphere radius must be positive".into()));
    }
    // The sphere must reach inside the unit ball at all.
    if (cplx::norm(&center) - radius).abs() >= 1.0 - 1e-9 {
        return Err(Error::EmptyFeasible(
            "sphere does not intersect the open unit ball".into(),
        ));
    }
    let on_sphere = (cplx::dist(p, &center) - radius).abs();
    if on_sphere < 1e-9 {
        return Err(Error::Precondition(format!(
            "probe lies on the sphere (residual {on_sphere:.3e})"
        )));
    }

    // deterministic starts: the radial initialization plus seeded directions
    let mut starts: Vec<Point> = Vec::with_capacity(opts.starts);
    {
        let mut x0 = p.to_vec();
        project_feasible(&center, radius, constraint, &mut x0);
        starts.push(x0);
    }
    let mut rng = sample::rng(opts.seed.wrapping_add(0x51ab));
    while starts.len() < opts.starts {
        let dir: Point = (0..n).map(|_| sample::gaussian_complex(&mut rng)).collect();
        let nd = cplx::norm(&dir);
        let mut x0: Point = center
            .iter()
            .zip(&dir)
            .map(|(c, d)| c + d * C::new(radius / nd, 0.0))
            .collect();
        project_feasible(&center, radius, constraint, &mut x0);
        starts.push(x0);
    }

    let h = tol::FD_GRAD_STEP;
    let mut candidates: Vec<(Point, f64)> = Vec::new();
    for start in &starts {
        let mut x = start.clone();
        let mut fx = nearest_objective(p, &x);
        if !fx.is_finite() {
            continue;
        }
        let mut step = 0.1 * radius;
        for _iter in 0..opts.max_iters {
            // finite-difference gradient over the 2n real coordinates
            let mut grad = vec![0.0f64; 2 * n];
            for i in 0..n {
                for (part, slot) in [(C::new(h, 0.0), 2 * i), (C::new(0.0, h), 2 * i + 1)] {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += part;
                    xm[i] -= part;
                    let fp = nearest_objective(p, &xp);
                    let fm = nearest_objective(p, &xm);
                    grad[slot] = if fp.is_finite() && fm.is_finite() {
                        (fp - fm) / (2.0 * h)
                    } else {
                        0.0
                    };
                }
            }
            // project the gradient onto the sphere tangent space
            let normal = cplx::sub(&x, &center);
            let nn = cplx::norm(&normal);
            let mut dot = 0.0;
            for i in 0..n {
                dot += grad[2 * i] * normal[i].re / nn + grad[2 * i + 1] * normal[i].im / nn;
            }
            let mut gt = vec![0.0f64; 2 * n];
            let mut gt_norm2 = 0.0;
            for i in 0..n {
                gt[2 * i] = grad[2 * i] - dot * normal[i].re / nn;
                gt[2 * i + 1] = grad[2 * i + 1] - dot * normal[i].im / nn;
                gt_norm2 += gt[2 * i] * gt[2 * i] + gt[2 * i + 1] * gt[2 * i + 1];
            }
            let gt_norm = gt_norm2.sqrt();
            if gt_norm < 1e-14 {
                break;
            }
            // backtracking step along the projected direction
            let mut converged = false;
            let mut moved = false;
            for _bt in 0..40 {
                let mut cand: Point = (0..n)
                    .map(|i| {
                        x[i] - C::new(step * gt[2 * i] / gt_norm, step * gt[2 * i + 1] / gt_norm)
                    })
                    .collect();
                project_feasible(&center, radius, constraint, &mut cand);
                let fc = nearest_objective(p, &cand);
                if fc.is_finite() && fc < fx {
                    let displacement = cplx::dist(&cand, &x);
                    x = cand;
                    fx = fc;
                    moved = true;
                    converged = displacement < opts.pos_tol;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
                if step < opts.pos_tol * 1e-3 {
                    break;
                }
            }
            if !moved || converged {
                break;
            }
        }
        if fx.is_finite() {
            candidates.push((x, fx));
        }
    }

    if candidates.is_empty() {
        return Err(Error::EmptyFeasible(
            "no feasible descent start on sphere ∩ ball ∩ half-space".into(),
        ));
    }

    // deterministic clustering: best point first, gap to the nearest distinct
    // cluster
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then(cplx::cmp_points(&a.0, &b.0)));
    let best = candidates[0].clone();
    let mut second: Option<f64> = None;
    for (pt, d) in &candidates[1..] {
        if cplx::dist(pt, &best.0) > tol::NEAREST_CLUSTER_TOL {
            second = Some(*d);
            break;
        }
    }
    let cap_boundary = match constraint {
        Some(hs) => hs.margin(&best.0) < tol::CAP_BOUNDARY_TOL,
        None => false,
    };
    Ok(NearestPoint {
        point: json::point_to_json(&best.0),
        distance: best.1,
        uniqueness_gap: second.map(|s| s - best.1),
        cap_boundary,
        starts: starts.len(),
        converged: candidates.len(),
        tolerances: tol::table(),
    })
}

/// Builds f = φ_a ∘ U ∘ φ_a where U fixes v = φ_a(b) and rotates the
/// orthogonal complement of v by angle θ. Then f(a) = a, f(b) = b, f fixes
/// the complex line through a and b pointwise, and f ≠ id for θ ∉ 2πℤ.
pub fn automorphism_fixing_pair(
    a: &BallPoint,
    b: &BallPoint,
    theta: f64,
) -> Result<BallAutomorphism> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch(
            "pair points disagree on dimension".into(),
        ));
    }
    if n < 2 {
        return Err(Error::Capability(
            "needs an orthogonal complement: dimension >= 2".into(),
        ));
    }
    let v = Mobius::new(a).apply(b.coords());
    let v_norm2 = cplx::norm(&v).powi(2);
    if v_norm2 == 0.0 {
        return Err(Error::Precondition("the two points coincide".into()));
    }
    // U = P_v + e^{iθ} (I − P_v)
    let phase = C::new(theta.cos(), theta.sin());
    let mut u = DMatrix::<C>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let p_rc = v[r] * v[c].conj() / C::new(v_norm2, 0.0);
            let q_rc = if r == c { cplx::ONE - p_rc } else { -p_rc };
            u[(r, c)] = p_rc + phase * q_rc;
        }
    }
    BallAutomorphism::mobius(a)
        .then(&BallAutomorphism::unitary(u)?)?
        .then(&BallAutomorphism::mobius(a))
}

/// Parameter disc of L ∩ 𝔹ⁿ for the line L(t) = a + t·(b − a):
/// returns (t_center, t_radius) with ‖L(t)‖ < 1 ⇔ |t − t_center| < t_radius.
pub fn line_ball_disc(a: &[C], b: &[C]) -> Result<(C, f64)> {
    let u = cplx::sub(b, a);
    let u2 = cplx::norm(&u).powi(2);
    if u2 == 0.0 {
        return Err(Error::Precondition("line endpoints coincide".into()));
    }
    let ua = cplx::inner(&u, a); // ⟨u, a⟩
    let t_center = -ua.conj() / C::new(u2, 0.0);
    let disc = (1.0 - cplx::norm(a).powi(2)) / u2 + (ua.norm() / u2).powi(2);
    if disc <= 0.0 {
        return Err(Error::EmptyFeasible("line misses the unit ball".into()));
    }
    Ok((t_center, disc.sqrt()))
}

/// Deterministic samples of L ∩ 𝔹ⁿ (slightly shrunk to stay interior).
pub fn line_ball_samples(a: &[C], b: &[C], count: usize) -> Result<Vec<Point>> {
    let (t_c, t_r) = line_ball_disc(a, b)?;
    let u = cplx::sub(b, a);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let h = sample::halton(i as u64, 2, 17);
        let rho = t_r * 0.98 * h[0].sqrt();
        let ang = std::f64::consts::TAU * h[1];
        let t = t_c + C::new(rho * ang.cos(), rho * ang.sin());
        out.push(a.iter().zip(&u).map(|(x, d)| x + d * t).collect::<Point>());
    }
    Ok(out)
}

/// Max residual ‖f(z) − z‖ over samples of the complex line through (a, b)
/// intersected with the ball. Errors if f does not fix the pair to 1e-10.
pub fn line_fixed_check<F>(f: F, a: &BallPoint, b: &BallPoint, samples: usize) -> Result<f64>
where
    F: Fn(&[C]) -> Result<Point>,
{
    let ra = cplx::dist(&f(a.coords())?, a.coords());
    let rb = cplx::dist(&f(b.coords())?, b.coords());
    if ra > tol::PAIR_FIX_TOL || rb > tol::PAIR_FIX_TOL {
        return Err(Error::Precondition(format!(
            "map does not fix the pair: residuals {ra:.3e}, {rb:.3e}"
        )));
    }
    let mut max_r = 0.0f64;
    for z in line_ball_samples(a.coords(), b.coords(), samples)? {
        let r = cplx::dist(&f(&z)?, &z);
        if r > max_r {
            max_r = r;
        }
    }
    Ok(max_r)
}
