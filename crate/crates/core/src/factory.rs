//! Polynomial automorphisms of ℂⁿ with prescribed fixed-point sets.
//!
//! Automorphisms are kept in factored form: a list of elementary maps
//! (triangular shears, Lagrange placers, invertible linear maps) applied in
//! sequence, each paired with its own exact inverse. Both directions of every
//! factor evaluate without expanding compositions, which matters numerically:
//! the expanded inverse of a shear, `w₂ − P(w₁ − w₂)`, cancels astronomically
//! large multinomial terms and is useless in floating point, while the
//! factored form subtracts P evaluated at a single variable and is stable.

use crate::cplx::{self, Point, C};
use crate::json::{self, CxJson, MapJson};
use crate::poly::MultiPoly;
use crate::polymap::PolyMap;
use crate::sample;
use crate::{tol, Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Construction tag carried by every factory output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Shift,
    Placer,
    Conjugation,
    Linear,
    Composite,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Shift => "shift",
            Provenance::Placer => "placer",
            Provenance::Conjugation => "conjugation",
            Provenance::Linear => "linear",
            Provenance::Composite => "composite",
        }
    }
}

/// A finite set of target points with a recorded minimum separation.
#[derive(Clone, Debug)]
pub struct TargetSet {
    points: Vec<Point>,
    separation: f64,
}

impl TargetSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::BadInput("target set must be non-empty".into()));
        }
        let dim = points[0].len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(
                    "target points disagree on dimension".into(),
                ));
            }
            cplx::ensure_finite(p, "target point")?;
        }
        let separation = cplx::min_separation(&points);
        if separation <= 0.0 {
            return Err(Error::SeparationTooSmall {
                actual: separation,
                required: f64::MIN_POSITIVE,
            });
        }
        Ok(TargetSet { points, separation })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// An elementary invertible map with its exact inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub forward: PolyMap,
    pub inverse: PolyMap,
}

impl Factor {
    pub fn new(forward: PolyMap, inverse: PolyMap) -> Self {
        Factor { forward, inverse }
    }

    pub fn flipped(&self) -> Factor {
        Factor {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }
}

/// An invertible polynomial self-map of ℂⁿ in factored form;
/// `factors[0]` is applied first.
#[derive(Clone, Debug)]
pub struct PolyAutomorphism {
    provenance: Provenance,
    factors: Vec<Factor>,
}

impl PolyAutomorphism {
    /// Assembles and validates an automorphism from its factors.
    pub fn from_factors(provenance: Provenance, factors: Vec<Factor>) -> Result<Self> {
        let a = PolyAutomorphism {
            provenance,
            factors,
        };
        a.validate()?;
        Ok(a)
    }

    /// Builds without the round-trip validation (negative-control tests).
    pub fn from_factors_unchecked(provenance: Provenance, factors: Vec<Factor>) -> Self {
        PolyAutomorphism {
            provenance,
            factors,
        }
    }

    pub fn identity(n: usize) -> Self {
        PolyAutomorphism {
            provenance: Provenance::Linear,
            factors: vec![Factor::new(PolyMap::identity(n), PolyMap::identity(n))],
        }
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors
            .first()
            .map(|f| f.forward.dim_in())
            .unwrap_or(0)
    }

    pub fn eval_forward(&self, z: &[C]) -> Result<Point> {
        let mut v = z.to_vec();
        for f in &self.factors {
            v = f.forward.eval(&v)?;
        }
        Ok(v)
    }

    pub fn eval_inverse(&self, z: &[C]) -> Result<Point> {
        let mut v = z.to_vec();
        for f in self.factors.iter().rev() {
            v = f.inverse.eval(&v)?;
        }
        Ok(v)
    }

    /// Chain-rule Jacobian of the forward map.
    pub fn jacobian_forward(&self, z: &[C]) -> Result<DMatrix<C>> {
        let n = self.dim();
        let mut v = z.to_vec();
        let mut j = DMatrix::<C>::identity(n, n);
        for f in &self.factors {
            j = f.forward.jacobian(&v)? * j;
            v = f.forward.eval(&v)?;
        }
        Ok(j)
    }

    /// Symbolic expansion of the forward composition (may be large).
    pub fn expand_forward(&self, cap: usize) -> Result<PolyMap> {
        let mut out = PolyMap::identity(self.dim());
        for f in &self.factors {
            out = f.forward.compose_capped(&out, cap)?;
        }
        Ok(out)
    }

    pub fn expand_inverse(&self, cap: usize) -> Result<PolyMap> {
        let mut out = PolyMap::identity(self.dim());
        for f in self.factors.iter().rev() {
            out = f.inverse.compose_capped(&out, cap)?;
        }
        Ok(out)
    }

    /// Structural validation plus the pointwise round-trip invariant on 100
    /// seeded points of the unit polydisc.
    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::DimensionMismatch(
                "automorphism needs at least one factor".into(),
            ));
        }
        let n = self.dim();
        for f in &self.factors {
            for m in [&f.forward, &f.inverse] {
                if m.dim_in() != n || m.dim_out() != n {
                    return Err(Error::DimensionMismatch(
                        "all factors must be square maps of the same dimension".into(),
                    ));
                }
            }
        }
        let report = verify_automorphism(self, 100, 1.0, 0)?;
        if !report.pass {
            return Err(Error::Precondition(format!(
                "round-trip residual {:.3e} exceeds {:.1e} on the unit polydisc",
                report.max_residual,
                tol::ROUNDTRIP_RESIDUAL
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> AutomorphismJson {
        AutomorphismJson {
            provenance: self.provenance,
            factors: self.factors.iter().map(|f| MapJson::from(&f.forward)).collect(),
            // maps applied when evaluating the inverse, in application order
            inverse_factors: self
                .factors
                .iter()
                .rev()
                .map(|f| MapJson::from(&f.inverse))
                .collect(),
        }
    }

    pub fn from_json(j: &AutomorphismJson) -> Result<Self> {
        if j.factors.len() != j.inverse_factors.len() {
            return Err(Error::DimensionMismatch(
                "factor and inverse-factor lists must have equal length".into(),
            ));
        }
        let m = j.factors.len();
        let factors = (0..m)
            .map(|i| {
                Ok(Factor::new(
                    j.factors[i].to_map()?,
                    j.inverse_factors[m - 1 - i].to_map()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_factors(j.provenance, factors)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomorphismJson {
    pub provenance: Provenance,
    pub factors: Vec<MapJson>,
    pub inverse_factors: Vec<MapJson>,
}

/// The linear part of the shift construction:
/// (u₁, u₂, uₛ) ↦ (u₁ + u₂, u₂, i·uₛ).
pub fn shift_linear_part(n: usize) -> PolyMap {
    let mut t = DMatrix::<C>::identity(n, n);
    t[(0, 1)] = cplx::ONE;
    for s in 2..n {
        t[(s, s)] = cplx::I;
    }
    PolyMap::from_matrix(&t)
}

/// Locates the shift block (shear S followed by its linear part T) inside a
/// factored automorphism and returns the index of S with its polynomial P.
/// `factors[index + 1 ..]` are then exactly the maps applied after the shift.
pub fn detect_shift_block(g: &PolyAutomorphism) -> Option<(usize, MultiPoly)> {
    let n = g.dim();
    let t = shift_linear_part(n);
    let fs = g.factors();
    for i in 0..fs.len().saturating_sub(1) {
        if fs[i + 1].forward == t {
            if let Some(p) = detect_shear(&fs[i].forward) {
                return Some((i, p));
            }
        }
    }
    None
}

/// Recognizes the elementary shear (z₁, z₂ + P(z₁), z₃, …, zₙ) and returns P.
pub fn detect_shear(map: &PolyMap) -> Option<MultiPoly> {
    if !map.is_square() || map.dim_in() < 2 {
        return None;
    }
    let n = map.dim_in();
    let comps = map.components();
    if comps[0] != MultiPoly::var(n, 0) {
        return None;
    }
    let p = comps[1].sub(&MultiPoly::var(n, 1)).ok()?;
    let (var, coeffs) = p.as_univariate()?;
    if p.is_zero() || var != 0 || coeffs.len() < 2 {
        return None;
    }
    for (s, comp) in comps.iter().enumerate().skip(2) {
        if *comp != MultiPoly::var(n, s) {
            return None;
        }
    }
    Some(p)
}

/// Builds the triangular automorphism
/// w₁ = z₁ + z₂ + P(z₁), w₂ = z₂ + P(z₁), wₛ = i·zₛ (s ≥ 3),
/// P = Π (z₁ − a_j), whose fixed-point set is exactly {(a_j, 0, …, 0)}.
///
/// Factored as a shear S: (z₁, z₂ + P(z₁), zₛ) followed by the linear map
/// T: (u₁ + u₂, u₂, i·uₛ); both factors invert stably.
pub fn build_shift_automorphism(roots: &[C], dim: usize) -> Result<PolyAutomorphism> {
    if dim < 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: dim,
        });
    }
    if roots.is_empty() {
        return Err(Error::BadInput("at least one root is required".into()));
    }
    for &r in roots {
        cplx::ensure_finite_scalar(r, "shift root")?;
    }
    let sep = cplx::min_separation(&roots.iter().map(|&r| vec![r]).collect::<Vec<_>>());
    if sep < tol::ROOT_SEPARATION {
        return Err(Error::SeparationTooSmall {
            actual: sep,
            required: tol::ROOT_SEPARATION,
        });
    }

    let p = MultiPoly::from_roots(dim, 0, roots)?;
    let shear = shear_factor(dim, &p)?;

    // T: u1 += u2, us *= i for s >= 3; linear and exactly invertible.
    let mut t_inv = DMatrix::<C>::identity(dim, dim);
    t_inv[(0, 1)] = -cplx::ONE;
    for s in 2..dim {
        t_inv[(s, s)] = -cplx::I;
    }
    let linear = Factor::new(shift_linear_part(dim), PolyMap::from_matrix(&t_inv));

    PolyAutomorphism::from_factors(Provenance::Shift, vec![shear, linear])
}

/// The shear (z₁, z₂ + P(z₁), z₃, …) with its stable inverse (z₂ − P(z₁)).
fn shear_factor(dim: usize, p: &MultiPoly) -> Result<Factor> {
    let mut fwd = Vec::with_capacity(dim);
    let mut inv = Vec::with_capacity(dim);
    fwd.push(MultiPoly::var(dim, 0));
    inv.push(MultiPoly::var(dim, 0));
    fwd.push(MultiPoly::var(dim, 1).add(p)?);
    inv.push(MultiPoly::var(dim, 1).sub(p)?);
    for s in 2..dim {
        fwd.push(MultiPoly::var(dim, s));
        inv.push(MultiPoly::var(dim, s));
    }
    Ok(Factor::new(
        PolyMap::new(dim, dim, fwd)?,
        PolyMap::new(dim, dim, inv)?,
    ))
}

/// Lagrange interpolant ℂ → ℂ^(n-1) through (a_j, b_j), one polynomial per
/// target coordinate, embedded in `nvars` variables of which only `var` is
/// used.
fn lagrange_interpolants(
    nvars: usize,
    var: usize,
    nodes: &[C],
    values: &[Vec<C>],
) -> Result<Vec<MultiPoly>> {
    let k = nodes.len();
    let out_dims = values[0].len();
    let mut basis = Vec::with_capacity(k);
    for j in 0..k {
        let others: Vec<C> = (0..k).filter(|&m| m != j).map(|m| nodes[m]).collect();
        let mut denom = cplx::ONE;
        for &a in &others {
            denom *= nodes[j] - a;
        }
        if denom.norm() == 0.0 {
            return Err(Error::Precondition("coincident interpolation nodes".into()));
        }
        basis.push(MultiPoly::from_roots(nvars, var, &others)?.scale(cplx::ONE / denom));
    }
    (0..out_dims)
        .map(|d| {
            let mut f = MultiPoly::zero(nvars);
            for j in 0..k {
                f = f.add(&basis[j].scale(values[j][d]))?;
            }
            Ok(f)
        })
        .collect()
}

/// Builds the shear F: w₁ = z₁, w′ = z′ + f(z₁) with f the Lagrange
/// interpolant through (a_j, b_j); F maps (a_j, 0) to the target p_j.
pub fn build_point_placer(targets: &TargetSet) -> Result<PolyAutomorphism> {
    let n = targets.dim();
    if n < 2 {
        return Err(Error::ArityMismatch { expected: 2, got: n });
    }
    let nodes: Vec<C> = targets.points().iter().map(|p| p[0]).collect();
    let diam = cplx::diameter(targets.points()).max(1.0);
    let node_sep = cplx::min_separation(&nodes.iter().map(|&a| vec![a]).collect::<Vec<_>>());
    if node_sep < 1e-12 * diam {
        return Err(Error::Precondition(format!(
            "first coordinates too close for interpolation (separation {node_sep:.3e}); \
             precondition with a generic linear map"
        )));
    }
    let values: Vec<Vec<C>> = targets.points().iter().map(|p| p[1..].to_vec()).collect();
    let f = lagrange_interpolants(n, 0, &nodes, &values)?;

    let mut fwd = Vec::with_capacity(n);
    let mut inv = Vec::with_capacity(n);
    fwd.push(MultiPoly::var(n, 0));
    inv.push(MultiPoly::var(n, 0));
    for s in 1..n {
        fwd.push(MultiPoly::var(n, s).add(&f[s - 1])?);
        inv.push(MultiPoly::var(n, s).sub(&f[s - 1])?);
    }

    PolyAutomorphism::from_factors(
        Provenance::Placer,
        vec![Factor::new(
            PolyMap::new(n, n, fwd)?,
            PolyMap::new(n, n, inv)?,
        )],
    )
}

/// Finds an invertible linear map (unitary, hence exactly invertible) whose
/// images of the given points have pairwise distinct first coordinates with
/// separation at least PRECONDITION_SEPARATION_FRAC times the diameter.
/// Returns the identity when the inputs already qualify.
pub fn generic_linear_precondition(
    points: &[Point],
    seed: u64,
) -> Result<(PolyAutomorphism, TargetSet)> {
    if points.is_empty() {
        return Err(Error::BadInput("point list must be non-empty".into()));
    }
    let n = points[0].len();
    for p in points {
        cplx::ensure_finite(p, "precondition point")?;
        if p.len() != n {
            return Err(Error::DimensionMismatch(
                "points disagree on dimension".into(),
            ));
        }
    }
    let diam = cplx::diameter(points);
    if points.len() > 1 {
        let sep = cplx::min_separation(points);
        if sep < 1e-12 * diam.max(1.0) {
            return Err(Error::SeparationTooSmall {
                actual: sep,
                required: 1e-12 * diam.max(1.0),
            });
        }
    }
    let needed = tol::PRECONDITION_SEPARATION_FRAC * diam;

    let first_sep = |pts: &[Point]| -> f64 {
        cplx::min_separation(&pts.iter().map(|p| vec![p[0]]).collect::<Vec<_>>())
    };

    if points.len() == 1 || first_sep(points) >= needed {
        return Ok((
            PolyAutomorphism::identity(n),
            TargetSet::new(points.to_vec())?,
        ));
    }

    let mut rng = sample::rng(seed);
    for _attempt in 0..tol::PRECONDITION_RETRIES {
        let u = sample::random_unitary(n, &mut rng);
        let lmap = PolyMap::from_matrix(&u);
        let images: Vec<Point> = points
            .iter()
            .map(|p| lmap.eval(p))
            .collect::<Result<Vec<_>>>()?;
        if first_sep(&images) >= needed {
            let auto = PolyAutomorphism::from_factors(
                Provenance::Linear,
                vec![Factor::new(lmap, PolyMap::from_matrix(&u.adjoint()))],
            )?;
            return Ok((auto, TargetSet::new(images)?));
        }
    }
    Err(Error::Preconditioning {
        attempts: tol::PRECONDITION_RETRIES,
    })
}

/// Builds g = L⁻¹ ∘ F ∘ H ∘ F⁻¹ ∘ L with Fix(g) equal to the input points.
pub fn prescribe_fixed_points(points: &[Point], seed: u64) -> Result<PolyAutomorphism> {
    if points.is_empty() {
        return Err(Error::BadInput("need at least one point".into()));
    }
    let n = points[0].len();
    if n < 2 {
        return Err(Error::ArityMismatch { expected: 2, got: n });
    }
    let (l, targets) = generic_linear_precondition(points, seed)?;
    let placer = build_point_placer(&targets)?;
    let roots: Vec<C> = targets.points().iter().map(|p| p[0]).collect();
    let shift = build_shift_automorphism(&roots, n)?;

    let id = PolyMap::identity(n);
    let mut factors: Vec<Factor> = Vec::new();
    let mut push = |f: Factor| {
        if f.forward != id || f.inverse != id {
            factors.push(f);
        }
    };
    // application order: L, F^{-1}, H (= S then T), F, L^{-1}
    push(l.factors()[0].clone());
    push(placer.factors()[0].flipped());
    for f in shift.factors() {
        push(f.clone());
    }
    push(placer.factors()[0].clone());
    push(l.factors()[0].flipped());

    PolyAutomorphism::from_factors(Provenance::Conjugation, factors)
}

/// Round-trip verification report.
///
/// The residual is measured per elementary factor, relative to the magnitude
/// of the values flowing through that factor, keeping the worst case over all
/// samples and factors. Composite conjugations push intermediate values far
/// beyond what any fixed absolute scale can resolve in f64, so the
/// scale-relative per-factor residual is the verifiable form of the inverse
/// identity; for single-factor maps it coincides with the ordinary relative
/// round-trip error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub provenance: Provenance,
    pub samples: usize,
    pub box_radius: f64,
    pub max_residual: f64,
    pub per_factor_residual: Vec<f64>,
    /// Largest coefficient deviation of the symbolic round trip from the
    /// identity map, when the expansion stays under the term cap.
    pub symbolic_deviation: Option<f64>,
    pub pass: bool,
    pub tolerances: BTreeMap<String, f64>,
}

/// Checks the inverse identity on seeded samples in the centered box of the
/// given radius. Pass requires max residual < ROUNDTRIP_RESIDUAL.
pub fn verify_automorphism(
    g: &PolyAutomorphism,
    samples: usize,
    box_radius: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let n = g.dim();
    let m = g.factors().len();
    let mut per_factor = vec![0.0f64; m];
    for idx in 0..samples {
        let z = sample::box_point(idx as u64, n, box_radius, seed.wrapping_mul(977));
        let mut v = z;
        for (i, f) in g.factors().iter().enumerate() {
            let w = f.forward.eval(&v)?;
            let back = f.inverse.eval(&w)?;
            let scale = cplx::norm_inf(&v).max(cplx::norm_inf(&w)).max(1.0);
            let r = cplx::dist(&back, &v) / scale;
            if r > per_factor[i] {
                per_factor[i] = r;
            }
            v = w;
        }
    }
    let max_residual = per_factor.iter().cloned().fold(0.0, f64::max);

    // symbolic identity check when the expansion stays small
    let symbolic_deviation = (|| {
        let cap = 20_000;
        let fwd = g.expand_forward(cap).ok()?;
        let inv = g.expand_inverse(cap).ok()?;
        let round = inv.compose_capped(&fwd, cap).ok()?;
        round.deviation_from_identity().ok()
    })();

    Ok(VerificationReport {
        provenance: g.provenance(),
        samples,
        box_radius,
        max_residual,
        per_factor_residual: per_factor,
        symbolic_deviation,
        pass: max_residual < tol::ROUNDTRIP_RESIDUAL,
        tolerances: tol::table(),
    })
}

/// Points serialized for fixed-point artifacts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrescribedSetJson {
    pub points: Vec<Vec<CxJson>>,
    pub seed: u64,
}

pub fn points_json(points: &[Point], seed: u64) -> PrescribedSetJson {
    PrescribedSetJson {
        points: json::points_to_json(points),
        seed,
    }
}
