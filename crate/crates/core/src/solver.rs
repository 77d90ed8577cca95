//! Fixed-point extraction and classification for self-maps of ℂⁿ.
//!
//! Structural solving reads fixed points off factored constructions exactly;
//! the numeric path runs damped multi-start Newton on f(z) − z with
//! deflation-by-exclusion, and the two must agree on factory outputs.

pub mod roots;

pub use roots::{univariate_roots, Root};

use crate::cplx::{self, Point, C};
use crate::factory::{detect_shift_block, PolyAutomorphism, Provenance};
use crate::json::{self, CxJson};
use crate::polymap::PolyMap;
use crate::sample;
use crate::{tol, Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A square differentiable self-map of ℂⁿ, as the solver sees it.
///
/// Evaluation may fail outside the map's domain (poles, domain restrictions);
/// the solver treats such starts as diverged rather than erroring out.
pub trait DiffMap {
    fn dim(&self) -> usize;
    fn eval(&self, z: &[C]) -> Result<Point>;
    fn jacobian(&self, z: &[C]) -> Result<DMatrix<C>>;
}

impl DiffMap for PolyMap {
    fn dim(&self) -> usize {
        self.dim_in()
    }
    fn eval(&self, z: &[C]) -> Result<Point> {
        PolyMap::eval(self, z)
    }
    fn jacobian(&self, z: &[C]) -> Result<DMatrix<C>> {
        PolyMap::jacobian(self, z)
    }
}

impl DiffMap for PolyAutomorphism {
    fn dim(&self) -> usize {
        PolyAutomorphism::dim(self)
    }
    fn eval(&self, z: &[C]) -> Result<Point> {
        self.eval_forward(z)
    }
    fn jacobian(&self, z: &[C]) -> Result<DMatrix<C>> {
        self.jacobian_forward(z)
    }
}

/// A finite point set with a merge tolerance: inserting a near-duplicate
/// keeps the existing representative.
#[derive(Clone, Debug)]
pub struct PointSet {
    points: Vec<Point>,
    dedup_tol: f64,
}

impl PointSet {
    pub fn new(dedup_tol: f64) -> Self {
        PointSet {
            points: Vec::new(),
            dedup_tol,
        }
    }

    pub fn with_default_tol() -> Self {
        Self::new(tol::DEDUP_TOL)
    }

    /// Builds from a list, merging near-duplicates after a canonical sort.
    pub fn from_points(mut pts: Vec<Point>, dedup_tol: f64) -> Self {
        pts.sort_by(|a, b| cplx::cmp_points(a, b));
        let mut set = PointSet::new(dedup_tol);
        for p in pts {
            set.insert(p);
        }
        set
    }

    /// Inserts, merging into an existing point when within dedup_tol.
    /// Returns true when the point was actually added.
    pub fn insert(&mut self, p: Point) -> bool {
        if self
            .points
            .iter()
            .any(|q| cplx::dist(q, &p) < self.dedup_tol)
        {
            return false;
        }
        let at = self
            .points
            .partition_point(|q| cplx::cmp_points(q, &p) == std::cmp::Ordering::Less);
        self.points.insert(at, p);
        true
    }

    pub fn contains(&self, p: &[C], within: f64) -> bool {
        self.points.iter().any(|q| cplx::dist(q, p) < within)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }

    /// Symmetric Hausdorff distance between two finite sets.
    pub fn hausdorff(&self, other: &PointSet) -> f64 {
        let one_sided = |a: &[Point], b: &[Point]| -> f64 {
            a.iter()
                .map(|p| {
                    b.iter()
                        .map(|q| cplx::dist(p, q))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        if self.is_empty() && other.is_empty() {
            return 0.0;
        }
        if self.is_empty() || other.is_empty() {
            return f64::INFINITY;
        }
        f64::max(
            one_sided(&self.points, &other.points),
            one_sided(&other.points, &self.points),
        )
    }

    pub fn to_json(&self) -> Vec<Vec<CxJson>> {
        json::points_to_json(&self.points)
    }
}

/// Outcome of a numeric fixed-point search.
#[derive(Clone, Debug)]
pub struct FixedPointReport {
    pub found: PointSet,
    pub residuals: Vec<f64>,
    pub isolation_flags: Vec<bool>,
    pub starts_used: usize,
    pub converged_starts: usize,
    pub diverged_starts: usize,
    pub search_box: f64,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixedPointReportJson {
    pub found: Vec<Vec<CxJson>>,
    pub residuals: Vec<f64>,
    pub isolation_flags: Vec<bool>,
    pub starts_used: usize,
    pub converged_starts: usize,
    pub diverged_starts: usize,
    pub search_box: f64,
    pub tol: f64,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
}

impl FixedPointReport {
    pub fn to_json(&self) -> FixedPointReportJson {
        FixedPointReportJson {
            found: self.found.to_json(),
            residuals: self.residuals.clone(),
            isolation_flags: self.isolation_flags.clone(),
            starts_used: self.starts_used,
            converged_starts: self.converged_starts,
            diverged_starts: self.diverged_starts,
            search_box: self.search_box,
            tol: self.tol,
            seed: self.seed,
            tolerances: tol::table(),
        }
    }
}

/// Reads the fixed-point set off a factored construction.
///
/// Shift: roots of the shear polynomial paired with zeros. Conjugation: the
/// shift fixed set pushed through the factors applied after the shift.
pub fn fixed_points_structural(g: &PolyAutomorphism) -> Result<PointSet> {
    match g.provenance() {
        Provenance::Shift | Provenance::Conjugation => {}
        other => {
            return Err(Error::UnsupportedProvenance(other.as_str().to_string()));
        }
    }
    let n = g.dim();
    let (shift_idx, p) = detect_shift_block(g).ok_or_else(|| {
        Error::UnsupportedProvenance(format!(
            "{} automorphism carries no shift block",
            g.provenance().as_str()
        ))
    })?;
    let roots = univariate_roots(&p)?;
    let mut pts = Vec::with_capacity(roots.len());
    for r in roots {
        let mut z = vec![cplx::ZERO; n];
        z[0] = r.value;
        // base points have zero tail coordinates, so every later factor of the
        // construction (the linear part of the shift, the placer, L^{-1})
        // carries them exactly onto the prescribed fixed points
        for f in &g.factors()[shift_idx + 1..] {
            z = f.forward.eval(&z)?;
        }
        pts.push(z);
    }
    Ok(PointSet::from_points(pts, tol::DEDUP_TOL))
}

/// Options for the multi-start Newton search.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub max_iters: usize,
    pub damping: usize,
    pub dedup_tol: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: tol::NEWTON_MAX_ITERS,
            damping: tol::NEWTON_DAMPING,
            dedup_tol: tol::DEDUP_TOL,
            seed: 0,
        }
    }
}

fn residual_vector(map: &dyn DiffMap, z: &[C]) -> Result<Point> {
    let fz = map.eval(z)?;
    Ok(cplx::sub(&fz, z))
}

/// One damped Newton run on f(z) − z from the given start.
/// Returns the converged point, or None when the start diverges, stalls, or
/// wanders within `exclusion` of an already-known point.
fn newton_start(
    map: &dyn DiffMap,
    start: &[C],
    box_radius: f64,
    tol_resid: f64,
    known: &PointSet,
    opts: &SolveOptions,
) -> Option<Point> {
    let n = map.dim();
    let mut z = start.to_vec();
    let mut resid = match residual_vector(map, &z) {
        Ok(r) => r,
        Err(_) => return None,
    };
    let mut rnorm = cplx::norm(&resid);
    for _ in 0..opts.max_iters {
        if known.contains(&z, opts.dedup_tol) {
            return None; // deflation by exclusion
        }
        if rnorm < tol_resid {
            return Some(z);
        }
        if cplx::norm(&z) > tol::DIVERGE_FACTOR * box_radius {
            return None;
        }
        let mut jac = match map.jacobian(&z) {
            Ok(j) => j,
            Err(_) => return None,
        };
        for i in 0..n {
            jac[(i, i)] -= cplx::ONE;
        }
        let rhs = DVector::from_iterator(n, resid.iter().map(|c| -c));
        let step = jac.lu().solve(&rhs)?;
        // damped update: halve until the residual stops increasing
        let mut accepted = false;
        let mut scale = 1.0f64;
        for _ in 0..=opts.damping {
            let cand: Point = (0..n).map(|i| z[i] + step[i] * C::new(scale, 0.0)).collect();
            if let Ok(r) = residual_vector(map, &cand) {
                let rn = cplx::norm(&r);
                if rn.is_finite() && (rn < rnorm || scale < 1.0 / (1 << opts.damping) as f64) {
                    z = cand;
                    resid = r;
                    rnorm = rn;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            return None; // stalled
        }
    }
    if rnorm < tol_resid {
        Some(z)
    } else {
        None
    }
}

/// Multi-start Newton extraction of the fixed points of a square map inside
/// the centered box of radius R.
pub fn fixed_points_numeric(
    map: &dyn DiffMap,
    box_radius: f64,
    budget: usize,
    tol_resid: f64,
    opts: SolveOptions,
) -> Result<FixedPointReport> {
    if budget == 0 {
        return Err(Error::BadInput("start budget must be positive".into()));
    }
    if tol_resid < tol::FIX_TOL_FLOOR {
        return Err(Error::BadInput(format!(
            "tolerance {tol_resid:.1e} below machine feasibility {:.1e}",
            tol::FIX_TOL_FLOOR
        )));
    }
    if box_radius <= 0.0 {
        return Err(Error::BadInput("box radius must be positive".into()));
    }
    let n = map.dim();
    let mut known = PointSet::new(opts.dedup_tol);
    let mut converged = 0usize;
    let mut diverged = 0usize;
    for idx in 0..budget {
        let start = sample::box_point(idx as u64, n, box_radius, opts.seed.wrapping_mul(7919));
        match newton_start(map, &start, box_radius, tol_resid, &known, &opts) {
            Some(z) => {
                converged += 1;
                // keep only points inside the search box
                if cplx::norm_inf(&z) <= box_radius * (1.0 + 1e-9) {
                    known.insert(z);
                }
            }
            None => diverged += 1,
        }
    }
    let mut residuals = Vec::with_capacity(known.len());
    let mut isolation = Vec::with_capacity(known.len());
    for p in known.points() {
        let r = cplx::norm(&residual_vector(map, p)?);
        residuals.push(r);
        isolation.push(is_isolated(map, p, tol_resid.max(r * 2.0))?);
    }
    Ok(FixedPointReport {
        found: known,
        residuals,
        isolation_flags: isolation,
        starts_used: budget,
        converged_starts: converged,
        diverged_starts: diverged,
        search_box: box_radius,
        tol: tol_resid,
        seed: opts.seed,
    })
}

/// True iff the fixed point is non-degenerate: |det(J(z) − I)| > ISOLATION_DET_MIN.
pub fn is_isolated(map: &dyn DiffMap, z: &[C], fix_tol: f64) -> Result<bool> {
    let r = cplx::norm(&residual_vector(map, z)?);
    if r >= fix_tol {
        return Err(Error::Precondition(format!(
            "not a fixed point: |f(z)-z| = {r:.3e} >= {fix_tol:.1e}"
        )));
    }
    let n = map.dim();
    let mut jac = map.jacobian(z)?;
    for i in 0..n {
        jac[(i, i)] -= cplx::ONE;
    }
    let det = jac.lu().determinant();
    Ok(det.norm() > tol::ISOLATION_DET_MIN)
}

/// Classification of a self-map under the retraction test f∘f = f.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trivial {
    Constant,
    Identity,
    None,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RetractionReport {
    pub retraction: bool,
    pub trivial: Trivial,
    pub max_idempotency_defect: f64,
    pub samples: usize,
}

/// Tests f∘f = f on the given domain samples and classifies trivial cases.
pub fn is_retraction<F>(f: F, samples: &[Point], tol_resid: f64) -> Result<RetractionReport>
where
    F: Fn(&[C]) -> Result<Point>,
{
    if samples.is_empty() {
        return Err(Error::BadInput("empty sample set".into()));
    }
    let mut defect = 0.0f64;
    let mut move_max = 0.0f64;
    let mut images: Vec<Point> = Vec::with_capacity(samples.len());
    for z in samples {
        let fz = f(z)?;
        let ffz = f(&fz)?;
        defect = defect.max(cplx::dist(&ffz, &fz));
        move_max = move_max.max(cplx::dist(&fz, z));
        images.push(fz);
    }
    let image_diameter = cplx::diameter(&images);
    let trivial = if image_diameter < tol_resid {
        Trivial::Constant
    } else if move_max < tol_resid {
        Trivial::Identity
    } else {
        Trivial::None
    };
    Ok(RetractionReport {
        retraction: defect < tol_resid,
        trivial,
        max_idempotency_defect: defect,
        samples: samples.len(),
    })
}

/// Verdict of the candidate-set classifier, relative to a finite map family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub family: Vec<String>,
    /// Index of the family member witnessing a `Neither` verdict.
    pub witness: Option<usize>,
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Determining,
    QuasiDetermining,
    Neither,
}

/// Classifies K against a finite family of maps on shared domain samples.
///
/// Determining: every member fixing all of K is the identity on the samples.
/// Quasi-determining: every member fixing all of K also fixes some sampled
/// point outside K. Neither: some member fixes K, is not the identity, and
/// fixes nothing outside K; that member is returned as witness.
pub fn classify_candidate_set<F>(
    k: &PointSet,
    family: &[(String, F)],
    samples: &[Point],
    tol_resid: f64,
) -> Result<Classification>
where
    F: Fn(&[C]) -> Result<Point>,
{
    if family.is_empty() {
        return Err(Error::BadInput("family must be non-empty".into()));
    }
    if k.is_empty() {
        return Err(Error::BadInput("candidate set must be non-empty".into()));
    }
    let names: Vec<String> = family.iter().map(|(n, _)| n.clone()).collect();
    let mut all_identity = true;
    let mut all_fix_extra = true;
    let mut witness = None;
    for (idx, (_, f)) in family.iter().enumerate() {
        let fixes_k = k
            .points()
            .iter()
            .map(|p| Ok(cplx::dist(&f(p)?, p)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .all(|d| d < tol_resid);
        if !fixes_k {
            continue;
        }
        let mut identity = true;
        let mut fixes_extra = false;
        for z in samples {
            let moved = cplx::dist(&f(z)?, z);
            if moved >= tol_resid {
                identity = false;
            } else if !k.contains(z, k.dedup_tol()) {
                fixes_extra = true;
            }
        }
        if !identity {
            all_identity = false;
            if !fixes_extra {
                all_fix_extra = false;
                witness.get_or_insert(idx);
            }
        }
    }
    let verdict = if all_identity {
        Verdict::Determining
    } else if all_fix_extra {
        Verdict::QuasiDetermining
    } else {
        Verdict::Neither
    };
    Ok(Classification {
        verdict,
        family: names,
        witness: if verdict == Verdict::Neither {
            witness
        } else {
            None
        },
        tol: tol_resid,
    })
}
