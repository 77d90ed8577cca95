//! The unit ball of ℂ² minus half-space-clipped spherical shells.
//!
//! Shells come in generations marching toward the boundary, alternating the
//! half-space clip, plus two off-center shells near the origin so that every
//! complex line through the domain meets at least one witness sphere on the
//! right side of its clip. A witness on a sphere whose center is off the line
//! yields, for a nearby probe on the line, a unique Kobayashi-nearest boundary
//! point that leaves the line — the third fixed point behind the rigidity
//! certificates.

use crate::ball::{nearest_on_sphere, HalfSpace, NearestOptions, NearestPoint, Sphere};
use crate::cplx::{self, Point, C};
use crate::json::{self, CxJson};
use crate::sample;
use crate::{tol, Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::VecDeque;

/// Radius schedule for the shell families.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellSchedule {
    pub generations: usize,
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
    pub alpha: Vec<CxJson>,
    pub beta: Vec<CxJson>,
}

impl ShellSchedule {
    /// Desk-scale default: ε_k = 10^(−k), δ_k = ε_k/2, six generations,
    /// α = (ε₁, 0), β = (0, ε₁).
    ///
    /// The geometric base must exceed 8: with base 8 the outer radius of the
    /// odd generation-k shell equals the inner radius of the even
    /// generation-(k+1) shell and the closed shells touch.
    pub fn desk_default() -> Self {
        Self::geometric(6, 10.0)
    }

    /// ε_k = base^(−k), δ_k = ε_k/2.
    pub fn geometric(generations: usize, base: f64) -> Self {
        let eps: Vec<f64> = (1..=generations).map(|k| base.powi(-(k as i32))).collect();
        let delta: Vec<f64> = eps.iter().map(|e| e / 2.0).collect();
        let e1 = eps[0];
        ShellSchedule {
            generations,
            eps,
            delta,
            alpha: json::point_to_json(&[C::new(e1, 0.0), cplx::ZERO]),
            beta: json::point_to_json(&[cplx::ZERO, C::new(e1, 0.0)]),
        }
    }

    /// The factorial-growth schedule ε_k = 2^(−(4k)!), δ_k = ε_k/2.
    /// Underflows f64 from the second generation on; building a domain from
    /// it fails with a named constraint error, which is the point of keeping
    /// the constructor.
    pub fn factorial_literal(generations: usize) -> Self {
        let eps: Vec<f64> = (1..=generations)
            .map(|k| {
                let mut fact = 1.0f64;
                for i in 1..=(4 * k) {
                    fact *= i as f64;
                }
                2.0f64.powf(-fact)
            })
            .collect();
        let delta: Vec<f64> = eps.iter().map(|e| e / 2.0).collect();
        let e1 = eps[0];
        ShellSchedule {
            generations,
            eps,
            delta,
            alpha: json::point_to_json(&[C::new(e1, 0.0), cplx::ZERO]),
            beta: json::point_to_json(&[cplx::ZERO, C::new(e1, 0.0)]),
        }
    }

    pub fn alpha_point(&self) -> Point {
        json::point_from_json(&self.alpha)
    }

    pub fn beta_point(&self) -> Point {
        json::point_from_json(&self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.generations;
        if s == 0 {
            return Err(Error::Schedule("needs at least one generation".into()));
        }
        if self.eps.len() != s || self.delta.len() != s {
            return Err(Error::Schedule(
                "eps/delta lists must match the generation count".into(),
            ));
        }
        for k in 0..s {
            let (e, d) = (self.eps[k], self.delta[k]);
            if !(e.is_finite() && d.is_finite()) || d <= 0.0 || e <= 0.0 {
                return Err(Error::Schedule(format!(
                    "generation {}: radii must be positive and representable \
                     (eps = {e:.3e}, delta = {d:.3e})",
                    k + 1
                )));
            }
            if d >= e {
                return Err(Error::Schedule(format!(
                    "generation {}: requires 0 < delta < eps",
                    k + 1
                )));
            }
            if 4.0 * d <= e {
                return Err(Error::Schedule(format!(
                    "generation {}: requires 4*delta > eps (even shell inside odd shell)",
                    k + 1
                )));
            }
            if 4.0 * e >= 1.0 {
                return Err(Error::Schedule(format!(
                    "generation {}: requires 4*eps < 1 (shells inside the unit ball)",
                    k + 1
                )));
            }
        }
        for k in 0..s - 1 {
            if self.eps[k + 1] >= self.delta[k] {
                return Err(Error::Schedule(format!(
                    "generations {} -> {}: requires eps_(k+1) < delta_k (ordered toward the boundary)",
                    k + 1,
                    k + 2
                )));
            }
        }
        if self.alpha.len() != 2 || self.beta.len() != 2 {
            return Err(Error::Schedule("alpha/beta must lie in C^2".into()));
        }
        let e1 = self.eps[0];
        if cplx::norm(&self.alpha_point()) > e1 || cplx::norm(&self.beta_point()) > e1 {
            return Err(Error::Schedule(
                "special centers must satisfy |alpha|, |beta| <= eps_1".into(),
            ));
        }
        Ok(())
    }
}

/// One closed shell: {inner ≤ ‖z − center‖ ≤ outer} ∩ half-space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Shell {
    /// 1-based Ω index in the construction order.
    pub label: usize,
    pub center: Vec<CxJson>,
    pub inner: f64,
    pub outer: f64,
    pub clip: HalfSpace,
}

impl Shell {
    pub fn center_point(&self) -> Point {
        json::point_from_json(&self.center)
    }

    /// Closed-set membership.
    pub fn contains(&self, z: &[C]) -> bool {
        let d = cplx::dist(z, &self.center_point());
        self.inner <= d && d <= self.outer && self.clip.margin(z) >= 0.0
    }

    /// The sphere carrying line witnesses: the outer boundary sphere.
    pub fn witness_sphere(&self) -> Sphere {
        Sphere::new(&self.center_point(), self.outer)
    }
}

/// The domain: open unit ball minus the closed shells.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellDomain {
    pub schedule: ShellSchedule,
    pub shells: Vec<Shell>,
}

/// Materializes the shell list and checks the same-center disjointness and
/// non-emptiness invariants.
pub fn build_domain(schedule: ShellSchedule) -> Result<ShellDomain> {
    schedule.validate()?;
    let alpha = schedule.alpha_point();
    let beta = schedule.beta_point();
    let (e1, d1) = (schedule.eps[0], schedule.delta[0]);
    let mut shells = Vec::with_capacity(2 * schedule.generations + 2);
    shells.push(Shell {
        label: 1,
        center: json::point_to_json(&alpha),
        inner: 1.0 - e1,
        outer: 1.0 - d1,
        clip: HalfSpace::ImZ2AtLeast(-0.5),
    });
    shells.push(Shell {
        label: 2,
        center: json::point_to_json(&beta),
        inner: 1.0 - 4.0 * e1,
        outer: 1.0 - 4.0 * d1,
        clip: HalfSpace::ImZ2AtMost(0.5),
    });
    for k in 0..schedule.generations {
        let (e, d) = (schedule.eps[k], schedule.delta[k]);
        shells.push(Shell {
            label: 2 * (k + 1) + 1,
            center: json::point_to_json(&[cplx::ZERO, cplx::ZERO]),
            inner: 1.0 - e,
            outer: 1.0 - d,
            clip: HalfSpace::ImZ2AtLeast(-0.5),
        });
        shells.push(Shell {
            label: 2 * (k + 1) + 2,
            center: json::point_to_json(&[cplx::ZERO, cplx::ZERO]),
            inner: 1.0 - 4.0 * e,
            outer: 1.0 - 4.0 * d,
            clip: HalfSpace::ImZ2AtMost(0.5),
        });
    }
    for shell in &shells {
        if !(0.0 < shell.inner && shell.inner < shell.outer) {
            return Err(Error::Schedule(format!(
                "shell {}: requires 0 < inner < outer",
                shell.label
            )));
        }
    }
    // strict interval disjointness for shells sharing a center
    for i in 0..shells.len() {
        for j in i + 1..shells.len() {
            if cplx::dist(&shells[i].center_point(), &shells[j].center_point()) > 0.0 {
                continue;
            }
            let (a, b) = (&shells[i], &shells[j]);
            if a.inner <= b.outer && b.inner <= a.outer {
                return Err(Error::Schedule(format!(
                    "shells {} and {} share a center with overlapping radius \
                     intervals [{:.6}, {:.6}] and [{:.6}, {:.6}]",
                    a.label, b.label, a.inner, a.outer, b.inner, b.outer
                )));
            }
        }
    }
    let domain = ShellDomain { schedule, shells };
    if !domain.contains(&[cplx::ZERO, cplx::ZERO]) {
        return Err(Error::Schedule(
            "origin must belong to the domain (special shells exclude it)".into(),
        ));
    }
    Ok(domain)
}

impl ShellDomain {
    /// Open-domain membership: inside the unit ball and outside every shell.
    pub fn contains(&self, z: &[C]) -> bool {
        if z.len() != 2 || cplx::norm(z) >= 1.0 {
            return false;
        }
        !self.shells.iter().any(|s| s.contains(z))
    }

    /// Deterministic samples of D within the centered ball of radius rmax.
    pub fn sample(&self, count: usize, rmax: f64, seed: u64) -> Vec<Point> {
        let mut out = Vec::with_capacity(count);
        let mut rng = sample::rng(seed.wrapping_add(0xD0));
        let mut guard = 0usize;
        while out.len() < count && guard < 1000 * count.max(1) {
            guard += 1;
            let z = sample::ball_point(&mut rng, 2, rmax);
            if self.contains(&z) {
                out.push(z);
            }
        }
        out
    }

    /// Grid-graph connectivity diagnostic at the given resolution (an
    /// empirical check, not a proof). Walks the axis-adjacency graph of grid
    /// cells whose centers lie in D and reports how many are reachable from
    /// the component of the origin.
    ///
    /// The shell around alpha is internally tangent to the even origin shell
    /// (1 − ε₁ = 1 − 4δ₁ + ‖α‖ when δ = ε/2 and ‖α‖ = ε₁), so a thin sliver
    /// near the tangency connects to the bulk only through a squeeze narrower
    /// than coarse grids; expect fractions slightly below 1.
    pub fn connectivity_diagnostic(&self, resolution: f64) -> ConnectivityReport {
        let m = (2.0 / resolution).round() as usize + 1;
        let coord = |i: usize| -> f64 { -1.0 + (i as f64) * resolution };
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * m + j) * m + k) * m + l;
        let total = m * m * m * m;
        let mut inside = vec![false; total];
        let mut count = 0usize;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let z = [
                            C::new(coord(i), coord(j)),
                            C::new(coord(k), coord(l)),
                        ];
                        if self.contains(&z) {
                            inside[idx(i, j, k, l)] = true;
                            count += 1;
                        }
                    }
                }
            }
        }
        if count == 0 {
            return ConnectivityReport {
                resolution,
                cells_in_domain: 0,
                reached_from_origin: 0,
            };
        }
        // start from the cell containing the origin
        let mid = m / 2;
        let start = idx(mid, mid, mid, mid);
        if !inside[start] {
            return ConnectivityReport {
                resolution,
                cells_in_domain: count,
                reached_from_origin: 0,
            };
        }
        let mut seen = vec![false; total];
        let mut queue = VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        let mut reached = 1usize;
        while let Some(cur) = queue.pop_front() {
            let l = cur % m;
            let k = (cur / m) % m;
            let j = (cur / (m * m)) % m;
            let i = cur / (m * m * m);
            let mut push = |ni: usize, nj: usize, nk: usize, nl: usize| {
                let nidx = idx(ni, nj, nk, nl);
                if inside[nidx] && !seen[nidx] {
                    seen[nidx] = true;
                    reached += 1;
                    queue.push_back(nidx);
                }
            };
            if i > 0 {
                push(i - 1, j, k, l);
            }
            if i + 1 < m {
                push(i + 1, j, k, l);
            }
            if j > 0 {
                push(i, j - 1, k, l);
            }
            if j + 1 < m {
                push(i, j + 1, k, l);
            }
            if k > 0 {
                push(i, j, k - 1, l);
            }
            if k + 1 < m {
                push(i, j, k + 1, l);
            }
            if l > 0 {
                push(i, j, k, l - 1);
            }
            if l + 1 < m {
                push(i, j, k, l + 1);
            }
        }
        ConnectivityReport {
            resolution,
            cells_in_domain: count,
            reached_from_origin: reached,
        }
    }
}

/// Outcome of the grid connectivity walk.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub resolution: f64,
    pub cells_in_domain: usize,
    pub reached_from_origin: usize,
}

impl ConnectivityReport {
    pub fn fraction(&self) -> f64 {
        if self.cells_in_domain == 0 {
            0.0
        } else {
            self.reached_from_origin as f64 / self.cells_in_domain as f64
        }
    }
}

/// A witness for a line: a point of L on a shell's witness sphere with a
/// strictly positive half-space margin.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineWitness {
    /// 1-based Ω index of the shell.
    pub omega: usize,
    /// Index into the domain's shell list.
    pub shell_index: usize,
    pub point: Vec<CxJson>,
    pub margin: f64,
    pub sphere: Sphere,
    pub clip: HalfSpace,
    /// Which case of the search produced this witness.
    pub case: WitnessCase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessCase {
    GenericLine,
    ThroughOrigin,
    ThroughAlpha,
    ThroughBeta,
}

impl LineWitness {
    pub fn point_coords(&self) -> Point {
        json::point_from_json(&self.point)
    }
}

/// Distance of a point q to the complex line {a + t u}, computed from the
/// componentwise perpendicular residual (the norm² form cancels to a noise
/// floor of ~1e-8 at unit scale).
fn line_distance(q: &[C], a: &[C], u: &[C]) -> f64 {
    let v = cplx::sub(q, a);
    let u2 = cplx::norm(u).powi(2);
    let t = cplx::inner(&v, u) / C::new(u2, 0.0); // v = t·u + v_perp, v_perp ⊥ u
    let perp: Point = v.iter().zip(u).map(|(x, d)| x - d * t).collect();
    cplx::norm(&perp)
}

/// Best witness on one shell's sphere, in closed form.
///
/// The line meets the sphere in a circle of the t-plane; the half-space
/// margin and the ball constraint are both affine in (cos θ, sin θ) along
/// that circle, so the constrained maximum is explicit.
fn witness_on_shell(shell: &Shell, a: &[C], u: &[C]) -> Option<(Point, f64)> {
    let c0 = shell.center_point();
    let radius = shell.outer;
    let v = cplx::sub(a, &c0);
    let u2 = cplx::norm(u).powi(2);
    let w = cplx::inner(u, &v); // ⟨u, v⟩
    let t_c = -w.conj() / C::new(u2, 0.0);
    let rho2 = w.norm_sqr() / (u2 * u2) - (cplx::norm(&v).powi(2) - radius * radius) / u2;
    if rho2 <= 1e-18 {
        return None; // misses or grazes the sphere
    }
    let rho = rho2.sqrt();

    // z(θ) = z_c + ρ e^{iθ} u with z_c = a + t_c u
    let z_c: Point = a.iter().zip(u).map(|(x, d)| x + d * t_c).collect();

    // ball constraint ‖z(θ)‖² = A + B cosθ + C sinθ ≤ (1 − margin)²
    let q = cplx::inner(u, &z_c); // ⟨u, z_c⟩: ‖z‖² = ‖z_c‖² + ρ²‖u‖² + 2ρ Re(e^{iθ} q̄)… expand below
    let a_const = cplx::norm(&z_c).powi(2) + rho2 * u2;
    // 2 Re(ρ e^{iθ} ⟨u, z_c⟩^-): Re(e^{iθ}(x+iy)) = x cosθ − y sinθ with x+iy = conj(q)
    let b_cos = 2.0 * rho * q.re;
    let c_sin = 2.0 * rho * q.im;
    let cap = (1.0 - tol::WITNESS_BALL_MARGIN).powi(2);

    // margin(θ) = m0 + ρ (g1 cosθ + g2 sinθ)
    let u2nd = u[1];
    let z_c_im2 = z_c[1].im;
    let (m0, g1, g2) = match shell.clip {
        HalfSpace::ImZ2AtLeast(bound) => (z_c_im2 - bound, u2nd.im, u2nd.re),
        HalfSpace::ImZ2AtMost(bound) => (bound - z_c_im2, -u2nd.im, -u2nd.re),
    };
    let g_norm = (g1 * g1 + g2 * g2).sqrt();

    let margin_at = |theta: f64| -> f64 { m0 + rho * (g1 * theta.cos() + g2 * theta.sin()) };
    let ball_ok = |theta: f64| -> bool {
        a_const + b_cos * theta.cos() + c_sin * theta.sin() <= cap
    };

    // feasible arc of the ball constraint
    let amp = (b_cos * b_cos + c_sin * c_sin).sqrt();
    let theta_best = if amp < 1e-300 || a_const + amp <= cap {
        // whole circle feasible: unconstrained affine maximum
        if g_norm == 0.0 {
            0.0
        } else {
            g2.atan2(g1)
        }
    } else {
        let kappa = (cap - a_const) / amp;
        if kappa < -1.0 {
            return None; // circle entirely outside the ball margin
        }
        let psi = c_sin.atan2(b_cos); // cos(θ−ψ) ≤ κ bounds the feasible arc
        let half = kappa.clamp(-1.0, 1.0).acos();
        // feasible: θ ∈ [ψ + half, ψ + 2π − half]
        let lo = psi + half;
        let hi = psi + std::f64::consts::TAU - half;
        if g_norm == 0.0 {
            (lo + hi) / 2.0
        } else {
            let chi = g2.atan2(g1);
            // wrap chi into [lo, hi] if possible
            let mut cand = chi;
            while cand < lo {
                cand += std::f64::consts::TAU;
            }
            if cand <= hi {
                cand
            } else if margin_at(lo) >= margin_at(hi) {
                lo
            } else {
                hi
            }
        }
    };

    if !ball_ok(theta_best) {
        return None;
    }
    let margin = margin_at(theta_best);
    if margin <= tol::WITNESS_MARGIN_MIN {
        return None;
    }
    let t = t_c + C::new(rho * theta_best.cos(), rho * theta_best.sin());
    let mut z: Point = a.iter().zip(u).map(|(x, d)| x + d * t).collect();
    // renormalize exactly onto the sphere
    let dir = cplx::sub(&z, &c0);
    let nd = cplx::norm(&dir);
    z = c0
        .iter()
        .zip(&dir)
        .map(|(c, d)| c + d * C::new(radius / nd, 0.0))
        .collect();
    let margin_final = match shell.clip {
        HalfSpace::ImZ2AtLeast(bound) => z[1].im - bound,
        HalfSpace::ImZ2AtMost(bound) => bound - z[1].im,
    };
    if margin_final <= tol::WITNESS_MARGIN_MIN {
        return None;
    }
    Some((z, margin_final))
}

/// Finds a line witness for the pair (a, b), following the case split on
/// whether the line passes near the origin or the special centers. Scans
/// candidate shells boundary-ward and returns the first sphere carrying a
/// point of L with half-space margin above WITNESS_MARGIN_MIN.
pub fn line_witness(domain: &ShellDomain, a: &[C], b: &[C]) -> Result<LineWitness> {
    if a.len() != 2 || b.len() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: a.len().max(b.len()),
        });
    }
    if !domain.contains(a) || !domain.contains(b) {
        return Err(Error::Precondition(
            "both endpoints must belong to the domain".into(),
        ));
    }
    let u = cplx::sub(b, a);
    if cplx::norm(&u) == 0.0 {
        return Err(Error::Precondition("endpoints coincide".into()));
    }
    let origin = [cplx::ZERO, cplx::ZERO];
    let alpha = domain.schedule.alpha_point();
    let beta = domain.schedule.beta_point();
    let near_origin = line_distance(&origin, a, &u) < tol::LINE_CASE_SWITCH;
    let near_alpha = line_distance(&alpha, a, &u) < tol::LINE_CASE_SWITCH;
    let near_beta = line_distance(&beta, a, &u) < tol::LINE_CASE_SWITCH;

    let (case, candidate_indices): (WitnessCase, Vec<usize>) = if !near_origin {
        (
            WitnessCase::GenericLine,
            (2..domain.shells.len()).collect(),
        )
    } else if near_alpha {
        (WitnessCase::ThroughAlpha, vec![1])
    } else if near_beta {
        (WitnessCase::ThroughBeta, vec![0])
    } else {
        (WitnessCase::ThroughOrigin, vec![0, 1])
    };

    for idx in candidate_indices {
        let shell = &domain.shells[idx];
        if let Some((z, margin)) = witness_on_shell(shell, a, &u) {
            return Ok(LineWitness {
                omega: shell.label,
                shell_index: idx,
                point: json::point_to_json(&z),
                margin,
                sphere: shell.witness_sphere(),
                clip: shell.clip,
                case,
            });
        }
    }
    Err(Error::TruncationFailure(format!(
        "no shell sphere meets the line with margin > {:.1e} \
         (case {:?}, dist to origin {:.3e})",
        tol::WITNESS_MARGIN_MIN,
        case,
        line_distance(&origin, a, &u),
    )))
}

/// Smallest singular value of the normalized-column matrix [b−a | c−a];
/// zero means collinear, and values above NONCOLLINEARITY_MIN certify a
/// genuine triangle.
pub fn noncollinearity(a: &[C], b: &[C], c: &[C]) -> f64 {
    let v1 = cplx::sub(b, a);
    let v2 = cplx::sub(c, a);
    let (n1, n2) = (cplx::norm(&v1), cplx::norm(&v2));
    if n1 == 0.0 || n2 == 0.0 {
        return 0.0;
    }
    let n = a.len();
    let mut m = DMatrix::<C>::zeros(n, 2);
    for i in 0..n {
        m[(i, 0)] = v1[i] / C::new(n1, 0.0);
        m[(i, 1)] = v2[i] / C::new(n2, 0.0);
    }
    let sv = m.svd(false, false).singular_values;
    sv[sv.len() - 1]
}

/// A full rigidity certificate for a pair (a, b).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RigidityCertificate {
    pub pair_a: Vec<CxJson>,
    pub pair_b: Vec<CxJson>,
    pub witness: LineWitness,
    pub probe: Vec<CxJson>,
    pub probe_offset: f64,
    pub bisections: usize,
    pub third_point: Vec<CxJson>,
    pub third_distance: f64,
    pub uniqueness_gap: Option<f64>,
    pub cap_boundary: bool,
    pub non_collinearity: f64,
    pub sphere_residual: f64,
    pub third_halfspace_margin: f64,
    pub tolerances: BTreeMap<String, f64>,
}

impl RigidityCertificate {
    pub fn third_coords(&self) -> Point {
        json::point_from_json(&self.third_point)
    }

    pub fn probe_coords(&self) -> Point {
        json::point_from_json(&self.probe)
    }

    /// Recomputes every residual from the stored points and reproduces the
    /// pass/fail verdict.
    pub fn recheck(&self) -> bool {
        let a = json::point_from_json(&self.pair_a);
        let b = json::point_from_json(&self.pair_b);
        let z = self.witness.point_coords();
        let c = self.third_coords();
        let p = self.probe_coords();
        let sphere = &self.witness.sphere;
        let u = cplx::sub(&b, &a);
        let checks = [
            sphere.membership_residual(&z) < tol::SPHERE_RESIDUAL,
            self.witness.clip.margin(&z) > tol::WITNESS_MARGIN_MIN,
            sphere.membership_residual(&c) < 1e-6,
            self.witness.clip.margin(&c) > tol::CAP_BOUNDARY_TOL,
            noncollinearity(&a, &b, &c) > tol::NONCOLLINEARITY_MIN,
            line_distance(&p, &a, &u) < 1e-8,
            !self.cap_boundary,
        ];
        checks.iter().all(|&ok| ok)
    }
}

/// Builds the rigidity certificate: places a probe on the line near the
/// witness, bisecting the offset downward until the constrained nearest
/// point is cap-interior, unique and off the line.
pub fn third_fixed_point(
    domain: &ShellDomain,
    a: &[C],
    b: &[C],
    probe_offset: f64,
) -> Result<RigidityCertificate> {
    let witness = line_witness(domain, a, b)?;
    let z = witness.point_coords();
    let sphere = witness.sphere.clone();
    let c0 = sphere.center_point();
    let u = cplx::sub(b, a);
    let u_norm = cplx::norm(&u);
    let unit: Point = u.iter().map(|x| x / C::new(u_norm, 0.0)).collect();

    // inward direction along the line: decrease ‖z + s·unit − c0‖
    let radial = cplx::inner(&unit, &cplx::sub(&z, &c0)).re;
    let tangent = radial.abs() < 1e-6 * sphere.radius;
    let sign = if radial > 0.0 { -1.0 } else { 1.0 };

    let mut offset = probe_offset.max(tol::PROBE_FLOOR);
    let mut bisections = 0usize;
    let mut last_failure;
    loop {
        let p: Point = z
            .iter()
            .zip(&unit)
            .map(|(x, d)| x + d * C::new(sign * offset, 0.0))
            .collect();
        let feasible_probe = cplx::norm(&p) < 1.0 - 1e-6
            && (cplx::dist(&p, &c0) - sphere.radius).abs() > 1e-9;
        if feasible_probe {
            match nearest_on_sphere(&p, &sphere, Some(witness.clip), NearestOptions::default()) {
                Ok(res) => {
                    let c = res.point_coords();
                    let ncol = noncollinearity(a, b, &c);
                    let gap_ok = res.uniqueness_gap.is_none_or(|g| g > 0.0);
                    if !res.cap_boundary && gap_ok && ncol > tol::NONCOLLINEARITY_MIN {
                        return finish_certificate(
                            a, b, witness, p, offset, bisections, res, ncol,
                        );
                    }
                    last_failure = format!(
                        "offset {offset:.3e}: cap_boundary={}, gap={:?}, non_collinearity={ncol:.3e}",
                        res.cap_boundary, res.uniqueness_gap
                    );
                }
                Err(e) => {
                    last_failure = format!("offset {offset:.3e}: {e}");
                }
            }
        } else {
            last_failure = format!("offset {offset:.3e}: probe infeasible");
        }
        offset /= 2.0;
        bisections += 1;
        if offset < tol::PROBE_FLOOR {
            return Err(Error::Certificate(format!(
                "probe bisection exhausted below {:.1e}{}: {last_failure}",
                tol::PROBE_FLOOR,
                if tangent { " (line tangent to witness sphere)" } else { "" },
            )));
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_certificate(
    a: &[C],
    b: &[C],
    witness: LineWitness,
    probe: Point,
    probe_offset: f64,
    bisections: usize,
    res: NearestPoint,
    non_collinearity: f64,
) -> Result<RigidityCertificate> {
    let c = res.point_coords();
    let sphere_residual = witness.sphere.membership_residual(&c);
    let third_halfspace_margin = witness.clip.margin(&c);
    let cert = RigidityCertificate {
        pair_a: json::point_to_json(a),
        pair_b: json::point_to_json(b),
        witness,
        probe: json::point_to_json(&probe),
        probe_offset,
        bisections,
        third_point: json::point_to_json(&c),
        third_distance: res.distance,
        uniqueness_gap: res.uniqueness_gap,
        cap_boundary: res.cap_boundary,
        non_collinearity,
        sphere_residual,
        third_halfspace_margin,
        tolerances: tol::table(),
    };
    if !cert.recheck() {
        return Err(Error::Certificate(
            "certificate residuals failed the final recheck".into(),
        ));
    }
    Ok(cert)
}

/// Per-candidate stage outcomes for the rigidity enactment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateReport {
    pub label: String,
    pub fixes_pair: bool,
    pub pair_residual: f64,
    pub fixes_line: bool,
    pub line_residual: f64,
    pub fixes_third: bool,
    pub third_residual: f64,
    pub is_identity_on_samples: bool,
    pub identity_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RigidityReport {
    pub certificate: RigidityCertificate,
    pub candidates: Vec<CandidateReport>,
    pub domain_samples: usize,
    pub tolerances: BTreeMap<String, f64>,
}

type Candidate<'a> = (String, &'a dyn Fn(&[C]) -> Result<Point>);

/// Walks each candidate through the proof chain: fix the pair, fix the line,
/// fix the certified third point, be the identity on domain samples. The
/// report records where each candidate stops.
pub fn rigidity_report(
    domain: &ShellDomain,
    a: &[C],
    b: &[C],
    candidates: &[Candidate<'_>],
    probe_offset: f64,
    seed: u64,
) -> Result<RigidityReport> {
    let certificate = third_fixed_point(domain, a, b, probe_offset)?;
    let c = certificate.third_coords();
    let line_pts = crate::ball::line_ball_samples(a, b, 50)?;
    let domain_pts = domain.sample(100, 0.95, seed);
    let mut out = Vec::with_capacity(candidates.len());
    for (label, f) in candidates {
        let pair_residual = cplx::dist(&f(a)?, a).max(cplx::dist(&f(b)?, b));
        let fixes_pair = pair_residual < tol::PAIR_FIX_TOL;
        let mut line_residual = 0.0f64;
        for z in &line_pts {
            line_residual = line_residual.max(cplx::dist(&f(z)?, z));
        }
        let fixes_line = line_residual < tol::STAGE_TOL;
        let third_residual = cplx::dist(&f(&c)?, &c);
        let fixes_third = third_residual < tol::STAGE_TOL;
        let mut identity_residual = 0.0f64;
        for z in &domain_pts {
            identity_residual = identity_residual.max(cplx::dist(&f(z)?, z));
        }
        let is_identity_on_samples = identity_residual < tol::STAGE_TOL;
        out.push(CandidateReport {
            label: label.clone(),
            fixes_pair,
            pair_residual,
            fixes_line,
            line_residual,
            fixes_third,
            third_residual,
            is_identity_on_samples,
            identity_residual,
        });
    }
    Ok(RigidityReport {
        certificate,
        candidates: out,
        domain_samples: domain_pts.len(),
        tolerances: tol::table(),
    })
}
