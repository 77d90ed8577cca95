//! Numeric defaults used across the crate.
//!
//! Every threshold that appears in a public contract is named here; run
//! configurations and JSON artifacts embed this table so results are
//! self-describing.

use std::collections::BTreeMap;

/// Relative coefficient-pruning threshold applied after polynomial arithmetic.
/// Drops |c| < PRUNE_REL * max|c|; keeps exact integer constructions exact.
pub const PRUNE_REL: f64 = 1e-14;

/// Term-count cap for symbolic products and compositions.
pub const TERM_CAP: usize = 1_000_000;

/// Round-trip residual bound for verified automorphisms (relative to the
/// per-factor computation scale).
pub const ROUNDTRIP_RESIDUAL: f64 = 1e-10;

/// Minimum pairwise distance between shift-automorphism roots.
pub const ROOT_SEPARATION: f64 = 1e-8;

/// First-coordinate separation required by preconditioning, as a fraction of
/// the point-set diameter.
pub const PRECONDITION_SEPARATION_FRAC: f64 = 1e-6;

/// Retry budget for seeded linear preconditioning.
pub const PRECONDITION_RETRIES: usize = 64;

/// Aberth root residual bound, relative to the coefficient scale at the root.
pub const ROOT_RESIDUAL_REL: f64 = 1e-10;

/// Smallest admissible leading-coefficient magnitude for root finding.
pub const LEADING_COEFF_MIN: f64 = 1e-12;

/// Cluster radius used to estimate root multiplicities.
pub const ROOT_CLUSTER_TOL: f64 = 1e-5;

/// Default merge tolerance for point sets.
pub const DEDUP_TOL: f64 = 1e-8;

/// |det(J - I)| threshold separating isolated from degenerate fixed points.
pub const ISOLATION_DET_MIN: f64 = 1e-8;

/// Default residual tolerance for the multi-start Newton solver.
pub const FIX_TOL: f64 = 1e-10;

/// Smallest admissible solver tolerance (machine feasibility floor).
pub const FIX_TOL_FLOOR: f64 = 1e-14;

/// Newton start budget per expected fixed point.
pub const STARTS_PER_ROOT: usize = 500;

/// Newton iteration cap per start.
pub const NEWTON_MAX_ITERS: usize = 400;

/// Step-halving budget when a Newton step increases the residual.
pub const NEWTON_DAMPING: usize = 20;

/// Starts wandering beyond DIVERGE_FACTOR * box radius are abandoned.
pub const DIVERGE_FACTOR: f64 = 10.0;

/// Strict interiority margin for unit-ball points: ||z|| < 1 - INTERIOR_MARGIN.
pub const INTERIOR_MARGIN: f64 = 1e-12;

/// Kobayashi invariance and triangle-inequality slack on samples.
pub const METRIC_SLACK: f64 = 1e-9;

/// Start count for constrained sphere minimization.
pub const NEAREST_STARTS: usize = 64;

/// Position tolerance for the projected descent on the sphere.
pub const NEAREST_POS_TOL: f64 = 1e-10;

/// Central finite-difference step for descent gradients.
pub const FD_GRAD_STEP: f64 = 1e-7;

/// Central finite-difference step for Jacobian cross-checks.
pub const FD_JACOBIAN_STEP: f64 = 1e-6;

/// Cluster radius when grouping descent outcomes for the uniqueness gap.
pub const NEAREST_CLUSTER_TOL: f64 = 1e-6;

/// A minimizer closer than this to the half-space boundary is flagged
/// "cap-boundary".
pub const CAP_BOUNDARY_TOL: f64 = 1e-9;

/// Minimum half-space margin for an acceptable line witness.
pub const WITNESS_MARGIN_MIN: f64 = 1e-6;

/// Sphere-membership residual for witnesses and certified points.
pub const SPHERE_RESIDUAL: f64 = 1e-10;

/// Relative tolerance deciding whether a special point lies on a line.
pub const LINE_MEMBER_TOL: f64 = 1e-10;

/// Lines passing closer than this to a sphere center switch to the
/// alternate case of the witness search: a near-center sphere would put the
/// nearest point back on the line and void the certificate.
pub const LINE_CASE_SWITCH: f64 = 1e-2;

/// Interior margin kept between witnesses and the unit sphere.
pub const WITNESS_BALL_MARGIN: f64 = 1e-6;

/// Smallest singular value (normalized columns) certifying non-collinearity.
pub const NONCOLLINEARITY_MIN: f64 = 1e-8;

/// Bisection floor for the rigidity probe offset.
pub const PROBE_FLOOR: f64 = 1e-6;

/// Default initial probe offset for third-fixed-point certificates.
pub const PROBE_OFFSET_DEFAULT: f64 = 1e-2;

/// Residual bound for "fixes this point" checks in rigidity reports.
pub const PAIR_FIX_TOL: f64 = 1e-10;

/// Residual bound for line-fixing and identity checks in rigidity reports.
pub const STAGE_TOL: f64 = 1e-8;

/// Equivariance / base-point residuals for finite-group linearizations.
pub const LINEARIZE_FINITE: f64 = 1e-12;

/// phi'(base) deviation bound for finite-group linearizations.
pub const PHI_PRIME_FINITE: f64 = 1e-10;

/// Monte-Carlo standard-error floor absorbing matrix roundoff.
pub const SE_FLOOR: f64 = 1e-13;

/// Relative tolerance of the unit-eigenvalue direction test.
pub const EIGEN_DIRECTION_REL: f64 = 1e-8;

/// Hypothesis floor for the direction test: smaller vectors sit in the
/// exceptional set and are rejected.
pub const EIGEN_DIRECTION_MIN_NORM: f64 = 1e-10;

/// The full named-tolerance table, embedded in artifacts.
pub fn table() -> BTreeMap<String, f64> {
    let mut t = BTreeMap::new();
    let mut put = |k: &str, v: f64| {
        t.insert(k.to_string(), v);
    };
    put("prune_rel", PRUNE_REL);
    put("term_cap", TERM_CAP as f64);
    put("roundtrip_residual", ROUNDTRIP_RESIDUAL);
    put("root_separation", ROOT_SEPARATION);
    put("precondition_separation_frac", PRECONDITION_SEPARATION_FRAC);
    put("precondition_retries", PRECONDITION_RETRIES as f64);
    put("root_residual_rel", ROOT_RESIDUAL_REL);
    put("leading_coeff_min", LEADING_COEFF_MIN);
    put("root_cluster_tol", ROOT_CLUSTER_TOL);
    put("dedup_tol", DEDUP_TOL);
    put("isolation_det_min", ISOLATION_DET_MIN);
    put("fix_tol", FIX_TOL);
    put("starts_per_root", STARTS_PER_ROOT as f64);
    put("newton_max_iters", NEWTON_MAX_ITERS as f64);
    put("newton_damping", NEWTON_DAMPING as f64);
    put("diverge_factor", DIVERGE_FACTOR);
    put("interior_margin", INTERIOR_MARGIN);
    put("metric_slack", METRIC_SLACK);
    put("nearest_starts", NEAREST_STARTS as f64);
    put("nearest_pos_tol", NEAREST_POS_TOL);
    put("fd_grad_step", FD_GRAD_STEP);
    put("fd_jacobian_step", FD_JACOBIAN_STEP);
    put("nearest_cluster_tol", NEAREST_CLUSTER_TOL);
    put("cap_boundary_tol", CAP_BOUNDARY_TOL);
    put("witness_margin_min", WITNESS_MARGIN_MIN);
    put("sphere_residual", SPHERE_RESIDUAL);
    put("line_member_tol", LINE_MEMBER_TOL);
    put("line_case_switch", LINE_CASE_SWITCH);
    put("witness_ball_margin", WITNESS_BALL_MARGIN);
    put("noncollinearity_min", NONCOLLINEARITY_MIN);
    put("probe_floor", PROBE_FLOOR);
    put("probe_offset_default", PROBE_OFFSET_DEFAULT);
    put("pair_fix_tol", PAIR_FIX_TOL);
    put("stage_tol", STAGE_TOL);
    put("linearize_finite", LINEARIZE_FINITE);
    put("phi_prime_finite", PHI_PRIME_FINITE);
    put("se_floor", SE_FLOOR);
    put("eigen_direction_rel", EIGEN_DIRECTION_REL);
    put("eigen_direction_min_norm", EIGEN_DIRECTION_MIN_NORM);
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_positive_and_complete() {
        let t = table();
        assert!(t.len() >= 30);
        for (k, v) in &t {
            assert!(*v > 0.0, "{k} must be positive");
        }
    }

    #[test]
    fn ordering_sanity() {
        const {
            assert!(FIX_TOL_FLOOR < FIX_TOL);
            assert!(PRUNE_REL < ROOT_SEPARATION);
            assert!(CAP_BOUNDARY_TOL < WITNESS_MARGIN_MIN);
            assert!(PROBE_FLOOR <= PROBE_OFFSET_DEFAULT);
        }
    }
}
