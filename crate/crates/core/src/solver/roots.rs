//! Univariate complex root finding: simultaneous Aberth–Ehrlich iteration
//! from a perturbed-circle start, polished by Newton, with multiplicities
//! estimated from cluster radii.

use crate::cplx::{self, C};
use crate::poly::MultiPoly;
use crate::{tol, Error, Result};

/// A root with its estimated multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: C,
    pub multiplicity: usize,
}

/// Horner evaluation of a dense coefficient vector (ascending powers).
fn horner(coeffs: &[C], z: C) -> C {
    let mut acc = cplx::ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn derivative_coeffs(coeffs: &[C]) -> Vec<C> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * C::new(i as f64, 0.0))
        .collect()
}

/// Magnitude scale of the polynomial at |z| = r, used for residual bounds.
fn coeff_scale(coeffs: &[C], root: C) -> f64 {
    let r = root.norm().max(1.0);
    let mut scale = 0.0;
    let mut rp = 1.0;
    for c in coeffs {
        scale += c.norm() * rp;
        rp *= r;
    }
    scale.max(1.0)
}

/// All complex roots of a polynomial in one variable.
///
/// The leading coefficient must have magnitude above LEADING_COEFF_MIN; the
/// returned roots satisfy |p(root)| < ROOT_RESIDUAL_REL * coefficient scale
/// and are sorted canonically.
pub fn univariate_roots(p: &MultiPoly) -> Result<Vec<Root>> {
    let (_, coeffs) = p
        .as_univariate()
        .ok_or_else(|| Error::BadInput("polynomial is not univariate".into()))?;
    univariate_roots_from_coeffs(&coeffs)
}

pub fn univariate_roots_from_coeffs(coeffs: &[C]) -> Result<Vec<Root>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Err(Error::DegreeDegenerate(
            coeffs.first().map(|c| c.norm()).unwrap_or(0.0),
        ));
    }
    let lead = coeffs[degree];
    if lead.norm() <= tol::LEADING_COEFF_MIN {
        return Err(Error::DegreeDegenerate(lead.norm()));
    }
    // monic normalization
    let monic: Vec<C> = coeffs.iter().map(|&c| c / lead).collect();

    if degree == 1 {
        let root = -monic[0];
        return Ok(vec![Root {
            value: root,
            multiplicity: 1,
        }]);
    }

    // perturbed-circle initialization with the Cauchy radius bound
    let radius = 1.0
        + monic[..degree]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut zs: Vec<C> = (0..degree)
        .map(|j| {
            let angle = std::f64::consts::TAU * (j as f64 + 0.37) / degree as f64 + 0.4;
            C::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect();

    let dcoeffs = derivative_coeffs(&monic);
    let mut converged = false;
    for _sweep in 0..400 {
        let mut max_step = 0.0f64;
        for j in 0..degree {
            let pj = horner(&monic, zs[j]);
            let dj = horner(&dcoeffs, zs[j]);
            if pj == cplx::ZERO {
                continue;
            }
            let newton = if dj == cplx::ZERO {
                // nudge off a critical point
                C::new(1e-8, 1e-8)
            } else {
                pj / dj
            };
            let mut s = cplx::ZERO;
            for m in 0..degree {
                if m != j {
                    let d = zs[j] - zs[m];
                    if d != cplx::ZERO {
                        s += cplx::ONE / d;
                    }
                }
            }
            let denom = cplx::ONE - newton * s;
            let step = if denom == cplx::ZERO { newton } else { newton / denom };
            zs[j] -= step;
            max_step = max_step.max(step.norm() / (1.0 + zs[j].norm()));
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    // Newton polish
    for z in zs.iter_mut() {
        for _ in 0..8 {
            let pv = horner(&monic, *z);
            let dv = horner(&dcoeffs, *z);
            if dv == cplx::ZERO || pv == cplx::ZERO {
                break;
            }
            let step = pv / dv;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *z -= step;
            if step.norm() < 1e-16 * (1.0 + z.norm()) {
                break;
            }
        }
    }

    // residual gate (scale-relative, in the original coefficients)
    for &z in &zs {
        let res = horner(coeffs, z).norm();
        let scale = coeff_scale(coeffs, z);
        if res > tol::ROOT_RESIDUAL_REL * scale {
            return Err(Error::Numerical(format!(
                "root residual {res:.3e} exceeds {:.1e} x scale {scale:.3e}{}",
                tol::ROOT_RESIDUAL_REL,
                if converged { "" } else { " (iteration stalled)" },
            )));
        }
    }

    // multiplicity from cluster radius
    zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut roots: Vec<Root> = Vec::new();
    let mut used = vec![false; zs.len()];
    for i in 0..zs.len() {
        if used[i] {
            continue;
        }
        let mut cluster = vec![zs[i]];
        used[i] = true;
        let ctol = tol::ROOT_CLUSTER_TOL * (1.0 + zs[i].norm());
        for (m, zm) in zs.iter().enumerate().skip(i + 1) {
            if !used[m] && (zm - zs[i]).norm() < ctol {
                cluster.push(*zm);
                used[m] = true;
            }
        }
        let mean = cluster.iter().sum::<C>() / C::new(cluster.len() as f64, 0.0);
        roots.push(Root {
            value: mean,
            multiplicity: cluster.len(),
        });
    }
    roots.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn find(roots: &[Root], target: C, tol: f64) -> bool {
        roots.iter().any(|r| (r.value - target).norm() < tol)
    }

    #[test]
    fn quadratic_z2_minus_1() {
        let p = MultiPoly::from_terms(1, vec![(vec![2], cplx::ONE), (vec![0], c(-1.0, 0.0))])
            .unwrap();
        let roots = univariate_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(find(&roots, cplx::ONE, 1e-12));
        assert!(find(&roots, c(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn quartic_with_known_roots() {
        let targets = [cplx::ZERO, cplx::ONE, c(-1.0, 0.0), c(0.0, 2.0)];
        let p = MultiPoly::from_roots(1, 0, &targets).unwrap();
        let roots = univariate_roots(&p).unwrap();
        assert_eq!(roots.len(), 4);
        for t in targets {
            assert!(find(&roots, t, 1e-12), "missing root {t}");
        }
    }

    #[test]
    fn wilkinson_style_product() {
        let targets: Vec<C> = (1..=10).map(|k| c(k as f64, 0.0)).collect();
        let p = MultiPoly::from_roots(1, 0, &targets).unwrap();
        let roots = univariate_roots(&p).unwrap();
        assert_eq!(roots.len(), 10);
        for t in targets {
            assert!(find(&roots, t, 1e-6), "missing root {t}");
        }
    }

    #[test]
    fn double_root_multiplicity() {
        // (z - 1)^2
        let p = MultiPoly::from_terms(
            1,
            vec![
                (vec![2], cplx::ONE),
                (vec![1], c(-2.0, 0.0)),
                (vec![0], cplx::ONE),
            ],
        )
        .unwrap();
        let roots = univariate_roots(&p).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert!((roots[0].value - cplx::ONE).norm() < 1e-6);
    }

    #[test]
    fn degenerate_leading_coefficient_is_rejected() {
        let p = MultiPoly::from_terms(
            1,
            vec![(vec![1], c(1e-13, 0.0)), (vec![0], cplx::ONE)],
        )
        .unwrap();
        assert!(matches!(
            univariate_roots(&p),
            Err(Error::DegreeDegenerate(_))
        ));
        let constant = MultiPoly::constant(1, cplx::ONE);
        assert!(univariate_roots(&constant).is_err());
    }

    #[test]
    fn multivariate_input_is_rejected() {
        let p = MultiPoly::from_terms(2, vec![(vec![1, 1], cplx::ONE)]).unwrap();
        assert!(univariate_roots(&p).is_err());
    }
}
