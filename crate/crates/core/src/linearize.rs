//! Linearization of isotropy-group actions by group averaging, and the
//! unit-eigenvalue direction test for maps fixing two points.
//!
//! Given maps fixing a base point z, the averaged map
//! φ(ζ) = avg over f of f′(z)⁻¹ (f(ζ) − z) satisfies φ(z) = 0, φ′(z) = id and
//! intertwines each group element with its derivative at z. Finite groups
//! average exactly; compact groups are sampled Monte-Carlo with a reported
//! standard error.

use crate::cplx::{self, Point, C};
use crate::sample;
use crate::{tol, Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

type MapFn = Arc<dyn Fn(&[C]) -> Result<Point> + Send + Sync>;

/// One isotropy-group element: an evaluator plus its derivative at the base
/// point.
#[derive(Clone)]
pub struct GroupElement {
    pub label: String,
    map: MapFn,
    deriv_at_base: DMatrix<C>,
}

impl GroupElement {
    pub fn new(
        label: impl Into<String>,
        map: MapFn,
        deriv_at_base: DMatrix<C>,
    ) -> Self {
        GroupElement {
            label: label.into(),
            map,
            deriv_at_base,
        }
    }

    pub fn linear(label: impl Into<String>, matrix: DMatrix<C>) -> Self {
        let m = matrix.clone();
        GroupElement {
            label: label.into(),
            map: Arc::new(move |z: &[C]| {
                Ok((0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * z[c]).sum())
                    .collect())
            }),
            deriv_at_base: matrix,
        }
    }

    pub fn eval(&self, z: &[C]) -> Result<Point> {
        (self.map)(z)
    }

    pub fn deriv_at_base(&self) -> &DMatrix<C> {
        &self.deriv_at_base
    }
}

/// How sampler elements are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    /// The full finite group is enumerated; averages are exact.
    FiniteGroup,
    /// Elements are drawn from a seeded generator; averages carry
    /// Monte-Carlo error.
    MonteCarlo,
}

/// A source of isotropy elements at a designated base point.
pub struct IsotropySampler {
    pub description: String,
    base: Point,
    exactness: Exactness,
    finite: Vec<GroupElement>,
    generator: Option<Box<dyn Fn(u64) -> GroupElement + Send + Sync>>,
}

impl IsotropySampler {
    pub fn finite(
        description: impl Into<String>,
        base: Point,
        elements: Vec<GroupElement>,
    ) -> Result<Self> {
        let s = IsotropySampler {
            description: description.into(),
            base,
            exactness: Exactness::FiniteGroup,
            finite: elements,
            generator: None,
        };
        s.check_elements(&s.finite)?;
        Ok(s)
    }

    pub fn monte_carlo(
        description: impl Into<String>,
        base: Point,
        generator: Box<dyn Fn(u64) -> GroupElement + Send + Sync>,
    ) -> Result<Self> {
        let s = IsotropySampler {
            description: description.into(),
            base,
            exactness: Exactness::MonteCarlo,
            finite: Vec::new(),
            generator: Some(generator),
        };
        let probe: Vec<GroupElement> = (0..4).map(|i| s.generator.as_ref().unwrap()(i)).collect();
        s.check_elements(&probe)?;
        Ok(s)
    }

    fn check_elements(&self, elements: &[GroupElement]) -> Result<()> {
        for g in elements {
            let moved = cplx::dist(&g.eval(&self.base)?, &self.base);
            if moved > 1e-12 {
                return Err(Error::Precondition(format!(
                    "element `{}` moves the base point by {moved:.3e}",
                    g.label
                )));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &[C] {
        &self.base
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    /// Draws the elements used for an average of nominal size n.
    fn draw(&self, n: usize) -> Vec<GroupElement> {
        match self.exactness {
            Exactness::FiniteGroup => self.finite.clone(),
            Exactness::MonteCarlo => {
                let gen = self.generator.as_ref().expect("monte carlo sampler");
                (0..n as u64).map(gen).collect()
            }
        }
    }
}

/// Deterministic pairwise (tree) summation of points.
fn pairwise_sum(mut terms: Vec<Point>) -> Point {
    assert!(!terms.is_empty());
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.chunks(2);
        for chunk in &mut it {
            next.push(match chunk {
                [a, b] => cplx::add(a, b),
                [a] => a.clone(),
                _ => unreachable!(),
            });
        }
        terms = next;
    }
    terms.pop().unwrap()
}

/// The averaged linearization map.
pub struct LinearizationMap {
    base: Point,
    elements: Vec<GroupElement>,
    inv_derivs: Vec<DMatrix<C>>,
    exactness: Exactness,
    rejected: usize,
    se_phi_prime: f64,
}

impl LinearizationMap {
    pub fn base(&self) -> &[C] {
        &self.base
    }

    pub fn sample_count(&self) -> usize {
        self.elements.len()
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    /// Elements rejected for a singular derivative at the base.
    pub fn rejected_samples(&self) -> usize {
        self.rejected
    }

    /// Monte-Carlo standard error of φ′(base) (floored at SE_FLOOR to absorb
    /// matrix roundoff); 0-variance families report the floor.
    pub fn phi_prime_standard_error(&self) -> f64 {
        self.se_phi_prime
    }

    /// φ(ζ) = avg over f of f′(z)⁻¹ (f(ζ) − z), summed pairwise in a fixed
    /// order.
    pub fn eval(&self, zeta: &[C]) -> Result<Point> {
        let n = self.base.len();
        if zeta.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: zeta.len(),
            });
        }
        let mut terms = Vec::with_capacity(self.elements.len());
        for (g, inv) in self.elements.iter().zip(&self.inv_derivs) {
            let moved = cplx::sub(&g.eval(zeta)?, &self.base);
            let term: Point = (0..n)
                .map(|r| (0..n).map(|c| inv[(r, c)] * moved[c]).sum())
                .collect();
            terms.push(term);
        }
        let total = pairwise_sum(terms);
        let scale = C::new(1.0 / self.elements.len() as f64, 0.0);
        Ok(total.iter().map(|c| c * scale).collect())
    }

    /// φ′(base) computed termwise as the average of f′(z)⁻¹·f′(z).
    pub fn phi_prime_at_base(&self) -> DMatrix<C> {
        let n = self.base.len();
        let mut acc = DMatrix::<C>::zeros(n, n);
        for (g, inv) in self.elements.iter().zip(&self.inv_derivs) {
            acc += inv * g.deriv_at_base();
        }
        acc / C::new(self.elements.len() as f64, 0.0)
    }

    /// ‖φ′(base) − I‖ (Frobenius).
    pub fn phi_prime_deviation(&self) -> f64 {
        let n = self.base.len();
        (self.phi_prime_at_base() - DMatrix::<C>::identity(n, n)).norm()
    }
}

/// Averages the sampler's elements into the linearization map. Finite groups
/// are enumerated exactly (n is ignored); Monte-Carlo samplers draw n
/// elements. Elements with a singular derivative at the base are rejected and
/// counted.
pub fn cartan_phi(sampler: &IsotropySampler, n: usize) -> Result<LinearizationMap> {
    if sampler.exactness() == Exactness::MonteCarlo && n == 0 {
        return Err(Error::BadInput("need at least one sample".into()));
    }
    let drawn = sampler.draw(n);
    if drawn.is_empty() {
        return Err(Error::BadInput("sampler produced no elements".into()));
    }
    let dim = sampler.base().len();
    let mut elements = Vec::with_capacity(drawn.len());
    let mut inv_derivs = Vec::with_capacity(drawn.len());
    let mut rejected = 0usize;
    for g in drawn {
        match g.deriv_at_base().clone().try_inverse() {
            Some(inv) => {
                elements.push(g);
                inv_derivs.push(inv);
            }
            None => rejected += 1,
        }
    }
    if elements.is_empty() {
        return Err(Error::Numerical(
            "every sampled element had a singular derivative".into(),
        ));
    }
    // termwise spread of f'(z)^{-1} f'(z) around the identity
    let m = elements.len();
    let mut terms: Vec<DMatrix<C>> = Vec::with_capacity(m);
    for (g, inv) in elements.iter().zip(&inv_derivs) {
        terms.push(inv * g.deriv_at_base());
    }
    let mean = terms.iter().fold(DMatrix::<C>::zeros(dim, dim), |a, t| a + t)
        / C::new(m as f64, 0.0);
    let var: f64 = terms.iter().map(|t| (t - &mean).norm_squared()).sum::<f64>()
        / (m.max(2) - 1) as f64;
    let se = (var / m as f64).sqrt().max(tol::SE_FLOOR);

    Ok(LinearizationMap {
        base: sampler.base().to_vec(),
        elements,
        inv_derivs,
        exactness: sampler.exactness(),
        rejected,
        se_phi_prime: se,
    })
}

/// Max over samples of ‖φ(g(ζ)) − g′(z)·φ(ζ)‖: the intertwining residual.
pub fn equivariance_residual(
    phi: &LinearizationMap,
    g: &GroupElement,
    samples: &[Point],
) -> Result<f64> {
    let base_moved = cplx::dist(&g.eval(phi.base())?, phi.base());
    if base_moved > 1e-12 {
        return Err(Error::Precondition(format!(
            "element `{}` moves the base point by {base_moved:.3e}",
            g.label
        )));
    }
    let n = phi.base().len();
    let d = g.deriv_at_base();
    let mut worst = 0.0f64;
    for zeta in samples {
        let lhs = phi.eval(&g.eval(zeta)?)?;
        let phi_z = phi.eval(zeta)?;
        let rhs: Point = (0..n)
            .map(|r| (0..n).map(|c| d[(r, c)] * phi_z[c]).sum())
            .collect();
        worst = worst.max(cplx::dist(&lhs, &rhs));
    }
    Ok(worst)
}

/// Necessary condition for a map fixing the base to fix a second point with
/// linearized image v: J·v = v. True signals a unit-eigenvalue direction, so
/// the fixed set near the base cannot be a single point.
pub fn eigen_direction_test(j: &DMatrix<C>, v: &[C]) -> Result<bool> {
    let norm_v = cplx::norm(v);
    if norm_v <= tol::EIGEN_DIRECTION_MIN_NORM {
        return Err(Error::Hypothesis(format!(
            "direction norm {norm_v:.3e} at or below {:.1e}: \
             the point lies in the exceptional set",
            tol::EIGEN_DIRECTION_MIN_NORM
        )));
    }
    let vv = DVector::from_column_slice(v);
    let jv = j * &vv;
    let defect = (jv - &vv).norm();
    Ok(defect <= tol::EIGEN_DIRECTION_REL * norm_v)
}

/// Isotropy of the ball at the origin: Haar-random unitaries.
pub fn ball_unitary_sampler(n: usize, seed: u64) -> Result<IsotropySampler> {
    IsotropySampler::monte_carlo(
        format!("unit ball, isotropy of 0: U({n}) Monte-Carlo"),
        vec![cplx::ZERO; n],
        Box::new(move |i| {
            let mut rng = sample::rng(seed ^ (0x9E3779B97F4A7C15u64.wrapping_mul(i + 1)));
            GroupElement::linear(format!("unitary[{i}]"), sample::random_unitary(n, &mut rng))
        }),
    )
}

/// The inversion ζ ↦ r/ζ as a group element at base √r.
pub fn annulus_inversion_element(r: f64) -> GroupElement {
    let rc = C::new(r, 0.0);
    GroupElement::new(
        "inversion",
        Arc::new(move |z: &[C]| {
            if z[0].norm() == 0.0 {
                return Err(Error::Numerical("pole of the inversion at 0".into()));
            }
            Ok(vec![rc / z[0]])
        }),
        // d/dζ (r/ζ) at sqrt(r) is -1
        DMatrix::from_element(1, 1, -cplx::ONE),
    )
}

/// Isotropy of the annulus {r < |ζ| < 1} at √r: the two-element group
/// {id, ζ ↦ r/ζ}.
pub fn annulus_inversion_sampler(r: f64) -> Result<IsotropySampler> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::BadInput("annulus radius must lie in (0, 1)".into()));
    }
    let base = vec![C::new(r.sqrt(), 0.0)];
    let id = GroupElement::linear("identity", DMatrix::<C>::identity(1, 1));
    let inv = annulus_inversion_element(r);
    IsotropySampler::finite(
        format!("annulus r = {r}, isotropy of sqrt(r)"),
        base,
        vec![id, inv],
    )
}

/// Isotropy of the polydisc at 0: torus rotations composed with coordinate
/// permutations, Monte-Carlo sampled.
pub fn polydisc_isotropy_sampler(n: usize, seed: u64) -> Result<IsotropySampler> {
    IsotropySampler::monte_carlo(
        format!("polydisc, isotropy of 0: torus x permutations, {n} factors"),
        vec![cplx::ZERO; n],
        Box::new(move |i| {
            let mut rng = sample::rng(seed ^ (0xA24BAED4963EE407u64.wrapping_mul(i + 1)));
            // random permutation (Fisher-Yates) followed by a torus rotation
            let mut perm: Vec<usize> = (0..n).collect();
            for j in (1..n).rev() {
                let k = rng.gen_range(0..=j);
                perm.swap(j, k);
            }
            let mut m = DMatrix::<C>::zeros(n, n);
            for (row, &col) in perm.iter().enumerate() {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                m[(row, col)] = C::new(theta.cos(), theta.sin());
            }
            GroupElement::linear(format!("torus-perm[{i}]"), m)
        }),
    )
}
