//! Polynomial maps ℂⁿ → ℂᵐ as tuples of [`MultiPoly`] components.

use crate::cplx::{self, Point, C};
use crate::poly::MultiPoly;
use crate::{tol, Error, Result};
use nalgebra::DMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    dim_in: usize,
    dim_out: usize,
    components: Vec<MultiPoly>,
}

impl PolyMap {
    pub fn new(dim_in: usize, dim_out: usize, components: Vec<MultiPoly>) -> Result<Self> {
        if components.len() != dim_out {
            return Err(Error::DimensionMismatch(format!(
                "expected {} components, got {}",
                dim_out,
                components.len()
            )));
        }
        if components.iter().any(|c| c.nvars() != dim_in) {
            return Err(Error::DimensionMismatch(
                "component variable counts disagree with dim_in".into(),
            ));
        }
        Ok(PolyMap {
            dim_in,
            dim_out,
            components,
        })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            dim_in: n,
            dim_out: n,
            components: (0..n).map(|i| MultiPoly::var(n, i)).collect(),
        }
    }

    /// The linear map z ↦ A·z.
    pub fn from_matrix(a: &DMatrix<C>) -> Self {
        let (rows, cols) = a.shape();
        let components = (0..rows)
            .map(|r| {
                let raw: Vec<(Vec<u32>, C)> = (0..cols)
                    .filter(|&c| a[(r, c)] != cplx::ZERO)
                    .map(|c| {
                        let mut exps = vec![0u32; cols];
                        exps[c] = 1;
                        (exps, a[(r, c)])
                    })
                    .collect();
                MultiPoly::from_terms(cols, raw).expect("matrix entries are well-formed")
            })
            .collect();
        PolyMap {
            dim_in: cols,
            dim_out: rows,
            components,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.components.iter().map(|c| c.num_terms()).sum()
    }

    pub fn eval(&self, z: &[C]) -> Result<Point> {
        if z.len() != self.dim_in {
            return Err(Error::ArityMismatch {
                expected: self.dim_in,
                got: z.len(),
            });
        }
        self.components.iter().map(|c| c.eval(z)).collect()
    }

    /// Exact symbolic composition self ∘ other.
    pub fn compose(&self, other: &PolyMap) -> Result<PolyMap> {
        self.compose_capped(other, tol::TERM_CAP)
    }

    pub fn compose_capped(&self, other: &PolyMap, cap: usize) -> Result<PolyMap> {
        if self.dim_in != other.dim_out {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose: inner map produces {} coordinates, outer expects {}",
                other.dim_out, self.dim_in
            )));
        }
        let components = self
            .components
            .iter()
            .map(|c| c.substitute_capped(&other.components, cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap {
            dim_in: other.dim_in,
            dim_out: self.dim_out,
            components,
        })
    }

    /// Jacobian matrix of exact symbolic partials evaluated at `z`.
    pub fn jacobian(&self, z: &[C]) -> Result<DMatrix<C>> {
        if z.len() != self.dim_in {
            return Err(Error::ArityMismatch {
                expected: self.dim_in,
                got: z.len(),
            });
        }
        let mut j = DMatrix::<C>::zeros(self.dim_out, self.dim_in);
        for (r, comp) in self.components.iter().enumerate() {
            for c in 0..self.dim_in {
                j[(r, c)] = comp.derivative(c).eval(z)?;
            }
        }
        Ok(j)
    }

    /// Largest coefficient deviation from the identity map; 0 means the map is
    /// symbolically the identity.
    pub fn deviation_from_identity(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("identity requires a square map".into()));
        }
        let id = PolyMap::identity(self.dim_in);
        let mut dev = 0.0f64;
        for (a, b) in self.components.iter().zip(id.components.iter()) {
            let diff = a.sub(b)?;
            dev = dev.max(diff.max_coeff());
        }
        Ok(dev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn random_cubic_map(n: usize, seed: u64) -> PolyMap {
        let mut rng = sample::rng(seed);
        let comps = (0..n)
            .map(|_| {
                let mut raw = Vec::new();
                for _ in 0..6 {
                    let exps: Vec<u32> = (0..n)
                        .map(|_| (sample::gaussian(&mut rng).abs() as u32).min(3))
                        .collect();
                    raw.push((exps, sample::gaussian_complex(&mut rng)));
                }
                MultiPoly::from_terms(n, raw).unwrap()
            })
            .collect();
        PolyMap::new(n, n, comps).unwrap()
    }

    #[test]
    fn identity_composition_law() {
        let g = random_cubic_map(2, 5);
        let id = PolyMap::identity(2);
        assert_eq!(id.compose(&g).unwrap(), g);
        assert_eq!(g.compose(&id).unwrap(), g);
    }

    #[test]
    fn composition_matches_pointwise_evaluation() {
        let f = random_cubic_map(2, 8);
        let g = random_cubic_map(2, 9);
        let fg = f.compose(&g).unwrap();
        for i in 0..50 {
            let z = sample::box_point(i, 2, 1.0, 3);
            let direct = f.eval(&g.eval(&z).unwrap()).unwrap();
            let composed = fg.eval(&z).unwrap();
            let scale = cplx::norm(&direct).max(1.0);
            assert!(
                cplx::dist(&direct, &composed) / scale < 1e-10,
                "composition mismatch at sample {i}"
            );
        }
    }

    #[test]
    fn composition_is_associative_symbolically() {
        for seed in 0..5 {
            let f = random_cubic_map(2, 100 + seed);
            let g = random_cubic_map(2, 200 + seed);
            let h = random_cubic_map(2, 300 + seed);
            // degree <= 3 factors keep the triple product desk-sized
            let left = f.compose(&g).unwrap().compose(&h).unwrap();
            let right = f.compose(&g.compose(&h).unwrap()).unwrap();
            for (a, b) in left.components().iter().zip(right.components()) {
                let diff = a.sub(b).unwrap();
                let scale = a.max_coeff().max(1.0);
                assert!(
                    diff.max_coeff() / scale < 1e-10,
                    "associativity defect {}",
                    diff.max_coeff()
                );
            }
        }
    }

    #[test]
    fn jacobian_of_linear_map_is_the_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(0.0, -2.0), c(3.0, 0.0), c(0.5, 0.5)]);
        let m = PolyMap::from_matrix(&a);
        let j = m.jacobian(&[c(0.3, -0.7), c(1.1, 0.2)]).unwrap();
        assert_eq!(j, a);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let f = random_cubic_map(3, 21);
        let h = tol::FD_JACOBIAN_STEP;
        for s in 0..5 {
            let z = sample::box_point(s, 3, 1.0, 40);
            let j = f.jacobian(&z).unwrap();
            for col in 0..3 {
                for part in 0..2 {
                    // probe both the real and imaginary directions
                    let mut zp = z.clone();
                    let mut zm = z.clone();
                    let delta = if part == 0 { c(h, 0.0) } else { c(0.0, h) };
                    zp[col] += delta;
                    zm[col] -= delta;
                    let fp = f.eval(&zp).unwrap();
                    let fm = f.eval(&zm).unwrap();
                    for row in 0..3 {
                        let fd = (fp[row] - fm[row]) / (2.0 * h);
                        // holomorphic: d/d(im) = i * d/d(re)
                        let expect = if part == 0 {
                            j[(row, col)]
                        } else {
                            j[(row, col)] * cplx::I
                        };
                        let scale = expect.norm().max(1.0);
                        assert!(
                            (fd - expect).norm() / scale < 1e-6,
                            "fd mismatch row {row} col {col}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn compose_dimension_mismatch_is_an_error() {
        let f = PolyMap::identity(2);
        let g = PolyMap::identity(3);
        assert!(f.compose(&g).is_err());
    }
}
