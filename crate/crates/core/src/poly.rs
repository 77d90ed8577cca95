//! Sparse multivariate polynomials over ℂ with a canonical term order.
//!
//! Terms are kept sorted in graded lexicographic order (total degree first,
//! then exponent tuples), with no stored zero coefficients, so symbolic
//! equality of polynomials is equality of canonical forms.

use crate::cplx::{self, C};
use crate::{tol, Error, Result};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub exps: Vec<u32>,
    pub coeff: C,
}

/// Graded-lex order on exponent tuples.
fn cmp_exps(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: Vec<Term>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if c != cplx::ZERO {
            p.terms.push(Term {
                exps: vec![0; nvars],
                coeff: c,
            });
        }
        p
    }

    /// The monomial x_i.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        MultiPoly {
            nvars,
            terms: vec![Term {
                exps,
                coeff: cplx::ONE,
            }],
        }
    }

    /// Builds a polynomial from raw (exponent, coefficient) pairs, merging
    /// duplicates and dropping exact zeros. Coefficients must be finite and
    /// exponent tuples must have length `nvars`.
    pub fn from_terms(nvars: usize, raw: Vec<(Vec<u32>, C)>) -> Result<Self> {
        let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
        for (exps, coeff) in raw {
            if exps.len() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            cplx::ensure_finite_scalar(coeff, "polynomial coefficient")?;
            terms.push(Term { exps, coeff });
        }
        terms.sort_by(|a, b| cmp_exps(&a.exps, &b.exps));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.exps == t.exps => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != cplx::ZERO);
        Ok(MultiPoly {
            nvars,
            terms: merged,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in canonical graded-lex order.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.norm())
            .fold(0.0, f64::max)
    }

    /// Drops terms with |c| < PRUNE_REL * max|c|. Applied after arithmetic to
    /// stop roundoff-sized terms from accumulating.
    pub fn pruned(mut self) -> Self {
        let cut = tol::PRUNE_REL * self.max_coeff();
        if cut > 0.0 {
            self.terms.retain(|t| t.coeff.norm() >= cut);
        }
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other)?;
        let mut raw: Vec<(Vec<u32>, C)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        for t in &self.terms {
            raw.push((t.exps.clone(), t.coeff));
        }
        for t in &other.terms {
            raw.push((t.exps.clone(), t.coeff));
        }
        Ok(Self::from_terms(self.nvars, raw)?.pruned())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exps: t.exps.clone(),
                    coeff: -t.coeff,
                })
                .collect(),
        }
    }

    pub fn scale(&self, s: C) -> Self {
        if s == cplx::ZERO {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exps: t.exps.clone(),
                    coeff: t.coeff * s,
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_capped(other, tol::TERM_CAP)
    }

    pub fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        self.check_same_vars(other)?;
        let count = self.terms.len().saturating_mul(other.terms.len());
        if count > cap {
            return Err(Error::TermOverflow { count, cap });
        }
        let mut raw: Vec<(Vec<u32>, C)> = Vec::with_capacity(count);
        for a in &self.terms {
            for b in &other.terms {
                let exps: Vec<u32> = a
                    .exps
                    .iter()
                    .zip(&b.exps)
                    .map(|(x, y)| x + y)
                    .collect();
                raw.push((exps, a.coeff * b.coeff));
            }
        }
        let out = Self::from_terms(self.nvars, raw)?.pruned();
        if out.terms.len() > cap {
            return Err(Error::TermOverflow {
                count: out.terms.len(),
                cap,
            });
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut out = Self::constant(self.nvars, cplx::ONE);
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Evaluation with per-variable power tables, summing terms in canonical
    /// order so the result is deterministic.
    pub fn eval(&self, z: &[C]) -> Result<C> {
        if z.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: z.len(),
            });
        }
        cplx::ensure_finite(z, "eval point")?;
        let mut max_exp = vec![0u32; self.nvars];
        for t in &self.terms {
            for (m, &e) in max_exp.iter_mut().zip(&t.exps) {
                *m = (*m).max(e);
            }
        }
        let pows: Vec<Vec<C>> = (0..self.nvars)
            .map(|i| {
                let mut v = Vec::with_capacity(max_exp[i] as usize + 1);
                v.push(cplx::ONE);
                for e in 1..=max_exp[i] as usize {
                    let prev = v[e - 1];
                    v.push(prev * z[i]);
                }
                v
            })
            .collect();
        let mut acc = cplx::ZERO;
        for t in &self.terms {
            let mut m = t.coeff;
            for (i, &e) in t.exps.iter().enumerate() {
                if e > 0 {
                    m *= pows[i][e as usize];
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exps[i] > 0)
            .map(|t| {
                let mut exps = t.exps.clone();
                let e = exps[i];
                exps[i] = e - 1;
                Term {
                    exps,
                    coeff: t.coeff * C::new(e as f64, 0.0),
                }
            })
            .collect();
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Substitutes `args[i]` for variable i. All arguments must share a common
    /// variable count, which becomes the variable count of the result.
    pub fn substitute(&self, args: &[MultiPoly]) -> Result<Self> {
        self.substitute_capped(args, tol::TERM_CAP)
    }

    pub fn substitute_capped(&self, args: &[MultiPoly], cap: usize) -> Result<Self> {
        if args.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: args.len(),
            });
        }
        let out_vars = match args.first() {
            Some(a) => a.nvars,
            None => return Ok(Self::constant(0, self.constant_term())),
        };
        if args.iter().any(|a| a.nvars != out_vars) {
            return Err(Error::DimensionMismatch(
                "substitution arguments disagree on variable count".into(),
            ));
        }
        // Power tables over the argument polynomials, built on demand.
        let mut pows: Vec<Vec<MultiPoly>> = args
            .iter()
            .map(|a| vec![MultiPoly::constant(out_vars, cplx::ONE), a.clone()])
            .collect();
        let mut acc = MultiPoly::zero(out_vars);
        for t in &self.terms {
            let mut m = MultiPoly::constant(out_vars, t.coeff);
            for (i, &e) in t.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while pows[i].len() <= e as usize {
                    let last = pows[i].last().unwrap().clone();
                    pows[i].push(last.mul_capped(&args[i], cap)?);
                }
                m = m.mul_capped(&pows[i][e as usize], cap)?;
            }
            acc = acc.add(&m)?;
        }
        if acc.terms.len() > cap {
            return Err(Error::TermOverflow {
                count: acc.terms.len(),
                cap,
            });
        }
        Ok(acc)
    }

    fn constant_term(&self) -> C {
        self.terms
            .iter()
            .find(|t| t.exps.iter().all(|&e| e == 0))
            .map(|t| t.coeff)
            .unwrap_or(cplx::ZERO)
    }

    /// For a polynomial using at most one variable, returns (variable index,
    /// dense ascending coefficients). Constants report variable 0.
    pub fn as_univariate(&self) -> Option<(usize, Vec<C>)> {
        let mut var: Option<usize> = None;
        for t in &self.terms {
            for (i, &e) in t.exps.iter().enumerate() {
                if e > 0 {
                    match var {
                        None => var = Some(i),
                        Some(v) if v == i => {}
                        Some(_) => return None,
                    }
                }
            }
        }
        let v = var.unwrap_or(0);
        let deg = self.degree() as usize;
        let mut coeffs = vec![cplx::ZERO; deg + 1];
        for t in &self.terms {
            coeffs[t.exps[v] as usize] = t.coeff;
        }
        Some((v, coeffs))
    }

    /// Monic product Π (x_var − rootⱼ) embedded in `nvars` variables.
    pub fn from_roots(nvars: usize, var: usize, roots: &[C]) -> Result<Self> {
        let x = Self::var(nvars, var);
        let mut p = Self::constant(nvars, cplx::ONE);
        for &r in roots {
            cplx::ensure_finite_scalar(r, "root")?;
            p = p.mul(&x.sub(&Self::constant(nvars, r))?)?;
        }
        Ok(p)
    }

    fn check_same_vars(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "polynomials in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for t in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)", t.coeff.re, t.coeff.im)?;
            for (i, &e) in t.exps.iter().enumerate() {
                if e == 1 {
                    write!(f, "*z{}", i + 1)?;
                } else if e > 1 {
                    write!(f, "*z{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    /// Naive oracle: recomputes every monomial by repeated multiplication,
    /// independent of the power-table path used by `eval`.
    fn naive_eval(p: &MultiPoly, z: &[C]) -> C {
        let mut acc = cplx::ZERO;
        for t in p.terms() {
            let mut m = t.coeff;
            for (i, &e) in t.exps.iter().enumerate() {
                for _ in 0..e {
                    m *= z[i];
                }
            }
            acc += m;
        }
        acc
    }

    #[test]
    fn eval_simple_square_plus_one() {
        // z^2 + 1 at z = 2 -> 5
        let p = MultiPoly::from_terms(1, vec![(vec![2], cplx::ONE), (vec![0], cplx::ONE)]).unwrap();
        assert_eq!(p.eval(&[c(2.0, 0.0)]).unwrap(), c(5.0, 0.0));
    }

    #[test]
    fn product_over_roots_vanishes_at_each_root() {
        let roots = [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 2.0)];
        let p = MultiPoly::from_roots(1, 0, &roots).unwrap();
        for r in roots {
            assert_eq!(p.eval(&[r]).unwrap(), cplx::ZERO);
        }
    }

    #[test]
    fn eval_matches_naive_monomial_oracle() {
        // Random degree-5 bivariate polynomial at 20 points, 1e-13 relative.
        let mut rng = sample::rng(11);
        let mut raw = Vec::new();
        for e1 in 0..=5u32 {
            for e2 in 0..=(5 - e1) {
                raw.push((vec![e1, e2], sample::gaussian_complex(&mut rng)));
            }
        }
        let p = MultiPoly::from_terms(2, raw).unwrap();
        for i in 0..20 {
            let z = sample::box_point(i, 2, 2.0, 100);
            let a = p.eval(&z).unwrap();
            let b = naive_eval(&p, &z);
            let scale = b.norm().max(1.0);
            assert!((a - b).norm() / scale < 1e-13);
        }
    }

    #[test]
    fn arity_errors_are_reported() {
        let p = MultiPoly::var(2, 0);
        assert!(matches!(
            p.eval(&[cplx::ONE]),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
        assert!(p.eval(&[C::new(f64::INFINITY, 0.0), cplx::ONE]).is_err());
    }

    #[test]
    fn derivative_is_exact() {
        // d/dx (x^3 y + 2 x) = 3 x^2 y + 2
        let p = MultiPoly::from_terms(
            2,
            vec![(vec![3, 1], cplx::ONE), (vec![1, 0], c(2.0, 0.0))],
        )
        .unwrap();
        let d = p.derivative(0);
        let expect = MultiPoly::from_terms(
            2,
            vec![(vec![2, 1], c(3.0, 0.0)), (vec![0, 0], c(2.0, 0.0))],
        )
        .unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn pruning_keeps_integers_and_drops_noise() {
        let p = MultiPoly::from_terms(
            1,
            vec![(vec![0], cplx::ONE), (vec![1], c(1e-20, 0.0))],
        )
        .unwrap()
        .pruned();
        assert_eq!(p.num_terms(), 1);
        // A polynomial whose largest coefficient is tiny keeps its terms.
        let q = MultiPoly::from_terms(1, vec![(vec![0], c(1e-20, 0.0))])
            .unwrap()
            .pruned();
        assert_eq!(q.num_terms(), 1);
    }

    #[test]
    fn term_cap_is_enforced() {
        let mut raw = Vec::new();
        for e in 0..100u32 {
            raw.push((vec![e, 0], cplx::ONE));
            raw.push((vec![0, e + 1], cplx::ONE));
        }
        let p = MultiPoly::from_terms(2, raw).unwrap();
        assert!(matches!(
            p.mul_capped(&p, 1000),
            Err(Error::TermOverflow { .. })
        ));
    }

    #[test]
    fn univariate_extraction() {
        let p = MultiPoly::from_terms(3, vec![(vec![0, 2, 0], cplx::ONE), (vec![0, 1, 0], c(2.0, 0.0))])
            .unwrap();
        let (v, coeffs) = p.as_univariate().unwrap();
        assert_eq!(v, 1);
        assert_eq!(coeffs, vec![cplx::ZERO, c(2.0, 0.0), cplx::ONE]);
        let mixed =
            MultiPoly::from_terms(2, vec![(vec![1, 1], cplx::ONE)]).unwrap();
        assert!(mixed.as_univariate().is_none());
    }

    fn small_poly_strategy(nvars: usize) -> impl Strategy<Value = MultiPoly> {
        let term = (
            proptest::collection::vec(0u32..3, nvars),
            -3i32..=3,
            -3i32..=3,
        );
        proptest::collection::vec(term, 0..6).prop_map(move |raw| {
            MultiPoly::from_terms(
                nvars,
                raw.into_iter()
                    .map(|(e, re, im)| (e, c(re as f64, im as f64)))
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn eval_is_additive_and_multiplicative(
            a in small_poly_strategy(2),
            b in small_poly_strategy(2),
            seed in 0u64..500,
        ) {
            let z = sample::box_point(seed, 2, 1.5, 7);
            let sum = a.add(&b).unwrap();
            let prod = a.mul(&b).unwrap();
            let ea = a.eval(&z).unwrap();
            let eb = b.eval(&z).unwrap();
            let scale = (ea + eb).norm().max(1.0);
            prop_assert!((sum.eval(&z).unwrap() - (ea + eb)).norm() / scale < 1e-12);
            let scale_p = (ea * eb).norm().max(1.0);
            prop_assert!((prod.eval(&z).unwrap() - ea * eb).norm() / scale_p < 1e-12);
        }

        #[test]
        fn addition_is_commutative_symbolically(
            a in small_poly_strategy(2),
            b in small_poly_strategy(2),
        ) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        }
    }
}
