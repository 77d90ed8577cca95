//! JSON forms of the wire formats.
//!
//! Complex numbers serialize as `{"re": x, "im": y}` objects, polynomials as
//! `{"nvars": n, "terms": [{"exp": [...], "re": x, "im": y}]}` with terms in
//! canonical order, so equal values have identical serialized bytes.

use crate::cplx::{Point, C};
use crate::poly::MultiPoly;
use crate::polymap::PolyMap;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct CxJson {
    pub re: f64,
    pub im: f64,
}

impl From<C> for CxJson {
    fn from(c: C) -> Self {
        CxJson { re: c.re, im: c.im }
    }
}

impl From<CxJson> for C {
    fn from(c: CxJson) -> Self {
        C::new(c.re, c.im)
    }
}

pub fn point_to_json(p: &[C]) -> Vec<CxJson> {
    p.iter().map(|&c| c.into()).collect()
}

pub fn point_from_json(p: &[CxJson]) -> Point {
    p.iter().map(|&c| c.into()).collect()
}

pub fn points_to_json(ps: &[Point]) -> Vec<Vec<CxJson>> {
    ps.iter().map(|p| point_to_json(p)).collect()
}

pub fn points_from_json(ps: &[Vec<CxJson>]) -> Vec<Point> {
    ps.iter().map(|p| point_from_json(p)).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

impl From<&MultiPoly> for PolyJson {
    fn from(p: &MultiPoly) -> Self {
        PolyJson {
            nvars: p.nvars(),
            terms: p
                .terms()
                .iter()
                .map(|t| TermJson {
                    exp: t.exps.clone(),
                    re: t.coeff.re,
                    im: t.coeff.im,
                })
                .collect(),
        }
    }
}

impl PolyJson {
    pub fn to_poly(&self) -> Result<MultiPoly> {
        MultiPoly::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|t| (t.exp.clone(), C::new(t.re, t.im)))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub components: Vec<PolyJson>,
}

impl From<&PolyMap> for MapJson {
    fn from(m: &PolyMap) -> Self {
        MapJson {
            dim_in: m.dim_in(),
            dim_out: m.dim_out(),
            components: m.components().iter().map(PolyJson::from).collect(),
        }
    }
}

impl MapJson {
    pub fn to_map(&self) -> Result<PolyMap> {
        let comps = self
            .components
            .iter()
            .map(|c| c.to_poly())
            .collect::<Result<Vec<_>>>()?;
        PolyMap::new(self.dim_in, self.dim_out, comps)
    }
}

/// Canonical pretty-printed artifact bytes.
pub fn to_artifact_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx;

    #[test]
    fn poly_roundtrip_is_identity() {
        let p = MultiPoly::from_terms(
            2,
            vec![
                (vec![2, 0], C::new(1.0, -2.0)),
                (vec![0, 1], C::new(0.5, 0.0)),
                (vec![0, 0], cplx::ONE),
            ],
        )
        .unwrap();
        let j = PolyJson::from(&p);
        let s = serde_json::to_string(&j).unwrap();
        let back: PolyJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_poly().unwrap(), p);
        // canonical form serializes identically
        let s2 = serde_json::to_string(&PolyJson::from(&back.to_poly().unwrap())).unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn map_roundtrip_is_identity() {
        let m = PolyMap::identity(3);
        let j = MapJson::from(&m);
        let back = j.to_map().unwrap();
        assert_eq!(back, m);
    }
}
