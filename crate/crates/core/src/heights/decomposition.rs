//! Global canonical height as a weighted sum of local heights.

use serde::Serialize;

use crate::curve::{CurvePoint, WeierstrassCurve};
use crate::error::{invalid, Error, Result};
use crate::fields::Scalar;

use super::canonical::{canonical_height_doubling, DoublingConfig, DoublingHeight};
use super::local::{local_height_archimedean, local_height_finite, HeightMethod, LocalHeightValue, Place, PlaceKind};

#[derive(Clone, Copy, Debug)]
pub struct DecompositionConfig {
    pub doubling: DoublingConfig,
    pub archimedean_tolerance: f64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        DecompositionConfig { doubling: DoublingConfig::default(), archimedean_tolerance: 1e-12 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightDecomposition {
    pub global: f64,
    pub global_error_bound: f64,
    pub doubling_iterations: u32,
    pub entries: Vec<LocalHeightValue>,
    /// global - Σ weighted entries.
    pub residual: f64,
    /// Places whose local heights are only known through the residual entry.
    pub residual_places: Vec<String>,
}

impl HeightDecomposition {
    pub fn weighted_sum(&self) -> f64 {
        self.entries.iter().map(LocalHeightValue::weighted).sum()
    }

    pub fn has_residual_entry(&self) -> bool {
        !self.residual_places.is_empty()
    }
}

/// Rational primes at which the local height can be nonzero: bad primes
/// and primes dividing the denominator of x.
pub fn relevant_primes<F: Scalar>(e: &WeierstrassCurve, x: &F) -> Result<Vec<u64>> {
    let mut ps = e.bad_primes()?;
    let den = x.denominator();
    if den != 1.into() {
        ps.extend(crate::arith::primes::factor(&den)?.into_iter().map(|(p, _)| p));
    }
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

/// All local heights of P next to the doubling limit; places where P
/// reduces to a singular point are absorbed into one residual entry.
pub fn height_decomposition<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>, cfg: &DecompositionConfig) -> Result<HeightDecomposition> {
    let global = canonical_height_doubling(e, pt, &cfg.doubling)?;
    decompose_with_global(e, pt, global, cfg.archimedean_tolerance)
}

pub fn decompose_with_global<F: Scalar>(
    e: &WeierstrassCurve,
    pt: &CurvePoint<F>,
    global: DoublingHeight,
    archimedean_tolerance: f64,
) -> Result<HeightDecomposition> {
    let x = match pt {
        CurvePoint::Infinity => return invalid("decomposition at the identity"),
        CurvePoint::Affine { x, .. } => x,
    };
    let base = x.base();
    let mut entries = local_height_archimedean(e, pt, archimedean_tolerance)?;
    let mut residual_places = Vec::new();
    for p in relevant_primes(e, x)? {
        for prime in base.primes_above(p)? {
            match local_height_finite(e, pt, &prime) {
                Ok(v) => entries.push(v),
                Err(Error::ResidualRequired { .. }) => residual_places.push(prime.label()),
                Err(err) => return Err(err),
            }
        }
    }
    let known: f64 = entries.iter().map(LocalHeightValue::weighted).sum();
    if !residual_places.is_empty() {
        let place = Place { label: residual_places.join(","), kind: PlaceKind::Aggregate, local_degree: base.degree(), field_degree: base.degree() };
        entries.push(LocalHeightValue {
            place,
            value: global.value - known,
            method: HeightMethod::Residual,
            weight: 1.0,
            log_p_multiple: None,
            error_bound: global.error_bound,
        });
    }
    let total: f64 = entries.iter().map(LocalHeightValue::weighted).sum();
    Ok(HeightDecomposition {
        global: global.value,
        global_error_bound: global.error_bound,
        doubling_iterations: global.iterations,
        residual: global.value - total,
        entries,
        residual_places,
    })
}
