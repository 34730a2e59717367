//! Torsion detection by bounded multiplication, with a canonical-height
//! witness for nontorsion points.

use serde::Serialize;

use super::point::CurvePoint;
use super::weierstrass::WeierstrassCurve;
use crate::error::Result;
use crate::fields::Scalar;
use crate::heights::{canonical_height_doubling, DoublingConfig};

/// Largest order of a torsion point over Q or a quadratic field is 18 and
/// the largest torsion subgroup has 24 elements.
pub const DEFAULT_TORSION_BOUND: u32 = 24;

/// ĥ above which a point is declared nontorsion.
pub const DEFAULT_WITNESS_THRESHOLD: f64 = 0.025;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum TorsionOutcome {
    Torsion { order: u32 },
    NontorsionWitness { height: f64, error_bound: f64 },
    Inconclusive { height: f64, error_bound: f64 },
}

impl TorsionOutcome {
    pub fn is_torsion(&self) -> bool {
        matches!(self, TorsionOutcome::Torsion { .. })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TorsionConfig {
    pub bound: u32,
    pub threshold: f64,
    pub doubling: DoublingConfig,
}

impl Default for TorsionConfig {
    fn default() -> Self {
        TorsionConfig {
            bound: DEFAULT_TORSION_BOUND,
            threshold: DEFAULT_WITNESS_THRESHOLD,
            doubling: DoublingConfig { target_error: 1e-6, ..DoublingConfig::default() },
        }
    }
}

pub fn torsion_test<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>, cfg: &TorsionConfig) -> Result<TorsionOutcome> {
    e.check(pt)?;
    // A height witness is cheaper than the multiples when the point has
    // large coordinates, and torsion points have ĥ = 0.
    let h = canonical_height_doubling(e, pt, &cfg.doubling)?;
    if h.value - h.error_bound > cfg.threshold {
        return Ok(TorsionOutcome::NontorsionWitness { height: h.value, error_bound: h.error_bound });
    }
    let mut q = pt.clone();
    for n in 1..=cfg.bound {
        if q.is_infinity() {
            return Ok(TorsionOutcome::Torsion { order: n });
        }
        q = e.add_points(&q, pt);
    }
    Ok(TorsionOutcome::Inconclusive { height: h.value, error_bound: h.error_bound })
}
