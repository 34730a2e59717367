//! The constant c₁ with Σ_w weighted min(λ_w(P), 0) ≥ -c₁ for all P.

use num_rational::BigRational;
use serde::Serialize;

use crate::arith::rational::to_f64;
use crate::curve::{quadratic_x_scan, reduction_type, search_rational_points, CurvePoint, ReductionKind, WeierstrassCurve};
use crate::error::Result;
use crate::fields::QuadraticElement;

use super::canonical::DoublingConfig;
use super::decomposition::{height_decomposition, DecompositionConfig, HeightDecomposition};
use super::qseries::{archimedean_lower_bound, c2_constant, log_inverse_q_from_j};

pub const EMPIRICAL_SAFETY_FACTOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum C1Mode {
    Empirical,
    Derived,
}

/// Points over which the empirical constant is maximized.
#[derive(Clone, Debug, Default)]
pub struct C1Sample {
    pub rational: Vec<CurvePoint<BigRational>>,
    pub quadratic: Vec<CurvePoint<QuadraticElement>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    /// Rational points with x = n/d, |n| ≤ numer_bound, d ≤ denom_bound.
    pub numer_bound: i64,
    pub denom_bound: i64,
    /// Multiples [k]P, 1 ≤ k ≤ max_multiple, of each rational point found.
    pub max_multiple: i64,
    /// Integer x in [-x_range, x_range] for quadratic points.
    pub x_range: i64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { numer_bound: 30, denom_bound: 30, max_multiple: 4, x_range: 10 }
    }
}

impl C1Sample {
    pub fn build(e: &WeierstrassCurve, cfg: &SampleConfig) -> Result<Self> {
        let mut rational = Vec::new();
        for p in search_rational_points(e, cfg.numer_bound, cfg.denom_bound) {
            for k in 1..=cfg.max_multiple {
                let q = e.multiply_i64(k, &p);
                if !q.is_infinity() && !rational.contains(&q) {
                    rational.push(q);
                }
            }
        }
        let mut quadratic = quadratic_x_scan(e, -cfg.x_range, cfg.x_range)?;
        let conj: Vec<_> = quadratic.iter().map(|p| p.conjugate()).collect();
        quadratic.extend(conj);
        Ok(C1Sample { rational, quadratic })
    }

    pub fn len(&self) -> usize {
        self.rational.len() + self.quadratic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaceBound {
    pub place: String,
    pub lower_bound: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct C1Evidence {
    pub sample_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<String>,
    /// max over the sample of -Σ weighted min(λ_w, 0), before the safety factor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_negative_sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub safety_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_inverse_q: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub place_bounds: Vec<PlaceBound>,
}

#[derive(Clone, Debug, Serialize)]
pub struct C1Report {
    pub requested: C1Mode,
    pub mode: C1Mode,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub evidence: C1Evidence,
}

/// -Σ_w weighted min(λ_w, 0) for one decomposition.
pub fn negative_part(d: &HeightDecomposition) -> f64 {
    -d.entries.iter().map(|v| v.weight * v.value.min(0.0)).sum::<f64>()
}

fn sample_decomposition_config() -> DecompositionConfig {
    DecompositionConfig {
        doubling: DoublingConfig { target_error: 1e-6, bit_budget: 1 << 20, ..DoublingConfig::default() },
        archimedean_tolerance: 1e-10,
    }
}

pub fn c1_empirical(e: &WeierstrassCurve, sample: &C1Sample) -> Result<C1Report> {
    let cfg = sample_decomposition_config();
    let mut worst = 0.0f64;
    let mut worst_point = None;
    let mut consider = |label: String, d: HeightDecomposition| {
        let neg = negative_part(&d);
        if neg > worst {
            worst = neg;
            worst_point = Some(label);
        }
    };
    for p in &sample.rational {
        consider(p.to_string(), height_decomposition(e, p, &cfg)?);
    }
    for p in &sample.quadratic {
        let label = format!("{} over {}", p, p.base().map(|b| b.to_string()).unwrap_or_default());
        consider(label, height_decomposition(e, p, &cfg)?);
    }
    Ok(C1Report {
        requested: C1Mode::Empirical,
        mode: C1Mode::Empirical,
        value: EMPIRICAL_SAFETY_FACTOR * worst,
        warning: None,
        evidence: C1Evidence {
            sample_size: sample.len(),
            worst_point,
            worst_negative_sum: Some(worst),
            safety_factor: Some(EMPIRICAL_SAFETY_FACTOR),
            ..C1Evidence::default()
        },
    })
}

/// Sum of the negated lower bounds: the archimedean bound from the Tate
/// period and -(1/24) v_p(Δ) log p at multiplicative primes. Falls back to
/// the empirical constant when some bad prime has additive reduction.
pub fn c1_derived(e: &WeierstrassCurve, sample: &C1Sample) -> Result<C1Report> {
    let fallback = |reason: String| -> Result<C1Report> {
        let mut r = c1_empirical(e, sample)?;
        r.requested = C1Mode::Derived;
        r.warning = Some(reason);
        Ok(r)
    };
    let log_inv_q = match log_inverse_q_from_j(to_f64(e.j_invariant())) {
        Ok(l) => l,
        Err(err) => return fallback(format!("archimedean bound unavailable: {err}")),
    };
    let arch = archimedean_lower_bound((-log_inv_q).exp());
    let mut bounds = vec![PlaceBound { place: "inf".into(), lower_bound: arch }];
    for p in e.bad_primes()? {
        let info = reduction_type(e, p)?;
        match info.kind {
            ReductionKind::SplitMultiplicative | ReductionKind::NonsplitMultiplicative => {
                bounds.push(PlaceBound { place: p.to_string(), lower_bound: -(info.v_disc as f64) / 24.0 * (p as f64).ln() })
            }
            ReductionKind::Additive => return fallback(format!("no documented local bound at additive prime {p}")),
            ReductionKind::Good => {}
        }
    }
    let value = -bounds.iter().map(|b| b.lower_bound).sum::<f64>();
    Ok(C1Report {
        requested: C1Mode::Derived,
        mode: C1Mode::Derived,
        value: value.max(0.0),
        warning: None,
        evidence: C1Evidence {
            sample_size: 0,
            c2: Some(c2_constant()),
            log_inverse_q: Some(log_inv_q),
            place_bounds: bounds,
            ..C1Evidence::default()
        },
    })
}

pub fn c1_bound(e: &WeierstrassCurve, mode: C1Mode, sample: &C1Sample) -> Result<C1Report> {
    match mode {
        C1Mode::Empirical => c1_empirical(e, sample),
        C1Mode::Derived => c1_derived(e, sample),
    }
}
