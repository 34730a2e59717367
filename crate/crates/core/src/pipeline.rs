//! Prime selection, the explicit lower bound, and its check on a corpus of
//! points over Q and quadratic fields.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::primes::{exact_sqrt, is_prime, is_square_mod, next_prime, pow_mod, require_prime};
use crate::arith::rational::serialize_rational;
use crate::curve::{
    parse_quadratic_point, parse_rational_point, quadratic_x_scan, reduction_type, search_rational_points, torsion_test,
    CurvePoint, CurveSpec, ReductionKind, TorsionConfig, TorsionOutcome, WeierstrassCurve,
};
use crate::error::{Error, Result};
use crate::fields::{BaseField, QuadraticElement, QuadraticField, Scalar};
use crate::frobenius::{apply_group_ring, char_poly_frobenius, frobenius_automorphism, GroupRingAction};
use crate::heights::{c1_bound, canonical_height_doubling, C1Mode, C1Report, C1Sample, DoublingConfig, SampleConfig};

pub const DEFAULT_SAMPLE_BOUND: u64 = 500;
pub const DEFAULT_MAX_P: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateOutcome {
    HeuristicPass,
    Inconclusive,
}

/// Which maximal subgroup classes the sampled Frobenius data rules out.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurjectivityEvidence {
    pub p: u64,
    pub sample_bound: u64,
    pub primes_sampled: usize,
    pub distinct_pairs: usize,
    pub cm: bool,
    pub borel_excluded: bool,
    pub split_normalizer_excluded: bool,
    pub nonsplit_normalizer_excluded: bool,
    pub exceptional_excluded: bool,
    pub max_projective_order: u64,
    pub outcome: GateOutcome,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Order of the ratio of the eigenvalues of a matrix with trace a and
/// determinant d mod p, or None when the eigenvalues coincide.
fn projective_order(a: u64, d: u64, p: u64) -> Option<u64> {
    let t = a * a % p * pow_mod(d, p - 2, p) % p;
    if t == 4 % p {
        return None;
    }
    // r + 1/r = t - 2 and s_k = r^k + r^-k; r^k = 1 exactly when s_k = 2.
    let c = (t + p - 2) % p;
    let (mut prev, mut cur) = (2 % p, c);
    for k in 1..=(p + 1) {
        if cur == 2 % p {
            return Some(k);
        }
        let next = (c * cur % p + p - prev) % p;
        prev = cur;
        cur = next;
    }
    None
}

fn is_rational_square(r: &BigRational) -> bool {
    if r < &BigRational::zero() {
        return false;
    }
    exact_sqrt(r.numer()).is_some() && exact_sqrt(r.denom()).is_some()
}

/// Samples Frobenius traces and determinants mod p at good primes ℓ ≤
/// `sample_bound` and reports which proper maximal subgroups of GL₂(F_p)
/// the observations exclude as containers of the mod-p image.
pub fn surjectivity_heuristic(e: &WeierstrassCurve, p: u64, sample_bound: u64) -> Result<SurjectivityEvidence> {
    require_prime(p)?;
    let mut pairs = BTreeSet::new();
    let mut sampled = 0;
    let mut unipotent_like = 0usize;
    let mut ell = 2;
    while ell <= sample_bound {
        if ell != p && reduction_type(e, ell)?.kind == ReductionKind::Good {
            let a = char_poly_frobenius(e, ell)?.a;
            let pair = (a.rem_euclid(p as i64) as u64, ell % p);
            if pair == (2 % p, 1 % p) {
                unipotent_like += 1;
            }
            pairs.insert(pair);
            sampled += 1;
        }
        ell = next_prime(ell);
    }
    let cm = e.has_rational_cm_j();
    let mut ev = SurjectivityEvidence {
        p,
        sample_bound,
        primes_sampled: sampled,
        distinct_pairs: pairs.len(),
        cm,
        borel_excluded: false,
        split_normalizer_excluded: false,
        nonsplit_normalizer_excluded: false,
        exceptional_excluded: p < 5,
        max_projective_order: 0,
        outcome: GateOutcome::Inconclusive,
        notes: Vec::new(),
    };
    if p == 2 {
        // GL₂(F₂) ≅ S₃: the proper subgroups are trivial, of order 2, or A₃.
        ev.borel_excluded = pairs.contains(&(1, 1));
        let a3_excluded = !is_rational_square(e.discriminant());
        ev.split_normalizer_excluded = a3_excluded;
        ev.nonsplit_normalizer_excluded = a3_excluded;
        ev.max_projective_order = if ev.borel_excluded { 3 } else { 0 };
        ev.notes.push("p = 2: order-3 Frobenius and a non-square discriminant generate S3".into());
    } else {
        for &(a, d) in &pairs {
            if d == 0 {
                continue;
            }
            let disc = (a * a % p + p - 4 * d % p) % p;
            if disc != 0 && !is_square_mod(disc, p) {
                ev.borel_excluded = true;
                if a != 0 {
                    ev.split_normalizer_excluded = true;
                }
            }
            if disc != 0 && is_square_mod(disc, p) && a != 0 {
                ev.nonsplit_normalizer_excluded = true;
            }
            if let Some(k) = projective_order(a, d, p) {
                ev.max_projective_order = ev.max_projective_order.max(k);
            }
        }
        if p >= 5 {
            ev.exceptional_excluded = ev.max_projective_order > 5;
        }
        if p == 3 {
            // Mod 3 no element has nonzero trace and a nonzero square
            // discriminant. The nonsplit normalizer (order 16) has only the
            // identity with char poly (X-1)^2, density 1/16, against 9/48 for
            // GL2(F3); a frequency above 1/8 rules it out.
            let freq = unipotent_like as f64 / sampled.max(1) as f64;
            ev.nonsplit_normalizer_excluded = sampled >= 50 && freq > 0.125;
            ev.notes.push(format!("p = 3: char poly (X-1)^2 frequency {freq:.3}"));
        }
    }
    let all = ev.borel_excluded && ev.split_normalizer_excluded && ev.nonsplit_normalizer_excluded && ev.exceptional_excluded;
    if cm {
        ev.notes.push("j-invariant has complex multiplication; condition (1) needs a user assertion".into());
    }
    if all && !cm {
        ev.outcome = GateOutcome::HeuristicPass;
    }
    Ok(ev)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorsionGate {
    HeuristicPass,
    Asserted,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionCondition {
    pub status: TorsionGate,
    pub evidence: SurjectivityEvidence,
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeCondition {
    pub holds: bool,
    pub c1: f64,
    /// exp(1 + c₁).
    pub threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub p: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeSelectionReport {
    pub p: u64,
    pub cond_torsion: TorsionCondition,
    pub cond_size: SizeCondition,
    pub cond_good_reduction: bool,
    /// Every rational prime is a degree-one unramified prime of Q.
    pub cond_degree1_unramified: bool,
    pub rejected: Vec<Rejection>,
}

#[derive(Clone, Debug)]
pub struct SelectionConfig {
    pub c1_mode: C1Mode,
    pub assert_condition_1: bool,
    /// Primes below this are skipped without being examined.
    pub min_p: u64,
    pub max_p: u64,
    pub sample_bound: u64,
    pub c1_sample: SampleConfig,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            c1_mode: C1Mode::Empirical,
            assert_condition_1: false,
            min_p: 2,
            max_p: DEFAULT_MAX_P,
            sample_bound: DEFAULT_SAMPLE_BOUND,
            c1_sample: SampleConfig::default(),
        }
    }
}

/// Scans primes upward from `min_p` with a fixed c₁ and returns the first
/// one meeting all four conditions.
pub fn select_prime_with_c1(e: &WeierstrassCurve, c1: f64, cfg: &SelectionConfig) -> Result<PrimeSelectionReport> {
    if !(c1 >= 0.0 && c1.is_finite()) {
        return Err(Error::InvalidArgument(format!("c1 must be finite and non-negative, got {c1}")));
    }
    let threshold = (1.0 + c1).exp();
    let mut rejected = Vec::new();
    let mut p = if is_prime(cfg.min_p.max(2)) { cfg.min_p.max(2) } else { next_prime(cfg.min_p.max(2)) };
    while p <= cfg.max_p {
        if (p as f64) < threshold {
            p = next_prime(threshold.floor() as u64).max(next_prime(p));
            continue;
        }
        if reduction_type(e, p)?.kind != ReductionKind::Good {
            rejected.push(Rejection { p, reason: "bad reduction".into() });
            p = next_prime(p);
            continue;
        }
        let evidence = surjectivity_heuristic(e, p, cfg.sample_bound)?;
        let status = match (evidence.outcome, cfg.assert_condition_1) {
            (GateOutcome::HeuristicPass, _) => TorsionGate::HeuristicPass,
            (GateOutcome::Inconclusive, true) => TorsionGate::Asserted,
            (GateOutcome::Inconclusive, false) => TorsionGate::Fail,
        };
        if status == TorsionGate::Fail {
            let reason = if evidence.cm {
                "CM curve: condition (1) requires --assert-condition-1".to_string()
            } else {
                "image heuristic inconclusive".to_string()
            };
            rejected.push(Rejection { p, reason });
            p = next_prime(p);
            continue;
        }
        return Ok(PrimeSelectionReport {
            p,
            cond_torsion: TorsionCondition { status, evidence },
            cond_size: SizeCondition { holds: true, c1, threshold },
            cond_good_reduction: true,
            cond_degree1_unramified: true,
            rejected,
        });
    }
    Err(Error::SearchExhausted { ceiling: cfg.max_p })
}

pub fn select_prime(e: &WeierstrassCurve, cfg: &SelectionConfig) -> Result<(PrimeSelectionReport, C1Report)> {
    let sample = C1Sample::build(e, &cfg.c1_sample)?;
    let c1 = c1_bound(e, cfg.c1_mode, &sample)?;
    Ok((select_prime_with_c1(e, c1.value, cfg)?, c1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub p: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub c_unramified: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub c_ramified: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub c: BigRational,
    pub caveats: Vec<String>,
}

impl BoundCertificate {
    pub fn c_f64(&self) -> f64 {
        crate::arith::rational::to_f64(&self.c)
    }
}

/// 1/(3(1+4p+p²)), 1/(18p²) and their minimum.
pub fn compute_bound(p: u64) -> Result<BoundCertificate> {
    require_prime(p)?;
    let pb = BigInt::from(p);
    let unram = BigRational::new(BigInt::one(), BigInt::from(3) * (BigInt::one() + BigInt::from(4) * &pb + &pb * &pb));
    let ram = BigRational::new(BigInt::one(), BigInt::from(18) * &pb * &pb);
    let c = if unram <= ram { unram.clone() } else { ram.clone() };
    Ok(BoundCertificate { p, c_unramified: unram, c_ramified: ram, c, caveats: Vec::new() })
}

/// Points to check, stored as text so a corpus can be shipped as a file.
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
pub struct Corpus {
    pub curve: CurveSpec,
    pub rational: Vec<String>,
    pub quadratic: Vec<QuadraticEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize, Serialize)]
pub struct QuadraticEntry {
    pub d: i64,
    pub point: String,
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusConfig {
    pub numer_bound: i64,
    pub denom_bound: i64,
    pub x_range: i64,
    /// Multiples [k]P, 1 ≤ k ≤ max_multiple.
    pub max_multiple: i64,
    /// Number of sums P + Q of distinct rational points drawn with the seed.
    pub random_sums: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { numer_bound: 100, denom_bound: 100, x_range: 10, max_multiple: 2, random_sums: 4, seed: 0 }
    }
}

fn quadratic_line(pt: &CurvePoint<QuadraticElement>) -> String {
    match pt {
        CurvePoint::Infinity => "O".into(),
        CurvePoint::Affine { x, y } => format!("{x},{y}"),
    }
}

fn rational_line(pt: &CurvePoint<BigRational>) -> String {
    match pt {
        CurvePoint::Infinity => "O".into(),
        CurvePoint::Affine { x, y } => format!("{x},{y}"),
    }
}

impl Corpus {
    pub fn build(e: &WeierstrassCurve, cfg: &CorpusConfig) -> Result<Self> {
        let found = search_rational_points(e, cfg.numer_bound, cfg.denom_bound);
        let mut rational = BTreeSet::new();
        for p in &found {
            for k in 1..=cfg.max_multiple {
                let q = e.multiply_i64(k, p);
                if !q.is_infinity() {
                    rational.insert(rational_line(&q));
                }
            }
        }
        if found.len() >= 2 {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..cfg.random_sums {
                let pick: Vec<_> = found.choose_multiple(&mut rng, 2).collect();
                let s = e.add_points(pick[0], pick[1]);
                if !s.is_infinity() {
                    rational.insert(rational_line(&s));
                }
            }
        }
        let mut quadratic = BTreeSet::new();
        for p in quadratic_x_scan(e, -cfg.x_range, cfg.x_range)? {
            let d = match p.base() {
                Some(BaseField::Quadratic(k)) => k.d(),
                _ => continue,
            };
            for base in [p.clone(), p.conjugate()] {
                for k in 1..=cfg.max_multiple {
                    let q = e.multiply_i64(k, &base);
                    if !q.is_infinity() {
                        quadratic.insert(QuadraticEntry { d, point: quadratic_line(&q) });
                    }
                }
            }
        }
        Ok(Corpus {
            curve: CurveSpec::from_curve(e),
            rational: rational.into_iter().collect(),
            quadratic: quadratic.into_iter().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.rational.len() + self.quadratic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Torsion,
    Nontorsion,
    /// Neither a small torsion order nor a height witness.
    Unclassified,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusEntry {
    pub point: String,
    pub field: String,
    pub status: PointStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_order: Option<u32>,
    pub height: f64,
    pub error_bound: f64,
    pub meets_bound: bool,
}

/// ĥ(Φ(σ)P) against log p − c₁.
#[derive(Clone, Debug, Serialize)]
pub struct ImageCheck {
    pub point: String,
    pub field: String,
    pub automorphism: String,
    pub image_is_identity: bool,
    pub height: f64,
    pub error_bound: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationRun {
    pub curve: String,
    pub p: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub c: BigRational,
    pub corpus: Vec<CorpusEntry>,
    pub violations: Vec<String>,
    pub image_checks: Vec<ImageCheck>,
    pub nontorsion_count: usize,
    pub fields: Vec<String>,
    /// No point of the corpus was nontorsion, so the bound was never tested.
    pub vacuous: bool,
    pub caveats: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub torsion: TorsionConfig,
    /// Accuracy for ĥ(Φ(σ)P), which only has to clear log p − c₁.
    pub image_doubling: DoublingConfig,
    pub threads: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            // Corpus heights only need to clear C and the witness threshold.
            torsion: TorsionConfig { doubling: DoublingConfig { target_error: 1e-4, ..DoublingConfig::default() }, ..TorsionConfig::default() },
            image_doubling: DoublingConfig { target_error: 1e-3, ..DoublingConfig::default() },
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

struct Evaluated {
    entry: CorpusEntry,
    image: Option<ImageCheck>,
}

fn evaluate<F: Scalar>(
    e: &WeierstrassCurve,
    pt: &CurvePoint<F>,
    field: String,
    cert: &BoundCertificate,
    c1: f64,
    cfg: &VerifyConfig,
) -> Result<Evaluated> {
    let c = cert.c_f64();
    let label = pt.to_string();
    let (status, order, height, err) = match torsion_test(e, pt, &cfg.torsion)? {
        TorsionOutcome::Torsion { order } => (PointStatus::Torsion, Some(order), 0.0, 0.0),
        TorsionOutcome::NontorsionWitness { height, error_bound } => (PointStatus::Nontorsion, None, height, error_bound),
        TorsionOutcome::Inconclusive { height, error_bound } => (PointStatus::Unclassified, None, height, error_bound),
    };
    let meets_bound = status == PointStatus::Torsion || height - err >= c;
    let entry = CorpusEntry { point: label.clone(), field: field.clone(), status, torsion_order: order, height, error_bound: err, meets_bound };
    if status == PointStatus::Torsion || reduction_type(e, cert.p)?.kind != ReductionKind::Good {
        return Ok(Evaluated { entry, image: None });
    }
    let base = pt.base().expect("affine point");
    let Ok(sigma) = frobenius_automorphism(base, cert.p) else {
        return Ok(Evaluated { entry, image: None });
    };
    let frob = char_poly_frobenius(e, cert.p)?;
    let image = apply_group_ring(e, &GroupRingAction::new(frob.phi, sigma), pt)?;
    let bound = (cert.p as f64).ln() - c1;
    let check = if image.is_infinity() {
        ImageCheck { point: label, field, automorphism: format!("{sigma:?}"), image_is_identity: true, height: 0.0, error_bound: 0.0, bound, holds: false }
    } else {
        let h = canonical_height_doubling(e, &image, &cfg.image_doubling)?;
        ImageCheck {
            point: label,
            field,
            automorphism: format!("{sigma:?}"),
            image_is_identity: false,
            height: h.value,
            error_bound: h.error_bound,
            bound,
            holds: h.value - h.error_bound >= bound,
        }
    };
    Ok(Evaluated { entry, image: Some(check) })
}

enum Job {
    Rational(CurvePoint<BigRational>),
    Quadratic(CurvePoint<QuadraticElement>, QuadraticField),
}

/// ĥ of every corpus point against the certificate's constant. Any
/// nontorsion point below C is returned as a verification failure.
pub fn verify_corpus(
    e: &WeierstrassCurve,
    cert: &BoundCertificate,
    corpus: &Corpus,
    c1: f64,
    cfg: &VerifyConfig,
) -> Result<VerificationRun> {
    let mut jobs = Vec::new();
    for s in &corpus.rational {
        let pt = parse_rational_point(s)?;
        e.check(&pt)?;
        jobs.push(Job::Rational(pt));
    }
    for q in &corpus.quadratic {
        let k = QuadraticField::new(q.d)?;
        let pt = parse_quadratic_point(&q.point, k)?;
        e.check(&pt)?;
        jobs.push(Job::Quadratic(pt, k));
    }
    let run_job = |job: &Job| match job {
        Job::Rational(pt) => evaluate(e, pt, "Q".into(), cert, c1, cfg),
        Job::Quadratic(pt, k) => evaluate(e, pt, k.to_string(), cert, c1, cfg),
    };
    let threads = cfg.threads.max(1).min(jobs.len().max(1));
    let chunk = jobs.len().div_ceil(threads).max(1);
    let results: Vec<Result<Evaluated>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.chunks(chunk).map(|part| s.spawn(move || part.iter().map(run_job).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("corpus worker panicked")).collect()
    });
    let mut entries = Vec::new();
    let mut image_checks = Vec::new();
    for r in results {
        let ev = r?;
        entries.push(ev.entry);
        image_checks.extend(ev.image);
    }
    let key = |f: &str, p: &str| (f.to_string(), p.to_string());
    entries.sort_by_key(|a| key(&a.field, &a.point));
    image_checks.sort_by_key(|a| key(&a.field, &a.point));
    let violations: Vec<String> = entries.iter().filter(|x| !x.meets_bound).map(|x| format!("{} over {}: ĥ = {}", x.point, x.field, x.height)).collect();
    let nontorsion: Vec<&CorpusEntry> = entries.iter().filter(|x| x.status != PointStatus::Torsion).collect();
    let fields: BTreeSet<String> = nontorsion.iter().map(|x| x.field.clone()).collect();
    let mut caveats = cert.caveats.clone();
    if !image_checks.is_empty() {
        caveats.push(format!("image checks compare against log p - c1 with c1 = {c1:.6}"));
    }
    if let Some(v) = violations.first() {
        return Err(Error::VerificationFailed(format!("ĥ below C = {}: {v}", cert.c)));
    }
    Ok(VerificationRun {
        curve: e.to_string(),
        p: cert.p,
        c: cert.c.clone(),
        nontorsion_count: nontorsion.len(),
        vacuous: nontorsion.is_empty(),
        fields: fields.into_iter().collect(),
        corpus: entries,
        violations,
        image_checks,
        caveats,
    })
}

#[derive(Clone, Debug, Default)]
pub struct PipelineConfig {
    pub selection: SelectionConfig,
    pub corpus: CorpusConfig,
    pub verify: VerifyConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub curve: String,
    pub cm: bool,
    pub c1: C1Report,
    pub selection: PrimeSelectionReport,
    pub certificate: BoundCertificate,
    pub verification: VerificationRun,
}

/// Selection, certificate and corpus check. Uses `corpus` when given and
/// builds one from the configuration otherwise.
pub fn run_pipeline(e: &WeierstrassCurve, corpus: Option<&Corpus>, cfg: &PipelineConfig) -> Result<PipelineReport> {
    let (selection, c1) = select_prime(e, &cfg.selection)?;
    let mut certificate = compute_bound(selection.p)?;
    match selection.cond_torsion.status {
        TorsionGate::HeuristicPass => certificate
            .caveats
            .push("condition (1) is supported by a Frobenius sampling heuristic, not proven".into()),
        TorsionGate::Asserted => certificate.caveats.push("condition (1) is asserted by the user".into()),
        TorsionGate::Fail => {}
    }
    if selection.cond_torsion.evidence.cm {
        certificate.caveats.push("curve has CM; the non-CM argument does not apply without the assertion".into());
    }
    if c1.mode == C1Mode::Empirical {
        certificate.caveats.push("c1 is an empirical estimate over a sample of points".into());
    }
    if let Some(w) = &c1.warning {
        certificate.caveats.push(w.clone());
    }
    let built;
    let corpus = match corpus {
        Some(c) => c,
        None => {
            built = Corpus::build(e, &cfg.corpus)?;
            &built
        }
    };
    let verification = verify_corpus(e, &certificate, corpus, c1.value, &cfg.verify)?;
    Ok(PipelineReport { curve: e.to_string(), cm: e.has_rational_cm_j(), c1, selection, certificate, verification })
}
