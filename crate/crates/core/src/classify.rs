//! Finite-horizon diagnostics for the mean behaviour of orbits.
//!
//! A weighted shift falls into one of three regimes: every orbit is mean
//! asymptotic to zero, generic vectors are absolutely mean irregular
//! (`liminf A_n = 0`, `limsup A_n = ∞`), or hypercyclic vectors are mean
//! divergent (`A_n → ∞`). Nothing here certifies a limit. Every verdict is a
//! pure function of windowed evidence and explicit thresholds, and carries
//! the horizon it was computed at.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::ShiftOperator;
use crate::orbitstats::{cesaro_series, CesaroSeries, Extremum};
use crate::seqcore::{block_bounds, DyadicLog, Side, WeightKind};
use crate::vectors::{sample_vector, Envelope, SpaceTag, SupportedVector};

pub const HORIZON_CAVEAT: &str =
    "finite-horizon diagnostic: windowed extrema of A_n, no limit is certified";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    MeanToZero,
    MeanIrregular,
    MeanDivergent,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::MeanToZero => "MeanToZero",
            Verdict::MeanIrregular => "MeanIrregular",
            Verdict::MeanDivergent => "MeanDivergent",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub tol_zero: f64,
    pub tol_inf: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            tol_zero: 1e-3,
            tol_inf: 1e3,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if self.tol_zero > 0.0 && self.tol_zero < self.tol_inf && self.tol_inf.is_finite() {
            Ok(())
        } else {
            Err(Error::config(format!(
                "thresholds must satisfy 0 < tol_zero < tol_inf, got {} and {}",
                self.tol_zero, self.tol_inf
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evidence {
    /// `A_N`.
    pub a_n: f64,
    /// `A_{⌊N/2⌋}`.
    pub a_half: f64,
    pub tail_window_min: Extremum,
    pub tail_window_max: Extremum,
    /// `A_N / A_{N/2}`; `None` when `A_{N/2} = 0`.
    pub growth_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrichotomyReport {
    pub verdict: Verdict,
    pub horizon: usize,
    pub window: usize,
    pub evidence: Evidence,
    pub thresholds: Thresholds,
    pub caveat: &'static str,
}

impl Evidence {
    pub fn from_series(series: &CesaroSeries) -> Self {
        let a_n = series.last_average();
        let a_half = series.average(series.horizon / 2);
        Self {
            a_n,
            a_half,
            tail_window_min: series.tail_window_min,
            tail_window_max: series.tail_window_max,
            growth_ratio: (a_half > 0.0).then(|| a_n / a_half),
        }
    }
}

/// The verdict rule, a pure function of evidence and thresholds.
pub fn verdict_for(evidence: &Evidence, thresholds: &Thresholds) -> Verdict {
    let lo = evidence.tail_window_min.value;
    let hi = evidence.tail_window_max.value;
    if hi < thresholds.tol_zero && evidence.a_n <= evidence.a_half {
        Verdict::MeanToZero
    } else if lo > thresholds.tol_inf && evidence.a_n >= evidence.a_half {
        Verdict::MeanDivergent
    } else if lo < thresholds.tol_zero && hi > thresholds.tol_inf {
        Verdict::MeanIrregular
    } else {
        Verdict::Inconclusive
    }
}

pub fn classify_orbit(
    op: &ShiftOperator,
    x: &SupportedVector,
    space: SpaceTag,
    horizon: usize,
    window: usize,
    thresholds: Thresholds,
) -> Result<TrichotomyReport> {
    thresholds.validate()?;
    if window < 2 || horizon < window {
        return Err(Error::config(format!(
            "need horizon >= window >= 2, got horizon {horizon}, window {window}"
        )));
    }
    let series = cesaro_series(op, x, space, horizon, window)?;
    Ok(report_from_series(&series, thresholds))
}

pub fn report_from_series(series: &CesaroSeries, thresholds: Thresholds) -> TrichotomyReport {
    let evidence = Evidence::from_series(series);
    TrichotomyReport {
        verdict: verdict_for(&evidence, &thresholds),
        horizon: series.horizon,
        window: series.window,
        evidence,
        thresholds,
        caveat: HORIZON_CAVEAT,
    }
}

/// Lower estimate of the absolute Cesàro bound `sup_n A_n(x) / ‖x‖`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CesaroBound {
    pub c_hat: f64,
    /// Index into the sample list of the maximising vector.
    pub witness: usize,
    pub witness_n: usize,
}

impl CesaroBound {
    /// Whether the estimate already exceeds `cap`, i.e. the samples witness
    /// that no bound `C <= cap` can hold.
    pub fn exceeds(&self, cap: f64) -> bool {
        self.c_hat > cap
    }
}

/// `max_{x, n <= N} A_n(x) / ‖x‖` over the samples. First maximiser wins ties.
pub fn abs_cesaro_bound_estimate(
    op: &ShiftOperator,
    space: SpaceTag,
    samples: &[SupportedVector],
    horizon: usize,
) -> Result<CesaroBound> {
    if samples.is_empty() {
        return Err(Error::config("need at least one sample vector"));
    }
    if let Some(k) = samples.iter().position(SupportedVector::is_zero) {
        return Err(Error::domain(format!("sample {k} is the zero vector")));
    }
    let per_sample: Vec<(f64, usize)> = samples
        .par_iter()
        .map(|x| -> Result<(f64, usize)> {
            let series = cesaro_series(op, x, space, horizon, 1)?;
            let norm = x.norm(space);
            let (_, max) = series.range_extrema(1, horizon);
            Ok((max.value / norm, max.n))
        })
        .collect::<Result<_>>()?;
    let mut best = CesaroBound {
        c_hat: per_sample[0].0,
        witness: 0,
        witness_n: per_sample[0].1,
    };
    for (k, &(c, n)) in per_sample.iter().enumerate().skip(1) {
        if c > best.c_hat {
            best = CesaroBound {
                c_hat: c,
                witness: k,
                witness_n: n,
            };
        }
    }
    Ok(best)
}

/// Products around a center `k` at power `n`:
/// backward `∏_{j=k-n}^{k} w_j`, forward `∏_{j=k+1}^{k+n} w_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionWitness {
    pub k: i64,
    pub n: u64,
    pub backward_product: DyadicLog,
    pub forward_product: DyadicLog,
}

impl CriterionWitness {
    pub fn compute(op: &ShiftOperator, k: i64, n: u64) -> Result<Self> {
        let n_i = i64::try_from(n).map_err(|_| Error::capacity("power does not fit i64"))?;
        let w = op.weights();
        let lo = k
            .checked_sub(n_i)
            .ok_or_else(|| Error::capacity("backward range underflow"))?;
        let hi = k
            .checked_add(n_i)
            .ok_or_else(|| Error::capacity("forward range overflow"))?;
        Ok(Self {
            k,
            n,
            backward_product: w.product_range(lo, k)?,
            forward_product: w.product_range(k + 1, hi)?,
        })
    }

    pub fn satisfies(&self, eps: f64, big: f64) -> bool {
        self.backward_product.log2() < eps.log2() && self.forward_product.log2() > big.log2()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterResult {
    pub k: i64,
    /// First power in list order meeting both bounds.
    pub witness: Option<CriterionWitness>,
    /// Witness with the smallest backward product, reported when none passes.
    pub closest: CriterionWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub radius: i64,
    pub powers: Vec<u64>,
    pub eps: f64,
    pub big: f64,
    pub centers: Vec<CenterResult>,
    pub pass: bool,
}

/// Default power sequence: `b_1..b_18` for the block weight, `2^0..2^20` otherwise.
pub fn default_powers(op: &ShiftOperator) -> Vec<u64> {
    match op.weights().kind() {
        WeightKind::PaperBlocks => (1..=18)
            .map(|i| block_bounds(i).expect("i <= cap").b as u64)
            .collect(),
        _ => (0..=20).map(|m| 1u64 << m).collect(),
    }
}

/// For every center `|k| <= radius`, look for a power `n` with backward
/// product below `eps` and forward product above `big`.
pub fn hypercyclicity_criterion_check(
    op: &ShiftOperator,
    radius: i64,
    powers: &[u64],
    eps: f64,
    big: f64,
) -> Result<CriterionReport> {
    if op.side() != Side::Bilateral {
        return Err(Error::domain(
            "the product characterization applies to bilateral shifts only",
        ));
    }
    if powers.is_empty() || powers.contains(&0) {
        return Err(Error::config("powers must be a nonempty list of integers >= 1"));
    }
    if radius < 0 {
        return Err(Error::config("center radius must be >= 0"));
    }
    if !(eps > 0.0 && big > 0.0) {
        return Err(Error::config("eps and big must be positive"));
    }
    let centers = (-radius..=radius)
        .map(|k| {
            let witnesses = powers
                .iter()
                .map(|&n| CriterionWitness::compute(op, k, n))
                .collect::<Result<Vec<_>>>()?;
            let witness = witnesses.iter().find(|w| w.satisfies(eps, big)).copied();
            let closest = *witnesses
                .iter()
                .min_by(|a, b| a.backward_product.log2().total_cmp(&b.backward_product.log2()))
                .expect("powers nonempty");
            Ok(CenterResult {
                k,
                witness,
                closest,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = centers.iter().all(|c| c.witness.is_some());
    Ok(CriterionReport {
        radius,
        powers: powers.to_vec(),
        eps,
        big,
        centers,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicCheck {
    pub vector: String,
    pub period: u64,
    /// `‖T^period x - x‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KitaiReport {
    /// `T S y == y` held exactly for every `y` sample.
    pub inverse_law_ok: bool,
    /// `‖T^k x‖`, `k = 1..=k_max`, per `x` sample.
    pub forward_decay: Vec<Vec<f64>>,
    pub forward_decay_ok: bool,
    /// `‖S^k y‖`, `k = 1..=k_max`, per `y` sample.
    pub backward_decay: Vec<Vec<f64>>,
    pub backward_decay_ok: bool,
    pub periodic_point: Option<PeriodicCheck>,
}

/// Max of the last quarter strictly below the max of the first quarter.
pub fn decays(seq: &[f64]) -> bool {
    if seq.is_empty() {
        return false;
    }
    let q = (seq.len() / 4).max(1);
    let head = seq[..q].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail = seq[seq.len() - q..]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    tail < head
}

pub fn kitai_witness_check(
    op: &ShiftOperator,
    space: SpaceTag,
    x_samples: &[SupportedVector],
    y_samples: &[SupportedVector],
    k_max: usize,
    periodic_candidate: Option<(&SupportedVector, u64)>,
) -> Result<KitaiReport> {
    if k_max == 0 {
        return Err(Error::config("k_max must be >= 1"));
    }
    let s = op.right_inverse();
    let mut inverse_law_ok = true;
    let mut backward_decay = Vec::with_capacity(y_samples.len());
    for y in y_samples {
        inverse_law_ok &= op.apply(&s.apply(y)?)? == *y;
        let mut cur = y.clone();
        let mut norms = Vec::with_capacity(k_max);
        for _ in 0..k_max {
            cur = s.apply(&cur)?;
            norms.push(cur.norm(space));
        }
        backward_decay.push(norms);
    }
    let forward_decay = x_samples
        .iter()
        .map(|x| op.iterate_norms(x, space, k_max).map(|n| n.norms))
        .collect::<Result<Vec<_>>>()?;
    let periodic_point = periodic_candidate
        .map(|(x, period)| -> Result<PeriodicCheck> {
            let image = op.apply_power(x, period)?;
            Ok(PeriodicCheck {
                vector: x.label(),
                period,
                residual: image.combine(x, 1.0, -1.0)?.norm(space),
            })
        })
        .transpose()?;
    Ok(KitaiReport {
        inverse_law_ok,
        forward_decay_ok: !forward_decay.is_empty() && forward_decay.iter().all(|s| decays(s)),
        forward_decay,
        backward_decay_ok: !backward_decay.is_empty() && backward_decay.iter().all(|s| decays(s)),
        backward_decay,
        periodic_point,
    })
}

/// Tail-window extrema of `D_n = (1/n) Σ ‖T^i x - T^i y‖`.
#[derive(Debug, Clone)]
pub struct PairStatistic {
    pub tail_window_min: Extremum,
    pub tail_window_max: Extremum,
    pub series: CesaroSeries,
}

/// Computed as the Cesàro series of `x - y`, using linearity of `T`.
pub fn mean_liyorke_stat(
    op: &ShiftOperator,
    x: &SupportedVector,
    y: &SupportedVector,
    space: SpaceTag,
    horizon: usize,
    window: usize,
) -> Result<PairStatistic> {
    let diff = x.combine(y, 1.0, -1.0)?;
    let series = cesaro_series(op, &diff, space, horizon, window)?;
    Ok(PairStatistic {
        tail_window_min: series.tail_window_min,
        tail_window_max: series.tail_window_max,
        series,
    })
}

/// Settings for an operator-level sweep over sampled vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub horizon: usize,
    pub window: usize,
    pub thresholds: Thresholds,
    /// Basis vectors `e_j` with `|j| <= basis_radius` (or `1..=basis_radius`).
    pub basis_radius: i64,
    pub random_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledVerdict {
    pub vector: String,
    pub report: TrichotomyReport,
}

/// Which regime the operator appears to be in, judged on a deterministic
/// sample. Genericity is not finitely checkable, so this is sampled
/// evidence only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorReport {
    pub evidence_kind: &'static str,
    pub majority: Verdict,
    pub counts: BTreeMap<Verdict, usize>,
    pub samples: Vec<SampledVerdict>,
}

/// Deterministic sample: basis vectors, then seeded random vectors
/// (seed, seed + 1, ...) with geometric envelope 1/2 and support radius 16.
pub fn sweep_samples(op: &ShiftOperator, cfg: &SweepConfig) -> Result<Vec<SupportedVector>> {
    let side = op.side();
    let basis: Vec<i64> = match side {
        Side::Bilateral => (-cfg.basis_radius..=cfg.basis_radius).collect(),
        Side::Unilateral => (1..=cfg.basis_radius.max(1)).collect(),
    };
    let mut out = basis
        .into_iter()
        .map(|j| SupportedVector::basis(j, side))
        .collect::<Result<Vec<_>>>()?;
    for k in 0..cfg.random_samples as u64 {
        out.push(sample_vector(
            cfg.seed.wrapping_add(k),
            side,
            16,
            Envelope::Geometric(0.5),
        )?);
    }
    Ok(out)
}

pub fn classify_operator(
    op: &ShiftOperator,
    space: SpaceTag,
    cfg: &SweepConfig,
) -> Result<OperatorReport> {
    let vectors = sweep_samples(op, cfg)?;
    let samples = vectors
        .par_iter()
        .map(|x| {
            classify_orbit(op, x, space, cfg.horizon, cfg.window, cfg.thresholds).map(|report| {
                SampledVerdict {
                    vector: x.label(),
                    report,
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = BTreeMap::new();
    for s in &samples {
        *counts.entry(s.report.verdict).or_insert(0) += 1;
    }
    Ok(OperatorReport {
        evidence_kind: "sampled evidence",
        majority: majority(&counts),
        counts,
        samples,
    })
}

/// Most frequent verdict; a tie for first place is `Inconclusive`.
fn majority(counts: &BTreeMap<Verdict, usize>) -> Verdict {
    let top = counts.values().copied().max().unwrap_or(0);
    let leaders: Vec<Verdict> = counts
        .iter()
        .filter(|(_, &c)| c == top)
        .map(|(&v, _)| v)
        .collect();
    match leaders.as_slice() {
        [only] => *only,
        _ => Verdict::Inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::WeightSpec;

    fn blocks() -> ShiftOperator {
        ShiftOperator::new(WeightSpec::paper_blocks())
    }

    fn rolewicz2() -> ShiftOperator {
        ShiftOperator::new(WeightSpec::rolewicz(2.0).unwrap())
    }

    fn identity_like() -> ShiftOperator {
        ShiftOperator::new(WeightSpec::constant(1.0, Side::Bilateral).unwrap())
    }

    fn e(j: i64, side: Side) -> SupportedVector {
        SupportedVector::basis(j, side).unwrap()
    }

    #[test]
    fn verdict_examples() {
        let r = classify_orbit(
            &rolewicz2(),
            &e(7, Side::Unilateral),
            SpaceTag::l2(),
            10_000,
            5000,
            Thresholds {
                tol_zero: 0.1,
                tol_inf: 1e3,
            },
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::MeanToZero);

        let r = classify_orbit(
            &identity_like(),
            &e(0, Side::Bilateral),
            SpaceTag::l2(),
            1000,
            500,
            Thresholds::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.evidence.a_n, 1.0);
        assert_eq!(r.caveat, HORIZON_CAVEAT);
    }

    #[test]
    fn threshold_and_window_errors() {
        let bad = Thresholds {
            tol_zero: 10.0,
            tol_inf: 1.0,
        };
        let x = e(0, Side::Bilateral);
        assert!(matches!(
            classify_orbit(&blocks(), &x, SpaceTag::l2(), 100, 50, bad),
            Err(Error::Config(_))
        ));
        assert!(classify_orbit(&blocks(), &x, SpaceTag::l2(), 100, 1, Thresholds::default()).is_err());
    }

    #[test]
    fn verdict_rule_cases() {
        let ev = |lo: f64, hi: f64, a_n: f64, a_half: f64| Evidence {
            a_n,
            a_half,
            tail_window_min: Extremum { n: 1, value: lo },
            tail_window_max: Extremum { n: 2, value: hi },
            growth_ratio: None,
        };
        let t = Thresholds::default();
        assert_eq!(verdict_for(&ev(0.0, 1e-4, 1e-5, 1e-4), &t), Verdict::MeanToZero);
        assert_eq!(verdict_for(&ev(0.0, 1e-4, 1e-4, 1e-5), &t), Verdict::Inconclusive);
        assert_eq!(verdict_for(&ev(2e3, 5e3, 5e3, 2e3), &t), Verdict::MeanDivergent);
        assert_eq!(verdict_for(&ev(1e-4, 5e3, 5e3, 2e3), &t), Verdict::MeanIrregular);
        assert_eq!(verdict_for(&ev(1.0, 1.0, 1.0, 1.0), &t), Verdict::Inconclusive);
    }

    #[test]
    fn scale_equivariance() {
        let x = sample_vector(3, Side::Bilateral, 10, Envelope::Geometric(0.7)).unwrap();
        let t = Thresholds {
            tol_zero: 0.5,
            tol_inf: 40.0,
        };
        let base = classify_orbit(&blocks(), &x, SpaceTag::l2(), 4096, 2048, t).unwrap();
        for alpha in [0.25, 4.0, 1024.0] {
            let scaled_t = Thresholds {
                tol_zero: t.tol_zero * alpha,
                tol_inf: t.tol_inf * alpha,
            };
            let r =
                classify_orbit(&blocks(), &x.scale(alpha), SpaceTag::l2(), 4096, 2048, scaled_t)
                    .unwrap();
            assert_eq!(r.evidence.a_n, alpha * base.evidence.a_n);
            assert_eq!(r.evidence.tail_window_min.value, alpha * base.evidence.tail_window_min.value);
            assert_eq!(r.evidence.tail_window_max.value, alpha * base.evidence.tail_window_max.value);
            assert_eq!(r.verdict, base.verdict);
        }
    }

    #[test]
    fn cesaro_bound_examples() {
        let samples = vec![e(0, Side::Bilateral), e(3, Side::Bilateral)];
        let b = abs_cesaro_bound_estimate(&identity_like(), SpaceTag::l2(), &samples, 500).unwrap();
        assert_eq!(b.c_hat, 1.0);

        let samples: Vec<_> = (1..=40).map(|j| e(j, Side::Unilateral)).collect();
        let b = abs_cesaro_bound_estimate(&rolewicz2(), SpaceTag::l2(), &samples, 64).unwrap();
        assert_eq!(b.witness, 39);
        assert_eq!(b.witness_n, 39);
        assert_eq!(b.c_hat, (2f64.powi(40) - 2.0) / 39.0);
        assert!(b.exceeds(1e10));

        let with_zero = vec![e(1, Side::Unilateral), SupportedVector::zero(Side::Unilateral)];
        assert!(matches!(
            abs_cesaro_bound_estimate(&rolewicz2(), SpaceTag::l2(), &with_zero, 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cesaro_bound_is_monotone() {
        let op = ShiftOperator::new(WeightSpec::ratio_power(2.0).unwrap());
        let all: Vec<_> = (1..=12).map(|j| e(j, Side::Unilateral)).collect();
        let mut prev = 0.0;
        for n in [5, 10, 20, 40] {
            let c = abs_cesaro_bound_estimate(&op, SpaceTag::l2(), &all, n).unwrap().c_hat;
            assert!(c >= prev);
            prev = c;
        }
        let mut prev = 0.0;
        for k in 1..=all.len() {
            let c = abs_cesaro_bound_estimate(&op, SpaceTag::l2(), &all[..k], 40).unwrap().c_hat;
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn criterion_examples() {
        let w = CriterionWitness::compute(&blocks(), 0, 37).unwrap();
        assert_eq!(w.backward_product, DyadicLog::exact(-3));
        assert_eq!(w.forward_product, DyadicLog::exact(37));

        let r = hypercyclicity_criterion_check(&identity_like(), 3, &[1, 2, 4, 1024], 1e-3, 1e6)
            .unwrap();
        assert!(!r.pass);

        assert!(matches!(
            hypercyclicity_criterion_check(&rolewicz2(), 3, &[1], 1e-3, 1e6),
            Err(Error::Domain(_))
        ));
        assert!(hypercyclicity_criterion_check(&blocks(), 3, &[], 1e-3, 1e6).is_err());
    }

    #[test]
    fn criterion_center_shift_costs_two_per_step() {
        // for 0 < k < 2i - 1 the backward product over [k - b_i, k] is 2^(2k - i)
        let op = blocks();
        for i in 3..=18u32 {
            let b = block_bounds(i).unwrap().b as u64;
            for k in 0..(2 * i as i64 - 1) {
                let w = CriterionWitness::compute(&op, k, b).unwrap();
                assert_eq!(w.backward_product, DyadicLog::exact(2 * k - i as i64), "i={i} k={k}");
            }
        }
    }

    #[test]
    fn kitai_examples() {
        let op = rolewicz2();
        let r = kitai_witness_check(&op, SpaceTag::l2(), &[e(3, Side::Unilateral)], &[e(1, Side::Unilateral)], 30, None)
            .unwrap();
        assert!(r.inverse_law_ok);
        for (k, &v) in r.backward_decay[0].iter().enumerate() {
            assert_eq!(v, 2f64.powi(-(k as i32 + 1)));
        }
        assert!(r.backward_decay_ok);
        assert!(r.forward_decay_ok);

        let half = ShiftOperator::new(WeightSpec::constant(0.5, Side::Unilateral).unwrap());
        let r = kitai_witness_check(&half, SpaceTag::l2(), &[], &[e(1, Side::Unilateral)], 30, None).unwrap();
        for (k, &v) in r.backward_decay[0].iter().enumerate() {
            assert_eq!(v, 2f64.powi(k as i32 + 1));
        }
        assert!(!r.backward_decay_ok);

        let fixed = SupportedVector::from_entries((1..=60).map(|k| (k, 2f64.powi(-(k as i32)))), Side::Unilateral)
            .unwrap();
        let r = kitai_witness_check(&op, SpaceTag::l2(), &[], &[], 4, Some((&fixed, 1))).unwrap();
        assert!(r.periodic_point.unwrap().residual <= 2f64.powi(-59));
    }

    #[test]
    fn decay_flag() {
        assert!(decays(&[4.0, 3.0, 2.0, 1.0]));
        assert!(!decays(&[1.0, 1.0, 1.0, 1.0]));
        assert!(!decays(&[]));
    }

    #[test]
    fn liyorke_examples() {
        let op = blocks();
        let x = sample_vector(2, Side::Bilateral, 6, Envelope::Geometric(0.5)).unwrap();
        let p = mean_liyorke_stat(&op, &x, &x, SpaceTag::l2(), 200, 100).unwrap();
        assert_eq!((p.tail_window_min.value, p.tail_window_max.value), (0.0, 0.0));
        let zero = SupportedVector::zero(Side::Bilateral);
        let p = mean_liyorke_stat(&op, &x, &zero, SpaceTag::l2(), 200, 100).unwrap();
        let s = cesaro_series(&op, &x, SpaceTag::l2(), 200, 100).unwrap();
        assert_eq!(p.tail_window_min, s.tail_window_min);
        assert_eq!(p.tail_window_max, s.tail_window_max);
        let uni = e(1, Side::Unilateral);
        assert!(matches!(
            mean_liyorke_stat(&op, &x, &uni, SpaceTag::l2(), 10, 5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn liyorke_symmetry() {
        let op = ShiftOperator::new(WeightSpec::ratio_power(2.0).unwrap());
        for seed in 0..5 {
            let x = sample_vector(seed, Side::Unilateral, 20, Envelope::Flat).unwrap();
            let y = sample_vector(seed + 50, Side::Unilateral, 20, Envelope::Flat).unwrap();
            let a = mean_liyorke_stat(&op, &x, &y, SpaceTag::l2(), 300, 150).unwrap();
            let b = mean_liyorke_stat(&op, &y, &x, SpaceTag::l2(), 300, 150).unwrap();
            assert_eq!(a.series.averages, b.series.averages);
        }
    }

    #[test]
    fn operator_sweep_is_deterministic() {
        let cfg = SweepConfig {
            horizon: 2000,
            window: 1000,
            thresholds: Thresholds::default(),
            basis_radius: 4,
            random_samples: 3,
            seed: 11,
        };
        let a = classify_operator(&rolewicz2(), SpaceTag::l2(), &cfg).unwrap();
        let b = classify_operator(&rolewicz2(), SpaceTag::l2(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples.len(), 7);
        assert_eq!(a.evidence_kind, "sampled evidence");
    }

    #[test]
    fn majority_tie_is_inconclusive() {
        let counts: BTreeMap<_, _> = [(Verdict::MeanToZero, 2), (Verdict::MeanDivergent, 2)].into();
        assert_eq!(majority(&counts), Verdict::Inconclusive);
        let counts: BTreeMap<_, _> = [(Verdict::MeanToZero, 3), (Verdict::MeanDivergent, 2)].into();
        assert_eq!(majority(&counts), Verdict::MeanToZero);
    }
}
