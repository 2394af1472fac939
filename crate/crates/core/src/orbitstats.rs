//! Cesàro averages of orbit norms and densities of integer sets.
//!
//! For an orbit `x, Tx, T^2x, ...` the partial sums are
//! `S_n = Σ_{i=1}^n ‖T^i x‖` and the Cesàro averages `A_n = S_n / n`.
//! Limits are never certified: the `liminf`/`limsup` of `A_n` are
//! reported as the minimum and maximum over a tail window `[N - W + 1, N]`.
//!
//! Sums are accumulated twice: in a fixed-point `i128` accumulator that is
//! exact while every term is a dyadic rational of moderate size, and in a
//! Neumaier-compensated `f64` sum that is used once exactness is lost.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{OrbitNorms, ShiftOperator};
use crate::vectors::{SpaceTag, SupportedVector};

const FRAC_BITS: i32 = 64;

/// Exact sum of `f64` terms in fixed point with [`FRAC_BITS`] fractional
/// bits. Becomes permanently inexact on the first term that would round or
/// overflow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExactSum {
    scaled: i128,
    lost: bool,
}

impl ExactSum {
    pub fn add(&mut self, x: f64) {
        if self.lost {
            return;
        }
        match to_fixed(x).and_then(|v| self.scaled.checked_add(v)) {
            Some(s) => self.scaled = s,
            None => self.lost = true,
        }
    }

    pub fn is_exact(&self) -> bool {
        !self.lost
    }

    /// The sum scaled by `2^FRAC_BITS`, if still exact.
    pub fn scaled(&self) -> Option<i128> {
        (!self.lost).then_some(self.scaled)
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.scaled()
            .map(|s| s as f64 * crate::seqcore::pow2(-(FRAC_BITS as i64)))
    }
}

fn to_fixed(x: f64) -> Option<i128> {
    if x == 0.0 {
        return Some(0);
    }
    if !x.is_finite() {
        return None;
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    let shift = exp + FRAC_BITS;
    let magnitude = if shift >= 0 {
        if shift > 126 - 53 {
            return None;
        }
        (mantissa as i128) << shift
    } else {
        let drop = (-shift) as u32;
        if drop >= 64 || mantissa.trailing_zeros() < drop {
            return None;
        }
        (mantissa >> drop) as i128
    };
    Some(if x < 0.0 { -magnitude } else { magnitude })
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Exact-when-possible running sum.
#[derive(Debug, Clone, Copy, Default)]
struct DualSum {
    exact: ExactSum,
    float: CompensatedSum,
}

impl DualSum {
    fn add(&mut self, x: f64) {
        self.exact.add(x);
        self.float.add(x);
    }

    fn value(&self) -> f64 {
        self.exact.to_f64().unwrap_or_else(|| self.float.value())
    }
}

/// Position and value of a windowed extremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub n: usize,
    pub value: f64,
}

/// Partial sums and Cesàro averages of `‖T^i x‖` up to a horizon.
#[derive(Debug, Clone)]
pub struct CesaroSeries {
    pub horizon: usize,
    pub window: usize,
    pub norms: OrbitNorms,
    /// `S_n` at index `n - 1`.
    pub partial_sums: Vec<f64>,
    /// `A_n` at index `n - 1`.
    pub averages: Vec<f64>,
    /// Whether every partial sum was accumulated without rounding.
    pub exact: bool,
    pub tail_window_min: Extremum,
    pub tail_window_max: Extremum,
}

impl CesaroSeries {
    pub fn from_norms(norms: OrbitNorms, window: usize) -> Result<Self> {
        let horizon = norms.len();
        check_window(horizon, window)?;
        let mut acc = DualSum::default();
        let mut partial_sums = Vec::with_capacity(horizon);
        let mut averages = Vec::with_capacity(horizon);
        for (i, &x) in norms.norms.iter().enumerate() {
            acc.add(x);
            let s = acc.value();
            partial_sums.push(s);
            averages.push(s / (i + 1) as f64);
        }
        let (tail_window_min, tail_window_max) = window_extrema(&averages, window);
        Ok(Self {
            horizon,
            window,
            norms,
            partial_sums,
            averages,
            exact: acc.exact.is_exact(),
            tail_window_min,
            tail_window_max,
        })
    }

    /// `A_n`, 1-based.
    pub fn average(&self, n: usize) -> f64 {
        self.averages[n - 1]
    }

    pub fn partial_sum(&self, n: usize) -> f64 {
        self.partial_sums[n - 1]
    }

    /// `A_N`.
    pub fn last_average(&self) -> f64 {
        self.averages[self.horizon - 1]
    }

    /// Minimum and maximum of `A_n` over `n` in `[lo, hi]` (1-based, inclusive).
    pub fn range_extrema(&self, lo: usize, hi: usize) -> (Extremum, Extremum) {
        let slice = &self.averages[lo - 1..hi];
        let (min, max) = window_extrema(slice, slice.len());
        let shift = |e: Extremum| Extremum {
            n: e.n + lo - 1,
            value: e.value,
        };
        (shift(min), shift(max))
    }

    /// CSV with columns `n,norm,partial_sum,cesaro_avg` plus `norm_log2`
    /// when the norms are exactly tracked powers of two. Rows are every
    /// `stride`-th `n` and always the last one.
    pub fn write_csv<W: Write>(&self, out: &mut W, stride: usize) -> io::Result<()> {
        let stride = stride.max(1);
        let exps = self.norms.exponents.as_ref();
        write!(out, "n,norm,partial_sum,cesaro_avg")?;
        if exps.is_some() {
            write!(out, ",norm_log2")?;
        }
        writeln!(out)?;
        for n in 1..=self.horizon {
            if n % stride != 0 && n != self.horizon {
                continue;
            }
            write!(
                out,
                "{},{},{},{}",
                n,
                fmt_f64(self.norms.at(n)),
                fmt_f64(self.partial_sum(n)),
                fmt_f64(self.average(n))
            )?;
            if let Some(exps) = exps {
                match exps[n - 1] {
                    Some(e) => write!(out, ",{e}")?,
                    None => write!(out, ",")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Round-trip-safe decimal form of an `f64`: the shortest digit string
/// (at most 17 significant digits) that parses back to the same value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// One parsed row of an orbit CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub n: usize,
    pub norm: f64,
    pub partial_sum: f64,
    pub cesaro_avg: f64,
    pub norm_log2: Option<i64>,
}

/// Parse the orbit CSV written by [`CesaroSeries::write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("empty csv"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns[..4] != ["n", "norm", "partial_sum", "cesaro_avg"] {
        return Err(Error::parse(format!("unexpected csv header '{header}'")));
    }
    let bad = |line: &str| Error::parse(format!("bad csv row '{line}'"));
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != columns.len() {
                return Err(bad(line));
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|_| bad(line));
            Ok(CsvRow {
                n: f[0].parse().map_err(|_| bad(line))?,
                norm: num(1)?,
                partial_sum: num(2)?,
                cesaro_avg: num(3)?,
                norm_log2: match f.get(4) {
                    Some(s) if !s.is_empty() => Some(s.parse().map_err(|_| bad(line))?),
                    _ => None,
                },
            })
        })
        .collect()
}

fn check_window(horizon: usize, window: usize) -> Result<()> {
    if window == 0 || window > horizon {
        return Err(Error::config(format!(
            "need horizon >= window >= 1, got horizon {horizon}, window {window}"
        )));
    }
    Ok(())
}

/// First argmin/argmax (1-based) of the last `window` entries.
fn window_extrema(values: &[f64], window: usize) -> (Extremum, Extremum) {
    let start = values.len() - window;
    let mut min = Extremum {
        n: start + 1,
        value: values[start],
    };
    let mut max = min;
    for (k, &v) in values.iter().enumerate().skip(start + 1) {
        if v < min.value {
            min = Extremum { n: k + 1, value: v };
        }
        if v > max.value {
            max = Extremum { n: k + 1, value: v };
        }
    }
    (min, max)
}

/// `A_n(x)` for `n = 1..=horizon` with tail-window extrema over the last
/// `window` indices.
pub fn cesaro_series(
    op: &ShiftOperator,
    x: &SupportedVector,
    space: SpaceTag,
    horizon: usize,
    window: usize,
) -> Result<CesaroSeries> {
    check_window(horizon, window)?;
    let norms = op.iterate_norms(x, space, horizon)?;
    CesaroSeries::from_norms(norms, window)
}

/// Largest relative discrepancy of
/// `S_{n+q}(x) = S_q(x) + S_n(T^q x)` over `n <= N - q`, normalised by
/// `max(1, S_{n+q}(x))`. Zero exactly when both sides stay exact.
pub fn tail_shift_identity_check(
    op: &ShiftOperator,
    x: &SupportedVector,
    space: SpaceTag,
    q: usize,
    horizon: usize,
) -> Result<f64> {
    if q == 0 || q >= horizon {
        return Err(Error::config(format!(
            "need 1 <= q < N, got q = {q}, N = {horizon}"
        )));
    }
    let head = op.iterate_norms(x, space, horizon)?;
    let shifted = op.apply_power(x, q as u64)?;
    let tail = op.iterate_norms(&shifted, space, horizon - q)?;

    let mut full = DualSum::default();
    let mut prefix_q = DualSum::default();
    for &v in &head.norms[..q] {
        prefix_q.add(v);
    }
    let mut rest = DualSum::default();
    let mut worst = 0.0f64;
    for (k, &v) in head.norms.iter().enumerate() {
        full.add(v);
        let m = k + 1;
        if m <= q {
            continue;
        }
        rest.add(tail.norms[m - q - 1]);
        let gap = match (full.exact.scaled(), prefix_q.exact.scaled(), rest.exact.scaled()) {
            (Some(a), Some(b), Some(c)) => {
                (a - b - c) as f64 * crate::seqcore::pow2(-(FRAC_BITS as i64))
            }
            _ => full.float.value() - prefix_q.float.value() - rest.float.value(),
        };
        worst = worst.max(gap.abs() / full.value().max(1.0));
    }
    Ok(worst)
}

/// Upper/lower density estimates of a set `A ⊆ ℕ` at a finite horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub horizon: usize,
    pub window: usize,
    /// `#(A ∩ [1, n])` at index `n - 1`.
    pub count_prefix: Vec<u64>,
    /// Max of `count(n) / n` over the tail window.
    pub udens_estimate: f64,
    pub udens_at: usize,
    /// Min of `count(n) / n` over the tail window.
    pub ldens_estimate: f64,
    pub ldens_at: usize,
}

impl DensityEstimate {
    pub fn count(&self, n: usize) -> u64 {
        self.count_prefix[n - 1]
    }

    /// `count(n) / n`.
    pub fn ratio(&self, n: usize) -> f64 {
        self.count(n) as f64 / n as f64
    }
}

/// Density estimate of `{n <= N : member(n)}`.
pub fn density(
    member: impl Fn(u64) -> bool,
    horizon: usize,
    window: usize,
) -> Result<DensityEstimate> {
    check_window(horizon, window)?;
    let mut count = 0u64;
    let count_prefix: Vec<u64> = (1..=horizon as u64)
        .map(|n| {
            count += member(n) as u64;
            count
        })
        .collect();
    Ok(estimate_from_counts(count_prefix, window))
}

/// Density estimate of an explicit strictly increasing list of positive integers.
pub fn density_of_sorted(members: &[u64], horizon: usize, window: usize) -> Result<DensityEstimate> {
    check_window(horizon, window)?;
    if members.windows(2).any(|w| w[0] >= w[1]) || members.first() == Some(&0) {
        return Err(Error::domain("member list must be strictly increasing positive integers"));
    }
    let mut next = members.iter().peekable();
    let mut count = 0u64;
    let count_prefix = (1..=horizon as u64)
        .map(|n| {
            if next.peek() == Some(&&n) {
                next.next();
                count += 1;
            }
            count
        })
        .collect();
    Ok(estimate_from_counts(count_prefix, window))
}

fn estimate_from_counts(count_prefix: Vec<u64>, window: usize) -> DensityEstimate {
    let horizon = count_prefix.len();
    let ratios: Vec<f64> = count_prefix
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 / (k + 1) as f64)
        .collect();
    let (min, max) = window_extrema(&ratios, window);
    DensityEstimate {
        horizon,
        window,
        count_prefix,
        udens_estimate: max.value,
        udens_at: max.n,
        ldens_estimate: min.value,
        ldens_at: min.n,
    }
}

/// Density of the exceedance set `{n : ‖T^n x‖ >= ε}` and the lower bound
/// `ε · ldens` it induces on `liminf A_n`.
#[derive(Debug, Clone)]
pub struct ExceedanceReport {
    pub eps: f64,
    pub density: DensityEstimate,
    pub liminf_lower_bound: f64,
}

pub fn exceedance_density(
    op: &ShiftOperator,
    x: &SupportedVector,
    space: SpaceTag,
    eps: f64,
    horizon: usize,
    window: usize,
) -> Result<ExceedanceReport> {
    if !(eps > 0.0) {
        return Err(Error::config(format!("eps must be positive, got {eps}")));
    }
    check_window(horizon, window)?;
    let norms = op.iterate_norms(x, space, horizon)?;
    let density = density(|n| norms.at(n as usize) >= eps, horizon, window)?;
    Ok(ExceedanceReport {
        eps,
        liminf_lower_bound: eps * density.ldens_estimate,
        density,
    })
}

/// Named integer sets for density experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum IntegerSet {
    All,
    Evens,
    Multiples(u64),
    /// `∪_{i>=0} [2^{2i}, 2^{2i+1})`.
    Blocky,
    Explicit(Vec<u64>),
}

impl IntegerSet {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            IntegerSet::All => n >= 1,
            IntegerSet::Evens => n % 2 == 0,
            IntegerSet::Multiples(k) => n % k == 0,
            IntegerSet::Blocky => n >= 1 && n.ilog2() % 2 == 0,
            IntegerSet::Explicit(list) => list.binary_search(&n).is_ok(),
        }
    }

    pub fn density(&self, horizon: usize, window: usize) -> Result<DensityEstimate> {
        match self {
            IntegerSet::Explicit(list) => density_of_sorted(list, horizon, window),
            _ => density(|n| self.contains(n), horizon, window),
        }
    }

    /// `all`, `evens`, `multiples:<k>`, `blocky`, or `list:<n1>,<n2>,...`.
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "all" => return Ok(IntegerSet::All),
            "evens" => return Ok(IntegerSet::Evens),
            "blocky" => return Ok(IntegerSet::Blocky),
            _ => {}
        }
        if let Some(k) = text.strip_prefix("multiples:") {
            let k: u64 = k
                .parse()
                .map_err(|_| Error::parse(format!("bad set '{text}'")))?;
            if k == 0 {
                return Err(Error::parse("multiples:0 is not a set of positive integers"));
            }
            return Ok(IntegerSet::Multiples(k));
        }
        if let Some(list) = text.strip_prefix("list:") {
            let mut items = list
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::parse(format!("bad set '{text}'")))?;
            items.sort_unstable();
            items.dedup();
            items.retain(|&n| n > 0);
            return Ok(IntegerSet::Explicit(items));
        }
        Err(Error::parse(format!("unknown set '{text}'")))
    }
}
