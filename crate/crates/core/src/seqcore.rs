//! Weight sequences and exact/log-domain products over index ranges.
//!
//! A [`WeightSpec`] describes a strictly positive weight sequence indexed
//! either by `{1, 2, ...}` (unilateral) or by all of `ℤ` (bilateral).
//! Products `∏_{j=lo}^{hi} w_j` are returned as [`DyadicLog`] values: when
//! every weight in the range is a power of two the product is carried as an
//! integer base-2 exponent with no rounding at all, otherwise as a
//! compensated floating-point `log2`.
//!
//! The block-dyadic weight (`paper_blocks`) is
//!
//! ```text
//! w_n = 2    if n > 0
//!       1/2  if a_i + 1 <= -n <= b_i
//!       2    if b_i + 1 <= -n <= c_i
//!       1    otherwise
//! a_i = 2^(2+i),  b_i = a_i + 2i - 1,  c_i = b_i + 2i
//! ```
//!
//! so `∏_{j=-b_i}^{0} w_j = 2^-i` and `∏_{j=-n}^{0} w_j = 2^i` on
//! `c_i <= n <= a_{i+1}`. Range products for this family are evaluated in
//! closed form in O(1); [`ProductCursor`] walks a range one weight at a time
//! and serves as the incremental path used by orbit iteration.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest block index the block-dyadic weight will resolve.
///
/// `c_40` is about `2^42`, far beyond any horizon a desk run reaches.
pub const BLOCK_INDEX_CAP: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Indices `1, 2, 3, ...`.
    Unilateral,
    /// Indices in `ℤ`.
    Bilateral,
}

impl Side {
    pub fn contains(self, j: i64) -> bool {
        match self {
            Side::Unilateral => j >= 1,
            Side::Bilateral => true,
        }
    }

    pub fn check(self, j: i64) -> Result<()> {
        if self.contains(j) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "index {j} is outside the {self} index domain"
            )))
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Unilateral => f.write_str("unilateral"),
            Side::Bilateral => f.write_str("bilateral"),
        }
    }
}

/// The family a weight sequence is drawn from.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Constant { lambda: f64 },
    /// `λ` times the unweighted backward shift on the unilateral space.
    Rolewicz { lambda: f64 },
    PaperBlocks,
    /// `w_k = ((k + 1) / k)^(1/p)`.
    RatioPower { p: f64 },
    Table { entries: BTreeMap<i64, f64>, default: f64 },
    /// Weights `2^e_j` given by their integer exponents.
    DyadicProfile { exponents: BTreeMap<i64, i64>, default: i64 },
}

/// A validated, immutable weight sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    kind: WeightKind,
    side: Side,
}

/// Exact power-of-two exponent of `x`, if `x` is a positive normal or
/// subnormal power of two.
pub fn exact_log2(x: f64) -> Option<i64> {
    if !(x > 0.0) || !x.is_finite() {
        return None;
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if biased == 0 {
        // subnormal: exactly one mantissa bit set
        if mantissa.count_ones() == 1 {
            Some(mantissa.trailing_zeros() as i64 - 1074)
        } else {
            None
        }
    } else if mantissa == 0 {
        Some(biased - 1023)
    } else {
        None
    }
}

/// `2^e` as an `f64`, saturating to `0` or `+∞` outside the representable range.
pub fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be a finite positive weight, got {x}"
        )))
    }
}

impl WeightSpec {
    pub fn constant(lambda: f64, side: Side) -> Result<Self> {
        check_positive("constant weight", lambda)?;
        Ok(Self {
            kind: WeightKind::Constant { lambda },
            side,
        })
    }

    /// Rolewicz weight `λ` on the unilateral space, `λ > 1`.
    ///
    /// Negative `λ` is rejected: `-λB` is isometrically conjugate to `λB`
    /// through `x_k ↦ (-1)^k x_k`, so every orbit-norm statistic is already
    /// covered by `|λ|`.
    pub fn rolewicz(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 1.0) {
            return Err(Error::domain(format!(
                "rolewicz weight must satisfy λ > 1 (use |λ| for negative λ), got {lambda}"
            )));
        }
        Ok(Self {
            kind: WeightKind::Rolewicz { lambda },
            side: Side::Unilateral,
        })
    }

    pub fn paper_blocks() -> Self {
        Self {
            kind: WeightKind::PaperBlocks,
            side: Side::Bilateral,
        }
    }

    pub fn ratio_power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::domain(format!(
                "ratio_power exponent must satisfy p > 1, got {p}"
            )));
        }
        Ok(Self {
            kind: WeightKind::RatioPower { p },
            side: Side::Unilateral,
        })
    }

    pub fn table(entries: BTreeMap<i64, f64>, default: f64, side: Side) -> Result<Self> {
        check_positive("table default", default)?;
        for (&j, &w) in &entries {
            side.check(j)?;
            check_positive(&format!("table entry {j}"), w)?;
        }
        Ok(Self {
            kind: WeightKind::Table { entries, default },
            side,
        })
    }

    pub fn dyadic_profile(
        exponents: BTreeMap<i64, i64>,
        default: i64,
        side: Side,
    ) -> Result<Self> {
        let fits = |e: i64| (-1022..=1023).contains(&e);
        if !fits(default) {
            return Err(Error::capacity(format!(
                "default dyadic exponent {default} does not fit a normal f64 weight"
            )));
        }
        for (&j, &e) in &exponents {
            side.check(j)?;
            if !fits(e) {
                return Err(Error::capacity(format!(
                    "dyadic exponent {e} at index {j} does not fit a normal f64 weight"
                )));
            }
        }
        Ok(Self {
            kind: WeightKind::DyadicProfile { exponents, default },
            side,
        })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Whether every weight of the sequence is a power of two.
    pub fn is_dyadic(&self) -> bool {
        match &self.kind {
            WeightKind::Constant { lambda } | WeightKind::Rolewicz { lambda } => {
                exact_log2(*lambda).is_some()
            }
            WeightKind::PaperBlocks | WeightKind::DyadicProfile { .. } => true,
            WeightKind::RatioPower { .. } => false,
            WeightKind::Table { entries, default } => {
                exact_log2(*default).is_some()
                    && entries.values().all(|&w| exact_log2(w).is_some())
            }
        }
    }

    /// The weight `w_j`.
    pub fn weight_at(&self, j: i64) -> Result<f64> {
        self.side.check(j)?;
        Ok(match &self.kind {
            WeightKind::Constant { lambda } | WeightKind::Rolewicz { lambda } => *lambda,
            WeightKind::PaperBlocks => pow2(block_weight_exponent(j)?),
            WeightKind::RatioPower { p } => {
                let k = j as f64;
                ((k + 1.0) / k).powf(1.0 / p)
            }
            WeightKind::Table { entries, default } => *entries.get(&j).unwrap_or(default),
            WeightKind::DyadicProfile { exponents, default } => {
                pow2(*exponents.get(&j).unwrap_or(default))
            }
        })
    }

    /// `log2 w_j`, exact when `w_j` is a power of two.
    pub fn weight_log2(&self, j: i64) -> Result<DyadicLog> {
        self.side.check(j)?;
        Ok(match &self.kind {
            WeightKind::PaperBlocks => DyadicLog::exact(block_weight_exponent(j)?),
            WeightKind::DyadicProfile { exponents, default } => {
                DyadicLog::exact(*exponents.get(&j).unwrap_or(default))
            }
            _ => DyadicLog::from_value(self.weight_at(j)?),
        })
    }

    /// `∏_{j=lo}^{hi} w_j`. The empty range `lo = hi + 1` gives `1`.
    pub fn product_range(&self, lo: i64, hi: i64) -> Result<DyadicLog> {
        if lo == hi.wrapping_add(1) && hi != i64::MAX {
            return Ok(DyadicLog::one());
        }
        if lo > hi {
            return Err(Error::domain(format!("empty product range [{lo}, {hi}]")));
        }
        self.side.check(lo)?;
        let count = (hi as i128 - lo as i128 + 1) as i64;
        match &self.kind {
            WeightKind::Constant { lambda } | WeightKind::Rolewicz { lambda } => {
                match exact_log2(*lambda) {
                    Some(e) => e
                        .checked_mul(count)
                        .map(DyadicLog::exact)
                        .ok_or_else(|| exponent_overflow(lo, hi)),
                    None => Ok(DyadicLog::inexact(count as f64 * lambda.log2())),
                }
            }
            WeightKind::PaperBlocks => {
                let upper = blocks_cumulative(hi)?;
                let lower = blocks_cumulative(lo - 1)?;
                Ok(DyadicLog::exact(upper - lower))
            }
            WeightKind::RatioPower { p } => {
                // telescoping: ∏ (k+1)/k over [lo, hi] = (hi + 1) / lo
                let ratio = count as f64 / lo as f64;
                Ok(DyadicLog::inexact(ratio.ln_1p() / std::f64::consts::LN_2 / p))
            }
            WeightKind::Table { entries, default } => {
                let listed: Vec<f64> = entries.range(lo..=hi).map(|(_, &w)| w).collect();
                let defaults = count - listed.len() as i64;
                let mut acc = LogAccumulator::default();
                acc.add_repeated(DyadicLog::from_value(*default), defaults)?;
                for w in listed {
                    acc.add(DyadicLog::from_value(w))?;
                }
                Ok(acc.value())
            }
            WeightKind::DyadicProfile { exponents, default } => {
                let listed: Vec<i64> = exponents.range(lo..=hi).map(|(_, &e)| e).collect();
                let defaults = count - listed.len() as i64;
                let mut total = default
                    .checked_mul(defaults)
                    .ok_or_else(|| exponent_overflow(lo, hi))?;
                for e in listed {
                    total = total
                        .checked_add(e)
                        .ok_or_else(|| exponent_overflow(lo, hi))?;
                }
                Ok(DyadicLog::exact(total))
            }
        }
    }

    /// Cursor over the empty range just left of `start`, i.e. `[start, start - 1]`.
    pub fn cursor_at(&self, start: i64) -> ProductCursor<'_> {
        ProductCursor {
            spec: self,
            lo: start,
            hi: start - 1,
            acc: LogAccumulator::default(),
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            WeightKind::Constant { lambda } => format!("constant:{lambda}:{}", self.side),
            WeightKind::Rolewicz { lambda } => format!("rolewicz:{lambda}"),
            WeightKind::PaperBlocks => "paper-blocks".to_string(),
            WeightKind::RatioPower { p } => format!("ratio-power:{p}"),
            WeightKind::Table { entries, .. } => {
                format!("table({} entries):{}", entries.len(), self.side)
            }
            WeightKind::DyadicProfile { exponents, .. } => {
                format!("dyadic-profile({} entries):{}", exponents.len(), self.side)
            }
        }
    }
}

fn exponent_overflow(lo: i64, hi: i64) -> Error {
    Error::capacity(format!("exact exponent overflow over [{lo}, {hi}]"))
}

/// The `(a_i, b_i, c_i)` bounds of block `i` of the block-dyadic weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockBounds {
    pub i: u32,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

pub fn block_bounds(i: u32) -> Result<BlockBounds> {
    if i == 0 {
        return Err(Error::domain("block index must be >= 1"));
    }
    if i > BLOCK_INDEX_CAP {
        return Err(Error::capacity(format!(
            "block index {i} exceeds the cap {BLOCK_INDEX_CAP}"
        )));
    }
    let a = 1i64 << (2 + i);
    let b = a + 2 * i as i64 - 1;
    let c = b + 2 * i as i64;
    Ok(BlockBounds { i, a, b, c })
}

/// The block `i` with `a_i < m <= a_{i+1}`, if `m > a_1`.
fn block_containing(m: i64) -> Option<u32> {
    if m <= 8 {
        return None;
    }
    Some((63 - (m - 1).leading_zeros()) - 2)
}

fn block_weight_exponent(j: i64) -> Result<i64> {
    if j > 0 {
        return Ok(1);
    }
    let m = j.unsigned_abs() as i64;
    let Some(i) = block_containing(m) else {
        return Ok(0);
    };
    let bb = block_bounds(i)?;
    Ok(if m <= bb.b {
        -1
    } else if m <= bb.c {
        1
    } else {
        0
    })
}

/// `Σ_{j=-m}^{0} log2 w_j` for the block-dyadic weight, `m >= 0`.
fn blocks_tail_exponent(m: i64) -> Result<i64> {
    let Some(i) = block_containing(m) else {
        return Ok(0);
    };
    let bb = block_bounds(i)?;
    let i = i as i64;
    // every completed block contributes -(2i - 1) + 2i = +1
    let completed = i - 1;
    Ok(if m <= bb.b {
        completed - (m - bb.a)
    } else if m <= bb.c {
        completed - (2 * i - 1) + (m - bb.b)
    } else {
        i
    })
}

/// Cumulative exponent `E` with `E(hi) - E(lo - 1) = Σ_{j=lo}^{hi} log2 w_j`.
fn blocks_cumulative(j: i64) -> Result<i64> {
    if j >= 0 {
        Ok(j)
    } else {
        Ok(-blocks_tail_exponent(-j - 1)?)
    }
}

/// A base-2 logarithm that is an exact integer whenever possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicLog {
    /// `2^exponent` is the represented value when `exact`; otherwise the
    /// floor of `float_log2`, kept for display only.
    pub exponent: i64,
    pub exact: bool,
    pub float_log2: f64,
}

impl DyadicLog {
    pub fn exact(exponent: i64) -> Self {
        Self {
            exponent,
            exact: true,
            float_log2: exponent as f64,
        }
    }

    pub fn inexact(log2: f64) -> Self {
        Self {
            exponent: if log2.is_finite() { log2.floor() as i64 } else { 0 },
            exact: false,
            float_log2: log2,
        }
    }

    pub fn one() -> Self {
        Self::exact(0)
    }

    /// Log of a positive value, exact when the value is a power of two.
    pub fn from_value(x: f64) -> Self {
        match exact_log2(x) {
            Some(e) => Self::exact(e),
            None => Self::inexact(x.log2()),
        }
    }

    pub fn log2(&self) -> f64 {
        self.float_log2
    }

    pub fn value(&self) -> f64 {
        if self.exact {
            pow2(self.exponent)
        } else {
            self.float_log2.exp2()
        }
    }

    /// Product of two values; exponents add exactly when both are exact.
    pub fn checked_mul(self, other: Self) -> Result<Self> {
        if self.exact && other.exact {
            self.exponent
                .checked_add(other.exponent)
                .map(Self::exact)
                .ok_or_else(|| Error::capacity("exact exponent overflow"))
        } else {
            Ok(Self::inexact(self.float_log2 + other.float_log2))
        }
    }
}

impl fmt::Display for DyadicLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "2^{}", self.exponent)
        } else {
            write!(f, "2^{:.6}", self.float_log2)
        }
    }
}

/// Running `log2` of a product: integer while every factor is a power of
/// two, Neumaier-compensated float afterwards.
#[derive(Debug, Clone, Default)]
struct LogAccumulator {
    exact: i64,
    inexact: Option<(f64, f64)>,
}

impl LogAccumulator {
    fn add(&mut self, x: DyadicLog) -> Result<()> {
        self.add_repeated(x, 1)
    }

    fn add_repeated(&mut self, x: DyadicLog, times: i64) -> Result<()> {
        if times == 0 {
            return Ok(());
        }
        if x.exact {
            let step = x
                .exponent
                .checked_mul(times)
                .ok_or_else(|| Error::capacity("exact exponent overflow"))?;
            self.exact = self
                .exact
                .checked_add(step)
                .ok_or_else(|| Error::capacity("exact exponent overflow"))?;
        } else {
            let (sum, comp) = self.inexact.get_or_insert((0.0, 0.0));
            let term = x.float_log2 * times as f64;
            let t = *sum + term;
            if sum.abs() >= term.abs() {
                *comp += (*sum - t) + term;
            } else {
                *comp += (term - t) + *sum;
            }
            *sum = t;
        }
        Ok(())
    }

    fn value(&self) -> DyadicLog {
        match self.inexact {
            None => DyadicLog::exact(self.exact),
            Some((sum, comp)) => DyadicLog::inexact(self.exact as f64 + (sum + comp)),
        }
    }
}

/// Incrementally maintained `∏_{j=lo}^{hi} w_j`.
///
/// Each extension reads exactly one new weight, so walking a range of
/// length `n` costs `O(n)` in total.
#[derive(Debug, Clone)]
pub struct ProductCursor<'a> {
    spec: &'a WeightSpec,
    lo: i64,
    hi: i64,
    acc: LogAccumulator,
}

impl ProductCursor<'_> {
    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    /// Include `w_{lo - 1}`.
    pub fn extend_left(&mut self) -> Result<DyadicLog> {
        let j = self
            .lo
            .checked_sub(1)
            .ok_or_else(|| Error::capacity("index underflow"))?;
        self.acc.add(self.spec.weight_log2(j)?)?;
        self.lo = j;
        Ok(self.acc.value())
    }

    /// Include `w_{hi + 1}`.
    pub fn extend_right(&mut self) -> Result<DyadicLog> {
        let j = self
            .hi
            .checked_add(1)
            .ok_or_else(|| Error::capacity("index overflow"))?;
        self.acc.add(self.spec.weight_log2(j)?)?;
        self.hi = j;
        Ok(self.acc.value())
    }

    pub fn value(&self) -> DyadicLog {
        self.acc.value()
    }
}

/// Textual weight-spec file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpecFile {
    PaperBlocks,
    Rolewicz {
        lambda: f64,
    },
    Constant {
        lambda: f64,
        #[serde(default = "default_side")]
        side: Side,
    },
    RatioPower {
        p: f64,
    },
    Table {
        #[serde(with = "index_keys")]
        entries: BTreeMap<i64, f64>,
        default: f64,
        #[serde(default = "default_side")]
        side: Side,
    },
    ProductProfileDyadic {
        #[serde(with = "index_keys")]
        exponents: BTreeMap<i64, i64>,
        #[serde(default)]
        default: i64,
        #[serde(default = "default_side")]
        side: Side,
    },
}

/// Integer-keyed maps written with string keys, as JSON requires.
mod index_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<V: Serialize, S: Serializer>(
        map: &BTreeMap<i64, V>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, V: Deserialize<'de>, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<i64, V>, D::Error> {
        let raw = BTreeMap::<String, V>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<i64>()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("index key {k:?} is not an integer")))
            })
            .collect()
    }
}

fn default_side() -> Side {
    Side::Unilateral
}

impl WeightSpecFile {
    pub fn into_spec(self) -> Result<WeightSpec> {
        match self {
            WeightSpecFile::PaperBlocks => Ok(WeightSpec::paper_blocks()),
            WeightSpecFile::Rolewicz { lambda } => WeightSpec::rolewicz(lambda),
            WeightSpecFile::Constant { lambda, side } => WeightSpec::constant(lambda, side),
            WeightSpecFile::RatioPower { p } => WeightSpec::ratio_power(p),
            WeightSpecFile::Table {
                entries,
                default,
                side,
            } => WeightSpec::table(entries, default, side),
            WeightSpecFile::ProductProfileDyadic {
                exponents,
                default,
                side,
            } => WeightSpec::dyadic_profile(exponents, default, side),
        }
    }
}

impl WeightSpec {
    /// Parse the JSON weight-spec format. Unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: WeightSpecFile =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("weight spec: {e}")))?;
        file.into_spec()
    }

    pub fn to_file(&self) -> WeightSpecFile {
        match &self.kind {
            WeightKind::PaperBlocks => WeightSpecFile::PaperBlocks,
            WeightKind::Rolewicz { lambda } => WeightSpecFile::Rolewicz { lambda: *lambda },
            WeightKind::Constant { lambda } => WeightSpecFile::Constant {
                lambda: *lambda,
                side: self.side,
            },
            WeightKind::RatioPower { p } => WeightSpecFile::RatioPower { p: *p },
            WeightKind::Table { entries, default } => WeightSpecFile::Table {
                entries: entries.clone(),
                default: *default,
                side: self.side,
            },
            WeightKind::DyadicProfile { exponents, default } => {
                WeightSpecFile::ProductProfileDyadic {
                    exponents: exponents.clone(),
                    default: *default,
                    side: self.side,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks() -> WeightSpec {
        WeightSpec::paper_blocks()
    }

    /// Weight straight from the case table, scanning blocks linearly.
    fn table_weight(j: i64) -> f64 {
        if j > 0 {
            return 2.0;
        }
        let m = -j;
        for i in 1..=30u32 {
            let a = 1i64 << (2 + i);
            let b = a + 2 * i as i64 - 1;
            let c = b + 2 * i as i64;
            if a + 1 <= m && m <= b {
                return 0.5;
            }
            if b + 1 <= m && m <= c {
                return 2.0;
            }
        }
        1.0
    }

    #[test]
    fn block_weights_match_case_table() {
        assert_eq!(blocks().weight_at(5).unwrap(), 2.0);
        assert_eq!(blocks().weight_at(-9).unwrap(), 0.5);
        assert_eq!(blocks().weight_at(-12).unwrap(), 1.0);
        assert_eq!(blocks().weight_at(0).unwrap(), 1.0);
        for j in -5000..=50 {
            assert_eq!(blocks().weight_at(j).unwrap(), table_weight(j), "j = {j}");
        }
    }

    #[test]
    fn rolewicz_weight_is_constant() {
        let r = WeightSpec::rolewicz(2.0).unwrap();
        assert_eq!(r.weight_at(7).unwrap(), 2.0);
        assert!(matches!(r.weight_at(0), Err(Error::Domain(_))));
    }

    #[test]
    fn block_bounds_values() {
        let got: Vec<_> = (1..=3)
            .map(|i| {
                let b = block_bounds(i).unwrap();
                (b.a, b.b, b.c)
            })
            .collect();
        assert_eq!(got, vec![(8, 9, 11), (16, 19, 23), (32, 37, 43)]);
        assert!(matches!(block_bounds(0), Err(Error::Domain(_))));
        assert!(matches!(block_bounds(41), Err(Error::Capacity(_))));
        for i in 1..BLOCK_INDEX_CAP {
            let cur = block_bounds(i).unwrap();
            let next = block_bounds(i + 1).unwrap();
            assert!(cur.c <= next.a);
        }
    }

    #[test]
    fn product_examples() {
        let b = blocks();
        assert_eq!(b.product_range(-9, 0).unwrap(), DyadicLog::exact(-1));
        assert_eq!(b.product_range(-16, 0).unwrap(), DyadicLog::exact(1));
        assert_eq!(b.product_range(-23, 0).unwrap(), DyadicLog::exact(2));
        assert_eq!(b.product_range(4, 3).unwrap(), DyadicLog::one());
        let r = WeightSpec::ratio_power(2.0).unwrap();
        assert_eq!(r.product_range(10, 9).unwrap().value(), 1.0);
        assert!(b.product_range(4, 2).is_err());
    }

    #[test]
    fn closed_form_matches_cursor_walk() {
        let specs = vec![
            blocks(),
            WeightSpec::rolewicz(2.0).unwrap(),
            WeightSpec::constant(3.0, Side::Bilateral).unwrap(),
            WeightSpec::ratio_power(2.0).unwrap(),
            WeightSpec::table(
                [(-3, 0.5), (2, 4.0), (5, 0.3)].into_iter().collect(),
                1.0,
                Side::Bilateral,
            )
            .unwrap(),
        ];
        for spec in &specs {
            let start = if spec.side() == Side::Bilateral { -300 } else { 1 };
            let mut cur = spec.cursor_at(start);
            for hi in start..start + 600 {
                let walked = cur.extend_right().unwrap();
                let closed = spec.product_range(start, hi).unwrap();
                assert_eq!(walked.exact, closed.exact, "{}", spec.describe());
                if closed.exact {
                    assert_eq!(walked.exponent, closed.exponent);
                } else {
                    let rel = (walked.value() / closed.value() - 1.0).abs();
                    assert!(rel <= 1e-12, "{} hi={hi} rel={rel}", spec.describe());
                }
            }
        }
    }

    #[test]
    fn exact_log2_detects_powers() {
        assert_eq!(exact_log2(1.0), Some(0));
        assert_eq!(exact_log2(0.5), Some(-1));
        assert_eq!(exact_log2(3.0), None);
        assert_eq!(exact_log2(f64::from_bits(1)), Some(-1074));
        assert_eq!(exact_log2(0.0), None);
        for e in [-1074, -1030, -1022, -5, 0, 7, 1023] {
            assert_eq!(exact_log2(pow2(e)), Some(e));
        }
    }

    #[test]
    fn spec_file_formats() {
        assert_eq!(
            WeightSpec::from_json(r#"{"kind": "paper_blocks"}"#).unwrap(),
            blocks()
        );
        let r = WeightSpec::from_json(r#"{"kind": "rolewicz", "lambda": 2.0}"#).unwrap();
        assert_eq!(r.side(), Side::Unilateral);
        let c = WeightSpec::from_json(r#"{"kind": "constant", "lambda": 1.0, "side": "bilateral"}"#)
            .unwrap();
        assert_eq!(c.side(), Side::Bilateral);
        let t = WeightSpec::from_json(
            r#"{"kind": "table", "entries": {"-3": 0.5, "4": 2.0}, "default": 1.0, "side": "bilateral"}"#,
        )
        .unwrap();
        assert_eq!(t.weight_at(-3).unwrap(), 0.5);
        assert_eq!(t.weight_at(0).unwrap(), 1.0);
        assert!(t.is_dyadic());
        assert!(WeightSpec::from_json(r#"{"kind": "ratio_power", "p": 2.0, "q": 1}"#).is_err());
        assert!(WeightSpec::from_json(r#"{"kind": "ratio_power", "p": 1.0}"#).is_err());
        assert!(WeightSpec::from_json(r#"{"kind": "rolewicz", "lambda": -2.0}"#).is_err());
        assert!(WeightSpec::from_json(
            r#"{"kind": "table", "entries": {"-3": 0.5}, "default": 1.0}"#
        )
        .is_err());
        let back = serde_json::to_string(&t.to_file()).unwrap();
        assert_eq!(WeightSpec::from_json(&back).unwrap(), t);
    }
}
