//! Finitely supported real sequences over `ℕ` or `ℤ`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::Side;

/// Norm of the ambient sequence space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceTag {
    Lp(f64),
    C0,
}

impl SpaceTag {
    pub fn lp(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(SpaceTag::Lp(p))
        } else {
            Err(Error::domain(format!("lp space needs p >= 1, got {p}")))
        }
    }

    pub fn l2() -> Self {
        SpaceTag::Lp(2.0)
    }
}

impl Default for SpaceTag {
    fn default() -> Self {
        SpaceTag::l2()
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTag::Lp(p) if *p == 1.0 => f.write_str("l1"),
            SpaceTag::Lp(p) if *p == 2.0 => f.write_str("l2"),
            SpaceTag::Lp(p) => write!(f, "lp:{p}"),
            SpaceTag::C0 => f.write_str("c0"),
        }
    }
}

impl FromStr for SpaceTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(SpaceTag::Lp(1.0)),
            "l2" => Ok(SpaceTag::Lp(2.0)),
            "c0" => Ok(SpaceTag::C0),
            _ => {
                let p = s
                    .strip_prefix("lp:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| Error::parse(format!("unknown space '{s}'")))?;
                SpaceTag::lp(p)
            }
        }
    }
}

/// Finitely supported coefficient map. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportedVector {
    entries: BTreeMap<i64, f64>,
    side: Side,
}

impl SupportedVector {
    pub fn zero(side: Side) -> Self {
        Self {
            entries: BTreeMap::new(),
            side,
        }
    }

    pub fn basis(j: i64, side: Side) -> Result<Self> {
        Self::from_entries([(j, 1.0)], side)
    }

    pub fn from_entries(
        entries: impl IntoIterator<Item = (i64, f64)>,
        side: Side,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (j, x) in entries {
            side.check(j)?;
            if !x.is_finite() {
                return Err(Error::domain(format!("coefficient at {j} is not finite")));
            }
            if x != 0.0 {
                map.insert(j, x);
            }
        }
        Ok(Self { entries: map, side })
    }

    /// Build from `(index, coefficient)` pairs that are already valid for
    /// `side`, dropping zeros.
    pub(crate) fn from_valid(entries: impl IntoIterator<Item = (i64, f64)>, side: Side) -> Self {
        Self {
            entries: entries.into_iter().filter(|&(_, x)| x != 0.0).collect(),
            side,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, j: i64) -> f64 {
        self.entries.get(&j).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().map(|(&j, &x)| (j, x))
    }

    pub fn min_index(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    pub fn norm(&self, space: SpaceTag) -> f64 {
        norm_of(self.entries.values().copied(), space)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self::from_valid(self.iter().map(|(j, x)| (j, alpha * x)), self.side)
    }

    /// `αv + βw` with zero entries pruned.
    pub fn combine(&self, other: &Self, alpha: f64, beta: f64) -> Result<Self> {
        if self.side != other.side {
            return Err(Error::domain(format!(
                "cannot combine a {} vector with a {} vector",
                self.side, other.side
            )));
        }
        let mut out = BTreeMap::new();
        for (j, x) in self.iter() {
            out.insert(j, alpha * x);
        }
        for (j, y) in other.iter() {
            *out.entry(j).or_insert(0.0) += beta * y;
        }
        Ok(Self::from_valid(out, self.side))
    }

    /// Parse a CLI designation: `e<j>`, `zero`, inline JSON, or `@path`.
    pub fn parse_designation(text: &str, side: Side) -> Result<Self> {
        let text = text.trim();
        if text == "zero" || text == "0" {
            return Ok(Self::zero(side));
        }
        if let Some(j) = text.strip_prefix('e') {
            let j: i64 = j
                .parse()
                .map_err(|_| Error::parse(format!("bad basis vector '{text}'")))?;
            return Self::basis(j, side);
        }
        if let Some(path) = text.strip_prefix('@') {
            let body = std::fs::read_to_string(path)
                .map_err(|e| Error::parse(format!("cannot read vector file {path}: {e}")))?;
            return Self::from_json(&body);
        }
        if text.starts_with('{') {
            return Self::from_json(text);
        }
        Err(Error::parse(format!("unknown vector designation '{text}'")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: VectorFile =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("vector: {e}")))?;
        Self::from_entries(file.entries, file.side)
    }

    pub fn to_json(&self) -> String {
        let file = VectorFile {
            side: self.side,
            entries: self.entries.clone(),
        };
        serde_json::to_string(&file).expect("vector serializes")
    }

    /// Short label: `e3`, `-2·e0`, or the JSON form for longer supports.
    pub fn label(&self) -> String {
        match self.entries.len() {
            0 => "zero".to_string(),
            1 => {
                let (j, x) = self.iter().next().unwrap();
                if x == 1.0 {
                    format!("e{j}")
                } else {
                    format!("{x:?}*e{j}")
                }
            }
            _ => self.to_json(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorFile {
    side: Side,
    entries: BTreeMap<i64, f64>,
}

/// `ℓ^p` or sup norm of a coefficient list, scaled by the largest modulus
/// so that large or tiny coefficients neither overflow nor underflow.
pub fn norm_of(coeffs: impl Iterator<Item = f64> + Clone, space: SpaceTag) -> f64 {
    let max = coeffs.clone().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 || !max.is_finite() {
        return max;
    }
    match space {
        SpaceTag::C0 => max,
        SpaceTag::Lp(p) if p == 1.0 => coeffs.map(f64::abs).sum(),
        SpaceTag::Lp(p) if p == 2.0 => {
            let s: f64 = coeffs.map(|x| (x / max) * (x / max)).sum();
            max * s.sqrt()
        }
        SpaceTag::Lp(p) => {
            let s: f64 = coeffs.map(|x| (x.abs() / max).powf(p)).sum();
            max * s.powf(1.0 / p)
        }
    }
}

/// Radial profile multiplying the Gaussian coefficients of a sampled vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// Factor `ρ^|k|`, `0 < ρ < 1`.
    Geometric(f64),
    Flat,
}

impl Envelope {
    pub fn factor(&self, k: i64) -> f64 {
        match self {
            Envelope::Geometric(rho) => rho.powi(k.unsigned_abs().min(i32::MAX as u64) as i32),
            Envelope::Flat => 1.0,
        }
    }
}

/// Seeded random vector with support in `[-K, K]` (bilateral) or `[1, K]`.
pub fn sample_vector(seed: u64, side: Side, radius: i64, envelope: Envelope) -> Result<SupportedVector> {
    if radius < 1 {
        return Err(Error::domain(format!("support radius must be >= 1, got {radius}")));
    }
    if let Envelope::Geometric(rho) = envelope {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::domain(format!("geometric envelope needs 0 < ρ < 1, got {rho}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = match side {
        Side::Unilateral => 1,
        Side::Bilateral => -radius,
    };
    let entries: Vec<(i64, f64)> = (lo..=radius)
        .map(|k| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (k, z * envelope.factor(k))
        })
        .collect();
    Ok(SupportedVector::from_valid(entries, side))
}
