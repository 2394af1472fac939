//! Weighted backward shifts `B_w e_j = w_j e_{j-1}`.
//!
//! On the unilateral space `B_w e_1 = 0`. The right inverse
//! `S e_k = e_{k+1} / w_{k+1}` is a formal map on finitely supported
//! vectors; no boundedness is claimed for it.

use std::fmt;

use crate::error::{Error, Result};
use crate::seqcore::{exact_log2, pow2, Side, WeightSpec};
use crate::vectors::{norm_of, SpaceTag, SupportedVector};

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    weights: WeightSpec,
}

impl ShiftOperator {
    pub fn new(weights: WeightSpec) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &WeightSpec {
        &self.weights
    }

    pub fn side(&self) -> Side {
        self.weights.side()
    }

    pub fn right_inverse(&self) -> RightInverse<'_> {
        RightInverse { of: self }
    }

    fn check_side(&self, v: &SupportedVector) -> Result<()> {
        if v.side() == self.side() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "vector is {} but operator acts on {} sequences",
                v.side(),
                self.side()
            )))
        }
    }

    /// `(Tv)_k = w_{k+1} v_{k+1}`.
    pub fn apply(&self, v: &SupportedVector) -> Result<SupportedVector> {
        self.check_side(v)?;
        let mut out = Vec::with_capacity(v.support_len());
        for (j, x) in v.iter() {
            if self.side() == Side::Unilateral && j == 1 {
                continue;
            }
            let target = j
                .checked_sub(1)
                .ok_or_else(|| Error::capacity("shift moved support below i64::MIN"))?;
            out.push((target, self.weights.weight_at(j)? * x));
        }
        Ok(SupportedVector::from_valid(out, self.side()))
    }

    pub fn apply_power(&self, v: &SupportedVector, power: u64) -> Result<SupportedVector> {
        let mut cur = v.clone();
        for _ in 0..power {
            if cur.is_zero() {
                break;
            }
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// `‖T^i v‖` for `i = 1..=horizon`.
    ///
    /// A single-entry vector `α e_j` uses `‖T^i e_j‖ = ∏_{m=j-i+1}^{j} w_m`
    /// through an incremental product cursor, exact for dyadic weights.
    /// Anything else is pushed through the shift step by step.
    pub fn iterate_norms(
        &self,
        v: &SupportedVector,
        space: SpaceTag,
        horizon: usize,
    ) -> Result<OrbitNorms> {
        if horizon == 0 {
            return Err(Error::config("horizon must be >= 1"));
        }
        self.check_side(v)?;
        if v.support_len() == 1 {
            let (j, x) = v.iter().next().unwrap();
            self.basis_norms(j, x.abs(), horizon)
        } else {
            self.stepped_norms(v, space, horizon)
        }
    }

    fn basis_norms(&self, j: i64, scale: f64, horizon: usize) -> Result<OrbitNorms> {
        let scale_exp = exact_log2(scale);
        let mut norms = Vec::with_capacity(horizon);
        let mut exponents = scale_exp.map(|_| Vec::with_capacity(horizon));
        let mut cursor = self.weights.cursor_at(j + 1);
        for i in 1..=horizon {
            // T^i e_j lives at j - i and carries the product over [j - i + 1, j]
            let alive = self.side().contains(j - i as i64);
            if !alive {
                norms.push(0.0);
                if let Some(ex) = exponents.as_mut() {
                    ex.push(None);
                }
                continue;
            }
            let product = cursor
                .extend_left()
                .map_err(|e| step_error(e, i))?;
            let norm = match (scale_exp, product.exact) {
                (Some(s), true) => {
                    let e = s
                        .checked_add(product.exponent)
                        .ok_or_else(|| step_error(Error::capacity("exponent overflow"), i))?;
                    if let Some(ex) = exponents.as_mut() {
                        ex.push(Some(e));
                    }
                    pow2(e)
                }
                _ => {
                    exponents = None;
                    scale * product.value()
                }
            };
            if !norm.is_finite() || (norm == 0.0 && scale > 0.0) {
                return Err(step_error(
                    Error::capacity(format!("orbit norm {product} leaves the f64 range")),
                    i,
                ));
            }
            norms.push(norm);
        }
        Ok(OrbitNorms { norms, exponents })
    }

    fn stepped_norms(
        &self,
        v: &SupportedVector,
        space: SpaceTag,
        horizon: usize,
    ) -> Result<OrbitNorms> {
        let mut cur: Vec<(i64, f64)> = v.iter().collect();
        let mut norms = Vec::with_capacity(horizon);
        for i in 1..=horizon {
            if !cur.is_empty() {
                let mut next = Vec::with_capacity(cur.len());
                for &(j, x) in &cur {
                    if self.side() == Side::Unilateral && j == 1 {
                        continue;
                    }
                    let y = self.weights.weight_at(j).map_err(|e| step_error(e, i))? * x;
                    if y != 0.0 {
                        next.push((j - 1, y));
                    }
                }
                cur = next;
            }
            let norm = norm_of(cur.iter().map(|&(_, x)| x), space);
            if !norm.is_finite() {
                return Err(step_error(
                    Error::capacity("orbit norm leaves the f64 range"),
                    i,
                ));
            }
            norms.push(norm);
        }
        Ok(OrbitNorms {
            norms,
            exponents: None,
        })
    }

    /// Dense-matrix oracle: `T^power v` on the truncation window `[-K, K]`
    /// (bilateral) or `[1, K]` (unilateral).
    pub fn truncated_matrix_apply_power(
        &self,
        v: &SupportedVector,
        power: u64,
        radius: i64,
    ) -> Result<SupportedVector> {
        self.check_side(v)?;
        if radius < 1 {
            return Err(Error::domain("truncation radius must be >= 1"));
        }
        let lo = match self.side() {
            Side::Bilateral => -radius,
            Side::Unilateral => 1,
        };
        let dim = (radius - lo + 1) as usize;
        let pos = |j: i64| (j - lo) as usize;
        if let (Some(min), Some(max)) = (v.min_index(), v.max_index()) {
            if min < lo || max > radius {
                return Err(Error::Truncation(format!(
                    "support [{min}, {max}] escapes window [{lo}, {radius}]"
                )));
            }
        }

        // column j holds the image of e_j: w_j at row j - 1
        let mut matrix = vec![0.0; dim * dim];
        for j in lo + 1..=radius {
            matrix[pos(j - 1) * dim + pos(j)] = self.weights.weight_at(j)?;
        }

        let mut x = vec![0.0; dim];
        for (j, c) in v.iter() {
            x[pos(j)] = c;
        }
        for step in 1..=power {
            if self.side() == Side::Bilateral && x[0] != 0.0 {
                return Err(Error::Truncation(format!(
                    "step {step} pushes mass below index {lo}; enlarge the window"
                )));
            }
            x = (0..dim)
                .map(|r| {
                    matrix[r * dim..(r + 1) * dim]
                        .iter()
                        .zip(&x)
                        .map(|(m, c)| m * c)
                        .sum()
                })
                .collect();
        }
        Ok(SupportedVector::from_valid(
            x.into_iter().enumerate().map(|(k, c)| (lo + k as i64, c)),
            self.side(),
        ))
    }

    /// Parse `paper-blocks`, `rolewicz:<λ>`, `ratio-power:<p>`,
    /// `constant:<λ>[:<side>]` or `@<weight-spec file>`.
    pub fn parse_designation(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(path) = text.strip_prefix('@') {
            let body = std::fs::read_to_string(path)
                .map_err(|e| Error::parse(format!("cannot read weight spec {path}: {e}")))?;
            return WeightSpec::from_json(&body).map(Self::new);
        }
        let mut parts = text.split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let number = |k: usize| -> Result<f64> {
            args.get(k)
                .ok_or_else(|| Error::parse(format!("'{text}' is missing a parameter")))?
                .parse::<f64>()
                .map_err(|_| Error::parse(format!("bad number in '{text}'")))
        };
        let arity = |n: usize| -> Result<()> {
            if args.len() > n {
                Err(Error::parse(format!("too many parameters in '{text}'")))
            } else {
                Ok(())
            }
        };
        let spec = match name {
            "paper-blocks" => {
                arity(0)?;
                WeightSpec::paper_blocks()
            }
            "rolewicz" => {
                arity(1)?;
                WeightSpec::rolewicz(number(0)?)?
            }
            "ratio-power" => {
                arity(1)?;
                WeightSpec::ratio_power(number(0)?)?
            }
            "constant" => {
                arity(2)?;
                let side = match args.get(1).copied() {
                    None | Some("unilateral") => Side::Unilateral,
                    Some("bilateral") => Side::Bilateral,
                    Some(other) => return Err(Error::parse(format!("unknown side '{other}'"))),
                };
                WeightSpec::constant(number(0)?, side)?
            }
            _ => return Err(Error::parse(format!("unknown operator '{text}'"))),
        };
        Ok(Self::new(spec))
    }
}

impl fmt::Display for ShiftOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.weights.describe())
    }
}

fn step_error(e: Error, step: usize) -> Error {
    match e {
        Error::Capacity(msg) => Error::Capacity(format!("step {step}: {msg}")),
        other => other,
    }
}

/// Norms `‖T^i v‖`, `i = 1..=N`. `exponents` is present when every nonzero
/// norm is an exactly tracked power of two (`None` entries are zero norms).
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitNorms {
    pub norms: Vec<f64>,
    pub exponents: Option<Vec<Option<i64>>>,
}

impl OrbitNorms {
    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// `‖T^i v‖`, 1-based.
    pub fn at(&self, i: usize) -> f64 {
        self.norms[i - 1]
    }
}

/// Formal right inverse `S e_k = e_{k+1} / w_{k+1}` of a shift.
#[derive(Debug, Clone, Copy)]
pub struct RightInverse<'a> {
    of: &'a ShiftOperator,
}

impl RightInverse<'_> {
    /// `Sv`, with coefficients chosen so that `apply(T, Sv) == v` holds
    /// bit for bit in floating point.
    pub fn apply(&self, v: &SupportedVector) -> Result<SupportedVector> {
        self.of.check_side(v)?;
        let mut out = Vec::with_capacity(v.support_len());
        for (k, x) in v.iter() {
            let target = k
                .checked_add(1)
                .ok_or_else(|| Error::capacity("shift moved support above i64::MAX"))?;
            let w = self.of.weights.weight_at(target)?;
            out.push((target, exact_preimage(w, x)));
        }
        Ok(SupportedVector::from_valid(out, self.of.side()))
    }

    pub fn apply_power(&self, v: &SupportedVector, power: u64) -> Result<SupportedVector> {
        let mut cur = v.clone();
        for _ in 0..power {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }
}

/// The `c` nearest `x / w` with `w * c == x` in floating point, when one
/// exists within a couple of ulps; otherwise the rounded quotient.
fn exact_preimage(w: f64, x: f64) -> f64 {
    let q = x / w;
    if w * q == x {
        return q;
    }
    let mut up = q;
    let mut down = q;
    for _ in 0..4 {
        up = up.next_up();
        down = down.next_down();
        if w * up == x {
            return up;
        }
        if w * down == x {
            return down;
        }
    }
    q
}
