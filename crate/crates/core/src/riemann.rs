//! The eight Riemann-type fractional operators (kernel sums) plus the four
//! single-sum alternative difference forms.
//!
//! Sums of order α > 0 weigh samples with factorial-function kernels and the
//! 1/Γ(α) prefactor:
//!
//! ```text
//! delta-left   Δ_a^{−α} f(t) = 1/Γ(α) Σ_{s=a}^{t−α}   (t−σ(s))^(α−1)      f(s),  t ∈ N_{a+α}
//! delta-right  bΔ^{−α}  f(t) = 1/Γ(α) Σ_{s=t+α}^{b}   (ρ(s)−t)^(α−1)      f(s),  t ∈ b−α N
//! nabla-left   ∇_a^{−α} f(t) = 1/Γ(α) Σ_{s=a+1}^{t}   (t−ρ(s))^{bar α−1}  f(s),  t ∈ N_a, 0 at a
//! nabla-right  b∇^{−α}  f(t) = 1/Γ(α) Σ_{s=t}^{b−1}   (s−ρ(t))^{bar α−1}  f(s),  t ∈ bN, 0 at b
//! ```
//!
//! Differences of order α with n − 1 < α ≤ n compose a sum of order n − α
//! with an outer n-fold difference (Δⁿ, ∇⊖ⁿ, ∇ⁿ, ⊖Δⁿ respectively); at
//! integer α the inner sum drops out entirely and the pure n-fold difference
//! remains.
//!
//! Everything here is the O(N²) reference path; the binomial module holds the
//! performance path, and the two are only allowed to meet in differential
//! tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{iterate_diff, Family, GridFunction};
use crate::specfun::{falling_factorial, gamma, rising_factorial, Order, INT_TOL};

/// Anchored side: left operators start at a, right operators end at b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Fractional sum (order −α) or fractional difference (order α).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sum,
    Difference,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kind::Sum => write!(f, "sum"),
            Kind::Difference => write!(f, "difference"),
        }
    }
}

/// Which computational formulation evaluates the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Riemann,
    Binomial,
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Formulation::Riemann => write!(f, "riemann"),
            Formulation::Binomial => write!(f, "binomial"),
        }
    }
}

/// Full description of one fractional operator application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub family: Family,
    pub side: Side,
    pub kind: Kind,
    pub formulation: Formulation,
    pub order: Order,
    /// a for left operators, b for right operators.
    pub anchor: f64,
}

impl OperatorSpec {
    pub fn new(
        family: Family,
        side: Side,
        kind: Kind,
        formulation: Formulation,
        alpha: f64,
        anchor: f64,
    ) -> Result<Self> {
        if !anchor.is_finite() {
            return Err(Error::GridMisalignment(format!(
                "anchor must be finite, got {anchor}"
            )));
        }
        Ok(OperatorSpec {
            family,
            side,
            kind,
            formulation,
            order: Order::new(alpha)?,
            anchor,
        })
    }

    pub fn with_kind(mut self, kind: Kind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_formulation(mut self, formulation: Formulation) -> Self {
        self.formulation = formulation;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.order.alpha()
    }

    /// Input grid must start at a (left) or end at b (right).
    pub(crate) fn check_input(&self, f: &GridFunction) -> Result<()> {
        match self.side {
            Side::Left => {
                if (f.origin() - self.anchor).abs() > INT_TOL {
                    return Err(Error::GridMisalignment(format!(
                        "left operator anchored at a = {} needs a grid starting there, got origin {}",
                        self.anchor,
                        f.origin()
                    )));
                }
            }
            Side::Right => {
                if (f.end() - self.anchor).abs() > INT_TOL {
                    return Err(Error::GridMisalignment(format!(
                        "right operator anchored at b = {} needs a grid ending there, got end {}",
                        self.anchor,
                        f.end()
                    )));
                }
            }
        }
        Ok(())
    }

    fn expect(&self, kind: Kind, formulation: Formulation) -> Result<()> {
        if self.kind != kind {
            return Err(Error::SpecMismatch(format!(
                "operation handles kind = {kind}, spec says {}",
                self.kind
            )));
        }
        if self.formulation != formulation {
            return Err(Error::SpecMismatch(format!(
                "operation handles formulation = {formulation}, spec says {}",
                self.formulation
            )));
        }
        Ok(())
    }
}

/// Kernel table k[m] for the sums: both delta kernels reduce to the falling
/// factorial of α−1+m and both nabla kernels to the rising factorial of m+1,
/// where m ≥ 0 is the integer offset between output point and sample.
fn sum_kernel(family: Family, alpha: f64, len: usize) -> Result<Vec<f64>> {
    let mut kern = Vec::with_capacity(len);
    for m in 0..len {
        let m = m as f64;
        let k = match family {
            Family::Delta => falling_factorial(alpha - 1.0 + m, alpha - 1.0)?,
            Family::Nabla => rising_factorial(m + 1.0, alpha - 1.0)?,
        };
        kern.push(k);
    }
    Ok(kern)
}

/// Riemann fractional sum of order α = spec.order (all four family/side
/// combinations). Output grids:
///
/// * delta-left: N_{a+α} — delta-right: `_{b−α}N` (length preserved);
/// * nabla-left: N_a with the empty-sum value 0 stored at a —
///   nabla-right: `_bN` with 0 stored at b.
pub fn riemann_sum(spec: &OperatorSpec, f: &GridFunction) -> Result<GridFunction> {
    spec.expect(Kind::Sum, Formulation::Riemann)?;
    spec.check_input(f)?;
    let alpha = spec.order.alpha();
    let l = f.len();
    let v = f.values();
    let kern = sum_kernel(spec.family, alpha, l)?;
    let pref = 1.0 / gamma(alpha)?;

    let mut values = vec![0.0; l];
    match (spec.family, spec.side) {
        (Family::Delta, Side::Left) => {
            for j in 0..l {
                let mut acc = 0.0;
                for i in 0..=j {
                    acc += kern[j - i] * v[i];
                }
                values[j] = pref * acc;
            }
            GridFunction::new(spec.anchor + alpha, values)
        }
        (Family::Delta, Side::Right) => {
            for j in 0..l {
                let mut acc = 0.0;
                for i in j..l {
                    acc += kern[i - j] * v[i];
                }
                values[j] = pref * acc;
            }
            GridFunction::new(spec.anchor - alpha - (l - 1) as f64, values)
        }
        (Family::Nabla, Side::Left) => {
            // values[0] stays 0 at t = a (Σ_{k=s+1}^{s} = 0)
            for j in 1..l {
                let mut acc = 0.0;
                for i in 1..=j {
                    acc += kern[j - i] * v[i];
                }
                values[j] = pref * acc;
            }
            GridFunction::new(spec.anchor, values)
        }
        (Family::Nabla, Side::Right) => {
            // values[l−1] stays 0 at t = b
            for j in 0..l.saturating_sub(1) {
                let mut acc = 0.0;
                for i in j..l - 1 {
                    acc += kern[i - j] * v[i];
                }
                values[j] = pref * acc;
            }
            GridFunction::new(spec.anchor - (l - 1) as f64, values)
        }
    }
}

/// Riemann fractional difference of order α: the order-(n−α) sum followed by
/// the outer n-fold difference of the defining compositions
///
/// ```text
/// delta-left  Δⁿ     delta-right  ∇⊖ⁿ = (−1)ⁿ∇ⁿ
/// nabla-left  ∇ⁿ     nabla-right  ⊖Δⁿ = (−1)ⁿΔⁿ
/// ```
///
/// At integer α the inner sum is skipped (its order would be 0) and the pure
/// signed n-fold difference of f remains.
pub fn riemann_diff(spec: &OperatorSpec, f: &GridFunction) -> Result<GridFunction> {
    spec.expect(Kind::Difference, Formulation::Riemann)?;
    spec.check_input(f)?;
    let n = spec.order.n();
    let inner = if spec.order.is_integer() {
        f.clone()
    } else {
        let inner_spec = OperatorSpec {
            kind: Kind::Sum,
            order: Order::new(spec.order.complement())?,
            ..*spec
        };
        riemann_sum(&inner_spec, f)?
    };
    match (spec.family, spec.side) {
        (Family::Delta, Side::Left) => iterate_diff(&inner, Family::Delta, n, false),
        (Family::Delta, Side::Right) => iterate_diff(&inner, Family::Nabla, n, true),
        (Family::Nabla, Side::Left) => iterate_diff(&inner, Family::Nabla, n, false),
        (Family::Nabla, Side::Right) => iterate_diff(&inner, Family::Delta, n, true),
    }
}

/// The Leibniz-rule single-sum difference forms: one weighted sum per point
/// against the Γ(−α)-kernel, defined for non-integer α only. Output grids
/// equal [`riemann_diff`]'s stored grids everywhere.
pub fn riemann_diff_alt(spec: &OperatorSpec, f: &GridFunction) -> Result<GridFunction> {
    spec.expect(Kind::Difference, Formulation::Riemann)?;
    spec.check_input(f)?;
    if spec.order.is_integer() {
        return Err(Error::AlternativeFormIntegerOrder(spec.order.alpha()));
    }
    let alpha = spec.order.alpha();
    let n = spec.order.n() as usize;
    let l = f.len();
    if l < n + 1 {
        return Err(Error::InsufficientSamples {
            needed: n + 1,
            have: l,
        });
    }
    let v = f.values();
    let out_len = l - n;
    let pref = 1.0 / gamma(-alpha)?;

    // both kernels collapse to Γ(m−α) / (Γ(m+1) Γ(−α)) at integer offset m,
    // evaluated through the family's own factorial function
    let mut kern = Vec::with_capacity(l);
    for m in 0..l {
        let m = m as f64;
        let k = match spec.family {
            Family::Delta => falling_factorial(m - alpha - 1.0, -alpha - 1.0)?,
            Family::Nabla => rising_factorial(m + 1.0, -alpha - 1.0)?,
        };
        kern.push(k);
    }

    let mut values = vec![0.0; out_len];
    let origin = match (spec.family, spec.side) {
        (Family::Delta, Side::Left) => {
            // t ∈ N_{a+n−α}: Σ_{s=a}^{t+α} (t−σ(s))^(−α−1) f(s)
            for j in 0..out_len {
                let mut acc = 0.0;
                for i in 0..=(n + j) {
                    acc += kern[n + j - i] * v[i];
                }
                values[j] = pref * acc;
            }
            spec.anchor + n as f64 - alpha
        }
        (Family::Nabla, Side::Left) => {
            // t ∈ N_{a+n} stored: Σ_{s=a+1}^{t} (t−ρ(s))^{bar −α−1} f(s)
            for j in 0..out_len {
                let mut acc = 0.0;
                for i in 1..=(n + j) {
                    acc += kern[n + j - i] * v[i];
                }
                values[j] = pref * acc;
            }
            spec.anchor + n as f64
        }
        (Family::Nabla, Side::Right) => {
            // t ∈ _{b−n}N stored: Σ_{s=t}^{b−1} (s−ρ(t))^{bar −α−1} f(s)
            for (j, value) in values.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in j..l - 1 {
                    acc += kern[i - j] * v[i];
                }
                *value = pref * acc;
            }
            spec.anchor - (l - 1) as f64
        }
        (Family::Delta, Side::Right) => {
            // t ∈ _{b−(n−α)}N: Σ_{s=t−α}^{b} (s−σ(t))^(−α−1) f(s)
            for (j, value) in values.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in j..l {
                    acc += kern[i - j] * v[i];
                }
                *value = pref * acc;
            }
            spec.anchor + alpha - (l - 1) as f64
        }
    };
    GridFunction::new(origin, values)
}
