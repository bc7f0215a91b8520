//! Grid-indexed sequences and classical difference calculus.
//!
//! A [`GridFunction`] stores finitely many real values on a unit-spaced grid
//! whose first point (the origin) may be any real; fractional operators shift
//! origins by ±α, so two grids are comparable exactly when their origins
//! differ by an integer.
//!
//! Differences shrink the stored grid instead of padding: every stored value
//! of Δf, ∇f, Δⁿf, ∇ⁿf is defined purely by stored values of f.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{near_int, INT_TOL};

/// Which one-step difference operator: forward Δf(t) = f(t+1) − f(t) or
/// backward ∇f(t) = f(t) − f(t−1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Delta,
    Nabla,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Delta => write!(f, "delta"),
            Family::Nabla => write!(f, "nabla"),
        }
    }
}

/// A finite real-valued sequence on a unit-spaced grid.
///
/// Value `j` lives at grid point `origin + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    origin: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(origin: f64, values: Vec<f64>) -> Result<Self> {
        if !origin.is_finite() {
            return Err(Error::GridMisalignment(format!(
                "origin must be finite, got {origin}"
            )));
        }
        if values.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, have: 0 });
        }
        Ok(GridFunction { origin, values })
    }

    /// Grid of `len` copies of `value` starting at `origin`.
    pub fn constant(origin: f64, value: f64, len: usize) -> Result<Self> {
        Self::new(origin, vec![value; len])
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Last grid point, `origin + len − 1`.
    pub fn end(&self) -> f64 {
        self.origin + (self.values.len() - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid point of the j-th stored value.
    pub fn point(&self, j: usize) -> f64 {
        self.origin + j as f64
    }

    /// Stored value at grid point `t`, when `t` lies on the grid.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let j = near_int(t - self.origin)?;
        if j < 0 || j as usize >= self.values.len() {
            return None;
        }
        Some(self.values[j as usize])
    }

    /// Integer offset of `other`'s origin from ours, when the grids lie on
    /// the same unit lattice.
    pub fn offset_from(&self, other: &GridFunction) -> Option<i64> {
        near_int(self.origin - other.origin)
    }

    /// Same values relabeled onto a grid shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> GridFunction {
        GridFunction {
            origin: self.origin + delta,
            values: self.values.clone(),
        }
    }

    /// Extends the grid leftward with `n` zeros (the empty-sum convention).
    pub fn with_leading_zeros(&self, n: usize) -> GridFunction {
        let mut values = vec![0.0; n];
        values.extend_from_slice(&self.values);
        GridFunction {
            origin: self.origin - n as f64,
            values,
        }
    }

    /// Extends the grid rightward with `n` zeros.
    pub fn with_trailing_zeros(&self, n: usize) -> GridFunction {
        let mut values = self.values.clone();
        values.extend(std::iter::repeat_n(0.0, n));
        GridFunction {
            origin: self.origin,
            values,
        }
    }

    /// Keeps `len` values starting at stored index `start`.
    pub fn slice(&self, start: usize, len: usize) -> Result<GridFunction> {
        if start + len > self.values.len() || len == 0 {
            return Err(Error::InsufficientSamples {
                needed: start + len.max(1),
                have: self.values.len(),
            });
        }
        GridFunction::new(
            self.origin + start as f64,
            self.values[start..start + len].to_vec(),
        )
    }

    /// Max-norm over stored values.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Serializes as CSV with header `t,value`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (j, v) in self.values.iter().enumerate() {
            out.push_str(&format_sig12(self.point(j)));
            out.push(',');
            out.push_str(&format_sig12(*v));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV form produced by [`GridFunction::to_csv`].
    ///
    /// The first data row's `t` becomes the origin; rows must advance in
    /// unit steps.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?;
        let header_norm: String = header
            .split(',')
            .map(|h| h.trim().to_ascii_lowercase())
            .collect::<Vec<_>>()
            .join(",");
        if header_norm != "t,value" {
            return Err(Error::Parse(format!(
                "expected header 't,value', got '{header}'"
            )));
        }
        let mut origin = 0.0;
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut cols = line.split(',');
            let (t_str, v_str) = match (cols.next(), cols.next(), cols.next()) {
                (Some(t), Some(v), None) => (t.trim(), v.trim()),
                _ => return Err(Error::Parse(format!("row {}: expected 't,value'", i + 1))),
            };
            let t: f64 = t_str
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad t '{t_str}'", i + 1)))?;
            let v: f64 = v_str
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad value '{v_str}'", i + 1)))?;
            if i == 0 {
                origin = t;
            } else {
                let expect = origin + i as f64;
                if (t - expect).abs() > 1e-6 + 1e-9 * expect.abs() {
                    return Err(Error::Parse(format!(
                        "row {}: t = {t} breaks unit spacing (expected {expect})",
                        i + 1
                    )));
                }
            }
            values.push(v);
        }
        GridFunction::new(origin, values)
    }

    /// Serializes as JSON `{"origin": ..., "values": [...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GridFunction =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        GridFunction::new(g.origin, g.values)
    }
}

/// `x` with 12 significant digits, trailing zeros trimmed.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let trimmed = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.')
        } else {
            &s
        };
        trimmed.to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// Forward difference: (Δf)(t) = f(t+1) − f(t) on the same origin,
/// one sample shorter.
pub fn delta(f: &GridFunction) -> Result<GridFunction> {
    if f.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            have: f.len(),
        });
    }
    let values = f.values().windows(2).map(|w| w[1] - w[0]).collect();
    GridFunction::new(f.origin(), values)
}

/// Backward difference: (∇f)(t) = f(t) − f(t−1), stored from `origin + 1`
/// so every value is defined by stored samples.
pub fn nabla(f: &GridFunction) -> Result<GridFunction> {
    if f.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            have: f.len(),
        });
    }
    let values = f.values().windows(2).map(|w| w[1] - w[0]).collect();
    GridFunction::new(f.origin() + 1.0, values)
}

/// n-fold Δ or ∇ by composition; `signed` multiplies by (−1)^n, giving the
/// reflected operators ⊖Δⁿ and ∇⊖ⁿ.
pub fn iterate_diff(
    f: &GridFunction,
    family: Family,
    n: u32,
    signed: bool,
) -> Result<GridFunction> {
    if f.len() < n as usize + 1 {
        return Err(Error::InsufficientSamples {
            needed: n as usize + 1,
            have: f.len(),
        });
    }
    let mut g = f.clone();
    for _ in 0..n {
        g = match family {
            Family::Delta => delta(&g)?,
            Family::Nabla => nabla(&g)?,
        };
    }
    if signed && n % 2 == 1 {
        let values = g.values().iter().map(|v| -v).collect();
        g = GridFunction::new(g.origin(), values)?;
    }
    Ok(g)
}

/// n-fold difference as a single binomial-weighted sum per point:
///
/// ```text
/// Δⁿf(t) = Σ_{k=0}^{n} (−1)^k C(n,k) f(t+n−k)
/// ∇ⁿf(t) = Σ_{k=0}^{n} (−1)^k C(n,k) f(t−k)
/// ```
///
/// Same values and grid as the unsigned [`iterate_diff`]: the two forms
/// read the same stored window, only the output origin differs.
pub fn binomial_diff(f: &GridFunction, family: Family, n: u32) -> Result<GridFunction> {
    let nu = n as usize;
    if f.len() < nu + 1 {
        return Err(Error::InsufficientSamples {
            needed: nu + 1,
            have: f.len(),
        });
    }
    // signed binomial row (−1)^k C(n,k)
    let mut coeff = Vec::with_capacity(nu + 1);
    let mut c = 1.0f64;
    coeff.push(c);
    for k in 1..=nu {
        c = c * (n as f64 - (k as f64 - 1.0)) / k as f64;
        coeff.push(if k % 2 == 0 { c } else { -c });
    }
    let v = f.values();
    let out_len = v.len() - nu;
    let mut values = Vec::with_capacity(out_len);
    for j in 0..out_len {
        let mut acc = 0.0;
        for (k, w) in coeff.iter().enumerate() {
            acc += w * v[j + nu - k];
        }
        values.push(acc);
    }
    let origin = match family {
        Family::Delta => f.origin(),
        Family::Nabla => f.origin() + n as f64,
    };
    GridFunction::new(origin, values)
}

/// A reflection anchor pair (a, b) with b ≥ a and b − a an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorPair {
    a: f64,
    b: f64,
}

impl AnchorPair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::GridMisalignment(format!(
                "anchors must be finite, got ({a}, {b})"
            )));
        }
        if b < a - INT_TOL {
            return Err(Error::GridMisalignment(format!(
                "right anchor {b} lies below left anchor {a}"
            )));
        }
        if near_int(b - a).is_none() {
            return Err(Error::GridMisalignment(format!(
                "anchors ({a}, {b}) do not differ by an integer"
            )));
        }
        Ok(AnchorPair { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Image of `t` under the reflection s ↦ a + b − s.
    pub fn reflect(&self, t: f64) -> f64 {
        self.a + self.b - t
    }
}

/// The discrete Q-operator: (Qf)(s) = f(a + b − s).
///
/// The result grid is the reflection of f's grid through (a+b)/2; when f
/// lives on N_a ∩ bN this is the classical left/right exchange, and applying
/// it twice returns f exactly.
pub fn q_reflect(f: &GridFunction, anchors: &AnchorPair) -> Result<GridFunction> {
    let origin = anchors.reflect(f.end());
    let values = f.values().iter().rev().copied().collect();
    GridFunction::new(origin, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(origin: f64, values: &[f64]) -> GridFunction {
        GridFunction::new(origin, values.to_vec()).unwrap()
    }

    /// Inverse of Δ with u(origin) = 0; Δ ∘ cumsum = identity.
    fn delta_cumsum(f: &GridFunction) -> GridFunction {
        let mut values = Vec::with_capacity(f.len() + 1);
        let mut acc = 0.0;
        values.push(acc);
        for v in f.values() {
            acc += v;
            values.push(acc);
        }
        GridFunction::new(f.origin(), values).unwrap()
    }

    #[test]
    fn delta_basics() {
        assert_eq!(
            delta(&grid(0.0, &[1.0, 1.0, 1.0])).unwrap(),
            grid(0.0, &[0.0, 0.0])
        );
        assert_eq!(
            delta(&grid(0.0, &[0.0, 1.0, 4.0, 9.0])).unwrap(),
            grid(0.0, &[1.0, 3.0, 5.0])
        );
        assert_eq!(delta(&grid(2.5, &[1.0, 2.0])).unwrap(), grid(2.5, &[1.0]));
        assert!(matches!(
            delta(&grid(0.0, &[1.0])),
            Err(Error::InsufficientSamples { needed: 2, have: 1 })
        ));
    }

    #[test]
    fn nabla_basics() {
        assert_eq!(
            nabla(&grid(0.0, &[1.0, 1.0, 1.0])).unwrap(),
            grid(1.0, &[0.0, 0.0])
        );
        assert_eq!(
            nabla(&grid(0.0, &[0.0, 1.0, 4.0, 9.0])).unwrap(),
            grid(1.0, &[1.0, 3.0, 5.0])
        );
        assert!(nabla(&grid(0.0, &[1.0])).is_err());
    }

    #[test]
    fn delta_inverts_cumsum() {
        let f = grid(-1.5, &[0.3, -0.7, 2.0, 0.25, -1.0]);
        let u = delta_cumsum(&f);
        assert_eq!(delta(&u).unwrap(), f);
        // and nabla recovers f from the shifted cumulative sum
        let n = nabla(&u).unwrap();
        assert_eq!(n.values(), f.values());
        assert_eq!(n.origin(), f.origin() + 1.0);
    }

    #[test]
    fn iterate_diff_squares_and_signs() {
        let sq = grid(0.0, &[0.0, 1.0, 4.0, 9.0]);
        let d2 = iterate_diff(&sq, Family::Delta, 2, false).unwrap();
        assert_eq!(d2, grid(0.0, &[2.0, 2.0]));
        // signed nabla, n = 1: −∇f
        let s = iterate_diff(&sq, Family::Nabla, 1, true).unwrap();
        assert_eq!(s, grid(1.0, &[-1.0, -3.0, -5.0]));
        // n = 0 is the identity
        assert_eq!(iterate_diff(&sq, Family::Delta, 0, false).unwrap(), sq);
        assert!(iterate_diff(&sq, Family::Delta, 4, false).is_err());
    }

    #[test]
    fn binomial_diff_matches_examples() {
        let sq = grid(0.0, &[0.0, 1.0, 4.0, 9.0]);
        assert_eq!(
            binomial_diff(&sq, Family::Delta, 2).unwrap(),
            grid(0.0, &[2.0, 2.0])
        );
        assert_eq!(
            binomial_diff(&sq, Family::Delta, 1).unwrap(),
            delta(&sq).unwrap()
        );
        assert_eq!(
            binomial_diff(&sq, Family::Nabla, 1).unwrap(),
            nabla(&sq).unwrap()
        );
    }

    #[test]
    fn q_reflect_reverses_and_involutes() {
        let f = grid(0.0, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let anchors = AnchorPair::new(0.0, 5.0).unwrap();
        let q = q_reflect(&f, &anchors).unwrap();
        assert_eq!(q, grid(0.0, &[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]));
        assert_eq!(q_reflect(&q, &anchors).unwrap(), f);
        assert_eq!(q.max_abs(), f.max_abs());
        assert!(AnchorPair::new(0.0, 5.5).is_err());
        assert!(AnchorPair::new(3.0, 1.0).is_err());
    }

    #[test]
    fn q_commutes_with_differences_up_to_sign() {
        let f = grid(2.0, &[0.4, -1.2, 3.3, 0.0, 2.25]);
        let anchors = AnchorPair::new(2.0, 6.0).unwrap();
        // −Q∇f = ΔQf
        let lhs = {
            let g = q_reflect(&nabla(&f).unwrap(), &anchors).unwrap();
            GridFunction::new(g.origin(), g.values().iter().map(|v| -v).collect()).unwrap()
        };
        let rhs = delta(&q_reflect(&f, &anchors).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        // −QΔf = ∇Qf
        let lhs = {
            let g = q_reflect(&delta(&f).unwrap(), &anchors).unwrap();
            GridFunction::new(g.origin(), g.values().iter().map(|v| -v).collect()).unwrap()
        };
        let rhs = nabla(&q_reflect(&f, &anchors).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn csv_round_trip_examples() {
        let f = grid(0.5, &[1.5, -2.0, 0.000123456789012, 9.87654321098e14]);
        let parsed = GridFunction::from_csv(&f.to_csv()).unwrap();
        assert_eq!(parsed.len(), f.len());
        assert_eq!(parsed.origin(), 0.5);
        for (a, b) in parsed.values().iter().zip(f.values()) {
            assert!((a - b).abs() <= 1e-11 * b.abs().max(1.0));
        }
        assert!(GridFunction::from_csv("nope\n1,2\n").is_err());
        assert!(GridFunction::from_csv("t,value\n0,1\n2,5\n").is_err());
        assert!(GridFunction::from_csv("t,value\n").is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = grid(-2.25, &[1.0, 2.0, 3.0]);
        let back = GridFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert!(GridFunction::from_json("{\"origin\":0}").is_err());
    }

    #[test]
    fn value_lookup_uses_integer_offsets() {
        let f = grid(1.5, &[10.0, 20.0, 30.0]);
        assert_eq!(f.value_at(2.5), Some(20.0));
        assert_eq!(f.value_at(2.5 + 5e-10), Some(20.0));
        assert_eq!(f.value_at(2.0), None);
        assert_eq!(f.value_at(4.5), None);
    }

    proptest! {
        #[test]
        fn binomial_equals_iterated(
            n in 1u32..=8,
            len in 9usize..=64,
            seedvals in proptest::collection::vec(-1.0f64..1.0, 64),
            origin in -5.0f64..5.0,
        ) {
            let values: Vec<f64> = seedvals.iter().copied().take(len).collect();
            let f = GridFunction::new(origin, values).unwrap();
            for family in [Family::Delta, Family::Nabla] {
                let a = iterate_diff(&f, family, n, false).unwrap();
                let b = binomial_diff(&f, family, n).unwrap();
                prop_assert_eq!(a.offset_from(&b), Some(0));
                for (x, y) in a.values().iter().zip(b.values()) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn csv_round_trip_is_identity_at_12_digits(
            origin in -100.0f64..100.0,
            vals in proptest::collection::vec(-1.0e6f64..1.0e6, 1..40),
        ) {
            let f = GridFunction::new(origin, vals).unwrap();
            let parsed = GridFunction::from_csv(&f.to_csv()).unwrap();
            prop_assert_eq!(parsed.len(), f.len());
            prop_assert!((parsed.origin() - f.origin()).abs() <= 1e-9 * f.origin().abs().max(1.0));
            for (a, b) in parsed.values().iter().zip(f.values()) {
                prop_assert!((a - b).abs() <= 1e-11 * b.abs().max(1.0));
            }
        }
    }
}
