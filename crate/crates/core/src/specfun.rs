//! Special-function primitives: gamma ratios with pole conventions, falling
//! and rising factorial functions, and Grünwald–Letnikov weight sequences.
//!
//! The factorial functions are
//!
//! ```text
//! t^(α)     = Γ(t+1) / Γ(t+1−α)        (falling)
//! t^{bar α} = Γ(t+α) / Γ(t)            (rising, 0^{bar α} = 0)
//! ```
//!
//! evaluated through [`gamma_ratio`], which carries the conventions that make
//! the kernel sums total: a denominator pole yields 0, two simultaneous poles
//! yield the residue-ratio limit, and a numerator-only pole is an error.

use crate::error::{Error, Result};

/// Absolute tolerance under which a real is treated as an integer.
///
/// Grid points and kernel arguments arise from repeated addition of 1 and ±α,
/// so nominal integers arrive with a little float noise.
pub const INT_TOL: f64 = 1e-9;

/// The integer `x` is within [`INT_TOL`] of, if any.
pub(crate) fn near_int(x: f64) -> Option<i64> {
    if !x.is_finite() {
        return None;
    }
    let r = x.round();
    if (x - r).abs() <= INT_TOL && r.abs() < 9.0e15 {
        Some(r as i64)
    } else {
        None
    }
}

fn nonpos_int(x: f64) -> Option<i64> {
    near_int(x).filter(|&k| k <= 0)
}

/// sin(πx) from the reduced argument; accurate near integer x.
fn sin_pi(x: f64) -> f64 {
    let k = x.round();
    let s = (std::f64::consts::PI * (x - k)).sin();
    if k.rem_euclid(2.0) < 0.5 {
        s
    } else {
        -s
    }
}

/// ln|Γ(x)| and sign(Γ(x)); `None` when x is a pole.
fn ln_gamma_sign(x: f64) -> Option<(f64, f64)> {
    if nonpos_int(x).is_some() {
        return None;
    }
    if x >= 0.5 {
        Some((statrs::function::gamma::ln_gamma(x), 1.0))
    } else {
        // Γ(x) = π / (sin(πx) Γ(1−x)), and Γ(1−x) > 0 for x < 0.5.
        let s = sin_pi(x);
        let ln =
            std::f64::consts::PI.ln() - s.abs().ln() - statrs::function::gamma::ln_gamma(1.0 - x);
        Some((ln, if s >= 0.0 { 1.0 } else { -1.0 }))
    }
}

/// Γ(x), signed on the negative axis, exact at small positive integers.
///
/// Errors with [`Error::KernelSingularity`] at nonpositive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if let Some(k) = near_int(x) {
        if k <= 0 {
            return Err(Error::KernelSingularity { x });
        }
        if k <= 20 {
            let mut p = 1.0;
            for j in 2..k {
                p *= j as f64;
            }
            return Ok(p);
        }
    }
    let (ln, sign) = ln_gamma_sign(x).expect("pole handled above");
    Ok(sign * ln.exp())
}

/// Exact factorial ratio k!/m! by integer products.
fn factorial_ratio(k: i64, m: i64) -> f64 {
    if k >= m {
        let mut p = 1.0;
        for j in (m + 1)..=k {
            p *= j as f64;
        }
        p
    } else {
        let mut p = 1.0;
        for j in (k + 1)..=m {
            p *= j as f64;
        }
        1.0 / p
    }
}

/// Γ(ix)/Γ(iy) for positive integers by an exact product.
fn int_gamma_ratio(ix: i64, iy: i64) -> f64 {
    if ix == iy {
        return 1.0;
    }
    if ix > iy {
        let mut p = 1.0;
        for j in iy..ix {
            p *= j as f64;
        }
        p
    } else {
        let mut p = 1.0;
        for j in ix..iy {
            p *= j as f64;
        }
        1.0 / p
    }
}

/// Γ(x)/Γ(y) in log space with sign tracking, under the pole conventions:
///
/// * y a nonpositive integer, x not: the ratio is 0;
/// * x = −m and y = −k both nonpositive integers: the residue-ratio limit
///   `(−1)^(m−k) · k!/m!`;
/// * x a nonpositive integer with finite denominator: a kernel singularity
///   error — a silent value here would mask grid misalignment.
///
/// When both arguments sit on positive integers the ratio is an exact
/// product, so integer-order operators reduce exactly.
pub fn gamma_ratio(x: f64, y: f64) -> Result<f64> {
    match (nonpos_int(x), nonpos_int(y)) {
        (Some(xm), Some(yk)) => {
            let m = -xm;
            let k = -yk;
            let sign = if (m - k).rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            };
            Ok(sign * factorial_ratio(k, m))
        }
        (None, Some(_)) => Ok(0.0),
        (Some(_), None) => Err(Error::KernelSingularity { x }),
        (None, None) => {
            if let (Some(ix), Some(iy)) = (near_int(x), near_int(y)) {
                if ix >= 1 && iy >= 1 && (ix - iy).abs() <= 512 {
                    return Ok(int_gamma_ratio(ix, iy));
                }
            }
            let (lx, sx) = ln_gamma_sign(x).expect("pole handled above");
            let (ly, sy) = ln_gamma_sign(y).expect("pole handled above");
            Ok(sx * sy * (lx - ly).exp())
        }
    }
}

/// Falling factorial t^(α) = Γ(t+1)/Γ(t+1−α).
///
/// For nonnegative integer α = n this agrees with the product
/// ∏_{j=0}^{n−1} (t−j), including the zeros the product produces.
pub fn falling_factorial(t: f64, alpha: f64) -> Result<f64> {
    gamma_ratio(t + 1.0, t + 1.0 - alpha)
}

/// Rising factorial t^{bar α} = Γ(t+α)/Γ(t), with 0^{bar α} = 0.
///
/// For positive integer α = m this agrees with ∏_{k=0}^{m−1} (t+k); the
/// t = 0 convention is the denominator-pole convention of [`gamma_ratio`].
pub fn rising_factorial(t: f64, alpha: f64) -> Result<f64> {
    gamma_ratio(t + alpha, t)
}

/// A fractional operator order α > 0 with n the smallest integer ≥ α
/// (n = α at integer orders).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Order {
    alpha: f64,
    n: u32,
}

impl Order {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0e6 {
            return Err(Error::InvalidOrder(alpha));
        }
        let n = match near_int(alpha) {
            Some(k) => k as u32,
            None => alpha.ceil() as u32,
        };
        if n == 0 {
            // alpha within INT_TOL of zero is an order-0 operator in disguise
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(Order { alpha, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// n with n − 1 < α ≤ n.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_integer(&self) -> bool {
        near_int(self.alpha).is_some()
    }

    /// n − α, the order of the inner sum in the difference operators.
    pub fn complement(&self) -> f64 {
        f64::from(self.n) - self.alpha
    }
}

/// Which binomial weight family a [`GLWeights`] sequence holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// `(−1)^k C(α, k)` — coefficients of (1−z)^α, used by differences.
    Difference,
    /// `(−1)^k C(−α, k) = C(α+k−1, k)` — coefficients of (1−z)^{−α},
    /// used by sums; all nonnegative for α > 0.
    Sum,
}

/// A precomputed Grünwald–Letnikov weight sequence w[0..=K].
#[derive(Debug, Clone, PartialEq)]
pub struct GLWeights {
    alpha: f64,
    mode: WeightMode,
    values: Vec<f64>,
}

impl GLWeights {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Weights w[0..=k_max] by the two-term multiplicative recurrence
/// (never through gamma ratios — the recurrence is exact up to rounding):
///
/// ```text
/// difference: w[0] = 1,  w[k] = w[k−1] · (k−1−α) / k
/// sum:        w[0] = 1,  w[k] = w[k−1] · (k−1+α) / k
/// ```
pub fn gl_weights(alpha: f64, mode: WeightMode, k_max: usize) -> GLWeights {
    let mut values = Vec::with_capacity(k_max + 1);
    values.push(1.0);
    for k in 1..=k_max {
        let kf = k as f64;
        let prev = values[k - 1];
        let next = match mode {
            WeightMode::Difference => prev * (kf - 1.0 - alpha) / kf,
            WeightMode::Sum => prev * (kf - 1.0 + alpha) / kf,
        };
        values.push(next);
    }
    GLWeights {
        alpha,
        mode,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Eq-style direct product ∏_{j=0}^{n−1} (t−j), the definition the gamma
    /// form must reproduce at integer orders.
    fn falling_product(t: f64, n: u32) -> f64 {
        (0..n).map(|j| t - f64::from(j)).product()
    }

    /// Direct product form of C(α,k) = α(α−1)...(α−k+1)/k!.
    fn binom_product(alpha: f64, k: usize) -> f64 {
        let num: f64 = (0..k).map(|j| alpha - j as f64).product();
        let den: f64 = (1..=k).map(|j| j as f64).product();
        num / den
    }

    #[test]
    fn gamma_ratio_positive_reals() {
        // Γ(6)/Γ(3.5), frozen from a 40-digit independent evaluation
        assert_relative_eq!(
            gamma_ratio(6.0, 3.5).unwrap(),
            36.108_133_347_056_4,
            max_relative = 1e-12
        );
        // Γ(2.5)/Γ(2)
        assert_relative_eq!(
            gamma_ratio(2.5, 2.0).unwrap(),
            1.329_340_388_179_137,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gamma_ratio_denominator_pole_is_zero() {
        assert_eq!(gamma_ratio(4.0, -1.0).unwrap(), 0.0);
        assert_eq!(gamma_ratio(0.5, 0.0).unwrap(), 0.0);
        assert_eq!(gamma_ratio(7.25, -12.0).unwrap(), 0.0);
    }

    #[test]
    fn gamma_ratio_residue_limit_at_double_pole() {
        // Γ(−1)/Γ(−4) = (−1)^(1−4) · 4!/1! = −24, which is also the
        // falling-factorial product (−2)(−3)(−4)
        assert_eq!(gamma_ratio(-1.0, -4.0).unwrap(), -24.0);
        assert_eq!(gamma_ratio(-4.0, -1.0).unwrap(), -1.0 / 24.0);
        assert_eq!(gamma_ratio(0.0, -2.0).unwrap(), 2.0);
        assert_eq!(gamma_ratio(-3.0, -3.0).unwrap(), 1.0);
    }

    #[test]
    fn gamma_ratio_numerator_pole_is_an_error() {
        assert!(matches!(
            gamma_ratio(-2.0, 1.5),
            Err(Error::KernelSingularity { .. })
        ));
    }

    #[test]
    fn gamma_ratio_integer_arguments_are_exact() {
        assert_eq!(gamma_ratio(7.0, 4.0).unwrap(), 120.0); // 4·5·6
        assert_eq!(gamma_ratio(4.0, 7.0).unwrap(), 1.0 / 120.0);
        assert_eq!(gamma_ratio(1.0, 1.0).unwrap(), 1.0);
        // snapped near-integers take the same path
        assert_eq!(gamma_ratio(7.0 + 4e-10, 4.0 - 4e-10).unwrap(), 120.0);
    }

    #[test]
    fn gamma_signed_and_exact_values() {
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        // Γ(−0.5) = −2√π
        assert_relative_eq!(
            gamma(-0.5).unwrap(),
            -2.0 * std::f64::consts::PI.sqrt(),
            max_relative = 1e-13
        );
        // Γ(−1.5) = 4√π/3
        assert_relative_eq!(
            gamma(-1.5).unwrap(),
            4.0 * std::f64::consts::PI.sqrt() / 3.0,
            max_relative = 1e-13
        );
        assert!(gamma(0.0).is_err());
        assert!(gamma(-3.0).is_err());
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(3.0, 3.0).unwrap(), 6.0);
        assert_eq!(falling_factorial(3.0, 5.0).unwrap(), 0.0);
        assert_relative_eq!(
            falling_factorial(1.5, 0.5).unwrap(),
            1.329_340_388_179_137,
            max_relative = 1e-10
        );
        // negative integer base, integer order: matches the signed product
        assert_eq!(falling_factorial(-2.0, 3.0).unwrap(), -24.0);
    }

    #[test]
    fn rising_factorial_examples() {
        assert_eq!(rising_factorial(0.0, 0.7).unwrap(), 0.0);
        assert_eq!(rising_factorial(2.0, 3.0).unwrap(), 24.0);
        assert_relative_eq!(
            rising_factorial(2.0, 0.5).unwrap(),
            1.329_340_388_179_137,
            max_relative = 1e-10
        );
        // (−3)(−2) = 6 through the double-pole residue limit
        assert_eq!(rising_factorial(-3.0, 2.0).unwrap(), 6.0);
    }

    #[test]
    fn order_derivation() {
        let o = Order::new(0.5).unwrap();
        assert_eq!(o.n(), 1);
        assert!(!o.is_integer());
        let o = Order::new(2.0).unwrap();
        assert_eq!(o.n(), 2);
        assert!(o.is_integer());
        let o = Order::new(2.0 + 1e-10).unwrap();
        assert_eq!(o.n(), 2);
        assert!(o.is_integer());
        let o = Order::new(2.3).unwrap();
        assert_eq!(o.n(), 3);
        assert_relative_eq!(o.complement(), 0.7, max_relative = 1e-12);
        assert!(Order::new(0.0).is_err());
        assert!(Order::new(-1.0).is_err());
        assert!(Order::new(f64::NAN).is_err());
    }

    #[test]
    fn gl_weights_spec_values() {
        let w = gl_weights(0.5, WeightMode::Difference, 3);
        assert_eq!(w.values(), &[1.0, -0.5, -0.125, -0.0625]);
        let w = gl_weights(0.5, WeightMode::Sum, 3);
        assert_eq!(w.values(), &[1.0, 0.5, 0.375, 0.3125]);
        let w = gl_weights(1.0, WeightMode::Difference, 3);
        assert_eq!(w.values(), &[1.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn falling_matches_integer_product_on_a_grid() {
        for n in 0..=12u32 {
            for i in -8..=20i32 {
                let t = f64::from(i) * 0.75;
                let expect = falling_product(t, n);
                let got = falling_factorial(t, f64::from(n)).unwrap();
                if expect == 0.0 {
                    assert!(got.abs() < 1e-12, "t={t} n={n} got={got}");
                } else {
                    assert_relative_eq!(got, expect, max_relative = 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn weights_recurrence_matches_direct_product(
            alpha in 0.01f64..3.0,
            k_max in 0usize..=64,
        ) {
            let wd = gl_weights(alpha, WeightMode::Difference, k_max);
            let ws = gl_weights(alpha, WeightMode::Sum, k_max);
            for k in 0..=k_max {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let expect_d = sign * binom_product(alpha, k);
                let expect_s = sign * binom_product(-alpha, k);
                prop_assert!((wd.values()[k] - expect_d).abs()
                    <= 1e-13 * expect_d.abs().max(1.0));
                prop_assert!((ws.values()[k] - expect_s).abs()
                    <= 1e-13 * expect_s.abs().max(1.0));
                // sum weights stay nonnegative for positive alpha
                prop_assert!(ws.values()[k] >= 0.0);
            }
        }

        #[test]
        fn rising_equals_shifted_falling(t in 0.05f64..20.0, alpha in 0.01f64..4.0) {
            // t^{bar α} = (t+α−1)^(α)
            let lhs = rising_factorial(t, alpha).unwrap();
            let rhs = falling_factorial(t + alpha - 1.0, alpha).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }
    }
}
