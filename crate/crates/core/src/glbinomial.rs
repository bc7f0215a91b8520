//! The eight binomial (Grünwald–Letnikov) fractional operators as truncated
//! convolutions with the weight sequences (−1)^k C(±α, k):
//!
//! ```text
//! delta-left   BΔ_a^α  f(t) = Σ_{k=0}^{α+t−a}  w_k f(t+α−k),  t ∈ N_{a+n−α}
//!              BΔ_a^{−α} f(t) = Σ_{k=0}^{t−a−α} w_k f(t−α−k),  t ∈ N_{a+α}
//! nabla-left   B∇_a^{±α} f(t) = Σ_{k=0}^{t−a−1} w_k f(t−k)
//! delta-right  bΔB^α   f(t) = Σ_{k=0}^{α+b−t}  w_k f(t−α+k),  t ∈ _{b−n+α}N
//!              bΔB^{−α} f(t) = Σ_{k=0}^{−α+b−t} w_k f(t+α+k),  t ∈ _{b−α}N
//! nabla-right  b∇B^{±α} f(t) = Σ_{k=0}^{b−t−1} w_k f(t+k)
//! ```
//!
//! with difference weights for the α variants and sum weights for the −α
//! variants. Output grids coincide with the matching Riemann operators on
//! every stored point, which is what the verification engine checks.
//!
//! Index normalization turns each operator into one causal convolution over
//! the stored value array: right-sided operators run on the reversed array,
//! nabla operators drop the never-read anchor sample first. The fast path
//! evaluates the same convolution with an FFT once the array is long enough
//! to pay for the transform.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{Family, GridFunction};
use crate::riemann::{Formulation, Kind, OperatorSpec, Side};
use crate::specfun::{gl_weights, GLWeights, WeightMode};

/// Below this normalized length the direct triangular sum beats FFT setup.
pub const FAST_PATH_THRESHOLD: usize = 256;

/// A binomial operator normalized to a causal convolution over the stored
/// value array.
#[derive(Debug, Clone)]
pub struct ConvolutionPlan {
    weights: GLWeights,
    /// Right-sided operators consume the reversed sample array.
    reverse: bool,
    /// Nabla operators never read the sample at their anchor.
    skip_anchor: bool,
    /// First causal-convolution index that lands on the output grid.
    conv_from: usize,
    /// Nabla sums store the empty-sum value 0 at the anchor itself.
    lead_zero: bool,
    out_origin: f64,
    out_len: usize,
}

impl ConvolutionPlan {
    /// Builds the plan for `spec` applied to `f`, checking anchors and
    /// sample counts.
    pub fn new(spec: &OperatorSpec, f: &GridFunction) -> Result<Self> {
        if spec.formulation != Formulation::Binomial {
            return Err(Error::SpecMismatch(format!(
                "binomial operators need formulation = binomial, spec says {}",
                spec.formulation
            )));
        }
        spec.check_input(f)?;
        let l = f.len();
        let n = spec.order.n() as usize;
        let alpha = spec.order.alpha();

        let skip_anchor = spec.family == Family::Nabla;
        let reverse = spec.side == Side::Right;
        let m = l - usize::from(skip_anchor);

        let (mode, out_len, conv_from, lead_zero) = match spec.kind {
            Kind::Difference => {
                if l < n + 1 {
                    return Err(Error::InsufficientSamples {
                        needed: n + 1,
                        have: l,
                    });
                }
                (WeightMode::Difference, l - n, m - (l - n), false)
            }
            Kind::Sum => (WeightMode::Sum, l, 0, skip_anchor),
        };

        let lf = (l - 1) as f64;
        let nf = n as f64;
        let out_origin = match (spec.family, spec.side, spec.kind) {
            (Family::Delta, Side::Left, Kind::Sum) => spec.anchor + alpha,
            (Family::Delta, Side::Left, Kind::Difference) => spec.anchor + nf - alpha,
            (Family::Nabla, Side::Left, Kind::Sum) => spec.anchor,
            (Family::Nabla, Side::Left, Kind::Difference) => spec.anchor + nf,
            (Family::Delta, Side::Right, Kind::Sum) => spec.anchor - alpha - lf,
            (Family::Delta, Side::Right, Kind::Difference) => spec.anchor + alpha - lf,
            (Family::Nabla, Side::Right, _) => spec.anchor - lf,
        };

        let k_max = m.saturating_sub(1);
        Ok(ConvolutionPlan {
            weights: gl_weights(alpha, mode, k_max),
            reverse,
            skip_anchor,
            conv_from,
            lead_zero,
            out_origin,
            out_len,
        })
    }

    pub fn weights(&self) -> &GLWeights {
        &self.weights
    }

    pub fn output_origin(&self) -> f64 {
        self.out_origin
    }

    pub fn output_len(&self) -> usize {
        self.out_len
    }

    pub fn reverses_input(&self) -> bool {
        self.reverse
    }

    pub fn skips_anchor_sample(&self) -> bool {
        self.skip_anchor
    }

    /// Sample array in convolution order (reversed for right operators,
    /// anchor sample removed for nabla operators).
    fn normalized_input(&self, f: &GridFunction) -> Vec<f64> {
        let v = f.values();
        let mut x: Vec<f64> = if self.reverse {
            v.iter().rev().copied().collect()
        } else {
            v.to_vec()
        };
        if self.skip_anchor && !x.is_empty() {
            x.remove(0);
        }
        x
    }

    /// Maps the causal convolution back onto the operator's output grid.
    fn assemble(&self, conv: &[f64]) -> Result<GridFunction> {
        let kept = self.out_len - usize::from(self.lead_zero);
        let mut out = Vec::with_capacity(self.out_len);
        if self.lead_zero {
            out.push(0.0);
        }
        out.extend_from_slice(&conv[self.conv_from..self.conv_from + kept]);
        if self.reverse {
            out.reverse();
        }
        GridFunction::new(self.out_origin, out)
    }
}

/// y[i] = Σ_{k=0}^{i} w[k] x[i−k] by direct summation.
fn causal_conv_direct(w: &[f64], x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for (i, yi) in y.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in 0..=i {
            acc += w[k] * x[i - k];
        }
        *yi = acc;
    }
    y
}

/// Same causal convolution through a zero-padded FFT.
fn causal_conv_fft(w: &[f64], x: &[f64]) -> Vec<f64> {
    let m = x.len();
    let size = (2 * m - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);

    let mut fw: Vec<Complex<f64>> = (0..size)
        .map(|i| Complex::new(if i < m { w[i] } else { 0.0 }, 0.0))
        .collect();
    let mut fx: Vec<Complex<f64>> = (0..size)
        .map(|i| Complex::new(if i < m { x[i] } else { 0.0 }, 0.0))
        .collect();
    fft.process(&mut fw);
    fft.process(&mut fx);
    for (a, b) in fx.iter_mut().zip(&fw) {
        *a *= b;
    }
    ifft.process(&mut fx);
    let scale = 1.0 / size as f64;
    fx[..m].iter().map(|c| c.re * scale).collect()
}

fn apply_with(spec: &OperatorSpec, f: &GridFunction, fast: bool) -> Result<GridFunction> {
    let plan = ConvolutionPlan::new(spec, f)?;
    let x = plan.normalized_input(f);
    if x.is_empty() {
        // single-sample nabla sum: only the empty-sum value remains
        return plan.assemble(&[]);
    }
    let w = plan.weights().values();
    let conv = if fast && x.len() >= FAST_PATH_THRESHOLD {
        causal_conv_fft(w, &x)
    } else {
        causal_conv_direct(w, &x)
    };
    plan.assemble(&conv)
}

/// Binomial operator by direct truncated summation — the reference path.
pub fn gl_apply(spec: &OperatorSpec, f: &GridFunction) -> Result<GridFunction> {
    apply_with(spec, f, false)
}

/// Binomial operator through FFT convolution on long grids (identical values
/// to [`gl_apply`] within rounding; short grids take the direct path).
pub fn gl_apply_fast(spec: &OperatorSpec, f: &GridFunction) -> Result<GridFunction> {
    apply_with(spec, f, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{iterate_diff, nabla};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bspec(family: Family, side: Side, kind: Kind, alpha: f64, anchor: f64) -> OperatorSpec {
        OperatorSpec::new(family, side, kind, Formulation::Binomial, alpha, anchor).unwrap()
    }

    fn random_grid(rng: &mut ChaCha8Rng, origin: f64, len: usize) -> GridFunction {
        GridFunction::new(
            origin,
            (0..len).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn nabla_left_sum_anchor_value() {
        let f = GridFunction::constant(0.0, 1.0, 4).unwrap();
        let u = gl_apply(&bspec(Family::Nabla, Side::Left, Kind::Sum, 0.5, 0.0), &f).unwrap();
        assert_eq!(u.value_at(0.0), Some(0.0));
        // 1·f(2) + 0.5·f(1) = 1.5
        assert_relative_eq!(u.value_at(2.0).unwrap(), 1.5, max_relative = 1e-13);
    }

    #[test]
    fn order_one_differences_reduce_to_single_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_grid(&mut rng, 2.0, 9);
        let b = f.end();

        let u = gl_apply(
            &bspec(Family::Delta, Side::Left, Kind::Difference, 1.0, 2.0),
            &f,
        )
        .unwrap();
        let d = crate::grid::delta(&f).unwrap();
        assert_eq!(u, d);

        // nabla truncations start the sum at a+1 (never reading f(a)), so at
        // integer order the reduction to ∇ holds from the second stored
        // point on; the first stored value is the truncated sum itself
        let u = gl_apply(
            &bspec(Family::Nabla, Side::Left, Kind::Difference, 1.0, 2.0),
            &f,
        )
        .unwrap();
        let n1 = nabla(&f).unwrap();
        assert_eq!(u.origin(), n1.origin());
        assert_eq!(u.values()[1..], n1.values()[1..]);
        assert_eq!(u.values()[0], f.values()[1]);

        // right variants carry the (−1)^n of the reflected outer operators
        let u = gl_apply(
            &bspec(Family::Delta, Side::Right, Kind::Difference, 1.0, b),
            &f,
        )
        .unwrap();
        assert_eq!(u, iterate_diff(&f, Family::Nabla, 1, true).unwrap());

        let u = gl_apply(
            &bspec(Family::Nabla, Side::Right, Kind::Difference, 1.0, b),
            &f,
        )
        .unwrap();
        let d1 = iterate_diff(&f, Family::Delta, 1, true).unwrap();
        let last = u.len() - 1;
        assert_eq!(u.origin(), d1.origin());
        assert_eq!(u.values()[..last], d1.values()[..last]);
        assert_eq!(u.values()[last], f.values()[f.len() - 2]);
    }

    #[test]
    fn nabla_operators_never_read_the_anchor_sample() {
        // poison the anchor sample; nabla outputs must stay NaN-free on both
        // paths (the fast path length forces the FFT branch)
        let len = 400;
        let mut values = vec![0.25; len];
        values[0] = f64::NAN;
        let f = GridFunction::new(0.0, values).unwrap();
        for kind in [Kind::Sum, Kind::Difference] {
            for run in [gl_apply, gl_apply_fast] {
                let u = run(&bspec(Family::Nabla, Side::Left, kind, 0.7, 0.0), &f).unwrap();
                assert!(u.values().iter().all(|v| v.is_finite()), "{kind:?}");
            }
        }
        let mut values = vec![0.25; len];
        values[len - 1] = f64::NAN;
        let f = GridFunction::new(0.0, values).unwrap();
        let b = f.end();
        for kind in [Kind::Sum, Kind::Difference] {
            for run in [gl_apply, gl_apply_fast] {
                let u = run(&bspec(Family::Nabla, Side::Right, kind, 0.7, b), &f).unwrap();
                assert!(u.values().iter().all(|v| v.is_finite()), "{kind:?}");
            }
        }
    }

    #[test]
    fn delta_operators_read_exactly_to_the_anchor() {
        let len = 12;
        let mut values = vec![0.25; len];
        values[0] = f64::NAN;
        let f = GridFunction::new(0.0, values).unwrap();
        // delta-left reads down to f(a): every output point sees the poison
        let u = gl_apply(&bspec(Family::Delta, Side::Left, Kind::Sum, 0.7, 0.0), &f).unwrap();
        assert!(u.values().iter().all(|v| v.is_nan()));
        let u = gl_apply(
            &bspec(Family::Delta, Side::Left, Kind::Difference, 0.7, 0.0),
            &f,
        )
        .unwrap();
        assert!(u.values().iter().all(|v| v.is_nan()));
    }

    #[test]
    fn fast_path_matches_direct_above_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let len = 512;
        for alpha in [0.3, 1.7] {
            for family in [Family::Delta, Family::Nabla] {
                for side in [Side::Left, Side::Right] {
                    for kind in [Kind::Sum, Kind::Difference] {
                        let origin = -1.5;
                        let f = random_grid(&mut rng, origin, len);
                        let anchor = match side {
                            Side::Left => origin,
                            Side::Right => f.end(),
                        };
                        let spec = bspec(family, side, kind, alpha, anchor);
                        let a = gl_apply(&spec, &f).unwrap();
                        let b = gl_apply_fast(&spec, &f).unwrap();
                        assert_eq!(a.origin(), b.origin());
                        for (x, y) in a.values().iter().zip(b.values()) {
                            let rel = (x - y).abs() / x.abs().max(y.abs()).max(1.0);
                            assert!(rel <= 1e-9, "{family:?} {side:?} {kind:?}: {rel}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sum_then_difference_recovers_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for alpha in [0.6, 1.35] {
            let f = random_grid(&mut rng, 0.0, 12);
            let u = gl_apply(&bspec(Family::Nabla, Side::Left, Kind::Sum, alpha, 0.0), &f).unwrap();
            let g = gl_apply(
                &bspec(Family::Nabla, Side::Left, Kind::Difference, alpha, 0.0),
                &u,
            )
            .unwrap();
            // shared stored points of g and f
            for (j, gv) in g.values().iter().enumerate() {
                let t = g.point(j);
                let fv = f.value_at(t).unwrap();
                assert_relative_eq!(*gv, fv, epsilon = 1e-10, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn plan_rejects_riemann_formulation_and_short_grids() {
        let f = GridFunction::constant(0.0, 1.0, 3).unwrap();
        let spec = OperatorSpec::new(
            Family::Delta,
            Side::Left,
            Kind::Sum,
            Formulation::Riemann,
            0.5,
            0.0,
        )
        .unwrap();
        assert!(matches!(gl_apply(&spec, &f), Err(Error::SpecMismatch(_))));
        let spec = bspec(Family::Delta, Side::Left, Kind::Difference, 2.5, 0.0);
        assert!(matches!(
            gl_apply(&spec, &f),
            Err(Error::InsufficientSamples { .. })
        ));
    }
}
