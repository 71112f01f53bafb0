//! Real functions on an interval, with analytic derivatives where known and
//! finite-difference fallbacks where not.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::order::{fd_first, Interval, RealFn};

/// Step for the numeric first derivative when no analytic x′ is supplied.
pub const FIRST_DERIVATIVE_STEP: f64 = 1e-7;

/// Highest derivative order obtainable purely by finite differences.
pub const MAX_NUMERIC_ORDER: usize = 4;

/// Uniform sample count for estimated derivative bounds.
pub const BOUND_SAMPLES: usize = 1001;

/// Safety factor applied to sampled derivative maxima.
pub const BOUND_SAFETY: f64 = 1.05;

type BoundFn = Arc<dyn Fn(usize, f64, f64) -> f64 + Send + Sync>;

/// How a derivative bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    Analytic,
    Estimated,
}

impl BoundSource {
    /// The weaker of two sources.
    pub fn combine(self, other: Self) -> Self {
        if self == Self::Analytic && other == Self::Analytic {
            Self::Analytic
        } else {
            Self::Estimated
        }
    }
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Analytic => f.write_str("analytic bound"),
            Self::Estimated => f.write_str("estimated bound"),
        }
    }
}

/// A real function x on [a, b].
///
/// `derivatives[k]` holds the analytic (k+1)-th derivative. Orders beyond
/// the supplied ones are obtained by finite differences of the highest
/// analytic one.
#[derive(Clone)]
pub struct ScalarFunction {
    value: RealFn,
    derivatives: Vec<RealFn>,
    domain: Interval,
    bound: Option<BoundFn>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("domain", &self.domain)
            .field("analytic_derivatives", &self.derivatives.len())
            .field("analytic_bound", &self.bound.is_some())
            .finish_non_exhaustive()
    }
}

fn falling_factorial(gamma: f64, k: usize) -> f64 {
    (0..k).map(|j| gamma - j as f64).product()
}

impl ScalarFunction {
    pub fn new<F>(value: F, domain: Interval) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            derivatives: Vec::new(),
            domain,
            bound: None,
        }
    }

    pub fn with_derivative<F, D>(value: F, derivative: D, domain: Interval) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(value, domain).push_derivative(derivative)
    }

    /// Appends the next analytic derivative.
    pub fn push_derivative<D>(mut self, derivative: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivatives.push(Arc::new(derivative));
        self
    }

    /// Attaches an analytic bound: `bound(p, lo, hi)` must return
    /// max over [lo, hi] of |x^(p)|.
    pub fn with_bound<B>(mut self, bound: B) -> Self
    where
        B: Fn(usize, f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.bound = Some(Arc::new(bound));
        self
    }

    /// x(t) ≡ c.
    pub fn constant(c: f64, domain: Interval) -> Self {
        let mut f = Self::new(move |_| c, domain)
            .with_bound(move |p, _, _| if p == 0 { c.abs() } else { 0.0 });
        for _ in 0..8 {
            f = f.push_derivative(|_| 0.0);
        }
        f
    }

    /// x(t) = (t − a)^γ with all derivatives analytic, γ > 0.
    pub fn power_left(gamma: f64, domain: Interval) -> Result<Self> {
        Self::power(gamma, domain, false)
    }

    /// x(t) = (b − t)^γ with all derivatives analytic, γ > 0.
    pub fn power_right(gamma: f64, domain: Interval) -> Result<Self> {
        Self::power(gamma, domain, true)
    }

    fn power(gamma: f64, domain: Interval, right: bool) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!(
                "power exponent must be positive, got {gamma}"
            )));
        }
        let Interval { a, b } = domain;
        let base = move |t: f64| {
            if right {
                (b - t).max(0.0)
            } else {
                (t - a).max(0.0)
            }
        };
        // (−1)^k from the chain rule on the right
        let sign = move |k: usize| if right && k % 2 == 1 { -1.0 } else { 1.0 };
        let term = move |k: usize, t: f64| {
            let c = falling_factorial(gamma, k);
            if c == 0.0 {
                0.0
            } else {
                sign(k) * c * base(t).powf(gamma - k as f64)
            }
        };
        let mut f = Self::new(move |t| term(0, t), domain);
        for k in 1..=8 {
            f = f.push_derivative(move |t| term(k, t));
        }
        Ok(f.with_bound(move |k, lo, hi| {
            let c = falling_factorial(gamma, k).abs();
            if c == 0.0 {
                return 0.0;
            }
            let e = gamma - k as f64;
            // base is monotone on [lo, hi]; pick the end where |x^(k)| peaks
            let (near, far) = if right {
                (base(hi), base(lo))
            } else {
                (base(lo), base(hi))
            };
            if e >= 0.0 {
                c * far.powf(e)
            } else {
                c * near.powf(e)
            }
        }))
    }

    /// The reflected function s ↦ x(a + b − s).
    pub fn mirrored(&self) -> Self {
        let d = self.domain;
        let value = self.value.clone();
        let mut out = Self::new(move |s| value(d.mirror(s)), d);
        for (k, df) in self.derivatives.iter().enumerate() {
            let df = df.clone();
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            out = out.push_derivative(move |s| sign * df(d.mirror(s)));
        }
        if let Some(bound) = self.bound.clone() {
            out = out.with_bound(move |p, lo, hi| bound(p, d.mirror(hi), d.mirror(lo)));
        }
        out
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    /// Number of analytic derivatives supplied.
    pub fn analytic_derivatives(&self) -> usize {
        self.derivatives.len()
    }

    pub fn has_analytic_bound(&self) -> bool {
        self.bound.is_some()
    }

    /// x′(t), analytic if available, otherwise a finite difference with
    /// step [`FIRST_DERIVATIVE_STEP`].
    pub fn first_derivative(&self, t: f64) -> f64 {
        match self.derivatives.first() {
            Some(df) => df(t),
            None => fd_first(&*self.value, t, FIRST_DERIVATIVE_STEP, self.domain),
        }
    }

    /// The k-th derivative x^(k)(t).
    pub fn derivative(&self, k: usize, t: f64) -> Result<f64> {
        if k == 0 {
            return Ok(self.value(t));
        }
        if k <= self.derivatives.len() {
            return Ok(self.derivatives[k - 1](t));
        }
        if k == 1 {
            return Ok(self.first_derivative(t));
        }
        let base_order = self.derivatives.len();
        let m = k - base_order;
        if m > MAX_NUMERIC_ORDER {
            return Err(Error::DerivativeUnavailable {
                order: k,
                reason: format!(
                    "{base_order} analytic derivatives supplied; finite differences reach at most {MAX_NUMERIC_ORDER} more orders"
                ),
            });
        }
        let base: &dyn Fn(f64) -> f64 = if base_order == 0 {
            &*self.value
        } else {
            &*self.derivatives[base_order - 1]
        };
        Ok(fd_order(base, m, t, self.domain))
    }

    /// max over [lo, hi] of |x^(p)|, analytic when a bound closure is
    /// attached, otherwise sampled on [`BOUND_SAMPLES`] points and scaled
    /// by [`BOUND_SAFETY`].
    pub fn derivative_bound(&self, p: usize, lo: f64, hi: f64) -> Result<(f64, BoundSource)> {
        if let Some(bound) = &self.bound {
            return Ok((bound(p, lo, hi), BoundSource::Analytic));
        }
        if hi <= lo {
            return Ok((self.derivative(p, lo)?.abs(), BoundSource::Estimated));
        }
        let h = (hi - lo) / (BOUND_SAMPLES - 1) as f64;
        let mut max = 0.0_f64;
        for i in 0..BOUND_SAMPLES {
            let t = if i == BOUND_SAMPLES - 1 {
                hi
            } else {
                lo + h * i as f64
            };
            let v = self.derivative(p, t)?.abs();
            if v.is_nan() {
                return Err(Error::Domain(format!(
                    "derivative of order {p} is NaN at {t}"
                )));
            }
            max = max.max(v);
        }
        Ok((max * BOUND_SAFETY, BoundSource::Estimated))
    }
}

/// m-th derivative by the binomial difference stencil, centred when the
/// stencil fits inside `domain` and shifted inward otherwise.
fn fd_order(f: &dyn Fn(f64) -> f64, m: usize, t: f64, domain: Interval) -> f64 {
    if m == 1 {
        return fd_first(f, t, FIRST_DERIVATIVE_STEP, domain);
    }
    let h = f64::EPSILON.powf(1.0 / (m as f64 + 2.0)) * t.abs().max(1.0);
    let half_width = 0.5 * m as f64 * h;
    let mut start = t - half_width;
    if start < domain.a {
        start = domain.a;
    }
    if start + 2.0 * half_width > domain.b {
        start = domain.b - 2.0 * half_width;
    }
    let mut acc = 0.0;
    let mut binom = 1.0;
    for j in 0..=m {
        let sign = if (m - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += sign * binom * f(start + j as f64 * h);
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    acc / h.powi(m as i32)
}
