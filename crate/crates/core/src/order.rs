//! The variable fractional order α(t) and its derivative α′(t).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub(crate) type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Margin kept between α(t) and the ends of (0, 1).
pub const ADMISSIBILITY_MARGIN: f64 = 1e-9;

/// Step of the central difference used for numeric α′ and for the
/// consistency check against a supplied α′.
pub const ORDER_FD_STEP: f64 = 1e-6;

/// Allowed gap between the supplied α′ and its finite-difference estimate.
pub const ORDER_FD_TOLERANCE: f64 = 1e-5;

/// A closed interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.a && t <= self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    /// Reflection t ↦ a + b − t.
    pub fn mirror(&self, t: f64) -> f64 {
        self.a + self.b - t
    }

    /// `points` uniformly spaced nodes including both ends.
    pub fn linspace(&self, points: usize) -> Vec<f64> {
        match points {
            0 => Vec::new(),
            1 => vec![self.a],
            _ => {
                let h = self.len() / (points - 1) as f64;
                (0..points)
                    .map(|i| {
                        if i == points - 1 {
                            self.b
                        } else {
                            self.a + h * i as f64
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Where α′ came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeSource {
    Analytic,
    Numeric,
}

/// A fractional order α(t) ∈ (0, 1) on an interval, with its derivative.
///
/// Immutable once built; cloning shares the underlying closures.
#[derive(Clone)]
pub struct OrderFunction {
    alpha: RealFn,
    alpha_prime: RealFn,
    domain: Interval,
    source: DerivativeSource,
    /// α′ is identically zero (constant order).
    constant: bool,
}

impl fmt::Debug for OrderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrderFunction")
            .field("domain", &self.domain)
            .field("source", &self.source)
            .field("constant", &self.constant)
            .finish_non_exhaustive()
    }
}

impl OrderFunction {
    /// α(t) = c1·t + c0, α′(t) = c1. Fails if the range leaves (0, 1).
    pub fn affine(c1: f64, c0: f64, domain: Interval) -> Result<Self> {
        if !(c1.is_finite() && c0.is_finite()) {
            return Err(Error::Admissibility(format!(
                "non-finite coefficients ({c1}, {c0})"
            )));
        }
        for t in [domain.a, domain.b] {
            let v = c1 * t + c0;
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Admissibility(format!(
                    "alpha({t}) = {v} is outside (0, 1)"
                )));
            }
        }
        Ok(Self {
            alpha: Arc::new(move |t| c1 * t + c0),
            alpha_prime: Arc::new(move |_| c1),
            domain,
            source: DerivativeSource::Analytic,
            constant: c1 == 0.0,
        })
    }

    /// Constant order α(t) ≡ value.
    pub fn constant(value: f64, domain: Interval) -> Result<Self> {
        Self::affine(0.0, value, domain)
    }

    /// Generic constructor from α and an analytic α′.
    pub fn new<F, G>(alpha: F, alpha_prime: G, domain: Interval) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            alpha: Arc::new(alpha),
            alpha_prime: Arc::new(alpha_prime),
            domain,
            source: DerivativeSource::Analytic,
            constant: false,
        }
    }

    /// Builds α′ by central differences with step [`ORDER_FD_STEP`]
    /// (one-sided within `ORDER_FD_STEP` of an endpoint).
    pub fn with_numeric_derivative<F>(alpha: F, domain: Interval) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let alpha: RealFn = Arc::new(alpha);
        let inner = alpha.clone();
        let alpha_prime = move |t: f64| fd_first(&*inner, t, ORDER_FD_STEP, domain);
        Self {
            alpha,
            alpha_prime: Arc::new(alpha_prime),
            domain,
            source: DerivativeSource::Numeric,
            constant: false,
        }
    }

    pub fn alpha(&self, t: f64) -> f64 {
        (self.alpha)(t)
    }

    pub fn alpha_prime(&self, t: f64) -> f64 {
        if self.constant {
            0.0
        } else {
            (self.alpha_prime)(t)
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        self.source
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    /// The reflected order s ↦ α(a + b − s), whose derivative is −α′(a + b − s).
    pub fn mirrored(&self) -> Self {
        let d = self.domain;
        let alpha = self.alpha.clone();
        let alpha_prime = self.alpha_prime.clone();
        Self {
            alpha: Arc::new(move |s| alpha(d.mirror(s))),
            alpha_prime: Arc::new(move |s| -alpha_prime(d.mirror(s))),
            domain: d,
            source: self.source,
            constant: self.constant,
        }
    }

    /// Returns true iff α stays in (ε, 1 − ε) on `grid_points` uniform nodes
    /// and the supplied α′ agrees with a finite difference of α there.
    pub fn check_admissible(&self, grid_points: usize) -> bool {
        if grid_points < 2 {
            return false;
        }
        self.domain.linspace(grid_points).into_iter().all(|t| {
            let a = self.alpha(t);
            let in_range = a > ADMISSIBILITY_MARGIN && a < 1.0 - ADMISSIBILITY_MARGIN;
            let fd = fd_first(&*self.alpha, t, ORDER_FD_STEP, self.domain);
            in_range && (fd - self.alpha_prime(t)).abs() <= ORDER_FD_TOLERANCE
        })
    }

    /// Like [`check_admissible`](Self::check_admissible) but reports why.
    pub fn validate(&self, grid_points: usize) -> Result<()> {
        if self.check_admissible(grid_points) {
            Ok(())
        } else {
            Err(Error::Admissibility(format!(
                "alpha leaves ({ADMISSIBILITY_MARGIN:e}, 1 - {ADMISSIBILITY_MARGIN:e}) or alpha' is inconsistent on {grid_points} points of [{}, {}]",
                self.domain.a, self.domain.b
            )))
        }
    }
}

/// First derivative by central difference, switched to one-sided within `h`
/// of the ends of `domain`.
pub(crate) fn fd_first(f: &dyn Fn(f64) -> f64, t: f64, h: f64, domain: Interval) -> f64 {
    if t - h < domain.a {
        (f(t + h) - f(t)) / h
    } else if t + h > domain.b {
        (f(t) - f(t - h)) / h
    } else {
        (f(t + h) - f(t - h)) / (2.0 * h)
    }
}
