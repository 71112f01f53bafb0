//! Integer-order expansions of the variable-order Caputo operators.
//!
//! Each operator is replaced by a finite sum of classical derivatives
//! `x^(p)(t)` and moment integrals of `x′`, truncated at `N` terms, with an
//! explicit bound on the truncation error.
//!
//! Left moments are `V_p(t) = ∫_a^t (τ − a)^{p−n} x′(τ) dτ` and right moments
//! `W_p(t) = ∫_t^b (b − τ)^{p−n} x′(τ) dτ`. Internally they are stored
//! normalized by `dist^{p−n}`, which keeps every stored value of the same
//! magnitude as `dist·max|x′|` no matter how large `p` gets.

use crate::error::{Error, Result};
use crate::function::{BoundSource, ScalarFunction};
use crate::order::OrderFunction;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::reference::{checked_distance, Kind, OperatorKind, Side};
use crate::special::{digamma, gamma, signed_binomial};

/// Highest `n` for which classical derivatives may come from finite
/// differences.
pub const MAX_NUMERIC_N: usize = 3;

/// The expansion depth: `n` classical derivatives, truncation at `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionParams {
    n: usize,
    big_n: usize,
}

impl ExpansionParams {
    /// Requires `N >= n >= 1`.
    pub fn new(n: usize, big_n: usize) -> Result<Self> {
        if n == 0 || big_n < n {
            return Err(Error::InvalidParams { n, big_n });
        }
        Ok(Self { n, big_n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The truncation index `N`.
    pub fn big_n(&self) -> usize {
        self.big_n
    }

    /// Highest moment index the type I/II corrections read, `n + 2N`.
    pub fn max_moment(&self) -> usize {
        self.n + 2 * self.big_n
    }
}

/// Expansion coefficients at one value of α.
///
/// For the left side these are `A_p` (p = 1..n) and `B_p` (p = n..N); for the
/// right side `C_p = (−1)^p A_p` and `D_p = −B_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients {
    pub side: Side,
    pub params: ExpansionParams,
    pub alpha: f64,
    derivative_terms: Vec<f64>,
    moment_terms: Vec<f64>,
}

impl ExpansionCoefficients {
    /// Coefficient of `dist^{p−α} x^(p)(t)`, for `1 <= p <= n`.
    pub fn derivative_coeff(&self, p: usize) -> f64 {
        assert!(
            (1..=self.params.n).contains(&p),
            "p = {p} outside 1..={}",
            self.params.n
        );
        self.derivative_terms[p - 1]
    }

    /// Coefficient of `dist^{n−p−α}` times the p-th moment, for `n <= p <= N`.
    pub fn moment_coeff(&self, p: usize) -> f64 {
        let n = self.params.n;
        assert!(
            (n..=self.params.big_n).contains(&p),
            "p = {p} outside {n}..={}",
            self.params.big_n
        );
        self.moment_terms[p - n]
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Admissibility(format!(
            "alpha = {alpha} is outside (0, 1)"
        )))
    }
}

/// `A_p` and `B_p` for the left operators.
///
/// `Γ(α−p+k) / (Γ(α−p) k!)` is the signed binomial of `p − α`, and
/// `Γ(α+k) / (Γ(α) k!)` that of `−α`, so both are built from
/// [`signed_binomial`] products rather than Gamma quotients.
pub fn coefficients_left(alpha: f64, params: ExpansionParams) -> Result<ExpansionCoefficients> {
    check_alpha(alpha)?;
    let (n, big_n) = (params.n, params.big_n);

    let mut derivative_terms = Vec::with_capacity(n);
    for p in 1..=n {
        let nu = p as f64 - alpha;
        // l = n−p+1..N  ⇔  k = l−n+p = 1..N−n+p
        let mut acc = Neumaier::new(1.0);
        for k in 1..=(big_n - n + p) {
            acc.add(signed_binomial(nu, k)?);
        }
        derivative_terms.push(acc.sum() / gamma(p as f64 + 1.0 - alpha)?);
    }

    let inv_gamma = 1.0 / gamma(1.0 - alpha)?;
    let moment_terms = (n..=big_n)
        .map(|p| signed_binomial(-alpha, p - n).map(|c| c * inv_gamma))
        .collect::<Result<Vec<_>>>()?;

    Ok(ExpansionCoefficients {
        side: Side::Left,
        params,
        alpha,
        derivative_terms,
        moment_terms,
    })
}

/// `C_p = (−1)^p A_p` and `D_p = −B_p` for the right operators.
pub fn coefficients_right(alpha: f64, params: ExpansionParams) -> Result<ExpansionCoefficients> {
    let mut c = coefficients_left(alpha, params)?;
    for (i, v) in c.derivative_terms.iter_mut().enumerate() {
        // index i holds p = i + 1
        if i % 2 == 0 {
            *v = -*v;
        }
    }
    for v in &mut c.moment_terms {
        *v = -*v;
    }
    c.side = Side::Right;
    Ok(c)
}

pub fn coefficients(
    alpha: f64,
    side: Side,
    params: ExpansionParams,
) -> Result<ExpansionCoefficients> {
    match side {
        Side::Left => coefficients_left(alpha, params),
        Side::Right => coefficients_right(alpha, params),
    }
}

/// Moments `V_p` (left) or `W_p` (right) for `p = n..=p_max` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub side: Side,
    pub n: usize,
    pub dist: f64,
    normalized: Vec<f64>,
}

impl MomentVector {
    pub fn p_max(&self) -> usize {
        self.n + self.normalized.len() - 1
    }

    /// The moment `V_p` (or `W_p`) itself.
    pub fn get(&self, p: usize) -> f64 {
        self.normalized(p) * self.dist.powi((p - self.n) as i32)
    }

    /// `V_p / dist^{p−n}`.
    pub fn normalized(&self, p: usize) -> f64 {
        assert!(
            p >= self.n && p <= self.p_max(),
            "moment index {p} out of range"
        );
        self.normalized[p - self.n]
    }
}

/// Moments of `x′` at `t` by adaptive quadrature, each to absolute accuracy
/// `tol` in normalized form.
pub fn moments(
    x: &ScalarFunction,
    side: Side,
    t: f64,
    params: ExpansionParams,
    p_max: usize,
    tol: f64,
) -> Result<MomentVector> {
    if p_max < params.big_n {
        return Err(Error::Domain(format!(
            "p_max = {p_max} is below N = {}",
            params.big_n
        )));
    }
    let domain = x.domain();
    let dist = checked_distance(domain, side, t)?;
    let n = params.n;
    let count = p_max - n + 1;
    if dist == 0.0 {
        return Ok(MomentVector {
            side,
            n,
            dist,
            normalized: vec![0.0; count],
        });
    }
    let base = side.base_point(domain);
    let opts = QuadratureOptions::absolute(tol).with_rel_tol(1e-14);
    let mut normalized = Vec::with_capacity(count);
    for k in 0..count {
        let k = k as i32;
        // ((τ − a)/dist)^k x′(τ) on the left, ((b − τ)/dist)^k x′(τ) on the right
        let integrand = |tau: f64| ((tau - base).abs() / dist).powi(k) * x.first_derivative(tau);
        let (lo, hi) = match side {
            Side::Left => (base, t),
            Side::Right => (t, base),
        };
        normalized.push(integrate(integrand, lo, hi, opts)?.value);
    }
    Ok(MomentVector {
        side,
        n,
        dist,
        normalized,
    })
}

/// Maxima `L_p` (or `M_p` on the right) of `|x^(p)|` over the integration range.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DerivativeBound {
    values: Vec<Option<f64>>,
    pub source: Option<BoundSource>,
}

impl DerivativeBound {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `L_p`. Negative inputs are rejected.
    pub fn with(mut self, p: usize, value: f64) -> Result<Self> {
        if !(value >= 0.0) {
            return Err(Error::Domain(format!(
                "L_{p} = {value} must be non-negative"
            )));
        }
        if self.values.len() <= p {
            self.values.resize(p + 1, None);
        }
        self.values[p] = Some(value);
        Ok(self)
    }

    pub fn get(&self, p: usize) -> Option<f64> {
        self.values.get(p).copied().flatten()
    }

    fn require(&self, p: usize) -> Result<f64> {
        self.get(p).ok_or(Error::MissingBound(p))
    }

    /// Collects `L_p` for each `p` in `orders` over the range between the
    /// base point of `side` and `t`.
    pub fn for_function(x: &ScalarFunction, side: Side, t: f64, orders: &[usize]) -> Result<Self> {
        let domain = x.domain();
        let (lo, hi) = match side {
            Side::Left => (domain.a, t),
            Side::Right => (t, domain.b),
        };
        let mut out = Self::new();
        let mut source: Option<BoundSource> = None;
        for &p in orders {
            let (v, s) = x.derivative_bound(p, lo, hi)?;
            out = out.with(p, v)?;
            source = Some(source.map_or(s, |prev| prev.combine(s)));
        }
        out.source = source;
        Ok(out)
    }
}

/// Constant multiplying `L · dist^{m+1−α} / N^{m−α}` in the truncation bounds,
/// with `m − α` passed as `e`.
fn bound_factor(e: f64) -> Result<f64> {
    Ok((e * e + e).exp() / (gamma(e + 1.0)? * e))
}

/// `1/(1−α)` for type I, `Ψ(2−α)` for type II.
fn log_shift(kind: Kind, alpha: f64) -> Result<f64> {
    match kind {
        Kind::TypeI => Ok(1.0 / (1.0 - alpha)),
        Kind::TypeII => digamma(2.0 - alpha),
        Kind::TypeIII => Ok(0.0),
    }
}

/// The truncation-error bound for `op`, evaluated exactly as stated.
///
/// Uses `L_{n+1}` for every kind and additionally `L_1` for types I and II.
pub fn error_bound(
    op: OperatorKind,
    params: ExpansionParams,
    alpha: f64,
    alpha_prime: f64,
    dist: f64,
    bounds: &DerivativeBound,
) -> Result<f64> {
    check_alpha(alpha)?;
    if !(dist >= 0.0) {
        return Err(Error::Domain(format!(
            "distance {dist} must be non-negative"
        )));
    }
    let n = params.n as f64;
    let big_n = params.big_n as f64;
    let l_high = bounds.require(params.n + 1)?;
    let l_one = match op.kind {
        Kind::TypeIII => 0.0,
        _ => bounds.require(1)?,
    };
    if dist == 0.0 {
        return Ok(0.0);
    }

    let e = n - alpha;
    let mut bound = l_high * bound_factor(e)? / big_n.powf(e) * dist.powf(n + 1.0 - alpha);
    if op.kind != Kind::TypeIII {
        let e1 = 1.0 - alpha;
        let shift = log_shift(op.kind, alpha)?;
        bound += alpha_prime.abs() * l_one * bound_factor(e1)? / big_n.powf(e1)
            * ((shift - dist.ln()).abs() + 1.0 / big_n)
            * dist.powf(2.0 - alpha);
    }
    Ok(bound)
}

/// An approximate operator value with its certified error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub value: f64,
    pub error_bound: f64,
    pub params: ExpansionParams,
    pub bound_source: BoundSource,
}

/// Expansion of the operator `op` applied to `x` at `t`; moments are
/// integrated to absolute accuracy `tol`.
pub fn approximate(
    op: OperatorKind,
    x: &ScalarFunction,
    order: &OrderFunction,
    t: f64,
    params: ExpansionParams,
    tol: f64,
) -> Result<ApproxResult> {
    let n = params.n;
    if n > MAX_NUMERIC_N && x.analytic_derivatives() < n {
        return Err(Error::DerivativeUnavailable {
            order: n,
            reason: format!(
                "n > {MAX_NUMERIC_N} requires analytic derivatives up to order n ({} supplied)",
                x.analytic_derivatives()
            ),
        });
    }
    let side = op.side;
    let dist = checked_distance(x.domain(), side, t)?;
    if dist == 0.0 {
        return Ok(ApproxResult {
            value: 0.0,
            error_bound: 0.0,
            params,
            bound_source: BoundSource::Analytic,
        });
    }

    let alpha = order.alpha(t);
    let alpha_prime = order.alpha_prime(t);
    let coeffs = coefficients(alpha, side, params)?;
    let with_correction = op.kind != Kind::TypeIII && alpha_prime != 0.0;
    let p_max = if with_correction {
        params.max_moment()
    } else {
        params.big_n
    };
    let m = moments(x, side, t, params, p_max, tol)?;

    let mut acc = Neumaier::new(0.0);
    for p in 1..=n {
        acc.add(coeffs.derivative_coeff(p) * dist.powf(p as f64 - alpha) * x.derivative(p, t)?);
    }
    let scale = dist.powf(-alpha);
    for p in n..=params.big_n {
        acc.add(coeffs.moment_coeff(p) * scale * m.normalized(p));
    }
    let mut value = acc.sum();

    if with_correction {
        value += correction(op.kind, alpha, alpha_prime, dist, params, &m)?;
    }

    let orders: &[usize] = if op.kind == Kind::TypeIII {
        &[n + 1]
    } else {
        &[1, n + 1]
    };
    let bounds = DerivativeBound::for_function(x, side, t, orders)?;
    let error_bound = error_bound(op, params, alpha, alpha_prime, dist, &bounds)?;
    let bound_source = bounds.source.unwrap_or(BoundSource::Analytic);
    Ok(ApproxResult {
        value,
        error_bound,
        params,
        bound_source,
    })
}

/// The α′ term added to the type III expansion for types I and II.
fn correction(
    kind: Kind,
    alpha: f64,
    alpha_prime: f64,
    dist: f64,
    params: ExpansionParams,
    m: &MomentVector,
) -> Result<f64> {
    let (n, big_n) = (params.n, params.big_n);
    let nu = 1.0 - alpha;
    let mut single = Neumaier::new(0.0);
    let mut double = Neumaier::new(0.0);
    for p in 0..=big_n {
        let c = signed_binomial(nu, p)?;
        single.add(c * m.normalized(n + p));
        for r in 1..=big_n {
            double.add(c * m.normalized(n + p + r) / r as f64);
        }
    }
    let bracket = (log_shift(kind, alpha)? - dist.ln()) * single.sum() + double.sum();
    Ok(alpha_prime * dist.powf(nu) / gamma(2.0 - alpha)? * bracket)
}

pub fn approx_type1(
    x: &ScalarFunction,
    order: &OrderFunction,
    t: f64,
    side: Side,
    params: ExpansionParams,
    tol: f64,
) -> Result<ApproxResult> {
    approximate(
        OperatorKind::new(Kind::TypeI, side),
        x,
        order,
        t,
        params,
        tol,
    )
}

pub fn approx_type2(
    x: &ScalarFunction,
    order: &OrderFunction,
    t: f64,
    side: Side,
    params: ExpansionParams,
    tol: f64,
) -> Result<ApproxResult> {
    approximate(
        OperatorKind::new(Kind::TypeII, side),
        x,
        order,
        t,
        params,
        tol,
    )
}

pub fn approx_type3(
    x: &ScalarFunction,
    order: &OrderFunction,
    t: f64,
    side: Side,
    params: ExpansionParams,
    tol: f64,
) -> Result<ApproxResult> {
    approximate(
        OperatorKind::new(Kind::TypeIII, side),
        x,
        order,
        t,
        params,
        tol,
    )
}

/// Compensated summation (Neumaier's variant of Kahan).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn new(start: f64) -> Self {
        Self {
            sum: start,
            comp: 0.0,
        }
    }

    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}
