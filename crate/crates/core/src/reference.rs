//! Ground-truth evaluators for the variable-order Caputo derivatives.
//!
//! Three routes are provided:
//!
//! * [`power_closed_form`]: exact values for `(t-a)^γ` (left) and `(b-t)^γ` (right).
//! * [`caputo_quadrature`]: adaptive quadrature of the defining integrals for
//!   any C¹ function. Type III is integrated directly; types I and II add the
//!   correction integrals that relate them to type III, so no outer `d/dt`
//!   of a singular integral is ever taken numerically.
//! * [`rl_from_caputo`]: Riemann–Liouville values from Caputo values plus the
//!   boundary terms.
//!
//! The kernel `|t-τ|^{-α(t)}` is removed by `u = |t-τ|^{1-α(t)}`, after which
//! every integrand is bounded on `[0, dist^{1-α}]`.

use std::fmt;

use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::order::{Interval, OrderFunction};
use crate::quadrature::{integrate, QuadratureOptions, DEFAULT_MAX_PANELS};
use crate::special::{digamma, gamma};

/// Default absolute tolerance of the quadrature evaluators.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Relative floor passed to the integrator so tiny `tol` values terminate
/// at roundoff instead of exhausting the panel budget.
const REL_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// +1 for left operators, −1 for right ones.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    /// Distance from the operator's base point: t − a or b − t.
    pub fn distance(self, domain: Interval, t: f64) -> f64 {
        match self {
            Side::Left => t - domain.a,
            Side::Right => domain.b - t,
        }
    }

    pub fn base_point(self, domain: Interval) -> f64 {
        match self {
            Side::Left => domain.a,
            Side::Right => domain.b,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    TypeI,
    TypeII,
    TypeIII,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::TypeI, Kind::TypeII, Kind::TypeIII];
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::TypeI => "I",
            Kind::TypeII => "II",
            Kind::TypeIII => "III",
        })
    }
}

/// One of the six variable-order Caputo operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperatorKind {
    pub kind: Kind,
    pub side: Side,
}

impl OperatorKind {
    pub const fn new(kind: Kind, side: Side) -> Self {
        Self { kind, side }
    }

    pub fn all() -> impl Iterator<Item = OperatorKind> {
        [Side::Left, Side::Right].into_iter().flat_map(|side| {
            Kind::ALL
                .into_iter()
                .map(move |kind| OperatorKind { kind, side })
        })
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type {} {}", self.kind, self.side)
    }
}

/// Riemann–Liouville operators with a Caputo counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlKind {
    TypeI,
    TypeII,
}

/// Distance from the base point after checking that `t` lies in `domain`.
pub(crate) fn checked_distance(domain: Interval, side: Side, t: f64) -> Result<f64> {
    if !t.is_finite() || !domain.contains(t) {
        return Err(Error::Domain(format!(
            "t = {t} outside [{}, {}]",
            domain.a, domain.b
        )));
    }
    Ok(side.distance(domain, t).max(0.0))
}

/// Frozen quantities of the substituted integrals at one evaluation point.
struct Substitution<'a> {
    x: &'a ScalarFunction,
    t: f64,
    side: Side,
    one_minus_alpha: f64,
    upper: f64,
}

impl Substitution<'_> {
    /// s = |t − τ| as a function of u.
    fn s(&self, u: f64) -> f64 {
        u.powf(1.0 / self.one_minus_alpha)
    }

    /// τ for a given s, clamped to the domain against roundoff in u ↦ s.
    fn tau(&self, s: f64) -> f64 {
        let d = self.x.domain();
        match self.side {
            Side::Left => (self.t - s).max(d.a),
            Side::Right => (self.t + s).min(d.b),
        }
    }

    /// x′(τ), with an integrable blow-up exactly at the base point read as 0.
    fn slope(&self, tau: f64) -> f64 {
        let v = self.x.first_derivative(tau);
        if v.is_finite() || tau != self.side.base_point(self.x.domain()) {
            v
        } else {
            0.0
        }
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F, tol: f64) -> Result<f64> {
        let opts = QuadratureOptions {
            abs_tol: tol,
            rel_tol: REL_FLOOR,
            max_panels: DEFAULT_MAX_PANELS,
        };
        Ok(integrate(f, 0.0, self.upper, opts)?.value)
    }

    /// (1 − α) ∫ |t−τ|^{-α} x′(τ) dτ over the operator range.
    fn kernel_derivative(&self, tol: f64) -> Result<f64> {
        self.integrate(|u| self.slope(self.tau(self.s(u))), tol)
    }

    /// ∫ |t−τ|^{1-α} x′(τ) [1/(1−α) − ln|t−τ|] dτ; here ln|t−τ| = ln(u)/(1−α).
    fn log_correction(&self, tol: f64) -> Result<f64> {
        let k = self.one_minus_alpha;
        self.integrate(
            |u| {
                if u == 0.0 {
                    return 0.0;
                }
                let s = self.s(u);
                s * self.slope(self.tau(s)) * (1.0 - u.ln()) / (k * k)
            },
            tol,
        )
    }

    /// (1 − α) ∫ |t−τ|^{-α} [x(τ) − x(base)] dτ.
    fn kernel_value(&self, base_value: f64, tol: f64) -> Result<f64> {
        self.integrate(|u| self.x.value(self.tau(self.s(u))) - base_value, tol)
    }
}

/// Evaluates one of the six Caputo derivatives by quadrature to absolute
/// accuracy about `tol`. Returns exactly 0 at the operator's base point.
pub fn caputo_quadrature(
    op: OperatorKind,
    x: &ScalarFunction,
    order: &OrderFunction,
    t: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let domain = x.domain();
    let dist = checked_distance(domain, op.side, t)?;
    if dist == 0.0 {
        return Ok(0.0);
    }
    let alpha = order.alpha(t);
    let one_minus_alpha = 1.0 - alpha;
    let g2 = gamma(2.0 - alpha)?;
    let sub = Substitution {
        x,
        t,
        side: op.side,
        one_minus_alpha,
        upper: dist.powf(one_minus_alpha),
    };
    let sigma = op.side.sign();

    // same split for every kind so that α′ ≡ 0 reproduces type III bitwise
    let parts = 3.0;
    let part_tol = |prefactor: f64| {
        if prefactor == 0.0 {
            tol
        } else {
            tol / (parts * prefactor.abs())
        }
    };

    let type3_factor = sigma / g2;
    let type3 = type3_factor * sub.kernel_derivative(part_tol(type3_factor))?;
    if op.kind == Kind::TypeIII {
        return Ok(type3);
    }

    let alpha_prime = order.alpha_prime(t);
    if alpha_prime == 0.0 {
        return Ok(type3);
    }
    let corr_factor = alpha_prime / g2;
    let type1 = type3 + corr_factor * sub.log_correction(part_tol(corr_factor))?;
    if op.kind == Kind::TypeI {
        return Ok(type1);
    }

    let psi_factor = sigma * alpha_prime * digamma(one_minus_alpha)? / g2;
    let base_value = x.value(op.side.base_point(domain));
    Ok(type1 + psi_factor * sub.kernel_value(base_value, part_tol(psi_factor))?)
}

pub fn caputo_type1_quadrature(
    x: &ScalarFunction,
    order: &OrderFunction,
    t: f64,
    side: Side,
    tol: f64,
) -> Result<f64> {
    caputo_quadrature(OperatorKind::new(Kind::TypeI, side), x, order, t, tol)
}

pub fn caputo_type2_quadrature(
    x: &ScalarFunction,
    order: &OrderFunction,
    t: f64,
    side: Side,
    tol: f64,
) -> Result<f64> {
    caputo_quadrature(OperatorKind::new(Kind::TypeII, side), x, order, t, tol)
}

pub fn caputo_type3_quadrature(
    x: &ScalarFunction,
    order: &OrderFunction,
    t: f64,
    side: Side,
    tol: f64,
) -> Result<f64> {
    caputo_quadrature(OperatorKind::new(Kind::TypeIII, side), x, order, t, tol)
}

/// Exact derivative of `(t-a)^γ` (left operators) or `(b-t)^γ` (right
/// operators), with `[a, b]` taken from the order's domain.
pub fn power_closed_form(
    op: OperatorKind,
    gamma_exp: f64,
    order: &OrderFunction,
    t: f64,
) -> Result<f64> {
    if !(gamma_exp > 0.0 && gamma_exp.is_finite()) {
        return Err(Error::Domain(format!(
            "power exponent must be positive, got {gamma_exp}"
        )));
    }
    let dist = checked_distance(order.domain(), op.side, t)?;
    if dist == 0.0 {
        return Ok(0.0);
    }
    let alpha = order.alpha(t);
    let g_num = gamma(gamma_exp + 1.0)?;
    let type3 = g_num / gamma(gamma_exp - alpha + 1.0)? * dist.powf(gamma_exp - alpha);
    if op.kind == Kind::TypeIII {
        return Ok(type3);
    }
    let alpha_prime = order.alpha_prime(t);
    let corr =
        alpha_prime * g_num / gamma(gamma_exp - alpha + 2.0)? * dist.powf(gamma_exp - alpha + 1.0);
    let mut bracket = dist.ln() - digamma(gamma_exp - alpha + 2.0)?;
    if op.kind == Kind::TypeI {
        bracket += digamma(1.0 - alpha)?;
    }
    Ok(type3 - op.side.sign() * corr * bracket)
}

/// Converts a Caputo value to the matching Riemann–Liouville value by adding
/// the boundary terms generated by `x(a)` (left) or `x(b)` (right).
pub fn rl_from_caputo(
    kind: RlKind,
    side: Side,
    caputo_value: f64,
    boundary_value: f64,
    order: &OrderFunction,
    t: f64,
) -> Result<f64> {
    let dist = checked_distance(order.domain(), side, t)?;
    if boundary_value == 0.0 {
        return Ok(caputo_value);
    }
    if dist == 0.0 {
        return Err(Error::Singularity(t));
    }
    let alpha = order.alpha(t);
    let alpha_prime = order.alpha_prime(t);
    let c = match kind {
        RlKind::TypeI => 1.0 / (1.0 - alpha),
        RlKind::TypeII => digamma(2.0 - alpha)?,
    };
    let jump = boundary_value / gamma(1.0 - alpha)? * dist.powf(-alpha);
    let drift = boundary_value * alpha_prime / gamma(2.0 - alpha)?
        * dist.powf(1.0 - alpha)
        * (c - dist.ln());
    Ok(caputo_value + jump + side.sign() * drift)
}
