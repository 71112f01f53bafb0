//! Method-of-lines solvers for two time-fractional PDEs on `[0, 1] × [t0, 1]`.
//!
//! The type III left time derivative is replaced by its `n = 1` expansion,
//!
//! ```text
//! A t^{1−α} u_t + Σ_{p=1}^{N} B_p t^{1−p−α} V_p,    V_p′ = t^{p−1} u_t,
//! ```
//!
//! which is solved for `u_t` and marched with an adaptive Runge–Kutta pair.
//! The state carries `m_p = V_p / t^{p−1}` in place of `V_p`; both obey the
//! same definition, but `m_p` stays of the size of `u` while `V_p` shrinks
//! like `t^{p+1}` and would need a per-component tolerance.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expansion::{coefficients_left, ExpansionParams};
use crate::ode::{self, OdeOptions, OdeStats};
use crate::order::OrderFunction;
use crate::special::gamma;

/// Relative tolerance of the time stepper.
pub const STEPPER_RTOL: f64 = 1e-8;
/// Absolute tolerance of the time stepper.
pub const STEPPER_ATOL: f64 = 1e-12;
/// Default start time replacing the degenerate `t = 0`.
pub const DEFAULT_T0: f64 = 1e-4;
/// Points on `[t0, 1]` at which the `u_t` coefficient is checked.
const GUARD_SAMPLES: usize = 1001;

type SourceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Uniform space nodes on `[0, 1]` and output times on `[t0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    mx: usize,
    mt: usize,
    t0: f64,
}

impl Grid1D {
    pub fn new(mx: usize, mt: usize, t0: f64) -> Result<Self> {
        if mx < 4 || mt < 4 {
            return Err(Error::Grid(format!(
                "need Mx >= 4 and Mt >= 4 (got {mx}, {mt})"
            )));
        }
        if !(t0 > 0.0) {
            return Err(Error::Degenerate(format!(
                "t0 = {t0}: the u_t coefficient vanishes at t = 0"
            )));
        }
        if !(t0 < 1.0) {
            return Err(Error::Grid(format!("t0 = {t0} must be below 1")));
        }
        Ok(Self { mx, mt, t0 })
    }

    pub fn mx(&self) -> usize {
        self.mx
    }

    pub fn mt(&self) -> usize {
        self.mt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn hx(&self) -> f64 {
        1.0 / self.mx as f64
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..=self.mx).map(|i| i as f64 / self.mx as f64).collect()
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        let h = (1.0 - self.t0) / self.mt as f64;
        (0..=self.mt)
            .map(|j| {
                if j == self.mt {
                    1.0
                } else {
                    self.t0 + h * j as f64
                }
            })
            .collect()
    }
}

/// `D^α u − u_xx = f` with `u(x, 0) = g(x)` and `u(0, t) = u(1, t) = 0`.
#[derive(Clone)]
pub struct DiffusionProblem {
    pub order: OrderFunction,
    pub big_n: usize,
    f: SourceFn,
    g: ProfileFn,
}

impl DiffusionProblem {
    pub fn new<F, G>(order: OrderFunction, big_n: usize, f: F, g: G) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ExpansionParams::new(1, big_n)?;
        for x in [0.0, 1.0] {
            if g(x) != 0.0 {
                return Err(Error::Domain(format!(
                    "initial profile must vanish at x = {x} (got {})",
                    g(x)
                )));
            }
        }
        Ok(Self {
            order,
            big_n,
            f: Arc::new(f),
            g: Arc::new(g),
        })
    }

    pub fn source(&self, x: f64, t: f64) -> f64 {
        (self.f)(x, t)
    }

    pub fn initial(&self, x: f64) -> f64 {
        (self.g)(x)
    }
}

/// `t² sin(2πx)`, the exact solution of [`manufactured_diffusion`].
pub fn diffusion_exact(x: f64, t: f64) -> f64 {
    t * t * (2.0 * PI * x).sin()
}

/// The problem whose solution is `t² sin(2πx)`:
/// `f = (2 t^{2−α}/Γ(3−α) + 4π² t²) sin(2πx)`, `g = 0`.
pub fn manufactured_diffusion(order: OrderFunction, big_n: usize) -> Result<DiffusionProblem> {
    let o = order.clone();
    let f = move |x: f64, t: f64| {
        let alpha = o.alpha(t);
        let frac = 2.0 / gamma(3.0 - alpha).unwrap_or(f64::NAN) * t.powf(2.0 - alpha);
        (frac + 4.0 * PI * PI * t * t) * (2.0 * PI * x).sin()
    };
    DiffusionProblem::new(order, big_n, f, |_| 0.0)
}

/// `x² + t²`, the exact solution of the Burgers problem.
pub fn burgers_exact(x: f64, t: f64) -> f64 {
    x * x + t * t
}

/// External force `2 t^{2−α}/Γ(3−α) + 2x − 2` of the Burgers problem.
pub fn burgers_force(order: &OrderFunction, x: f64, t: f64) -> Result<f64> {
    let alpha = order.alpha(t);
    Ok(2.0 * t.powf(2.0 - alpha) / gamma(3.0 - alpha)? + 2.0 * x - 2.0)
}

/// A space–time solution: `u` and the moments `V_p`, `p = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub big_n: usize,
    u: Vec<f64>,
    moments: Vec<Vec<f64>>,
    /// Free-form `key = value` notes about how the field was produced.
    pub metadata: Vec<(String, String)>,
    pub stats: OdeStats,
}

impl Field2D {
    fn index(&self, i: usize, j: usize) -> usize {
        j * self.x.len() + i
    }

    /// u at space node `i`, time node `j`.
    pub fn u(&self, i: usize, j: usize) -> f64 {
        self.u[self.index(i, j)]
    }

    /// `V_p` at space node `i`, time node `j`, for `1 <= p <= N`.
    pub fn moment(&self, p: usize, i: usize, j: usize) -> f64 {
        assert!(
            (1..=self.big_n).contains(&p),
            "moment index {p} outside 1..={}",
            self.big_n
        );
        self.moments[p - 1][self.index(i, j)]
    }

    /// The row of `u` at time node `j`.
    pub fn u_row(&self, j: usize) -> &[f64] {
        let m = self.x.len();
        &self.u[j * m..(j + 1) * m]
    }

    /// Builds a field from samples `u(x_i, t_j)` with zero moments.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(x: Vec<f64>, t: Vec<f64>, f: F) -> Self {
        let u = t
            .iter()
            .flat_map(|&tj| x.iter().map(move |&xi| (xi, tj)))
            .map(|(xi, tj)| f(xi, tj))
            .collect();
        Self {
            x,
            t,
            big_n: 0,
            u,
            moments: Vec::new(),
            metadata: Vec::new(),
            stats: OdeStats::default(),
        }
    }
}

/// max over all grid nodes of `|u − exact|`.
pub fn field_error<F: Fn(f64, f64) -> f64>(field: &Field2D, exact: F) -> f64 {
    let mut max = 0.0_f64;
    for (j, &t) in field.t.iter().enumerate() {
        for (i, &x) in field.x.iter().enumerate() {
            max = max.max((field.u(i, j) - exact(x, t)).abs());
        }
    }
    max
}

/// Dirichlet data at one end: value and time derivative.
type BoundaryFn = Box<dyn Fn(f64) -> (f64, f64)>;

/// The semi-discrete system shared by both problems.
struct MethodOfLines<'a> {
    order: &'a OrderFunction,
    params: ExpansionParams,
    x: Vec<f64>,
    hx: f64,
    advection: f64,
    source: Box<dyn Fn(f64, f64) -> Result<f64> + 'a>,
    left: BoundaryFn,
    right: BoundaryFn,
}

impl MethodOfLines<'_> {
    /// A_1 t^{1−α(t)}, the coefficient of u_t.
    fn time_coefficient(&self, t: f64) -> Result<(f64, Vec<f64>)> {
        let alpha = self.order.alpha(t);
        let c = coefficients_left(alpha, self.params)?;
        let b = (1..=self.params.big_n())
            .map(|p| c.moment_coeff(p))
            .collect();
        Ok((c.derivative_coeff(1) * t.powf(1.0 - alpha), b))
    }

    fn check_coefficient(&self, t0: f64) -> Result<()> {
        for k in 0..GUARD_SAMPLES {
            let t = t0 + (1.0 - t0) * k as f64 / (GUARD_SAMPLES - 1) as f64;
            let (a, _) = self.time_coefficient(t)?;
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Degenerate(format!("A t^(1-alpha) = {a} at t = {t}")));
            }
        }
        Ok(())
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let m = self.x.len();
        let big_n = self.params.big_n();
        let (a, b) = self.time_coefficient(t)?;
        if !(a > 0.0) {
            return Err(Error::Degenerate(format!("A t^(1-alpha) = {a} at t = {t}")));
        }
        let t_alpha = t.powf(-self.order.alpha(t));
        let (u, moments) = y.split_at(m);
        let (du, dmoments) = dy.split_at_mut(m);

        du[0] = self.left.as_ref()(t).1;
        du[m - 1] = self.right.as_ref()(t).1;
        let h2 = self.hx * self.hx;
        for i in 1..m - 1 {
            let uxx = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / h2;
            let ux = (u[i + 1] - u[i - 1]) / (2.0 * self.hx);
            let mut history = 0.0;
            for p in 0..big_n {
                history += b[p] * moments[p * m + i];
            }
            let rest = (self.source)(self.x[i], t)? + uxx - self.advection * ux - t_alpha * history;
            du[i] = rest / a;
        }
        for p in 0..big_n {
            let shift = p as f64 / t;
            for i in 0..m {
                dmoments[p * m + i] = du[i] - shift * moments[p * m + i];
            }
        }
        Ok(())
    }

    fn solve(&self, grid: &Grid1D, initial: &dyn Fn(f64) -> f64) -> Result<Field2D> {
        self.check_coefficient(grid.t0())?;
        let m = self.x.len();
        let big_n = self.params.big_n();
        let t_nodes = grid.t_nodes();

        let mut y0 = vec![0.0; m * (big_n + 1)];
        for (i, &x) in self.x.iter().enumerate() {
            y0[i] = initial(x);
        }
        let opts = OdeOptions {
            rtol: STEPPER_RTOL,
            atol: STEPPER_ATOL,
            ..OdeOptions::default()
        };
        let (states, stats) = ode::integrate(|t, y, dy| self.rhs(t, y, dy), &y0, &t_nodes, opts)?;

        let mut u = Vec::with_capacity(m * t_nodes.len());
        let mut moments = vec![Vec::with_capacity(m * t_nodes.len()); big_n];
        for (state, &t) in states.iter().zip(&t_nodes) {
            u.extend_from_slice(&state[..m]);
            for (p, field) in moments.iter_mut().enumerate() {
                let scale = t.powi(p as i32);
                field.extend(state[(p + 1) * m..(p + 2) * m].iter().map(|v| v * scale));
            }
        }
        let metadata = vec![
            ("t0".to_string(), format!("{:e}", grid.t0())),
            ("N".to_string(), big_n.to_string()),
            ("Mx".to_string(), grid.mx().to_string()),
            ("Mt".to_string(), grid.mt().to_string()),
            ("rtol".to_string(), format!("{STEPPER_RTOL:e}")),
            ("steps".to_string(), stats.accepted.to_string()),
            ("rejected".to_string(), stats.rejected.to_string()),
        ];
        Ok(Field2D {
            x: self.x.clone(),
            t: t_nodes,
            big_n,
            u,
            moments,
            metadata,
            stats,
        })
    }
}

/// Solves a [`DiffusionProblem`] with the `n = 1` expansion. Boundary
/// nodes are held at exactly 0.
pub fn solve_diffusion(
    problem: &DiffusionProblem,
    grid: &Grid1D,
    n_expansion: usize,
) -> Result<Field2D> {
    if n_expansion != 1 {
        return Err(Error::Domain(format!(
            "the PDE solvers use n = 1 (got {n_expansion})"
        )));
    }
    let p = problem.clone();
    let system = MethodOfLines {
        order: &problem.order,
        params: ExpansionParams::new(1, problem.big_n)?,
        x: grid.x_nodes(),
        hx: grid.hx(),
        advection: 0.0,
        source: Box::new(move |x, t| Ok(p.source(x, t))),
        left: Box::new(|_| (0.0, 0.0)),
        right: Box::new(|_| (0.0, 0.0)),
    };
    let mut field = system.solve(grid, &|x| problem.initial(x))?;
    field
        .metadata
        .insert(0, ("problem".into(), "diffusion".into()));
    field
        .metadata
        .push(("boundary".into(), "u(0,t) = u(1,t) = 0".into()));
    Ok(field)
}

/// Solves the linear Burgers problem `D^α u + u_x − u_xx = F` from
/// `u(x, t0) = x² + t0²`. The lateral values are not part of the problem
/// statement; they are pinned to the exact solution `x² + t²`.
pub fn solve_burgers(order: &OrderFunction, grid: &Grid1D, big_n: usize) -> Result<Field2D> {
    let system = MethodOfLines {
        order,
        params: ExpansionParams::new(1, big_n)?,
        x: grid.x_nodes(),
        hx: grid.hx(),
        advection: 1.0,
        source: Box::new(move |x, t| burgers_force(order, x, t)),
        left: Box::new(|t| (t * t, 2.0 * t)),
        right: Box::new(|t| (1.0 + t * t, 2.0 * t)),
    };
    let t0 = grid.t0();
    let mut field = system.solve(grid, &|x| burgers_exact(x, t0))?;
    field
        .metadata
        .insert(0, ("problem".into(), "burgers".into()));
    field.metadata.push((
        "boundary".into(),
        "Dirichlet from the exact solution: u(0,t) = t^2, u(1,t) = 1 + t^2".into(),
    ));
    Ok(field)
}
