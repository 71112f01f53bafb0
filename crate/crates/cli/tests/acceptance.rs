//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Every tolerance and time budget is pinned below.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use varcaputo::expansion::{approximate, error_bound};
use varcaputo::pde::{
    burgers_exact, diffusion_exact, field_error, manufactured_diffusion, solve_burgers,
    solve_diffusion, Grid1D,
};
use varcaputo::reference::{caputo_quadrature, power_closed_form};
use varcaputo::special::{digamma, gamma, ln_gamma, signed_binomial};
use varcaputo::{
    DerivativeBound, ExpansionParams, Interval, Kind, OperatorKind, OrderFunction, ScalarFunction,
    Side,
};

const GAMMA_RECURRENCE_REL: f64 = 1e-12;
const DIGAMMA_RECURRENCE_ABS: f64 = 1e-11;
const DIGAMMA_FD_STEP: f64 = 1e-5;
const DIGAMMA_FD_ABS: f64 = 1e-6;
const BINOMIAL_REL: f64 = 1e-12;

const QUADRATURE_TOL: f64 = 1e-8;
const CLOSED_FORM_AGREEMENT: f64 = 1e-7;
const ENDPOINT_DISTANCES: [f64; 3] = [1e-2, 1e-3, 1e-4];
const ENDPOINT_FINAL_MAX: f64 = 1e-3;
const MOMENT_TOL: f64 = 1e-12;
const MONOTONE_SLACK: f64 = 1.05;
const SCALING_REL: f64 = 1e-12;
const INITIAL_ROW_ABS: f64 = 1e-12;
const FIGURE_AGREEMENT: f64 = 1e-6;

const PDE_MX: usize = 20;
const PDE_MT: usize = 200;
const PDE_T0: f64 = 1e-4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn unit() -> Interval {
    Interval::unit()
}

fn affine(c1: f64, c0: f64) -> OrderFunction {
    OrderFunction::affine(c1, c0, unit()).unwrap()
}

fn all_ops() -> Vec<OperatorKind> {
    OperatorKind::all().collect()
}

/// Exact derivative of x(t) = t² for either side. On the right,
/// t² = 1 − 2(1−t) + (1−t)² reduces it to power closed forms.
fn exact_t_squared(op: OperatorKind, order: &OrderFunction, t: f64) -> f64 {
    match op.side {
        Side::Left => power_closed_form(op, 2.0, order, t).unwrap(),
        Side::Right => {
            power_closed_form(op, 2.0, order, t).unwrap()
                - 2.0 * power_closed_form(op, 1.0, order, t).unwrap()
        }
    }
}

fn special_functions() -> Outcome {
    let mut worst = [0.0f64; 4];
    for k in 0..=4990 {
        let x = 0.1 + k as f64 * 0.01;
        let g1 = gamma(x + 1.0).unwrap();
        worst[0] = worst[0].max((g1 - x * gamma(x).unwrap()).abs() / g1);
        worst[1] = worst[1].max((digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x).abs());
    }
    for k in 0..=1950 {
        let x = 0.5 + k as f64 * 0.01;
        let lg = |v: f64| ln_gamma(v).unwrap().0;
        let fd = (lg(x + DIGAMMA_FD_STEP) - lg(x - DIGAMMA_FD_STEP)) / (2.0 * DIGAMMA_FD_STEP);
        worst[2] = worst[2].max((digamma(x).unwrap() - fd).abs());
    }
    for nu in [0.3, 0.5, 1.7] {
        let mut falling = 1.0;
        let mut factorial = 1.0;
        for p in 0..=20usize {
            if p > 0 {
                falling *= nu - (p - 1) as f64;
                factorial *= p as f64;
            }
            let expected = falling / factorial;
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let got = sign * signed_binomial(nu, p).unwrap();
            let rel = if expected == 0.0 {
                got.abs()
            } else {
                ((got - expected) / expected).abs()
            };
            worst[3] = worst[3].max(rel);
        }
    }
    let limits = [
        GAMMA_RECURRENCE_REL,
        DIGAMMA_RECURRENCE_ABS,
        DIGAMMA_FD_ABS,
        BINOMIAL_REL,
    ];
    outcome(
        worst.iter().zip(limits).all(|(w, l)| *w <= l),
        format!(
            "gamma rec {:.1e}<={GAMMA_RECURRENCE_REL:e}, digamma rec {:.1e}<={DIGAMMA_RECURRENCE_ABS:e}, digamma fd {:.1e}<={DIGAMMA_FD_ABS:e}, binomial {:.1e}<={BINOMIAL_REL:e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn closed_form_vs_quadrature() -> Outcome {
    let order = affine(0.5, 0.1);
    let mut worst = 0.0f64;
    for gamma_exp in [1.0, 2.0, 3.5] {
        let left = ScalarFunction::power_left(gamma_exp, unit()).unwrap();
        let right = ScalarFunction::power_right(gamma_exp, unit()).unwrap();
        for op in all_ops() {
            let x = if op.side == Side::Left { &left } else { &right };
            for k in 1..=9 {
                let t = k as f64 / 10.0;
                let q = caputo_quadrature(op, x, &order, t, QUADRATURE_TOL).unwrap();
                let cf = power_closed_form(op, gamma_exp, &order, t).unwrap();
                worst = worst.max((q - cf).abs());
            }
        }
    }
    outcome(
        worst <= CLOSED_FORM_AGREEMENT,
        format!("max |quadrature - closed form| {worst:.2e} <= {CLOSED_FORM_AGREEMENT:e}"),
    )
}

fn endpoint_vanishing() -> Outcome {
    let order = affine(0.5, 0.1);
    let left = ScalarFunction::power_left(2.0, unit()).unwrap();
    let right = ScalarFunction::power_right(2.0, unit()).unwrap();
    let mut pass = true;
    let mut largest_final = 0.0f64;
    for op in all_ops() {
        let (x, at) = match op.side {
            Side::Left => (&left, Box::new(|d: f64| d) as Box<dyn Fn(f64) -> f64>),
            Side::Right => (
                &right,
                Box::new(|d: f64| 1.0 - d) as Box<dyn Fn(f64) -> f64>,
            ),
        };
        let values: Vec<f64> = ENDPOINT_DISTANCES
            .iter()
            .map(|&d| {
                caputo_quadrature(op, x, &order, at(d), QUADRATURE_TOL)
                    .unwrap()
                    .abs()
            })
            .collect();
        pass &= values.windows(2).all(|w| w[1] < w[0]);
        largest_final = largest_final.max(values[values.len() - 1]);
    }
    pass &= largest_final <= ENDPOINT_FINAL_MAX;
    outcome(
        pass,
        format!("six operators decrease at distances {ENDPOINT_DISTANCES:?}; final |value| {largest_final:.2e} <= {ENDPOINT_FINAL_MAX:e}"),
    )
}

/// Left operators on t² under the two reference orders.
fn expansion_reproduction() -> Outcome {
    let x = ScalarFunction::power_left(2.0, unit()).unwrap();
    let mut violations = Vec::new();
    let mut worst_ratio = 0.0f64;
    for (name, order) in [
        ("(50t+49)/100", affine(0.5, 0.49)),
        ("(t+5)/10", affine(0.1, 0.5)),
    ] {
        for kind in Kind::ALL {
            let op = OperatorKind::new(kind, Side::Left);
            for t in [0.2, 0.4, 0.6, 0.8] {
                let exact = exact_t_squared(op, &order, t);
                let errs: Vec<f64> = [2, 4, 6]
                    .iter()
                    .map(|&big_n| {
                        let params = ExpansionParams::new(1, big_n).unwrap();
                        let r = approximate(op, &x, &order, t, params, MOMENT_TOL).unwrap();
                        let err = (exact - r.value).abs();
                        if err > r.error_bound {
                            violations.push(format!(
                                "{name} {op} t={t} N={big_n}: {err:.2e} > {:.2e}",
                                r.error_bound
                            ));
                        }
                        err
                    })
                    .collect();
                worst_ratio = worst_ratio.max(errs[2] / errs[0]);
            }
        }
    }
    let pass = violations.is_empty() && worst_ratio <= MONOTONE_SLACK;
    let mut detail = format!("72 left-operator errors within bound; max err(N=6)/err(N=2) {worst_ratio:.3} <= {MONOTONE_SLACK}");
    if !violations.is_empty() {
        detail = format!("bound violated: {}", violations.join("; "));
    }
    outcome(pass, detail)
}

fn bound_scaling() -> Outcome {
    let op = OperatorKind::new(Kind::TypeIII, Side::Left);
    let bounds = DerivativeBound::new().with(2, 1.0).unwrap();
    let at = |big_n| {
        error_bound(
            op,
            ExpansionParams::new(1, big_n).unwrap(),
            0.5,
            0.0,
            0.7,
            &bounds,
        )
        .unwrap()
    };
    let expected = at(2) * (2.0f64 / 32.0).powf(0.5);
    let rel = ((at(32) - expected) / expected).abs();
    outcome(
        rel <= SCALING_REL,
        format!("bound(N=32) vs bound(N=2)*(2/32)^0.5: relative {rel:.1e} <= {SCALING_REL:e}"),
    )
}

fn constant_order_collapse() -> Outcome {
    let x = ScalarFunction::power_left(2.0, unit()).unwrap();
    let mut pass = true;
    let mut worst = 0.0f64;
    for alpha in [0.3, 0.7] {
        let order = OrderFunction::constant(alpha, unit()).unwrap();
        for big_n in [2, 4, 6] {
            let params = ExpansionParams::new(1, big_n).unwrap();
            for t in [0.2, 0.4, 0.6, 0.8] {
                let r: Vec<_> = Kind::ALL
                    .iter()
                    .map(|&k| {
                        approximate(
                            OperatorKind::new(k, Side::Left),
                            &x,
                            &order,
                            t,
                            params,
                            MOMENT_TOL,
                        )
                        .unwrap()
                    })
                    .collect();
                pass &= r[0].value.to_bits() == r[1].value.to_bits()
                    && r[1].value.to_bits() == r[2].value.to_bits();
                let exact = 2.0 / gamma(3.0 - alpha).unwrap() * t.powf(2.0 - alpha);
                let err = (r[2].value - exact).abs();
                pass &= err <= r[2].error_bound;
                worst = worst.max(err / r[2].error_bound);
            }
        }
    }
    outcome(
        pass,
        format!("kinds bitwise equal; max error/bound {worst:.3} <= 1"),
    )
}

fn diffusion_pde() -> Outcome {
    let order = affine(0.5, 0.49);
    let grid = Grid1D::new(PDE_MX, PDE_MT, PDE_T0).unwrap();
    let mut boundary_zero = true;
    let errs: Vec<f64> = [3, 12]
        .iter()
        .map(|&big_n| {
            let problem = manufactured_diffusion(order.clone(), big_n).unwrap();
            let field = solve_diffusion(&problem, &grid, 1).unwrap();
            boundary_zero &=
                (0..field.t.len()).all(|j| field.u(0, j) == 0.0 && field.u(PDE_MX, j) == 0.0);
            field_error(&field, diffusion_exact)
        })
        .collect();
    outcome(
        boundary_zero && errs[1] <= MONOTONE_SLACK * errs[0],
        format!(
            "alpha=(50t+49)/100, Mx={PDE_MX}, Mt={PDE_MT}: boundary rows 0 = {boundary_zero}; max err N=3 {:.4e}, N=12 {:.4e} (ratio {:.3} <= {MONOTONE_SLACK})",
            errs[0],
            errs[1],
            errs[1] / errs[0]
        ),
    )
}

fn burgers_pde() -> Outcome {
    let grid = Grid1D::new(PDE_MX, PDE_MT, PDE_T0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, order) in [
        ("(50t+49)/100", affine(0.5, 0.49)),
        ("(t+5)/10", affine(0.1, 0.5)),
    ] {
        let mut initial = 0.0f64;
        let errs: Vec<f64> = [3, 6, 12]
            .iter()
            .map(|&big_n| {
                let field = solve_burgers(&order, &grid, big_n).unwrap();
                for (i, &x) in field.x.iter().enumerate() {
                    initial = initial.max((field.u(i, 0) - burgers_exact(x, PDE_T0)).abs());
                }
                field_error(&field, burgers_exact)
            })
            .collect();
        pass &=
            errs.windows(2).all(|w| w[1] <= MONOTONE_SLACK * w[0]) && initial <= INITIAL_ROW_ABS;
        parts.push(format!(
            "{name}: {:.2e} {:.2e} {:.2e}, initial row {initial:.0e}",
            errs[0], errs[1], errs[2]
        ));
    }
    outcome(pass, format!("max err at N=3,6,12 ({})", parts.join("; ")))
}

fn figure_panels() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_varcaputo"))
        .args(["figures", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    if !status.status.success() {
        return outcome(false, format!("figures exited with {}", status.status));
    }
    let mut worst = 0.0f64;
    let mut panels = 0;
    for side in ["left", "right"] {
        for kind in 1..=3 {
            match read_panel(&dir.path().join(format!("fig1_{side}_type{kind}.csv"))) {
                Some(rows) => {
                    panels += 1;
                    worst = rows
                        .iter()
                        .map(|r| (r[1] - r[2]).abs())
                        .fold(worst, f64::max);
                }
                None => {
                    return outcome(
                        false,
                        format!("panel {side} type {kind} missing or malformed"),
                    )
                }
            }
        }
    }
    outcome(
        panels == 6 && worst <= FIGURE_AGREEMENT,
        format!(
            "{panels} panels; max |closed form - quadrature| {worst:.2e} <= {FIGURE_AGREEMENT:e}"
        ),
    )
}

/// Parses a panel CSV; `None` unless every row has five finite numbers.
fn read_panel(path: &Path) -> Option<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).ok()?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().ok()?.clone();
    if header.iter().collect::<Vec<_>>()
        != ["t", "closed_form", "quadrature", "const_0.1", "const_0.6"]
    {
        return None;
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let row: Vec<f64> = record
            .ok()?
            .iter()
            .map(|f| f.parse::<f64>().ok())
            .collect::<Option<_>>()?;
        if row.len() != 5 || !row.iter().all(|v| v.is_finite()) {
            return None;
        }
        rows.push(row);
    }
    (!rows.is_empty()).then_some(rows)
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        (
            "special functions",
            Duration::from_secs(1),
            special_functions,
        ),
        (
            "closed form vs quadrature",
            Duration::from_secs(30),
            closed_form_vs_quadrature,
        ),
        (
            "endpoint vanishing",
            Duration::from_secs(5),
            endpoint_vanishing,
        ),
        (
            "expansion error within bound",
            Duration::from_secs(60),
            expansion_reproduction,
        ),
        ("bound scaling in N", Duration::from_secs(1), bound_scaling),
        (
            "constant-order collapse",
            Duration::from_secs(5),
            constant_order_collapse,
        ),
        ("diffusion PDE", Duration::from_secs(120), diffusion_pde),
        ("Burgers PDE", Duration::from_secs(120), burgers_pde),
        ("figure panels", Duration::from_secs(20), figure_panels),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = result.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} criterion {}: {name} [{:.2}s, budget {}s{}] {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" },
            result.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
