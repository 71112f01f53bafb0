use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use varcaputo::expansion::approximate;
use varcaputo::pde::{
    burgers_exact, diffusion_exact, field_error, manufactured_diffusion, solve_burgers,
    solve_diffusion, Field2D, Grid1D,
};
use varcaputo::reference::caputo_quadrature;
use varcaputo::{BoundSource, Interval, Kind, OperatorKind, OrderFunction, ScalarFunction, Side};

use crate::config::{check_times, check_tol, params, FunctionSpec, OrderSpec};
use crate::error::CliError;
use crate::output::Table;

/// Settings shared by the pointwise commands.
#[derive(Debug, Clone)]
pub struct PointConfig {
    pub kind: Kind,
    pub side: Side,
    pub order: OrderSpec,
    pub function: FunctionSpec,
    pub n: usize,
    pub tol: f64,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PdeConfig {
    pub order: OrderSpec,
    pub big_n: usize,
    pub mx: usize,
    pub mt: usize,
    pub t0: f64,
}

/// Reference value: closed form when the function allows one, otherwise quadrature.
fn oracle(
    function: FunctionSpec,
    x: &ScalarFunction,
    op: OperatorKind,
    order: &OrderFunction,
    t: f64,
    tol: f64,
) -> varcaputo::Result<f64> {
    match function.closed_form(op, order, t) {
        Some(v) => v,
        None => caputo_quadrature(op, x, order, t, tol),
    }
}

fn oracle_name(function: FunctionSpec, side: Side) -> &'static str {
    let probe = OrderFunction::constant(0.5, Interval::unit()).expect("0.5 is admissible");
    match function.closed_form(OperatorKind::new(Kind::TypeIII, side), &probe, 0.5) {
        Some(_) => "closed form",
        None => "quadrature",
    }
}

fn describe(table: &mut Table, cfg: &PointConfig) {
    table.meta("operator", OperatorKind::new(cfg.kind, cfg.side));
    table.meta("order", &cfg.order);
    table.meta("function", cfg.function);
    table.meta("n", cfg.n);
    table.meta("tol", format!("{:e}", cfg.tol));
    table.meta("oracle", oracle_name(cfg.function, cfg.side));
}

/// One row per t: oracle, expansion, observed error and certified bound.
pub fn eval(cfg: &PointConfig, big_n: usize) -> Result<Table, CliError> {
    let order = cfg.order.build()?;
    let params = params(cfg.n, big_n)?;
    check_tol(cfg.tol)?;
    check_times(&cfg.times)?;

    let x = cfg.function.build();
    let op = OperatorKind::new(cfg.kind, cfg.side);
    let rows = cfg
        .times
        .par_iter()
        .map(|&t| {
            let exact = oracle(cfg.function, &x, op, &order, t, cfg.tol)?;
            let approx = approximate(op, &x, &order, t, params, cfg.tol)?;
            Ok((
                vec![
                    t,
                    exact,
                    approx.value,
                    (exact - approx.value).abs(),
                    approx.error_bound,
                ],
                approx.bound_source,
            ))
        })
        .collect::<Result<Vec<_>, varcaputo::Error>>()?;

    let mut table = Table::new(["t", "oracle", "approx", "abs_err", "bound"]);
    describe(&mut table, cfg);
    table.meta("N", big_n);
    let source = rows
        .iter()
        .fold(BoundSource::Analytic, |s, r| s.combine(r.1));
    table.meta("bound", source);
    table.rows = rows.into_iter().map(|r| r.0).collect();
    Ok(table)
}

/// Exact value and the expansion at each N in `ns`, with pointwise errors.
pub fn convergence(cfg: &PointConfig, ns: &[usize]) -> Result<Table, CliError> {
    let order = cfg.order.build()?;
    check_tol(cfg.tol)?;
    check_times(&cfg.times)?;
    if ns.is_empty() {
        return Err(CliError::Config("--ns needs at least one value".into()));
    }
    let all_params = ns
        .iter()
        .map(|&big_n| params(cfg.n, big_n))
        .collect::<Result<Vec<_>, _>>()?;

    let x = cfg.function.build();
    let op = OperatorKind::new(cfg.kind, cfg.side);
    let rows = cfg
        .times
        .par_iter()
        .map(|&t| {
            let exact = oracle(cfg.function, &x, op, &order, t, cfg.tol)?;
            let approx = all_params
                .iter()
                .map(|&p| approximate(op, &x, &order, t, p, cfg.tol).map(|r| r.value))
                .collect::<varcaputo::Result<Vec<_>>>()?;
            let mut row = vec![t, exact];
            row.extend(&approx);
            row.extend(approx.iter().map(|a| (exact - a).abs()));
            Ok(row)
        })
        .collect::<Result<Vec<_>, varcaputo::Error>>()?;

    let mut header = vec!["t".to_string(), "exact".to_string()];
    header.extend(ns.iter().map(|n| format!("approx_N{n}")));
    header.extend(ns.iter().map(|n| format!("err_N{n}")));
    let mut table = Table::new(header);
    describe(&mut table, cfg);
    table.rows = rows;
    Ok(table)
}

/// Constant orders plotted against the variable order in each panel.
pub const FIGURE_CONSTANTS: [f64; 2] = [0.1, 0.6];

/// One panel: a kind and side, with t² on the left and (1−t)² on the right.
#[derive(Debug, Clone)]
pub struct Panel {
    pub name: String,
    pub table: Table,
}

pub fn figures(order: &OrderSpec, times: &[f64], tol: f64) -> Result<Vec<Panel>, CliError> {
    let variable = order.build()?;
    check_tol(tol)?;
    check_times(times)?;
    let constants = FIGURE_CONSTANTS
        .iter()
        .map(|&c| OrderFunction::constant(c, Interval::unit()))
        .collect::<varcaputo::Result<Vec<_>>>()?;

    let ops: Vec<OperatorKind> = [Side::Left, Side::Right]
        .into_iter()
        .flat_map(|side| {
            Kind::ALL
                .into_iter()
                .map(move |kind| OperatorKind::new(kind, side))
        })
        .collect();
    ops.par_iter()
        .map(|&op| {
            let function = match op.side {
                Side::Left => FunctionSpec::Square,
                Side::Right => FunctionSpec::MirroredSquare,
            };
            let x = function.build();
            let closed = |o: &OrderFunction, t: f64| {
                function
                    .closed_form(op, o, t)
                    .expect("power of the distance")
            };
            let rows = times
                .iter()
                .map(|&t| {
                    let mut row = vec![
                        t,
                        closed(&variable, t)?,
                        caputo_quadrature(op, &x, &variable, t, tol)?,
                    ];
                    for c in &constants {
                        row.push(closed(c, t)?);
                    }
                    Ok(row)
                })
                .collect::<varcaputo::Result<Vec<_>>>()?;

            let mut header = vec!["t".to_string(), "closed_form".into(), "quadrature".into()];
            header.extend(FIGURE_CONSTANTS.iter().map(|c| format!("const_{c}")));
            let mut table = Table::new(header);
            table.meta("operator", op);
            table.meta("function", function);
            table.meta("order", order);
            table.meta("tol", format!("{tol:e}"));
            table.rows = rows;
            let side = match op.side {
                Side::Left => "left",
                Side::Right => "right",
            };
            let kind = match op.kind {
                Kind::TypeI => 1,
                Kind::TypeII => 2,
                Kind::TypeIII => 3,
            };
            Ok(Panel {
                name: format!("fig1_{side}_type{kind}"),
                table,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()
}

/// Writes each panel to `<dir>/<name>.csv`, or all of them to stdout in turn.
pub fn emit_panels(panels: &[Panel], dir: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for p in panels {
                let path = dir.join(format!("{}.csv", p.name));
                p.table.emit(Some(&path))?;
                written.push(path);
            }
        }
        None => {
            for p in panels {
                let mut table = p.table.clone();
                table.metadata.insert(0, ("panel".into(), p.name.clone()));
                table.emit(None)?;
            }
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdeProblem {
    Diffusion,
    Burgers,
}

fn validate_pde(cfg: &PdeConfig) -> Result<(OrderFunction, Grid1D), CliError> {
    let order = cfg.order.build()?;
    params(1, cfg.big_n)?;
    let grid = Grid1D::new(cfg.mx, cfg.mt, cfg.t0).map_err(CliError::config)?;
    Ok((order, grid))
}

pub fn pde(problem: PdeProblem, cfg: &PdeConfig) -> Result<Table, CliError> {
    let (order, grid) = validate_pde(cfg)?;
    let (field, exact): (Field2D, fn(f64, f64) -> f64) = match problem {
        PdeProblem::Diffusion => {
            let p = manufactured_diffusion(order, cfg.big_n)?;
            (solve_diffusion(&p, &grid, 1)?, diffusion_exact)
        }
        PdeProblem::Burgers => (solve_burgers(&order, &grid, cfg.big_n)?, burgers_exact),
    };

    let mut table = Table::new(["x", "t", "u", "u_exact", "abs_err"]);
    table.metadata = field.metadata.clone();
    table.meta("order", &cfg.order);
    table.meta("grid", format!("{} x {} intervals", cfg.mx, cfg.mt));
    table.meta("max_error", field_error(&field, exact));
    for (j, &t) in field.t.iter().enumerate() {
        for (i, &x) in field.x.iter().enumerate() {
            let (u, e) = (field.u(i, j), exact(x, t));
            table.rows.push(vec![x, t, u, e, (u - e).abs()]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::uniform_times;

    fn point(kind: Kind, order: &str, times: Vec<f64>) -> PointConfig {
        PointConfig {
            kind,
            side: Side::Left,
            order: order.parse().unwrap(),
            function: FunctionSpec::Square,
            n: 1,
            tol: 1e-10,
            times,
        }
    }

    #[test]
    fn eval_error_is_within_the_bound() {
        let table = eval(&point(Kind::TypeIII, "paper-alpha", vec![0.5]), 6).unwrap();
        let row = &table.rows[0];
        assert!(row[3] <= row[4], "{row:?}");
    }

    #[test]
    fn eval_at_the_base_point_is_zero() {
        for kind in Kind::ALL {
            let table = eval(&point(kind, "paper-beta", vec![0.0]), 4).unwrap();
            assert_eq!(&table.rows[0][1..], &[0.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn constant_order_convergence_is_kind_independent() {
        let ts = vec![0.2, 0.5, 0.9];
        let tables: Vec<Table> = Kind::ALL
            .iter()
            .map(|&k| convergence(&point(k, "0,0.3", ts.clone()), &[2, 4, 6]).unwrap())
            .collect();
        assert_eq!(tables[0].rows, tables[1].rows);
        assert_eq!(tables[1].rows, tables[2].rows);
    }

    #[test]
    fn rows_keep_the_requested_order() {
        let ts: Vec<f64> = (0..40).rev().map(|i| i as f64 / 40.0).collect();
        let table = convergence(&point(Kind::TypeI, "paper-alpha", ts.clone()), &[2]).unwrap();
        let got: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
        assert_eq!(got, ts);
    }

    #[test]
    fn invalid_inputs_are_config_errors() {
        assert!(matches!(
            eval(&point(Kind::TypeI, "0.5,0.9", vec![0.5]), 6),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            eval(&point(Kind::TypeI, "paper-alpha", vec![1.5]), 6),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            eval(&point(Kind::TypeI, "paper-alpha", vec![0.5]), 0),
            Err(CliError::Config(_))
        ));
        let cfg = PdeConfig {
            order: "paper-alpha".parse().unwrap(),
            big_n: 3,
            mx: 10,
            mt: 10,
            t0: 0.0,
        };
        assert!(matches!(
            pde(PdeProblem::Diffusion, &cfg),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn burgers_exact_column_is_x2_plus_t2() {
        let cfg = PdeConfig {
            order: "paper-beta".parse().unwrap(),
            big_n: 3,
            mx: 8,
            mt: 8,
            t0: 1e-4,
        };
        let table = pde(PdeProblem::Burgers, &cfg).unwrap();
        for r in &table.rows {
            assert_eq!(r[3], r[0] * r[0] + r[1] * r[1]);
        }
    }

    #[test]
    fn uniform_times_cover_the_interval() {
        let ts = uniform_times(11).unwrap();
        assert_eq!((ts[0], ts[10]), (0.0, 1.0));
        assert!(uniform_times(1).is_err());
    }
}
