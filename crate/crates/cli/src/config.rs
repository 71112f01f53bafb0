use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use varcaputo::reference::{power_closed_form, DEFAULT_TOL};
use varcaputo::{
    ExpansionParams, Interval, Kind, OperatorKind, OrderFunction, ScalarFunction, Side,
};

use crate::error::CliError;

/// Points used to check that an order stays admissible.
pub const ORDER_CHECK_POINTS: usize = 1001;

/// α(t) = c1·t + c0 on [0, 1], either named or given by its coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSpec {
    pub c1: f64,
    pub c0: f64,
    pub name: Option<&'static str>,
}

pub const PRESETS: [(&str, f64, f64); 3] = [
    ("paper-alpha", 0.5, 0.49),
    ("paper-beta", 0.1, 0.5),
    ("fig1-alpha", 0.5, 0.1),
];

impl FromStr for OrderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(&(name, c1, c0)) = PRESETS.iter().find(|p| p.0 == s) {
            return Ok(Self {
                c1,
                c0,
                name: Some(name),
            });
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [c1, c0] = parts[..] else {
            return Err(format!(
                "expected a preset ({}) or `c1,c0`, got `{s}`",
                preset_names()
            ));
        };
        let parse = |v: &str| {
            v.parse::<f64>()
                .map_err(|e| format!("bad coefficient `{v}`: {e}"))
        };
        Ok(Self {
            c1: parse(c1)?,
            c0: parse(c0)?,
            name: None,
        })
    }
}

fn preset_names() -> String {
    PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name {
            Some(name) => write!(f, "{name} (alpha(t) = {}*t + {})", self.c1, self.c0),
            None => write!(f, "alpha(t) = {}*t + {}", self.c1, self.c0),
        }
    }
}

impl OrderSpec {
    pub fn build(&self) -> Result<OrderFunction, CliError> {
        let order =
            OrderFunction::affine(self.c1, self.c0, Interval::unit()).map_err(CliError::config)?;
        order
            .validate(ORDER_CHECK_POINTS)
            .map_err(CliError::config)?;
        Ok(order)
    }
}

/// The function the operators are applied to, on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionSpec {
    /// t²
    Square,
    /// (1 − t)²
    MirroredSquare,
    /// t^γ
    Power(f64),
    /// (1 − t)^γ
    PowerRight(f64),
}

impl FromStr for FunctionSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let exponent = |v: &str| match v.parse::<f64>() {
            Ok(g) if g > 0.0 && g.is_finite() => Ok(g),
            _ => Err(format!("exponent must be a positive number, got `{v}`")),
        };
        match s {
            "t2" => Ok(Self::Square),
            "one-minus-t2" => Ok(Self::MirroredSquare),
            _ => {
                if let Some(g) = s.strip_prefix("power-right:") {
                    Ok(Self::PowerRight(exponent(g)?))
                } else if let Some(g) = s.strip_prefix("power:") {
                    Ok(Self::Power(exponent(g)?))
                } else {
                    Err(format!(
                        "expected t2, one-minus-t2, power:<g> or power-right:<g>, got `{s}`"
                    ))
                }
            }
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Square => f.write_str("x(t) = t^2"),
            Self::MirroredSquare => f.write_str("x(t) = (1-t)^2"),
            Self::Power(g) => write!(f, "x(t) = t^{g}"),
            Self::PowerRight(g) => write!(f, "x(t) = (1-t)^{g}"),
        }
    }
}

impl FunctionSpec {
    pub fn build(&self) -> ScalarFunction {
        let unit = Interval::unit();
        let built = match *self {
            Self::Square => ScalarFunction::power_left(2.0, unit),
            Self::MirroredSquare => ScalarFunction::power_right(2.0, unit),
            Self::Power(g) => ScalarFunction::power_left(g, unit),
            Self::PowerRight(g) => ScalarFunction::power_right(g, unit),
        };
        built.expect("exponent validated while parsing")
    }

    /// The function as Σ c·dist^γ over distances from the side's base
    /// point, up to a constant, when such a finite sum exists.
    fn distance_powers(&self, side: Side) -> Option<Vec<(f64, f64)>> {
        // t² = 1 − 2(1−t) + (1−t)² and (1−t)² = 1 − 2t + t²; constants have derivative 0
        let expanded = vec![(-2.0, 1.0), (1.0, 2.0)];
        match (*self, side) {
            (Self::Square, Side::Left) | (Self::MirroredSquare, Side::Right) => {
                Some(vec![(1.0, 2.0)])
            }
            (Self::Square, Side::Right) | (Self::MirroredSquare, Side::Left) => Some(expanded),
            (Self::Power(g), Side::Left) | (Self::PowerRight(g), Side::Right) => {
                Some(vec![(1.0, g)])
            }
            _ => None,
        }
    }

    /// Exact derivative from the power closed forms, or `None` when the
    /// function is not a finite sum of powers of the distance.
    pub fn closed_form(
        &self,
        op: OperatorKind,
        order: &OrderFunction,
        t: f64,
    ) -> Option<varcaputo::Result<f64>> {
        let terms = self.distance_powers(op.side)?;
        Some(terms.into_iter().try_fold(0.0, |acc, (c, g)| {
            Ok(acc + c * power_closed_form(op, g, order, t)?)
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

pub fn parse_kind(s: &str) -> Result<Kind, String> {
    match s {
        "1" | "I" => Ok(Kind::TypeI),
        "2" | "II" => Ok(Kind::TypeII),
        "3" | "III" => Ok(Kind::TypeIII),
        _ => Err(format!("kind must be 1, 2 or 3, got `{s}`")),
    }
}

pub fn default_tol() -> f64 {
    DEFAULT_TOL
}

pub fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "--tol must be positive, got {tol}"
        )))
    }
}

pub fn check_times(ts: &[f64]) -> Result<(), CliError> {
    match ts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        Some(t) => Err(CliError::Config(format!("t = {t} is outside [0, 1]"))),
        None if ts.is_empty() => Err(CliError::Config("no evaluation points".into())),
        None => Ok(()),
    }
}

pub fn params(n: usize, big_n: usize) -> Result<ExpansionParams, CliError> {
    ExpansionParams::new(n, big_n).map_err(CliError::config)
}

/// `points` uniform nodes on [0, 1].
pub fn uniform_times(points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Config(format!(
            "--points must be at least 2, got {points}"
        )));
    }
    Ok(Interval::unit().linspace(points))
}
