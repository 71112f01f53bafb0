//! Adaptive Dormand–Prince 5(4) integration of `y′ = f(t, y)`.

use crate::error::{Error, Result};

/// Step-size controller settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Steps below `h_min_rel · |t|` are reported as a controller failure.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-12,
            h_min_rel: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

/// Counters from one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates from `t_out[0]` with state `y0` and returns the state at every
/// entry of `t_out` (increasing). Steps are shortened to land exactly on
/// each output time.
pub fn integrate<F>(
    mut f: F,
    y0: &[f64],
    t_out: &[f64],
    opts: OdeOptions,
) -> Result<(Vec<Vec<f64>>, OdeStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y0.len();
    let mut stats = OdeStats::default();
    let mut out = Vec::with_capacity(t_out.len());
    let Some(&t_start) = t_out.first() else {
        return Ok((out, stats));
    };
    if t_out.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "output times must be strictly increasing".into(),
        ));
    }
    out.push(y0.to_vec());

    let mut t = t_start;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    f(t, &y, &mut k1)?;
    stats.evaluations += 1;

    let mut h = initial_step(&mut f, t, &y, &k1, opts, &mut stats)?;
    let mut stage = vec![0.0; dim];
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
    );
    let mut y_new = vec![0.0; dim];

    for &target in &t_out[1..] {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::StepSize {
                    t,
                    reason: format!("exceeded {} steps", opts.max_steps),
                });
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            if step < opts.h_min_rel * t.abs().max(1e-300) {
                return Err(Error::StepSize {
                    t,
                    reason: format!("step {step:e} below the minimum"),
                });
            }

            for i in 0..dim {
                stage[i] = y[i] + step * A21 * k1[i];
            }
            f(t + C2 * step, &stage, &mut k2)?;
            for i in 0..dim {
                stage[i] = y[i] + step * (A31 * k1[i] + A32 * k2[i]);
            }
            f(t + C3 * step, &stage, &mut k3)?;
            for i in 0..dim {
                stage[i] = y[i] + step * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            f(t + C4 * step, &stage, &mut k4)?;
            for i in 0..dim {
                stage[i] = y[i] + step * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            f(t + C5 * step, &stage, &mut k5)?;
            for i in 0..dim {
                stage[i] = y[i]
                    + step * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            f(t + step, &stage, &mut k6)?;
            for i in 0..dim {
                y_new[i] = y[i]
                    + step * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            let t_new = if last { target } else { t + step };
            f(t_new, &y_new, &mut k7)?;
            stats.evaluations += 6;

            let mut err = 0.0;
            for i in 0..dim {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / scale).powi(2);
            }
            let err = (err / dim.max(1) as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::StepSize {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                stats.accepted += 1;
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                // a step cut short to hit the output time says nothing about h
                if !last || step >= h {
                    h = step * factor;
                }
            } else {
                stats.rejected += 1;
                h = step * factor.min(1.0);
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

/// Starting step from the sizes of y, f and a difference estimate of y″.
fn initial_step<F>(
    f: &mut F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    opts: OdeOptions,
    stats: &mut OdeStats,
) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y.len().max(1) as f64;
    let scale = |v: f64| opts.atol + opts.rtol * v.abs();
    let d0 = (y.iter().map(|&v| (v / scale(v)).powi(2)).sum::<f64>() / dim).sqrt();
    let d1 = (y
        .iter()
        .zip(f0)
        .map(|(&v, &d)| (d / scale(v)).powi(2))
        .sum::<f64>()
        / dim)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(1e-3 * t.abs().max(1e-3));
    let y1: Vec<f64> = y.iter().zip(f0).map(|(&v, &d)| v + h0 * d).collect();
    let mut f1 = vec![0.0; y.len()];
    f(t + h0, &y1, &mut f1)?;
    stats.evaluations += 1;
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(y)
        .map(|((&a, &b), &v)| ((a - b) / scale(v)).powi(2))
        .sum::<f64>()
        / dim)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1))
}
