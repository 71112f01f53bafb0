use varcaputo::pde::{
    burgers_exact, diffusion_exact, field_error, manufactured_diffusion, solve_burgers,
    solve_diffusion, Field2D, Grid1D, STEPPER_RTOL,
};
use varcaputo::{Error, Interval, OrderFunction};

fn paper_alpha() -> OrderFunction {
    OrderFunction::affine(0.5, 0.49, Interval::unit()).unwrap()
}

fn paper_beta() -> OrderFunction {
    OrderFunction::affine(0.1, 0.5, Interval::unit()).unwrap()
}

fn diffusion(order: OrderFunction, big_n: usize, grid: &Grid1D) -> Field2D {
    solve_diffusion(&manufactured_diffusion(order, big_n).unwrap(), grid, 1).unwrap()
}

#[test]
fn dirichlet_rows_stay_zero() {
    let grid = Grid1D::new(20, 50, 1e-4).unwrap();
    let f = diffusion(paper_alpha(), 6, &grid);
    for j in 0..f.t.len() {
        assert_eq!(f.u(0, j), 0.0);
        assert_eq!(f.u(20, j), 0.0);
        for p in 1..=6 {
            assert_eq!(f.moment(p, 0, j), 0.0);
        }
    }
}

/// V_p(t) = t^{p−1}u(t) − t0^{p−1}u(t0) − (p−1)∫_{t0}^t τ^{p−2}u dτ,
/// the integral by composite Simpson on the output grid (`j` even).
fn moment_by_parts(f: &Field2D, p: usize, i: usize, j: usize) -> f64 {
    assert!(j.is_multiple_of(2));
    let h = f.t[1] - f.t[0];
    let g = |k: usize| {
        if p == 1 {
            0.0
        } else {
            f.t[k].powi(p as i32 - 2) * f.u(i, k)
        }
    };
    let mut s = g(0) + g(j);
    for k in 1..j {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * g(k);
    }
    let pw = p as i32 - 1;
    f.t[j].powi(pw) * f.u(i, j) - f.t[0].powi(pw) * f.u(i, 0) - (p as f64 - 1.0) * s * h / 3.0
}

#[test]
fn marched_moments_match_their_definition() {
    let grid = Grid1D::new(20, 2000, 1e-4).unwrap();
    let f = diffusion(paper_alpha(), 6, &grid);
    for (i, j) in [(3, 500), (5, 1000), (7, 2000), (12, 1500), (16, 1800)] {
        for p in 1..=6 {
            let marched = f.moment(p, i, j);
            let recomputed = moment_by_parts(&f, p, i, j);
            let tol = 10.0 * STEPPER_RTOL * marched.abs().max(1.0);
            assert!(
                (marched - recomputed).abs() <= tol,
                "p={p} at ({i},{j}): {marched} vs {recomputed}"
            );
        }
    }
}

fn errors_over_n<F: Fn(usize) -> f64>(ns: &[usize], err: F) -> Vec<f64> {
    ns.iter().map(|&n| err(n)).collect()
}

#[test]
fn diffusion_error_does_not_grow_with_n() {
    let grid = Grid1D::new(20, 200, 1e-4).unwrap();
    let errs = errors_over_n(&[3, 6, 12], |n| {
        field_error(&diffusion(paper_alpha(), n, &grid), diffusion_exact)
    });
    for w in errs.windows(2) {
        assert!(w[1] <= 1.05 * w[0], "{errs:?}");
    }
}

#[test]
fn diffusion_expansion_part_shrinks_with_n() {
    // distance to a deep expansion isolates the N-dependent part of the error
    let grid = Grid1D::new(20, 100, 1e-4).unwrap();
    for order in [paper_alpha(), paper_beta()] {
        let deep = diffusion(order.clone(), 96, &grid);
        let gaps = errors_over_n(&[3, 6, 12, 24], |n| {
            let f = diffusion(order.clone(), n, &grid);
            (0..f.t.len())
                .flat_map(|j| (0..f.x.len()).map(move |i| (i, j)))
                .map(|(i, j)| (f.u(i, j) - deep.u(i, j)).abs())
                .fold(0.0, f64::max)
        });
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }
}

#[test]
fn burgers_error_halves_as_n_doubles() {
    let grid = Grid1D::new(20, 200, 1e-4).unwrap();
    for order in [paper_alpha(), paper_beta()] {
        let errs = errors_over_n(&[3, 6, 12], |n| {
            field_error(&solve_burgers(&order, &grid, n).unwrap(), burgers_exact)
        });
        for w in errs.windows(2) {
            assert!(w[1] <= 1.05 * w[0], "{errs:?}");
        }
        let f = solve_burgers(&order, &grid, 3).unwrap();
        for (i, &x) in f.x.iter().enumerate() {
            assert!((f.u(i, 0) - (x * x + 1e-8)).abs() <= 1e-12);
        }
    }
}

#[test]
fn burgers_boundaries_follow_the_exact_solution() {
    let grid = Grid1D::new(10, 20, 1e-4).unwrap();
    let f = solve_burgers(&paper_alpha(), &grid, 4).unwrap();
    for (j, &t) in f.t.iter().enumerate() {
        assert!((f.u(0, j) - t * t).abs() < 1e-9);
        assert!((f.u(10, j) - 1.0 - t * t).abs() < 1e-9);
    }
    assert!(f
        .metadata
        .iter()
        .any(|(k, v)| k == "boundary" && v.contains("exact solution")));
}

#[test]
fn degenerate_start_is_rejected() {
    assert!(matches!(
        Grid1D::new(20, 20, 0.0),
        Err(Error::Degenerate(_))
    ));
    assert!(matches!(
        Grid1D::new(20, 20, -1e-3),
        Err(Error::Degenerate(_))
    ));
}

#[test]
fn inadmissible_order_fails_before_marching() {
    // α reaches 1 inside the interval, where the expansion coefficients do not exist
    let bad = OrderFunction::new(|t| 0.5 + 0.6 * t, |_| 0.6, Interval::unit());
    let grid = Grid1D::new(8, 8, 1e-4).unwrap();
    assert!(solve_burgers(&bad, &grid, 3).is_err());
    let problem = manufactured_diffusion(bad, 3).unwrap();
    assert!(solve_diffusion(&problem, &grid, 1).is_err());
}
