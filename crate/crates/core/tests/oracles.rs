//! Solver, trace and verifier results against closed-form solutions.

mod common;

use common::{load, observed_order, piecewise_average, scenario_text};
use discflux::fv_solver::{cfl_dt, run, step};
use discflux::germ::{germ_w, is_dissipative, GermSpec, StatePair, GERM_SAMPLE_GRID};
use discflux::scenario::parse_scenario;
use discflux::traces::{extract_traces, rh_check, DEFAULT_SCALES};
use discflux::verify::{entropy_residual, k_grid};

fn rarefaction_error(cells: usize) -> (f64, f64) {
    let src = scenario_text("burgers_rarefaction")
        .replace("cells = 400", &format!("cells = {cells}"))
        .replace("store_steps = true", "store_steps = false");
    let s = parse_scenario(&src).unwrap();
    let sol = run(&s).unwrap();
    let t = 0.5;
    // exact cell averages of u = clamp(x / t, -1, 1)
    let antiderivative = |x: f64| {
        if x <= -t {
            -x
        } else if x >= t {
            x
        } else {
            x * x / (2.0 * t) + t / 2.0
        }
    };
    let err: f64 = (0..s.cells)
        .map(|i| {
            let (l, r) = (s.x_a + s.dx * i as f64, s.x_a + s.dx * (i + 1) as f64);
            let exact = (antiderivative(r) - antiderivative(l)) / s.dx;
            (sol.final_state()[i] - exact).abs() * s.dx
        })
        .sum();
    (s.dx, err)
}

#[test]
fn rarefaction_converges_at_first_order() {
    // the error behaves like dx |log dx|; pairwise orders pass 0.8 once dx <= 1/800
    let (dx, err): (Vec<f64>, Vec<f64>) = [1600, 3200, 6400].into_iter().map(rarefaction_error).unzip();
    for w in err.windows(2) {
        assert!((w[0] / w[1]).log2() >= 0.8, "{err:?}");
    }
    assert!(observed_order(&dx, &err) >= 0.8);
}

/// Interface at 0 with capacity 1 -> 2, data 0.4 | 0.9. The interface flux is
/// min(0.24, 0.18) = 0.18, so the left trace solves u (1 - u) = 0.18 on the
/// congested branch and a shock runs back into the left region. The error is
/// averaged over the stored levels: at a single time it depends on where the
/// shock sits inside its cell.
fn lwr_vv_error(cells: usize) -> (f64, f64) {
    let src = scenario_text("lwr_vv_u")
        .replace("cells = 800", &format!("cells = {cells}"))
        .replace("store_steps = true", "store_steps = false");
    let s = parse_scenario(&src).unwrap();
    let sol = run(&s).unwrap();
    let q: f64 = 0.18;
    let u_minus = 0.5 * (1.0 + (1.0 - 4.0 * q).sqrt());
    let speed = (0.24 - q) / (0.4 - u_minus);
    let mut total = 0.0;
    for (t, u) in sol.times.iter().zip(&sol.states) {
        let shock = speed * t;
        total += (0..s.cells)
            .map(|i| {
                let exact = piecewise_average(s.x_a, s.dx, i, &[shock, 0.0], &[0.4, u_minus, 0.9]);
                (u[i] - exact).abs() * s.dx
            })
            .sum::<f64>();
    }
    (s.dx, total / sol.times.len() as f64)
}

#[test]
fn vv_interface_riemann_converges() {
    let (dx, err): (Vec<f64>, Vec<f64>) = [100, 200, 400, 800].into_iter().map(lwr_vv_error).unzip();
    for w in err.windows(2) {
        assert!((w[0] / w[1]).log2() >= 0.8, "{err:?}");
    }
    assert!(observed_order(&dx, &err) >= 0.8);
}

#[test]
fn cfl_dt_matches_formula() {
    let s = load("lwr_vv_u");
    // w_sup = 2, |1 - 2u| <= 1 on [0, 1]
    let u: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    assert!((cfl_dt(&u, &s.model, 0.5, 0.02).unwrap() - 0.005).abs() < 1e-15);
}

#[test]
fn germ_pair_data_is_steady() {
    let s = load("lwr_germ_pair_steady");
    let u = s.initial_state();
    let v = step(&u, s.policy_dt(&u).unwrap(), &s).unwrap();
    for (a, b) in u.iter().zip(&v) {
        assert!((a - b).abs() <= 1e-12);
    }
    let sol = run(&s).unwrap();
    let ts = extract_traces(&sol, &s, 0, (0.4, 0.5), &DEFAULT_SCALES).unwrap();
    let p = ts.limit_pair.unwrap();
    assert!((p.u_minus - 0.5).abs() <= ts.trace_tol && (p.u_plus - 0.146447).abs() <= ts.trace_tol);
    assert!(rh_check(&ts, &s.model).unwrap() <= 5.0 * s.dx);
}

#[test]
fn shock_crossing_an_edge() {
    // Burgers shock 0.5 | 0 from x = -0.25, speed 0.25, reaching the edge at t = 1
    let s = parse_scenario(
        r#"
        [model]
        template = { kind = "burgers" }
        [[model.regions]]
        x = [-1.0, 0.0]
        coefficient = { kind = "constant", value = 1.0 }
        [[model.regions]]
        x = [0.0, 1.0]
        coefficient = { kind = "constant", value = 1.0 }
        [[interfaces]]
        x = 0.0
        germ = "identity_coupling"
        [grid]
        cells = 400
        cfl = 0.45
        t_end = 2.0
        store_steps = true
        [initial]
        kind = "riemann"
        x0 = -0.25
        left = 0.5
        right = 0.0
        "#,
    )
    .unwrap();
    let sol = run(&s).unwrap();
    let before = extract_traces(&sol, &s, 0, (0.1, 0.2), &DEFAULT_SCALES).unwrap();
    assert!(before.converged);
    assert_eq!(before.limit_pair, Some(StatePair::new(0.0, 0.0)));
    let across = extract_traces(&sol, &s, 0, (0.95, 1.05), &DEFAULT_SCALES).unwrap();
    assert!(!across.converged, "oscillation {}", across.oscillation);
    let after = extract_traces(&sol, &s, 0, (1.9, 2.0), &DEFAULT_SCALES).unwrap();
    let p = after.limit_pair.unwrap();
    assert!((p.u_minus - 0.5).abs() <= after.trace_tol && (p.u_plus - 0.5).abs() <= after.trace_tol);
}

#[test]
fn affine_capacity_residual_shrinks_under_refinement() {
    let mut dx = Vec::new();
    let mut res = Vec::new();
    for cells in [200, 400, 800] {
        let s = parse_scenario(&scenario_text("lwr_affine_traces").replace("cells = 200", &format!("cells = {cells}"))).unwrap();
        let sol = run(&s).unwrap();
        let ts = extract_traces(&sol, &s, 0, (0.9, 1.0), &DEFAULT_SCALES).unwrap();
        dx.push(s.dx);
        res.push(rh_check(&ts, &s.model).unwrap());
    }
    assert!(observed_order(&dx, &res) >= 0.8, "{res:?}");
}

#[test]
fn rarefaction_entropy_residual_is_small() {
    let s = parse_scenario(&scenario_text("burgers_rarefaction").replace("cells = 400", "cells = 800")).unwrap();
    let sol = run(&s).unwrap();
    let r = entropy_residual(&sol, &s, &k_grid(&s, 9)).unwrap();
    assert!(r.off_interface_max <= 10.0 * s.dx, "{}", r.off_interface_max);
}

#[test]
fn vv_germ_is_dissipative_and_adversarial_set_is_not() {
    let lwr = load("lwr_vv_u");
    let d = is_dissipative(&GermSpec::vanishing_viscosity(), 0, &lwr.model, 1e-12, GERM_SAMPLE_GRID).unwrap();
    assert!(d.pass, "{d:?}");
    let burgers = load("burgers_bad_germ_u");
    let g = GermSpec::sampled(vec![StatePair::new(1.0, -1.0), StatePair::new(-1.0, 1.0), StatePair::new(0.0, 0.0)]);
    let d = is_dissipative(&g, 0, &burgers.model, 1e-12, GERM_SAMPLE_GRID).unwrap();
    assert!(!d.pass);
    assert!((d.max_w - 1.0).abs() <= 1e-12, "{}", d.max_w);
    assert_eq!(d.worst, (StatePair::new(-1.0, 1.0), StatePair::new(0.0, 0.0)));
    // the two jumps alone carry equal fluxes on both sides, so W vanishes between them
    let w = germ_w(StatePair::new(1.0, -1.0), StatePair::new(-1.0, 1.0), 0, &burgers.model).unwrap();
    assert_eq!(w, 0.0);
}
