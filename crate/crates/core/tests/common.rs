#![allow(dead_code)]

use std::path::PathBuf;

use discflux::fv_solver::Scenario;
use discflux::scenario::parse_scenario;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"))
}

pub fn scenario_text(name: &str) -> String {
    std::fs::read_to_string(scenario_path(name)).unwrap()
}

pub fn load(name: &str) -> Scenario {
    parse_scenario(&scenario_text(name)).unwrap()
}

/// Least-squares slope of `log e` against `log dx`.
pub fn observed_order(dx: &[f64], err: &[f64]) -> f64 {
    let xs: Vec<f64> = dx.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Cell averages of a piecewise-constant profile given by breakpoints and values.
pub fn piecewise_average(x_a: f64, dx: f64, i: usize, breaks: &[f64], values: &[f64]) -> f64 {
    let (l, r) = (x_a + dx * i as f64, x_a + dx * (i + 1) as f64);
    let mut acc = 0.0;
    for (k, &v) in values.iter().enumerate() {
        let lo = if k == 0 { f64::NEG_INFINITY } else { breaks[k - 1] };
        let hi = if k == breaks.len() { f64::INFINITY } else { breaks[k] };
        acc += v * (r.min(hi) - l.max(lo)).max(0.0);
    }
    acc / dx
}
