//! One-sided interface traces from slab averages at shrinking scales.

use crate::error::{Error, Result};
use crate::flux_model::FluxModel;
use crate::fv_solver::{Scenario, SpaceTimeSolution};
use crate::germ::{rankine_hugoniot_residual, StatePair};

pub const DEFAULT_SCALES: [usize; 5] = [32, 16, 8, 4, 2];
/// Levels averaged per estimate when no explicit window is given.
pub const DEFAULT_WINDOW_LEVELS: usize = 5;
const TAIL: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub interface: usize,
    pub t1: f64,
    pub t2: f64,
    /// Slab widths in cells, strictly decreasing.
    pub scales: Vec<usize>,
    pub estimates: Vec<StatePair>,
    pub converged: bool,
    /// Finest-scale pair, present when converged.
    pub limit_pair: Option<StatePair>,
    /// Largest max-norm distance between the last three estimates.
    pub oscillation: f64,
    pub trace_tol: f64,
    /// Observed spread `[a, b]` when the finest estimates are unconverged
    /// but each has equal left and right traces.
    pub equal_trace_range: Option<(f64, f64)>,
}

/// `max(1e-3, 5 dx Lip)` unless the scenario overrides it.
pub fn default_trace_tol(scenario: &Scenario) -> f64 {
    scenario
        .source
        .verify
        .trace_tol
        .unwrap_or_else(|| (5.0 * scenario.dx * scenario.model.lipschitz_m()).max(1e-3))
}

pub fn extract_traces(
    sol: &SpaceTimeSolution,
    scenario: &Scenario,
    j: usize,
    t_window: (f64, f64),
    scales: &[usize],
) -> Result<TraceSample> {
    extract_traces_with_tol(sol, scenario, j, t_window, scales, default_trace_tol(scenario))
}

pub fn extract_traces_with_tol(
    sol: &SpaceTimeSolution,
    scenario: &Scenario,
    j: usize,
    t_window: (f64, f64),
    scales: &[usize],
    trace_tol: f64,
) -> Result<TraceSample> {
    let spec = scenario
        .interfaces
        .get(j)
        .ok_or(Error::InterfaceIndex { index: j, count: scenario.interfaces.len() })?;
    if sol.cells != scenario.cells {
        return Err(Error::Grid(format!("solution has {} cells, scenario {}", sol.cells, scenario.cells)));
    }
    if scales.is_empty() || scales.windows(2).any(|w| w[0] <= w[1]) || scales[scales.len() - 1] < 2 {
        return Err(Error::Range(format!("scales {scales:?} must be strictly decreasing and at least 2 cells")));
    }
    let (t1, t2) = t_window;
    let (t_lo, t_hi) = (sol.times[0], sol.times[sol.times.len() - 1]);
    let slack = 1e-12 * t_hi.abs().max(1.0);
    if !(t1 <= t2 && t1 >= t_lo - slack && t2 <= t_hi + slack) {
        return Err(Error::Range(format!("window [{t1}, {t2}] outside solution span [{t_lo}, {t_hi}]")));
    }
    let levels: Vec<usize> = (0..sol.times.len())
        .filter(|&n| sol.times[n] >= t1 - slack && sol.times[n] <= t2 + slack)
        .collect();
    if levels.is_empty() {
        return Err(Error::Range(format!("no stored time level in [{t1}, {t2}]")));
    }
    let edge = spec.edge;
    let widest = scales[0];
    if edge < widest || edge + widest > sol.cells {
        return Err(Error::Range(format!(
            "scale {widest} cells does not fit around interface {j} at cell edge {edge}"
        )));
    }
    let estimates: Vec<StatePair> = scales
        .iter()
        .map(|&r| {
            let mut left = 0.0;
            let mut right = 0.0;
            for &n in &levels {
                let u = &sol.states[n];
                left += u[edge - r..edge].iter().sum::<f64>() / r as f64;
                right += u[edge..edge + r].iter().sum::<f64>() / r as f64;
            }
            StatePair::new(left / levels.len() as f64, right / levels.len() as f64)
        })
        .collect();
    let tail = &estimates[estimates.len().saturating_sub(TAIL)..];
    let mut oscillation: f64 = 0.0;
    for a in tail {
        for b in tail {
            oscillation = oscillation
                .max((a.u_minus - b.u_minus).abs())
                .max((a.u_plus - b.u_plus).abs());
        }
    }
    let converged = oscillation <= trace_tol;
    let equal_trace_range = if !converged && tail.iter().all(|p| (p.u_minus - p.u_plus).abs() <= trace_tol) {
        let lo = tail.iter().map(|p| p.u_minus.min(p.u_plus)).fold(f64::INFINITY, f64::min);
        let hi = tail.iter().map(|p| p.u_minus.max(p.u_plus)).fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    } else {
        None
    };
    Ok(TraceSample {
        interface: j,
        t1: sol.times[levels[0]],
        t2: sol.times[levels[levels.len() - 1]],
        scales: scales.to_vec(),
        limit_pair: converged.then(|| estimates[estimates.len() - 1]),
        estimates,
        converged,
        oscillation,
        trace_tol,
        equal_trace_range,
    })
}

/// Window of `DEFAULT_WINDOW_LEVELS` stored levels centred on level `n`.
pub fn centered_window(sol: &SpaceTimeSolution, n: usize) -> (f64, f64) {
    let half = DEFAULT_WINDOW_LEVELS / 2;
    let last = sol.times.len() - 1;
    let (mut a, mut b) = (n.saturating_sub(half), (n + half).min(last));
    // keep the full width near the ends
    if b - a < 2 * half {
        if a == 0 {
            b = (2 * half).min(last);
        } else {
            a = last.saturating_sub(2 * half);
        }
    }
    (sol.times[a], sol.times[b])
}

/// Rankine-Hugoniot residual of the limit pair.
pub fn rh_check(ts: &TraceSample, model: &FluxModel) -> Result<f64> {
    match ts.limit_pair {
        Some(p) if ts.converged => rankine_hugoniot_residual(p, ts.interface, model),
        _ => Err(Error::Unconverged { interface: ts.interface }),
    }
}
