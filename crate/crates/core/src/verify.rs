//! A posteriori checks on computed fields: discrete Kruzhkov residuals, the
//! Kato remainder with its interface density, the L1 ledger over a dependence
//! cone and plain contraction for smooth coefficients.
//!
//! Every divergence is written with the scheme's own edge fluxes, so sums over
//! cells telescope. Residuals are taken between consecutive stored levels;
//! they are exact scheme identities only when every step is stored.

use crate::error::{Error, Result};
use crate::fv_solver::{Scenario, SpaceTimeSolution};
use crate::germ::{germ_w, sign};
use crate::traces::{centered_window, default_trace_tol, extract_traces_with_tol, DEFAULT_SCALES};

pub const DEFAULT_K_LEVELS: usize = 17;
/// Cells on each side of an interface attributed to its column.
pub const INTERFACE_COLUMN: usize = 1;
const ROUNDING: f64 = 1e-12;

/// Tolerances after applying scenario overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub lip: f64,
    pub tol_entropy: f64,
    pub tol_bulk: f64,
    pub tol_iface: f64,
    /// Absolute override of the ledger tolerance; otherwise `50 Lip (dx + dt) T`.
    pub tol_ledger: Option<f64>,
    pub trace_tol: f64,
    /// Allowed gap between measured and predicted interface density.
    pub tol_gap: f64,
}

impl Tolerances {
    pub fn of(scenario: &Scenario, sol: &SpaceTimeSolution) -> Self {
        let v = &scenario.source.verify;
        let lip = scenario.model.lipschitz_m();
        let dx = scenario.dx;
        let (x_a, x_b) = scenario.model.domain();
        let t = sol.times[sol.times.len() - 1];
        Self {
            lip,
            tol_entropy: v.tol_entropy.unwrap_or(20.0 * dx * lip),
            tol_bulk: v.tol_bulk.unwrap_or(20.0 * dx * (x_b - x_a) * t * lip),
            tol_iface: v.tol_interface.unwrap_or(10.0 * dx * lip),
            tol_ledger: v.tol_ledger,
            trace_tol: default_trace_tol(scenario),
            tol_gap: 10.0 * dx * lip,
        }
    }

    pub fn ledger(&self, dx: f64, dt: f64, t: f64) -> f64 {
        self.tol_ledger.unwrap_or(50.0 * self.lip * (dx + dt) * t)
    }
}

fn check_grid(sol: &SpaceTimeSolution, scenario: &Scenario) -> Result<()> {
    if sol.cells != scenario.cells || sol.dx != scenario.dx || sol.x_a != scenario.x_a {
        return Err(Error::Grid(format!(
            "solution grid ({} cells, dx {}) does not match scenario ({} cells, dx {})",
            sol.cells, sol.dx, scenario.cells, scenario.dx
        )));
    }
    if sol.states.iter().any(|u| u.len() != sol.cells) || sol.states.len() != sol.times.len() || sol.times.len() < 2 {
        return Err(Error::Grid("solution needs at least two consistent time levels".into()));
    }
    Ok(())
}

fn check_pair(u: &SpaceTimeSolution, v: &SpaceTimeSolution, scenario: &Scenario) -> Result<()> {
    check_grid(u, scenario)?;
    check_grid(v, scenario)?;
    if u.fingerprint != v.fingerprint {
        return Err(Error::Grid(format!("fingerprints differ: {} vs {}", u.fingerprint, v.fingerprint)));
    }
    if u.times != v.times {
        return Err(Error::Grid("solutions are stored at different time levels".into()));
    }
    Ok(())
}

/// `interface_of[i]` is the interface whose column holds cell `i`.
fn interface_columns(scenario: &Scenario) -> Vec<Option<usize>> {
    let mut out = vec![None; scenario.cells];
    for (j, s) in scenario.interfaces.iter().enumerate() {
        let lo = s.edge.saturating_sub(INTERFACE_COLUMN);
        let hi = (s.edge + INTERFACE_COLUMN).min(scenario.cells);
        for c in &mut out[lo..hi] {
            *c = Some(j);
        }
    }
    out
}

/// Numerical Kruzhkov flux `F(a v b) - F(a ^ b)` on every edge, componentwise.
fn kruzhkov_fluxes(scenario: &Scenario, u: &[f64], v: &[f64]) -> Vec<f64> {
    (0..=scenario.cells)
        .map(|e| {
            let (ul, ur) = scenario.edge_states(u, e);
            let (vl, vr) = scenario.edge_states(v, e);
            scenario.edge_flux(e, ul.max(vl), ur.max(vr)) - scenario.edge_flux(e, ul.min(vl), ur.min(vr))
        })
        .collect()
}

/// `k` levels uniformly spaced over the model state range.
pub fn k_grid(scenario: &Scenario, n: usize) -> Vec<f64> {
    let (lo, hi) = scenario.model.u_range();
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Residual of the entropy pair `(|u - k|, Q)` on every cell of the interval
/// `[t_n, t_{n+1}]`. The source term is the edge difference of `F(., k)`,
/// taken with one-sided fluxes next to interfaces.
pub fn residual_cells(sol: &SpaceTimeSolution, scenario: &Scenario, k: f64, n: usize) -> Result<Vec<f64>> {
    check_grid(sol, scenario)?;
    if n + 1 >= sol.times.len() {
        return Err(Error::Range(format!("interval {n} needs level {} of {}", n + 1, sol.times.len())));
    }
    let (u0, u1) = (&sol.states[n], &sol.states[n + 1]);
    let dt = sol.times[n + 1] - sol.times[n];
    let dx = scenario.dx;
    let kk = vec![k; scenario.cells];
    let q = kruzhkov_fluxes(scenario, u0, &kk);
    Ok((0..scenario.cells)
        .map(|i| {
            let time = if dt > 0.0 { ((u1[i] - k).abs() - (u0[i] - k).abs()) / dt } else { 0.0 };
            let right = scenario.edge_level_flux(i + 1, k).0;
            let left = scenario.edge_level_flux(i, k).1;
            time + (q[i + 1] - q[i]) / dx + sign(u0[i] - k) * (right - left) / dx
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub k_levels: Vec<f64>,
    /// Start and end time of every interval.
    pub intervals: Vec<(f64, f64)>,
    /// Largest positive residual over non-interface cells, intervals and levels.
    pub off_interface_max: f64,
    /// `interface_mass[j][n]`: largest column mass `sum R dx` over the levels.
    pub interface_mass: Vec<Vec<f64>>,
    pub tol_entropy: f64,
    pub pass: bool,
}

pub fn entropy_residual(sol: &SpaceTimeSolution, scenario: &Scenario, k_levels: &[f64]) -> Result<ResidualField> {
    check_grid(sol, scenario)?;
    if k_levels.is_empty() {
        return Err(Error::Range("entropy_residual needs at least one k level".into()));
    }
    let (lo, hi) = scenario.model.u_range();
    if let Some(k) = k_levels.iter().find(|&&k| !(k >= lo && k <= hi)) {
        return Err(Error::StateOutOfRange { u: *k, lo, hi });
    }
    let cols = interface_columns(scenario);
    let nj = scenario.interfaces.len();
    let intervals: Vec<(f64, f64)> = sol.times.windows(2).map(|w| (w[0], w[1])).collect();
    let mut interface_mass = vec![vec![f64::NEG_INFINITY; intervals.len()]; nj];
    let mut off_max: f64 = 0.0;
    for &k in k_levels {
        for n in 0..intervals.len() {
            let r = residual_cells(sol, scenario, k, n)?;
            let mut mass = vec![0.0; nj];
            for (i, &ri) in r.iter().enumerate() {
                match cols[i] {
                    Some(j) => mass[j] += ri * scenario.dx,
                    None => off_max = off_max.max(ri),
                }
            }
            for (row, m) in interface_mass.iter_mut().zip(&mass) {
                row[n] = row[n].max(*m);
            }
        }
    }
    let tol_entropy = Tolerances::of(scenario, sol).tol_entropy;
    Ok(ResidualField {
        k_levels: k_levels.to_vec(),
        intervals,
        off_interface_max: off_max,
        interface_mass,
        tol_entropy,
        pass: off_max <= tol_entropy,
    })
}

/// Discrete `d/dt |u - v| + d/dx Q(u, v)` on every cell of interval `n`.
pub fn kato_cells(u: &SpaceTimeSolution, v: &SpaceTimeSolution, scenario: &Scenario, n: usize) -> Result<Vec<f64>> {
    check_pair(u, v, scenario)?;
    if n + 1 >= u.times.len() {
        return Err(Error::Range(format!("interval {n} needs level {} of {}", n + 1, u.times.len())));
    }
    let dt = u.times[n + 1] - u.times[n];
    let q = kruzhkov_fluxes(scenario, &u.states[n], &v.states[n]);
    Ok((0..scenario.cells)
        .map(|i| {
            let d1 = (u.states[n + 1][i] - v.states[n + 1][i]).abs();
            let d0 = (u.states[n][i] - v.states[n][i]).abs();
            let time = if dt > 0.0 { (d1 - d0) / dt } else { 0.0 };
            time + (q[i + 1] - q[i]) / scenario.dx
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSeries {
    pub interface: usize,
    /// Measured column density on each interval.
    pub measured: Vec<f64>,
    /// `W` from the extracted traces at the interval start, when both traces converged.
    pub predicted: Vec<Option<f64>>,
    pub max_measured: f64,
    /// `max |w - W|` over intervals with a prediction.
    pub max_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KatoReport {
    pub intervals: Vec<(f64, f64)>,
    pub series: Vec<InterfaceSeries>,
    /// `sum max(D, 0) dx dt` over non-interface cells.
    pub off_interface_positive_mass: f64,
    pub tol_bulk: f64,
    pub tol_iface: f64,
    pub tol_gap: f64,
    pub pass: bool,
}

impl KatoReport {
    pub fn max_measured(&self) -> f64 {
        self.series.iter().map(|s| s.max_measured).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether every available prediction is within `tol_gap` of the measurement.
    pub fn gap_pass(&self) -> bool {
        self.series.iter().all(|s| s.max_gap.is_none_or(|g| g <= self.tol_gap))
    }
}

pub fn kato_remainder(u: &SpaceTimeSolution, v: &SpaceTimeSolution, scenario: &Scenario) -> Result<KatoReport> {
    check_pair(u, v, scenario)?;
    let tol = Tolerances::of(scenario, u);
    let cols = interface_columns(scenario);
    let nj = scenario.interfaces.len();
    let intervals: Vec<(f64, f64)> = u.times.windows(2).map(|w| (w[0], w[1])).collect();
    let mut measured = vec![Vec::with_capacity(intervals.len()); nj];
    let mut positive = 0.0;
    for (n, &(t0, t1)) in intervals.iter().enumerate() {
        let d = kato_cells(u, v, scenario, n)?;
        let mut col = vec![0.0; nj];
        for (i, &di) in d.iter().enumerate() {
            match cols[i] {
                Some(j) => col[j] += di * scenario.dx,
                None => positive += di.max(0.0) * scenario.dx * (t1 - t0),
            }
        }
        for j in 0..nj {
            measured[j].push(col[j]);
        }
    }
    let mut series = Vec::with_capacity(nj);
    for (j, measured) in measured.into_iter().enumerate() {
        let mut predicted = Vec::with_capacity(intervals.len());
        for n in 0..intervals.len() {
            let window = centered_window(u, n);
            let tu = extract_traces_with_tol(u, scenario, j, window, &DEFAULT_SCALES, tol.trace_tol);
            let tv = extract_traces_with_tol(v, scenario, j, window, &DEFAULT_SCALES, tol.trace_tol);
            predicted.push(match (tu, tv) {
                (Ok(a), Ok(b)) => match (a.limit_pair, b.limit_pair) {
                    (Some(pa), Some(pb)) => Some(germ_w(pa, pb, j, &scenario.model)?),
                    _ => None,
                },
                _ => None,
            });
        }
        let max_measured = measured.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let max_gap = measured
            .iter()
            .zip(&predicted)
            .filter_map(|(m, p)| p.map(|p| (m - p).abs()))
            .reduce(f64::max);
        series.push(InterfaceSeries { interface: j, measured, predicted, max_measured, max_gap });
    }
    let pass = positive <= tol.tol_bulk && series.iter().all(|s| s.max_measured <= tol.tol_iface);
    Ok(KatoReport {
        intervals,
        series,
        off_interface_positive_mass: positive,
        tol_bulk: tol.tol_bulk,
        tol_iface: tol.tol_iface,
        tol_gap: tol.tol_gap,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionLedger {
    pub center: f64,
    pub radius: f64,
    /// Stored time level used as `T`.
    pub time: f64,
    pub speed: f64,
    pub lhs: f64,
    pub rhs_initial: f64,
    /// `sum_j int_0^T w_j dt` over interfaces inside the cone.
    pub rhs_interface: f64,
    pub slack: f64,
    pub tol_ledger: f64,
    pub pass: bool,
}

/// Midpoint of the interface cluster, or of the domain without interfaces.
pub fn default_center(scenario: &Scenario) -> f64 {
    match (scenario.interfaces.first(), scenario.interfaces.last()) {
        (Some(a), Some(b)) => 0.5 * (a.x + b.x),
        _ => 0.5 * (scenario.x_a + scenario.x_b),
    }
}

/// Largest radius whose cone at time `t` stays inside the domain, less one cell.
pub fn default_radius(scenario: &Scenario, center: f64, t: f64) -> f64 {
    let reach = scenario.model.lipschitz_m() * t;
    (center - scenario.x_a).min(scenario.x_b - center) - reach - scenario.dx
}

fn l1_over(u: &[f64], v: &[f64], scenario: &Scenario, lo: f64, hi: f64) -> f64 {
    (0..scenario.cells)
        .filter(|&i| {
            let x = scenario.cell_center(i);
            x > lo && x < hi
        })
        .map(|i| (u[i] - v[i]).abs() * scenario.dx)
        .sum()
}

pub fn contraction_ledger(
    u: &SpaceTimeSolution,
    v: &SpaceTimeSolution,
    scenario: &Scenario,
    radius: Option<f64>,
    time: Option<f64>,
    kato: &KatoReport,
) -> Result<ContractionLedger> {
    check_pair(u, v, scenario)?;
    let vs = &scenario.source.verify;
    let center = vs.center.unwrap_or_else(|| default_center(scenario));
    let level = u.level_at(time.or(vs.time).unwrap_or(scenario.t_end));
    let t = u.times[level];
    let radius = radius.or(vs.radius).unwrap_or_else(|| default_radius(scenario, center, t));
    let speed = scenario.model.lipschitz_m();
    let reach = radius + speed * t;
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(radius > 0.0) || center - reach < scenario.x_a - ROUNDING || center + reach > scenario.x_b + ROUNDING {
        return Err(Error::OutsideDomain { x: if radius > 0.0 { center + reach } else { radius }, x_a: scenario.x_a, x_b: scenario.x_b });
    }
    let lhs = l1_over(&u.states[level], &v.states[level], scenario, center - radius, center + radius);
    let rhs_initial = l1_over(&u.states[0], &v.states[0], scenario, center - reach, center + reach);
    let mut rhs_interface = 0.0;
    for s in &kato.series {
        let x = scenario.interfaces[s.interface].x;
        if (x - center).abs() < reach {
            for (n, &(t0, t1)) in kato.intervals.iter().enumerate().take(level) {
                rhs_interface += s.measured[n] * (t1 - t0);
            }
        }
    }
    let slack = rhs_initial + rhs_interface - lhs;
    let dt_max = u.dt_history.iter().copied().fold(0.0, f64::max);
    let tol_ledger = Tolerances::of(scenario, u).ledger(scenario.dx, dt_max, t);
    Ok(ContractionLedger {
        center,
        radius,
        time: t,
        speed,
        lhs,
        rhs_initial,
        rhs_interface,
        slack,
        tol_ledger,
        pass: slack >= -tol_ledger,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevReport {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub tol_ledger: f64,
    pub bounded: bool,
    pub monotone: bool,
    pub pass: bool,
}

/// `||u(t) - v(t)||_1` at every stored level for interface-free models.
pub fn sobolev_contraction_check(u: &SpaceTimeSolution, v: &SpaceTimeSolution, scenario: &Scenario) -> Result<SobolevReport> {
    if !scenario.interfaces.is_empty() {
        return Err(Error::Precondition(format!(
            "contraction check needs a model without interfaces, found {}",
            scenario.interfaces.len()
        )));
    }
    check_pair(u, v, scenario)?;
    let distances: Vec<f64> = u
        .states
        .iter()
        .zip(&v.states)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * scenario.dx)
        .collect();
    let dt_max = u.dt_history.iter().copied().fold(0.0, f64::max);
    let t = u.times[u.times.len() - 1];
    let tol_ledger = Tolerances::of(scenario, u).ledger(scenario.dx, dt_max, t);
    let bounded = distances.iter().all(|&d| d <= distances[0] + tol_ledger);
    let monotone = distances.windows(2).all(|w| w[1] <= w[0] + ROUNDING * w[0].max(1.0));
    Ok(SobolevReport { times: u.times.clone(), distances, tol_ledger, bounded, monotone, pass: bounded && monotone })
}
