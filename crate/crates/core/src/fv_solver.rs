//! First-order conservative finite-volume integrator on a uniform grid.
//!
//! Interfaces sit on cell edges. Inside a region the edge flux is the chosen
//! two-point flux with the coefficient frozen at the edge abscissa; on an
//! interface edge it is the germ coupling built from the two one-sided fluxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux_model::{FluxModel, ScalarFlux};
use crate::germ::{GermSpec, StatePair};
use crate::riemann::{pair_projection, unimodal_peak, Coupling, DemandSupply, InteriorFlux};
use crate::scenario::ScenarioFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Outflow,
    Periodic,
}

/// How the step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimestepPolicy {
    /// `cfl_dt` on the current state.
    #[default]
    Adaptive,
    /// `cfl * dx / M` with the model bound `M`, identical for every run of a model.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Constant { value: f64 },
    Riemann { x0: f64, left: f64, right: f64 },
    /// `values[i]` on `(breaks[i-1], breaks[i])`.
    PiecewiseConstant { breaks: Vec<f64>, values: Vec<f64> },
    /// `base + amplitude * exp(-((x - center) / width)^2)`
    Gaussian { base: f64, amplitude: f64, center: f64, width: f64 },
    /// `base + amplitude * tanh((x - center) / width)`
    Tanh { base: f64, amplitude: f64, center: f64, width: f64 },
    /// `base + amplitude * sin(wavenumber * x + phase)`
    Sine { base: f64, amplitude: f64, wavenumber: f64, phase: f64 },
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Scenario(format!("initial data: {m}")));
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        match self {
            InitialData::Constant { value } if !value.is_finite() => bad("value must be finite"),
            InitialData::Riemann { x0, left, right } if !finite(&[*x0, *left, *right]) => {
                bad("riemann data must be finite")
            }
            InitialData::PiecewiseConstant { breaks, values } => {
                if values.len() != breaks.len() + 1 {
                    bad("piecewise_constant needs one more value than breaks")
                } else if !finite(breaks) || !finite(values) || breaks.windows(2).any(|w| w[0] >= w[1]) {
                    bad("piecewise_constant breaks must be finite and increasing")
                } else {
                    Ok(())
                }
            }
            InitialData::Gaussian { base, amplitude, center, width }
            | InitialData::Tanh { base, amplitude, center, width } => {
                if !finite(&[*base, *amplitude, *center, *width]) || *width <= 0.0 {
                    bad("profile parameters must be finite with width > 0")
                } else {
                    Ok(())
                }
            }
            InitialData::Sine { base, amplitude, wavenumber, phase } if !finite(&[*base, *amplitude, *wavenumber, *phase]) => {
                bad("sine parameters must be finite")
            }
            _ => Ok(()),
        }
    }

    /// Cell values: exact averages for piecewise-constant data, centre values for smooth profiles.
    pub fn cell_values(&self, x_a: f64, dx: f64, cells: usize) -> Vec<f64> {
        let pieces = |breaks: &[f64], values: &[f64], i: usize| {
            let (l, r) = (x_a + dx * i as f64, x_a + dx * (i + 1) as f64);
            let mut acc = 0.0;
            for (k, &v) in values.iter().enumerate() {
                let lo = if k == 0 { f64::NEG_INFINITY } else { breaks[k - 1] };
                let hi = if k == breaks.len() { f64::INFINITY } else { breaks[k] };
                let overlap = r.min(hi) - l.max(lo);
                if overlap > 0.0 {
                    acc += v * overlap;
                }
            }
            acc / (r - l)
        };
        (0..cells)
            .map(|i| {
                let xc = x_a + dx * (i as f64 + 0.5);
                match self {
                    InitialData::Constant { value } => *value,
                    InitialData::Riemann { x0, left, right } => pieces(&[*x0], &[*left, *right], i),
                    InitialData::PiecewiseConstant { breaks, values } => pieces(breaks, values, i),
                    InitialData::Gaussian { base, amplitude, center, width } => {
                        base + amplitude * (-((xc - center) / width).powi(2)).exp()
                    }
                    InitialData::Tanh { base, amplitude, center, width } => {
                        base + amplitude * ((xc - center) / width).tanh()
                    }
                    InitialData::Sine { base, amplitude, wavenumber, phase } => {
                        base + amplitude * (wavenumber * xc + phase).sin()
                    }
                }
            })
            .collect()
    }
}

/// Resolved numerical coupling at one interface.
#[derive(Debug, Clone, PartialEq)]
pub enum InterfaceCoupling {
    DemandSupply { theta_minus: f64, theta_plus: f64 },
    Projection { pairs: Vec<StatePair> },
    /// Ordinary interior flux; only valid where the flux is continuous.
    Classical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSpec {
    pub x: f64,
    /// Index of the cell edge carrying the interface.
    pub edge: usize,
    pub germ: GermSpec,
    pub coupling: InterfaceCoupling,
}

impl InterfaceSpec {
    pub fn resolve(j: usize, x: f64, edge: usize, germ: GermSpec, coupling: Option<Coupling>, model: &FluxModel) -> Result<Self> {
        use crate::germ::GermKind;
        germ.validate(j, model)?;
        let coupling = match (germ.kind, coupling) {
            (GermKind::VanishingViscosity, None | Some(Coupling::VvDemandSupply)) => {
                let (fm, fp) = model.side_fluxes(j)?;
                let (lo, hi) = model.u_range();
                let unsupported = |side| Error::UnsupportedCoupling {
                    interface: j,
                    reason: format!("{side} flux is not unimodal on [{lo}, {hi}]; declare a sampled_set germ with pair_projection"),
                };
                InterfaceCoupling::DemandSupply {
                    theta_minus: unimodal_peak(fm, lo, hi).ok_or_else(|| unsupported("left"))?,
                    theta_plus: unimodal_peak(fp, lo, hi).ok_or_else(|| unsupported("right"))?,
                }
            }
            (GermKind::SampledSet, None | Some(Coupling::PairProjection)) => {
                InterfaceCoupling::Projection { pairs: germ.pairs.clone() }
            }
            (GermKind::IdentityCoupling, None) => {
                if model.sigma_s_mass()[j] > 1e-12 {
                    return Err(Error::UnsupportedCoupling {
                        interface: j,
                        reason: "identity_coupling requires a flux that is continuous across the interface".into(),
                    });
                }
                InterfaceCoupling::Classical
            }
            (kind, Some(c)) => {
                return Err(Error::Scenario(format!(
                    "interface {j}: coupling {c:?} is not compatible with germ {kind:?}"
                )))
            }
        };
        Ok(Self { x, edge, germ, coupling })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Edge {
    Interior { w: f64 },
    Interface { j: usize, w_minus: f64, w_plus: f64 },
}

/// A validated scenario: flux model, interface couplings, grid and data.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: FluxModel,
    pub interfaces: Vec<InterfaceSpec>,
    pub x_a: f64,
    pub x_b: f64,
    pub cells: usize,
    pub dx: f64,
    pub t_end: f64,
    pub cfl: f64,
    /// Interior snapshot count; `t = 0` and `t_end` are always stored.
    pub snapshots: usize,
    /// Store every time level instead of only the snapshots.
    pub store_steps: bool,
    pub timestep: TimestepPolicy,
    pub scheme: InteriorFlux,
    pub boundary: Boundary,
    pub initial: InitialData,
    pub source: ScenarioFile,
    pub fingerprint: String,
    edges: Vec<Edge>,
}

pub const SNAPSHOTS_DEFAULT: usize = 64;
const SPEED_FLOOR: f64 = 1e-14;

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        model: FluxModel,
        interfaces: Vec<InterfaceSpec>,
        cells: usize,
        t_end: f64,
        cfl: f64,
        snapshots: usize,
        store_steps: bool,
        timestep: TimestepPolicy,
        scheme: InteriorFlux,
        boundary: Boundary,
        initial: InitialData,
        source: ScenarioFile,
        fingerprint: String,
    ) -> Result<Self> {
        let (x_a, x_b) = model.domain();
        let dx = (x_b - x_a) / cells as f64;
        let mut edges = Vec::with_capacity(cells + 1);
        for e in 0..=cells {
            let x = if e == cells { x_b } else { x_a + dx * e as f64 };
            if let Some(j) = interfaces.iter().position(|s| s.edge == e) {
                let (w_minus, w_plus) = model.coefficient_traces(j);
                edges.push(Edge::Interface { j, w_minus, w_plus });
            } else {
                let r = model.edge_region(x);
                let w = model.regions()[r].coefficient.value(x);
                edges.push(Edge::Interior { w });
            }
        }
        if boundary == Boundary::Periodic {
            let (wa, wb) = match (edges[0], edges[cells]) {
                (Edge::Interior { w: a }, Edge::Interior { w: b }) => (a, b),
                _ => return Err(Error::Scenario("periodic boundary cannot carry an interface".into())),
            };
            if (wa - wb).abs() > 1e-12 * wa.abs().max(1.0) {
                return Err(Error::Scenario(format!(
                    "periodic boundary requires matching coefficients at both ends ({wa} vs {wb})"
                )));
            }
        }
        Ok(Self {
            model,
            interfaces,
            x_a,
            x_b,
            cells,
            dx,
            t_end,
            cfl,
            snapshots,
            store_steps,
            timestep,
            scheme,
            boundary,
            initial,
            source,
            fingerprint,
            edges,
        })
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_a + self.dx * (i as f64 + 0.5)
    }

    pub fn initial_state(&self) -> Vec<f64> {
        self.initial.cell_values(self.x_a, self.dx, self.cells)
    }

    /// Left and right states seen by edge `e`, with ghost cells at the ends.
    pub fn edge_states(&self, u: &[f64], e: usize) -> (f64, f64) {
        let n = u.len();
        match self.boundary {
            Boundary::Outflow => {
                let l = if e == 0 { u[0] } else { u[e - 1] };
                let r = if e == n { u[n - 1] } else { u[e] };
                (l, r)
            }
            Boundary::Periodic => {
                let l = if e == 0 { u[n - 1] } else { u[e - 1] };
                let r = if e == n { u[0] } else { u[e] };
                (l, r)
            }
        }
    }

    /// Numerical flux through edge `e`.
    pub fn edge_flux(&self, e: usize, u_l: f64, u_r: f64) -> f64 {
        match self.edges[e] {
            Edge::Interior { w } => self.scheme.eval(self.model.flux_with(w), u_l, u_r),
            Edge::Interface { j, w_minus, w_plus } => {
                let fm = self.model.flux_with(w_minus);
                let fp = self.model.flux_with(w_plus);
                interface_flux(&self.interfaces[j].coupling, self.scheme, fm, fp, u_l, u_r)
            }
        }
    }

    /// Edge flux at frozen state `k` on both sides, i.e. `F(x_e, k)` with the
    /// interface edge reporting the pair `(f-(k), f+(k))`.
    pub fn edge_level_flux(&self, e: usize, k: f64) -> (f64, f64) {
        match self.edges[e] {
            Edge::Interior { w } => {
                let v = self.model.flux_with(w).eval(k);
                (v, v)
            }
            Edge::Interface { w_minus, w_plus, .. } => {
                (self.model.flux_with(w_minus).eval(k), self.model.flux_with(w_plus).eval(k))
            }
        }
    }

    pub fn is_interface_edge(&self, e: usize) -> Option<usize> {
        match self.edges[e] {
            Edge::Interface { j, .. } => Some(j),
            Edge::Interior { .. } => None,
        }
    }

    /// Largest characteristic speed over the states spanned by `u`.
    pub fn max_speed(&self, u: &[f64]) -> f64 {
        max_speed(u, &self.model)
    }

    /// Step used by `run` from state `u`.
    pub fn policy_dt(&self, u: &[f64]) -> Result<f64> {
        match self.timestep {
            TimestepPolicy::Adaptive => cfl_dt(u, &self.model, self.cfl, self.dx),
            TimestepPolicy::Fixed => {
                let m = self.model.lipschitz_m();
                Ok(if m < SPEED_FLOOR { self.cfl * self.dx } else { self.cfl * self.dx / m })
            }
        }
    }

    /// Snapshot times `k t_end / (snapshots + 1)`, `k = 0..=snapshots + 1`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let n = self.snapshots + 1;
        (0..=n)
            .map(|k| if k == n { self.t_end } else { self.t_end * k as f64 / n as f64 })
            .collect()
    }
}

fn interface_flux(
    coupling: &InterfaceCoupling,
    scheme: InteriorFlux,
    fm: ScalarFlux<'_>,
    fp: ScalarFlux<'_>,
    u_l: f64,
    u_r: f64,
) -> f64 {
    match coupling {
        InterfaceCoupling::DemandSupply { theta_minus, theta_plus } => DemandSupply {
            interface: 0,
            f_minus: fm,
            f_plus: fp,
            theta_minus: *theta_minus,
            theta_plus: *theta_plus,
            u_range: (f64::NEG_INFINITY, f64::INFINITY),
        }
        .flux(u_l, u_r),
        InterfaceCoupling::Projection { pairs } => match pair_projection(pairs, u_l, u_r) {
            Some(p) => fm.eval(p.u_minus),
            None => fm.eval(u_l),
        },
        InterfaceCoupling::Classical => scheme.eval(fm, u_l, u_r),
    }
}

fn max_speed(u: &[f64], model: &FluxModel) -> f64 {
    let (lo, hi) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    model.w_sup() * model.template().max_abs_slope(lo, hi)
}

/// `cfl * dx / max |dF/du|` over every region and the span of the present states.
pub fn cfl_dt(u: &[f64], model: &FluxModel, cfl: f64, dx: f64) -> Result<f64> {
    if u.is_empty() {
        return Err(Error::Range("cfl_dt needs a non-empty state".into()));
    }
    let speed = max_speed(u, model);
    Ok(if speed < SPEED_FLOOR { cfl * dx } else { cfl * dx / speed })
}

/// One forward-Euler conservative update.
pub fn step(u: &[f64], dt: f64, scenario: &Scenario) -> Result<Vec<f64>> {
    if u.len() != scenario.cells {
        return Err(Error::Grid(format!("state has {} cells, grid has {}", u.len(), scenario.cells)));
    }
    let speed = scenario.max_speed(u);
    if speed >= SPEED_FLOOR {
        let max_dt = scenario.dx / speed;
        // written negated so a NaN dt is rejected
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(dt <= max_dt * (1.0 + 1e-12)) {
            return Err(Error::Cfl { dt, max_dt });
        }
    }
    let mut out = Vec::with_capacity(u.len());
    step_into(u, dt, scenario, &mut out);
    Ok(out)
}

fn step_into(u: &[f64], dt: f64, scenario: &Scenario, out: &mut Vec<f64>) {
    let n = u.len();
    let lambda = dt / scenario.dx;
    out.clear();
    let (l, r) = scenario.edge_states(u, 0);
    let mut q_left = scenario.edge_flux(0, l, r);
    for i in 0..n {
        let (l, r) = scenario.edge_states(u, i + 1);
        let q_right = scenario.edge_flux(i + 1, l, r);
        out.push(u[i] - lambda * (q_right - q_left));
        q_left = q_right;
    }
}

/// Stored time levels of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSolution {
    pub fingerprint: String,
    pub scenario: ScenarioFile,
    pub x_a: f64,
    pub dx: f64,
    pub cells: usize,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Every step size taken, in order.
    pub dt_history: Vec<f64>,
    /// Largest excursion outside `[min u0, max u0]` over all steps.
    pub max_principle_excess: f64,
}

impl SpaceTimeSolution {
    pub fn final_state(&self) -> &[f64] {
        &self.states[self.states.len() - 1]
    }

    pub fn mass(&self, level: usize) -> f64 {
        self.states[level].iter().sum::<f64>() * self.dx
    }

    /// Level index with time closest to `t`.
    pub fn level_at(&self, t: f64) -> usize {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(k, _)| k)
            .unwrap_or(0)
    }
}

/// Integrates from `t = 0` to `t_end`, landing exactly on every snapshot time.
pub fn run(scenario: &Scenario) -> Result<SpaceTimeSolution> {
    let mut u = scenario.initial_state();
    let (u_min, u_max) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let targets = scenario.snapshot_times();
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let mut dt_history = Vec::new();
    let mut excess: f64 = 0.0;
    let mut scratch = Vec::with_capacity(u.len());
    let mut t = 0.0;
    let mut next = 1;
    let eps = 1e-12 * scenario.t_end;
    while next < targets.len() {
        let mut dt = scenario.policy_dt(&u)?;
        let target = targets[next];
        let hit = t + dt >= target - eps;
        if hit {
            dt = target - t;
        }
        step_into(&u, dt, scenario, &mut scratch);
        std::mem::swap(&mut u, &mut scratch);
        dt_history.push(dt);
        t = if hit { target } else { t + dt };
        if let Some(cell) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: dt_history.len(), cell, t });
        }
        for &v in &u {
            excess = excess.max(u_min - v).max(v - u_max);
        }
        if hit {
            next += 1;
        }
        if hit || scenario.store_steps {
            times.push(t);
            states.push(u.clone());
        }
    }
    Ok(SpaceTimeSolution {
        fingerprint: scenario.fingerprint.clone(),
        scenario: scenario.source.clone(),
        x_a: scenario.x_a,
        dx: scenario.dx,
        cells: scenario.cells,
        times,
        states,
        dt_history,
        max_principle_excess: excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    fn scenario(toml: &str) -> Scenario {
        parse_scenario(toml).unwrap()
    }

    const BURGERS: &str = r#"
        [model]
        template = { kind = "burgers" }
        u_range = [-1.0, 1.0]
        [[model.regions]]
        x = [-1.0, 1.0]
        coefficient = { kind = "constant", value = 1.0 }
        [grid]
        cells = 200
        cfl = 0.45
        t_end = 0.2
        [initial]
        kind = "riemann"
        x0 = 0.1
        left = 1.0
        right = -1.0
    "#;

    const LWR_GERM_PAIR: &str = r#"
        [model]
        template = { kind = "lwr" }
        u_range = [0.0, 1.0]
        [[model.regions]]
        x = [-1.0, 0.0]
        coefficient = { kind = "constant", value = 1.0 }
        [[model.regions]]
        x = [0.0, 1.0]
        coefficient = { kind = "constant", value = 2.0 }
        [[interfaces]]
        x = 0.0
        germ = "vanishing_viscosity"
        [grid]
        cells = 200
        cfl = 0.45
        t_end = 0.2
        [initial]
        kind = "riemann"
        x0 = 0.0
        left = 0.5
        right = 0.14644660940672624
    "#;

    #[test]
    fn cfl_dt_examples() {
        let s = scenario(BURGERS);
        let u: Vec<f64> = (0..11).map(|k| -1.0 + 0.2 * k as f64).collect();
        assert!((cfl_dt(&u, &s.model, 0.45, 0.01).unwrap() - 0.0045).abs() < 1e-15);
        assert!((cfl_dt(&[0.0; 5], &s.model, 0.45, 0.01).unwrap() - 0.0045).abs() < 1e-15);
        assert!(cfl_dt(&[], &s.model, 0.45, 0.01).is_err());
        let l = scenario(&LWR_GERM_PAIR.replace("value = 2.0", "value = 1.0"));
        let u: Vec<f64> = (0..11).map(|k| 0.1 * k as f64).collect();
        assert!((cfl_dt(&u, &l.model, 0.5, 0.02).unwrap() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn constant_state_is_steady() {
        let s = scenario(BURGERS);
        let u = vec![0.3; s.cells];
        let v = step(&u, 0.004, &s).unwrap();
        assert!(v.iter().all(|&x| x == 0.3));
    }

    #[test]
    fn stationary_shock_off_interface() {
        let s = scenario(BURGERS);
        let u = s.initial_state();
        let v = step(&u, 0.004, &s).unwrap();
        for (a, b) in u.iter().zip(&v) {
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn germ_pair_data_is_steady_across_interface() {
        let s = scenario(LWR_GERM_PAIR);
        let u = s.initial_state();
        let dt = s.policy_dt(&u).unwrap();
        let v = step(&u, dt, &s).unwrap();
        let e = s.interfaces[0].edge;
        for i in e - 2..e + 2 {
            assert!((u[i] - v[i]).abs() <= 1e-12, "cell {i}: {} -> {}", u[i], v[i]);
        }
    }

    #[test]
    fn constant_state_not_steady_across_flux_jump() {
        let s = scenario(LWR_GERM_PAIR);
        let u = vec![0.3; s.cells];
        let v = step(&u, 0.002, &s).unwrap();
        let e = s.interfaces[0].edge;
        assert!((v[e] - 0.3).abs() > 1e-6);
    }

    #[test]
    fn cfl_violation_rejected() {
        let s = scenario(BURGERS);
        let u = s.initial_state();
        assert!(matches!(step(&u, 0.02, &s), Err(Error::Cfl { .. })));
    }

    #[test]
    fn run_hits_snapshot_times() {
        let s = scenario(BURGERS);
        let sol = run(&s).unwrap();
        assert_eq!(sol.times.len(), SNAPSHOTS_DEFAULT + 2);
        assert_eq!(sol.times, s.snapshot_times());
        let total: f64 = sol.dt_history.iter().sum();
        assert!((total - 0.2).abs() < 1e-12);
    }

    #[test]
    fn store_steps_keeps_every_level() {
        let s = scenario(&BURGERS.replace("t_end = 0.2", "t_end = 0.2\nstore_steps = true"));
        let sol = run(&s).unwrap();
        assert_eq!(sol.times.len(), sol.dt_history.len() + 1);
        for (k, dt) in sol.dt_history.iter().enumerate() {
            assert!((sol.times[k + 1] - sol.times[k] - dt).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_data_constant_solution() {
        let src = BURGERS.replace("kind = \"riemann\"\n        x0 = 0.1\n        left = 1.0\n        right = -1.0", "kind = \"constant\"\n        value = 0.4");
        let sol = run(&scenario(&src)).unwrap();
        assert!(sol.states.iter().all(|s| s.iter().all(|&v| v == 0.4)));
    }

    #[test]
    fn riemann_cell_averages_are_exact() {
        let d = InitialData::Riemann { x0: 0.05, left: 1.0, right: 0.0 };
        let v = d.cell_values(0.0, 0.1, 3);
        assert_eq!(v, vec![0.5, 0.0, 0.0]);
    }
}
