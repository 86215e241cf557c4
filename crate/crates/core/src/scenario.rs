//! Scenario files (TOML): model, interfaces, grid, initial data and verifier settings.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::flux_model::{Coefficient, FluxModel, Region, TemplateKind};
use crate::fv_solver::{Boundary, InitialData, InterfaceSpec, Scenario, TimestepPolicy, SNAPSHOTS_DEFAULT};
use crate::germ::{GermKind, GermSpec, StatePair, RH_TOLERANCE_ANALYTIC};
use crate::riemann::{Coupling, InteriorFlux};

pub const MAX_CELLS: usize = 10_000_000;
pub const MAX_SNAPSHOTS: usize = 100_000;
pub const MAX_K_LEVELS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub interfaces: Vec<InterfaceSection>,
    pub grid: GridSection,
    pub initial: InitialData,
    #[serde(default, skip_serializing_if = "VerifySection::is_empty")]
    pub verify: VerifySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub template: TemplateKind,
    /// Defaults to the span of the initial data widened by 0.1 on each side.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_range: Option<[f64; 2]>,
    pub regions: Vec<RegionSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub x: [f64; 2],
    pub coefficient: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSection {
    pub x: f64,
    pub germ: GermKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Coupling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rh_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub cells: usize,
    pub cfl: f64,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub store_steps: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestep: Option<TimestepPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<InteriorFlux>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
}

/// Verifier overrides; anything left out is derived from the grid and model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_entropy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_bulk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_interface: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_ledger: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_tol: Option<f64>,
}

impl VerifySection {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Serialize)]
struct FingerprintView<'a> {
    model: &'a ModelSection,
    interfaces: &'a [InterfaceSection],
    grid: &'a GridSection,
}

impl ScenarioFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// sha256 of the canonical model, interface and grid sections. Two runs
    /// differing only in initial data or verifier settings share it.
    pub fn fingerprint(&self) -> String {
        let view = FingerprintView { model: &self.model, interfaces: &self.interfaces, grid: &self.grid };
        let canon = toml::to_string(&view).expect("fingerprint view serializes");
        hex::encode(Sha256::digest(canon.as_bytes()))
    }

    /// Validates the file and resolves defaults.
    pub fn build(&self) -> Result<Scenario> {
        let bad = |m: String| Err(Error::Scenario(m));
        let g = &self.grid;
        if !(2..=MAX_CELLS).contains(&g.cells) {
            return bad(format!("[grid] cells = {} must be in [2, {MAX_CELLS}]", g.cells));
        }
        if !(g.cfl > 0.0 && g.cfl < 1.0) {
            return bad(format!("[grid] cfl = {} is out of (0, 1)", g.cfl));
        }
        if !(g.t_end > 0.0 && g.t_end.is_finite()) {
            return bad(format!("[grid] t_end = {} must be positive and finite", g.t_end));
        }
        let snapshots = g.snapshots.unwrap_or(SNAPSHOTS_DEFAULT);
        if snapshots > MAX_SNAPSHOTS {
            return bad(format!("[grid] snapshots = {snapshots} exceeds {MAX_SNAPSHOTS}"));
        }
        let m = &self.model;
        if m.regions.is_empty() {
            return bad("[model] needs at least one [[model.regions]] entry".into());
        }
        let x_a = m.regions[0].x[0];
        let x_b = m.regions[m.regions.len() - 1].x[1];
        if !(x_a.is_finite() && x_b.is_finite() && x_a < x_b) {
            return bad(format!("[[model.regions]] span [{x_a}, {x_b}] is not a valid domain"));
        }
        let dx = (x_b - x_a) / g.cells as f64;
        self.initial.validate()?;
        let u0 = self.initial.cell_values(x_a, dx, g.cells);
        let (u_min, u_max) = u0.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let u_range = match m.u_range {
            Some([lo, hi]) => {
                if u_min < lo || u_max > hi {
                    return bad(format!(
                        "[model] u_range = [{lo}, {hi}] does not contain the initial data span [{u_min}, {u_max}]"
                    ));
                }
                (lo, hi)
            }
            None => (u_min - 0.1, u_max + 0.1),
        };
        let regions = m
            .regions
            .iter()
            .map(|r| Region { x_left: r.x[0], x_right: r.x[1], coefficient: r.coefficient.clone() })
            .collect();
        let model = FluxModel::new(m.template.clone(), regions, u_range)?;

        let boundaries = model.interfaces().to_vec();
        if self.interfaces.len() != boundaries.len() {
            return bad(format!(
                "{} region boundaries need {} [[interfaces]] entries, found {}",
                boundaries.len(),
                boundaries.len(),
                self.interfaces.len()
            ));
        }
        let mut interfaces = Vec::with_capacity(boundaries.len());
        for (j, (sec, &xb)) in self.interfaces.iter().zip(&boundaries).enumerate() {
            if (sec.x - xb).abs() > 1e-12 * xb.abs().max(1.0) {
                return bad(format!("[[interfaces]] {j}: x = {} does not match region boundary {xb}", sec.x));
            }
            let pos = (sec.x - x_a) / dx;
            let edge = pos.round();
            if (pos - edge).abs() > 1e-9 {
                return bad(format!("[[interfaces]] {j}: x = {} is not on a cell edge (dx = {dx})", sec.x));
            }
            let rh_tolerance = sec.rh_tolerance.unwrap_or(RH_TOLERANCE_ANALYTIC);
            if !(rh_tolerance >= 0.0 && rh_tolerance.is_finite()) {
                return bad(format!("[[interfaces]] {j}: rh_tolerance = {rh_tolerance} must be non-negative"));
            }
            let pairs = match (&sec.pairs, sec.germ) {
                (Some(p), GermKind::SampledSet) => p.iter().map(|&[a, b]| StatePair::new(a, b)).collect(),
                (None, GermKind::SampledSet) => {
                    return bad(format!("[[interfaces]] {j}: germ = \"sampled_set\" needs pairs"))
                }
                (Some(_), _) => return bad(format!("[[interfaces]] {j}: pairs only apply to sampled_set germs")),
                (None, _) => Vec::new(),
            };
            let germ = GermSpec { kind: sec.germ, pairs, rh_tolerance };
            interfaces.push(InterfaceSpec::resolve(j, sec.x, edge as usize, germ, sec.coupling, &model)?);
        }
        let vs = &self.verify;
        if let Some(k) = vs.k_levels.filter(|k| !(1..=MAX_K_LEVELS).contains(k)) {
            return bad(format!("[verify] k_levels = {k} must be in [1, {MAX_K_LEVELS}]"));
        }
        for (name, v) in [
            ("radius", vs.radius),
            ("time", vs.time),
            ("tol_entropy", vs.tol_entropy),
            ("tol_bulk", vs.tol_bulk),
            ("tol_interface", vs.tol_interface),
            ("tol_ledger", vs.tol_ledger),
            ("trace_tol", vs.trace_tol),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("[verify] {name} = {v} must be positive"));
                }
            }
        }
        Scenario::assemble(
            model,
            interfaces,
            g.cells,
            g.t_end,
            g.cfl,
            snapshots,
            g.store_steps.unwrap_or(false),
            g.timestep.unwrap_or_default(),
            g.scheme.unwrap_or_default(),
            g.boundary.unwrap_or_default(),
            self.initial.clone(),
            self.clone(),
            self.fingerprint(),
        )
    }
}

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    ScenarioFile::from_toml(text)?.build()
}
