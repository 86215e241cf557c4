//! Interface germs: sets of admissible trace pairs `(u-, u+)`.
//!
//! A germ is dissipative when every pair satisfies Rankine-Hugoniot and the
//! dissipation functional `W` is non-positive on every two pairs. W is also
//! the density of the Kato remainder on the interface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux_model::{FluxModel, ScalarFlux};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePair {
    pub u_minus: f64,
    pub u_plus: f64,
}

impl StatePair {
    pub fn new(u_minus: f64, u_plus: f64) -> Self {
        Self { u_minus, u_plus }
    }
}

impl From<(f64, f64)> for StatePair {
    fn from((u_minus, u_plus): (f64, f64)) -> Self {
        Self { u_minus, u_plus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GermKind {
    VanishingViscosity,
    SampledSet,
    /// The diagonal `{(a, a)}`, admissible where the flux is continuous.
    IdentityCoupling,
}

pub const RH_TOLERANCE_ANALYTIC: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GermSpec {
    pub kind: GermKind,
    pub pairs: Vec<StatePair>,
    pub rh_tolerance: f64,
}

impl GermSpec {
    pub fn vanishing_viscosity() -> Self {
        Self { kind: GermKind::VanishingViscosity, pairs: Vec::new(), rh_tolerance: RH_TOLERANCE_ANALYTIC }
    }

    pub fn identity() -> Self {
        Self { kind: GermKind::IdentityCoupling, pairs: Vec::new(), rh_tolerance: RH_TOLERANCE_ANALYTIC }
    }

    pub fn sampled(pairs: Vec<StatePair>) -> Self {
        Self { kind: GermKind::SampledSet, pairs, rh_tolerance: RH_TOLERANCE_ANALYTIC }
    }

    /// Sampled sets must be non-empty, in range and Rankine-Hugoniot compatible.
    pub fn validate(&self, j: usize, model: &FluxModel) -> Result<()> {
        if self.kind != GermKind::SampledSet {
            return Ok(());
        }
        if self.pairs.is_empty() {
            return Err(Error::EmptyGerm { interface: j });
        }
        let (lo, hi) = model.u_range();
        for p in &self.pairs {
            for u in [p.u_minus, p.u_plus] {
                if !(u >= lo && u <= hi) {
                    return Err(Error::StateOutOfRange { u, lo, hi });
                }
            }
            let r = rankine_hugoniot_residual(*p, j, model)?;
            if r > self.rh_tolerance {
                return Err(Error::Scenario(format!(
                    "germ pair ({}, {}) at interface {j} violates Rankine-Hugoniot by {r:e}",
                    p.u_minus, p.u_plus
                )));
            }
        }
        Ok(())
    }

    /// Whether `p` belongs to the germ.
    pub fn contains(&self, p: StatePair, j: usize, model: &FluxModel) -> Result<bool> {
        match self.kind {
            GermKind::VanishingViscosity => vv_membership_with(p, j, model, self.rh_tolerance),
            GermKind::IdentityCoupling => Ok((p.u_minus - p.u_plus).abs() <= self.rh_tolerance
                && rankine_hugoniot_residual(p, j, model)? <= self.rh_tolerance),
            GermKind::SampledSet => Ok(self.pairs.iter().any(|q| {
                (q.u_minus - p.u_minus).abs() <= self.rh_tolerance
                    && (q.u_plus - p.u_plus).abs() <= self.rh_tolerance
            })),
        }
    }

    /// A finite sample of the germ: the explicit pairs, or pairs drawn from an
    /// `n`-point state grid for the predicate-defined kinds.
    pub fn sample_pairs(&self, j: usize, model: &FluxModel, n: usize) -> Result<Vec<StatePair>> {
        match self.kind {
            GermKind::SampledSet => Ok(self.pairs.clone()),
            GermKind::VanishingViscosity => vv_germ_samples(j, model, n, self.rh_tolerance),
            GermKind::IdentityCoupling => {
                let mut out = Vec::new();
                for a in state_grid(model, n) {
                    let p = StatePair::new(a, a);
                    if rankine_hugoniot_residual(p, j, model)? <= self.rh_tolerance {
                        out.push(p);
                    }
                }
                Ok(out)
            }
        }
    }
}

/// `sign` with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `|f+_j(u+) - f-_j(u-)|`.
pub fn rankine_hugoniot_residual(p: StatePair, j: usize, model: &FluxModel) -> Result<f64> {
    let (fm, fp) = model.side_fluxes(j)?;
    Ok((fp.eval(p.u_plus) - fm.eval(p.u_minus)).abs())
}

/// Dissipation functional for one-sided fluxes `f-`, `f+`.
pub fn w_functional(fm: ScalarFlux<'_>, fp: ScalarFlux<'_>, pu: StatePair, pv: StatePair) -> f64 {
    sign(pu.u_plus - pv.u_plus) * (fp.eval(pu.u_plus) - fp.eval(pv.u_plus))
        - sign(pu.u_minus - pv.u_minus) * (fm.eval(pu.u_minus) - fm.eval(pv.u_minus))
}

pub fn germ_w(pu: StatePair, pv: StatePair, j: usize, model: &FluxModel) -> Result<f64> {
    let (fm, fp) = model.side_fluxes(j)?;
    Ok(w_functional(fm, fp, pu, pv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dissipativity {
    pub pass: bool,
    pub max_w: f64,
    /// Ordered pair of germ elements attaining `max_w`.
    pub worst: (StatePair, StatePair),
    pub pairs_checked: usize,
}

/// Default grid resolution for sampling predicate-defined germs.
pub const GERM_SAMPLE_GRID: usize = 64;

/// Brute-force dissipativity over all ordered pairs of germ elements.
pub fn is_dissipative(
    g: &GermSpec,
    j: usize,
    model: &FluxModel,
    tol: f64,
    sample_grid: usize,
) -> Result<Dissipativity> {
    let pairs = g.sample_pairs(j, model, sample_grid)?;
    dissipativity_of(&pairs, j, model, tol)
}

pub fn dissipativity_of(pairs: &[StatePair], j: usize, model: &FluxModel, tol: f64) -> Result<Dissipativity> {
    if pairs.is_empty() {
        return Err(Error::EmptyGerm { interface: j });
    }
    let (fm, fp) = model.side_fluxes(j)?;
    let mut max_w = f64::NEG_INFINITY;
    let mut worst = (pairs[0], pairs[0]);
    for &pu in pairs {
        for &pv in pairs {
            let w = w_functional(fm, fp, pu, pv);
            if w > max_w {
                max_w = w;
                worst = (pu, pv);
            }
        }
    }
    Ok(Dissipativity { pass: max_w <= tol, max_w, worst, pairs_checked: pairs.len() * pairs.len() })
}

pub const VV_GRID: usize = 1024;
pub const VV_ZERO_TOL: f64 = 1e-12;

pub fn vv_membership(p: StatePair, j: usize, model: &FluxModel) -> Result<bool> {
    vv_membership_with(p, j, model, RH_TOLERANCE_ANALYTIC)
}

/// Standing viscous profile test by phase-line sign analysis.
///
/// With `s = f-(u-)`, the profile solves `u' = f-(u) - s` left of the
/// interface and `u' = f+(u) - s` right of it. The set of states reachable
/// from `u-` and the set of states that flow into `u+` are each an interval
/// around their anchor, bounded by the first grid point where the sign of
/// `f - s` stops matching the direction of travel. Membership holds when the
/// two intervals meet.
pub fn vv_membership_with(p: StatePair, j: usize, model: &FluxModel, rh_tol: f64) -> Result<bool> {
    if rankine_hugoniot_residual(p, j, model)? > rh_tol {
        return Ok(false);
    }
    let (fm, fp) = model.side_fluxes(j)?;
    let s = fm.eval(p.u_minus);
    let grid = state_grid(model, VV_GRID);
    // u- is reached from -inf: travel up needs f- - s > 0, travel down needs < 0
    let left = reach_interval(&grid, p.u_minus, |v| fm.eval(v) - s, 1.0);
    // u+ is approached towards +inf: coming from below needs f+ - s > 0, from above < 0
    let right = reach_interval(&grid, p.u_plus, |v| fp.eval(v) - s, -1.0);
    Ok(left.0.max(right.0) < left.1.min(right.1))
}

/// Open interval around `anchor` on which `sign(h(v)) == orientation * sign(v - anchor)`
/// holds at every sampled grid point.
fn reach_interval<H: Fn(f64) -> f64>(grid: &[f64], anchor: f64, h: H, orientation: f64) -> (f64, f64) {
    let span = grid[grid.len() - 1] - grid[0];
    let eps = 1e-9 * span.max(1.0);
    let hi = grid
        .iter()
        .filter(|&&v| v > anchor + eps)
        .find(|&&v| orientation * h(v) <= VV_ZERO_TOL)
        .copied()
        .unwrap_or(f64::INFINITY);
    let lo = grid
        .iter()
        .rev()
        .filter(|&&v| v < anchor - eps)
        .find(|&&v| orientation * h(v) >= -VV_ZERO_TOL)
        .copied()
        .unwrap_or(f64::NEG_INFINITY);
    (lo, hi)
}

pub(crate) fn state_grid(model: &FluxModel, n: usize) -> Vec<f64> {
    let (lo, hi) = model.u_range();
    let n = n.max(2);
    (0..n)
        .map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
        .collect()
}

/// States `v` in range with `flux(v) = q`.
pub(crate) fn level_set(f: ScalarFlux<'_>, q: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut c: Vec<f64> = f.template.g().coeffs().iter().map(|c| c * f.w).collect();
    c[0] -= q;
    crate::poly::Poly::new(c).roots_in(lo, hi)
}

/// Rankine-Hugoniot constrained pairs over an `n`-point grid on each side,
/// filtered by vanishing-viscosity membership.
pub fn vv_germ_samples(j: usize, model: &FluxModel, n: usize, rh_tol: f64) -> Result<Vec<StatePair>> {
    let (fm, fp) = model.side_fluxes(j)?;
    let (lo, hi) = model.u_range();
    let mut candidates = Vec::new();
    for a in state_grid(model, n) {
        for b in level_set(fp, fm.eval(a), lo, hi) {
            candidates.push(StatePair::new(a, b));
        }
        for b in level_set(fm, fp.eval(a), lo, hi) {
            candidates.push(StatePair::new(b, a));
        }
    }
    let mut out = Vec::new();
    for p in candidates {
        if vv_membership_with(p, j, model, rh_tol)? {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.u_minus.total_cmp(&b.u_minus).then(a.u_plus.total_cmp(&b.u_plus)));
    out.dedup_by(|a, b| (a.u_minus - b.u_minus).abs() <= 1e-13 && (a.u_plus - b.u_plus).abs() <= 1e-13);
    Ok(out)
}
