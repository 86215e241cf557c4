//! Numerical fluxes: classical fluxes inside regions and germ-consistent
//! couplings at interfaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux_model::{FluxModel, ScalarFlux};
use crate::germ::{GermKind, GermSpec, StatePair};
use crate::poly::bisect;

/// Two-point flux used on edges inside a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteriorFlux {
    #[default]
    Godunov,
    EngquistOsher,
}

/// Numerical coupling across an interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    VvDemandSupply,
    PairProjection,
}

impl InteriorFlux {
    pub fn eval(self, f: ScalarFlux<'_>, u_l: f64, u_r: f64) -> f64 {
        match self {
            InteriorFlux::Godunov => godunov_flux(f, u_l, u_r),
            InteriorFlux::EngquistOsher => engquist_osher_flux(f, u_l, u_r),
        }
    }
}

/// `min_{[uL,uR]} f` if `uL <= uR`, else `max_{[uR,uL]} f`.
pub fn godunov_flux(f: ScalarFlux<'_>, u_l: f64, u_r: f64) -> f64 {
    if u_l == u_r {
        return f.eval(u_l);
    }
    let (min, max) = f.extrema(u_l, u_r);
    if u_l < u_r {
        min
    } else {
        max
    }
}

/// `f(uL) + int_{uL}^{uR} min(f', 0)`, exact on the monotone pieces of `f`.
pub fn engquist_osher_flux(f: ScalarFlux<'_>, u_l: f64, u_r: f64) -> f64 {
    if u_l == u_r {
        return f.eval(u_l);
    }
    let (lo, hi) = if u_l < u_r { (u_l, u_r) } else { (u_r, u_l) };
    let breaks = f.monotone_breaks(lo, hi);
    let decrease: f64 = breaks
        .windows(2)
        .map(|w| (f.eval(w[1]) - f.eval(w[0])).min(0.0))
        .sum();
    if u_l < u_r {
        f.eval(u_l) + decrease
    } else {
        f.eval(u_l) - decrease
    }
}

/// Maximiser `theta` of a flux that is nondecreasing on `[lo, theta]` and
/// nonincreasing on `[theta, hi]`; `None` if the flux is not of that shape.
pub fn unimodal_peak(f: ScalarFlux<'_>, lo: f64, hi: f64) -> Option<f64> {
    let breaks = f.monotone_breaks(lo, hi);
    let values: Vec<f64> = breaks.iter().map(|&u| f.eval(u)).collect();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let tol = 1e-13 * scale;
    let (k, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bk, bv), (k, &v)| if v > bv + tol { (k, v) } else { (bk, bv) });
    let rising = values[..=k].windows(2).all(|w| w[1] >= w[0] - tol);
    let falling = values[k..].windows(2).all(|w| w[1] <= w[0] + tol);
    (rising && falling).then_some(breaks[k])
}

/// Demand-supply data for one interface, resolved once per model.
#[derive(Debug, Clone, Copy)]
pub struct DemandSupply<'a> {
    pub interface: usize,
    pub f_minus: ScalarFlux<'a>,
    pub f_plus: ScalarFlux<'a>,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub u_range: (f64, f64),
}

impl<'a> DemandSupply<'a> {
    pub fn new(j: usize, model: &'a FluxModel) -> Result<Self> {
        let (fm, fp) = model.side_fluxes(j)?;
        let (lo, hi) = model.u_range();
        let unsupported = |side: &str| Error::UnsupportedCoupling {
            interface: j,
            reason: format!("{side} flux is not unimodal on [{lo}, {hi}]; use pair_projection"),
        };
        let theta_minus = unimodal_peak(fm, lo, hi).ok_or_else(|| unsupported("left"))?;
        let theta_plus = unimodal_peak(fp, lo, hi).ok_or_else(|| unsupported("right"))?;
        Ok(Self { interface: j, f_minus: fm, f_plus: fp, theta_minus, theta_plus, u_range: (lo, hi) })
    }

    pub fn demand(&self, u: f64) -> f64 {
        if u <= self.theta_minus {
            self.f_minus.eval(u)
        } else {
            self.f_minus.eval(self.theta_minus)
        }
    }

    pub fn supply(&self, u: f64) -> f64 {
        if u <= self.theta_plus {
            self.f_plus.eval(self.theta_plus)
        } else {
            self.f_plus.eval(u)
        }
    }

    pub fn flux(&self, u_l: f64, u_r: f64) -> f64 {
        self.demand(u_l).min(self.supply(u_r))
    }

    /// Trace pair carried by the interface for Riemann data `(uL, uR)`.
    pub fn traces(&self, u_l: f64, u_r: f64) -> Result<StatePair> {
        let q = self.flux(u_l, u_r);
        let (lo, hi) = self.u_range;
        // left trace on the falling branch unless uL already carries q; right trace on the rising branch
        let u_minus = branch_root(self.f_minus, q, u_l, self.theta_minus, hi)
            .ok_or(Error::CouplingFailure { interface: self.interface, flux: q })?;
        let u_plus = branch_root(self.f_plus, q, u_r, lo, self.theta_plus)
            .ok_or(Error::CouplingFailure { interface: self.interface, flux: q })?;
        Ok(StatePair::new(u_minus, u_plus))
    }
}

const ROOT_TOL: f64 = 1e-12;

fn branch_root(f: ScalarFlux<'_>, q: f64, incoming: f64, a: f64, b: f64) -> Option<f64> {
    if (f.eval(incoming) - q).abs() <= ROOT_TOL {
        return Some(incoming);
    }
    let (ha, hb) = (f.eval(a) - q, f.eval(b) - q);
    if ha.abs() <= ROOT_TOL {
        return Some(a);
    }
    if hb.abs() <= ROOT_TOL {
        return Some(b);
    }
    if ha * hb > 0.0 {
        return None;
    }
    let r = bisect(|u| f.eval(u) - q, a, b);
    ((f.eval(r) - q).abs() <= ROOT_TOL).then_some(r)
}

/// Demand-supply interface flux `min(D(uL), S(uR))`.
pub fn interface_flux_vv(j: usize, model: &FluxModel, u_l: f64, u_r: f64) -> Result<f64> {
    Ok(DemandSupply::new(j, model)?.flux(u_l, u_r))
}

/// Germ pair closest to `(uL, uR)` in the l1 sense, ties broken by `u-` then `u+`.
pub fn pair_projection(pairs: &[StatePair], u_l: f64, u_r: f64) -> Option<StatePair> {
    pairs.iter().copied().min_by(|a, b| {
        let da = (a.u_minus - u_l).abs() + (a.u_plus - u_r).abs();
        let db = (b.u_minus - u_l).abs() + (b.u_plus - u_r).abs();
        da.total_cmp(&db)
            .then(a.u_minus.total_cmp(&b.u_minus))
            .then(a.u_plus.total_cmp(&b.u_plus))
    })
}

/// Classical Riemann state at `x/t = 0` for a single flux, as a trace pair;
/// a standing shock between equal-flux states is returned as `(uL, uR)`.
pub fn classical_traces(f: ScalarFlux<'_>, u_l: f64, u_r: f64) -> StatePair {
    if u_l == u_r {
        return StatePair::new(u_l, u_l);
    }
    let q = godunov_flux(f, u_l, u_r);
    let at_l = (f.eval(u_l) - q).abs() <= ROOT_TOL;
    let at_r = (f.eval(u_r) - q).abs() <= ROOT_TOL;
    if at_l && at_r {
        let (lo, hi) = if u_l < u_r { (u_l, u_r) } else { (u_r, u_l) };
        let interior: Vec<f64> = f
            .template
            .critical_points(lo, hi)
            .into_iter()
            .filter(|&c| c > lo && c < hi && (f.eval(c) - q).abs() <= ROOT_TOL)
            .collect();
        return match interior.first() {
            // the extremum is also attained inside: transonic state
            Some(&c) => StatePair::new(c, c),
            None => StatePair::new(u_l, u_r),
        };
    }
    if at_l {
        return StatePair::new(u_l, u_l);
    }
    if at_r {
        return StatePair::new(u_r, u_r);
    }
    let (lo, hi) = if u_l < u_r { (u_l, u_r) } else { (u_r, u_l) };
    let c = f
        .template
        .critical_points(lo, hi)
        .into_iter()
        .min_by(|a, b| (f.eval(*a) - q).abs().total_cmp(&(f.eval(*b) - q).abs()))
        .unwrap_or(u_l);
    StatePair::new(c, c)
}

/// Trace pair the interface is expected to carry for Riemann data `(uL, uR)`.
pub fn solve_interface_riemann(
    j: usize,
    model: &FluxModel,
    g: &GermSpec,
    u_l: f64,
    u_r: f64,
) -> Result<StatePair> {
    match g.kind {
        GermKind::VanishingViscosity => DemandSupply::new(j, model)?.traces(u_l, u_r),
        GermKind::SampledSet => {
            pair_projection(&g.pairs, u_l, u_r).ok_or(Error::EmptyGerm { interface: j })
        }
        GermKind::IdentityCoupling => {
            let (fm, fp) = model.side_fluxes(j)?;
            if model.sigma_s_mass()[j] > ROOT_TOL {
                return Err(Error::UnsupportedCoupling {
                    interface: j,
                    reason: "identity coupling needs a flux that is continuous across the interface".into(),
                });
            }
            let _ = fp;
            Ok(classical_traces(fm, u_l, u_r))
        }
    }
}
