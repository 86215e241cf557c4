//! Piecewise-smooth fluxes `F(x, u) = w(x) g(u)` on a tiling of the line.
//!
//! The coefficient `w` is smooth on each closed region and may jump at region
//! boundaries; those boundaries are the interfaces. One-sided traces of the
//! flux at an interface are obtained by evaluating the neighbouring regions'
//! coefficients at the shared endpoint, so they are exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Template flux `g(u)`, shared by every region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TemplateKind {
    /// `u^2 / 2`
    Burgers,
    /// `u (1 - u)`
    Lwr,
    /// `speed * u`
    Linear { speed: f64 },
    /// `sum_k coefficients[k] u^k`
    Polynomial { coefficients: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    kind: TemplateKind,
    g: Poly,
    dg: Poly,
    ddg: Poly,
}

impl Template {
    pub fn new(kind: TemplateKind) -> Result<Self> {
        let coeffs = match &kind {
            TemplateKind::Burgers => vec![0.0, 0.0, 0.5],
            TemplateKind::Lwr => vec![0.0, 1.0, -1.0],
            TemplateKind::Linear { speed } => vec![0.0, *speed],
            TemplateKind::Polynomial { coefficients } => coefficients.clone(),
        };
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Model("template coefficients must be finite and non-empty".into()));
        }
        let g = Poly::new(coeffs);
        let dg = g.derivative();
        let ddg = dg.derivative();
        Ok(Self { kind, g, dg, ddg })
    }

    pub fn kind(&self) -> &TemplateKind {
        &self.kind
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    pub fn dg(&self) -> &Poly {
        &self.dg
    }

    /// Critical points of `g` inside `[lo, hi]`.
    pub fn critical_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.dg.roots_in(lo, hi)
    }

    /// `max |g'(u)|` over `[lo, hi]`.
    pub fn max_abs_slope(&self, lo: f64, hi: f64) -> f64 {
        let mut m = self.dg.eval(lo).abs().max(self.dg.eval(hi).abs());
        for c in self.ddg.roots_in(lo, hi) {
            m = m.max(self.dg.eval(c).abs());
        }
        m
    }
}

/// The flux `u -> w g(u)` with the coefficient frozen.
#[derive(Debug, Clone, Copy)]
pub struct ScalarFlux<'a> {
    pub w: f64,
    pub template: &'a Template,
}

impl<'a> ScalarFlux<'a> {
    pub fn eval(&self, u: f64) -> f64 {
        self.w * self.template.g.eval(u)
    }

    pub fn speed(&self, u: f64) -> f64 {
        self.w * self.template.dg.eval(u)
    }

    /// `(min, max)` of the flux over the closed interval spanned by `a` and `b`.
    pub fn extrema(&self, a: f64, b: f64) -> (f64, f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut min = self.eval(lo).min(self.eval(hi));
        let mut max = self.eval(lo).max(self.eval(hi));
        for c in self.template.critical_points(lo, hi) {
            let v = self.eval(c);
            min = min.min(v);
            max = max.max(v);
        }
        (min, max)
    }

    pub fn max_speed(&self, lo: f64, hi: f64) -> f64 {
        self.w.abs() * self.template.max_abs_slope(lo, hi)
    }

    /// Breakpoints of the monotone pieces of the flux on `[lo, hi]`, endpoints included.
    pub fn monotone_breaks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut b = vec![lo];
        b.extend(
            self.template
                .critical_points(lo, hi)
                .into_iter()
                .filter(|&c| c > lo && c < hi),
        );
        b.push(hi);
        b
    }
}

/// Spatial coefficient `w(x)` on one region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Coefficient {
    Constant { value: f64 },
    /// `a + b x`
    Affine { a: f64, b: f64 },
    /// `a + b x + c x^2`
    Quadratic { a: f64, b: f64, c: f64 },
    /// `base + amplitude * tanh((x - center) / width)`
    Tanh { base: f64, amplitude: f64, center: f64, width: f64 },
    /// Piecewise-linear interpolation of the nodes `(x[i], w[i])`.
    Tabulated { x: Vec<f64>, w: Vec<f64> },
}

impl Coefficient {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant { value } => *value,
            Coefficient::Affine { a, b } => a + b * x,
            Coefficient::Quadratic { a, b, c } => a + x * (b + c * x),
            Coefficient::Tanh { base, amplitude, center, width } => {
                base + amplitude * ((x - center) / width).tanh()
            }
            Coefficient::Tabulated { x: xs, w } => {
                let k = tab_segment(xs, x);
                let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
                w[k] + t * (w[k + 1] - w[k])
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant { .. } => 0.0,
            Coefficient::Affine { b, .. } => *b,
            Coefficient::Quadratic { b, c, .. } => b + 2.0 * c * x,
            Coefficient::Tanh { amplitude, center, width, .. } => {
                let th = ((x - center) / width).tanh();
                amplitude / width * (1.0 - th * th)
            }
            Coefficient::Tabulated { x: xs, w } => {
                let k = tab_segment(xs, x);
                (w[k + 1] - w[k]) / (xs[k + 1] - xs[k])
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Coefficient::Constant { .. } => true,
            Coefficient::Affine { b, .. } => *b == 0.0,
            Coefficient::Quadratic { b, c, .. } => *b == 0.0 && *c == 0.0,
            Coefficient::Tanh { amplitude, .. } => *amplitude == 0.0,
            Coefficient::Tabulated { w, .. } => w.windows(2).all(|p| p[0] == p[1]),
        }
    }

    fn validate(&self, x_left: f64, x_right: f64) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        let ok = match self {
            Coefficient::Constant { value } => finite(&[*value]),
            Coefficient::Affine { a, b } => finite(&[*a, *b]),
            Coefficient::Quadratic { a, b, c } => finite(&[*a, *b, *c]),
            Coefficient::Tanh { base, amplitude, center, width } => {
                finite(&[*base, *amplitude, *center, *width]) && *width > 0.0
            }
            Coefficient::Tabulated { x, w } => {
                x.len() >= 2
                    && x.len() == w.len()
                    && finite(x)
                    && finite(w)
                    && x.windows(2).all(|p| p[0] < p[1])
                    && x[0] <= x_left
                    && x[x.len() - 1] >= x_right
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Model(format!(
                "invalid coefficient on region [{x_left}, {x_right}]: {self:?}"
            )))
        }
    }
}

fn tab_segment(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    match xs.iter().position(|&xi| xi > x) {
        Some(0) => 0,
        Some(k) => k - 1,
        None => n - 2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub x_left: f64,
    pub x_right: f64,
    pub coefficient: Coefficient,
}

/// Which side of an interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

const SUP_SAMPLES: usize = 257;

#[derive(Debug, Clone)]
pub struct FluxModel {
    template: Template,
    regions: Vec<Region>,
    interfaces: Vec<f64>,
    u_range: (f64, f64),
    w_sup: f64,
    lipschitz_m: f64,
    sigma_s_mass: Vec<f64>,
}

impl FluxModel {
    pub fn new(template: TemplateKind, regions: Vec<Region>, u_range: (f64, f64)) -> Result<Self> {
        let template = Template::new(template)?;
        if regions.is_empty() {
            return Err(Error::Model("at least one region is required".into()));
        }
        let (lo, hi) = u_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Model(format!("u_range [{lo}, {hi}] must be finite with lo < hi")));
        }
        for (i, r) in regions.iter().enumerate() {
            if !(r.x_left.is_finite() && r.x_right.is_finite() && r.x_left < r.x_right) {
                return Err(Error::Model(format!(
                    "region {i} has empty or non-finite interval [{}, {}]",
                    r.x_left, r.x_right
                )));
            }
            if i > 0 && regions[i - 1].x_right != r.x_left {
                return Err(Error::Model(format!(
                    "regions {} and {i} do not tile: gap or overlap between {} and {}",
                    i - 1,
                    regions[i - 1].x_right,
                    r.x_left
                )));
            }
            r.coefficient.validate(r.x_left, r.x_right)?;
        }
        let interfaces: Vec<f64> = regions.iter().skip(1).map(|r| r.x_left).collect();

        let w_sup = regions
            .iter()
            .map(|r| {
                (0..SUP_SAMPLES)
                    .map(|k| {
                        let x = r.x_left + (r.x_right - r.x_left) * k as f64 / (SUP_SAMPLES - 1) as f64;
                        r.coefficient.value(x).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let lipschitz_m = w_sup * template.max_abs_slope(lo, hi);

        let mut model = Self {
            template,
            regions,
            interfaces,
            u_range,
            w_sup,
            lipschitz_m,
            sigma_s_mass: Vec::new(),
        };
        model.sigma_s_mass = (0..model.interfaces.len())
            .map(|j| {
                let (wm, wp) = model.coefficient_traces(j);
                // |f+ - f-| = |w+ - w-| |g|
                (wp - wm).abs() * model.template.g.max_abs(lo, hi)
            })
            .collect();
        Ok(model)
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.regions[0].x_left, self.regions[self.regions.len() - 1].x_right)
    }

    /// Bound `M` on `|dF/du|` over every region and the admissible range.
    pub fn lipschitz_m(&self) -> f64 {
        self.lipschitz_m
    }

    /// `sup |w(x)|` over the domain (sampled).
    pub fn w_sup(&self) -> f64 {
        self.w_sup
    }

    /// Per-interface `sup_u |f+(u) - f-(u)|`.
    pub fn sigma_s_mass(&self) -> &[f64] {
        &self.sigma_s_mass
    }

    pub fn flux_with(&self, w: f64) -> ScalarFlux<'_> {
        ScalarFlux { w, template: &self.template }
    }

    fn check_state(&self, u: f64) -> Result<()> {
        let (lo, hi) = self.u_range;
        if u.is_finite() && u >= lo && u <= hi {
            Ok(())
        } else {
            Err(Error::StateOutOfRange { u, lo, hi })
        }
    }

    fn check_interface(&self, j: usize) -> Result<()> {
        if j < self.interfaces.len() {
            Ok(())
        } else {
            Err(Error::InterfaceIndex { index: j, count: self.interfaces.len() })
        }
    }

    /// Region containing `x` in its interior or at an outer domain end.
    pub fn region_index(&self, x: f64) -> Result<usize> {
        let (x_a, x_b) = self.domain();
        if !(x >= x_a && x <= x_b) {
            return Err(Error::OutsideDomain { x, x_a, x_b });
        }
        if let Some(j) = self.interfaces.iter().position(|&xj| xj == x) {
            return Err(Error::OnInterface { x, interface: j });
        }
        Ok(self.interfaces.iter().filter(|&&xj| xj < x).count())
    }

    /// Region owning a cell edge that is not an interface.
    pub(crate) fn edge_region(&self, x: f64) -> usize {
        self.interfaces.iter().filter(|&&xj| xj < x).count()
    }

    pub fn coefficient_at(&self, x: f64) -> Result<f64> {
        let r = self.region_index(x)?;
        Ok(self.regions[r].coefficient.value(x))
    }

    /// `F(x, u) = w(x) g(u)` away from interfaces.
    pub fn eval_flux(&self, x: f64, u: f64) -> Result<f64> {
        self.check_state(u)?;
        let r = self.region_index(x)?;
        Ok(self.flux_with(self.regions[r].coefficient.value(x)).eval(u))
    }

    /// One-sided coefficient limits `(w(x_j-), w(x_j+))`.
    pub fn coefficient_traces(&self, j: usize) -> (f64, f64) {
        let x = self.interfaces[j];
        (
            self.regions[j].coefficient.value(x),
            self.regions[j + 1].coefficient.value(x),
        )
    }

    /// The one-sided fluxes `f-_j` and `f+_j` as functions of the state.
    pub fn side_fluxes(&self, j: usize) -> Result<(ScalarFlux<'_>, ScalarFlux<'_>)> {
        self.check_interface(j)?;
        let (wm, wp) = self.coefficient_traces(j);
        Ok((self.flux_with(wm), self.flux_with(wp)))
    }

    /// `(f-_j(u), f+_j(u))`.
    pub fn flux_traces(&self, j: usize, u: f64) -> Result<(f64, f64)> {
        self.check_interface(j)?;
        self.check_state(u)?;
        let (fm, fp) = self.side_fluxes(j)?;
        Ok((fm.eval(u), fp.eval(u)))
    }

    /// Absolutely continuous x-divergence of `F(., k)`: `g(k) w'(x)`.
    pub fn div_a(&self, x: f64, k: f64) -> Result<f64> {
        let r = self.region_index(x)?;
        Ok(self.template.g.eval(k) * self.regions[r].coefficient.derivative(x))
    }

    /// True when every region has a constant coefficient.
    pub fn piecewise_constant(&self) -> bool {
        self.regions.iter().all(|r| r.coefficient.is_constant())
    }

    /// Sampled summary of the structural hypotheses on the flux.
    pub fn structure_report(&self) -> StructureReport {
        let (lo, hi) = self.u_range;
        let g_sup = self.template.g.max_abs(lo, hi);
        let sigma_ac_mass = self
            .regions
            .iter()
            .map(|r| {
                let n = 1024;
                let h = (r.x_right - r.x_left) / n as f64;
                (0..n)
                    .map(|k| r.coefficient.derivative(r.x_left + (k as f64 + 0.5) * h).abs() * h)
                    .sum::<f64>()
                    * g_sup
            })
            .sum();
        let slope_modulus = self.w_sup * self.template.ddg.max_abs(lo, hi);
        StructureReport {
            lipschitz_m: self.lipschitz_m,
            slope_modulus,
            sigma_s_mass: self.sigma_s_mass.clone(),
            sigma_ac_mass,
        }
    }

    /// GNL diagnostic with `directions` unit vectors `(cos, sin)(2 pi i / n)`.
    pub fn gnl_check(&self, directions: usize, v_samples: usize) -> Result<GnlReport> {
        if directions < 2 || v_samples < 2 {
            return Err(Error::Range("gnl_check needs at least 2 directions and 2 samples".into()));
        }
        let dirs: Vec<(f64, f64)> = (0..directions)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / directions as f64;
                (th.cos(), th.sin())
            })
            .collect();
        self.gnl_check_directions(&dirs, v_samples, GNL_ZERO_TOL)
    }

    /// GNL diagnostic on caller-supplied `(xi_t, xi_x)` directions.
    pub fn gnl_check_directions(
        &self,
        directions: &[(f64, f64)],
        v_samples: usize,
        zero_tol: f64,
    ) -> Result<GnlReport> {
        if v_samples < 2 {
            return Err(Error::Range("gnl_check needs at least 2 samples".into()));
        }
        let (lo, hi) = self.u_range;
        let h = (hi - lo) / (v_samples - 1) as f64;
        let grid: Vec<f64> = (0..v_samples).map(|k| lo + h * k as f64).collect();
        let mut degenerate = Vec::new();
        for j in 0..self.interfaces.len() {
            let (fm, fp) = self.side_fluxes(j)?;
            for (side, f) in [(Side::Minus, fm), (Side::Plus, fp)] {
                for &(xt, xx) in directions {
                    let norm = (xt * xt + xx * xx).sqrt();
                    let (xt, xx) = (xt / norm, xx / norm);
                    let mut run: Option<usize> = None;
                    for (k, &v) in grid.iter().enumerate() {
                        let small = (xt + xx * f.speed(v)).abs() <= zero_tol;
                        match (small, run) {
                            (true, None) => run = Some(k),
                            (false, Some(s)) => {
                                degenerate.push(GnlInterval::new(j, side, (xt, xx), grid[s], grid[k - 1], h));
                                run = None;
                            }
                            _ => {}
                        }
                    }
                    if let Some(s) = run {
                        degenerate.push(GnlInterval::new(j, side, (xt, xx), grid[s], grid[v_samples - 1], h));
                    }
                }
            }
        }
        let pass = degenerate.iter().all(|d| d.length < h);
        Ok(GnlReport { pass, cell: h, degenerate })
    }
}

pub const GNL_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    /// Bound on `|dF/du|`.
    pub lipschitz_m: f64,
    /// Bound on `|d^2F/du^2|`, a Lipschitz modulus for the characteristic speed.
    pub slope_modulus: f64,
    /// Per-interface jump mass of the flux.
    pub sigma_s_mass: Vec<f64>,
    /// `sup|g| * integral |w'|` over the regions.
    pub sigma_ac_mass: f64,
}

/// A maximal run of v-samples on which `a(v) . xi` is numerically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GnlInterval {
    pub interface: usize,
    pub side: Side,
    pub direction: (f64, f64),
    pub v_interval: (f64, f64),
    pub length: f64,
}

impl GnlInterval {
    fn new(interface: usize, side: Side, direction: (f64, f64), a: f64, b: f64, h: f64) -> Self {
        // length measured in whole grid cells so that the verdict does not hinge on rounding
        let cells = ((b - a) / h).round();
        Self { interface, side, direction, v_interval: (a, b), length: cells * h }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnlReport {
    pub pass: bool,
    /// v-grid spacing.
    pub cell: f64,
    pub degenerate: Vec<GnlInterval>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_region(template: TemplateKind, w_left: f64, w_right: f64, u_range: (f64, f64)) -> FluxModel {
        FluxModel::new(
            template,
            vec![
                Region { x_left: -1.0, x_right: 0.0, coefficient: Coefficient::Constant { value: w_left } },
                Region { x_left: 0.0, x_right: 1.0, coefficient: Coefficient::Constant { value: w_right } },
            ],
            u_range,
        )
        .unwrap()
    }

    fn quadratic_region() -> FluxModel {
        FluxModel::new(
            TemplateKind::Lwr,
            vec![Region {
                x_left: -2.0,
                x_right: 2.0,
                coefficient: Coefficient::Quadratic { a: 1.0, b: 0.0, c: 1.0 },
            }],
            (0.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn eval_flux_examples() {
        let m = two_region(TemplateKind::Lwr, 1.0, 2.0, (0.0, 1.0));
        assert_eq!(m.eval_flux(-0.5, 0.5).unwrap(), 0.25);
        assert_eq!(m.eval_flux(0.7, 0.0).unwrap(), 0.0);
        assert_eq!(quadratic_region().eval_flux(1.0, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn eval_flux_errors() {
        let m = two_region(TemplateKind::Lwr, 1.0, 2.0, (0.0, 1.0));
        assert!(matches!(m.eval_flux(1.5, 0.5), Err(Error::OutsideDomain { .. })));
        assert!(matches!(m.eval_flux(0.5, 1.5), Err(Error::StateOutOfRange { .. })));
        assert!(matches!(m.eval_flux(0.0, 0.5), Err(Error::OnInterface { interface: 0, .. })));
        // outer domain ends belong to their region
        assert!(m.eval_flux(-1.0, 0.5).is_ok());
        assert!(m.eval_flux(1.0, 0.5).is_ok());
    }

    #[test]
    fn flux_traces_examples() {
        let m = two_region(TemplateKind::Lwr, 1.0, 2.0, (0.0, 1.0));
        assert_eq!(m.flux_traces(0, 0.5).unwrap(), (0.25, 0.5));
        assert_eq!(m.flux_traces(0, 0.0).unwrap(), (0.0, 0.0));
        assert!(matches!(m.flux_traces(1, 0.5), Err(Error::InterfaceIndex { .. })));
        let c = two_region(TemplateKind::Burgers, 1.0, 1.0, (-1.0, 1.0));
        let (a, b) = c.flux_traces(0, 0.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn traces_match_one_sided_limits() {
        let m = FluxModel::new(
            TemplateKind::Lwr,
            vec![
                Region { x_left: -1.0, x_right: 0.2, coefficient: Coefficient::Affine { a: 1.0, b: 0.5 } },
                Region {
                    x_left: 0.2,
                    x_right: 1.0,
                    coefficient: Coefficient::Tanh { base: 2.0, amplitude: 0.3, center: 0.5, width: 0.2 },
                },
            ],
            (0.0, 1.0),
        )
        .unwrap();
        for &u in &[0.1, 0.4, 0.9] {
            let (fm, fp) = m.flux_traces(0, u).unwrap();
            for (side, trace) in [(-1.0, fm), (1.0, fp)] {
                let e1 = (m.eval_flux(0.2 + side * 1e-3, u).unwrap() - trace).abs();
                let e2 = (m.eval_flux(0.2 + side * 1e-4, u).unwrap() - trace).abs();
                // first-order approach to the trace
                assert!(e2 <= e1 * 0.11 + 1e-15, "{e1} {e2}");
                // first-order extrapolation from the two offsets recovers the trace
                let extrap = 2.0 * m.eval_flux(0.2 + side * 1e-4, u).unwrap() - m.eval_flux(0.2 + side * 2e-4, u).unwrap();
                assert!((extrap - trace).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn div_a_examples() {
        let m = two_region(TemplateKind::Lwr, 1.0, 2.0, (0.0, 1.0));
        assert_eq!(m.div_a(-0.3, 0.5).unwrap(), 0.0);
        assert!(matches!(m.div_a(0.0, 0.5), Err(Error::OnInterface { .. })));
        let q = quadratic_region();
        assert_eq!(q.div_a(1.0, 0.5).unwrap(), 0.5);
        assert_eq!(q.div_a(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn tiling_is_enforced() {
        let bad = FluxModel::new(
            TemplateKind::Burgers,
            vec![
                Region { x_left: -1.0, x_right: 0.0, coefficient: Coefficient::Constant { value: 1.0 } },
                Region { x_left: 0.1, x_right: 1.0, coefficient: Coefficient::Constant { value: 1.0 } },
            ],
            (-1.0, 1.0),
        );
        assert!(matches!(bad, Err(Error::Model(_))));
        let tab = FluxModel::new(
            TemplateKind::Burgers,
            vec![Region {
                x_left: -1.0,
                x_right: 1.0,
                coefficient: Coefficient::Tabulated { x: vec![-1.0, 0.0], w: vec![1.0, 2.0] },
            }],
            (-1.0, 1.0),
        );
        assert!(tab.is_err(), "tabulated coefficient must cover its region");
    }

    #[test]
    fn tabulated_interpolates() {
        let c = Coefficient::Tabulated { x: vec![0.0, 1.0, 3.0], w: vec![1.0, 3.0, 2.0] };
        assert_eq!(c.value(0.5), 2.0);
        assert_eq!(c.value(2.0), 2.5);
        assert_eq!(c.derivative(2.0), -0.5);
        assert_eq!(c.value(3.0), 2.0);
    }

    #[test]
    fn lipschitz_and_sigma() {
        let m = two_region(TemplateKind::Lwr, 1.0, 2.0, (0.0, 1.0));
        assert_eq!(m.lipschitz_m(), 2.0);
        assert_eq!(m.sigma_s_mass(), &[0.25]);
        let s = m.structure_report();
        assert_eq!(s.sigma_ac_mass, 0.0);
        assert_eq!(s.slope_modulus, 4.0);
        assert!(m.piecewise_constant());
    }

    #[test]
    fn gnl_burgers_passes() {
        let m = two_region(TemplateKind::Burgers, 1.0, 1.0, (-1.0, 1.0));
        let r = m.gnl_check(64, 512).unwrap();
        assert!(r.pass);
        // xi = (0, 1) makes a . xi = u, vanishing at no more than one sample
        assert!(r.degenerate.iter().all(|d| d.length == 0.0));
    }

    #[test]
    fn gnl_linear_fails_on_full_range() {
        let c = 1.0;
        let m = two_region(TemplateKind::Linear { speed: c }, 1.0, 1.0, (0.0, 1.0));
        let xi = (1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt());
        let r = m.gnl_check_directions(&[xi], 512, GNL_ZERO_TOL).unwrap();
        assert!(!r.pass);
        assert!(r.degenerate.iter().any(|d| d.v_interval == (0.0, 1.0)));
        // the uniform direction grid contains the orthogonal direction too
        assert!(!m.gnl_check(64, 512).unwrap().pass);
    }

    #[test]
    fn gnl_lwr_passes() {
        let m = two_region(TemplateKind::Lwr, 1.0, 2.0, (0.0, 1.0));
        assert!(m.gnl_check(64, 512).unwrap().pass);
    }

    #[test]
    fn gnl_orientation_invariant() {
        for m in [
            two_region(TemplateKind::Lwr, 1.0, 2.0, (0.0, 1.0)),
            two_region(TemplateKind::Linear { speed: 0.0 }, 1.0, 3.0, (0.0, 1.0)),
        ] {
            for i in 0..16 {
                let th = i as f64 * 0.37;
                let xi = (th.cos(), th.sin());
                let a = m.gnl_check_directions(&[xi], 128, GNL_ZERO_TOL).unwrap();
                let b = m.gnl_check_directions(&[(-xi.0, -xi.1)], 128, GNL_ZERO_TOL).unwrap();
                assert_eq!(a.pass, b.pass);
                assert_eq!(a.degenerate.len(), b.degenerate.len());
            }
        }
    }
}
