//! Real polynomials in one variable, used as template fluxes.
//!
//! Every catalog flux (Burgers, LWR, linear, custom) is a polynomial in the
//! state, so extrema over an interval reduce to endpoint comparison plus the
//! real roots of the derivative. Roots of degree <= 2 are closed form; higher
//! degrees recurse on the derivative so that every monotone piece is bracketed
//! before bisection.

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    /// Ascending powers: `c[0] + c[1] u + c[2] u^2 + ...`.
    coeffs: Vec<f64>,
}

const BISECT_ITERS: usize = 200;

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![0.0]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Real roots in the closed interval `[lo, hi]`, sorted and deduplicated.
    /// The zero polynomial has no isolated roots and returns an empty list.
    pub fn roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if lo > hi || self.is_zero() {
            return Vec::new();
        }
        let mut roots = match self.degree() {
            0 => Vec::new(),
            1 => vec![-self.coeffs[0] / self.coeffs[1]],
            2 => quadratic_roots(self.coeffs[2], self.coeffs[1], self.coeffs[0]),
            _ => self.roots_by_monotone_pieces(lo, hi),
        };
        roots.retain(|r| r.is_finite() && *r >= lo && *r <= hi);
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
        roots
    }

    fn roots_by_monotone_pieces(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut breaks = vec![lo];
        breaks.extend(self.derivative().roots_in(lo, hi));
        breaks.push(hi);
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let tol = 1e-13 * scale.max(1.0);
        let mut roots = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa.abs() <= tol {
                roots.push(a);
            }
            if fb.abs() <= tol {
                roots.push(b);
            }
            if fa * fb < 0.0 {
                roots.push(bisect(|u| self.eval(u), a, b));
            }
        }
        roots
    }

    /// Minimum and maximum of the polynomial over `[lo, hi]`.
    pub fn extrema(&self, lo: f64, hi: f64) -> (f64, f64) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mut min = self.eval(lo).min(self.eval(hi));
        let mut max = self.eval(lo).max(self.eval(hi));
        for c in self.derivative().roots_in(lo, hi) {
            let v = self.eval(c);
            min = min.min(v);
            max = max.max(v);
        }
        (min, max)
    }

    /// `max |p(u)|` over `[lo, hi]`.
    pub fn max_abs(&self, lo: f64, hi: f64) -> f64 {
        let (min, max) = self.extrema(lo, hi);
        min.abs().max(max.abs())
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // tangent roots lost to rounding still count
        if disc > -1e-14 * (b * b).max(1.0) {
            return vec![-b / (2.0 * a)];
        }
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Bisection on a bracketing interval; returns the point with the smaller residual.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..BISECT_ITERS {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}
