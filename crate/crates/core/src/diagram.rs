//! Fundamental diagrams.
//!
//! A diagram is a strictly concave flux `F` on `[0, 1]` with `F(0) = F(1) = 0`,
//! a unique maximiser `rho_star` and capacity `sigma = F(rho_star)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_density, Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance for root finding and for locating the maximiser.
pub const ROOT_TOL: f64 = 1e-12;
/// Fluxes this far above `sigma` are clamped rather than rejected.
const FLUX_SLACK: f64 = 1e-12;
const VALIDATION_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramKind {
    Lwr,
    Custom,
    Table,
}

#[derive(Clone)]
enum Shape {
    Lwr,
    Custom { flux: ScalarFn, slope: ScalarFn },
    Table { rho: Vec<f64>, flux: Vec<f64> },
}

#[derive(Clone)]
pub struct FluxFunction {
    shape: Shape,
    rho_star: f64,
    sigma: f64,
}

impl fmt::Debug for FluxFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxFunction")
            .field("kind", &self.kind())
            .field("rho_star", &self.rho_star)
            .field("sigma", &self.sigma)
            .finish()
    }
}

impl Default for FluxFunction {
    fn default() -> Self {
        Self::lwr()
    }
}

impl FluxFunction {
    /// `F(rho) = rho (1 - rho)`.
    pub fn lwr() -> Self {
        Self {
            shape: Shape::Lwr,
            rho_star: 0.5,
            sigma: 0.25,
        }
    }

    /// A user-supplied flux and its derivative.
    pub fn custom<F, D>(flux: F, slope: D) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let flux: ScalarFn = Arc::new(flux);
        let slope: ScalarFn = Arc::new(slope);
        let rho_star = polish_max(golden_max(|r| flux(r)), |r| slope(r));
        let sigma = flux(rho_star);
        let diagram = Self {
            shape: Shape::Custom { flux, slope },
            rho_star,
            sigma,
        };
        diagram.validate_sampled()?;
        Ok(diagram)
    }

    /// Piecewise-linear flux through `(rho, F)` samples.
    ///
    /// Concavity is checked on the samples themselves: slopes must strictly
    /// decrease and none may vanish.
    pub fn table(samples: &[(f64, f64)]) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDiagram(msg));
        if samples.len() < 3 {
            return bad(format!("need at least 3 samples, got {}", samples.len()));
        }
        let rho: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let flux: Vec<f64> = samples.iter().map(|s| s.1).collect();
        if rho.iter().chain(&flux).any(|v| !v.is_finite()) {
            return bad("non-finite sample".into());
        }
        if rho[0] != 0.0 || *rho.last().unwrap() != 1.0 {
            return bad("samples must start at rho=0 and end at rho=1".into());
        }
        if flux[0].abs() > ROOT_TOL || flux.last().unwrap().abs() > ROOT_TOL {
            return bad("F(0) and F(1) must vanish".into());
        }
        let mut slopes = Vec::with_capacity(rho.len() - 1);
        for k in 0..rho.len() - 1 {
            let dr = rho[k + 1] - rho[k];
            if dr <= 0.0 {
                return bad(format!("sample densities not increasing at index {}", k + 1));
            }
            let s = (flux[k + 1] - flux[k]) / dr;
            if s == 0.0 {
                return bad(format!("zero slope on segment {k}"));
            }
            if s > 1.0 + ROOT_TOL {
                return bad(format!("slope {s} exceeds 1 on segment {k}"));
            }
            slopes.push(s);
        }
        if slopes.windows(2).any(|w| w[1] >= w[0]) {
            return bad("samples are not strictly concave".into());
        }
        for k in 0..rho.len() - 1 {
            // -F/(1-rho) <= F' from both sides of every node
            for &(r, f) in &[(rho[k], flux[k]), (rho[k + 1], flux[k + 1])] {
                if r < 1.0 && -f / (1.0 - r) > slopes[k] + ROOT_TOL {
                    return bad(format!("subcharacteristic condition fails at rho={r}"));
                }
            }
        }
        let (k_max, _) = flux
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, &f)| if f > acc.1 { (k, f) } else { acc });
        Ok(Self {
            rho_star: rho[k_max],
            sigma: flux[k_max],
            shape: Shape::Table { rho, flux },
        })
    }

    fn validate_sampled(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDiagram(msg));
        let f0 = self.flux(0.0);
        let f1 = self.flux(1.0);
        if !(f0.abs() <= ROOT_TOL && f1.abs() <= ROOT_TOL) {
            return bad(format!("F(0)={f0}, F(1)={f1}; both must vanish"));
        }
        let n = VALIDATION_POINTS;
        let grid: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&r| self.flux(r)).collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return bad("non-finite flux value".into());
        }
        for k in 1..n - 1 {
            if vals[k - 1] - 2.0 * vals[k] + vals[k + 1] >= 0.0 {
                return bad(format!("not strictly concave near rho={}", grid[k]));
            }
        }
        for (&r, &f) in grid.iter().zip(&vals) {
            let s = self.slope(r);
            if s > 1.0 + ROOT_TOL {
                return bad(format!("F'({r})={s} exceeds 1"));
            }
            if r < 1.0 && -f / (1.0 - r) > s + ROOT_TOL {
                return bad(format!("subcharacteristic condition fails at rho={r}"));
            }
        }
        if !(self.sigma > 0.0 && self.rho_star > 0.0 && self.rho_star < 1.0) {
            return bad("maximiser must lie strictly inside (0, 1)".into());
        }
        Ok(())
    }

    pub fn kind(&self) -> DiagramKind {
        match self.shape {
            Shape::Lwr => DiagramKind::Lwr,
            Shape::Custom { .. } => DiagramKind::Custom,
            Shape::Table { .. } => DiagramKind::Table,
        }
    }

    pub fn rho_star(&self) -> f64 {
        self.rho_star
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `F(rho)`; the caller guarantees `rho` lies in `[0, 1]`.
    pub fn flux(&self, rho: f64) -> f64 {
        match &self.shape {
            Shape::Lwr => rho * (1.0 - rho),
            Shape::Custom { flux, .. } => flux(rho),
            Shape::Table { rho: xs, flux: ys } => {
                let k = segment(xs, rho);
                let t = (rho - xs[k]) / (xs[k + 1] - xs[k]);
                ys[k] + t * (ys[k + 1] - ys[k])
            }
        }
    }

    /// `F'(rho)`. On a table node the slope of the segment to the right is used.
    pub fn slope(&self, rho: f64) -> f64 {
        match &self.shape {
            Shape::Lwr => 1.0 - 2.0 * rho,
            Shape::Custom { slope, .. } => slope(rho),
            Shape::Table { rho: xs, flux: ys } => {
                let k = segment(xs, rho);
                (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])
            }
        }
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        Ok(self.flux(check_density(rho)?))
    }

    pub fn derivative(&self, rho: f64) -> Result<f64> {
        Ok(self.slope(check_density(rho)?))
    }

    pub fn demand(&self, rho: f64) -> f64 {
        if rho <= self.rho_star {
            self.flux(rho)
        } else {
            self.sigma
        }
    }

    pub fn supply(&self, rho: f64) -> f64 {
        if rho <= self.rho_star {
            self.sigma
        } else {
            self.flux(rho)
        }
    }

    /// The other density carrying the same flux as `rho`.
    pub fn tau(&self, rho: f64) -> Result<f64> {
        let f = self.eval(rho)?;
        Ok(match self.shape {
            Shape::Lwr => 1.0 - rho,
            _ if rho == self.rho_star => rho,
            _ if rho < self.rho_star => self.rho_plus(f),
            _ => self.rho_minus(f),
        })
    }

    /// Both roots of `F(rho) = c`, ordered.
    pub fn rho_pm(&self, c: f64) -> Result<(f64, f64)> {
        let c = self.check_flux(c)?;
        Ok((self.rho_minus(c), self.rho_plus(c)))
    }

    pub fn check_flux(&self, c: f64) -> Result<f64> {
        if c.is_nan() || c < -FLUX_SLACK || c > self.sigma + FLUX_SLACK {
            return Err(Error::InfeasibleFlux {
                flux: c,
                sigma: self.sigma,
            });
        }
        Ok(c.clamp(0.0, self.sigma))
    }

    /// Root of `F = c` on the free-flow branch. `c` is clamped to `[0, sigma]`.
    pub fn rho_minus(&self, c: f64) -> f64 {
        let c = c.clamp(0.0, self.sigma);
        match self.shape {
            Shape::Lwr => {
                let disc = (1.0 - 4.0 * c).max(0.0);
                2.0 * c / (1.0 + disc.sqrt())
            }
            _ => self.bisect(c, 0.0, self.rho_star, true),
        }
    }

    /// Root of `F = c` on the congested branch. `c` is clamped to `[0, sigma]`.
    pub fn rho_plus(&self, c: f64) -> f64 {
        let c = c.clamp(0.0, self.sigma);
        match self.shape {
            Shape::Lwr => {
                let disc = (1.0 - 4.0 * c).max(0.0);
                1.0 - 2.0 * c / (1.0 + disc.sqrt())
            }
            _ => self.bisect(c, self.rho_star, 1.0, false),
        }
    }

    fn bisect(&self, c: f64, mut lo: f64, mut hi: f64, increasing: bool) -> f64 {
        if c >= self.sigma {
            return self.rho_star;
        }
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            let below = self.flux(mid) < c;
            if below == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn segment(xs: &[f64], rho: f64) -> usize {
    let k = xs.partition_point(|&x| x <= rho);
    k.saturating_sub(1).min(xs.len() - 2)
}

fn golden_max(f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > ROOT_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Flux values are flat at the maximum, so the golden-section estimate is
/// only good to about `sqrt(eps)`. Bisect on the sign of the slope near it.
fn polish_max(x: f64, slope: impl Fn(f64) -> f64) -> f64 {
    let (mut a, mut b) = ((x - 1e-6).max(0.0), (x + 1e-6).min(1.0));
    if !(slope(a) > 0.0 && slope(b) < 0.0) {
        return x;
    }
    while b - a > ROOT_TOL {
        let mid = 0.5 * (a + b);
        if slope(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lwr_constants() {
        let f = FluxFunction::lwr();
        assert_eq!(f.rho_star(), 0.5);
        assert_eq!(f.sigma(), 0.25);
        assert_eq!(f.tau(0.3).unwrap(), 0.7);
        assert_eq!(f.demand(0.7), 0.25);
        assert!((f.supply(0.7) - 0.21).abs() < 1e-15);
    }

    #[test]
    fn roots_at_one_eighth() {
        let (lo, hi) = FluxFunction::lwr().rho_pm(0.125).unwrap();
        assert!((lo - 0.146447).abs() < 1e-6);
        assert!((hi - 0.853553).abs() < 1e-6);
    }

    #[test]
    fn out_of_range_inputs() {
        let f = FluxFunction::lwr();
        assert!(matches!(f.eval(1.5), Err(Error::DensityOutOfRange(_))));
        assert!(matches!(f.rho_pm(0.3), Err(Error::InfeasibleFlux { .. })));
        assert!(f.rho_pm(0.25 + 1e-14).is_ok());
    }

    #[test]
    fn custom_matches_closed_form() {
        let f = FluxFunction::custom(|r| r * (1.0 - r), |r| 1.0 - 2.0 * r).unwrap();
        assert!((f.rho_star() - 0.5).abs() < 1e-9);
        for c in [0.0, 0.01, 0.125, 0.2, 0.25] {
            let (a, b) = f.rho_pm(c).unwrap();
            let (x, y) = FluxFunction::lwr().rho_pm(c).unwrap();
            assert!((a - x).abs() < 1e-6 && (b - y).abs() < 1e-6, "c={c}");
        }
    }

    #[test]
    fn custom_rejects_convex_and_fast() {
        assert!(FluxFunction::custom(|r| r * r * (1.0 - r), |r| 2.0 * r - 3.0 * r * r).is_err());
        assert!(FluxFunction::custom(|r| 3.0 * r * (1.0 - r), |r| 3.0 - 6.0 * r).is_err());
        assert!(FluxFunction::custom(|r| r * (1.0 - r) + 0.1, |r| 1.0 - 2.0 * r).is_err());
    }

    #[test]
    fn table_validation() {
        let ok = FluxFunction::table(&[(0.0, 0.0), (0.4, 0.2), (1.0, 0.0)]).unwrap();
        assert_eq!(ok.rho_star(), 0.4);
        assert_eq!(ok.sigma(), 0.2);
        assert!((ok.flux(0.2) - 0.1).abs() < 1e-15);
        let (lo, hi) = ok.rho_pm(0.1).unwrap();
        assert!((lo - 0.2).abs() < 1e-11 && (hi - 0.7).abs() < 1e-11);
        assert!(FluxFunction::table(&[(0.0, 0.0), (0.3, 0.2), (0.6, 0.2), (1.0, 0.0)]).is_err());
        assert!(FluxFunction::table(&[(0.0, 0.0), (0.5, 0.1), (0.6, 0.2), (1.0, 0.0)]).is_err());
        assert!(FluxFunction::table(&[(0.0, 0.0), (0.5, 0.25)]).is_err());
    }
}
