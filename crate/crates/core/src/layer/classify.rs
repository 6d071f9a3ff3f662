use serde::Serialize;

use crate::diagram::FluxFunction;
use crate::error::Result;
use crate::interval::Interval;
use crate::junction::Stability;
use crate::lwr::Side;

/// One admissible layer at a given flux: its LWR end state and the traces
/// `rho_0` that reach it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerRow {
    pub stability: Stability,
    pub rho_k: f64,
    pub rho0: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerClassification {
    pub side: Side,
    pub flux: f64,
    pub rows: Vec<LayerRow>,
}

impl LayerClassification {
    pub fn row(&self, stability: Stability) -> Option<&LayerRow> {
        self.rows.iter().find(|r| r.stability == stability)
    }

    /// Row whose trace domain holds `rho0`.
    pub fn predict(&self, rho0: f64) -> Option<&LayerRow> {
        self.rows.iter().find(|r| r.rho0.contains(rho0))
    }
}

/// Layers available at flux `c` on the given side.
pub fn classify(c: f64, side: Side, f: &FluxFunction) -> Result<LayerClassification> {
    let c = f.check_flux(c)?;
    let rs = f.rho_star();
    let (lo, hi) = (f.rho_minus(c), f.rho_plus(c));
    let row = |stability, rho_k, rho0| LayerRow {
        stability,
        rho_k,
        rho0,
    };
    let mut rows = Vec::with_capacity(2);
    match side {
        Side::Left => {
            if c < f.sigma() {
                rows.push(row(Stability::Unstable, lo, Interval::point(lo)));
            }
            let stable = if c == 0.0 {
                row(Stability::Stable, 1.0, Interval::closed(0.0, 1.0).with_ends(false, true))
            } else if c >= f.sigma() {
                row(Stability::Stable, rs, Interval::closed(rs, 1.0).with_ends(true, false))
            } else {
                row(Stability::Stable, hi, Interval::open(lo, 1.0))
            };
            rows.push(stable);
        }
        Side::Right => {
            if c < f.sigma() {
                rows.push(row(Stability::Unstable, hi, Interval::point(hi)));
            }
            let stable = if c == 0.0 {
                row(Stability::Stable, 0.0, Interval::closed(0.0, 1.0).with_ends(true, false))
            } else if c >= f.sigma() {
                row(Stability::Stable, rs, Interval::closed(0.0, rs))
            } else {
                row(Stability::Stable, lo, Interval::closed(0.0, hi).with_ends(true, false))
            };
            rows.push(stable);
        }
    }
    Ok(LayerClassification { side, flux: c, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_at_capacity() {
        let f = FluxFunction::lwr();
        let l = classify(0.25, Side::Left, &f).unwrap();
        assert_eq!(l.rows.len(), 1);
        assert_eq!(l.rows[0].rho_k, 0.5);
        assert!(l.predict(0.5).is_some() && l.predict(0.4).is_none());
        let r = classify(0.25, Side::Right, &f).unwrap();
        assert!(r.predict(0.0).is_some() && r.predict(0.6).is_none());
    }

    #[test]
    fn rows_at_zero_flux() {
        let f = FluxFunction::lwr();
        let l = classify(0.0, Side::Left, &f).unwrap();
        assert_eq!(l.row(Stability::Stable).unwrap().rho_k, 1.0);
        assert_eq!(l.row(Stability::Unstable).unwrap().rho_k, 0.0);
        let r = classify(0.0, Side::Right, &f).unwrap();
        assert_eq!(r.row(Stability::Stable).unwrap().rho_k, 0.0);
        assert_eq!(r.row(Stability::Unstable).unwrap().rho_k, 1.0);
    }

    #[test]
    fn interior_flux() {
        let f = FluxFunction::lwr();
        let l = classify(0.16, Side::Left, &f).unwrap();
        assert!((l.predict(0.5).unwrap().rho_k - 0.8).abs() < 1e-12);
        assert!(l.predict(0.1).is_none());
        let r = classify(0.16, Side::Right, &f).unwrap();
        assert!((r.predict(0.5).unwrap().rho_k - 0.2).abs() < 1e-12);
        assert!(r.predict(0.9).is_none());
    }
}
