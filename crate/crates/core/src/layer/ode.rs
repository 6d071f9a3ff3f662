use serde::Serialize;

use crate::diagram::FluxFunction;
use crate::error::{Error, Result};
use crate::lwr::Side;

pub const DEFAULT_Y_MAX: f64 = 200.0;
const ABS_TOL: f64 = 1e-10;
const FIXPOINT_TOL: f64 = 1e-8;
const SETTLE_STEPS: usize = 10;
const H_MAX: f64 = 1.0;
const H_MIN: f64 = 1e-12;
const START_TOL: f64 = 1e-12;

/// `d rho / dy`. Outgoing roads use the left form, the incoming road the right form.
pub fn layer_rhs(rho: f64, c: f64, side: Side, f: &FluxFunction) -> Result<f64> {
    if c == 0.0 {
        return Err(Error::SingularLayer);
    }
    let v = (1.0 - rho) * (f.flux(rho.clamp(0.0, 1.0)) - c) / c;
    Ok(match side {
        Side::Left => v,
        Side::Right => -v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LayerOutcome {
    /// Settled on `limit`, one of `rho_-`, `rho_+`, 1.
    Converged { limit: f64 },
    /// Left `[0, 1]` at `y`.
    Diverged { y: f64, rho: f64 },
    /// Still moving at `y_max`.
    Unsettled { rho: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerTrajectory {
    /// Accepted `(y, rho)` points, starting with `(0, rho_0)`.
    pub points: Vec<(f64, f64)>,
    pub outcome: LayerOutcome,
}

// Fehlberg 4(5) tableau.
const A: [[f64; 5]; 5] = [
    [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

fn rkf45_step(rho: f64, h: f64, g: &impl Fn(f64) -> f64) -> (f64, f64) {
    let mut k = [0.0; 6];
    k[0] = g(rho);
    for s in 1..6 {
        let inc: f64 = A[s - 1].iter().zip(&k).map(|(a, ki)| a * ki).sum();
        k[s] = g(rho + h * inc);
    }
    let y4: f64 = rho + h * B4.iter().zip(&k).map(|(b, ki)| b * ki).sum::<f64>();
    let y5: f64 = rho + h * B5.iter().zip(&k).map(|(b, ki)| b * ki).sum::<f64>();
    (y4, (y5 - y4).abs())
}

/// Integrate the layer from `rho_0` at `y = 0` towards `y_max`.
pub fn integrate_layer(
    rho0: f64,
    c: f64,
    side: Side,
    y_max: f64,
    f: &FluxFunction,
) -> Result<LayerTrajectory> {
    let c = f.check_flux(c)?;
    if c == 0.0 {
        return Err(Error::SingularLayer);
    }
    let g = |r: f64| {
        let v = (1.0 - r) * (f.flux(r.clamp(0.0, 1.0)) - c) / c;
        match side {
            Side::Left => v,
            Side::Right => -v,
        }
    };
    let fixpoints = [f.rho_minus(c), f.rho_plus(c), 1.0];
    let near_fixpoint = |r: f64| {
        fixpoints
            .iter()
            .copied()
            .find(|&p| (r - p).abs() < FIXPOINT_TOL)
    };

    let mut points = vec![(0.0, rho0)];
    // Roundoff in F(rho_0) - C would push a start on an unstable fixpoint off it.
    if let Some(p) = fixpoints.iter().copied().find(|&p| (rho0 - p).abs() <= START_TOL) {
        return Ok(LayerTrajectory {
            points,
            outcome: LayerOutcome::Converged { limit: p },
        });
    }
    let (mut y, mut rho) = (0.0, rho0);
    let mut h: f64 = 1e-3;
    let mut settled = 0;
    while y < y_max {
        let step = h.min(y_max - y);
        let (next, err) = rkf45_step(rho, step, &g);
        if err > ABS_TOL && step > H_MIN {
            h = step * (0.9 * (ABS_TOL / err).powf(0.2)).clamp(0.1, 1.0);
            continue;
        }
        y += step;
        rho = next;
        points.push((y, rho));
        if !(-FIXPOINT_TOL..=1.0 + FIXPOINT_TOL).contains(&rho) || !rho.is_finite() {
            return Ok(LayerTrajectory {
                points,
                outcome: LayerOutcome::Diverged { y, rho },
            });
        }
        match near_fixpoint(rho) {
            Some(p) => {
                settled += 1;
                if settled >= SETTLE_STEPS {
                    return Ok(LayerTrajectory {
                        points,
                        outcome: LayerOutcome::Converged { limit: p },
                    });
                }
            }
            None => settled = 0,
        }
        let grow = if err == 0.0 {
            5.0
        } else {
            (0.9 * (ABS_TOL / err).powf(0.2)).clamp(0.2, 5.0)
        };
        h = (step * grow).min(H_MAX);
    }
    Ok(LayerTrajectory {
        points,
        outcome: LayerOutcome::Unsettled { rho },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_left_layer() {
        let f = FluxFunction::lwr();
        let t = integrate_layer(0.5, 0.16, Side::Left, DEFAULT_Y_MAX, &f).unwrap();
        match t.outcome {
            LayerOutcome::Converged { limit } => assert!((limit - 0.8).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let last = t.points.last().unwrap().1;
        assert!((last - 0.8).abs() < 1e-8);
    }

    #[test]
    fn zero_flux_is_singular() {
        let f = FluxFunction::lwr();
        assert_eq!(layer_rhs(0.3, 0.0, Side::Left, &f), Err(Error::SingularLayer));
        assert!(integrate_layer(0.3, 0.0, Side::Left, 10.0, &f).is_err());
    }

    #[test]
    fn unstable_left_layer_runs_off() {
        let f = FluxFunction::lwr();
        let (lo, _) = f.rho_pm(0.16).unwrap();
        let t = integrate_layer(lo - 0.01, 0.16, Side::Left, DEFAULT_Y_MAX, &f).unwrap();
        assert!(matches!(t.outcome, LayerOutcome::Diverged { .. }), "{:?}", t.outcome);
    }
}
