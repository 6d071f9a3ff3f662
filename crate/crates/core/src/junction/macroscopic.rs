//! Node fluxes for the LWR network from demand `c1` and supplies `c2`, `c3`.

use crate::error::{Error, Result};

const CAP_SLACK: f64 = 1e-12;

fn check_caps(c: [f64; 3], sigma: f64) -> Result<()> {
    for (name, value) in ["c1", "c2", "c3"].into_iter().zip(c) {
        if !(value >= -CAP_SLACK && value <= sigma + CAP_SLACK) {
            return Err(Error::NodeCapacity { name, value });
        }
    }
    Ok(())
}

/// Flux-maximising node without a driver preference.
pub fn macro_diverge_nopref(c1: f64, c2: f64, c3: f64, sigma: f64) -> Result<[f64; 3]> {
    check_caps([c1, c2, c3], sigma)?;
    Ok(nopref_unchecked(c1, c2, c3))
}

pub(crate) fn nopref_unchecked(c1: f64, c2: f64, c3: f64) -> [f64; 3] {
    if c2 + c3 <= c1 {
        return [c2 + c3, c2, c3];
    }
    let m = c2.min(c3).min(0.5 * c1);
    [c1, c2.min(c1 - m), c3.min(c1 - m)]
}

/// The same node written as four explicit cases.
pub fn macro_nopref_cases(c1: f64, c2: f64, c3: f64) -> [f64; 3] {
    let half = 0.5 * c1;
    if c2 + c3 <= c1 {
        [c2 + c3, c2, c3]
    } else if half <= c2 && half <= c3 {
        [c1, half, half]
    } else if half >= c2 && half <= c3 {
        [c1, c2, c1 - c2]
    } else {
        [c1, c1 - c3, c3]
    }
}

/// Half of the incoming flow turns onto each outgoing road.
pub fn macro_diverge_equalpref(c1: f64, c2: f64, c3: f64, sigma: f64) -> Result<[f64; 3]> {
    check_caps([c1, c2, c3], sigma)?;
    Ok(equalpref_unchecked(c1, c2, c3))
}

pub(crate) fn equalpref_unchecked(c1: f64, c2: f64, c3: f64) -> [f64; 3] {
    let total = c1.min(2.0 * c2).min(2.0 * c3);
    [total, 0.5 * total, 0.5 * total]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nopref_examples() {
        assert_eq!(macro_diverge_nopref(0.25, 0.21, 0.24, 0.25).unwrap(), [0.25, 0.125, 0.125]);
        assert_eq!(macro_diverge_nopref(0.25, 0.1, 0.1, 0.25).unwrap(), [0.2, 0.1, 0.1]);
        assert_eq!(macro_diverge_nopref(0.2, 0.05, 0.25, 0.25).unwrap(), [0.2, 0.05, 0.15000000000000002]);
        assert!(macro_diverge_nopref(0.3, 0.1, 0.1, 0.25).is_err());
    }

    #[test]
    fn equalpref_example() {
        let c = macro_diverge_equalpref(0.24, 0.09, 0.25, 0.25).unwrap();
        assert_eq!(c, [0.18, 0.09, 0.09]);
    }
}
