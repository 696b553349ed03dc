//! Tuned mass damper units and their floor-force transfer function.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One damper, stored in tuning form rather than as `(k, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TmdUnit {
    /// Natural frequency of the isolated damper, rad/s.
    pub omega: f64,
    pub xi: f64,
    /// Moving mass, kg.
    pub mass: f64,
    /// 1-based floor the damper is attached to.
    pub floor: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TmdDesign {
    #[serde(rename = "tmd")]
    pub units: Vec<TmdUnit>,
}

impl TmdUnit {
    pub fn new(omega: f64, xi: f64, mass: f64, floor: usize) -> Self {
        TmdUnit { omega, xi, mass, floor }
    }

    /// `(k_t, c_t)` with `k_t = m ω²` and `c_t = 2 ξ ω m`.
    pub fn physical_coefficients(&self) -> (f64, f64) {
        (self.mass * self.omega * self.omega, 2.0 * self.xi * self.omega * self.mass)
    }

    /// Inverse of [`physical_coefficients`](Self::physical_coefficients).
    pub fn from_physical(stiffness: f64, damping: f64, mass: f64, floor: usize) -> Self {
        let omega = (stiffness / mass).sqrt();
        let xi = damping / (2.0 * (stiffness * mass).sqrt());
        TmdUnit { omega, xi, mass, floor }
    }

    /// Force exerted on the host floor per unit absolute floor acceleration:
    /// `H(s) = -m (2ξω s + ω²) / (s² + 2ξω s + ω²)`.
    pub fn transfer(&self, s: Complex64) -> Result<Complex64> {
        if self.mass == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let w2 = self.omega * self.omega;
        let num = s * (2.0 * self.xi * self.omega) + w2;
        let den = s * s + s * (2.0 * self.xi * self.omega) + w2;
        if den.norm() == 0.0 {
            return Err(Error::Pole { omega_t: self.omega });
        }
        Ok(-(num / den) * self.mass)
    }

    pub fn validate(&self, n_floors: usize) -> Result<()> {
        if !(self.omega >= 0.0 && self.xi >= 0.0 && self.mass >= 0.0) {
            return Err(Error::InvalidDesign(format!(
                "negative or NaN damper parameter (omega={}, xi={}, mass={})",
                self.omega, self.xi, self.mass
            )));
        }
        if self.floor == 0 || self.floor > n_floors {
            return Err(Error::InvalidDesign(format!(
                "floor index {} outside 1..={n_floors}",
                self.floor
            )));
        }
        Ok(())
    }
}

impl TmdDesign {
    pub fn new(units: Vec<TmdUnit>) -> Self {
        TmdDesign { units }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn validate(&self, n_floors: usize) -> Result<()> {
        self.units.iter().try_for_each(|u| u.validate(n_floors))
    }

    /// Placement indicator: `true` iff damper `j` sits on floor `i` (1-based).
    pub fn placed(&self, j: usize, floor: usize) -> bool {
        self.units[j].floor == floor
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        assert_eq!(TmdUnit::new(1.0, 0.0, 1.0, 1).physical_coefficients(), (1.0, 0.0));
        let (k, c) = TmdUnit::new(15.811, 0.1, 0.05, 1).physical_coefficients();
        assert!((k - 12.499386).abs() < 1e-6);
        assert!((c - 0.15811).abs() < 1e-12);
        assert_eq!(TmdUnit::new(22.0, 0.2, 0.0, 1).physical_coefficients(), (0.0, 0.0));
    }

    #[test]
    fn transfer_limits() {
        let unit = TmdUnit::new(12.0, 0.1, 0.05, 2);
        let dc = unit.transfer(Complex64::new(0.0, 0.0)).unwrap();
        assert!((dc - Complex64::new(-0.05, 0.0)).norm() < 1e-15);
        let far = unit.transfer(Complex64::new(0.0, 1e7)).unwrap();
        assert!(far.norm() < 1e-6);
        let zero = TmdUnit::new(12.0, 0.1, 0.0, 2);
        assert_eq!(zero.transfer(Complex64::new(0.0, 12.0)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn undamped_pole_is_an_error() {
        let unit = TmdUnit::new(10.0, 0.0, 0.05, 1);
        assert!(matches!(unit.transfer(Complex64::new(0.0, 10.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn lightly_damped_peak_near_tuning() {
        for &xi in &[0.01, 0.03, 0.05] {
            let unit = TmdUnit::new(20.0, xi, 0.05, 1);
            let (peak_w, _) = (1..=4000)
                .map(|i| i as f64 * 0.01)
                .map(|w| (w, unit.transfer(Complex64::new(0.0, w)).unwrap().norm()))
                .fold((0.0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            assert!((peak_w - 20.0).abs() <= 0.05 * 20.0, "xi={xi} peak at {peak_w}");
        }
    }

    #[test]
    fn floor_range_checked() {
        let design = TmdDesign::new(vec![TmdUnit::new(1.0, 0.1, 0.01, 3)]);
        assert!(design.validate(2).is_err());
        assert!(design.validate(3).is_ok());
        assert!(TmdUnit::new(1.0, 0.1, 0.01, 0).validate(3).is_err());
    }
}
