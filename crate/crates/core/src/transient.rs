//! Time-domain verification of the frequency response: integrate the
//! state-space form under `a_g(t) = sin(ωt)` until the transient has decayed
//! and measure the steady-state amplitude of one floor's absolute
//! acceleration.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::frf::AugmentedSystem;

/// Steps per shortest period (system or forcing).
const STEPS_PER_PERIOD: f64 = 50.0;
/// Transient horizon in slowest time constants.
const DECAY_CONSTANTS: f64 = 10.0;
const MAX_STEPS: u64 = 50_000_000;

struct StateSpace {
    /// `-M⁻¹K`
    ak: DMatrix<f64>,
    /// `-M⁻¹C`
    ac: DMatrix<f64>,
    dofs: usize,
}

impl StateSpace {
    fn acceleration(&self, u: &DVector<f64>, v: &DVector<f64>, ground: f64) -> DVector<f64> {
        let mut a = &self.ak * u + &self.ac * v;
        a.add_scalar_mut(-ground);
        a
    }
}

fn reduce(sys: &AugmentedSystem) -> Result<(StateSpace, usize)> {
    let size = sys.mass.nrows();
    let active: Vec<usize> = (0..size)
        .filter(|&i| {
            i < sys.n_floors
                || sys.mass[(i, i)] != 0.0
                || sys.stiffness[(i, i)] != 0.0
                || sys.damping[(i, i)] != 0.0
        })
        .collect();
    for &i in &active {
        if !(sys.mass[(i, i)] > 0.0) {
            return Err(Error::Numerical(format!("coordinate {i} has stiffness but no mass")));
        }
    }
    let n = active.len();
    let pick = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |a, b| m[(active[a], active[b])]);
    let (k, c) = (pick(&sys.stiffness), pick(&sys.damping));
    let inv_m: Vec<f64> = active.iter().map(|&i| 1.0 / sys.mass[(i, i)]).collect();
    let ak = DMatrix::from_fn(n, n, |a, b| -inv_m[a] * k[(a, b)]);
    let ac = DMatrix::from_fn(n, n, |a, b| -inv_m[a] * c[(a, b)]);
    Ok((StateSpace { ak, ac, dofs: n }, n))
}

/// Steady-state amplitude of `|y_floor| / |a_g|` at forcing frequency `omega`.
/// `floor` is 1-based.
pub fn time_domain_check(sys: &AugmentedSystem, omega: f64, floor: usize) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Inconclusive(format!("forcing frequency must be positive, got {omega}")));
    }
    if floor == 0 || floor > sys.n_floors {
        return Err(Error::InvalidDesign(format!("floor {floor} outside 1..={}", sys.n_floors)));
    }
    let (ss, n) = reduce(sys)?;

    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).fill_with_identity();
    a.view_mut((n, 0), (n, n)).copy_from(&ss.ak);
    a.view_mut((n, n), (n, n)).copy_from(&ss.ac);
    let eig = a.complex_eigenvalues();
    let decay = eig.iter().map(|l| -l.re).fold(f64::INFINITY, f64::min);
    let fastest = eig.iter().map(|l| l.norm()).fold(0.0f64, f64::max);
    if !(decay > 1e-9 * fastest.max(1.0)) {
        return Err(Error::Inconclusive(format!("system is not asymptotically stable (decay rate {decay:e})")));
    }

    let forcing_period = 2.0 * PI / omega;
    let shortest = forcing_period.min(2.0 * PI / fastest);
    let steps_per_cycle = (forcing_period / (shortest / STEPS_PER_PERIOD)).ceil() as u64;
    let h = forcing_period / steps_per_cycle as f64;
    let transient_cycles = ((DECAY_CONSTANTS / decay) / forcing_period).ceil() as u64;
    let total_cycles = transient_cycles + 2;
    if total_cycles.saturating_mul(steps_per_cycle) > MAX_STEPS {
        return Err(Error::Inconclusive(format!(
            "{} steps needed for transient decay, limit {MAX_STEPS}",
            total_cycles * steps_per_cycle
        )));
    }

    let idx = floor - 1;
    let mut u = DVector::zeros(ss.dofs);
    let mut v = DVector::zeros(ss.dofs);
    let ground = |t: f64| (omega * t).sin();
    let mut windows = [(0.0f64, 0.0f64); 2];
    let mut step: u64 = 0;
    for cycle in 0..total_cycles {
        let window = cycle.checked_sub(transient_cycles).map(|w| w as usize);
        for _ in 0..steps_per_cycle {
            let t = step as f64 * h;
            if let Some(w) = window {
                let y = ss.acceleration(&u, &v, ground(t))[idx] + ground(t);
                windows[w].0 += y * (omega * t).sin();
                windows[w].1 += y * (omega * t).cos();
            }
            // classical RK4 on (u, v)
            let k1u = v.clone();
            let k1v = ss.acceleration(&u, &v, ground(t));
            let u2 = &u + &k1u * (h / 2.0);
            let v2 = &v + &k1v * (h / 2.0);
            let k2v = ss.acceleration(&u2, &v2, ground(t + h / 2.0));
            let u3 = &u + &v2 * (h / 2.0);
            let v3 = &v + &k2v * (h / 2.0);
            let k3v = ss.acceleration(&u3, &v3, ground(t + h / 2.0));
            let u4 = &u + &v3 * h;
            let v4 = &v + &k3v * h;
            let k4v = ss.acceleration(&u4, &v4, ground(t + h));
            u += (k1u + &v2 * 2.0 + &v3 * 2.0 + &v4) * (h / 6.0);
            v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
            step += 1;
        }
    }
    let scale = 2.0 / steps_per_cycle as f64;
    let amps: Vec<f64> = windows.iter().map(|(s, c)| scale * s.hypot(*c)).collect();
    if (amps[0] - amps[1]).abs() > 1e-3 * amps[1] {
        return Err(Error::Inconclusive(format!(
            "amplitude still drifting between cycles ({} vs {})",
            amps[0], amps[1]
        )));
    }
    Ok(amps[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::BuildingModel;
    use crate::frf::{assemble, frf, FrequencyGrid};
    use crate::tmd::{TmdDesign, TmdUnit};

    #[test]
    fn bare_building_matches_frf() {
        let b = BuildingModel::new(vec![2.0, 1.0], vec![1000.0, 500.0], 0.01).unwrap();
        let sys = assemble(&b, &TmdDesign::default()).unwrap();
        let td = time_domain_check(&sys, 5.0, 1).unwrap();
        let fd = frf(&sys, &FrequencyGrid::new(vec![5.0]).unwrap()).unwrap().magnitudes[0][0];
        assert!((td - fd).abs() < 0.01 * fd, "{td} vs {fd}");
    }

    #[test]
    fn rigid_body_limit() {
        let b = BuildingModel::new(vec![2.0, 1.0], vec![1000.0, 500.0], 0.01).unwrap();
        let design = TmdDesign::new(vec![TmdUnit::new(15.0, 0.1, 0.05, 2)]);
        let sys = assemble(&b, &design).unwrap();
        let ratio = time_domain_check(&sys, 0.5, 2).unwrap();
        assert!((ratio - 1.0).abs() < 0.01);
    }

    #[test]
    fn undamped_system_is_inconclusive() {
        let b = BuildingModel::new(vec![2.0, 1.0], vec![1000.0, 500.0], 0.0).unwrap();
        let sys = assemble(&b, &TmdDesign::default()).unwrap();
        assert!(matches!(time_domain_check(&sys, 5.0, 1), Err(Error::Inconclusive(_))));
    }
}
