#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use tmd_cro::{BuildingModel, Interval, SearchSpace, TmdDesign, TmdUnit};

pub fn n2() -> BuildingModel {
    BuildingModel::new(vec![2.0, 1.0], vec![1000.0, 500.0], 0.01).unwrap()
}

pub fn n4() -> BuildingModel {
    BuildingModel::new(vec![2.0, 2.0, 2.0, 1.0], vec![2000.0, 1500.0, 1000.0, 500.0], 0.01).unwrap()
}

pub fn space(n_floors: usize, n_tmds: usize) -> SearchSpace {
    SearchSpace::new(n_tmds, Interval::new(0.0, 50.0), Interval::new(0.0, 0.3), Interval::new(0.0, 0.05), n_floors).unwrap()
}

/// Building closed by the damper force feedback: every damper applies
/// `H_j(s) Y_i` to its floor, and
/// `(I - s^2 Z^-1 D) Y = (r - s^2 Z^-1 M r) A_g` with `Z = s^2 M + s C + K`.
pub fn feedback_frf(building: &BuildingModel, design: &TmdDesign, omega: f64) -> Vec<f64> {
    let mats = building.matrices().unwrap();
    let n = building.n_floors();
    let s = Complex64::new(0.0, omega);
    let c = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
    let z = c(&mats.mass) * (s * s) + c(&mats.damping) * s + c(&mats.stiffness);
    let z_inv = z.lu().try_inverse().expect("building is damped");
    let mut d = DMatrix::<Complex64>::zeros(n, n);
    for u in &design.units {
        d[(u.floor - 1, u.floor - 1)] += u.transfer(s).unwrap();
    }
    let r = DVector::from_element(n, Complex64::new(1.0, 0.0));
    let gf = &z_inv * (s * s);
    let gg = &r - &gf * (c(&mats.mass) * &r);
    let lhs = DMatrix::<Complex64>::identity(n, n) - &gf * d;
    let y = lhs.lu().solve(&gg).expect("closed loop is well posed");
    y.iter().map(|v| v.norm()).collect()
}

pub fn unit(n_floors: usize) -> impl Strategy<Value = TmdUnit> {
    (0.5f64..50.0, 0.0f64..0.3, 0.0f64..0.05, 1..=n_floors).prop_map(|(w, x, m, f)| TmdUnit::new(w, x, m, f))
}

pub fn design(n_floors: usize, n_tmds: usize) -> impl Strategy<Value = TmdDesign> {
    proptest::collection::vec(unit(n_floors), n_tmds).prop_map(TmdDesign::new)
}

/// Genome with genes anywhere in (and beyond) the bounds.
pub fn raw_genome(len: usize) -> impl Strategy<Value = tmd_cro::Genome> {
    proptest::collection::vec(-20.0f64..80.0, len).prop_map(tmd_cro::Genome)
}

pub fn feasible_genome(space: SearchSpace) -> impl Strategy<Value = tmd_cro::Genome> {
    raw_genome(space.genome_len()).prop_map(move |g| space.repair(&g))
}
