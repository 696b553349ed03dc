//! Frequency response of the building with dampers attached, and the
//! min-max fitness: the largest peak of `|Y_i(jω) / A_g(jω)|` over floors.
//!
//! Coordinates of the augmented system are the `N` floor displacements
//! followed by the `M` damper displacements, all relative to the ground, so
//! the ground-acceleration influence vector is all ones.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::building::{BuildingModel, StructuralMatrices};
use crate::error::{Error, Result};
use crate::tmd::TmdDesign;

#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedSystem {
    pub mass: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub n_floors: usize,
    pub n_tmds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrfConfig {
    /// Lower end of the dense grid, rad/s.
    pub omega_min: f64,
    /// Upper end of the grid as a multiple of the highest bare frequency.
    pub upper_factor: f64,
    /// Largest allowed grid spacing, rad/s.
    pub max_step: f64,
    /// Bracket width at which golden-section refinement stops, rad/s.
    pub refine_tol: f64,
    /// Grid maxima below `refine_screen` times the global grid maximum are
    /// not refined; they cannot overtake the global peak.
    pub refine_screen: f64,
}

impl Default for FrfConfig {
    fn default() -> Self {
        FrfConfig { omega_min: 0.5, upper_factor: 1.4, max_step: 0.01, refine_tol: 1e-6, refine_screen: 0.9 }
    }
}

impl FrfConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.omega_min > 0.0
            && self.upper_factor > 0.0
            && self.max_step > 0.0
            && self.refine_tol > 0.0
            && (0.0..=1.0).contains(&self.refine_screen);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid frf settings {self:?}")))
        }
    }

    pub fn grid_for(&self, building: &BuildingModel) -> Result<FrequencyGrid> {
        let modal = building.modal()?;
        let top = *modal.natural_frequencies.last().expect("at least one floor");
        FrequencyGrid::uniform(self.omega_min, self.upper_factor * top, self.max_step)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    values: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("frequency grid is empty".into()));
        }
        if !(values[0] > 0.0) || values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("frequency grid must be positive and strictly ascending".into()));
        }
        Ok(FrequencyGrid { values })
    }

    /// Evenly spaced points covering `[lo, hi]` with spacing at most `max_step`.
    pub fn uniform(lo: f64, hi: f64, max_step: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Config(format!("grid upper bound {hi} not above lower bound {lo}")));
        }
        let intervals = ((hi - lo) / max_step).ceil() as usize;
        let h = (hi - lo) / intervals as f64;
        Self::new((0..=intervals).map(|i| if i == intervals { hi } else { lo + i as f64 * h }).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrfCurves {
    pub omega_grid: Vec<f64>,
    /// `magnitudes[floor][k]`, linear scale.
    pub magnitudes: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub value: f64,
    /// 1-based floor of the governing peak.
    pub argmax_floor: usize,
    pub argmax_omega: f64,
}

impl FitnessValue {
    pub fn db(&self) -> f64 {
        20.0 * self.value.log10()
    }
}

pub fn assemble(building: &BuildingModel, design: &TmdDesign) -> Result<AugmentedSystem> {
    let mats = building.matrices()?;
    assemble_with(&mats, design)
}

/// Assembly from pre-built building matrices.
pub fn assemble_with(mats: &StructuralMatrices, design: &TmdDesign) -> Result<AugmentedSystem> {
    let n = mats.mass.nrows();
    design.validate(n)?;
    let size = n + design.len();
    let mut mass = DMatrix::zeros(size, size);
    let mut damping = DMatrix::zeros(size, size);
    let mut stiffness = DMatrix::zeros(size, size);
    mass.view_mut((0, 0), (n, n)).copy_from(&mats.mass);
    damping.view_mut((0, 0), (n, n)).copy_from(&mats.damping);
    stiffness.view_mut((0, 0), (n, n)).copy_from(&mats.stiffness);

    for (j, unit) in design.units.iter().enumerate() {
        let (k, c) = unit.physical_coefficients();
        let i = unit.floor - 1;
        let t = n + j;
        mass[(t, t)] = unit.mass;
        for (m, v) in [(&mut stiffness, k), (&mut damping, c)] {
            m[(i, i)] += v;
            m[(t, t)] += v;
            m[(i, t)] -= v;
            m[(t, i)] -= v;
        }
    }
    Ok(AugmentedSystem { mass, damping, stiffness, n_floors: n, n_tmds: design.len() })
}

impl From<&StructuralMatrices> for AugmentedSystem {
    fn from(mats: &StructuralMatrices) -> Self {
        AugmentedSystem {
            mass: mats.mass.clone(),
            damping: mats.damping.clone(),
            stiffness: mats.stiffness.clone(),
            n_floors: mats.mass.nrows(),
            n_tmds: 0,
        }
    }
}

struct Attachment {
    mass: f64,
    stiffness: f64,
    damping: f64,
    /// `(floor, K_ft, C_ft)` for every floor the damper couples to.
    couplings: Vec<(usize, f64, f64)>,
}

/// Per-frequency solver for `(K - ω²M + jωC) u = -M 1`.
///
/// Damper coordinates only couple to floors, so their block of the dynamic
/// stiffness is diagonal and is condensed out exactly before an LU solve of
/// the `N x N` floor block.
pub(crate) struct FrfSolver {
    n: usize,
    floor_mass: Vec<f64>,
    floor_stiffness: Vec<f64>,
    floor_damping: Vec<f64>,
    attachments: Vec<Attachment>,
    /// Floor block is symmetric tridiagonal with positive definite damping:
    /// elimination needs no pivoting.
    banded: bool,
    single: Lanes<1>,
    single_out: Vec<[f64; 1]>,
    z: Vec<Complex64>,
    u: Vec<Complex64>,
}

impl FrfSolver {
    pub fn new(sys: &AugmentedSystem) -> Result<Self> {
        let n = sys.n_floors;
        let size = n + sys.n_tmds;
        for (name, m) in [("mass", &sys.mass), ("damping", &sys.damping), ("stiffness", &sys.stiffness)] {
            if m.nrows() != size || m.ncols() != size {
                return Err(Error::Numerical(format!("{name} matrix is not {size}x{size}")));
            }
        }
        for a in 0..size {
            for b in 0..size {
                let off_diag_mass = a != b && sys.mass[(a, b)] != 0.0;
                let tmd_cross = a >= n && b >= n && a != b && (sys.stiffness[(a, b)] != 0.0 || sys.damping[(a, b)] != 0.0);
                if off_diag_mass || tmd_cross {
                    return Err(Error::Numerical("augmented system lacks damper block structure".into()));
                }
            }
        }
        let block = |m: &DMatrix<f64>| -> Vec<f64> {
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
        };
        let attachments: Vec<Attachment> = (n..size)
            .filter_map(|t| {
                let couplings: Vec<_> = (0..n)
                    .filter(|&i| sys.stiffness[(i, t)] != 0.0 || sys.damping[(i, t)] != 0.0)
                    .map(|i| (i, sys.stiffness[(i, t)], sys.damping[(i, t)]))
                    .collect();
                let inert = sys.mass[(t, t)] == 0.0 && sys.stiffness[(t, t)] == 0.0 && sys.damping[(t, t)] == 0.0;
                (!inert).then(|| Attachment {
                    mass: sys.mass[(t, t)],
                    stiffness: sys.stiffness[(t, t)],
                    damping: sys.damping[(t, t)],
                    couplings,
                })
            })
            .collect();
        let floor_block = sys.damping.view((0, 0), (n, n)).clone_owned();
        let banded = (0..n).all(|i| {
            (0..n).all(|j| {
                let (k, c) = (sys.stiffness[(i, j)], sys.damping[(i, j)]);
                let in_band = i.abs_diff(j) <= 1 || (k == 0.0 && c == 0.0);
                in_band && k == sys.stiffness[(j, i)] && c == sys.damping[(j, i)]
            })
        }) && attachments.iter().all(|a| a.couplings.len() <= 1)
            && floor_block.cholesky().is_some();
        Ok(FrfSolver {
            n,
            floor_mass: (0..n).map(|i| sys.mass[(i, i)]).collect(),
            floor_stiffness: block(&sys.stiffness),
            floor_damping: block(&sys.damping),
            attachments,
            banded,
            single: Lanes::new(n),
            single_out: vec![[0.0]; n],
            z: vec![Complex64::new(0.0, 0.0); n * n],
            u: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    /// Absolute floor acceleration per unit ground acceleration, `1 - ω² u_i`.
    pub fn solve(&mut self, omega: f64, out: &mut [f64]) -> Result<()> {
        if self.banded {
            return self.solve_banded(omega, out);
        }
        let n = self.n;
        let w2 = omega * omega;
        for idx in 0..n * n {
            self.z[idx] = Complex64::new(self.floor_stiffness[idx], omega * self.floor_damping[idx]);
        }
        for i in 0..n {
            self.z[i * n + i].re -= w2 * self.floor_mass[i];
            self.u[i] = Complex64::new(-self.floor_mass[i], 0.0);
        }
        for att in &self.attachments {
            let d = Complex64::new(att.stiffness - w2 * att.mass, omega * att.damping);
            if d.norm_sqr() == 0.0 {
                return Err(Error::SingularAt { omega });
            }
            let inv_d = d.inv();
            let rhs_t = -att.mass;
            for &(i, ki, ci) in &att.couplings {
                let bi = Complex64::new(ki, omega * ci);
                let bi_over_d = bi * inv_d;
                self.u[i] -= bi_over_d * rhs_t;
                for &(j, kj, cj) in &att.couplings {
                    self.z[i * n + j] -= bi_over_d * Complex64::new(kj, omega * cj);
                }
            }
        }
        lu_solve_in_place(n, &mut self.z, &mut self.u).map_err(|_| Error::SingularAt { omega })?;
        for i in 0..n {
            out[i] = (Complex64::new(1.0, 0.0) - self.u[i] * w2).norm();
        }
        Ok(())
    }
}

/// Frequencies solved together by the banded kernel.
const LANES: usize = 8;

/// Per-lane complex scratch, split into real and imaginary parts.
struct Lanes<const L: usize> {
    diag_re: Vec<[f64; L]>,
    diag_im: Vec<[f64; L]>,
    rhs_re: Vec<[f64; L]>,
    rhs_im: Vec<[f64; L]>,
}

impl<const L: usize> Lanes<L> {
    fn new(n: usize) -> Self {
        Lanes { diag_re: vec![[0.0; L]; n], diag_im: vec![[0.0; L]; n], rhs_re: vec![[0.0; L]; n], rhs_im: vec![[0.0; L]; n] }
    }
}

#[inline(always)]
fn cdiv(ar: f64, ai: f64, br: f64, bi: f64) -> (f64, f64) {
    let inv = 1.0 / (br * br + bi * bi);
    ((ar * br + ai * bi) * inv, (ai * br - ar * bi) * inv)
}

impl FrfSolver {
    fn solve_banded(&mut self, omega: f64, out: &mut [f64]) -> Result<()> {
        let mut lanes = std::mem::replace(&mut self.single, Lanes::new(0));
        let mut res = std::mem::take(&mut self.single_out);
        let status = self.banded_kernel(&[omega], &mut lanes, &mut res);
        for (o, r) in out.iter_mut().zip(&res) {
            *o = r[0];
        }
        self.single = lanes;
        self.single_out = res;
        status
    }

    /// Thomas elimination on the condensed floor block, `L` frequencies at a
    /// time in straight-line real arithmetic.
    fn banded_kernel<const L: usize>(&self, w: &[f64; L], s: &mut Lanes<L>, out: &mut [[f64; L]]) -> Result<()> {
        let n = self.n;
        let w2: [f64; L] = std::array::from_fn(|l| w[l] * w[l]);
        for i in 0..n {
            let idx = i * n + i;
            let (k, c, m) = (self.floor_stiffness[idx], self.floor_damping[idx], self.floor_mass[i]);
            s.diag_re[i] = std::array::from_fn(|l| k - w2[l] * m);
            s.diag_im[i] = std::array::from_fn(|l| w[l] * c);
            s.rhs_re[i] = [-m; L];
            s.rhs_im[i] = [0.0; L];
        }
        for att in &self.attachments {
            let Some(&(i, ki, ci)) = att.couplings.first() else { continue };
            let (mut gr, mut gi) = (s.diag_re[i], s.diag_im[i]);
            let (mut hr, mut hi) = (s.rhs_re[i], s.rhs_im[i]);
            let mut den = [0.0; L];
            for l in 0..L {
                let dr = att.stiffness - w2[l] * att.mass;
                let di = w[l] * att.damping;
                den[l] = dr * dr + di * di;
                let bi = w[l] * ci;
                let (qr, qi) = cdiv(ki, bi, dr, di);
                gr[l] -= qr * ki - qi * bi;
                gi[l] -= qr * bi + qi * ki;
                hr[l] += qr * att.mass;
                hi[l] += qi * att.mass;
            }
            if let Some(l) = (0..L).find(|&l| den[l] == 0.0) {
                return Err(Error::SingularAt { omega: w[l] });
            }
            (s.diag_re[i], s.diag_im[i], s.rhs_re[i], s.rhs_im[i]) = (gr, gi, hr, hi);
        }
        for i in 1..n {
            let (ek, ec) = (self.floor_stiffness[(i - 1) * n + i], self.floor_damping[(i - 1) * n + i]);
            let (pdr, pdi, prr, pri) = (s.diag_re[i - 1], s.diag_im[i - 1], s.rhs_re[i - 1], s.rhs_im[i - 1]);
            let (mut gr, mut gi) = (s.diag_re[i], s.diag_im[i]);
            let (mut hr, mut hi) = (s.rhs_re[i], s.rhs_im[i]);
            for l in 0..L {
                let ei = w[l] * ec;
                let (fr, fi) = cdiv(ek, ei, pdr[l], pdi[l]);
                gr[l] -= fr * ek - fi * ei;
                gi[l] -= fr * ei + fi * ek;
                hr[l] -= fr * prr[l] - fi * pri[l];
                hi[l] -= fr * pri[l] + fi * prr[l];
            }
            (s.diag_re[i], s.diag_im[i], s.rhs_re[i], s.rhs_im[i]) = (gr, gi, hr, hi);
        }
        let (mut nr, mut ni) = ([0.0; L], [0.0; L]);
        for i in (0..n).rev() {
            let (ek, ec) = if i + 1 < n { (self.floor_stiffness[i * n + i + 1], self.floor_damping[i * n + i + 1]) } else { (0.0, 0.0) };
            let (gr, gi, hr, hi) = (s.diag_re[i], s.diag_im[i], s.rhs_re[i], s.rhs_im[i]);
            let mut o = [0.0; L];
            for l in 0..L {
                let ei = w[l] * ec;
                let ar = hr[l] - (ek * nr[l] - ei * ni[l]);
                let ai = hi[l] - (ek * ni[l] + ei * nr[l]);
                let (ur, ui) = cdiv(ar, ai, gr[l], gi[l]);
                nr[l] = ur;
                ni[l] = ui;
                let yr = 1.0 - w2[l] * ur;
                let yi = -w2[l] * ui;
                o[l] = (yr * yr + yi * yi).sqrt();
            }
            out[i] = o;
        }
        for l in 0..L {
            if out.iter().any(|o| !o[l].is_finite()) {
                return Err(Error::SingularAt { omega: w[l] });
            }
        }
        Ok(())
    }

    fn sweep_banded(&self, grid: &[f64], magnitudes: &mut [Vec<f64>]) -> Result<()> {
        let mut lanes = Lanes::<LANES>::new(self.n);
        let mut res = vec![[0.0; LANES]; self.n];
        for chunk in grid.chunks(LANES) {
            let w: [f64; LANES] = std::array::from_fn(|l| chunk[l.min(chunk.len() - 1)]);
            self.banded_kernel(&w, &mut lanes, &mut res)?;
            for (curve, r) in magnitudes.iter_mut().zip(&res) {
                curve.extend_from_slice(&r[..chunk.len()]);
            }
        }
        Ok(())
    }
}

/// Gaussian elimination with partial pivoting; overwrites `a` and leaves the
/// solution in `b`.
fn lu_solve_in_place(n: usize, a: &mut [Complex64], b: &mut [Complex64]) -> std::result::Result<(), ()> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x * n + col].norm_sqr().total_cmp(&a[y * n + col].norm_sqr()))
            .unwrap();
        let p = a[pivot * n + col];
        if !(p.norm_sqr() > 0.0) || !p.re.is_finite() || !p.im.is_finite() {
            return Err(());
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let inv_p = a[col * n + col].inv();
        for row in col + 1..n {
            let factor = a[row * n + col] * inv_p;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for k in col + 1..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
            let bc = b[col];
            b[row] -= factor * bc;
        }
    }
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * b[k];
        }
        b[row] = acc / a[row * n + row];
    }
    Ok(())
}

pub fn frf(sys: &AugmentedSystem, grid: &FrequencyGrid) -> Result<FrfCurves> {
    let mut solver = FrfSolver::new(sys)?;
    sweep(&mut solver, grid)
}

fn sweep(solver: &mut FrfSolver, grid: &FrequencyGrid) -> Result<FrfCurves> {
    let n = solver.n;
    let mut magnitudes = vec![Vec::with_capacity(grid.len()); n];
    if solver.banded {
        solver.sweep_banded(grid.values(), &mut magnitudes)?;
        return Ok(FrfCurves { omega_grid: grid.values().to_vec(), magnitudes });
    }
    let mut point = vec![0.0; n];
    for &w in grid.values() {
        solver.solve(w, &mut point)?;
        for (curve, v) in magnitudes.iter_mut().zip(&point) {
            curve.push(*v);
        }
    }
    Ok(FrfCurves { omega_grid: grid.values().to_vec(), magnitudes })
}

fn golden_max(
    solver: &mut FrfSolver,
    floor: usize,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    scratch: &mut [f64],
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut eval = |w: f64, s: &mut FrfSolver| -> Result<f64> {
        s.solve(w, scratch)?;
        Ok(scratch[floor])
    };
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = eval(c, solver)?;
    let mut fd = eval(d, solver)?;
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = eval(c, solver)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = eval(d, solver)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

fn refined_peak(solver: &mut FrfSolver, curves: &FrfCurves, cfg: &FrfConfig) -> Result<FitnessValue> {
    let grid = &curves.omega_grid;
    let last = grid.len() - 1;
    let global = curves.magnitudes.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let mut scratch = vec![0.0; solver.n];
    let mut best = FitnessValue { value: f64::NEG_INFINITY, argmax_floor: 1, argmax_omega: grid[0] };
    for (floor, curve) in curves.magnitudes.iter().enumerate() {
        for k in 0..=last {
            let v = curve[k];
            let is_max = (k == 0 || v >= curve[k - 1]) && (k == last || v >= curve[k + 1]);
            if !is_max || v < cfg.refine_screen * global {
                continue;
            }
            let (mut w, mut peak) = (grid[k], v);
            if last > 0 {
                let (rw, rv) = golden_max(solver, floor, grid[k.saturating_sub(1)], grid[(k + 1).min(last)], cfg.refine_tol, &mut scratch)?;
                if rv > peak {
                    w = rw;
                    peak = rv;
                }
            }
            if peak > best.value {
                best = FitnessValue { value: peak, argmax_floor: floor + 1, argmax_omega: w };
            }
        }
    }
    if !best.value.is_finite() {
        return Err(Error::Numerical("FRF peak is not finite".into()));
    }
    Ok(best)
}

/// Refined worst-case peak for an already assembled system.
pub fn peak(sys: &AugmentedSystem, grid: &FrequencyGrid, cfg: &FrfConfig) -> Result<FitnessValue> {
    let mut solver = FrfSolver::new(sys)?;
    let curves = sweep(&mut solver, grid)?;
    refined_peak(&mut solver, &curves, cfg)
}

pub fn fitness(building: &BuildingModel, design: &TmdDesign, cfg: &FrfConfig) -> Result<FitnessValue> {
    FitnessEvaluator::new(building, cfg.clone())?.evaluate(design)
}

/// Caches the bare building matrices and frequency grid between calls.
#[derive(Clone, Debug)]
pub struct FitnessEvaluator {
    matrices: StructuralMatrices,
    grid: FrequencyGrid,
    cfg: FrfConfig,
}

impl FitnessEvaluator {
    pub fn new(building: &BuildingModel, cfg: FrfConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid_for(building)?;
        Ok(FitnessEvaluator { matrices: building.matrices()?, grid, cfg })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn n_floors(&self) -> usize {
        self.matrices.mass.nrows()
    }

    pub fn evaluate(&self, design: &TmdDesign) -> Result<FitnessValue> {
        let sys = assemble_with(&self.matrices, design)?;
        peak(&sys, &self.grid, &self.cfg)
    }

    pub fn curves(&self, design: &TmdDesign) -> Result<FrfCurves> {
        frf(&assemble_with(&self.matrices, design)?, &self.grid)
    }
}

impl FrfCurves {
    pub fn n_floors(&self) -> usize {
        self.magnitudes.len()
    }

    /// Delimited text with header `omega_rad_s,floor_1_db,...,floor_N_db`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["omega_rad_s".to_string()];
        header.extend((1..=self.n_floors()).map(|i| format!("floor_{i}_db")));
        w.write_record(&header)?;
        for (k, omega) in self.omega_grid.iter().enumerate() {
            let mut row = vec![omega.to_string()];
            row.extend(self.magnitudes.iter().map(|c| (20.0 * c[k].log10()).to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> std::result::Result<Self, String> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers().map_err(|e| e.to_string())?.clone();
        if headers.get(0) != Some("omega_rad_s") {
            return Err("first column must be omega_rad_s".into());
        }
        let n = headers.len() - 1;
        let mut curves = FrfCurves { omega_grid: Vec::new(), magnitudes: vec![Vec::new(); n] };
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| e.to_string()))
                .collect::<std::result::Result<_, _>>()?;
            curves.omega_grid.push(vals[0]);
            for (c, db) in curves.magnitudes.iter_mut().zip(&vals[1..]) {
                c.push(10f64.powf(db / 20.0));
            }
        }
        Ok(curves)
    }
}
