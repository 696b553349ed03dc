//! Lumped-mass shear building: mass, stiffness and proportional damping
//! matrices, plus undamped modal data.
//!
//! Floor `i` (1-based) carries mass `m_i` and is connected to floor `i - 1`
//! (or the ground for `i = 1`) by the inter-storey stiffness `k_i`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which pair of undamped modes anchors the two-frequency proportional
/// damping law `C = a M + b K`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DampingAnchors {
    /// The two highest modes `(ω_{N-1}, ω_N)`. Reproduces the published
    /// four-storey modal damping (0.020, 0.011, 0.010, 0.010).
    #[default]
    HighestPair,
    /// The two lowest modes `(ω_1, ω_2)`.
    LowestPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildingModel {
    pub masses: Vec<f64>,
    pub stiffnesses: Vec<f64>,
    pub xi_s: f64,
    #[serde(default)]
    pub damping_anchors: DampingAnchors,
    /// Row-major `N x N` damping matrix replacing the proportional law.
    /// Required for single-storey models with `xi_s > 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit_damping: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuralMatrices {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    /// `(a, b)` of `C = a M + b K` when the damping is proportional.
    pub rayleigh: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModalData {
    /// Undamped natural frequencies in rad/s, ascending.
    pub natural_frequencies: Vec<f64>,
    pub damping_ratios: Vec<f64>,
}

impl BuildingModel {
    pub fn new(masses: Vec<f64>, stiffnesses: Vec<f64>, xi_s: f64) -> Result<Self> {
        let model = BuildingModel {
            masses,
            stiffnesses,
            xi_s,
            damping_anchors: DampingAnchors::default(),
            explicit_damping: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_anchors(mut self, anchors: DampingAnchors) -> Self {
        self.damping_anchors = anchors;
        self
    }

    pub fn with_explicit_damping(mut self, damping: Vec<f64>) -> Result<Self> {
        self.explicit_damping = Some(damping);
        self.validate()?;
        Ok(self)
    }

    pub fn n_floors(&self) -> usize {
        self.masses.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.masses.len();
        if n == 0 {
            return Err(Error::InvalidModel("building needs at least one floor".into()));
        }
        if self.stiffnesses.len() != n {
            return Err(Error::InvalidModel(format!(
                "{} masses but {} stiffnesses",
                n,
                self.stiffnesses.len()
            )));
        }
        if let Some((i, m)) = self.masses.iter().enumerate().find(|(_, m)| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidModel(format!("mass of floor {} must be positive, got {m}", i + 1)));
        }
        if let Some((i, k)) = self.stiffnesses.iter().enumerate().find(|(_, k)| !(**k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidModel(format!("stiffness of storey {} must be positive, got {k}", i + 1)));
        }
        if !(0.0..1.0).contains(&self.xi_s) {
            return Err(Error::InvalidModel(format!("xi_s must lie in [0, 1), got {}", self.xi_s)));
        }
        match &self.explicit_damping {
            Some(c) if c.len() != n * n => {
                return Err(Error::InvalidModel(format!("explicit damping needs {} entries, got {}", n * n, c.len())))
            }
            Some(c) => {
                let c = DMatrix::from_row_slice(n, n, c);
                if (&c - c.transpose()).abs().max() > 1e-12 * c.abs().max().max(1.0) {
                    return Err(Error::InvalidModel("explicit damping matrix is not symmetric".into()));
                }
            }
            None if n < 2 && self.xi_s > 0.0 => {
                return Err(Error::InvalidModel(
                    "two-frequency proportional damping needs at least two floors; supply explicit_damping".into(),
                ))
            }
            None => {}
        }
        Ok(())
    }
}

fn stiffness_matrix(k: &[f64]) -> DMatrix<f64> {
    let n = k.len();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] += k[i];
        if i + 1 < n {
            out[(i, i)] += k[i + 1];
            out[(i, i + 1)] = -k[i + 1];
            out[(i + 1, i)] = -k[i + 1];
        }
    }
    out
}

/// Ascending undamped frequencies and mass-normalised mode shapes (columns)
/// of `K φ = ω² M φ` for diagonal `M`.
pub(crate) fn undamped_modes(mass_diag: &[f64], stiffness: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = mass_diag.len();
    let inv_sqrt = DVector::from_iterator(n, mass_diag.iter().map(|m| 1.0 / m.sqrt()));
    let mut a = stiffness.clone();
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigen-solve did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let mut freqs = Vec::with_capacity(n);
    let mut shapes = DMatrix::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[idx];
        if !(lambda > 0.0) {
            return Err(Error::Numerical(format!("non-positive eigenvalue {lambda}")));
        }
        freqs.push(lambda.sqrt());
        for row in 0..n {
            shapes[(row, col)] = eig.eigenvectors[(row, idx)] * inv_sqrt[row];
        }
    }
    Ok((freqs, shapes))
}

pub fn build_matrices(model: &BuildingModel) -> Result<StructuralMatrices> {
    model.validate()?;
    let n = model.n_floors();
    let mass = DMatrix::from_diagonal(&DVector::from_column_slice(&model.masses));
    let stiffness = stiffness_matrix(&model.stiffnesses);
    if stiffness.clone().cholesky().is_none() {
        return Err(Error::Numerical("stiffness matrix is not positive definite".into()));
    }

    let (damping, rayleigh) = if let Some(c) = &model.explicit_damping {
        (DMatrix::from_row_slice(n, n, c), None)
    } else if model.xi_s == 0.0 {
        (DMatrix::zeros(n, n), Some((0.0, 0.0)))
    } else {
        let (w, _) = undamped_modes(&model.masses, &stiffness)?;
        let (w1, w2) = match model.damping_anchors {
            DampingAnchors::HighestPair => (w[n - 2], w[n - 1]),
            DampingAnchors::LowestPair => (w[0], w[1]),
        };
        let a = 2.0 * model.xi_s * w1 * w2 / (w1 + w2);
        let b = 2.0 * model.xi_s / (w1 + w2);
        (&mass * a + &stiffness * b, Some((a, b)))
    };

    Ok(StructuralMatrices { mass, stiffness, damping, rayleigh })
}

pub fn modal_analysis(mats: &StructuralMatrices) -> Result<ModalData> {
    let mass_diag: Vec<f64> = mats.mass.diagonal().iter().copied().collect();
    let (freqs, shapes) = undamped_modes(&mass_diag, &mats.stiffness)?;
    let damping_ratios = match mats.rayleigh {
        Some((a, b)) => freqs.iter().map(|w| a / (2.0 * w) + b * w / 2.0).collect(),
        None => {
            // Diagonal of the modal damping matrix; exact only when C is
            // diagonalised by the undamped modes.
            let modal = shapes.transpose() * &mats.damping * &shapes;
            freqs.iter().enumerate().map(|(i, w)| modal[(i, i)] / (2.0 * w)).collect()
        }
    };
    Ok(ModalData { natural_frequencies: freqs, damping_ratios })
}

impl BuildingModel {
    pub fn matrices(&self) -> Result<StructuralMatrices> {
        build_matrices(self)
    }

    pub fn modal(&self) -> Result<ModalData> {
        modal_analysis(&build_matrices(self)?)
    }
}
