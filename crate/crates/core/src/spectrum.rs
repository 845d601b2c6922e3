//! The linearization operator `H = -d^2/dx^2 - phi/2` around the soliton:
//! dense discretization, eigenpairs, Rayleigh-quotient checks, and the
//! ground-mode projection.
//!
//! On the line the operator has exactly two eigenvalues, `-C` and `-C/4`,
//! with eigenfunctions proportional to `sech^2(z)` and `sinh(z)/cosh^2(z)`
//! (`z = sqrt(C) x / 2`), and continuous spectrum `[0, inf)`. On the
//! periodic box the continuum turns into near-zero box modes. The Laplacian
//! block is the same periodic spectral operator the dynamics uses, realized
//! as an exactly symmetric circulant matrix, so operator and time stepping
//! share one calculus.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::CliffordField;
use crate::grid::{Grid, GridField};
use crate::soliton::{soliton_profile, SolitonParams};

/// Dense symmetric discretization of `-d^2/dx^2 - phi_C/2` (soliton sampled
/// at t = 0 in its rest frame).
pub struct SchrodingerOperator {
    c: f64,
    grid: Arc<Grid>,
    matrix: DMatrix<f64>,
}

impl SchrodingerOperator {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// H applied to a sampled field.
    pub fn apply(&self, f: &GridField) -> GridField {
        let v = DVector::from_column_slice(f.values());
        let out = &self.matrix * v;
        self.grid.field_from_values(out.as_slice().to_vec())
    }
}

/// Builds the dense operator: circulant spectral Laplacian plus the diagonal
/// potential -phi/2.
pub fn build_operator(c: f64, grid: &Arc<Grid>) -> Result<SchrodingerOperator> {
    let params = SolitonParams::new(c)?;
    let phi = soliton_profile(&params, 0.0, grid).field;
    let n = grid.n();

    // first column of -d^2/dx^2: inverse transform of the k^2 multipliers
    let multipliers: Vec<Complex64> = (0..n)
        .map(|j| {
            let k = grid.wavenumber(j);
            Complex64::new(k * k, 0.0)
        })
        .collect();
    let lap_col = grid.ifft_real(&multipliers);

    let mut matrix = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // circulant in (i - j); lap_col is even, so this is symmetric
            matrix[(i, j)] = lap_col[(i + n - j) % n];
        }
        matrix[(i, i)] -= 0.5 * phi.values()[i];
    }
    Ok(SchrodingerOperator {
        c,
        grid: Arc::clone(grid),
        matrix,
    })
}

/// Lowest eigenpairs, ascending; eigenfunctions unit-normalized in the
/// dx-weighted L2 inner product and pairwise orthogonal.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    pub c: f64,
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenfunctions: Vec<GridField>,
}

impl SpectrumResult {
    pub fn ground(&self) -> &GridField {
        &self.eigenfunctions[0]
    }
}

/// Dense symmetric eigensolve; returns the `k` lowest pairs.
pub fn eigen_pairs(op: &SchrodingerOperator, k: usize) -> Result<SpectrumResult> {
    let n = op.grid.n();
    if k < 2 {
        return Err(Error::Config(format!("eigen_pairs needs k >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Config(format!(
            "cannot extract {k} eigenpairs from an n = {n} grid"
        )));
    }
    let decomp = SymmetricEigen::new(op.matrix.clone());
    if !decomp.eigenvalues.iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric(
            "eigensolver returned non-finite values".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        decomp.eigenvalues[a]
            .partial_cmp(&decomp.eigenvalues[b])
            .expect("finite eigenvalues")
    });

    let dx = op.grid.dx();
    let center = n / 2; // x = 0, the potential minimum
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenfunctions = Vec::with_capacity(k);
    for (rank, &idx) in order.iter().take(k).enumerate() {
        eigenvalues.push(decomp.eigenvalues[idx]);
        let col = decomp.eigenvectors.column(idx);
        let norm = col.norm() * dx.sqrt();
        let mut values: Vec<f64> = col.iter().map(|&v| v / norm).collect();
        let flip = if rank == 0 {
            values[center] < 0.0
        } else {
            // deterministic sign: largest-magnitude entry positive
            let mut extreme = 0.0_f64;
            for &v in &values {
                if v.abs() > extreme.abs() {
                    extreme = v;
                }
            }
            extreme < 0.0
        };
        if flip {
            for v in values.iter_mut() {
                *v = -*v;
            }
        }
        eigenfunctions.push(op.grid.field_from_values(values));
    }
    Ok(SpectrumResult {
        c: op.c,
        eigenvalues,
        eigenfunctions,
    })
}

/// The closed-form ground state `sech^2(sqrt(C) x / 2)`, sampled and
/// L2-normalized. Agrees with the discrete ground eigenvector to the
/// eigensolver's accuracy, at none of its cost.
pub fn analytic_ground_state(c: f64, grid: &Arc<Grid>) -> GridField {
    let half_sqrt_c = 0.5 * c.sqrt();
    let raw = grid.field_from_fn(|x| 1.0 / (half_sqrt_c * x).cosh().powi(2));
    let norm = raw.norm_sq().sqrt();
    raw.scale(1.0 / norm)
}

/// Rayleigh quotient <f, Hf> / <f, f> in the L2 inner product.
///
/// The Clifford conjugation signs of the pair <-xi, H xi> / <-xi, xi> cancel
/// for real components, leaving the plain real quotient.
pub fn rayleigh(f: &GridField, op: &SchrodingerOperator) -> Result<f64> {
    let denom = f.norm_sq();
    if denom == 0.0 {
        return Err(Error::Config("Rayleigh quotient of the zero field".into()));
    }
    Ok(f.inner(&op.apply(f)) / denom)
}

/// Removes the ground-mode content of each component:
/// `phi_i -> phi_i - <phi_i, psi_1> psi_1`. Returns the projected field and
/// the per-component coefficients F_1.
pub fn project_out_ground(
    xi: &CliffordField,
    spectrum: &SpectrumResult,
) -> (CliffordField, Vec<f64>) {
    let psi1 = spectrum.ground();
    let coefficients: Vec<f64> = xi
        .components()
        .iter()
        .map(|comp| comp.inner(psi1))
        .collect();
    let projected = CliffordField::new(
        xi.components()
            .iter()
            .zip(&coefficients)
            .map(|(comp, &f1)| comp.sub(&psi1.scale(f1)))
            .collect(),
    )
    .expect("component count preserved");
    (projected, coefficients)
}
