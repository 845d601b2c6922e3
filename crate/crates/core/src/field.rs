//! Field algebra: the truncated Clifford-component field, simulation states,
//! and the Sobolev-type norms built from them.
//!
//! The fermionic partner is represented by `K` real component fields; the
//! only combination any formula needs is the diagonal "body" sum of squares,
//! so the conjugation is never materialized.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{assert_grid_eq, Grid, GridField};

/// Ordered collection of K component fields on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordField {
    components: Vec<GridField>,
}

impl CliffordField {
    pub fn new(components: Vec<GridField>) -> Result<CliffordField> {
        if components.is_empty() {
            return Err(Error::Config(
                "a Clifford field needs at least one component".into(),
            ));
        }
        for c in &components[1..] {
            assert_grid_eq(&components[0], c);
        }
        Ok(CliffordField { components })
    }

    /// K zero components.
    pub fn zeros(grid: &Arc<Grid>, k: usize) -> CliffordField {
        CliffordField {
            components: (0..k.max(1)).map(|_| grid.zeros()).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[GridField] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &GridField {
        &self.components[i]
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.components[0].grid()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(GridField::is_finite)
    }

    pub fn map(&self, f: impl Fn(&GridField) -> GridField) -> CliffordField {
        CliffordField {
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &CliffordField) -> CliffordField {
        assert_eq!(self.k(), other.k(), "component counts differ");
        CliffordField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &CliffordField) -> CliffordField {
        assert_eq!(self.k(), other.k(), "component counts differ");
        CliffordField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> CliffordField {
        self.map(|f| f.scale(c))
    }
}

/// One point on a trajectory: time plus the pair (u, xi).
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u: GridField,
    pub xi: CliffordField,
}

impl SimState {
    pub fn new(t: f64, u: GridField, xi: CliffordField) -> SimState {
        assert_grid_eq(&u, xi.component(0));
        assert!(t.is_finite(), "time must be finite");
        SimState { t, u, xi }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.xi.is_finite()
    }
}

/// Body of xi*conj(xi): the pointwise sum of squared components. Nonnegative.
pub fn body_projection(xi: &CliffordField) -> GridField {
    let mut out = xi.grid().zeros();
    for c in xi.components() {
        out = out.zip_with(c, |acc, v| acc + v * v);
    }
    out
}

/// Sobolev norm of the pair: sqrt(int u^2 + sum phi_i^2 + u'^2 + sum phi_i'^2).
///
/// Derivatives are spectral, the same operator the dynamics uses, so
/// conservation checks stay internally consistent.
pub fn h1_norm(u: &GridField, xi: &CliffordField) -> f64 {
    h1_norm_sq(u, xi).max(0.0).sqrt()
}

/// Squared Sobolev norm; cheaper when norms get combined quadratically.
pub fn h1_norm_sq(u: &GridField, xi: &CliffordField) -> f64 {
    let du = u.derivative(1).expect("finite field");
    let mut total = u.norm_sq() + du.norm_sq();
    for c in xi.components() {
        let dc = c.derivative(1).expect("finite field");
        total += c.norm_sq() + dc.norm_sq();
    }
    total
}

/// L2 norm of the pair (no derivative terms).
pub fn l2_norm(u: &GridField, xi: &CliffordField) -> f64 {
    let mut total = u.norm_sq();
    for c in xi.components() {
        total += c.norm_sq();
    }
    total.max(0.0).sqrt()
}

/// Max pointwise magnitude on the grid.
pub fn sup_abs(u: &GridField) -> f64 {
    u.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}
