use crate::data::{DesignMatrix, GroupStructure, ResponseVector};
use crate::engine::Family;
use crate::error::{Error, Result};

/// Immutable inputs shared by every solve on one dataset.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub x: &'a DesignMatrix,
    pub y: &'a [f64],
    pub family: Family,
    pub groups: &'a GroupStructure,
}

impl<'a> Problem<'a> {
    pub fn new(x: &'a DesignMatrix, y: &'a ResponseVector, groups: &'a GroupStructure) -> Result<Self> {
        Self::from_parts(x, y.values(), y.family(), groups)
    }

    pub fn from_parts(
        x: &'a DesignMatrix,
        y: &'a [f64],
        family: Family,
        groups: &'a GroupStructure,
    ) -> Result<Self> {
        if y.len() != x.n() {
            return Err(Error::data(format!(
                "response has {} values but the matrix has {} rows",
                y.len(),
                x.n()
            )));
        }
        if groups.p() != x.p() {
            return Err(Error::data(format!(
                "group structure covers {} columns but the matrix has {}",
                groups.p(),
                x.p()
            )));
        }
        Ok(Problem { x, y, family, groups })
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn p(&self) -> usize {
        self.x.p()
    }
}

/// A fitted model restricted to an active set of groups.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveModel {
    /// Ascending group ids, nuisance groups included.
    pub active: Vec<usize>,
    /// Length-p coefficients; exactly zero outside the active groups.
    pub beta: Vec<f64>,
    pub intercept: f64,
    /// Penalized loss at `(intercept, beta)`.
    pub loss: f64,
    /// `(1/n) X^T (y - mu)`: minus the gradient of the unpenalized loss.
    pub grad: Vec<f64>,
    /// Hessian weights at the fit.
    pub weights: Vec<f64>,
    pub converged: bool,
    /// Loss of every accepted state of a splicing run, initial state first.
    pub trace: Vec<f64>,
}

impl ActiveModel {
    pub fn is_active(&self, group: usize) -> bool {
        self.active.binary_search(&group).is_ok()
    }

    /// Active groups that count towards the support size.
    pub fn selected_groups(&self, groups: &GroupStructure) -> Vec<usize> {
        self.active.iter().copied().filter(|&g| !groups.is_nuisance(g)).collect()
    }

    /// Columns of the active groups, ascending.
    pub fn selected_columns(&self, groups: &GroupStructure) -> Vec<usize> {
        let mut cols = groups.columns_of(&self.active);
        cols.sort_unstable();
        cols
    }

    pub fn splices(&self) -> usize {
        self.trace.len().saturating_sub(1)
    }
}
