use crate::error::{Error, Result};

/// Partition of the columns into selection groups.
///
/// Nuisance groups are forced into every model and never counted towards the
/// support size.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStructure {
    group_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    nuisance: Vec<usize>,
}

impl GroupStructure {
    /// One group per column.
    pub fn singletons(p: usize) -> Self {
        GroupStructure {
            group_of: (0..p).collect(),
            members: (0..p).map(|j| vec![j]).collect(),
            nuisance: Vec::new(),
        }
    }

    pub fn new(group_of: Vec<usize>, nuisance: Vec<usize>) -> Result<Self> {
        let g = group_of.iter().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); g];
        for (j, &id) in group_of.iter().enumerate() {
            members[id].push(j);
        }
        if let Some(id) = members.iter().position(Vec::is_empty) {
            return Err(Error::data(format!("group id {id} is not used by any column")));
        }
        let mut nuisance = nuisance;
        nuisance.sort_unstable();
        nuisance.dedup();
        if let Some(&bad) = nuisance.iter().find(|&&id| id >= g) {
            return Err(Error::usage(format!("nuisance group {bad} does not exist (G = {g})")));
        }
        Ok(GroupStructure {
            group_of,
            members,
            nuisance,
        })
    }

    /// Marks the groups containing the given columns as nuisance groups.
    pub fn with_always_included(self, columns: &[usize]) -> Result<Self> {
        let mut nuisance = self.nuisance.clone();
        for &j in columns {
            let id = *self.group_of.get(j).ok_or_else(|| {
                Error::usage(format!("always-include column {j} out of range (p = {})", self.p()))
            })?;
            nuisance.push(id);
        }
        GroupStructure::new(self.group_of, nuisance)
    }

    pub fn p(&self) -> usize {
        self.group_of.len()
    }

    pub fn n_groups(&self) -> usize {
        self.members.len()
    }

    pub fn group_of(&self) -> &[usize] {
        &self.group_of
    }

    pub fn members(&self, group: usize) -> &[usize] {
        &self.members[group]
    }

    pub fn nuisance(&self) -> &[usize] {
        &self.nuisance
    }

    pub fn is_nuisance(&self, group: usize) -> bool {
        self.nuisance.binary_search(&group).is_ok()
    }

    /// Number of groups available for selection.
    pub fn n_selectable(&self) -> usize {
        self.n_groups() - self.nuisance.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == self.group_of.len()
    }

    /// Columns of the given groups, in group order.
    pub fn columns_of(&self, groups: &[usize]) -> Vec<usize> {
        groups.iter().flat_map(|&g| self.members[g].iter().copied()).collect()
    }
}
