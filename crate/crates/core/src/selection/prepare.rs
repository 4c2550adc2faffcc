use crate::data::{
    default_screen_size, normalize, sis_screen, BackTransform, DesignMatrix, GroupStructure,
    ResponseVector,
};
use crate::engine::{ActiveModel, Problem, SplicingConfig};
use crate::error::{Error, Result};
use crate::selection::criterion::{deviance_from_eta, IcValues};
use crate::selection::report::PathEntry;

/// Raw data plus its group structure.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: DesignMatrix,
    pub y: ResponseVector,
    pub groups: GroupStructure,
}

impl Dataset {
    pub fn new(x: DesignMatrix, y: ResponseVector, groups: GroupStructure) -> Result<Self> {
        Problem::new(&x, &y, &groups)?;
        Ok(Dataset { x, y, groups })
    }

    pub fn with_singletons(x: DesignMatrix, y: ResponseVector) -> Result<Self> {
        let groups = GroupStructure::singletons(x.p());
        Self::new(x, y, groups)
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn p(&self) -> usize {
        self.x.p()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Dataset> {
        Ok(Dataset {
            x: self.x.select_rows(rows)?,
            y: self.y.select(rows)?,
            groups: self.groups.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenSize {
    /// `min(p, ceil(n / ln n))`
    Auto,
    Fixed(usize),
}

/// Options shared by every support-size tuning routine.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOptions {
    /// `support_size` is ignored; each routine sets it per candidate.
    pub splicing: SplicingConfig,
    pub normalize: bool,
    pub screen: Option<ScreenSize>,
    /// Worker threads for cross-validation; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        SelectionOptions {
            splicing: SplicingConfig::default(),
            normalize: true,
            screen: None,
            threads: None,
        }
    }
}

/// The working problem: normalized, optionally screened, with the maps back
/// to the caller's coordinates.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub x: DesignMatrix,
    pub y: ResponseVector,
    pub groups: GroupStructure,
    pub back: BackTransform,
    /// Working column -> original column.
    pub columns: Vec<usize>,
    /// Working group -> original group.
    pub group_ids: Vec<usize>,
    pub n: usize,
    /// Column count of the caller's data (before screening).
    pub p: usize,
}

pub(crate) fn prepare(data: &Dataset, opts: &SelectionOptions) -> Result<Prepared> {
    let (x, y, back) = if opts.normalize {
        normalize(&data.x, &data.y)?
    } else {
        (data.x.clone(), data.y.clone(), BackTransform::identity(data.p()))
    };
    let all_groups: Vec<usize> = (0..data.groups.n_groups()).collect();
    let mut prepared = Prepared {
        x,
        y,
        groups: data.groups.clone(),
        back,
        columns: (0..data.p()).collect(),
        group_ids: all_groups,
        n: data.n(),
        p: data.p(),
    };
    if let Some(size) = opts.screen {
        prepared = screen(prepared, size)?;
    }
    Ok(prepared)
}

fn screen(prep: Prepared, size: ScreenSize) -> Result<Prepared> {
    if !prep.groups.is_singleton() {
        return Err(Error::usage("screening requires one group per column"));
    }
    let nuisance_cols: Vec<usize> = prep.groups.nuisance().to_vec();
    let m = match size {
        ScreenSize::Auto => default_screen_size(prep.n, prep.x.p()),
        ScreenSize::Fixed(m) => m,
    };
    let mut keep = sis_screen(&prep.x, &prep.y, m)?;
    keep.extend(nuisance_cols.iter().copied());
    keep.sort_unstable();
    keep.dedup();
    let nuisance_new: Vec<usize> = nuisance_cols
        .iter()
        .map(|c| keep.binary_search(c).expect("nuisance columns are kept"))
        .collect();
    Ok(Prepared {
        x: prep.x.select_columns(&keep),
        y: prep.y,
        groups: GroupStructure::new((0..keep.len()).collect(), nuisance_new)?,
        back: prep.back.select_columns(&keep),
        columns: keep.iter().map(|&j| prep.columns[j]).collect(),
        group_ids: keep.iter().map(|&j| prep.group_ids[j]).collect(),
        n: prep.n,
        p: prep.p,
    })
}

impl Prepared {
    pub fn problem(&self) -> Problem<'_> {
        Problem::new(&self.x, &self.y, &self.groups).expect("prepared data is consistent")
    }

    /// Largest support size the working problem allows.
    pub fn max_support(&self) -> usize {
        self.groups.n_selectable()
    }

    /// Raw-scale `(selected original columns, coefficients, intercept)`.
    pub fn raw_coefficients(&self, model: &ActiveModel) -> (Vec<usize>, Vec<f64>, f64) {
        let (raw, intercept) = self.back.to_raw(&model.beta, model.intercept);
        let mut pairs: Vec<(usize, f64)> = model
            .selected_columns(&self.groups)
            .into_iter()
            .map(|j| (self.columns[j], raw[j]))
            .collect();
        pairs.sort_by_key(|&(j, _)| j);
        let (cols, coefs) = pairs.into_iter().unzip();
        (cols, coefs, intercept)
    }

    pub fn entry(&self, s: usize, model: &ActiveModel, wall_ms: f64) -> PathEntry {
        let (selected, coefficients, intercept) = self.raw_coefficients(model);
        let eta = self.x.linear_predictor(model.intercept, &model.beta);
        let deviance = deviance_from_eta(self.y.family(), self.y.values(), &eta);
        let mut active_groups: Vec<usize> = model
            .selected_groups(&self.groups)
            .into_iter()
            .map(|g| self.group_ids[g])
            .collect();
        active_groups.sort_unstable();
        PathEntry {
            s,
            ic: IcValues::new(deviance, selected.len(), self.n, self.p),
            active_groups,
            selected,
            coefficients,
            intercept,
            deviance,
            cv: None,
            converged: model.converged,
            failure: None,
            wall_ms,
        }
    }
}
