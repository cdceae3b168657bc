//! Forecast panels: per-origin multi-horizon forecast paths.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::quarter::Quarter;
use crate::scalar::Scalar;

/// The space a panel's values live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelForm {
    /// Quarterly percentage changes (not annualized unless the panel's
    /// `annualized` flag is set).
    GrowthPct,
    /// Levels of the underlying variable.
    Level,
    /// Natural logs of levels.
    LogLevel,
}

impl PanelForm {
    pub fn parse(text: &str) -> Result<Self, Error> {
        match text {
            "growth_pct" => Ok(PanelForm::GrowthPct),
            "level" => Ok(PanelForm::Level),
            "log_level" => Ok(PanelForm::LogLevel),
            other => Err(Error::UnknownForm {
                text: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for PanelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PanelForm::GrowthPct => "growth_pct",
            PanelForm::Level => "level",
            PanelForm::LogLevel => "log_level",
        };
        f.write_str(s)
    }
}

/// Forecast paths for one (model, variable) pair, keyed by origin quarter.
///
/// A path entry at index `h-1` is the forecast for `origin + h`; horizons are
/// contiguous from 1, so a path of length `H` covers horizons `1..=H`. The
/// forecast for a given origin is understood to have been made with
/// information through that origin quarter only.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastPanel<F> {
    model: String,
    variable: String,
    form: PanelForm,
    annualized: bool,
    entries: BTreeMap<Quarter, Vec<F>>,
}

impl<F: Scalar> ForecastPanel<F> {
    pub fn new(model: impl Into<String>, variable: impl Into<String>, form: PanelForm) -> Self {
        ForecastPanel {
            model: model.into(),
            variable: variable.into(),
            form,
            annualized: false,
            entries: BTreeMap::new(),
        }
    }

    pub fn with_annualized(mut self, annualized: bool) -> Self {
        self.annualized = annualized;
        self
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn form(&self) -> PanelForm {
        self.form
    }

    /// Growth rates are annualized percent rather than quarterly percent.
    pub fn annualized(&self) -> bool {
        self.annualized
    }

    /// Insert a forecast path for an origin. The path must be nonempty.
    pub fn insert(&mut self, origin: Quarter, path: Vec<F>) -> Result<(), Error> {
        if path.is_empty() {
            return Err(Error::HorizonGap { origin, missing: 1 });
        }
        if self.entries.contains_key(&origin) {
            return Err(Error::DuplicateQuarter { quarter: origin });
        }
        self.entries.insert(origin, path);
        Ok(())
    }

    pub fn origins(&self) -> impl Iterator<Item = Quarter> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn path(&self, origin: Quarter) -> Option<&[F]> {
        self.entries.get(&origin).map(|p| p.as_slice())
    }

    /// Forecast for `origin + horizon`; `None` when the origin is absent or
    /// the path is shorter than `horizon`.
    pub fn value_at(&self, origin: Quarter, horizon: usize) -> Option<F> {
        if horizon == 0 {
            return None;
        }
        self.entries
            .get(&origin)
            .and_then(|p| p.get(horizon - 1))
            .copied()
    }

    /// Longest horizon available across origins (0 for an empty panel).
    pub fn max_horizon(&self) -> usize {
        self.entries.values().map(|p| p.len()).max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Quarter, &[F])> + '_ {
        self.entries.iter().map(|(q, p)| (*q, p.as_slice()))
    }

    /// Apply a value transform, producing a panel in a new form.
    pub(crate) fn map_values(
        &self,
        form: PanelForm,
        mut f: impl FnMut(Quarter, usize, F) -> Result<F, Error>,
    ) -> Result<ForecastPanel<F>, Error> {
        let mut entries = BTreeMap::new();
        for (origin, path) in &self.entries {
            let mapped: Result<Vec<F>, Error> = path
                .iter()
                .enumerate()
                .map(|(i, v)| f(*origin, i + 1, *v))
                .collect();
            entries.insert(*origin, mapped?);
        }
        Ok(ForecastPanel {
            model: self.model.clone(),
            variable: self.variable.clone(),
            form,
            annualized: false,
            entries,
        })
    }
}
