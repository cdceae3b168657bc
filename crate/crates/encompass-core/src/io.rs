//! CSV ingestion and emission.
//!
//! Two file shapes are used throughout:
//!
//! ```text
//! series:    header `date,value`, dates in YYYYQn form, strictly increasing;
//!            quarters absent between the first and last date become explicit
//!            missing entries (no imputation).
//! forecasts: `# form=...` directive line(s), then header
//!            `model,variable,origin,horizon,value`, one row per
//!            (origin, horizon), horizons contiguous from 1.
//! ```
//!
//! Values are written with `Display`, which for floats is the shortest text
//! that parses back to the same bits, so emit -> load -> emit is byte-stable.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::Error;
use crate::panel::{ForecastPanel, PanelForm};
use crate::quarter::Quarter;
use crate::scalar::Scalar;
use crate::series::Series;

fn read_to_string(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_string(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_value<F: Scalar>(text: &str) -> Result<F, Error> {
    text.trim().parse::<F>().map_err(|_| Error::BadNumber {
        text: text.to_string(),
    })
}

/// Load a quarterly series from a `date,value` CSV.
///
/// The given `name` becomes the series name. Quarters missing between the
/// first and last dates become explicit missing entries.
pub fn load_series_csv<F: Scalar>(path: impl AsRef<Path>, name: &str) -> Result<Series<F>, Error> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let contents = read_to_string(path)?;

    let mut rows: Vec<(Quarter, F)> = Vec::new();
    for (lineno, line) in contents.lines().enumerate() {
        let line_num = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed.eq_ignore_ascii_case("date,value") {
            continue;
        }
        let mut fields = trimmed.split(',');
        let (date, value) = match (fields.next(), fields.next(), fields.next()) {
            (Some(d), Some(v), None) => (d.trim(), v),
            _ => {
                return Err(Error::BadRecord {
                    path: display,
                    expected: 2,
                    got: trimmed.split(',').count(),
                })
            }
        };
        let quarter: Quarter = date.parse().map_err(|e: Error| e.at(&display, line_num))?;
        let value: F = parse_value(value).map_err(|e| e.at(&display, line_num))?;
        if let Some((prev, _)) = rows.last() {
            if quarter == *prev {
                return Err(Error::DuplicateQuarter { quarter }.at(&display, line_num));
            }
            if quarter < *prev {
                return Err(Error::OutOfOrder {
                    prev: *prev,
                    next: quarter,
                }
                .at(&display, line_num));
            }
        }
        rows.push((quarter, value));
    }

    if rows.is_empty() {
        return Err(Error::EmptyFile { path: display });
    }

    let start = rows[0].0;
    let len = (start.distance(rows.last().unwrap().0) + 1) as usize;
    let mut values: Vec<Option<F>> = vec![None; len];
    for (quarter, value) in rows {
        values[start.distance(quarter) as usize] = Some(value);
    }
    Ok(Series::new(name, start, values))
}

/// Write a series as a `date,value` CSV; missing entries are skipped.
pub fn save_series_csv<F: Scalar>(path: impl AsRef<Path>, series: &Series<F>) -> Result<(), Error> {
    let mut out = String::from("date,value\n");
    for (quarter, value) in series.iter() {
        if let Some(v) = value {
            out.push_str(&format!("{quarter},{v}\n"));
        }
    }
    write_string(path.as_ref(), &out)
}

/// Directives (`# key=value` lines) found at the top of a forecast CSV.
pub fn read_directives(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>, Error> {
    let contents = read_to_string(path.as_ref())?;
    let mut out = BTreeMap::new();
    for line in contents.lines() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = rest.trim().split_once('=') {
                out.insert(key.trim().to_string(), value.trim().to_string());
            }
        } else if !trimmed.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// Load a forecast panel from its CSV form.
///
/// The file must carry a `# form=...` directive; an optional
/// `# annualized=true` directive marks growth rates as annualized percent.
/// Exactly one (model, variable) pair may appear, horizons per origin must be
/// contiguous from 1, and no (origin, horizon) key may repeat.
pub fn load_forecast_csv<F: Scalar>(path: impl AsRef<Path>) -> Result<ForecastPanel<F>, Error> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let contents = read_to_string(path)?;

    let mut form: Option<PanelForm> = None;
    let mut annualized = false;
    let mut ident: Option<(String, String)> = None;
    let mut raw: BTreeMap<Quarter, BTreeMap<usize, F>> = BTreeMap::new();

    for (lineno, line) in contents.lines().enumerate() {
        let line_num = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = rest.trim().split_once('=') {
                match key.trim() {
                    "form" => form = Some(PanelForm::parse(value.trim()).map_err(|e| e.at(&display, line_num))?),
                    "annualized" => annualized = value.trim() == "true",
                    _ => {} // unknown directives are tolerated
                }
            }
            continue;
        }
        if trimmed.eq_ignore_ascii_case("model,variable,origin,horizon,value") {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::BadRecord {
                path: display,
                expected: 5,
                got: fields.len(),
            });
        }
        let model = fields[0].trim();
        let variable = fields[1].trim();
        match &ident {
            None => ident = Some((model.to_string(), variable.to_string())),
            Some((m, v)) if m == model && v == variable => {}
            Some((m, v)) => {
                return Err(Error::MixedPanel {
                    model_a: m.clone(),
                    variable_a: v.clone(),
                    model_b: model.to_string(),
                    variable_b: variable.to_string(),
                })
            }
        }
        let origin: Quarter = fields[2]
            .trim()
            .parse()
            .map_err(|e: Error| e.at(&display, line_num))?;
        let horizon: usize = fields[3].trim().parse().map_err(|_| {
            Error::BadNumber {
                text: fields[3].to_string(),
            }
            .at(&display, line_num)
        })?;
        if horizon == 0 {
            return Err(Error::HorizonGap { origin, missing: 1 }.at(&display, line_num));
        }
        let value: F = parse_value(fields[4]).map_err(|e| e.at(&display, line_num))?;
        if raw.entry(origin).or_default().insert(horizon, value).is_some() {
            return Err(Error::DuplicateHorizon { origin, horizon }.at(&display, line_num));
        }
    }

    let (model, variable) = ident.ok_or(Error::EmptyFile {
        path: display.clone(),
    })?;
    let form = form.ok_or(Error::MissingFormDirective { path: display })?;

    let mut panel = ForecastPanel::new(model, variable, form).with_annualized(annualized);
    for (origin, by_horizon) in raw {
        let max_h = *by_horizon.keys().next_back().unwrap();
        let mut path_vals = Vec::with_capacity(max_h);
        for h in 1..=max_h {
            match by_horizon.get(&h) {
                Some(v) => path_vals.push(*v),
                None => return Err(Error::HorizonGap { origin, missing: h }),
            }
        }
        panel.insert(origin, path_vals)?;
    }
    Ok(panel)
}

/// Write a forecast panel in its CSV form.
///
/// `extra_directives` lets callers attach machine-checkable metadata (for
/// instance the estimation start of a rolling benchmark); keys are written as
/// `# key=value` lines after the form directive.
pub fn save_forecast_csv<F: Scalar>(
    path: impl AsRef<Path>,
    panel: &ForecastPanel<F>,
    extra_directives: &[(String, String)],
) -> Result<(), Error> {
    let mut out = String::new();
    out.push_str(&format!("# form={}\n", panel.form()));
    if panel.annualized() {
        out.push_str("# annualized=true\n");
    }
    for (key, value) in extra_directives {
        out.push_str(&format!("# {key}={value}\n"));
    }
    out.push_str("model,variable,origin,horizon,value\n");
    for (origin, path_vals) in panel.iter() {
        for (i, v) in path_vals.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                panel.model(),
                panel.variable(),
                origin,
                i + 1,
                v
            ));
        }
    }
    write_string(path.as_ref(), &out)
}
