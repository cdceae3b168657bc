//! Quarterly time series with explicit missing entries.


use crate::error::Error;
use crate::quarter::{Quarter, QuarterRange};
use crate::scalar::Scalar;

/// A named quarterly series over a gap-free quarter index.
///
/// Index `i` maps to `start + i`. Missing observations are explicit `None`
/// entries, never skipped index positions, so row-dropping downstream is
/// observable and countable.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<F> {
    name: String,
    start: Quarter,
    values: Vec<Option<F>>,
    unit: String,
    in_logs: bool,
}

impl<F: Scalar> Series<F> {
    /// Build a series from a start quarter and a dense value vector.
    pub fn new(name: impl Into<String>, start: Quarter, values: Vec<Option<F>>) -> Self {
        Series {
            name: name.into(),
            start,
            values,
            unit: String::new(),
            in_logs: false,
        }
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit = unit.into();
        self
    }

    /// Mark a freshly built series as already holding natural logs.
    pub fn assume_logs(mut self) -> Self {
        self.in_logs = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn start(&self) -> Quarter {
        self.start
    }

    pub fn end(&self) -> Quarter {
        self.start.add(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn in_logs(&self) -> bool {
        self.in_logs
    }

    /// Number of present (non-missing) observations.
    pub fn present_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Value at a quarter; `None` when missing or outside coverage.
    pub fn value_at(&self, q: Quarter) -> Option<F> {
        let off = self.start.distance(q);
        if off < 0 || off as usize >= self.values.len() {
            return None;
        }
        self.values[off as usize]
    }

    /// Iterate `(quarter, value)` over the dense index.
    pub fn iter(&self) -> impl Iterator<Item = (Quarter, Option<F>)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.start.add(i as i64), *v))
    }

    /// Require a present value at `q`, with a descriptive error otherwise.
    pub fn require_at(&self, q: Quarter) -> Result<F, Error> {
        let off = self.start.distance(q);
        if off < 0 || off as usize >= self.values.len() {
            return Err(Error::OutOfCoverage {
                name: self.name.clone(),
                range: format!("{}..{}", self.start, self.end()),
                quarter: q,
            });
        }
        self.values[off as usize].ok_or_else(|| Error::MissingValue {
            name: self.name.clone(),
            quarter: q,
        })
    }

    /// Present values over a window, in time order; errors on any gap.
    pub fn window_values(&self, window: QuarterRange) -> Result<Vec<F>, Error> {
        window.iter().map(|q| self.require_at(q)).collect()
    }

    /// `s`-quarter differences: the value at `t` is `x_t - x_{t-s}`.
    ///
    /// The result shares the index of the input; the first `s` entries and any
    /// entry with a missing operand are missing.
    pub fn diff(&self, s: usize) -> Result<Series<F>, Error> {
        if s == 0 || s >= self.values.len() {
            return Err(Error::LagExceedsLength {
                s,
                len: self.values.len(),
            });
        }
        let values = (0..self.values.len())
            .map(|i| {
                if i < s {
                    None
                } else {
                    match (self.values[i], self.values[i - s]) {
                        (Some(a), Some(b)) => Some(a - b),
                        _ => None,
                    }
                }
            })
            .collect();
        Ok(Series {
            name: format!("d{}_{}", s, self.name),
            start: self.start,
            values,
            unit: self.unit.clone(),
            in_logs: false,
        })
    }

    /// Natural log, element-wise. The series must not already be in logs and
    /// every present value must be strictly positive.
    pub fn to_logs(&self) -> Result<Series<F>, Error> {
        if self.in_logs {
            return Err(Error::AlreadyLogged {
                name: self.name.clone(),
            });
        }
        let mut values = Vec::with_capacity(self.values.len());
        for (i, v) in self.values.iter().enumerate() {
            match v {
                None => values.push(None),
                Some(x) if *x > F::zero() => values.push(Some(x.ln())),
                Some(x) => {
                    return Err(Error::NonPositive {
                        name: self.name.clone(),
                        quarter: self.start.add(i as i64),
                        value: x.to_f64().unwrap_or(f64::NAN),
                    })
                }
            }
        }
        Ok(Series {
            name: self.name.clone(),
            start: self.start,
            values,
            unit: self.unit.clone(),
            in_logs: true,
        })
    }

    /// Element-wise exp, clearing the log flag.
    pub fn from_logs(&self) -> Series<F> {
        Series {
            name: self.name.clone(),
            start: self.start,
            values: self.values.iter().map(|v| v.map(|x| x.exp())).collect(),
            unit: self.unit.clone(),
            in_logs: false,
        }
    }
}
