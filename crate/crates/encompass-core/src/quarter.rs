//! Calendar quarters and quarter ranges.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A calendar quarter, e.g. `1954Q1`.
///
/// Quarters form a total order and support integer arithmetic: the successor
/// of `1974Q4` is `1975Q1`, and the distance between two quarters is a signed
/// count of quarters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quarter {
    index: i64, // year * 4 + (q - 1)
}

impl Quarter {
    /// Build a quarter from a Gregorian year and a quarter number in `1..=4`.
    pub fn new(year: i32, q: u8) -> Result<Self, Error> {
        if !(1..=4).contains(&q) {
            return Err(Error::MalformedDate {
                text: format!("{year}Q{q}"),
            });
        }
        Ok(Quarter {
            index: year as i64 * 4 + (q as i64 - 1),
        })
    }

    pub fn year(&self) -> i32 {
        self.index.div_euclid(4) as i32
    }

    pub fn quarter(&self) -> u8 {
        self.index.rem_euclid(4) as u8 + 1
    }

    /// The quarter `n` steps away (negative `n` steps back).
    pub fn add(&self, n: i64) -> Quarter {
        Quarter {
            index: self.index + n,
        }
    }

    /// Next quarter.
    pub fn succ(&self) -> Quarter {
        self.add(1)
    }

    /// Signed number of quarters from `self` to `other`.
    pub fn distance(&self, other: Quarter) -> i64 {
        other.index - self.index
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year(), self.quarter())
    }
}

impl FromStr for Quarter {
    type Err = Error;

    /// Parse the `YYYYQn` form, e.g. `1954Q1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || Error::MalformedDate { text: s.to_string() };
        let (year_part, q_part) = s.split_once(['Q', 'q']).ok_or_else(malformed)?;
        let year: i32 = year_part.parse().map_err(|_| malformed())?;
        let q: u8 = q_part.parse().map_err(|_| malformed())?;
        Quarter::new(year, q).map_err(|_| malformed())
    }
}

/// Inclusive range of quarters `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuarterRange {
    pub start: Quarter,
    pub end: Quarter,
}

impl QuarterRange {
    pub fn new(start: Quarter, end: Quarter) -> Result<Self, Error> {
        if start > end {
            return Err(Error::EmptyRange { start, end });
        }
        Ok(QuarterRange { start, end })
    }

    /// Number of quarters in the range.
    pub fn len(&self) -> usize {
        (self.start.distance(self.end) + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // constructor rejects start > end
    }

    pub fn contains(&self, q: Quarter) -> bool {
        self.start <= q && q <= self.end
    }

    pub fn iter(&self) -> impl Iterator<Item = Quarter> + '_ {
        let start = self.start;
        (0..self.len() as i64).map(move |i| start.add(i))
    }
}

impl fmt::Display for QuarterRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}
