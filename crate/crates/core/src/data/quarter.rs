use alloc::format;
use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A calendar date, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: i32,
    month: u8,
    day: u8,
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        _ => 28,
    }
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Result<Self> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return Err(Error::InvalidDate(format!("{year:04}-{month:02}-{day:02}")));
        }
        Ok(Date { year, month, day })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u8 {
        self.month
    }

    pub fn day(&self) -> u8 {
        self.day
    }

    pub fn quarter(&self) -> Quarter {
        Quarter {
            year: self.year,
            index: (self.month - 1) / 3 + 1,
        }
    }
}

impl FromStr for Date {
    type Err = Error;

    /// Parses ISO `yyyy-mm-dd`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDate(s.to_string());
        let s = s.trim();
        let mut parts = s.splitn(3, '-');
        let (y, m, d) = match (parts.next(), parts.next(), parts.next()) {
            (Some(y), Some(m), Some(d)) => (y, m, d),
            _ => return Err(bad()),
        };
        if y.len() != 4 || m.len() != 2 || d.len() != 2 {
            return Err(bad());
        }
        let year = y.parse::<i32>().map_err(|_| bad())?;
        let month = m.parse::<u8>().map_err(|_| bad())?;
        let day = d.parse::<u8>().map_err(|_| bad())?;
        Date::new(year, month, day).map_err(|_| bad())
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// A calendar quarter. Ordered by year, then quarter index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Quarter {
    year: i32,
    index: u8,
}

impl Quarter {
    pub fn new(year: i32, index: u8) -> Result<Self> {
        if !(1..=4).contains(&index) {
            return Err(Error::InvalidQuarter(format!("{year}-Q{index}")));
        }
        Ok(Quarter { year, index })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    /// 1..=4
    pub fn index(&self) -> u8 {
        self.index
    }

    /// Consecutive integer numbering: adjacent quarters differ by exactly one.
    pub fn ordinal(&self) -> i64 {
        self.year as i64 * 4 + (self.index as i64 - 1)
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        Quarter {
            year: ordinal.div_euclid(4) as i32,
            index: ordinal.rem_euclid(4) as u8 + 1,
        }
    }

    pub fn offset(&self, quarters: i64) -> Self {
        Self::from_ordinal(self.ordinal() + quarters)
    }

    pub fn next(&self) -> Self {
        self.offset(1)
    }

    pub fn last_day(&self) -> Date {
        let month = self.index * 3;
        Date {
            year: self.year,
            month,
            day: days_in_month(self.year, month),
        }
    }

    /// Number of quarters from `self` to `other`, inclusive of both ends.
    pub fn span_to(&self, other: Quarter) -> i64 {
        other.ordinal() - self.ordinal() + 1
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-Q{}", self.year, self.index)
    }
}

impl FromStr for Quarter {
    type Err = Error;

    /// Parses `YYYY-Qn` (also accepts `YYYYQn`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidQuarter(s.to_string());
        let t = s.trim();
        let upper = t.to_ascii_uppercase();
        let (y, q) = upper.split_once('Q').ok_or_else(bad)?;
        let y = y.strip_suffix('-').unwrap_or(y);
        let year = y.parse::<i32>().map_err(|_| bad())?;
        let index = q.parse::<u8>().map_err(|_| bad())?;
        Quarter::new(year, index).map_err(|_| bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_quarters_back_is_three_years() {
        let q = Quarter::new(2020, 3).unwrap();
        let back = q.offset(-12);
        assert_eq!(back, Quarter::new(2017, 3).unwrap());
    }

    #[test]
    fn ordering_is_year_then_index() {
        let a = Quarter::new(2019, 4).unwrap();
        let b = Quarter::new(2020, 1).unwrap();
        assert!(a < b);
        assert_eq!(a.next(), b);
    }

    #[test]
    fn negative_years_round_trip_through_ordinal() {
        let q = Quarter::new(-1, 2).unwrap();
        assert_eq!(Quarter::from_ordinal(q.ordinal()), q);
    }

    #[test]
    fn last_day_handles_leap_february_quarters() {
        assert_eq!(Quarter::new(2020, 1).unwrap().last_day(), Date::new(2020, 3, 31).unwrap());
        assert_eq!(Quarter::new(2020, 2).unwrap().last_day(), Date::new(2020, 6, 30).unwrap());
    }

    #[test]
    fn date_parsing_rejects_month_thirteen() {
        assert!("2020-13-01".parse::<Date>().is_err());
        assert!("2021-02-29".parse::<Date>().is_err());
        assert!("2020-02-29".parse::<Date>().is_ok());
    }

    #[test]
    fn quarter_parsing() {
        assert_eq!("2002-Q2".parse::<Quarter>().unwrap(), Quarter::new(2002, 2).unwrap());
        assert_eq!("2002q2".parse::<Quarter>().unwrap(), Quarter::new(2002, 2).unwrap());
        assert!("2002-Q5".parse::<Quarter>().is_err());
    }
}
