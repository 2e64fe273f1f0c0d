use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

/// Weeks between the start of the long-term window and the activation time.
pub const YEAR_WEEKS: i64 = 52;
/// Weeks between the end of the long-term window and the activation time
/// when the gap is enabled.
pub const LONG_END_WEEKS: i64 = 5;
/// Length of the short-term window in weeks.
pub const SHORT_WEEKS: i64 = 1;

/// A closed date interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Interval {
    /// Mondays `m` with `start <= m < end`, i.e. the ISO weeks starting
    /// inside the interval.
    pub fn week_starts(&self) -> Vec<NaiveDate> {
        let offset = self.start.weekday().num_days_from_monday();
        let mut monday = if offset == 0 {
            self.start
        } else {
            self.start + Duration::days(7 - i64::from(offset))
        };
        let mut out = Vec::new();
        while monday < self.end {
            out.push(monday);
            monday += Duration::weeks(1);
        }
        out
    }
}

/// Long- and short-term observation windows around an activation time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalWindows {
    pub t_a: NaiveDate,
    pub t_0: NaiveDate,
    pub long_term: Interval,
    pub short_term: Interval,
    pub gap_enabled: bool,
}

/// Splits the year before `t_a` into the long- and short-term windows. With
/// the gap disabled the long-term window runs up to the short-term one.
pub fn split_windows(t_a: NaiveDate, gap_enabled: bool) -> TemporalWindows {
    let t_0 = t_a - Duration::weeks(YEAR_WEEKS);
    let short_start = t_a - Duration::weeks(SHORT_WEEKS);
    let long_end = if gap_enabled {
        t_a - Duration::weeks(LONG_END_WEEKS)
    } else {
        short_start
    };
    TemporalWindows {
        t_a,
        t_0,
        long_term: Interval {
            start: t_0,
            end: long_end,
        },
        short_term: Interval {
            start: short_start,
            end: t_a,
        },
        gap_enabled,
    }
}
