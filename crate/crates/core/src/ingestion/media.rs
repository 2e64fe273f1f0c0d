use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::windows::{Interval, TemporalWindows};
use crate::error::{Error, Result};

/// Weekly share of news on each theme per area, keyed by the Monday of the
/// ISO week.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MediaSeries {
    areas: BTreeMap<String, BTreeMap<NaiveDate, [f64; 3]>>,
    median: BTreeMap<NaiveDate, [f64; 3]>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

impl MediaSeries {
    /// Builds a series from `(area, week_monday, theme_index, attention)`
    /// entries. Every area must have all three themes for every week between
    /// its first and last week.
    pub fn from_entries(entries: impl IntoIterator<Item = (String, NaiveDate, usize, f64)>) -> Result<Self> {
        let mut partial: BTreeMap<String, BTreeMap<NaiveDate, [Option<f64>; 3]>> = BTreeMap::new();
        for (area, week, theme, attention) in entries {
            if theme >= 3 {
                return Err(Error::invalid("media theme", format!("index {theme} out of range")));
            }
            if !(0.0..=1.0).contains(&attention) {
                return Err(Error::invalid(
                    "media attention",
                    format!("{area} {week}: {attention} is not a fraction in [0, 1]"),
                ));
            }
            let slot = &mut partial.entry(area.clone()).or_default().entry(week).or_insert([None; 3])[theme];
            if slot.is_some() {
                return Err(Error::invalid("media series", format!("duplicate entry for {area} {week} theme {theme}")));
            }
            *slot = Some(attention);
        }
        let mut areas = BTreeMap::new();
        for (area, weeks) in partial {
            let mut full = BTreeMap::new();
            let mut prev: Option<NaiveDate> = None;
            for (week, vals) in weeks {
                if let Some(p) = prev {
                    if week - p != chrono::Duration::weeks(1) {
                        return Err(Error::invalid(
                            "media series",
                            format!("weeks of area {area} are not contiguous between {p} and {week}"),
                        ));
                    }
                }
                prev = Some(week);
                let v = [vals[0], vals[1], vals[2]];
                let [Some(a), Some(b), Some(c)] = v else {
                    return Err(Error::invalid("media series", format!("area {area} week {week} lacks a theme")));
                };
                full.insert(week, [a, b, c]);
            }
            areas.insert(area, full);
        }
        let mut weeks: BTreeMap<NaiveDate, [Vec<f64>; 3]> = BTreeMap::new();
        for series in areas.values() {
            for (&week, vals) in series {
                let e = weeks.entry(week).or_default();
                for t in 0..3 {
                    e[t].push(vals[t]);
                }
            }
        }
        let median = weeks
            .into_iter()
            .map(|(w, mut v)| (w, [median(&mut v[0]), median(&mut v[1]), median(&mut v[2])]))
            .collect();
        Ok(Self { areas, median })
    }

    pub fn has_area(&self, area: &str) -> bool {
        self.areas.contains_key(area)
    }

    pub fn areas(&self) -> impl Iterator<Item = &str> {
        self.areas.keys().map(String::as_str)
    }

    /// Cross-area median attention of one week.
    pub fn median_week(&self, week: NaiveDate) -> Option<[f64; 3]> {
        self.median.get(&week).copied()
    }

    fn window_mean(&self, area: Option<&str>, window: &Interval, label: &str) -> Result<[f64; 3]> {
        let weeks = window.week_starts();
        if weeks.is_empty() {
            return Err(Error::Coverage {
                what: format!("{label} window {} to {} (no whole week)", window.start, window.end),
            });
        }
        let local = area.and_then(|a| self.areas.get(a));
        let mut sum = [0.0; 3];
        for week in &weeks {
            let v = match local {
                Some(series) => series.get(week).copied(),
                None => self.median.get(week).copied(),
            };
            let v = v.ok_or_else(|| Error::Coverage {
                what: format!("{label} week {week} for area {}", area.unwrap_or("<median>")),
            })?;
            for t in 0..3 {
                sum[t] += v[t];
            }
        }
        let n = weeks.len() as f64;
        Ok(sum.map(|s| s / n))
    }
}

/// Mean weekly attention per theme over the long- and short-term windows.
///
/// Users without an area, or with an area the series does not cover, get the
/// cross-area weekly median. The result is raw; z-scoring over the population
/// happens at load time.
pub fn media_features(
    series: &MediaSeries,
    area: Option<&str>,
    windows: &TemporalWindows,
) -> Result<([f64; 3], [f64; 3])> {
    let area = area.filter(|a| series.has_area(a));
    let long = series.window_mean(area, &windows.long_term, "long-term")?;
    let short = series.window_mean(area, &windows.short_term, "short-term")?;
    Ok((long, short))
}
