//! CSV schemas for catalogs, users, media series and location maps.
//!
//! * `catalog.csv`: `name,affluence,partisanship,gender,age,popularity_z`
//! * `users.csv`: `user_id,A,I,E_L,E_S,location,P_L,P_S` followed by the
//!   optional columns `M_L_climate,M_L_climate_action,M_L_natural_disasters,
//!   M_S_climate,M_S_climate_action,M_S_natural_disasters,t_a,
//!   location_subreddits`. `P_L`/`P_S` are `0`/`1` strings of length K in
//!   catalog order. Empty media cells are computed from the media series over
//!   the windows around `t_a` (ISO date). `location_subreddits` is a
//!   `;`-separated list resolved through the location map when `location` is
//!   empty.
//! * `media.csv`: `area,iso_week,theme,attention` with weeks such as
//!   `2019-W39` and themes `climate`, `climate_action`, `natural_disasters`.
//! * `location_map.csv`: `subreddit,area`.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, Weekday};
use csv::StringRecord;

use super::georef::georeference;
use super::media::{media_features, MediaSeries};
use super::windows::split_windows;
use super::zscore::zscore_named;
use crate::error::{Error, Result};
use crate::model::{Dataset, SubredditCatalog, UserObservation, THEMES};

pub const CATALOG_HEADER: [&str; 6] = ["name", "affluence", "partisanship", "gender", "age", "popularity_z"];
pub const USERS_HEADER: [&str; 14] = [
    "user_id",
    "A",
    "I",
    "E_L",
    "E_S",
    "location",
    "P_L",
    "P_S",
    "M_L_climate",
    "M_L_climate_action",
    "M_L_natural_disasters",
    "M_S_climate",
    "M_S_climate_action",
    "M_S_natural_disasters",
];
const REQUIRED_USER_COLUMNS: [&str; 8] = ["user_id", "A", "I", "E_L", "E_S", "location", "P_L", "P_S"];

/// Input files of a dataset. Only the catalog and users are mandatory.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatasetPaths {
    pub catalog: PathBuf,
    pub users: PathBuf,
    pub media: Option<PathBuf>,
    pub location_map: Option<PathBuf>,
}

impl DatasetPaths {
    /// Conventional file names inside `dir`; optional files are used when
    /// present.
    pub fn in_dir(dir: &Path) -> Self {
        let opt = |name: &str| Some(dir.join(name)).filter(|p| p.exists());
        Self {
            catalog: dir.join("catalog.csv"),
            users: dir.join("users.csv"),
            media: opt("media.csv"),
            location_map: opt("location_map.csv"),
        }
    }

    pub fn with_users(mut self, users: PathBuf) -> Self {
        self.users = users;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    /// Window regime used when media features are computed from the series.
    pub gap_enabled: bool,
    /// z-score engagement and media columns over the loaded population.
    pub standardize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            gap_enabled: true,
            standardize: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub media: Option<MediaSeries>,
    pub warnings: Vec<String>,
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn csv_err(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn schema(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::Schema {
        file: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn new(path: &Path, headers: &StringRecord, required: &[&str]) -> Result<Self> {
        let index: HashMap<String, usize> = headers.iter().enumerate().map(|(i, h)| (h.to_string(), i)).collect();
        for r in required {
            if !index.contains_key(*r) {
                return Err(schema(path, 1, format!("missing column {r:?}")));
            }
        }
        Ok(Self { index })
    }

    fn get<'r>(&self, rec: &'r StringRecord, name: &str) -> Option<&'r str> {
        self.index.get(name).and_then(|&i| rec.get(i)).filter(|s| !s.is_empty())
    }
}

fn line_of(rec: &StringRecord) -> usize {
    rec.position().map_or(0, |p| p.line() as usize)
}

fn parse_f64(path: &Path, line: usize, column: &str, raw: Option<&str>) -> Result<f64> {
    let raw = raw.ok_or_else(|| schema(path, line, format!("empty {column}")))?;
    let v: f64 = raw
        .parse()
        .map_err(|_| schema(path, line, format!("{column}: {raw:?} is not a number")))?;
    if !v.is_finite() {
        return Err(schema(path, line, format!("{column}: non-finite value")));
    }
    Ok(v)
}

fn parse_bit(path: &Path, line: usize, column: &str, raw: Option<&str>) -> Result<bool> {
    match raw {
        Some("0") => Ok(false),
        Some("1") => Ok(true),
        other => Err(schema(path, line, format!("{column} must be 0 or 1, got {other:?}"))),
    }
}

fn parse_bits(path: &Path, line: usize, column: &str, user: &str, raw: Option<&str>, k: usize) -> Result<Vec<bool>> {
    let raw = raw.unwrap_or("");
    if raw.len() != k {
        return Err(schema(
            path,
            line,
            format!("user {user}: {column} has length {} but the catalog has K = {k}", raw.len()),
        ));
    }
    raw.bytes()
        .map(|b| match b {
            b'0' => Ok(false),
            b'1' => Ok(true),
            _ => Err(schema(path, line, format!("user {user}: {column} must contain only 0 and 1"))),
        })
        .collect()
}

pub fn load_catalog(path: &Path) -> Result<SubredditCatalog> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let cols = Columns::new(path, &headers, &CATALOG_HEADER)?;
    let (mut names, mut scores, mut pops) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = line_of(&rec);
        let name = cols
            .get(&rec, "name")
            .ok_or_else(|| schema(path, line, "empty name"))?
            .to_string();
        let mut row = [0.0; 4];
        for (j, axis) in CATALOG_HEADER[1..5].iter().enumerate() {
            row[j] = parse_f64(path, line, axis, cols.get(&rec, axis))?;
        }
        names.push(name);
        scores.push(row);
        pops.push(parse_f64(path, line, "popularity_z", cols.get(&rec, "popularity_z"))?);
    }
    SubredditCatalog::new(names, scores, pops).map_err(|e| schema(path, 0, e.to_string()))
}

pub fn load_location_map(path: &Path) -> Result<HashMap<String, String>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let cols = Columns::new(path, &headers, &["subreddit", "area"])?;
    let mut map = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = line_of(&rec);
        let sub = cols.get(&rec, "subreddit").ok_or_else(|| schema(path, line, "empty subreddit"))?;
        let area = cols.get(&rec, "area").ok_or_else(|| schema(path, line, "empty area"))?;
        if let Some(prev) = map.insert(sub.to_string(), area.to_string()) {
            if prev != area {
                return Err(schema(path, line, format!("subreddit {sub} maps to both {prev} and {area}")));
            }
        }
    }
    Ok(map)
}

/// Monday of an ISO week written as `YYYY-Www`.
pub fn parse_iso_week(raw: &str) -> Option<NaiveDate> {
    let (year, week) = raw.split_once("-W")?;
    NaiveDate::from_isoywd_opt(year.parse().ok()?, week.parse().ok()?, Weekday::Mon)
}

pub fn load_media(path: &Path) -> Result<MediaSeries> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let cols = Columns::new(path, &headers, &["area", "iso_week", "theme", "attention"])?;
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = line_of(&rec);
        let area = cols.get(&rec, "area").ok_or_else(|| schema(path, line, "empty area"))?;
        let raw_week = cols.get(&rec, "iso_week").unwrap_or("");
        let week = parse_iso_week(raw_week).ok_or_else(|| schema(path, line, format!("bad iso_week {raw_week:?}")))?;
        let raw_theme = cols.get(&rec, "theme").unwrap_or("");
        let theme = THEMES
            .iter()
            .position(|t| *t == raw_theme)
            .ok_or_else(|| schema(path, line, format!("unknown theme {raw_theme:?}")))?;
        let attention = parse_f64(path, line, "attention", cols.get(&rec, "attention"))?;
        if !(0.0..=1.0).contains(&attention) {
            return Err(schema(path, line, format!("attention {attention} is not in [0, 1]")));
        }
        entries.push((area.to_string(), week, theme, attention));
    }
    MediaSeries::from_entries(entries).map_err(|e| schema(path, 0, e.to_string()))
}

fn media_columns(prefix: &str) -> [String; 3] {
    THEMES.map(|t| format!("{prefix}_{t}"))
}

/// Loads and cross-validates a dataset.
pub fn load_dataset(paths: &DatasetPaths, options: &LoadOptions) -> Result<LoadedDataset> {
    let catalog = load_catalog(&paths.catalog)?;
    let location_map = paths.location_map.as_deref().map(load_location_map).transpose()?;
    let media = paths.media.as_deref().map(load_media).transpose()?;
    let k = catalog.len();
    let path = paths.users.as_path();
    let mut warnings = Vec::new();

    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let cols = Columns::new(path, &headers, &REQUIRED_USER_COLUMNS)?;
    let ml_cols = media_columns("M_L");
    let ms_cols = media_columns("M_S");

    let mut users = Vec::new();
    let mut seen = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = line_of(&rec);
        let id = cols
            .get(&rec, "user_id")
            .ok_or_else(|| schema(path, line, "empty user_id"))?
            .to_string();
        if let Some(first) = seen.insert(id.clone(), line) {
            return Err(schema(path, line, format!("duplicate user id {id:?} (first on line {first})")));
        }
        let activated = parse_bit(path, line, "A", cols.get(&rec, "A"))?;
        let interacted = parse_bit(path, line, "I", cols.get(&rec, "I"))?;
        let e_long = parse_f64(path, line, "E_L", cols.get(&rec, "E_L"))?;
        let e_short = parse_f64(path, line, "E_S", cols.get(&rec, "E_S"))?;
        let p_long = parse_bits(path, line, "P_L", &id, cols.get(&rec, "P_L"), k)?;
        let p_short = parse_bits(path, line, "P_S", &id, cols.get(&rec, "P_S"), k)?;

        let mut location = cols.get(&rec, "location").map(str::to_string);
        if location.is_none() {
            if let (Some(subs), Some(map)) = (cols.get(&rec, "location_subreddits"), &location_map) {
                let list: Vec<&str> = subs.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
                location = georeference(&list, map);
            }
        }

        let given: Vec<Option<&str>> = ml_cols.iter().chain(&ms_cols).map(|c| cols.get(&rec, c)).collect();
        let (m_long, m_short) = if given.iter().all(Option::is_some) {
            let mut v = [0.0; 6];
            for (j, (raw, name)) in given.iter().zip(ml_cols.iter().chain(&ms_cols)).enumerate() {
                v[j] = parse_f64(path, line, name, *raw)?;
            }
            ([v[0], v[1], v[2]], [v[3], v[4], v[5]])
        } else if given.iter().any(Option::is_some) {
            return Err(schema(path, line, format!("user {id}: media columns must be all set or all empty")));
        } else {
            let series = media
                .as_ref()
                .ok_or_else(|| schema(path, line, format!("user {id}: no media columns and no media series")))?;
            let raw_t = cols
                .get(&rec, "t_a")
                .ok_or_else(|| schema(path, line, format!("user {id}: t_a is required to compute media features")))?;
            let t_a = NaiveDate::parse_from_str(raw_t, "%Y-%m-%d")
                .map_err(|_| schema(path, line, format!("user {id}: bad t_a {raw_t:?}")))?;
            if let Some(area) = &location {
                if !series.has_area(area) {
                    warnings.push(format!(
                        "{}:{line}: user {id}: area {area} has no media series, using the cross-area median",
                        path.display()
                    ));
                }
            }
            let windows = split_windows(t_a, options.gap_enabled);
            media_features(series, location.as_deref(), &windows)
                .map_err(|e| schema(path, line, format!("user {id}: {e}")))?
        };

        users.push(UserObservation {
            id,
            p_long,
            p_short,
            e_long,
            e_short,
            m_long,
            m_short,
            interacted,
            activated,
            location,
        });
    }

    if options.standardize && users.len() >= 2 {
        standardize_users(&mut users)?;
    }
    let dataset = Dataset::new(catalog, users)?;
    Ok(LoadedDataset {
        dataset,
        media,
        warnings,
    })
}

/// z-scores engagement and every media column over the population.
pub fn standardize_users(users: &mut [UserObservation]) -> Result<()> {
    let column = |users: &[UserObservation], f: &dyn Fn(&UserObservation) -> f64| -> Vec<f64> {
        users.iter().map(f).collect()
    };
    let z = zscore_named(&column(users, &|u| u.e_long), "E_L")?;
    users.iter_mut().zip(z).for_each(|(u, v)| u.e_long = v);
    let z = zscore_named(&column(users, &|u| u.e_short), "E_S")?;
    users.iter_mut().zip(z).for_each(|(u, v)| u.e_short = v);
    for t in 0..3 {
        let z = zscore_named(&column(users, &|u| u.m_long[t]), &format!("M_L_{}", THEMES[t]))?;
        users.iter_mut().zip(z).for_each(|(u, v)| u.m_long[t] = v);
        let z = zscore_named(&column(users, &|u| u.m_short[t]), &format!("M_S_{}", THEMES[t]))?;
        users.iter_mut().zip(z).for_each(|(u, v)| u.m_short[t] = v);
    }
    Ok(())
}

fn create(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn save_catalog(catalog: &SubredditCatalog, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let e = |err| csv_err(path, err);
    w.write_record(CATALOG_HEADER).map_err(e)?;
    for ((name, row), pop) in catalog.names().iter().zip(catalog.scores()).zip(catalog.popularity()) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(f64::to_string));
        rec.push(pop.to_string());
        w.write_record(&rec).map_err(e)?;
    }
    w.flush().map_err(|err| Error::io(path, err))
}

pub fn save_users(users: &[UserObservation], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let e = |err| csv_err(path, err);
    w.write_record(USERS_HEADER).map_err(e)?;
    for u in users {
        let mut rec = vec![
            u.id.clone(),
            u8::from(u.activated).to_string(),
            u8::from(u.interacted).to_string(),
            u.e_long.to_string(),
            u.e_short.to_string(),
            u.location.clone().unwrap_or_default(),
            bits(&u.p_long),
            bits(&u.p_short),
        ];
        rec.extend(u.m_long.iter().chain(&u.m_short).map(f64::to_string));
        w.write_record(&rec).map_err(e)?;
    }
    w.flush().map_err(|err| Error::io(path, err))
}

/// Writes bytes atomically: a sibling temporary file is renamed into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    {
        let mut f = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
