//! Loading, validating and preprocessing observational data.

mod georef;
mod io;
mod media;
mod windows;
mod zscore;

pub use georef::georeference;
pub use io::{
    load_catalog, load_dataset, load_location_map, load_media, parse_iso_week, save_catalog, save_users,
    standardize_users, write_atomic, DatasetPaths, LoadOptions, LoadedDataset, CATALOG_HEADER, USERS_HEADER,
};
pub use media::{media_features, MediaSeries};
pub use windows::{split_windows, Interval, TemporalWindows, LONG_END_WEEKS, SHORT_WEEKS, YEAR_WEEKS};
pub use zscore::zscore;
