use std::collections::HashMap;

/// Area of a user from the location-based subreddits they wrote in.
///
/// Returns the area only when every known location subreddit in the list maps
/// to the same one. Names absent from `location_map` are not location-based
/// and are ignored.
pub fn georeference<S: AsRef<str>>(subreddits: &[S], location_map: &HashMap<String, String>) -> Option<String> {
    let mut area: Option<&String> = None;
    for name in subreddits {
        if let Some(a) = location_map.get(name.as_ref()) {
            match area {
                None => area = Some(a),
                Some(prev) if prev == a => {}
                Some(_) => return None,
            }
        }
    }
    area.cloned()
}
