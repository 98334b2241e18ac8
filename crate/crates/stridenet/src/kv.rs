//! Plain-text `key = value` files used for calibration profiles, dataset
//! metadata and run manifests.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Parses `key = value` lines. `#` starts a comment, blank lines are
/// ignored, duplicate keys are rejected.
pub(crate) fn parse_kv(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i as u64 + 1,
                msg: format!("expected `key = value`, got {line:?}"),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i as u64 + 1,
                msg: format!("duplicate key {key:?}"),
            });
        }
    }
    Ok(map)
}

pub(crate) fn read_kv_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    parse_kv(&text, path)
}

/// Renders `key = value` lines in the order given.
pub(crate) fn render_kv(pairs: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(v);
        out.push('\n');
    }
    out
}
