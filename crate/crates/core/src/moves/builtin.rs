//! Built-in move scripts, stored as JSON next to the crate sources.

use super::MoveScript;
use crate::error::{Error, Result};

pub const BUILTIN_SCRIPTS: [&str; 4] = ["fig8", "thm61", "connectedness", "achiral_removal"];

fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig8" => include_str!("../../scripts/fig8.json"),
        "thm61" => include_str!("../../scripts/thm61.json"),
        "connectedness" => include_str!("../../scripts/connectedness.json"),
        "achiral_removal" => include_str!("../../scripts/achiral_removal.json"),
        _ => return None,
    })
}

pub fn builtin_script(name: &str) -> Result<MoveScript> {
    let src = source(name).ok_or_else(|| Error::UnknownId(format!("builtin script {name}")))?;
    serde_json::from_str(src).map_err(|e| Error::Parse(format!("builtin {name}: {e}")))
}
