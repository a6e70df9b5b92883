//! On-disk cache of enumeration results. Only generator lists are stored;
//! element sets are re-closed on load.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::element::Gl2Element;
use super::enumerate::{enumerate_subgroups, EnumerationConfig, EnumerationMode};
use super::subgroup::Subgroup;
use super::{Gl2Error, Result};

pub const CACHE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    schema_version: u32,
    code_version: String,
    p: u32,
    mode: EnumerationMode,
    generators: Vec<Vec<[u32; 4]>>,
}

pub fn cache_path(dir: &Path, p: u32, mode: EnumerationMode, code_version: &str) -> PathBuf {
    let tag = match mode {
        EnumerationMode::Exhaustive => "exhaustive".to_string(),
        EnumerationMode::Sampled { count, seed } => format!("sampled-{count}-{seed}"),
    };
    dir.join(format!("gl2-p{p}-{tag}-v{code_version}.json"))
}

fn load(path: &Path, p: u32, mode: EnumerationMode, code_version: &str) -> Result<Option<Vec<Subgroup>>> {
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(None);
    };
    let file: CacheFile = serde_json::from_str(&text)
        .map_err(|e| Gl2Error::Cache(format!("{}: {e}", path.display())))?;
    if file.schema_version != CACHE_SCHEMA_VERSION || file.code_version != code_version || file.p != p || file.mode != mode {
        return Ok(None);
    }
    let groups = file
        .generators
        .iter()
        .map(|gens| {
            let gens = gens
                .iter()
                .map(|m| Gl2Element::new(p, m.map(i64::from)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Subgroup::generated(p, gens))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(groups))
}

fn store(path: &Path, p: u32, mode: EnumerationMode, code_version: &str, groups: &[Subgroup]) -> Result<()> {
    let file = CacheFile {
        schema_version: CACHE_SCHEMA_VERSION,
        code_version: code_version.to_string(),
        p,
        mode,
        generators: groups.iter().map(|g| g.generators().iter().map(Gl2Element::entries).collect()).collect(),
    };
    let text = serde_json::to_string(&file).map_err(|e| Gl2Error::Cache(e.to_string()))?;
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Gl2Error::Cache(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| Gl2Error::Cache(format!("{}: {e}", path.display())))
}

/// Enumerates through the cache directory, populating it on a miss.
pub fn enumerate_cached(
    dir: &Path,
    p: u32,
    mode: EnumerationMode,
    config: EnumerationConfig,
    code_version: &str,
) -> Result<Vec<Subgroup>> {
    let path = cache_path(dir, p, mode, code_version);
    if let Some(groups) = load(&path, p, mode, code_version)? {
        return Ok(groups);
    }
    let groups = enumerate_subgroups(p, mode, config)?;
    store(&path, p, mode, code_version, &groups)?;
    Ok(groups)
}
