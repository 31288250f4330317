//! Maps available to the service, keyed by root document id.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use lawmap_core::diagnostic::has_errors;
use lawmap_core::traverse::decision_ids;
use lawmap_core::validate::{analyze_source, ResolvedSet};
use lawmap_core::{fixtures, Diagnostic, Mode};
use serde::Serialize;

#[derive(Debug)]
pub struct MapEntry {
    pub id: String,
    pub title: String,
    /// File the map was read from.
    pub source: String,
    pub set: ResolvedSet,
    pub warnings: Vec<Diagnostic>,
}

/// One row of `GET /maps`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MapSummary {
    pub id: String,
    pub title: String,
    pub source: String,
    pub docs: Vec<String>,
    pub decisions: usize,
    pub warnings: usize,
}

impl MapEntry {
    pub fn summary(&self) -> MapSummary {
        MapSummary {
            id: self.id.clone(),
            title: self.title.clone(),
            source: self.source.clone(),
            docs: self.set.set.ordered_docs().map(|d| d.id.clone()).collect(),
            decisions: decision_ids(&self.set, Mode::Atomic).len(),
            warnings: self.warnings.len(),
        }
    }
}

#[derive(Debug, Default)]
pub struct Catalog {
    maps: BTreeMap<String, Arc<MapEntry>>,
}

impl Catalog {
    /// The maps shipped with the library.
    pub fn bundled() -> Self {
        let mut c = Catalog::default();
        for (name, text) in fixtures::ALL {
            c.add_source(text, &format!("{name}.lawmap")).expect("bundled maps are valid");
        }
        c
    }

    /// Adds a map from DSL text, replacing any map with the same id.
    /// Maps with error diagnostics are refused.
    pub fn add_source(&mut self, text: &str, source: &str) -> Result<String, Vec<Diagnostic>> {
        let (rs, diags) = analyze_source(text, source);
        let rs = match rs {
            Some(rs) if !has_errors(&diags) => rs,
            _ => return Err(diags),
        };
        let root = rs.root_doc();
        let entry = MapEntry {
            id: root.id.clone(),
            title: root.title.clone(),
            source: source.to_string(),
            warnings: diags,
            set: rs,
        };
        let id = entry.id.clone();
        self.maps.insert(id.clone(), Arc::new(entry));
        Ok(id)
    }

    /// Adds every `.lawmap` file in `dir`, returning the files refused.
    pub fn load_dir(&mut self, dir: &Path) -> std::io::Result<Vec<(String, Vec<Diagnostic>)>> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "lawmap"))
            .collect();
        paths.sort();
        let mut refused = Vec::new();
        for p in paths {
            let name = p.display().to_string();
            let text = std::fs::read_to_string(&p)?;
            if let Err(diags) = self.add_source(&text, &name) {
                refused.push((name, diags));
            }
        }
        Ok(refused)
    }

    pub fn get(&self, id: &str) -> Option<Arc<MapEntry>> {
        self.maps.get(id).cloned()
    }

    pub fn summaries(&self) -> Vec<MapSummary> {
        self.maps.values().map(|m| m.summary()).collect()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}
