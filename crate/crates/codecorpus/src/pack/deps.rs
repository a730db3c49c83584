//! Static dependency-graph extraction from import/include statements.
//!
//! Import rules are per-language regex tables; captured references are
//! resolved against the repository's own file set and unresolved ones
//! (external packages) are simply ignored. Self-edges are forbidden.

use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;

use crate::error::{Error, Result};

/// Edges point importer -> imported.
#[derive(Debug, Clone)]
pub struct DepGraph {
    pub language: String,
    /// Sorted file paths.
    pub nodes: Vec<String>,
    /// (importer index, imported index) into `nodes`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl DepGraph {
    pub fn node_index(&self, path: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(path)).ok()
    }

    pub fn edge_paths(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].as_str(), self.nodes[b].as_str()))
    }

    /// Graph restricted to a subset of nodes.
    pub fn restricted(&self, keep: &BTreeSet<usize>) -> DepGraph {
        let nodes: Vec<String> = keep.iter().map(|&i| self.nodes[i].clone()).collect();
        let remap: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .map(|(a, b)| (remap[a], remap[b]))
            .collect();
        DepGraph { language: self.language.clone(), nodes, edges }
    }
}

enum Resolve {
    /// Dotted module path; tries `<mod>.py` and `<mod>/__init__.py` relative
    /// to the importer's directory and the repo root.
    PythonModule,
    /// Quoted include path, relative to the importer's directory or root.
    QuotedInclude,
    /// Dotted class path resolved to `<path>.java` from the root or the
    /// importer's directory.
    JavaImport,
}

pub struct ImportRules {
    patterns: Vec<Regex>,
    resolve: Resolve,
}

/// The shipped per-language rule table.
pub fn rules_for(language: &str) -> Option<ImportRules> {
    match language {
        "Python" => Some(ImportRules {
            patterns: vec![
                Regex::new(r"(?m)^\s*import\s+([\w.]+)").unwrap(),
                Regex::new(r"(?m)^\s*from\s+([\w.]+)\s+import\b").unwrap(),
            ],
            resolve: Resolve::PythonModule,
        }),
        "C" | "C++" | "CUDA" => Some(ImportRules {
            patterns: vec![Regex::new(r#"(?m)^\s*#\s*include\s+"([^"]+)""#).unwrap()],
            resolve: Resolve::QuotedInclude,
        }),
        "Java" => Some(ImportRules {
            patterns: vec![Regex::new(r"(?m)^\s*import\s+(?:static\s+)?([\w.]+)\s*;").unwrap()],
            resolve: Resolve::JavaImport,
        }),
        _ => None,
    }
}

/// Extracts the dependency graph of a repository's files for one language.
/// Errors when no rule set is registered, directing the caller to random
/// packing instead.
pub fn extract_deps(files: &[(String, String)], language: &str) -> Result<DepGraph> {
    let rules =
        rules_for(language).ok_or_else(|| Error::NoImportRules(language.to_string()))?;
    extract_deps_with(files, language, &rules)
}

/// Same extraction with a caller-supplied rule set (config extension point).
pub fn extract_deps_with(
    files: &[(String, String)],
    language: &str,
    rules: &ImportRules,
) -> Result<DepGraph> {
    let mut nodes: Vec<String> = files.iter().map(|(p, _)| p.clone()).collect();
    nodes.sort();
    nodes.dedup();
    let index: BTreeMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();

    let mut edges = BTreeSet::new();
    for (path, content) in files {
        let importer = index[path.as_str()];
        let dir = parent_dir(path);
        for pattern in &rules.patterns {
            for cap in pattern.captures_iter(content) {
                let reference = cap.get(1).map(|m| m.as_str()).unwrap_or("");
                for candidate in candidates(reference, dir, &rules.resolve) {
                    if let Some(&imported) = index.get(candidate.as_str()) {
                        if imported != importer {
                            edges.insert((importer, imported));
                        }
                        break;
                    }
                }
            }
        }
    }
    Ok(DepGraph { language: language.to_string(), nodes, edges })
}

fn parent_dir(path: &str) -> &str {
    path.rsplit_once('/').map(|(d, _)| d).unwrap_or("")
}

fn candidates(reference: &str, importer_dir: &str, resolve: &Resolve) -> Vec<String> {
    let join = |dir: &str, rest: &str| {
        if dir.is_empty() {
            rest.to_string()
        } else {
            format!("{dir}/{rest}")
        }
    };
    match resolve {
        Resolve::PythonModule => {
            let rel = reference.replace('.', "/");
            vec![
                join(importer_dir, &format!("{rel}.py")),
                join(importer_dir, &format!("{rel}/__init__.py")),
                format!("{rel}.py"),
                format!("{rel}/__init__.py"),
            ]
        }
        Resolve::QuotedInclude => {
            let mut out = vec![normalize(&join(importer_dir, reference))];
            out.push(normalize(reference));
            out
        }
        Resolve::JavaImport => {
            let rel = format!("{}.java", reference.replace('.', "/"));
            vec![rel.clone(), join(importer_dir, &rel)]
        }
    }
}

/// Collapses `.` and `..` segments.
fn normalize(path: &str) -> String {
    let mut out: Vec<&str> = Vec::new();
    for seg in path.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out.join("/")
}
