//! Run configuration: a TOML file, overridden field by field from the command line.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use igklo_core::relcheck::{Bb1Convention, Kind, RelationCase};
use igklo_core::satake::{
    build_catalog, cartan_matrix, catalog_instance, CartanType, Orientation, SatakeDiagram,
    SatakeError, ShiftInstance,
};

pub const CONFIG_SCHEMA: &str = "igklo-config/1";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown catalog instance `{0}` (see `igklo catalog`)")]
    UnknownInstance(String),
    #[error("instance `{name}`: {source}")]
    Validation { name: String, source: SatakeError },
    #[error("invalid value for {field}: {msg}")]
    Invalid { field: &'static str, msg: String },
}

/// An instance given inline rather than by catalog name.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineInstance {
    pub name: Option<String>,
    /// Cartan type letter: A, D or E.
    #[serde(rename = "type")]
    pub kind: String,
    pub rank: usize,
    /// Non-trivial cycles of τ, 1-based, e.g. `[[1, 3]]`.
    #[serde(default)]
    pub tau: Vec<Vec<usize>>,
    /// Pairings ⟨λ, α_i⟩.
    pub lambda: Vec<i64>,
    /// Pairings ⟨μ, α_i⟩.
    pub mu: Vec<i64>,
    pub theta: Option<Vec<u8>>,
    /// Arrows `[a, b]` meaning a → b, 1-based. Defaults to the standard orientation.
    pub orientation: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Catalog(String),
    Inline(InlineInstance),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub order: Option<usize>,
}

/// The file format.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: Option<String>,
    pub instance: Option<InstanceSource>,
    pub relations: Option<Vec<String>>,
    #[serde(default)]
    pub oracle: OracleSection,
    pub format: Option<String>,
    pub bb1_convention: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

/// One entry of a relation filter: a kind, optionally restricted to a node pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationFilter {
    pub kind: Kind,
    pub pair: Option<(usize, usize)>,
}

impl RelationFilter {
    /// Parses `KIND` or `KIND:i,j` with 1-based nodes.
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let bad = |msg: String| ConfigError::Invalid {
            field: "relations",
            msg,
        };
        let (name, pair) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let kind = Kind::parse(name.trim())
            .filter(|k| Kind::RELATIONS.contains(k))
            .ok_or_else(|| bad(format!("unknown relation kind `{}`", name.trim())))?;
        let pair = match pair {
            None => None,
            Some(p) => {
                let nodes: Vec<usize> = p
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().ok().filter(|&n| n >= 1))
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad(format!("bad node pair `{p}`")))?;
                match nodes[..] {
                    [i, j] => Some((i - 1, j - 1)),
                    _ => return Err(bad(format!("bad node pair `{p}`"))),
                }
            }
        };
        Ok(RelationFilter { kind, pair })
    }

    pub fn matches(&self, c: &RelationCase) -> bool {
        self.kind == c.kind && self.pair.map_or(true, |(i, j)| (c.i, c.j) == (i, j))
    }
}

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub instances: Vec<ShiftInstance>,
    pub relations: Option<Vec<RelationFilter>>,
    pub trials: usize,
    pub seed: u64,
    pub order: usize,
    pub format: Format,
    pub bb1: Bb1Convention,
}

pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_SEED: u64 = 1729;
pub const DEFAULT_ORDER: usize = 8;

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub instance: Option<String>,
    pub relations: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub order: Option<usize>,
    pub format: Option<String>,
    pub bb1_convention: Option<String>,
}

pub fn parse_file(text: &str) -> Result<ConfigFile, ConfigError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    match file.schema.as_deref() {
        None | Some(CONFIG_SCHEMA) => Ok(file),
        Some(other) => Err(ConfigError::Parse(format!(
            "unsupported schema `{other}`, expected `{CONFIG_SCHEMA}`"
        ))),
    }
}

pub fn read_file(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_file(&text)
}

fn cartan_type(s: &str) -> Result<CartanType, ConfigError> {
    match s.trim().to_ascii_uppercase().as_str() {
        "A" => Ok(CartanType::A),
        "D" => Ok(CartanType::D),
        "E" => Ok(CartanType::E),
        other => Err(ConfigError::Invalid {
            field: "instance.type",
            msg: format!("unsupported type `{other}`"),
        }),
    }
}

/// Builds and validates an inline instance. The multiplicities are always solved
/// from λ and μ.
pub fn build_inline(spec: &InlineInstance) -> Result<ShiftInstance, ConfigError> {
    let name = spec.name.clone().unwrap_or_else(|| "inline".to_string());
    let wrap = |source: SatakeError| ConfigError::Validation {
        name: name.clone(),
        source,
    };
    let n = spec.rank;
    let cartan =
        cartan_matrix(cartan_type(&spec.kind)?, n).ok_or_else(|| ConfigError::Invalid {
            field: "instance.rank",
            msg: format!("no {}{} diagram", spec.kind, n),
        })?;
    let mut tau: Vec<usize> = (0..n).collect();
    for cycle in &spec.tau {
        let bad = || ConfigError::Invalid {
            field: "instance.tau",
            msg: format!("bad cycle {cycle:?}"),
        };
        match cycle[..] {
            [a, b] if (1..=n).contains(&a) && (1..=n).contains(&b) => {
                tau[a - 1] = b - 1;
                tau[b - 1] = a - 1;
            }
            [_] => {}
            _ => return Err(bad()),
        }
    }
    let diagram = SatakeDiagram::new(cartan, tau).map_err(wrap)?;
    let theta = spec.theta.clone().unwrap_or_else(|| vec![0; n]);
    let orientation = match &spec.orientation {
        None => None,
        Some(arrows) => {
            let arrows = arrows
                .iter()
                .map(|&[a, b]| (a.wrapping_sub(1), b.wrapping_sub(1)));
            Some(Orientation::from_arrows(&diagram, arrows).map_err(wrap)?)
        }
    };
    ShiftInstance::new(
        name.clone(),
        diagram,
        spec.lambda.clone(),
        spec.mu.clone(),
        theta,
        orientation,
    )
    .map_err(wrap)
}

fn lookup(name: &str) -> Result<ShiftInstance, ConfigError> {
    catalog_instance(name).ok_or_else(|| ConfigError::UnknownInstance(name.to_string()))
}

/// Merges the file with the overrides and validates the result.
pub fn resolve(file: ConfigFile, o: Overrides) -> Result<RunConfig, ConfigError> {
    let instances = match (&o.instance, &file.instance) {
        (Some(name), _) => vec![lookup(name)?],
        (None, Some(InstanceSource::Catalog(name))) => vec![lookup(name)?],
        (None, Some(InstanceSource::Inline(spec))) => vec![build_inline(spec)?],
        (None, None) => build_catalog(),
    };
    let relations = match (&o.relations, &file.relations) {
        (Some(list), _) => Some(
            list.split(';')
                .flat_map(|s| split_list(s))
                .collect::<Vec<_>>(),
        ),
        (None, Some(list)) => Some(list.clone()),
        (None, None) => None,
    };
    let relations = relations
        .map(|list| {
            list.iter()
                .map(|s| RelationFilter::parse(s))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    if let Some(filters) = &relations {
        for f in filters {
            let applicable = instances.iter().any(|inst| {
                igklo_core::relcheck::enumerate_cases(inst)
                    .iter()
                    .any(|c| f.matches(c))
            });
            if !applicable {
                return Err(ConfigError::Invalid {
                    field: "relations",
                    msg: format!(
                        "{} matches no applicable relation of the selected instances",
                        describe(f)
                    ),
                });
            }
        }
    }
    let format = match o.format.as_deref().or(file.format.as_deref()) {
        None | Some("text") => Format::Text,
        Some("structured") | Some("json") => Format::Structured,
        Some(other) => {
            return Err(ConfigError::Invalid {
                field: "format",
                msg: format!("`{other}`"),
            })
        }
    };
    let bb1 = match o
        .bb1_convention
        .as_deref()
        .or(file.bb1_convention.as_deref())
    {
        None | Some("taui") => Bb1Convention::TauI,
        Some("i") => Bb1Convention::I,
        Some(other) => {
            return Err(ConfigError::Invalid {
                field: "bb1_convention",
                msg: format!("`{other}`"),
            })
        }
    };
    let trials = o.trials.or(file.oracle.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(ConfigError::Invalid {
            field: "trials",
            msg: "must be positive".into(),
        });
    }
    Ok(RunConfig {
        instances,
        relations,
        trials,
        seed: o.seed.or(file.oracle.seed).unwrap_or(DEFAULT_SEED),
        order: o.order.or(file.oracle.order).unwrap_or(DEFAULT_ORDER),
        format,
        bb1,
    })
}

/// Splits a comma list while keeping `KIND:i,j` entries whole.
fn split_list(s: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let continues_pair = part.chars().all(|c| c.is_ascii_digit())
            && out
                .last()
                .is_some_and(|prev| prev.contains(':') && !prev.contains(','));
        if continues_pair {
            let prev = out.last_mut().expect("checked");
            prev.push(',');
            prev.push_str(part);
        } else {
            out.push(part.to_string());
        }
    }
    out
}

fn describe(f: &RelationFilter) -> String {
    match f.pair {
        Some((i, j)) => format!("{}:{},{}", f.kind, i + 1, j + 1),
        None => f.kind.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_keep_pairs_together() {
        assert_eq!(
            split_list("BB1:1,3, Serre3,HB"),
            vec!["BB1:1,3", "Serre3", "HB"]
        );
    }

    #[test]
    fn filter_parsing() {
        let f = RelationFilter::parse("serre3:2,3").unwrap();
        assert_eq!(f.kind, Kind::Serre3);
        assert_eq!(f.pair, Some((1, 2)));
        assert!(RelationFilter::parse("Nope").is_err());
        assert!(RelationFilter::parse("BB1:0,1").is_err());
    }
}
