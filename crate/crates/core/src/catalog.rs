//! Example catalog, JSON config files and verification reports.
//!
//! Every builtin entry is stored as an [`EntryConfig`], the same structure
//! that `load_config` reads from disk, so builtin and file entries go through
//! one validation path.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::cecoh::{betti_numbers, build_complex, ring_structure, RingFingerprint};
use crate::exactla::{from_ratstr, simultaneous_eigenspaces, to_ratstr, RatMatrix, RatStr};
use crate::groupcoh::{wang_tower, GroupCohModel};
use crate::grouphull::{
    declared_hirsch_length, hirsch_length, is_zariski_dense_unipotent, polyrational_series, torus_density_in_hull,
    torus_discreteness_in_hull, Decision, DeltaGen, DenseSubgroupData, DensityCertificate, DiscretenessCertificate,
    TorusDensityCertificate,
};
use crate::liealg::{semidirect, validate_jacobi, JacobiReport, LieAlgebra, LieError, LieModule, SemidirectPresentation};
use crate::specseq::{
    abutment_check, comparison, e2_identification, hs_filtration, kunneth_decomposition, page_multiplicativity_check,
    pages, phi_ring_map, restriction_check, SpecSeqError, Verdict,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Entries whose model rings are compared pairwise by the `c17` check.
pub const BS_FAMILY: [&str; 3] = ["bs_hull2", "bs_hull3", "bs_hull5"];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at {pointer} (line {line}, column {column}): {message}")]
    Parse { pointer: String, line: usize, column: usize, message: String },
    #[error("entry {entry}: {source}")]
    Lie { entry: String, source: LieError },
    #[error("entry {entry}: {message}")]
    Invalid { entry: String, message: String },
    #[error("unknown entry {0:?}")]
    UnknownEntry(String),
    #[error(transparent)]
    SpecSeq(#[from] SpecSeqError),
}

// ---------------------------------------------------------------------------
// config schema

pub type MatrixConfig = Vec<Vec<RatStr>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated in the literature.
    Literature,
    /// Computed by hand or by an independent pipeline.
    Derived,
    /// Immediate from the definitions.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tagged<T> {
    pub value: T,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnipotentConfig {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub brackets: Vec<(usize, usize, Vec<RatStr>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusConfig {
    pub dim: usize,
    pub derivations: Vec<MatrixConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrivialTag {
    #[serde(rename = "trivial")]
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleConfig {
    Named(TrivialTag),
    Explicit {
        dim: usize,
        u_action: Vec<MatrixConfig>,
        t_action: Vec<MatrixConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaGenConfig {
    Log(Vec<RatStr>),
    Matrix(MatrixConfig),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupConfig {
    pub delta_gens: Vec<DeltaGenConfig>,
    pub torus_gens: Vec<Vec<RatStr>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub representation: Vec<MatrixConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub automorphisms: Vec<MatrixConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie_dims: Option<Tagged<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_dims: Option<Tagged<Vec<usize>>>,
    /// Hypothesis expected to fail, for non-examples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fails: Option<Tagged<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_hirsch_length: Option<Tagged<usize>>,
}

impl ExpectedConfig {
    fn is_empty(&self) -> bool {
        *self == ExpectedConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryConfig {
    pub name: String,
    pub unipotent: UnipotentConfig,
    pub torus: TorusConfig,
    pub module: ModuleConfig,
    pub subgroup: SubgroupConfig,
    #[serde(default, skip_serializing_if = "ExpectedConfig::is_empty")]
    pub expected: ExpectedConfig,
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

pub fn parse_config(text: &str) -> Result<EntryConfig, CatalogError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        let inner = e.inner();
        CatalogError::Parse { pointer, line: inner.line(), column: inner.column(), message: inner.to_string() }
    })
}

/// Canonical JSON form: keys sorted, rationals reduced, defaults omitted.
pub fn canonical_json(config: &EntryConfig) -> String {
    to_sorted_json(&serde_json::to_value(config).expect("config serializes"))
}

/// Pretty JSON with sorted keys.
pub fn to_sorted_json(v: &Value) -> String {
    // `Value` maps are ordered by key
    serde_json::to_string_pretty(v).expect("value serializes")
}

pub fn load_config(path: &Path) -> Result<CatalogEntry, CatalogError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CatalogError::Io { path: path.display().to_string(), source })?;
    CatalogEntry::from_config(parse_config(&text)?)
}

// ---------------------------------------------------------------------------
// entries

fn matrix(m: &MatrixConfig, cols: usize, entry: &str, what: &str) -> Result<RatMatrix, CatalogError> {
    let rows: Vec<_> = m.iter().map(|r| from_ratstr(r)).collect();
    if rows.len() != cols {
        return Err(CatalogError::Invalid {
            entry: entry.into(),
            message: format!("{what} has {} rows, expected {cols}", rows.len()),
        });
    }
    RatMatrix::from_rows(rows, cols).map_err(|e| CatalogError::Invalid { entry: entry.into(), message: format!("{what}: {e}") })
}

fn matrix_json(m: &RatMatrix) -> Value {
    json!(m.to_rows().iter().map(|r| to_ratstr(r)).collect::<Vec<_>>())
}

#[derive(Debug, Clone)]
pub struct Certificates {
    pub unipotent_density: Result<DensityCertificate, String>,
    pub torus_density: Result<TorusDensityCertificate, String>,
    pub discreteness: Result<DiscretenessCertificate, String>,
    pub hirsch_length: Result<usize, String>,
    pub declared_hirsch_length: usize,
    pub polyrational_length: Result<usize, String>,
}

fn outcome<T: Serialize>(r: &Result<T, String>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).unwrap(),
        Err(e) => json!({ "error": e }),
    }
}

impl Certificates {
    fn compute(d: &DenseSubgroupData) -> Self {
        Certificates {
            unipotent_density: is_zariski_dense_unipotent(d).map_err(|e| e.to_string()),
            torus_density: torus_density_in_hull(d).map_err(|e| e.to_string()),
            discreteness: torus_discreteness_in_hull(d).map_err(|e| e.to_string()),
            hirsch_length: hirsch_length(d).map_err(|e| e.to_string()),
            declared_hirsch_length: declared_hirsch_length(d),
            polyrational_length: polyrational_series(d).map(|s| s.length()).map_err(|e| e.to_string()),
        }
    }

    /// The first hypothesis that is not certified YES.
    pub fn failing_hypothesis(&self) -> Option<&'static str> {
        let yes = |v: Option<Decision>| v == Some(Decision::Yes);
        if !yes(self.unipotent_density.as_ref().ok().map(|c| c.verdict)) {
            Some("unipotent density")
        } else if !yes(self.torus_density.as_ref().ok().map(|c| c.verdict)) {
            Some("torus density")
        } else if !yes(self.discreteness.as_ref().ok().map(|c| c.verdict)) {
            Some("discreteness")
        } else {
            None
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "unipotent_density": outcome(&self.unipotent_density),
            "torus_density": outcome(&self.torus_density),
            "discreteness": outcome(&self.discreteness),
            "hirsch_length": outcome(&self.hirsch_length),
            "declared_hirsch_length": self.declared_hirsch_length,
            "polyrational_length": outcome(&self.polyrational_length),
        })
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub config: EntryConfig,
    pub hull: SemidirectPresentation,
    /// `g = u ⋊ t`, basis `u` first.
    pub g: LieAlgebra,
    pub module: LieModule,
    pub subgroup: DenseSubgroupData,
    /// Why the Lie-side pipeline does not apply, if it does not.
    pub lie_rejection: Option<String>,
    pub certificates: Certificates,
}

impl CatalogEntry {
    /// Validates Jacobi, derivations, Q-splitness and the module law, then
    /// computes all certificates.
    pub fn from_config(config: EntryConfig) -> Result<Self, CatalogError> {
        let name = config.name.clone();
        let lie = |source| CatalogError::Lie { entry: name.clone(), source };
        let invalid = |message: String| CatalogError::Invalid { entry: name.clone(), message };
        let n = config.unipotent.dim;
        let names = config.unipotent.names.clone().unwrap_or_else(|| (0..n).map(|i| format!("u{i}")).collect());
        if names.len() != n {
            return Err(invalid(format!("{} names for dimension {n}", names.len())));
        }
        let triples = config.unipotent.brackets.iter().map(|(i, j, v)| (*i, *j, from_ratstr(v))).collect();
        let u = LieAlgebra::new(names, triples).map_err(lie)?;
        if let JacobiReport::Violation { triple: (i, j, k), .. } = validate_jacobi(&u) {
            return Err(lie(LieError::Jacobi { i, j, k }));
        }
        if !crate::liealg::is_nilpotent(&u) {
            return Err(invalid("u is not nilpotent".into()));
        }
        if config.torus.derivations.len() != config.torus.dim {
            return Err(invalid(format!(
                "torus of dimension {} with {} derivations",
                config.torus.dim,
                config.torus.derivations.len()
            )));
        }
        let ders = config
            .torus
            .derivations
            .iter()
            .enumerate()
            .map(|(a, m)| matrix(m, n, &name, &format!("derivation {a}")))
            .collect::<Result<Vec<_>, _>>()?;
        let hull = SemidirectPresentation::new(u, ders);
        let g = semidirect(&hull).map_err(lie)?;
        let module = match &config.module {
            ModuleConfig::Named(TrivialTag::Trivial) => LieModule::trivial(&g),
            ModuleConfig::Explicit { dim, u_action, t_action } => {
                if u_action.len() != n || t_action.len() != config.torus.dim {
                    return Err(invalid(format!(
                        "module needs {n} u-actions and {} t-actions",
                        config.torus.dim
                    )));
                }
                let acts = u_action
                    .iter()
                    .chain(t_action)
                    .enumerate()
                    .map(|(i, m)| matrix(m, *dim, &name, &format!("module action {i}")))
                    .collect::<Result<Vec<_>, _>>()?;
                LieModule::new(&g, *dim, acts).map_err(lie)?
            }
        };
        let sub = &config.subgroup;
        let delta = sub
            .delta_gens
            .iter()
            .enumerate()
            .map(|(i, gen)| match gen {
                DeltaGenConfig::Log(v) => Ok(DeltaGen::Log(from_ratstr(v))),
                DeltaGenConfig::Matrix(m) => {
                    Ok(DeltaGen::Matrix(matrix(m, m.len(), &name, &format!("delta generator {i}"))?))
                }
            })
            .collect::<Result<Vec<_>, CatalogError>>()?;
        let rep = sub
            .representation
            .iter()
            .enumerate()
            .map(|(i, m)| matrix(m, m.len(), &name, &format!("representation matrix {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let autos = sub
            .automorphisms
            .iter()
            .enumerate()
            .map(|(i, m)| matrix(m, n, &name, &format!("automorphism {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let lie_rejection = autos.iter().enumerate().find_map(|(i, a)| {
            Some(match simultaneous_eigenspaces(std::slice::from_ref(a), n) {
                Err(e) => format!("{e}").replace("operator 0", &format!("automorphism a{i}")),
                Ok(_) => format!("automorphism a{i} is not part of the torus"),
            })
        });
        let mut subgroup = DenseSubgroupData::new(hull.clone(), delta, sub.torus_gens.iter().map(|v| from_ratstr(v)).collect())
            .with_representation(rep)
            .with_automorphisms(autos);
        if !sub.labels.is_empty() {
            subgroup = subgroup.with_labels(sub.labels.clone());
        }
        let certificates = Certificates::compute(&subgroup);
        Ok(CatalogEntry { config, hull, g, module, subgroup, lie_rejection, certificates })
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn u_dim(&self) -> usize {
        self.hull.u.dim()
    }

    pub fn trivial_module(&self) -> bool {
        self.module.dim() == 1 && self.module.is_trivial()
    }

    pub fn expected_failure(&self) -> Option<&str> {
        self.config.expected.fails.as_ref().map(|t| t.value.as_str())
    }

    fn group_model(&self) -> Result<GroupCohModel, String> {
        wang_tower(&self.subgroup, &self.module).map_err(|e| e.to_string())
    }
}

// ---------------------------------------------------------------------------
// builtin catalog

fn bs_config(name: &str, n: i64, delta: i64, torus_gens: Value, module: Value, expected: Value) -> Value {
    json!({
        "name": name,
        "unipotent": { "dim": 1, "names": ["u"], "brackets": [] },
        "torus": { "dim": 1, "derivations": [[[1]]] },
        "module": module,
        "subgroup": { "delta_gens": [{ "log": [delta] }], "torus_gens": if torus_gens.is_null() { json!([[n]]) } else { torus_gens } },
        "expected": expected,
    })
}

fn abelian_config(n: usize) -> Value {
    let gens: Vec<Value> =
        (0..n).map(|i| json!({ "log": (0..n).map(|j| usize::from(i == j)).collect::<Vec<_>>() })).collect();
    let dims: Vec<usize> = (0..=n).map(|k| crate::cecoh::binomial(n, k)).collect();
    json!({
        "name": format!("abelian{n}"),
        "unipotent": { "dim": n, "brackets": [] },
        "torus": { "dim": 0, "derivations": [] },
        "module": "trivial",
        "subgroup": { "delta_gens": gens, "torus_gens": [] },
        "expected": {
            "lie_dims": { "value": dims, "provenance": "trivial" },
            "group_dims": { "value": dims, "provenance": "trivial" },
        },
    })
}

/// Configs of the builtin entries, in catalog order.
pub fn builtin_configs() -> Vec<EntryConfig> {
    let bs_dims = json!({
        "lie_dims": { "value": [1, 1, 0], "provenance": "derived" },
        "group_dims": { "value": [1, 1, 0], "provenance": "literature" },
    });
    let mut raw = vec![
        bs_config("bs_hull2", 2, 1, Value::Null, json!("trivial"), bs_dims.clone()),
        bs_config("bs_hull3", 3, 1, Value::Null, json!("trivial"), bs_dims.clone()),
        bs_config("bs_hull5", 5, 1, Value::Null, json!("trivial"), bs_dims.clone()),
        bs_config("bs_hull2_index2", 2, 2, Value::Null, json!("trivial"), bs_dims),
        // M = Q^2 with u ↦ E21 and weights 1, 2
        bs_config(
            "bs_hull2_weight",
            2,
            1,
            Value::Null,
            json!({ "dim": 2, "u_action": [[[0, 0], [1, 0]]], "t_action": [[[1, 0], [0, 2]]] }),
            json!({
                "lie_dims": { "value": [0, 1, 1], "provenance": "derived" },
                "group_dims": { "value": [0, 1, 1], "provenance": "derived" },
            }),
        ),
        json!({
            "name": "heis_hull2",
            "unipotent": { "dim": 3, "names": ["x", "z", "y"], "brackets": [[0, 2, [0, 1, 0]]] },
            "torus": { "dim": 1, "derivations": [[[1, 0, 0], [0, 2, 0], [0, 0, 1]]] },
            "module": "trivial",
            "subgroup": {
                "representation": [
                    [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
                    [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
                    [[0, 0, 0], [0, 0, 1], [0, 0, 0]],
                ],
                "delta_gens": [
                    { "matrix": [[1, 1, 0], [0, 1, 0], [0, 0, 1]] },
                    { "matrix": [[1, 0, 0], [0, 1, 1], [0, 0, 1]] },
                ],
                "torus_gens": [[2, 4]],
                "labels": ["a", "b"],
            },
            "expected": {
                "lie_dims": { "value": [1, 1, 0, 0, 0], "provenance": "derived" },
                "group_dims": { "value": [1, 1, 0, 0, 0], "provenance": "derived" },
            },
        }),
        bs_config(
            "multi_prime2",
            2,
            1,
            json!([[2], [3]]),
            json!("trivial"),
            json!({
                "lie_dims": { "value": [1, 1, 0], "provenance": "derived" },
                "fails": { "value": "discreteness", "provenance": "literature" },
                "declared_hirsch_length": { "value": 3, "provenance": "literature" },
            }),
        ),
        json!({
            "name": "anosov_tower",
            "unipotent": { "dim": 2, "brackets": [] },
            "torus": { "dim": 0, "derivations": [] },
            "module": "trivial",
            "subgroup": {
                "delta_gens": [{ "log": [1, 0] }, { "log": [0, 1] }],
                "torus_gens": [],
                "automorphisms": [[[2, 1], [1, 1]]],
            },
            "expected": {
                "group_dims": { "value": [1, 1, 1, 1], "provenance": "derived" },
                "fails": { "value": "not Q-split", "provenance": "literature" },
            },
        }),
    ];
    raw.extend((1..=5).map(abelian_config));
    raw.push(json!({
        "name": "h3",
        "unipotent": { "dim": 3, "names": ["x", "y", "z"], "brackets": [[0, 1, [0, 0, 1]]] },
        "torus": { "dim": 0, "derivations": [] },
        "module": "trivial",
        "subgroup": { "delta_gens": [{ "log": [1, 0, 0] }, { "log": [0, 1, 0] }], "torus_gens": [] },
        "expected": {
            "lie_dims": { "value": [1, 2, 2, 1], "provenance": "literature" },
            "group_dims": { "value": [1, 2, 2, 1], "provenance": "literature" },
        },
    }));
    raw.into_iter().map(|v| serde_json::from_value(v).expect("builtin config is well formed")).collect()
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn get(&self, name: &str) -> Result<&CatalogEntry, CatalogError> {
        self.entries.iter().find(|e| e.name() == name).ok_or_else(|| CatalogError::UnknownEntry(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(CatalogEntry::name).collect()
    }
}

/// All builtin entries, loaded and certified in parallel.
pub fn builtin_catalog() -> Catalog {
    let entries = builtin_configs()
        .into_par_iter()
        .map(|c| CatalogEntry::from_config(c).expect("builtin entry validates"))
        .collect();
    Catalog { entries }
}

// ---------------------------------------------------------------------------
// cohomology report

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideReport {
    pub dims: Vec<usize>,
    pub fingerprint: Option<RingFingerprint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomologyReport {
    pub entry: String,
    pub lie: Option<SideReport>,
    pub lie_note: Option<String>,
    pub group: Option<SideReport>,
    pub group_note: Option<String>,
    pub certificates: Value,
}

pub fn cohomology_report(entry: &CatalogEntry, max_degree: Option<usize>) -> Result<CohomologyReport, CatalogError> {
    let cut = |mut v: Vec<usize>| {
        if let Some(m) = max_degree {
            v.truncate(m + 1);
        }
        v
    };
    let (lie, lie_note) = if let Some(r) = &entry.lie_rejection {
        (None, Some(format!("Lie side disabled: {r}")))
    } else {
        let c = build_complex(&entry.g, &entry.module).map_err(SpecSeqError::from)?;
        let dims = betti_numbers(&c).map_err(SpecSeqError::from)?;
        let (fp, note) = if entry.trivial_module() {
            (Some(ring_structure(&c).map_err(SpecSeqError::from)?.fingerprint()), None)
        } else {
            (None, Some("ring fingerprint needs trivial coefficients".to_string()))
        };
        (Some(SideReport { dims: cut(dims), fingerprint: fp }), note)
    };
    let (group, group_note) = match entry.group_model() {
        Ok(m) => {
            let fp = m.ring.as_ref().map(|r| r.fingerprint());
            (Some(SideReport { dims: cut(m.dims), fingerprint: fp }), m.ring_note)
        }
        Err(e) => (None, Some(e)),
    };
    Ok(CohomologyReport {
        entry: entry.name().to_string(),
        lie,
        lie_note,
        group,
        group_note,
        certificates: entry.certificates.to_json(),
    })
}

impl CohomologyReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap()
    }

    pub fn to_table(&self) -> String {
        let lie = self.lie.as_ref().map(|s| s.dims.clone()).unwrap_or_default();
        let group = self.group.as_ref().map(|s| s.dims.clone()).unwrap_or_default();
        let top = lie.len().max(group.len());
        let cell = |v: &[usize], n: usize| v.get(n).map_or("-".to_string(), usize::to_string);
        let mut out = format!("{}\n{:>6}  {:>6}  {:>6}\n", self.entry, "degree", "lie", "group");
        for n in 0..top {
            out.push_str(&format!("{n:>6}  {:>6}  {:>6}\n", cell(&lie, n), cell(&group, n)));
        }
        for note in [&self.lie_note, &self.group_note].into_iter().flatten() {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// verification

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Main,
    Decomposition,
    Spectral,
    Restriction,
    C17,
    All,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] =
        [CheckKind::Main, CheckKind::Decomposition, CheckKind::Spectral, CheckKind::Restriction, CheckKind::C17, CheckKind::All];
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Main => "main",
            CheckKind::Decomposition => "decomposition",
            CheckKind::Spectral => "spectral",
            CheckKind::Restriction => "restriction",
            CheckKind::C17 => "c17",
            CheckKind::All => "all",
        })
    }
}

impl FromStr for CheckKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        CheckKind::ALL.into_iter().find(|c| c.to_string() == s).ok_or_else(|| format!("unknown check {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    /// The hypothesis that failed, for refusals and skipped checks.
    pub hypothesis: Option<String>,
    pub witness: Value,
}

impl CheckResult {
    fn from_verdict(v: Verdict) -> Self {
        let status = if v.pass { Status::Pass } else { Status::Fail };
        let hypothesis = v.witness.get("refused").and_then(Value::as_str).map(str::to_string);
        CheckResult { name: v.check, status, hypothesis, witness: v.witness }
    }

    fn skipped(name: &str, hypothesis: &str) -> Self {
        CheckResult { name: name.into(), status: Status::Skipped, hypothesis: Some(hypothesis.into()), witness: Value::Null }
    }

    fn failed(name: &str, hypothesis: &str, witness: Value) -> Self {
        CheckResult { name: name.into(), status: Status::Fail, hypothesis: Some(hypothesis.into()), witness }
    }

    fn bool(name: &str, pass: bool, witness: Value) -> Self {
        CheckResult { name: name.into(), status: if pass { Status::Pass } else { Status::Fail }, hypothesis: None, witness }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub entry: String,
    pub check: String,
    pub status: Status,
    pub checks: Vec<CheckResult>,
    pub expected_failure: Option<String>,
    /// `true` when the outcome agrees with the entry's annotation.
    pub as_expected: bool,
    pub timings_ms: BTreeMap<String, u64>,
    pub tool_version: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap()
    }

    /// JSON without the timings field, for byte-for-byte comparisons.
    pub fn to_json_untimed(&self) -> Value {
        let mut v = self.to_json();
        v.as_object_mut().unwrap().remove("timings_ms");
        v
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} [{}]: {}\n", self.entry, self.check, self.status);
        for c in &self.checks {
            out.push_str(&format!("  {:<24} {}", c.name, c.status));
            if let Some(h) = &c.hypothesis {
                out.push_str(&format!(" (hypothesis: {h})"));
            }
            out.push('\n');
        }
        if let Some(f) = &self.expected_failure {
            out.push_str(&format!("  expected failure: {f}; as expected: {}\n", self.as_expected));
        }
        out
    }
}

fn specseq_err(name: &str, e: impl fmt::Display) -> CheckResult {
    CheckResult::failed(name, "computation", json!(e.to_string()))
}

fn check_expected(entry: &CatalogEntry, out: &mut Vec<CheckResult>) {
    let exp = &entry.config.expected;
    if let Some(t) = &exp.lie_dims {
        if entry.lie_rejection.is_none() {
            let got = build_complex(&entry.g, &entry.module).and_then(|c| betti_numbers(&c));
            match got {
                Ok(d) => out.push(CheckResult::bool(
                    "expected_lie_dims",
                    d == t.value,
                    json!({ "expected": t.value, "computed": d, "provenance": t.provenance }),
                )),
                Err(e) => out.push(specseq_err("expected_lie_dims", e)),
            }
        }
    }
    if let Some(t) = &exp.group_dims {
        match entry.group_model() {
            Ok(m) => out.push(CheckResult::bool(
                "expected_group_dims",
                m.dims == t.value,
                json!({ "expected": t.value, "computed": m.dims, "provenance": t.provenance }),
            )),
            Err(e) => out.push(CheckResult::failed("expected_group_dims", "group model", json!(e))),
        }
    }
    if let Some(t) = &exp.declared_hirsch_length {
        let got = entry.certificates.declared_hirsch_length;
        out.push(CheckResult::bool(
            "declared_hirsch_length",
            got == t.value,
            json!({ "expected": t.value, "computed": got, "provenance": t.provenance }),
        ));
    }
}

fn check_certificates(entry: &CatalogEntry, out: &mut Vec<CheckResult>) {
    let jac = validate_jacobi(&entry.g);
    let module_ok = entry.module.validate(&entry.g);
    out.push(CheckResult::bool(
        "jacobi",
        jac.is_valid() && module_ok.is_ok(),
        json!({ "jacobi": jac.is_valid(), "module": module_ok.err().map(|e| e.to_string()) }),
    ));
    let c = &entry.certificates;
    let dec = |name: &str, v: Option<Decision>, w: Value| {
        if v == Some(Decision::Yes) {
            CheckResult::bool(name, true, w)
        } else {
            CheckResult::failed(name, name.trim_end_matches("_density").trim_end_matches("_certificate"), w)
        }
    };
    out.push(dec(
        "unipotent_density",
        c.unipotent_density.as_ref().ok().map(|x| x.verdict),
        outcome(&c.unipotent_density),
    ));
    out.push(dec("torus_density", c.torus_density.as_ref().ok().map(|x| x.verdict), outcome(&c.torus_density)));
    out.push(dec("discreteness", c.discreteness.as_ref().ok().map(|x| x.verdict), outcome(&c.discreteness)));
    // hypothesis names follow `Certificates::failing_hypothesis`
    for r in out.iter_mut() {
        if r.status == Status::Fail {
            r.hypothesis = match r.name.as_str() {
                "unipotent_density" => Some("unipotent density".into()),
                "torus_density" => Some("torus density".into()),
                "discreteness" => Some("discreteness".into()),
                _ => r.hypothesis.take(),
            };
        }
    }
}

fn check_main(entry: &CatalogEntry, out: &mut Vec<CheckResult>) {
    if let Some(r) = &entry.lie_rejection {
        out.push(CheckResult::failed("comparison", "not Q-split", json!({ "reason": r })));
        out.push(CheckResult::skipped("phi_ring_map", "not Q-split"));
    } else {
        let ss = hs_filtration(&entry.g, entry.u_dim(), &entry.module).and_then(|fc| pages(&fc, None));
        let cmp = ss.and_then(|ss| comparison(&ss, &entry.g, &entry.subgroup, &entry.module));
        match cmp {
            Ok(rep) => {
                let res = CheckResult::from_verdict(rep.verdict);
                let passed = res.status == Status::Pass;
                let hyp = res.hypothesis.clone();
                out.push(res);
                if !passed {
                    out.push(CheckResult::skipped("phi_ring_map", hyp.as_deref().unwrap_or("comparison")));
                } else if !entry.trivial_module() {
                    out.push(CheckResult::skipped("phi_ring_map", "trivial coefficients"));
                } else {
                    match phi_ring_map(&entry.g, &entry.subgroup, &entry.module) {
                        Ok(p) => {
                            let mut r = CheckResult::from_verdict(p.verdict);
                            if let Some(obj) = r.witness.as_object_mut() {
                                obj.insert("maps".into(), json!(p.maps.iter().map(matrix_json).collect::<Vec<_>>()));
                            }
                            out.push(r);
                        }
                        Err(SpecSeqError::Unsupported(why)) => out.push(CheckResult::skipped("phi_ring_map", &why)),
                        Err(e) => out.push(specseq_err("phi_ring_map", e)),
                    }
                }
            }
            Err(e) => out.push(specseq_err("comparison", e)),
        }
    }
    match entry.group_model() {
        Ok(m) => out.push(CheckResult::bool("group_model", true, m.to_json())),
        Err(_) => out.push(CheckResult::skipped(
            "group_model",
            entry.certificates.failing_hypothesis().unwrap_or("group model"),
        )),
    }
}

fn check_decomposition(entry: &CatalogEntry, out: &mut Vec<CheckResult>) {
    if let Some(r) = &entry.lie_rejection {
        out.push(CheckResult::skipped("decomposition", r));
        return;
    }
    let mut rows = Vec::new();
    let mut pass = true;
    for n in 0..=entry.g.dim() {
        match kunneth_decomposition(&entry.g, entry.u_dim(), &entry.module, n) {
            Ok(r) => {
                pass &= r.pass;
                rows.push(serde_json::to_value(&r).unwrap());
            }
            Err(e) => {
                out.push(specseq_err("decomposition", e));
                return;
            }
        }
    }
    out.push(CheckResult::bool("decomposition", pass, json!(rows)));
}

fn check_spectral(entry: &CatalogEntry, out: &mut Vec<CheckResult>) {
    if let Some(r) = &entry.lie_rejection {
        for name in ["e2_identification", "abutment", "page_multiplicativity", "stabilization"] {
            out.push(CheckResult::skipped(name, r));
        }
        return;
    }
    let ss = match hs_filtration(&entry.g, entry.u_dim(), &entry.module).and_then(|fc| pages(&fc, None)) {
        Ok(ss) => ss,
        Err(e) => {
            out.push(specseq_err("spectral", e));
            return;
        }
    };
    for v in [
        e2_identification(&ss, &entry.g, entry.u_dim(), &entry.module),
        abutment_check(&ss, &entry.g, &entry.module),
    ] {
        match v {
            Ok(v) => out.push(CheckResult::from_verdict(v)),
            Err(e) => out.push(specseq_err("spectral", e)),
        }
    }
    if entry.trivial_module() {
        match page_multiplicativity_check(&ss) {
            Ok(v) => out.push(CheckResult::from_verdict(v)),
            Err(e) => out.push(specseq_err("page_multiplicativity", e)),
        }
    } else {
        out.push(CheckResult::skipped("page_multiplicativity", "trivial coefficients"));
    }
    let bound = entry.g.dim() + 1;
    out.push(CheckResult::bool(
        "stabilization",
        ss.stabilized_at <= bound,
        json!({ "stabilized_at": ss.stabilized_at, "bound": bound, "e2": ss.page(2).to_json() }),
    ));
}

fn check_restriction(entry: &CatalogEntry, out: &mut Vec<CheckResult>) {
    if let Some(r) = &entry.lie_rejection {
        out.push(CheckResult::skipped("restriction_injective", r));
        return;
    }
    match restriction_check(&entry.g, entry.u_dim(), &entry.module) {
        Ok(v) => out.push(CheckResult::from_verdict(v)),
        Err(e) => out.push(specseq_err("restriction_injective", e)),
    }
}

/// Ring isomorphism between the models of two entries with the same Lie
/// algebra: fingerprints agree and `Φ_b ∘ Φ_a^{-1}` is a ring isomorphism.
pub fn c17_pair(a: &CatalogEntry, b: &CatalogEntry) -> CheckResult {
    let name = format!("c17:{}~{}", a.name(), b.name());
    if a.g != b.g || a.module != b.module {
        return CheckResult::failed(&name, "same Lie model", Value::Null);
    }
    let run = || -> Result<CheckResult, String> {
        let ma = a.group_model()?;
        let mb = b.group_model()?;
        let (Some(ra), Some(rb)) = (ma.ring.as_ref(), mb.ring.as_ref()) else {
            return Ok(CheckResult::skipped(&name, "model ring"));
        };
        let pa = phi_ring_map(&a.g, &a.subgroup, &a.module).map_err(|e| e.to_string())?;
        let pb = phi_ring_map(&b.g, &b.subgroup, &b.module).map_err(|e| e.to_string())?;
        let mut maps = Vec::new();
        for (x, y) in pa.maps.iter().zip(&pb.maps) {
            let inv = x.inverse().ok_or("Φ not invertible")?;
            maps.push(y.mul(&inv));
        }
        let fa = ra.fingerprint();
        let fb = rb.fingerprint();
        let iso = ra.is_isomorphism(rb, &maps);
        Ok(CheckResult::bool(
            &name,
            fa == fb && iso && pa.verdict.pass && pb.verdict.pass,
            json!({
                "fingerprints_equal": fa == fb,
                "explicit_isomorphism": iso,
                "fingerprint": fa,
                "maps": maps.iter().map(matrix_json).collect::<Vec<_>>(),
            }),
        ))
    };
    run().unwrap_or_else(|e| specseq_err(&name, e))
}

/// Pairwise comparison over the BS(1, n) hull family.
pub fn verify_c17(catalog: &Catalog) -> Result<VerificationReport, CatalogError> {
    let start = Instant::now();
    let fam: Vec<&CatalogEntry> = BS_FAMILY.iter().map(|n| catalog.get(n)).collect::<Result<_, _>>()?;
    let mut checks = Vec::new();
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            checks.push(c17_pair(fam[i], fam[j]));
        }
    }
    Ok(finish("bs_family".into(), CheckKind::C17, checks, None, start))
}

fn c17_for(entry: &CatalogEntry, catalog: &Catalog, out: &mut Vec<CheckResult>) {
    if !BS_FAMILY.contains(&entry.name()) {
        out.push(CheckResult::skipped("c17", "member of the BS(1, n) hull family"));
        return;
    }
    for other in BS_FAMILY.iter().filter(|&&n| n != entry.name()) {
        match catalog.get(other) {
            Ok(o) => out.push(c17_pair(entry, o)),
            Err(e) => out.push(specseq_err("c17", e)),
        }
    }
}

fn finish(
    entry: String,
    check: CheckKind,
    checks: Vec<CheckResult>,
    expected: Option<&str>,
    start: Instant,
) -> VerificationReport {
    let any_fail = checks.iter().any(|c| c.status == Status::Fail);
    let any_pass = checks.iter().any(|c| c.status == Status::Pass);
    let status = if !any_fail && any_pass { Status::Pass } else { Status::Fail };
    let as_expected = match expected {
        None => status == Status::Pass,
        Some(h) => status == Status::Fail && checks.iter().any(|c| c.status == Status::Fail && c.hypothesis.as_deref() == Some(h)),
    };
    let mut timings_ms = BTreeMap::new();
    timings_ms.insert("total".to_string(), start.elapsed().as_millis() as u64);
    VerificationReport {
        entry,
        check: check.to_string(),
        status,
        checks,
        expected_failure: expected.map(str::to_string),
        as_expected,
        timings_ms,
        tool_version: TOOL_VERSION.to_string(),
    }
}

pub fn verify(entry: &CatalogEntry, check: CheckKind, catalog: &Catalog) -> VerificationReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let mut timings = BTreeMap::new();
    let mut timed = |name: &str, f: &mut dyn FnMut(&mut Vec<CheckResult>)| {
        let t = Instant::now();
        f(&mut checks);
        timings.insert(name.to_string(), t.elapsed().as_millis() as u64);
    };
    let all = check == CheckKind::All;
    if all {
        timed("certificates", &mut |o| check_certificates(entry, o));
        timed("expected", &mut |o| check_expected(entry, o));
    }
    if all || check == CheckKind::Main {
        timed("main", &mut |o| check_main(entry, o));
    }
    if all || check == CheckKind::Decomposition {
        timed("decomposition", &mut |o| check_decomposition(entry, o));
    }
    if all || check == CheckKind::Spectral {
        timed("spectral", &mut |o| check_spectral(entry, o));
    }
    if all || check == CheckKind::Restriction {
        timed("restriction", &mut |o| check_restriction(entry, o));
    }
    if all || check == CheckKind::C17 {
        timed("c17", &mut |o| c17_for(entry, catalog, o));
    }
    let mut rep = finish(entry.name().to_string(), check, checks, entry.expected_failure(), start);
    rep.timings_ms.extend(timings);
    rep
}

/// Verifies every entry in parallel; reports come back in catalog order.
pub fn verify_catalog(catalog: &Catalog, check: CheckKind) -> Vec<VerificationReport> {
    catalog.entries.par_iter().map(|e| verify(e, check, catalog)).collect()
}
