//! Command-line front end.
//!
//! Exit codes: 0 for answers (including "not split" and "not best"),
//! 1 for documents that parse but violate an invariant or axiom, and for
//! failed operations, 2 for unreadable or malformed input.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::config::{
    build_from_filtration, build_from_subobjects, extract_subobjects, kappa, quotient_configuration,
    subconfiguration, substitute, validate_config, Configuration,
};
use crate::doc::{self, DocError, Document};
use crate::exactla::FieldSpec;
use crate::improve::{
    best_search, enumerate_improvements_capped, is_best, one_step_improve, parameter_basis, split_pair_test,
    ImproveError, ImprovementStep, MAX_IMPROVEMENTS,
};
use crate::poset::{FinitePoset, GluingSpec, Subset};
use crate::quivercat::{hom_space, jh_poset};

#[derive(Debug, Parser)]
#[command(name = "configcalc", version, about = "Configurations of quiver representations over prime fields")]
pub struct Cli {
    /// Prime used for documents that omit "field".
    #[arg(long, global = true, value_name = "P")]
    pub field: Option<u64>,
    /// Write the report to PATH instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Bound on the number of improvements `enumerate` will produce.
    #[arg(long, global = true, value_name = "N", default_value_t = MAX_IMPROVEMENTS)]
    pub max_enum: u64,
    /// Reserved; every algorithm is deterministic.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a poset and list its s-, q- and f-sets, covering pairs and linear extensions.
    Poset { file: PathBuf },
    /// Validate a representation and report its dimension vector and nilpotency.
    Rep { file: PathBuf },
    /// A basis of Hom(X, Y).
    Hom { x: PathBuf, y: PathBuf },
    /// The Jordan–Hölder poset of a multiplicity-free representation.
    Jh { x: PathBuf },
    /// Build a configuration from a subobject family or a filtration.
    Build { family: PathBuf },
    /// Check the configuration axioms.
    Validate { config: PathBuf },
    /// The subobject family of a configuration.
    Extract { config: PathBuf },
    /// Dimension vectors of the one-element factors.
    Kappa { config: PathBuf },
    /// Subconfiguration on an f-set, given as comma-separated labels.
    Sub { config: PathBuf, j: String },
    /// Quotient configuration along a poset map document.
    Quot { config: PathBuf, phi: PathBuf },
    /// Glue INNER into OUTER along a gluing document.
    Substitute {
        outer: PathBuf,
        inner: PathBuf,
        spec: PathBuf,
        alpha: Option<PathBuf>,
    },
    /// Test whether the sequence at the covering pair (I, J) splits.
    Split { config: PathBuf, i: String, j: String },
    /// Improve at the covering pair (I, J) with the given Hom coordinates.
    Improve {
        config: PathBuf,
        i: String,
        j: String,
        param: Option<String>,
    },
    /// All improvements at the covering pair (I, J).
    Enumerate { config: PathBuf, i: String, j: String },
    /// Greedy search for a best improvement.
    Best { config: PathBuf },
}

/// What a run produced: the exit code, the report and a diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(String),
    Semantic(String),
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Invariant(_) => Failure::Semantic(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

macro_rules! semantic_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Semantic(e.to_string())
            }
        }
    )*};
}
semantic_from!(
    crate::config::ConfigError,
    ImproveError,
    crate::quivercat::CategoryError,
    crate::poset::PosetError
);

type Res<T> = Result<T, Failure>;

/// Run a parsed command line. The report is returned, not printed.
pub fn run(cli: &Cli) -> Outcome {
    let (code, body, err) = match dispatch(cli) {
        Ok((code, v)) => (code, doc::to_text(&v), String::new()),
        Err(Failure::Input(m)) => (2, String::new(), m),
        Err(Failure::Semantic(m)) => (1, String::new(), m),
    };
    if let (Some(path), false) = (&cli.out, body.is_empty()) {
        if let Err(e) = std::fs::write(path, &body) {
            return Outcome { code: 2, stdout: String::new(), stderr: format!("cannot write {}: {e}", path.display()) };
        }
        return Outcome { code, stdout: String::new(), stderr: err };
    }
    Outcome { code, stdout: body, stderr: err }
}

struct Loader {
    field: Option<FieldSpec>,
}

impl Loader {
    fn load(&self, path: &Path) -> Res<Document> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        doc::parse_document(&text, self.field).map_err(|e| match e {
            DocError::Syntax { line, column, message } => Failure::Input(format!(
                "{}:{line}:{column}: ParseError: {message}",
                path.display()
            )),
            other => Failure::from(other).prefixed(path),
        })
    }

    fn expect(&self, path: &Path, kind: &str) -> Res<Document> {
        let d = self.load(path)?;
        if d.kind() != kind {
            return Err(Failure::Input(format!(
                "{}: expected a {kind} document, found {}",
                path.display(),
                d.kind()
            )));
        }
        Ok(d)
    }

    fn rep(&self, path: &Path) -> Res<Arc<crate::quivercat::Rep>> {
        match self.expect(path, "rep")? {
            Document::Rep(x) => Ok(Arc::new(x)),
            _ => unreachable!(),
        }
    }

    /// A configuration that also satisfies the axioms.
    fn config(&self, path: &Path) -> Res<Configuration> {
        let Document::Configuration(c) = self.expect(path, "configuration")? else { unreachable!() };
        if let Some(v) = validate_config(&c).first() {
            return Err(Failure::Semantic(format!(
                "{}: configuration violates axiom {}",
                path.display(),
                v.describe(c.poset())
            )));
        }
        Ok(c)
    }
}

impl Failure {
    fn prefixed(self, path: &Path) -> Self {
        match self {
            Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
            Failure::Semantic(m) => Failure::Semantic(format!("{}: {m}", path.display())),
        }
    }
}

fn element(p: &FinitePoset, label: &str) -> Res<usize> {
    p.index_of(label)
        .ok_or_else(|| Failure::Semantic(format!("UnknownElement: {label}")))
}

fn label_list(arg: &str) -> Res<Vec<String>> {
    let arg = arg.trim();
    if arg.starts_with('[') {
        return serde_json::from_str(arg).map_err(|e| Failure::Input(format!("bad label list {arg:?}: {e}")));
    }
    Ok(arg.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
}

fn int_list(arg: &str) -> Res<Vec<u32>> {
    let arg = arg.trim().trim_start_matches('[').trim_end_matches(']');
    arg.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u32>().map_err(|_| Failure::Input(format!("bad parameter entry {s:?}"))))
        .collect()
}

fn sets_value(p: &FinitePoset, sets: &[Subset]) -> Value {
    Value::Array(sets.iter().map(|&s| doc::subset_value(p, s)).collect())
}

fn pair_value(p: &FinitePoset, (i, j): (usize, usize)) -> Value {
    json!([p.label(i), p.label(j)])
}

fn step_value(step: &ImprovementStep, coarse: &FinitePoset) -> Value {
    json!({
        "pair": pair_value(coarse, step.pair),
        "parameter": step.parameter,
        "result": doc::config_value(&step.result),
    })
}

fn dispatch(cli: &Cli) -> Res<(i32, Value)> {
    let field = match cli.field {
        Some(p) => Some(FieldSpec::new(p).map_err(|e| Failure::Input(format!("--field: {e}")))?),
        None => None,
    };
    let ld = Loader { field };
    match &cli.command {
        Command::Poset { file } => {
            let Document::Poset(p) = ld.expect(file, "poset")? else { unreachable!() };
            let extensions = match p.count_linear_extensions() {
                Ok(n) => json!(n),
                Err(e) => json!(e.to_string()),
            };
            let covering: Vec<Value> = p.covering_pairs().into_iter().map(|c| pair_value(&p, c)).collect();
            Ok((
                0,
                json!({
                    "kind": "poset_report",
                    "elements": p.labels(),
                    "leq": doc::leq_value(&p),
                    "ssets": sets_value(&p, &p.ssets()),
                    "qsets": sets_value(&p, &p.qsets()),
                    "fsets": sets_value(&p, &p.fsets()),
                    "covering_pairs": covering,
                    "linear_extensions": extensions,
                    "total": p.is_total(),
                }),
            ))
        }
        Command::Rep { file } => {
            let x = ld.rep(file)?;
            let dims: Map<String, Value> =
                x.quiver().vertices().iter().zip(x.dims()).map(|(v, d)| (v.clone(), json!(d))).collect();
            Ok((
                0,
                json!({
                    "kind": "rep_report",
                    "valid": true,
                    "dims": dims,
                    "total_dim": x.total_dim(),
                    "nilpotent": x.is_nilpotent(),
                }),
            ))
        }
        Command::Hom { x, y } => {
            let (x, y) = (ld.rep(x)?, ld.rep(y)?);
            let basis = hom_space(&x, &y)?;
            let basis: Vec<Value> = basis.iter().map(doc::mor_mats_value).collect();
            Ok((0, json!({"kind": "hom_report", "dim": basis.len(), "basis": basis})))
        }
        Command::Jh { x } => {
            let x = ld.rep(x)?;
            let jh = jh_poset(&x)?;
            let p = &jh.poset;
            let subobjects: Map<String, Value> = jh
                .sset_table
                .iter()
                .map(|(&s, sub)| {
                    let bases: Map<String, Value> = x
                        .quiver()
                        .vertices()
                        .iter()
                        .zip(sub.bases())
                        .map(|(v, m)| (v.clone(), doc::matrix_value(m)))
                        .collect();
                    (doc::subset_key(p, s), Value::Object(bases))
                })
                .collect();
            Ok((
                0,
                json!({
                    "kind": "jh_report",
                    "elements": p.labels(),
                    "leq": doc::leq_value(p),
                    "composition_series": p.count_linear_extensions()?,
                    "subobjects": subobjects,
                }),
            ))
        }
        Command::Build { family } => {
            let c = match ld.load(family)? {
                Document::Family(f) => build_from_subobjects(&f)?,
                Document::Filtration(x, chain) => build_from_filtration(&x, &chain)?,
                other => {
                    return Err(Failure::Input(format!(
                        "{}: expected a family or filtration document, found {}",
                        family.display(),
                        other.kind()
                    )))
                }
            };
            Ok((0, doc::config_value(&c)))
        }
        Command::Validate { config } => {
            let Document::Configuration(c) = ld.expect(config, "configuration")? else { unreachable!() };
            let violations = validate_config(&c);
            let list: Vec<Value> = violations
                .iter()
                .map(|v| {
                    json!({
                        "axiom": v.axiom,
                        "sets": sets_value(c.poset(), &v.sets),
                        "detail": v.detail,
                    })
                })
                .collect();
            let status = if list.is_empty() { "valid" } else { "invalid" };
            let code = if list.is_empty() { 0 } else { 1 };
            Ok((code, json!({"kind": "validation", "status": status, "violations": list})))
        }
        Command::Extract { config } => {
            let c = ld.config(config)?;
            Ok((0, doc::family_value(&extract_subobjects(&c)?)))
        }
        Command::Kappa { config } => {
            let c = ld.config(config)?;
            let k = kappa(&c)?;
            let q = c.quiver();
            let table: Map<String, Value> = c
                .poset()
                .labels()
                .iter()
                .zip(&k)
                .map(|(l, dims)| {
                    let d: Map<String, Value> = q.vertices().iter().zip(dims).map(|(v, n)| (v.clone(), json!(n))).collect();
                    (l.clone(), Value::Object(d))
                })
                .collect();
            Ok((0, json!({"kind": "kappa", "kappa": table})))
        }
        Command::Sub { config, j } => {
            let c = ld.config(config)?;
            let j = c.poset().subset_from_labels(&label_list(j)?)?;
            Ok((0, doc::config_value(&subconfiguration(&c, j)?)))
        }
        Command::Quot { config, phi } => {
            let c = ld.config(config)?;
            let Document::PosetMap(m) = ld.expect(phi, "poset_map")? else { unreachable!() };
            let map = c
                .poset()
                .labels()
                .iter()
                .map(|l| {
                    let t = m
                        .map
                        .get(l)
                        .ok_or_else(|| Failure::Semantic(format!("poset map misses element {l}")))?;
                    element(&m.target, t)
                })
                .collect::<Res<Vec<usize>>>()?;
            Ok((0, doc::config_value(&quotient_configuration(&c, &m.target, &map)?)))
        }
        Command::Substitute { outer, inner, spec, alpha } => {
            let outer = ld.config(outer)?;
            let inner = ld.config(inner)?;
            let Document::Gluing(g) = ld.expect(spec, "gluing")? else { unreachable!() };
            let (kp, jp) = (outer.poset(), inner.poset());
            let glue_fset = kp.subset_from_labels(&g.glue_fset)?;
            let psi = jp
                .labels()
                .iter()
                .map(|l| {
                    let t = g.psi.get(l).ok_or_else(|| Failure::Semantic(format!("psi misses element {l}")))?;
                    element(kp, t)
                })
                .collect::<Res<Vec<usize>>>()?;
            let gspec = GluingSpec {
                sub_poset: jp.clone(),
                ambient_poset: kp.clone(),
                glue_fset,
                psi: psi.clone(),
            };
            let alpha = match alpha {
                None => None,
                Some(path) => {
                    let Document::ConfigMorphism(a) = ld.expect(path, "config_morphism")? else { unreachable!() };
                    let (lp, lmap) = kp.restrict(glue_fset);
                    let psi_l: Vec<usize> = psi
                        .iter()
                        .map(|k| lmap.iter().position(|x| x == k))
                        .collect::<Option<_>>()
                        .ok_or_else(|| Failure::Semantic("InvalidGluing: psi leaves the glued f-set".into()))?;
                    let check = Arc::new(subconfiguration(&outer, glue_fset)?);
                    let hat = Arc::new(quotient_configuration(&inner, &lp, &psi_l)?);
                    Some(doc::resolve_alpha(&a, check, hat).map_err(|e| Failure::from(e).prefixed(path))?)
                }
            };
            let s = substitute(&outer, &inner, &gspec, alpha.as_ref())?;
            let rp = s.result.poset();
            let phi: Map<String, Value> =
                rp.labels().iter().zip(&s.phi).map(|(l, &k)| (l.clone(), json!(kp.label(k)))).collect();
            Ok((
                0,
                json!({
                    "kind": "substitution",
                    "result": doc::config_value(&s.result),
                    "phi": phi,
                    "inner_set": doc::subset_value(rp, s.inner_set),
                    "sub_witness": doc::alpha_value(&s.sub_witness),
                    "quot_witness": doc::alpha_value(&s.quot_witness),
                }),
            ))
        }
        Command::Split { config, i, j } => {
            let c = ld.config(config)?;
            let p = c.poset();
            let pair = (element(p, i)?, element(p, j)?);
            let r = split_pair_test(&c, pair.0, pair.1)?;
            Ok((
                0,
                json!({
                    "kind": "split_report",
                    "pair": pair_value(p, pair),
                    "split": r.split,
                    "retraction": r.retraction.as_ref().map(doc::mor_mats_value),
                }),
            ))
        }
        Command::Improve { config, i, j, param } => {
            let c = ld.config(config)?;
            let p = c.poset();
            let pair = (element(p, i)?, element(p, j)?);
            let param = match param {
                Some(s) => int_list(s)?,
                None => vec![0; parameter_basis(&c, pair.0, pair.1)?.len()],
            };
            match one_step_improve(&c, pair.0, pair.1, &param) {
                Ok(step) => {
                    let mut v = step_value(&step, p);
                    let o = v.as_object_mut().unwrap();
                    o.insert("kind".into(), json!("improvement"));
                    o.insert("split".into(), json!(true));
                    Ok((0, v))
                }
                Err(ImproveError::NotSplit(..)) => Ok((
                    0,
                    json!({"kind": "improvement", "pair": pair_value(p, pair), "split": false}),
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Enumerate { config, i, j } => {
            let c = ld.config(config)?;
            let p = c.poset();
            let pair = (element(p, i)?, element(p, j)?);
            let steps = enumerate_improvements_capped(&c, pair.0, pair.1, cli.max_enum)?;
            let list: Vec<Value> = steps.iter().map(|s| step_value(s, p)).collect();
            Ok((
                0,
                json!({
                    "kind": "improvements",
                    "pair": pair_value(p, pair),
                    "hom_dim": parameter_basis(&c, pair.0, pair.1)?.len(),
                    "count": list.len(),
                    "improvements": list,
                }),
            ))
        }
        Command::Best { config } => {
            let c = ld.config(config)?;
            let found = best_search(&c)?;
            let mut coarse = c.poset().clone();
            let mut trail = Vec::new();
            for step in &found.trail {
                trail.push(step_value(step, &coarse));
                coarse = step.result.poset().clone();
            }
            Ok((
                0,
                json!({
                    "kind": "best_search",
                    "input_is_best": is_best(&c)?,
                    "steps": trail.len(),
                    "trail": trail,
                    "best": doc::config_value(&found.best),
                }),
            ))
        }
    }
}
