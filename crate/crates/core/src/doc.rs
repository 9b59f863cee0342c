//! JSON documents for posets, quivers, representations, configurations and
//! the auxiliary inputs of the command-line tool.
//!
//! Every top-level document carries a `"kind"` field. Subsets are sorted
//! label lists; as map keys they are written as compact JSON, e.g.
//! `["v1","v2"]`, and pairs of subsets as `[["v2"],["v1","v2"]]`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{ConfigMorphism, Configuration, SubobjectFamily};
use crate::exactla::{FieldSpec, Matrix};
use crate::poset::{FinitePoset, Subset};
use crate::quivercat::{Arrow, Quiver, Rep, RepMor, SubobjectCF};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocError {
    #[error("ParseError at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("ParseError: {0}")]
    Schema(String),
    #[error("InvariantError: {0}")]
    Invariant(String),
}

impl DocError {
    fn invariant(e: impl std::fmt::Display) -> Self {
        DocError::Invariant(e.to_string())
    }
}

type Result<T> = std::result::Result<T, DocError>;

/// Raw gluing data; the two posets come from the inner and outer
/// configurations it is used with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingDoc {
    pub glue_fset: Vec<String>,
    pub psi: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetMapDoc {
    pub target: FinitePoset,
    pub map: BTreeMap<String, String>,
}

/// Components of a configuration morphism, resolved against its endpoints
/// by [`resolve_alpha`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaDoc {
    pub alphas: BTreeMap<Vec<String>, Value>,
}

#[derive(Debug, Clone)]
pub enum Document {
    Poset(FinitePoset),
    Quiver(Quiver),
    Rep(Rep),
    Morphism(RepMor),
    Configuration(Configuration),
    Family(SubobjectFamily),
    Filtration(Arc<Rep>, Vec<SubobjectCF>),
    Gluing(GluingDoc),
    PosetMap(PosetMapDoc),
    ConfigMorphism(AlphaDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Poset(_) => "poset",
            Document::Quiver(_) => "quiver",
            Document::Rep(_) => "rep",
            Document::Morphism(_) => "morphism",
            Document::Configuration(_) => "configuration",
            Document::Family(_) => "family",
            Document::Filtration(..) => "filtration",
            Document::Gluing(_) => "gluing",
            Document::PosetMap(_) => "poset_map",
            Document::ConfigMorphism(_) => "config_morphism",
        }
    }
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| DocError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parse a document; `field` is used where a document omits `"field"`.
pub fn parse_document(text: &str, field: Option<FieldSpec>) -> Result<Document> {
    let v = parse_json(text)?;
    let kind = str_of(get(&v, "kind", "")?, "kind")?;
    Ok(match kind {
        "poset" => Document::Poset(parse_poset(&v)?),
        "quiver" => Document::Quiver(parse_quiver(&v)?),
        "rep" => Document::Rep(parse_rep(&v, field)?),
        "morphism" => Document::Morphism(parse_morphism(&v, field)?),
        "configuration" => Document::Configuration(parse_configuration(&v, field)?),
        "family" => Document::Family(parse_family(&v, field)?),
        "filtration" => {
            let (x, chain) = parse_filtration(&v, field)?;
            Document::Filtration(x, chain)
        }
        "gluing" => Document::Gluing(parse_gluing(&v)?),
        "poset_map" => Document::PosetMap(parse_poset_map(&v)?),
        "config_morphism" => Document::ConfigMorphism(parse_alpha(&v)?),
        other => return Err(DocError::Schema(format!("unknown kind {other:?}"))),
    })
}

// ---- value access ----

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn get<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| DocError::Schema(format!("missing field {}", join(path, key))))
}

fn str_of<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| DocError::Schema(format!("{path}: expected a string")))
}

fn arr_of<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| DocError::Schema(format!("{path}: expected a list")))
}

fn obj_of<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| DocError::Schema(format!("{path}: expected an object")))
}

fn int_of(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| DocError::Schema(format!("{path}: expected an integer")))
}

fn usize_of(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| DocError::Schema(format!("{path}: expected a non-negative integer")))
}

fn strings(v: &Value, path: &str) -> Result<Vec<String>> {
    arr_of(v, path)?
        .iter()
        .enumerate()
        .map(|(i, s)| str_of(s, &format!("{path}[{i}]")).map(str::to_string))
        .collect()
}

fn string_map(v: &Value, path: &str) -> Result<BTreeMap<String, String>> {
    obj_of(v, path)?
        .iter()
        .map(|(k, s)| Ok((k.clone(), str_of(s, &join(path, k))?.to_string())))
        .collect()
}

// ---- posets and subsets ----

pub fn parse_poset(v: &Value) -> Result<FinitePoset> {
    let elements = strings(get(v, "elements", "poset")?, "elements")?;
    let mut pairs = Vec::new();
    if let Some(rel) = v.get("relations") {
        for (i, r) in arr_of(rel, "relations")?.iter().enumerate() {
            let p = strings(r, &format!("relations[{i}]"))?;
            if p.len() != 2 {
                return Err(DocError::Schema(format!("relations[{i}]: expected two labels")));
            }
            pairs.push((p[0].clone(), p[1].clone()));
        }
    }
    FinitePoset::new(&elements, &pairs).map_err(DocError::invariant)
}

pub fn poset_value(p: &FinitePoset) -> Value {
    let rel: Vec<Value> = p
        .relation_pairs()
        .into_iter()
        .filter(|(a, b)| a != b)
        .map(|(a, b)| json!([p.label(a), p.label(b)]))
        .collect();
    json!({"kind": "poset", "elements": p.labels(), "relations": rel})
}

/// All pairs `[a, b]` with `a ⪯ b`, reflexive ones included.
pub fn leq_value(p: &FinitePoset) -> Value {
    Value::Array(
        p.relation_pairs()
            .into_iter()
            .map(|(a, b)| json!([p.label(a), p.label(b)]))
            .collect(),
    )
}

pub fn subset_value(p: &FinitePoset, s: Subset) -> Value {
    json!(p.subset_labels(s))
}

pub fn subset_key(p: &FinitePoset, s: Subset) -> String {
    subset_value(p, s).to_string()
}

pub fn pair_key(p: &FinitePoset, a: Subset, b: Subset) -> String {
    json!([subset_value(p, a), subset_value(p, b)]).to_string()
}

pub fn parse_subset(p: &FinitePoset, v: &Value, path: &str) -> Result<Subset> {
    let labels = strings(v, path)?;
    p.subset_from_labels(&labels).map_err(DocError::invariant)
}

fn parse_subset_key(p: &FinitePoset, key: &str) -> Result<Subset> {
    let v = serde_json::from_str(key).map_err(|_| DocError::Schema(format!("bad subset key {key:?}")))?;
    parse_subset(p, &v, key)
}

fn parse_pair_key(p: &FinitePoset, key: &str) -> Result<(Subset, Subset)> {
    let v: Value = serde_json::from_str(key).map_err(|_| DocError::Schema(format!("bad pair key {key:?}")))?;
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((parse_subset(p, a, key)?, parse_subset(p, b, key)?)),
        _ => Err(DocError::Schema(format!("bad pair key {key:?}"))),
    }
}

// ---- fields, matrices, quivers, reps ----

pub fn field_value(f: FieldSpec) -> Value {
    json!({"p": f.modulus()})
}

fn parse_field(v: &Value, default: Option<FieldSpec>) -> Result<FieldSpec> {
    match v.get("field") {
        Some(f) => {
            let p = int_of(get(f, "p", "field")?, "field.p")?;
            let p = u64::try_from(p).map_err(|_| DocError::Invariant(format!("NotPrime: {p}")))?;
            FieldSpec::new(p).map_err(DocError::invariant)
        }
        None => default.ok_or_else(|| DocError::Schema("missing field \"field\"".into())),
    }
}

pub fn matrix_value(m: &Matrix) -> Value {
    json!(m.to_rows())
}

/// A matrix given as a list of rows, with the expected shape.
fn parse_matrix(v: &Value, field: FieldSpec, rows: usize, cols: Option<usize>, path: &str) -> Result<Matrix> {
    let list = arr_of(v, path)?;
    if list.len() != rows {
        return Err(DocError::Invariant(format!("ShapeMismatch: {path} has {} rows, expected {rows}", list.len())));
    }
    let mut entries = Vec::with_capacity(rows);
    for (i, r) in list.iter().enumerate() {
        let row: Vec<i64> = arr_of(r, &format!("{path}[{i}]"))?
            .iter()
            .enumerate()
            .map(|(j, x)| int_of(x, &format!("{path}[{i}][{j}]")))
            .collect::<Result<_>>()?;
        entries.push(row);
    }
    let cols = cols.unwrap_or_else(|| entries.first().map_or(0, Vec::len));
    if let Some(bad) = entries.iter().position(|r| r.len() != cols) {
        return Err(DocError::Invariant(format!("ShapeMismatch: {path}[{bad}] has the wrong length, expected {cols}")));
    }
    Matrix::from_rows(field, rows, cols, &entries).map_err(DocError::invariant)
}

pub fn quiver_value(q: &Quiver) -> Value {
    let arrows: Vec<Value> = q
        .arrows()
        .iter()
        .map(|a| json!({"name": a.name, "from": q.vertices()[a.from], "to": q.vertices()[a.to]}))
        .collect();
    let relations: Vec<Value> = q
        .relations()
        .iter()
        .map(|rel| {
            Value::Array(
                rel.iter()
                    .map(|t| {
                        let path: Vec<&str> = t.path.iter().map(|&a| q.arrows()[a].name.as_str()).collect();
                        json!({"coef": t.coef, "path": path})
                    })
                    .collect(),
            )
        })
        .collect();
    json!({"vertices": q.vertices(), "arrows": arrows, "relations": relations})
}

pub fn parse_quiver(v: &Value) -> Result<Quiver> {
    let vertices = strings(get(v, "vertices", "quiver")?, "quiver.vertices")?;
    let mut arrows = Vec::new();
    if let Some(a) = v.get("arrows") {
        for (i, a) in arr_of(a, "quiver.arrows")?.iter().enumerate() {
            let path = format!("quiver.arrows[{i}]");
            let field = |k: &str| -> Result<String> { Ok(str_of(get(a, k, &path)?, &join(&path, k))?.to_string()) };
            arrows.push((field("name")?, field("from")?, field("to")?));
        }
    }
    let mut relations = Vec::new();
    if let Some(r) = v.get("relations") {
        for (i, rel) in arr_of(r, "quiver.relations")?.iter().enumerate() {
            let mut terms = Vec::new();
            for (k, t) in arr_of(rel, &format!("quiver.relations[{i}]"))?.iter().enumerate() {
                let path = format!("quiver.relations[{i}][{k}]");
                let coef = int_of(get(t, "coef", &path)?, &join(&path, "coef"))?;
                let p = strings(get(t, "path", &path)?, &join(&path, "path"))?;
                terms.push((coef, p));
            }
            relations.push(terms);
        }
    }
    Quiver::new(&vertices, &arrows, &relations).map_err(DocError::invariant)
}

fn quiver_of(v: &Value) -> Result<Quiver> {
    parse_quiver(get(v, "quiver", "")?)
}

/// `{"dims": ..., "mats": ...}` over a known quiver and field.
pub fn rep_body_value(x: &Rep) -> Value {
    let q = x.quiver();
    let dims: Map<String, Value> = q.vertices().iter().zip(x.dims()).map(|(v, d)| (v.clone(), json!(d))).collect();
    let mats: Map<String, Value> = q
        .arrows()
        .iter()
        .zip(x.mats())
        .map(|(a, m)| (a.name.clone(), matrix_value(m)))
        .collect();
    json!({"dims": dims, "mats": mats})
}

fn parse_rep_body(v: &Value, quiver: &Arc<Quiver>, field: FieldSpec, path: &str) -> Result<Rep> {
    let dims_v = obj_of(get(v, "dims", path)?, &join(path, "dims"))?;
    let mut dims = Vec::new();
    for vert in quiver.vertices() {
        let d = dims_v
            .get(vert)
            .ok_or_else(|| DocError::Schema(format!("{}: missing vertex {vert}", join(path, "dims"))))?;
        dims.push(usize_of(d, &join(&join(path, "dims"), vert))?);
    }
    if let Some(extra) = dims_v.keys().find(|k| quiver.vertex_index(k).is_none()) {
        return Err(DocError::Invariant(format!("{}: unknown vertex {extra}", join(path, "dims"))));
    }
    let empty = Map::new();
    let mats_v = match v.get("mats") {
        Some(m) => obj_of(m, &join(path, "mats"))?,
        None => &empty,
    };
    if let Some(extra) = mats_v.keys().find(|k| quiver.arrow_index(k).is_none()) {
        return Err(DocError::Invariant(format!("{}: unknown arrow {extra}", join(path, "mats"))));
    }
    let mut mats = Vec::new();
    for Arrow { name, from, to } in quiver.arrows() {
        let (r, c) = (dims[*to], dims[*from]);
        let m = match mats_v.get(name) {
            Some(m) => parse_matrix(m, field, r, Some(c), &join(&join(path, "mats"), name))?,
            None if r == 0 || c == 0 => Matrix::zeros(field, r, c),
            None => return Err(DocError::Schema(format!("{}: missing arrow {name}", join(path, "mats")))),
        };
        mats.push(m);
    }
    Rep::new(quiver.clone(), field, dims, mats).map_err(DocError::invariant)
}

pub fn rep_value(x: &Rep) -> Value {
    let mut v = rep_body_value(x);
    let o = v.as_object_mut().unwrap();
    o.insert("kind".into(), json!("rep"));
    o.insert("quiver".into(), quiver_value(x.quiver()));
    o.insert("field".into(), field_value(x.field()));
    v
}

pub fn parse_rep(v: &Value, field: Option<FieldSpec>) -> Result<Rep> {
    let q = Arc::new(quiver_of(v)?);
    let f = parse_field(v, field)?;
    parse_rep_body(v, &q, f, "")
}

/// Per-vertex matrices of a morphism, keyed by vertex label.
pub fn mor_mats_value(m: &RepMor) -> Value {
    let q = m.source().quiver();
    Value::Object(
        q.vertices()
            .iter()
            .zip(m.mats())
            .map(|(v, a)| (v.clone(), matrix_value(a)))
            .collect(),
    )
}

fn parse_mor_mats(v: &Value, source: &Arc<Rep>, target: &Arc<Rep>, path: &str) -> Result<RepMor> {
    let o = obj_of(v, path)?;
    let q = source.quiver();
    if let Some(extra) = o.keys().find(|k| q.vertex_index(k).is_none()) {
        return Err(DocError::Invariant(format!("{path}: unknown vertex {extra}")));
    }
    let mut mats = Vec::new();
    for (i, vert) in q.vertices().iter().enumerate() {
        let (r, c) = (target.dim(i), source.dim(i));
        let m = match o.get(vert) {
            Some(m) => parse_matrix(m, source.field(), r, Some(c), &join(path, vert))?,
            None if r == 0 || c == 0 => Matrix::zeros(source.field(), r, c),
            None => return Err(DocError::Schema(format!("{path}: missing vertex {vert}"))),
        };
        mats.push(m);
    }
    RepMor::new(source.clone(), target.clone(), mats).map_err(|e| DocError::Invariant(format!("{path}: {e}")))
}

pub fn morphism_value(m: &RepMor) -> Value {
    let strip = |x: &Rep| {
        let mut v = rep_value(x);
        v.as_object_mut().unwrap().remove("kind");
        v
    };
    json!({
        "kind": "morphism",
        "source": strip(m.source()),
        "target": strip(m.target()),
        "mats": mor_mats_value(m),
    })
}

pub fn parse_morphism(v: &Value, field: Option<FieldSpec>) -> Result<RepMor> {
    let s = Arc::new(parse_rep(get(v, "source", "")?, field)?);
    let t = Arc::new(parse_rep(get(v, "target", "")?, field)?);
    if s.quiver() != t.quiver() {
        return Err(DocError::Invariant("QuiverMismatch: source and target".into()));
    }
    parse_mor_mats(get(v, "mats", "")?, &s, &t, "mats")
}

// ---- configurations ----

/// Configuration document with shared rep definitions under `"reps"`.
pub fn config_value(c: &Configuration) -> Value {
    let p = c.poset();
    let mut shared: Vec<(Arc<Rep>, String)> = Vec::new();
    let mut objects = Map::new();
    for (&a, r) in c.objects() {
        let name = match shared.iter().find(|(x, _)| x == r) {
            Some((_, n)) => n.clone(),
            None => {
                let n = format!("r{}", shared.len());
                shared.push((r.clone(), n.clone()));
                n
            }
        };
        objects.insert(subset_key(p, a), json!(name));
    }
    let reps: Map<String, Value> = shared.iter().map(|(r, n)| (n.clone(), rep_body_value(r))).collect();
    let table = |t: &BTreeMap<(Subset, Subset), RepMor>| -> Value {
        Value::Object(t.iter().map(|(&(a, b), m)| (pair_key(p, a, b), mor_mats_value(m))).collect())
    };
    json!({
        "kind": "configuration",
        "quiver": quiver_value(c.quiver()),
        "field": field_value(c.field()),
        "poset": strip_kind(poset_value(p)),
        "reps": reps,
        "objects": objects,
        "iotas": table(c.iotas()),
        "pis": table(c.pis()),
    })
}

fn strip_kind(mut v: Value) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("kind");
    }
    v
}

pub fn parse_configuration(v: &Value, field: Option<FieldSpec>) -> Result<Configuration> {
    let q = Arc::new(quiver_of(v)?);
    let f = parse_field(v, field)?;
    let p = parse_poset(get(v, "poset", "")?)?;
    let mut reps = BTreeMap::new();
    if let Some(r) = v.get("reps") {
        for (name, body) in obj_of(r, "reps")? {
            reps.insert(name.clone(), Arc::new(parse_rep_body(body, &q, f, &join("reps", name))?));
        }
    }
    let mut objects = BTreeMap::new();
    for (key, o) in obj_of(get(v, "objects", "")?, "objects")? {
        let a = parse_subset_key(&p, key)?;
        let path = join("objects", key);
        let rep = match o {
            Value::String(name) => reps
                .get(name)
                .cloned()
                .ok_or_else(|| DocError::Invariant(format!("{path}: unknown rep {name:?}")))?,
            _ => Arc::new(parse_rep_body(o, &q, f, &path)?),
        };
        objects.insert(a, rep);
    }
    let table = |name: &str| -> Result<BTreeMap<(Subset, Subset), RepMor>> {
        let mut out = BTreeMap::new();
        for (key, m) in obj_of(get(v, name, "")?, name)? {
            let (a, b) = parse_pair_key(&p, key)?;
            let path = join(name, key);
            let (Some(s), Some(t)) = (objects.get(&a), objects.get(&b)) else {
                return Err(DocError::Invariant(format!("UnexpectedEntry: {path} refers to a missing object")));
            };
            out.insert((a, b), parse_mor_mats(m, s, t, &path)?);
        }
        Ok(out)
    };
    let iotas = table("iotas")?;
    let pis = table("pis")?;
    Configuration::new(p, objects, iotas, pis).map_err(DocError::invariant)
}

/// A subobject given by per-vertex spanning columns.
fn parse_subobject(v: &Value, x: &Arc<Rep>, path: &str) -> Result<SubobjectCF> {
    let o = obj_of(v, path)?;
    let q = x.quiver();
    if let Some(extra) = o.keys().find(|k| q.vertex_index(k).is_none()) {
        return Err(DocError::Invariant(format!("{path}: unknown vertex {extra}")));
    }
    let mut spans = Vec::new();
    for (i, vert) in q.vertices().iter().enumerate() {
        let m = match o.get(vert) {
            Some(m) => parse_matrix(m, x.field(), x.dim(i), None, &join(path, vert))?,
            None => Matrix::zeros(x.field(), x.dim(i), 0),
        };
        spans.push(m);
    }
    SubobjectCF::new(x.clone(), spans).map_err(|e| DocError::Invariant(format!("{path}: {e}")))
}

fn subobject_value(s: &SubobjectCF) -> Value {
    let q = s.ambient().quiver();
    Value::Object(
        q.vertices()
            .iter()
            .zip(s.bases())
            .map(|(v, m)| (v.clone(), matrix_value(m)))
            .collect(),
    )
}

pub fn family_value(fam: &SubobjectFamily) -> Value {
    let p = &fam.poset;
    let table: Map<String, Value> =
        fam.table.iter().map(|(&a, s)| (subset_key(p, a), subobject_value(s))).collect();
    json!({
        "kind": "family",
        "ambient": strip_kind(rep_value(&fam.ambient)),
        "poset": strip_kind(poset_value(p)),
        "table": table,
    })
}

pub fn parse_family(v: &Value, field: Option<FieldSpec>) -> Result<SubobjectFamily> {
    let x = Arc::new(parse_rep(get(v, "ambient", "")?, field)?);
    let p = parse_poset(get(v, "poset", "")?)?;
    let mut table = BTreeMap::new();
    for (key, s) in obj_of(get(v, "table", "")?, "table")? {
        let a = parse_subset_key(&p, key)?;
        table.insert(a, parse_subobject(s, &x, &join("table", key))?);
    }
    Ok(SubobjectFamily::new(x, p, table))
}

pub fn parse_filtration(v: &Value, field: Option<FieldSpec>) -> Result<(Arc<Rep>, Vec<SubobjectCF>)> {
    let x = Arc::new(parse_rep(get(v, "ambient", "")?, field)?);
    let chain = arr_of(get(v, "chain", "")?, "chain")?
        .iter()
        .enumerate()
        .map(|(i, s)| parse_subobject(s, &x, &format!("chain[{i}]")))
        .collect::<Result<_>>()?;
    Ok((x, chain))
}

pub fn parse_gluing(v: &Value) -> Result<GluingDoc> {
    Ok(GluingDoc {
        glue_fset: strings(get(v, "glue_fset", "")?, "glue_fset")?,
        psi: string_map(get(v, "psi", "")?, "psi")?,
    })
}

pub fn parse_poset_map(v: &Value) -> Result<PosetMapDoc> {
    Ok(PosetMapDoc {
        target: parse_poset(get(v, "target", "")?)?,
        map: string_map(get(v, "map", "")?, "map")?,
    })
}

pub fn parse_alpha(v: &Value) -> Result<AlphaDoc> {
    let mut alphas = BTreeMap::new();
    for (key, m) in obj_of(get(v, "alphas", "")?, "alphas")? {
        let labels: Vec<String> = serde_json::from_str(key)
            .map_err(|_| DocError::Schema(format!("bad subset key {key:?}")))?;
        alphas.insert(labels, m.clone());
    }
    Ok(AlphaDoc { alphas })
}

/// Read the components of `doc` as maps `source.σ(A) -> target.σ(A)`.
pub fn resolve_alpha(doc: &AlphaDoc, source: Arc<Configuration>, target: Arc<Configuration>) -> Result<ConfigMorphism> {
    let p = source.poset();
    let mut alphas = BTreeMap::new();
    for (labels, m) in &doc.alphas {
        let a = p.subset_from_labels(labels).map_err(DocError::invariant)?;
        if !source.objects().contains_key(&a) {
            return Err(DocError::Invariant(format!("UnexpectedEntry: {labels:?} is not an f-set")));
        }
        let path = format!("alphas.{}", json!(labels));
        alphas.insert(a, parse_mor_mats(m, source.sigma(a), target.sigma(a), &path)?);
    }
    if let Some(&a) = source.objects().keys().find(|a| !alphas.contains_key(a)) {
        return Err(DocError::Invariant(format!("MissingEntry: alphas {}", subset_key(p, a))));
    }
    Ok(ConfigMorphism { source, target, alphas })
}

pub fn alpha_value(m: &ConfigMorphism) -> Value {
    let p = m.source.poset();
    let alphas: Map<String, Value> =
        m.alphas.iter().map(|(&a, f)| (subset_key(p, a), mor_mats_value(f))).collect();
    json!({"kind": "config_morphism", "alphas": alphas})
}

/// Serialize with sorted keys, two-space indentation and a final newline.
/// Lists of scalars and lists of such lists (matrices) stay on one line.
pub fn to_text(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v, 0);
    s.push('\n');
    s
}

fn is_flat(v: &Value) -> bool {
    let scalar = |x: &Value| !(x.is_array() || x.is_object());
    match v {
        Value::Array(a) => a.iter().all(|x| scalar(x) || x.as_array().is_some_and(|r| r.iter().all(scalar))),
        Value::Object(o) => o.is_empty(),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    if is_flat(v) {
        out.push_str(&v.to_string());
        return;
    }
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                out.push_str(if i == 0 { "\n" } else { ",\n" });
                out.push_str(&pad);
                write_value(out, x, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(o) => {
            out.push('{');
            for (i, (k, x)) in o.iter().enumerate() {
                out.push_str(if i == 0 { "\n" } else { ",\n" });
                out.push_str(&pad);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        _ => unreachable!(),
    }
}
