//! JSON instance documents.
//!
//! Rationals are strings (`"3/4"`, `"-2"`), polynomials are term lists with
//! exponent vectors, and set trees nest `and`/`or`/`not` nodes over atoms.
//! Automaton letters are bitmasks over target indices.

use std::collections::BTreeSet;
use std::fmt;

use distill_core::automata::{Acceptance, AutomatonError, MullerAutomaton};
use distill_core::ratlin::{parse_rational, Canonical};
use distill_core::semialg::{MultiPoly, Relation, SemialgebraicSet, SetExpr};
use distill_core::{RatMatrix, Rational};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Markov,
    Lds,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Markov => "markov",
            Kind::Lds => "lds",
        }
    }
}

/// Parse or shape error, located by line and column for JSON syntax errors
/// and by field path otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocError {
    pub path: String,
    pub line: Option<(usize, usize)>,
    pub message: String,
}

impl DocError {
    fn at(path: &str, message: impl Into<String>) -> Self {
        DocError {
            path: path.to_owned(),
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some((line, col)) => write!(f, "line {line}, column {col}: {}", self.message),
            None if self.path.is_empty() => write!(f, "{}", self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

impl std::error::Error for DocError {}

type Result<T> = std::result::Result<T, DocError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDocument {
    pub kind: Kind,
    pub matrix: RatMatrix,
    pub initial: Vec<Rational>,
    pub targets: Vec<SemialgebraicSet>,
    /// Empty when the document has no annotation.
    pub intrinsic_dim: Vec<Option<usize>>,
    pub spec: MullerAutomaton,
}

pub fn rational_string(q: &Rational) -> String {
    Canonical(q).to_string()
}

pub fn rational_value(q: &Rational) -> Value {
    Value::String(rational_string(q))
}

pub fn vector_value(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_value).collect())
}

pub fn matrix_value(m: &RatMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_value(m.row(i))).collect())
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| DocError::at(path, format!("missing field `{name}`")))
}

fn join(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_owned()
    } else {
        format!("{path}.{name}")
    }
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| DocError::at(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| DocError::at(path, "expected an array"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| DocError::at(path, "expected a non-negative integer"))
}

pub fn parse_rational_value(v: &Value, path: &str) -> Result<Rational> {
    let s = v
        .as_str()
        .ok_or_else(|| DocError::at(path, "expected a rational string such as \"3/4\""))?;
    parse_rational(s).map_err(|e| DocError::at(path, e.to_string()))
}

pub fn parse_vector(v: &Value, path: &str) -> Result<Vec<Rational>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| parse_rational_value(x, &index(path, i)))
        .collect()
}

fn parse_matrix(v: &Value, path: &str, cols: Option<usize>) -> Result<RatMatrix> {
    let rows: Vec<Vec<Rational>> = as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vector(r, &index(path, i)))
        .collect::<Result<_>>()?;
    let width = cols.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(DocError::at(
            &index(path, i),
            format!("row has {} entries, expected {width}", rows[i].len()),
        ));
    }
    Ok(RatMatrix::from_rows_with_cols(rows, width))
}

fn parse_poly(v: &Value, path: &str, nvars: usize) -> Result<MultiPoly> {
    let mut terms = Vec::new();
    for (i, t) in as_array(v, path)?.iter().enumerate() {
        let tp = index(path, i);
        let obj = as_object(t, &tp)?;
        let coeff = parse_rational_value(field(obj, &tp, "coeff")?, &join(&tp, "coeff"))?;
        let ep = join(&tp, "exps");
        let exps: Vec<u32> = as_array(field(obj, &tp, "exps")?, &ep)?
            .iter()
            .enumerate()
            .map(|(j, e)| {
                e.as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| DocError::at(&index(&ep, j), "expected a non-negative exponent"))
            })
            .collect::<Result<_>>()?;
        if exps.len() != nvars {
            return Err(DocError::at(&ep, format!("{} exponents, expected {nvars}", exps.len())));
        }
        terms.push((exps, coeff));
    }
    Ok(MultiPoly::from_terms(nvars, terms))
}

fn parse_expr(v: &Value, path: &str, nvars: usize) -> Result<SetExpr> {
    let obj = as_object(v, path)?;
    if let Some(poly) = obj.get("poly") {
        let p = parse_poly(poly, &join(path, "poly"), nvars)?;
        let rp = join(path, "rel");
        let rel = field(obj, path, "rel")?
            .as_str()
            .and_then(Relation::from_symbol)
            .ok_or_else(|| DocError::at(&rp, "expected one of < <= = != >= >"))?;
        return Ok(SetExpr::atom(p, rel));
    }
    let children = |name: &str, list: &Value| -> Result<Vec<SetExpr>> {
        let np = join(path, name);
        match list {
            Value::Array(items) => items
                .iter()
                .enumerate()
                .map(|(i, c)| parse_expr(c, &index(&np, i), nvars))
                .collect(),
            other => Ok(vec![parse_expr(other, &np, nvars)?]),
        }
    };
    if let Some(list) = obj.get("and") {
        return Ok(SetExpr::And(children("and", list)?));
    }
    if let Some(list) = obj.get("or") {
        return Ok(SetExpr::Or(children("or", list)?));
    }
    if let Some(list) = obj.get("not") {
        let mut inner = children("not", list)?;
        if inner.len() != 1 {
            return Err(DocError::at(&join(path, "not"), "`not` takes exactly one operand"));
        }
        return Ok(SetExpr::complement(inner.remove(0)));
    }
    Err(DocError::at(
        path,
        "expected an atom (`poly`, `rel`) or an `and`/`or`/`not` node",
    ))
}

pub fn parse_target(v: &Value, path: &str, nvars: usize) -> Result<SemialgebraicSet> {
    let expr = parse_expr(v, path, nvars)?;
    let set = SemialgebraicSet::new(nvars, expr).map_err(|e| DocError::at(path, e.to_string()))?;
    match v.get("hull") {
        None | Some(Value::Null) => Ok(set),
        Some(h) => {
            let hp = join(path, "hull");
            let hull = parse_matrix(h, &hp, Some(nvars))?;
            set.with_declared_hull(hull)
                .map_err(|e| DocError::at(&hp, e.to_string()))
        }
    }
}

fn parse_state_sets(v: &Value, path: &str) -> Result<Vec<BTreeSet<usize>>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, set)| {
            let sp = index(path, i);
            as_array(set, &sp)?
                .iter()
                .enumerate()
                .map(|(j, q)| as_usize(q, &index(&sp, j)))
                .collect()
        })
        .collect()
}

fn automaton_error(path: &str, e: AutomatonError) -> DocError {
    DocError::at(path, e.to_string())
}

pub fn parse_spec(v: &Value, path: &str, bits: usize) -> Result<MullerAutomaton> {
    let obj = as_object(v, path)?;
    let states = as_usize(field(obj, path, "states")?, &join(path, "states"))?;
    let initial = as_usize(field(obj, path, "initial")?, &join(path, "initial"))?;
    let dp = join(path, "delta");
    let delta: Vec<Vec<usize>> = as_array(field(obj, path, "delta")?, &dp)?
        .iter()
        .enumerate()
        .map(|(q, row)| {
            let rp = index(&dp, q);
            as_array(row, &rp)?
                .iter()
                .enumerate()
                .map(|(l, t)| as_usize(t, &index(&rp, l)))
                .collect()
        })
        .collect::<Result<_>>()?;
    if delta.len() != states {
        return Err(DocError::at(
            &dp,
            format!("{} rows, but `states` is {states}", delta.len()),
        ));
    }
    let ap = join(path, "acceptance");
    let family: BTreeSet<BTreeSet<usize>> = parse_state_sets(field(obj, path, "acceptance")?, &ap)?
        .into_iter()
        .collect();
    let acceptance = match obj.get("acceptance_traversed") {
        None | Some(Value::Null) => Acceptance::Family(family),
        Some(t) => Acceptance::Traversed {
            family,
            traversed: parse_state_sets(t, &join(path, "acceptance_traversed"))?,
        },
    };
    MullerAutomaton::from_parts(bits, initial, delta, acceptance).map_err(|e| automaton_error(path, e))
}

impl InstanceDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| DocError {
            path: String::new(),
            line: Some((e.line(), e.column())),
            message: e.to_string(),
        })?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = as_object(v, "")?;
        let kind = match field(obj, "", "kind")?.as_str() {
            Some("markov") => Kind::Markov,
            Some("lds") => Kind::Lds,
            _ => return Err(DocError::at("kind", "expected \"markov\" or \"lds\"")),
        };
        let matrix = parse_matrix(field(obj, "", "matrix")?, "matrix", None)?;
        if !matrix.is_square() {
            return Err(DocError::at(
                "matrix",
                format!("{}x{} matrix is not square", matrix.rows(), matrix.cols()),
            ));
        }
        let k = matrix.rows();
        let initial = parse_vector(field(obj, "", "initial")?, "initial")?;
        if initial.len() != k {
            return Err(DocError::at(
                "initial",
                format!("{} entries, expected {k}", initial.len()),
            ));
        }
        let targets: Vec<SemialgebraicSet> = as_array(field(obj, "", "targets")?, "targets")?
            .iter()
            .enumerate()
            .map(|(i, t)| parse_target(t, &index("targets", i), k))
            .collect::<Result<_>>()?;
        let intrinsic_dim = match obj.get("intrinsic_dim") {
            None | Some(Value::Null) => Vec::new(),
            Some(list) => {
                let items = as_array(list, "intrinsic_dim")?;
                if items.len() != targets.len() {
                    return Err(DocError::at(
                        "intrinsic_dim",
                        format!("{} entries for {} targets", items.len(), targets.len()),
                    ));
                }
                items
                    .iter()
                    .enumerate()
                    .map(|(i, d)| match d {
                        Value::Null => Ok(None),
                        d => as_usize(d, &index("intrinsic_dim", i)).map(Some),
                    })
                    .collect::<Result<_>>()?
            }
        };
        let spec = parse_spec(field(obj, "", "spec")?, "spec", targets.len())?;
        Ok(InstanceDocument {
            kind,
            matrix,
            initial,
            targets,
            intrinsic_dim,
            spec,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("kind".into(), self.kind.name().into());
        obj.insert("matrix".into(), matrix_value(&self.matrix));
        obj.insert("initial".into(), vector_value(&self.initial));
        obj.insert(
            "targets".into(),
            Value::Array(self.targets.iter().map(target_value).collect()),
        );
        if !self.intrinsic_dim.is_empty() {
            obj.insert("intrinsic_dim".into(), json!(self.intrinsic_dim));
        }
        obj.insert("spec".into(), spec_value(&self.spec));
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serialisable");
        s.push('\n');
        s
    }

    /// Annotation for target `i`, if any.
    pub fn intrinsic_dims(&self) -> Vec<Option<usize>> {
        if self.intrinsic_dim.is_empty() {
            vec![None; self.targets.len()]
        } else {
            self.intrinsic_dim.clone()
        }
    }
}

fn poly_value(p: &MultiPoly) -> Value {
    Value::Array(
        p.terms()
            .map(|(e, c)| json!({"coeff": rational_string(c), "exps": e}))
            .collect(),
    )
}

fn expr_value(e: &SetExpr) -> Value {
    match e {
        SetExpr::Atom(a) => json!({"poly": poly_value(&a.poly), "rel": a.rel.symbol()}),
        SetExpr::And(cs) => json!({"and": cs.iter().map(expr_value).collect::<Vec<_>>()}),
        SetExpr::Or(cs) => json!({"or": cs.iter().map(expr_value).collect::<Vec<_>>()}),
        SetExpr::Not(c) => json!({"not": [expr_value(c)]}),
    }
}

pub fn target_value(t: &SemialgebraicSet) -> Value {
    let mut v = expr_value(t.expr());
    if let (Some(h), Value::Object(obj)) = (t.declared_hull(), &mut v) {
        obj.insert("hull".into(), matrix_value(h));
    }
    v
}

fn state_sets_value<'a>(sets: impl IntoIterator<Item = &'a BTreeSet<usize>>) -> Value {
    Value::Array(sets.into_iter().map(|s| json!(s)).collect())
}

pub fn spec_value(a: &MullerAutomaton) -> Value {
    let mut obj = Map::new();
    obj.insert("states".into(), a.num_states().into());
    obj.insert("initial".into(), a.initial().into());
    obj.insert("delta".into(), json!(a.delta_rows()));
    match a.acceptance() {
        Acceptance::Family(f) => {
            obj.insert("acceptance".into(), state_sets_value(f));
        }
        Acceptance::Traversed { family, traversed } => {
            obj.insert("acceptance".into(), state_sets_value(family));
            obj.insert("acceptance_traversed".into(), state_sets_value(traversed));
        }
    }
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;

    const M_C: &str = r#"{
        "kind": "markov",
        "matrix": [["3/4", "1/4"], ["1/4", "3/4"]],
        "initial": ["1", "0"],
        "targets": [{"poly": [{"coeff": "1", "exps": [1, 0]}, {"coeff": "-1/3", "exps": [0, 0]}], "rel": ">"}],
        "spec": {"states": 2, "initial": 0, "delta": [[0, 1], [0, 1]], "acceptance": [[1], [0, 1]]}
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let doc = InstanceDocument::parse(M_C).unwrap();
        assert_eq!(doc.kind, Kind::Markov);
        assert_eq!(doc.matrix.rows(), 2);
        assert!(doc.targets[0].member(&[Rational::new(1.into(), 2.into()), Rational::new(1.into(), 2.into())]));
        let again = InstanceDocument::parse(&doc.to_json_string()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = M_C.replace("\"3/4\", \"1/4\"", "\"1/0\", \"1/4\"");
        let e = InstanceDocument::parse(&bad).unwrap_err();
        assert_eq!(e.path, "matrix[0][0]");
        let bad = M_C.replace("\"rel\": \">\"", "\"rel\": \"~\"");
        assert_eq!(InstanceDocument::parse(&bad).unwrap_err().path, "targets[0].rel");
        let bad = M_C.replace("[[0, 1], [0, 1]]", "[[0, 1], [0]]");
        assert_eq!(InstanceDocument::parse(&bad).unwrap_err().path, "spec");
        let e = InstanceDocument::parse("{\"kind\": ").unwrap_err();
        assert_eq!(e.line.map(|(l, _)| l), Some(1));
    }

    #[test]
    fn hulls_and_annotations() {
        let text = M_C.replace(
            "\"rel\": \">\"}]",
            "\"rel\": \">\", \"hull\": [[\"1\", \"-1\"]]}], \"intrinsic_dim\": [1]",
        );
        let doc = InstanceDocument::parse(&text).unwrap();
        assert!(doc.targets[0].declared_hull().is_some());
        assert_eq!(doc.intrinsic_dims(), [Some(1)]);
        assert_eq!(InstanceDocument::parse(&doc.to_json_string()).unwrap(), doc);
    }

    #[test]
    fn empty_matrix() {
        let text = r#"{"kind": "lds", "matrix": [], "initial": [], "targets": [],
            "spec": {"states": 1, "initial": 0, "delta": [[0]], "acceptance": [[0]]}}"#;
        let doc = InstanceDocument::parse(text).unwrap();
        assert_eq!(doc.matrix.rows(), 0);
        assert_eq!(InstanceDocument::parse(&doc.to_json_string()).unwrap(), doc);
    }
}
