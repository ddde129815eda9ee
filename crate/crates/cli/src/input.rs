//! Input document parsing and CLI literal parsing.
//!
//! Documents are JSON objects of the shape
//!
//! ```json
//! { "type": "lie_hermitian" | "coordinate_metric" | "catalog",
//!   "dim": 3,
//!   "payload": { ... },
//!   "options": { "tol": 1e-9 } }
//! ```
//!
//! Complex numbers are `[re, im]` pairs. Lie payloads give the coframe
//! derivatives as `"d": {"3": {"1*1b": [1, 0], "2*2b": [0, 1]}}` with 1-based
//! generator tokens (`"2b"` is the conjugate of the second generator) in
//! canonical order: unbarred before barred, increasing index within each
//! group. Coordinate payloads give `entries` (row-major matrix of expression
//! strings in `z1..zn`, `zb1..zbn`) and `point`. Catalog payloads name a
//! built-in example with scalar `params` and an optional `matrix`.

use std::io::Read;
use std::path::Path;

use bismut_core::catalog::{self, Built, Params};
use bismut_core::form::MAX_DIM;
use bismut_core::{expr, CoordinateMetric, Cx, Error as CoreError, Form, LieHermitianStructure};
use serde_json::{Map, Value};

/// Terminal failure: `code` is the process exit code (2 = computation
/// failed, 3 = malformed input).
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn schema(message: impl Into<String>) -> Failure {
        Failure { code: 3, message: message.into() }
    }

    pub fn compute(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

fn schema_err<T>(message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::schema(message))
}

/// Core errors raised while constructing an input from a document are the
/// document's fault.
pub fn input_error(e: CoreError) -> Failure {
    match e {
        CoreError::Internal(_) => Failure::compute(e.to_string()),
        _ => Failure::schema(e.to_string()),
    }
}

/// Core errors raised while computing on an accepted input.
pub fn compute_error(e: CoreError) -> Failure {
    match e {
        CoreError::Parse { .. }
        | CoreError::UnknownCatalogEntry(_)
        | CoreError::BadParameter(_) => Failure::schema(e.to_string()),
        _ => Failure::compute(e.to_string()),
    }
}

#[derive(Debug, Clone)]
pub enum LoadedInput {
    Lie(LieHermitianStructure),
    Metric(CoordinateMetric),
}

#[derive(Debug, Clone)]
pub struct InputDocument {
    pub dim: usize,
    /// `options.tol`, if present.
    pub tol: Option<f64>,
    /// Catalog name and document-level parameters (catalog documents only);
    /// census grids rebuild from these.
    pub catalog: Option<(String, Params)>,
    pub input: LoadedInput,
    /// The parsed document, echoed back in reports.
    pub echo: Value,
}

pub fn read_source(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::schema(format!("reading stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read_to_string(path)
        .map_err(|e| Failure::schema(format!("reading {}: {e}", path.display())))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, Failure> {
    v.as_object()
        .ok_or_else(|| Failure::schema(format!("{what} must be a JSON object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a [Value], Failure> {
    v.as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| Failure::schema(format!("{what} must be a JSON array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str, Failure> {
    v.as_str()
        .ok_or_else(|| Failure::schema(format!("{what} must be a string")))
}

fn reject_unknown(map: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<(), Failure> {
    for k in map.keys() {
        if !allowed.contains(&k.as_str()) {
            return schema_err(format!(
                "unknown key `{k}` in {what} (allowed: {})",
                allowed.join(", ")
            ));
        }
    }
    Ok(())
}

fn complex_pair(v: &Value, what: &str) -> Result<Cx, Failure> {
    let arr = as_array(v, what)?;
    if arr.len() != 2 {
        return schema_err(format!("{what} must be a [re, im] pair"));
    }
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| Failure::schema(format!("{what}[0] must be a number")))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| Failure::schema(format!("{what}[1] must be a number")))?;
    Ok(Cx::new(re, im))
}

/// 1-based generator token: digits plus optional `b` suffix for the
/// conjugate. Returns the 0-based index and the barred flag.
fn parse_generator(tok: &str, dim: usize, what: &str) -> Result<(usize, bool), Failure> {
    let (digits, barred) = match tok.strip_suffix('b') {
        Some(rest) => (rest, true),
        None => (tok, false),
    };
    let idx: usize = match digits.parse() {
        Ok(v) => v,
        Err(_) => return schema_err(format!("{what}: bad generator token `{tok}`")),
    };
    if idx < 1 || idx > dim {
        return schema_err(format!(
            "{what}: generator index {idx} out of range 1..={dim}"
        ));
    }
    Ok((idx - 1, barred))
}

fn flat(index: usize, barred: bool, dim: usize) -> usize {
    index + if barred { dim } else { 0 }
}

fn parse_lie(dim: usize, payload: &Map<String, Value>) -> Result<LieHermitianStructure, Failure> {
    reject_unknown(payload, &["d"], "lie_hermitian payload")?;
    let d = payload
        .get("d")
        .ok_or_else(|| Failure::schema("lie_hermitian payload requires key `d`"))?;
    let d = as_object(d, "payload.d")?;
    if dim < 2 || dim > MAX_DIM {
        return schema_err(format!(
            "lie_hermitian dim must be between 2 and {MAX_DIM}, got {dim}"
        ));
    }
    let mut dphi = vec![Form::zero(dim); dim];
    for (key, entry) in d {
        let k: usize = match key.parse() {
            Ok(v) => v,
            Err(_) => return schema_err(format!("payload.d: bad coframe key `{key}`")),
        };
        if k < 1 || k > dim {
            return schema_err(format!(
                "payload.d: coframe index {k} out of range 1..={dim}"
            ));
        }
        let entry = as_object(entry, &format!("payload.d.{key}"))?;
        let mut form = Form::zero(dim);
        for (mono, coeff) in entry {
            let what = format!("payload.d.{key}.{mono}");
            let Some((ta, tb)) = mono.split_once('*') else {
                return schema_err(format!("{what}: key must look like `1*2b`"));
            };
            let (ia, ba) = parse_generator(ta, dim, &what)?;
            let (ib, bb) = parse_generator(tb, dim, &what)?;
            if flat(ia, ba, dim) >= flat(ib, bb, dim) {
                return schema_err(format!(
                    "{what}: generators must be in canonical order (unbarred first, increasing index)"
                ));
            }
            let c = complex_pair(coeff, &what)?;
            let m = Form::monomial(dim, &[(ia, ba), (ib, bb)], c).map_err(input_error)?;
            form = &form + &m;
        }
        dphi[k - 1] = form;
    }
    LieHermitianStructure::new(dim, dphi).map_err(input_error)
}

fn parse_coordinate(dim: usize, payload: &Map<String, Value>) -> Result<CoordinateMetric, Failure> {
    reject_unknown(payload, &["entries", "point"], "coordinate_metric payload")?;
    let entries = payload
        .get("entries")
        .ok_or_else(|| Failure::schema("coordinate_metric payload requires key `entries`"))?;
    let rows = as_array(entries, "payload.entries")?;
    if rows.len() != dim {
        return schema_err(format!(
            "payload.entries must have {dim} rows, got {}",
            rows.len()
        ));
    }
    let mut exprs = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let row = as_array(row, &format!("payload.entries[{i}]"))?;
        if row.len() != dim {
            return schema_err(format!(
                "payload.entries[{i}] must have {dim} columns, got {}",
                row.len()
            ));
        }
        for (j, cell) in row.iter().enumerate() {
            let src = as_str(cell, &format!("payload.entries[{i}][{j}]"))?;
            let e = expr::parse(src).map_err(|e| {
                Failure::schema(format!("payload.entries[{i}][{j}]: {e}"))
            })?;
            exprs.push(e);
        }
    }
    let point_v = payload
        .get("point")
        .ok_or_else(|| Failure::schema("coordinate_metric payload requires key `point`"))?;
    let point_arr = as_array(point_v, "payload.point")?;
    if point_arr.len() != dim {
        return schema_err(format!(
            "payload.point must have {dim} entries, got {}",
            point_arr.len()
        ));
    }
    let mut point = Vec::with_capacity(dim);
    for (k, v) in point_arr.iter().enumerate() {
        point.push(complex_pair(v, &format!("payload.point[{k}]"))?);
    }
    CoordinateMetric::new(dim, exprs, point).map_err(input_error)
}

fn parse_params(payload: &Map<String, Value>) -> Result<Params, Failure> {
    let mut params = Params::new();
    if let Some(p) = payload.get("params") {
        let p = as_object(p, "payload.params")?;
        for (name, v) in p {
            let c = complex_pair(v, &format!("payload.params.{name}"))?;
            params.scalars.insert(name.clone(), c);
        }
    }
    if let Some(m) = payload.get("matrix") {
        let rows = as_array(m, "payload.matrix")?;
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = as_array(row, &format!("payload.matrix[{i}]"))?;
            let mut r = Vec::with_capacity(row.len());
            for (j, v) in row.iter().enumerate() {
                r.push(complex_pair(v, &format!("payload.matrix[{i}][{j}]"))?);
            }
            out.push(r);
        }
        params.matrix = Some(out);
    }
    Ok(params)
}

fn built_dim(b: &Built) -> usize {
    match b {
        Built::Lie(s) => s.n(),
        Built::Metric(m) => m.n(),
    }
}

pub fn build_input(b: Built) -> LoadedInput {
    match b {
        Built::Lie(s) => LoadedInput::Lie(s),
        Built::Metric(m) => LoadedInput::Metric(m),
    }
}

pub fn parse_document(text: &str) -> Result<InputDocument, Failure> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Failure::schema(format!("JSON syntax error: {e}")))?;
    let root = as_object(&value, "input document")?;
    reject_unknown(root, &["type", "dim", "payload", "options"], "input document")?;

    let doc_type = as_str(
        root.get("type")
            .ok_or_else(|| Failure::schema("input document requires key `type`"))?,
        "type",
    )?
    .to_string();
    let dim_v = root
        .get("dim")
        .ok_or_else(|| Failure::schema("input document requires key `dim`"))?;
    let dim = dim_v
        .as_u64()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Failure::schema("`dim` must be a positive integer"))? as usize;
    let payload = as_object(
        root.get("payload")
            .ok_or_else(|| Failure::schema("input document requires key `payload`"))?,
        "payload",
    )?;

    let mut tol = None;
    if let Some(opts) = root.get("options") {
        let opts = as_object(opts, "options")?;
        reject_unknown(opts, &["tol"], "options")?;
        if let Some(t) = opts.get("tol") {
            let t = t
                .as_f64()
                .filter(|v| *v > 0.0 && v.is_finite())
                .ok_or_else(|| Failure::schema("options.tol must be a positive number"))?;
            tol = Some(t);
        }
    }

    let (catalog, input) = match doc_type.as_str() {
        "lie_hermitian" => (None, LoadedInput::Lie(parse_lie(dim, payload)?)),
        "coordinate_metric" => (None, LoadedInput::Metric(parse_coordinate(dim, payload)?)),
        "catalog" => {
            reject_unknown(payload, &["name", "params", "matrix"], "catalog payload")?;
            let name = as_str(
                payload
                    .get("name")
                    .ok_or_else(|| Failure::schema("catalog payload requires key `name`"))?,
                "payload.name",
            )?
            .to_string();
            let ent = catalog::entry(&name).map_err(input_error)?;
            let params = parse_params(payload)?;
            for key in params.scalars.keys() {
                if !ent.params.iter().any(|(p, _)| p == key) {
                    return schema_err(format!(
                        "catalog entry `{name}` has no parameter `{key}`"
                    ));
                }
            }
            if params.matrix.is_some() && !ent.params.iter().any(|(p, _)| *p == "Y") {
                return schema_err(format!("catalog entry `{name}` takes no matrix parameter"));
            }
            let built = catalog::build(&name, &params).map_err(input_error)?;
            let got = built_dim(&built);
            if got != dim {
                return schema_err(format!(
                    "catalog entry `{name}` has dimension {got}, document says {dim}"
                ));
            }
            (Some((name, params)), build_input(built))
        }
        other => {
            return schema_err(format!(
                "unknown input type `{other}` (expected lie_hermitian, coordinate_metric, or catalog)"
            ))
        }
    };

    Ok(InputDocument { dim, tol, catalog, input, echo: value })
}

/// Complex literal for `--param` and `--grid` values: `2`, `-1.5`, `i`,
/// `-2i`, `1+i`, `0.5-0.25i`, with `e`-notation allowed in the numbers.
pub fn parse_complex_literal(s: &str) -> Result<Cx, Failure> {
    let t = s.trim();
    if t.is_empty() {
        return schema_err("empty complex literal");
    }
    // Split at the first top-level sign: one that is neither leading nor an
    // exponent sign.
    let bytes = t.as_bytes();
    let mut split = None;
    for (i, &b) in bytes.iter().enumerate().skip(1) {
        if (b == b'+' || b == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (first, second) = match split {
        Some(i) => (&t[..i], Some(&t[i..])),
        None => (t, None),
    };
    let mut re = 0.0;
    let mut im = 0.0;
    let mut seen_re = false;
    let mut seen_im = false;
    for part in [Some(first), second].into_iter().flatten() {
        let part = part.trim();
        let (v, imag) = parse_complex_term(part, s)?;
        if imag {
            if seen_im {
                return schema_err(format!("bad complex literal `{s}`: two imaginary terms"));
            }
            im = v;
            seen_im = true;
        } else {
            if seen_re {
                return schema_err(format!("bad complex literal `{s}`: two real terms"));
            }
            re = v;
            seen_re = true;
        }
    }
    Ok(Cx::new(re, im))
}

fn parse_complex_term(part: &str, whole: &str) -> Result<(f64, bool), Failure> {
    let bad = || Failure::schema(format!("bad complex literal `{whole}`"));
    if let Some(body) = part.strip_suffix('i') {
        let body = body.trim();
        let v = match body {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse().map_err(|_| bad())?,
        };
        Ok((v, true))
    } else {
        Ok((part.parse().map_err(|_| bad())?, false))
    }
}

/// `name=value` parameter assignment.
pub fn parse_assignment(spec: &str) -> Result<(String, Cx), Failure> {
    let Some((name, value)) = spec.split_once('=') else {
        return schema_err(format!("bad parameter `{spec}`: expected name=value"));
    };
    let name = name.trim();
    if name.is_empty() {
        return schema_err(format!("bad parameter `{spec}`: empty name"));
    }
    Ok((name.to_string(), parse_complex_literal(value)?))
}

#[derive(Debug, Clone)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<Cx>,
}

/// Grid axis: `name=start:stop:count` (real, inclusive linspace) or
/// `name=v1|v2|v3` (complex list). A bare `name=value` is a one-point axis.
pub fn parse_grid_axis(spec: &str) -> Result<GridAxis, Failure> {
    let Some((name, rest)) = spec.split_once('=') else {
        return schema_err(format!("bad grid `{spec}`: expected name=range"));
    };
    let name = name.trim().to_string();
    if name.is_empty() {
        return schema_err(format!("bad grid `{spec}`: empty name"));
    }
    if rest.contains('|') {
        let values = rest
            .split('|')
            .map(parse_complex_literal)
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return schema_err(format!("bad grid `{spec}`: empty value list"));
        }
        return Ok(GridAxis { name, values });
    }
    let parts: Vec<&str> = rest.split(':').collect();
    match parts.len() {
        1 => Ok(GridAxis { name, values: vec![parse_complex_literal(parts[0])?] }),
        3 => {
            let bad = |what: &str| Failure::schema(format!("bad grid `{spec}`: {what}"));
            let a: f64 = parts[0].trim().parse().map_err(|_| bad("start must be real"))?;
            let b: f64 = parts[1].trim().parse().map_err(|_| bad("stop must be real"))?;
            let count: usize = parts[2].trim().parse().map_err(|_| bad("count must be an integer"))?;
            if count == 0 {
                return Err(bad("count must be at least 1"));
            }
            let values = if count == 1 {
                vec![Cx::new(a, 0.0)]
            } else {
                (0..count)
                    .map(|k| Cx::new(a + (b - a) * k as f64 / (count - 1) as f64, 0.0))
                    .collect()
            };
            Ok(GridAxis { name, values })
        }
        _ => schema_err(format!(
            "bad grid `{spec}`: expected name=start:stop:count or name=v1|v2|..."
        )),
    }
}

/// Cartesian product of the axes, in flag order: the last axis varies
/// fastest.
pub fn grid_points(axes: &[GridAxis]) -> Vec<Vec<(String, Cx)>> {
    let mut points: Vec<Vec<(String, Cx)>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.values.len());
        for base in &points {
            for v in &axis.values {
                let mut p = base.clone();
                p.push((axis.name.clone(), *v));
                next.push(p);
            }
        }
        points = next;
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let cases = [
            ("1", Cx::new(1.0, 0.0)),
            ("-1.5", Cx::new(-1.5, 0.0)),
            ("i", Cx::new(0.0, 1.0)),
            ("-i", Cx::new(0.0, -1.0)),
            ("2i", Cx::new(0.0, 2.0)),
            ("1+i", Cx::new(1.0, 1.0)),
            ("1-2i", Cx::new(1.0, -2.0)),
            ("0.5-0.25i", Cx::new(0.5, -0.25)),
            ("1e-3", Cx::new(1e-3, 0.0)),
            ("1e-3+2e2i", Cx::new(1e-3, 200.0)),
            ("-2e-1i", Cx::new(0.0, -0.2)),
        ];
        for (s, want) in cases {
            let got = parse_complex_literal(s).unwrap();
            assert_eq!(got, want, "literal {s}");
        }
        assert!(parse_complex_literal("").is_err());
        assert!(parse_complex_literal("1+2").is_err());
        assert!(parse_complex_literal("i+i").is_err());
        assert!(parse_complex_literal("abc").is_err());
    }

    #[test]
    fn grid_axes() {
        let a = parse_grid_axis("b=0:1:3").unwrap();
        assert_eq!(a.name, "b");
        assert_eq!(a.values, vec![Cx::new(0.0, 0.0), Cx::new(0.5, 0.0), Cx::new(1.0, 0.0)]);
        let b = parse_grid_axis("b=1|i|1+i").unwrap();
        assert_eq!(b.values.len(), 3);
        assert_eq!(b.values[2], Cx::new(1.0, 1.0));
        let pts = grid_points(&[a, b]);
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0].len(), 2);
        assert_eq!(pts[1][0].1, Cx::new(0.0, 0.0));
        assert_eq!(pts[1][1].1, Cx::new(0.0, 1.0));
        assert!(parse_grid_axis("b=").is_err());
        assert!(parse_grid_axis("=1").is_err());
        assert!(parse_grid_axis("b=1:2").is_err());
    }

    #[test]
    fn lie_document_round_trip() {
        let text = r#"{
            "type": "lie_hermitian",
            "dim": 3,
            "payload": {"d": {"3": {"1*1b": [1, 0], "2*2b": [0, 1]}}},
            "options": {"tol": 1e-10}
        }"#;
        let doc = parse_document(text).unwrap();
        assert_eq!(doc.dim, 3);
        assert_eq!(doc.tol, Some(1e-10));
        let LoadedInput::Lie(s) = &doc.input else { panic!("expected lie input") };
        assert_eq!(s.d_coeff(2, 0, 0), Cx::new(1.0, 0.0));
        assert_eq!(s.d_coeff(2, 1, 1), Cx::new(0.0, 1.0));
    }

    #[test]
    fn schema_violations_rejected() {
        let bad = [
            "{",
            r#"{"type": "lie_hermitian"}"#,
            r#"{"type": "nope", "dim": 2, "payload": {}}"#,
            r#"{"type": "lie_hermitian", "dim": 3, "payload": {"d": {}}, "extra": 1}"#,
            r#"{"type": "lie_hermitian", "dim": 3, "payload": {"d": {"3": {"1b*1": [1, 0]}}}}"#,
            r#"{"type": "lie_hermitian", "dim": 3, "payload": {"d": {"4": {"1*1b": [1, 0]}}}}"#,
            r#"{"type": "lie_hermitian", "dim": 3, "payload": {"d": {"3": {"1*1b": [1]}}}}"#,
            r#"{"type": "coordinate_metric", "dim": 1, "payload": {"entries": [["z9"]], "point": [[0, 0]]}}"#,
            r#"{"type": "catalog", "dim": 3, "payload": {"name": "unknown_thing"}}"#,
            r#"{"type": "catalog", "dim": 4, "payload": {"name": "n3"}}"#,
        ];
        for text in bad {
            let r = parse_document(text);
            assert!(r.is_err(), "accepted: {text}");
            assert_eq!(r.unwrap_err().code, 3, "wrong code for: {text}");
        }
    }

    #[test]
    fn catalog_document_builds() {
        let text = r#"{
            "type": "catalog",
            "dim": 3,
            "payload": {"name": "nilmanifold_b", "params": {"b": [0, 1]}}
        }"#;
        let doc = parse_document(text).unwrap();
        let Some((name, params)) = &doc.catalog else { panic!("expected catalog info") };
        assert_eq!(name, "nilmanifold_b");
        assert_eq!(params.scalars["b"], Cx::new(0.0, 1.0));
        assert!(matches!(doc.input, LoadedInput::Lie(_)));
    }
}
