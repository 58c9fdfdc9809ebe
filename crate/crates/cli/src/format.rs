//! JSON expression files: an envelope `{"format_version": 1, "p": p, "payload": {...}}`
//! around one of the payload kinds `sb`, `distribution`, `kernel`, `query`, `grid`.
//!
//! Scalars are integers, fraction strings (`"-3/4"`) or
//! `{"level": k, "terms": [[e, "c"], ...]}` meaning `Σ c·ζ_{p^k}^e`.

use std::collections::BTreeMap;
use std::str::FromStr;

use pdk_core::distribution::CustomSource;
use pdk_core::padic::check_prime;
use pdk_core::wavefront::ProbeParams;
use pdk_core::{
    CustomPairing, CycScalar, DistAtom, Distribution, Kernel, LambdaGroup, MicrolocalQuery, PAdicPoint, Polydisc,
    Rational, SBFunction, SmoothnessVerdict, Term,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub const FORMAT_VERSION: u64 = 1;

/// Largest cyclotomic level accepted in a scalar literal.
const MAX_LEVEL: u64 = 16;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("at {path}: {message}")]
    Schema { path: String, message: String },
}

#[derive(Debug, Error)]
#[error("cannot serialize: {0}")]
pub struct EmitError(pub String);

/// A grid of `(x₀, ξ₀)` points with the probing parameters shared by all of them.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub points: Vec<(PAdicPoint, PAdicPoint)>,
    pub lambda: LambdaGroup,
    pub params: ProbeParams,
}

#[derive(Clone, Debug)]
pub enum Payload {
    Sb(SBFunction),
    Distribution(Distribution),
    Kernel(Kernel),
    Query(MicrolocalQuery),
    Grid(GridSpec),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Sb(_) => "sb",
            Payload::Distribution(_) => "distribution",
            Payload::Kernel(_) => "kernel",
            Payload::Query(_) => "query",
            Payload::Grid(_) => "grid",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExprFile {
    pub p: u64,
    pub payload: Payload,
}

pub fn parse(text: &str) -> Result<ExprFile, ParseError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ParseError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    parse_value(&root)
}

pub fn parse_value(root: &Value) -> Result<ExprFile, ParseError> {
    let top = Node::root(root);
    let obj = top.object()?;
    let version = obj.field("format_version")?.u64()?;
    if version != FORMAT_VERSION {
        return Err(obj.field("format_version")?.error(format!("unsupported format version {version}")));
    }
    let p_node = obj.field("p")?;
    let p = p_node.u64()?;
    check_prime(p).map_err(|e| p_node.error(e.to_string()))?;
    let cx = Cx { p };
    let payload = obj.field("payload")?;
    let fields = payload.object()?;
    cx.check_prime_field(&fields)?;
    let kind = fields.field("kind")?;
    let payload = match kind.str()? {
        "sb" => Payload::Sb(cx.sb(&payload)?),
        "distribution" => Payload::Distribution(cx.distribution(&payload)?),
        "kernel" => Payload::Kernel(cx.kernel(&payload)?),
        "query" => Payload::Query(cx.query(&payload)?),
        "grid" => Payload::Grid(cx.grid(&payload)?),
        other => return Err(kind.error(format!("unknown payload kind {other:?}"))),
    };
    Ok(ExprFile { p, payload })
}

/// A value together with its JSON-pointer path, for error reporting.
#[derive(Clone, Copy)]
struct Node<'a> {
    value: &'a Value,
    path: &'a str,
}

struct Obj<'a> {
    node: Node<'a>,
    map: &'a Map<String, Value>,
}

/// Owned path storage so child nodes can borrow it.
struct Child<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Child<'a> {
    fn node(&self) -> Node<'_> {
        Node { value: self.value, path: &self.path }
    }
}

impl<'a> Node<'a> {
    fn root(value: &'a Value) -> Self {
        Node { value, path: "" }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let path = if self.path.is_empty() { "/".to_string() } else { self.path.to_string() };
        ParseError::Schema { path, message: message.into() }
    }

    fn object(&self) -> Result<Obj<'a>, ParseError> {
        match self.value {
            Value::Object(map) => Ok(Obj { node: *self, map }),
            _ => Err(self.error("expected an object")),
        }
    }

    fn array(&self) -> Result<Vec<Child<'a>>, ParseError> {
        match self.value {
            Value::Array(items) => Ok(items
                .iter()
                .enumerate()
                .map(|(i, value)| Child { value, path: format!("{}/{i}", self.path) })
                .collect()),
            _ => Err(self.error("expected an array")),
        }
    }

    fn i64(&self) -> Result<i64, ParseError> {
        self.value.as_i64().ok_or_else(|| self.error("expected an integer"))
    }

    fn u64(&self) -> Result<u64, ParseError> {
        self.value.as_u64().ok_or_else(|| self.error("expected a non-negative integer"))
    }

    fn usize(&self) -> Result<usize, ParseError> {
        let n = self.u64()?;
        usize::try_from(n).map_err(|_| self.error("integer too large"))
    }

    fn str(&self) -> Result<&'a str, ParseError> {
        self.value.as_str().ok_or_else(|| self.error("expected a string"))
    }

    fn rational(&self) -> Result<Rational, ParseError> {
        match self.value {
            Value::Number(n) => n
                .as_i64()
                .map(|k| Rational::from_integer(k.into()))
                .ok_or_else(|| self.error("numbers must be integers; write fractions as strings")),
            Value::String(s) => parse_rational(s).map_err(|m| self.error(m)),
            _ => Err(self.error("expected a rational (integer or \"a/b\" string)")),
        }
    }
}

impl<'a> Obj<'a> {
    fn field(&self, key: &str) -> Result<Child<'a>, ParseError> {
        self.opt(key).ok_or_else(|| self.node.error(format!("missing field {key:?}")))
    }

    fn opt(&self, key: &str) -> Option<Child<'a>> {
        self.map.get(key).map(|value| Child { value, path: format!("{}/{}", self.node.path, escape(key)) })
    }
}

// Child<'a> hands out Node<'_> borrowing its own path; these helpers keep the
// call sites short.
impl<'a> Child<'a> {
    fn object(&self) -> Result<Obj<'_>, ParseError> {
        self.node().object()
    }
    fn array(&self) -> Result<Vec<Child<'_>>, ParseError> {
        self.node().array()
    }
    fn i64(&self) -> Result<i64, ParseError> {
        self.node().i64()
    }
    fn u64(&self) -> Result<u64, ParseError> {
        self.node().u64()
    }
    fn usize(&self) -> Result<usize, ParseError> {
        self.node().usize()
    }
    fn str(&self) -> Result<&str, ParseError> {
        self.node().str()
    }
    fn rational(&self) -> Result<Rational, ParseError> {
        self.node().rational()
    }
    fn error(&self, message: impl Into<String>) -> ParseError {
        self.node().error(message)
    }
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let d = num_bigint::BigInt::from_str(d.trim()).map_err(|_| format!("bad rational {s:?}"))?;
        if num_traits::Zero::is_zero(&d) {
            return Err(format!("zero denominator in {s:?}"));
        }
        let n = num_bigint::BigInt::from_str(n.trim()).map_err(|_| format!("bad rational {s:?}"))?;
        Ok(Rational::new(n, d))
    } else {
        num_bigint::BigInt::from_str(s).map(Rational::from_integer).map_err(|_| format!("bad rational {s:?}"))
    }
}

/// A point written as comma-separated rationals, e.g. `1/2,3`.
pub fn parse_point_arg(p: u64, s: &str) -> Result<PAdicPoint, String> {
    let coords = s.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
    PAdicPoint::new(p, coords).map_err(|e| e.to_string())
}

struct Cx {
    p: u64,
}

impl Cx {
    /// Nested objects may repeat `p`; it has to agree with the envelope.
    fn check_prime_field(&self, obj: &Obj<'_>) -> Result<(), ParseError> {
        if let Some(node) = obj.opt("p") {
            let q = node.u64()?;
            if q != self.p {
                return Err(node.error(format!("mixed primes: file declares p = {}, object has p = {q}", self.p)));
            }
        }
        Ok(())
    }

    fn scalar(&self, node: Node<'_>) -> Result<CycScalar, ParseError> {
        match node.value {
            Value::Object(_) => {
                let obj = node.object()?;
                let level_node = obj.field("level")?;
                let level = level_node.u64()?;
                if level > MAX_LEVEL {
                    return Err(level_node.error(format!("cyclotomic level {level} exceeds {MAX_LEVEL}")));
                }
                let mut terms = Vec::new();
                for t in obj.field("terms")?.array()? {
                    let pair = t.array()?;
                    if pair.len() != 2 {
                        return Err(t.error("expected [exponent, coefficient]"));
                    }
                    terms.push((pair[0].u64()?, pair[1].rational()?));
                }
                Ok(CycScalar::from_cyclic(self.p, level as u32, terms))
            }
            _ => Ok(CycScalar::from_rational(self.p, node.rational()?)),
        }
    }

    fn point(&self, node: Node<'_>, dim: Option<usize>) -> Result<PAdicPoint, ParseError> {
        let coords = node.array()?.iter().map(|c| c.rational()).collect::<Result<Vec<_>, _>>()?;
        if let Some(d) = dim {
            if coords.len() != d {
                return Err(node.error(format!("expected {d} coordinates, got {}", coords.len())));
            }
        }
        if coords.is_empty() {
            return Err(node.error("a point needs at least one coordinate"));
        }
        PAdicPoint::new(self.p, coords).map_err(|e| node.error(e.to_string()))
    }

    fn ball(&self, node: Node<'_>, dim: usize) -> Result<Polydisc, ParseError> {
        let obj = node.object()?;
        let center = self.point(obj.field("center")?.node(), Some(dim))?;
        Ok(Polydisc::new(center, obj.field("alpha")?.i64()?))
    }

    fn sb(&self, node: &Child<'_>) -> Result<SBFunction, ParseError> {
        let obj = node.object()?;
        self.check_prime_field(&obj)?;
        let dim = positive_dim(&obj.field("dim")?)?;
        let mut raw = Vec::new();
        for t in obj.field("terms")?.array()? {
            let to = t.object()?;
            let coef = self.scalar(to.field("coef")?.node())?;
            let ball = self.ball(to.field("ball")?.node(), dim)?;
            raw.push(Term::new(coef, ball));
        }
        SBFunction::canonicalize(self.p, dim, raw).map_err(|e| node.error(e.to_string()))
    }

    fn lambda(&self, node: Option<Child<'_>>) -> Result<LambdaGroup, ParseError> {
        let Some(node) = node else {
            return LambdaGroup::full(self.p).map_err(|e| ParseError::Schema { path: "/".into(), message: e.to_string() });
        };
        if let Value::String(s) = node.value {
            return match s.as_str() {
                "full" => LambdaGroup::full(self.p).map_err(|e| node.error(e.to_string())),
                _ => Err(node.error("expected \"full\" or an object")),
            };
        }
        let obj = node.object()?;
        let modulus = obj.opt("ord_modulus").map(|n| n.u64()).transpose()?.unwrap_or(1);
        let depth = obj.opt("ac_depth").map(|n| n.u64()).transpose()?.unwrap_or(0);
        let residues = match obj.opt("residues") {
            Some(r) => r.array()?.iter().map(|c| c.u64()).collect::<Result<Vec<_>, _>>()?,
            None => vec![1],
        };
        let depth = u32::try_from(depth).map_err(|_| node.error("ac depth too large"))?;
        LambdaGroup::new(self.p, modulus, depth, residues).map_err(|e| node.error(e.to_string()))
    }

    fn distribution(&self, node: &Child<'_>) -> Result<Distribution, ParseError> {
        let obj = node.object()?;
        self.check_prime_field(&obj)?;
        let dim = positive_dim(&obj.field("dim")?)?;
        let mut out = Distribution::zero(self.p, dim);
        for a in obj.field("atoms")?.array()? {
            let ao = a.object()?;
            let weight = match ao.opt("weight") {
                Some(w) => self.scalar(w.node())?,
                None => CycScalar::one(self.p),
            };
            let ty = ao.field("type")?;
            let atom = match ty.str()? {
                "density" => {
                    let f = self.sb(&ao.field("function")?)?;
                    DistAtom::Density(f)
                }
                "dirac" => {
                    let point = self.point(ao.field("point")?.node(), Some(dim))?;
                    let mass = match ao.opt("mass") {
                        Some(m) => self.scalar(m.node())?,
                        None => CycScalar::one(self.p),
                    };
                    DistAtom::Dirac { point, weight: mass }
                }
                "diagonal" => DistAtom::Diagonal { half_dim: positive_dim(&ao.field("half_dim")?)? },
                "custom" => {
                    let depth = ao.field("depth_limit")?.i64()?;
                    let mut table = BTreeMap::new();
                    for e in ao.field("table")?.array()? {
                        let eo = e.object()?;
                        let ball = self.ball(eo.field("ball")?.node(), dim)?;
                        let value = self.scalar(eo.field("value")?.node())?;
                        if table.insert(ball, value).is_some() {
                            return Err(e.error("duplicate ball in custom table"));
                        }
                    }
                    DistAtom::Custom(CustomPairing::from_table(depth, table).map_err(|e| a.error(e.to_string()))?)
                }
                other => return Err(ty.error(format!("unknown atom type {other:?}"))),
            };
            out.push(weight, atom).map_err(|e| a.error(e.to_string()))?;
        }
        Ok(out)
    }

    fn kernel(&self, node: &Child<'_>) -> Result<Kernel, ParseError> {
        let obj = node.object()?;
        let u = self.distribution(&obj.field("distribution")?)?;
        let split = obj.field("split")?;
        let parts = split.array()?;
        if parts.len() != 2 {
            return Err(split.error("expected [n1, n2]"));
        }
        let (n1, n2) = (parts[0].usize()?, parts[1].usize()?);
        Kernel::new(u, n1, n2).map_err(|e| split.error(e.to_string()))
    }

    fn query(&self, node: &Child<'_>) -> Result<MicrolocalQuery, ParseError> {
        let obj = node.object()?;
        let u = self.distribution(&obj.field("distribution")?)?;
        let dim = u.dim();
        let q = MicrolocalQuery {
            x0: self.point(obj.field("x0")?.node(), Some(dim))?,
            xi0: self.point(obj.field("xi0")?.node(), Some(dim))?,
            lambda: self.lambda(obj.opt("lambda"))?,
            nbhd_radius: obj.field("nbhd_radius")?.i64()?,
            probe_depth: obj.field("probe_depth")?.i64()?,
            ord_floor: obj.field("ord_floor")?.i64()?,
            u,
        };
        q.validate().map_err(|e| node.error(e.to_string()))?;
        Ok(q)
    }

    fn grid(&self, node: &Child<'_>) -> Result<GridSpec, ParseError> {
        let obj = node.object()?;
        let int_or = |key: &str, default: i64| obj.opt(key).map(|n| n.i64()).transpose().map(|v| v.unwrap_or(default));
        let params = ProbeParams {
            nbhd_radius: int_or("nbhd_radius", 1)?,
            probe_depth: int_or("probe_depth", 2)?,
            ord_floor: int_or("ord_floor", -3)?,
        };
        if params.probe_depth < params.nbhd_radius || params.ord_floor >= 0 {
            return Err(node.error("need probe_depth ≥ nbhd_radius and ord_floor < 0"));
        }
        let mut points = Vec::new();
        for pt in obj.field("points")?.array()? {
            let po = pt.object()?;
            let x0 = self.point(po.field("x0")?.node(), None)?;
            let xi0 = self.point(po.field("xi0")?.node(), Some(x0.dim()))?;
            if xi0.is_zero() {
                return Err(pt.error("ξ₀ must be nonzero"));
            }
            points.push((x0, xi0));
        }
        Ok(GridSpec { points, lambda: self.lambda(obj.opt("lambda"))?, params })
    }
}

fn positive_dim(node: &Child<'_>) -> Result<usize, ParseError> {
    match node.usize()? {
        0 => Err(node.error("dimension must be positive")),
        d => Ok(d),
    }
}

pub fn emit(file: &ExprFile) -> Result<Value, EmitError> {
    let payload = match &file.payload {
        Payload::Sb(f) => with_kind("sb", sb_json(f)),
        Payload::Distribution(u) => with_kind("distribution", distribution_json(u)?),
        Payload::Kernel(k) => with_kind("kernel", kernel_json(k)?),
        Payload::Query(q) => with_kind("query", query_json(q)?),
        Payload::Grid(g) => with_kind("grid", grid_json(g)),
    };
    Ok(json!({ "format_version": FORMAT_VERSION, "p": file.p, "payload": payload }))
}

fn with_kind(kind: &str, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("kind".into(), Value::String(kind.into()));
    if let Value::Object(rest) = body {
        map.extend(rest);
    }
    Value::Object(map)
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn scalar_json(c: &CycScalar) -> Value {
    match c.as_rational() {
        Some(r) => rational_json(&r),
        None => json!({
            "level": c.level(),
            "terms": c.terms().map(|(e, r)| json!([e, r.to_string()])).collect::<Vec<_>>(),
        }),
    }
}

pub fn point_json(x: &PAdicPoint) -> Value {
    Value::Array(x.coords().iter().map(rational_json).collect())
}

pub fn ball_json(b: &Polydisc) -> Value {
    json!({ "center": point_json(b.center()), "alpha": b.alpha() })
}

pub fn sb_json(f: &SBFunction) -> Value {
    json!({
        "dim": f.dim(),
        "terms": f.terms().iter().map(|t| json!({ "coef": scalar_json(&t.coef), "ball": ball_json(&t.ball) })).collect::<Vec<_>>(),
    })
}

pub fn distribution_json(u: &Distribution) -> Result<Value, EmitError> {
    let mut atoms = Vec::new();
    for (w, atom) in u.atoms() {
        let mut a = match atom {
            DistAtom::Density(f) => json!({ "type": "density", "function": sb_json(f) }),
            DistAtom::Dirac { point, weight } => {
                let mut a = json!({ "type": "dirac", "point": point_json(point) });
                if !weight.is_one() {
                    a["mass"] = scalar_json(weight);
                }
                a
            }
            DistAtom::Diagonal { half_dim } => json!({ "type": "diagonal", "half_dim": half_dim }),
            DistAtom::Custom(c) => match c.source() {
                CustomSource::Table(table) => json!({
                    "type": "custom",
                    "depth_limit": c.depth_limit(),
                    "table": table.iter().map(|(b, v)| json!({ "ball": ball_json(b), "value": scalar_json(v) })).collect::<Vec<_>>(),
                }),
                CustomSource::Oracle(_) => {
                    return Err(EmitError("the distribution has a lazily evaluated atom with no finite table; pair it with a function instead (kernel-apply --phi)".into()))
                }
            },
        };
        if !w.is_one() {
            a["weight"] = scalar_json(w);
        }
        atoms.push(a);
    }
    Ok(json!({ "dim": u.dim(), "atoms": atoms }))
}

fn kernel_json(k: &Kernel) -> Result<Value, EmitError> {
    let (n1, n2) = k.split();
    Ok(json!({ "distribution": distribution_json(k.u())?, "split": [n1, n2] }))
}

pub fn lambda_json(l: &LambdaGroup) -> Value {
    if l.ord_modulus() == 1 && l.ac_depth() == 0 {
        return Value::String("full".into());
    }
    json!({ "ord_modulus": l.ord_modulus(), "ac_depth": l.ac_depth(), "residues": l.unit_residues().iter().collect::<Vec<_>>() })
}

fn query_json(q: &MicrolocalQuery) -> Result<Value, EmitError> {
    Ok(json!({
        "distribution": distribution_json(&q.u)?,
        "x0": point_json(&q.x0),
        "xi0": point_json(&q.xi0),
        "lambda": lambda_json(&q.lambda),
        "nbhd_radius": q.nbhd_radius,
        "probe_depth": q.probe_depth,
        "ord_floor": q.ord_floor,
    }))
}

fn grid_json(g: &GridSpec) -> Value {
    json!({
        "points": g.points.iter().map(|(x, xi)| json!({ "x0": point_json(x), "xi0": point_json(xi) })).collect::<Vec<_>>(),
        "lambda": lambda_json(&g.lambda),
        "nbhd_radius": g.params.nbhd_radius,
        "probe_depth": g.params.probe_depth,
        "ord_floor": g.params.ord_floor,
    })
}

pub fn verdict_json(v: &SmoothnessVerdict) -> Value {
    match v {
        SmoothnessVerdict::SmoothCertificate { u_nbhd, ucheck, n, all_phi } => json!({
            "verdict": "smooth",
            "neighborhood": ball_json(u_nbhd),
            "frequency_neighborhood": ball_json(ucheck),
            "n": n,
            "all_phi": all_phi,
        }),
        SmoothnessVerdict::NotSmoothWitness { phi, lambda, xi, value } => json!({
            "verdict": "not_smooth",
            "phi": sb_json(phi),
            "lambda": rational_json(lambda),
            "xi": point_json(xi),
            "value": scalar_json(value),
        }),
        SmoothnessVerdict::InconclusiveBounded { u_nbhd, ucheck, probe_depth, ord_floor, probes, skipped } => json!({
            "verdict": "inconclusive",
            "neighborhood": ball_json(u_nbhd),
            "frequency_neighborhood": ball_json(ucheck),
            "probe_depth": probe_depth,
            "ord_floor": ord_floor,
            "probes": probes,
            "skipped": skipped,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sb_file(p: u64, terms: &str) -> String {
        format!(r#"{{"format_version":1,"p":{p},"payload":{{"kind":"sb","dim":1,"terms":{terms}}}}}"#)
    }

    #[test]
    fn minimal_file_is_zero() {
        let f = parse(&sb_file(2, "[]")).unwrap();
        match f.payload {
            Payload::Sb(f) => assert!(f.is_zero()),
            other => panic!("{}", other.kind()),
        }
    }

    #[test]
    fn denominator_six_rejected() {
        let text = sb_file(2, r#"[{"coef":1,"ball":{"center":["1/6"],"alpha":0}}]"#);
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("non p-power denominator"), "{err}");
        assert!(err.contains("/payload/terms/0/ball/center"), "{err}");
    }

    #[test]
    fn rejects_bad_prime_and_version() {
        assert!(parse(&sb_file(4, "[]")).unwrap_err().to_string().contains("not prime"));
        let text = r#"{"format_version":2,"p":2,"payload":{"kind":"sb","dim":1,"terms":[]}}"#;
        assert!(parse(text).unwrap_err().to_string().contains("version"));
    }

    #[test]
    fn rejects_mixed_primes() {
        let text = r#"{"format_version":1,"p":3,"payload":{"kind":"distribution","dim":1,"atoms":[
            {"type":"density","function":{"p":2,"dim":1,"terms":[]}}]}}"#;
        let err = parse(text).unwrap_err().to_string();
        assert!(err.contains("mixed primes"), "{err}");
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse("{\n  \"p\": 2,\n  oops }").unwrap_err();
        assert!(matches!(err, ParseError::Json { line: 3, .. }), "{err}");
    }

    #[test]
    fn scalar_literals() {
        let cx = Cx { p: 3 };
        let v = json!({"level": 1, "terms": [[1, "1"], [2, "1"]]});
        assert_eq!(cx.scalar(Node::root(&v)).unwrap(), CycScalar::from_int(3, -1));
        let v = json!("-3/4");
        assert_eq!(cx.scalar(Node::root(&v)).unwrap(), CycScalar::from_rational(3, Rational::new((-3).into(), 4.into())));
        let z = CycScalar::root_of_unity(3, 2, 4).unwrap();
        assert_eq!(cx.scalar(Node::root(&scalar_json(&z))).unwrap(), z);
    }

    #[test]
    fn canonicalized_on_load() {
        let text = sb_file(2, r#"[{"coef":"1/2","ball":{"center":[0],"alpha":1}},{"coef":"1/2","ball":{"center":[1],"alpha":1}}]"#);
        let Payload::Sb(f) = parse(&text).unwrap().payload else { panic!() };
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.terms()[0].ball.alpha(), 0);
    }

    #[test]
    fn point_arguments() {
        let x = parse_point_arg(3, "1/3, -2").unwrap();
        assert_eq!(x.dim(), 2);
        assert!(parse_point_arg(3, "1/2").unwrap_err().contains("non p-power"));
    }
}
