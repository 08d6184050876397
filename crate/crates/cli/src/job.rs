//! Job files: sectioned `key = value` text with exact rational literals.
//!
//! ```text
//! [variety]
//! backend = projective
//! coordinates = x y z
//! divisor D = x*y*z
//!
//! [pdivisor]
//! omega = -1 1; 1 1
//! coefficient D = 0 1/2
//!
//! [job]
//! pipeline = general
//! ```

use std::fmt;

use pdiv_core::cone::QCone;
use pdiv_core::linalg::{Int, QVector, Rat};
use pdiv_core::pdivisor::PDivisor;
use pdiv_core::polyhedron::TailedPolyhedron;
use pdiv_core::poly::Poly;
use pdiv_core::torus::DivisorialFanRecord;
use pdiv_core::variety::{BlowupOfP2, PointBase, ProjectiveSpace, Variety};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    General,
    Torus,
    CoxS5,
    Hilbert,
    Subdivide,
    Eval,
}

impl Pipeline {
    pub const ALL: [Pipeline; 6] = [
        Pipeline::General,
        Pipeline::Torus,
        Pipeline::CoxS5,
        Pipeline::Hilbert,
        Pipeline::Subdivide,
        Pipeline::Eval,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::General => "general",
            Pipeline::Torus => "torus",
            Pipeline::CoxS5 => "cox-s5",
            Pipeline::Hilbert => "hilbert",
            Pipeline::Subdivide => "subdivide",
            Pipeline::Eval => "eval",
        }
    }

    pub fn parse(s: &str) -> Option<Pipeline> {
        Self::ALL.into_iter().find(|p| p.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarietySpec {
    Point,
    Projective {
        coordinates: Vec<String>,
        divisors: Vec<(String, Poly)>,
    },
    Blowup {
        coordinates: Vec<String>,
        points: Vec<Vec<Rat>>,
        exceptional: Vec<String>,
        divisors: Vec<(String, Poly)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSpec {
    pub name: String,
    pub vertices: Vec<Vec<Rat>>,
    /// Declared tail; must equal the dual of `omega`.
    pub tail: Option<Vec<Vec<Int>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDivisorSpec {
    pub omega: Vec<Vec<Int>>,
    pub coefficients: Vec<CoefficientSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorusSpec {
    Projective,
    Explicit {
        rays: Vec<Vec<Int>>,
        markers: Vec<usize>,
        characters: Vec<Vec<i64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSpec {
    pub rays: Vec<Vec<Int>>,
    pub dual: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobDescription {
    pub variety: Option<VarietySpec>,
    pub pdivisor: Option<PDivisorSpec>,
    pub torus: Option<TorusSpec>,
    pub cone: Option<ConeSpec>,
    pub pipeline: Pipeline,
    pub weight: Option<Vec<Int>>,
    pub output: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobError {
    pub kind: ErrorKind,
    /// 1-based; zero when the error has no location.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl JobError {
    fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        JobError {
            kind: ErrorKind::Syntax,
            line,
            column,
            message: message.into(),
        }
    }

    fn semantic(line: usize, column: usize, message: impl Into<String>) -> Self {
        JobError {
            kind: ErrorKind::Semantic,
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Semantic => "error",
        };
        if self.line == 0 {
            write!(f, "{kind}: {}", self.message)
        } else {
            write!(f, "{}:{}: {kind}: {}", self.line, self.column, self.message)
        }
    }
}

impl std::error::Error for JobError {}

/// A value with the position of its first character.
#[derive(Clone, Debug)]
struct Value<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Value<'a> {
    fn at(&self, offset: usize) -> (usize, usize) {
        (self.line, self.column + self.text[..offset].chars().count())
    }

    fn err(&self, offset: usize, message: impl Into<String>) -> JobError {
        let (l, c) = self.at(offset);
        JobError::syntax(l, c, message)
    }

    /// Whitespace-separated tokens with their byte offsets.
    fn tokens(&self) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, ch) in self.text.char_indices() {
            match (ch.is_whitespace() || ch == ';', start) {
                (true, Some(s)) => {
                    out.push((s, &self.text[s..i]));
                    start = None;
                }
                (false, None) => start = Some(i),
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, &self.text[s..]));
        }
        out
    }

    fn words(&self) -> Vec<String> {
        self.tokens().into_iter().map(|(_, t)| t.to_string()).collect()
    }

    /// Rows separated by `;`.
    fn rows(&self) -> Vec<Value<'a>> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, ch) in self.text.char_indices().chain([(self.text.len(), ';')]) {
            if ch == ';' {
                let (line, column) = self.at(start);
                out.push(Value {
                    text: &self.text[start..i],
                    line,
                    column,
                });
                start = i + 1;
            }
        }
        out
    }

    fn parse_list<T>(&self, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, JobError> {
        self.tokens()
            .into_iter()
            .map(|(o, t)| f(t).ok_or_else(|| self.err(o, format!("expected {what}, found '{t}'"))))
            .collect()
    }

    fn ints(&self) -> Result<Vec<Int>, JobError> {
        self.parse_list("an integer", |t| t.parse::<Int>().ok())
    }

    fn rats(&self) -> Result<Vec<Rat>, JobError> {
        self.parse_list("a rational number", parse_rat)
    }

    fn matrix<T>(&self, f: impl Fn(&Value<'a>) -> Result<Vec<T>, JobError>) -> Result<Vec<Vec<T>>, JobError> {
        let rows = self.rows();
        let mut out: Vec<Vec<T>> = Vec::new();
        for r in &rows {
            let v = f(r)?;
            if v.is_empty() {
                return Err(r.err(0, "empty row"));
            }
            if let Some(first) = out.first() {
                if first.len() != v.len() {
                    return Err(r.err(0, format!("row has {} entries, expected {}", v.len(), first.len())));
                }
            }
            out.push(v);
        }
        Ok(out)
    }

    fn poly(&self, names: &[String]) -> Result<Poly, JobError> {
        Poly::parse(self.text, names).map_err(|e| self.err(e.offset.min(self.text.len()), e.message))
    }
}

fn parse_rat(t: &str) -> Option<Rat> {
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.parse::<Int>().ok()?, d.parse::<Int>().ok()?),
        None => (t.parse::<Int>().ok()?, Int::from(1)),
    };
    (d != Int::from(0)).then(|| Rat::new(n, d))
}

/// One `key [name] = value` line.
#[derive(Clone, Debug)]
struct Entry<'a> {
    key: &'a str,
    name: Option<&'a str>,
    line: usize,
    column: usize,
    value: Value<'a>,
}

#[derive(Debug)]
struct Section<'a> {
    name: &'a str,
    line: usize,
    entries: Vec<Entry<'a>>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&Entry<'a>> {
        self.entries.iter().find(|e| e.key == key && e.name.is_none())
    }

    fn require(&self, key: &str) -> Result<&Entry<'a>, JobError> {
        self.get(key)
            .ok_or_else(|| JobError::semantic(self.line, 1, format!("[{}] needs '{key}'", self.name)))
    }

    fn check_keys(&self, plain: &[&str], named: &[&str]) -> Result<(), JobError> {
        for e in &self.entries {
            let ok = match e.name {
                None => plain.contains(&e.key),
                Some(_) => named.contains(&e.key),
            };
            if !ok {
                return Err(JobError::syntax(
                    e.line,
                    e.column,
                    format!("unknown key '{}' in [{}]", e.key, self.name),
                ));
            }
            if e.name.is_none() && self.entries.iter().filter(|f| f.key == e.key && f.name.is_none()).count() > 1 {
                return Err(JobError::syntax(e.line, e.column, format!("duplicate key '{}'", e.key)));
            }
        }
        Ok(())
    }
}

const SECTIONS: [&str; 5] = ["variety", "pdivisor", "torus", "cone", "job"];

fn is_ident(s: &str) -> bool {
    let mut ch = s.chars();
    ch.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && ch.all(|c| c.is_alphanumeric() || c == '_' || c == '-')
}

fn split_sections(text: &str) -> Result<Vec<Section<'_>>, JobError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        let col = |off: usize| body[..off].chars().count() + 1;
        if trimmed.starts_with('[') {
            let Some(inner) = trimmed.strip_prefix('[').and_then(|t| t.strip_suffix(']')) else {
                return Err(JobError::syntax(line, col(indent), "unterminated section header"));
            };
            let name = inner.trim();
            if !SECTIONS.contains(&name) {
                return Err(JobError::syntax(line, col(indent + 1), format!("unknown section [{name}]")));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(JobError::syntax(line, col(indent), format!("duplicate section [{name}]")));
            }
            sections.push(Section {
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = body.find('=') else {
            return Err(JobError::syntax(line, col(indent), "expected 'key = value'"));
        };
        let lhs: Vec<(usize, &str)> = {
            let l = &body[..eq];
            let mut v = Vec::new();
            let mut off = 0;
            for w in l.split_whitespace() {
                let p = l[off..].find(w).unwrap() + off;
                v.push((p, w));
                off = p + w.len();
            }
            v
        };
        let (key_off, key, name) = match lhs.as_slice() {
            [(o, k)] => (*o, *k, None),
            [(o, k), (_, n)] => (*o, *k, Some(*n)),
            [] => return Err(JobError::syntax(line, col(indent), "missing key")),
            [_, _, (o, _), ..] => return Err(JobError::syntax(line, col(*o), "unexpected word before '='")),
        };
        for (o, w) in &lhs {
            if !is_ident(w) {
                return Err(JobError::syntax(line, col(*o), format!("invalid name '{w}'")));
            }
        }
        let Some(section) = sections.last_mut() else {
            return Err(JobError::syntax(line, col(key_off), "entry outside of a section"));
        };
        let rest = &body[eq + 1..];
        let lead = rest.len() - rest.trim_start().len();
        let vtext = rest.trim();
        let column = col(eq + 1 + lead);
        if vtext.is_empty() {
            return Err(JobError::syntax(line, column, format!("missing value for '{key}'")));
        }
        section.entries.push(Entry {
            key,
            name,
            line,
            column: col(key_off),
            value: Value {
                text: vtext,
                line,
                column,
            },
        });
    }
    Ok(sections)
}

fn parse_bool(e: &Entry) -> Result<bool, JobError> {
    match e.value.text {
        "true" => Ok(true),
        "false" => Ok(false),
        t => Err(e.value.err(0, format!("expected true or false, found '{t}'"))),
    }
}

fn named_polys(s: &Section, names: &[String]) -> Result<Vec<(String, Poly)>, JobError> {
    s.entries
        .iter()
        .filter(|e| e.key == "divisor")
        .map(|e| Ok((e.name.unwrap().to_string(), e.value.poly(names)?)))
        .collect()
}

fn parse_variety(s: &Section) -> Result<VarietySpec, JobError> {
    s.check_keys(&["backend", "coordinates", "points", "exceptional"], &["divisor"])?;
    let b = s.require("backend")?;
    match b.value.text {
        "point" => {
            if let Some(e) = s.entries.iter().find(|e| e.key != "backend") {
                return Err(JobError::semantic(e.line, e.column, "the point backend takes no data"));
            }
            Ok(VarietySpec::Point)
        }
        "projective" => {
            s.check_keys(&["backend", "coordinates"], &["divisor"])?;
            let coordinates = s.require("coordinates")?.value.words();
            let divisors = named_polys(s, &coordinates)?;
            Ok(VarietySpec::Projective {
                coordinates,
                divisors,
            })
        }
        "blowup" => {
            let coordinates = s.require("coordinates")?.value.words();
            let points = s.require("points")?.value.matrix(|r| r.rats())?;
            let exceptional = s.require("exceptional")?.value.words();
            let divisors = named_polys(s, &coordinates)?;
            Ok(VarietySpec::Blowup {
                coordinates,
                points,
                exceptional,
                divisors,
            })
        }
        other => Err(JobError::semantic(
            b.value.line,
            b.value.column,
            format!("unknown backend '{other}' (expected point, projective or blowup)"),
        )),
    }
}

fn parse_pdivisor(s: &Section) -> Result<PDivisorSpec, JobError> {
    s.check_keys(&["omega"], &["coefficient", "tail"])?;
    let omega = s.require("omega")?.value.matrix(|r| r.ints())?;
    let mut coefficients: Vec<CoefficientSpec> = Vec::new();
    for e in s.entries.iter().filter(|e| e.key == "coefficient") {
        let name = e.name.unwrap().to_string();
        if coefficients.iter().any(|c| c.name == name) {
            return Err(JobError::syntax(e.line, e.column, format!("duplicate coefficient '{name}'")));
        }
        coefficients.push(CoefficientSpec {
            name,
            vertices: e.value.matrix(|r| r.rats())?,
            tail: None,
        });
    }
    for e in s.entries.iter().filter(|e| e.key == "tail") {
        let name = e.name.unwrap();
        let Some(c) = coefficients.iter_mut().find(|c| c.name == name) else {
            return Err(JobError::semantic(e.line, e.column, format!("tail for unknown coefficient '{name}'")));
        };
        c.tail = Some(e.value.matrix(|r| r.ints())?);
    }
    Ok(PDivisorSpec { omega, coefficients })
}

fn parse_torus(s: &Section) -> Result<TorusSpec, JobError> {
    s.check_keys(&["fan", "rays", "markers", "characters"], &[])?;
    if let Some(f) = s.get("fan") {
        if f.value.text != "projective" {
            return Err(f.value.err(0, format!("unknown fan '{}'", f.value.text)));
        }
        if let Some(e) = s.entries.iter().find(|e| e.key != "fan") {
            return Err(JobError::semantic(e.line, e.column, "'fan = projective' takes no further data"));
        }
        return Ok(TorusSpec::Projective);
    }
    let rays = match s.get("rays") {
        Some(e) => e.value.matrix(|r| r.ints())?,
        None => Vec::new(),
    };
    let markers = match s.get("markers") {
        Some(e) => e.value.parse_list("a coordinate index", |t| t.parse::<usize>().ok())?,
        None => Vec::new(),
    };
    let characters = match s.get("characters") {
        Some(e) => e.value.matrix(|r| r.parse_list("an integer", |t| t.parse::<i64>().ok()))?,
        None => Vec::new(),
    };
    Ok(TorusSpec::Explicit {
        rays,
        markers,
        characters,
    })
}

fn parse_cone(s: &Section) -> Result<ConeSpec, JobError> {
    s.check_keys(&["rays", "dual"], &[])?;
    let rays = s.require("rays")?.value.matrix(|r| r.ints())?;
    let dual = match s.get("dual") {
        Some(e) => parse_bool(e)?,
        None => false,
    };
    Ok(ConeSpec { rays, dual })
}

/// Parses and validates a job.
pub fn parse_job(text: &str) -> Result<JobDescription, JobError> {
    let sections = split_sections(text)?;
    if sections.is_empty() {
        return Err(JobError::syntax(1, 1, "empty job: expected a section header"));
    }
    let find = |n: &str| sections.iter().find(|s| s.name == n);
    let Some(js) = find("job") else {
        return Err(JobError::semantic(0, 0, "missing [job] section"));
    };
    js.check_keys(&["pipeline", "weight", "output"], &[])?;
    let p = js.require("pipeline")?;
    let pipeline = Pipeline::parse(p.value.text).ok_or_else(|| {
        let all: Vec<&str> = Pipeline::ALL.iter().map(|p| p.as_str()).collect();
        p.value.err(0, format!("unknown pipeline '{}' (expected one of {})", p.value.text, all.join(", ")))
    })?;
    let job = JobDescription {
        variety: find("variety").map(parse_variety).transpose()?,
        pdivisor: find("pdivisor").map(parse_pdivisor).transpose()?,
        torus: find("torus").map(parse_torus).transpose()?,
        cone: find("cone").map(parse_cone).transpose()?,
        pipeline,
        weight: js.get("weight").map(|e| e.value.ints()).transpose()?,
        output: js.get("output").map(|e| e.value.text.to_string()),
    };
    validate(&job, &sections)?;
    Ok(job)
}

fn located(sections: &[Section], section: &str, key: &str, name: Option<&str>) -> (usize, usize) {
    sections
        .iter()
        .find(|s| s.name == section)
        .and_then(|s| {
            s.entries
                .iter()
                .find(|e| e.key == key && e.name == name)
                .map(|e| (e.line, e.column))
                .or(Some((s.line, 1)))
        })
        .unwrap_or((0, 0))
}

fn validate(job: &JobDescription, sections: &[Section]) -> Result<(), JobError> {
    let need = |what: &str, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(JobError::semantic(
                0,
                0,
                format!("pipeline '{}' needs a [{what}] section", job.pipeline.as_str()),
            ))
        }
    };
    match job.pipeline {
        Pipeline::General | Pipeline::Torus => {
            need("variety", job.variety.is_some())?;
            need("pdivisor", job.pdivisor.is_some())?;
            if job.pipeline == Pipeline::Torus {
                need("torus", job.torus.is_some())?;
            }
        }
        Pipeline::Subdivide => need("pdivisor", job.pdivisor.is_some())?,
        Pipeline::Eval => {
            need("pdivisor", job.pdivisor.is_some())?;
            if job.weight.is_none() {
                let (l, c) = located(sections, "job", "pipeline", None);
                return Err(JobError::semantic(l, c, "pipeline 'eval' needs 'weight' in [job]"));
            }
        }
        Pipeline::Hilbert => need("cone", job.cone.is_some())?,
        Pipeline::CoxS5 => {}
    }
    if let Some(v) = &job.variety {
        build_variety(v).map_err(|e| {
            let (l, c) = located(sections, "variety", "backend", None);
            JobError::semantic(l, c, e.to_string())
        })?;
    }
    if let Some(p) = &job.pdivisor {
        let d = build_pdivisor(p).map_err(|(name, e)| {
            let (l, c) = match &name {
                Some(n) => {
                    let declared = p.coefficients.iter().any(|x| &x.name == n && x.tail.is_some());
                    located(sections, "pdivisor", if declared { "tail" } else { "coefficient" }, Some(n))
                }
                None => located(sections, "pdivisor", "omega", None),
            };
            JobError::semantic(l, c, e)
        })?;
        if let Some(w) = &job.weight {
            if w.len() != d.omega().ambient_dim() {
                let (l, c) = located(sections, "job", "weight", None);
                return Err(JobError::semantic(
                    l,
                    c,
                    format!("weight has {} entries, expected {}", w.len(), d.omega().ambient_dim()),
                ));
            }
        }
    }
    if let Some(t) = &job.torus {
        let nv = match &job.variety {
            Some(VarietySpec::Projective { coordinates, .. }) => coordinates.len(),
            _ => 0,
        };
        build_fan(t, nv).map_err(|e| {
            let (l, c) = located(sections, "torus", "rays", None);
            JobError::semantic(l, c, e.to_string())
        })?;
    }
    if let Some(c) = &job.cone {
        build_cone(c).map_err(|e| {
            let (l, col) = located(sections, "cone", "rays", None);
            JobError::semantic(l, col, e)
        })?;
    }
    Ok(())
}

pub fn build_variety(v: &VarietySpec) -> pdiv_core::Result<Variety> {
    Ok(match v {
        VarietySpec::Point => Variety::Point(PointBase),
        VarietySpec::Projective {
            coordinates,
            divisors,
        } => Variety::Projective(ProjectiveSpace::new(coordinates.clone(), divisors.clone())?),
        VarietySpec::Blowup {
            coordinates,
            points,
            exceptional,
            divisors,
        } => Variety::Blowup(BlowupOfP2::new(
            coordinates.clone(),
            points.clone(),
            exceptional.clone(),
            divisors.clone(),
        )?),
    })
}

fn cone_from(rays: &[Vec<Int>]) -> Result<QCone, String> {
    let dim = rays.first().map(|r| r.len()).ok_or("a cone needs at least one ray")?;
    Ok(QCone::from_generators(dim, rays))
}

/// On failure, the coefficient at fault (if any) and a message.
pub fn build_pdivisor(p: &PDivisorSpec) -> Result<PDivisor, (Option<String>, String)> {
    let omega = cone_from(&p.omega).map_err(|e| (None, e))?;
    if !omega.is_full_dimensional() {
        return Err((None, "omega is not full-dimensional".into()));
    }
    if !omega.is_pointed() {
        return Err((None, "omega is not pointed".into()));
    }
    let tail = omega.dual();
    let mut coeffs = Vec::new();
    for c in &p.coefficients {
        let fail = |m: String| (Some(c.name.clone()), m);
        if c.vertices.iter().any(|v| v.len() != omega.ambient_dim()) {
            return Err(fail(format!(
                "coefficient of '{}' needs vertices with {} entries",
                c.name,
                omega.ambient_dim()
            )));
        }
        let t = match &c.tail {
            Some(rays) => {
                let declared = cone_from(rays).map_err(fail)?;
                if declared != tail {
                    return Err(fail(format!(
                        "coefficient of '{}' has tail {:?}, expected the dual of omega {:?}",
                        c.name,
                        declared.rays(),
                        tail.rays()
                    )));
                }
                declared
            }
            None => tail.clone(),
        };
        let verts = c.vertices.iter().map(|v| QVector(v.clone())).collect();
        coeffs.push((c.name.clone(), TailedPolyhedron::new(verts, t)));
    }
    PDivisor::new(omega, coeffs).map_err(|e| (None, e.to_string()))
}

pub fn build_fan(t: &TorusSpec, nvars: usize) -> pdiv_core::Result<DivisorialFanRecord> {
    match t {
        TorusSpec::Projective => Ok(DivisorialFanRecord::projective(nvars)),
        TorusSpec::Explicit {
            rays,
            markers,
            characters,
        } => DivisorialFanRecord::new(rays.clone(), markers.clone(), characters.clone(), Vec::new()),
    }
}

pub fn build_cone(c: &ConeSpec) -> Result<QCone, String> {
    let k = cone_from(&c.rays)?;
    let k = if c.dual { k.dual() } else { k };
    if !k.is_pointed() {
        return Err("the cone is not pointed".into());
    }
    Ok(k)
}

fn fmt_row<T: fmt::Display>(r: &[T]) -> String {
    r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn fmt_matrix<T: fmt::Display>(m: &[Vec<T>]) -> String {
    m.iter().map(|r| fmt_row(r)).collect::<Vec<_>>().join("; ")
}

/// Canonical text of a job; `parse_job` inverts it.
pub fn write_job(job: &JobDescription) -> String {
    let mut out = Vec::new();
    if let Some(v) = &job.variety {
        out.push("[variety]".to_string());
        match v {
            VarietySpec::Point => out.push("backend = point".into()),
            VarietySpec::Projective {
                coordinates,
                divisors,
            } => {
                out.push("backend = projective".into());
                out.push(format!("coordinates = {}", coordinates.join(" ")));
                for (n, f) in divisors {
                    out.push(format!("divisor {n} = {}", f.display(coordinates)));
                }
            }
            VarietySpec::Blowup {
                coordinates,
                points,
                exceptional,
                divisors,
            } => {
                out.push("backend = blowup".into());
                out.push(format!("coordinates = {}", coordinates.join(" ")));
                out.push(format!("points = {}", fmt_matrix(points)));
                out.push(format!("exceptional = {}", exceptional.join(" ")));
                for (n, f) in divisors {
                    out.push(format!("divisor {n} = {}", f.display(coordinates)));
                }
            }
        }
        out.push(String::new());
    }
    if let Some(p) = &job.pdivisor {
        out.push("[pdivisor]".into());
        out.push(format!("omega = {}", fmt_matrix(&p.omega)));
        for c in &p.coefficients {
            out.push(format!("coefficient {} = {}", c.name, fmt_matrix(&c.vertices)));
        }
        for c in &p.coefficients {
            if let Some(t) = &c.tail {
                out.push(format!("tail {} = {}", c.name, fmt_matrix(t)));
            }
        }
        out.push(String::new());
    }
    if let Some(t) = &job.torus {
        out.push("[torus]".into());
        match t {
            TorusSpec::Projective => out.push("fan = projective".into()),
            TorusSpec::Explicit {
                rays,
                markers,
                characters,
            } => {
                if !rays.is_empty() {
                    out.push(format!("rays = {}", fmt_matrix(rays)));
                }
                if !markers.is_empty() {
                    out.push(format!("markers = {}", fmt_row(markers)));
                }
                if !characters.is_empty() {
                    out.push(format!("characters = {}", fmt_matrix(characters)));
                }
            }
        }
        out.push(String::new());
    }
    if let Some(c) = &job.cone {
        out.push("[cone]".into());
        out.push(format!("rays = {}", fmt_matrix(&c.rays)));
        if c.dual {
            out.push("dual = true".into());
        }
        out.push(String::new());
    }
    out.push("[job]".into());
    out.push(format!("pipeline = {}", job.pipeline.as_str()));
    if let Some(w) = &job.weight {
        out.push(format!("weight = {}", fmt_row(w)));
    }
    if let Some(o) = &job.output {
        out.push(format!("output = {o}"));
    }
    out.join("\n") + "\n"
}
