//! JSON instance files.  Rationals are strings (`"3"`, `"-1/2"`; bare JSON
//! integers are accepted on input), indices are 0-based, matrices are lists of
//! rows.  Sub-instances may be inline objects or paths relative to the file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::algebroid::{BaseAlgebra, DerivationOf, HomLieAlgebroidModel};
use crate::connection::{AlgebroidConnection, Connection, TwistMap};
use crate::error::{Error, Result};
use crate::extension::{Extension, FiberData};
use crate::forms::{combinations, Form};
use crate::homlie::HomLieAlgebra;
use crate::linalg::{format_rational, parse_rational, Matrix, Tensor3, Vector, Q};
use crate::ruth::{EndValuedForm, GradedModule, RuthData};

/// A rational in JSON form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub Q);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Str(s) => parse_rational(&s).map(Rat).map_err(serde::de::Error::custom),
            Repr::Int(i) => Ok(Rat(Q::from_integer(i.into()))),
        }
    }
}

type Rows = Vec<Vec<Rat>>;

fn rats(v: &[Q]) -> Vec<Rat> {
    v.iter().cloned().map(Rat).collect()
}

fn unrat(v: &[Rat]) -> Vector {
    v.iter().map(|r| r.0.clone()).collect()
}

pub fn matrix_rows(m: &Matrix) -> Rows {
    (0..m.rows()).map(|r| rats(m.row(r))).collect()
}

/// Reads a matrix of known shape; a matrix with no rows is `[]`.
pub fn rows_matrix(rows: &Rows, r: usize, c: usize, what: &str) -> Result<Matrix> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Malformed(format!("{what}: expected a {r}×{c} matrix")));
    }
    Ok(Matrix::from_flat(r, c, rows.iter().flat_map(|row| unrat(row)).collect()))
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct FiberDoc {
    pub r0: usize,
    pub r1: usize,
    pub partial: Rows,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct HomLieDoc {
    #[serde(rename = "type")]
    pub kind: String,
    pub dim: usize,
    /// Entries `[k, i, j, c]` with `i < j`: `[e_i, e_j]` has `e_k` coefficient `c`.
    #[serde(default)]
    pub bracket: Vec<(usize, usize, usize, Rat)>,
    pub twist: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inclusion: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<FiberDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct BaseDoc {
    pub dim: usize,
    /// Entries `[k, i, j, c]` with `i ≤ j`, completed symmetrically.
    pub product: Vec<(usize, usize, usize, Rat)>,
    pub unit: Vec<Rat>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidDoc {
    #[serde(rename = "type")]
    pub kind: String,
    pub base: BaseDoc,
    pub theta_star: Rows,
    pub rank: usize,
    #[serde(default)]
    pub bracket: Vec<(usize, usize, usize, Vec<Rat>)>,
    /// One derivation matrix per basis section.
    pub anchor: Vec<Rows>,
    /// `twist[k][j]`: the `e_k` coefficient of `Θ(e_j)`.
    pub twist: Vec<Vec<Vec<Rat>>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct ConnectionDoc {
    #[serde(rename = "type")]
    pub kind: String,
    pub algebra: Value,
    pub module_rank: usize,
    pub alpha: Rows,
    pub action: Vec<Rows>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct AlphaFormDoc {
    #[serde(rename = "type")]
    pub kind: String,
    pub degree: usize,
    pub values: Vec<(Vec<usize>, Vec<Rat>)>,
    pub connection: Value,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct OmegaDoc {
    pub p: usize,
    /// Entries `[tuple, source degree q, matrix ε^q → ε^{q+1−p}]`.
    pub values: Vec<(Vec<usize>, usize, Rows)>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct RuthDoc {
    #[serde(rename = "type")]
    pub kind: String,
    pub algebra: Value,
    pub ranks: Vec<usize>,
    pub alpha: Vec<Rows>,
    #[serde(default)]
    pub partial: Vec<Rows>,
    pub connections: Vec<Vec<Rows>>,
    #[serde(default)]
    pub omegas: Vec<OmegaDoc>,
}

/// The algebra a connection lives over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyConnection {
    Plain(Connection),
    Algebroid(AlgebroidConnection),
}

#[derive(Clone, Debug)]
pub enum Instance {
    HomLieAlgebra { algebra: HomLieAlgebra, extension: Option<Extension> },
    HomLieAlgebroid(HomLieAlgebroidModel),
    Connection(AnyConnection),
    AlphaForm { connection: AnyConnection, form: Form },
    Ruth(RuthData),
}

impl Instance {
    pub fn type_name(&self) -> &'static str {
        match self {
            Instance::HomLieAlgebra { .. } => "hom_lie_algebra",
            Instance::HomLieAlgebroid(_) => "hom_lie_algebroid",
            Instance::Connection(_) => "connection",
            Instance::AlphaForm { .. } => "alpha_form",
            Instance::Ruth(_) => "ruth",
        }
    }
}

/// Shape errors from constructors become schema errors on input.
fn malformed(e: Error) -> Error {
    match e {
        Error::Dimension(m) | Error::SingularTwist(m) => Error::Malformed(m),
        other => other,
    }
}

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Malformed(e.to_string()))
}

struct Loader {
    /// Files currently being resolved, to reject reference cycles.
    stack: Vec<PathBuf>,
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    Loader { stack: Vec::new() }.load_file(path)
}

/// Parses an instance given as text; relative references resolve against `dir`.
pub fn parse_instance(text: &str, dir: &Path) -> Result<Instance> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Loader { stack: Vec::new() }.instance_from_json(v, dir)
}

impl Loader {
    fn load_file(&mut self, path: &Path) -> Result<Instance> {
        let canon = fs::canonicalize(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if self.stack.contains(&canon) {
            return Err(Error::Malformed(format!("reference cycle through {}", path.display())));
        }
        let text = fs::read_to_string(&canon).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let dir = canon.parent().map(Path::to_path_buf).unwrap_or_default();
        self.stack.push(canon);
        let out = self.instance_from_json(v, &dir);
        self.stack.pop();
        out
    }

    fn reference(&mut self, v: Value, dir: &Path) -> Result<Instance> {
        match v {
            Value::String(rel) => self.load_file(&dir.join(rel)),
            Value::Object(_) => self.instance_from_json(v, dir),
            _ => Err(Error::Malformed("a reference must be an inline object or a relative path".into())),
        }
    }

    fn instance_from_json(&mut self, v: Value, dir: &Path) -> Result<Instance> {
        let kind =
            v.get("type").and_then(Value::as_str).ok_or_else(|| Error::Malformed("missing string field \"type\"".into()))?.to_string();
        match kind.as_str() {
            "hom_lie_algebra" => {
                let (algebra, extension) = hom_lie_from_doc(&from_value(v)?)?;
                Ok(Instance::HomLieAlgebra { algebra, extension })
            }
            "hom_lie_algebroid" => Ok(Instance::HomLieAlgebroid(algebroid_from_doc(&from_value(v)?)?)),
            "connection" => {
                let doc: ConnectionDoc = from_value(v)?;
                Ok(Instance::Connection(self.connection_from_doc(doc, dir)?))
            }
            "alpha_form" => {
                let doc: AlphaFormDoc = from_value(v)?;
                let connection = match self.reference(doc.connection.clone(), dir)? {
                    Instance::Connection(c) => c,
                    other => return Err(Error::Malformed(format!("alpha_form needs a connection, found {}", other.type_name()))),
                };
                let (n, width) = match &connection {
                    AnyConnection::Plain(c) => (c.algebra().dim(), c.rank()),
                    AnyConnection::Algebroid(_) => {
                        return Err(Error::Malformed("alpha_form needs a connection over a hom_lie_algebra".into()))
                    }
                };
                let entries: Vec<(Vec<usize>, Vector)> = doc.values.iter().map(|(t, v)| (t.clone(), unrat(v))).collect();
                let form = Form::from_values(n, doc.degree, width, &entries).map_err(malformed)?;
                Ok(Instance::AlphaForm { connection, form })
            }
            "ruth" => {
                let doc: RuthDoc = from_value(v)?;
                Ok(Instance::Ruth(self.ruth_from_doc(doc, dir)?))
            }
            other => Err(Error::Malformed(format!("unknown instance type \"{other}\""))),
        }
    }

    fn algebra(&mut self, v: Value, dir: &Path) -> Result<Instance> {
        match self.reference(v, dir)? {
            inst @ (Instance::HomLieAlgebra { .. } | Instance::HomLieAlgebroid(_)) => Ok(inst),
            other => Err(Error::Malformed(format!("expected an algebra, found {}", other.type_name()))),
        }
    }

    fn connection_from_doc(&mut self, doc: ConnectionDoc, dir: &Path) -> Result<AnyConnection> {
        let r = doc.module_rank;
        match self.algebra(doc.algebra, dir)? {
            Instance::HomLieAlgebra { algebra, .. } => {
                let n = algebra.dim();
                let alpha = TwistMap::new(rows_matrix(&doc.alpha, r, r, "alpha")?).map_err(malformed)?;
                if doc.action.len() != n {
                    return Err(Error::Malformed(format!("expected {n} action matrices")));
                }
                let action = doc.action.iter().map(|m| rows_matrix(m, r, r, "action")).collect::<Result<_>>()?;
                Ok(AnyConnection::Plain(Connection::new(algebra, alpha, action).map_err(malformed)?))
            }
            Instance::HomLieAlgebroid(model) => {
                let d = model.base().dim() * r;
                let alpha = TwistMap::new(rows_matrix(&doc.alpha, d, d, "alpha")?).map_err(malformed)?;
                let action = doc.action.iter().map(|m| rows_matrix(m, d, d, "action")).collect::<Result<_>>()?;
                Ok(AnyConnection::Algebroid(AlgebroidConnection::new(model, r, alpha, action).map_err(malformed)?))
            }
            _ => unreachable!("algebra() filters types"),
        }
    }

    fn ruth_from_doc(&mut self, doc: RuthDoc, dir: &Path) -> Result<RuthData> {
        let algebra = match self.algebra(doc.algebra, dir)? {
            Instance::HomLieAlgebra { algebra, .. } => algebra,
            _ => return Err(Error::Malformed("ruth data needs a hom_lie_algebra".into())),
        };
        ruth_parts(algebra, &doc.ranks, &doc.alpha, &doc.partial, &doc.connections, &doc.omegas)
    }
}

fn ruth_parts(
    algebra: HomLieAlgebra,
    ranks: &[usize],
    alpha: &[Rows],
    partial: &[Rows],
    connections: &[Vec<Rows>],
    omegas: &[OmegaDoc],
) -> Result<RuthData> {
    let n = algebra.dim();
    if ranks.is_empty() || alpha.len() != ranks.len() || connections.len() != ranks.len() {
        return Err(Error::Malformed("ranks, alpha and connections must have one entry per degree".into()));
    }
    if partial.len() + 1 != ranks.len() {
        return Err(Error::Malformed(format!("expected {} ∂ blocks", ranks.len() - 1)));
    }
    let alphas = alpha
        .iter()
        .zip(ranks)
        .map(|(m, &r)| TwistMap::new(rows_matrix(m, r, r, "alpha")?).map_err(malformed))
        .collect::<Result<Vec<_>>>()?;
    let module = GradedModule::new(alphas).map_err(malformed)?;
    let partial = partial.iter().enumerate().map(|(q, m)| rows_matrix(m, ranks[q + 1], ranks[q], "partial")).collect::<Result<Vec<_>>>()?;
    let nabla = connections
        .iter()
        .zip(ranks)
        .map(|(ms, &r)| {
            if ms.len() != n {
                return Err(Error::Malformed(format!("expected {n} connection matrices per degree")));
            }
            ms.iter().map(|m| rows_matrix(m, r, r, "connection")).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut forms = Vec::new();
    for od in omegas {
        let p = od.p;
        if p < 2 || p > n {
            return Err(Error::Malformed(format!("ω of degree {p} is outside 2..={n}")));
        }
        let shift = 1 - p as isize;
        let mut w = EndValuedForm::zero(&module, n, p, shift);
        for (tuple, q, m) in &od.values {
            let t = (*q as isize + shift) as usize;
            let slot = w
                .blocks
                .get_mut(*q)
                .and_then(Option::as_mut)
                .ok_or_else(|| Error::Malformed(format!("ω_{p} has no block from degree {q}")))?;
            let mat = rows_matrix(m, ranks[t], ranks[*q], "omega value")?;
            let entry = Form::from_values(n, p, slot.width(), &[(tuple.clone(), mat.as_flat().to_vec())]).map_err(malformed)?;
            *slot = slot.add(&entry);
        }
        forms.push(w);
    }
    RuthData::new(algebra, module, partial, nabla, forms).map_err(malformed)
}

fn hom_lie_from_doc(doc: &HomLieDoc) -> Result<(HomLieAlgebra, Option<Extension>)> {
    let n = doc.dim;
    let twist = rows_matrix(&doc.twist, n, n, "twist")?;
    let entries: Vec<_> = doc.bracket.iter().map(|(k, i, j, c)| (*k, *i, *j, c.0.clone())).collect();
    let algebra = HomLieAlgebra::from_entries(n, &entries, twist).map_err(malformed)?;
    let extension = match (&doc.inclusion, &doc.projection) {
        (None, None) => None,
        (Some(inc), Some(proj)) => {
            let h = inc.first().map_or(0, Vec::len);
            let inclusion = rows_matrix(inc, n, h, "inclusion")?;
            let pn = proj.len();
            let projection = rows_matrix(proj, pn, n, "projection")?;
            let fiber = doc
                .fiber
                .as_ref()
                .map(|f| -> Result<FiberData> {
                    if f.r0 * f.r1 != h {
                        return Err(Error::Malformed("fiber ranks do not match the inclusion".into()));
                    }
                    Ok(FiberData { r0: f.r0, r1: f.r1, partial: rows_matrix(&f.partial, f.r1, f.r0, "fiber partial")? })
                })
                .transpose()?;
            Some(Extension { algebra: algebra.clone(), inclusion, projection, fiber })
        }
        _ => return Err(Error::Malformed("inclusion and projection must be given together".into())),
    };
    Ok((algebra, extension))
}

fn algebroid_from_doc(doc: &AlgebroidDoc) -> Result<HomLieAlgebroidModel> {
    let m = doc.base.dim;
    let mut product = Tensor3::zeros(m);
    for (k, i, j, c) in &doc.base.product {
        let (k, i, j) = (*k, *i, *j);
        if k >= m || i >= m || j >= m || i > j {
            return Err(Error::Malformed(format!("product entry ({k},{i},{j}) must satisfy i ≤ j < {m}")));
        }
        product.set(k, i, j, product.get(k, i, j) + &c.0);
        if i != j {
            product.set(k, j, i, product.get(k, j, i) + &c.0);
        }
    }
    let theta = rows_matrix(&doc.theta_star, m, m, "theta_star")?;
    let base = BaseAlgebra::new(product, unrat(&doc.base.unit), theta).map_err(malformed)?;
    let n = doc.rank;
    let entries: Vec<_> = doc.bracket.iter().map(|(k, i, j, f)| (*k, *i, *j, unrat(f))).collect();
    if doc.anchor.len() != n {
        return Err(Error::Malformed(format!("expected {n} anchor matrices")));
    }
    let anchor = doc.anchor.iter().map(|a| rows_matrix(a, m, m, "anchor").map(DerivationOf)).collect::<Result<Vec<_>>>()?;
    if doc.twist.len() != n || doc.twist.iter().any(|row| row.len() != n) {
        return Err(Error::Malformed(format!("twist must be an {n}×{n} grid of functions")));
    }
    let twist = doc.twist.iter().flat_map(|row| row.iter().map(|f| unrat(f))).collect();
    HomLieAlgebroidModel::from_entries(base, n, &entries, anchor, twist).map_err(malformed)
}

pub fn hom_lie_doc(g: &HomLieAlgebra, extension: Option<&Extension>) -> HomLieDoc {
    let n = g.dim();
    let mut bracket = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let c = g.structure().get(k, i, j);
                if !num::Zero::is_zero(c) {
                    bracket.push((k, i, j, Rat(c.clone())));
                }
            }
        }
    }
    HomLieDoc {
        kind: "hom_lie_algebra".into(),
        dim: n,
        bracket,
        twist: matrix_rows(g.twist()),
        inclusion: extension.map(|e| matrix_rows(&e.inclusion)),
        projection: extension.map(|e| matrix_rows(&e.projection)),
        fiber: extension.and_then(|e| e.fiber.as_ref()).map(|f| FiberDoc { r0: f.r0, r1: f.r1, partial: matrix_rows(&f.partial) }),
    }
}

pub fn algebroid_doc(a: &HomLieAlgebroidModel) -> AlgebroidDoc {
    let b = a.base();
    let m = b.dim();
    let n = a.rank();
    let mut product = Vec::new();
    for i in 0..m {
        for j in i..m {
            for k in 0..m {
                let c = b.structure().get(k, i, j);
                if !num::Zero::is_zero(c) {
                    product.push((k, i, j, Rat(c.clone())));
                }
            }
        }
    }
    let mut bracket = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let f = a.bracket_coefficient(k, i, j);
                if f.iter().any(|x| !num::Zero::is_zero(x)) {
                    bracket.push((k, i, j, rats(f)));
                }
            }
        }
    }
    AlgebroidDoc {
        kind: "hom_lie_algebroid".into(),
        base: BaseDoc { dim: m, product, unit: rats(b.unit()) },
        theta_star: matrix_rows(b.endo()),
        rank: n,
        bracket,
        anchor: a.anchors().iter().map(|d| matrix_rows(&d.0)).collect(),
        twist: (0..n).map(|k| (0..n).map(|j| rats(a.twist_coefficient(k, j))).collect()).collect(),
    }
}

pub fn connection_doc(c: &Connection, algebra: Value) -> ConnectionDoc {
    ConnectionDoc {
        kind: "connection".into(),
        algebra,
        module_rank: c.rank(),
        alpha: matrix_rows(c.alpha().matrix()),
        action: c.action().iter().map(matrix_rows).collect(),
    }
}

pub fn alpha_form_doc(form: &Form, connection: Value) -> AlphaFormDoc {
    let values = combinations(form.dim(), form.degree())
        .into_iter()
        .enumerate()
        .filter(|(idx, _)| form.value(*idx).iter().any(|x| !num::Zero::is_zero(x)))
        .map(|(idx, t)| (t, rats(form.value(idx))))
        .collect();
    AlphaFormDoc { kind: "alpha_form".into(), degree: form.degree(), values, connection }
}

pub fn ruth_doc(r: &RuthData, algebra: Value) -> RuthDoc {
    let m = r.module();
    let n = r.algebra().dim();
    let omegas = r
        .omegas()
        .iter()
        .map(|w| {
            let mut values = Vec::new();
            for (q, b) in w.blocks.iter().enumerate() {
                let Some(f) = b else { continue };
                let t = (q as isize + w.shift) as usize;
                for (idx, tuple) in combinations(n, w.degree).into_iter().enumerate() {
                    let v = f.value(idx);
                    if v.iter().any(|x| !num::Zero::is_zero(x)) {
                        values.push((tuple, q, matrix_rows(&Matrix::from_flat(m.rank(t), m.rank(q), v.to_vec()))));
                    }
                }
            }
            OmegaDoc { p: w.degree, values }
        })
        .collect();
    RuthDoc {
        kind: "ruth".into(),
        algebra,
        ranks: m.ranks(),
        alpha: (0..m.degrees()).map(|q| matrix_rows(m.alpha(q).matrix())).collect(),
        partial: r.partial().iter().map(matrix_rows).collect(),
        connections: r.nabla().iter().map(|ms| ms.iter().map(matrix_rows).collect()).collect(),
        omegas,
    }
}

/// Indented JSON with a trailing newline; arrays without objects that fit in
/// 72 columns stay on one line.  Byte-stable for equal inputs.
pub fn to_json_string<T: Serialize>(doc: &T) -> String {
    let mut out = String::new();
    write_value(&to_value(doc), 0, &mut out);
    out.push('\n');
    out
}

fn has_object(v: &Value) -> bool {
    match v {
        Value::Object(_) => true,
        Value::Array(a) => a.iter().any(has_object),
        _ => false,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => serde_json::to_string(other).expect("values serialize"),
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(a) if !a.is_empty() => {
            let compact = inline(v);
            if !has_object(v) && compact.len() + 2 * indent <= 72 {
                out.push_str(&compact);
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if !m.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&serde_json::to_string(other).expect("values serialize")),
    }
}

pub fn to_value<T: Serialize>(doc: &T) -> Value {
    serde_json::to_value(doc).expect("documents serialize")
}
