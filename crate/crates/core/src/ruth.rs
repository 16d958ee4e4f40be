//! Representations up to homotopy over a hom-Lie algebra: graded modules,
//! End-valued forms, the structure operator `D = ∂ + d_∇ + Σ_k ω_k∧`, its
//! square decomposed by bidegree, and graded morphisms.
//!
//! Sign convention: an End-valued form of End-degree `s` acts on a `p`-form
//! with the Koszul sign `(−1)^{s·p}`.  The valuewise differential ∂ is the
//! case of form degree 0 and `s = 1`; `ω_k` has End-degree `1 − k`.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::connection::{check_connection, Connection, TwistMap};
use crate::error::{Error, Result};
use crate::forms::{
    compatibility_residual, compatible_basis, differential_raw, scalar_differential, theta_pullback, wedge, wedge_with, Form,
};
use crate::homlie::HomLieAlgebra;
use crate::linalg::{Matrix, Vector, Q};
use crate::report::Report;

/// Ranks `r_0..r_N` with one invertible twist per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    alphas: Vec<TwistMap>,
}

impl GradedModule {
    pub fn new(alphas: Vec<TwistMap>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Dimension("a graded module needs at least one degree".into()));
        }
        Ok(GradedModule { alphas })
    }

    pub fn top(&self) -> usize {
        self.alphas.len() - 1
    }

    pub fn degrees(&self) -> usize {
        self.alphas.len()
    }

    pub fn rank(&self, q: usize) -> usize {
        self.alphas[q].dim()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.alphas.iter().map(TwistMap::dim).collect()
    }

    pub fn alpha(&self, q: usize) -> &TwistMap {
        &self.alphas[q]
    }

    /// Target degree `q + s` when it exists.
    fn shifted(&self, q: usize, s: isize) -> Option<usize> {
        let t = q as isize + s;
        (t >= 0 && (t as usize) <= self.top()).then_some(t as usize)
    }
}

/// Matrix-valued `p`-form on each source degree: block `q` maps `ε^q → ε^{q+s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndValuedForm {
    pub degree: usize,
    pub shift: isize,
    /// Indexed by source degree; `None` where `q + s` is out of range.
    pub blocks: Vec<Option<Form>>,
}

fn mat_vec_flat(rows: usize, cols: usize, m: &[Q], v: &[Q]) -> Vector {
    (0..rows)
        .map(|r| {
            let mut acc = Q::zero();
            for c in 0..cols {
                let a = &m[r * cols + c];
                if !a.is_zero() && !v[c].is_zero() {
                    acc += a * &v[c];
                }
            }
            acc
        })
        .collect()
}

/// Left multiplication `F ↦ L·F` on row-major `rows×cols` values, as a matrix.
pub fn left_mul_op(l: &Matrix, cols: usize) -> Matrix {
    l.kron(&Matrix::identity(cols))
}

/// Right multiplication `F ↦ F·R` on row-major `rows×cols` values, as a matrix.
pub fn right_mul_op(rt: &Matrix, rows: usize) -> Matrix {
    Matrix::identity(rows).kron(&rt.transpose())
}

impl EndValuedForm {
    pub fn zero(module: &GradedModule, n: usize, degree: usize, shift: isize) -> Self {
        let blocks = (0..module.degrees())
            .map(|q| module.shifted(q, shift).map(|t| Form::zero(n, degree, module.rank(t) * module.rank(q))))
            .collect();
        EndValuedForm { degree, shift, blocks }
    }

    pub fn identity(module: &GradedModule, n: usize) -> Self {
        let blocks = (0..module.degrees())
            .map(|q| {
                let r = module.rank(q);
                Some(Form::from_flat(n, 0, r * r, Matrix::identity(r).as_flat().to_vec()))
            })
            .collect();
        EndValuedForm { degree: 0, shift: 0, blocks }
    }

    /// Form-degree-zero operator from per-degree matrices `ε^q → ε^{q+s}`.
    pub fn valuewise(module: &GradedModule, n: usize, shift: isize, mats: &[Matrix]) -> Result<Self> {
        let mut f = Self::zero(module, n, 0, shift);
        for (q, b) in f.blocks.iter_mut().enumerate() {
            if let Some(b) = b {
                let m = mats.get(q).ok_or_else(|| Error::Dimension(format!("missing block for degree {q}")))?;
                if b.width() != m.rows() * m.cols() || m.cols() != module.rank(q) {
                    return Err(Error::Dimension(format!("block for degree {q} has the wrong shape")));
                }
                *b = Form::from_flat(n, 0, b.width(), m.as_flat().to_vec());
            }
        }
        Ok(f)
    }

    pub fn scale(&self, s: &Q) -> Self {
        EndValuedForm {
            degree: self.degree,
            shift: self.shift,
            blocks: self.blocks.iter().map(|b| b.as_ref().map(|f| f.scale(s))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().flatten().all(Form::is_zero)
    }

    /// Adds `(−1)^{s·p} ω∧η_{p,q}` for every component of `eta` into `out`.
    pub fn apply_into(&self, module: &GradedModule, eta: &GradedElement, out: &mut GradedElement) {
        for (&(p, q), f) in &eta.comps {
            let Some(Some(block)) = self.blocks.get(q) else { continue };
            let t = module.shifted(q, self.shift).expect("block exists only for valid targets");
            let (rows, cols) = (module.rank(t), module.rank(q));
            if rows == 0 || cols == 0 {
                continue;
            }
            let w = wedge_with(block, f, rows, &|m, v| mat_vec_flat(rows, cols, m, v));
            let negative = (self.shift.unsigned_abs() * p) % 2 == 1;
            out.accumulate(p + self.degree, t, &w, negative);
        }
    }

    pub fn apply(&self, module: &GradedModule, eta: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(eta.n);
        self.apply_into(module, eta, &mut out);
        out
    }

    /// `ω(ΘX_1..ΘX_p)∘α_q − α_{q+s}∘ω(X_1..X_p)` on every block, first nonzero.
    pub fn compatibility_witness(&self, module: &GradedModule, theta: &Matrix) -> Option<String> {
        self.blocks.iter().enumerate().find_map(|(q, b)| {
            let b = b.as_ref()?;
            let t = module.shifted(q, self.shift)?;
            let (rows, cols) = (module.rank(t), module.rank(q));
            if rows * cols == 0 {
                return None;
            }
            let lhs = theta_pullback(theta, b).map_values(&right_mul_op(module.alpha(q).matrix(), rows));
            let rhs = b.map_values(&left_mul_op(module.alpha(t).matrix(), cols));
            lhs.sub(&rhs).first_nonzero().map(|v| format!("block ε^{q} → ε^{t} at {v}"))
        })
    }
}

/// Finite sum of components `η_{p,q} ∈ Ω^p(A; ε^q)`; zero components may be absent.
#[derive(Clone, Debug)]
pub struct GradedElement {
    n: usize,
    comps: BTreeMap<(usize, usize), Form>,
}

impl GradedElement {
    pub fn zero(n: usize) -> Self {
        GradedElement { n, comps: BTreeMap::new() }
    }

    pub fn single(q: usize, form: Form) -> Self {
        let mut e = Self::zero(form.dim());
        e.comps.insert((form.degree(), q), form);
        e
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &Form)> {
        self.comps.iter()
    }

    pub fn get(&self, p: usize, q: usize) -> Option<&Form> {
        self.comps.get(&(p, q))
    }

    fn accumulate(&mut self, p: usize, q: usize, f: &Form, negative: bool) {
        if p > self.n || f.is_zero() {
            return;
        }
        let f = if negative { f.scale(&-Q::one()) } else { f.clone() };
        match self.comps.get_mut(&(p, q)) {
            Some(cur) => *cur = cur.add(&f),
            None => {
                self.comps.insert((p, q), f);
            }
        }
    }

    pub fn add(&self, other: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        for (&(p, q), f) in &other.comps {
            out.accumulate(p, q, f, false);
        }
        out
    }

    pub fn sub(&self, other: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        for (&(p, q), f) in &other.comps {
            out.accumulate(p, q, f, true);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(Form::is_zero)
    }

    /// First nonzero component, formatted with its bidegree.
    pub fn first_nonzero(&self) -> Option<String> {
        self.comps.iter().find_map(|(&(p, q), f)| f.first_nonzero().map(|v| format!("component Ω^{p}(ε^{q}) at {v}")))
    }

    /// Components whose form degree exceeds `p0` by exactly `k`.
    pub fn shifted_part(&self, p0: usize, k: usize) -> GradedElement {
        GradedElement { n: self.n, comps: self.comps.iter().filter(|(&(p, _), _)| p == p0 + k).map(|(k, f)| (*k, f.clone())).collect() }
    }

    /// Applies `α_q` valuewise.
    pub fn twist(&self, module: &GradedModule) -> GradedElement {
        GradedElement { n: self.n, comps: self.comps.iter().map(|(&(p, q), f)| ((p, q), f.map_values(module.alpha(q).matrix()))).collect() }
    }

    pub fn theta_pullback(&self, theta: &Matrix) -> GradedElement {
        GradedElement { n: self.n, comps: self.comps.iter().map(|(k, f)| (*k, theta_pullback(theta, f))).collect() }
    }

    /// `ω∧η` componentwise for a scalar form `ω`.
    pub fn wedge_scalar(omega: &Form, eta: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(eta.n);
        for (&(_, q), f) in &eta.comps {
            let w = wedge(omega, f);
            out.accumulate(w.degree(), q, &w, false);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuthData {
    algebra: HomLieAlgebra,
    module: GradedModule,
    /// `partial[q]: ε^q → ε^{q+1}`.
    partial: Vec<Matrix>,
    /// `nabla[q][i] = ∇^q_{e_i}`.
    nabla: Vec<Vec<Matrix>>,
    /// End-valued forms of degree ≥ 2, End-degree `1 − degree`.
    omegas: Vec<EndValuedForm>,
}

impl RuthData {
    pub fn new(
        algebra: HomLieAlgebra,
        module: GradedModule,
        partial: Vec<Matrix>,
        nabla: Vec<Vec<Matrix>>,
        omegas: Vec<EndValuedForm>,
    ) -> Result<Self> {
        let n = algebra.dim();
        let nd = module.degrees();
        if partial.len() != nd - 1 {
            return Err(Error::Dimension(format!("{} ∂ blocks for {nd} degrees", partial.len())));
        }
        for (q, d) in partial.iter().enumerate() {
            if d.rows() != module.rank(q + 1) || d.cols() != module.rank(q) {
                return Err(Error::Dimension(format!("∂ block {q} → {} has the wrong shape", q + 1)));
            }
        }
        if nabla.len() != nd {
            return Err(Error::Dimension(format!("{} connections for {nd} degrees", nabla.len())));
        }
        for (q, acts) in nabla.iter().enumerate() {
            let r = module.rank(q);
            if acts.len() != n || acts.iter().any(|m| m.rows() != r || m.cols() != r) {
                return Err(Error::Dimension(format!("connection in degree {q} has the wrong shape")));
            }
        }
        let mut seen = Vec::new();
        for w in &omegas {
            if w.degree < 2 || w.degree > n || w.shift != 1 - w.degree as isize || seen.contains(&w.degree) {
                return Err(Error::Dimension(format!("End-valued form of degree {} is not admissible", w.degree)));
            }
            seen.push(w.degree);
            if w.blocks.len() != nd {
                return Err(Error::Dimension("End-valued form has the wrong number of blocks".into()));
            }
            for (q, b) in w.blocks.iter().enumerate() {
                let expected = module.shifted(q, w.shift).map(|t| module.rank(t) * module.rank(q));
                match (b, expected) {
                    (None, None) => {}
                    (Some(f), Some(width)) if f.width() == width && f.degree() == w.degree && f.dim() == n => {}
                    _ => return Err(Error::Dimension(format!("block {q} of ω_{} has the wrong shape", w.degree))),
                }
            }
        }
        Ok(RuthData { algebra, module, partial, nabla, omegas })
    }

    pub fn algebra(&self) -> &HomLieAlgebra {
        &self.algebra
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn partial(&self) -> &[Matrix] {
        &self.partial
    }

    pub fn nabla(&self) -> &[Vec<Matrix>] {
        &self.nabla
    }

    pub fn omegas(&self) -> &[EndValuedForm] {
        &self.omegas
    }

    pub fn omega(&self, k: usize) -> Option<&EndValuedForm> {
        self.omegas.iter().find(|w| w.degree == k)
    }

    pub fn connection(&self, q: usize) -> Connection {
        Connection::new(self.algebra.clone(), self.module.alpha(q).clone(), self.nabla[q].clone())
            .expect("shapes validated on construction")
    }

    pub fn partial_form(&self) -> EndValuedForm {
        EndValuedForm::valuewise(&self.module, self.algebra.dim(), 1, &self.partial).expect("shapes validated")
    }

    /// Union over degrees of the bases of the Θ-compatible form spaces.
    pub fn spanning_set(&self) -> Vec<(String, GradedElement)> {
        let n = self.algebra.dim();
        let mut out = Vec::new();
        for q in 0..self.module.degrees() {
            if self.module.rank(q) == 0 {
                continue;
            }
            for p in 0..=n {
                let b = compatible_basis(self.algebra.twist(), self.module.alpha(q).matrix(), p);
                for (j, f) in b.forms.into_iter().enumerate() {
                    out.push((format!("basis form {} of Ω^{p}(ε^{q})", j + 1), GradedElement::single(q, f)));
                }
            }
        }
        out
    }

    fn with_signs(&self, partial_sign: &Q, omega_sign: impl Fn(usize) -> Q) -> RuthData {
        RuthData {
            algebra: self.algebra.clone(),
            module: self.module.clone(),
            partial: self.partial.iter().map(|m| m.scale(partial_sign)).collect(),
            nabla: self.nabla.clone(),
            omegas: self.omegas.iter().map(|w| w.scale(&omega_sign(w.degree))).collect(),
        }
    }
}

fn check_shape(r: &RuthData, eta: &GradedElement) -> Result<()> {
    let n = r.algebra.dim();
    if eta.n != n {
        return Err(Error::Dimension(format!("element lives on dimension {}, data on {n}", eta.n)));
    }
    for (&(p, q), f) in &eta.comps {
        if q >= r.module.degrees() || f.width() != r.module.rank(q) || f.degree() != p || f.dim() != n {
            return Err(Error::Dimension(format!("component ({p},{q}) does not match the graded module")));
        }
    }
    Ok(())
}

/// `D(η) = ∂η + d_∇η + Σ_k ω_k∧η` with Koszul signs.
pub fn assemble_d(r: &RuthData, eta: &GradedElement) -> Result<GradedElement> {
    check_shape(r, eta)?;
    let mut out = GradedElement::zero(eta.n);
    r.partial_form().apply_into(&r.module, eta, &mut out);
    for (&(_, q), f) in &eta.comps {
        let conn = &r.nabla[q];
        let nabla = |x: &[Q]| {
            let rq = r.module.rank(q);
            let mut m = Matrix::zeros(rq, rq);
            for (xi, a) in x.iter().zip(conn) {
                if !xi.is_zero() {
                    m.add_scaled(xi, a);
                }
            }
            m
        };
        let d = differential_raw(&r.algebra, &nabla, f);
        out.accumulate(d.degree(), q, &d, false);
    }
    for w in &r.omegas {
        w.apply_into(&r.module, eta, &mut out);
    }
    Ok(out)
}

fn block_name(k: usize) -> String {
    match k {
        0 => "d2-block-0-partial-squared".into(),
        1 => "d2-block-1-partial-connection".into(),
        2 => "d2-block-2-curvature".into(),
        k => format!("d2-block-{k}-structure-equation"),
    }
}

/// Item-wise invariants of the data.
pub fn invariant_report(r: &RuthData) -> Report {
    let n = r.algebra.dim();
    let theta = r.algebra.twist();
    let m = &r.module;
    let mut rep = Report::new("ruth");
    let w = (0..r.partial.len().saturating_sub(1)).find_map(|q| {
        let sq = &r.partial[q + 1] * &r.partial[q];
        (!sq.is_zero()).then(|| format!("ε^{q} → ε^{}: {sq:?}", q + 2))
    });
    rep.record("partial-squared", w);
    let w = r.partial.iter().enumerate().find_map(|(q, d)| {
        let res = &(m.alpha(q + 1).matrix() * d) - &(d * m.alpha(q).matrix());
        (!res.is_zero()).then(|| format!("ε^{q} → ε^{}: residual {res:?}", q + 1))
    });
    rep.record("partial-alpha", w);
    let w = (0..m.degrees()).find_map(|q| {
        let c = check_connection(&r.connection(q));
        c.get("alpha-compatibility").and_then(|c| c.witness.clone()).map(|w| format!("degree {q}, {w}"))
    });
    rep.record("connection-alpha-compatibility", w);
    let w = r.partial.iter().enumerate().find_map(|(q, d)| {
        (0..n).find_map(|i| {
            let res = &(&r.nabla[q + 1][i] * d) - &(d * &r.nabla[q][i]);
            (!res.is_zero()).then(|| format!("ε^{q} → ε^{}, X=e{}: residual {res:?}", q + 1, i + 1))
        })
    });
    rep.record("partial-connection", w);
    for w in &r.omegas {
        rep.record(format!("omega-{}-compatibility", w.degree), w.compatibility_witness(m, theta));
    }
    rep
}

/// Item-wise invariants, the bidegree blocks of `D²` on the full spanning set,
/// `Θ*D = α∘D` and the graded derivation rule.
pub fn structure_residuals(r: &RuthData) -> Report {
    let n = r.algebra.dim();
    let theta = r.algebra.twist();
    let mut rep = invariant_report(r);
    let span = r.spanning_set();
    let images: Vec<GradedElement> = span.iter().map(|(_, e)| assemble_d(r, e).expect("spanning set is well shaped")).collect();

    let max_block = n + 1;
    let mut block_witness: Vec<Option<String>> = vec![None; max_block + 1];
    for ((label, eta), d_eta) in span.iter().zip(&images) {
        let p0 = *eta.comps.keys().next().map(|(p, _)| p).expect("single component");
        let dd = assemble_d(r, d_eta).expect("image is well shaped");
        for (k, slot) in block_witness.iter_mut().enumerate() {
            if slot.is_none() {
                if let Some(v) = dd.shifted_part(p0, k).first_nonzero() {
                    *slot = Some(format!("{label}: {v}"));
                }
            }
        }
    }
    for (k, w) in block_witness.into_iter().enumerate() {
        rep.record(block_name(k), w);
    }

    let w = span.iter().zip(&images).find_map(|((label, _), d_eta)| {
        let mut res = GradedElement::zero(n);
        for (&(p, q), f) in &d_eta.comps {
            let c = compatibility_residual(theta, r.module.alpha(q).matrix(), f);
            res.accumulate(p, q, &c, false);
        }
        res.first_nonzero().map(|v| format!("{label}: {v}"))
    });
    rep.record("theta-compatibility", w);
    rep.record("graded-derivation-rule", derivation_rule_witness(r, &span, &images));
    rep
}

fn derivation_rule_witness(r: &RuthData, span: &[(String, GradedElement)], images: &[GradedElement]) -> Option<String> {
    let g = &r.algebra;
    let n = g.dim();
    let theta = g.twist();
    for p in 0..=n {
        let scalars = compatible_basis(theta, &Matrix::identity(1), p);
        for (i, om) in scalars.forms.iter().enumerate() {
            let d_om = scalar_differential(g, om);
            let t_om = theta_pullback(theta, om);
            for ((label, eta), d_eta) in span.iter().zip(images) {
                let lhs = assemble_d(r, &GradedElement::wedge_scalar(om, eta)).expect("well shaped");
                let a = GradedElement::wedge_scalar(&d_om, &eta.theta_pullback(theta));
                let b = GradedElement::wedge_scalar(&t_om, d_eta);
                let rhs = if p % 2 == 0 { a.add(&b) } else { a.sub(&b) };
                if let Some(v) = lhs.sub(&rhs).first_nonzero() {
                    return Some(format!("scalar form {} of degree {p} with {label}: {v}", i + 1));
                }
            }
        }
    }
    None
}

/// Degree-zero map `Σ_k φ_k` with `φ_k` of form degree `k` and End-degree `−k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub parts: Vec<EndValuedForm>,
}

impl GradedMap {
    pub fn identity(module: &GradedModule, n: usize) -> Self {
        GradedMap { parts: vec![EndValuedForm::identity(module, n)] }
    }

    /// `(−1)^q` on `ε^q`.
    pub fn sign_grading(module: &GradedModule, n: usize) -> Self {
        let mats: Vec<Matrix> =
            (0..module.degrees()).map(|q| Matrix::scalar(module.rank(q), &if q % 2 == 0 { Q::one() } else { -Q::one() })).collect();
        GradedMap { parts: vec![EndValuedForm::valuewise(module, n, 0, &mats).expect("square blocks")] }
    }

    pub fn apply(&self, module: &GradedModule, eta: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(eta.n);
        for part in &self.parts {
            part.apply_into(module, eta, &mut out);
        }
        out
    }
}

/// Verdicts `intertwines-d` (φD = D′φ), `intertwines-alpha` (φα = βφ) and the
/// informational `preserves-compatibility`, on the spanning set of the source.
pub fn is_ruth_morphism(phi: &GradedMap, r: &RuthData, r2: &RuthData) -> Result<Report> {
    if r.algebra != r2.algebra || r.module.ranks() != r2.module.ranks() {
        return Err(Error::Dimension("representations on different algebras or graded ranks".into()));
    }
    let n = r.algebra.dim();
    for part in &phi.parts {
        let shape_ok = part.shift == -(part.degree as isize)
            && part.blocks.len() == r.module.degrees()
            && part.blocks.iter().enumerate().all(|(q, b)| match (b, r.module.shifted(q, part.shift)) {
                (Some(f), Some(t)) => f.dim() == n && f.degree() == part.degree && f.width() == r.module.rank(t) * r.module.rank(q),
                (None, None) => true,
                _ => false,
            });
        if !shape_ok {
            return Err(Error::Dimension("graded map part has the wrong shape".into()));
        }
    }
    let theta = r.algebra.twist();
    let mut rep = Report::new("morphism");
    let span = r.spanning_set();
    let w = span.iter().find_map(|(label, eta)| {
        let lhs = phi.apply(&r.module, &assemble_d(r, eta).expect("well shaped"));
        let rhs = assemble_d(r2, &phi.apply(&r.module, eta)).expect("well shaped");
        lhs.sub(&rhs).first_nonzero().map(|v| format!("{label}: {v}"))
    });
    rep.record("intertwines-d", w);
    let w = span.iter().find_map(|(label, eta)| {
        let lhs = phi.apply(&r.module, &eta.twist(&r.module));
        let rhs = phi.apply(&r.module, eta).twist(&r2.module);
        lhs.sub(&rhs).first_nonzero().map(|v| format!("{label}: {v}"))
    });
    rep.record("intertwines-alpha", w);
    let w = span.iter().find_map(|(label, eta)| {
        let img = phi.apply(&r.module, eta);
        let mut res = GradedElement::zero(n);
        for (&(p, q), f) in &img.comps {
            res.accumulate(p, q, &compatibility_residual(theta, r2.module.alpha(q).matrix(), f), false);
        }
        res.first_nonzero().map(|v| format!("{label}: {v}"))
    });
    rep.record_info("preserves-compatibility", w);
    Ok(rep)
}

/// The twin with `∂ ↦ −∂` and `ω_k ↦ (−1)^{k+1} ω_k`, and the verdict that
/// `(−1)^q` on `ε^q` intertwines the two.
pub fn sign_flip_twin(r: &RuthData) -> (RuthData, Report) {
    let twin = r.with_signs(&-Q::one(), |k| if k % 2 == 1 { Q::one() } else { -Q::one() });
    let phi = GradedMap::sign_grading(&r.module, r.algebra.dim());
    let rep = is_ruth_morphism(&phi, r, &twin).expect("twin has the same shape");
    (twin, rep)
}

/// A representation viewed as data concentrated in degree zero.
pub fn from_representation(c: &Connection) -> Result<RuthData> {
    let rep = check_connection(c);
    if let Some(f) = rep.failures().next() {
        return Err(Error::NotRepresentation(format!("{}: {}", f.id, f.witness.clone().unwrap_or_default())));
    }
    RuthData::new(c.algebra().clone(), GradedModule::new(vec![c.alpha().clone()])?, Vec::new(), vec![c.action().to_vec()], Vec::new())
}

/// Trivial lines in degrees `0` and `k−1` (zero in between) with `ω_k = ω`,
/// for a closed scalar `k`-form with `Θ*ω = a·ω`.  Twists: `a` on degree 0, `1` on degree `k−1`.
pub fn from_closed_form(g: &HomLieAlgebra, omega: &Form, a: &Q) -> Result<RuthData> {
    let n = g.dim();
    let k = omega.degree();
    if omega.width() != 1 || omega.dim() != n {
        return Err(Error::Dimension("expected a scalar form on the algebra".into()));
    }
    if k < 2 {
        return Err(Error::Precondition(format!("a {k}-form does not give two distinct degrees; need degree ≥ 2")));
    }
    if a.is_zero() {
        return Err(Error::Precondition("the twist scalar must be nonzero".into()));
    }
    if !scalar_differential(g, omega).is_zero() {
        return Err(Error::Precondition("ω is not closed".into()));
    }
    if theta_pullback(g.twist(), omega) != omega.scale(a) {
        return Err(Error::Precondition("Θ*ω ≠ a·ω".into()));
    }
    let alphas: Vec<TwistMap> = (0..k)
        .map(|q| match q {
            0 => TwistMap::new(Matrix::scalar(1, a)),
            q if q == k - 1 => Ok(TwistMap::identity(1)),
            _ => Ok(TwistMap::identity(0)),
        })
        .collect::<Result<_>>()?;
    let module = GradedModule::new(alphas)?;
    let partial = (0..k - 1).map(|q| Matrix::zeros(module.rank(q + 1), module.rank(q))).collect();
    let nabla = (0..k).map(|q| vec![Matrix::zeros(module.rank(q), module.rank(q)); n]).collect();
    let mut w = EndValuedForm::zero(&module, n, k, 1 - k as isize);
    w.blocks[k - 1] = Some(omega.clone());
    RuthData::new(g.clone(), module, partial, nabla, vec![w])
}

/// `Id + θ∧·` between the data of two cohomologous closed forms, `dθ = ω − ω′`.
pub fn cohomologous_isomorphism(r: &RuthData, r2: &RuthData, theta_form: &Form) -> Result<Report> {
    let (w1, w2) = match (r.omegas(), r2.omegas()) {
        ([a], [b]) if a.degree == b.degree => (a, b),
        _ => return Err(Error::Precondition("both inputs must come from closed forms of the same degree".into())),
    };
    let k = w1.degree;
    let top = |w: &EndValuedForm| w.blocks[k - 1].clone().ok_or_else(|| Error::Precondition("missing top block".into()));
    let (om1, om2) = (top(w1)?, top(w2)?);
    if theta_form.degree() + 1 != k || theta_form.width() != 1 {
        return Err(Error::Precondition(format!("θ must be a scalar {}-form", k - 1)));
    }
    if scalar_differential(&r.algebra, theta_form) != om1.sub(&om2) {
        return Err(Error::Precondition("dθ ≠ ω − ω′".into()));
    }
    let n = r.algebra.dim();
    let mut part = EndValuedForm::zero(&r.module, n, k - 1, -(k as isize - 1));
    part.blocks[k - 1] = Some(theta_form.clone());
    let phi = GradedMap { parts: vec![EndValuedForm::identity(&r.module, n), part] };
    is_ruth_morphism(&phi, r, r2)
}
