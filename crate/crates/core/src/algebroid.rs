//! Algebraic model of hom-Lie algebroids: a free module of rank `n` over a
//! finite-dimensional commutative ℚ-algebra `C`, derivation-valued anchors
//! and an algebra endomorphism θ* of `C`.
//!
//! A section `Σ_i X_i e_i` (with `X_i ∈ C`) is stored by its ℚ-coordinates,
//! index `i * m + β` holding the `b_β` coefficient of `X_i`.  The bracket is
//! the ℚ-bilinear map determined on `b_α e_i, b_β e_j` by antisymmetry in the
//! first slot and the hom-Leibniz rule in the second:
//!
//! `[b_α e_i, b_β e_j] = θ*(b_β)θ*(b_α)[e_i,e_j] − θ*(b_β)ρ(e_j)(b_α)Θ(e_i) + b_α ρ(e_i)(b_β)Θ(e_j)`.
//!
//! Nothing forces that map to be antisymmetric or to satisfy the Leibniz rule
//! for non-basis first arguments, so the axiom checks below are genuine.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::homlie::HomLieAlgebra;
use crate::linalg::{
    add_vec, axpy, format_rational, is_zero_vec, rank_of_vectors, sub_vec, unit_vec, zero_vec, Matrix, Tensor3, Vector, Q,
};
use crate::report::Report;

/// Commutative unital algebra with basis `b_1, …, b_m`; `product[k][i][j]` is the `b_k` coefficient of `b_i b_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseAlgebra {
    product: Tensor3,
    unit: Vector,
    endo: Matrix,
}

impl BaseAlgebra {
    pub fn new(product: Tensor3, unit: Vector, endo: Matrix) -> Result<Self> {
        let m = product.dim();
        if unit.len() != m || endo.rows() != m || endo.cols() != m {
            return Err(Error::Dimension(format!("base algebra of dimension {m} has mismatched unit or θ*")));
        }
        Ok(BaseAlgebra { product, unit, endo })
    }

    /// `C = ℚ`, θ* = 1.
    pub fn point() -> Self {
        let mut p = Tensor3::zeros(1);
        p.set(0, 0, 0, Q::one());
        BaseAlgebra { product: p, unit: vec![Q::one()], endo: Matrix::identity(1) }
    }

    /// `ℚ[x_1..x_k]/(x_1..x_k)²` with basis `1, x_1, …, x_k`.
    pub fn square_zero(k: usize, endo: Matrix) -> Result<Self> {
        let m = k + 1;
        let mut p = Tensor3::zeros(m);
        p.set(0, 0, 0, Q::one());
        for i in 1..m {
            p.set(i, 0, i, Q::one());
            p.set(i, i, 0, Q::one());
        }
        Self::new(p, unit_vec(m, 0), endo)
    }

    pub fn dim(&self) -> usize {
        self.product.dim()
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    /// Matrix of θ*.
    pub fn endo(&self) -> &Matrix {
        &self.endo
    }

    pub fn structure(&self) -> &Tensor3 {
        &self.product
    }

    pub fn mul(&self, f: &[Q], g: &[Q]) -> Vector {
        let m = self.dim();
        let mut out = zero_vec(m);
        for (i, fi) in f.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, gj) in g.iter().enumerate() {
                if gj.is_zero() {
                    continue;
                }
                let s = fi * gj;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.product.get(k, i, j);
                    if !c.is_zero() {
                        *o += &s * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `f`.
    pub fn mult_matrix(&self, f: &[Q]) -> Matrix {
        let m = self.dim();
        let cols: Vec<Vector> = (0..m).map(|j| self.mul(f, &unit_vec(m, j))).collect();
        Matrix::from_columns(m, &cols)
    }

    pub fn theta(&self, f: &[Q]) -> Vector {
        self.endo.mul_vec(f)
    }

    /// Verdicts for commutativity, associativity, unitality and multiplicativity of θ*.
    pub fn check(&self) -> Report {
        let m = self.dim();
        let e = |i| unit_vec(m, i);
        let label = |xs: &[usize]| {
            let t: Vec<String> = xs.iter().map(|i| format!("b{}", i + 1)).collect();
            format!("({})", t.join(","))
        };
        let mut r = Report::new("base");
        let mut w = None;
        'c: for i in 0..m {
            for j in 0..m {
                if self.mul(&e(i), &e(j)) != self.mul(&e(j), &e(i)) {
                    w = Some(label(&[i, j]));
                    break 'c;
                }
            }
        }
        r.record("commutativity", w);
        let mut w = None;
        'a: for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let l = self.mul(&self.mul(&e(i), &e(j)), &e(k));
                    let rr = self.mul(&e(i), &self.mul(&e(j), &e(k)));
                    if l != rr {
                        w = Some(label(&[i, j, k]));
                        break 'a;
                    }
                }
            }
        }
        r.record("associativity", w);
        let w = (0..m).find(|&i| self.mul(&self.unit, &e(i)) != e(i) || self.mul(&e(i), &self.unit) != e(i)).map(|i| label(&[i]));
        r.record("unitality", w);
        r.record("theta-unit", (self.theta(&self.unit) != self.unit).then(|| "θ*(1) ≠ 1".to_string()));
        let mut w = None;
        'm: for i in 0..m {
            for j in 0..m {
                if self.theta(&self.mul(&e(i), &e(j))) != self.mul(&self.theta(&e(i)), &self.theta(&e(j))) {
                    w = Some(label(&[i, j]));
                    break 'm;
                }
            }
        }
        r.record("theta-multiplicative", w);
        r
    }

    /// ℚ-basis of the derivations of this algebra, as `m×m` matrices.
    pub fn derivation_space(&self) -> Vec<Matrix> {
        let m = self.dim();
        // Unknown D (m² entries, row-major); equations D(b_i b_j) − D(b_i) b_j − b_i D(b_j) = 0.
        let mut rows = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let bij = self.mul(&unit_vec(m, i), &unit_vec(m, j));
                let rj = self.mult_matrix(&unit_vec(m, j));
                let ri = self.mult_matrix(&unit_vec(m, i));
                for out in 0..m {
                    let mut row = zero_vec(m * m);
                    for (s, c) in bij.iter().enumerate() {
                        if !c.is_zero() {
                            row[out * m + s] += c;
                        }
                    }
                    for t in 0..m {
                        row[t * m + i] -= rj.get(out, t);
                        row[t * m + j] -= ri.get(out, t);
                    }
                    rows.push(row);
                }
            }
        }
        Matrix::from_rows(rows).kernel_basis().into_iter().map(|v| Matrix::from_flat(m, m, v)).collect()
    }
}

/// `m×m` matrix of a ℚ-linear map of the base that must satisfy the Leibniz rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationOf(pub Matrix);

impl DerivationOf {
    pub fn leibniz_witness(&self, base: &BaseAlgebra) -> Option<String> {
        let m = base.dim();
        let d = &self.0;
        for i in 0..m {
            for j in 0..m {
                let (bi, bj) = (unit_vec(m, i), unit_vec(m, j));
                let lhs = d.mul_vec(&base.mul(&bi, &bj));
                let rhs = add_vec(&base.mul(&d.mul_vec(&bi), &bj), &base.mul(&bi, &d.mul_vec(&bj)));
                if lhs != rhs {
                    return Some(format!("(b{},b{})", i + 1, j + 1));
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomLieAlgebroidModel {
    base: BaseAlgebra,
    rank: usize,
    /// `bracket[(k*n + i)*n + j]` is the `e_k` coefficient (in `C`) of `[e_i, e_j]`.
    bracket: Vec<Vector>,
    anchor: Vec<DerivationOf>,
    /// `twist[k*n + j]` is the `e_k` coefficient of `Θ(e_j)`.
    twist: Vec<Vector>,
}

impl HomLieAlgebroidModel {
    pub fn new(base: BaseAlgebra, rank: usize, bracket: Vec<Vector>, anchor: Vec<DerivationOf>, twist: Vec<Vector>) -> Result<Self> {
        let (m, n) = (base.dim(), rank);
        let bad = |what: &str| Error::Dimension(format!("algebroid of rank {n} over a base of dimension {m}: {what}"));
        if bracket.len() != n * n * n || bracket.iter().any(|v| v.len() != m) {
            return Err(bad("bracket coefficients"));
        }
        if anchor.len() != n || anchor.iter().any(|d| d.0.rows() != m || d.0.cols() != m) {
            return Err(bad("anchor"));
        }
        if twist.len() != n * n || twist.iter().any(|v| v.len() != m) {
            return Err(bad("twist"));
        }
        Ok(HomLieAlgebroidModel { base, rank, bracket, anchor, twist })
    }

    /// Antisymmetric completion of entries `(k, i, j, f)` given for `i < j`.
    pub fn from_entries(
        base: BaseAlgebra,
        rank: usize,
        entries: &[(usize, usize, usize, Vector)],
        anchor: Vec<DerivationOf>,
        twist: Vec<Vector>,
    ) -> Result<Self> {
        let (m, n) = (base.dim(), rank);
        let mut bracket = vec![zero_vec(m); n * n * n];
        for (k, i, j, f) in entries {
            let (k, i, j) = (*k, *i, *j);
            if k >= n || i >= n || j >= n || f.len() != m {
                return Err(Error::Dimension(format!("bracket entry ({k},{i},{j}) out of range")));
            }
            if i >= j {
                return Err(Error::Malformed(format!("bracket entry ({k},{i},{j}) must have i < j")));
            }
            let v = add_vec(&bracket[(k * n + i) * n + j], f);
            bracket[(k * n + j) * n + i] = v.iter().map(|x| -x).collect();
            bracket[(k * n + i) * n + j] = v;
        }
        Self::new(base, rank, bracket, anchor, twist)
    }

    /// A hom-Lie algebra viewed over `C = ℚ` with zero anchor.
    pub fn over_point(g: &HomLieAlgebra) -> Self {
        let n = g.dim();
        let mut bracket = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    bracket.push(vec![g.structure().get(k, i, j).clone()]);
                }
            }
        }
        let twist = (0..n * n).map(|idx| vec![g.twist().get(idx / n, idx % n).clone()]).collect();
        let anchor = vec![DerivationOf(Matrix::zeros(1, 1)); n];
        HomLieAlgebroidModel { base: BaseAlgebra::point(), rank: n, bracket, anchor, twist }
    }

    pub fn base(&self) -> &BaseAlgebra {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn anchors(&self) -> &[DerivationOf] {
        &self.anchor
    }

    pub fn bracket_coefficient(&self, k: usize, i: usize, j: usize) -> &Vector {
        &self.bracket[(k * self.rank + i) * self.rank + j]
    }

    pub fn twist_coefficient(&self, k: usize, j: usize) -> &Vector {
        &self.twist[k * self.rank + j]
    }

    /// Dimension of the space of sections over ℚ.
    pub fn q_dim(&self) -> usize {
        self.base.dim() * self.rank
    }

    pub fn section_label(&self, idx: usize) -> String {
        let m = self.base.dim();
        if m == 1 {
            format!("e{}", idx + 1)
        } else {
            format!("b{}e{}", idx % m + 1, idx / m + 1)
        }
    }

    pub fn format_section(&self, v: &[Q]) -> String {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| if c.is_one() { self.section_label(i) } else { format!("{}·{}", format_rational(c), self.section_label(i)) })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// The section `Σ_k coeff(k) e_k`.
    fn section(&self, coeff: impl Fn(usize) -> Vector) -> Vector {
        (0..self.rank).flat_map(coeff).collect()
    }

    pub fn function_times_section(&self, f: &[Q], s: &[Q]) -> Vector {
        let m = self.base.dim();
        s.chunks(m).flat_map(|c| self.base.mul(f, c)).collect()
    }

    /// Θ on sections, extended θ*-semilinearly from the basis.
    pub fn twist_matrix(&self) -> Matrix {
        let (m, n) = (self.base.dim(), self.rank);
        let cols: Vec<Vector> = (0..m * n)
            .map(|idx| {
                let (j, a) = (idx / m, idx % m);
                let ta = self.base.theta(&unit_vec(m, a));
                self.section(|k| self.base.mul(&ta, self.twist_coefficient(k, j)))
            })
            .collect();
        Matrix::from_columns(m * n, &cols)
    }

    /// Anchor of a section, `Σ_i X_i ρ(e_i)`, as an `m×m` matrix.
    pub fn anchor_of(&self, x: &[Q]) -> Matrix {
        let m = self.base.dim();
        let mut out = Matrix::zeros(m, m);
        for (i, xi) in x.chunks(m).enumerate() {
            if is_zero_vec(xi) {
                continue;
            }
            out = &out + &(&self.base.mult_matrix(xi) * &self.anchor[i].0);
        }
        out
    }

    fn basis_section_bracket(&self, x: usize, y: usize) -> Vector {
        let (m, n) = (self.base.dim(), self.rank);
        let (i, a) = (x / m, x % m);
        let (j, b) = (y / m, y % m);
        let (ba, bb) = (unit_vec(m, a), unit_vec(m, b));
        let (ta, tb) = (self.base.theta(&ba), self.base.theta(&bb));
        let tt = self.base.mul(&tb, &ta);
        let c1 = self.section(|k| self.base.mul(&tt, self.bracket_coefficient(k, i, j)));
        let g2 = self.base.mul(&tb, &self.anchor[j].0.mul_vec(&ba));
        let c2 = self.section(|k| self.base.mul(&g2, self.twist_coefficient(k, i)));
        let g3 = self.base.mul(&ba, &self.anchor[i].0.mul_vec(&bb));
        let c3 = self.section(|k| self.base.mul(&g3, self.twist_coefficient(k, j)));
        let _ = n;
        add_vec(&sub_vec(&c1, &c2), &c3)
    }

    /// The ℚ-bilinear section bracket as a hom-Lie algebra over ℚ of dimension `m·n`.
    pub fn realize(&self) -> HomLieAlgebra {
        let d = self.q_dim();
        let mut t = Tensor3::zeros(d);
        for x in 0..d {
            for y in 0..d {
                for (k, v) in self.basis_section_bracket(x, y).into_iter().enumerate() {
                    t.set(k, x, y, v);
                }
            }
        }
        HomLieAlgebra::new(t, self.twist_matrix()).expect("realized shapes agree")
    }

    pub fn is_totally_intransitive(&self) -> bool {
        self.anchor.iter().all(|d| d.0.is_zero())
    }

    fn anchor_image(&self) -> Vec<Vector> {
        let m = self.base.dim();
        (0..self.q_dim()).map(|x| self.anchor_of(&unit_vec(self.q_dim(), x)).as_flat().to_vec()).filter(|v| v.len() == m * m).collect()
    }

    /// Anchor onto all derivations and θ* injective.
    pub fn is_transitive(&self) -> bool {
        let m = self.base.dim();
        let image = rank_of_vectors(m * m, &self.anchor_image());
        let ders = self.base.derivation_space().len();
        image == ders && self.base.endo().rank() == m
    }

    /// The anchor image is a free `C`-module.
    pub fn is_regular(&self) -> bool {
        let m = self.base.dim();
        let gens: Vec<Vector> = self.anchor.iter().map(|d| d.0.as_flat().to_vec()).collect();
        let mult = |f: &[Q], v: &[Q]| -> Vector { (&self.base.mult_matrix(f) * &Matrix::from_flat(m, m, v.to_vec())).as_flat().to_vec() };
        free_basis(m, m * m, &gens, &mult).is_some()
    }
}

/// Greedy free basis of the `C`-module generated by `gens` inside `C^N` (ℚ-length `len`).
/// `mult(f, v)` is the module action.  `None` when the greedy search does not find one.
pub fn free_basis(m: usize, len: usize, gens: &[Vector], mult: &dyn Fn(&[Q], &[Q]) -> Vector) -> Option<Vec<Vector>> {
    let orbit = |v: &[Q]| -> Vec<Vector> { (0..m).map(|b| mult(&unit_vec(m, b), v)).collect() };
    let mut target: Vec<Vector> = Vec::new();
    for g in gens {
        target.extend(orbit(g));
    }
    let full = rank_of_vectors(len, &target);
    let mut span: Vec<Vector> = Vec::new();
    let mut chosen = Vec::new();
    let mut current = 0;
    for g in gens {
        if current == full {
            break;
        }
        let mut trial = span.clone();
        trial.extend(orbit(g));
        let r = rank_of_vectors(len, &trial);
        if r == current + m {
            span = trial;
            current = r;
            chosen.push(g.clone());
        }
    }
    (current == full).then_some(chosen)
}

/// Verdicts for every algebroid axiom plus informational flags.
pub fn check_algebroid_axioms(a: &HomLieAlgebroidModel) -> Result<Report> {
    let base_report = a.base.check();
    if !base_report.all_passed() {
        let w: Vec<String> = base_report.failures().map(|c| c.id.clone()).collect();
        return Err(Error::MalformedBase(w.join(", ")));
    }
    let (m, d) = (a.base.dim(), a.q_dim());
    let g = a.realize();
    let theta = g.twist();
    let e = |x| unit_vec(d, x);
    let lbl = |xs: &[usize]| -> String {
        let t: Vec<String> = xs.iter().map(|&x| a.section_label(x)).collect();
        format!("({})", t.join(","))
    };
    let mut r = Report::new("axioms");

    let w = a.anchor.iter().enumerate().find_map(|(i, der)| der.leibniz_witness(&a.base).map(|w| format!("ρ(e{}) at {w}", i + 1)));
    r.record("anchor-derivations", w);

    let mut w = None;
    'semi: for x in 0..d {
        for b in 0..m {
            let f = unit_vec(m, b);
            let lhs = theta.mul_vec(&a.function_times_section(&f, &e(x)));
            let rhs = a.function_times_section(&a.base.theta(&f), &theta.mul_vec(&e(x)));
            if lhs != rhs {
                w = Some(format!("f=b{}, X={}: residual {}", b + 1, a.section_label(x), a.format_section(&sub_vec(&lhs, &rhs))));
                break 'semi;
            }
        }
    }
    r.record("semilinearity", w);

    let mut w = None;
    'anti: for x in 0..d {
        for y in x..d {
            let s = add_vec(&g.bracket(&e(x), &e(y)), &g.bracket(&e(y), &e(x)));
            if !is_zero_vec(&s) {
                w = Some(format!("{}: residual {}", lbl(&[x, y]), a.format_section(&s)));
                break 'anti;
            }
        }
    }
    r.record("antisymmetry", w);

    let mut w = None;
    'mult: for x in 0..d {
        for y in 0..d {
            let s = sub_vec(&g.bracket(&theta.column(x), &theta.column(y)), &theta.mul_vec(&g.bracket(&e(x), &e(y))));
            if !is_zero_vec(&s) {
                w = Some(format!("{}: residual {}", lbl(&[x, y]), a.format_section(&s)));
                break 'mult;
            }
        }
    }
    r.record("multiplicativity", w);

    let mut w = None;
    'jac: for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let s = g.hom_jacobiator(&e(x), &e(y), &e(z));
                if !is_zero_vec(&s) {
                    w = Some(format!("{}: residual {}", lbl(&[x, y, z]), a.format_section(&s)));
                    break 'jac;
                }
            }
        }
    }
    r.record("hom-jacobi", w);

    let mut w = None;
    'leib: for x in 0..d {
        let rho_x = a.anchor_of(&e(x));
        for b in 0..m {
            let f = unit_vec(m, b);
            for y in 0..d {
                let lhs = g.bracket(&e(x), &a.function_times_section(&f, &e(y)));
                let mut rhs = a.function_times_section(&a.base.theta(&f), &g.bracket(&e(x), &e(y)));
                let t = a.function_times_section(&rho_x.mul_vec(&f), &theta.column(y));
                axpy(&mut rhs, &Q::one(), &t);
                if lhs != rhs {
                    w = Some(format!(
                        "X={}, f=b{}, Y={}: residual {}",
                        a.section_label(x),
                        b + 1,
                        a.section_label(y),
                        a.format_section(&sub_vec(&lhs, &rhs))
                    ));
                    break 'leib;
                }
            }
        }
    }
    r.record("hom-leibniz", w);

    let ts = a.base.endo();
    let w = (0..d).find_map(|x| {
        let lhs = &a.anchor_of(&theta.column(x)) * ts;
        let rhs = ts * &a.anchor_of(&e(x));
        (lhs != rhs).then(|| format!("X={}: ρ(ΘX)∘θ* = {lhs:?}, θ*∘ρ(X) = {rhs:?}", a.section_label(x)))
    });
    r.record("anchor-twist", w);

    let mut w = None;
    'rep: for x in 0..d {
        for y in 0..d {
            let lhs = &a.anchor_of(&g.bracket(&e(x), &e(y))) * ts;
            let rhs = &(&a.anchor_of(&theta.column(x)) * &a.anchor_of(&e(y))) - &(&a.anchor_of(&theta.column(y)) * &a.anchor_of(&e(x)));
            if lhs != rhs {
                w = Some(format!("{}: residual {:?}", lbl(&[x, y]), &lhs - &rhs));
                break 'rep;
            }
        }
    }
    r.record("anchor-bracket", w);

    r.record_info("totally-intransitive", (!a.is_totally_intransitive()).then(|| "some anchor is nonzero".to_string()));
    r.record_info("transitive", (!a.is_transitive()).then(|| "anchor not onto the derivations or θ* not injective".to_string()));
    r.record_info("regular", (!a.is_regular()).then(|| "anchor image is not a free module".to_string()));
    Ok(r)
}

/// Coordinates `g ∈ C^k` with `Σ_c g_c s_c = v`, for sections `s_c` of a model with base `base`.
fn c_coordinates(base: &BaseAlgebra, rank: usize, basis: &[Vector], v: &[Q]) -> Option<Vec<Vector>> {
    let m = base.dim();
    let len = m * rank;
    let cols: Vec<Vector> = basis
        .iter()
        .flat_map(|s| {
            (0..m).map(move |b| {
                let f = unit_vec(m, b);
                s.chunks(m).flat_map(|c| base.mul(&f, c)).collect::<Vector>()
            })
        })
        .collect();
    let x = crate::linalg::coordinates_in(len, &cols, v)?;
    Some(x.chunks(m).map(<[Q]>::to_vec).collect())
}

/// Direct sum over a shared base.  With nonzero anchors the result is the
/// fiber product `{(X, X′) : ρ(X) = ρ′(X′)}`, re-expressed in a free basis.
pub fn direct_sum(a: &HomLieAlgebroidModel, b: &HomLieAlgebroidModel) -> Result<HomLieAlgebroidModel> {
    if a.base != b.base {
        return Err(Error::BaseMismatch);
    }
    let base = a.base.clone();
    let m = base.dim();
    let (n1, n2) = (a.rank, b.rank);
    let n = n1 + n2;
    let sum_section = |x: &[Q], y: &[Q]| -> Vector { x.iter().chain(y).cloned().collect() };

    let gens: Vec<Vector> = if a.is_totally_intransitive() && b.is_totally_intransitive() {
        (0..n)
            .map(|i| {
                let mut s = zero_vec(m * n);
                s[i * m..(i + 1) * m].clone_from_slice(base.unit());
                s
            })
            .collect()
    } else {
        // Kernel of (X, X′) ↦ ρ(X) − ρ′(X′) over ℚ.
        let (d1, d2) = (a.q_dim(), b.q_dim());
        let cols: Vec<Vector> = (0..d1)
            .map(|x| a.anchor_of(&unit_vec(d1, x)).as_flat().to_vec())
            .chain((0..d2).map(|y| b.anchor_of(&unit_vec(d2, y)).as_flat().iter().map(|v| -v).collect()))
            .collect();
        let ker = Matrix::from_columns(m * m, &cols).kernel_basis();
        let mult = |f: &[Q], s: &[Q]| -> Vector { s.chunks(m).flat_map(|c| base.mul(f, c)).collect() };
        free_basis(m, m * n, &ker, &mult).ok_or_else(|| Error::Unsatisfiable("fiber product is not a free module over the base".into()))?
    };

    let (d1, _) = (a.q_dim(), b.q_dim());
    let (ga, gb) = (a.realize(), b.realize());
    let bracket_sum = |x: &[Q], y: &[Q]| -> Vector { sum_section(&ga.bracket(&x[..d1], &y[..d1]), &gb.bracket(&x[d1..], &y[d1..])) };
    let theta_sum = ga.twist().direct_sum(gb.twist());
    let k = gens.len();
    let coords = |v: &[Q]| {
        c_coordinates(&base, n, &gens, v).ok_or_else(|| Error::Unsatisfiable("direct sum is not closed under its structure maps".into()))
    };
    let mut bracket = vec![zero_vec(m); k * k * k];
    for i in 0..k {
        for j in 0..k {
            let c = coords(&bracket_sum(&gens[i], &gens[j]))?;
            for (l, f) in c.into_iter().enumerate() {
                bracket[(l * k + i) * k + j] = f;
            }
        }
    }
    let mut twist = vec![zero_vec(m); k * k];
    for j in 0..k {
        let c = coords(&theta_sum.mul_vec(&gens[j]))?;
        for (l, f) in c.into_iter().enumerate() {
            twist[l * k + j] = f;
        }
    }
    let anchor = gens.iter().map(|s| DerivationOf(a.anchor_of(&s[..d1]))).collect();
    HomLieAlgebroidModel::new(base, k, bracket, anchor, twist)
}

/// A `C`-linear map between two models over the same base; `matrix[k*n + j]` is the
/// `e′_k` coefficient of `φ(e_j)`.
#[derive(Clone, Debug)]
pub struct AnchoredMorphism<'a> {
    pub source: &'a HomLieAlgebroidModel,
    pub target: &'a HomLieAlgebroidModel,
    pub matrix: Vec<Vector>,
}

impl<'a> AnchoredMorphism<'a> {
    pub fn new(source: &'a HomLieAlgebroidModel, target: &'a HomLieAlgebroidModel, matrix: Vec<Vector>) -> Result<Self> {
        if source.base != target.base {
            return Err(Error::BaseMismatch);
        }
        let m = source.base.dim();
        if matrix.len() != source.rank * target.rank || matrix.iter().any(|v| v.len() != m) {
            return Err(Error::Dimension("morphism matrix does not match the ranks".into()));
        }
        Ok(AnchoredMorphism { source, target, matrix })
    }

    /// A ℚ-linear map between hom-Lie algebras over a point.
    pub fn from_rational(source: &'a HomLieAlgebroidModel, target: &'a HomLieAlgebroidModel, phi: &Matrix) -> Result<Self> {
        if phi.rows() != target.rank || phi.cols() != source.rank {
            return Err(Error::Dimension("morphism matrix does not match the ranks".into()));
        }
        let unit = source.base.unit().clone();
        let matrix = (0..phi.rows() * phi.cols())
            .map(|idx| crate::linalg::scale_vec(phi.get(idx / phi.cols(), idx % phi.cols()), &unit))
            .collect::<Vec<_>>();
        Self::new(source, target, matrix)
    }

    /// ℚ-matrix on sections.
    pub fn q_matrix(&self) -> Matrix {
        let (s, t) = (self.source, self.target);
        let m = s.base.dim();
        let n = s.rank;
        let cols: Vec<Vector> = (0..s.q_dim())
            .map(|idx| {
                let (j, a) = (idx / m, idx % m);
                let ba = unit_vec(m, a);
                (0..t.rank).flat_map(|k| s.base.mul(&ba, &self.matrix[k * n + j])).collect()
            })
            .collect();
        Matrix::from_columns(t.q_dim(), &cols)
    }
}

/// Verdicts `anchor` (ρ′∘φ = ρ), `twist` (Θ′∘φ = φ∘Θ), `bracket` (φ[X,Y] = [φX,φY]).
pub fn is_algebroid_morphism(phi: &AnchoredMorphism<'_>) -> Report {
    let (s, t) = (phi.source, phi.target);
    let (gs, gt) = (s.realize(), t.realize());
    let p = phi.q_matrix();
    let d = s.q_dim();
    let e = |x| unit_vec(d, x);
    let mut r = Report::new("morphism");
    let w = (0..d).find_map(|x| (t.anchor_of(&p.column(x)) != s.anchor_of(&e(x))).then(|| format!("X={}", s.section_label(x))));
    r.record("anchor", w);
    let diff = &(gt.twist() * &p) - &(&p * gs.twist());
    let w = (0..d).find_map(|x| {
        let c = diff.column(x);
        (!is_zero_vec(&c)).then(|| format!("X={}: residual {}", s.section_label(x), t.format_section(&c)))
    });
    r.record("twist", w);
    let mut w = None;
    'b: for x in 0..d {
        for y in 0..d {
            let c = sub_vec(&p.mul_vec(&gs.bracket(&e(x), &e(y))), &gt.bracket(&p.column(x), &p.column(y)));
            if !is_zero_vec(&c) {
                w = Some(format!("({},{}): residual {}", s.section_label(x), s.section_label(y), t.format_section(&c)));
                break 'b;
            }
        }
    }
    r.record("bracket", w);
    r
}

/// Decides whether the graph of φ is a sub-algebroid of the direct sum by
/// subspace membership (rank tests), independently of the morphism equations,
/// and reports both verdicts together with their agreement.
pub fn graph_is_subalgebroid(phi: &AnchoredMorphism<'_>) -> Report {
    let (s, t) = (phi.source, phi.target);
    let (gs, gt) = (s.realize(), t.realize());
    let p = phi.q_matrix();
    let (d1, d2) = (s.q_dim(), t.q_dim());
    let len = d1 + d2;
    let graph: Vec<Vector> = (0..d1).map(|x| unit_vec(d1, x).into_iter().chain(p.column(x)).collect()).collect();
    let dim = rank_of_vectors(len, &graph);
    let in_graph = |v: &Vector| {
        let mut trial = graph.clone();
        trial.push(v.clone());
        rank_of_vectors(len, &trial) == dim
    };
    let theta = gs.twist().direct_sum(gt.twist());
    let bracket =
        |u: &[Q], v: &[Q]| -> Vector { gs.bracket(&u[..d1], &v[..d1]).into_iter().chain(gt.bracket(&u[d1..], &v[d1..])).collect() };
    let mut r = Report::new("graph");

    // The diagonal anchor is well defined on the graph iff it lies in the fiber product.
    let w = graph.iter().enumerate().find_map(|(x, u)| {
        let lhs = s.anchor_of(&u[..d1]);
        let rhs = t.anchor_of(&u[d1..]);
        (lhs != rhs).then(|| format!("generator {} leaves the fiber product", s.section_label(x)))
    });
    r.record("graph-in-fiber-product", w);
    let w = graph.iter().enumerate().find_map(|(x, u)| {
        let v = theta.mul_vec(u);
        (!in_graph(&v)).then(|| format!("(Θ⊕Θ′) of generator {} leaves the graph", s.section_label(x)))
    });
    r.record("twist-stable", w);
    let mut w = None;
    'b: for x in 0..d1 {
        for y in 0..d1 {
            let v = bracket(&graph[x], &graph[y]);
            if !in_graph(&v) {
                let off = sub_vec(&p.mul_vec(&v[..d1]), &v[d1..]);
                w = Some(format!(
                    "({},{}): residual (0, {}) off the graph",
                    s.section_label(x),
                    s.section_label(y),
                    t.format_section(&off)
                ));
                break 'b;
            }
        }
    }
    r.record("bracket-closed", w);
    let sub = r.all_passed();
    let morph = is_algebroid_morphism(phi);
    let is_morph = morph.all_passed();
    r.absorb("morphism-", morph);
    r.record_info("sub-algebroid", (!sub).then(|| "graph is not a sub-algebroid".to_string()));
    r.record_info("morphism", (!is_morph).then(|| "φ is not a morphism".to_string()));
    r.record("biconditional", (sub != is_morph).then(|| format!("sub-algebroid = {sub} but morphism = {is_morph}")));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homlie::check_hom_lie_axioms;
    use crate::linalg::{frac, int};

    fn heisenberg(twist: Matrix) -> HomLieAlgebra {
        HomLieAlgebra::from_entries(3, &[(2, 0, 1, int(1))], twist).unwrap()
    }

    /// `ℚ[x]/(x²)`, rank one, `[e,e] = 0`, anchor the Euler derivation `x ↦ x`.
    fn euler_line(endo: Matrix) -> HomLieAlgebroidModel {
        let base = BaseAlgebra::square_zero(1, endo).unwrap();
        let anchor = vec![DerivationOf(Matrix::from_i64(&[&[0, 0], &[0, 1]]))];
        HomLieAlgebroidModel::new(base, 1, vec![zero_vec(2)], anchor, vec![unit_vec(2, 0)]).unwrap()
    }

    #[test]
    fn point_model_agrees_with_core_checker() {
        for twist in [Matrix::diagonal(&[int(2), frac(1, 2), int(1)]), Matrix::diagonal(&[int(2), int(2), int(1)])] {
            let g = heisenberg(twist);
            let a = HomLieAlgebroidModel::over_point(&g);
            let r = check_algebroid_axioms(&a).unwrap();
            let core = check_hom_lie_axioms(&g);
            for id in ["antisymmetry", "multiplicativity", "hom-jacobi"] {
                assert_eq!(r.get(id), core.get(id), "{id}");
            }
            assert!(r.passed("totally-intransitive"));
        }
    }

    #[test]
    fn euler_derivation_model_passes() {
        let a = euler_line(Matrix::identity(2));
        let r = check_algebroid_axioms(&a).unwrap();
        assert!(r.all_passed(), "{}", r.to_text());
        assert!(!r.passed("totally-intransitive"));
    }

    #[test]
    fn plain_derivative_is_not_a_derivation_of_dual_numbers() {
        let base = BaseAlgebra::square_zero(1, Matrix::identity(2)).unwrap();
        let d = DerivationOf(Matrix::from_i64(&[&[0, 1], &[0, 0]]));
        assert!(d.leibniz_witness(&base).is_some());
    }

    #[test]
    fn noncommuting_theta_breaks_anchor_twist_condition() {
        // C = ℚ[x,y]/(x,y)², ρ(e): x ↦ y, θ*: x ↦ 2x.
        let base = BaseAlgebra::square_zero(2, Matrix::diagonal(&[int(1), int(2), int(1)])).unwrap();
        let anchor = vec![DerivationOf(Matrix::from_i64(&[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]]))];
        let a = HomLieAlgebroidModel::new(base, 1, vec![zero_vec(3)], anchor, vec![unit_vec(3, 0)]).unwrap();
        let r = check_algebroid_axioms(&a).unwrap();
        assert!(r.passed("anchor-derivations"));
        assert!(r.passed("semilinearity"));
        assert!(!r.passed("anchor-twist"));
    }

    #[test]
    fn malformed_base_is_an_error() {
        let mut p = Tensor3::zeros(1);
        p.set(0, 0, 0, int(1));
        let base = BaseAlgebra::new(p, vec![int(2)], Matrix::identity(1)).unwrap();
        let a = HomLieAlgebroidModel::new(base, 0, vec![], vec![], vec![]).unwrap();
        assert!(matches!(check_algebroid_axioms(&a), Err(Error::MalformedBase(_))));
    }

    #[test]
    fn direct_sum_over_point() {
        let a = HomLieAlgebroidModel::over_point(&HomLieAlgebra::abelian(1));
        let s = direct_sum(&a, &a).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(s.realize().structure().is_zero());
        let h = HomLieAlgebroidModel::over_point(&heisenberg(Matrix::diagonal(&[int(2), frac(1, 2), int(1)])));
        let s = direct_sum(&h, &a).unwrap();
        assert_eq!(s.rank(), 4);
        assert!(check_algebroid_axioms(&s).unwrap().all_passed());
        let g = s.realize();
        assert_eq!(g.basis_bracket(0, 1), unit_vec(4, 2));
        for i in 0..4 {
            assert_eq!(g.basis_bracket(i, 3), zero_vec(4));
        }
    }

    #[test]
    fn direct_sum_over_dual_numbers() {
        let base = BaseAlgebra::square_zero(1, Matrix::identity(2)).unwrap();
        let a =
            HomLieAlgebroidModel::new(base, 1, vec![zero_vec(2)], vec![DerivationOf(Matrix::zeros(2, 2))], vec![unit_vec(2, 0)]).unwrap();
        let s = direct_sum(&a, &a).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(check_algebroid_axioms(&s).unwrap().all_passed());
        // x·(x d/dx) = 0, so the fiber product contains (x e, 0) and has odd ℚ-dimension.
        let e = euler_line(Matrix::identity(2));
        assert!(matches!(direct_sum(&e, &e), Err(Error::Unsatisfiable(_))));
        let p = HomLieAlgebroidModel::over_point(&HomLieAlgebra::abelian(1));
        assert_eq!(direct_sum(&e, &p), Err(Error::BaseMismatch));
    }

    #[test]
    fn graph_examples() {
        let g = heisenberg(Matrix::identity(3));
        let h = HomLieAlgebroidModel::over_point(&g);
        for (phi, expect) in
            [(Matrix::identity(3), true), (Matrix::zeros(3, 3), true), (Matrix::diagonal(&[int(1), int(1), int(2)]), false)]
        {
            let f = AnchoredMorphism::from_rational(&h, &h, &phi).unwrap();
            let r = graph_is_subalgebroid(&f);
            assert!(r.passed("biconditional"));
            assert_eq!(r.passed("sub-algebroid"), expect);
            assert_eq!(r.passed("morphism"), expect);
        }
        let f = AnchoredMorphism::from_rational(&h, &h, &Matrix::diagonal(&[int(1), int(1), int(2)])).unwrap();
        let r = graph_is_subalgebroid(&f);
        assert_eq!(r.get("bracket-closed").unwrap().witness.as_deref(), Some("(e1,e2): residual (0, e3) off the graph"));
    }

    #[test]
    fn graph_over_dual_numbers() {
        let a = euler_line(Matrix::identity(2));
        let id = AnchoredMorphism::new(&a, &a, vec![unit_vec(2, 0)]).unwrap();
        let r = graph_is_subalgebroid(&id);
        assert!(r.passed("sub-algebroid") && r.passed("morphism"), "{}", r.to_text());
        let twice = AnchoredMorphism::new(&a, &a, vec![vec![int(2), int(0)]]).unwrap();
        let r = graph_is_subalgebroid(&twice);
        assert!(r.passed("biconditional"));
        assert!(!r.passed("morphism"));
    }
}
