//! Alternating forms on a hom-Lie algebra with values in a coordinate space,
//! the shuffle wedge, the twisted differential and the Θ-compatible subcomplex.
//!
//! A `p`-form stores one value vector per strictly increasing `p`-tuple, in
//! lexicographic order.  Values have a fixed `width`: a module rank for
//! module-valued forms, `rows·cols` (row-major) for matrix-valued ones.

use num::{One, Zero};

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::homlie::HomLieAlgebra;
use crate::linalg::{axpy, format_combination, format_rational, is_zero_vec, zero_vec, Matrix, Vector, Q};
use crate::report::Report;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Strictly increasing `p`-tuples from `0..n`, lexicographically.
pub fn combinations(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < p - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= n {
        go(0, n, p, &mut Vec::new(), &mut out);
    }
    out
}

/// Lexicographic rank of a strictly increasing tuple among `combinations(n, len)`.
pub fn combination_index(n: usize, tuple: &[usize]) -> usize {
    let p = tuple.len();
    let mut idx = 0;
    let mut prev = 0;
    for (pos, &t) in tuple.iter().enumerate() {
        for skipped in prev..t {
            idx += binomial(n - skipped - 1, p - pos - 1);
        }
        prev = t + 1;
    }
    idx
}

/// Sign of the permutation sorting `tuple`, or `None` on a repeated entry.
pub fn sort_sign(tuple: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut v = tuple.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    n: usize,
    degree: usize,
    width: usize,
    data: Vec<Q>,
}

impl Form {
    pub fn zero(n: usize, degree: usize, width: usize) -> Self {
        Form { n, degree, width, data: zero_vec(binomial(n, degree) * width) }
    }

    pub fn from_flat(n: usize, degree: usize, width: usize, data: Vec<Q>) -> Self {
        assert_eq!(data.len(), binomial(n, degree) * width, "form data length mismatch");
        Form { n, degree, width, data }
    }

    /// Builds a form from values on (not necessarily sorted) distinct tuples.
    pub fn from_values(n: usize, degree: usize, width: usize, entries: &[(Vec<usize>, Vector)]) -> Result<Self> {
        let mut f = Self::zero(n, degree, width);
        for (t, v) in entries {
            if t.len() != degree || t.iter().any(|&i| i >= n) || v.len() != width {
                return Err(Error::Dimension(format!("form entry {t:?} does not fit degree {degree}, dimension {n}, width {width}")));
            }
            let (sign, sorted) = sort_sign(t).ok_or_else(|| Error::Malformed(format!("repeated index in {t:?}")))?;
            let idx = combination_index(n, &sorted);
            let s = Q::from_integer(sign.into());
            axpy(&mut f.data[idx * width..(idx + 1) * width], &s, v);
        }
        Ok(f)
    }

    /// The scalar form `e^{i_1}*∧…∧e^{i_p}*` (value one on the sorted tuple).
    pub fn basis_scalar(n: usize, tuple: &[usize]) -> Self {
        Self::from_values(n, tuple.len(), 1, &[(tuple.to_vec(), vec![Q::one()])]).expect("valid basis tuple")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn as_flat(&self) -> &[Q] {
        &self.data
    }

    pub fn value(&self, idx: usize) -> &[Q] {
        &self.data[idx * self.width..(idx + 1) * self.width]
    }

    /// Value on a basis tuple in any order (alternation applied).
    pub fn value_at(&self, tuple: &[usize]) -> Vector {
        match sort_sign(tuple) {
            None => zero_vec(self.width),
            Some((sign, sorted)) => {
                let v = self.value(combination_index(self.n, &sorted));
                if sign > 0 {
                    v.to_vec()
                } else {
                    v.iter().map(|x| -x).collect()
                }
            }
        }
    }

    /// Value on arbitrary vectors, `Σ_I det(v_a[I_b]) ω_I`.
    pub fn eval(&self, args: &[Vector]) -> Vector {
        assert_eq!(args.len(), self.degree, "wrong number of arguments");
        let mut out = zero_vec(self.width);
        if self.degree == 0 {
            return self.value(0).to_vec();
        }
        for (idx, t) in combinations(self.n, self.degree).iter().enumerate() {
            let v = self.value(idx);
            if is_zero_vec(v) {
                continue;
            }
            let minor = Matrix::from_fn(self.degree, self.degree, |a, b| args[a][t[b]].clone());
            let det = minor.determinant();
            axpy(&mut out, &det, v);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    fn same_shape(&self, other: &Form) {
        assert_eq!((self.n, self.degree, self.width), (other.n, other.degree, other.width), "form shape mismatch");
    }

    pub fn add(&self, other: &Form) -> Form {
        self.same_shape(other);
        Form { data: crate::linalg::add_vec(&self.data, &other.data), ..self.clone() }
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.same_shape(other);
        Form { data: crate::linalg::sub_vec(&self.data, &other.data), ..self.clone() }
    }

    pub fn scale(&self, s: &Q) -> Form {
        Form { data: crate::linalg::scale_vec(s, &self.data), ..self.clone() }
    }

    /// Applies a linear map to every value.
    pub fn map_values(&self, m: &Matrix) -> Form {
        assert_eq!(m.cols(), self.width, "value map shape mismatch");
        let data = self.data.chunks(self.width.max(1)).take(binomial(self.n, self.degree)).flat_map(|v| m.mul_vec(v)).collect();
        if self.width == 0 {
            return Form::zero(self.n, self.degree, m.rows());
        }
        Form { n: self.n, degree: self.degree, width: m.rows(), data }
    }

    /// First nonzero value, formatted as `(e1,e2) ↦ value`.
    pub fn first_nonzero(&self) -> Option<String> {
        combinations(self.n, self.degree).iter().enumerate().find_map(|(idx, t)| {
            let v = self.value(idx);
            if is_zero_vec(v) {
                return None;
            }
            let args: Vec<String> = t.iter().map(|i| format!("e{}", i + 1)).collect();
            let val = if self.width == 1 { format_rational(&v[0]) } else { format_combination(v, "s") };
            Some(format!("({}) ↦ {val}", args.join(",")))
        })
    }
}

/// The `p`-th compound matrix: entry `(J, I)` is the minor of rows `J`, columns `I`.
pub fn compound(theta: &Matrix, p: usize) -> Matrix {
    let n = theta.rows();
    let tuples = combinations(n, p);
    Matrix::from_fn(tuples.len(), tuples.len(), |r, c| {
        let (rows, cols) = (&tuples[r], &tuples[c]);
        Matrix::from_fn(p, p, |a, b| theta.get(rows[a], cols[b]).clone()).determinant()
    })
}

/// `(Θ*ω)(X_1..X_p) = ω(ΘX_1..ΘX_p)`.
pub fn theta_pullback(theta: &Matrix, w: &Form) -> Form {
    pullback_with(&compound(theta, w.degree), w)
}

fn pullback_with(compound: &Matrix, w: &Form) -> Form {
    let mut out = Form::zero(w.n, w.degree, w.width);
    let k = compound.rows();
    for i in 0..k {
        let dst = &mut out.data[i * w.width..(i + 1) * w.width];
        for j in 0..k {
            let c = compound.get(j, i);
            if !c.is_zero() {
                axpy(dst, c, &w.data[j * w.width..(j + 1) * w.width]);
            }
        }
    }
    out
}

/// Shuffle wedge with a bilinear value pairing:
/// `(ω∧η)(X_1..X_{p+q}) = Σ_σ sgn(σ) combine(ω(X_σ(1..p)), η(X_σ(p+1..p+q)))`.
pub fn wedge_with(w: &Form, e: &Form, out_width: usize, combine: &dyn Fn(&[Q], &[Q]) -> Vector) -> Form {
    assert_eq!(w.n, e.n, "forms on different algebras");
    let (n, p, q) = (w.n, w.degree, e.degree);
    let mut out = Form::zero(n, p + q, out_width);
    if p + q > n {
        return out;
    }
    let shuffles: Vec<(Vec<usize>, Vec<usize>, bool)> = combinations(p + q, p)
        .into_iter()
        .map(|s| {
            let rest: Vec<usize> = (0..p + q).filter(|i| !s.contains(i)).collect();
            let perm: Vec<usize> = s.iter().chain(&rest).copied().collect();
            let neg = sort_sign(&perm).expect("permutation").0 < 0;
            (s, rest, neg)
        })
        .collect();
    for (idx, t) in combinations(n, p + q).iter().enumerate() {
        let mut acc = zero_vec(out_width);
        for (s, rest, neg) in &shuffles {
            let a: Vec<usize> = s.iter().map(|&i| t[i]).collect();
            let b: Vec<usize> = rest.iter().map(|&i| t[i]).collect();
            let va = w.value(combination_index(n, &a));
            let vb = e.value(combination_index(n, &b));
            if is_zero_vec(va) || is_zero_vec(vb) {
                continue;
            }
            let c = combine(va, vb);
            let sign = if *neg { -Q::one() } else { Q::one() };
            axpy(&mut acc, &sign, &c);
        }
        out.data[idx * out_width..(idx + 1) * out_width].clone_from_slice(&acc);
    }
    out
}

/// Scalar form wedge a vector-valued form.
pub fn wedge(w: &Form, e: &Form) -> Form {
    assert_eq!(w.width, 1, "left factor must be scalar");
    wedge_with(w, e, e.width, &|a, b| crate::linalg::scale_vec(&a[0], b))
}

/// The twisted differential with an explicit bracket, twist and action; `nabla(x)` is `∇_x`.
pub fn differential_raw(g: &HomLieAlgebra, nabla: &dyn Fn(&[Q]) -> Matrix, w: &Form) -> Form {
    let (n, p, width) = (w.n, w.degree, w.width);
    assert_eq!(g.dim(), n, "form and algebra dimensions differ");
    let mut out = Form::zero(n, p + 1, width);
    if p + 1 > n {
        return out;
    }
    let theta = g.twist();
    let theta_p = theta.pow(p);
    let nablas: Vec<Matrix> = (0..n).map(|i| nabla(&theta_p.column(i))).collect();
    for (idx, t) in combinations(n, p + 1).iter().enumerate() {
        let mut acc = zero_vec(width);
        // Σ_{a<b} (−1)^{a+b} ω([X_a,X_b], ΘX_1, …, X̂_a, …, X̂_b, …, ΘX_{p+1}); 0-based a, b keep the parity.
        for a in 0..=p {
            for b in a + 1..=p {
                let br = g.basis_bracket(t[a], t[b]);
                if is_zero_vec(&br) {
                    continue;
                }
                let mut args = vec![br];
                for (c, &tc) in t.iter().enumerate() {
                    if c != a && c != b {
                        args.push(theta.column(tc));
                    }
                }
                let v = w.eval(&args);
                let sign = if (a + b) % 2 == 0 { Q::one() } else { -Q::one() };
                axpy(&mut acc, &sign, &v);
            }
        }
        // Σ_a (−1)^{a+1} ∇_{Θ^p X_a} ω(…X̂_a…); with 0-based a the sign is (−1)^a.
        for a in 0..=p {
            let rest: Vec<usize> = t.iter().enumerate().filter(|&(c, _)| c != a).map(|(_, &x)| x).collect();
            let v = w.value(combination_index(n, &rest));
            if is_zero_vec(v) {
                continue;
            }
            let nv = nablas[t[a]].mul_vec(v);
            let sign = if a % 2 == 0 { Q::one() } else { -Q::one() };
            axpy(&mut acc, &sign, &nv);
        }
        out.data[idx * width..(idx + 1) * width].clone_from_slice(&acc);
    }
    out
}

pub fn differential(c: &Connection, w: &Form) -> Form {
    assert_eq!(c.rank(), w.width, "form width differs from module rank");
    differential_raw(c.algebra(), &|x| c.nabla(x), w)
}

/// Differential with trivial coefficients (`∇ = 0`), any value width.
pub fn scalar_differential(g: &HomLieAlgebra, w: &Form) -> Form {
    let width = w.width;
    differential_raw(g, &|_| Matrix::zeros(width, width), w)
}

/// `α∘ω − Θ*ω`.
pub fn compatibility_residual(theta: &Matrix, alpha: &Matrix, w: &Form) -> Form {
    w.map_values(alpha).sub(&theta_pullback(theta, w))
}

/// Basis of the Θ-compatible `p`-forms, as a kernel in reduced-echelon order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSpaceBasis {
    pub degree: usize,
    pub forms: Vec<Form>,
}

pub fn compatible_basis(theta: &Matrix, alpha: &Matrix, p: usize) -> FormSpaceBasis {
    let n = theta.rows();
    let width = alpha.rows();
    let k = binomial(n, p);
    let ambient = k * width;
    if ambient == 0 {
        return FormSpaceBasis { degree: p, forms: Vec::new() };
    }
    let comp = compound(theta, p);
    // Column for the unit form supported at (tuple j, coordinate a).
    let cols: Vec<Vector> = (0..ambient)
        .map(|u| {
            let unit = Form::from_flat(n, p, width, crate::linalg::unit_vec(ambient, u));
            unit.map_values(alpha).sub(&pullback_with(&comp, &unit)).data
        })
        .collect();
    let forms = Matrix::from_columns(ambient, &cols).kernel_basis().into_iter().map(|v| Form::from_flat(n, p, width, v)).collect();
    FormSpaceBasis { degree: p, forms }
}

/// Verdicts `alpha-rule`, `derivation-rule` and `d-squared-<p>` for each degree `p ≤ n−2`.
pub fn check_complex(c: &Connection) -> Report {
    let g = c.algebra();
    let n = g.dim();
    let theta = g.twist();
    let alpha = c.alpha().matrix();
    let bases: Vec<FormSpaceBasis> = (0..=n).map(|p| compatible_basis(theta, alpha, p)).collect();
    let scalar_bases: Vec<FormSpaceBasis> = (0..=n).map(|p| compatible_basis(theta, &Matrix::identity(1), p)).collect();
    let mut r = Report::new("complex");

    let mut w = None;
    'alpha: for b in bases.iter().take(n) {
        for (k, f) in b.forms.iter().enumerate() {
            let df = differential(c, f);
            let res = compatibility_residual(theta, alpha, &df);
            if let Some(v) = res.first_nonzero() {
                w = Some(format!("degree {}, basis form {}: α∘dω − Θ*dω at {v}", b.degree, k + 1));
                break 'alpha;
            }
        }
    }
    r.record("alpha-rule", w);

    let mut w = None;
    'der: for sb in &scalar_bases {
        let p = sb.degree;
        for (i, om) in sb.forms.iter().enumerate() {
            let d_om = scalar_differential(g, om);
            let t_om = theta_pullback(theta, om);
            for eb in bases.iter().take(n.saturating_sub(p)) {
                for (j, eta) in eb.forms.iter().enumerate() {
                    let lhs = differential(c, &wedge(om, eta));
                    let rhs1 = wedge(&d_om, &theta_pullback(theta, eta));
                    let rhs2 = wedge(&t_om, &differential(c, eta));
                    let rhs = if p % 2 == 0 { rhs1.add(&rhs2) } else { rhs1.sub(&rhs2) };
                    if let Some(v) = lhs.sub(&rhs).first_nonzero() {
                        w = Some(format!("scalar form {} of degree {p}, form {} of degree {}: residual at {v}", i + 1, j + 1, eb.degree));
                        break 'der;
                    }
                }
            }
        }
    }
    r.record("derivation-rule", w);

    for b in bases.iter().take(n.saturating_sub(1)) {
        let w =
            b.forms.iter().enumerate().find_map(|(k, f)| {
                differential(c, &differential(c, f)).first_nonzero().map(|v| format!("basis form {}: d²ω at {v}", k + 1))
            });
        r.record(format!("d-squared-{}", b.degree), w);
    }
    r
}

/// True iff every `d-squared-*` verdict of the report passes.
pub fn d_squared_vanishes(report: &Report) -> bool {
    report.checks.iter().filter(|c| c.id.starts_with("d-squared-")).all(|c| c.passed)
}

/// `dim H^p` of the Θ-compatible subcomplex for `p = 0..=max_degree`.
pub fn cohomology_dims(c: &Connection, max_degree: usize) -> Result<Vec<usize>> {
    let g = c.algebra();
    let n = g.dim();
    let theta = g.twist();
    let alpha = c.alpha().matrix();
    let bases: Vec<FormSpaceBasis> = (0..=n).map(|p| compatible_basis(theta, alpha, p)).collect();
    for b in bases.iter().take(n.saturating_sub(1)) {
        if b.forms.iter().any(|f| !differential(c, &differential(c, f)).is_zero()) {
            return Err(Error::NotAComplex(b.degree));
        }
    }
    let width = c.rank();
    let ranks: Vec<usize> = bases
        .iter()
        .map(|b| {
            let images: Vec<Vector> = b.forms.iter().map(|f| differential(c, f).data).collect();
            crate::linalg::rank_of_vectors(binomial(n, b.degree + 1) * width, &images)
        })
        .collect();
    Ok((0..=max_degree)
        .map(|p| {
            if p > n {
                return 0;
            }
            let prev = if p == 0 { 0 } else { ranks[p - 1] };
            bases[p].forms.len() - ranks[p] - prev
        })
        .collect())
}
