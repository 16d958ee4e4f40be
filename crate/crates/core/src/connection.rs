//! Connections twisted by an invertible α, their curvature, the adjoint
//! connection and the induced connection on Hom-modules.

use num::Zero;

use crate::algebroid::HomLieAlgebroidModel;
use crate::error::{Error, Result};
use crate::homlie::HomLieAlgebra;
use crate::linalg::{unit_vec, Matrix, Q};
use crate::report::Report;

/// Invertible matrix; stores its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistMap {
    matrix: Matrix,
    inverse: Matrix,
}

impl TwistMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let inverse = matrix.inverse().ok_or_else(|| Error::SingularTwist(format!("{matrix:?} is not invertible")))?;
        Ok(TwistMap { matrix, inverse })
    }

    pub fn identity(r: usize) -> Self {
        TwistMap { matrix: Matrix::identity(r), inverse: Matrix::identity(r) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// A connection over a hom-Lie algebra: `∇_{e_i}` is `action[i]`, extended linearly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    algebra: HomLieAlgebra,
    alpha: TwistMap,
    action: Vec<Matrix>,
}

impl Connection {
    pub fn new(algebra: HomLieAlgebra, alpha: TwistMap, action: Vec<Matrix>) -> Result<Self> {
        let (n, r) = (algebra.dim(), alpha.dim());
        if action.len() != n {
            return Err(Error::Dimension(format!("{} action matrices for an algebra of dimension {n}", action.len())));
        }
        if let Some(i) = action.iter().position(|m| m.rows() != r || m.cols() != r) {
            return Err(Error::Dimension(format!("action matrix {} is not {r}x{r}", i + 1)));
        }
        Ok(Connection { algebra, alpha, action })
    }

    /// Zero connection with identity twist on a module of rank `r`.
    pub fn trivial(algebra: HomLieAlgebra, r: usize) -> Self {
        let n = algebra.dim();
        Connection { algebra, alpha: TwistMap::identity(r), action: vec![Matrix::zeros(r, r); n] }
    }

    pub fn algebra(&self) -> &HomLieAlgebra {
        &self.algebra
    }

    pub fn alpha(&self) -> &TwistMap {
        &self.alpha
    }

    pub fn action(&self) -> &[Matrix] {
        &self.action
    }

    pub fn rank(&self) -> usize {
        self.alpha.dim()
    }

    /// `∇_x = Σ x_i ∇_{e_i}`.
    pub fn nabla(&self, x: &[Q]) -> Matrix {
        let r = self.rank();
        let mut out = Matrix::zeros(r, r);
        for (xi, m) in x.iter().zip(&self.action) {
            if !xi.is_zero() {
                out.add_scaled(xi, m);
            }
        }
        out
    }

    /// Conjugates the module structure by an invertible `p`: `∇′ = p∇p⁻¹`, `α′ = pαp⁻¹`.
    pub fn conjugate(&self, p: &Matrix) -> Result<Self> {
        let pinv = p.inverse().ok_or_else(|| Error::SingularTwist("conjugating matrix is singular".into()))?;
        let conj = |m: &Matrix| &(p * m) * &pinv;
        Connection::new(self.algebra.clone(), TwistMap::new(conj(self.alpha.matrix()))?, self.action.iter().map(conj).collect())
    }

    /// Direct sum of two connections over the same algebra.
    pub fn direct_sum(&self, other: &Connection) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::Dimension("connections over different algebras".into()));
        }
        Connection::new(
            self.algebra.clone(),
            TwistMap::new(self.alpha.matrix().direct_sum(other.alpha.matrix()))?,
            self.action.iter().zip(&other.action).map(|(a, b)| a.direct_sum(b)).collect(),
        )
    }
}

/// `R(e_i, e_j)` for every ordered basis pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTensor {
    n: usize,
    values: Vec<Matrix>,
}

impl CurvatureTensor {
    pub fn get(&self, i: usize, j: usize) -> &Matrix {
        &self.values[i * self.n + j]
    }

    pub fn is_flat(&self) -> bool {
        self.values.iter().all(Matrix::is_zero)
    }

    /// First `(i, j)` with `i < j` and `R(e_i, e_j) ≠ 0`.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &Matrix)> {
        (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).chain((0..self.n).map(|i| (i, i))).find_map(|(i, j)| {
            let m = self.get(i, j);
            (!m.is_zero()).then_some((i, j, m))
        })
    }
}

/// `R(x,y) = ∇_{Θx}∇_y − ∇_{Θy}∇_x − ∇_{[x,y]}α`.
pub fn curvature_at(c: &Connection, x: &[Q], y: &[Q]) -> Matrix {
    let g = &c.algebra;
    let a = &(&c.nabla(&g.apply_twist(x)) * &c.nabla(y)) - &(&c.nabla(&g.apply_twist(y)) * &c.nabla(x));
    &a - &(&c.nabla(&g.bracket(x, y)) * c.alpha.matrix())
}

pub fn curvature(c: &Connection) -> CurvatureTensor {
    let n = c.algebra.dim();
    let values = (0..n * n).map(|idx| curvature_at(c, &unit_vec(n, idx / n), &unit_vec(n, idx % n))).collect();
    CurvatureTensor { n, values }
}

/// First basis `e_i` with `∇_{Θe_i}α ≠ α∇_{e_i}`.
pub fn alpha_compatibility_witness(c: &Connection) -> Option<String> {
    let g = &c.algebra;
    let a = c.alpha.matrix();
    (0..g.dim()).find_map(|i| {
        let lhs = &c.nabla(&g.twist().column(i)) * a;
        let rhs = a * &c.action[i];
        (lhs != rhs).then(|| format!("X=e{}: residual {:?}", i + 1, &lhs - &rhs))
    })
}

pub fn flatness_witness(c: &Connection) -> Option<String> {
    curvature(c).first_nonzero().map(|(i, j, m)| format!("R(e{},e{}) = {m:?}", i + 1, j + 1))
}

/// Verdicts `alpha-compatibility`, `flatness`, `representation`.
pub fn check_connection(c: &Connection) -> Report {
    let mut r = Report::new("connection");
    r.record("alpha-compatibility", alpha_compatibility_witness(c));
    r.record("flatness", flatness_witness(c));
    let bad: Vec<String> = r.failures().map(|c| c.id.clone()).collect();
    r.record("representation", (!bad.is_empty()).then(|| format!("fails {}", bad.join(", "))));
    r
}

/// `∇_{e_i} = ad(e_i)` on the algebra itself, twisted by `α = Θ`.
pub fn adjoint_connection(g: &HomLieAlgebra) -> Result<Connection> {
    let alpha =
        TwistMap::new(g.twist().clone()).map_err(|_| Error::SingularTwist("the adjoint connection needs an invertible Θ".into()))?;
    let n = g.dim();
    let action = (0..n).map(|i| g.ad(&unit_vec(n, i))).collect();
    Connection::new(g.clone(), alpha, action)
}

/// Connection on `Hom(E, F)`: `∇_X f = ∇^F_X f − f∇^E_X` with `α_H(f) = α_F f α_E⁻¹`.
///
/// `f` is stored row-major, index `a * rank(E) + b` for the `(a, b)` entry.
/// Compatibility is inherited: `∇_{ΘX}(α_F f α_E⁻¹) = α_F (∇_X f) α_E⁻¹` follows from the
/// two input identities after multiplying out.
pub fn induced_hom_connection(ce: &Connection, cf: &Connection) -> Result<Connection> {
    if ce.algebra != cf.algebra {
        return Err(Error::Dimension("connections over different algebras".into()));
    }
    let (re, rf) = (ce.rank(), cf.rank());
    let h = re * rf;
    let hom_matrix = |op: &dyn Fn(&Matrix) -> Matrix| -> Matrix {
        let cols: Vec<_> = (0..h)
            .map(|idx| {
                let mut f = Matrix::zeros(rf, re);
                f.set(idx / re, idx % re, <Q as num::One>::one());
                op(&f).as_flat().to_vec()
            })
            .collect();
        Matrix::from_columns(h, &cols)
    };
    let (ae, af) = (ce.alpha(), cf.alpha());
    let alpha = TwistMap::new(hom_matrix(&|f| &(af.matrix() * f) * ae.inverse()))?;
    let action = ce.action.iter().zip(&cf.action).map(|(ne, nf)| hom_matrix(&|f| &(nf * f) - &(f * ne))).collect();
    Connection::new(ce.algebra.clone(), alpha, action)
}

/// Connection over an algebroid model: one `(m·r)×(m·r)` matrix per ℚ-basis
/// section of the algebroid.  Module sections are indexed `a * m + β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebroidConnection {
    algebroid: HomLieAlgebroidModel,
    rank: usize,
    alpha: TwistMap,
    action: Vec<Matrix>,
}

impl AlgebroidConnection {
    pub fn new(algebroid: HomLieAlgebroidModel, rank: usize, alpha: TwistMap, action: Vec<Matrix>) -> Result<Self> {
        let d = algebroid.base().dim() * rank;
        if alpha.dim() != d {
            return Err(Error::Dimension(format!("alpha must be {d}x{d}")));
        }
        if action.len() != algebroid.q_dim() || action.iter().any(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::Dimension(format!("expected {} action matrices of size {d}x{d}", algebroid.q_dim())));
        }
        Ok(AlgebroidConnection { algebroid, rank, alpha, action })
    }

    pub fn algebroid(&self) -> &HomLieAlgebroidModel {
        &self.algebroid
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn alpha(&self) -> &TwistMap {
        &self.alpha
    }

    pub fn action(&self) -> &[Matrix] {
        &self.action
    }

    fn nabla(&self, x: &[Q]) -> Matrix {
        let d = self.alpha.dim();
        let mut out = Matrix::zeros(d, d);
        for (xi, m) in x.iter().zip(&self.action) {
            if !xi.is_zero() {
                out.add_scaled(xi, m);
            }
        }
        out
    }

    /// Multiplication by a function on module sections.
    fn mult(&self, f: &[Q]) -> Matrix {
        let block = self.algebroid.base().mult_matrix(f);
        (1..self.rank).fold(block.clone(), |acc, _| acc.direct_sum(&block))
    }
}

/// Verdicts `alpha-linearity`, `alpha-compatibility`, `leibniz-function`,
/// `leibniz-derivation`, `flatness`, `representation`.
pub fn check_algebroid_connection(c: &AlgebroidConnection) -> Report {
    let a = &c.algebroid;
    let g = a.realize();
    let m = a.base().dim();
    let d = a.q_dim();
    let e = |x| unit_vec(d, x);
    let alpha = c.alpha.matrix();
    let mut r = Report::new("connection");

    let w = (0..m).find_map(|b| {
        let f = c.mult(&unit_vec(m, b));
        (&f * alpha != alpha * &f).then(|| format!("α does not commute with multiplication by b{}", b + 1))
    });
    r.record("alpha-linearity", w);

    let w = (0..d).find_map(|x| {
        let lhs = &c.nabla(&g.twist().column(x)) * alpha;
        let rhs = alpha * &c.action[x];
        (lhs != rhs).then(|| format!("X={}: residual {:?}", a.section_label(x), &lhs - &rhs))
    });
    r.record("alpha-compatibility", w);

    let mut w = None;
    'lin: for x in 0..d {
        for b in 0..m {
            let f = unit_vec(m, b);
            let lhs = c.nabla(&a.function_times_section(&f, &e(x)));
            let rhs = &c.mult(&f) * &c.action[x];
            if lhs != rhs {
                w = Some(format!("f=b{}, X={}: residual {:?}", b + 1, a.section_label(x), &lhs - &rhs));
                break 'lin;
            }
        }
    }
    r.record("leibniz-function", w);

    let mut w = None;
    'der: for x in 0..d {
        let rho = a.anchor_of(&e(x));
        for b in 0..m {
            let f = unit_vec(m, b);
            let lhs = &c.action[x] * &c.mult(&f);
            let rhs = &(&c.mult(&a.base().theta(&f)) * &c.action[x]) + &c.mult(&rho.mul_vec(&f));
            if lhs != rhs {
                w = Some(format!("X={}, f=b{}: residual {:?}", a.section_label(x), b + 1, &lhs - &rhs));
                break 'der;
            }
        }
    }
    r.record("leibniz-derivation", w);

    let mut w = None;
    'flat: for x in 0..d {
        for y in x + 1..d {
            let t = g.twist();
            let k = &(&c.nabla(&t.column(x)) * &c.action[y]) - &(&c.nabla(&t.column(y)) * &c.action[x]);
            let k = &k - &(&c.nabla(&g.bracket(&e(x), &e(y))) * alpha);
            if !k.is_zero() {
                w = Some(format!("R({},{}) = {k:?}", a.section_label(x), a.section_label(y)));
                break 'flat;
            }
        }
    }
    r.record("flatness", w);
    let bad: Vec<String> = r.failures().map(|c| c.id.clone()).collect();
    r.record("representation", (!bad.is_empty()).then(|| format!("fails {}", bad.join(", "))));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{BaseAlgebra, DerivationOf};
    use crate::homlie::check_hom_lie_axioms;
    use crate::linalg::{frac, int, zero_vec};

    fn aff() -> HomLieAlgebra {
        HomLieAlgebra::from_entries(2, &[(1, 0, 1, int(1))], Matrix::identity(2)).unwrap()
    }

    fn scalar_conn(g: HomLieAlgebra, alpha: i64, action: &[i64]) -> Connection {
        Connection::new(
            g,
            TwistMap::new(Matrix::scalar(1, &int(alpha))).unwrap(),
            action.iter().map(|&a| Matrix::scalar(1, &int(a))).collect(),
        )
        .unwrap()
    }

    fn heisenberg(twist: Matrix) -> HomLieAlgebra {
        HomLieAlgebra::from_entries(3, &[(2, 0, 1, int(1))], twist).unwrap()
    }

    #[test]
    fn curvature_examples() {
        assert!(curvature(&scalar_conn(aff(), 1, &[1, 0])).is_flat());
        let r = curvature(&scalar_conn(aff(), 1, &[1, 1]));
        assert_eq!(r.get(0, 1), &Matrix::scalar(1, &int(-1)));
        let ab = HomLieAlgebra::abelian(2);
        let n1 = Matrix::from_i64(&[&[1, 2], &[0, 1]]);
        let n2 = Matrix::from_i64(&[&[3, 1], &[0, 3]]);
        let c = Connection::new(ab, TwistMap::identity(2), vec![n1, n2]).unwrap();
        assert!(curvature(&c).is_flat());
    }

    #[test]
    fn check_connection_examples() {
        assert!(check_connection(&Connection::trivial(aff(), 1)).passed("representation"));
        let h = heisenberg(Matrix::diagonal(&[int(2), frac(1, 2), int(1)]));
        assert!(check_connection(&Connection::trivial(h, 1)).passed("representation"));
        let r = check_connection(&scalar_conn(aff(), 2, &[1, 0]));
        assert!(r.all_passed(), "{}", r.to_text());
        let r = check_connection(&scalar_conn(aff(), 1, &[1, 1]));
        assert_eq!(r.get("flatness").unwrap().witness.as_deref(), Some("R(e1,e2) = [-1]"));
        assert!(!r.passed("representation"));
    }

    #[test]
    fn adjoint_examples() {
        let sl2 = HomLieAlgebra::from_entries(3, &[(1, 0, 1, int(2)), (2, 0, 2, int(-2)), (0, 1, 2, int(1))], Matrix::identity(3)).unwrap();
        assert!(check_connection(&adjoint_connection(&sl2).unwrap()).all_passed());
        let h = heisenberg(Matrix::diagonal(&[int(2), frac(1, 2), int(1)]));
        assert!(check_connection(&adjoint_connection(&h).unwrap()).all_passed());
        let ab = HomLieAlgebra::abelian(3).with_twist(Matrix::diagonal(&[int(2), int(3), int(5)])).unwrap();
        let c = adjoint_connection(&ab).unwrap();
        assert!(c.action().iter().all(Matrix::is_zero));
        let singular = HomLieAlgebra::abelian(2).with_twist(Matrix::zeros(2, 2)).unwrap();
        assert!(matches!(adjoint_connection(&singular), Err(Error::SingularTwist(_))));
    }

    #[test]
    fn adjoint_curvature_is_the_jacobiator() {
        // Θ∘ad with Θ an automorphism of sl2 but bracket untwisted: hom-Jacobi fails, so does flatness.
        let g = HomLieAlgebra::from_entries(
            3,
            &[(1, 0, 1, int(2)), (2, 0, 2, int(-2)), (0, 1, 2, int(1))],
            Matrix::diagonal(&[int(1), int(2), frac(1, 2)]),
        )
        .unwrap();
        let c = adjoint_connection(&g).unwrap();
        assert!(!check_hom_lie_axioms(&g).passed("hom-jacobi"));
        assert!(!curvature(&c).is_flat());
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let lhs = curvature(&c).get(i, j).mul_vec(&unit_vec(3, k));
                    let rhs = g.hom_jacobiator(&unit_vec(3, i), &unit_vec(3, j), &unit_vec(3, k));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn induced_hom_examples() {
        let g = HomLieAlgebra::abelian(1);
        let c = induced_hom_connection(&Connection::trivial(g.clone(), 1), &Connection::trivial(g.clone(), 1)).unwrap();
        assert!(c.action()[0].is_zero());
        assert_eq!(c.alpha().matrix(), &Matrix::identity(1));
        let ce = scalar_conn(g.clone(), 4, &[2]);
        let cf = scalar_conn(g, 2, &[3]);
        let c = induced_hom_connection(&ce, &cf).unwrap();
        assert_eq!(c.action()[0], Matrix::scalar(1, &int(1)));
        assert_eq!(c.alpha().matrix(), &Matrix::scalar(1, &frac(1, 2)));
    }

    #[test]
    fn hom_connection_of_compatible_inputs_is_compatible() {
        let h = heisenberg(Matrix::diagonal(&[int(2), frac(1, 2), int(1)]));
        let adj = adjoint_connection(&h).unwrap();
        let triv = Connection::trivial(h.clone(), 2).conjugate(&Matrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap();
        for (ce, cf) in [(&adj, &triv), (&triv, &adj), (&adj, &adj)] {
            let c = induced_hom_connection(ce, cf).unwrap();
            assert!(alpha_compatibility_witness(&c).is_none());
        }
    }

    #[test]
    fn algebroid_connection_over_dual_numbers() {
        // Trivial line bundle over the Euler-line model; ∇_X s = ρ(X)(s).
        let base = BaseAlgebra::square_zero(1, Matrix::identity(2)).unwrap();
        let euler = Matrix::from_i64(&[&[0, 0], &[0, 1]]);
        let a =
            HomLieAlgebroidModel::new(base.clone(), 1, vec![zero_vec(2)], vec![DerivationOf(euler.clone())], vec![unit_vec(2, 0)]).unwrap();
        let act = vec![euler.clone(), &base.mult_matrix(&unit_vec(2, 1)) * &euler];
        let c = AlgebroidConnection::new(a.clone(), 1, TwistMap::identity(2), act).unwrap();
        let r = check_algebroid_connection(&c);
        assert!(r.all_passed(), "{}", r.to_text());
        // Dropping the derivation term breaks the second Leibniz rule.
        let c = AlgebroidConnection::new(a, 1, TwistMap::identity(2), vec![Matrix::zeros(2, 2); 2]).unwrap();
        let r = check_algebroid_connection(&c);
        assert!(!r.passed("leibniz-derivation"));
        assert!(r.passed("leibniz-function"));
    }
}
