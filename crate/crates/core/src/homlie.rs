//! Hom-Lie algebras over ℚ: structure constants plus a twist endomorphism Θ.
//!
//! Convention: `c[k][i][j]` is the `e_k` coefficient of `[e_i, e_j]`, and the
//! twist matrix has the image `Θ(e_j)` as its column `j`.

use num::Zero;

use crate::error::{Error, Result};
use crate::linalg::{axpy, format_combination, is_zero_vec, sub_vec, unit_vec, zero_vec, Matrix, Tensor3, Vector, Q};
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomLieAlgebra {
    bracket: Tensor3,
    twist: Matrix,
}

impl HomLieAlgebra {
    pub fn new(bracket: Tensor3, twist: Matrix) -> Result<Self> {
        let n = bracket.dim();
        if twist.rows() != n || twist.cols() != n {
            return Err(Error::Dimension(format!("twist is {}x{} but the algebra has dimension {n}", twist.rows(), twist.cols())));
        }
        Ok(HomLieAlgebra { bracket, twist })
    }

    /// Builds the antisymmetric completion of entries `(k, i, j, c)` given for `i < j`.
    pub fn from_entries(n: usize, entries: &[(usize, usize, usize, Q)], twist: Matrix) -> Result<Self> {
        let mut t = Tensor3::zeros(n);
        for (k, i, j, c) in entries {
            let (k, i, j) = (*k, *i, *j);
            if k >= n || i >= n || j >= n {
                return Err(Error::Dimension(format!("bracket index ({k},{i},{j}) out of range for dimension {n}")));
            }
            if i >= j {
                return Err(Error::Malformed(format!("bracket entry ({k},{i},{j}) must have i < j")));
            }
            let v = t.get(k, i, j) + c;
            t.set(k, i, j, v.clone());
            t.set(k, j, i, -v);
        }
        Self::new(t, twist)
    }

    pub fn abelian(n: usize) -> Self {
        HomLieAlgebra { bracket: Tensor3::zeros(n), twist: Matrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.bracket.dim()
    }

    pub fn structure(&self) -> &Tensor3 {
        &self.bracket
    }

    pub fn twist(&self) -> &Matrix {
        &self.twist
    }

    pub fn with_twist(&self, twist: Matrix) -> Result<Self> {
        Self::new(self.bracket.clone(), twist)
    }

    /// Bilinear expansion `Σ x_i y_j c[·][i][j]`; panics on length mismatch.
    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vector {
        let n = self.dim();
        assert!(x.len() == n && y.len() == n, "coordinate length mismatch");
        let mut out = zero_vec(n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let s = xi * yj;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.bracket.get(k, i, j);
                    if !c.is_zero() {
                        *o += &s * c;
                    }
                }
            }
        }
        out
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> Vector {
        self.bracket.column(i, j)
    }

    pub fn apply_twist(&self, x: &[Q]) -> Vector {
        self.twist.mul_vec(x)
    }

    /// Matrix of `ad(x) = [x, ·]`.
    pub fn ad(&self, x: &[Q]) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n).map(|j| self.bracket(x, &unit_vec(n, j))).collect();
        Matrix::from_columns(n, &cols)
    }

    /// The algebra `(g, Θ∘[·,·], Θ)`; hom-Lie whenever `g` is Lie and Θ an automorphism.
    pub fn yau_twist(&self, theta: &Matrix) -> Result<Self> {
        let n = self.dim();
        if theta.rows() != n || theta.cols() != n {
            return Err(Error::Dimension("Yau twist must be square of the algebra dimension".into()));
        }
        let mut t = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = theta.mul_vec(&self.basis_bracket(i, j));
                for (k, x) in v.into_iter().enumerate() {
                    t.set(k, i, j, x);
                }
            }
        }
        Self::new(t, theta.clone())
    }

    /// Transports the structure along the basis change whose columns are the new basis vectors.
    pub fn change_basis(&self, p: &Matrix) -> Result<Self> {
        let n = self.dim();
        let pinv = p.inverse().ok_or_else(|| Error::SingularTwist("basis change is singular".into()))?;
        let mut t = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = pinv.mul_vec(&self.bracket(&p.column(i), &p.column(j)));
                for (k, x) in v.into_iter().enumerate() {
                    t.set(k, i, j, x);
                }
            }
        }
        Self::new(t, &(&pinv * &self.twist) * p)
    }

    /// Residual of the cyclic sum `[Θx,[y,z]] + [Θz,[x,y]] + [Θy,[z,x]]`.
    pub fn hom_jacobiator(&self, x: &[Q], y: &[Q], z: &[Q]) -> Vector {
        let (tx, ty, tz) = (self.apply_twist(x), self.apply_twist(y), self.apply_twist(z));
        let mut out = self.bracket(&tx, &self.bracket(y, z));
        let one = <Q as num::One>::one();
        axpy(&mut out, &one, &self.bracket(&tz, &self.bracket(x, y)));
        axpy(&mut out, &one, &self.bracket(&ty, &self.bracket(z, x)));
        out
    }

    fn basis_jacobiator(&self, i: usize, j: usize, k: usize) -> Vector {
        let n = self.dim();
        self.hom_jacobiator(&unit_vec(n, i), &unit_vec(n, j), &unit_vec(n, k))
    }
}

/// `[x, y]` with a shape check.
pub fn bracket_eval(g: &HomLieAlgebra, x: &[Q], y: &[Q]) -> Result<Vector> {
    let n = g.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::Dimension(format!("coordinates of length {} and {} for an algebra of dimension {n}", x.len(), y.len())));
    }
    Ok(g.bracket(x, y))
}

pub(crate) fn residual_witness(labels: &[usize], residual: &[Q]) -> String {
    let tuple: Vec<String> = labels.iter().map(|i| format!("e{}", i + 1)).collect();
    format!("({}): residual {}", tuple.join(","), format_combination(residual, "e"))
}

pub fn antisymmetry_witness(g: &HomLieAlgebra) -> Option<String> {
    let n = g.dim();
    for i in 0..n {
        for j in i..n {
            let r = crate::linalg::add_vec(&g.basis_bracket(i, j), &g.basis_bracket(j, i));
            if !is_zero_vec(&r) {
                return Some(residual_witness(&[i, j], &r));
            }
        }
    }
    None
}

pub fn multiplicativity_witness(g: &HomLieAlgebra) -> Option<String> {
    let n = g.dim();
    for i in 0..n {
        for j in 0..n {
            let lhs = g.bracket(&g.twist.column(i), &g.twist.column(j));
            let r = sub_vec(&lhs, &g.apply_twist(&g.basis_bracket(i, j)));
            if !is_zero_vec(&r) {
                return Some(residual_witness(&[i, j], &r));
            }
        }
    }
    None
}

pub fn hom_jacobi_witness(g: &HomLieAlgebra) -> Option<String> {
    let n = g.dim();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = g.basis_jacobiator(i, j, k);
                if !is_zero_vec(&r) {
                    return Some(residual_witness(&[i, j, k], &r));
                }
            }
        }
    }
    None
}

/// Verdicts `antisymmetry`, `multiplicativity`, `hom-jacobi`.
pub fn check_hom_lie_axioms(g: &HomLieAlgebra) -> Report {
    let mut r = Report::new("axioms");
    r.record("antisymmetry", antisymmetry_witness(g));
    r.record("multiplicativity", multiplicativity_witness(g));
    r.record("hom-jacobi", hom_jacobi_witness(g));
    r
}

/// A linear map between two hom-Lie algebras; columns are images of source basis vectors.
#[derive(Clone, Debug)]
pub struct LinearMapBetween<'a> {
    pub source: &'a HomLieAlgebra,
    pub target: &'a HomLieAlgebra,
    pub matrix: Matrix,
}

impl<'a> LinearMapBetween<'a> {
    pub fn new(source: &'a HomLieAlgebra, target: &'a HomLieAlgebra, matrix: Matrix) -> Result<Self> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::Dimension(format!(
                "map is {}x{} between dimensions {} and {}",
                matrix.rows(),
                matrix.cols(),
                source.dim(),
                target.dim()
            )));
        }
        Ok(LinearMapBetween { source, target, matrix })
    }
}

/// Verdicts `bracket-preservation` (φ[x,y] = [φx,φy]) and `twist-intertwining` (Θ′φ = φΘ).
pub fn is_morphism(phi: &LinearMapBetween<'_>) -> Report {
    let (s, t, m) = (phi.source, phi.target, &phi.matrix);
    let n = s.dim();
    let mut r = Report::new("morphism");
    let mut bracket = None;
    'outer: for i in 0..n {
        for j in 0..n {
            let lhs = m.mul_vec(&s.basis_bracket(i, j));
            let rhs = t.bracket(&m.column(i), &m.column(j));
            let d = sub_vec(&lhs, &rhs);
            if !is_zero_vec(&d) {
                bracket = Some(residual_witness(&[i, j], &d));
                break 'outer;
            }
        }
    }
    r.record("bracket-preservation", bracket);
    let d = &(t.twist() * m) - &(m * s.twist());
    let twist = (0..n).find_map(|j| {
        let col = d.column(j);
        (!is_zero_vec(&col)).then(|| residual_witness(&[j], &col))
    });
    r.record("twist-intertwining", twist);
    r
}
