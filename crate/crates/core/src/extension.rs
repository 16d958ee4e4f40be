//! The extension `Hom(C¹, C⁰) ⊕ A` built from a length-one representation up
//! to homotopy `C⁰ --∂--> C¹` with curvature form `K: C¹ → C⁰`.
//!
//! Fiber elements `f: C¹ → C⁰` are stored row-major, index `a * r₁ + b`.
//! The total bracket is
//! `[(f,X),(g,Y)] = (f∂g − g∂f + ∇_X g − ∇_Y f − K(X,Y), [X,Y])`
//! with the induced Hom-connection `∇` and twist `Id ⊕ Θ`.  The signs of the
//! connection and `K` clauses are the ones for which hom-Jacobi closes when
//! `K∂ + R⁰ = 0`, `∂K + R¹ = 0` and `d_∇K = 0`.

use num::{One, Zero};

use crate::connection::{check_connection, curvature_at, induced_hom_connection, Connection};
use crate::error::{Error, Result};
use crate::forms::{differential_raw, Form};
use crate::homlie::{check_hom_lie_axioms, is_morphism, HomLieAlgebra, LinearMapBetween};
use crate::linalg::{format_combination, is_zero_vec, rank, unit_vec, Matrix, Tensor3, Vector, Q};
use crate::report::Report;
use crate::ruth::RuthData;

/// A representation up to homotopy with exactly two degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthOneRuth {
    data: RuthData,
}

impl LengthOneRuth {
    pub fn new(data: RuthData) -> Result<Self> {
        let d = data.module().degrees();
        if d != 2 {
            return Err(Error::NotLengthOne(format!("expected degrees 0 and 1, found {d} degree(s)")));
        }
        Ok(LengthOneRuth { data })
    }

    pub fn data(&self) -> &RuthData {
        &self.data
    }

    pub fn algebra(&self) -> &HomLieAlgebra {
        self.data.algebra()
    }

    pub fn ranks(&self) -> (usize, usize) {
        (self.data.module().rank(0), self.data.module().rank(1))
    }

    /// `∂: C⁰ → C¹`, an `r₁ × r₀` matrix.
    pub fn partial(&self) -> &Matrix {
        &self.data.partial()[0]
    }

    /// `K` as a 2-form with values in `Hom(C¹, C⁰)`; zero when absent.
    pub fn k(&self) -> Form {
        let (r0, r1) = self.ranks();
        let n = self.algebra().dim();
        self.data.omega(2).and_then(|w| w.blocks[1].clone()).unwrap_or_else(|| Form::zero(n, 2, r0 * r1))
    }

    /// Induced connection on the fiber `Hom(C¹, C⁰)`.
    pub fn fiber_connection(&self) -> Connection {
        induced_hom_connection(&self.data.connection(1), &self.data.connection(0)).expect("same algebra")
    }
}

fn pair_witness(i: usize, j: usize, m: &Matrix) -> String {
    format!("(e{},e{}): residual {m:?}", i + 1, j + 1)
}

/// One verdict per hypothesis: the item-wise invariants, both halves of the
/// curvature equation, `d_∇K = 0` and the twist compatibility of `K`.
pub fn check_length_one(l: &LengthOneRuth) -> Report {
    let g = l.algebra();
    let n = g.dim();
    let (r0, r1) = l.ranks();
    let d = l.partial();
    let c0 = l.data.connection(0);
    let c1 = l.data.connection(1);
    let mut rep = Report::new("ruth");
    let a0 = c0.alpha().matrix();
    let a1 = c1.alpha().matrix();
    let res = &(a1 * d) - &(d * a0);
    rep.record("partial-alpha", (!res.is_zero()).then(|| format!("residual {res:?}")));
    let w = [(&c0, 0), (&c1, 1)].into_iter().find_map(|(c, q)| {
        check_connection(c).get("alpha-compatibility").and_then(|c| c.witness.clone()).map(|w| format!("degree {q}, {w}"))
    });
    rep.record("connection-alpha-compatibility", w);
    let w = (0..n).find_map(|i| {
        let res = &(&c1.action()[i] * d) - &(d * &c0.action()[i]);
        (!res.is_zero()).then(|| format!("X=e{}: residual {res:?}", i + 1))
    });
    rep.record("partial-connection", w);

    let k = l.k();
    let k_at = |x: &[Q], y: &[Q]| Matrix::from_flat(r0, r1, k.eval(&[x.to_vec(), y.to_vec()]));
    let mut w0 = None;
    let mut w1 = None;
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (unit_vec(n, i), unit_vec(n, j));
            let kxy = k_at(&x, &y);
            if w0.is_none() {
                let res = &(&kxy * d) + &curvature_at(&c0, &x, &y);
                w0 = (!res.is_zero()).then(|| pair_witness(i, j, &res));
            }
            if w1.is_none() {
                let res = &(d * &kxy) + &curvature_at(&c1, &x, &y);
                w1 = (!res.is_zero()).then(|| pair_witness(i, j, &res));
            }
        }
    }
    rep.record("block-2-curvature-degree-0", w0);
    rep.record("block-2-curvature-degree-1", w1);

    let hom = l.fiber_connection();
    let dk = differential_raw(g, &|x| hom.nabla(x), &k);
    rep.record("k-closed", dk.first_nonzero().map(|v| format!("d_∇K at {v}")));

    let theta = g.twist();
    let w = (0..n).find_map(|i| {
        (i + 1..n).find_map(|j| {
            let (x, y) = (unit_vec(n, i), unit_vec(n, j));
            let lhs = &k_at(&theta.mul_vec(&x), &theta.mul_vec(&y)) * a1;
            let res = &lhs - &(a0 * &k_at(&x, &y));
            (!res.is_zero()).then(|| pair_witness(i, j, &res))
        })
    });
    rep.record("k-alpha-compatibility", w);
    rep
}

/// The fiber data needed to check the restricted bracket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberData {
    pub r0: usize,
    pub r1: usize,
    /// `∂: C⁰ → C¹`.
    pub partial: Matrix,
}

impl FiberData {
    /// `[f,g]_∂ = f∂g − g∂f` on row-major vectors.
    pub fn bracket(&self, f: &[Q], g: &[Q]) -> Vector {
        let f = Matrix::from_flat(self.r0, self.r1, f.to_vec());
        let g = Matrix::from_flat(self.r0, self.r1, g.to_vec());
        let p = &self.partial;
        (&(&(&f * p) * &g) - &(&(&g * p) * &f)).as_flat().to_vec()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub algebra: HomLieAlgebra,
    /// `(h + n) × h`, the coordinate inclusion of the fiber.
    pub inclusion: Matrix,
    /// `n × (h + n)`, the coordinate projection onto the base.
    pub projection: Matrix,
    pub fiber: Option<FiberData>,
}

impl Extension {
    pub fn fiber_dim(&self) -> usize {
        self.inclusion.cols()
    }
}

/// Assembles the total algebra.  Without `force` every `check_length_one`
/// verdict must pass.
pub fn build_extension(l: &LengthOneRuth, force: bool) -> Result<Extension> {
    if !force {
        let rep = check_length_one(l);
        let first = rep.failures().next().map(|f| format!("{}: {}", f.id, f.witness.clone().unwrap_or_default()));
        if let Some(msg) = first {
            return Err(Error::Precondition(msg));
        }
    }
    let g = l.algebra();
    let n = g.dim();
    let (r0, r1) = l.ranks();
    let h = r0 * r1;
    let m = h + n;
    let fiber = FiberData { r0, r1, partial: l.partial().clone() };
    let hom = l.fiber_connection();
    let k = l.k();
    let bracket = |u: &[Q], v: &[Q]| -> Vector {
        let (f, x) = u.split_at(h);
        let (gg, y) = v.split_at(h);
        let mut fib = fiber.bracket(f, gg);
        let nx = hom.nabla(x).mul_vec(gg);
        let ny = hom.nabla(y).mul_vec(f);
        let kxy = if n >= 2 { k.eval(&[x.to_vec(), y.to_vec()]) } else { vec![Q::zero(); h] };
        for t in 0..h {
            fib[t] = &fib[t] + &nx[t] - &ny[t] - &kxy[t];
        }
        fib.extend(g.bracket(x, y));
        fib
    };
    let mut c = Tensor3::zeros(m);
    for i in 0..m {
        for j in 0..m {
            let v = bracket(&unit_vec(m, i), &unit_vec(m, j));
            for (kk, val) in v.into_iter().enumerate() {
                c.set(kk, i, j, val);
            }
        }
    }
    let twist = Matrix::identity(h).direct_sum(g.twist());
    let algebra = HomLieAlgebra::new(c, twist)?;
    let inclusion = Matrix::from_fn(m, h, |r, col| if r == col { Q::one() } else { Q::zero() });
    let projection = Matrix::from_fn(n, m, |r, col| if col == h + r { Q::one() } else { Q::zero() });
    Ok(Extension { algebra, inclusion, projection, fiber: Some(fiber) })
}

/// The quotient `Ã / ι(H)` transported to the coordinates of the projection,
/// using any right inverse of it.
pub fn quotient_algebra(e: &Extension) -> Result<HomLieAlgebra> {
    let p = &e.projection;
    let n = p.rows();
    if p.cols() != e.algebra.dim() || rank(p) != n {
        return Err(Error::Malformed("projection is not surjective onto its target".into()));
    }
    let section: Vec<Vector> = (0..n).map(|k| p.solve(&unit_vec(n, k)).expect("surjective")).collect();
    let mut c = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v = p.mul_vec(&e.algebra.bracket(&section[i], &section[j]));
            for (k, val) in v.into_iter().enumerate() {
                c.set(k, i, j, val);
            }
        }
    }
    let twist = Matrix::from_columns(n, &section.iter().map(|s| p.mul_vec(&e.algebra.apply_twist(s))).collect::<Vec<_>>());
    HomLieAlgebra::new(c, twist)
}

/// Verdicts: `antisymmetry`, `hom-jacobi`, `projection-morphism`, `ideal`,
/// `fiber-bracket` (when fiber data is known), `exactness`; multiplicativity
/// of the total twist is informational.
pub fn verify_extension(e: &Extension, base: Option<&HomLieAlgebra>) -> Result<Report> {
    let total = &e.algebra;
    let m = total.dim();
    let h = e.fiber_dim();
    if e.inclusion.rows() != m || e.projection.cols() != m {
        return Err(Error::Dimension("inclusion/projection do not match the total algebra".into()));
    }
    let mut rep = Report::new("extension");
    let axioms = check_hom_lie_axioms(total);
    for id in ["antisymmetry", "hom-jacobi"] {
        rep.record(id, axioms.get(id).and_then(|c| c.witness.clone()));
    }
    rep.record_info("multiplicativity", axioms.get("multiplicativity").and_then(|c| c.witness.clone()));

    let quotient;
    let target = match base {
        Some(b) => b,
        None => {
            quotient = quotient_algebra(e)?;
            &quotient
        }
    };
    let morph = LinearMapBetween::new(total, target, e.projection.clone())
        .map(|phi| is_morphism(&phi))
        .map_err(|_| Error::Dimension("projection does not map onto the base".into()))?;
    let w = morph.failures().next().map(|f| format!("{}: {}", f.id, f.witness.clone().unwrap_or_default()));
    rep.record("projection-morphism", w);

    let fiber_vecs: Vec<Vector> = (0..h).map(|j| e.inclusion.column(j)).collect();
    let w = (0..m).find_map(|i| {
        fiber_vecs.iter().enumerate().find_map(|(j, v)| {
            let b = total.bracket(&unit_vec(m, i), v);
            let leak = e.projection.mul_vec(&b);
            (!is_zero_vec(&leak)).then(|| format!("[e{}, ι(h{})] leaves the fiber: {}", i + 1, j + 1, format_combination(&leak, "a")))
        })
    });
    rep.record("ideal", w);

    if let Some(fd) = &e.fiber {
        let w = (0..h).find_map(|i| {
            (0..h).find_map(|j| {
                let got = total.bracket(&fiber_vecs[i], &fiber_vecs[j]);
                let want = e.inclusion.mul_vec(&fd.bracket(&unit_vec(h, i), &unit_vec(h, j)));
                let diff: Vector = got.iter().zip(&want).map(|(a, b)| a - b).collect();
                (!is_zero_vec(&diff)).then(|| format!("(h{},h{}): residual {}", i + 1, j + 1, format_combination(&diff, "e")))
            })
        });
        rep.record("fiber-bracket", w);
    }

    let n = e.projection.rows();
    let composite = &e.projection * &e.inclusion;
    let w = if rank(&e.inclusion) != h {
        Some(format!("inclusion has rank {} < {h}", rank(&e.inclusion)))
    } else if rank(&e.projection) != n {
        Some(format!("projection has rank {} < {n}", rank(&e.projection)))
    } else if !composite.is_zero() {
        Some(format!("projection∘inclusion = {composite:?}"))
    } else if h + n != m {
        Some(format!("dimensions {h} + {n} ≠ {m}"))
    } else {
        None
    };
    rep.record("exactness", w);
    Ok(rep)
}
