//! Named example families and seeded random instances.
//!
//! Every sampler takes an explicit `ChaCha8Rng`, so equal seeds give equal
//! instances on every platform.

use std::collections::BTreeMap;

use num::{One, Zero};
use rand::seq::SliceRandom;

use rand_chacha::ChaCha8Rng;

use crate::connection::{adjoint_connection, check_connection, curvature_at, induced_hom_connection, Connection, TwistMap};
use crate::error::{Error, Result};
use crate::extension::LengthOneRuth;
use crate::forms::{differential_raw, Form};
use crate::homlie::{check_hom_lie_axioms, HomLieAlgebra};
use crate::linalg::{frac, int, parse_rational, unit_vec, Matrix, Tensor3, Vector, Q};
use crate::ruth::{EndValuedForm, GradedModule, RuthData};

pub use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(k, i, j, c)`: `[e_i, e_j]` has `e_k` coefficient `c`, `i < j`.
pub type CatalogEntry = (usize, usize, usize, i64);

/// Small Lie algebras: `(name, dim, entries)`.
pub const LIE_CATALOG: &[(&str, usize, &[CatalogEntry])] = &[
    ("ab1", 1, &[]),
    ("ab2", 2, &[]),
    ("ab3", 3, &[]),
    ("r2", 2, &[(1, 0, 1, 1)]),
    ("heis", 3, &[(2, 0, 1, 1)]),
    ("sl2", 3, &[(1, 0, 1, 2), (2, 0, 2, -2), (0, 1, 2, 1)]),
    ("r3", 3, &[(1, 0, 1, 1), (2, 0, 2, 1)]),
    ("fil4", 4, &[(2, 0, 1, 1), (3, 0, 2, 1)]),
    ("r2+r2", 4, &[(1, 0, 1, 1), (3, 2, 3, 1)]),
    ("heis+ab", 4, &[(2, 0, 1, 1)]),
];

pub fn catalog_lie(name: &str) -> Option<HomLieAlgebra> {
    LIE_CATALOG.iter().find(|(n, _, _)| *n == name).map(|(_, dim, entries)| {
        let e: Vec<_> = entries.iter().map(|&(k, i, j, c)| (k, i, j, int(c))).collect();
        HomLieAlgebra::from_entries(*dim, &e, Matrix::identity(*dim)).expect("catalog entries are valid")
    })
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Q {
    frac(*[-2, -1, 1, 2, 3].choose(rng).unwrap(), *[1, 1, 2].choose(rng).unwrap())
}

fn small_coefficient<R: Rng>(rng: &mut R, choices: &[i64]) -> Q {
    int(*choices.choose(rng).unwrap())
}

pub fn random_invertible<R: Rng>(rng: &mut R, r: usize) -> Matrix {
    loop {
        let m = Matrix::from_fn(r, r, |a, b| if a == b || rng.gen_bool(0.3) { random_rational(rng) } else { Q::zero() });
        if !m.determinant().is_zero() {
            return m;
        }
    }
}

/// One of identity, scalar, diagonal or a general invertible matrix.
pub fn random_alpha<R: Rng>(rng: &mut R, r: usize) -> Matrix {
    match rng.gen_range(0..4) {
        0 => Matrix::identity(r),
        1 => Matrix::scalar(r, &random_rational(rng)),
        2 => Matrix::diagonal(&(0..r).map(|_| random_rational(rng)).collect::<Vec<_>>()),
        _ => random_invertible(rng, r),
    }
}

fn is_automorphism(g: &HomLieAlgebra, t: &Matrix) -> bool {
    let n = g.dim();
    (0..n).all(|i| (0..n).all(|j| g.bracket(&t.column(i), &t.column(j)) == t.mul_vec(&g.basis_bracket(i, j))))
}

/// An invertible automorphism of the bracket of `g`, found by sampling
/// diagonal and sparse matrices; the identity if none turns up.
pub fn random_automorphism<R: Rng>(rng: &mut R, g: &HomLieAlgebra) -> Matrix {
    let n = g.dim();
    for _ in 0..400 {
        let t = if rng.gen_bool(0.6) {
            Matrix::diagonal(&(0..n).map(|_| random_rational(rng)).collect::<Vec<_>>())
        } else {
            Matrix::from_fn(n, n, |_, _| if rng.gen_bool(0.5) { random_rational(rng) } else { Q::zero() })
        };
        if !t.determinant().is_zero() && is_automorphism(g, &t) {
            return t;
        }
    }
    Matrix::identity(n)
}

/// A catalog algebra twisted by an automorphism (Yau twist or plain bracket),
/// optionally in a random basis; retried until all three axioms hold.
pub fn random_hom_lie<R: Rng>(rng: &mut R, names: &[&str]) -> (String, HomLieAlgebra) {
    loop {
        let name = *names.choose(rng).unwrap();
        let lie = catalog_lie(name).expect("known catalog name");
        let t = random_automorphism(rng, &lie);
        let mut g = if rng.gen_bool(0.5) { lie.yau_twist(&t).expect("square twist") } else { lie.with_twist(t).expect("square twist") };
        if rng.gen_bool(0.3) {
            g = g.change_basis(&random_invertible(rng, g.dim())).expect("invertible");
        }
        if check_hom_lie_axioms(&g).all_passed() {
            return (name.to_string(), g);
        }
    }
}

/// Antisymmetric bracket with invertible twist that violates hom-Jacobi.
pub fn random_jacobi_violating<R: Rng>(rng: &mut R, names: &[&str]) -> (String, HomLieAlgebra) {
    loop {
        let name = *names.choose(rng).unwrap();
        let lie = catalog_lie(name).expect("known catalog name");
        let g = if rng.gen_bool(0.5) {
            lie.with_twist(random_invertible(rng, lie.dim())).expect("square twist")
        } else {
            let n = lie.dim();
            let mut c = lie.structure().clone();
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i == j {
                continue;
            }
            let k = rng.gen_range(0..n);
            let v = random_rational(rng);
            c.set(k, i, j, c.get(k, i, j) + &v);
            c.set(k, j, i, c.get(k, j, i) - &v);
            HomLieAlgebra::new(c, random_automorphism(rng, &lie)).expect("square twist")
        };
        let rep = check_hom_lie_axioms(&g);
        if rep.passed("antisymmetry") && !rep.passed("hom-jacobi") {
            return (name.to_string(), g);
        }
    }
}

/// Affine map `x ↦ f(x)` as `(M, c)` with `f(x) = M x + c`, by probing unit vectors.
fn affine_system(nvars: usize, f: &dyn Fn(&[Q]) -> Vector) -> (Matrix, Vector) {
    let c = f(&vec![Q::zero(); nvars]);
    let cols: Vec<Vector> = (0..nvars).map(|k| f(&unit_vec(nvars, k)).iter().zip(&c).map(|(a, b)| a - b).collect()).collect();
    (Matrix::from_columns(c.len(), &cols), c)
}

fn random_kernel_element<R: Rng>(rng: &mut R, m: &Matrix, coefficients: &[i64]) -> Vector {
    let mut v = vec![Q::zero(); m.cols()];
    for k in m.kernel_basis() {
        let s = small_coefficient(rng, coefficients);
        for (a, b) in v.iter_mut().zip(&k) {
            *a += &s * b;
        }
    }
    v
}

fn unflatten_actions(v: &[Q], n: usize, r: usize) -> Vec<Matrix> {
    (0..n).map(|i| Matrix::from_flat(r, r, v[i * r * r..(i + 1) * r * r].to_vec())).collect()
}

fn nabla_at(actions: &[Matrix], x: &[Q], r: usize) -> Matrix {
    let mut m = Matrix::zeros(r, r);
    for (xi, a) in x.iter().zip(actions) {
        if !xi.is_zero() {
            m.add_scaled(xi, a);
        }
    }
    m
}

/// Residual of `∇_{ΘX}α − α∇_X` over basis `X`, flattened.
fn compatibility_residual(g: &HomLieAlgebra, alpha: &Matrix, actions: &[Matrix]) -> Vector {
    let r = alpha.rows();
    (0..g.dim())
        .flat_map(|i| {
            let lhs = &nabla_at(actions, &g.twist().column(i), r) * alpha;
            (&lhs - &(alpha * &actions[i])).as_flat().to_vec()
        })
        .collect()
}

/// A random element of the space of α-compatible connections.
pub fn random_compatible_connection<R: Rng>(rng: &mut R, g: &HomLieAlgebra, alpha: &Matrix) -> Connection {
    let (n, r) = (g.dim(), alpha.rows());
    let (m, _) = affine_system(n * r * r, &|v| compatibility_residual(g, alpha, &unflatten_actions(v, n, r)));
    let v = random_kernel_element(rng, &m, &[-1, 0, 0, 1, 2]);
    Connection::new(g.clone(), TwistMap::new(alpha.clone()).expect("invertible α"), unflatten_actions(&v, n, r)).expect("shapes")
}

/// Coadjoint connection: `β = Θ^{-T}`, `∇_x = −ad(x)^T`.
pub fn coadjoint_connection(g: &HomLieAlgebra) -> Result<Connection> {
    let inv = g.twist().inverse().ok_or_else(|| Error::SingularTwist("coadjoint needs an invertible twist".into()))?;
    let n = g.dim();
    let action = (0..n).map(|i| g.ad(&unit_vec(n, i)).transpose().scale(&-Q::one())).collect();
    Connection::new(g.clone(), TwistMap::new(inv.transpose())?, action)
}

/// A random α-compatible connection of rank at most `max_rank`, drawn from
/// trivial, adjoint, coadjoint, random compatible, direct sums and conjugates.
pub fn random_connection<R: Rng>(rng: &mut R, g: &HomLieAlgebra, max_rank: usize) -> (String, Connection) {
    let n = g.dim();
    let invertible = !g.twist().determinant().is_zero();
    loop {
        let kind = rng.gen_range(0..6);
        let out = match kind {
            0 => {
                let r = rng.gen_range(1..=max_rank);
                let alpha = random_alpha(rng, r);
                Some(("trivial", Connection::new(g.clone(), TwistMap::new(alpha).unwrap(), vec![Matrix::zeros(r, r); n]).unwrap()))
            }
            1 if invertible && n <= max_rank => Some(("adjoint", adjoint_connection(g).unwrap())),
            2 if invertible && n <= max_rank => Some(("coadjoint", coadjoint_connection(g).unwrap())),
            3 => {
                let r = rng.gen_range(1..=max_rank);
                let alpha = random_alpha(rng, r);
                Some(("random-compatible", random_compatible_connection(rng, g, &alpha)))
            }
            4 if max_rank >= 2 => {
                let r1 = rng.gen_range(1..max_rank);
                let r2 = rng.gen_range(1..=max_rank - r1);
                let (x, y) = (random_alpha(rng, r1), random_alpha(rng, r2));
                let a = random_compatible_connection(rng, g, &x);
                let b = random_compatible_connection(rng, g, &y);
                Some(("direct-sum", a.direct_sum(&b).unwrap()))
            }
            5 => {
                let r = rng.gen_range(1..=max_rank);
                let alpha = random_alpha(rng, r);
                let c = random_compatible_connection(rng, g, &alpha);
                Some(("conjugated", c.conjugate(&random_invertible(rng, r)).unwrap()))
            }
            _ => None,
        };
        if let Some((k, c)) = out {
            return (k.to_string(), c);
        }
    }
}

/// A flat α-compatible connection; falls back to a trivial one.
pub fn random_representation<R: Rng>(rng: &mut R, g: &HomLieAlgebra, max_rank: usize) -> (String, Connection) {
    for _ in 0..50 {
        let (k, c) = random_connection(rng, g, max_rank);
        if check_connection(&c).all_passed() {
            return (k, c);
        }
    }
    let r = rng.gen_range(1..=max_rank);
    ("trivial".into(), Connection::trivial(g.clone(), r))
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Random length-one data satisfying every hypothesis of the extension
/// construction: twists first, then `∂` commuting with them, then connections
/// in the joint compatibility kernel, then `K` from the affine system
/// `K∂ + R⁰ = 0`, `∂K + R¹ = 0`, `K(Θ·,Θ·)α₁ = α₀K`, `d_∇K = 0`.
/// `None` when the last system has no solution.
pub fn random_length_one<R: Rng>(rng: &mut R, g: &HomLieAlgebra, identity_alpha: bool) -> Option<LengthOneRuth> {
    let n = g.dim();
    let (r0, r1) = (rng.gen_range(1..=2usize), rng.gen_range(1..=2usize));
    let pick = |rng: &mut R, r| if identity_alpha { Matrix::identity(r) } else { random_alpha(rng, r) };
    let a0 = pick(rng, r0);
    let a1 = if !identity_alpha && r0 == r1 && rng.gen_bool(0.5) { a0.clone() } else { pick(rng, r1) };

    let (m, _) = affine_system(r1 * r0, &|v| {
        let p = Matrix::from_flat(r1, r0, v.to_vec());
        (&(&a1 * &p) - &(&p * &a0)).as_flat().to_vec()
    });
    let partial = Matrix::from_flat(r1, r0, random_kernel_element(rng, &m, &[-1, 1, 1, 2]));

    let s0 = n * r0 * r0;
    let split = |v: &[Q]| (unflatten_actions(&v[..s0], n, r0), unflatten_actions(&v[s0..], n, r1));
    let (m, _) = affine_system(s0 + n * r1 * r1, &|v| {
        let (n0, n1) = split(v);
        let mut out = compatibility_residual(g, &a0, &n0);
        out.extend(compatibility_residual(g, &a1, &n1));
        for i in 0..n {
            out.extend((&(&n1[i] * &partial) - &(&partial * &n0[i])).as_flat().iter().cloned());
        }
        out
    });
    let (n0, n1) = split(&random_kernel_element(rng, &m, &[-1, 0, 1, 1]));

    let c0 = Connection::new(g.clone(), TwistMap::new(a0.clone()).ok()?, n0.clone()).ok()?;
    let c1 = Connection::new(g.clone(), TwistMap::new(a1.clone()).ok()?, n1.clone()).ok()?;
    let hom = induced_hom_connection(&c1, &c0).ok()?;
    let h = r0 * r1;
    let ps = pairs(n);
    let k_form = |v: &[Q]| Form::from_flat(n, 2, h, v.to_vec());
    let residual = |v: &[Q]| -> Vector {
        let k = k_form(v);
        let k_at = |x: &[Q], y: &[Q]| Matrix::from_flat(r0, r1, k.eval(&[x.to_vec(), y.to_vec()]));
        let mut out = Vec::new();
        for &(i, j) in &ps {
            let (x, y) = (unit_vec(n, i), unit_vec(n, j));
            let kxy = k_at(&x, &y);
            out.extend((&(&kxy * &partial) + &curvature_at(&c0, &x, &y)).as_flat().iter().cloned());
            out.extend((&(&partial * &kxy) + &curvature_at(&c1, &x, &y)).as_flat().iter().cloned());
            let tx = k_at(&g.twist().mul_vec(&x), &g.twist().mul_vec(&y));
            out.extend((&(&tx * &a1) - &(&a0 * &kxy)).as_flat().iter().cloned());
        }
        if n >= 2 {
            out.extend(differential_raw(g, &|x| hom.nabla(x), &k).as_flat().iter().cloned());
        }
        out
    };
    let nk = ps.len() * h;
    let (m, c) = affine_system(nk, &residual);
    let rhs: Vector = c.iter().map(|x| -x).collect();
    let mut k = if nk == 0 {
        if c.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Vec::new()
    } else {
        m.solve(&rhs)?
    };
    for kv in m.kernel_basis() {
        let s = small_coefficient(rng, &[-1, 0, 1, 2]);
        for (a, b) in k.iter_mut().zip(&kv) {
            *a += &s * b;
        }
    }

    let module = GradedModule::new(vec![TwistMap::new(a0).ok()?, TwistMap::new(a1).ok()?]).ok()?;
    let mut omegas = Vec::new();
    if n >= 2 {
        let mut w = EndValuedForm::zero(&module, n, 2, -1);
        w.blocks[1] = Some(k_form(&k));
        omegas.push(w);
    }
    let data = RuthData::new(g.clone(), module, vec![partial], vec![n0, n1], omegas).ok()?;
    LengthOneRuth::new(data).ok()
}

/// `k=v` pairs separated by commas; values are rationals.
pub fn parse_params(s: &str) -> Result<BTreeMap<String, Q>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::InvalidParams(format!("\"{part}\" is not of the form key=value")))?;
        let key = match k.trim() {
            "λ" => "lambda",
            "μ" => "mu",
            other => other,
        };
        let val = parse_rational(v.trim()).map_err(|_| Error::InvalidParams(format!("\"{v}\" is not a rational")))?;
        if out.insert(key.to_string(), val).is_some() {
            return Err(Error::InvalidParams(format!("parameter \"{key}\" given twice")));
        }
    }
    Ok(out)
}

fn take_usize(params: &mut BTreeMap<String, Q>, key: &str) -> Result<Option<usize>> {
    params
        .remove(key)
        .map(|q| {
            if q.is_integer() && q >= Q::zero() {
                q.to_integer().try_into().map_err(|_| Error::InvalidParams(format!("{key} is too large")))
            } else {
                Err(Error::InvalidParams(format!("{key} must be a non-negative integer")))
            }
        })
        .transpose()
}

const MAX_RANDOM_ATTEMPTS: usize = 20_000;

/// Random structure constants projected onto their antisymmetric part with
/// twist identity or a random diagonal, retried until all axioms hold.
pub fn random_family(dim: usize, seed: u64) -> Result<HomLieAlgebra> {
    let mut rng = rng(seed);
    for _ in 0..MAX_RANDOM_ATTEMPTS {
        let mut raw = Tensor3::zeros(dim);
        let entries = if dim < 2 { 0 } else { rng.gen_range(1..=dim.min(3)) };
        for _ in 0..entries {
            let (k, i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim), rng.gen_range(0..dim));
            raw.set(k, i, j, raw.get(k, i, j) + &random_rational(&mut rng));
        }
        let mut c = Tensor3::zeros(dim);
        let half = frac(1, 2);
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    c.set(k, i, j, &half * &(raw.get(k, i, j) - raw.get(k, j, i)));
                }
            }
        }
        let twist = if rng.gen_bool(0.5) {
            Matrix::identity(dim)
        } else {
            Matrix::diagonal(
                &(0..dim)
                    .map(|_| int(*[1, -1, 2, 3].choose(&mut rng).unwrap()) / int(*[1, 2].choose(&mut rng).unwrap()))
                    .collect::<Vec<_>>(),
            )
        };
        let g = HomLieAlgebra::new(c, twist)?;
        if check_hom_lie_axioms(&g).all_passed() {
            return Ok(g);
        }
    }
    Err(Error::Unsatisfiable(format!("no valid instance of dimension {dim} after {MAX_RANDOM_ATTEMPTS} attempts")))
}

/// Builds a named family.  The random family takes its seed from `seed`,
/// then `env_seed`, then 0.
pub fn generate_family(family: &str, params: &str, env_seed: Option<u64>) -> Result<HomLieAlgebra> {
    let mut p = parse_params(params)?;
    let out = match family {
        "abelian" => {
            let dim = take_usize(&mut p, "dim")?.ok_or_else(|| Error::InvalidParams("abelian needs dim".into()))?;
            HomLieAlgebra::abelian(dim)
        }
        "heisenberg" => {
            let l = p.remove("lambda").unwrap_or_else(Q::one);
            let m = p.remove("mu").unwrap_or_else(Q::one);
            let lm = &l * &m;
            HomLieAlgebra::from_entries(3, &[(2, 0, 1, Q::one())], Matrix::diagonal(&[l, m, lm]))?
        }
        "affine" => {
            let a = p.remove("a").unwrap_or_else(Q::one);
            let b = p.remove("b").unwrap_or_else(Q::zero);
            let twist = Matrix::from_rows(vec![vec![Q::one(), Q::zero()], vec![b, a]]);
            HomLieAlgebra::from_entries(2, &[(1, 0, 1, Q::one())], twist)?
        }
        "random" => {
            let dim = take_usize(&mut p, "dim")?.ok_or_else(|| Error::InvalidParams("random needs dim".into()))?;
            if dim > 8 {
                return Err(Error::InvalidParams("random supports dim ≤ 8".into()));
            }
            let seed = take_usize(&mut p, "seed")?.map(|s| s as u64).or(env_seed).unwrap_or(0);
            random_family(dim, seed)?
        }
        other => return Err(Error::InvalidParams(format!("unknown family \"{other}\""))),
    };
    if let Some(k) = p.keys().next() {
        return Err(Error::InvalidParams(format!("unknown parameter \"{k}\" for family {family}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::check_length_one;

    #[test]
    fn families() {
        let h = generate_family("heisenberg", "λ=2,μ=1/2", None).unwrap();
        assert_eq!(h.twist(), &Matrix::diagonal(&[int(2), frac(1, 2), int(1)]));
        assert_eq!(generate_family("heisenberg", "lambda=2,mu=1/2", None).unwrap(), h);
        let a = generate_family("abelian", "dim=5", None).unwrap();
        assert!(a.structure().is_zero() && a.twist() == &Matrix::identity(5));
        for (f, ps) in [("affine", "a=3,b=-1"), ("random", "dim=2,seed=1"), ("random", "dim=4,seed=7")] {
            assert!(check_hom_lie_axioms(&generate_family(f, ps, None).unwrap()).all_passed(), "{f} {ps}");
        }
        assert_eq!(generate_family("random", "dim=3", Some(9)).unwrap(), generate_family("random", "dim=3,seed=9", None).unwrap());
        assert!(matches!(generate_family("abelian", "dim=x", None), Err(Error::InvalidParams(_))));
        assert!(matches!(generate_family("abelian", "", None), Err(Error::InvalidParams(_))));
        assert!(matches!(generate_family("heisenberg", "nu=1", None), Err(Error::InvalidParams(_))));
        assert!(matches!(generate_family("moebius", "", None), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn samplers_produce_what_they_promise() {
        let mut r = rng(11);
        for _ in 0..20 {
            let (_, g) = random_hom_lie(&mut r, &["r2", "heis", "sl2", "r3"]);
            assert!(check_hom_lie_axioms(&g).all_passed());
            let (_, c) = random_connection(&mut r, &g, 3);
            assert!(check_connection(&c).passed("alpha-compatibility"));
            let (_, bad) = random_jacobi_violating(&mut r, &["r2", "heis", "sl2"]);
            assert!(!check_hom_lie_axioms(&bad).passed("hom-jacobi"));
        }
    }

    #[test]
    fn length_one_samples_satisfy_hypotheses() {
        let mut r = rng(3);
        let mut built = 0;
        for _ in 0..15 {
            let (_, g) = random_hom_lie(&mut r, &["ab2", "r2", "heis"]);
            let ident = r.gen_bool(0.5);
            if let Some(l) = random_length_one(&mut r, &g, ident) {
                let rep = check_length_one(&l);
                assert!(rep.all_passed(), "{}", rep.to_text());
                built += 1;
            }
        }
        assert!(built > 5);
    }
}
