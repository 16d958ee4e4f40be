//! Independent reference computations for cross-checking the library.
//!
//! Nothing here calls library arithmetic: the algebra is copied out into
//! nested `Vec`s once and every identity is evaluated from structure
//! constants by its textbook formula. Elimination is a separate
//! fraction-based routine.

#![allow(dead_code)]

use hlk_core::homlie::HomLieAlgebra;
use num::{BigRational, One, Zero};

pub type R = BigRational;

/// Structure constants `c[k][i][j]` (coefficient of `e_k` in `[e_i, e_j]`) and
/// `theta[r][c]` (coefficient of `e_r` in `Θ e_c`).
#[derive(Clone, Debug)]
pub struct Alg {
    pub n: usize,
    pub c: Vec<Vec<Vec<R>>>,
    pub theta: Vec<Vec<R>>,
}

impl Alg {
    pub fn of(g: &HomLieAlgebra) -> Self {
        let n = g.dim();
        let c = (0..n).map(|k| (0..n).map(|i| (0..n).map(|j| g.structure().get(k, i, j).clone()).collect()).collect()).collect();
        let theta = (0..n).map(|r| (0..n).map(|c| g.twist().get(r, c).clone()).collect()).collect();
        Alg { n, c, theta }
    }

    pub fn with_identity_twist(&self) -> Self {
        let theta = (0..self.n).map(|r| (0..self.n).map(|c| if r == c { R::one() } else { R::zero() }).collect()).collect();
        Alg { theta, ..self.clone() }
    }

    pub fn bracket(&self, x: &[R], y: &[R]) -> Vec<R> {
        let n = self.n;
        let mut out = vec![R::zero(); n];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = xi * yj;
                for (k, o) in out.iter_mut().enumerate() {
                    *o += &s * &self.c[k][i][j];
                }
            }
        }
        out
    }

    pub fn twist(&self, x: &[R]) -> Vec<R> {
        (0..self.n).map(|r| (0..self.n).map(|c| &self.theta[r][c] * &x[c]).sum()).collect()
    }

    fn e(&self, i: usize) -> Vec<R> {
        (0..self.n).map(|k| if k == i { R::one() } else { R::zero() }).collect()
    }

    /// `[Θx,[y,z]] + [Θy,[z,x]] + [Θz,[x,y]] = 0` on all basis triples.
    pub fn hom_jacobi_holds(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (x, y, z) = (self.e(a), self.e(b), self.e(c));
                    let t1 = self.bracket(&self.twist(&x), &self.bracket(&y, &z));
                    let t2 = self.bracket(&self.twist(&y), &self.bracket(&z, &x));
                    let t3 = self.bracket(&self.twist(&z), &self.bracket(&x, &y));
                    if (0..n).any(|k| !(&t1[k] + &t2[k] + &t3[k]).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Classical Jacobi identity, ignoring Θ.
    pub fn jacobi_holds(&self) -> bool {
        self.with_identity_twist().hom_jacobi_holds()
    }

    fn ad(&self, x: &[R]) -> Vec<Vec<R>> {
        // Column j is [x, e_j].
        let cols: Vec<Vec<R>> = (0..self.n).map(|j| self.bracket(x, &self.e(j))).collect();
        (0..self.n).map(|r| (0..self.n).map(|c| cols[c][r].clone()).collect()).collect()
    }

    /// `ad(Θx)ad(y) − ad(Θy)ad(x) − ad([x,y])Θ = 0` on basis pairs.
    pub fn adjoint_flat(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let (x, y) = (self.e(a), self.e(b));
                let l1 = mat_mul(&self.ad(&self.twist(&x)), &self.ad(&y));
                let l2 = mat_mul(&self.ad(&self.twist(&y)), &self.ad(&x));
                let l3 = mat_mul(&self.ad(&self.bracket(&x, &y)), &self.theta);
                for r in 0..n {
                    for c in 0..n {
                        if !(&l1[r][c] - &l2[r][c] - &l3[r][c]).is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `∇_{Θx}∇_y − ∇_{Θy}∇_x − ∇_{[x,y]}α = 0` on basis pairs, `actions[i]` the matrix of `∇_{e_i}`.
    pub fn curvature_zero(&self, actions: &[Vec<Vec<R>>], alpha: &[Vec<R>]) -> bool {
        let n = self.n;
        let r = alpha.len();
        let nabla = |x: &[R]| -> Vec<Vec<R>> {
            (0..r).map(|a| (0..r).map(|b| (0..n).map(|i| &x[i] * &actions[i][a][b]).sum()).collect()).collect()
        };
        for a in 0..n {
            for b in 0..n {
                let (x, y) = (self.e(a), self.e(b));
                let l1 = mat_mul(&nabla(&self.twist(&x)), &nabla(&y));
                let l2 = mat_mul(&nabla(&self.twist(&y)), &nabla(&x));
                let l3 = mat_mul(&nabla(&self.bracket(&x, &y)), alpha);
                if (0..r).any(|i| (0..r).any(|j| !(&l1[i][j] - &l2[i][j] - &l3[i][j]).is_zero())) {
                    return false;
                }
            }
        }
        true
    }

    /// Classical Chevalley–Eilenberg cohomology with trivial coefficients,
    /// cochains stored on increasing index tuples.
    pub fn ce_dims(&self) -> Vec<usize> {
        let n = self.n;
        let tuples: Vec<Vec<Vec<usize>>> = (0..=n).map(|p| subsets(n, p)).collect();
        // Matrix of d: C^p → C^{p+1}, rows indexed by (p+1)-tuples.
        let d_rank: Vec<usize> = (0..=n)
            .map(|p| {
                if p == n {
                    return 0;
                }
                let cols: Vec<Vec<R>> = tuples[p]
                    .iter()
                    .map(|s| {
                        tuples[p + 1]
                            .iter()
                            .map(|t| {
                                // (dω)(x_0..x_p) = Σ_{a<b} (−1)^{a+b} ω([x_a,x_b], rest), ω the dual of s.
                                let mut acc = R::zero();
                                for a in 0..t.len() {
                                    for b in a + 1..t.len() {
                                        let br = self.bracket(&self.e(t[a]), &self.e(t[b]));
                                        let rest: Vec<usize> =
                                            t.iter().enumerate().filter(|&(i, _)| i != a && i != b).map(|(_, &v)| v).collect();
                                        let mut val = R::zero();
                                        for (k, ck) in br.iter().enumerate() {
                                            if ck.is_zero() {
                                                continue;
                                            }
                                            let mut args = vec![k];
                                            args.extend(&rest);
                                            val += ck * dual_eval(s, &args);
                                        }
                                        if (a + b) % 2 == 0 {
                                            acc += val;
                                        } else {
                                            acc -= val;
                                        }
                                    }
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect();
                rank(cols)
            })
            .collect();
        (0..=n).map(|p| tuples[p].len() - d_rank[p] - if p == 0 { 0 } else { d_rank[p - 1] }).collect()
    }

    /// Cohomology of the subcomplex of Θ-invariant scalar forms (trivial
    /// coefficients, `α = 1`) with the twisted differential
    /// `(dω)(x_0..x_p) = Σ_{a<b} (−1)^{a+b} ω([x_a,x_b], Θx_0, …, Θx_p)`, computed
    /// on full `n^p` coordinate arrays.
    pub fn twisted_invariant_dims(&self) -> Vec<usize> {
        let n = self.n;
        let spaces: Vec<Vec<Vec<R>>> = (0..=n).map(|p| self.invariant_alternating(p)).collect();
        let d_rank: Vec<usize> = (0..=n)
            .map(|p| {
                if p == n {
                    return 0;
                }
                rank(spaces[p].iter().map(|w| self.full_d(p, w)).collect())
            })
            .collect();
        (0..=n).map(|p| spaces[p].len() - d_rank[p] - if p == 0 { 0 } else { d_rank[p - 1] }).collect()
    }

    /// Basis of alternating `p`-arrays `ω` with `ω(Θ·, …, Θ·) = ω`.
    fn invariant_alternating(&self, p: usize) -> Vec<Vec<R>> {
        let n = self.n;
        let alt: Vec<Vec<R>> = subsets(n, p).iter().map(|s| antisymmetrized(n, s)).collect();
        let size = n.pow(p as u32);
        // Columns (Θ* − 1)a_s; the kernel combines the a_s.
        let cols: Vec<Vec<R>> = alt
            .iter()
            .map(|a| {
                (0..size)
                    .map(|idx| {
                        let args: Vec<Vec<R>> = digits(n, p, idx).iter().map(|&i| self.twist(&self.e(i))).collect();
                        eval_full(n, a, &args) - &a[idx]
                    })
                    .collect()
            })
            .collect();
        kernel(&cols, alt.len())
            .into_iter()
            .map(|lam| {
                let mut w = vec![R::zero(); size];
                for (l, a) in lam.iter().zip(&alt) {
                    for (wi, ai) in w.iter_mut().zip(a) {
                        *wi += l * ai;
                    }
                }
                w
            })
            .collect()
    }

    fn full_d(&self, p: usize, w: &[R]) -> Vec<R> {
        let n = self.n;
        (0..n.pow(p as u32 + 1))
            .map(|idx| {
                let x = digits(n, p + 1, idx);
                let mut acc = R::zero();
                for a in 0..=p {
                    for b in a + 1..=p {
                        let mut args = vec![self.bracket(&self.e(x[a]), &self.e(x[b]))];
                        for (c, &xc) in x.iter().enumerate() {
                            if c != a && c != b {
                                args.push(self.twist(&self.e(xc)));
                            }
                        }
                        let v = eval_full(n, w, &args);
                        if (a + b) % 2 == 0 {
                            acc += v;
                        } else {
                            acc -= v;
                        }
                    }
                }
                acc
            })
            .collect()
    }
}

fn mat_mul(a: &[Vec<R>], b: &[Vec<R>]) -> Vec<Vec<R>> {
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    (0..n).map(|r| (0..m).map(|c| (0..k).map(|t| &a[r][t] * &b[t][c]).sum()).collect()).collect()
}

pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, p, &mut Vec::new(), &mut out);
    out
}

/// Value of the dual cochain of the increasing tuple `s` on basis vectors `args`.
fn dual_eval(s: &[usize], args: &[usize]) -> R {
    let mut v = args.to_vec();
    let mut sign = 1i64;
    // Bubble sort, tracking transpositions; repeated indices give zero.
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return R::zero();
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) || v != s {
        R::zero()
    } else {
        R::from_integer(sign.into())
    }
}

fn digits(n: usize, p: usize, mut idx: usize) -> Vec<usize> {
    let mut d = vec![0; p];
    for slot in d.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    d
}

fn antisymmetrized(n: usize, s: &[usize]) -> Vec<R> {
    let p = s.len();
    (0..n.pow(p as u32)).map(|idx| dual_eval(s, &digits(n, p, idx))).collect()
}

/// Multilinear evaluation of a full array on arbitrary vectors.
fn eval_full(n: usize, w: &[R], args: &[Vec<R>]) -> R {
    let p = args.len();
    let mut acc = R::zero();
    for (idx, wi) in w.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        let mut term = wi.clone();
        for (a, &d) in args.iter().zip(&digits(n, p, idx)) {
            if a[d].is_zero() {
                term = R::zero();
                break;
            }
            term *= &a[d];
        }
        acc += term;
    }
    acc
}

/// Row reduction returning (rank, reduced rows, pivot columns).
fn reduce(mut rows: Vec<Vec<R>>, width: usize) -> (Vec<Vec<R>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, pr);
        let inv = R::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (v, pv) in rows[i].iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Rank of a list of equal-length vectors.
pub fn rank(vectors: Vec<Vec<R>>) -> usize {
    let width = vectors.first().map_or(0, |v| v.len());
    reduce(vectors, width).1.len()
}

/// Kernel of the matrix whose columns are `cols` (each of equal length), `ncols` columns.
pub fn kernel(cols: &[Vec<R>], ncols: usize) -> Vec<Vec<R>> {
    let nrows = cols.first().map_or(0, |c| c.len());
    let rows: Vec<Vec<R>> = (0..nrows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let (red, pivots) = reduce(rows, ncols);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![R::zero(); ncols];
            v[free] = R::one();
            for (row, &pc) in red.iter().zip(&pivots) {
                v[pc] = -row[free].clone();
            }
            v
        })
        .collect()
}
