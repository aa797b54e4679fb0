//! The Lie algebra `gl_n` over Q: brackets, the trace pairing, Jordan data,
//! sl2-triples and neutral elements.
//!
//! An element of `gl_n` is an `n x n` [`QMatrix`]. As a vector it is the
//! row-major list of its entries, so `E_ij` (1-based) has coordinate
//! `(i - 1) * n + (j - 1)`.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::is_zero_vec;
use crate::partitions::Composition;
use crate::{q, QMatrix, QSubspace, Rational};

/// The elementary matrix `E_ij` in `gl_n`, with 1-based indices.
pub fn elementary(n: usize, i: usize, j: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    m.set(i - 1, j - 1, q(1));
    m
}

/// Coordinate index of `E_ij` (1-based `i`, `j`).
pub fn coord(n: usize, i: usize, j: usize) -> usize {
    (i - 1) * n + (j - 1)
}

pub fn to_vec(x: &QMatrix) -> Vec<Rational> {
    x.as_flat().to_vec()
}

pub fn from_vec(n: usize, v: &[Rational]) -> QMatrix {
    QMatrix::from_flat(n, n, v.to_vec()).expect("vector of length n^2")
}

/// `[a, b] = ab - ba`.
pub fn bracket(a: &QMatrix, b: &QMatrix) -> QMatrix {
    &(a * b) - &(b * a)
}

/// `tr(ab)`.
pub fn trace_form(a: &QMatrix, b: &QMatrix) -> Rational {
    let n = a.rows();
    let mut acc = q(0);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (a.get(i, j), b.get(j, i));
            if !x.is_zero() && !y.is_zero() {
                acc += x * y;
            }
        }
    }
    acc
}

/// Matrix of `ad(x) = [x, .]` on `gl_n` in the row-major elementary basis.
pub fn ad_matrix(x: &QMatrix) -> QMatrix {
    let n = x.rows();
    let mut m = QMatrix::zeros(n * n, n * n);
    // [x, E_kl] = sum_i x_ik E_il - sum_j x_lj E_kj
    for k in 0..n {
        for l in 0..n {
            let col = k * n + l;
            for i in 0..n {
                let v = x.get(i, k);
                if !v.is_zero() {
                    let r = i * n + l;
                    let cur = m.get(r, col).clone();
                    m.set(r, col, cur + v);
                }
            }
            for j in 0..n {
                let v = x.get(l, j);
                if !v.is_zero() {
                    let r = k * n + j;
                    let cur = m.get(r, col).clone();
                    m.set(r, col, cur - v);
                }
            }
        }
    }
    m
}

/// Diagonal entries of a diagonal matrix.
pub fn diag_entries(s: &QMatrix) -> Result<Vec<Rational>> {
    if !s.is_diagonal() {
        return Err(Error::NotDiagonal(format!("{s:?}")));
    }
    Ok(s.diagonal())
}

/// Whether `[s, x] = c x`.
pub fn has_weight(s: &QMatrix, x: &QMatrix, c: &Rational) -> bool {
    bracket(s, x) == x.scale(c)
}

/// Lower-triangular Jordan matrix `J_eta`: block `J_k` maps `e_1 -> e_2 -> ... -> e_k -> 0`.
pub fn jordan_matrix(eta: &Composition) -> QMatrix {
    let n = eta.total();
    let mut m = QMatrix::zeros(n, n);
    let mut start = 0;
    for &k in eta.parts() {
        for i in 1..k {
            m.set(start + i, start + i - 1, q(1));
        }
        start += k;
    }
    m
}

/// `h_eta = diag(h_{eta_1}, ...)`, with `h_k = diag(k-1, k-3, ..., 1-k)`.
pub fn neutral_h(eta: &Composition) -> QMatrix {
    QMatrix::diag(&neutral_h_entries(eta))
}

pub fn neutral_h_entries(eta: &Composition) -> Vec<Rational> {
    eta.parts()
        .iter()
        .flat_map(|&k| (0..k).map(move |i| q(k as i64 - 1 - 2 * i as i64)))
        .collect()
}

/// `(f, h, e)` with `[h, e] = 2e`, `[h, f] = -2f`, `[e, f] = h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sl2Triple {
    pub f: QMatrix,
    pub h: QMatrix,
    pub e: QMatrix,
}

impl Sl2Triple {
    pub fn satisfies_relations(&self) -> bool {
        has_weight(&self.h, &self.e, &q(2))
            && has_weight(&self.h, &self.f, &q(-2))
            && bracket(&self.e, &self.f) == self.h
    }
}

/// Jordan chains `b_0, N b_0, ..., N^{L-1} b_0` forming a basis of `Q^n`.
///
/// Chains are built from the highest nilpotency degree down. At degree `d`
/// the candidates are the RREF basis vectors of `ker N^d` intersected with
/// each eigenspace of `grading` (one block when there is no grading), taken
/// in order of pivot column; a candidate starts a new chain when it is not in
/// the span of `ker N^{d-1}` and the degree-`d` vectors already chosen.
/// `N` must map eigenspaces of `grading` into eigenspaces.
pub fn jordan_chains(nil: &QMatrix, grading: Option<&[Rational]>) -> Result<Vec<Vec<Vec<Rational>>>> {
    let size = nil.rows();
    if !nil.is_square() {
        return Err(Error::DimensionMismatch("Jordan chains of a non-square matrix".into()));
    }
    let mut powers = vec![QMatrix::identity(size)];
    for _ in 0..size {
        let next = powers.last().map(|p| p * nil).expect("nonempty");
        powers.push(next);
    }
    let Some(depth) = (0..=size).find(|&d| powers[d].is_zero()) else {
        return Err(Error::NotNilpotent);
    };
    let groups: Vec<Vec<usize>> = match grading {
        None => vec![(0..size).collect()],
        Some(g) => {
            let mut groups: Vec<(Rational, Vec<usize>)> = Vec::new();
            for (i, x) in g.iter().enumerate() {
                match groups.iter_mut().find(|(v, _)| v == x) {
                    Some((_, idx)) => idx.push(i),
                    None => groups.push((x.clone(), vec![i])),
                }
            }
            groups.into_iter().map(|(_, idx)| idx).collect()
        }
    };
    let kernels: Vec<QSubspace> = powers[..=depth].iter().map(|p| p.kernel()).collect();
    let mut chains: Vec<Vec<Vec<Rational>>> = Vec::new();
    for d in (1..=depth).rev() {
        let mut used = kernels[d - 1].extend(chains.iter().map(|c| c[c.len() - d].clone()));
        let mut candidates: Vec<(usize, Vec<Rational>)> = Vec::new();
        for g in &groups {
            let restricted = QMatrix::from_fn(size, g.len(), |i, j| powers[d].get(i, g[j]).clone());
            for b in restricted.kernel().basis() {
                let mut v = vec![q(0); size];
                for (j, &c) in g.iter().enumerate() {
                    v[c] = b[j].clone();
                }
                let pivot = v.iter().position(|x| !x.is_zero()).expect("nonzero basis vector");
                candidates.push((pivot, v));
            }
        }
        candidates.sort_by_key(|c| c.0);
        for (_, top) in candidates {
            if used.contains(&top) {
                continue;
            }
            used = used.extend([top.clone()]);
            let mut chain = vec![top];
            for _ in 1..d {
                let next = nil.mul_vec(chain.last().expect("nonempty"));
                chain.push(next);
            }
            chains.push(chain);
        }
    }
    if chains.iter().map(|c| c.len()).sum::<usize>() != size {
        return Err(Error::NotGraded("nilpotent is not homogeneous for the grading".into()));
    }
    Ok(chains)
}

/// The standard neutral and nil-positive elements of a Jordan chain basis,
/// written in the original coordinates.
pub(crate) struct ChainFrame {
    pub h: QMatrix,
    pub e: QMatrix,
}

pub(crate) fn chain_frame(chains: &[Vec<Vec<Rational>>]) -> ChainFrame {
    let size: usize = chains.iter().map(|c| c.len()).sum();
    let cols: Vec<&Vec<Rational>> = chains.iter().flatten().collect();
    let p = QMatrix::from_fn(size, size, |i, j| cols[j][i].clone());
    let p_inv = p.inverse().expect("Jordan chains form a basis");
    let lengths: Vec<usize> = chains.iter().map(|c| c.len()).collect();
    let mut h_std = QMatrix::zeros(size, size);
    let mut e_std = QMatrix::zeros(size, size);
    let mut start = 0;
    for &l in &lengths {
        for k in 0..l {
            h_std.set(start + k, start + k, q(l as i64 - 1 - 2 * k as i64));
            if k > 0 {
                e_std.set(start + k - 1, start + k, q((k * (l - k)) as i64));
            }
        }
        start += l;
    }
    let h = &(&p * &h_std) * &p_inv;
    let e = &(&p * &e_std) * &p_inv;
    ChainFrame { h, e }
}

/// Completes a nilpotent `f` to an sl2-triple `(f, h, e)` through its Jordan chains.
pub fn sl2_complete(f: &QMatrix) -> Result<Sl2Triple> {
    let chains = jordan_chains(f, None)?;
    let frame = chain_frame(&chains);
    Ok(Sl2Triple { f: f.clone(), h: frame.h, e: frame.e })
}

/// Triple `(f, h, e)` in which `e` is the given nil-positive element.
pub fn sl2_complete_positive(e: &QMatrix, grading: Option<&[Rational]>) -> Result<Sl2Triple> {
    let et = e.transpose();
    let chains = jordan_chains(&et, grading)?;
    let frame = chain_frame(&chains);
    Ok(Sl2Triple { f: frame.e.transpose(), h: frame.h.transpose(), e: e.clone() })
}

/// `{X : [h, X] = r X}`.
pub fn ad_eigenspace(h: &QMatrix, r: &Rational) -> QSubspace {
    let n = h.rows();
    let mut m = ad_matrix(h);
    for i in 0..n * n {
        let cur = m.get(i, i).clone();
        m.set(i, i, cur - r);
    }
    m.kernel()
}

/// Whether `h` is a neutral element for `f`: `[h, f] = -2f`, the map
/// `X -> [X, f]` sends `g^h_0` onto `g^h_{-2}`, and `h` lies in the image of
/// `ad(f)` (so a nil-positive partner exists).
pub fn is_neutral(h: &QMatrix, f: &QMatrix) -> bool {
    if h.rows() != f.rows() || !h.is_square() || !f.is_square() {
        return false;
    }
    if !has_weight(h, f, &q(-2)) {
        return false;
    }
    let n = h.rows();
    let g0 = ad_eigenspace(h, &q(0));
    let gm2 = ad_eigenspace(h, &q(-2));
    let image = QSubspace::span(n * n, g0.basis().iter().map(|b| to_vec(&bracket(&from_vec(n, b), f))));
    if image != gm2 {
        return false;
    }
    ad_matrix(f).column_space().contains(&to_vec(h))
}

/// `{Y : [x, Y] = 0}`.
pub fn centralizer(x: &QMatrix) -> QSubspace {
    ad_matrix(x).kernel()
}

/// Joint centralizer of several elements.
pub fn joint_centralizer(xs: &[&QMatrix]) -> QSubspace {
    let n = xs.first().map_or(0, |x| x.rows());
    let mut rows = Vec::new();
    for x in xs {
        rows.extend(ad_matrix(x).to_rows());
    }
    if rows.is_empty() {
        return QSubspace::full(n * n);
    }
    QMatrix::from_rows(rows).expect("equal widths").kernel()
}

/// Whether every vector of `a` brackets with every vector of `b` into `target`.
pub fn brackets_into(n: usize, a: &QSubspace, b: &QSubspace, target: &QSubspace) -> bool {
    a.basis().iter().all(|x| {
        let xm = from_vec(n, x);
        b.basis().iter().all(|y| target.contains(&to_vec(&bracket(&xm, &from_vec(n, y)))))
    })
}

pub fn is_nilpotent(x: &QMatrix) -> bool {
    x.is_square() && x.pow(x.rows() as u32).is_zero()
}

pub fn is_zero_element(v: &[Rational]) -> bool {
    is_zero_vec(v)
}
