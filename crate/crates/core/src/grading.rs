//! Weight decompositions of `gl_n` under diagonal elements, the Deligne
//! filtration of a nilpotent element, its refinement by a commuting diagonal
//! element, and the Heisenberg quotient attached to a nilpotent.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::dot;
use crate::gln::{
    ad_matrix, bracket, brackets_into, diag_entries, from_vec, is_nilpotent, sl2_complete_positive, to_vec,
    trace_form,
};
use crate::{q, QMatrix, QSubspace, Rational};

/// Span of the `E_ij` whose weight `s_i - s_j` satisfies `keep`; the diagonal
/// (weight 0) is included when `keep(0)` holds.
pub fn weight_subspace(s: &[Rational], keep: impl Fn(&Rational) -> bool) -> QSubspace {
    let n = s.len();
    let mut idx = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if keep(&(&s[i] - &s[j])) {
                idx.push(i * n + j);
            }
        }
    }
    QSubspace::coordinate(n * n, idx)
}

/// Span of the `E_ij` whose weights under two diagonal elements jointly satisfy `keep`.
pub fn joint_weight_subspace(
    s: &[Rational],
    z: &[Rational],
    keep: impl Fn(&Rational, &Rational) -> bool,
) -> QSubspace {
    let n = s.len();
    let mut idx = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if keep(&(&s[i] - &s[j]), &(&z[i] - &z[j])) {
                idx.push(i * n + j);
            }
        }
    }
    QSubspace::coordinate(n * n, idx)
}

/// Eigenspace decomposition of `ad(S)` for diagonal `S`.
#[derive(Clone, Debug, Serialize)]
pub struct GradedDecomposition {
    #[serde(serialize_with = "crate::ser::rationals")]
    pub weights: Vec<Rational>,
    pub spaces: Vec<QSubspace>,
}

impl GradedDecomposition {
    pub fn new(s: &QMatrix) -> Result<Self> {
        let d = diag_entries(s)?;
        let mut weights: Vec<Rational> = Vec::new();
        for a in &d {
            for b in &d {
                weights.push(a - b);
            }
        }
        weights.sort();
        weights.dedup();
        let spaces = weights.iter().map(|w| weight_subspace(&d, |x| x == w)).collect();
        Ok(GradedDecomposition { weights, spaces })
    }

    pub fn space(&self, w: &Rational) -> Option<&QSubspace> {
        self.weights.iter().position(|x| x == w).map(|i| &self.spaces[i])
    }
}

/// `g^S_{>= r}` for diagonal `S`.
pub fn weight_filtration(s: &QMatrix, r: &Rational) -> Result<QSubspace> {
    let d = diag_entries(s)?;
    Ok(weight_subspace(&d, |w| w >= r))
}

/// `g^S_{> r}` for diagonal `S`.
pub fn weight_filtration_strict(s: &QMatrix, r: &Rational) -> Result<QSubspace> {
    let d = diag_entries(s)?;
    Ok(weight_subspace(&d, |w| w > r))
}

/// `g^S_r` for diagonal `S`.
pub fn weight_space(s: &QMatrix, r: &Rational) -> Result<QSubspace> {
    let d = diag_entries(s)?;
    Ok(weight_subspace(&d, |w| w == r))
}

/// Kernels and images of the powers of `ad(e)` for a nilpotent `e`, from
/// which every step of the Deligne filtration is assembled.
#[derive(Clone, Debug)]
pub struct Deligne {
    n: usize,
    /// `ker ad(e)^i` for `i = 0..=depth`
    kernels: Vec<QSubspace>,
    /// `im ad(e)^j` for `j = 0..=depth`
    images: Vec<QSubspace>,
}

impl Deligne {
    pub fn new(e: &QMatrix) -> Result<Self> {
        if !e.is_square() {
            return Err(Error::DimensionMismatch("non-square element".into()));
        }
        if !is_nilpotent(e) {
            return Err(Error::NotNilpotent);
        }
        let n = e.rows();
        let ad = ad_matrix(e);
        let mut kernels = Vec::new();
        let mut images = Vec::new();
        let mut p = QMatrix::identity(n * n);
        loop {
            kernels.push(p.kernel());
            images.push(p.column_space());
            if p.is_zero() {
                break;
            }
            p = &p * &ad;
        }
        Ok(Deligne { n, kernels, images })
    }

    fn depth(&self) -> usize {
        self.kernels.len() - 1
    }

    fn ker(&self, i: usize) -> &QSubspace {
        &self.kernels[i.min(self.depth())]
    }

    fn im(&self, j: usize) -> Option<&QSubspace> {
        self.images.get(j).filter(|s| !s.is_zero())
    }

    /// `g_{>= k} = sum_{i >= max(1-k, 1)} ker ad(e)^i  cap  im ad(e)^{i+k-1}`.
    pub fn step(&self, k: i64) -> QSubspace {
        let bound = 2 * self.n as i64;
        let k = k.clamp(-bound, bound);
        let mut acc = QSubspace::zero(self.n * self.n);
        let start = (1 - k).max(1);
        let mut i = start;
        while i + k - 1 < self.images.len() as i64 {
            let j = (i + k - 1) as usize;
            if let Some(im) = self.im(j) {
                let piece = self.ker(i as usize).intersect(im).expect("same ambient");
                acc = acc.sum(&piece).expect("same ambient");
            }
            i += 1;
        }
        acc
    }
}

/// The Deligne filtration step `g_{>= k}` of a nilpotent `e`.
pub fn deligne_filtration(e: &QMatrix, k: i64) -> Result<QSubspace> {
    Ok(Deligne::new(e)?.step(k))
}

fn ez_filtration(
    deligne: &Deligne,
    z: &[Rational],
    t: &Rational,
    strict: bool,
) -> QSubspace {
    let n = z.len();
    let bound = 2 * n as i64;
    let mut acc = QSubspace::zero(n * n);
    for i in -bound..=bound {
        let threshold = t - q(i);
        let zpart = if strict {
            weight_subspace(z, |w| *w > threshold)
        } else {
            weight_subspace(z, |w| *w >= threshold)
        };
        if zpart.is_zero() {
            continue;
        }
        let piece = deligne.step(i).intersect(&zpart).expect("same ambient");
        acc = acc.sum(&piece).expect("same ambient");
    }
    acc
}

fn check_ez(e: &QMatrix, z: &QMatrix) -> Result<Vec<Rational>> {
    let zd = diag_entries(z)?;
    if zd.len() != e.rows() {
        return Err(Error::DimensionMismatch("Z and e have different sizes".into()));
    }
    if !bracket(z, e).is_zero() {
        return Err(Error::NonCommuting("[Z, e] != 0".into()));
    }
    Ok(zd)
}

/// `g^{e,Z}_{>= t} = sum_i g_{>= i} cap g^Z_{>= t-i}`.
pub fn deligne_ez_filtration(e: &QMatrix, z: &QMatrix, t: &Rational) -> Result<QSubspace> {
    let d = Deligne::new(e)?;
    let zd = check_ez(e, z)?;
    Ok(ez_filtration(&d, &zd, t, false))
}

/// `g^{e,Z}_{> t} = sum_i g_{>= i} cap g^Z_{> t-i}`.
pub fn deligne_ez_filtration_strict(e: &QMatrix, z: &QMatrix, t: &Rational) -> Result<QSubspace> {
    let d = Deligne::new(e)?;
    let zd = check_ez(e, z)?;
    Ok(ez_filtration(&d, &zd, t, true))
}

/// Gram matrix of `(a, b) -> tr(c [a, b])` on the given vectors.
pub fn bracket_gram(n: usize, c: &QMatrix, vectors: &[Vec<Rational>]) -> QMatrix {
    // tr(c[a,b]) = tr([c,a] b)
    let left: Vec<QMatrix> = vectors.iter().map(|a| bracket(c, &from_vec(n, a)).transpose()).collect();
    let k = vectors.len();
    QMatrix::from_fn(k, k, |i, j| dot(left[i].as_flat(), &vectors[j]))
}

/// Data for the refinement by a commuting diagonal `Z`.
#[derive(Clone, Debug, Serialize)]
pub struct HeisenbergZData {
    pub z: QMatrix,
    pub j: QSubspace,
    pub j_is_ideal: bool,
    pub dim_u_mod_j: usize,
    pub gram_rank_u_mod_j: usize,
    /// The same data for `e` inside the centralizer `g_Z`.
    pub u_z: QSubspace,
    pub v_z: QSubspace,
    pub i_z: QSubspace,
    pub dim_uz_mod_iz: usize,
    pub gram_rank_uz_mod_vz: usize,
    pub matches_centralizer: bool,
}

/// The Heisenberg quotient `u / I` attached to a nonzero nilpotent `e`.
#[derive(Clone, Debug, Serialize)]
pub struct HeisenbergData {
    pub u: QSubspace,
    pub v: QSubspace,
    #[serde(rename = "I")]
    pub i: QSubspace,
    /// `e` reduced modulo `I`.
    #[serde(serialize_with = "crate::ser::rationals")]
    pub center_class: Vec<Rational>,
    /// Basis of a complement of `v` in `u` on which the Gram matrix is taken.
    pub complement: Vec<Vec<String>>,
    pub omega_gram: QMatrix,
    pub checks: BTreeMap<String, bool>,
    pub with_z: Option<HeisenbergZData>,
}

impl HeisenbergData {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.values().all(|&b| b)
            && self.with_z.as_ref().is_none_or(|z| z.matches_centralizer)
    }
}

fn perp(n: usize, x: &QMatrix) -> QSubspace {
    // {y : tr(x y) = 0}; tr(xy) = sum x_ij y_ji
    let row: Vec<Rational> = (0..n * n).map(|k| x.get(k % n, k / n).clone()).collect();
    QSubspace::span(n * n, [row]).annihilator()
}

fn complement_gram(n: usize, c: &QMatrix, big: &QSubspace, small: &QSubspace) -> (Vec<Vec<Rational>>, QMatrix) {
    let comp = big.complement_basis(small);
    let gram = bracket_gram(n, c, &comp);
    (comp, gram)
}

/// `u = g_{>= 1}`, `v = g_{> 1}`, `I = ad(e)^2(e^perp) cap v`, with the form
/// `omega(a, b) = tr(c [a, b])` for `c = f / tr(f e)`. With `Z`, also
/// computes `J = I + ad(e + Z)(u)` for the `(e, Z)`-filtration and compares
/// `u / J` with the Heisenberg data of `e` inside `g_Z`.
pub fn heisenberg_data(e: &QMatrix, z: Option<&QMatrix>) -> Result<HeisenbergData> {
    if !e.is_square() {
        return Err(Error::DimensionMismatch("non-square element".into()));
    }
    if !is_nilpotent(e) {
        return Err(Error::NotNilpotent);
    }
    if e.is_zero() {
        return Err(Error::ZeroElement);
    }
    let n = e.rows();
    let deligne = Deligne::new(e)?;
    let zd = match z {
        Some(z) => Some(check_ez(e, z)?),
        None => None,
    };
    let triple = sl2_complete_positive(e, zd.as_deref())?;
    let c = triple.f.scale(&(q(1) / trace_form(&triple.f, e)));
    let ad_e = ad_matrix(e);
    let e_perp = perp(n, e);

    let u = deligne.step(1);
    let v = deligne.step(2);
    let ad_e2 = &ad_e * &ad_e;
    let i_space = e_perp.image(&ad_e2).intersect(&v)?;
    let ev = to_vec(e);

    let mut checks = BTreeMap::new();
    checks.insert("I_in_v".to_string(), i_space.is_subspace_of(&v));
    checks.insert("I_ideal_in_u".to_string(), brackets_into(n, &u, &i_space, &i_space));
    checks.insert("dim_v_mod_I_is_1".to_string(), v.dim() == i_space.dim() + 1);
    checks.insert("e_not_in_I".to_string(), !i_space.contains(&ev));
    let (comp, gram) = complement_gram(n, &c, &u, &v);
    checks.insert("omega_nondegenerate".to_string(), gram.rank() == comp.len());
    checks.insert("omega_antisymmetric".to_string(), gram == -&gram.transpose());
    let heis = u.basis().iter().all(|a| {
        let am = from_vec(n, a);
        u.basis().iter().all(|b| {
            let br = bracket(&am, &from_vec(n, b));
            let w = trace_form(&c, &br);
            let rest = &br - &e.scale(&w);
            i_space.contains(&to_vec(&rest))
        })
    });
    checks.insert("heisenberg_relation".to_string(), heis);
    let center = i_space.reduce(&ev);

    let with_z = match (z, zd) {
        (Some(zm), Some(zd)) => {
            let uz_full = ez_filtration(&deligne, &zd, &q(1), false);
            let vz_full = ez_filtration(&deligne, &zd, &q(1), true);
            let x = e + zm;
            let ad_x = ad_matrix(&x);
            let ix = e_perp.image(&(&ad_x * &ad_x)).intersect(&vz_full)?;
            let j = ix.sum(&uz_full.image(&ad_x))?;
            let j_is_ideal = brackets_into(n, &uz_full, &j, &j) && j.is_subspace_of(&uz_full);
            let c_gz = crate::gln::centralizer(zm);
            let u_z = u.intersect(&c_gz)?;
            let v_z = v.intersect(&c_gz)?;
            let i_z = e_perp.intersect(&c_gz)?.image(&ad_e2).intersect(&v_z)?;
            let (_, gram_j) = complement_gram(n, &c, &uz_full, &j);
            let (_, gram_z) = complement_gram(n, &c, &u_z, &v_z);
            let dim_u_mod_j = uz_full.dim() - j.dim();
            let dim_uz_mod_iz = u_z.dim() - i_z.dim();
            let gram_rank_u_mod_j = gram_j.rank();
            let gram_rank_uz_mod_vz = gram_z.rank();
            Some(HeisenbergZData {
                z: zm.clone(),
                matches_centralizer: dim_u_mod_j == dim_uz_mod_iz && gram_rank_u_mod_j == gram_rank_uz_mod_vz,
                j,
                j_is_ideal,
                dim_u_mod_j,
                gram_rank_u_mod_j,
                u_z,
                v_z,
                i_z,
                dim_uz_mod_iz,
                gram_rank_uz_mod_vz,
            })
        }
        _ => None,
    };

    Ok(HeisenbergData {
        complement: comp.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect(),
        u,
        v,
        i: i_space,
        center_class: center,
        omega_gram: gram,
        checks,
        with_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gln::{coord, elementary, jordan_matrix, neutral_h, sl2_complete};
    use crate::partitions::{partitions, Composition};
    use crate::qf;
    use num_traits::Zero;

    fn diag(v: &[i64]) -> QMatrix {
        QMatrix::diag(&v.iter().map(|&x| q(x)).collect::<Vec<_>>())
    }

    fn span_e(n: usize, pairs: &[(usize, usize)]) -> QSubspace {
        QSubspace::coordinate(n * n, pairs.iter().map(|&(i, j)| coord(n, i, j)))
    }

    #[test]
    fn weight_filtration_examples() {
        let s = diag(&[1, -1, 1, -1]);
        assert_eq!(weight_filtration(&s, &q(1)).unwrap(), span_e(4, &[(1, 2), (1, 4), (3, 2), (3, 4)]));
        assert_eq!(weight_filtration(&s, &q(-100)).unwrap(), QSubspace::full(16));
        assert_eq!(weight_filtration(&diag(&[3, 1, -1, -3]), &q(2)).unwrap().dim(), 6);
    }

    #[test]
    fn graded_decomposition_exhausts() {
        let s = QMatrix::diag(&[qf(1, 2), q(0), qf(-3, 2)]);
        let g = GradedDecomposition::new(&s).unwrap();
        let total: usize = g.spaces.iter().map(|s| s.dim()).sum();
        assert_eq!(total, 9);
        assert_eq!(g.space(&q(0)).unwrap().dim(), 3);
    }

    #[test]
    fn deligne_examples() {
        let e = elementary(2, 1, 2);
        assert_eq!(deligne_filtration(&e, 2).unwrap(), span_e(2, &[(1, 2)]));
        assert_eq!(deligne_filtration(&e, -4).unwrap(), QSubspace::full(4));
        let e3 = &elementary(3, 1, 2) + &elementary(3, 2, 3);
        assert_eq!(deligne_filtration(&e3, 1).unwrap(), weight_filtration(&diag(&[2, 0, -2]), &q(1)).unwrap());
        assert_eq!(deligne_filtration(&QMatrix::identity(2), 1), Err(Error::NotNilpotent));
    }

    #[test]
    fn ez_filtration_examples() {
        let e = &elementary(4, 1, 2) + &elementary(4, 3, 4);
        let z = diag(&[-1, -1, 1, 1]);
        let lhs = deligne_ez_filtration(&e, &z, &q(1)).unwrap();
        let h = diag(&[1, -1, 1, -1]);
        assert_eq!(lhs, weight_filtration(&(&h + &z), &q(1)).unwrap());

        let zero = QMatrix::zeros(2, 2);
        assert_eq!(deligne_ez_filtration(&zero, &diag(&[1, 0]), &q(1)).unwrap(), span_e(2, &[(1, 2)]));

        let e = elementary(3, 1, 2);
        for k in -3..=3 {
            assert_eq!(
                deligne_ez_filtration(&e, &QMatrix::zeros(3, 3), &qf(2 * k + 1, 2)).unwrap(),
                deligne_filtration(&e, k + 1).unwrap()
            );
        }
        assert!(matches!(
            deligne_ez_filtration(&elementary(2, 1, 2), &diag(&[1, 0]), &q(1)),
            Err(Error::NonCommuting(_))
        ));
    }

    #[test]
    fn deligne_matches_grading_and_is_multiplicative() {
        for n in 1..=4 {
            for lam in partitions(n) {
                let eta = lam.as_composition();
                let t = sl2_complete(&jordan_matrix(&eta)).unwrap();
                let d = Deligne::new(&t.e).unwrap();
                let ad = ad_matrix(&t.e);
                let steps: Vec<QSubspace> = (-2 * n as i64..=2 * n as i64).map(|k| d.step(k)).collect();
                let bound = 2 * n as i64;
                let at = |k: i64| &steps[(k.clamp(-bound, bound) + bound) as usize];
                for k in -2 * n as i64..=2 * n as i64 {
                    assert_eq!(at(k), &weight_filtration(&neutral_h(&eta), &q(k)).unwrap());
                    if k + 2 <= 2 * n as i64 {
                        assert!(at(k).image(&ad).is_subspace_of(at(k + 2)));
                    }
                }
                for j in -3..=3i64 {
                    for k in -3..=3i64 {
                        let target = d.step(j + k);
                        assert!(brackets_into(n, at(j), at(k), &target));
                    }
                }
            }
        }
    }

    #[test]
    fn heisenberg_examples() {
        let d = heisenberg_data(&elementary(3, 1, 2), None).unwrap();
        assert_eq!(d.u.dim(), 3);
        assert_eq!(d.v.dim(), 1);
        assert!(d.i.is_zero());
        assert!(d.all_checks_pass());

        let d = heisenberg_data(&elementary(2, 1, 2), None).unwrap();
        assert_eq!(d.u, span_e(2, &[(1, 2)]));
        assert_eq!(d.v, d.u);
        assert!(d.i.is_zero());

        for n in 2..=5 {
            let e = jordan_matrix(&Composition::new(vec![n]).unwrap()).transpose();
            let d = heisenberg_data(&e, None).unwrap();
            assert_eq!(d.u, d.v);
            assert_eq!(d.u.dim() - d.i.dim(), 1);
            assert!(d.all_checks_pass());
        }
        assert_eq!(heisenberg_data(&QMatrix::zeros(3, 3), None).unwrap_err(), Error::ZeroElement);
    }

    fn d_u(e: &QMatrix, z: &[Rational]) -> QSubspace {
        deligne_ez_filtration(e, &QMatrix::diag(z), &q(1)).unwrap()
    }

    // J contains every nonzero Z-weight piece of u, so it is an ideal exactly
    // when brackets of opposite nonzero pieces land in I, i.e. have no
    // component along e. That component is read off by pairing with f.
    fn opposite_weights_orthogonal(e: &QMatrix, z: &[Rational]) -> bool {
        let n = z.len();
        let u = d_u(e, z);
        let f = sl2_complete_positive(e, Some(z)).unwrap().f;
        let mut weights: Vec<Rational> = z.iter().flat_map(|a| z.iter().map(move |b| a - b)).collect();
        weights.sort();
        weights.dedup();
        let mut pieces: Vec<(Rational, Vec<Rational>)> = Vec::new();
        for w in weights.into_iter().filter(|w| !w.is_zero()) {
            let sub = u.intersect(&weight_subspace(z, |a| *a == w)).unwrap();
            pieces.extend(sub.basis().iter().map(|b| (w.clone(), b.clone())));
        }
        pieces.iter().all(|(wa, a)| {
            pieces.iter().filter(|(wb, _)| (wa + wb).is_zero()).all(|(_, b)| {
                trace_form(&f, &bracket(&from_vec(n, a), &from_vec(n, b))).is_zero()
            })
        })
    }

    #[test]
    fn j_is_not_always_an_ideal() {
        // e of type (3,1), Z the indicator of the 3-block: E24 and E43 both
        // lie in J, but [E24, E43] = E23 pairs nontrivially with f.
        let e = jordan_matrix(&Composition::new(vec![3, 1]).unwrap()).transpose();
        let z = diag(&[1, 1, 1, 0]);
        let d = heisenberg_data(&e, Some(&z)).unwrap();
        let zd = d.with_z.unwrap();
        assert!(zd.j.contains(&to_vec(&elementary(4, 2, 4))));
        assert!(zd.j.contains(&to_vec(&elementary(4, 4, 3))));
        assert!(!zd.j.contains(&to_vec(&elementary(4, 2, 3))));
        assert!(!zd.j_is_ideal);
        assert!(zd.matches_centralizer);
    }

    #[test]
    fn heisenberg_with_z_matches_centralizer() {
        for n in 2..=4 {
            for lam in partitions(n) {
                if lam.len() == n {
                    continue;
                }
                let eta = lam.as_composition();
                let e = jordan_matrix(&eta).transpose();
                let mut start = 0;
                for &k in eta.parts() {
                    let z: Vec<Rational> =
                        (0..n).map(|i| if i >= start && i < start + k { q(1) } else { q(0) }).collect();
                    start += k;
                    let d = heisenberg_data(&e, Some(&QMatrix::diag(&z))).unwrap();
                    let zd = d.with_z.as_ref().unwrap();
                    assert!(zd.j.is_subspace_of(&d_u(&e, &z)), "{lam} {z:?}");
                    assert!(zd.matches_centralizer, "{lam} {z:?}: {zd:?}");
                    assert_eq!(zd.j_is_ideal, opposite_weights_orthogonal(&e, &z), "{lam} {z:?}");
                }
            }
        }
    }
}
