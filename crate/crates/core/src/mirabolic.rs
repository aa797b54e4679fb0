//! The linear algebra behind the derivative chain for `gl_n`: the deformation
//! `S_t = h_eta + tZ` of the neutral grading of `J_eta`, where `Z` is
//! `-(eta_k + eta_{k-1})` on the last `eta_k` coordinates and zero elsewhere,
//! and the mirabolic stabilizer `a` of `e_{n - eta_k + 1}`.
//!
//! With this sign the maps `V_k -> V_i` out of the last block have positive
//! `Z`-weight, so they are the part of `u_t` that grows with `t`. The lemmas
//! need `e_{n - eta_k + 1}` to carry the top `h`-weight, which holds exactly
//! when the last part of `eta` is a largest part.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gln::{centralizer, coord, jordan_matrix, neutral_h_entries};
use crate::grading::weight_subspace;
use crate::partitions::Composition;
use crate::whittaker::{choose_m, critical_numbers, lr_at, uvw_at, Omega};
use crate::{q, qf, QMatrix, QSubspace, Rational};

/// `J_eta`, `h_eta`, `Z` and the stabilizer `a`.
#[derive(Clone, Debug, Serialize)]
pub struct MirabolicSetup {
    pub eta: Composition,
    pub f: QMatrix,
    #[serde(serialize_with = "crate::ser::rationals")]
    pub h: Vec<Rational>,
    #[serde(rename = "Z", serialize_with = "crate::ser::rationals")]
    pub z: Vec<Rational>,
    /// 1-based index of the vector fixed by `a`.
    pub column: usize,
    pub a: QSubspace,
}

impl MirabolicSetup {
    pub fn new(eta: &Composition) -> Result<Self> {
        let k = eta.len();
        if k < 2 {
            return Err(Error::CompositionTooShort);
        }
        let n = eta.total();
        let last = eta.parts()[k - 1];
        let prev = eta.parts()[k - 2];
        let z = (0..n).map(|i| if i >= n - last { q(-((last + prev) as i64)) } else { q(0) }).collect();
        let column = n - last + 1;
        // X e_c = 0 means the c-th column of X vanishes
        let a = QSubspace::coordinate(
            n * n,
            (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).filter(|&(_, j)| j != column).map(|(i, j)| coord(n, i, j)),
        );
        Ok(MirabolicSetup {
            eta: eta.clone(),
            f: jordan_matrix(eta),
            h: neutral_h_entries(eta),
            z,
            column,
            a,
        })
    }

    pub fn n(&self) -> usize {
        self.eta.total()
    }
}

/// Checks at one value of `t`.
#[derive(Clone, Debug, Serialize)]
pub struct MirabolicStage {
    #[serde(skip)]
    pub t: Rational,
    pub critical: bool,
    pub l_prime: QSubspace,
    pub r_prime: QSubspace,
    pub checks: BTreeMap<String, bool>,
}

/// Per-stage results of [`verify_suite`], plus checks that do not depend on `t`.
#[derive(Clone, Debug, Serialize)]
pub struct MirabolicReport {
    pub setup: MirabolicSetup,
    #[serde(serialize_with = "crate::ser::rationals")]
    pub critical: Vec<Rational>,
    #[serde(serialize_with = "stages_by_t")]
    pub stages: Vec<MirabolicStage>,
    pub checks: BTreeMap<String, bool>,
}

fn stages_by_t<S: Serializer>(stages: &[MirabolicStage], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(stages.len()))?;
    for st in stages {
        map.serialize_entry(&st.t.to_string(), st)?;
    }
    map.end()
}

impl MirabolicReport {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|&b| b) && self.stages.iter().all(|s| s.checks.values().all(|&b| b))
    }

    /// Names of the failing checks, prefixed by their stage.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.checks.iter().filter(|(_, &b)| !b).map(|(k, _)| k.clone()).collect();
        for st in &self.stages {
            out.extend(st.checks.iter().filter(|(_, &b)| !b).map(|(k, _)| format!("t={}: {k}", st.t)));
        }
        out
    }
}

fn is_direct_sum(whole: &QSubspace, a: &QSubspace, b: &QSubspace) -> bool {
    let meet = a.intersect(b).expect("same ambient");
    let sum = a.sum(b).expect("same ambient");
    meet.is_zero() && &sum == whole
}

fn closed_under_bracket(n: usize, x: &QSubspace, y: &QSubspace, target: &QSubspace) -> bool {
    crate::gln::brackets_into(n, x, y, target)
}

/// `0`, every critical number, the midpoints between them, and `1`.
fn sample_points(critical: &[Rational]) -> Vec<(Rational, bool)> {
    let mut marks = vec![q(0)];
    marks.extend(critical.iter().cloned());
    marks.push(q(1));
    let mut out = Vec::new();
    for (i, t) in marks.iter().enumerate() {
        out.push((t.clone(), i > 0 && i + 1 < marks.len()));
        if let Some(next) = marks.get(i + 1) {
            out.push(((t + next) * qf(1, 2), false));
        }
    }
    out
}

/// `Hom(V_b, V_c) = L^0 + L^f` for every pair of `sl2`-blocks with
/// `dim V_b >= dim V_c`: the maps killing the highest vector of `V_b` and
/// the maps commuting with `f`.
pub fn rep_decomposition_holds(eta: &Composition) -> bool {
    let n = eta.total();
    let f = jordan_matrix(eta);
    let g_f = centralizer(&f);
    let starts: Vec<usize> = eta.parts().iter().scan(0, |acc, &p| {
        let s = *acc;
        *acc += p;
        Some(s)
    }).collect();
    let blocks: Vec<(usize, usize)> = starts.iter().copied().zip(eta.parts().iter().copied()).collect();
    blocks.iter().all(|&(sb, db)| {
        blocks.iter().filter(|&&(_, dc)| db >= dc).all(|&(sc, dc)| {
            // rows in V_c, columns in V_b
            let cells: Vec<(usize, usize)> =
                (sc..sc + dc).flat_map(|i| (sb..sb + db).map(move |j| (i, j))).collect();
            let hom = QSubspace::coordinate(n * n, cells.iter().map(|&(i, j)| coord(n, i + 1, j + 1)));
            let l0 = QSubspace::coordinate(
                n * n,
                cells.iter().filter(|&&(_, j)| j != sb).map(|&(i, j)| coord(n, i + 1, j + 1)),
            );
            // lowest weight vectors of Hom(V_b, V_c) under ad(f)
            let lf = hom.intersect(&g_f).expect("same ambient");
            is_direct_sum(&hom, &l0, &lf)
        })
    })
}

/// Checks the containment, decomposition, radical and continuity lemmas at
/// every critical number, at a point inside every regular interval, and at the ends.
pub fn verify_suite(eta: &Composition) -> Result<MirabolicReport> {
    let setup = MirabolicSetup::new(eta)?;
    let n = setup.n();
    let (h, z, f, a) = (&setup.h, &setup.z, &setup.f, &setup.a);
    let omega = Omega::new(f);
    let g_f = centralizer(f);
    let critical = critical_numbers(h, z);
    let m = choose_m(h, z, f);

    let mut checks = BTreeMap::new();
    let u0 = weight_subspace(h, |w| *w >= q(1));
    checks.insert("u0_in_a".to_string(), u0.is_subspace_of(a));
    checks.insert("rep_decomposition".to_string(), rep_decomposition_holds(eta));

    let mut stages: Vec<MirabolicStage> = Vec::new();
    for (t, is_critical) in sample_points(&critical) {
        let (u, _, _) = uvw_at(h, z, &t);
        let st = lr_at(h, z, f, &m, &t, None);
        let l_prime = st.l.intersect(a).expect("same ambient");
        let r_prime = st.r.intersect(a).expect("same ambient");
        let mut c = BTreeMap::new();
        let u_a = u.intersect(a).expect("same ambient");
        let u_f = u.intersect(&g_f).expect("same ambient");
        c.insert("u_decomposition".to_string(), is_direct_sum(&u, &u_a, &u_f));
        let both = l_prime.sum(&r_prime).expect("same ambient");
        let meet = l_prime.intersect(&r_prime).expect("same ambient");
        c.insert("radical".to_string(), omega.radical_in(&both) == meet);
        c.insert(
            "subalgebras".to_string(),
            closed_under_bracket(n, &l_prime, &l_prime, &l_prime)
                && closed_under_bracket(n, &r_prime, &r_prime, &r_prime)
                && closed_under_bracket(n, &l_prime, &r_prime, &meet),
        );
        if let Some(prev) = stages.last() {
            c.insert("r_prime_prev_equals_l_prime".to_string(), prev.r_prime == l_prime);
        }
        if t == q(0) {
            c.insert("l_equals_l_prime".to_string(), st.l == l_prime);
        }
        stages.push(MirabolicStage { t, critical: is_critical, l_prime, r_prime, checks: c });
    }
    Ok(MirabolicReport { setup, critical, stages, checks })
}

/// `r'_1` split into its part inside the corner `gl_{n - eta_k}` and its
/// part in the last `eta_k` columns.
#[derive(Clone, Debug, Serialize)]
pub struct FinalStage {
    pub r_prime: QSubspace,
    pub corner: QSubspace,
    pub strip: QSubspace,
    /// `r'_1` is the direct sum of the two parts.
    pub split: bool,
    /// The corner part has the shape of `l_0` for `eta^-`: it sits between
    /// `g^{h-}_{>= 2}` and `g^{h-}_{>= 1}` and has the same dimension.
    pub corner_matches_recursion: bool,
}

impl FinalStage {
    pub fn all_pass(&self) -> bool {
        self.split && self.corner_matches_recursion
    }
}

fn embed_corner(x: &QSubspace, inner: usize, n: usize) -> QSubspace {
    QSubspace::span(
        n * n,
        x.basis().iter().map(|b| {
            let mut v = vec![q(0); n * n];
            for i in 0..inner {
                for j in 0..inner {
                    v[i * n + j] = b[i * inner + j].clone();
                }
            }
            v
        }),
    )
}

pub fn final_stage_shape(eta: &Composition) -> Result<FinalStage> {
    let setup = MirabolicSetup::new(eta)?;
    let n = setup.n();
    let last = eta.parts()[eta.len() - 1];
    let inner = n - last;
    let m = choose_m(&setup.h, &setup.z, &setup.f);
    let st = lr_at(&setup.h, &setup.z, &setup.f, &m, &q(1), None);
    let r_prime = st.r.intersect(&setup.a).expect("same ambient");
    let cells = |keep: &dyn Fn(usize, usize) -> bool| {
        QSubspace::coordinate(
            n * n,
            (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).filter(|&(i, j)| keep(i, j)).map(|(i, j)| coord(n, i, j)),
        )
    };
    let corner = r_prime.intersect(&cells(&|i, j| i <= inner && j <= inner)).expect("same ambient");
    let strip = r_prime.intersect(&cells(&|_, j| j > inner)).expect("same ambient");
    let split = is_direct_sum(&r_prime, &corner, &strip);

    let minus = Composition::new(eta.parts()[..eta.len() - 1].to_vec()).expect("positive parts");
    let h_minus = neutral_h_entries(&minus);
    let f_minus = jordan_matrix(&minus);
    let zero = vec![q(0); inner];
    let m_minus = choose_m(&h_minus, &zero, &f_minus);
    let l0 = lr_at(&h_minus, &zero, &f_minus, &m_minus, &q(0), None).l;
    let above2 = embed_corner(&weight_subspace(&h_minus, |w| *w >= q(2)), inner, n);
    let above1 = embed_corner(&weight_subspace(&h_minus, |w| *w >= q(1)), inner, n);
    let corner_matches_recursion =
        above2.is_subspace_of(&corner) && corner.is_subspace_of(&above1) && corner.dim() == l0.dim();
    Ok(FinalStage { r_prime, corner, strip, split, corner_matches_recursion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::compositions;

    fn c(v: &[usize]) -> Composition {
        Composition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn setup_examples() {
        let s = MirabolicSetup::new(&c(&[1, 2])).unwrap();
        assert_eq!(s.z, vec![q(0), q(-3), q(-3)]);
        assert_eq!(s.h, vec![q(0), q(1), q(-1)]);
        assert_eq!(s.column, 2);
        assert_eq!(s.a.dim(), 6);
        let s = MirabolicSetup::new(&c(&[2, 2])).unwrap();
        assert_eq!(s.z, vec![q(0), q(0), q(-4), q(-4)]);
        assert!(matches!(MirabolicSetup::new(&c(&[3])), Err(Error::CompositionTooShort)));
    }

    #[test]
    fn suite_examples() {
        for eta in [c(&[1, 2]), c(&[2, 2]), c(&[1, 1])] {
            let rep = verify_suite(&eta).unwrap();
            assert!(rep.all_pass(), "{eta:?}: {:?}", rep.failures());
        }
        assert!(matches!(verify_suite(&c(&[4])), Err(Error::CompositionTooShort)));
    }

    #[test]
    fn positive_z_breaks_the_decomposition() {
        // E31 has weight 3t - 1 for S_t = diag(0, 1 + 3t, -1 + 3t), lies in a and commutes with f
        let mut setup = MirabolicSetup::new(&c(&[1, 2])).unwrap();
        setup.z = vec![q(0), q(3), q(3)];
        let (u, _, _) = uvw_at(&setup.h, &setup.z, &q(1));
        let e31 = crate::gln::to_vec(&crate::gln::elementary(3, 3, 1));
        assert!(u.contains(&e31));
        assert!(setup.a.contains(&e31));
        assert!(centralizer(&setup.f).contains(&e31));
    }

    fn pinned(n: usize, cells: &[(usize, usize)]) -> QSubspace {
        QSubspace::coordinate(n * n, cells.iter().map(|&(i, j)| coord(n, i, j)))
    }

    #[test]
    fn final_stage_examples() {
        let fs = final_stage_shape(&c(&[1, 2])).unwrap();
        assert_eq!(fs.r_prime, pinned(3, &[(1, 3), (2, 3)]));
        assert!(fs.corner.is_zero());
        assert!(fs.all_pass());

        let fs = final_stage_shape(&c(&[1, 1])).unwrap();
        // u_1 = span{E12}, which moves e_2
        assert!(fs.r_prime.is_zero());
        assert!(fs.all_pass());

        let fs = final_stage_shape(&c(&[2, 2])).unwrap();
        assert_eq!(fs.corner, pinned(4, &[(1, 2)]));
        assert_eq!(fs.strip, pinned(4, &[(1, 4), (2, 4), (3, 4)]));
        assert!(fs.all_pass());
    }

    #[test]
    fn suite_passes_exactly_when_last_part_is_largest() {
        for n in 2..=5 {
            for eta in compositions(n).into_iter().filter(|e| e.len() >= 2) {
                let last = *eta.parts().last().unwrap();
                let largest = last == *eta.parts().iter().max().unwrap();
                let rep = verify_suite(&eta).unwrap();
                assert_eq!(rep.all_pass(), largest, "{eta:?}: {:?}", rep.failures());
                if !largest {
                    assert!(!rep.checks["u0_in_a"], "{eta:?}");
                }
                assert!(final_stage_shape(&eta).unwrap().split, "{eta:?}");
                assert!(rep_decomposition_holds(&eta));
            }
        }
    }
}
