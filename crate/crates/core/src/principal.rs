//! PL nilpotents and principal Whittaker pairs in `gl_n`.
//!
//! The torus is the diagonal. A simple system is an ordering `w` of
//! `1..=n`, with simple roots `eps_{w(i)} - eps_{w(i+1)}`; its principal
//! element `S_w` puts `n + 1 - 2i` at coordinate `w(i)`.
//!
//! [`plroot_system`] first moves `f` to `J_eta` by a basis of `S`-homogeneous
//! Jordan chains, so `S` stays diagonal. It then perturbs the identity
//! ordering by `h_eps = Z + eps Z' + eps^2 h` until `S` is dominated.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gln::{is_neutral, jordan_chains, jordan_matrix};
use crate::partitions::Composition;
use crate::whittaker::{preorder_geq, WhittakerPair};
use crate::{q, QMatrix, Rational};

/// An ordering `w` of `1..=n` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleSystem {
    pub ordering: Vec<usize>,
}

impl SimpleSystem {
    pub fn new(ordering: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; ordering.len()];
        for &k in &ordering {
            if k == 0 || k > ordering.len() || seen[k - 1] {
                return Err(Error::NotCompatible(format!("{ordering:?} is not a permutation")));
            }
            seen[k - 1] = true;
        }
        Ok(SimpleSystem { ordering })
    }

    pub fn identity(n: usize) -> Self {
        SimpleSystem { ordering: (1..=n).collect() }
    }

    pub fn n(&self) -> usize {
        self.ordering.len()
    }

    /// Simple roots as pairs `(a, b)` meaning `eps_a - eps_b`, 1-based.
    pub fn simple_roots(&self) -> Vec<(usize, usize)> {
        self.ordering.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Diagonal entries of the principal element `S_w`.
    pub fn principal_entries(&self) -> Vec<Rational> {
        let n = self.n() as i64;
        let mut out = vec![q(0); self.n()];
        for (i, &k) in self.ordering.iter().enumerate() {
            out[k - 1] = q(n - 1 - 2 * i as i64);
        }
        out
    }
}

/// The simple system of a principal diagonal `S`, if `S` is principal.
pub fn is_principal(s: &QMatrix) -> Option<SimpleSystem> {
    if !s.is_square() || !s.is_diagonal() {
        return None;
    }
    let d = s.diagonal();
    let mut ordering: Vec<usize> = (1..=d.len()).collect();
    ordering.sort_by(|&a, &b| d[b - 1].cmp(&d[a - 1]));
    let two = q(2);
    if ordering.windows(2).all(|w| &d[w[0] - 1] - &d[w[1] - 1] == two) {
        Some(SimpleSystem { ordering })
    } else {
        None
    }
}

/// Indices `i` (1-based) of the simple roots in the support of `f`.
///
/// `f` must vanish outside the negative simple root spaces `E_{w(i+1), w(i)}`.
pub fn pl_support(f: &QMatrix, delta: &SimpleSystem) -> Result<Vec<usize>> {
    let n = delta.n();
    if f.rows() != n || f.cols() != n {
        return Err(Error::DimensionMismatch(format!("f is {}x{}, ordering has {n} entries", f.rows(), f.cols())));
    }
    let mut allowed = vec![vec![None; n]; n];
    for (i, (a, b)) in delta.simple_roots().into_iter().enumerate() {
        allowed[b - 1][a - 1] = Some(i + 1);
    }
    let mut support = Vec::new();
    for (r, row) in allowed.iter().enumerate() {
        for (c, slot) in row.iter().enumerate() {
            if f.get(r, c).is_zero() {
                continue;
            }
            match slot {
                Some(i) => support.push(*i),
                None => return Err(Error::NotCompatible(format!("f has an entry at ({}, {})", r + 1, c + 1))),
            }
        }
    }
    support.sort_unstable();
    Ok(support)
}

/// One root `eps_i - eps_j` checked for condition (d).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootDiagnostic {
    pub root: (usize, usize),
    #[serde(serialize_with = "crate::ser::rational")]
    pub alpha_h: Rational,
    #[serde(serialize_with = "crate::ser::rational")]
    pub alpha_s: Rational,
    pub positive: bool,
}

/// Output of [`plroot_system`], in the aligned basis.
#[derive(Clone, Debug, Serialize)]
pub struct PlRootSystem {
    /// Columns are the aligned basis vectors.
    pub basis: QMatrix,
    #[serde(rename = "S", serialize_with = "crate::ser::rationals")]
    pub s: Vec<Rational>,
    pub f: QMatrix,
    #[serde(serialize_with = "crate::ser::rationals")]
    pub h: Vec<Rational>,
    #[serde(rename = "Z", serialize_with = "crate::ser::rationals")]
    pub z: Vec<Rational>,
    #[serde(rename = "Z_prime", serialize_with = "crate::ser::rationals")]
    pub z_prime: Vec<Rational>,
    #[serde(serialize_with = "crate::ser::rational")]
    pub epsilon: Rational,
    #[serde(serialize_with = "crate::ser::rationals")]
    pub h_eps: Vec<Rational>,
    pub delta_prime: SimpleSystem,
    pub delta: SimpleSystem,
    pub positive_roots: Vec<(usize, usize)>,
    pub report: BTreeMap<String, bool>,
    pub condition_d: Vec<RootDiagnostic>,
}

impl PlRootSystem {
    pub fn all_pass(&self) -> bool {
        self.report.values().all(|&b| b)
    }
}

fn roots(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

fn alpha(x: &[Rational], (i, j): (usize, usize)) -> Rational {
    &x[i] - &x[j]
}

fn eps1_holds(z: &[Rational], zp: &[Rational], h: &[Rational], eps: &Rational) -> bool {
    roots(z.len()).all(|r| {
        let az = alpha(z, r);
        az <= q(0) || az > eps * alpha(zp, r).abs() + eps * eps * alpha(h, r).abs()
    })
}

fn eps2_holds(zp: &[Rational], h: &[Rational], eps: &Rational) -> bool {
    roots(zp.len()).all(|r| {
        let azp = alpha(zp, r);
        azp <= q(0) || azp > eps * alpha(h, r).abs()
    })
}

/// Aligned basis `P` (columns), `P^{-1} S P` and the chain lengths.
fn align(pair: &WhittakerPair) -> Result<(QMatrix, Vec<Rational>, Composition)> {
    let s = pair.s_entries();
    let chains = jordan_chains(&pair.f, Some(&s)).map_err(|err| match err {
        Error::NotNilpotent => Error::NotPL("f is not nilpotent".into()),
        other => other,
    })?;
    let cols: Vec<&Vec<Rational>> = chains.iter().flatten().collect();
    let n = pair.n();
    let p = QMatrix::from_fn(n, n, |i, j| cols[j][i].clone());
    let p_inv = p.inverse().expect("Jordan chains form a basis");
    let s_aligned = &(&p_inv * &pair.s) * &p;
    let eta = Composition::new(chains.iter().map(|c| c.len()).collect()).expect("nonempty chains");
    Ok((p, s_aligned.diagonal(), eta))
}

/// A simple system `Delta`, positive roots and neutral `h`, all in one
/// diagonal torus containing `S`, with `Delta` compatible with `f` and every
/// root with `alpha(h) <= 0 < alpha(S)` positive.
pub fn plroot_system(pair: &WhittakerPair) -> Result<PlRootSystem> {
    let n = pair.n();
    let (basis, s, eta) = align(pair)?;
    let f = jordan_matrix(&eta);
    let h = crate::gln::neutral_h_entries(&eta);
    let delta_prime = SimpleSystem::identity(n);
    let s_prime = delta_prime.principal_entries();
    let z: Vec<Rational> = s.iter().zip(&h).map(|(a, b)| a - b).collect();
    let z_prime: Vec<Rational> = s_prime.iter().zip(&h).map(|(a, b)| a - b).collect();

    let half = Rational::new(1.into(), 2.into());
    let mut epsilon = Rational::one();
    let mut tries = 0;
    while !(eps1_holds(&z, &z_prime, &h, &epsilon) && eps2_holds(&z_prime, &h, &epsilon)) {
        epsilon *= &half;
        tries += 1;
        if tries > 256 {
            return Err(Error::RegularityFailure("no admissible epsilon".into()));
        }
    }
    let h_eps: Vec<Rational> =
        (0..n).map(|i| &z[i] + &epsilon * &z_prime[i] + &epsilon * &epsilon * &h[i]).collect();
    if roots(n).any(|r| alpha(&h_eps, r).is_zero()) {
        return Err(Error::RegularityFailure("h_eps vanishes on a root".into()));
    }
    let mut ordering: Vec<usize> = (1..=n).collect();
    ordering.sort_by(|&a, &b| h_eps[b - 1].cmp(&h_eps[a - 1]));
    let delta = SimpleSystem { ordering };
    let positive_roots: Vec<(usize, usize)> =
        roots(n).filter(|&r| alpha(&h_eps, r) > q(0)).map(|(i, j)| (i + 1, j + 1)).collect();

    let condition_d: Vec<RootDiagnostic> = roots(n)
        .filter(|&r| alpha(&h, r) <= q(0) && alpha(&s, r) > q(0))
        .map(|r| RootDiagnostic {
            root: (r.0 + 1, r.1 + 1),
            alpha_h: alpha(&h, r),
            alpha_s: alpha(&s, r),
            positive: positive_roots.contains(&(r.0 + 1, r.1 + 1)),
        })
        .collect();

    let aligned_s = &(&basis.inverse().expect("basis") * &pair.s) * &basis;
    let mut report = BTreeMap::new();
    report.insert("a_compatible".to_string(), pl_support(&f, &delta).is_ok());
    report.insert("b_s_in_torus".to_string(), aligned_s.is_diagonal());
    report.insert("c_h_neutral".to_string(), is_neutral(&QMatrix::diag(&h), &f));
    report.insert("d_positive".to_string(), condition_d.iter().all(|d| d.positive));
    report.insert("eps1_strict".to_string(), eps1_holds(&z, &z_prime, &h, &epsilon));
    report.insert("eps2_strict".to_string(), eps2_holds(&z_prime, &h, &epsilon));
    report.insert("z_centralizes_f".to_string(), crate::gln::bracket(&QMatrix::diag(&z), &f).is_zero());

    Ok(PlRootSystem {
        basis,
        s,
        f,
        h,
        z,
        z_prime,
        epsilon,
        h_eps,
        delta_prime,
        delta,
        positive_roots,
        report,
        condition_d,
    })
}

/// A principal `S~ = S_Delta` with `S - h >=_phi S~ - h`.
#[derive(Clone, Debug, Serialize)]
pub struct PrincipalDominator {
    /// `S~` in the original coordinates.
    #[serde(rename = "S_tilde")]
    pub s_tilde: QMatrix,
    /// `S~` in the aligned basis of `system`.
    #[serde(rename = "S_tilde_aligned", serialize_with = "crate::ser::rationals")]
    pub s_tilde_aligned: Vec<Rational>,
    pub system: PlRootSystem,
    pub checks: BTreeMap<String, bool>,
}

impl PrincipalDominator {
    pub fn all_pass(&self) -> bool {
        self.system.all_pass() && self.checks.values().all(|&b| b)
    }
}

pub fn principal_dominator(pair: &WhittakerPair) -> Result<PrincipalDominator> {
    let system = plroot_system(pair)?;
    let st = system.delta.principal_entries();
    let diag = |v: &[Rational]| QMatrix::diag(v);
    let x: Vec<Rational> = system.s.iter().zip(&system.h).map(|(a, b)| a - b).collect();
    let y: Vec<Rational> = st.iter().zip(&system.h).map(|(a, b)| a - b).collect();
    let preorder = preorder_geq(&diag(&x), &diag(&y), &diag(&system.h), &system.f).unwrap_or(false);
    let mut checks = BTreeMap::new();
    checks.insert("preorder_geq".to_string(), preorder);
    checks.insert("principal".to_string(), is_principal(&diag(&st)).is_some());
    let p = &system.basis;
    let s_tilde = &(p * &diag(&st)) * &p.inverse().expect("basis");
    checks.insert("whittaker_pair".to_string(), WhittakerPair::new(diag(&st), system.f.clone()).is_ok());
    Ok(PrincipalDominator { s_tilde, s_tilde_aligned: st, system, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gln::elementary;
    use crate::partitions::partitions;

    fn d(v: &[i64]) -> QMatrix {
        QMatrix::diag(&v.iter().map(|&x| q(x)).collect::<Vec<_>>())
    }

    fn pair(s: &[i64], f: QMatrix) -> WhittakerPair {
        WhittakerPair::new(d(s), f).unwrap()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for k in 0..=p.len() {
                let mut v = p.clone();
                v.insert(k, n);
                out.push(v);
            }
        }
        out
    }

    /// Every principal `S_w` compatible with `f` and dominating `S - h`.
    fn dominating_principals(s: &[Rational], h: &[Rational], f: &QMatrix) -> Vec<Vec<Rational>> {
        let x: Vec<Rational> = s.iter().zip(h).map(|(a, b)| a - b).collect();
        permutations(s.len())
            .into_iter()
            .map(|w| SimpleSystem { ordering: w })
            .filter(|w| pl_support(f, w).is_ok())
            .map(|w| w.principal_entries())
            .filter(|st| {
                let y: Vec<Rational> = st.iter().zip(h).map(|(a, b)| a - b).collect();
                preorder_geq(&QMatrix::diag(&x), &QMatrix::diag(&y), &QMatrix::diag(h), f).unwrap()
            })
            .collect()
    }

    #[test]
    fn is_principal_examples() {
        assert_eq!(is_principal(&d(&[3, 1, -1, -3])), Some(SimpleSystem::identity(4)));
        assert_eq!(is_principal(&d(&[1, -1, 1, -1])), None);
        assert_eq!(is_principal(&d(&[-1, 1])).unwrap().ordering, vec![2, 1]);
        assert_eq!(is_principal(&d(&[2, 0, -3])), None);
    }

    #[test]
    fn pl_support_examples() {
        let f = &elementary(4, 2, 1) + &elementary(4, 4, 3);
        assert_eq!(pl_support(&f, &SimpleSystem::identity(4)).unwrap(), vec![1, 3]);
        let j = jordan_matrix(&Composition::new(vec![4]).unwrap());
        assert_eq!(pl_support(&j, &SimpleSystem::identity(4)).unwrap(), vec![1, 2, 3]);
        assert!(matches!(pl_support(&elementary(3, 3, 1), &SimpleSystem::identity(3)), Err(Error::NotCompatible(_))));
        assert!(SimpleSystem::new(vec![1, 1]).is_err());
    }

    #[test]
    fn plroot_examples() {
        let f = &elementary(4, 2, 1) + &elementary(4, 4, 3);
        for s in [[1, -1, 1, -1], [0, -2, 2, 0], [3, 1, -1, -3]] {
            let sys = plroot_system(&pair(&s, f.clone())).unwrap();
            assert!(sys.all_pass(), "{s:?}: {:?}", sys.report);
        }
        let j = jordan_matrix(&Composition::new(vec![4]).unwrap());
        let sys = plroot_system(&pair(&[3, 1, -1, -3], j)).unwrap();
        assert_eq!(sys.delta, SimpleSystem::identity(4));
        assert!(sys.z.iter().all(|x| x.is_zero()));
        assert!(sys.z_prime.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn dominator_examples() {
        let j = jordan_matrix(&Composition::new(vec![3]).unwrap());
        let dom = principal_dominator(&pair(&[2, 0, -2], j)).unwrap();
        assert_eq!(dom.s_tilde, d(&[2, 0, -2]));

        let f = &elementary(4, 2, 1) + &elementary(4, 4, 3);
        let dom = principal_dominator(&pair(&[3, 1, -1, -3], f)).unwrap();
        assert!(dom.all_pass());
        assert!(is_principal(&dom.s_tilde).is_some());

        let p = pair(&[1, -1, 0], elementary(3, 2, 1));
        let dom = principal_dominator(&p).unwrap();
        assert_eq!(dom.s_tilde, d(&[2, 0, -2]));
        let oracle = dominating_principals(&p.s_entries(), &[q(1), q(-1), q(0)], &p.f);
        assert!(oracle.contains(&dom.s_tilde.diagonal()));
    }

    #[test]
    fn not_nilpotent_is_rejected() {
        // a valid pair always has nilpotent f; the aligner still reports NotPL
        let s = WhittakerPair { s: d(&[0, 0]), f: d(&[1, 0]) };
        assert!(matches!(plroot_system(&s), Err(Error::NotPL(_))));
    }

    #[test]
    fn all_pl_orbits_up_to_four() {
        // S = h_eta + block constants in {-2..2}, first block fixed at 0
        for n in 1..=4 {
            for lam in partitions(n) {
                let eta = lam.as_composition();
                let f = jordan_matrix(&eta);
                let h = crate::gln::neutral_h_entries(&eta);
                let k = lam.len();
                for code in 0..5usize.pow(k as u32 - 1) {
                    let mut shifts = vec![0i64];
                    let mut c = code;
                    for _ in 1..k {
                        shifts.push((c % 5) as i64 - 2);
                        c /= 5;
                    }
                    let s: Vec<Rational> = lam
                        .parts()
                        .iter()
                        .zip(&shifts)
                        .flat_map(|(&len, &sh)| (0..len).map(move |i| q(len as i64 - 1 - 2 * i as i64 + sh)))
                        .collect();
                    let p = WhittakerPair::new(QMatrix::diag(&s), f.clone()).unwrap();
                    let dom = principal_dominator(&p).unwrap();
                    assert!(dom.all_pass(), "{lam} {shifts:?}: {:?} {:?}", dom.system.report, dom.checks);
                    let oracle = dominating_principals(&s, &h, &f);
                    assert!(oracle.contains(&dom.s_tilde_aligned), "{lam} {shifts:?}");
                }
            }
        }
    }
}
