//! Irreducibility via commutants, irreducible representations of finite
//! groups, and the irreducibility check for representations induced from stability groups.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{character_distance, regular_representation, Algebra, AlgebraElement, Representation};
use crate::error::{Error, Result};
use crate::groupoid::{isotropy_group, LoadedGroupoid, Subgroupoid};
use crate::imprimitivity::ImprimitivityGroupoid;
use crate::induction::{InducedRep, InducedSpace};
use crate::linalg::{hermitian_eigen, max_abs, null_space, op_norm, CMatrix};
use crate::tolerance::Tolerances;

pub const DEFAULT_SEED: u64 = 0x1d5e_ed00;
/// Eigenvalues closer than this (relative to the spread) share an eigenspace.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Random draws tried before a split is declared degenerate.
pub const MAX_ATTEMPTS: usize = 8;
/// Number of random `F` in the transfer comparison.
pub const TRANSFER_SAMPLES: usize = 20;

#[derive(Debug, Clone)]
pub struct CommutantReport {
    pub dim: usize,
    /// Basis of `{T : T·L(δ_x) = L(δ_x)·T for all x}`.
    pub basis: Vec<CMatrix>,
    /// Smallest singular value counted as nonzero, relative to the largest.
    pub smallest_kept: f64,
    /// Largest singular value counted as zero, relative to the largest.
    pub largest_dropped: f64,
    /// `max ‖T·L(δ_x) − L(δ_x)·T‖` over the basis.
    pub max_commutator: f64,
}

/// The commutant of a representation, from the null space of the stacked
/// linear maps `T ↦ T·A_x − A_x·T` (column-major `vec(T)`).
pub fn commutant(rep: &Representation, rank_tol: f64) -> Result<CommutantReport> {
    rep.ensure_valid()?;
    let d = rep.dim();
    let ops = rep.ops();
    let mut stacked = CMatrix::zeros(ops.len() * d * d, d * d);
    for (b, a) in ops.iter().enumerate() {
        let base = b * d * d;
        for i in 0..d {
            for j in 0..d {
                let row = base + i + j * d;
                for k in 0..d {
                    stacked[(row, i + k * d)] += a[(k, j)];
                    stacked[(row, k + j * d)] -= a[(i, k)];
                }
            }
        }
    }
    let (null, sigma) = null_space(&stacked, rank_tol);
    let dim = null.ncols();
    let top = sigma.first().copied().unwrap_or(0.0);
    let rel = |s: f64| if top > 0.0 { s / top } else { 0.0 };
    let kept = sigma.len() - dim;
    let basis: Vec<CMatrix> = null.column_iter().map(|col| CMatrix::from_column_slice(d, d, col.as_slice())).collect();
    let max_commutator =
        basis.iter().flat_map(|t| ops.iter().map(move |a| max_abs(&(t * a - a * t)))).fold(0.0, f64::max);
    Ok(CommutantReport {
        dim,
        basis,
        smallest_kept: if kept > 0 { rel(sigma[kept - 1]) } else { 0.0 },
        largest_dropped: if dim > 0 && top > 0.0 { rel(sigma[kept]) } else { 0.0 },
        max_commutator,
    })
}

pub fn is_irreducible(rep: &Representation, rank_tol: f64) -> Result<bool> {
    Ok(commutant(rep, rank_tol)?.dim == 1)
}

/// Irreducible representations of a group algebra, sorted by dimension and
/// then by character; the trivial representation comes first.
#[derive(Debug, Clone)]
pub struct IrrepSet {
    pub irreps: Vec<Representation>,
    pub seed: u64,
}

fn split(rep: Representation, rng: &mut ChaCha8Rng, rank_tol: f64, out: &mut Vec<Representation>) -> Result<()> {
    let report = commutant(&rep, rank_tol)?;
    if report.dim <= 1 {
        out.push(rep);
        return Ok(());
    }
    for _ in 0..MAX_ATTEMPTS {
        let d = rep.dim();
        let mut t = CMatrix::zeros(d, d);
        for b in &report.basis {
            t += b * Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        }
        let (values, vectors) = hermitian_eigen(&(&t + t.adjoint()));
        let spread = (values[d - 1] - values[0]).max(1.0);
        let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
        for i in 1..d {
            if values[i] - values[i - 1] > CLUSTER_TOL * spread {
                clusters.push(Vec::new());
            }
            clusters.last_mut().unwrap().push(i);
        }
        if clusters.len() < 2 {
            continue;
        }
        for cluster in clusters {
            let basis = CMatrix::from_fn(d, cluster.len(), |r, k| vectors[(r, cluster[k])]);
            split(rep.compress(&basis)?, rng, rank_tol, out)?;
        }
        return Ok(());
    }
    Err(Error::DecompositionFailure(MAX_ATTEMPTS))
}

fn sort_key(rep: &Representation) -> (usize, Vec<(i64, i64)>) {
    let key = rep.character().iter().map(|z| ((-z.re * 1e6).round() as i64, (-z.im * 1e6).round() as i64)).collect();
    (rep.dim(), key)
}

/// Decompose the regular representation of a group algebra into its
/// inequivalent irreducibles, certified by `Σ dim² = |Γ|`.
pub fn group_irreps(alg: &Arc<Algebra>, seed: u64, rank_tol: f64) -> Result<IrrepSet> {
    let g = alg.groupoid();
    if !g.is_group() {
        return Err(Error::NotAGroup(g.units().len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pieces = Vec::new();
    split(regular_representation(alg, g.units()[0])?, &mut rng, rank_tol, &mut pieces)?;
    let mut irreps: Vec<Representation> = Vec::new();
    for p in pieces {
        let chi = p.character();
        if !irreps.iter().any(|q| character_distance(&q.character(), &chi) < 1e-6) {
            irreps.push(p);
        }
    }
    if irreps.iter().map(|r| r.dim() * r.dim()).sum::<usize>() != g.len() {
        return Err(Error::DecompositionFailure(1));
    }
    irreps.sort_by_cached_key(sort_key);
    Ok(IrrepSet { irreps, seed })
}

/// `G(u)` as a subgroupoid and its algebra with the restricted Haar system.
pub fn stability_algebra(g_alg: &Arc<Algebra>, u: usize) -> Result<(Subgroupoid, Arc<Algebra>)> {
    let h = isotropy_group(g_alg.groupoid(), u)?;
    let alg = Algebra::new(h.local().clone(), g_alg.haar().restrict(&h))?;
    Ok((h, alg))
}

/// Outcome of inducing an irreducible of `G(u)` up to `G`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub groupoid: String,
    pub unit: String,
    pub irrep_label: String,
    pub irrep_dim: usize,
    pub induced_dim: usize,
    pub commutant_dim: usize,
    pub xind_commutant_dim: usize,
    /// `max ‖Ind L(transfer F) − X-Ind L(F)‖` over the random samples.
    pub transfer_residual: f64,
    /// `max (‖transfer F‖_I − ‖F‖_I)` over the random samples.
    pub i_norm_excess: f64,
    pub i_norm_ok: bool,
    pub pass: bool,
    pub seed: u64,
    pub tolerances: Tolerances,
}

/// Induce `L` from `G(u)` and check irreducibility on both sides together
/// with the transfer identity on random `F ∈ C_c(G(u)^G)`.
pub fn main_theorem_check(
    g_alg: &Arc<Algebra>,
    u: usize,
    rep: &Representation,
    tol: &Tolerances,
    seed: u64,
) -> Result<Verdict> {
    let (h, h_alg) = stability_algebra(g_alg, u)?;
    if !Algebra::same(rep.algebra(), &h_alg) {
        return Err(Error::BaseMismatch);
    }
    let input = commutant(rep, tol.rank_tol)?;
    if input.dim != 1 {
        return Err(Error::NotIrreducibleInput(input.dim));
    }
    let imp = Arc::new(ImprimitivityGroupoid::new(g_alg.clone(), h, h_alg.haar().clone())?);
    let ind = InducedRep::new(InducedSpace::new(imp.clone(), rep.clone(), tol.null_tol)?)?;
    let commutant_dim = commutant(ind.rep(), tol.rank_tol)?.dim;
    let xind_commutant_dim = commutant(ind.xind_rep(), tol.rank_tol)?.dim;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transfer_residual = 0.0f64;
    let mut i_norm_excess = f64::NEG_INFINITY;
    for _ in 0..TRANSFER_SAMPLES {
        let big_f = AlgebraElement::random(imp.hg_algebra(), &mut rng);
        let f = imp.transfer(&big_f)?;
        transfer_residual = transfer_residual.max(op_norm(&(ind.apply(&f)? - ind.xind(&big_f)?)));
        i_norm_excess = i_norm_excess.max(f.i_norm() - big_f.i_norm());
    }
    let i_norm_ok = i_norm_excess <= 1.0;
    let pass = commutant_dim == 1 && xind_commutant_dim == 1 && transfer_residual <= tol.residual_tol && i_norm_ok;
    Ok(Verdict {
        groupoid: String::new(),
        unit: g_alg.groupoid().unit_display(u).to_string(),
        irrep_label: String::new(),
        irrep_dim: rep.dim(),
        induced_dim: ind.dim(),
        commutant_dim,
        xind_commutant_dim,
        transfer_residual,
        i_norm_excess,
        i_norm_ok,
        pass,
        seed,
        tolerances: *tol,
    })
}

/// One harness row: a verdict, or the error that prevented one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessRow {
    pub groupoid: String,
    pub unit: String,
    pub irrep_label: String,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

impl HarnessRow {
    pub fn pass(&self) -> bool {
        self.verdict.as_ref().is_some_and(|v| v.pass)
    }
}

pub fn irrep_label(k: usize) -> String {
    format!("irrep{k}")
}

/// Induction verdicts for every unit and every irreducible of its
/// stability group.
pub fn harness_rows(loaded: &LoadedGroupoid, tol: &Tolerances, seed: u64) -> Vec<HarnessRow> {
    let g = &loaded.groupoid;
    let alg = match Algebra::new(g.clone(), loaded.haar.clone()) {
        Ok(a) => a,
        Err(e) => {
            return vec![HarnessRow {
                groupoid: loaded.name.clone(),
                unit: String::new(),
                irrep_label: String::new(),
                verdict: None,
                error: Some(e.to_string()),
            }]
        }
    };
    let mut rows = Vec::new();
    for &u in g.units() {
        let unit = g.unit_display(u).to_string();
        let irreps = stability_algebra(&alg, u).and_then(|(_, h_alg)| group_irreps(&h_alg, seed, tol.rank_tol));
        let irreps = match irreps {
            Ok(set) => set.irreps,
            Err(e) => {
                rows.push(HarnessRow {
                    groupoid: loaded.name.clone(),
                    unit,
                    irrep_label: String::new(),
                    verdict: None,
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        for (k, rep) in irreps.iter().enumerate() {
            let label = irrep_label(k);
            let (verdict, error) = match main_theorem_check(&alg, u, rep, tol, seed) {
                Ok(mut v) => {
                    v.groupoid = loaded.name.clone();
                    v.irrep_label = label.clone();
                    (Some(v), None)
                }
                Err(e) => (None, Some(e.to_string())),
            };
            rows.push(HarnessRow {
                groupoid: loaded.name.clone(),
                unit: unit.clone(),
                irrep_label: label,
                verdict,
                error,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{cyclic_group, pair_groupoid, symmetric_group, transformation_groupoid, HaarSystem, Weight};
    use crate::induction::induce;
    use crate::linalg::{c, ONE};
    use num_rational::Ratio;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn character_rep(alg: &Arc<Algebra>, values: &[Complex64]) -> Representation {
        let ops = values.iter().map(|v| CMatrix::from_element(1, 1, *v)).collect();
        Representation::new(alg.clone(), 1, ops).unwrap()
    }

    #[test]
    fn commutant_dimensions() {
        let z2 = Algebra::counting(Arc::new(cyclic_group(2)));
        let plus = character_rep(&z2, &[ONE, ONE]);
        let minus = character_rep(&z2, &[ONE, -ONE]);
        assert_eq!(commutant(&plus, 1e-8).unwrap().dim, 1);
        assert_eq!(commutant(&plus.direct_sum(&minus).unwrap(), 1e-8).unwrap().dim, 2);
        assert_eq!(commutant(&minus.direct_sum(&minus).unwrap(), 1e-8).unwrap().dim, 4);
        let reg = regular_representation(&z2, 0).unwrap();
        assert!(!is_irreducible(&reg, 1e-8).unwrap());
        let report = commutant(&reg, 1e-8).unwrap();
        assert!(report.max_commutator <= 1e-9);
        assert!(report.largest_dropped < 1e-12 && report.smallest_kept > 1e-3);
    }

    #[test]
    fn pair_groupoid_induced_is_irreducible() {
        let g = Arc::new(pair_groupoid(&["1".into(), "2".into(), "3".into()]).unwrap());
        let alg = Algebra::counting(g.clone());
        let (h, h_alg) = stability_algebra(&alg, g.resolve_unit("1").unwrap()).unwrap();
        let ind = induce(&alg, &h, &character_rep(&h_alg, &[ONE]), 1e-9).unwrap();
        assert_eq!(ind.dim(), 3);
        assert!(is_irreducible(ind.rep(), 1e-8).unwrap());
    }

    fn inner_product(a: &Representation, b: &Representation) -> Complex64 {
        let n = a.algebra().len() as f64;
        a.character().iter().zip(b.character()).map(|(x, y)| x * y.conj()).sum::<Complex64>() / n
    }

    #[test]
    fn cyclic_irreps() {
        let z2 = Algebra::counting(Arc::new(cyclic_group(2)));
        let set = group_irreps(&z2, DEFAULT_SEED, 1e-8).unwrap();
        assert_eq!(set.irreps.len(), 2);
        assert!(character_distance(&set.irreps[0].character(), &[ONE, ONE]) < 1e-9);
        assert!(character_distance(&set.irreps[1].character(), &[ONE, -ONE]) < 1e-9);

        let z4 = Algebra::counting(Arc::new(cyclic_group(4)));
        let set = group_irreps(&z4, DEFAULT_SEED, 1e-8).unwrap();
        assert_eq!(set.irreps.len(), 4);
        let i = Complex64::new(0.0, 1.0);
        for rep in &set.irreps {
            let chi = rep.character();
            let gen = chi[1];
            assert!((gen.powu(4) - ONE).norm() < 1e-9);
            for (k, value) in chi.iter().enumerate() {
                assert!((value - gen.powu(k as u32)).norm() < 1e-9);
            }
        }
        let gens: Vec<Complex64> = set.irreps.iter().map(|r| r.character()[1]).collect();
        for root in [ONE, -ONE, i, -i] {
            assert!(gens.iter().any(|g| (g - root).norm() < 1e-9));
        }
    }

    #[test]
    fn symmetric_group_irreps() {
        let (s3, _) = symmetric_group(3);
        let alg = Algebra::counting(Arc::new(s3));
        let set = group_irreps(&alg, DEFAULT_SEED, 1e-8).unwrap();
        let dims: Vec<usize> = set.irreps.iter().map(Representation::dim).collect();
        assert_eq!(dims, vec![1, 1, 2]);
        for (a, ra) in set.irreps.iter().enumerate() {
            assert!(is_irreducible(ra, 1e-8).unwrap());
            for (b, rb) in set.irreps.iter().enumerate() {
                let expected = if a == b { ONE } else { c(0.0) };
                assert!((inner_product(ra, rb) - expected).norm() < 1e-9);
            }
        }
        // trivial first
        assert!(set.irreps[0].character().iter().all(|z| (z - ONE).norm() < 1e-9));
    }

    #[test]
    fn irreps_respect_haar_scaling() {
        let g = Arc::new(cyclic_group(3));
        let haar = HaarSystem::from_unit_density(&g, |_| Weight::Exact(Ratio::new(5, 2))).unwrap();
        let alg = Algebra::new(g, haar).unwrap();
        let set = group_irreps(&alg, 3, 1e-8).unwrap();
        assert_eq!(set.irreps.len(), 3);
        for rep in &set.irreps {
            rep.ensure_valid().unwrap();
        }
    }

    #[test]
    fn not_a_group() {
        let g = Arc::new(pair_groupoid(&["1".into(), "2".into()]).unwrap());
        assert!(matches!(group_irreps(&Algebra::counting(g), 1, 1e-8), Err(Error::NotAGroup(2))));
    }

    #[test]
    fn induced_irreducible_on_pair_groupoid() {
        let g = Arc::new(pair_groupoid(&["1".into(), "2".into()]).unwrap());
        let alg = Algebra::counting(g.clone());
        let u = g.resolve_unit("1").unwrap();
        let (_, h_alg) = stability_algebra(&alg, u).unwrap();
        let v = main_theorem_check(&alg, u, &character_rep(&h_alg, &[ONE]), &tol(), DEFAULT_SEED).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!(v.induced_dim, 2);
        assert!(v.transfer_residual <= 1e-10);
    }

    #[test]
    fn induced_irreducible_on_z4_over_z2() {
        let pts = vec!["0".to_string(), "1".to_string()];
        let g = Arc::new(transformation_groupoid(&cyclic_group(4), &pts, |a, x| (a + x) % 2).unwrap());
        let alg = Algebra::counting(g.clone());
        let u = g.resolve_unit("0").unwrap();
        let (h, h_alg) = stability_algebra(&alg, u).unwrap();
        let set = group_irreps(&h_alg, DEFAULT_SEED, 1e-8).unwrap();
        assert_eq!(set.irreps.len(), 2);
        let mut characters = Vec::new();
        for rep in &set.irreps {
            let v = main_theorem_check(&alg, u, rep, &tol(), DEFAULT_SEED).unwrap();
            assert!(v.pass, "{v:?}");
            assert_eq!(v.induced_dim, 2);
            characters.push(induce(&alg, &h, rep, 1e-9).unwrap().rep().character());
        }
        assert!(character_distance(&characters[0], &characters[1]) > 0.5);
    }

    #[test]
    fn inducing_from_whole_group_reproduces_input() {
        let (s3, _) = symmetric_group(3);
        let alg = Algebra::counting(Arc::new(s3));
        let set = group_irreps(&alg, DEFAULT_SEED, 1e-8).unwrap();
        let full = Subgroupoid::full(alg.groupoid().clone());
        for rep in &set.irreps {
            let v = main_theorem_check(&alg, 0, rep, &tol(), DEFAULT_SEED).unwrap();
            assert!(v.pass);
            assert_eq!(v.induced_dim, rep.dim());
            let ind = induce(&alg, &full, rep, 1e-9).unwrap();
            assert!(character_distance(&ind.rep().character(), &rep.character()) < 1e-9);
        }
    }

    #[test]
    fn reducible_input_is_rejected() {
        let z2 = Algebra::counting(Arc::new(cyclic_group(2)));
        let reg = regular_representation(&z2, 0).unwrap();
        assert!(matches!(main_theorem_check(&z2, 0, &reg, &tol(), 1), Err(Error::NotIrreducibleInput(2))));
    }
}
