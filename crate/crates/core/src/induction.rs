//! Induced representations `Ind_H^G L`, the X-Ind action of `C_c(H^G)` and
//! induction in stages.
//!
//! The induced space is the quotient of `C_c(G_sH) ⊗ H_L` by the null space
//! of the pre-inner product `(φ⊗h | ψ⊗k) = (L(⟨ψ,φ⟩_R)h | k)`. The spanning
//! family is `δ_z ⊗ e_a` for `z ∈ G_sH` and `a < dim L`, indexed
//! `position(z) · dim L + a`.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{regular_representation, Algebra, AlgebraElement, Representation};
use crate::error::{Error, Result};
use crate::groupoid::{HaarSystem, Subgroupoid};
use crate::imprimitivity::{BimoduleVector, ImprimitivityGroupoid};
use crate::linalg::{self, kron_identity, op_norm, CMatrix, PsdFactor};

/// Most negative Gram eigenvalue tolerated, relative to the largest.
pub const PSD_FLOOR: f64 = 1e-10;
/// Largest quotient norm a unit null vector may reach after an operator is applied.
pub const DESCENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct InducedSpace {
    imp: Arc<ImprimitivityGroupoid>,
    rep: Representation,
    gram: CMatrix,
    factor: PsdFactor,
}

impl InducedSpace {
    pub fn new(imp: Arc<ImprimitivityGroupoid>, rep: Representation, null_tol: f64) -> Result<Self> {
        if !Algebra::same(rep.algebra(), imp.h_algebra()) {
            return Err(Error::BaseMismatch);
        }
        rep.ensure_valid()?;
        let n = imp.carrier_len();
        let family: Vec<BimoduleVector> = (0..n).map(|p| BimoduleVector::delta(n, p)).collect();
        let gram = imp.gram(&family, &rep)?;
        let hermitian_defect = linalg::max_abs(&(&gram - gram.adjoint()));
        let factor = PsdFactor::new(&gram, null_tol);
        let largest = factor.eigenvalues.last().copied().unwrap_or(0.0).max(1.0);
        if hermitian_defect > PSD_FLOOR * largest || factor.min_eigenvalue() < -PSD_FLOOR * largest {
            return Err(Error::InvalidRep(format!(
                "pre-inner product is not positive (min eigenvalue {:e}, hermitian defect {hermitian_defect:e})",
                factor.min_eigenvalue()
            )));
        }
        Ok(Self { imp, rep, gram, factor })
    }

    pub fn imprimitivity(&self) -> &Arc<ImprimitivityGroupoid> {
        &self.imp
    }

    pub fn inducing_rep(&self) -> &Representation {
        &self.rep
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn factor(&self) -> &PsdFactor {
        &self.factor
    }

    /// Dimension of the quotient.
    pub fn dim(&self) -> usize {
        self.factor.rank()
    }

    pub fn family_len(&self) -> usize {
        self.imp.carrier_len() * self.rep.dim()
    }

    /// Quotient coordinates of `φ ⊗ h`.
    pub fn coordinates(&self, phi: &BimoduleVector, h: &DVector<Complex64>) -> DVector<Complex64> {
        let d = self.rep.dim();
        let v = DVector::from_fn(self.family_len(), |i, _| phi.coeffs()[i / d] * h[i % d]);
        &self.factor.coords * v
    }

    /// Largest quotient norm of `A n` over unit null vectors `n`.
    pub fn descent_residual(&self, family_op: &CMatrix) -> f64 {
        let image = &self.factor.coords * family_op * &self.factor.null_vectors;
        image.column_iter().map(|col| col.norm()).fold(0.0, f64::max)
    }

    /// Matrix in the quotient basis of `φ⊗h ↦ T(φ)⊗h`, where `carrier_op`
    /// is the matrix of `T` on the deltas of `G_sH`.
    pub fn descend(&self, carrier_op: &CMatrix) -> Result<CMatrix> {
        let a = kron_identity(carrier_op, self.rep.dim());
        let residual = self.descent_residual(&a);
        if residual > DESCENT_TOL {
            return Err(Error::QuotientInconsistency(residual));
        }
        Ok(self.factor.descend(&a))
    }
}

/// Matrix of a linear map on `C_c(G_sH)`, columns indexed by the deltas.
fn carrier_matrix(n: usize, map: impl Fn(&BimoduleVector) -> Result<BimoduleVector>) -> Result<CMatrix> {
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        let image = map(&BimoduleVector::delta(n, j))?;
        for (i, z) in image.coeffs().iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    Ok(m)
}

/// `Ind_H^G L` on `C_c(G)` together with the X-Ind action of `C_c(H^G)` on
/// the same space.
#[derive(Debug, Clone)]
pub struct InducedRep {
    space: InducedSpace,
    g_rep: Representation,
    x_rep: Representation,
}

impl InducedRep {
    pub fn new(space: InducedSpace) -> Result<Self> {
        let imp = space.imp.clone();
        let n = imp.carrier_len();
        let g_alg = imp.g_algebra();
        let g_ops = (0..g_alg.len())
            .map(|x| {
                let f = AlgebraElement::delta(g_alg, x);
                space.descend(&carrier_matrix(n, |phi| imp.f_action(&f, phi))?)
            })
            .collect::<Result<Vec<_>>>()?;
        let hg_alg = imp.hg_algebra();
        let x_ops = (0..hg_alg.len())
            .map(|o| {
                let f = AlgebraElement::delta(hg_alg, o);
                space.descend(&carrier_matrix(n, |phi| imp.left_action(&f, phi))?)
            })
            .collect::<Result<Vec<_>>>()?;
        let dim = space.dim();
        let g_rep = Representation::new(g_alg.clone(), dim, g_ops)?;
        let x_rep = Representation::new(hg_alg.clone(), dim, x_ops)?;
        g_rep.ensure_valid()?;
        x_rep.ensure_valid()?;
        Ok(Self { space, g_rep, x_rep })
    }

    pub fn space(&self) -> &InducedSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// The representation of `C_c(G)`.
    pub fn rep(&self) -> &Representation {
        &self.g_rep
    }

    /// The representation of `C_c(H^G)`.
    pub fn xind_rep(&self) -> &Representation {
        &self.x_rep
    }

    /// `Ind L(f)`.
    pub fn apply(&self, f: &AlgebraElement) -> Result<CMatrix> {
        self.g_rep.apply(f)
    }

    /// `X-Ind L(F)`: the matrix of `φ⊗h ↦ F·φ ⊗ h`.
    pub fn xind(&self, big_f: &AlgebraElement) -> Result<CMatrix> {
        self.x_rep.apply(big_f)
    }
}

/// `Ind_H^G L`, with `α` taken from the algebra of `L`.
pub fn induce(g_alg: &Arc<Algebra>, h: &Subgroupoid, rep: &Representation, null_tol: f64) -> Result<InducedRep> {
    let imp = ImprimitivityGroupoid::new(g_alg.clone(), h.clone(), rep.algebra().haar().clone())?;
    InducedRep::new(InducedSpace::new(Arc::new(imp), rep.clone(), null_tol)?)
}

/// The direct sum over all units of the regular representations.
pub fn full_regular_representation(alg: &Arc<Algebra>) -> Result<Representation> {
    let units = alg.groupoid().units();
    let mut rep = regular_representation(alg, units[0])?;
    for &u in &units[1..] {
        rep = rep.direct_sum(&regular_representation(alg, u)?)?;
    }
    Ok(rep)
}

/// A chain `H ⊆ K ⊆ G` with its three imprimitivity bimodules. `K` carries
/// the restriction of the Haar system of `G`; `H` carries `α`.
#[derive(Debug, Clone)]
pub struct InductionChain {
    gk: Arc<ImprimitivityGroupoid>,
    kh: Arc<ImprimitivityGroupoid>,
    gh: Arc<ImprimitivityGroupoid>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagesReport {
    /// `dim Ind_H^G L`.
    pub direct_dim: usize,
    /// `dim Ind_K^G(Ind_H^K L)`.
    pub staged_dim: usize,
    /// `dim Ind_H^K L`.
    pub intermediate_dim: usize,
    /// `max(‖V*V − I‖, ‖VV* − I‖)`.
    pub unitarity_defect: f64,
    /// `max_x ‖V·Ind_K^G(Ind_H^K L)(δ_x) − Ind_H^G L(δ_x)·V‖`.
    pub intertwining_residual: f64,
}

impl StagesReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.direct_dim == self.staged_dim && self.unitarity_defect <= tol && self.intertwining_residual <= tol
    }
}

impl InductionChain {
    pub fn new(g_alg: Arc<Algebra>, h: Subgroupoid, k: Subgroupoid, alpha: HaarSystem) -> Result<Self> {
        let h_in_k = h.within(&k)?;
        let gk = ImprimitivityGroupoid::with_restricted_haar(g_alg.clone(), k)?;
        let kh = ImprimitivityGroupoid::new(gk.h_algebra().clone(), h_in_k, alpha.clone())?;
        let gh = ImprimitivityGroupoid::new(g_alg, h, alpha)?;
        Ok(Self { gk: Arc::new(gk), kh: Arc::new(kh), gh: Arc::new(gh) })
    }

    /// `G` over `K`.
    pub fn outer(&self) -> &Arc<ImprimitivityGroupoid> {
        &self.gk
    }

    /// `K` over `H`.
    pub fn inner(&self) -> &Arc<ImprimitivityGroupoid> {
        &self.kh
    }

    /// `G` over `H`.
    pub fn direct(&self) -> &Arc<ImprimitivityGroupoid> {
        &self.gh
    }

    /// `θ(φ⊗ψ)(x) = Σ_{k ∈ K^{s(x)}} φ(xk) ψ(k⁻¹) β_K(k)` for `φ ∈ C_c(G_sK)`,
    /// `ψ ∈ C_c(K_sH)`.
    pub fn theta(&self, phi: &BimoduleVector, psi: &BimoduleVector) -> Result<BimoduleVector> {
        if phi.len() != self.gk.carrier_len() || psi.len() != self.kh.carrier_len() {
            return Err(Error::BaseMismatch);
        }
        let g = self.gk.g_algebra().groupoid();
        let k_sub = self.gk.subgroupoid();
        let kl = k_sub.local();
        let beta_k = self.gk.h_algebra().haar();
        let coeffs = self
            .gh
            .fiber()
            .carrier()
            .iter()
            .map(|&x| {
                let unit = k_sub.local_index(g.source(x)).expect("s(x) ∈ H⁰ ⊆ K⁰");
                kl.range_fiber(unit)
                    .iter()
                    .map(|&kloc| {
                        let xk = g.compose(x, k_sub.parent_index(kloc)).unwrap();
                        let a = phi.coeffs()[self.gk.fiber().position(xk).unwrap()];
                        let b = psi.coeffs()[self.kh.fiber().position(kl.inverse(kloc)).unwrap()];
                        a * b * beta_k.weight_f64(kloc)
                    })
                    .sum()
            })
            .collect();
        Ok(BimoduleVector::from_coeffs(coeffs))
    }

    /// The unitary `V: X_K^G ⊗ (X_H^K ⊗ H_L) → X_H^G ⊗ H_L` and its residuals.
    pub fn stages_check(&self, rep: &Representation, null_tol: f64) -> Result<StagesReport> {
        let inner = InducedRep::new(InducedSpace::new(self.kh.clone(), rep.clone(), null_tol)?)?;
        let staged = InducedRep::new(InducedSpace::new(self.gk.clone(), inner.rep().clone(), null_tol)?)?;
        let direct = InducedRep::new(InducedSpace::new(self.gh.clone(), rep.clone(), null_tol)?)?;

        let dl = rep.dim();
        let r1 = inner.dim();
        let (nx, nk, nz) = (self.gk.carrier_len(), self.kh.carrier_len(), self.gh.carrier_len());
        let lift1 = &inner.space().factor().lift;
        // image of the spanning family δ_x ⊗ e_m of the staged space, in
        // spanning-family coefficients of the direct space
        let mut span_image = CMatrix::zeros(nz * dl, nx * r1);
        for xp in 0..nx {
            for kp in 0..nk {
                let t = self.theta(&BimoduleVector::delta(nx, xp), &BimoduleVector::delta(nk, kp))?;
                for (zp, tz) in t.coeffs().iter().enumerate() {
                    if *tz == linalg::ZERO {
                        continue;
                    }
                    for m in 0..r1 {
                        for a in 0..dl {
                            span_image[(zp * dl + a, xp * r1 + m)] += tz * lift1[(kp * dl + a, m)];
                        }
                    }
                }
            }
        }
        let v = &direct.space().factor().coords * span_image * &staged.space().factor().lift;

        let defect = |m: CMatrix| op_norm(&(&m - CMatrix::identity(m.nrows(), m.ncols())));
        let unitarity_defect = defect(v.adjoint() * &v).max(defect(&v * v.adjoint()));
        let g_len = self.gh.g_algebra().len();
        let intertwining_residual =
            (0..g_len).map(|x| op_norm(&(&v * staged.rep().op(x) - direct.rep().op(x) * &v))).fold(0.0, f64::max);
        Ok(StagesReport {
            direct_dim: direct.dim(),
            staged_dim: staged.dim(),
            intermediate_dim: r1,
            unitarity_defect,
            intertwining_residual,
        })
    }
}
