//! The imprimitivity groupoid `H^G` and the `C_c(H^G)`–`C_c(H)` bimodule
//! `C_c(G_sH)`.
//!
//! `H^G` is the orbit space of `{(x,y) ∈ G_sH × G_sH : s(x) = s(y)}` under
//! the diagonal right `H`-action, with `[x,y][yh,z] = [x,zh⁻¹]` and
//! `[x,y]⁻¹ = [y,x]`. Each orbit is stored once, keyed by its
//! lexicographically least pair, and functions on `H^G` are always
//! orbit-indexed.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use crate::algebra::{Algebra, AlgebraElement, Representation};
use crate::error::{Error, Result};
use crate::groupoid::{
    s_fiber_space, FiniteGroupoid, GroupoidDocument, HaarSystem, RawGroupoid, SFiberSpace, Subgroupoid, Weight,
    WeightSpec, WeightTable,
};
use crate::linalg::{CMatrix, ZERO};

/// An element of `C_c(G_sH)`, indexed by carrier position.
#[derive(Debug, Clone, PartialEq)]
pub struct BimoduleVector {
    coeffs: Vec<Complex64>,
}

impl BimoduleVector {
    pub fn zero(len: usize) -> Self {
        Self { coeffs: vec![ZERO; len] }
    }

    pub fn delta(len: usize, pos: usize) -> Self {
        let mut v = Self::zero(len);
        v.coeffs[pos] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn random(len: usize, rng: &mut impl Rng) -> Self {
        Self {
            coeffs: (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect(),
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }
}

#[derive(Debug, Clone)]
pub struct ImprimitivityGroupoid {
    g_alg: Arc<Algebra>,
    h: Subgroupoid,
    h_alg: Arc<Algebra>,
    fiber: SFiberSpace,
    hg_alg: Arc<Algebra>,
    orbit_of: HashMap<(usize, usize), usize>,
    representatives: Vec<(usize, usize)>,
}

impl ImprimitivityGroupoid {
    /// Build `H^G` with its Haar system `β` for `H ⊆ G`, Haar `λ` on `G`
    /// (inside `g_alg`) and `α` on `H` (indexed locally).
    pub fn new(g_alg: Arc<Algebra>, h: Subgroupoid, alpha: HaarSystem) -> Result<Self> {
        if h.parent().as_ref() != g_alg.groupoid().as_ref() {
            return Err(Error::BaseMismatch);
        }
        let h_alg = Algebra::new(h.local().clone(), alpha)?;
        let g = g_alg.groupoid().clone();
        let fiber = s_fiber_space(&g, &h)?;

        let mut orbit_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut representatives = Vec::new();
        let mut members: Vec<Vec<(usize, usize)>> = Vec::new();
        for &x in fiber.carrier() {
            for &y in g.source_fiber(g.source(x)) {
                if orbit_of.contains_key(&(x, y)) {
                    continue;
                }
                let id = representatives.len();
                representatives.push((x, y));
                let mut orbit = Vec::new();
                for &k in g.range_fiber(g.source(x)) {
                    if h.contains(k) {
                        let pair = (g.compose(x, k).unwrap(), g.compose(y, k).unwrap());
                        orbit_of.insert(pair, id);
                        orbit.push(pair);
                    }
                }
                members.push(orbit);
            }
        }

        let m = representatives.len();
        let orbit = |a: usize, b: usize| orbit_of[&(a, b)];
        let mut raw = RawGroupoid::default();
        for &(x, y) in &representatives {
            raw.names.push(format!("[{},{}]", g.name(x), g.name(y)));
            raw.range.push(Some(orbit(x, x)));
            raw.source.push(Some(orbit(y, y)));
            raw.inverse.push(Some(orbit(y, x)));
        }
        for (id, &(x, y)) in representatives.iter().enumerate() {
            if x == y {
                raw.units.push(id);
            }
        }
        for (o1, &(x, y)) in representatives.iter().enumerate() {
            for (o2, &(y2, z)) in representatives.iter().enumerate() {
                if orbit(y, y) != orbit(y2, y2) {
                    continue;
                }
                // y2 = y·h, so z·h⁻¹ = z·y2⁻¹·y
                let zh_inv = g.compose(g.compose(z, g.inverse(y2)).unwrap(), y).unwrap();
                raw.compose.push((o1, o2, orbit(x, zh_inv)));
            }
        }
        let hg = Arc::new(FiniteGroupoid::from_raw(raw)?);

        // β([x,y]) = λ(y⁻¹), checked on every member of the orbit
        let lambda = g_alg.haar();
        for (id, orbit_members) in members.iter().enumerate() {
            let w0 = lambda.weight(g.inverse(representatives[id].1));
            for &(_, y) in orbit_members {
                if !weights_equal(lambda.weight(g.inverse(y)), w0) {
                    return Err(Error::NotInvariant(format!("β depends on the representative of {}", hg.name(id))));
                }
            }
        }
        let beta_table = match lambda.table() {
            WeightTable::Exact(w) => {
                WeightTable::Exact(representatives.iter().map(|&(_, y)| w[g.inverse(y)]).collect())
            }
            WeightTable::Float(w) => {
                WeightTable::Float(representatives.iter().map(|&(_, y)| w[g.inverse(y)]).collect())
            }
        };
        debug_assert_eq!(m, hg.len());
        let beta = HaarSystem::new(&hg, beta_table)?;
        let hg_alg = Algebra::new(hg, beta)?;
        Ok(Self { g_alg, h, h_alg, fiber, hg_alg, orbit_of, representatives })
    }

    /// `H^G` for `H ⊆ G` with the restriction of `λ` to `H` as `α`.
    pub fn with_restricted_haar(g_alg: Arc<Algebra>, h: Subgroupoid) -> Result<Self> {
        let alpha = g_alg.haar().restrict(&h);
        Self::new(g_alg, h, alpha)
    }

    pub fn g_algebra(&self) -> &Arc<Algebra> {
        &self.g_alg
    }

    pub fn h_algebra(&self) -> &Arc<Algebra> {
        &self.h_alg
    }

    /// `C_c(H^G)` with `β`.
    pub fn hg_algebra(&self) -> &Arc<Algebra> {
        &self.hg_alg
    }

    pub fn subgroupoid(&self) -> &Subgroupoid {
        &self.h
    }

    pub fn fiber(&self) -> &SFiberSpace {
        &self.fiber
    }

    pub fn carrier_len(&self) -> usize {
        self.fiber.len()
    }

    pub fn orbit_count(&self) -> usize {
        self.representatives.len()
    }

    /// Orbit id of `(x, y)`; `None` unless both lie in `G_sH` with `s(x) = s(y)`.
    pub fn orbit(&self, x: usize, y: usize) -> Option<usize> {
        self.orbit_of.get(&(x, y)).copied()
    }

    pub fn representative(&self, orbit: usize) -> (usize, usize) {
        self.representatives[orbit]
    }

    /// Largest `|β(o) − λ(y⁻¹)|` over all orbit members `(x, y)`.
    pub fn beta_representative_defect(&self) -> f64 {
        let g = self.g_alg.groupoid();
        self.orbit_of
            .iter()
            .map(|(&(_, y), &o)| (self.hg_alg.haar().weight_f64(o) - self.g_alg.haar().weight_f64(g.inverse(y))).abs())
            .fold(0.0, f64::max)
    }

    fn check_vec(&self, v: &BimoduleVector) -> Result<()> {
        if v.len() == self.fiber.len() {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    fn check_alg(expected: &Arc<Algebra>, f: &AlgebraElement) -> Result<()> {
        if Algebra::same(expected, f.algebra()) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    fn pos(&self, x: usize) -> usize {
        self.fiber.position(x).expect("element of G_sH")
    }

    /// `(F·φ)(z) = Σ_{y ∈ G_{s(z)}} F([z,y]) φ(y) λ(y⁻¹)`.
    pub fn left_action(&self, f: &AlgebraElement, phi: &BimoduleVector) -> Result<BimoduleVector> {
        Self::check_alg(&self.hg_alg, f)?;
        self.check_vec(phi)?;
        let g = self.g_alg.groupoid();
        let lambda = self.g_alg.haar();
        let coeffs = self
            .fiber
            .carrier()
            .iter()
            .map(|&z| {
                g.source_fiber(g.source(z))
                    .iter()
                    .map(|&y| f.get(self.orbit_of[&(z, y)]) * phi.coeffs[self.pos(y)] * lambda.weight_f64(g.inverse(y)))
                    .sum()
            })
            .collect();
        Ok(BimoduleVector { coeffs })
    }

    /// `(φ·g)(z) = Σ_{h ∈ H^{s(z)}} φ(zh) g(h⁻¹) α(h)`.
    pub fn right_action(&self, phi: &BimoduleVector, k: &AlgebraElement) -> Result<BimoduleVector> {
        Self::check_alg(&self.h_alg, k)?;
        self.check_vec(phi)?;
        let g = self.g_alg.groupoid();
        let hl = self.h.local();
        let alpha = self.h_alg.haar();
        let coeffs = self
            .fiber
            .carrier()
            .iter()
            .map(|&z| {
                let unit = self.h.local_index(g.source(z)).expect("s(z) ∈ H⁰");
                hl.range_fiber(unit)
                    .iter()
                    .map(|&hloc| {
                        let hp = self.h.parent_index(hloc);
                        let zh = g.compose(z, hp).unwrap();
                        phi.coeffs[self.pos(zh)] * k.get(hl.inverse(hloc)) * alpha.weight_f64(hloc)
                    })
                    .sum()
            })
            .collect();
        Ok(BimoduleVector { coeffs })
    }

    /// `⟨φ,ψ⟩_R(h) = Σ_{y ∈ G_{r(h)}} conj φ(y) ψ(yh) λ(y⁻¹)`.
    pub fn rip(&self, phi: &BimoduleVector, psi: &BimoduleVector) -> Result<AlgebraElement> {
        self.check_vec(phi)?;
        self.check_vec(psi)?;
        let g = self.g_alg.groupoid();
        let lambda = self.g_alg.haar();
        let coeffs = self
            .h
            .members()
            .iter()
            .map(|&hp| {
                g.source_fiber(g.range(hp))
                    .iter()
                    .map(|&y| {
                        let yh = g.compose(y, hp).unwrap();
                        phi.coeffs[self.pos(y)].conj() * psi.coeffs[self.pos(yh)] * lambda.weight_f64(g.inverse(y))
                    })
                    .sum()
            })
            .collect();
        AlgebraElement::from_coeffs(&self.h_alg, coeffs)
    }

    /// `⟨φ,ψ⟩_L` evaluated on the pair `(x, y)` (any orbit representative):
    /// `Σ_{h ∈ H^{s(x)}} φ(xh) conj ψ(yh) α(h)`.
    pub fn lip_at(&self, phi: &BimoduleVector, psi: &BimoduleVector, x: usize, y: usize) -> Complex64 {
        let g = self.g_alg.groupoid();
        let hl = self.h.local();
        let alpha = self.h_alg.haar();
        let unit = self.h.local_index(g.source(x)).expect("s(x) ∈ H⁰");
        hl.range_fiber(unit)
            .iter()
            .map(|&hloc| {
                let hp = self.h.parent_index(hloc);
                let xh = g.compose(x, hp).unwrap();
                let yh = g.compose(y, hp).unwrap();
                phi.coeffs[self.pos(xh)] * psi.coeffs[self.pos(yh)].conj() * alpha.weight_f64(hloc)
            })
            .sum()
    }

    /// `⟨φ,ψ⟩_L` as a function on `H^G`.
    pub fn lip(&self, phi: &BimoduleVector, psi: &BimoduleVector) -> Result<AlgebraElement> {
        self.check_vec(phi)?;
        self.check_vec(psi)?;
        let coeffs = self.representatives.iter().map(|&(x, y)| self.lip_at(phi, psi, x, y)).collect();
        AlgebraElement::from_coeffs(&self.hg_alg, coeffs)
    }

    /// `(f·φ)(z) = Σ_{r(y)=r(z)} f(y) φ(y⁻¹z) λ(y)`.
    pub fn f_action(&self, f: &AlgebraElement, phi: &BimoduleVector) -> Result<BimoduleVector> {
        Self::check_alg(&self.g_alg, f)?;
        self.check_vec(phi)?;
        let g = self.g_alg.groupoid();
        let lambda = self.g_alg.haar();
        let coeffs = self
            .fiber
            .carrier()
            .iter()
            .map(|&z| {
                g.range_fiber(g.range(z))
                    .iter()
                    .map(|&y| {
                        let yz = g.compose(g.inverse(y), z).unwrap();
                        f.get(y) * phi.coeffs[self.pos(yz)] * lambda.weight_f64(y)
                    })
                    .sum()
            })
            .collect();
        Ok(BimoduleVector { coeffs })
    }

    /// Extension by zero of a bimodule vector to all of `G`.
    pub fn extend(&self, phi: &BimoduleVector) -> AlgebraElement {
        let mut f = AlgebraElement::zero(&self.g_alg);
        for (i, &x) in self.fiber.carrier().iter().enumerate() {
            f.set(x, phi.coeffs[i]);
        }
        f
    }

    /// Restriction of a function on `G` to `G_sH`.
    pub fn restrict(&self, f: &AlgebraElement) -> BimoduleVector {
        BimoduleVector { coeffs: self.fiber.carrier().iter().map(|&x| *f.get(x)).collect() }
    }

    /// Block matrix with `(i, j)` block `L(⟨φ_i, φ_j⟩_R)`.
    pub fn gram(&self, family: &[BimoduleVector], rep: &Representation) -> Result<CMatrix> {
        let d = rep.dim();
        let n = family.len();
        let mut out = CMatrix::zeros(n * d, n * d);
        for (i, phi) in family.iter().enumerate() {
            for (j, psi) in family.iter().enumerate() {
                let block = rep.apply(&self.rip(phi, psi)?)?;
                out.view_mut((i * d, j * d), (d, d)).copy_from(&block);
            }
        }
        Ok(out)
    }

    /// `Π([z,y]) = zy⁻¹` for `H = G(u)`; injective, returned per orbit.
    pub fn pi_map(&self) -> Result<Vec<usize>> {
        if self.h.stability_unit().is_none() {
            return Err(Error::NotIsotropyCase);
        }
        let g = self.g_alg.groupoid();
        let table: Vec<usize> =
            self.representatives.iter().map(|&(z, y)| g.compose(z, g.inverse(y)).unwrap()).collect();
        let mut seen = vec![false; g.len()];
        for (o, &t) in table.iter().enumerate() {
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::AxiomViolation(format!("Π is not injective at {}", self.hg_alg.groupoid().name(o))));
            }
        }
        Ok(table)
    }

    /// The function `f` on `G` with `f(zy⁻¹) = F([z,y])` on the image of `Π`
    /// and zero elsewhere.
    pub fn transfer(&self, big_f: &AlgebraElement) -> Result<AlgebraElement> {
        Self::check_alg(&self.hg_alg, big_f)?;
        let pi = self.pi_map()?;
        let mut f = AlgebraElement::zero(&self.g_alg);
        for (o, &t) in pi.iter().enumerate() {
            f.set(t, *big_f.get(o));
        }
        Ok(f)
    }

    /// `H^G` as a definition document (with `β` as its Haar block) plus the
    /// orbit table `[[x, y], orbit_id]` over every member pair.
    pub fn to_json(&self, name: &str) -> Value {
        let hg = self.hg_alg.groupoid();
        let g = self.g_alg.groupoid();
        let mut doc = GroupoidDocument::explicit(name, hg);
        doc.haar =
            Some((0..hg.len()).map(|o| (hg.name(o).to_string(), weight_spec(self.hg_alg.haar().weight(o)))).collect());
        let mut pairs: Vec<(&(usize, usize), &usize)> = self.orbit_of.iter().collect();
        pairs.sort();
        let orbits: Vec<Value> = pairs.into_iter().map(|(&(x, y), &o)| json!([[g.name(x), g.name(y)], o])).collect();
        json!({"groupoid": doc, "orbits": orbits})
    }
}

fn weights_equal(a: Weight, b: Weight) -> bool {
    match (a, b) {
        (Weight::Exact(p), Weight::Exact(q)) => p == q,
        (p, q) => (p.to_f64() - q.to_f64()).abs() <= crate::groupoid::FLOAT_WEIGHT_TOL,
    }
}

fn weight_spec(w: Weight) -> WeightSpec {
    match w {
        Weight::Exact(r) if *r.denom() == 1 => WeightSpec::Integer(r.to_integer()),
        Weight::Exact(r) => WeightSpec::Text(format!("{}/{}", r.numer(), r.denom())),
        Weight::Float(f) => WeightSpec::Float(f),
    }
}
