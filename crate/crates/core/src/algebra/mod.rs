//! The convolution *-algebra `C_c(G)` of a finite groupoid with Haar system.
//!
//! Convolution integrates over the range fiber of the output point:
//! `(f*g)(x) = Σ_{r(y)=r(x)} f(y) g(y⁻¹x) λ(y)`. With this convention
//! `δ_x * δ_y = λ(x) δ_{xy}` when `s(x) = r(y)`.

mod representation;

pub use representation::{character_distance, cstar_norm, regular_representation, RepReport, Representation};

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::{Complex, Complex64};
use num_rational::Ratio;
use num_traits::Zero;
use rand::Rng;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, HaarSystem, Weight};

/// Complex numbers with exact rational parts.
pub type ExactComplex = Complex<Ratio<i64>>;

/// Scalars usable as coefficients of algebra elements.
pub trait Coefficient:
    Clone + PartialEq + Debug + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn conjugate(&self) -> Self;
    /// `None` when the weight cannot be represented exactly in this scalar type.
    fn from_weight(w: Weight) -> Option<Self>;
}

impl Coefficient for Complex64 {
    fn conjugate(&self) -> Self {
        self.conj()
    }

    fn from_weight(w: Weight) -> Option<Self> {
        Some(Complex64::new(w.to_f64(), 0.0))
    }
}

impl Coefficient for ExactComplex {
    fn conjugate(&self) -> Self {
        self.conj()
    }

    fn from_weight(w: Weight) -> Option<Self> {
        match w {
            Weight::Exact(r) => Some(Complex::new(r, Ratio::zero())),
            Weight::Float(_) => None,
        }
    }
}

/// A groupoid together with a left-invariant Haar system.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra {
    groupoid: Arc<FiniteGroupoid>,
    haar: HaarSystem,
}

impl Algebra {
    pub fn new(groupoid: Arc<FiniteGroupoid>, haar: HaarSystem) -> Result<Arc<Self>> {
        if haar.len() != groupoid.len() {
            return Err(Error::BaseMismatch);
        }
        if let Some((x, y)) = haar.invariance_violation(&groupoid) {
            return Err(Error::NotInvariant(format!(
                "weight(`{}`·`{}`) != weight(`{}`)",
                groupoid.name(x),
                groupoid.name(y),
                groupoid.name(y)
            )));
        }
        Ok(Arc::new(Self { groupoid, haar }))
    }

    pub fn counting(groupoid: Arc<FiniteGroupoid>) -> Arc<Self> {
        let haar = HaarSystem::counting(&groupoid);
        Arc::new(Self { groupoid, haar })
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn haar(&self) -> &HaarSystem {
        &self.haar
    }

    pub fn len(&self) -> usize {
        self.groupoid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groupoid.is_empty()
    }

    /// Same groupoid and Haar system (pointer or structural equality).
    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }
}

/// A function on the groupoid, i.e. an element of `C_c(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<S = Complex64> {
    algebra: Arc<Algebra>,
    coeffs: Vec<S>,
}

impl<S: Coefficient> AlgebraElement<S> {
    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        Self { coeffs: vec![S::zero(); algebra.len()], algebra: algebra.clone() }
    }

    /// `δ_x` scaled by `value`.
    pub fn point(algebra: &Arc<Algebra>, x: usize, value: S) -> Self {
        let mut f = Self::zero(algebra);
        f.coeffs[x] = value;
        f
    }

    pub fn from_coeffs(algebra: &Arc<Algebra>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != algebra.len() {
            return Err(Error::BaseMismatch);
        }
        Ok(Self { algebra: algebra.clone(), coeffs })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn get(&self, x: usize) -> &S {
        &self.coeffs[x]
    }

    pub fn set(&mut self, x: usize, value: S) {
        self.coeffs[x] = value;
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if Algebra::same(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Self { algebra: self.algebra.clone(), coeffs })
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(Self { algebra: self.algebra.clone(), coeffs })
    }

    pub fn scale(&self, k: S) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * k.clone()).collect();
        Self { algebra: self.algebra.clone(), coeffs }
    }

    /// `(f*g)(x) = Σ_{r(y)=r(x)} f(y) g(y⁻¹x) λ(y)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let g = self.algebra.groupoid();
        let haar = self.algebra.haar();
        let weights = (0..g.len())
            .map(|y| S::from_weight(haar.weight(y)).ok_or(Error::InexactHaar))
            .collect::<Result<Vec<S>>>()?;
        let mut out = vec![S::zero(); g.len()];
        for (x, slot) in out.iter_mut().enumerate() {
            let mut acc = S::zero();
            for &y in g.range_fiber(g.range(x)) {
                if self.coeffs[y].is_zero() {
                    continue;
                }
                let yinv_x = g.compose(g.inverse(y), x).expect("r(y) = r(x)");
                acc = acc + self.coeffs[y].clone() * other.coeffs[yinv_x].clone() * weights[y].clone();
            }
            *slot = acc;
        }
        Ok(Self { algebra: self.algebra.clone(), coeffs: out })
    }

    /// `f*(x) = conj f(x⁻¹)`.
    pub fn involution(&self) -> Self {
        let g = self.algebra.groupoid();
        let coeffs = (0..g.len()).map(|x| self.coeffs[g.inverse(x)].conjugate()).collect();
        Self { algebra: self.algebra.clone(), coeffs }
    }
}

impl AlgebraElement<Complex64> {
    pub fn delta(algebra: &Arc<Algebra>, x: usize) -> Self {
        Self::point(algebra, x, Complex64::new(1.0, 0.0))
    }

    /// Coefficients with real and imaginary parts uniform in `[-1, 1]`.
    pub fn random(algebra: &Arc<Algebra>, rng: &mut impl Rng) -> Self {
        let coeffs =
            (0..algebra.len()).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect();
        Self { algebra: algebra.clone(), coeffs }
    }

    /// `max_u max(Σ_{r(y)=u} |f(y)| λ^u(y), Σ_{s(y)=u} |f(y)| λ_u(y))`.
    pub fn i_norm(&self) -> f64 {
        let g = self.algebra.groupoid();
        let haar = self.algebra.haar();
        g.units()
            .iter()
            .map(|&u| {
                let r_sum: f64 = g.range_fiber(u).iter().map(|&y| self.coeffs[y].norm() * haar.weight_f64(y)).sum();
                let s_sum: f64 =
                    g.source_fiber(u).iter().map(|&y| self.coeffs[y].norm() * haar.weight_f64(g.inverse(y))).sum();
                r_sum.max(s_sum)
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// JSON map from element name to `[re, im]`.
    pub fn to_json(&self) -> Value {
        let g = self.algebra.groupoid();
        let map: Map<String, Value> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(x, z)| (g.name(x).to_string(), serde_json::json!([z.re, z.im])))
            .collect();
        Value::Object(map)
    }

    /// Inverse of [`AlgebraElement::to_json`]; absent elements are zero.
    pub fn from_json(algebra: &Arc<Algebra>, value: &Value) -> Result<Self> {
        let obj =
            value.as_object().ok_or_else(|| Error::MalformedSpec("algebra element must be a JSON object".into()))?;
        let mut f = Self::zero(algebra);
        for (name, v) in obj {
            let x = algebra.groupoid().index_of(name).ok_or_else(|| Error::UnknownName(name.clone()))?;
            f.coeffs[x] = parse_complex(v)?;
        }
        Ok(f)
    }
}

impl AlgebraElement<ExactComplex> {
    /// Integer-valued random coefficients in `[-bound, bound]`.
    pub fn random_exact(algebra: &Arc<Algebra>, rng: &mut impl Rng, bound: i64) -> Self {
        let coeffs = (0..algebra.len())
            .map(|_| {
                Complex::new(
                    Ratio::from_integer(rng.gen_range(-bound..=bound)),
                    Ratio::from_integer(rng.gen_range(-bound..=bound)),
                )
            })
            .collect();
        Self { algebra: algebra.clone(), coeffs }
    }
}

pub(crate) fn parse_complex(v: &Value) -> Result<Complex64> {
    let bad = || Error::MalformedSpec(format!("expected [re, im], got {v}"));
    let arr = v.as_array().ok_or_else(bad)?;
    if arr.len() != 2 {
        return Err(bad());
    }
    Ok(Complex64::new(arr[0].as_f64().ok_or_else(bad)?, arr[1].as_f64().ok_or_else(bad)?))
}
