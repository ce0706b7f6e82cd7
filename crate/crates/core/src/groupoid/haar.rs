//! Haar systems on finite groupoids.
//!
//! At finite scale a Haar system `{λ^u}` is a positive weight per element,
//! read on the range fiber containing it. Left invariance says the weight is
//! preserved by `y ↦ xy` from `G^{s(x)}` onto `G^{r(x)}`, which forces
//! `weight(y) = weight(s(y))`.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use super::{FiniteGroupoid, Subgroupoid};
use crate::error::{Error, Result};

/// Float weights compare equal within this absolute tolerance.
pub const FLOAT_WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Exact(Ratio<i64>),
    Float(f64),
}

impl Weight {
    pub fn to_f64(self) -> f64 {
        match self {
            Weight::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Weight::Float(f) => f,
        }
    }

    fn is_positive(self) -> bool {
        match self {
            Weight::Exact(r) => r > Ratio::zero(),
            Weight::Float(f) => f > 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightTable {
    Exact(Vec<Ratio<i64>>),
    Float(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarSystem {
    weights: WeightTable,
}

impl HaarSystem {
    /// Weight 1 on every element.
    pub fn counting(g: &FiniteGroupoid) -> Self {
        Self { weights: WeightTable::Exact(vec![Ratio::from_integer(1); g.len()]) }
    }

    /// Build from a weight table; every weight must be strictly positive.
    /// Invariance is not enforced here; see [`HaarSystem::check_invariance`].
    pub fn new(g: &FiniteGroupoid, weights: WeightTable) -> Result<Self> {
        let len = match &weights {
            WeightTable::Exact(w) => w.len(),
            WeightTable::Float(w) => w.len(),
        };
        if len != g.len() {
            return Err(Error::MalformedSpec(format!("Haar table has {len} weights for {} elements", g.len())));
        }
        let haar = Self { weights };
        for x in 0..len {
            if !haar.weight(x).is_positive() {
                return Err(Error::NonpositiveWeight(g.name(x).to_string()));
            }
        }
        Ok(haar)
    }

    /// The invariant system `weight(y) = density(s(y))` for a positive
    /// function on the unit space.
    pub fn from_unit_density(g: &FiniteGroupoid, density: impl Fn(usize) -> Weight) -> Result<Self> {
        let per_elem: Vec<Weight> = (0..g.len()).map(|y| density(g.source(y))).collect();
        let weights = if per_elem.iter().all(|w| matches!(w, Weight::Exact(_))) {
            WeightTable::Exact(
                per_elem
                    .iter()
                    .map(|w| match w {
                        Weight::Exact(r) => *r,
                        Weight::Float(_) => unreachable!(),
                    })
                    .collect(),
            )
        } else {
            WeightTable::Float(per_elem.iter().map(|w| w.to_f64()).collect())
        };
        Self::new(g, weights)
    }

    pub fn len(&self) -> usize {
        match &self.weights {
            WeightTable::Exact(w) => w.len(),
            WeightTable::Float(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.weights, WeightTable::Exact(_))
    }

    pub fn table(&self) -> &WeightTable {
        &self.weights
    }

    /// `λ^{r(y)}`-weight of `y`.
    pub fn weight(&self, y: usize) -> Weight {
        match &self.weights {
            WeightTable::Exact(w) => Weight::Exact(w[y]),
            WeightTable::Float(w) => Weight::Float(w[y]),
        }
    }

    pub fn weight_f64(&self, y: usize) -> f64 {
        self.weight(y).to_f64()
    }

    /// `λ_{s(y)}`-weight of `y`, i.e. the weight of `y^{-1}`.
    pub fn inverse_weight(&self, g: &FiniteGroupoid, y: usize) -> Weight {
        self.weight(g.inverse(y))
    }

    /// Multiply every weight by a positive rational.
    pub fn scaled(&self, factor: Ratio<i64>) -> Self {
        let weights = match &self.weights {
            WeightTable::Exact(w) => WeightTable::Exact(w.iter().map(|v| v * factor).collect()),
            WeightTable::Float(w) => {
                let f = factor.to_f64().unwrap();
                WeightTable::Float(w.iter().map(|v| v * f).collect())
            }
        };
        Self { weights }
    }

    /// Same weights with one element replaced.
    pub fn with_weight(&self, y: usize, value: Weight) -> Self {
        let mut out = self.clone();
        match (&mut out.weights, value) {
            (WeightTable::Exact(w), Weight::Exact(v)) => w[y] = v,
            (WeightTable::Float(w), v) => w[y] = v.to_f64(),
            (WeightTable::Exact(w), Weight::Float(v)) => {
                let mut fl: Vec<f64> = w.iter().map(|r| r.to_f64().unwrap()).collect();
                fl[y] = v;
                out.weights = WeightTable::Float(fl);
            }
        }
        out
    }

    /// Restriction to the members of a subgroupoid, indexed locally.
    pub fn restrict(&self, sub: &Subgroupoid) -> Self {
        let weights = match &self.weights {
            WeightTable::Exact(w) => WeightTable::Exact(sub.members().iter().map(|&x| w[x]).collect()),
            WeightTable::Float(w) => WeightTable::Float(sub.members().iter().map(|&x| w[x]).collect()),
        };
        Self { weights }
    }

    /// Left invariance: `weight(xy) = weight(y)` whenever `r(y) = s(x)`.
    /// Exact for rational weights, within [`FLOAT_WEIGHT_TOL`] for floats.
    pub fn check_invariance(&self, g: &FiniteGroupoid) -> bool {
        self.invariance_violation(g).is_none()
    }

    /// First `(x, y)` breaking invariance, if any.
    pub fn invariance_violation(&self, g: &FiniteGroupoid) -> Option<(usize, usize)> {
        if self.len() != g.len() {
            return Some((0, 0));
        }
        g.composable_pairs().find_map(|(x, y, xy)| {
            let ok = match (self.weight(xy), self.weight(y)) {
                (Weight::Exact(a), Weight::Exact(b)) => a == b,
                (a, b) => (a.to_f64() - b.to_f64()).abs() <= FLOAT_WEIGHT_TOL,
            };
            (!ok).then_some((x, y))
        })
    }
}
