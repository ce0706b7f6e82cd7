use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde_json::{json, Value};

use super::{parse_complex, Algebra, AlgebraElement};
use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, op_norm, CMatrix, ZERO};

/// Absolute slack for the *-homomorphism identities, scaled by operator size.
pub const REP_TOL: f64 = 1e-9;

/// A finite-dimensional representation of `C_c(G)`, given by the images of
/// the basis deltas. The linear extension is `L(f) = Σ f(x) L(δ_x)`.
#[derive(Debug, Clone)]
pub struct Representation {
    algebra: Arc<Algebra>,
    dim: usize,
    ops: Vec<CMatrix>,
    report: OnceLock<RepReport>,
}

/// Outcome of checking the *-representation identities.
#[derive(Debug, Clone, PartialEq)]
pub struct RepReport {
    /// `max ‖L(δ_x)L(δ_y) − L(δ_x * δ_y)‖` over all pairs.
    pub multiplicative_residual: f64,
    /// `max ‖L(δ_x)ᴴ − L(δ_{x⁻¹})‖`.
    pub adjoint_residual: f64,
    /// Rank of `Σ_u L(δ_u)` over units.
    pub unit_rank: usize,
    pub violations: Vec<String>,
}

impl RepReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Representation {
    pub fn new(algebra: Arc<Algebra>, dim: usize, ops: Vec<CMatrix>) -> Result<Self> {
        if ops.len() != algebra.len() {
            return Err(Error::InvalidRep(format!(
                "operator table has {} entries for {} elements",
                ops.len(),
                algebra.len()
            )));
        }
        if let Some(x) = ops.iter().position(|m| m.shape() != (dim, dim)) {
            return Err(Error::InvalidRep(format!("operator of `{}` is not {dim}x{dim}", algebra.groupoid().name(x))));
        }
        Ok(Self { algebra, dim, ops, report: OnceLock::new() })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn op(&self, x: usize) -> &CMatrix {
        &self.ops[x]
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// Check the *-homomorphism identities and nondegeneracy. Cached.
    pub fn validate(&self) -> &RepReport {
        self.report.get_or_init(|| self.compute_report())
    }

    fn compute_report(&self) -> RepReport {
        let g = self.algebra.groupoid();
        let haar = self.algebra.haar();
        let scale = 1.0 + self.ops.iter().map(max_abs).fold(0.0, f64::max).powi(2);
        let tol = REP_TOL * scale * (self.dim.max(1) as f64);
        let mut violations = Vec::new();
        if self.dim == 0 {
            violations.push("zero-dimensional carrier".to_string());
        }
        let mut mult = 0.0f64;
        let mut worst_pair = None;
        for x in 0..g.len() {
            for y in 0..g.len() {
                let lhs = &self.ops[x] * &self.ops[y];
                let res = match g.compose(x, y) {
                    Some(xy) => max_abs(&(lhs - &self.ops[xy] * linalg::c(haar.weight_f64(x)))),
                    None => max_abs(&lhs),
                };
                if res > mult {
                    mult = res;
                    worst_pair = Some((x, y));
                }
            }
        }
        if mult > tol {
            let (x, y) = worst_pair.unwrap();
            violations.push(format!(
                "L(δ_{})L(δ_{}) differs from L(δ_{} * δ_{}) by {mult:e}",
                g.name(x),
                g.name(y),
                g.name(x),
                g.name(y)
            ));
        }
        let mut adj = 0.0f64;
        for x in 0..g.len() {
            let res = max_abs(&(self.ops[x].adjoint() - &self.ops[g.inverse(x)]));
            if res > tol {
                violations.push(format!("L(δ_{})ᴴ != L(δ_{}⁻¹) (residual {res:e})", g.name(x), g.name(x)));
            }
            adj = adj.max(res);
        }
        let mut unit_sum = CMatrix::zeros(self.dim, self.dim);
        for &u in g.units() {
            unit_sum += &self.ops[u];
        }
        let unit_rank = if self.dim == 0 {
            0
        } else {
            let sv = unit_sum.singular_values();
            let top = sv.iter().copied().fold(0.0, f64::max);
            sv.iter().filter(|&&s| top > 0.0 && s > 1e-9 * top).count()
        };
        if self.dim > 0 && unit_rank < self.dim {
            violations.push(format!("degenerate: units span rank {unit_rank} of {}", self.dim));
        }
        RepReport { multiplicative_residual: mult, adjoint_residual: adj, unit_rank, violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidRep(report.violations.join("; ")))
        }
    }

    /// `L(f) = Σ f(x) L(δ_x)`; fails if the representation does not validate.
    pub fn apply(&self, f: &AlgebraElement) -> Result<CMatrix> {
        if !Algebra::same(&self.algebra, f.algebra()) {
            return Err(Error::BaseMismatch);
        }
        self.ensure_valid()?;
        Ok(self.apply_unchecked(f))
    }

    pub(crate) fn apply_unchecked(&self, f: &AlgebraElement) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (x, coeff) in f.coeffs().iter().enumerate() {
            if *coeff != ZERO {
                out += &self.ops[x] * *coeff;
            }
        }
        out
    }

    /// `tr L(δ_x)` for every element.
    pub fn character(&self) -> Vec<Complex64> {
        self.ops.iter().map(|m| m.trace()).collect()
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if !Algebra::same(&self.algebra, &other.algebra) {
            return Err(Error::BaseMismatch);
        }
        let ops = self.ops.iter().zip(&other.ops).map(|(a, b)| linalg::direct_sum(a, b)).collect();
        Self::new(self.algebra.clone(), self.dim + other.dim, ops)
    }

    /// Compression `Pᴴ L(δ_x) P` to the span of the orthonormal columns of `P`.
    pub fn compress(&self, basis: &CMatrix) -> Result<Self> {
        let ops = self.ops.iter().map(|a| basis.adjoint() * a * basis).collect();
        Self::new(self.algebra.clone(), basis.ncols(), ops)
    }

    /// Conjugate by a unitary: `U L(δ_x) Uᴴ`.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Result<Self> {
        let ops = self.ops.iter().map(|a| unitary * a * unitary.adjoint()).collect();
        Self::new(self.algebra.clone(), unitary.nrows(), ops)
    }

    /// `{"dimension": d, "operators": [{"element", "matrix"}]}`, matrices
    /// row-major as `[re, im]` pairs.
    pub fn to_json(&self) -> Value {
        let g = self.algebra.groupoid();
        let ops: Vec<Value> = self
            .ops
            .iter()
            .enumerate()
            .map(|(x, m)| json!({"element": g.name(x), "matrix": matrix_to_json(m)}))
            .collect();
        json!({"dimension": self.dim, "operators": ops})
    }

    pub fn from_json(algebra: &Arc<Algebra>, value: &Value) -> Result<Self> {
        let bad = |m: &str| Error::MalformedSpec(format!("representation: {m}"));
        let dim = value.get("dimension").and_then(Value::as_u64).ok_or_else(|| bad("missing `dimension`"))? as usize;
        let entries = value.get("operators").and_then(Value::as_array).ok_or_else(|| bad("missing `operators`"))?;
        let mut ops: Vec<Option<CMatrix>> = vec![None; algebra.len()];
        for entry in entries {
            let name = entry.get("element").and_then(Value::as_str).ok_or_else(|| bad("operator without `element`"))?;
            let x = algebra.groupoid().index_of(name).ok_or_else(|| Error::UnknownName(name.to_string()))?;
            ops[x] = Some(matrix_from_json(entry.get("matrix").ok_or_else(|| bad("operator without `matrix`"))?, dim)?);
        }
        let ops = ops
            .into_iter()
            .enumerate()
            .map(|(x, m)| m.ok_or_else(|| bad(&format!("no operator for `{}`", algebra.groupoid().name(x)))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(algebra.clone(), dim, ops)
    }
}

pub(crate) fn matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect()))
            .collect(),
    )
}

pub(crate) fn matrix_from_json(v: &Value, dim: usize) -> Result<CMatrix> {
    let bad = || Error::MalformedSpec(format!("expected a {dim}x{dim} matrix of [re, im] pairs"));
    let rows = v.as_array().ok_or_else(bad)?;
    if rows.len() != dim {
        return Err(bad());
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(bad)?;
        if row.len() != dim {
            return Err(bad());
        }
        for (c, z) in row.iter().enumerate() {
            m[(r, c)] = parse_complex(z)?;
        }
    }
    Ok(m)
}

/// The regular representation on `ℓ²(G_u, λ_u)`, written in the orthonormal
/// basis `δ_x / √λ(x⁻¹)` of the source fiber `G_u` (in index order).
pub fn regular_representation(algebra: &Arc<Algebra>, u: usize) -> Result<Representation> {
    let g = algebra.groupoid();
    if u >= g.len() || !g.is_unit(u) {
        return Err(Error::NotAUnit(if u < g.len() { g.name(u).to_string() } else { u.to_string() }));
    }
    let haar = algebra.haar();
    let fiber = g.source_fiber(u);
    let pos = |x: usize| fiber.iter().position(|&y| y == x);
    let mass: Vec<f64> = fiber.iter().map(|&x| haar.weight_f64(g.inverse(x))).collect();
    let d = fiber.len();
    let ops = (0..g.len())
        .map(|z| {
            let mut m = CMatrix::zeros(d, d);
            for (j, &x) in fiber.iter().enumerate() {
                if let Some(zx) = g.compose(z, x) {
                    let i = pos(zx).expect("zx stays in G_u");
                    m[(i, j)] = linalg::c(haar.weight_f64(z) * (mass[i] / mass[j]).sqrt());
                }
            }
            m
        })
        .collect();
    Representation::new(algebra.clone(), d, ops)
}

/// `max_u ‖λ_u(f)‖` over the regular representations at every unit.
pub fn cstar_norm(f: &AlgebraElement) -> f64 {
    let alg = f.algebra();
    alg.groupoid()
        .units()
        .iter()
        .map(|&u| op_norm(&regular_representation(alg, u).expect("unit").apply_unchecked(f)))
        .fold(0.0, f64::max)
}

/// `max_x |χ_a(x) − χ_b(x)|`.
pub fn character_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
