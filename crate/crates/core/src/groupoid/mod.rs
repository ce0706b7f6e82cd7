//! Finite groupoids: validated tables, subgroupoids, fiber spaces and Haar systems.
//!
//! Elements are dense indices `0..len()`. Units are ordinary elements that are
//! their own range, source and inverse. Every table is index based so that
//! composition is a single lookup and iteration order is deterministic.

mod construct;
mod document;
mod haar;
mod subgroupoid;

pub use construct::{
    cyclic_group, disjoint_union, group_cayley, pair_groupoid, symmetric_group, transformation_groupoid,
};
pub use document::{Construction, GroupDefinition, GroupoidDocument, LoadedGroupoid, WeightSpec};
pub use haar::{HaarSystem, Weight, WeightTable, FLOAT_WEIGHT_TOL};
pub use subgroupoid::{isotropy_group, s_fiber_space, SFiberSpace, Subgroupoid};

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Unvalidated groupoid tables, as read from a definition document.
///
/// `range`, `source` and `inverse` are per element; a `None` marks a missing
/// entry. `compose` lists `(x, y, xy)` triples.
#[derive(Debug, Clone, Default)]
pub struct RawGroupoid {
    pub names: Vec<String>,
    pub units: Vec<usize>,
    pub range: Vec<Option<usize>>,
    pub source: Vec<Option<usize>>,
    pub inverse: Vec<Option<usize>>,
    pub compose: Vec<(usize, usize, usize)>,
    /// Optional human label for a unit (a point name), keyed by element index.
    pub unit_labels: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    names: Vec<String>,
    index: HashMap<String, usize>,
    range: Vec<usize>,
    source: Vec<usize>,
    inverse: Vec<usize>,
    // n * n, row x, column y
    table: Vec<Option<usize>>,
    units: Vec<usize>,
    is_unit: Vec<bool>,
    unit_labels: Vec<Option<String>>,
    range_fibers: Vec<Vec<usize>>,
    source_fibers: Vec<Vec<usize>>,
}

impl FiniteGroupoid {
    /// Validate raw tables and build a groupoid.
    ///
    /// Violations are reported with the offending element, pair or triple named.
    pub fn from_raw(raw: RawGroupoid) -> Result<Self> {
        let n = raw.names.len();
        if n == 0 {
            return Err(Error::MalformedSpec("groupoid has no elements".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, name) in raw.names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::MalformedSpec(format!("duplicate element `{name}`")));
            }
        }
        if raw.range.len() != n || raw.source.len() != n || raw.inverse.len() != n {
            return Err(Error::MalformedSpec("table lengths differ from element count".into()));
        }
        let name = |i: usize| raw.names[i].as_str();

        let mut range = Vec::with_capacity(n);
        let mut source = Vec::with_capacity(n);
        for x in 0..n {
            range.push(raw.range[x].ok_or_else(|| Error::MalformedSpec(format!("missing range of `{}`", name(x))))?);
            source.push(raw.source[x].ok_or_else(|| Error::MalformedSpec(format!("missing source of `{}`", name(x))))?);
        }
        let mut inverse = Vec::with_capacity(n);
        for x in 0..n {
            inverse.push(raw.inverse[x].ok_or_else(|| Error::AxiomViolation(format!("`{}` has no inverse", name(x))))?);
        }

        let mut is_unit = vec![false; n];
        for &u in &raw.units {
            if u >= n {
                return Err(Error::MalformedSpec(format!("unit index {u} out of range")));
            }
            if is_unit[u] {
                return Err(Error::MalformedSpec(format!("unit `{}` listed twice", name(u))));
            }
            is_unit[u] = true;
        }
        if raw.units.is_empty() {
            return Err(Error::MalformedSpec("no units listed".into()));
        }
        for &u in &raw.units {
            if range[u] != u || source[u] != u {
                return Err(Error::AxiomViolation(format!("unit `{}` is not its own range and source", name(u))));
            }
            if inverse[u] != u {
                return Err(Error::AxiomViolation(format!("unit `{}` is not self-inverse", name(u))));
            }
        }
        for x in 0..n {
            if !is_unit[range[x]] {
                return Err(Error::AxiomViolation(format!("range of `{}` is not a unit", name(x))));
            }
            if !is_unit[source[x]] {
                return Err(Error::AxiomViolation(format!("source of `{}` is not a unit", name(x))));
            }
            let xi = inverse[x];
            if xi >= n {
                return Err(Error::MalformedSpec(format!("inverse of `{}` out of range", name(x))));
            }
            if range[xi] != source[x] || source[xi] != range[x] {
                return Err(Error::AxiomViolation(format!("r/s of inverse of `{}` do not swap", name(x))));
            }
            if inverse[xi] != x {
                return Err(Error::AxiomViolation(format!("inverse of inverse of `{}` differs", name(x))));
            }
        }

        let mut table: Vec<Option<usize>> = vec![None; n * n];
        for &(x, y, z) in &raw.compose {
            if x >= n || y >= n || z >= n {
                return Err(Error::MalformedSpec("composition triple index out of range".into()));
            }
            if source[x] != range[y] {
                return Err(Error::AxiomViolation(format!(
                    "`{}`·`{}` given but the pair is not composable",
                    name(x),
                    name(y)
                )));
            }
            match table[x * n + y] {
                Some(prev) if prev != z => {
                    return Err(Error::AxiomViolation(format!(
                        "`{}`·`{}` given twice with different values",
                        name(x),
                        name(y)
                    )))
                }
                _ => table[x * n + y] = Some(z),
            }
        }
        for x in 0..n {
            for y in 0..n {
                let composable = source[x] == range[y];
                match table[x * n + y] {
                    None if composable => {
                        return Err(Error::AxiomViolation(format!(
                            "composable pair (`{}`, `{}`) has no product",
                            name(x),
                            name(y)
                        )))
                    }
                    Some(z) if range[z] != range[x] || source[z] != source[y] => {
                        return Err(Error::AxiomViolation(format!(
                            "r/s of `{}`·`{}` = `{}` are wrong",
                            name(x),
                            name(y),
                            name(z)
                        )))
                    }
                    _ => {}
                }
            }
        }
        for x in 0..n {
            if table[range[x] * n + x] != Some(x) || table[x * n + source[x]] != Some(x) {
                return Err(Error::AxiomViolation(format!("units do not act trivially on `{}`", name(x))));
            }
            let xi = inverse[x];
            if table[x * n + xi] != Some(range[x]) || table[xi * n + x] != Some(source[x]) {
                return Err(Error::AxiomViolation(format!("`{}` times its inverse is not a unit", name(x))));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let Some(xy) = table[x * n + y] else { continue };
                for z in 0..n {
                    let Some(yz) = table[y * n + z] else { continue };
                    let left = table[xy * n + z];
                    let right = table[x * n + yz];
                    if left != right {
                        return Err(Error::AxiomViolation(format!(
                            "associativity fails on (`{}`, `{}`, `{}`)",
                            name(x),
                            name(y),
                            name(z)
                        )));
                    }
                }
            }
        }

        let mut unit_labels = vec![None; n];
        for (u, label) in raw.unit_labels {
            if u < n && is_unit[u] {
                unit_labels[u] = Some(label);
            }
        }
        let mut range_fibers = vec![Vec::new(); n];
        let mut source_fibers = vec![Vec::new(); n];
        for x in 0..n {
            range_fibers[range[x]].push(x);
            source_fibers[source[x]].push(x);
        }
        let mut units = raw.units;
        units.sort_unstable();
        Ok(Self {
            names: raw.names,
            index,
            range,
            source,
            inverse,
            table,
            units,
            is_unit,
            unit_labels,
            range_fibers,
            source_fibers,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn range(&self, x: usize) -> usize {
        self.range[x]
    }

    pub fn source(&self, x: usize) -> usize {
        self.source[x]
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    /// `Some(xy)` when `s(x) = r(y)`.
    pub fn compose(&self, x: usize, y: usize) -> Option<usize> {
        self.table[x * self.len() + y]
    }

    /// Unit indices in increasing order.
    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn is_unit(&self, x: usize) -> bool {
        self.is_unit[x]
    }

    /// `G^u`: elements with range `u`. Empty unless `u` is a unit.
    pub fn range_fiber(&self, u: usize) -> &[usize] {
        &self.range_fibers[u]
    }

    /// `G_u`: elements with source `u`.
    pub fn source_fiber(&self, u: usize) -> &[usize] {
        &self.source_fibers[u]
    }

    pub fn unit_label(&self, u: usize) -> Option<&str> {
        self.unit_labels[u].as_deref()
    }

    /// Label if one was given, else the element name.
    pub fn unit_display(&self, u: usize) -> &str {
        self.unit_label(u).unwrap_or(&self.names[u])
    }

    /// Look a unit up by element name or by its point label.
    pub fn resolve_unit(&self, key: &str) -> Result<usize> {
        if let Some(x) = self.index_of(key) {
            return if self.is_unit[x] { Ok(x) } else { Err(Error::NotAUnit(key.to_string())) };
        }
        self.units
            .iter()
            .copied()
            .find(|&u| self.unit_labels[u].as_deref() == Some(key))
            .ok_or_else(|| Error::NotAUnit(key.to_string()))
    }

    pub fn is_group(&self) -> bool {
        self.units.len() == 1
    }

    /// All `(x, y, xy)` with `s(x) = r(y)`.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |x| {
            self.range_fiber(self.source(x)).iter().map(move |&y| (x, y, self.table[x * n + y].expect("validated")))
        })
    }

    /// Export the tables back into raw form (triples in row-major order).
    pub fn to_raw(&self) -> RawGroupoid {
        RawGroupoid {
            names: self.names.clone(),
            units: self.units.clone(),
            range: self.range.iter().map(|&u| Some(u)).collect(),
            source: self.source.iter().map(|&u| Some(u)).collect(),
            inverse: self.inverse.iter().map(|&u| Some(u)).collect(),
            compose: self.composable_pairs().collect(),
            unit_labels: self.units.iter().filter_map(|&u| self.unit_labels[u].clone().map(|l| (u, l))).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_raw() -> RawGroupoid {
        RawGroupoid {
            names: vec!["e".into(), "g".into()],
            units: vec![0],
            range: vec![Some(0), Some(0)],
            source: vec![Some(0), Some(0)],
            inverse: vec![Some(0), Some(1)],
            compose: vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
            unit_labels: vec![],
        }
    }

    #[test]
    fn z2_validates() {
        let g = FiniteGroupoid::from_raw(z2_raw()).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.units(), &[0]);
        assert!(g.is_group());
        assert_eq!(g.compose(1, 1), Some(0));
    }

    #[test]
    fn missing_inverse_names_element() {
        let mut raw = z2_raw();
        raw.inverse[1] = None;
        let err = FiniteGroupoid::from_raw(raw).unwrap_err();
        assert!(matches!(&err, Error::AxiomViolation(m) if m.contains("`g`")), "{err}");
    }

    #[test]
    fn missing_range_is_malformed() {
        let mut raw = z2_raw();
        raw.range[1] = None;
        assert!(matches!(FiniteGroupoid::from_raw(raw), Err(Error::MalformedSpec(_))));
    }

    #[test]
    fn broken_associativity_names_triple() {
        // Z/3 table with one product altered keeps r/s/unit/inverse laws but
        // breaks associativity.
        let names: Vec<String> = ["0", "1", "2"].iter().map(|s| s.to_string()).collect();
        let mut compose = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                compose.push((a, b, (a + b) % 3));
            }
        }
        // 1·1 = 0 instead of 2; inverse of 1 is still 2 with 1·2 = 0
        compose.retain(|&(a, b, _)| !(a == 1 && b == 1));
        compose.push((1, 1, 1));
        let raw = RawGroupoid {
            names,
            units: vec![0],
            range: vec![Some(0); 3],
            source: vec![Some(0); 3],
            inverse: vec![Some(0), Some(2), Some(1)],
            compose,
            unit_labels: vec![],
        };
        let err = FiniteGroupoid::from_raw(raw).unwrap_err();
        assert!(matches!(&err, Error::AxiomViolation(m) if m.contains("associativity")), "{err}");
    }

    #[test]
    fn missing_product_is_violation() {
        let mut raw = z2_raw();
        raw.compose.pop();
        assert!(matches!(FiniteGroupoid::from_raw(raw), Err(Error::AxiomViolation(_))));
    }

    #[test]
    fn resolve_unit_rejects_non_units() {
        let g = FiniteGroupoid::from_raw(z2_raw()).unwrap();
        assert_eq!(g.resolve_unit("e").unwrap(), 0);
        assert!(matches!(g.resolve_unit("g"), Err(Error::NotAUnit(_))));
        assert!(matches!(g.resolve_unit("zz"), Err(Error::NotAUnit(_))));
    }
}
