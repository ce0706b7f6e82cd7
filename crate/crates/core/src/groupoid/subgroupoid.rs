use std::sync::Arc;

use super::{FiniteGroupoid, RawGroupoid};
use crate::error::{Error, Result};

/// A subset of a groupoid closed under composition and inversion.
///
/// The members are also materialized as a standalone [`FiniteGroupoid`]
/// (`local()`), indexed in the parent's order and carrying the same names.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgroupoid {
    parent: Arc<FiniteGroupoid>,
    members: Vec<usize>,
    local_of: Vec<Option<usize>>,
    local: Arc<FiniteGroupoid>,
}

impl Subgroupoid {
    pub fn new(parent: Arc<FiniteGroupoid>, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let n = parent.len();
        let mut mask = vec![false; n];
        for x in members {
            if x >= n {
                return Err(Error::MalformedSpec(format!("member index {x} out of range")));
            }
            mask[x] = true;
        }
        let members: Vec<usize> = (0..n).filter(|&x| mask[x]).collect();
        if members.is_empty() {
            return Err(Error::AxiomViolation("subgroupoid is empty".into()));
        }
        for &x in &members {
            if !mask[parent.inverse(x)] {
                return Err(Error::AxiomViolation(format!(
                    "subgroupoid not closed under inverse at `{}`",
                    parent.name(x)
                )));
            }
            for &y in parent.range_fiber(parent.source(x)) {
                if mask[y] && !mask[parent.compose(x, y).unwrap()] {
                    return Err(Error::AxiomViolation(format!(
                        "subgroupoid not closed under `{}`·`{}`",
                        parent.name(x),
                        parent.name(y)
                    )));
                }
            }
        }
        let mut local_of = vec![None; n];
        for (i, &x) in members.iter().enumerate() {
            local_of[x] = Some(i);
        }
        let loc = |x: usize| local_of[x].expect("closed");
        let raw = RawGroupoid {
            names: members.iter().map(|&x| parent.name(x).to_string()).collect(),
            units: members.iter().copied().filter(|&x| parent.is_unit(x)).map(loc).collect(),
            range: members.iter().map(|&x| Some(loc(parent.range(x)))).collect(),
            source: members.iter().map(|&x| Some(loc(parent.source(x)))).collect(),
            inverse: members.iter().map(|&x| Some(loc(parent.inverse(x)))).collect(),
            compose: members
                .iter()
                .flat_map(|&x| parent.range_fiber(parent.source(x)).iter().filter(|&&y| mask[y]).map(move |&y| (x, y)))
                .map(|(x, y)| (loc(x), loc(y), loc(parent.compose(x, y).unwrap())))
                .collect(),
            unit_labels: members
                .iter()
                .filter_map(|&x| parent.unit_label(x).map(|l| (loc(x), l.to_string())))
                .collect(),
        };
        let local = Arc::new(FiniteGroupoid::from_raw(raw)?);
        Ok(Self { parent, members, local_of, local })
    }

    /// `H = G`.
    pub fn full(parent: Arc<FiniteGroupoid>) -> Self {
        let n = parent.len();
        Self::new(parent, 0..n).expect("whole groupoid is closed")
    }

    /// The unit space `G^(0)` as a subgroupoid.
    pub fn unit_space(parent: Arc<FiniteGroupoid>) -> Self {
        let units = parent.units().to_vec();
        Self::new(parent, units).expect("unit space is closed")
    }

    /// Union of all stability groups, `{x : r(x) = s(x)}`.
    pub fn isotropy_bundle(parent: Arc<FiniteGroupoid>) -> Self {
        let members: Vec<usize> = (0..parent.len()).filter(|&x| parent.range(x) == parent.source(x)).collect();
        Self::new(parent, members).expect("isotropy bundle is closed")
    }

    pub fn parent(&self) -> &Arc<FiniteGroupoid> {
        &self.parent
    }

    /// Member indices in the parent, increasing.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn local(&self) -> &Arc<FiniteGroupoid> {
        &self.local
    }

    pub fn contains(&self, x: usize) -> bool {
        self.local_of.get(x).is_some_and(Option::is_some)
    }

    pub fn local_index(&self, x: usize) -> Option<usize> {
        self.local_of.get(x).copied().flatten()
    }

    pub fn parent_index(&self, local: usize) -> usize {
        self.members[local]
    }

    /// `H^(0)` as parent indices.
    pub fn unit_space_in_parent(&self) -> Vec<usize> {
        self.local.units().iter().map(|&u| self.members[u]).collect()
    }

    pub fn is_subset_of(&self, other: &Subgroupoid) -> bool {
        self.parent == other.parent && self.members.iter().all(|&x| other.contains(x))
    }

    /// This subgroupoid viewed inside `outer.local()`.
    pub fn within(&self, outer: &Subgroupoid) -> Result<Subgroupoid> {
        if !self.is_subset_of(outer) {
            return Err(Error::ChainViolation("inner subgroupoid is not contained in outer".into()));
        }
        let members: Vec<usize> = self.members.iter().map(|&x| outer.local_index(x).unwrap()).collect();
        Subgroupoid::new(outer.local.clone(), members)
    }

    /// True when this is `G(u)` for some unit `u`; returns `u`.
    pub fn stability_unit(&self) -> Option<usize> {
        let units = self.unit_space_in_parent();
        if units.len() != 1 {
            return None;
        }
        let u = units[0];
        let expected =
            (0..self.parent.len()).filter(|&x| self.parent.range(x) == u && self.parent.source(x) == u).count();
        (expected == self.members.len()).then_some(u)
    }
}

/// The stability group `G(u) = {x : s(x) = r(x) = u}`.
pub fn isotropy_group(g: &Arc<FiniteGroupoid>, u: usize) -> Result<Subgroupoid> {
    if u >= g.len() || !g.is_unit(u) {
        let name = if u < g.len() { g.name(u).to_string() } else { u.to_string() };
        return Err(Error::NotAUnit(name));
    }
    let members: Vec<usize> = g.source_fiber(u).iter().copied().filter(|&x| g.range(x) == u).collect();
    Subgroupoid::new(g.clone(), members)
}

/// `G_sH = s^{-1}(H^(0))`, a free right `H`-space.
#[derive(Debug, Clone, PartialEq)]
pub struct SFiberSpace {
    carrier: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl SFiberSpace {
    /// Carrier elements (parent indices), increasing.
    pub fn carrier(&self) -> &[usize] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    /// Position of a parent element in the carrier.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.position.get(x).copied().flatten()
    }
}

/// Build `G_sH` and verify the right `H`-action is free and preserves it.
pub fn s_fiber_space(g: &FiniteGroupoid, h: &Subgroupoid) -> Result<SFiberSpace> {
    let mut in_h0 = vec![false; g.len()];
    for u in h.unit_space_in_parent() {
        in_h0[u] = true;
    }
    let carrier: Vec<usize> = (0..g.len()).filter(|&x| in_h0[g.source(x)]).collect();
    let mut position = vec![None; g.len()];
    for (i, &x) in carrier.iter().enumerate() {
        position[x] = Some(i);
    }
    for &x in &carrier {
        for &k in g.range_fiber(g.source(x)) {
            if !h.contains(k) {
                continue;
            }
            let xk = g.compose(x, k).unwrap();
            if position[xk].is_none() {
                return Err(Error::AxiomViolation(format!("`{}`·`{}` leaves G_sH", g.name(x), g.name(k))));
            }
            if xk == x && !g.is_unit(k) {
                return Err(Error::AxiomViolation(format!(
                    "right action not free: `{}` fixes `{}`",
                    g.name(k),
                    g.name(x)
                )));
            }
        }
    }
    Ok(SFiberSpace { carrier, position })
}
