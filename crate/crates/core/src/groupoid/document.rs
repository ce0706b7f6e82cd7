//! JSON groupoid definition documents.
//!
//! A document either spells the tables out (`elements`, `units`, `r`, `s`,
//! `inv`, `compose`) or names a `construction`. Optional blocks: `haar`
//! (per-element weights, integers or `"p/q"` strings for exact weights,
//! JSON floats otherwise), `subgroupoids` (named member lists) and
//! `unit_labels`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    group_cayley, pair_groupoid, transformation_groupoid, FiniteGroupoid, HaarSystem, RawGroupoid, Subgroupoid,
    WeightTable,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inv: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compose: Option<Vec<[String; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_labels: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<BTreeMap<String, WeightSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroupoids: Option<BTreeMap<String, Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Construction {
    GroupCayley {
        elements: Vec<String>,
        table: Vec<Vec<String>>,
    },
    Pair {
        points: Vec<String>,
    },
    Transformation {
        group: GroupDefinition,
        points: Vec<String>,
        /// `[g, x, g·x]` triples.
        action: Vec<[String; 3]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDefinition {
    pub elements: Vec<String>,
    pub table: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Integer(i64),
    Float(f64),
    Text(String),
}

/// A built document: validated groupoid, Haar system and named subgroupoids.
#[derive(Debug, Clone)]
pub struct LoadedGroupoid {
    pub name: String,
    pub groupoid: Arc<FiniteGroupoid>,
    pub haar: HaarSystem,
    pub haar_given: bool,
    pub named: BTreeMap<String, Subgroupoid>,
}

fn lookup(names: &BTreeMap<&str, usize>, key: &str, what: &str) -> Result<usize> {
    names.get(key).copied().ok_or_else(|| Error::MalformedSpec(format!("{what} refers to unknown element `{key}`")))
}

impl GroupDefinition {
    fn build(&self) -> Result<FiniteGroupoid> {
        let index: BTreeMap<&str, usize> = self.elements.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let table = self
            .table
            .iter()
            .map(|row| row.iter().map(|c| lookup(&index, c, "Cayley table")).collect())
            .collect::<Result<Vec<Vec<usize>>>>()?;
        group_cayley(&self.elements, &table)
    }

    pub fn from_group(g: &FiniteGroupoid) -> Self {
        let n = g.len();
        Self {
            elements: g.names().to_vec(),
            table: (0..n).map(|a| (0..n).map(|b| g.name(g.compose(a, b).unwrap()).to_string()).collect()).collect(),
        }
    }
}

impl GroupoidDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Indented JSON with arrays of scalars kept on one line.
    pub fn to_json_pretty(&self) -> String {
        let value = serde_json::to_value(self).expect("document serializes");
        let mut out = String::new();
        write_compact(&value, 0, &mut out);
        out
    }

    /// Explicit-table document for an existing groupoid.
    pub fn explicit(name: &str, g: &FiniteGroupoid) -> Self {
        let n = g.len();
        let map = |f: &dyn Fn(usize) -> usize| -> BTreeMap<String, String> {
            (0..n).map(|x| (g.name(x).to_string(), g.name(f(x)).to_string())).collect()
        };
        let labels: BTreeMap<String, String> =
            g.units().iter().filter_map(|&u| g.unit_label(u).map(|l| (g.name(u).to_string(), l.to_string()))).collect();
        Self {
            name: Some(name.to_string()),
            description: None,
            elements: Some(g.names().to_vec()),
            units: Some(g.units().iter().map(|&u| g.name(u).to_string()).collect()),
            r: Some(map(&|x| g.range(x))),
            s: Some(map(&|x| g.source(x))),
            inv: Some(map(&|x| g.inverse(x))),
            compose: Some(
                g.composable_pairs()
                    .map(|(x, y, z)| [g.name(x).to_string(), g.name(y).to_string(), g.name(z).to_string()])
                    .collect(),
            ),
            unit_labels: (!labels.is_empty()).then_some(labels),
            construction: None,
            haar: None,
            subgroupoids: None,
        }
    }

    /// Document naming a construction.
    pub fn constructed(name: &str, construction: Construction) -> Self {
        Self {
            name: Some(name.to_string()),
            description: None,
            elements: None,
            units: None,
            r: None,
            s: None,
            inv: None,
            compose: None,
            unit_labels: None,
            construction: Some(construction),
            haar: None,
            subgroupoids: None,
        }
    }

    fn has_explicit_tables(&self) -> bool {
        self.elements.is_some()
            || self.units.is_some()
            || self.r.is_some()
            || self.s.is_some()
            || self.inv.is_some()
            || self.compose.is_some()
    }

    /// Validate the groupoid tables only.
    pub fn build_groupoid(&self) -> Result<FiniteGroupoid> {
        match &self.construction {
            Some(c) => {
                if self.has_explicit_tables() {
                    return Err(Error::MalformedSpec("give either explicit tables or a construction, not both".into()));
                }
                let g = build_construction(c)?;
                apply_labels(g, self.unit_labels.as_ref())
            }
            None => self.build_explicit(),
        }
    }

    fn build_explicit(&self) -> Result<FiniteGroupoid> {
        let missing = |k: &str| Error::MalformedSpec(format!("missing key `{k}`"));
        let elements = self.elements.as_ref().ok_or_else(|| missing("elements"))?;
        let units = self.units.as_ref().ok_or_else(|| missing("units"))?;
        let r = self.r.as_ref().ok_or_else(|| missing("r"))?;
        let s = self.s.as_ref().ok_or_else(|| missing("s"))?;
        let inv = self.inv.as_ref().ok_or_else(|| missing("inv"))?;
        let compose = self.compose.as_ref().ok_or_else(|| missing("compose (or construction)"))?;
        let index: BTreeMap<&str, usize> = elements.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let per_elem = |m: &BTreeMap<String, String>, what: &str| -> Result<Vec<Option<usize>>> {
            for k in m.keys() {
                lookup(&index, k, what)?;
            }
            elements.iter().map(|e| m.get(e).map(|v| lookup(&index, v, what)).transpose()).collect()
        };
        let raw = RawGroupoid {
            names: elements.clone(),
            units: units.iter().map(|u| lookup(&index, u, "units")).collect::<Result<_>>()?,
            range: per_elem(r, "r")?,
            source: per_elem(s, "s")?,
            inverse: per_elem(inv, "inv")?,
            compose: compose
                .iter()
                .map(|[a, b, c]| {
                    Ok((lookup(&index, a, "compose")?, lookup(&index, b, "compose")?, lookup(&index, c, "compose")?))
                })
                .collect::<Result<_>>()?,
            unit_labels: match &self.unit_labels {
                Some(l) => l
                    .iter()
                    .map(|(u, lab)| Ok((lookup(&index, u, "unit_labels")?, lab.clone())))
                    .collect::<Result<_>>()?,
                None => vec![],
            },
        };
        FiniteGroupoid::from_raw(raw)
    }

    /// Build everything: groupoid, Haar system (counting if absent; must be
    /// positive and left invariant) and named subgroupoids.
    pub fn build(&self) -> Result<LoadedGroupoid> {
        let groupoid = Arc::new(self.build_groupoid()?);
        let haar = match &self.haar {
            Some(block) => parse_haar(&groupoid, block)?,
            None => HaarSystem::counting(&groupoid),
        };
        if let Some((x, y)) = haar.invariance_violation(&groupoid) {
            return Err(Error::NotInvariant(format!(
                "weight(`{}`·`{}`) != weight(`{}`)",
                groupoid.name(x),
                groupoid.name(y),
                groupoid.name(y)
            )));
        }
        let mut named = BTreeMap::new();
        if let Some(subs) = &self.subgroupoids {
            for (name, members) in subs {
                let idx = members
                    .iter()
                    .map(|m| {
                        groupoid
                            .index_of(m)
                            .ok_or_else(|| Error::MalformedSpec(format!("subgroupoid `{name}` lists unknown `{m}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                named.insert(name.clone(), Subgroupoid::new(groupoid.clone(), idx)?);
            }
        }
        Ok(LoadedGroupoid {
            name: self.name.clone().unwrap_or_else(|| "unnamed".into()),
            groupoid,
            haar,
            haar_given: self.haar.is_some(),
            named,
        })
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_compact(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(items) if items.iter().all(is_scalar) => {
            let inner: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&inner.join(", "));
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_compact(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_compact(item, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn build_construction(c: &Construction) -> Result<FiniteGroupoid> {
    match c {
        Construction::GroupCayley { elements, table } => {
            GroupDefinition { elements: elements.clone(), table: table.clone() }.build()
        }
        Construction::Pair { points } => pair_groupoid(points),
        Construction::Transformation { group, points, action } => {
            let grp = group.build()?;
            let pidx: BTreeMap<&str, usize> = points.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
            let m = points.len();
            let mut table = vec![None; grp.len() * m];
            for [g, x, y] in action {
                let gi = grp
                    .index_of(g)
                    .ok_or_else(|| Error::MalformedSpec(format!("action refers to unknown group element `{g}`")))?;
                let xi = lookup(&pidx, x, "action")?;
                let yi = lookup(&pidx, y, "action")?;
                if table[gi * m + xi].replace(yi).is_some_and(|old| old != yi) {
                    return Err(Error::NotAnAction(format!("`{g}`·`{x}` given twice")));
                }
            }
            if let Some(k) = table.iter().position(Option::is_none) {
                return Err(Error::NotAnAction(format!("`{}`·`{}` is undefined", grp.name(k / m), points[k % m])));
            }
            transformation_groupoid(&grp, points, |g, x| table[g * m + x].unwrap())
        }
    }
}

fn apply_labels(g: FiniteGroupoid, labels: Option<&BTreeMap<String, String>>) -> Result<FiniteGroupoid> {
    let Some(labels) = labels else { return Ok(g) };
    let mut raw = g.to_raw();
    for (u, label) in labels {
        let i = g.index_of(u).ok_or_else(|| Error::MalformedSpec(format!("unit_labels refers to unknown `{u}`")))?;
        raw.unit_labels.retain(|(k, _)| *k != i);
        raw.unit_labels.push((i, label.clone()));
    }
    FiniteGroupoid::from_raw(raw)
}

fn parse_weight(name: &str, w: &WeightSpec) -> Result<WeightValue> {
    match w {
        WeightSpec::Integer(i) => Ok(WeightValue::Exact(Ratio::from_integer(*i))),
        WeightSpec::Float(f) => Ok(WeightValue::Float(*f)),
        WeightSpec::Text(t) => {
            let bad = || Error::MalformedSpec(format!("weight of `{name}` is not a rational: `{t}`"));
            let (num, den) = match t.split_once('/') {
                Some((a, b)) => {
                    (a.trim().parse::<i64>().map_err(|_| bad())?, b.trim().parse::<i64>().map_err(|_| bad())?)
                }
                None => (t.trim().parse::<i64>().map_err(|_| bad())?, 1),
            };
            if den == 0 {
                return Err(bad());
            }
            Ok(WeightValue::Exact(Ratio::new(num, den)))
        }
    }
}

enum WeightValue {
    Exact(Ratio<i64>),
    Float(f64),
}

fn parse_haar(g: &FiniteGroupoid, block: &BTreeMap<String, WeightSpec>) -> Result<HaarSystem> {
    for k in block.keys() {
        if g.index_of(k).is_none() {
            return Err(Error::MalformedSpec(format!("haar refers to unknown element `{k}`")));
        }
    }
    let values = g
        .names()
        .iter()
        .map(|n| {
            let spec = block.get(n).ok_or_else(|| Error::MalformedSpec(format!("haar has no weight for `{n}`")))?;
            parse_weight(n, spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let table = if values.iter().all(|v| matches!(v, WeightValue::Exact(_))) {
        WeightTable::Exact(
            values
                .iter()
                .map(|v| match v {
                    WeightValue::Exact(r) => *r,
                    WeightValue::Float(_) => unreachable!(),
                })
                .collect(),
        )
    } else {
        WeightTable::Float(
            values
                .iter()
                .map(|v| match v {
                    WeightValue::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
                    WeightValue::Float(f) => *f,
                })
                .collect(),
        )
    };
    HaarSystem::new(g, table)
}

impl LoadedGroupoid {
    /// Resolve a subgroupoid by name. Besides the document's own blocks:
    /// `full` (or `G`), `units`, `isotropy` (the isotropy bundle) and
    /// `iso:<unit>` (a stability group).
    pub fn subgroupoid(&self, name: &str) -> Result<Subgroupoid> {
        if let Some(s) = self.named.get(name) {
            return Ok(s.clone());
        }
        match name {
            "full" | "G" => Ok(Subgroupoid::full(self.groupoid.clone())),
            "units" => Ok(Subgroupoid::unit_space(self.groupoid.clone())),
            "isotropy" => Ok(Subgroupoid::isotropy_bundle(self.groupoid.clone())),
            _ => match name.strip_prefix("iso:") {
                Some(u) => super::isotropy_group(&self.groupoid, self.groupoid.resolve_unit(u)?),
                None => Err(Error::UnknownName(name.to_string())),
            },
        }
    }
}
