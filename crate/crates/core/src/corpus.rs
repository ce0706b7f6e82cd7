//! The built-in corpus of groupoid definitions used by the harness.
//!
//! Groups `Z/2`, `Z/3`, `Z/4`, `S_3`; pair groupoids `P_2`..`P_5`;
//! transformation groupoids `Z/4 ↷ Z/2`, `Z/2 ↷ {a,b}`, `S_3 ↷ {1,2,3}`;
//! and `Z/3 ⊔ P_2` with a nonuniform rational Haar system.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::Result;
use crate::groupoid::{
    cyclic_group, disjoint_union, pair_groupoid, symmetric_group, Construction, FiniteGroupoid, GroupDefinition,
    GroupoidDocument, WeightSpec,
};

/// Environment variable naming the default corpus directory.
pub const CORPUS_ENV: &str = "GIND_CORPUS";

fn names(v: impl IntoIterator<Item = impl ToString>) -> Vec<String> {
    v.into_iter().map(|s| s.to_string()).collect()
}

fn group_doc(name: &str, description: &str, g: &FiniteGroupoid) -> GroupoidDocument {
    let def = GroupDefinition::from_group(g);
    let mut doc =
        GroupoidDocument::constructed(name, Construction::GroupCayley { elements: def.elements, table: def.table });
    doc.description = Some(description.into());
    doc
}

fn pair_doc(n: usize) -> GroupoidDocument {
    let mut doc = GroupoidDocument::constructed(&format!("P{n}"), Construction::Pair { points: names(1..=n) });
    doc.description = Some(format!("pair groupoid on {n} points"));
    doc
}

fn action_doc(
    name: &str,
    description: &str,
    group: &FiniteGroupoid,
    points: &[String],
    act: impl Fn(usize, usize) -> usize,
) -> GroupoidDocument {
    let action = (0..group.len())
        .flat_map(|g| (0..points.len()).map(move |x| (g, x)))
        .map(|(g, x)| [group.name(g).to_string(), points[x].clone(), points[act(g, x)].clone()])
        .collect();
    let construction =
        Construction::Transformation { group: GroupDefinition::from_group(group), points: points.to_vec(), action };
    let mut doc = GroupoidDocument::constructed(name, construction);
    doc.description = Some(description.into());
    doc
}

fn union_doc() -> GroupoidDocument {
    let z3 = cyclic_group(3);
    let p2 = pair_groupoid(&names(["1", "2"])).expect("pair groupoid");
    let g = disjoint_union(&[("z", &z3), ("p", &p2)]).expect("disjoint union");
    let mut doc = GroupoidDocument::explicit("Z3+P2", &g);
    doc.description = Some("Z/3 and P_2 side by side, weighted by the source unit".into());
    // invariance forces weight(y) to depend on s(y) only
    let density = |unit: &str| match unit {
        "z:0" => WeightSpec::Text("2/3".into()),
        "p:(1,1)" => WeightSpec::Integer(1),
        _ => WeightSpec::Text("1/2".into()),
    };
    doc.haar = Some((0..g.len()).map(|y| (g.name(y).to_string(), density(g.name(g.source(y))))).collect());
    doc
}

/// `(file stem, document)` for every corpus entry, in a fixed order.
pub fn corpus() -> Vec<(String, GroupoidDocument)> {
    let (s3, perms) = symmetric_group(3);
    let mut out = vec![
        ("z2".to_string(), group_doc("Z2", "cyclic group of order 2", &cyclic_group(2))),
        ("z3".to_string(), group_doc("Z3", "cyclic group of order 3", &cyclic_group(3))),
        ("z4".to_string(), group_doc("Z4", "cyclic group of order 4", &cyclic_group(4))),
        ("s3".to_string(), group_doc("S3", "symmetric group on 3 letters", &s3)),
    ];
    for n in 2..=5 {
        out.push((format!("pair{n}"), pair_doc(n)));
    }
    let mut z4_on_z2 =
        action_doc("Z4.Z2", "Z/4 acting on Z/2 by translation mod 2", &cyclic_group(4), &names(["0", "1"]), |a, x| {
            (a + x) % 2
        });
    let g = z4_on_z2.build_groupoid().expect("valid action");
    let units: Vec<String> = g.units().iter().map(|&u| g.name(u).to_string()).collect();
    let bundle: Vec<String> =
        (0..g.len()).filter(|&x| g.range(x) == g.source(x)).map(|x| g.name(x).to_string()).collect();
    z4_on_z2.subgroupoids = Some(BTreeMap::from([("H".to_string(), units), ("K".to_string(), bundle)]));
    out.push(("z4_on_z2".to_string(), z4_on_z2));
    out.push((
        "z2_swap".to_string(),
        action_doc("Z2.ab", "Z/2 swapping two points", &cyclic_group(2), &names(["a", "b"]), |a, x| (a + x) % 2),
    ));
    out.push((
        "s3_on_3".to_string(),
        action_doc("S3.123", "S_3 permuting three points", &s3, &names(["1", "2", "3"]), |s, x| perms[s][x]),
    ));
    out.push(("z3_plus_p2".to_string(), union_doc()));
    out
}

/// Write every corpus document as `<stem>.json` into `dir`.
pub fn write_corpus(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    corpus()
        .into_iter()
        .map(|(stem, doc)| {
            let path = dir.join(format!("{stem}.json"));
            std::fs::write(&path, doc.to_json_pretty() + "\n")?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        let entries = corpus();
        assert_eq!(entries.len(), 12);
        for (stem, doc) in entries {
            let loaded = doc.build().unwrap_or_else(|e| panic!("{stem}: {e}"));
            assert!(!loaded.groupoid.is_empty());
        }
    }

    #[test]
    fn expected_sizes() {
        let sizes: BTreeMap<String, (usize, usize)> = corpus()
            .into_iter()
            .map(|(stem, doc)| {
                let g = doc.build_groupoid().unwrap();
                (stem, (g.len(), g.units().len()))
            })
            .collect();
        assert_eq!(sizes["s3"], (6, 1));
        assert_eq!(sizes["pair5"], (25, 5));
        assert_eq!(sizes["z4_on_z2"], (8, 2));
        assert_eq!(sizes["s3_on_3"], (18, 3));
        assert_eq!(sizes["z3_plus_p2"], (7, 3));
    }

    #[test]
    fn union_haar_is_nonuniform_and_exact() {
        let loaded = union_doc().build().unwrap();
        assert!(loaded.haar.is_exact());
        let weights: std::collections::BTreeSet<String> =
            (0..loaded.groupoid.len()).map(|y| format!("{:?}", loaded.haar.weight(y))).collect();
        assert_eq!(weights.len(), 3);
    }

    #[test]
    fn shipped_files_match() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
        for (stem, doc) in corpus() {
            let text = std::fs::read_to_string(dir.join(format!("{stem}.json")))
                .unwrap_or_else(|e| panic!("{stem}.json: {e}"));
            assert_eq!(GroupoidDocument::from_json(&text).unwrap(), doc, "{stem}.json is stale");
        }
    }
}
