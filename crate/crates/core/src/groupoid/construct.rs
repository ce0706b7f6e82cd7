//! Standard constructions: groups from Cayley tables, pair groupoids,
//! transformation groupoids and disjoint unions.

use super::{FiniteGroupoid, RawGroupoid};
use crate::error::{Error, Result};

/// A group as a one-unit groupoid. `table[a][b]` is the index of `a·b`.
pub fn group_cayley(names: &[String], table: &[Vec<usize>]) -> Result<FiniteGroupoid> {
    let n = names.len();
    if table.len() != n || table.iter().any(|row| row.len() != n) {
        return Err(Error::MalformedSpec("Cayley table must be square over the elements".into()));
    }
    if table.iter().flatten().any(|&c| c >= n) {
        return Err(Error::MalformedSpec("Cayley table entry out of range".into()));
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| Error::AxiomViolation("Cayley table has no identity".into()))?;
    let mut inverse = Vec::with_capacity(n);
    for x in 0..n {
        let inv = (0..n).find(|&y| table[x][y] == identity && table[y][x] == identity);
        inverse.push(Some(inv.ok_or_else(|| Error::AxiomViolation(format!("`{}` has no inverse", names[x])))?));
    }
    let compose = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| (a, b, table[a][b])).collect();
    FiniteGroupoid::from_raw(RawGroupoid {
        names: names.to_vec(),
        units: vec![identity],
        range: vec![Some(identity); n],
        source: vec![Some(identity); n],
        inverse,
        compose,
        unit_labels: vec![],
    })
}

/// `Z/n` with elements named `"0"`, …, `"n-1"`.
pub fn cyclic_group(n: usize) -> FiniteGroupoid {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    group_cayley(&names, &table).expect("cyclic group tables are valid")
}

/// The symmetric group on `k` letters, elements in lexicographic order of
/// their one-line notation (`"123"`, `"132"`, …). Product is composition
/// `(στ)(i) = σ(τ(i))`. Also returns each element's permutation of `0..k`.
pub fn symmetric_group(k: usize) -> (FiniteGroupoid, Vec<Vec<usize>>) {
    assert!((1..=9).contains(&k), "one-line names need 1 <= k <= 9");
    let mut perms = vec![(0..k).collect::<Vec<_>>()];
    // lexicographic successor enumeration
    loop {
        let mut p = perms.last().unwrap().clone();
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { break };
        let j = (i + 1..k).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
        perms.push(p);
    }
    let names: Vec<String> = perms.iter().map(|p| p.iter().map(|&v| char::from(b'1' + v as u8)).collect()).collect();
    let find = |q: &Vec<usize>| perms.iter().position(|p| p == q).unwrap();
    let table: Vec<Vec<usize>> =
        perms.iter().map(|s| perms.iter().map(|t| find(&(0..k).map(|i| s[t[i]]).collect())).collect()).collect();
    let g = group_cayley(&names, &table).expect("symmetric group tables are valid");
    (g, perms)
}

/// The pair groupoid `X × X` with `(i,j)(j,k) = (i,k)`.
pub fn pair_groupoid(points: &[String]) -> Result<FiniteGroupoid> {
    let m = points.len();
    if m == 0 {
        return Err(Error::MalformedSpec("pair groupoid needs at least one point".into()));
    }
    let idx = |i: usize, j: usize| i * m + j;
    let mut raw = RawGroupoid::default();
    for i in 0..m {
        for j in 0..m {
            raw.names.push(format!("({},{})", points[i], points[j]));
            raw.range.push(Some(idx(i, i)));
            raw.source.push(Some(idx(j, j)));
            raw.inverse.push(Some(idx(j, i)));
            for k in 0..m {
                raw.compose.push((idx(i, j), idx(j, k), idx(i, k)));
            }
        }
        raw.units.push(idx(i, i));
        raw.unit_labels.push((idx(i, i), points[i].clone()));
    }
    FiniteGroupoid::from_raw(raw)
}

/// The transformation groupoid of a left action of `group` on `points`.
///
/// Elements are `(g,x)` with `r(g,x) = g·x`, `s(g,x) = x` and
/// `(g, h·x)(h, x) = (gh, x)`, indexed `g * points.len() + x`.
pub fn transformation_groupoid(
    group: &FiniteGroupoid,
    points: &[String],
    action: impl Fn(usize, usize) -> usize,
) -> Result<FiniteGroupoid> {
    if !group.is_group() {
        return Err(Error::NotAGroup(group.units().len()));
    }
    let m = points.len();
    if m == 0 {
        return Err(Error::MalformedSpec("action needs at least one point".into()));
    }
    let n = group.len();
    let e = group.units()[0];
    let mut act = vec![0usize; n * m];
    for g in 0..n {
        for x in 0..m {
            let y = action(g, x);
            if y >= m {
                return Err(Error::NotAnAction(format!("`{}`·`{}` is not a point", group.name(g), points[x])));
            }
            act[g * m + x] = y;
        }
    }
    for x in 0..m {
        if act[e * m + x] != x {
            return Err(Error::NotAnAction(format!("identity moves `{}`", points[x])));
        }
    }
    for g in 0..n {
        for h in 0..n {
            let gh = group.compose(g, h).expect("group elements compose");
            for x in 0..m {
                if act[g * m + act[h * m + x]] != act[gh * m + x] {
                    return Err(Error::NotAnAction(format!(
                        "`{}`·(`{}`·`{}`) differs from (`{}``{}`)·`{}`",
                        group.name(g),
                        group.name(h),
                        points[x],
                        group.name(g),
                        group.name(h),
                        points[x]
                    )));
                }
            }
        }
    }
    let idx = |g: usize, x: usize| g * m + x;
    let mut raw = RawGroupoid::default();
    for g in 0..n {
        for x in 0..m {
            let gx = act[g * m + x];
            raw.names.push(format!("({},{})", group.name(g), points[x]));
            raw.range.push(Some(idx(e, gx)));
            raw.source.push(Some(idx(e, x)));
            raw.inverse.push(Some(idx(group.inverse(g), gx)));
            // (h, g·x)(g, x) = (hg, x)
            for h in 0..n {
                let hg = group.compose(h, g).unwrap();
                raw.compose.push((idx(h, gx), idx(g, x), idx(hg, x)));
            }
        }
    }
    for (x, label) in points.iter().enumerate() {
        raw.units.push(idx(e, x));
        raw.unit_labels.push((idx(e, x), label.clone()));
    }
    FiniteGroupoid::from_raw(raw)
}

/// Disjoint union; element names and unit labels are prefixed `"{prefix}:"`.
pub fn disjoint_union(parts: &[(&str, &FiniteGroupoid)]) -> Result<FiniteGroupoid> {
    let mut raw = RawGroupoid::default();
    let mut offset = 0;
    for (prefix, g) in parts {
        let part = g.to_raw();
        raw.names.extend(part.names.iter().map(|s| format!("{prefix}:{s}")));
        let shift = |v: Option<usize>| v.map(|i| i + offset);
        raw.range.extend(part.range.into_iter().map(shift));
        raw.source.extend(part.source.into_iter().map(shift));
        raw.inverse.extend(part.inverse.into_iter().map(shift));
        raw.compose.extend(part.compose.into_iter().map(|(a, b, c)| (a + offset, b + offset, c + offset)));
        raw.units.extend(part.units.iter().map(|u| u + offset));
        raw.unit_labels.extend(part.unit_labels.into_iter().map(|(u, l)| (u + offset, format!("{prefix}:{l}"))));
        offset += g.len();
    }
    FiniteGroupoid::from_raw(raw)
}
