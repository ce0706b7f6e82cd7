#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use groupoid_induce::algebra::Algebra;
use groupoid_induce::groupoid::{GroupoidDocument, LoadedGroupoid};
use num_complex::Complex64;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every shipped definition file, sorted by file name.
pub fn shipped_corpus() -> Vec<(String, LoadedGroupoid)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    assert!(!paths.is_empty(), "shipped corpus is empty");
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let loaded = GroupoidDocument::from_json(&text).unwrap().build().unwrap();
            (p.file_stem().unwrap().to_string_lossy().into_owned(), loaded)
        })
        .collect()
}

pub fn algebra(loaded: &LoadedGroupoid) -> Arc<Algebra> {
    Algebra::new(loaded.groupoid.clone(), loaded.haar.clone()).unwrap()
}

pub fn load_corpus_entry(stem: &str) -> LoadedGroupoid {
    shipped_corpus().into_iter().find(|(s, _)| s == stem).unwrap().1
}

/// One result line per acceptance criterion.
pub fn report(criterion: usize, title: &str, pass: bool, detail: &str) {
    println!("[{}] criterion {criterion}: {title} ({detail})", if pass { "PASS" } else { "FAIL" });
}

/// Mackey's formula for the character of a representation induced from the
/// stability group at `u`:
/// `χ_Ind(x) = λ(x)/λ(u) · Σ_{z ∈ T, r(z) = r(x)} tr L(δ_{z⁻¹xz})` for
/// isotropic `x` and zero otherwise, where `T ⊆ G_u` has one element per
/// range. `trace` is indexed by parent elements.
pub fn mackey_character(alg: &Algebra, u: usize, trace: &dyn Fn(usize) -> Complex64) -> Vec<Complex64> {
    let g = alg.groupoid();
    let w = |x: usize| alg.haar().weight_f64(x);
    let mut transversal: Vec<usize> = Vec::new();
    for &z in g.source_fiber(u) {
        if !transversal.iter().any(|&t| g.range(t) == g.range(z)) {
            transversal.push(z);
        }
    }
    (0..g.len())
        .map(|x| {
            if g.range(x) != g.source(x) {
                return Complex64::new(0.0, 0.0);
            }
            let sum: Complex64 = transversal
                .iter()
                .filter(|&&z| g.range(z) == g.range(x))
                .map(|&z| trace(g.compose(g.compose(g.inverse(z), x).unwrap(), z).unwrap()))
                .sum();
            sum * (w(x) / w(u))
        })
        .collect()
}
