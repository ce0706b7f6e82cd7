mod common;

use std::sync::{Arc, LazyLock};

use groupoid_induce::algebra::{cstar_norm, regular_representation, Algebra, AlgebraElement, Representation};
use groupoid_induce::groupoid::{
    cyclic_group, isotropy_group, pair_groupoid, GroupoidDocument, HaarSystem, LoadedGroupoid, Subgroupoid, Weight,
};
use groupoid_induce::imprimitivity::{BimoduleVector, ImprimitivityGroupoid};
use groupoid_induce::induction::{full_regular_representation, induce};
use groupoid_induce::linalg::{hermitian_eigen, max_abs, op_norm};
use groupoid_induce::spectrum::{commutant, group_irreps, is_irreducible, stability_algebra};
use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

static CORPUS: LazyLock<Vec<(String, LoadedGroupoid)>> = LazyLock::new(common::shipped_corpus);

fn entry(i: usize) -> &'static LoadedGroupoid {
    &CORPUS[i % CORPUS.len()].1
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn subgroupoids(alg: &Arc<Algebra>) -> Vec<Subgroupoid> {
    let g = alg.groupoid().clone();
    let mut out = vec![Subgroupoid::unit_space(g.clone()), Subgroupoid::isotropy_bundle(g.clone())];
    out.extend(g.units().iter().map(|&u| isotropy_group(&g, u).unwrap()));
    out.push(Subgroupoid::full(g));
    out
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn composition_is_associative_on_all_triples(i in 0usize..64) {
        let g = &entry(i).groupoid;
        for (x, y, xy) in g.composable_pairs() {
            for &z in g.range_fiber(g.source(y)) {
                let yz = g.compose(y, z).unwrap();
                prop_assert_eq!(g.compose(xy, z), g.compose(x, yz));
            }
        }
    }

    #[test]
    fn inverse_is_an_involution_swapping_range_and_source(i in 0usize..64) {
        let g = &entry(i).groupoid;
        for x in 0..g.len() {
            prop_assert_eq!(g.inverse(g.inverse(x)), x);
            prop_assert_eq!(g.range(g.inverse(x)), g.source(x));
            prop_assert_eq!(g.compose(x, g.inverse(x)), Some(g.range(x)));
        }
    }

    #[test]
    fn left_translation_is_a_fiber_bijection(i in 0usize..64) {
        let g = &entry(i).groupoid;
        for x in 0..g.len() {
            let mut image: Vec<usize> =
                g.range_fiber(g.source(x)).iter().map(|&y| g.compose(x, y).unwrap()).collect();
            image.sort_unstable();
            let mut target = g.range_fiber(g.range(x)).to_vec();
            target.sort_unstable();
            prop_assert_eq!(image, target);
        }
        prop_assert!(HaarSystem::counting(g).check_invariance(g));
    }

    #[test]
    fn isotropy_groups_are_groups(i in 0usize..64) {
        let g = &entry(i).groupoid;
        for &u in g.units() {
            let iso = isotropy_group(g, u).unwrap();
            prop_assert!(iso.local().is_group());
            prop_assert!(iso.members().iter().all(|&x| g.range(x) == u && g.source(x) == u));
        }
    }

    #[test]
    fn scaled_haar_stays_invariant(i in 0usize..64, num in 1i64..9, den in 1i64..9) {
        let loaded = entry(i);
        let scaled = loaded.haar.scaled(Ratio::new(num, den));
        prop_assert!(scaled.check_invariance(&loaded.groupoid));
    }

    #[test]
    fn perturbing_one_weight_in_a_nontrivial_fiber_breaks_invariance(i in 0usize..64, pick in 0usize..1000) {
        let loaded = entry(i);
        let g = &loaded.groupoid;
        let candidates: Vec<usize> = (0..g.len()).filter(|&y| g.range_fiber(g.range(y)).len() > 1).collect();
        prop_assume!(!candidates.is_empty());
        let y = candidates[pick % candidates.len()];
        let bumped = loaded.haar.weight(y).to_f64() * 2.0;
        let haar = loaded.haar.with_weight(y, Weight::Exact(Ratio::approximate_float(bumped).unwrap()));
        prop_assert!(!haar.check_invariance(g));
    }

    #[test]
    fn document_round_trip_is_byte_stable(i in 0usize..64) {
        let (stem, _) = &CORPUS[i % CORPUS.len()];
        let text = std::fs::read_to_string(common::corpus_dir().join(format!("{stem}.json"))).unwrap();
        let doc = GroupoidDocument::from_json(&text).unwrap();
        let once = doc.to_json_pretty();
        let again = GroupoidDocument::from_json(&once).unwrap();
        prop_assert_eq!(&again, &doc);
        prop_assert_eq!(again.to_json_pretty(), once);
    }

    #[test]
    fn exact_convolution_is_associative(i in 0usize..64, seed: u64) {
        let alg = common::algebra(entry(i));
        let mut r = rng(seed);
        let [f, g, h] = [(); 3].map(|_| AlgebraElement::random_exact(&alg, &mut r, 5));
        let left = f.convolve(&g).unwrap().convolve(&h).unwrap();
        let right = f.convolve(&g.convolve(&h).unwrap()).unwrap();
        prop_assert_eq!(left.coeffs(), right.coeffs());
    }

    #[test]
    fn involution_reverses_products(i in 0usize..64, seed: u64) {
        let alg = common::algebra(entry(i));
        let mut r = rng(seed);
        let f = AlgebraElement::random(&alg, &mut r);
        let g = AlgebraElement::random(&alg, &mut r);
        let lhs = f.convolve(&g).unwrap().involution();
        let rhs = g.involution().convolve(&f.involution()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        prop_assert!(f.involution().involution().max_abs_diff(&f) == 0.0);
    }

    #[test]
    fn norms_are_ordered_and_cstar_identity_holds(i in 0usize..64, seed: u64) {
        let alg = common::algebra(entry(i));
        let f = AlgebraElement::random(&alg, &mut rng(seed));
        let g = AlgebraElement::random(&alg, &mut rng(seed ^ 1));
        let c = cstar_norm(&f);
        prop_assert!(c <= f.i_norm() + 1e-9);
        let fstar_f = f.involution().convolve(&f).unwrap();
        prop_assert!((cstar_norm(&fstar_f) - c * c).abs() <= 1e-9 * (c * c).max(1.0));
        let fg = f.convolve(&g).unwrap();
        prop_assert!(fg.i_norm() <= f.i_norm() * g.i_norm() + 1e-9);
    }

    #[test]
    fn regular_representations_are_multiplicative(i in 0usize..64, seed: u64) {
        let alg = common::algebra(entry(i));
        let mut r = rng(seed);
        let f = AlgebraElement::random(&alg, &mut r);
        let g = AlgebraElement::random(&alg, &mut r);
        let fg = f.convolve(&g).unwrap();
        for &u in alg.groupoid().units() {
            let l = regular_representation(&alg, u).unwrap();
            let lhs = l.apply(&fg).unwrap();
            let rhs = l.apply(&f).unwrap() * l.apply(&g).unwrap();
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn imprimitivity_identity_and_positivity(i in 0usize..64, pick in 0usize..16, seed: u64) {
        let alg = common::algebra(entry(i));
        let subs = subgroupoids(&alg);
        let h = subs[pick % subs.len()].clone();
        let imp = ImprimitivityGroupoid::with_restricted_haar(alg.clone(), h).unwrap();
        let n = imp.carrier_len();
        let mut r = rng(seed);
        let [phi, psi, zeta] = [(); 3].map(|_| BimoduleVector::random(n, &mut r));
        let lhs = imp.left_action(&imp.lip(&phi, &psi).unwrap(), &zeta).unwrap();
        let rhs = imp.right_action(&phi, &imp.rip(&psi, &zeta).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);

        let rep = full_regular_representation(imp.h_algebra()).unwrap();
        let family: Vec<BimoduleVector> = (0..3).map(|_| BimoduleVector::random(n, &mut r)).collect();
        let (values, _) = hermitian_eigen(&imp.gram(&family, &rep).unwrap());
        prop_assert!(values[0] >= -1e-10);
    }

    #[test]
    fn transfer_does_not_increase_the_i_norm(i in 0usize..64, pick in 0usize..8, seed: u64) {
        let alg = common::algebra(entry(i));
        let g = alg.groupoid().clone();
        let u = g.units()[pick % g.units().len()];
        let (h, _) = stability_algebra(&alg, u).unwrap();
        let imp = ImprimitivityGroupoid::with_restricted_haar(alg.clone(), h).unwrap();
        let big_f = AlgebraElement::random(imp.hg_algebra(), &mut rng(seed));
        let f = imp.transfer(&big_f).unwrap();
        prop_assert!(f.i_norm() <= big_f.i_norm() + 1e-12);
    }

    #[test]
    fn induced_operators_are_bounded(i in 0usize..64, pick in 0usize..16, seed: u64) {
        let alg = common::algebra(entry(i));
        let subs = subgroupoids(&alg);
        let h = &subs[pick % subs.len()];
        let h_alg = Algebra::new(h.local().clone(), alg.haar().restrict(h)).unwrap();
        let l = full_regular_representation(&h_alg).unwrap();
        let ind = induce(&alg, h, &l, 1e-9).unwrap();
        let f = AlgebraElement::random(&alg, &mut rng(seed));
        let norm = op_norm(&ind.apply(&f).unwrap());
        prop_assert!(norm <= cstar_norm(&f) + 1e-9);
        prop_assert!(norm <= f.i_norm() + 1e-9);
    }

    #[test]
    fn inducing_from_the_whole_groupoid_keeps_the_character(i in 0usize..64) {
        let alg = common::algebra(entry(i));
        let full = Subgroupoid::full(alg.groupoid().clone());
        let l = full_regular_representation(&alg).unwrap();
        let ind = induce(&alg, &full, &l, 1e-9).unwrap();
        let (a, b) = (ind.rep().character(), l.character());
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-9));
    }

    #[test]
    fn commutant_basis_commutes(i in 0usize..64, pick in 0usize..8) {
        let alg = common::algebra(entry(i));
        let g = alg.groupoid();
        let l = regular_representation(&alg, g.units()[pick % g.units().len()]).unwrap();
        let report = commutant(&l, 1e-8).unwrap();
        prop_assert!(report.dim >= 1);
        prop_assert!(report.max_commutator <= 1e-9);
    }

    #[test]
    fn cyclic_groups_have_n_characters(n in 1usize..9, seed: u64) {
        let alg = Algebra::counting(Arc::new(cyclic_group(n)));
        let set = group_irreps(&alg, seed, 1e-8).unwrap();
        prop_assert_eq!(set.irreps.len(), n);
        prop_assert!(set.irreps.iter().all(|l| l.dim() == 1));
        let chars: Vec<Vec<Complex64>> = set.irreps.iter().map(Representation::character).collect();
        for (a, ca) in chars.iter().enumerate() {
            for (b, cb) in chars.iter().enumerate() {
                let inner: Complex64 = ca.iter().zip(cb).map(|(x, y)| x * y.conj()).sum::<Complex64>() / n as f64;
                let expected = if a == b { 1.0 } else { 0.0 };
                prop_assert!((inner - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn pair_groupoids_induce_irreducibly_from_a_point(n in 1usize..6, pick in 0usize..6) {
        let points: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
        let alg = Algebra::counting(Arc::new(pair_groupoid(&points).unwrap()));
        let u = alg.groupoid().units()[pick % n];
        let (h, h_alg) = stability_algebra(&alg, u).unwrap();
        let trivial = regular_representation(&h_alg, h_alg.groupoid().units()[0]).unwrap();
        let ind = induce(&alg, &h, &trivial, 1e-9).unwrap();
        prop_assert_eq!(ind.dim(), n);
        prop_assert!(is_irreducible(ind.rep(), 1e-8).unwrap());
    }
}
