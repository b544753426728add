mod common;

use proptest::prelude::*;

use common::*;
use phorma::oracle::{verify, DEFAULT_BUDGET};
use phorma::seqcore::{reduce, sort_distinct};
use phorma::{builtin, Index};

#[test]
fn recovery_round_trip() {
    check_recovery().unwrap();
}

#[test]
fn roof_invariance() {
    for spec in [
        builtin::l_piece(7, 5).unwrap(),
        builtin::l_piece(6, 6).unwrap(),
        builtin::sym_ge(4, 6).unwrap(),
        builtin::t_z_piece(vec![3, 4, 3, 4, 3, 3, 4]).unwrap(),
    ] {
        check_roof_invariance(&spec).unwrap();
    }
}

#[test]
fn local_hash_matches_path_order() {
    assert!(check_local_hash(8).unwrap() > 0);
}

#[test]
fn store_bounds_on_reference_specs() {
    for spec in [
        builtin::l_piece(7, 5).unwrap(),
        builtin::l_piece(40, 30).unwrap(),
        builtin::t_z_piece(vec![15, 15, 17, 17, 19, 19, 19]).unwrap(),
        builtin::t_z_piece(vec![10; 7]).unwrap(),
        builtin::sym_ge(6, 9).unwrap(),
        builtin::sym_gt(6, 9).unwrap(),
    ] {
        check_store_bounds(&Index::compile(&spec).unwrap()).unwrap();
    }
}

#[test]
fn composition_lattice() {
    linf_bijection(10).unwrap();
}

#[test]
fn grid_paths() {
    jm_bijection(6).unwrap();
}

#[test]
fn chi_square_uniformity() {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let idx = Index::compile(&builtin::l_piece(7, 5).unwrap()).unwrap();
    let cells = *idx.count() as usize;
    let draws = idx.sample_many(2024, 100 * cells).unwrap();
    let mut hits = vec![0u64; cells];
    for d in &draws {
        hits[idx.rank(d).unwrap() as usize] += 1;
    }
    let expected = draws.len() as f64 / cells as f64;
    let stat: f64 = hits.iter().map(|&h| (h as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
    assert!(p > 0.001, "chi-square {stat:.1}, p = {p}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn index_agrees_with_brute_force(spec in spec_strategy()) {
        let idx = Index::compile(&spec).unwrap();
        let rep = verify(&spec, &idx, DEFAULT_BUDGET).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
        prop_assert!(check_store_bounds(&idx).is_ok());
        let s = idx.stats();
        prop_assert_eq!(s.v_g, 1 + s.red_count + s.v_h);
        prop_assert!((s.mu * s.nu as f64 - s.v_h as f64).abs() < 1e-9);
        prop_assert!(s.lambda <= s.max_roof_count.max(1));
    }

    #[test]
    fn rank_splits_into_offset_and_local_hash(spec in spec_strategy(), pick in any::<prop::sample::Index>()) {
        let idx = Index::compile(&spec).unwrap();
        prop_assume!(*idx.count() > 0);
        let r = pick.index(*idx.count() as usize) as u64;
        let alpha = idx.unrank(&r).unwrap();
        let entry = idx.entry(&reduce(&alpha).unwrap()).unwrap();
        let local = idx.store().h_rank(&entry.roof, &sort_distinct(&alpha).unwrap()).unwrap();
        prop_assert_eq!(entry.offset + local, r);
        prop_assert!(local < entry.order);
    }

    #[test]
    fn samples_are_members(spec in spec_strategy(), seed in any::<u64>()) {
        let idx = Index::compile(&spec).unwrap();
        prop_assume!(*idx.count() > 0);
        let draws = idx.sample_many(seed, 8).unwrap();
        prop_assert_eq!(&draws, &idx.sample_many(seed, 8).unwrap());
        for d in draws {
            prop_assert!(phorma::seqcore::member(&spec, &d).unwrap());
        }
    }
}
