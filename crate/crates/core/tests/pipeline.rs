use qtwist::arith::{coefficient_table, TableCache, WeierstrassCurve};
use qtwist::lfunc::TwistEngine;
use qtwist::moments::{engine_for, moment_from_store, FamilySpec, JetStore, MomentConstants, MomentKind, WeightIndex};
use qtwist::Exec;

#[test]
fn cached_table_gives_same_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let cache = TableCache::new(dir.path()).unwrap();
    let curve = WeierstrassCurve::congruent_32a();
    let (cold, hit) = cache.load_or_build(&curve, 20_000, Exec::Sequential).unwrap();
    assert!(!hit);
    // a shorter request is served from the longer file
    let (warm, hit) = cache.load_or_build(&curve, 17_000, Exec::Sequential).unwrap();
    assert!(hit);
    assert_eq!(warm, cold.truncated(17_000));

    let a = TwistEngine::from_table(&curve, cold).unwrap().taylor(193, 11).unwrap();
    let b = TwistEngine::from_table(&curve, warm).unwrap().taylor(193, 11).unwrap();
    assert_eq!(a.taylor.c, b.taylor.c);
}

#[test]
fn odd_sign_subfamily_has_zero_first_moment() {
    let curve = WeierstrassCurve::curve_11a();
    let spec = FamilySpec::eight_d(curve.clone(), vec![800.0]);
    let ds = spec.all_members();
    let (engine, _) = engine_for(&curve, &ds, 1, 2000, Exec::Sequential, None).unwrap();
    let mut store = JetStore::new(11, 1);
    store.fill(&engine, &ds, Exec::Sequential, None).unwrap();
    let odd: Vec<i64> = ds.iter().copied().filter(|&d| engine.descriptor(d).unwrap().omega == -1).collect();
    assert!(!odd.is_empty());
    let sum: f64 = odd.iter().map(|&d| store.get(d).unwrap().l[0]).sum();
    assert_eq!(sum, 0.0);

    let table = coefficient_table(&curve, 2000, Exec::Sequential).unwrap();
    let c = MomentConstants::compute(&table, engine.eta(), &spec.weight, 2000, WeightIndex::Level).unwrap();
    let swap = |a, b| moment_from_store(&store, &spec, MomentKind::Second(a, b), &c).unwrap().empirical;
    assert_eq!(swap(0, 1), swap(1, 0));
}
