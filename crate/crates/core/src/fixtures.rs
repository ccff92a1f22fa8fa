//! Built-in example systems: the eight-point twisted-agreeable model whose
//! quotient stops being representable, the ten-point disagreeable model
//! with the analogous quotient, the three-element chain used throughout
//! the representation tests, and a seeded generator of random functional
//! submonoids for corpus runs.

use rand_core::{RngCore, SeedableRng};

use crate::algebra::{from_model, ClosureOps, FiniteAlgebra, Partition, TableModel};
use crate::context::{ConcreteModel, EvalContext, ModelFile};
use crate::pfun::{PartialMap, TestSet};

fn pm(points: usize, pairs: &[(usize, usize)]) -> PartialMap {
    let mut image = vec![None; points];
    for &(x, y) in pairs {
        image[x] = Some(y);
    }
    PartialMap::from_entries(image).expect("fixture entries are in range")
}

fn ts(points: usize, members: &[usize]) -> TestSet {
    TestSet::from_points(points, members).expect("fixture members are in range")
}

pub fn quasiv_map_s() -> PartialMap {
    pm(8, &[(0, 4), (1, 5), (2, 6), (3, 7)])
}

/// The eight-point system: `s` shifts `{0,1,2,3}` up by four, `beta` holds
/// on `{0..5}`, and the listed restrictions generate a monoid with tests
/// closed under composition, domain and agreement.
pub fn quasiv_model() -> ConcreteModel {
    let elems = vec![
        ("s".to_string(), quasiv_map_s()),
        ("Ds".to_string(), pm(8, &[(0, 0), (1, 1), (2, 2), (3, 3)])),
        ("sbeta".to_string(), pm(8, &[(0, 4), (1, 5)])),
        ("sbeta'".to_string(), pm(8, &[(2, 6), (3, 7)])),
        ("e".to_string(), pm(8, &[(0, 0), (1, 1), (2, 2)])),
        ("g".to_string(), pm(8, &[(0, 0), (1, 1)])),
        ("f".to_string(), pm(8, &[(2, 2), (3, 3)])),
        ("ef".to_string(), pm(8, &[(2, 2)])),
        ("efs".to_string(), pm(8, &[(2, 6)])),
        ("empty".to_string(), PartialMap::null(8)),
        ("beta".to_string(), ts(8, &[0, 1, 2, 3, 4, 5]).as_map()),
        ("beta'".to_string(), ts(8, &[6, 7]).as_map()),
        ("id".to_string(), PartialMap::identity(8)),
    ];
    let tests = vec![9, 10, 11, 12];
    ConcreteModel::new(8, elems, tests).expect("fixture model is well-formed")
}

pub fn quasiv_model_file() -> ModelFile {
    quasiv_model().to_file()
}

/// Table algebra of the eight-point system, closed under composition,
/// domain and agreement.
pub fn quasiv_table_model() -> TableModel {
    from_model(&quasiv_model(), ClosureOps::with_star(), 64).expect("closure stays small")
}

/// Same closure carrying disagreement and weak comparison tables as well.
pub fn quasiv_table_model_wc() -> TableModel {
    let ops = ClosureOps { domain: true, star: true, neq: true, wc: true, ..Default::default() };
    from_model(&quasiv_model(), ops, 64).expect("closure stays small")
}

/// The partition identifying `ef` with `f` and `efs` with `fs`, everything
/// else singleton.
pub fn quasiv_partition(tm: &TableModel) -> Partition {
    let ef = tm.index_of(&pm(8, &[(2, 2)])).expect("ef is present");
    let f = tm.index_of(&pm(8, &[(2, 2), (3, 3)])).expect("f is present");
    let efs = tm.index_of(&pm(8, &[(2, 6)])).expect("efs is present");
    let fs = tm.index_of(&pm(8, &[(2, 6), (3, 7)])).expect("fs is present");
    Partition::from_merges(tm.algebra.size(), &[vec![ef, f], vec![efs, fs]])
        .expect("blocks are disjoint")
}

pub fn ten_point_map_s() -> PartialMap {
    pm(10, &[(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)])
}

pub fn ten_point_map_t() -> PartialMap {
    pm(10, &[(0, 5), (1, 7), (2, 6), (3, 9), (4, 8)])
}

/// The ten-point system: two five-point shifts agreeing only at `0`,
/// together with the restrictions generated from them. Its test sort is
/// just `{empty, id}`.
pub fn ten_point_model() -> ConcreteModel {
    let elems = vec![
        ("s".to_string(), ten_point_map_s()),
        ("t".to_string(), ten_point_map_t()),
        ("s_and_t".to_string(), pm(10, &[(0, 5)])),
        ("Ds".to_string(), pm(10, &[(0, 0), (1, 1), (2, 2), (3, 3), (4, 4)])),
        ("f".to_string(), pm(10, &[(0, 0)])),
        ("g".to_string(), pm(10, &[(1, 1), (2, 2), (3, 3), (4, 4)])),
        ("e".to_string(), pm(10, &[(0, 0), (1, 1), (2, 2)])),
        ("eg".to_string(), pm(10, &[(1, 1), (2, 2)])),
        ("es".to_string(), pm(10, &[(0, 5), (1, 6), (2, 7)])),
        ("et".to_string(), pm(10, &[(0, 5), (1, 7), (2, 6)])),
        ("fs".to_string(), pm(10, &[(0, 5)])), // coincides with s_and_t
        ("gs".to_string(), pm(10, &[(1, 6), (2, 7), (3, 8), (4, 9)])),
        ("gt".to_string(), pm(10, &[(1, 7), (2, 6), (3, 9), (4, 8)])),
        ("egs".to_string(), pm(10, &[(1, 6), (2, 7)])),
        ("egt".to_string(), pm(10, &[(1, 7), (2, 6)])),
        ("empty".to_string(), PartialMap::null(10)),
        ("id".to_string(), PartialMap::identity(10)),
    ];
    let model = ConcreteModel::new(10, elems, Vec::new()).expect("fixture model is well-formed");
    let empty = model.lookup_map(&PartialMap::null(10)).unwrap();
    let id = model.lookup_map(&PartialMap::identity(10)).unwrap();
    ConcreteModel::new(
        10,
        model.names().iter().cloned().zip(model.maps().iter().cloned()).collect(),
        vec![empty, id],
    )
    .expect("fixture model is well-formed")
}

pub fn ten_point_model_file() -> ModelFile {
    ten_point_model().to_file()
}

/// Table algebra of the ten-point system with agreement and disagreement.
pub fn ten_point_table_model() -> TableModel {
    from_model(&ten_point_model(), ClosureOps::disagreeable(), 64).expect("closure stays small")
}

/// The partition identifying `(g, eg)`, `(gs, egs)` and `(gt, egt)`.
pub fn ten_point_partition(tm: &TableModel) -> Partition {
    let pairs = [
        (pm(10, &[(1, 1), (2, 2), (3, 3), (4, 4)]), pm(10, &[(1, 1), (2, 2)])),
        (pm(10, &[(1, 6), (2, 7), (3, 8), (4, 9)]), pm(10, &[(1, 6), (2, 7)])),
        (pm(10, &[(1, 7), (2, 6), (3, 9), (4, 8)]), pm(10, &[(1, 7), (2, 6)])),
    ];
    let merges: Vec<Vec<usize>> = pairs
        .iter()
        .map(|(a, b)| {
            vec![
                tm.index_of(a).expect("block element present"),
                tm.index_of(b).expect("block element present"),
            ]
        })
        .collect();
    Partition::from_merges(tm.algebra.size(), &merges).expect("blocks are disjoint")
}

/// The chain `0 < e < 1` with `B = {0, 1}`; its agreement table coincides
/// with multiplication since every element restricts the identity.
pub fn three_element_algebra() -> FiniteAlgebra {
    let mult = vec![0, 0, 0, 0, 1, 1, 0, 1, 2];
    FiniteAlgebra::new(
        3,
        2,
        0,
        mult.clone(),
        Some(vec![0, 1, 2]),
        vec![0, 2],
        vec![2, 0],
        Some(mult),
        None,
        None,
        None,
        None,
    )
    .expect("fixture tables are well-formed")
}

/// A seeded random collection of partial maps on `points` points with a
/// block-generated Boolean test sort. The same seed always produces the
/// same model.
pub fn random_model(
    seed: u64,
    points: usize,
    map_count: usize,
    test_blocks: usize,
) -> ConcreteModel {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |bound: usize| ((rng.next_u32() as u64 * bound as u64) >> 32) as usize;
    let blocks: Vec<usize> = (0..points).map(|_| draw(test_blocks)).collect();
    let mut elems = vec![
        ("id".to_string(), PartialMap::identity(points)),
        ("empty".to_string(), PartialMap::null(points)),
    ];
    for i in 0..map_count {
        let image = (0..points)
            .map(|_| {
                let v = draw(points + 1);
                (v < points).then_some(v)
            })
            .collect();
        elems.push((format!("r{i}"), PartialMap::from_entries(image).unwrap()));
    }
    let mut tests = Vec::new();
    for mask in 0..1usize << test_blocks {
        let members: Vec<usize> = (0..points).filter(|&x| mask >> blocks[x] & 1 == 1).collect();
        let t = TestSet::from_points(points, &members).unwrap();
        elems.push((format!("t{mask}"), t.as_map()));
    }
    let model = ConcreteModel::new(points, elems, Vec::new()).expect("random model well-formed");
    for mask in 0..1usize << test_blocks {
        let members: Vec<usize> = (0..points).filter(|&x| mask >> blocks[x] & 1 == 1).collect();
        let t = TestSet::from_points(points, &members).unwrap();
        tests.push(model.lookup_map(&t.as_map()).unwrap());
    }
    ConcreteModel::new(
        points,
        model.names().iter().cloned().zip(model.maps().iter().cloned()).collect(),
        tests,
    )
    .unwrap()
}

/// Random functional submonoids with tests: closes seeded random models
/// under composition, domain and agreement, skipping seeds whose closure
/// exceeds `max_size`. Deterministic for a fixed starting seed.
pub fn random_corpus(start_seed: u64, count: usize, max_size: usize) -> Vec<(u64, TableModel)> {
    random_corpus_with(start_seed, count, max_size, ClosureOps::with_star())
}

/// As [`random_corpus`], closing under disagreement as well.
pub fn random_corpus_disagreeable(
    start_seed: u64,
    count: usize,
    max_size: usize,
) -> Vec<(u64, TableModel)> {
    random_corpus_with(start_seed, count, max_size, ClosureOps::disagreeable())
}

fn random_corpus_with(
    start_seed: u64,
    count: usize,
    max_size: usize,
    ops: ClosureOps,
) -> Vec<(u64, TableModel)> {
    let mut out = Vec::new();
    let mut seed = start_seed;
    while out.len() < count {
        let points = 3 + (seed % 3) as usize; // 3..=5
        let model = random_model(seed, points, 2, 2);
        let initial = model.element_count();
        if let Ok(tm) = from_model(&model, ops, max_size.saturating_sub(initial)) {
            if tm.algebra.size() <= max_size {
                out.push((seed, tm));
            }
        }
        seed += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::validate;

    #[test]
    fn quasiv_closure_adds_the_missing_composite() {
        let model = quasiv_model();
        assert_eq!(model.element_count(), 13);
        let tm = quasiv_table_model();
        // closure picks up e;s, nothing else
        assert_eq!(tm.algebra.size(), 14);
        let es = pm(8, &[(0, 4), (1, 5), (2, 6)]);
        assert!(tm.index_of(&es).is_some());
        assert!(validate(&tm.algebra).is_valid());
        assert_eq!(tm.algebra.tests().len(), 4);
    }

    #[test]
    fn quasiv_domain_elements_match_the_listing() {
        let tm = quasiv_table_model();
        let d = tm.algebra.domain_elements().unwrap();
        assert_eq!(d.len(), 9); // 0, 1, beta, beta', D(s), e, f, g, ef
        let expected = [
            PartialMap::null(8),
            PartialMap::identity(8),
            ts(8, &[0, 1, 2, 3, 4, 5]).as_map(),
            ts(8, &[6, 7]).as_map(),
            pm(8, &[(0, 0), (1, 1), (2, 2), (3, 3)]),
            pm(8, &[(0, 0), (1, 1), (2, 2)]),
            pm(8, &[(2, 2), (3, 3)]),
            pm(8, &[(0, 0), (1, 1)]),
            pm(8, &[(2, 2)]),
        ];
        for m in expected {
            let i = tm.index_of(&m).unwrap();
            assert!(d.contains(&i));
        }
    }

    #[test]
    fn quasiv_wc_closure_is_already_closed() {
        let tm = quasiv_table_model_wc();
        assert_eq!(tm.algebra.size(), 14);
    }

    #[test]
    fn ten_point_closure_is_already_closed() {
        let model = ten_point_model();
        assert_eq!(model.element_count(), 16); // fs and s_and_t coincide
        let tm = ten_point_table_model();
        assert_eq!(tm.algebra.size(), 16);
        assert!(validate(&tm.algebra).is_valid());
        assert_eq!(tm.algebra.tests().len(), 2);
    }

    #[test]
    fn fixture_files_round_trip() {
        for file in [quasiv_model_file(), ten_point_model_file()] {
            let text = serde_json::to_string_pretty(&file).unwrap();
            let parsed: ModelFile = serde_json::from_str(&text).unwrap();
            let a = ConcreteModel::from_file(&file).unwrap();
            let b = ConcreteModel::from_file(&parsed).unwrap();
            assert_eq!(a.element_count(), b.element_count());
            for m in a.maps() {
                assert!(b.lookup_map(m).is_some());
            }
        }
    }

    #[test]
    fn random_models_are_reproducible() {
        let a = random_model(7, 4, 3, 2);
        let b = random_model(7, 4, 3, 2);
        assert_eq!(a.element_count(), b.element_count());
        for (x, y) in a.maps().iter().zip(b.maps()) {
            assert_eq!(x, y);
        }
        let corpus = random_corpus(100, 3, 40);
        assert_eq!(corpus.len(), 3);
        for (_, tm) in &corpus {
            assert!(tm.algebra.size() <= 40);
            assert!(validate(&tm.algebra).is_valid());
        }
    }
}
