//! Concrete models: partial self-maps on a finite point set.
//!
//! A [`PartialMap`] is a possibly-undefined self-map on points `0..n`; it
//! models a deterministic program that may fail to halt. A [`TestSet`] is a
//! restriction of the identity map, modelling a halting boolean condition
//! run as a program. Composition reads left to right: `(fg)(x) = g(f(x))`.
//!
//! All operations are pure and total on size-compatible inputs. Mixing maps
//! over different point sets is a caller bug and panics; file loaders and
//! the CLI validate sizes up front so this cannot be reached from input.

use std::fmt;

use thiserror::Error;

/// The shared finite state space: points are `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PointSet {
    pub size: usize,
}

impl PointSet {
    pub fn new(size: usize) -> Self {
        PointSet { size }
    }

    pub fn points(&self) -> impl Iterator<Item = usize> {
        0..self.size
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PfunError {
    #[error("map entry {value} at point {point} is outside the point set 0..{size}")]
    EntryOutOfRange { point: usize, value: usize, size: usize },
    #[error("test member {value} is outside the point set 0..{size}")]
    MemberOutOfRange { value: usize, size: usize },
    #[error("full model on {points} points would have {count} maps, over the limit of {limit}")]
    ModelTooLarge { points: usize, count: u128, limit: u128 },
}

/// A partial self-map on a finite point set, stored densely with an
/// undefined marker per point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialMap {
    image: Vec<Option<usize>>,
}

impl PartialMap {
    /// Builds a map from per-point entries, validating that every defined
    /// entry stays inside the point set.
    pub fn from_entries(image: Vec<Option<usize>>) -> Result<Self, PfunError> {
        let size = image.len();
        for (point, entry) in image.iter().enumerate() {
            if let Some(value) = *entry {
                if value >= size {
                    return Err(PfunError::EntryOutOfRange { point, value, size });
                }
            }
        }
        Ok(PartialMap { image })
    }

    /// The identity map `1`, total and fixing every point.
    pub fn identity(size: usize) -> Self {
        PartialMap { image: (0..size).map(Some).collect() }
    }

    /// The null map `0`, defined nowhere.
    pub fn null(size: usize) -> Self {
        PartialMap { image: vec![None; size] }
    }

    pub fn space(&self) -> PointSet {
        PointSet::new(self.image.len())
    }

    pub fn points(&self) -> usize {
        self.image.len()
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.image[x]
    }

    pub fn entries(&self) -> &[Option<usize>] {
        &self.image
    }

    /// Left-to-right composition: `self` first, then `g`.
    pub fn compose(&self, g: &PartialMap) -> PartialMap {
        assert_eq!(self.points(), g.points(), "composed maps must share a point set");
        PartialMap { image: self.image.iter().map(|e| e.and_then(|y| g.image[y])).collect() }
    }

    /// `D(f)`: the identity restricted to the domain of `f`.
    pub fn domain_of(&self) -> TestSet {
        TestSet { members: self.image.iter().map(Option::is_some).collect() }
    }

    /// Pointwise intersection: defined where both maps are defined and agree.
    pub fn intersect(&self, g: &PartialMap) -> PartialMap {
        assert_eq!(self.points(), g.points(), "intersected maps must share a point set");
        PartialMap {
            image: self
                .image
                .iter()
                .zip(&g.image)
                .map(|(a, b)| match (a, b) {
                    (Some(x), Some(y)) if x == y => Some(*x),
                    _ => None,
                })
                .collect(),
        }
    }

    /// `f * g`: the test marking where both maps are defined and agree.
    pub fn agree_star(&self, g: &PartialMap) -> TestSet {
        assert_eq!(self.points(), g.points(), "compared maps must share a point set");
        TestSet {
            members: self
                .image
                .iter()
                .zip(&g.image)
                .map(|(a, b)| matches!((a, b), (Some(x), Some(y)) if x == y))
                .collect(),
        }
    }

    /// `f != g`: the test marking where both maps are defined but differ.
    pub fn disagree(&self, g: &PartialMap) -> TestSet {
        assert_eq!(self.points(), g.points(), "compared maps must share a point set");
        TestSet {
            members: self
                .image
                .iter()
                .zip(&g.image)
                .map(|(a, b)| matches!((a, b), (Some(x), Some(y)) if x != y))
                .collect(),
        }
    }

    /// Natural order: graph inclusion, equivalently `f = D(f)g`.
    pub fn natural_leq(&self, g: &PartialMap) -> bool {
        assert_eq!(self.points(), g.points(), "compared maps must share a point set");
        self.image.iter().zip(&g.image).all(|(a, b)| match a {
            Some(x) => *b == Some(*x),
            None => true,
        })
    }

    pub fn is_identity_restriction(&self) -> bool {
        self.image.iter().enumerate().all(|(x, e)| match e {
            Some(y) => *y == x,
            None => true,
        })
    }

    /// `P(f) = D(f)'`: the identity restricted to where `f` is undefined.
    pub fn antidomain(&self) -> TestSet {
        self.domain_of().complement()
    }

    /// `f ⋈ g`: the test marking where `f`, `g` do not disagree (they agree,
    /// or at least one is undefined).
    pub fn bowtie(&self, g: &PartialMap) -> TestSet {
        self.disagree(g).complement()
    }

    /// Preferential union `f ⊔ g`: `f` where defined, otherwise `g`.
    pub fn pref_union(&self, g: &PartialMap) -> PartialMap {
        assert_eq!(self.points(), g.points(), "joined maps must share a point set");
        PartialMap { image: self.image.iter().zip(&g.image).map(|(a, b)| a.or(*b)).collect() }
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match e {
                Some(y) => write!(f, "{y}")?,
                None => write!(f, "-")?,
            }
        }
        write!(f, "]")
    }
}

/// A restriction of the identity map, kept as a point subset for O(1)
/// membership checks.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TestSet {
    members: Vec<bool>,
}

impl TestSet {
    pub fn empty(size: usize) -> Self {
        TestSet { members: vec![false; size] }
    }

    pub fn full(size: usize) -> Self {
        TestSet { members: vec![true; size] }
    }

    pub fn from_points(size: usize, points: &[usize]) -> Result<Self, PfunError> {
        let mut members = vec![false; size];
        for &p in points {
            if p >= size {
                return Err(PfunError::MemberOutOfRange { value: p, size });
            }
            members[p] = true;
        }
        Ok(TestSet { members })
    }

    /// Reads a test back off a map, if the map restricts the identity.
    pub fn from_map(map: &PartialMap) -> Option<Self> {
        if map.is_identity_restriction() {
            Some(map.domain_of())
        } else {
            None
        }
    }

    pub fn points(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members[x]
    }

    pub fn member_points(&self) -> Vec<usize> {
        (0..self.points()).filter(|&x| self.members[x]).collect()
    }

    /// Test complement within the shared point set.
    pub fn complement(&self) -> TestSet {
        TestSet { members: self.members.iter().map(|b| !b).collect() }
    }

    pub fn as_map(&self) -> PartialMap {
        PartialMap {
            image: self
                .members
                .iter()
                .enumerate()
                .map(|(x, &m)| if m { Some(x) } else { None })
                .collect(),
        }
    }
}

impl fmt::Debug for TestSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for x in 0..self.points() {
            if self.members[x] {
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
                first = false;
            }
        }
        write!(f, "}}")
    }
}

/// Extended if-then-else `(f,a)[g,h]`: branch on whether `f`'s output lands
/// in `a`; undefined wherever `f` is.
pub fn ext_ite(f: &PartialMap, a: &TestSet, g: &PartialMap, h: &PartialMap) -> PartialMap {
    let n = f.points();
    assert!(a.points() == n && g.points() == n && h.points() == n, "shared point set required");
    let image = (0..n)
        .map(|x| match f.get(x) {
            Some(y) if a.contains(y) => g.get(x),
            Some(_) => h.get(x),
            None => None,
        })
        .collect();
    PartialMap { image }
}

/// Weak comparison `(f=g)[h,k]`: `h` where `f` and `g` agree, `k` where both
/// are defined but differ, undefined where either is undefined.
pub fn weak_cmp(f: &PartialMap, g: &PartialMap, h: &PartialMap, k: &PartialMap) -> PartialMap {
    let n = f.points();
    assert!(g.points() == n && h.points() == n && k.points() == n, "shared point set required");
    let image = (0..n)
        .map(|x| match (f.get(x), g.get(x)) {
            (Some(a), Some(b)) if a == b => h.get(x),
            (Some(_), Some(_)) => k.get(x),
            _ => None,
        })
        .collect();
    PartialMap { image }
}

/// `(a:f)`, while-do with a halting test: iterate `f` from `x` while the
/// current point satisfies `a`; the result is the first point outside `a`.
///
/// Undefined when the iteration leaves the domain of `f` while still inside
/// `a`, or revisits a point (which on a finite space means it loops
/// forever). At most `size + 1` steps are examined.
pub fn while_do(a: &TestSet, f: &PartialMap) -> PartialMap {
    let n = f.points();
    assert_eq!(a.points(), n, "shared point set required");
    let mut image = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        for s in seen.iter_mut() {
            *s = false;
        }
        let mut cur = start;
        image.push(loop {
            if !a.contains(cur) {
                break Some(cur);
            }
            seen[cur] = true;
            match f.get(cur) {
                Some(next) if !seen[next] => cur = next,
                _ => break None, // left the domain, or entered a cycle
            }
        });
    }
    PartialMap { image }
}

/// `((f,a):g)`, extended while-do: keep applying `g` while `f` of the
/// current point lands in `a`; exit with the current point once `f` of it
/// lands in the complement.
///
/// Undefined when `f` is undefined at the current point, when `g` is
/// undefined while the loop must continue, or on a revisit.
pub fn ext_while(f: &PartialMap, a: &TestSet, g: &PartialMap) -> PartialMap {
    let n = f.points();
    assert!(a.points() == n && g.points() == n, "shared point set required");
    let mut image = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        for s in seen.iter_mut() {
            *s = false;
        }
        let mut cur = start;
        image.push(loop {
            match f.get(cur) {
                None => break None,
                Some(y) if !a.contains(y) => break Some(cur),
                Some(_) => {
                    seen[cur] = true;
                    match g.get(cur) {
                        Some(next) if !seen[next] => cur = next,
                        _ => break None,
                    }
                }
            }
        });
    }
    PartialMap { image }
}

const FULL_MODEL_LIMIT: u128 = 1_000_000;

/// Every partial map on `n` points, `(n+1)^n` in total, together with all
/// `2^n` tests. Deduplicated by construction; the identity and null map are
/// always present.
pub fn full_model(n: usize) -> Result<(Vec<PartialMap>, Vec<TestSet>), PfunError> {
    let count = (n as u128 + 1).pow(n as u32);
    if count > FULL_MODEL_LIMIT {
        return Err(PfunError::ModelTooLarge { points: n, count, limit: FULL_MODEL_LIMIT });
    }
    let mut maps = Vec::with_capacity(count as usize);
    let mut image = vec![None; n];
    loop {
        maps.push(PartialMap { image: image.clone() });
        // odometer over entries None, Some(0), .., Some(n-1)
        let mut pos = 0;
        loop {
            if pos == n {
                let tests = (0..1u64 << n)
                    .map(|bits| TestSet { members: (0..n).map(|x| bits >> x & 1 == 1).collect() })
                    .collect();
                return Ok((maps, tests));
            }
            match image[pos] {
                None => {
                    image[pos] = Some(0);
                    break;
                }
                Some(v) if v + 1 < n => {
                    image[pos] = Some(v + 1);
                    break;
                }
                Some(_) => {
                    image[pos] = None;
                    pos += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(entries: &[Option<usize>]) -> PartialMap {
        PartialMap::from_entries(entries.to_vec()).unwrap()
    }

    fn test_set(n: usize, pts: &[usize]) -> TestSet {
        TestSet::from_points(n, pts).unwrap()
    }

    // The eight-point system: s sends {0,1,2,3} up by four, beta holds on
    // {0..5}.
    fn eight_point_s() -> PartialMap {
        map(&[Some(4), Some(5), Some(6), Some(7), None, None, None, None])
    }

    fn eight_point_beta() -> TestSet {
        test_set(8, &[0, 1, 2, 3, 4, 5])
    }

    // The ten-point system: s adds five, t adds five but swaps within pairs
    // past the first.
    fn ten_point_s() -> PartialMap {
        map(&[Some(5), Some(6), Some(7), Some(8), Some(9), None, None, None, None, None])
    }

    fn ten_point_t() -> PartialMap {
        map(&[Some(5), Some(7), Some(6), Some(9), Some(8), None, None, None, None, None])
    }

    // Independent pointwise oracle used to freeze derived expectations.
    fn oracle_ext_ite(
        f: &PartialMap,
        a: &TestSet,
        g: &PartialMap,
        h: &PartialMap,
    ) -> Vec<Option<usize>> {
        (0..f.points())
            .map(|x| match f.get(x) {
                None => None,
                Some(y) => {
                    if a.contains(y) {
                        g.get(x)
                    } else {
                        h.get(x)
                    }
                }
            })
            .collect()
    }

    #[test]
    fn compose_restricts_through_a_test() {
        let s = eight_point_s();
        let beta = eight_point_beta();
        let s_beta = s.compose(&beta.as_map());
        assert_eq!(s_beta, map(&[Some(4), Some(5), None, None, None, None, None, None]));
        let s_beta1 = s.compose(&beta.complement().as_map());
        assert_eq!(s_beta1.domain_of(), test_set(8, &[2, 3]));
    }

    #[test]
    fn compose_identity_and_null() {
        let s = eight_point_s();
        assert_eq!(s.compose(&PartialMap::identity(8)), s);
        assert_eq!(s.compose(&PartialMap::null(8)), PartialMap::null(8));
        assert_eq!(PartialMap::null(8).compose(&s), PartialMap::null(8));
    }

    #[test]
    #[should_panic(expected = "point set")]
    fn compose_rejects_mismatched_spaces() {
        let _ = PartialMap::identity(3).compose(&PartialMap::identity(4));
    }

    #[test]
    fn domain_examples() {
        let s = eight_point_s();
        assert_eq!(s.domain_of(), test_set(8, &[0, 1, 2, 3]));
        assert_eq!(PartialMap::identity(5).domain_of(), TestSet::full(5));
        let efs = map(&[None, None, Some(6), None, None, None, None, None]);
        assert_eq!(efs.domain_of(), test_set(8, &[2]));
    }

    #[test]
    fn complement_is_an_involution() {
        let beta = eight_point_beta();
        assert_eq!(beta.complement(), test_set(8, &[6, 7]));
        assert_eq!(TestSet::full(4).complement(), TestSet::empty(4));
        assert_eq!(beta.complement().complement(), beta);
    }

    #[test]
    fn intersect_examples() {
        let s = ten_point_s();
        let t = ten_point_t();
        let mut expect = vec![None; 10];
        expect[0] = Some(5);
        assert_eq!(s.intersect(&t), map(&expect));
        assert_eq!(s.intersect(&s), s);
        assert_eq!(s.intersect(&PartialMap::null(10)), PartialMap::null(10));
    }

    #[test]
    fn agree_and_disagree_examples() {
        let s = ten_point_s();
        let t = ten_point_t();
        assert_eq!(s.agree_star(&t), test_set(10, &[0]));
        assert_eq!(s.disagree(&t), test_set(10, &[1, 2, 3, 4]));
        assert_eq!(s.agree_star(&s), s.domain_of());
        assert_eq!(s.disagree(&s), TestSet::empty(10));
        assert_eq!(s.disagree(&PartialMap::null(10)), TestSet::empty(10));
        // disjoint domains agree nowhere
        let left = map(&[Some(1), None, None]);
        let right = map(&[None, Some(0), None]);
        assert_eq!(left.agree_star(&right), TestSet::empty(3));
    }

    #[test]
    fn agree_star_is_domain_of_intersection() {
        let (maps, _) = full_model(2).unwrap();
        for f in &maps {
            for g in &maps {
                assert_eq!(f.agree_star(g), f.intersect(g).domain_of());
            }
        }
    }

    #[test]
    fn ext_ite_examples() {
        let s = eight_point_s();
        let full = TestSet::full(8);
        let u = map(&[Some(0), Some(0), Some(1), None, Some(2), None, None, Some(7)]);
        // branch on the full test collapses to D(s)u
        assert_eq!(ext_ite(&s, &full, &u, &u), s.domain_of().as_map().compose(&u));
        // null scrutinee forces the null result
        assert_eq!(ext_ite(&PartialMap::null(8), &eight_point_beta(), &u, &s), PartialMap::null(8));
        // frozen from the pointwise oracle: ite(s, beta, 1, 0) marks D(s beta)
        let got = ext_ite(&s, &eight_point_beta(), &PartialMap::identity(8), &PartialMap::null(8));
        assert_eq!(
            got.entries(),
            oracle_ext_ite(&s, &eight_point_beta(), &PartialMap::identity(8), &PartialMap::null(8))
        );
        assert_eq!(got, test_set(8, &[0, 1]).as_map());
    }

    #[test]
    fn ext_ite_matches_decomposition() {
        // (f,a)[g,h] = D(fa)g ∪ D(fa')h on every tuple of the 2-point model
        let (maps, tests) = full_model(2).unwrap();
        for f in &maps {
            for a in &tests {
                for g in &maps {
                    for h in &maps {
                        let lhs = ext_ite(f, a, g, h);
                        let left = f.compose(&a.as_map()).domain_of().as_map().compose(g);
                        let right =
                            f.compose(&a.complement().as_map()).domain_of().as_map().compose(h);
                        assert_eq!(lhs, left.pref_union(&right));
                    }
                }
            }
        }
    }

    #[test]
    fn weak_cmp_examples() {
        let s = ten_point_s();
        let t = ten_point_t();
        let one = PartialMap::identity(10);
        let zero = PartialMap::null(10);
        assert_eq!(weak_cmp(&s, &t, &one, &zero), test_set(10, &[0]).as_map());
        assert_eq!(weak_cmp(&s, &t, &zero, &one), test_set(10, &[1, 2, 3, 4]).as_map());
    }

    #[test]
    fn weak_cmp_matches_decomposition() {
        // (f=g)[h,k] = (f*g)h ∪ (f≠g)k, and (f=f)[h,k] = D(f)h
        let (maps, _) = full_model(2).unwrap();
        for f in &maps {
            for g in &maps {
                for h in &maps {
                    for k in &maps {
                        let lhs = weak_cmp(f, g, h, k);
                        let agree = f.agree_star(g).as_map().compose(h);
                        let differ = f.disagree(g).as_map().compose(k);
                        assert_eq!(lhs, agree.pref_union(&differ));
                    }
                    assert_eq!(weak_cmp(f, f, h, h), f.domain_of().as_map().compose(h));
                }
            }
        }
    }

    #[test]
    fn while_do_examples() {
        // always-true guard never exits
        let swap = map(&[Some(1), Some(0)]);
        assert_eq!(while_do(&TestSet::full(2), &swap), PartialMap::null(2));
        // empty guard exits immediately everywhere
        let f = map(&[Some(1), Some(0)]);
        assert_eq!(while_do(&TestSet::empty(2), &f), PartialMap::identity(2));
        // counting loop: guard {0,1,2}, step x+1 with domain {0,1,2}
        let step = map(&[Some(1), Some(2), Some(3), None]);
        let got = while_do(&test_set(4, &[0, 1, 2]), &step);
        assert_eq!(got, map(&[Some(3), Some(3), Some(3), Some(3)]));
    }

    #[test]
    fn while_do_detects_cycles_and_domain_exits() {
        // 0 -> 1 -> 0 cycle inside the guard, 2 leaves the domain
        let f = map(&[Some(1), Some(0), None, None]);
        let a = test_set(4, &[0, 1, 2]);
        assert_eq!(while_do(&a, &f), map(&[None, None, None, Some(3)]));
    }

    #[test]
    fn ext_while_examples() {
        let g = map(&[Some(1), Some(2), Some(3), None]);
        let a = test_set(4, &[0, 1]);
        // testing through the identity recovers plain while-do
        assert_eq!(ext_while(&PartialMap::identity(4), &a, &g), while_do(&a, &g));
        // null test map is undefined everywhere
        assert_eq!(ext_while(&PartialMap::null(4), &a, &g), PartialMap::null(4));
        // empty guard: exit at step zero wherever the test map halts
        let f = map(&[Some(0), None, Some(2), Some(1)]);
        assert_eq!(ext_while(&f, &TestSet::empty(4), &g), f.domain_of().as_map());
    }

    #[test]
    fn ext_while_undefined_when_test_map_misses() {
        // f undefined at the point reached mid-loop kills the run
        let f = map(&[Some(0), None, Some(0), None]);
        let a = test_set(4, &[0]);
        let g = map(&[Some(1), Some(2), Some(3), Some(3)]);
        // start 0: f(0)=0 in a, g -> 1, f(1) undefined -> undefined
        // start 2: f(2)=0 in a, g -> 3, f(3) undefined -> undefined
        assert_eq!(ext_while(&f, &a, &g), map(&[None, None, None, None]));
    }

    #[test]
    fn natural_leq_examples() {
        let s = ten_point_s();
        let t = ten_point_t();
        assert!(!s.natural_leq(&t));
        assert!(s.natural_leq(&s));
        // ef <= f in the eight-point system
        let ef = map(&[None, None, Some(2), None, None, None, None, None]);
        let f = map(&[None, None, Some(2), Some(3), None, None, None, None]);
        assert!(ef.natural_leq(&f));
        assert!(!f.natural_leq(&ef));
        // graph inclusion coincides with f = D(f)g
        let (maps, _) = full_model(2).unwrap();
        for f in &maps {
            for g in &maps {
                assert_eq!(f.natural_leq(g), *f == f.domain_of().as_map().compose(g));
            }
        }
    }

    #[test]
    fn natural_order_is_stable() {
        let (maps, _) = full_model(2).unwrap();
        for f1 in &maps {
            for g1 in &maps {
                if !f1.natural_leq(g1) {
                    continue;
                }
                for f2 in &maps {
                    for g2 in &maps {
                        if f2.natural_leq(g2) {
                            assert!(f1.compose(f2).natural_leq(&g1.compose(g2)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn modal_operations() {
        let s = eight_point_s();
        assert_eq!(s.antidomain(), test_set(8, &[4, 5, 6, 7]));
        let t = ten_point_t();
        let s10 = ten_point_s();
        assert_eq!(s10.bowtie(&t), test_set(10, &[0, 5, 6, 7, 8, 9]));
        assert_eq!(s.pref_union(&s), s);
        // reverse identities from the modal signature
        let (maps, _) = full_model(2).unwrap();
        for f in &maps {
            for g in &maps {
                let star = f.agree_star(g).as_map();
                let via_bowtie = f
                    .bowtie(g)
                    .as_map()
                    .compose(&f.domain_of().as_map())
                    .compose(&g.domain_of().as_map());
                assert_eq!(star, via_bowtie);
                assert_eq!(f.disagree(g), f.bowtie(g).complement());
                // s ⊔ t = D(s)[s, t]
                let d = f.domain_of();
                assert_eq!(f.pref_union(g), ext_ite(&PartialMap::identity(2), &d, f, g));
            }
        }
    }

    #[test]
    fn ext_ite_via_pref_union_of_domains() {
        // (s,a)[t,u] = D(sa)t ⊔ D(sa')u
        let (maps, tests) = full_model(2).unwrap();
        for s in &maps {
            for a in &tests {
                for t in &maps {
                    for u in &maps {
                        let lhs = ext_ite(s, a, t, u);
                        let rhs =
                            s.compose(&a.as_map()).domain_of().as_map().compose(t).pref_union(
                                &s.compose(&a.complement().as_map())
                                    .domain_of()
                                    .as_map()
                                    .compose(u),
                            );
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn full_model_counts() {
        let (m2, t2) = full_model(2).unwrap();
        assert_eq!((m2.len(), t2.len()), (9, 4));
        let (m3, t3) = full_model(3).unwrap();
        assert_eq!((m3.len(), t3.len()), (64, 8));
        let (m0, t0) = full_model(0).unwrap();
        assert_eq!((m0.len(), t0.len()), (1, 1));
        let (m4, t4) = full_model(4).unwrap();
        assert_eq!((m4.len(), t4.len()), (625, 16));
        assert_eq!(m0[0], PartialMap::identity(0));
        assert!(m2.contains(&PartialMap::identity(2)));
        assert!(m2.contains(&PartialMap::null(2)));
        assert!(matches!(full_model(20), Err(PfunError::ModelTooLarge { .. })));
    }

    #[test]
    fn loop_is_the_stabilizing_union_of_guarded_powers() {
        // ((f,a):g) = U_i (D(fa)g)^i D(fa') once the union stops growing
        let (maps, tests) = full_model(2).unwrap();
        for f in &maps {
            for a in &tests {
                for g in &maps {
                    let step = f.compose(&a.as_map()).domain_of().as_map().compose(g);
                    let exit = f.compose(&a.complement().as_map()).domain_of().as_map();
                    let mut power = PartialMap::identity(2);
                    let mut union = exit.clone();
                    loop {
                        power = power.compose(&step);
                        let next = union.pref_union(&power.compose(&exit));
                        if next == union {
                            break;
                        }
                        union = next;
                    }
                    assert_eq!(union, ext_while(f, a, g));
                }
            }
        }
    }

    #[test]
    fn kleenean_conditions_hold_in_concrete_models() {
        let (maps, tests) = full_model(2).unwrap();
        for t in &maps {
            for a in &tests {
                for s in &maps {
                    let w = ext_while(t, a, s);
                    // exits land outside the guard: w D(t a') = w
                    let exit = t.compose(&a.complement().as_map()).domain_of();
                    assert_eq!(w.compose(&exit.as_map()), w);
                    // D(t a) s u <= u implies w u <= u
                    let enter = t.compose(&a.as_map()).domain_of().as_map();
                    for u in &maps {
                        if enter.compose(s).compose(u).natural_leq(u) {
                            assert!(w.compose(u).natural_leq(u));
                        }
                    }
                }
            }
        }
    }
}
