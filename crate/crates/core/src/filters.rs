//! Filters of the domain semilattice, determinative pairs, and the
//! construction of a faithful representation by partial maps.
//!
//! In a finite algebra every filter of `D(S)` is principal, so a filter is
//! stored as its generator `g`: the realized set is `{f : g = g f}`,
//! membership is `g f = g`, and the equivalence `x ~ y iff e x = e y for
//! some e in F` collapses to `g x = g y`. The state space is assembled
//! from the maximally separating filters of all pairs `a` not below `b`,
//! one block of states per filter, deduplicated by generator.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::FiniteAlgebra;
use crate::context::{ConcreteModel, CtxError, EvalContext, OpKind};
use crate::pfun::{self, PartialMap, TestSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiltersError {
    #[error("algebra carries no domain table")]
    MissingDomain,
    #[error("element {0} is not a domain element")]
    NotDomainElement(usize),
    #[error("element {0} already belongs to the filter")]
    AlreadyInFilter(usize),
    #[error("`separating` is undefined: {a} <= {b}")]
    NotSeparable { a: usize, b: usize },
    #[error("representatives of a class disagree under right multiplication by {s}; the input is not a right congruence")]
    RepresentativeDisagreement { s: usize },
}

/// A filter of `D(S)`, stored as its principal generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Filter {
    pub generator: usize,
}

impl Filter {
    /// Membership: `e` is in the filter iff `g e = g`.
    pub fn contains(&self, alg: &FiniteAlgebra, e: usize) -> bool {
        alg.m(self.generator, e) == self.generator
    }

    /// The realized subset of `D(S)`, ascending.
    pub fn elements(&self, alg: &FiniteAlgebra) -> Result<Vec<usize>, FiltersError> {
        let d = alg.domain_elements().map_err(|_| FiltersError::MissingDomain)?;
        Ok(d.into_iter().filter(|&e| self.contains(alg, e)).collect())
    }

    pub fn is_proper(&self, alg: &FiniteAlgebra) -> bool {
        self.generator != alg.zero_elem()
    }
}

/// One filter per nonzero domain element: all proper filters of the finite
/// meet-semilattice `D(S)`.
pub fn all_filters(alg: &FiniteAlgebra) -> Result<Vec<Filter>, FiltersError> {
    let d = alg.domain_elements().map_err(|_| FiltersError::MissingDomain)?;
    Ok(d.into_iter()
        .filter(|&g| g != alg.zero_elem())
        .map(|generator| Filter { generator })
        .collect())
}

/// The filter generated by the old generator meet `h`; it properly
/// contains the original. `h` must be a domain element outside the filter.
pub fn extend_filter(
    alg: &FiniteAlgebra,
    filter: &Filter,
    h: usize,
) -> Result<Filter, FiltersError> {
    let d = alg.d(h).ok_or(FiltersError::MissingDomain)?;
    if d != h {
        return Err(FiltersError::NotDomainElement(h));
    }
    if filter.contains(alg, h) {
        return Err(FiltersError::AlreadyInFilter(h));
    }
    Ok(Filter { generator: alg.m(filter.generator, h) })
}

/// Filters separating `a` from `b`: those containing `D(a)` whose every
/// member `e` has `e a != e b`; with a principal generator `g` this is
/// `g D(a) = g` and `g a != g b`.
pub fn separating_filters(
    alg: &FiniteAlgebra,
    a: usize,
    b: usize,
) -> Result<Vec<Filter>, FiltersError> {
    if alg.leq(a, b).map_err(|_| FiltersError::MissingDomain)? {
        return Err(FiltersError::NotSeparable { a, b });
    }
    let da = alg.d(a).expect("domain table checked above");
    Ok(all_filters(alg)?
        .into_iter()
        .filter(|f| {
            let g = f.generator;
            alg.m(g, da) == g && alg.m(g, a) != alg.m(g, b)
        })
        .collect())
}

/// The maximal separating filters: those whose generator is minimal in the
/// natural order among separating generators (a larger filter has a
/// smaller generator).
pub fn maximal_separating(
    alg: &FiniteAlgebra,
    a: usize,
    b: usize,
) -> Result<Vec<Filter>, FiltersError> {
    let separating = separating_filters(alg, a, b)?;
    Ok(separating
        .iter()
        .filter(|f| {
            separating.iter().all(|other| {
                other.generator == f.generator || !alg.leq(other.generator, f.generator).unwrap()
            })
        })
        .copied()
        .collect())
}

/// The right ideal `W = {a : D(a) not in F}` together with the classes of
/// `x ~ y iff g x = g y` over the complement of `W`.
#[derive(Debug, Clone, Serialize)]
pub struct DeterminativePair {
    pub filter: Filter,
    pub excluded: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

pub fn determinative_pair(
    alg: &FiniteAlgebra,
    filter: &Filter,
) -> Result<DeterminativePair, FiltersError> {
    if !alg.has_domain() {
        return Err(FiltersError::MissingDomain);
    }
    let g = filter.generator;
    let mut excluded = Vec::new();
    let mut by_key: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..alg.size() {
        let dx = alg.d(x).unwrap();
        if alg.m(g, dx) != g {
            excluded.push(x);
        } else {
            by_key.entry(alg.m(g, x)).or_default().push(x);
        }
    }
    let mut classes: Vec<Vec<usize>> = by_key.into_values().collect();
    classes.sort_by_key(|c| c[0]);
    Ok(DeterminativePair { filter: *filter, excluded, classes })
}

impl DeterminativePair {
    fn class_of(&self, alg: &FiniteAlgebra, x: usize) -> Option<usize> {
        let g = self.filter.generator;
        let key = alg.m(g, x);
        self.classes.iter().position(|c| alg.m(g, c[0]) == key)
    }
}

/// The action of `s` on the classes: a class moves to the class of any
/// representative times `s`, undefined when that lands in the ideal. All
/// representatives are checked to agree; disagreement means the input was
/// not a right congruence and is surfaced as an error.
pub fn psi(
    alg: &FiniteAlgebra,
    pair: &DeterminativePair,
    s: usize,
) -> Result<PartialMap, FiltersError> {
    let n = pair.classes.len();
    let mut image = Vec::with_capacity(n);
    for class in &pair.classes {
        let mut outcome: Option<Option<usize>> = None;
        for &x in class {
            let xs = alg.m(x, s);
            let target = if pair.excluded.contains(&xs) { None } else { pair.class_of(alg, xs) };
            match &outcome {
                None => outcome = Some(target),
                Some(prev) if *prev == target => {}
                Some(_) => return Err(FiltersError::RepresentativeDisagreement { s }),
            }
        }
        image.push(outcome.flatten());
    }
    Ok(PartialMap::from_entries(image).expect("class indices are in range"))
}

/// One block of the assembled state space.
#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub generator: usize,
    /// The pair whose separation this filter witnesses (provenance only).
    pub pair: (usize, usize),
    pub classes: Vec<Vec<usize>>,
    #[serde(skip)]
    pub offset: usize,
}

/// The assembled map `theta` from algebra elements to partial maps on the
/// disjoint union of all component state spaces.
#[derive(Debug, Clone)]
pub struct Representation {
    pub components: Vec<Component>,
    pub state_count: usize,
    pub images: Vec<PartialMap>,
}

/// Builds the representation from the maximally separating filters of
/// every pair `a` not below `b`, deduplicated by generator.
pub fn build_representation(alg: &FiniteAlgebra) -> Result<Representation, FiltersError> {
    if !alg.has_domain() {
        return Err(FiltersError::MissingDomain);
    }
    let mut components: Vec<Component> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for a in 0..alg.size() {
        for b in 0..alg.size() {
            if alg.leq(a, b).unwrap() {
                continue;
            }
            for f in maximal_separating(alg, a, b)? {
                if !seen.contains(&f.generator) {
                    seen.push(f.generator);
                    let pair = determinative_pair(alg, &f)?;
                    components.push(Component {
                        generator: f.generator,
                        pair: (a, b),
                        classes: pair.classes,
                        offset: 0,
                    });
                }
            }
        }
    }
    let mut offset = 0;
    for c in &mut components {
        c.offset = offset;
        offset += c.classes.len();
    }
    let state_count = offset;

    let pairs: Vec<DeterminativePair> = components
        .iter()
        .map(|c| determinative_pair(alg, &Filter { generator: c.generator }))
        .collect::<Result<_, _>>()?;
    let mut images = Vec::with_capacity(alg.size());
    for s in 0..alg.size() {
        let mut image = vec![None; state_count];
        for (c, pair) in components.iter().zip(&pairs) {
            let local = psi(alg, pair, s)?;
            for (i, e) in local.entries().iter().enumerate() {
                image[c.offset + i] = e.map(|y| c.offset + y);
            }
        }
        images.push(PartialMap::from_entries(image).expect("state indices in range"));
    }
    Ok(Representation { components, state_count, images })
}

/// One failed faithfulness check, with its location.
#[derive(Debug, Clone, Serialize)]
pub struct RepFailure {
    pub check: String,
    pub location: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RepReport {
    pub failures: Vec<RepFailure>,
}

impl RepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn push(&mut self, check: &str, location: Vec<usize>, detail: String) {
        self.failures.push(RepFailure { check: check.to_string(), location, detail });
    }
}

/// Checks that the representation is injective and preserves every
/// operation the algebra carries; test complements must tile the whole
/// state space (reported separately as disjointness and coverage).
pub fn verify_representation(alg: &FiniteAlgebra, rep: &Representation) -> RepReport {
    let mut report = RepReport::default();
    let n = alg.size();
    let theta = |s: usize| &rep.images[s];
    for s in 0..n {
        for t in s + 1..n {
            if theta(s) == theta(t) {
                report.push("injective", vec![s, t], "distinct elements share an image".into());
            }
        }
    }
    if *theta(alg.one_elem()) != PartialMap::identity(rep.state_count) {
        report.push("one", vec![alg.one_elem()], "image of 1 is not the identity".into());
    }
    if *theta(alg.zero_elem()) != PartialMap::null(rep.state_count) {
        report.push("zero", vec![alg.zero_elem()], "image of 0 is not the null map".into());
    }
    for s in 0..n {
        for t in 0..n {
            if *theta(alg.m(s, t)) != theta(s).compose(theta(t)) {
                report.push("mult", vec![s, t], "composition is not preserved".into());
            }
        }
        if let Some(ds) = alg.d(s) {
            if *theta(ds) != theta(s).domain_of().as_map() {
                report.push("domain", vec![s], "domain is not preserved".into());
            }
        }
    }
    for &a in alg.tests() {
        if !theta(a).is_identity_restriction() {
            report.push(
                "test-image",
                vec![a],
                "test image is not a restriction of the identity".into(),
            );
            continue;
        }
        let a1 = alg.comp_test(a).unwrap();
        let da = theta(a).domain_of();
        let da1 = theta(a1).domain_of();
        if (0..rep.state_count).any(|x| da.contains(x) && da1.contains(x)) {
            report.push(
                "complement-disjoint",
                vec![a, a1],
                "a state satisfies both a test and its complement".into(),
            );
        }
        if let Some(x) = (0..rep.state_count).find(|&x| !da.contains(x) && !da1.contains(x)) {
            report.push(
                "complement-coverage",
                vec![a, a1],
                format!("state {x} satisfies neither the test nor its complement"),
            );
        }
    }
    if alg.has_star() {
        for s in 0..n {
            for t in 0..n {
                let expect = theta(s).agree_star(theta(t)).as_map();
                if *theta(alg.star_of(s, t).unwrap()) != expect {
                    report.push("star", vec![s, t], "agreement is not preserved".into());
                }
            }
        }
    }
    if alg.has_neq() {
        for s in 0..n {
            for t in 0..n {
                let expect = theta(s).disagree(theta(t)).as_map();
                if *theta(alg.neq_of(s, t).unwrap()) != expect {
                    report.push("neq", vec![s, t], "disagreement is not preserved".into());
                }
            }
        }
    }
    let tests = alg.tests().to_vec();
    if alg.has_eite() {
        'eite: for s in 0..n {
            for &a in &tests {
                let Some(guard) = TestSet::from_map(theta(a)) else { continue };
                for t in 0..n {
                    for u in 0..n {
                        let expect = pfun::ext_ite(theta(s), &guard, theta(t), theta(u));
                        if *theta(alg.eite_of(s, a, t, u).unwrap()) != expect {
                            report.push(
                                "eite",
                                vec![s, a, t, u],
                                "if-then-else is not preserved".into(),
                            );
                            break 'eite;
                        }
                    }
                }
            }
        }
    }
    if alg.has_wc() {
        'wc: for s in 0..n {
            for t in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        let expect = pfun::weak_cmp(theta(s), theta(t), theta(u), theta(v));
                        if *theta(alg.wc_of(s, t, u, v).unwrap()) != expect {
                            report.push(
                                "wc",
                                vec![s, t, u, v],
                                "weak comparison is not preserved".into(),
                            );
                            break 'wc;
                        }
                    }
                }
            }
        }
    }
    if alg.has_whl() {
        'whl: for t in 0..n {
            for &a in &tests {
                let Some(guard) = TestSet::from_map(theta(a)) else { continue };
                for s in 0..n {
                    let expect = pfun::ext_while(theta(t), &guard, theta(s));
                    if *theta(alg.whl_of(t, a, s).unwrap()) != expect {
                        report.push("while", vec![t, a, s], "while-do is not preserved".into());
                        break 'whl;
                    }
                }
            }
        }
    }
    report
}

/// Serialized form of a representation, with `theta` in the concrete-model
/// entry convention.
#[derive(Debug, Clone, Serialize)]
pub struct RepresentationExport {
    pub components: Vec<ComponentExport>,
    pub theta: BTreeMap<String, Vec<Option<usize>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentExport {
    pub filter_generator: usize,
    pub pair: [usize; 2],
    pub classes: Vec<Vec<usize>>,
}

pub fn export_representation(rep: &Representation) -> RepresentationExport {
    RepresentationExport {
        components: rep
            .components
            .iter()
            .map(|c| ComponentExport {
                filter_generator: c.generator,
                pair: [c.pair.0, c.pair.1],
                classes: c.classes.clone(),
            })
            .collect(),
        theta: rep
            .images
            .iter()
            .enumerate()
            .map(|(i, m)| (i.to_string(), m.entries().to_vec()))
            .collect(),
    }
}

/// The while-loop unrolled into nested if-then-else.
#[derive(Debug, Clone)]
pub struct Unrolling<V> {
    /// `v_0 .. v_n`.
    pub steps: Vec<V>,
    pub result: V,
    /// The power-stabilization bound `n`.
    pub bound: usize,
    /// Whether every power `(D(t a) s)^i D(t a')` sits below the result in
    /// the natural order.
    pub powers_below_result: bool,
}

/// Unrolls `((t, a) : s)` by the nested construction: with `x = D(t a) s`
/// and `f = D(t a')`, take the least `n` with `x^(n+1) f <= x^j f` for
/// some `j <= n`, set `v_0 = x^n f` and
/// `v_(k+1) = (x^(n-k-1) t, a)[v_k, x^(n-k-1) f]`; then `v_n` is the loop.
pub fn while_unroll<C: EvalContext>(
    ctx: &C,
    t: &C::Value,
    a: &C::Value,
    s: &C::Value,
) -> Result<Unrolling<C::Value>, CtxError> {
    if !ctx.supports(OpKind::Eite) {
        return Err(CtxError::MissingCapability(OpKind::Eite));
    }
    let a1 = ctx.complement(a)?;
    let x = ctx.mult(&ctx.domain(&ctx.mult(t, a))?, s);
    let f = ctx.domain(&ctx.mult(t, &a1))?;
    // powers[i] = x^i, starting from x^0 = 1
    let mut powers = vec![ctx.one()];
    let n = loop {
        let next = ctx.mult(powers.last().unwrap(), &x);
        let candidate = ctx.mult(&next, &f);
        let n = powers.len() - 1;
        let mut stabilized = false;
        for p in &powers {
            if ctx.natural_leq(&candidate, &ctx.mult(p, &f))? {
                stabilized = true;
                break;
            }
        }
        if stabilized {
            break n;
        }
        powers.push(next);
    };
    let mut steps = Vec::with_capacity(n + 1);
    let mut v = ctx.mult(&powers[n], &f);
    steps.push(v.clone());
    for k in 0..n {
        let prefix = &powers[n - (k + 1)];
        v = ctx.eite(&ctx.mult(prefix, t), a, &v, &ctx.mult(prefix, &f))?;
        steps.push(v.clone());
    }
    let mut powers_below_result = true;
    for p in &powers {
        if !ctx.natural_leq(&ctx.mult(p, &f), &v)? {
            powers_below_result = false;
        }
    }
    Ok(Unrolling { steps, result: v, bound: n, powers_below_result })
}

/// Outcome of checking that the loop is the least solution of its defining
/// equations over a concrete model.
#[derive(Debug, Clone, Serialize)]
pub struct MinbReport {
    /// The loop satisfies both equations and sits below every model
    /// element satisfying them.
    pub holds: bool,
    /// Whether the alternative reading of the first equation
    /// (`D(t a) s u = D(t a) s` instead of `.. = D(t a) u`) selects the
    /// same minimum over this model.
    pub alt_reading_agrees: bool,
}

/// Verifies that `((t, a) : s)` is minimal among model elements `u` with
/// `D(t a) s u = D(t a) u` and `D(t a') u = D(t a')`.
pub fn minb_check(
    model: &ConcreteModel,
    t: &PartialMap,
    a: &TestSet,
    s: &PartialMap,
) -> MinbReport {
    let w = pfun::ext_while(t, a, s);
    let e = t.compose(&a.as_map()).domain_of().as_map();
    let f = t.compose(&a.complement().as_map()).domain_of().as_map();
    let es = e.compose(s);
    let cond = |u: &PartialMap| es.compose(u) == e.compose(u) && f.compose(u) == f;
    let alt_cond = |u: &PartialMap| es.compose(u) == es && f.compose(u) == f;

    let holds = cond(&w) && model.maps().iter().filter(|u| cond(u)).all(|u| w.natural_leq(u));

    let minimum = |pred: &dyn Fn(&PartialMap) -> bool| -> Option<PartialMap> {
        let sat: Vec<&PartialMap> = model.maps().iter().filter(|u| pred(u)).collect();
        sat.iter().find(|m| sat.iter().all(|u| m.natural_leq(u))).map(|m| (*m).clone())
    };
    let alt_reading_agrees = minimum(&cond) == minimum(&alt_cond);
    MinbReport { holds, alt_reading_agrees }
}

// Lemma-level oracles over a finite algebra with agreement: each returns
// the first counterexample, if any.

/// `x * y` is the greatest domain element `e` with `e <= D(x)D(y)` and
/// `e x = e y`.
pub fn agreenor_violation(alg: &FiniteAlgebra) -> Result<Option<(usize, usize)>, FiltersError> {
    let d = alg.domain_elements().map_err(|_| FiltersError::MissingDomain)?;
    for x in 0..alg.size() {
        for y in 0..alg.size() {
            let Some(star) = alg.star_of(x, y) else {
                return Err(FiltersError::MissingDomain);
            };
            let bound = alg.m(alg.d(x).unwrap(), alg.d(y).unwrap());
            let candidates: Vec<usize> = d
                .iter()
                .copied()
                .filter(|&e| alg.leq(e, bound).unwrap() && alg.m(e, x) == alg.m(e, y))
                .collect();
            let ok =
                candidates.contains(&star) && candidates.iter().all(|&e| alg.leq(e, star).unwrap());
            if !ok {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

/// Membership in a filter tracks agreement: `x, y` survive and are
/// identified exactly when `x * y` lies in the filter.
pub fn lemma_star_violation(
    alg: &FiniteAlgebra,
) -> Result<Option<(usize, usize, usize)>, FiltersError> {
    for filter in all_filters(alg)? {
        let g = filter.generator;
        for x in 0..alg.size() {
            for y in 0..alg.size() {
                let Some(star) = alg.star_of(x, y) else {
                    return Err(FiltersError::MissingDomain);
                };
                let lhs = alg.m(g, alg.d(x).unwrap()) == g
                    && alg.m(g, alg.d(y).unwrap()) == g
                    && alg.m(g, x) == alg.m(g, y);
                let rhs = filter.contains(alg, star);
                if lhs != rhs {
                    return Ok(Some((g, x, y)));
                }
            }
        }
    }
    Ok(None)
}

/// Maximal separation coincides with maximality of `D(a) in F` while
/// `a * b` stays outside.
pub fn maxagree_violation(
    alg: &FiniteAlgebra,
) -> Result<Option<(usize, usize, usize)>, FiltersError> {
    let filters = all_filters(alg)?;
    for a in 0..alg.size() {
        for b in 0..alg.size() {
            if alg.leq(a, b).map_err(|_| FiltersError::MissingDomain)? {
                continue;
            }
            let max_separating = maximal_separating(alg, a, b)?;
            let da = alg.d(a).unwrap();
            let Some(star) = alg.star_of(a, b) else {
                return Err(FiltersError::MissingDomain);
            };
            let prop = |f: &Filter| f.contains(alg, da) && !f.contains(alg, star);
            for f in &filters {
                let lhs = max_separating.iter().any(|m| m.generator == f.generator);
                let rhs = prop(f)
                    && filters.iter().all(|other| {
                        other.generator == f.generator
                            || !prop(other)
                            || !alg.leq(other.generator, f.generator).unwrap()
                    });
                if lhs != rhs {
                    return Ok(Some((f.generator, a, b)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{from_model, ClosureOps};
    use crate::context::full_model_context;
    use crate::fixtures;

    #[test]
    fn filters_of_the_three_chain() {
        let alg = fixtures::three_element_algebra();
        let fs = all_filters(&alg).unwrap();
        let gens: Vec<usize> = fs.iter().map(|f| f.generator).collect();
        assert_eq!(gens, vec![1, 2]); // up(e) and up(1)
        assert_eq!(Filter { generator: 2 }.elements(&alg).unwrap(), vec![2]);
        assert_eq!(Filter { generator: 1 }.elements(&alg).unwrap(), vec![1, 2]);
    }

    #[test]
    fn filter_extension() {
        let alg = fixtures::three_element_algebra();
        let up1 = Filter { generator: 2 };
        let extended = extend_filter(&alg, &up1, 1).unwrap();
        assert_eq!(extended.generator, 1);
        assert!(extended.is_proper(&alg));
        assert_eq!(extend_filter(&alg, &extended, 1), Err(FiltersError::AlreadyInFilter(1)));
        // extending by an element meeting the generator at zero collapses
        // to the improper filter, all of D(S)
        let collapsed = extend_filter(&alg, &extended, 0).unwrap();
        assert!(!collapsed.is_proper(&alg));
        assert_eq!(collapsed.elements(&alg).unwrap(), vec![0, 1, 2]);
        // eight-point system: extending up(e) by f lands on ef
        let tm = fixtures::quasiv_table_model();
        let e = tm
            .index_of(
                &PartialMap::from_entries(vec![
                    Some(0),
                    Some(1),
                    Some(2),
                    None,
                    None,
                    None,
                    None,
                    None,
                ])
                .unwrap(),
            )
            .unwrap();
        let f = tm
            .index_of(
                &PartialMap::from_entries(vec![
                    None,
                    None,
                    Some(2),
                    Some(3),
                    None,
                    None,
                    None,
                    None,
                ])
                .unwrap(),
            )
            .unwrap();
        let ef = tm
            .index_of(
                &PartialMap::from_entries(vec![None, None, Some(2), None, None, None, None, None])
                    .unwrap(),
            )
            .unwrap();
        let got = extend_filter(&tm.algebra, &Filter { generator: e }, f).unwrap();
        assert_eq!(got.generator, ef);
        let s = tm.index_of(&fixtures::quasiv_map_s()).unwrap();
        assert_eq!(
            extend_filter(&tm.algebra, &Filter { generator: e }, s),
            Err(FiltersError::NotDomainElement(s))
        );
        // up(e) in the eight-point closure is {e, D(s), beta, 1}
        let up_e = Filter { generator: e }.elements(&tm.algebra).unwrap();
        assert_eq!(up_e.len(), 4);
    }

    #[test]
    fn separating_filters_on_the_chain() {
        let alg = fixtures::three_element_algebra();
        let (zero, e, one) = (0, 1, 2);
        let max = maximal_separating(&alg, one, e).unwrap();
        assert_eq!(max.iter().map(|f| f.generator).collect::<Vec<_>>(), vec![one]);
        let max = maximal_separating(&alg, e, zero).unwrap();
        assert_eq!(max.iter().map(|f| f.generator).collect::<Vec<_>>(), vec![e]);
        let max = maximal_separating(&alg, one, zero).unwrap();
        assert_eq!(max.iter().map(|f| f.generator).collect::<Vec<_>>(), vec![e]);
        assert!(matches!(separating_filters(&alg, e, one), Err(FiltersError::NotSeparable { .. })));
        // the filter generated by D(a) always separates
        for (a, b) in [(one, e), (e, zero), (one, zero)] {
            let da = alg.d(a).unwrap();
            assert!(separating_filters(&alg, a, b).unwrap().iter().any(|f| f.generator == da));
        }
    }

    #[test]
    fn determinative_pairs_on_the_chain() {
        let alg = fixtures::three_element_algebra();
        let pair_e = determinative_pair(&alg, &Filter { generator: 1 }).unwrap();
        assert_eq!(pair_e.excluded, vec![0]);
        assert_eq!(pair_e.classes, vec![vec![1, 2]]);
        let pair_one = determinative_pair(&alg, &Filter { generator: 2 }).unwrap();
        assert_eq!(pair_one.excluded, vec![0, 1]);
        assert_eq!(pair_one.classes, vec![vec![2]]);
        // psi examples
        assert_eq!(psi(&alg, &pair_e, 1).unwrap(), PartialMap::identity(1));
        assert_eq!(psi(&alg, &pair_one, 1).unwrap(), PartialMap::null(1));
        assert_eq!(psi(&alg, &pair_one, 2).unwrap(), PartialMap::identity(1));
    }

    #[test]
    fn representation_of_the_chain() {
        let alg = fixtures::three_element_algebra();
        let rep = build_representation(&alg).unwrap();
        assert_eq!(rep.state_count, 2);
        assert_eq!(rep.images[2], PartialMap::identity(2));
        assert_eq!(rep.images[0], PartialMap::null(2));
        let e_image = &rep.images[1];
        assert!(e_image.is_identity_restriction());
        assert_eq!(e_image.domain_of().member_points().len(), 1);
        let report = verify_representation(&alg, &rep);
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn representation_of_the_trivial_algebra() {
        let alg = FiniteAlgebra::new(
            1,
            0,
            0,
            vec![0],
            Some(vec![0]),
            vec![0],
            vec![0],
            None,
            None,
            None,
            None,
            None,
        )
        .unwrap();
        let rep = build_representation(&alg).unwrap();
        assert_eq!(rep.state_count, 0);
        assert!(verify_representation(&alg, &rep).passed());
    }

    #[test]
    fn quotient_losing_representability_fails_coverage() {
        let tm = fixtures::quasiv_table_model();
        let p = fixtures::quasiv_partition(&tm);
        let (q, _) = crate::algebra::quotient(&tm.algebra, &p).unwrap();
        let rep = build_representation(&q).unwrap();
        let report = verify_representation(&q, &rep);
        assert!(!report.passed());
        assert!(
            report.failures.iter().any(|f| f.check == "complement-coverage"),
            "{:?}",
            report.failures
        );
    }

    #[test]
    fn principal_filters_exhaust_the_filters_of_small_semilattices() {
        for alg in [fixtures::three_element_algebra(), fixtures::quasiv_table_model().algebra] {
            let d = alg.domain_elements().unwrap();
            assert!(d.len() <= 12);
            // every up-closed meet-closed nonempty zero-free subset is
            // principal, generated by its meet
            for mask in 1u32..1 << d.len() {
                let subset: Vec<usize> = d
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                if subset.contains(&alg.zero_elem()) {
                    continue;
                }
                let meet_closed =
                    subset.iter().all(|&a| subset.iter().all(|&b| subset.contains(&alg.m(a, b))));
                let up_closed = subset
                    .iter()
                    .all(|&a| d.iter().all(|&f| !alg.leq(a, f).unwrap() || subset.contains(&f)));
                if !(meet_closed && up_closed) {
                    continue;
                }
                let meet = subset.iter().copied().reduce(|a, b| alg.m(a, b)).unwrap();
                assert!(subset.contains(&meet));
                assert_eq!(Filter { generator: meet }.elements(&alg).unwrap(), subset);
            }
            // and conversely every principal filter is such a subset
            for f in all_filters(&alg).unwrap() {
                let elems = f.elements(&alg).unwrap();
                assert!(!elems.contains(&alg.zero_elem()));
                for &a in &elems {
                    for &b in &elems {
                        assert!(elems.contains(&alg.m(a, b)));
                    }
                }
            }
        }
    }

    #[test]
    fn lemma_oracles_on_the_eight_point_closure() {
        let tm = fixtures::quasiv_table_model();
        assert_eq!(agreenor_violation(&tm.algebra).unwrap(), None);
        assert_eq!(lemma_star_violation(&tm.algebra).unwrap(), None);
        assert_eq!(maxagree_violation(&tm.algebra).unwrap(), None);
        // the filter generated by D(a) separates every pair a not below b
        let alg = &tm.algebra;
        for a in 0..alg.size() {
            for b in 0..alg.size() {
                if alg.leq(a, b).unwrap() {
                    continue;
                }
                let da = alg.d(a).unwrap();
                assert!(separating_filters(alg, a, b).unwrap().iter().any(|f| f.generator == da));
            }
        }
    }

    #[test]
    fn unrolling_matches_the_loop_on_a_counting_model() {
        // 4-point counter: guard {0,1,2}, step x+1
        let step = PartialMap::from_entries(vec![Some(1), Some(2), Some(3), None]).unwrap();
        let guard = TestSet::from_points(4, &[0, 1, 2]).unwrap();
        let elems = vec![
            ("id".to_string(), PartialMap::identity(4)),
            ("empty".to_string(), PartialMap::null(4)),
            ("step".to_string(), step.clone()),
            ("guard".to_string(), guard.as_map()),
            ("guard'".to_string(), guard.complement().as_map()),
        ];
        let model = ConcreteModel::new(4, elems, vec![3, 4]).unwrap();
        // tests must also include full/empty for a Boolean sort
        let model = {
            let id = model.lookup_map(&PartialMap::identity(4)).unwrap();
            let empty = model.lookup_map(&PartialMap::null(4)).unwrap();
            ConcreteModel::new(
                4,
                model.names().iter().cloned().zip(model.maps().iter().cloned()).collect(),
                vec![3, 4, id, empty],
            )
            .unwrap()
        };
        let t = PartialMap::identity(4);
        let un = while_unroll(&model, &t, &guard.as_map(), &step).unwrap();
        let direct = pfun::ext_while(&t, &guard, &step);
        assert_eq!(un.result, direct);
        assert_eq!(direct, PartialMap::from_entries(vec![Some(3); 4]).unwrap());
        assert!(un.powers_below_result);
        assert_eq!(un.steps.len(), un.bound + 1);
        // empty guard: v_0 = D(t), stabilized at step zero
        let un = while_unroll(&model, &t, &TestSet::empty(4).as_map(), &step).unwrap();
        assert_eq!(un.bound, 0);
        assert_eq!(un.result, t.domain_of().as_map());
        // null test map
        let un = while_unroll(&model, &PartialMap::null(4), &guard.as_map(), &step).unwrap();
        assert_eq!(un.result, PartialMap::null(4));
        // minimality over the model; on this model the loop itself fails
        // the condition `D(t a) s u = D(t a) s`, so the alternative
        // reading selects a different minimum and the flag records it
        let r = minb_check(&model, &t, &guard, &step);
        assert!(r.holds);
        assert!(!r.alt_reading_agrees);
    }

    #[test]
    fn guarded_powers_stay_below_any_solution() {
        // e s t = e t and f t = f force (e s)^n f <= t for every n
        for alg in [
            from_model(&full_model_context(2).unwrap(), ClosureOps::basic(), 0).unwrap().algebra,
            fixtures::quasiv_table_model().algebra,
        ] {
            let d = alg.domain_elements().unwrap();
            for &e in &d {
                for &f in &d {
                    for s in 0..alg.size() {
                        for t in 0..alg.size() {
                            if alg.m(alg.m(e, s), t) != alg.m(e, t) || alg.m(f, t) != f {
                                continue;
                            }
                            let es = alg.m(e, s);
                            let mut power = alg.one_elem();
                            for _ in 0..=alg.size() {
                                assert!(alg.leq(alg.m(power, f), t).unwrap());
                                power = alg.m(power, es);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unrolling_over_tables_matches_the_while_table() {
        let model = full_model_context(2).unwrap();
        let tm = from_model(&model, ClosureOps::all(), 0).unwrap();
        let alg = &tm.algebra;
        for t in 0..alg.size() {
            for &a in alg.tests() {
                for s in 0..alg.size() {
                    let un = while_unroll(alg, &t, &a, &s).unwrap();
                    assert_eq!(un.result, alg.whl_of(t, a, s).unwrap());
                    assert!(un.powers_below_result);
                }
            }
        }
    }

    #[test]
    fn representation_of_table_full_models() {
        for n in 0..=2 {
            let model = full_model_context(n).unwrap();
            let tm = from_model(&model, ClosureOps::all(), 0).unwrap();
            let rep = build_representation(&tm.algebra).unwrap();
            let report = verify_representation(&tm.algebra, &rep);
            assert!(report.passed(), "n={n}: {:?}", report.failures);
        }
    }
}
