//! The algebra `B*` of possibly non-halting tests, generated from the
//! branching behaviour of elements: a generalized predicate is the table
//! of an induced binary operator `P[x, y]`, identified extensionally, and
//! the sequential connectives are
//!
//! ```text
//! (P and Q)[x,y] = P[Q[x,y], y]
//! (P or  Q)[x,y] = P[x, Q[x,y]]
//! (not P)[x,y]   = P[y, x]
//! ```
//!
//! Over a concrete model each predicate reduces to a three-valued trace
//! (true / false / undefined per state), recovered from its action on the
//! pair `(1, 0)` and `(0, 1)`.

use serde::Serialize;
use thiserror::Error;

use crate::context::{ConcreteModel, CtxError, EvalContext, OpKind};

#[derive(Debug, Error)]
pub enum CalgError {
    #[error(transparent)]
    Ctx(#[from] CtxError),
    #[error("closure exceeded the bound of {bound} predicates (frontier size {frontier})")]
    BoundExceeded { bound: usize, frontier: usize },
    #[error("predicate `{0}` acts as both true and false at state {1}")]
    InconsistentTrace(String, usize),
}

/// A generalized predicate: for each element pair `(x, y)` the element
/// `P[x, y]`, plus the generating expression for reporting. Equality is
/// extensional (tables only).
#[derive(Debug, Clone)]
pub struct GenPredicate<V> {
    pub table: Vec<V>,
    pub provenance: String,
}

impl<V: PartialEq> PartialEq for GenPredicate<V> {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl<V: Eq> Eq for GenPredicate<V> {}

impl<V: Clone> GenPredicate<V> {
    pub fn at(&self, n: usize, x: usize, y: usize) -> V {
        self.table[x * n + y].clone()
    }
}

/// The basic predicates: one per `(a, alpha)` via extended if-then-else
/// (which covers plain tests with `a = 1`), and one per `(a, b)` via weak
/// comparison when available. Deduplicated extensionally.
pub fn basic_predicates<C: EvalContext>(ctx: &C) -> Result<Vec<GenPredicate<C::Value>>, CalgError> {
    if !ctx.supports(OpKind::Eite) {
        return Err(CalgError::Ctx(CtxError::MissingCapability(OpKind::Eite)));
    }
    let n = ctx.element_count();
    let mut out: Vec<GenPredicate<C::Value>> = Vec::new();
    let mut push = |p: GenPredicate<C::Value>| {
        if !out.iter().any(|q| q.table == p.table) {
            out.push(p);
        }
    };
    for a in 0..n {
        let av = ctx.element(a);
        for &alpha in ctx.test_elements() {
            let alphav = ctx.element(alpha);
            let mut table = Vec::with_capacity(n * n);
            for x in 0..n {
                for y in 0..n {
                    table.push(ctx.eite(&av, &alphav, &ctx.element(x), &ctx.element(y))?);
                }
            }
            push(GenPredicate { table, provenance: format!("ite:{a},{alpha}") });
        }
    }
    if ctx.supports(OpKind::Wc) {
        for a in 0..n {
            let av = ctx.element(a);
            for b in 0..n {
                let bv = ctx.element(b);
                let mut table = Vec::with_capacity(n * n);
                for x in 0..n {
                    for y in 0..n {
                        table.push(ctx.wc(&av, &bv, &ctx.element(x), &ctx.element(y))?);
                    }
                }
                push(GenPredicate { table, provenance: format!("wc:{a},{b}") });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Not,
}

/// Applies a connective by the defining scheme. Binary connectives index
/// one table by the output of the other, so results must stay inside the
/// context's element list.
pub fn connective<C: EvalContext>(
    ctx: &C,
    op: Connective,
    p: &GenPredicate<C::Value>,
    q: Option<&GenPredicate<C::Value>>,
) -> Result<GenPredicate<C::Value>, CalgError> {
    let n = ctx.element_count();
    let mut table = Vec::with_capacity(n * n);
    match op {
        Connective::Not => {
            for x in 0..n {
                for y in 0..n {
                    table.push(p.at(n, y, x));
                }
            }
            Ok(GenPredicate { table, provenance: format!("not({})", p.provenance) })
        }
        Connective::And | Connective::Or => {
            let q = q.expect("binary connective takes two predicates");
            for x in 0..n {
                for y in 0..n {
                    let inner = q.at(n, x, y);
                    let inner_idx = ctx
                        .element_index(&inner)
                        .ok_or(CalgError::Ctx(CtxError::NotClosed(OpKind::Eite)))?;
                    table.push(match op {
                        Connective::And => p.at(n, inner_idx, y),
                        Connective::Or => p.at(n, x, inner_idx),
                        Connective::Not => unreachable!(),
                    });
                }
            }
            let name = if op == Connective::And { "and" } else { "or" };
            Ok(GenPredicate {
                table,
                provenance: format!("{name}({},{})", p.provenance, q.provenance),
            })
        }
    }
}

/// Closes the basic predicates under the three connectives, deduplicating
/// extensionally, up to `bound` predicates in total.
pub fn generate_bstar<C: EvalContext>(
    ctx: &C,
    bound: usize,
) -> Result<Vec<GenPredicate<C::Value>>, CalgError> {
    let mut preds = basic_predicates(ctx)?;
    if preds.len() > bound {
        return Err(CalgError::BoundExceeded { bound, frontier: preds.len() });
    }
    loop {
        let len = preds.len();
        let mut fresh: Vec<GenPredicate<C::Value>> = Vec::new();
        {
            let mut push = |p: GenPredicate<C::Value>| {
                if !preds.iter().any(|q| q.table == p.table)
                    && !fresh.iter().any(|q| q.table == p.table)
                {
                    fresh.push(p);
                }
            };
            for i in 0..len {
                push(connective(ctx, Connective::Not, &preds[i], None)?);
                for j in 0..len {
                    push(connective(ctx, Connective::And, &preds[i], Some(&preds[j]))?);
                    push(connective(ctx, Connective::Or, &preds[i], Some(&preds[j]))?);
                }
            }
        }
        if fresh.is_empty() {
            return Ok(preds);
        }
        if len + fresh.len() > bound {
            return Err(CalgError::BoundExceeded { bound, frontier: fresh.len() });
        }
        preds.extend(fresh);
    }
}

/// A three-valued truth value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tri {
    T,
    F,
    U,
}

impl Tri {
    pub fn letter(self) -> char {
        match self {
            Tri::T => 'T',
            Tri::F => 'F',
            Tri::U => 'U',
        }
    }
}

/// Sequential conjunction: true when both are; false when the first is
/// false, or when the first is defined and the second is false; undefined
/// otherwise.
pub fn tri_and(p: Tri, q: Tri) -> Tri {
    match (p, q) {
        (Tri::F, _) => Tri::F,
        (Tri::T, Tri::T) => Tri::T,
        (Tri::T, Tri::F) => Tri::F,
        (Tri::T, Tri::U) => Tri::U,
        (Tri::U, _) => Tri::U,
    }
}

/// Sequential disjunction: true when the first is, or when the first is
/// defined and the second is; false when both are false; undefined
/// otherwise.
pub fn tri_or(p: Tri, q: Tri) -> Tri {
    match (p, q) {
        (Tri::T, _) => Tri::T,
        (Tri::F, Tri::T) => Tri::T,
        (Tri::F, Tri::F) => Tri::F,
        (Tri::F, Tri::U) => Tri::U,
        (Tri::U, _) => Tri::U,
    }
}

pub fn tri_not(p: Tri) -> Tri {
    match p {
        Tri::T => Tri::F,
        Tri::F => Tri::T,
        Tri::U => Tri::U,
    }
}

/// The per-state trace of a predicate over a concrete model, read off its
/// action on `(1, 0)` and `(0, 1)`.
pub fn trace(
    model: &ConcreteModel,
    p: &GenPredicate<crate::pfun::PartialMap>,
) -> Result<Vec<Tri>, CalgError> {
    let n = model.element_count();
    let one = model.lookup_map(&model.one()).expect("identity present");
    let zero = model.lookup_map(&model.zero()).expect("null present");
    let truthy = p.at(n, one, zero);
    let falsy = p.at(n, zero, one);
    (0..model.points())
        .map(|st| match (truthy.get(st).is_some(), falsy.get(st).is_some()) {
            (true, false) => Ok(Tri::T),
            (false, true) => Ok(Tri::F),
            (false, false) => Ok(Tri::U),
            (true, true) => Err(CalgError::InconsistentTrace(p.provenance.clone(), st)),
        })
        .collect()
}

/// One trace mismatch between a connective applied by its defining scheme
/// and the three-valued semantics.
#[derive(Debug, Clone, Serialize)]
pub struct TraceViolation {
    pub connective: String,
    pub left: String,
    pub right: Option<String>,
    pub state: usize,
    pub via_scheme: char,
    pub via_semantics: char,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ThreeValuedReport {
    pub predicates: usize,
    pub pairs_checked: usize,
    pub violations: Vec<TraceViolation>,
}

impl ThreeValuedReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies that on a concrete model every connective's trace obeys the
/// three-valued semantics at every state, for all pairs from `preds`.
pub fn three_valued_check(
    model: &ConcreteModel,
    preds: &[GenPredicate<crate::pfun::PartialMap>],
) -> Result<ThreeValuedReport, CalgError> {
    let mut report = ThreeValuedReport { predicates: preds.len(), ..Default::default() };
    let traces: Vec<Vec<Tri>> = preds.iter().map(|p| trace(model, p)).collect::<Result<_, _>>()?;
    for (i, p) in preds.iter().enumerate() {
        let np = connective(model, Connective::Not, p, None)?;
        let nt = trace(model, &np)?;
        for st in 0..model.points() {
            let expect = tri_not(traces[i][st]);
            if nt[st] != expect {
                report.violations.push(TraceViolation {
                    connective: "not".into(),
                    left: p.provenance.clone(),
                    right: None,
                    state: st,
                    via_scheme: nt[st].letter(),
                    via_semantics: expect.letter(),
                });
            }
        }
        for (j, q) in preds.iter().enumerate() {
            report.pairs_checked += 1;
            let and = connective(model, Connective::And, p, Some(q))?;
            let or = connective(model, Connective::Or, p, Some(q))?;
            let at = trace(model, &and)?;
            let ot = trace(model, &or)?;
            for st in 0..model.points() {
                let ea = tri_and(traces[i][st], traces[j][st]);
                if at[st] != ea {
                    report.violations.push(TraceViolation {
                        connective: "and".into(),
                        left: p.provenance.clone(),
                        right: Some(q.provenance.clone()),
                        state: st,
                        via_scheme: at[st].letter(),
                        via_semantics: ea.letter(),
                    });
                }
                let eo = tri_or(traces[i][st], traces[j][st]);
                if ot[st] != eo {
                    report.violations.push(TraceViolation {
                        connective: "or".into(),
                        left: p.provenance.clone(),
                        right: Some(q.provenance.clone()),
                        state: st,
                        via_scheme: ot[st].letter(),
                        via_semantics: eo.letter(),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Export entry: trace string (concrete contexts) plus provenance.
#[derive(Debug, Clone, Serialize)]
pub struct BStarEntry {
    pub trace: String,
    pub expression: String,
}

pub fn export_bstar(
    model: &ConcreteModel,
    preds: &[GenPredicate<crate::pfun::PartialMap>],
) -> Result<Vec<BStarEntry>, CalgError> {
    preds
        .iter()
        .map(|p| {
            Ok(BStarEntry {
                trace: trace(model, p)?.iter().map(|t| t.letter()).collect(),
                expression: p.provenance.clone(),
            })
        })
        .collect()
}
