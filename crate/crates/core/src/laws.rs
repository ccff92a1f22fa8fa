//! The defining laws of each axiom class, as data, plus a checker that
//! enumerates or samples sort-correct assignments and reports replayable
//! witnesses.
//!
//! Inequalities `l <= r` are encoded as the equation `l = D(l);r`.
//! Implications hold at an assignment when some premise fails or every
//! conclusion holds. The checker reports the first witness in
//! lexicographic assignment order, independent of the worker count.

use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{validate, FiniteAlgebra};
use crate::context::{ConcreteModel, CtxError, EvalContext, OpKind};
use crate::terms::{expand_derived, parse, Basis, EvalError, ExpandError, Term, VarSort};

#[derive(Debug, Clone, Serialize)]
pub struct Equation {
    #[serde(serialize_with = "ser_term")]
    pub lhs: Term,
    #[serde(serialize_with = "ser_term")]
    pub rhs: Term,
}

fn ser_term<S: serde::Serializer>(t: &Term, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

/// A named law: premises and conclusions over sorted variables. Premises
/// empty for pure equations.
#[derive(Debug, Clone, Serialize)]
pub struct Law {
    pub name: String,
    #[serde(serialize_with = "ser_vars")]
    pub vars: Vec<(String, VarSort)>,
    pub premises: Vec<Equation>,
    pub conclusions: Vec<Equation>,
}

fn ser_vars<S: serde::Serializer>(vars: &[(String, VarSort)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(vars.len()))?;
    for (name, sort) in vars {
        m.serialize_entry(
            name,
            match sort {
                VarSort::Elem => "elem",
                VarSort::Test => "test",
                VarSort::DomElem => "domelem",
            },
        )?;
    }
    m.end()
}

fn eq(lhs: &str, rhs: &str) -> Equation {
    Equation {
        lhs: parse(lhs).expect("registry term parses"),
        rhs: parse(rhs).expect("registry term parses"),
    }
}

/// `l <= r` as `l = D(l);r`.
fn leq(lhs: &str, rhs: &str) -> Equation {
    let l = parse(lhs).expect("registry term parses");
    let r = parse(rhs).expect("registry term parses");
    Equation { lhs: l.clone(), rhs: Term::seq(Term::d(l), r) }
}

fn vars(pairs: &[(&str, VarSort)]) -> Vec<(String, VarSort)> {
    pairs.iter().map(|(n, s)| (n.to_string(), *s)).collect()
}

impl Law {
    fn pure(name: &str, vs: &[(&str, VarSort)], conclusions: Vec<Equation>) -> Law {
        Law { name: name.to_string(), vars: vars(vs), premises: Vec::new(), conclusions }
    }

    fn implication(
        name: &str,
        vs: &[(&str, VarSort)],
        premises: Vec<Equation>,
        conclusions: Vec<Equation>,
    ) -> Law {
        Law { name: name.to_string(), vars: vars(vs), premises, conclusions }
    }

    pub fn equations(&self) -> impl Iterator<Item = &Equation> {
        self.premises.iter().chain(&self.conclusions)
    }

    /// Operation symbols the law needs from a context.
    pub fn required_ops(&self) -> Vec<OpKind> {
        let mut out = Vec::new();
        for e in self.equations() {
            for t in [&e.lhs, &e.rhs] {
                for op in t.ops() {
                    if !out.contains(&op) {
                        out.push(op);
                    }
                }
            }
        }
        out
    }

    pub fn has_domelem_vars(&self) -> bool {
        self.vars.iter().any(|(_, s)| *s == VarSort::DomElem)
    }

    /// The same law with every derived operation rewritten to `basis`.
    pub fn expand(&self, basis: Basis) -> Result<Law, ExpandError> {
        let map_eq = |e: &Equation| -> Result<Equation, ExpandError> {
            Ok(Equation {
                lhs: expand_derived(&e.lhs, basis)?,
                rhs: expand_derived(&e.rhs, basis)?,
            })
        };
        Ok(Law {
            name: self.name.clone(),
            vars: self.vars.clone(),
            premises: self.premises.iter().map(map_eq).collect::<Result<_, _>>()?,
            conclusions: self.conclusions.iter().map(map_eq).collect::<Result<_, _>>()?,
        })
    }
}

const E: VarSort = VarSort::Elem;
const T: VarSort = VarSort::Test;
const D: VarSort = VarSort::DomElem;

/// Every named law, each present exactly once.
pub fn registry() -> Vec<Law> {
    vec![
        // restriction monoid with tests
        Law::pure("D1", &[("s", E)], vec![eq("D(s);s", "s")]),
        Law::pure("Dleft", &[("s", E), ("t", E)], vec![eq("D(s;t)", "D(s);D(s;t)")]),
        Law::pure("Dcom", &[("s", E), ("t", E)], vec![eq("D(s);D(t)", "D(t);D(s)")]),
        Law::pure("DD", &[("s", E)], vec![eq("D(D(s))", "D(s)")]),
        Law::pure("Dtwisted", &[("s", E), ("t", E)], vec![eq("s;D(t)", "D(s;t);s")]),
        Law::pure("DT1", &[("a", T)], vec![eq("D(a)", "a")]),
        Law::implication(
            "DT2",
            &[("s", E), ("b", T), ("t", E), ("u", E)],
            vec![eq("D(s;b);t", "D(s;b);u"), eq("D(s;not(b));t", "D(s;not(b));u")],
            vec![eq("D(s);t", "D(s);u")],
        ),
        // agreement determines domain
        Law::pure("Dstar", &[("s", E)], vec![eq("D(s)", "star(s,s)")]),
        // extended if-then-else
        Law::pure("EITE1", &[("s", E), ("a", T), ("t", E)], vec![eq("D(s);t", "ite(s,a,t,t)")]),
        Law::pure(
            "EITE2",
            &[("s", E), ("a", T), ("t", E), ("u", E)],
            vec![eq("D(s;a);ite(s,a,t,u)", "D(s;a);t")],
        ),
        Law::pure(
            "EITE3",
            &[("s", E), ("a", T), ("t", E), ("u", E)],
            vec![eq("D(s;not(a));ite(s,a,t,u)", "D(s;not(a));u")],
        ),
        Law::pure(
            "EITE4",
            &[("s", E), ("a", T), ("t", E), ("u", E)],
            vec![eq("ite(s,a,t,u)", "ite(s,a,D(s;a);t,D(s;not(a));u)")],
        ),
        Law::pure(
            "EITE5",
            &[("s", E), ("a", T), ("t", E), ("u", E)],
            vec![leq("D(ite(s,a,t,u))", "D(s)")],
        ),
        Law::pure(
            "EITE-comp",
            &[("s", E), ("v", E), ("a", T), ("t", E), ("u", E)],
            vec![eq("s;ite(v,a,t,u)", "ite(s;v,a,s;t,s;u)")],
        ),
        // twisted agreeable
        Law::pure("A1", &[("s", E)], vec![eq("star(s,s);s", "s")]),
        Law::pure("Acom", &[("s", E), ("t", E)], vec![eq("star(s,t)", "star(t,s)")]),
        Law::pure("Aeq", &[("s", E), ("t", E)], vec![eq("star(s,t);s", "star(s,t);t")]),
        Law::pure(
            "Anorm",
            &[("s", E), ("t", E), ("u", E), ("v", E)],
            vec![eq("star(star(u,v);s,t)", "star(s,t);star(u,v)")],
        ),
        Law::pure(
            "Atwisted",
            &[("s", E), ("t", E), ("u", E)],
            vec![eq("u;star(s,t)", "star(u;s,u;t);u")],
        ),
        Law::implication(
            "DT2A",
            &[("s", E), ("b", T), ("e", D)],
            vec![leq("D(s;b)", "e"), leq("D(s;not(b))", "e")],
            vec![leq("D(s)", "e")],
        ),
        // disagreeable
        Law::pure("in1", &[("s", E), ("t", E)], vec![eq("D(neq(s,t))", "neq(s,t)")]),
        Law::pure(
            "intwist",
            &[("s", E), ("t", E), ("u", E)],
            vec![eq("s;neq(t,u)", "neq(s;t,s;u);s")],
        ),
        Law::pure("ineq", &[("s", E), ("t", E)], vec![eq("star(s,t);neq(s,t)", "0")]),
        Law::pure(
            "innorm",
            &[("e", D), ("u", E), ("v", E)],
            vec![eq("e;neq(u,v)", "neq(e;u,e;v)")],
        ),
        Law::implication(
            "inimp",
            &[("s", E), ("t", E), ("e", D)],
            vec![leq("star(s,t)", "e"), leq("neq(s,t)", "e")],
            vec![leq("D(s);D(t)", "e")],
        ),
        // weak comparison
        Law::pure(
            "comp1",
            &[("s", E), ("t", E), ("u", E), ("v", E)],
            vec![leq("D(wc(s,t,u,v))", "D(s);D(t)")],
        ),
        Law::pure(
            "comp2",
            &[("s", E), ("t", E), ("u", E), ("v", E)],
            vec![eq("star(s,t);wc(s,t,u,v)", "star(s,t);u")],
        ),
        Law::pure(
            "comp3",
            &[("s", E), ("t", E), ("u", E), ("v", E)],
            vec![eq("neq(s,t);wc(s,t,u,v)", "neq(s,t);v")],
        ),
        Law::pure("wc1", &[("s", E), ("t", E), ("u", E)], vec![eq("wc(s,t,u,u)", "D(s);D(t);u")]),
        Law::pure(
            "wc2",
            &[("s", E), ("t", E), ("u", E), ("v", E)],
            vec![eq("wc(s,t,u,v)", "wc(s,t,star(s,t);u,neq(s,t);v)")],
        ),
        // while-do
        Law::pure(
            "W12",
            &[("t", E), ("a", T), ("s", E)],
            vec![eq("while(t,a,s)", "ite(t,a,s;while(t,a,s),1)")],
        ),
        Law::pure(
            "W1",
            &[("t", E), ("a", T), ("s", E)],
            vec![eq("D(t;a);while(t,a,s)", "D(t;a);s;while(t,a,s)")],
        ),
        Law::pure(
            "W2",
            &[("t", E), ("a", T), ("s", E)],
            vec![eq("D(t;not(a));while(t,a,s)", "D(t;not(a))")],
        ),
        Law::pure(
            "Kleenean-1",
            &[("t", E), ("a", T), ("s", E)],
            vec![eq("while(t,a,s);D(t;not(a))", "while(t,a,s)")],
        ),
        Law::implication(
            "Kleenean-2",
            &[("t", E), ("a", T), ("s", E), ("u", E)],
            vec![leq("D(t;a);s;u", "u")],
            vec![leq("while(t,a,s);u", "u")],
        ),
        // order
        Law::implication(
            "stable",
            &[("s1", E), ("t1", E), ("s2", E), ("t2", E)],
            vec![leq("s1", "t1"), leq("s2", "t2")],
            vec![leq("s1;s2", "t1;t2")],
        ),
    ]
}

pub fn law(name: &str) -> Option<Law> {
    registry().into_iter().find(|l| l.name == name)
}

/// A named, ordered collection of laws. The `monoid-with-tests` suite is
/// structural: it checks the two-sorted monoid shape directly rather than
/// through equations.
#[derive(Debug, Clone)]
pub struct Suite {
    pub name: String,
    pub laws: Vec<Law>,
    pub structural: bool,
}

fn pick(names: &[&str]) -> Vec<Law> {
    let all = registry();
    names
        .iter()
        .map(|n| all.iter().find(|l| l.name == *n).unwrap_or_else(|| panic!("law {n}")).clone())
        .collect()
}

const RESTRICTION: &[&str] = &["D1", "Dleft", "Dcom", "DD", "Dtwisted", "DT1", "DT2"];
const AGREEABLE: &[&str] = &["A1", "Acom", "Aeq", "Anorm", "Atwisted", "DT2A"];
const DISAGREE: &[&str] = &["in1", "intwist", "ineq", "innorm", "inimp"];

pub fn suites() -> Vec<Suite> {
    let mk = |name: &str, laws: Vec<Law>| Suite { name: name.to_string(), laws, structural: false };
    let mut eite = pick(RESTRICTION);
    eite.extend(pick(&["EITE1", "EITE2", "EITE3", "EITE4", "EITE5", "EITE-comp"]));
    let twisted = pick(AGREEABLE);
    let mut disagree = pick(AGREEABLE);
    disagree.extend(pick(DISAGREE));
    let weak: Vec<Law> = disagree
        .iter()
        .cloned()
        .chain(pick(&["comp1", "comp2", "comp3", "wc1", "wc2"]))
        .map(|l| l.expand(Basis::wc_only()).expect("weak-comparison laws expand"))
        .collect();
    let mut kleenean = eite.clone();
    kleenean.extend(pick(&["W12", "W1", "W2", "Kleenean-1", "Kleenean-2"]));
    vec![
        Suite { name: "monoid-with-tests".into(), laws: Vec::new(), structural: true },
        mk("restriction-with-tests", pick(RESTRICTION)),
        mk("eite", eite),
        mk("twisted-agreeable", twisted),
        mk("disagreeable", disagree),
        mk("weak-comparison", weak),
        mk("kleenean-w", kleenean),
        mk("order", pick(&["stable"])),
    ]
}

pub fn suite(name: &str) -> Option<Suite> {
    suites().into_iter().find(|s| s.name == name)
}

/// How to walk the assignment space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled {
        count: u64,
        seed: u64,
    },
    /// Exhaustive when the assignment space fits inside the sample
    /// budget, sampled otherwise.
    Auto {
        count: u64,
        seed: u64,
    },
}

pub const DEFAULT_SAMPLES: u64 = 1_000_000;

impl Default for CheckMode {
    fn default() -> Self {
        CheckMode::Auto { count: DEFAULT_SAMPLES, seed: 0 }
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("law `{law}` needs the `{}` operation, which the context lacks", .op.name())]
    Capability { law: String, op: OpKind },
    #[error("law `{law}` failed to evaluate: {source}")]
    Eval {
        law: String,
        #[source]
        source: EvalError,
    },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase", tag = "status")]
pub enum LawStatus {
    Pass,
    Fail {
        witness: BTreeMap<String, usize>,
        /// Index into the law's conclusions of the first failing equation.
        equation: usize,
    },
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LawResult {
    pub law: String,
    #[serde(flatten)]
    pub status: LawStatus,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    /// Tuples inspected: the full space on a pass, the witness position
    /// plus one on a failure.
    pub examined: u64,
}

impl LawResult {
    pub fn passed(&self) -> bool {
        matches!(self.status, LawStatus::Pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub results: Vec<LawResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(LawResult::passed)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            match &r.status {
                LawStatus::Pass => {
                    out.push_str(&format!(
                        "PASS {:<18} ({}, {} tuples)\n",
                        r.law, r.mode, r.examined
                    ));
                }
                LawStatus::Fail { witness, equation } => {
                    let w = witness
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>()
                        .join(", ");
                    out.push_str(&format!(
                        "FAIL {:<18} at {{{}}} (conclusion {}, {}, {} tuples)\n",
                        r.law, w, equation, r.mode, r.examined
                    ));
                }
            }
        }
        out
    }
}

struct VarRange<V> {
    name: String,
    elems: Vec<usize>,
    values: Vec<V>,
}

/// `{x : D(x) = x}`, deriving `D` through agreement or weak comparison
/// when no domain operation is supplied.
fn domain_elements_via<C: EvalContext>(ctx: &C) -> Result<Vec<usize>, CtxError> {
    if ctx.supports(OpKind::Domain) {
        return ctx.domain_element_indices();
    }
    let derive = |x: &C::Value| -> Result<C::Value, CtxError> {
        if ctx.supports(OpKind::Star) {
            ctx.star(x, x)
        } else if ctx.supports(OpKind::Wc) {
            ctx.wc(x, x, &ctx.one(), &ctx.zero())
        } else {
            Err(CtxError::MissingCapability(OpKind::Domain))
        }
    };
    let mut out = Vec::new();
    for i in 0..ctx.element_count() {
        let v = ctx.element(i);
        if derive(&v)? == v {
            out.push(i);
        }
    }
    Ok(out)
}

fn ranges_for<C: EvalContext>(ctx: &C, law: &Law) -> Result<Vec<VarRange<C::Value>>, CheckError> {
    law.vars
        .iter()
        .map(|(name, sort)| {
            let elems: Vec<usize> = match sort {
                VarSort::Elem => (0..ctx.element_count()).collect(),
                VarSort::Test => ctx.test_elements().to_vec(),
                VarSort::DomElem => domain_elements_via(ctx).map_err(|e| CheckError::Eval {
                    law: law.name.clone(),
                    source: EvalError::Ctx(e),
                })?,
            };
            let values = elems.iter().map(|&i| ctx.element(i)).collect();
            Ok(VarRange { name: name.clone(), elems, values })
        })
        .collect()
}

fn capability_check<C: EvalContext>(ctx: &C, law: &Law) -> Result<(), CheckError> {
    for op in law.required_ops() {
        if !ctx.supports(op) {
            return Err(CheckError::Capability { law: law.name.clone(), op });
        }
    }
    // quantifying over domain elements needs some route to D
    if law.has_domelem_vars()
        && ![OpKind::Domain, OpKind::Star, OpKind::Wc].iter().any(|&op| ctx.supports(op))
    {
        return Err(CheckError::Capability { law: law.name.clone(), op: OpKind::Domain });
    }
    Ok(())
}

/// Evaluates the law at one decoded assignment. Returns the index of the
/// first violated conclusion, if the premises hold and one fails.
fn violated_at<C: EvalContext>(
    ctx: &C,
    law: &Law,
    asg: &BTreeMap<String, C::Value>,
) -> Result<Option<usize>, EvalError> {
    for p in &law.premises {
        if p.lhs.eval(ctx, asg)? != p.rhs.eval(ctx, asg)? {
            return Ok(None);
        }
    }
    for (i, c) in law.conclusions.iter().enumerate() {
        if c.lhs.eval(ctx, asg)? != c.rhs.eval(ctx, asg)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn decode_exhaustive<V: Clone>(
    ranges: &[VarRange<V>],
    mut idx: u64,
    asg: &mut BTreeMap<String, V>,
    digits: &mut [usize],
) {
    for (pos, r) in ranges.iter().enumerate().rev() {
        let len = r.values.len() as u64;
        let digit = (idx % len) as usize;
        idx /= len;
        digits[pos] = digit;
        *asg.get_mut(&r.name).expect("assignment keys preset") = r.values[digit].clone();
    }
}

fn decode_sampled<V: Clone>(
    ranges: &[VarRange<V>],
    seed: u64,
    sample: u64,
    asg: &mut BTreeMap<String, V>,
    digits: &mut [usize],
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(sample as u128 * ranges.len() as u128);
    for (pos, r) in ranges.iter().enumerate() {
        let len = r.values.len() as u64;
        let digit = ((rng.next_u32() as u64 * len) >> 32) as usize;
        digits[pos] = digit;
        *asg.get_mut(&r.name).expect("assignment keys preset") = r.values[digit].clone();
    }
}

struct ScanOutcome {
    first_violation: Option<(u64, Vec<usize>, usize)>,
}

fn scan_range<C: EvalContext + Sync>(
    ctx: &C,
    law: &Law,
    ranges: &[VarRange<C::Value>],
    lo: u64,
    hi: u64,
    sampled_seed: Option<u64>,
) -> Result<ScanOutcome, EvalError> {
    let mut asg: BTreeMap<String, C::Value> =
        ranges.iter().map(|r| (r.name.clone(), ctx.zero())).collect();
    let mut digits = vec![0usize; ranges.len()];
    for idx in lo..hi {
        match sampled_seed {
            None => decode_exhaustive(ranges, idx, &mut asg, &mut digits),
            Some(seed) => decode_sampled(ranges, seed, idx, &mut asg, &mut digits),
        }
        if let Some(eq_idx) = violated_at(ctx, law, &asg)? {
            return Ok(ScanOutcome { first_violation: Some((idx, digits.clone(), eq_idx)) });
        }
    }
    Ok(ScanOutcome { first_violation: None })
}

/// Checks one law. `workers` partitions the assignment space; results are
/// identical for every worker count.
pub fn check_law<C: EvalContext + Sync>(
    ctx: &C,
    law: &Law,
    mode: CheckMode,
    workers: usize,
) -> Result<LawResult, CheckError>
where
    C::Value: Send + Sync,
{
    capability_check(ctx, law)?;
    let ranges = ranges_for(ctx, law)?;
    let space: u64 = ranges.iter().map(|r| r.values.len() as u64).product();
    let (total, sampled_seed, mode_name, seed, count) = match mode {
        CheckMode::Exhaustive => (space, None, "exhaustive".to_string(), None, None),
        CheckMode::Sampled { count, seed } => {
            (count, Some(seed), "sampled".to_string(), Some(seed), Some(count))
        }
        CheckMode::Auto { count, seed } => {
            if space <= count {
                (space, None, "exhaustive".to_string(), None, None)
            } else {
                (count, Some(seed), "sampled".to_string(), Some(seed), Some(count))
            }
        }
    };
    if ranges.iter().any(|r| r.values.is_empty()) {
        // no sort-correct assignments: vacuously true
        return Ok(LawResult {
            law: law.name.clone(),
            status: LawStatus::Pass,
            mode: mode_name,
            seed,
            count,
            examined: 0,
        });
    }

    let workers = workers.max(1).min(total.max(1) as usize);
    let chunk = total.div_ceil(workers as u64);
    let outcomes: Vec<Result<ScanOutcome, EvalError>> = if workers <= 1 {
        vec![scan_range(ctx, law, &ranges, 0, total, sampled_seed)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    let ranges = &ranges;
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(total);
                    scope.spawn(move || scan_range(ctx, law, ranges, lo, hi, sampled_seed))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut first: Option<(u64, Vec<usize>, usize)> = None;
    for outcome in outcomes {
        let outcome =
            outcome.map_err(|source| CheckError::Eval { law: law.name.clone(), source })?;
        if let Some(v) = outcome.first_violation {
            if first.as_ref().is_none_or(|f| v.0 < f.0) {
                first = Some(v);
            }
        }
    }
    Ok(match first {
        None => LawResult {
            law: law.name.clone(),
            status: LawStatus::Pass,
            mode: mode_name,
            seed,
            count,
            examined: total,
        },
        Some((idx, digits, eq_idx)) => {
            let witness =
                ranges.iter().zip(&digits).map(|(r, &d)| (r.name.clone(), r.elems[d])).collect();
            LawResult {
                law: law.name.clone(),
                status: LawStatus::Fail { witness, equation: eq_idx },
                mode: mode_name,
                seed,
                count,
                examined: idx + 1,
            }
        }
    })
}

/// Replays a reported witness: evaluates the law once at the assignment.
pub fn replay<C: EvalContext>(
    ctx: &C,
    law: &Law,
    witness: &BTreeMap<String, usize>,
) -> Result<Option<usize>, CheckError> {
    let asg = witness.iter().map(|(k, &v)| (k.clone(), ctx.element(v))).collect();
    violated_at(ctx, law, &asg).map_err(|source| CheckError::Eval { law: law.name.clone(), source })
}

fn structural_model_results(model: &ConcreteModel) -> Vec<LawResult> {
    let mk = |law: &str, status: LawStatus| LawResult {
        law: law.to_string(),
        status,
        mode: "structural".to_string(),
        seed: None,
        count: None,
        examined: 0,
    };
    let mut out = Vec::new();
    let tests = model.test_elements().to_vec();
    let one = model.one();
    let zero = model.zero();
    let has = |m: &crate::pfun::PartialMap| model.lookup_map(m).filter(|i| tests.contains(i));
    out.push(mk(
        "tests-contain-one",
        if has(&one).is_some() {
            LawStatus::Pass
        } else {
            LawStatus::Fail { witness: BTreeMap::new(), equation: 0 }
        },
    ));
    out.push(mk(
        "tests-contain-zero",
        if has(&zero).is_some() {
            LawStatus::Pass
        } else {
            LawStatus::Fail { witness: BTreeMap::new(), equation: 0 }
        },
    ));
    let mut closed = LawStatus::Pass;
    let mut comp_closed = LawStatus::Pass;
    for &a in &tests {
        let am = model.element(a);
        if has(&am.domain_of().complement().as_map()).is_none() {
            comp_closed = LawStatus::Fail { witness: [("a".to_string(), a)].into(), equation: 0 };
        }
        for &b in &tests {
            let m = am.compose(&model.element(b));
            if has(&m).is_none() {
                closed = LawStatus::Fail {
                    witness: [("a".to_string(), a), ("b".to_string(), b)].into(),
                    equation: 0,
                };
            }
        }
    }
    out.push(mk("test-meet-closed", closed));
    out.push(mk("test-complement-closed", comp_closed));
    out
}

fn structural_algebra_results(alg: &FiniteAlgebra) -> Vec<LawResult> {
    let report = validate(alg);
    if report.is_valid() {
        return vec![LawResult {
            law: "structure".to_string(),
            status: LawStatus::Pass,
            mode: "structural".to_string(),
            seed: None,
            count: None,
            examined: 0,
        }];
    }
    report
        .violations
        .into_iter()
        .map(|v| LawResult {
            law: format!("structure:{}", v.rule),
            status: LawStatus::Fail {
                witness: v.witness.iter().enumerate().map(|(i, &x)| (format!("x{i}"), x)).collect(),
                equation: 0,
            },
            mode: "structural".to_string(),
            seed: None,
            count: None,
            examined: 0,
        })
        .collect()
}

/// Either kind of checkable context, as loaded from a file.
pub enum AnyContext {
    Model(Box<ConcreteModel>),
    Algebra(Box<FiniteAlgebra>),
}

impl AnyContext {
    pub fn check_suite(
        &self,
        suite: &Suite,
        mode: CheckMode,
        workers: usize,
    ) -> Result<CheckReport, CheckError> {
        match self {
            AnyContext::Model(m) => check_suite(m.as_ref(), suite, mode, workers),
            AnyContext::Algebra(a) => check_suite(a.as_ref(), suite, mode, workers),
        }
    }

    pub fn supports(&self, op: OpKind) -> bool {
        match self {
            AnyContext::Model(m) => m.supports(op),
            AnyContext::Algebra(a) => a.supports(op),
        }
    }
}

/// Runs a whole suite. The structural suite dispatches on the context
/// kind; equational suites enumerate assignments per law.
pub fn check_suite<C>(
    ctx: &C,
    suite: &Suite,
    mode: CheckMode,
    workers: usize,
) -> Result<CheckReport, CheckError>
where
    C: EvalContext + Sync + StructuralCheck,
    C::Value: Send + Sync,
{
    let results = if suite.structural {
        ctx.structural_results()
    } else {
        suite.laws.iter().map(|law| check_law(ctx, law, mode, workers)).collect::<Result<_, _>>()?
    };
    Ok(CheckReport { suite: suite.name.clone(), results })
}

/// Structural (monoid-with-tests) checking, per context kind.
pub trait StructuralCheck {
    fn structural_results(&self) -> Vec<LawResult>;
}

impl StructuralCheck for ConcreteModel {
    fn structural_results(&self) -> Vec<LawResult> {
        structural_model_results(self)
    }
}

impl StructuralCheck for FiniteAlgebra {
    fn structural_results(&self) -> Vec<LawResult> {
        structural_algebra_results(self)
    }
}

/// One equivalence of a quasi-equation with an equational set, evaluated
/// per algebra: both sides must be true together or false together.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EquivStatus {
    Agree { holds: bool },
    Disagree { left: bool, right: bool },
    SkippedCapability { op: String },
    SkippedBase { law: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceOutcome {
    pub algebra: String,
    pub pair: String,
    #[serde(flatten)]
    pub status: EquivStatus,
}

struct EquivalencePair {
    name: &'static str,
    base: Vec<Law>,
    left: Vec<Law>,
    right: Vec<Law>,
}

fn equivalence_pairs() -> Vec<EquivalencePair> {
    let expand_all = |names: &[&str]| -> Vec<Law> {
        pick(names)
            .into_iter()
            .map(|l| l.expand(Basis::wc_only()).expect("weak-comparison laws expand"))
            .collect()
    };
    vec![
        // DT2 against the two equations specifying if-then-else restriction
        EquivalencePair {
            name: "DT2<=>{EITE1,EITE4}",
            base: pick(&[
                "D1", "Dleft", "Dcom", "DD", "Dtwisted", "DT1", "EITE2", "EITE3", "EITE5",
            ]),
            left: pick(&["DT2"]),
            right: pick(&["EITE1", "EITE4"]),
        },
        // DT2 against its domain-element form over agreement
        EquivalencePair {
            name: "DT2<=>DT2A",
            base: pick(&[
                "D1", "Dleft", "Dcom", "DD", "Dtwisted", "DT1", "Dstar", "A1", "Acom", "Aeq",
                "Anorm", "Atwisted",
            ]),
            left: pick(&["DT2"]),
            right: pick(&["DT2A"]),
        },
        // inimp against the two weak-comparison equations
        EquivalencePair {
            name: "inimp<=>{wc1,wc2}",
            base: expand_all(&[
                "A1", "Acom", "Aeq", "Anorm", "Atwisted", "in1", "intwist", "ineq", "innorm",
                "comp1", "comp2", "comp3",
            ]),
            left: expand_all(&["inimp"]),
            right: expand_all(&["wc1", "wc2"]),
        },
    ]
}

fn first_failing<C: EvalContext + Sync>(
    ctx: &C,
    laws: &[Law],
    mode: CheckMode,
    workers: usize,
) -> Result<Option<String>, CheckError>
where
    C::Value: Send + Sync,
{
    for law in laws {
        let r = check_law(ctx, law, mode, workers)?;
        if !r.passed() {
            return Ok(Some(r.law));
        }
    }
    Ok(None)
}

fn check_equivalences_on<C: EvalContext + Sync>(
    name: &str,
    ctx: &C,
    mode: CheckMode,
    workers: usize,
) -> Result<Vec<EquivalenceOutcome>, CheckError>
where
    C::Value: Send + Sync,
{
    let mut out = Vec::new();
    'pairs: for pair in equivalence_pairs() {
        for law in pair.base.iter().chain(&pair.left).chain(&pair.right) {
            if let Err(CheckError::Capability { op, .. }) = capability_check(ctx, law) {
                out.push(EquivalenceOutcome {
                    algebra: name.to_string(),
                    pair: pair.name.to_string(),
                    status: EquivStatus::SkippedCapability { op: op.name().to_string() },
                });
                continue 'pairs;
            }
        }
        if let Some(failed) = first_failing(ctx, &pair.base, mode, workers)? {
            out.push(EquivalenceOutcome {
                algebra: name.to_string(),
                pair: pair.name.to_string(),
                status: EquivStatus::SkippedBase { law: failed },
            });
            continue;
        }
        let left = first_failing(ctx, &pair.left, mode, workers)?.is_none();
        let right = first_failing(ctx, &pair.right, mode, workers)?.is_none();
        out.push(EquivalenceOutcome {
            algebra: name.to_string(),
            pair: pair.name.to_string(),
            status: if left == right {
                EquivStatus::Agree { holds: left }
            } else {
                EquivStatus::Disagree { left, right }
            },
        });
    }
    Ok(out)
}

/// For every corpus entry, records whether each quasi-equation and its
/// equational counterpart agree in truth value, skipping entries lacking
/// the needed operations or failing the ambient base laws. A disagreement
/// flags a defect in this implementation, not in the theory.
pub fn check_equivalences(
    corpus: &[(String, AnyContext)],
    mode: CheckMode,
    workers: usize,
) -> Result<Vec<EquivalenceOutcome>, CheckError> {
    let mut out = Vec::new();
    for (name, ctx) in corpus {
        let results = match ctx {
            AnyContext::Model(m) => check_equivalences_on(name, m.as_ref(), mode, workers)?,
            AnyContext::Algebra(a) => check_equivalences_on(name, a.as_ref(), mode, workers)?,
        };
        out.extend(results);
    }
    Ok(out)
}
