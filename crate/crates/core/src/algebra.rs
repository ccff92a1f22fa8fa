//! Abstract finite two-sorted algebras `(S, B)` given by operation tables.
//!
//! The required structure is a monoid with zero and a distinguished test
//! sort; domain, agreement, disagreement, extended if-then-else, weak
//! comparison and extended while-do are optional tables. [`validate`]
//! checks the structural axioms and reports violations with witnesses;
//! equational laws live in the `laws` module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::{ConcreteModel, CtxError, EvalContext, OpKind};
use crate::pfun::PartialMap;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("table `{table}` has {len} entries, expected {expected}")]
    BadTableSize { table: &'static str, len: usize, expected: usize },
    #[error("table `{table}` entry {value} is outside 0..{size}")]
    EntryOutOfRange { table: &'static str, value: usize, size: usize },
    #[error("algebra does not carry a domain table")]
    MissingDomain,
    #[error("complement table must align with the test list")]
    BadComplement,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A finite algebra as tables. Elements are `0..size`; `tests` lists the
/// element indices of the test sort in a fixed order, and all optional
/// tables are flattened row-major (see the file format below).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    size: usize,
    one: usize,
    zero: usize,
    mult: Vec<usize>,
    domain: Option<Vec<usize>>,
    tests: Vec<usize>,
    complement: Vec<usize>,
    star: Option<Vec<usize>>,
    neq: Option<Vec<usize>>,
    eite: Option<Vec<usize>>,
    wc: Option<Vec<usize>>,
    whl: Option<Vec<usize>>,
    test_pos: Vec<Option<usize>>,
}

/// On-disk form. Optional tables use the index formulas
/// `eite[((s*T + a)*m + t)*m + u]`, `wc[((s*m + t)*m + u)*m + v]` and
/// `while[(t*T + a)*m + s]` where `m` is the size, `T` the test count and
/// `a` a position into `tests`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub size: usize,
    pub one: usize,
    pub zero: usize,
    pub mult: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<usize>>,
    pub tests: Vec<usize>,
    pub complement: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neq: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eite: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wc: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "while")]
    pub whl: Option<Vec<usize>>,
}

fn check_table(
    table: &'static str,
    data: &[usize],
    expected: usize,
    size: usize,
) -> Result<(), AlgebraError> {
    if data.len() != expected {
        return Err(AlgebraError::BadTableSize { table, len: data.len(), expected });
    }
    for &v in data {
        if v >= size {
            return Err(AlgebraError::EntryOutOfRange { table, value: v, size });
        }
    }
    Ok(())
}

impl FiniteAlgebra {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        size: usize,
        one: usize,
        zero: usize,
        mult: Vec<usize>,
        domain: Option<Vec<usize>>,
        tests: Vec<usize>,
        complement: Vec<usize>,
        star: Option<Vec<usize>>,
        neq: Option<Vec<usize>>,
        eite: Option<Vec<usize>>,
        wc: Option<Vec<usize>>,
        whl: Option<Vec<usize>>,
    ) -> Result<Self, AlgebraError> {
        let t = tests.len();
        check_table("mult", &mult, size * size, size)?;
        check_table("tests", &tests, t, size)?;
        if one >= size || zero >= size {
            return Err(AlgebraError::EntryOutOfRange {
                table: "constants",
                value: one.max(zero),
                size,
            });
        }
        if let Some(d) = &domain {
            check_table("domain", d, size, size)?;
        }
        check_table("complement", &complement, t, size)?;
        if let Some(s) = &star {
            check_table("star", s, size * size, size)?;
        }
        if let Some(n) = &neq {
            check_table("neq", n, size * size, size)?;
        }
        if let Some(e) = &eite {
            check_table("eite", e, size * t * size * size, size)?;
        }
        if let Some(w) = &wc {
            check_table("wc", w, size * size * size * size, size)?;
        }
        if let Some(w) = &whl {
            check_table("while", w, size * t * size, size)?;
        }
        let mut test_pos = vec![None; size];
        for (pos, &e) in tests.iter().enumerate() {
            if test_pos[e].is_some() {
                return Err(AlgebraError::BadComplement);
            }
            test_pos[e] = Some(pos);
        }
        for &c in &complement {
            if test_pos[c].is_none() {
                return Err(AlgebraError::BadComplement);
            }
        }
        Ok(FiniteAlgebra {
            size,
            one,
            zero,
            mult,
            domain,
            tests,
            complement,
            star,
            neq,
            eite,
            wc,
            whl,
            test_pos,
        })
    }

    pub fn from_file(file: &AlgebraFile) -> Result<Self, AlgebraError> {
        FiniteAlgebra::new(
            file.size,
            file.one,
            file.zero,
            file.mult.clone(),
            file.domain.clone(),
            file.tests.clone(),
            file.complement.clone(),
            file.star.clone(),
            file.neq.clone(),
            file.eite.clone(),
            file.wc.clone(),
            file.whl.clone(),
        )
    }

    pub fn to_file(&self) -> AlgebraFile {
        AlgebraFile {
            size: self.size,
            one: self.one,
            zero: self.zero,
            mult: self.mult.clone(),
            domain: self.domain.clone(),
            tests: self.tests.clone(),
            complement: self.complement.clone(),
            star: self.star.clone(),
            neq: self.neq.clone(),
            eite: self.eite.clone(),
            wc: self.wc.clone(),
            whl: self.whl.clone(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn one_elem(&self) -> usize {
        self.one
    }

    pub fn zero_elem(&self) -> usize {
        self.zero
    }

    pub fn tests(&self) -> &[usize] {
        &self.tests
    }

    pub fn is_test(&self, x: usize) -> bool {
        self.test_pos[x].is_some()
    }

    pub fn test_position(&self, x: usize) -> Option<usize> {
        self.test_pos[x]
    }

    pub fn m(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.size + b]
    }

    pub fn has_domain(&self) -> bool {
        self.domain.is_some()
    }

    pub fn has_star(&self) -> bool {
        self.star.is_some()
    }

    pub fn has_neq(&self) -> bool {
        self.neq.is_some()
    }

    pub fn has_eite(&self) -> bool {
        self.eite.is_some()
    }

    pub fn has_wc(&self) -> bool {
        self.wc.is_some()
    }

    pub fn has_whl(&self) -> bool {
        self.whl.is_some()
    }

    pub fn d(&self, a: usize) -> Option<usize> {
        self.domain.as_ref().map(|t| t[a])
    }

    pub fn comp_test(&self, x: usize) -> Option<usize> {
        self.test_pos[x].map(|p| self.complement[p])
    }

    pub fn star_of(&self, a: usize, b: usize) -> Option<usize> {
        self.star.as_ref().map(|t| t[a * self.size + b])
    }

    pub fn neq_of(&self, a: usize, b: usize) -> Option<usize> {
        self.neq.as_ref().map(|t| t[a * self.size + b])
    }

    pub fn eite_of(&self, s: usize, a: usize, t: usize, u: usize) -> Option<usize> {
        let apos = self.test_pos[a]?;
        let tcount = self.tests.len();
        self.eite.as_ref().map(|tab| tab[((s * tcount + apos) * self.size + t) * self.size + u])
    }

    pub fn wc_of(&self, s: usize, t: usize, u: usize, v: usize) -> Option<usize> {
        let n = self.size;
        self.wc.as_ref().map(|tab| tab[((s * n + t) * n + u) * n + v])
    }

    pub fn whl_of(&self, t: usize, a: usize, s: usize) -> Option<usize> {
        let apos = self.test_pos[a]?;
        let tcount = self.tests.len();
        self.whl.as_ref().map(|tab| tab[(t * tcount + apos) * self.size + s])
    }

    /// The domain elements `D(S) = {x : D(x) = x}`.
    pub fn domain_elements(&self) -> Result<Vec<usize>, AlgebraError> {
        let d = self.domain.as_ref().ok_or(AlgebraError::MissingDomain)?;
        Ok((0..self.size).filter(|&x| d[x] == x).collect())
    }

    /// Natural order `a <= b` iff `a = D(a) b`.
    pub fn leq(&self, a: usize, b: usize) -> Result<bool, AlgebraError> {
        let d = self.domain.as_ref().ok_or(AlgebraError::MissingDomain)?;
        Ok(self.m(d[a], b) == a)
    }

    /// The full natural-order relation as a flattened `size x size` matrix.
    pub fn natural_order(&self) -> Result<Vec<bool>, AlgebraError> {
        let mut rel = vec![false; self.size * self.size];
        for a in 0..self.size {
            for b in 0..self.size {
                rel[a * self.size + b] = self.leq(a, b)?;
            }
        }
        Ok(rel)
    }

    /// Minimal `(index, period)` per element with `x^index = x^(index+period)`.
    /// Every finite algebra is periodic, so this always succeeds.
    pub fn periodicity(&self) -> Vec<(usize, usize)> {
        (0..self.size)
            .map(|x| {
                let mut seen: Vec<usize> = vec![x]; // powers x^1, x^2, ..
                let mut cur = x;
                loop {
                    cur = self.m(cur, x);
                    if let Some(pos) = seen.iter().position(|&p| p == cur) {
                        let index = pos + 1;
                        let period = seen.len() + 1 - index;
                        return (index, period);
                    }
                    seen.push(cur);
                }
            })
            .collect()
    }
}

impl EvalContext for FiniteAlgebra {
    type Value = usize;

    fn element_count(&self) -> usize {
        self.size
    }

    fn element(&self, idx: usize) -> usize {
        idx
    }

    fn element_index(&self, v: &usize) -> Option<usize> {
        (*v < self.size).then_some(*v)
    }

    fn test_elements(&self) -> &[usize] {
        &self.tests
    }

    fn one(&self) -> usize {
        self.one
    }

    fn zero(&self) -> usize {
        self.zero
    }

    fn supports(&self, op: OpKind) -> bool {
        match op {
            OpKind::Mult | OpKind::Complement => true,
            OpKind::Domain => self.domain.is_some(),
            OpKind::Star => self.star.is_some(),
            OpKind::Neq => self.neq.is_some(),
            OpKind::Eite => self.eite.is_some(),
            OpKind::Wc => self.wc.is_some(),
            OpKind::While => self.whl.is_some(),
            OpKind::AntiP | OpKind::Bowtie | OpKind::PrefUnion => false,
        }
    }

    fn mult(&self, a: &usize, b: &usize) -> usize {
        self.m(*a, *b)
    }

    fn domain(&self, a: &usize) -> Result<usize, CtxError> {
        self.d(*a).ok_or(CtxError::MissingCapability(OpKind::Domain))
    }

    fn complement(&self, a: &usize) -> Result<usize, CtxError> {
        self.comp_test(*a).ok_or(CtxError::NotATest)
    }

    fn star(&self, a: &usize, b: &usize) -> Result<usize, CtxError> {
        self.star_of(*a, *b).ok_or(CtxError::MissingCapability(OpKind::Star))
    }

    fn neq(&self, a: &usize, b: &usize) -> Result<usize, CtxError> {
        self.neq_of(*a, *b).ok_or(CtxError::MissingCapability(OpKind::Neq))
    }

    fn eite(&self, s: &usize, a: &usize, t: &usize, u: &usize) -> Result<usize, CtxError> {
        if self.eite.is_none() {
            return Err(CtxError::MissingCapability(OpKind::Eite));
        }
        if self.test_pos[*a].is_none() {
            return Err(CtxError::NotATest);
        }
        Ok(self.eite_of(*s, *a, *t, *u).unwrap())
    }

    fn wc(&self, s: &usize, t: &usize, u: &usize, v: &usize) -> Result<usize, CtxError> {
        self.wc_of(*s, *t, *u, *v).ok_or(CtxError::MissingCapability(OpKind::Wc))
    }

    fn whl(&self, t: &usize, a: &usize, s: &usize) -> Result<usize, CtxError> {
        if self.whl.is_none() {
            return Err(CtxError::MissingCapability(OpKind::While));
        }
        if self.test_pos[*a].is_none() {
            return Err(CtxError::NotATest);
        }
        Ok(self.whl_of(*t, *a, *s).unwrap())
    }

    fn anti_p(&self, _a: &usize) -> Result<usize, CtxError> {
        Err(CtxError::MissingCapability(OpKind::AntiP))
    }

    fn bowtie(&self, _a: &usize, _b: &usize) -> Result<usize, CtxError> {
        Err(CtxError::MissingCapability(OpKind::Bowtie))
    }

    fn pref_union(&self, _a: &usize, _b: &usize) -> Result<usize, CtxError> {
        Err(CtxError::MissingCapability(OpKind::PrefUnion))
    }
}

/// One violated structural invariant with a witness tuple.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub rule: String,
    pub witness: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, rule: &str, witness: Vec<usize>, detail: String) {
        self.violations.push(Violation { rule: rule.to_string(), witness, detail });
    }
}

/// Checks the monoid-with-tests structure: associativity, identity and
/// zero, the test sort a commutative idempotent submonoid containing both
/// constants, complement a Boolean complementation (with meet the
/// multiplication and join `(a'b')'`), and `D(a) = a` on tests when a
/// domain table is present.
pub fn validate(alg: &FiniteAlgebra) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = alg.size();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if alg.m(alg.m(a, b), c) != alg.m(a, alg.m(b, c)) {
                    report.push(
                        "assoc",
                        vec![a, b, c],
                        format!(
                            "(ab)c = {}, a(bc) = {}",
                            alg.m(alg.m(a, b), c),
                            alg.m(a, alg.m(b, c))
                        ),
                    );
                }
            }
        }
    }
    let one = alg.one_elem();
    let zero = alg.zero_elem();
    for a in 0..n {
        if alg.m(one, a) != a || alg.m(a, one) != a {
            report.push("one", vec![a], "1 is not an identity".into());
        }
        if alg.m(zero, a) != zero || alg.m(a, zero) != zero {
            report.push("zero", vec![a], "0 is not a zero".into());
        }
    }
    if !alg.is_test(one) {
        report.push("tests-contain-one", vec![one], "1 is not in the test sort".into());
    }
    if !alg.is_test(zero) {
        report.push("tests-contain-zero", vec![zero], "0 is not in the test sort".into());
    }
    let tests = alg.tests().to_vec();
    for &a in &tests {
        if alg.m(a, a) != a {
            report.push("test-idempotent", vec![a], format!("aa = {}", alg.m(a, a)));
        }
        for &b in &tests {
            if alg.m(a, b) != alg.m(b, a) {
                report.push(
                    "test-commute",
                    vec![a, b],
                    format!("ab = {}, ba = {}", alg.m(a, b), alg.m(b, a)),
                );
            }
            if !alg.is_test(alg.m(a, b)) {
                report.push(
                    "test-closed",
                    vec![a, b],
                    format!("ab = {} is not a test", alg.m(a, b)),
                );
            }
        }
    }
    // complement: involution, a a' = 0, and the derived join makes B Boolean
    let comp = |x: usize| alg.comp_test(x).unwrap();
    let join = |x: usize, y: usize| comp(alg.m(comp(x), comp(y)));
    for &a in &tests {
        if comp(comp(a)) != a {
            report.push("complement-involution", vec![a], format!("a'' = {}", comp(comp(a))));
        }
        if alg.m(a, comp(a)) != zero {
            report.push("complement-meet", vec![a], format!("a a' = {}", alg.m(a, comp(a))));
        }
        if join(a, comp(a)) != one {
            report.push("complement-join", vec![a], format!("a or a' = {}", join(a, comp(a))));
        }
        for &b in &tests {
            if join(a, alg.m(a, b)) != a {
                report.push("bool-absorb-join", vec![a, b], String::new());
            }
            if alg.m(a, join(a, b)) != a {
                report.push("bool-absorb-meet", vec![a, b], String::new());
            }
            for &c in &tests {
                if alg.m(a, join(b, c)) != join(alg.m(a, b), alg.m(a, c)) {
                    report.push("bool-dist-meet-join", vec![a, b, c], String::new());
                }
                if join(a, alg.m(b, c)) != alg.m(join(a, b), join(a, c)) {
                    report.push("bool-dist-join-meet", vec![a, b, c], String::new());
                }
                if join(join(a, b), c) != join(a, join(b, c)) {
                    report.push("bool-join-assoc", vec![a, b, c], String::new());
                }
            }
        }
    }
    if alg.has_domain() {
        for &a in &tests {
            if alg.d(a) != Some(a) {
                report.push("domain-fixes-tests", vec![a], format!("D(a) = {}", alg.d(a).unwrap()));
            }
        }
    }
    report
}

/// A partition of the carrier into disjoint covering blocks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("element {0} appears in more than one block")]
    Duplicated(usize),
    #[error("element {0} is not covered by any block")]
    Missing(usize),
    #[error("block member {0} is outside the carrier")]
    OutOfRange(usize),
}

impl Partition {
    /// The identity partition: every element a singleton.
    pub fn identity(n: usize) -> Self {
        Partition { blocks: (0..n).map(|x| vec![x]).collect() }
    }

    /// Builds from the listed non-trivial blocks, making every uncovered
    /// element a singleton.
    pub fn from_merges(n: usize, merges: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let mut block_of = vec![None; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for merge in merges {
            let id = blocks.len();
            for &x in merge {
                if x >= n {
                    return Err(PartitionError::OutOfRange(x));
                }
                if block_of[x].is_some() {
                    return Err(PartitionError::Duplicated(x));
                }
                block_of[x] = Some(id);
            }
            blocks.push(merge.clone());
        }
        for (x, b) in block_of.iter().enumerate() {
            if b.is_none() {
                blocks.push(vec![x]);
            }
        }
        let mut p = Partition { blocks };
        p.normalize();
        Ok(p)
    }

    fn normalize(&mut self) {
        for b in &mut self.blocks {
            b.sort_unstable();
        }
        self.blocks.sort_by_key(|b| b[0]);
    }

    pub fn block_map(&self, n: usize) -> Result<Vec<usize>, PartitionError> {
        let mut map = vec![None; n];
        for (i, block) in self.blocks.iter().enumerate() {
            for &x in block {
                if x >= n {
                    return Err(PartitionError::OutOfRange(x));
                }
                if map[x].is_some() {
                    return Err(PartitionError::Duplicated(x));
                }
                map[x] = Some(i);
            }
        }
        map.into_iter().enumerate().map(|(x, b)| b.ok_or(PartitionError::Missing(x))).collect()
    }
}

/// First found stability failure of one operation under a partition.
#[derive(Debug, Clone, Serialize)]
pub struct CongruenceViolation {
    pub op: String,
    pub args_lhs: Vec<usize>,
    pub args_rhs: Vec<usize>,
    pub result_lhs: usize,
    pub result_rhs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CongruenceReport {
    pub violation: Option<CongruenceViolation>,
    /// Blocks holding both test and non-test elements.
    pub mixed_blocks: Vec<usize>,
}

impl CongruenceReport {
    pub fn is_congruence(&self) -> bool {
        self.violation.is_none()
    }
}

/// Verifies block-stability of every operation the algebra carries, and
/// reports whether any block mixes test and non-test elements.
pub fn check_congruence(
    alg: &FiniteAlgebra,
    partition: &Partition,
) -> Result<CongruenceReport, PartitionError> {
    let n = alg.size();
    let block = partition.block_map(n)?;
    let mut pairs = Vec::new();
    for b in &partition.blocks {
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                pairs.push((b[i], b[j]));
            }
        }
    }
    let mixed_blocks = partition
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| {
            let tests = b.iter().filter(|&&x| alg.is_test(x)).count();
            tests != 0 && tests != b.len()
        })
        .map(|(i, _)| i)
        .collect();

    let mut violation = None;
    let mut record = |op: &str, lhs: Vec<usize>, rhs: Vec<usize>, rl: usize, rr: usize| {
        violation.get_or_insert(CongruenceViolation {
            op: op.to_string(),
            args_lhs: lhs,
            args_rhs: rhs,
            result_lhs: rl,
            result_rhs: rr,
        });
    };

    'outer: for &(x, y) in &pairs {
        for z in 0..n {
            let (a, b) = (alg.m(x, z), alg.m(y, z));
            if block[a] != block[b] {
                record("mult", vec![x, z], vec![y, z], a, b);
                break 'outer;
            }
            let (a, b) = (alg.m(z, x), alg.m(z, y));
            if block[a] != block[b] {
                record("mult", vec![z, x], vec![z, y], a, b);
                break 'outer;
            }
        }
        if alg.has_domain() {
            let (a, b) = (alg.d(x).unwrap(), alg.d(y).unwrap());
            if block[a] != block[b] {
                record("domain", vec![x], vec![y], a, b);
                break 'outer;
            }
        }
        if alg.has_star() {
            for z in 0..n {
                for (l, r) in [
                    (alg.star_of(x, z).unwrap(), alg.star_of(y, z).unwrap()),
                    (alg.star_of(z, x).unwrap(), alg.star_of(z, y).unwrap()),
                ] {
                    if block[l] != block[r] {
                        record("star", vec![x, z], vec![y, z], l, r);
                        break 'outer;
                    }
                }
            }
        }
        if alg.has_neq() {
            for z in 0..n {
                for (l, r) in [
                    (alg.neq_of(x, z).unwrap(), alg.neq_of(y, z).unwrap()),
                    (alg.neq_of(z, x).unwrap(), alg.neq_of(z, y).unwrap()),
                ] {
                    if block[l] != block[r] {
                        record("neq", vec![x, z], vec![y, z], l, r);
                        break 'outer;
                    }
                }
            }
        }
        if alg.is_test(x) && alg.is_test(y) {
            let (a, b) = (alg.comp_test(x).unwrap(), alg.comp_test(y).unwrap());
            if block[a] != block[b] {
                record("complement", vec![x], vec![y], a, b);
                break 'outer;
            }
        }
        // quaternary and ternary tables: vary each position in turn
        if alg.has_eite() {
            let tests = alg.tests().to_vec();
            for &a in &tests {
                for t in 0..n {
                    for u in 0..n {
                        let (l, r) =
                            (alg.eite_of(x, a, t, u).unwrap(), alg.eite_of(y, a, t, u).unwrap());
                        if block[l] != block[r] {
                            record("eite", vec![x, a, t, u], vec![y, a, t, u], l, r);
                            break 'outer;
                        }
                        for s in 0..n {
                            let (l, r) = (
                                alg.eite_of(s, a, x, u).unwrap(),
                                alg.eite_of(s, a, y, u).unwrap(),
                            );
                            if block[l] != block[r] {
                                record("eite", vec![s, a, x, u], vec![s, a, y, u], l, r);
                                break 'outer;
                            }
                            let (l, r) = (
                                alg.eite_of(s, a, t, x).unwrap(),
                                alg.eite_of(s, a, t, y).unwrap(),
                            );
                            if block[l] != block[r] {
                                record("eite", vec![s, a, t, x], vec![s, a, t, y], l, r);
                                break 'outer;
                            }
                        }
                    }
                }
            }
            if alg.is_test(x) && alg.is_test(y) {
                for s in 0..n {
                    for t in 0..n {
                        for u in 0..n {
                            let (l, r) = (
                                alg.eite_of(s, x, t, u).unwrap(),
                                alg.eite_of(s, y, t, u).unwrap(),
                            );
                            if block[l] != block[r] {
                                record("eite", vec![s, x, t, u], vec![s, y, t, u], l, r);
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        if alg.has_wc() {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let checks = [
                            (alg.wc_of(x, a, b, c), alg.wc_of(y, a, b, c)),
                            (alg.wc_of(a, x, b, c), alg.wc_of(a, y, b, c)),
                            (alg.wc_of(a, b, x, c), alg.wc_of(a, b, y, c)),
                            (alg.wc_of(a, b, c, x), alg.wc_of(a, b, c, y)),
                        ];
                        for (l, r) in checks {
                            let (l, r) = (l.unwrap(), r.unwrap());
                            if block[l] != block[r] {
                                record("wc", vec![x, a, b, c], vec![y, a, b, c], l, r);
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        if alg.has_whl() {
            let tests = alg.tests().to_vec();
            for &a in &tests {
                for s in 0..n {
                    let (l, r) = (alg.whl_of(x, a, s).unwrap(), alg.whl_of(y, a, s).unwrap());
                    if block[l] != block[r] {
                        record("while", vec![x, a, s], vec![y, a, s], l, r);
                        break 'outer;
                    }
                    let (l, r) = (alg.whl_of(s, a, x).unwrap(), alg.whl_of(s, a, y).unwrap());
                    if block[l] != block[r] {
                        record("while", vec![s, a, x], vec![s, a, y], l, r);
                        break 'outer;
                    }
                }
            }
            if alg.is_test(x) && alg.is_test(y) {
                for t in 0..n {
                    for s in 0..n {
                        let (l, r) = (alg.whl_of(t, x, s).unwrap(), alg.whl_of(t, y, s).unwrap());
                        if block[l] != block[r] {
                            record("while", vec![t, x, s], vec![t, y, s], l, r);
                            break 'outer;
                        }
                    }
                }
            }
        }
    }

    Ok(CongruenceReport { violation, mixed_blocks })
}

#[derive(Debug, Error)]
pub enum QuotientError {
    #[error("partition is not a congruence: `{}` maps {:?} and {:?} to unrelated elements {} and {}",
        .0.op, .0.args_lhs, .0.args_rhs, .0.result_lhs, .0.result_rhs)]
    NotACongruence(CongruenceViolation),
    #[error("block {0} mixes test and non-test elements")]
    MixedBlock(usize),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// The induced algebra on blocks. Fails on non-congruences (carrying the
/// witness operation) and on blocks mixing the two sorts. The returned map
/// sends each old element to its block index.
pub fn quotient(
    alg: &FiniteAlgebra,
    partition: &Partition,
) -> Result<(FiniteAlgebra, Vec<usize>), QuotientError> {
    let report = check_congruence(alg, partition)?;
    if let Some(v) = report.violation {
        return Err(QuotientError::NotACongruence(v));
    }
    if let Some(&b) = report.mixed_blocks.first() {
        return Err(QuotientError::MixedBlock(b));
    }
    let mut partition = partition.clone();
    partition.normalize();
    let n = alg.size();
    let block = partition.block_map(n)?;
    let m = partition.blocks.len();
    let rep: Vec<usize> = partition.blocks.iter().map(|b| b[0]).collect();

    let mult = (0..m * m).map(|i| block[alg.m(rep[i / m], rep[i % m])]).collect();
    let domain = alg.has_domain().then(|| rep.iter().map(|&r| block[alg.d(r).unwrap()]).collect());
    let tests: Vec<usize> =
        (0..m).filter(|&b| partition.blocks[b].iter().any(|&x| alg.is_test(x))).collect();
    let complement = tests.iter().map(|&b| block[alg.comp_test(rep[b]).unwrap()]).collect();
    let star = alg
        .has_star()
        .then(|| (0..m * m).map(|i| block[alg.star_of(rep[i / m], rep[i % m]).unwrap()]).collect());
    let neq = alg
        .has_neq()
        .then(|| (0..m * m).map(|i| block[alg.neq_of(rep[i / m], rep[i % m]).unwrap()]).collect());
    let tq = tests.len();
    let eite = alg.has_eite().then(|| {
        let mut tab = Vec::with_capacity(m * tq * m * m);
        for s in 0..m {
            for &a in &tests {
                for t in 0..m {
                    for u in 0..m {
                        tab.push(block[alg.eite_of(rep[s], rep[a], rep[t], rep[u]).unwrap()]);
                    }
                }
            }
        }
        tab
    });
    let wc = alg.has_wc().then(|| {
        let mut tab = Vec::with_capacity(m * m * m * m);
        for s in 0..m {
            for t in 0..m {
                for u in 0..m {
                    for v in 0..m {
                        tab.push(block[alg.wc_of(rep[s], rep[t], rep[u], rep[v]).unwrap()]);
                    }
                }
            }
        }
        tab
    });
    let whl = alg.has_whl().then(|| {
        let mut tab = Vec::with_capacity(m * tq * m);
        for t in 0..m {
            for &a in &tests {
                for s in 0..m {
                    tab.push(block[alg.whl_of(rep[t], rep[a], rep[s]).unwrap()]);
                }
            }
        }
        tab
    });

    let q = FiniteAlgebra::new(
        m,
        block[alg.one_elem()],
        block[alg.zero_elem()],
        mult,
        domain,
        tests,
        complement,
        star,
        neq,
        eite,
        wc,
        whl,
    )
    .expect("induced tables are well-formed");
    Ok((q, block))
}

/// Which operations to close a generating set under and tabulate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClosureOps {
    pub domain: bool,
    pub star: bool,
    pub neq: bool,
    pub eite: bool,
    pub wc: bool,
    pub whl: bool,
}

impl ClosureOps {
    pub fn basic() -> Self {
        ClosureOps { domain: true, ..Default::default() }
    }

    pub fn with_star() -> Self {
        ClosureOps { domain: true, star: true, ..Default::default() }
    }

    pub fn disagreeable() -> Self {
        ClosureOps { domain: true, star: true, neq: true, ..Default::default() }
    }

    pub fn all() -> Self {
        ClosureOps { domain: true, star: true, neq: true, eite: true, wc: true, whl: true }
    }
}

#[derive(Debug, Error)]
pub enum FromModelError {
    #[error("closure exceeded the bound of {bound} new elements (frontier size {frontier})")]
    ClosureOverflow { bound: usize, frontier: usize },
    #[error("test sort is not closed under complement")]
    TestsNotComplementClosed,
    #[error("test sort must contain the identity and null maps")]
    TestsMissingConstants,
}

/// A table algebra together with the concrete maps realizing its elements.
#[derive(Debug, Clone)]
pub struct TableModel {
    pub algebra: FiniteAlgebra,
    pub elements: Vec<PartialMap>,
    pub names: Vec<String>,
}

impl TableModel {
    pub fn index_of(&self, m: &PartialMap) -> Option<usize> {
        self.elements.iter().position(|e| e == m)
    }
}

/// Closes the model's elements under the listed operations (composition is
/// always included), then emits the operation tables. At most `bound` new
/// elements may be added.
pub fn from_model(
    model: &ConcreteModel,
    ops: ClosureOps,
    bound: usize,
) -> Result<TableModel, FromModelError> {
    let mut elems: Vec<PartialMap> = model.maps().to_vec();
    let mut names: Vec<String> = model.names().to_vec();
    let mut index: std::collections::HashMap<PartialMap, usize> =
        elems.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let initial = elems.len();

    let tests: Vec<usize> = model.test_elements().to_vec();
    let test_maps: Vec<PartialMap> = tests.iter().map(|&i| model.maps()[i].clone()).collect();
    for t in &test_maps {
        let comp = t.domain_of().complement().as_map();
        if !index.contains_key(&comp) || !tests.contains(&index[&comp]) {
            return Err(FromModelError::TestsNotComplementClosed);
        }
    }
    let one_map = PartialMap::identity(model.points());
    let zero_map = PartialMap::null(model.points());
    if !tests.contains(&index[&one_map]) || !tests.contains(&index[&zero_map]) {
        return Err(FromModelError::TestsMissingConstants);
    }

    loop {
        let len = elems.len();
        let mut new: Vec<PartialMap> = Vec::new();
        let push = |m: PartialMap,
                    index: &std::collections::HashMap<PartialMap, usize>,
                    new: &mut Vec<PartialMap>| {
            if !index.contains_key(&m) && !new.contains(&m) {
                new.push(m);
            }
        };
        for i in 0..len {
            for j in 0..len {
                push(elems[i].compose(&elems[j]), &index, &mut new);
            }
        }
        if ops.domain {
            for e in elems.iter().take(len) {
                push(e.domain_of().as_map(), &index, &mut new);
            }
        }
        if ops.star {
            for i in 0..len {
                for j in 0..len {
                    push(elems[i].agree_star(&elems[j]).as_map(), &index, &mut new);
                }
            }
        }
        if ops.neq {
            for i in 0..len {
                for j in 0..len {
                    push(elems[i].disagree(&elems[j]).as_map(), &index, &mut new);
                }
            }
        }
        if ops.eite {
            for s in 0..len {
                for t_map in &test_maps {
                    let a = t_map.domain_of();
                    for t in 0..len {
                        for u in 0..len {
                            push(
                                crate::pfun::ext_ite(&elems[s], &a, &elems[t], &elems[u]),
                                &index,
                                &mut new,
                            );
                        }
                    }
                }
            }
        }
        if ops.wc {
            for s in 0..len {
                for t in 0..len {
                    for u in 0..len {
                        for v in 0..len {
                            push(
                                crate::pfun::weak_cmp(&elems[s], &elems[t], &elems[u], &elems[v]),
                                &index,
                                &mut new,
                            );
                        }
                    }
                }
            }
        }
        if ops.whl {
            for t in 0..len {
                for a_map in &test_maps {
                    let a = a_map.domain_of();
                    for s in 0..len {
                        push(crate::pfun::ext_while(&elems[t], &a, &elems[s]), &index, &mut new);
                    }
                }
            }
        }
        if new.is_empty() {
            break;
        }
        if elems.len() + new.len() - initial > bound {
            return Err(FromModelError::ClosureOverflow { bound, frontier: new.len() });
        }
        for m in new {
            index.insert(m.clone(), elems.len());
            names.push(format!("x{}", elems.len()));
            elems.push(m);
        }
    }

    let n = elems.len();
    let idx = |m: &PartialMap| index[m];
    let mult: Vec<usize> = (0..n * n).map(|i| idx(&elems[i / n].compose(&elems[i % n]))).collect();
    let domain = ops.domain.then(|| elems.iter().map(|e| idx(&e.domain_of().as_map())).collect());
    let star = ops.star.then(|| {
        (0..n * n).map(|i| idx(&elems[i / n].agree_star(&elems[i % n]).as_map())).collect()
    });
    let neq = ops
        .neq
        .then(|| (0..n * n).map(|i| idx(&elems[i / n].disagree(&elems[i % n]).as_map())).collect());
    let eite = ops.eite.then(|| {
        let mut tab = Vec::with_capacity(n * tests.len() * n * n);
        for s in 0..n {
            for a in &test_maps {
                let a = a.domain_of();
                for t in 0..n {
                    for u in 0..n {
                        tab.push(idx(&crate::pfun::ext_ite(&elems[s], &a, &elems[t], &elems[u])));
                    }
                }
            }
        }
        tab
    });
    let wc = ops.wc.then(|| {
        let mut tab = Vec::with_capacity(n * n * n * n);
        for s in 0..n {
            for t in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        tab.push(idx(&crate::pfun::weak_cmp(
                            &elems[s], &elems[t], &elems[u], &elems[v],
                        )));
                    }
                }
            }
        }
        tab
    });
    let whl = ops.whl.then(|| {
        let mut tab = Vec::with_capacity(n * tests.len() * n);
        for t in 0..n {
            for a in &test_maps {
                let a = a.domain_of();
                for s in 0..n {
                    tab.push(idx(&crate::pfun::ext_while(&elems[t], &a, &elems[s])));
                }
            }
        }
        tab
    });
    let complement = test_maps.iter().map(|t| idx(&t.domain_of().complement().as_map())).collect();

    let algebra = FiniteAlgebra::new(
        n,
        idx(&one_map),
        idx(&zero_map),
        mult,
        domain,
        tests,
        complement,
        star,
        neq,
        eite,
        wc,
        whl,
    )
    .expect("closure tables are well-formed");
    Ok(TableModel { algebra, elements: elems, names })
}
