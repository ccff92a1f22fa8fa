//! The signature term language: an ASCII grammar over the full signature,
//! a recursive-descent parser, sort checking, evaluation over any
//! [`EvalContext`], and rewriting of derived operations to a chosen basis.
//!
//! Grammar (whitespace-insensitive, `;` is left-associative composition
//! read left to right):
//!
//! ```text
//! term := atom | term ";" term
//! atom := "0" | "1" | ident
//!       | "D(" term ")" | "star(" term "," term ")" | "neq(" term "," term ")"
//!       | "ite(" term "," term "," term "," term ")"
//!       | "wc(" term "," term "," term "," term ")"
//!       | "while(" term "," term "," term ")"
//!       | "not(" term ")" | "P(" term ")"
//!       | "bowtie(" term "," term ")" | "cup(" term "," term ")"
//!       | "(" term ")"
//! ```

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::context::{CtxError, EvalContext, OpKind};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Var(String),
    Compose(Box<Term>, Box<Term>),
    Domain(Box<Term>),
    Star(Box<Term>, Box<Term>),
    Neq(Box<Term>, Box<Term>),
    /// `(s, a)[t, u]` with `a` test-sorted.
    Eite(Box<Term>, Box<Term>, Box<Term>, Box<Term>),
    /// `(s = t)[u, v]`.
    Wc(Box<Term>, Box<Term>, Box<Term>, Box<Term>),
    /// `((t, a) : s)` with `a` test-sorted.
    While(Box<Term>, Box<Term>, Box<Term>),
    Complement(Box<Term>),
    AntiP(Box<Term>),
    Bowtie(Box<Term>, Box<Term>),
    PrefUnion(Box<Term>, Box<Term>),
}

/// Variable sorts. Test variables range over the test sort, domain-element
/// variables over `{x : D(x) = x}`, plain variables over every element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSort {
    Elem,
    Test,
    DomElem,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {at}: {what}")]
    Syntax { at: usize, what: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SortError {
    #[error("test-sorted position holds non-test term `{0}`")]
    NonTestPosition(String),
    #[error("variable `{0}` has no declared sort")]
    UndeclaredVar(String),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error(transparent)]
    Ctx(#[from] CtxError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpandError {
    #[error("operation `{}` is not derivable from the chosen basis", .0.name())]
    Underivable(OpKind),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn seq(a: Term, b: Term) -> Term {
        Term::Compose(Box::new(a), Box::new(b))
    }

    pub fn d(a: Term) -> Term {
        Term::Domain(Box::new(a))
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    fn walk(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Zero | Term::One | Term::Var(_) => {}
            Term::Domain(a) | Term::Complement(a) | Term::AntiP(a) => a.walk(f),
            Term::Compose(a, b)
            | Term::Star(a, b)
            | Term::Neq(a, b)
            | Term::Bowtie(a, b)
            | Term::PrefUnion(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Term::While(a, b, c) => {
                a.walk(f);
                b.walk(f);
                c.walk(f);
            }
            Term::Eite(a, b, c, d) | Term::Wc(a, b, c, d) => {
                a.walk(f);
                b.walk(f);
                c.walk(f);
                d.walk(f);
            }
        }
    }

    /// Every operation symbol the term mentions.
    pub fn ops(&self) -> Vec<OpKind> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            let op = match t {
                Term::Compose(..) => Some(OpKind::Mult),
                Term::Domain(_) => Some(OpKind::Domain),
                Term::Star(..) => Some(OpKind::Star),
                Term::Neq(..) => Some(OpKind::Neq),
                Term::Eite(..) => Some(OpKind::Eite),
                Term::Wc(..) => Some(OpKind::Wc),
                Term::While(..) => Some(OpKind::While),
                Term::Complement(_) => Some(OpKind::Complement),
                Term::AntiP(_) => Some(OpKind::AntiP),
                Term::Bowtie(..) => Some(OpKind::Bowtie),
                Term::PrefUnion(..) => Some(OpKind::PrefUnion),
                _ => None,
            };
            if let Some(op) = op {
                if !out.contains(&op) {
                    out.push(op);
                }
            }
        });
        out
    }

    /// Whether the term is statically of test sort: built from `0`, `1`,
    /// test variables, complement and composition.
    pub fn is_test_sorted(&self, sorts: &BTreeMap<String, VarSort>) -> Result<bool, SortError> {
        Ok(match self {
            Term::Zero | Term::One => true,
            Term::Var(v) => {
                *sorts.get(v).ok_or_else(|| SortError::UndeclaredVar(v.clone()))? == VarSort::Test
            }
            Term::Complement(a) => a.is_test_sorted(sorts)?,
            Term::Compose(a, b) => a.is_test_sorted(sorts)? && b.is_test_sorted(sorts)?,
            _ => false,
        })
    }

    /// Rejects terms placing a non-test subterm in a test-sorted position.
    pub fn sort_check(&self, sorts: &BTreeMap<String, VarSort>) -> Result<(), SortError> {
        let test_position = |t: &Term| -> Result<(), SortError> {
            if t.is_test_sorted(sorts)? {
                Ok(())
            } else {
                Err(SortError::NonTestPosition(t.to_string()))
            }
        };
        match self {
            Term::Zero | Term::One => Ok(()),
            Term::Var(v) => {
                sorts.get(v).map(|_| ()).ok_or_else(|| SortError::UndeclaredVar(v.clone()))
            }
            Term::Domain(a) | Term::AntiP(a) => a.sort_check(sorts),
            Term::Complement(a) => {
                test_position(a)?;
                a.sort_check(sorts)
            }
            Term::Compose(a, b)
            | Term::Star(a, b)
            | Term::Neq(a, b)
            | Term::Bowtie(a, b)
            | Term::PrefUnion(a, b) => {
                a.sort_check(sorts)?;
                b.sort_check(sorts)
            }
            Term::Eite(s, a, t, u) => {
                test_position(a)?;
                s.sort_check(sorts)?;
                a.sort_check(sorts)?;
                t.sort_check(sorts)?;
                u.sort_check(sorts)
            }
            Term::Wc(s, t, u, v) => {
                s.sort_check(sorts)?;
                t.sort_check(sorts)?;
                u.sort_check(sorts)?;
                v.sort_check(sorts)
            }
            Term::While(t, a, s) => {
                test_position(a)?;
                t.sort_check(sorts)?;
                a.sort_check(sorts)?;
                s.sort_check(sorts)
            }
        }
    }

    /// Structural evaluation under an assignment of values to variables.
    pub fn eval<C: EvalContext>(
        &self,
        ctx: &C,
        asg: &BTreeMap<String, C::Value>,
    ) -> Result<C::Value, EvalError> {
        Ok(match self {
            Term::Zero => ctx.zero(),
            Term::One => ctx.one(),
            Term::Var(v) => asg.get(v).cloned().ok_or_else(|| EvalError::Unbound(v.clone()))?,
            Term::Compose(a, b) => ctx.mult(&a.eval(ctx, asg)?, &b.eval(ctx, asg)?),
            Term::Domain(a) => ctx.domain(&a.eval(ctx, asg)?)?,
            Term::Star(a, b) => ctx.star(&a.eval(ctx, asg)?, &b.eval(ctx, asg)?)?,
            Term::Neq(a, b) => ctx.neq(&a.eval(ctx, asg)?, &b.eval(ctx, asg)?)?,
            Term::Eite(s, a, t, u) => ctx.eite(
                &s.eval(ctx, asg)?,
                &a.eval(ctx, asg)?,
                &t.eval(ctx, asg)?,
                &u.eval(ctx, asg)?,
            )?,
            Term::Wc(s, t, u, v) => ctx.wc(
                &s.eval(ctx, asg)?,
                &t.eval(ctx, asg)?,
                &u.eval(ctx, asg)?,
                &v.eval(ctx, asg)?,
            )?,
            Term::While(t, a, s) => {
                ctx.whl(&t.eval(ctx, asg)?, &a.eval(ctx, asg)?, &s.eval(ctx, asg)?)?
            }
            Term::Complement(a) => ctx.complement(&a.eval(ctx, asg)?)?,
            Term::AntiP(a) => ctx.anti_p(&a.eval(ctx, asg)?)?,
            Term::Bowtie(a, b) => ctx.bowtie(&a.eval(ctx, asg)?, &b.eval(ctx, asg)?)?,
            Term::PrefUnion(a, b) => ctx.pref_union(&a.eval(ctx, asg)?, &b.eval(ctx, asg)?)?,
        })
    }
}

/// A basis of available operation symbols for [`expand_derived`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basis {
    ops: u16,
}

impl Basis {
    pub fn of(ops: &[OpKind]) -> Basis {
        let mut bits = 0u16;
        for &op in ops {
            bits |= 1 << op as u16;
        }
        Basis { ops: bits }
    }

    pub fn has(&self, op: OpKind) -> bool {
        self.ops & 1 << op as u16 != 0
    }

    /// Composition, complement and weak comparison only; everything else
    /// is rewritten away.
    pub fn wc_only() -> Basis {
        Basis::of(&[OpKind::Mult, OpKind::Complement, OpKind::Wc])
    }
}

/// Rewrites a term into the basis signature using the derived definitions:
/// `D(s) = (s,1)[1,1] = (s=s)[1,0] = star(s,s)`, `star(s,t) = (s=t)[1,0]`,
/// `neq(s,t) = (s=t)[0,1]`, `(s,a)[t,u] = D(sa)t ⊔ D(sa')u` and
/// `(s=t)[u,v] = star(s,t)u ⊔ neq(s,t)v`. Evaluation of the original and
/// the expansion agree on all assignments.
pub fn expand_derived(term: &Term, basis: Basis) -> Result<Term, ExpandError> {
    let go = |t: &Term| expand_derived(t, basis);
    let bx = |t: Term| Box::new(t);
    Ok(match term {
        Term::Zero | Term::One | Term::Var(_) => term.clone(),
        Term::Compose(a, b) => {
            if !basis.has(OpKind::Mult) {
                return Err(ExpandError::Underivable(OpKind::Mult));
            }
            Term::Compose(bx(go(a)?), bx(go(b)?))
        }
        Term::Domain(a) => {
            let a = go(a)?;
            if basis.has(OpKind::Domain) {
                Term::Domain(bx(a))
            } else if basis.has(OpKind::Eite) {
                Term::Eite(bx(a), bx(Term::One), bx(Term::One), bx(Term::One))
            } else if basis.has(OpKind::Wc) {
                Term::Wc(bx(a.clone()), bx(a), bx(Term::One), bx(Term::Zero))
            } else if basis.has(OpKind::Star) {
                Term::Star(bx(a.clone()), bx(a))
            } else {
                return Err(ExpandError::Underivable(OpKind::Domain));
            }
        }
        Term::Star(a, b) => {
            let (a, b) = (go(a)?, go(b)?);
            if basis.has(OpKind::Star) {
                Term::Star(bx(a), bx(b))
            } else if basis.has(OpKind::Wc) {
                Term::Wc(bx(a), bx(b), bx(Term::One), bx(Term::Zero))
            } else {
                return Err(ExpandError::Underivable(OpKind::Star));
            }
        }
        Term::Neq(a, b) => {
            let (a, b) = (go(a)?, go(b)?);
            if basis.has(OpKind::Neq) {
                Term::Neq(bx(a), bx(b))
            } else if basis.has(OpKind::Wc) {
                Term::Wc(bx(a), bx(b), bx(Term::Zero), bx(Term::One))
            } else {
                return Err(ExpandError::Underivable(OpKind::Neq));
            }
        }
        Term::Eite(s, a, t, u) => {
            if basis.has(OpKind::Eite) {
                Term::Eite(bx(go(s)?), bx(go(a)?), bx(go(t)?), bx(go(u)?))
            } else if basis.has(OpKind::PrefUnion) {
                // (s,a)[t,u] = D(sa)t ⊔ D(sa')u
                let left =
                    Term::seq(Term::d(Term::seq((**s).clone(), (**a).clone())), (**t).clone());
                let right = Term::seq(
                    Term::d(Term::seq((**s).clone(), Term::Complement(a.clone()))),
                    (**u).clone(),
                );
                go(&Term::PrefUnion(bx(left), bx(right)))?
            } else {
                return Err(ExpandError::Underivable(OpKind::Eite));
            }
        }
        Term::Wc(s, t, u, v) => {
            if basis.has(OpKind::Wc) {
                Term::Wc(bx(go(s)?), bx(go(t)?), bx(go(u)?), bx(go(v)?))
            } else if basis.has(OpKind::PrefUnion) {
                // (s=t)[u,v] = (s*t)u ⊔ (s≠t)v
                let left = Term::seq(Term::Star(s.clone(), t.clone()), (**u).clone());
                let right = Term::seq(Term::Neq(s.clone(), t.clone()), (**v).clone());
                go(&Term::PrefUnion(bx(left), bx(right)))?
            } else {
                return Err(ExpandError::Underivable(OpKind::Wc));
            }
        }
        Term::While(t, a, s) => {
            if basis.has(OpKind::While) {
                Term::While(bx(go(t)?), bx(go(a)?), bx(go(s)?))
            } else {
                return Err(ExpandError::Underivable(OpKind::While));
            }
        }
        Term::Complement(a) => {
            if basis.has(OpKind::Complement) {
                Term::Complement(bx(go(a)?))
            } else {
                return Err(ExpandError::Underivable(OpKind::Complement));
            }
        }
        Term::AntiP(a) => {
            if basis.has(OpKind::AntiP) {
                Term::AntiP(bx(go(a)?))
            } else {
                return Err(ExpandError::Underivable(OpKind::AntiP));
            }
        }
        Term::Bowtie(a, b) => {
            if basis.has(OpKind::Bowtie) {
                Term::Bowtie(bx(go(a)?), bx(go(b)?))
            } else {
                return Err(ExpandError::Underivable(OpKind::Bowtie));
            }
        }
        Term::PrefUnion(a, b) => {
            if basis.has(OpKind::PrefUnion) {
                Term::PrefUnion(bx(go(a)?), bx(go(b)?))
            } else {
                return Err(ExpandError::Underivable(OpKind::PrefUnion));
            }
        }
    })
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Compose(a, b) => {
                write!(f, "{a};")?;
                if matches!(**b, Term::Compose(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Term::Domain(a) => write!(f, "D({a})"),
            Term::Star(a, b) => write!(f, "star({a},{b})"),
            Term::Neq(a, b) => write!(f, "neq({a},{b})"),
            Term::Eite(s, a, t, u) => write!(f, "ite({s},{a},{t},{u})"),
            Term::Wc(s, t, u, v) => write!(f, "wc({s},{t},{u},{v})"),
            Term::While(t, a, s) => write!(f, "while({t},{a},{s})"),
            Term::Complement(a) => write!(f, "not({a})"),
            Term::AntiP(a) => write!(f, "P({a})"),
            Term::Bowtie(a, b) => write!(f, "bowtie({a},{b})"),
            Term::PrefUnion(a, b) => write!(f, "cup({a},{b})"),
        }
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

pub fn parse(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { text: text.as_bytes(), pos: 0 };
    let term = p.term()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(term)
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> ParseError {
        ParseError::Syntax { at: self.pos, what: what.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(b';') {
            self.pos += 1;
            let rhs = self.atom()?;
            acc = Term::seq(acc, rhs);
        }
        Ok(acc)
    }

    fn args(&mut self, n: usize) -> Result<Vec<Term>, ParseError> {
        self.expect(b'(')?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect(b',')?;
            }
            out.push(self.term()?);
        }
        self.expect(b')')?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(Term::Zero)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Term::One)
            }
            Some(b'(') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(b')')?;
                Ok(t)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .text
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_' || *c == b'\'')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.text[start..self.pos]).unwrap().to_string();
                // keywords act as operators only when applied
                if self.text.get(self.pos) == Some(&b'(') {
                    let bx = |t: Term| Box::new(t);
                    match name.as_str() {
                        "D" => {
                            let mut a = self.args(1)?;
                            return Ok(Term::Domain(bx(a.pop().unwrap())));
                        }
                        "star" => {
                            let mut a = self.args(2)?;
                            let b = a.pop().unwrap();
                            return Ok(Term::Star(bx(a.pop().unwrap()), bx(b)));
                        }
                        "neq" => {
                            let mut a = self.args(2)?;
                            let b = a.pop().unwrap();
                            return Ok(Term::Neq(bx(a.pop().unwrap()), bx(b)));
                        }
                        "ite" => {
                            let mut a = self.args(4)?;
                            let (u, t, al) = (a.pop().unwrap(), a.pop().unwrap(), a.pop().unwrap());
                            return Ok(Term::Eite(bx(a.pop().unwrap()), bx(al), bx(t), bx(u)));
                        }
                        "wc" => {
                            let mut a = self.args(4)?;
                            let (v, u, t) = (a.pop().unwrap(), a.pop().unwrap(), a.pop().unwrap());
                            return Ok(Term::Wc(bx(a.pop().unwrap()), bx(t), bx(u), bx(v)));
                        }
                        "while" => {
                            let mut a = self.args(3)?;
                            let (s, al) = (a.pop().unwrap(), a.pop().unwrap());
                            return Ok(Term::While(bx(a.pop().unwrap()), bx(al), bx(s)));
                        }
                        "not" => {
                            let mut a = self.args(1)?;
                            return Ok(Term::Complement(bx(a.pop().unwrap())));
                        }
                        "P" => {
                            let mut a = self.args(1)?;
                            return Ok(Term::AntiP(bx(a.pop().unwrap())));
                        }
                        "bowtie" => {
                            let mut a = self.args(2)?;
                            let b = a.pop().unwrap();
                            return Ok(Term::Bowtie(bx(a.pop().unwrap()), bx(b)));
                        }
                        "cup" => {
                            let mut a = self.args(2)?;
                            let b = a.pop().unwrap();
                            return Ok(Term::PrefUnion(bx(a.pop().unwrap()), bx(b)));
                        }
                        _ => return Err(self.err(&format!("unknown operator `{name}`"))),
                    }
                }
                Ok(Term::Var(name))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}
