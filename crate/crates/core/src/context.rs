//! A uniform operation interface over concrete partial-map models and
//! abstract table algebras, so laws and derived constructions can run
//! against either.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pfun::{self, PartialMap, TestSet};

/// The operation symbols a context may supply beyond the monoid structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Mult,
    Domain,
    Complement,
    Star,
    Neq,
    Eite,
    Wc,
    While,
    AntiP,
    Bowtie,
    PrefUnion,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Mult => "mult",
            OpKind::Domain => "domain",
            OpKind::Complement => "complement",
            OpKind::Star => "star",
            OpKind::Neq => "neq",
            OpKind::Eite => "eite",
            OpKind::Wc => "wc",
            OpKind::While => "while",
            OpKind::AntiP => "P",
            OpKind::Bowtie => "bowtie",
            OpKind::PrefUnion => "cup",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CtxError {
    #[error("context does not supply the `{}` operation", .0.name())]
    MissingCapability(OpKind),
    #[error("operand is not a test element")]
    NotATest,
    #[error("result of `{}` is not an element of the model", .0.name())]
    NotClosed(OpKind),
}

/// Shared evaluation interface. Elements are addressed by index for
/// enumeration and reporting; operations act on the context's value type.
pub trait EvalContext {
    type Value: Clone + Eq + std::hash::Hash + std::fmt::Debug;

    fn element_count(&self) -> usize;
    fn element(&self, idx: usize) -> Self::Value;
    fn element_index(&self, v: &Self::Value) -> Option<usize>;
    /// Element indices of the test sort, in a fixed order.
    fn test_elements(&self) -> &[usize];
    fn one(&self) -> Self::Value;
    fn zero(&self) -> Self::Value;
    fn supports(&self, op: OpKind) -> bool;

    fn mult(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn domain(&self, a: &Self::Value) -> Result<Self::Value, CtxError>;
    fn complement(&self, a: &Self::Value) -> Result<Self::Value, CtxError>;
    fn star(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, CtxError>;
    fn neq(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, CtxError>;
    fn eite(
        &self,
        s: &Self::Value,
        a: &Self::Value,
        t: &Self::Value,
        u: &Self::Value,
    ) -> Result<Self::Value, CtxError>;
    fn wc(
        &self,
        s: &Self::Value,
        t: &Self::Value,
        u: &Self::Value,
        v: &Self::Value,
    ) -> Result<Self::Value, CtxError>;
    fn whl(
        &self,
        t: &Self::Value,
        a: &Self::Value,
        s: &Self::Value,
    ) -> Result<Self::Value, CtxError>;
    fn anti_p(&self, a: &Self::Value) -> Result<Self::Value, CtxError>;
    fn bowtie(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, CtxError>;
    fn pref_union(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, CtxError>;

    /// Element indices of `{x : D(x) = x}`, the domain elements.
    fn domain_element_indices(&self) -> Result<Vec<usize>, CtxError> {
        let mut out = Vec::new();
        for i in 0..self.element_count() {
            let v = self.element(i);
            if self.domain(&v)? == v {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Natural order `a <= b`, i.e. `a = D(a) b`.
    fn natural_leq(&self, a: &Self::Value, b: &Self::Value) -> Result<bool, CtxError> {
        Ok(self.mult(&self.domain(a)?, b) == *a)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("point set size mismatch: element `{name}` has {len} entries, expected {expected}")]
    SizeMismatch { name: String, len: usize, expected: usize },
    #[error("element `{name}`: {source}")]
    BadElement {
        name: String,
        #[source]
        source: pfun::PfunError,
    },
    #[error("name `{0}` appears both as a map and as a test")]
    DuplicateName(String),
    #[error("name `{0}` is not a valid identifier")]
    BadName(String),
    #[error("test element `{0}` is not a restriction of the identity")]
    TestNotRestriction(String),
    #[error("test index {0} is out of range")]
    TestOutOfRange(usize),
    #[error("model must contain the identity map")]
    MissingIdentity,
    #[error("model must contain the null map")]
    MissingNull,
    #[error(transparent)]
    Pfun(#[from] pfun::PfunError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// On-disk form of a concrete model: named partial maps plus named tests
/// over a shared point set. Map entries are point indices or `null`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub points: usize,
    pub maps: std::collections::BTreeMap<String, Vec<Option<usize>>>,
    pub tests: std::collections::BTreeMap<String, Vec<usize>>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// A concrete model: a finite collection of partial maps on a shared point
/// set, with a designated test sort. Operations are computed directly on
/// maps, so the collection need not be closed to be checked against laws.
#[derive(Debug, Clone)]
pub struct ConcreteModel {
    points: usize,
    elems: Vec<PartialMap>,
    names: Vec<String>,
    tests: Vec<usize>,
    index: HashMap<PartialMap, usize>,
    one: usize,
    zero: usize,
}

impl ConcreteModel {
    /// Builds a model from distinct maps and the indices of its test sort.
    /// The identity and null map must be present.
    pub fn new(
        points: usize,
        elems: Vec<(String, PartialMap)>,
        test_indices: Vec<usize>,
    ) -> Result<Self, ModelError> {
        let mut names = Vec::new();
        let mut maps = Vec::new();
        let mut index = HashMap::new();
        for (name, m) in elems {
            if m.points() != points {
                return Err(ModelError::SizeMismatch { name, len: m.points(), expected: points });
            }
            if index.contains_key(&m) {
                // extensional model: a repeated map is the same element
                continue;
            }
            index.insert(m.clone(), maps.len());
            names.push(name);
            maps.push(m);
        }
        let one = *index.get(&PartialMap::identity(points)).ok_or(ModelError::MissingIdentity)?;
        let zero = *index.get(&PartialMap::null(points)).ok_or(ModelError::MissingNull)?;
        let mut tests = test_indices;
        tests.sort_unstable();
        tests.dedup();
        for &t in &tests {
            if t >= maps.len() {
                return Err(ModelError::TestOutOfRange(t));
            }
            if !maps[t].is_identity_restriction() {
                return Err(ModelError::TestNotRestriction(names[t].clone()));
            }
        }
        Ok(ConcreteModel { points, elems: maps, names, tests, index, one, zero })
    }

    pub fn from_file(file: &ModelFile) -> Result<Self, ModelError> {
        let mut elems = Vec::new();
        for (name, entries) in &file.maps {
            if !valid_name(name) {
                return Err(ModelError::BadName(name.clone()));
            }
            if file.tests.contains_key(name) {
                return Err(ModelError::DuplicateName(name.clone()));
            }
            if entries.len() != file.points {
                return Err(ModelError::SizeMismatch {
                    name: name.clone(),
                    len: entries.len(),
                    expected: file.points,
                });
            }
            let m = PartialMap::from_entries(entries.clone())
                .map_err(|source| ModelError::BadElement { name: name.clone(), source })?;
            elems.push((name.clone(), m));
        }
        let mut test_maps = Vec::new();
        for (name, points) in &file.tests {
            if !valid_name(name) {
                return Err(ModelError::BadName(name.clone()));
            }
            let t = TestSet::from_points(file.points, points)
                .map_err(|source| ModelError::BadElement { name: name.clone(), source })?;
            test_maps.push((name.clone(), t.as_map()));
        }
        elems.extend(test_maps.iter().cloned());
        // locate test indices after dedup
        let model = ConcreteModel::new(file.points, elems, Vec::new())?;
        let tests = test_maps.iter().map(|(_, m)| model.index[m]).collect::<Vec<_>>();
        ConcreteModel::new(
            file.points,
            model.names.iter().cloned().zip(model.elems.iter().cloned()).collect(),
            tests,
        )
    }

    pub fn to_file(&self) -> ModelFile {
        let mut maps = std::collections::BTreeMap::new();
        let mut tests = std::collections::BTreeMap::new();
        for (i, (name, m)) in self.names.iter().zip(&self.elems).enumerate() {
            if self.tests.contains(&i) {
                tests.insert(name.clone(), m.domain_of().member_points());
            } else {
                maps.insert(name.clone(), m.entries().to_vec());
            }
        }
        ModelFile { points: self.points, maps, tests }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn maps(&self) -> &[PartialMap] {
        &self.elems
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name_of(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn lookup_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn lookup_map(&self, m: &PartialMap) -> Option<usize> {
        self.index.get(m).copied()
    }

    fn as_test(&self, v: &PartialMap) -> Result<TestSet, CtxError> {
        TestSet::from_map(v).ok_or(CtxError::NotATest)
    }
}

impl EvalContext for ConcreteModel {
    type Value = PartialMap;

    fn element_count(&self) -> usize {
        self.elems.len()
    }

    fn element(&self, idx: usize) -> PartialMap {
        self.elems[idx].clone()
    }

    fn element_index(&self, v: &PartialMap) -> Option<usize> {
        self.index.get(v).copied()
    }

    fn test_elements(&self) -> &[usize] {
        &self.tests
    }

    fn one(&self) -> PartialMap {
        self.elems[self.one].clone()
    }

    fn zero(&self) -> PartialMap {
        self.elems[self.zero].clone()
    }

    fn supports(&self, _op: OpKind) -> bool {
        true // every operation is computable on partial maps
    }

    fn mult(&self, a: &PartialMap, b: &PartialMap) -> PartialMap {
        a.compose(b)
    }

    fn domain(&self, a: &PartialMap) -> Result<PartialMap, CtxError> {
        Ok(a.domain_of().as_map())
    }

    fn complement(&self, a: &PartialMap) -> Result<PartialMap, CtxError> {
        Ok(self.as_test(a)?.complement().as_map())
    }

    fn star(&self, a: &PartialMap, b: &PartialMap) -> Result<PartialMap, CtxError> {
        Ok(a.agree_star(b).as_map())
    }

    fn neq(&self, a: &PartialMap, b: &PartialMap) -> Result<PartialMap, CtxError> {
        Ok(a.disagree(b).as_map())
    }

    fn eite(
        &self,
        s: &PartialMap,
        a: &PartialMap,
        t: &PartialMap,
        u: &PartialMap,
    ) -> Result<PartialMap, CtxError> {
        Ok(pfun::ext_ite(s, &self.as_test(a)?, t, u))
    }

    fn wc(
        &self,
        s: &PartialMap,
        t: &PartialMap,
        u: &PartialMap,
        v: &PartialMap,
    ) -> Result<PartialMap, CtxError> {
        Ok(pfun::weak_cmp(s, t, u, v))
    }

    fn whl(&self, t: &PartialMap, a: &PartialMap, s: &PartialMap) -> Result<PartialMap, CtxError> {
        Ok(pfun::ext_while(t, &self.as_test(a)?, s))
    }

    fn anti_p(&self, a: &PartialMap) -> Result<PartialMap, CtxError> {
        Ok(a.antidomain().as_map())
    }

    fn bowtie(&self, a: &PartialMap, b: &PartialMap) -> Result<PartialMap, CtxError> {
        Ok(a.bowtie(b).as_map())
    }

    fn pref_union(&self, a: &PartialMap, b: &PartialMap) -> Result<PartialMap, CtxError> {
        Ok(a.pref_union(b))
    }
}

/// The full model on `n` points as a checkable context: every map, with the
/// whole of `I(X)` as the test sort.
pub fn full_model_context(n: usize) -> Result<ConcreteModel, ModelError> {
    let (maps, tests) = pfun::full_model(n)?;
    let elems: Vec<(String, PartialMap)> =
        maps.into_iter().enumerate().map(|(i, m)| (format!("m{i}"), m)).collect();
    let mut model = ConcreteModel::new(n, elems, Vec::new())?;
    let test_indices = tests
        .iter()
        .map(|t| model.lookup_map(&t.as_map()).expect("tests are maps of the full model"))
        .collect();
    model.tests = test_indices;
    model.tests.sort_unstable();
    Ok(model)
}
