use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Ind(String),
}

impl Term {
    pub fn var(v: impl Into<String>) -> Self {
        Term::Var(v.into())
    }

    pub fn ind(a: impl Into<String>) -> Self {
        Term::Ind(a.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Concept(String, Term),
    Role(String, Term, Term),
}

impl Atom {
    pub fn concept(name: impl Into<String>, t: Term) -> Self {
        Atom::Concept(name.into(), t)
    }

    pub fn role(name: impl Into<String>, s: Term, o: Term) -> Self {
        Atom::Role(name.into(), s, o)
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Concept(_, t) => vec![t],
            Atom::Role(_, s, o) => vec![s, o],
        }
    }

    fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Atom {
        match self {
            Atom::Concept(n, t) => Atom::Concept(n.clone(), f(t)),
            Atom::Role(n, s, o) => Atom::Role(n.clone(), f(s), f(o)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("answer variable `{0}` does not occur in any atom")]
    UndeclaredAnswerVariable(String),
    #[error("a query needs at least one atom")]
    Empty,
    #[error("expected {expected} answer values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// A conjunctive query. Variables not listed in `answer_vars` are existential;
/// with no answer variables it is Boolean (a BCQ).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub answer_vars: Vec<String>,
    pub atoms: Vec<Atom>,
}

impl Query {
    pub fn new(answer_vars: Vec<String>, atoms: Vec<Atom>) -> Result<Self, QueryError> {
        let q = Query { answer_vars, atoms };
        q.check()?;
        Ok(q)
    }

    /// A Boolean query.
    pub fn boolean(atoms: Vec<Atom>) -> Result<Self, QueryError> {
        Self::new(Vec::new(), atoms)
    }

    pub fn check(&self) -> Result<(), QueryError> {
        if self.atoms.is_empty() {
            return Err(QueryError::Empty);
        }
        let vars = self.variables();
        for v in &self.answer_vars {
            if !vars.contains(v) {
                return Err(QueryError::UndeclaredAnswerVariable(v.clone()));
            }
        }
        Ok(())
    }

    pub fn is_boolean(&self) -> bool {
        self.answer_vars.is_empty()
    }

    pub fn is_instance_query(&self) -> bool {
        self.is_boolean() && self.atoms.len() == 1
    }

    /// All variables, in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for atom in &self.atoms {
            for t in atom.terms() {
                if let Term::Var(v) = t {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
        out
    }

    pub fn existential_vars(&self) -> Vec<String> {
        self.variables().into_iter().filter(|v| !self.answer_vars.contains(v)).collect()
    }

    pub fn individuals(&self) -> BTreeSet<String> {
        self.atoms
            .iter()
            .flat_map(|a| a.terms())
            .filter_map(|t| match t {
                Term::Ind(a) => Some(a.clone()),
                Term::Var(_) => None,
            })
            .collect()
    }

    pub fn concept_names(&self) -> BTreeSet<String> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Concept(n, _) => Some(n.clone()),
                Atom::Role(..) => None,
            })
            .collect()
    }

    pub fn role_names(&self) -> BTreeSet<String> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Role(n, ..) => Some(n.clone()),
                Atom::Concept(..) => None,
            })
            .collect()
    }

    /// q[ā]: replace the answer variables by individuals, giving a BCQ.
    pub fn instantiate(&self, tuple: &[String]) -> Result<Query, QueryError> {
        if tuple.len() != self.answer_vars.len() {
            return Err(QueryError::ArityMismatch { expected: self.answer_vars.len(), got: tuple.len() });
        }
        let subst = |t: &Term| match t {
            Term::Var(v) => match self.answer_vars.iter().position(|x| x == v) {
                Some(i) => Term::Ind(tuple[i].clone()),
                None => t.clone(),
            },
            Term::Ind(_) => t.clone(),
        };
        Ok(Query { answer_vars: Vec::new(), atoms: self.atoms.iter().map(|a| a.map_terms(&subst)).collect() })
    }

    /// Replace variables according to `f` (variables mapped to `None` are kept).
    pub fn ground(&self, f: impl Fn(&str) -> Option<String>) -> Query {
        let subst = |t: &Term| match t {
            Term::Var(v) => f(v).map(Term::Ind).unwrap_or_else(|| t.clone()),
            Term::Ind(_) => t.clone(),
        };
        Query {
            answer_vars: self.answer_vars.iter().filter(|v| f(v).is_none()).cloned().collect(),
            atoms: self.atoms.iter().map(|a| a.map_terms(&subst)).collect(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Ind(a) => f.write_str(a),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Concept(n, t) => write!(f, "{n}({t})"),
            Atom::Role(n, s, o) => write!(f, "{n}({s}, {o})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answer_variable_must_occur() {
        let err = Query::new(vec!["x".into()], vec![Atom::concept("A", Term::ind("a"))]).unwrap_err();
        assert_eq!(err, QueryError::UndeclaredAnswerVariable("x".into()));
        assert_eq!(Query::boolean(vec![]).unwrap_err(), QueryError::Empty);
    }

    #[test]
    fn classification() {
        let iq = Query::boolean(vec![Atom::concept("NoVisa", Term::ind("p"))]).unwrap();
        assert!(iq.is_boolean() && iq.is_instance_query());
        let cq = Query::new(
            vec!["x".into()],
            vec![Atom::role("hasNat", Term::var("x"), Term::var("y")), Atom::concept("Visa", Term::var("y"))],
        )
        .unwrap();
        assert!(!cq.is_boolean());
        assert_eq!(cq.existential_vars(), vec!["y"]);
        let inst = cq.instantiate(&["p".into()]).unwrap();
        assert!(inst.is_boolean());
        assert_eq!(inst.atoms[0], Atom::role("hasNat", Term::ind("p"), Term::var("y")));
    }
}
