use std::collections::BTreeSet;
use std::fmt;

use crate::ontology::{Iri, Literal, Namespaces, Prefix};

/// A named node: either a registered name or an absolute IRI outside every
/// registered namespace, kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Named(Iri),
    Foreign(String),
}

impl Node {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Node::Named(i) => Some(i),
            Node::Foreign(_) => None,
        }
    }
}

impl From<Iri> for Node {
    fn from(i: Iri) -> Self {
        Node::Named(i)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Named(i) => i.fmt(f),
            Node::Foreign(s) => write!(f, "<{s}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Node(Node),
    Literal(Literal),
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Node(Node::Named(i))
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Node,
    pub predicate: Node,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Node>, predicate: impl Into<Node>, object: impl Into<Term>) -> Triple {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }
}

/// A set of triples together with the namespace table used to write them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    namespaces: Namespaces,
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new(namespaces: Namespaces) -> Graph {
        Graph {
            namespaces,
            triples: BTreeSet::new(),
        }
    }

    pub fn namespaces(&self) -> &Namespaces {
        &self.namespaces
    }

    /// Declared prefixes in token order. Every registered prefix is declared,
    /// so every name a triple can hold has a declaration.
    pub fn prefix_decls(&self) -> Vec<(&'static str, &str)> {
        Prefix::ALL
            .into_iter()
            .map(|p| (p.token(), self.namespaces.expansion(p)))
            .collect()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        self.triples.insert(t)
    }

    pub fn remove(&mut self, t: &Triple) -> bool {
        self.triples.remove(t)
    }

    pub fn triples(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter)
    }
}
