use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Graph, Node, Term};
use crate::ontology::{Datatype, Iri, Literal};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn literal(l: &Literal) -> String {
    match l.datatype() {
        Datatype::String => format!("\"{}\"", escape(l.lexical())),
        dt => format!("\"{}\"^^{}", escape(l.lexical()), dt.iri()),
    }
}

fn term(t: &Term) -> String {
    match t {
        Term::Node(n) => n.to_string(),
        Term::Literal(l) => literal(l),
    }
}

/// Writes `g` as Turtle. The output depends only on the triple set and the
/// namespace table: prefixes sorted by token, subjects in canonical order,
/// `rdf:type` first then predicates sorted, objects sorted.
pub fn serialize_turtle(g: &Graph) -> String {
    let mut out = String::new();
    for (token, ns) in g.prefix_decls() {
        let _ = writeln!(out, "@prefix {token}: <{ns}> .");
    }

    let rdf_type = Node::Named(Iri::rdf_type());
    let mut subjects: BTreeMap<&Node, BTreeMap<(bool, &Node), Vec<&Term>>> = BTreeMap::new();
    for t in g.triples() {
        // `false` sorts first, which places rdf:type ahead of other predicates
        let key = (t.predicate != rdf_type, &t.predicate);
        subjects.entry(&t.subject).or_default().entry(key).or_default().push(&t.object);
    }

    for (subject, predicates) in subjects {
        let _ = write!(out, "\n{subject}");
        let count = predicates.len();
        for (i, ((_, predicate), objects)) in predicates.into_iter().enumerate() {
            let verb = if *predicate == rdf_type {
                "a".to_string()
            } else {
                predicate.to_string()
            };
            let objects: Vec<String> = objects.into_iter().map(term).collect();
            let sep = if i == 0 { " " } else { "    " };
            let end = if i + 1 == count { " ." } else { " ;" };
            let _ = writeln!(out, "{sep}{verb} {}{end}", objects.join(", "));
        }
    }
    out
}
