use std::collections::BTreeMap;
use std::fmt;

use super::{Graph, Node, Term, Triple};
use crate::ontology::{Dataset, Iri, Literal, Namespaces, Ontology, OntologyError, PropertyKind, Value};

/// A triple that could not be mapped onto the dataset as-is.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ImportWarning {
    UnknownClass { subject: Iri, class: Iri },
    UnknownProperty { subject: Iri, property: Iri },
    /// The subject carries no known type; it was typed `owl:Thing`.
    Untyped { subject: Iri },
    LiteralOnObjectProperty { subject: Iri, property: Iri },
    ObjectOnDataProperty { subject: Iri, property: Iri },
    /// A term outside every registered namespace.
    ForeignTerm { triple: String },
}

impl fmt::Display for ImportWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImportWarning::UnknownClass { subject, class } => write!(f, "UnknownClass: {subject} typed {class}"),
            ImportWarning::UnknownProperty { subject, property } => {
                write!(f, "UnknownProperty: {subject} uses {property}")
            }
            ImportWarning::Untyped { subject } => write!(f, "Untyped: {subject} has no known type, using owl:Thing"),
            ImportWarning::LiteralOnObjectProperty { subject, property } => {
                write!(f, "LiteralOnObjectProperty: {subject} {property}")
            }
            ImportWarning::ObjectOnDataProperty { subject, property } => {
                write!(f, "ObjectOnDataProperty: {subject} {property}")
            }
            ImportWarning::ForeignTerm { triple } => write!(f, "ForeignTerm: {triple}"),
        }
    }
}

fn describe(t: &Triple) -> String {
    let object = match &t.object {
        Term::Node(n) => n.to_string(),
        Term::Literal(l) => l.to_string(),
    };
    format!("{} {} {}", t.subject, t.predicate, object)
}

/// Maps a graph onto ontology individuals. Nothing is dropped silently:
/// every triple that cannot be represented yields a warning.
pub fn dataset_from_graph(g: &Graph, o: &Ontology) -> (Dataset, Vec<ImportWarning>) {
    let mut ds = Dataset::new();
    let mut warnings = Vec::new();
    let rdf_type = Node::Named(Iri::rdf_type());

    let mut by_subject: BTreeMap<&Iri, Vec<&Triple>> = BTreeMap::new();
    for t in g.triples() {
        match &t.subject {
            Node::Named(s) => by_subject.entry(s).or_default().push(t),
            Node::Foreign(_) => warnings.push(ImportWarning::ForeignTerm { triple: describe(t) }),
        }
    }

    for (subject, triples) in by_subject {
        let mut types = Vec::new();
        let mut rest = Vec::new();
        for t in triples {
            if t.predicate == rdf_type {
                match &t.object {
                    Term::Node(Node::Named(c)) => match o.resolve_class(c) {
                        Ok(c) => types.push(c.clone()),
                        Err(_) => warnings.push(ImportWarning::UnknownClass {
                            subject: subject.clone(),
                            class: c.clone(),
                        }),
                    },
                    _ => warnings.push(ImportWarning::ForeignTerm { triple: describe(t) }),
                }
            } else {
                rest.push(t);
            }
        }
        if types.is_empty() {
            warnings.push(ImportWarning::Untyped {
                subject: subject.clone(),
            });
            types.push(Iri::owl("Thing"));
        }
        let ind = match ds.mint_individual(o, &types[0], subject.clone()) {
            Ok(ind) => ind,
            Err(_) => unreachable!("subjects are grouped, types resolved"),
        };
        for ty in &types[1..] {
            ind.add_type(ty, o).expect("resolved type");
        }

        for t in rest {
            let property = match &t.predicate {
                Node::Named(p) => p,
                Node::Foreign(_) => {
                    warnings.push(ImportWarning::ForeignTerm { triple: describe(t) });
                    continue;
                }
            };
            let value = match &t.object {
                Term::Node(Node::Named(i)) => Value::Iri(i.clone()),
                Term::Literal(l) => Value::Literal(l.clone()),
                Term::Node(Node::Foreign(_)) => {
                    warnings.push(ImportWarning::ForeignTerm { triple: describe(t) });
                    continue;
                }
            };
            match ind.assert_statement(property, value, o) {
                Ok(()) => {}
                Err(OntologyError::UnknownProperty(_)) => warnings.push(ImportWarning::UnknownProperty {
                    subject: subject.clone(),
                    property: property.clone(),
                }),
                Err(OntologyError::LiteralOnObjectProperty(_)) => {
                    warnings.push(ImportWarning::LiteralOnObjectProperty {
                        subject: subject.clone(),
                        property: property.clone(),
                    })
                }
                Err(OntologyError::ObjectOnDataProperty(_)) => warnings.push(ImportWarning::ObjectOnDataProperty {
                    subject: subject.clone(),
                    property: property.clone(),
                }),
                Err(e) => unreachable!("assert_statement only fails on property shape: {e}"),
            }
        }
    }
    warnings.sort();
    (ds, warnings)
}

/// Flattens a dataset into triples.
pub fn graph_from_dataset(ds: &Dataset, namespaces: &Namespaces) -> Graph {
    let mut g = Graph::new(namespaces.clone());
    for ind in ds.individuals() {
        let s = ind.iri();
        for ty in ind.types() {
            g.insert(Triple::new(s.clone(), Iri::rdf_type(), ty.clone()));
        }
        for (p, target) in ind.object_assertions() {
            g.insert(Triple::new(s.clone(), p.clone(), target.clone()));
        }
        for (p, lit) in ind.data_assertions() {
            g.insert(Triple::new(s.clone(), p.clone(), lit.clone()));
        }
    }
    g
}

/// Dumps the T-Box for inspection. Restrictions are written as named
/// `owl:Restriction` nodes (`iedm:_restriction_<Class>_<n>`) since the
/// supported Turtle subset has no blank nodes.
pub fn tbox_graph(o: &Ontology, namespaces: &Namespaces) -> Graph {
    let mut g = Graph::new(namespaces.clone());
    let label = Iri::new(crate::ontology::Prefix::Rdfs, "label").expect("valid");
    let comment = Iri::new(crate::ontology::Prefix::Rdfs, "comment").expect("valid");
    let sub_class_of = Iri::new(crate::ontology::Prefix::Rdfs, "subClassOf").expect("valid");
    let owl = |l: &str| Iri::owl(l);

    for p in o.properties() {
        let kind = match p.kind {
            PropertyKind::Object => owl("ObjectProperty"),
            PropertyKind::Data => owl("DatatypeProperty"),
        };
        g.insert(Triple::new(p.iri.clone(), Iri::rdf_type(), kind));
        g.insert(Triple::new(p.iri.clone(), label.clone(), Literal::string(&p.label)));
        if !p.comment.is_empty() {
            g.insert(Triple::new(p.iri.clone(), comment.clone(), Literal::string(&p.comment)));
        }
    }
    for c in o.classes() {
        g.insert(Triple::new(c.iri.clone(), Iri::rdf_type(), owl("Class")));
        g.insert(Triple::new(c.iri.clone(), label.clone(), Literal::string(&c.label)));
        let mut text = c.comment.clone();
        for note in &c.notes {
            if !text.is_empty() {
                text.push_str("; ");
            }
            text.push_str(note);
        }
        if !text.is_empty() {
            g.insert(Triple::new(c.iri.clone(), comment.clone(), Literal::string(text)));
        }
        for sup in &c.superclasses {
            g.insert(Triple::new(c.iri.clone(), sub_class_of.clone(), sup.clone()));
        }
        for (i, r) in c.restrictions.iter().enumerate() {
            let node = Iri::iedm(&format!("_restriction_{}_{}", c.iri.local(), i));
            let card = match r.kind {
                crate::ontology::RestrictionKind::Exactly => owl("qualifiedCardinality"),
                crate::ontology::RestrictionKind::Min => owl("minQualifiedCardinality"),
            };
            g.insert(Triple::new(c.iri.clone(), sub_class_of.clone(), node.clone()));
            g.insert(Triple::new(node.clone(), Iri::rdf_type(), owl("Restriction")));
            g.insert(Triple::new(node.clone(), owl("onProperty"), r.on_property.clone()));
            g.insert(Triple::new(node.clone(), owl("onClass"), r.filler.clone()));
            let n = Literal::new(r.cardinality.to_string(), crate::ontology::Datatype::Decimal).expect("integer");
            g.insert(Triple::new(node, card, n));
        }
    }
    for (alias, canonical) in o.class_aliases() {
        g.insert(Triple::new(alias.clone(), owl("equivalentClass"), canonical.clone()));
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::load_builtin_ontology;
    use crate::rdf::{parse_turtle, serialize_turtle};

    const PREFIXES: &str = "@prefix iedm: <http://example.org/iedm#> .\n";

    #[test]
    fn typed_individual() {
        let o = load_builtin_ontology();
        let g = parse_turtle(&format!("{PREFIXES}iedm:PCB5-run2017 a iedm:DUT .")).unwrap();
        let (ds, warnings) = dataset_from_graph(&g, &o);
        assert!(warnings.is_empty());
        assert_eq!(ds.len(), 1);
        assert!(ds.get(&Iri::iedm("PCB5-run2017")).unwrap().types().contains(&Iri::iedm("DUT")));
    }

    #[test]
    fn empty_graph() {
        let o = load_builtin_ontology();
        let (ds, warnings) = dataset_from_graph(&Graph::default(), &o);
        assert!(ds.is_empty() && warnings.is_empty());
        assert!(graph_from_dataset(&ds, &Namespaces::default()).is_empty());
    }

    #[test]
    fn unknown_class_is_reported() {
        let o = load_builtin_ontology();
        let g = parse_turtle(&format!("{PREFIXES}iedm:x a iedm:Bogus .")).unwrap();
        let (ds, warnings) = dataset_from_graph(&g, &o);
        assert!(ds.contains(&Iri::iedm("x")));
        let unknown: Vec<_> = warnings.iter().filter(|w| matches!(w, ImportWarning::UnknownClass { .. })).collect();
        assert_eq!(unknown.len(), 1);
    }

    #[test]
    fn shape_errors_are_reported() {
        let o = load_builtin_ontology();
        let text = format!(
            "{PREFIXES}iedm:x a iedm:DUT ; iedm:hasDUT 5 ; iedm:hasValue iedm:y ; iedm:colour iedm:red ; <http://z/p> iedm:y .\n<http://z/s> a iedm:DUT ."
        );
        let (_, warnings) = dataset_from_graph(&parse_turtle(&text).unwrap(), &o);
        assert_eq!(warnings.len(), 5, "{warnings:?}");
    }

    #[test]
    fn alias_types_read_as_canonical() {
        let o = load_builtin_ontology();
        let g = parse_turtle(&format!("{PREFIXES}iedm:r a iedm:DUTirradiationExperiment .")).unwrap();
        let (ds, _) = dataset_from_graph(&g, &o);
        assert!(ds.get(&Iri::iedm("r")).unwrap().types().contains(&Iri::iedm("DUTIrradiation")));
    }

    #[test]
    fn tbox_dump_parses_back() {
        let o = load_builtin_ontology();
        let g = tbox_graph(&o, &Namespaces::default());
        let text = serialize_turtle(&g);
        assert_eq!(parse_turtle(&text).unwrap().triples(), g.triples());
        assert!(text.contains("iedm:User a owl:Class ;"));
    }
}
