//! Typed T-Box and A-Box.

mod builtin;
mod dataset;
mod field;
mod iri;
mod literal;
mod quantity;
mod tbox;

pub use builtin::load_builtin_ontology;
pub use dataset::{Dataset, Individual, Value};
pub use field::RadiationFieldSpec;
pub use iri::{Iri, Namespaces, Prefix, DEFAULT_IEDM_BASE};
pub use literal::{Datatype, Literal, TimePosition};
pub use quantity::{error_local_name, units, QuantityKind, QuantityValue};
pub use tbox::{ClassDef, FormHint, Ontology, PropertyDef, PropertyKind, Restriction, RestrictionKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OntologyError {
    #[error("invalid name `{0}`")]
    InvalidIri(String),
    #[error("unregistered prefix `{0}`")]
    UnknownPrefix(String),
    #[error("`{lexical}` is not a valid {datatype:?} literal")]
    InvalidLiteral { lexical: String, datatype: Datatype },
    #[error("`{0}` is not a valid time position")]
    InvalidTime(String),
    #[error("quantity out of range: {0}")]
    QuantityOutOfRange(String),
    #[error("invalid radiation field: {0}")]
    InvalidField(String),
    #[error("unknown class {0}")]
    UnknownClass(Iri),
    #[error("unknown property {0}")]
    UnknownProperty(Iri),
    #[error("unknown individual {0}")]
    UnknownIndividual(Iri),
    #[error("{0} already exists")]
    AlreadyExists(Iri),
    #[error("{0} belongs to an imported namespace and cannot be modified")]
    ForeignNamespace(Iri),
    #[error("making {sup} a superclass of {sub} would create a cycle")]
    CyclicHierarchy { sub: Iri, sup: Iri },
    #[error("{0} is an object property; literal given")]
    LiteralOnObjectProperty(Iri),
    #[error("{0} is a data property; individual given")]
    ObjectOnDataProperty(Iri),
    #[error("invalid restriction: {0}")]
    InvalidRestriction(String),
}
