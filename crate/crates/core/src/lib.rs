//! Executable model of the IEDM irradiation-experiment ontology.
//!
//! - [`ontology`]: typed T-Box (classes, restrictions, subclass graph) and
//!   A-Box (individuals and assertions) with the built-in class model.
//! - [`rdf`]: Turtle subset parser and deterministic serializer, plus the
//!   mapping between graphs and datasets.
//! - [`validation`]: cardinality, filler, reference, temporal and range checks.
//! - [`materials`]: element/compound tables and interaction-length occupancy.
//! - [`formgen`]: form schemas derived from class restrictions.
//!
//! Numeric code is generic over [`Scalar`]; the aliases at the crate root
//! fix it to `f64`.

pub mod formgen;
pub mod materials;
pub mod ontology;
pub mod rdf;
pub mod validation;

use std::fmt::{Debug, Display};
use std::str::FromStr;

pub use ontology::{load_builtin_ontology, Dataset, Individual, Iri, Literal, Ontology, OntologyError, TimePosition};

/// Floating-point scalar used by quantities and occupancy math.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + Display + Debug + FromStr + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub type QuantityValue = ontology::QuantityValue<f64>;
pub type RadiationFieldSpec = ontology::RadiationFieldSpec<f64>;

pub type ElementProps = materials::ElementProps<f64>;
pub type Material = materials::Material<f64>;
pub type MaterialTable = materials::MaterialTable<f64>;
pub type Layer = materials::Layer<f64>;
pub type LayerStack = materials::LayerStack<f64>;

/// Checked-in example data.
pub mod fixtures {
    /// The FCC-Radmon irradiation experiment as Turtle.
    pub const FCC_RADMON_TTL: &str = include_str!("../fixtures/fcc_radmon.ttl");
}
