//! Turtle subset I/O and the graph ⇄ dataset mapping.

mod graph;
mod mapping;
mod parser;
mod serializer;

pub use graph::{Graph, Node, Term, Triple};
pub use mapping::{dataset_from_graph, graph_from_dataset, tbox_graph, ImportWarning};
pub use parser::{parse_turtle, parse_turtle_with};
pub use serializer::serialize_turtle;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("undeclared prefix `{prefix}` at {line}:{column}")]
    UnknownPrefix { prefix: String, line: usize, column: usize },
}
