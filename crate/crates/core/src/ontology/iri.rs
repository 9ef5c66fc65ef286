use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::OntologyError;

/// Namespace tokens known to the toolkit.
///
/// Variants are declared in alphabetical token order so that the derived
/// `Ord` on [`Iri`] agrees with ordering by the canonical `prefix:local`
/// string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prefix {
    Expo,
    Foaf,
    Iedm,
    Om,
    Owl,
    Rdf,
    Rdfs,
    Xsd,
}

impl Prefix {
    pub const ALL: [Prefix; 8] = [
        Prefix::Expo,
        Prefix::Foaf,
        Prefix::Iedm,
        Prefix::Om,
        Prefix::Owl,
        Prefix::Rdf,
        Prefix::Rdfs,
        Prefix::Xsd,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Prefix::Expo => "expo",
            Prefix::Foaf => "foaf",
            Prefix::Iedm => "iedm",
            Prefix::Om => "om",
            Prefix::Owl => "owl",
            Prefix::Rdf => "rdf",
            Prefix::Rdfs => "rdfs",
            Prefix::Xsd => "xsd",
        }
    }

    pub fn from_token(token: &str) -> Option<Prefix> {
        Prefix::ALL.into_iter().find(|p| p.token() == token)
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Default namespace expansion for the `iedm` token. Configurable through
/// [`Namespaces::with_iedm_base`].
pub const DEFAULT_IEDM_BASE: &str = "http://example.org/iedm#";

/// Prefix → namespace expansion table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Namespaces {
    iedm_base: String,
}

impl Default for Namespaces {
    fn default() -> Self {
        Namespaces {
            iedm_base: DEFAULT_IEDM_BASE.to_string(),
        }
    }
}

impl Namespaces {
    pub fn with_iedm_base(base: impl Into<String>) -> Self {
        Namespaces {
            iedm_base: base.into(),
        }
    }

    pub fn expansion(&self, prefix: Prefix) -> &str {
        match prefix {
            Prefix::Expo => "http://www.owl-ontologies.com/Expo.owl#",
            Prefix::Foaf => "http://xmlns.com/foaf/0.1/",
            Prefix::Iedm => &self.iedm_base,
            Prefix::Om => "http://www.ontology-of-units-of-measure.org/resource/om-2/",
            Prefix::Owl => "http://www.w3.org/2002/07/owl#",
            Prefix::Rdf => "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
            Prefix::Rdfs => "http://www.w3.org/2000/01/rdf-schema#",
            Prefix::Xsd => "http://www.w3.org/2001/XMLSchema#",
        }
    }

    pub fn expand(&self, iri: &Iri) -> String {
        format!("{}{}", self.expansion(iri.prefix()), iri.local())
    }

    /// Compacts an absolute IRI into a registered [`Iri`], if one of the
    /// namespaces matches and the remainder is a valid local name. The
    /// longest matching namespace wins.
    pub fn compact(&self, absolute: &str) -> Option<Iri> {
        Prefix::ALL
            .into_iter()
            .filter(|p| absolute.starts_with(self.expansion(*p)))
            .max_by_key(|p| self.expansion(*p).len())
            .and_then(|p| Iri::new(p, &absolute[self.expansion(p).len()..]).ok())
    }
}

/// A namespaced name, rendered canonically as `prefix:local`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri {
    prefix: Prefix,
    local: String,
}

pub(crate) fn is_valid_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    // a trailing '.' would be read back as a statement terminator
    !local.ends_with('.')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

impl Iri {
    pub fn new(prefix: Prefix, local: impl Into<String>) -> Result<Iri, OntologyError> {
        let local = local.into();
        if !is_valid_local(&local) {
            return Err(OntologyError::InvalidIri(format!("{prefix}:{local}")));
        }
        Ok(Iri { prefix, local })
    }

    /// Shorthand for names that are known to be valid, e.g. built-in terms.
    ///
    /// Panics on an invalid local name.
    pub fn iedm(local: &str) -> Iri {
        Iri::new(Prefix::Iedm, local).expect("valid iedm local name")
    }

    pub fn expo(local: &str) -> Iri {
        Iri::new(Prefix::Expo, local).expect("valid expo local name")
    }

    pub fn om(local: &str) -> Iri {
        Iri::new(Prefix::Om, local).expect("valid om local name")
    }

    pub fn foaf(local: &str) -> Iri {
        Iri::new(Prefix::Foaf, local).expect("valid foaf local name")
    }

    pub fn owl(local: &str) -> Iri {
        Iri::new(Prefix::Owl, local).expect("valid owl local name")
    }

    pub fn rdf_type() -> Iri {
        Iri::new(Prefix::Rdf, "type").expect("valid")
    }

    pub fn prefix(&self) -> Prefix {
        self.prefix
    }

    pub fn local(&self) -> &str {
        &self.local
    }

    pub fn is_iedm(&self) -> bool {
        self.prefix == Prefix::Iedm
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.local)
    }
}

impl FromStr for Iri {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (prefix, local) = s
            .split_once(':')
            .ok_or_else(|| OntologyError::InvalidIri(s.to_string()))?;
        let prefix = Prefix::from_token(prefix)
            .ok_or_else(|| OntologyError::UnknownPrefix(prefix.to_string()))?;
        Iri::new(prefix, local)
    }
}

impl Serialize for Iri {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Iri {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
