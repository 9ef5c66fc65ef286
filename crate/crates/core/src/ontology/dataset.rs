use std::collections::{BTreeMap, BTreeSet};

use super::{Iri, Literal, Ontology, OntologyError, PropertyKind};

/// Object of an assertion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Iri(Iri),
    Literal(Literal),
}

impl From<Iri> for Value {
    fn from(i: Iri) -> Self {
        Value::Iri(i)
    }
}

impl From<Literal> for Value {
    fn from(l: Literal) -> Self {
        Value::Literal(l)
    }
}

/// A named A-Box individual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Individual {
    iri: Iri,
    types: BTreeSet<Iri>,
    object_assertions: BTreeSet<(Iri, Iri)>,
    data_assertions: BTreeSet<(Iri, Literal)>,
}

impl Individual {
    pub fn iri(&self) -> &Iri {
        &self.iri
    }

    pub fn types(&self) -> &BTreeSet<Iri> {
        &self.types
    }

    pub fn object_assertions(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.object_assertions.iter().map(|(p, t)| (p, t))
    }

    pub fn data_assertions(&self) -> impl Iterator<Item = (&Iri, &Literal)> {
        self.data_assertions.iter().map(|(p, l)| (p, l))
    }

    /// Targets of `property`, in canonical order.
    pub fn targets<'a>(&'a self, property: &'a Iri) -> impl Iterator<Item = &'a Iri> + 'a {
        self.object_assertions
            .iter()
            .filter(move |(p, _)| p == property)
            .map(|(_, t)| t)
    }

    pub fn values(&self) -> impl Iterator<Item = &Literal> {
        self.data_assertions.iter().map(|(_, l)| l)
    }

    /// Adds a type after checking it against the ontology. Aliases are
    /// stored under their canonical name.
    pub fn add_type(&mut self, class: &Iri, o: &Ontology) -> Result<(), OntologyError> {
        let class = o.resolve_class(class)?.clone();
        self.types.insert(class);
        Ok(())
    }

    /// Appends an assertion; a repeated (property, value) pair is a no-op.
    pub fn assert_statement(&mut self, prop: &Iri, value: impl Into<Value>, o: &Ontology) -> Result<(), OntologyError> {
        let def = o.property(prop).ok_or_else(|| OntologyError::UnknownProperty(prop.clone()))?;
        match (def.kind, value.into()) {
            (PropertyKind::Object, Value::Iri(target)) => {
                self.object_assertions.insert((prop.clone(), target));
            }
            (PropertyKind::Object, Value::Literal(_)) => {
                return Err(OntologyError::LiteralOnObjectProperty(prop.clone()));
            }
            (PropertyKind::Data, Value::Literal(lit)) => {
                self.data_assertions.insert((prop.clone(), lit));
            }
            (PropertyKind::Data, Value::Iri(_)) => {
                return Err(OntologyError::ObjectOnDataProperty(prop.clone()));
            }
        }
        Ok(())
    }

    pub fn retract(&mut self, prop: &Iri, target: &Iri) -> bool {
        self.object_assertions.remove(&(prop.clone(), target.clone()))
    }
}

/// A set of individuals keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    individuals: BTreeMap<Iri, Individual>,
}

impl Dataset {
    pub fn new() -> Dataset {
        Dataset::default()
    }

    /// Creates an individual typed `class`.
    pub fn mint_individual(&mut self, o: &Ontology, class: &Iri, iri: Iri) -> Result<&mut Individual, OntologyError> {
        let class = o.resolve_class(class)?.clone();
        if self.individuals.contains_key(&iri) {
            return Err(OntologyError::AlreadyExists(iri));
        }
        let ind = Individual {
            iri: iri.clone(),
            types: BTreeSet::from([class]),
            object_assertions: BTreeSet::new(),
            data_assertions: BTreeSet::new(),
        };
        Ok(self.individuals.entry(iri).or_insert(ind))
    }

    /// Returns the existing individual, or mints one typed `class`. An
    /// existing individual gains `class` as an additional type.
    pub fn ensure_individual(&mut self, o: &Ontology, class: &Iri, iri: Iri) -> Result<&mut Individual, OntologyError> {
        if self.individuals.contains_key(&iri) {
            let ind = self.individuals.get_mut(&iri).expect("present");
            ind.add_type(class, o)?;
            Ok(ind)
        } else {
            self.mint_individual(o, class, iri)
        }
    }

    pub fn assert_statement(
        &mut self,
        o: &Ontology,
        subject: &Iri,
        prop: &Iri,
        value: impl Into<Value>,
    ) -> Result<(), OntologyError> {
        let ind = self
            .individuals
            .get_mut(subject)
            .ok_or_else(|| OntologyError::UnknownIndividual(subject.clone()))?;
        ind.assert_statement(prop, value, o)
    }

    pub fn get(&self, iri: &Iri) -> Option<&Individual> {
        self.individuals.get(iri)
    }

    pub fn get_mut(&mut self, iri: &Iri) -> Option<&mut Individual> {
        self.individuals.get_mut(iri)
    }

    pub fn contains(&self, iri: &Iri) -> bool {
        self.individuals.contains_key(iri)
    }

    pub fn remove(&mut self, iri: &Iri) -> Option<Individual> {
        self.individuals.remove(iri)
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual> {
        self.individuals.values()
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Merges `other` into `self`; shared individuals union their types and
    /// assertions.
    pub fn merge(&mut self, other: Dataset) {
        for (iri, ind) in other.individuals {
            match self.individuals.get_mut(&iri) {
                Some(existing) => {
                    existing.types.extend(ind.types);
                    existing.object_assertions.extend(ind.object_assertions);
                    existing.data_assertions.extend(ind.data_assertions);
                }
                None => {
                    self.individuals.insert(iri, ind);
                }
            }
        }
    }

    /// Data properties used anywhere in the dataset.
    pub fn data_properties(&self) -> BTreeSet<&Iri> {
        self.individuals
            .values()
            .flat_map(|i| i.data_assertions.iter().map(|(p, _)| p))
            .collect()
    }
}
