use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Iri, OntologyError, Prefix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RestrictionKind {
    Exactly,
    Min,
}

impl fmt::Display for RestrictionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RestrictionKind::Exactly => "exactly",
            RestrictionKind::Min => "min",
        })
    }
}

/// A qualified cardinality restriction used as a superclass expression.
///
/// Field order gives the derived ordering: property, then kind, then
/// filler and cardinality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Restriction {
    pub on_property: Iri,
    pub kind: RestrictionKind,
    pub filler: Iri,
    pub cardinality: u32,
}

impl Restriction {
    pub fn exactly(on_property: Iri, cardinality: u32, filler: Iri) -> Result<Restriction, OntologyError> {
        if cardinality == 0 {
            return Err(OntologyError::InvalidRestriction(format!(
                "{on_property} exactly 0 {filler}: exact restrictions need a positive cardinality"
            )));
        }
        Ok(Restriction {
            on_property,
            kind: RestrictionKind::Exactly,
            filler,
            cardinality,
        })
    }

    pub fn min(on_property: Iri, cardinality: u32, filler: Iri) -> Restriction {
        Restriction {
            on_property,
            kind: RestrictionKind::Min,
            filler,
            cardinality,
        }
    }

    /// The existential (`some`) form, stored as `min 1`.
    pub fn some(on_property: Iri, filler: Iri) -> Restriction {
        Restriction::min(on_property, 1, filler)
    }

    pub fn max_count(&self) -> Option<u32> {
        match self.kind {
            RestrictionKind::Exactly => Some(self.cardinality),
            RestrictionKind::Min => None,
        }
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.on_property, self.kind, self.cardinality, self.filler)
    }
}

/// Widget hint annotation consumed by form generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormHint {
    Text,
    NumberWithUnit,
    Datetime,
    Select,
    Reference,
    Subform,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDef {
    pub iri: Iri,
    pub superclasses: BTreeSet<Iri>,
    pub restrictions: Vec<Restriction>,
    pub label: String,
    pub comment: String,
    /// Marks a class mirrored from an upstream ontology as an anchor.
    pub mirror: bool,
    pub form_hint: Option<FormHint>,
    /// Auditable remarks, e.g. why a restriction is exact or existential.
    pub notes: Vec<String>,
}

impl ClassDef {
    pub fn new(iri: Iri, label: impl Into<String>) -> ClassDef {
        ClassDef {
            iri,
            superclasses: BTreeSet::new(),
            restrictions: Vec::new(),
            label: label.into(),
            comment: String::new(),
            mirror: false,
            form_hint: None,
            notes: Vec::new(),
        }
    }

    pub fn sub_of(mut self, sup: Iri) -> Self {
        self.superclasses.insert(sup);
        self
    }

    pub fn restricted(mut self, r: Restriction) -> Self {
        self.restrictions.push(r);
        self
    }

    pub fn comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = comment.into();
        self
    }

    pub fn hint(mut self, hint: FormHint) -> Self {
        self.form_hint = Some(hint);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn mirror(mut self) -> Self {
        self.mirror = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyKind {
    Object,
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDef {
    pub iri: Iri,
    pub kind: PropertyKind,
    pub label: String,
    pub comment: String,
    pub mirror: bool,
}

impl PropertyDef {
    pub fn object(iri: Iri, label: impl Into<String>) -> PropertyDef {
        PropertyDef {
            iri,
            kind: PropertyKind::Object,
            label: label.into(),
            comment: String::new(),
            mirror: false,
        }
    }

    pub fn comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = comment.into();
        self
    }
}

/// Classes, properties and the subclass graph.
#[derive(Debug, Clone, Default)]
pub struct Ontology {
    classes: BTreeMap<Iri, ClassDef>,
    properties: BTreeMap<Iri, PropertyDef>,
    class_aliases: BTreeMap<Iri, Iri>,
    foreign_frozen: bool,
}

impl Ontology {
    /// An empty, unfrozen ontology. Most callers want
    /// [`crate::load_builtin_ontology`].
    pub fn empty() -> Ontology {
        Ontology::default()
    }

    /// The single data property.
    pub fn has_value() -> Iri {
        Iri::iedm("hasValue")
    }

    fn check_mutable(&self, class: &Iri) -> Result<(), OntologyError> {
        if self.foreign_frozen && !class.is_iedm() {
            return Err(OntologyError::ForeignNamespace(class.clone()));
        }
        Ok(())
    }

    fn check_restriction(&self, r: &Restriction) -> Result<(), OntologyError> {
        match self.properties.get(&r.on_property) {
            Some(p) if p.kind == PropertyKind::Object => {}
            Some(_) => return Err(OntologyError::InvalidRestriction(format!("{r}: not an object property"))),
            None => return Err(OntologyError::UnknownProperty(r.on_property.clone())),
        }
        if r.kind == RestrictionKind::Exactly && r.cardinality == 0 {
            return Err(OntologyError::InvalidRestriction(format!("{r}: exact cardinality must be positive")));
        }
        self.resolve_class(&r.filler)?;
        Ok(())
    }

    pub fn define_property(&mut self, def: PropertyDef) -> Result<(), OntologyError> {
        if self.foreign_frozen && !def.iri.is_iedm() {
            return Err(OntologyError::ForeignNamespace(def.iri));
        }
        if self.properties.contains_key(&def.iri) {
            return Err(OntologyError::AlreadyExists(def.iri));
        }
        self.properties.insert(def.iri.clone(), def);
        Ok(())
    }

    pub(crate) fn define_data_property(&mut self, iri: Iri, label: &str) {
        self.properties.insert(
            iri.clone(),
            PropertyDef {
                iri,
                kind: PropertyKind::Data,
                label: label.to_string(),
                comment: String::new(),
                mirror: false,
            },
        );
    }

    /// Adds a class. Superclasses and fillers must already be known, which
    /// keeps the graph acyclic by construction.
    pub fn define_class(&mut self, def: ClassDef) -> Result<(), OntologyError> {
        self.check_mutable(&def.iri)?;
        if self.classes.contains_key(&def.iri) || self.class_aliases.contains_key(&def.iri) {
            return Err(OntologyError::AlreadyExists(def.iri));
        }
        if def.iri.is_iedm() && def.superclasses.is_empty() {
            return Err(OntologyError::InvalidRestriction(format!(
                "{} needs at least one superclass",
                def.iri
            )));
        }
        for sup in &def.superclasses {
            if !self.classes.contains_key(sup) {
                return Err(OntologyError::UnknownClass(sup.clone()));
            }
        }
        for r in &def.restrictions {
            if r.filler != def.iri {
                self.check_restriction(r)?;
            }
        }
        self.classes.insert(def.iri.clone(), def);
        Ok(())
    }

    pub fn add_superclass(&mut self, class: &Iri, sup: &Iri) -> Result<(), OntologyError> {
        let class = self.resolve_class(class)?.clone();
        let sup = self.resolve_class(sup)?.clone();
        self.check_mutable(&class)?;
        if self.is_subclass_of(&sup, &class)? {
            return Err(OntologyError::CyclicHierarchy { sub: class, sup });
        }
        self.classes.get_mut(&class).expect("resolved").superclasses.insert(sup);
        Ok(())
    }

    pub fn add_restriction(&mut self, class: &Iri, r: Restriction) -> Result<(), OntologyError> {
        let class = self.resolve_class(class)?.clone();
        self.check_mutable(&class)?;
        self.check_restriction(&r)?;
        let def = self.classes.get_mut(&class).expect("resolved");
        if !def.restrictions.contains(&r) {
            def.restrictions.push(r);
        }
        Ok(())
    }

    pub fn add_class_alias(&mut self, alias: Iri, canonical: &Iri) -> Result<(), OntologyError> {
        let canonical = self.resolve_class(canonical)?.clone();
        if self.classes.contains_key(&alias) {
            return Err(OntologyError::AlreadyExists(alias));
        }
        self.class_aliases.insert(alias, canonical);
        Ok(())
    }

    /// Freezes every class and property outside the `iedm` namespace.
    pub fn freeze_foreign(&mut self) {
        self.foreign_frozen = true;
    }

    /// Canonical class name for `iri`, following read aliases.
    pub fn resolve_class<'a>(&'a self, iri: &'a Iri) -> Result<&'a Iri, OntologyError> {
        if let Some((k, _)) = self.classes.get_key_value(iri) {
            return Ok(k);
        }
        self.class_aliases
            .get(iri)
            .ok_or_else(|| OntologyError::UnknownClass(iri.clone()))
    }

    pub fn class(&self, iri: &Iri) -> Option<&ClassDef> {
        self.resolve_class(iri).ok().and_then(|c| self.classes.get(c))
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDef> {
        self.classes.values()
    }

    pub fn class_aliases(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.class_aliases.iter()
    }

    pub fn property(&self, iri: &Iri) -> Option<&PropertyDef> {
        self.properties.get(iri)
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties.values()
    }

    /// Reflexive-transitive ancestors of `class`.
    pub fn ancestors(&self, class: &Iri) -> Result<BTreeSet<Iri>, OntologyError> {
        let start = self.resolve_class(class)?;
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(c) = queue.pop_front() {
            if seen.insert(c.clone()) {
                if let Some(def) = self.classes.get(&c) {
                    queue.extend(def.superclasses.iter().cloned());
                }
            }
        }
        Ok(seen)
    }

    pub fn is_subclass_of(&self, sub: &Iri, sup: &Iri) -> Result<bool, OntologyError> {
        let sup = self.resolve_class(sup)?;
        Ok(self.ancestors(sub)?.contains(sup))
    }

    /// True when any of `types` is subsumed by `sup`. Unknown types never match.
    pub fn any_subclass_of<'a>(&self, types: impl IntoIterator<Item = &'a Iri>, sup: &Iri) -> bool {
        types
            .into_iter()
            .any(|t| self.is_subclass_of(t, sup).unwrap_or(false))
    }

    pub fn direct_subclasses(&self, class: &Iri) -> Vec<&Iri> {
        self.classes
            .values()
            .filter(|d| d.superclasses.contains(class))
            .map(|d| &d.iri)
            .collect()
    }

    /// Proper descendants of `class` that have no subclasses of their own,
    /// in canonical order.
    pub fn leaf_subclasses(&self, class: &Iri) -> Result<Vec<Iri>, OntologyError> {
        let class = self.resolve_class(class)?;
        Ok(self
            .classes
            .keys()
            .filter(|c| *c != class)
            .filter(|c| self.is_subclass_of(c, class).unwrap_or(false))
            .filter(|c| self.direct_subclasses(c).is_empty())
            .cloned()
            .collect())
    }

    /// Own and inherited restrictions, deduplicated, ordered by property
    /// then kind.
    pub fn effective_restrictions(&self, class: &Iri) -> Result<Vec<Restriction>, OntologyError> {
        let all: BTreeSet<Restriction> = self
            .ancestors(class)?
            .iter()
            .filter_map(|c| self.classes.get(c))
            .flat_map(|d| d.restrictions.iter().cloned())
            .collect();
        Ok(all.into_iter().collect())
    }

    /// Classes with no superclass.
    pub fn roots(&self) -> Vec<&Iri> {
        self.classes
            .values()
            .filter(|d| d.superclasses.is_empty())
            .map(|d| &d.iri)
            .collect()
    }

    /// Checks that the subclass graph has no cycle.
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm over child → parent edges
        let mut indegree: BTreeMap<&Iri, usize> = self.classes.keys().map(|k| (k, 0)).collect();
        for def in self.classes.values() {
            for sup in &def.superclasses {
                if let Some(d) = indegree.get_mut(sup) {
                    *d += 1;
                }
            }
        }
        let mut queue: VecDeque<&Iri> = indegree.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
        let mut visited = 0;
        while let Some(c) = queue.pop_front() {
            visited += 1;
            for sup in &self.classes[c].superclasses {
                if let Some(d) = indegree.get_mut(sup) {
                    *d -= 1;
                    if *d == 0 {
                        queue.push_back(sup);
                    }
                }
            }
        }
        visited == self.classes.len()
    }

    pub fn namespaces_in_use(&self) -> BTreeSet<Prefix> {
        self.classes.keys().chain(self.properties.keys()).map(|i| i.prefix()).collect()
    }
}
