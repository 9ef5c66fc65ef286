//! Constraint checks over datasets.
//!
//! Violations are data: checks never stop early and always produce a full,
//! deterministically ordered [`Report`].

mod seed;

pub use seed::{minimal_witness, seed_mutants, Mutant};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ontology::{Dataset, Individual, Iri, Ontology, QuantityKind, Restriction, RestrictionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    CardinalityExact,
    CardinalityMin,
    FillerTypeMismatch,
    DanglingReference,
    TemporalOrder,
    ValueRange,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub subject: Iri,
    pub rule: Rule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<Iri>,
    pub expected: String,
    pub found: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let property = self.property.as_ref().map(|p| p.to_string()).unwrap_or_else(|| "-".into());
        write!(
            f,
            "{} {} {} expected={} found={}: {}",
            self.subject, self.rule, property, self.expected, self.found, self.message
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub violations: Vec<Violation>,
    /// Under-counts softened by draft mode.
    pub warnings: Vec<Violation>,
    pub checked_subjects: usize,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// One record per line: violations, then warnings prefixed `warning`.
impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "checked {} subjects: {} violations, {} warnings",
            self.checked_subjects,
            self.violations.len(),
            self.warnings.len()
        )?;
        for v in &self.violations {
            writeln!(f, "violation {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Report cardinality under-counts as warnings so partial records can
    /// be saved. Over-counts stay violations.
    pub draft: bool,
}

impl ValidationOptions {
    pub fn draft() -> Self {
        ValidationOptions { draft: true }
    }
}

fn types_of<'a>(ds: &'a Dataset, iri: &Iri) -> Option<&'a std::collections::BTreeSet<Iri>> {
    ds.get(iri).map(|i| i.types())
}

fn list(iris: &[&Iri]) -> String {
    iris.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

/// Effective restrictions over every asserted type of `ind`, deduplicated.
fn restrictions_of(ind: &Individual, o: &Ontology) -> Vec<Restriction> {
    let mut all: Vec<Restriction> = ind
        .types()
        .iter()
        .filter_map(|t| o.effective_restrictions(t).ok())
        .flatten()
        .collect();
    all.sort();
    all.dedup();
    all
}

/// Violations of `ind` in strict mode.
pub fn validate_individual(ind: &Individual, ds: &Dataset, o: &Ontology) -> Vec<Violation> {
    validate_individual_with(ind, ds, o, ValidationOptions::default()).0
}

/// Returns `(violations, warnings)` for one individual. Dangling references
/// are a dataset-level check and are not reported here.
pub fn validate_individual_with(
    ind: &Individual,
    ds: &Dataset,
    o: &Ontology,
    opts: ValidationOptions,
) -> (Vec<Violation>, Vec<Violation>) {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let subject = ind.iri();
    let restrictions = restrictions_of(ind, o);

    // cardinalities: a target whose types are unknown (dangling) is given
    // the benefit of the doubt and counted
    for r in &restrictions {
        let count = ind
            .targets(&r.on_property)
            .filter(|t| match types_of(ds, t) {
                Some(types) => o.any_subclass_of(types, &r.filler),
                None => true,
            })
            .count() as u32;
        let (rule, under, over) = match r.kind {
            RestrictionKind::Exactly => (Rule::CardinalityExact, count < r.cardinality, count > r.cardinality),
            RestrictionKind::Min => (Rule::CardinalityMin, count < r.cardinality, false),
        };
        if !(under || over) {
            continue;
        }
        let expected = match r.kind {
            RestrictionKind::Exactly => r.cardinality.to_string(),
            RestrictionKind::Min => format!(">={}", r.cardinality),
        };
        let v = Violation {
            subject: subject.clone(),
            rule,
            property: Some(r.on_property.clone()),
            expected,
            found: count.to_string(),
            message: format!("{subject} needs {r}, has {count}"),
        };
        if under && opts.draft {
            warnings.push(v);
        } else {
            violations.push(v);
        }
    }

    // fillers: every known target of a restricted property must satisfy at
    // least one filler declared for that property
    let mut properties: Vec<&Iri> = restrictions.iter().map(|r| &r.on_property).collect();
    properties.dedup();
    for p in properties {
        let fillers: Vec<&Iri> = restrictions.iter().filter(|r| &r.on_property == p).map(|r| &r.filler).collect();
        for t in ind.targets(p) {
            let Some(types) = types_of(ds, t) else { continue };
            if !fillers.iter().any(|f| o.any_subclass_of(types, f)) {
                violations.push(Violation {
                    subject: subject.clone(),
                    rule: Rule::FillerTypeMismatch,
                    property: Some(p.clone()),
                    expected: list(&fillers),
                    found: format!("{t}: {}", list(&types.iter().collect::<Vec<_>>())),
                    message: format!("{t} is not a valid {p} target"),
                });
            }
        }
    }

    // roles: anything playing a user role must also be an iedm:User
    let expo_user = Iri::expo("User");
    let user = Iri::iedm("User");
    if o.any_subclass_of(ind.types(), &expo_user) && !o.any_subclass_of(ind.types(), &user) {
        violations.push(Violation {
            subject: subject.clone(),
            rule: Rule::FillerTypeMismatch,
            property: None,
            expected: user.to_string(),
            found: list(&ind.types().iter().collect::<Vec<_>>()),
            message: format!("{subject} holds a user role but is not an {user}"),
        });
    }

    // exposure times
    if o.any_subclass_of(ind.types(), &Iri::iedm("DUTIrradiation")) {
        let instant = |p: &str| {
            let prop = Iri::iedm(p);
            ind.targets(&prop)
                .filter_map(|t| ds.get(t))
                .flat_map(|t| t.values())
                .filter_map(|l| l.as_time())
                .collect::<Vec<_>>()
        };
        let (starts, ends) = (instant("hasStartTime"), instant("hasEndTime"));
        for s in &starts {
            for e in &ends {
                if e < s {
                    violations.push(Violation {
                        subject: subject.clone(),
                        rule: Rule::TemporalOrder,
                        property: Some(Iri::iedm("hasEndTime")),
                        expected: format!(">= {}", s.lexical()),
                        found: e.lexical(),
                        message: format!("{subject} ends before it starts"),
                    });
                }
            }
        }
    }

    // value ranges
    let non_negative = [QuantityKind::Fluence, QuantityKind::AbsorbedDose, QuantityKind::Activity]
        .iter()
        .flat_map(|k| [k.iri(), k.individual_class()])
        .any(|c| o.any_subclass_of(ind.types(), &c));
    if non_negative {
        for l in ind.values() {
            match l.as_f64() {
                Some(v) if v >= 0.0 && v.is_finite() => {}
                _ => violations.push(Violation {
                    subject: subject.clone(),
                    rule: Rule::ValueRange,
                    property: Some(Ontology::has_value()),
                    expected: ">= 0".into(),
                    found: l.lexical().into(),
                    message: format!("{subject} must carry a finite non-negative value"),
                }),
            }
        }
    }
    let error = Iri::expo("MeasurementError");
    for t in ind.targets(&error) {
        let Some(target) = ds.get(t) else { continue };
        for l in target.values() {
            match l.as_f64() {
                Some(v) if (0.0..=1.0).contains(&v) => {}
                _ => violations.push(Violation {
                    subject: subject.clone(),
                    rule: Rule::ValueRange,
                    property: Some(error.clone()),
                    expected: "[0, 1]".into(),
                    found: format!("{t}: {}", l.lexical()),
                    message: format!("relative error of {subject} outside [0, 1]"),
                }),
            }
        }
    }

    violations.sort();
    warnings.sort();
    (violations, warnings)
}

/// Strict validation of a whole dataset.
pub fn validate_dataset(ds: &Dataset, o: &Ontology) -> Report {
    validate_dataset_with(ds, o, ValidationOptions::default())
}

pub fn validate_dataset_with(ds: &Dataset, o: &Ontology, opts: ValidationOptions) -> Report {
    let mut report = Report::default();
    for ind in ds.individuals() {
        let (v, w) = validate_individual_with(ind, ds, o, opts);
        report.violations.extend(v);
        report.warnings.extend(w);
        for (p, t) in ind.object_assertions() {
            if !ds.contains(t) {
                report.violations.push(Violation {
                    subject: ind.iri().clone(),
                    rule: Rule::DanglingReference,
                    property: Some(p.clone()),
                    expected: "an individual of the dataset".into(),
                    found: t.to_string(),
                    message: format!("{t} is referenced but not defined"),
                });
            }
        }
        report.checked_subjects += 1;
    }
    report.violations.sort();
    report.warnings.sort();
    report
}
