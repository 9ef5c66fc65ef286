//! Form schemas derived from class restrictions, and the reverse step that
//! turns a submitted form into an individual.
//!
//! Widget inference, first match wins:
//!
//! | filler                                         | widget            |
//! |------------------------------------------------|-------------------|
//! | class carries a form hint                      | the hinted widget |
//! | ⊑ `iedm:TimePosition`                          | `datetime`        |
//! | ⊑ `om:Quantity` or `expo:Quantity`             | `number-with-unit`|
//! | 1 to 8 leaf subclasses                         | `select`          |
//! | has restrictions, schema at depth 1            | `subform`         |
//! | anything else                                  | `reference`       |
//!
//! Subforms only appear in top-level schemas; nested schemas fall back to
//! `reference`, including for classes hinted `subform`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{
    Dataset, FormHint, Iri, Literal, Ontology, OntologyError, PropertyKind, QuantityValue, RestrictionKind,
    TimePosition,
};
use crate::validation::{validate_individual, Rule, Violation};

/// Most leaf subclasses a select may list.
pub const SELECT_THRESHOLD: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Widget {
    Text,
    NumberWithUnit,
    Datetime,
    Select,
    Reference,
    Subform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldSpec {
    pub property_iri: Iri,
    pub label: String,
    pub widget: Widget,
    pub min_count: u32,
    pub max_count: Option<u32>,
    /// Selectable classes; empty unless the widget is `select`.
    pub options: Vec<Iri>,
    /// The restriction filler.
    pub target_class: Iri,
}

impl FieldSpec {
    pub fn required(&self) -> bool {
        self.min_count >= 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FormSchema {
    pub class_iri: Iri,
    pub label: String,
    pub fields: Vec<FieldSpec>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error("{property}: a {widget:?} field cannot take {found}")]
    TypeMismatch { property: Iri, widget: Widget, found: String },
    #[error("{0} is not a field of this form")]
    UnknownField(Iri),
}

fn widget_for(o: &Ontology, filler: &Iri, depth: usize) -> Result<(Widget, Vec<Iri>), OntologyError> {
    let nested = |w: Widget| if w == Widget::Subform && depth > 1 { Widget::Reference } else { w };
    let leaves = o.leaf_subclasses(filler)?;
    if let Some(hint) = o.class(o.resolve_class(filler)?).and_then(|c| c.form_hint) {
        let w = match hint {
            FormHint::Text => Widget::Text,
            FormHint::NumberWithUnit => Widget::NumberWithUnit,
            FormHint::Datetime => Widget::Datetime,
            FormHint::Select if !leaves.is_empty() => return Ok((Widget::Select, leaves)),
            FormHint::Select | FormHint::Reference => Widget::Reference,
            FormHint::Subform => nested(Widget::Subform),
        };
        return Ok((w, Vec::new()));
    }
    if o.is_subclass_of(filler, &Iri::iedm("TimePosition"))? {
        return Ok((Widget::Datetime, Vec::new()));
    }
    if o.is_subclass_of(filler, &Iri::om("Quantity"))? || o.is_subclass_of(filler, &Iri::expo("Quantity"))? {
        return Ok((Widget::NumberWithUnit, Vec::new()));
    }
    if (1..=SELECT_THRESHOLD).contains(&leaves.len()) {
        return Ok((Widget::Select, leaves));
    }
    if !o.effective_restrictions(filler)?.is_empty() {
        return Ok((nested(Widget::Subform), Vec::new()));
    }
    Ok((Widget::Reference, Vec::new()))
}

/// Top-level schema for `class`.
pub fn form_schema(class: &Iri, o: &Ontology) -> Result<FormSchema, OntologyError> {
    form_schema_with_depth(class, o, 1)
}

/// Schema at nesting `depth` (1 for a top-level form).
pub fn form_schema_with_depth(class: &Iri, o: &Ontology, depth: usize) -> Result<FormSchema, OntologyError> {
    let class = o.resolve_class(class)?.clone();
    let restrictions = o.effective_restrictions(&class)?;
    let mut per_property: BTreeMap<&Iri, usize> = BTreeMap::new();
    for r in &restrictions {
        *per_property.entry(&r.on_property).or_default() += 1;
    }
    let mut fields = Vec::new();
    for r in &restrictions {
        let prop_label = o
            .property(&r.on_property)
            .map(|p| p.label.clone())
            .unwrap_or_else(|| r.on_property.local().to_string());
        let label = if per_property[&r.on_property] > 1 {
            let filler = o.class(&r.filler).map(|c| c.label.as_str()).unwrap_or(r.filler.local());
            format!("{prop_label} ({filler})")
        } else {
            prop_label
        };
        let (widget, options) = widget_for(o, &r.filler, depth)?;
        fields.push(FieldSpec {
            property_iri: r.on_property.clone(),
            label,
            widget,
            min_count: r.cardinality,
            max_count: match r.kind {
                RestrictionKind::Exactly => Some(r.cardinality),
                RestrictionKind::Min => None,
            },
            options,
            target_class: r.filler.clone(),
        });
    }
    let label = o.class(&class).map(|c| c.label.clone()).unwrap_or_default();
    Ok(FormSchema {
        class_iri: class,
        label,
        fields,
    })
}

/// A submitted value for one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum FieldValue {
    /// An existing individual, for `reference` and `subform` fields.
    Reference(Iri),
    /// A class picked from a `select` field.
    Option(Iri),
    DateTime(TimePosition),
    Quantity(QuantityValue<f64>),
    Text(String),
}

impl FieldValue {
    fn describe(&self) -> String {
        match self {
            FieldValue::Reference(i) => format!("reference {i}"),
            FieldValue::Option(i) => format!("option {i}"),
            FieldValue::DateTime(t) => format!("date-time {}", t.lexical()),
            FieldValue::Quantity(q) => format!("quantity {} {}", q.value(), q.unit()),
            FieldValue::Text(s) => format!("text {s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Submission {
    /// The individual was added to the dataset.
    Accepted(Iri),
    /// Nothing was persisted.
    Rejected(Vec<Violation>),
}

fn helper_name(subject: &Iri, property: &Iri, n: usize) -> Result<Iri, OntologyError> {
    let mut local = format!("{}_{}", subject.local(), property.local());
    if n > 0 {
        local.push_str(&format!("_{}", n + 1));
    }
    Iri::new(subject.prefix(), local)
}

/// Mints `subject` as an instance of the schema class, asserts `values` and
/// validates it. Selected options become fresh individuals of the chosen
/// class named `<subject>_<property>`; quantities likewise. On any
/// violation, `ds` is left untouched.
pub fn materialize_submission(
    schema: &FormSchema,
    values: &BTreeMap<Iri, Vec<FieldValue>>,
    subject: &Iri,
    ds: &mut Dataset,
    o: &Ontology,
) -> Result<Submission, FormError> {
    let mut work = ds.clone();
    work.mint_individual(o, &schema.class_iri, subject.clone())?;
    for (property, vals) in values {
        let fields: Vec<&FieldSpec> = schema.fields.iter().filter(|f| &f.property_iri == property).collect();
        if fields.is_empty() {
            return Err(FormError::UnknownField(property.clone()));
        }
        let widget = fields[0].widget;
        let mismatch = |v: &FieldValue| FormError::TypeMismatch {
            property: property.clone(),
            widget,
            found: v.describe(),
        };
        for (n, v) in vals.iter().enumerate() {
            let accepts = |w: Widget| fields.iter().any(|f| f.widget == w);
            match v {
                FieldValue::Reference(target) if accepts(Widget::Reference) || accepts(Widget::Subform) => {
                    work.assert_statement(o, subject, property, target.clone())?;
                }
                FieldValue::Option(class) if fields.iter().any(|f| f.options.contains(class)) => {
                    let iri = helper_name(subject, property, n)?;
                    work.ensure_individual(o, class, iri.clone())?;
                    work.assert_statement(o, subject, property, iri)?;
                }
                FieldValue::DateTime(t) if accepts(Widget::Datetime) => {
                    let iri = Iri::new(subject.prefix(), t.local_name())?;
                    work.ensure_individual(o, &Iri::iedm("TimePosition"), iri.clone())?
                        .assert_statement(&Ontology::has_value(), Literal::date_time(*t), o)?;
                    work.assert_statement(o, subject, property, iri)?;
                }
                FieldValue::Quantity(q) if accepts(Widget::NumberWithUnit) => {
                    q.check()?;
                    let class = q.kind().individual_class();
                    if !fields.iter().any(|f| o.is_subclass_of(&class, &f.target_class).unwrap_or(false)) {
                        return Err(mismatch(v));
                    }
                    let iri = helper_name(subject, property, n)?;
                    q.assert_into(&mut work, o, &iri)?;
                    work.assert_statement(o, subject, property, iri)?;
                }
                FieldValue::Text(s)
                    if accepts(Widget::Text) && o.property(property).is_some_and(|p| p.kind == PropertyKind::Data) =>
                {
                    work.assert_statement(o, subject, property, Literal::string(s.clone()))?;
                }
                _ => return Err(mismatch(v)),
            }
        }
    }

    let ind = work.get(subject).expect("minted above");
    let mut violations = validate_individual(ind, &work, o);
    for (p, t) in ind.object_assertions() {
        if !work.contains(t) {
            violations.push(Violation {
                subject: subject.clone(),
                rule: Rule::DanglingReference,
                property: Some(p.clone()),
                expected: "an individual of the dataset".into(),
                found: t.to_string(),
                message: format!("{t} is referenced but not defined"),
            });
        }
    }
    if violations.is_empty() {
        *ds = work;
        Ok(Submission::Accepted(subject.clone()))
    } else {
        violations.sort();
        Ok(Submission::Rejected(violations))
    }
}
