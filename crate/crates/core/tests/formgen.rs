use std::collections::BTreeMap;

use iedm_core::formgen::{form_schema, materialize_submission, FieldValue, Submission, Widget};
use iedm_core::ontology::{Namespaces, QuantityKind};
use iedm_core::rdf::{dataset_from_graph, graph_from_dataset, parse_turtle, serialize_turtle};
use iedm_core::validation::validate_dataset;
use iedm_core::{load_builtin_ontology, Dataset, Iri, QuantityValue, TimePosition};

#[test]
fn every_class_has_a_schema() {
    let o = load_builtin_ontology();
    for c in o.classes() {
        let s = form_schema(&c.iri, &o).unwrap();
        let required = o
            .effective_restrictions(&c.iri)
            .unwrap()
            .iter()
            .filter(|r| r.cardinality >= 1)
            .count();
        assert_eq!(s.fields.iter().filter(|f| f.required()).count(), required, "{}", c.iri);
        for f in &s.fields {
            if let Some(max) = f.max_count {
                assert!(f.min_count <= max);
            }
            assert_eq!(f.widget == Widget::Select, !f.options.is_empty());
        }
        assert_eq!(s, form_schema(&c.iri, &o).unwrap());
    }
}

#[test]
fn schema_document_field_names() {
    let o = load_builtin_ontology();
    let json = serde_json::to_value(form_schema(&Iri::iedm("IrradiationExperiment"), &o).unwrap()).unwrap();
    assert_eq!(json["classIri"], "iedm:IrradiationExperiment");
    let f = &json["fields"][0];
    for key in ["propertyIri", "label", "widget", "minCount", "maxCount", "options"] {
        assert!(f.get(key).is_some(), "missing {key}");
    }
    let widgets: Vec<_> = json["fields"].as_array().unwrap().iter().map(|f| f["widget"].clone()).collect();
    assert!(widgets.contains(&serde_json::json!("select")));
    assert!(widgets.contains(&serde_json::json!("number-with-unit")));
}

/// DUT irradiation and its referenced individuals, built through forms.
fn irradiation(ds: &mut Dataset) -> Iri {
    let o = load_builtin_ontology();
    for (class, name) in [("DUT", "PCB5-run2017"), ("Particle", "Proton")] {
        let s = form_schema(&Iri::iedm(class), &o).unwrap();
        materialize_submission(&s, &BTreeMap::new(), &Iri::iedm(name), ds, &o).unwrap();
    }
    let field = form_schema(&Iri::iedm("SingularField"), &o).unwrap();
    let values = BTreeMap::from([(Iri::iedm("hasParticle"), vec![FieldValue::Reference(Iri::iedm("Proton"))])]);
    let out = materialize_submission(&field, &values, &Iri::iedm("Protons_24GeV"), ds, &o).unwrap();
    assert_eq!(out, Submission::Accepted(Iri::iedm("Protons_24GeV")));

    let schema = form_schema(&Iri::iedm("DUTIrradiation"), &o).unwrap();
    let fluence = QuantityValue::in_default_unit(3e17, QuantityKind::Fluence)
        .unwrap()
        .with_relative_error(0.07)
        .unwrap();
    let values = BTreeMap::from([
        (Iri::iedm("hasDUT"), vec![FieldValue::Reference(Iri::iedm("PCB5-run2017"))]),
        (Iri::iedm("hasRadiationField"), vec![FieldValue::Reference(Iri::iedm("Protons_24GeV"))]),
        (Iri::iedm("hasStartTime"), vec![FieldValue::DateTime(TimePosition::parse("2018-03-30T12:00").unwrap())]),
        (Iri::iedm("hasEndTime"), vec![FieldValue::DateTime(TimePosition::parse("2018-11-12T18:00").unwrap())]),
        (Iri::iedm("hasResult"), vec![FieldValue::Quantity(fluence)]),
    ]);
    let subject = Iri::iedm("FCC-RadmonIrradiation");
    assert_eq!(
        materialize_submission(&schema, &values, &subject, ds, &o).unwrap(),
        Submission::Accepted(subject.clone())
    );
    subject
}

#[test]
fn experiment_submission_round_trips() {
    let o = load_builtin_ontology();
    let mut ds = Dataset::new();
    let irr = irradiation(&mut ds);
    assert!(ds.contains(&Iri::iedm("_2018_03_30_12h_00")));

    for (class, name) in [("Operator", "Operator1"), ("ResponsiblePerson", "Responsible1"), ("IrradiationFacility", "CERN_IRRAD")] {
        let s = form_schema(&Iri::iedm(class), &o).unwrap();
        materialize_submission(&s, &BTreeMap::new(), &Iri::iedm(name), &mut ds, &o).unwrap();
    }
    let admin = form_schema(&Iri::iedm("AdminInfoIrradiationExperiment"), &o).unwrap();
    let values = BTreeMap::from([(
        Iri::iedm("hasRole"),
        vec![FieldValue::Reference(Iri::iedm("Operator1")), FieldValue::Reference(Iri::iedm("Responsible1"))],
    )]);
    let out = materialize_submission(&admin, &values, &Iri::iedm("FCC-RadmonAdminInfo"), &mut ds, &o).unwrap();
    assert!(matches!(out, Submission::Accepted(_)), "{out:?}");

    let schema = form_schema(&Iri::iedm("IrradiationExperiment"), &o).unwrap();
    let fluence = QuantityValue::in_default_unit(3e17, QuantityKind::Fluence).unwrap();
    let values = BTreeMap::from([
        (Iri::iedm("hasIrradiationCategory"), vec![FieldValue::Option(Iri::iedm("PassiveStandardIrradiation"))]),
        (Iri::expo("HasPart"), vec![FieldValue::Reference(Iri::iedm("FCC-RadmonAdminInfo"))]),
        (Iri::iedm("hasPart"), vec![FieldValue::Reference(irr)]),
        (Iri::iedm("performedAt"), vec![FieldValue::Reference(Iri::iedm("CERN_IRRAD"))]),
        (Iri::iedm("hasResult"), vec![FieldValue::Quantity(fluence)]),
    ]);
    let out = materialize_submission(&schema, &values, &Iri::iedm("FCC-Radmon"), &mut ds, &o).unwrap();
    assert_eq!(out, Submission::Accepted(Iri::iedm("FCC-Radmon")));
    assert!(validate_dataset(&ds, &o).violations.is_empty());

    let text = serialize_turtle(&graph_from_dataset(&ds, &Namespaces::default()));
    let (back, warnings) = dataset_from_graph(&parse_turtle(&text).unwrap(), &o);
    assert!(warnings.is_empty());
    assert_eq!(back, ds);
    assert!(validate_dataset(&back, &o).violations.is_empty());
}

#[test]
fn wrong_option_and_quantity_kind() {
    let o = load_builtin_ontology();
    let schema = form_schema(&Iri::iedm("IrradiationExperiment"), &o).unwrap();
    let mut ds = Dataset::new();
    let bad_option = BTreeMap::from([(Iri::iedm("hasIrradiationCategory"), vec![FieldValue::Option(Iri::iedm("DUT"))])]);
    assert!(materialize_submission(&schema, &bad_option, &Iri::iedm("x"), &mut ds, &o).is_err());
    let momentum = QuantityValue::in_default_unit(24.0, QuantityKind::RelativisticMomentum).unwrap();
    let bad_kind = BTreeMap::from([(Iri::iedm("hasResult"), vec![FieldValue::Quantity(momentum)])]);
    assert!(materialize_submission(&schema, &bad_kind, &Iri::iedm("x"), &mut ds, &o).is_err());
    assert!(ds.is_empty());
}
