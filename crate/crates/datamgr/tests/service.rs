use std::sync::Arc;
use std::thread;

use chrono::{Duration, TimeZone, Utc};
use iedm_core::ontology::{Namespaces, QuantityKind};
use iedm_core::validation::Rule;
use iedm_core::{Iri, QuantityValue};
use iedm_datamgr::model::*;
use iedm_datamgr::{demo, ManualClock, Service, ServiceError};
use tempfile::TempDir;

const ALICE: &str = "blarina.glatse@cern.ch";
const BOB: &str = "georgi.gorine@cern.ch";
const EVE: &str = "someone.else@cern.ch";

fn setup() -> (TempDir, Arc<ManualClock>, Service) {
    let dir = TempDir::new().unwrap();
    let clock = Arc::new(ManualClock::new(Utc.with_ymd_and_hms(2018, 3, 1, 9, 0, 0).unwrap()));
    let svc = Service::open_with_clock(dir.path(), Namespaces::default(), clock.clone()).unwrap();
    (dir, clock, svc)
}

fn experiment(svc: &Service, visible: bool) -> ExperimentRecord {
    let mut req = demo::fcc_radmon();
    req.visible = visible;
    svc.create_experiment(req, ALICE).unwrap()
}

fn new_sample(exp: &str, name: &str) -> NewSample {
    NewSample {
        name: name.into(),
        category_note: demo::CATEGORY_NOTE.into(),
        requested_fluence: demo::requested_fluence(),
        experiment_id: exp.into(),
        occupancy: None,
        layers: None,
    }
}

fn fluence(v: f64) -> QuantityValue {
    QuantityValue::in_default_unit(v, QuantityKind::Fluence).unwrap()
}

#[test]
fn first_sample_gets_first_id() {
    let (_d, _c, svc) = setup();
    let exp = experiment(&svc, true);
    let s = svc.create_sample(new_sample(&exp.id, "PCB5-run2017"), ALICE).unwrap();
    assert_eq!(s.id, "SET-000001");
    assert_eq!(s.name, "PCB5-run2017");
    assert_eq!(s.requested_fluence.value(), 3e17);
    assert_eq!(s.version, 1);
    assert_eq!(s.last_updated_by, ALICE);
}

#[test]
fn bad_samples_are_rejected() {
    let (_d, _c, svc) = setup();
    let exp = experiment(&svc, true);
    let mut neg = new_sample(&exp.id, "x");
    // bypasses the constructor check, as a JSON body would
    neg.requested_fluence = serde_json::from_value(serde_json::json!({
        "value": -1.0, "kind": "Fluence", "unit": "om:reciprocalSquareCentimetre"
    }))
    .unwrap();
    assert!(matches!(svc.create_sample(neg, ALICE), Err(ServiceError::Validation(_))));
    assert!(matches!(
        svc.create_sample(new_sample("EXP-999999", "x"), ALICE),
        Err(ServiceError::UnknownExperiment(_))
    ));
    assert!(matches!(svc.create_sample(new_sample(&exp.id, "x"), EVE), Err(ServiceError::Forbidden(_))));
    let mut layered = new_sample(&exp.id, "x");
    layered.layers = Some(vec![LayerSpec { material: "unobtainium".into(), thickness_cm: 1.0 }]);
    assert!(matches!(svc.create_sample(layered, ALICE), Err(ServiceError::Validation(_))));
}

#[test]
fn occupancy_from_layers() {
    let (_d, _c, svc) = setup();
    let exp = experiment(&svc, true);
    let mut req = new_sample(&exp.id, "stack");
    req.layers = Some(vec![LayerSpec { material: "Si".into(), thickness_cm: 0.0300 }]);
    let s = svc.create_sample(req, ALICE).unwrap();
    let occ = s.occupancy.unwrap();
    // 0.03 cm * 2.329 g/cm3 / 21.82 g/cm2
    let expected = 100.0 * 0.03 * 2.329 / 21.82;
    assert!((occ.radiation - expected).abs() / expected < 1e-9);
    assert_eq!(s.occupancy_report, occ.report());
}

#[test]
fn updates_bump_version_and_reject_stale() {
    let (_d, clock, svc) = setup();
    let exp = experiment(&svc, true);
    let s = svc.create_sample(new_sample(&exp.id, "PCB5-run2017"), ALICE).unwrap();
    clock.advance(Duration::hours(1));
    let patch = SamplePatch { category_note: Some("cold box".into()), ..Default::default() };
    let s2 = svc.update_sample(&s.id, patch.clone(), BOB, 1).unwrap();
    assert_eq!(s2.version, 2);
    assert_eq!(s2.last_updated_by, BOB);
    assert!(s2.last_update > s.last_update);

    let stale = svc.update_sample(&s.id, SamplePatch { name: Some("other".into()), ..Default::default() }, ALICE, 1);
    assert!(matches!(stale, Err(ServiceError::VersionConflict { expected: 1, actual: 2, .. })));
    assert_eq!(svc.get_sample(&s.id, ALICE).unwrap(), s2);

    assert!(matches!(svc.update_sample("SET-424242", patch, BOB, 1), Err(ServiceError::NotFound(_))));

    let listed = svc.list_samples(&SampleQuery::default(), ALICE).unwrap();
    assert_eq!(listed.items[0].last_updated_by, "georgi.gorine@cern.ch");
}

#[test]
fn last_update_never_decreases() {
    let (_d, clock, svc) = setup();
    let exp = experiment(&svc, true);
    let s = svc.create_sample(new_sample(&exp.id, "a"), ALICE).unwrap();
    clock.advance(Duration::days(-3));
    let s2 = svc.update_sample(&s.id, SamplePatch::default(), ALICE, 1).unwrap();
    assert_eq!(s2.last_update, s.last_update);
    assert_eq!(s2.version, 2);
}

#[test]
fn visibility_rules() {
    let (_d, _c, svc) = setup();
    let exp = experiment(&svc, false);
    svc.create_sample(new_sample(&exp.id, "hidden"), ALICE).unwrap();
    assert_eq!(svc.list_samples(&SampleQuery::default(), EVE).unwrap().total, 0);
    assert_eq!(svc.list_samples(&SampleQuery::default(), BOB).unwrap().total, 1);
    assert!(matches!(svc.get_experiment(&exp.id, EVE), Err(ServiceError::NotFound(_))));

    assert!(matches!(svc.set_visibility(&exp.id, true, EVE), Err(ServiceError::Forbidden(_))));
    // the operator takes part but is not in charge
    assert!(matches!(svc.set_visibility(&exp.id, true, BOB), Err(ServiceError::Forbidden(_))));

    let e2 = svc.set_visibility(&exp.id, true, ALICE).unwrap();
    assert!(e2.visible);
    assert_eq!(e2.version, exp.version + 1);
    let page = svc.list_samples(&SampleQuery::default(), EVE).unwrap();
    assert_eq!(page.total, 1);
    assert!(page.items[0].visible);

    let e3 = svc.set_visibility(&exp.id, true, ALICE).unwrap();
    assert_eq!(e3, e2);

    svc.assign_role(Iri::iedm("CERN_IRRAD"), demo::FACILITY_MANAGER, FacilityRole::Manager).unwrap();
    let e4 = svc.set_visibility(&exp.id, false, demo::FACILITY_MANAGER).unwrap();
    assert!(!e4.visible);
    assert_eq!(svc.list_samples(&SampleQuery::default(), EVE).unwrap().total, 0);
}

#[test]
fn listing_matches_the_demo_rows() {
    let (_d, clock, svc) = setup();
    let (_, rows) = demo::seed(&svc, &clock).unwrap();
    let all = svc.list_samples(&SampleQuery::default(), EVE).unwrap();
    assert_eq!(all.total, 5);
    let dates: Vec<_> = all.items.iter().map(|s| s.last_update).collect();
    assert!(dates.windows(2).all(|w| w[0] >= w[1]));

    let q = SampleQuery { query: "pcb19".into(), ..Default::default() };
    let hits = svc.list_samples(&q, EVE).unwrap();
    assert_eq!(hits.total, 2);
    assert!(hits.items.iter().all(|s| s.name == "PCB19-run2018"));
    assert_eq!(hits.items[0].occupancy_report, "0.96 / 0.348 / 0.227");
    assert_eq!(hits.items[0].last_updated_by, "georgi.gorine@cern.ch");

    assert_eq!(rows[0].occupancy_report, "1.153 / 0.623 / 0.414");
    let by_id = SampleQuery { query: rows[4].id.to_lowercase(), ..Default::default() };
    assert_eq!(svc.list_samples(&by_id, EVE).unwrap().items[0].name, "TESTINA SEC");
}

#[test]
fn pagination() {
    let (_d, clock, svc) = setup();
    demo::seed(&svc, &clock).unwrap();
    let q = |page, size| SampleQuery { page: Some(page), page_size: Some(size), ..Default::default() };
    let p1 = svc.list_samples(&q(1, 2), EVE).unwrap();
    let p2 = svc.list_samples(&q(2, 2), EVE).unwrap();
    let p3 = svc.list_samples(&q(3, 2), EVE).unwrap();
    assert_eq!((p1.items.len(), p2.items.len(), p3.items.len()), (2, 2, 1));
    let all = svc.list_samples(&q(1, 500), EVE).unwrap();
    let joined: Vec<_> = [p1.items, p2.items, p3.items].concat();
    assert_eq!(joined, all.items);
    let beyond = svc.list_samples(&q(9, 2), EVE).unwrap();
    assert!(beyond.items.is_empty());
    assert_eq!(beyond.total, 5);
    assert!(svc.list_samples(&q(1, 0), EVE).is_err());
    assert!(svc.list_samples(&q(1, 501), EVE).is_err());
    assert!(svc.list_samples(&q(0, 10), EVE).is_err());
}

#[test]
fn ids_survive_restart() {
    let (dir, clock, svc) = setup();
    let exp = experiment(&svc, true);
    let a = svc.create_sample(new_sample(&exp.id, "a"), ALICE).unwrap();
    drop(svc);
    let svc = Service::open_with_clock(dir.path(), Namespaces::default(), clock).unwrap();
    let b = svc.create_sample(new_sample(&exp.id, "b"), ALICE).unwrap();
    assert_eq!(a.id, "SET-000001");
    assert_eq!(b.id, "SET-000002");
    assert_eq!(svc.get_sample(&a.id, ALICE).unwrap(), a);
}

#[test]
fn audit_log_is_monotone() {
    let (_d, clock, svc) = setup();
    let exp = experiment(&svc, true);
    let s = svc.create_sample(new_sample(&exp.id, "a"), ALICE).unwrap();
    for v in 1..5 {
        clock.advance(Duration::minutes(if v % 2 == 0 { 5 } else { -10 }));
        svc.update_sample(&s.id, SamplePatch::default(), BOB, v).unwrap();
    }
    let log: Vec<_> = svc.audit_log().unwrap().into_iter().filter(|e| e.record_id == s.id).collect();
    assert_eq!(log.len(), 5);
    for w in log.windows(2) {
        assert!(w[1].version > w[0].version);
        assert!(w[1].timestamp >= w[0].timestamp);
    }
}

#[test]
fn concurrent_updates_serialize() {
    let (_d, _c, svc) = setup();
    let svc = Arc::new(svc);
    let exp = experiment(&svc, true);
    let s = svc.create_sample(new_sample(&exp.id, "a"), ALICE).unwrap();
    let wins: usize = (0..8)
        .map(|i| {
            let svc = svc.clone();
            let id = s.id.clone();
            thread::spawn(move || {
                let patch = SamplePatch { name: Some(format!("n{i}")), ..Default::default() };
                svc.update_sample(&id, patch, ALICE, 1).is_ok() as usize
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .map(|h| h.join().unwrap())
        .sum();
    assert_eq!(wins, 1);
    assert_eq!(svc.get_sample(&s.id, ALICE).unwrap().version, 2);
}

#[test]
fn lifecycle_reproduces_the_golden_irradiation() {
    let (_d, _c, svc) = setup();
    let exp = experiment(&svc, true);
    let s = svc.create_sample(new_sample(&exp.id, "PCB5-run2017"), ALICE).unwrap();
    let start = Utc.with_ymd_and_hms(2018, 3, 30, 12, 0, 0).unwrap();
    let end = Utc.with_ymd_and_hms(2018, 11, 12, 18, 0, 0).unwrap();
    let field = Iri::iedm("Protons_24GeV");
    let rec = svc.register_dut_irradiation(&exp.id, &s.id, &field, start, BOB).unwrap();

    let early = svc.complete_dut_irradiation(&exp.id, &rec.id, start - Duration::seconds(1), None, BOB);
    assert!(matches!(early, Err(ServiceError::TemporalOrder { .. })));
    let momentum = QuantityValue::in_default_unit(24.0, QuantityKind::RelativisticMomentum).unwrap();
    let wrong = svc.complete_dut_irradiation(&exp.id, &rec.id, end, Some(momentum), BOB);
    assert!(matches!(wrong, Err(ServiceError::Validation(_))));

    let result = fluence(3e17).with_relative_error(0.07).unwrap();
    let done = svc.complete_dut_irradiation(&exp.id, &rec.id, end, Some(result.clone()), BOB).unwrap();
    assert_eq!(done.end, Some(end));
    assert_eq!(done.cumulated, Some(result));

    let export = svc.export_experiment(&exp.id, None).unwrap();
    assert!(export.warnings.is_empty());
    for needle in [
        "iedm:FCC-RadmonIrradiation a iedm:DUTIrradiation",
        "iedm:hasDUT iedm:PCB5-run2017",
        "iedm:hasStartTime iedm:_2018_03_30_12h_00",
        "iedm:hasEndTime iedm:_2018_11_12_18h_00",
        "iedm:hasRadiationField iedm:Protons_24GeV",
        "expo:MeasurementError iedm:_7_per_cent",
        "iedm:performedAt iedm:CERN_IRRAD",
    ] {
        assert!(export.turtle.contains(needle), "missing {needle}");
    }
    assert_eq!(svc.export_experiment(&exp.id, None).unwrap().turtle, export.turtle);
    let outcome = svc.validate_turtle(&export.turtle, false).unwrap();
    assert!(outcome.report.is_valid(), "{}", outcome.report);
    assert!(outcome.import_warnings.is_empty());
}

#[test]
fn draft_export_warns_about_missing_result() {
    let (_d, _c, svc) = setup();
    let exp = experiment(&svc, true);
    let s = svc.create_sample(new_sample(&exp.id, "PCB5-run2017"), ALICE).unwrap();
    let start = Utc.with_ymd_and_hms(2018, 3, 30, 12, 0, 0).unwrap();
    let rec = svc.register_dut_irradiation(&exp.id, &s.id, &Iri::iedm("Protons_24GeV"), start, BOB).unwrap();
    svc.complete_dut_irradiation(&exp.id, &rec.id, start + Duration::days(3), None, BOB).unwrap();
    let export = svc.export_experiment(&exp.id, None).unwrap();
    assert!(!export.turtle.is_empty());
    assert_eq!(export.warnings.len(), 1);
    let w = &export.warnings[0];
    assert_eq!(w.rule, Rule::CardinalityMin);
    assert_eq!(w.property, Some(Iri::iedm("hasResult")));
    assert_eq!(w.subject, Iri::iedm("FCC-Radmon"));
}

#[test]
fn registration_checks_references() {
    let (_d, _c, svc) = setup();
    let exp = experiment(&svc, true);
    let other = svc
        .create_experiment(NewExperiment { title: "Other".into(), ..demo::fcc_radmon() }, ALICE)
        .unwrap();
    let s = svc.create_sample(new_sample(&other.id, "x"), ALICE).unwrap();
    let t = Utc::now();
    let field = Iri::iedm("Protons_24GeV");
    assert!(matches!(
        svc.register_dut_irradiation(&exp.id, "SET-999999", &field, t, ALICE),
        Err(ServiceError::NotFound(_))
    ));
    assert!(matches!(
        svc.register_dut_irradiation(&exp.id, &s.id, &field, t, ALICE),
        Err(ServiceError::Validation(_))
    ));
    let s2 = svc.create_sample(new_sample(&exp.id, "y"), ALICE).unwrap();
    assert!(matches!(
        svc.register_dut_irradiation(&exp.id, &s2.id, &Iri::iedm("Gammas"), t, ALICE),
        Err(ServiceError::UnknownField(_))
    ));
    assert!(matches!(
        svc.register_dut_irradiation(&exp.id, &s2.id, &field, t, EVE),
        Err(ServiceError::Forbidden(_))
    ));
    assert!(matches!(
        svc.complete_dut_irradiation(&exp.id, "IRR-999999", t, None, ALICE),
        Err(ServiceError::NotFound(_))
    ));
}

#[test]
fn duplicate_names_export_by_id() {
    let (_d, _c, svc) = setup();
    let exp = experiment(&svc, true);
    let t = Utc.with_ymd_and_hms(2018, 9, 1, 0, 0, 0).unwrap();
    let field = Iri::iedm("Protons_24GeV");
    for _ in 0..2 {
        let s = svc.create_sample(new_sample(&exp.id, "PCB19-run2018"), ALICE).unwrap();
        let r = svc.register_dut_irradiation(&exp.id, &s.id, &field, t, ALICE).unwrap();
        svc.complete_dut_irradiation(&exp.id, &r.id, t + Duration::days(60), Some(fluence(3e17)), ALICE)
            .unwrap();
    }
    let export = svc.export_experiment(&exp.id, None).unwrap();
    assert!(export.warnings.is_empty());
    assert!(export.turtle.contains("iedm:hasDUT iedm:SET-000001"));
    assert!(export.turtle.contains("iedm:hasDUT iedm:SET-000002"));
    assert!(svc.validate_turtle(&export.turtle, false).unwrap().report.is_valid());
}

#[test]
fn fields_and_imports() {
    let (dir, _c, svc) = setup();
    let gamma = FieldEntry {
        iri: Iri::iedm("Gammas_Co60"),
        particles: vec![Iri::iedm("Photon")],
        momentum_gev_per_c: None,
    };
    svc.register_field(gamma.clone()).unwrap();
    assert!(svc.fields().contains(&gamma));
    assert_eq!(svc.fields().len(), 2);

    let (path, warnings) = svc
        .import_turtle("golden", iedm_core::fixtures::FCC_RADMON_TTL, ALICE)
        .unwrap();
    assert!(warnings.is_empty());
    assert!(path.starts_with(dir.path()));
    let stored = std::fs::read_to_string(path).unwrap();
    assert!(svc.validate_turtle(&stored, false).unwrap().report.is_valid());

    let broken = iedm_core::fixtures::FCC_RADMON_TTL.replace("iedm:hasDUT iedm:PCB5-run2017 ;", "");
    assert!(matches!(
        svc.import_turtle("broken", &broken, ALICE),
        Err(ServiceError::ImportInvalid { .. })
    ));
}
