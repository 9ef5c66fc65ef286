//! Acceptance criteria, one line each. Exits non-zero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use iedm_core::formgen::{form_schema, Widget};
use iedm_core::materials::{format_triple, occupancy, occupancy_triple, OccupancyKind};
use iedm_core::ontology::{Datatype, Namespaces, PropertyKind, QuantityKind};
use iedm_core::rdf::{dataset_from_graph, graph_from_dataset, parse_turtle, serialize_turtle};
use iedm_core::validation::{seed_mutants, validate_dataset};
use iedm_core::{
    fixtures, load_builtin_ontology, Dataset, Iri, Layer, LayerStack, Literal, Material, MaterialTable, Ontology,
    QuantityValue, TimePosition,
};
use iedm_datamgr::model::*;
use iedm_datamgr::{demo, ManualClock, Service, ServiceError};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn golden() -> Outcome {
    let started = Instant::now();
    let o = load_builtin_ontology();
    let g = parse_turtle(fixtures::FCC_RADMON_TTL).map_err(|e| e.to_string())?;
    let (ds, warnings) = dataset_from_graph(&g, &o);
    ensure(warnings.is_empty(), || format!("import warnings {warnings:?}"))?;
    let report = validate_dataset(&ds, &o);
    let elapsed = started.elapsed();
    ensure(report.violations.is_empty(), || report.to_string())?;
    for name in [
        "FCC-Radmon",
        "FCC-RadmonIrradiation",
        "PCB5-run2017",
        "Dosimeter004139",
        "CERN_IRRAD",
        "Protons_24GeV",
        "_2018_03_30_12h_00",
        "_2018_11_12_18h_00",
        "_3e17_protons_per_square_cm",
        "_7_per_cent",
    ] {
        ensure(ds.contains(&Iri::iedm(name)), || format!("missing iedm:{name}"))?;
    }
    let fluence = ds.get(&Iri::iedm("_3e17_protons_per_square_cm")).unwrap();
    let err = fluence.targets(&Iri::expo("MeasurementError")).next().cloned();
    ensure(err == Some(Iri::iedm("_7_per_cent")), || format!("error is {err:?}"))?;
    let pct = ds.get(&Iri::iedm("_7_per_cent")).unwrap().values().next().and_then(Literal::as_f64);
    ensure(pct == Some(0.07), || format!("error value {pct:?}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("{} individuals, 0 violations, {elapsed:.2?}", ds.len()))
}

#[derive(Debug, Clone)]
enum Op {
    Type(usize, usize),
    Link(usize, usize, usize),
    Value(usize, Literal),
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        any::<f64>().prop_map(Literal::double),
        (-1_000_000i64..1_000_000).prop_map(|m| Literal::new(format!("{}", m as f64 / 100.0), Datatype::Decimal).unwrap()),
        "[ -~\\n\"\\\\é]{0,10}".prop_map(Literal::string),
        (0i64..4_000_000_000).prop_map(|s| {
            Literal::date_time(TimePosition::from_utc(chrono::DateTime::from_timestamp(s, 0).unwrap()))
        }),
    ]
}

fn ops() -> impl Strategy<Value = (usize, Vec<Op>)> {
    (1usize..8).prop_flat_map(|n| {
        let op = prop_oneof![
            (0..n, any::<usize>()).prop_map(|(i, c)| Op::Type(i, c)),
            (0..n, any::<usize>(), 0..n).prop_map(|(i, p, j)| Op::Link(i, p, j)),
            (0..n, literal()).prop_map(|(i, l)| Op::Value(i, l)),
        ];
        (Just(n), prop::collection::vec(op, 0..16))
    })
}

fn build(o: &Ontology, n: usize, ops: &[Op]) -> Dataset {
    let classes: Vec<Iri> = o.classes().map(|c| c.iri.clone()).collect();
    let objects: Vec<Iri> = o
        .properties()
        .filter(|p| p.kind == PropertyKind::Object)
        .map(|p| p.iri.clone())
        .collect();
    let name = |i: usize| Iri::iedm(&format!("ind-{i}"));
    let mut ds = Dataset::new();
    for i in 0..n {
        ds.mint_individual(o, &classes[i % classes.len()], name(i)).unwrap();
    }
    for op in ops {
        match op {
            Op::Type(i, c) => ds.get_mut(&name(*i)).unwrap().add_type(&classes[c % classes.len()], o).unwrap(),
            Op::Link(i, p, j) => ds.assert_statement(o, &name(*i), &objects[p % objects.len()], name(*j)).unwrap(),
            Op::Value(i, l) => ds.assert_statement(o, &name(*i), &Ontology::has_value(), l.clone()).unwrap(),
        }
    }
    ds
}

fn round_trip_text(text: &str, o: &Ontology) -> Result<(), String> {
    let g = parse_turtle(text).map_err(|e| e.to_string())?;
    let (ds, _) = dataset_from_graph(&g, o);
    let g2 = graph_from_dataset(&ds, &Namespaces::default());
    let out = serialize_turtle(&g2);
    let back = parse_turtle(&out).map_err(|e| e.to_string())?;
    ensure(back.triples() == g.triples(), || "triple sets differ".into())?;
    ensure(serialize_turtle(&back) == out, || "serialization not byte-stable".into())
}

fn round_trip() -> Outcome {
    let o = load_builtin_ontology();
    round_trip_text(fixtures::FCC_RADMON_TTL, &o).map_err(|e| format!("golden: {e}"))?;
    const CASES: u32 = 128;
    runner(CASES)
        .run(&ops(), |(n, ops)| {
            let ds = build(&o, n, &ops);
            let text = serialize_turtle(&graph_from_dataset(&ds, &Namespaces::default()));
            prop_assert_eq!(&text, &serialize_turtle(&graph_from_dataset(&ds.clone(), &Namespaces::default())));
            round_trip_text(&text, &o).map_err(TestCaseError::fail)?;
            let (back, _) = dataset_from_graph(&parse_turtle(&text).unwrap(), &o);
            prop_assert_eq!(back, ds);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("golden + {CASES} random datasets"))
}

fn seeding() -> Outcome {
    let started = Instant::now();
    let o = load_builtin_ontology();
    let mutants = seed_mutants(&o).map_err(|e| e.to_string())?;
    ensure(!mutants.is_empty(), || "no mutants".into())?;
    for m in &mutants {
        let v = validate_dataset(&m.mutated, &o).violations;
        let tag = || format!("{} {} over={}", m.class, m.restriction, m.over);
        ensure(v.len() == 1, || format!("{}: {} violations", tag(), v.len()))?;
        ensure(v[0].rule == m.expected_rule && v[0].subject == m.subject, || format!("{}: got {}", tag(), v[0]))?;
        ensure(validate_dataset(&m.original, &o).violations.is_empty(), || format!("{}: original invalid", tag()))?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{} mutants, {elapsed:.2?}", mutants.len()))
}

fn closure() -> Outcome {
    let o = load_builtin_ontology();
    let chains: [&[Iri]; 4] = [
        &[Iri::iedm("Operator"), Iri::iedm("IrradiationFacilityUser"), Iri::iedm("User"), Iri::foaf("Agent")],
        &[Iri::iedm("User"), Iri::expo("SentientAgent")],
        &[Iri::iedm("Fluence"), Iri::iedm("CumulatedQuantity"), Iri::iedm("DosimetricQuantity")],
        &[Iri::iedm("DUT"), Iri::iedm("IrradiationExperimentObject"), Iri::expo("Object")],
    ];
    let mut checked = 0;
    for chain in chains {
        for (i, a) in chain.iter().enumerate() {
            for b in &chain[i..] {
                let ok = o.is_subclass_of(a, b).map_err(|e| e.to_string())?;
                ensure(ok, || format!("{a} is not below {b}"))?;
                checked += 1;
            }
        }
    }
    ensure(!o.is_subclass_of(&Iri::iedm("User"), &Iri::iedm("Operator")).unwrap(), || "User below Operator".into())?;
    Ok(format!("{checked} pairs"))
}

const NAMES: [&str; 12] = ["H", "C", "O", "Al", "Si", "Fe", "Cu", "W", "Pb", "water", "kapton", "FR4"];

fn make(t: &MaterialTable, layers: &[(usize, f64)]) -> LayerStack {
    LayerStack::new(
        None,
        layers
            .iter()
            .map(|(m, th)| Layer::new(t.material(NAMES[*m]).unwrap(), *th).unwrap())
            .collect(),
    )
}

fn occupancy_math() -> Outcome {
    const TOL: f64 = 1e-12;
    let t = MaterialTable::builtin();
    for k in OccupancyKind::ALL {
        let v = occupancy(&LayerStack::default(), k, &t).map_err(|e| e.to_string())?;
        ensure(v == 0.0, || format!("empty stack {k:?} = {v}"))?;
    }
    let stack = || prop::collection::vec((0..NAMES.len(), 0.0f64..5.0), 0..10);
    runner(256)
        .run(&(stack(), stack(), 0.0f64..10.0, any::<u64>()), |(a, b, c, seed)| {
            let (sa, sb) = (make(&t, &a), make(&t, &b));
            let oa = occupancy_triple(&sa, &t).unwrap();
            let ob = occupancy_triple(&sb, &t).unwrap();
            let oab = occupancy_triple(&sa.concat(&sb), &t).unwrap();
            let scaled: Vec<_> = a.iter().map(|(m, th)| (*m, th * c)).collect();
            let osc = occupancy_triple(&make(&t, &scaled), &t).unwrap();
            let mut shuffled = a.clone();
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let operm = occupancy_triple(&make(&t, &shuffled), &t).unwrap();
            for k in 0..3 {
                prop_assert!(rel(oab[k], oa[k] + ob[k]) <= TOL, "additivity {} vs {}", oab[k], oa[k] + ob[k]);
                prop_assert!(rel(osc[k], c * oa[k]) <= TOL, "linearity {} vs {}", osc[k], c * oa[k]);
                prop_assert!(rel(operm[k], oa[k]) <= TOL, "permutation {} vs {}", operm[k], oa[k]);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    // tabulated liquid water X0 = 36.08 g/cm²
    let water = Material::compound(vec![(Material::element("H"), 0.1119), (Material::element("O"), 0.8881)], 1.0)
        .map_err(|e| e.to_string())?;
    let x0 = t.mix_mass_properties(&water).map_err(|e| e.to_string())?.x0;
    ensure(rel(x0, 36.08) < 0.02, || format!("water X0 {x0}"))?;

    // 1 mm of silicon: 0.1 · 2.329 / 21.82 · 100 %
    let si = LayerStack::new(None, vec![Layer::new(Material::element("Si"), 0.1).unwrap()]);
    let got = occupancy(&si, OccupancyKind::Radiation, &t).map_err(|e| e.to_string())?;
    let want = 0.1 * 2.329 / 21.82 * 100.0;
    ensure(rel(got, want) < 1e-9, || format!("silicon {got} vs {want}"))?;
    Ok(format!("256 random stacks within {TOL:e}; water X0 {x0:.2} g/cm2; Si {got:.6} %"))
}

fn formatting() -> Outcome {
    let cases = [
        ([1.153, 0.623, 0.414], "1.153 / 0.623 / 0.414"),
        ([0.96, 0.348, 0.227], "0.96 / 0.348 / 0.227"),
    ];
    for (t, want) in cases {
        let got = format_triple(t);
        ensure(got == want, || format!("{t:?} gave {got:?}"))?;
        let rec = OccupancyTriple::from_array(t).report();
        ensure(rec == want, || format!("record report {rec:?}"))?;
    }
    Ok("both exemplars exact".into())
}

fn end_to_end() -> Outcome {
    let o = load_builtin_ontology();
    let field = Iri::iedm("Protons_24GeV");
    const CASES: u32 = 24;
    runner(CASES)
        .run(
            &(prop::collection::vec((0i64..1_000_000, 1i64..5_000_000, 0.0f64..1e18, prop::option::of(0.0f64..=1.0)), 1..4), 0..3usize),
            |(duts, cat)| {
                let dir = tempfile::TempDir::new().unwrap();
                let clock = Arc::new(ManualClock::new(Utc.with_ymd_and_hms(2018, 1, 1, 0, 0, 0).unwrap()));
                let svc = Service::open_with_clock(dir.path(), Namespaces::default(), clock).unwrap();
                let mut req = demo::fcc_radmon();
                req.irradiation_category = [
                    IrradiationCategory::PassiveStandardIrradiation,
                    IrradiationCategory::PassiveCustomIrradiation,
                    IrradiationCategory::ActiveIrradiation,
                ][cat];
                let exp = svc.create_experiment(req, demo::RESPONSIBLE).unwrap();
                for (i, (start, len, value, err)) in duts.iter().enumerate() {
                    let mut s = NewSample {
                        name: format!("PCB{i}-run2018"),
                        category_note: demo::CATEGORY_NOTE.into(),
                        requested_fluence: demo::requested_fluence(),
                        experiment_id: exp.id.clone(),
                        occupancy: None,
                        layers: None,
                    };
                    s.layers = Some(vec![LayerSpec { material: "FR4".into(), thickness_cm: 0.16 }]);
                    let s = svc.create_sample(s, demo::OPERATOR).unwrap();
                    let start = Utc.with_ymd_and_hms(2018, 3, 30, 12, 0, 0).unwrap() + chrono::Duration::seconds(*start);
                    let r = svc.register_dut_irradiation(&exp.id, &s.id, &field, start, demo::OPERATOR).unwrap();
                    let mut q = QuantityValue::in_default_unit(*value, QuantityKind::Fluence).unwrap();
                    if let Some(e) = err {
                        q = q.with_relative_error(*e).unwrap();
                    }
                    let bad = svc.complete_dut_irradiation(&exp.id, &r.id, start - chrono::Duration::seconds(1), Some(q.clone()), demo::OPERATOR);
                    prop_assert!(matches!(bad, Err(ServiceError::TemporalOrder { .. })), "end before start accepted");
                    svc.complete_dut_irradiation(&exp.id, &r.id, start + chrono::Duration::seconds(*len), Some(q), demo::OPERATOR)
                        .unwrap();
                    let stale = svc.update_sample(&s.id, SamplePatch::default(), demo::OPERATOR, s.version + 1);
                    prop_assert!(matches!(stale, Err(ServiceError::VersionConflict { .. })), "stale version accepted");
                    prop_assert_eq!(svc.get_sample(&s.id, demo::OPERATOR).unwrap(), s);
                }
                let export = svc.export_experiment(&exp.id, None).unwrap();
                prop_assert!(export.warnings.is_empty());
                let (ds, warnings) = dataset_from_graph(&parse_turtle(&export.turtle).unwrap(), &o);
                prop_assert!(warnings.is_empty());
                let report = validate_dataset(&ds, &o);
                prop_assert!(report.is_valid(), "{}", report);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;
    Ok(format!("{CASES} experiments, 0 violations on re-import; conflicts and temporal order rejected"))
}

fn formgen() -> Outcome {
    let o = load_builtin_ontology();
    let s = form_schema(&Iri::iedm("IrradiationExperiment"), &o).map_err(|e| e.to_string())?;
    let selects: Vec<_> = s.fields.iter().filter(|f| f.widget == Widget::Select).collect();
    ensure(selects.len() == 1, || format!("{} selects", selects.len()))?;
    let f = selects[0];
    ensure(f.required() && f.max_count == Some(1), || format!("select arity {}..{:?}", f.min_count, f.max_count))?;
    let want = ["ActiveIrradiation", "PassiveCustomIrradiation", "PassiveStandardIrradiation"].map(Iri::iedm);
    ensure(f.options == want, || format!("options {:?}", f.options))?;
    let mut n = 0;
    for c in o.classes() {
        form_schema(&c.iri, &o).map_err(|e| format!("{}: {e}", c.iri))?;
        n += 1;
    }
    Ok(format!("category select with 3 options; {n} classes generate schemas"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("golden-instance fidelity", golden),
        ("round-trip", round_trip),
        ("violation seeding", seeding),
        ("subclass closure", closure),
        ("occupancy math", occupancy_math),
        ("report formatting", formatting),
        ("end-to-end API", end_to_end),
        ("formgen", formgen),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
