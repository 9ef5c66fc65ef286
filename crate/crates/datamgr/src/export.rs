//! Experiment records to ontology individuals.
//!
//! Names follow the experiment title: `{title}`, `{title}Category`,
//! `{title}AdminInfo`, `{title}Irradiation` (numbered from 1 when there is
//! more than one), and `{irradiation}_Result` for cumulated quantities.

use std::collections::{BTreeMap, BTreeSet};

use iedm_core::ontology::{Prefix, QuantityKind};
use iedm_core::{Dataset, Iri, Literal, Ontology, QuantityValue, RadiationFieldSpec, TimePosition};

use crate::model::{ExperimentRecord, FieldEntry, SampleRecord};
use crate::service::{Result, ServiceError};

/// Turns free text into a local name: disallowed characters become `_`.
pub fn local_name(text: &str) -> Result<String> {
    let mut s: String = text
        .trim()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-') { c } else { '_' })
        .collect();
    while s.ends_with('.') {
        s.pop();
    }
    if s.is_empty() {
        return Err(ServiceError::Validation(format!("`{text}` has no usable characters for a name")));
    }
    if !s.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
        s.insert(0, '_');
    }
    Iri::new(Prefix::Iedm, s.clone()).map_err(|e| ServiceError::Validation(e.to_string()))?;
    Ok(s)
}

/// `blarina.glatse@cern.ch` becomes `blarina.glatse_at_cern.ch`.
pub fn person_iri(email: &str) -> Result<Iri> {
    Ok(Iri::iedm(&local_name(&email.replace('@', "_at_"))?))
}

fn time(ds: &mut Dataset, o: &Ontology, t: chrono::DateTime<chrono::Utc>) -> Result<Iri> {
    let tp = TimePosition::from_utc(t);
    let iri = Iri::iedm(&tp.local_name());
    ds.ensure_individual(o, &Iri::iedm("TimePosition"), iri.clone())?
        .assert_statement(&Ontology::has_value(), Literal::date_time(tp), o)?;
    Ok(iri)
}

/// Samples whose names collide after sanitizing are named by id instead.
fn dut_names(e: &ExperimentRecord, samples: &BTreeMap<String, SampleRecord>) -> Result<BTreeMap<String, Iri>> {
    let ids: BTreeSet<&str> = e.dut_irradiations.iter().map(|r| r.dut_id.as_str()).collect();
    let mut by_name: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for id in &ids {
        let name = match samples.get(*id) {
            Some(s) => local_name(&s.name)?,
            None => local_name(id)?,
        };
        by_name.entry(name).or_default().push(id);
    }
    let mut out = BTreeMap::new();
    for (name, ids) in by_name {
        if ids.len() == 1 {
            out.insert(ids[0].to_string(), Iri::iedm(&name));
        } else {
            for id in ids {
                out.insert(id.to_string(), Iri::iedm(&local_name(id)?));
            }
        }
    }
    Ok(out)
}

/// The experiment as a dataset. Incomplete records (no end time, no
/// cumulated result yet) give a dataset that only passes draft validation.
pub fn experiment_dataset(
    e: &ExperimentRecord,
    samples: &BTreeMap<String, SampleRecord>,
    fields: &[FieldEntry],
    o: &Ontology,
) -> Result<Dataset> {
    let mut ds = Dataset::new();
    let title = local_name(&e.title)?;
    let exp = Iri::iedm(&title);
    ds.mint_individual(o, &Iri::iedm("IrradiationExperiment"), exp.clone())?;

    let category = Iri::iedm(&format!("{title}Category"));
    ds.ensure_individual(o, &e.irradiation_category.class(), category.clone())?;
    ds.assert_statement(o, &exp, &Iri::iedm("hasIrradiationCategory"), category)?;

    let admin = Iri::iedm(&format!("{title}AdminInfo"));
    ds.ensure_individual(o, &Iri::iedm("AdminInfoIrradiationExperiment"), admin.clone())?;
    ds.assert_statement(o, &exp, &Iri::expo("HasPart"), admin.clone())?;
    let people = [
        (Some(&e.admin.responsible), "ResponsiblePerson"),
        (Some(&e.admin.operator), "Operator"),
        (e.admin.coordinator.as_ref(), "IrradiationFacilityCoordinator"),
        (e.admin.manager.as_ref(), "IrradiationFacilityManager"),
    ];
    for (email, class) in people {
        if let Some(email) = email {
            let p = person_iri(email)?;
            ds.ensure_individual(o, &Iri::iedm(class), p.clone())?;
            ds.assert_statement(o, &admin, &Iri::iedm("hasRole"), p)?;
        }
    }

    ds.ensure_individual(o, &Iri::iedm("IrradiationFacility"), e.facility.clone())?;
    ds.assert_statement(o, &exp, &Iri::iedm("performedAt"), e.facility.clone())?;

    let many = e.dut_irradiations.len() > 1;
    let mut irradiations = Vec::new();
    for (n, r) in e.dut_irradiations.iter().enumerate() {
        let irr = if many {
            Iri::iedm(&format!("{title}Irradiation{}", n + 1))
        } else {
            Iri::iedm(&format!("{title}Irradiation"))
        };
        ds.mint_individual(o, &Iri::iedm("DUTIrradiation"), irr.clone())?;
        ds.assert_statement(o, &exp, &Iri::iedm("hasPart"), irr.clone())?;

        let start = time(&mut ds, o, r.start)?;
        ds.assert_statement(o, &irr, &Iri::iedm("hasStartTime"), start)?;
        if let Some(end) = r.end {
            let end = time(&mut ds, o, end)?;
            ds.assert_statement(o, &irr, &Iri::iedm("hasEndTime"), end)?;
        }

        // an unregistered field stays a bare reference and fails validation
        if let Some(f) = fields.iter().find(|f| f.iri == r.radiation_field) {
            let momentum = f
                .momentum_gev_per_c
                .map(|m| QuantityValue::in_default_unit(m, QuantityKind::RelativisticMomentum))
                .transpose()?;
            RadiationFieldSpec::new(f.particles.clone(), momentum)?.assert_into(&mut ds, o, &f.iri)?;
        }
        ds.assert_statement(o, &irr, &Iri::iedm("hasRadiationField"), r.radiation_field.clone())?;

        if let Some(q) = &r.cumulated {
            let result = Iri::iedm(&format!("{}_Result", irr.local()));
            q.assert_into(&mut ds, o, &result)?;
            ds.assert_statement(o, &irr, &Iri::iedm("hasResult"), result.clone())?;
            ds.assert_statement(o, &exp, &Iri::iedm("hasResult"), result)?;
        }
        irradiations.push(irr);
    }

    // DUTs go last so a sample named like another generated individual
    // can fall back to its id
    let duts = dut_names(e, samples)?;
    let dut_class = Iri::iedm("DUT");
    for (r, irr) in e.dut_irradiations.iter().zip(irradiations) {
        let mut dut = duts[&r.dut_id].clone();
        if ds.get(&dut).is_some_and(|i| !i.types().contains(&dut_class)) {
            dut = Iri::iedm(&local_name(&r.dut_id)?);
        }
        ds.ensure_individual(o, &dut_class, dut.clone())?;
        ds.assert_statement(o, &irr, &Iri::iedm("hasDUT"), dut)?;
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(local_name("FCC-Radmon").unwrap(), "FCC-Radmon");
        assert_eq!(local_name(" PCB19 run 2018. ").unwrap(), "PCB19_run_2018");
        assert_eq!(local_name("2018 run").unwrap(), "_2018_run");
        assert!(local_name("...").is_err());
        assert_eq!(person_iri("a.b@cern.ch").unwrap(), Iri::iedm("a.b_at_cern.ch"));
    }
}
