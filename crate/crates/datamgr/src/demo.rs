//! Demo content: the FCC-Radmon experiment and five sample rows as they
//! appear in the IRRAD Data Manager listing.

use chrono::{DateTime, TimeZone, Utc};
use iedm_core::ontology::QuantityKind;
use iedm_core::{Iri, QuantityValue};

use crate::clock::ManualClock;
use crate::model::*;
use crate::service::{Result, Service};

pub const RESPONSIBLE: &str = "blarina.glatse@cern.ch";
pub const OPERATOR: &str = "georgi.gorine@cern.ch";
pub const FACILITY_MANAGER: &str = "irradiation.facilities@cern.ch";
pub const CATEGORY_NOTE: &str = "Room temperature, in irradiation area: 10x10 mm²";

/// (day, month, year, name, occupancy, last updated by)
pub type Row = (u32, u32, i32, &'static str, [f64; 3], &'static str);

pub const ROWS: [Row; 5] = [
    (7, 9, 2018, "PCB5-run2017", [1.153, 0.623, 0.414], RESPONSIBLE),
    (26, 11, 2018, "PCB19-run2018", [0.96, 0.348, 0.227], OPERATOR),
    (5, 11, 2018, "PCB19-run2018", [0.96, 0.348, 0.227], OPERATOR),
    (19, 9, 2018, "PCB22-ALD2018", [1.106, 0.576, 0.389], OPERATOR),
    (7, 11, 2018, "TESTINA SEC", [0.256, 0.19, 0.131], FACILITY_MANAGER),
];

fn day(d: u32, m: u32, y: i32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(y, m, d, 12, 0, 0).single().expect("valid date")
}

pub fn fcc_radmon() -> NewExperiment {
    NewExperiment {
        title: "FCC-Radmon".into(),
        facility: Iri::iedm("CERN_IRRAD"),
        irradiation_category: IrradiationCategory::PassiveStandardIrradiation,
        technical_requirements: String::new(),
        admin: AdminInfo {
            responsible: RESPONSIBLE.into(),
            operator: OPERATOR.into(),
            coordinator: None,
            manager: None,
        },
        visible: true,
    }
}

pub fn requested_fluence() -> QuantityValue {
    QuantityValue::in_default_unit(3e17, QuantityKind::Fluence).expect("valid fluence")
}

/// Creates the experiment and the five rows, each stamped with its listed
/// date by `clock`. Returns the experiment and the sample records in row
/// order.
pub fn seed(svc: &Service, clock: &ManualClock) -> Result<(ExperimentRecord, Vec<SampleRecord>)> {
    clock.set(day(1, 9, 2018));
    svc.assign_role(Iri::iedm("CERN_IRRAD"), FACILITY_MANAGER, FacilityRole::Manager)?;
    let exp = svc.create_experiment(fcc_radmon(), RESPONSIBLE)?;
    let mut out = Vec::new();
    for (d, m, y, name, occ, user) in ROWS {
        clock.set(day(d, m, y));
        out.push(svc.create_sample(
            NewSample {
                name: name.into(),
                category_note: CATEGORY_NOTE.into(),
                requested_fluence: requested_fluence(),
                experiment_id: exp.id.clone(),
                occupancy: Some(OccupancyTriple::from_array(occ)),
                layers: None,
            },
            user,
        )?);
    }
    Ok((exp, out))
}
