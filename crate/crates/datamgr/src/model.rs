//! Records and request bodies. Field names are the wire names.

use chrono::{DateTime, Utc};
use iedm_core::materials::OccupancyKind;
use iedm_core::{Iri, QuantityValue};
use serde::{Deserialize, Serialize};

/// Radiation, nuclear collision and nuclear interaction length occupancy,
/// in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OccupancyTriple {
    pub radiation: f64,
    pub collision: f64,
    pub interaction: f64,
}

impl OccupancyTriple {
    pub fn from_array(t: [f64; 3]) -> Self {
        OccupancyTriple {
            radiation: t[0],
            collision: t[1],
            interaction: t[2],
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.radiation, self.collision, self.interaction]
    }

    pub fn get(&self, kind: OccupancyKind) -> f64 {
        match kind {
            OccupancyKind::Radiation => self.radiation,
            OccupancyKind::Collision => self.collision,
            OccupancyKind::Interaction => self.interaction,
        }
    }

    /// `"R / C / I"` as displayed in listings.
    pub fn report(&self) -> String {
        iedm_core::materials::format_triple(self.as_array())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleRecord {
    pub id: String,
    pub name: String,
    /// Free-text handling note, e.g. "Room temperature, in irradiation area".
    pub category_note: String,
    pub requested_fluence: QuantityValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupancy: Option<OccupancyTriple>,
    /// Formatted occupancy, empty when unknown.
    #[serde(default)]
    pub occupancy_report: String,
    pub last_update: DateTime<Utc>,
    pub last_updated_by: String,
    pub experiment_id: String,
    /// Mirrors the owning experiment's flag.
    pub visible: bool,
    pub version: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IrradiationCategory {
    PassiveStandardIrradiation,
    PassiveCustomIrradiation,
    ActiveIrradiation,
}

impl IrradiationCategory {
    pub fn class(self) -> Iri {
        Iri::iedm(match self {
            IrradiationCategory::PassiveStandardIrradiation => "PassiveStandardIrradiation",
            IrradiationCategory::PassiveCustomIrradiation => "PassiveCustomIrradiation",
            IrradiationCategory::ActiveIrradiation => "ActiveIrradiation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdminInfo {
    pub responsible: String,
    pub operator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manager: Option<String>,
}

impl AdminInfo {
    pub fn involves(&self, user: &str) -> bool {
        self.responsible == user
            || self.operator == user
            || self.coordinator.as_deref() == Some(user)
            || self.manager.as_deref() == Some(user)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DutIrradiationRecord {
    pub id: String,
    pub dut_id: String,
    pub radiation_field: Iri,
    pub start: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulated: Option<QuantityValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentRecord {
    pub id: String,
    pub title: String,
    pub facility: Iri,
    pub irradiation_category: IrradiationCategory,
    #[serde(default)]
    pub technical_requirements: String,
    pub admin: AdminInfo,
    #[serde(default)]
    pub dut_irradiations: Vec<DutIrradiationRecord>,
    pub visible: bool,
    pub version: u64,
    pub last_update: DateTime<Utc>,
    pub last_updated_by: String,
}

/// A registered radiation field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldEntry {
    pub iri: Iri,
    pub particles: Vec<Iri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum_gev_per_c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FacilityRole {
    Coordinator,
    Manager,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoleAssignment {
    pub facility: Iri,
    pub user: String,
    pub role: FacilityRole,
}

/// One line of the append-only audit log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditEntry {
    pub timestamp: DateTime<Utc>,
    pub user: String,
    pub record_id: String,
    pub version: u64,
    pub action: String,
}

/// A layer given by material name, as in stack files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LayerSpec {
    pub material: String,
    pub thickness_cm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewSample {
    pub name: String,
    #[serde(default)]
    pub category_note: String,
    pub requested_fluence: QuantityValue,
    pub experiment_id: String,
    /// Known occupancy; takes precedence over `layers`.
    #[serde(default)]
    pub occupancy: Option<OccupancyTriple>,
    /// Layer stack the occupancy is computed from.
    #[serde(default)]
    pub layers: Option<Vec<LayerSpec>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SamplePatch {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub category_note: Option<String>,
    #[serde(default)]
    pub requested_fluence: Option<QuantityValue>,
    #[serde(default)]
    pub occupancy: Option<OccupancyTriple>,
    #[serde(default)]
    pub layers: Option<Vec<LayerSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewExperiment {
    pub title: String,
    pub facility: Iri,
    pub irradiation_category: IrradiationCategory,
    #[serde(default)]
    pub technical_requirements: String,
    pub admin: AdminInfo,
    #[serde(default)]
    pub visible: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleQuery {
    #[serde(default)]
    pub query: String,
    #[serde(default)]
    pub experiment_id: Option<String>,
    #[serde(default)]
    pub page: Option<usize>,
    #[serde(default)]
    pub page_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Page<T> {
    pub items: Vec<T>,
    pub total: usize,
    pub page: usize,
    pub page_size: usize,
}
