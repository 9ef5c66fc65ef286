//! Record operations. Writes hold the state lock for their whole duration,
//! file writes included, so each record has a single writer; reads share
//! the lock and see committed state only.

use std::path::PathBuf;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use chrono::{DateTime, Utc};
use iedm_core::formgen::{form_schema, FormSchema};
use iedm_core::materials::{occupancy_triple, MaterialError};
use iedm_core::ontology::{Namespaces, QuantityKind};
use iedm_core::rdf::{dataset_from_graph, parse_turtle_with, ImportWarning, RdfError};
use iedm_core::validation::{validate_dataset_with, Report, ValidationOptions, Violation};
use iedm_core::{load_builtin_ontology, Iri, Layer, LayerStack, MaterialTable, Ontology, OntologyError, QuantityValue};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::{Clock, SystemClock};
use crate::export;
use crate::model::*;
use crate::store::{FileStore, Snapshot, StoreError};

pub const MAX_PAGE_SIZE: usize = 500;
pub const DEFAULT_PAGE_SIZE: usize = 50;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{0} not found")]
    NotFound(String),
    #[error("unknown experiment {0}")]
    UnknownExperiment(String),
    #[error("unknown radiation field {0}")]
    UnknownField(Iri),
    #[error("invalid request: {0}")]
    Validation(String),
    #[error("{id} is at version {actual}, not {expected}")]
    VersionConflict { id: String, expected: u64, actual: u64 },
    #[error("forbidden: {0}")]
    Forbidden(String),
    #[error("end {end} is before start {start}")]
    TemporalOrder { start: DateTime<Utc>, end: DateTime<Utc> },
    #[error("export of {id} has {} violations", report.violations.len())]
    ExportInvalid { id: String, report: Box<Report> },
    #[error("import has {} violations", report.violations.len())]
    ImportInvalid { report: Box<Report> },
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl From<MaterialError> for ServiceError {
    fn from(e: MaterialError) -> Self {
        ServiceError::Validation(e.to_string())
    }
}

impl From<OntologyError> for ServiceError {
    fn from(e: OntologyError) -> Self {
        match e {
            OntologyError::UnknownClass(c) => ServiceError::NotFound(c.to_string()),
            other => ServiceError::Validation(other.to_string()),
        }
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

/// Turtle plus the draft-mode warnings it was exported with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Export {
    pub turtle: String,
    pub warnings: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationOutcome {
    #[serde(flatten)]
    pub report: Report,
    pub import_warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OccupancyResult {
    #[serde(flatten)]
    pub occupancy: OccupancyTriple,
    pub report: String,
}

pub struct Service {
    store: FileStore,
    clock: Arc<dyn Clock>,
    ontology: Ontology,
    namespaces: Namespaces,
    materials: MaterialTable,
    state: RwLock<Snapshot>,
}

fn builtin_fields() -> Vec<FieldEntry> {
    vec![FieldEntry {
        iri: Iri::iedm("Protons_24GeV"),
        particles: vec![Iri::iedm("Proton")],
        momentum_gev_per_c: Some(24.0),
    }]
}

fn check_email(what: &str, s: &str) -> Result<()> {
    let ok = s
        .split_once('@')
        .is_some_and(|(u, d)| !u.is_empty() && !d.is_empty() && !s.chars().any(char::is_whitespace));
    if ok {
        Ok(())
    } else {
        Err(ServiceError::Validation(format!("{what} `{s}` is not an email address")))
    }
}

fn check_fluence(q: &QuantityValue) -> Result<()> {
    q.check()?;
    if q.kind() != QuantityKind::Fluence {
        return Err(ServiceError::Validation(format!("requested fluence has kind {:?}", q.kind())));
    }
    Ok(())
}

impl Service {
    pub fn open(root: impl Into<PathBuf>, namespaces: Namespaces) -> Result<Self> {
        Self::open_with_clock(root, namespaces, Arc::new(SystemClock))
    }

    pub fn open_with_clock(root: impl Into<PathBuf>, namespaces: Namespaces, clock: Arc<dyn Clock>) -> Result<Self> {
        let store = FileStore::open(root)?;
        let state = store.load()?;
        Ok(Service {
            store,
            clock,
            ontology: load_builtin_ontology(),
            namespaces,
            materials: MaterialTable::builtin(),
            state: RwLock::new(state),
        })
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn namespaces(&self) -> &Namespaces {
        &self.namespaces
    }

    pub fn store(&self) -> &FileStore {
        &self.store
    }

    fn read(&self) -> RwLockReadGuard<'_, Snapshot> {
        self.state.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write(&self) -> RwLockWriteGuard<'_, Snapshot> {
        self.state.write().unwrap_or_else(|e| e.into_inner())
    }

    /// The clock reading, never earlier than `prev`.
    fn stamp(&self, prev: Option<DateTime<Utc>>) -> DateTime<Utc> {
        let now = self.clock.now();
        match prev {
            Some(p) if p > now => p,
            _ => now,
        }
    }

    /// Bumps and persists a counter before the id is handed out, so ids
    /// are never reused, even after a failed write.
    fn next_id(&self, state: &mut Snapshot, prefix: &str) -> Result<String> {
        let mut counters = state.counters.clone();
        let n = counters.entry(prefix.to_string()).or_insert(0);
        *n += 1;
        let id = format!("{prefix}-{:06}", *n);
        self.store.save_counters(&counters)?;
        state.counters = counters;
        Ok(id)
    }

    fn audit(&self, user: &str, record_id: &str, version: u64, at: DateTime<Utc>, action: &str) -> Result<()> {
        self.store.append_audit(&AuditEntry {
            timestamp: at,
            user: user.to_string(),
            record_id: record_id.to_string(),
            version,
            action: action.to_string(),
        })?;
        Ok(())
    }

    fn is_staff(state: &Snapshot, facility: &Iri, user: &str) -> bool {
        state.roles.iter().any(|r| &r.facility == facility && r.user == user)
    }

    fn is_owner(state: &Snapshot, e: &ExperimentRecord, user: &str) -> bool {
        e.admin.involves(user) || Self::is_staff(state, &e.facility, user)
    }

    fn can_see(state: &Snapshot, e: &ExperimentRecord, user: &str) -> bool {
        e.visible || Self::is_owner(state, e, user)
    }

    fn experiment_for_write<'a>(state: &'a Snapshot, id: &str, user: &str) -> Result<&'a ExperimentRecord> {
        let e = state
            .experiments
            .get(id)
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))?;
        if !Self::is_owner(state, e, user) {
            return Err(ServiceError::Forbidden(format!("{user} does not take part in {id}")));
        }
        Ok(e)
    }

    // ---- roles and fields ----

    /// Records a facility role. Role management itself is not access
    /// controlled: it stands in for the facility's staff directory.
    pub fn assign_role(&self, facility: Iri, user: &str, role: FacilityRole) -> Result<()> {
        check_email("user", user)?;
        let mut state = self.write();
        let a = RoleAssignment {
            facility,
            user: user.to_string(),
            role,
        };
        if state.roles.contains(&a) {
            return Ok(());
        }
        let mut roles = state.roles.clone();
        roles.push(a);
        self.store.save_roles(&roles)?;
        state.roles = roles;
        Ok(())
    }

    pub fn roles(&self) -> Vec<RoleAssignment> {
        self.read().roles.clone()
    }

    pub fn fields(&self) -> Vec<FieldEntry> {
        self.read().fields.clone().unwrap_or_else(builtin_fields)
    }

    pub fn register_field(&self, entry: FieldEntry) -> Result<FieldEntry> {
        iedm_core::RadiationFieldSpec::new(
            entry.particles.clone(),
            entry
                .momentum_gev_per_c
                .map(|m| QuantityValue::in_default_unit(m, QuantityKind::RelativisticMomentum))
                .transpose()?,
        )?;
        let mut state = self.write();
        let mut fields = state.fields.clone().unwrap_or_else(builtin_fields);
        fields.retain(|f| f.iri != entry.iri);
        fields.push(entry.clone());
        fields.sort_by(|a, b| a.iri.cmp(&b.iri));
        self.store.save_fields(&fields)?;
        state.fields = Some(fields);
        Ok(entry)
    }

    // ---- experiments ----

    pub fn create_experiment(&self, req: NewExperiment, user: &str) -> Result<ExperimentRecord> {
        check_email("user", user)?;
        if req.title.trim().is_empty() {
            return Err(ServiceError::Validation("title is required".into()));
        }
        check_email("responsible", &req.admin.responsible)?;
        check_email("operator", &req.admin.operator)?;
        for e in req.admin.coordinator.iter().chain(&req.admin.manager) {
            check_email("role holder", e)?;
        }
        export::local_name(&req.title)?;
        let mut state = self.write();
        let id = self.next_id(&mut state, "EXP")?;
        let at = self.stamp(None);
        let rec = ExperimentRecord {
            id: id.clone(),
            title: req.title.trim().to_string(),
            facility: req.facility,
            irradiation_category: req.irradiation_category,
            technical_requirements: req.technical_requirements,
            admin: req.admin,
            dut_irradiations: Vec::new(),
            visible: req.visible,
            version: 1,
            last_update: at,
            last_updated_by: user.to_string(),
        };
        self.store.save_experiment(&rec)?;
        self.audit(user, &id, 1, at, "create")?;
        state.experiments.insert(id, rec.clone());
        Ok(rec)
    }

    pub fn get_experiment(&self, id: &str, user: &str) -> Result<ExperimentRecord> {
        let state = self.read();
        match state.experiments.get(id) {
            Some(e) if Self::can_see(&state, e, user) => Ok(e.clone()),
            _ => Err(ServiceError::NotFound(id.to_string())),
        }
    }

    pub fn list_experiments(&self, user: &str) -> Vec<ExperimentRecord> {
        let state = self.read();
        state
            .experiments
            .values()
            .filter(|e| Self::can_see(&state, e, user))
            .cloned()
            .collect()
    }

    /// Allowed for the experiment's responsible person and for the
    /// facility's managers and coordinators. Setting the current value
    /// succeeds without a new version.
    pub fn set_visibility(&self, id: &str, visible: bool, user: &str) -> Result<ExperimentRecord> {
        let mut state = self.write();
        let e = state
            .experiments
            .get(id)
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))?;
        let allowed = e.admin.responsible == user
            || e.admin.coordinator.as_deref() == Some(user)
            || e.admin.manager.as_deref() == Some(user)
            || Self::is_staff(&state, &e.facility, user);
        if !allowed {
            return Err(ServiceError::Forbidden(format!("{user} may not change the visibility of {id}")));
        }
        if e.visible == visible {
            return Ok(e.clone());
        }
        let mut e = e.clone();
        e.visible = visible;
        e.version += 1;
        e.last_update = self.stamp(Some(e.last_update));
        e.last_updated_by = user.to_string();
        self.store.save_experiment(&e)?;
        self.audit(user, id, e.version, e.last_update, "visibility")?;
        let ids: Vec<String> = state
            .samples
            .values()
            .filter(|s| s.experiment_id == id)
            .map(|s| s.id.clone())
            .collect();
        for sid in ids {
            let mut s = state.samples[&sid].clone();
            s.visible = visible;
            self.store.save_sample(&s)?;
            state.samples.insert(sid, s);
        }
        state.experiments.insert(id.to_string(), e.clone());
        Ok(e)
    }

    pub fn register_dut_irradiation(
        &self,
        exp_id: &str,
        dut_id: &str,
        field: &Iri,
        start: DateTime<Utc>,
        user: &str,
    ) -> Result<DutIrradiationRecord> {
        let mut state = self.write();
        let mut e = Self::experiment_for_write(&state, exp_id, user)?.clone();
        let sample = state
            .samples
            .get(dut_id)
            .ok_or_else(|| ServiceError::NotFound(dut_id.to_string()))?;
        if sample.experiment_id != exp_id {
            return Err(ServiceError::Validation(format!("{dut_id} belongs to {}", sample.experiment_id)));
        }
        let fields = state.fields.clone().unwrap_or_else(builtin_fields);
        if !fields.iter().any(|f| &f.iri == field) {
            return Err(ServiceError::UnknownField(field.clone()));
        }
        let id = self.next_id(&mut state, "IRR")?;
        let rec = DutIrradiationRecord {
            id,
            dut_id: dut_id.to_string(),
            radiation_field: field.clone(),
            start,
            end: None,
            cumulated: None,
        };
        e.dut_irradiations.push(rec.clone());
        e.version += 1;
        e.last_update = self.stamp(Some(e.last_update));
        e.last_updated_by = user.to_string();
        self.store.save_experiment(&e)?;
        self.audit(user, exp_id, e.version, e.last_update, &format!("register {}", rec.id))?;
        state.experiments.insert(exp_id.to_string(), e);
        Ok(rec)
    }

    pub fn complete_dut_irradiation(
        &self,
        exp_id: &str,
        rec_id: &str,
        end: DateTime<Utc>,
        cumulated: Option<QuantityValue>,
        user: &str,
    ) -> Result<DutIrradiationRecord> {
        let mut state = self.write();
        let mut e = Self::experiment_for_write(&state, exp_id, user)?.clone();
        let rec = e
            .dut_irradiations
            .iter_mut()
            .find(|r| r.id == rec_id)
            .ok_or_else(|| ServiceError::NotFound(rec_id.to_string()))?;
        if end < rec.start {
            return Err(ServiceError::TemporalOrder { start: rec.start, end });
        }
        if let Some(q) = &cumulated {
            q.check()?;
            if !q.kind().is_cumulated() {
                return Err(ServiceError::Validation(format!("{:?} is not a cumulated quantity", q.kind())));
            }
        }
        rec.end = Some(end);
        rec.cumulated = cumulated;
        let rec = rec.clone();
        e.version += 1;
        e.last_update = self.stamp(Some(e.last_update));
        e.last_updated_by = user.to_string();
        self.store.save_experiment(&e)?;
        self.audit(user, exp_id, e.version, e.last_update, &format!("complete {rec_id}"))?;
        state.experiments.insert(exp_id.to_string(), e);
        Ok(rec)
    }

    // ---- samples ----

    fn occupancy_of(&self, explicit: Option<OccupancyTriple>, layers: Option<&[LayerSpec]>) -> Result<Option<OccupancyTriple>> {
        if explicit.is_some() {
            return Ok(explicit);
        }
        match layers {
            Some(layers) => Ok(Some(self.occupancy(&self.stack(layers)?)?.occupancy)),
            None => Ok(None),
        }
    }

    pub fn stack(&self, layers: &[LayerSpec]) -> Result<LayerStack> {
        let layers = layers
            .iter()
            .map(|l| Layer::new(self.materials.material(&l.material)?, l.thickness_cm))
            .collect::<Result<Vec<_>, MaterialError>>()?;
        Ok(LayerStack::new(None, layers))
    }

    pub fn occupancy(&self, stack: &LayerStack) -> Result<OccupancyResult> {
        let t = OccupancyTriple::from_array(occupancy_triple(stack, &self.materials)?);
        Ok(OccupancyResult {
            report: t.report(),
            occupancy: t,
        })
    }

    pub fn materials(&self) -> &MaterialTable {
        &self.materials
    }

    pub fn create_sample(&self, req: NewSample, user: &str) -> Result<SampleRecord> {
        check_email("user", user)?;
        check_fluence(&req.requested_fluence)?;
        if req.name.trim().is_empty() {
            return Err(ServiceError::Validation("name is required".into()));
        }
        let occupancy = self.occupancy_of(req.occupancy, req.layers.as_deref())?;
        let mut state = self.write();
        let e = match state.experiments.get(&req.experiment_id) {
            Some(e) => e,
            None => return Err(ServiceError::UnknownExperiment(req.experiment_id)),
        };
        if !Self::is_owner(&state, e, user) {
            return Err(ServiceError::Forbidden(format!("{user} does not take part in {}", e.id)));
        }
        let visible = e.visible;
        let id = self.next_id(&mut state, "SET")?;
        let at = self.stamp(None);
        let rec = SampleRecord {
            id: id.clone(),
            name: req.name.trim().to_string(),
            category_note: req.category_note,
            requested_fluence: req.requested_fluence,
            occupancy_report: occupancy.map(|o| o.report()).unwrap_or_default(),
            occupancy,
            last_update: at,
            last_updated_by: user.to_string(),
            experiment_id: req.experiment_id,
            visible,
            version: 1,
        };
        self.store.save_sample(&rec)?;
        self.audit(user, &id, 1, at, "create")?;
        state.samples.insert(id, rec.clone());
        Ok(rec)
    }

    pub fn get_sample(&self, id: &str, user: &str) -> Result<SampleRecord> {
        let state = self.read();
        let s = state.samples.get(id).ok_or_else(|| ServiceError::NotFound(id.to_string()))?;
        match state.experiments.get(&s.experiment_id) {
            Some(e) if Self::can_see(&state, e, user) => Ok(s.clone()),
            _ => Err(ServiceError::NotFound(id.to_string())),
        }
    }

    /// Applies `patch` if `expected_version` is current; the stored record
    /// is untouched on any error.
    pub fn update_sample(&self, id: &str, patch: SamplePatch, user: &str, expected_version: u64) -> Result<SampleRecord> {
        check_email("user", user)?;
        if let Some(q) = &patch.requested_fluence {
            check_fluence(q)?;
        }
        if patch.name.as_deref().is_some_and(|n| n.trim().is_empty()) {
            return Err(ServiceError::Validation("name is required".into()));
        }
        let occupancy = self.occupancy_of(patch.occupancy, patch.layers.as_deref())?;
        let mut state = self.write();
        let current = state.samples.get(id).ok_or_else(|| ServiceError::NotFound(id.to_string()))?;
        let e = state
            .experiments
            .get(&current.experiment_id)
            .ok_or_else(|| ServiceError::UnknownExperiment(current.experiment_id.clone()))?;
        if !Self::is_owner(&state, e, user) {
            return Err(if Self::can_see(&state, e, user) {
                ServiceError::Forbidden(format!("{user} does not take part in {}", e.id))
            } else {
                ServiceError::NotFound(id.to_string())
            });
        }
        if current.version != expected_version {
            return Err(ServiceError::VersionConflict {
                id: id.to_string(),
                expected: expected_version,
                actual: current.version,
            });
        }
        let mut s = current.clone();
        if let Some(n) = patch.name {
            s.name = n.trim().to_string();
        }
        if let Some(c) = patch.category_note {
            s.category_note = c;
        }
        if let Some(q) = patch.requested_fluence {
            s.requested_fluence = q;
        }
        if let Some(o) = occupancy {
            s.occupancy = Some(o);
            s.occupancy_report = o.report();
        }
        s.version += 1;
        s.last_update = self.stamp(Some(s.last_update));
        s.last_updated_by = user.to_string();
        self.store.save_sample(&s)?;
        self.audit(user, id, s.version, s.last_update, "update")?;
        state.samples.insert(id.to_string(), s.clone());
        Ok(s)
    }

    /// Case-insensitive substring search on id and name over the samples
    /// `user` may see, newest first (ties by id), 1-based pages.
    pub fn list_samples(&self, q: &SampleQuery, user: &str) -> Result<Page<SampleRecord>> {
        let page = q.page.unwrap_or(1);
        let page_size = q.page_size.unwrap_or(DEFAULT_PAGE_SIZE);
        if !(1..=MAX_PAGE_SIZE).contains(&page_size) {
            return Err(ServiceError::Validation(format!("pageSize must be in 1..={MAX_PAGE_SIZE}")));
        }
        if page == 0 {
            return Err(ServiceError::Validation("pages start at 1".into()));
        }
        let needle = q.query.trim().to_lowercase();
        let state = self.read();
        let mut hits: Vec<&SampleRecord> = state
            .samples
            .values()
            .filter(|s| q.experiment_id.as_ref().is_none_or(|e| &s.experiment_id == e))
            .filter(|s| {
                state
                    .experiments
                    .get(&s.experiment_id)
                    .is_some_and(|e| Self::can_see(&state, e, user))
            })
            .filter(|s| {
                needle.is_empty() || s.id.to_lowercase().contains(&needle) || s.name.to_lowercase().contains(&needle)
            })
            .collect();
        hits.sort_by(|a, b| b.last_update.cmp(&a.last_update).then_with(|| a.id.cmp(&b.id)));
        let total = hits.len();
        let items = hits
            .into_iter()
            .skip((page - 1).saturating_mul(page_size))
            .take(page_size)
            .cloned()
            .collect();
        Ok(Page {
            items,
            total,
            page,
            page_size,
        })
    }

    // ---- ontology views ----

    /// Builds and validates the experiment's dataset in draft mode. Any
    /// violation that draft mode does not soften fails the export.
    pub fn export_experiment(&self, id: &str, user: Option<&str>) -> Result<Export> {
        let state = self.read();
        let e = match state.experiments.get(id) {
            Some(e) if user.is_none_or(|u| Self::can_see(&state, e, u)) => e,
            _ => return Err(ServiceError::NotFound(id.to_string())),
        };
        let fields = state.fields.clone().unwrap_or_else(builtin_fields);
        let ds = export::experiment_dataset(e, &state.samples, &fields, &self.ontology)?;
        let report = validate_dataset_with(&ds, &self.ontology, ValidationOptions::draft());
        if !report.violations.is_empty() {
            return Err(ServiceError::ExportInvalid {
                id: id.to_string(),
                report: Box::new(report),
            });
        }
        let graph = iedm_core::rdf::graph_from_dataset(&ds, &self.namespaces);
        Ok(Export {
            turtle: iedm_core::rdf::serialize_turtle(&graph),
            warnings: report.warnings,
        })
    }

    pub fn validate_turtle(&self, text: &str, draft: bool) -> Result<ValidationOutcome> {
        let g = parse_turtle_with(text, &self.namespaces)?;
        let (ds, warnings) = dataset_from_graph(&g, &self.ontology);
        let report = validate_dataset_with(&ds, &self.ontology, ValidationOptions { draft });
        Ok(ValidationOutcome {
            report,
            import_warnings: warnings.iter().map(ImportWarning::to_string).collect(),
        })
    }

    /// Validates a Turtle document strictly and files its canonical form
    /// under `imports/`. Records are not derived from imported graphs.
    pub fn import_turtle(&self, name: &str, text: &str, user: &str) -> Result<(PathBuf, Vec<String>)> {
        check_email("user", user)?;
        let name = export::local_name(name)?;
        let g = parse_turtle_with(text, &self.namespaces)?;
        let (ds, warnings) = dataset_from_graph(&g, &self.ontology);
        let report = validate_dataset_with(&ds, &self.ontology, ValidationOptions::default());
        if !report.violations.is_empty() {
            return Err(ServiceError::ImportInvalid { report: Box::new(report) });
        }
        let turtle = iedm_core::rdf::serialize_turtle(&iedm_core::rdf::graph_from_dataset(&ds, &self.namespaces));
        let _guard = self.write();
        let path = self.store.save_import(&name, &turtle)?;
        self.audit(user, &name, 1, self.clock.now(), "import")?;
        Ok((path, warnings.iter().map(ImportWarning::to_string).collect()))
    }

    pub fn form_schema(&self, class: &Iri) -> Result<FormSchema> {
        Ok(form_schema(class, &self.ontology)?)
    }

    pub fn audit_log(&self) -> Result<Vec<AuditEntry>> {
        Ok(self.store.audit_log()?)
    }
}
