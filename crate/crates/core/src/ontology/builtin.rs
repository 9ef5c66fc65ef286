//! The embedded irradiation-experiment T-Box.
//!
//! Upstream classes (EXPO, OM, FOAF) are mirrored only as named anchors and
//! frozen once loading completes. Everything irradiation-specific lives in
//! the `iedm` namespace and hangs below an anchor.

use super::{ClassDef, FormHint, Iri, Ontology, OntologyError, PropertyDef, Restriction};

const MIRROR_NOTE: &str = "mirror anchor: name only, upstream definition not imported";

fn mirror(iri: Iri, label: &str, parent: Option<Iri>) -> ClassDef {
    let mut def = ClassDef::new(iri, label).mirror().comment(MIRROR_NOTE);
    if let Some(p) = parent {
        def = def.sub_of(p);
    }
    def
}

fn exactly(p: &str, n: u32, filler: Iri) -> Restriction {
    Restriction::exactly(Iri::iedm(p), n, filler).expect("positive cardinality")
}

fn min(p: &str, n: u32, filler: Iri) -> Restriction {
    Restriction::min(Iri::iedm(p), n, filler)
}

fn object_properties() -> Vec<PropertyDef> {
    let p = |local: &str, label: &str, comment: &str| PropertyDef::object(Iri::iedm(local), label).comment(comment);
    let mut props = vec![
        p("hasIrradiationCategory", "irradiation category", "procedure category of an irradiation experiment"),
        p("hasResult", "result", "cumulated quantity reached by an experiment or a DUT irradiation"),
        p("hasPart", "DUT irradiation", "DUT irradiations composing an irradiation experiment"),
        p("hasRadiationField", "radiation field", "field a DUT is exposed to"),
        p("hasDUT", "device under test", "the single DUT of a DUT irradiation"),
        p("hasStartTime", "start time", "start of the radiation exposure"),
        p("hasEndTime", "end time", "completion of the radiation exposure"),
        p("performedAt", "irradiation facility", "facility hosting an irradiation experiment"),
        p("hasRole", "role holder", "person holding a role in an experiment"),
        p("hasUnit", "unit", "unit of a quantity individual"),
        p("hasParticle", "particle", "particle species composing a radiation field"),
        p("hasMomentum", "beam momentum", "relativistic momentum of a beam"),
        p("measuredBy", "measured by", "object, typically a dosimeter, that measured a quantity"),
        p("installedBy", "installed by", "operator who installed an experiment object"),
    ];
    let mut has_part = PropertyDef::object(Iri::expo("HasPart"), "administrative information")
        .comment("mirrored upstream part-of relation; used for the administrative part of an experiment");
    has_part.mirror = true;
    props.push(has_part);
    let mut error = PropertyDef::object(Iri::expo("MeasurementError"), "measurement error")
        .comment("mirrored upstream relation from a quantity to its error individual");
    error.mirror = true;
    props.push(error);
    props
}

fn mirror_classes() -> Vec<ClassDef> {
    let thing = || Some(Iri::owl("Thing"));
    vec![
        ClassDef::new(Iri::owl("Thing"), "thing").mirror(),
        mirror(Iri::expo("Object"), "object", thing()),
        mirror(Iri::expo("AbstractObject"), "abstract object", thing()),
        mirror(Iri::expo("ScientificExperiment"), "scientific experiment", thing()),
        mirror(Iri::expo("ProcedureExecuteExperiment"), "experiment procedure", thing()),
        mirror(Iri::expo("AdminInfoExperiment"), "administrative information", thing()),
        mirror(Iri::expo("Agent"), "agent", thing()),
        mirror(Iri::expo("SentientAgent"), "sentient agent", Some(Iri::expo("Agent"))),
        mirror(Iri::expo("SubjectRole"), "subject role", thing()),
        mirror(Iri::expo("User"), "user role", Some(Iri::expo("SubjectRole"))),
        mirror(Iri::expo("Quantity"), "quantity", thing()),
        mirror(Iri::om("Quantity"), "quantity", thing()),
        mirror(Iri::om("Energy"), "energy", Some(Iri::om("Quantity"))),
        mirror(Iri::om("AbsorbedDose"), "absorbed dose", Some(Iri::om("Quantity"))),
        mirror(Iri::om("Activity"), "activity", Some(Iri::om("Quantity"))),
        mirror(Iri::om("Unit"), "unit", thing()),
        mirror(Iri::foaf("Agent"), "agent", thing()),
    ]
}

fn iedm_classes() -> Vec<ClassDef> {
    let c = |local: &str, label: &str| ClassDef::new(Iri::iedm(local), label);
    vec![
        // radiation field
        c("Particle", "particle").sub_of(Iri::expo("Object")),
        c("RadiationField", "radiation field")
            .sub_of(Iri::expo("Object"))
            .hint(FormHint::Reference),
        c("SingularField", "singular field")
            .sub_of(Iri::iedm("RadiationField"))
            .restricted(exactly("hasParticle", 1, Iri::iedm("Particle")))
            .restricted(min("hasMomentum", 0, Iri::iedm("RelativisticMomentum")))
            .note("hasParticle exactly 1: one particle species"),
        c("MixedField", "mixed field")
            .sub_of(Iri::iedm("RadiationField"))
            .restricted(min("hasParticle", 2, Iri::iedm("Particle")))
            .restricted(min("hasMomentum", 0, Iri::iedm("RelativisticMomentum")))
            .note("hasParticle min 2: two or more particle species"),
        // quantities
        c("DosimetricQuantity", "dosimetric quantity").sub_of(Iri::om("Quantity")),
        c("CumulatedQuantity", "cumulated quantity")
            .sub_of(Iri::iedm("DosimetricQuantity"))
            .restricted(exactly("hasUnit", 1, Iri::om("Unit")))
            .restricted(Restriction::min(Iri::expo("MeasurementError"), 0, Iri::expo("Quantity")))
            .restricted(min("measuredBy", 0, Iri::iedm("IrradiationExperimentObject")))
            .note("hasUnit exactly 1: a value is meaningless without its unit"),
        c("Fluence", "fluence")
            .sub_of(Iri::iedm("CumulatedQuantity"))
            .comment("number of particles received per unit area"),
        c("AbsorbedDose", "absorbed dose")
            .sub_of(Iri::iedm("CumulatedQuantity"))
            .sub_of(Iri::om("AbsorbedDose")),
        c("RelativisticMomentum", "relativistic momentum")
            .sub_of(Iri::om("Quantity"))
            .restricted(exactly("hasUnit", 1, Iri::om("Unit"))),
        c("InteractionLength", "interaction length").sub_of(Iri::om("Quantity")),
        c("InteractionLengthOccupancy", "interaction length occupancy").sub_of(Iri::om("Quantity")),
        c("TimePosition", "time position")
            .sub_of(Iri::expo("AbstractObject"))
            .hint(FormHint::Datetime),
        // objects
        c("IrradiationExperimentObject", "irradiation experiment object")
            .sub_of(Iri::expo("Object"))
            .restricted(min("installedBy", 0, Iri::iedm("Operator")))
            .hint(FormHint::Reference),
        c("DUT", "device under test")
            .sub_of(Iri::iedm("IrradiationExperimentObject"))
            .hint(FormHint::Reference),
        c("Element", "element").sub_of(Iri::expo("Object")),
        c("Compound", "compound").sub_of(Iri::expo("Object")),
        c("Layer", "layer").sub_of(Iri::expo("Object")),
        c("IrradiationFacility", "irradiation facility")
            .sub_of(Iri::expo("Object"))
            .hint(FormHint::Reference),
        // procedures and administration
        c("PassiveStandardIrradiation", "passive standard irradiation").sub_of(Iri::expo("ProcedureExecuteExperiment")),
        c("PassiveCustomIrradiation", "passive custom irradiation").sub_of(Iri::expo("ProcedureExecuteExperiment")),
        c("ActiveIrradiation", "active irradiation").sub_of(Iri::expo("ProcedureExecuteExperiment")),
        c("TechnicalRequirements", "technical requirements").sub_of(Iri::expo("AbstractObject")),
        // users and roles
        c("User", "user").sub_of(Iri::expo("SentientAgent")).sub_of(Iri::foaf("Agent")),
        c("IrradiationFacilityCoordinator", "irradiation facility coordinator")
            .sub_of(Iri::expo("User"))
            .sub_of(Iri::iedm("User"))
            .hint(FormHint::Reference),
        c("IrradiationFacilityManager", "irradiation facility manager")
            .sub_of(Iri::expo("User"))
            .sub_of(Iri::iedm("User"))
            .hint(FormHint::Reference),
        c("IrradiationFacilityUser", "irradiation facility user")
            .sub_of(Iri::expo("User"))
            .sub_of(Iri::iedm("User"))
            .hint(FormHint::Reference),
        c("Operator", "operator")
            .sub_of(Iri::iedm("IrradiationFacilityUser"))
            .hint(FormHint::Reference),
        c("ResponsiblePerson", "responsible person")
            .sub_of(Iri::iedm("IrradiationFacilityUser"))
            .hint(FormHint::Reference),
        c("AdminInfoIrradiationExperiment", "administrative information")
            .sub_of(Iri::expo("AdminInfoExperiment"))
            .restricted(exactly("hasRole", 1, Iri::iedm("ResponsiblePerson")))
            .restricted(min("hasRole", 1, Iri::iedm("Operator")))
            .restricted(min("hasRole", 0, Iri::iedm("IrradiationFacilityCoordinator")))
            .restricted(min("hasRole", 0, Iri::iedm("IrradiationFacilityManager")))
            .note("hasRole exactly 1 ResponsiblePerson: one person in charge")
            .note("hasRole min 1 Operator: existential, several operators may share an experiment"),
        // experiments
        c("DUTIrradiation", "DUT irradiation")
            .sub_of(Iri::expo("ScientificExperiment"))
            .restricted(exactly("hasDUT", 1, Iri::iedm("DUT")))
            .restricted(exactly("hasStartTime", 1, Iri::iedm("TimePosition")))
            .restricted(exactly("hasEndTime", 1, Iri::iedm("TimePosition")))
            .restricted(exactly("hasRadiationField", 1, Iri::iedm("RadiationField")))
            .restricted(min("hasResult", 0, Iri::iedm("CumulatedQuantity")))
            .note("hasDUT exactly 1: one and only one DUT")
            .note("hasStartTime/hasEndTime exactly 1: the two points in time of the exposure")
            .note("hasRadiationField exactly 1: one field per exposure")
            .hint(FormHint::Subform),
        c("IrradiationExperiment", "irradiation experiment")
            .sub_of(Iri::expo("ScientificExperiment"))
            .restricted(exactly("hasIrradiationCategory", 1, Iri::expo("ProcedureExecuteExperiment")))
            .restricted(Restriction::some(Iri::iedm("hasResult"), Iri::iedm("CumulatedQuantity")))
            .restricted(
                Restriction::exactly(Iri::expo("HasPart"), 1, Iri::iedm("AdminInfoIrradiationExperiment"))
                    .expect("positive"),
            )
            .restricted(Restriction::some(Iri::iedm("hasPart"), Iri::iedm("DUTIrradiation")))
            .restricted(exactly("performedAt", 1, Iri::iedm("IrradiationFacility")))
            .note("hasIrradiationCategory exactly 1: one procedure category")
            .note("hasResult some: existential, open-world")
            .note("expo:HasPart exactly 1: one administrative record")
            .note("hasPart some DUTIrradiation: existential, one or more DUT irradiations")
            .note("performedAt exactly 1: one hosting facility"),
    ]
}

/// Builds the frozen built-in T-Box.
pub fn load_builtin_ontology() -> Ontology {
    build().expect("built-in T-Box is well formed")
}

fn build() -> Result<Ontology, OntologyError> {
    let mut o = Ontology::empty();
    o.define_data_property(Ontology::has_value(), "value");
    for p in object_properties() {
        o.define_property(p)?;
    }
    for def in mirror_classes() {
        o.define_class(def)?;
    }
    // defined in two passes so forward references in restrictions resolve
    let iedm = iedm_classes();
    let mut pending = iedm.clone();
    for def in &mut pending {
        def.restrictions.clear();
    }
    // parents first: repeat until every class is placed
    while !pending.is_empty() {
        let before = pending.len();
        let mut rest = Vec::new();
        for def in pending {
            if def.superclasses.iter().all(|s| o.class(s).is_some()) {
                o.define_class(def)?;
            } else {
                rest.push(def);
            }
        }
        if rest.len() == before {
            return Err(OntologyError::UnknownClass(rest[0].iri.clone()));
        }
        pending = rest;
    }
    for def in iedm {
        for r in def.restrictions {
            o.add_restriction(&def.iri, r)?;
        }
    }
    o.add_class_alias(Iri::iedm("DUTirradiation"), &Iri::iedm("DUTIrradiation"))?;
    o.add_class_alias(Iri::iedm("DUTirradiationExperiment"), &Iri::iedm("DUTIrradiation"))?;
    o.freeze_foreign();
    Ok(o)
}
