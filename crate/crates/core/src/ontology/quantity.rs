use serde::{Deserialize, Serialize};

use super::{Dataset, Iri, Literal, Ontology, OntologyError};
use crate::Scalar;

/// The quantity classes a [`QuantityValue`] may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QuantityKind {
    Fluence,
    AbsorbedDose,
    Energy,
    Activity,
    RelativisticMomentum,
}

impl QuantityKind {
    pub fn iri(self) -> Iri {
        match self {
            QuantityKind::Fluence => Iri::iedm("Fluence"),
            QuantityKind::AbsorbedDose => Iri::om("AbsorbedDose"),
            QuantityKind::Energy => Iri::om("Energy"),
            QuantityKind::Activity => Iri::om("Activity"),
            QuantityKind::RelativisticMomentum => Iri::iedm("RelativisticMomentum"),
        }
    }

    pub fn from_iri(iri: &Iri) -> Option<QuantityKind> {
        [
            QuantityKind::Fluence,
            QuantityKind::AbsorbedDose,
            QuantityKind::Energy,
            QuantityKind::Activity,
            QuantityKind::RelativisticMomentum,
        ]
        .into_iter()
        .find(|k| &k.iri() == iri)
    }

    pub fn is_non_negative(self) -> bool {
        matches!(self, QuantityKind::Fluence | QuantityKind::AbsorbedDose | QuantityKind::Activity)
    }

    /// Whether this kind is a cumulated dosimetric quantity.
    pub fn is_cumulated(self) -> bool {
        matches!(self, QuantityKind::Fluence | QuantityKind::AbsorbedDose)
    }

    /// Class asserted on exported individuals. Absorbed dose maps onto the
    /// iedm variant, which specializes both `om:AbsorbedDose` and
    /// `iedm:CumulatedQuantity`.
    pub fn individual_class(self) -> Iri {
        match self {
            QuantityKind::AbsorbedDose => Iri::iedm("AbsorbedDose"),
            other => other.iri(),
        }
    }

    pub fn default_unit(self) -> Iri {
        match self {
            QuantityKind::Fluence => units::per_square_centimetre(),
            QuantityKind::AbsorbedDose => units::gray(),
            QuantityKind::Energy => Iri::om("gigaelectronvolt"),
            QuantityKind::Activity => Iri::om("becquerel"),
            QuantityKind::RelativisticMomentum => units::gev_per_c(),
        }
    }
}

/// Unit names used by the built-in data.
pub mod units {
    use super::Iri;

    pub fn per_square_centimetre() -> Iri {
        Iri::om("reciprocalSquareCentimetre")
    }

    pub fn gev_per_c() -> Iri {
        Iri::om("gigaelectronvoltPerSpeedOfLight")
    }

    pub fn gray() -> Iri {
        Iri::om("gray")
    }
}

/// A unit-tagged value with an optional relative measurement error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QuantityValue<T> {
    value: T,
    kind: QuantityKind,
    unit: Iri,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    relative_error: Option<T>,
}

impl<T: Scalar> QuantityValue<T> {
    pub fn new(value: T, kind: QuantityKind, unit: Iri, relative_error: Option<T>) -> Result<Self, OntologyError> {
        let q = QuantityValue {
            value,
            kind,
            unit,
            relative_error,
        };
        q.check()?;
        Ok(q)
    }

    /// Value in the kind's default unit.
    pub fn in_default_unit(value: T, kind: QuantityKind) -> Result<Self, OntologyError> {
        Self::new(value, kind, kind.default_unit(), None)
    }

    pub fn with_relative_error(mut self, error: T) -> Result<Self, OntologyError> {
        self.relative_error = Some(error);
        self.check()?;
        Ok(self)
    }

    /// Re-checks the invariants, e.g. after deserialization.
    pub fn check(&self) -> Result<(), OntologyError> {
        if !self.value.is_finite() || (self.kind.is_non_negative() && self.value < T::zero()) {
            return Err(OntologyError::QuantityOutOfRange(format!(
                "{} value {} must be finite and non-negative",
                self.kind.iri(),
                self.value
            )));
        }
        if let Some(e) = self.relative_error {
            if !(e >= T::zero() && e <= T::one()) {
                return Err(OntologyError::QuantityOutOfRange(format!("relative error {e} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn kind(&self) -> QuantityKind {
        self.kind
    }

    pub fn unit(&self) -> &Iri {
        &self.unit
    }

    pub fn relative_error(&self) -> Option<T> {
        self.relative_error
    }

    /// Records this quantity as individual `iri`: typed by its kind, with
    /// `iedm:hasValue`, `iedm:hasUnit` and, when present, an
    /// `expo:MeasurementError` individual named after the percentage
    /// (e.g. `_7_per_cent`). Unit and error individuals are created on demand.
    pub fn assert_into(&self, ds: &mut Dataset, o: &Ontology, iri: &Iri) -> Result<(), OntologyError> {
        let value = self.value.to_f64().unwrap_or(f64::NAN);
        ds.ensure_individual(o, &self.kind.individual_class(), iri.clone())?
            .assert_statement(&Ontology::has_value(), Literal::double(value), o)?;
        ds.ensure_individual(o, &Iri::om("Unit"), self.unit.clone())?;
        ds.assert_statement(o, iri, &Iri::iedm("hasUnit"), self.unit.clone())?;
        if let Some(err) = self.relative_error {
            let err = err.to_f64().unwrap_or(f64::NAN);
            let error_iri = Iri::iedm(&error_local_name(err));
            let lexical = format!("{}", (err * 1e12).round() / 1e12);
            ds.ensure_individual(o, &Iri::expo("Quantity"), error_iri.clone())?
                .assert_statement(&Ontology::has_value(), Literal::new(lexical, super::Datatype::Decimal)?, o)?;
            ds.assert_statement(o, iri, &Iri::expo("MeasurementError"), error_iri)?;
        }
        Ok(())
    }
}

/// `_7_per_cent` for 0.07.
pub fn error_local_name(fraction: f64) -> String {
    let pct = (fraction * 1e6).round() / 1e4;
    format!("_{pct}_per_cent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_and_error_bounds() {
        let fluence = QuantityValue::in_default_unit(3e17, QuantityKind::Fluence).unwrap();
        assert_eq!(fluence.unit(), &Iri::om("reciprocalSquareCentimetre"));
        let with_err = fluence.clone().with_relative_error(0.07).unwrap();
        assert_eq!(with_err.relative_error(), Some(0.07));
        assert!(fluence.clone().with_relative_error(1.5).is_err());
        assert!(QuantityValue::in_default_unit(-1.0, QuantityKind::Fluence).is_err());
        assert!(QuantityValue::in_default_unit(-1.0f32, QuantityKind::Activity).is_err());
        assert!(QuantityValue::in_default_unit(-1.0, QuantityKind::Energy).is_ok());
        assert!(QuantityValue::in_default_unit(f64::NAN, QuantityKind::Energy).is_err());
    }

    #[test]
    fn kinds_map_to_classes() {
        for k in [QuantityKind::Fluence, QuantityKind::AbsorbedDose, QuantityKind::RelativisticMomentum] {
            assert_eq!(QuantityKind::from_iri(&k.iri()), Some(k));
        }
        assert_eq!(QuantityKind::AbsorbedDose.individual_class(), Iri::iedm("AbsorbedDose"));
    }

    #[test]
    fn error_names() {
        assert_eq!(error_local_name(0.07), "_7_per_cent");
        assert_eq!(error_local_name(0.075), "_7.5_per_cent");
        assert_eq!(error_local_name(0.0), "_0_per_cent");
    }

    #[test]
    fn asserted_quantity_shape() {
        let o = crate::load_builtin_ontology();
        let mut ds = Dataset::new();
        let q = QuantityValue::in_default_unit(3e17, QuantityKind::Fluence)
            .unwrap()
            .with_relative_error(0.07)
            .unwrap();
        let iri = Iri::iedm("_3e17_protons_per_square_cm");
        q.assert_into(&mut ds, &o, &iri).unwrap();
        let ind = ds.get(&iri).unwrap();
        assert!(ind.types().contains(&Iri::iedm("Fluence")));
        assert_eq!(ind.values().next().unwrap().lexical(), "3e17");
        assert_eq!(ind.targets(&Iri::expo("MeasurementError")).next(), Some(&Iri::iedm("_7_per_cent")));
        assert_eq!(ds.get(&Iri::iedm("_7_per_cent")).unwrap().values().next().unwrap().lexical(), "0.07");
        assert!(ds.contains(&Iri::om("reciprocalSquareCentimetre")));
    }
}
