use super::{Dataset, Iri, Ontology, OntologyError, QuantityKind, QuantityValue};
use crate::Scalar;

/// Convenience view over a radiation field individual.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationFieldSpec<T> {
    particles: Vec<Iri>,
    beam_momentum: Option<QuantityValue<T>>,
}

impl<T: Scalar> RadiationFieldSpec<T> {
    /// Rejects an empty particle list and a momentum of the wrong kind.
    /// Duplicate particle names collapse.
    pub fn new(particles: Vec<Iri>, beam_momentum: Option<QuantityValue<T>>) -> Result<Self, OntologyError> {
        let mut particles = particles;
        particles.sort();
        particles.dedup();
        if particles.is_empty() {
            return Err(OntologyError::InvalidField("a radiation field needs at least one particle".into()));
        }
        if let Some(m) = &beam_momentum {
            if m.kind() != QuantityKind::RelativisticMomentum {
                return Err(OntologyError::InvalidField(format!(
                    "beam momentum must be {}, got {}",
                    QuantityKind::RelativisticMomentum.iri(),
                    m.kind().iri()
                )));
            }
        }
        Ok(RadiationFieldSpec {
            particles,
            beam_momentum,
        })
    }

    pub fn particles(&self) -> &[Iri] {
        &self.particles
    }

    pub fn beam_momentum(&self) -> Option<&QuantityValue<T>> {
        self.beam_momentum.as_ref()
    }

    /// `iedm:SingularField` for one particle species, `iedm:MixedField` otherwise.
    pub fn classification(&self) -> Iri {
        if self.particles.len() == 1 {
            Iri::iedm("SingularField")
        } else {
            Iri::iedm("MixedField")
        }
    }

    /// Writes the field, its particles and its momentum into `ds`.
    pub fn assert_into(&self, ds: &mut Dataset, o: &Ontology, iri: &Iri) -> Result<(), OntologyError> {
        ds.ensure_individual(o, &self.classification(), iri.clone())?;
        for p in &self.particles {
            ds.ensure_individual(o, &Iri::iedm("Particle"), p.clone())?;
            ds.assert_statement(o, iri, &Iri::iedm("hasParticle"), p.clone())?;
        }
        if let Some(m) = &self.beam_momentum {
            let value = m.value().to_f64().unwrap_or(f64::NAN);
            let m_iri = Iri::new(iri.prefix(), format!("_{value}_GeV_per_c"))?;
            m.assert_into(ds, o, &m_iri)?;
            ds.assert_statement(o, iri, &Iri::iedm("hasMomentum"), m_iri)?;
        }
        Ok(())
    }
}
