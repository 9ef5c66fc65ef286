//! Minimal valid witnesses per class and single-restriction mutants.

use crate::ontology::{Dataset, Iri, Ontology, OntologyError, Restriction, RestrictionKind};

use super::Rule;

const MAX_DEPTH: usize = 16;

struct Builder<'a> {
    o: &'a Ontology,
    ds: Dataset,
    next: usize,
}

impl Builder<'_> {
    fn fresh(&mut self, class: &Iri) -> Iri {
        self.next += 1;
        Iri::iedm(&format!("_w{}_{}", self.next, class.local()))
    }

    fn build(&mut self, class: &Iri, depth: usize) -> Result<Iri, OntologyError> {
        let iri = self.fresh(class);
        self.ds.mint_individual(self.o, class, iri.clone())?;
        // a bare user role is only valid on a person
        let user = Iri::iedm("User");
        if self.o.is_subclass_of(class, &Iri::expo("User"))? && !self.o.is_subclass_of(class, &user)? {
            self.ds.ensure_individual(self.o, &user, iri.clone())?;
        }
        if depth >= MAX_DEPTH {
            return Ok(iri);
        }
        for r in self.o.effective_restrictions(class)? {
            for _ in 0..r.cardinality {
                let target = self.build(&r.filler, depth + 1)?;
                self.ds.assert_statement(self.o, &iri, &r.on_property, target)?;
            }
        }
        Ok(iri)
    }
}

/// A dataset with one individual of `class` and just enough related
/// individuals to satisfy every effective restriction. Returns the dataset
/// and the root individual.
pub fn minimal_witness(o: &Ontology, class: &Iri) -> Result<(Dataset, Iri), OntologyError> {
    let mut b = Builder {
        o,
        ds: Dataset::new(),
        next: 0,
    };
    let root = b.build(o.resolve_class(class)?, 0)?;
    Ok((b.ds, root))
}

/// A witness broken in exactly one restriction.
#[derive(Debug, Clone)]
pub struct Mutant {
    pub class: Iri,
    pub restriction: Restriction,
    /// `true` for an added surplus target, `false` for a removed one.
    pub over: bool,
    pub subject: Iri,
    pub expected_rule: Rule,
    pub original: Dataset,
    pub mutated: Dataset,
}

/// One under-count mutant for every declared restriction with cardinality
/// at least 1, plus an over-count mutant for every exact restriction.
/// `min 0` restrictions cannot be violated and yield none.
pub fn seed_mutants(o: &Ontology) -> Result<Vec<Mutant>, OntologyError> {
    let mut out = Vec::new();
    for def in o.classes() {
        for r in &def.restrictions {
            if r.cardinality == 0 {
                continue;
            }
            let rule = match r.kind {
                RestrictionKind::Exactly => Rule::CardinalityExact,
                RestrictionKind::Min => Rule::CardinalityMin,
            };
            let mut b = Builder {
                o,
                ds: Dataset::new(),
                next: 0,
            };
            let subject = b.build(&def.iri, 0)?;
            let original = b.ds.clone();

            // drop one matching target
            let mut under = original.clone();
            let victim = original
                .get(&subject)
                .expect("root")
                .targets(&r.on_property)
                .find(|t| {
                    original
                        .get(t)
                        .is_some_and(|t| o.any_subclass_of(t.types(), &r.filler))
                })
                .cloned()
                .expect("witness satisfies its restrictions");
            under.get_mut(&subject).expect("root").retract(&r.on_property, &victim);
            out.push(Mutant {
                class: def.iri.clone(),
                restriction: r.clone(),
                over: false,
                subject: subject.clone(),
                expected_rule: rule,
                original: original.clone(),
                mutated: under,
            });

            if r.kind == RestrictionKind::Exactly {
                let extra = b.build(&r.filler, 1)?;
                b.ds.assert_statement(o, &subject, &r.on_property, extra)?;
                out.push(Mutant {
                    class: def.iri.clone(),
                    restriction: r.clone(),
                    over: true,
                    subject,
                    expected_rule: rule,
                    original,
                    mutated: b.ds,
                });
            }
        }
    }
    Ok(out)
}
