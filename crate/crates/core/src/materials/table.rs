use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MaterialError;
use crate::Scalar;

const ELEMENTS: &str = include_str!("../../data/elements.tsv");
const COMPOUNDS: &str = include_str!("../../data/compounds.tsv");

/// Tabulated properties of one element. Lengths are in g/cm².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementProps<T> {
    pub symbol: String,
    #[serde(rename = "Z")]
    pub z: u32,
    #[serde(rename = "A")]
    pub a: T,
    pub density: T,
    #[serde(rename = "X0")]
    pub x0: T,
    pub lambda_t: T,
    pub lambda_i: T,
    pub source: String,
}

impl<T: Scalar> ElementProps<T> {
    pub fn check(&self) -> Result<(), MaterialError> {
        let bad = |what: &str| Err(MaterialError::InvalidProperty(format!("{}: {what}", self.symbol)));
        if self.z < 1 {
            return bad("Z must be at least 1");
        }
        for v in [self.a, self.density, self.x0, self.lambda_t, self.lambda_i] {
            if !(v.is_finite() && v > T::zero()) {
                return bad("physical quantities must be finite and positive");
            }
        }
        let ten = T::from_f64(10.0).expect("representable");
        if self.lambda_i > self.lambda_t * ten || self.lambda_t > self.lambda_i * ten {
            return bad("lambdaT and lambdaI differ by more than a factor 10");
        }
        Ok(())
    }
}

/// Characteristic mass-normalized lengths (g/cm²) of a material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MassLengths<T> {
    #[serde(rename = "X0")]
    pub x0: T,
    pub lambda_t: T,
    pub lambda_i: T,
}

impl<T: Scalar> MassLengths<T> {
    pub fn get(&self, kind: super::OccupancyKind) -> T {
        match kind {
            super::OccupancyKind::Radiation => self.x0,
            super::OccupancyKind::Collision => self.lambda_t,
            super::OccupancyKind::Interaction => self.lambda_i,
        }
    }
}

/// An element reference or a mixture with an explicit density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Material<T> {
    Element(String),
    Compound {
        components: Vec<(Material<T>, T)>,
        density: T,
    },
}

impl<T: Scalar> Material<T> {
    pub fn element(symbol: impl Into<String>) -> Self {
        Material::Element(symbol.into())
    }

    /// Builds a compound after checking that the fractions are positive and
    /// sum to 1 within 1e-9 (or a few ulps of `T`, if coarser).
    pub fn compound(components: Vec<(Material<T>, T)>, density: T) -> Result<Self, MaterialError> {
        if components.is_empty() {
            return Err(MaterialError::InvalidFractions("a compound needs at least one component".into()));
        }
        if !(density.is_finite() && density > T::zero()) {
            return Err(MaterialError::InvalidProperty(format!("compound density {density} must be positive")));
        }
        let mut sum = T::zero();
        for (_, w) in &components {
            if !(w.is_finite() && *w >= T::zero()) {
                return Err(MaterialError::InvalidFractions(format!("mass fraction {w} is negative")));
            }
            sum = sum + *w;
        }
        // 1e-9, widened to a few ulps for single precision
        let tol = T::from_f64(1e-9).expect("representable").max(T::epsilon() * T::from_f64(16.0).expect("representable"));
        if (sum - T::one()).abs() > tol {
            return Err(MaterialError::InvalidFractions(format!("mass fractions sum to {sum}, not 1")));
        }
        Ok(Material::Compound { components, density })
    }
}

/// Element table plus named compounds.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialTable<T> {
    elements: BTreeMap<String, ElementProps<T>>,
    compounds: BTreeMap<String, Material<T>>,
}

fn parse_scalar<T: Scalar>(s: &str, line: usize) -> Result<T, MaterialError> {
    s.trim().parse::<T>().map_err(|_| MaterialError::Parse {
        line,
        message: format!("`{s}` is not a number"),
    })
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

impl<T: Scalar> MaterialTable<T> {
    /// The embedded table.
    pub fn builtin() -> Self {
        Self::parse(ELEMENTS, COMPOUNDS).expect("embedded material table is well formed")
    }

    /// Parses tab-separated element and compound tables. Compounds may
    /// refer to elements and to compounds defined on earlier lines, which
    /// rules out cyclic compositions.
    pub fn parse(elements: &str, compounds: &str) -> Result<Self, MaterialError> {
        let mut table = MaterialTable {
            elements: BTreeMap::new(),
            compounds: BTreeMap::new(),
        };
        for (line, l) in data_lines(elements) {
            let cols: Vec<&str> = l.split('\t').collect();
            if cols.len() < 7 {
                return Err(MaterialError::Parse {
                    line,
                    message: format!("expected 7 columns, found {}", cols.len()),
                });
            }
            let props = ElementProps {
                symbol: cols[0].trim().to_string(),
                z: cols[1].trim().parse().map_err(|_| MaterialError::Parse {
                    line,
                    message: format!("`{}` is not an atomic number", cols[1]),
                })?,
                a: parse_scalar(cols[2], line)?,
                density: parse_scalar(cols[3], line)?,
                x0: parse_scalar(cols[4], line)?,
                lambda_t: parse_scalar(cols[5], line)?,
                lambda_i: parse_scalar(cols[6], line)?,
                source: cols.get(7).map(|s| s.trim().to_string()).unwrap_or_default(),
            };
            props.check()?;
            table.elements.insert(props.symbol.clone(), props);
        }
        for (line, l) in data_lines(compounds) {
            let cols: Vec<&str> = l.split('\t').collect();
            if cols.len() < 3 {
                return Err(MaterialError::Parse {
                    line,
                    message: format!("expected 3 columns, found {}", cols.len()),
                });
            }
            let name = cols[0].trim().to_string();
            let density = parse_scalar(cols[1], line)?;
            let mut components = Vec::new();
            for part in cols[2].split_whitespace() {
                let (m, w) = part.split_once(':').ok_or_else(|| MaterialError::Parse {
                    line,
                    message: format!("component `{part}` is not name:fraction"),
                })?;
                components.push((table.material(m)?, parse_scalar(w, line)?));
            }
            let compound = Material::compound(components, density)?;
            table.compounds.insert(name, compound);
        }
        Ok(table)
    }

    pub fn element(&self, symbol: &str) -> Result<&ElementProps<T>, MaterialError> {
        self.elements
            .get(symbol)
            .ok_or_else(|| MaterialError::UnknownElement(symbol.to_string()))
    }

    pub fn elements(&self) -> impl Iterator<Item = &ElementProps<T>> {
        self.elements.values()
    }

    pub fn compound_names(&self) -> impl Iterator<Item = &str> {
        self.compounds.keys().map(|s| s.as_str())
    }

    /// Looks a name up as a compound first, then as an element symbol.
    pub fn material(&self, name: &str) -> Result<Material<T>, MaterialError> {
        if let Some(c) = self.compounds.get(name) {
            return Ok(c.clone());
        }
        self.element(name).map(|e| Material::Element(e.symbol.clone()))
    }

    pub fn density(&self, m: &Material<T>) -> Result<T, MaterialError> {
        match m {
            Material::Element(s) => Ok(self.element(s)?.density),
            Material::Compound { density, .. } => Ok(*density),
        }
    }

    /// Tabulated lengths for elements; for compounds, Bragg additivity
    /// `1/L = Σ w_j / L_j` applied to each length independently.
    pub fn mix_mass_properties(&self, m: &Material<T>) -> Result<MassLengths<T>, MaterialError> {
        match m {
            Material::Element(s) => {
                let e = self.element(s)?;
                Ok(MassLengths {
                    x0: e.x0,
                    lambda_t: e.lambda_t,
                    lambda_i: e.lambda_i,
                })
            }
            Material::Compound { components, .. } => {
                let (mut x0, mut lt, mut li) = (T::zero(), T::zero(), T::zero());
                for (c, w) in components {
                    let p = self.mix_mass_properties(c)?;
                    x0 = x0 + *w / p.x0;
                    lt = lt + *w / p.lambda_t;
                    li = li + *w / p.lambda_i;
                }
                Ok(MassLengths {
                    x0: x0.recip(),
                    lambda_t: lt.recip(),
                    lambda_i: li.recip(),
                })
            }
        }
    }
}
