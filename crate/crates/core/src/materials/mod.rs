//! Element, compound and layer model, and interaction-length occupancy.
//!
//! Occupancy of a layer stack for one characteristic length `L` is
//! `100 · Σ tᵢ ρᵢ / Lᵢ` percent, with `Lᵢ` the mass-normalized length of
//! layer `i` (g/cm²), `tᵢ` its thickness (cm) and `ρᵢ` its density.

mod table;

pub use table::{ElementProps, MassLengths, Material, MaterialTable};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::Iri;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaterialError {
    #[error("unknown element or material `{0}`")]
    UnknownElement(String),
    #[error("invalid mass fractions: {0}")]
    InvalidFractions(String),
    #[error("invalid property: {0}")]
    InvalidProperty(String),
    #[error("negative thickness {0}")]
    NegativeThickness(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OccupancyKind {
    Radiation,
    Collision,
    Interaction,
}

impl OccupancyKind {
    pub const ALL: [OccupancyKind; 3] = [OccupancyKind::Radiation, OccupancyKind::Collision, OccupancyKind::Interaction];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer<T> {
    pub material: Material<T>,
    /// Centimetres.
    pub thickness: T,
}

impl<T: Scalar> Layer<T> {
    pub fn new(material: Material<T>, thickness: T) -> Result<Self, MaterialError> {
        if !(thickness.is_finite() && thickness >= T::zero()) {
            return Err(MaterialError::NegativeThickness(thickness.to_string()));
        }
        Ok(Layer { material, thickness })
    }
}

/// Layers in order along the beam axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dut: Option<Iri>,
    pub layers: Vec<Layer<T>>,
}

impl<T> Default for LayerStack<T> {
    fn default() -> Self {
        LayerStack {
            dut: None,
            layers: Vec::new(),
        }
    }
}

impl<T: Scalar> LayerStack<T> {
    pub fn new(dut: Option<Iri>, layers: Vec<Layer<T>>) -> Self {
        LayerStack { dut, layers }
    }

    /// Reads `material, thickness_cm` lines. `#` starts a comment and an
    /// optional `@dut <name>` line names the owning DUT.
    pub fn parse(text: &str, table: &MaterialTable<T>) -> Result<Self, MaterialError> {
        let mut stack = LayerStack::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            if let Some(dut) = l.strip_prefix("@dut") {
                let iri = dut.trim().parse::<Iri>().map_err(|e| MaterialError::Parse {
                    line,
                    message: e.to_string(),
                })?;
                stack.dut = Some(iri);
                continue;
            }
            let (name, thickness) = l
                .split_once([',', '\t'])
                .ok_or_else(|| MaterialError::Parse {
                    line,
                    message: "expected `material, thickness_cm`".into(),
                })?;
            let thickness = thickness.trim().parse::<T>().map_err(|_| MaterialError::Parse {
                line,
                message: format!("`{}` is not a thickness", thickness.trim()),
            })?;
            stack.layers.push(Layer::new(table.material(name.trim())?, thickness)?);
        }
        Ok(stack)
    }

    /// Concatenation `self ++ other`, keeping this stack's DUT.
    pub fn concat(&self, other: &LayerStack<T>) -> LayerStack<T> {
        LayerStack {
            dut: self.dut.clone(),
            layers: self.layers.iter().chain(&other.layers).cloned().collect(),
        }
    }
}

fn hundred<T: Scalar>() -> T {
    T::from_f64(100.0).expect("representable")
}

/// Occupancy in percent for one length kind.
pub fn occupancy<T: Scalar>(
    stack: &LayerStack<T>,
    kind: OccupancyKind,
    table: &MaterialTable<T>,
) -> Result<T, MaterialError> {
    let mut sum = T::zero();
    for layer in &stack.layers {
        let l = table.mix_mass_properties(&layer.material)?.get(kind);
        sum = sum + layer.thickness * table.density(&layer.material)? / l;
    }
    Ok(hundred::<T>() * sum)
}

/// Characteristic length in cm: `L / ρ`.
pub fn length_cm<T: Scalar>(m: &Material<T>, kind: OccupancyKind, table: &MaterialTable<T>) -> Result<T, MaterialError> {
    Ok(table.mix_mass_properties(m)?.get(kind) / table.density(m)?)
}

/// Same quantity as [`occupancy`], summed over `t / L_cm`.
pub fn occupancy_cm<T: Scalar>(
    stack: &LayerStack<T>,
    kind: OccupancyKind,
    table: &MaterialTable<T>,
) -> Result<T, MaterialError> {
    let mut sum = T::zero();
    for layer in &stack.layers {
        sum = sum + layer.thickness / length_cm(&layer.material, kind, table)?;
    }
    Ok(hundred::<T>() * sum)
}

/// Radiation, nuclear collision and nuclear interaction occupancies.
pub fn occupancy_triple<T: Scalar>(stack: &LayerStack<T>, table: &MaterialTable<T>) -> Result<[T; 3], MaterialError> {
    Ok([
        occupancy(stack, OccupancyKind::Radiation, table)?,
        occupancy(stack, OccupancyKind::Collision, table)?,
        occupancy(stack, OccupancyKind::Interaction, table)?,
    ])
}

/// Total occupancy of every DUT concurrently placed in the field.
pub fn facility_occupancy<T: Scalar>(stacks: &[LayerStack<T>], table: &MaterialTable<T>) -> Result<[T; 3], MaterialError> {
    let mut total = [T::zero(); 3];
    for s in stacks {
        let t = occupancy_triple(s, table)?;
        for k in 0..3 {
            total[k] = total[k] + t[k];
        }
    }
    Ok(total)
}

/// Rounds half-up to at most three decimals on the shortest decimal
/// representation of `v`, then trims trailing zeros: 0.96 → "0.96",
/// 1.1535 → "1.154", 0 → "0".
pub fn format_percent<T: Scalar>(v: T) -> String {
    let s = v.to_string();
    if !v.is_finite() {
        return s;
    }
    let (neg, digits) = match s.strip_prefix('-') {
        Some(d) => (true, d),
        None => (false, s.as_str()),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    let mut kept: Vec<u8> = int.bytes().chain(frac.bytes().take(3)).map(|b| b - b'0').collect();
    let places = frac.len().min(3);
    if frac.len() > 3 && frac.as_bytes()[3] >= b'5' {
        let mut i = kept.len();
        loop {
            if i == 0 {
                kept.insert(0, 1);
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    let split = kept.len() - places;
    let int: String = kept[..split].iter().map(|d| char::from(b'0' + d)).collect();
    let frac: String = kept[split..].iter().map(|d| char::from(b'0' + d)).collect();
    let frac = frac.trim_end_matches('0');
    let body = if frac.is_empty() { int } else { format!("{int}.{frac}") };
    if neg && body.bytes().any(|b| (b'1'..=b'9').contains(&b)) {
        format!("-{body}")
    } else {
        body
    }
}

/// `"R / C / I"` from three percentages.
pub fn format_triple<T: Scalar>(t: [T; 3]) -> String {
    t.iter().map(|v| format_percent(*v)).collect::<Vec<_>>().join(" / ")
}

pub fn occupancy_report<T: Scalar>(stack: &LayerStack<T>, table: &MaterialTable<T>) -> Result<String, MaterialError> {
    Ok(format_triple(occupancy_triple(stack, table)?))
}
