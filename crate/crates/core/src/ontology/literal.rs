use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Timelike, Utc};
use serde::{Deserialize, Serialize};

use super::{Iri, OntologyError, Prefix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Datatype {
    Boolean,
    DateTime,
    Decimal,
    Double,
    String,
}

impl Datatype {
    pub fn iri(self) -> Iri {
        let local = match self {
            Datatype::Boolean => "boolean",
            Datatype::DateTime => "dateTime",
            Datatype::Decimal => "decimal",
            Datatype::Double => "double",
            Datatype::String => "string",
        };
        Iri::new(Prefix::Xsd, local).expect("xsd datatype names are valid")
    }

    pub fn from_iri(iri: &Iri) -> Option<Datatype> {
        if iri.prefix() != Prefix::Xsd {
            return None;
        }
        match iri.local() {
            "boolean" => Some(Datatype::Boolean),
            "dateTime" => Some(Datatype::DateTime),
            "decimal" => Some(Datatype::Decimal),
            "double" => Some(Datatype::Double),
            "string" => Some(Datatype::String),
            _ => None,
        }
    }
}

/// A typed literal. Only ever carried by `iedm:hasValue`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Datatype,
}

fn digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

pub(crate) fn is_decimal_lexical(s: &str) -> bool {
    let s = strip_sign(s);
    match s.split_once('.') {
        Some((int, frac)) => (int.is_empty() || digits(int)) && (frac.is_empty() || digits(frac)) && !(int.is_empty() && frac.is_empty()),
        None => digits(s),
    }
}

pub(crate) fn is_double_lexical(s: &str) -> bool {
    if matches!(s, "INF" | "-INF" | "+INF" | "NaN") {
        return true;
    }
    match s.split_once(['e', 'E']) {
        Some((mantissa, exp)) => is_decimal_lexical(mantissa) && digits(strip_sign(exp)),
        None => is_decimal_lexical(s),
    }
}

impl Literal {
    pub fn new(lexical: impl Into<String>, datatype: Datatype) -> Result<Literal, OntologyError> {
        let lexical = lexical.into();
        let ok = match datatype {
            Datatype::String => true,
            Datatype::Boolean => matches!(lexical.as_str(), "true" | "false" | "1" | "0"),
            Datatype::Decimal => is_decimal_lexical(&lexical),
            Datatype::Double => is_double_lexical(&lexical),
            Datatype::DateTime => TimePosition::parse(&lexical).is_ok(),
        };
        if !ok {
            return Err(OntologyError::InvalidLiteral { lexical, datatype });
        }
        Ok(Literal { lexical, datatype })
    }

    pub fn string(s: impl Into<String>) -> Literal {
        Literal {
            lexical: s.into(),
            datatype: Datatype::String,
        }
    }

    /// A double literal with Rust's shortest round-trip rendering.
    pub fn double(v: f64) -> Literal {
        let lexical = if v.is_nan() {
            "NaN".to_string()
        } else if v.is_infinite() {
            if v > 0.0 { "INF" } else { "-INF" }.to_string()
        } else {
            format!("{v:e}")
        };
        Literal {
            lexical,
            datatype: Datatype::Double,
        }
    }

    pub fn date_time(t: TimePosition) -> Literal {
        Literal {
            lexical: t.lexical(),
            datatype: Datatype::DateTime,
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }

    /// Numeric value for decimal and double literals.
    pub fn as_f64(&self) -> Option<f64> {
        match self.datatype {
            Datatype::Decimal | Datatype::Double => match self.lexical.as_str() {
                "INF" | "+INF" => Some(f64::INFINITY),
                "-INF" => Some(f64::NEG_INFINITY),
                "NaN" => Some(f64::NAN),
                s => s.parse().ok(),
            },
            _ => None,
        }
    }

    pub fn as_time(&self) -> Option<TimePosition> {
        match self.datatype {
            Datatype::DateTime => TimePosition::parse(&self.lexical).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"^^{}", self.lexical, self.datatype.iri())
    }
}

/// A UTC instant with at least minute precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePosition(DateTime<Utc>);

impl TimePosition {
    pub fn from_utc(t: DateTime<Utc>) -> TimePosition {
        TimePosition(t)
    }

    /// Accepts RFC 3339 instants as well as offset-less `YYYY-MM-DDTHH:MM[:SS]`
    /// (optionally suffixed by `Z`), which are read as UTC.
    pub fn parse(s: &str) -> Result<TimePosition, OntologyError> {
        if let Ok(t) = DateTime::parse_from_rfc3339(s) {
            return Ok(TimePosition(t.with_timezone(&Utc)));
        }
        let naive = s.strip_suffix('Z').unwrap_or(s);
        for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
            if let Ok(t) = NaiveDateTime::parse_from_str(naive, fmt) {
                return Ok(TimePosition(t.and_utc()));
            }
        }
        Err(OntologyError::InvalidTime(s.to_string()))
    }

    pub fn instant(&self) -> DateTime<Utc> {
        self.0
    }

    pub fn lexical(&self) -> String {
        self.0.to_rfc3339_opts(SecondsFormat::AutoSi, true)
    }

    /// Individual name for this instant, e.g. `_2018_03_30_12h_00`.
    /// Seconds are appended only when non-zero.
    pub fn local_name(&self) -> String {
        let mut name = self.0.format("_%Y_%m_%d_%Hh_%M").to_string();
        if self.0.second() != 0 || self.0.nanosecond() != 0 {
            name.push_str(&self.0.format("_%S").to_string());
            if self.0.nanosecond() != 0 {
                name.push_str(&format!("_{:09}", self.0.nanosecond()));
            }
        }
        name
    }
}

impl fmt::Display for TimePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexical())
    }
}

impl FromStr for TimePosition {
    type Err = OntologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimePosition::parse(s)
    }
}

impl Serialize for TimePosition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TimePosition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        TimePosition::parse(&s).map_err(serde::de::Error::custom)
    }
}
