//! JSON schema for space specifications.
//!
//! ```json
//! {"kind": "absolute_sum",
//!  "outer": {"kind": "lp", "p": "inf", "dim": 2},
//!  "left":  {"kind": "lp", "p": 2, "dim": 2},
//!  "right": {"kind": "lp", "p": 1, "dim": 1}}
//! ```

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Gauge2d, Kind, SpaceSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Text(String),
}

impl PValue {
    fn resolve(&self, field: &str) -> Result<f64> {
        match self {
            PValue::Number(p) => Ok(*p),
            PValue::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
                other => other
                    .parse::<f64>()
                    .map_err(|_| Error::space(field, format!("cannot parse exponent `{s}`"))),
            },
        }
    }

    fn from_p(p: f64) -> Self {
        if p.is_infinite() {
            PValue::Text("inf".into())
        } else {
            PValue::Number(p)
        }
    }
}

/// Wire form of a [`SpaceSpec`]. Field names are part of the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<PValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<Box<SpaceJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Box<SpaceJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Box<SpaceJson>>,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Box<SpaceJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summands: Option<Vec<SpaceJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub of: Option<Box<SpaceJson>>,
}

fn join(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_string()
    } else {
        format!("{path}.{field}")
    }
}

fn prefix(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidSpace { field, reason } => Error::InvalidSpace {
            field: join(path, &field),
            reason,
        },
        other => other,
    }
}

impl SpaceJson {
    fn blank(kind: &str) -> Self {
        Self {
            kind: kind.into(),
            p: None,
            dim: None,
            samples: None,
            outer: None,
            left: None,
            right: None,
            e: None,
            summands: None,
            of: None,
        }
    }

    /// Validates and builds the space; errors name the offending field path.
    pub fn to_spec(&self) -> Result<SpaceSpec> {
        self.to_spec_at("")
    }

    fn to_spec_at(&self, path: &str) -> Result<SpaceSpec> {
        let need = |name: &str, v: bool| -> Result<()> {
            if v {
                Ok(())
            } else {
                Err(Error::space(join(path, name), format!("required for kind `{}`", self.kind)))
            }
        };
        let spec = match self.kind.as_str() {
            "lp" => {
                need("p", self.p.is_some())?;
                need("dim", self.dim.is_some())?;
                let p = self.p.as_ref().unwrap().resolve(&join(path, "p"))?;
                SpaceSpec::lp(self.dim.unwrap(), p).map_err(|e| prefix(path, e))?
            }
            "gauge2d" => {
                need("samples", self.samples.is_some())?;
                let g = Gauge2d::from_table(self.samples.as_ref().unwrap())
                    .map_err(|e| prefix(path, e))?;
                SpaceSpec::gauge2d(g)
            }
            "absolute_sum" => {
                need("outer", self.outer.is_some())?;
                need("left", self.left.is_some())?;
                need("right", self.right.is_some())?;
                let outer = self.outer.as_ref().unwrap().to_spec_at(&join(path, "outer"))?;
                let left = self.left.as_ref().unwrap().to_spec_at(&join(path, "left"))?;
                let right = self.right.as_ref().unwrap().to_spec_at(&join(path, "right"))?;
                SpaceSpec::absolute_sum(outer, left, right).map_err(|e| prefix(path, e))?
            }
            "esum" => {
                need("E", self.e.is_some())?;
                need("summands", self.summands.is_some())?;
                let outer = self.e.as_ref().unwrap().to_spec_at(&join(path, "E"))?;
                let summands = self
                    .summands
                    .as_ref()
                    .unwrap()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.to_spec_at(&join(path, &format!("summands[{i}]"))))
                    .collect::<Result<Vec<_>>>()?;
                SpaceSpec::esum(outer, summands).map_err(|e| prefix(path, e))?
            }
            "dual" => {
                need("of", self.of.is_some())?;
                SpaceSpec::dual_of(self.of.as_ref().unwrap().to_spec_at(&join(path, "of"))?)
            }
            other => {
                return Err(Error::space(
                    join(path, "kind"),
                    format!("unknown kind `{other}` (expected lp, gauge2d, absolute_sum, esum, dual)"),
                ))
            }
        };
        if let Some(d) = self.dim {
            if d != spec.dim() {
                return Err(Error::space(
                    join(path, "dim"),
                    format!("declared dim {d} but the structure has dim {}", spec.dim()),
                ));
            }
        }
        Ok(spec)
    }

    pub fn from_spec(spec: &SpaceSpec) -> Self {
        let mut j;
        match spec.kind() {
            Kind::Lp { p } => {
                j = Self::blank("lp");
                j.p = Some(PValue::from_p(*p));
            }
            Kind::Gauge2d { gauge, .. } => {
                j = Self::blank("gauge2d");
                j.samples = Some(gauge.to_table(super::gauge::DEFAULT_INTERVALS));
            }
            Kind::AbsoluteSum { outer, left, right } => {
                j = Self::blank("absolute_sum");
                j.outer = Some(Box::new(Self::from_spec(outer)));
                j.left = Some(Box::new(Self::from_spec(left)));
                j.right = Some(Box::new(Self::from_spec(right)));
            }
            Kind::ESum { outer, summands } => {
                j = Self::blank("esum");
                j.e = Some(Box::new(Self::from_spec(outer)));
                j.summands = Some(summands.iter().map(Self::from_spec).collect());
            }
            Kind::Dual { of, .. } => {
                j = Self::blank("dual");
                j.of = Some(Box::new(Self::from_spec(of)));
            }
        }
        j.dim = Some(spec.dim());
        j
    }
}

impl Serialize for SpaceSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpaceJson::from_spec(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpaceSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SpaceJson::deserialize(d)?;
        j.to_spec().map_err(serde::de::Error::custom)
    }
}

impl SpaceSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: SpaceJson = serde_json::from_str(s)?;
        j.to_spec()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&SpaceJson::from_spec(self)).expect("serializable")
    }
}
