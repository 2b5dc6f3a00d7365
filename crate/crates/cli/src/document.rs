//! The versioned JSON input document.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use hc_core::contact_homology::DegreeWindow;
use hc_core::handle_dynamics::{ActionCutoff, ModelHandle};
use hc_core::morse_complex::{CriticalPoint, MorseData};
use hc_core::rational::{parse_rational, Q};
use num_bigint::BigInt;
use serde::Deserialize;

use crate::exit::{Failure, INVALID_DATA, PARSE};

pub const SUPPORTED_VERSION: u32 = 1;

/// A rational written as `"p/q"`; plain JSON integers are accepted too.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RationalField {
    Text(String),
    Int(i64),
}

impl RationalField {
    fn value(&self, what: &str) -> Result<Q, Failure> {
        match self {
            Self::Text(s) => parse_rational(s).map_err(|e| Failure::new(PARSE, format!("{what}: {e}"))),
            Self::Int(v) => Ok(Q::from_integer((*v).into())),
        }
    }
}

/// An integer given as a JSON number or a decimal string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum IntegerField {
    Int(i64),
    Text(String),
}

impl IntegerField {
    fn value(&self, what: &str) -> Result<BigInt, Failure> {
        match self {
            Self::Int(v) => Ok((*v).into()),
            Self::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Failure::new(PARSE, format!("{what}: {s:?} is not an integer"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalPointDoc {
    pub id: String,
    pub index: usize,
    #[serde(default)]
    pub h_value: Option<RationalField>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryDoc {
    pub from: String,
    pub to: String,
    pub coefficient: IntegerField,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorseDoc {
    pub critical_points: Vec<CriticalPointDoc>,
    #[serde(default)]
    pub boundary: Vec<BoundaryDoc>,
    #[serde(default)]
    pub allow_multiple_minima: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandleDoc {
    pub k: usize,
    pub b: RationalField,
    pub b_prime: RationalField,
    pub c_sq: Vec<RationalField>,
    pub level: RationalField,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    #[serde(default)]
    pub window: Option<[i64; 2]>,
    #[serde(default)]
    pub m_o: Option<u64>,
    #[serde(default)]
    pub action_cutoff: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub version: u32,
    pub n: usize,
    pub morse: MorseDoc,
    #[serde(default)]
    pub handles: BTreeMap<String, HandleDoc>,
    #[serde(default)]
    pub options: OptionsDoc,
}

impl InputDocument {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))
            .map_err(|e| Failure::new(PARSE, format!("{e:#}")))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let doc: InputDocument =
            serde_json::from_str(text).map_err(|e| Failure::new(PARSE, format!("malformed document: {e}")))?;
        if doc.version != SUPPORTED_VERSION {
            return Err(Failure::new(
                PARSE,
                format!("unsupported document version {} (expected {SUPPORTED_VERSION})", doc.version),
            )
            .into());
        }
        Ok(doc)
    }

    pub fn morse_data(&self) -> Result<MorseData, Failure> {
        let mut points = Vec::with_capacity(self.morse.critical_points.len());
        for p in &self.morse.critical_points {
            let mut cp = CriticalPoint::new(p.id.clone(), p.index);
            if let Some(h) = &p.h_value {
                cp = cp.with_height(h.value(&format!("h_value of {}", p.id))?);
            }
            points.push(cp);
        }
        let mut d = MorseData::new(self.n, points);
        d.allow_multiple_minima = self.morse.allow_multiple_minima;
        for e in &self.morse.boundary {
            let key = (e.from.clone(), e.to.clone());
            if d.boundary.contains_key(&key) {
                return Err(Failure::new(
                    INVALID_DATA,
                    format!("boundary entry ({}, {}) listed twice", e.from, e.to),
                ));
            }
            let a = e.coefficient.value(&format!("coefficient ({}, {})", e.from, e.to))?;
            d.boundary.insert(key, a);
        }
        Ok(d)
    }

    /// The handle attached at critical point `id`; its index must match.
    pub fn handle(&self, id: &str) -> Result<ModelHandle, Failure> {
        let doc = self
            .handles
            .get(id)
            .ok_or_else(|| Failure::new(INVALID_DATA, format!("document has no handle for {id:?}")))?;
        let point = self
            .morse
            .critical_points
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| Failure::new(INVALID_DATA, format!("handle key {id:?} is not a critical point")))?;
        if point.index != doc.k {
            return Err(Failure::new(
                INVALID_DATA,
                format!("handle {id:?} has k = {} but the critical point has index {}", doc.k, point.index),
            ));
        }
        let c_sq = doc
            .c_sq
            .iter()
            .enumerate()
            .map(|(i, c)| c.value(&format!("c_sq[{i}] of {id}")))
            .collect::<Result<Vec<_>, _>>()?;
        ModelHandle::new(
            self.n,
            doc.k,
            doc.b.value(&format!("b of {id}"))?,
            doc.b_prime.value(&format!("b_prime of {id}"))?,
            c_sq,
            doc.level.value(&format!("level of {id}"))?,
        )
        .map_err(|e| Failure::new(INVALID_DATA, format!("handle {id:?}: {e}")))
    }

    /// Every handle key must name a critical point.
    pub fn check_handle_keys(&self) -> Result<(), Failure> {
        for id in self.handles.keys() {
            if !self.morse.critical_points.iter().any(|p| &p.id == id) {
                return Err(Failure::new(INVALID_DATA, format!("handle key {id:?} is not a critical point")));
            }
        }
        Ok(())
    }

    pub fn window(&self) -> Option<DegreeWindow> {
        self.options.window.map(|[lo, hi]| DegreeWindow::new(lo, hi))
    }

    pub fn action_cutoff(&self) -> Result<Option<ActionCutoff>, Failure> {
        self.options
            .action_cutoff
            .as_deref()
            .map(parse_cutoff)
            .transpose()
    }
}

pub fn parse_cutoff(s: &str) -> Result<ActionCutoff, Failure> {
    ActionCutoff::parse(s).ok_or_else(|| Failure::new(PARSE, format!("cannot parse action cutoff {s:?}")))
}
