//! DataPair JSON: `{"d":int,"lmax":int,"F0":[{"l":int,"m":[int,...],"v":float}],"F1":[...]}`.
//! Omitted entries are zero; indices outside M(ℓ) are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::field::{CoeffField, DataPair};
use crate::harmonics::index::MultiIndex;
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub l: usize,
    pub m: Vec<i32>,
    pub v: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DataPairJson {
    pub d: usize,
    pub lmax: usize,
    #[serde(rename = "F0")]
    pub f0: Vec<CoeffEntry>,
    #[serde(rename = "F1")]
    pub f1: Vec<CoeffEntry>,
}

fn entries<T: Real>(f: &CoeffField<T>) -> Vec<CoeffEntry> {
    f.iter()
        .filter(|(_, _, v)| !v.is_zero())
        .map(|(l, m, v)| CoeffEntry { l, m: m.0.clone(), v: v.f64() })
        .collect()
}

fn field<T: Real>(d: usize, lmax: usize, list: &[CoeffEntry]) -> Result<CoeffField<T>> {
    let mut out = CoeffField::zeros(d, lmax);
    for e in list {
        let m = MultiIndex(e.m.clone());
        if e.l > lmax || !m.is_valid(d, e.l) {
            return Err(Error::Format(format!(
                "entry (l = {}, m = {:?}) is not a valid index for d = {d}, lmax = {lmax}",
                e.l, e.m
            )));
        }
        if !e.v.is_finite() {
            return Err(Error::Format(format!("non-finite coefficient at l = {}", e.l)));
        }
        out.set(e.l, &m, T::lit(e.v))?;
    }
    Ok(out)
}

impl<T: Real> DataPair<T> {
    pub fn to_json_struct(&self) -> DataPairJson {
        DataPairJson { d: self.d(), lmax: self.lmax(), f0: entries(&self.f0), f1: entries(&self.f1) }
    }

    pub fn from_json_struct(j: &DataPairJson) -> Result<Self> {
        if j.d < 2 || j.d > 8 {
            return Err(Error::Format(format!("unsupported sphere dimension {}", j.d)));
        }
        Ok(Self { f0: field(j.d, j.lmax, &j.f0)?, f1: field(j.d, j.lmax, &j.f1)? })
    }

    pub fn to_json(&self) -> String {
        crate::report::to_json_string(&self.to_json_struct())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: DataPairJson = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_json_struct(&j)
    }
}
