//! Filter and tensor documents.

use std::fmt;

use cepgeo_core::{CMatrix, FilterSpec, Tensor3};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::number::{Cx, Num};

/// Input filter. `gain` is σ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterDocument {
    pub gain: f64,
    #[serde(default)]
    pub poles: Vec<Cx>,
    #[serde(default)]
    pub zeros: Vec<Cx>,
    #[serde(default)]
    pub blaschke: Vec<Cx>,
    #[serde(default)]
    pub z_power: i32,
}

impl FilterDocument {
    pub fn to_spec(&self) -> FilterSpec {
        FilterSpec::new(self.gain)
            .poles(self.poles.iter().map(|&z| z.into()))
            .zeros(self.zeros.iter().map(|&z| z.into()))
            .blaschke(self.blaschke.iter().map(|&z| z.into()))
            .z_power(self.z_power)
    }

    pub fn from_spec(spec: &FilterSpec) -> Self {
        Self {
            gain: spec.gain,
            poles: spec.poles.iter().map(|&z| z.into()).collect(),
            zeros: spec.zeros.iter().map(|&z| z.into()).collect(),
            blaschke: spec.blaschke_points.iter().map(|&z| z.into()).collect(),
            z_power: spec.z_power,
        }
    }
}

/// Combining macron marking a conjugated slot.
pub const BAR: char = '\u{0304}';

/// One tensor slot: `0` or `"0̄"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Idx {
    pub index: usize,
    pub barred: bool,
}

impl Idx {
    pub fn plain(index: usize) -> Self {
        Self { index, barred: false }
    }

    pub fn bar(index: usize) -> Self {
        Self { index, barred: true }
    }
}

impl Serialize for Idx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.barred {
            s.serialize_str(&format!("{}{BAR}", self.index))
        } else {
            s.serialize_u64(self.index as u64)
        }
    }
}

struct IdxVisitor;

impl<'de> Visitor<'de> for IdxVisitor {
    type Value = Idx;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an index or a barred index string")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Idx, E> {
        Ok(Idx::plain(v as usize))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Idx, E> {
        usize::try_from(v)
            .map(Idx::plain)
            .map_err(|_| E::custom("negative index"))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Idx, E> {
        v.strip_suffix(BAR)
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse().ok())
            .map(Idx::bar)
            .ok_or_else(|| E::custom(format!("malformed barred index {v:?}")))
    }
}

impl<'de> Deserialize<'de> for Idx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IdxVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub idx: Vec<Idx>,
    pub re: Num,
    pub im: Num,
}

/// A tensor with every component listed in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDocument {
    pub name: String,
    pub labels: Vec<String>,
    /// `null` for α-independent tensors.
    pub alpha: Option<Num>,
    pub entries: Vec<Entry>,
}

impl TensorDocument {
    /// `bars[s]` marks slot `s` as conjugated.
    pub fn from_matrix(name: &str, labels: &[String], alpha: Option<f64>, m: &CMatrix, bars: [bool; 2]) -> Self {
        let n = m.dim();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| Entry {
                idx: vec![
                    Idx {
                        index: i,
                        barred: bars[0],
                    },
                    Idx {
                        index: j,
                        barred: bars[1],
                    },
                ],
                re: Num(m[(i, j)].re),
                im: Num(m[(i, j)].im),
            })
            .collect();
        Self {
            name: name.into(),
            labels: labels.to_vec(),
            alpha: alpha.map(Num),
            entries,
        }
    }

    pub fn from_tensor(name: &str, labels: &[String], alpha: Option<f64>, t: &Tensor3, bars: [bool; 3]) -> Self {
        let n = t.dim();
        let mut entries = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = t[(i, j, k)];
                    entries.push(Entry {
                        idx: vec![
                            Idx {
                                index: i,
                                barred: bars[0],
                            },
                            Idx {
                                index: j,
                                barred: bars[1],
                            },
                            Idx {
                                index: k,
                                barred: bars[2],
                            },
                        ],
                        re: Num(v.re),
                        im: Num(v.im),
                    });
                }
            }
        }
        Self {
            name: name.into(),
            labels: labels.to_vec(),
            alpha: alpha.map(Num),
            entries,
        }
    }

    /// Component at `idx`, ignoring bars.
    pub fn get(&self, idx: &[usize]) -> Option<(f64, f64)> {
        self.entries
            .iter()
            .find(|e| e.idx.iter().map(|i| i.index).eq(idx.iter().copied()))
            .map(|e| (e.re.0, e.im.0))
    }
}
