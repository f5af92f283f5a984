//! JSON set files: `{"kind":"points"|"intervals","dim":d,"data":[...]}`.
//!
//! Scalars are strings (`"p/q"` or decimals) so files round-trip exactly.
//! One-dimensional points are bare strings, `d`-dimensional points are
//! arrays of `d` strings, and intervals are `[lo, hi]` pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperspace::{CompactSet1D, CompactSetD, Interval};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Points,
    Intervals,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Datum {
    Scalar(Scalar),
    Tuple(Vec<Scalar>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetFile {
    pub kind: SetKind,
    pub dim: usize,
    pub data: Vec<Datum>,
}

/// A parsed set of either dimensionality.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySet {
    Line(CompactSet1D),
    Space(CompactSetD),
}

impl From<&CompactSet1D> for SetFile {
    fn from(s: &CompactSet1D) -> Self {
        match s {
            CompactSet1D::Points(p) => SetFile {
                kind: SetKind::Points,
                dim: 1,
                data: p.iter().cloned().map(Datum::Scalar).collect(),
            },
            CompactSet1D::Intervals(v) => SetFile {
                kind: SetKind::Intervals,
                dim: 1,
                data: v
                    .iter()
                    .map(|iv| Datum::Tuple(vec![iv.lo.clone(), iv.hi.clone()]))
                    .collect(),
            },
        }
    }
}

impl From<&CompactSetD> for SetFile {
    fn from(s: &CompactSetD) -> Self {
        let data = s
            .points()
            .iter()
            .map(|p| {
                if s.dim() == 1 {
                    Datum::Scalar(p[0].clone())
                } else {
                    Datum::Tuple(p.clone())
                }
            })
            .collect();
        SetFile { kind: SetKind::Points, dim: s.dim(), data }
    }
}

impl SetFile {
    fn point_tuples(&self) -> Result<Vec<Vec<Scalar>>> {
        self.data
            .iter()
            .enumerate()
            .map(|(i, d)| match d {
                Datum::Scalar(x) if self.dim == 1 => Ok(vec![x.clone()]),
                Datum::Tuple(v) if v.len() == self.dim => Ok(v.clone()),
                _ => Err(Error::Parse(format!("datum {i} is not a {}-dimensional point", self.dim))),
            })
            .collect()
    }

    pub fn into_set_1d(self) -> Result<CompactSet1D> {
        if self.dim != 1 {
            return Err(Error::Incompatible(format!("expected a 1-dimensional set, found dim {}", self.dim)));
        }
        match self.kind {
            SetKind::Points => {
                CompactSet1D::points(self.point_tuples()?.into_iter().map(|mut v| v.remove(0)).collect())
            }
            SetKind::Intervals => {
                let mut ivs = Vec::with_capacity(self.data.len());
                for (i, d) in self.data.into_iter().enumerate() {
                    match d {
                        Datum::Tuple(mut v) if v.len() == 2 => {
                            let hi = v.pop().expect("two entries");
                            let lo = v.pop().expect("two entries");
                            ivs.push(Interval::new(lo, hi)?);
                        }
                        _ => return Err(Error::Parse(format!("datum {i} is not an interval [lo, hi]"))),
                    }
                }
                CompactSet1D::intervals(ivs)
            }
        }
    }

    pub fn into_set_d(self) -> Result<CompactSetD> {
        if self.kind != SetKind::Points {
            return Err(Error::Unsupported("interval unions exist only in dimension 1".into()));
        }
        let pts = self.point_tuples()?;
        CompactSetD::new(self.dim, pts)
    }

    /// Dimension-1 files become [`AnySet::Line`], others [`AnySet::Space`].
    pub fn into_any(self) -> Result<AnySet> {
        if self.dim == 1 {
            self.into_set_1d().map(AnySet::Line)
        } else {
            self.into_set_d().map(AnySet::Space)
        }
    }
}

impl Serialize for CompactSet1D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CompactSet1D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SetFile::deserialize(d)?.into_set_1d().map_err(serde::de::Error::custom)
    }
}

impl Serialize for CompactSetD {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CompactSetD {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SetFile::deserialize(d)?.into_set_d().map_err(serde::de::Error::custom)
    }
}

pub fn parse_set(json: &str) -> Result<AnySet> {
    let f: SetFile = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    f.into_any()
}
