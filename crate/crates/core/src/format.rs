//! Versioned JSON file formats: persistence modules, and simplicial
//! complexes carrying vertex values (function / size-pair files). Rationals
//! and matrix entries are serialized as strings so nothing is lost to
//! floating point; maps are ordered so serialization is byte-stable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

use crate::category::CatObject;
use crate::error::{Error, Result};
use crate::homology::{LevelSetInvariant, SimplicialComplex, SizePair};
use crate::matrix::IntMatrix;
use crate::module::{Coefficients, PersistenceModule};
use crate::rational::{format_rational, parse_rational};

pub const FORMAT_TAG: &str = "erodist/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

impl MatrixData {
    pub fn from_matrix(m: &IntMatrix) -> Self {
        MatrixData {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(BigInt::to_string).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<IntMatrix> {
        let entries: Vec<BigInt> = self
            .entries
            .iter()
            .map(|s| {
                s.parse::<BigInt>()
                    .map_err(|_| Error::Format(format!("bad integer entry {s:?}")))
            })
            .collect::<Result<_>>()?;
        IntMatrix::from_entries(self.rows, self.cols, entries)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoefficientData {
    Field { p: u64 },
    Int,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectData {
    Vect { dim: usize },
    Ab { free: usize, torsion: Vec<i64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleFile {
    pub format: String,
    pub dim: usize,
    pub axes: Vec<Vec<String>>,
    pub coefficients: CoefficientData,
    pub objects: BTreeMap<String, ObjectData>,
    pub edges: BTreeMap<String, MatrixData>,
}

fn point_key(point: &[usize]) -> String {
    point
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_point_key(key: &str, dim: usize) -> Result<Vec<usize>> {
    let parts: Vec<usize> = key
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Format(format!("bad point key {key:?}")))
        })
        .collect::<Result<_>>()?;
    if parts.len() != dim {
        return Err(Error::Format(format!(
            "point key {key:?} has {} coordinates, expected {dim}",
            parts.len()
        )));
    }
    Ok(parts)
}

impl ModuleFile {
    pub fn from_module(module: &PersistenceModule) -> Self {
        let axes = module
            .axes()
            .iter()
            .map(|axis| axis.iter().map(format_rational).collect())
            .collect();
        let coefficients = match module.coefficients() {
            Coefficients::Field(p) => CoefficientData::Field { p },
            Coefficients::Int => CoefficientData::Int,
        };
        let mut objects = BTreeMap::new();
        for idx in 0..module.point_count() {
            let point = module.multi_index(idx);
            let data = match module.object(&point) {
                CatObject::Vect { dim, .. } => ObjectData::Vect { dim: *dim },
                CatObject::Ab { free_rank, torsion } => ObjectData::Ab {
                    free: *free_rank,
                    torsion: torsion
                        .iter()
                        .map(|t| t.to_i64().expect("torsion fits i64"))
                        .collect(),
                },
                CatObject::Set { .. } => unreachable!("modules are Vect or Ab valued"),
            };
            objects.insert(point_key(&point), data);
        }
        let mut edges = BTreeMap::new();
        for idx in 0..module.point_count() {
            let point = module.multi_index(idx);
            for axis in 0..module.dim() {
                if point[axis] + 1 >= module.axes()[axis].len() {
                    continue;
                }
                let mut target = point.clone();
                target[axis] += 1;
                let m = module
                    .transition_map(&point, &target)
                    .expect("cover edge exists");
                edges.insert(
                    format!("{}>{}", point_key(&point), point_key(&target)),
                    MatrixData::from_matrix(&m),
                );
            }
        }
        ModuleFile {
            format: FORMAT_TAG.to_string(),
            dim: module.dim(),
            axes,
            coefficients,
            objects,
            edges,
        }
    }

    pub fn to_module(&self) -> Result<PersistenceModule> {
        if self.format != FORMAT_TAG {
            return Err(Error::Format(format!(
                "unsupported format {:?}, expected {FORMAT_TAG:?}",
                self.format
            )));
        }
        if self.axes.len() != self.dim {
            return Err(Error::Format(format!(
                "{} axes for dim {}",
                self.axes.len(),
                self.dim
            )));
        }
        let axes: Vec<Vec<BigRational>> = self
            .axes
            .iter()
            .map(|axis| axis.iter().map(|s| parse_rational(s)).collect())
            .collect::<Result<_>>()?;
        let coefficients = match self.coefficients {
            CoefficientData::Field { p } => Coefficients::Field(p),
            CoefficientData::Int => Coefficients::Int,
        };
        let lens: Vec<usize> = axes.iter().map(Vec::len).collect();
        let npoints: usize = lens.iter().product();
        let mut objects = vec![None; npoints];
        for (key, data) in &self.objects {
            let point = parse_point_key(key, self.dim)?;
            for (axis, &i) in point.iter().enumerate() {
                if i >= lens[axis] {
                    return Err(Error::Format(format!("point {key:?} outside the grid")));
                }
            }
            let linear = point
                .iter()
                .zip(&lens)
                .fold(0, |acc, (&i, &len)| acc * len + i);
            let object = match (coefficients, data) {
                (Coefficients::Field(p), ObjectData::Vect { dim }) => {
                    CatObject::vect(*dim, crate::category::FieldSpec::Prime(p))
                }
                (Coefficients::Int, ObjectData::Ab { free, torsion }) => {
                    CatObject::ab(*free, torsion.clone())
                }
                _ => {
                    return Err(Error::Format(format!(
                        "object at {key:?} does not match the coefficient kind"
                    )))
                }
            };
            object.check_invariants()?;
            objects[linear] = Some(object);
        }
        let objects: Vec<CatObject> = objects
            .into_iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| Error::Format(format!("missing object #{i}"))))
            .collect::<Result<_>>()?;

        let mut edges = HashMap::new();
        for (key, data) in &self.edges {
            let Some((from_key, to_key)) = key.split_once('>') else {
                return Err(Error::Format(format!("bad edge key {key:?}")));
            };
            let from = parse_point_key(from_key, self.dim)?;
            let to = parse_point_key(to_key, self.dim)?;
            let mut axis = None;
            for i in 0..self.dim {
                if to[i] == from[i] + 1 {
                    if axis.replace(i).is_some() {
                        return Err(Error::Format(format!(
                            "edge {key:?} is not a cover edge"
                        )));
                    }
                } else if to[i] != from[i] {
                    return Err(Error::Format(format!("edge {key:?} is not a cover edge")));
                }
            }
            let Some(axis) = axis else {
                return Err(Error::Format(format!("edge {key:?} is not a cover edge")));
            };
            edges.insert((from, axis), data.to_matrix()?);
        }
        PersistenceModule::new(axes, coefficients, objects, edges)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizePairFile {
    pub format: String,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub simplices: Vec<Vec<String>>,
    pub values: BTreeMap<String, Vec<String>>,
}

impl SizePairFile {
    pub fn to_size_pair(&self) -> Result<(SizePair, Vec<String>)> {
        if self.format != FORMAT_TAG {
            return Err(Error::Format(format!(
                "unsupported format {:?}, expected {FORMAT_TAG:?}",
                self.format
            )));
        }
        let mut names = self.vertices.clone();
        names.sort();
        names.dedup();
        if names.len() != self.vertices.len() {
            return Err(Error::Format("duplicate vertex names".into()));
        }
        let index_of = |name: &str| -> Result<usize> {
            names
                .binary_search_by(|n| n.as_str().cmp(name))
                .map_err(|_| Error::Format(format!("unknown vertex {name:?}")))
        };
        let mut simplices: Vec<Vec<usize>> = names.iter().enumerate().map(|(i, _)| vec![i]).collect();
        for s in &self.simplices {
            simplices.push(
                s.iter()
                    .map(|n| index_of(n))
                    .collect::<Result<Vec<usize>>>()?,
            );
        }
        let complex = SimplicialComplex::from_simplices(simplices)?;
        let mut values = BTreeMap::new();
        for (name, val) in &self.values {
            let idx = index_of(name)?;
            let parsed: Vec<BigRational> =
                val.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
            values.insert(idx, parsed);
        }
        let pair = SizePair::new(complex, values)?;
        Ok((pair, names))
    }

    /// The values as a function on the named set, for the sup-norm distance;
    /// requires one-dimensional values.
    pub fn to_level_set(&self) -> Result<(LevelSetInvariant, Vec<String>)> {
        let (pair, names) = self.to_size_pair()?;
        let mut values = Vec::with_capacity(names.len());
        for i in 0..names.len() {
            let val = &pair.values[&i];
            if val.len() != 1 {
                return Err(Error::Format(
                    "sup-norm distance needs scalar values".into(),
                ));
            }
            values.push(val[0].clone());
        }
        Ok((LevelSetInvariant::new(values), names))
    }
}

pub fn write_module_json(module: &PersistenceModule) -> String {
    serde_json::to_string_pretty(&ModuleFile::from_module(module)).expect("serializable")
}

pub fn read_module_json(s: &str) -> Result<PersistenceModule> {
    let file: ModuleFile =
        serde_json::from_str(s).map_err(|e| Error::Format(format!("module file: {e}")))?;
    file.to_module()
}

pub fn read_size_pair_json(s: &str) -> Result<(SizePair, Vec<String>)> {
    let file: SizePairFile =
        serde_json::from_str(s).map_err(|e| Error::Format(format!("size-pair file: {e}")))?;
    file.to_size_pair()
}

pub fn read_level_set_json(s: &str) -> Result<(LevelSetInvariant, Vec<String>)> {
    let file: SizePairFile =
        serde_json::from_str(s).map_err(|e| Error::Format(format!("function file: {e}")))?;
    file.to_level_set()
}
