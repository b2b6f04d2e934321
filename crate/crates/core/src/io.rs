//! File formats: space files, decompositions, operators; atomic writes.
//!
//! A space file lists the members of a family and, for more than one
//! member, how they are chained:
//!
//! ```json
//! {"components": [{"name": "C8", "n": 8, "edges": [[0, 1], [1, 2]]}],
//!  "separation": {"mode": "chain", "basepoints": [0], "pad": [1]}}
//! ```
//!
//! Distances are always recomputed, never stored.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{assemble_family, Component, GraphFamily};
use crate::graph::Graph;
use crate::operator::BandOperator;
use crate::space::{FiniteMetricSpace, PointSet};
use crate::sparsification::SparseDecomposition;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub name: String,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub mode: String,
    pub basepoints: Vec<usize>,
    pub pad: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub components: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<Separation>,
    /// Generator parameters, echoed for reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl SpaceFile {
    pub fn from_family(family: &GraphFamily, provenance: Option<serde_json::Value>) -> Self {
        SpaceFile {
            components: family
                .components()
                .iter()
                .map(|c| ComponentSpec {
                    name: c.name.clone(),
                    n: c.graph.len(),
                    edges: c.graph.edges().into_iter().map(|(a, b)| [a, b]).collect(),
                })
                .collect(),
            separation: Some(Separation {
                mode: "chain".into(),
                basepoints: family.basepoints().to_vec(),
                pad: family.pads().to_vec(),
            }),
            provenance,
        }
    }

    pub fn to_family(&self) -> Result<GraphFamily> {
        if self.components.is_empty() {
            return Err(Error::input("space file has no components"));
        }
        let components = self
            .components
            .iter()
            .map(|c| {
                let edges: Vec<(usize, usize)> = c.edges.iter().map(|e| (e[0], e[1])).collect();
                Ok(Component::new(c.name.clone(), Graph::from_edges(c.n, &edges)?))
            })
            .collect::<Result<Vec<_>>>()?;
        match &self.separation {
            None if components.len() == 1 => GraphFamily::single(components.into_iter().next().expect("one")),
            None => GraphFamily::chain(components),
            Some(sep) => {
                if sep.mode != "chain" {
                    return Err(Error::input(format!("unknown separation mode {:?}", sep.mode)));
                }
                assemble_family(components, Some(sep.basepoints.clone()), sep.pad.clone())
            }
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Loads a family, which is also a finite metric space via
/// [`GraphFamily::space`].
pub fn load_family(path: &Path) -> Result<GraphFamily> {
    SpaceFile::read(path)?.to_family()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageJson {
    pub ratio: f64,
    pub diameter: u32,
}

/// `{pieces: [[ids]], mass, stages: [{ratio, diameter}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub pieces: Vec<Vec<usize>>,
    pub mass: f64,
    pub stages: Vec<StageJson>,
    #[serde(rename = "R")]
    pub r: u32,
    #[serde(rename = "S")]
    pub s: u32,
}

impl From<&SparseDecomposition> for DecompositionJson {
    fn from(d: &SparseDecomposition) -> Self {
        DecompositionJson {
            pieces: d.pieces.iter().map(|p| p.as_slice().to_vec()).collect(),
            mass: d.mass,
            stages: d
                .stages
                .iter()
                .map(|s| StageJson {
                    ratio: s.ratio,
                    diameter: s.diameter,
                })
                .collect(),
            r: d.r,
            s: d.s,
        }
    }
}

impl DecompositionJson {
    pub fn pieces(&self) -> Vec<PointSet> {
        self.pieces.iter().map(|p| PointSet::new(p.clone())).collect()
    }
}

/// `{entries: [[x, y, val]], propagation, measure: [w]}` for scalar
/// operators; `support` lists the points `measure` refers to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub entries: Vec<(usize, usize, f64)>,
    pub propagation: u32,
    pub support: Vec<usize>,
    pub measure: Vec<f64>,
}

impl OperatorJson {
    pub fn from_operator(t: &BandOperator) -> Result<Self> {
        if t.block() != 1 {
            return Err(Error::input("only scalar operators have a JSON form"));
        }
        Ok(OperatorJson {
            entries: t.entries().map(|(x, y, v)| (x, y, v[0])).collect(),
            propagation: t.propagation(),
            support: t.points().to_vec(),
            measure: t.weights().to_vec(),
        })
    }

    pub fn to_operator(&self, space: &FiniteMetricSpace) -> Result<BandOperator> {
        let t = BandOperator::scalar(
            space,
            &PointSet::new(self.support.clone()),
            self.measure.clone(),
            self.entries.iter().copied(),
        )?;
        if t.propagation() > self.propagation {
            return Err(Error::input(format!(
                "entries reach distance {} beyond the stated propagation {}",
                t.propagation(),
                self.propagation
            )));
        }
        Ok(t)
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::make_laplacian;

    #[test]
    fn space_round_trip() {
        let fam = GraphFamily::chain(vec![
            Component::new("C5", Graph::cycle(5)),
            Component::new("P3", Graph::path(3)),
        ])
        .unwrap();
        let file = SpaceFile::from_family(&fam, None);
        let text = serde_json::to_string(&file).unwrap();
        let back = SpaceFile::parse(&text).unwrap().to_family().unwrap();
        let n = fam.space().len();
        assert!((0..n).all(|x| back.space().row(x) == fam.space().row(x)));
        assert_eq!(back.pads(), fam.pads());
    }

    #[test]
    fn minimal_file_without_separation() {
        let f = SpaceFile::parse(r#"{"components":[{"name":"P2","n":2,"edges":[[0,1]]}]}"#).unwrap();
        assert_eq!(f.to_family().unwrap().space().len(), 2);
    }

    #[test]
    fn parse_errors_carry_a_location() {
        let err = SpaceFile::parse("{\"components\": [\n  {\"name\": 3}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(SpaceFile::parse(r#"{"components":[]}"#).unwrap().to_family().is_err());
    }

    #[test]
    fn operator_round_trip() {
        let c = FiniteMetricSpace::from_graph(&Graph::cycle(6));
        let lap = make_laplacian(&c, &c.all_points(), 1).unwrap();
        let json = OperatorJson::from_operator(&lap.delta).unwrap();
        assert_eq!(json.propagation, 1);
        let back = json.to_operator(&c).unwrap();
        assert!(back.entries().eq(lap.delta.entries()));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_json(&p, &vec![1, 2]).unwrap();
        write_json(&p, &vec![3]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap().trim(), "[\n  3\n]");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
