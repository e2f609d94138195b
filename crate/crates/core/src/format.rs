//! JSON document describing a chain complex, either directly by boundary
//! matrices or as a simplicial complex with an optional edge local system.
//!
//! ```json
//! {
//!   "dims": [1, 1],
//!   "boundaries": [[[3.0]]]
//! }
//! ```
//!
//! Cocycle keys are edges written `"a-b"`; the matrix transports the fiber at
//! `a` to the fiber at `b`. Homology basis vectors are listed per degree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, HomologyBasis};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::topology::{twist, EdgeCocycle, SimplicialComplex};

type Rows = Vec<Vec<f64>>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    #[serde(default)]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub boundaries: Vec<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplices: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<BTreeMap<String, Rows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology_basis: Option<Vec<Rows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn matrix(key: &str, rows: usize, cols: usize, data: &Rows) -> Result<Matrix> {
    let shape_err = || {
        Error::Parse(format!(
            "{key}: expected a {rows}x{cols} matrix, found {} rows",
            data.len()
        ))
    };
    if rows == 0 {
        return if data.is_empty() {
            Ok(Matrix::zeros(0, cols))
        } else {
            Err(shape_err())
        };
    }
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(shape_err());
    }
    Matrix::from_rows(data, cols).map_err(|e| Error::Parse(format!("{key}: {e}")))
}

fn square(key: &str, data: &Rows) -> Result<Matrix> {
    matrix(key, data.len(), data.len(), data)
}

fn edge_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("cocycle.{key}: edge keys look like \"0-1\""));
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

impl ComplexFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let msg = msg.split(" at line").next().unwrap_or(&msg).to_string();
            Error::Parse(format!("line {}, column {}: {msg}", e.line(), e.column()))
        })
    }

    /// Pretty-printed with keys in declaration order and a trailing newline.
    pub fn write(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_chain_complex(c: &ChainComplex) -> Self {
        ComplexFile {
            dims: c.dims().to_vec(),
            boundaries: c.boundaries().iter().map(Matrix::to_rows).collect(),
            label: (!c.label().is_empty()).then(|| c.label().to_string()),
            ..Default::default()
        }
    }

    /// Records the simplices and local system together with the twisted
    /// boundary matrices they determine.
    pub fn from_simplicial(
        k: &SimplicialComplex,
        rho: Option<&EdgeCocycle>,
        label: Option<String>,
    ) -> Result<Self> {
        let c = match rho {
            Some(rho) => twist(k, rho, k.vertices()[0])?,
            None => k.boundary_matrices(),
        };
        let cocycle = rho.map(|rho| {
            rho.edges()
                .iter()
                .map(|(&(a, b), m)| (format!("{a}-{b}"), m.to_rows()))
                .collect()
        });
        Ok(ComplexFile {
            simplices: Some(k.all_simplices().to_vec()),
            cocycle,
            label,
            ..ComplexFile::from_chain_complex(&c)
        })
    }

    pub fn simplicial(&self) -> Result<Option<(SimplicialComplex, Option<EdgeCocycle>)>> {
        let Some(simplices) = &self.simplices else {
            if self.cocycle.is_some() {
                return Err(Error::Parse("cocycle: requires \"simplices\"".into()));
            }
            return Ok(None);
        };
        let k = SimplicialComplex::new(simplices.clone())
            .map_err(|e| Error::Parse(format!("simplices: {e}")))?;
        let rho = match &self.cocycle {
            None => None,
            Some(map) => {
                let mut edges = BTreeMap::new();
                let mut fiber = None;
                for (key, rows) in map {
                    let m = square(&format!("cocycle.{key}"), rows)?;
                    if *fiber.get_or_insert(m.rows()) != m.rows() {
                        return Err(Error::Parse(format!(
                            "cocycle.{key}: fiber dimension mismatch"
                        )));
                    }
                    edges.insert(edge_key(key)?, m);
                }
                let fiber = fiber.ok_or_else(|| Error::Parse("cocycle: no edges".into()))?;
                Some(
                    EdgeCocycle::new(fiber, edges)
                        .map_err(|e| Error::Parse(format!("cocycle: {e}")))?,
                )
            }
        };
        Ok(Some((k, rho)))
    }

    pub fn to_chain_complex(&self) -> Result<ChainComplex> {
        let label = self.label.clone().unwrap_or_default();
        if let Some((k, rho)) = self.simplicial()? {
            let c = match &rho {
                Some(rho) => twist(&k, rho, k.vertices()[0])?,
                None => k.boundary_matrices(),
            };
            if !self.dims.is_empty() && self.dims != c.dims() {
                return Err(Error::Parse(format!(
                    "dims: {:?} disagrees with the simplices, which give {:?}",
                    self.dims,
                    c.dims()
                )));
            }
            if !self.boundaries.is_empty() {
                if self.boundaries.len() != c.boundaries().len() {
                    return Err(Error::Parse("boundaries: wrong number of matrices".into()));
                }
                for (i, (rows, d)) in self.boundaries.iter().zip(c.boundaries()).enumerate() {
                    let m = matrix(&format!("boundaries[{i}]"), d.rows(), d.cols(), rows)?;
                    if m.sub(d).max_abs() > 1e-9 * d.max_abs().max(1.0) {
                        return Err(Error::Parse(format!(
                            "boundaries[{i}]: disagrees with the simplices"
                        )));
                    }
                }
            }
            return Ok(c.with_label(label));
        }
        if self.dims.is_empty() {
            return Err(Error::Parse("dims: missing".into()));
        }
        if self.boundaries.len() + 1 != self.dims.len() {
            return Err(Error::Parse(format!(
                "boundaries: expected {} matrices for {} degrees, found {}",
                self.dims.len() - 1,
                self.dims.len(),
                self.boundaries.len()
            )));
        }
        let boundaries = self
            .boundaries
            .iter()
            .enumerate()
            .map(|(i, rows)| {
                matrix(
                    &format!("boundaries[{i}]"),
                    self.dims[i],
                    self.dims[i + 1],
                    rows,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        ChainComplex::new(self.dims.clone(), boundaries, label)
    }

    /// Homology basis with vectors as columns, checked against `dims`.
    pub fn homology_basis(&self, dims: &[usize]) -> Result<Option<HomologyBasis>> {
        let Some(per_degree) = &self.homology_basis else {
            return Ok(None);
        };
        if per_degree.len() != dims.len() {
            return Err(Error::Parse(format!(
                "homology_basis: expected {} degrees, found {}",
                dims.len(),
                per_degree.len()
            )));
        }
        let bases = per_degree
            .iter()
            .zip(dims)
            .enumerate()
            .map(|(q, (vectors, &n))| {
                if vectors.iter().any(|v| v.len() != n) {
                    return Err(Error::Parse(format!(
                        "homology_basis[{q}]: vectors must have length {n}"
                    )));
                }
                if vectors.is_empty() {
                    return Ok(Matrix::zeros(n, 0));
                }
                Ok(Matrix::from_columns(n, vectors))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(HomologyBasis { bases }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::circle_model;
    use crate::topology::barycentric_subdivide;

    const C3: &str = "{\n  \"dims\": [\n    1,\n    1\n  ],\n  \"boundaries\": [\n    [\n      [\n        3.0\n      ]\n    ]\n  ]\n}\n";

    #[test]
    fn two_term_round_trip() {
        let f = ComplexFile::parse(C3).unwrap();
        assert_eq!(f.write(), C3);
        let t = f.to_chain_complex().unwrap().torsion_def(None).unwrap();
        assert!((t.tau - 3.0).abs() < 1e-14);
    }

    #[test]
    fn errors_name_line_or_key() {
        let e = ComplexFile::parse("{\n  \"dims\": [1],\n  \"extra\": 1\n}").unwrap_err();
        assert!(
            matches!(&e, Error::Parse(m) if m.contains("line 3") && m.contains("extra")),
            "{e}"
        );
        let e = ComplexFile::parse("{\"dims\": [1, 2], \"boundaries\": [[[1.0]]]}")
            .unwrap()
            .to_chain_complex()
            .unwrap_err();
        assert!(
            matches!(&e, Error::Parse(m) if m.contains("boundaries[0]")),
            "{e}"
        );
        let e =
            ComplexFile::parse("{\"dims\": [1, 1], \"boundaries\": [[[1.0]]], \"cocycle\": {}}")
                .unwrap()
                .to_chain_complex()
                .unwrap_err();
        assert!(matches!(&e, Error::Parse(m) if m.starts_with("cocycle")));
    }

    #[test]
    fn zero_row_boundaries() {
        let f = ComplexFile::parse(r#"{"dims": [0, 2], "boundaries": [[]]}"#).unwrap();
        let c = f.to_chain_complex().unwrap();
        assert_eq!(c.boundary(1).shape(), (0, 2));
        assert_eq!(c.homology_dims().unwrap(), vec![0, 2]);
    }

    #[test]
    fn simplicial_with_cocycle() {
        let theta = 2.0 * std::f64::consts::PI / 7.0;
        let (k, rho) = circle_model(3, theta).unwrap();
        let (k, rho) = barycentric_subdivide(&k, &rho).unwrap();
        let f = ComplexFile::from_simplicial(&k, Some(&rho), Some("circle".into())).unwrap();
        let text = f.write();
        let g = ComplexFile::parse(&text).unwrap();
        assert_eq!(g.write(), text);
        let t = g.to_chain_complex().unwrap().torsion_def(None).unwrap();
        assert!((t.tau - (2.0 * (theta / 2.0).sin()).powi(2)).abs() < 1e-12);
        assert_eq!(g.to_chain_complex().unwrap().label(), "circle");
    }

    #[test]
    fn homology_basis_from_file() {
        let f = ComplexFile::parse(
            r#"{"dims": [1, 1], "boundaries": [[[0.0]]], "homology_basis": [[[2.0]], [[1.0]]]}"#,
        )
        .unwrap();
        let c = f.to_chain_complex().unwrap();
        let h = f.homology_basis(c.dims()).unwrap().unwrap();
        let t = c.torsion_def(Some(&h)).unwrap();
        // scaling h_0 by 2 scales tau by 2^{(-1)^0}
        assert!((t.tau - 2.0).abs() < 1e-12, "{}", t.tau);
    }
}
