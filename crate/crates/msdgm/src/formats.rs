//! Text formats: graph JSON, statistic matrices and spectra dumps.

use std::io::Write;

use msdgm_core::partial::FrequencyEntry;
use msdgm_core::{DependenceGraph, EdgeStatisticMatrix, PartialDependenceField, SpectralMatrixField};
use serde::{Deserialize, Serialize};

use crate::SCHEMA_VERSION;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("unsupported graph document version {0}")]
    Version(u32),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] msdgm_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// On-disk form of a [`DependenceGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub version: u32,
    pub alpha: f64,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    pub statistics: Vec<Vec<f64>>,
}

impl From<&DependenceGraph> for GraphDocument {
    fn from(g: &DependenceGraph) -> Self {
        Self {
            version: SCHEMA_VERSION,
            alpha: g.alpha(),
            vertices: g
                .names()
                .iter()
                .enumerate()
                .map(|(id, name)| VertexDoc { id, name: name.clone() })
                .collect(),
            edges: g
                .edges()
                .map(|(source, target)| EdgeDoc {
                    source,
                    target,
                    weight: g.statistics().get(source, target),
                })
                .collect(),
            statistics: g.statistics().rows(),
        }
    }
}

pub fn graph_to_json(g: &DependenceGraph) -> String {
    let mut s = serde_json::to_string_pretty(&GraphDocument::from(g)).expect("graph document serializes");
    s.push('\n');
    s
}

/// Reads a document written by [`graph_to_json`].
pub fn graph_from_json(text: &str) -> Result<DependenceGraph, FormatError> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    if doc.version != SCHEMA_VERSION {
        return Err(FormatError::Version(doc.version));
    }
    let mut names = vec![String::new(); doc.vertices.len()];
    for v in &doc.vertices {
        let slot = names.get_mut(v.id).ok_or(msdgm_core::Error::UnknownVertex(v.id))?;
        *slot = v.name.clone();
    }
    let stats = EdgeStatisticMatrix::from_rows(&doc.statistics)?;
    for e in &doc.edges {
        if e.source >= stats.dim() || e.target >= stats.dim() {
            return Err(msdgm_core::Error::UnknownVertex(e.source.max(e.target)).into());
        }
        if e.weight != stats.get(e.source, e.target) {
            return Err(msdgm_core::Error::InconsistentEdge(e.source, e.target).into());
        }
    }
    Ok(DependenceGraph::from_parts(
        &names,
        doc.alpha,
        &stats,
        doc.edges.iter().map(|e| (e.source, e.target)),
    )?)
}

/// Symmetric delimited matrix with a header row of type names and the
/// name as the first field of every row.
pub fn write_statistics<W: Write>(
    stats: &EdgeStatisticMatrix,
    names: &[String],
    sink: W,
) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec![String::from("type")];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for (i, row) in stats.rows().iter().enumerate() {
        let mut rec = vec![names[i].clone()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One `p,q,i,j,real,imag` row per lattice point and matrix entry.
pub fn write_field<W: Write>(field: &SpectralMatrixField, sink: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["p", "q", "i", "j", "real", "imag"])?;
    let d = field.dim();
    for k in 0..field.grid().len() {
        let (p, q) = field.grid().point(k);
        let m = field.matrix(k);
        for i in 0..d {
            for j in 0..d {
                let z = m[(i, j)];
                w.write_record([
                    p.to_string(),
                    q.to_string(),
                    i.to_string(),
                    j.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One `p,q,i,j,abs_d` row per usable frequency and pair `i < j`; DC and
/// flagged frequencies are skipped.
pub fn write_partial<W: Write>(field: &PartialDependenceField, sink: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["p", "q", "i", "j", "abs_d"])?;
    let d = field.dim();
    for k in 0..field.grid().len() {
        let FrequencyEntry::Value(m) = field.entry(k) else {
            continue;
        };
        let (p, q) = field.grid().point(k);
        for i in 0..d {
            for j in (i + 1)..d {
                w.write_record([
                    p.to_string(),
                    q.to_string(),
                    i.to_string(),
                    j.to_string(),
                    m[(i, j)].norm().to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use msdgm_core::graph::build_msdgm;

    fn sample_graph(alpha: f64) -> DependenceGraph {
        let stats = EdgeStatisticMatrix::from_rows(&[
            vec![1.0, 0.7, 0.123456789012345],
            vec![0.7, 1.0, 0.31],
            vec![0.123456789012345, 0.31, 1.0],
        ])
        .unwrap();
        let names = vec!["red oak".to_string(), "elm".into(), "\"quoted\"".into()];
        build_msdgm(&stats, &names, alpha).unwrap()
    }

    #[test]
    fn json_round_trip() {
        for alpha in [0.1, 0.3, 0.6, 0.9] {
            let g = sample_graph(alpha);
            let text = graph_to_json(&g);
            assert_eq!(graph_from_json(&text).unwrap(), g);
        }
        let doc: serde_json::Value = serde_json::from_str(&graph_to_json(&sample_graph(0.6))).unwrap();
        assert_eq!(doc["version"], 1);
        assert_eq!(doc["edges"][0]["weight"], 0.7);
        assert_eq!(doc["statistics"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn json_rejects_tampering() {
        let g = sample_graph(0.6);
        let mut doc = GraphDocument::from(&g);
        doc.edges.clear();
        let text = serde_json::to_string(&doc).unwrap();
        assert!(graph_from_json(&text).is_err());
        let mut doc = GraphDocument::from(&g);
        doc.version = 99;
        assert!(matches!(
            graph_from_json(&serde_json::to_string(&doc).unwrap()),
            Err(FormatError::Version(99))
        ));
    }

    #[test]
    fn statistics_matrix_is_symmetric_text() {
        let g = sample_graph(0.3);
        let mut buf = Vec::new();
        write_statistics(g.statistics(), g.names(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "type,red oak,elm,\"\"\"quoted\"\"\"");
        assert_eq!(lines[1], "red oak,1,0.7,0.123456789012345");
        assert_eq!(lines.len(), 4);
    }
}
