//! JSON system and certificate files, CSV trajectory traces.
//!
//! Matrices are row-major nested arrays. Nodes are referenced by name; mode
//! labels may be given either as a 1-based integer or as the mode's name.
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! write-then-read cycle reproduces every value bit for bit.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::automaton::{Edge, SwitchingGraph};
use crate::error::{Error, Result};
use crate::l1cert::{L1Certificate, StabilityCertificate};
use crate::l2cert::{L2Certificate, L2StabilityCertificate};
use crate::linalg::DenseMatrix;
use crate::models::{Dimensions, ModeMatrices, SystemDescription, SystemKind};
use crate::simulate::Trajectory;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelRef {
    Index(u64),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionsFile {
    pub n: usize,
    pub q: usize,
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeFile {
    pub label: LabelRef,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub from: String,
    pub label: LabelRef,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub kind: String,
    pub dimensions: DimensionsFile,
    pub modes: Vec<ModeFile>,
    pub graph: GraphFile,
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<DenseMatrix> {
    DenseMatrix::from_rows(rows).map_err(|e| Error::input(format!("{what}: {e}")))
}

fn rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    m.row_vecs()
}

impl SystemFile {
    pub fn from_system(s: &SystemDescription) -> Self {
        SystemFile {
            kind: s.kind.to_string(),
            dimensions: DimensionsFile { n: s.dims.n, q: s.dims.q, r: s.dims.r },
            modes: s
                .modes
                .iter()
                .map(|m| ModeFile {
                    label: LabelRef::Name(m.name.clone()),
                    a: rows(&m.a),
                    b: rows(&m.b),
                    c: rows(&m.c),
                    d: rows(&m.d),
                })
                .collect(),
            graph: GraphFile {
                nodes: s.graph.nodes().to_vec(),
                edges: s
                    .graph
                    .edges()
                    .iter()
                    .map(|e| EdgeFile {
                        from: s.graph.node_name(e.from).to_string(),
                        label: LabelRef::Name(s.mode(e.label).name.clone()),
                        to: s.graph.node_name(e.to).to_string(),
                    })
                    .collect(),
            },
        }
    }

    /// Converts to a description without running the semantic checks, so
    /// that validation can report every problem at once.
    pub fn to_system_unchecked(&self) -> Result<SystemDescription> {
        let kind = match self.kind.as_str() {
            "pss" => SystemKind::Pss,
            "gss" => SystemKind::Gss,
            other => return Err(Error::input(format!("unknown system kind '{other}' (expected pss or gss)"))),
        };
        let mut modes = Vec::with_capacity(self.modes.len());
        for (i, m) in self.modes.iter().enumerate() {
            let name = match &m.label {
                LabelRef::Name(n) => n.clone(),
                LabelRef::Index(k) if *k as usize == i + 1 => format!("m{k}"),
                LabelRef::Index(k) => {
                    return Err(Error::input(format!("mode #{} carries integer label {k}; integer labels must be listed in order 1, 2, ...", i + 1)))
                }
            };
            if modes.iter().any(|x: &ModeMatrices| x.name == name) {
                return Err(Error::input(format!("duplicate mode label '{name}'")));
            }
            let ctx = |x: &str| format!("mode {name} matrix {x}");
            modes.push(ModeMatrices::new(
                name.clone(),
                matrix(&m.a, &ctx("A"))?,
                matrix(&m.b, &ctx("B"))?,
                matrix(&m.c, &ctx("C"))?,
                matrix(&m.d, &ctx("D"))?,
            ));
        }
        let nodes = &self.graph.nodes;
        let node = |name: &str| {
            nodes.iter().position(|n| n == name).ok_or_else(|| Error::input(format!("edge references unknown node '{name}'")))
        };
        let mut edges = Vec::with_capacity(self.graph.edges.len());
        for e in &self.graph.edges {
            let label = match &e.label {
                LabelRef::Index(k) if *k >= 1 => *k as usize - 1,
                LabelRef::Index(k) => return Err(Error::input(format!("mode label {k} is not 1-based"))),
                LabelRef::Name(n) => {
                    modes.iter().position(|m| &m.name == n).ok_or_else(|| Error::input(format!("edge references unknown mode '{n}'")))?
                }
            };
            edges.push(Edge::new(node(&e.from)?, label, node(&e.to)?));
        }
        let d = &self.dimensions;
        Ok(SystemDescription {
            kind,
            dims: Dimensions { n: d.n, q: d.q, r: d.r },
            graph: SwitchingGraph::new(nodes.clone(), edges, modes.len()),
            modes,
        })
    }
}

pub fn system_to_json(s: &SystemDescription) -> String {
    serde_json::to_string_pretty(&SystemFile::from_system(s)).expect("serializable")
}

pub fn parse_system_unchecked(text: &str) -> Result<SystemDescription> {
    serde_json::from_str::<SystemFile>(text)?.to_system_unchecked()
}

/// Parses and rejects documents with hard validation errors.
pub fn parse_system(text: &str) -> Result<SystemDescription> {
    let s = parse_system_unchecked(text)?;
    s.ensure_valid()?;
    Ok(s)
}

pub fn read_system(path: &std::path::Path) -> Result<SystemDescription> {
    parse_system(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    L1(L1Certificate),
    L2(L2Certificate),
    L1Stability(StabilityCertificate),
    L2Stability(L2StabilityCertificate),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::L1(_) => "l1",
            Certificate::L2(_) => "l2",
            Certificate::L1Stability(_) => "l1-stability",
            Certificate::L2Stability(_) => "l2-stability",
        }
    }

    pub fn margin(&self) -> f64 {
        match self {
            Certificate::L1(c) => c.margin,
            Certificate::L2(c) => c.margin,
            Certificate::L1Stability(c) => c.margin,
            Certificate::L2Stability(c) => c.margin,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            Certificate::L1(c) => Some(c.gamma),
            Certificate::L2(c) => Some(c.gamma),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum CertificateFile {
    #[serde(rename = "l1")]
    L1 { gamma: f64, margin: f64, p: IndexMap<String, Vec<f64>> },
    #[serde(rename = "l2")]
    L2 {
        gamma: f64,
        margin: f64,
        #[serde(rename = "P")]
        p: IndexMap<String, Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input_weight: Option<Vec<Vec<f64>>>,
    },
    #[serde(rename = "l1-stability")]
    L1Stability { margin: f64, p: IndexMap<String, Vec<f64>> },
    #[serde(rename = "l2-stability")]
    L2Stability {
        margin: f64,
        #[serde(rename = "P")]
        p: IndexMap<String, Vec<Vec<f64>>>,
    },
}

fn by_node<T: Clone>(g: &SwitchingGraph, values: &[T]) -> IndexMap<String, T> {
    g.nodes().iter().cloned().zip(values.iter().cloned()).collect()
}

/// Reorders a name-keyed map into graph node order; the names must match exactly.
fn in_node_order<T>(g: &SwitchingGraph, mut map: IndexMap<String, T>) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(g.node_count());
    for name in g.nodes() {
        out.push(map.shift_remove(name).ok_or_else(|| Error::input(format!("certificate has no entry for node '{name}'")))?);
    }
    if let Some((extra, _)) = map.first() {
        return Err(Error::input(format!("certificate names unknown node '{extra}'")));
    }
    Ok(out)
}

fn matrices(g: &SwitchingGraph, map: IndexMap<String, Vec<Vec<f64>>>) -> Result<Vec<DenseMatrix>> {
    in_node_order(g, map)?.iter().map(|m| matrix(m, "certificate matrix")).collect()
}

pub fn certificate_to_json(s: &SystemDescription, cert: &Certificate) -> String {
    let g = &s.graph;
    let file = match cert {
        Certificate::L1(c) => CertificateFile::L1 { gamma: c.gamma, margin: c.margin, p: by_node(g, &c.p) },
        Certificate::L2(c) => CertificateFile::L2 {
            gamma: c.gamma,
            margin: c.margin,
            p: by_node(g, &c.p.iter().map(rows).collect::<Vec<_>>()),
            input_weight: c.input_weight.as_ref().map(rows),
        },
        Certificate::L1Stability(c) => CertificateFile::L1Stability { margin: c.margin, p: by_node(g, &c.p) },
        Certificate::L2Stability(c) => {
            CertificateFile::L2Stability { margin: c.margin, p: by_node(g, &c.p.iter().map(rows).collect::<Vec<_>>()) }
        }
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn parse_certificate(s: &SystemDescription, text: &str) -> Result<Certificate> {
    let g = &s.graph;
    Ok(match serde_json::from_str::<CertificateFile>(text)? {
        CertificateFile::L1 { gamma, margin, p } => Certificate::L1(L1Certificate { gamma, margin, p: in_node_order(g, p)? }),
        CertificateFile::L2 { gamma, margin, p, input_weight } => Certificate::L2(L2Certificate {
            gamma,
            margin,
            p: matrices(g, p)?,
            input_weight: input_weight.map(|w| matrix(&w, "input weight")).transpose()?,
        }),
        CertificateFile::L1Stability { margin, p } => {
            Certificate::L1Stability(StabilityCertificate { margin, p: in_node_order(g, p)? })
        }
        CertificateFile::L2Stability { margin, p } => {
            Certificate::L2Stability(L2StabilityCertificate { margin, p: matrices(g, p)? })
        }
    })
}

/// Columns `t, node, mode, x1.., w1.., z1.., V`; the final row carries only
/// the terminal state.
pub fn write_trace<W: Write>(
    out: W,
    s: &SystemDescription,
    traj: &Trajectory,
    values: Option<&[f64]>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "node".into(), "mode".into()];
    header.extend((1..=s.dims.n).map(|i| format!("x{i}")));
    header.extend((1..=s.dims.q).map(|i| format!("w{i}")));
    header.extend((1..=s.dims.r).map(|i| format!("z{i}")));
    if values.is_some() {
        header.push("V".into());
    }
    w.write_record(&header)?;
    let nodes = traj.walk.nodes();
    for t in 0..=traj.len() {
        let mut rec = vec![t.to_string(), s.graph.node_name(nodes[t]).to_string()];
        let step = (t < traj.len()).then_some(t);
        rec.push(step.map_or(String::new(), |t| s.mode(traj.walk.steps[t].label).name.clone()));
        rec.extend(traj.x[t].iter().map(f64::to_string));
        let blank = |k: usize| std::iter::repeat_n(String::new(), k);
        match step {
            Some(t) => {
                rec.extend(traj.w[t].iter().map(f64::to_string));
                rec.extend(traj.z[t].iter().map(f64::to_string));
            }
            None => rec.extend(blank(s.dims.q + s.dims.r)),
        }
        if let Some(v) = values {
            rec.push(v[t].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_virus_example, VirusParams};

    #[test]
    fn system_round_trip_is_exact() {
        let s = build_virus_example(VirusParams { k_c_quarantine: 0.7, ..VirusParams::default() }).unwrap();
        let back = parse_system(&system_to_json(&s)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn integer_labels_accepted() {
        let text = r#"{"kind":"pss","dimensions":{"n":1,"q":1,"r":1},
            "modes":[{"label":1,"A":[[0.5]],"B":[[1]],"C":[[1]],"D":[[0]]}],
            "graph":{"nodes":["v1"],"edges":[{"from":"v1","label":1,"to":"v1"}]}}"#;
        let s = parse_system(text).unwrap();
        assert_eq!(s.modes[0].name, "m1");
        assert_eq!(s.graph.edges()[0], Edge::new(0, 0, 0));
    }

    #[test]
    fn bad_documents() {
        assert!(parse_system("{not json").is_err());
        let sink = r#"{"kind":"pss","dimensions":{"n":1,"q":1,"r":1},
            "modes":[{"label":"m1","A":[[0.5]],"B":[[1]],"C":[[1]],"D":[[0]]}],
            "graph":{"nodes":["v1","v2"],"edges":[{"from":"v1","label":"m1","to":"v2"}]}}"#;
        let err = parse_system(sink).unwrap_err().to_string();
        assert!(err.contains("v2"), "{err}");
        assert!(parse_system_unchecked(sink).is_ok());
        let unknown = sink.replace(r#""to":"v2""#, r#""to":"v7""#);
        assert!(parse_system_unchecked(&unknown).is_err());
    }

    #[test]
    fn certificate_round_trip_and_node_names() {
        let s = build_virus_example(VirusParams::default()).unwrap();
        let cert = Certificate::L1(L1Certificate {
            gamma: 9451.123456789,
            margin: 1e-7,
            p: (0..4).map(|i| vec![0.1 + i as f64 / 3.0, 2.0, 1e-6]).collect(),
        });
        let text = certificate_to_json(&s, &cert);
        assert_eq!(parse_certificate(&s, &text).unwrap(), cert);
        let renamed = text.replace("\"v3\"", "\"w3\"");
        assert!(parse_certificate(&s, &renamed).is_err());
    }

    #[test]
    fn l2_certificate_round_trip() {
        let s = build_virus_example(VirusParams::default()).unwrap();
        let p: Vec<DenseMatrix> = (0..4).map(|i| DenseMatrix::identity(3).scale(1.0 / (i as f64 + 3.0))).collect();
        let cert = Certificate::L2(L2Certificate { gamma: 4.0, p, margin: 1e-6, input_weight: None });
        assert_eq!(parse_certificate(&s, &certificate_to_json(&s, &cert)).unwrap(), cert);
    }
}
