use std::fs;
use std::path::Path;

use super::{Graph, NodeId};
use crate::codec::{finish, Reader};
use crate::error::{Error, Result};

const CSR_MAGIC: &[u8; 4] = b"GSMP";
const CSR_VERSION: u32 = 1;

/// Reads a whitespace-separated `src dst` edge list.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, directed)
}

pub fn parse_edge_list(text: &str, directed: bool) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_id: Option<NodeId> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let mut fields = line.split_whitespace();
        let mut next = |what: &str| -> Result<NodeId> {
            let tok = fields.next().ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("missing {what} id"),
            })?;
            tok.parse::<NodeId>().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("bad {what} id {tok:?}: {e}"),
            })
        };
        let u = next("source")?;
        let v = next("target")?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "expected exactly two ids".into(),
            });
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }
    let Some(max_id) = max_id else {
        return Err(Error::EmptyEdgeList);
    };
    Graph::from_edges(max_id as usize + 1, &edges, directed)
}

/// Serializes `g` into the binary CSR cache layout.
pub fn write_csr(g: &Graph) -> Vec<u8> {
    let mut buf = Vec::with_capacity(24 + 8 * (g.num_nodes() + 1) + 4 * g.num_entries() + 4);
    buf.extend_from_slice(CSR_MAGIC);
    buf.extend_from_slice(&CSR_VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.num_nodes() as u64).to_le_bytes());
    buf.extend_from_slice(&(g.num_entries() as u64).to_le_bytes());
    for &o in g.offsets() {
        buf.extend_from_slice(&(o as u64).to_le_bytes());
    }
    for &x in g.indices() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    finish(buf)
}

/// Parses the binary CSR cache layout.
///
/// The layout carries no directedness flag; a graph is restored as
/// undirected exactly when its rows are symmetric.
pub fn read_csr(bytes: &[u8]) -> Result<Graph> {
    let mut r = Reader::open(bytes, CSR_MAGIC)?;
    let version = r.u32()?;
    if version != CSR_VERSION {
        return Err(Error::Version {
            found: version,
            expected: CSR_VERSION,
        });
    }
    let n = r.u64()? as usize;
    let m = r.u64()? as usize;
    let expected = n
        .checked_add(1)
        .and_then(|x| x.checked_mul(8))
        .and_then(|x| x.checked_add(m.checked_mul(4)?))
        .ok_or_else(|| Error::Format("size fields overflow".into()))?;
    if r.remaining() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes, header implies {expected}",
            r.remaining()
        )));
    }
    let offsets = (0..=n).map(|_| r.u64().map(|x| x as usize)).collect::<Result<Vec<_>>>()?;
    let indices = (0..m).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    let probe = Graph::from_csr(n, offsets, indices, true)?;
    if probe.is_symmetric() {
        Graph::from_csr(n, probe.offsets, probe.indices, false)
    } else {
        Ok(probe)
    }
}

pub fn save_csr(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    crate::codec::write_atomic(path, &write_csr(g))
}

pub fn load_csr(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_csr(&bytes)
}
