use serde_json::{json, Value};

use super::SampleResult;
use crate::error::{Error, Result};

pub const TRACE_MAGIC: &[u8; 4] = b"GSTR";
const TRACE_VERSION: u32 = 1;

/// JSON view of a result: layers, local→original id map, fallback count.
pub fn result_to_json(r: &SampleResult) -> Value {
    json!({
        "category": r.category.as_str(),
        "batch_index": r.batch_index,
        "layers": r.layers,
        "id_map": r.id_map.globals(),
        "fallback_count": r.fallback_count,
    })
}

/// Binary trace: magic, version u32, count u64, then `count` u64 positions.
pub fn write_trace(positions: &[u64]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(16 + 8 * positions.len());
    buf.extend_from_slice(TRACE_MAGIC);
    buf.extend_from_slice(&TRACE_VERSION.to_le_bytes());
    buf.extend_from_slice(&(positions.len() as u64).to_le_bytes());
    for p in positions {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    buf
}

pub fn read_trace(bytes: &[u8]) -> Result<Vec<u64>> {
    if bytes.len() < 16 || &bytes[..4] != TRACE_MAGIC {
        return Err(Error::Format("not a GSTR trace".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != TRACE_VERSION {
        return Err(Error::Version {
            found: version,
            expected: TRACE_VERSION,
        });
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let body = &bytes[16..];
    if Some(body.len()) != count.checked_mul(8) {
        return Err(Error::Format(format!(
            "trace declares {count} positions but holds {} bytes",
            body.len()
        )));
    }
    Ok(body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}
