//! Versioned binary container for trained models and n-gram indexes.
//!
//! Layout: 8-byte magic, u32 version, u64 JSON header length, the JSON
//! header (configuration and metadata), then a payload of fixed-width
//! little-endian records. Readers reject unknown magic or versions.

use std::fs;
use std::io::{Cursor, Read, Write};
use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use crate::error::{Error, Result};

pub const VERSION: u32 = 1;

pub struct Container<H> {
    pub header: H,
    pub payload: Vec<u8>,
}

pub fn write_container<H: Serialize>(
    path: &Path,
    magic: &[u8; 8],
    header: &H,
    payload: &[u8],
) -> Result<()> {
    let header_json = serde_json::to_vec(header)?;
    let mut out = Vec::with_capacity(24 + header_json.len() + payload.len());
    out.extend_from_slice(magic);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(header_json.len() as u64).to_le_bytes());
    out.extend_from_slice(&header_json);
    out.extend_from_slice(payload);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

pub fn read_container<H: DeserializeOwned>(path: &Path, magic: &[u8; 8]) -> Result<Container<H>> {
    let bytes = fs::read(path)?;
    let mut cur = Cursor::new(bytes);
    let mut got_magic = [0u8; 8];
    cur.read_exact(&mut got_magic)
        .map_err(|_| format_err(path, "truncated header"))?;
    if &got_magic != magic {
        return Err(format_err(path, "unrecognized magic"));
    }
    let version = read_u32(&mut cur).ok_or_else(|| format_err(path, "truncated version"))?;
    if version != VERSION {
        return Err(format_err(path, &format!("unsupported version {version}")));
    }
    let header_len =
        read_u64(&mut cur).ok_or_else(|| format_err(path, "truncated header length"))? as usize;
    let mut header_json = vec![0u8; header_len];
    cur.read_exact(&mut header_json)
        .map_err(|_| format_err(path, "truncated json header"))?;
    let header = serde_json::from_slice(&header_json)?;
    let mut payload = Vec::new();
    cur.read_to_end(&mut payload)?;
    Ok(Container { header, payload })
}

fn format_err(path: &Path, reason: &str) -> Error {
    Error::ModelFormat {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

fn read_u32(cur: &mut Cursor<Vec<u8>>) -> Option<u32> {
    let mut buf = [0u8; 4];
    cur.read_exact(&mut buf).ok()?;
    Some(u32::from_le_bytes(buf))
}

fn read_u64(cur: &mut Cursor<Vec<u8>>) -> Option<u64> {
    let mut buf = [0u8; 8];
    cur.read_exact(&mut buf).ok()?;
    Some(u64::from_le_bytes(buf))
}

/// Encodes sparse (index, weight) pairs as the payload.
pub fn encode_sparse_weights(pairs: &[(u32, f64)]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + pairs.len() * 12);
    out.extend_from_slice(&(pairs.len() as u64).to_le_bytes());
    for &(i, w) in pairs {
        out.extend_from_slice(&i.to_le_bytes());
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

pub fn decode_sparse_weights(payload: &[u8], path: &Path) -> Result<Vec<(u32, f64)>> {
    if payload.len() < 8 {
        return Err(format_err(path, "truncated payload"));
    }
    let count = u64::from_le_bytes(payload[..8].try_into().unwrap()) as usize;
    let expected = 8 + count * 12;
    if payload.len() != expected {
        return Err(format_err(
            path,
            &format!("payload size {} != expected {expected}", payload.len()),
        ));
    }
    let mut pairs = Vec::with_capacity(count);
    for rec in payload[8..].chunks_exact(12) {
        let idx = u32::from_le_bytes(rec[..4].try_into().unwrap());
        let w = f64::from_le_bytes(rec[4..].try_into().unwrap());
        pairs.push((idx, w));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Header {
        kind: String,
        buckets: usize,
    }

    const MAGIC: &[u8; 8] = b"CCTEST01";

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        let header = Header { kind: "demo".into(), buckets: 32 };
        let payload = encode_sparse_weights(&[(3, 0.5), (17, -1.25)]);
        write_container(&path, MAGIC, &header, &payload).unwrap();

        let loaded: Container<Header> = read_container(&path, MAGIC).unwrap();
        assert_eq!(loaded.header, header);
        assert_eq!(
            decode_sparse_weights(&loaded.payload, &path).unwrap(),
            vec![(3, 0.5), (17, -1.25)]
        );
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        let header = Header { kind: "demo".into(), buckets: 1 };
        write_container(&path, MAGIC, &header, &[]).unwrap();
        let res: Result<Container<Header>> = read_container(&path, b"WRONG!!!");
        assert!(res.is_err());
    }
}
