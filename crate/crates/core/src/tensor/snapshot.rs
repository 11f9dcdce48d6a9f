//! Binary tensor snapshots: `b"TLS3"`, then `n1, n2, n3` as little-endian
//! `u32`, then `n1*n2*n3` little-endian `f64` values in storage order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::Tensor3;
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"TLS3";

impl Tensor3 {
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(SNAPSHOT_MAGIC)?;
        let (n1, n2, n3) = self.dims();
        for n in [n1, n2, n3] {
            let n = u32::try_from(n).map_err(|_| {
                std::io::Error::new(std::io::ErrorKind::InvalidInput, "tensor dim exceeds u32")
            })?;
            w.write_all(&n.to_le_bytes())?;
        }
        for x in self.as_slice() {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_snapshot_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(16 + 8 * self.len());
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn from_snapshot_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        if bytes.len() < 16 || &bytes[..4] != SNAPSHOT_MAGIC {
            return Err("missing TLS3 header".into());
        }
        let dim = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let (n1, n2, n3) = (dim(4), dim(8), dim(12));
        let expected = n1
            .checked_mul(n2)
            .and_then(|x| x.checked_mul(n3))
            .and_then(|x| x.checked_mul(8))
            .ok_or("tensor dims overflow")?;
        let body = &bytes[16..];
        if body.len() != expected {
            return Err(format!(
                "payload is {} bytes, dims {n1}x{n2}x{n3} need {expected}",
                body.len()
            ));
        }
        let data = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Tensor3::from_vec(n1, n2, n3, data).map_err(|e| e.to_string())
    }
}

pub fn write_snapshot(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    t.write_to(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Tensor3> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    Tensor3::from_snapshot_bytes(&bytes)
        .map_err(|reason| Error::Format { path: path.to_path_buf(), reason })
}
