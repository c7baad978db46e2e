//! Batch files.
//!
//! Binary layout (little endian): the magic `EXLBATCH`, a `u32` format
//! version, a `u64` metadata length and that many bytes of JSON metadata,
//! then per record `path_index: u64, tau: f64, exited: u8` followed by the
//! exit coordinates as `f64`.
//!
//! CSV layout: a `# exitlab-batch v<version>` line, a `# meta <json>` line,
//! the column header `path_index,tau,exited,x0,x1,...` and one row per path.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use super::{ExitBatch, ExitRecord, SimConfig};
use crate::space::{DomainSpec, SpaceSpec};
use crate::{Error, Result};

pub const BATCH_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"EXLBATCH";

#[derive(Serialize, Deserialize)]
struct Meta {
    config: SimConfig,
    space: SpaceSpec,
    domain: DomainSpec,
    start: Vec<f64>,
    coord_dim: usize,
    records: usize,
}

fn meta(batch: &ExitBatch) -> Result<Meta> {
    let coord_dim = batch.records.first().map_or(0, |r| r.exit_point.len());
    if batch.records.iter().any(|r| r.exit_point.len() != coord_dim) {
        return Err(Error::Format("records disagree on coordinate dimension".into()));
    }
    Ok(Meta {
        config: batch.config.clone(),
        space: batch.space.clone(),
        domain: batch.domain.clone(),
        start: batch.start.clone(),
        coord_dim,
        records: batch.records.len(),
    })
}

pub fn write_batch(batch: &ExitBatch, mut out: impl Write) -> Result<()> {
    let json = serde_json::to_vec(&meta(batch)?)?;
    out.write_all(MAGIC)?;
    out.write_all(&BATCH_FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    for r in &batch.records {
        out.write_all(&r.path_index.to_le_bytes())?;
        out.write_all(&r.tau.to_le_bytes())?;
        out.write_all(&[r.exited as u8])?;
        for x in &r.exit_point {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_array<const N: usize>(input: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input
        .read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated batch file: {e}")))?;
    Ok(buf)
}

pub fn read_batch(mut input: impl Read) -> Result<ExitBatch> {
    let magic: [u8; 8] = read_array(&mut input)?;
    if &magic != MAGIC {
        return Err(Error::Format("not an exitlab batch file".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut input)?);
    if version != BATCH_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "batch format version {version}, expected {BATCH_FORMAT_VERSION}"
        )));
    }
    let len = u64::from_le_bytes(read_array(&mut input)?) as usize;
    if len > 1 << 24 {
        return Err(Error::Format(format!("implausible metadata length {len}")));
    }
    let mut json = vec![0u8; len];
    input
        .read_exact(&mut json)
        .map_err(|e| Error::Format(format!("truncated metadata: {e}")))?;
    let meta: Meta = serde_json::from_slice(&json)?;
    let mut records = Vec::with_capacity(meta.records.min(1 << 24));
    for _ in 0..meta.records {
        let path_index = u64::from_le_bytes(read_array(&mut input)?);
        let tau = f64::from_le_bytes(read_array(&mut input)?);
        let [flag] = read_array::<1>(&mut input)?;
        let mut exit_point = Vec::with_capacity(meta.coord_dim);
        for _ in 0..meta.coord_dim {
            exit_point.push(f64::from_le_bytes(read_array(&mut input)?));
        }
        records.push(ExitRecord {
            path_index,
            tau,
            exited: flag != 0,
            exit_point,
        });
    }
    Ok(ExitBatch {
        records,
        config: meta.config,
        space: meta.space,
        domain: meta.domain,
        start: meta.start,
    })
}

pub fn write_batch_csv(batch: &ExitBatch, mut out: impl Write) -> Result<()> {
    let meta = meta(batch)?;
    writeln!(out, "# exitlab-batch v{BATCH_FORMAT_VERSION}")?;
    writeln!(out, "# meta {}", serde_json::to_string(&meta)?)?;
    let mut header = String::from("path_index,tau,exited");
    for k in 0..meta.coord_dim {
        header.push_str(&format!(",x{k}"));
    }
    writeln!(out, "{header}")?;
    for r in &batch.records {
        write!(out, "{},{},{}", r.path_index, r.tau, r.exited as u8)?;
        for x in &r.exit_point {
            write!(out, ",{x}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_batch_csv(input: impl BufRead) -> Result<ExitBatch> {
    let mut lines = input.lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Format(format!("missing {what} line")))?
            .map_err(Error::from)
    };
    let version = next("version")?;
    if version.trim() != format!("# exitlab-batch v{BATCH_FORMAT_VERSION}") {
        return Err(Error::Format(format!("unsupported batch header {version:?}")));
    }
    let meta_line = next("metadata")?;
    let json = meta_line
        .strip_prefix("# meta ")
        .ok_or_else(|| Error::Format("missing metadata line".into()))?;
    let meta: Meta = serde_json::from_str(json)?;
    next("column header")?;
    let mut records = Vec::with_capacity(meta.records);
    for _ in 0..meta.records {
        let line = next("record")?;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 + meta.coord_dim {
            return Err(Error::Format(format!("bad record line {line:?}")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Format(format!("cannot parse {s:?}")));
        records.push(ExitRecord {
            path_index: f[0].parse().map_err(|_| Error::Format(format!("cannot parse {:?}", f[0])))?,
            tau: num(f[1])?,
            exited: f[2] == "1",
            exit_point: f[3..].iter().map(|s| num(s)).collect::<Result<_>>()?,
        });
    }
    Ok(ExitBatch {
        records,
        config: meta.config,
        space: meta.space,
        domain: meta.domain,
        start: meta.start,
    })
}
