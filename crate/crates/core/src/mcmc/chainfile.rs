use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Chain, ChainConfig};
use crate::data::DesignLayout;
use crate::model::ModelKind;
use crate::{Error, Result};

pub const CHAIN_FORMAT: &str = "ddpmc-chain/1";

/// First line of a chain file. Records that follow are `record_len`
/// little-endian `f64` values: the state fields, then the log posterior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainHeader {
    pub format: String,
    pub model: ModelKind,
    pub p: usize,
    pub n_components: usize,
    /// LDVR stick concentration (fixed during sampling).
    pub alpha: f64,
    pub n_obs: usize,
    pub config: ChainConfig,
    pub seed: u64,
    pub stream: u64,
    pub fields: Vec<String>,
    pub record_len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<DesignLayout>,
}

/// Streams saved states to an append-only chain file.
pub struct ChainWriter {
    out: BufWriter<File>,
    record_len: usize,
    written: usize,
}

impl ChainWriter {
    pub fn create(path: impl AsRef<Path>, header: &ChainHeader) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut out, header)?;
        out.write_all(b"\n")?;
        Ok(Self { out, record_len: header.record_len, written: 0 })
    }

    pub fn write_record(&mut self, record: &[f64]) -> Result<()> {
        if record.len() != self.record_len {
            return Err(Error::ChainFile(format!("record has {} values, header says {}", record.len(), self.record_len)));
        }
        for v in record {
            self.out.write_all(&v.to_le_bytes())?;
        }
        self.written += 1;
        Ok(())
    }

    pub fn records_written(&self) -> usize {
        self.written
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Writes a complete chain to `path`.
pub fn write_chain(chain: &Chain, path: impl AsRef<Path>) -> Result<()> {
    let mut w = ChainWriter::create(path, chain.header())?;
    let mut rec = Vec::with_capacity(chain.header().record_len);
    for (d, lp) in chain.draws().iter().zip(chain.log_posterior()) {
        rec.clear();
        rec.extend_from_slice(d);
        rec.push(*lp);
        w.write_record(&rec)?;
    }
    w.finish()
}

/// Reads a chain file written by [`ChainWriter`] or [`write_chain`].
pub fn read_chain(path: impl AsRef<Path>) -> Result<Chain> {
    let path = path.as_ref();
    let mut reader = BufReader::new(File::open(path)?);
    let mut line = Vec::new();
    reader.read_until(b'\n', &mut line)?;
    let header: ChainHeader = serde_json::from_slice(&line)
        .map_err(|e| Error::ChainFile(format!("{}: bad header: {e}", path.display())))?;
    if header.format != CHAIN_FORMAT {
        return Err(Error::ChainFile(format!("{}: unknown format `{}`", path.display(), header.format)));
    }
    if header.record_len != header.fields.len() + 1 {
        return Err(Error::ChainFile("record length disagrees with field list".into()));
    }
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let width = header.record_len * 8;
    if bytes.len() % width != 0 {
        return Err(Error::ChainFile(format!(
            "{}: {} trailing bytes do not form a whole record",
            path.display(),
            bytes.len() % width
        )));
    }
    let mut draws = Vec::with_capacity(bytes.len() / width);
    let mut log_post = Vec::with_capacity(bytes.len() / width);
    for rec in bytes.chunks_exact(width) {
        let mut vals: Vec<f64> =
            rec.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect();
        log_post.push(vals.pop().expect("record_len ≥ 1"));
        draws.push(vals);
    }
    Chain::from_parts(header, draws, log_post)
}
