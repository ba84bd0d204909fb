//! On-disk layout, all integers little-endian:
//!
//! ```text
//! magic        4 bytes  "HVPT"
//! version      u16
//! seed         u64
//! corpus_len   u64
//! corpus_hash  8 bytes  first bytes of SHA-256 over the corpus ids
//! node_count   u32
//! root         u32
//! nodes        node_count records, each
//!   tag u8 = 0 (internal): pivot u32, radius f64, inside u32, outside u32
//!   tag u8 = 1 (leaf):     count u32, count × item u32
//! ```
//!
//! Child fields are indices into the node array. The corpus itself is not
//! stored; loading takes it separately and rejects a mismatched one.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{check_structure, Node, VpTree};
use crate::error::{Error, Result};
use crate::metric::HarmonicEditDistance;
use crate::symbols::SymbolSeq;

pub const MAGIC: [u8; 4] = *b"HVPT";
pub const FORMAT_VERSION: u16 = 1;

const TAG_INTERNAL: u8 = 0;
const TAG_LEAF: u8 = 1;

fn corpus_hash(corpus: &[SymbolSeq]) -> [u8; 8] {
    let mut h = Sha256::new();
    for s in corpus {
        h.update((s.len() as u64).to_le_bytes());
        for id in s.ids() {
            h.update(id.to_le_bytes());
        }
    }
    let digest = h.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    out
}

impl VpTree {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&(self.corpus.len() as u64).to_le_bytes())?;
        w.write_all(&corpus_hash(&self.corpus))?;
        w.write_all(&(self.nodes.len() as u32).to_le_bytes())?;
        w.write_all(&self.root.to_le_bytes())?;
        for node in &self.nodes {
            match node {
                Node::Internal {
                    pivot,
                    radius,
                    inside,
                    outside,
                } => {
                    w.write_all(&[TAG_INTERNAL])?;
                    w.write_all(&pivot.to_le_bytes())?;
                    w.write_all(&radius.to_le_bytes())?;
                    w.write_all(&inside.to_le_bytes())?;
                    w.write_all(&outside.to_le_bytes())?;
                }
                Node::Leaf { items } => {
                    w.write_all(&[TAG_LEAF])?;
                    w.write_all(&(items.len() as u32).to_le_bytes())?;
                    for i in items {
                        w.write_all(&i.to_le_bytes())?;
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    /// Reads a tree written by [`VpTree::write_to`] for exactly this corpus.
    pub fn read_from<R: Read>(
        mut r: R,
        corpus: Vec<SymbolSeq>,
        metric: HarmonicEditDistance,
    ) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic)?;
        if magic != MAGIC {
            return Err(Error::IndexFormat("bad magic bytes".into()));
        }
        let version = u16::from_le_bytes(read_array(&mut r)?);
        if version != FORMAT_VERSION {
            return Err(Error::IndexFormat(format!(
                "unsupported version {version}, expected {FORMAT_VERSION}"
            )));
        }
        let seed = u64::from_le_bytes(read_array(&mut r)?);
        let corpus_len = u64::from_le_bytes(read_array(&mut r)?);
        if corpus_len != corpus.len() as u64 {
            return Err(Error::IndexFormat(format!(
                "index covers {corpus_len} strings, corpus has {}",
                corpus.len()
            )));
        }
        let hash: [u8; 8] = read_array(&mut r)?;
        if hash != corpus_hash(&corpus) {
            return Err(Error::IndexFormat(
                "index was built for a different corpus".into(),
            ));
        }
        let node_count = u32::from_le_bytes(read_array(&mut r)?) as usize;
        let root = u32::from_le_bytes(read_array(&mut r)?);
        // every node takes at least 5 bytes; don't trust the count for
        // preallocation beyond what the corpus could need
        let mut nodes = Vec::with_capacity(node_count.min(2 * corpus.len() + 1));
        for _ in 0..node_count {
            let [tag] = read_array::<1>(&mut r)?;
            nodes.push(match tag {
                TAG_INTERNAL => Node::Internal {
                    pivot: u32::from_le_bytes(read_array(&mut r)?),
                    radius: f64::from_le_bytes(read_array(&mut r)?),
                    inside: u32::from_le_bytes(read_array(&mut r)?),
                    outside: u32::from_le_bytes(read_array(&mut r)?),
                },
                TAG_LEAF => {
                    let count = u32::from_le_bytes(read_array(&mut r)?) as usize;
                    if count > corpus.len() {
                        return Err(Error::IndexFormat(format!("leaf of {count} items")));
                    }
                    let items = (0..count)
                        .map(|_| read_array(&mut r).map(u32::from_le_bytes))
                        .collect::<Result<Vec<_>>>()?;
                    Node::Leaf { items }
                }
                other => return Err(Error::IndexFormat(format!("unknown node tag {other}"))),
            });
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::IndexFormat("trailing bytes after node array".into()));
        }
        check_structure(&nodes, root, corpus.len()).map_err(Error::IndexFormat)?;
        Ok(VpTree {
            corpus,
            nodes,
            root,
            seed,
            metric,
        })
    }

    pub fn load(
        path: impl AsRef<Path>,
        corpus: Vec<SymbolSeq>,
        metric: HarmonicEditDistance,
    ) -> Result<Self> {
        VpTree::read_from(BufReader::new(File::open(path)?), corpus, metric)
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::IndexFormat("truncated index file".into()),
        _ => Error::Io(e),
    })
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    read_exact(r, &mut buf)?;
    Ok(buf)
}
