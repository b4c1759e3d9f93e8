//! On-disk index layout.
//!
//! ```text
//! meta.json     format tag, version, stats, tokenizer fingerprint, CRC-32 of every other file
//! dict.bin      magic, version, term count, then per term (sorted):
//!               u32 byte length, UTF-8 bytes, u32 df, u64 postings offset, u64 postings length
//! postings.bin  magic, version, then per list: varint doc-ordinal delta, varint tf
//! doclen.bin    magic, version, u64 doc count, u32 length per ordinal
//! docids.tsv    `ordinal<TAB>doc_id` per line
//! ```
//!
//! All fixed-width integers are little-endian.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{varint, IndexStats, InvertedIndex, Posting};
use crate::error::{Error, Result};
use crate::tokenize::TokenizerSpec;

pub const FORMAT_VERSION: u32 = 1;
const FORMAT_TAG: &str = "lexmatch-index";

const META: &str = "meta.json";
const DICT: &str = "dict.bin";
const POSTINGS: &str = "postings.bin";
const DOCLEN: &str = "doclen.bin";
const DOCIDS: &str = "docids.tsv";

/// Every file an index directory contains.
pub const INDEX_FILES: [&str; 5] = [META, DICT, POSTINGS, DOCLEN, DOCIDS];

const DICT_MAGIC: &[u8; 8] = b"LXMDICT\0";
const POSTINGS_MAGIC: &[u8; 8] = b"LXMPOST\0";
const DOCLEN_MAGIC: &[u8; 8] = b"LXMDLEN\0";
const HEADER_LEN: usize = 12;

#[derive(Debug, Serialize, Deserialize)]
struct IndexMeta {
    format: String,
    version: u32,
    stats: IndexStats,
    term_count: u64,
    tokenizer_fingerprint: String,
    include_title: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tokenizer: Option<TokenizerSpec>,
    checksums: BTreeMap<String, u32>,
}

fn header(magic: &[u8; 8]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN);
    buf.extend_from_slice(magic);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf
}

/// Writes `index` into `dir`, creating the directory if needed.
pub fn save_index(index: &InvertedIndex, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut dict = header(DICT_MAGIC);
    let mut postings = header(POSTINGS_MAGIC);
    dict.extend_from_slice(&(index.dictionary.len() as u64).to_le_bytes());
    for (term, list) in &index.dictionary {
        let offset = (postings.len() - HEADER_LEN) as u64;
        let mut prev = 0u32;
        for p in list {
            varint::write_u64(&mut postings, u64::from(p.doc - prev));
            varint::write_u64(&mut postings, u64::from(p.tf));
            prev = p.doc;
        }
        let length = (postings.len() - HEADER_LEN) as u64 - offset;
        dict.extend_from_slice(&(term.len() as u32).to_le_bytes());
        dict.extend_from_slice(term.as_bytes());
        dict.extend_from_slice(&(list.len() as u32).to_le_bytes());
        dict.extend_from_slice(&offset.to_le_bytes());
        dict.extend_from_slice(&length.to_le_bytes());
    }

    let mut doclen = header(DOCLEN_MAGIC);
    doclen.extend_from_slice(&(index.doc_lengths.len() as u64).to_le_bytes());
    for &l in &index.doc_lengths {
        doclen.extend_from_slice(&l.to_le_bytes());
    }

    let mut docids = String::new();
    for (i, id) in index.doc_ids.iter().enumerate() {
        docids.push_str(&format!("{i}\t{id}\n"));
    }

    let files: [(&str, &[u8]); 4] =
        [(DICT, &dict), (POSTINGS, &postings), (DOCLEN, &doclen), (DOCIDS, docids.as_bytes())];
    let mut checksums = BTreeMap::new();
    for (name, bytes) in files {
        checksums.insert(name.to_string(), crc32fast::hash(bytes));
        write(dir, name, bytes)?;
    }

    let meta = IndexMeta {
        format: FORMAT_TAG.to_string(),
        version: FORMAT_VERSION,
        stats: index.stats,
        term_count: index.dictionary.len() as u64,
        tokenizer_fingerprint: index.tokenizer_fingerprint.clone(),
        include_title: index.include_title,
        tokenizer: index.tokenizer_spec.clone(),
        checksums,
    };
    let mut json =
        serde_json::to_vec_pretty(&meta).map_err(|e| Error::Invariant(format!("serializing index metadata: {e}")))?;
    json.push(b'\n');
    write(dir, META, &json)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::io(path, e))
}

fn read(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let path = dir.join(name);
    fs::read(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.clone()),
        _ => Error::io(path.clone(), e),
    })
}

fn corrupt(file: &str, message: impl Into<String>) -> Error {
    Error::Corrupt { file: file.to_string(), message: message.into() }
}

/// Reads an index written by [`save_index`], verifying version, checksums
/// and the consistency invariants.
pub fn load_index(dir: impl AsRef<Path>) -> Result<InvertedIndex> {
    let dir = dir.as_ref();
    let meta_bytes = read(dir, META)?;
    let meta: IndexMeta = serde_json::from_slice(&meta_bytes).map_err(|e| corrupt(META, e.to_string()))?;
    if meta.format != FORMAT_TAG {
        return Err(corrupt(META, format!("unexpected format tag {:?}", meta.format)));
    }
    if meta.version != FORMAT_VERSION {
        return Err(Error::Version { file: META.to_string(), found: meta.version, expected: FORMAT_VERSION });
    }

    let load = |name: &str, magic: Option<&[u8; 8]>| -> Result<Vec<u8>> {
        let bytes = read(dir, name)?;
        let expected =
            *meta.checksums.get(name).ok_or_else(|| corrupt(META, format!("no checksum recorded for {name}")))?;
        if let Some(magic) = magic {
            if bytes.len() < HEADER_LEN || &bytes[..8] != magic {
                return Err(corrupt(name, "bad magic header"));
            }
            let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
            if version != FORMAT_VERSION {
                return Err(Error::Version { file: name.to_string(), found: version, expected: FORMAT_VERSION });
            }
        }
        if crc32fast::hash(&bytes) != expected {
            return Err(Error::Checksum(name.to_string()));
        }
        Ok(bytes)
    };

    let dict = load(DICT, Some(DICT_MAGIC))?;
    let postings = load(POSTINGS, Some(POSTINGS_MAGIC))?;
    let doclen = load(DOCLEN, Some(DOCLEN_MAGIC))?;
    let docids = load(DOCIDS, None)?;

    let mut r = Reader::new(&doclen, DOCLEN, HEADER_LEN);
    let n = r.u64()? as usize;
    let doc_lengths = (0..n).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    r.finish()?;

    let docids = std::str::from_utf8(&docids).map_err(|_| corrupt(DOCIDS, "invalid UTF-8"))?;
    let mut doc_ids = Vec::with_capacity(n);
    for (i, line) in docids.lines().enumerate() {
        let (ord, id) = line.split_once('\t').ok_or_else(|| corrupt(DOCIDS, format!("line {}", i + 1)))?;
        if ord.parse::<usize>().ok() != Some(i) {
            return Err(corrupt(DOCIDS, format!("ordinal out of sequence on line {}", i + 1)));
        }
        doc_ids.push(id.to_string());
    }
    if doc_ids.len() != n {
        return Err(corrupt(DOCIDS, "document count disagrees with doclen.bin"));
    }

    let body = &postings[HEADER_LEN..];
    let mut r = Reader::new(&dict, DICT, HEADER_LEN);
    let term_count = r.u64()?;
    if term_count != meta.term_count {
        return Err(corrupt(DICT, "term count disagrees with meta.json"));
    }
    let mut dictionary = BTreeMap::new();
    for _ in 0..term_count {
        let len = r.u32()? as usize;
        let term =
            std::str::from_utf8(r.bytes(len)?).map_err(|_| corrupt(DICT, "term is not valid UTF-8"))?.to_string();
        let df = r.u32()? as usize;
        let offset = r.u64()? as usize;
        let length = r.u64()? as usize;
        let slice = offset
            .checked_add(length)
            .and_then(|end| body.get(offset..end))
            .ok_or_else(|| corrupt(POSTINGS, format!("postings for {term:?} out of range")))?;
        let mut list = Vec::with_capacity(df);
        let mut pos = 0;
        let mut doc = 0u64;
        for i in 0..df {
            let delta = varint::read_u64(slice, &mut pos).ok_or_else(|| corrupt(POSTINGS, "truncated varint"))?;
            let tf = varint::read_u64(slice, &mut pos).ok_or_else(|| corrupt(POSTINGS, "truncated varint"))?;
            if i > 0 && delta == 0 {
                return Err(corrupt(POSTINGS, format!("non-ascending postings for {term:?}")));
            }
            doc += delta;
            let (Ok(doc), Ok(tf)) = (u32::try_from(doc), u32::try_from(tf)) else {
                return Err(corrupt(POSTINGS, "value out of range"));
            };
            list.push(Posting { doc, tf });
        }
        if pos != slice.len() {
            return Err(corrupt(POSTINGS, format!("trailing bytes in list for {term:?}")));
        }
        if dictionary.insert(term, list).is_some() {
            return Err(corrupt(DICT, "duplicate term"));
        }
    }
    r.finish()?;

    InvertedIndex::from_parts(
        dictionary,
        doc_lengths,
        doc_ids,
        meta.stats,
        meta.tokenizer_fingerprint,
        meta.include_title,
        meta.tokenizer,
    )
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    file: &'static str,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], file: &'static str, pos: usize) -> Self {
        Self { buf, pos, file }
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| corrupt(self.file, "unexpected end of file"))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().expect("8 bytes")))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(corrupt(self.file, "trailing bytes"));
        }
        Ok(())
    }
}
