//! Strings as sequences of dense integer symbol ids.
//!
//! The LCS engines only ever see `u32` ids. What counts as a symbol (a
//! byte, a Unicode scalar value, a whitespace-separated word) is decided
//! here, once, by the [`Interner`].

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite sequence of symbol ids. The empty sequence is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolSeq(Vec<u32>);

impl SymbolSeq {
    pub fn new() -> Self {
        SymbolSeq(Vec::new())
    }

    pub fn from_ids(ids: Vec<u32>) -> Self {
        SymbolSeq(ids)
    }

    /// Uses each Unicode scalar value as its own id, without an interner.
    ///
    /// Handy for tests and examples; ids are stable (`'a'` is always 97) but
    /// not dense.
    pub fn from_chars(s: &str) -> Self {
        SymbolSeq(s.chars().map(u32::from).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ids(&self) -> &[u32] {
        &self.0
    }

    pub fn into_ids(self) -> Vec<u32> {
        self.0
    }

    pub fn push(&mut self, id: u32) {
        self.0.push(id);
    }

    /// Copy of `self` with position `i` deleted.
    pub fn without(&self, i: usize) -> SymbolSeq {
        let mut ids = Vec::with_capacity(self.0.len().saturating_sub(1));
        ids.extend_from_slice(&self.0[..i]);
        ids.extend_from_slice(&self.0[i + 1..]);
        SymbolSeq(ids)
    }

    /// Renders ids `0..26` as `a..z`, anything else as `<id>`.
    pub fn to_letters(&self) -> String {
        self.0
            .iter()
            .map(|&id| match id {
                0..=25 => char::from(b'a' + id as u8).to_string(),
                _ => format!("<{id}>"),
            })
            .collect()
    }
}

impl AsRef<[u32]> for SymbolSeq {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for SymbolSeq {
    fn from(ids: Vec<u32>) -> Self {
        SymbolSeq(ids)
    }
}

impl FromIterator<u32> for SymbolSeq {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        SymbolSeq(iter.into_iter().collect())
    }
}

/// How raw input is split into symbols.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenMode {
    /// One symbol per byte. Total: any byte string is accepted.
    Bytes,
    /// One symbol per Unicode scalar value. Input must be UTF-8.
    #[default]
    Codepoints,
    /// One symbol per whitespace-separated word. Input must be UTF-8.
    Words,
}

impl FromStr for TokenMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bytes" => Ok(TokenMode::Bytes),
            "codepoints" => Ok(TokenMode::Codepoints),
            "words" => Ok(TokenMode::Words),
            _ => Err(Error::Precondition(format!("unknown token mode {s:?}"))),
        }
    }
}

impl fmt::Display for TokenMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenMode::Bytes => "bytes",
            TokenMode::Codepoints => "codepoints",
            TokenMode::Words => "words",
        })
    }
}

/// Maps raw tokens to ids `0..alphabet_size` without gaps.
///
/// Build it while ingesting input; afterwards it can be shared read-only.
/// Sequences are only comparable when they come from the same interner.
#[derive(Clone, Debug, Default)]
pub struct Interner {
    mode: TokenMode,
    ids: HashMap<Box<[u8]>, u32>,
    tokens: Vec<Box<[u8]>>,
}

impl Interner {
    pub fn new(mode: TokenMode) -> Self {
        Interner {
            mode,
            ids: HashMap::new(),
            tokens: Vec::new(),
        }
    }

    pub fn mode(&self) -> TokenMode {
        self.mode
    }

    /// Number of distinct tokens seen so far.
    pub fn alphabet_size(&self) -> usize {
        self.tokens.len()
    }

    /// Raw bytes of the token with the given id.
    pub fn token(&self, id: u32) -> Option<&[u8]> {
        self.tokens.get(id as usize).map(|t| &**t)
    }

    /// Tokenizes `raw` and returns its id sequence, registering new tokens.
    pub fn intern(&mut self, raw: &[u8]) -> Result<SymbolSeq> {
        match self.mode {
            TokenMode::Bytes => Ok(raw
                .iter()
                .map(|b| self.id_of(std::slice::from_ref(b)))
                .collect()),
            TokenMode::Codepoints => {
                let s = std::str::from_utf8(raw).map_err(|_| Error::InvalidUtf8)?;
                let mut buf = [0u8; 4];
                Ok(s.chars()
                    .map(|c| self.id_of(c.encode_utf8(&mut buf).as_bytes()))
                    .collect())
            }
            TokenMode::Words => {
                let s = std::str::from_utf8(raw).map_err(|_| Error::InvalidUtf8)?;
                Ok(s.split_whitespace()
                    .map(|w| self.id_of(w.as_bytes()))
                    .collect())
            }
        }
    }

    pub fn intern_str(&mut self, s: &str) -> Result<SymbolSeq> {
        self.intern(s.as_bytes())
    }

    fn id_of(&mut self, token: &[u8]) -> u32 {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        let owned: Box<[u8]> = token.into();
        self.tokens.push(owned.clone());
        self.ids.insert(owned, id);
        id
    }
}
