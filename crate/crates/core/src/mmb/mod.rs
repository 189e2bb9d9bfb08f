//! Reader and writer for the binary proof file. The layout is described
//! byte by byte in `docs/mmb-format.md`.
//!
//! The reader works in place over a byte slice: [`MmbFile::parse`] checks only
//! the header, and table entries are decoded on access.

mod names;
mod opcode;
mod writer;

use thiserror::Error;

use crate::kernel::{Binder, BinderSlice, Modifiers, SortId, MAX_BOUND_VARS};

pub use names::{NameIndex, NameKind};
pub use opcode::{
  decode_proof_op, decode_proof_stream, decode_unify_op, decode_unify_stream, encode_proof_stream,
  encode_unify_stream, ProofOp, UnifyOp,
};
pub use writer::{read_payload, write_file, DeclPayload, Payload, TermPayload, ThmPayload};

pub const MAGIC: [u8; 4] = *b"MM0B";
pub const VERSION: u8 = 1;
/// Fixed part of the header, up to the sort modifier bytes.
pub const HEADER_SIZE: usize = 40;
pub const ENTRY_SIZE: usize = 8;

/// Declaration kind bytes in the declaration stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeclKind {
  Sort,
  Term,
  Def,
  Axiom,
  Thm,
}

impl DeclKind {
  pub const LOCAL: u8 = 0x08;

  pub fn code(self) -> u8 {
    match self {
      DeclKind::Sort => 1,
      DeclKind::Term => 2,
      DeclKind::Def => 3,
      DeclKind::Axiom => 4,
      DeclKind::Thm => 5,
    }
  }

  /// Splits a kind byte into kind and local flag.
  pub fn from_byte(b: u8) -> Option<(DeclKind, bool)> {
    let local = b & Self::LOCAL != 0;
    let kind = match b & !Self::LOCAL {
      1 => DeclKind::Sort,
      2 => DeclKind::Term,
      3 => DeclKind::Def,
      4 => DeclKind::Axiom,
      5 => DeclKind::Thm,
      _ => return None,
    };
    if local && !matches!(kind, DeclKind::Def | DeclKind::Thm) {
      return None;
    }
    Some((kind, local))
  }

  pub fn has_proof(self) -> bool {
    matches!(self, DeclKind::Def | DeclKind::Axiom | DeclKind::Thm)
  }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MmbError {
  #[error("bad magic number")]
  BadMagic,
  #[error("unsupported version {0}")]
  BadVersion(u8),
  #[error("file truncated at offset {offset:#x}")]
  TruncatedFile { offset: usize },
  #[error("{field} offset {offset:#x} is out of bounds")]
  OffsetOutOfBounds { field: &'static str, offset: u64 },
  #[error("unknown opcode {byte:#04x} at offset {offset:#x}")]
  UnknownOpcode { offset: usize, byte: u8 },
  #[error("truncated immediate at offset {0:#x}")]
  TruncatedImmediate(usize),
  #[error("malformed header field at offset {0:#x}")]
  BadHeader(usize),
  #[error("bad sort modifiers at offset {0:#x}")]
  BadModifiers(usize),
  #[error("malformed binder record at offset {0:#x}")]
  BadBinder(usize),
  #[error("malformed table entry at offset {0:#x}")]
  BadEntry(usize),
  #[error("malformed declaration at offset {0:#x}")]
  BadDecl(usize),
  #[error("malformed name index at offset {0:#x}")]
  BadNameIndex(usize),
  #[error("{0} exceeds its field width")]
  LimitExceeded(&'static str),
}

impl MmbError {
  /// The byte offset the error refers to, if any.
  pub fn offset(&self) -> Option<u64> {
    match *self {
      MmbError::BadMagic | MmbError::BadVersion(_) => Some(0),
      MmbError::TruncatedFile { offset } => Some(offset as u64),
      MmbError::OffsetOutOfBounds { offset, .. } => Some(offset),
      MmbError::UnknownOpcode { offset, .. } => Some(offset as u64),
      MmbError::TruncatedImmediate(o)
      | MmbError::BadHeader(o)
      | MmbError::BadModifiers(o)
      | MmbError::BadBinder(o)
      | MmbError::BadEntry(o)
      | MmbError::BadDecl(o)
      | MmbError::BadNameIndex(o) => Some(o as u64),
      MmbError::LimitExceeded(_) => None,
    }
  }
}

fn u16_at(b: &[u8], o: usize) -> u16 {
  u16::from_le_bytes([b[o], b[o + 1]])
}
fn u32_at(b: &[u8], o: usize) -> u32 {
  u32::from_le_bytes(b[o..o + 4].try_into().unwrap())
}
fn u64_at(b: &[u8], o: usize) -> u64 {
  u64::from_le_bytes(b[o..o + 8].try_into().unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
  pub num_sorts: u8,
  pub num_terms: u32,
  pub num_thms: u32,
  pub p_terms: u32,
  pub p_thms: u32,
  pub p_decls: u32,
  /// 0 when the name index is stripped.
  pub p_index: u64,
}

/// A term table entry.
#[derive(Clone, Copy, Debug)]
pub struct TermEntry<'a> {
  pub args: BinderSlice<'a>,
  pub ret: Binder,
  /// Offset of the definition's unify stream.
  pub unify: Option<usize>,
}

/// A theorem table entry.
#[derive(Clone, Copy, Debug)]
pub struct ThmEntry<'a> {
  pub args: BinderSlice<'a>,
  pub num_hyps: u16,
  pub unify: usize,
}

/// One entry of the declaration stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeclEntry {
  pub offset: usize,
  pub kind: DeclKind,
  pub local: bool,
  /// Start of the proof stream (empty for sorts and terms).
  pub proof: usize,
  pub next: usize,
}

/// A validated header over the file bytes.
#[derive(Clone, Copy, Debug)]
pub struct MmbFile<'a> {
  pub bytes: &'a [u8],
  pub header: Header,
}

impl<'a> MmbFile<'a> {
  /// Checks magic, version, counts and that every region named by the header
  /// lies within the file. Table contents are not inspected.
  pub fn parse(bytes: &'a [u8]) -> Result<MmbFile<'a>, MmbError> {
    if bytes.len() < 4 {
      return Err(MmbError::TruncatedFile { offset: bytes.len() });
    }
    if bytes[..4] != MAGIC {
      return Err(MmbError::BadMagic);
    }
    if bytes.len() < HEADER_SIZE {
      return Err(MmbError::TruncatedFile { offset: bytes.len() });
    }
    if bytes[4] != VERSION {
      return Err(MmbError::BadVersion(bytes[4]));
    }
    if u16_at(bytes, 6) != 0 {
      return Err(MmbError::BadHeader(6));
    }
    if u32_at(bytes, 28) != 0 {
      return Err(MmbError::BadHeader(28));
    }
    let header = Header {
      num_sorts: bytes[5],
      num_terms: u32_at(bytes, 8),
      num_thms: u32_at(bytes, 12),
      p_terms: u32_at(bytes, 16),
      p_thms: u32_at(bytes, 20),
      p_decls: u32_at(bytes, 24),
      p_index: u64_at(bytes, 32),
    };
    if header.num_sorts as usize > crate::kernel::MAX_SORTS {
      return Err(MmbError::BadHeader(5));
    }
    let len = bytes.len() as u64;
    let sorts_end = (HEADER_SIZE + header.num_sorts as usize) as u64;
    if sorts_end > len {
      return Err(MmbError::TruncatedFile { offset: bytes.len() });
    }
    for i in 0..header.num_sorts as usize {
      let b = bytes[HEADER_SIZE + i];
      if Modifiers::from_bits(b).is_none() {
        return Err(MmbError::BadModifiers(HEADER_SIZE + i));
      }
    }
    let table = |field, p: u32, n: u32| {
      let end = p as u64 + n as u64 * ENTRY_SIZE as u64;
      if end > len {
        Err(MmbError::OffsetOutOfBounds { field, offset: p as u64 })
      } else {
        Ok(())
      }
    };
    table("term table", header.p_terms, header.num_terms)?;
    table("theorem table", header.p_thms, header.num_thms)?;
    if header.p_index != 0 && header.p_index > len {
      return Err(MmbError::OffsetOutOfBounds { field: "name index", offset: header.p_index });
    }
    if header.p_decls as u64 > len
      || (header.p_index != 0 && header.p_decls as u64 > header.p_index)
    {
      return Err(MmbError::OffsetOutOfBounds {
        field: "declaration stream",
        offset: header.p_decls as u64,
      });
    }
    Ok(MmbFile { bytes, header })
  }

  pub fn num_sorts(&self) -> usize {
    self.header.num_sorts as usize
  }
  pub fn num_terms(&self) -> u32 {
    self.header.num_terms
  }
  pub fn num_thms(&self) -> u32 {
    self.header.num_thms
  }

  pub fn sort_mods(&self, s: SortId) -> Option<Modifiers> {
    if (s.0 as usize) < self.num_sorts() {
      Modifiers::from_bits(self.bytes[HEADER_SIZE + s.0 as usize])
    } else {
      None
    }
  }

  /// Reads `n` binder records at `p`, checking each one's shape.
  fn binders(&self, p: usize, n: usize) -> Result<BinderSlice<'a>, MmbError> {
    let raw = self
      .bytes
      .get(p..p + n * 8)
      .ok_or(MmbError::OffsetOutOfBounds { field: "binders", offset: p as u64 })?;
    let slice = BinderSlice::Raw(raw);
    let mut names = 0;
    for (i, b) in slice.iter().enumerate() {
      let at = p + i * 8;
      if b.is_name() {
        if names >= MAX_BOUND_VARS || b.deps().bits() != 1 << names {
          return Err(MmbError::BadBinder(at));
        }
        names += 1;
      } else if b.deps().bits() >> names != 0 {
        return Err(MmbError::BadBinder(at));
      }
    }
    Ok(slice)
  }

  /// The term table entry for `id`. The caller is responsible for the
  /// validity window.
  pub fn term(&self, id: u32) -> Result<TermEntry<'a>, MmbError> {
    if id >= self.header.num_terms {
      return Err(MmbError::OffsetOutOfBounds { field: "term id", offset: id as u64 });
    }
    let e = self.header.p_terms as usize + id as usize * ENTRY_SIZE;
    let b = self.bytes;
    let nargs = u16_at(b, e) as usize;
    let ret_sort = b[e + 2];
    if b[e + 3] != 0 {
      return Err(MmbError::BadEntry(e));
    }
    let p = u32_at(b, e + 4) as usize;
    let args = self.binders(p, nargs)?;
    let ret_at = p + nargs * 8;
    let ret = b
      .get(ret_at..ret_at + 8)
      .ok_or(MmbError::OffsetOutOfBounds { field: "return type", offset: ret_at as u64 })?;
    let ret = Binder::from_raw(u64::from_le_bytes(ret.try_into().unwrap()));
    let names = args.iter().filter(|b| b.is_name()).count();
    if ret.is_name() || ret.sort().0 != ret_sort & 0x7f || ret.deps().bits() >> names != 0 {
      return Err(MmbError::BadBinder(ret_at));
    }
    let unify = (ret_sort & 0x80 != 0).then_some(ret_at + 8);
    Ok(TermEntry { args, ret, unify })
  }

  pub fn thm(&self, id: u32) -> Result<ThmEntry<'a>, MmbError> {
    if id >= self.header.num_thms {
      return Err(MmbError::OffsetOutOfBounds { field: "theorem id", offset: id as u64 });
    }
    let e = self.header.p_thms as usize + id as usize * ENTRY_SIZE;
    let b = self.bytes;
    let nargs = u16_at(b, e) as usize;
    let num_hyps = u16_at(b, e + 2);
    let p = u32_at(b, e + 4) as usize;
    let args = self.binders(p, nargs)?;
    Ok(ThmEntry { args, num_hyps, unify: p + nargs * 8 })
  }

  /// End of the declaration stream.
  pub fn decls_end(&self) -> usize {
    if self.header.p_index == 0 {
      self.bytes.len()
    } else {
      self.header.p_index as usize
    }
  }

  /// Reads the declaration entry at `pos`.
  pub fn decl_at(&self, pos: usize) -> Result<DeclEntry, MmbError> {
    let end = self.decls_end();
    if pos + 5 > end {
      return Err(MmbError::TruncatedFile { offset: pos });
    }
    let (kind, local) = DeclKind::from_byte(self.bytes[pos]).ok_or(MmbError::BadDecl(pos))?;
    let next = u32_at(self.bytes, pos + 1) as usize;
    if next > end
      || next < pos + 5
      || (!kind.has_proof() && next != pos + 5)
      || (kind.has_proof() && next == pos + 5)
    {
      return Err(MmbError::BadDecl(pos));
    }
    Ok(DeclEntry { offset: pos, kind, local, proof: pos + 5, next })
  }

  /// Iterates over the declaration stream. Iteration stops after the first
  /// error.
  pub fn decls(&self) -> DeclIter<'a> {
    DeclIter { file: *self, pos: self.header.p_decls as usize, failed: false }
  }

  /// The name index, if present and well formed.
  pub fn names(&self) -> Option<NameIndex<'a>> {
    if self.header.p_index == 0 {
      return None;
    }
    NameIndex::parse(self.bytes, self.header.p_index as usize).ok()
  }

  /// Looks up a name for diagnostics; absent when stripped or malformed.
  pub fn lookup_name(&self, kind: NameKind, id: u32) -> Option<&'a str> {
    self.names()?.lookup(kind, id)
  }
}

pub struct DeclIter<'a> {
  file: MmbFile<'a>,
  pos: usize,
  failed: bool,
}

impl Iterator for DeclIter<'_> {
  type Item = Result<DeclEntry, MmbError>;

  fn next(&mut self) -> Option<Self::Item> {
    if self.failed || self.pos >= self.file.decls_end() {
      return None;
    }
    let r = self.file.decl_at(self.pos);
    match &r {
      Ok(d) => self.pos = d.next,
      Err(_) => self.failed = true,
    }
    Some(r)
  }
}

#[cfg(test)]
mod tests;
