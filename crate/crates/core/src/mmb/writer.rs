//! Canonical serialization. Layout: header, sort modifiers, term table, theorem
//! table, per-term data, per-theorem data, declaration stream, name index.

use crate::kernel::{Binder, Modifiers, MAX_SORTS};

use super::names::write_index;
use super::{
  decode_unify_stream, DeclKind, MmbError, MmbFile, NameKind, ENTRY_SIZE, HEADER_SIZE, MAGIC,
  VERSION,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermPayload {
  pub args: Vec<Binder>,
  pub ret: Binder,
  /// Encoded unify stream including its terminating `UEnd`; present for
  /// definitions.
  pub unify: Option<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThmPayload {
  pub args: Vec<Binder>,
  pub num_hyps: u16,
  pub unify: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeclPayload {
  pub kind: DeclKind,
  pub local: bool,
  /// Encoded proof stream including `End`; empty for sorts and terms.
  pub proof: Vec<u8>,
}

/// The logical content of a proof file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Payload {
  pub sorts: Vec<Modifiers>,
  pub terms: Vec<TermPayload>,
  pub thms: Vec<ThmPayload>,
  pub decls: Vec<DeclPayload>,
  /// `None` writes a stripped file.
  pub names: Option<Vec<(NameKind, u32, String)>>,
}

fn offset(n: usize, what: &'static str) -> Result<u32, MmbError> {
  u32::try_from(n).map_err(|_| MmbError::LimitExceeded(what))
}

fn push_binders(out: &mut Vec<u8>, bs: &[Binder]) {
  bs.iter().for_each(|b| out.extend(b.raw().to_le_bytes()))
}

/// Serializes a payload. The output is a function of the payload alone.
pub fn write_file(p: &Payload) -> Result<Vec<u8>, MmbError> {
  if p.sorts.len() > MAX_SORTS {
    return Err(MmbError::LimitExceeded("sort count"));
  }
  let num_terms = offset(p.terms.len(), "term count")?;
  let num_thms = offset(p.thms.len(), "theorem count")?;
  let p_terms = HEADER_SIZE + p.sorts.len();
  let p_thms = p_terms + p.terms.len() * ENTRY_SIZE;
  let mut data = p_thms + p.thms.len() * ENTRY_SIZE;

  let mut out = Vec::with_capacity(data);
  out.extend(MAGIC);
  out.extend([VERSION, p.sorts.len() as u8, 0, 0]);
  out.extend(num_terms.to_le_bytes());
  out.extend(num_thms.to_le_bytes());
  out.extend(offset(p_terms, "term table offset")?.to_le_bytes());
  out.extend(offset(p_thms, "theorem table offset")?.to_le_bytes());
  let p_decls_at = out.len();
  out.extend([0; 4]);
  out.extend([0; 4]);
  let p_index_at = out.len();
  out.extend([0; 8]);
  out.extend(p.sorts.iter().map(|m| m.bits()));

  for t in &p.terms {
    let nargs =
      u16::try_from(t.args.len()).map_err(|_| MmbError::LimitExceeded("argument count"))?;
    out.extend(nargs.to_le_bytes());
    out.push(t.ret.sort().0 | if t.unify.is_some() { 0x80 } else { 0 });
    out.push(0);
    out.extend(offset(data, "term data offset")?.to_le_bytes());
    data += (t.args.len() + 1) * 8 + t.unify.as_ref().map_or(0, Vec::len);
  }
  for t in &p.thms {
    let nargs =
      u16::try_from(t.args.len()).map_err(|_| MmbError::LimitExceeded("argument count"))?;
    out.extend(nargs.to_le_bytes());
    out.extend(t.num_hyps.to_le_bytes());
    out.extend(offset(data, "theorem data offset")?.to_le_bytes());
    data += t.args.len() * 8 + t.unify.len();
  }
  for t in &p.terms {
    push_binders(&mut out, &t.args);
    out.extend(t.ret.raw().to_le_bytes());
    if let Some(u) = &t.unify {
      out.extend(u);
    }
  }
  for t in &p.thms {
    push_binders(&mut out, &t.args);
    out.extend(&t.unify);
  }
  debug_assert_eq!(out.len(), data);

  let p_decls = offset(out.len(), "declaration stream offset")?;
  out[p_decls_at..p_decls_at + 4].copy_from_slice(&p_decls.to_le_bytes());
  for d in &p.decls {
    let start = out.len();
    let next = offset(start + 5 + d.proof.len(), "declaration offset")?;
    out.push(d.kind.code() | if d.local { DeclKind::LOCAL } else { 0 });
    out.extend(next.to_le_bytes());
    out.extend(&d.proof);
  }
  if let Some(names) = &p.names {
    let p_index = out.len() as u64;
    out[p_index_at..p_index_at + 8].copy_from_slice(&p_index.to_le_bytes());
    let mut entries: Vec<(NameKind, u32, &str)> =
      names.iter().map(|(k, i, s)| (*k, *i, s.as_str())).collect();
    write_index(&mut out, &mut entries)?;
  }
  offset(out.len(), "file size")?;
  Ok(out)
}

/// Decodes the whole logical content of a file (structure only; nothing is
/// verified).
pub fn read_payload(f: &MmbFile<'_>) -> Result<Payload, MmbError> {
  let sorts =
    (0..f.num_sorts()).map(|i| f.sort_mods(crate::kernel::SortId(i as u8)).unwrap()).collect();
  let mut terms = vec![];
  for id in 0..f.num_terms() {
    let e = f.term(id)?;
    let unify = match e.unify {
      Some(pos) => {
        let (_, end) = decode_unify_stream(f.bytes, pos)?;
        Some(f.bytes[pos..end].to_vec())
      }
      None => None,
    };
    terms.push(TermPayload { args: e.args.iter().collect(), ret: e.ret, unify });
  }
  let mut thms = vec![];
  for id in 0..f.num_thms() {
    let e = f.thm(id)?;
    let (_, end) = decode_unify_stream(f.bytes, e.unify)?;
    thms.push(ThmPayload {
      args: e.args.iter().collect(),
      num_hyps: e.num_hyps,
      unify: f.bytes[e.unify..end].to_vec(),
    });
  }
  let mut decls = vec![];
  for d in f.decls() {
    let d = d?;
    decls.push(DeclPayload {
      kind: d.kind,
      local: d.local,
      proof: f.bytes[d.proof..d.next].to_vec(),
    });
  }
  let names = if f.header.p_index == 0 {
    None
  } else {
    let idx = super::NameIndex::parse(f.bytes, f.header.p_index as usize)?;
    let entries: Vec<_> = idx.entries().map(|(k, i, s)| (k, i, s.to_owned())).collect();
    if entries.len() != idx.len() {
      return Err(MmbError::BadNameIndex(f.header.p_index as usize));
    }
    Some(entries)
  };
  Ok(Payload { sorts, terms, thms, decls, names })
}
