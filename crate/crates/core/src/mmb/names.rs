//! The strippable name index: `u32 count`, `count` sorted 12-byte records
//! `(kind u8, 3 reserved, id u32, string offset u32)`, then a pool of
//! NUL-terminated UTF-8 strings. String offsets are relative to the pool.

use super::{u32_at, MmbError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameKind {
  Sort = 0,
  Term = 1,
  Thm = 2,
}

impl NameKind {
  fn from_byte(b: u8) -> Option<NameKind> {
    match b {
      0 => Some(NameKind::Sort),
      1 => Some(NameKind::Term),
      2 => Some(NameKind::Thm),
      _ => None,
    }
  }
}

const RECORD: usize = 12;

#[derive(Clone, Copy, Debug)]
pub struct NameIndex<'a> {
  records: &'a [u8],
  pool: &'a [u8],
}

impl<'a> NameIndex<'a> {
  /// Checks the record array and its ordering. Strings are checked lazily.
  pub fn parse(bytes: &'a [u8], pos: usize) -> Result<NameIndex<'a>, MmbError> {
    let count = bytes.get(pos..pos + 4).ok_or(MmbError::BadNameIndex(pos))?;
    let count = u32::from_le_bytes(count.try_into().unwrap()) as usize;
    let start = pos + 4;
    let end = count
      .checked_mul(RECORD)
      .and_then(|n| n.checked_add(start))
      .ok_or(MmbError::BadNameIndex(pos))?;
    let records = bytes.get(start..end).ok_or(MmbError::BadNameIndex(pos))?;
    let mut prev = None;
    for r in records.chunks_exact(RECORD) {
      let kind = NameKind::from_byte(r[0]).ok_or(MmbError::BadNameIndex(pos))?;
      let key = (kind, u32_at(r, 4));
      if r[1..4] != [0; 3] || prev.is_some_and(|p| p >= key) {
        return Err(MmbError::BadNameIndex(pos));
      }
      prev = Some(key);
    }
    Ok(NameIndex { records, pool: &bytes[end..] })
  }

  pub fn len(&self) -> usize {
    self.records.len() / RECORD
  }
  pub fn is_empty(&self) -> bool {
    self.records.is_empty()
  }

  fn key(&self, i: usize) -> (u8, u32) {
    let r = &self.records[i * RECORD..];
    (r[0], u32_at(r, 4))
  }

  pub fn lookup(&self, kind: NameKind, id: u32) -> Option<&'a str> {
    let (mut lo, mut hi) = (0, self.len());
    let want = (kind as u8, id);
    while lo < hi {
      let mid = (lo + hi) / 2;
      match self.key(mid).cmp(&want) {
        std::cmp::Ordering::Less => lo = mid + 1,
        std::cmp::Ordering::Greater => hi = mid,
        std::cmp::Ordering::Equal => {
          let off = u32_at(&self.records[mid * RECORD..], 8) as usize;
          let s = self.pool.get(off..)?;
          let nul = s.iter().position(|&b| b == 0)?;
          return std::str::from_utf8(&s[..nul]).ok();
        }
      }
    }
    None
  }

  /// All entries in index order; malformed strings are skipped.
  pub fn entries(&self) -> impl Iterator<Item = (NameKind, u32, &'a str)> + '_ {
    (0..self.len()).filter_map(move |i| {
      let (k, id) = self.key(i);
      let kind = NameKind::from_byte(k)?;
      Some((kind, id, self.lookup(kind, id)?))
    })
  }
}

/// Serializes a name index from `(kind, id, name)` triples in any order.
pub(crate) fn write_index(
  out: &mut Vec<u8>,
  entries: &mut [(NameKind, u32, &str)],
) -> Result<(), MmbError> {
  entries.sort_by_key(|&(k, id, _)| (k, id));
  if entries.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
    return Err(MmbError::LimitExceeded("duplicate name entry"));
  }
  let count = u32::try_from(entries.len()).map_err(|_| MmbError::LimitExceeded("name count"))?;
  out.extend(count.to_le_bytes());
  let mut pool = vec![];
  for &(kind, id, name) in entries.iter() {
    if name.contains('\0') {
      return Err(MmbError::LimitExceeded("name with NUL byte"));
    }
    let off = u32::try_from(pool.len()).map_err(|_| MmbError::LimitExceeded("name pool"))?;
    out.extend([kind as u8, 0, 0, 0]);
    out.extend(id.to_le_bytes());
    out.extend(off.to_le_bytes());
    pool.extend(name.as_bytes());
    pool.push(0);
  }
  out.extend(pool);
  Ok(())
}
