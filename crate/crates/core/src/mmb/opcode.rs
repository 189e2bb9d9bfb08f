//! Opcode encoding: one command byte `(code << 2) | sizebits` followed by a
//! little-endian immediate of 0, 1, 2 or 4 bytes.

use std::fmt;

use super::MmbError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProofOp {
  End,
  Ref(u32),
  Dummy(u32),
  Term(u32),
  TermSave(u32),
  Thm(u32),
  Hyp,
  Conv,
  Refl,
  Symm,
  Cong,
  Unfold,
  ConvCut,
  ConvRef(u32),
  ConvSave,
  Save,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnifyOp {
  End,
  Term(u32),
  TermSave(u32),
  Ref(u32),
  Dummy(u32),
  Hyp,
  Save,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
  Invalid,
  Bare(u8),
  Imm(u8),
}

const fn proof_kind(code: u8) -> Kind {
  match code {
    0 | 6..=12 | 14 | 15 => Kind::Bare(code),
    1..=5 | 13 => Kind::Imm(code),
    _ => Kind::Invalid,
  }
}

const fn unify_kind(code: u8) -> Kind {
  match code {
    0 | 5 | 6 => Kind::Bare(code),
    1..=4 => Kind::Imm(code),
    _ => Kind::Invalid,
  }
}

const fn build_proof() -> [Kind; 256] {
  let mut t = [Kind::Invalid; 256];
  let mut b = 0;
  while b < 256 {
    t[b] = match proof_kind((b >> 2) as u8) {
      Kind::Bare(c) if b & 3 == 0 => Kind::Bare(c),
      Kind::Imm(c) => Kind::Imm(c),
      _ => Kind::Invalid,
    };
    b += 1;
  }
  t
}

const fn build_unify() -> [Kind; 256] {
  let mut t = [Kind::Invalid; 256];
  let mut b = 0;
  while b < 256 {
    t[b] = match unify_kind((b >> 2) as u8) {
      Kind::Bare(c) if b & 3 == 0 => Kind::Bare(c),
      Kind::Imm(c) => Kind::Imm(c),
      _ => Kind::Invalid,
    };
    b += 1;
  }
  t
}

static PROOF_TABLE: [Kind; 256] = build_proof();
static UNIFY_TABLE: [Kind; 256] = build_unify();

fn read_imm(bytes: &[u8], pos: usize) -> Result<(u32, usize), MmbError> {
  let size = match bytes[pos] & 3 {
    0 => 0,
    1 => 1,
    2 => 2,
    _ => 4,
  };
  let start = pos + 1;
  let imm = bytes.get(start..start + size).ok_or(MmbError::TruncatedImmediate(pos))?;
  let mut buf = [0u8; 4];
  buf[..size].copy_from_slice(imm);
  Ok((u32::from_le_bytes(buf), start + size))
}

fn decode(table: &[Kind; 256], bytes: &[u8], pos: usize) -> Result<(Kind, u32, usize), MmbError> {
  let &b = bytes.get(pos).ok_or(MmbError::TruncatedFile { offset: pos })?;
  match table[b as usize] {
    Kind::Invalid => Err(MmbError::UnknownOpcode { offset: pos, byte: b }),
    k @ Kind::Bare(_) => Ok((k, 0, pos + 1)),
    k @ Kind::Imm(_) => {
      let (imm, next) = read_imm(bytes, pos)?;
      Ok((k, imm, next))
    }
  }
}

/// Decodes the proof opcode at `pos`, returning it with the next position.
pub fn decode_proof_op(bytes: &[u8], pos: usize) -> Result<(ProofOp, usize), MmbError> {
  let (k, imm, next) = decode(&PROOF_TABLE, bytes, pos)?;
  let code = match k {
    Kind::Bare(c) | Kind::Imm(c) => c,
    Kind::Invalid => unreachable!(),
  };
  let op = match code {
    0 => ProofOp::End,
    1 => ProofOp::Ref(imm),
    2 => ProofOp::Dummy(imm),
    3 => ProofOp::Term(imm),
    4 => ProofOp::TermSave(imm),
    5 => ProofOp::Thm(imm),
    6 => ProofOp::Hyp,
    7 => ProofOp::Conv,
    8 => ProofOp::Refl,
    9 => ProofOp::Symm,
    10 => ProofOp::Cong,
    11 => ProofOp::Unfold,
    12 => ProofOp::ConvCut,
    13 => ProofOp::ConvRef(imm),
    14 => ProofOp::ConvSave,
    _ => ProofOp::Save,
  };
  Ok((op, next))
}

/// Decodes the unify opcode at `pos`, returning it with the next position.
pub fn decode_unify_op(bytes: &[u8], pos: usize) -> Result<(UnifyOp, usize), MmbError> {
  let (k, imm, next) = decode(&UNIFY_TABLE, bytes, pos)?;
  let code = match k {
    Kind::Bare(c) | Kind::Imm(c) => c,
    Kind::Invalid => unreachable!(),
  };
  let op = match code {
    0 => UnifyOp::End,
    1 => UnifyOp::Term(imm),
    2 => UnifyOp::TermSave(imm),
    3 => UnifyOp::Ref(imm),
    4 => UnifyOp::Dummy(imm),
    5 => UnifyOp::Hyp,
    _ => UnifyOp::Save,
  };
  Ok((op, next))
}

fn encode(out: &mut Vec<u8>, code: u8, imm: Option<u32>) {
  match imm {
    None | Some(0) => out.push(code << 2),
    Some(n) if n <= 0xff => out.extend([code << 2 | 1, n as u8]),
    Some(n) if n <= 0xffff => {
      out.push(code << 2 | 2);
      out.extend((n as u16).to_le_bytes());
    }
    Some(n) => {
      out.push(code << 2 | 3);
      out.extend(n.to_le_bytes());
    }
  }
}

impl ProofOp {
  /// Appends the canonical (shortest) encoding.
  pub fn encode(self, out: &mut Vec<u8>) {
    let (code, imm) = match self {
      ProofOp::End => (0, None),
      ProofOp::Ref(i) => (1, Some(i)),
      ProofOp::Dummy(s) => (2, Some(s)),
      ProofOp::Term(t) => (3, Some(t)),
      ProofOp::TermSave(t) => (4, Some(t)),
      ProofOp::Thm(t) => (5, Some(t)),
      ProofOp::Hyp => (6, None),
      ProofOp::Conv => (7, None),
      ProofOp::Refl => (8, None),
      ProofOp::Symm => (9, None),
      ProofOp::Cong => (10, None),
      ProofOp::Unfold => (11, None),
      ProofOp::ConvCut => (12, None),
      ProofOp::ConvRef(i) => (13, Some(i)),
      ProofOp::ConvSave => (14, None),
      ProofOp::Save => (15, None),
    };
    encode(out, code, imm)
  }

  pub fn mnemonic(self) -> &'static str {
    match self {
      ProofOp::End => "End",
      ProofOp::Ref(_) => "Ref",
      ProofOp::Dummy(_) => "Dummy",
      ProofOp::Term(_) => "Term",
      ProofOp::TermSave(_) => "TermSave",
      ProofOp::Thm(_) => "Thm",
      ProofOp::Hyp => "Hyp",
      ProofOp::Conv => "Conv",
      ProofOp::Refl => "Refl",
      ProofOp::Symm => "Symm",
      ProofOp::Cong => "Cong",
      ProofOp::Unfold => "Unfold",
      ProofOp::ConvCut => "ConvCut",
      ProofOp::ConvRef(_) => "ConvRef",
      ProofOp::ConvSave => "ConvSave",
      ProofOp::Save => "Save",
    }
  }

  pub fn immediate(self) -> Option<u32> {
    match self {
      ProofOp::Ref(i)
      | ProofOp::Dummy(i)
      | ProofOp::Term(i)
      | ProofOp::TermSave(i)
      | ProofOp::Thm(i)
      | ProofOp::ConvRef(i) => Some(i),
      _ => None,
    }
  }

  /// All variants, with `imm` in the immediate-taking ones.
  pub fn all(imm: u32) -> [ProofOp; 16] {
    use ProofOp::*;
    [
      End,
      Ref(imm),
      Dummy(imm),
      Term(imm),
      TermSave(imm),
      Thm(imm),
      Hyp,
      Conv,
      Refl,
      Symm,
      Cong,
      Unfold,
      ConvCut,
      ConvRef(imm),
      ConvSave,
      Save,
    ]
  }
}

impl UnifyOp {
  pub fn encode(self, out: &mut Vec<u8>) {
    let (code, imm) = match self {
      UnifyOp::End => (0, None),
      UnifyOp::Term(t) => (1, Some(t)),
      UnifyOp::TermSave(t) => (2, Some(t)),
      UnifyOp::Ref(i) => (3, Some(i)),
      UnifyOp::Dummy(s) => (4, Some(s)),
      UnifyOp::Hyp => (5, None),
      UnifyOp::Save => (6, None),
    };
    encode(out, code, imm)
  }

  pub fn mnemonic(self) -> &'static str {
    match self {
      UnifyOp::End => "UEnd",
      UnifyOp::Term(_) => "UTerm",
      UnifyOp::TermSave(_) => "UTermSave",
      UnifyOp::Ref(_) => "URef",
      UnifyOp::Dummy(_) => "UDummy",
      UnifyOp::Hyp => "UHyp",
      UnifyOp::Save => "USave",
    }
  }

  pub fn immediate(self) -> Option<u32> {
    match self {
      UnifyOp::Term(i) | UnifyOp::TermSave(i) | UnifyOp::Ref(i) | UnifyOp::Dummy(i) => Some(i),
      _ => None,
    }
  }

  pub fn all(imm: u32) -> [UnifyOp; 7] {
    use UnifyOp::*;
    [End, Term(imm), TermSave(imm), Ref(imm), Dummy(imm), Hyp, Save]
  }
}

impl fmt::Display for ProofOp {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match self.immediate() {
      Some(i) => write!(f, "{} {i}", self.mnemonic()),
      None => f.write_str(self.mnemonic()),
    }
  }
}

impl fmt::Display for UnifyOp {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match self.immediate() {
      Some(i) => write!(f, "{} {i}", self.mnemonic()),
      None => f.write_str(self.mnemonic()),
    }
  }
}

/// Decodes a whole stream up to and including its `End`.
pub fn decode_proof_stream(
  bytes: &[u8],
  mut pos: usize,
) -> Result<(Vec<ProofOp>, usize), MmbError> {
  let mut ops = vec![];
  loop {
    let (op, next) = decode_proof_op(bytes, pos)?;
    pos = next;
    if op == ProofOp::End {
      return Ok((ops, pos));
    }
    ops.push(op);
  }
}

pub fn decode_unify_stream(
  bytes: &[u8],
  mut pos: usize,
) -> Result<(Vec<UnifyOp>, usize), MmbError> {
  let mut ops = vec![];
  loop {
    let (op, next) = decode_unify_op(bytes, pos)?;
    pos = next;
    if op == UnifyOp::End {
      return Ok((ops, pos));
    }
    ops.push(op);
  }
}

/// Encodes `ops` followed by `End`.
pub fn encode_proof_stream(ops: &[ProofOp]) -> Vec<u8> {
  let mut out = vec![];
  ops.iter().for_each(|op| op.encode(&mut out));
  ProofOp::End.encode(&mut out);
  out
}

pub fn encode_unify_stream(ops: &[UnifyOp]) -> Vec<u8> {
  let mut out = vec![];
  ops.iter().for_each(|op| op.encode(&mut out));
  UnifyOp::End.encode(&mut out);
  out
}
