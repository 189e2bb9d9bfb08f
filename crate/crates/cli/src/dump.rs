//! Text rendering of a proof file. Operands that refer to sorts, terms and
//! theorems are shown by name when the name index has one.

use std::fmt::Write;

use mm0_core::kernel::Binder;
use mm0_core::mmb::{
  decode_proof_stream, decode_unify_stream, DeclKind, MmbError, MmbFile, NameKind, ProofOp,
  UnifyOp, VERSION,
};

#[derive(Clone, Copy, Debug)]
pub enum Part {
  All,
  Header,
  Names,
  Decl(usize),
}

struct Dumper<'a> {
  file: MmbFile<'a>,
  out: String,
}

impl Dumper<'_> {
  fn name(&self, kind: NameKind, id: u32) -> String {
    self.file.lookup_name(kind, id).map_or_else(|| id.to_string(), String::from)
  }

  fn binder(&self, b: Binder) -> String {
    let sort = self.name(NameKind::Sort, b.sort().0 as u32);
    if b.is_name() {
      format!("{{{sort}}}")
    } else {
      let deps: String = b.deps().iter().map(|i| format!(" {i}")).collect();
      format!("({sort}{deps})")
    }
  }

  fn binders(&self, bs: impl Iterator<Item = Binder>) -> String {
    bs.map(|b| format!(" {}", self.binder(b))).collect()
  }

  fn proof_op(&self, op: ProofOp) -> String {
    match op {
      ProofOp::Term(i) | ProofOp::TermSave(i) => {
        format!("{} {}", op.mnemonic(), self.name(NameKind::Term, i))
      }
      ProofOp::Thm(i) => format!("Thm {}", self.name(NameKind::Thm, i)),
      ProofOp::Dummy(s) => format!("Dummy {}", self.name(NameKind::Sort, s)),
      op => op.to_string(),
    }
  }

  fn unify_op(&self, op: UnifyOp) -> String {
    match op {
      UnifyOp::Term(i) | UnifyOp::TermSave(i) => {
        format!("{} {}", op.mnemonic(), self.name(NameKind::Term, i))
      }
      UnifyOp::Dummy(s) => format!("UDummy {}", self.name(NameKind::Sort, s)),
      op => op.to_string(),
    }
  }

  fn unify(&mut self, pos: usize) -> Result<(), MmbError> {
    let (ops, _) = decode_unify_stream(self.file.bytes, pos)?;
    let list: Vec<String> = ops.into_iter().map(|op| self.unify_op(op)).collect();
    writeln!(self.out, "  unify: {}", list.join(", ")).unwrap();
    Ok(())
  }

  fn header(&mut self) {
    let h = self.file.header;
    let out = &mut self.out;
    writeln!(out, "version {VERSION}").unwrap();
    writeln!(out, "sorts {}", h.num_sorts).unwrap();
    writeln!(out, "terms {}", h.num_terms).unwrap();
    writeln!(out, "theorems {}", h.num_thms).unwrap();
    writeln!(out, "term table {:#x}", h.p_terms).unwrap();
    writeln!(out, "theorem table {:#x}", h.p_thms).unwrap();
    writeln!(out, "declarations {:#x}", h.p_decls).unwrap();
    match h.p_index {
      0 => writeln!(out, "name index none").unwrap(),
      p => writeln!(out, "name index {p:#x}").unwrap(),
    }
  }

  fn tables(&mut self) -> Result<(), MmbError> {
    for i in 0..self.file.num_sorts() {
      let mods = self.file.sort_mods(mm0_core::kernel::SortId(i as u8)).unwrap();
      let kw: String = mods.keywords().map(|k| format!(" {k}")).collect();
      writeln!(self.out, "sort {i} {}{kw}", self.name(NameKind::Sort, i as u32)).unwrap();
    }
    for i in 0..self.file.num_terms() {
      let e = self.file.term(i)?;
      let kind = if e.unify.is_some() { "def" } else { "term" };
      let line = format!(
        "{kind} {i} {}{} > {}",
        self.name(NameKind::Term, i),
        self.binders(e.args.iter()),
        self.binder(e.ret)
      );
      writeln!(self.out, "{line}").unwrap();
      if let Some(u) = e.unify {
        self.unify(u)?;
      }
    }
    for i in 0..self.file.num_thms() {
      let e = self.file.thm(i)?;
      let line = format!(
        "thm {i} {}{}, {} hyps",
        self.name(NameKind::Thm, i),
        self.binders(e.args.iter()),
        e.num_hyps
      );
      writeln!(self.out, "{line}").unwrap();
      self.unify(e.unify)?;
    }
    Ok(())
  }

  /// Renders declarations; only the `only`-th one when given.
  fn decls(&mut self, only: Option<usize>) -> Result<bool, MmbError> {
    let (mut sorts, mut terms, mut thms) = (0, 0, 0);
    let mut found = false;
    for (n, d) in self.file.decls().enumerate() {
      let d = d?;
      let (kind, name) = match d.kind {
        DeclKind::Sort => ("sort", (NameKind::Sort, &mut sorts)),
        DeclKind::Term => ("term", (NameKind::Term, &mut terms)),
        DeclKind::Def => ("def", (NameKind::Term, &mut terms)),
        DeclKind::Axiom => ("axiom", (NameKind::Thm, &mut thms)),
        DeclKind::Thm => ("thm", (NameKind::Thm, &mut thms)),
      };
      let id = *name.1;
      *name.1 += 1;
      if only.is_some_and(|k| k != n) {
        continue;
      }
      found = true;
      let local = if d.local { "local " } else { "" };
      let label = self.name(name.0, id);
      writeln!(self.out, "decl {n} at {:#x}: {local}{kind} {label}", d.offset).unwrap();
      if d.kind.has_proof() {
        let (ops, end) = decode_proof_stream(self.file.bytes, d.proof)?;
        if end != d.next {
          return Err(MmbError::BadDecl(end));
        }
        let list: Vec<String> = ops.into_iter().map(|op| self.proof_op(op)).collect();
        writeln!(self.out, "  proof: {}", list.join(", ")).unwrap();
      }
    }
    Ok(found)
  }

  fn names(&mut self) -> Result<(), MmbError> {
    if self.file.header.p_index == 0 {
      writeln!(self.out, "names none").unwrap();
      return Ok(());
    }
    let idx = mm0_core::mmb::NameIndex::parse(self.file.bytes, self.file.header.p_index as usize)?;
    writeln!(self.out, "names {}", idx.len()).unwrap();
    let mut count = 0;
    for (kind, id, s) in idx.entries() {
      let kind = match kind {
        NameKind::Sort => "sort",
        NameKind::Term => "term",
        NameKind::Thm => "thm",
      };
      writeln!(self.out, "  {kind} {id} {s}").unwrap();
      count += 1;
    }
    if count != idx.len() {
      return Err(MmbError::BadNameIndex(self.file.header.p_index as usize));
    }
    Ok(())
  }
}

pub fn dump(bytes: &[u8], part: Part) -> Result<String, MmbError> {
  let file = MmbFile::parse(bytes)?;
  let mut d = Dumper { file, out: String::new() };
  match part {
    Part::Header => d.header(),
    Part::Names => d.names()?,
    Part::Decl(n) => {
      if !d.decls(Some(n))? {
        return Err(MmbError::OffsetOutOfBounds { field: "declaration number", offset: n as u64 });
      }
    }
    Part::All => {
      d.header();
      d.tables()?;
      d.decls(None)?;
      d.names()?;
    }
  }
  Ok(d.out)
}
