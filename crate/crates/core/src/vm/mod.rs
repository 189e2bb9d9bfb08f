//! The verifier: checks a proof file declaration by declaration against an
//! elaborated specification.
//!
//! Each declaration is checked with a fresh store and only the table prefix
//! validated before it, so declarations can also be checked out of order (see
//! [`VerifyOptions::parallel`]); the reported error is always the one at the
//! lowest offset.

mod machine;

use rayon::prelude::*;
use thiserror::Error;

use crate::kernel::{
  check_context, compute_vars, mk_app, Binder, BinderSlice, Definiens, Expr, ExprId, KernelError,
  Modifiers, Signatures, SortId, Store, TermId, VarMode, VarSet,
};
use crate::mmb::{DeclEntry, DeclKind, MmbError, MmbFile, NameKind};
use crate::spec::{Spec, SpecStmt};

pub use machine::{
  run_unify, Counters, Elem, ProofKind, ProofState, Tables, UnifyMode, Window, MAX_STACK,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VmErrorKind {
  #[error(transparent)]
  Codec(MmbError),
  #[error(transparent)]
  Kernel(KernelError),
  #[error("stack underflow")]
  StackUnderflow,
  #[error("stack overflow")]
  StackOverflow,
  #[error("expected {expected} on the stack")]
  TypeMismatchOnStack { expected: &'static str },
  #[error("{table} {id} is not yet available")]
  OutOfWindow { table: &'static str, id: u32 },
  #[error("bad heap reference {0}")]
  BadHeapRef(u32),
  #[error("sort {0} is not provable")]
  SortNotProvable(SortId),
  #[error("sort {0} cannot hold dummy variables")]
  DummyOfFreeSort(SortId),
  #[error("the two sides are not identical")]
  ReflMismatch,
  #[error("congruence between different heads")]
  CongMismatch,
  #[error("unfolding a term that is not a definition")]
  NotADefinition,
  #[error("unfolded term does not match the obligation")]
  UnfoldMismatch,
  #[error("unification failed")]
  UnifyFailure,
  #[error("unify stack not empty at end")]
  UnifyStackNonEmpty,
  #[error("not enough hypotheses")]
  HypUnderflow,
  #[error("wrong number of hypotheses")]
  HypCountMismatch,
  #[error("{0} is not allowed here")]
  UnifyOpNotAllowed(&'static str),
  #[error("proof ended with the wrong stack")]
  BadFinalStack,
  #[error("declaration does not match the specification: {0}")]
  SpecMismatch(String),
  #[error("public declaration has no matching statement")]
  ExtraPublicDeclaration,
  #[error("sorts, terms and axioms must appear in the specification")]
  LocalAxiomForbidden,
  #[error("{0} statements of the specification were not proven")]
  MissingDeclarations(usize),
  #[error("table sizes do not match the declarations")]
  TableCountMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at {offset:#x}{}: {kind}", .decl.as_ref().map(|d| format!(" in {d}")).unwrap_or_default())]
pub struct VmError {
  pub offset: usize,
  /// Name of the declaration being checked, when the name index has one.
  pub decl: Option<String>,
  pub kind: VmErrorKind,
}

impl VmError {
  pub fn new(offset: usize, kind: VmErrorKind) -> VmError {
    VmError { offset, decl: None, kind }
  }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
  pub parallel: bool,
}

/// Totals over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
  pub decls: u64,
  pub counters: Counters,
  /// Store allocations, counted by the store itself.
  pub allocations: u64,
  /// Largest store size reached by any single declaration.
  pub peak_decl_store: usize,
  /// The store's own high-water mark (sequential mode only; per worker in
  /// parallel mode, the maximum over workers).
  pub store_high_water: usize,
}

#[derive(Clone, Debug)]
pub struct Report {
  pub result: Result<(), VmError>,
  pub stats: Stats,
}

/// One declaration together with everything needed to check it in isolation.
#[derive(Clone, Debug)]
struct Plan {
  entry: DeclEntry,
  window: Window,
  /// The id this declaration introduces in its table.
  id: u32,
  /// The matching statement, or the positional matching error.
  stmt: Result<Option<SpecStmt>, VmErrorKind>,
}

/// Positional matching of declarations against statements, without looking
/// at proofs.
struct Planner<'a> {
  file: MmbFile<'a>,
  spec: &'a Spec,
  window: Window,
  next_stmt: usize,
  /// Spec term id to file term id.
  term_map: Vec<Option<u32>>,
}

impl<'a> Planner<'a> {
  fn new(file: MmbFile<'a>, spec: &'a Spec) -> Planner<'a> {
    Planner {
      file,
      spec,
      window: Window::default(),
      next_stmt: 0,
      term_map: vec![None; spec.env.terms.len()],
    }
  }

  fn plan(&mut self, entry: DeclEntry) -> Plan {
    let window = self.window;
    let (id, limit) = match entry.kind {
      DeclKind::Sort => (&mut self.window.sorts, self.file.num_sorts() as u32),
      DeclKind::Term | DeclKind::Def => (&mut self.window.terms, self.file.num_terms()),
      DeclKind::Axiom | DeclKind::Thm => (&mut self.window.thms, self.file.num_thms()),
    };
    let this = *id;
    if this >= limit {
      let stmt = Err(VmErrorKind::TableCountMismatch);
      return Plan { entry, window, id: this, stmt };
    }
    *id += 1;
    let stmt = if entry.local {
      Ok(None)
    } else {
      match self.spec.stmts.get(self.next_stmt) {
        None if matches!(entry.kind, DeclKind::Def | DeclKind::Thm) => {
          Err(VmErrorKind::ExtraPublicDeclaration)
        }
        None => Err(VmErrorKind::LocalAxiomForbidden),
        Some(&s) => {
          let env = &self.spec.env;
          let ok = match (entry.kind, s) {
            (DeclKind::Sort, SpecStmt::Sort(_)) => true,
            (DeclKind::Term, SpecStmt::Term(t)) => !env.term(t).is_def(),
            (DeclKind::Def, SpecStmt::Term(t)) => env.term(t).is_def(),
            (DeclKind::Axiom, SpecStmt::Thm(t)) => env.thm(t).axiom,
            (DeclKind::Thm, SpecStmt::Thm(t)) => !env.thm(t).axiom,
            _ => false,
          };
          if ok {
            self.next_stmt += 1;
            if let SpecStmt::Term(t) = s {
              self.term_map[t.0 as usize] = Some(this);
            }
            Ok(Some(s))
          } else if matches!(entry.kind, DeclKind::Sort | DeclKind::Term | DeclKind::Axiom) {
            Err(VmErrorKind::LocalAxiomForbidden)
          } else {
            Err(VmErrorKind::SpecMismatch(format!("expected {}", self.describe(s))))
          }
        }
      }
    };
    Plan { entry, window, id: this, stmt }
  }

  fn describe(&self, s: SpecStmt) -> String {
    let env = &self.spec.env;
    match s {
      SpecStmt::Sort(id) => format!("sort {}", env.sorts[id.0 as usize].name),
      SpecStmt::Term(id) => {
        format!("{} {}", if env.term(id).is_def() { "def" } else { "term" }, env.term(id).name)
      }
      SpecStmt::Thm(id) => {
        format!("{} {}", if env.thm(id).axiom { "axiom" } else { "theorem" }, env.thm(id).name)
      }
    }
  }

  /// Checks performed after the last declaration.
  fn finish(&self, end: usize) -> Result<(), VmError> {
    let left = self.spec.stmts.len() - self.next_stmt;
    if left > 0 {
      return Err(VmError::new(end, VmErrorKind::MissingDeclarations(left)));
    }
    let w = self.window;
    if w.sorts != self.file.num_sorts() as u32
      || w.terms != self.file.num_terms()
      || w.thms != self.file.num_thms()
    {
      return Err(VmError::new(end, VmErrorKind::TableCountMismatch));
    }
    Ok(())
  }
}

/// Per-worker scratch space.
#[derive(Default)]
struct Scratch {
  store: Store,
  spec_store: Option<Store>,
}

struct Checker<'a> {
  file: MmbFile<'a>,
  spec: &'a Spec,
  term_map: &'a [Option<u32>],
}

#[derive(Default)]
struct DeclResult {
  counters: Counters,
  store_len: usize,
}

fn kernel(at: usize) -> impl Fn(KernelError) -> VmError {
  move |e| VmError::new(at, VmErrorKind::Kernel(e))
}

fn mismatch(at: usize, what: &str) -> VmError {
  VmError::new(at, VmErrorKind::SpecMismatch(what.into()))
}

impl<'a> Checker<'a> {
  fn check(&self, plan: &Plan, scratch: &mut Scratch) -> Result<DeclResult, VmError> {
    let at = plan.entry.offset;
    let stmt = plan.stmt.clone().map_err(|k| VmError::new(at, k))?;
    let tables = Tables { file: self.file, window: plan.window };
    scratch.store.clear();
    let mut res = DeclResult::default();
    match plan.entry.kind {
      DeclKind::Sort => {
        if let Some(SpecStmt::Sort(s)) = stmt {
          let mods = self.file.sort_mods(SortId(plan.id as u8)).unwrap_or_default();
          if s.0 as u32 != plan.id || mods != self.spec.env.sorts[s.0 as usize].mods {
            return Err(mismatch(at, "sort modifiers differ"));
          }
        }
      }
      DeclKind::Term | DeclKind::Def => self.check_term(plan, stmt, &tables, scratch, &mut res)?,
      DeclKind::Axiom | DeclKind::Thm => self.check_thm(plan, stmt, &tables, scratch, &mut res)?,
    }
    res.store_len = scratch.store.len();
    Ok(res)
  }

  fn check_term(
    &self,
    plan: &Plan,
    stmt: Option<SpecStmt>,
    tables: &Tables<'a>,
    scratch: &mut Scratch,
    res: &mut DeclResult,
  ) -> Result<(), VmError> {
    let at = plan.entry.offset;
    let entry = self.file.term(plan.id).map_err(|e| VmError::new(at, VmErrorKind::Codec(e)))?;
    check_context(tables, entry.args).map_err(kernel(at))?;
    let ret = entry.ret.sort();
    let mods = tables.sort_mods(ret).ok_or_else(|| {
      VmError::new(at, VmErrorKind::OutOfWindow { table: "sort", id: ret.0.into() })
    })?;
    if mods.contains(Modifiers::PURE) {
      return Err(kernel(at)(KernelError::TermInPureSort(ret)));
    }
    let is_def = plan.entry.kind == DeclKind::Def;
    if entry.unify.is_some() != is_def {
      return Err(VmError::new(at, VmErrorKind::Codec(MmbError::BadEntry(at))));
    }
    if let Some(SpecStmt::Term(t)) = stmt {
      let decl = self.spec.env.term(t);
      if !binders_eq(&decl.args, entry.args) || decl.ret != entry.ret {
        return Err(mismatch(at, "binders or result type differ"));
      }
    }
    let Some(unify) = entry.unify else { return Ok(()) };
    let n = entry.args.len();
    let mut st = ProofState::new(*tables, &mut scratch.store, entry.args, ProofKind::Def)
      .map_err(kernel(at))?;
    let end = st.run(plan.entry.proof, plan.entry.next)?;
    let e = match st.stack[..] {
      [Elem::Expr(e)] => e,
      _ => return Err(VmError::new(end, VmErrorKind::BadFinalStack)),
    };
    if st.store.sort(e) != ret {
      return Err(VmError::new(end, VmErrorKind::BadFinalStack));
    }
    let fv = compute_vars(st.store, tables, e, VarMode::FV).map_err(kernel(at))?;
    if !fv.is_subset(entry.ret.deps()) {
      return Err(kernel(at)(KernelError::DefFreeVars(fv.minus(entry.ret.deps()))));
    }
    let mut u = st.arg_ids(n);
    let forbidden = arg_names(entry.args);
    let mut counters = st.counters;
    run_unify(tables, st.store, unify, &mut u, e, UnifyMode::Def { forbidden }, &mut counters)?;
    if let Some(SpecStmt::Term(t)) = stmt {
      if let Definiens::Some { dummies, body, .. } = &self.spec.env.term(t).def {
        let store = scratch.spec_store.get_or_insert_with(Store::with_interning);
        store.clear();
        let mut vars = preload(store, entry.args).map_err(kernel(at))?;
        vars.extend(preload_dummies(store, dummies, entry.args).map_err(kernel(at))?);
        let body =
          self.build(store, tables, &vars, body).map_err(|_| mismatch(at, "definition body"))?;
        let mut u = vars[..n].to_vec();
        let mut c = Counters::default();
        run_unify(tables, store, unify, &mut u, body, UnifyMode::Def { forbidden }, &mut c)
          .map_err(|_| mismatch(at, "definition body differs"))?;
      }
    }
    res.counters = counters;
    Ok(())
  }

  fn check_thm(
    &self,
    plan: &Plan,
    stmt: Option<SpecStmt>,
    tables: &Tables<'a>,
    scratch: &mut Scratch,
    res: &mut DeclResult,
  ) -> Result<(), VmError> {
    let at = plan.entry.offset;
    let entry = self.file.thm(plan.id).map_err(|e| VmError::new(at, VmErrorKind::Codec(e)))?;
    check_context(tables, entry.args).map_err(kernel(at))?;
    let n = entry.args.len();
    let kind = if plan.entry.kind == DeclKind::Axiom { ProofKind::Axiom } else { ProofKind::Thm };
    let mut st =
      ProofState::new(*tables, &mut scratch.store, entry.args, kind).map_err(kernel(at))?;
    let end = st.run(plan.entry.proof, plan.entry.next)?;
    let a = match (kind, &st.stack[..]) {
      (ProofKind::Axiom, [Elem::Expr(a)]) | (ProofKind::Thm, [Elem::Proof(a)]) => *a,
      _ => return Err(VmError::new(end, VmErrorKind::BadFinalStack)),
    };
    let s = st.store.sort(a);
    if !tables.sort_mods(s).is_some_and(|m| m.contains(Modifiers::PROVABLE)) {
      return Err(VmError::new(end, VmErrorKind::SortNotProvable(s)));
    }
    if st.hyps.len() != entry.num_hyps as usize {
      return Err(VmError::new(end, VmErrorKind::HypCountMismatch));
    }
    let mut u = st.arg_ids(n);
    let mut hyps = std::mem::take(&mut st.hyps);
    let mut counters = st.counters;
    run_unify(tables, st.store, entry.unify, &mut u, a, UnifyMode::Thm(&mut hyps), &mut counters)?;
    if let Some(SpecStmt::Thm(t)) = stmt {
      let decl = self.spec.env.thm(t);
      if !binders_eq(&decl.args, entry.args) || decl.hyps.len() != entry.num_hyps as usize {
        return Err(mismatch(at, "binders or hypotheses differ"));
      }
      let store = scratch.spec_store.get_or_insert_with(Store::with_interning);
      store.clear();
      let vars = preload(store, entry.args).map_err(kernel(at))?;
      let mut hyps = Vec::with_capacity(decl.hyps.len());
      for h in &decl.hyps {
        hyps.push(self.build(store, tables, &vars, h).map_err(|_| mismatch(at, "hypothesis"))?);
      }
      let concl =
        self.build(store, tables, &vars, &decl.concl).map_err(|_| mismatch(at, "conclusion"))?;
      let mut u = vars;
      let mut c = Counters::default();
      run_unify(tables, store, entry.unify, &mut u, concl, UnifyMode::Thm(&mut hyps), &mut c)
        .map_err(|_| mismatch(at, "statement differs"))?;
    }
    res.counters = counters;
    Ok(())
  }

  /// Builds a specification expression in an interning store, translating
  /// term ids to the file's numbering.
  fn build(
    &self,
    store: &mut Store,
    tables: &Tables<'_>,
    vars: &[ExprId],
    e: &Expr,
  ) -> Result<ExprId, KernelError> {
    match e {
      Expr::Var(i) => vars.get(*i as usize).copied().ok_or(KernelError::UnknownVar(*i)),
      Expr::App(t, args) => {
        let f =
          self.term_map.get(t.0 as usize).copied().flatten().ok_or(KernelError::UnknownTerm(*t))?;
        let mut ids = Vec::with_capacity(args.len());
        for a in args {
          ids.push(self.build(store, tables, vars, a)?);
        }
        mk_app(store, tables, TermId(f), &ids, false)
      }
    }
  }
}

fn binders_eq(spec: &[Binder], file: BinderSlice<'_>) -> bool {
  spec.len() == file.len() && spec.iter().copied().eq(file.iter())
}

fn arg_names(args: BinderSlice<'_>) -> VarSet {
  args.iter().filter(|b| b.is_name()).fold(VarSet::EMPTY, |acc, b| acc.union(b.deps()))
}

fn preload(store: &mut Store, args: BinderSlice<'_>) -> Result<Vec<ExprId>, KernelError> {
  args
    .iter()
    .enumerate()
    .map(|(i, b)| store.preload_var(i as u32, b.is_name(), b.sort(), b.deps()))
    .collect()
}

fn preload_dummies(
  store: &mut Store,
  dummies: &[Binder],
  args: BinderSlice<'_>,
) -> Result<Vec<ExprId>, KernelError> {
  dummies
    .iter()
    .enumerate()
    .map(|(j, b)| store.preload_var((args.len() + j) as u32, true, b.sort(), b.deps()))
    .collect()
}

fn name_of(file: &MmbFile<'_>, plan: &Plan) -> Option<String> {
  let kind = match plan.entry.kind {
    DeclKind::Sort => NameKind::Sort,
    DeclKind::Term | DeclKind::Def => NameKind::Term,
    DeclKind::Axiom | DeclKind::Thm => NameKind::Thm,
  };
  file.lookup_name(kind, plan.id).map(String::from)
}

/// Verifies `bytes` against `spec`. Stops at the first error.
pub fn verify(spec: &Spec, bytes: &[u8], opts: VerifyOptions) -> Report {
  let mut stats = Stats::default();
  let file = match MmbFile::parse(bytes) {
    Ok(f) => f,
    Err(e) => {
      let offset = e.offset().unwrap_or(0) as usize;
      return Report { result: Err(VmError::new(offset, VmErrorKind::Codec(e))), stats };
    }
  };
  let result = if opts.parallel {
    verify_parallel(file, spec, &mut stats)
  } else {
    verify_sequential(file, spec, &mut stats)
  };
  Report { result, stats }
}

fn record(stats: &mut Stats, r: &DeclResult) {
  stats.decls += 1;
  stats.counters.add(&r.counters);
  stats.peak_decl_store = stats.peak_decl_store.max(r.store_len);
}

fn with_name(file: &MmbFile<'_>, plan: &Plan, mut e: VmError) -> VmError {
  e.decl = name_of(file, plan);
  e
}

fn verify_sequential(file: MmbFile<'_>, spec: &Spec, stats: &mut Stats) -> Result<(), VmError> {
  let mut planner = Planner::new(file, spec);
  let mut scratch = Scratch::default();
  for entry in file.decls() {
    let entry =
      entry.map_err(|e| VmError::new(e.offset().unwrap_or(0) as usize, VmErrorKind::Codec(e)))?;
    let plan = planner.plan(entry);
    let checker = Checker { file, spec, term_map: &planner.term_map };
    let r = checker.check(&plan, &mut scratch);
    stats.allocations = scratch.store.alloc_count();
    stats.store_high_water = scratch.store.high_water();
    record(stats, &r.map_err(|e| with_name(&file, &plan, e))?);
  }
  planner.finish(file.decls_end())
}

fn verify_parallel(file: MmbFile<'_>, spec: &Spec, stats: &mut Stats) -> Result<(), VmError> {
  let mut planner = Planner::new(file, spec);
  let mut plans = vec![];
  let mut scan_err = None;
  for entry in file.decls() {
    match entry {
      Ok(entry) => plans.push(planner.plan(entry)),
      Err(e) => {
        scan_err = Some(VmError::new(e.offset().unwrap_or(0) as usize, VmErrorKind::Codec(e)))
      }
    }
  }
  let checker = Checker { file, spec, term_map: &planner.term_map };
  let results: Vec<(Result<DeclResult, VmError>, u64, usize)> = plans
    .par_iter()
    .map_init(Scratch::default, |scratch, plan| {
      let before = scratch.store.alloc_count();
      let r = checker.check(plan, scratch).map_err(|e| with_name(&file, plan, e));
      (r, scratch.store.alloc_count() - before, scratch.store.high_water())
    })
    .collect();
  for (r, allocs, hw) in results {
    stats.allocations += allocs;
    stats.store_high_water = stats.store_high_water.max(hw);
    record(stats, &r?);
  }
  if let Some(e) = scan_err {
    return Err(e);
  }
  planner.finish(file.decls_end())
}
