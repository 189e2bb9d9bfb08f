//! The proof and unify stream interpreters.

use crate::kernel::{
  check_args, check_disjoint, mk_app, ArgView, ExprId, Head, KernelError, Modifiers, Signatures,
  SortId, Store, TermId, TermSig, VarSet, MAX_BOUND_VARS,
};
use crate::mmb::{decode_proof_op, decode_unify_op, MmbError, MmbFile, ProofOp, UnifyOp};

use super::{VmError, VmErrorKind};

/// Maximum depth of the proof stack and of the unify stack.
pub const MAX_STACK: usize = 1 << 16;

/// How much of each table has been validated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Window {
  pub sorts: u32,
  pub terms: u32,
  pub thms: u32,
}

/// The tables of a file, restricted to the validated prefix.
#[derive(Clone, Copy, Debug)]
pub struct Tables<'a> {
  pub file: MmbFile<'a>,
  pub window: Window,
}

impl Signatures for Tables<'_> {
  fn sort_mods(&self, s: SortId) -> Option<Modifiers> {
    if u32::from(s.0) < self.window.sorts {
      self.file.sort_mods(s)
    } else {
      None
    }
  }

  fn term_sig(&self, t: TermId) -> Option<TermSig<'_>> {
    if t.0 >= self.window.terms {
      return None;
    }
    let e = self.file.term(t.0).ok()?;
    Some(TermSig { args: e.args, ret: e.ret })
  }
}

impl<'a> Tables<'a> {
  fn sort(&self, s: u32) -> Result<SortId, VmErrorKind> {
    if s < self.window.sorts {
      Ok(SortId(s as u8))
    } else {
      Err(VmErrorKind::OutOfWindow { table: "sort", id: s })
    }
  }

  fn term(&self, t: u32) -> Result<crate::mmb::TermEntry<'a>, VmErrorKind> {
    if t >= self.window.terms {
      return Err(VmErrorKind::OutOfWindow { table: "term", id: t });
    }
    self.file.term(t).map_err(VmErrorKind::Codec)
  }

  fn thm(&self, t: u32) -> Result<crate::mmb::ThmEntry<'a>, VmErrorKind> {
    if t >= self.window.thms {
      return Err(VmErrorKind::OutOfWindow { table: "theorem", id: t });
    }
    self.file.thm(t).map_err(VmErrorKind::Codec)
  }

  fn provable(&self, s: SortId) -> bool {
    self.sort_mods(s).is_some_and(|m| m.contains(Modifiers::PROVABLE))
  }
}

/// A stack or heap element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elem {
  Expr(ExprId),
  /// `⊢ A`
  Proof(ExprId),
  /// `e ≡ e'`
  Conv(ExprId, ExprId),
  /// `e ≗ e'`, an obligation.
  CoConv(ExprId, ExprId),
}

/// Counters for one declaration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
  pub proof_ops: u64,
  pub unify_ops: u64,
  /// `Term`, `TermSave` and `Dummy` steps.
  pub alloc_ops: u64,
  /// Identity comparisons performed by `URef`, `Refl`, `ConvRef` and `Unfold`.
  pub comparisons: u64,
  pub equality_steps: u64,
  pub peak_stack: usize,
}

impl Counters {
  pub fn add(&mut self, o: &Counters) {
    self.proof_ops += o.proof_ops;
    self.unify_ops += o.unify_ops;
    self.alloc_ops += o.alloc_ops;
    self.comparisons += o.comparisons;
    self.equality_steps += o.equality_steps;
    self.peak_stack = self.peak_stack.max(o.peak_stack);
  }
}

/// What `UHyp` and `UDummy` may do during a unify run.
pub enum UnifyMode<'h> {
  /// Theorem application or statement check: `UHyp` takes hypotheses from
  /// the end of the list.
  Thm(&'h mut Vec<ExprId>),
  /// Definition check or unfolding: `UDummy` accepts fresh names that avoid
  /// `forbidden` and each other.
  Def { forbidden: VarSet },
}

/// Runs the unify stream at `pos` with heap `u` against `target`.
pub fn run_unify(
  tables: &Tables<'_>,
  store: &Store,
  pos: usize,
  u: &mut Vec<ExprId>,
  target: ExprId,
  mut mode: UnifyMode<'_>,
  counters: &mut Counters,
) -> Result<(), VmError> {
  let bytes = tables.file.bytes;
  let mut k = vec![target];
  let mut used = VarSet::EMPTY;
  let mut pos = pos;
  loop {
    let at = pos;
    let (op, next) =
      decode_unify_op(bytes, pos).map_err(|e| VmError::new(at, VmErrorKind::Codec(e)))?;
    pos = next;
    counters.unify_ops += 1;
    let err = |kind| VmError::new(at, kind);
    let pop = |k: &mut Vec<ExprId>| k.pop().ok_or_else(|| err(VmErrorKind::StackUnderflow));
    match op {
      UnifyOp::End => {
        if !k.is_empty() {
          return Err(err(VmErrorKind::UnifyStackNonEmpty));
        }
        if let UnifyMode::Thm(hyps) = &mode {
          if !hyps.is_empty() {
            return Err(err(VmErrorKind::HypCountMismatch));
          }
        }
        return Ok(());
      }
      UnifyOp::Term(t) | UnifyOp::TermSave(t) => {
        if t >= tables.window.terms {
          return Err(err(VmErrorKind::OutOfWindow { table: "term", id: t }));
        }
        let e = pop(&mut k)?;
        if matches!(op, UnifyOp::TermSave(_)) {
          u.push(e);
        }
        if store.node(e).head != Head::App(TermId(t)) {
          return Err(err(VmErrorKind::UnifyFailure));
        }
        let args = store.args(e);
        if k.len() + args.len() > MAX_STACK {
          return Err(err(VmErrorKind::StackOverflow));
        }
        k.extend(args.iter().rev());
      }
      UnifyOp::Ref(i) => {
        let e = pop(&mut k)?;
        let h = *u.get(i as usize).ok_or_else(|| err(VmErrorKind::BadHeapRef(i)))?;
        counters.comparisons += 1;
        counters.equality_steps += 1;
        if h != e {
          return Err(err(VmErrorKind::UnifyFailure));
        }
      }
      UnifyOp::Save => {
        let e = *k.last().ok_or_else(|| err(VmErrorKind::StackUnderflow))?;
        u.push(e);
      }
      UnifyOp::Dummy(s) => {
        let UnifyMode::Def { forbidden } = mode else {
          return Err(err(VmErrorKind::UnifyOpNotAllowed("UDummy")));
        };
        let s = tables.sort(s).map_err(err)?;
        if tables.sort_mods(s).is_some_and(|m| m.intersects(Modifiers::FREE | Modifiers::STRICT)) {
          return Err(err(VmErrorKind::DummyOfFreeSort(s)));
        }
        let x = pop(&mut k)?;
        let n = store.node(x);
        if !n.is_name() || n.sort != s || n.vars.intersects(forbidden.union(used)) {
          return Err(err(VmErrorKind::UnifyFailure));
        }
        used = used.union(n.vars);
        u.push(x);
      }
      UnifyOp::Hyp => {
        let UnifyMode::Thm(hyps) = &mut mode else {
          return Err(err(VmErrorKind::UnifyOpNotAllowed("UHyp")));
        };
        let h = hyps.pop().ok_or_else(|| err(VmErrorKind::HypUnderflow))?;
        if k.len() >= MAX_STACK {
          return Err(err(VmErrorKind::StackOverflow));
        }
        k.push(h);
      }
    }
  }
}

/// Which kind of declaration a proof stream belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofKind {
  Def,
  Axiom,
  Thm,
}

/// The state of the proof stream interpreter for one declaration.
pub struct ProofState<'a, 's> {
  pub tables: Tables<'a>,
  pub store: &'s mut Store,
  pub heap: Vec<Elem>,
  pub stack: Vec<Elem>,
  /// Δ, in the order the `Hyp` steps ran.
  pub hyps: Vec<ExprId>,
  /// Next free name ordinal.
  pub next_name: usize,
  pub kind: ProofKind,
  pub counters: Counters,
}

impl<'a, 's> ProofState<'a, 's> {
  /// Initializes the heap with the context's variables.
  pub fn new(
    tables: Tables<'a>,
    store: &'s mut Store,
    args: crate::kernel::BinderSlice<'_>,
    kind: ProofKind,
  ) -> Result<ProofState<'a, 's>, KernelError> {
    let mut heap = Vec::with_capacity(args.len());
    let mut next_name = 0;
    for (i, b) in args.iter().enumerate() {
      let id = store.preload_var(i as u32, b.is_name(), b.sort(), b.deps())?;
      next_name += usize::from(b.is_name());
      heap.push(Elem::Expr(id));
    }
    Ok(ProofState {
      tables,
      store,
      heap,
      stack: vec![],
      hyps: vec![],
      next_name,
      kind,
      counters: Counters::default(),
    })
  }

  /// The context variables, in binder order.
  pub fn arg_ids(&self, n: usize) -> Vec<ExprId> {
    self.heap[..n]
      .iter()
      .map(|e| match e {
        Elem::Expr(id) => *id,
        _ => unreachable!("context entries are expressions"),
      })
      .collect()
  }

  fn push(&mut self, e: Elem) -> Result<(), VmErrorKind> {
    if self.stack.len() >= MAX_STACK {
      return Err(VmErrorKind::StackOverflow);
    }
    self.stack.push(e);
    self.counters.peak_stack = self.counters.peak_stack.max(self.stack.len());
    Ok(())
  }

  fn pop(&mut self) -> Result<Elem, VmErrorKind> {
    self.stack.pop().ok_or(VmErrorKind::StackUnderflow)
  }

  fn pop_expr(&mut self) -> Result<ExprId, VmErrorKind> {
    match self.pop()? {
      Elem::Expr(e) => Ok(e),
      _ => Err(VmErrorKind::TypeMismatchOnStack { expected: "an expression" }),
    }
  }

  fn pop_coconv(&mut self) -> Result<(ExprId, ExprId), VmErrorKind> {
    match self.pop()? {
      Elem::CoConv(a, b) => Ok((a, b)),
      _ => Err(VmErrorKind::TypeMismatchOnStack { expected: "a convertibility obligation" }),
    }
  }

  fn term(&mut self, t: u32) -> Result<(), VmErrorKind> {
    let entry = self.tables.term(t)?;
    let n = entry.args.len();
    if self.stack.len() < n {
      return Err(VmErrorKind::StackUnderflow);
    }
    let mut args = Vec::with_capacity(n);
    for e in &self.stack[self.stack.len() - n..] {
      match e {
        Elem::Expr(id) => args.push(*id),
        _ => return Err(VmErrorKind::TypeMismatchOnStack { expected: "an expression" }),
      }
    }
    self.stack.truncate(self.stack.len() - n);
    let id = mk_app(self.store, &self.tables, TermId(t), &args, self.kind == ProofKind::Def)
      .map_err(VmErrorKind::Kernel)?;
    self.counters.alloc_ops += 1;
    self.push(Elem::Expr(id))
  }

  fn save(&mut self) -> Result<(), VmErrorKind> {
    match self.stack.last() {
      Some(e @ (Elem::Expr(_) | Elem::Proof(_))) => {
        self.heap.push(*e);
        Ok(())
      }
      Some(_) => Err(VmErrorKind::TypeMismatchOnStack { expected: "an expression or proof" }),
      None => Err(VmErrorKind::StackUnderflow),
    }
  }

  fn thm(&mut self, t: u32, at: usize) -> Result<(), VmError> {
    let err = |k| VmError::new(at, k);
    let entry = self.tables.thm(t).map_err(err)?;
    let a = self.pop_expr().map_err(err)?;
    let (n, k) = (entry.args.len(), entry.num_hyps as usize);
    if self.stack.len() < n + k {
      return Err(err(VmErrorKind::StackUnderflow));
    }
    let base = self.stack.len() - n - k;
    let mut args = Vec::with_capacity(n);
    let mut views = Vec::with_capacity(n);
    for e in &self.stack[base..base + n] {
      let Elem::Expr(id) = *e else {
        return Err(err(VmErrorKind::TypeMismatchOnStack { expected: "an expression" }));
      };
      args.push(id);
      views.push(ArgView::of(self.store, id));
    }
    let mut hyps = Vec::with_capacity(k);
    for e in &self.stack[base + n..] {
      let Elem::Proof(id) = *e else {
        return Err(err(VmErrorKind::TypeMismatchOnStack { expected: "a proof" }));
      };
      hyps.push(id);
    }
    check_args(entry.args, &views).map_err(|e| err(VmErrorKind::Kernel(e)))?;
    check_disjoint(entry.args, &views).map_err(|e| err(VmErrorKind::Kernel(e)))?;
    run_unify(
      &self.tables,
      self.store,
      entry.unify,
      &mut args,
      a,
      UnifyMode::Thm(&mut hyps),
      &mut self.counters,
    )?;
    self.stack.truncate(base);
    self.push(Elem::Proof(a)).map_err(err)
  }

  fn unfold(&mut self, at: usize) -> Result<(), VmError> {
    let err = |k| VmError::new(at, k);
    let e2 = self.pop_expr().map_err(err)?;
    let fe = self.pop_expr().map_err(err)?;
    let Head::App(f) = self.store.node(fe).head else {
      return Err(err(VmErrorKind::NotADefinition));
    };
    let entry = self.tables.term(f.0).map_err(err)?;
    let unify = entry.unify.ok_or_else(|| err(VmErrorKind::NotADefinition))?;
    let mut u = self.store.args(fe).to_vec();
    let forbidden = u.iter().fold(VarSet::EMPTY, |acc, &a| acc.union(self.store.vars(a)));
    run_unify(
      &self.tables,
      self.store,
      unify,
      &mut u,
      e2,
      UnifyMode::Def { forbidden },
      &mut self.counters,
    )?;
    let (l, r) = self.pop_coconv().map_err(err)?;
    self.counters.comparisons += 1;
    self.counters.equality_steps += 1;
    if l != fe {
      return Err(err(VmErrorKind::UnfoldMismatch));
    }
    self.push(Elem::CoConv(e2, r)).map_err(err)
  }

  /// Executes one decoded step at byte offset `at`.
  pub fn step(&mut self, op: ProofOp, at: usize) -> Result<(), VmError> {
    let err = |k| VmError::new(at, k);
    self.counters.proof_ops += 1;
    match op {
      ProofOp::End => unreachable!("End is handled by the caller"),
      ProofOp::Save => self.save().map_err(err),
      ProofOp::Term(t) => self.term(t).map_err(err),
      ProofOp::TermSave(t) => self.term(t).and_then(|()| self.save()).map_err(err),
      ProofOp::Ref(i) => match self.heap.get(i as usize) {
        Some(e @ (Elem::Expr(_) | Elem::Proof(_))) => self.push(*e).map_err(err),
        _ => Err(err(VmErrorKind::BadHeapRef(i))),
      },
      ProofOp::Dummy(s) => {
        let s = self.tables.sort(s).map_err(err)?;
        let mods = self.tables.sort_mods(s).unwrap_or_default();
        if mods.intersects(Modifiers::FREE | Modifiers::STRICT) {
          return Err(err(VmErrorKind::DummyOfFreeSort(s)));
        }
        if self.next_name >= MAX_BOUND_VARS {
          return Err(err(VmErrorKind::Kernel(KernelError::TooManyNames)));
        }
        let index = (self.heap.len()) as u32;
        let id = self
          .store
          .alloc_var(index, true, s, VarSet::single(self.next_name))
          .map_err(|e| err(VmErrorKind::Kernel(e)))?;
        self.next_name += 1;
        self.counters.alloc_ops += 1;
        self.heap.push(Elem::Expr(id));
        self.push(Elem::Expr(id)).map_err(err)
      }
      ProofOp::Thm(t) => self.thm(t, at),
      ProofOp::Hyp => {
        if self.kind == ProofKind::Def {
          return Err(err(VmErrorKind::TypeMismatchOnStack {
            expected: "no hypotheses in a definition",
          }));
        }
        let a = self.pop_expr().map_err(err)?;
        let s = self.store.sort(a);
        if !self.tables.provable(s) {
          return Err(err(VmErrorKind::SortNotProvable(s)));
        }
        self.hyps.push(a);
        self.heap.push(Elem::Proof(a));
        Ok(())
      }
      ProofOp::Conv => {
        let b = match self.pop().map_err(err)? {
          Elem::Proof(b) => b,
          _ => return Err(err(VmErrorKind::TypeMismatchOnStack { expected: "a proof" })),
        };
        let a = self.pop_expr().map_err(err)?;
        let s = self.store.sort(a);
        if !self.tables.provable(s) {
          return Err(err(VmErrorKind::SortNotProvable(s)));
        }
        self.push(Elem::Proof(a)).map_err(err)?;
        self.push(Elem::CoConv(a, b)).map_err(err)
      }
      ProofOp::Refl => {
        let (a, b) = self.pop_coconv().map_err(err)?;
        self.counters.comparisons += 1;
        self.counters.equality_steps += 1;
        if a != b {
          return Err(err(VmErrorKind::ReflMismatch));
        }
        Ok(())
      }
      ProofOp::Symm => {
        let (a, b) = self.pop_coconv().map_err(err)?;
        self.push(Elem::CoConv(b, a)).map_err(err)
      }
      ProofOp::Cong => {
        let (a, b) = self.pop_coconv().map_err(err)?;
        let (na, nb) = (self.store.node(a), self.store.node(b));
        if !matches!(na.head, Head::App(_)) || na.head != nb.head {
          return Err(err(VmErrorKind::CongMismatch));
        }
        let n = self.store.args(a).len();
        if self.stack.len() + n > MAX_STACK {
          return Err(err(VmErrorKind::StackOverflow));
        }
        for i in (0..n).rev() {
          let (x, y) = (self.store.args(a)[i], self.store.args(b)[i]);
          self.push(Elem::CoConv(x, y)).map_err(err)?;
        }
        Ok(())
      }
      ProofOp::Unfold => self.unfold(at),
      ProofOp::ConvCut => {
        let b = self.pop_expr().map_err(err)?;
        let a = self.pop_expr().map_err(err)?;
        self.push(Elem::Conv(a, b)).map_err(err)?;
        self.push(Elem::CoConv(a, b)).map_err(err)
      }
      ProofOp::ConvRef(i) => {
        let (a, b) = self.pop_coconv().map_err(err)?;
        let Some(Elem::Conv(x, y)) = self.heap.get(i as usize).copied() else {
          return Err(err(VmErrorKind::BadHeapRef(i)));
        };
        self.counters.comparisons += 1;
        self.counters.equality_steps += 1;
        if (x, y) != (a, b) {
          return Err(err(VmErrorKind::ReflMismatch));
        }
        Ok(())
      }
      ProofOp::ConvSave => match self.pop().map_err(err)? {
        c @ Elem::Conv(..) => {
          self.heap.push(c);
          Ok(())
        }
        _ => Err(err(VmErrorKind::TypeMismatchOnStack { expected: "a convertibility proof" })),
      },
    }
  }

  /// Runs the proof stream at `pos` up to its `End`. Returns the offset just
  /// past the stream.
  pub fn run(&mut self, mut pos: usize, end: usize) -> Result<usize, VmError> {
    let bytes = &self.tables.file.bytes[..end];
    loop {
      let at = pos;
      let (op, next) =
        decode_proof_op(bytes, pos).map_err(|e| VmError::new(at, VmErrorKind::Codec(e)))?;
      pos = next;
      if op == ProofOp::End {
        if pos != end {
          return Err(VmError::new(pos, VmErrorKind::Codec(MmbError::BadDecl(pos))));
        }
        return Ok(pos);
      }
      self.step(op, at)?;
    }
  }
}
