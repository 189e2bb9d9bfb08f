use super::store::{ExprId, Head, Store};
use super::types::{Binder, BinderSlice, SortId, TermId, VarSet, MAX_BOUND_VARS};
use super::{Expr, KernelError, Signatures, TermSig};

/// Which variable set [`compute_vars`] returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarMode {
  /// Every occurring name.
  V,
  /// Free names only.
  FV,
}

/// What the argument checks need to know about one supplied expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArgView {
  pub sort: SortId,
  /// True iff the expression is a bare name (bound variable or dummy).
  pub name: bool,
  pub vars: VarSet,
}

impl ArgView {
  pub fn of(store: &Store, e: ExprId) -> ArgView {
    let n = store.node(e);
    ArgView { sort: n.sort, name: n.is_name(), vars: n.vars }
  }
}

fn check_slot(binder: Binder, arg: ArgView, pos: usize) -> Result<(), KernelError> {
  if binder.is_name() && !arg.name {
    return Err(KernelError::NameExpected(pos));
  }
  if binder.sort() != arg.sort {
    return Err(KernelError::SortMismatch { pos, expected: binder.sort(), found: arg.sort });
  }
  Ok(())
}

/// `Γ ⊢ ē :: Γ'`: name slots take names of the same sort, metavariable slots
/// take any expression of the same sort.
pub fn check_args(target: BinderSlice<'_>, args: &[ArgView]) -> Result<(), KernelError> {
  if target.len() != args.len() {
    return Err(KernelError::ArityMismatch {
      term: TermId(u32::MAX),
      expected: target.len(),
      found: args.len(),
    });
  }
  for (i, (b, a)) in target.iter().zip(args).enumerate() {
    check_slot(b, *a, i)?;
  }
  Ok(())
}

/// Checks that a context is well formed: sorts exist, names are not strict,
/// metavariables are not pure, and dependencies point at earlier names.
/// Returns the number of names.
pub fn check_context(
  sigs: &impl Signatures,
  binders: BinderSlice<'_>,
) -> Result<usize, KernelError> {
  let mut names = 0;
  for (i, b) in binders.iter().enumerate() {
    let mods = sigs.sort_mods(b.sort()).ok_or(KernelError::UnknownSort(b.sort()))?;
    if b.is_name() {
      if names >= MAX_BOUND_VARS {
        return Err(KernelError::TooManyNames);
      }
      if b.deps() != VarSet::single(names) {
        return Err(KernelError::BadDeps(i));
      }
      if mods.contains(super::Modifiers::STRICT) {
        return Err(KernelError::NameInStrictSort(i));
      }
      names += 1;
    } else {
      if b.deps().bits() >> names != 0 {
        return Err(KernelError::BadDeps(i));
      }
      if mods.contains(super::Modifiers::PURE) {
        return Err(KernelError::MetavarInPureSort(i));
      }
    }
  }
  Ok(names)
}

/// The disjointness side condition of theorem application: for each name
/// binder `x` at position `i` and each other binder `j` not declared to depend
/// on `x`, the name substituted for `x` must not occur in `V(args[j])`.
///
/// `args` must already have passed [`check_args`].
pub fn check_disjoint(target: BinderSlice<'_>, args: &[ArgView]) -> Result<(), KernelError> {
  let mut name_vars = [VarSet::EMPTY; MAX_BOUND_VARS];
  let mut name_pos = [0usize; MAX_BOUND_VARS];
  let mut all = VarSet::EMPTY;
  let mut k = 0;
  for (i, b) in target.iter().enumerate() {
    if b.is_name() {
      let v = args[i].vars;
      if all.intersects(v) {
        let other =
          (0..k).find(|&o| name_vars[o].intersects(v)).expect("some earlier name overlaps");
        return Err(KernelError::DisjointViolation(name_pos[other], i));
      }
      if k >= MAX_BOUND_VARS {
        return Err(KernelError::TooManyNames);
      }
      name_vars[k] = v;
      name_pos[k] = i;
      all = all.union(v);
      k += 1;
    }
  }
  for (j, b) in target.iter().enumerate() {
    if b.is_name() {
      continue;
    }
    let allowed =
      b.deps().iter().filter(|&d| d < k).fold(VarSet::EMPTY, |acc, d| acc.union(name_vars[d]));
    let bad = args[j].vars.inter(all).minus(allowed);
    if !bad.is_empty() {
      let o = (0..k).find(|&o| name_vars[o].intersects(bad)).expect("bad var comes from a name");
      return Err(KernelError::DisjointViolation(name_pos[o], j));
    }
  }
  Ok(())
}

/// FV of an application, given the V-sets of the name arguments and FV-sets
/// of the metavariable arguments.
fn app_fv(
  sig: &TermSig<'_>,
  args: &[ExprId],
  store: &Store,
  mut fv: impl FnMut(ExprId) -> VarSet,
) -> VarSet {
  let mut name_vars = [VarSet::EMPTY; MAX_BOUND_VARS];
  let mut k = 0;
  for (i, b) in sig.args.iter().enumerate() {
    if b.is_name() && k < MAX_BOUND_VARS {
      name_vars[k] = store.vars(args[i]);
      k += 1;
    }
  }
  let bound = |deps: VarSet| {
    deps.iter().filter(|&d| d < k).fold(VarSet::EMPTY, |acc, d| acc.union(name_vars[d]))
  };
  let mut out = bound(sig.ret.deps());
  for (j, b) in sig.args.iter().enumerate() {
    if !b.is_name() {
      out = out.union(fv(args[j]).minus(bound(b.deps())));
    }
  }
  out
}

/// Returns V(e) or FV(e). V is stored in every node; FV is memoized on first
/// request.
pub fn compute_vars(
  store: &mut Store,
  sigs: &impl Signatures,
  e: ExprId,
  mode: VarMode,
) -> Result<VarSet, KernelError> {
  let node = store.node(e);
  match mode {
    VarMode::V => Ok(node.vars),
    VarMode::FV => {
      if let Some(fv) = node.fv {
        return Ok(fv);
      }
      let Head::App(t) = node.head else { unreachable!("variables always carry FV") };
      let sig = sigs.term_sig(t).ok_or(KernelError::UnknownTerm(t))?;
      let args = store.args(e).to_vec();
      let mut child = Vec::with_capacity(args.len());
      for &a in &args {
        child.push(compute_vars(store, sigs, a, VarMode::FV)?);
      }
      let fv = app_fv(&sig, &args, store, |a| {
        child[args.iter().position(|&b| b == a).expect("an argument")]
      });
      store.set_fv(e, fv);
      Ok(fv)
    }
  }
}

/// Builds `f ē` in the store after checking `ē :: Γ'`. With `track_fv`, the
/// free-variable set is computed eagerly from the arguments' sets. When the
/// store interns, an existing identical node is returned instead.
pub fn mk_app(
  store: &mut Store,
  sigs: &impl Signatures,
  term: TermId,
  args: &[ExprId],
  track_fv: bool,
) -> Result<ExprId, KernelError> {
  let sig = sigs.term_sig(term).ok_or(KernelError::UnknownTerm(term))?;
  if sig.args.len() != args.len() {
    return Err(KernelError::ArityMismatch { term, expected: sig.args.len(), found: args.len() });
  }
  let mut vars = VarSet::EMPTY;
  for (i, (b, &a)) in sig.args.iter().zip(args).enumerate() {
    let view = ArgView::of(store, a);
    check_slot(b, view, i)?;
    vars = vars.union(view.vars);
  }
  if let Some(id) = store.lookup_app(term, args) {
    return Ok(id);
  }
  let fv = if track_fv {
    let mut ok = true;
    let fv = app_fv(&sig, args, store, |a| {
      store.node(a).fv.unwrap_or_else(|| {
        ok = false;
        VarSet::EMPTY
      })
    });
    ok.then_some(fv)
  } else {
    None
  };
  let id = store.alloc_app(term, args, sig.ret.sort(), vars, fv)?;
  store.record_app(term, args, id);
  Ok(id)
}

/// `target[Γ' ↦ subst]`. Applications are rebuilt with [`mk_app`], so an
/// interning store shares identical subterms.
pub fn substitute(
  store: &mut Store,
  sigs: &impl Signatures,
  target: &Expr,
  subst: &[ExprId],
) -> Result<ExprId, KernelError> {
  match target {
    Expr::Var(i) => subst.get(*i as usize).copied().ok_or(KernelError::UnknownVar(*i)),
    Expr::App(t, args) => {
      let mut ids = Vec::with_capacity(args.len());
      for a in args {
        ids.push(substitute(store, sigs, a, subst)?);
      }
      mk_app(store, sigs, *t, &ids, store.is_interning())
    }
  }
}

/// `Γ ⊢ e : s`.
pub fn infer_sort(
  sigs: &impl Signatures,
  ctx: BinderSlice<'_>,
  e: &Expr,
) -> Result<SortId, KernelError> {
  match e {
    Expr::Var(i) => ctx.get(*i as usize).map(|b| b.sort()).ok_or(KernelError::UnknownVar(*i)),
    Expr::App(t, args) => {
      let sig = sigs.term_sig(*t).ok_or(KernelError::UnknownTerm(*t))?;
      if sig.args.len() != args.len() {
        return Err(KernelError::ArityMismatch {
          term: *t,
          expected: sig.args.len(),
          found: args.len(),
        });
      }
      for (i, (b, a)) in sig.args.iter().zip(args).enumerate() {
        let sort = infer_sort(sigs, ctx, a)?;
        let name = matches!(a, Expr::Var(j) if ctx.get(*j as usize).is_some_and(|b| b.is_name()));
        check_slot(b, ArgView { sort, name, vars: VarSet::EMPTY }, i)?;
      }
      Ok(sig.ret.sort())
    }
  }
}

/// V(e) of a tree, by direct recursion.
pub fn expr_vars(ctx: BinderSlice<'_>, e: &Expr) -> Result<VarSet, KernelError> {
  match e {
    Expr::Var(i) => ctx.get(*i as usize).map(|b| b.deps()).ok_or(KernelError::UnknownVar(*i)),
    Expr::App(_, args) => {
      args.iter().try_fold(VarSet::EMPTY, |acc, a| Ok(acc.union(expr_vars(ctx, a)?)))
    }
  }
}
