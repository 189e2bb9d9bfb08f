use std::collections::HashMap;

use super::check::{check_context, compute_vars, infer_sort, substitute, VarMode};
use super::store::Store;
use super::types::{Binder, BinderSlice, Modifiers, SortId, TermId, ThmId, VarSet, MAX_SORTS};
use super::{Expr, KernelError, Signatures, TermSig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecl {
  pub name: String,
  pub mods: Modifiers,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definiens {
  /// A term constructor.
  None,
  /// A definition whose body is not given.
  Abstract,
  /// `= ȳ:s'. body`; dummies are numbered after the arguments.
  Some { dummies: Vec<Binder>, dummy_names: Vec<String>, body: Expr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDecl {
  pub name: String,
  pub args: Vec<Binder>,
  pub var_names: Vec<String>,
  pub ret: Binder,
  pub def: Definiens,
}

impl TermDecl {
  pub fn is_def(&self) -> bool {
    !matches!(self.def, Definiens::None)
  }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThmDecl {
  pub name: String,
  pub args: Vec<Binder>,
  pub var_names: Vec<String>,
  pub hyps: Vec<Expr>,
  pub hyp_names: Vec<String>,
  pub concl: Expr,
  pub axiom: bool,
}

/// An ordered list of validated declarations.
#[derive(Clone, Debug, Default)]
pub struct Environment {
  pub sorts: Vec<SortDecl>,
  pub terms: Vec<TermDecl>,
  pub thms: Vec<ThmDecl>,
  sort_names: HashMap<String, SortId>,
  term_names: HashMap<String, TermId>,
  thm_names: HashMap<String, ThmId>,
}

impl Signatures for Environment {
  fn sort_mods(&self, s: SortId) -> Option<Modifiers> {
    self.sorts.get(s.0 as usize).map(|s| s.mods)
  }

  fn term_sig(&self, t: TermId) -> Option<TermSig<'_>> {
    let t = self.terms.get(t.0 as usize)?;
    Some(TermSig { args: BinderSlice::Owned(&t.args), ret: t.ret })
  }
}

impl Environment {
  pub fn new() -> Environment {
    Environment::default()
  }

  pub fn sort_id(&self, name: &str) -> Option<SortId> {
    self.sort_names.get(name).copied()
  }
  pub fn term_id(&self, name: &str) -> Option<TermId> {
    self.term_names.get(name).copied()
  }
  pub fn thm_id(&self, name: &str) -> Option<ThmId> {
    self.thm_names.get(name).copied()
  }

  pub fn term(&self, t: TermId) -> &TermDecl {
    &self.terms[t.0 as usize]
  }
  pub fn thm(&self, t: ThmId) -> &ThmDecl {
    &self.thms[t.0 as usize]
  }

  pub fn add_sort(&mut self, name: &str, mods: Modifiers) -> Result<SortId, KernelError> {
    if self.sorts.len() >= MAX_SORTS {
      return Err(KernelError::TooManySorts);
    }
    if self.sort_names.contains_key(name) {
      return Err(KernelError::DuplicateName(name.into()));
    }
    let id = SortId(self.sorts.len() as u8);
    self.sorts.push(SortDecl { name: name.into(), mods });
    self.sort_names.insert(name.into(), id);
    Ok(id)
  }

  /// Checks `term f(Γ): s x̄ ok` or `def f(Γ): s x̄ = ȳ:s'. e ok` and appends it.
  pub fn add_term(&mut self, decl: TermDecl) -> Result<TermId, KernelError> {
    if self.term_names.contains_key(&decl.name) {
      return Err(KernelError::DuplicateName(decl.name));
    }
    let names = check_context(self, BinderSlice::Owned(&decl.args))?;
    let ret_sort = decl.ret.sort();
    let mods = self.sort_mods(ret_sort).ok_or(KernelError::UnknownSort(ret_sort))?;
    if mods.contains(Modifiers::PURE) {
      return Err(KernelError::TermInPureSort(ret_sort));
    }
    if decl.ret.is_name() || decl.ret.deps().bits() >> names != 0 {
      return Err(KernelError::BadReturnDeps);
    }
    let id = TermId(self.terms.len() as u32);
    if let Definiens::Some { dummies, body, .. } = &decl.def {
      let mut ctx = decl.args.clone();
      for (i, d) in dummies.iter().enumerate() {
        let mods = self.sort_mods(d.sort()).ok_or(KernelError::UnknownSort(d.sort()))?;
        if mods.contains(Modifiers::FREE) {
          return Err(KernelError::DummyInFreeSort(decl.args.len() + i));
        }
        if !d.is_name() {
          return Err(KernelError::NameExpected(decl.args.len() + i));
        }
        ctx.push(*d);
      }
      check_context(self, BinderSlice::Owned(&ctx))?;
      let sort = infer_sort(self, BinderSlice::Owned(&ctx), body)?;
      if sort != ret_sort {
        return Err(KernelError::SortMismatch { pos: 0, expected: ret_sort, found: sort });
      }
      let fv = self.body_fv(&ctx, body)?;
      if !fv.is_subset(decl.ret.deps()) {
        return Err(KernelError::DefFreeVars(fv.minus(decl.ret.deps())));
      }
    }
    self.term_names.insert(decl.name.clone(), id);
    self.terms.push(decl);
    Ok(id)
  }

  fn body_fv(&self, ctx: &[Binder], body: &Expr) -> Result<VarSet, KernelError> {
    let mut store = Store::with_interning();
    let mut vars = Vec::with_capacity(ctx.len());
    for (i, b) in ctx.iter().enumerate() {
      vars.push(store.preload_var(i as u32, b.is_name(), b.sort(), b.deps())?);
    }
    let e = substitute(&mut store, self, body, &vars)?;
    compute_vars(&mut store, self, e, VarMode::FV)
  }

  /// Checks `axiom (Γ; Δ ⊢ A) ok` (the statement part of `thm` as well) and
  /// appends the declaration.
  pub fn add_thm(&mut self, decl: ThmDecl) -> Result<ThmId, KernelError> {
    if self.thm_names.contains_key(&decl.name) {
      return Err(KernelError::DuplicateName(decl.name));
    }
    self.check_statement(&decl.args, decl.hyps.iter().chain([&decl.concl]))?;
    let id = ThmId(self.thms.len() as u32);
    self.thm_names.insert(decl.name.clone(), id);
    self.thms.push(decl);
    Ok(id)
  }

  /// Every hypothesis and the conclusion must have a provable sort and
  /// mention only the statement's binders.
  pub fn check_statement<'a>(
    &self,
    args: &[Binder],
    exprs: impl IntoIterator<Item = &'a Expr>,
  ) -> Result<(), KernelError> {
    check_context(self, BinderSlice::Owned(args))?;
    for e in exprs {
      let s = infer_sort(self, BinderSlice::Owned(args), e).map_err(|err| match err {
        KernelError::UnknownVar(_) => KernelError::DummyInStatement,
        err => err,
      })?;
      if !self.sort_mods(s).is_some_and(|m| m.contains(Modifiers::PROVABLE)) {
        return Err(KernelError::NotProvable(s));
      }
    }
    Ok(())
  }
}
