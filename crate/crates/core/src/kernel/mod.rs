//! The logical core: contexts, sort inference, variable sets, substitution and
//! the disjointness side condition of theorem application.
//!
//! Everything here is a pure function of its inputs. Term signatures are
//! looked up through [`Signatures`], which is implemented both by the
//! in-memory [`Environment`] and by the verifier's view of a proof file.

mod check;
mod env;
mod store;
mod types;

#[cfg(test)]
mod tests;

use thiserror::Error;

pub use check::{
  check_args, check_context, check_disjoint, compute_vars, expr_vars, infer_sort, mk_app,
  substitute, ArgView, VarMode,
};
pub use env::{Definiens, Environment, SortDecl, TermDecl, ThmDecl};
pub use store::{ExprId, Head, Node, Store, MAX_STORE_NODES};
pub use types::{
  Binder, BinderSlice, Modifiers, SortId, TermId, ThmId, VarSet, MAX_BOUND_VARS, MAX_SORTS,
};

/// An expression tree over a context: `Var(i)` is the `i`-th binder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
  Var(u32),
  App(TermId, Vec<Expr>),
}

impl Expr {
  /// Number of nodes in the tree.
  pub fn size(&self) -> usize {
    match self {
      Expr::Var(_) => 1,
      Expr::App(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
    }
  }
}

/// Type information for a term constructor or definition.
#[derive(Clone, Copy, Debug)]
pub struct TermSig<'a> {
  pub args: BinderSlice<'a>,
  pub ret: Binder,
}

/// Read access to the declared sorts and term signatures.
pub trait Signatures {
  fn sort_mods(&self, s: SortId) -> Option<Modifiers>;
  fn term_sig(&self, t: TermId) -> Option<TermSig<'_>>;
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KernelError {
  #[error("unknown sort {0}")]
  UnknownSort(SortId),
  #[error("unknown term {0}")]
  UnknownTerm(TermId),
  #[error("variable {0} is not in the context")]
  UnknownVar(u32),
  #[error("{term}: expected {expected} arguments, found {found}")]
  ArityMismatch { term: TermId, expected: usize, found: usize },
  #[error("argument {pos}: expected sort {expected}, found {found}")]
  SortMismatch { pos: usize, expected: SortId, found: SortId },
  #[error("argument {0}: expected a bound variable")]
  NameExpected(usize),
  #[error("disjoint variable violation between binders {0} and {1}")]
  DisjointViolation(usize, usize),
  #[error("binder {0}: dependencies must refer to earlier bound variables")]
  BadDeps(usize),
  #[error("binder {0}: bound variable in a strict sort")]
  NameInStrictSort(usize),
  #[error("binder {0}: metavariable in a pure sort")]
  MetavarInPureSort(usize),
  #[error("binder {0}: dummy variable in a free sort")]
  DummyInFreeSort(usize),
  #[error("too many bound variables (max {MAX_BOUND_VARS})")]
  TooManyNames,
  #[error("too many sorts (max {MAX_SORTS})")]
  TooManySorts,
  #[error("term declared in pure sort {0}")]
  TermInPureSort(SortId),
  #[error("return type depends on something other than a bound argument")]
  BadReturnDeps,
  #[error("sort {0} is not provable")]
  NotProvable(SortId),
  #[error("definiens has free variables {0:?} not declared in the return type")]
  DefFreeVars(VarSet),
  #[error("expression mentions a variable outside the statement")]
  DummyInStatement,
  #[error("expression store is full")]
  StoreFull,
  #[error("duplicate name {0}")]
  DuplicateName(String),
}
