//! Write-once expression store.
//!
//! Nodes are appended and never mutated (apart from the memoized free-variable
//! set). The store is cleared between declarations; indices from an earlier
//! declaration must not be used afterwards.

use std::collections::HashMap;

use super::types::{SortId, TermId, VarSet};
use super::KernelError;

/// Index of a node in a [`Store`]. Equality of expressions is equality of ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprId(pub u32);

/// Maximum nodes per declaration.
pub const MAX_STORE_NODES: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Head {
  /// A context variable or dummy; `index` is its position in the context.
  Var {
    index: u32,
    name: bool,
  },
  App(TermId),
}

#[derive(Clone, Debug)]
pub struct Node {
  pub head: Head,
  pub sort: SortId,
  /// V(e): every name occurring in the expression.
  pub vars: VarSet,
  pub(crate) fv: Option<VarSet>,
  args_start: u32,
  args_len: u32,
}

impl Node {
  pub fn is_name(&self) -> bool {
    matches!(self.head, Head::Var { name: true, .. })
  }
  pub fn free_vars(&self) -> Option<VarSet> {
    self.fv
  }
}

type Interner = HashMap<(TermId, Box<[ExprId]>), ExprId>;

#[derive(Debug, Default)]
pub struct Store {
  nodes: Vec<Node>,
  args: Vec<ExprId>,
  interner: Option<Interner>,
  allocs: u64,
  high_water: usize,
}

impl Store {
  pub fn new() -> Store {
    Store::default()
  }

  /// A store that hash-conses applications built with [`Store::intern_app`].
  pub fn with_interning() -> Store {
    Store { interner: Some(HashMap::new()), ..Store::default() }
  }

  /// Resets the region. The high-water mark survives.
  pub fn clear(&mut self) {
    self.nodes.clear();
    self.args.clear();
    if let Some(m) = &mut self.interner {
      m.clear();
    }
  }

  pub fn len(&self) -> usize {
    self.nodes.len()
  }
  pub fn is_empty(&self) -> bool {
    self.nodes.is_empty()
  }

  /// Number of nodes allocated through [`Store::alloc_var`] and [`Store::alloc_app`]
  /// since the store was created. Context preloads are not counted.
  pub fn alloc_count(&self) -> u64 {
    self.allocs
  }

  /// Largest node count ever held at once.
  pub fn high_water(&self) -> usize {
    self.high_water
  }

  pub fn node(&self, e: ExprId) -> &Node {
    &self.nodes[e.0 as usize]
  }

  pub fn get(&self, e: ExprId) -> Option<&Node> {
    self.nodes.get(e.0 as usize)
  }

  pub fn args(&self, e: ExprId) -> &[ExprId] {
    let n = self.node(e);
    &self.args[n.args_start as usize..(n.args_start + n.args_len) as usize]
  }

  pub fn sort(&self, e: ExprId) -> SortId {
    self.node(e).sort
  }
  pub fn vars(&self, e: ExprId) -> VarSet {
    self.node(e).vars
  }

  pub(crate) fn set_fv(&mut self, e: ExprId, fv: VarSet) {
    self.nodes[e.0 as usize].fv = Some(fv)
  }

  fn push(&mut self, node: Node) -> Result<ExprId, KernelError> {
    if self.nodes.len() >= MAX_STORE_NODES {
      return Err(KernelError::StoreFull);
    }
    let id = ExprId(self.nodes.len() as u32);
    self.nodes.push(node);
    self.high_water = self.high_water.max(self.nodes.len());
    Ok(id)
  }

  fn var_node(index: u32, name: bool, sort: SortId, vars: VarSet) -> Node {
    // a variable's free variables are its V-set (FV(x) = {x}, FV(φ) = deps)
    Node { head: Head::Var { index, name }, sort, vars, fv: Some(vars), args_start: 0, args_len: 0 }
  }

  /// Places a context variable at the start of a declaration (not an allocation).
  pub fn preload_var(
    &mut self,
    index: u32,
    name: bool,
    sort: SortId,
    vars: VarSet,
  ) -> Result<ExprId, KernelError> {
    self.push(Self::var_node(index, name, sort, vars))
  }

  /// Allocates a fresh variable node (dummy).
  pub fn alloc_var(
    &mut self,
    index: u32,
    name: bool,
    sort: SortId,
    vars: VarSet,
  ) -> Result<ExprId, KernelError> {
    let id = self.push(Self::var_node(index, name, sort, vars))?;
    self.allocs += 1;
    Ok(id)
  }

  /// Allocates an application node. Arguments are not checked here; see
  /// [`super::mk_app`].
  pub fn alloc_app(
    &mut self,
    term: TermId,
    args: &[ExprId],
    sort: SortId,
    vars: VarSet,
    fv: Option<VarSet>,
  ) -> Result<ExprId, KernelError> {
    let args_start = self.args.len() as u32;
    self.args.extend_from_slice(args);
    let node =
      Node { head: Head::App(term), sort, vars, fv, args_start, args_len: args.len() as u32 };
    match self.push(node) {
      Ok(id) => {
        self.allocs += 1;
        Ok(id)
      }
      Err(e) => {
        self.args.truncate(args_start as usize);
        Err(e)
      }
    }
  }

  /// Looks up an existing application with exactly these arguments.
  pub fn lookup_app(&self, term: TermId, args: &[ExprId]) -> Option<ExprId> {
    self.interner.as_ref()?.get(&(term, args.into())).copied()
  }

  pub(crate) fn record_app(&mut self, term: TermId, args: &[ExprId], id: ExprId) {
    if let Some(m) = &mut self.interner {
      m.insert((term, args.into()), id);
    }
  }

  pub fn is_interning(&self) -> bool {
    self.interner.is_some()
  }
}
