//! Hash-consing of proof trees and emission of proof and unify streams.
//!
//! Every structurally distinct subtree becomes one node. Nodes referenced
//! more than once stay on the heap (`Save` after the first construction,
//! `Ref` afterwards); nodes referenced once are rebuilt inline.

use std::collections::HashMap;

use crate::kernel::{Binder, Environment, TermId, ThmId};
use crate::mmb::{ProofOp, UnifyOp};

use super::mmt::{ConvTree, ProofTree};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DagNode {
  Var(u32),
  Hyp(u32),
  Term(TermId, Vec<u32>),
  Thm(ThmId, Vec<u32>, Vec<u32>, u32),
  Conv(u32, DagConv, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DagConv {
  Refl,
  Symm(Box<DagConv>),
  Cong(Vec<DagConv>),
  Unfold(u32, u32, Box<DagConv>),
}

#[derive(Clone, Debug, Default)]
pub struct Dag {
  pub nodes: Vec<DagNode>,
  /// Number of references from other nodes and from the roots.
  pub uses: Vec<u32>,
  pub roots: Vec<u32>,
  index: HashMap<DagNode, u32>,
}

impl Dag {
  /// Starts a DAG whose first nodes are the `num_vars` arguments and then the
  /// `num_hyps` hypotheses.
  pub fn new(num_vars: u32, num_hyps: u32) -> Dag {
    let mut d = Dag::default();
    (0..num_vars).for_each(|i| _ = d.intern(DagNode::Var(i)));
    (0..num_hyps).for_each(|i| _ = d.intern(DagNode::Hyp(i)));
    d
  }

  fn intern(&mut self, n: DagNode) -> u32 {
    if let Some(&i) = self.index.get(&n) {
      return i;
    }
    let i = self.nodes.len() as u32;
    let mut children = vec![];
    node_children(&n, &mut children);
    for c in children {
      self.uses[c as usize] += 1;
    }
    self.index.insert(n.clone(), i);
    self.nodes.push(n);
    self.uses.push(0);
    i
  }

  /// Adds a tree, children first and left to right.
  pub fn add(&mut self, t: &ProofTree) -> u32 {
    let n = match t {
      ProofTree::Var(i) => DagNode::Var(*i),
      ProofTree::Hyp(i) => DagNode::Hyp(*i),
      ProofTree::Term(f, args) => DagNode::Term(*f, args.iter().map(|a| self.add(a)).collect()),
      ProofTree::Thm { thm, args, hyps, concl } => {
        let args = args.iter().map(|a| self.add(a)).collect();
        let hyps = hyps.iter().map(|a| self.add(a)).collect();
        DagNode::Thm(*thm, args, hyps, self.add(concl))
      }
      ProofTree::Conv { target, conv, proof } => {
        let target = self.add(target);
        let conv = self.add_conv(conv);
        DagNode::Conv(target, conv, self.add(proof))
      }
    };
    self.intern(n)
  }

  fn add_conv(&mut self, c: &ConvTree) -> DagConv {
    match c {
      ConvTree::Refl => DagConv::Refl,
      ConvTree::Symm(c) => DagConv::Symm(Box::new(self.add_conv(c))),
      ConvTree::Cong(cs) => DagConv::Cong(cs.iter().map(|c| self.add_conv(c)).collect()),
      ConvTree::Unfold { lhs, unfolded, conv } => {
        let lhs = self.add(lhs);
        let unfolded = self.add(unfolded);
        DagConv::Unfold(lhs, unfolded, Box::new(self.add_conv(conv)))
      }
    }
  }

  pub fn add_root(&mut self, t: &ProofTree) -> u32 {
    let i = self.add(t);
    self.uses[i as usize] += 1;
    self.roots.push(i);
    i
  }

  /// Which nodes live on the heap: variables, hypotheses and every node
  /// used more than once.
  pub fn retained(&self) -> Vec<bool> {
    self
      .nodes
      .iter()
      .zip(&self.uses)
      .map(|(n, &u)| matches!(n, DagNode::Var(_) | DagNode::Hyp(_)) || u > 1)
      .collect()
  }

  /// One line per node in the `let` style, e.g. `(im 1 0)`.
  pub fn describe(&self, env: &Environment, vars: &[String], hyps: &[String]) -> Vec<String> {
    let list = |v: &[u32]| v.iter().map(|i| format!(" {i}")).collect::<String>();
    self
      .nodes
      .iter()
      .map(|n| match n {
        DagNode::Var(i) => vars[*i as usize].clone(),
        DagNode::Hyp(i) => hyps[*i as usize].clone(),
        DagNode::Term(t, args) => format!("({}{})", env.term(*t).name, list(args)),
        DagNode::Thm(t, args, hs, c) => {
          format!("({}{}{} {c})", env.thm(*t).name, list(args), list(hs))
        }
        DagNode::Conv(t, _, p) => format!("(:conv {t} _ {p})"),
      })
      .collect()
  }
}

fn node_children(n: &DagNode, out: &mut Vec<u32>) {
  match n {
    DagNode::Var(_) | DagNode::Hyp(_) => {}
    DagNode::Term(_, args) => out.extend(args),
    DagNode::Thm(_, args, hyps, c) => {
      out.extend(args);
      out.extend(hyps);
      out.push(*c);
    }
    DagNode::Conv(t, c, p) => {
      out.push(*t);
      conv_children(c, out);
      out.push(*p);
    }
  }
}

fn conv_children(c: &DagConv, out: &mut Vec<u32>) {
  match c {
    DagConv::Refl => {}
    DagConv::Symm(c) => conv_children(c, out),
    DagConv::Cong(cs) => cs.iter().for_each(|c| conv_children(c, out)),
    DagConv::Unfold(l, u, c) => {
      out.extend([*l, *u]);
      conv_children(c, out);
    }
  }
}

/// Emits proof streams. Heap slots are assigned in emission order.
pub struct ProofEmitter<'a> {
  dag: &'a Dag,
  retained: Vec<bool>,
  /// Sorts of the whole context; entries past `num_args` are dummies.
  ctx: &'a [Binder],
  num_args: usize,
  slot: Vec<Option<u32>>,
  next: u32,
  fuse: bool,
  pub ops: Vec<ProofOp>,
}

impl<'a> ProofEmitter<'a> {
  pub fn new(dag: &'a Dag, ctx: &'a [Binder], num_args: usize, fuse: bool) -> ProofEmitter<'a> {
    let mut slot = vec![None; dag.nodes.len()];
    for (i, n) in dag.nodes.iter().enumerate() {
      if let DagNode::Var(v) = n {
        if (*v as usize) < num_args {
          slot[i] = Some(*v);
        }
      }
    }
    ProofEmitter {
      dag,
      retained: dag.retained(),
      ctx,
      num_args,
      slot,
      next: num_args as u32,
      fuse,
      ops: vec![],
    }
  }

  fn assign(&mut self, i: u32) {
    self.slot[i as usize] = Some(self.next);
    self.next += 1;
  }

  /// `build e₁, Hyp, …, build eₖ, Hyp` for the statement's hypotheses.
  pub fn hyps(&mut self, exprs: &[u32]) {
    for (h, &e) in exprs.iter().enumerate() {
      self.emit(e);
      self.ops.push(ProofOp::Hyp);
      let node = self.dag.index[&DagNode::Hyp(h as u32)];
      self.assign(node);
    }
  }

  pub fn emit(&mut self, i: u32) {
    if let Some(s) = self.slot[i as usize] {
      self.ops.push(ProofOp::Ref(s));
      return;
    }
    let dag = self.dag;
    let save = match &dag.nodes[i as usize] {
      DagNode::Var(v) => {
        debug_assert!(*v as usize >= self.num_args);
        self.ops.push(ProofOp::Dummy(self.ctx[*v as usize].sort().0 as u32));
        self.assign(i);
        return;
      }
      DagNode::Hyp(_) => unreachable!("hypotheses are emitted first"),
      DagNode::Term(t, args) => {
        args.iter().for_each(|&a| self.emit(a));
        if self.fuse && self.retained[i as usize] {
          self.ops.push(ProofOp::TermSave(t.0));
          self.assign(i);
          return;
        }
        self.ops.push(ProofOp::Term(t.0));
        true
      }
      DagNode::Thm(t, args, hyps, c) => {
        args.iter().chain(hyps).for_each(|&a| self.emit(a));
        self.emit(*c);
        self.ops.push(ProofOp::Thm(t.0));
        true
      }
      DagNode::Conv(t, c, p) => {
        self.emit(*t);
        self.emit(*p);
        self.ops.push(ProofOp::Conv);
        self.conv(c);
        true
      }
    };
    if save && self.retained[i as usize] {
      self.ops.push(ProofOp::Save);
      self.assign(i);
    }
  }

  fn conv(&mut self, c: &DagConv) {
    match c {
      DagConv::Refl => self.ops.push(ProofOp::Refl),
      DagConv::Symm(c) => {
        self.ops.push(ProofOp::Symm);
        self.conv(c);
      }
      DagConv::Cong(cs) => {
        self.ops.push(ProofOp::Cong);
        cs.iter().for_each(|c| self.conv(c));
      }
      DagConv::Unfold(l, u, c) => {
        self.emit(*l);
        self.emit(*u);
        self.ops.push(ProofOp::Unfold);
        self.conv(c);
      }
    }
  }

  pub fn finish(self) -> Vec<ProofOp> {
    self.ops
  }
}

/// Emits a unify stream for a statement: the conclusion (or definition body)
/// in prefix order, then each hypothesis from last to first after `UHyp`.
pub fn emit_unify(
  ctx: &[Binder],
  num_args: usize,
  target: &ProofTree,
  hyps: &[ProofTree],
  fuse: bool,
) -> Vec<UnifyOp> {
  let mut dag = Dag::new(0, 0);
  dag.add_root(target);
  for h in hyps.iter().rev() {
    dag.add_root(h);
  }
  let mut u = UnifyEmitter {
    dag: &dag,
    slot: vec![None; dag.nodes.len()],
    next: num_args as u32,
    ctx,
    num_args,
    fuse,
    ops: vec![],
  };
  for (i, n) in dag.nodes.iter().enumerate() {
    if let DagNode::Var(v) = n {
      if (*v as usize) < num_args {
        u.slot[i] = Some(*v);
      }
    }
  }
  u.emit(dag.roots[0]);
  for &h in &dag.roots[1..] {
    u.ops.push(UnifyOp::Hyp);
    u.emit(h);
  }
  u.ops
}

struct UnifyEmitter<'a> {
  dag: &'a Dag,
  slot: Vec<Option<u32>>,
  next: u32,
  ctx: &'a [Binder],
  num_args: usize,
  fuse: bool,
  ops: Vec<UnifyOp>,
}

impl UnifyEmitter<'_> {
  fn emit(&mut self, i: u32) {
    if let Some(s) = self.slot[i as usize] {
      self.ops.push(UnifyOp::Ref(s));
      return;
    }
    match &self.dag.nodes[i as usize] {
      DagNode::Var(v) => {
        debug_assert!(*v as usize >= self.num_args);
        self.ops.push(UnifyOp::Dummy(self.ctx[*v as usize].sort().0 as u32));
        self.slot[i as usize] = Some(self.next);
        self.next += 1;
      }
      DagNode::Term(t, args) => {
        if self.dag.uses[i as usize] > 1 {
          if self.fuse {
            self.ops.push(UnifyOp::TermSave(t.0));
          } else {
            self.ops.extend([UnifyOp::Save, UnifyOp::Term(t.0)]);
          }
          self.slot[i as usize] = Some(self.next);
          self.next += 1;
        } else {
          self.ops.push(UnifyOp::Term(t.0));
        }
        args.iter().for_each(|&a| self.emit(a));
      }
      _ => unreachable!("statements contain only expressions"),
    }
  }
}
