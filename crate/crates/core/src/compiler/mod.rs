//! Compiles `.mmt` proof sources into proof files, and prints the public
//! statements as a specification.

mod dag;
mod mmt;
mod sexpr;


use std::fmt::Write;

use thiserror::Error;

use crate::kernel::{Binder, Definiens, Environment, Expr, KernelError, SortId};
use crate::mmb::{
  encode_proof_stream, encode_unify_stream, write_file, DeclKind, DeclPayload, MmbError, NameKind,
  Payload, ProofOp, TermPayload, ThmPayload,
};
use crate::spec::{print_math, Notations};

pub use dag::{emit_unify, Dag, DagConv, DagNode, ProofEmitter};
pub use mmt::{parse_mmt, ConvTree, Item, ProofTree, Source};
pub use sexpr::{read_all, Sexp};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompileErrorKind {
  #[error("syntax error: {0}")]
  Syntax(String),
  #[error("unknown sort {0}")]
  UnknownSort(String),
  #[error("unknown term {0}")]
  UnknownTerm(String),
  #[error("unknown theorem {0}")]
  UnknownTheorem(String),
  #[error("unknown variable {0}")]
  UnknownVar(String),
  #[error("duplicate name {0}")]
  DuplicateName(String),
  #[error("{name} expects {expected} items, found {found}")]
  Arity { name: String, expected: usize, found: usize },
  #[error("only definitions and theorems can be local")]
  BadLocal,
  #[error("a public statement mentions a local definition")]
  LocalInStatement,
  #[error(transparent)]
  Kernel(KernelError),
  #[error(transparent)]
  Codec(MmbError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct CompileError {
  pub kind: CompileErrorKind,
  pub line: usize,
  pub col: usize,
  pub offset: usize,
}

impl CompileError {
  pub fn at(src: &str, offset: usize, kind: CompileErrorKind) -> CompileError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    CompileError { kind, line, col, offset }
  }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CompileOptions {
  /// Emit `TermSave`/`UTermSave` instead of `Term, Save`/`USave, UTerm`.
  pub fuse_saves: bool,
  /// Leave out the name index.
  pub strip: bool,
}

/// Proof stream for a declaration, without the terminating `End`.
pub fn proof_ops(src: &Source, item: &Item, opts: CompileOptions) -> Option<Vec<ProofOp>> {
  let env = &src.env;
  match item {
    Item::Sort(_) | Item::Term(_) => None,
    Item::Def { id, .. } => {
      let t = env.term(*id);
      let Definiens::Some { dummies, body, .. } = &t.def else {
        unreachable!("compiled definitions have bodies")
      };
      let ctx: Vec<Binder> = t.args.iter().chain(dummies).copied().collect();
      let mut dag = Dag::new(t.args.len() as u32, 0);
      let root = dag.add_root(&ProofTree::from(body));
      let mut em = ProofEmitter::new(&dag, &ctx, t.args.len(), opts.fuse_saves);
      em.emit(root);
      Some(em.finish())
    }
    Item::Axiom(id) | Item::Thm { id, .. } => {
      let t = env.thm(*id);
      let n = t.args.len();
      let mut dag = Dag::new(n as u32, t.hyps.len() as u32);
      let hyps: Vec<u32> = t.hyps.iter().map(|h| dag.add_root(&ProofTree::from(h))).collect();
      let (root, ctx) = match item {
        Item::Thm { proof, dummies, .. } => {
          (dag.add_root(proof), t.args.iter().chain(dummies).copied().collect())
        }
        _ => (dag.add_root(&ProofTree::from(&t.concl)), t.args.clone()),
      };
      let mut em = ProofEmitter::new(&dag, &ctx, n, opts.fuse_saves);
      em.hyps(&hyps);
      em.emit(root);
      Some(em.finish())
    }
  }
}

/// Builds the logical content of the proof file.
pub fn build_payload(src: &Source, opts: CompileOptions) -> Payload {
  let env = &src.env;
  let mut p = Payload { sorts: env.sorts.iter().map(|s| s.mods).collect(), ..Payload::default() };
  for t in &env.terms {
    let unify = match &t.def {
      Definiens::Some { dummies, body, .. } => {
        let ctx: Vec<Binder> = t.args.iter().chain(dummies).copied().collect();
        Some(encode_unify_stream(&emit_unify(
          &ctx,
          t.args.len(),
          &body.into(),
          &[],
          opts.fuse_saves,
        )))
      }
      _ => None,
    };
    p.terms.push(TermPayload { args: t.args.clone(), ret: t.ret, unify });
  }
  for t in &env.thms {
    let hyps: Vec<ProofTree> = t.hyps.iter().map(ProofTree::from).collect();
    let unify = encode_unify_stream(&emit_unify(
      &t.args,
      t.args.len(),
      &(&t.concl).into(),
      &hyps,
      opts.fuse_saves,
    ));
    p.thms.push(ThmPayload { args: t.args.clone(), num_hyps: t.hyps.len() as u16, unify });
  }
  for item in &src.items {
    let (kind, local) = match item {
      Item::Sort(_) => (DeclKind::Sort, false),
      Item::Term(_) => (DeclKind::Term, false),
      Item::Def { local, .. } => (DeclKind::Def, *local),
      Item::Axiom(_) => (DeclKind::Axiom, false),
      Item::Thm { local, .. } => (DeclKind::Thm, *local),
    };
    let proof = proof_ops(src, item, opts).map_or_else(Vec::new, |ops| encode_proof_stream(&ops));
    p.decls.push(DeclPayload { kind, local, proof });
  }
  if !opts.strip && !p.decls.is_empty() {
    let mut names = vec![];
    names.extend(
      env.sorts.iter().enumerate().map(|(i, s)| (NameKind::Sort, i as u32, s.name.clone())),
    );
    names.extend(
      env.terms.iter().enumerate().map(|(i, t)| (NameKind::Term, i as u32, t.name.clone())),
    );
    names
      .extend(env.thms.iter().enumerate().map(|(i, t)| (NameKind::Thm, i as u32, t.name.clone())));
    p.names = Some(names);
  }
  p
}

/// The result of compiling a source.
#[derive(Clone, Debug)]
pub struct Compiled {
  pub source: Source,
  pub payload: Payload,
  pub bytes: Vec<u8>,
}

pub fn compile(text: &str, opts: CompileOptions) -> Result<Compiled, CompileError> {
  let source = parse_mmt(text)?;
  let payload = build_payload(&source, opts);
  let bytes = write_file(&payload)
    .map_err(|e| CompileError::at(text, text.len(), CompileErrorKind::Codec(e)))?;
  Ok(Compiled { source, payload, bytes })
}

fn binders_mm0(env: &Environment, out: &mut String, args: &[Binder], names: &[String]) {
  let mut bound = vec![];
  for (b, n) in args.iter().zip(names) {
    let sort = &env.sorts[b.sort().0 as usize].name;
    if b.is_name() {
      write!(out, " {{{n}: {sort}}}").unwrap();
      bound.push(n.as_str());
    } else {
      write!(out, " ({n}: {sort}").unwrap();
      b.deps().iter().for_each(|k| write!(out, " {}", bound[k]).unwrap());
      out.push(')');
    }
  }
}

fn ret_mm0(env: &Environment, out: &mut String, ret: Binder, args: &[Binder], names: &[String]) {
  write!(out, ": {}", env.sorts[ret.sort().0 as usize].name).unwrap();
  let bound: Vec<&str> =
    args.iter().zip(names).filter(|(b, _)| b.is_name()).map(|(_, n)| n.as_str()).collect();
  ret.deps().iter().for_each(|k| write!(out, " {}", bound[k]).unwrap());
}

/// Prints the public statements as a specification, in prefix notation.
pub fn emit_mm0(src: &Source) -> String {
  let env = &src.env;
  let nots = Notations::new();
  let math = |names: &[String], e: &Expr| print_math(&nots, env, names, e);
  let mut out = String::new();
  for item in &src.items {
    match item {
      Item::Sort(SortId(s)) => {
        let s = &env.sorts[*s as usize];
        s.mods.keywords().for_each(|k| write!(out, "{k} ").unwrap());
        writeln!(out, "sort {};", s.name).unwrap();
      }
      Item::Term(id) | Item::Def { id, local: false } => {
        let t = env.term(*id);
        let kw = if t.is_def() { "def" } else { "term" };
        write!(out, "{kw} {}", t.name).unwrap();
        binders_mm0(env, &mut out, &t.args, &t.var_names);
        if let Definiens::Some { dummies, dummy_names, body } = &t.def {
          for (d, n) in dummies.iter().zip(dummy_names) {
            write!(out, " {{.{n}: {}}}", env.sorts[d.sort().0 as usize].name).unwrap();
          }
          ret_mm0(env, &mut out, t.ret, &t.args, &t.var_names);
          let names: Vec<String> = t.var_names.iter().chain(dummy_names).cloned().collect();
          writeln!(out, " = $ {} $;", math(&names, body)).unwrap();
        } else {
          ret_mm0(env, &mut out, t.ret, &t.args, &t.var_names);
          out.push_str(";\n");
        }
      }
      Item::Axiom(id) | Item::Thm { id, local: false, .. } => {
        let t = env.thm(*id);
        write!(out, "{} {}", if t.axiom { "axiom" } else { "theorem" }, t.name).unwrap();
        binders_mm0(env, &mut out, &t.args, &t.var_names);
        for (h, n) in t.hyps.iter().zip(&t.hyp_names) {
          write!(out, " ({n}: $ {} $)", math(&t.var_names, h)).unwrap();
        }
        writeln!(out, ": $ {} $;", math(&t.var_names, &t.concl)).unwrap();
      }
      Item::Def { .. } | Item::Thm { .. } => {}
    }
  }
  out
}
