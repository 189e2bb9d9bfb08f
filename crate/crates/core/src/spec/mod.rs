//! `.mm0` specification files: lexing, static parsing, notations and the
//! precedence parser for math strings, and elaboration into a checked
//! [`Environment`] with the statements in source order.

mod lexer;
mod notation;
mod parser;

use std::collections::HashMap;

use thiserror::Error;

use crate::kernel::{
  Binder, Definiens, Environment, Expr, KernelError, SortId, TermDecl, TermId, ThmDecl, ThmId,
  VarSet,
};

pub use lexer::{lex, math_tokens, Tok, Token};
pub use notation::{
  parse_math, print_math, CoercionError, CoercionGraph, Expected, GeneralNotation, MathCtx,
  MathError, NotationLit, Notations,
};
pub use parser::{parse_static, Arrow, BinderKind, Literal, MathSpan, Stmt, StmtKind, Type};

/// The `max` precedence level.
pub const PREC_MAX: u32 = u32::MAX;
/// Level of prefix application `f a b`; arguments are parsed at `max`.
pub const APP_PREC: u32 = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SpecErrorKind {
  #[error("unterminated math string")]
  UnterminatedMathString,
  #[error("illegal character {0:?}")]
  IllegalCharacter(char),
  #[error("syntax error: {0}")]
  Syntax(String),
  #[error("duplicate name {0}")]
  DuplicateName(String),
  #[error("unknown sort {0}")]
  UnknownSort(String),
  #[error("unknown term {0}")]
  UnknownTerm(String),
  #[error("unknown variable {0}")]
  UnknownVar(String),
  #[error("unknown constant {0:?}")]
  UnknownConstant(String),
  #[error("precedence error at {0:?}")]
  PrecedenceError(String),
  #[error("no coercion from {from} to {to}")]
  NoCoercionPath { from: String, to: String },
  #[error("ambiguous notation {0:?}")]
  AmbiguousNotation(String),
  #[error("coercion creates a cycle")]
  CoercionCycle,
  #[error("coercion creates a second path between two sorts")]
  DiamondPath,
  #[error("bad notation: {0}")]
  BadNotation(String),
  #[error("type error: {0}")]
  Type(String),
  #[error(transparent)]
  Kernel(KernelError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct SpecError {
  pub kind: SpecErrorKind,
  pub line: usize,
  pub col: usize,
  pub offset: usize,
}

impl SpecError {
  pub fn at(src: &str, offset: usize, kind: SpecErrorKind) -> SpecError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    SpecError { kind, line, col, offset }
  }
}

/// One public statement, in source order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecStmt {
  Sort(SortId),
  /// A term constructor or definition.
  Term(TermId),
  /// An axiom or theorem.
  Thm(ThmId),
}

/// An elaborated specification.
#[derive(Clone, Debug, Default)]
pub struct Spec {
  pub env: Environment,
  pub stmts: Vec<SpecStmt>,
  pub notations: Notations,
}

struct Ctx {
  args: Vec<Binder>,
  names: Vec<String>,
  dummies: Vec<Binder>,
  dummy_names: Vec<String>,
  hyps: Vec<(Option<String>, usize, String)>,
}

struct Elab<'a> {
  src: &'a str,
  spec: Spec,
}

impl<'a> Elab<'a> {
  fn err(&self, pos: usize, kind: SpecErrorKind) -> SpecError {
    SpecError::at(self.src, pos, kind)
  }

  fn sort(&self, name: &str, pos: usize) -> Result<SortId, SpecError> {
    self
      .spec
      .env
      .sort_id(name)
      .ok_or_else(|| self.err(pos, SpecErrorKind::UnknownSort(name.into())))
  }

  fn term(&self, name: &str, pos: usize) -> Result<TermId, SpecError> {
    self
      .spec
      .env
      .term_id(name)
      .ok_or_else(|| self.err(pos, SpecErrorKind::UnknownTerm(name.into())))
  }

  fn deps(&self, ty: &Type<'_>, names: &HashMap<&str, usize>) -> Result<VarSet, SpecError> {
    let mut deps = VarSet::EMPTY;
    for d in &ty.deps {
      let k =
        names.get(d).ok_or_else(|| self.err(ty.pos, SpecErrorKind::UnknownVar((*d).into())))?;
      deps = deps.union(VarSet::single(*k));
    }
    Ok(deps)
  }

  /// Splits binders and the leading unnamed arrow types into a context.
  /// Returns the context and the trailing arrow (the result type or the
  /// conclusion).
  fn context<'s>(
    &self,
    binders: &[parser::Binder<'s>],
    arrows: &'s [Arrow<'s>],
  ) -> Result<(Ctx, &'s Arrow<'s>), SpecError> {
    let mut ctx =
      Ctx { args: vec![], names: vec![], dummies: vec![], dummy_names: vec![], hyps: vec![] };
    let mut ordinals: HashMap<&str, usize> = HashMap::new();
    let mut seen: Vec<&str> = vec![];
    let mut num_names = 0;
    let mut dummies = vec![];
    for b in binders {
      if let Some(n) = b.name {
        if seen.contains(&n) {
          return Err(self.err(b.pos, SpecErrorKind::DuplicateName(n.into())));
        }
        if self.spec.notations.is_constant(n) {
          return Err(self.err(b.pos, SpecErrorKind::AmbiguousNotation(n.into())));
        }
        seen.push(n);
      }
      let name =
        b.name.map_or_else(|| format!("_{}", ctx.args.len() + ctx.hyps.len()), String::from);
      match &b.kind {
        BinderKind::Hyp(m) => ctx.hyps.push((b.name.map(String::from), m.pos, m.text.into())),
        BinderKind::Dummy => dummies.push((b, name)),
        BinderKind::Name => {
          let ty = b.ty.as_ref().expect("names have types");
          let s = self.sort(ty.sort, ty.pos)?;
          if !ty.deps.is_empty() {
            return Err(
              self
                .err(ty.pos, SpecErrorKind::Syntax("bound variables have no dependencies".into())),
            );
          }
          if num_names >= crate::kernel::MAX_BOUND_VARS {
            return Err(self.err(b.pos, SpecErrorKind::Kernel(KernelError::TooManyNames)));
          }
          if let Some(n) = b.name {
            ordinals.insert(n, num_names);
          }
          ctx.args.push(Binder::name(s, num_names));
          ctx.names.push(name);
          num_names += 1;
        }
        BinderKind::Metavar => {
          let ty = b.ty.as_ref().expect("metavariables have types");
          let s = self.sort(ty.sort, ty.pos)?;
          ctx.args.push(Binder::metavar(s, self.deps(ty, &ordinals)?));
          ctx.names.push(name);
        }
      }
    }
    let (last, init) = arrows.split_last().expect("at least one arrow");
    for a in init {
      match a {
        Arrow::Type(ty) => {
          let s = self.sort(ty.sort, ty.pos)?;
          ctx.args.push(Binder::metavar(s, self.deps(ty, &ordinals)?));
          ctx.names.push(format!("_{}", ctx.args.len() + ctx.hyps.len()));
        }
        Arrow::Formula(m) => ctx.hyps.push((None, m.pos, m.text.into())),
      }
    }
    for (b, name) in dummies {
      let ty = b.ty.as_ref().expect("dummies have types");
      let s = self.sort(ty.sort, ty.pos)?;
      if num_names >= crate::kernel::MAX_BOUND_VARS {
        return Err(self.err(b.pos, SpecErrorKind::Kernel(KernelError::TooManyNames)));
      }
      ctx.dummies.push(Binder::name(s, num_names));
      ctx.dummy_names.push(name);
      num_names += 1;
    }
    Ok((ctx, last))
  }

  fn math(
    &self,
    ctx_names: &[String],
    binders: &[Binder],
    text: &str,
    pos: usize,
    expected: Expected,
  ) -> Result<Expr, SpecError> {
    let mctx = MathCtx { names: ctx_names, binders };
    parse_math(text, pos, &self.spec.notations, &self.spec.env, &mctx, expected)
      .map_err(|(k, p)| self.err(p, k))
  }

  fn kernel<T>(&self, pos: usize, r: Result<T, KernelError>) -> Result<T, SpecError> {
    r.map_err(|e| self.err(pos, SpecErrorKind::Kernel(e)))
  }

  fn stmt(&mut self, s: &Stmt<'_>) -> Result<(), SpecError> {
    match &s.kind {
      StmtKind::Sort { mods } => {
        let r = self.spec.env.add_sort(s.name, *mods);
        let id = self.kernel(s.pos, r)?;
        self.spec.stmts.push(SpecStmt::Sort(id));
      }
      StmtKind::Term { binders, ty } | StmtKind::Def { binders, ty, .. } => {
        let is_def = matches!(s.kind, StmtKind::Def { .. });
        let (ctx, last) = self.context(binders, ty)?;
        if let Some((_, pos, _)) = ctx.hyps.first() {
          return Err(
            self.err(*pos, SpecErrorKind::Syntax("hypotheses are not allowed here".into())),
          );
        }
        if !is_def && !ctx.dummies.is_empty() {
          return Err(self.err(
            s.pos,
            SpecErrorKind::Syntax("dummy variables are only allowed in definitions".into()),
          ));
        }
        let Arrow::Type(ret_ty) = last else {
          return Err(self.err(s.pos, SpecErrorKind::Syntax("expected a result type".into())));
        };
        let names: HashMap<&str, usize> = ctx
          .args
          .iter()
          .zip(&ctx.names)
          .filter(|(b, _)| b.is_name())
          .map(|(b, n)| (n.as_str(), b.deps().iter().next().unwrap()))
          .collect();
        let ret_sort = self.sort(ret_ty.sort, ret_ty.pos)?;
        let ret = Binder::metavar(ret_sort, self.deps(ret_ty, &names)?);
        let def = match &s.kind {
          StmtKind::Def { body: Some(body), .. } => {
            let mut all = ctx.args.clone();
            all.extend(&ctx.dummies);
            let mut all_names = ctx.names.clone();
            all_names.extend(ctx.dummy_names.iter().cloned());
            let e = self.math(&all_names, &all, body.text, body.pos, Expected::Sort(ret_sort))?;
            Definiens::Some { dummies: ctx.dummies, dummy_names: ctx.dummy_names, body: e }
          }
          StmtKind::Def { body: None, .. } => {
            if !ctx.dummies.is_empty() {
              return Err(
                self
                  .err(s.pos, SpecErrorKind::Syntax("abstract definitions have no dummies".into())),
              );
            }
            Definiens::Abstract
          }
          _ => Definiens::None,
        };
        let decl = TermDecl { name: s.name.into(), args: ctx.args, var_names: ctx.names, ret, def };
        let r = self.spec.env.add_term(decl);
        let id = self.kernel(s.pos, r)?;
        self.spec.stmts.push(SpecStmt::Term(id));
      }
      StmtKind::Axiom { binders, ty } | StmtKind::Theorem { binders, ty } => {
        let (ctx, last) = self.context(binders, ty)?;
        if !ctx.dummies.is_empty() {
          return Err(self.err(
            s.pos,
            SpecErrorKind::Syntax("dummy variables are only allowed in definitions".into()),
          ));
        }
        let Arrow::Formula(concl) = last else {
          return Err(
            self.err(s.pos, SpecErrorKind::Syntax("expected a conclusion formula".into())),
          );
        };
        let mut hyps = vec![];
        let mut hyp_names = vec![];
        for (i, (name, pos, text)) in ctx.hyps.iter().enumerate() {
          hyps.push(self.math(&ctx.names, &ctx.args, text, *pos, Expected::Provable)?);
          hyp_names.push(name.clone().unwrap_or_else(|| format!("h{}", i + 1)));
        }
        let concl = self.math(&ctx.names, &ctx.args, concl.text, concl.pos, Expected::Provable)?;
        let decl = ThmDecl {
          name: s.name.into(),
          args: ctx.args,
          var_names: ctx.names,
          hyps,
          hyp_names,
          concl,
          axiom: matches!(s.kind, StmtKind::Axiom { .. }),
        };
        let r = self.spec.env.add_thm(decl);
        let id = self.kernel(s.pos, r)?;
        self.spec.stmts.push(SpecStmt::Thm(id));
      }
      StmtKind::Infix { constant, prec, right } => {
        let t = self.term(s.name, s.pos)?;
        let nots = &mut self.spec.notations;
        let r = nots
          .constant_token(constant.text)
          .map(String::from)
          .and_then(|tok| nots.add_infix(&self.spec.env, t, &tok, *prec, *right));
        r.map_err(|k| SpecError::at(self.src, constant.pos, k))?;
      }
      StmtKind::Prefix { constant, prec } => {
        let t = self.term(s.name, s.pos)?;
        if self.spec.env.term(t).args.len() != 1 {
          return Err(
            self
              .err(s.pos, SpecErrorKind::BadNotation("prefix notation needs a unary term".into())),
          );
        }
        let nots = &mut self.spec.notations;
        let r = nots.constant_token(constant.text).map(String::from).and_then(|tok| {
          let n = GeneralNotation {
            term: t,
            prec: *prec,
            lits: vec![NotationLit::Const(tok), NotationLit::Var(0, *prec)],
          };
          nots.add_general(&self.spec.env, n)
        });
        r.map_err(|k| SpecError::at(self.src, constant.pos, k))?;
      }
      StmtKind::Notation { binders, ty, lits } => {
        let t = self.term(s.name, s.pos)?;
        let decl = self.spec.env.term(t);
        let (ctx, last) = self.context(binders, ty)?;
        let ret_ok =
          matches!(last, Arrow::Type(r) if self.spec.env.sort_id(r.sort) == Some(decl.ret.sort()));
        let sorts_ok = ctx.args.len() == decl.args.len()
          && ctx.hyps.is_empty()
          && ctx
            .args
            .iter()
            .zip(&decl.args)
            .all(|(a, b)| a.sort() == b.sort() && a.is_name() == b.is_name());
        if !ret_ok || !sorts_ok {
          return Err(self.err(
            s.pos,
            SpecErrorKind::BadNotation("binders do not match the term's type".into()),
          ));
        }
        let mut out = vec![];
        let mut prec = None;
        for l in lits {
          out.push(match l {
            Literal::Const(m, p) => {
              let tok =
                self.spec.notations.constant_token(m.text).map_err(|k| self.err(m.pos, k))?;
              prec.get_or_insert(*p);
              NotationLit::Const(tok.into())
            }
            Literal::Var(v, p) => {
              let i = ctx
                .names
                .iter()
                .position(|n| n == v)
                .ok_or_else(|| self.err(s.pos, SpecErrorKind::UnknownVar((*v).into())))?;
              NotationLit::Var(i, *p)
            }
          });
        }
        let n = GeneralNotation { term: t, prec: prec.unwrap_or(PREC_MAX), lits: out };
        let r = self.spec.notations.add_general(&self.spec.env, n);
        r.map_err(|k| self.err(s.pos, k))?;
      }
      StmtKind::Coercion { from, to } => {
        let t = self.term(s.name, s.pos)?;
        let (from, to) = (self.sort(from, s.pos)?, self.sort(to, s.pos)?);
        let r = self.spec.notations.add_coercion(&self.spec.env, t, from, to);
        r.map_err(|k| self.err(s.pos, k))?;
      }
      StmtKind::Delimiter { chars } => {
        let mut cs = vec![];
        for tok in chars.text.split_whitespace() {
          let mut it = tok.chars();
          match (it.next(), it.next()) {
            (Some(c), None) => cs.push(c),
            _ => {
              return Err(self.err(
                chars.pos,
                SpecErrorKind::BadNotation(format!("delimiter {tok:?} is not one character")),
              ))
            }
          }
        }
        let r = self.spec.notations.add_delimiters(cs);
        r.map_err(|k| self.err(chars.pos, k))?;
      }
    }
    Ok(())
  }
}

/// Parses and elaborates a whole `.mm0` file.
pub fn parse_mm0(src: &str) -> Result<Spec, SpecError> {
  let stmts = parse_static(src)?;
  let mut e = Elab { src, spec: Spec::default() };
  for s in &stmts {
    e.stmt(s)?;
  }
  Ok(e.spec)
}

impl Spec {
  /// Prints an expression of the given statement context in `.mm0` syntax.
  pub fn print(&self, names: &[String], e: &Expr) -> String {
    print_math(&self.notations, &self.env, names, e)
  }
}
