//! Elaboration of `.mmt` forms into an environment plus proof trees.

use crate::kernel::{
  infer_sort, Binder, BinderSlice, Definiens, Environment, Expr, KernelError, Modifiers,
  Signatures, SortId, TermDecl, TermId, ThmDecl, ThmId, VarSet,
};

use super::sexpr::{read_all, Sexp};
use super::{CompileError, CompileErrorKind};

/// A proof or expression over a context of arguments followed by dummies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProofTree {
  Var(u32),
  Hyp(u32),
  Term(TermId, Vec<ProofTree>),
  Thm {
    thm: ThmId,
    args: Vec<ProofTree>,
    hyps: Vec<ProofTree>,
    concl: Box<ProofTree>,
  },
  /// `⊢ target` from a proof of `⊢ B` and `target ≡ B`.
  Conv {
    target: Box<ProofTree>,
    conv: Box<ConvTree>,
    proof: Box<ProofTree>,
  },
}

/// A proof of `lhs ≡ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConvTree {
  Refl,
  Symm(Box<ConvTree>),
  Cong(Vec<ConvTree>),
  /// `lhs` is `f ē`, `unfolded` its definition body instance, and `conv`
  /// proves `unfolded ≡ rhs`.
  Unfold {
    lhs: Box<ProofTree>,
    unfolded: Box<ProofTree>,
    conv: Box<ConvTree>,
  },
}

impl From<&Expr> for ProofTree {
  fn from(e: &Expr) -> ProofTree {
    match e {
      Expr::Var(i) => ProofTree::Var(*i),
      Expr::App(t, args) => ProofTree::Term(*t, args.iter().map(ProofTree::from).collect()),
    }
  }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
  Sort(SortId),
  Term(TermId),
  Def { id: TermId, local: bool },
  Axiom(ThmId),
  Thm { id: ThmId, local: bool, dummies: Vec<Binder>, dummy_names: Vec<String>, proof: ProofTree },
}

/// An elaborated `.mmt` file. The environment holds local items too.
#[derive(Clone, Debug, Default)]
pub struct Source {
  pub env: Environment,
  pub items: Vec<Item>,
  pub local_terms: Vec<bool>,
  pub local_thms: Vec<bool>,
}

const RESERVED: &[&str] = &[
  "sort",
  "term",
  "def",
  "axiom",
  "theorem",
  "pure",
  "strict",
  "provable",
  "free",
  "delimiter",
  "infixl",
  "infixr",
  "prefix",
  "notation",
  "coercion",
  "max",
  "local",
];

fn is_ident(s: &str) -> bool {
  let mut cs = s.chars();
  cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
    && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
    && !RESERVED.contains(&s)
}

struct Ctx {
  binders: Vec<Binder>,
  names: Vec<String>,
  num_names: usize,
  hyps: Vec<String>,
}

impl Ctx {
  fn var(&self, s: &str) -> Option<u32> {
    self.names.iter().rposition(|n| n == s).map(|i| i as u32)
  }
}

struct Elab<'a> {
  src: &'a str,
  out: Source,
}

type Res<T> = Result<T, CompileError>;

impl<'a> Elab<'a> {
  fn err<T>(&self, pos: usize, kind: CompileErrorKind) -> Res<T> {
    Err(CompileError::at(self.src, pos, kind))
  }

  fn syntax<T>(&self, pos: usize, msg: &str) -> Res<T> {
    self.err(pos, CompileErrorKind::Syntax(msg.into()))
  }

  fn ident<'s>(&self, e: &'s Sexp) -> Res<&'s str> {
    match e.atom() {
      Some(s) if is_ident(s) => Ok(s),
      _ => self.syntax(e.pos(), "expected an identifier"),
    }
  }

  fn list<'s>(&self, e: &'s Sexp) -> Res<&'s [Sexp]> {
    e.list().map_or_else(|| self.syntax(e.pos(), "expected a list"), Ok)
  }

  fn sort(&self, e: &Sexp) -> Res<SortId> {
    let name = self.ident(e)?;
    self
      .out
      .env
      .sort_id(name)
      .map_or_else(|| self.err(e.pos(), CompileErrorKind::UnknownSort(name.into())), Ok)
  }

  fn deps(&self, ctx: &Ctx, items: &[Sexp]) -> Res<VarSet> {
    let mut deps = VarSet::EMPTY;
    for d in items {
      let name = self.ident(d)?;
      match ctx.var(name).map(|i| ctx.binders[i as usize]) {
        Some(b) if b.is_name() => deps = deps.union(b.deps()),
        _ => return self.err(d.pos(), CompileErrorKind::UnknownVar(name.into())),
      }
    }
    Ok(deps)
  }

  fn push_name(&self, ctx: &mut Ctx, e: &Sexp) -> Res<()> {
    let name = self.ident(e)?;
    if ctx.var(name).is_some() {
      return self.err(e.pos(), CompileErrorKind::DuplicateName(name.into()));
    }
    ctx.names.push(name.into());
    Ok(())
  }

  /// `(x s deps…)` is a metavariable, `[x s]` a bound variable.
  fn binder(&self, ctx: &mut Ctx, e: &Sexp) -> Res<()> {
    let Sexp::List { items, bracket, pos } = e else {
      return self.syntax(e.pos(), "expected a binder");
    };
    if items.len() < 2 || (*bracket && items.len() != 2) {
      return self.syntax(*pos, "malformed binder");
    }
    let sort = self.sort(&items[1])?;
    let b = if *bracket {
      ctx.num_names += 1;
      Binder::name(sort, ctx.num_names - 1)
    } else {
      Binder::metavar(sort, self.deps(ctx, &items[2..])?)
    };
    self.push_name(ctx, &items[0])?;
    ctx.binders.push(b);
    Ok(())
  }

  fn binders(&self, e: &Sexp) -> Res<Ctx> {
    let mut ctx = Ctx { binders: vec![], names: vec![], num_names: 0, hyps: vec![] };
    for b in self.list(e)? {
      self.binder(&mut ctx, b)?;
    }
    Ok(ctx)
  }

  fn dummies(&self, ctx: &mut Ctx, e: &Sexp) -> Res<usize> {
    let items = self.list(e)?;
    for d in items {
      if !matches!(d, Sexp::List { bracket: true, .. }) {
        return self.syntax(d.pos(), "dummies must be bound variables");
      }
      self.binder(ctx, d)?;
    }
    Ok(items.len())
  }

  fn ret(&self, ctx: &Ctx, e: &Sexp) -> Res<Binder> {
    match e {
      Sexp::Atom(..) => Ok(Binder::metavar(self.sort(e)?, VarSet::EMPTY)),
      _ => {
        let items = self.list(e)?;
        let Some(s) = items.first() else { return self.syntax(e.pos(), "expected a sort") };
        Ok(Binder::metavar(self.sort(s)?, self.deps(ctx, &items[1..])?))
      }
    }
  }

  fn term_id(&self, e: &Sexp) -> Res<TermId> {
    let name = self.ident(e)?;
    self
      .out
      .env
      .term_id(name)
      .map_or_else(|| self.err(e.pos(), CompileErrorKind::UnknownTerm(name.into())), Ok)
  }

  fn expr(&self, ctx: &Ctx, e: &Sexp) -> Res<Expr> {
    match e {
      Sexp::Atom(s, _) => {
        if let Some(i) = ctx.var(s) {
          return Ok(Expr::Var(i));
        }
        Ok(Expr::App(self.term_id(e)?, vec![]))
      }
      _ => {
        let items = self.list(e)?;
        let Some(head) = items.first() else { return self.syntax(e.pos(), "empty application") };
        let t = self.term_id(head)?;
        let args = items[1..].iter().map(|a| self.expr(ctx, a)).collect::<Res<_>>()?;
        Ok(Expr::App(t, args))
      }
    }
  }

  /// An expression that must be well sorted in the context.
  fn checked_expr(&self, ctx: &Ctx, e: &Sexp) -> Res<(Expr, SortId)> {
    let x = self.expr(ctx, e)?;
    let s = infer_sort(&self.out.env, BinderSlice::Owned(&ctx.binders), &x)
      .or_else(|k| self.err(e.pos(), CompileErrorKind::Kernel(k)))?;
    Ok((x, s))
  }

  fn proof_expr(&self, ctx: &Ctx, e: &Sexp) -> Res<ProofTree> {
    Ok(ProofTree::from(&self.checked_expr(ctx, e)?.0))
  }

  fn proof(&self, ctx: &Ctx, e: &Sexp) -> Res<ProofTree> {
    let (head, rest) = match e {
      Sexp::Atom(s, _) => {
        if let Some(i) = ctx.hyps.iter().rposition(|h| h == s) {
          return Ok(ProofTree::Hyp(i as u32));
        }
        (e, &[][..])
      }
      _ => {
        let items = self.list(e)?;
        let Some(head) = items.first() else { return self.syntax(e.pos(), "empty proof") };
        (head, &items[1..])
      }
    };
    if head.atom() == Some(":conv") {
      let [target, conv, proof] = rest else {
        return self.syntax(e.pos(), "(:conv target conv proof)");
      };
      return Ok(ProofTree::Conv {
        target: Box::new(self.proof_expr(ctx, target)?),
        conv: Box::new(self.conv(ctx, conv)?),
        proof: Box::new(self.proof(ctx, proof)?),
      });
    }
    let name = self.ident(head)?;
    let Some(thm) = self.out.env.thm_id(name) else {
      return self.err(head.pos(), CompileErrorKind::UnknownTheorem(name.into()));
    };
    let decl = self.out.env.thm(thm);
    let (n, k) = (decl.args.len(), decl.hyps.len());
    if rest.len() != n + k + 1 {
      return self.err(
        e.pos(),
        CompileErrorKind::Arity { name: name.into(), expected: n + k + 1, found: rest.len() },
      );
    }
    let args = rest[..n].iter().map(|a| self.proof_expr(ctx, a)).collect::<Res<_>>()?;
    let hyps = rest[n..n + k].iter().map(|p| self.proof(ctx, p)).collect::<Res<_>>()?;
    let concl = Box::new(self.proof_expr(ctx, &rest[n + k])?);
    Ok(ProofTree::Thm { thm, args, hyps, concl })
  }

  fn conv(&self, ctx: &Ctx, e: &Sexp) -> Res<ConvTree> {
    if e.atom() == Some(":refl") {
      return Ok(ConvTree::Refl);
    }
    let items = self.list(e)?;
    match (items.first().and_then(Sexp::atom), &items[1.min(items.len())..]) {
      (Some(":symm"), [c]) => Ok(ConvTree::Symm(Box::new(self.conv(ctx, c)?))),
      (Some(":cong"), cs) => {
        Ok(ConvTree::Cong(cs.iter().map(|c| self.conv(ctx, c)).collect::<Res<_>>()?))
      }
      (Some(":unfold"), [lhs, unfolded, c]) => Ok(ConvTree::Unfold {
        lhs: Box::new(self.proof_expr(ctx, lhs)?),
        unfolded: Box::new(self.proof_expr(ctx, unfolded)?),
        conv: Box::new(self.conv(ctx, c)?),
      }),
      _ => self.syntax(e.pos(), "expected :refl, (:symm c), (:cong c…) or (:unfold lhs e c)"),
    }
  }

  fn hyps(&self, ctx: &mut Ctx, e: &Sexp) -> Res<Vec<Expr>> {
    let mut out = vec![];
    for h in self.list(e)? {
      let [name, x] = self.list(h)? else { return self.syntax(h.pos(), "expected (name expr)") };
      let name = self.ident(name)?;
      if ctx.hyps.iter().any(|n| n == name) {
        return self.err(h.pos(), CompileErrorKind::DuplicateName(name.into()));
      }
      out.push(self.expr(ctx, x)?);
      ctx.hyps.push(name.into());
    }
    Ok(out)
  }

  fn kernel<T>(&self, pos: usize, r: Result<T, KernelError>) -> Res<T> {
    r.or_else(|k| self.err(pos, CompileErrorKind::Kernel(k)))
  }

  fn uses_local(&self, e: &Expr) -> bool {
    match e {
      Expr::Var(_) => false,
      Expr::App(t, args) => {
        self.out.local_terms[t.0 as usize] || args.iter().any(|a| self.uses_local(a))
      }
    }
  }

  fn check_public(&self, pos: usize, exprs: &[&Expr]) -> Res<()> {
    if exprs.iter().any(|e| self.uses_local(e)) {
      return self.err(pos, CompileErrorKind::LocalInStatement);
    }
    Ok(())
  }

  fn form(&mut self, e: &Sexp) -> Res<()> {
    let items = self.list(e)?;
    let (local, items) = match items.first().and_then(Sexp::atom) {
      Some("local") => (true, &items[1..]),
      _ => (false, items),
    };
    let pos = e.pos();
    let Some(kw) = items.first().and_then(Sexp::atom) else {
      return self.syntax(pos, "expected a keyword");
    };
    if local && !matches!(kw, "def" | "theorem") {
      return self.err(pos, CompileErrorKind::BadLocal);
    }
    match (kw, &items[1..]) {
      ("sort", [name, mods @ ..]) => {
        let name = self.ident(name)?;
        let mut m = Modifiers::empty();
        for x in mods {
          match x.atom().and_then(Modifiers::from_keyword) {
            Some(k) if !m.contains(k) => m |= k,
            _ => return self.syntax(x.pos(), "bad sort modifier"),
          }
        }
        let id = {
          let r = self.out.env.add_sort(name, m);
          self.kernel(pos, r)?
        };
        self.out.items.push(Item::Sort(id));
      }
      ("term", [name, binders, ret]) => {
        let name = self.ident(name)?.to_string();
        let ctx = self.binders(binders)?;
        let ret = self.ret(&ctx, ret)?;
        let decl =
          TermDecl { name, args: ctx.binders, var_names: ctx.names, ret, def: Definiens::None };
        let id = {
          let r = self.out.env.add_term(decl);
          self.kernel(pos, r)?
        };
        self.out.local_terms.push(false);
        self.out.items.push(Item::Term(id));
      }
      ("def", [name, binders, ret, dummies, body]) => {
        let name = self.ident(name)?.to_string();
        let mut ctx = self.binders(binders)?;
        let ret = self.ret(&ctx, ret)?;
        let n = ctx.binders.len();
        self.dummies(&mut ctx, dummies)?;
        let body = self.expr(&ctx, body)?;
        if !local {
          self.check_public(pos, &[&body])?;
        }
        let dummy_names = ctx.names.split_off(n);
        let dummies = ctx.binders.split_off(n);
        let def = Definiens::Some { dummies, dummy_names, body };
        let decl = TermDecl { name, args: ctx.binders, var_names: ctx.names, ret, def };
        let id = {
          let r = self.out.env.add_term(decl);
          self.kernel(pos, r)?
        };
        self.out.local_terms.push(local);
        self.out.items.push(Item::Def { id, local });
      }
      ("axiom", [name, binders, hyps, concl]) => {
        let id = self.statement(pos, name, binders, hyps, concl, true)?.0;
        self.out.local_thms.push(false);
        self.out.items.push(Item::Axiom(id));
      }
      ("theorem", [name, binders, hyps, concl, rest @ ..]) if matches!(rest.len(), 1 | 2) => {
        let (id, mut ctx) = self.statement(pos, name, binders, hyps, concl, false)?;
        if !local {
          let d = self.out.env.thm(id);
          self.check_public(pos, &d.hyps.iter().chain([&d.concl]).collect::<Vec<_>>())?;
        }
        let n = ctx.binders.len();
        if rest.len() == 2 {
          self.dummies(&mut ctx, &rest[0])?;
        }
        for (i, b) in ctx.binders[n..].iter().enumerate() {
          if self.out.env.sort_mods(b.sort()).is_some_and(|m| m.contains(Modifiers::FREE)) {
            return self.err(pos, CompileErrorKind::Kernel(KernelError::DummyInFreeSort(n + i)));
          }
        }
        let proof = self.proof(&ctx, rest.last().expect("one or two items"))?;
        self.out.local_thms.push(local);
        let (dummies, dummy_names) = (ctx.binders.split_off(n), ctx.names.split_off(n));
        self.out.items.push(Item::Thm { id, local, dummies, dummy_names, proof });
      }
      _ => return self.syntax(pos, &format!("malformed {kw} form")),
    }
    Ok(())
  }

  fn statement(
    &mut self,
    pos: usize,
    name: &Sexp,
    binders: &Sexp,
    hyps: &Sexp,
    concl: &Sexp,
    axiom: bool,
  ) -> Res<(ThmId, Ctx)> {
    let name = self.ident(name)?.to_string();
    let mut ctx = self.binders(binders)?;
    let hyp_exprs = self.hyps(&mut ctx, hyps)?;
    let concl = self.expr(&ctx, concl)?;
    if axiom {
      self.check_public(pos, &hyp_exprs.iter().chain([&concl]).collect::<Vec<_>>())?;
    }
    let decl = ThmDecl {
      name,
      args: ctx.binders.clone(),
      var_names: ctx.names.clone(),
      hyps: hyp_exprs,
      hyp_names: ctx.hyps.clone(),
      concl,
      axiom,
    };
    let id = {
      let r = self.out.env.add_thm(decl);
      self.kernel(pos, r)?
    };
    Ok((id, ctx))
  }
}

/// Parses and elaborates a `.mmt` source.
pub fn parse_mmt(src: &str) -> Result<Source, CompileError> {
  let forms = read_all(src)?;
  let mut el = Elab { src, out: Source::default() };
  for f in &forms {
    el.form(f)?;
  }
  Ok(el.out)
}
