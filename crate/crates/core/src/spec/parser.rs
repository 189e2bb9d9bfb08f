//! Static syntax: statements, binders and types. Math strings are kept as
//! raw spans and parsed later, once the notations in scope are known.

use super::lexer::{lex, Tok, Token};
use super::{SpecError, SpecErrorKind};
use crate::kernel::Modifiers;

/// A `$ ... $` span: content and byte offset of its first byte.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MathSpan<'a> {
  pub text: &'a str,
  pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Type<'a> {
  pub sort: &'a str,
  pub deps: Vec<&'a str>,
  pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinderKind<'a> {
  /// `{x: s}`
  Name,
  /// `{.x: s}`, only in definitions.
  Dummy,
  /// `(ph: s x..)`
  Metavar,
  /// `(h: $ A $)`
  Hyp(MathSpan<'a>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder<'a> {
  /// `None` for `_`.
  pub name: Option<&'a str>,
  pub kind: BinderKind<'a>,
  /// Absent for hypotheses.
  pub ty: Option<Type<'a>>,
  pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arrow<'a> {
  Type(Type<'a>),
  Formula(MathSpan<'a>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal<'a> {
  Const(MathSpan<'a>, u32),
  Var(&'a str, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind<'a> {
  Sort { mods: Modifiers },
  Term { binders: Vec<Binder<'a>>, ty: Vec<Arrow<'a>> },
  Def { binders: Vec<Binder<'a>>, ty: Vec<Arrow<'a>>, body: Option<MathSpan<'a>> },
  Axiom { binders: Vec<Binder<'a>>, ty: Vec<Arrow<'a>> },
  Theorem { binders: Vec<Binder<'a>>, ty: Vec<Arrow<'a>> },
  Infix { constant: MathSpan<'a>, prec: u32, right: bool },
  Prefix { constant: MathSpan<'a>, prec: u32 },
  Notation { binders: Vec<Binder<'a>>, ty: Vec<Arrow<'a>>, lits: Vec<Literal<'a>> },
  Coercion { from: &'a str, to: &'a str },
  Delimiter { chars: MathSpan<'a> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt<'a> {
  /// The declared name, or the term a notation refers to. Empty for
  /// delimiter statements.
  pub name: &'a str,
  pub kind: StmtKind<'a>,
  pub pos: usize,
}

struct Parser<'a> {
  src: &'a str,
  toks: Vec<Token<'a>>,
  i: usize,
}

impl<'a> Parser<'a> {
  fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError::at(self.src, pos, SpecErrorKind::Syntax(msg.into())))
  }

  fn pos(&self) -> usize {
    self.toks.get(self.i).map_or(self.src.len(), |t| t.pos)
  }
  fn peek(&self) -> Option<Tok<'a>> {
    self.toks.get(self.i).map(|t| t.tok)
  }

  fn bump(&mut self) -> Option<Tok<'a>> {
    let t = self.peek();
    self.i += 1;
    t
  }

  fn is_punct(&self, c: u8) -> bool {
    self.peek() == Some(Tok::Punct(c))
  }

  fn eat_punct(&mut self, c: u8) -> bool {
    let ok = self.is_punct(c);
    if ok {
      self.i += 1;
    }
    ok
  }

  fn expect_punct(&mut self, c: u8) -> Result<(), SpecError> {
    if self.eat_punct(c) {
      Ok(())
    } else {
      self.err(self.pos(), format!("expected '{}'", c as char))
    }
  }

  fn ident(&mut self) -> Result<&'a str, SpecError> {
    match self.peek() {
      Some(Tok::Ident(s)) => {
        self.i += 1;
        Ok(s)
      }
      _ => self.err(self.pos(), "expected identifier"),
    }
  }

  fn keyword(&mut self, kw: &str) -> Result<(), SpecError> {
    match self.peek() {
      Some(Tok::Ident(s)) if s == kw => {
        self.i += 1;
        Ok(())
      }
      _ => self.err(self.pos(), format!("expected '{kw}'")),
    }
  }

  fn math(&mut self) -> Result<MathSpan<'a>, SpecError> {
    let pos = self.pos();
    match self.bump() {
      Some(Tok::Math(text)) => Ok(MathSpan { text, pos }),
      _ => self.err(pos, "expected math string"),
    }
  }

  fn prec(&mut self) -> Result<u32, SpecError> {
    let pos = self.pos();
    match self.bump() {
      Some(Tok::Num(n)) => Ok(n),
      Some(Tok::Ident("max")) => Ok(super::PREC_MAX),
      _ => self.err(pos, "expected precedence"),
    }
  }

  fn ty(&mut self) -> Result<Type<'a>, SpecError> {
    let pos = self.pos();
    let sort = self.ident()?;
    let mut deps = vec![];
    while let Some(Tok::Ident(d)) = self.peek() {
      deps.push(d);
      self.i += 1;
    }
    Ok(Type { sort, deps, pos })
  }

  fn binder_group(&mut self, out: &mut Vec<Binder<'a>>) -> Result<(), SpecError> {
    let curly = match self.peek() {
      Some(Tok::Punct(b'{')) => true,
      Some(Tok::Punct(b'(')) => false,
      _ => return self.err(self.pos(), "expected binder"),
    };
    self.i += 1;
    let mut names = vec![];
    loop {
      let pos = self.pos();
      let dummy = self.eat_punct(b'.');
      if dummy && !curly {
        return self.err(pos, "dummy variables must be written in braces");
      }
      let name = self.ident()?;
      names.push((if name == "_" { None } else { Some(name) }, dummy, pos));
      if self.is_punct(b':') {
        break;
      }
    }
    self.expect_punct(b':')?;
    let (kind_ty, hyp) = if let Some(Tok::Math(_)) = self.peek() {
      if curly {
        return self.err(self.pos(), "hypotheses must be written in parentheses");
      }
      (None, Some(self.math()?))
    } else {
      (Some(self.ty()?), None)
    };
    self.expect_punct(if curly { b'}' } else { b')' })?;
    for (name, dummy, pos) in names {
      let kind = match (&hyp, curly, dummy) {
        (Some(m), _, _) => BinderKind::Hyp(*m),
        (None, true, true) => BinderKind::Dummy,
        (None, true, false) => BinderKind::Name,
        (None, false, _) => BinderKind::Metavar,
      };
      out.push(Binder { name, kind, ty: kind_ty.clone(), pos });
    }
    Ok(())
  }

  fn binders(&mut self) -> Result<Vec<Binder<'a>>, SpecError> {
    let mut out = vec![];
    while self.is_punct(b'{') || self.is_punct(b'(') {
      self.binder_group(&mut out)?;
    }
    Ok(out)
  }

  fn arrows(&mut self) -> Result<Vec<Arrow<'a>>, SpecError> {
    let mut out = vec![];
    loop {
      if let Some(Tok::Math(_)) = self.peek() {
        out.push(Arrow::Formula(self.math()?));
      } else {
        out.push(Arrow::Type(self.ty()?));
      }
      if !self.eat_punct(b'>') {
        return Ok(out);
      }
    }
  }

  fn notation_lits(&mut self) -> Result<Vec<Literal<'a>>, SpecError> {
    let mut lits = vec![];
    while self.eat_punct(b'(') {
      let lit = if let Some(Tok::Math(_)) = self.peek() {
        let m = self.math()?;
        self.expect_punct(b':')?;
        Literal::Const(m, self.prec()?)
      } else {
        let v = self.ident()?;
        self.expect_punct(b':')?;
        Literal::Var(v, self.prec()?)
      };
      self.expect_punct(b')')?;
      lits.push(lit);
    }
    if lits.is_empty() {
      return self.err(self.pos(), "expected notation literal");
    }
    Ok(lits)
  }

  fn stmt(&mut self) -> Result<Stmt<'a>, SpecError> {
    let pos = self.pos();
    let mut mods = Modifiers::empty();
    let kw = loop {
      let kw = self.ident()?;
      match Modifiers::from_keyword(kw) {
        Some(m) => {
          if mods.contains(m) {
            return self.err(pos, format!("duplicate modifier '{kw}'"));
          }
          mods |= m;
        }
        None => break kw,
      }
    };
    if !mods.is_empty() && kw != "sort" {
      return self.err(pos, "modifiers are only allowed on sorts");
    }
    let stmt = match kw {
      "sort" => Stmt { name: self.ident()?, kind: StmtKind::Sort { mods }, pos },
      "term" | "axiom" | "theorem" | "def" => {
        let name = self.ident()?;
        let binders = self.binders()?;
        self.expect_punct(b':')?;
        let ty = self.arrows()?;
        let kind = match kw {
          "term" => StmtKind::Term { binders, ty },
          "axiom" => StmtKind::Axiom { binders, ty },
          "theorem" => StmtKind::Theorem { binders, ty },
          _ => {
            let body = if self.eat_punct(b'=') { Some(self.math()?) } else { None };
            StmtKind::Def { binders, ty, body }
          }
        };
        Stmt { name, kind, pos }
      }
      "infixl" | "infixr" | "prefix" => {
        let name = self.ident()?;
        self.expect_punct(b':')?;
        let constant = self.math()?;
        self.keyword("prec")?;
        let prec = self.prec()?;
        let kind = match kw {
          "prefix" => StmtKind::Prefix { constant, prec },
          _ => StmtKind::Infix { constant, prec, right: kw == "infixr" },
        };
        Stmt { name, kind, pos }
      }
      "notation" => {
        let name = self.ident()?;
        let binders = self.binders()?;
        self.expect_punct(b':')?;
        let ty = self.arrows()?;
        self.expect_punct(b'=')?;
        let lits = self.notation_lits()?;
        Stmt { name, kind: StmtKind::Notation { binders, ty, lits }, pos }
      }
      "coercion" => {
        let name = self.ident()?;
        self.expect_punct(b':')?;
        let from = self.ident()?;
        self.expect_punct(b'>')?;
        let to = self.ident()?;
        Stmt { name, kind: StmtKind::Coercion { from, to }, pos }
      }
      "delimiter" => Stmt { name: "", kind: StmtKind::Delimiter { chars: self.math()? }, pos },
      _ => return self.err(pos, format!("unknown statement '{kw}'")),
    };
    self.expect_punct(b';')?;
    Ok(stmt)
  }
}

/// Parses the static syntax of a whole file.
pub fn parse_static(src: &str) -> Result<Vec<Stmt<'_>>, SpecError> {
  let toks = lex(src)?;
  let mut p = Parser { src, toks, i: 0 };
  let mut out = vec![];
  while p.peek().is_some() {
    out.push(p.stmt()?);
  }
  Ok(out)
}
