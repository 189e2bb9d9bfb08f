//! Notation tables, the coercion graph, and the precedence parser and printer
//! for math strings.

use std::collections::HashMap;

use super::lexer::math_tokens;
use super::{SpecErrorKind, APP_PREC, PREC_MAX};
use crate::kernel::{Binder, Environment, Expr, Modifiers, Signatures, SortId, TermId};

/// A general notation `($c$: p) lit..`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralNotation {
  pub term: TermId,
  pub prec: u32,
  pub lits: Vec<NotationLit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotationLit {
  Const(String),
  /// Argument index of the term and the slot's precedence.
  Var(usize, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Role {
  Infix { term: TermId, prec: u32, right: bool },
  Leading(usize),
  Inner(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoercionError {
  Cycle,
  Diamond,
}

/// Coercions between sorts, with at most one path between any two sorts.
#[derive(Clone, Debug, Default)]
pub struct CoercionGraph {
  paths: HashMap<(SortId, SortId), Vec<TermId>>,
}

impl CoercionGraph {
  pub fn new() -> CoercionGraph {
    CoercionGraph::default()
  }

  /// The coercions to apply, innermost first.
  pub fn path(&self, from: SortId, to: SortId) -> Option<&[TermId]> {
    self.paths.get(&(from, to)).map(Vec::as_slice)
  }

  /// Sorts reachable from `from` by a nonempty path.
  pub fn targets(&self, from: SortId) -> impl Iterator<Item = SortId> + '_ {
    self.paths.keys().filter(move |k| k.0 == from).map(|k| k.1)
  }

  /// Adds the edge `from -> to` and re-establishes path uniqueness.
  pub fn add(&mut self, from: SortId, to: SortId, term: TermId) -> Result<(), CoercionError> {
    if from == to || self.paths.contains_key(&(to, from)) {
      return Err(CoercionError::Cycle);
    }
    let mut sources = vec![(from, vec![])];
    sources.extend(self.paths.iter().filter(|(k, _)| k.1 == from).map(|(k, p)| (k.0, p.clone())));
    let mut sinks = vec![(to, vec![])];
    sinks.extend(self.paths.iter().filter(|(k, _)| k.0 == to).map(|(k, p)| (k.1, p.clone())));
    for (x, _) in &sources {
      for (y, _) in &sinks {
        if x == y {
          return Err(CoercionError::Cycle);
        }
        if self.paths.contains_key(&(*x, *y)) {
          return Err(CoercionError::Diamond);
        }
      }
    }
    for (x, p1) in &sources {
      for (y, p2) in &sinks {
        let mut p = p1.clone();
        p.push(term);
        p.extend(p2);
        self.paths.insert((*x, *y), p);
      }
    }
    Ok(())
  }
}

/// Everything needed to parse and print math strings.
#[derive(Clone, Debug)]
pub struct Notations {
  delims: Vec<char>,
  roles: HashMap<String, Role>,
  general: Vec<GeneralNotation>,
  /// Levels that have operators, with their associativity (true = right).
  levels: HashMap<u32, bool>,
  by_term: HashMap<TermId, Printer>,
  pub coercions: CoercionGraph,
}

#[derive(Clone, Debug)]
enum Printer {
  Infix(u32, bool, String),
  General(usize),
}

impl Default for Notations {
  fn default() -> Notations {
    Notations {
      delims: vec!['(', ')'],
      roles: HashMap::new(),
      general: vec![],
      levels: HashMap::new(),
      by_term: HashMap::new(),
      coercions: CoercionGraph::new(),
    }
  }
}

type NResult<T> = Result<T, SpecErrorKind>;

impl Notations {
  pub fn new() -> Notations {
    Notations::default()
  }

  pub fn delimiters(&self) -> &[char] {
    &self.delims
  }

  pub fn is_constant(&self, tok: &str) -> bool {
    self.roles.contains_key(tok) || tok == "(" || tok == ")"
  }

  /// Adds delimiter characters.
  pub fn add_delimiters(&mut self, chars: impl IntoIterator<Item = char>) -> NResult<()> {
    for c in chars {
      if self.roles.keys().any(|t| t.len() > c.len_utf8() && t.contains(c)) {
        return Err(SpecErrorKind::BadNotation(format!("delimiter '{c}' occurs inside constant")));
      }
      if !self.delims.contains(&c) {
        self.delims.push(c);
      }
    }
    Ok(())
  }

  /// Checks that `s` is exactly one math token and returns it.
  pub fn constant_token<'a>(&self, s: &'a str) -> NResult<&'a str> {
    let toks = math_tokens(s, 0, &self.delims);
    match toks[..] {
      [(t, _)] if t != "(" && t != ")" => Ok(t),
      _ => {
        Err(SpecErrorKind::BadNotation(format!("'{}' is not a single constant token", s.trim())))
      }
    }
  }

  fn claim(&mut self, tok: &str, role: Role) -> NResult<()> {
    match (self.roles.get(tok), &role) {
      (None, _) => {
        self.roles.insert(tok.into(), role);
        Ok(())
      }
      (Some(Role::Inner(p)), Role::Inner(q)) if p == q => Ok(()),
      _ => Err(SpecErrorKind::AmbiguousNotation(tok.into())),
    }
  }

  fn claim_level(&mut self, prec: u32, right: bool, tok: &str) -> NResult<()> {
    match self.levels.insert(prec, right) {
      Some(r) if r != right => Err(SpecErrorKind::AmbiguousNotation(tok.into())),
      _ => Ok(()),
    }
  }

  pub fn add_infix(
    &mut self,
    sigs: &impl Signatures,
    term: TermId,
    tok: &str,
    prec: u32,
    right: bool,
  ) -> NResult<()> {
    let sig = sigs.term_sig(term).ok_or(SpecErrorKind::BadNotation("unknown term".into()))?;
    if sig.args.len() != 2 {
      return Err(SpecErrorKind::BadNotation("infix notation needs a binary term".into()));
    }
    if prec >= PREC_MAX - 1 {
      return Err(SpecErrorKind::BadNotation("infix precedence must be below max".into()));
    }
    if self.roles.contains_key(tok) {
      return Err(SpecErrorKind::AmbiguousNotation(tok.into()));
    }
    self.claim_level(prec, right, tok)?;
    self.claim(tok, Role::Infix { term, prec, right })?;
    self.by_term.entry(term).or_insert(Printer::Infix(prec, right, tok.into()));
    Ok(())
  }

  /// Registers a general notation. The first literal must be a constant, every
  /// argument must occur exactly once, and a trailing argument slot must bind
  /// at least as tightly as the notation itself.
  pub fn add_general(&mut self, sigs: &impl Signatures, n: GeneralNotation) -> NResult<()> {
    let sig = sigs.term_sig(n.term).ok_or(SpecErrorKind::BadNotation("unknown term".into()))?;
    let Some(NotationLit::Const(lead)) = n.lits.first() else {
      return Err(SpecErrorKind::BadNotation("notation must begin with a constant".into()));
    };
    let mut seen = vec![false; sig.args.len()];
    for l in &n.lits {
      if let NotationLit::Var(i, _) = *l {
        if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
          return Err(SpecErrorKind::BadNotation("each argument must occur exactly once".into()));
        }
      }
    }
    if seen.contains(&false) {
      return Err(SpecErrorKind::BadNotation("each argument must occur exactly once".into()));
    }
    if let Some(NotationLit::Var(_, r)) = n.lits.last() {
      if *r < n.prec {
        return Err(SpecErrorKind::BadNotation(
          "trailing argument binds more loosely than the notation".into(),
        ));
      }
    }
    let mut inner = vec![];
    for l in &n.lits[1..] {
      if let NotationLit::Const(c) = l {
        if c == lead
          || inner.contains(c)
          || matches!(self.roles.get(c), Some(Role::Infix { .. } | Role::Leading(_)))
        {
          return Err(SpecErrorKind::AmbiguousNotation(c.clone()));
        }
        inner.push(c.clone());
      }
    }
    if self.roles.contains_key(lead.as_str()) {
      return Err(SpecErrorKind::AmbiguousNotation(lead.clone()));
    }
    match n.lits.last() {
      Some(NotationLit::Var(_, r)) if *r == n.prec => self.claim_level(n.prec, true, lead)?,
      _ => {}
    }
    for c in inner {
      self.claim(&c, Role::Inner(n.prec))?;
    }
    let idx = self.general.len();
    self.claim(lead, Role::Leading(idx))?;
    self.by_term.entry(n.term).or_insert(Printer::General(idx));
    self.general.push(n);
    Ok(())
  }

  pub fn add_coercion(
    &mut self,
    sigs: &impl Signatures,
    term: TermId,
    from: SortId,
    to: SortId,
  ) -> NResult<()> {
    let sig = sigs.term_sig(term).ok_or(SpecErrorKind::BadNotation("unknown term".into()))?;
    let ok = sig.args.len() == 1
      && sig.args.get(0).is_some_and(|b| !b.is_name() && b.sort() == from && b.deps().is_empty())
      && sig.ret.sort() == to;
    if !ok {
      return Err(SpecErrorKind::BadNotation("coercion term must have type from > to".into()));
    }
    self.coercions.add(from, to, term).map_err(|e| match e {
      CoercionError::Cycle => SpecErrorKind::CoercionCycle,
      CoercionError::Diamond => SpecErrorKind::DiamondPath,
    })
  }
}

/// What the parsed expression must be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
  Sort(SortId),
  /// Any provable sort, coercing to the unique reachable one if needed.
  Provable,
}

/// Variables in scope while parsing: names in binder order.
pub struct MathCtx<'a> {
  pub names: &'a [String],
  pub binders: &'a [Binder],
}

struct Parsed {
  e: Expr,
  sort: SortId,
  level: u32,
}

struct MathParser<'a> {
  toks: Vec<(&'a str, usize)>,
  i: usize,
  end: usize,
  nots: &'a Notations,
  env: &'a Environment,
  ctx: &'a MathCtx<'a>,
  vars: HashMap<&'a str, u32>,
}

/// A math parse error with the byte offset of the offending token.
pub type MathError = (SpecErrorKind, usize);

impl<'a> MathParser<'a> {
  fn peek(&self) -> Option<(&'a str, usize)> {
    self.toks.get(self.i).copied()
  }

  fn next_tok(&mut self) -> Result<(&'a str, usize), MathError> {
    let t = self
      .peek()
      .ok_or((SpecErrorKind::Syntax("unexpected end of math string".into()), self.end))?;
    self.i += 1;
    Ok(t)
  }

  fn coerce(&self, p: Parsed, to: SortId, pos: usize) -> Result<Expr, MathError> {
    if p.sort == to {
      return Ok(p.e);
    }
    let path = self.nots.coercions.path(p.sort, to).ok_or_else(|| {
      (SpecErrorKind::NoCoercionPath { from: self.sort_name(p.sort), to: self.sort_name(to) }, pos)
    })?;
    Ok(path.iter().fold(p.e, |e, &c| Expr::App(c, vec![e])))
  }

  fn sort_name(&self, s: SortId) -> String {
    self.env.sorts.get(s.0 as usize).map_or_else(|| s.to_string(), |d| d.name.clone())
  }

  fn apply(
    &self,
    term: TermId,
    args: Vec<(Parsed, usize)>,
    level: u32,
  ) -> Result<Parsed, MathError> {
    let decl = self.env.term(term);
    let mut out = Vec::with_capacity(args.len());
    for (b, (arg, pos)) in decl.args.iter().zip(args) {
      if b.is_name() {
        let ok = matches!(arg.e, Expr::Var(j) if self.ctx.binders[j as usize].is_name())
          && arg.sort == b.sort();
        if !ok {
          return Err((
            SpecErrorKind::Type(format!(
              "argument of {} must be a bound variable of sort {}",
              decl.name,
              self.sort_name(b.sort())
            )),
            pos,
          ));
        }
        out.push(arg.e);
      } else {
        out.push(self.coerce(arg, b.sort(), pos)?);
      }
    }
    Ok(Parsed { e: Expr::App(term, out), sort: decl.ret.sort(), level })
  }

  fn expr(&mut self, p: u32) -> Result<Parsed, MathError> {
    let mut lhs = self.prefix(p)?;
    let mut lhs_pos = self.toks.get(self.i.saturating_sub(1)).map_or(self.end, |t| t.1);
    while let Some((tok, pos)) = self.peek() {
      let Some(&Role::Infix { term, prec, right }) = self.nots.roles.get(tok) else { break };
      if prec < p {
        break;
      }
      if lhs.level < if right { prec + 1 } else { prec } {
        return Err((SpecErrorKind::PrecedenceError(tok.into()), pos));
      }
      self.i += 1;
      let rhs_pos = self.peek().map_or(self.end, |t| t.1);
      let rhs = self.expr(if right { prec } else { prec + 1 })?;
      lhs = self.apply(term, vec![(lhs, lhs_pos), (rhs, rhs_pos)], prec)?;
      lhs_pos = pos;
    }
    Ok(lhs)
  }

  fn prefix(&mut self, p: u32) -> Result<Parsed, MathError> {
    let (tok, pos) = self.next_tok()?;
    if tok == "(" {
      let mut e = self.expr(0)?;
      match self.next_tok()? {
        (")", _) => {}
        (_, pos) => return Err((SpecErrorKind::Syntax("expected ')'".into()), pos)),
      }
      e.level = PREC_MAX;
      return Ok(e);
    }
    match self.nots.roles.get(tok) {
      Some(&Role::Leading(idx)) => {
        let n = &self.nots.general[idx];
        if n.prec < p {
          return Err((SpecErrorKind::PrecedenceError(tok.into()), pos));
        }
        let nargs = self.env.term(n.term).args.len();
        let mut args: Vec<Option<(Parsed, usize)>> = (0..nargs).map(|_| None).collect();
        for lit in &n.lits[1..] {
          match lit {
            NotationLit::Const(c) => {
              let (t, tpos) = self.next_tok()?;
              if t != c {
                return Err((SpecErrorKind::Syntax(format!("expected '{c}'")), tpos));
              }
            }
            NotationLit::Var(i, r) => {
              let apos = self.peek().map_or(self.end, |t| t.1);
              args[*i] = Some((self.expr(*r)?, apos));
            }
          }
        }
        let args = args.into_iter().map(|a| a.expect("every argument occurs")).collect();
        return self.apply(n.term, args, n.prec);
      }
      Some(_) => return Err((SpecErrorKind::Syntax(format!("unexpected '{tok}'")), pos)),
      None => {}
    }
    if tok == ")" {
      return Err((SpecErrorKind::Syntax("unexpected ')'".into()), pos));
    }
    if let Some(&v) = self.vars.get(tok) {
      let sort = self.ctx.binders[v as usize].sort();
      return Ok(Parsed { e: Expr::Var(v), sort, level: PREC_MAX });
    }
    if let Some(t) = self.env.term_id(tok) {
      let n = self.env.term(t).args.len();
      if n == 0 {
        return self.apply(t, vec![], PREC_MAX);
      }
      if APP_PREC < p {
        return Err((SpecErrorKind::PrecedenceError(tok.into()), pos));
      }
      let mut args = Vec::with_capacity(n);
      for _ in 0..n {
        let apos = self.peek().map_or(self.end, |t| t.1);
        args.push((self.expr(PREC_MAX)?, apos));
      }
      return self.apply(t, args, APP_PREC);
    }
    Err((SpecErrorKind::UnknownConstant(tok.into()), pos))
  }
}

/// Parses a math string over `ctx`. `base` is the byte offset of `text` in
/// the source, used for error positions.
pub fn parse_math(
  text: &str,
  base: usize,
  nots: &Notations,
  env: &Environment,
  ctx: &MathCtx<'_>,
  expected: Expected,
) -> Result<Expr, MathError> {
  let toks = math_tokens(text, base, &nots.delims);
  let vars = ctx.names.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32)).collect();
  let mut p = MathParser { toks, i: 0, end: base + text.len(), nots, env, ctx, vars };
  let start = p.peek().map_or(p.end, |t| t.1);
  let e = p.expr(0)?;
  if let Some((tok, pos)) = p.peek() {
    return Err((SpecErrorKind::Syntax(format!("unexpected '{tok}'")), pos));
  }
  match expected {
    Expected::Sort(s) => p.coerce(e, s, start),
    Expected::Provable => {
      let provable = |s: SortId| env.sort_mods(s).is_some_and(|m| m.contains(Modifiers::PROVABLE));
      if provable(e.sort) {
        return Ok(e.e);
      }
      let mut targets = nots.coercions.targets(e.sort).filter(|&t| provable(t));
      match (targets.next(), targets.next()) {
        (Some(t), None) => p.coerce(e, t, start),
        _ => Err((
          SpecErrorKind::NoCoercionPath {
            from: p.sort_name(e.sort),
            to: "a unique provable sort".into(),
          },
          start,
        )),
      }
    }
  }
}

/// Prints `e` with the registered notations, adding only the parentheses
/// needed to parse it back. Coercions print as ordinary applications.
pub fn print_math(nots: &Notations, env: &Environment, names: &[String], e: &Expr) -> String {
  let mut out = vec![];
  print_rec(nots, env, names, e, 0, &mut out);
  let mut s = String::new();
  for (i, t) in out.iter().enumerate() {
    if i > 0 && out[i - 1] != "(" && t != ")" {
      s.push(' ');
    }
    s.push_str(t);
  }
  s
}

fn print_rec(
  nots: &Notations,
  env: &Environment,
  names: &[String],
  e: &Expr,
  min: u32,
  out: &mut Vec<String>,
) {
  let (t, args) = match e {
    Expr::Var(i) => {
      out.push(names[*i as usize].clone());
      return;
    }
    Expr::App(t, args) => (*t, args),
  };
  let level = match nots.by_term.get(&t) {
    Some(Printer::Infix(q, ..)) => *q,
    Some(Printer::General(i)) => nots.general[*i].prec,
    None if args.is_empty() => PREC_MAX,
    None => APP_PREC,
  };
  let paren = level < min;
  if paren {
    out.push("(".into());
  }
  match nots.by_term.get(&t) {
    Some(Printer::Infix(q, right, tok)) => {
      let (q, right) = (*q, *right);
      print_rec(nots, env, names, &args[0], if right { q + 1 } else { q }, out);
      out.push(tok.clone());
      print_rec(nots, env, names, &args[1], if right { q } else { q + 1 }, out);
    }
    Some(&Printer::General(i)) => {
      for lit in &nots.general[i].lits {
        match lit {
          NotationLit::Const(c) => out.push(c.clone()),
          NotationLit::Var(a, r) => print_rec(nots, env, names, &args[*a], *r, out),
        }
      }
    }
    None => {
      out.push(env.term(t).name.clone());
      for a in args {
        print_rec(nots, env, names, a, PREC_MAX, out);
      }
    }
  }
  if paren {
    out.push(")".into());
  }
}
