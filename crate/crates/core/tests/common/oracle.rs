//! A slow reference checker over plain trees. It shares only the byte-level
//! decoders with the library: every logical check is done here by structural
//! comparison and explicit substitution.

use std::collections::HashMap;
use std::rc::Rc;

use mm0_core::kernel::{Binder, Definiens, Expr, Modifiers};
use mm0_core::mmb::{
  decode_proof_stream, decode_unify_stream, read_payload, DeclKind, MmbFile, Payload, ProofOp,
  UnifyOp,
};
use mm0_core::spec::{Spec, SpecStmt};

type R<T> = Result<T, String>;

#[derive(Debug, PartialEq, Eq)]
enum Tm {
  Var(u32),
  App(u32, Vec<Rc<Tm>>),
}

#[derive(Clone, Copy, Debug)]
struct VarInfo {
  sort: u8,
  name: bool,
  /// For names the variable's own bit, otherwise its dependencies.
  bits: u64,
}

struct Stmt {
  args: Vec<Binder>,
  hyps: Vec<Rc<Tm>>,
  concl: Rc<Tm>,
}

struct TermInfo {
  args: Vec<Binder>,
  ret: Binder,
  /// Definition body over `args` followed by dummies.
  body: Option<(Rc<Tm>, Vec<VarInfo>)>,
}

fn fail<T>(s: impl Into<String>) -> R<T> {
  Err(s.into())
}

fn ensure(b: bool, s: &str) -> R<()> {
  if b {
    Ok(())
  } else {
    fail(s)
  }
}

fn arg_vars(args: &[Binder]) -> Vec<VarInfo> {
  let mut k = 0;
  args
    .iter()
    .map(|b| {
      if b.is_name() {
        k += 1;
        VarInfo { sort: b.sort().0, name: true, bits: 1 << (k - 1) }
      } else {
        VarInfo { sort: b.sort().0, name: false, bits: b.deps().bits() }
      }
    })
    .collect()
}

struct Oracle<'a> {
  sorts: Vec<Modifiers>,
  terms: Vec<TermInfo>,
  thms: Vec<Stmt>,
  payload: &'a Payload,
}

impl Oracle<'_> {
  fn sort(&self, ctx: &[VarInfo], t: &Tm) -> u8 {
    match t {
      Tm::Var(v) => ctx[*v as usize].sort,
      Tm::App(f, _) => self.terms[*f as usize].ret.sort().0,
    }
  }

  fn mods(&self, s: u8) -> R<Modifiers> {
    self.sorts.get(s as usize).copied().ok_or_else(|| format!("sort {s} out of window"))
  }

  fn context(&self, args: &[Binder]) -> R<()> {
    let mut names = 0;
    for b in args {
      let m = self.mods(b.sort().0)?;
      if b.is_name() {
        ensure(names < 56, "too many names")?;
        ensure(b.deps().bits() == 1 << names, "name ordinal")?;
        ensure(!m.contains(Modifiers::STRICT), "name in strict sort")?;
        names += 1;
      } else {
        ensure(b.deps().bits() >> names == 0, "metavariable dependencies")?;
        ensure(!m.contains(Modifiers::PURE), "metavariable in pure sort")?;
      }
    }
    Ok(())
  }

  /// All variables occurring in `t`, as name bits.
  fn v(&self, ctx: &[VarInfo], t: &Tm) -> u64 {
    match t {
      Tm::Var(v) => ctx[*v as usize].bits,
      Tm::App(_, a) => a.iter().fold(0, |acc, e| acc | self.v(ctx, e)),
    }
  }

  fn fv(&self, ctx: &[VarInfo], t: &Tm) -> u64 {
    match t {
      Tm::Var(v) => ctx[*v as usize].bits,
      Tm::App(f, a) => {
        let sig = &self.terms[*f as usize];
        let names: Vec<u64> = sig
          .args
          .iter()
          .zip(a)
          .filter(|(b, _)| b.is_name())
          .map(|(_, e)| self.v(ctx, e))
          .collect();
        let bound = |deps: u64| {
          (0..names.len()).filter(|k| deps >> k & 1 == 1).fold(0, |acc, k| acc | names[k])
        };
        let mut out = bound(sig.ret.deps().bits());
        for (b, e) in sig.args.iter().zip(a) {
          if !b.is_name() {
            out |= self.fv(ctx, e) & !bound(b.deps().bits());
          }
        }
        out
      }
    }
  }

  fn app(&self, ctx: &[VarInfo], f: u32, args: Vec<Rc<Tm>>, window: usize) -> R<Rc<Tm>> {
    ensure((f as usize) < window, "term out of window")?;
    let sig = &self.terms[f as usize];
    ensure(sig.args.len() == args.len(), "arity")?;
    for (b, e) in sig.args.iter().zip(&args) {
      ensure(self.sort(ctx, e) == b.sort().0, "argument sort")?;
      if b.is_name() {
        ensure(matches!(**e, Tm::Var(v) if ctx[v as usize].name), "name argument")?;
      }
    }
    Ok(Rc::new(Tm::App(f, args)))
  }

  fn subst(&self, t: &Tm, sigma: &[Rc<Tm>]) -> Rc<Tm> {
    match t {
      Tm::Var(v) => sigma[*v as usize].clone(),
      Tm::App(f, a) => Rc::new(Tm::App(*f, a.iter().map(|e| self.subst(e, sigma)).collect())),
    }
  }

  /// Reads a unify stream as prefix trees over `ctx`; dummies extend `ctx`.
  fn read_unify(
    &self,
    ops: &[UnifyOp],
    pos: &mut usize,
    heap: &mut Vec<Option<Rc<Tm>>>,
    ctx: &mut Vec<VarInfo>,
    dummies: bool,
    window: usize,
  ) -> R<Rc<Tm>> {
    let op = *ops.get(*pos).ok_or("unify stream ended early")?;
    *pos += 1;
    match op {
      UnifyOp::Ref(i) => heap.get(i as usize).cloned().flatten().ok_or_else(|| "bad ref".into()),
      UnifyOp::Dummy(s) => {
        ensure(dummies, "dummy outside a definition")?;
        ensure(s <= u8::MAX as u32, "sort")?;
        let m = self.mods(s as u8)?;
        ensure(!m.intersects(Modifiers::STRICT | Modifiers::FREE), "dummy sort")?;
        let k = ctx.iter().filter(|v| v.name).count();
        ensure(k < 56, "too many names")?;
        ctx.push(VarInfo { sort: s as u8, name: true, bits: 1 << k });
        let t = Rc::new(Tm::Var(ctx.len() as u32 - 1));
        heap.push(Some(t.clone()));
        Ok(t)
      }
      UnifyOp::Save => {
        let slot = heap.len();
        heap.push(None);
        let t = self.read_unify(ops, pos, heap, ctx, dummies, window)?;
        heap[slot] = Some(t.clone());
        Ok(t)
      }
      UnifyOp::Term(f) | UnifyOp::TermSave(f) => {
        let slot = heap.len();
        if matches!(op, UnifyOp::TermSave(_)) {
          heap.push(None);
        }
        ensure((f as usize) < window, "term out of window")?;
        let n = self.terms[f as usize].args.len();
        let mut args = vec![];
        for _ in 0..n {
          args.push(self.read_unify(ops, pos, heap, ctx, dummies, window)?);
        }
        let t = self.app(ctx, f, args, window)?;
        if matches!(op, UnifyOp::TermSave(_)) {
          heap[slot] = Some(t.clone());
        }
        Ok(t)
      }
      UnifyOp::Hyp | UnifyOp::End => fail("unexpected unify op"),
    }
  }

  /// Equality up to a renaming of `a`'s dummies (index `>= n`) to names of
  /// `b` that are fresh for the arguments.
  fn alpha(
    &self,
    a: &Tm,
    (actx, bctx): (&[VarInfo], &[VarInfo]),
    b: &Tm,
    n: usize,
    forbidden: u64,
    map: &mut HashMap<u32, u32>,
  ) -> bool {
    match (a, b) {
      (Tm::Var(x), _) if (*x as usize) < n => matches!(b, Tm::Var(y) if y == x),
      (Tm::Var(x), Tm::Var(y)) => {
        let yi = bctx[*y as usize];
        if let Some(z) = map.get(x) {
          return z == y;
        }
        if !yi.name || yi.sort != actx[*x as usize].sort || yi.bits & forbidden != 0 {
          return false;
        }
        if map.values().any(|z| z == y) {
          return false;
        }
        map.insert(*x, *y);
        true
      }
      (Tm::App(f, xs), Tm::App(g, ys)) => {
        f == g && xs.iter().zip(ys).all(|(x, y)| self.alpha(x, (actx, bctx), y, n, forbidden, map))
      }
      _ => false,
    }
  }
}

#[derive(Debug)]
enum El {
  Expr(Rc<Tm>),
  Proof(Rc<Tm>),
  Conv(Rc<Tm>, Rc<Tm>),
  CoConv(Rc<Tm>, Rc<Tm>),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
  Def,
  Axiom,
  Thm,
}

struct Run<'o, 'a> {
  o: &'o Oracle<'a>,
  ctx: Vec<VarInfo>,
  heap: Vec<El>,
  stack: Vec<El>,
  hyps: Vec<Rc<Tm>>,
  terms: usize,
  thms: usize,
}

fn dup(e: &El) -> El {
  match e {
    El::Expr(a) => El::Expr(a.clone()),
    El::Proof(a) => El::Proof(a.clone()),
    El::Conv(a, b) => El::Conv(a.clone(), b.clone()),
    El::CoConv(a, b) => El::CoConv(a.clone(), b.clone()),
  }
}

impl Run<'_, '_> {
  fn pop(&mut self) -> R<El> {
    self.stack.pop().ok_or_else(|| "stack underflow".into())
  }

  fn expr(&mut self) -> R<Rc<Tm>> {
    match self.pop()? {
      El::Expr(e) => Ok(e),
      _ => fail("expected an expression"),
    }
  }

  fn proof(&mut self) -> R<Rc<Tm>> {
    match self.pop()? {
      El::Proof(e) => Ok(e),
      _ => fail("expected a proof"),
    }
  }

  fn coconv(&mut self) -> R<(Rc<Tm>, Rc<Tm>)> {
    match self.pop()? {
      El::CoConv(a, b) => Ok((a, b)),
      _ => fail("expected a convertibility obligation"),
    }
  }

  fn provable(&self, e: &Tm) -> R<()> {
    let s = self.o.sort(&self.ctx, e);
    ensure(self.o.mods(s)?.contains(Modifiers::PROVABLE), "sort not provable")
  }

  fn step(&mut self, op: ProofOp, mode: Mode) -> R<()> {
    let o = self.o;
    match op {
      ProofOp::End => return fail("unexpected end"),
      ProofOp::Ref(i) => match self.heap.get(i as usize) {
        Some(e @ (El::Expr(_) | El::Proof(_))) => self.stack.push(dup(e)),
        _ => return fail("bad heap reference"),
      },
      ProofOp::Dummy(s) => {
        ensure(s <= u8::MAX as u32, "sort")?;
        let m = o.mods(s as u8)?;
        ensure(!m.intersects(Modifiers::STRICT | Modifiers::FREE), "dummy sort")?;
        let k = self.ctx.iter().filter(|v| v.name).count();
        ensure(k < 56, "too many names")?;
        self.ctx.push(VarInfo { sort: s as u8, name: true, bits: 1 << k });
        let t = Rc::new(Tm::Var(self.ctx.len() as u32 - 1));
        self.heap.push(El::Expr(t.clone()));
        self.stack.push(El::Expr(t));
      }
      ProofOp::Term(f) | ProofOp::TermSave(f) => {
        ensure((f as usize) < self.terms, "term out of window")?;
        let n = o.terms[f as usize].args.len();
        let mut args = vec![];
        for _ in 0..n {
          args.push(self.expr()?);
        }
        args.reverse();
        let t = o.app(&self.ctx, f, args, self.terms)?;
        if matches!(op, ProofOp::TermSave(_)) {
          self.heap.push(El::Expr(t.clone()));
        }
        self.stack.push(El::Expr(t));
      }
      ProofOp::Save => match self.stack.last() {
        Some(e @ (El::Expr(_) | El::Proof(_))) => self.heap.push(dup(e)),
        _ => return fail("nothing to save"),
      },
      ProofOp::Hyp => {
        ensure(mode != Mode::Def, "hypothesis in a definition")?;
        let e = self.expr()?;
        self.provable(&e)?;
        self.hyps.push(e.clone());
        self.heap.push(El::Proof(e));
      }
      ProofOp::Thm(t) => {
        ensure(mode == Mode::Thm, "theorem application outside a proof")?;
        ensure((t as usize) < self.thms, "theorem out of window")?;
        let st = &o.thms[t as usize];
        let a = self.expr()?;
        let mut hs = vec![];
        for _ in 0..st.hyps.len() {
          hs.push(self.proof()?);
        }
        hs.reverse();
        let mut sigma = vec![];
        for _ in 0..st.args.len() {
          sigma.push(self.expr()?);
        }
        sigma.reverse();
        for (b, e) in st.args.iter().zip(&sigma) {
          ensure(o.sort(&self.ctx, e) == b.sort().0, "argument sort")?;
          if b.is_name() {
            ensure(matches!(**e, Tm::Var(v) if self.ctx[v as usize].name), "name argument")?;
          }
        }
        let mut k = 0;
        for (i, b) in st.args.iter().enumerate() {
          if !b.is_name() {
            continue;
          }
          let x = o.v(&self.ctx, &sigma[i]);
          for (j, c) in st.args.iter().enumerate() {
            if j != i && (c.is_name() || c.deps().bits() >> k & 1 == 0) {
              ensure(o.v(&self.ctx, &sigma[j]) & x == 0, "disjointness")?;
            }
          }
          k += 1;
        }
        for (h, p) in st.hyps.iter().zip(&hs) {
          ensure(o.subst(h, &sigma) == *p, "hypothesis mismatch")?;
        }
        ensure(o.subst(&st.concl, &sigma) == a, "conclusion mismatch")?;
        self.stack.push(El::Proof(a));
      }
      ProofOp::Conv => {
        ensure(mode == Mode::Thm, "conversion outside a proof")?;
        let b = self.proof()?;
        let a = self.expr()?;
        self.provable(&a)?;
        self.stack.push(El::Proof(a.clone()));
        self.stack.push(El::CoConv(a, b));
      }
      ProofOp::Refl => {
        let (a, b) = self.coconv()?;
        ensure(a == b, "refl")?;
      }
      ProofOp::Symm => {
        let (a, b) = self.coconv()?;
        self.stack.push(El::CoConv(b, a));
      }
      ProofOp::Cong => {
        let (a, b) = self.coconv()?;
        match (&*a, &*b) {
          (Tm::App(f, xs), Tm::App(g, ys)) if f == g => {
            for (x, y) in xs.iter().zip(ys).rev() {
              self.stack.push(El::CoConv(x.clone(), y.clone()));
            }
          }
          _ => return fail("cong"),
        }
      }
      ProofOp::Unfold => {
        let e2 = self.expr()?;
        let e = self.expr()?;
        let (l, r) = self.coconv()?;
        ensure(l == e, "unfold target")?;
        let Tm::App(f, args) = &*e else { return fail("unfold of a variable") };
        let Some((body, bctx)) = &o.terms[*f as usize].body else {
          return fail("unfold of a non-definition");
        };
        let n = args.len();
        let forbidden = args.iter().fold(0, |acc, a| acc | o.v(&self.ctx, a));
        let mut map = HashMap::new();
        ensure(self.matches(body, bctx, &e2, args, n, forbidden, &mut map), "unfold body")?;
        self.stack.push(El::CoConv(e2, r));
      }
      ProofOp::ConvCut => {
        let b = self.expr()?;
        let a = self.expr()?;
        self.stack.push(El::Conv(a.clone(), b.clone()));
        self.stack.push(El::CoConv(a, b));
      }
      ProofOp::ConvRef(i) => {
        let (a, b) = self.coconv()?;
        match self.heap.get(i as usize) {
          Some(El::Conv(x, y)) if *x == a && *y == b => {}
          _ => return fail("bad conversion reference"),
        }
      }
      ProofOp::ConvSave => match self.pop()? {
        El::Conv(a, b) => self.heap.push(El::Conv(a, b)),
        _ => return fail("expected a conversion"),
      },
    }
    Ok(())
  }

  /// `e` is the body with `args` substituted and the dummies renamed.
  #[allow(clippy::too_many_arguments)]
  fn matches(
    &self,
    body: &Tm,
    bctx: &[VarInfo],
    e: &Tm,
    args: &[Rc<Tm>],
    n: usize,
    forbidden: u64,
    map: &mut HashMap<u32, u32>,
  ) -> bool {
    match (body, e) {
      (Tm::Var(x), _) if (*x as usize) < n => *args[*x as usize] == *e,
      (Tm::Var(x), Tm::Var(y)) => {
        let yi = self.ctx[*y as usize];
        if let Some(z) = map.get(x) {
          return z == y;
        }
        if !yi.name || yi.sort != bctx[*x as usize].sort || yi.bits & forbidden != 0 {
          return false;
        }
        if map.values().any(|z| z == y) {
          return false;
        }
        map.insert(*x, *y);
        true
      }
      (Tm::App(f, xs), Tm::App(g, ys)) => {
        f == g && xs.iter().zip(ys).all(|(x, y)| self.matches(x, bctx, y, args, n, forbidden, map))
      }
      _ => false,
    }
  }
}

impl<'a> Oracle<'a> {
  fn run(&self, args: &[Binder], proof: &[u8], mode: Mode, w: (usize, usize)) -> R<Run<'_, 'a>> {
    let (ops, _) = decode_proof_stream(proof, 0).map_err(|e| e.to_string())?;
    let ctx = arg_vars(args);
    let heap = (0..args.len() as u32).map(|i| El::Expr(Rc::new(Tm::Var(i)))).collect();
    let mut r = Run { o: self, ctx, heap, stack: vec![], hyps: vec![], terms: w.0, thms: w.1 };
    for op in ops {
      r.step(op, mode)?;
    }
    Ok(r)
  }

  /// Translates a specification expression into file term numbering.
  fn spec_tree(&self, e: &Expr, term_map: &[Option<u32>]) -> R<Rc<Tm>> {
    Ok(Rc::new(match e {
      Expr::Var(i) => Tm::Var(*i),
      Expr::App(t, a) => Tm::App(
        term_map.get(t.0 as usize).copied().flatten().ok_or("unmapped term")?,
        a.iter().map(|x| self.spec_tree(x, term_map)).collect::<R<_>>()?,
      ),
    }))
  }

  fn decl(
    &mut self,
    kind: DeclKind,
    local: bool,
    proof: &[u8],
    spec: &Spec,
    next: &mut usize,
    term_map: &mut [Option<u32>],
  ) -> R<()> {
    let p = self.payload;
    let stmt = if local {
      ensure(matches!(kind, DeclKind::Def | DeclKind::Thm), "local declaration kind")?;
      None
    } else {
      let s = *spec.stmts.get(*next).ok_or("extra public declaration")?;
      *next += 1;
      let ok = match (kind, s) {
        (DeclKind::Sort, SpecStmt::Sort(_)) => true,
        (DeclKind::Term, SpecStmt::Term(t)) => !spec.env.term(t).is_def(),
        (DeclKind::Def, SpecStmt::Term(t)) => spec.env.term(t).is_def(),
        (DeclKind::Axiom, SpecStmt::Thm(t)) => spec.env.thm(t).axiom,
        (DeclKind::Thm, SpecStmt::Thm(t)) => !spec.env.thm(t).axiom,
        _ => false,
      };
      ensure(ok, "declaration kind differs from the specification")?;
      Some(s)
    };
    match kind {
      DeclKind::Sort => {
        let i = self.sorts.len();
        let m = *p.sorts.get(i).ok_or("sort table")?;
        if let Some(SpecStmt::Sort(s)) = stmt {
          ensure(s.0 as usize == i && spec.env.sorts[i].mods == m, "sort")?;
        }
        self.sorts.push(m);
      }
      DeclKind::Term | DeclKind::Def => {
        let i = self.terms.len();
        let t = p.terms.get(i).ok_or("term table")?;
        self.context(&t.args)?;
        ensure(!self.mods(t.ret.sort().0)?.contains(Modifiers::PURE), "term in pure sort")?;
        ensure(t.unify.is_some() == (kind == DeclKind::Def), "definition flag")?;
        ensure(!t.ret.is_name(), "return binder")?;
        let names = t.args.iter().filter(|b| b.is_name()).count();
        ensure(t.ret.deps().bits() >> names == 0, "return dependencies")?;
        if let Some(SpecStmt::Term(s)) = stmt {
          let d = spec.env.term(s);
          ensure(d.args == t.args && d.ret == t.ret, "term signature")?;
          term_map[s.0 as usize] = Some(i as u32);
        }
        let mut body = None;
        if let Some(u) = &t.unify {
          let w = (i, self.thms.len());
          let r = self.run(&t.args, proof, Mode::Def, w)?;
          let [El::Expr(e)] = &r.stack[..] else { return fail("final stack") };
          ensure(self.sort(&r.ctx, e) == t.ret.sort().0, "body sort")?;
          let fv = self.fv(&r.ctx, e);
          // Dummy names have bits above the arguments' and so never pass.
          ensure(fv & !t.ret.deps().bits() == 0, "free variables in definition")?;
          let (uops, _) = decode_unify_stream(u, 0).map_err(|e| e.to_string())?;
          let mut heap = (0..t.args.len() as u32).map(|i| Some(Rc::new(Tm::Var(i)))).collect();
          let mut bctx = arg_vars(&t.args);
          let mut pos = 0;
          let stored = self.read_unify(&uops, &mut pos, &mut heap, &mut bctx, true, i)?;
          ensure(pos == uops.len(), "trailing unify ops")?;
          let n = t.args.len();
          let forbidden = arg_vars(&t.args).iter().fold(0, |a, v| a | v.bits);
          let ok = self.alpha(&stored, (&bctx, &r.ctx), e, n, forbidden, &mut HashMap::new());
          ensure(ok, "stored definition differs from its proof")?;
          if let Some(SpecStmt::Term(s)) = stmt {
            if let Definiens::Some { dummies, body, .. } = &spec.env.term(s).def {
              let sb = self.spec_tree(body, term_map)?;
              let mut sctx = arg_vars(&t.args);
              let k = t.args.iter().filter(|b| b.is_name()).count();
              for (j, d) in dummies.iter().enumerate() {
                sctx.push(VarInfo { sort: d.sort().0, name: true, bits: 1 << (k + j).min(63) });
              }
              let ok = self.alpha(&stored, (&bctx, &sctx), &sb, n, forbidden, &mut HashMap::new());
              ensure(ok, "definition body differs from the specification")?;
            }
          }
          body = Some((stored, bctx));
        }
        self.terms.push(TermInfo { args: t.args.clone(), ret: t.ret, body });
      }
      DeclKind::Axiom | DeclKind::Thm => {
        let i = self.thms.len();
        let t = p.thms.get(i).ok_or("theorem table")?;
        self.context(&t.args)?;
        let mode = if kind == DeclKind::Axiom { Mode::Axiom } else { Mode::Thm };
        let r = self.run(&t.args, proof, mode, (self.terms.len(), i))?;
        let a = match (mode, &r.stack[..]) {
          (Mode::Axiom, [El::Expr(a)]) | (Mode::Thm, [El::Proof(a)]) => a.clone(),
          _ => return fail("final stack"),
        };
        r.provable(&a)?;
        ensure(r.hyps.len() == t.num_hyps as usize, "hypothesis count")?;
        let (uops, _) = decode_unify_stream(&t.unify, 0).map_err(|e| e.to_string())?;
        let mut heap: Vec<_> =
          (0..t.args.len() as u32).map(|i| Some(Rc::new(Tm::Var(i)))).collect();
        let mut ctx = arg_vars(&t.args);
        let w = self.terms.len();
        let mut pos = 0;
        let concl = self.read_unify(&uops, &mut pos, &mut heap, &mut ctx, false, w)?;
        let mut hyps = vec![];
        while pos < uops.len() {
          ensure(uops[pos] == UnifyOp::Hyp, "expected a hypothesis")?;
          pos += 1;
          hyps.push(self.read_unify(&uops, &mut pos, &mut heap, &mut ctx, false, w)?);
        }
        hyps.reverse();
        ensure(concl == a, "conclusion differs from the stored statement")?;
        ensure(hyps == r.hyps, "hypotheses differ from the stored statement")?;
        if let Some(SpecStmt::Thm(s)) = stmt {
          let d = spec.env.thm(s);
          ensure(d.args == t.args, "theorem binders")?;
          ensure(self.spec_tree(&d.concl, term_map)? == concl, "theorem conclusion")?;
          let sh: Vec<_> = d.hyps.iter().map(|h| self.spec_tree(h, term_map)).collect::<R<_>>()?;
          ensure(sh == hyps, "theorem hypotheses")?;
        }
        self.thms.push(Stmt { args: t.args.clone(), hyps, concl });
      }
    }
    Ok(())
  }
}

/// Checks a proof file against a specification.
pub fn check(spec: &Spec, bytes: &[u8]) -> Result<(), String> {
  // The name index carries no logical content.
  let mut bytes = bytes.to_vec();
  if bytes.len() >= 40 {
    let p = u64::from_le_bytes(bytes[32..40].try_into().unwrap());
    if p != 0 && p <= bytes.len() as u64 {
      bytes.truncate(p as usize);
    }
    bytes[32..40].fill(0);
  }
  let f = MmbFile::parse(&bytes).map_err(|e| e.to_string())?;
  let payload = read_payload(&f).map_err(|e| e.to_string())?;
  let mut o = Oracle { sorts: vec![], terms: vec![], thms: vec![], payload: &payload };
  let mut next = 0;
  let mut term_map = vec![None; spec.env.terms.len()];
  for d in &payload.decls {
    o.decl(d.kind, d.local, &d.proof, spec, &mut next, &mut term_map)?;
  }
  ensure(next == spec.stmts.len(), "missing declarations")?;
  ensure(o.sorts.len() == payload.sorts.len(), "sort count")?;
  ensure(o.terms.len() == payload.terms.len(), "term count")?;
  ensure(o.thms.len() == payload.thms.len(), "theorem count")?;
  Ok(())
}
