//! Synthetic `.mmt` developments for testing and benchmarking.
//!
//! [`generate`] produces a propositional calculus with a first-order layer
//! and a stream of random theorems whose proofs are derived forwards from
//! the axioms and earlier theorems, so every generated proof is valid.
//! [`adversarial`] produces the large-numeral family whose verification time
//! grows with the product of statement size and number of uses.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PRELUDE: &str = "\
(sort wff provable)
(sort nat)
(term im ((a wff) (b wff)) wff)
(term not ((a wff)) wff)
(term all ([x nat] (p wff x)) wff)
(term eq ((m nat) (n nat)) wff)
(term zero () nat)
(term suc ((n nat)) nat)
(term add ((m nat) (n nat)) nat)
(axiom a1 ((a wff) (b wff)) () (im a (im b a)))
(axiom a2 ((a wff) (b wff) (c wff)) () (im (im a (im b c)) (im (im a b) (im a c))))
(axiom a3 ((a wff) (b wff)) () (im (im (not a) (not b)) (im b a)))
(axiom mp ((a wff) (b wff)) ((h1 (im a b)) (h2 a)) b)
(axiom gen ([x nat] (p wff x)) ((h p)) (all x p))
(axiom eqid ((n nat)) () (eq n n))
";

/// Number of declarations in [`PRELUDE`].
pub const PRELUDE_DECLS: usize = 15;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum W {
  /// One of the wff arguments `a`, `b`, `c`.
  V(u8),
  Im(Box<W>, Box<W>),
  Not(Box<W>),
  /// `all x (eq N N)`; only built over the bound argument `x`.
  AllEq(Box<N>),
  /// Application of a generated definition.
  Def(usize, Vec<W>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum N {
  X,
  Zero,
  Suc(Box<N>),
  Add(Box<N>, Box<N>),
}

fn im(a: W, b: W) -> W {
  W::Im(Box::new(a), Box::new(b))
}

impl std::fmt::Display for N {
  fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
    match self {
      N::X => f.write_str("x"),
      N::Zero => f.write_str("zero"),
      N::Suc(n) => write!(f, "(suc {n})"),
      N::Add(m, n) => write!(f, "(add {m} {n})"),
    }
  }
}

impl std::fmt::Display for W {
  fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
    match self {
      W::V(i) => write!(f, "{}", ["a", "b", "c"][*i as usize]),
      W::Im(a, b) => write!(f, "(im {a} {b})"),
      W::Not(a) => write!(f, "(not {a})"),
      W::AllEq(n) => write!(f, "(all x (eq {n} {n}))"),
      W::Def(k, args) => {
        write!(f, "(d{k}")?;
        args.iter().try_for_each(|a| write!(f, " {a}"))?;
        f.write_str(")")
      }
    }
  }
}

impl W {
  fn size(&self) -> usize {
    match self {
      W::V(_) | W::AllEq(_) => 1,
      W::Not(a) => 1 + a.size(),
      W::Im(a, b) => 1 + a.size() + b.size(),
      W::Def(_, args) => 1 + args.iter().map(W::size).sum::<usize>(),
    }
  }

  fn subst(&self, s: &[W]) -> W {
    match self {
      W::V(i) => s[*i as usize].clone(),
      W::Im(a, b) => im(a.subst(s), b.subst(s)),
      W::Not(a) => W::Not(Box::new(a.subst(s))),
      W::AllEq(n) => W::AllEq(n.clone()),
      W::Def(k, args) => W::Def(*k, args.iter().map(|a| a.subst(s)).collect()),
    }
  }
}

/// A proven fact inside a proof under construction.
struct Fact {
  proof: String,
  concl: W,
}

/// A generated theorem that later theorems may instantiate.
struct Lemma {
  name: String,
  concl: W,
}

/// Statements larger than this are not reused, so that sizes stay bounded.
const MAX_LEMMA: usize = 40;

struct Def {
  local: bool,
}

struct Gen {
  rng: ChaCha8Rng,
  out: String,
  lemmas: Vec<Lemma>,
  defs: Vec<Def>,
  count: usize,
}

impl Gen {
  fn wff(&mut self, depth: u32) -> W {
    self.wff_in(depth, true)
  }

  /// With `bound` false the result never mentions the name `x`, so it can be
  /// substituted for a metavariable that does not depend on `x`.
  fn wff_in(&mut self, depth: u32, bound: bool) -> W {
    if depth == 0 || self.rng.gen_bool(0.3) {
      return match self.rng.gen_range(0..8) {
        0 if bound => W::AllEq(Box::new(self.nat(2))),
        _ => W::V(self.rng.gen_range(0..3)),
      };
    }
    match self.rng.gen_range(0..5) {
      0 => W::Not(Box::new(self.wff_in(depth - 1, bound))),
      1 if !self.defs.is_empty() => {
        let k = self.rng.gen_range(0..self.defs.len());
        if self.defs[k].local {
          return self.wff_in(depth - 1, bound);
        }
        W::Def(k, vec![self.wff_in(depth - 1, bound), self.wff_in(depth - 1, bound)])
      }
      _ => im(self.wff_in(depth - 1, bound), self.wff_in(depth - 1, bound)),
    }
  }

  fn nat(&mut self, depth: u32) -> N {
    if depth == 0 || self.rng.gen_bool(0.4) {
      return if self.rng.gen_bool(0.5) { N::X } else { N::Zero };
    }
    match self.rng.gen_range(0..2) {
      0 => N::Suc(Box::new(self.nat(depth - 1))),
      _ => N::Add(Box::new(self.nat(depth - 1)), Box::new(self.nat(depth - 1))),
    }
  }

  fn base(&mut self, hyp: Option<&W>) -> Fact {
    let choice = self.rng.gen_range(0..10);
    if let (Some(h), 0..=2) = (hyp, choice) {
      return Fact { proof: "h".into(), concl: h.clone() };
    }
    if choice <= 5 && !self.lemmas.is_empty() {
      let j = self.rng.gen_range(self.lemmas.len().saturating_sub(50)..self.lemmas.len());
      let s: Vec<W> = (0..3).map(|_| self.wff_in(1, false)).collect();
      let l = &self.lemmas[j];
      let concl = l.concl.subst(&s);
      let proof = format!("({} x {} {} {} {concl})", l.name, s[0], s[1], s[2]);
      return Fact { proof, concl };
    }
    let (a, b) = (self.wff(2), self.wff(2));
    if self.rng.gen_bool(0.5) {
      let concl = im(a.clone(), im(b.clone(), a.clone()));
      Fact { proof: format!("(a1 {a} {b} {concl})"), concl }
    } else {
      let c = self.wff(1);
      let concl = im(
        im(a.clone(), im(b.clone(), c.clone())),
        im(im(a.clone(), b.clone()), im(a.clone(), c.clone())),
      );
      Fact { proof: format!("(a2 {a} {b} {c} {concl})"), concl }
    }
  }

  fn weaken(&mut self, f: Fact) -> Fact {
    let b = self.wff(2);
    let x = &f.concl;
    let next = im(b.clone(), x.clone());
    let proof =
      format!("(mp {x} {next} (a1 {x} {b} {}) {} {next})", im(x.clone(), next.clone()), f.proof);
    Fact { proof, concl: next }
  }

  /// `⊢ a → (b → c)` to `⊢ (a → b) → (a → c)`.
  fn distribute(&mut self, f: Fact) -> Fact {
    let W::Im(a, bc) = &f.concl else { return self.weaken(f) };
    let W::Im(b, c) = &**bc else { return self.weaken(f) };
    let (a, b, c) = (&**a, &**b, &**c);
    let next = im(im(a.clone(), b.clone()), im(a.clone(), c.clone()));
    let ax = im(f.concl.clone(), next.clone());
    let proof = format!("(mp {} {next} (a2 {a} {b} {c} {ax}) {} {next})", f.concl, f.proof);
    Fact { proof, concl: next }
  }

  fn derive(&mut self, hyp: Option<&W>) -> Fact {
    let mut f = self.base(hyp);
    for _ in 0..self.rng.gen_range(0..4) {
      f = if self.rng.gen_bool(0.5) { self.distribute(f) } else { self.weaken(f) };
    }
    f
  }

  fn theorem(&mut self) {
    let k = self.count;
    let local = self.rng.gen_bool(0.1);
    let kw = if local { "local theorem" } else { "theorem" };
    let hyp = self.rng.gen_bool(0.25).then(|| self.wff(2));
    let f = self.derive(hyp.as_ref());
    let hyps = hyp.as_ref().map(|h| format!("(h {h})")).unwrap_or_default();
    let binders = "[x nat] (a wff) (b wff) (c wff)";
    if self.rng.gen_bool(0.15) {
      // Generalize over the bound argument.
      let p = &f.concl;
      let concl = format!("(all x {p})");
      let proof = format!("(gen x {p} {} {concl})", f.proof);
      writeln!(self.out, "({kw} t{k} ({binders}) ({hyps}) {concl}\n  {proof})").unwrap();
    } else {
      writeln!(self.out, "({kw} t{k} ({binders}) ({hyps}) {}\n  {})", f.concl, f.proof).unwrap();
      if hyp.is_none() && f.concl.size() <= MAX_LEMMA {
        self.lemmas.push(Lemma { name: format!("t{k}"), concl: f.concl });
      }
    }
  }

  /// A definition whose body is a known theorem schema, followed by a
  /// theorem proving an instance of it by unfolding.
  fn definition(&mut self) {
    let k = self.defs.len();
    let local = self.rng.gen_bool(0.2);
    let f = self.derive(None);
    // Abstract over `a` and `b` only; `c` is fixed to `a`.
    let body = f.concl.subst(&[W::V(0), W::V(1), W::V(0)]);
    let proof = f.proof.clone();
    let kw = if local { "local def" } else { "def" };
    writeln!(self.out, "({kw} d{k} ((a wff) (b wff)) wff ([x nat]) {body})").unwrap();
    self.defs.push(Def { local });
    self.count += 1;
    let t = self.count;
    let kw = if local { "local theorem" } else { "theorem" };
    let lhs = W::Def(k, vec![W::V(0), W::V(1)]);
    if body == f.concl {
      writeln!(
        self.out,
        "({kw} t{t} ((a wff) (b wff) (c wff)) () {lhs} ([x nat])\n  (:conv {lhs} (:unfold {lhs} {body} :refl) {proof}))"
      )
      .unwrap();
    } else {
      // The derivation used `c`; restate it with `c := a` via a lemma.
      let s = format!("([x nat] (a wff) (b wff) (c wff)) () {}", f.concl);
      writeln!(self.out, "(local theorem t{t}_s {s} {proof})").unwrap();
      let inst = format!("(t{t}_s x a b a {body})");
      writeln!(
        self.out,
        "({kw} t{t} ((a wff) (b wff)) () {lhs} ([x nat])\n  (:conv {lhs} (:unfold {lhs} {body} :refl) {inst}))"
      )
      .unwrap();
      self.count += 1;
    }
  }

  /// A definition with a dummy variable and a theorem about it.
  fn dummy_definition(&mut self) {
    let k = self.defs.len();
    let body = im(W::V(0), W::AllEq(Box::new(N::X)));
    writeln!(self.out, "(def d{k} ((a wff) (b wff)) wff ([x nat]) {body})").unwrap();
    self.defs.push(Def { local: false });
    self.count += 1;
    let t = self.count;
    let all = W::AllEq(Box::new(N::X));
    let fact = format!("(gen x (eq x x) (eqid x (eq x x)) {all})");
    let weak =
      format!("(mp {all} {body} (a1 {all} a {}) {fact} {body})", im(all.clone(), body.clone()));
    let lhs = W::Def(k, vec![W::V(0), W::V(1)]);
    writeln!(
      self.out,
      "(theorem t{t} ((a wff) (b wff)) () {lhs} ([x nat])\n  (:conv {lhs} (:unfold {lhs} {body} :refl) {weak}))"
    )
    .unwrap();
  }
}

/// A random development with at least `decls` declarations in total
/// (including the prelude).
pub fn generate(decls: usize, seed: u64) -> String {
  let mut g = Gen {
    rng: ChaCha8Rng::seed_from_u64(seed),
    out: PRELUDE.to_string(),
    lemmas: vec![],
    defs: vec![],
    count: 0,
  };
  let mut n = PRELUDE_DECLS;
  while n < decls {
    let start = g.out.len();
    match [0, 0, 0, 0, 0, 0, 0, 1, 1, 2].choose(&mut g.rng) {
      Some(1) => g.definition(),
      Some(2) => g.dummy_definition(),
      _ => g.theorem(),
    }
    g.count += 1;
    n += g.out[start..].lines().filter(|l| l.starts_with('(')).count();
  }
  g.out
}

fn numeral(n: usize) -> String {
  let mut s = "zero".to_string();
  for _ in 0..n {
    s = format!("(suc {s})");
  }
  s
}

/// The large-numeral family: an axiom `T: ⊢ a * n̄ = 0` whose statement
/// has size `numeral`, applied `uses` times inside one theorem. Each
/// application replays the whole statement, while the proof only builds the
/// numeral once.
pub fn adversarial(numeral_size: usize, uses: usize) -> String {
  let num = numeral(numeral_size);
  let mut out = String::from(
    "(sort wff provable)\n(sort nat)\n(term zero () nat)\n(term suc ((n nat)) nat)\n\
     (term mul ((m nat) (n nat)) nat)\n(term eq ((m nat) (n nat)) wff)\n\
     (axiom keep ((p wff) (q wff)) ((h1 p) (h2 q)) q)\n",
  );
  writeln!(out, "(axiom T ((a nat)) () (eq (mul a {num}) zero))").unwrap();
  let arg = |i: usize| {
    let mut s = "a".to_string();
    for _ in 0..i {
      s = format!("(suc {s})");
    }
    s
  };
  let stmt = |i: usize| format!("(eq (mul {} {num}) zero)", arg(i));
  let mut proof = format!("(T {} {})", arg(uses), stmt(uses));
  for i in (1..uses).rev() {
    proof = format!(
      "(keep {} {} (T {} {}) {proof} {})",
      stmt(i),
      stmt(uses),
      arg(i),
      stmt(i),
      stmt(uses)
    );
  }
  writeln!(out, "(theorem U ((a nat)) () {}\n  {proof})", stmt(uses)).unwrap();
  out
}
