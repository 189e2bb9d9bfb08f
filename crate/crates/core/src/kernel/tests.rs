use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;

/// sorts: var, wff (provable strict); terms: im, all, eq, ex.
fn logic() -> Environment {
  let mut env = Environment::new();
  let var = env.add_sort("var", Modifiers::empty()).unwrap();
  let wff = env.add_sort("wff", Modifiers::PROVABLE | Modifiers::STRICT).unwrap();
  let meta = |s| Binder::metavar(s, VarSet::EMPTY);
  env
    .add_term(TermDecl {
      name: "im".into(),
      args: vec![meta(wff), meta(wff)],
      var_names: vec!["a".into(), "b".into()],
      ret: meta(wff),
      def: Definiens::None,
    })
    .unwrap();
  for name in ["all", "ex"] {
    env
      .add_term(TermDecl {
        name: name.into(),
        args: vec![Binder::name(var, 0), Binder::metavar(wff, VarSet::single(0))],
        var_names: vec!["x".into(), "ph".into()],
        ret: meta(wff),
        def: Definiens::None,
      })
      .unwrap();
  }
  env
    .add_term(TermDecl {
      name: "eq".into(),
      args: vec![meta(var), meta(var)],
      var_names: vec!["a".into(), "b".into()],
      ret: meta(wff),
      def: Definiens::None,
    })
    .unwrap();
  env
}

const VAR: SortId = SortId(0);
const WFF: SortId = SortId(1);
const IM: TermId = TermId(0);
const ALL: TermId = TermId(1);
const EQ: TermId = TermId(3);

fn app(t: TermId, args: Vec<Expr>) -> Expr {
  Expr::App(t, args)
}
fn v(i: u32) -> Expr {
  Expr::Var(i)
}

fn preload(store: &mut Store, ctx: &[Binder]) -> Vec<ExprId> {
  ctx
    .iter()
    .enumerate()
    .map(|(i, b)| store.preload_var(i as u32, b.is_name(), b.sort(), b.deps()).unwrap())
    .collect()
}

fn build(env: &Environment, store: &mut Store, ctx: &[Binder], e: &Expr) -> ExprId {
  let vars = preload(store, ctx);
  substitute(store, env, e, &vars).unwrap()
}

// Independent oracle: Fig. 1's V and FV equations over trees, with sets of
// context indices instead of bitsets.
fn oracle_v(ctx: &[Binder], e: &Expr) -> BTreeSet<usize> {
  match e {
    Expr::Var(i) => {
      let b = ctx[*i as usize];
      if b.is_name() {
        [*i as usize].into()
      } else {
        name_indices(ctx, b.deps())
      }
    }
    Expr::App(_, args) => args.iter().flat_map(|a| oracle_v(ctx, a)).collect(),
  }
}

fn name_indices(ctx: &[Binder], deps: VarSet) -> BTreeSet<usize> {
  let names: Vec<usize> = (0..ctx.len()).filter(|&i| ctx[i].is_name()).collect();
  deps.iter().map(|k| names[k]).collect()
}

fn oracle_fv(env: &Environment, ctx: &[Binder], e: &Expr) -> BTreeSet<usize> {
  match e {
    Expr::Var(_) => oracle_v(ctx, e),
    Expr::App(t, args) => {
      let decl = env.term(*t);
      let name_arg = |k: usize| {
        let i = (0..decl.args.len()).filter(|&i| decl.args[i].is_name()).nth(k).unwrap();
        match &args[i] {
          Expr::Var(x) => *x as usize,
          _ => unreachable!(),
        }
      };
      let mut out: BTreeSet<usize> = decl.ret.deps().iter().map(name_arg).collect();
      for (j, b) in decl.args.iter().enumerate() {
        if !b.is_name() {
          let bound: BTreeSet<usize> = b.deps().iter().map(name_arg).collect();
          out.extend(oracle_fv(env, ctx, &args[j]).difference(&bound));
        }
      }
      out
    }
  }
}

fn to_bits(ctx: &[Binder], s: &BTreeSet<usize>) -> VarSet {
  s.iter().fold(VarSet::EMPTY, |acc, &i| acc.union(ctx[i].deps()))
}

#[test]
fn fv_of_binder_excludes_bound_name() {
  let env = logic();
  let ctx = [Binder::name(VAR, 0), Binder::metavar(WFF, VarSet::single(0))];
  let mut store = Store::with_interning();
  let e = build(&env, &mut store, &ctx, &app(ALL, vec![v(0), v(1)]));
  assert_eq!(compute_vars(&mut store, &env, e, VarMode::FV).unwrap(), VarSet::EMPTY);
  assert_eq!(compute_vars(&mut store, &env, e, VarMode::V).unwrap(), VarSet::single(0));
}

#[test]
fn fv_of_lone_name() {
  let env = logic();
  let ctx = [Binder::name(VAR, 0)];
  let mut store = Store::new();
  let e = build(&env, &mut store, &ctx, &v(0));
  assert_eq!(compute_vars(&mut store, &env, e, VarMode::FV).unwrap(), VarSet::single(0));
  assert_eq!(compute_vars(&mut store, &env, e, VarMode::V).unwrap(), VarSet::single(0));
}

#[test]
fn vars_of_implication_with_equality() {
  let env = logic();
  let ctx = [Binder::name(VAR, 0), Binder::name(VAR, 1), Binder::metavar(WFF, VarSet::single(0))];
  let e = app(IM, vec![app(EQ, vec![v(0), v(1)]), v(2)]);
  let xy: BTreeSet<usize> = [0, 1].into();
  assert_eq!(oracle_v(&ctx, &e), xy);
  assert_eq!(oracle_fv(&env, &ctx, &e), xy);
  let mut store = Store::new();
  let id = build(&env, &mut store, &ctx, &e);
  let bits = VarSet::from_bits(0b11).unwrap();
  assert_eq!(compute_vars(&mut store, &env, id, VarMode::V).unwrap(), bits);
  assert_eq!(compute_vars(&mut store, &env, id, VarMode::FV).unwrap(), bits);
}

#[test]
fn infer_sort_examples() {
  let env = logic();
  let ab = [Binder::metavar(WFF, VarSet::EMPTY), Binder::metavar(WFF, VarSet::EMPTY)];
  assert_eq!(infer_sort(&env, BinderSlice::Owned(&ab), &app(IM, vec![v(0), v(1)])), Ok(WFF));
  let xph = [Binder::name(VAR, 0), Binder::metavar(WFF, VarSet::single(0))];
  assert_eq!(infer_sort(&env, BinderSlice::Owned(&xph), &app(ALL, vec![v(0), v(1)])), Ok(WFF));
  let a = [Binder::metavar(WFF, VarSet::EMPTY)];
  assert_eq!(
    infer_sort(&env, BinderSlice::Owned(&a), &app(ALL, vec![v(0), v(0)])),
    Err(KernelError::NameExpected(0))
  );
  assert!(matches!(
    infer_sort(&env, BinderSlice::Owned(&a), &app(IM, vec![v(0)])),
    Err(KernelError::ArityMismatch { expected: 2, found: 1, .. })
  ));
  assert_eq!(
    infer_sort(&env, BinderSlice::Owned(&a), &app(TermId(9), vec![])),
    Err(KernelError::UnknownTerm(TermId(9)))
  );
}

#[test]
fn check_args_examples() {
  assert_eq!(check_args(BinderSlice::Owned(&[]), &[]), Ok(()));
  let target = [Binder::name(VAR, 0), Binder::metavar(WFF, VarSet::single(0))];
  let y = ArgView { sort: VAR, name: true, vars: VarSet::single(3) };
  let e = ArgView { sort: WFF, name: false, vars: VarSet::EMPTY };
  assert_eq!(check_args(BinderSlice::Owned(&target), &[y, e]), Ok(()));
  let wrong = ArgView { sort: WFF, name: true, vars: VarSet::single(1) };
  assert_eq!(
    check_args(BinderSlice::Owned(&target), &[wrong, e]),
    Err(KernelError::SortMismatch { pos: 0, expected: VAR, found: WFF })
  );
  assert_eq!(check_args(BinderSlice::Owned(&target), &[e, e]), Err(KernelError::NameExpected(0)));
}

#[test]
fn check_disjoint_examples() {
  let env = logic();
  // proof context: names y z
  let ctx = [Binder::name(VAR, 0), Binder::name(VAR, 1)];
  let mut store = Store::with_interning();
  let vars = preload(&mut store, &ctx);
  let eq_yy = substitute(&mut store, &env, &app(EQ, vec![v(0), v(0)]), &vars).unwrap();
  let eq_zz = substitute(&mut store, &env, &app(EQ, vec![v(1), v(1)]), &vars).unwrap();
  let target = [Binder::name(VAR, 0), Binder::metavar(WFF, VarSet::EMPTY)];
  let view = |e| ArgView::of(&store, e);
  assert_eq!(
    check_disjoint(BinderSlice::Owned(&target), &[view(vars[0]), view(eq_yy)]),
    Err(KernelError::DisjointViolation(0, 1))
  );
  assert_eq!(check_disjoint(BinderSlice::Owned(&target), &[view(vars[0]), view(eq_zz)]), Ok(()));
  // declared dependency lifts the restriction
  let dep = [Binder::name(VAR, 0), Binder::metavar(WFF, VarSet::single(0))];
  assert_eq!(check_disjoint(BinderSlice::Owned(&dep), &[view(vars[0]), view(eq_yy)]), Ok(()));
  let two = [Binder::name(VAR, 0), Binder::name(VAR, 1)];
  assert_eq!(
    check_disjoint(BinderSlice::Owned(&two), &[view(vars[0]), view(vars[0])]),
    Err(KernelError::DisjointViolation(0, 1))
  );
}

#[test]
fn substitute_examples() {
  let env = logic();
  let mut store = Store::with_interning();
  let ab = [Binder::metavar(WFF, VarSet::EMPTY), Binder::metavar(WFF, VarSet::EMPTY)];
  let vars = preload(&mut store, &ab);
  assert_eq!(substitute(&mut store, &env, &v(0), &[vars[1]]), Ok(vars[1]));
  let im_b_a = substitute(&mut store, &env, &app(IM, vec![v(1), v(0)]), &vars).unwrap();
  let got = substitute(&mut store, &env, &app(IM, vec![v(0), v(1)]), &[vars[0], im_b_a]).unwrap();
  let want =
    substitute(&mut store, &env, &app(IM, vec![v(0), app(IM, vec![v(1), v(0)])]), &vars).unwrap();
  assert_eq!(got, want, "interning makes structurally equal results identical");
}

fn tree_subst(e: &Expr, s: &[Expr]) -> Expr {
  match e {
    Expr::Var(i) => s[*i as usize].clone(),
    Expr::App(t, args) => Expr::App(*t, args.iter().map(|a| tree_subst(a, s)).collect()),
  }
}

#[test]
fn nested_substitution_composes() {
  let env = logic();
  let ab = [Binder::metavar(WFF, VarSet::EMPTY), Binder::metavar(WFF, VarSet::EMPTY)];
  // 5-node target
  let target = app(IM, vec![app(IM, vec![v(0), v(1)]), v(0)]);
  let s1 = [app(IM, vec![v(1), v(1)]), v(0)];
  let s2 = [v(1), app(IM, vec![v(0), v(1)])];
  let composed: Vec<Expr> = s1.iter().map(|e| tree_subst(e, &s2)).collect();
  let oracle = tree_subst(&target, &composed);
  let mut store = Store::with_interning();
  let vars = preload(&mut store, &ab);
  let inner: Vec<ExprId> =
    s2.iter().map(|e| substitute(&mut store, &env, e, &vars).unwrap()).collect();
  let mid: Vec<ExprId> =
    s1.iter().map(|e| substitute(&mut store, &env, e, &inner).unwrap()).collect();
  let got = substitute(&mut store, &env, &target, &mid).unwrap();
  let want = substitute(&mut store, &env, &oracle, &vars).unwrap();
  assert_eq!(got, want);
}

#[test]
fn environment_rejects_bad_declarations() {
  let mut env = logic();
  // def with a stray free name
  let bad = TermDecl {
    name: "bad".into(),
    args: vec![Binder::name(VAR, 0), Binder::name(VAR, 1)],
    var_names: vec!["x".into(), "y".into()],
    ret: Binder::metavar(WFF, VarSet::single(0)),
    def: Definiens::Some { dummies: vec![], dummy_names: vec![], body: app(EQ, vec![v(0), v(1)]) },
  };
  assert_eq!(env.add_term(bad), Err(KernelError::DefFreeVars(VarSet::single(1))));
  let dummy = TermDecl {
    name: "tru".into(),
    args: vec![],
    var_names: vec![],
    ret: Binder::metavar(WFF, VarSet::EMPTY),
    def: Definiens::Some {
      dummies: vec![Binder::name(VAR, 0)],
      dummy_names: vec!["x".into()],
      body: app(ALL, vec![v(0), app(EQ, vec![v(0), v(0)])]),
    },
  };
  assert!(env.add_term(dummy).is_ok());
  let pure = env.add_sort("nat", Modifiers::PURE).unwrap();
  let t = TermDecl {
    name: "zero".into(),
    args: vec![],
    var_names: vec![],
    ret: Binder::metavar(pure, VarSet::EMPTY),
    def: Definiens::None,
  };
  assert_eq!(env.add_term(t), Err(KernelError::TermInPureSort(pure)));
  let strict_name = ThmDecl {
    name: "t".into(),
    args: vec![Binder::name(WFF, 0)],
    var_names: vec!["x".into()],
    hyps: vec![],
    hyp_names: vec![],
    concl: v(0),
    axiom: true,
  };
  assert_eq!(env.add_thm(strict_name), Err(KernelError::NameInStrictSort(0)));
  let unprovable = ThmDecl {
    name: "t".into(),
    args: vec![Binder::name(VAR, 0)],
    var_names: vec!["x".into()],
    hyps: vec![],
    hyp_names: vec![],
    concl: v(0),
    axiom: true,
  };
  assert_eq!(env.add_thm(unprovable), Err(KernelError::NotProvable(VAR)));
}

// proof context used by the property tests: names x y z, metavars
// ph: wff x, ps: wff, ch: wff x y
fn prop_ctx() -> Vec<Binder> {
  vec![
    Binder::name(VAR, 0),
    Binder::name(VAR, 1),
    Binder::name(VAR, 2),
    Binder::metavar(WFF, VarSet::single(0)),
    Binder::metavar(WFF, VarSet::EMPTY),
    Binder::metavar(WFF, VarSet::from_bits(0b11).unwrap()),
  ]
}

fn arb_name() -> impl Strategy<Value = Expr> {
  (0u32..3).prop_map(Expr::Var)
}

fn arb_wff() -> impl Strategy<Value = Expr> {
  let leaf = prop_oneof![
    (3u32..6).prop_map(Expr::Var),
    (arb_name(), arb_name()).prop_map(|(a, b)| app(EQ, vec![a, b]))
  ];
  leaf.prop_recursive(5, 40, 2, |inner| {
    prop_oneof![
      (inner.clone(), inner.clone()).prop_map(|(a, b)| app(IM, vec![a, b])),
      (arb_name(), inner.clone()).prop_map(|(x, a)| app(ALL, vec![x, a])),
      (arb_name(), inner).prop_map(|(x, a)| app(TermId(2), vec![x, a])),
    ]
  })
}

fn arb_im_tree() -> impl Strategy<Value = Expr> {
  (0u32..3)
    .prop_map(Expr::Var)
    .prop_recursive(4, 20, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| app(IM, vec![a, b])))
}

fn occurring_vars(e: &Expr, out: &mut BTreeSet<u32>) {
  match e {
    Expr::Var(i) => {
      out.insert(*i);
    }
    Expr::App(_, args) => args.iter().for_each(|a| occurring_vars(a, out)),
  }
}

proptest! {
  #[test]
  fn fv_subset_of_v(e in arb_wff()) {
    let env = logic();
    let ctx = prop_ctx();
    let mut store = Store::new();
    let id = build(&env, &mut store, &ctx, &e);
    let vs = compute_vars(&mut store, &env, id, VarMode::V).unwrap();
    let fv = compute_vars(&mut store, &env, id, VarMode::FV).unwrap();
    prop_assert!(fv.is_subset(vs));
    prop_assert_eq!(vs, to_bits(&ctx, &oracle_v(&ctx, &e)));
    prop_assert_eq!(fv, to_bits(&ctx, &oracle_fv(&env, &ctx, &e)));
    prop_assert_eq!(infer_sort(&env, BinderSlice::Owned(&ctx), &e), Ok(WFF));
  }

  #[test]
  fn disjoint_matches_brute_force(
    kinds in proptest::collection::vec((any::<bool>(), 0u64..64), 1..=6),
    names in proptest::collection::vec(0u32..3, 6),
    wffs in proptest::collection::vec(arb_wff(), 6),
  ) {
    let env = logic();
    let ctx = prop_ctx();
    let mut target = vec![];
    let mut k = 0;
    for &(is_name, deps) in &kinds {
      if is_name {
        target.push(Binder::name(VAR, k));
        k += 1;
      } else {
        let mask = (1u64 << k) - 1;
        target.push(Binder::metavar(WFF, VarSet::from_bits(deps & mask).unwrap()));
      }
    }
    let subst: Vec<Expr> = target.iter().enumerate()
      .map(|(i, b)| if b.is_name() { Expr::Var(names[i]) } else { wffs[i].clone() })
      .collect();
    let mut store = Store::with_interning();
    let vars = preload(&mut store, &ctx);
    let ids: Vec<ExprId> = subst.iter().map(|e| substitute(&mut store, &env, e, &vars).unwrap()).collect();
    let views: Vec<ArgView> = ids.iter().map(|&e| ArgView::of(&store, e)).collect();
    prop_assert_eq!(check_args(BinderSlice::Owned(&target), &views), Ok(()));
    let got = check_disjoint(BinderSlice::Owned(&target), &views).is_ok();
    // brute force over all pairs
    let tnames: Vec<usize> = (0..target.len()).filter(|&i| target[i].is_name()).collect();
    let mut ok = true;
    for (ord, &i) in tnames.iter().enumerate() {
      let Expr::Var(x) = subst[i] else { unreachable!() };
      for j in 0..target.len() {
        if j == i { continue }
        let forbidden = target[j].is_name() || !target[j].deps().contains(ord);
        if forbidden && oracle_v(&ctx, &subst[j]).contains(&(x as usize)) {
          ok = false;
        }
      }
    }
    prop_assert_eq!(got, ok);
  }

  #[test]
  fn substitution_commutes_with_v(target in arb_im_tree(), s in proptest::collection::vec(arb_wff(), 3)) {
    // target over three plain metavariables, substituted by wffs over prop_ctx
    let env = logic();
    let ctx = prop_ctx();
    let mut store = Store::with_interning();
    let vars = preload(&mut store, &ctx);
    let sub: Vec<ExprId> = s.iter().map(|x| substitute(&mut store, &env, x, &vars).unwrap()).collect();
    let got = substitute(&mut store, &env, &target, &sub).unwrap();
    let mut occ = BTreeSet::new();
    occurring_vars(&target, &mut occ);
    let want = occ.iter().fold(VarSet::EMPTY, |acc, &i| acc.union(store.vars(sub[i as usize])));
    prop_assert_eq!(store.vars(got), want);
  }
}
