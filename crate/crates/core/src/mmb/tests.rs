use proptest::prelude::*;

use super::*;
use crate::kernel::VarSet;

fn minimal() -> Vec<u8> {
  write_file(&Payload::default()).unwrap()
}

#[test]
fn minimal_file_is_40_bytes() {
  let bytes = minimal();
  assert_eq!(bytes.len(), 40);
  let f = MmbFile::parse(&bytes).unwrap();
  assert_eq!((f.num_sorts(), f.num_terms(), f.num_thms()), (0, 0, 0));
  assert_eq!(f.decls().count(), 0);
  assert!(f.names().is_none());
}

#[test]
fn header_errors() {
  let good = minimal();
  assert_eq!(MmbFile::parse(b"MM0").unwrap_err(), MmbError::TruncatedFile { offset: 3 });
  let mut b = good.clone();
  b[0] = b'X';
  assert_eq!(MmbFile::parse(&b).unwrap_err(), MmbError::BadMagic);
  let mut b = good.clone();
  b[4] = 2;
  assert_eq!(MmbFile::parse(&b).unwrap_err(), MmbError::BadVersion(2));
  assert_eq!(MmbFile::parse(&good[..39]).unwrap_err(), MmbError::TruncatedFile { offset: 39 });
  // term table pointer past the end, with one term claimed
  let mut b = good.clone();
  b[8] = 1;
  b[16..20].copy_from_slice(&100u32.to_le_bytes());
  assert_eq!(
    MmbFile::parse(&b).unwrap_err(),
    MmbError::OffsetOutOfBounds { field: "term table", offset: 100 }
  );
  let mut b = good.clone();
  b[24..28].copy_from_slice(&41u32.to_le_bytes());
  assert!(matches!(
    MmbFile::parse(&b),
    Err(MmbError::OffsetOutOfBounds { field: "declaration stream", .. })
  ));
  let mut b = good;
  b[5] = 1;
  b.push(0x10);
  assert_eq!(MmbFile::parse(&b).unwrap_err(), MmbError::BadModifiers(40));
}

fn sample() -> Payload {
  let wff = SortId(0);
  let meta = Binder::metavar(wff, VarSet::EMPTY);
  Payload {
    sorts: vec![Modifiers::PROVABLE],
    terms: vec![TermPayload { args: vec![meta, meta], ret: meta, unify: None }],
    thms: vec![ThmPayload {
      args: vec![meta],
      num_hyps: 0,
      unify: encode_unify_stream(&[UnifyOp::Ref(0)]),
    }],
    decls: vec![
      DeclPayload { kind: DeclKind::Sort, local: false, proof: vec![] },
      DeclPayload { kind: DeclKind::Term, local: false, proof: vec![] },
      DeclPayload {
        kind: DeclKind::Axiom,
        local: false,
        proof: encode_proof_stream(&[ProofOp::Ref(0)]),
      },
    ],
    names: Some(vec![
      (NameKind::Term, 0, "im".into()),
      (NameKind::Sort, 0, "wff".into()),
      (NameKind::Thm, 0, "ax".into()),
    ]),
  }
}

#[test]
fn sample_round_trip_and_names() {
  let p = sample();
  let bytes = write_file(&p).unwrap();
  let f = MmbFile::parse(&bytes).unwrap();
  assert_eq!(f.lookup_name(NameKind::Term, 0), Some("im"));
  assert_eq!(f.lookup_name(NameKind::Thm, 0), Some("ax"));
  assert_eq!(f.lookup_name(NameKind::Thm, 1), None);
  let back = read_payload(&f).unwrap();
  let mut sorted = p.clone();
  sorted.names.as_mut().unwrap().sort_by_key(|e| (e.0, e.1));
  assert_eq!(back, sorted);
  let decls: Vec<_> = f.decls().map(|d| d.unwrap().kind).collect();
  assert_eq!(decls, [DeclKind::Sort, DeclKind::Term, DeclKind::Axiom]);
}

#[test]
fn stripped_file_has_no_names() {
  let mut p = sample();
  p.names = None;
  let bytes = write_file(&p).unwrap();
  let f = MmbFile::parse(&bytes).unwrap();
  for id in 0..4 {
    assert_eq!(f.lookup_name(NameKind::Term, id), None);
  }
  // stripping equals truncating at the index and zeroing the pointer
  let full = write_file(&sample()).unwrap();
  let g = MmbFile::parse(&full).unwrap();
  let mut cut = full[..g.header.p_index as usize].to_vec();
  cut[32..40].fill(0);
  assert_eq!(cut, bytes);
}

#[test]
fn decl_stream_errors() {
  let mut bytes = write_file(&Payload { names: None, ..sample() }).unwrap();
  let f = MmbFile::parse(&bytes).unwrap();
  let p = f.header.p_decls as usize;
  bytes[p] = 0x09; // local sort
  let f = MmbFile::parse(&bytes).unwrap();
  assert_eq!(f.decls().next(), Some(Err(MmbError::BadDecl(p))));
  bytes[p] = 1;
  bytes[p + 1] = 0xff;
  let f = MmbFile::parse(&bytes).unwrap();
  assert_eq!(f.decls().next(), Some(Err(MmbError::BadDecl(p))));
}

#[test]
fn bad_binders_rejected() {
  let wff = SortId(0);
  let mut p = sample();
  // name with the wrong ordinal bit
  p.terms[0].args = vec![Binder::from_raw(1 << 63 | 2)];
  let bytes = write_file(&p).unwrap();
  let f = MmbFile::parse(&bytes).unwrap();
  assert!(matches!(f.term(0), Err(MmbError::BadBinder(_))));
  // metavar depending on a name that does not exist
  p.terms[0].args = vec![Binder::metavar(wff, VarSet::single(0))];
  let bytes = write_file(&p).unwrap();
  let f = MmbFile::parse(&bytes).unwrap();
  assert!(matches!(f.term(0), Err(MmbError::BadBinder(_))));
  assert!(matches!(f.term(1), Err(MmbError::OffsetOutOfBounds { .. })));
}

#[test]
fn limits() {
  let p = Payload { sorts: vec![Modifiers::empty(); 129], ..Payload::default() };
  assert_eq!(write_file(&p), Err(MmbError::LimitExceeded("sort count")));
  let names = Some(vec![(NameKind::Sort, 0, "a".into()), (NameKind::Sort, 0, "b".into())]);
  assert!(write_file(&Payload { names, ..Payload::default() }).is_err());
}

prop_compose! {
  fn arb_binders()(spec in proptest::collection::vec((any::<bool>(), 0u8..3, any::<u64>()), 0..6)) -> Vec<Binder> {
    let mut k = 0;
    spec.into_iter().map(|(name, s, deps)| {
      if name {
        k += 1;
        Binder::name(SortId(s), k - 1)
      } else {
        Binder::metavar(SortId(s), VarSet::from_bits(deps & ((1 << k) - 1)).unwrap())
      }
    }).collect()
  }
}

fn arb_unify() -> impl Strategy<Value = Vec<u8>> {
  proptest::collection::vec((0usize..6, any::<u32>()), 0..8).prop_map(|ops| {
    encode_unify_stream(
      &ops.into_iter().map(|(i, imm)| UnifyOp::all(imm)[i + 1]).collect::<Vec<_>>(),
    )
  })
}

fn arb_proof() -> impl Strategy<Value = Vec<u8>> {
  proptest::collection::vec((0usize..15, any::<u32>()), 0..8).prop_map(|ops| {
    encode_proof_stream(
      &ops.into_iter().map(|(i, imm)| ProofOp::all(imm)[i + 1]).collect::<Vec<_>>(),
    )
  })
}

fn arb_payload() -> impl Strategy<Value = Payload> {
  let term =
    (arb_binders(), 0u8..3, proptest::option::of(arb_unify())).prop_map(|(args, s, unify)| {
      let names = args.iter().filter(|b| b.is_name()).count();
      TermPayload {
        args,
        ret: Binder::metavar(SortId(s), VarSet::from_bits((1 << names) - 1).unwrap()),
        unify,
      }
    });
  let thm = (arb_binders(), 0u16..4, arb_unify()).prop_map(|(args, num_hyps, unify)| ThmPayload {
    args,
    num_hyps,
    unify,
  });
  let decl = (1u8..6, any::<bool>(), arb_proof()).prop_map(|(k, local, proof)| {
    let (kind, _) = DeclKind::from_byte(k).unwrap();
    let local = local && matches!(kind, DeclKind::Def | DeclKind::Thm);
    DeclPayload { kind, local, proof: if kind.has_proof() { proof } else { vec![] } }
  });
  let names = proptest::option::of(proptest::collection::btree_map(
    (0u8..3, 0u32..10),
    "[a-z_][a-z0-9_.]{0,8}",
    0..10,
  ));
  (
    proptest::collection::vec(0u8..16, 0..4),
    proptest::collection::vec(term, 0..5),
    proptest::collection::vec(thm, 0..5),
    proptest::collection::vec(decl, 0..8),
    names,
  )
    .prop_map(|(sorts, terms, thms, decls, names)| Payload {
      sorts: sorts.into_iter().map(|b| Modifiers::from_bits(b).unwrap()).collect(),
      terms,
      thms,
      decls,
      names: names.map(|m| {
        m.into_iter()
          .map(|((k, id), s)| ([NameKind::Sort, NameKind::Term, NameKind::Thm][k as usize], id, s))
          .collect::<Vec<_>>()
      }),
    })
}

proptest! {
  #![proptest_config(ProptestConfig::with_cases(256))]

  #[test]
  fn write_parse_write_is_identity(p in arb_payload()) {
    let bytes = write_file(&p).unwrap();
    let f = MmbFile::parse(&bytes).unwrap();
    let back = read_payload(&f).unwrap();
    let mut want = p.clone();
    if let Some(n) = &mut want.names {
      n.sort_by_key(|e| (e.0, e.1));
    }
    prop_assert_eq!(&back, &want);
    prop_assert_eq!(write_file(&back).unwrap(), bytes);
  }

  #[test]
  fn random_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
    let mut b = minimal();
    b.extend(&bytes);
    for input in [&bytes[..], &b[..]] {
      if let Ok(f) = MmbFile::parse(input) {
        let _ = read_payload(&f);
      }
    }
  }
}
