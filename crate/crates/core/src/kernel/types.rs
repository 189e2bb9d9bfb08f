//! Identifiers, sort modifiers, binder records and variable sets.

use std::fmt;

use bitflags::bitflags;

/// Maximum number of bound variables (names plus dummies) in one declaration.
pub const MAX_BOUND_VARS: usize = 56;
/// Maximum number of sorts in an environment.
pub const MAX_SORTS: usize = 128;

/// Index of a sort, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SortId(pub u8);

/// Index of a term constructor or definition, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

/// Index of an axiom or theorem, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThmId(pub u32);

impl fmt::Display for SortId {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "s{}", self.0)
  }
}
impl fmt::Display for TermId {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "t{}", self.0)
  }
}
impl fmt::Display for ThmId {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "T{}", self.0)
  }
}

bitflags! {
  /// Sort modifiers. The byte value is the on-disk encoding.
  #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
  pub struct Modifiers: u8 {
    /// No term constructors or definitions may return this sort.
    const PURE = 1;
    /// The sort cannot be used for names.
    const STRICT = 2;
    /// Expressions of this sort can be asserted.
    const PROVABLE = 4;
    /// The sort cannot be used for dummy variables.
    const FREE = 8;
  }
}

impl Modifiers {
  /// Keyword spelling, in canonical order.
  pub fn keywords(self) -> impl Iterator<Item = &'static str> {
    [
      (Self::PURE, "pure"),
      (Self::STRICT, "strict"),
      (Self::PROVABLE, "provable"),
      (Self::FREE, "free"),
    ]
    .into_iter()
    .filter(move |(m, _)| self.contains(*m))
    .map(|(_, s)| s)
  }

  pub fn from_keyword(s: &str) -> Option<Self> {
    Some(match s {
      "pure" => Self::PURE,
      "strict" => Self::STRICT,
      "provable" => Self::PROVABLE,
      "free" => Self::FREE,
      _ => return None,
    })
  }
}

/// A set of bound variables, as a 56-bit bitset indexed by name ordinal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VarSet(u64);

impl VarSet {
  pub const EMPTY: VarSet = VarSet(0);
  pub const MASK: u64 = (1 << MAX_BOUND_VARS) - 1;

  /// Builds a set from raw bits; returns `None` if bits above 55 are set.
  pub fn from_bits(bits: u64) -> Option<VarSet> {
    if bits & !Self::MASK == 0 {
      Some(VarSet(bits))
    } else {
      None
    }
  }

  pub fn single(k: usize) -> VarSet {
    debug_assert!(k < MAX_BOUND_VARS);
    VarSet(1 << k)
  }

  pub fn bits(self) -> u64 {
    self.0
  }
  pub fn is_empty(self) -> bool {
    self.0 == 0
  }
  pub fn len(self) -> u32 {
    self.0.count_ones()
  }
  pub fn contains(self, k: usize) -> bool {
    k < MAX_BOUND_VARS && self.0 & (1 << k) != 0
  }
  pub fn union(self, o: VarSet) -> VarSet {
    VarSet(self.0 | o.0)
  }
  pub fn inter(self, o: VarSet) -> VarSet {
    VarSet(self.0 & o.0)
  }
  pub fn minus(self, o: VarSet) -> VarSet {
    VarSet(self.0 & !o.0)
  }
  pub fn intersects(self, o: VarSet) -> bool {
    self.0 & o.0 != 0
  }
  pub fn is_subset(self, o: VarSet) -> bool {
    self.0 & !o.0 == 0
  }

  /// Iterates the member ordinals in increasing order.
  pub fn iter(self) -> impl Iterator<Item = usize> {
    let mut bits = self.0;
    std::iter::from_fn(move || {
      if bits == 0 {
        return None;
      }
      let k = bits.trailing_zeros() as usize;
      bits &= bits - 1;
      Some(k)
    })
  }
}

impl fmt::Debug for VarSet {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.debug_set().entries(self.iter()).finish()
  }
}

/// A context entry packed into 8 bytes.
///
/// Bit 63 marks a name (bound variable), bits 56..=62 hold the sort, and bits
/// 0..=55 hold the dependency set for a metavariable, or the singleton set of
/// the name's own ordinal for a name. Return types of term constructors use
/// the metavariable layout.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Binder(u64);

impl Binder {
  const NAME_FLAG: u64 = 1 << 63;
  const SORT_SHIFT: u32 = 56;

  /// The `ordinal`-th name binder of a context.
  pub fn name(sort: SortId, ordinal: usize) -> Binder {
    assert!(sort.0 < 128);
    Binder(Self::NAME_FLAG | (u64::from(sort.0) << Self::SORT_SHIFT) | VarSet::single(ordinal).0)
  }

  /// A metavariable (or return type) with the given dependencies.
  pub fn metavar(sort: SortId, deps: VarSet) -> Binder {
    assert!(sort.0 < 128);
    Binder((u64::from(sort.0) << Self::SORT_SHIFT) | deps.0)
  }

  pub fn from_raw(raw: u64) -> Binder {
    Binder(raw)
  }
  pub fn raw(self) -> u64 {
    self.0
  }
  pub fn is_name(self) -> bool {
    self.0 & Self::NAME_FLAG != 0
  }
  pub fn sort(self) -> SortId {
    SortId(((self.0 >> Self::SORT_SHIFT) & 0x7f) as u8)
  }

  /// Dependencies of a metavariable, or the singleton set of a name.
  pub fn deps(self) -> VarSet {
    VarSet(self.0 & VarSet::MASK)
  }
}

impl fmt::Debug for Binder {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if self.is_name() {
      write!(f, "Name({}, {:?})", self.sort(), self.deps())
    } else {
      write!(f, "Meta({}, {:?})", self.sort(), self.deps())
    }
  }
}

/// A list of binders, either owned in memory or read in place from a file.
#[derive(Clone, Copy, Debug)]
pub enum BinderSlice<'a> {
  Owned(&'a [Binder]),
  /// Little-endian 8-byte records; the length must be a multiple of 8.
  Raw(&'a [u8]),
}

impl<'a> BinderSlice<'a> {
  pub fn len(&self) -> usize {
    match self {
      BinderSlice::Owned(b) => b.len(),
      BinderSlice::Raw(b) => b.len() / 8,
    }
  }

  pub fn is_empty(&self) -> bool {
    self.len() == 0
  }

  pub fn get(&self, i: usize) -> Option<Binder> {
    match self {
      BinderSlice::Owned(b) => b.get(i).copied(),
      BinderSlice::Raw(b) => {
        let rec = b.get(8 * i..8 * i + 8)?;
        Some(Binder(u64::from_le_bytes(rec.try_into().ok()?)))
      }
    }
  }

  pub fn iter(self) -> impl ExactSizeIterator<Item = Binder> + Clone + 'a {
    (0..self.len()).map(move |i| self.get(i).expect("in range"))
  }
}

impl<'a> From<&'a [Binder]> for BinderSlice<'a> {
  fn from(b: &'a [Binder]) -> Self {
    BinderSlice::Owned(b)
  }
}

impl<'a> From<&'a Vec<Binder>> for BinderSlice<'a> {
  fn from(b: &'a Vec<Binder>) -> Self {
    BinderSlice::Owned(b)
  }
}
