#![allow(dead_code)]

pub mod oracle;

use mm0_core::compiler::{compile, emit_mm0, CompileOptions};
use mm0_core::spec::{parse_mm0, Spec};
use rand::Rng;

/// Compiles a source and reads its public statements back as a specification.
pub fn build(text: &str, opts: CompileOptions) -> (Spec, Vec<u8>) {
  let c = compile(text, opts).unwrap_or_else(|e| panic!("{e}"));
  let mm0 = emit_mm0(&c.source);
  (parse_mm0(&mm0).unwrap_or_else(|e| panic!("{e}\n{mm0}")), c.bytes)
}

/// A random single-site change: a bit flip, a byte overwrite, or a deleted or
/// inserted byte, confined to `lo..` so the header can be kept intact.
pub fn mutate(bytes: &[u8], lo: usize, rng: &mut impl Rng) -> Vec<u8> {
  let mut out = bytes.to_vec();
  let lo = lo.min(out.len().saturating_sub(1));
  let i = rng.gen_range(lo..out.len());
  match rng.gen_range(0..4) {
    0 => out[i] ^= 1 << rng.gen_range(0..8),
    1 => out[i] = rng.gen(),
    2 => {
      out.remove(i);
    }
    _ => out.insert(i, rng.gen()),
  }
  out
}
