//! Tokenizer for the static part of `.mm0` files.

use super::{SpecError, SpecErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tok<'a> {
  Ident(&'a str),
  Num(u32),
  /// Content of a `$ ... $` span, without the dollars.
  Math(&'a str),
  /// One of `{ } ( ) : ; > = .`
  Punct(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token<'a> {
  pub tok: Tok<'a>,
  /// Byte offset of the token (for math spans, of the first byte of content).
  pub pos: usize,
}

fn is_ident_start(b: u8) -> bool {
  b.is_ascii_alphabetic() || b == b'_'
}
fn is_ident_char(b: u8) -> bool {
  b.is_ascii_alphanumeric() || b == b'_'
}

pub fn lex(src: &str) -> Result<Vec<Token<'_>>, SpecError> {
  let b = src.as_bytes();
  let mut out = vec![];
  let mut i = 0;
  while i < b.len() {
    let c = b[i];
    match c {
      b' ' | b'\t' | b'\r' | b'\n' => i += 1,
      b'-' if b.get(i + 1) == Some(&b'-') => {
        while i < b.len() && b[i] != b'\n' {
          i += 1;
        }
      }
      b'$' => {
        let start = i + 1;
        let len = b[start..].iter().position(|&x| x == b'$');
        let Some(len) = len else {
          return Err(SpecError::at(src, i, SpecErrorKind::UnterminatedMathString));
        };
        out.push(Token { tok: Tok::Math(&src[start..start + len]), pos: start });
        i = start + len + 1;
      }
      b'{' | b'}' | b'(' | b')' | b':' | b';' | b'>' | b'=' | b'.' => {
        out.push(Token { tok: Tok::Punct(c), pos: i });
        i += 1;
      }
      _ if c.is_ascii_digit() => {
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() {
          i += 1;
        }
        let n =
          src[start..i].parse::<u32>().ok().filter(|&n| n < super::PREC_MAX).ok_or_else(|| {
            SpecError::at(src, start, SpecErrorKind::Syntax("number too large".into()))
          })?;
        out.push(Token { tok: Tok::Num(n), pos: start });
      }
      _ if is_ident_start(c) => {
        let start = i;
        while i < b.len() && is_ident_char(b[i]) {
          i += 1;
        }
        out.push(Token { tok: Tok::Ident(&src[start..i]), pos: start });
      }
      _ => {
        let ch = src[i..].chars().next().unwrap();
        return Err(SpecError::at(src, i, SpecErrorKind::IllegalCharacter(ch)));
      }
    }
  }
  Ok(out)
}

/// Splits a math span into tokens: whitespace separates tokens, and each
/// delimiter character is a token by itself. Returns `(token, byte offset)`.
pub fn math_tokens<'a>(s: &'a str, base: usize, delims: &[char]) -> Vec<(&'a str, usize)> {
  let mut out = vec![];
  let mut start = None;
  for (i, ch) in s.char_indices() {
    if ch.is_whitespace() || delims.contains(&ch) {
      if let Some(st) = start.take() {
        out.push((&s[st..i], base + st));
      }
      if !ch.is_whitespace() {
        out.push((&s[i..i + ch.len_utf8()], base + i));
      }
    } else if start.is_none() {
      start = Some(i);
    }
  }
  if let Some(st) = start {
    out.push((&s[st..], base + st));
  }
  out
}
