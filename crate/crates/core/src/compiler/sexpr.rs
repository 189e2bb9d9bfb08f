//! S-expression reader for `.mmt` files. `;` starts a line comment, and
//! square brackets make a list that is marked as bracketed.

use super::{CompileError, CompileErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
  Atom(String, usize),
  List { items: Vec<Sexp>, bracket: bool, pos: usize },
}

impl Sexp {
  pub fn pos(&self) -> usize {
    match self {
      Sexp::Atom(_, p) | Sexp::List { pos: p, .. } => *p,
    }
  }

  pub fn atom(&self) -> Option<&str> {
    match self {
      Sexp::Atom(s, _) => Some(s),
      Sexp::List { .. } => None,
    }
  }

  pub fn list(&self) -> Option<&[Sexp]> {
    match self {
      Sexp::List { items, bracket: false, .. } => Some(items),
      _ => None,
    }
  }
}

fn is_atom_char(c: char) -> bool {
  !c.is_whitespace() && !matches!(c, '(' | ')' | '[' | ']' | ';')
}

/// Reads every top-level form.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, CompileError> {
  let mut stack: Vec<(Vec<Sexp>, char, usize)> = vec![];
  let mut top = vec![];
  let mut chars = src.char_indices().peekable();
  while let Some((i, c)) = chars.next() {
    match c {
      ';' => while chars.next_if(|&(_, c)| c != '\n').is_some() {},
      '(' | '[' => stack.push((vec![], c, i)),
      ')' | ']' => {
        let (items, open, pos) = stack.pop().ok_or_else(|| {
          CompileError::at(src, i, CompileErrorKind::Syntax("unbalanced close".into()))
        })?;
        if (open == '(') != (c == ')') {
          return Err(CompileError::at(
            src,
            i,
            CompileErrorKind::Syntax("mismatched bracket".into()),
          ));
        }
        let e = Sexp::List { items, bracket: open == '[', pos };
        match stack.last_mut() {
          Some((parent, ..)) => parent.push(e),
          None => top.push(e),
        }
      }
      _ if c.is_whitespace() => {}
      _ => {
        let mut end = i + c.len_utf8();
        while let Some((j, c)) = chars.next_if(|&(_, c)| is_atom_char(c)) {
          end = j + c.len_utf8();
        }
        let e = Sexp::Atom(src[i..end].into(), i);
        match stack.last_mut() {
          Some((parent, ..)) => parent.push(e),
          None => top.push(e),
        }
      }
    }
  }
  if let Some((_, _, pos)) = stack.last() {
    return Err(CompileError::at(src, *pos, CompileErrorKind::Syntax("unclosed list".into())));
  }
  Ok(top)
}
