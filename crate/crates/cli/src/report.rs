//! Exit codes, human-readable output and the JSON report.
//!
//! JSON report, schema version 1 (one object on stdout):
//!
//! ```text
//! { "schema": 1, "command": "verify" | "compile", "ok": bool, "exit_code": 0 | 1 | 2,
//!   "error": null | { "offset": int | null, "decl": string | null, "message": string },
//!   "output": null | { "path": string, "bytes": int },
//!   "stats": null | { "decls", "proof_ops", "unify_ops", "alloc_ops", "comparisons",
//!                     "equality_steps", "peak_stack", "allocations", "peak_decl_store",
//!                     "store_high_water": int, "peak_rss_kib": int | null, "time_ms": float } }
//! ```

use std::path::Path;
use std::time::Duration;

use mm0_core::mmb::MmbError;
use mm0_core::vm::{Stats, VmError};
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

#[derive(Debug)]
pub struct Failure {
  pub code: u8,
  pub offset: Option<usize>,
  pub decl: Option<String>,
  pub message: String,
}

impl Failure {
  pub fn io(message: String) -> Failure {
    Failure { code: 2, offset: None, decl: None, message }
  }

  pub fn invalid(offset: Option<usize>, message: String) -> Failure {
    Failure { code: 1, offset, decl: None, message }
  }

  pub fn decode(path: &Path, e: MmbError) -> Failure {
    let message = format!("{}: {e}", path.display());
    Failure { code: 2, offset: e.offset().map(|o| o as usize), decl: None, message }
  }

  pub fn from_vm(path: &Path, e: VmError) -> Failure {
    Failure {
      code: 1,
      offset: Some(e.offset),
      decl: e.decl.clone(),
      message: format!("{}: {e}", path.display()),
    }
  }
}

pub struct Outcome {
  command: &'static str,
  result: Result<(), Failure>,
  success: String,
  stats: Option<(Stats, Duration)>,
  pub output: Option<(String, usize)>,
}

/// Peak resident set size of this process, where the OS reports it.
fn peak_rss_kib() -> Option<u64> {
  let status = std::fs::read_to_string("/proc/self/status").ok()?;
  let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
  line.split_whitespace().nth(1)?.parse().ok()
}

impl Outcome {
  pub fn new(command: &'static str) -> Outcome {
    Outcome { command, result: Ok(()), success: String::new(), stats: None, output: None }
  }

  pub fn record(&mut self, stats: Stats, time: Duration) {
    self.stats = Some((stats, time));
  }

  pub fn finish(mut self, result: Result<(), Failure>, success: String) -> Outcome {
    self.result = result;
    self.success = success;
    self
  }

  pub fn exit_code(&self) -> u8 {
    self.result.as_ref().err().map_or(0, |f| f.code)
  }

  fn stats_json(&self) -> Value {
    let Some((s, t)) = self.stats else { return Value::Null };
    let c = s.counters;
    json!({
      "decls": s.decls,
      "proof_ops": c.proof_ops,
      "unify_ops": c.unify_ops,
      "alloc_ops": c.alloc_ops,
      "comparisons": c.comparisons,
      "equality_steps": c.equality_steps,
      "peak_stack": c.peak_stack,
      "allocations": s.allocations,
      "peak_decl_store": s.peak_decl_store,
      "store_high_water": s.store_high_water,
      "peak_rss_kib": peak_rss_kib(),
      "time_ms": t.as_secs_f64() * 1e3,
    })
  }

  pub fn to_json(&self) -> Value {
    let error = match &self.result {
      Ok(()) => Value::Null,
      Err(f) => json!({ "offset": f.offset, "decl": f.decl, "message": f.message }),
    };
    let output = match (&self.output, &self.result) {
      (Some((path, bytes)), Ok(())) => json!({ "path": path, "bytes": bytes }),
      _ => Value::Null,
    };
    json!({
      "schema": SCHEMA,
      "command": self.command,
      "ok": self.result.is_ok(),
      "exit_code": self.exit_code(),
      "error": error,
      "output": output,
      "stats": self.stats_json(),
    })
  }

  pub fn print(&self, json: bool, stats: bool, quiet: bool) {
    if quiet {
      return;
    }
    if json {
      println!("{}", self.to_json());
      return;
    }
    match &self.result {
      Ok(()) => println!("{}", self.success),
      Err(f) => eprintln!("error: {}", f.message),
    }
    if let (true, Some((s, t))) = (stats, self.stats) {
      let c = s.counters;
      println!("declarations: {}", s.decls);
      println!("proof ops: {}, unify ops: {}", c.proof_ops, c.unify_ops);
      println!("peak stack: {}, peak store: {}", c.peak_stack, s.peak_decl_store);
      if let Some(kib) = peak_rss_kib() {
        println!("peak rss: {kib} KiB");
      }
      println!("time: {:.3} ms", t.as_secs_f64() * 1e3);
    }
  }
}
