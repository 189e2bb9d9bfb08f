mod dump;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mm0_core::compiler::{compile, emit_mm0, CompileOptions};
use mm0_core::spec::{parse_mm0, Spec};
use mm0_core::vm::{verify, VerifyOptions};

use report::{Failure, Outcome};

/// Verifier and proof compiler for Metamath Zero.
#[derive(Parser)]
#[command(name = "mm0", version)]
struct Cli {
  #[command(subcommand)]
  cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
  /// Check a proof file against a specification.
  Verify {
    spec: PathBuf,
    proof: PathBuf,
    #[command(flatten)]
    out: Output,
    /// Check declarations on a thread pool.
    #[arg(long)]
    parallel: bool,
  },
  /// Compile an elaborated `.mmt` environment to a proof file.
  Compile {
    input: PathBuf,
    /// Output file (default: the input with extension `.mmb`).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Check the result against this specification instead of the
    /// statements of the input.
    #[arg(long, conflicts_with = "emit_mm0")]
    against: Option<PathBuf>,
    /// Also write the public statements as a specification.
    #[arg(long)]
    emit_mm0: Option<PathBuf>,
    /// Emit `TermSave`/`UTermSave` instead of separate save instructions.
    #[arg(long)]
    fuse_saves: bool,
    /// Leave out the name index.
    #[arg(long)]
    strip: bool,
    #[command(flatten)]
    out: Output,
  },
  /// Print the contents of a proof file in opcode notation.
  Dump {
    proof: PathBuf,
    /// Only declaration N of the declaration stream (0-based).
    #[arg(long, group = "part")]
    decl: Option<usize>,
    /// Only the header.
    #[arg(long, group = "part")]
    header: bool,
    /// Only the name index.
    #[arg(long, group = "part")]
    names: bool,
  },
}

#[derive(Args, Clone, Copy)]
struct Output {
  /// Print a machine-readable report on stdout.
  #[arg(long)]
  json: bool,
  /// Print operation counts, peak memory and time.
  #[arg(long)]
  stats: bool,
  /// Print nothing; only the exit code is meaningful.
  #[arg(short, long)]
  quiet: bool,
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
  std::fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
  String::from_utf8(read(path)?)
    .map_err(|_| Failure::invalid(None, format!("{}: not valid UTF-8", path.display())))
}

fn load_spec(path: &Path) -> Result<Spec, Failure> {
  let text = read_text(path)?;
  parse_mm0(&text).map_err(|e| Failure::invalid(Some(e.offset), format!("{}:{e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
  std::fs::write(path, bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn cmd_verify(spec: &Path, proof: &Path, parallel: bool) -> Outcome {
  let mut out = Outcome::new("verify");
  let mut run = || -> Result<(), Failure> {
    let spec = load_spec(spec)?;
    let bytes = read(proof)?;
    let start = Instant::now();
    let r = verify(&spec, &bytes, VerifyOptions { parallel });
    out.record(r.stats, start.elapsed());
    r.result.map_err(|e| Failure::from_vm(proof, e))
  };
  let res = run();
  out.finish(res, format!("{}: ok", proof.display()))
}

struct CompileArgs<'a> {
  input: &'a Path,
  output: Option<&'a Path>,
  against: Option<&'a Path>,
  emit_mm0: Option<&'a Path>,
  opts: CompileOptions,
}

fn cmd_compile(a: CompileArgs<'_>) -> Outcome {
  let mut out = Outcome::new("compile");
  let output = a.output.map_or_else(|| a.input.with_extension("mmb"), Path::to_path_buf);
  let mut run = || -> Result<usize, Failure> {
    let text = read_text(a.input)?;
    let c = compile(&text, a.opts)
      .map_err(|e| Failure::invalid(Some(e.offset), format!("{}:{e}", a.input.display())))?;
    let mm0 = emit_mm0(&c.source);
    let spec = match a.against {
      Some(p) => load_spec(p)?,
      None => parse_mm0(&mm0)
        .map_err(|e| Failure::invalid(None, format!("generated specification: {e}")))?,
    };
    let start = Instant::now();
    let r = verify(&spec, &c.bytes, VerifyOptions::default());
    out.record(r.stats, start.elapsed());
    r.result.map_err(|e| Failure::from_vm(&output, e))?;
    write(&output, &c.bytes)?;
    if let Some(p) = a.emit_mm0 {
      write(p, mm0.as_bytes())?;
    }
    Ok(c.bytes.len())
  };
  let res = run();
  let len = *res.as_ref().unwrap_or(&0);
  out.output = Some((output.display().to_string(), len));
  out.finish(res.map(drop), format!("wrote {} ({len} bytes)", output.display()))
}

fn main() -> ExitCode {
  let cli = Cli::parse();
  let (outcome, flags) = match cli.cmd {
    Cmd::Verify { spec, proof, out, parallel } => (cmd_verify(&spec, &proof, parallel), out),
    Cmd::Compile { input, output, against, emit_mm0, fuse_saves, strip, out } => {
      let args = CompileArgs {
        input: &input,
        output: output.as_deref(),
        against: against.as_deref(),
        emit_mm0: emit_mm0.as_deref(),
        opts: CompileOptions { fuse_saves, strip },
      };
      (cmd_compile(args), out)
    }
    Cmd::Dump { proof, decl, header, names } => {
      let part = match (decl, header, names) {
        (Some(n), ..) => dump::Part::Decl(n),
        (_, true, _) => dump::Part::Header,
        (_, _, true) => dump::Part::Names,
        _ => dump::Part::All,
      };
      let decode = |e| Failure::decode(&proof, e);
      return match read(&proof).and_then(|b| dump::dump(&b, part).map_err(decode)) {
        Ok(text) => {
          print!("{text}");
          ExitCode::SUCCESS
        }
        Err(e) => {
          eprintln!("error: {}", e.message);
          ExitCode::from(2)
        }
      };
    }
  };
  outcome.print(flags.json, flags.stats, flags.quiet);
  ExitCode::from(outcome.exit_code())
}
