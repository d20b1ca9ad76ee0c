//! `miniversal`: canonical forms, deformation patterns and reductions from the
//! command line.
//!
//! Exit status is 0 on success, 1 when an analysis fails (a verdict other
//! than a direct sum, no convergence, fixture mismatch) and 2 on bad input.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use miniversal::canonical::{split_sym_skew, CanonicalStructure};
use miniversal::catalog::{diff_against_fixture, entry_grid, render_side_by_side, render_small_forms};
use miniversal::matcore::{text, DEFAULT_TOL};
use miniversal::patterns::{codimension, full_pattern, LineForm, PatternOptions, ShapeOptions, StarPattern, UpDownForm};
use miniversal::reducer::{reduce, ReduceOptions, ReducerError, ReducerSetup};
use miniversal::sweep::sweep_structures;
use miniversal::tangent::{check_transversality, greedy_miniversal, verify_structure, TransversalityReport, Verdict};
use serde_json::json;

#[derive(Parser)]
#[command(name = "miniversal", version, about = "Miniversal deformations of matrices under congruence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print A_can and its deformation pattern side by side.
    Pattern(PatternArgs),
    /// Print the codimension of the congruence class.
    Codim(CommonArgs),
    /// Check that the pattern complements the tangent space.
    Verify(VerifyArgs),
    /// Pattern found by completing a basis of the tangent space with matrix units.
    Greedy(CommonArgs),
    /// Reduce A_can + E to A_can + D with D on the pattern.
    Reduce(ReduceArgs),
    /// Regenerate the table of all 2x2 and 3x3 forms and compare it with the stored copy.
    Examples(FormatArgs),
    /// Split A_can into its symmetric and skew-symmetric parts.
    Split(CommonArgs),
}

#[derive(Clone, Copy, ValueEnum, Default, PartialEq)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct FormatArgs {
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct CommonArgs {
    /// Structure as a JSON file, inline JSON, or blocks like "H1(2,0) G1 J2".
    #[arg(long)]
    structure: String,
    /// Relative rank tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Place square corner lines along the first row instead of the first column.
    #[arg(long)]
    row_lines: bool,
    /// Use the last row instead of the first for full-row blocks.
    #[arg(long)]
    last_row: bool,
}

#[derive(Args)]
struct PatternArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Structure to check (omit with --sweep).
    #[arg(long, required_unless_present = "sweep")]
    structure: Option<String>,
    /// Check random structures of total size up to this bound instead.
    #[arg(long)]
    sweep: Option<usize>,
    /// Number of sweep cases.
    #[arg(long, default_value_t = 500)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Check this pattern (JSON) instead of the generated one.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Perturbation E in the matrix text format.
    #[arg(long)]
    perturbation: PathBuf,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    stop_tol: Option<f64>,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// Write the iteration trace here as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
}

enum Failure {
    Analysis(String),
    Input(String),
}

type CmdResult = Result<(), Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn load_structure(arg: &str) -> Result<CanonicalStructure, Failure> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    let text = text.trim();
    let parsed = if text.starts_with('{') {
        CanonicalStructure::from_json(text)
    } else {
        CanonicalStructure::parse_inline(text)
    };
    parsed.map_err(|e| Failure::Input(format!("structure: {e}")))
}

fn pattern_options(c: &CommonArgs) -> PatternOptions {
    PatternOptions {
        shapes: ShapeOptions {
            square_line: if c.row_lines { LineForm::Row } else { LineForm::Column },
            updown: if c.last_row { UpDownForm::LastRow } else { UpDownForm::FirstRow },
        },
        ..Default::default()
    }
}

fn emit(v: serde_json::Value) -> CmdResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &v).map_err(input)?;
    writeln!(out).map_err(input)
}

fn cmd_pattern(args: &PatternArgs) -> CmdResult {
    let c = &args.common;
    let s = load_structure(&c.structure)?;
    let p = full_pattern(&s, &pattern_options(c));
    let a = s.assemble();
    match c.format {
        Format::Json => emit(json!({
            "structure": s,
            "A_can": text::write_matrix(&a),
            "pattern": p,
            "codimension": p.len(),
        })),
        Format::Text => {
            println!("{s}");
            print!("{}", render_side_by_side(&entry_grid(&a), &p));
            println!("codimension: {}", p.len());
            Ok(())
        }
    }
}

fn cmd_codim(c: &CommonArgs) -> CmdResult {
    let s = load_structure(&c.structure)?;
    let k = codimension(&s);
    match c.format {
        Format::Json => emit(json!({ "structure": s, "codimension": k })),
        Format::Text => {
            println!("{k}");
            Ok(())
        }
    }
}

fn print_report(label: &str, r: &TransversalityReport) {
    println!(
        "{label}: {:?} (n = {}, tangent rank {}, stars {}, combined rank {} of {})",
        r.verdict, r.n, r.tangent_rank, r.pattern_stars, r.combined_rank, r.ambient_dim
    );
    for w in &r.warnings {
        println!("  warning: {w}");
    }
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let opts = PatternOptions::default();
    if let Some(n_max) = args.sweep {
        if n_max == 0 {
            return Err(Failure::Input("--sweep needs a positive size".into()));
        }
        let cases = sweep_structures(n_max, args.count, args.seed);
        let mut rows = Vec::new();
        let mut failed = Vec::new();
        for c in &cases {
            let r = verify_structure(&c.structure, &opts, args.tol).map_err(input)?;
            if r.verdict != Verdict::DirectSum {
                failed.push(format!("#{} {}", c.id, c.structure));
            }
            rows.push((c, r));
        }
        match args.format {
            Format::Json => emit(json!(rows
                .iter()
                .map(|(c, r)| json!({ "id": c.id, "structure": c.structure, "report": r }))
                .collect::<Vec<_>>()))?,
            Format::Text => {
                for (c, r) in rows.iter().filter(|(_, r)| r.verdict != Verdict::DirectSum) {
                    print_report(&format!("#{} {}", c.id, c.structure), r);
                }
                println!(
                    "{} structures (n <= {n_max}, seed {}): {} direct sums",
                    cases.len(),
                    args.seed,
                    cases.len() - failed.len()
                );
            }
        }
        return if failed.is_empty() {
            Ok(())
        } else {
            Err(Failure::Analysis(format!("not a direct sum: {}", failed.join(", "))))
        };
    }

    let s = load_structure(args.structure.as_deref().unwrap_or_default())?;
    let report = match &args.pattern {
        Some(path) => {
            let raw = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let p: StarPattern = serde_json::from_str(&raw).map_err(|e| Failure::Input(format!("invalid pattern: {e}")))?;
            check_transversality(&s.assemble(), &p, args.tol).map_err(input)?
        }
        None => verify_structure(&s, &opts, args.tol).map_err(input)?,
    };
    match args.format {
        Format::Json => emit(json!(report))?,
        Format::Text => print_report(&s.to_string(), &report),
    }
    if report.verdict == Verdict::DirectSum {
        Ok(())
    } else {
        Err(Failure::Analysis(format!("{s}: {:?}", report.verdict)))
    }
}

fn cmd_greedy(c: &CommonArgs) -> CmdResult {
    let s = load_structure(&c.structure)?;
    let a = s.assemble();
    let g = greedy_miniversal(&a, c.tol).map_err(input)?;
    let expected = codimension(&s);
    match c.format {
        Format::Json => emit(json!({ "structure": s, "pattern": g, "stars": g.len(), "codimension": expected }))?,
        Format::Text => {
            println!("{s}");
            print!("{}", render_side_by_side(&entry_grid(&a), &g));
            println!("stars: {} (codimension {expected})", g.len());
        }
    }
    if g.len() == expected {
        Ok(())
    } else {
        Err(Failure::Analysis(format!("greedy found {} stars, expected {expected}", g.len())))
    }
}

fn cmd_reduce(args: &ReduceArgs) -> CmdResult {
    let c = &args.common;
    let s = load_structure(&c.structure)?;
    let a = s.assemble();
    let raw = fs::read_to_string(&args.perturbation)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.perturbation.display())))?;
    let e = text::parse_matrix(&raw).map_err(|e| Failure::Input(format!("perturbation: {e}")))?;
    if e.shape() != a.shape() {
        return Err(Failure::Input(format!(
            "perturbation is {}x{}, structure has size {}",
            e.rows(),
            e.cols(),
            a.rows()
        )));
    }
    let p = full_pattern(&s, &pattern_options(c));
    let setup = ReducerSetup::prepare(&a, &p, c.tol).map_err(input)?;
    let opts = ReduceOptions {
        eps: args.eps,
        stop_tol: args.stop_tol,
        max_iter: Some(args.max_iter),
    };
    let write_trace = |t: &miniversal::reducer::ReductionTrace| -> CmdResult {
        if let Some(path) = &args.trace {
            let f = fs::File::create(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            t.write_json_lines(io::BufWriter::new(f)).map_err(input)?;
        }
        Ok(())
    };
    let r = match reduce(&setup, &e, opts) {
        Ok(r) => r,
        Err(ReducerError::MaxIterExceeded { trace }) => {
            write_trace(&trace)?;
            if args.trace.is_none() {
                trace.write_json_lines(io::stderr()).map_err(input)?;
            }
            return Err(Failure::Analysis(format!(
                "no convergence after {} iterations (masked norm {:e})",
                trace.iterations,
                trace.last_masked_norm()
            )));
        }
        Err(err) => return Err(input(err)),
    };
    write_trace(&r.trace)?;
    match c.format {
        Format::Json => emit(json!({
            "structure": s,
            "a": setup.a(),
            "f": setup.f(),
            "eps_max": setup.eps_max(),
            "result": r,
        })),
        Format::Text => {
            println!("{s}");
            println!(
                "converged in {} iterations, masked residual {:e}{}",
                r.trace.iterations,
                r.residual,
                if r.in_basin { " (inside the certified basin)" } else { "" }
            );
            println!("a = {:e}, f = {:e}, eps_max = {:e}", setup.a(), setup.f(), setup.eps_max());
            for w in &r.warnings {
                println!("warning: {w}");
            }
            println!("S:");
            print!("{}", text::write_matrix(&r.s));
            println!("D:");
            print!("{}", text::write_matrix(&r.d));
            Ok(())
        }
    }
}

fn cmd_examples(args: &FormatArgs) -> CmdResult {
    let table = render_small_forms();
    let diffs = diff_against_fixture();
    match args.format {
        Format::Json => emit(json!({ "table": table, "matches_fixture": diffs.is_empty(), "differences": diffs }))?,
        Format::Text => print!("{table}"),
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        for d in &diffs {
            eprintln!("{d}");
        }
        Err(Failure::Analysis("table differs from the stored fixture".into()))
    }
}

/// Positions a symmetric or skew-symmetric deformation may use.
fn symmetrized(p: &StarPattern, diagonal: bool) -> StarPattern {
    let mut out = p.union(&p.transpose());
    if !diagonal {
        for i in 1..=p.rows() {
            out.remove(i, i);
        }
    }
    out
}

fn cmd_split(c: &CommonArgs) -> CmdResult {
    let s = load_structure(&c.structure)?;
    let a = s.assemble();
    let pair = split_sym_skew(&a).map_err(input)?;
    let p = full_pattern(&s, &pattern_options(c));
    let (ps, pc) = (symmetrized(&p, true), symmetrized(&p, false));
    match c.format {
        Format::Json => emit(json!({
            "structure": s,
            "symmetric": text::write_matrix(&pair.sym),
            "skew": text::write_matrix(&pair.skew),
            "symmetric_pattern": ps,
            "skew_pattern": pc,
        })),
        Format::Text => {
            println!("{s}");
            println!("symmetric part:");
            print!("{}", render_side_by_side(&entry_grid(&pair.sym), &ps));
            println!("skew-symmetric part:");
            print!("{}", render_side_by_side(&entry_grid(&pair.skew), &pc));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Pattern(a) => cmd_pattern(a),
        Command::Codim(a) => cmd_codim(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Greedy(a) => cmd_greedy(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Examples(a) => cmd_examples(a),
        Command::Split(a) => cmd_split(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Analysis(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
