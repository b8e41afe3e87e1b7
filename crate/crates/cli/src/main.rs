use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stabrel::diag::{self, Diagram, ParseOptions, Semantics};
use stabrel::qec::{self, fmt_tuple, StabilizerCode};
use stabrel::render;
use stabrel::stab;
use stabrel::symp::stinespring_dilate;
use stabrel::Prime;

/// Exact relational semantics for qudit stabilizer circuits and codes.
#[derive(Parser)]
#[command(name = "stabrel", version)]
struct Cli {
    /// Work over F_p instead of the field named in the input header.
    #[arg(long, global = true)]
    p: Option<u64>,

    /// Directory searched for boxes and demo inputs.
    #[arg(long, global = true)]
    fixtures_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a diagram and print its relation.
    Eval {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = PrintMode::Equations)]
        print: PrintMode,
    },
    /// Exit 0 if two diagrams denote the same relation, 1 otherwise.
    Equal { left: PathBuf, right: PathBuf },
    /// Exit 0 if the first diagram's relation is contained in the second's.
    Subset { left: PathBuf, right: PathBuf },
    /// Classify a subspace file as isotropic, coisotropic, lagrangian or none.
    Classify { file: PathBuf },
    /// Dilate a coisotropic subspace to an encoder.
    Dilate {
        file: PathBuf,
        /// Write the encoder as a diagram file.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print the syndrome of an error, given as `z... | x...`.
    Syndrome { code: PathBuf, error: String },
    /// Check a correction table against a list of errors.
    Verify {
        code: PathBuf,
        table: PathBuf,
        errors: PathBuf,
    },
    /// Reproduce a worked example.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PrintMode {
    Equations,
    Basis,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    Teleport,
    Repetition3,
}

/// An input could not be read, parsed or interpreted.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

struct Context {
    p: Option<Prime>,
    fixtures: PathBuf,
}

impl Context {
    fn read(&self, path: &Path) -> Result<String, InputError> {
        std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    fn load_diagram(&self, path: &Path) -> Result<Diagram, InputError> {
        let text = self.read(path)?;
        let local = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let resolver = |name: &str| -> stabrel::Result<String> {
            let file = format!("{name}.diag");
            [local.join(&file), self.fixtures.join(&file)]
                .iter()
                .find_map(|f| std::fs::read_to_string(f).ok())
                .ok_or_else(|| stabrel::Error::Diagram(format!("box `{name}` not found")))
        };
        let opts = ParseOptions {
            p: self.p,
            resolver: Some(&resolver),
        };
        diag::parse_with(&text, &opts).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    fn load_code(&self, path: &Path) -> Result<StabilizerCode, InputError> {
        qec::parse_code(&self.read(path)?, self.p).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_semantics(sem: &Semantics, d: &Diagram, mode: PrintMode) -> Vec<String> {
    let names = match sem {
        Semantics::Affine(r) => render::affine_names(r.dom(), r.cod()),
        Semantics::Doubled(_) => render::doubled_names(&d.input_types(), &d.output_types()),
    };
    match mode {
        PrintMode::Equations => render::equations(sem.relation(), &names),
        PrintMode::Basis => render::basis(sem.relation()),
    }
}

/// Evaluates both diagrams and applies a comparison that may reject mismatched boundaries.
fn compare(
    ctx: &Context,
    left: &Path,
    right: &Path,
    doubled: impl Fn(&stab::GradedRelation, &stab::GradedRelation) -> stabrel::Result<bool>,
    affine: impl Fn(&stabrel::AffineRelation, &stabrel::AffineRelation) -> stabrel::Result<bool>,
) -> Result<bool, InputError> {
    let a = ctx.load_diagram(left)?.evaluate()?;
    let b = ctx.load_diagram(right)?.evaluate()?;
    match (&a, &b) {
        (Semantics::Affine(x), Semantics::Affine(y)) => Ok(affine(x, y)?),
        (Semantics::Doubled(x), Semantics::Doubled(y)) => Ok(doubled(x, y)?),
        _ => Err(InputError("cannot compare an affine-layer diagram with a doubled one".into())),
    }
}

fn run(cli: Cli, out: &mut String) -> Result<bool, InputError> {
    let p = cli.p.map(Prime::new).transpose()?;
    let fixtures = cli
        .fixtures_dir
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    let ctx = Context { p, fixtures };
    match cli.command {
        Command::Eval { file, print } => {
            let d = ctx.load_diagram(&file)?;
            let sem = d.evaluate()?;
            for line in render_semantics(&sem, &d, print) {
                writeln!(out, "{line}")?;
            }
            Ok(true)
        }
        Command::Equal { left, right } => {
            let eq = compare(&ctx, &left, &right, |a, b| a.equal(b), |a, b| a.equal(b))?;
            writeln!(out, "EQUAL: {}", verdict(eq))?;
            Ok(eq)
        }
        Command::Subset { left, right } => {
            let sub = compare(&ctx, &left, &right, |a, b| a.subset(b), |a, b| a.subset(b))?;
            writeln!(out, "SUBSET: {}", verdict(sub))?;
            Ok(sub)
        }
        Command::Classify { file } => {
            let s = qec::parse_subspace(&ctx.read(&file)?, ctx.p)?;
            writeln!(out, "{}", s.classify())?;
            Ok(true)
        }
        Command::Dilate { file, out: target } => {
            let s = qec::parse_subspace(&ctx.read(&file)?, ctx.p)?;
            let dil = stinespring_dilate(&s)?;
            writeln!(out, "n={} k={}", dil.n(), dil.k())?;
            writeln!(out, "syndrome basis:")?;
            for b in dil.syndrome_basis() {
                writeln!(out, "  {}", qec::format_vector(&b))?;
            }
            let enc = dil.encoder();
            writeln!(out, "encoder:")?;
            let names = render::doubled_names(enc.dom(), enc.cod());
            for line in render::equations(enc.relation(), &names) {
                writeln!(out, "  {line}")?;
            }
            if let Some(path) = target {
                let text = diag::dilation_diagram(&dil)?.to_text();
                std::fs::write(&path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                writeln!(out, "wrote {}", path.display())?;
            }
            Ok(true)
        }
        Command::Syndrome { code, error } => {
            let code = ctx.load_code(&code)?;
            let e = qec::parse_vector(&error, code.prime(), code.n())?;
            let d = code.syndrome(&e)?;
            writeln!(out, "{}", fmt_tuple(&d))?;
            writeln!(out, "UNDETECTABLE: {}", verdict(code.undetectable(&e)?))?;
            Ok(true)
        }
        Command::Verify { code, table, errors } => {
            let code = ctx.load_code(&code)?;
            let table = qec::parse_table(&ctx.read(&table)?, &code)?;
            let errors = qec::parse_errors(&ctx.read(&errors)?, code.prime(), code.n())?;
            let report = qec::verify_correction(&code, &errors, &table)?;
            write!(out, "{report}")?;
            writeln!(out, "CORRECTS: {}", verdict(report.all_passed()))?;
            Ok(report.all_passed())
        }
        Command::Demo { name: DemoName::Teleport } => demo_teleport(&ctx, out),
        Command::Demo { name: DemoName::Repetition3 } => demo_repetition(&ctx, out),
    }
}

fn demo_teleport(ctx: &Context, out: &mut String) -> Result<bool, InputError> {
    let d = ctx.load_diagram(&ctx.fixtures.join("teleportation.diag"))?;
    let p = d.prime();
    let r = d.evaluate_doubled()?;
    let ok = r == stab::identity(p, 1);
    writeln!(out, "p={p}")?;
    writeln!(out, "teleportation relation:")?;
    let names = render::doubled_names(r.dom(), r.cod());
    for line in render::equations(r.relation(), &names) {
        writeln!(out, "  {line}")?;
    }
    writeln!(out, "IDENTITY: {}", verdict(ok))?;
    Ok(ok)
}

/// Single X errors and their syndromes, as tabulated for the three-qubit repetition code.
const REPETITION_TABLE: [([u32; 3], [u32; 2]); 4] =
    [([0, 0, 0], [0, 0]), ([1, 0, 0], [1, 1]), ([0, 1, 0], [1, 0]), ([0, 0, 1], [0, 1])];

fn demo_repetition(ctx: &Context, out: &mut String) -> Result<bool, InputError> {
    let dir = &ctx.fixtures;
    let code = ctx.load_code(&dir.join("repetition3.code"))?;
    let p = code.prime();
    let n = code.n();
    writeln!(out, "[{}, {}] code over F_{p}", n, code.k())?;
    writeln!(out, "syndromes of X errors:")?;
    let mut rows_match = true;
    for (bits, expected) in REPETITION_TABLE {
        let mut e = vec![0; 2 * n];
        for (i, &b) in bits.iter().enumerate().take(n) {
            e[n + i] = b;
        }
        let d = code.syndrome(&e)?;
        rows_match &= d == expected;
        writeln!(out, "  {}->{}", fmt_tuple(&bits), fmt_tuple(&d))?;
    }
    writeln!(out, "SYNDROME TABLE: {}", if rows_match { "matches" } else { "differs" })?;
    let table = qec::parse_table(&ctx.read(&dir.join("repetition3.table"))?, &code)?;
    let single = qec::parse_errors(&ctx.read(&dir.join("repetition3_weight1.errors"))?, p, n)?;
    let double = qec::parse_errors(&ctx.read(&dir.join("repetition3_weight2.errors"))?, p, n)?;
    let r1 = qec::verify_correction(&code, &single, &table)?;
    let r2 = qec::verify_correction(&code, &double, &table)?;
    write!(out, "{r1}")?;
    writeln!(out, "CORRECTS weight<=1 X: {}", verdict(r1.all_passed()))?;
    write!(out, "{r2}")?;
    writeln!(out, "CORRECTS weight 2 X: {}", verdict(r2.all_passed()))?;
    Ok(rows_match && r1.all_passed() && !r2.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli, &mut out);
    print!("{out}");
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
