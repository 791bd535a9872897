//! `xtower`: construct extraspecial groups, their representations, Weil extensions and
//! towers, and verify them.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, VerifyArg, WeilArgs};
use report::RunReport;

#[derive(Parser, Debug)]
#[command(
    name = "xtower",
    version,
    about = "Extraspecial groups, Weil extensions and extraspecial towers"
)]
struct Cli {
    /// Seed for sampled sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write a JSON run report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Finite fields.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Extraspecial groups.
    #[command(subcommand)]
    Es(EsCmd),
    /// Weil extensions.
    #[command(subcommand)]
    Weil(WeilCmd),
    /// Extraspecial towers.
    #[command(subcommand)]
    Tower(TowerCmd),
}

#[derive(Subcommand, Debug)]
enum FieldCmd {
    /// Descriptor, canonical generator, roots of unity and automorphisms of F_{p^deg}.
    Info {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        deg: u32,
    },
    /// The Gauss sum theta over a target field, with its identities checked.
    Gauss {
        #[arg(long)]
        p: u32,
        /// Field name such as `p7r1` or `p2r2`.
        #[arg(long)]
        target_field: String,
    },
}

#[derive(Subcommand, Debug)]
enum EsCmd {
    /// Isomorphism type of E(f).
    Classify {
        /// A form in JSON.
        #[arg(long, conflicts_with = "builtin")]
        form: Option<PathBuf>,
        /// A builtin form name (fD, fQ, fE, D2, DQ, D3, D2Q, E2, hyperbolic-f4, hermitian-f4-1, hermitian-f4-3).
        #[arg(long)]
        builtin: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum WeilCmd {
    /// Builds s'(g) = mu(g)^{-1} s(g) on an isometry group and verifies the splitting.
    Extend(WeilExtendArgs),
}

#[derive(Args, Debug)]
struct WeilExtendArgs {
    /// symplectic, gl (hyperbolic) or unitary.
    #[arg(long)]
    case: String,
    /// Symplectic: the odd prime p.
    #[arg(long, default_value_t = 3)]
    p: u32,
    /// Symplectic: V has dimension 2n.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Hyperbolic: dimension of W.
    #[arg(long, default_value_t = 2)]
    w_dim: usize,
    /// Unitary: dimension of the Hermitian space.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Field of the form (hyperbolic default p2r1, unitary default p2r2).
    #[arg(long)]
    k: Option<String>,
    /// Field of the representation (symplectic default p2r2, otherwise p3r1).
    #[arg(long)]
    rep_field: Option<String>,
    /// `all` or `sample:N`.
    #[arg(long, default_value = "all")]
    verify: VerifyArg,
    /// Largest isometry group to enumerate.
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
    /// Also check the homomorphism property on the semidirect product G x E(f).
    #[arg(long)]
    semidirect: bool,
    /// Include the matrices s'(g) in the JSON output.
    #[arg(long)]
    with_s_prime: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum TowerCmd {
    /// Levels of a tower with exact orders.
    Build {
        /// sp2f3, gl2f3 or hermitian-chain:p1,p2,...
        #[arg(long, default_value = "sp2f3")]
        start: String,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// Largest representation degree built concretely.
        #[arg(long, default_value_t = xtower::tower::DEFAULT_DEGREE_CAP)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact multiplication in a tower prefix, with sampled associativity and structure checks.
    Materialize {
        #[arg(long, default_value = "sp2f3")]
        start: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Derived series by enumeration: gl2f3, sp2f3, gl2f3-e27, sp2f3-e27, sp2f3-e27-q3.
    Derived {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 2_000_000)]
        cap: usize,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("XTOWER_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn run(cli: &Cli, report: &mut RunReport) -> Result<(), CliError> {
    match &cli.command {
        Command::Field(FieldCmd::Info { p, deg }) => commands::field_info(*p, *deg, report),
        Command::Field(FieldCmd::Gauss { p, target_field }) => {
            commands::field_gauss(*p, target_field, report)
        }
        Command::Es(EsCmd::Classify { form, builtin }) => {
            commands::es_classify(form.as_deref(), builtin.as_deref(), report)
        }
        Command::Weil(WeilCmd::Extend(a)) => commands::weil_extend(
            &WeilArgs {
                case: a.case.clone(),
                p: a.p,
                n: a.n,
                w_dim: a.w_dim,
                d: a.d,
                k: a.k.clone(),
                rep_field: a.rep_field.clone(),
                verify: a.verify,
                cap: a.cap,
                seed: cli.seed,
                out: a.out.clone(),
                with_s_prime: a.with_s_prime,
                semidirect: a.semidirect,
            },
            report,
        ),
        Command::Tower(TowerCmd::Build {
            start,
            levels,
            cap,
            out,
        }) => commands::tower_build(start, *levels, *cap, out.as_deref(), report),
        Command::Tower(TowerCmd::Materialize {
            start,
            depth,
            samples,
        }) => commands::tower_materialize(start, *depth, *samples, cli.seed, report),
        Command::Tower(TowerCmd::Derived { spec, cap }) => {
            commands::tower_derived(spec, *cap, report)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Field(FieldCmd::Info { .. }) => "field info",
        Command::Field(FieldCmd::Gauss { .. }) => "field gauss",
        Command::Es(_) => "es classify",
        Command::Weil(_) => "weil extend",
        Command::Tower(TowerCmd::Build { .. }) => "tower build",
        Command::Tower(TowerCmd::Materialize { .. }) => "tower materialize",
        Command::Tower(TowerCmd::Derived { .. }) => "tower derived",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let mut report = RunReport::new(command_name(&cli.command));
    let outcome = run(&cli, &mut report);
    report.finish();
    let code = match &outcome {
        Ok(()) if report.passed() => 0,
        Ok(()) => 1,
        Err(CliError::Verification(_)) => 1,
        Err(CliError::Usage(_)) => 2,
    };
    if let Err(e) = &outcome {
        eprintln!("{e}");
    }
    println!(
        "checks: {}/{} passed in {} ms",
        report.checks_total - report.checks_failed,
        report.checks_total,
        report.wall_time_ms
    );
    if let Some(path) = &cli.report {
        match serde_json::to_string_pretty(&report) {
            Ok(text) => {
                if let Err(e) = std::fs::write(path, text + "\n") {
                    eprintln!("error: cannot write report: {e}");
                    return ExitCode::from(2);
                }
            }
            Err(e) => eprintln!("error: {e}"),
        }
    }
    ExitCode::from(code)
}
