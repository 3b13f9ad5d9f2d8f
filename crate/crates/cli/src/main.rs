//! Batch verification harness: every lemma-scale claim in the library is
//! a named, runnable check with JSON-lines output.
//!
//! Exit codes: 0 when all checks pass, 1 when any check fails or errors,
//! 2 on usage errors.

mod checks;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use report::emit;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "grouplab",
    version,
    about = "Exact-arithmetic checks for matrix groups over rings: generators and relations, decompositions, centralizer identities, cohomology, deformations, and first-order definability."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Human-readable output instead of JSON lines.
    #[arg(long, global = true)]
    pretty: bool,
    /// Seed for randomized members (integer-matrix decompositions).
    #[arg(long, global = true, default_value_t = grouplab::DEFAULT_SEED)]
    seed: u64,
    /// Enumeration bound (elements produced / tables scanned).
    #[arg(long, global = true, default_value_t = 4_000_000)]
    cap: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ring spec operations.
    Ring {
        #[command(subcommand)]
        cmd: RingCmd,
    },
    /// Run one named verification check.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Decompose a matrix into generator words.
    Decompose {
        #[command(subcommand)]
        cmd: DecomposeCmd,
    },
    /// Second-cohomology computations on finite abelian groups.
    Cohomology {
        #[command(subcommand)]
        cmd: CohomologyCmd,
    },
    /// Parse and evaluate first-order formulas over finite groups.
    Formula {
        #[command(subcommand)]
        cmd: FormulaCmd,
    },
    /// Run a named aggregated suite.
    Suite { name: SuiteName },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Sl,
    T,
    Gl,
    Cohomology,
    All,
}

#[derive(Subcommand)]
enum RingCmd {
    /// Check the structure-constant invariants of a ring spec.
    Validate(RingArg),
}

#[derive(Args)]
struct RingArg {
    /// Ring preset (`Z`, `Zmod:<m>`, `Zi`, `Zsqrt:<d>`, `Zi/<q>`) or a
    /// JSON spec file (`@path` or `path.json`).
    #[arg(long)]
    ring: String,
}

#[derive(Args)]
struct GroupArgs {
    #[arg(long)]
    ring: String,
    /// Matrix dimension.
    #[arg(long, default_value_t = 3)]
    n: usize,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Transvection relations, exhaustively over a finite ring.
    Steinberg(GroupArgs),
    /// Center of the centralizer of `t_kl` equals `T_kl x Z(G)`.
    Centralizer {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "SL")]
        family: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
    /// `T_kl` as a commutator of a transvection with a centralizer
    /// center, both displayed forms.
    TklCommutator {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "SL")]
        family: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        j: usize,
    },
    /// Squares, doubled parameters, and dilation commutators of `T_kl`.
    TklSquared {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
    /// The 6-letter word for `d_i(b) d_j(b^-1)`, per unit (indices passed
    /// as `--k`/`--l`).
    DilationIdentity {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
    /// Conjugation predicate for `d_k(R^x) Z(G)` against the literal set.
    DeltaK {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "T")]
        family: String,
        #[arg(long)]
        k: usize,
    },
    /// Letter-wise map of every decomposition word into `T_1n`.
    Phi(GroupArgs),
    /// Derived subgroup closures.
    Derived {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "T")]
        family: String,
    },
    /// Defining relations of a deformed triangular group.
    DeformPresentation {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "trivial")]
        cocycle: String,
    },
    /// Derived subgroup of a deformed group vs its literal generators.
    DeformDerived {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "trivial")]
        cocycle: String,
    },
    /// Brute-force center against the parametric description.
    Center {
        #[command(flatten)]
        group: GroupArgs,
        /// Check a matrix family (SL/GL/T/...) instead of a deformation.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        cocycle: Option<String>,
    },
}

#[derive(Subcommand)]
enum DecomposeCmd {
    /// Determinant-one matrix into transvections.
    Sl(DecomposeArgs),
    /// Invertible matrix into a dilation followed by transvections.
    Gl(DecomposeArgs),
    /// Unitriangular matrix into the fixed superdiagonal order.
    Ut(DecomposeArgs),
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    ring: String,
    /// Matrix literal: rows separated by `;`, entries by `,`, in ring
    /// coefficient notation (e.g. `1+2i`).
    #[arg(long)]
    mat: String,
}

#[derive(Args)]
struct BaArgs {
    /// Divisors of B, e.g. `2,4` (0 marks a free factor).
    #[arg(long = "B")]
    b: String,
    /// Divisors of A.
    #[arg(long = "A")]
    a: String,
}

#[derive(Subcommand)]
enum CohomologyCmd {
    /// Normalization, symmetry, and the cocycle identity of a table.
    Check {
        #[command(flatten)]
        ba: BaArgs,
        #[arg(long, default_value = "trivial")]
        cocycle: String,
    },
    /// Coboundary membership with witness.
    Coboundary {
        #[command(flatten)]
        ba: BaArgs,
        #[arg(long, default_value = "trivial")]
        cocycle: String,
    },
    /// Brute-force cocycle table enumeration.
    H2(BaArgs),
    /// Ext by the divisor formula, cross-checked by brute enumeration.
    Ext(BaArgs),
    /// Build the central extension E(f) and verify it.
    Extend {
        #[command(flatten)]
        ba: BaArgs,
        #[arg(long, default_value = "trivial")]
        cocycle: String,
    },
    /// Coboundary-on-torsion test.
    Cot {
        #[command(flatten)]
        ba: BaArgs,
        #[arg(long)]
        cocycle: Option<String>,
    },
}

#[derive(Subcommand)]
enum FormulaCmd {
    /// Parse formulas and print their ASTs.
    Parse {
        /// Formula text.
        #[arg(long, conflicts_with = "file")]
        formula: Option<String>,
        /// UTF-8 file, one formula per line, `#` comments.
        #[arg(long)]
        file: Option<String>,
    },
    /// Evaluate a sentence over a finite group structure.
    Eval {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "SL")]
        family: String,
        /// Constant bindings `name=matrix-literal`, repeatable.
        #[arg(long = "const")]
        consts: Vec<String>,
    },
    /// The set defined by a formula with one free variable.
    Define {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "SL")]
        family: String,
        #[arg(long = "const")]
        consts: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let reports = match cli.cmd {
        Cmd::Ring { cmd } => match cmd {
            RingCmd::Validate(args) => vec![checks::ring_validate(&args.ring)],
        },
        Cmd::Verify { cmd } => match cmd {
            VerifyCmd::Steinberg(g) => vec![checks::steinberg(&g.ring, g.n)],
            VerifyCmd::Centralizer { group, family, k, l } => {
                vec![checks::centralizer(&group.ring, group.n, &family, k, l)]
            }
            VerifyCmd::TklCommutator {
                group,
                family,
                k,
                l,
                j,
            } => checks::tkl_commutator(&group.ring, group.n, &family, k, l, j),
            VerifyCmd::TklSquared { group, k, l } => {
                vec![checks::tkl_squared(&group.ring, group.n, k, l)]
            }
            VerifyCmd::DilationIdentity { group, k, l } => {
                vec![checks::dilation_identity(&group.ring, group.n, k, l)]
            }
            VerifyCmd::DeltaK { group, family, k } => {
                vec![checks::delta_k(&group.ring, group.n, &family, k)]
            }
            VerifyCmd::Phi(g) => vec![checks::phi(&g.ring, g.n, cli.cap)],
            VerifyCmd::Derived { group, family } => {
                vec![checks::derived(&group.ring, group.n, &family)]
            }
            VerifyCmd::DeformPresentation { group, cocycle } => {
                checks::deform_presentation(&group.ring, group.n, &cocycle)
            }
            VerifyCmd::DeformDerived { group, cocycle } => {
                vec![checks::deform_derived(&group.ring, group.n, &cocycle)]
            }
            VerifyCmd::Center {
                group,
                family,
                cocycle,
            } => vec![checks::center(
                &group.ring,
                group.n,
                family.as_deref(),
                cocycle.as_deref(),
            )],
        },
        Cmd::Decompose { cmd } => match cmd {
            DecomposeCmd::Sl(a) => vec![checks::decompose("sl", &a.ring, &a.mat)],
            DecomposeCmd::Gl(a) => vec![checks::decompose("gl", &a.ring, &a.mat)],
            DecomposeCmd::Ut(a) => vec![checks::decompose("ut", &a.ring, &a.mat)],
        },
        Cmd::Cohomology { cmd } => match cmd {
            CohomologyCmd::Check { ba, cocycle } => {
                vec![checks::cohomology_check(&ba.b, &ba.a, &cocycle)]
            }
            CohomologyCmd::Coboundary { ba, cocycle } => {
                vec![checks::cohomology_coboundary(&ba.b, &ba.a, &cocycle)]
            }
            CohomologyCmd::H2(ba) => vec![checks::cohomology_h2(&ba.b, &ba.a, cli.cap)],
            CohomologyCmd::Ext(ba) => vec![checks::cohomology_ext(&ba.b, &ba.a, cli.cap)],
            CohomologyCmd::Extend { ba, cocycle } => {
                vec![checks::cohomology_extend(&ba.b, &ba.a, &cocycle)]
            }
            CohomologyCmd::Cot { ba, cocycle } => {
                vec![checks::cohomology_cot(&ba.b, &ba.a, cocycle.as_deref())]
            }
        },
        Cmd::Formula { cmd } => match cmd {
            FormulaCmd::Parse { formula, file } => {
                let mut texts = Vec::new();
                if let Some(f) = formula {
                    texts.push(("arg".to_string(), f));
                }
                if let Some(path) = file {
                    match std::fs::read_to_string(&path) {
                        Ok(content) => {
                            for (idx, line) in content.lines().enumerate() {
                                let line = line.trim();
                                if line.is_empty() || line.starts_with('#') {
                                    continue;
                                }
                                texts.push((format!("{path}:{}", idx + 1), line.to_string()));
                            }
                        }
                        Err(e) => {
                            texts.clear();
                            let reports = vec![report::CheckReport::error(
                                "formula-parse",
                                path.clone(),
                                format!("cannot read {path}: {e}"),
                            )];
                            return ExitCode::from(emit(reports, cli.pretty));
                        }
                    }
                }
                checks::formula_parse(texts)
            }
            FormulaCmd::Eval {
                formula,
                group,
                family,
                consts,
            } => vec![checks::formula_eval(
                &formula, &group.ring, group.n, &family, &consts, cli.cap,
            )],
            FormulaCmd::Define {
                formula,
                group,
                family,
                consts,
            } => vec![checks::formula_define(
                &formula, &group.ring, group.n, &family, &consts, cli.cap,
            )],
        },
        Cmd::Suite { name } => match name {
            SuiteName::Sl => checks::suite_sl(cli.seed, cli.cap),
            SuiteName::T => checks::suite_t(cli.seed),
            SuiteName::Gl => checks::suite_gl(cli.seed),
            SuiteName::Cohomology => checks::suite_cohomology(cli.cap),
            SuiteName::All => checks::suite_all(cli.seed, cli.cap),
        },
    };
    ExitCode::from(emit(reports, cli.pretty))
}
