//! `ccs` — verify, construct and analyse coherent configurations.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 internal mathematical
//! inconsistency, 3 verification failure of the input.

use ccs_core::algebra::{
    central_primitive_idempotents_with, AlgebraError, Tolerances, DEFAULT_SEED,
};
use ccs_core::analysis::{
    check_theorem1, check_theorem2, check_theorem3, decompose_by_transversal,
    find_direct_sum_split, profile,
};
use ccs_core::constructors::{
    design_scheme, fixture_names, internal_direct_sum, load_fixture, restriction, tensor_product,
    trivial_scheme, two_orbit_scheme,
};
use ccs_core::feasibility::{
    apply_rules, parse_catalog, table_report, DegreeProfile, FilterVerdict, RuleId, ALL_RULES,
};
use ccs_core::io::{parse_cc, parse_inc, parse_perm, write_cc};
use ccs_core::scheme::Scheme;
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_MATH: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "ccs", version, about = "Coherent configuration toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized steps of the idempotent computation.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check the coherence axioms of a scheme file.
    Verify { input: PathBuf },
    /// Print fibers, relations, degrees and structural invariants.
    Info { input: PathBuf },
    /// Compute the central primitive idempotents of the adjacency algebra.
    Idempotents {
        input: PathBuf,
        /// Print the idempotent matrices entrywise.
        #[arg(long)]
        dump_matrices: bool,
    },
    /// Run the structure-theorem consistency checks.
    Check { input: PathBuf },
    /// Build a scheme and write it in `.cc` format.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Arithmetic feasibility filter for degree profiles.
    Filter(FilterArgs),
}

#[derive(Subcommand)]
enum ConstructKind {
    /// Trivial scheme on `n` points.
    Trivial { n: usize },
    /// Tensor product of two scheme files.
    Tensor { a: PathBuf, b: PathBuf },
    /// Restriction to a union of fibers.
    Restrict {
        input: PathBuf,
        /// Fiber indices, comma-separated.
        fibers: String,
    },
    /// Internal direct sum of two scheme files.
    Dsum { a: PathBuf, b: PathBuf },
    /// Scheme of a symmetric design (`.inc` incidence file).
    Design { input: PathBuf },
    /// 2-orbit scheme of a permutation group (`.perm` file).
    TwoOrbit { input: PathBuf },
    /// Bundled example scheme.
    Fixture { name: String },
}

#[derive(Args)]
struct FilterArgs {
    /// Largest fiber size to sweep.
    #[arg(long, default_value_t = 11)]
    m_max: u64,
    /// Check one explicit profile `m,r,d1+d2+...,e1+e2+...` instead of
    /// sweeping.
    #[arg(long)]
    profile: Option<String>,
    /// Comma-separated rule subset (default: all).
    #[arg(long)]
    rules: Option<String>,
    /// Catalog file of known homogeneous degree multisets per m.
    #[arg(long)]
    catalog: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: msg.into(),
    }
}

fn math(msg: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_MATH,
        message: msg.into(),
    }
}

fn verify_failure(msg: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_VERIFY,
        message: msg.into(),
    }
}

fn read_scheme(path: &Path) -> Result<Scheme, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_cc(&text).map_err(|e| match e {
        ccs_core::io::ParseError::InvalidScheme(v) => {
            verify_failure(format!("{}: {v}", path.display()))
        }
        other => usage(format!("{}: {other}", path.display())),
    })
}

fn decomposition(
    s: &Scheme,
    seed: u64,
) -> Result<ccs_core::algebra::IdempotentDecomposition, CliError> {
    central_primitive_idempotents_with(s, seed, &Tolerances::default()).map_err(|e| match e {
        AlgebraError::NumericalDegeneracy(m) => math(format!("numerical degeneracy: {m}")),
        other => math(other.to_string()),
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Verify { input } => cmd_verify(input, cli.json),
        Command::Info { input } => cmd_info(input, cli.json),
        Command::Idempotents {
            input,
            dump_matrices,
        } => cmd_idempotents(input, cli.json, cli.seed, *dump_matrices),
        Command::Check { input } => cmd_check(input, cli.json, cli.seed),
        Command::Construct { kind } => cmd_construct(kind),
        Command::Filter(args) => cmd_filter(args, cli.json),
    }
}

fn cmd_verify(input: &Path, json: bool) -> Result<(), CliError> {
    let s = read_scheme(input)?;
    if json {
        println!(
            "{}",
            json!({
                "valid": true,
                "points": s.point_count(),
                "relations": s.relation_count(),
                "fibers": s.fiber_count(),
            })
        );
    } else {
        println!(
            "valid: {} points, {} relations, {} fibers",
            s.point_count(),
            s.relation_count(),
            s.fiber_count()
        );
    }
    Ok(())
}

fn cmd_info(input: &Path, json: bool) -> Result<(), CliError> {
    let s = read_scheme(input)?;
    let prof = profile(&s);
    if json {
        let relations: Vec<_> = (0..s.relation_count())
            .map(|r| {
                let m = s.relation_meta(r);
                json!({
                    "index": r,
                    "source_fiber": m.source_fiber,
                    "target_fiber": m.target_fiber,
                    "degree": m.degree,
                    "codegree": m.codegree,
                    "transpose": s.transpose_of(r),
                })
            })
            .collect();
        println!(
            "{}",
            json!({
                "points": s.point_count(),
                "relations": relations,
                "fibers": s.fibers(),
                "profile": serde_json::to_value(&prof).map_err(|e| math(e.to_string()))?,
            })
        );
    } else {
        println!("points: {}", s.point_count());
        println!("fibers: {}", s.fiber_count());
        for (i, f) in s.fibers().iter().enumerate() {
            println!("  fiber {i}: {} points {:?}", f.len(), f);
        }
        println!("relations: {}", s.relation_count());
        for r in 0..s.relation_count() {
            let m = s.relation_meta(r);
            println!(
                "  R{r}: fibers ({}, {}), degree {}, codegree {}, transpose R{}",
                m.source_fiber,
                m.target_fiber,
                m.degree,
                m.codegree,
                s.transpose_of(r)
            );
        }
        println!(
            "balanced: {}{}",
            prof.is_balanced,
            prof.block_rank
                .map(|r| format!(" (r = {r})"))
                .unwrap_or_default()
        );
        println!("half-homogeneous: {}", prof.is_half_homogeneous);
        println!("reduced: {}", prof.is_reduced);
        println!("thin-class partition of fibers: {:?}", prof.e_c_classes);
    }
    Ok(())
}

fn cmd_idempotents(input: &Path, json: bool, seed: u64, dump: bool) -> Result<(), CliError> {
    let s = read_scheme(input)?;
    let dec = decomposition(&s, seed)?;
    if json {
        let items: Vec<_> = (0..dec.len())
            .map(|i| {
                json!({
                    "index": i,
                    "degree": dec.degrees[i],
                    "multiplicity": dec.multiplicities[i],
                    "support": dec.supports[i],
                    "principal": i == dec.principal_index,
                })
            })
            .collect();
        println!("{}", json!({ "count": dec.len(), "idempotents": items }));
    } else {
        println!("{} central primitive idempotents", dec.len());
        for i in 0..dec.len() {
            let tag = if i == dec.principal_index {
                " (principal)"
            } else {
                ""
            };
            println!(
                "P{i}: degree {}, multiplicity {}, support {:?}{tag}",
                dec.degrees[i], dec.multiplicities[i], dec.supports[i]
            );
            if dump {
                let p = &dec.idempotents[i];
                for row in 0..s.point_count() {
                    let mut line = String::new();
                    for col in 0..s.point_count() {
                        let z = p[(row, col)];
                        let _ = write!(line, " {:+.4}{:+.4}i", z.re, z.im);
                    }
                    println!("   {line}");
                }
            }
        }
    }
    Ok(())
}

fn cmd_check(input: &Path, json: bool, seed: u64) -> Result<(), CliError> {
    let s = read_scheme(input)?;
    let dec = decomposition(&s, seed)?;
    let t1 = check_theorem1(&s, &dec).map_err(|e| math(e.to_string()))?;
    let t2 = check_theorem2(&s, &dec);
    let t3 = check_theorem3(&s);
    let split = find_direct_sum_split(&s);
    let embedding = decompose_by_transversal(&s).ok();
    let consistent = (!t1.applicable || t1.holds) && t2.consistent && t3.consistent;
    if json {
        println!(
            "{}",
            json!({
                "restriction_theorem": serde_json::to_value(&t1).map_err(|e| math(e.to_string()))?,
                "small_algebra_theorem": serde_json::to_value(&t2).map_err(|e| math(e.to_string()))?,
                "reduction_theorem": serde_json::to_value(&t3).map_err(|e| math(e.to_string()))?,
                "direct_sum_split": split,
                "transversal_embedding": embedding
                    .as_ref()
                    .map(serde_json::to_value)
                    .transpose()
                    .map_err(|e| math(e.to_string()))?,
                "consistent": consistent,
            })
        );
    } else {
        println!(
            "restriction theorem: applicable {}, holds {}",
            t1.applicable, t1.holds
        );
        println!(
            "small-algebra theorem: {} idempotents, consistent {} ({})",
            t2.idempotent_count, t2.consistent, t2.detail
        );
        println!(
            "reduction theorem: applicable {}, consistent {} ({})",
            t3.applicable, t3.consistent, t3.detail
        );
        match &split {
            Some(parts) => println!("direct-sum split of fibers: {parts:?}"),
            None => println!("direct-sum split: none"),
        }
        if let Some(e) = &embedding {
            println!(
                "transversal embedding: ok {}, classes {:?}, tensor factors {:?}",
                e.embedding_ok, e.transversal, e.class_tensor_iso
            );
        }
    }
    if consistent {
        Ok(())
    } else {
        Err(math("a structure-theorem consistency check failed"))
    }
}

fn parse_index_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| usage(format!("bad index `{t}` in list")))
        })
        .collect()
}

fn cmd_construct(kind: &ConstructKind) -> Result<(), CliError> {
    let scheme = match kind {
        ConstructKind::Trivial { n } => {
            trivial_scheme(*n).map_err(|e| usage(e.to_string()))?
        }
        ConstructKind::Tensor { a, b } => {
            tensor_product(&read_scheme(a)?, &read_scheme(b)?)
        }
        ConstructKind::Restrict { input, fibers } => {
            let s = read_scheme(input)?;
            let f = parse_index_list(fibers)?;
            restriction(&s, &f).map_err(|e| usage(e.to_string()))?
        }
        ConstructKind::Dsum { a, b } => {
            internal_direct_sum(&read_scheme(a)?, &read_scheme(b)?)
        }
        ConstructKind::Design { input } => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| usage(format!("cannot read {}: {e}", input.display())))?;
            let d = parse_inc(&text).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            design_scheme(&d).map_err(|e| verify_failure(e.to_string()))?
        }
        ConstructKind::TwoOrbit { input } => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| usage(format!("cannot read {}: {e}", input.display())))?;
            let g = parse_perm(&text).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            two_orbit_scheme(&g).map_err(|e| usage(e.to_string()))?
        }
        ConstructKind::Fixture { name } => load_fixture(name).map_err(|e| {
            usage(format!("{e}; available: {}", fixture_names().join(", ")))
        })?,
    };
    print!("{}", write_cc(&scheme));
    Ok(())
}

fn parse_profile_spec(spec: &str) -> Result<DegreeProfile, CliError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 4 {
        return Err(usage("profile must be `m,r,d1+d2+...,e1+e2+...`"));
    }
    let m: u64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| usage("bad m in profile"))?;
    let r: usize = parts[1]
        .trim()
        .parse()
        .map_err(|_| usage("bad r in profile"))?;
    let parse_list = |s: &str| -> Result<Vec<u64>, CliError> {
        if s.trim() == "-" {
            return Ok(vec![]);
        }
        s.split('+')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| usage(format!("bad degree `{t}` in profile")))
            })
            .collect()
    };
    let d_x = parse_list(parts[2])?;
    let d_xy = parse_list(parts[3])?;
    DegreeProfile::new(m, r, d_x, d_xy).map_err(|e| usage(e.to_string()))
}

fn parse_rules(spec: Option<&str>) -> Result<Vec<RuleId>, CliError> {
    match spec {
        None => Ok(ALL_RULES.to_vec()),
        Some(s) => s
            .split(',')
            .map(|t| {
                RuleId::parse(t.trim()).ok_or_else(|| usage(format!("unknown rule `{t}`")))
            })
            .collect(),
    }
}

fn cmd_filter(args: &FilterArgs, json: bool) -> Result<(), CliError> {
    let rules = parse_rules(args.rules.as_deref())?;
    let catalog = args
        .catalog
        .as_ref()
        .map(|p| {
            let text = std::fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            parse_catalog(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        })
        .transpose()?;

    if let Some(spec) = &args.profile {
        let p = parse_profile_spec(spec)?;
        let verdict = apply_rules(&p, &rules);
        if json {
            println!(
                "{}",
                json!({
                    "profile": serde_json::to_value(&p).map_err(|e| math(e.to_string()))?,
                    "verdict": serde_json::to_value(&verdict).map_err(|e| math(e.to_string()))?,
                })
            );
        } else {
            match &verdict {
                FilterVerdict::Eliminated { rule, trace } => {
                    println!("{p}: eliminated by {rule} ({trace})")
                }
                FilterVerdict::Survives => println!("{p}: survives"),
            }
        }
        return Ok(());
    }

    let report = table_report(args.m_max, catalog.as_ref(), &rules);
    if json {
        println!(
            "{}",
            serde_json::to_string(&report).map_err(|e| math(e.to_string()))?
        );
    } else {
        for row in &report.rows {
            let head = match &row.profile {
                Some(p) => format!("r={} {p}", row.r),
                None => format!("r={} m={}", row.r, row.m),
            };
            let body = match (&row.verdict, &row.note) {
                (Some(FilterVerdict::Eliminated { rule, trace }), _) => {
                    format!("eliminated by {rule} ({trace})")
                }
                (Some(FilterVerdict::Survives), _) => "survives".to_string(),
                (None, Some(note)) => note.clone(),
                (None, None) => String::new(),
            };
            let suffix = match (&row.verdict, &row.note) {
                (Some(_), Some(note)) => format!(" [{note}]"),
                _ => String::new(),
            };
            println!("{head}: {body}{suffix}");
        }
    }
    Ok(())
}
