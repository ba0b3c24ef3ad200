//! Command-line front end: validity checks, weakest-precondition inference,
//! derivation checking (plain and separation), and fuzz campaigns.
//!
//! Exit codes: 0 = valid / all checks passed, 1 = invalid / violation found,
//! 2 = usage, parse or configuration error.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rcl_core::describe::{render_exact, render_pretty};
use rcl_core::proofs;
use rcl_core::semantics::DomainConfig;
use rcl_core::sep::asl::{parse_asl, print_asl};
use rcl_core::sep::proof::{
    check_sep_derivation, check_sep_validity, decode_sep_derivation, derivation_formulas, SepCtx,
};
use rcl_core::taxonomy::{run_property, run_taxonomy_suite, GenConfig, PropertyReport, ALL_PROPERTIES};
use rcl_core::triples::{check_validity, Logic, Triple, Verdict};
use rcl_core::{Program, StateSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "rcl", about = "Program logics over regular commands, checked exactly at desk scale", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a triple against the program's exact semantics.
    Check {
        /// Logic to use: hl, il, nc or sil
        #[arg(long)]
        logic: String,
        /// Precondition (a predicate; an assertion formula in heap mode)
        #[arg(long)]
        pre: String,
        /// Postcondition
        #[arg(long)]
        post: String,
        /// Modulus for the bounded value domain (plain programs)
        #[arg(long, default_value_t = 8)]
        domain: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Program file (.rc)
        program: PathBuf,
    },
    /// Infer the weakest sufficient-incorrectness precondition for a
    /// postcondition.
    Infer {
        #[arg(long)]
        post: String,
        #[arg(long, default_value_t = 8)]
        domain: u64,
        /// Write the synthesized derivation to this file
        #[arg(long)]
        emit_derivation: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        program: PathBuf,
    },
    /// Check a derivation file against a program.
    CheckProof {
        /// Derivation file (JSON interchange format)
        derivation: PathBuf,
        #[arg(long)]
        program: PathBuf,
        /// Treat the derivation as a separation derivation
        #[arg(long)]
        sep: bool,
        #[arg(long, default_value_t = 8)]
        domain: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the property campaigns over a seeded random corpus.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        instances: usize,
        /// Property id, or `all`
        #[arg(long, default_value = "all")]
        property: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_program(path: &PathBuf) -> Result<Program> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading program file {}", path.display()))?;
    rcl_core::syntax::parse_program(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Check { logic, pre, post, domain, format, program } => {
            let prog = load_program(&program)?;
            let logic: Logic = logic.parse().map_err(|e: String| anyhow!(e))?;
            if prog.heap_mode() {
                if logic != Logic::Sil {
                    bail!("heap programs support only --logic sil (backward under-approximation)");
                }
                return check_sep(&prog, &pre, &post, format);
            }
            let dom = DomainConfig::new(domain, prog.vars.clone())?;
            let pre_set = parse_pred(&pre, &prog, &dom)?;
            let post_set = parse_pred(&post, &prog, &dom)?;
            let triple = Triple { logic, pre: pre_set, cmd: prog.body.clone(), post: post_set };
            let verdict = check_validity(&triple, &dom)?;
            print_verdict(&verdict, logic, &dom, format);
            Ok(exit_bool(verdict.valid))
        }
        Cmd::Infer { post, domain, emit_derivation, format, program } => {
            let prog = load_program(&program)?;
            if prog.heap_mode() {
                bail!("infer runs on plain programs (the separation system has no completeness construction)");
            }
            let dom = DomainConfig::new(domain, prog.vars.clone())?;
            let post_set = parse_pred(&post, &prog, &dom)?;
            let weakest = rcl_core::triples::weakest_sil_pre(&prog.body, &dom, &post_set)?;
            match format {
                Format::Text => println!("{}", render_pretty(&weakest)),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "record": "weakest-pre",
                        "pre": render_exact(&weakest),
                        "states": weakest.len(),
                        "universe": dom.size(),
                    })
                ),
            }
            if let Some(path) = emit_derivation {
                let d = proofs::synthesize_derivation(&prog.body, &dom, &post_set)?;
                std::fs::write(&path, proofs::encode_derivation(&d, &prog.vars))
                    .with_context(|| format!("writing {}", path.display()))?;
                eprintln!("derivation written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CheckProof { derivation, program, sep, domain, format } => {
            let prog = load_program(&program)?;
            let text = std::fs::read_to_string(&derivation)
                .with_context(|| format!("reading derivation {}", derivation.display()))?;
            if sep || prog.heap_mode() {
                let heap = prog
                    .heap
                    .ok_or_else(|| anyhow!("--sep requires a program with a heap declaration"))?;
                let d = decode_sep_derivation(&text, &prog.vars)?;
                if d.cmd != prog.body {
                    bail!("derivation root command differs from the program body");
                }
                let formulas = derivation_formulas(&d);
                let ctx = SepCtx::new(heap.locations, heap.int_max, &prog.vars, &formulas);
                match check_sep_derivation(&d, &ctx) {
                    Ok(()) => {
                        report_proof(format, true, None);
                        Ok(ExitCode::SUCCESS)
                    }
                    Err(e) => {
                        report_proof(format, false, Some(e.to_string()));
                        Ok(ExitCode::from(1))
                    }
                }
            } else {
                let dom = DomainConfig::new(domain, prog.vars.clone())?;
                let d = proofs::decode_derivation(&text, &prog.vars, &dom)?;
                if d.cmd != prog.body {
                    bail!("derivation root command differs from the program body");
                }
                match proofs::check_derivation(&d, &dom) {
                    Ok(()) => {
                        report_proof(format, true, None);
                        Ok(ExitCode::SUCCESS)
                    }
                    Err(e) => {
                        report_proof(format, false, Some(e.to_string()));
                        Ok(ExitCode::from(1))
                    }
                }
            }
        }
        Cmd::Fuzz { seed, instances, property, format } => {
            let cfg = GenConfig { seed, instances, ..GenConfig::default() };
            let reports: Vec<PropertyReport> = if property == "all" {
                run_taxonomy_suite(&cfg)
            } else {
                if !ALL_PROPERTIES.contains(&property.as_str()) {
                    bail!(
                        "unknown property `{property}`; available: {}",
                        ALL_PROPERTIES.join(", ")
                    );
                }
                vec![run_property(&cfg, &property)]
            };
            let mut all_ok = true;
            for r in &reports {
                all_ok &= r.passed();
                match format {
                    Format::Text => {
                        println!(
                            "{}: {} ({} instances)",
                            r.property,
                            if r.passed() { "PASS" } else { "FAIL" },
                            r.instances
                        );
                        for n in &r.notes {
                            println!("  note: {n}");
                        }
                        for v in &r.violations {
                            println!("  violation: {v}");
                        }
                    }
                    Format::Json => println!("{}", serde_json::to_string(r)?),
                }
                eprintln!("[{} took {} ms]", r.property, r.elapsed_ms);
            }
            Ok(exit_bool(all_ok))
        }
    }
}

fn parse_pred(src: &str, prog: &Program, dom: &Arc<DomainConfig>) -> Result<StateSet> {
    let b = rcl_core::syntax::parse_bexp(src, &prog.vars)
        .map_err(|e| anyhow!("in assertion `{src}`: {e}"))?;
    Ok(StateSet::from_bexp(dom, &b))
}

fn check_sep(prog: &Program, pre: &str, post: &str, format: Format) -> Result<ExitCode> {
    let heap = prog.heap.expect("heap mode checked by caller");
    let p = parse_asl(pre).map_err(|e| anyhow!("in assertion `{pre}`: {e}"))?;
    let q = parse_asl(post).map_err(|e| anyhow!("in assertion `{post}`: {e}"))?;
    let ctx = SepCtx::new(heap.locations, heap.int_max, &prog.vars, &[&p, &q]);
    let verdict = check_sep_validity(&p, &prog.body, &q, &ctx)?;
    match format {
        Format::Text => {
            if verdict.valid {
                println!("valid: every precondition state has a non-error run into {}", print_asl(&q));
            } else {
                println!("invalid: {}", verdict.witness.clone().unwrap_or_default());
            }
        }
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "record": "verdict",
                "logic": "sil",
                "heap": true,
                "valid": verdict.valid,
                "witness": verdict.witness,
            })
        ),
    }
    Ok(exit_bool(verdict.valid))
}

fn print_verdict(v: &Verdict, logic: Logic, dom: &Arc<DomainConfig>, format: Format) {
    match format {
        Format::Text => {
            if v.valid {
                println!("valid ({logic})");
            } else {
                let detail = v.witness.as_ref().map(|w| w.describe(dom)).unwrap_or_default();
                println!("invalid ({logic}): {detail}");
            }
        }
        Format::Json => {
            let witness = v.witness.as_ref().map(|w| w.describe(dom));
            println!(
                "{}",
                serde_json::json!({
                    "record": "verdict",
                    "logic": logic.to_string().to_lowercase(),
                    "valid": v.valid,
                    "witness": witness,
                })
            );
        }
    }
}

fn report_proof(format: Format, accepted: bool, detail: Option<String>) {
    match format {
        Format::Text => {
            if accepted {
                println!("accepted");
            } else {
                println!("rejected: {}", detail.unwrap_or_default());
            }
        }
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "record": "proof",
                "accepted": accepted,
                "detail": detail,
            })
        ),
    }
}

fn exit_bool(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
