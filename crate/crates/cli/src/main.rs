//! `namelogic`: batch queries over Kripke and neighborhood model files.
//!
//! Every command prints one JSON document on stdout. Exit status is 0 for
//! an affirmative verdict, 1 for a negative one and 2 for usage or input
//! errors.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use namelogic::decision::{self, Bounds, SatConfig, SatResult, Verdict};
use namelogic::equivalence::{bisimilar, distinguishing_formula};
use namelogic::kripke::{random_model, validate_model, RandomMode, RandomModelParams, ValidationMode};
use namelogic::neighborhood::{kripke_to_nbhd, nbhd_to_kripke, verify_algebra_equations};
use namelogic::{check, parse_formula, Formula, KripkeModel, NeighborhoodModel};

#[derive(Parser)]
#[command(name = "namelogic", version, about = "Epistemic logic with names")]
struct Cli {
    /// Pretty-print the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at a state of a Kripke model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        state: String,
        /// Formula text, or `-` to read it from stdin.
        #[arg(long)]
        formula: String,
    },
    /// Decide satisfiability (E/S/C fragment; D and B need the oracle).
    Sat {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Also write the model of a sat verdict to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide validity via satisfiability of the negation.
    Valid {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Decide bisimilarity of two pointed models.
    Bisim {
        #[arg(long)]
        model1: PathBuf,
        #[arg(long)]
        state1: String,
        #[arg(long)]
        model2: PathBuf,
        #[arg(long)]
        state2: String,
        /// When not bisimilar, look for a formula true at the first point
        /// and false at the second.
        #[arg(long)]
        distinguish: bool,
    },
    /// Convert between Kripke and neighborhood models.
    Translate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        to: Target,
    },
    /// Check the model-level invariants of a Kripke model.
    Validate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Lenient)]
        mode: Mode,
    },
    /// Generate a seeded random Kripke model.
    Random {
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 1)]
        names: usize,
        #[arg(long, default_value_t = 2)]
        props: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_density: f64,
        #[arg(long, default_value_t = 0.5)]
        naming_density: f64,
        /// `epistemic` draws every relation as a partition.
        #[arg(long = "mode", value_enum, default_value_t = Shape::General)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the complex-algebra equations of a model (either format).
    Algebra {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(clap::Args)]
struct OracleArgs {
    /// Answer by bounded model search instead of the decision procedure.
    #[arg(long)]
    oracle: bool,
    /// Oracle bounds as `states,agents` (implies --oracle for D/B).
    #[arg(long, value_parser = parse_bounds)]
    bounds: Option<Bounds>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Nbhd,
    Kripke,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lenient,
    Strict,
    Epistemic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    General,
    Epistemic,
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let (a, b) = s.split_once(',').ok_or("expected STATES,AGENTS")?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok(Bounds {
        max_states: num(a)?,
        max_agents: num(b)?,
    })
}

enum AnyModel {
    Kripke(KripkeModel),
    Nbhd(NeighborhoodModel),
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_kripke(path: &Path) -> Result<KripkeModel> {
    KripkeModel::from_json(&read_text(path)?).with_context(|| format!("loading {}", path.display()))
}

/// Neighborhood files are recognised by their `nu` field.
fn load_any(path: &Path) -> Result<AnyModel> {
    let text = read_text(path)?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let context = || format!("loading {}", path.display());
    Ok(if value.get("nu").is_some() {
        AnyModel::Nbhd(NeighborhoodModel::from_json(&text).with_context(context)?)
    } else {
        AnyModel::Kripke(KripkeModel::from_json(&text).with_context(context)?)
    })
}

fn formula(text: &str) -> Result<Formula> {
    let text = if text == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).context("reading formula from stdin")?;
        buf
    } else {
        text.to_owned()
    };
    Ok(parse_formula(text.trim())?)
}

fn sat_config(args: &OracleArgs) -> SatConfig {
    SatConfig {
        oracle_bounds: args.bounds.unwrap_or_default(),
        ..SatConfig::default()
    }
}

/// The decision procedure, or the oracle when asked for (or needed, and
/// permitted by `--bounds`).
fn decide(chi: &Formula, args: &OracleArgs) -> Result<SatResult> {
    let config = sat_config(args);
    let use_oracle = args.oracle || (args.bounds.is_some() && chi.has_d_or_b());
    if !use_oracle && chi.has_d_or_b() {
        bail!("D and B are outside the decision procedure's fragment; pass --oracle or --bounds");
    }
    Ok(if use_oracle {
        let found = decision::brute_force_sat_with_budget(chi, config.oracle_bounds, config.oracle_budget)?;
        let verdict = if found.is_some() { Verdict::Sat } else { Verdict::SatBoundedUnknown };
        let (model, state) = found.unzip();
        SatResult {
            verdict,
            model,
            state,
            stats: None,
        }
    } else {
        decision::satisfiable_with(chi, &config)?
    })
}

/// Output document and exit code.
fn run(command: Command) -> Result<(Value, u8)> {
    let verdict = |b: bool| if b { 0 } else { 1 };
    Ok(match command {
        Command::Check { model, state, formula: f } => {
            let m = load_kripke(&model)?;
            let r = check(&m, &state, &formula(&f)?)?;
            (serde_json::to_value(&r)?, verdict(r.value))
        }
        Command::Sat { formula: f, oracle, output } => {
            let r = decide(&formula(&f)?, &oracle)?;
            if let (Some(path), Some(m)) = (output, &r.model) {
                let text = serde_json::to_string_pretty(m)?;
                std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            (serde_json::to_value(&r)?, verdict(r.is_sat()))
        }
        Command::Valid { formula: f, oracle } => {
            let chi = formula(&f)?;
            let r = decide(&Formula::not(chi), &oracle)?;
            let valid = match r.verdict {
                Verdict::Sat => json!(false),
                Verdict::Unsat => json!(true),
                // no countermodel within bounds: not established either way
                Verdict::SatBoundedUnknown => Value::Null,
            };
            let doc = json!({
                "valid": valid,
                "verdict": r.verdict,
                "countermodel": r.model,
                "state": r.state,
                "stats": r.stats,
            });
            (doc, verdict(r.verdict == Verdict::Unsat))
        }
        Command::Bisim {
            model1,
            state1,
            model2,
            state2,
            distinguish,
        } => {
            let (m1, m2) = (load_kripke(&model1)?, load_kripke(&model2)?);
            let same = bisimilar(&m1, &state1, &m2, &state2)?;
            let mut doc = json!({ "bisimilar": same });
            if distinguish && !same {
                let f = distinguishing_formula(&m1, &state1, &m2, &state2)?;
                if let Some(f) = &f {
                    let ok = check(&m1, &state1, f)?.value && !check(&m2, &state2, f)?.value;
                    if !ok {
                        bail!("internal error: {f} does not separate the two points");
                    }
                }
                // None here means the points agree on every formula
                doc["modally_equivalent"] = json!(f.is_none());
                doc["distinguishing_formula"] = json!(f.map(|f| f.to_string()));
            }
            (doc, verdict(same))
        }
        Command::Translate { model, to } => {
            let doc = match (load_any(&model)?, to) {
                (AnyModel::Kripke(m), Target::Nbhd) => kripke_to_nbhd(&m).to_json_value(),
                (AnyModel::Nbhd(m), Target::Kripke) => nbhd_to_kripke(&m)?.to_json_value(),
                (AnyModel::Kripke(m), Target::Kripke) => m.to_json_value(),
                (AnyModel::Nbhd(m), Target::Nbhd) => m.to_json_value(),
            };
            (doc, 0)
        }
        Command::Validate { model, mode } => {
            let m = load_kripke(&model)?;
            let mode = match mode {
                Mode::Lenient => ValidationMode::Lenient,
                Mode::Strict => ValidationMode::Strict,
                Mode::Epistemic => ValidationMode::Epistemic,
            };
            let diags = validate_model(&m, mode);
            let ok = !diags.iter().any(|d| d.is_error());
            (json!({ "valid": ok, "diagnostics": diags }), verdict(ok))
        }
        Command::Random {
            states,
            agents,
            names,
            props,
            edge_density,
            naming_density,
            shape,
            seed,
        } => {
            if states == 0 {
                bail!("--states must be positive");
            }
            for (flag, p) in [("--edge-density", edge_density), ("--naming-density", naming_density)] {
                if !(0.0..=1.0).contains(&p) {
                    bail!("{flag} must lie in [0, 1]");
                }
            }
            let params = RandomModelParams {
                states,
                agents,
                names,
                props,
                edge_density,
                naming_density,
                mode: match shape {
                    Shape::General => RandomMode::General,
                    Shape::Epistemic => RandomMode::Epistemic,
                },
                seed,
            };
            (random_model(&params).to_json_value(), 0)
        }
        Command::Algebra { model } => {
            let m = match load_any(&model)? {
                AnyModel::Kripke(m) => kripke_to_nbhd(&m),
                AnyModel::Nbhd(m) => m,
            };
            let diags = verify_algebra_equations(&m);
            let ok = diags.is_empty();
            (json!({ "holds": ok, "failures": diags }), verdict(ok))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((doc, code)) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&doc)
            } else {
                serde_json::to_string(&doc)
            };
            println!("{}", text.expect("JSON values serialize"));
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
