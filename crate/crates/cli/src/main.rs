use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use thinsurf::grouppres::toy::toy_config;
use thinsurf::grouppres::{britton_reduce, evaluate, is_identity, Group, GroupConfig, Word};
use thinsurf::hypgeom::{build_broken_geodesic, check_certificate, plan_horoballs, power_stable_letters, Model, PoweredGroup};
use thinsurf::io::{parse_bigint, parse_bigint_list, parse_rational_list};
use thinsurf::lattice::{corner_embed, eichler_transvection, is_so_plus, is_unipotent, preserves_form, ExactMatrix};
use thinsurf::pipeline::{
    faithfulness_sweep_with_plan, hyperplane_invariance_check, report_json, run_pipeline, run_toy, ChainReading,
    PipelineError, PipelineInput, PipelineOptions, SweepOptions,
};
use thinsurf::qforms::{
    invariants, is_isotropic_global_with, rationally_equivalent, replacement_prime, select_isotropic_subform,
    subform_chain, DiagonalForm, LegendreReading, MontesinosParams, DEFAULT_WITNESS_BOUND,
};

#[derive(Parser)]
#[command(name = "thinsurf", version, about = "Quadratic forms, exact isometry groups and ping-pong certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants, equivalence and isotropy of diagonal forms
    #[command(subcommand)]
    Form(FormCmd),
    /// Validate (S, a) and build the Montesinos form
    Montesinos(ParamsArgs),
    /// Replacement prime a' for a = 7 mod 8
    PrimeReplace(ParamsArgs),
    /// Chain of isotropic subforms down to rank 4
    Subchain {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Exact matrix utilities
    #[command(subcommand)]
    Matrix(MatrixCmd),
    /// Word reduction, identity test and bounded sweeps
    #[command(subcommand)]
    Word(WordCmd),
    /// Broken-geodesic certificate for one word
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        word: PathBuf,
        #[arg(long = "D", default_value_t = 6.0)]
        d: f64,
        #[arg(long, default_value_t = 256)]
        precision: u32,
        /// Use the stable letters as given instead of powering them
        #[arg(long)]
        raw: bool,
    },
    /// Horoball levels and pairwise distances
    Horoballs {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "D", default_value_t = 6.0)]
        d: f64,
        #[arg(long, default_value_t = 256)]
        precision: u32,
    },
    /// End-to-end construction and certification
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Search for a hyperplane preserved by every generator
    Density {
        #[arg(long)]
        config: PathBuf,
        /// Check the base generators only
        #[arg(long)]
        base_only: bool,
    },
    /// Print a shipped toy configuration
    ToyConfig {
        #[arg(long, default_value = "T1")]
        name: String,
    },
}

#[derive(Subcommand)]
enum FormCmd {
    Invariants {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    Equiv {
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
    },
    Isotropic {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long, default_value_t = DEFAULT_WITNESS_BOUND)]
        bound: u64,
    },
}

#[derive(Args)]
struct ParamsArgs {
    #[arg(long = "S", allow_hyphen_values = true)]
    s: String,
    #[arg(long = "a", allow_hyphen_values = true)]
    a: String,
    #[arg(long, default_value = "neg-a-over-p")]
    legendre: String,
}

#[derive(Subcommand)]
enum MatrixCmd {
    /// Form preservation, SO+ membership and unipotence
    Check {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        file: PathBuf,
    },
    /// Eichler transvection E(u, v)
    Eichler {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Block sum g + [1]
    Corner {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum WordCmd {
    Reduce {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    Identity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        bounds: SweepArgs,
        #[arg(long)]
        raw: bool,
    },
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[arg(long = "L", default_value_t = 5)]
    l: usize,
    #[arg(long = "E", default_value_t = 1)]
    e: i64,
    #[arg(long = "B", default_value_t = 1)]
    b: usize,
    #[arg(long = "D", default_value_t = 6.0)]
    d: f64,
    #[arg(long, default_value_t = 256)]
    precision: u32,
}

#[derive(Subcommand)]
enum PipelineCmd {
    Run {
        #[arg(long = "S", allow_hyphen_values = true, requires = "a", conflicts_with = "coeffs")]
        s: Option<String>,
        #[arg(long = "a", allow_hyphen_values = true)]
        a: Option<String>,
        /// Start from a form of signature (n,1) instead of (S, a)
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        #[command(flatten)]
        bounds: SweepArgs,
        #[arg(long, default_value = "neg-a-over-p")]
        legendre: String,
        #[arg(long, default_value = "clamped")]
        chain_reading: String,
        #[arg(long)]
        cusps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Toy {
        #[arg(long, default_value = "T1")]
        name: String,
        #[command(flatten)]
        bounds: SweepArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

type CliResult = Result<String, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pipeline_err(e: PipelineError) -> String {
    match e.stage() {
        Some(_) => e.to_string(),
        None => format!("pipeline: {e}"),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn form_arg(s: &str) -> Result<DiagonalForm, String> {
    DiagonalForm::new(parse_bigint_list(s)?).map_err(err)
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_config(path: &Path) -> Result<GroupConfig, String> {
    GroupConfig::from_json(&read(path)?).map_err(err)
}

fn load_group(path: &Path) -> Result<Group, String> {
    Group::new(load_config(path)?).map_err(err)
}

fn load_word(path: &Path) -> Result<Word, String> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_matrix(path: &Path) -> Result<ExactMatrix, String> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn params(p: &ParamsArgs) -> Result<MontesinosParams, String> {
    let reading: LegendreReading = p.legendre.parse().map_err(err)?;
    MontesinosParams::with_reading(parse_bigint(&p.s)?, parse_bigint(&p.a)?, reading).map_err(err)
}

fn powered(g: &Group, d: f64, precision: u32, raw: bool) -> Result<(Model, PoweredGroup), String> {
    let m = Model::new(g.form(), precision).map_err(err)?;
    let pg = if raw {
        PoweredGroup {
            group: g.clone(),
            plan: plan_horoballs(&m, g, d).map_err(err)?,
            powers: Vec::new(),
        }
    } else {
        power_stable_letters(&m, g, d).map_err(err)?
    };
    Ok((m, pg))
}

fn options(b: &SweepArgs) -> PipelineOptions {
    PipelineOptions {
        d: b.d,
        max_len: b.l,
        max_power: b.e,
        max_letters: b.b,
        precision_bits: b.precision,
        ..PipelineOptions::default()
    }
}

fn write_out(json: String, out: &Option<PathBuf>) -> CliResult {
    match out {
        Some(p) => {
            fs::write(p, format!("{json}\n")).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok(String::new())
        }
        None => Ok(json),
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Form(FormCmd::Invariants { coeffs }) => Ok(report_json(&invariants(&form_arg(&coeffs)?).map_err(err)?)),
        Cmd::Form(FormCmd::Equiv { lhs, rhs }) => {
            Ok(report_json(&rationally_equivalent(&form_arg(&lhs)?, &form_arg(&rhs)?).map_err(err)?))
        }
        Cmd::Form(FormCmd::Isotropic { coeffs, bound }) => {
            Ok(report_json(&is_isotropic_global_with(&form_arg(&coeffs)?, bound).map_err(err)?))
        }
        Cmd::Montesinos(p) => {
            let reading: LegendreReading = p.legendre.parse().map_err(err)?;
            let (s, a) = (parse_bigint(&p.s)?, parse_bigint(&p.a)?);
            let report = MontesinosParams::validate(&s, &a, reading).map_err(err)?;
            if !report.all_hold() {
                return Err(format!(
                    "invalid (S, a): condition {:?} fails",
                    report.first_failure().unwrap_or("?")
                ));
            }
            let params = params(&p)?;
            let sel = select_isotropic_subform(&params).map_err(err)?;
            Ok(pretty(&json!({ "params": params, "selection": sel })))
        }
        Cmd::PrimeReplace(p) => {
            let params = params(&p)?;
            let r = replacement_prime(&params).map_err(err)?;
            let sel = select_isotropic_subform(&params).map_err(err)?;
            Ok(pretty(&json!({ "replacement": r, "equivalence": sel.equivalence, "qReplaced": sel.q_used })))
        }
        Cmd::Subchain { coeffs } => Ok(report_json(&subform_chain(&form_arg(&coeffs)?).map_err(err)?)),
        Cmd::Matrix(MatrixCmd::Check { form, file }) => {
            let q = form_arg(&form)?;
            let g = load_matrix(&file)?;
            if g.dim() != q.rank() {
                return Err(format!("matrix has dimension {}, form has rank {}", g.dim(), q.rank()));
            }
            Ok(pretty(&json!({
                "preservesForm": preserves_form(&g, &q).map_err(err)?,
                "soPlus": is_so_plus(&g, &q).map_err(err)?,
                "unipotent": is_unipotent(&g),
                "integral": g.is_integral(),
                "determinant": thinsurf::io::rational_to_string(&g.det()),
            })))
        }
        Cmd::Matrix(MatrixCmd::Eichler { form, u, v }) => {
            let q = form_arg(&form)?;
            let g = eichler_transvection(&q, &parse_rational_list(&u)?, &parse_rational_list(&v)?).map_err(err)?;
            Ok(report_json(&g))
        }
        Cmd::Matrix(MatrixCmd::Corner { file }) => Ok(report_json(&corner_embed(&load_matrix(&file)?))),
        Cmd::Word(WordCmd::Reduce { config, word }) => {
            let g = load_group(&config)?;
            let w = load_word(&word)?;
            let r = britton_reduce(&w, &g).map_err(err)?;
            Ok(pretty(&json!({ "input": w, "reduced": r, "text": r.to_string() })))
        }
        Cmd::Word(WordCmd::Identity { config, word }) => {
            let g = load_group(&config)?;
            let w = load_word(&word)?;
            let v = is_identity(&w, &g).map_err(err)?;
            Ok(report_json(&v))
        }
        Cmd::Word(WordCmd::Sweep { config, bounds, raw }) => {
            let g = load_group(&config)?;
            let (_, pg) = powered(&g, bounds.d, bounds.precision, raw)?;
            let opts = SweepOptions::new(bounds.l, bounds.e, bounds.b, bounds.d, bounds.precision);
            let mut r = faithfulness_sweep_with_plan(&pg.group, &pg.plan, &opts).map_err(pipeline_err)?;
            if let Some(t) = r.runtime_seconds.take() {
                eprintln!("sweep runtime: {t:.3} s");
            }
            Ok(pretty(&json!({ "powers": pg.powers, "sweep": r })))
        }
        Cmd::Certify { config, word, d, precision, raw } => {
            let g = load_group(&config)?;
            let w = load_word(&word)?;
            let (m, pg) = powered(&g, d, precision, raw)?;
            let bg = build_broken_geodesic(&m, &w, &pg.group, &pg.plan, d).map_err(err)?;
            let cert = check_certificate(&m, &bg, d, w.ell());
            let nontrivial = !evaluate(&w, &pg.group).map_err(err)?.is_identity();
            Ok(pretty(&json!({
                "word": w,
                "text": w.to_string(),
                "ell": w.ell(),
                "powers": pg.powers,
                "nontrivial": nontrivial,
                "certificate": cert,
            })))
        }
        Cmd::Horoballs { config, d, precision } => {
            let g = load_group(&config)?;
            let m = Model::new(g.form(), precision).map_err(err)?;
            Ok(report_json(&plan_horoballs(&m, &g, d).map_err(err)?))
        }
        Cmd::Pipeline(PipelineCmd::Run { s, a, coeffs, bounds, legendre, chain_reading, cusps, out }) => {
            let input = match (s, a, coeffs) {
                (Some(s), Some(a), None) => PipelineInput::Params {
                    s: parse_bigint(&s)?,
                    a: parse_bigint(&a)?,
                },
                (None, None, Some(c)) => PipelineInput::Form(form_arg(&c)?),
                _ => return Err("give either --S and --a or --coeffs".into()),
            };
            let chain_reading = match chain_reading.as_str() {
                "clamped" => ChainReading::Clamped,
                "literal" => ChainReading::Literal,
                other => return Err(format!("unknown chain reading {other:?}; expected clamped or literal")),
            };
            let opts = PipelineOptions {
                legendre: legendre.parse().map_err(err)?,
                chain_reading,
                cusps,
                ..options(&bounds)
            };
            let t = Instant::now();
            let r = run_pipeline(&input, &opts).map_err(pipeline_err)?;
            eprintln!("pipeline runtime: {:.3} s", t.elapsed().as_secs_f64());
            write_out(report_json(&r), &out)
        }
        Cmd::Pipeline(PipelineCmd::Toy { name, bounds, out }) => {
            let t = Instant::now();
            let r = run_toy(&name, &options(&bounds)).map_err(pipeline_err)?;
            eprintln!("pipeline runtime: {:.3} s", t.elapsed().as_secs_f64());
            write_out(report_json(&r), &out)
        }
        Cmd::Density { config, base_only } => {
            let cfg = load_config(&config)?;
            let mut gens: Vec<ExactMatrix> = cfg.base_generators.iter().map(|b| b.matrix.clone()).collect();
            if !base_only {
                gens.extend(cfg.stable_letters.iter().cloned());
            }
            Ok(report_json(&hyperplane_invariance_check(&gens, &cfg.form).map_err(pipeline_err)?))
        }
        Cmd::ToyConfig { name } => Ok(toy_config(&name).map_err(err)?.to_json()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(s) => {
            if !s.is_empty() {
                // a closed pipe downstream is not an error
                let _ = writeln!(std::io::stdout(), "{s}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
