use clap::{Parser, Subcommand, ValueEnum};
use positivity::lrs::Lrs;
use positivity::mdp::prism::to_prism;
use positivity::mdp::transform::{integerize_weights, unary_expand};
use positivity::rat;
use positivity::reductions::{reduce_with, NormalizeMode, ReduceError, ReduceOptions, ReductionOutput, ReductionTarget};
use positivity::verify::{run_suite, Status, VerifyConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const OK: u8 = 0;
const VERIFY_FAILED: u8 = 1;
const PARSE_ERROR: u8 = 2;
const TRIVIALLY_NEGATIVE: u8 = 3;
const EXPORT_PRECONDITION: u8 = 4;

#[derive(Parser)]
#[command(name = "positivity", version, about = "Reduce linear recurrence sequences to MDP threshold problems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Auto,
    Always,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Prism,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the threshold instance for a target.
    Reduce {
        #[arg(long)]
        target: ReductionTarget,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        normalize: Norm,
        /// Split the steep CVaR entry into +2k and −2k+i steps.
        #[arg(long)]
        uncollapsed: bool,
    },
    /// Run the verification suite on an instance and the sequence it came from.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        lrs: PathBuf,
        #[arg(long, default_value_t = 50)]
        window: usize,
        #[arg(long, default_value_t = 64)]
        truncation: u32,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print u_0..u_N, one exact value per line.
    EvalLrs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, short = 'n', default_value_t = 20)]
        n: usize,
    },
    /// Write the instance MDP as JSON or PRISM text.
    Export {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Scale weights (and theta) by the lcm of their denominators.
        #[arg(long)]
        integerize: bool,
        /// Expand weights into unit steps.
        #[arg(long)]
        unary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize an instance, or list targets.
    Info {
        #[arg(long)]
        instance: Option<PathBuf>,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(p: &Path) -> Result<T, String> {
    let s = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
    serde_json::from_str(&s).map_err(|e| format!("{}: {e}", p.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    code
}

fn reduce(target: ReductionTarget, input: &Path, out: Option<&Path>, normalize: Norm, uncollapsed: bool) -> u8 {
    let lrs: Lrs = match read_json(input) {
        Ok(l) => l,
        Err(e) => return fail(PARSE_ERROR, e),
    };
    let opts = ReduceOptions {
        normalize: match normalize {
            Norm::Auto => NormalizeMode::Auto,
            Norm::Always => NormalizeMode::Always,
        },
        cvar_collapsed: !uncollapsed,
    };
    match reduce_with(&lrs, target, &opts) {
        Ok(r) => {
            if let Err(e) = write_or_print(out, &r.to_json()) {
                return fail(PARSE_ERROR, e);
            }
            eprintln!("target {}: optimum {} {}", r.target, r.direction.symbol(), rat::fmt(&r.theta));
            OK
        }
        Err(e @ ReduceError::TriviallyNegative { .. }) => fail(TRIVIALLY_NEGATIVE, e),
        Err(e) => fail(PARSE_ERROR, e),
    }
}

fn verify(instance: &Path, lrs: &Path, cfg: VerifyConfig, out: Option<&Path>) -> u8 {
    let inst: ReductionOutput = match read_json(instance) {
        Ok(x) => x,
        Err(e) => return fail(PARSE_ERROR, e),
    };
    let lrs: Lrs = match read_json(lrs) {
        Ok(x) => x,
        Err(e) => return fail(PARSE_ERROR, e),
    };
    let rep = run_suite(&inst, &lrs, &cfg);
    for c in &rep.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Fail => "FAIL",
        };
        eprintln!("{tag} {}: {}", c.name, c.detail);
    }
    if let Some(p) = out {
        if let Err(e) = std::fs::write(p, rep.to_json()) {
            return fail(PARSE_ERROR, e);
        }
    }
    if rep.passed() {
        OK
    } else {
        VERIFY_FAILED
    }
}

fn eval_lrs(input: &Path, n: usize) -> u8 {
    let lrs: Lrs = match read_json(input) {
        Ok(x) => x,
        Err(e) => return fail(PARSE_ERROR, e),
    };
    for u in lrs.terms(n) {
        println!("{}", rat::fmt(&u));
    }
    match lrs.first_negative(n) {
        Some(i) => eprintln!("first-negative: {i}"),
        None => eprintln!("first-negative: none"),
    }
    OK
}

fn export(instance: &Path, format: Format, integerize: bool, unary: bool, out: Option<&Path>) -> u8 {
    let inst: ReductionOutput = match read_json(instance) {
        Ok(x) => x,
        Err(e) => return fail(PARSE_ERROR, e),
    };
    let mut mdp = inst.mdp.clone();
    let mut theta = inst.theta.clone();
    if integerize {
        let (m, t, l) = integerize_weights(&mdp, &theta);
        if l != 1.into() {
            eprintln!("weights scaled by {l}; theta becomes {}", rat::fmt(&t));
        }
        mdp = m;
        theta = t;
    }
    if unary {
        mdp = match unary_expand(&mdp) {
            Ok(m) => m,
            Err(e) => return fail(EXPORT_PRECONDITION, format!("{e} (try --integerize)")),
        };
    }
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&mdp).expect("serializable"),
        Format::Prism => match to_prism(&mdp) {
            Ok(t) => format!("// theta {} {}\n{t}", inst.direction.symbol(), rat::fmt(&theta)),
            Err(e) => return fail(EXPORT_PRECONDITION, format!("{e} (try --integerize)")),
        },
    };
    match write_or_print(out, &text) {
        Ok(()) => OK,
        Err(e) => fail(PARSE_ERROR, e),
    }
}

fn info(instance: Option<&Path>) -> u8 {
    let Some(p) = instance else {
        for t in ReductionTarget::ALL {
            println!("{:<28} from {}", t.name(), t.kind().name());
        }
        return OK;
    };
    let inst: ReductionOutput = match read_json(p) {
        Ok(x) => x,
        Err(e) => return fail(PARSE_ERROR, e),
    };
    let m = &inst.meta;
    println!("target      {}", inst.target);
    println!("objective   {}", m.objective);
    println!("decide      optimum {} {}", inst.direction.symbol(), rat::fmt(&inst.theta));
    if let Some(p) = &inst.cvar_p {
        println!("cvar p      {}", rat::fmt(p));
    }
    println!("order k     {}", m.k);
    println!("lambda, mu  {}, {}", rat::fmt(&m.lambda), rat::fmt(&m.mu));
    println!("d offset    {}", m.d_offset);
    println!("states      {}", inst.mdp.num_states());
    println!("actions     {}", inst.mdp.num_transitions());
    println!("int weights {}", inst.mdp.has_integer_weights());
    OK
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Reduce { target, input, out, normalize, uncollapsed } => reduce(target, &input, out.as_deref(), normalize, uncollapsed),
        Cmd::Verify { instance, lrs, window, truncation, budget, out } => {
            let cfg = VerifyConfig { window, truncation, budget, ..Default::default() };
            verify(&instance, &lrs, cfg, out.as_deref())
        }
        Cmd::EvalLrs { input, n } => eval_lrs(&input, n),
        Cmd::Export { instance, format, integerize, unary, out } => export(&instance, format, integerize, unary, out.as_deref()),
        Cmd::Info { instance } => info(instance.as_deref()),
    };
    ExitCode::from(code)
}
