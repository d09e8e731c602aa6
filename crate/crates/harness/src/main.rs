use std::path::PathBuf;
use std::process::ExitCode;

use bkpd_harness::json::{chain_from_json, from_str, module_from_json, to_canonical_string, ChainJson, ModuleJson};
use bkpd_harness::{
    descend_chain, example, ring_suite, roundtrip, validate_module, Certificate, Example, HarnessError, SuiteConfig,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bkpd", version, about = "Certified computations with Breuil-Kisin and Breuil modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ring identities on the tower S_n.
    RingSuite(Opts),
    /// recover_filtered after base_change on seeded random modules.
    Roundtrip(Opts),
    /// A worked rank-one example: mu-p-infinity or qp-zp.
    Example {
        name: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Descend a chain read from JSON.
    Descend {
        input: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Validate a module read from JSON.
    Validate {
        input: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args, Default)]
struct Opts {
    /// Flat key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    e: Option<usize>,
    /// Eisenstein polynomial, e.g. "u^2+5".
    #[arg(long = "E")]
    eisenstein: Option<String>,
    #[arg(long = "N")]
    digits: Option<u32>,
    #[arg(long = "M")]
    cutoff: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record per-case wall-clock time.
    #[arg(long)]
    timing: bool,
    /// Truncate λ to this many factors in the mu-p-infinity example.
    #[arg(long)]
    lambda_terms: Option<usize>,
}

impl Opts {
    fn config(&self) -> Result<SuiteConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => SuiteConfig::load(path)?,
            None => SuiteConfig::default(),
        };
        let mut set = |k: &str, v: Option<String>| v.map_or(Ok(()), |v| cfg.set(k, &v));
        set("p", self.p.map(|x| x.to_string()))?;
        set("e", self.e.map(|x| x.to_string()))?;
        set("E", self.eisenstein.clone())?;
        set("N", self.digits.map(|x| x.to_string()))?;
        set("M", self.cutoff.map(|x| x.to_string()))?;
        set("depth", self.depth.map(|x| x.to_string()))?;
        set("d", self.d.map(|x| x.to_string()))?;
        set("r", self.r.map(|x| x.to_string()))?;
        set("seed", self.seed.map(|x| x.to_string()))?;
        set("count", self.count.map(|x| x.to_string()))?;
        set("suite", self.suite.clone())?;
        set("out", self.out.as_ref().map(|x| x.display().to_string()))?;
        set("lambda_terms", self.lambda_terms.map(|x| x.to_string()))?;
        if self.timing {
            cfg.timing = true;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(Certificate, Option<PathBuf>), HarnessError> {
    let (cert, cfg) = match cli.command {
        Command::RingSuite(opts) => {
            let cfg = opts.config()?;
            (ring_suite(&cfg)?, cfg)
        }
        Command::Roundtrip(opts) => {
            let cfg = opts.config()?;
            (roundtrip(&cfg)?, cfg)
        }
        Command::Example { name, opts } => {
            let mut cfg = opts.config()?;
            let which: Example = name.parse()?;
            cfg.suite = Some(which.name().to_string());
            (example(&cfg, which)?, cfg)
        }
        Command::Descend { input, opts } => {
            let cfg = opts.config()?;
            let chain: ChainJson = from_str(&std::fs::read_to_string(&input)?)?;
            (descend_chain(&cfg, &chain_from_json(&chain)?), cfg)
        }
        Command::Validate { input, opts } => {
            let cfg = opts.config()?;
            let module: ModuleJson = from_str(&std::fs::read_to_string(&input)?)?;
            (validate_module(&cfg, &module_from_json(&module)?), cfg)
        }
    };
    Ok((cert, cfg.out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((cert, out)) => {
            let text = to_canonical_string(&cert);
            let written = match out {
                Some(path) => std::fs::write(path, text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("bkpd: {e}");
                return ExitCode::from(3);
            }
            ExitCode::from(cert.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("bkpd: {e}");
            ExitCode::from(3)
        }
    }
}
