//! Command-line front end. Automata are read and written in HOA; a missing
//! file argument or `-` means standard input.
//!
//! Exit codes: 0 success, 1 negative answer of `check` / `mc --qual` or a
//! benchmark language mismatch, 2 usage error, 3 unreadable or unsuitable
//! input.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tela::analysis::accepting_lasso;
use tela::determinize::{determinize_product_with, determinize_via_gba_bounded, ProductOptions};
use tela::hoa::{parse_hoa_with, print_hoa};
use tela::limitdet::{
    build_gfm_with, build_ld_with, is_limit_deterministic, is_syntactically_limit_deterministic,
    limit_det_sum_bounded, BridgeMode, CounterMode, LdOptions,
};
use tela::mdp::{parse_mdp, pr_max_reference, pr_max_tela_with, qualitative_positive};
use tela::randbench::bench::{run_benchmark, BenchConfig};
use tela::randbench::{random_tela, AccKind, RandomParams};
use tela::transforms::{remove_fin, remove_fin_gba, to_gba, GbaMethod};
use tela::{Error, Tela};

#[derive(Parser)]
#[command(name = "tela", version, about = "Transition-based Emerson-Lei automata toolkit")]
struct Cli {
    /// Largest number of atomic propositions accepted in HOA input.
    #[arg(long, global = true, default_value_t = tela::automaton::DEFAULT_MAX_APS)]
    max_aps: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re-print an automaton, optionally transformed.
    Convert {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ConvertTo::Hoa)]
        to: ConvertTo,
        /// GBA method for `--to gba`.
        #[arg(long, default_value = "split_remfin")]
        gba_method: String,
    },
    /// Deterministic automaton with generalized-Rabin acceptance.
    Determinize {
        file: Option<PathBuf>,
        /// `product` or `via-gba:<cnf|remfin_split|split_remfin|remfin_rewrite>`.
        #[arg(long, default_value = "product")]
        method: String,
        #[arg(long)]
        no_langcover: bool,
        #[arg(long, default_value_t = usize::MAX)]
        max_states: usize,
    },
    /// Limit-deterministic automaton.
    Limitdet {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = LimitMethod::Gfm)]
        method: LimitMethod,
        #[command(flatten)]
        ld: LdArgs,
    },
    /// Decision procedures.
    Check {
        #[arg(value_enum)]
        what: CheckKind,
        file: Option<PathBuf>,
    },
    /// Maximal probability that an MDP produces a word of the automaton.
    Mc {
        #[arg(long)]
        mdp: PathBuf,
        #[arg(long)]
        aut: PathBuf,
        /// Only decide whether the probability is positive.
        #[arg(long, conflicts_with = "quant")]
        qual: bool,
        #[arg(long)]
        quant: bool,
        /// Use the deterministic product automaton instead of the
        /// good-for-MDP construction.
        #[arg(long)]
        reference: bool,
        #[command(flatten)]
        ld: LdArgs,
    },
    /// Seeded random automaton.
    Random {
        #[arg(long, default_value_t = 4)]
        states: u32,
        #[arg(long, default_value_t = 1)]
        aps: usize,
        #[arg(long, default_value_t = 8)]
        marks: u32,
        #[arg(long, value_enum, default_value_t = AccArg::RandomEl)]
        acc: AccArg,
        /// Transition probability; defaults to 3 / states.
        #[arg(long)]
        density: Option<f64>,
        #[arg(long, default_value_t = 0.2)]
        mark_prob: f64,
        /// Allow deterministic transition systems.
        #[arg(long)]
        allow_deterministic: bool,
        /// Printed to standard error when omitted.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Benchmark run from a `key = value` configuration.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Write the machine-readable report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Args)]
struct LdArgs {
    #[arg(long, value_enum, default_value_t = CounterArg::AwaitNext)]
    counter: CounterArg,
    /// Bridge only into singleton sets (not good-for-MDP in general).
    #[arg(long)]
    singleton_bridges: bool,
    #[arg(long, default_value_t = usize::MAX)]
    max_states: usize,
}

impl LdArgs {
    fn options(&self) -> LdOptions {
        LdOptions {
            counter: match self.counter {
                CounterArg::AwaitNext => CounterMode::AwaitNext,
                CounterArg::PlainBreak => CounterMode::PlainBreakAtZero,
            },
            bridges: if self.singleton_bridges {
                BridgeMode::Singletons
            } else {
                BridgeMode::All
            },
            max_states: self.max_states,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvertTo {
    Hoa,
    Dnf,
    Gba,
    Remfin,
    RemfinGba,
}

#[derive(Clone, Copy, ValueEnum)]
enum LimitMethod {
    Sum,
    Ld,
    Gfm,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Empty,
    Limitdet,
}

#[derive(Clone, Copy, ValueEnum)]
enum CounterArg {
    AwaitNext,
    PlainBreak,
}

#[derive(Clone, Copy, ValueEnum)]
enum AccArg {
    RandomEl,
    Dnf,
}

enum Failure {
    Usage(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_text(file: Option<&Path>) -> Result<String, Failure> {
    match file {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, Failure> {
    let mut s = String::new();
    io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
    Ok(s)
}

fn read_automaton(file: Option<&Path>, max_aps: usize) -> Result<Tela, Failure> {
    let text = read_text(file)?;
    parse_hoa_with(&text, max_aps).map_err(|e| {
        let name = file.map_or("stdin".to_string(), |p| p.display().to_string());
        Failure::Input(format!("{name}: {e}"))
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let max_aps = cli.max_aps;
    match cli.command {
        Command::Convert { file, to, gba_method } => {
            let a = read_automaton(file.as_deref(), max_aps)?;
            let out = match to {
                ConvertTo::Hoa => a,
                ConvertTo::Dnf => a.to_dnf().tela,
                ConvertTo::Gba => {
                    let m: GbaMethod = gba_method.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
                    to_gba(&a, m)
                }
                ConvertTo::Remfin => remove_fin(&a.to_dnf().tela)?,
                ConvertTo::RemfinGba => remove_fin_gba(&a.to_dnf().tela)?,
            };
            print!("{}", print_hoa(&out));
            Ok(0)
        }
        Command::Determinize {
            file,
            method,
            no_langcover,
            max_states,
        } => {
            let gba = match method.as_str() {
                "product" => None,
                m => match m.strip_prefix("via-gba:") {
                    Some(g) => Some(g.parse::<GbaMethod>().map_err(|e| Failure::Usage(e.to_string()))?),
                    None => return Err(Failure::Usage(format!("unknown determinization method `{m}`"))),
                },
            };
            let a = read_automaton(file.as_deref(), max_aps)?;
            let d = match gba {
                Some(g) => determinize_via_gba_bounded(&a, g, max_states)?,
                None => {
                    determinize_product_with(
                        &a,
                        ProductOptions {
                            langcover: !no_langcover,
                            parallel: false,
                            max_states,
                        },
                    )?
                    .automaton
                }
            };
            print!("{}", print_hoa(&d));
            Ok(0)
        }
        Command::Limitdet { file, method, ld } => {
            let a = read_automaton(file.as_deref(), max_aps)?;
            let out = match method {
                LimitMethod::Sum => limit_det_sum_bounded(&a, ld.max_states)?,
                LimitMethod::Ld => build_ld_with(&a, ld.options())?.automaton,
                LimitMethod::Gfm => build_gfm_with(&a, ld.options())?.automaton,
            };
            print!("{}", print_hoa(&out));
            Ok(0)
        }
        Command::Check { what, file } => {
            let a = read_automaton(file.as_deref(), max_aps)?;
            match what {
                CheckKind::Empty => match accepting_lasso(&a) {
                    None => {
                        println!("EMPTY");
                        Ok(0)
                    }
                    Some(l) => {
                        println!("NONEMPTY");
                        println!("witness {}", l.word().display(a.num_aps()));
                        Ok(1)
                    }
                },
                CheckKind::Limitdet => {
                    let syntactic = a.acceptance().is_dnf_shaped() && is_syntactically_limit_deterministic(&a)?;
                    if syntactic {
                        println!("SYNTACTIC");
                        Ok(0)
                    } else if is_limit_deterministic(&a) {
                        println!("SEMANTIC");
                        Ok(0)
                    } else {
                        println!("NO");
                        Ok(1)
                    }
                }
            }
        }
        Command::Mc {
            mdp,
            aut,
            qual,
            quant,
            reference,
            ld,
        } => {
            if !qual && !quant {
                return Err(Failure::Usage("one of --qual or --quant is required".into()));
            }
            let m = parse_mdp(&read_text(Some(&mdp))?)
                .map_err(|e| Failure::Input(format!("{}: {e}", mdp.display())))?;
            let a = read_automaton(Some(&aut), max_aps)?;
            if qual {
                // non-limit-deterministic inputs go through the LD construction
                let positive = if is_limit_deterministic(&a) {
                    qualitative_positive(&m, &a)?
                } else {
                    qualitative_positive(&m, &build_ld_with(&a, ld.options())?.automaton)?
                };
                println!("{}", if positive { "POSITIVE" } else { "ZERO" });
                return Ok(if positive { 0 } else { 1 });
            }
            let v = if reference {
                pr_max_reference(&m, &a)?
            } else {
                pr_max_tela_with(&m, &a, ld.options())?
            };
            println!("{v:.12}");
            Ok(0)
        }
        Command::Random {
            states,
            aps,
            marks,
            acc,
            density,
            mark_prob,
            allow_deterministic,
            seed,
        } => {
            let seed = seed.unwrap_or_else(|| {
                let s = rand::random::<u64>();
                eprintln!("seed: {s}");
                s
            });
            let p = RandomParams {
                n_states: states,
                n_aps: aps,
                n_marks: marks,
                edge_density: density,
                mark_prob,
                acc: match acc {
                    AccArg::RandomEl => AccKind::RandomEl,
                    AccArg::Dnf => AccKind::Dnf,
                },
                require_nondeterminism: !allow_deterministic,
                seed,
                ..Default::default()
            };
            let a = random_tela(&p).map_err(|e| Failure::Usage(e.to_string()))?;
            print!("{}", print_hoa(&a));
            Ok(0)
        }
        Command::Bench {
            config,
            report,
            threads,
        } => {
            let text = read_text(Some(&config))?;
            let mut cfg =
                BenchConfig::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", config.display())))?;
            if let Some(t) = threads {
                cfg.threads = t;
            }
            let r = run_benchmark(&cfg)?;
            print!("{}", r.to_table());
            if let Some(path) = report {
                fs::write(&path, r.to_kv()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            Ok(if r.mismatch_count() > 0 { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
