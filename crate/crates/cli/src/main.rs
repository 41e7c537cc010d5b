//! Command-line front end: hashing, post-treatment, strategy dumps and the
//! statistical experiments, with CSV output where there is a table.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data errors (unreadable
//! input, non-ASCII text, malformed hex, ...).

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use chaoshash::analysis::{
    diffusion_test, digest_size_sweep, repartition_export, sac_test, scaling_benchmark, trial_rng,
    DiffusionConfig, DiffusionReport, SacConfig, SacReport, ScalingRow,
};
use chaoshash::{
    check_bijective_iteration, check_bijective_step, derive_seed, gen_strategy, named_inner,
    named_map, normalize, post_treat, BitString, ChaosHashParams, Configuration, KeyMaterial,
    PostTreatKey, PostTreatment, Strategy,
};
use clap::{Args, Parser, Subcommand};
use rand::Rng;

#[derive(Parser)]
#[command(
    name = "chaoshash",
    version,
    about = "Keyed chaotic hash and its statistical battery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hash a message (file or stdin, bytes taken verbatim) to uppercase hex
    Hash {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, default_value_t = 256, value_parser = digest_size)]
        n: usize,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Dump the strategy (comma-separated indices) drawn for a message
    Strategy {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, default_value_t = 256, value_parser = digest_size)]
        n: usize,
        /// Number of indices [default: 2n]
        #[arg(long)]
        length: Option<usize>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Wrap an inner keyed hash in N keyed asynchronous iterations
    Posttreat {
        /// Inner-hash key, uppercase hex
        #[arg(long)]
        k1: String,
        /// Strategy key, uppercase hex
        #[arg(long)]
        k2: String,
        /// Iteration count N [default: 2n]
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long, default_value = "chaos", value_parser = ["chaos", "xorfold"])]
        inner: String,
        #[arg(long, default_value = "negation", value_parser = ["negation", "identity", "rotation"])]
        map: String,
        #[arg(long, default_value_t = 256, value_parser = digest_size)]
        n: usize,
        /// Treat the input as a post-treated hex digest and print the inner digest
        #[arg(long)]
        invert: bool,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Exhaustively check that single steps and a random strategy permute B^n
    VerifyBijectivity {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=16))]
        n: u32,
        #[arg(long, default_value = "negation", value_parser = ["negation", "identity", "rotation", "zero"])]
        map: String,
        /// Length of the random strategy [default: 2n]
        #[arg(long)]
        strategy_len: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-bit-flip diffusion statistics
    Diffusion {
        #[arg(long, default_value_t = 256, value_parser = digest_size)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        msg_bits: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Flip every bit of one message instead of sampling pairs
        #[arg(long)]
        exhaustive: bool,
        /// Also write the distance histogram as CSV to this path
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[arg(long, default_value = "my key")]
        key: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Strict avalanche criterion dependence-matrix summary
    Sac {
        /// Number of random message sizes
        #[arg(long, default_value_t = 100)]
        sizes: usize,
        /// Messages per size
        #[arg(long, default_value_t = 1000)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 256, value_parser = digest_size)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        max_size: usize,
        #[arg(long, default_value = "my key")]
        key: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Value/position tables of a text and its digest
    Repartition {
        #[arg(long, default_value = "my key")]
        key: String,
        #[arg(long, default_value_t = 256, value_parser = digest_size)]
        n: usize,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Median hash time against message length, or against digest size
    Bench {
        /// Message lengths in bits [default: 1024,2048,...,1048576]
        #[arg(long, value_delimiter = ',', conflicts_with = "digest_sizes")]
        lengths: Vec<usize>,
        /// Sweep digest sizes instead, at a fixed message length
        #[arg(long, value_delimiter = ',', value_parser = digest_size)]
        digest_sizes: Vec<usize>,
        /// Message length for the digest-size sweep
        #[arg(long, default_value_t = 1024)]
        msg_bits: usize,
        #[arg(long, default_value_t = 11)]
        runs: usize,
        #[arg(long, default_value_t = 256, value_parser = digest_size)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "my key")]
        key: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct KeyArgs {
    /// Key as 7-bit ASCII text
    #[arg(long)]
    key: Option<String>,
    /// Key as uppercase hex (4 bits per digit)
    #[arg(long)]
    key_hex: Option<String>,
    /// Read the text key from this environment variable
    #[arg(long, value_name = "VAR")]
    key_env: Option<String>,
}

#[derive(Args)]
struct IoArgs {
    /// Read the message from this file instead of stdin
    #[arg(long)]
    file: Option<PathBuf>,
    /// Write the result to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn digest_size(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 4 || !n.is_multiple_of(4) {
        return Err(format!(
            "digest size must be a positive multiple of 4, got {n}"
        ));
    }
    Ok(n)
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<chaoshash::Error> for Failure {
    fn from(e: chaoshash::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            // the reason may continue on indented lines up to the first blank one
            let reason: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect();
            eprintln!("{}", reason.join(" "));
            if let Some(usage) = rendered.lines().find(|l| l.starts_with("Usage:")) {
                eprintln!("{usage}");
            }
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Hash { key, n, io } => {
            let params = ChaosHashParams::new(n, key_material(&key)?)?;
            let message = read_input(&io)?;
            let digest = chaoshash::chaos_hash(&params, &message)?;
            emit(&io.out, &format!("{digest}\n"))
        }
        Command::Strategy { key, n, length, io } => {
            let key = key_material(&key)?;
            let message = read_input(&io)?;
            let d = normalize(&message, n)?.into_parts().0;
            let strategy = gen_strategy(&derive_seed(&d, &key)?, n, length.unwrap_or(2 * n))?;
            emit(&io.out, &format!("{}\n", strategy.to_csv()))
        }
        Command::Posttreat {
            k1,
            k2,
            iters,
            inner,
            map,
            n,
            invert,
            io,
        } => {
            let key = PostTreatKey::new(
                parse_hex(&k1, "--k1")?,
                parse_hex(&k2, "--k2")?,
                iters.unwrap_or(2 * n),
            )?;
            let f = named_map(&map, n)?;
            let input = read_input(&io)?;
            let digest = if invert {
                let text = String::from_utf8_lossy(&input);
                let outer = Configuration::from_hex(text.trim())?;
                PostTreatment::new(&key, f)?.invert(&outer)?
            } else {
                let inner = named_inner(&inner, n)?;
                post_treat(inner.as_ref(), &key, f, &BitString::from_bytes(&input))?
            };
            emit(&io.out, &format!("{}\n", digest.to_hex()?))
        }
        Command::VerifyBijectivity {
            n,
            map,
            strategy_len,
            seed,
            out,
        } => {
            let n = n as usize;
            let f = named_map(&map, n)?;
            let steps: Vec<bool> = (1..=n)
                .map(|s| check_bijective_step(&f, s).map(|p| p.bijective))
                .collect::<Result<_, _>>()?;
            let mut rng = trial_rng(seed, 0);
            let length = strategy_len.unwrap_or(2 * n);
            let strategy = Strategy::new((0..length).map(|_| rng.gen_range(1..=n)).collect(), n)?;
            let iteration = check_bijective_iteration(&f, &strategy)?;
            let mut text = String::from("step,bijective\n");
            for (s, ok) in steps.iter().enumerate() {
                text.push_str(&format!("{},{ok}\n", s + 1));
            }
            text.push_str(&format!("strategy: {}\n", strategy.to_csv()));
            text.push_str(&format!(
                "bijective: {}\n",
                iteration && steps.iter().all(|&ok| ok)
            ));
            emit(&out, &text)
        }
        Command::Diffusion {
            n,
            msg_bits,
            trials,
            seed,
            exhaustive,
            histogram,
            key,
            out,
        } => {
            let params = ChaosHashParams::with_text_key(n, &key)?;
            let config = DiffusionConfig {
                msg_len_bits: msg_bits,
                trials,
                seed,
                exhaustive,
            };
            let report = diffusion_test(&params, &config).map_err(usage_if_parameter)?;
            if let Some(path) = histogram {
                fs::write(path, report.histogram_csv())?;
            }
            emit(
                &out,
                &format!("{}\n{}\n", DiffusionReport::CSV_HEADER, report.csv_row()),
            )
        }
        Command::Sac {
            sizes,
            r,
            seed,
            n,
            max_size,
            key,
            out,
        } => {
            let params = ChaosHashParams::with_text_key(n, &key)?;
            let config = SacConfig {
                size_samples: sizes,
                messages_per_size: r,
                max_size,
                seed,
            };
            let report = sac_test(&params, &config).map_err(usage_if_parameter)?;
            emit(
                &out,
                &format!("{}\n{}\n", SacReport::CSV_HEADER, report.csv_row()),
            )
        }
        Command::Repartition { key, n, io } => {
            let params = ChaosHashParams::with_text_key(n, &key)?;
            let export = repartition_export(&params, &read_input(&io)?)?;
            emit(&io.out, &export.to_csv())
        }
        Command::Bench {
            lengths,
            digest_sizes,
            msg_bits,
            runs,
            n,
            seed,
            key,
            out,
        } => {
            let rows = if digest_sizes.is_empty() {
                let lengths = if lengths.is_empty() {
                    (10..=20).map(|e| 1usize << e).collect()
                } else {
                    lengths
                };
                let params = ChaosHashParams::with_text_key(n, &key)?;
                scaling_benchmark(&params, &lengths, runs, seed)
            } else {
                digest_size_sweep(
                    &KeyMaterial::from_text(&key)?,
                    &digest_sizes,
                    msg_bits,
                    runs,
                    seed,
                )
            }
            .map_err(usage_if_parameter)?;
            let mut text = format!("{}\n", ScalingRow::CSV_HEADER);
            for row in rows {
                text.push_str(&row.csv_row());
                text.push('\n');
            }
            emit(&out, &text)
        }
    }
}

/// Bad experiment parameters come from the command line, not the data.
fn usage_if_parameter(e: chaoshash::Error) -> Failure {
    match e {
        chaoshash::Error::InvalidParameter(msg) => Failure::Usage(msg),
        other => other.into(),
    }
}

fn key_material(args: &KeyArgs) -> CliResult<KeyMaterial> {
    if let Some(text) = &args.key {
        return Ok(KeyMaterial::from_text(text)?);
    }
    if let Some(hex) = &args.key_hex {
        return Ok(KeyMaterial::from_bits(parse_hex(hex, "--key-hex")?)?);
    }
    let var = args.key_env.as_deref().expect("clap requires one key flag");
    let text = std::env::var(var).map_err(|_| {
        Failure::Usage(format!(
            "environment variable {var} is not set or not unicode"
        ))
    })?;
    Ok(KeyMaterial::from_text(&text)?)
}

fn parse_hex(text: &str, flag: &str) -> CliResult<BitString> {
    BitString::from_hex(text).map_err(|e| Failure::Data(format!("{flag}: {e}")))
}

fn read_input(io: &IoArgs) -> CliResult<Vec<u8>> {
    match &io.file {
        Some(path) => fs::read(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display()))),
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
