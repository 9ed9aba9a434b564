//! `igklo`: batch verification of iGKLO images against the defining relations.

mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use igklo_core::igklo::{Corruption, GkloImage};
use igklo_core::scalar::Spectral;

use config::{ConfigError, ConfigFile, Format, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "igklo",
    version,
    about = "Exact verification of iGKLO representations"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog instance name; overrides the config file.
    #[arg(long)]
    instance: Option<String>,
    /// Relation filter, e.g. `Serre3` or `BB1:1,3,HB`.
    #[arg(long)]
    relations: Option<String>,
    /// Random trials per oracle comparison.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Truncation order of the series check.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum)]
    bb1_convention: Option<Bb1Arg>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Debugging aid: build a deliberately wrong image.
    #[arg(long, value_enum)]
    corrupt: Option<CorruptArg>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Validate the configured instances and print their data.
    Validate(Common),
    /// Print the image of one generator in normal form.
    Image {
        #[command(flatten)]
        common: Common,
        /// Node, 1-based.
        #[arg(long)]
        node: usize,
        #[arg(long, value_enum, default_value = "b")]
        generator: Generator,
    },
    /// Check every applicable relation, with oracle cross-checks.
    Check(Common),
    /// Run the standalone identity suite.
    Identities(Common),
    /// List the built-in instances.
    Catalog(Common),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Bb1Arg {
    Taui,
    I,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CorruptArg {
    DropKappa,
    FlipWp,
    OmitConstant,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Generator {
    /// B_i(u)
    B,
    /// The Cartan current Θ́_i(u)
    Theta,
}

impl From<CorruptArg> for Corruption {
    fn from(c: CorruptArg) -> Self {
        match c {
            CorruptArg::DropKappa => Corruption::DropKappa,
            CorruptArg::FlipWp => Corruption::FlipWp,
            CorruptArg::OmitConstant => Corruption::OmitConstant,
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn load(c: &Common) -> Result<RunConfig, ConfigError> {
    let file = match &c.config {
        Some(p) => config::read_file(p)?,
        None => ConfigFile::default(),
    };
    let o = Overrides {
        instance: c.instance.clone(),
        relations: c.relations.clone(),
        trials: c.trials,
        seed: c.seed,
        order: c.order,
        format: c.format.map(|f| match f {
            FormatArg::Text => "text".to_string(),
            FormatArg::Structured => "structured".to_string(),
        }),
        bb1_convention: c.bb1_convention.map(|b| match b {
            Bb1Arg::Taui => "taui".to_string(),
            Bb1Arg::I => "i".to_string(),
        }),
    };
    config::resolve(file, o)
}

fn emit(format: Format, text: String, doc: &impl serde::Serialize) {
    match format {
        Format::Text => print!("{text}"),
        Format::Structured => println!(
            "{}",
            serde_json::to_string_pretty(doc).expect("serializable report")
        ),
    }
}

fn run(cli: Cli) -> Result<u8, ConfigError> {
    match cli.verb {
        Verb::Catalog(c) => {
            let cfg = load(&Common {
                instance: None,
                config: None,
                ..c
            })?;
            let doc = report::catalog(&cfg);
            emit(cfg.format, doc.text(), &doc);
            Ok(0)
        }
        Verb::Validate(c) => {
            let cfg = load(&c)?;
            let doc = report::catalog(&cfg);
            emit(cfg.format, doc.text(), &doc);
            Ok(0)
        }
        Verb::Image {
            common,
            node,
            generator,
        } => {
            let cfg = load(&common)?;
            let mut text = String::new();
            let mut docs = Vec::new();
            for inst in &cfg.instances {
                if node == 0 || node > inst.rank() {
                    return Err(ConfigError::Invalid {
                        field: "node",
                        msg: format!("{} is outside 1..={} on {}", node, inst.rank(), inst.name),
                    });
                }
                let img =
                    GkloImage::build_with(inst, common.corrupt.map(Into::into)).map_err(|e| {
                        ConfigError::Invalid {
                            field: "instance",
                            msg: e.to_string(),
                        }
                    })?;
                let i = node - 1;
                let body = match generator {
                    Generator::Theta => img.xi_in(i, Spectral::U).to_string(),
                    Generator::B => img
                        .b_dist(i, Spectral::U)
                        .map_err(|e| ConfigError::Invalid {
                            field: "instance",
                            msg: e.to_string(),
                        })?
                        .to_string(),
                };
                let label = match generator {
                    Generator::Theta => format!("Theta_{node}(u)"),
                    Generator::B => format!("B_{node}(u)"),
                };
                text.push_str(&format!("{} on {}:\n{}\n", label, inst.name, body));
                docs.push(report::ImageDoc {
                    instance: inst.name.clone(),
                    generator: label,
                    image: body,
                });
            }
            emit(cfg.format, text, &report::Envelope::new("image", docs));
            Ok(0)
        }
        Verb::Identities(c) => {
            let cfg = load(&c)?;
            let rep = igklo_core::relcheck::identity_suite();
            let ok = rep.all_pass();
            let text = report::report_text(&rep);
            emit(cfg.format, text, &report::Envelope::new("identities", rep));
            Ok(if ok { 0 } else { EXIT_FAIL })
        }
        Verb::Check(c) => {
            let cfg = load(&c)?;
            let doc = report::run_report(&cfg, c.corrupt.map(Into::into)).map_err(|e| {
                ConfigError::Invalid {
                    field: "instance",
                    msg: e.to_string(),
                }
            })?;
            let ok = doc.all_pass;
            emit(cfg.format, doc.text(), &doc);
            Ok(if ok { 0 } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
