//! `qcat`: entanglement sweeps, scaling fits and the validation suite for
//! the cusp, butterfly and molar catastrophe models.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qcat_core::config::{parse_mu_list, Command, Format, RangeConfig, RunConfig};
use qcat_core::fixed_points::find_fixed_points;
use qcat_core::io;
use qcat_core::sweep::{scaling_study, sweep_entropy, FitForm};
use qcat_core::validate::run_checks;
use qcat_core::{Error, Model, Result};

const THREADS_ENV: &str = "QCAT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "qcat",
    version,
    about = "Ground-state entanglement of quantum catastrophe models"
)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Finite-mu entropy over a parameter range.
    Sweep(Common),
    /// Macroscopic-limit entropy over a parameter range.
    Asymptote(Common),
    /// Peak positions over several mu and a power-law fit.
    Scaling {
        #[command(flatten)]
        common: Common,
        /// Comma-separated mu values, e.g. 10,20,40,70.
        #[arg(long, value_parser = parse_mu_arg)]
        mu_list: Option<MuList>,
        #[arg(long, value_parser = parse_fit_form)]
        fit_form: Option<FitForm>,
        /// Critical value subtracted before the fit in offset form.
        #[arg(long, allow_negative_numbers = true)]
        x_c: Option<f64>,
    },
    /// Stationary points of the potential.
    FixedPoints(Common),
    /// Cross-module acceptance checks; exits nonzero if any fails.
    Validate {
        /// Skip finite-mu sweeps and scaling fits.
        #[arg(long)]
        skip_slow: bool,
        #[arg(long)]
        format: Option<Format>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    model: Option<Model>,
    #[arg(long)]
    mu: Option<f64>,
    /// Swept parameter (A, A2, A4, gamma or theta).
    #[arg(long)]
    param: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Fixed parameter value, e.g. `--set A4=-2`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_assignment, allow_hyphen_values = true)]
    set: Vec<(String, f64)>,
    /// Beam-splitter mixing angle (cusp and butterfly only).
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Entropy refinement tolerance in bits.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_assignment(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Clone)]
struct MuList(Vec<f64>);

fn parse_mu_arg(s: &str) -> std::result::Result<MuList, String> {
    parse_mu_list(s).map(MuList).map_err(|e| e.to_string())
}

fn parse_fit_form(s: &str) -> std::result::Result<FitForm, String> {
    match s {
        "plain" => Ok(FitForm::Plain),
        "offset" => Ok(FitForm::Offset),
        _ => Err(format!("expected plain or offset, got `{s}`")),
    }
}

impl Common {
    fn into_config(self, command: Command) -> RunConfig {
        let mut params: BTreeMap<String, f64> = self.set.into_iter().collect();
        if let Some(t) = self.theta {
            params.insert("theta".into(), t);
        }
        RunConfig {
            command: Some(command),
            model: self.model,
            params,
            param: self.param,
            mu: self.mu,
            range: RangeConfig {
                min: self.min,
                max: self.max,
                steps: self.steps,
            },
            output: self.output,
            format: self.format,
            tolerance: self.tolerance,
            ..Default::default()
        }
    }
}

fn flags_config(cmd: Option<Cmd>) -> RunConfig {
    match cmd {
        None => RunConfig::default(),
        Some(Cmd::Sweep(c)) => c.into_config(Command::Sweep),
        Some(Cmd::Asymptote(c)) => c.into_config(Command::Asymptote),
        Some(Cmd::FixedPoints(c)) => c.into_config(Command::FixedPoints),
        Some(Cmd::Scaling {
            common,
            mu_list,
            fit_form,
            x_c,
        }) => RunConfig {
            mu_list: mu_list.map(|m| m.0),
            fit_form,
            x_c,
            ..common.into_config(Command::Scaling)
        },
        Some(Cmd::Validate {
            skip_slow,
            format,
            output,
        }) => RunConfig {
            command: Some(Command::Validate),
            skip_slow: skip_slow.then_some(true),
            format,
            output,
            ..Default::default()
        },
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidParameter {
            key: THREADS_ENV.into(),
            reason: format!("expected a positive integer, got `{raw}`"),
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Contract(e.to_string()))
}

fn run(cfg: &RunConfig) -> Result<bool> {
    cfg.validate()?;
    let format = cfg.format.unwrap_or_default();
    let out = cfg.output.as_deref();
    match cfg.command()? {
        Command::Sweep | Command::Asymptote => {
            let mu = match cfg.command()? {
                Command::Sweep => cfg.mu.expect("validated"),
                _ => f64::INFINITY,
            };
            let sr = sweep_entropy(
                &cfg.template()?,
                &cfg.swept_param()?,
                cfg.param_range()?,
                mu,
                &cfg.settings(),
            )?;
            let text = match format {
                Format::Csv => io::sweep_to_csv(&sr)?,
                Format::Json => io::sweep_to_json(&sr)?,
            };
            io::write_output(out, &text)?;
        }
        Command::Scaling => {
            if format == Format::Csv && cfg.format.is_some() {
                return Err(Error::InvalidParameter {
                    key: "format".into(),
                    reason: "scaling results are written as JSON".into(),
                });
            }
            let (form, x_c) = cfg.fit()?;
            let study = scaling_study(
                &cfg.template()?,
                &cfg.swept_param()?,
                cfg.scaling_range()?,
                cfg.mu_list.as_deref().expect("validated"),
                form,
                x_c,
                &cfg.settings(),
            )?;
            io::write_output(out, &io::scaling_to_json(&study)?)?;
        }
        Command::FixedPoints => {
            let fps = find_fixed_points(&cfg.template()?)?;
            io::write_output(out, &io::fixed_points_to_json(&fps)?)?;
        }
        Command::Validate => {
            let checks = run_checks(!cfg.skip_slow.unwrap_or(false));
            let text = match format {
                Format::Csv => checks.iter().map(|c| c.line() + "\n").collect(),
                Format::Json => serde_json::to_string_pretty(&checks).map_err(|e| Error::Parse(e.to_string()))? + "\n",
            };
            io::write_output(out, &text)?;
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn error_record(e: &Error) -> String {
    let mut rec = json!({ "kind": e.kind(), "message": e.to_string() });
    if let Error::InvalidParameter { key, .. } = e {
        rec["key"] = json!(key);
    }
    json!({ "error": rec }).to_string()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| {
        let flags = flags_config(cli.command);
        let cfg = match &cli.config {
            Some(path) => RunConfig::from_file(path)?.merge(flags),
            None => flags,
        };
        log::debug!("effective configuration: {cfg:?}");
        run(&cfg)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", error_record(&e));
            ExitCode::from(2)
        }
    }
}
