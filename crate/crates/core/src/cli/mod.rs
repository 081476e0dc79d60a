//! The `lab` command line.
//!
//! Every subcommand produces a [`Report`]: a table of rows followed by a
//! table of named checks. Settings come from flags first, then from a flat
//! `key = value` file given with `--config`, then from the documented
//! defaults. Output is deterministic for a fixed configuration.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};

mod commands;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Zd,
    Heis,
    Free,
    Zinf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "lab", version, about = "Experiments on word-metric balls, covering sequences and ratio averages")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Group [default: heis]
    #[arg(long, global = true, value_enum)]
    pub group: Option<GroupArg>,
    /// Rank of zd, free or zinf [default: 2]
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Flat key = value file; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file [default: stdout]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every random choice [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Element budget for explicit enumeration [default: 5000000]
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Stages built by `stack` [default: 3]
    #[arg(long, global = true)]
    pub stages: Option<u32>,
    /// Number of indices scanned by density estimates [default: 64]
    #[arg(long, global = true)]
    pub horizon: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ball sizes |B_n| and a log-log growth slope
    Balls {
        /// Largest radius [default: 16 for heis, 50 for zd, 8 for free, 10 for zinf]
        #[arg(long)]
        max: Option<u64>,
        /// Slope window start [default: 8]
        #[arg(long)]
        lo: Option<u64>,
        /// Slope window end [default: 16, capped at max]
        #[arg(long)]
        hi: Option<u64>,
    },
    /// Central powers inside Heisenberg balls and their widest gaps
    Mset {
        /// First radius [default: 0]
        #[arg(long)]
        r_lo: Option<u64>,
        /// Last radius [default: 12]
        #[arg(long)]
        r_hi: Option<u64>,
    },
    /// An incremental sequence of multiplicity k at the identity
    Incremental {
        /// Multiplicity [default: 3]
        #[arg(long)]
        k: Option<usize>,
        /// Largest radius tried [default: 63 for heis, 12 otherwise]
        #[arg(long)]
        r_max: Option<u64>,
        /// Search nodes per radius [default: 2000000]
        #[arg(long)]
        nodes: Option<u64>,
    },
    /// The averaging index sequence n(i) with block data
    Avgseq {
        /// First index [default: 1]
        #[arg(long)]
        lo: Option<u64>,
        /// Last index [default: 8]
        #[arg(long)]
        hi: Option<u64>,
    },
    /// Ratio averages of the translation action of Z along the index sequence
    Hopf {
        /// Support of phi as s:value pairs [default: 0:1,5:1]
        #[arg(long)]
        phi: Option<String>,
        /// Support of psi as s:value pairs [default: 0:1]
        #[arg(long)]
        psi: Option<String>,
        /// Sample points x [default: 0]
        #[arg(long)]
        points: Option<String>,
        /// First index [default: 1]
        #[arg(long)]
        lo: Option<u64>,
        /// Last index [default: 12]
        #[arg(long)]
        hi: Option<u64>,
        /// Extra random systems drawn from the seed [default: 0]
        #[arg(long)]
        systems: Option<usize>,
    },
    /// Cutting-and-stacking tower for the Heisenberg group
    Stack {
        /// Directory for per-stage JSON snapshots [default: next to --out, or none]
        #[arg(long)]
        snapshots: Option<PathBuf>,
        /// Place fresh intervals with seeded random gaps
        #[arg(long)]
        shuffle: bool,
        /// Largest translate radius the provider tries [default: 40]
        #[arg(long)]
        max_radius: Option<u64>,
    },
    /// Superlevel masses of finite-horizon ratio limsups on Z
    Maximal {
        /// Non-negative support of phi [default: 0:2,3:1]
        #[arg(long)]
        phi: Option<String>,
        /// Non-negative support of psi [default: 0:1,1:1,4:1]
        #[arg(long)]
        psi: Option<String>,
        /// Threshold grid [default: 1/4,1/2,1,2,4,8,16]
        #[arg(long)]
        grid: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Balls { .. } => "balls",
            Command::Mset { .. } => "mset",
            Command::Incremental { .. } => "incremental",
            Command::Avgseq { .. } => "avgseq",
            Command::Hopf { .. } => "hopf",
            Command::Stack { .. } => "stack",
            Command::Maximal { .. } => "maximal",
        }
    }
}

/// Flag values, falling back to the config file.
pub struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut file = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("config line {}: expected key = value", no + 1)))?;
            file.insert(k.trim().replace('-', "_"), v.trim().to_string());
        }
        Ok(Settings { file })
    }

    pub fn empty() -> Self {
        Settings { file: BTreeMap::new() }
    }

    pub fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    pub fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| Error::Invalid(format!("config key {key}: cannot parse {s:?}"))),
        }
    }

    pub fn value_enum<T: ValueEnum>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            None => Ok(default),
            Some(s) => T::from_str(s, true).map_err(|e| Error::Invalid(format!("config key {key}: {e}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
    /// A measured value, not a pass/fail condition.
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unknown => "unknown",
            Status::Info => "info",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        let status = if passed { Status::Pass } else { Status::Fail };
        self.checks.push(Check { name: name.into(), status, detail: detail.into() });
    }

    pub fn note(&mut self, name: &str, status: Status, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), status, detail: detail.into() });
    }

    /// Records a budget or exhaustion error as an unknown outcome; other
    /// errors are passed through.
    pub fn absorb(&mut self, name: &str, err: Error) -> Result<()> {
        match err {
            Error::Budget { .. } | Error::Exhausted { .. } => {
                self.note(name, Status::Unknown, err.to_string());
                Ok(())
            }
            e => Err(e),
        }
    }

    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Unknown) {
            Status::Unknown
        } else {
            Status::Pass
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Pass | Status::Info => 0,
            Status::Fail => 1,
            Status::Unknown => 2,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let csv_err = |e: csv::Error| Error::Internal(e.to_string());
        let mut rows = csv::Writer::from_writer(Vec::new());
        rows.write_record(&self.columns).map_err(csv_err)?;
        for r in &self.rows {
            rows.write_record(r).map_err(csv_err)?;
        }
        let mut checks = csv::Writer::from_writer(Vec::new());
        checks.write_record(["check", "status", "detail"]).map_err(csv_err)?;
        for c in &self.checks {
            checks.write_record([c.name.as_str(), &c.status.to_string(), c.detail.as_str()]).map_err(csv_err)?;
        }
        let finish = |w: csv::Writer<Vec<u8>>| -> Result<String> {
            let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
        };
        Ok(format!("{}\n{}", finish(rows)?, finish(checks)?))
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Out<'a> {
            command: &'a str,
            status: Status,
            columns: &'a [String],
            rows: &'a [Vec<String>],
            checks: &'a [Check],
        }
        let out = Out {
            command: &self.command,
            status: self.status(),
            columns: &self.columns,
            rows: &self.rows,
            checks: &self.checks,
        };
        serde_json::to_string_pretty(&out).map(|s| s + "\n").map_err(|e| Error::Internal(e.to_string()))
    }
}

/// Per-stage snapshot file names: `<stem>-stage<n>.json` beside the output,
/// or `stage<n>.json` inside `--snapshots`.
pub(crate) fn snapshot_path(dir: Option<&Path>, out: Option<&Path>, n: u32) -> Option<PathBuf> {
    if let Some(d) = dir {
        return Some(d.join(format!("stage{n}.json")));
    }
    let out = out?;
    let stem = out.file_stem()?.to_string_lossy().into_owned();
    Some(out.with_file_name(format!("{stem}-stage{n}.json")))
}

/// Runs a parsed command line and returns the report.
pub fn run(cli: &Cli) -> Result<Report> {
    commands::dispatch(cli, &load_settings(cli)?)
}

fn load_settings(cli: &Cli) -> Result<Settings> {
    match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
            Settings::parse(&text)
        }
        None => Ok(Settings::empty()),
    }
}

/// Entry point of the `lab` binary. Returns the process exit code.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lab: {e}");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let settings = load_settings(cli)?;
    let report = commands::dispatch(cli, &settings)?;
    let format = settings.value_enum(cli.format, "format", Format::Csv)?;
    let text = match format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    };
    let out: Option<PathBuf> = settings.opt(cli.out.clone(), "out")?;
    match out {
        Some(p) => std::fs::write(&p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(report.exit_code())
}

#[cfg(test)]
mod tests;
