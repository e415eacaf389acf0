//! `bosonrng` — command-line workflows for the Boson-sampling random
//! number toolkit.
//!
//! Subcommands wire the library into reproducible, file-driven runs:
//!
//! - `gen`           generate a bit file from a JSON run config
//! - `dist`          write an exact output distribution as CSV
//! - `entropy-sweep` sweep mesh angles and write per-label entropy CSVs
//! - `test`          run the statistical battery over a bit file
//! - `rate`          compare retained bits/event against a branching baseline
//! - `perm`          print the permanent of a matrix file
//!
//! Reproducibility contract: every command that consumes randomness takes a
//! single seed (`--seed` or the config's `"seed"`); any sub-streams are
//! derived from it with the library's counter-based splitter, never from
//! the clock. Repeating a command with identical inputs and seed produces
//! byte-identical artifacts.
//!
//! Every file-writing command drops a `*.manifest.json` sidecar next to its
//! output recording the resolved configuration, seed, tool version, and
//! SHA-256 hashes of all inputs and outputs. Across identical reruns the
//! manifest differs only in its `duration_ms` field. The manifest schema is
//! published at `docs/manifest.schema.json`.
//!
//! Exit codes: `0` success, `2` usage/configuration error, `3`
//! data/precondition error, `4` numerical-integrity error.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use bosonrng_core::entropy::parameter_sweep;
use bosonrng_core::fock::{
    full_distribution, postselect_collision_free, FockState, OutputDistribution,
};
use bosonrng_core::interferometer::{build_unitary, MeshParameters};
use bosonrng_core::linalg::ComplexMatrix;
use bosonrng_core::permanent::{permanent_naive, permanent_ryser};
use bosonrng_core::pipeline::{
    generate_bits, rate_comparison, read_bits_ascii, read_bits_packed, write_bits_ascii,
    write_bits_packed, GeneratorConfig, Pairing, UnitarySource,
};
use bosonrng_core::randtests::{battery_passed, render_table, run_battery};
use bosonrng_core::Error;
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Boson-sampling random number toolkit: seeded, file-driven, manifest-tracked.
#[derive(Parser, Debug)]
#[command(name = "bosonrng", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random bit file from a JSON run configuration.
    ///
    /// The config names a unitary (matrix or mesh JSON, relative paths
    /// resolved against the config's directory), an input occupation
    /// string, and optional postselection/pairing/seed settings.
    Gen {
        /// Path to the run configuration (JSON).
        config: PathBuf,
        /// Number of bits to generate (must be positive).
        #[arg(long)]
        bits: usize,
        /// Output bit file.
        #[arg(long)]
        out: PathBuf,
        /// Bit file encoding.
        #[arg(long, value_enum, default_value_t = BitFormat::Packed)]
        format: BitFormat,
        /// Seed override; takes precedence over the config's "seed".
        #[arg(long)]
        seed: Option<u64>,
    },

    /// Write the exact output distribution of a unitary + input as CSV.
    ///
    /// Rows are `"occupation",probability` in lexicographic state order;
    /// outputs that carry exactly zero probability are omitted.
    #[command(group = ArgGroup::new("source").required(true).args(["unitary", "mesh"]))]
    Dist {
        /// Unitary matrix file (JSON).
        #[arg(long)]
        unitary: Option<PathBuf>,
        /// Mesh parameter file (JSON); the unitary is built from it.
        #[arg(long)]
        mesh: Option<PathBuf>,
        /// Input occupation string, e.g. "1,1,0,0,0".
        #[arg(long)]
        input: String,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
        /// Restrict to collision-free outputs and renormalize.
        #[arg(long)]
        postselect: bool,
    },

    /// Sweep labeled mesh angles over [0, 2π) and write one entropy CSV per
    /// label into a directory.
    EntropySweep {
        /// Mesh parameter file (JSON).
        #[arg(long)]
        mesh: PathBuf,
        /// Comma-separated angle labels, e.g. "1I,1E,2I".
        #[arg(long)]
        labels: String,
        /// Input occupation string.
        #[arg(long)]
        input: String,
        /// Number of uniform grid points per curve.
        #[arg(long, default_value_t = 128)]
        grid: usize,
        /// Output directory (created if missing); one `<label>.csv` each.
        #[arg(long)]
        out: PathBuf,
    },

    /// Run the statistical test battery over a bit file and write a JSON
    /// report (an array of per-test results); prints a summary table.
    Test {
        /// Input bit file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Bit file encoding. Packed files are read as 8 bits per byte, so
        /// the bit count is always a multiple of 8; use ascii for exact
        /// non-multiple-of-8 lengths.
        #[arg(long, value_enum, default_value_t = BitFormat::Packed)]
        format: BitFormat,
        /// Output report file (JSON).
        #[arg(long)]
        out: PathBuf,
    },

    /// Compare retained bits per sampling event between the Boson generator
    /// and the single-photon branching baseline; prints a JSON report.
    Rate {
        /// Interferometer modes M (M ≥ N).
        #[arg(long)]
        modes: usize,
        /// Input photons N (N ≥ 1).
        #[arg(long)]
        photons: usize,
        /// Sampling events per generator (two events feed one extraction
        /// pair; at least 2).
        #[arg(long)]
        pairs: usize,
        /// Seed for both simulated generators.
        #[arg(long)]
        seed: u64,
    },

    /// Compute the permanent of a square complex matrix file and print it
    /// as JSON `{"re": …, "im": …}`.
    Perm {
        /// Matrix file (JSON).
        #[arg(long)]
        matrix: PathBuf,
        /// Use the brute-force permutation-sum oracle instead of the
        /// Gray-code algorithm.
        #[arg(long)]
        naive: bool,
    },
}

/// On-disk bit encodings shared by `gen` and `test`.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BitFormat {
    /// 8 bits per byte, MSB first, final byte zero-padded.
    Packed,
    /// One '0'/'1' character per bit, single trailing newline.
    Ascii,
}

impl BitFormat {
    fn as_str(self) -> &'static str {
        match self {
            BitFormat::Packed => "packed",
            BitFormat::Ascii => "ascii",
        }
    }
}

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

/// CLI-level error: either a usage problem detected here or a library error.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl CliError {
    /// Stable exit-code mapping: 2 usage/config, 3 data/precondition,
    /// 4 numerical integrity.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Config(_) => 2,
                Error::NumericalIntegrity(_) => 4,
                _ => 3,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

// ---------------------------------------------------------------------------
// Run manifests
// ---------------------------------------------------------------------------

/// Provenance sidecar written next to every file artifact.
///
/// Serialized field order is fixed, hash maps are sorted, and the tool
/// version is compiled in, so two runs with identical inputs and seed
/// produce manifests that differ only in `duration_ms`.
#[derive(Serialize)]
struct RunManifest {
    /// Subcommand that produced the artifact.
    command: &'static str,
    /// Crate version of the producing binary.
    tool_version: &'static str,
    /// The single user-supplied seed, when the command takes one.
    seed: Option<u64>,
    /// Resolved configuration: every input the run depended on, with paths
    /// as resolved at runtime.
    config: serde_json::Value,
    /// SHA-256 of each input file, keyed by role ("config", "unitary", …).
    input_hashes: BTreeMap<String, String>,
    /// SHA-256 of each output artifact, keyed by file name.
    output_hashes: BTreeMap<String, String>,
    /// Bits written/read, for bit-stream commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    bit_count: Option<u64>,
    /// Wall-clock run time. The only field that varies between reruns.
    duration_ms: u64,
}

impl RunManifest {
    fn new(command: &'static str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            input_hashes: BTreeMap::new(),
            output_hashes: BTreeMap::new(),
            bit_count: None,
            duration_ms: 0,
        }
    }

    fn record_input(&mut self, role: &str, path: &Path) -> CliResult<()> {
        self.input_hashes
            .insert(role.to_string(), sha256_file(path)?);
        Ok(())
    }

    fn record_output(&mut self, path: &Path) -> CliResult<()> {
        let name = path
            .file_name()
            .unwrap_or(path.as_os_str())
            .to_string_lossy()
            .into_owned();
        self.output_hashes.insert(name, sha256_file(path)?);
        Ok(())
    }

    /// Stamps the duration and writes the manifest to `path`.
    fn write(mut self, path: &Path, started: Instant) -> CliResult<()> {
        self.duration_ms = started.elapsed().as_millis() as u64;
        let body = serde_json::to_string_pretty(&self).map_err(Error::from)?;
        std::fs::write(path, format!("{body}\n"))?;
        Ok(())
    }
}

/// `<artifact>.manifest.json` next to the artifact.
fn manifest_path(artifact: &Path) -> PathBuf {
    let mut s = artifact.as_os_str().to_os_string();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

// ---------------------------------------------------------------------------
// Run configuration files (gen)
// ---------------------------------------------------------------------------

/// Pairing policy as spelled in config files: `"consecutive"` or
/// `{"random_pair": {"t": 3}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PairingSpec {
    Consecutive,
    RandomPair { t: usize },
}

impl From<&PairingSpec> for Pairing {
    fn from(spec: &PairingSpec) -> Self {
        match spec {
            PairingSpec::Consecutive => Pairing::Consecutive,
            PairingSpec::RandomPair { t } => Pairing::RandomPair { t: *t },
        }
    }
}

/// Generation run configuration. Exactly one of `unitary`/`mesh` names the
/// source; relative paths are resolved against the config file's directory.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfigFile {
    #[serde(default)]
    unitary: Option<PathBuf>,
    #[serde(default)]
    mesh: Option<PathBuf>,
    input: String,
    #[serde(default)]
    postselect: bool,
    #[serde(default)]
    pairing: Option<PairingSpec>,
    #[serde(default)]
    seed: Option<u64>,
}

/// Resolves `path` against the directory containing `config_path`.
fn resolve_against_config(config_path: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        match config_path.parent() {
            Some(dir) if !dir.as_os_str().is_empty() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

fn parse_input_state(s: &str) -> CliResult<FockState> {
    Ok(FockState::from_str(s)?)
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli.command, started) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command, started: Instant) -> CliResult<()> {
    match command {
        Command::Gen {
            config,
            bits,
            out,
            format,
            seed,
        } => cmd_gen(&config, bits, &out, format, seed, started),
        Command::Dist {
            unitary,
            mesh,
            input,
            out,
            postselect,
        } => cmd_dist(
            unitary.as_deref(),
            mesh.as_deref(),
            &input,
            &out,
            postselect,
            started,
        ),
        Command::EntropySweep {
            mesh,
            labels,
            input,
            grid,
            out,
        } => cmd_entropy_sweep(&mesh, &labels, &input, grid, &out, started),
        Command::Test { input, format, out } => cmd_test(&input, format, &out, started),
        Command::Rate {
            modes,
            photons,
            pairs,
            seed,
        } => cmd_rate(modes, photons, pairs, seed),
        Command::Perm { matrix, naive } => cmd_perm(&matrix, naive),
    }
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

fn cmd_gen(
    config_path: &Path,
    bits: usize,
    out: &Path,
    format: BitFormat,
    seed_flag: Option<u64>,
    started: Instant,
) -> CliResult<()> {
    if bits == 0 {
        return Err(usage("--bits must be positive"));
    }

    let raw = std::fs::read_to_string(config_path)?;
    let file: RunConfigFile = serde_json::from_str(&raw)
        .map_err(|e| Error::Config(format!("config {}: {e}", config_path.display())))?;

    let mut manifest = RunManifest::new("gen", None, serde_json::Value::Null);
    manifest.record_input("config", config_path)?;

    let (source, source_key, source_path) = match (&file.unitary, &file.mesh) {
        (Some(u), None) => {
            let p = resolve_against_config(config_path, u);
            manifest.record_input("unitary", &p)?;
            (
                UnitarySource::Matrix(ComplexMatrix::read_json_file(&p)?),
                "unitary",
                p,
            )
        }
        (None, Some(m)) => {
            let p = resolve_against_config(config_path, m);
            manifest.record_input("mesh", &p)?;
            (
                UnitarySource::Mesh(MeshParameters::read_json_file(&p)?),
                "mesh",
                p,
            )
        }
        _ => {
            return Err(Error::Config(format!(
                "config {}: exactly one of \"unitary\" or \"mesh\" must be set",
                config_path.display()
            ))
            .into())
        }
    };

    let seed = seed_flag.or(file.seed).ok_or_else(|| {
        Error::Config("no seed: pass --seed or set \"seed\" in the config".to_string())
    })?;
    let input = parse_input_state(&file.input)?;
    let pairing_spec = file.pairing.unwrap_or(PairingSpec::Consecutive);

    let cfg = GeneratorConfig {
        source,
        input,
        postselect_collision_free: file.postselect,
        pairing: Pairing::from(&pairing_spec),
        seed,
    };
    let stream = generate_bits(&cfg, bits)?;

    match format {
        BitFormat::Packed => write_bits_packed(out, stream.bits())?,
        BitFormat::Ascii => write_bits_ascii(out, stream.bits())?,
    }

    manifest.seed = Some(seed);
    manifest.config = serde_json::json!({
        source_key: source_path.display().to_string(),
        "input": file.input,
        "postselect": file.postselect,
        "pairing": pairing_spec,
        "bits": bits,
        "format": format.as_str(),
    });
    manifest.bit_count = Some(stream.len() as u64);
    manifest.record_output(out)?;
    manifest.write(&manifest_path(out), started)?;

    println!(
        "wrote {} bits ({}) to {} ({} sample pairs consumed)",
        stream.len(),
        format.as_str(),
        out.display(),
        stream.meta().sample_pairs_consumed
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// dist
// ---------------------------------------------------------------------------

fn cmd_dist(
    unitary: Option<&Path>,
    mesh: Option<&Path>,
    input: &str,
    out: &Path,
    postselect: bool,
    started: Instant,
) -> CliResult<()> {
    let mut manifest = RunManifest::new("dist", None, serde_json::Value::Null);
    // clap's arg group guarantees exactly one source flag.
    let (u, source_key, source_path) = match (unitary, mesh) {
        (Some(p), None) => {
            manifest.record_input("unitary", p)?;
            (ComplexMatrix::read_json_file(p)?, "unitary", p)
        }
        (None, Some(p)) => {
            manifest.record_input("mesh", p)?;
            (
                build_unitary(&MeshParameters::read_json_file(p)?)?,
                "mesh",
                p,
            )
        }
        _ => unreachable!("clap enforces exactly one of --unitary/--mesh"),
    };

    let input_state = parse_input_state(input)?;
    let dist = full_distribution(&u, &input_state)?;
    let dist = if postselect {
        postselect_collision_free(&dist)?
    } else {
        dist
    };

    // Unreachable outputs (probability exactly zero, e.g. through an
    // identity or otherwise sparse unitary) are dropped: the CSV lists the
    // distribution's support.
    let kept: Vec<(FockState, f64)> = dist
        .entries()
        .iter()
        .filter(|(_, p)| *p != 0.0)
        .cloned()
        .collect();
    let support = OutputDistribution::from_entries(
        dist.input().clone(),
        dist.unitary_id().to_string(),
        kept,
    )?;
    support.write_csv_file(out)?;

    manifest.config = serde_json::json!({
        source_key: source_path.display().to_string(),
        "input": input,
        "postselect": postselect,
    });
    manifest.record_output(out)?;
    manifest.write(&manifest_path(out), started)?;

    println!(
        "wrote {} rows to {}",
        support.entries().len(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// entropy-sweep
// ---------------------------------------------------------------------------

fn cmd_entropy_sweep(
    mesh_path: &Path,
    labels: &str,
    input: &str,
    grid: usize,
    out_dir: &Path,
    started: Instant,
) -> CliResult<()> {
    let labels: Vec<String> = labels
        .split(',')
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect();
    if labels.is_empty() {
        return Err(usage(
            "--labels must name at least one angle, e.g. \"1I,2E\"",
        ));
    }

    let mut manifest = RunManifest::new("entropy-sweep", None, serde_json::Value::Null);
    manifest.record_input("mesh", mesh_path)?;

    let mesh = MeshParameters::read_json_file(mesh_path)?;
    let input_state = parse_input_state(input)?;
    let curves = parameter_sweep(&mesh, &labels, &input_state, grid)?;

    std::fs::create_dir_all(out_dir)?;
    for curve in &curves {
        let path = out_dir.join(format!("{}.csv", curve.parameter_label));
        curve.write_csv_file(&path)?;
        manifest.record_output(&path)?;
    }

    manifest.config = serde_json::json!({
        "mesh": mesh_path.display().to_string(),
        "labels": labels,
        "input": input,
        "grid": grid,
    });
    manifest.write(&out_dir.join("sweep.manifest.json"), started)?;

    println!(
        "wrote {} curves ({} grid points each) to {}",
        curves.len(),
        grid,
        out_dir.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

fn cmd_test(input: &Path, format: BitFormat, out: &Path, started: Instant) -> CliResult<()> {
    let bits = match format {
        BitFormat::Packed => read_bits_packed(input, None)?,
        BitFormat::Ascii => read_bits_ascii(input)?,
    };
    if bits.is_empty() {
        return Err(Error::InsufficientData(format!("{} holds no bits", input.display())).into());
    }

    let results = run_battery(&bits);
    if results.iter().all(|r| r.was_skipped()) {
        return Err(Error::InsufficientData(format!(
            "{} bits is below the minimum of every test in the battery",
            bits.len()
        ))
        .into());
    }

    let report = serde_json::to_string_pretty(&results).map_err(Error::from)?;
    std::fs::write(out, format!("{report}\n"))?;

    let mut manifest = RunManifest::new(
        "test",
        None,
        serde_json::json!({
            "in": input.display().to_string(),
            "format": format.as_str(),
            "alpha": 0.01,
        }),
    );
    manifest.record_input("bits", input)?;
    manifest.bit_count = Some(bits.len() as u64);
    manifest.record_output(out)?;
    manifest.write(&manifest_path(out), started)?;

    print!("{}", render_table(&results));
    println!(
        "battery: {}",
        if battery_passed(&results) {
            "PASS"
        } else {
            "FAIL"
        }
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// rate
// ---------------------------------------------------------------------------

fn cmd_rate(modes: usize, photons: usize, pairs: usize, seed: u64) -> CliResult<()> {
    if photons == 0 {
        return Err(usage("--photons must be at least 1"));
    }
    if modes < photons {
        return Err(usage(format!(
            "--modes must be at least --photons (got M = {modes}, N = {photons})"
        )));
    }
    if pairs < 2 {
        return Err(usage(
            "--pairs must be at least 2 (two events feed one extraction pair)",
        ));
    }

    let report = rate_comparison(modes, photons, pairs, seed)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(Error::from)?
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// perm
// ---------------------------------------------------------------------------

/// Complex permanent as printed by `perm`.
#[derive(Serialize)]
struct PermanentValue {
    re: f64,
    im: f64,
}

fn cmd_perm(matrix: &Path, naive: bool) -> CliResult<()> {
    let m = ComplexMatrix::read_json_file(matrix)?;
    let value = if naive {
        permanent_naive(&m)?
    } else {
        permanent_ryser(&m)?
    };
    let printed = PermanentValue {
        re: value.re,
        im: value.im,
    };
    println!("{}", serde_json::to_string(&printed).map_err(Error::from)?);
    Ok(())
}

// ---------------------------------------------------------------------------
