//! `faithful`: faithfulness analysis, channel reconstruction and noise studies.
//!
//! Exit codes: 0 success, 1 input or IO error, 2 mathematical refusal
//! (unfaithful probe or probe set).

mod files;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use faithful_core::faithfulness::{analyze, isotropic, r_check_with_tol, werner, FaithfulnessReport};
use faithful_core::io::{read_channel, read_operator, read_state, to_json_pretty, ChannelFile, StateFile};
use faithful_core::linalg::{eigh, ComplexMatrix};
use faithful_core::objects::factories;
use faithful_core::reconstruction::{
    channel_output, patch, pseudo_reconstruct_with, reconstruct_with, ReconstructionReport,
};
use faithful_core::sim::{run_study, summary_json, write_csv};
use faithful_core::{BipartiteState, ChoiOperator, Error};
use serde::Serialize;

use files::{base_dir, PatchManifest, StudyConfig};

#[derive(Parser)]
#[command(name = "faithful", version, about = "Faithful probe states for quantum channel tomography")]
struct Cli {
    /// Relative singular-value cutoff for ranks and pseudo-inverses.
    #[arg(long, global = true, env = "FAITHFUL_TOL", default_value_t = 1e-10)]
    rel_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Faithfulness report for a state file or a named family.
    Analyze(AnalyzeArgs),
    /// Recover a Choi operator from a probe and its channel output.
    Reconstruct(ReconstructArgs),
    /// Recover a Choi operator from a set of probes and outputs.
    Patch {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Monte-Carlo noise study; writes one CSV row per trial.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// JSON summary destination.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Apply a channel to the first factor of a probe state.
    Apply {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        probe: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a state file.
    MakeState {
        #[command(subcommand)]
        kind: StateKind,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Write a channel file in Kraus form.
    MakeChannel {
        #[command(subcommand)]
        kind: ChannelKind,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Werner,
    Isotropic,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// State JSON (explicit matrix or family shorthand).
    file: Option<PathBuf>,
    #[arg(long, conflicts_with = "file", requires_all = ["d", "f"])]
    family: Option<FamilyArg>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    f: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    probe: PathBuf,
    /// The measured output `(ℰ ⊗ 𝕀)(R)`, as a state file or bare matrix.
    #[arg(long)]
    output_state: PathBuf,
    /// For unfaithful probes, emit the projected recovery and its projector.
    #[arg(long)]
    allow_partial: bool,
    /// Re-apply the recovered channel and report deviations.
    #[arg(long)]
    verify: bool,
    /// Seed for the random batch used by `--verify`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum StateKind {
    /// Maximally entangled `|I)(I|/d`.
    Bell {
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    Werner {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        f: f64,
    },
    Isotropic {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        f: f64,
    },
    /// Random mixed state of the given rank.
    Random {
        #[arg(long)]
        d_h: usize,
        #[arg(long)]
        d_k: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random pure product state.
    Product {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ChannelKind {
    Depolarizing {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        p: f64,
    },
    AmplitudeDamping {
        #[arg(long)]
        gamma: f64,
    },
    Random {
        #[arg(long)]
        d_in: usize,
        #[arg(long)]
        d_out: Option<usize>,
        #[arg(long, default_value_t = 2)]
        kraus: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Identity {
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn emit_json<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    emit(&to_json_pretty(value), output)
}

fn format_values(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(" ")
}

fn analyze_text(r: &FaithfulnessReport) -> String {
    [
        format!("dimensions: d_H = {}, d_K = {}", r.d_h, r.d_k),
        format!("singular values: {}", format_values(&r.singular_values)),
        format!("phi: {} (faithful requires {})", r.phi, r.d_h * r.d_h),
        format!("frobenius_sq: {:.12}", r.measures.frobenius_sq),
        format!("sigma_min: {:.12}", r.measures.min_singular_value),
        format!("condition_number: {}", r.measures.condition_number.as_f64()),
        format!("tolerance: {:e}", r.tolerance_used),
        format!("verdict: {}", if r.faithful { "FAITHFUL" } else { "UNFAITHFUL" }),
    ]
    .join("\n")
}

fn cmd_analyze(a: &AnalyzeArgs, rel_tol: f64) -> Result<ExitCode> {
    let state = match (&a.file, a.family) {
        (Some(path), _) => read_state(path)?,
        (None, Some(family)) => {
            let (d, f) = (a.d.context("--d is required")?, a.f.context("--f is required")?);
            match family {
                FamilyArg::Werner => werner(d, f)?,
                FamilyArg::Isotropic => isotropic(d, f)?,
            }
        }
        (None, None) => bail!("give a state file or --family with --d and --f"),
    };
    let report = analyze(&state, rel_tol)?;
    match a.format {
        Format::Text => emit(&analyze_text(&report), a.output.as_deref())?,
        Format::Json => emit_json(&report, a.output.as_deref())?,
    }
    Ok(if report.faithful { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

#[derive(Serialize)]
struct Verification {
    /// `‖(ℰ ⊗ 𝕀)(R) − R_ℰ‖_F` with `ℰ` applied through the Choi operator.
    probe_residual: f64,
    batch_size: usize,
    max_trace_deviation: f64,
    min_output_eigenvalue: f64,
}

/// `(ℰ ⊗ 𝕀)(R)` evaluated blockwise from `ℰ(ρ) = Tr₂[(I ⊗ ρᵀ) S]`.
fn apply_via_choi(choi: &ChoiOperator, probe: &BipartiteState) -> Result<ComplexMatrix> {
    let (d_h, d_k) = probe.dims();
    let d_out = choi.d_out();
    let r = probe.matrix();
    let mut out = ComplexMatrix::zeros(d_out * d_k, d_out * d_k);
    for k in 0..d_k {
        for l in 0..d_k {
            let block = ComplexMatrix::from_fn(d_h, d_h, |i, j| r[(i * d_k + k, j * d_k + l)]);
            let image = choi.apply(&block)?;
            for a in 0..d_out {
                for b in 0..d_out {
                    out[(a * d_k + k, b * d_k + l)] = image[(a, b)];
                }
            }
        }
    }
    Ok(out)
}

fn verify(choi: &ChoiOperator, probe: &BipartiteState, measured: &ComplexMatrix, seed: u64) -> Result<Verification> {
    const BATCH: usize = 16;
    let probe_residual = apply_via_choi(choi, probe)?.distance(measured);
    let (mut max_trace_deviation, mut min_output_eigenvalue) = (0.0f64, f64::INFINITY);
    for n in 0..BATCH {
        let rank = 1 + n % choi.d_in();
        let rho = factories::random_state(choi.d_in(), 1, rank, seed.wrapping_add(n as u64))?;
        let image = choi.apply(rho.matrix())?.hermitian_part();
        max_trace_deviation = max_trace_deviation.max((image.trace().re - 1.0).abs());
        let lowest = *eigh(&image)?.eigenvalues.last().expect("non-empty spectrum");
        min_output_eigenvalue = min_output_eigenvalue.min(lowest);
    }
    Ok(Verification { probe_residual, batch_size: BATCH, max_trace_deviation, min_output_eigenvalue })
}

#[derive(Serialize)]
struct FullOutput {
    #[serde(flatten)]
    report: ReconstructionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<Verification>,
}

#[derive(Serialize)]
struct PartialOutput {
    d_in: usize,
    d_out: usize,
    s_tilde: ComplexMatrix,
    q_check: ComplexMatrix,
    phi: usize,
    tolerance: f64,
}

fn cmd_reconstruct(a: &ReconstructArgs, rel_tol: f64) -> Result<ExitCode> {
    let probe = read_state(&a.probe)?;
    let measured = read_operator(&a.output_state)?;
    let rc = r_check_with_tol(&probe, rel_tol)?;
    if !rc.is_faithful() && a.allow_partial {
        let rec = pseudo_reconstruct_with(&rc, &measured)?;
        let out = PartialOutput {
            d_in: rec.d_in,
            d_out: rec.d_out,
            s_tilde: rec.s_tilde,
            q_check: rec.q_check,
            phi: rec.phi,
            tolerance: rc.tolerance(),
        };
        emit_json(&out, a.output.as_deref())?;
        return Ok(ExitCode::SUCCESS);
    }
    let choi = reconstruct_with(&rc, &measured)
        .context("rerun with --allow-partial for the projected recovery, or combine probes with `faithful patch`")?;
    let report = ReconstructionReport::new(&rc, &choi, &measured)?;
    let verification = if a.verify {
        let v = verify(&choi, &probe, &measured, a.seed)?;
        eprintln!(
            "verify: probe residual {:.3e}, max trace deviation {:.3e}, min output eigenvalue {:.3e} over {} states",
            v.probe_residual, v.max_trace_deviation, v.min_output_eigenvalue, v.batch_size
        );
        Some(v)
    } else {
        None
    };
    emit_json(&FullOutput { report, verification }, a.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_patch(manifest: &Path, output: Option<&Path>, rel_tol: f64) -> Result<ExitCode> {
    let m: PatchManifest = files::read(manifest)?;
    if m.entries.is_empty() {
        bail!("{}: manifest has no entries", manifest.display());
    }
    let base = base_dir(manifest);
    let mut probes = Vec::new();
    let mut outputs = Vec::new();
    for (n, e) in m.entries.iter().enumerate() {
        probes.push(e.probe.load(&base).with_context(|| format!("entry {n}: probe"))?);
        outputs.push(e.output.load(&base).with_context(|| format!("entry {n}: output"))?);
    }
    let probs: Vec<f64> = match m.entries.iter().map(|e| e.prob).collect::<Option<Vec<_>>>() {
        Some(p) => p,
        None if m.entries.iter().all(|e| e.prob.is_none()) => vec![1.0 / m.entries.len() as f64; m.entries.len()],
        None => bail!("{}: give a probability for every entry or for none", manifest.display()),
    };
    let choi = patch(&probes, &outputs, &probs, rel_tol)?;
    emit_json(&ChannelFile::from_choi(&choi), output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(config: &Path, output: Option<&Path>, summary: Option<&Path>, seed: Option<u64>) -> Result<ExitCode> {
    let cfg: StudyConfig = files::read(config)?;
    let base = base_dir(config);
    let channel = cfg.channel.load(&base).context("channel")?;
    let probes = cfg
        .probes
        .iter()
        .enumerate()
        .map(|(n, p)| p.state.load(&base).with_context(|| format!("probe {n}")))
        .collect::<Result<Vec<_>>>()?;
    let mut noise = cfg.noise;
    if let Some(s) = seed {
        noise.seed = s;
    }
    let mut reports = run_study(&channel, &probes, &noise, cfg.trials)?;
    for (r, p) in reports.iter_mut().zip(&cfg.probes) {
        if let Some(id) = &p.id {
            r.probe_id = id.clone();
        }
    }
    match output {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("writing {}", p.display()))?;
            write_csv(&reports, BufWriter::new(f))?;
        }
        None => {
            let stdout = std::io::stdout();
            write_csv(&reports, stdout.lock())?;
            stdout.lock().flush()?;
        }
    }
    if let Some(p) = summary {
        emit_json(&summary_json(&reports), Some(p))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_apply(channel: &Path, probe: &Path, output: Option<&Path>) -> Result<ExitCode> {
    let ch = read_channel(channel)?.to_channel()?;
    let r = read_state(probe)?;
    emit_json(&StateFile::from_state(&channel_output(&ch, &r)?), output)?;
    Ok(ExitCode::SUCCESS)
}

fn make_state(kind: &StateKind) -> Result<BipartiteState> {
    Ok(match *kind {
        StateKind::Bell { d } => BipartiteState::maximally_entangled(d)?,
        StateKind::Werner { d, f } => werner(d, f)?,
        StateKind::Isotropic { d, f } => isotropic(d, f)?,
        StateKind::Random { d_h, d_k, rank, seed } => factories::random_state(d_h, d_k, rank, seed)?,
        StateKind::Product { d, seed } => {
            let a = factories::random_state(d, 1, 1, seed)?;
            let b = factories::random_state(d, 1, 1, seed.wrapping_add(1))?;
            BipartiteState::product(a.matrix(), b.matrix())?
        }
    })
}

fn make_channel(kind: &ChannelKind) -> Result<faithful_core::Channel> {
    Ok(match *kind {
        ChannelKind::Depolarizing { d, p } => factories::depolarizing(d, p)?,
        ChannelKind::AmplitudeDamping { gamma } => factories::amplitude_damping(gamma)?,
        ChannelKind::Random { d_in, d_out, kraus, seed } => {
            factories::random_channel(d_in, d_out.unwrap_or(d_in), kraus, seed)?
        }
        ChannelKind::Identity { d } => factories::identity_channel(d)?,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    if !(cli.rel_tol > 0.0 && cli.rel_tol.is_finite()) {
        bail!("--rel-tol must be positive, got {}", cli.rel_tol);
    }
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, cli.rel_tol),
        Command::Reconstruct(a) => cmd_reconstruct(a, cli.rel_tol),
        Command::Patch { manifest, output } => cmd_patch(manifest, output.as_deref(), cli.rel_tol),
        Command::Simulate { config, output, summary, seed } => {
            cmd_simulate(config, output.as_deref(), summary.as_deref(), *seed)
        }
        Command::Apply { channel, probe, output } => cmd_apply(channel, probe, output.as_deref()),
        Command::MakeState { kind, output } => {
            emit_json(&StateFile::from_state(&make_state(kind)?), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::MakeChannel { kind, output } => {
            emit_json(&ChannelFile::from_channel(&make_channel(kind)?), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn is_refusal(err: &anyhow::Error) -> bool {
    err.chain()
        .any(|e| matches!(e.downcast_ref::<Error>(), Some(Error::Unfaithful { .. } | Error::UnfaithfulSet { .. })))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own usage code would collide with the refusal code
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_refusal(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
