//! `lhrs` — command-line front end for the linearly homomorphic ring
//! signature library: parameter setup, key generation, sign/combine/verify
//! on files, plus the experiment and benchmark drivers.
//!
//! Exit codes: 0 success (verify: accept), 1 verify reject, 2 malformed
//! input or failed validation (with a reason line on stderr). All
//! randomness flows from a single optional `--seed` through per-operation
//! domain separation, so any invocation is byte-reproducible.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lhrs::decompose::{BitMessage, LiftedMessage};
use lhrs::ext_preimage::{gen_sample_pre, ExtTarget};
use lhrs::games::{
    abort_rate_experiment, run_anonymity_experiment, run_forgery_simulation, AnonymityScript,
    BlockNormDistinguisher,
};
use lhrs::gaussian::sample_pre;
use lhrs::linalg::IntVector;
use lhrs::rng::{RandomSource, SEED_LEN};
use lhrs::scheme::{
    combine, keygen, setup, sign, verify, KeyPair, Profile, Ring, SchemeParams, Signature, Tag,
    VerifyMessage, VerifyMode,
};
use lhrs::serial;
use num_bigint::BigInt;
use rand::Rng;

#[derive(Parser)]
#[command(
    name = "lhrs",
    version,
    about = "Linearly homomorphic ring signatures: keys, signing, experiments, benchmarks"
)]
struct Cli {
    /// 32-byte hex seed; every operation derives its own stream from it.
    #[arg(long, global = true, value_name = "HEX")]
    seed: Option<String>,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate public parameters and write them to a file.
    Setup(SetupArgs),
    /// Generate a key pair under existing parameters.
    Keygen(KeygenArgs),
    /// Sign a message as a member of an ordered ring.
    Sign(SignArgs),
    /// Combine signatures under one ring and tag with 0/1 coefficients.
    Combine(CombineArgs),
    /// Verify a signature; exits 0 on accept, 1 on reject.
    Verify(VerifyArgs),
    /// Run a security experiment and print its line-delimited report.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Time a core operation and print median/p90 wall times.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Toy,
    Paper,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Toy => Profile::Toy,
            ProfileArg::Paper => Profile::Paper,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Canonical,
    Paper,
}

impl From<ModeArg> for VerifyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Canonical => VerifyMode::Canonical,
            ModeArg::Paper => VerifyMode::Paper,
        }
    }
}

#[derive(Args)]
struct SetupArgs {
    /// Security dimension n.
    #[arg(long)]
    n: usize,
    /// Message length k (k mod 4 must equal 2).
    #[arg(long)]
    k: usize,
    /// Parameter profile: toy (desk scale) or paper (full modulus).
    #[arg(long, value_enum, default_value = "toy")]
    profile: ProfileArg,
    /// Output path for the parameters file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct KeygenArgs {
    /// Parameters file from `setup`.
    #[arg(long, value_name = "FILE")]
    params: PathBuf,
    /// Opaque user identifier stored with the key.
    #[arg(long, default_value_t = 0)]
    user_id: u64,
    /// Output path for the public key.
    #[arg(long = "pub", value_name = "FILE")]
    public: PathBuf,
    /// Output path for the key pair (includes the secret basis).
    #[arg(long, value_name = "FILE")]
    key: PathBuf,
}

#[derive(Args)]
struct SignArgs {
    #[arg(long, value_name = "FILE")]
    params: PathBuf,
    /// Key pair file of the signer.
    #[arg(long, value_name = "FILE")]
    key: PathBuf,
    /// Ordered ring of public-key files (repeat per member).
    #[arg(long = "ring", value_name = "FILE", required = true)]
    ring: Vec<PathBuf>,
    /// Index of the signer inside the ring (0-based).
    #[arg(long)]
    signer: usize,
    /// Tag as hex (⌈k/8⌉ bytes, most significant bit first).
    #[arg(long, value_name = "HEX")]
    tag: String,
    /// Message as a k-character bit string.
    #[arg(long, value_name = "BITS")]
    message: String,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct CombineArgs {
    #[arg(long, value_name = "FILE")]
    params: PathBuf,
    /// Ordered ring of public-key files (repeat per member).
    #[arg(long = "ring", value_name = "FILE", required = true)]
    ring: Vec<PathBuf>,
    /// Tag the input signatures were issued under.
    #[arg(long, value_name = "HEX")]
    tag: String,
    /// Input signature files (repeat per signature).
    #[arg(long = "in", value_name = "FILE", required = true)]
    inputs: Vec<PathBuf>,
    /// Bit string of coefficients, one per input.
    #[arg(long, value_name = "BITS")]
    coeffs: String,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_name = "FILE")]
    params: PathBuf,
    /// Ordered ring of public-key files (repeat per member).
    #[arg(long = "ring", value_name = "FILE", required = true)]
    ring: Vec<PathBuf>,
    #[arg(long, value_name = "HEX")]
    tag: String,
    /// Message as a k-character bit string.
    #[arg(long, value_name = "BITS", conflicts_with = "lifted_message")]
    message: Option<String>,
    /// Lifted message as comma-separated integers (for combined signatures).
    #[arg(long, value_name = "INTS")]
    lifted_message: Option<String>,
    /// Signature file to check.
    #[arg(long, value_name = "FILE")]
    sig: PathBuf,
    /// Verification mode.
    #[arg(long, value_enum, default_value = "canonical")]
    mode: ModeArg,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Anonymity game with the built-in block-norm distinguisher.
    Anon(AnonArgs),
    /// Reduction machinery: simulator verification, distribution match,
    /// witness extraction, self-cancellation.
    ForgeSim(ForgeSimArgs),
    /// Non-abort rate of the reduction's ring-guessing step.
    Abort(AbortArgs),
}

#[derive(Args)]
struct AnonArgs {
    #[arg(long, value_name = "FILE")]
    params: PathBuf,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Number of users (the challenge ring spans all of them).
    #[arg(long, default_value_t = 2)]
    users: usize,
    /// Echo the per-trial lines, not just the summary.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct ForgeSimArgs {
    #[arg(long, value_name = "FILE")]
    params: PathBuf,
    /// Number of simulated signatures for the verification-rate check.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Sample count per side of the real-vs-simulated KS comparison.
    #[arg(long, default_value_t = 500)]
    ks_samples: usize,
    #[arg(long, default_value_t = 2)]
    ring_size: usize,
}

#[derive(Args)]
struct AbortArgs {
    #[arg(long, default_value_t = 4)]
    users: usize,
    #[arg(long, default_value_t = 50_000)]
    trials: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchOp {
    Trapgen,
    Samplepre,
    Gensamplepre,
    Sign,
    Verify,
    Combine,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    op: BenchOp,
    #[arg(long, value_name = "FILE")]
    params: PathBuf,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    /// Ring size for the ring-dependent operations.
    #[arg(long, default_value_t = 2)]
    ring_size: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        })
        .init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let seed = parse_seed(cli.seed.as_deref())?;
    match cli.command {
        Command::Setup(args) => cmd_setup(args, rng_for(seed, "setup")),
        Command::Keygen(args) => cmd_keygen(args, rng_for(seed, "keygen")),
        Command::Sign(args) => cmd_sign(args, rng_for(seed, "sign")),
        Command::Combine(args) => cmd_combine(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Experiment(cmd) => match cmd {
            ExperimentCommand::Anon(args) => cmd_anon(args, rng_for(seed, "experiment.anon")),
            ExperimentCommand::ForgeSim(args) => {
                cmd_forge_sim(args, rng_for(seed, "experiment.forge-sim"))
            }
            ExperimentCommand::Abort(args) => {
                cmd_abort(args, rng_for(seed, "experiment.abort"))
            }
        },
        Command::Bench(args) => cmd_bench(args, rng_for(seed, "bench")),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn parse_seed(seed: Option<&str>) -> Result<Option<[u8; SEED_LEN]>, String> {
    let Some(hexstr) = seed else { return Ok(None) };
    let bytes = hex::decode(hexstr).map_err(|_| "seed must be hex".to_string())?;
    let arr: [u8; SEED_LEN] = bytes
        .try_into()
        .map_err(|_| format!("seed must be {SEED_LEN} bytes of hex"))?;
    Ok(Some(arr))
}

/// One random stream per operation, domain-separated from the master seed.
fn rng_for(seed: Option<[u8; SEED_LEN]>, label: &str) -> RandomSource {
    match seed {
        Some(s) => RandomSource::from_seed(s).derive(label),
        None => RandomSource::from_entropy(),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, String> {
    fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), String> {
    fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn load_params(path: &Path) -> Result<SchemeParams, String> {
    serial::params_from_bytes(&read_file(path)?).map_err(|e| e.to_string())
}

fn load_ring(paths: &[PathBuf]) -> Result<Ring, String> {
    let mut members = Vec::with_capacity(paths.len());
    for p in paths {
        let (_, matrix) = serial::public_key_from_bytes(&read_file(p)?)
            .map_err(|e| format!("{}: {e}", p.display()))?;
        members.push(matrix);
    }
    Ring::new(members).map_err(|e| e.to_string())
}

fn load_signature(path: &Path) -> Result<Signature, String> {
    serial::signature_from_bytes(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

/// Tag bits from hex: ⌈k/8⌉ bytes, most significant bit first, padding
/// bits beyond k required to be zero.
fn parse_tag(hexstr: &str, k: usize) -> Result<Tag, String> {
    let bytes = hex::decode(hexstr).map_err(|_| "tag must be hex".to_string())?;
    let want = k.div_ceil(8);
    if bytes.len() != want {
        return Err(format!("tag must be {want} hex-encoded bytes for k={k}"));
    }
    let bit = |i: usize| (bytes[i / 8] >> (7 - (i % 8))) & 1;
    if (k..bytes.len() * 8).any(|i| bit(i) != 0) {
        return Err("tag padding bits past k must be zero".to_string());
    }
    Tag::new((0..k).map(bit).collect()).map_err(|e| e.to_string())
}

fn parse_message(s: &str, k: usize) -> Result<BitMessage, String> {
    if s.len() != k {
        return Err(format!("message must be {k} bits, got {}", s.len()));
    }
    let bits: Vec<u8> = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(format!("message must be a bit string, found '{c}'")),
        })
        .collect::<Result<_, _>>()?;
    BitMessage::new(bits).map_err(|e| e.to_string())
}

fn parse_lifted(s: &str) -> Result<LiftedMessage, String> {
    let entries: Vec<u64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| format!("lifted message entry '{t}' is not a non-negative integer"))
        })
        .collect::<Result<_, _>>()?;
    LiftedMessage::from_entries(entries).map_err(|e| e.to_string())
}

fn parse_coeffs(s: &str, inputs: usize) -> Result<Vec<u8>, String> {
    if s.len() != inputs {
        return Err(format!(
            "coeffs must have one bit per input signature ({inputs}), got {}",
            s.len()
        ));
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(format!("coeffs must be a bit string, found '{c}'")),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_setup(args: SetupArgs, mut rng: RandomSource) -> Result<u8, String> {
    let params =
        setup(args.n, args.k, args.profile.into(), &mut rng).map_err(|e| e.to_string())?;
    write_file(&args.out, &serial::params_to_bytes(&params))?;
    println!(
        "n={} k={} profile={} q={} h={} V={:.6}",
        params.n(),
        params.k(),
        params.profile(),
        params.q(),
        params.h(),
        params.v()
    );
    Ok(0)
}

fn cmd_keygen(args: KeygenArgs, mut rng: RandomSource) -> Result<u8, String> {
    let params = load_params(&args.params)?;
    let key = keygen(&params, args.user_id, &mut rng).map_err(|e| e.to_string())?;
    write_file(
        &args.public,
        &serial::public_key_to_bytes(key.user_id(), key.public()),
    )?;
    write_file(&args.key, &serial::key_pair_to_bytes(&key))?;
    restrict_permissions(&args.key)?;
    eprintln!(
        "warning: {} holds a secret key; keep it private (mode 0600)",
        args.key.display()
    );
    Ok(0)
}

#[cfg(unix)]
fn restrict_permissions(path: &Path) -> Result<(), String> {
    use std::os::unix::fs::PermissionsExt;
    fs::set_permissions(path, fs::Permissions::from_mode(0o600))
        .map_err(|e| format!("cannot set permissions on {}: {e}", path.display()))
}

#[cfg(not(unix))]
fn restrict_permissions(_path: &Path) -> Result<(), String> {
    Ok(())
}

fn cmd_sign(args: SignArgs, mut rng: RandomSource) -> Result<u8, String> {
    let params = load_params(&args.params)?;
    let key = serial::key_pair_from_bytes(&read_file(&args.key)?).map_err(|e| e.to_string())?;
    let ring = load_ring(&args.ring)?;
    if args.signer >= ring.len() {
        return Err(format!(
            "signer index {} out of range for ring of {}",
            args.signer,
            ring.len()
        ));
    }
    if ring.members()[args.signer] != *key.public() {
        return Err("signer index does not match the supplied key".to_string());
    }
    let tag = parse_tag(&args.tag, params.k())?;
    let message = parse_message(&args.message, params.k())?;
    let sig = sign(&params, &key, &ring, &tag, &message, &mut rng).map_err(|e| e.to_string())?;
    write_file(&args.out, &serial::signature_to_bytes(&sig))?;
    Ok(0)
}

fn cmd_combine(args: CombineArgs) -> Result<u8, String> {
    let params = load_params(&args.params)?;
    let ring = load_ring(&args.ring)?;
    let tag = parse_tag(&args.tag, params.k())?;
    let coeffs = parse_coeffs(&args.coeffs, args.inputs.len())?;
    let sigs: Vec<Signature> = args
        .inputs
        .iter()
        .map(|p| load_signature(p))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<(u8, &Signature)> = coeffs.iter().copied().zip(sigs.iter()).collect();
    let sum = combine(&params, &ring, &tag, &pairs).map_err(|e| e.to_string())?;
    write_file(&args.out, &serial::signature_to_bytes(&sum))?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, String> {
    let params = load_params(&args.params)?;
    let ring = load_ring(&args.ring)?;
    let tag = parse_tag(&args.tag, params.k())?;
    let message = match (&args.message, &args.lifted_message) {
        (Some(bits), None) => VerifyMessage::Bits(parse_message(bits, params.k())?),
        (None, Some(ints)) => VerifyMessage::Lifted(parse_lifted(ints)?),
        _ => return Err("exactly one of --message / --lifted-message is required".to_string()),
    };
    let sig = load_signature(&args.sig)?;
    let verdict = verify(&params, &ring, &tag, &message, &sig, args.mode.into())
        .map_err(|e| e.to_string())?;
    match verdict {
        lhrs::scheme::Verdict::Accept => {
            println!("accept");
            Ok(0)
        }
        lhrs::scheme::Verdict::Reject(reason) => {
            println!("reject: {reason}");
            Ok(1)
        }
    }
}

fn cmd_anon(args: AnonArgs, mut rng: RandomSource) -> Result<u8, String> {
    if args.trials == 0 {
        return Err("trials must be positive".to_string());
    }
    if args.users < 2 {
        return Err("anonymity needs at least two users".to_string());
    }
    let params = load_params(&args.params)?;
    let message = BitMessage::all_ones(params.k()).map_err(|e| e.to_string())?;
    let script = AnonymityScript::simple_challenge(args.users, message);
    let report = run_anonymity_experiment(
        &params,
        args.users,
        &script,
        args.trials,
        &BlockNormDistinguisher,
        &mut rng,
    )
    .map_err(|e| e.to_string())?;
    let lines = report.report_lines();
    if args.full {
        for line in &lines[..lines.len() - 1] {
            println!("{line}");
        }
    }
    println!("{}", lines[lines.len() - 1]);
    println!("pass={}", report.advantage <= 0.03);
    Ok(0)
}

fn cmd_forge_sim(args: ForgeSimArgs, mut rng: RandomSource) -> Result<u8, String> {
    if args.trials == 0 || args.ks_samples == 0 {
        return Err("trials and ks-samples must be positive".to_string());
    }
    let params = load_params(&args.params)?;
    let report = run_forgery_simulation(
        &params,
        args.ring_size,
        args.trials,
        args.ks_samples,
        &mut rng,
    )
    .map_err(|e| e.to_string())?;
    for line in report.report_lines() {
        println!("{line}");
    }
    println!(
        "pass={}",
        report.sim_verify_rate == 1.0 && report.extraction_ok && report.self_cancel_zero
    );
    Ok(0)
}

fn cmd_abort(args: AbortArgs, mut rng: RandomSource) -> Result<u8, String> {
    if args.users < 2 {
        return Err("abort experiment needs at least two users".to_string());
    }
    if args.trials == 0 {
        return Err("trials must be positive".to_string());
    }
    let report = abort_rate_experiment(args.users, args.trials, &mut rng);
    for line in report.report_lines() {
        println!("{line}");
    }
    Ok(0)
}

fn cmd_bench(args: BenchArgs, mut rng: RandomSource) -> Result<u8, String> {
    if args.reps == 0 {
        return Err("reps must be positive".to_string());
    }
    if args.ring_size == 0 {
        return Err("ring size must be positive".to_string());
    }
    let params = load_params(&args.params)?;
    let k = params.k();
    let width = params.sign_width().map_err(|e| e.to_string())?;

    // Shared fixtures (not timed): a ring of fresh keys plus one signature.
    let keys: Vec<KeyPair> = (0..args.ring_size)
        .map(|u| keygen(&params, u as u64, &mut rng))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let ring = Ring::new(keys.iter().map(|key| key.public().clone()).collect())
        .map_err(|e| e.to_string())?;
    let tag = Tag::random(k, &mut rng);
    let message = BitMessage::all_ones(k).map_err(|e| e.to_string())?;
    let random_syndrome = |rng: &mut RandomSource| {
        IntVector::new(
            (0..params.h())
                .map(|_| BigInt::from(rng.gen_range(0..params.q())))
                .collect(),
        )
    };

    let mut times_ms = Vec::with_capacity(args.reps);
    let mut quality_ratios = Vec::new();
    for rep in 0..args.reps {
        match args.op {
            BenchOp::Trapgen => {
                let start = Instant::now();
                let key = keygen(&params, rep as u64, &mut rng).map_err(|e| e.to_string())?;
                times_ms.push(start.elapsed().as_secs_f64() * 1e3);
                let scale = (params.n() as f64 * (params.q() as f64).log2()).sqrt();
                quality_ratios.push(key.secret().quality() / scale);
            }
            BenchOp::Samplepre => {
                let u = random_syndrome(&mut rng);
                let start = Instant::now();
                let x = sample_pre(keys[0].public(), keys[0].secret().basis(), &u, width, &mut rng)
                    .map_err(|e| e.to_string())?;
                times_ms.push(start.elapsed().as_secs_f64() * 1e3);
                std::hint::black_box(x);
            }
            BenchOp::Gensamplepre => {
                let blocks: Vec<_> = keys.iter().map(|key| key.public().clone()).collect();
                let y = random_syndrome(&mut rng);
                let start = Instant::now();
                let target =
                    ExtTarget::new(blocks, 0, y, width).map_err(|e| e.to_string())?;
                let x = gen_sample_pre(&target, keys[0].secret().basis(), &mut rng)
                    .map_err(|e| e.to_string())?;
                times_ms.push(start.elapsed().as_secs_f64() * 1e3);
                std::hint::black_box(x);
            }
            BenchOp::Sign => {
                let start = Instant::now();
                let sig = sign(&params, &keys[0], &ring, &tag, &message, &mut rng)
                    .map_err(|e| e.to_string())?;
                times_ms.push(start.elapsed().as_secs_f64() * 1e3);
                std::hint::black_box(sig);
            }
            BenchOp::Verify => {
                let sig = sign(&params, &keys[0], &ring, &tag, &message, &mut rng)
                    .map_err(|e| e.to_string())?;
                let vm = VerifyMessage::Bits(message.clone());
                let start = Instant::now();
                let verdict = verify(&params, &ring, &tag, &vm, &sig, VerifyMode::Canonical)
                    .map_err(|e| e.to_string())?;
                times_ms.push(start.elapsed().as_secs_f64() * 1e3);
                std::hint::black_box(verdict);
            }
            BenchOp::Combine => {
                let s1 = sign(&params, &keys[0], &ring, &tag, &message, &mut rng)
                    .map_err(|e| e.to_string())?;
                let s2 = sign(&params, &keys[0], &ring, &tag, &message, &mut rng)
                    .map_err(|e| e.to_string())?;
                let pairs = [(1u8, &s1), (1u8, &s2)];
                let start = Instant::now();
                let sum = combine(&params, &ring, &tag, &pairs).map_err(|e| e.to_string())?;
                times_ms.push(start.elapsed().as_secs_f64() * 1e3);
                std::hint::black_box(sum);
            }
        }
    }

    times_ms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let op_name = match args.op {
        BenchOp::Trapgen => "trapgen",
        BenchOp::Samplepre => "samplepre",
        BenchOp::Gensamplepre => "gensamplepre",
        BenchOp::Sign => "sign",
        BenchOp::Verify => "verify",
        BenchOp::Combine => "combine",
    };
    print!(
        "op={} reps={} median_ms={:.3} p90_ms={:.3} min_ms={:.3} max_ms={:.3}",
        op_name,
        args.reps,
        percentile(&times_ms, 0.5),
        percentile(&times_ms, 0.9),
        times_ms[0],
        times_ms[times_ms.len() - 1]
    );
    if !quality_ratios.is_empty() {
        quality_ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        print!(
            " quality_ratio_median={:.4} quality_ratio_p90={:.4}",
            percentile(&quality_ratios, 0.5),
            percentile(&quality_ratios, 0.9)
        );
    }
    println!();
    Ok(0)
}

/// Nearest-rank percentile of an ascending slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}
