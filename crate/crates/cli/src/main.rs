//! Command-line front end: coding-gain tables, transform design, and the
//! lossless intra codec.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 a checked tolerance or
//! search budget failed, 4 I/O or bitstream format problems.

use clap::{Args, Parser, Subcommand};
use i2i_core::codec::{
    decode_frame, decode_header, encode_frame, synthetic_frame, CodecNetworks, CodecProfile, Frame,
    SynthKind, ALL_PROFILES,
};
use i2i_core::exec::self_test;
use i2i_core::fastdst::edst3_rotation_factorization;
use i2i_core::lifting::{lifting_coding_gain, select_design, select_design_factored};
use i2i_core::markov::residual_autocorrelation;
use i2i_core::rotation::{search_cascade, OptimizerConfig};
use i2i_core::transforms::{
    coding_gain, dct2_matrix, dpcm_matrix, edst3_matrix, klt_matrix, odst3_matrix,
    unit_source_coding_gain,
};
use i2i_core::{Error, QuantizedLiftingNetwork};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "i2i", about = "Integer-to-integer transform toolkit and lossless intra codec")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coding-gain table for the standard transforms, relative to the KLT
    Tables(TablesArgs),
    /// Design a quantized lifting network and write it as a text file
    Design(DesignArgs),
    /// Encode a binary PGM losslessly
    Encode(EncodeArgs),
    /// Decode a bitstream back to a binary PGM
    Decode(DecodeArgs),
    /// Encode a corpus of PGMs under every profile and report bits per pixel
    Compare(CompareArgs),
    /// Exhaustive small-range reconstruction check of the bundled networks
    Selftest(NetArgs),
    /// Write a deterministic synthetic PGM
    Synth(SynthArgs),
}

#[derive(Args)]
struct TablesArgs {
    /// Inter-sample correlation of the Markov source
    #[arg(long, default_value_t = 0.95)]
    rho: f64,
    /// Comma-separated block sizes
    #[arg(long, default_value = "4,8,16,32", value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Also print the absolute (unit-source) KLT gain column
    #[arg(long)]
    klt_abs: bool,
}

#[derive(Args)]
struct DesignArgs {
    /// Transform length
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Number of plane rotations for the exhaustive cascade search
    #[arg(long = "length", short = 'L', default_value_t = 4)]
    length: usize,
    /// Lifting multiplier precision (dyadic denominator 2^l)
    #[arg(long, default_value_t = 3)]
    l: u32,
    #[arg(long, default_value_t = 0.95)]
    rho: f64,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Restrict the search to stages of disjoint butterflies
    #[arg(long)]
    parallel_only: bool,
    /// Skip the search and factor the closed-form sine transform instead
    /// (n in {4, 8, 16, 32})
    #[arg(long)]
    factored: bool,
    /// Output path for the network text
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NetArgs {
    /// Directory with dst4.net / dst8.net (defaults to $I2I_NETWORKS or data/networks)
    #[arg(long)]
    networks: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "i2i4-rdpcm")]
    profile: String,
    #[command(flatten)]
    nets: NetArgs,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    nets: NetArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Directory of binary PGMs (defaults to $I2I_CORPUS or data/corpus)
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    nets: NetArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// gradient | rectangles | plaid | blobs | mixed | noise
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 128)]
    width: usize,
    #[arg(long, default_value_t = 128)]
    height: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => 2,
        Error::SearchBudget(_) | Error::Numerical(_) => 3,
        _ => 4,
    }
}

fn networks_dir(arg: &Option<PathBuf>) -> PathBuf {
    arg.clone()
        .or_else(|| std::env::var_os("I2I_NETWORKS").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data/networks"))
}

fn corpus_dir(arg: &Option<PathBuf>) -> PathBuf {
    arg.clone()
        .or_else(|| std::env::var_os("I2I_CORPUS").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data/corpus"))
}

fn load_network(dir: &Path, name: &str) -> Result<QuantizedLiftingNetwork, Error> {
    let path = dir.join(name);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    QuantizedLiftingNetwork::from_text(&text)
}

fn load_networks(dir: &Path, profile: CodecProfile) -> Result<CodecNetworks, Error> {
    let mut nets = CodecNetworks::default();
    if profile.max_transform_size() >= 4 {
        nets.net4 = Some(load_network(dir, "dst4.net")?);
    }
    if profile.max_transform_size() >= 8 {
        nets.net8 = Some(load_network(dir, "dst8.net")?);
    }
    Ok(nets)
}

fn run_tables(a: &TablesArgs) -> Result<(), Error> {
    if a.klt_abs {
        println!("n,klt_abs_db,odst3_db,edst3_db,dct2_db,dpcm_db");
    } else {
        println!("n,odst3_db,edst3_db,dct2_db,dpcm_db");
    }
    for &n in &a.sizes {
        let k = residual_autocorrelation(a.rho, n)?;
        let klt = klt_matrix(&k)?;
        let klt_gain = unit_source_coding_gain(&klt, &k)?.value;
        let rel = |t| -> Result<f64, Error> { Ok(coding_gain(&t, &k)?.value - coding_gain(&klt, &k)?.value) };
        let row = [
            rel(odst3_matrix(n)?)?,
            rel(edst3_matrix(n)?)?,
            rel(dct2_matrix(n)?)?,
            rel(dpcm_matrix(n)?)?,
        ];
        if a.klt_abs {
            println!("{n},{klt_gain:.4},{:.4},{:.4},{:.4},{:.4}", row[0], row[1], row[2], row[3]);
        } else {
            println!("{n},{:.4},{:.4},{:.4},{:.4}", row[0], row[1], row[2], row[3]);
        }
    }
    Ok(())
}

fn run_design(a: &DesignArgs) -> Result<(), Error> {
    let k = residual_autocorrelation(a.rho, a.n)?;
    let (combo, qnet) = if a.factored {
        let flow = edst3_rotation_factorization(a.n)?;
        select_design_factored(&flow, &k, a.l)?
    } else {
        let cfg = OptimizerConfig { parallel_only: a.parallel_only, seed: a.seed, ..Default::default() };
        let cascade = search_cascade(a.n, a.length, &k, &cfg)?;
        if let Some(g) = &cascade.gain {
            println!("# cascade gain: {:.4} dB ({:+.4} vs KLT)", g.value, g.relative().unwrap_or(0.0));
        }
        select_design(&cascade, &k, a.l)?
    };
    let g = lifting_coding_gain(&qnet, &k)?;
    println!("# quantized gain (l={}): {:.4} dB ({:+.4} vs KLT)", a.l, g.value, g.relative().unwrap_or(0.0));
    println!("# types: {combo:?}");
    println!(
        "# branch scales: {}",
        qnet.branch_scales.iter().map(|b| format!("{b:.4}")).collect::<Vec<_>>().join(" ")
    );
    let text = qnet.to_text();
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            println!("# wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run_encode(a: &EncodeArgs) -> Result<(), Error> {
    let profile = CodecProfile::from_name(&a.profile)?;
    let nets = load_networks(&networks_dir(&a.nets.networks), profile)?;
    let frame = Frame::read_pgm(&a.input)?;
    let (bits, stats) = encode_frame(&frame, profile, &nets)?;
    std::fs::write(&a.out, &bits)?;
    println!("{} -> {} ({} bytes)", a.input.display(), a.out.display(), bits.len());
    println!("{stats}");
    Ok(())
}

fn run_decode(a: &DecodeArgs) -> Result<(), Error> {
    let data = std::fs::read(&a.input)?;
    let hdr = decode_header(&data)?;
    let nets = load_networks(&networks_dir(&a.nets.networks), hdr.profile)?;
    let frame = decode_frame(&data, &nets)?;
    frame.write_pgm(&a.out)?;
    println!(
        "{} -> {} ({}x{}, profile {})",
        a.input.display(),
        a.out.display(),
        frame.width,
        frame.height,
        hdr.profile.name()
    );
    Ok(())
}

fn run_compare(a: &CompareArgs) -> Result<(), Error> {
    let dir = corpus_dir(&a.corpus);
    let ndir = networks_dir(&a.nets.networks);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "pgm").unwrap_or(false))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidParameter(format!("no .pgm files in {}", dir.display())));
    }
    println!("file,profile,bytes,bpp");
    let mut totals = vec![(0u64, 0u64); ALL_PROFILES.len()];
    for path in &files {
        let frame = Frame::read_pgm(path)?;
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        for (pi, &profile) in ALL_PROFILES.iter().enumerate() {
            let nets = load_networks(&ndir, profile)?;
            let (bits, stats) = encode_frame(&frame, profile, &nets)?;
            if decode_frame(&bits, &nets)? != frame {
                return Err(Error::Numerical(format!(
                    "round trip failed for {} under {}",
                    path.display(),
                    profile.name()
                )));
            }
            totals[pi].0 += bits.len() as u64 * 8;
            totals[pi].1 += stats.pixel_count as u64;
            println!("{name},{},{},{:.4}", profile.name(), bits.len(), stats.bits_per_pixel());
        }
    }
    println!();
    println!("profile,avg_bpp");
    for (pi, &profile) in ALL_PROFILES.iter().enumerate() {
        println!("{},{:.4}", profile.name(), totals[pi].0 as f64 / totals[pi].1 as f64);
    }
    println!();
    println!("# note: rates depend entirely on the input corpus; numbers from other");
    println!("# codecs or corpora are not comparable to these.");
    Ok(())
}

fn run_selftest(a: &NetArgs) -> Result<(), Error> {
    let dir = networks_dir(&a.networks);
    for name in ["dst4.net", "dst8.net"] {
        let net = load_network(&dir, name)?;
        let count = self_test(&net)?;
        println!("{name}: {count} inputs reconstructed exactly");
    }
    Ok(())
}

fn run_synth(a: &SynthArgs) -> Result<(), Error> {
    let kind = SynthKind::from_name(&a.kind)?;
    let f = synthetic_frame(kind, a.width, a.height, a.seed)?;
    f.write_pgm(&a.out)?;
    println!("wrote {} ({}x{})", a.out.display(), a.width, a.height);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Tables(a) => run_tables(a),
        Cmd::Design(a) => run_design(a),
        Cmd::Encode(a) => run_encode(a),
        Cmd::Decode(a) => run_decode(a),
        Cmd::Compare(a) => run_compare(a),
        Cmd::Selftest(a) => run_selftest(a),
        Cmd::Synth(a) => run_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
