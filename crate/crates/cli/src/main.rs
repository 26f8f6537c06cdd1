use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use npf_core::baselines;
use npf_core::pipeline;
use npf_core::Container;

#[derive(Parser)]
#[command(
    name = "npf",
    about = "Non-prefix-free compressor with enumerative boundary coding",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a file into an .npf container (or an .npfb/.npfk pair)
    Compress(CompressArgs),
    /// Restore the original file from a container or a split pair
    Decompress(DecompressArgs),
    /// Benchmark files against entropy, Huffman, and adaptive AC; CSV on stdout
    Bench(BenchArgs),
    /// Block-sum and rank histograms for one file; CSV on stdout
    Stats(StatsArgs),
}

#[derive(Args)]
struct CompressArgs {
    /// File to compress
    input: PathBuf,
    /// Output path (defaults to <input>.npf, or <input>.npfb/.npfk with --split)
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Block size in symbols
    #[arg(long, default_value_t = 6, value_parser = parse_block_size)]
    d: u8,
    /// Write codewords and boundary streams as two separate files
    #[arg(long)]
    split: bool,
}

#[derive(Args)]
struct DecompressArgs {
    /// Container file, or the two halves of a split pair
    inputs: Vec<PathBuf>,
    /// Output path (defaults to the input with its extension dropped)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Files to benchmark
    inputs: Vec<PathBuf>,
    /// Comma-separated block sizes to sweep
    #[arg(long, value_delimiter = ',', default_values_t = vec![2u8, 4, 6], value_parser = parse_block_size)]
    d: Vec<u8>,
}

#[derive(Args)]
struct StatsArgs {
    /// File to analyze
    input: PathBuf,
    /// Block size in symbols
    #[arg(long, default_value_t = 6, value_parser = parse_block_size)]
    d: u8,
    /// Also emit the rank histogram for blocks with this sum
    #[arg(long)]
    context: Option<u32>,
}

fn parse_block_size(s: &str) -> Result<u8, String> {
    let d: u8 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (1..=16).contains(&d) {
        Ok(d)
    } else {
        Err(format!("block size must be in [1..16], got {d}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compress(args) => cmd_compress(args),
        Command::Decompress(args) => cmd_decompress(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Stats(args) => cmd_stats(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Write one line to stdout; stop quietly when the downstream pipe closes.
fn print_line(line: &str) {
    let mut out = std::io::stdout().lock();
    let result = out
        .write_all(line.as_bytes())
        .and_then(|_| out.write_all(b"\n"));
    if let Err(e) = result {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: stdout: {e}");
        std::process::exit(1);
    }
}

fn cmd_compress(args: CompressArgs) -> Result<ExitCode, String> {
    let data = read_input(&args.input)?;
    let container = pipeline::encode(&data, args.d).map_err(|e| e.to_string())?;

    if args.split {
        let base = args.output.unwrap_or_else(|| args.input.clone());
        let b_path = with_extension(&base, "npfb");
        let k_path = with_extension(&base, "npfk");
        container
            .write_split_files(&b_path, &k_path)
            .map_err(|e| e.to_string())?;
        print_summary(&container, &data, &format!("{} + {}", b_path.display(), k_path.display()));
    } else {
        let out_path = args
            .output
            .unwrap_or_else(|| with_extension(&args.input, "npf"));
        container.write_file(&out_path).map_err(|e| e.to_string())?;
        print_summary(&container, &data, &out_path.display().to_string());
    }
    Ok(ExitCode::SUCCESS)
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn print_summary(container: &Container, data: &[u8], dest: &str) {
    let b = pipeline::stream_breakdown(container);
    print_line(&format!(
        "{} -> {dest}: {} bytes out, {:.3} bits/symbol \
         (codewords {:.3}, pstream {:.3}, qstream {:.3}, header {:.3})",
        data.len(),
        container.encoded_len(),
        b.total_bps,
        b.codeword_bps,
        b.pstream_bps,
        b.qstream_bps,
        b.header_bps,
    ));
}

fn cmd_decompress(args: DecompressArgs) -> Result<ExitCode, String> {
    let container = match args.inputs.as_slice() {
        [single] => read_container_single(single)?,
        [first, second] => Container::read_split_files(first, second).map_err(|e| e.to_string())?,
        [] => return Err("no input file given".into()),
        _ => return Err("expected one container or exactly two split halves".into()),
    };
    let data = pipeline::decode(&container).map_err(|e| e.to_string())?;
    let out_path = match args.output {
        Some(p) => p,
        None => default_decompress_output(&args.inputs[0])?,
    };
    std::fs::write(&out_path, &data).map_err(|e| format!("{}: {e}", out_path.display()))?;
    print_line(&format!(
        "{} -> {} ({} bytes)",
        args.inputs[0].display(),
        out_path.display(),
        data.len()
    ));
    Ok(ExitCode::SUCCESS)
}

/// Read a lone file; if it is the codeword half of a split pair, look for
/// its companion next to it.
fn read_container_single(path: &Path) -> Result<Container, String> {
    match Container::read_file(path) {
        Ok(c) => Ok(c),
        Err(npf_core::Error::MissingBoundaryStream) => {
            let companion = sibling(path, "npfb", "npfk");
            match companion {
                Some(k_path) if k_path.exists() => {
                    Container::read_split_files(path, &k_path).map_err(|e| e.to_string())
                }
                _ => Err(npf_core::Error::MissingBoundaryStream.to_string()),
            }
        }
        Err(npf_core::Error::MissingCodewordStream) => {
            let companion = sibling(path, "npfk", "npfb");
            match companion {
                Some(b_path) if b_path.exists() => {
                    Container::read_split_files(&b_path, path).map_err(|e| e.to_string())
                }
                _ => Err(npf_core::Error::MissingCodewordStream.to_string()),
            }
        }
        Err(e) => Err(e.to_string()),
    }
}

fn sibling(path: &Path, from: &str, to: &str) -> Option<PathBuf> {
    if path.extension()?.to_str()? == from {
        Some(path.with_extension(to))
    } else {
        None
    }
}

fn default_decompress_output(input: &Path) -> Result<PathBuf, String> {
    match input.extension().and_then(|e| e.to_str()) {
        Some("npf") | Some("npfb") | Some("npfk") => Ok(input.with_extension("")),
        _ => Err(format!(
            "{}: cannot derive output name, pass --output",
            input.display()
        )),
    }
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, String> {
    if args.inputs.is_empty() {
        return Err("no input files given".into());
    }
    let ds = &args.d;

    let mut header = String::from("file,size,sigma,k,entropy,huffman_bps,adaptive_ac_bps");
    for d in ds {
        header.push_str(&format!(
            ",npf_total_bps_d{d},codeword_bps_d{d},pstream_bps_d{d},qstream_bps_d{d}"
        ));
    }
    print_line(&header);

    let mut failures = 0usize;
    for path in &args.inputs {
        match bench_row(path, ds) {
            Ok(row) => print_line(&row),
            Err(msg) => {
                eprintln!("error: {msg}");
                failures += 1;
            }
        }
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn bench_row(path: &Path, ds: &[u8]) -> Result<String, String> {
    let data = read_input(path)?;
    if data.is_empty() {
        return Err(format!("{}: empty file has no defined entropy", path.display()));
    }
    let entropy = baselines::order0_entropy(&data).map_err(|e| e.to_string())?;
    let huffman = baselines::huffman_static_size(&data).map_err(|e| e.to_string())?;
    let ac = baselines::adaptive_ac_size(&data);

    let cb = npf_core::codebook::Codebook::from_bytes(&data).map_err(|e| e.to_string())?;
    let sigma = cb.sigma();
    let k = cb.max_len();

    let mut row = format!(
        "{},{},{},{},{:.4},{:.4},{:.4}",
        path.display(),
        data.len(),
        sigma,
        k,
        entropy,
        huffman.payload_bps(),
        ac.payload_bps(),
    );
    for &d in ds {
        let container = pipeline::encode(&data, d).map_err(|e| e.to_string())?;
        let b = pipeline::stream_breakdown(&container);
        row.push_str(&format!(
            ",{:.4},{:.4},{:.4},{:.4}",
            b.total_bps, b.codeword_bps, b.pstream_bps, b.qstream_bps
        ));
    }
    Ok(row)
}

fn cmd_stats(args: StatsArgs) -> Result<ExitCode, String> {
    let data = read_input(&args.input)?;
    let tuples = pipeline::block_tuples(&data, args.d).map_err(|e| e.to_string())?;

    if let Some(p) = args.context {
        let k = if data.is_empty() {
            0
        } else {
            let cb = npf_core::codebook::Codebook::from_bytes(&data).map_err(|e| e.to_string())?;
            cb.max_len() as u32
        };
        let lo = args.d as u32;
        let hi = k * args.d as u32;
        if p < lo || p > hi {
            return Err(format!(
                "--context {p} outside the valid sum range [{lo}..{hi}]"
            ));
        }
    }

    let mut p_hist: BTreeMap<u32, u64> = BTreeMap::new();
    let mut q_hist: BTreeMap<u64, u64> = BTreeMap::new();
    for t in &tuples {
        *p_hist.entry(t.p).or_default() += 1;
        if let (Some(ctx), Some(q)) = (args.context, t.q) {
            if t.p == ctx {
                *q_hist.entry(q).or_default() += 1;
            }
        }
    }

    print_line("kind,key,count");
    for (p, count) in &p_hist {
        print_line(&format!("p,{p},{count}"));
    }
    if args.context.is_some() {
        for (q, count) in &q_hist {
            print_line(&format!("q,{q},{count}"));
        }
    }
    Ok(ExitCode::SUCCESS)
}
