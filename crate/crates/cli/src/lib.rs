//! Implementation of the `bdz` command-line tool.
//!
//! Exit statuses: 0 on success, 1 when `verify` finds a mismatch, 2 on any
//! I/O, parse or container error.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use bdz_core::codec::{encode_streams, CodecConfig, MAGIC};
use bdz_core::naive::NAIVE_MAGIC;
use bdz_core::spanning::{build_spanning_tree, long_tree_edges};
use bdz_core::{generate, naive_decode, naive_encode, read_bdd_text, write_bdd_text, Assignment, Backend, Bdd};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

/// Largest variable count for which `verify` also compares truth tables.
pub const EXHAUSTIVE_VERIFY_VARS: u32 = 12;
pub const MAX_QUEENS: u32 = 9;
pub const MAX_ROOK_SIDE: u32 = 10;
pub const MAX_RANDOM_NODES: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "bdz", version, about = "Compress reduced ordered binary decision diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CodecArgs {
    /// In-degree threshold above which targets are written in place
    #[arg(long = "th", default_value_t = 5)]
    pub threshold: u32,
    /// Minimum number of qualifying forward edges before they are used
    #[arg(long = "tf", default_value_t = 4)]
    pub forward_min: u32,
    /// Store the tail stream as raw ids instead of differences
    #[arg(long)]
    pub no_delta: bool,
    /// Compression backend: store, deflate or lzma
    #[arg(long, default_value = "lzma")]
    pub backend: Backend,
}

impl CodecArgs {
    pub fn config(&self) -> CodecConfig {
        CodecConfig {
            indegree_threshold: self.threshold,
            forward_min_count: self.forward_min,
            delta_enabled: !self.no_delta,
            backend: self.backend,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a text BDD into a container
    Compress {
        /// Text BDD to read
        #[arg(short, long)]
        input: PathBuf,
        /// Container to write
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
        /// Write the baseline child-list container instead
        #[arg(long)]
        naive: bool,
    },
    /// Decode a container back to a text BDD
    Decompress {
        /// Container to read
        #[arg(short, long)]
        input: PathBuf,
        /// Text BDD to write
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check that a container decodes to the given text BDD
    Verify { original: PathBuf, container: PathBuf },
    /// Print stream statistics and sizes for a text BDD
    Stats {
        /// Text BDD to read
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
    },
    /// Generate a benchmark instance as a text BDD
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Output file; standard output when omitted
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Compare codec and baseline sizes for every BDD file in a directory
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
        /// Print CSV instead of an aligned table
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum GenKind {
    /// n queens on an n x n board
    Queens { n: u32 },
    /// One rook per row on a rows x cols board, no two in a column
    Rook { rows: u32, cols: u32 },
    /// Random reduced BDD
    Random {
        #[arg(long, default_value_t = 16)]
        vars: u32,
        /// Approximate node count
        #[arg(long, default_value_t = 1000)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Mismatch(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: bdz_core::Error },
    #[error("{0}")]
    Usage(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            _ => 2,
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn read_file(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).map_err(|source| Failure::Io { path: path.into(), source })
}

fn format_err(path: &Path) -> impl FnOnce(bdz_core::Error) -> Failure + '_ {
    move |source| Failure::Format { path: path.into(), source }
}

/// Writes through a sibling temporary file so a failed run leaves nothing behind.
fn write_atomic(path: &Path, data: &[u8]) -> Outcome {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let io_err = |source| Failure::Io { path: path.into(), source };
    fs::write(&tmp, data).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(|source| {
        let _ = fs::remove_file(&tmp);
        Failure::Io { path: path.into(), source }
    })
}

pub fn read_text_bdd(path: &Path) -> Outcome<Bdd> {
    let bytes = read_file(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Failure::Io {
        path: path.into(),
        source: io::Error::new(io::ErrorKind::InvalidData, "not a UTF-8 text file"),
    })?;
    read_bdd_text(text).map_err(format_err(path))
}

/// Decodes either container kind, chosen by its magic bytes.
pub fn decode_container(bytes: &[u8]) -> bdz_core::Result<Bdd> {
    if bytes.starts_with(NAIVE_MAGIC) {
        naive_decode(bytes)
    } else if bytes.starts_with(MAGIC) {
        bdz_core::decode(bytes)
    } else {
        Err(bdz_core::Error::BadMagic)
    }
}

pub fn bits_per_node(bytes: usize, nodes: usize) -> f64 {
    8.0 * bytes as f64 / nodes as f64
}

/// Structural comparison, then a full truth-table comparison for small
/// variable counts. Returns a one-line summary or the first difference.
pub fn compare(original: &Bdd, decoded: &Bdd) -> Result<String, String> {
    if let Some(m) = original.structural_diff(decoded) {
        return Err(format!("first mismatch: {m}"));
    }
    let n = original.num_vars();
    if n > EXHAUSTIVE_VERIFY_VARS {
        return Ok(format!("ok: {} nodes, isomorphic", original.len()));
    }
    for idx in 0..1u64 << n {
        let a = Assignment::from_index(n, idx);
        let (x, y) = (original.evaluate(&a), decoded.evaluate(&a));
        if x.ok() != y.ok() {
            return Err(format!("mismatch: assignment {idx:#x} evaluates differently"));
        }
    }
    Ok(format!("ok: {} nodes, isomorphic, all {} assignments agree", original.len(), 1u64 << n))
}

fn generate(kind: &GenKind) -> Outcome<Bdd> {
    let usage = |e: bdz_core::Error| Failure::Usage(e.to_string());
    match *kind {
        GenKind::Queens { n } => {
            if n == 0 || n > MAX_QUEENS {
                return Err(Failure::Usage(format!("queens board size must be in 1..={MAX_QUEENS}")));
            }
            generate::queens(n).map_err(usage)
        }
        GenKind::Rook { rows, cols } => {
            if rows > MAX_ROOK_SIDE || cols > MAX_ROOK_SIDE {
                return Err(Failure::Usage(format!("rook boards are limited to {MAX_ROOK_SIDE}x{MAX_ROOK_SIDE}")));
            }
            generate::rook(rows, cols).map_err(usage)
        }
        GenKind::Random { vars, nodes, seed } => {
            if nodes > MAX_RANDOM_NODES {
                return Err(Failure::Usage(format!("random diagrams are limited to {MAX_RANDOM_NODES} nodes")));
            }
            generate::random_bdd_seeded(seed, vars, nodes).map_err(usage)
        }
    }
}

struct BenchRow {
    name: String,
    nodes: usize,
    codec_bytes: usize,
    naive_bytes: usize,
}

fn bench_rows(dir: &Path, config: &CodecConfig, err: &mut dyn Write) -> Outcome<Vec<BenchRow>> {
    let entries = fs::read_dir(dir).map_err(|source| Failure::Io { path: dir.into(), source })?;
    let mut files: Vec<PathBuf> = entries.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_file()).collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Usage(format!("{}: no files to benchmark", dir.display())));
    }
    let mut rows = Vec::new();
    for path in &files {
        let bdd = match read_text_bdd(path) {
            Ok(b) => b,
            Err(e) => {
                let _ = writeln!(err, "warning: skipping {e}");
                continue;
            }
        };
        let codec = bdz_core::encode(&bdd, config).map_err(format_err(path))?;
        let naive = naive_encode(&bdd, config.backend);
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        rows.push(BenchRow { name, nodes: bdd.len(), codec_bytes: codec.len(), naive_bytes: naive.len() });
    }
    if rows.is_empty() {
        return Err(Failure::Usage(format!("{}: no readable BDD files", dir.display())));
    }
    Ok(rows)
}

fn render_bench(rows: &[BenchRow], csv: bool) -> String {
    let mut s = String::new();
    if csv {
        s.push_str("file,nodes,codec_bytes,codec_bits_per_node,naive_bytes,naive_bits_per_node,naive_over_codec\n");
    } else {
        let _ = writeln!(s, "{:<24} {:>10} {:>12} {:>12} {:>8}", "file", "nodes", "codec b/n", "naive b/n", "ratio");
    }
    for r in rows {
        let codec = bits_per_node(r.codec_bytes, r.nodes);
        let naive = bits_per_node(r.naive_bytes, r.nodes);
        let ratio = r.naive_bytes as f64 / r.codec_bytes as f64;
        if csv {
            let _ = writeln!(
                s,
                "{},{},{},{codec:.4},{},{naive:.4},{ratio:.4}",
                r.name, r.nodes, r.codec_bytes, r.naive_bytes
            );
        } else {
            let _ = writeln!(s, "{:<24} {:>10} {codec:>12.3} {naive:>12.3} {:>7.0}%", r.name, r.nodes, 100.0 * ratio);
        }
    }
    s
}

fn stats(bdd: &Bdd, config: &CodecConfig) -> Outcome<String> {
    let to_usage = |e: bdz_core::Error| Failure::Usage(e.to_string());
    let streams = encode_streams(bdd, config).map_err(to_usage)?;
    let codec = streams.to_bytes();
    let naive = naive_encode(bdd, config.backend);
    let tree = build_spanning_tree(bdd);
    let in_place = streams.sh.iter().filter(|&&v| v != 0).count();
    let mut s = String::new();
    let _ = writeln!(s, "variables        {}", bdd.num_vars());
    let _ = writeln!(s, "nodes            {}", bdd.len());
    let _ = writeln!(s, "edges            {}", bdd.edge_count());
    let _ = writeln!(s, "tree edges       {}", tree.edge_count());
    let _ = writeln!(s, "long tree edges  {}", long_tree_edges(bdd, &tree).len());
    let _ = writeln!(s, "nontree edges    {}", streams.sh.len());
    let _ = writeln!(s, "  in place       {in_place}");
    let _ = writeln!(s, "  forward        {}", streams.forward_lengths.len());
    let _ = writeln!(s, "  tail           {}", streams.tail.len());
    let _ = writeln!(s, "codec bytes      {}", codec.len());
    let _ = writeln!(s, "codec bits/node  {:.3}", bits_per_node(codec.len(), bdd.len()));
    let _ = writeln!(s, "naive bytes      {}", naive.len());
    let _ = writeln!(s, "naive bits/node  {:.3}", bits_per_node(naive.len(), bdd.len()));
    let _ = writeln!(s, "naive/codec      {:.0}%", 100.0 * naive.len() as f64 / codec.len() as f64);
    Ok(s)
}

fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome<String> {
    match command {
        Command::Compress { input, output, codec, naive } => {
            let bdd = read_text_bdd(input)?;
            let config = codec.config();
            let bytes = if *naive {
                naive_encode(&bdd, config.backend)
            } else {
                bdz_core::encode(&bdd, &config).map_err(|e| Failure::Usage(e.to_string()))?
            };
            write_atomic(output, &bytes)?;
            Ok(format!(
                "{} nodes -> {} bytes ({:.3} bits/node)\n",
                bdd.len(),
                bytes.len(),
                bits_per_node(bytes.len(), bdd.len())
            ))
        }
        Command::Decompress { input, output } => {
            let bdd = decode_container(&read_file(input)?).map_err(format_err(input))?;
            write_atomic(output, write_bdd_text(&bdd).as_bytes())?;
            Ok(format!("{} nodes\n", bdd.len()))
        }
        Command::Verify { original, container } => {
            let expected = read_text_bdd(original)?;
            let decoded = decode_container(&read_file(container)?).map_err(format_err(container))?;
            compare(&expected, &decoded).map(|s| s + "\n").map_err(Failure::Mismatch)
        }
        Command::Stats { input, codec } => stats(&read_text_bdd(input)?, &codec.config()),
        Command::Gen { kind, output } => {
            let text = write_bdd_text(&generate(kind)?);
            match output {
                Some(path) => {
                    write_atomic(path, text.as_bytes())?;
                    Ok(String::new())
                }
                None => {
                    let _ = out.write_all(text.as_bytes());
                    Ok(String::new())
                }
            }
        }
        Command::Bench { dir, codec, csv } => {
            let rows = bench_rows(dir, &codec.config(), err)?;
            Ok(render_bench(&rows, *csv))
        }
    }
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
/// Returns the process exit status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match execute(&cli.command, out, err) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(failure) => {
            let _ = writeln!(err, "bdz: {failure}");
            failure.exit_code()
        }
    }
}
