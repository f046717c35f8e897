use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, ensure, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use wsec_core::field::DEFAULT_FIELD_CAP;
use wsec_core::oracle::{equivalence_check, DEFAULT_ORACLE_CAP};
use wsec_core::security::observed_generator;
use wsec_core::text;
use wsec_core::{leakage, CosetCode, FElem, FieldTower, Mode, OuterParams, Quantifier, StorageCode, StorageCodeSpec, Verifier};

/// Outer coset codes that keep groups of files secret from eavesdroppers on
/// MSR storage nodes.
#[derive(Parser)]
#[command(name = "wsec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an outer coset code and write it to a file.
    GenOuter {
        #[arg(long, value_enum)]
        construction: Which,
        #[command(flatten)]
        params: Params,
        /// Largest top-field size allowed.
        #[arg(long, default_value_t = DEFAULT_FIELD_CAP)]
        cap: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Build a striped MDS inner storage code and write it to a file.
    GenInner {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 1)]
        beta: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Coset-encode a message and write one share file per node.
    Encode {
        #[command(flatten)]
        codes: CodeFiles,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rebuild the message from the shares of k nodes.
    Decode {
        #[command(flatten)]
        codes: CodeFiles,
        #[arg(long)]
        share_dir: PathBuf,
        /// 1-based node list; defaults to the first k shares present.
        #[arg(long)]
        nodes: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Collect what an eavesdropper on the given nodes sees.
    Eavesdrop {
        #[arg(long)]
        share_dir: PathBuf,
        /// 1-based node list.
        #[arg(long)]
        nodes: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check g-weak security against eavesdroppers on l nodes.
    Verify {
        #[command(flatten)]
        codes: CodeFiles,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        g: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pairs drawn in sampled mode.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Also enumerate non-maximal set sizes.
        #[arg(long)]
        all_sizes: bool,
        /// Also write the report here.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Largest protected group size for every l below k.
    Report {
        #[command(flatten)]
        codes: CodeFiles,
    },
    /// Storage capacity bounds for a parameter set.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        beta: usize,
        #[arg(long)]
        l: usize,
    },
    /// Exact mutual information by enumeration, compared with the rank formula.
    MiOracle {
        #[command(flatten)]
        codes: CodeFiles,
        /// 1-based eavesdropped nodes.
        #[arg(long)]
        nodes: String,
        /// 1-based file indices.
        #[arg(long, default_value = "")]
        group: String,
        /// Largest number of codewords to enumerate.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u128,
        /// Also print the value in bits.
        #[arg(long)]
        bits: bool,
    },
}

#[derive(Args)]
struct Params {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    alpha: usize,
    #[arg(long)]
    q: u64,
}

#[derive(Args)]
struct CodeFiles {
    #[arg(long)]
    outer: PathBuf,
    #[arg(long)]
    inner: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "1", alias = "construct1")]
    One,
    #[value(name = "2", alias = "construct2")]
    Two,
    Identity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_outer(path: &Path) -> anyhow::Result<CosetCode> {
    text::parse_coset(&read(path)?).with_context(|| format!("parsing outer code {}", path.display()))
}

fn load_inner(path: &Path) -> anyhow::Result<StorageCode> {
    text::parse_storage(&read(path)?).with_context(|| format!("parsing inner code {}", path.display()))
}

fn load_pair(codes: &CodeFiles) -> anyhow::Result<(CosetCode, StorageCode)> {
    Ok((load_outer(&codes.outer)?, load_inner(&codes.inner)?))
}

/// Parses `1,3,4` into 0-based indices.
fn index_list(s: &str, limit: usize, what: &str) -> anyhow::Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let i: usize = part.trim().parse().with_context(|| format!("bad {what} index {part:?}"))?;
        ensure!((1..=limit).contains(&i), "{what} index {i} outside 1..={limit}");
        out.push(i - 1);
    }
    Ok(out)
}

fn share_path(dir: &Path, node: usize) -> PathBuf {
    dir.join(format!("share_{}.txt", node + 1))
}

/// Lifts `v` into `target` when it was written over one of its subfields.
fn lift(v: &[FElem], from: &FieldTower, target: &FieldTower) -> anyhow::Result<Vec<FElem>> {
    if from == target {
        return Ok(v.to_vec());
    }
    let level = from
        .subfield_level_in(target)
        .with_context(|| format!("values over GF({}) do not lie in GF({})", from.size(), target.size()))?;
    Ok(v.iter().map(|x| target.embed(x, level)).collect::<Result<_, _>>()?)
}

fn read_share(dir: &Path, node: usize) -> anyhow::Result<(Arc<FieldTower>, Vec<FElem>)> {
    let path = share_path(dir, node);
    let (found, tower, v) = text::parse_share(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?;
    ensure!(found == node, "{} holds the share of node {}", path.display(), found + 1);
    Ok((tower, v))
}

fn gen_outer(which: Which, p: &Params, cap: u64, out: &Path) -> anyhow::Result<()> {
    let params = OuterParams::new(p.n, p.k, p.d, p.alpha, p.q);
    let code = match which {
        Which::One => CosetCode::construct1_capped(params, cap)?,
        Which::Two => CosetCode::construct2_capped(params, cap)?,
        Which::Identity => CosetCode::identity(params)?,
    };
    write(out, &text::write_coset(&code))
}

fn gen_inner(p: &Params, beta: usize, out: &Path) -> anyhow::Result<()> {
    let spec = StorageCodeSpec::new(p.n, p.k, p.d, p.alpha, beta, p.q)?;
    let code = StorageCode::make_striped_mds(spec)?;
    let report = code.verify_structure();
    ensure!(report.passed(), "generated code failed its structure check: {report:?}");
    write(out, &text::write_storage(&code))
}

fn encode(codes: &CodeFiles, message: &Path, out_dir: &Path, seed: u64) -> anyhow::Result<()> {
    let (outer, inner) = load_pair(codes)?;
    let verifier = Verifier::new(&outer, &inner)?;
    let (tower, s) = text::parse_vector(&read(message)?).with_context(|| format!("parsing {}", message.display()))?;
    let s = lift(&s, &tower, outer.tower())?;
    let x = outer.encode(&s, seed)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for (node, share) in verifier.inner().encode(&x)?.iter().enumerate() {
        write(&share_path(out_dir, node), &text::write_share(node, outer.tower(), share)?)?;
    }
    Ok(())
}

fn decode(codes: &CodeFiles, share_dir: &Path, nodes: Option<&str>, out: &Path) -> anyhow::Result<()> {
    let (outer, inner) = load_pair(codes)?;
    let verifier = Verifier::new(&outer, &inner)?;
    let spec = *inner.spec();
    let nodes = match nodes {
        Some(list) => index_list(list, spec.n, "node")?,
        None => {
            let present: Vec<usize> = (0..spec.n).filter(|&i| share_path(share_dir, i).is_file()).take(spec.k).collect();
            ensure!(present.len() == spec.k, "found {} share files, need k = {}", present.len(), spec.k);
            present
        }
    };
    let shares = nodes
        .iter()
        .map(|&i| {
            let (tower, v) = read_share(share_dir, i)?;
            lift(&v, &tower, outer.tower())
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let x = verifier.inner().reconstruct(&nodes, &shares)?;
    write(out, &text::write_vector(outer.tower(), &outer.decode(&x)?)?)
}

fn eavesdrop(share_dir: &Path, nodes: &str, out: &Path) -> anyhow::Result<()> {
    let mut nodes = index_list(nodes, usize::MAX, "node")?;
    nodes.sort_unstable();
    nodes.dedup();
    ensure!(!nodes.is_empty(), "no nodes given");
    let mut tower: Option<Arc<FieldTower>> = None;
    let mut seen = Vec::new();
    for &i in &nodes {
        let (t, v) = read_share(share_dir, i)?;
        match &tower {
            Some(prev) => ensure!(**prev == *t, "shares are over different fields"),
            None => tower = Some(t),
        }
        seen.extend(v);
    }
    write(out, &text::write_view(&nodes, &tower.unwrap(), &seen)?)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    codes: &CodeFiles,
    l: usize,
    g: usize,
    mode: ModeArg,
    seed: u64,
    budget: usize,
    all_sizes: bool,
    out: Option<&Path>,
) -> anyhow::Result<ExitCode> {
    let (outer, inner) = load_pair(codes)?;
    let mode = match mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Sampled => Mode::Sampled { seed, budget },
    };
    let quantifier = if all_sizes { Quantifier::AllSizes } else { Quantifier::Maximal };
    let report = Verifier::new(&outer, &inner)?.check(l, g, mode, quantifier)?;
    let rendered = report.to_string();
    print!("{rendered}");
    if let Some(path) = out {
        write(path, &rendered)?;
    }
    Ok(if report.secure { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn report(codes: &CodeFiles) -> anyhow::Result<String> {
    let (outer, inner) = load_pair(codes)?;
    let verifier = Verifier::new(&outer, &inner)?;
    let p = outer.params();
    let mut out = String::new();
    writeln!(out, "CODE construction={} n={} k={} d={} alpha={} B={} Bs={}", outer.construction(), p.n, p.k, p.d, p.alpha, outer.b(), outer.bs())?;
    writeln!(out, "TOPFIELD q={} qr={} m={} size={}", p.q, p.qr, p.m, outer.tower().size())?;
    for l in 1..p.k {
        writeln!(out, "L={l} MAXG={} CEILING={}", verifier.max_g(l)?, verifier.ceiling(l)?)?;
    }
    Ok(out)
}

fn bounds(n: usize, k: usize, d: usize, alpha: usize, beta: usize, l: usize) -> anyhow::Result<String> {
    // Neither bound depends on the field.
    let spec = StorageCodeSpec::new(n, k, d, alpha, beta, 2)?;
    let (b, bs) = spec.capacity_bounds(l)?;
    Ok(format!("B<={b} Bs<={bs}\n"))
}

fn mi_oracle(codes: &CodeFiles, nodes: &str, group: &str, cap: u128, bits: bool) -> anyhow::Result<String> {
    let (outer, inner) = load_pair(codes)?;
    let nodes = index_list(nodes, inner.spec().n, "node")?;
    let group = index_list(group, outer.bs(), "file")?;
    let gprime = observed_generator(&outer, &inner, &nodes)?;
    let exact = wsec_core::mi_oracle(outer.h(), &gprime, &group, cap)?;
    let h_g = outer.h().take_rows(&group)?;
    let rank_value = leakage(&h_g, &gprime)?;
    let eq = equivalence_check(outer.h(), &gprime, &group, cap)?;
    let mut out = String::new();
    writeln!(out, "MI {exact} symbols")?;
    if bits {
        let scale = (outer.tower().size() as f64).log2();
        writeln!(out, "MI_BITS {:.6}", *exact.numer() as f64 / *exact.denom() as f64 * scale)?;
    }
    writeln!(out, "LEAKAGE {rank_value}")?;
    writeln!(out, "EQUIVALENCE unconditional={} conditional={}", eq.unconditional, eq.conditional)?;
    let agree = exact.is_integer() && exact.to_integer() == rank_value as i128;
    writeln!(out, "AGREE {}", if agree { "yes" } else { "no" })?;
    if !agree || !eq.agree() {
        print!("{out}");
        bail!("the enumeration disagrees with the rank formula");
    }
    Ok(out)
}

fn configure_threads() {
    if let Some(n) = std::env::var("WSEC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // A pool that is already set up is fine to keep.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let printed = match cli.command {
        Command::GenOuter { construction, params, cap, out } => gen_outer(construction, &params, cap, &out).map(|_| None),
        Command::GenInner { params, beta, out } => gen_inner(&params, beta, &out).map(|_| None),
        Command::Encode { codes, message, out_dir, seed } => encode(&codes, &message, &out_dir, seed).map(|_| None),
        Command::Decode { codes, share_dir, nodes, out } => decode(&codes, &share_dir, nodes.as_deref(), &out).map(|_| None),
        Command::Eavesdrop { share_dir, nodes, out } => eavesdrop(&share_dir, &nodes, &out).map(|_| None),
        Command::Verify { codes, l, g, mode, seed, budget, all_sizes, out } => {
            return verify(&codes, l, g, mode, seed, budget, all_sizes, out.as_deref());
        }
        Command::Report { codes } => report(&codes).map(Some),
        Command::Bounds { n, k, d, alpha, beta, l } => bounds(n, k, d, alpha, beta, l).map(Some),
        Command::MiOracle { codes, nodes, group, cap, bits } => mi_oracle(&codes, &nodes, &group, cap, bits).map(Some),
    }?;
    if let Some(text) = printed {
        print!("{text}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    configure_threads();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
