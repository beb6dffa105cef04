//! Command-line driver. Machine output goes to stdout; progress and log lines
//! go to stderr prefixed with `[party-i]` or `[oblivgm]`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 protocol failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::engine::{
    open_results, sec_access, sec_fetch_multi, sec_fetch_unique, sec_match_with_progress, sec_eval, AccessCache,
    AnyMode, EngineConfig, HopReport, MatchResultSet,
};
use crate::error::{Error, Result};
use crate::fss::{FssKeyBundle, Predicate};
use crate::graph::{decode_one_hot, encrypt_graph, reconstruct_vertex, AttributedGraph, EncryptedGraphShare, PlainVertex, Sidecar};
use crate::net::{run_local_trio, run_tcp_trio, CommStats, Party, PartyConfig, TcpTransport};
use crate::oracle::oracle_match_with;
use crate::query::{gen_token, PartyToken, QueryGraph};
use crate::rss::{share, BitVector, PartyId, SharedBitVector};
use crate::shuffle::{sec_shuffle, MatchTable};
use crate::workload::{random_graph, GraphParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_PROTOCOL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "oblivgm", version, about = "Oblivious attributed subgraph matching with three servers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One-hot encode, pad and secret-share a plaintext graph.
    Encrypt(EncryptArgs),
    /// Turn a plaintext query into one token per server.
    Tokenize(TokenizeArgs),
    /// Run server-side matching for one party (TCP) or all three (--local-trio).
    Serve(ServeArgs),
    /// Run a tokenized query on all three servers from one process and
    /// stream per-hop progress.
    ///
    /// Progress lines show candidate and match counts per hop. The servers
    /// see these counts too: they are the access pattern the protocol leaks.
    Query(QueryArgs),
    /// Reconstruct answers from two or three result shares.
    Open(OpenArgs),
    /// Plaintext matcher, printing in the same format as `open`.
    Oracle(OracleArgs),
    /// Tab-separated latency and traffic measurements.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum AnyModeArg {
    #[default]
    Or,
    Xor,
}

impl From<AnyModeArg> for AnyMode {
    fn from(m: AnyModeArg) -> Self {
        match m {
            AnyModeArg::Or => AnyMode::Or,
            AnyModeArg::Xor => AnyMode::Xor,
        }
    }
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let hex = s.trim_start_matches("0x");
    u64::from_str_radix(hex, 16).map_err(|e| format!("seed must be hex: {e}"))
}

#[derive(Args, Debug)]
pub struct EncryptArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Hex seed; omit for fresh randomness.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Reconstruct every vertex from the written files and compare.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug)]
pub struct TokenizeArgs {
    #[arg(long)]
    pub query: PathBuf,
    /// Sidecar written by `encrypt`.
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1)]
    pub session: u32,
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub any_mode: AnyModeArg,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    /// Party number 1..=3. Peers come from OBLIVGM_BIND and OBLIVGM_PEERS.
    #[arg(long, conflicts_with = "local_trio", required_unless_present = "local_trio")]
    pub party: Option<u8>,
    #[arg(long, requires = "party")]
    pub graph_share: Option<PathBuf>,
    #[arg(long, requires = "party")]
    pub token: Option<PathBuf>,
    #[arg(long, requires = "party")]
    pub out: Option<PathBuf>,
    /// Host all three parties in this process.
    #[arg(long)]
    pub local_trio: bool,
    #[arg(long, requires = "local_trio")]
    pub graph_dir: Option<PathBuf>,
    #[arg(long, requires = "local_trio")]
    pub token_dir: Option<PathBuf>,
    #[arg(long, requires = "local_trio")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 60)]
    pub timeout_secs: u64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    #[arg(long)]
    pub token_dir: PathBuf,
    #[arg(long)]
    pub graph_dir: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Connect the parties over loopback TCP instead of in-process queues.
    #[arg(long)]
    pub tcp: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct OpenArgs {
    #[arg(long, num_args = 2..=3, required = true)]
    pub results: Vec<PathBuf>,
    #[arg(long)]
    pub schema: PathBuf,
    /// Also print decoded attribute values.
    #[arg(long)]
    pub attrs: bool,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub any_mode: AnyModeArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    /// Each building block on synthetic shares.
    Subprotocols,
    /// A two-hop, four-vertex query over a random graph, split by phase.
    Match,
    /// Ciphertext size and padding for k = 2, 4, 6.
    Encrypt,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 256)]
    pub candidates: usize,
    #[arg(long, default_value_t = 2000)]
    pub vertices: usize,
    #[arg(long, value_parser = parse_seed, default_value = "1")]
    pub seed: u64,
}

/// Error plus the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

fn invalid(error: Error) -> Failure {
    Failure { code: EXIT_INVALID, error }
}

fn protocol(error: Error) -> Failure {
    let code = if error.is_protocol() { EXIT_PROTOCOL } else { EXIT_INVALID };
    Failure { code, error }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn rng_for(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

pub fn share_path(dir: &Path, p: PartyId) -> PathBuf {
    dir.join(format!("party{}.share", p.number()))
}

pub fn sidecar_path(dir: &Path) -> PathBuf {
    dir.join("schema.json")
}

pub fn token_path(dir: &Path, p: PartyId) -> PathBuf {
    dir.join(format!("token{}.bin", p.number()))
}

pub fn result_path(dir: &Path, p: PartyId) -> PathBuf {
    dir.join(format!("result{}.bin", p.number()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("[oblivgm] error: {}", f.error);
            f.code
        }
    }
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Encrypt(a) => encrypt(a),
        Command::Tokenize(a) => tokenize(a),
        Command::Serve(a) => serve(a),
        Command::Query(a) => query(a),
        Command::Open(a) => open(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
    }
}

fn encrypt(a: EncryptArgs) -> CliResult<()> {
    let graph = AttributedGraph::parse(&read_text(&a.graph).map_err(invalid)?).map_err(invalid)?;
    if a.k < 2 {
        return Err(invalid(Error::Invalid("k must be at least 2".into())));
    }
    let enc = encrypt_graph(&graph, a.k, &mut rng_for(a.seed)).map_err(invalid)?;
    create_dir(&a.out_dir).map_err(invalid)?;
    let mut total = 0usize;
    for s in &enc.shares {
        let bytes = s.to_bytes().map_err(invalid)?;
        total += bytes.len();
        fs::write(share_path(&a.out_dir, s.party), bytes).map_err(|e| invalid(e.into()))?;
    }
    enc.sidecar.save(&sidecar_path(&a.out_dir)).map_err(invalid)?;
    println!("vertices\t{}", graph.len());
    println!("edges\t{}", graph.edge_count());
    println!("k\t{}", a.k);
    println!("real_entries\t{}", enc.stats.real_entries);
    println!("dummies\t{}", enc.stats.dummies);
    println!("ciphertext_bytes\t{total}");
    for (t, sizes) in &enc.stats.group_sizes {
        let s: Vec<String> = sizes.iter().map(usize::to_string).collect();
        println!("groups\t{t}\t{}", s.join(","));
    }
    if a.verify {
        let loaded = PartyId::ALL
            .map(|p| EncryptedGraphShare::load(&share_path(&a.out_dir, p), Some(p)))
            .into_iter()
            .collect::<Result<Vec<_>>>()
            .map_err(invalid)?;
        let views: Vec<&EncryptedGraphShare> = loaded.iter().collect();
        for (t, ts) in enc.sidecar.schema.types.iter().enumerate() {
            for i in 0..ts.population {
                let plain = reconstruct_vertex(&views, t, i).map_err(invalid)?;
                let g = graph.lookup(enc.sidecar.ext_id(t, i)).map_err(invalid)?;
                if !vertex_matches(&graph, &enc.sidecar, g, t, i, &plain).map_err(invalid)? {
                    let id = &graph.vertex(g).ext_id;
                    return Err(invalid(Error::Invalid(format!("vertex {id} did not reconstruct"))));
                }
            }
        }
        println!("verify\tok");
    }
    Ok(())
}

/// Compares a reconstructed vertex with the plaintext graph, including
/// padded posting lists.
fn vertex_matches(graph: &AttributedGraph, sidecar: &Sidecar, g: usize, t: usize, i: usize, plain: &PlainVertex) -> Result<bool> {
    let schema = &sidecar.schema;
    let ts = &schema.types[t];
    if decode_one_hot(&plain.id)? != Some(i) {
        return Ok(false);
    }
    let v = graph.vertex(g);
    for (a, bits) in ts.attributes.iter().zip(&plain.attrs) {
        if a.decode(bits)? != v.attrs.get(&a.name).map(String::as_str) {
            return Ok(false);
        }
    }
    for (nt, nts) in schema.types.iter().enumerate() {
        let mut want: Vec<Option<String>> =
            graph.posting_list(g, &nts.name).into_iter().map(|n| Some(graph.vertex(n).ext_id.clone())).collect();
        want.resize(ts.posting_lengths[i][nt], None);
        let got = plain.postings[nt]
            .iter()
            .map(|e| Ok(decode_one_hot(e)?.map(|j| sidecar.ext_id(nt, j).to_owned())))
            .collect::<Result<Vec<_>>>()?;
        if got != want {
            return Ok(false);
        }
    }
    Ok(true)
}

fn tokenize(a: TokenizeArgs) -> CliResult<()> {
    let sidecar = Sidecar::load(&a.schema).map_err(invalid)?;
    let query = QueryGraph::parse(&read_text(&a.query).map_err(invalid)?).map_err(invalid)?;
    let tokens = gen_token(&query, &sidecar.schema, &mut rng_for(a.seed)).map_err(invalid)?;
    create_dir(&a.out_dir).map_err(invalid)?;
    for t in &tokens {
        t.save(&token_path(&a.out_dir, t.party)).map_err(invalid)?;
    }
    let bytes: Vec<String> = tokens.iter().map(|t| t.to_bytes().len().to_string()).collect();
    println!("vertices\t{}", query.len());
    println!("token_bytes\t{}", bytes.join(","));
    Ok(())
}

fn progress_line(p: PartyId, h: &HopReport) -> String {
    format!(
        "[party-{}] hop {}: {} candidates, {} matched ({:?})",
        p.number(),
        h.vertex,
        h.candidates,
        h.matched,
        h.case
    )
}

fn summary_line(p: PartyId, r: &MatchResultSet, c: &CommStats, elapsed: Duration) -> String {
    format!(
        "[party-{}] done: {} subgraphs, {} rounds, {} bytes sent, {} bits opened, {:.3} s",
        p.number(),
        r.subgraphs.len(),
        c.rounds,
        c.bytes_sent,
        c.opened_bits,
        elapsed.as_secs_f64()
    )
}

fn match_one(party: &mut Party, token: &PartyToken, graph: &EncryptedGraphShare, config: &EngineConfig) -> Result<MatchResultSet> {
    let me = party.id();
    let start = Instant::now();
    let before = party.stats();
    let r = sec_match_with_progress(party, token, graph, config, |h| eprintln!("{}", progress_line(me, h)))?;
    eprintln!("{}", summary_line(me, &r, &party.stats().since(&before), start.elapsed()));
    Ok(r)
}

fn load_trio(graph_dir: &Path, token_dir: &Path) -> Result<Vec<(EncryptedGraphShare, PartyToken)>> {
    PartyId::ALL
        .iter()
        .map(|&p| {
            Ok((
                EncryptedGraphShare::load(&share_path(graph_dir, p), Some(p))?,
                PartyToken::load(&token_path(token_dir, p), Some(p))?,
            ))
        })
        .collect()
}

fn run_trio(graph_dir: &Path, token_dir: &Path, out_dir: &Path, tcp: bool, run: &RunArgs) -> CliResult<()> {
    let loaded = load_trio(graph_dir, token_dir).map_err(invalid)?;
    create_dir(out_dir).map_err(invalid)?;
    let config = EngineConfig { any_mode: run.any_mode.into() };
    let seed = run.seed.unwrap_or_else(|| rand::thread_rng().next_u64());
    let configs = PartyConfig::trio(run.session, seed);
    let inputs = [0, 1, 2].map(|i| &loaded[i]);
    let f = |party: &mut Party, (g, t): &(EncryptedGraphShare, PartyToken)| match_one(party, t, g, &config);
    let results = if tcp { run_tcp_trio(configs, inputs, f) } else { run_local_trio(configs, inputs, f) }.map_err(protocol)?;
    for r in &results {
        r.save(&result_path(out_dir, r.party)).map_err(invalid)?;
    }
    println!("subgraphs\t{}", results[0].subgraphs.len());
    for p in PartyId::ALL {
        println!("result\t{}", result_path(out_dir, p).display());
    }
    Ok(())
}

fn serve(a: ServeArgs) -> CliResult<()> {
    if a.local_trio {
        let need = |p: &Option<PathBuf>, flag: &str| {
            p.clone().ok_or_else(|| invalid(Error::Invalid(format!("--local-trio needs {flag}"))))
        };
        let (g, t, o) = (need(&a.graph_dir, "--graph-dir")?, need(&a.token_dir, "--token-dir")?, need(&a.out_dir, "--out-dir")?);
        return run_trio(&g, &t, &o, false, &a.run);
    }
    let me = PartyId::new(a.party.unwrap_or(0)).map_err(invalid)?;
    let need = |p: &Option<PathBuf>, flag: &str| {
        p.clone().ok_or_else(|| invalid(Error::Invalid(format!("--party needs {flag}"))))
    };
    let graph = EncryptedGraphShare::load(&need(&a.graph_share, "--graph-share")?, Some(me)).map_err(invalid)?;
    let token = PartyToken::load(&need(&a.token, "--token")?, Some(me)).map_err(invalid)?;
    let out = need(&a.out, "--out")?;
    let seed = a.run.seed.unwrap_or_else(|| rand::thread_rng().next_u64());
    let config = PartyConfig::trio(a.run.session, seed)[me.index()].clone();
    let transport =
        TcpTransport::from_env(me, a.run.session, Duration::from_secs(a.timeout_secs)).map_err(protocol)?;
    let mut party = Party::setup(config, Box::new(transport)).map_err(protocol)?;
    let engine = EngineConfig { any_mode: a.run.any_mode.into() };
    let r = match_one(&mut party, &token, &graph, &engine).map_err(protocol)?;
    r.save(&out).map_err(invalid)?;
    println!("result\t{}", out.display());
    Ok(())
}

fn query(a: QueryArgs) -> CliResult<()> {
    run_trio(&a.graph_dir, &a.token_dir, &a.out_dir, a.tcp, &a.run)
}

fn print_answers(lines: impl Iterator<Item = String>) {
    let mut n = 0;
    for l in lines {
        println!("{l}");
        n += 1;
    }
    eprintln!("[oblivgm] {n} subgraphs");
}

fn open(a: OpenArgs) -> CliResult<()> {
    let sidecar = Sidecar::load(&a.schema).map_err(invalid)?;
    let shares = a.results.iter().map(|p| MatchResultSet::load(p)).collect::<Result<Vec<_>>>().map_err(invalid)?;
    let opened = open_results(&shares, &sidecar).map_err(invalid)?;
    print_answers(opened.iter().map(|g| {
        if a.attrs {
            let parts: Vec<String> = g
                .vertices
                .iter()
                .map(|v| {
                    let attrs: Vec<String> =
                        v.attrs.iter().map(|(k, x)| format!("{k}={}", x.as_deref().unwrap_or("-"))).collect();
                    format!("{}={}({})", v.query_vertex, v.ext_id, attrs.join(","))
                })
                .collect();
            parts.join(" ")
        } else {
            g.to_string()
        }
    }));
    Ok(())
}

fn oracle(a: OracleArgs) -> CliResult<()> {
    let graph = AttributedGraph::parse(&read_text(&a.graph).map_err(invalid)?).map_err(invalid)?;
    let query = QueryGraph::parse(&read_text(&a.query).map_err(invalid)?).map_err(invalid)?;
    let matches = oracle_match_with(&graph, &query, a.any_mode.into()).map_err(invalid)?;
    print_answers(matches.iter().map(|m| {
        let parts: Vec<String> =
            query.vertices.iter().zip(m).map(|(q, id)| format!("{}={id}", q.name)).collect();
        parts.join(" ")
    }));
    Ok(())
}

fn bench(a: BenchArgs) -> CliResult<()> {
    match a.suite {
        Suite::Subprotocols => bench_subprotocols(a.candidates, a.seed),
        Suite::Match => bench_match(a.vertices, a.seed),
        Suite::Encrypt => bench_encrypt(a.vertices, a.seed),
    }
    .map_err(protocol)
}

/// One row per measured step: bytes and rounds are totals over the three
/// parties, time is the slowest party.
pub struct BenchRow {
    pub suite: &'static str,
    pub step: String,
    pub size: usize,
    pub rounds: u64,
    pub bytes: u64,
    pub opened_bits: u64,
    pub time: Duration,
}

impl BenchRow {
    pub const HEADER: &'static str = "suite\tstep\tsize\trounds\tbytes\topened_bits\tms";

    fn print(&self) {
        println!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
            self.suite,
            self.step,
            self.size,
            self.rounds,
            self.bytes,
            self.opened_bits,
            self.time.as_secs_f64() * 1e3
        );
    }
}

fn measure<I: Send, F>(step: &str, size: usize, seed: u64, inputs: [I; 3], f: F) -> Result<BenchRow>
where
    F: Fn(&mut Party, I) -> Result<()> + Sync,
{
    let out = run_local_trio(PartyConfig::trio(9, seed), inputs, |party, input| {
        let before = party.stats();
        let start = Instant::now();
        f(party, input)?;
        Ok((party.stats().since(&before), start.elapsed()))
    })?;
    Ok(BenchRow {
        suite: "subprotocols",
        step: step.to_string(),
        size,
        rounds: out[0].0.rounds,
        bytes: out.iter().map(|(c, _)| c.bytes_sent).sum(),
        opened_bits: out[0].0.opened_bits,
        time: out.iter().map(|(_, t)| *t).max().unwrap_or_default(),
    })
}

fn deal(plain: &[BitVector], rng: &mut ChaCha20Rng) -> Result<[Vec<SharedBitVector>; 3]> {
    let mut out: [Vec<SharedBitVector>; 3] = Default::default();
    for v in plain {
        for (p, s) in share(v, rng)?.into_iter().enumerate() {
            out[p].push(s);
        }
    }
    Ok(out)
}

/// Measures every building block on `c` synthetic candidates.
pub fn subprotocol_rows(c: usize, seed: u64) -> Result<Vec<BenchRow>> {
    use rand::Rng;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = 128usize;
    let attrs: Vec<BitVector> = (0..c).map(|_| BitVector::one_hot(n, rng.gen_range(0..n))).collect();
    let attrs = deal(&attrs, &mut rng)?;
    let mut rows = Vec::new();
    for (name, pred) in [
        ("eval =", Predicate::Equal(40)),
        ("eval <", Predicate::Less(40)),
        ("eval in[]", Predicate::closed(30, 40)),
    ] {
        let bundle = FssKeyBundle::generate(&pred, 7, &mut rng)?;
        let keys = PartyId::ALL.map(|p| bundle.party_keys(p));
        let inputs = [0, 1, 2].map(|i| (&keys[i], &attrs[i]));
        rows.push(measure(name, c, seed, inputs, |party, (k, a)| sec_eval(party, k, a).map(drop))?);
    }
    let width = 64;
    let plain_rows: Vec<BitVector> = (0..c).map(|_| BitVector::random(width, &mut rng)).collect();
    let table = deal(&plain_rows, &mut rng)?;
    let one = (0..c).map(|i| i == c / 2).collect::<Vec<_>>();
    let some = (0..c).map(|_| rng.gen_bool(0.1)).collect::<Vec<_>>();
    let x_one = share(&BitVector::from_bits(&one), &mut rng)?;
    let x_some = share(&BitVector::from_bits(&some), &mut rng)?;
    let inputs = [0, 1, 2].map(|i| (&x_one[i], &table[i]));
    rows.push(measure("fetch unique", c, seed, inputs, |party, (x, r)| {
        sec_fetch_unique(party, x, r, &[0..r.len()]).map(drop)
    })?);
    let inputs = [0, 1, 2].map(|i| (&x_some[i], &table[i]));
    rows.push(measure("fetch multi", c, seed, inputs, |party, (x, r)| {
        sec_fetch_multi(party, x, r, &[0..r.len()]).map(drop)
    })?);
    let inputs = [0, 1, 2].map(|i| &table[i]);
    rows.push(measure("shuffle", c, seed, inputs, |party, r| {
        sec_shuffle(party, MatchTable::new(r.clone(), width)?).map(drop)
    })?);

    // Neighbor access from one matched vertex of a random graph.
    let g = random_graph(&GraphParams { vertices: c.max(60), ..GraphParams::default() }, &mut rng)?;
    let enc = encrypt_graph(&g, 2, &mut rng)?;
    let pop = enc.sidecar.schema.types[0].population;
    let ids = deal(&[BitVector::one_hot(pop, 0)], &mut rng)?;
    let inputs = [0, 1, 2].map(|i| (&enc.shares[i], &ids[i]));
    let mut access = measure("access", pop, seed, inputs, |party, (share, ids)| {
        sec_access(party, share, &mut AccessCache::default(), 0, ids, 1, &[0]).map(drop)
    })?;
    access.size = enc.sidecar.schema.types[0].max_posting_len(1);
    rows.push(access);
    Ok(rows)
}

fn bench_subprotocols(c: usize, seed: u64) -> Result<()> {
    println!("{}", BenchRow::HEADER);
    for r in subprotocol_rows(c, seed)? {
        r.print();
    }
    Ok(())
}

/// Runs a two-hop chain query `T0 → T1 → T2` plus a second child of the
/// root over a random graph with `n` vertices; reports per-phase costs.
pub fn match_rows(n: usize, seed: u64) -> Result<Vec<BenchRow>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let params = GraphParams { vertices: n, types: 3, dict: (64, 64), avg_degree: 4.0, unique_attr: true, missing_rate: 0.0 };
    let g = random_graph(&params, &mut rng)?;
    let enc = encrypt_graph(&g, 2, &mut rng)?;
    let query = QueryGraph::parse(
        "Q r T0 a0 < 8\nQ a T1 a0 in[] 0 30\nQ b T2 a1 >= 10\nQ c T1 a1 < 40\nQE r a\nQE a b\nQE r c\n",
    )?;
    let tokens = gen_token(&query, &enc.sidecar.schema, &mut rng)?;
    let inputs = [0, 1, 2].map(|i| (&enc.shares[i], &tokens[i]));
    let start = Instant::now();
    let out = run_local_trio(PartyConfig::trio(10, seed), inputs, |party, (g, t)| {
        crate::engine::sec_match(party, t, g, &EngineConfig::default())
    })?;
    let total = start.elapsed();
    let row = |step: &str, f: &dyn Fn(&MatchResultSet) -> (CommStats, Duration)| BenchRow {
        suite: "match",
        step: step.to_string(),
        size: n,
        rounds: f(&out[0]).0.rounds,
        bytes: out.iter().map(|r| f(r).0.bytes_sent).sum(),
        opened_bits: f(&out[0]).0.opened_bits,
        time: out.iter().map(|r| f(r).1).max().unwrap_or_default(),
    };
    let mut rows = vec![
        row("eval", &|r| (r.phases.eval.comm, r.phases.eval.time)),
        row("fetch", &|r| (r.phases.fetch.comm, r.phases.fetch.time)),
        row("access", &|r| (r.phases.access.comm, r.phases.access.time)),
    ];
    let mut all = row("total", &|r| {
        let p = &r.phases;
        let mut c = p.eval.comm;
        for d in [p.fetch.comm, p.access.comm] {
            c.rounds += d.rounds;
            c.bytes_sent += d.bytes_sent;
            c.opened_bits += d.opened_bits;
        }
        (c, Duration::ZERO)
    });
    all.time = total;
    all.step = format!("total ({} subgraphs)", out[0].subgraphs.len());
    rows.push(all);
    Ok(rows)
}

fn bench_match(n: usize, seed: u64) -> Result<()> {
    println!("{}", BenchRow::HEADER);
    for r in match_rows(n, seed)? {
        r.print();
    }
    Ok(())
}

fn bench_encrypt(n: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let g = random_graph(&GraphParams { vertices: n, ..GraphParams::default() }, &mut rng)?;
    println!("suite\tk\tdummies\tciphertext_bytes\tms");
    for k in [2, 4, 6] {
        let start = Instant::now();
        let enc = encrypt_graph(&g, k, &mut rng)?;
        let bytes: usize = enc.shares.iter().map(|s| s.to_bytes().map(|b| b.len())).sum::<Result<usize>>()?;
        println!("encrypt\t{k}\t{}\t{bytes}\t{:.3}", enc.stats.dummies, start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(())
}
