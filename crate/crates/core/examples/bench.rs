//! Per-subprotocol rounds, traffic and opened bits, then a full match on a
//! random graph. Same numbers as `oblivgm bench`.
//!
//!     cargo run --release --example bench -- [CANDIDATES] [VERTICES]

use oblivgm::cli::{match_rows, subprotocol_rows, BenchRow};

fn main() -> oblivgm::Result<()> {
    let mut args = std::env::args().skip(1);
    let c: usize = args.next().map_or(256, |s| s.parse().expect("CANDIDATES"));
    let n: usize = args.next().map_or(2000, |s| s.parse().expect("VERTICES"));
    println!("{}", BenchRow::HEADER);
    for r in subprotocol_rows(c, 1)?.into_iter().chain(match_rows(n, 2)?) {
        println!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
            r.suite,
            r.step,
            r.size,
            r.rounds,
            r.bytes,
            r.opened_bits,
            r.time.as_secs_f64() * 1e3
        );
    }
    Ok(())
}
