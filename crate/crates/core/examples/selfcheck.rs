//! Run every verification suite and print the summary table.

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let results = quiverflow::selfcheck::run_all(seed);
    print!("{}", quiverflow::selfcheck::summary_table(&results));
}
