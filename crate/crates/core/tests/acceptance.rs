//! Primary acceptance suite. Prints one line per criterion and fails if any is red.

use lightasep::experiments::acceptance::run_primary;

fn main() {
    let seed = std::env::var("ACCEPTANCE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(1);
    println!("acceptance suite, seed {seed}");
    let outcomes = run_primary(seed, |o| println!("{}", o.line()));
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!("{} of {} criteria pass", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        println!("failing: {failed:?}");
        std::process::exit(1);
    }
}
