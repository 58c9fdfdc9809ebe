use pdk_verify::acceptance::{run_all, SuiteConfig, DEFAULT_SEED};

fn main() {
    let seed = std::env::var("PDK_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    let cfg = SuiteConfig { seed, depth: None };
    println!("acceptance suite, seed {seed}");
    let reports = run_all(&cfg);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", reports.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
