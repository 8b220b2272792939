//! LiH binding curve in a periodic cube: RHF plus up to four COVOs, FCI at
//! every COVO count. Reads `data/lih_scan.toml`.

use std::path::Path;

use pwcovo::config::RunConfig;
use pwcovo::pipeline::run_scan;

fn main() -> pwcovo::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/lih_scan.toml");
    let cfg = RunConfig::load(&path)?;
    let t = std::time::Instant::now();
    let out = run_scan(&cfg)?;
    print!("{}", out.table.to_csv());
    for (r, msg) in &out.failures {
        println!("R = {r}: {msg}");
    }
    println!("{} points in {:.1?}", out.table.rows.len(), t.elapsed());
    Ok(())
}
