//! Runs every verification command in-process and prints a one-line summary each.
//! Pass a path to a TOML configuration to override the defaults.

use dsgeom::cli::{run_command, CommandKind, RunConfig};

fn main() -> dsgeom::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::load(path.as_ref())?,
        None => RunConfig::default(),
    };
    for kind in CommandKind::ALL {
        let report = run_command(kind, &cfg)?;
        let s = &report.summary;
        println!("{:<20} pass {:>3}  fail {:>2}  reported {:>2}", kind.to_string(), s.pass, s.fail, s.reported);
        for c in report.checks.iter().filter(|c| c.status != dsgeom::cli::Status::Pass) {
            println!("    {:?} {} ({})", c.status, c.id, c.anchor);
        }
    }
    Ok(())
}
