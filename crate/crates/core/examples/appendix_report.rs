//! Print every stabilizer-flow check for one construction (A, D, E, F or subsystem).

use swssb::holography::{verify_appendix, Appendix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let which: Appendix = std::env::args().nth(1).as_deref().unwrap_or("E").parse()?;
    let report = verify_appendix(which)?;
    for c in &report.checks {
        println!("{:<40} {}  {}", c.name, if c.passed { "ok" } else { "FAILED" }, c.detail);
    }
    println!("{}", if report.passed() { "all checks passed" } else { "some checks failed" });
    Ok(())
}
