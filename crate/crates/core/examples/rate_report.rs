//! Three-way comparison of HP rates, printed as a table and as key=value
//! lines.

use lc5w::container::EncoderConfig;
use lc5w::report::RateReport;
use lc5w::volume::{generate_phantom, PhantomSpec};

pub fn run() -> lc5w::Result<()> {
    let v = generate_phantom(&PhantomSpec::blocky(64, 64, 8, 16, 0))?;
    let r = RateReport::build(&v, &EncoderConfig::default())?;
    print!("{}", r.table());
    println!();
    print!("{}", r.key_values());
    assert!(r.dominance_holds());
    Ok(())
}

#[allow(dead_code)]
fn main() -> lc5w::Result<()> {
    run()
}
