//! Writes the level 17 f_1 fixture: `cargo run --example gen_level17_fixture -- ORDER PATH`.

use hkm_core::plusforms::{reference_f1_level17, to_json, verify_plusform};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let order: i64 = args.next().unwrap_or_else(|| "700".into()).parse()?;
    let path = args.next().unwrap_or_else(|| "fixtures/p17_f1.json".into());
    let f = reference_f1_level17(order)?;
    let rep = verify_plusform(&f);
    eprintln!("{}", rep.render());
    std::fs::write(&path, to_json(&f))?;
    Ok(())
}
