//! Samples normal models to test two consequence claims: one that holds and
//! one with a countermodel, which is then replayed.

use holoq::gatelib::QuasiModel;
use holoq::judgments::{check_consequence, Claim, PerspectiveScope, SamplerConfig};
use holoq::lang::parse_sentence;

fn main() -> holoq::Result<()> {
    let cfg = SamplerConfig::new(7, 300);
    let qm = QuasiModel::new();

    let conj = Claim::consequence(
        parse_sentence("q /\\ r")?,
        vec![parse_sentence("q /\\ r")?],
        parse_sentence("q")?,
        PerspectiveScope::Sampled,
    );
    println!("{conj}: {}", check_consequence(&conj, &qm, &cfg)?);

    let xor = Claim::consequence(
        parse_sentence("q (+) r")?,
        vec![parse_sentence("q")?],
        parse_sentence("q (+) r")?,
        PerspectiveScope::Sampled,
    );
    let v = check_consequence(&xor, &qm, &cfg)?;
    println!("{xor}: {v}");
    if let Some(cx) = v.counterexample() {
        println!("replay reproduces: {}", cx.reproduces(1e-12)?);
    }
    Ok(())
}
