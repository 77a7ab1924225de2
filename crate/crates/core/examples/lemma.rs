//! Nobody is sure of a contradiction: over sampled normal models and
//! perspectives, `q /\ not q` never gets a probability above 1/2.

use holoq::judgments::{lemma_noncontradiction, SamplerConfig};
use holoq::lang::parse_sentence;

fn main() -> holoq::Result<()> {
    let cfg = SamplerConfig::new(0, 500);
    for alpha in ["q", "not q", "q (+) r", "K[a@t] q"] {
        let r = lemma_noncontradiction(&parse_sentence(alpha)?, &cfg, 5)?;
        println!(
            "{}: {} models over {} perspectives, max p = {}, holds = {}",
            r.sentence,
            r.evaluated,
            r.perspectives,
            holoq::fmt_probability(r.max_probability),
            r.holds()
        );
    }
    Ok(())
}
