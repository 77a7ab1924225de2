//! Alice (perspective I) knows that Bob (perspective H) is wrong about `f`:
//! Bob's knowledge operation maps Alice's falsity to her truth.

use holoq::gatelib::{
    epistemic_distance, EpistemicSituation, Preset, PresetKind, QuasiModel, TruthPerspective,
};
use holoq::holistic::evaluate;
use holoq::lang::{parse_sentence, OccurrencePath};
use holoq::qlin::probability;

fn main() -> holoq::Result<()> {
    let ta = TruthPerspective::identity();
    let tb = TruthPerspective::hadamard();
    let qm = QuasiModel::new()
        .with_situation(EpistemicSituation::maximal("a", "t", ta.clone()))
        .with_situation(EpistemicSituation::with_preset(
            "b",
            "t",
            tb.clone(),
            Preset::new(PresetKind::FlipInBasis, ta.clone()),
        ));
    println!(
        "distance(a, b) = {}",
        holoq::fmt_probability(epistemic_distance(&ta, &tb))
    );

    let s = parse_sentence("K[a@t] K[b@t] f")?;
    let ev = evaluate(&qm, &ta, &s, &ta.falsity())?;
    println!(
        "p_a(K a K b f) = {}",
        holoq::fmt_probability(ev.probability())
    );
    let level2 = ev.contextual_meaning(OccurrencePath::new(2, 1))?;
    println!(
        "p_b(level 2) = {}",
        holoq::fmt_probability(probability(&tb, &level2))
    );
    Ok(())
}
