//! An agent with perfect knowledge still does not make `K not T(q, not q, f)`
//! true: from a top state where both `q` are |+> the sentence gets p = 3/4.

use holoq::gatelib::{EpistemicSituation, QuasiModel, TruthPerspective};
use holoq::holistic::evaluate;
use holoq::lang::parse_sentence;
use holoq::qlin::{tensor_all, Ket, Qumix};

fn main() -> holoq::Result<()> {
    let p = TruthPerspective::identity();
    let qm = QuasiModel::new().with_situation(EpistemicSituation::maximal("a", "t", p.clone()));
    let s = parse_sentence("K[a@t] not T(q, not q, f)")?;

    let plus = Qumix::pure(&Ket::superposition(&["0", "1"])?);
    let top = tensor_all(&[plus.clone(), plus, Qumix::p0()])?;
    let ev = evaluate(&qm, &p, &s, &top)?;

    for g in ev.pseudo_gates() {
        println!("{g}");
    }
    println!("p = {}", holoq::fmt_probability(ev.probability()));
    println!("normality: {}", ev.check_normal());
    println!("commutation: {}", ev.check_commutation());
    Ok(())
}
