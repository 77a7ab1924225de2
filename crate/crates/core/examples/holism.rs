//! Entanglement makes meaning holistic: the parts of `T(q, not q, f)` look
//! maximally mixed on their own, yet the whole has p = 1/2, while gluing the
//! parts back together as a product gives only 1/4.

use holoq::gatelib::{GateKind, GateSpec, QuasiModel, TruthPerspective};
use holoq::holistic::evaluate;
use holoq::lang::{parse_sentence, OccurrencePath};
use holoq::qlin::{probability, tensor_all, Ket, Qumix};

fn main() -> holoq::Result<()> {
    let p = TruthPerspective::identity();
    let s = parse_sentence("T(q, not q, f)")?;
    let top = Qumix::pure(&Ket::superposition(&["010", "100"])?);
    let ev = evaluate(&QuasiModel::new(), &p, &s, &top)?;
    println!("p(whole) = {}", holoq::fmt_probability(ev.probability()));

    let parts = (1..=3)
        .map(|j| ev.contextual_meaning(OccurrencePath::new(2, j)))
        .collect::<holoq::Result<Vec<_>>>()?;
    for (j, rho) in parts.iter().enumerate() {
        println!(
            "part {}: p1 = {}",
            j + 1,
            holoq::fmt_probability(probability(&p, rho))
        );
    }

    let glued = GateSpec::new(GateKind::Toffoli(1, 1, 1), p.clone()).apply(&tensor_all(&parts)?)?;
    println!(
        "p(product of parts) = {}",
        holoq::fmt_probability(probability(&p, &glued))
    );
    Ok(())
}
