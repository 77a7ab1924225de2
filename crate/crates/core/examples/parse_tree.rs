//! Parses a sentence, prints its syntactical tree and the pseudo-gates that
//! walk a top-level meaning down to the sentence.

use holoq::gatelib::{pseudo_gate_tree, TruthPerspective};
use holoq::judgments::maximal_model_for;
use holoq::lang::{parse_sentence, SyntacticalTree};

fn main() -> holoq::Result<()> {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "K[a@t] not T(q, not q, f)".into());
    let s = parse_sentence(&text)?;
    println!("canonical: {s}");
    println!("atomic complexity: {}", s.atomic_complexity());

    let tree = SyntacticalTree::build(&s);
    print!("{}", tree.render());

    let p = TruthPerspective::identity();
    let qm = maximal_model_for(&s, &p);
    for pg in pseudo_gate_tree(&s, &p, &qm)? {
        println!(
            "Level_{} <- Level_{}: {pg}",
            pg.target_level,
            pg.target_level + 1
        );
    }
    Ok(())
}
