//! Builds a model file in code, writes it to disk, and evaluates it through
//! the command line entry point.

use holoq::cli::{self, ModelFile};
use holoq::gatelib::{EpistemicSituation, QuasiModel, TruthPerspective};
use holoq::lang::parse_sentence;
use holoq::qlin::{Ket, Qumix};

fn main() -> holoq::Result<()> {
    let p = TruthPerspective::identity();
    let mut model =
        ModelFile::new(QuasiModel::new().with_situation(EpistemicSituation::maximal("a", "t", p)));
    model.quasi_model.agents = vec!["a".into()];
    model.quasi_model.times = vec!["t".into()];
    let s = parse_sentence("K[a@t] not T(q, not q, f)")?;
    let top = Qumix::pure(&Ket::superposition(&["000", "010", "100", "110"])?);
    model.assignment.insert(&s, "I", top)?;

    let path = std::env::temp_dir().join(format!("holoq-example-{}.json", std::process::id()));
    model.save(&path)?;
    let out = cli::run([
        "holoq",
        "eval",
        "K[a@t] not T(q, not q, f)",
        "--model",
        path.to_str().unwrap(),
    ]);
    print!("{}{}", out.stdout, out.stderr);
    println!("exit code {}", out.code);
    std::fs::remove_file(&path)?;
    Ok(())
}
