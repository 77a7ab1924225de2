//! Independent oracles and generators shared by the integration tests.
//!
//! The gate and partial-trace oracles work on basis indices directly and do
//! not call into the library's linear algebra.

#![allow(dead_code)]

use holoq::gatelib::{EpistemicSituation, Preset, PresetKind, QuasiModel, TruthPerspective};
use holoq::lang::Sentence;
use holoq::qlin::{CMatrix, Qumix};
use num_complex::Complex64;
use rand::Rng;

pub const ATOMS: [&str; 3] = ["q", "r", "s"];
pub const AGENTS: [&str; 2] = ["a", "b"];

fn z(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Bit of qubit `i` (qubit 0 is the most significant) in basis index `k`.
pub fn bit(k: usize, i: usize, n: usize) -> usize {
    (k >> (n - 1 - i)) & 1
}

/// Random sentence of depth at most `depth`.
pub fn random_sentence<R: Rng>(rng: &mut R, depth: usize) -> Sentence {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..8) {
            0 => Sentence::True,
            1 => Sentence::False,
            k => Sentence::atom(ATOMS[k % ATOMS.len()]),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Sentence::not(random_sentence(rng, d)),
        1 => Sentence::sqrt_id(random_sentence(rng, d)),
        2 => Sentence::toffoli(
            random_sentence(rng, d),
            random_sentence(rng, d),
            random_sentence(rng, d),
        ),
        3 => Sentence::xor(random_sentence(rng, d), random_sentence(rng, d)),
        k => {
            let agent = AGENTS[rng.gen_range(0..AGENTS.len())];
            let inner = random_sentence(rng, d);
            if k == 4 {
                Sentence::understands(agent, "t", inner)
            } else {
                Sentence::knows(agent, "t", inner)
            }
        }
    }
}

/// Random sentence with depth at most `depth` and at most `max_atoms` leaves.
pub fn bounded_sentence<R: Rng>(rng: &mut R, depth: usize, max_atoms: usize) -> Sentence {
    loop {
        let s = random_sentence(rng, depth);
        if s.atomic_complexity() <= max_atoms {
            return s;
        }
    }
}

/// `T^{⊗n}`, built by repeated Kronecker products.
pub fn perspective_power(p: &TruthPerspective, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for _ in 0..n {
        out = out.kronecker(p.matrix());
    }
    out
}

/// Canonical permutation flipping `target` when every `controls` bit is 1.
fn controlled_flip(n: usize, controls: &[usize], target: usize) -> CMatrix {
    let dim = 1 << n;
    let mut m = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let fire = controls.iter().all(|&c| bit(k, c, n) == 1);
        let image = if fire { k ^ (1 << (n - 1 - target)) } else { k };
        m[(image, k)] = z(1.0);
    }
    m
}

/// Connective gate for a compound occurrence whose children occupy
/// `blocks` qubits, conjugated by the perspective.
pub fn oracle_gate(s: &Sentence, blocks: &[usize], p: &TruthPerspective) -> Option<CMatrix> {
    let n: usize = blocks.iter().sum();
    let lasts: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, &b| {
            *acc += b;
            Some(*acc - 1)
        })
        .collect();
    let canon = match s {
        Sentence::Not(_) => controlled_flip(n, &[], n - 1),
        Sentence::SqrtId(_) => {
            let h = 1.0 / 2f64.sqrt();
            let had = CMatrix::from_row_slice(2, 2, &[z(h), z(h), z(h), z(-h)]);
            CMatrix::identity(1 << (n - 1), 1 << (n - 1)).kronecker(&had)
        }
        Sentence::Toffoli(..) => controlled_flip(n, &lasts[..2], lasts[2]),
        Sentence::Xor(..) => controlled_flip(n, &lasts[..1], lasts[1]),
        _ => return None,
    };
    let t = perspective_power(p, n);
    Some(&t * canon * t.adjoint())
}

/// Partial trace keeping `keep` (ascending), by explicit index sums.
pub fn oracle_reduce(rho: &CMatrix, n: usize, keep: &[usize]) -> CMatrix {
    let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let m = keep.len();
    let compose = |a: usize, e: usize| {
        let mut k = 0;
        for (j, &q) in keep.iter().enumerate() {
            k |= bit(a, j, m) << (n - 1 - q);
        }
        for (j, &q) in traced.iter().enumerate() {
            k |= bit(e, j, traced.len()) << (n - 1 - q);
        }
        k
    };
    let mut out = CMatrix::zeros(1 << m, 1 << m);
    for a in 0..1 << m {
        for b in 0..1 << m {
            for e in 0..1 << traced.len() {
                out[(a, b)] += rho[(compose(a, e), compose(b, e))];
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Agents `a` and `b` at time `t` with channels drawn from the non-table presets.
pub fn random_quasi_model<R: Rng>(rng: &mut R) -> QuasiModel {
    let mut qm = QuasiModel::new();
    for agent in AGENTS {
        let p = match rng.gen_range(0..3) {
            0 => TruthPerspective::identity(),
            1 => TruthPerspective::hadamard(),
            _ => holoq::random::random_perspective(rng),
        };
        let basis = if rng.gen_bool(0.5) {
            p.clone()
        } else {
            holoq::random::random_perspective(rng)
        };
        let preset = match rng.gen_range(0..5) {
            0 => Preset::new(PresetKind::Identity, basis),
            1 => Preset::new(PresetKind::FlipInBasis, basis),
            2 => Preset::new(PresetKind::DephaseInBasis, basis),
            3 => Preset::new(PresetKind::PhaseInBasis, basis),
            _ => Preset::depolarize(rng.gen_range(0.0..1.0)),
        };
        qm.insert(EpistemicSituation::with_preset(agent, "t", p, preset));
    }
    qm
}

pub fn qumix_matrix(rho: &Qumix) -> CMatrix {
    rho.matrix().clone()
}
