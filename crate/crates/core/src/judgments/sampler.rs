use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{HoloqError, Result};
use crate::gatelib::TruthPerspective;
use crate::lang::{Sentence, SyntacticalTree};
use crate::qlin::{c, permute_qubits, pure_qumix, tensor_all, CVector, Ket, Qumix};
use crate::random;

/// Families of top-level states drawn by the sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Each atom name gets one perspective basis state, shared by all its occurrences.
    BasisProducts,
    /// Each atom name gets one random pure qubit state.
    RandomPure,
    /// Each atom name gets one random mixed qubit state.
    RandomMixed,
    /// A random pure state on all atom positions, symmetrized over
    /// permutations of same-name occurrences.
    Symmetrized,
    /// Dicke states (in the perspective basis) across the occurrences of each name.
    MaxEntangled,
    /// Random product states conditioned on the premises being true by
    /// back-solving through unitary levels.
    BackSolved,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::BasisProducts,
        Generator::RandomPure,
        Generator::RandomMixed,
        Generator::Symmetrized,
        Generator::MaxEntangled,
        Generator::BackSolved,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::BasisProducts => "basis",
            Generator::RandomPure => "pure",
            Generator::RandomMixed => "mixed",
            Generator::Symmetrized => "symmetrized",
            Generator::MaxEntangled => "entangled",
            Generator::BackSolved => "back-solved",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }
}

/// Seed, sample count and generator mix of a sampling run.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: usize,
    pub generators: Vec<Generator>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            samples: 200,
            generators: Generator::ALL.to_vec(),
        }
    }
}

impl SamplerConfig {
    pub fn new(seed: u64, samples: usize) -> Self {
        SamplerConfig {
            seed,
            samples,
            ..Self::default()
        }
    }

    pub fn with_generators(mut self, generators: &[Generator]) -> Self {
        self.generators = generators.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.generators.is_empty() {
            return Err(HoloqError::SamplerExhausted { samples: 0 });
        }
        Ok(())
    }

    /// Independent stream for sample `index`, so any sample can be
    /// regenerated on its own.
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    pub fn generator(&self, index: usize) -> Generator {
        self.generators[index % self.generators.len()]
    }
}

/// Which top-level positions carry which atom name or constant.
#[derive(Clone, Debug, PartialEq)]
pub struct TopLayout {
    pub width: usize,
    /// Atom names in order of first occurrence, with their positions.
    pub names: Vec<(String, Vec<usize>)>,
    /// `(position, is_true)` for each `t` / `f`.
    pub constants: Vec<(usize, bool)>,
}

impl TopLayout {
    pub fn of(tree: &SyntacticalTree) -> Self {
        let top = tree.level(tree.height()).expect("top level");
        let mut names: Vec<(String, Vec<usize>)> = Vec::new();
        let mut constants = Vec::new();
        for occ in top {
            let pos = occ.span.start;
            match &occ.sentence {
                Sentence::Atom(a) => match names.iter_mut().find(|(n, _)| n == a) {
                    Some((_, v)) => v.push(pos),
                    None => names.push((a.clone(), vec![pos])),
                },
                Sentence::True => constants.push((pos, true)),
                Sentence::False => constants.push((pos, false)),
                _ => unreachable!("top level is atomic"),
            }
        }
        TopLayout {
            width: tree.width(),
            names,
            constants,
        }
    }

    fn atom_count(&self) -> usize {
        self.names.iter().map(|(_, v)| v.len()).sum()
    }

    /// Position order used while building: atoms grouped by name, then constants.
    fn build_order(&self) -> Vec<usize> {
        self.names
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .chain(self.constants.iter().map(|&(p, _)| p))
            .collect()
    }

    /// Places a state built in `build_order` onto the real positions.
    fn place(&self, built: &Qumix) -> Result<Qumix> {
        let order = self.build_order();
        let mut inv = vec![0; order.len()];
        for (idx, &pos) in order.iter().enumerate() {
            inv[pos] = idx;
        }
        permute_qubits(built, &inv)
    }

    fn constants_state(&self, p: &TruthPerspective) -> Vec<Qumix> {
        self.constants
            .iter()
            .map(|&(_, t)| if t { p.truth() } else { p.falsity() })
            .collect()
    }
}

fn basis_ket(p: &TruthPerspective, bit: bool) -> CVector {
    p.matrix().column(bit as usize).into_owned()
}

fn kron_kets(parts: &[CVector]) -> CVector {
    parts
        .iter()
        .fold(CVector::from_element(1, c(1.0, 0.0)), |acc, v| {
            acc.kronecker(v)
        })
}

fn ket_of(v: CVector) -> Ket {
    Ket::normalized(v.iter().copied().collect()).expect("nonzero")
}

/// All permutations of `0..k`.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for slot in 0..k {
            let mut q = p.clone();
            q.insert(slot, k - 1);
            out.push(q);
        }
    }
    out
}

const MAX_GROUP: usize = 720;

/// Qubit orders of the group permuting occurrences within each segment.
fn segment_group(segments: &[usize]) -> Option<Vec<Vec<usize>>> {
    let size: usize = segments
        .iter()
        .map(|&k| (1..=k).product::<usize>())
        .product();
    if size > MAX_GROUP {
        return None;
    }
    let mut group = vec![Vec::new()];
    let mut offset = 0;
    for &k in segments {
        let perms = permutations(k);
        let mut next = Vec::with_capacity(group.len() * perms.len());
        for g in &group {
            for p in &perms {
                let mut h: Vec<usize> = g.clone();
                h.extend(p.iter().map(|x| x + offset));
                next.push(h);
            }
        }
        group = next;
        offset += k;
    }
    Some(group)
}

fn symmetrize(ket: &Ket, group: &[Vec<usize>]) -> Option<Ket> {
    let mut acc = CVector::zeros(ket.amplitudes().len());
    for g in group {
        acc += ket.permute(g).expect("group element").amplitudes();
    }
    if acc.norm() < 1e-6 {
        return None;
    }
    Some(ket_of(acc))
}

fn dicke(k: usize, weight: usize) -> CVector {
    let d = 1usize << k;
    let v = CVector::from_fn(d, |x, _| {
        if (x as u32).count_ones() as usize == weight {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// Draws one top-level state: t/f positions are exact perspective
/// projectors, and every state is invariant under swapping same-name
/// occurrences, so the resulting holistic model is normal.
pub fn sample_top<R: Rng + ?Sized>(
    layout: &TopLayout,
    p: &TruthPerspective,
    generator: Generator,
    rng: &mut R,
) -> Result<Qumix> {
    let segments: Vec<usize> = layout.names.iter().map(|(_, v)| v.len()).collect();
    let atoms: Option<Qumix> = if layout.atom_count() == 0 {
        None
    } else {
        Some(match generator {
            Generator::BasisProducts => {
                let parts: Vec<CVector> = segments
                    .iter()
                    .flat_map(|&k| {
                        let v = basis_ket(p, rng.gen_bool(0.5));
                        std::iter::repeat_n(v, k)
                    })
                    .collect();
                pure_qumix(&ket_of(kron_kets(&parts)))
            }
            Generator::RandomPure | Generator::BackSolved => product_pure(&segments, rng),
            Generator::RandomMixed => {
                let parts: Vec<Qumix> = segments
                    .iter()
                    .flat_map(|&k| {
                        let rho = random::random_mixed(1, 2, rng);
                        std::iter::repeat_n(rho, k)
                    })
                    .collect();
                tensor_all(&parts)?
            }
            Generator::Symmetrized => {
                let m = layout.atom_count();
                match segment_group(&segments) {
                    None => product_pure(&segments, rng),
                    Some(group) => {
                        let first = random::random_ket(m, rng);
                        match symmetrize(&first, &group) {
                            None => product_pure(&segments, rng),
                            Some(a) => {
                                let rho = pure_qumix(&a);
                                let second = symmetrize(&random::random_ket(m, rng), &group);
                                match second {
                                    Some(b) if rng.gen_bool(0.5) => {
                                        rho.mix(&pure_qumix(&b), rng.gen_range(0.0..1.0))?
                                    }
                                    _ => rho,
                                }
                            }
                        }
                    }
                }
            }
            Generator::MaxEntangled => {
                let parts: Vec<CVector> = segments
                    .iter()
                    .map(|&k| {
                        let w = rng.gen_range(0..=k);
                        let local = dicke(k, w);
                        let u = p.power(k);
                        &u * local
                    })
                    .collect();
                pure_qumix(&ket_of(kron_kets(&parts)))
            }
        })
    };
    let mut parts: Vec<Qumix> = atoms.into_iter().collect();
    parts.extend(layout.constants_state(p));
    let built = tensor_all(&parts)?;
    layout.place(&built)
}

fn product_pure<R: Rng + ?Sized>(segments: &[usize], rng: &mut R) -> Qumix {
    let parts: Vec<CVector> = segments
        .iter()
        .flat_map(|&k| {
            let v = random::random_qubit_ket(rng);
            std::iter::repeat_n(v, k)
        })
        .collect();
    pure_qumix(&ket_of(kron_kets(&parts)))
}
