//! Random states, unitaries and perspectives for sampling.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::gatelib::TruthPerspective;
use crate::qlin::{c, CMatrix, CVector, Ket, Qumix, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase correction).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

pub fn random_ket<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Ket {
    let v: Vec<C64> = (0..1usize << n).map(|_| gaussian(rng)).collect();
    Ket::normalized(v).expect("a Gaussian vector is nonzero")
}

pub fn random_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Qumix {
    Qumix::pure(&random_ket(n, rng))
}

/// Random mixed state of the given rank (Ginibre `G G^dagger / tr`).
pub fn random_mixed<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Qumix {
    let g = ginibre(1 << n, rank.max(1), rng);
    let mut m = &g * g.adjoint();
    let tr = m.trace();
    m /= tr;
    let h = (&m + m.adjoint()) * c(0.5, 0.0);
    Qumix::from_parts(n, h)
}

pub fn random_perspective<R: Rng + ?Sized>(rng: &mut R) -> TruthPerspective {
    TruthPerspective::from_matrix(random_unitary(2, rng)).expect("QR factor is unitary")
}

/// A random state on `n` qubits whose last qubit is exactly the truth of
/// the perspective (probability 1).
pub fn random_true_state<R: Rng + ?Sized>(
    n: usize,
    perspective: &TruthPerspective,
    rng: &mut R,
) -> Qumix {
    let truth = perspective.truth();
    if n == 1 {
        return truth;
    }
    let rank = rng.gen_range(1..=2usize);
    let rest = random_mixed(n - 1, rank, rng);
    rest.tensor(&truth).expect("within qubit cap")
}

/// Amplitude vector of a random normalized 1-qubit ket, as a column.
pub fn random_qubit_ket<R: Rng + ?Sized>(rng: &mut R) -> CVector {
    random_ket(1, rng).amplitudes().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::{probability, unitarity_defect, validate_qumix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4 {
            assert!(unitarity_defect(&random_unitary(1 << n, &mut rng)) < 1e-12);
            assert!(validate_qumix(&random_pure(n, &mut rng)).pass());
            assert!(validate_qumix(&random_mixed(n, 3, &mut rng)).pass());
            let p = random_perspective(&mut rng);
            let t = random_true_state(n, &p, &mut rng);
            assert!(validate_qumix(&t).pass());
            assert!((probability(&p, &t) - 1.0).abs() < 1e-12);
        }
    }
}
