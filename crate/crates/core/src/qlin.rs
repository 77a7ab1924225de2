//! Dense complex linear algebra for multi-qubit density operators.
//!
//! Qubit 0 is the leftmost tensor factor and the most significant bit of a
//! basis index: `|x_0 x_1 ... x_{n-1}>` has index `x_0 2^(n-1) + ... + x_{n-1}`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{HoloqError, Result};
use crate::gatelib::TruthPerspective;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Hard cap on qubit count for dense storage.
pub const MAX_QUBITS: usize = 12;
/// Hermiticity tolerance.
pub const TOL_HERMITIAN: f64 = 1e-9;
/// Trace tolerance (also used for ket norms).
pub const TOL_TRACE: f64 = 1e-9;
/// Eigenvalue floor for positivity.
pub const TOL_POSITIVE: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(HoloqError::TooManyQubits {
            qubits: n,
            max: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(HoloqError::InvalidQumix(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    check_qubits(n)?;
    Ok(n)
}

/// Unit vector on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    n: usize,
    amplitudes: CVector,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = qubits_for_dim(amplitudes.len())?;
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > TOL_TRACE {
            return Err(HoloqError::NotNormalized { norm });
        }
        Ok(Ket { n, amplitudes: v })
    }

    /// Normalizes the given amplitudes; fails only on the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = qubits_for_dim(amplitudes.len())?;
        let mut v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(HoloqError::NotNormalized { norm });
        }
        v /= c(norm, 0.0);
        Ok(Ket { n, amplitudes: v })
    }

    /// Computational basis state from a bit string such as `"010"`.
    pub fn basis(bits: &str) -> Result<Self> {
        let n = bits.len();
        check_qubits(n)?;
        let mut index = 0usize;
        for ch in bits.chars() {
            index = index * 2
                + match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => {
                        return Err(HoloqError::InvalidQumix(format!(
                            "bad basis label `{bits}`"
                        )))
                    }
                };
        }
        let mut v = CVector::zeros(1 << n);
        v[index] = c(1.0, 0.0);
        Ok(Ket { n, amplitudes: v })
    }

    /// Equal-weight superposition of the listed basis labels.
    pub fn superposition(labels: &[&str]) -> Result<Self> {
        let first = labels
            .first()
            .ok_or_else(|| HoloqError::InvalidQumix("empty superposition".into()))?;
        let mut v = CVector::zeros(1 << first.len());
        for l in labels {
            let k = Ket::basis(l)?;
            if k.n != first.len() {
                return Err(HoloqError::DimensionMismatch {
                    expected: first.len(),
                    found: k.n,
                });
            }
            v += k.amplitudes;
        }
        Ket::normalized(v.iter().copied().collect())
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket {
            n: self.n + other.n,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// A density operator on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Qumix {
    n: usize,
    matrix: CMatrix,
}

impl Qumix {
    /// Validated construction.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let q = Qumix::from_matrix_unchecked(matrix)?;
        let report = validate_qumix(&q);
        if report.pass() {
            Ok(q)
        } else {
            Err(HoloqError::InvalidQumix(report.to_string()))
        }
    }

    /// Checks only the shape.
    pub fn from_matrix_unchecked(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(HoloqError::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let n = qubits_for_dim(matrix.nrows())?;
        Ok(Qumix { n, matrix })
    }

    pub(crate) fn from_parts(n: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << n);
        Qumix { n, matrix }
    }

    pub fn pure(ket: &Ket) -> Self {
        pure_qumix(ket)
    }

    /// Diagonal qumix from real weights.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            weights.len(),
            weights.iter().map(|&w| c(w, 0.0)),
        ));
        Qumix::from_matrix(m)
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let d = 1 << n;
        Ok(Qumix {
            n,
            matrix: CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0),
        })
    }

    /// `|0><0|` on one qubit.
    pub fn p0() -> Self {
        Qumix::from_parts(
            1,
            CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]),
        )
    }

    /// `|1><1|` on one qubit.
    pub fn p1() -> Self {
        Qumix::from_parts(
            1,
            CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
        )
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn tensor(&self, other: &Qumix) -> Result<Qumix> {
        tensor(self, other)
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Qumix, lambda: f64) -> Result<Qumix> {
        if self.n != other.n {
            return Err(HoloqError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(Qumix {
            n: self.n,
            matrix: &self.matrix * c(lambda, 0.0) + &other.matrix * c(1.0 - lambda, 0.0),
        })
    }

    pub fn reduce(&self, keep: &[usize]) -> Result<Qumix> {
        reduce(self, keep)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn distance(&self, other: &Qumix) -> Result<f64> {
        if self.n != other.n {
            return Err(HoloqError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(max_entry_distance(&self.matrix, &other.matrix))
    }
}

pub(crate) fn max_entry_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

impl fmt::Display for Qumix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        for r in 0..d {
            let row: Vec<String> = (0..d).map(|k| fmt_c(self.matrix[(r, k)])).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn fmt_c(z: C64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{im:+.6}i")
    }
}

/// Projector `|v><v|`.
pub fn pure_qumix(v: &Ket) -> Qumix {
    let a = &v.amplitudes;
    Qumix {
        n: v.n,
        matrix: a * a.adjoint(),
    }
}

/// Kronecker product `rho (x) sigma`.
pub fn tensor(rho: &Qumix, sigma: &Qumix) -> Result<Qumix> {
    let n = rho.n + sigma.n;
    check_qubits(n)?;
    Ok(Qumix {
        n,
        matrix: rho.matrix.kronecker(&sigma.matrix),
    })
}

/// Tensor product of several qumixes, left to right.
pub fn tensor_all(parts: &[Qumix]) -> Result<Qumix> {
    let mut iter = parts.iter();
    let first = iter
        .next()
        .ok_or_else(|| HoloqError::InvalidQumix("empty tensor product".into()))?
        .clone();
    iter.try_fold(first, |acc, q| tensor(&acc, q))
}

fn check_indices(n: usize, keep: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in keep {
        if i >= n {
            return Err(HoloqError::IndexOutOfRange {
                index: i,
                qubits: n,
            });
        }
        if seen[i] {
            return Err(HoloqError::DuplicateIndex(i));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Bit offsets for every assignment of the given qubits, in the order given
/// (first listed qubit is the most significant bit of the local index).
fn local_offsets(n: usize, qubits: &[usize]) -> Vec<usize> {
    let m = qubits.len();
    (0..1usize << m)
        .map(|local| {
            qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
                let bit = (local >> (m - 1 - pos)) & 1;
                acc | (bit << (n - 1 - q))
            })
        })
        .collect()
}

/// Partial trace keeping the listed qubits (0-based), in the listed order.
pub fn reduce(rho: &Qumix, keep: &[usize]) -> Result<Qumix> {
    let n = rho.n;
    check_indices(n, keep)?;
    let rest: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let kept = local_offsets(n, keep);
    let traced = local_offsets(n, &rest);
    let d = kept.len();
    let mut out = CMatrix::zeros(d, d);
    for (a, &ka) in kept.iter().enumerate() {
        for (b, &kb) in kept.iter().enumerate() {
            let mut acc = c(0.0, 0.0);
            for &z in &traced {
                acc += rho.matrix[(ka | z, kb | z)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(Qumix {
        n: keep.len(),
        matrix: out,
    })
}

/// Index map for a qubit permutation: output qubit `i` is input qubit
/// `order[i]`.
fn permutation_map(n: usize, order: &[usize]) -> Result<Vec<usize>> {
    if order.len() != n {
        return Err(HoloqError::DimensionMismatch {
            expected: n,
            found: order.len(),
        });
    }
    check_indices(n, order)?;
    Ok((0..1usize << n)
        .map(|x| {
            (0..n).fold(0, |acc, i| {
                let bit = (x >> (n - 1 - i)) & 1;
                acc | (bit << (n - 1 - order[i]))
            })
        })
        .collect())
}

/// Reorders the qubits of `rho`: output qubit `i` is input qubit `order[i]`.
pub fn permute_qubits(rho: &Qumix, order: &[usize]) -> Result<Qumix> {
    let map = permutation_map(rho.n, order)?;
    let d = map.len();
    let matrix = CMatrix::from_fn(d, d, |r, k| rho.matrix[(map[r], map[k])]);
    Ok(Qumix { n: rho.n, matrix })
}

impl Ket {
    /// Reorders the qubits: output qubit `i` is input qubit `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Ket> {
        let map = permutation_map(self.n, order)?;
        let amplitudes = CVector::from_fn(map.len(), |r, _| self.amplitudes[map[r]]);
        Ok(Ket {
            n: self.n,
            amplitudes,
        })
    }
}

/// Computes `(A on qubits) rho (B on qubits)^dagger`, identity elsewhere.
pub(crate) fn sandwich_on(
    rho: &CMatrix,
    n: usize,
    qubits: &[usize],
    a: &CMatrix,
    b: &CMatrix,
) -> CMatrix {
    let dim = 1usize << n;
    let offs = local_offsets(n, qubits);
    let mask = offs.iter().fold(0, |acc, &o| acc | o);
    let local_of = |i: usize| -> usize {
        qubits
            .iter()
            .fold(0, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1))
    };
    let d = offs.len();
    // left: tmp = A_full * rho
    let mut tmp = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let base = i & !mask;
        let li = local_of(i);
        for k in 0..d {
            let coeff = a[(li, k)];
            if coeff == c(0.0, 0.0) {
                continue;
            }
            let src = base | offs[k];
            for col in 0..dim {
                tmp[(i, col)] += coeff * rho[(src, col)];
            }
        }
    }
    // right: out = tmp * B_full^dagger, out[r, j] = sum_k tmp[r, base_j|k] conj(B[lj, k])
    let mut out = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let base = j & !mask;
        let lj = local_of(j);
        for k in 0..d {
            let coeff = b[(lj, k)].conj();
            if coeff == c(0.0, 0.0) {
                continue;
            }
            let src = base | offs[k];
            for r in 0..dim {
                out[(r, j)] += tmp[(r, src)] * coeff;
            }
        }
    }
    out
}

/// Applies the channel with the given Kraus operators to the listed qubits.
pub(crate) fn apply_kraus_on(rho: &Qumix, qubits: &[usize], kraus: &[CMatrix]) -> Qumix {
    let mut acc = CMatrix::zeros(rho.dim(), rho.dim());
    for k in kraus {
        acc += sandwich_on(&rho.matrix, rho.n, qubits, k, k);
    }
    Qumix {
        n: rho.n,
        matrix: acc,
    }
}

/// Embeds an operator on the listed qubits into the full `2^n` space.
pub(crate) fn embed(n: usize, qubits: &[usize], op: &CMatrix) -> CMatrix {
    let dim = 1usize << n;
    let id = CMatrix::identity(dim, dim);
    let eye = CMatrix::identity(op.nrows(), op.ncols());
    sandwich_on(&id, n, qubits, op, &eye)
}

/// Diagnostics for a candidate density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct QumixReport {
    pub qubits: usize,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace_defect: f64,
}

impl QumixReport {
    pub fn pass(&self) -> bool {
        self.hermiticity_defect <= TOL_HERMITIAN
            && self.min_eigenvalue >= -TOL_POSITIVE
            && self.trace_defect <= TOL_TRACE
    }
}

impl fmt::Display for QumixReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} qubits): hermiticity defect {:.3e}, min eigenvalue {:.3e}, trace defect {:.3e}",
            if self.pass() { "pass" } else { "fail" },
            self.qubits,
            self.hermiticity_defect,
            self.min_eigenvalue,
            self.trace_defect
        )
    }
}

pub fn validate_qumix(rho: &Qumix) -> QumixReport {
    let m = &rho.matrix;
    let adj = m.adjoint();
    let hermiticity_defect = max_entry_distance(m, &adj);
    let herm = (m + &adj) * c(0.5, 0.0);
    let min_eigenvalue = herm
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let trace_defect = (m.trace() - c(1.0, 0.0)).norm();
    QumixReport {
        qubits: rho.n,
        hermiticity_defect,
        min_eigenvalue,
        trace_defect,
    }
}

/// True iff every entry of `rho - sigma` has modulus at most `tol`.
pub fn qumix_close(rho: &Qumix, sigma: &Qumix, tol: f64) -> Result<bool> {
    Ok(rho.distance(sigma)? <= tol)
}

/// Largest entrywise defect of `u^dagger u` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let id = CMatrix::identity(u.ncols(), u.ncols());
    max_entry_distance(&(u.adjoint() * u), &id)
}

/// `n`-fold Kronecker power.
pub fn kron_power(m: &CMatrix, n: usize) -> CMatrix {
    let mut acc = CMatrix::identity(1, 1);
    for _ in 0..n {
        acc = acc.kronecker(m);
    }
    acc
}

/// Probability that `rho` is true under the perspective: the weight of the
/// perspective's truth ket on the last qubit.
pub fn probability(perspective: &TruthPerspective, rho: &Qumix) -> f64 {
    let last = reduce(rho, &[rho.n - 1]).expect("last qubit is in range");
    let t = perspective.truth_ket();
    let p = (t.adjoint() * last.matrix() * &t)[(0, 0)].re;
    p.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> C64 {
        c(0.5, 0.0)
    }

    #[test]
    fn permutation_moves_qubits() {
        let k = Ket::basis("110").unwrap();
        assert_eq!(k.permute(&[2, 0, 1]).unwrap(), Ket::basis("011").unwrap());
        let rho = pure_qumix(&k);
        let out = permute_qubits(&rho, &[2, 0, 1]).unwrap();
        assert_eq!(out, pure_qumix(&Ket::basis("011").unwrap()));
        assert!(permute_qubits(&rho, &[0, 0, 1]).is_err());
    }

    #[test]
    fn pure_basis_projector() {
        let p = pure_qumix(&Ket::basis("0").unwrap());
        assert_eq!(p, Qumix::p0());
    }

    #[test]
    fn pure_plus_state_has_half_entries() {
        let plus = Ket::superposition(&["0", "1"]).unwrap();
        let p = pure_qumix(&plus);
        for z in p.matrix().iter() {
            assert!((z - half()).norm() < 1e-15);
        }
    }

    #[test]
    fn pure_ghz_corners() {
        let ghz = Ket::superposition(&["000", "111"]).unwrap();
        let p = pure_qumix(&ghz);
        for r in 0..8 {
            for k in 0..8 {
                let expected = if [0, 7].contains(&r) && [0, 7].contains(&k) {
                    0.5
                } else {
                    0.0
                };
                assert!((p.matrix()[(r, k)] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn ket_rejects_unnormalized() {
        assert!(matches!(
            Ket::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(HoloqError::NotNormalized { .. })
        ));
    }

    #[test]
    fn tensor_basis_case() {
        let t = tensor(&Qumix::p0(), &Qumix::p1()).unwrap();
        assert_eq!(t, Qumix::diagonal(&[0.0, 1.0, 0.0, 0.0]).unwrap());
        let mixed = Qumix::maximally_mixed(1).unwrap();
        let t = tensor(&Qumix::p1(), &mixed).unwrap();
        assert!((t.trace() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tensor_product_comparison_state() {
        let mixed = Qumix::maximally_mixed(1).unwrap();
        let t = tensor_all(&[mixed.clone(), mixed, Qumix::p0()]).unwrap();
        let expected = Qumix::diagonal(&[0.25, 0.0, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0]).unwrap();
        assert!(qumix_close(&t, &expected, 1e-15).unwrap());
    }

    #[test]
    fn reduce_entangled_pair_gives_proper_mixture() {
        let rho = pure_qumix(&Ket::superposition(&["010", "100"]).unwrap());
        let red = reduce(&rho, &[0]).unwrap();
        assert!(qumix_close(&red, &Qumix::maximally_mixed(1).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn reduce_identity_and_factor() {
        let rho = pure_qumix(&Ket::superposition(&["000", "010", "100", "110"]).unwrap());
        assert_eq!(reduce(&rho, &[0, 1, 2]).unwrap(), rho);
        let last = reduce(&rho, &[2]).unwrap();
        assert!(qumix_close(&last, &Qumix::p0(), 1e-12).unwrap());
    }

    #[test]
    fn reduce_respects_requested_order() {
        let rho = tensor(&Qumix::p0(), &Qumix::p1()).unwrap();
        let swapped = reduce(&rho, &[1, 0]).unwrap();
        assert_eq!(swapped, tensor(&Qumix::p1(), &Qumix::p0()).unwrap());
    }

    #[test]
    fn reduce_index_errors() {
        let rho = Qumix::maximally_mixed(2).unwrap();
        assert!(matches!(
            reduce(&rho, &[2]),
            Err(HoloqError::IndexOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            reduce(&rho, &[1, 1]),
            Err(HoloqError::DuplicateIndex(1))
        ));
    }

    #[test]
    fn validation_reports() {
        assert!(validate_qumix(&Qumix::p0()).pass());
        let bad_trace =
            Qumix::from_matrix_unchecked(CMatrix::from_diagonal(&CVector::from_vec(vec![
                c(0.5, 0.0),
                c(0.6, 0.0),
            ])))
            .unwrap();
        let r = validate_qumix(&bad_trace);
        assert!(!r.pass());
        assert!((r.trace_defect - 0.1).abs() < 1e-12);
        let non_herm = Qumix::from_matrix_unchecked(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)],
        ))
        .unwrap();
        assert!(!validate_qumix(&non_herm).pass());
        let negative =
            Qumix::from_matrix_unchecked(CMatrix::from_diagonal(&CVector::from_vec(vec![
                c(1.5, 0.0),
                c(-0.5, 0.0),
            ])))
            .unwrap();
        assert!(validate_qumix(&negative).min_eigenvalue < -0.4);
    }

    #[test]
    fn closeness() {
        assert!(qumix_close(&Qumix::p0(), &Qumix::p0(), 1e-9).unwrap());
        assert!(!qumix_close(&Qumix::p0(), &Qumix::p1(), 1e-9).unwrap());
        assert!(qumix_close(&Qumix::p0(), &Qumix::maximally_mixed(2).unwrap(), 1.0).is_err());
    }

    #[test]
    fn qubit_cap() {
        assert!(matches!(
            Qumix::maximally_mixed(13),
            Err(HoloqError::TooManyQubits { qubits: 13, .. })
        ));
    }

    #[test]
    fn sandwich_matches_embedded_product() {
        // X on qubit 1 of three qubits, applied to |010>
        let x = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let rho = pure_qumix(&Ket::basis("010").unwrap());
        let out = apply_kraus_on(&rho, &[1], std::slice::from_ref(&x));
        assert_eq!(out, pure_qumix(&Ket::basis("000").unwrap()));
        let full = embed(3, &[1], &x);
        let direct = &full * rho.matrix() * full.adjoint();
        assert!(max_entry_distance(&direct, out.matrix()) < 1e-15);
    }
}
