//! Short human descriptions of qumixes.

use crate::qlin::{c, CMatrix, Qumix};

const TOL: f64 = 1e-9;

fn bits(k: usize, n: usize) -> String {
    (0..n)
        .map(|i| if k >> (n - 1 - i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn fmt_amplitude(re: f64, im: f64) -> String {
    let p = crate::fmt_probability;
    if im.abs() < TOL {
        p(re)
    } else if re.abs() < TOL {
        format!("{}i", p(im))
    } else {
        format!(
            "({}{}{}i)",
            p(re),
            if im < 0.0 { "-" } else { "+" },
            p(im.abs())
        )
    }
}

pub fn purity(rho: &Qumix) -> f64 {
    let m = rho.matrix();
    (m * m).trace().re
}

/// Amplitudes of a pure state, fixed up to a global phase so that the
/// largest one is real and positive.
pub fn pure_amplitudes(rho: &Qumix) -> Option<Vec<(f64, f64)>> {
    if (purity(rho) - 1.0).abs() > TOL {
        return None;
    }
    let m = rho.matrix();
    let k = (0..m.nrows()).max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))?;
    let norm = m[(k, k)].re.sqrt();
    Some(
        (0..m.nrows())
            .map(|j| {
                let z = m[(j, k)] / c(norm, 0.0);
                (z.re, z.im)
            })
            .collect(),
    )
}

pub fn is_maximally_mixed(rho: &Qumix) -> bool {
    let m = rho.matrix();
    let d = m.nrows();
    let target = CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0);
    (m - target).iter().all(|z| z.norm() < TOL)
}

/// `maximally mixed`, a ket such as `0.5|001> + 0.5|011>`, or a purity digest.
pub fn describe(rho: &Qumix) -> String {
    let n = rho.qubits();
    if is_maximally_mixed(rho) {
        return "maximally mixed".into();
    }
    if let Some(amps) = pure_amplitudes(rho) {
        let terms: Vec<String> = amps
            .iter()
            .enumerate()
            .filter(|(_, (re, im))| re.hypot(*im) > TOL)
            .map(|(k, &(re, im))| format!("{}|{}>", fmt_amplitude(re, im), bits(k, n)))
            .collect();
        return format!("pure {}", terms.join(" + "));
    }
    format!("mixed, purity {}", crate::fmt_probability(purity(rho)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::Ket;

    #[test]
    fn descriptions() {
        assert_eq!(
            describe(&Qumix::maximally_mixed(2).unwrap()),
            "maximally mixed"
        );
        let k = Ket::basis("01").unwrap();
        assert_eq!(describe(&Qumix::pure(&k)), "pure 1|01>");
        let half = Qumix::p0().mix(&Qumix::p1(), 0.25).unwrap();
        assert!(describe(&half).starts_with("mixed"));
    }
}
