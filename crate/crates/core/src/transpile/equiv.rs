use rand::Rng;

use crate::circuit::{Circuit, ClbitId};
use crate::error::{Error, Result};
use crate::sim::{exact_distribution, rng};

/// Outcome of an equivalence check.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceVerdict {
    pub passed: bool,
    pub max_deviation: f64,
    pub settings_checked: usize,
    /// Angle at which the largest deviation occurred.
    pub worst_theta: f64,
    pub tolerance: f64,
}

fn base_theta(c: &Circuit) -> Option<f64> {
    c.meta("theta")
        .and_then(|t| t.parse::<f64>().ok())
        .filter(|t| *t != 0.0 && t.is_finite())
}

fn at_theta(c: &Circuit, theta: f64) -> Circuit {
    match base_theta(c) {
        Some(t0) => c.scale_angles(theta / t0),
        None => c.clone(),
    }
}

/// Compares exact outcome distributions on every classical bit that no
/// instruction uses as a condition.
pub fn check_equivalence(
    a: &Circuit,
    b: &Circuit,
    n_random_settings: usize,
    tol: f64,
) -> Result<EquivalenceVerdict> {
    let mut controls = a.control_bits();
    controls.extend(b.control_bits());
    let bits: Vec<ClbitId> = (0..a.n_clbits.min(b.n_clbits))
        .filter(|c| !controls.contains(c))
        .collect();
    check_equivalence_on(a, b, &bits, &bits, n_random_settings, tol)
}

/// Compares `a` projected onto `bits_a` with `b` projected onto `bits_b`.
///
/// Both circuits are re-evaluated at `n_random_settings` random angles
/// (every rotation is rescaled by the ratio to the `theta` metadata) and
/// under every assignment of their condition bits.
pub fn check_equivalence_on(
    a: &Circuit,
    b: &Circuit,
    bits_a: &[ClbitId],
    bits_b: &[ClbitId],
    n_random_settings: usize,
    tol: f64,
) -> Result<EquivalenceVerdict> {
    if bits_a.len() != bits_b.len() {
        return Err(Error::Invalid("bit maps have different lengths".into()));
    }
    let mut controls = a.control_bits();
    controls.extend(b.control_bits());
    controls.sort_unstable();
    controls.dedup();
    if controls.len() > 8 {
        return Err(Error::Resource("too many condition bits to enumerate".into()));
    }
    let mut r = rng::stream(0x5eed, &[n_random_settings as u64]);
    let thetas: Vec<Option<f64>> = if base_theta(a).is_some() || base_theta(b).is_some() {
        (0..n_random_settings.max(1))
            .map(|_| Some(r.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
            .collect()
    } else {
        vec![None]
    };
    let mut verdict = EquivalenceVerdict {
        passed: true,
        max_deviation: 0.0,
        settings_checked: 0,
        worst_theta: f64::NAN,
        tolerance: tol,
    };
    for theta in thetas {
        let (ca, cb) = match theta {
            Some(t) => (at_theta(a, t), at_theta(b, t)),
            None => (a.clone(), b.clone()),
        };
        for assignment in 0..1u32 << controls.len() {
            let (mut ra, mut rb) = (ca.clone(), cb.clone());
            for (k, &bit) in controls.iter().enumerate() {
                let value = assignment >> k & 1 == 1;
                ra = ra.resolve_classical_control(bit, value);
                rb = rb.resolve_classical_control(bit, value);
            }
            let da = exact_distribution(&ra)?.project(bits_a);
            let db = exact_distribution(&rb)?.project(bits_b);
            let dev = da.max_deviation(&db);
            verdict.settings_checked += 1;
            if dev > verdict.max_deviation || verdict.worst_theta.is_nan() {
                verdict.max_deviation = verdict.max_deviation.max(dev);
                verdict.worst_theta = theta.unwrap_or(f64::NAN);
            }
        }
    }
    verdict.passed = verdict.max_deviation <= tol;
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction;

    #[test]
    fn circuit_matches_itself() {
        let mut c = Circuit::new(2, 1);
        c.set_meta("theta", 0.4);
        c.push(Instruction::ry(0, 0.4));
        c.push(Instruction::cx(0, 1));
        c.push(Instruction::measure(1, 0));
        let v = check_equivalence(&c, &c, 5, 1e-12).unwrap();
        assert!(v.passed);
        assert_eq!(v.max_deviation, 0.0);
        assert_eq!(v.settings_checked, 5);
    }

    #[test]
    fn different_angles_are_caught() {
        let mut a = Circuit::new(1, 1);
        a.push(Instruction::ry(0, 0.4));
        a.push(Instruction::measure(0, 0));
        let b = a.scale_angles(2.0);
        let v = check_equivalence(&a, &b, 3, 1e-10).unwrap();
        assert!(!v.passed);
    }
}
