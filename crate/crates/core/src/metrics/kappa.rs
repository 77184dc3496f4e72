use super::{check_same_len, MetricError};
use serde::{Deserialize, Serialize};

/// Cohen's kappa between two binary raters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub kappa: f64,
    /// Observed agreement: fraction of equal decisions.
    pub p_o: f64,
    /// Chance agreement from the raters' marginals.
    pub p_e: f64,
    /// True when both raters are the same constant, where chance agreement
    /// is 1 and the ratio is formally undefined; kappa is reported as 1.
    pub degenerate: bool,
}

/// Chance-corrected agreement kappa = (p_o - p_e) / (1 - p_e), with
/// p_e = P(a=1)P(b=1) + P(a=0)P(b=0).
pub fn cohen_kappa(a: &[bool], b: &[bool]) -> Result<KappaResult, MetricError> {
    check_same_len(a.len(), b.len())?;
    if a.is_empty() {
        return Err(MetricError::InsufficientSamples {
            required: 1,
            got: 0,
        });
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let pa1 = a.iter().filter(|&&x| x).count() as f64 / n;
    let pb1 = b.iter().filter(|&&x| x).count() as f64 / n;
    let p_o = agree / n;
    let p_e = pa1 * pb1 + (1.0 - pa1) * (1.0 - pb1);
    if p_e == 1.0 {
        // Both raters constant and equal: total, but vacuous, agreement.
        return Ok(KappaResult {
            kappa: 1.0,
            p_o,
            p_e,
            degenerate: true,
        });
    }
    Ok(KappaResult {
        kappa: (p_o - p_e) / (1.0 - p_e),
        p_o,
        p_e,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sequences_give_one() {
        let a = [true, false, true, true, false];
        let r = cohen_kappa(&a, &a).unwrap();
        assert_eq!(r.kappa, 1.0);
        assert!(!r.degenerate);
    }

    #[test]
    fn hand_evaluated_contingency() {
        // tp=40, tn=40, fp=10, fn=10 -> p_o=0.8, p_e=0.5, kappa=0.6.
        let mut a = Vec::new();
        let mut b = Vec::new();
        for _ in 0..40 {
            a.push(true);
            b.push(true);
        }
        for _ in 0..10 {
            a.push(false);
            b.push(true);
        }
        for _ in 0..10 {
            a.push(true);
            b.push(false);
        }
        for _ in 0..40 {
            a.push(false);
            b.push(false);
        }
        let r = cohen_kappa(&a, &b).unwrap();
        assert!((r.p_o - 0.8).abs() < 1e-12);
        assert!((r.p_e - 0.5).abs() < 1e-12);
        assert!((r.kappa - 0.6).abs() < 1e-12);
    }

    #[test]
    fn all_positive_vs_half_positive_is_zero() {
        let a = [true, true, true, true];
        let b = [true, true, false, false];
        let r = cohen_kappa(&a, &b).unwrap();
        assert!((r.p_o - 0.5).abs() < 1e-12);
        assert!((r.p_e - 0.5).abs() < 1e-12);
        assert_eq!(r.kappa, 0.0);
    }

    #[test]
    fn equal_constants_degenerate() {
        let a = [true, true, true];
        let r = cohen_kappa(&a, &a).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.kappa, 1.0);
        assert_eq!(r.p_e, 1.0);
    }

    #[test]
    fn opposite_constants_not_degenerate() {
        let a = [true, true];
        let b = [false, false];
        let r = cohen_kappa(&a, &b).unwrap();
        assert!(!r.degenerate);
        assert_eq!(r.kappa, 0.0);
        assert_eq!(r.p_o, 0.0);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            cohen_kappa(&[true], &[true, false]),
            Err(MetricError::ShapeError { .. })
        ));
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(
            cohen_kappa(&[], &[]),
            Err(MetricError::InsufficientSamples { .. })
        ));
    }
}
