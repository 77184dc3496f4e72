use super::{check_same_len, MetricError, OperatingPoint};

/// Piecewise-linear calibration mapping the operating point to 0.5.
///
/// Below the operating point the score is scaled as x / (2 opt); above it as
/// 1 - (1-x) / (2 (1-opt)). The map is strictly increasing, continuous at the
/// operating point, and fixes 0 -> 0, opt -> 0.5, 1 -> 1, so thresholding the
/// calibrated output at 0.5 reproduces the informedness-optimal decision.
pub fn calibrate(x: f64, op: &OperatingPoint) -> f64 {
    debug_assert!(op.opt > 0.0 && op.opt < 1.0, "constructors enforce (0,1)");
    if x <= op.opt {
        x / (2.0 * op.opt)
    } else {
        1.0 - (1.0 - x) / (2.0 * (1.0 - op.opt))
    }
}

/// Ensemble score for one sample: each member's score is calibrated with its
/// own operating point, then the calibrated outputs are averaged.
pub fn ensemble_calibrated(
    member_scores: &[f64],
    member_ops: &[OperatingPoint],
) -> Result<f64, MetricError> {
    if member_scores.is_empty() {
        return Err(MetricError::EmptyEnsemble);
    }
    check_same_len(member_scores.len(), member_ops.len())?;
    let sum: f64 = member_scores
        .iter()
        .zip(member_ops)
        .map(|(&x, op)| calibrate(x, op))
        .sum();
    Ok(sum / member_scores.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(opt: f64) -> OperatingPoint {
        OperatingPoint::new(opt).unwrap()
    }

    #[test]
    fn operating_point_maps_to_half() {
        for &opt in &[0.1, 0.25, 0.5, 0.8, 0.999] {
            assert_eq!(calibrate(opt, &op(opt)), 0.5);
        }
    }

    #[test]
    fn half_operating_point_is_identity() {
        let o = op(0.5);
        for &x in &[0.0, 0.2, 0.5, 0.7, 1.0] {
            assert!((calibrate(x, &o) - x).abs() < 1e-15);
        }
    }

    #[test]
    fn lower_branch_value() {
        // x = 0.4, opt = 0.8 -> 0.4 / 1.6 = 0.25.
        assert_eq!(calibrate(0.4, &op(0.8)), 0.25);
    }

    #[test]
    fn endpoints_fixed_exactly() {
        for &opt in &[0.001, 0.37, 0.5, 0.92] {
            let o = op(opt);
            assert_eq!(calibrate(0.0, &o), 0.0);
            assert_eq!(calibrate(1.0, &o), 1.0);
        }
    }

    #[test]
    fn ensemble_of_identical_members_is_single() {
        let o = op(0.3);
        let single = calibrate(0.6, &o);
        let ens = ensemble_calibrated(&[0.6, 0.6, 0.6], &[o, o, o]).unwrap();
        assert!((ens - single).abs() < 1e-15);
    }

    #[test]
    fn endpoint_symmetry() {
        let ops = [op(0.2), op(0.9)];
        let ens = ensemble_calibrated(&[0.0, 1.0], &ops).unwrap();
        assert_eq!(ens, 0.5);
    }

    #[test]
    fn component_wise_then_average() {
        // members (0.4, 0.9), ops (0.8, 0.5) -> mean(0.25, 0.9) = 0.575.
        let ens = ensemble_calibrated(&[0.4, 0.9], &[op(0.8), op(0.5)]).unwrap();
        assert!((ens - 0.575).abs() < 1e-15);
    }

    #[test]
    fn empty_ensemble_rejected() {
        assert_eq!(
            ensemble_calibrated(&[], &[]).unwrap_err(),
            MetricError::EmptyEnsemble
        );
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(matches!(
            ensemble_calibrated(&[0.5], &[op(0.5), op(0.2)]),
            Err(MetricError::ShapeError { .. })
        ));
    }

    #[test]
    fn decision_consistency() {
        // calibrate(x) >= 0.5 iff x >= opt.
        for &opt in &[0.2, 0.5, 0.75] {
            let o = op(opt);
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                assert_eq!(calibrate(x, &o) >= 0.5, x >= opt, "x={x} opt={opt}");
            }
        }
    }
}
