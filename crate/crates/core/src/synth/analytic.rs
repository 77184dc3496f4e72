//! Closed-form expectations for the generator's score model, used to plant
//! quantitative effects (for example a leave-one-domain-out AUC gap) whose
//! recovery can be checked against a known target.

use statrs::distribution::{ContinuousCDF, Normal};

/// Population AUC of the generator's monotone noisy score against its own
/// labeler's clean labels.
///
/// Latent response g ~ N(0,1); the label is `g > offset`; the score is a
/// monotone transform of g + sigma * eps with eps ~ N(0,1). The AUC is
/// E[Phi((g_pos - g_neg) / (sqrt(2) sigma))] over the truncated normals,
/// evaluated by midpoint quadrature; with sigma = 0 it is exactly 1.
pub fn monotone_score_auc(sigma: f64, offset: f64) -> f64 {
    assert!(sigma >= 0.0, "noise must be non-negative");
    if sigma == 0.0 {
        return 1.0;
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p_neg = normal.cdf(offset); // mass below the threshold
    let n = 400usize;
    let mut total = 0.0;
    // Inverse-CDF midpoint rule over both truncated normals.
    let pos_at = |u: f64| normal.inverse_cdf(p_neg + u * (1.0 - p_neg));
    let neg_at = |v: f64| normal.inverse_cdf(v * p_neg);
    let denom = 2f64.sqrt() * sigma;
    for i in 0..n {
        let u = (i as f64 + 0.5) / n as f64;
        let gp = pos_at(u);
        for j in 0..n {
            let v = (j as f64 + 0.5) / n as f64;
            let gn = neg_at(v);
            total += normal.cdf((gp - gn) / denom);
        }
    }
    total / (n * n) as f64
}

/// Observed AUC when labels are flipped independently with probability
/// `flip` at balanced prevalence: A(1 - 2 flip) + flip.
pub fn flipped_auc(auc: f64, flip: f64) -> f64 {
    auc * (1.0 - 2.0 * flip) + flip
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_is_perfect() {
        assert_eq!(monotone_score_auc(0.0, 0.0), 1.0);
    }

    #[test]
    fn auc_decreases_with_noise() {
        let a = monotone_score_auc(0.3, 0.0);
        let b = monotone_score_auc(1.0, 0.0);
        let c = monotone_score_auc(3.0, 0.0);
        assert!(a > b && b > c);
        assert!(c > 0.5);
    }

    #[test]
    fn huge_noise_approaches_chance() {
        let a = monotone_score_auc(100.0, 0.0);
        assert!((a - 0.5).abs() < 0.01);
    }

    #[test]
    fn matches_monte_carlo_oracle() {
        // Independent simulation of the same population model.
        use rand::{Rng, SeedableRng};
        use rand_distr::StandardNormal;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let sigma = 0.8;
        let n = 200_000;
        let mut scores = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let g: f64 = rng.sample(StandardNormal);
            let eps: f64 = rng.sample(StandardNormal);
            scores.push(g + sigma * eps);
            labels.push(g > 0.0);
        }
        // Rank-based AUC over the simulated pairs.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
        let pos = labels.iter().filter(|&&l| l).count();
        let neg = n - pos;
        let mut rank_sum = 0.0;
        for (rank, &idx) in order.iter().enumerate() {
            if labels[idx] {
                rank_sum += (rank + 1) as f64;
            }
        }
        let mc = (rank_sum - (pos * (pos + 1)) as f64 / 2.0) / (pos as f64 * neg as f64);
        let analytic = monotone_score_auc(sigma, 0.0);
        assert!(
            (mc - analytic).abs() < 0.005,
            "monte carlo {mc} vs quadrature {analytic}"
        );
    }

    #[test]
    fn flip_mixing_endpoints() {
        assert_eq!(flipped_auc(0.9, 0.0), 0.9);
        assert!((flipped_auc(0.9, 0.5) - 0.5).abs() < 1e-12);
    }
}
