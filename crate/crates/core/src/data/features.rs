use super::DataError;
use crate::util::valid_id;

/// Shared feature vectors over samples from one or more datasets.
///
/// Each row carries the dataset the sample belongs to; the probe uses this to
/// route gradients to per-dataset heads. Rows are sorted by `sample_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    sample_ids: Vec<String>,
    dataset_ids: Vec<String>,
    dim: usize,
    data: Vec<f64>, // row-major, n x dim
}

impl FeatureSet {
    pub fn new(
        sample_ids: Vec<String>,
        dataset_ids: Vec<String>,
        dim: usize,
        data: Vec<f64>,
    ) -> Result<Self, DataError> {
        if sample_ids.len() != dataset_ids.len() {
            return Err(DataError::Invalid(format!(
                "{} sample ids but {} dataset ids",
                sample_ids.len(),
                dataset_ids.len()
            )));
        }
        if data.len() != sample_ids.len() * dim {
            return Err(DataError::Invalid(format!(
                "feature grid is {} cells, expected {} samples x {} dims",
                data.len(),
                sample_ids.len(),
                dim
            )));
        }
        for id in sample_ids.iter().chain(dataset_ids.iter()) {
            if !valid_id(id) {
                return Err(DataError::Invalid(format!("invalid id {id:?}")));
            }
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(DataError::Value(format!(
                "non-finite feature value {bad}"
            )));
        }
        let mut order: Vec<usize> = (0..sample_ids.len()).collect();
        order.sort_by(|&a, &b| sample_ids[a].cmp(&sample_ids[b]));
        for w in order.windows(2) {
            if sample_ids[w[0]] == sample_ids[w[1]] {
                return Err(DataError::Invalid(format!(
                    "duplicate sample id {:?} in feature set",
                    sample_ids[w[0]]
                )));
            }
        }
        let sorted_ids: Vec<String> = order.iter().map(|&i| sample_ids[i].clone()).collect();
        let sorted_datasets: Vec<String> = order.iter().map(|&i| dataset_ids[i].clone()).collect();
        let mut sorted_data = Vec::with_capacity(data.len());
        for &i in &order {
            sorted_data.extend_from_slice(&data[i * dim..(i + 1) * dim]);
        }
        Ok(Self {
            sample_ids: sorted_ids,
            dataset_ids: sorted_datasets,
            dim,
            data: sorted_data,
        })
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn dataset_ids(&self) -> &[String] {
        &self.dataset_ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_rejected() {
        let r = FeatureSet::new(
            vec!["a".into()],
            vec!["d".into()],
            2,
            vec![0.0, f64::NAN],
        );
        assert!(matches!(r, Err(DataError::Value(_))));
    }

    #[test]
    fn rows_follow_sorted_ids() {
        let f = FeatureSet::new(
            vec!["b".into(), "a".into()],
            vec!["d".into(), "d".into()],
            1,
            vec![2.0, 1.0],
        )
        .unwrap();
        assert_eq!(f.row(0), &[1.0]);
        assert_eq!(f.row(1), &[2.0]);
    }
}
