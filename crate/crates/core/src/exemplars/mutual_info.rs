use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Real};

pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Joint probabilities `p(a, b)` over finite alphabets, stored row-major
/// with rows indexed by `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T> {
    rows: usize,
    cols: usize,
    p: Vec<T>,
}

impl<T: Real> JointDistribution<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::InvalidArgument(
                "joint distribution must be non-empty".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument(
                "joint distribution rows differ in length".into(),
            ));
        }
        let n_rows = rows.len();
        let p: Vec<T> = rows.into_iter().flatten().collect();
        if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "probabilities must be finite and non-negative, got {bad}"
            )));
        }
        let total = compensated_sum(p.iter().copied());
        let deviation = (total - T::one()).abs().to_f64().unwrap_or(f64::INFINITY);
        if deviation > NORMALIZATION_TOLERANCE {
            return Err(Error::Normalization(total.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(JointDistribution {
            rows: n_rows,
            cols,
            p,
        })
    }

    /// `p(a, b) = p(a) · p(b)`.
    pub fn product(pa: &[T], pb: &[T]) -> Result<Self> {
        JointDistribution::new(
            pa.iter()
                .map(|&x| pb.iter().map(|&y| x * y).collect())
                .collect(),
        )
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, a: usize, b: usize) -> T {
        self.p[a * self.cols + b]
    }

    pub fn marginal_a(&self) -> Vec<T> {
        (0..self.rows)
            .map(|a| compensated_sum((0..self.cols).map(|b| self.get(a, b))))
            .collect()
    }

    pub fn marginal_b(&self) -> Vec<T> {
        (0..self.cols)
            .map(|b| compensated_sum((0..self.rows).map(|a| self.get(a, b))))
            .collect()
    }

    /// Largest `|p(a, b) − p(a) p(b)|`.
    pub fn factorization_defect(&self) -> T {
        let (pa, pb) = (self.marginal_a(), self.marginal_b());
        let mut worst = T::zero();
        for (a, &qa) in pa.iter().enumerate() {
            for (b, &qb) in pb.iter().enumerate() {
                worst = worst.max((self.get(a, b) - qa * qb).abs());
            }
        }
        worst
    }
}

/// Shannon entropy in bits; `0 · log 0` counts as zero.
pub fn entropy_bits<T: Real>(probabilities: &[T]) -> T {
    -compensated_sum(
        probabilities
            .iter()
            .filter(|p| **p > T::zero())
            .map(|&p| p * p.log2()),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MutualInformation<T> {
    pub h_a: T,
    pub h_b: T,
    pub h_ab: T,
    /// `H(A) + H(B) − H(A, B)`
    pub via_identity: T,
    /// `Σ p(a,b) log₂[p(a,b) / (p(a) p(b))]`
    pub direct: T,
}

impl<T: Real> MutualInformation<T> {
    pub fn disagreement(&self) -> T {
        (self.via_identity - self.direct).abs()
    }
}

pub fn mutual_information<T: Real>(joint: &JointDistribution<T>) -> MutualInformation<T> {
    let (pa, pb) = (joint.marginal_a(), joint.marginal_b());
    let h_a = entropy_bits(&pa);
    let h_b = entropy_bits(&pb);
    let h_ab = entropy_bits(&joint.p);
    let (rows, cols) = joint.shape();
    let direct = compensated_sum((0..rows).flat_map(|a| {
        let pa = &pa;
        let pb = &pb;
        (0..cols).filter_map(move |b| {
            let p = joint.get(a, b);
            (p > T::zero()).then(|| p * (p / (pa[a] * pb[b])).log2())
        })
    }));
    MutualInformation {
        h_a,
        h_b,
        h_ab,
        via_identity: h_a + h_b - h_ab,
        direct,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_fair_bits() {
        let j = JointDistribution::<f64>::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let mi = mutual_information(&j);
        assert_eq!((mi.h_a, mi.h_b, mi.h_ab), (1.0, 1.0, 2.0));
        assert!(mi.via_identity.abs() <= 1e-12);
        assert!(mi.direct.abs() <= 1e-12);
    }

    #[test]
    fn correlated_fair_bits() {
        let j = JointDistribution::<f64>::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let mi = mutual_information(&j);
        assert_eq!(mi.h_ab, 1.0);
        assert!((mi.via_identity - 1.0).abs() <= 1e-12);
        assert!((mi.direct - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn noisy_channel_formulas_agree() {
        let j = JointDistribution::new(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let mi = mutual_information(&j);
        assert!(mi.disagreement() <= 1e-12);
        // 1 − H(0.2)
        let h = -(0.2f64 * 0.2f64.log2() + 0.8 * 0.8f64.log2());
        assert!((mi.direct - (1.0 - h)).abs() <= 1e-12);
    }

    #[test]
    fn normalization_is_enforced() {
        assert!(matches!(
            JointDistribution::new(vec![vec![0.5, 0.4]]),
            Err(Error::Normalization(_))
        ));
        assert!(JointDistribution::new(vec![vec![1.5, -0.5]]).is_err());
        assert!(JointDistribution::new(vec![vec![0.5], vec![0.25, 0.25]]).is_err());
        assert!(JointDistribution::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn product_joint_has_no_information() {
        let j = JointDistribution::<f64>::product(&[0.2, 0.3, 0.5], &[0.6, 0.4]).unwrap();
        assert!(j.factorization_defect() <= 1e-15);
        assert!(mutual_information(&j).direct.abs() <= 1e-12);
    }
}
