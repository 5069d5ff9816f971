use std::collections::BTreeSet;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Slit labels with their complex amplitudes. Combining slits takes the
/// union of label sets and sums amplitudes; the measure is `|Σ amplitude|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitConfiguration<T> {
    labels: Vec<String>,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> SlitConfiguration<T> {
    pub fn new<S: Into<String>>(slits: impl IntoIterator<Item = (S, Complex<T>)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut labels = Vec::new();
        let mut amplitudes = Vec::new();
        for (label, amp) in slits {
            let label = label.into();
            if label.is_empty() {
                return Err(Error::EmptyElementId);
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::NonFiniteValue(label));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateElement(label));
            }
            labels.push(label);
            amplitudes.push(amp);
        }
        Ok(SlitConfiguration { labels, amplitudes })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// `μ(S) = |Σ_{s ∈ S} amplitude(s)|²` for the slits at `positions`.
    pub fn measure(&self, positions: &[usize]) -> T {
        let total = positions
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &i| {
                acc + self.amplitudes[i]
            });
        total.norm_sqr()
    }

    /// `μ(A⊔B) − μ(A) − μ(B)`
    pub fn i2(&self, a: usize, b: usize) -> T {
        self.measure(&[a, b]) - self.measure(&[a]) - self.measure(&[b])
    }

    /// `μ(A⊔B⊔C) − μ(A⊔B) − μ(A⊔C) − μ(B⊔C) + μ(A) + μ(B) + μ(C)`
    pub fn i3(&self, a: usize, b: usize, c: usize) -> T {
        self.measure(&[a, b, c])
            - self.measure(&[a, b])
            - self.measure(&[a, c])
            - self.measure(&[b, c])
            + self.measure(&[a])
            + self.measure(&[b])
            + self.measure(&[c])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterferenceTerms<T> {
    /// Every unordered pair of slits, in label order of the configuration.
    pub i2: Vec<(String, String, T)>,
    /// Every unordered triple; empty for two slits.
    pub i3: Vec<(String, String, String, T)>,
}

impl<T: Real> InterferenceTerms<T> {
    pub fn max_abs_i2(&self) -> T {
        self.i2.iter().fold(T::zero(), |m, t| m.max(t.2.abs()))
    }

    pub fn max_abs_i3(&self) -> T {
        self.i3.iter().fold(T::zero(), |m, t| m.max(t.3.abs()))
    }
}

pub fn sorkin_terms<T: Real>(slits: &SlitConfiguration<T>) -> Result<InterferenceTerms<T>> {
    let n = slits.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 slits, got {n}"
        )));
    }
    let label = |i: usize| slits.labels[i].clone();
    let mut i2 = Vec::with_capacity(n * (n - 1) / 2);
    let mut i3 = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            i2.push((label(a), label(b), slits.i2(a, b)));
            for c in b + 1..n {
                i3.push((label(a), label(b), label(c), slits.i3(a, b, c)));
            }
        }
    }
    Ok(InterferenceTerms { i2, i3 })
}
