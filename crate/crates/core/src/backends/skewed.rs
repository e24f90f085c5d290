use rand::{Rng, RngCore};

use crate::error::{invalid, CoverError, Result};
use crate::oracle::{BackendKind, Element, SampleRng, SetBackend};

/// A deliberately biased generator wrapped around any backend.
///
/// The first `floor(m / 2)` members (in the backend's `element_at` order)
/// are drawn with probability `(1 - alpha_l) / m` each; the remaining mass is
/// spread uniformly over the other members and must not exceed
/// `(1 + alpha_r) / m` per member. Membership is delegated unchanged.
#[derive(Debug)]
pub struct SkewedSampler {
    inner: Box<dyn SetBackend>,
    alpha_l: f64,
    alpha_r: f64,
    low_count: u64,
    low_mass: f64,
}

impl SkewedSampler {
    pub fn new(inner: Box<dyn SetBackend>, alpha_l: f64, alpha_r: f64) -> Result<Self> {
        for (name, v) in [("alpha_l", alpha_l), ("alpha_r", alpha_r)] {
            if !(0.0..1.0).contains(&v) {
                return Err(invalid(name, format!("{v} is outside [0, 1)")));
            }
        }
        let m = inner.cardinality();
        let low_count = m / 2;
        let low_mass = if m == 0 {
            0.0
        } else {
            low_count as f64 * (1.0 - alpha_l) / m as f64
        };
        let s = SkewedSampler {
            inner,
            alpha_l,
            alpha_r,
            low_count,
            low_mass,
        };
        if m > 0 && s.high_probability() > (1.0 + alpha_r) / m as f64 * (1.0 + 1e-12) {
            return Err(CoverError::InfeasibleSkew {
                alpha_l,
                alpha_r,
                size: m,
            });
        }
        Ok(s)
    }

    pub fn alphas(&self) -> (f64, f64) {
        (self.alpha_l, self.alpha_r)
    }

    pub fn inner(&self) -> &dyn SetBackend {
        self.inner.as_ref()
    }

    fn high_probability(&self) -> f64 {
        let m = self.inner.cardinality();
        (1.0 - self.low_mass) / (m - self.low_count) as f64
    }

    /// Exact probability of drawing the member at `index`.
    pub fn probability_of(&self, index: u64) -> f64 {
        let m = self.inner.cardinality();
        if index >= m {
            0.0
        } else if self.alpha_l == 0.0 {
            1.0 / m as f64
        } else if index < self.low_count {
            (1.0 - self.alpha_l) / m as f64
        } else {
            self.high_probability()
        }
    }
}

impl SetBackend for SkewedSampler {
    fn cardinality(&self) -> u64 {
        self.inner.cardinality()
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Result<Element> {
        let m = self.inner.cardinality();
        if self.alpha_l == 0.0 || m <= 1 {
            return self.inner.random_element(rng);
        }
        let u: f64 = rng.gen();
        let index = if u < self.low_mass {
            rng.gen_range(0..self.low_count)
        } else {
            rng.gen_range(self.low_count..m)
        };
        self.inner.element_at(index).ok_or(CoverError::EmptySet)
    }

    fn contains(&self, x: Element) -> bool {
        self.inner.contains(x)
    }

    fn sample_many(&self, rng: &mut SampleRng, w: u64, out: &mut Vec<Element>) -> Result<()> {
        if self.alpha_l == 0.0 || self.inner.cardinality() <= 1 {
            return self.inner.sample_many(rng, w, out);
        }
        for _ in 0..w {
            out.push(self.random_element(rng)?);
        }
        Ok(())
    }

    fn retain_non_members(&self, xs: &mut [Element]) -> usize {
        self.inner.retain_non_members(xs)
    }

    fn element_at(&self, index: u64) -> Option<Element> {
        self.inner.element_at(index)
    }

    fn kind(&self) -> BackendKind {
        self.inner.kind()
    }

    fn comparison_count(&self) -> u64 {
        self.inner.comparison_count()
    }

    fn prepare_for_queries(&mut self) -> bool {
        self.inner.prepare_for_queries()
    }

    fn materialize(&self) -> Vec<Element> {
        self.inner.materialize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::SortedArraySet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(m: u64) -> Box<dyn SetBackend> {
        Box::new(SortedArraySet::from_values(0..m))
    }

    #[test]
    fn zero_skew_is_the_uniform_draw() {
        let s = SkewedSampler::new(set(10), 0.0, 0.0).unwrap();
        let plain = SortedArraySet::from_values(0..10);
        let mut a = ChaCha8Rng::seed_from_u64(4);
        let mut b = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            assert_eq!(s.random_element(&mut a).unwrap(), plain.random_element(&mut b).unwrap());
        }
    }

    #[test]
    fn two_element_envelope() {
        let s = SkewedSampler::new(set(2), 0.5, 0.5).unwrap();
        assert_eq!(s.probability_of(0), 0.25);
        assert_eq!(s.probability_of(1), 0.75);
    }

    #[test]
    fn infeasible_skew_is_rejected() {
        // on an even set the upper half receives (1 + alpha_l) / m
        assert!(matches!(
            SkewedSampler::new(set(4), 0.5, 0.2),
            Err(CoverError::InfeasibleSkew { .. })
        ));
        assert!(SkewedSampler::new(set(4), 0.2, 0.5).is_ok());
    }

    #[test]
    fn probabilities_sum_to_one_and_respect_envelope() {
        for m in 1..40u64 {
            for (al, ar) in [(0.1, 0.3), (0.3, 0.3), (0.0, 0.0), (0.2, 0.6)] {
                let Ok(s) = SkewedSampler::new(set(m), al, ar) else {
                    continue;
                };
                let total: f64 = (0..m).map(|i| s.probability_of(i)).sum();
                assert!((total - 1.0).abs() < 1e-12);
                for i in 0..m {
                    let p = s.probability_of(i);
                    assert!(p >= (1.0 - al) / m as f64 - 1e-12);
                    assert!(p <= (1.0 + ar) / m as f64 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn empirical_frequencies_stay_in_envelope() {
        let m = 10u64;
        let (al, ar) = (0.3, 0.4);
        let s = SkewedSampler::new(set(m), al, ar).unwrap();
        let draws = 100_000u64;
        let mut counts = vec![0u64; m as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for _ in 0..draws {
            counts[s.random_element(&mut rng).unwrap().0 as usize] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let f = c as f64 / draws as f64;
            let p = s.probability_of(i as u64);
            let sigma = (p * (1.0 - p) / draws as f64).sqrt();
            assert!(f >= (1.0 - al) / m as f64 - 3.0 * sigma, "member {i}: {f}");
            assert!(f <= (1.0 + ar) / m as f64 + 3.0 * sigma, "member {i}: {f}");
        }
    }
}
