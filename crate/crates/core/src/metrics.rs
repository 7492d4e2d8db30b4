//! Output-distribution quality measures: state fidelity, normalized
//! fidelity, total variation distance, and per-qubit error frequencies.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::state::{bitstring, bitstring_index, Counts, Statevector};

/// A probability distribution over measurement bitstrings, stored sparsely
/// by basis-state index. Entries are nonnegative and sum to 1 within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    n_qubits: usize,
    probs: BTreeMap<u64, f64>,
}

impl Distribution {
    pub fn new(n_qubits: usize, probs: BTreeMap<u64, f64>) -> Result<Self> {
        let mut sum = 0.0;
        for (&k, &p) in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "probability of state {k} is {p}"
                )));
            }
            if k >> n_qubits != 0 {
                return Err(Error::InvalidArgument(format!(
                    "basis state {k} outside {n_qubits}-qubit space"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self { n_qubits, probs })
    }

    pub fn from_counts(counts: &Counts) -> Result<Self> {
        let total = counts.total();
        if total == 0 {
            return Err(Error::InvalidArgument("empty counts".into()));
        }
        let probs = counts
            .iter()
            .map(|(k, v)| (k, v as f64 / total as f64))
            .collect();
        Self::new(counts.n_qubits(), probs)
    }

    /// Exact output distribution `|amplitude|^2` of a pure state. Entries
    /// below 1e-15 are dropped.
    pub fn from_statevector(state: &Statevector) -> Self {
        let probs = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter_map(|(i, a)| {
                let p = a.norm_sqr();
                (p > 1e-15).then_some((i as u64, p))
            })
            .collect();
        Self {
            n_qubits: state.n_qubits(),
            probs,
        }
    }

    /// Point mass on one bitstring.
    pub fn point(n_qubits: usize, bits: &str) -> Result<Self> {
        let idx = bitstring_index(bits)?;
        Self::new(n_qubits, BTreeMap::from([(idx, 1.0)]))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn prob(&self, index: u64) -> f64 {
        self.probs.get(&index).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn to_string_map(&self) -> BTreeMap<String, f64> {
        self.probs
            .iter()
            .map(|(&k, &v)| (bitstring(k, self.n_qubits), v))
            .collect()
    }

    /// The most probable outcome (smallest index on ties).
    pub fn mode(&self) -> Option<u64> {
        self.probs
            .iter()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(a.0)))
            .map(|(&k, _)| k)
    }
}

fn check_widths(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.n_qubits != q.n_qubits {
        return Err(Error::WidthMismatch {
            left: p.n_qubits,
            right: q.n_qubits,
        });
    }
    Ok(())
}

/// Squared Bhattacharyya coefficient between two outcome distributions:
/// `(sum_x sqrt(p(x) q(x)))^2`, in `[0, 1]`. Zero-probability bins
/// contribute nothing, so only the common support is visited.
pub fn state_fidelity(p_ideal: &Distribution, p_out: &Distribution) -> Result<f64> {
    check_widths(p_ideal, p_out)?;
    let mut bc = 0.0;
    for (k, p) in p_ideal.iter() {
        let q = p_out.prob(k);
        if q > 0.0 {
            bc += (p * q).sqrt();
        }
    }
    Ok((bc * bc).min(1.0))
}

/// `F_s(p, U)` against the uniform distribution over all `2^n` bitstrings,
/// computed analytically as `(sum_x sqrt(p(x) / 2^n))^2`.
pub fn uniform_fidelity(p: &Distribution) -> f64 {
    let scale = 0.5f64.powi(p.n_qubits as i32);
    let bc: f64 = p.iter().map(|(_, v)| (v * scale).sqrt()).sum();
    (bc * bc).min(1.0)
}

/// Fidelity rescaled so that a uniformly random output scores 0 and a
/// perfect output scores 1. May be negative (worse than random). Errors when
/// the ideal distribution is itself uniform (the rescaling denominator is 0).
pub fn normalized_fidelity(p_ideal: &Distribution, p_out: &Distribution) -> Result<f64> {
    check_widths(p_ideal, p_out)?;
    let f_uni = uniform_fidelity(p_ideal);
    let denom = 1.0 - f_uni;
    if denom <= 1e-12 {
        return Err(Error::DegenerateIdeal);
    }
    Ok((state_fidelity(p_ideal, p_out)? - f_uni) / denom)
}

/// Total variation distance `0.5 * sum_x |p(x) - q(x)|`, in `[0, 1]`.
pub fn tvd(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_widths(p, q)?;
    let mut acc = 0.0;
    for (k, pv) in p.iter() {
        acc += (pv - q.prob(k)).abs();
    }
    for (k, qv) in q.iter() {
        if p.prob(k) == 0.0 {
            acc += qv;
        }
    }
    Ok(acc / 2.0)
}

/// Fraction of outcomes whose bit at each qubit position differs from the
/// reference bitstring. Index 0 of the result is qubit 0 (rightmost bit).
pub fn qubit_error_frequency(counts: &Counts, reference: &str) -> Result<Vec<f64>> {
    if reference.len() != counts.n_qubits() {
        return Err(Error::WidthMismatch {
            left: reference.len(),
            right: counts.n_qubits(),
        });
    }
    let ref_index = bitstring_index(reference)?;
    let total = counts.total();
    if total == 0 {
        return Err(Error::InvalidArgument("empty counts".into()));
    }
    let n = counts.n_qubits();
    let mut errors = vec![0u64; n];
    for (outcome, count) in counts.iter() {
        let diff = outcome ^ ref_index;
        for (q, e) in errors.iter_mut().enumerate() {
            if diff >> q & 1 == 1 {
                *e += count;
            }
        }
    }
    Ok(errors.iter().map(|&e| e as f64 / total as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(n: usize, entries: &[(&str, f64)]) -> Distribution {
        let probs = entries
            .iter()
            .map(|(bits, p)| (bitstring_index(bits).unwrap(), *p))
            .collect();
        Distribution::new(n, probs).unwrap()
    }

    #[test]
    fn fidelity_of_identical_distributions_is_one() {
        let p = dist(2, &[("00", 0.25), ("01", 0.25), ("10", 0.5)]);
        assert!((state_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_of_orthogonal_supports_is_zero() {
        let p = dist(1, &[("0", 1.0)]);
        let q = dist(1, &[("1", 1.0)]);
        assert_eq!(state_fidelity(&p, &q).unwrap(), 0.0);
    }

    #[test]
    fn fidelity_point_mass_against_mixture() {
        let p = dist(1, &[("0", 1.0)]);
        let q = dist(1, &[("0", 0.9), ("1", 0.1)]);
        assert!((state_fidelity(&p, &q).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric() {
        let p = dist(2, &[("00", 0.7), ("11", 0.3)]);
        let q = dist(2, &[("00", 0.2), ("01", 0.5), ("11", 0.3)]);
        let a = state_fidelity(&p, &q).unwrap();
        let b = state_fidelity(&q, &p).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn normalized_fidelity_examples() {
        let ideal = dist(1, &[("0", 1.0)]);
        let uni = dist(1, &[("0", 0.5), ("1", 0.5)]);
        assert!(normalized_fidelity(&ideal, &uni).unwrap().abs() < 1e-12);
        assert!((normalized_fidelity(&ideal, &ideal).unwrap() - 1.0).abs() < 1e-12);
        let out = dist(1, &[("0", 0.9), ("1", 0.1)]);
        assert!((normalized_fidelity(&ideal, &out).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn normalized_fidelity_rejects_uniform_ideal() {
        let uni = dist(1, &[("0", 0.5), ("1", 0.5)]);
        assert!(matches!(
            normalized_fidelity(&uni, &uni),
            Err(Error::DegenerateIdeal)
        ));
    }

    #[test]
    fn uniform_output_scores_exactly_zero() {
        // the designed zero of the rescaled metric, for random non-uniform
        // ideal distributions against a materialized uniform output
        let mut rng = crate::rng::RandomStream::new(31);
        let n = 3usize;
        let dim = 1u64 << n;
        let uniform = Distribution::new(
            n,
            (0..dim).map(|i| (i, 1.0 / dim as f64)).collect(),
        )
        .unwrap();
        for _ in 0..20 {
            let mut raw: Vec<f64> = (0..dim).map(|_| rng.next_f64() + 1e-3).collect();
            let sum: f64 = raw.iter().sum();
            for v in &mut raw {
                *v /= sum;
            }
            let ideal = Distribution::new(
                n,
                raw.iter().enumerate().map(|(i, &p)| (i as u64, p)).collect(),
            )
            .unwrap();
            let nf = normalized_fidelity(&ideal, &uniform).unwrap();
            assert!(nf.abs() < 1e-9, "NF against uniform = {nf}");
        }
    }

    #[test]
    fn uniform_reference_is_analytic() {
        // F_s(p, U) for p = point mass over n qubits is 1/2^n.
        for n in 1..=4usize {
            let p = Distribution::point(n, &"0".repeat(n)).unwrap();
            let expect = 0.5f64.powi(n as i32);
            assert!((uniform_fidelity(&p) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn tvd_examples() {
        let p = dist(1, &[("0", 0.6), ("1", 0.4)]);
        let q = dist(1, &[("0", 0.5), ("1", 0.5)]);
        assert!((tvd(&p, &q).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(tvd(&p, &p).unwrap(), 0.0);
        let a = dist(1, &[("0", 1.0)]);
        let b = dist(1, &[("1", 1.0)]);
        assert!((tvd(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tvd_metric_properties_on_random_triples() {
        let mut rng = crate::rng::RandomStream::new(17);
        for _ in 0..100 {
            let mut raw = [[0.0f64; 4]; 3];
            for d in &mut raw {
                let mut sum = 0.0;
                for v in d.iter_mut() {
                    *v = rng.next_f64();
                    sum += *v;
                }
                for v in d.iter_mut() {
                    *v /= sum;
                }
            }
            let ds: Vec<Distribution> = raw
                .iter()
                .map(|d| {
                    Distribution::new(
                        2,
                        d.iter().enumerate().map(|(i, &p)| (i as u64, p)).collect(),
                    )
                    .unwrap()
                })
                .collect();
            let ab = tvd(&ds[0], &ds[1]).unwrap();
            let ba = tvd(&ds[1], &ds[0]).unwrap();
            let bc = tvd(&ds[1], &ds[2]).unwrap();
            let ac = tvd(&ds[0], &ds[2]).unwrap();
            assert!((ab - ba).abs() < 1e-12);
            assert!(ac <= ab + bc + 1e-12, "triangle inequality violated");
            assert!((0.0..=1.0).contains(&ab));
        }
    }

    #[test]
    fn width_mismatch_is_reported() {
        let p = dist(1, &[("0", 1.0)]);
        let q = dist(2, &[("00", 1.0)]);
        assert!(matches!(
            state_fidelity(&p, &q),
            Err(Error::WidthMismatch { .. })
        ));
        assert!(matches!(tvd(&p, &q), Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn counts_conversion_preserves_mass() {
        let mut counts = Counts::new(2);
        for (idx, n) in [(0u64, 10u64), (1, 30), (3, 60)] {
            for _ in 0..n {
                counts.record(idx);
            }
        }
        let d = Distribution::from_counts(&counts).unwrap();
        let total: f64 = d.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((d.prob(3) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn qubit_error_frequency_examples() {
        let mut counts = Counts::new(2);
        for _ in 0..50 {
            counts.record(0b00);
        }
        for _ in 0..50 {
            counts.record(0b01);
        }
        let freqs = qubit_error_frequency(&counts, "00").unwrap();
        assert_eq!(freqs, vec![0.5, 0.0]);

        let mut all_ref = Counts::new(3);
        for _ in 0..10 {
            all_ref.record(0b101);
        }
        assert_eq!(
            qubit_error_frequency(&all_ref, "101").unwrap(),
            vec![0.0, 0.0, 0.0]
        );

        let mut flipped = Counts::new(2);
        for _ in 0..100 {
            flipped.record(0b11);
        }
        assert_eq!(qubit_error_frequency(&flipped, "00").unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn mode_picks_most_probable() {
        let p = dist(2, &[("00", 0.2), ("10", 0.5), ("11", 0.3)]);
        assert_eq!(p.mode(), Some(0b10));
    }
}
