//! Noise channels, the noise-model JSON schema, and stochastic trajectory
//! semantics.
//!
//! A noise model attaches one noise-operator location after each gate, on
//! each qubit the gate touches (a CX contributes two locations). At every
//! location each configured channel samples one Kraus operator with
//! probability `||K_i |psi>||^2`, applies it, and renormalizes. Readout error
//! is a classical bit flip applied to the sampled bitstring, never to the
//! quantum state.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gates::GateKind;
use crate::rng::RandomStream;
use crate::state::Statevector;

type Mat2 = [[Complex64; 2]; 2];

const US_PER_NS: f64 = 1e-3;

/// Per-gate-tag execution times for the thermal relaxation channel,
/// nanoseconds. Tags not listed fall back to `default_ns`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateTimes {
    pub default_ns: f64,
    pub per_tag_ns: BTreeMap<String, f64>,
}

impl GateTimes {
    pub fn uniform(default_ns: f64) -> Self {
        Self {
            default_ns,
            per_tag_ns: BTreeMap::new(),
        }
    }

    pub fn for_tag(&self, tag: &str) -> f64 {
        self.per_tag_ns.get(tag).copied().unwrap_or(self.default_ns)
    }
}

/// One error channel. Probabilities are per noise-operator location.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseChannel {
    /// With probability `p`, apply a uniformly random Pauli (X, Y, or Z).
    /// `p_2q`, when set, overrides `p` at locations touched by two-qubit gates.
    Depolarizing { p: f64, p_2q: Option<f64> },
    /// Decoherence from the device's T1/T2 times and per-gate durations.
    ThermalRelaxation {
        t1_us: f64,
        t2_us: f64,
        gate_times: GateTimes,
    },
    /// Energy relaxation toward the ground state with damping ratio `gamma`.
    AmplitudeDamping { gamma: f64 },
    /// Phase damping with ratio `lambda`.
    PhaseDamping { lambda: f64 },
    /// Classical readout flip: a measured 0 flips with probability `p01`,
    /// a measured 1 with probability `p10`.
    Readout { p01: f64, p10: f64 },
}

fn check_prob(field: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || !v.is_finite() {
        return Err(Error::NoiseSchema {
            field: field.to_string(),
            msg: format!("probability must be in [0, 1], got {v}"),
        });
    }
    Ok(())
}

impl NoiseChannel {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseChannel::Depolarizing { p, p_2q } => {
                check_prob("depolarizing.p", *p)?;
                if let Some(p2) = p_2q {
                    check_prob("depolarizing.p_2q", *p2)?;
                }
            }
            NoiseChannel::ThermalRelaxation {
                t1_us,
                t2_us,
                gate_times,
            } => {
                if !t1_us.is_finite() || *t1_us <= 0.0 {
                    return Err(Error::NoiseSchema {
                        field: "thermal.t1_us".into(),
                        msg: format!("T1 must be positive, got {t1_us}"),
                    });
                }
                if !t2_us.is_finite() || *t2_us <= 0.0 || *t2_us > 2.0 * *t1_us {
                    return Err(Error::NoiseSchema {
                        field: "thermal.t2_us".into(),
                        msg: format!("T2 must satisfy 0 < T2 <= 2*T1, got T2={t2_us}, T1={t1_us}"),
                    });
                }
                if gate_times.default_ns < 0.0 {
                    return Err(Error::NoiseSchema {
                        field: "thermal.gate_time_ns.default".into(),
                        msg: "gate time must be nonnegative".into(),
                    });
                }
                for (tag, t) in &gate_times.per_tag_ns {
                    if GateKind::from_name(tag, &dummy_params(tag)).is_err() {
                        return Err(Error::NoiseSchema {
                            field: format!("thermal.gate_time_ns.{tag}"),
                            msg: "unknown gate tag".into(),
                        });
                    }
                    if *t < 0.0 {
                        return Err(Error::NoiseSchema {
                            field: format!("thermal.gate_time_ns.{tag}"),
                            msg: "gate time must be nonnegative".into(),
                        });
                    }
                }
            }
            NoiseChannel::AmplitudeDamping { gamma } => {
                check_prob("amplitude_damping.gamma", *gamma)?
            }
            NoiseChannel::PhaseDamping { lambda } => check_prob("phase_damping.lambda", *lambda)?,
            NoiseChannel::Readout { p01, p10 } => {
                check_prob("readout.p01", *p01)?;
                check_prob("readout.p10", *p10)?;
            }
        }
        Ok(())
    }

    pub fn is_readout(&self) -> bool {
        matches!(self, NoiseChannel::Readout { .. })
    }
}

/// Placeholder parameters so a tag name can be validated via `from_name`.
fn dummy_params(tag: &str) -> Vec<f64> {
    match tag {
        "rx" | "ry" | "rz" | "cp" => vec![0.0],
        "u" | "u3" => vec![0.0; 3],
        _ => Vec::new(),
    }
}

/// A set of 2x2 Kraus operators with completeness `sum K†K = I`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    operators: Vec<Mat2>,
    /// Sampling weights when every operator is a scaled unitary: in that
    /// case `||K_i |psi>||^2` does not depend on the state.
    fixed_weights: Option<Vec<f64>>,
    /// Operators that are a positive multiple of the identity; firing one
    /// is a no-op after renormalization and skips the state entirely.
    identity_scaled: Vec<bool>,
    /// `1 - tr(K_0† K_0)/2` of the construction-time first operator, the
    /// no-error branch, even when that operator is numerically zero.
    insertion_rate: f64,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn frobenius_sqr(m: &Mat2) -> f64 {
    m.iter().flatten().map(|c| c.norm_sqr()).sum()
}

/// `K† K` for a 2x2 operator.
#[allow(clippy::needless_range_loop)]
fn gram(m: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            for k in 0..2 {
                out[r][c] += m[k][r].conj() * m[k][c];
            }
        }
    }
    out
}

impl KrausSet {
    /// Build a set, dropping numerically zero operators and verifying
    /// completeness to 1e-10. The first operator passed must be the
    /// channel's no-error branch; the location insertion rate is derived
    /// from it before any filtering.
    pub fn new(operators: Vec<Mat2>) -> Result<Self> {
        let insertion_rate = match operators.first() {
            Some(k0) => {
                let g = gram(k0);
                (1.0 - (g[0][0].re + g[1][1].re) / 2.0).clamp(0.0, 1.0)
            }
            None => return Err(Error::InvalidArgument("empty Kraus set".into())),
        };
        let operators: Vec<Mat2> = operators
            .into_iter()
            .filter(|m| frobenius_sqr(m) > 1e-24)
            .collect();
        if operators.is_empty() {
            return Err(Error::InvalidArgument("empty Kraus set".into()));
        }
        let mut total = [[ZERO; 2]; 2];
        for op in &operators {
            let g = gram(op);
            for r in 0..2 {
                for c in 0..2 {
                    total[r][c] += g[r][c];
                }
            }
        }
        for (r, row) in total.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let expect = if r == c { 1.0 } else { 0.0 };
                if (v.re - expect).abs() > 1e-10 || v.im.abs() > 1e-10 {
                    return Err(Error::InvalidArgument(format!(
                        "Kraus completeness violated: sum K†K [{r}][{c}] = {v}"
                    )));
                }
            }
        }
        // Scaled-unitary detection: K†K proportional to the identity.
        let mut weights = Vec::with_capacity(operators.len());
        let mut all_scaled = true;
        for op in &operators {
            let g = gram(op);
            let w = g[0][0].re;
            if (g[1][1].re - w).abs() > 1e-12
                || g[0][1].norm() > 1e-12
                || g[1][0].norm() > 1e-12
                || g[0][0].im.abs() > 1e-12
            {
                all_scaled = false;
                break;
            }
            weights.push(w);
        }
        let identity_scaled = operators
            .iter()
            .map(|m| {
                m[0][1].norm() < 1e-15
                    && m[1][0].norm() < 1e-15
                    && (m[0][0] - m[1][1]).norm() < 1e-15
                    && m[0][0].im.abs() < 1e-15
                    && m[0][0].re > 0.0
            })
            .collect();
        Ok(Self {
            operators,
            fixed_weights: all_scaled.then_some(weights),
            identity_scaled,
            insertion_rate,
        })
    }

    pub fn operators(&self) -> &[Mat2] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Probability that this location inserts a non-identity operator,
    /// averaged over the maximally mixed state: `1 - tr(K_0† K_0)/2` of the
    /// no-error branch. For the depolarizing channel this is exactly `p`.
    pub fn insertion_rate(&self) -> f64 {
        self.insertion_rate
    }
}

/// Kraus operators for a non-readout channel. Thermal relaxation uses the
/// channel's default gate time; see [`kraus_for_tag`] for per-tag times.
pub fn kraus_for(channel: &NoiseChannel) -> Result<KrausSet> {
    kraus_for_tag(channel, None)
}

/// As [`kraus_for`], resolving per-tag depolarizing strength and thermal
/// gate time when `tag` names the gate preceding the location.
pub fn kraus_for_tag(channel: &NoiseChannel, tag: Option<&GateKind>) -> Result<KrausSet> {
    channel.validate()?;
    let re = |x: f64| Complex64::new(x, 0.0);
    match channel {
        NoiseChannel::Depolarizing { p, p_2q } => {
            let p = match tag {
                Some(kind) if kind.n_qubits() == 2 => p_2q.unwrap_or(*p),
                _ => *p,
            };
            let s_id = (1.0 - p).sqrt();
            let s_p = (p / 3.0).sqrt();
            KrausSet::new(vec![
                [[re(s_id), ZERO], [ZERO, re(s_id)]],
                [[ZERO, re(s_p)], [re(s_p), ZERO]],
                [
                    [ZERO, Complex64::new(0.0, -s_p)],
                    [Complex64::new(0.0, s_p), ZERO],
                ],
                [[re(s_p), ZERO], [ZERO, re(-s_p)]],
            ])
        }
        NoiseChannel::ThermalRelaxation {
            t1_us,
            t2_us,
            gate_times,
        } => {
            let t_us = match tag {
                Some(kind) => gate_times.for_tag(kind.name()) * US_PER_NS,
                None => gate_times.default_ns * US_PER_NS,
            };
            let gamma = 1.0 - (-t_us / t1_us).exp();
            // Residual pure dephasing after amplitude damping, so that
            // coherence decays as exp(-t/T2) overall. Requires T2 <= 2*T1.
            let lambda = 1.0 - (-2.0 * t_us * (1.0 / t2_us - 1.0 / (2.0 * t1_us))).exp();
            let (sg, s1g) = (gamma.sqrt(), (1.0 - gamma).sqrt());
            let (sl, s1l) = (lambda.sqrt(), (1.0 - lambda).sqrt());
            KrausSet::new(vec![
                [[re(1.0), ZERO], [ZERO, re(s1l * s1g)]],
                [[ZERO, re(sg)], [ZERO, ZERO]],
                [[ZERO, ZERO], [ZERO, re(sl * s1g)]],
            ])
        }
        NoiseChannel::AmplitudeDamping { gamma } => KrausSet::new(vec![
            [[re(1.0), ZERO], [ZERO, re((1.0 - gamma).sqrt())]],
            [[ZERO, re(gamma.sqrt())], [ZERO, ZERO]],
        ]),
        NoiseChannel::PhaseDamping { lambda } => KrausSet::new(vec![
            [[re(1.0), ZERO], [ZERO, re((1.0 - lambda).sqrt())]],
            [[ZERO, ZERO], [ZERO, re(lambda.sqrt())]],
        ]),
        NoiseChannel::Readout { .. } => Err(Error::NotApplicable(
            "readout error has no Kraus representation; it acts on classical bits".into(),
        )),
    }
}

/// Sample a Kraus operator with probability `||K_i |psi>||^2`, apply it to
/// `qubit`, and renormalize. Returns the index of the operator that fired.
pub fn apply_kraus_step(
    state: &mut Statevector,
    qubit: usize,
    kraus: &KrausSet,
    rng: &mut RandomStream,
) -> Result<usize> {
    let u = rng.next_f64();
    if let Some(weights) = &kraus.fixed_weights {
        // Scaled unitaries: state-independent probabilities, and the scale
        // factor is the exact renormalization.
        let mut cum = 0.0;
        let mut chosen = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            cum += w;
            if u < cum {
                chosen = i;
                break;
            }
        }
        // a scaled identity cancels exactly against its renormalization
        if !kraus.identity_scaled[chosen] {
            let w = weights[chosen];
            state.apply_1q_matrix(qubit, &kraus.operators[chosen])?;
            state.scale(1.0 / w.sqrt());
        }
        return Ok(chosen);
    }
    // General case: walk operators, accumulating state-dependent weights.
    // Completeness guarantees they sum to 1 for a normalized state.
    let mut cum = 0.0;
    let last = kraus.operators.len() - 1;
    for (i, op) in kraus.operators.iter().enumerate() {
        let p = if i == last {
            1.0 - cum
        } else {
            state.norm_sqr_after_1q(qubit, op)?
        };
        if u < cum + p || i == last {
            state.apply_1q_matrix(qubit, op)?;
            let norm = state.norm_sqr().sqrt();
            if norm > 0.0 {
                state.scale(1.0 / norm);
            }
            return Ok(i);
        }
        cum += p;
    }
    unreachable!("loop always returns at the last operator");
}

/// Spec-level trajectory step for a single channel. Hot paths should resolve
/// the model once via [`NoiseModel::resolve`] and use [`apply_kraus_step`].
pub fn trajectory_noise_step(
    state: &mut Statevector,
    qubit: usize,
    channel: &NoiseChannel,
    rng: &mut RandomStream,
) -> Result<usize> {
    let kraus = kraus_for(channel)?;
    apply_kraus_step(state, qubit, &kraus, rng)
}

/// Classical readout flips on a measured basis-state index.
pub fn apply_readout_error_index(
    index: u64,
    n_qubits: usize,
    p01: f64,
    p10: f64,
    rng: &mut RandomStream,
) -> u64 {
    let mut out = index;
    for q in 0..n_qubits {
        let bit = index >> q & 1;
        let flip_p = if bit == 1 { p10 } else { p01 };
        if flip_p > 0.0 && rng.next_bool(flip_p) {
            out ^= 1 << q;
        }
    }
    out
}

/// Flip each measured bit independently: probability `p10` for a 1, `p01`
/// for a 0. The channel must be `Readout`.
pub fn apply_readout_error(
    bits: &str,
    channel: &NoiseChannel,
    rng: &mut RandomStream,
) -> Result<String> {
    let NoiseChannel::Readout { p01, p10 } = channel else {
        return Err(Error::NotApplicable(
            "apply_readout_error requires a readout channel".into(),
        ));
    };
    let n = bits.len();
    let index = crate::state::bitstring_index(bits)?;
    let flipped = apply_readout_error_index(index, n, *p01, *p10, rng);
    Ok(crate::state::bitstring(flipped, n))
}

/// A validated set of channels: any number of after-gate channels plus at
/// most one readout channel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseModel {
    channels: Vec<NoiseChannel>,
}

impl NoiseModel {
    pub fn new(channels: Vec<NoiseChannel>) -> Result<Self> {
        let mut seen_readout = false;
        for ch in &channels {
            ch.validate()?;
            if ch.is_readout() {
                if seen_readout {
                    return Err(Error::NoiseSchema {
                        field: "readout".into(),
                        msg: "at most one readout channel is allowed".into(),
                    });
                }
                seen_readout = true;
            }
        }
        Ok(Self { channels })
    }

    /// A model with no channels at all: ideal simulation.
    pub fn noise_free() -> Self {
        Self::default()
    }

    pub fn channels(&self) -> &[NoiseChannel] {
        &self.channels
    }

    pub fn after_gate_channels(&self) -> impl Iterator<Item = &NoiseChannel> {
        self.channels.iter().filter(|c| !c.is_readout())
    }

    pub fn readout(&self) -> Option<(f64, f64)> {
        self.channels.iter().find_map(|c| match c {
            NoiseChannel::Readout { p01, p10 } => Some((*p01, *p10)),
            _ => None,
        })
    }

    pub fn is_noise_free(&self) -> bool {
        self.channels.is_empty()
    }

    /// Precompute per-gate-tag Kraus sets and location error rates.
    pub fn resolve(&self) -> Result<ResolvedNoise> {
        let mut per_tag = BTreeMap::new();
        for kind in GateKind::all_tags() {
            let mut sets = Vec::new();
            for ch in self.after_gate_channels() {
                sets.push(kraus_for_tag(ch, Some(&kind))?);
            }
            let survive: f64 = sets.iter().map(|s| 1.0 - s.insertion_rate()).product();
            per_tag.insert(
                kind.name(),
                LocationNoise {
                    kraus: sets,
                    error_rate: 1.0 - survive,
                },
            );
        }
        Ok(ResolvedNoise {
            per_tag,
            readout: self.readout(),
        })
    }
}

/// The channels and summary error rate active at one noise location.
#[derive(Debug, Clone)]
pub struct LocationNoise {
    pub kraus: Vec<KrausSet>,
    /// `1 - prod_c (1 - e_c)` over the channels at this location.
    pub error_rate: f64,
}

/// A noise model resolved against the gate set: per-tag Kraus sets with
/// depolarizing 1q/2q strengths and thermal gate times substituted.
#[derive(Debug, Clone)]
pub struct ResolvedNoise {
    per_tag: BTreeMap<&'static str, LocationNoise>,
    readout: Option<(f64, f64)>,
}

impl ResolvedNoise {
    pub fn for_kind(&self, kind: &GateKind) -> &LocationNoise {
        &self.per_tag[kind.name()]
    }

    pub fn readout(&self) -> Option<(f64, f64)> {
        self.readout
    }

    pub fn has_gate_noise(&self) -> bool {
        self.per_tag.values().any(|l| !l.kraus.is_empty())
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DepolarizingSchema {
    p: f64,
    #[serde(default)]
    p_2q: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThermalSchema {
    t1_us: f64,
    t2_us: f64,
    gate_time_ns: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeDampingSchema {
    gamma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PhaseDampingSchema {
    lambda: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReadoutSchema {
    p01: f64,
    p10: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseModelSchema {
    #[serde(default)]
    depolarizing: Option<DepolarizingSchema>,
    #[serde(default)]
    thermal: Option<ThermalSchema>,
    #[serde(default)]
    amplitude_damping: Option<AmplitudeDampingSchema>,
    #[serde(default)]
    phase_damping: Option<PhaseDampingSchema>,
    #[serde(default)]
    readout: Option<ReadoutSchema>,
}

/// Parse and validate a noise-model JSON document.
pub fn load_noise_model(json: &str) -> Result<NoiseModel> {
    let schema: NoiseModelSchema = serde_json::from_str(json).map_err(|e| Error::NoiseSchema {
        field: "noise model".into(),
        msg: e.to_string(),
    })?;
    let mut channels = Vec::new();
    if let Some(d) = schema.depolarizing {
        channels.push(NoiseChannel::Depolarizing {
            p: d.p,
            p_2q: d.p_2q,
        });
    }
    if let Some(t) = schema.thermal {
        let mut times = t.gate_time_ns;
        let default_ns = times.remove("default").ok_or_else(|| Error::NoiseSchema {
            field: "thermal.gate_time_ns.default".into(),
            msg: "missing required key".into(),
        })?;
        channels.push(NoiseChannel::ThermalRelaxation {
            t1_us: t.t1_us,
            t2_us: t.t2_us,
            gate_times: GateTimes {
                default_ns,
                per_tag_ns: times,
            },
        });
    }
    if let Some(a) = schema.amplitude_damping {
        channels.push(NoiseChannel::AmplitudeDamping { gamma: a.gamma });
    }
    if let Some(p) = schema.phase_damping {
        channels.push(NoiseChannel::PhaseDamping { lambda: p.lambda });
    }
    if let Some(r) = schema.readout {
        channels.push(NoiseChannel::Readout {
            p01: r.p01,
            p10: r.p10,
        });
    }
    if channels.is_empty() {
        return Err(Error::NoiseSchema {
            field: "noise model".into(),
            msg: "at least one channel section is required".into(),
        });
    }
    NoiseModel::new(channels)
}
