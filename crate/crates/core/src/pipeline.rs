//! The random-number pipeline: detector click patterns, the von Neumann
//! correction, bitstream assembly, and the comparative analyses (bias,
//! source sweeps, adversarial alternating sources, rate baselines).
//!
//! # Bit extraction
//!
//! Samples are drawn in pairs (S₁, S₂). Threshold detectors reduce each
//! sample to a click pattern; per mode x the pair codes to
//!
//! * `0` if mode x clicks in S₁ but not in S₂,
//! * `1` if mode x clicks in S₂ but not in S₁,
//! * discard otherwise (both click or neither).
//!
//! Retained bits are emitted in mode order 1..m within each pair, then the
//! next pair is drawn. Pairing is non-overlapping: the default consumes two
//! fresh samples per pair, and the `RandomPair { t }` variant draws `t`
//! fresh samples per round and picks an ordered pair uniformly among them.
//! For identically distributed independent samples both pairings give
//! exactly unbiased bits per mode: P(0) = P(1) = q·(1−q) where q is the
//! mode's click marginal.
//!
//! # Bit file formats
//!
//! Packed: MSB-first within each byte, final partial byte zero-padded; the
//! exact bit count travels out of band (the CLI records it in the run
//! manifest). ASCII: one '0'/'1' character per bit, trailing newline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fock::{
    full_distribution, postselect_collision_free, CdfSampler, FockState, OutputDistribution,
};
use crate::interferometer::{build_unitary, MeshParameters};
use crate::linalg::{haar_random_unitary, ComplexMatrix};
use crate::seed::derive_seed;

/// Consecutive fully-discarded pairs tolerated before generation aborts
/// with a no-entropy error.
pub const NO_ENTROPY_PAIR_BUDGET: u64 = 1_000_000;

/// Per-mode detector record: true = one or more photons detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClickPattern {
    clicks: Vec<bool>,
}

impl ClickPattern {
    pub fn new(clicks: Vec<bool>) -> Self {
        Self { clicks }
    }

    pub fn clicks(&self) -> &[bool] {
        &self.clicks
    }

    pub fn modes(&self) -> usize {
        self.clicks.len()
    }
}

/// Threshold-detector view of a Fock state: clicks wherever occupation ≥ 1.
pub fn to_clicks(s: &FockState) -> ClickPattern {
    ClickPattern::new(s.occupations().iter().map(|&j| j > 0).collect())
}

/// Von Neumann correction for one sample pair: per-mode codes, `Some(bit)`
/// for retained modes and `None` for discarded ones (equal click values).
pub fn von_neumann_extract(s1: &ClickPattern, s2: &ClickPattern) -> Result<Vec<Option<bool>>> {
    if s1.modes() != s2.modes() {
        return Err(Error::Domain(format!(
            "click patterns over {} vs {} modes cannot be paired",
            s1.modes(),
            s2.modes()
        )));
    }
    Ok(s1
        .clicks
        .iter()
        .zip(&s2.clicks)
        .map(|(&c1, &c2)| match (c1, c2) {
            (true, false) => Some(false), // 0 bit
            (false, true) => Some(true),  // 1 bit
            _ => None,                    // discard
        })
        .collect())
}

/// How samples are grouped into von Neumann pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pairing {
    /// Non-overlapping consecutive pairs (S₁,S₂), (S₃,S₄), …
    Consecutive,
    /// Each round draws `t` fresh samples (t > 2) and selects an ordered
    /// pair uniformly at random among the t·(t−1) possibilities.
    RandomPair { t: usize },
}

impl Pairing {
    fn validate(&self) -> Result<()> {
        if let Pairing::RandomPair { t } = self {
            if *t <= 2 {
                return Err(Error::Config(format!(
                    "random-pair selection needs t > 2, got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Where the unitary comes from: a fixed matrix or mesh parameters.
#[derive(Debug, Clone)]
pub enum UnitarySource {
    Matrix(ComplexMatrix),
    Mesh(MeshParameters),
}

impl UnitarySource {
    /// Resolves to a concrete matrix (building the mesh if necessary).
    pub fn resolve(&self) -> Result<ComplexMatrix> {
        match self {
            UnitarySource::Matrix(u) => Ok(u.clone()),
            UnitarySource::Mesh(mesh) => build_unitary(mesh),
        }
    }
}

/// Full configuration of a bit-generation run.
#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub source: UnitarySource,
    pub input: FockState,
    pub postselect_collision_free: bool,
    pub pairing: Pairing,
    pub seed: u64,
}

/// Metadata carried with every generated bitstream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamMeta {
    pub unitary_id: String,
    pub input_state: String,
    pub sample_pairs_consumed: u64,
    pub seed: u64,
}

/// An extracted bit sequence plus its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct BitStream {
    bits: Vec<bool>,
    meta: StreamMeta,
}

impl BitStream {
    pub fn new(bits: Vec<bool>, meta: StreamMeta) -> Self {
        Self { bits, meta }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn meta(&self) -> &StreamMeta {
        &self.meta
    }
}

/// The exact distribution a config samples from (postselection applied).
pub fn configured_distribution(cfg: &GeneratorConfig) -> Result<OutputDistribution> {
    let u = cfg.source.resolve()?;
    let dist = full_distribution(&u, &cfg.input)?;
    if cfg.postselect_collision_free {
        postselect_collision_free(&dist)
    } else {
        Ok(dist)
    }
}

/// Draws one von Neumann pair according to the pairing policy.
fn draw_pair<'a>(
    sampler: &CdfSampler<'a>,
    pairing: &Pairing,
    rng: &mut ChaCha12Rng,
) -> (&'a FockState, &'a FockState) {
    match pairing {
        Pairing::Consecutive => {
            let s1 = sampler.draw(rng);
            let s2 = sampler.draw(rng);
            (s1, s2)
        }
        Pairing::RandomPair { t } => {
            let round: Vec<&FockState> = (0..*t).map(|_| sampler.draw(rng)).collect();
            let i = rng.gen_range(0..*t);
            let mut j = rng.gen_range(0..*t - 1);
            if j >= i {
                j += 1;
            }
            (round[i], round[j])
        }
    }
}

/// Generates exactly `target_bits` bits from the configured source.
///
/// Deterministic per (config, seed). Aborts with a no-entropy error if
/// `NO_ENTROPY_PAIR_BUDGET` consecutive pairs yield no bits (degenerate
/// sources such as point-mass distributions).
pub fn generate_bits(cfg: &GeneratorConfig, target_bits: usize) -> Result<BitStream> {
    if target_bits == 0 {
        return Err(Error::Domain("target_bits must be positive".into()));
    }
    cfg.pairing.validate()?;
    let dist = configured_distribution(cfg)?;
    let sampler = CdfSampler::new(&dist);
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);

    let mut bits = Vec::with_capacity(target_bits);
    let mut pairs_consumed: u64 = 0;
    let mut barren_streak: u64 = 0;

    while bits.len() < target_bits {
        let (s1, s2) = draw_pair(&sampler, &cfg.pairing, &mut rng);
        pairs_consumed += 1;
        let c1 = to_clicks(s1);
        let c2 = to_clicks(s2);
        let codes = von_neumann_extract(&c1, &c2)?;
        let before = bits.len();
        for bit in codes.into_iter().flatten() {
            bits.push(bit);
        }
        if bits.len() == before {
            barren_streak += 1;
            if barren_streak >= NO_ENTROPY_PAIR_BUDGET {
                return Err(Error::NoEntropy(format!(
                    "{NO_ENTROPY_PAIR_BUDGET} consecutive pairs yielded no bits; \
                     the configured source has no extractable entropy"
                )));
            }
        } else {
            barren_streak = 0;
        }
    }
    bits.truncate(target_bits);

    Ok(BitStream {
        bits,
        meta: StreamMeta {
            unitary_id: dist.unitary_id().to_string(),
            input_state: cfg.input.to_string(),
            sample_pairs_consumed: pairs_consumed,
            seed: cfg.seed,
        },
    })
}

/// Empirical bit frequencies of a stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub p0: f64,
    pub p1: f64,
    pub n: usize,
}

/// Counts empirical 0/1 frequencies; errors on an empty stream.
pub fn bias_report(stream: &BitStream) -> Result<BiasReport> {
    if stream.is_empty() {
        return Err(Error::Domain(
            "cannot report bias of an empty stream".into(),
        ));
    }
    let n = stream.len();
    let ones = stream.bits().iter().filter(|&&b| b).count();
    let p1 = ones as f64 / n as f64;
    Ok(BiasReport {
        p0: 1.0 - p1,
        p1,
        n,
    })
}

/// Per-mode click marginals q_x = P(mode x clicks) under a distribution.
pub fn click_marginals(dist: &OutputDistribution) -> Vec<f64> {
    let m = dist.modes();
    let mut q = vec![0.0; m];
    for (state, p) in dist.entries() {
        for (x, &occ) in state.occupations().iter().enumerate() {
            if occ > 0 {
                q[x] += p;
            }
        }
    }
    q
}

/// Analytical per-mode code probabilities for independent identically
/// distributed pairs. The click and no-click masses are accumulated as
/// independent sums (not via 1 − q), so their complementarity is itself a
/// checkable property.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCodeProbability {
    /// Σ p over states where the mode clicks.
    pub click_mass: f64,
    /// Σ p over states where the mode stays dark.
    pub no_click_mass: f64,
    /// P(code 0) = click_mass · no_click_mass.
    pub p_zero: f64,
    /// P(code 1) = no_click_mass · click_mass.
    pub p_one: f64,
}

/// Computes P_x(0) and P_x(1) per mode from the exact distribution.
pub fn per_mode_code_probabilities(dist: &OutputDistribution) -> Vec<ModeCodeProbability> {
    let m = dist.modes();
    let mut click = vec![0.0; m];
    let mut dark = vec![0.0; m];
    for (state, p) in dist.entries() {
        for (x, &occ) in state.occupations().iter().enumerate() {
            if occ > 0 {
                click[x] += p;
            } else {
                dark[x] += p;
            }
        }
    }
    click
        .into_iter()
        .zip(dark)
        .map(|(c, d)| ModeCodeProbability {
            click_mass: c,
            no_click_mass: d,
            p_zero: c * d,
            p_one: d * c,
        })
        .collect()
}

/// One row of a fixed-source sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SourceSweepRow {
    pub input: String,
    pub p1: f64,
    pub n_bits: usize,
    /// 4·√(0.25/n): the deviation bound an unbiased source stays within.
    pub four_sigma: f64,
    pub flagged: bool,
}

/// Generates `bits_per_input` bits for each input state (sub-seeds derived
/// per input) and reports the 1-bit frequency with a 4σ flag.
pub fn source_sweep(
    u: &ComplexMatrix,
    inputs: &[FockState],
    bits_per_input: usize,
    seed: u64,
) -> Result<Vec<SourceSweepRow>> {
    let mut rows = Vec::with_capacity(inputs.len());
    for (idx, input) in inputs.iter().enumerate() {
        let cfg = GeneratorConfig {
            source: UnitarySource::Matrix(u.clone()),
            input: input.clone(),
            postselect_collision_free: false,
            pairing: Pairing::Consecutive,
            seed: derive_seed(seed, "source_sweep", idx as u64),
        };
        let stream = generate_bits(&cfg, bits_per_input)?;
        let report = bias_report(&stream)?;
        let four_sigma = 4.0 * (0.25 / report.n as f64).sqrt();
        rows.push(SourceSweepRow {
            input: input.to_string(),
            p1: report.p1,
            n_bits: report.n,
            four_sigma,
            flagged: (report.p1 - 0.5).abs() > four_sigma,
        });
    }
    Ok(rows)
}

/// Report of the alternating-source adversarial mode.
#[derive(Debug, Clone, Serialize)]
pub struct AlternatingSourceReport {
    pub input_a: String,
    pub input_b: String,
    pub n_bits: usize,
    pub p1_empirical: f64,
    /// Per-mode analytical prediction Σ(1−qA)qB / Σ[qA(1−qB) + (1−qA)qB].
    pub p1_analytic: f64,
    pub four_sigma: f64,
    pub flagged: bool,
}

/// Adversarial generation mode: S₁ always comes from `input_a`'s
/// distribution and S₂ from `input_b`'s. The von Neumann guarantee assumes
/// identically distributed pairs, so differing click marginals leak bias
/// into the output; the report carries the analytical prediction and flags
/// empirical deviations beyond 4σ.
pub fn alternating_source_bits(
    u: &ComplexMatrix,
    input_a: &FockState,
    input_b: &FockState,
    target_bits: usize,
    seed: u64,
) -> Result<(BitStream, AlternatingSourceReport)> {
    if target_bits == 0 {
        return Err(Error::Domain("target_bits must be positive".into()));
    }
    let dist_a = full_distribution(u, input_a)?;
    let dist_b = full_distribution(u, input_b)?;
    let sampler_a = CdfSampler::new(&dist_a);
    let sampler_b = CdfSampler::new(&dist_b);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut bits = Vec::with_capacity(target_bits);
    let mut pairs_consumed: u64 = 0;
    let mut barren_streak: u64 = 0;
    while bits.len() < target_bits {
        let s1 = sampler_a.draw(&mut rng);
        let s2 = sampler_b.draw(&mut rng);
        pairs_consumed += 1;
        let codes = von_neumann_extract(&to_clicks(s1), &to_clicks(s2))?;
        let before = bits.len();
        bits.extend(codes.into_iter().flatten());
        if bits.len() == before {
            barren_streak += 1;
            if barren_streak >= NO_ENTROPY_PAIR_BUDGET {
                return Err(Error::NoEntropy(
                    "alternating sources never disagree; no extractable bits".into(),
                ));
            }
        } else {
            barren_streak = 0;
        }
    }
    bits.truncate(target_bits);

    let q_a = click_marginals(&dist_a);
    let q_b = click_marginals(&dist_b);
    let mut zero_rate = 0.0;
    let mut one_rate = 0.0;
    for (qa, qb) in q_a.iter().zip(&q_b) {
        zero_rate += qa * (1.0 - qb);
        one_rate += (1.0 - qa) * qb;
    }
    let p1_analytic = one_rate / (zero_rate + one_rate);

    let n = bits.len();
    let ones = bits.iter().filter(|&&b| b).count();
    let p1_empirical = ones as f64 / n as f64;
    let four_sigma = 4.0 * (0.25 / n as f64).sqrt();

    let stream = BitStream {
        bits,
        meta: StreamMeta {
            unitary_id: dist_a.unitary_id().to_string(),
            input_state: format!("{input_a}|{input_b}"),
            sample_pairs_consumed: pairs_consumed,
            seed,
        },
    };
    let report = AlternatingSourceReport {
        input_a: input_a.to_string(),
        input_b: input_b.to_string(),
        n_bits: n,
        p1_empirical,
        p1_analytic,
        four_sigma,
        flagged: (p1_empirical - 0.5).abs() > four_sigma,
    };
    Ok((stream, report))
}

/// Retained-bits-per-sampling-event comparison between the Boson generator
/// and an idealized single-photon branching-path baseline.
#[derive(Debug, Clone, Serialize)]
pub struct RateComparison {
    pub modes: usize,
    pub photons: usize,
    /// Sampling events simulated per generator (one event = one detection
    /// pair / coincidence record; two events feed one von Neumann pair).
    pub trials: usize,
    /// Mean retained bits per sampling event for the Boson generator.
    pub boson_bits_per_pair: f64,
    /// Mean retained bits per event for the Bernoulli(1/2) branching
    /// baseline under the same von Neumann pairing: 1 raw bit per event,
    /// retention probability 1/2 per bit pair ⇒ 0.25 in expectation.
    pub branching_bits_per_pair: f64,
}

/// Simulates both generators over `trials` sampling events.
///
/// The Boson side uses a fixed Haar unitary at (m, n) with input
/// |1…1 0…0⟩; the branching baseline emits one fair raw bit per event.
/// Both feed non-overlapping consecutive von Neumann pairs; odd trailing
/// events are dropped. `n = 0` is degenerate but legal here: the vacuum
/// gives identical all-dark clicks, every pair discards, and the rate is 0.
pub fn rate_comparison(m: usize, n: usize, trials: usize, seed: u64) -> Result<RateComparison> {
    if m == 0 {
        return Err(Error::Dimension("rate comparison requires m >= 1".into()));
    }
    if n > m {
        return Err(Error::Domain(format!(
            "input |1…1 0…0⟩ needs n ≤ m, got n = {n}, m = {m}"
        )));
    }
    if trials < 2 {
        return Err(Error::Domain(
            "need at least 2 trials to form a pair".into(),
        ));
    }

    // Boson generator.
    let u = haar_random_unitary(m, derive_seed(seed, "rate_boson_unitary", 0))?;
    let mut occ = vec![0usize; m];
    for slot in occ.iter_mut().take(n) {
        *slot = 1;
    }
    let input = FockState::new(occ);
    let dist = full_distribution(&u, &input)?;
    let sampler = CdfSampler::new(&dist);
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "rate_boson_samples", 0));
    let pairs = trials / 2;
    let mut boson_retained = 0usize;
    for _ in 0..pairs {
        let s1 = to_clicks(sampler.draw(&mut rng));
        let s2 = to_clicks(sampler.draw(&mut rng));
        boson_retained += von_neumann_extract(&s1, &s2)?
            .iter()
            .filter(|c| c.is_some())
            .count();
    }

    // Branching-path baseline: one fair raw bit per event.
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "rate_branching", 0));
    let mut branching_retained = 0usize;
    for _ in 0..pairs {
        let b1: bool = rng.gen();
        let b2: bool = rng.gen();
        if b1 != b2 {
            branching_retained += 1;
        }
    }

    Ok(RateComparison {
        modes: m,
        photons: n,
        trials,
        boson_bits_per_pair: boson_retained as f64 / trials as f64,
        branching_bits_per_pair: branching_retained as f64 / trials as f64,
    })
}

// ---------------------------------------------------------------------------
// Bit file I/O
// ---------------------------------------------------------------------------

/// Packs bits MSB-first into bytes, zero-padding the final byte.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &bit) in bits.iter().enumerate() {
        if bit {
            bytes[i / 8] |= 0x80 >> (i % 8);
        }
    }
    bytes
}

/// Unpacks `bit_count` bits from MSB-first packed bytes (all `len·8` bits
/// when `bit_count` is `None`).
pub fn unpack_bits(bytes: &[u8], bit_count: Option<usize>) -> Result<Vec<bool>> {
    let available = bytes.len() * 8;
    let count = bit_count.unwrap_or(available);
    if count > available {
        return Err(Error::Domain(format!(
            "requested {count} bits but the file holds only {available}"
        )));
    }
    Ok((0..count)
        .map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0)
        .collect())
}

/// Writes bits in the packed format.
pub fn write_bits_packed(path: &Path, bits: &[bool]) -> Result<()> {
    std::fs::write(path, pack_bits(bits))?;
    Ok(())
}

/// Reads packed bits (see `unpack_bits` for `bit_count`).
pub fn read_bits_packed(path: &Path, bit_count: Option<usize>) -> Result<Vec<bool>> {
    unpack_bits(&std::fs::read(path)?, bit_count)
}

/// Writes bits as ASCII '0'/'1' characters with a trailing newline.
pub fn write_bits_ascii(path: &Path, bits: &[bool]) -> Result<()> {
    let mut text = String::with_capacity(bits.len() + 1);
    for &bit in bits {
        text.push(if bit { '1' } else { '0' });
    }
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads ASCII bits, ignoring whitespace; any other character is an error.
pub fn read_bits_ascii(path: &Path) -> Result<Vec<bool>> {
    let text = std::fs::read_to_string(path)?;
    let mut bits = Vec::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '0' => bits.push(false),
            '1' => bits.push(true),
            c if c.is_whitespace() => {}
            other => {
                return Err(Error::Domain(format!(
                    "unexpected character {other:?} in ASCII bit file"
                )))
            }
        }
    }
    Ok(bits)
}
