//! Fock states, exact Boson-sampling output distributions, seeded sampling,
//! and collision statistics.
//!
//! The output probability of scattering `input → output` through an m-mode
//! unitary U is
//!
//! ```text
//! P = |Per(U_sub)|² / (∏_i j_i! · ∏_i g_i!)
//! ```
//!
//! with `U_sub` the occupation-indexed submatrix and j/g the input/output
//! occupations. Distributions are built by exact enumeration of the full
//! output space (no Monte-Carlo estimation), normalized at build time, and
//! sampled by inverse CDF over the lexicographically ordered state list so
//! that sampling is reproducible bit-for-bit per seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{is_unitary, scattering_submatrix, ComplexMatrix};
use crate::permanent::permanent_ryser;

/// Hard cap on the enumerated output-state count.
pub const MAX_OUTPUT_STATES: u128 = 1_000_000;

/// Unitarity tolerance required of matrices fed to distribution builders.
/// Loose enough to admit five-decimal published matrices, tight enough to
/// reject anything structurally non-unitary.
pub const DISTRIBUTION_UNITARITY_TOL: f64 = 1e-3;

/// Tolerance on the normalized distribution's total probability.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Photon occupation numbers per mode, `|j₁ j₂ … j_m⟩`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState {
    occupations: Vec<usize>,
}

impl FockState {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self { occupations }
    }

    pub fn occupations(&self) -> &[usize] {
        &self.occupations
    }

    /// Mode count m.
    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    /// Total photon number n.
    pub fn total_photons(&self) -> usize {
        self.occupations.iter().sum()
    }

    /// True iff no mode holds more than one photon.
    pub fn is_collision_free(&self) -> bool {
        self.occupations.iter().all(|&j| j <= 1)
    }

    /// Mode index of each photon in mode order, with multiplicity:
    /// |2,0,1⟩ → [0, 0, 2].
    pub fn expanded_mode_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total_photons());
        for (mode, &j) in self.occupations.iter().enumerate() {
            out.extend(std::iter::repeat_n(mode, j));
        }
        out
    }

    /// Product of occupation factorials, ∏ j_i!.
    fn occupation_factorial(&self) -> f64 {
        self.occupations
            .iter()
            .map(|&j| (1..=j).map(|k| k as f64).product::<f64>())
            .product()
    }
}

impl fmt::Display for FockState {
    /// Renders as a comma-separated occupation string, e.g. `1,1,0,0,0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.occupations.iter().map(|j| j.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for FockState {
    type Err = Error;

    /// Parses a comma-separated occupation string, e.g. `1,1,0,0,0`.
    fn from_str(s: &str) -> Result<Self> {
        let occupations = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Domain(format!("bad occupation {part:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if occupations.is_empty() {
            return Err(Error::Domain("empty occupation string".into()));
        }
        Ok(Self::new(occupations))
    }
}

/// C(m+n−1, n) without overflow for the sizes the guard admits.
fn output_state_count(m: usize, n: usize) -> u128 {
    // Multiplicative binomial evaluation, exact in u128 for any count that
    // could pass the 1e6 guard.
    let mut count: u128 = 1;
    for k in 1..=n as u128 {
        count = count * (m as u128 - 1 + k) / k;
        if count > MAX_OUTPUT_STATES * 1000 {
            return count; // already hopeless; avoid overflow on huge inputs
        }
    }
    count
}

/// All occupation vectors of length m summing to n, in ascending
/// lexicographic order. Guards the state count at 10⁶.
pub fn enumerate_outputs(m: usize, n: usize) -> Result<Vec<FockState>> {
    if m == 0 {
        return Err(Error::Dimension("enumerate_outputs requires m >= 1".into()));
    }
    let count = output_state_count(m, n);
    if count > MAX_OUTPUT_STATES {
        return Err(Error::SizeLimit(format!(
            "C({}, {n}) = {count} output states exceeds the cap of {MAX_OUTPUT_STATES}",
            m + n - 1
        )));
    }
    let mut states = Vec::with_capacity(count as usize);
    let mut prefix = Vec::with_capacity(m);
    fn recurse(m: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<FockState>) {
        if prefix.len() == m - 1 {
            prefix.push(remaining);
            out.push(FockState::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for j in 0..=remaining {
            prefix.push(j);
            recurse(m, remaining - j, prefix, out);
            prefix.pop();
        }
    }
    recurse(m, n, &mut prefix, &mut states);
    Ok(states)
}

/// Exact transition probability `input → output` through U (unnormalized by
/// any published-matrix truncation; see `full_distribution` for the
/// normalized ensemble view).
pub fn output_probability(u: &ComplexMatrix, input: &FockState, output: &FockState) -> Result<f64> {
    let n = input.total_photons();
    if output.total_photons() != n {
        return Err(Error::Domain(format!(
            "photon-number mismatch: input carries {}, output {}",
            n,
            output.total_photons()
        )));
    }
    if n == 0 {
        // Vacuum in, vacuum out: the only output state, with certainty.
        return Ok(1.0);
    }
    let sub = scattering_submatrix(u, input, output)?;
    let per = permanent_ryser(&sub)?;
    Ok(per.norm_sqr() / (input.occupation_factorial() * output.occupation_factorial()))
}

/// Exact output distribution: every output state with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    input: FockState,
    unitary_id: String,
    entries: Vec<(FockState, f64)>,
}

impl OutputDistribution {
    /// Assembles a distribution from explicit entries, checking
    /// non-negativity and normalization (Σp within 1e-9 of 1).
    pub fn from_entries(
        input: FockState,
        unitary_id: String,
        entries: Vec<(FockState, f64)>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain(
                "distribution needs at least one entry".into(),
            ));
        }
        // `!(p >= 0.0)` rather than `p < 0.0`: NaN must fail the guard.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if let Some((state, p)) = entries.iter().find(|(_, p)| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::Domain(format!(
                "probability {p} of state {state} is not a finite non-negative value"
            )));
        }
        let total: f64 = entries.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NumericalIntegrity(format!(
                "probabilities sum to {total}, expected 1 within {NORMALIZATION_TOL}"
            )));
        }
        Ok(Self {
            input,
            unitary_id,
            entries,
        })
    }

    pub fn input(&self) -> &FockState {
        &self.input
    }

    /// Content hash of the unitary the distribution was built from.
    pub fn unitary_id(&self) -> &str {
        &self.unitary_id
    }

    pub fn entries(&self) -> &[(FockState, f64)] {
        &self.entries
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|(_, p)| *p)
    }

    /// Probability of one state (0 if absent from the support).
    pub fn probability_of(&self, state: &FockState) -> f64 {
        self.entries
            .iter()
            .find(|(s, _)| s == state)
            .map_or(0.0, |(_, p)| *p)
    }

    /// Mode count of the underlying states.
    pub fn modes(&self) -> usize {
        self.input.modes()
    }

    /// Total probability of states where any mode holds ≥ 2 photons.
    pub fn multi_occupancy_probability(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(s, _)| !s.is_collision_free())
            .map(|(_, p)| p)
            .sum()
    }

    /// `count` i.i.d. draws by inverse CDF, deterministic per seed.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<FockState> {
        let sampler = CdfSampler::new(self);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..count).map(|_| sampler.draw(&mut rng).clone()).collect()
    }

    /// Renders the distribution as CSV (`state,probability`, one row per
    /// state, occupation strings quoted because they contain commas).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("state,probability\n");
        for (state, p) in &self.entries {
            out.push_str(&format!("\"{state}\",{p}\n"));
        }
        out
    }

    /// Writes the CSV rendering to a file.
    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

/// Precomputed CDF for repeated inverse-CDF draws from one distribution.
pub struct CdfSampler<'a> {
    dist: &'a OutputDistribution,
    cdf: Vec<f64>,
}

impl<'a> CdfSampler<'a> {
    pub fn new(dist: &'a OutputDistribution) -> Self {
        let mut acc = 0.0;
        let cdf = dist
            .entries
            .iter()
            .map(|(_, p)| {
                acc += p;
                acc
            })
            .collect();
        Self { dist, cdf }
    }

    /// One inverse-CDF draw: the first state whose cumulative probability
    /// exceeds a uniform variate (clamped to the last state against
    /// floating-point shortfall at the top of the CDF).
    pub fn draw<R: Rng>(&self, rng: &mut R) -> &'a FockState {
        let u: f64 = rng.gen();
        let idx = self
            .cdf
            .partition_point(|&c| c <= u)
            .min(self.dist.entries.len() - 1);
        &self.dist.entries[idx].0
    }
}

/// Builds the complete normalized output distribution of `input` through
/// `u`, entries in ascending lexicographic state order.
///
/// The raw probabilities are divided by their total at build time: for an
/// exactly unitary matrix the total is 1 to machine precision, while
/// published matrices truncated to a few decimals (unitary only to ~1e-5)
/// get their truncation deficit absorbed here. Matrices further than 1e-3
/// from unitary are rejected up front as out of domain.
pub fn full_distribution(u: &ComplexMatrix, input: &FockState) -> Result<OutputDistribution> {
    if input.modes() != u.rows() {
        return Err(Error::Dimension(format!(
            "input over {} modes does not match a {}x{} matrix",
            input.modes(),
            u.rows(),
            u.cols()
        )));
    }
    if !is_unitary(u, DISTRIBUTION_UNITARITY_TOL)? {
        return Err(Error::Domain(format!(
            "matrix is not unitary within {DISTRIBUTION_UNITARITY_TOL}"
        )));
    }
    let states = enumerate_outputs(input.modes(), input.total_photons())?;
    let mut raw = Vec::with_capacity(states.len());
    for state in &states {
        raw.push(output_probability(u, input, state)?);
    }
    let total: f64 = raw.iter().sum();
    // `!(total > 0.0)` rather than `total <= 0.0`: NaN must fail the guard.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(total > 0.0) {
        return Err(Error::NumericalIntegrity(
            "raw output probabilities sum to zero".into(),
        ));
    }
    let entries: Vec<(FockState, f64)> = states
        .into_iter()
        .zip(raw.into_iter().map(|p| p / total))
        .collect();
    // from_entries re-checks normalization; after dividing by the total it
    // can only fail on pathological floating-point trouble.
    OutputDistribution::from_entries(input.clone(), u.content_hash(), entries)
}

/// Total probabilities of collision-free vs multi-occupancy outputs:
/// `(p_single, p_multi)` with `p_single = 1 − p_multi`.
pub fn collision_statistics(u: &ComplexMatrix, input: &FockState) -> Result<(f64, f64)> {
    let dist = full_distribution(u, input)?;
    let p_multi = dist.multi_occupancy_probability();
    Ok((1.0 - p_multi, p_multi))
}

/// Restricts a distribution to collision-free outputs and renormalizes,
/// emulating coincidence recording with non-number-resolving detectors.
pub fn postselect_collision_free(dist: &OutputDistribution) -> Result<OutputDistribution> {
    let kept: Vec<(FockState, f64)> = dist
        .entries
        .iter()
        .filter(|(s, _)| s.is_collision_free())
        .cloned()
        .collect();
    let total: f64 = kept.iter().map(|(_, p)| p).sum();
    // `!(total > 0.0)` rather than `total <= 0.0`: NaN must fail the guard.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(total > 0.0) {
        return Err(Error::Domain(
            "no collision-free output carries probability; cannot postselect".into(),
        ));
    }
    let entries = kept.into_iter().map(|(s, p)| (s, p / total)).collect();
    OutputDistribution::from_entries(dist.input.clone(), dist.unitary_id.clone(), entries)
}

/// Writes a sample log: one occupation string per line.
pub fn write_sample_log(path: &Path, samples: &[FockState]) -> Result<()> {
    let mut out = String::new();
    for s in samples {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::reference_u5;
    use crate::linalg::haar_random_unitary;

    fn state(occ: &[usize]) -> FockState {
        FockState::new(occ.to_vec())
    }

    /// Raw (pre-normalization) probabilities of the reference five-mode
    /// unitary with input |1,1,0,0,0⟩, in ascending lexicographic state
    /// order, frozen from an independent permutation-sum evaluation. Their
    /// sum is 0.9999974288969585 (five-decimal truncation deficit).
    const U5_RAW_PROBS: [(&str, f64); 15] = [
        ("0,0,0,0,2", 0.015800393373),
        ("0,0,0,1,1", 0.011287874185),
        ("0,0,0,2,0", 0.028602597731),
        ("0,0,1,0,1", 0.088173638100),
        ("0,0,1,1,0", 0.075247889645),
        ("0,0,2,0,0", 0.070959025209),
        ("0,1,0,0,1", 0.023019345849),
        ("0,1,0,1,0", 0.024657772434),
        ("0,1,1,0,0", 0.129647137765),
        ("0,2,0,0,0", 0.058956752669),
        ("1,0,0,0,1", 0.075001461596),
        ("1,0,0,1,0", 0.219937020033),
        ("1,0,1,0,0", 0.004147180660),
        ("1,1,0,0,0", 0.072774757185),
        ("2,0,0,0,0", 0.101784582463),
    ];

    #[test]
    fn occupation_string_round_trip() {
        let s: FockState = "1,1,0,0,0".parse().unwrap();
        assert_eq!(s, state(&[1, 1, 0, 0, 0]));
        assert_eq!(s.to_string(), "1,1,0,0,0");
        assert!("1,-1,0".parse::<FockState>().is_err());
        assert!("".parse::<FockState>().is_err());
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let two_modes = enumerate_outputs(2, 1).unwrap();
        assert_eq!(two_modes, vec![state(&[0, 1]), state(&[1, 0])]);

        let states = enumerate_outputs(5, 2).unwrap();
        assert_eq!(states.len(), 15);
        assert!(states.windows(2).all(|w| w[0] < w[1]));
        assert!(states.iter().all(|s| s.total_photons() == 2));

        let vacuum = enumerate_outputs(3, 0).unwrap();
        assert_eq!(vacuum, vec![state(&[0, 0, 0])]);
    }

    #[test]
    fn enumeration_guard_rejects_huge_spaces() {
        // C(59, 30) is astronomically past the 1e6-state cap.
        assert!(matches!(
            enumerate_outputs(30, 30),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn identity_network_preserves_occupations() {
        let id = ComplexMatrix::identity(5).unwrap();
        let input = state(&[1, 1, 0, 0, 0]);
        assert!((output_probability(&id, &input, &input).unwrap() - 1.0).abs() < 1e-12);
        let moved = state(&[0, 1, 1, 0, 0]);
        assert!(output_probability(&id, &input, &moved).unwrap().abs() < 1e-12);
    }

    #[test]
    fn reference_unitary_probabilities_match_the_oracle() {
        let u = reference_u5();
        let input = state(&[1, 1, 0, 0, 0]);
        let raw_total: f64 = U5_RAW_PROBS.iter().map(|(_, p)| p).sum();
        let dist = full_distribution(&u, &input).unwrap();
        assert_eq!(dist.entries().len(), 15);
        for (text, raw) in U5_RAW_PROBS {
            let s: FockState = text.parse().unwrap();
            let expected = raw / raw_total;
            let got = dist.probability_of(&s);
            assert!(
                (got - expected).abs() < 1e-9,
                "state {text}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn distributions_normalize_to_one() {
        let u = reference_u5();
        let dist = full_distribution(&u, &state(&[1, 1, 0, 0, 0])).unwrap();
        let total: f64 = dist.probabilities().sum();
        assert!((total - 1.0).abs() <= NORMALIZATION_TOL);

        let h = haar_random_unitary(4, 123).unwrap();
        let dist = full_distribution(&h, &state(&[1, 1, 0, 0])).unwrap();
        assert_eq!(dist.entries().len(), 10);
        let total: f64 = dist.probabilities().sum();
        assert!((total - 1.0).abs() <= NORMALIZATION_TOL);
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let ones =
            ComplexMatrix::new(2, 2, vec![num_complex::Complex64::new(1.0, 0.0); 4]).unwrap();
        assert!(matches!(
            full_distribution(&ones, &state(&[1, 0])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn identity_distribution_is_a_point_mass() {
        let id = ComplexMatrix::identity(5).unwrap();
        let input = state(&[1, 1, 0, 0, 0]);
        let dist = full_distribution(&id, &input).unwrap();
        assert!((dist.probability_of(&input) - 1.0).abs() < 1e-12);
        let samples = dist.sample(100, 7);
        assert!(samples.iter().all(|s| *s == input));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let u = reference_u5();
        let dist = full_distribution(&u, &state(&[1, 1, 0, 0, 0])).unwrap();
        let a = dist.sample(1000, 99);
        let b = dist.sample(1000, 99);
        assert_eq!(a, b);
        let c = dist.sample(1000, 100);
        assert_ne!(a, c);
    }

    #[test]
    fn sample_frequencies_track_probabilities() {
        let u = reference_u5();
        let dist = full_distribution(&u, &state(&[1, 1, 0, 0, 0])).unwrap();
        let n = 200_000;
        let samples = dist.sample(n, 4242);
        for (s, p) in dist.entries() {
            let count = samples.iter().filter(|x| *x == s).count() as f64;
            let freq = count / n as f64;
            let bound = 4.0 * (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (freq - p).abs() <= bound,
                "state {s}: freq {freq} vs p {p} (4σ = {bound})"
            );
        }
    }

    #[test]
    fn collision_statistics_identity_and_single_photon() {
        let id = ComplexMatrix::identity(5).unwrap();
        let (p_single, p_multi) = collision_statistics(&id, &state(&[1, 1, 0, 0, 0])).unwrap();
        assert_eq!(p_multi, 0.0);
        assert_eq!(p_single, 1.0);

        let u = haar_random_unitary(5, 8).unwrap();
        let (_, p_multi) = collision_statistics(&u, &state(&[1, 0, 0, 0, 0])).unwrap();
        assert!(p_multi.abs() < 1e-12, "one photon cannot collide");
    }

    #[test]
    fn postselection_keeps_collision_free_states_only() {
        let u = reference_u5();
        let dist = full_distribution(&u, &state(&[1, 1, 0, 0, 0])).unwrap();
        let post = postselect_collision_free(&dist).unwrap();
        assert_eq!(post.entries().len(), 10); // C(5,2) collision-free states
        assert!(post.entries().iter().all(|(s, _)| s.is_collision_free()));
        let total: f64 = post.probabilities().sum();
        assert!((total - 1.0).abs() <= NORMALIZATION_TOL);
        // Relative weights preserved: check one ratio.
        let a: FockState = "1,0,0,1,0".parse().unwrap();
        let b: FockState = "0,1,1,0,0".parse().unwrap();
        let before = dist.probability_of(&a) / dist.probability_of(&b);
        let after = post.probability_of(&a) / post.probability_of(&b);
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn csv_rendering_quotes_states() {
        let u = ComplexMatrix::identity(3).unwrap();
        let dist = full_distribution(&u, &state(&[1, 0, 0])).unwrap();
        let csv = dist.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("state,probability"));
        assert!(csv.contains("\"1,0,0\",1"));
    }

    #[test]
    fn permutation_covariance_of_the_distribution() {
        // Permuting U's rows by σ permutes the output states by σ with
        // identical probabilities.
        let u = haar_random_unitary(4, 21).unwrap();
        let input = state(&[1, 1, 0, 0]);
        let dist = full_distribution(&u, &input).unwrap();

        // σ = reverse the four modes.
        let m = 4;
        let mut entries = Vec::with_capacity(m * m);
        for r in 0..m {
            for c in 0..m {
                entries.push(u.get(m - 1 - r, c));
            }
        }
        let permuted = ComplexMatrix::new(m, m, entries).unwrap();
        let dist_p = full_distribution(&permuted, &input).unwrap();

        for (s, p) in dist.entries() {
            let reversed = FockState::new(s.occupations().iter().rev().cloned().collect());
            let q = dist_p.probability_of(&reversed);
            assert!((p - q).abs() < 1e-12, "state {s} → {reversed}: {p} vs {q}");
        }
    }

    #[test]
    fn exchange_symmetry_over_identical_occupations() {
        // The probability must not depend on any hidden ordering of the
        // photons within equal occupations: exchanging the two duplicated
        // columns of the scattering submatrix (both photons of a
        // double-occupied input mode) leaves the permanent unchanged.
        use crate::linalg::scattering_submatrix;
        use crate::permanent::permanent_ryser;

        let u = haar_random_unitary(5, 33).unwrap();
        let input = state(&[2, 1, 0, 0, 0]);
        let output = state(&[1, 1, 1, 0, 0]);
        let sub = scattering_submatrix(&u, &input, &output).unwrap();
        // Swap columns 0 and 1 (the two photons of mode 0).
        let n = sub.rows();
        let mut entries = sub.entries().to_vec();
        for r in 0..n {
            entries.swap(r * n, r * n + 1);
        }
        let swapped = ComplexMatrix::new(n, n, entries).unwrap();
        let a = permanent_ryser(&sub).unwrap();
        let b = permanent_ryser(&swapped).unwrap();
        assert!((a - b).norm() < 1e-14);
        let p = output_probability(&u, &input, &output).unwrap();
        assert!(
            (p - a.norm_sqr() / 2.0).abs() < 1e-15,
            "∏j! = 2 for |2,1,0,0,0⟩"
        );
    }
}
