//! Statistical randomness test battery.
//!
//! Nine tests of the NIST SP 800-22 suite — frequency (monobit), block
//! frequency, runs, longest run of ones, cumulative sums, DFT spectral,
//! serial, approximate entropy, and binary matrix rank — each producing one
//! or more p-values and a pass/fail verdict at significance level
//! [`ALPHA`] = 0.01.
//!
//! Every public test function validates the standard's minimum input length
//! and returns [`Error::InsufficientData`] when the stream is too short;
//! [`run_battery`] runs all nine with their default parameters and reports
//! too-short inputs inline as skipped results instead of failing the whole
//! batch. The underlying statistics are computed by private `*_core`
//! functions so the unit tests can evaluate the standard's short worked
//! examples without the length guards.

mod special;

pub use special::{erfc, gamma_p, gamma_q, ln_gamma, normal_cdf};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Significance level: a test passes iff every reported p-value is ≥ 0.01.
pub const ALPHA: f64 = 0.01;

/// Default block length for the block-frequency test (standard
/// recommendation for 10⁶-bit streams).
pub const DEFAULT_BLOCK_LEN: usize = 128;

/// Default pattern length for the serial test at 10⁶ bits.
pub const DEFAULT_SERIAL_LEN: usize = 16;

/// Default pattern length for the approximate-entropy test at 10⁶ bits.
pub const DEFAULT_APEN_LEN: usize = 10;

/// Binary matrix rank test works on square matrices of this dimension.
pub const MATRIX_DIM: usize = 32;

/// Outcome of a single statistical test.
///
/// `passed` is true iff the test actually ran and every reported p-value is
/// ≥ [`ALPHA`]. A test that could not run (too few bits for its minimum, or
/// a failed prerequisite) reports `passed = false` with an explanatory
/// `note`; a skipped test additionally has an empty `p_values` list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    /// Test identifier, e.g. `"frequency_monobit"`.
    #[serde(rename = "test")]
    pub test_name: String,
    /// One p-value for most tests; two for cumulative sums
    /// (forward/backward) and serial; empty if the test was skipped.
    pub p_values: Vec<f64>,
    /// Verdict at significance level [`ALPHA`].
    pub passed: bool,
    /// Length of the input stream the test was offered.
    pub n_bits: usize,
    /// Diagnostic context: skip reason, failed prerequisite, or a
    /// processing detail such as DFT input truncation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TestResult {
    fn new(test_name: &str, p_values: Vec<f64>, n_bits: usize, note: Option<String>) -> Self {
        for &p in &p_values {
            debug_assert!(
                p.is_finite() && (-1e-9..=1.0 + 1e-9).contains(&p),
                "{test_name} produced p-value {p} outside [0, 1]"
            );
        }
        let p_values: Vec<f64> = p_values.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        let passed = !p_values.is_empty() && p_values.iter().all(|&p| p >= ALPHA);
        TestResult {
            test_name: test_name.to_string(),
            p_values,
            passed,
            n_bits,
            note,
        }
    }

    fn skipped(test_name: &str, n_bits: usize, reason: String) -> Self {
        TestResult {
            test_name: test_name.to_string(),
            p_values: Vec::new(),
            passed: false,
            n_bits,
            note: Some(reason),
        }
    }

    /// True when the test did not run at all (no p-values reported).
    pub fn was_skipped(&self) -> bool {
        self.p_values.is_empty()
    }
}

fn require_bits(test_name: &str, n: usize, minimum: usize) -> Result<()> {
    if n < minimum {
        return Err(Error::InsufficientData(format!(
            "{test_name} requires at least {minimum} bits, got {n}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Frequency (monobit)
// ---------------------------------------------------------------------------

/// Frequency (monobit) test: p = erfc(|S_n| / √(2n)) where S_n is the ±1
/// partial sum. Requires n ≥ 100.
pub fn frequency_monobit(bits: &[bool]) -> Result<TestResult> {
    require_bits("frequency_monobit", bits.len(), 100)?;
    Ok(monobit_core(bits))
}

fn monobit_core(bits: &[bool]) -> TestResult {
    let n = bits.len();
    let sum: i64 = bits.iter().map(|&b| if b { 1i64 } else { -1 }).sum();
    let p = erfc(sum.abs() as f64 / (2.0 * n as f64).sqrt());
    TestResult::new("frequency_monobit", vec![p], n, None)
}

// ---------------------------------------------------------------------------
// Block frequency
// ---------------------------------------------------------------------------

/// Frequency test within a block: chi-square of the per-block ones
/// proportions against 1/2. Requires n ≥ 100 and block_len ≥ 20.
pub fn block_frequency(bits: &[bool], block_len: usize) -> Result<TestResult> {
    require_bits("block_frequency", bits.len(), 100)?;
    if block_len < 20 {
        return Err(Error::InsufficientData(format!(
            "block_frequency requires block_len >= 20, got {block_len}"
        )));
    }
    Ok(block_frequency_core(bits, block_len))
}

fn block_frequency_core(bits: &[bool], block_len: usize) -> TestResult {
    let n = bits.len();
    let n_blocks = n / block_len;
    let mut chi2 = 0.0;
    for block in bits.chunks_exact(block_len) {
        let ones = block.iter().filter(|&&b| b).count();
        let pi = ones as f64 / block_len as f64;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * block_len as f64;
    let p = gamma_q(n_blocks as f64 / 2.0, chi2 / 2.0);
    TestResult::new("block_frequency", vec![p], n, None)
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

/// Runs test: total number of maximal same-bit runs against its expectation
/// under independence. Requires n ≥ 100. A ones fraction outside the
/// monobit prerequisite band |π − 1/2| < 2/√n is reported as a failed
/// result with a note (per the standard), not as an error.
pub fn runs(bits: &[bool]) -> Result<TestResult> {
    require_bits("runs", bits.len(), 100)?;
    Ok(runs_core(bits))
}

fn runs_core(bits: &[bool]) -> TestResult {
    let n = bits.len();
    let ones = bits.iter().filter(|&&b| b).count();
    let pi = ones as f64 / n as f64;
    let tau = 2.0 / (n as f64).sqrt();
    if (pi - 0.5).abs() >= tau {
        return TestResult::new(
            "runs",
            vec![0.0],
            n,
            Some(format!(
                "ones fraction {pi:.4} fails the frequency prerequisite |π − 1/2| < {tau:.4}"
            )),
        );
    }
    let v = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let expected = 2.0 * n as f64 * pi * (1.0 - pi);
    let denom = 2.0 * (2.0 * n as f64).sqrt() * pi * (1.0 - pi);
    let p = erfc((v as f64 - expected).abs() / denom);
    TestResult::new("runs", vec![p], n, None)
}

// ---------------------------------------------------------------------------
// Longest run of ones
// ---------------------------------------------------------------------------

/// Longest-run-of-ones test: chi-square over the per-block longest-run
/// category counts, with the standard's tabulated class probabilities for
/// the applicable regime (block length 8, 128, or 10⁴). Requires n ≥ 128.
pub fn longest_run_of_ones(bits: &[bool]) -> Result<TestResult> {
    require_bits("longest_run_of_ones", bits.len(), 128)?;
    Ok(longest_run_core(bits))
}

fn longest_run_core(bits: &[bool]) -> TestResult {
    let n = bits.len();
    // (block length, lowest class, highest class, class probabilities).
    let (block_len, lo, hi, class_probs): (usize, usize, usize, &[f64]) = if n < 6272 {
        (8, 1, 4, &[0.2148, 0.3672, 0.2305, 0.1875])
    } else if n < 750_000 {
        (128, 4, 9, &[0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124])
    } else {
        (
            10_000,
            10,
            16,
            &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
        )
    };
    let n_blocks = n / block_len;
    let mut nu = vec![0usize; hi - lo + 1];
    for block in bits.chunks_exact(block_len).take(n_blocks) {
        let mut longest = 0usize;
        let mut run = 0usize;
        for &b in block {
            run = if b { run + 1 } else { 0 };
            longest = longest.max(run);
        }
        nu[longest.clamp(lo, hi) - lo] += 1;
    }
    let mut chi2 = 0.0;
    for (&count, &prob) in nu.iter().zip(class_probs) {
        let expected = n_blocks as f64 * prob;
        chi2 += (count as f64 - expected) * (count as f64 - expected) / expected;
    }
    let dof = (hi - lo) as f64;
    let p = gamma_q(dof / 2.0, chi2 / 2.0);
    TestResult::new("longest_run_of_ones", vec![p], n, None)
}

// ---------------------------------------------------------------------------
// Cumulative sums
// ---------------------------------------------------------------------------

/// Cumulative sums test: the maximum excursion of the ±1 random walk,
/// evaluated both forward and backward (two p-values). Requires n ≥ 100.
pub fn cumulative_sums(bits: &[bool]) -> Result<TestResult> {
    require_bits("cumulative_sums", bits.len(), 100)?;
    Ok(cumulative_sums_core(bits))
}

fn cumulative_sums_core(bits: &[bool]) -> TestResult {
    let n = bits.len();
    let forward = cusum_p_value(n, max_excursion(bits.iter().copied()));
    let backward = cusum_p_value(n, max_excursion(bits.iter().rev().copied()));
    TestResult::new("cumulative_sums", vec![forward, backward], n, None)
}

fn max_excursion(bits: impl Iterator<Item = bool>) -> i64 {
    let mut sum = 0i64;
    let mut max_abs = 0i64;
    for b in bits {
        sum += if b { 1 } else { -1 };
        max_abs = max_abs.max(sum.abs());
    }
    max_abs
}

/// Two-sided excursion p-value for max |partial sum| = z over n steps,
/// via the standard's normal-CDF series.
fn cusum_p_value(n: usize, z: i64) -> f64 {
    debug_assert!(z >= 1, "a nonempty ±1 walk has max excursion >= 1");
    let n = n as f64;
    let z = z as f64;
    let sqrt_n = n.sqrt();
    let k_hi = ((n / z - 1.0) / 4.0).floor() as i64;

    let mut term1 = 0.0;
    let k_lo1 = ((-n / z + 1.0) / 4.0).floor() as i64;
    for k in k_lo1..=k_hi {
        let k = k as f64;
        term1 +=
            normal_cdf((4.0 * k + 1.0) * z / sqrt_n) - normal_cdf((4.0 * k - 1.0) * z / sqrt_n);
    }

    let mut term2 = 0.0;
    let k_lo2 = ((-n / z - 3.0) / 4.0).floor() as i64;
    for k in k_lo2..=k_hi {
        let k = k as f64;
        term2 +=
            normal_cdf((4.0 * k + 3.0) * z / sqrt_n) - normal_cdf((4.0 * k + 1.0) * z / sqrt_n);
    }

    1.0 - term1 + term2
}

// ---------------------------------------------------------------------------
// DFT (spectral)
// ---------------------------------------------------------------------------

/// DFT (spectral) test: the proportion of Fourier magnitudes below the
/// threshold h = √(n·ln(1/0.05)) is compared to the expected 95% via a
/// normal approximation. Requires n ≥ 1000.
///
/// The transform is an iterative radix-2 FFT, so when n is not a power of
/// two the input is truncated to the largest power of two ≤ n; the
/// truncation is recorded in the result's `note`.
pub fn dft_spectral(bits: &[bool]) -> Result<TestResult> {
    require_bits("dft_spectral", bits.len(), 1000)?;
    Ok(dft_core(bits))
}

fn dft_core(bits: &[bool]) -> TestResult {
    let n = bits.len();
    let n2 = if n.is_power_of_two() {
        n
    } else {
        largest_power_of_two_below(n)
    };
    let mut buf: Vec<Complex64> = bits[..n2]
        .iter()
        .map(|&b| Complex64::new(if b { 1.0 } else { -1.0 }, 0.0))
        .collect();
    fft_in_place(&mut buf);

    let threshold = (n2 as f64 * (1.0 / 0.05f64).ln()).sqrt();
    let below = buf[..n2 / 2]
        .iter()
        .filter(|x| x.norm() < threshold)
        .count();
    let expected = 0.95 * n2 as f64 / 2.0;
    let d = (below as f64 - expected) / (n2 as f64 * 0.95 * 0.05 / 4.0).sqrt();
    let p = erfc(d.abs() / std::f64::consts::SQRT_2);

    let note = (n2 != n).then(|| format!("transform computed on the leading {n2} of {n} bits"));
    TestResult::new("dft_spectral", vec![p], n, note)
}

fn largest_power_of_two_below(n: usize) -> usize {
    debug_assert!(n >= 1);
    1 << (usize::BITS - 1 - n.leading_zeros())
}

/// In-place iterative radix-2 Cooley–Tukey FFT. Length must be a power of
/// two. Only magnitudes are consumed, so the sign convention of the
/// exponent is immaterial.
fn fft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    // Butterfly passes.
    let mut len = 2;
    while len <= n {
        let angle = -2.0 * std::f64::consts::PI / len as f64;
        let w_len = Complex64::new(angle.cos(), angle.sin());
        for chunk in buf.chunks_mut(len) {
            let mut w = Complex64::new(1.0, 0.0);
            let (lower, upper) = chunk.split_at_mut(len / 2);
            for k in 0..len / 2 {
                let u = lower[k];
                let v = upper[k] * w;
                lower[k] = u + v;
                upper[k] = u - v;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}

// ---------------------------------------------------------------------------
// Serial
// ---------------------------------------------------------------------------

/// Serial test: overlapping m-gram frequency statistics ∇ψ²_m and ∇²ψ²_m
/// with incomplete-gamma p-values (two p-values). Requires
/// m_len < ⌊log₂ n⌋ − 2.
pub fn serial(bits: &[bool], m_len: usize) -> Result<TestResult> {
    if m_len == 0 {
        return Err(Error::Domain("serial requires m_len >= 1".into()));
    }
    let floor_log2 = (usize::BITS - 1 - bits.len().leading_zeros()) as usize;
    if bits.is_empty() || m_len + 2 >= floor_log2 {
        return Err(Error::InsufficientData(format!(
            "serial with m_len = {m_len} requires at least 2^{} bits, got {}",
            m_len + 3,
            bits.len()
        )));
    }
    Ok(serial_core(bits, m_len))
}

fn serial_core(bits: &[bool], m_len: usize) -> TestResult {
    let n = bits.len();
    let psi = |order: isize| -> f64 {
        if order <= 0 {
            0.0
        } else {
            psi_squared(bits, order as usize)
        }
    };
    let m = m_len as isize;
    let delta1 = psi(m) - psi(m - 1);
    let delta2 = psi(m) - 2.0 * psi(m - 1) + psi(m - 2);
    let p1 = gamma_q(2f64.powi(m_len as i32 - 2), delta1 / 2.0);
    let p2 = gamma_q(2f64.powi(m_len as i32 - 3), delta2 / 2.0);
    TestResult::new("serial", vec![p1, p2], n, None)
}

/// ψ²_m statistic: (2^m / n) Σ_i c_i² − n over the counts c_i of all
/// overlapping m-grams, with cyclic wraparound.
fn psi_squared(bits: &[bool], m: usize) -> f64 {
    let n = bits.len();
    let mut counts = vec![0u64; 1 << m];
    let mask = (1usize << m) - 1;
    let mut idx = 0usize;
    for i in 0..n + m - 1 {
        idx = ((idx << 1) | bits[i % n] as usize) & mask;
        if i + 1 >= m {
            counts[idx] += 1;
        }
    }
    // Σ c_i = n so Σ c_i² ≤ n², which stays exact in u64 for any
    // realistic stream length.
    let sum_sq: u64 = counts.iter().map(|&c| c * c).sum();
    (1u64 << m) as f64 / n as f64 * sum_sq as f64 - n as f64
}

// ---------------------------------------------------------------------------
// Approximate entropy
// ---------------------------------------------------------------------------

/// Approximate entropy test: ApEn(m) = Φ_m − Φ_{m+1} compared to the
/// expectation ln 2 via a chi-square statistic. Requires
/// m_len < ⌊log₂ n⌋ − 5.
pub fn approximate_entropy(bits: &[bool], m_len: usize) -> Result<TestResult> {
    if m_len == 0 {
        return Err(Error::Domain(
            "approximate_entropy requires m_len >= 1".into(),
        ));
    }
    let floor_log2 = (usize::BITS - 1 - bits.len().leading_zeros()) as usize;
    if bits.is_empty() || m_len + 5 >= floor_log2 {
        return Err(Error::InsufficientData(format!(
            "approximate_entropy with m_len = {m_len} requires at least 2^{} bits, got {}",
            m_len + 6,
            bits.len()
        )));
    }
    Ok(approximate_entropy_core(bits, m_len))
}

fn approximate_entropy_core(bits: &[bool], m_len: usize) -> TestResult {
    let n = bits.len();
    let ap_en = phi_statistic(bits, m_len) - phi_statistic(bits, m_len + 1);
    let chi2 = 2.0 * n as f64 * (std::f64::consts::LN_2 - ap_en);
    let p = gamma_q(2f64.powi(m_len as i32 - 1), chi2 / 2.0);
    TestResult::new("approximate_entropy", vec![p], n, None)
}

/// Φ_m statistic: Σ_i (c_i/n) ln(c_i/n) over overlapping m-gram counts
/// with cyclic wraparound.
fn phi_statistic(bits: &[bool], m: usize) -> f64 {
    let n = bits.len();
    let mut counts = vec![0u64; 1 << m];
    let mask = (1usize << m) - 1;
    let mut idx = 0usize;
    for i in 0..n + m - 1 {
        idx = ((idx << 1) | bits[i % n] as usize) & mask;
        if i + 1 >= m {
            counts[idx] += 1;
        }
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let fraction = c as f64 / n as f64;
            fraction * fraction.ln()
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Binary matrix rank
// ---------------------------------------------------------------------------

/// Binary matrix rank test: GF(2) ranks of disjoint 32×32 matrices,
/// chi-square over the classes {full rank, full − 1, lower} with the
/// asymptotic class probabilities. Requires n ≥ 38 matrices = 38,912 bits.
pub fn binary_matrix_rank(bits: &[bool]) -> Result<TestResult> {
    require_bits(
        "binary_matrix_rank",
        bits.len(),
        38 * MATRIX_DIM * MATRIX_DIM,
    )?;
    Ok(binary_matrix_rank_core(bits))
}

fn binary_matrix_rank_core(bits: &[bool]) -> TestResult {
    let n = bits.len();
    let bits_per_matrix = MATRIX_DIM * MATRIX_DIM;
    let n_matrices = n / bits_per_matrix;
    let mut class_counts = [0usize; 3];
    for matrix_bits in bits.chunks_exact(bits_per_matrix).take(n_matrices) {
        let mut rows = [0u32; MATRIX_DIM];
        for (r, row_bits) in matrix_bits.chunks_exact(MATRIX_DIM).enumerate() {
            let mut word = 0u32;
            for &b in row_bits {
                word = (word << 1) | b as u32;
            }
            rows[r] = word;
        }
        let rank = gf2_rank(rows);
        let class = match rank {
            r if r == MATRIX_DIM => 0,
            r if r == MATRIX_DIM - 1 => 1,
            _ => 2,
        };
        class_counts[class] += 1;
    }
    let probs = rank_class_probabilities();
    let mut chi2 = 0.0;
    for (&count, &prob) in class_counts.iter().zip(&probs) {
        let expected = n_matrices as f64 * prob;
        chi2 += (count as f64 - expected) * (count as f64 - expected) / expected;
    }
    // Three classes, two degrees of freedom.
    let p = gamma_q(1.0, chi2 / 2.0);
    TestResult::new("binary_matrix_rank", vec![p], n, None)
}

/// Rank of a 32×32 bit matrix over GF(2), by forward elimination on u32
/// row words.
fn gf2_rank(mut rows: [u32; MATRIX_DIM]) -> usize {
    let mut rank = 0;
    for col in (0..MATRIX_DIM).rev() {
        if let Some(pivot) = (rank..MATRIX_DIM).find(|&r| rows[r] >> col & 1 == 1) {
            rows.swap(rank, pivot);
            let pivot_row = rows[rank];
            for row in rows.iter_mut().skip(rank + 1) {
                if *row >> col & 1 == 1 {
                    *row ^= pivot_row;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Asymptotic probabilities of the rank classes {32, 31, ≤30} for a random
/// 32×32 matrix over GF(2), from the exact product formula
/// P(rank = r) = 2^{r(64−r)−1024} · Π_{i<r} (1 − 2^{i−32})² / (1 − 2^{i−r}).
pub fn rank_class_probabilities() -> [f64; 3] {
    let class_prob = |r: i32| -> f64 {
        let m = MATRIX_DIM as i32;
        let mut prob = 2f64.powi(r * (2 * m - r) - m * m);
        for i in 0..r {
            let numerator = 1.0 - 2f64.powi(i - m);
            prob *= numerator * numerator / (1.0 - 2f64.powi(i - r));
        }
        prob
    };
    let p_full = class_prob(MATRIX_DIM as i32);
    let p_one_less = class_prob(MATRIX_DIM as i32 - 1);
    [p_full, p_one_less, 1.0 - p_full - p_one_less]
}

// ---------------------------------------------------------------------------
// Battery
// ---------------------------------------------------------------------------

/// Run all nine tests with their default parameters.
///
/// Never fails: a test whose minimum input length is not met is reported
/// inline as a skipped [`TestResult`] (empty p-value list, `passed = false`,
/// reason in `note`).
pub fn run_battery(bits: &[bool]) -> Vec<TestResult> {
    let n = bits.len();
    let or_skip = |name: &str, outcome: Result<TestResult>| -> TestResult {
        outcome.unwrap_or_else(|e| TestResult::skipped(name, n, e.to_string()))
    };
    vec![
        or_skip("frequency_monobit", frequency_monobit(bits)),
        or_skip("block_frequency", block_frequency(bits, DEFAULT_BLOCK_LEN)),
        or_skip("runs", runs(bits)),
        or_skip("longest_run_of_ones", longest_run_of_ones(bits)),
        or_skip("cumulative_sums", cumulative_sums(bits)),
        or_skip("dft_spectral", dft_spectral(bits)),
        or_skip("serial", serial(bits, DEFAULT_SERIAL_LEN)),
        or_skip(
            "approximate_entropy",
            approximate_entropy(bits, DEFAULT_APEN_LEN),
        ),
        or_skip("binary_matrix_rank", binary_matrix_rank(bits)),
    ]
}

/// Aggregate verdict: true iff every test in the battery ran and passed.
pub fn battery_passed(results: &[TestResult]) -> bool {
    !results.is_empty() && results.iter().all(|r| r.passed)
}

/// Render battery results as an aligned plain-text table.
pub fn render_table(results: &[TestResult]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<24} {:<22} verdict\n", "test", "p-value(s)"));
    for r in results {
        let p_col = if r.was_skipped() {
            "-".to_string()
        } else {
            r.p_values
                .iter()
                .map(|p| format!("{p:.6}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let verdict = if r.was_skipped() {
            "skipped"
        } else if r.passed {
            "pass"
        } else {
            "fail"
        };
        out.push_str(&format!("{:<24} {:<22} {}", r.test_name, p_col, verdict));
        if let Some(note) = &r.note {
            out.push_str(&format!("  ({note})"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn b(s: &str) -> Vec<bool> {
        s.chars()
            .map(|c| match c {
                '0' => false,
                '1' => true,
                other => panic!("not a bit: {other}"),
            })
            .collect()
    }

    /// 100-bit expansion used by the standard's worked examples.
    const EPS100: &str = "1100100100001111110110101010001000100001011010001100001000110100\
                          110001001100011001100010100010111000";

    /// 128-bit worked example for the longest-run test.
    const LR128: &str = "11001100000101010110110001001100111000000000001001\
                         00110101010001000100111101011010000000110101111100\
                         1100111001101101100010110010";

    fn eps100() -> Vec<bool> {
        let v = b(&EPS100.replace(' ', ""));
        assert_eq!(v.len(), 100);
        v
    }

    fn alternating(n: usize) -> Vec<bool> {
        (0..n).map(|i| i % 2 == 1).collect()
    }

    fn reference_stream(n: usize, seed: u64) -> Vec<bool> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen::<bool>()).collect()
    }

    #[test]
    fn monobit_worked_examples() {
        let r = monobit_core(&b("1011010101"));
        assert!((r.p_values[0] - 0.527089256866).abs() < 1e-9);
        let r = monobit_core(&eps100());
        assert!((r.p_values[0] - 0.109598583399).abs() < 1e-9);
        assert!(r.passed);
    }

    #[test]
    fn monobit_extremes() {
        // Maximal imbalance: essentially-zero p-value.
        let zeros = vec![false; 1_000_000];
        let r = frequency_monobit(&zeros).unwrap();
        assert!(r.p_values[0] < 1e-300);
        assert!(!r.passed);
        // Perfect balance: S_n = 0 gives p = 1 exactly.
        let r = frequency_monobit(&alternating(1_000_000)).unwrap();
        assert_eq!(r.p_values[0], 1.0);
        assert!(r.passed);
    }

    #[test]
    fn monobit_length_guard() {
        assert!(matches!(
            frequency_monobit(&[true; 99]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn block_frequency_worked_examples() {
        let r = block_frequency_core(&b("0110011010"), 3);
        assert!((r.p_values[0] - 0.801251956901).abs() < 1e-9);
        let r = block_frequency_core(&eps100(), 10);
        assert!((r.p_values[0] - 0.706438449641).abs() < 1e-9);
    }

    #[test]
    fn block_frequency_balanced_blocks_give_p_one() {
        // Every 128-bit block of the alternating stream has exactly 64
        // ones, so the chi-square statistic is identically zero.
        let r = block_frequency(&alternating(100_000), 128).unwrap();
        assert_eq!(r.p_values[0], 1.0);
    }

    #[test]
    fn block_frequency_rejects_constant_stream() {
        let r = block_frequency(&vec![false; 1_000_000], 128).unwrap();
        assert!(r.p_values[0] < 1e-300);
        assert!(!r.passed);
    }

    #[test]
    fn block_frequency_guards() {
        assert!(matches!(
            block_frequency(&[true; 50], 20),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            block_frequency(&vec![true; 1000], 19),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn runs_worked_examples() {
        let r = runs_core(&b("1001101011"));
        assert!((r.p_values[0] - 0.147232255364).abs() < 1e-9);
        let r = runs_core(&eps100());
        assert!((r.p_values[0] - 0.500797917887).abs() < 1e-9);
        assert!(r.passed);
    }

    #[test]
    fn runs_prerequisite_failure_is_reported_not_raised() {
        let r = runs(&vec![true; 1000]).unwrap();
        assert!(!r.passed);
        assert_eq!(r.p_values, vec![0.0]);
        assert!(r.note.as_deref().unwrap().contains("prerequisite"));
    }

    #[test]
    fn runs_alternating_stream_fails() {
        // Every adjacent pair differs: V_n = n, the farthest possible from
        // the n/2 expectation, and the statistic underflows to p = 0.
        let r = runs(&alternating(1_000_000)).unwrap();
        assert_eq!(r.p_values[0], 0.0);
        assert!(!r.passed);
    }

    #[test]
    fn longest_run_worked_example() {
        let r = longest_run_core(&b(&LR128.replace(' ', "")));
        // Frozen value under the standard's 4-decimal class probabilities;
        // the published example (0.180609) used higher-precision constants.
        assert!((r.p_values[0] - 0.180597976786).abs() < 1e-9);
        assert!((r.p_values[0] - 0.180609).abs() < 2e-5);
    }

    #[test]
    fn longest_run_extremes() {
        let r = longest_run_of_ones(&vec![true; 1_000_000]).unwrap();
        assert!(!r.passed);
        assert!(r.p_values[0] < 1e-50);
        // Alternating: every block's longest run is 1, far below the
        // lowest class boundary of the 10⁴ regime.
        let r = longest_run_of_ones(&alternating(1_000_000)).unwrap();
        assert!(r.p_values[0] < 1e-100);
        assert!(!r.passed);
    }

    #[test]
    fn cusum_worked_examples() {
        let r = cumulative_sums_core(&b("1011010111"));
        // Exact series value; the standard's example prints 0.4116588 from
        // lower-precision normal CDF tables.
        assert!((r.p_values[0] - 0.411584718253).abs() < 1e-9);
        assert!((r.p_values[0] - 0.4116588).abs() < 1e-4);
        let r = cumulative_sums_core(&eps100());
        assert!((r.p_values[0] - 0.219193993486).abs() < 1e-9);
        assert!((r.p_values[1] - 0.114866215303).abs() < 1e-9);
        assert!(r.passed);
    }

    #[test]
    fn cusum_extremes() {
        // All-zeros: the walk marches straight to −n and the excursion
        // series collapses to zero.
        let r = cumulative_sums(&vec![false; 1_000_000]).unwrap();
        assert_eq!(r.p_values, vec![0.0, 0.0]);
        // Alternating: max excursion 1, the smallest possible, p ≈ 1.
        let r = cumulative_sums(&alternating(1_000_000)).unwrap();
        assert!(r.p_values[0] > 0.999999);
        assert!(r.p_values[1] > 0.999999);
    }

    #[test]
    fn dft_worked_examples() {
        // 100 bits truncate to a 64-point transform.
        let r = dft_core(&eps100());
        assert!((r.p_values[0] - 0.646355195539).abs() < 1e-9);
        assert!(r.note.as_deref().unwrap().contains("64 of 100"));
        // 128 bits: a power of two, no truncation note.
        let r = dft_core(&b(&LR128.replace(' ', "")));
        assert!((r.p_values[0] - 0.516412268396).abs() < 1e-9);
        assert!(r.note.is_none());
    }

    #[test]
    fn dft_extremes() {
        // Constant input: the DC component dwarfs the threshold while every
        // other magnitude is zero, so the below-threshold count is one
        // short of the full half-spectrum on top of a 5% expected miss
        // rate — a hugely significant excess.
        let r = dft_spectral(&vec![false; 4096]).unwrap();
        assert!(!r.passed);
        // Period-2 tone: all spectral mass sits at the excluded Nyquist
        // bin, so every examined magnitude is below threshold; the excess
        // over the expected 95% is again decisive.
        let r = dft_spectral(&alternating(1 << 20)).unwrap();
        assert_eq!(r.p_values[0], 0.0);
        assert!(r.note.is_none());
    }

    #[test]
    fn serial_worked_example() {
        let r = serial_core(&b("0011011101"), 3);
        // ∇ψ²₃ = 1.6 and ∇²ψ²₃ = 0.8 give igamc(2, 0.8) and igamc(1, 0.4).
        assert!((r.p_values[0] - 0.8087921354109989).abs() < 1e-9);
        assert!((r.p_values[1] - 0.6703200460356393).abs() < 1e-9);
    }

    #[test]
    fn serial_reference_values() {
        let r = serial_core(&eps100(), 3);
        assert!((r.p_values[0] - 0.308441041184).abs() < 1e-9);
        assert!((r.p_values[1] - 0.353454681959).abs() < 1e-9);
    }

    #[test]
    fn serial_de_bruijn_pattern_gives_p_one() {
        // "00010111" is a de Bruijn cycle of order 3: tiled whole, every
        // m-gram count is exactly equal for m ≤ 3, so both statistics
        // vanish and both p-values are exactly 1.
        let tiled: Vec<bool> = b("00010111").repeat(100);
        let r = serial(&tiled, 3).unwrap();
        assert_eq!(r.p_values, vec![1.0, 1.0]);
    }

    #[test]
    fn serial_constant_stream_fails() {
        let r = serial(&vec![false; 1_000_000], DEFAULT_SERIAL_LEN).unwrap();
        assert_eq!(r.p_values, vec![0.0, 0.0]);
        assert!(!r.passed);
    }

    #[test]
    fn serial_guards() {
        assert!(matches!(
            serial(&vec![true; 1000], 0),
            Err(Error::Domain(_))
        ));
        // m = 16 needs at least 2^19 bits.
        assert!(matches!(
            serial(&vec![true; (1 << 19) - 1], 16),
            Err(Error::InsufficientData(_))
        ));
        assert!(serial(&reference_stream(1 << 20, 5), 16).is_ok());
    }

    #[test]
    fn approximate_entropy_worked_example() {
        let r = approximate_entropy_core(&b("0100110101"), 3);
        assert!((r.p_values[0] - 0.2619611048816654).abs() < 1e-9);
        let r = approximate_entropy_core(&eps100(), 3);
        assert!((r.p_values[0] - 0.026408340878).abs() < 1e-9);
    }

    #[test]
    fn approximate_entropy_of_fair_bits_approaches_ln_two() {
        let bits = reference_stream(1 << 17, 42);
        let m = DEFAULT_APEN_LEN;
        let ap_en = phi_statistic(&bits, m) - phi_statistic(&bits, m + 1);
        let gap = std::f64::consts::LN_2 - ap_en;
        // The chi-square statistic 2n·gap concentrates near 2^m, so the
        // gap itself sits near 2^m/(2n) ≈ 0.004.
        assert!(gap >= 0.0, "ApEn may not exceed ln 2, gap = {gap}");
        assert!(gap < 0.01, "ApEn too far from ln 2: gap = {gap}");
    }

    #[test]
    fn approximate_entropy_constant_stream_fails() {
        // A constant stream has ApEn = 0: totally predictable.
        let r = approximate_entropy(&vec![false; 1_000_000], DEFAULT_APEN_LEN).unwrap();
        assert_eq!(r.p_values[0], 0.0);
        assert!(!r.passed);
    }

    #[test]
    fn apen_guards() {
        assert!(matches!(
            approximate_entropy(&vec![true; 1 << 15], 10),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            approximate_entropy(&vec![true; 1000], 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rank_class_probabilities_match_product_formula() {
        let [p_full, p_one_less, p_rest] = rank_class_probabilities();
        assert!((p_full - 0.288788095154).abs() < 1e-11);
        assert!((p_one_less - 0.577576190173).abs() < 1e-11);
        assert!((p_rest - 0.133635714673).abs() < 1e-11);
        assert!((p_full + p_one_less + p_rest - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gf2_rank_known_matrices() {
        let mut identity = [0u32; 32];
        for (i, row) in identity.iter_mut().enumerate() {
            *row = 1 << (31 - i);
        }
        assert_eq!(gf2_rank(identity), 32);
        assert_eq!(gf2_rank([0u32; 32]), 0);
        // All rows equal: rank 1.
        assert_eq!(gf2_rank([0xDEAD_BEEF; 32]), 1);
        // Two distinct row values: rank 2.
        let mut two = [0x0000_FFFF; 32];
        two[7] = 0xFFFF_0000;
        assert_eq!(gf2_rank(two), 2);
    }

    #[test]
    fn rank_extremes() {
        // All-zero matrices: every rank is 0, the lowest class swallows
        // everything.
        let r = binary_matrix_rank(&vec![false; 39 * 1024]).unwrap();
        assert!(!r.passed);
        assert!(r.p_values[0] < 1e-10);
        // Identity-patterned blocks: every rank is exactly 32, which is
        // also far from the expected class split.
        let mut bits = vec![false; 39 * 1024];
        for matrix in 0..39 {
            for i in 0..32 {
                bits[matrix * 1024 + i * 32 + i] = true;
            }
        }
        let r = binary_matrix_rank(&bits).unwrap();
        assert!(!r.passed);
        assert!(r.p_values[0] < 1e-10);
    }

    #[test]
    fn rank_guard() {
        assert!(matches!(
            binary_matrix_rank(&vec![true; 38 * 1024 - 1]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn battery_reference_stream_passes_all_nine() {
        let bits = reference_stream(1_000_000, 0xB0B0_0001);
        let results = run_battery(&bits);
        assert_eq!(results.len(), 9);
        for r in &results {
            assert!(
                r.passed,
                "{} failed on the reference stream: p = {:?} {:?}",
                r.test_name, r.p_values, r.note
            );
        }
        assert!(battery_passed(&results));
    }

    #[test]
    fn battery_constant_stream_fails_all_nine() {
        let results = run_battery(&vec![false; 1_000_000]);
        assert_eq!(results.len(), 9);
        for r in &results {
            assert!(!r.was_skipped(), "{} should have run", r.test_name);
            assert!(
                !r.passed,
                "{} should fail on a constant stream",
                r.test_name
            );
        }
        assert!(!battery_passed(&results));
    }

    #[test]
    fn battery_reports_short_input_inline() {
        let results = run_battery(&reference_stream(500, 3));
        assert_eq!(results.len(), 9);
        let skipped: Vec<&str> = results
            .iter()
            .filter(|r| r.was_skipped())
            .map(|r| r.test_name.as_str())
            .collect();
        assert_eq!(
            skipped,
            vec![
                "dft_spectral",
                "serial",
                "approximate_entropy",
                "binary_matrix_rank"
            ]
        );
        for r in &results {
            if r.was_skipped() {
                assert!(!r.passed);
                assert!(r.note.is_some());
            }
        }
    }

    #[test]
    fn result_serialization_field_names() {
        let r = monobit_core(&eps100());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"test\":\"frequency_monobit\""));
        assert!(json.contains("\"p_values\":["));
        assert!(json.contains("\"passed\":true"));
        assert!(json.contains("\"n_bits\":100"));
        // No note on this result, so the field is omitted entirely.
        assert!(!json.contains("\"note\""));
    }

    #[test]
    fn render_table_lists_every_test() {
        let results = run_battery(&reference_stream(500, 3));
        let table = render_table(&results);
        for r in &results {
            assert!(table.contains(&r.test_name));
        }
        assert!(table.contains("skipped"));
        assert!(table.contains("pass"));
    }
}
