//! Magnitude quantization of channel observations against empirical-quantile
//! thresholds, with a symmetric guard band around each threshold.
//!
//! Both parties quantize their own observation sequence and publicly exchange
//! the indices of dropped samples; keeping only the intersection of kept
//! indices makes the surviving bit streams positionally aligned.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform-in-quantile quantizer emitting `log2(levels)` Gray-coded bits per
/// kept sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantizer {
    levels: usize,
    guard_band_fraction: f64,
}

impl Quantizer {
    /// # Errors
    /// `levels` must be a power of two ≥ 2; `guard_band_fraction` must lie in
    /// `[0, 0.5)`.
    pub fn new(levels: usize, guard_band_fraction: f64) -> Result<Self> {
        if levels < 2 || !levels.is_power_of_two() {
            return Err(Error::invalid(
                "levels",
                format!("must be a power of two >= 2, got {levels}"),
            ));
        }
        if !(guard_band_fraction.is_finite()
            && (0.0..0.5).contains(&guard_band_fraction))
        {
            return Err(Error::invalid(
                "guard_band_fraction",
                format!("must lie in [0, 0.5), got {guard_band_fraction}"),
            ));
        }
        Ok(Quantizer {
            levels,
            guard_band_fraction,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn guard_band_fraction(&self) -> f64 {
        self.guard_band_fraction
    }

    /// Bits emitted per kept sample.
    pub fn bits_per_sample(&self) -> usize {
        self.levels.trailing_zeros() as usize
    }
}

/// Quantize the magnitudes of `samples`.
///
/// Each sample's empirical quantile is `u = (rank + ½) / N` (ranks from a
/// stable sort, ties broken by index, so both parties of a simulation agree
/// on identical inputs). The cell is `floor(u · levels)`; samples whose
/// quantile lands within `guard_band_fraction / (2 (levels-1))` of any cell
/// boundary are dropped, so the guard band removes about
/// `guard_band_fraction` of the samples in total. Cell indices are Gray-coded
/// and emitted most-significant bit first.
///
/// Returns the concatenated bits of the kept samples (in input order) and the
/// kept indices.
///
/// # Errors
/// [`Error::GuardBandTooWide`] when every sample falls in a guard interval;
/// an empty input is an invalid parameter.
pub fn quantize(samples: &[Complex64], q: &Quantizer) -> Result<(Vec<u8>, Vec<usize>)> {
    if samples.is_empty() {
        return Err(Error::invalid("samples", "must be nonempty"));
    }
    let n = samples.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        samples[i]
            .norm_sqr()
            .partial_cmp(&samples[j].norm_sqr())
            .expect("sample magnitudes must not be NaN")
            .then(i.cmp(&j))
    });
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let levels = q.levels as f64;
    let half_guard = q.guard_band_fraction / (2.0 * (q.levels as f64 - 1.0));
    let bits_per = q.bits_per_sample();
    let mut bits = Vec::with_capacity(n * bits_per);
    let mut kept = Vec::with_capacity(n);
    for i in 0..n {
        let u = (rank[i] as f64 + 0.5) / n as f64;
        let cell = ((u * levels) as usize).min(q.levels - 1);
        // Distance to the nearest interior threshold k/levels, k = 1..levels-1.
        let scaled = u * levels;
        let nearest = scaled.round().clamp(1.0, levels - 1.0);
        if (scaled - nearest).abs() / levels < half_guard {
            continue;
        }
        kept.push(i);
        let gray = cell ^ (cell >> 1);
        for b in (0..bits_per).rev() {
            bits.push(((gray >> b) & 1) as u8);
        }
    }
    if kept.is_empty() {
        return Err(Error::GuardBandTooWide);
    }
    Ok((bits, kept))
}

/// Restrict a quantizer output to the bit groups of the given sample indices.
///
/// `kept` and `bits` must come from the same [`quantize`] call; `select` must
/// be a subset of `kept` (callers typically pass the intersection of both
/// parties' kept indices, in ascending order).
pub fn select_bits(bits: &[u8], kept: &[usize], select: &[usize], bits_per_sample: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(select.len() * bits_per_sample);
    let mut cursor = 0usize;
    for &idx in select {
        while kept[cursor] != idx {
            cursor += 1;
        }
        let start = cursor * bits_per_sample;
        out.extend_from_slice(&bits[start..start + bits_per_sample]);
    }
    out
}
