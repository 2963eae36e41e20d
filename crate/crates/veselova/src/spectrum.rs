//! Frequency extraction and torus-dimension estimation.
//!
//! A sampled multichannel signal is windowed (periodic Hann), transformed
//! by an FFT, and its summed magnitude spectrum is scanned for local
//! maxima, each refined by log-quadratic interpolation. The number of
//! rationally independent frequencies among the retained peaks — the
//! dimension of the invariant torus the signal winds around — is estimated
//! greedily: a peak joins the base when no integer combination of the
//! current base with bounded coefficients reproduces it within tolerance,
//! and a final sweep removes base members that became expressible once
//! later (smaller) frequencies joined.

use crate::error::{Error, Result};
use crate::full::FullState;
use crate::reduced::ReducedState;
use crate::scalar::Real;

/// Tuning knobs for [`frequency_analysis`].
#[derive(Clone, Debug)]
pub struct SpectrumOptions<T> {
    /// Largest |integer| coefficient searched in rational-combination tests.
    pub max_coeff: i64,
    /// Peaks below this fraction of the strongest peak are dropped.
    pub rel_floor: T,
    /// Combination residual tolerance, as a fraction of the smallest base
    /// frequency.
    pub tol_factor: T,
    /// Hard cap on the number of base frequencies reported.
    pub max_base: usize,
    /// Peaks below this many spectral bins are excluded from base counting:
    /// differences of nearby frequencies land there and cannot be resolved
    /// at the sampled length.
    pub floor_bins: T,
}

impl<T: Real> Default for SpectrumOptions<T> {
    fn default() -> Self {
        Self {
            max_coeff: 8,
            rel_floor: T::lit(1e-3),
            tol_factor: T::lit(1e-3),
            max_base: 6,
            floor_bins: T::lit(20.0),
        }
    }
}

/// Extracted spectral content of a sampled signal.
#[derive(Clone, Debug)]
pub struct FrequencySpectrum<T> {
    /// Retained peaks `(frequency in rad/time, amplitude)`, sorted by
    /// amplitude, strongest first.
    pub frequencies: Vec<(T, T)>,
    /// Estimated number of rationally independent frequencies.
    pub base_count: usize,
    /// The selected base frequencies, in acceptance order.
    pub base: Vec<T>,
    /// Absolute residual tolerance of the combination tests
    /// (`tol_factor` × smallest base frequency; zero when the base is empty).
    pub tolerance: T,
    /// Set when some frequency was declared independent while an integer
    /// combination came within ten tolerances of it: near such a resonance
    /// the base count is a best effort, not a sharp claim.
    pub near_resonance: bool,
}

impl<T: Real> FrequencySpectrum<T> {
    fn empty() -> Self {
        Self {
            frequencies: Vec::new(),
            base_count: 0,
            base: Vec::new(),
            tolerance: T::zero(),
            near_resonance: false,
        }
    }
}

/// In-place iterative radix-2 FFT (decimation in time) of a complex signal
/// held as separate real/imaginary slices; the length must be a power of
/// two.
fn fft_in_place<T: Real>(re: &mut [T], im: &mut [T]) {
    let n = re.len();
    debug_assert!(n.is_power_of_two() && n == im.len());
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let half = n / 2;
    let mut tw_re = Vec::with_capacity(half.max(1));
    let mut tw_im = Vec::with_capacity(half.max(1));
    for k in 0..half.max(1) {
        let ang = -T::lit(2.0) * T::PI() * T::from_index(k) / T::from_index(n.max(1));
        tw_re.push(ang.cos());
        tw_im.push(ang.sin());
    }
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        let mut start = 0;
        while start < n {
            for k in 0..len / 2 {
                let (wr, wi) = (tw_re[k * stride], tw_im[k * stride]);
                let a = start + k;
                let b = a + len / 2;
                let xr = re[b] * wr - im[b] * wi;
                let xi = re[b] * wi + im[b] * wr;
                re[b] = re[a] - xr;
                im[b] = im[a] - xi;
                re[a] = re[a] + xr;
                im[a] = im[a] + xi;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// Smallest residual `|Σ cᵢ·baseᵢ − om|` over integer coefficients
/// `|cᵢ| ≤ max_coeff` that lies within `radius`, or `None` when no
/// combination comes that close. Depth-first with a reachable-range bound:
/// at each level the coefficient range is clamped to values that can still
/// land within `radius` given the remaining frequencies.
fn smallest_combination_residual<T: Real>(
    om: T,
    base: &[T],
    max_coeff: i64,
    radius: T,
) -> Option<T> {
    if base.is_empty() {
        return None;
    }
    let m = base.len();
    let cmax = T::from_i64(max_coeff).unwrap_or_else(T::one);
    let mut reach = vec![T::zero(); m + 1];
    for j in (0..m).rev() {
        reach[j] = reach[j + 1] + cmax * base[j];
    }
    fn rec<T: Real>(
        target: T,
        j: usize,
        base: &[T],
        reach: &[T],
        cmax: T,
        radius: T,
        best: &mut Option<T>,
    ) {
        if j == base.len() {
            let r = target.abs();
            if r <= radius && best.map_or(true, |b| r < b) {
                *best = Some(r);
            }
            return;
        }
        let b = base[j];
        let spare = reach[j + 1] + radius;
        let lo = ((target - spare) / b).ceil().max(-cmax);
        let hi = ((target + spare) / b).floor().min(cmax);
        let mut c = lo;
        while c <= hi {
            rec(target - c * b, j + 1, base, reach, cmax, radius, best);
            c = c + T::one();
        }
    }
    let mut best = None;
    rec(om, 0, base, &reach, cmax, radius, &mut best);
    best
}

/// Combination test used by the base counter. Returns
/// `(is_combination_within_tol, near_resonance)`: the second flag is set
/// when the frequency is *not* a combination but one comes within ten
/// tolerances — the independence verdict is then fragile.
fn is_combination<T: Real>(om: T, base: &[T], max_coeff: i64, tol: T) -> (bool, bool) {
    match smallest_combination_residual(om, base, max_coeff, tol * T::lit(10.0)) {
        None => (false, false),
        Some(r) => {
            if r <= tol {
                (true, false)
            } else {
                (false, true)
            }
        }
    }
}

struct BaseEstimate<T> {
    base: Vec<T>,
    tolerance: T,
    near_resonance: bool,
}

fn vec_min<T: Real>(v: &[T]) -> T {
    v.iter().copied().fold(T::infinity(), |a, b| a.min(b))
}

/// Greedy base selection over the retained peaks, then a closure sweep
/// removing members expressible from the others.
fn count_base<T: Real>(
    peaks: &[(T, T)],
    dt: T,
    n: usize,
    opts: &SpectrumOptions<T>,
) -> BaseEstimate<T> {
    let mut out = BaseEstimate {
        base: Vec::new(),
        tolerance: T::zero(),
        near_resonance: false,
    };
    if peaks.is_empty() {
        return out;
    }
    let om_floor =
        opts.floor_bins * T::lit(2.0) * T::PI() / (T::from_index(n) * dt);
    let amax = peaks[0].1;
    for &(om, amp) in peaks {
        if amp < opts.rel_floor * amax || om < om_floor {
            continue;
        }
        let tol = if out.base.is_empty() {
            T::zero()
        } else {
            opts.tol_factor * vec_min(&out.base)
        };
        let (isc, near) = is_combination(om, &out.base, opts.max_coeff, tol);
        out.near_resonance |= near;
        if !isc {
            out.base.push(om);
        }
        if out.base.len() >= opts.max_base {
            break;
        }
    }
    let mut changed = true;
    while changed && out.base.len() > 1 {
        changed = false;
        for i in 0..out.base.len() {
            let mut others = out.base.clone();
            others.remove(i);
            let tol = opts.tol_factor * vec_min(&others);
            let (isc, near) = is_combination(out.base[i], &others, opts.max_coeff, tol);
            out.near_resonance |= near;
            if isc {
                out.base.remove(i);
                changed = true;
                break;
            }
        }
    }
    if !out.base.is_empty() {
        out.tolerance = opts.tol_factor * vec_min(&out.base);
    }
    out
}

/// Windowed-FFT frequency analysis of a multichannel signal sampled at
/// spacing `dt`. The signal is truncated to the largest power-of-two
/// length, each channel is mean-removed and Hann-windowed, and the
/// channel magnitudes are summed before peak extraction. A signal that is
/// constant up to roundoff yields an empty spectrum.
pub fn frequency_analysis<T: Real>(
    channels: &[Vec<T>],
    dt: T,
    opts: &SpectrumOptions<T>,
) -> Result<FrequencySpectrum<T>> {
    if channels.is_empty() {
        return Err(Error::InsufficientData {
            reason: "no channels",
        });
    }
    if !(dt > T::zero()) {
        return Err(Error::InsufficientData {
            reason: "sample spacing must be positive",
        });
    }
    let len = channels[0].len();
    for c in channels {
        if c.len() != len {
            return Err(Error::DimensionMismatch {
                context: "frequency analysis channels",
                expected: len,
                got: c.len(),
            });
        }
    }
    if len < 16 {
        return Err(Error::InsufficientData {
            reason: "fewer than 16 samples",
        });
    }
    let n = if len.is_power_of_two() {
        len
    } else {
        1usize << (usize::BITS - 1 - len.leading_zeros())
    };
    if n < 16 {
        return Err(Error::InsufficientData {
            reason: "fewer than 16 samples after power-of-two truncation",
        });
    }

    // Constant-signal guard: with the mean removed, a constant channel set
    // leaves only roundoff, whose FFT is noise with meaningless "peaks".
    let mut raw_peak = T::zero();
    let mut centered_peak = T::zero();
    let mut means = Vec::with_capacity(channels.len());
    for c in channels {
        let mut mean = T::zero();
        for &x in &c[..n] {
            mean += x;
            raw_peak = raw_peak.max(x.abs());
        }
        mean /= T::from_index(n);
        for &x in &c[..n] {
            centered_peak = centered_peak.max((x - mean).abs());
        }
        means.push(mean);
    }
    if centered_peak <= T::lit(1e-12) * raw_peak.max(T::one()) {
        return Ok(FrequencySpectrum::empty());
    }

    let window: Vec<T> = (0..n)
        .map(|k| {
            T::lit(0.5)
                - T::lit(0.5)
                    * (T::lit(2.0) * T::PI() * T::from_index(k) / T::from_index(n)).cos()
        })
        .collect();
    let mut mag = vec![T::zero(); n / 2 + 1];
    let mut re = vec![T::zero(); n];
    let mut im = vec![T::zero(); n];
    for (c, &mean) in channels.iter().zip(&means) {
        for k in 0..n {
            re[k] = (c[k] - mean) * window[k];
            im[k] = T::zero();
        }
        fft_in_place(&mut re, &mut im);
        for (k, m) in mag.iter_mut().enumerate() {
            *m += (re[k] * re[k] + im[k] * im[k]).sqrt();
        }
    }

    // Local maxima with log-quadratic refinement of the bin offset.
    let mut peaks: Vec<(T, T)> = Vec::new();
    for k in 2..mag.len() - 1 {
        if mag[k] > mag[k - 1] && mag[k] > mag[k + 1] {
            let delta = if mag[k - 1] > T::zero() && mag[k] > T::zero() && mag[k + 1] > T::zero()
            {
                let lm = mag[k - 1].ln();
                let l0 = mag[k].ln();
                let lp = mag[k + 1].ln();
                let den = lm - T::lit(2.0) * l0 + lp;
                if den < T::zero() {
                    (T::lit(0.5) * (lm - lp) / den)
                        .max(T::lit(-0.5))
                        .min(T::lit(0.5))
                } else {
                    T::zero()
                }
            } else {
                T::zero()
            };
            let om = T::lit(2.0) * T::PI() * (T::from_index(k) + delta)
                / (T::from_index(n) * dt);
            peaks.push((om, mag[k]));
        }
    }
    peaks.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(core::cmp::Ordering::Equal));

    let estimate = count_base(&peaks, dt, n, opts);
    let amax = peaks.first().map(|p| p.1).unwrap_or_else(T::zero);
    let retained: Vec<(T, T)> = peaks
        .iter()
        .copied()
        .filter(|&(_, amp)| amp >= opts.rel_floor * amax)
        .collect();
    Ok(FrequencySpectrum {
        frequencies: retained,
        base_count: estimate.base.len(),
        base: estimate.base,
        tolerance: estimate.tolerance,
        near_resonance: estimate.near_resonance,
    })
}

/// Flattens full states into n² channels (attitude entries, row-major).
pub fn attitude_channels<T: Real>(states: &[FullState<T>]) -> Vec<Vec<T>> {
    if states.is_empty() {
        return Vec::new();
    }
    let n = states[0].dim();
    let mut out = vec![Vec::with_capacity(states.len()); n * n];
    for s in states {
        let m = s.g().matrix();
        for i in 0..n {
            for k in 0..n {
                out[i * n + k].push(m[(i, k)]);
            }
        }
    }
    out
}

/// Flattens reduced states into 2n channels (contact direction, then
/// momentum).
pub fn reduced_channels<T: Real>(states: &[ReducedState<T>]) -> Vec<Vec<T>> {
    if states.is_empty() {
        return Vec::new();
    }
    let n = states[0].dim();
    let mut out = vec![Vec::with_capacity(states.len()); 2 * n];
    for s in states {
        for i in 0..n {
            out[i].push(s.q()[i]);
            out[n + i].push(s.p()[i]);
        }
    }
    out
}
