//! Scalar time-series feature computations.
//!
//! All functions work on raw values. Quantities that are undefined for a
//! constant series (autocorrelation, higher moments, entropy) evaluate to 0.

use std::cell::OnceCell;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Lazily computed intermediate results shared by all statistics evaluated
/// on the same series.
pub(crate) struct SeriesView<'a> {
    pub values: &'a [f64],
    mean: OnceCell<f64>,
    variance: OnceCell<f64>,
    sorted: OnceCell<Vec<f64>>,
    spectrum: OnceCell<Vec<Complex<f64>>>,
}

impl<'a> SeriesView<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        Self {
            values,
            mean: OnceCell::new(),
            variance: OnceCell::new(),
            sorted: OnceCell::new(),
            spectrum: OnceCell::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self) -> f64 {
        *self
            .mean
            .get_or_init(|| self.values.iter().sum::<f64>() / self.len() as f64)
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        *self.variance.get_or_init(|| {
            let m = self.mean();
            self.values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / self.len() as f64
        })
    }

    pub fn sorted(&self) -> &[f64] {
        self.sorted.get_or_init(|| {
            let mut v = self.values.to_vec();
            v.sort_by(f64::total_cmp);
            v
        })
    }

    pub fn spectrum(&self) -> &[Complex<f64>] {
        self.spectrum.get_or_init(|| spectrum(self.values))
    }

    pub fn central_moment(&self, order: i32) -> f64 {
        let m = self.mean();
        self.values.iter().map(|x| (x - m).powi(order)).sum::<f64>() / self.len() as f64
    }

    pub fn is_constant(&self) -> bool {
        self.variance() == 0.0
    }
}

thread_local! {
    static PLANNER: std::cell::RefCell<FftPlanner<f64>> = std::cell::RefCell::new(FftPlanner::new());
}

fn plan(n: usize) -> Arc<dyn rustfft::Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

/// Full discrete Fourier spectrum `X_k = sum_t x_t exp(-2 pi i k t / n)`.
///
/// Non-DC bins are computed from the mean-removed series (identical in
/// exact arithmetic) so that a constant input has exactly zero energy
/// outside the DC bin.
pub fn spectrum(values: &[f64]) -> Vec<Complex<f64>> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let sum: f64 = values.iter().sum();
    let mean = sum / n as f64;
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .map(|&x| Complex::new(x - mean, 0.0))
        .collect();
    plan(n).process(&mut buf);
    buf[0] = Complex::new(sum, 0.0);
    buf
}

/// Linear-interpolation quantile of sorted data (NumPy's default method).
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub(crate) fn autocorrelation(v: &SeriesView<'_>, lag: usize) -> f64 {
    let n = v.len();
    if lag >= n || v.is_constant() {
        return 0.0;
    }
    let m = v.mean();
    let x = v.values;
    let s: f64 = (0..n - lag).map(|t| (x[t] - m) * (x[t + lag] - m)).sum();
    s / ((n - lag) as f64 * v.variance())
}

/// Relative index at which the cumulative absolute mass first reaches `q`.
pub(crate) fn index_mass_quantile(values: &[f64], q: f64) -> f64 {
    let total: f64 = values.iter().map(|x| x.abs()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (i, x) in values.iter().enumerate() {
        acc += x.abs();
        if acc / total >= q {
            return (i + 1) as f64 / values.len() as f64;
        }
    }
    1.0
}

pub(crate) fn number_peaks(values: &[f64], support: usize) -> f64 {
    let n = values.len();
    if n < 2 * support + 1 {
        return 0.0;
    }
    (support..n - support)
        .filter(|&i| (1..=support).all(|k| values[i] > values[i - k] && values[i] > values[i + k]))
        .count() as f64
}

pub(crate) fn longest_strike(values: &[f64], pred: impl Fn(f64) -> bool) -> f64 {
    let mut best = 0usize;
    let mut run = 0usize;
    for &x in values {
        if pred(x) {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best as f64
}

/// Approximate entropy with embedding dimension `m` and tolerance
/// `r_frac` times the series' standard deviation.
pub(crate) fn approximate_entropy(v: &SeriesView<'_>, m: usize, r_frac: f64) -> f64 {
    let n = v.len();
    if v.is_constant() || n <= m + 1 {
        return 0.0;
    }
    let r = r_frac * v.variance().sqrt();
    let x = v.values;
    let phi = |m: usize| -> f64 {
        let count = n - m + 1;
        let mut acc = 0.0;
        for i in 0..count {
            let mut c = 0usize;
            for j in 0..count {
                if (0..m).all(|k| (x[i + k] - x[j + k]).abs() <= r) {
                    c += 1;
                }
            }
            acc += (c as f64 / count as f64).ln();
        }
        acc / count as f64
    };
    phi(m) - phi(m + 1)
}

pub(crate) fn mean_abs_change(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    abs_sum_of_changes(values) / (values.len() - 1) as f64
}

pub(crate) fn abs_sum_of_changes(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Complexity estimate: length of the series' polyline, ignoring time.
pub(crate) fn cid_ce(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| (w[1] - w[0]).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[f64]) -> Vec<Complex<f64>> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .fold(Complex::new(0.0, 0.0), |acc, (t, &v)| {
                        let ang = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                        acc + Complex::new(v * ang.cos(), v * ang.sin())
                    })
            })
            .collect()
    }

    #[test]
    fn spectrum_matches_naive_dft() {
        let x = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0, 3.0, 5.0];
        let fast = spectrum(&x);
        for (a, b) in fast.iter().zip(naive_dft(&x)) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn quantile_interpolates() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert_eq!(quantile_sorted(&s, 1.0), 4.0);
        assert!((quantile_sorted(&s, 0.5) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn mass_quantile_brute_force() {
        assert_eq!(index_mass_quantile(&[1.0, 1.0, 1.0, 1.0], 0.5), 0.5);
        assert_eq!(index_mass_quantile(&[0.0, 0.0, 4.0, 0.0], 0.1), 0.75);
        assert_eq!(index_mass_quantile(&[0.0, 0.0], 0.5), 0.0);
    }

    #[test]
    fn peaks_and_strikes() {
        let x = [0.0, 2.0, 0.0, 3.0, 1.0, 4.0, 0.0];
        assert_eq!(number_peaks(&x, 1), 3.0);
        assert_eq!(number_peaks(&x, 2), 0.0);
        assert_eq!(number_peaks(&[0.0, 1.0, 5.0, 1.0, 0.0, 2.0, 0.0], 2), 1.0);
        assert_eq!(
            longest_strike(&[1.0, 5.0, 6.0, 7.0, 1.0, 9.0], |v| v > 4.0),
            3.0
        );
    }

    #[test]
    fn apen_regular_vs_irregular() {
        let regular: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let irregular: Vec<f64> = (0..100u64)
            .map(|i| ((i * 2_654_435_761) % 97) as f64)
            .collect();
        let a = approximate_entropy(&SeriesView::new(&regular), 2, 0.2);
        let b = approximate_entropy(&SeriesView::new(&irregular), 2, 0.2);
        assert!(a < 0.05, "{a}");
        assert!(b > a);
    }
}
