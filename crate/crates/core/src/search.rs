//! Bracketed one-dimensional maximization.
//!
//! [`maximize_on_interval`] scans `[0, upper]` on a logarithmic grid (plus the
//! origin), then polishes every promising bracket with golden-section search.
//! Candidates are compared on the exact objective; exact ties go to the
//! smaller argument.

/// `(sqrt(5) - 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Tuning for [`maximize_on_interval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Total scan points including the origin.
    pub points: usize,
    /// Smallest positive scan point as a fraction of `upper`.
    pub min_fraction: f64,
    /// Golden-section stopping width as a fraction of `upper`.
    pub tol_fraction: f64,
    /// Number of scan-local maxima that get refined.
    pub max_refinements: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            points: 64,
            min_fraction: 1e-6,
            tol_fraction: 1e-8,
            max_refinements: 4,
        }
    }
}

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

impl Maximum {
    fn consider(&mut self, x: f64, value: f64) {
        if value > self.value || (value == self.value && x < self.x) || self.value.is_nan() {
            self.x = x;
            self.value = value;
        }
    }
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol`. Returns the best point evaluated.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = Maximum { x: c, value: fc };
    best.consider(d, fd);
    // Width shrinks by INV_PHI per step; cap guards against tol = 0.
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            best.consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            best.consider(d, fd);
        }
    }
    let mid = 0.5 * (a + b);
    best.consider(mid, f(mid));
    best
}

/// Scan points: the origin followed by a geometric grid up to `upper`.
pub fn log_scan_grid(upper: f64, opts: &ScanOptions) -> Vec<f64> {
    let n = opts.points.max(3);
    let lo = (upper * opts.min_fraction).ln();
    let hi = upper.ln();
    let mut grid = Vec::with_capacity(n);
    grid.push(0.0);
    for k in 0..n - 1 {
        let t = k as f64 / (n - 2) as f64;
        grid.push((lo + t * (hi - lo)).exp());
    }
    // exp(ln(upper)) may be off by an ulp
    grid[n - 1] = upper;
    grid
}

/// Maximizes `f` over `[0, upper]`.
pub fn maximize_on_interval<F: FnMut(f64) -> f64>(
    mut f: F,
    upper: f64,
    opts: &ScanOptions,
) -> Maximum {
    if !(upper > 0.0) {
        return Maximum {
            x: 0.0,
            value: f(0.0),
        };
    }
    let grid = log_scan_grid(upper, opts);
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut best = Maximum {
        x: grid[0],
        value: values[0],
    };
    for (&x, &v) in grid.iter().zip(&values) {
        best.consider(x, v);
    }

    let last = grid.len() - 1;
    let mut peaks: Vec<usize> = (0..=last)
        .filter(|&k| {
            let left_ok = k == 0 || values[k] >= values[k - 1];
            let right_ok = k == last || values[k] >= values[k + 1];
            left_ok && right_ok
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    peaks.truncate(opts.max_refinements);

    let tol = opts.tol_fraction * upper;
    for k in peaks {
        let lo = grid[k.saturating_sub(1)];
        let hi = grid[(k + 1).min(last)];
        if hi - lo <= tol {
            continue;
        }
        let m = golden_section_max(&mut f, lo, hi, tol);
        best.consider(m.x, m.value);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let m = golden_section_max(|x| -(x - 0.2).powi(2), -1.0, 1.0, 1e-10);
        assert!((m.x - 0.2).abs() < 1e-9);
    }

    #[test]
    fn golden_handles_reversed_bounds() {
        let m = golden_section_max(|x| -(x - 3.0).powi(2), 5.0, 1.0, 1e-10);
        assert!((m.x - 3.0).abs() < 1e-9);
    }

    #[test]
    fn interval_max_prefers_boundary_when_decreasing() {
        let m = maximize_on_interval(|x| -x, 10.0, &ScanOptions::default());
        assert_eq!(m.x, 0.0);
        let m = maximize_on_interval(|x| x, 10.0, &ScanOptions::default());
        assert_eq!(m.x, 10.0);
    }

    #[test]
    fn interval_max_ties_go_to_smaller_argument() {
        let m = maximize_on_interval(|_| 1.0, 10.0, &ScanOptions::default());
        assert_eq!(m.x, 0.0);
    }

    #[test]
    fn interval_max_finds_interior_peak() {
        let m = maximize_on_interval(|x| -(x - 1.234_567).powi(2), 10.0, &ScanOptions::default());
        assert!((m.x - 1.234_567).abs() < 1e-7);
    }

    #[test]
    fn interval_max_picks_higher_of_two_peaks() {
        let f = |x: f64| (-(x - 0.01f64).powi(2) * 1e4).exp() + 1.5 * (-(x - 7.0f64).powi(2)).exp();
        let m = maximize_on_interval(f, 10.0, &ScanOptions::default());
        assert!((m.x - 7.0).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn scan_grid_shape() {
        let g = log_scan_grid(10.0, &ScanOptions::default());
        assert_eq!(g.len(), 64);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 1e-5).abs() < 1e-18);
        assert_eq!(*g.last().unwrap(), 10.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
