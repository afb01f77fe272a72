//! Small numerical helpers shared by the solvers.

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn ksum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Dot product with compensated accumulation.
pub fn kdot(a: &[f64], b: &[f64]) -> f64 {
    ksum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Bisection for an increasing function: returns `x` in `[lo, hi]` with
/// `g(x) ≈ 0`, given `g(lo) <= 0 <= g(hi)`.
///
/// Stops once the bracket width is below `tol * (1 + |x|)` or the midpoint
/// can no longer be separated from an endpoint.
pub fn bisect_increasing<F: FnMut(f64) -> f64>(mut g: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol * (1.0 + mid.abs()) {
            return mid;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bracketed root of an increasing function by the Illinois variant of
/// regula falsi, falling back to bisection whenever the interpolated point
/// makes too little progress. Requires `g(lo) <= 0 <= g(hi)`.
///
/// The bracket is shrunk until its width is below `tol * (1 + |x|)` or it
/// cannot be split further in floating point.
pub fn solve_increasing<F: FnMut(f64) -> f64>(mut g: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut glo = g(lo);
    let mut ghi = g(hi);
    if glo >= 0.0 {
        return lo;
    }
    if ghi <= 0.0 {
        return hi;
    }
    let mut side = 0i8;
    for _ in 0..400 {
        let width = hi - lo;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || width <= tol * (1.0 + mid.abs()) {
            return mid;
        }
        let mut x = if glo.is_finite() && ghi.is_finite() {
            (lo * ghi - hi * glo) / (ghi - glo)
        } else {
            mid
        };
        // keep the trial point well inside the bracket
        let guard = 0.01 * width;
        if !(x > lo + guard && x < hi - guard) {
            x = mid;
        }
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx < 0.0 {
            lo = x;
            glo = gx;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            ghi = gx;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol * (1.0 + a.abs().max(b.abs())) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut xs = vec![1.0];
        xs.extend(std::iter::repeat_n(1e-16, 10_000));
        xs.push(-1.0);
        assert!((ksum(xs) - 1e-12).abs() < 1e-20);
    }

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect_increasing(|x| x * x - 2.0, 0.0, 2.0, 1e-15);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn illinois_matches_bisection() {
        let a = solve_increasing(|x| x.exp() - 3.0, -5.0, 5.0, 1e-15);
        assert!((a - 3f64.ln()).abs() < 1e-13);
        let b = solve_increasing(|x| if x < 1.0 { -1.0 } else { 1.0 }, 0.0, 4.0, 1e-15);
        assert!((b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_section_on_kink() {
        let (x, v) = golden_min(|x| (x - 90.0 / 7.0).abs() * 3.0, 0.0, 30.0, 1e-14);
        assert!((x - 90.0 / 7.0).abs() < 1e-11);
        assert!(v < 1e-10);
    }
}
