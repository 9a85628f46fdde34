//! One-dimensional quadrature rules shared by the analytic modules.
//!
//! Three rules are provided:
//! * adaptive Gauss–Kronrod (7/15 points) with global error control, for
//!   piecewise-smooth integrands on finite intervals;
//! * fixed-level tanh-sinh on a finite interval, for integrands with
//!   algebraic endpoint behaviour such as `s^alpha`;
//! * fixed-level exp-sinh on `[0, inf)`, for exponentially decaying
//!   integrands whose scale is unknown a priori.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral value together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Single 15-point Kronrod panel with the QUADPACK error heuristic.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let res_asc = res_asc * half.abs();
    let value = res_k * half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let res_abs = res_abs * half.abs();
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Estimate { value, error }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Adaptive Gauss–Kronrod over the consecutive intervals defined by
/// `breaks` (sorted, at least two entries). Refinement always splits the
/// panel with the largest error, so the result is a deterministic function
/// of the inputs.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Estimate {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let est = gauss_kronrod(&mut f, w[0], w[1]);
            heap.push(Panel { a: w[0], b: w[1], est });
        }
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error));
        if error <= abs_tol.max(rel_tol * value.abs()) || heap.len() >= max_panels {
            return Estimate { value, error };
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => return Estimate { value, error },
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            heap.push(worst);
            let (value, error) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error));
            return Estimate { value, error };
        }
        let left = gauss_kronrod(&mut f, worst.a, mid);
        let right = gauss_kronrod(&mut f, mid, worst.b);
        heap.push(Panel {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            est: right,
        });
    }
}

/// Abscissa offsets (distance from the nearer endpoint, as a fraction of
/// the interval) and weights for tanh-sinh with step 1/16.
struct TanhSinh {
    // (fraction from left endpoint, weight) for t <= 0; mirrored for t > 0.
    nodes: Vec<(f64, f64)>,
}

const TS_STEP: f64 = 1.0 / 16.0;
const TS_TMAX: f64 = 4.5;

fn tanh_sinh_table() -> &'static TanhSinh {
    static TABLE: OnceLock<TanhSinh> = OnceLock::new();
    TABLE.get_or_init(|| {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let n = (TS_TMAX / TS_STEP).round() as i64;
        let mut nodes = Vec::with_capacity(n as usize + 1);
        for k in 0..=n {
            let t = k as f64 * TS_STEP;
            let u = half_pi * t.sinh();
            // 1 - tanh(u) computed without cancellation; fraction of the
            // interval measured from the nearer endpoint.
            let frac = 1.0 / ((2.0 * u).exp() + 1.0);
            let cu = u.cosh();
            let w = TS_STEP * half_pi * t.cosh() / (cu * cu);
            nodes.push((frac, w));
        }
        TanhSinh { nodes }
    })
}

/// Fixed-level tanh-sinh rule on `[a, b]`. The integrand is never
/// evaluated at the endpoints themselves.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let table = tanh_sinh_table();
    let len = b - a;
    // Weights are for the reference interval [-1, 1]; scale by len / 2.
    let mut sum = 0.0;
    for (k, &(frac, w)) in table.nodes.iter().enumerate() {
        if frac == 0.0 {
            continue;
        }
        if k == 0 {
            sum += w * f(a + 0.5 * len);
        } else {
            // Far-tail nodes can round onto a nonzero endpoint; skip them
            // rather than evaluate a possibly singular integrand there.
            let (xl, xr) = (a + frac * len, b - frac * len);
            if xl != a {
                sum += w * f(xl);
            }
            if xr != b {
                sum += w * f(xr);
            }
        }
    }
    0.5 * len * sum
}

struct ExpSinh {
    nodes: Vec<(f64, f64)>,
}

fn exp_sinh_table() -> &'static ExpSinh {
    static TABLE: OnceLock<ExpSinh> = OnceLock::new();
    TABLE.get_or_init(|| {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let h: f64 = 1.0 / 64.0;
        let lo = (-4.5 / h).round() as i64;
        let hi = (3.75 / h).round() as i64;
        let nodes = (lo..=hi)
            .map(|k| {
                let t = k as f64 * h;
                let r = (half_pi * t.sinh()).exp();
                (r, h * half_pi * t.cosh() * r)
            })
            .collect();
        ExpSinh { nodes }
    })
}

/// Fixed-level exp-sinh rule for a complex integrand on `[0, inf)`, with
/// the abscissae scaled by `scale`. Non-finite terms are treated as zero,
/// which is what an exponentially decaying integrand underflows to.
pub fn exp_sinh_complex<F: FnMut(f64) -> Complex64>(mut f: F, scale: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for &(r, w) in &exp_sinh_table().nodes {
        let v = f(scale * r) * (w * scale);
        if v.re.is_finite() && v.im.is_finite() {
            sum += v;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_polynomials_exactly() {
        let est = gauss_kronrod(&mut |x: f64| x.powi(6) - 3.0 * x, -1.0, 2.0);
        let exact = (2f64.powi(7) + 1.0) / 7.0 - 1.5 * (4.0 - 1.0);
        assert!((est.value - exact).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_kink() {
        let est = adaptive(|x: f64| (x - 0.3).abs(), &[0.0, 1.0], 1e-12, 0.0, 200);
        let exact = 0.5 * (0.09 + 0.49);
        assert!((est.value - exact).abs() < 1e-11, "{est:?}");
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2 and int_0^1 x^{0.3} = 1/1.3
        let v = tanh_sinh(|x: f64| x.powf(-0.5), 0.0, 1.0);
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        let v = tanh_sinh(|x: f64| x.powf(0.3), 0.0, 1.0);
        assert!((v - 1.0 / 1.3).abs() < 1e-14, "{v}");
    }

    #[test]
    fn exp_sinh_gamma_integrals() {
        // int_0^inf r e^{-r} dr = 1 and int_0^inf r^2 e^{-sqrt r} dr = 2 * 5! = 240
        let v = exp_sinh_complex(|r| Complex64::new(r * (-r).exp(), 0.0), 1.0);
        assert!((v.re - 1.0).abs() < 1e-13, "{v}");
        let v = exp_sinh_complex(|r| Complex64::new(r * r * (-r.sqrt()).exp(), 0.0), 1.0);
        assert!((v.re - 240.0).abs() < 1e-9, "{v}");
    }
}
