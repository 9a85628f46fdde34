//! Density grids from a trapezoidal lattice in frequency space.
//!
//! A frequency lattice with step `h` reproduces the `2π/h`-periodization of
//! `q(t, ·)`. The spatial window is taken as exactly one period, so the grid
//! is evaluated by a 2D FFT and its lattice sum times the cell area equals
//! `e^{-tφ(0)} = 1` up to frequency truncation and rounding. Values near the
//! window edge include the heavy-tailed mass folded in from outside; the
//! leading-order size of that folding is reported as `aliasing_estimate`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::exponent::Symbol;
use crate::envelope::check_time;
use crate::error::{domain, Error, Result};
use crate::geometry::ConeUnion;
use crate::quad;

/// Axis-aligned spatial window `[lo, hi)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Window {
    /// `[-half_width, half_width)` on both axes.
    pub fn centered(half_width: f64) -> Self {
        Self {
            lo: [-half_width; 2],
            hi: [half_width; 2],
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            lo: [s * self.lo[0], s * self.lo[1]],
            hi: [s * self.hi[0], s * self.hi[1]],
        }
    }

    fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }
}

/// Quadrature bookkeeping written next to every grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureMeta {
    pub resolution: usize,
    /// Frequency lattice step per axis.
    pub xi_step: [f64; 2],
    /// Largest frequency magnitude per axis (Nyquist).
    pub xi_radius: [f64; 2],
    /// Bound on the discarded frequency mass, `(2π)^{-2}∫_{|ξ|>R} e^{-tc|ξ|^α}`.
    pub truncation_error: f64,
    /// Leading-order periodization error at the window center.
    pub aliasing_estimate: f64,
    /// Directional lower-bound constant `c` with `φ(ξ) >= c|ξ|^α`.
    pub lower_bound_constant: f64,
    pub clamp_floor: f64,
    pub clamped_points: usize,
    pub min_raw_value: f64,
    pub mass: f64,
}

/// `q(t, ·)` on a regular planar lattice, row-major with `x1` outer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub time: f64,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: QuadratureMeta,
}

impl DensityGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.x2.len() + j]
    }

    pub fn cell_area(&self) -> f64 {
        (self.x1[1] - self.x1[0]) * (self.x2[1] - self.x2[0])
    }

    /// Lattice sum times cell area.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    /// CSV with a `#` schema comment, then `x1,x2,q` rows in row-major order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# columns: x1 (f64, position), x2 (f64, position), q (f64, density at t = {})",
            self.time
        )?;
        writeln!(out, "x1,x2,q")?;
        for (i, a) in self.x1.iter().enumerate() {
            for (j, b) in self.x2.iter().enumerate() {
                writeln!(out, "{a},{b},{}", self.value(i, j))?;
            }
        }
        Ok(())
    }

    /// Machine-readable sidecar with the quadrature metadata.
    pub fn write_meta<W: Write>(&self, out: W) -> io::Result<()> {
        serde_json::to_writer_pretty(out, &self.meta).map_err(io::Error::other)
    }
}

/// Samples of `e^{-tφ(ξ)}` on the frequency lattice dual to a window.
#[derive(Debug, Clone)]
pub struct LatticeSymbol {
    time: f64,
    alpha: f64,
    window: Window,
    n: usize,
    xi: [Vec<f64>; 2],
    /// Row-major over (ξ1 index, ξ2 index).
    samples: Vec<f64>,
    lower_bound: f64,
}

impl LatticeSymbol {
    /// `resolution` points per axis; must be even so that `ξ = 0` and
    /// `x = 0` (for centered windows) are lattice points.
    pub fn new(t: f64, symbol: &Symbol, window: Window, resolution: usize) -> Result<Self> {
        check_time(t)?;
        if symbol.dimension() != 2 {
            return Err(Error::UnsupportedDimension {
                what: "lattice inversion",
                got: symbol.dimension(),
                need: 2,
            });
        }
        if resolution < 4 || resolution % 2 != 0 {
            return Err(domain(format!("resolution must be even and >= 4, got {resolution}")));
        }
        if !(window.width(0) > 0.0 && window.width(1) > 0.0) {
            return Err(domain("window must have positive width on both axes"));
        }
        let n = resolution;
        let xi = [0, 1].map(|a| {
            let h = 2.0 * PI / window.width(a);
            (0..n).map(|m| (m as f64 - (n / 2) as f64) * h).collect::<Vec<_>>()
        });
        let samples: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|m| {
                let xi1 = xi[0][m];
                xi[1]
                    .iter()
                    .map(move |&xi2| (-t * symbol.eval(&[xi1, xi2])).exp())
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(Self {
            time: t,
            alpha: symbol.alpha(),
            window,
            n,
            xi,
            samples,
            lower_bound: symbol.lower_bound().0,
        })
    }

    fn step(&self, axis: usize) -> f64 {
        2.0 * PI / self.window.width(axis)
    }

    fn prefactor(&self) -> f64 {
        self.step(0) * self.step(1) / (4.0 * PI * PI)
    }

    /// Direct lattice sum `(2π)^{-2} h1 h2 Σ e^{-tφ(ξ)} cos(x·ξ)` at one point.
    pub fn density_at(&self, x: &[f64; 2]) -> f64 {
        let n = self.n;
        let (c2, s2): (Vec<f64>, Vec<f64>) = self.xi[1].iter().map(|v| (x[1] * v).cos_sin()).unzip();
        let mut total = 0.0;
        for m in 0..n {
            let row = &self.samples[m * n..(m + 1) * n];
            let mut rc = 0.0;
            let mut rs = 0.0;
            for k in 0..n {
                rc += row[k] * c2[k];
                rs += row[k] * s2[k];
            }
            let (c1, s1) = (x[0] * self.xi[0][m]).cos_sin();
            total += c1 * rc - s1 * rs;
        }
        self.prefactor() * total
    }

    /// Whole-window grid by FFT.
    pub fn grid(&self) -> Result<DensityGrid> {
        let n = self.n;
        let lo = self.window.lo;
        let mut buf: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (m, k) = (idx / n, idx % n);
                let phase = -(lo[0] * self.xi[0][m] + lo[1] * self.xi[1][k]);
                Complex64::from_polar(self.samples[idx], phase)
            })
            .collect();
        let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
        for row in buf.chunks_exact_mut(n) {
            fft.process(row);
        }
        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
        for m in 0..n {
            for k in 0..n {
                t[k * n + m] = buf[m * n + k];
            }
        }
        for row in t.chunks_exact_mut(n) {
            fft.process(row);
        }
        // t[k * n + j] now holds output index (j, k).
        let pre = self.prefactor();
        let raw: Vec<f64> = (0..n * n)
            .map(|idx| {
                let (j, k) = (idx / n, idx % n);
                let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
                pre * sign * t[k * n + j].re
            })
            .collect();
        let floor = 1e-8 * self.time.powf(-2.0 / self.alpha);
        let min_raw = raw.iter().copied().fold(f64::INFINITY, f64::min);
        if min_raw < -floor {
            return Err(Error::Quadrature(format!(
                "lattice ripple {min_raw:e} below -{floor:e}; refine the window or resolution"
            )));
        }
        let clamped = raw.iter().filter(|v| **v < 0.0).count();
        let values: Vec<f64> = raw.into_iter().map(|v| v.max(0.0)).collect();
        let x = [0, 1].map(|a| {
            let dx = self.window.width(a) / n as f64;
            (0..n).map(|j| lo[a] + j as f64 * dx).collect::<Vec<_>>()
        });
        let [x1, x2] = x;
        let mut grid = DensityGrid {
            time: self.time,
            x1,
            x2,
            values,
            meta: QuadratureMeta {
                resolution: n,
                xi_step: [self.step(0), self.step(1)],
                xi_radius: [self.step(0) * (n / 2) as f64, self.step(1) * (n / 2) as f64],
                truncation_error: self.truncation_bound(),
                aliasing_estimate: 0.0,
                lower_bound_constant: self.lower_bound,
                clamp_floor: floor,
                clamped_points: clamped,
                min_raw_value: min_raw,
                mass: 0.0,
            },
        };
        grid.meta.mass = grid.mass();
        Ok(grid)
    }

    fn truncation_bound(&self) -> f64 {
        let r = self.step(0).min(self.step(1)) * (self.n / 2) as f64;
        let rate = self.time * self.lower_bound;
        let a = self.alpha;
        let upper = (r.powf(a) + 60.0 / rate).powf(1.0 / a);
        let est = quad::adaptive(|p: f64| (-rate * p.powf(a)).exp() * p, &[r, upper], 0.0, 1e-6, 200);
        est.value / (2.0 * PI)
    }
}

fn aliasing_estimate(v: &ConeUnion, alpha: f64, t: f64, window: &Window) -> f64 {
    let periods = [window.width(0), window.width(1)];
    let mut s = 0.0;
    for i in -64i32..=64 {
        for j in -64i32..=64 {
            if i == 0 && j == 0 {
                continue;
            }
            let z = [i as f64 * periods[0], j as f64 * periods[1]];
            if v.contains_raw(&z) {
                s += (z[0] * z[0] + z[1] * z[1]).powf(-(2.0 + alpha) / 2.0);
            }
        }
    }
    t * s
}

/// Periodized lattice inversion of `q(t, ·)` over `window`.
pub fn density_grid(t: f64, window: Window, resolution: usize, v: &ConeUnion, alpha: f64) -> Result<DensityGrid> {
    if v.dimension() != 2 {
        return Err(Error::UnsupportedDimension {
            what: "density grids",
            got: v.dimension(),
            need: 2,
        });
    }
    let symbol = Symbol::new(v, alpha)?;
    let lattice = LatticeSymbol::new(t, &symbol, window, resolution)?;
    let mut grid = lattice.grid()?;
    grid.meta.aliasing_estimate = aliasing_estimate(v, alpha, t, &window);
    Ok(grid)
}

trait CosSin {
    fn cos_sin(self) -> (f64, f64);
}

impl CosSin for f64 {
    fn cos_sin(self) -> (f64, f64) {
        let (s, c) = self.sin_cos();
        (c, s)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use super::*;
    use crate::geometry::{SymmetricCone, UnitVector};
    use crate::levy::DensityOracle;

    fn quarter_cone() -> ConeUnion {
        ConeUnion::single(SymmetricCone::new(UnitVector::from_angle(0.0), FRAC_PI_4).unwrap())
    }

    #[test]
    fn grid_mass_and_peak() {
        let g = density_grid(1.0, Window::centered(20.0), 64, &quarter_cone(), 1.0).unwrap();
        assert!((g.mass() - 1.0).abs() < 1e-10, "{}", g.mass());
        let (ic, jc) = (32, 32);
        assert_eq!(g.x1[ic], 0.0);
        let peak = g.value(ic, jc);
        assert!(g.values.iter().all(|v| *v <= peak));
    }

    #[test]
    fn grid_matches_direct_lattice_sum() {
        let v = quarter_cone();
        let sym = Symbol::new(&v, 1.2).unwrap();
        let lat = LatticeSymbol::new(0.7, &sym, Window::centered(6.0), 32).unwrap();
        let g = lat.grid().unwrap();
        for (i, j) in [(16, 16), (3, 29), (20, 7), (0, 0), (31, 12)] {
            let direct = lat.density_at(&[g.x1[i], g.x2[j]]);
            assert!(
                (direct - g.value(i, j)).abs() <= 1e-10 * direct.abs(),
                "({i},{j}): {direct} vs {}",
                g.value(i, j)
            );
        }
    }

    #[test]
    fn wide_period_lattice_agrees_with_polar_oracle() {
        // With a period of 400 the images at the origin are ~t/400^3.
        let v = quarter_cone();
        let oracle = DensityOracle::new(&v, 1.0).unwrap();
        let lat = LatticeSymbol::new(1.0, oracle.symbol(), Window::centered(200.0), 2048).unwrap();
        for x in [[0.0, 0.0], [0.5, 0.25], [0.0, 1.0]] {
            let polar = oracle.density(1.0, &x, 1e-10).unwrap().value;
            let lattice = lat.density_at(&x);
            assert!((lattice / polar - 1.0).abs() < 1e-4, "{x:?}: {lattice} vs {polar}");
        }
    }

    #[test]
    fn csv_layout() {
        let g = density_grid(1.0, Window::centered(4.0), 4, &quarter_cone(), 1.0).unwrap();
        let mut out = Vec::new();
        g.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "x1,x2,q");
        assert_eq!(lines.len(), 2 + 16);
        assert!(lines[2].starts_with("-4,-4,"));
        assert!(lines[3].starts_with("-4,-2,"));
    }

    #[test]
    fn rejects_odd_resolution() {
        assert!(density_grid(1.0, Window::centered(4.0), 5, &quarter_cone(), 1.0).is_err());
    }
}
