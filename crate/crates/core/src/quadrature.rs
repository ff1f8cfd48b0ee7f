//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Infinite endpoints are mapped onto a finite interval with
//! `x = a + s·t/(1−t)`, where `s` is a caller-supplied length scale. Kronrod
//! nodes are interior, so mapped endpoints are never evaluated.
#![allow(clippy::excessive_precision)] // tabulated nodes, kept as published

// Abscissae and weights from QUADPACK's qk15.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Length scale used when mapping an infinite endpoint.
    pub scale: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_intervals: 4000,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    let value = resk * half;
    let error = ((resk - resg) * half).abs();
    Segment { a, b, value, error }
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Integrates `f` over `[a, b]`; either endpoint may be infinite.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Integral {
        self.integrate_dyn(&f, a, b)
    }

    fn integrate_dyn(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Integral {
        if a == b {
            return Integral {
                value: 0.0,
                error: 0.0,
                intervals: 0,
                converged: true,
            };
        }
        if a > b {
            let r = self.integrate_dyn(f, b, a);
            return Integral {
                value: -r.value,
                ..r
            };
        }
        let s = self.scale;
        match (a.is_finite(), b.is_finite()) {
            (true, true) => self.finite(f, a, b),
            (true, false) => self.finite(
                &|t: f64| {
                    let d = 1.0 - t;
                    f(a + s * t / d) * s / (d * d)
                },
                0.0,
                1.0,
            ),
            (false, true) => self.finite(
                &|t: f64| {
                    let d = 1.0 - t;
                    f(b - s * t / d) * s / (d * d)
                },
                0.0,
                1.0,
            ),
            (false, false) => {
                let left = self.integrate_dyn(f, f64::NEG_INFINITY, 0.0);
                let right = self.integrate_dyn(f, 0.0, f64::INFINITY);
                Integral {
                    value: left.value + right.value,
                    error: left.error + right.error,
                    intervals: left.intervals + right.intervals,
                    converged: left.converged && right.converged,
                }
            }
        }
    }

    /// Integrates piecewise over consecutive breakpoints, which is how callers
    /// hand over known kinks or support edges.
    pub fn integrate_pieces<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> Integral {
        let mut total = Integral {
            value: 0.0,
            error: 0.0,
            intervals: 0,
            converged: true,
        };
        for w in breaks.windows(2) {
            let r = self.integrate_dyn(&f, w[0], w[1]);
            total.value += r.value;
            total.error += r.error;
            total.intervals += r.intervals;
            total.converged &= r.converged;
        }
        total
    }

    fn finite(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Integral {
        let mut segments = vec![kronrod(f, a, b)];
        loop {
            let value: f64 = segments.iter().map(|s| s.value).sum();
            let error: f64 = segments.iter().map(|s| s.error).sum();
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            let converged = error <= target || !error.is_finite() && !value.is_finite();
            if converged || segments.len() >= self.max_intervals {
                return Integral {
                    value,
                    error,
                    intervals: segments.len(),
                    converged: error <= target,
                };
            }
            let (worst, _) = segments
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
                .expect("at least one segment");
            let seg = segments.swap_remove(worst);
            let mid = 0.5 * (seg.a + seg.b);
            if mid <= seg.a || mid >= seg.b {
                // Interval can no longer be split in floating point.
                segments.push(Segment { error: 0.0, ..seg });
                continue;
            }
            segments.push(kronrod(f, seg.a, mid));
            segments.push(kronrod(f, mid, seg.b));
        }
    }
}

/// Convenience wrapper using default tolerances.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    Quadrature::default().integrate(f, a, b).value
}
