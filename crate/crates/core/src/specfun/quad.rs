//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! Finite segments are integrated directly; a semi-infinite tail `[x0, ∞)` is
//! mapped onto `[0, 1)` by `x = x0 + s·t/(1−t)`. All subintervals share one
//! priority pool, so refinement goes wherever the error is.

use crate::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// `[start, ∞)`.
    SemiInfinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            rel_tol: 0.0,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
enum Map {
    Identity,
    Tail { start: f64, scale: f64 },
}

impl Map {
    #[inline]
    fn apply(self, t: f64) -> (f64, f64) {
        match self {
            Map::Identity => (t, 1.0),
            Map::Tail { start, scale } => {
                let u = 1.0 - t;
                (start + scale * t / u, scale / (u * u))
            }
        }
    }
}

struct Segment {
    map: Map,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, map: Map, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut eval = |t: f64| {
        let (x, jac) = map.apply(t);
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else if x.is_finite() {
            v
        } else {
            0.0
        }
    };
    let fc = eval(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut values = [0.0f64; 21];
    values[10] = fc;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx);
        let f2 = eval(center + dx);
        values[j] = f1;
        values[20 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((values[j] - mean).abs() + (values[20 - j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

fn run<F: FnMut(f64) -> f64>(mut f: F, initial: Vec<(Map, f64, f64)>, opts: QuadOptions) -> Result<QuadResult> {
    let mut pool: Vec<Segment> = initial
        .into_iter()
        .filter(|(_, lo, hi)| hi > lo)
        .map(|(map, lo, hi)| {
            let (value, error) = gauss_kronrod(&mut f, map, lo, hi);
            Segment { map, lo, hi, value, error }
        })
        .collect();
    let mut evaluations = 21 * pool.len();
    loop {
        let total: f64 = pool.iter().map(|s| s.value).sum();
        let error: f64 = pool.iter().map(|s| s.error).sum();
        if !total.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                estimate: total,
                error_bound: error,
                evaluations,
            });
        }
        if error <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(QuadResult {
                value: total,
                abs_error: error,
                evaluations,
            });
        }
        let (worst, _) = pool
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let seg = &pool[worst];
        let mid = 0.5 * (seg.lo + seg.hi);
        let too_small = mid <= seg.lo || mid >= seg.hi || (seg.hi - seg.lo) < 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE);
        if pool.len() >= opts.max_intervals || too_small {
            return Err(Error::Quadrature {
                estimate: total,
                error_bound: error,
                evaluations,
            });
        }
        let (map, lo, hi) = (seg.map, seg.lo, seg.hi);
        let (v1, e1) = gauss_kronrod(&mut f, map, lo, mid);
        let (v2, e2) = gauss_kronrod(&mut f, map, mid, hi);
        evaluations += 42;
        pool[worst] = Segment { map, lo, hi: mid, value: v1, error: e1 };
        pool.push(Segment { map, lo: mid, hi, value: v2, error: e2 });
    }
}

/// Integrates `f` over `domain` to an absolute error below `tol`.
///
/// ```
/// use mimo_aging::specfun::{adaptive_quad, Domain};
/// let v = adaptive_quad(|x: f64| x * x * (-x).exp(), Domain::SemiInfinite(0.0), 1e-12).unwrap();
/// assert!((v - 2.0).abs() < 1e-12);
/// ```
pub fn adaptive_quad<F: FnMut(f64) -> f64>(f: F, domain: Domain, tol: f64) -> Result<f64> {
    integrate(f, domain, QuadOptions::absolute(tol)).map(|r| r.value)
}

pub fn integrate<F: FnMut(f64) -> f64>(f: F, domain: Domain, opts: QuadOptions) -> Result<QuadResult> {
    match domain {
        Domain::Finite(a, b) if a.is_finite() && b.is_finite() => {
            if b < a {
                integrate(f, Domain::Finite(b, a), opts).map(|r| QuadResult { value: -r.value, ..r })
            } else {
                run(f, vec![(Map::Identity, a, b)], opts)
            }
        }
        Domain::SemiInfinite(a) if a.is_finite() => integrate_piecewise(f, &[a], 1.0, opts),
        _ => Err(crate::error::domain("integration limits must be finite")),
    }
}

/// Integrates over `[breaks[0], ∞)`, splitting at the (sorted) breakpoints.
/// The tail beyond the last breakpoint is mapped with length scale `tail_scale`.
pub fn integrate_piecewise<F: FnMut(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tail_scale: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    if breaks.is_empty() || breaks.iter().any(|b| !b.is_finite()) || !(tail_scale > 0.0) {
        return Err(crate::error::domain("breakpoints must be finite and the tail scale positive"));
    }
    let mut initial: Vec<(Map, f64, f64)> = breaks.windows(2).map(|w| (Map::Identity, w[0], w[1])).collect();
    let start = *breaks.last().unwrap();
    initial.push((Map::Tail { start, scale: tail_scale }, 0.0, 1.0));
    run(f, initial, opts)
}

/// Breakpoints `[0, ...]` around a bump with the given mean and spread, used
/// when integrating densities on the half-line.
pub fn density_breaks(mean: f64, sd: f64) -> (Vec<f64>, f64) {
    let sd = if sd > 0.0 { sd } else { mean.max(1e-300) };
    let mut pts = vec![0.0];
    for k in [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let x = mean + k * sd;
        if x > *pts.last().unwrap() {
            pts.push(x);
        }
    }
    (pts, sd)
}
