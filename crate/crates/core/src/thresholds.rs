//! Asymptotic load thresholds of irregular cuckoo hashing where a fraction
//! `p_i` of the keys has `d_i` in `(2, 4, 8)` candidate cells.
//!
//! Non-trivial fixed points are parametrized by `lambda > 0`:
//!
//! ```text
//! g_A(p)    = sum_i (p_i d_i / d_bar) (1 - p)^(d_i - 1)
//! q(lambda) = g_A(exp(-lambda))
//! c(lambda) = lambda / (q(lambda) d_bar)
//! F(lambda) = 1 - sum_i p_i (1 - exp(-lambda))^d_i
//!               + g_A(exp(-lambda)) d_bar / lambda * (1 - exp(-lambda) (1 + lambda))
//! ```
//!
//! The threshold is `c(lambda*)` for the largest root `lambda*` of
//! `F(lambda) - 1`. When `F < 1` already for `lambda -> 0+` (a positive
//! fraction of two-choice keys), the limit `c(0+) = 1 / (2 p_1)` bounds the
//! threshold as well; the smaller of the two is returned.

use crate::error::{Error, Result};

pub const DEGREES: [u32; 3] = [2, 4, 8];

/// Smallest and largest `lambda` of the root scan.
pub const SCAN_RANGE: (f64, f64) = (1e-4, 50.0);

/// Log-spaced scan points.
pub const SCAN_POINTS: usize = 100_000;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Fractions of keys with 2, 4 and 8 candidate cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMix {
    p: [f64; 3],
    d_bar: f64,
}

impl ClassMix {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let p = [p1, p2, p3];
        if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidConfig(format!(
                "class fractions {p:?} outside [0, 1]"
            )));
        }
        if ((p1 + p2 + p3) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "class fractions {p:?} do not sum to 1"
            )));
        }
        let d_bar = p.iter().zip(DEGREES).map(|(&pi, d)| pi * d as f64).sum();
        Ok(Self { p, d_bar })
    }

    /// Mix with `p3 = 1 - p1 - p2`.
    pub fn from_p1_p2(p1: f64, p2: f64) -> Result<Self> {
        let p3 = 1.0 - p1 - p2;
        // absorb rounding of the complement
        let p3 = if p3.abs() < 1e-12 { 0.0 } else { p3 };
        Self::new(p1, p2, p3)
    }

    /// Configurations with two bits of storage per key: `A` = 0/100/0,
    /// `B` = 10/80/10, `C` = 33/34/33, `D` = 50/0/50. Also accepts
    /// `binary` (100/0/0) and explicit percentages such as `20/60/20`.
    pub fn named(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "A" => Self::new(0.0, 1.0, 0.0),
            "B" => Self::new(0.1, 0.8, 0.1),
            "C" => Self::new(0.33, 0.34, 0.33),
            "D" => Self::new(0.5, 0.0, 0.5),
            "BINARY" => Self::new(1.0, 0.0, 0.0),
            other => {
                let parts: Vec<&str> = other.split('/').collect();
                let pct: Vec<f64> = parts
                    .iter()
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidConfig(format!("unknown configuration {name:?}")))?;
                match pct[..] {
                    [a, b, c] => Self::new(a / 100.0, b / 100.0, c / 100.0),
                    _ => Err(Error::InvalidConfig(format!(
                        "unknown configuration {name:?}"
                    ))),
                }
            }
        }
    }

    pub fn p(&self) -> [f64; 3] {
        self.p
    }

    pub fn p1(&self) -> f64 {
        self.p[0]
    }

    pub fn p2(&self) -> f64 {
        self.p[1]
    }

    pub fn p3(&self) -> f64 {
        self.p[2]
    }

    /// Mean number of candidate cells.
    pub fn d_bar(&self) -> f64 {
        self.d_bar
    }

    /// Average bits needed to store a function index.
    pub fn bits_per_key(&self) -> f64 {
        self.p[0] + 2.0 * self.p[1] + 3.0 * self.p[2]
    }
}

/// One point of the parametrized fixed-point curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCurvePoint {
    pub lambda: f64,
    pub q: f64,
    pub c: f64,
    pub f: f64,
}

/// Size-biased survival mixture `g_A(p)`.
pub fn g_a(p_val: f64, mix: &ClassMix) -> f64 {
    g_a_complement(1.0 - p_val, mix)
}

/// `g_A` as a function of `1 - p`, for accuracy near `p = 1`.
fn g_a_complement(one_minus_p: f64, mix: &ClassMix) -> f64 {
    mix.p
        .iter()
        .zip(DEGREES)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, d)| pi * d as f64 / mix.d_bar * one_minus_p.powi(d as i32 - 1))
        .sum()
}

/// `F(lambda)` evaluated literally.
pub fn f_of_lambda(lambda: f64, mix: &ClassMix) -> f64 {
    let e = (-lambda).exp();
    let survival: f64 = mix
        .p
        .iter()
        .zip(DEGREES)
        .map(|(&pi, d)| pi * (1.0 - e).powi(d as i32))
        .sum();
    1.0 - survival + g_a(e, mix) * mix.d_bar / lambda * (1.0 - e * (1.0 + lambda))
}

/// `1 - exp(-x) (1 + x)` without cancellation for small `x`.
fn one_minus_exp_poly(x: f64) -> f64 {
    if x > 0.5 {
        return 1.0 - (-x).exp() * (1.0 + x);
    }
    // sum_{k >= 2} (-1)^k (k - 1) x^k / k!
    let mut term = x; // x^k / k! for k = 1
    let mut sum = 0.0;
    for k in 2..30 {
        term *= x / k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (k - 1) as f64 * term;
    }
    sum
}

/// `F(lambda) - 1`, computed without subtracting nearly equal quantities.
pub fn f_minus_one(lambda: f64, mix: &ClassMix) -> f64 {
    let one_minus_e = -(-lambda).exp_m1();
    let survival: f64 = mix
        .p
        .iter()
        .zip(DEGREES)
        .map(|(&pi, d)| pi * one_minus_e.powi(d as i32))
        .sum();
    g_a_complement(one_minus_e, mix) * mix.d_bar / lambda * one_minus_exp_poly(lambda) - survival
}

pub fn q_of_lambda(lambda: f64, mix: &ClassMix) -> f64 {
    g_a_complement(-(-lambda).exp_m1(), mix)
}

pub fn c_of_lambda(lambda: f64, mix: &ClassMix) -> f64 {
    lambda / (q_of_lambda(lambda, mix) * mix.d_bar)
}

pub fn curve_point(lambda: f64, mix: &ClassMix) -> ThresholdCurvePoint {
    ThresholdCurvePoint {
        lambda,
        q: q_of_lambda(lambda, mix),
        c: c_of_lambda(lambda, mix),
        f: f_of_lambda(lambda, mix),
    }
}

/// Result of [`solve_threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// Largest root of `F - 1`, if any.
    pub lambda_star: Option<f64>,
    /// Load threshold.
    pub c_star: f64,
}

/// Load threshold of `mix`; the root is refined by bisection until the
/// bracket is narrower than `tol`.
pub fn solve_threshold(mix: &ClassMix, tol: f64) -> Result<Threshold> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidValue(format!("tolerance {tol}")));
    }
    let (lo, hi) = SCAN_RANGE;
    let ratio = (hi / lo).ln();
    let grid = |k: usize| lo * (ratio * k as f64 / (SCAN_POINTS - 1) as f64).exp();

    let mut root = None;
    let mut upper = f_minus_one(grid(SCAN_POINTS - 1), mix);
    for k in (0..SCAN_POINTS - 1).rev() {
        let lower = f_minus_one(grid(k), mix);
        if (lower >= 0.0) != (upper >= 0.0) {
            root = Some(bisect(mix, grid(k), grid(k + 1), tol));
            break;
        }
        upper = lower;
    }

    // F < 1 arbitrarily close to 0: the two-choice keys alone bound the load
    let near_zero = (f_minus_one(lo, mix) < 0.0 && mix.p1() > 0.0).then(|| 0.5 / mix.p1());
    let at_root = root.map(|l| c_of_lambda(l, mix));
    match (at_root, near_zero) {
        (Some(c), Some(z)) if z < c => Ok(Threshold {
            lambda_star: root,
            c_star: z,
        }),
        (Some(c), _) => Ok(Threshold {
            lambda_star: root,
            c_star: c,
        }),
        (None, Some(z)) => Ok(Threshold {
            lambda_star: None,
            c_star: z,
        }),
        (None, None) => Err(Error::InvalidValue(
            "no nontrivial root, threshold undefined for this mix".into(),
        )),
    }
}

fn bisect(mix: &ClassMix, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let fa_positive = f_minus_one(a, mix) >= 0.0;
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if (f_minus_one(mid, mix) >= 0.0) == fa_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
