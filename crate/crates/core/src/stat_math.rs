//! Special functions that turn test statistics into p-values.
//!
//! `erfc` is the fdlibm rational approximation. The regularized upper
//! incomplete gamma function uses the series for `x < a + 1` and a modified
//! Lentz continued fraction otherwise.

#![allow(clippy::excessive_precision)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything below this is reported as exactly zero.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

const CLAMP_TOLERANCE: f64 = 1e-12;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 200_000;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityValue(f64);

impl ProbabilityValue {
    pub const ZERO: ProbabilityValue = ProbabilityValue(0.0);
    pub const ONE: ProbabilityValue = ProbabilityValue(1.0);

    /// Clamps a numerically evaluated probability into `[0, 1]`. Values
    /// further than 1e-12 outside the interval are a numerical fault.
    pub fn new(raw: f64) -> Result<Self> {
        if raw.is_nan() || !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&raw) {
            return Err(Error::Domain(format!("probability {raw} outside [0, 1]")));
        }
        let v = raw.clamp(0.0, 1.0);
        Ok(if v < UNDERFLOW_FLOOR {
            ProbabilityValue(0.0)
        } else {
            ProbabilityValue(v)
        })
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True when the value sits at the underflow floor.
    pub fn underflowed(self) -> bool {
        self.0 == 0.0
    }
}

impl From<ProbabilityValue> for f64 {
    fn from(p: ProbabilityValue) -> f64 {
        p.0
    }
}

// ---------------------------------------------------------------------------
// erfc
//
// Coefficients and method from FreeBSD /usr/src/lib/msun/src/s_erf.c:
//
// Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
// Developed at SunPro, a Sun Microsystems, Inc. business.
// Permission to use, copy, modify, and distribute this
// software is freely granted, provided that this notice
// is preserved.
// ---------------------------------------------------------------------------

const ERX: f64 = 8.45062911510467529297e-01;
const PP: [f64; 5] = [
    1.28379167095512558561e-01,
    -3.25042107247001499370e-01,
    -2.84817495755985104766e-02,
    -5.77027029648944159157e-03,
    -2.37630166566501626084e-05,
];
const QQ: [f64; 5] = [
    3.97917223959155352819e-01,
    6.50222499887672944485e-02,
    5.08130628187576562776e-03,
    1.32494738004321644526e-04,
    -3.96022827877536812320e-06,
];
const PA: [f64; 7] = [
    -2.36211856075265944077e-03,
    4.14856118683748331666e-01,
    -3.72207876035701323847e-01,
    3.18346619901161753674e-01,
    -1.10894694282396677476e-01,
    3.54783043256182359371e-02,
    -2.16637559486879084300e-03,
];
const QA: [f64; 6] = [
    1.06420880400844228286e-01,
    5.40397917702171048937e-01,
    7.18286544141962662868e-02,
    1.26171219808761642112e-01,
    1.36370839120290507362e-02,
    1.19844998467991074170e-02,
];
const RA: [f64; 8] = [
    -9.86494403484714822705e-03,
    -6.93858572707181764372e-01,
    -1.05586262253232909814e+01,
    -6.23753324503260060396e+01,
    -1.62396669462573470355e+02,
    -1.84605092906711035994e+02,
    -8.12874355063065934246e+01,
    -9.81432934416914548592e+00,
];
const SA: [f64; 8] = [
    1.96512716674392571292e+01,
    1.37657754143519042600e+02,
    4.34565877475229228821e+02,
    6.45387271733267880336e+02,
    4.29008140027567833386e+02,
    1.08635005541779435134e+02,
    6.57024977031928170135e+00,
    -6.04244152148580987438e-02,
];
const RB: [f64; 7] = [
    -9.86494292470009928597e-03,
    -7.99283237680523006574e-01,
    -1.77579549177547519889e+01,
    -1.60636384855821916062e+02,
    -6.37566443368389627722e+02,
    -1.02509513161107724954e+03,
    -4.83519191608651397019e+02,
];
const SB: [f64; 7] = [
    3.03380607434824582924e+01,
    3.25792512996573918826e+02,
    1.53672958608443695994e+03,
    3.19985821950859553908e+03,
    2.55305040643316442583e+03,
    4.74528541206955367215e+02,
    -2.24409524465858183362e+01,
];

/// Horner evaluation, `c[0] + z*c[1] + ...`.
fn poly(c: &[f64], z: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * z + k)
}

/// `1 + z*c[0] + z^2*c[1] + ...`
fn poly1(c: &[f64], z: f64) -> f64 {
    1.0 + z * poly(c, z)
}

/// Complementary error function.
pub fn erfc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("erfc of non-finite {x}")));
    }
    let negative = x < 0.0;
    let ax = x.abs();

    if ax < 0.84375 {
        let t = if ax < 1.3877787807814457e-17 {
            ax
        } else {
            let z = ax * ax;
            let y = poly(&PP, z) / poly1(&QQ, z);
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return Ok(if negative { 1.0 + t } else { 1.0 - t });
    }
    if ax < 1.25 {
        let s = ax - 1.0;
        let pq = poly(&PA, s) / poly1(&QA, s);
        return Ok(if negative { 1.0 + ERX + pq } else { 1.0 - ERX - pq });
    }
    if ax >= 28.0 {
        return Ok(if negative { 2.0 } else { 0.0 });
    }
    if negative && ax > 6.0 {
        return Ok(2.0);
    }
    let s = 1.0 / (ax * ax);
    let (r, q) = if ax < 1.0 / 0.35 {
        (poly(&RA, s), poly1(&SA, s))
    } else {
        (poly(&RB, s), poly1(&SB, s))
    };
    // Split ax so that exp(-ax^2) is evaluated without losing low bits.
    let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    let tail = (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + r / q).exp() / ax;
    Ok(if negative { 2.0 - tail } else { tail })
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> Result<f64> {
    Ok(0.5 * erfc(-x / std::f64::consts::SQRT_2)?)
}

// ---------------------------------------------------------------------------
// Gamma family
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(a)` for `a > 0`.
pub fn ln_gamma(a: f64) -> f64 {
    if a < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * a).sin()).ln() - ln_gamma(1.0 - a);
    }
    let a = a - 1.0;
    let mut sum = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (a + i as f64);
    }
    let t = a + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (a + 0.5) * t.ln() - t + sum.ln()
}

fn stirling_tail(a: f64) -> f64 {
    let inv = 1.0 / a;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `a ln x - x - ln Γ(a)`, the log of the common prefactor of both expansions.
fn log_prefactor(a: f64, x: f64) -> f64 {
    if a >= 10.0 {
        // Stirling form avoids cancelling two numbers of size a*ln(a).
        let t = (x - a) / a;
        a * (t.ln_1p() - t) + 0.5 * a.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            - stirling_tail(a)
    } else {
        a * x.ln() - x - ln_gamma(a)
    }
}

fn lower_series(a: f64, x: f64) -> Result<f64> {
    let mut denom = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum * log_prefactor(a, x).exp());
        }
    }
    Err(Error::Domain(format!("gamma series did not converge (a={a}, x={x})")))
}

fn upper_continued_fraction(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(log_prefactor(a, x).exp() * h);
        }
    }
    Err(Error::Domain(format!(
        "gamma continued fraction did not converge (a={a}, x={x})"
    )))
}

/// `Q(a, x) = Γ(a, x) / Γ(a)`.
pub fn regularized_gamma_q(a: f64, x: f64) -> Result<ProbabilityValue> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("gamma shape must be positive, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("gamma argument must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(ProbabilityValue::ONE);
    }
    if x.is_infinite() {
        return Ok(ProbabilityValue::ZERO);
    }
    let q = if x < a + 1.0 {
        1.0 - lower_series(a, x)?
    } else {
        upper_continued_fraction(a, x)?
    };
    ProbabilityValue::new(q)
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_survival(stat: f64, dof: u32) -> Result<ProbabilityValue> {
    if dof == 0 {
        return Err(Error::Domain("chi-square needs at least one degree of freedom".into()));
    }
    if !(stat >= 0.0) {
        return Err(Error::Domain(format!("chi-square statistic must be >= 0, got {stat}")));
    }
    regularized_gamma_q(f64::from(dof) / 2.0, stat / 2.0)
}
