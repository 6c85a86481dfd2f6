//! Auxiliary integrals over the fundamental triangle
//! `D(q, γ) = conv{(0,0), (q,0), (q, q tan γ)}`.
//!
//! ```text
//! K^(p)(r)    = ∫₀^r (1+t²)^{1+p/2} dt
//! J^(p)(q,γ)  = −γ + ∫₀^γ (1+q² sec²φ)^{1+p/2} dφ
//! M^(p)(q,γ)  = ∫₀^γ cos²φ [(1+q² sec²φ)^{1+p/2} − 1] dφ
//! I^(p)_ij    = ∫∫_{D(q,γ)} x^i y^j (1+x²+y²)^{p/2} dx dy
//! ```
//!
//! All three one-dimensional families are evaluated by upward recurrences in
//! steps of two starting from the parity-matched boundary `p = −2` or `p = −3`.

use serde::{Deserialize, Serialize};

use crate::{Error, Provenance, Result};

/// `x^{e/2}` for integer `e`.
#[inline]
pub(crate) fn pow_half(x: f64, e: i32) -> f64 {
    if e % 2 == 0 {
        x.powi(e / 2)
    } else {
        x.sqrt().powi(e)
    }
}

fn parity_start(p: i32) -> i32 {
    if p.rem_euclid(2) == 0 {
        -2
    } else {
        -3
    }
}

/// `K^(p)(r)`, odd in `r`.
pub fn k(p: i32, r: f64) -> f64 {
    assert!(p >= -3, "K^(p) needs p >= -3, got {p}");
    let start = parity_start(p);
    let mut acc = if start == -2 { r } else { r.asinh() };
    let s = 1.0 + r * r;
    let mut e = start + 2;
    while e <= p {
        let ef = e as f64;
        acc = (2.0 + ef) / (3.0 + ef) * acc + r * pow_half(s, 2 + e) / (3.0 + ef);
        e += 2;
    }
    acc
}

/// Runs the coupled J/M recurrence up to `p` and returns `(J^(p), M^(p))`.
fn jm(p: i32, q: f64, gamma: f64) -> (f64, f64) {
    assert!(p >= -3, "J^(p), M^(p) need p >= -3, got {p}");
    let start = parity_start(p);
    let q2 = q * q;
    let (mut jv, mut mv) = if start == -2 {
        (0.0, 0.0)
    } else {
        let (s, c) = gamma.sin_cos();
        let a = (s / (1.0 + q2).sqrt()).asin();
        (
            -gamma + a,
            0.5 * (1.0 - q2) * a - 0.5 * gamma + 0.5 * s * ((c * c + q2).sqrt() - c),
        )
    };
    if p == start {
        return (jv, mv);
    }
    // K^(e-2) at the common argument, carried along with the same parity.
    let arg = q * gamma.tan() / (1.0 + q2).sqrt();
    let sk = 1.0 + arg * arg;
    let mut kv = if start == -2 { arg } else { arg.asinh() };
    let mut e = start + 2;
    while e <= p {
        // M uses J^(e-2), so update it first.
        mv += q2 * (gamma + jv);
        jv += q * pow_half(1.0 + q2, 1 + e) * kv;
        let ef = e as f64;
        kv = (2.0 + ef) / (3.0 + ef) * kv + arg * pow_half(sk, 2 + e) / (3.0 + ef);
        e += 2;
    }
    (jv, mv)
}

/// `J^(p)(q, γ)`, odd in `γ`.
pub fn j(p: i32, q: f64, gamma: f64) -> f64 {
    jm(p, q, gamma).0
}

/// `M^(p)(q, γ)`.
pub fn m(p: i32, q: f64, gamma: f64) -> f64 {
    jm(p, q, gamma).1
}

/// The six supported monomials `x^i y^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Monomial {
    I00,
    I10,
    I01,
    I20,
    I11,
    I02,
}

impl Monomial {
    /// Coefficient order used by [`crate::irreducible::FundamentalPiece`].
    pub const ALL: [Monomial; 6] =
        [Monomial::I00, Monomial::I10, Monomial::I01, Monomial::I20, Monomial::I11, Monomial::I02];

    pub fn from_ij(i: u32, j: u32) -> Result<Self> {
        Ok(match (i, j) {
            (0, 0) => Monomial::I00,
            (1, 0) => Monomial::I10,
            (0, 1) => Monomial::I01,
            (2, 0) => Monomial::I20,
            (1, 1) => Monomial::I11,
            (0, 2) => Monomial::I02,
            _ => return Err(Error::UnsupportedMoment(i, j)),
        })
    }

    pub fn ij(self) -> (u32, u32) {
        match self {
            Monomial::I00 => (0, 0),
            Monomial::I10 => (1, 0),
            Monomial::I01 => (0, 1),
            Monomial::I20 => (2, 0),
            Monomial::I11 => (1, 1),
            Monomial::I02 => (0, 2),
        }
    }

    pub fn degree(self) -> i32 {
        let (i, j) = self.ij();
        (i + j) as i32
    }
}

/// A request for `I^(p)_ij(q, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxKey {
    pub p: i32,
    pub i: u32,
    pub j: u32,
    pub q: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxValue {
    pub value: f64,
    pub provenance: Provenance,
}

/// Closed-form `I^(p)_ij(q, γ)` without argument validation.
///
/// `γ < 0` is meaningful only for `I00`, which is extended as an odd function.
pub fn i_value(p: i32, mono: Monomial, q: f64, gamma: f64) -> f64 {
    if q == 0.0 || gamma == 0.0 {
        return 0.0;
    }
    let pf = p as f64;
    let q2 = q * q;
    let (s, c) = gamma.sin_cos();
    match mono {
        Monomial::I00 => j(p, q, gamma) / (2.0 + pf),
        Monomial::I10 => {
            let rq = (1.0 + q2).sqrt();
            (pow_half(1.0 + q2, 3 + p) * k(p, q * gamma.tan() / rq) - s * k(p, q / c)) / (2.0 + pf)
        }
        Monomial::I01 => (c * k(p, q / c) - k(p, q)) / (2.0 + pf),
        Monomial::I11 => {
            let sec2 = 1.0 / (c * c);
            (s * s + c * c * pow_half(1.0 + q2 * sec2, 4 + p) - pow_half(1.0 + q2, 4 + p))
                / ((2.0 + pf) * (4.0 + pf))
        }
        Monomial::I20 => m(p + 2, q, gamma) / (4.0 + pf) - m(p, q, gamma) / (2.0 + pf),
        Monomial::I02 => {
            let (j0, _) = jm(p, q, gamma);
            let (j2, m2) = jm(p + 2, q, gamma);
            let m0 = m(p, q, gamma);
            let i20 = m2 / (4.0 + pf) - m0 / (2.0 + pf);
            j2 / (4.0 + pf) - j0 / (2.0 + pf) - i20
        }
    }
}

/// `I^(p)_ij(q, γ)` with argument validation.
pub fn i(p: i32, i: u32, j: u32, q: f64, gamma: f64) -> Result<AuxValue> {
    let mono = Monomial::from_ij(i, j)?;
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    if !(q.is_finite() && q >= 0.0) || !gamma.is_finite() || gamma.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::Input(format!("need q >= 0 and |gamma| < pi/2, got q={q}, gamma={gamma}")));
    }
    if gamma < 0.0 && mono != Monomial::I00 {
        return Err(Error::Input("negative gamma is only defined for I00".into()));
    }
    Ok(AuxValue { value: i_value(p, mono, q, gamma), provenance: Provenance::ClosedForm })
}

/// `I^(p)_ij(h, ζ, γ) = h^{2+p+i+j} I^(p)_ij(ζ/h, γ)`.
pub fn i_scaled(p: i32, i: u32, j: u32, h: f64, zeta: f64, gamma: f64) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::HZero);
    }
    let v = self::i(p, i, j, zeta / h, gamma)?.value;
    Ok(h.powi(2 + p + (i + j) as i32) * v)
}
