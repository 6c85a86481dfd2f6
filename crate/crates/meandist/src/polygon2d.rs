//! Distance moments in the regular `n`-gon with circumradius 1.
//!
//! Vertices are `V_i = (cos 2πi/n, sin 2πi/n)` and edges `E_i = V_i V_{i+1}`.
//! The self-moment `P_22` reduces, by scaling about the centre and then about
//! `V_0`, to edge–vertex integrals
//!
//! ```text
//! P_{E_x V_0} = 2^p (s_x s_{x+1})^{1+p} csc(π/n) ∫_{πx/n}^{π(x+1)/n} csc^{2+p} ζ dζ
//! ```
//!
//! with `s_x = sin(πx/n)`, which are closed forms for integer `p`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use crate::sum::Sum;
use crate::{Error, Result};

/// Exponent of a polygon query: an integer moment, or the scaled limit
/// `lim_{p→−2⁺} (2+p) L^(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exponent {
    Int(i32),
    LimitMinus2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonQuery {
    pub n: u32,
    pub p: Exponent,
    /// Circumradius.
    pub scale: f64,
}

impl PolygonQuery {
    pub fn new(n: u32, p: i32) -> Self {
        Self { n, p: Exponent::Int(p), scale: 1.0 }
    }

    pub fn evaluate(&self) -> Result<f64> {
        if !(self.scale > 0.0) {
            return Err(Error::Input(format!("scale must be positive, got {}", self.scale)));
        }
        match self.p {
            Exponent::Int(p) => Ok(polygon_moment(self.n, p)? * self.scale.powi(p)),
            Exponent::LimitMinus2 => Ok(limit_minus2_reduction(self.n)? / (self.scale * self.scale)),
        }
    }
}

fn check_n(n: u32) -> Result<()> {
    if n < 3 {
        return Err(Error::Input(format!("a polygon needs n >= 3, got {n}")));
    }
    Ok(())
}

fn check_p(p: i32) -> Result<()> {
    if p < -1 {
        return Err(Error::POutOfRange(p));
    }
    Ok(())
}

/// `vol K = (n/2) sin(2π/n)`.
pub fn area(n: u32) -> f64 {
    0.5 * n as f64 * (2.0 * PI / n as f64).sin()
}

/// Edge length `2 sin(π/n)`.
pub fn side(n: u32) -> f64 {
    2.0 * (PI / n as f64).sin()
}

/// `∫_a^b csc^m ζ dζ` for `0 < a ≤ b < π` and integer `m ≥ 0`, by the upward
/// reduction `I_m = [−csc^{m−2} cot / (m−1)] + (m−2)/(m−1) I_{m−2}`.
pub fn csc_power_integral(m: i32, a: f64, b: f64) -> f64 {
    assert!(m >= 0, "csc power must be non-negative, got {m}");
    let mut acc = if m % 2 == 0 { b - a } else { ((b / 2.0).tan() / (a / 2.0).tan()).ln() };
    let (cot_a, cot_b) = (1.0 / a.tan(), 1.0 / b.tan());
    let (csc_a, csc_b) = (1.0 / a.sin(), 1.0 / b.sin());
    let mut k = if m % 2 == 0 { 2 } else { 3 };
    while k <= m {
        let kf = k as f64;
        let edge = csc_b.powi(k - 2) * cot_b - csc_a.powi(k - 2) * cot_a;
        acc = -edge / (kf - 1.0) + (kf - 2.0) / (kf - 1.0) * acc;
        k += 2;
    }
    acc
}

/// Shared trigonometric data for one `n`.
struct Ngon {
    n: u32,
    w: f64,
}

impl Ngon {
    fn new(n: u32) -> Self {
        Self { n, w: PI / n as f64 }
    }

    fn s(&self, x: f64) -> f64 {
        (self.w * x).sin()
    }

    /// `P_{E_x V_0}` for real `x`; zero at the two edges incident to `V_0`.
    fn ev(&self, x: f64, p: i32) -> f64 {
        if x == 0.0 || x == (self.n - 1) as f64 {
            return 0.0;
        }
        let w = self.w;
        let ss = self.s(x) * self.s(x + 1.0);
        2f64.powi(p) * ss.powi(1 + p) / w.sin() * csc_power_integral(p + 2, w * x, w * (x + 1.0))
    }

    /// `d/dx P_{E_x V_0}`.
    fn ev_prime(&self, x: f64, p: i32) -> f64 {
        let w = self.w;
        let (a, b) = (w * x, w * (x + 1.0));
        let ss = a.sin() * b.sin();
        let pre = 2f64.powi(p) / w.sin();
        let int = csc_power_integral(p + 2, a, b);
        let d_ss = (1 + p) as f64 * ss.powi(1 + p) * w * (1.0 / a.tan() + 1.0 / b.tan());
        let d_int = w * (b.sin().powi(-(p + 2)) - a.sin().powi(-(p + 2)));
        pre * (d_ss * int + ss.powi(1 + p) * d_int)
    }

    /// `P_{E_x ∂E_0}` by its defining quotient; at `x = n/2` the quotient is
    /// 0/0 and is replaced by its limit.
    fn e_boundary(&self, i: u32, p: i32) -> f64 {
        let w = self.w;
        let x = i as f64;
        if 2 * i == self.n {
            // L'Hôpital on g(x)/cos(wx) with g(x) = s_{x+1} P_{E_x V_0} − s_{x−1} P_{E_{x−1} V_0}.
            let g_prime = w * (w * (x + 1.0)).cos() * self.ev(x, p) + self.s(x + 1.0) * self.ev_prime(x, p)
                - w * (w * (x - 1.0)).cos() * self.ev(x - 1.0, p)
                - self.s(x - 1.0) * self.ev_prime(x - 1.0, p);
            return 0.5 / w.sin() * g_prime / (-w);
        }
        let g = self.s(x + 1.0) * self.ev(x, p) - self.s(x - 1.0) * self.ev(x - 1.0, p);
        0.5 / w.sin() / (w * x).cos() * g
    }

    /// `Σ_{i=1}^{n−2} s_i s_{i+1} (2 P_{E_i ∂E_0} + P_{E_i V_0})`.
    fn unified_sum(&self, p: i32) -> f64 {
        let mut acc = Sum::default();
        for i in 1..self.n - 1 {
            let x = i as f64;
            acc.add(self.s(x) * self.s(x + 1.0) * (2.0 * self.e_boundary(i, p) + self.ev(x, p)));
        }
        acc.value()
    }
}

fn denominator(p: i32) -> f64 {
    ((4 + p) * (3 + p) * (2 + p)) as f64
}

/// `P_{E_i V_0} = L^(p)` between edge `E_i` and vertex `V_0`, `1 ≤ i ≤ n−2`.
pub fn edge_vertex_moment(n: u32, i: u32, p: i32) -> Result<f64> {
    check_n(n)?;
    check_p(p)?;
    if i < 1 || i > n - 2 {
        return Err(Error::IndexRange(format!("edge index {i} outside 1..={}", n - 2)));
    }
    Ok(Ngon::new(n).ev(i as f64, p))
}

/// `L^(p)_22` of the regular `n`-gon, dispatching on the parity of `n`.
pub fn polygon_moment(n: u32, p: i32) -> Result<f64> {
    check_n(n)?;
    check_p(p)?;
    if n % 2 == 1 {
        Ok(polygon_moment_odd(n, p))
    } else {
        Ok(polygon_moment_even(n, p))
    }
}

/// Odd `n`: every `E_i`, `E_0` pair is reduced about the meet of their lines.
fn polygon_moment_odd(n: u32, p: i32) -> f64 {
    let g = Ngon::new(n);
    let w = g.w;
    let mut acc = Sum::default();
    for i in 1..n - 1 {
        let x = i as f64;
        let (a, b) = (w * x, w * (x + 1.0));
        let ss = a.sin() * b.sin();
        acc.add(ss.powi(3 + p) / (a.cos() * b.cos()) * csc_power_integral(p + 2, a, b));
    }
    -(2f64.powi(4 + p)) / (w.cos() * w.sin()) / (n as f64 * denominator(p)) * acc.value()
}

/// Even `n`: the opposite edge `E_{n/2}` is parallel to `E_0` and enters
/// through its overlap integral.
fn polygon_moment_even(n: u32, p: i32) -> f64 {
    let g = Ngon::new(n);
    let w = g.w;
    let (c, s) = (w.cos(), w.sin());
    let half = n / 2;
    let mut acc = Sum::default();
    for i in 1..half.saturating_sub(1) {
        let x = i as f64;
        let (a, b) = (w * x, w * (x + 1.0));
        acc.add((a.sin() * b.sin()).powi(2) / (a.cos() * b.cos()) * g.ev(x, p));
    }
    let opposite = c * (3.0 + p as f64 + (c / s).powi(2)) * g.ev(half as f64, p);
    let overlap = 2f64.powi(p) * c / (s * s) * (1.0 - c.powi(2 + p));
    32.0 / c / (n as f64 * denominator(p)) * (opposite - overlap - acc.value())
}

/// `L^(p)_22` through the parity-free form, with `P_{E_{n/2} ∂E_0}` taken as
/// a limit for even `n`.
pub fn polygon_moment_unified(n: u32, p: i32) -> Result<f64> {
    check_n(n)?;
    check_p(p)?;
    let g = Ngon::new(n);
    Ok(16.0 / g.w.cos() / (n as f64 * denominator(p)) * g.unified_sum(p))
}

/// `P_{E_{n/2} ∂E_0}` for even `n` in closed form:
/// `(2+p) P_{E_{n/2} V_0} − 2^p csc²(π/n) (1 − cos^{2+p}(π/n))`.
pub fn opposite_edge_boundary(n: u32, p: i32) -> Result<f64> {
    check_n(n)?;
    check_p(p)?;
    if n % 2 == 1 {
        return Err(Error::Input(format!("n = {n} has no opposite edge")));
    }
    let g = Ngon::new(n);
    let (c, s) = (g.w.cos(), g.w.sin());
    Ok((2 + p) as f64 * g.ev((n / 2) as f64, p) - 2f64.powi(p) / (s * s) * (1.0 - c.powi(2 + p)))
}

/// `P_{E_{n/2} ∂E_0}` from the limit of the defining quotient.
pub fn opposite_edge_boundary_limit(n: u32, p: i32) -> Result<f64> {
    check_n(n)?;
    check_p(p)?;
    if n % 2 == 1 {
        return Err(Error::Input(format!("n = {n} has no opposite edge")));
    }
    Ok(Ngon::new(n).e_boundary(n / 2, p))
}

fn delta(j: u32, n: u32) -> f64 {
    if j == n {
        1.0
    } else {
        0.0
    }
}

/// Cosine-polynomial forms of the even moments, `p ∈ {2, 4, …, 14}`.
pub fn even_moment_closed(n: u32, p: i32) -> Result<f64> {
    check_n(n)?;
    let cosk = |k: f64| (2.0 * PI * k / n as f64).cos();
    let poly = |coeffs: &[f64], den: f64| coeffs.iter().enumerate().map(|(k, a)| a * cosk(k as f64)).sum::<f64>() / den;
    let d = |j| delta(j, n);
    let sqrt5 = 5f64.sqrt();
    let v = match p {
        2 => poly(&[2.0, 1.0], 3.0),
        4 => poly(&[77.0, 64.0, 9.0], 90.0),
        6 => poly(&[628.0, 661.0, 164.0, 17.0], 420.0) - d(3) / 50.0,
        8 => poly(&[4921.0, 5936.0, 1974.0, 368.0, 31.0], 1575.0) - 16.0 * d(3) / 175.0 + 2.0 * d(4) / 225.0,
        10 => {
            poly(&[30476.0, 40162.0, 16072.0, 4093.0, 628.0, 45.0], 4158.0) - 15.0 * d(3) / 49.0 + 4.0 * d(4) / 63.0
                - 2.0 * d(5) / 441.0
        }
        12 => {
            poly(&[15673314.0, 21975552.0, 10006023.0, 3122432.0, 661402.0, 87296.0, 5461.0], 840840.0)
                - 2847.0 * d(3) / 3080.0
                + 668.0 * d(4) / 2205.0
                - (17.0 + sqrt5) / 441.0 * d(5)
                + d(6) / 392.0
        }
        14 => {
            poly(&[15540360.0, 22811745.0, 11429660.0, 4126221.0, 1081192.0, 198713.0, 23124.0, 1285.0], 308880.0)
                - 384.0 * d(3) / 143.0
                + 1816.0 * d(4) / 1485.0
                - (3057.0 + 331.0 * sqrt5) / 14256.0 * d(5)
                + 11.0 * d(6) / 360.0
                - d(7) / 648.0
        }
        _ => return Err(Error::POutOfRange(p)),
    };
    Ok(v)
}

/// `L^(p)` in the unit disk, `2^{4+p} Γ((3+p)/2) / ((2+p)(4+p) √π Γ(2+p/2))`.
pub fn disk_moment(p: f64) -> f64 {
    assert!(p > -2.0, "disk moment needs p > -2, got {p}");
    2f64.powf(4.0 + p) * gamma((3.0 + p) / 2.0) / ((2.0 + p) * (4.0 + p) * PI.sqrt() * gamma(2.0 + p / 2.0))
}

/// `lim_{p→−2⁺} (2+p) L^(p)_22 = 4π / (n sin(2π/n))`.
pub fn limit_minus2_formula(n: u32) -> Result<f64> {
    check_n(n)?;
    Ok(4.0 * PI / (n as f64 * (2.0 * PI / n as f64).sin()))
}

/// The same limit from the reduction: the factor `(2+p)` cancels and the
/// remaining sum is evaluated at `p = −2`.
pub fn limit_minus2_reduction(n: u32) -> Result<f64> {
    check_n(n)?;
    let g = Ngon::new(n);
    Ok(16.0 / g.w.cos() / (n as f64 * 2.0) * g.unified_sum(-2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub n: u32,
    /// `lim (2+p) L^(p)_22` from the printed formula.
    pub limit_minus2: f64,
    /// The same limit from the reduction.
    pub limit_minus2_reduction: f64,
    /// `2π / vol K`, the value for any planar convex body.
    pub limit_minus2_area: f64,
    /// `P_22d(1) = 128/(45π)`.
    pub disk_mean: f64,
    /// `(1 − π²/(3n²)) P_22d(1)`.
    pub asymptotic_mean: f64,
    pub mean: f64,
}

pub fn polygon_limit_checks(n: u32) -> Result<LimitReport> {
    check_n(n)?;
    let disk = disk_moment(1.0);
    let nf = n as f64;
    Ok(LimitReport {
        n,
        limit_minus2: limit_minus2_formula(n)?,
        limit_minus2_reduction: limit_minus2_reduction(n)?,
        limit_minus2_area: 2.0 * PI / area(n),
        disk_mean: disk,
        asymptotic_mean: (1.0 - PI * PI / (3.0 * nf * nf)) * disk,
        mean: polygon_moment(n, 1)?,
    })
}
