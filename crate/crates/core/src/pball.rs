//! Unit p-balls: Hölder conjugation, the t-parameter, volume and the
//! coordinate second moment.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gamma::ln_gamma_unchecked as lg;

/// Finite exponents below `1 + SNAP` are treated as exactly 1.
pub const SNAP: f64 = 1e-12;

/// Largest supported dimension.
pub const MAX_DIMENSION: u32 = 1_000_000;

/// An exponent `p ∈ [1, ∞]` together with its Hölder conjugate.
///
/// Both members of the pair are stored, so conjugation is an exact swap and
/// `p = ∞` is represented exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent {
    p: f64,
    q: f64,
}

impl Exponent {
    pub const ONE: Exponent = Exponent { p: 1.0, q: f64::INFINITY };
    pub const TWO: Exponent = Exponent { p: 2.0, q: 2.0 };
    pub const INFINITY: Exponent = Exponent { p: f64::INFINITY, q: 1.0 };

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("exponent must satisfy p >= 1, got {p}")));
        }
        if p == f64::INFINITY {
            return Ok(Self::INFINITY);
        }
        if p < 1.0 + SNAP {
            return Ok(Self::ONE);
        }
        if p == 2.0 {
            return Ok(Self::TWO);
        }
        Ok(Self { p, q: p / (p - 1.0) })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.p == f64::INFINITY
    }

    /// True for the endpoints `p = 1` and `p = ∞`, where `t = 0`.
    pub fn is_endpoint(&self) -> bool {
        self.p == 1.0 || self.q == 1.0
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn inv_p(&self) -> f64 {
        recip(self.p)
    }

    /// `1/q`, with `1/∞ = 0`.
    pub fn inv_q(&self) -> f64 {
        recip(self.q)
    }

    /// `t = 1/(pq) = (p − 1)/p²`, conjugation invariant, in `[0, 1/4]`.
    pub fn t(&self) -> f64 {
        if self.is_endpoint() {
            0.0
        } else if self.p == 2.0 {
            0.25
        } else {
            self.inv_p() * self.inv_q()
        }
    }
}

fn recip(v: f64) -> f64 {
    if v == f64::INFINITY {
        0.0
    } else {
        1.0 / v
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.p)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Decimal literals or the token `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Self::INFINITY);
        }
        let looks_decimal =
            !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
        let v: f64 = if looks_decimal { s.parse().ok() } else { None }
            .ok_or_else(|| Error::Argument(format!("cannot parse exponent {s:?}")))?;
        if !v.is_finite() {
            return Err(Error::Argument(format!("cannot parse exponent {s:?}")));
        }
        Self::new(v)
    }
}

/// Hölder conjugate: `1/p + 1/q = 1`.
pub fn conjugate(p: Exponent) -> Exponent {
    Exponent { p: p.q, q: p.p }
}

/// Dimension `n ∈ [1, 10⁶]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Range("dimension must be at least 1".into()));
        }
        if n > MAX_DIMENSION {
            return Err(Error::Range(format!("dimension {n} exceeds {MAX_DIMENSION}")));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn pow2(n: u32) -> f64 {
    if n < 1024 {
        2f64.powi(n as i32)
    } else {
        (n as f64 * LN_2).exp()
    }
}

/// `m!` as a float; exact for `m ≤ 22`.
fn factorial(m: u32) -> f64 {
    if m <= 22 {
        (1..=m as u64).map(|v| v as f64).product()
    } else {
        lg(m as f64 + 1.0).exp()
    }
}

/// `ln |B_p^m|` for `m ≥ 0` and finite `p`: `m·ln(2Γ(1 + 1/p)) − ln Γ(1 + m/p)`.
fn ln_volume_finite(m: u32, p: f64) -> f64 {
    let ip = 1.0 / p;
    m as f64 * (LN_2 + lg(1.0 + ip)) - lg(1.0 + m as f64 * ip)
}

/// `ln |B_p^n|`.
pub fn ln_volume(n: Dimension, p: Exponent) -> f64 {
    let m = n.as_f64();
    if p.is_infinite() {
        m * LN_2
    } else if p.p() == 1.0 {
        m * LN_2 - lg(m + 1.0)
    } else {
        ln_volume_finite(n.get(), p.p())
    }
}

/// Volume of the unit p-ball, `[2Γ(1 + 1/p)]ⁿ / Γ(1 + n/p)`.
pub fn volume(n: Dimension, p: Exponent) -> f64 {
    if p.is_infinite() {
        pow2(n.get())
    } else if p.p() == 1.0 && n.get() <= 22 {
        pow2(n.get()) / factorial(n.get())
    } else {
        ln_volume(n, p).exp()
    }
}

/// `ln ∫_{B_p^n} x₁² dx`.
pub fn ln_second_moment_integral(n: Dimension, p: Exponent) -> f64 {
    let m = n.as_f64();
    if p.is_infinite() {
        m * LN_2 - 3f64.ln()
    } else if p.p() == 1.0 {
        (m + 1.0) * LN_2 - lg(m + 3.0)
    } else {
        // slice at height x₁ = s is a scaled (n−1)-ball
        let pv = p.p();
        let ip = 1.0 / pv;
        (2.0 * ip).ln() + ln_volume_finite(n.get() - 1, pv) + lg(3.0 * ip) + lg(1.0 + (m - 1.0) * ip)
            - lg(1.0 + (m + 2.0) * ip)
    }
}

/// `φ(p) = ∫_{B_p^n} x₁² dx`.
pub fn second_moment_integral(n: Dimension, p: Exponent) -> f64 {
    if p.is_infinite() {
        pow2(n.get()) / 3.0
    } else if p.p() == 1.0 && n.get() <= 20 {
        pow2(n.get() + 1) / factorial(n.get() + 2)
    } else {
        ln_second_moment_integral(n, p).exp()
    }
}

/// `E[x₁²]` for `x` uniform on `B_p^n`.
pub fn normalized_second_moment(n: Dimension, p: Exponent) -> f64 {
    let m = n.as_f64();
    if p.is_infinite() {
        1.0 / 3.0
    } else if p.p() == 1.0 {
        2.0 / ((m + 1.0) * (m + 2.0))
    } else {
        let ip = 1.0 / p.p();
        // volume and moment share [2Γ(1 + 1/p)]^(n−1); cancel it before exponentiating
        let ln_ratio =
            (2.0 * ip).ln() - LN_2 - lg(1.0 + ip) + lg(3.0 * ip) + lg(1.0 + m * ip) - lg(1.0 + (m + 2.0) * ip);
        ln_ratio.exp()
    }
}
