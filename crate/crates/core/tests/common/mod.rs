#![allow(dead_code, clippy::excessive_precision, clippy::approx_constant)]

use lpball::{Dimension, Exponent};

pub fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

pub fn ex(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `ln Γ(x)` at 40 significant digits (mpmath), rounded to f64.
pub const LN_GAMMA_TABLE: [(f64, f64); 33] = [
    (0.001, 6.90717888538385338e+00),
    (0.01, 4.59947987804202185e+00),
    (0.1, 2.25271265173420598e+00),
    (0.25, 1.28802252469807743e+00),
    (0.5, 5.72364942924700082e-01),
    (0.75, 2.03280951431295376e-01),
    (0.9, 6.63762397347429506e-02),
    (0.99, 5.85480676470978133e-03),
    (0.999999, 5.77216487385565207e-07),
    (1.000001, -5.77214842387414666e-07),
    (1.01, -5.69030794606965092e-03),
    (1.1, -4.98724412598397643e-02),
    (1.3, -1.08174809507860473e-01),
    (1.5, -1.20782237635245218e-01),
    (1.7, -9.58076974070658782e-02),
    (1.9, -3.89842759230833585e-02),
    (1.99, -4.19552908879166839e-03),
    (1.999999, -4.22784012596585395e-07),
    (2.000001, 4.22784657624529234e-07),
    (2.01, 4.26002290709834568e-03),
    (2.2, 9.69474667906388698e-02),
    (2.5, 2.84682870472919181e-01),
    (3.0, 6.93147180559945286e-01),
    (3.7, 1.42807232666538808e+00),
    (5.5, 3.95781396761871651e+00),
    (10.0, 1.28018274800814691e+01),
    (17.25, 3.13746223136776869e+01),
    (33.3, 8.26037235816549469e+01),
    (100.0, 3.59134205369575398e+02),
    (1234.5, 7.55055090107789511e+03),
    (10000.0, 8.20997174964423757e+04),
    (99999.9, 1.05128655768166040e+06),
    (1000000.0, 1.28155045691476110e+07),
];

/// Stirling series for `ln Γ(x)`, shifting up to `x ≥ 15` first.
pub fn stirling_ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    let mut z = x;
    while z < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    const B: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut power = inv;
    for c in B {
        series += c * power;
        power *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// Composite Simpson rule on `[a, b]` with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    assert!(m.is_multiple_of(2));
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}
