use std::f64::consts::PI;

/// Complementary error function `2/sqrt(pi) * int_x^inf exp(-t^2) dt`.
///
/// Rational approximations of the FreeBSD `s_erf.c` family; about one ulp
/// across the real line, with gradual underflow to 0 past `x ~ 27.2`.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function `exp(x^2) * erfc(x)`.
///
/// Finite for every `x` above `-26.5`; behaves like `1 / (x sqrt(pi))` as
/// `x -> +inf`, so it can be paired with Gaussian factors that would
/// otherwise underflow.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 2.0 {
        return (x * x).exp() * erfc(x);
    }
    if x > 1e8 {
        return 1.0 / (x * PI.sqrt());
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    // evaluated with the modified Lentz method.
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 0.5 * f64::EPSILON {
            break;
        }
    }
    1.0 / (PI.sqrt() * f)
}
