//! Real roots of Au³ + Bu² + Cu + D by Cardano's method with full
//! discriminant casing, each root polished by one Newton step.
//!
//! Degenerate leading coefficients fall through to the quadratic and linear
//! cases, so callers can hand over the steady-state polynomial untouched.

/// Real roots in ascending order. Multiple roots are reported once per
/// distinct value (a double root at a fold appears as one entry).
pub fn real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= scale * 1e-300 {
        return quadratic_roots(b, c, d);
    }

    // Depressed form: u = t - B/3A, t³ + pt + q = 0.
    let shift = -b / (3.0 * a);
    let p = c / a - b * b / (3.0 * a * a);
    let q = 2.0 * b * b * b / (27.0 * a * a * a) - b * c / (3.0 * a * a) + d / a;

    let disc = -4.0 * p * p * p - 27.0 * q * q;
    // Case tolerance tied to the coefficient magnitudes of the depressed cubic.
    let eps = 1e-14 * (p.abs().powi(3).max(q.abs().powi(2)).max(1e-300));

    let mut roots: Vec<f64> = if disc > eps {
        // Three distinct real roots: trigonometric form.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect()
    } else if disc < -eps {
        // One real root: Cardano with the numerically stable branch.
        let half_q = q / 2.0;
        let r = (half_q * half_q + p * p * p / 27.0).sqrt();
        let u3 = -half_q + if half_q >= 0.0 { -r } else { r };
        let u = u3.cbrt();
        let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        vec![t + shift]
    } else {
        // Discriminant at zero: double root (or triple when p = q = 0).
        if p.abs() <= 1e-14 * q.abs().max(1.0) && q.abs() <= 1e-300 {
            vec![shift]
        } else {
            let t_double = -3.0 * q / (2.0 * p);
            let t_simple = 3.0 * q / p;
            let mut v = vec![t_double + shift, t_simple + shift];
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            v
        }
    };

    for r in roots.iter_mut() {
        *r = newton_polish(a, b, c, d, *r);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.retain(|r| {
        let (val, s) = eval_scaled(a, b, c, d, *r);
        val.abs() <= 1e-10 * s
    });
    roots
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    let q = -0.5 * (b + b.signum() * s);
    let mut v = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v.dedup();
    v
}

fn eval_scaled(a: f64, b: f64, c: f64, d: f64, u: f64) -> (f64, f64) {
    let val = ((a * u + b) * u + c) * u + d;
    let scale = (a * u * u * u).abs() + (b * u * u).abs() + (c * u).abs() + d.abs();
    (val, scale.max(1e-300))
}

fn newton_polish(a: f64, b: f64, c: f64, d: f64, u: f64) -> f64 {
    let (val, _) = eval_scaled(a, b, c, d, u);
    let deriv = (3.0 * a * u + 2.0 * b) * u + c;
    if deriv == 0.0 {
        return u;
    }
    let next = u - val / deriv;
    let (v0, s) = eval_scaled(a, b, c, d, u);
    let (v1, _) = eval_scaled(a, b, c, d, next);
    if v1.abs() < v0.abs() || v1.abs() <= 1e-12 * s {
        next
    } else {
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_roots(a: f64, b: f64, c: f64, d: f64, expect: &[f64], tol: f64) {
        let got = real_roots(a, b, c, d);
        assert_eq!(got.len(), expect.len(), "roots of {a}u³+{b}u²+{c}u+{d}: {got:?}");
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < tol, "{g} vs {e}");
        }
    }

    #[test]
    fn three_distinct() {
        // (u-1)(u-2)(u-3) = u³ - 6u² + 11u - 6
        assert_roots(1.0, -6.0, 11.0, -6.0, &[1.0, 2.0, 3.0], 1e-12);
    }

    #[test]
    fn one_real() {
        // (u-2)(u²+1) = u³ - 2u² + u - 2
        assert_roots(1.0, -2.0, 1.0, -2.0, &[2.0], 1e-12);
    }

    #[test]
    fn double_root() {
        // (u-1)²(u-4) = u³ - 6u² + 9u - 4
        let got = real_roots(1.0, -6.0, 9.0, -4.0);
        assert_eq!(got.len(), 2);
        assert!((got[0] - 1.0).abs() < 1e-7);
        assert!((got[1] - 4.0).abs() < 1e-10);
    }

    #[test]
    fn triple_root() {
        // (u-2)³ = u³ - 6u² + 12u - 8
        let got = real_roots(1.0, -6.0, 12.0, -8.0);
        assert_eq!(got.len(), 1);
        assert!((got[0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn degenerate_quadratic_and_linear() {
        assert_roots(0.0, 1.0, -3.0, 2.0, &[1.0, 2.0], 1e-12);
        assert_roots(0.0, 0.0, 2.0, -4.0, &[2.0], 1e-12);
        assert!(real_roots(0.0, 0.0, 0.0, 1.0).is_empty());
        assert!(real_roots(0.0, 1.0, 0.0, 1.0).is_empty());
    }

    #[test]
    fn wide_coefficient_range() {
        // Steady-state-like scaling: A ~ 1e2, D ~ -1e0
        let (a, b, c, d) = (152.11888601332512, 0.0, 13.02455683514079, -3.85533225);
        let got = real_roots(a, b, c, d);
        assert_eq!(got.len(), 1);
        let u = got[0];
        assert!((((a * u + b) * u + c) * u + d).abs() < 1e-10 * (a * u.powi(3)).abs().max(d.abs()));
    }
}
