//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
//!
//! Used where a small result comes out of heavy cancellation between O(1) terms.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Exact product via fused multiply-add.
pub(crate) fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

const PI_2: Dd = Dd {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123_233_995_736_766e-17,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn scale(self, s: f64) -> Self {
        self * Dd::from_f64(s)
    }

    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.scale(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.scale(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::from_f64(q3)
    }

    /// `(sin x, cos x)` to about 30 digits for moderate `|x|`.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let k = (self.to_f64() / std::f64::consts::FRAC_PI_2).round();
        let y = self - PI_2.scale(k);
        // Taylor series on |y| <= pi/4
        let y2 = y * y;
        let mut term = y;
        let mut s = y;
        let mut c = Dd::from_f64(1.0);
        let mut cterm = Dd::from_f64(1.0);
        let mut i = 1.0;
        while term.hi.abs() > 1e-34 || cterm.hi.abs() > 1e-34 {
            cterm = -(cterm * y2).div(Dd::from_f64(i * (i + 1.0)));
            term = -(term * y2).div(Dd::from_f64((i + 1.0) * (i + 2.0)));
            s = s + term;
            c = c + cterm;
            i += 2.0;
            if i > 80.0 {
                break;
            }
        }
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let p = two_prod(self.hi, b.hi);
        let lo = p.lo + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p.hi, lo);
        Dd { hi, lo }
    }
}

/// Determinant by Gaussian elimination with partial pivoting; `a` is row-major `n x n`.
pub(crate) fn det(mut a: Vec<Dd>, n: usize) -> Dd {
    let mut d = Dd::from_f64(1.0);
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().hi.total_cmp(&a[j * n + col].abs().hi))
            .unwrap_or(col);
        if a[p * n + col].hi == 0.0 {
            return Dd::ZERO;
        }
        if p != col {
            for k in 0..n {
                a.swap(p * n + k, col * n + k);
            }
            d = -d;
        }
        let piv = a[col * n + col];
        d = d * piv;
        for i in col + 1..n {
            let f = a[i * n + col].div(piv);
            for k in col..n {
                a[i * n + k] = a[i * n + k] - f * a[col * n + k];
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_cos_agree_with_f64() {
        for x in [0.0, 0.3, -1.2, 2.9, 5.5, -17.0] {
            let (s, c) = Dd::from_f64(x).sin_cos();
            assert!((s.to_f64() - x.sin()).abs() < 2e-16);
            assert!((c.to_f64() - x.cos()).abs() < 2e-16);
            // sin^2 + cos^2 = 1 well below f64 resolution
            let one = s * s + c * c - Dd::from_f64(1.0);
            assert!(one.to_f64().abs() < 1e-30, "{x}: {one:?}");
        }
    }

    #[test]
    fn products_are_exact() {
        let a = 1.0 + f64::EPSILON;
        let p = two_prod(a, a);
        assert_eq!(p.hi, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(p.lo, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn determinant_small() {
        let m: Vec<Dd> = [2.0, 1.0, 1.0, 3.0].iter().map(|&v| Dd::from_f64(v)).collect();
        assert_eq!(det(m, 2).to_f64(), 5.0);
    }
}
