/// `e^{-1/x}` for `x > 0`, else `0`.
pub fn exp_bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn exp_bump_d1(x: f64) -> f64 {
    if x > 0.0 {
        exp_bump(x) / (x * x)
    } else {
        0.0
    }
}

fn exp_bump_d2(x: f64) -> f64 {
    if x > 0.0 {
        exp_bump(x) * (1.0 - 2.0 * x) / (x * x * x * x)
    } else {
        0.0
    }
}

/// Smooth monotone step: `1` on `(-inf, lo]`, `0` on `[hi, inf)`.
///
/// In between, `A / (A + B)` with `A = h(hi - t)`, `B = h(t - lo)`, `h(x) = e^{-1/x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoothstep {
    pub lo: f64,
    pub hi: f64,
}

/// Radial cutoff profile of the local perturbations.
pub const CHI: Smoothstep = Smoothstep { lo: 0.25, hi: 0.75 };

/// Profile whose square is the weight `lambda`.
pub const LAMBDA_STEP: Smoothstep = Smoothstep { lo: 0.5, hi: 1.0 };

impl Smoothstep {
    fn parts(&self, t: f64) -> [f64; 6] {
        let (x, y) = (self.hi - t, t - self.lo);
        [exp_bump(x), -exp_bump_d1(x), exp_bump_d2(x), exp_bump(y), exp_bump_d1(y), exp_bump_d2(y)]
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= self.lo {
            return 1.0;
        }
        if t >= self.hi {
            return 0.0;
        }
        let [a, _, _, b, _, _] = self.parts(t);
        a / (a + b)
    }

    pub fn d1(&self, t: f64) -> f64 {
        if t <= self.lo || t >= self.hi {
            return 0.0;
        }
        let [a, a1, _, b, b1, _] = self.parts(t);
        let d = a + b;
        (a1 * b - a * b1) / (d * d)
    }

    pub fn d2(&self, t: f64) -> f64 {
        if t <= self.lo || t >= self.hi {
            return 0.0;
        }
        let [a, a1, a2, b, b1, b2] = self.parts(t);
        let d = a + b;
        let d1 = a1 + b1;
        let num = a1 * b - a * b1;
        ((a2 * b - a * b2) * d - 2.0 * num * d1) / (d * d * d)
    }
}

/// `chi(s)`: `1` for `s <= 1/4`, `0` for `s >= 3/4`.
pub fn chi(s: f64) -> f64 {
    CHI.value(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn plateau_and_support() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.25), 1.0);
        assert_eq!(chi(0.75), 0.0);
        assert_eq!(chi(1.0), 0.0);
        assert_abs_diff_eq!(chi(0.5), 0.5, epsilon = 1e-15);
        assert_eq!(LAMBDA_STEP.d1(0.3), 0.0);
        assert_eq!(LAMBDA_STEP.d2(1.3), 0.0);
    }

    proptest! {
        #[test]
        fn derivatives_match_central_differences(t in 0.26f64..0.74) {
            let h = 1e-5;
            let fd1 = (CHI.value(t + h) - CHI.value(t - h)) / (2.0 * h);
            let fd2 = (CHI.d1(t + h) - CHI.d1(t - h)) / (2.0 * h);
            prop_assert!((CHI.d1(t) - fd1).abs() < 1e-6 * (1.0 + fd1.abs()));
            prop_assert!((CHI.d2(t) - fd2).abs() < 1e-5 * (1.0 + fd2.abs()));
        }

        #[test]
        fn monotone_between_zero_and_one(s in -1.0f64..2.0, ds in 0.0f64..0.5) {
            let (a, b) = (chi(s), chi(s + ds));
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b <= a);
        }
    }
}
