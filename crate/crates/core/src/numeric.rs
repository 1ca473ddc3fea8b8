//! Small numeric helpers shared by the exact engines.

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `(k)_r = k (k-1) ... (k-r+1)` with overflow detection; `None` on overflow or `r > k`.
pub fn checked_falling_factorial(k: u64, r: u64) -> Option<u128> {
    if r > k {
        return None;
    }
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((k - i) as u128)?;
    }
    Some(acc)
}

pub fn checked_pow(base: u64, exp: u32) -> Option<i128> {
    (base as i128).checked_pow(exp)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Relative comparison `a <= b` allowing `rel` slack on the magnitude of `b`.
pub fn le_rel(a: f64, b: f64, rel: f64) -> bool {
    a <= b + rel * b.abs().max(a.abs())
}

/// Formats `x` with 12 significant digits in the shortest of fixed or
/// scientific notation, trailing zeros trimmed (C's `%.12g`).
pub fn format_sig12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    const SIG: i32 = 12;
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..SIG).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falling_factorials() {
        assert_eq!(checked_falling_factorial(4, 2), Some(12));
        assert_eq!(checked_falling_factorial(7, 0), Some(1));
        assert_eq!(checked_falling_factorial(3, 3), Some(6));
        assert_eq!(checked_falling_factorial(2, 3), None);
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(0.5), "0.5");
        assert_eq!(format_sig12(std::f64::consts::FRAC_1_SQRT_2), "0.707106781187");
        assert_eq!(format_sig12(1.0), "1");
        assert_eq!(format_sig12(123456.0), "123456");
        assert_eq!(format_sig12(1.5e-7), "1.5e-07");
        assert_eq!(format_sig12(-2.25), "-2.25");
        assert_eq!(format_sig12(0.0), "0");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }
}
