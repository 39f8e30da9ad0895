use super::{q_to_f64, Q};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Element `sum c_k zeta^k` of the cyclotomic field `Q(zeta_m)`, read as a
/// complex number (`zeta = exp(2 pi i / m)`). Coefficients are kept unreduced;
/// equality and zero tests reduce modulo the cyclotomic polynomial.
#[derive(Clone, Debug)]
pub struct Cyclo {
    m: u32,
    coeffs: Vec<Q>,
}

impl Cyclo {
    pub fn zero(m: u32) -> Self {
        assert!(m >= 1);
        Cyclo { m, coeffs: vec![Q::zero(); m as usize] }
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    /// `x + i y`; requires `4 | m` so that `i` is a power of zeta.
    pub fn from_complex(m: u32, x: &Q, y: &Q) -> Self {
        assert!(m % 4 == 0, "need 4 | m to embed i");
        let mut c = Cyclo::zero(m);
        c.coeffs[0] = x.clone();
        c.coeffs[(m / 4) as usize] = y.clone();
        c
    }

    pub fn mul_zeta(&self, k: i64) -> Self {
        let m = self.m as i64;
        let mut out = Cyclo::zero(self.m);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(i as i64 + k).rem_euclid(m) as usize] += c;
        }
        out
    }

    pub fn conj(&self) -> Self {
        let m = self.m as i64;
        let mut out = Cyclo::zero(self.m);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(-(i as i64)).rem_euclid(m) as usize] += c;
        }
        out
    }

    pub fn add(&self, o: &Cyclo) -> Self {
        assert_eq!(self.m, o.m);
        Cyclo { m: self.m, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: &Q) -> Self {
        Cyclo { m: self.m, coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Q::from_integer(BigInt::from(k)))
    }

    /// Coefficients reduced modulo `Phi_m` (degree below `phi(m)`).
    pub fn reduced(&self) -> Vec<Q> {
        let phi = cyclotomic_poly(self.m);
        let deg = phi.len() - 1;
        let mut r = self.coeffs.clone();
        // Phi_m is monic with integer coefficients
        for top in (deg..r.len()).rev() {
            let lead = r[top].clone();
            if lead.is_zero() {
                continue;
            }
            for (j, p) in phi.iter().enumerate() {
                let idx = top - deg + j;
                r[idx] -= &lead * Q::from_integer(BigInt::from(*p));
            }
        }
        r.truncate(deg);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|c| c.is_zero())
    }

    pub fn exact_eq(&self, o: &Cyclo) -> bool {
        self.add(&o.scale(&-Q::one())).is_zero()
    }

    pub fn to_f64(&self) -> [f64; 2] {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.reduced().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = 2.0 * std::f64::consts::PI * k as f64 / self.m as f64;
            let v = q_to_f64(c);
            re += v * a.cos();
            im += v * a.sin();
        }
        [re, im]
    }
}

/// Integer coefficients (lowest degree first) of the m-th cyclotomic polynomial.
pub fn cyclotomic_poly(m: u32) -> Vec<i64> {
    assert!(m >= 1);
    // x^m - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut quot = vec![0i64; a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = r[i + db] / b[db];
        quot[i] = c;
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= c * bj;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0), "inexact cyclotomic division");
    quot
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::{q, qi};

    #[test]
    fn known_cyclotomics() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for m in [4u32, 8, 12, 24, 40] {
            let mut s = Cyclo::zero(m);
            for k in 0..m as i64 {
                s = s.add(&Cyclo::from_complex(m, &qi(1), &qi(0)).mul_zeta(k));
            }
            assert!(s.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn nonzero_stays_nonzero() {
        let c = Cyclo::from_complex(24, &q(1, 3), &q(-2, 5)).mul_zeta(7);
        assert!(!c.is_zero());
        let f = c.to_f64();
        let a = 2.0 * std::f64::consts::PI * 7.0 / 24.0;
        let (x, y) = (1.0 / 3.0, -2.0 / 5.0);
        assert!((f[0] - (x * a.cos() - y * a.sin())).abs() < 1e-12);
        assert!((f[1] - (x * a.sin() + y * a.cos())).abs() < 1e-12);
    }
}
