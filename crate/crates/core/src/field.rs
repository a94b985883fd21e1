//! Arithmetic in a word-size prime field and the radix-2 number-theoretic
//! transform over it.

use crate::error::{Error, Result};

/// Prime field `Z/pZ` with `p < 2^63` and a generator of its 2-power roots of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    g: u64,
    two_adicity: u32,
}

impl PrimeField {
    /// `29 * 2^57 + 1`, a prime with a 2^57-th root of unity generated by 3.
    pub const DEFAULT_MODULUS: u64 = 4_179_340_454_199_820_289;
    pub const DEFAULT_GENERATOR: u64 = 3;

    /// Builds a field from a prime `p` and a quadratic non-residue `g`.
    pub fn new(p: u64, g: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 63 || !is_prime_u64(p) {
            return Err(Error::Config(format!("field modulus {p} is not an odd prime below 2^63")));
        }
        let two_adicity = (p - 1).trailing_zeros();
        let f = Self { p, g: g % p, two_adicity };
        if f.g == 0 || f.pow(f.g, (p - 1) / 2) == 1 {
            return Err(Error::Config(format!("{g} is a quadratic residue mod {p}")));
        }
        Ok(f)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Longest supported transform.
    pub fn max_transform_len(&self) -> usize {
        if self.two_adicity >= usize::BITS - 1 {
            usize::MAX / 2 + 1
        } else {
            1usize << self.two_adicity
        }
    }

    /// Fails unless every count up to `needed` is represented exactly.
    pub fn ensure_counts(&self, needed: u64) -> Result<()> {
        if needed >= self.p {
            return Err(Error::FieldTooSmall {
                modulus: self.p,
                needed,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    /// Canonical representative of a signed integer.
    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    /// Lifts a field element back to an integer in `(-p/2, p/2]`.
    #[inline]
    pub fn to_i64(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            -((self.p - a) as i64)
        } else {
            a as i64
        }
    }

    /// Primitive `len`-th root of unity; `len` must be a supported power of two.
    pub fn root_of_unity(&self, len: usize) -> Result<u64> {
        if !len.is_power_of_two() || len > self.max_transform_len() {
            return Err(Error::TransformTooLong {
                len,
                max: self.max_transform_len(),
            });
        }
        Ok(self.pow(self.g, (self.p - 1) / len as u64))
    }

    /// In-place cyclic NTT of a power-of-two length buffer. The inverse
    /// transform includes the `1/len` scaling.
    pub fn ntt(&self, a: &mut [u64], inverse: bool) -> Result<()> {
        let n = a.len();
        if n <= 1 {
            return Ok(());
        }
        let mut root = self.root_of_unity(n)?;
        if inverse {
            root = self.inv(root);
        }

        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }

        // twiddles[t] = root^(t * n / len) is read with stride n / len.
        let half = n / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut w = 1u64;
        for _ in 0..half {
            twiddles.push(w);
            w = self.mul(w, root);
        }
        let mut len = 2;
        while len <= n {
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for t in 0..len / 2 {
                    let u = a[start + t];
                    let v = self.mul(a[start + t + len / 2], twiddles[t * stride]);
                    a[start + t] = self.add(u, v);
                    a[start + t + len / 2] = self.sub(u, v);
                }
            }
            len <<= 1;
        }

        if inverse {
            let scale = self.inv(n as u64);
            for x in a.iter_mut() {
                *x = self.mul(*x, scale);
            }
        }
        Ok(())
    }

    /// Linear convolution of two coefficient vectors.
    pub fn convolve(&self, u: &[u64], v: &[u64]) -> Result<Vec<u64>> {
        if u.is_empty() || v.is_empty() {
            return Ok(Vec::new());
        }
        let out_len = u.len() + v.len() - 1;
        let len = out_len.next_power_of_two();
        let mut fu = u.to_vec();
        fu.resize(len, 0);
        let mut fv = v.to_vec();
        fv.resize(len, 0);
        self.ntt(&mut fu, false)?;
        self.ntt(&mut fv, false)?;
        for (x, y) in fu.iter_mut().zip(&fv) {
            *x = self.mul(*x, *y);
        }
        self.ntt(&mut fu, true)?;
        fu.truncate(out_len);
        Ok(fu)
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self {
            p: Self::DEFAULT_MODULUS,
            g: Self::DEFAULT_GENERATOR,
            two_adicity: 57,
        }
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_field_is_consistent() {
        let f = PrimeField::default();
        assert_eq!(
            PrimeField::DEFAULT_MODULUS,
            29 * (1u64 << 57) + 1,
            "modulus layout"
        );
        assert_eq!(
            f,
            PrimeField::new(PrimeField::DEFAULT_MODULUS, PrimeField::DEFAULT_GENERATOR).unwrap()
        );
        let w = f.root_of_unity(1 << 20).unwrap();
        assert_eq!(f.pow(w, 1 << 20), 1);
        assert_ne!(f.pow(w, 1 << 19), 1);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PrimeField::new(15, 2).is_err());
        // 4 = 2^2 is a residue mod 17.
        assert!(PrimeField::new(17, 4).is_err());
        assert!(PrimeField::new(17, 3).is_ok());
    }

    #[test]
    fn ntt_roundtrip_and_convolution() {
        let f = PrimeField::default();
        let mut a: Vec<u64> = (0..16).map(|x| x * x + 1).collect();
        let orig = a.clone();
        f.ntt(&mut a, false).unwrap();
        f.ntt(&mut a, true).unwrap();
        assert_eq!(a, orig);

        let c = f.convolve(&[1, 2, 3], &[4, 5]).unwrap();
        assert_eq!(c, vec![4, 13, 22, 15]);
    }

    #[test]
    fn signed_lift() {
        let f = PrimeField::default();
        assert_eq!(f.to_i64(f.from_i64(-7)), -7);
        assert_eq!(f.to_i64(f.from_i64(7)), 7);
    }

    #[test]
    fn miller_rabin_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime_u64(PrimeField::DEFAULT_MODULUS));
    }
}
