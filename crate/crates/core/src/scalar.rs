//! Exact arithmetic in cyclotomic fields `Q(ζ_L)`.
//!
//! A [`Scalar`] is stored as a polynomial in `ζ_L` of degree `< φ(L)`, i.e. reduced
//! modulo the `L`-th cyclotomic polynomial. Reduction uses a per-conductor table of
//! `x^e mod Φ_L` for `0 <= e < L`, so every product folds exponents modulo `L` first.
//!
//! Scalars with different conductors are promoted to the lcm of the two conductors.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use thiserror::Error;

/// Largest conductor a promotion may produce.
pub const MAX_CONDUCTOR: u32 = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor {0} exceeds the configured bound {MAX_CONDUCTOR}")]
    ConductorTooLarge(u64),
    #[error("parse error at byte {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
}

/// Reduction data for one conductor.
struct Cyclotomic {
    degree: usize,
    /// `powers[e]` holds the coefficients of `x^e mod Φ_L`.
    powers: Vec<Vec<i64>>,
}

static TABLES: Lazy<RwLock<HashMap<u32, Arc<Cyclotomic>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

static POLYS: Lazy<RwLock<HashMap<u32, Arc<Vec<BigInt>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Euler's totient.
pub fn euler_phi(n: u32) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

/// Integer coefficients (lowest degree first) of the `n`-th cyclotomic polynomial,
/// computed as `(x^n - 1) / prod_{d | n, d < n} Φ_d`.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = POLYS.read().get(&n) {
        return p.clone();
    }
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        num = exact_div_monic(&num, &cyclotomic_polynomial(d));
    }
    let p = Arc::new(num);
    POLYS.write().insert(n, p.clone());
    p
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = rem.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quot
}

fn table(conductor: u32) -> Arc<Cyclotomic> {
    if let Some(t) = TABLES.read().get(&conductor) {
        return t.clone();
    }
    let phi = cyclotomic_polynomial(conductor);
    let degree = phi.len() - 1;
    let phi: Vec<i64> = phi
        .iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflows i64"))
        .collect();
    let mut powers = Vec::with_capacity(conductor as usize);
    let mut cur = vec![0i64; degree];
    cur[0] = 1;
    for _ in 0..conductor {
        powers.push(cur.clone());
        // multiply by x and reduce the overflow coefficient with the monic Φ
        let top = cur[degree - 1];
        let mut next = vec![0i64; degree];
        for i in (1..degree).rev() {
            next[i] = cur[i - 1];
        }
        for i in 0..degree {
            next[i] = next[i]
                .checked_sub(top.checked_mul(phi[i]).expect("cyclotomic table overflow"))
                .expect("cyclotomic table overflow");
        }
        cur = next;
    }
    let t = Arc::new(Cyclotomic { degree, powers });
    TABLES.write().insert(conductor, t.clone());
    t
}

/// An exact element of `Q(ζ_L)` in canonical reduced form.
#[derive(Clone, Debug)]
pub struct Scalar {
    conductor: u32,
    coeffs: Vec<BigRational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar { conductor: 1, coeffs: vec![q] }
    }

    /// `ζ_L^k`; `k` is taken modulo `L`.
    pub fn root_of_unity(conductor: u32, k: i64) -> Self {
        assert!(conductor >= 1, "conductor must be positive");
        let e = k.rem_euclid(conductor as i64) as usize;
        let t = table(conductor);
        Scalar {
            conductor,
            coeffs: t.powers[e]
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Coefficients of the canonical representative, lowest power of `ζ_L` first.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The rational value, if this scalar lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Builds a scalar from an arbitrary-degree polynomial in `ζ_L`.
    fn from_poly(conductor: u32, poly: &[BigRational]) -> Self {
        let t = table(conductor);
        let l = conductor as usize;
        let mut folded: Vec<BigRational> = vec![BigRational::zero(); l.min(poly.len()).max(1)];
        for (e, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = e % l;
            if idx >= folded.len() {
                folded.resize(idx + 1, BigRational::zero());
            }
            folded[idx] += c;
        }
        let mut coeffs = vec![BigRational::zero(); t.degree];
        for (e, c) in folded.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, &p) in t.powers[e].iter().enumerate() {
                if p != 0 {
                    coeffs[i] += c * BigInt::from(p);
                }
            }
        }
        Scalar { conductor, coeffs }
    }

    /// Re-expresses this scalar in `Q(ζ_M)` for a multiple `M` of its conductor.
    pub fn promote(&self, target: u32) -> Result<Self, ScalarError> {
        if target == self.conductor {
            return Ok(self.clone());
        }
        if target > MAX_CONDUCTOR {
            return Err(ScalarError::ConductorTooLarge(target as u64));
        }
        assert!(
            target.is_multiple_of(self.conductor),
            "cannot promote conductor {} to {}",
            self.conductor,
            target
        );
        let step = (target / self.conductor) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[k * step] = c.clone();
        }
        Ok(Self::from_poly(target, &poly))
    }

    fn common(&self, other: &Self) -> Result<(Self, Self), ScalarError> {
        if self.conductor == other.conductor {
            return Ok((self.clone(), other.clone()));
        }
        let l = self.conductor as u64 * other.conductor as u64
            / (self.conductor as u64).gcd(&(other.conductor as u64));
        if l > MAX_CONDUCTOR as u64 {
            return Err(ScalarError::ConductorTooLarge(l));
        }
        Ok((self.promote(l as u32)?, other.promote(l as u32)?))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ScalarError> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let (mut a, b) = self.common(other)?;
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        Ok(a)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Scalar::zero());
        }
        if self.conductor == 1 {
            return Ok(other.scale(&self.coeffs[0]));
        }
        if other.conductor == 1 {
            return Ok(self.scale(&other.coeffs[0]));
        }
        let (a, b) = self.common(other)?;
        let mut prod = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Ok(Self::from_poly(a.conductor, &prod))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        let inv = other.inverse()?;
        self.checked_mul(&inv)
    }

    fn scale(&self, q: &BigRational) -> Self {
        Scalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse, by solving `self * y = 1` in the power basis.
    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Scalar::from_rational(q.recip()).promote(self.conductor);
        }
        let n = self.coeffs.len();
        // column k of the multiplication matrix is self * ζ^k
        let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n + 1]; n];
        for k in 0..n {
            let mut shifted = vec![BigRational::zero(); k + n];
            for (i, c) in self.coeffs.iter().enumerate() {
                shifted[i + k] = c.clone();
            }
            let col = Self::from_poly(self.conductor, &shifted);
            for (row, c) in col.coeffs.into_iter().enumerate() {
                m[row][k] = c;
            }
        }
        m[0][n] = BigRational::one();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !m[r][col].is_zero())
                .expect("multiplication by a nonzero field element is invertible");
            m.swap(col, piv);
            let p = m[col][col].clone();
            for x in m[col].iter_mut() {
                *x = &*x / &p;
            }
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in col..=n {
                        let v = &m[col][c] * &f;
                        m[r][c] -= v;
                    }
                }
            }
        }
        Ok(Scalar {
            conductor: self.conductor,
            coeffs: m.into_iter().map(|row| row[n].clone()).collect(),
        })
    }

    pub fn pow(&self, exp: i64) -> Result<Self, ScalarError> {
        let base = if exp < 0 { self.inverse()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Scalar::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&b)?;
            }
            b = b.checked_mul(&b)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Returns `k` with `self == ζ_n^k`, if this scalar is an `n`-th root of unity.
    pub fn root_exponent(&self, n: u32) -> Option<u32> {
        (0..n).find(|&k| Scalar::root_of_unity(n, k as i64) == *self)
    }

    /// Parses the textual grammar `expr := term (('+'|'-') term)*`, where a term is
    /// `rational`, `rational*z^k`, or `z^k`, and `z` stands for `ζ_L`.
    pub fn parse(text: &str, conductor: u32) -> Result<Self, ScalarError> {
        Parser { src: text.as_bytes(), pos: 0, conductor }.expr()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        match self.common(other) {
            Ok((a, b)) => a.coeffs == b.coeffs,
            Err(_) => false,
        }
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar conductor overflow")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    /// Canonical text: ascending powers of `z`, zero terms omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let zpart = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            if k == 0 {
                out.push_str(&fmt_rational(&abs));
            } else if abs.is_one() {
                out.push_str(&zpart);
            } else {
                out.push_str(&fmt_rational(&abs));
                out.push('*');
                out.push_str(&zpart);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    conductor: u32,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, ScalarError> {
        Err(ScalarError::ParseError { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn uint(&mut self) -> Result<BigInt, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digit string"))
    }

    fn exponent(&mut self) -> Result<i64, ScalarError> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = self.uint()?;
        let n = i64::try_from(&n).map_err(|_| ScalarError::ParseError {
            pos: self.pos,
            msg: "exponent out of range".into(),
        })?;
        Ok(if neg { -n } else { n })
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                let e = self.exponent()?;
                Ok(Scalar::root_of_unity(self.conductor, e))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                let mut q = BigRational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let den = self.uint()?;
                    if den.is_zero() {
                        return self.err("zero denominator");
                    }
                    q /= BigRational::from_integer(den);
                }
                let mut s = Scalar::from_rational(q);
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    if self.peek() != Some(b'z') {
                        return self.err("expected 'z' after '*'");
                    }
                    self.pos += 1;
                    let e = self.exponent()?;
                    s = &s * &Scalar::root_of_unity(self.conductor, e);
                }
                Ok(s)
            }
            Some(_) => self.err("expected a rational or 'z'"),
            None => self.err("unexpected end of input"),
        }
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = Scalar::zero().promote(self.conductor)?;
        let mut sign = 1;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -1;
        }
        loop {
            let t = self.term()?;
            if sign < 0 {
                acc = acc.checked_sub(&t)?;
            } else {
                acc = acc.checked_add(&t)?;
            }
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                Some(_) => return self.err("expected '+' or '-'"),
            }
        }
        acc.promote(self.conductor)
    }
}
