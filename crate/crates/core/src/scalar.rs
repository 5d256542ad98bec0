//! Exact scalars in a real quadratic field `Q(sqrt d)`, together with the
//! vectors and matrices built on top of them.
//!
//! Every value is kept in canonical form `a + b*sqrt(d)` with `d` square-free,
//! and `d == 0` whenever `b == 0`, so derived equality and hashing agree with
//! numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("incompatible quadratic fields Q(sqrt {0}) and Q(sqrt {1})")]
    IncompatibleField(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// `a + b*sqrt(d)` with rational `a`, `b`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
    d: u64,
}

/// Join two field discriminants (0 meaning plain Q).
pub fn join_fields(d1: u64, d2: u64) -> Result<u64, ScalarError> {
    match (d1, d2) {
        (0, d) | (d, 0) => Ok(d),
        (x, y) if x == y => Ok(x),
        (x, y) => Err(ScalarError::IncompatibleField(x, y)),
    }
}

/// Splits `n` as `s^2 * f` with `f` square-free, returning `(s, f)`.
fn square_free_split(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut f = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            f *= p;
        }
        p += 1;
    }
    (s, f * n)
}

impl ExactScalar {
    /// Builds `a + b*sqrt(d)`, reducing `d` to its square-free part.
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        if b.is_zero() || d == 0 {
            return Self::rational(a);
        }
        let (s, f) = square_free_split(d);
        let b = b * BigRational::from_integer(BigInt::from(s));
        if f == 1 {
            Self::rational(a + b)
        } else {
            ExactScalar { a, b, d: f }
        }
    }

    pub fn rational(a: BigRational) -> Self {
        ExactScalar { a, b: BigRational::zero(), d: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }

    /// `sqrt(d)` for a positive integer `d`.
    pub fn sqrt(d: u64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The golden ratio `(1 + sqrt 5) / 2`.
    pub fn golden() -> Self {
        let half = BigRational::new(1.into(), 2.into());
        Self::new(half.clone(), half, 5)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    /// Square-free discriminant of the field, 0 if the value is rational.
    pub fn field(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    /// Galois conjugate `a - b*sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        ExactScalar { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d))
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, ScalarError> {
        let d = join_fields(self.d, o.d)?;
        Ok(Self::new(&self.a + &o.a, &self.b + &o.b, d))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, ScalarError> {
        let d = join_fields(self.d, o.d)?;
        Ok(Self::new(&self.a - &o.a, &self.b - &o.b, d))
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, ScalarError> {
        let d = join_fields(self.d, o.d)?;
        let dd = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &o.a + &self.b * &o.b * dd;
        let b = &self.a * &o.b + &self.b * &o.a;
        Ok(Self::new(a, b, d))
    }

    pub fn checked_recip(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::new(&self.a / &n, -(&self.b / &n), self.d))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ScalarError> {
        join_fields(self.d, o.d)?;
        self.checked_mul(&o.checked_recip()?)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: compare a^2 with d b^2
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("d is not a perfect square"),
        }
    }

    pub fn try_cmp(&self, o: &Self) -> Result<Ordering, ScalarError> {
        Ok(self.checked_sub(o)?.signum().cmp(&0))
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Power with a non-negative exponent.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

fn sign_of(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Scalar comparison; fails on operands from different quadratic fields.
pub fn scalar_cmp(x: &ExactScalar, y: &ExactScalar) -> Result<Ordering, ScalarError> {
    x.try_cmp(y)
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric order. Panics when the operands live in different fields; use
/// [`scalar_cmp`] to get an error instead.
impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("comparison across quadratic fields")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: &'a ExactScalar) -> ExactScalar {
                self.$checked(o).expect("arithmetic across quadratic fields")
            }
        }
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: &'a ExactScalar) -> ExactScalar {
                (&self).$m(o)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(q: BigRational) -> Self {
        Self::rational(q)
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let mag = self.b.abs();
        let surd = if mag.is_one() {
            format!("sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", fmt_rational(&mag), self.d)
        };
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{surd}")
            } else {
                write!(f, "{surd}")
            }
        } else {
            write!(f, "{}{sign}{surd}", fmt_rational(&self.a))
        }
    }
}

struct Cursor<'s> {
    s: &'s [u8],
    pos: usize,
}

impl<'s> Cursor<'s> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, w: &str) -> bool {
        if self.s[self.pos..].starts_with(w.as_bytes()) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    /// `int ("/" int)?`
    fn rational(&mut self) -> Result<Option<BigRational>, String> {
        let Some(n) = self.integer() else { return Ok(None) };
        if self.eat(b'/') {
            let q = self.integer().ok_or("expected denominator")?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Some(BigRational::new(n, q)))
        } else {
            Ok(Some(BigRational::from_integer(n)))
        }
    }

    /// `"sqrt(" int ")"`
    fn surd(&mut self) -> Result<Option<u64>, String> {
        if !self.eat_str("sqrt(") {
            return Ok(None);
        }
        let n = self.integer().ok_or("expected radicand")?;
        if !self.eat(b')') {
            return Err("expected ')'".into());
        }
        let n = n.to_u64().ok_or("radicand out of range")?;
        Ok(Some(n))
    }
}

impl FromStr for ExactScalar {
    type Err = ScalarError;

    /// Accepts sums of terms `q`, `q*sqrt(D)`, `sqrt(D)`, `sqrt(D)/n`, e.g.
    /// `"1/2-3/4*sqrt(5)"`.
    fn from_str(input: &str) -> Result<Self, ScalarError> {
        let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: String| ScalarError::Parse { input: input.to_string(), reason };
        if cleaned.is_empty() {
            return Err(err("empty".into()));
        }
        let mut cur = Cursor { s: cleaned.as_bytes(), pos: 0 };
        let mut acc = ExactScalar::zero();
        let mut first = true;
        while cur.peek().is_some() {
            let mut negative = false;
            if cur.eat(b'-') {
                negative = true;
            } else if !cur.eat(b'+') && !first {
                return Err(err(format!("unexpected character at {}", cur.pos)));
            }
            first = false;
            let coef = cur.rational().map_err(err)?;
            let term = match coef {
                Some(q) => {
                    if cur.eat(b'*') {
                        let d = cur.surd().map_err(err)?.ok_or_else(|| err("expected sqrt".into()))?;
                        ExactScalar::new(BigRational::zero(), q, d)
                    } else {
                        ExactScalar::rational(q)
                    }
                }
                None => {
                    let d = cur.surd().map_err(err)?.ok_or_else(|| err("expected a number".into()))?;
                    let mut q = BigRational::one();
                    if cur.eat(b'*') {
                        q = cur.rational().map_err(err)?.ok_or_else(|| err("expected coefficient".into()))?;
                    } else if cur.eat(b'/') {
                        let n = cur.integer().ok_or_else(|| err("expected denominator".into()))?;
                        if n.is_zero() {
                            return Err(err("zero denominator".into()));
                        }
                        q = BigRational::new(BigInt::one(), n);
                    }
                    ExactScalar::new(BigRational::zero(), q, d)
                }
            };
            let term = if negative { -term } else { term };
            acc = acc.checked_add(&term)?;
        }
        Ok(acc)
    }
}

impl serde::Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for ExactScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Repr {
            S(String),
            I(i64),
        }
        match Repr::deserialize(d)? {
            Repr::S(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::I(i) => Ok(ExactScalar::from_int(i)),
        }
    }
}

/// A vector of exact scalars. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct ExactVector(pub Vec<ExactScalar>);

impl ExactVector {
    pub fn zeros(n: usize) -> Self {
        ExactVector(vec![ExactScalar::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        ExactVector(v.iter().map(|&x| ExactScalar::from_int(x)).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = ExactScalar::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ExactScalar> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(ExactScalar::is_zero)
    }

    pub fn field(&self) -> Result<u64, ScalarError> {
        self.0.iter().try_fold(0, |d, x| join_fields(d, x.field()))
    }

    pub fn dot(&self, o: &Self) -> ExactScalar {
        assert_eq!(self.len(), o.len(), "dot product of vectors of different length");
        self.0.iter().zip(&o.0).fold(ExactScalar::zero(), |acc, (x, y)| acc + x * y)
    }

    pub fn add(&self, o: &Self) -> Self {
        ExactVector(self.0.iter().zip(&o.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        ExactVector(self.0.iter().zip(&o.0).map(|(x, y)| x - y).collect())
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        ExactVector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn neg(&self) -> Self {
        ExactVector(self.0.iter().map(|x| -x).collect())
    }

    /// Unique representative of the open ray through `self`: divided by the
    /// absolute value of its first nonzero entry, then scaled to a primitive
    /// integer vector when all entries are rational. `None` for the zero vector.
    pub fn canonical_ray(&self) -> Option<Self> {
        let lead = self.0.iter().find(|x| !x.is_zero())?.abs();
        let inv = lead.checked_recip().ok()?;
        let v = self.scale(&inv);
        if v.0.iter().all(ExactScalar::is_rational) {
            let mut l = BigInt::one();
            for x in &v.0 {
                l = l.lcm(x.rational_part().denom());
            }
            let ints: Vec<BigInt> = v.0.iter().map(|x| (x.rational_part() * BigRational::from_integer(l.clone())).to_integer()).collect();
            let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            Some(ExactVector(ints.into_iter().map(|x| ExactScalar::from_bigint(x / &g)).collect()))
        } else {
            Some(v)
        }
    }

    /// Whether `self` and `o` span the same open ray.
    pub fn same_ray(&self, o: &Self) -> bool {
        self.canonical_ray() == o.canonical_ray()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(ExactScalar::to_f64).collect()
    }
}

impl fmt::Display for ExactVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major matrix of exact scalars.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactScalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![ExactScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ExactScalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Result<Self, ScalarError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(ScalarError::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        let m = ExactMatrix { rows: r, cols: c, data };
        m.field()?;
        Ok(m)
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<ExactScalar>) -> Result<Self, ScalarError> {
        if data.len() != rows * cols {
            return Err(ScalarError::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        let m = ExactMatrix { rows, cols, data };
        m.field()?;
        Ok(m)
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| ExactScalar::from_int(x)).collect()).collect())
            .expect("rectangular integer matrix")
    }

    /// Permutation matrix sending `e_i` to `e_{perm[i]}` (0-based).
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m.data[j * n + i] = ExactScalar::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &ExactScalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: ExactScalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[ExactScalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<ExactVector> {
        (0..self.rows).map(|r| ExactVector(self.row(r).to_vec())).collect()
    }

    pub fn entries(&self) -> &[ExactScalar] {
        &self.data
    }

    pub fn field(&self) -> Result<u64, ScalarError> {
        self.data.iter().try_fold(0, |d, x| join_fields(d, x.field()))
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, ScalarError> {
        if self.cols != o.rows {
            return Err(ScalarError::DimensionMismatch { expected: self.cols, found: o.rows });
        }
        join_fields(self.field()?, o.field()?)?;
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &ExactVector) -> ExactVector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        ExactVector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(&v.0)
                        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                        .fold(ExactScalar::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        )
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    pub fn is_orthogonal(&self) -> bool {
        self.is_square() && self.transpose().checked_mul(self).map(|p| p.is_identity()).unwrap_or(false)
    }

    /// Vertical concatenation.
    pub fn stack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        ExactMatrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).checked_recip().expect("nonzero pivot");
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<ExactVector> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = ExactVector::zeros(self.cols);
                v.0[f] = ExactScalar::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v.0[p] = -m.get(i, f);
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> Result<ExactScalar, ScalarError> {
        if !self.is_square() {
            return Err(ScalarError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = ExactScalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else { return Ok(ExactScalar::zero()) };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.checked_recip()?;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) * &inv;
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if !self.is_square() {
            return Err(ScalarError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, ExactScalar::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(ScalarError::DivisionByZero);
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Codimension of the fixed subspace of an orthogonal matrix:
/// 0 for the identity, 1 for a reflection, 2 for a rotation.
pub fn mat_classify_fixed_codim(m: &ExactMatrix) -> Result<usize, ScalarError> {
    if !m.is_orthogonal() {
        return Err(ScalarError::NotOrthogonal);
    }
    Ok(m.sub(&ExactMatrix::identity(m.rows())).rank())
}

/// Fixed codimension measured inside the subspace `{x : E x = 0}` given by
/// `equations` (one row per equation, possibly zero rows).
pub fn fixed_codim_in(m: &ExactMatrix, equations: &ExactMatrix) -> Result<usize, ScalarError> {
    if !m.is_orthogonal() {
        return Err(ScalarError::NotOrthogonal);
    }
    let e = m.sub(&ExactMatrix::identity(m.rows()));
    if equations.rows() == 0 {
        return Ok(e.rank());
    }
    if equations.cols() != m.cols() {
        return Err(ScalarError::DimensionMismatch { expected: m.cols(), found: equations.cols() });
    }
    Ok(e.stack(equations).rank() - equations.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> ExactScalar {
        x.parse().unwrap()
    }

    #[test]
    fn parse_print_forms() {
        assert_eq!(s("1/2+3/4*sqrt(5)").to_string(), "1/2+3/4*sqrt(5)");
        assert_eq!(s("sqrt(8)").to_string(), "2*sqrt(2)");
        assert_eq!(s("sqrt(9)").to_string(), "3");
        assert_eq!(s("-sqrt(5)/2").to_string(), "-1/2*sqrt(5)");
        assert_eq!(s(" 2/4 - sqrt(3) ").to_string(), "1/2-sqrt(3)");
        assert_eq!(s("-3").to_string(), "-3");
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("sqrt(2)+sqrt(3)".parse::<ExactScalar>().is_err());
        assert!("".parse::<ExactScalar>().is_err());
        assert!("1+".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn golden_ratio_identity() {
        let phi = ExactScalar::golden();
        assert_eq!(&phi * &phi, &phi + &ExactScalar::one());
        assert_eq!(phi.checked_recip().unwrap(), &phi - &ExactScalar::one());
        assert_eq!(phi.signum(), 1);
        assert_eq!(phi.conjugate().signum(), -1);
    }

    #[test]
    fn sign_near_cancellation() {
        // 99/70 > sqrt 2 > 140/99
        assert_eq!(s("99/70-sqrt(2)").signum(), 1);
        assert_eq!(s("140/99-sqrt(2)").signum(), -1);
        assert_eq!(s("-99/70+sqrt(2)").signum(), -1);
    }

    #[test]
    fn incompatible_fields() {
        assert_eq!(s("sqrt(2)").checked_add(&s("sqrt(3)")), Err(ScalarError::IncompatibleField(2, 3)));
        assert!(scalar_cmp(&s("sqrt(2)"), &s("sqrt(5)")).is_err());
    }

    #[test]
    fn fixed_codim_examples() {
        let id = ExactMatrix::identity(3);
        assert_eq!(mat_classify_fixed_codim(&id), Ok(0));
        let refl = ExactMatrix::from_int_rows(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(mat_classify_fixed_codim(&refl), Ok(1));
        let rot = ExactMatrix::from_int_rows(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(mat_classify_fixed_codim(&rot), Ok(2));
        let bad = ExactMatrix::from_int_rows(&[&[2, 0], &[0, 1]]);
        assert_eq!(mat_classify_fixed_codim(&bad), Err(ScalarError::NotOrthogonal));
        // a transposition on R^3 restricted to the sum-zero plane is a reflection
        let t = ExactMatrix::permutation(&[1, 0, 2]);
        let sum = ExactMatrix::from_int_rows(&[&[1, 1, 1]]);
        assert_eq!(fixed_codim_in(&t, &sum), Ok(1));
        // a 3-cycle is a rotation of that plane
        let c = ExactMatrix::permutation(&[1, 2, 0]);
        assert_eq!(fixed_codim_in(&c, &sum), Ok(2));
    }

    #[test]
    fn permutation_convention() {
        let p = ExactMatrix::permutation(&[2, 0, 1]);
        assert_eq!(p.mul_vec(&ExactVector::unit(3, 0)), ExactVector::unit(3, 2));
    }

    #[test]
    fn canonical_rays() {
        let v = ExactVector::from_ints(&[0, -4, 6]);
        assert_eq!(v.canonical_ray().unwrap(), ExactVector::from_ints(&[0, -2, 3]));
        let w = v.scale(&s("3+sqrt(5)"));
        assert_eq!(w.canonical_ray(), v.canonical_ray());
        assert!(ExactVector::zeros(2).canonical_ray().is_none());
    }

    #[test]
    fn inverse_and_det() {
        let m = ExactMatrix::from_rows(vec![vec![s("1"), s("sqrt(5)")], vec![s("0"), s("2")]]).unwrap();
        assert_eq!(m.determinant().unwrap(), s("2"));
        assert!(m.checked_mul(&m.inverse().unwrap()).unwrap().is_identity());
    }

    fn arb_scalar() -> impl Strategy<Value = ExactScalar> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20, prop::sample::select(vec![0u64, 2, 3, 5, 6, 12]))
            .prop_map(|(p, q, r, t, d)| ExactScalar::new(BigRational::new(p.into(), q.into()), BigRational::new(r.into(), t.into()), d))
    }

    fn arb_in_field(d: u64) -> impl Strategy<Value = ExactScalar> {
        (-30i64..30, 1i64..9, -30i64..30, 1i64..9)
            .prop_map(move |(p, q, r, t)| ExactScalar::new(BigRational::new(p.into(), q.into()), BigRational::new(r.into(), t.into()), d))
    }

    proptest! {
        #[test]
        fn round_trip(x in arb_scalar()) {
            let printed = x.to_string();
            prop_assert_eq!(printed.parse::<ExactScalar>().unwrap(), x);
        }

        #[test]
        fn sign_matches_float(x in arb_scalar()) {
            let f = x.to_f64();
            if f.abs() > 1e-9 {
                prop_assert_eq!(x.signum(), if f > 0.0 { 1 } else { -1 });
            }
        }

        #[test]
        fn field_axioms(x in arb_in_field(5), y in arb_in_field(5), z in arb_in_field(5)) {
            prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            if !x.is_zero() {
                prop_assert!((&x * &x.checked_recip().unwrap()).is_one());
            }
            prop_assert_eq!(x.try_cmp(&y).unwrap(), y.try_cmp(&x).unwrap().reverse());
        }
    }
}
