//! Exact rationals for the LP kernel: machine-word numerator and
//! denominator while they fit, `BigRational` otherwise. Results are always
//! reduced, and big values that fit again are demoted, so equal numbers
//! have equal representations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) enum Num {
    /// Numerator and positive denominator, coprime.
    Small(i64, i64),
    Big(Box<Rational>),
}

impl fmt::Debug for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::rational::fmt_rational(&self.to_rational()))
    }
}

impl Num {
    pub const ZERO: Num = Num::Small(0, 1);
    pub const ONE: Num = Num::Small(1, 1);

    fn from_i128(n: i128, d: i128) -> Num {
        debug_assert!(d != 0);
        let g = n.gcd(&d);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Num::Small(n, d),
            _ => Num::Big(Box::new(Rational::new(n.into(), d.into()))),
        }
    }

    pub fn from_rational(r: &Rational) -> Num {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Num::Small(n, d),
            _ => Num::Big(Box::new(r.clone())),
        }
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            Num::Small(n, d) => Rational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Num::Big(r) => (**r).clone(),
        }
    }

    fn demote(r: Rational) -> Num {
        Num::from_rational(&r)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Num::Small(0, _))
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Num::Small(n, _) => *n > 0,
            Num::Big(r) => r.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Num::Small(n, _) => *n < 0,
            Num::Big(r) => r.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Num::Small(_, d) => *d == 1,
            Num::Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Num {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Num {
        match self {
            Num::Small(n, d) => Num::from_i128(*d as i128, *n as i128),
            Num::Big(r) => Num::demote(r.recip()),
        }
    }
}

impl From<&Rational> for Num {
    fn from(r: &Rational) -> Num {
        Num::from_rational(r)
    }
}

impl PartialOrd for Num {
    fn partial_cmp(&self, other: &Num) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Num {
    fn cmp(&self, other: &Num) -> Ordering {
        match (self, other) {
            (Num::Small(a, b), Num::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $small:expr, $big:expr) => {
        impl $trait<&Num> for &Num {
            type Output = Num;

            fn $method(self, rhs: &Num) -> Num {
                match (self, rhs) {
                    (Num::Small(a, b), Num::Small(c, d)) => {
                        let f: fn(i128, i128, i128, i128) -> (i128, i128) = $small;
                        let (n, d) = f(*a as i128, *b as i128, *c as i128, *d as i128);
                        Num::from_i128(n, d)
                    }
                    _ => {
                        let f: fn(Rational, Rational) -> Rational = $big;
                        Num::demote(f(self.to_rational(), rhs.to_rational()))
                    }
                }
            }
        }

        impl $trait<Num> for Num {
            type Output = Num;

            fn $method(self, rhs: Num) -> Num {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&Num> for Num {
            type Output = Num;

            fn $method(self, rhs: &Num) -> Num {
                (&self).$method(rhs)
            }
        }

        impl $trait<Num> for &Num {
            type Output = Num;

            fn $method(self, rhs: Num) -> Num {
                self.$method(&rhs)
            }
        }
    };
}

// i64 inputs keep every intermediate below 2^127
binop!(Add, add, |a, b, c, d| if b == d { (a + c, b) } else { (a * d + c * b, b * d) }, |x, y| x + y);
binop!(Sub, sub, |a, b, c, d| if b == d { (a - c, b) } else { (a * d - c * b, b * d) }, |x, y| x - y);
binop!(Mul, mul, |a, b, c, d| (a * c, b * d), |x, y| x * y);
binop!(Div, div, |a, b, c, d| (a * d, b * c), |x, y| x / y);

impl Neg for &Num {
    type Output = Num;

    fn neg(self) -> Num {
        match self {
            Num::Small(n, d) => match n.checked_neg() {
                Some(m) => Num::Small(m, *d),
                None => Num::from_i128(-(*n as i128), *d as i128),
            },
            Num::Big(r) => Num::demote(-(**r).clone()),
        }
    }
}

impl Neg for Num {
    type Output = Num;

    fn neg(self) -> Num {
        -&self
    }
}

impl AddAssign<&Num> for Num {
    fn add_assign(&mut self, rhs: &Num) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Num> for Num {
    fn sub_assign(&mut self, rhs: &Num) {
        *self = &*self - rhs;
    }
}

impl AddAssign<Num> for Num {
    fn add_assign(&mut self, rhs: Num) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<Num> for Num {
    fn sub_assign(&mut self, rhs: Num) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<&Num> for Num {
    fn mul_assign(&mut self, rhs: &Num) {
        *self = &*self * rhs;
    }
}

impl Zero for Num {
    fn zero() -> Num {
        Num::ZERO
    }

    fn is_zero(&self) -> bool {
        Num::is_zero(self)
    }
}

impl One for Num {
    fn one() -> Num {
        Num::ONE
    }
}
