use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// Exact rational; machine-sized until an operation overflows.
#[derive(Debug, Clone)]
pub enum Q {
    Small(Ratio<i128>),
    Big(BigRational),
}

fn big(r: &Ratio<i128>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl Q {
    pub fn zero() -> Q {
        Q::Small(Ratio::zero())
    }

    pub fn one() -> Q {
        Q::Small(Ratio::one())
    }

    pub fn int(v: i128) -> Q {
        Q::Small(Ratio::from_integer(v))
    }

    fn to_big(&self) -> BigRational {
        match self {
            Q::Small(r) => big(r),
            Q::Big(b) => b.clone(),
        }
    }

    fn shrink(b: BigRational) -> Q {
        match (b.numer().to_i128(), b.denom().to_i128()) {
            (Some(n), Some(d)) => Q::Small(Ratio::new_raw(n, d)),
            _ => Q::Big(b),
        }
    }

    fn binop(
        &self,
        o: &Q,
        small: fn(&Ratio<i128>, &Ratio<i128>) -> Option<Ratio<i128>>,
        bigf: fn(BigRational, BigRational) -> BigRational,
    ) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, o) {
            if let Some(r) = small(a, b) {
                return Q::Small(r);
            }
        }
        Q::shrink(bigf(self.to_big(), o.to_big()))
    }

    pub fn add(&self, o: &Q) -> Q {
        self.binop(o, |a, b| a.checked_add(b), |a, b| a + b)
    }

    pub fn sub(&self, o: &Q) -> Q {
        self.binop(o, |a, b| a.checked_sub(b), |a, b| a - b)
    }

    pub fn mul(&self, o: &Q) -> Q {
        self.binop(o, |a, b| a.checked_mul(b), |a, b| a * b)
    }

    /// Panics on division by zero.
    pub fn div(&self, o: &Q) -> Q {
        assert!(!o.is_zero(), "division by zero");
        self.binop(o, |a, b| a.checked_div(b), |a, b| a / b)
    }

    pub fn neg(&self) -> Q {
        match self {
            Q::Small(r) if *r.numer() != i128::MIN => Q::Small(-*r),
            _ => Q::shrink(-self.to_big()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(r) => r.is_zero(),
            Q::Big(b) => b.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Q::Small(r) => r.is_negative(),
            Q::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Q::Small(r) => r.is_positive(),
            Q::Big(b) => b.is_positive(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(r) => r.is_integer(),
            Q::Big(b) => b.is_integer(),
        }
    }

    pub fn floor(&self) -> BigInt {
        match self {
            Q::Small(r) => BigInt::from(r.floor().to_integer()),
            Q::Big(b) => b.floor().to_integer(),
        }
    }

    pub fn ceil(&self) -> BigInt {
        match self {
            Q::Small(r) => BigInt::from(r.ceil().to_integer()),
            Q::Big(b) => b.ceil().to_integer(),
        }
    }

    /// Distance to the nearest integer, scaled to [0, 1/2].
    pub fn frac_distance(&self) -> Q {
        let f = self.sub(&Q::from_big_int(&self.floor()));
        let g = Q::one().sub(&f);
        if f.cmp_q(&g) == Ordering::Greater {
            g
        } else {
            f
        }
    }

    pub fn from_big_int(v: &BigInt) -> Q {
        match v.to_i128() {
            Some(x) => Q::int(x),
            None => Q::Big(BigRational::from_integer(v.clone())),
        }
    }

    pub fn cmp_q(&self, o: &Q) -> Ordering {
        match (self, o) {
            (Q::Small(a), Q::Small(b)) => {
                // Ratio<i128>::cmp may overflow internally for large values.
                match (i128::checked_mul(*a.numer(), *b.denom()), i128::checked_mul(*b.numer(), *a.denom())) {
                    (Some(x), Some(y)) => x.cmp(&y),
                    _ => big(a).cmp(&big(b)),
                }
            }
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}

impl PartialEq for Q {
    fn eq(&self, o: &Q) -> bool {
        self.cmp_q(o) == Ordering::Equal
    }
}

impl Eq for Q {}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        self.cmp_q(o)
    }
}
