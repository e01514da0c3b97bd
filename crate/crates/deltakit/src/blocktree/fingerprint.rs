//! Karp-Rabin fingerprints as a group.
//!
//! An element is a pair `(value, shift)` with `value` the polynomial hash
//! of a string and `shift = r^len`, both modulo the Mersenne prime
//! `2^61 - 1`. Concatenation is `(v1, e1) . (v2, e2) =
//! (v1 * e2 + v2, e1 * e2)`, which is associative with identity `(0, 1)`
//! and inverses because `r` is invertible mod a prime. Appending a symbol
//! composes with that symbol's singleton fingerprint, so the map from
//! strings to elements is a homomorphism and substring fingerprints can be
//! assembled from prefix fingerprints in O(1) group operations.

/// Modulus of all fingerprint arithmetic.
pub const FP_MOD: u64 = (1 << 61) - 1;

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(FP_MOD)) as u64
}

#[inline]
fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= FP_MOD {
        s - FP_MOD
    } else {
        s
    }
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    base %= FP_MOD;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

#[inline]
fn inv_mod(a: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(FP_MOD));
    pow_mod(a, FP_MOD - 2)
}

/// A group element: `(hash value, r^len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpElem {
    pub value: u64,
    pub shift: u64,
}

impl FpElem {
    pub const IDENTITY: FpElem = FpElem { value: 0, shift: 1 };

    /// Group operation: fingerprint of the concatenation.
    #[inline]
    pub fn compose(self, rhs: FpElem) -> FpElem {
        FpElem {
            value: add_mod(mul_mod(self.value, rhs.shift), rhs.value),
            shift: mul_mod(self.shift, rhs.shift),
        }
    }

    /// Group inverse: `x.compose(x.inverse()) == IDENTITY`.
    pub fn inverse(self) -> FpElem {
        let s = inv_mod(self.shift);
        FpElem {
            value: (FP_MOD - mul_mod(self.value, s)) % FP_MOD,
            shift: s,
        }
    }
}

/// A fingerprint scheme: a choice of base `r` in `[2, FP_MOD - 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KarpRabin {
    base: u64,
}

impl KarpRabin {
    pub fn new(base: u64) -> crate::error::Result<Self> {
        if !(2..=FP_MOD - 2).contains(&base) {
            return Err(crate::error::Error::invalid(format!(
                "fingerprint base {base} outside [2, {}]",
                FP_MOD - 2
            )));
        }
        Ok(KarpRabin { base })
    }

    /// Derives a base uniformly from `[2, FP_MOD - 2]`.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = crate::util::SplitMix64::new(crate::util::derive_seed(seed, 0x4b52)); // "KR"
        KarpRabin {
            base: rng.next_in_range(2, FP_MOD - 2),
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Fingerprint of a single symbol.
    #[inline]
    pub fn symbol(&self, sym: u32) -> FpElem {
        FpElem {
            value: u64::from(sym) % FP_MOD,
            shift: self.base,
        }
    }

    /// Linear-scan fingerprint of a whole slice; the reference
    /// implementation queries are checked against.
    pub fn fold(&self, syms: &[u32]) -> FpElem {
        let mut acc = FpElem::IDENTITY;
        for &s in syms {
            acc = acc.compose(self.symbol(s));
        }
        acc
    }
}

/// Prefix tables over a fixed text for O(1) substring fingerprints.
#[derive(Debug, Clone)]
pub struct FpPrefix {
    scheme: KarpRabin,
    hash: Vec<u64>, // hash[i] = value of text[0..i)
    pow: Vec<u64>,  // pow[i] = base^i
}

impl FpPrefix {
    pub fn new(scheme: KarpRabin, syms: &[u32]) -> Self {
        let n = syms.len();
        let mut hash = Vec::with_capacity(n + 1);
        let mut pow = Vec::with_capacity(n + 1);
        hash.push(0);
        pow.push(1);
        for (i, &s) in syms.iter().enumerate() {
            hash.push(add_mod(
                mul_mod(hash[i], scheme.base),
                u64::from(s) % FP_MOD,
            ));
            pow.push(mul_mod(pow[i], scheme.base));
        }
        FpPrefix { scheme, hash, pow }
    }

    pub fn scheme(&self) -> KarpRabin {
        self.scheme
    }

    /// Fingerprint of `text[a..b)`.
    pub fn range(&self, a: usize, b: usize) -> FpElem {
        debug_assert!(a <= b && b < self.hash.len());
        let len = b - a;
        let shifted = mul_mod(self.hash[a], self.pow[len]);
        FpElem {
            value: add_mod(self.hash[b], FP_MOD - shifted),
            shift: self.pow[len],
        }
    }
}
