//! Generic orders of finite reductive groups as cyclotomic products.
//!
//! The order polynomial of a group of type X over F_q factors as
//! q^N · ∏_d Φ_d(q)^{a_d} with N the number of positive roots; the exponents
//! come from the Weyl degrees, for twisted types with the sign or cube-root
//! eigenvalues of the diagram automorphism folded in. The ℓ-part of such a
//! product splits into a constant ℓ-power plus a multiplicity of the deep
//! factor |Φ_e(q)|_ℓ, where e is the order of q modulo ℓ (modulo 4 for
//! ℓ = 2).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rootsys::CartanType;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderError {
    #[error("unsupported twist {twist} for type {label}")]
    UnsupportedTwist { label: CartanType, twist: TwistTag },
    #[error("{ell} divides q = {q}; cross characteristic required")]
    EllDividesQ { ell: u64, q: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("inconsistent profile: {lhs} does not divide Φ_{index}(q) for q = {q}")]
    InconsistentProfile { lhs: u64, index: u32, q: u64 },
}

/// Frobenius twist tag: 1 (split), 2 (order-2 diagram automorphism),
/// 3 (triality, type D4 only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TwistTag {
    None,
    Two,
    Three,
}

impl std::fmt::Display for TwistTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TwistTag::None => write!(f, "1"),
            TwistTag::Two => write!(f, "2"),
            TwistTag::Three => write!(f, "3"),
        }
    }
}

/// A generic order q^N · ∏ Φ_d(q)^{a_d}, stored as an exponent map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycloProduct {
    pub q_power: u32,
    pub factors: BTreeMap<u32, u32>,
}

impl CycloProduct {
    pub fn one() -> Self {
        CycloProduct { q_power: 0, factors: BTreeMap::new() }
    }

    pub fn phi(d: u32, exponent: u32) -> Self {
        let mut factors = BTreeMap::new();
        if exponent > 0 {
            factors.insert(d, exponent);
        }
        CycloProduct { q_power: 0, factors }
    }

    pub fn exponent_of(&self, d: u32) -> u32 {
        self.factors.get(&d).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &CycloProduct) -> CycloProduct {
        let mut out = self.clone();
        out.q_power += other.q_power;
        for (&d, &a) in &other.factors {
            *out.factors.entry(d).or_insert(0) += a;
        }
        out
    }

    pub fn pow(&self, k: u32) -> CycloProduct {
        let mut out = CycloProduct::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// True when every factor exponent (and the q-power) is dominated by
    /// `other`'s.
    pub fn divides(&self, other: &CycloProduct) -> bool {
        self.q_power <= other.q_power
            && self.factors.iter().all(|(&d, &a)| a <= other.exponent_of(d))
    }

    /// Degree as a polynomial in q.
    pub fn degree(&self) -> u32 {
        self.q_power + self.factors.iter().map(|(&d, &a)| euler_phi(d) * a).sum::<u32>()
    }

    /// Exact value at a prime power q.
    pub fn specialize(&self, q: u64) -> BigUint {
        let mut value = BigUint::from(q).pow(self.q_power);
        for (&d, &a) in &self.factors {
            value *= cyclotomic_value(d, q).pow(a);
        }
        value
    }

    /// Canonical rendering, e.g. `q^63.Φ1^7.Φ2^7.Φ3^3`.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        match self.q_power {
            0 => {}
            1 => parts.push("q".to_string()),
            n => parts.push(format!("q^{n}")),
        }
        for (&d, &a) in &self.factors {
            match a {
                0 => {}
                1 => parts.push(format!("Φ{d}")),
                _ => parts.push(format!("Φ{d}^{a}")),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(".")
        }
    }
}

impl std::fmt::Display for CycloProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// One factor (q^d - ε) of an order polynomial, with ε the eigenvalue of the
/// twisting automorphism on the degree-d invariant. `OmegaPair` stands for a
/// conjugate pair of cube-root eigenvalues, i.e. q^{2d} + q^d + 1.
enum DegreeFactor {
    Minus(u32),
    Plus(u32),
    OmegaPair(u32),
}

impl DegreeFactor {
    fn cyclotomic_indices(&self) -> Vec<u32> {
        match *self {
            DegreeFactor::Minus(d) => divisors(d),
            DegreeFactor::Plus(d) => {
                divisors(2 * d).into_iter().filter(|e| d % e != 0).collect()
            }
            DegreeFactor::OmegaPair(d) => {
                divisors(3 * d).into_iter().filter(|e| d % e != 0).collect()
            }
        }
    }

    fn value(&self, q: u64) -> BigUint {
        let qd = |d: u32| BigInt::from(q).pow(d);
        let v: BigInt = match *self {
            DegreeFactor::Minus(d) => qd(d) - 1,
            DegreeFactor::Plus(d) => qd(d) + 1,
            DegreeFactor::OmegaPair(d) => qd(2 * d) + qd(d) + 1,
        };
        v.to_biguint().expect("order factors are positive for q > 1")
    }
}

fn degree_factors(label: CartanType, twist: TwistTag) -> Result<Vec<DegreeFactor>, OrderError> {
    let degrees = label.weyl_degrees();
    let unsupported = || OrderError::UnsupportedTwist { label, twist };
    match twist {
        TwistTag::None => Ok(degrees.into_iter().map(DegreeFactor::Minus).collect()),
        TwistTag::Two => match label {
            CartanType::A(n) if n >= 2 => Ok(degrees
                .into_iter()
                .map(|d| if d % 2 == 0 { DegreeFactor::Minus(d) } else { DegreeFactor::Plus(d) })
                .collect()),
            CartanType::D(n) => {
                // The diagram automorphism negates the degree-n Pfaffian.
                let mut ds = degrees;
                let pos = ds.iter().position(|&d| d == n as u32).expect("degree n present");
                ds.remove(pos);
                let mut out: Vec<DegreeFactor> = ds.into_iter().map(DegreeFactor::Minus).collect();
                out.push(DegreeFactor::Plus(n as u32));
                Ok(out)
            }
            CartanType::E6 => Ok(degrees
                .into_iter()
                .map(|d| if d == 5 || d == 9 { DegreeFactor::Plus(d) } else { DegreeFactor::Minus(d) })
                .collect()),
            _ => Err(unsupported()),
        },
        TwistTag::Three => match label {
            CartanType::D(4) => Ok(vec![
                DegreeFactor::Minus(2),
                DegreeFactor::Minus(6),
                DegreeFactor::OmegaPair(4),
            ]),
            _ => Err(unsupported()),
        },
    }
}

/// Generic order of the (possibly twisted) group of the given type.
pub fn generic_order_of(label: CartanType, twist: TwistTag) -> Result<CycloProduct, OrderError> {
    let factors = degree_factors(label, twist)?;
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    for f in &factors {
        for e in f.cyclotomic_indices() {
            *map.entry(e).or_insert(0) += 1;
        }
    }
    Ok(CycloProduct { q_power: (label.root_count() / 2) as u32, factors: map })
}

/// Exact value ∏(q^{d_i} - ε_i) · q^N, bypassing the cyclotomic
/// factorization. Used to cross-check the factored form.
pub fn specialize_unfactored(
    label: CartanType,
    twist: TwistTag,
    q: u64,
) -> Result<BigUint, OrderError> {
    let mut value = BigUint::from(q).pow((label.root_count() / 2) as u32);
    for f in degree_factors(label, twist)? {
        value *= f.value(q);
    }
    Ok(value)
}

/// Cross-characteristic profile: e is the order of q modulo ℓ, with the
/// modulus replaced by 4 when ℓ = 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EllProfile {
    pub ell: u64,
    pub q: u64,
    pub e: u32,
}

pub fn compute_e(ell: u64, q: u64) -> Result<EllProfile, OrderError> {
    if !is_prime(ell) {
        return Err(OrderError::NotPrime(ell));
    }
    if q % ell == 0 {
        return Err(OrderError::EllDividesQ { ell, q });
    }
    let modulus = if ell == 2 { 4 } else { ell };
    let base = q % modulus;
    let mut e = 1u32;
    let mut acc = base;
    while acc != 1 {
        acc = acc * base % modulus;
        e += 1;
        assert!(e as u64 <= modulus, "multiplicative order exceeded the modulus");
    }
    Ok(EllProfile { ell, q, e })
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Symbolic ℓ-part of a cyclotomic product: a constant ℓ-power times a
/// multiplicity of the q-dependent part |Φ_e(q)|_ℓ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolicValuation {
    pub ell: u64,
    pub e: u32,
    pub constant_exponent: u32,
    pub phi_e_multiplicity: u32,
}

impl SymbolicValuation {
    /// Exact ℓ-adic valuation of the specialized product at the profile's q.
    pub fn numeric(&self, profile: &EllProfile) -> u32 {
        let deep = big_ell_valuation(&cyclotomic_value(self.e, profile.q), profile.ell);
        self.constant_exponent + self.phi_e_multiplicity * deep
    }

    /// Canonical rendering, e.g. `3^4.|Φ1|_3^7`.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        match self.constant_exponent {
            0 => {}
            1 => parts.push(format!("{}", self.ell)),
            n => parts.push(format!("{}^{}", self.ell, n)),
        }
        match self.phi_e_multiplicity {
            0 => {}
            1 => parts.push(format!("|Φ{}|_{}", self.e, self.ell)),
            n => parts.push(format!("|Φ{}|_{}^{}", self.e, self.ell, n)),
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(".")
        }
    }
}

impl std::fmt::Display for SymbolicValuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// ℓ-part of a cyclotomic product, symbolically.
///
/// Φ_d(q) is divisible by ℓ exactly when d = e·ℓ^k: for k ≥ 1 the valuation
/// is exactly 1, while d = e carries the unbounded part |Φ_e(q)|_ℓ. For
/// ℓ = 2 both Φ_1 and Φ_2 are even (q odd); the one that is not Φ_e
/// contributes exactly one factor of 2 under the modulus-4 convention.
pub fn ell_valuation(product: &CycloProduct, profile: &EllProfile) -> SymbolicValuation {
    ell_valuation_symbolic(product, profile.ell, profile.e)
}

/// Same as [`ell_valuation`] but q-free: the symbolic form depends only on
/// ℓ and e.
pub fn ell_valuation_symbolic(product: &CycloProduct, ell: u64, e: u32) -> SymbolicValuation {
    let mut constant = 0u32;
    for (&d, &a) in &product.factors {
        if d == e {
            continue;
        }
        if ell == 2 {
            // At odd q exactly the Φ_{2^k} take even values; away from Φ_e
            // each contributes a single factor of 2.
            if d.is_power_of_two() {
                constant += a;
            }
        } else if d % e == 0 {
            // d = e·ℓ^k with k ≥ 1 contributes valuation exactly 1.
            let mut m = d / e;
            while m % ell as u32 == 0 {
                m /= ell as u32;
            }
            if m == 1 {
                constant += a;
            }
        }
    }
    SymbolicValuation {
        ell,
        e,
        constant_exponent: constant,
        phi_e_multiplicity: product.exponent_of(e),
    }
}

/// Exact ℓ-adic valuation of a big integer.
pub fn big_ell_valuation(n: &BigUint, ell: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero is undefined");
    let ell = BigUint::from(ell);
    let mut v = 0;
    let mut n = n.clone();
    while (&n % &ell).is_zero() {
        n /= &ell;
        v += 1;
    }
    v
}

/// A torus of shape Φ_d^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TorusShape {
    pub phi_index: u32,
    pub exponent: u32,
}

impl TorusShape {
    /// Accepts `Phi1^6`, `Φ1^6` or `Phi1`.
    pub fn parse(s: &str) -> Option<TorusShape> {
        let rest = s.trim().strip_prefix("Phi").or_else(|| s.trim().strip_prefix("Φ"))?;
        let (idx, exp) = match rest.split_once('^') {
            Some((i, e)) => (i.parse().ok()?, e.parse().ok()?),
            None => (rest.parse().ok()?, 1),
        };
        Some(TorusShape { phi_index: idx, exponent: exp })
    }
}

impl std::fmt::Display for TorusShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exponent == 1 {
            write!(f, "Φ{}", self.phi_index)
        } else {
            write!(f, "Φ{}^{}", self.phi_index, self.exponent)
        }
    }
}

/// Sectional ℓ-rank contributed by a torus (C_{Φ_d(q)})^k: the exponent k,
/// provided ℓ actually divides Φ_d(q).
pub fn torus_sectional_rank(shape: &TorusShape, profile: &EllProfile) -> Result<u32, OrderError> {
    if shape.exponent == 0 {
        return Ok(0);
    }
    let v = big_ell_valuation(&cyclotomic_value(shape.phi_index, profile.q), profile.ell);
    if v == 0 {
        return Err(OrderError::InconsistentProfile {
            lhs: profile.ell,
            index: shape.phi_index,
            q: profile.q,
        });
    }
    Ok(shape.exponent)
}

/// Coefficients of Φ_d, low degree first, by exact division of x^d - 1.
pub fn cyclotomic_coeffs(d: u32) -> Vec<i64> {
    assert!(d >= 1);
    if d == 1 {
        return vec![-1, 1];
    }
    let mut poly = vec![0i64; d as usize + 1];
    poly[0] = -1;
    poly[d as usize] = 1;
    for div in divisors(d) {
        if div != d {
            poly = poly_exact_div(&poly, &cyclotomic_coeffs(div));
        }
    }
    poly
}

/// Exact value Φ_d(q).
pub fn cyclotomic_value(d: u32, q: u64) -> BigUint {
    let coeffs = cyclotomic_coeffs(d);
    let mut acc = BigInt::zero();
    let qb = BigInt::from(q);
    for &c in coeffs.iter().rev() {
        acc = acc * &qb + BigInt::from(c);
    }
    assert!(acc.is_positive(), "Φ_d(q) must be positive for q ≥ 2");
    acc.to_biguint().unwrap()
}

fn poly_exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let lead = den[dn];
    assert_eq!(lead.abs(), 1, "cyclotomic divisors are monic");
    let mut quot = vec![0i64; rem.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dn] / lead;
        quot[k] = c;
        if c != 0 {
            for (i, &dc) in den.iter().enumerate() {
                rem[k + i] -= c * dc;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "division must be exact");
    quot
}

pub fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    for d in 1..=n {
        if n % d == 0 {
            out.push(d);
        }
    }
    out
}
