//! Monomial model of the bigraded ring `S = k[x_0..x_m, y_0..y_n]` and of
//! the restriction ring `R` of a (1,1) hypersurface.
//!
//! Sign convention: a one-parameter subgroup scales `x_i -> t^{u_i} x_i` and
//! `y_j -> t^{v_j} y_j`. Sections carry the dual action, so the monomial
//! `x^A y^B` has weight `-(A.u + B.v)`.

use std::ops::Add;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::binom;

/// Default limit on `dim S_{a,b}` for explicit enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 2_000_000;

/// Environment variable overriding [`DEFAULT_ENUMERATION_CAP`].
pub const ENUMERATION_CAP_ENV: &str = "SEGRE_KSTAB_ENUM_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmbientShape {
    pub m: usize,
    pub n: usize,
}

impl AmbientShape {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidShape(format!(
                "both factors need positive dimension, got m={m} n={n}"
            )));
        }
        Ok(Self { m, n })
    }

    pub fn transpose(self) -> Self {
        Self {
            m: self.n,
            n: self.m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BiDegree {
    pub a: u64,
    pub b: u64,
}

impl BiDegree {
    pub fn new(a: u64, b: u64) -> Self {
        Self { a, b }
    }
}

/// Diagonal one-parameter subgroup of `GL(m+1) x GL(n+1)`, given by its
/// weights. It lies in `SL x SL` when both weight vectors sum to zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneParameterSubgroup {
    pub u: Vec<i64>,
    pub v: Vec<i64>,
}

impl OneParameterSubgroup {
    pub fn new(u: Vec<i64>, v: Vec<i64>) -> Self {
        Self { u, v }
    }

    pub fn trivial(shape: AmbientShape) -> Self {
        Self::new(vec![0; shape.m + 1], vec![0; shape.n + 1])
    }

    pub fn fits(&self, shape: AmbientShape) -> Result<()> {
        if self.u.len() != shape.m + 1 || self.v.len() != shape.n + 1 {
            return Err(Error::LengthMismatch(format!(
                "λ has {}+{} weights, shape ({},{}) needs {}+{}",
                self.u.len(),
                self.v.len(),
                shape.m,
                shape.n,
                shape.m + 1,
                shape.n + 1
            )));
        }
        Ok(())
    }

    pub fn is_special_linear(&self) -> bool {
        self.check_special_linear().is_ok()
    }

    pub fn check_special_linear(&self) -> Result<()> {
        let su: i64 = self.u.iter().sum();
        if su != 0 {
            return Err(Error::NotSpecialLinear {
                factor: "u",
                sum: su,
            });
        }
        let sv: i64 = self.v.iter().sum();
        if sv != 0 {
            return Err(Error::NotSpecialLinear {
                factor: "v",
                sum: sv,
            });
        }
        Ok(())
    }
}

impl Add for &OneParameterSubgroup {
    type Output = OneParameterSubgroup;

    fn add(self, rhs: Self) -> OneParameterSubgroup {
        let zip = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        OneParameterSubgroup::new(zip(&self.u, &rhs.u), zip(&self.v, &rhs.v))
    }
}

/// `x^A y^B`
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

impl Monomial {
    pub fn new(x: Vec<u32>, y: Vec<u32>) -> Self {
        Self { x, y }
    }

    pub fn bidegree(&self) -> BiDegree {
        BiDegree::new(
            self.x.iter().map(|&e| e as u64).sum(),
            self.y.iter().map(|&e| e as u64).sum(),
        )
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let zip = |a: &[u32], b: &[u32]| a.iter().zip(b).map(|(p, q)| p + q).collect();
        Monomial::new(zip(&self.x, &other.x), zip(&self.y, &other.y))
    }
}

/// Upper bound on `dim S_{a,b}` for explicit enumeration; larger pieces are
/// summed with a per-factor transfer instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationCap(pub u64);

impl Default for EnumerationCap {
    fn default() -> Self {
        Self(DEFAULT_ENUMERATION_CAP)
    }
}

impl EnumerationCap {
    /// Reads [`ENUMERATION_CAP_ENV`], falling back to the default.
    pub fn from_env() -> Self {
        std::env::var(ENUMERATION_CAP_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map_or_else(Self::default, Self)
    }
}

/// `dim S_{a,b} = C(m+a, m) * C(n+b, n)`.
pub fn dim_bigraded(shape: AmbientShape, deg: BiDegree) -> BigInt {
    binom(shape.m as u64 + deg.a, shape.m as u64) * binom(shape.n as u64 + deg.b, shape.n as u64)
}

/// All exponent vectors of length `parts` summing to `total`, in
/// descending lexicographic order (`x_0^total` first).
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn go(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        go(total, parts, &mut Vec::with_capacity(parts), &mut out);
    } else if total == 0 {
        out.push(Vec::new());
    }
    out
}

/// Monomial basis of `S_{a,b}`, ordered lexicographically on `(A, B)`.
pub fn enumerate_monomials(shape: AmbientShape, deg: BiDegree) -> Vec<Monomial> {
    let xs = compositions(deg.a as u32, shape.m + 1);
    let ys = compositions(deg.b as u32, shape.n + 1);
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for a in &xs {
        for b in &ys {
            out.push(Monomial::new(a.clone(), b.clone()));
        }
    }
    out
}

fn dot(exps: &[u32], weights: &[i64]) -> i64 {
    exps.iter().zip(weights).map(|(&e, &w)| e as i64 * w).sum()
}

/// Weight of a monomial section under the dual action: `-(A.u + B.v)`.
pub fn dual_weight(mono: &Monomial, lambda: &OneParameterSubgroup) -> Result<i64> {
    if mono.x.len() != lambda.u.len() || mono.y.len() != lambda.v.len() {
        return Err(Error::LengthMismatch(format!(
            "monomial has {}+{} variables, λ has {}+{} weights",
            mono.x.len(),
            mono.y.len(),
            lambda.u.len(),
            lambda.v.len()
        )));
    }
    Ok(-(dot(&mono.x, &lambda.u) + dot(&mono.y, &lambda.v)))
}

/// Size and total dual weight of a monomial set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub count: BigInt,
    pub weight: BigInt,
}

/// Walks every monomial of `S_{a,b}` and sums dual weights one by one.
pub fn census_enumerated(
    shape: AmbientShape,
    deg: BiDegree,
    lambda: &OneParameterSubgroup,
) -> Result<Census> {
    lambda.fits(shape)?;
    let xs = compositions(deg.a as u32, shape.m + 1);
    let ys = compositions(deg.b as u32, shape.n + 1);
    let xw: Vec<i64> = xs.iter().map(|a| dot(a, &lambda.u)).collect();
    let yw: Vec<i64> = ys.iter().map(|b| dot(b, &lambda.v)).collect();
    let mut count: u64 = 0;
    let mut weight: i128 = 0;
    for &wa in &xw {
        for &wb in &yw {
            count += 1;
            weight -= (wa + wb) as i128;
        }
    }
    Ok(Census {
        count: BigInt::from(count),
        weight: BigInt::from(weight),
    })
}

/// Per-degree counts and coordinate-weight sums of monomials in one factor,
/// built one variable at a time.
fn factor_transfer(total: u64, weights: &[i64]) -> (BigInt, BigInt) {
    let len = total as usize + 1;
    let mut count = vec![BigInt::zero(); len];
    let mut wsum = vec![BigInt::zero(); len];
    count[0] = BigInt::from(1);
    for &w in weights {
        let mut next_count = vec![BigInt::zero(); len];
        let mut next_wsum = vec![BigInt::zero(); len];
        for deg in 0..len {
            for exp in 0..=deg {
                let prev = deg - exp;
                if count[prev].is_zero() {
                    continue;
                }
                next_count[deg] += &count[prev];
                next_wsum[deg] += &wsum[prev] + &count[prev] * BigInt::from(exp as i64 * w);
            }
        }
        count = next_count;
        wsum = next_wsum;
    }
    (count[total as usize].clone(), wsum[total as usize].clone())
}

/// Same totals as [`census_enumerated`], summed by a transfer over
/// variables instead of visiting each monomial.
pub fn census_transfer(
    shape: AmbientShape,
    deg: BiDegree,
    lambda: &OneParameterSubgroup,
) -> Result<Census> {
    lambda.fits(shape)?;
    let (cx, wx) = factor_transfer(deg.a, &lambda.u);
    let (cy, wy) = factor_transfer(deg.b, &lambda.v);
    Ok(Census {
        weight: -(&wx * &cy + &wy * &cx),
        count: cx * cy,
    })
}

/// Enumerates when `dim S_{a,b}` is within the cap, otherwise uses the
/// transfer.
pub fn census(
    shape: AmbientShape,
    deg: BiDegree,
    lambda: &OneParameterSubgroup,
    cap: EnumerationCap,
) -> Result<Census> {
    let within_cap = dim_bigraded(shape, deg)
        .to_u64()
        .is_some_and(|d| d <= cap.0);
    if within_cap {
        census_enumerated(shape, deg, lambda)
    } else {
        census_transfer(shape, deg, lambda)
    }
}

/// Total dual weight of `S_{a,b}`.
pub fn total_weight(
    shape: AmbientShape,
    deg: BiDegree,
    lambda: &OneParameterSubgroup,
) -> Result<BigInt> {
    Ok(census(shape, deg, lambda, EnumerationCap::from_env())?.weight)
}

fn previous_degree(d: u64, e: u64, k: u64) -> Option<BiDegree> {
    // S_{a,b} with a negative index is zero
    let a = (d * k).checked_sub(1)?;
    let b = (e * k).checked_sub(1)?;
    Some(BiDegree::new(a, b))
}

/// `N_k = dim S_{dk,ek} - dim S_{dk-1,ek-1}`.
pub fn restricted_dim(shape: AmbientShape, d: u64, e: u64, k: u64) -> BigInt {
    let top = dim_bigraded(shape, BiDegree::new(d * k, e * k));
    match previous_degree(d, e, k) {
        Some(deg) => top - dim_bigraded(shape, deg),
        None => top,
    }
}

/// `(N_k, w_k)` from the exact sequence
/// `0 -> S_{dk-1,ek-1} --f--> S_{dk,ek} -> R_k -> 0`,
/// with both ambient pieces summed monomial by monomial. Multiplication by
/// `f` shifts every weight by `alpha`.
pub fn restricted_census(
    shape: AmbientShape,
    d: u64,
    e: u64,
    k: u64,
    lambda: &OneParameterSubgroup,
    alpha: i64,
    cap: EnumerationCap,
) -> Result<Census> {
    let top = census(shape, BiDegree::new(d * k, e * k), lambda, cap)?;
    let sub = match previous_degree(d, e, k) {
        Some(deg) => census(shape, deg, lambda, cap)?,
        None => Census {
            count: BigInt::zero(),
            weight: BigInt::zero(),
        },
    };
    let shifted = sub.weight + BigInt::from(alpha) * &sub.count;
    Ok(Census {
        count: top.count - sub.count,
        weight: top.weight - shifted,
    })
}

/// `w_k`, the total dual weight on `R_k`.
pub fn restricted_weight(
    shape: AmbientShape,
    d: u64,
    e: u64,
    k: u64,
    lambda: &OneParameterSubgroup,
    alpha: i64,
) -> Result<BigInt> {
    Ok(restricted_census(shape, d, e, k, lambda, alpha, EnumerationCap::from_env())?.weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn shape(m: usize, n: usize) -> AmbientShape {
        AmbientShape::new(m, n).unwrap()
    }

    fn destab_12() -> OneParameterSubgroup {
        OneParameterSubgroup::new(vec![0, 0], vec![-1, -1, 2])
    }

    fn random_sl(rng: &mut impl Rng, len: usize) -> Vec<i64> {
        loop {
            let mut w: Vec<i64> = (0..len - 1).map(|_| rng.gen_range(-5..=5)).collect();
            let last = -w.iter().sum::<i64>();
            if (-5..=5).contains(&last) {
                w.push(last);
                return w;
            }
        }
    }

    #[test]
    fn shape_rejects_zero_factor() {
        assert!(AmbientShape::new(0, 2).is_err());
        assert!(AmbientShape::new(2, 0).is_err());
    }

    #[test]
    fn dim_examples() {
        assert_eq!(
            dim_bigraded(shape(1, 2), BiDegree::new(1, 1)),
            BigInt::from(6)
        );
        assert_eq!(
            dim_bigraded(shape(3, 4), BiDegree::new(0, 0)),
            BigInt::from(1)
        );
        assert_eq!(
            dim_bigraded(shape(2, 2), BiDegree::new(1, 1)),
            BigInt::from(9)
        );
    }

    #[test]
    fn enumeration_examples() {
        let lin = enumerate_monomials(shape(1, 1), BiDegree::new(1, 0));
        assert_eq!(
            lin,
            vec![
                Monomial::new(vec![1, 0], vec![0, 0]),
                Monomial::new(vec![0, 1], vec![0, 0]),
            ]
        );
        let quad = enumerate_monomials(shape(1, 1), BiDegree::new(2, 0));
        let xs: Vec<_> = quad.iter().map(|mono| mono.x.clone()).collect();
        assert_eq!(xs, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let mixed = enumerate_monomials(shape(1, 2), BiDegree::new(1, 1));
        assert_eq!(mixed.len(), 6);
        let mut sorted = mixed.clone();
        sorted.sort_by(|p, q| q.cmp(p));
        assert_eq!(sorted, mixed, "descending lex on (A, B)");
    }

    #[test]
    fn enumeration_count_matches_closed_form() {
        for m in 1..=3 {
            for n in 1..=3 {
                for a in 0..=4 {
                    for b in 0..=4 {
                        let deg = BiDegree::new(a, b);
                        let monos = enumerate_monomials(shape(m, n), deg);
                        assert_eq!(BigInt::from(monos.len()), dim_bigraded(shape(m, n), deg));
                        assert!(monos.iter().all(|mono| mono.bidegree() == deg));
                        let mut dedup = monos.clone();
                        dedup.dedup();
                        assert_eq!(dedup.len(), monos.len());
                    }
                }
            }
        }
    }

    #[test]
    fn dual_weight_sign_convention() {
        // the destabilizer on P^1 x P^2 gives f = x0 y0 + x1 y1 weight +1
        let lambda = destab_12();
        let x0y0 = Monomial::new(vec![1, 0], vec![1, 0, 0]);
        let x1y1 = Monomial::new(vec![0, 1], vec![0, 1, 0]);
        assert_eq!(dual_weight(&x0y0, &lambda).unwrap(), 1);
        assert_eq!(dual_weight(&x1y1, &lambda).unwrap(), 1);
        let x1y2 = Monomial::new(vec![0, 1], vec![0, 0, 1]);
        assert_eq!(dual_weight(&x1y2, &lambda).unwrap(), -2);
        let trivial = OneParameterSubgroup::trivial(shape(1, 2));
        assert_eq!(dual_weight(&x1y2, &trivial).unwrap(), 0);
        let short = Monomial::new(vec![1], vec![1, 0, 0]);
        assert!(matches!(
            dual_weight(&short, &lambda),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn total_weight_examples() {
        let s = shape(1, 2);
        assert_eq!(
            total_weight(s, BiDegree::new(1, 1), &destab_12()).unwrap(),
            BigInt::zero()
        );
        let brute: i64 = enumerate_monomials(s, BiDegree::new(1, 1))
            .iter()
            .map(|mono| dual_weight(mono, &destab_12()).unwrap())
            .sum();
        assert_eq!(brute, 0);
        let trivial = OneParameterSubgroup::trivial(shape(2, 3));
        assert_eq!(
            total_weight(shape(2, 3), BiDegree::new(3, 2), &trivial).unwrap(),
            BigInt::zero()
        );
        let flip = OneParameterSubgroup::new(vec![1, -1], vec![0, 0]);
        assert_eq!(
            total_weight(shape(1, 1), BiDegree::new(1, 0), &flip).unwrap(),
            BigInt::zero()
        );
    }

    #[test]
    fn total_weight_vanishes_for_sl() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in 1..=3 {
            for n in 1..=3 {
                for _ in 0..20 {
                    let lambda = OneParameterSubgroup::new(
                        random_sl(&mut rng, m + 1),
                        random_sl(&mut rng, n + 1),
                    );
                    assert!(lambda.is_special_linear());
                    for a in 0..=4 {
                        for b in 0..=4 {
                            let c = census_enumerated(shape(m, n), BiDegree::new(a, b), &lambda)
                                .unwrap();
                            assert_eq!(c.weight, BigInt::zero(), "{lambda:?} ({a},{b})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn transfer_agrees_with_enumeration_for_any_lambda() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in 1..=3 {
            for n in 1..=3 {
                let u: Vec<i64> = (0..=m).map(|_| rng.gen_range(-4..=4)).collect();
                let v: Vec<i64> = (0..=n).map(|_| rng.gen_range(-4..=4)).collect();
                let lambda = OneParameterSubgroup::new(u, v);
                for a in 0..=4 {
                    for b in 0..=4 {
                        let deg = BiDegree::new(a, b);
                        let brute = census_enumerated(shape(m, n), deg, &lambda).unwrap();
                        assert_eq!(census_transfer(shape(m, n), deg, &lambda).unwrap(), brute);
                        let direct: i64 = enumerate_monomials(shape(m, n), deg)
                            .iter()
                            .map(|mono| dual_weight(mono, &lambda).unwrap())
                            .sum();
                        assert_eq!(brute.weight, BigInt::from(direct));
                    }
                }
            }
        }
    }

    #[test]
    fn restricted_dim_examples() {
        assert_eq!(restricted_dim(shape(1, 2), 1, 1, 1), BigInt::from(5));
        assert_eq!(restricted_dim(shape(1, 2), 1, 1, 2), BigInt::from(12));
        assert_eq!(restricted_dim(shape(1, 1), 1, 1, 1), BigInt::from(3));
    }

    #[test]
    fn restricted_dim_follows_exact_sequence() {
        for k in 1..=6 {
            for d in 1..=3 {
                for e in 1..=3 {
                    let s = shape(2, 1);
                    let top = dim_bigraded(s, BiDegree::new(d * k, e * k));
                    let sub = dim_bigraded(s, BiDegree::new(d * k - 1, e * k - 1));
                    assert_eq!(restricted_dim(s, d, e, k), &top - &sub);
                    let trivial = OneParameterSubgroup::trivial(s);
                    let counted =
                        restricted_census(s, d, e, k, &trivial, 0, EnumerationCap::default())
                            .unwrap();
                    assert_eq!(counted.count, top - sub);
                }
            }
        }
    }

    #[test]
    fn restricted_weight_examples() {
        let s = shape(1, 2);
        let lambda = destab_12();
        assert_eq!(
            restricted_weight(s, 1, 1, 1, &lambda, 1).unwrap(),
            BigInt::from(-1)
        );
        assert_eq!(
            restricted_weight(s, 1, 1, 2, &lambda, 1).unwrap(),
            BigInt::from(-6)
        );
        assert_eq!(
            restricted_weight(s, 2, 3, 2, &lambda, 0).unwrap(),
            BigInt::zero()
        );
    }

    #[test]
    fn restricted_weight_reduces_for_sl() {
        let lambda = destab_12();
        let s = shape(1, 2);
        for alpha in [-2i64, 1, 3] {
            for k in 1..=5 {
                for d in 1..=3 {
                    for e in 1..=3 {
                        let w = restricted_weight(s, d, e, k, &lambda, alpha).unwrap();
                        let sub = dim_bigraded(s, BiDegree::new(d * k - 1, e * k - 1));
                        assert_eq!(w, -BigInt::from(alpha) * sub);
                    }
                }
            }
        }
    }

    #[test]
    fn cap_switches_path_without_changing_totals() {
        let lambda = OneParameterSubgroup::new(vec![2, -1, -1], vec![3, 0, -1, -2]);
        let s = shape(2, 3);
        for k in 1..=4 {
            let small = restricted_census(s, 2, 1, k, &lambda, 1, EnumerationCap(0)).unwrap();
            let big = restricted_census(s, 2, 1, k, &lambda, 1, EnumerationCap::default()).unwrap();
            assert_eq!(small, big);
        }
    }

    fn mono_strategy() -> impl Strategy<Value = Monomial> {
        (
            prop::collection::vec(0u32..5, 3),
            prop::collection::vec(0u32..5, 4),
        )
            .prop_map(|(x, y)| Monomial::new(x, y))
    }

    proptest! {
        #[test]
        fn dual_weight_is_additive(
            p in mono_strategy(),
            q in mono_strategy(),
            u in prop::collection::vec(-5i64..=5, 3),
            v in prop::collection::vec(-5i64..=5, 4),
        ) {
            let lambda = OneParameterSubgroup::new(u, v);
            let lhs = dual_weight(&p.mul(&q), &lambda).unwrap();
            let rhs = dual_weight(&p, &lambda).unwrap() + dual_weight(&q, &lambda).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
