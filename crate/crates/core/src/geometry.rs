//! Bidegree (1,1) hypersurfaces `f = sum c_ij x_i y_j` in `P^m x P^n`.
//!
//! After a change of coordinates on each factor, `f = x_0 y_0 + ... + x_r y_r`
//! where `r + 1` is the rank of the coefficient matrix. The hypersurface is
//! smooth iff `r = min(m, n)` and normal iff `r >= 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::bigraded::{dual_weight, AmbientShape, Monomial, OneParameterSubgroup};
use crate::error::{Error, Result};
use crate::exactmath::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    shape: AmbientShape,
    coeffs: Vec<Vec<Rational>>,
}

impl BilinearForm {
    /// Rows index the `x` variables, columns the `y` variables.
    pub fn new(coeffs: Vec<Vec<Rational>>) -> Result<Self> {
        let rows = coeffs.len();
        let cols = coeffs.first().map_or(0, Vec::len);
        if coeffs.iter().any(|row| row.len() != cols) {
            return Err(Error::LengthMismatch("ragged coefficient matrix".into()));
        }
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidShape(format!(
                "a {rows}x{cols} matrix does not describe P^m x P^n with m, n >= 1"
            )));
        }
        let shape = AmbientShape::new(rows - 1, cols - 1)?;
        Ok(Self { shape, coeffs })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|&c| Rational::from_integer(BigInt::from(c)))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn shape(&self) -> AmbientShape {
        self.shape
    }

    pub fn coeffs(&self) -> &[Vec<Rational>] {
        &self.coeffs
    }
}

/// `f = x_0 y_0 + ... + x_r y_r` on `P^m x P^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub shape: AmbientShape,
    pub r: usize,
}

impl NormalForm {
    pub fn new(shape: AmbientShape, r: usize) -> Result<Self> {
        if r > shape.m.min(shape.n) {
            return Err(Error::InvalidShape(format!(
                "r={r} exceeds min(m, n)={}",
                shape.m.min(shape.n)
            )));
        }
        Ok(Self { shape, r })
    }

    /// The monomials `x_i y_i`, `i = 0..=r`.
    pub fn terms(&self) -> Vec<Monomial> {
        (0..=self.r)
            .map(|i| {
                let mut x = vec![0; self.shape.m + 1];
                let mut y = vec![0; self.shape.n + 1];
                x[i] = 1;
                y[i] = 1;
                Monomial::new(x, y)
            })
            .collect()
    }

    /// Whether the destabilizer construction applies: the factors
    /// differ in dimension or the hypersurface is singular.
    pub fn theorem_applies(&self) -> bool {
        self.shape.m != self.shape.n || !is_smooth(self)
    }
}

/// Rank by fraction-free (Bareiss) elimination on the integer matrix
/// obtained by clearing each row's denominators.
pub fn rank(coeffs: &[Vec<Rational>]) -> usize {
    let mut rows: Vec<Vec<BigInt>> = coeffs
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut prev_pivot = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot_row) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let pivot = rows[rank][col].clone();
        for i in rank + 1..rows.len() {
            for j in col + 1..cols {
                let value = (&pivot * &rows[i][j] - &rows[i][col] * &rows[rank][j]) / &prev_pivot;
                rows[i][j] = value;
            }
            rows[i][col] = BigInt::zero();
        }
        prev_pivot = pivot;
        rank += 1;
    }
    rank
}

pub fn normalize(form: &BilinearForm) -> Result<NormalForm> {
    match rank(&form.coeffs) {
        0 => Err(Error::NotAHypersurface),
        rk => NormalForm::new(form.shape, rk - 1),
    }
}

pub fn is_smooth(nf: &NormalForm) -> bool {
    nf.r == nf.shape.m.min(nf.shape.n)
}

pub fn is_normal(nf: &NormalForm) -> bool {
    nf.r >= 1
}

/// Jacobian check. The singular locus of `f` is the product of linear
/// spaces `{x_0 = .. = x_r = 0} x {y_0 = .. = y_r = 0}`, so it is non-empty
/// exactly when it contains a pair of coordinate points. Those are tested
/// by evaluating `f` and all of its partials.
pub fn singular_locus_empty(nf: &NormalForm) -> bool {
    let (m, n, r) = (nf.shape.m, nf.shape.n, nf.r);
    let f = |x: &[i64], y: &[i64]| (0..=r).map(|i| x[i] * y[i]).sum::<i64>();
    let dfdx = |y: &[i64], i: usize| if i <= r { y[i] } else { 0 };
    let dfdy = |x: &[i64], j: usize| if j <= r { x[j] } else { 0 };
    for i in 0..=m {
        for j in 0..=n {
            let mut x = vec![0; m + 1];
            let mut y = vec![0; n + 1];
            x[i] = 1;
            y[j] = 1;
            let singular = f(&x, &y) == 0
                && (0..=m).all(|p| dfdx(&y, p) == 0)
                && (0..=n).all(|q| dfdy(&x, q) == 0);
            if singular {
                return false;
            }
        }
    }
    true
}

/// The destabilizing subgroup together with the factor carrying it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Destabilizer {
    pub lambda: OneParameterSubgroup,
    /// `true` when the nontrivial weights sit on `P^m` rather than `P^n`.
    pub factor_swapped: bool,
}

/// Weights `(-1, .., -1, r+1, 0, .., 0)` (with `r+1` copies of `-1`) on a
/// factor of dimension greater than `r`, zero on the other factor. Prefers
/// the second factor.
pub fn destabilizer(nf: &NormalForm) -> Result<Destabilizer> {
    let AmbientShape { m, n } = nf.shape;
    let r = nf.r;
    if !is_normal(nf) {
        return Err(Error::MethodInapplicable("not normal: r=0".into()));
    }
    if !nf.theorem_applies() {
        return Err(Error::MethodInapplicable("m=n and X smooth".into()));
    }
    let weights = |len: usize| {
        let mut w = vec![0i64; len];
        w[..=r].fill(-1);
        w[r + 1] = r as i64 + 1;
        w
    };
    let (lambda, factor_swapped) = if r < n {
        (
            OneParameterSubgroup::new(vec![0; m + 1], weights(n + 1)),
            false,
        )
    } else {
        (
            OneParameterSubgroup::new(weights(m + 1), vec![0; n + 1]),
            true,
        )
    };
    Ok(Destabilizer {
        lambda,
        factor_swapped,
    })
}

/// Common dual weight `alpha` of the terms of `f`; errors if `f` is not
/// a semi-invariant of `lambda`.
pub fn semiinvariant_alpha(nf: &NormalForm, lambda: &OneParameterSubgroup) -> Result<i64> {
    lambda.fits(nf.shape)?;
    lambda.check_special_linear()?;
    let weights = nf
        .terms()
        .iter()
        .map(|t| dual_weight(t, lambda))
        .collect::<Result<Vec<_>>>()?;
    if weights.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::DoesNotPreserve(weights));
    }
    Ok(weights[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use proptest::prelude::*;

    fn nf(m: usize, n: usize, r: usize) -> NormalForm {
        NormalForm::new(AmbientShape::new(m, n).unwrap(), r).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let f = BilinearForm::from_integers(&[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        assert_eq!(normalize(&f).unwrap(), nf(1, 2, 1));
        let ones = BilinearForm::from_integers(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]).unwrap();
        assert_eq!(normalize(&ones).unwrap().r, 0);
        let g =
            BilinearForm::from_integers(&[&[1, 2, 0, 0], &[2, 4, 0, 0], &[0, 0, 3, 0]]).unwrap();
        assert_eq!(normalize(&g).unwrap(), nf(2, 3, 1));
    }

    #[test]
    fn normalize_rejects_zero_and_bad_shapes() {
        let zero = BilinearForm::from_integers(&[&[0, 0], &[0, 0]]).unwrap();
        assert!(matches!(normalize(&zero), Err(Error::NotAHypersurface)));
        assert!(BilinearForm::from_integers(&[&[1, 0]]).is_err());
        assert!(BilinearForm::from_integers(&[&[1, 0], &[1]]).is_err());
    }

    #[test]
    fn rank_with_fractions() {
        let rows = vec![vec![rat(1, 2), rat(1, 3)], vec![rat(3, 2), rat(1, 1)]];
        assert_eq!(rank(&rows), 1);
        let rows = vec![
            vec![rat(1, 2), rat(1, 3), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(-7, 5)],
        ];
        assert_eq!(rank(&rows), 2);
    }

    #[test]
    fn smoothness_and_normality() {
        assert!(is_smooth(&nf(2, 2, 2)));
        assert!(is_smooth(&nf(1, 2, 1)));
        assert!(!is_smooth(&nf(2, 3, 1)));
        assert!(!is_normal(&nf(2, 3, 0)));
        assert!(is_normal(&nf(2, 3, 1)));
        assert!(is_normal(&nf(3, 2, 2)));
    }

    #[test]
    fn jacobian_oracle_examples() {
        assert!(singular_locus_empty(&nf(1, 2, 1)));
        assert!(!singular_locus_empty(&nf(2, 3, 1)));
        assert!(!singular_locus_empty(&nf(2, 2, 0)));
    }

    #[test]
    fn jacobian_oracle_agrees_with_rank_criterion() {
        for m in 1..=4 {
            for n in 1..=4 {
                for r in 0..=m.min(n) {
                    let x = nf(m, n, r);
                    assert_eq!(is_smooth(&x), singular_locus_empty(&x), "{x:?}");
                }
            }
        }
    }

    #[test]
    fn destabilizer_examples() {
        let d = destabilizer(&nf(1, 2, 1)).unwrap();
        assert_eq!(
            d.lambda,
            OneParameterSubgroup::new(vec![0, 0], vec![-1, -1, 2])
        );
        assert!(!d.factor_swapped);
        let d = destabilizer(&nf(2, 2, 1)).unwrap();
        assert_eq!(
            d.lambda,
            OneParameterSubgroup::new(vec![0, 0, 0], vec![-1, -1, 2])
        );
        let d = destabilizer(&nf(3, 1, 1)).unwrap();
        assert_eq!(
            d.lambda,
            OneParameterSubgroup::new(vec![-1, -1, 2, 0], vec![0, 0])
        );
        assert!(d.factor_swapped);
    }

    #[test]
    fn destabilizer_refuses_outside_hypothesis() {
        assert!(matches!(
            destabilizer(&nf(2, 3, 0)),
            Err(Error::MethodInapplicable(_))
        ));
        assert!(matches!(
            destabilizer(&nf(3, 3, 3)),
            Err(Error::MethodInapplicable(_))
        ));
    }

    #[test]
    fn destabilizer_is_sl_with_unit_weight() {
        for m in 1..=6 {
            for n in 1..=6 {
                for r in 1..=m.min(n) {
                    let x = nf(m, n, r);
                    let result = destabilizer(&x);
                    if m == n && r == n {
                        assert!(result.is_err());
                        continue;
                    }
                    let lambda = result.unwrap().lambda;
                    assert!(lambda.is_special_linear());
                    assert_eq!(semiinvariant_alpha(&x, &lambda).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn alpha_examples() {
        let x = nf(1, 2, 1);
        let d = destabilizer(&x).unwrap();
        assert_eq!(semiinvariant_alpha(&x, &d.lambda).unwrap(), 1);
        let trivial = OneParameterSubgroup::trivial(x.shape);
        assert_eq!(semiinvariant_alpha(&x, &trivial).unwrap(), 0);
        let bad = OneParameterSubgroup::new(vec![1, -1], vec![0, 0, 0]);
        assert!(
            matches!(semiinvariant_alpha(&x, &bad), Err(Error::DoesNotPreserve(w)) if w == vec![-1, 1])
        );
        let not_sl = OneParameterSubgroup::new(vec![0, 0], vec![-1, -1, 1]);
        assert!(matches!(
            semiinvariant_alpha(&x, &not_sl),
            Err(Error::NotSpecialLinear {
                factor: "v",
                sum: -1
            })
        ));
    }

    fn invertible(size: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
        // unit lower triangular times unit upper triangular, both with
        // nonzero diagonal, is invertible
        let entries = size * size;
        (
            prop::collection::vec((-3i64..=3, 1i64..=3), entries),
            prop::collection::vec((-3i64..=3, 1i64..=3), entries),
            prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], size),
        )
            .prop_map(move |(lo, up, diag)| {
                let mut l = vec![vec![Rational::zero(); size]; size];
                let mut u = vec![vec![Rational::zero(); size]; size];
                for i in 0..size {
                    for j in 0..size {
                        let (p, q) = lo[i * size + j];
                        let (s, t) = up[i * size + j];
                        if j < i {
                            l[i][j] = rat(p, q);
                        }
                        if j > i {
                            u[i][j] = rat(s, t);
                        }
                    }
                    l[i][i] = Rational::one();
                    u[i][i] = rat(diag[i], 1);
                }
                matmul(&l, &u)
            })
    }

    fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        (0..a.len())
            .map(|i| {
                (0..b[0].len())
                    .map(|j| {
                        (0..b.len()).fold(Rational::zero(), |acc, t| acc + &a[i][t] * &b[t][j])
                    })
                    .collect()
            })
            .collect()
    }

    fn normal_matrix(m: usize, n: usize, r: usize) -> Vec<Vec<Rational>> {
        (0..=m)
            .map(|i| (0..=n).map(|j| rat((i == j && i <= r) as i64, 1)).collect())
            .collect()
    }

    /// SL subgroup with `u_i = c_i`, `v_i = -c_i - s` on the terms of `f`,
    /// so every term has weight `s`; spare coordinates absorb the sums.
    fn preserving(m: usize, n: usize, r: usize, c: &[i64], s: i64) -> OneParameterSubgroup {
        let mut c = c[..=r].to_vec();
        let tight = m == r || n == r;
        if tight {
            c[r] = -c[..r].iter().sum::<i64>();
        }
        let s = if n == r { 0 } else { s };
        let mut u = vec![0i64; m + 1];
        let mut v = vec![0i64; n + 1];
        for i in 0..=r {
            u[i] = c[i];
            v[i] = -c[i] - s;
        }
        if m > r {
            u[m] -= u.iter().sum::<i64>();
        }
        if n > r {
            v[n] -= v.iter().sum::<i64>();
        }
        OneParameterSubgroup::new(u, v)
    }

    proptest! {
        #[test]
        fn rank_invariant_under_coordinate_change(
            (m, n, r, p, q) in (1usize..=3, 1usize..=3)
                .prop_flat_map(|(m, n)| (Just(m), Just(n), 0..=m.min(n), invertible(m + 1), invertible(n + 1)))
        ) {
            let base = normal_matrix(m, n, r);
            let moved = matmul(&matmul(&p, &base), &q);
            let form = BilinearForm::new(moved).unwrap();
            prop_assert_eq!(normalize(&form).unwrap(), NormalForm::new(AmbientShape::new(m, n).unwrap(), r).unwrap());
        }

        #[test]
        fn alpha_is_additive(
            (m, n, r) in (1usize..=4, 1usize..=4).prop_flat_map(|(m, n)| (Just(m), Just(n), 1..=m.min(n))),
            c1 in prop::collection::vec(-3i64..=3, 5), c2 in prop::collection::vec(-3i64..=3, 5),
            s1 in -3i64..=3, s2 in -3i64..=3,
        ) {
            let x = NormalForm::new(AmbientShape::new(m, n).unwrap(), r).unwrap();
            let l1 = preserving(m, n, r, &c1, s1);
            let l2 = preserving(m, n, r, &c2, s2);
            let a1 = semiinvariant_alpha(&x, &l1).unwrap();
            let a2 = semiinvariant_alpha(&x, &l2).unwrap();
            prop_assert_eq!(semiinvariant_alpha(&x, &(&l1 + &l2)).unwrap(), a1 + a2);
        }
    }
}
