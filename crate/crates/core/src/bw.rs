//! Integer data of circle bundles over products: curvature coefficients,
//! the defining exact sequence, coverings and classifying elements.

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BwError {
    #[error("action not free: gcd({a}, {b}) = {gcd}")]
    ActionNotFree { a: i64, b: i64, gcd: i64 },
    #[error("level must be ≥ 1, got {0}")]
    BadLevel(i64),
    #[error("dimension must be ≥ 1, got {0}")]
    BadDimension(i64),
}

/// Circle bundle of level `k` over a named base; the fiber circle has length 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BWDescriptor {
    pub base: String,
    pub level: i64,
    /// Length of the fiber circle.
    pub fiber_length: u32,
}

impl BWDescriptor {
    pub fn new(base: &str, level: i64) -> Result<Self, BwError> {
        if level < 1 {
            return Err(BwError::BadLevel(level));
        }
        Ok(BWDescriptor {
            base: base.to_string(),
            level,
            fiber_length: 1,
        })
    }
}

/// `0 → ℤ → ℤ² → ℤ → 0` with first map `1 ↦ first` and second map
/// `(x, y) ↦ second.0·x + second.1·y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeSeq {
    pub first: (i64, i64),
    pub second: (i64, i64),
}

impl LatticeSeq {
    /// `ℤ →(a,−b)→ ℤ² →(b,a)ᵀ→ ℤ`.
    pub fn for_weights(a: i64, b: i64) -> Self {
        LatticeSeq {
            first: (a, -b),
            second: (b, a),
        }
    }

    pub fn apply_second(&self, v: (i64, i64)) -> i64 {
        self.second.0 * v.0 + self.second.1 * v.1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactnessFailure {
    NotInjective,
    NonzeroComposition,
    KernelNotImage,
    NotSurjective,
}

impl std::fmt::Display for ExactnessFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExactnessFailure::NotInjective => "not injective",
            ExactnessFailure::NonzeroComposition => "nonzero composition",
            ExactnessFailure::KernelNotImage => "kernel differs from image",
            ExactnessFailure::NotSurjective => "not surjective",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessCertificate {
    pub exact: bool,
    pub reason: Option<ExactnessFailure>,
    /// Primitive generator of the kernel of the second map, sign-normalized.
    pub kernel_generator: Option<(i64, i64)>,
}

/// Sign normalization: first nonzero entry positive.
fn normalize(v: (i64, i64)) -> (i64, i64) {
    if v.0 < 0 || (v.0 == 0 && v.1 < 0) {
        (-v.0, -v.1)
    } else {
        v
    }
}

pub fn verify_exact_sequence(seq: &LatticeSeq) -> ExactnessCertificate {
    let fail = |reason, kernel_generator| ExactnessCertificate {
        exact: false,
        reason: Some(reason),
        kernel_generator,
    };
    let (u, v) = seq.first;
    let (p, q) = seq.second;
    if (u, v) == (0, 0) {
        return fail(ExactnessFailure::NotInjective, None);
    }
    if seq.apply_second(seq.first) != 0 {
        return fail(ExactnessFailure::NonzeroComposition, None);
    }
    if (p, q) == (0, 0) {
        return fail(ExactnessFailure::KernelNotImage, None);
    }
    let g = p.gcd(&q);
    let kernel = normalize((q / g, -p / g));
    if normalize((u, v)) != kernel {
        return fail(ExactnessFailure::KernelNotImage, Some(kernel));
    }
    if g != 1 {
        return fail(ExactnessFailure::NotSurjective, Some(kernel));
    }
    ExactnessCertificate {
        exact: true,
        reason: None,
        kernel_generator: Some(kernel),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductQuotient {
    pub a: i64,
    pub b: i64,
    /// Coefficients of `(ω₁, ω₂)` in the curvature.
    pub curvature: (i64, i64),
    pub sequence: LatticeSeq,
    pub certificate: ExactnessCertificate,
    /// Set when one weight vanishes and only one factor is twisted.
    pub degenerate: bool,
    /// Statements carried along without a certificate.
    pub untested: Vec<&'static str>,
}

/// Quotient of `S_1(W₁) × S_1(W₂)` by the weight-`(a, b)` circle.
pub fn product_quotient(a: i64, b: i64) -> Result<ProductQuotient, BwError> {
    let gcd = a.gcd(&b);
    if gcd != 1 {
        return Err(BwError::ActionNotFree { a, b, gcd });
    }
    let sequence = LatticeSeq::for_weights(a, b);
    Ok(ProductQuotient {
        a,
        b,
        curvature: (b, a),
        sequence,
        certificate: verify_exact_sequence(&sequence),
        degenerate: a == 0 || b == 0,
        untested: vec!["symplectic form on the quotient base determined by a - b"],
    })
}

/// Kernel of the second map by enumeration over `[−bound, bound]²`,
/// compared with the multiples of the first map's generator.
pub fn brute_force_kernel_agrees(seq: &LatticeSeq, bound: i64) -> bool {
    let in_image = |x: i64, y: i64| {
        let (u, v) = seq.first;
        // (x, y) = m (u, v) for an integer m
        if u != 0 {
            x % u == 0 && (x / u) * v == y
        } else {
            x == 0 && v != 0 && y % v == 0
        }
    };
    for x in -bound..=bound {
        for y in -bound..=bound {
            let in_kernel = seq.apply_second((x, y)) == 0;
            if in_kernel != in_image(x, y) {
                return false;
            }
        }
    }
    true
}

/// Whether `1` is hit by the second map on `[−bound, bound]²`.
pub fn brute_force_surjective(seq: &LatticeSeq, bound: i64) -> bool {
    (-bound..=bound).any(|x| (-bound..=bound).any(|y| seq.apply_second((x, y)) == 1))
}

/// Lens space `L(p; 1, …, 1)` with `weights` entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LensSpace {
    pub order: i64,
    pub weights: Vec<i64>,
}

impl std::fmt::Display for LensSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let w: Vec<String> = self.weights.iter().map(i64::to_string).collect();
        write!(f, "L({};{})", self.order, w.join(","))
    }
}

/// Deck group of `S_1(W) → S_k(W)`: rotation of the fiber by `1/k` turn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Covering {
    pub degree: i64,
    /// Fiber rotation of the generator, in turns.
    #[serde(serialize_with = "ser_ratio")]
    pub deck_shift: Rational64,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl Covering {
    /// Fiber rotation of the `j`-th deck element, reduced modulo one turn.
    pub fn deck_power(&self, j: i64) -> Rational64 {
        let t = self.deck_shift * Rational64::from_integer(j);
        t - Rational64::from_integer(t.floor().to_integer())
    }

    /// Least `j ≥ 1` with trivial deck rotation.
    pub fn order(&self) -> i64 {
        (1..=self.degree)
            .find(|&j| self.deck_power(j) == Rational64::from_integer(0))
            .unwrap_or(self.degree)
    }

    /// `S_k(ℂℙ^{n−1})` as a lens space.
    pub fn lens_over_projective(&self, n: i64) -> Result<LensSpace, BwError> {
        if n < 1 {
            return Err(BwError::BadDimension(n));
        }
        Ok(LensSpace {
            order: self.degree,
            weights: vec![1; n as usize],
        })
    }
}

pub fn covering_degree(k: i64) -> Result<Covering, BwError> {
    if k < 1 {
        return Err(BwError::BadLevel(k));
    }
    Ok(Covering {
        degree: k,
        deck_shift: Rational64::new(1, k),
    })
}

/// `(n+1)k` in `ℤ₂`.
pub fn classifying_element(n: i64, k: i64) -> Result<u8, BwError> {
    if n < 1 {
        return Err(BwError::BadDimension(n));
    }
    if k < 0 {
        return Err(BwError::BadLevel(k));
    }
    Ok(((n + 1) * k).rem_euclid(2) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn product_examples() {
        let q = product_quotient(2, 3).unwrap();
        assert_eq!(q.curvature, (3, 2));
        assert_eq!(q.sequence.apply_second(q.sequence.first), 0);
        assert!(q.certificate.exact);
        let d = product_quotient(1, 0).unwrap();
        assert!(d.degenerate && d.certificate.exact);
        assert_eq!(d.curvature, (0, 1));
        assert_eq!(
            product_quotient(2, 4).unwrap_err(),
            BwError::ActionNotFree { a: 2, b: 4, gcd: 2 }
        );
    }

    #[test]
    fn exactness_examples() {
        assert!(verify_exact_sequence(&LatticeSeq::for_weights(1, 1)).exact);
        let s = LatticeSeq {
            first: (2, -3),
            second: (3, 2),
        };
        assert!(verify_exact_sequence(&s).exact);
        assert!(brute_force_kernel_agrees(&s, 10) && brute_force_surjective(&s, 20));
        let bad = LatticeSeq {
            first: (2, -3),
            second: (6, 4),
        };
        let c = verify_exact_sequence(&bad);
        assert_eq!(c.reason, Some(ExactnessFailure::NotSurjective));
        assert!(!brute_force_surjective(&bad, 20));
        let c = verify_exact_sequence(&LatticeSeq {
            first: (4, -6),
            second: (3, 2),
        });
        assert_eq!(c.reason, Some(ExactnessFailure::KernelNotImage));
        let c = verify_exact_sequence(&LatticeSeq {
            first: (1, 1),
            second: (3, 2),
        });
        assert_eq!(c.reason, Some(ExactnessFailure::NonzeroComposition));
        let c = verify_exact_sequence(&LatticeSeq {
            first: (0, 0),
            second: (3, 2),
        });
        assert_eq!(c.reason, Some(ExactnessFailure::NotInjective));
    }

    #[test]
    fn coverings() {
        let c1 = covering_degree(1).unwrap();
        assert_eq!(c1.order(), 1);
        let c3 = covering_degree(3).unwrap();
        assert_eq!(c3.lens_over_projective(2).unwrap().to_string(), "L(3;1,1)");
        assert_eq!(covering_degree(2).unwrap().order(), 2);
        assert!(covering_degree(0).is_err());
    }

    #[test]
    fn classifying() {
        assert_eq!(classifying_element(1, 5).unwrap(), 0);
        assert_eq!(classifying_element(2, 1).unwrap(), 1);
        assert_eq!(classifying_element(2, 2).unwrap(), 0);
    }

    proptest! {
        #[test]
        fn coprime_pairs_are_exact(a in -20i64..=20, b in -20i64..=20) {
            match product_quotient(a, b) {
                Ok(q) => {
                    prop_assert!(q.certificate.exact);
                    prop_assert!(brute_force_kernel_agrees(&q.sequence, 10));
                }
                Err(_) => prop_assert_ne!(a.gcd(&b), 1),
            }
        }

        #[test]
        fn deck_action_has_order_k(k in 1i64..200) {
            let c = covering_degree(k).unwrap();
            prop_assert_eq!(c.deck_power(k), Rational64::from_integer(0));
            prop_assert_eq!(c.order(), k);
        }

        #[test]
        fn classifying_is_two_periodic(n in 1i64..50, k in 0i64..50) {
            prop_assert_eq!(classifying_element(n, k).unwrap(), classifying_element(n, k + 2).unwrap());
        }
    }
}
