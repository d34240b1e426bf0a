//! Random instances with a known answer.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use super::linalg::constant_rank;
use super::ratfunc::{Poly, RationalFunction};

/// x_1..x_s independent over the constants and x_(s+1) = Σ c_w x_w.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub vectors: Vec<Vec<RationalFunction>>,
    /// c_1..c_s; the relation is proportional to (c_1, …, c_s, −1).
    pub constants: Vec<BigRational>,
}

fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-6i64..=6);
    }
    BigRational::new(BigInt::from(n), BigInt::from(rng.gen_range(1i64..=4)))
}

/// A polynomial of degree ≤ 3 with small coefficients, divided by a linear
/// factor one time in three.
pub fn random_rational_function<R: Rng + ?Sized>(rng: &mut R) -> RationalFunction {
    let deg = rng.gen_range(0..=3);
    let coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-5i64..=5)).collect();
    let num = Poly::from_i64s(&coeffs);
    if rng.gen_range(0..3) == 0 {
        let den = Poly::from_i64s(&[rng.gen_range(1i64..=5), 1]);
        RationalFunction::new(num, den).expect("nonzero denominator")
    } else {
        RationalFunction::from_poly(num)
    }
}

fn random_vector<R: Rng + ?Sized>(rng: &mut R, v: usize) -> Vec<RationalFunction> {
    (0..v).map(|_| random_rational_function(rng)).collect()
}

/// s vectors in Q(X)^v that are independent over Q, by resampling.
fn independent_family<R: Rng + ?Sized>(rng: &mut R, v: usize, s: usize) -> Vec<Vec<RationalFunction>> {
    loop {
        let xs: Vec<_> = (0..s).map(|_| random_vector(rng, v)).collect();
        if constant_rank(&xs) == s {
            return xs;
        }
    }
}

/// v ≤ 4, s ≤ 3; independence over Q makes some k ≤ s satisfy (1).
pub fn planted_instance<R: Rng + ?Sized>(rng: &mut R) -> PlantedInstance {
    let v = rng.gen_range(1..=4);
    let s = rng.gen_range(1..=3);
    let mut vectors = independent_family(rng, v, s);
    let constants: Vec<BigRational> = (0..s).map(|_| small_rational(rng)).collect();
    let last = (0..v)
        .map(|i| {
            vectors
                .iter()
                .zip(&constants)
                .fold(RationalFunction::zero(), |acc, (x, c)| acc.add(&x[i].scale(c)))
        })
        .collect();
    vectors.push(last);
    PlantedInstance { vectors, constants }
}

/// x_(s+1) = μ·x_1 with μ non-constant, and all s+1 vectors independent
/// over Q, so no constant relation exists.
pub fn adversarial_instance<R: Rng + ?Sized>(rng: &mut R) -> Vec<Vec<RationalFunction>> {
    loop {
        let v = rng.gen_range(1..=4);
        let s = rng.gen_range(1..=3);
        let mut xs = independent_family(rng, v, s);
        let a = rng.gen_range(1i64..=5);
        let mu = match rng.gen_range(0..3) {
            0 => RationalFunction::from_poly(Poly::from_i64s(&[a, 1])),
            1 => RationalFunction::new(Poly::one(), Poly::from_i64s(&[a, 1])).expect("nonzero"),
            _ => RationalFunction::new(Poly::from_i64s(&[a, 1]), Poly::from_i64s(&[a + 1, 1])).expect("nonzero"),
        };
        let last: Vec<_> = xs[0].iter().map(|x| x.mul(&mu)).collect();
        xs.push(last);
        if constant_rank(&xs) == s + 1 {
            return xs;
        }
    }
}
