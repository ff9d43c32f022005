//! Deterministic sampling of exact rational test data. A tiny splitmix64
//! generator keeps runs byte-reproducible for a given seed without pulling
//! in an RNG dependency.

use crate::field::VField;
use crate::gauss::Gq;
use crate::poly::MultiPoly;
use crate::ratexpr::RatExpr;
use std::collections::BTreeSet;

/// Seeded deterministic generator of small exact values.
#[derive(Clone, Debug)]
pub struct Sampler {
    state: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { state: seed.wrapping_add(0x9E37_79B9_7F4A_7C15) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Integer in `[lo, hi]` inclusive.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Small nonzero rational with numerator in [-9, 9], denominator in [1, 4].
    pub fn rational(&mut self) -> Gq {
        let mut n = self.int_in(-9, 9);
        if n == 0 {
            n = 1;
        }
        Gq::from_ratio(n, self.int_in(1, 4))
    }

    /// Small Gaussian rational, sometimes purely real.
    pub fn gaussian_rational(&mut self) -> Gq {
        let re = self.rational();
        if self.next_u64() % 3 == 0 {
            re
        } else {
            let im = self.rational();
            &re + &(&im * &Gq::i())
        }
    }

    /// Small nonzero rational bounded away from degenerate chart loci.
    pub fn nonzero_rational(&mut self) -> Gq {
        loop {
            let g = self.rational();
            if !g.is_zero() {
                return g;
            }
        }
    }

    /// Random polynomial in the given variables.
    pub fn random_poly(&mut self, vars: &[String], max_deg: u32, terms: usize) -> MultiPoly {
        let mut p = MultiPoly::zero();
        for _ in 0..terms {
            let mut t = MultiPoly::constant(self.gaussian_rational());
            for v in vars {
                let e = self.int_in(0, max_deg as i64) as u32;
                if e > 0 {
                    t = t.mul_ref(&MultiPoly::monomial(Gq::one(), v, e));
                }
            }
            p = p.add_ref(&t);
        }
        p
    }

    /// Random polynomial vector field over the given state variables.
    pub fn random_poly_field(&mut self, statevars: &[String], max_deg: u32, terms: usize) -> VField {
        let components = statevars
            .iter()
            .map(|_| RatExpr::from_poly(self.random_poly(statevars, max_deg, terms)))
            .collect();
        VField::new(
            "random",
            statevars.to_vec(),
            components,
            BTreeSet::new(),
            Vec::new(),
        )
        .expect("random field is well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut a = Sampler::new(123);
        let mut b = Sampler::new(123);
        for _ in 0..50 {
            assert_eq!(a.gaussian_rational(), b.gaussian_rational());
        }
    }
}
