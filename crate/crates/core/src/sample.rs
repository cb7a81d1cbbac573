//! Seeded generic-point sampling in Λ_N.
//!
//! Identity checks evaluate both sides at random points of a free
//! supercommutative algebra. Generators `1..=fresh` form the fresh pool:
//! each odd sample consumes one, so distinct odd quantities are
//! algebraically independent. Generators `fresh+1..=fresh+slack` are shared
//! slack used only to decorate samples with soul noise.

use crate::grassmann::{AlgebraError, GrassmannElement};
use crate::rational::{ratio, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Slack generators added on top of the fresh pool when `N` is auto-sized.
pub const DEFAULT_SLACK: usize = 4;

/// Independent per-trial seed derived from a master seed (splitmix64).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingProfile {
    /// Bodies are `p/q` with `p` from this range (zero skipped).
    pub body_numerator: (i64, i64),
    pub body_denominator: (i64, i64),
    pub positive_bodies: bool,
    /// Upper bound on even soul terms per even sample.
    pub soul_terms: usize,
    /// Upper bound on extra degree-3 terms per odd sample.
    pub odd_extra_terms: usize,
    /// Draw odd samples as combinations of shared generators instead of
    /// consuming the fresh pool. Keeps the algebra small for large matrices;
    /// samples are then no longer algebraically independent.
    pub shared_odd: bool,
}

impl Default for SamplingProfile {
    fn default() -> Self {
        SamplingProfile {
            body_numerator: (-5, 5),
            body_denominator: (1, 3),
            positive_bodies: false,
            soul_terms: 1,
            odd_extra_terms: 1,
            shared_odd: false,
        }
    }
}

impl SamplingProfile {
    /// Plain nonzero rationals, single-generator odd samples.
    pub fn bare() -> Self {
        SamplingProfile {
            soul_terms: 0,
            odd_extra_terms: 0,
            ..Self::default()
        }
    }

    /// Odd samples over a shared pool (see [`shared_odd`](Self::shared_odd)).
    pub fn shared() -> Self {
        SamplingProfile {
            shared_odd: true,
            ..Self::default()
        }
    }

    pub fn positive() -> Self {
        SamplingProfile {
            body_numerator: (1, 6),
            positive_bodies: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    profile: SamplingProfile,
    fresh: usize,
    slack: usize,
    next_fresh: usize,
}

impl Sampler {
    pub fn new(seed: u64, fresh: usize, slack: usize, profile: SamplingProfile) -> Self {
        assert!(
            fresh + slack <= crate::grassmann::MAX_GENERATORS,
            "generator count exceeds {}",
            crate::grassmann::MAX_GENERATORS
        );
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            profile,
            fresh,
            slack,
            next_fresh: 0,
        }
    }

    /// `fresh` odd samples plus [`DEFAULT_SLACK`] noise generators.
    pub fn auto(seed: u64, fresh: usize, profile: SamplingProfile) -> Self {
        Self::new(seed, fresh, DEFAULT_SLACK, profile)
    }

    pub fn generators(&self) -> usize {
        self.fresh + self.slack
    }

    pub fn profile(&self) -> &SamplingProfile {
        &self.profile
    }

    pub fn fresh_remaining(&self) -> usize {
        self.fresh - self.next_fresh
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn zero(&self) -> GrassmannElement {
        GrassmannElement::zero(self.generators())
    }

    pub fn one(&self) -> GrassmannElement {
        GrassmannElement::one(self.generators())
    }

    pub fn constant(&self, value: Rational) -> GrassmannElement {
        GrassmannElement::scalar(self.generators(), value)
    }

    pub fn rational(&mut self) -> Rational {
        let (lo, hi) = self.profile.body_numerator;
        let (dlo, dhi) = self.profile.body_denominator;
        loop {
            let mut p = self.rng.gen_range(lo..=hi);
            if self.profile.positive_bodies {
                p = p.abs();
            }
            if p != 0 {
                let q = self.rng.gen_range(dlo.max(1)..=dhi.max(1));
                return ratio(p, q);
            }
        }
    }

    fn small_coefficient(&mut self) -> Rational {
        let p = *[-3i64, -2, -1, 1, 2, 3].choose(&mut self.rng).unwrap();
        let q = self.rng.gen_range(1..=2);
        ratio(p, q)
    }

    fn slack_generators(&mut self, count: usize) -> Vec<usize> {
        let first = self.fresh + 1;
        let mut pool: Vec<usize> = (first..first + self.slack).collect();
        pool.shuffle(&mut self.rng);
        pool.truncate(count);
        pool
    }

    /// Random even-degree monomial over the slack generators, if any.
    fn even_noise(&mut self) -> Option<GrassmannElement> {
        if self.slack < 2 {
            return None;
        }
        let degree = if self.slack >= 4 && self.rng.gen_bool(0.2) {
            4
        } else {
            2
        };
        let gens = self.slack_generators(degree);
        let coeff = self.small_coefficient();
        Some(GrassmannElement::monomial(self.generators(), &gens, coeff).unwrap())
    }

    /// Even element with nonzero body (positive if the profile asks) plus up
    /// to `soul_terms` even soul monomials.
    pub fn sample_even(&mut self) -> GrassmannElement {
        let body = self.rational();
        let mut out = self.constant(body);
        let terms = self.rng.gen_range(0..=self.profile.soul_terms);
        for _ in 0..terms {
            if let Some(noise) = self.even_noise() {
                out += &noise;
            }
        }
        out
    }

    /// Even element whose body is exactly `body`.
    pub fn sample_even_with_body(&mut self, body: Rational) -> GrassmannElement {
        let noise = self.sample_even().soul();
        &self.constant(body) + &noise
    }

    /// Even nilpotent element (zero body).
    pub fn sample_even_soul(&mut self) -> GrassmannElement {
        let mut out = self.zero();
        for _ in 0..self.profile.soul_terms.max(1) {
            if let Some(noise) = self.even_noise() {
                out += &noise;
            }
        }
        out
    }

    /// Odd element: a nonzero multiple of one fresh generator plus up to
    /// `odd_extra_terms` degree-3 terms (fresh generator times two slack
    /// generators).
    pub fn sample_odd(&mut self) -> Result<GrassmannElement, AlgebraError> {
        if self.profile.shared_odd {
            return Ok(self.sample_odd_shared());
        }
        if self.next_fresh >= self.fresh {
            return Err(AlgebraError::PoolExhausted(self.fresh));
        }
        self.next_fresh += 1;
        let fresh = self.next_fresh;
        let n = self.generators();
        let coeff = self.small_coefficient();
        let mut out = GrassmannElement::monomial(n, &[fresh], coeff).unwrap();
        let extra = self.rng.gen_range(0..=self.profile.odd_extra_terms);
        for _ in 0..extra {
            if self.slack < 2 {
                break;
            }
            let mut gens = self.slack_generators(2);
            gens.push(fresh);
            let coeff = self.small_coefficient();
            out += &GrassmannElement::monomial(n, &gens, coeff).unwrap();
        }
        Ok(out)
    }

    /// Odd combination `c1·θi + c2·θj` of two distinct generators from the
    /// whole algebra, plus possibly a degree-3 term.
    fn sample_odd_shared(&mut self) -> GrassmannElement {
        let n = self.generators();
        assert!(n >= 3, "shared odd sampling needs at least 3 generators");
        let mut pool: Vec<usize> = (1..=n).collect();
        pool.shuffle(&mut self.rng);
        let mut out = self.zero();
        for &i in &pool[..2] {
            let coeff = self.small_coefficient();
            out += &GrassmannElement::monomial(n, &[i], coeff).unwrap();
        }
        if self.profile.odd_extra_terms > 0 && self.rng.gen_bool(0.5) {
            pool.shuffle(&mut self.rng);
            let coeff = self.small_coefficient();
            out += &GrassmannElement::monomial(n, &pool[..3], coeff).unwrap();
        }
        out
    }

    pub fn gen_index(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }
}
