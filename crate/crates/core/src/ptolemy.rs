//! Super Ptolemy flip of a decorated quadrilateral and the rescaled
//! diagonals that satisfy the classical Ptolemy relation.
//!
//! Sides `a, b, c, d`, diagonal `e` before the flip and `f` after, odd face
//! variables `σ, θ`, with `Z = ac/bd`:
//!
//! ```text
//! ef = (ac + bd)(1 + σθ√Z/(1+Z))
//! σ' = (σ − θ√Z)/√(1+Z)
//! θ' = (θ + σ√Z)/√(1+Z)
//! ```

use crate::grassmann::{AlgebraError, GrassmannElement, Parity};
use crate::rational::{ratio, Rational};
use crate::sample::{Sampler, SamplingProfile};
use num_traits::One;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PtolemyError {
    #[error("{0} must be even with nonzero body")]
    NotInvertible(&'static str),
    #[error("{0} must be odd")]
    NotOdd(&'static str),
    #[error("square root of {what} undefined: {source}")]
    Sqrt {
        what: &'static str,
        source: AlgebraError,
    },
    #[error("m = {0} gives a degenerate quadrilateral")]
    DegenerateParameter(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PtolemyQuad {
    pub a: GrassmannElement,
    pub b: GrassmannElement,
    pub c: GrassmannElement,
    pub d: GrassmannElement,
    pub e: GrassmannElement,
    pub sigma: GrassmannElement,
    pub theta: GrassmannElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlipResult {
    pub f: GrassmannElement,
    pub sigma_prime: GrassmannElement,
    pub theta_prime: GrassmannElement,
}

fn require_invertible(
    v: &GrassmannElement,
    what: &'static str,
) -> Result<GrassmannElement, PtolemyError> {
    if !v.parity().admits(Parity::Even) {
        return Err(PtolemyError::NotInvertible(what));
    }
    v.invert().map_err(|_| PtolemyError::NotInvertible(what))
}

fn root(v: &GrassmannElement, what: &'static str) -> Result<GrassmannElement, PtolemyError> {
    v.sqrt()
        .map_err(|source| PtolemyError::Sqrt { what, source })
}

impl PtolemyQuad {
    pub fn new(
        a: GrassmannElement,
        b: GrassmannElement,
        c: GrassmannElement,
        d: GrassmannElement,
        e: GrassmannElement,
        sigma: GrassmannElement,
        theta: GrassmannElement,
    ) -> Result<Self, PtolemyError> {
        for (v, what) in [(&a, "a"), (&b, "b"), (&c, "c"), (&d, "d"), (&e, "e")] {
            require_invertible(v, what)?;
        }
        for (v, what) in [(&sigma, "sigma"), (&theta, "theta")] {
            if !v.parity().admits(Parity::Odd) {
                return Err(PtolemyError::NotOdd(what));
            }
        }
        Ok(PtolemyQuad {
            a,
            b,
            c,
            d,
            e,
            sigma,
            theta,
        })
    }

    fn ac_plus_bd(&self) -> GrassmannElement {
        &(&self.a * &self.c) + &(&self.b * &self.d)
    }
}

/// `Z = ac·(bd)⁻¹`.
pub fn z_of(q: &PtolemyQuad) -> Result<GrassmannElement, PtolemyError> {
    let inv = require_invertible(&(&q.b * &q.d), "bd")?;
    Ok(&(&q.a * &q.c) * &inv)
}

/// `1 + s·√Z/(1+Z)` for the odd product `s = σθ`.
pub fn nilpotent_factor(
    s: &GrassmannElement,
    z: &GrassmannElement,
) -> Result<GrassmannElement, PtolemyError> {
    let one = GrassmannElement::one(z.generator_count());
    let sqrt_z = root(z, "Z")?;
    let inv = require_invertible(&(&one + z), "1+Z")?;
    Ok(&one + &(&(s * &sqrt_z) * &inv))
}

pub fn ptolemy_flip(q: &PtolemyQuad) -> Result<FlipResult, PtolemyError> {
    let z = z_of(q)?;
    let one = GrassmannElement::one(z.generator_count());
    let sqrt_z = root(&z, "Z")?;
    let inv_root = root(&(&one + &z), "1+Z")?.invert()?;
    let e_inv = require_invertible(&q.e, "e")?;
    let factor = nilpotent_factor(&(&q.sigma * &q.theta), &z)?;
    let f = &(&e_inv * &q.ac_plus_bd()) * &factor;
    let sigma_prime = &(&q.sigma - &(&q.theta * &sqrt_z)) * &inv_root;
    let theta_prime = &(&q.theta + &(&q.sigma * &sqrt_z)) * &inv_root;
    Ok(FlipResult {
        f,
        sigma_prime,
        theta_prime,
    })
}

/// `f = (ac + bd)·e⁻¹`.
pub fn classical_ptolemy(
    a: &GrassmannElement,
    b: &GrassmannElement,
    c: &GrassmannElement,
    d: &GrassmannElement,
    e: &GrassmannElement,
) -> Result<GrassmannElement, PtolemyError> {
    Ok(&(&(a * c) + &(b * d)) * &require_invertible(e, "e")?)
}

/// Power of the nilpotent factor used to rescale the diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BarExponent {
    /// `ē = e·X^{-1/2}`: gives `ē f̄ = ac + bd`.
    MinusHalf,
    /// `ē = e·X^{1/2}`: gives `ē f̄ = (ac + bd)X²`.
    PlusHalf,
}

/// `(ē, f̄) = (e·X^{±1/2}, f·X'^{±1/2})` with `X = 1 + σθ√Z/(1+Z)` and `X'`
/// the same with `σ'θ'`.
pub fn bar_transform(
    q: &PtolemyQuad,
    flip: &FlipResult,
    exponent: BarExponent,
) -> Result<(GrassmannElement, GrassmannElement), PtolemyError> {
    let z = z_of(q)?;
    let x = nilpotent_factor(&(&q.sigma * &q.theta), &z)?;
    let x_prime = nilpotent_factor(&(&flip.sigma_prime * &flip.theta_prime), &z)?;
    let power = |v: &GrassmannElement| -> Result<GrassmannElement, PtolemyError> {
        let r = root(v, "nilpotent factor")?;
        Ok(match exponent {
            BarExponent::PlusHalf => r,
            BarExponent::MinusHalf => r.invert()?,
        })
    };
    Ok((&q.e * &power(&x)?, &flip.f * &power(&x_prime)?))
}

/// A sampled quadrilateral and the Pythagorean parameter behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampledQuad {
    #[serde(serialize_with = "crate::rational::serialize_pq")]
    pub m: Rational,
    pub quad: PtolemyQuad,
}

/// `t = (m² − 1)/(2m)`, so that `1 + t² = ((m² + 1)/(2m))²`.
pub fn pythagorean_t(m: &Rational) -> Result<Rational, PtolemyError> {
    let one = Rational::one();
    if m == &Rational::from_integer(0.into()) || m == &one || m == &-one.clone() {
        return Err(PtolemyError::DegenerateParameter(
            crate::rational::to_pq_string(m),
        ));
    }
    Ok((m * m - &one) / (m * Rational::from_integer(2.into())))
}

/// Quadrilateral with `body(Z) = t²`, so `√Z` and `√(1+Z)` both exist.
/// `σ, θ` are independent odd generators; even variables carry souls.
pub fn sample_quad(seed: u64) -> Result<SampledQuad, PtolemyError> {
    let mut s = Sampler::new(seed, 2, 4, SamplingProfile::positive());
    let m = loop {
        let p: i64 = s.rng().gen_range(1..=9);
        let q: i64 = s.rng().gen_range(1..=9);
        let m = ratio(p, q);
        if !m.is_one() {
            break m;
        }
    };
    let t = pythagorean_t(&m)?;
    let (b, c, d, e) = (
        s.sample_even(),
        s.sample_even(),
        s.sample_even(),
        s.sample_even(),
    );
    let c_inv = c.invert()?;
    let a = &(&(&b * &d) * &c_inv).scale(&(&t * &t)) + &s.sample_even_soul();
    let sigma = s.sample_odd()?;
    let theta = s.sample_odd()?;
    Ok(SampledQuad {
        m,
        quad: PtolemyQuad::new(a, b, c, d, e, sigma, theta)?,
    })
}

/// Outcome of the identity checks on one quadrilateral.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PtolemyCheck {
    pub pass_sigma_theta: bool,
    pub pass_bar_ptolemy: bool,
    /// `ef = (ac+bd)·(X^{1/2})²`.
    pub pass_factor_square: bool,
}

impl PtolemyCheck {
    pub fn passed(&self) -> bool {
        self.pass_sigma_theta && self.pass_bar_ptolemy && self.pass_factor_square
    }
}

pub fn check_quad(q: &PtolemyQuad) -> Result<PtolemyCheck, PtolemyError> {
    let flip = ptolemy_flip(q)?;
    let (e_bar, f_bar) = bar_transform(q, &flip, BarExponent::MinusHalf)?;
    let x = nilpotent_factor(&(&q.sigma * &q.theta), &z_of(q)?)?;
    let half = root(&x, "nilpotent factor")?;
    Ok(PtolemyCheck {
        pass_sigma_theta: &flip.sigma_prime * &flip.theta_prime == &q.sigma * &q.theta,
        pass_bar_ptolemy: &e_bar * &f_bar == q.ac_plus_bd(),
        pass_factor_square: &q.e * &flip.f == &q.ac_plus_bd() * &half.square(),
    })
}
