//! Scalar quadrature for the Magnus terms: single integrals and the two
//! triangular double integrals
//!
//! ```text
//! D(u)    = ∫_a^b ∫_a^s (u(r) - u(s)) dr ds
//! X(f, g) = ∫_a^b ∫_a^s (f(r) g(s) - g(r) f(s)) dr ds
//! ```
//!
//! Both doubles are reduced to one-dimensional integrals over running
//! antiderivatives, so every rule applies to them uniformly:
//!
//! ```text
//! D(u)    = ∫_a^b [U(s) - U(a)] - (s - a) u(s) ds
//! X(f, g) = ∫_a^b [F(s) - F(a)] g(s) - [G(s) - G(a)] f(s) ds
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const DEFAULT_ADAPTIVE_TOL: f64 = 1e-10;
pub const MAX_ADAPTIVE_DEPTH: usize = 50;

const GL3_NODE: f64 = 0.774_596_669_241_483_4; // sqrt(3/5)
const GL3_CENTER_WEIGHT: f64 = 8.0 / 9.0;
const GL3_OUTER_WEIGHT: f64 = 5.0 / 9.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuadratureRule {
    /// `(b - a) u(a)`
    InitialPoint,
    /// `(b - a) u((a + b) / 2)`
    Midpoint,
    /// Three-point Gauss-Legendre, exact through degree five.
    GaussLegendre3,
    /// Bisection on Gauss-Legendre 3 until the whole-vs-halves difference
    /// meets `max(abs_tol, rel_tol |value|)`. Stands in for the exact integral.
    Adaptive { abs_tol: f64, rel_tol: f64 },
}

impl QuadratureRule {
    pub fn adaptive() -> Self {
        QuadratureRule::Adaptive {
            abs_tol: DEFAULT_ADAPTIVE_TOL,
            rel_tol: DEFAULT_ADAPTIVE_TOL,
        }
    }

    pub fn adaptive_with(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "adaptive tolerances must be positive, got abs {abs_tol}, rel {rel_tol}"
            )));
        }
        Ok(QuadratureRule::Adaptive { abs_tol, rel_tol })
    }

    /// Configuration name: `initial`, `midpoint`, `gl3` or `exact`.
    pub fn name(&self) -> &'static str {
        match self {
            QuadratureRule::InitialPoint => "initial",
            QuadratureRule::Midpoint => "midpoint",
            QuadratureRule::GaussLegendre3 => "gl3",
            QuadratureRule::Adaptive { .. } => "exact",
        }
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, QuadratureRule::Adaptive { .. })
    }
}

impl FromStr for QuadratureRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "initial" => Ok(QuadratureRule::InitialPoint),
            "midpoint" => Ok(QuadratureRule::Midpoint),
            "gl3" => Ok(QuadratureRule::GaussLegendre3),
            "exact" => Ok(QuadratureRule::adaptive()),
            _ => Err(Error::InvalidArgument(format!(
                "unknown quadrature rule {s:?} (expected initial, midpoint, gl3 or exact)"
            ))),
        }
    }
}

impl fmt::Display for QuadratureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a <= b {
        Ok(())
    } else {
        Err(Error::InvalidInterval { a, b })
    }
}

pub fn integrate(u: impl Fn(f64) -> f64, a: f64, b: f64, rule: QuadratureRule) -> Result<f64> {
    check_interval(a, b)?;
    integrate_fallible(&mut |t| Ok(u(t)), a, b, rule)
}

/// `D(u) = ∫_a^b ∫_a^s (u(r) - u(s)) dr ds` over the triangle `a <= r <= s <= b`.
pub fn double_antisym(u: impl Fn(f64) -> f64, a: f64, b: f64, rule: QuadratureRule) -> Result<f64> {
    check_interval(a, b)?;
    double_antisym_with(&u, &|s| integrate(&u, a, s, rule), a, b, rule)
}

/// `X(f, g) = ∫_a^b ∫_a^s (f(r) g(s) - g(r) f(s)) dr ds`; antisymmetric in `(f, g)`.
pub fn double_cross(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rule: QuadratureRule,
) -> Result<f64> {
    check_interval(a, b)?;
    double_cross_with(
        &f,
        &g,
        &|s| integrate(&f, a, s, rule),
        &|s| integrate(&g, a, s, rule),
        a,
        b,
        rule,
    )
}

/// [`double_antisym`] with a caller-supplied running integral
/// `inner(s) = ∫_a^s u`, e.g. from an analytic primitive.
pub(crate) fn double_antisym_with(
    u: &dyn Fn(f64) -> f64,
    inner: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    rule: QuadratureRule,
) -> Result<f64> {
    integrate_fallible(&mut |s| Ok(inner(s)? - (s - a) * u(s)), a, b, rule)
}

pub(crate) fn double_cross_with(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    f_inner: &dyn Fn(f64) -> Result<f64>,
    g_inner: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    rule: QuadratureRule,
) -> Result<f64> {
    integrate_fallible(&mut |s| Ok(f_inner(s)? * g(s) - g_inner(s)? * f(s)), a, b, rule)
}

pub(crate) fn integrate_fallible(
    u: &mut dyn FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    rule: QuadratureRule,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    match rule {
        QuadratureRule::InitialPoint => Ok((b - a) * u(a)?),
        QuadratureRule::Midpoint => Ok((b - a) * u(0.5 * (a + b))?),
        QuadratureRule::GaussLegendre3 => Ok(gl3(u, a, b)?.value),
        QuadratureRule::Adaptive { abs_tol, rel_tol } => adaptive(u, a, b, abs_tol, rel_tol),
    }
}

struct Estimate {
    value: f64,
    /// `∫|u|` under the same rule, used as the roundoff scale.
    magnitude: f64,
}

fn gl3(u: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<Estimate> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let c = u(mid)?;
    let l = u(mid - half * GL3_NODE)?;
    let r = u(mid + half * GL3_NODE)?;
    Ok(Estimate {
        // Written about the centre value so constants integrate exactly.
        value: (b - a) * (c + 0.5 * GL3_OUTER_WEIGHT * (l + r - 2.0 * c)),
        magnitude: half.abs() * (GL3_CENTER_WEIGHT * c.abs() + GL3_OUTER_WEIGHT * (l.abs() + r.abs())),
    })
}

fn adaptive(u: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let whole = gl3(u, a, b)?;
    let mid = 0.5 * (a + b);
    let left = gl3(u, a, mid)?;
    let right = gl3(u, mid, b)?;
    let tol = abs_tol.max(rel_tol * (left.value + right.value).abs());
    refine(u, a, b, whole.value, left, right, tol, 0)
}

// Accepts the halves once they agree with the whole to within the local
// tolerance; the tolerance is split between the two children on refinement.
#[allow(clippy::too_many_arguments)]
fn refine(
    u: &mut dyn FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    whole: f64,
    left: Estimate,
    right: Estimate,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let halves = left.value + right.value;
    let diff = halves - whole;
    let roundoff = 64.0 * f64::EPSILON * (left.magnitude + right.magnitude);
    if diff.abs() < tol || diff.abs() <= roundoff {
        // Richardson step for a sixth-order rule.
        return Ok(halves + diff / 63.0);
    }
    if depth >= MAX_ADAPTIVE_DEPTH {
        return Err(Error::QuadratureDepth {
            a,
            b,
            depth: MAX_ADAPTIVE_DEPTH,
        });
    }
    let mid = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + mid), 0.5 * (mid + b));
    let ll = gl3(u, a, lm)?;
    let lr = gl3(u, lm, mid)?;
    let rl = gl3(u, mid, rm)?;
    let rr = gl3(u, rm, b)?;
    let lv = refine(u, a, mid, left.value, ll, lr, 0.5 * tol, depth + 1)?;
    let rv = refine(u, mid, b, right.value, rl, rr, 0.5 * tol, depth + 1)?;
    Ok(lv + rv)
}
