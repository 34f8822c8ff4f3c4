//! Linearizations of the two steering laws about their rest points,
//! closed-form eigenvalues, and a numeric 2×2 eigen-solver used as the
//! reference for both.
//!
//! The state is (δx, δθ): lateral offset and heading error about the rest
//! point. For tau balancing the closed form printed alongside the matrix
//! does not always match the matrix's own characteristic polynomial, so the
//! matrix (through [`eig2`]) is treated as ground truth and the closed form
//! is reported only as a diagnostic ([`tau_balance_printed_eigs`]).

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::tau::Side;

pub type Mat2<T> = [[T; 2]; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("parameter {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

fn positive<T: Scalar>(pairs: &[(&'static str, T)]) -> Result<(), StabilityError> {
    for &(name, value) in pairs {
        if !(value > T::zero()) || !value.is_finite() {
            return Err(StabilityError::NonPositive {
                name,
                value: value.as_f64(),
            });
        }
    }
    Ok(())
}

/// Parameters echoed alongside a linearization. Unused ones are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinearizationParams<T> {
    pub k_f: Option<T>,
    pub k_m: Option<T>,
    pub k: Option<T>,
    pub f_f: Option<T>,
    pub f_m: Option<T>,
    pub f: Option<T>,
    pub c: Option<T>,
    pub r: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization<T> {
    pub matrix: Mat2<T>,
    /// (x, θ) of the rest point.
    pub rest_point: (T, T),
    pub params: LinearizationParams<T>,
}

/// Tau balancing about (x, θ) = (0, π/2):
///
/// ```text
/// [ 0                     -1                                        ]
/// [ 2(f_f k_f + f_m k_m)  -2(k_f f_f² + k_m f_m² + k_f R f_f² + k_m R f_m²) ]
/// ```
pub fn tau_balance_linearization<T: Scalar>(
    k_f: T,
    k_m: T,
    f_f: T,
    f_m: T,
    r: T,
) -> Result<Linearization<T>, StabilityError> {
    positive(&[("k_f", k_f), ("k_m", k_m), ("f_f", f_f), ("f_m", f_m)])?;
    if !(r >= T::zero()) {
        return Err(StabilityError::NonPositive {
            name: "R",
            value: r.as_f64(),
        });
    }
    let two = T::lit(2.0);
    let a21 = two * (f_f * k_f + f_m * k_m);
    let a22 =
        -two * (k_f * f_f * f_f + k_m * f_m * f_m + k_f * r * f_f * f_f + k_m * r * f_m * f_m);
    Ok(Linearization {
        matrix: [[T::zero(), -T::one()], [a21, a22]],
        rest_point: (T::zero(), T::FRAC_PI_2()),
        params: LinearizationParams {
            k_f: Some(k_f),
            k_m: Some(k_m),
            f_f: Some(f_f),
            f_m: Some(f_m),
            r: Some(r),
            ..Default::default()
        },
    })
}

/// Lateral rest offset of the single-wall law, ±(c − fR − f)/f with the
/// positive sign for a wall on the left.
pub fn single_wall_rest_offset<T: Scalar>(f: T, c: T, r: T, side: Side) -> T {
    let x = (c - f * r - f) / f;
    match side {
        Side::Left => x,
        Side::Right => -x,
    }
}

/// Setpoint `c` whose rest offset is `x_desired` (inverse of
/// [`single_wall_rest_offset`]).
pub fn single_wall_setpoint<T: Scalar>(f: T, x_desired: T, r: T, side: Side) -> T {
    let x = match side {
        Side::Left => x_desired,
        Side::Right => -x_desired,
    };
    f * (x + r + T::one())
}

/// Single-wall law about its rest point: [[0, −1], [f k, −k f c]].
pub fn single_wall_linearization<T: Scalar>(
    k: T,
    f: T,
    c: T,
    side: Side,
    r: T,
) -> Result<Linearization<T>, StabilityError> {
    positive(&[("k", k), ("f", f), ("c", c)])?;
    Ok(Linearization {
        matrix: [[T::zero(), -T::one()], [f * k, -k * f * c]],
        rest_point: (single_wall_rest_offset(f, c, r, side), T::FRAC_PI_2()),
        params: LinearizationParams {
            k: Some(k),
            f: Some(f),
            c: Some(c),
            r: Some(r),
            ..Default::default()
        },
    })
}

pub fn trace<T: Scalar>(m: &Mat2<T>) -> T {
    m[0][0] + m[1][1]
}

pub fn det<T: Scalar>(m: &Mat2<T>) -> T {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn ordered<T: Scalar>(mut a: Complex<T>, mut b: Complex<T>) -> [Complex<T>; 2] {
    if (b.re, b.im) < (a.re, a.im) {
        std::mem::swap(&mut a, &mut b);
    }
    [a, b]
}

/// Eigenvalues of a real 2×2 matrix, ascending by real then imaginary part.
pub fn eig2<T: Scalar>(m: &Mat2<T>) -> [Complex<T>; 2] {
    let two = T::lit(2.0);
    let half_tr = trace(m) / two;
    let d = det(m);
    // (tr/2)² − det, written to avoid cancellation between the diagonal terms.
    let h = (m[0][0] - m[1][1]) / two;
    let disc = h * h + m[0][1] * m[1][0];
    if disc >= T::zero() {
        let s = disc.sqrt();
        let q = if half_tr >= T::zero() {
            half_tr + s
        } else {
            half_tr - s
        };
        let (l1, l2) = if q == T::zero() {
            (T::zero(), T::zero())
        } else {
            (q, d / q)
        };
        ordered(Complex::new(l1, T::zero()), Complex::new(l2, T::zero()))
    } else {
        let w = (-disc).sqrt();
        ordered(Complex::new(half_tr, -w), Complex::new(half_tr, w))
    }
}

/// −kfc/2 ± √(kf(kfc² − 4))/2, complex when kfc² < 4.
pub fn single_wall_eigs_closed_form<T: Scalar>(k: T, f: T, c: T) -> [Complex<T>; 2] {
    let two = T::lit(2.0);
    let re = -k * f * c / two;
    let inner = k * f * (k * f * c * c - T::lit(4.0));
    if inner >= T::zero() {
        let s = inner.sqrt() / two;
        ordered(
            Complex::new(re - s, T::zero()),
            Complex::new(re + s, T::zero()),
        )
    } else {
        let s = (-inner).sqrt() / two;
        ordered(Complex::new(re, -s), Complex::new(re, s))
    }
}

/// The oscillation boundary 4/(f c²): below it the single-wall
/// eigenvalues are a complex pair.
pub fn single_wall_critical_gain<T: Scalar>(f: T, c: T) -> T {
    T::lit(4.0) / (f * c * c)
}

/// The tau-balancing eigenvalue expression exactly as printed next to the
/// linearization, including its first term −(f_f² k_f + f_m² k_f)(1+R).
pub fn tau_balance_printed_eigs<T: Scalar>(
    k_f: T,
    k_m: T,
    f_f: T,
    f_m: T,
    r: T,
) -> [Complex<T>; 2] {
    let one_r = T::one() + r;
    let re = -(f_f * f_f * k_f + f_m * f_m * k_f) * one_r;
    let inner = (f_f * k_f + f_m * k_m)
        * ((f_f.powi(3) * k_f + f_m.powi(3) * k_m) * one_r * one_r - T::lit(2.0));
    if inner >= T::zero() {
        let s = inner.sqrt();
        ordered(
            Complex::new(re - s, T::zero()),
            Complex::new(re + s, T::zero()),
        )
    } else {
        let s = (-inner).sqrt();
        ordered(Complex::new(re, -s), Complex::new(re, s))
    }
}

/// (f_f³k_f + f_m³k_m) > 2/(1+R)², the stated condition for real
/// eigenvalues.
pub fn tau_balance_real_eig_condition<T: Scalar>(k_f: T, k_m: T, f_f: T, f_m: T, r: T) -> bool {
    let one_r = T::one() + r;
    f_f.powi(3) * k_f + f_m.powi(3) * k_m > T::lit(2.0) / (one_r * one_r)
}

/// (tr/2)² − det of the printed tau-balancing matrix; its eigenvalues are
/// real iff this is ≥ 0.
pub fn tau_balance_discriminant<T: Scalar>(
    k_f: T,
    k_m: T,
    f_f: T,
    f_m: T,
    r: T,
) -> Result<T, StabilityError> {
    let lin = tau_balance_linearization(k_f, k_m, f_f, f_m, r)?;
    let half_tr = trace(&lin.matrix) / T::lit(2.0);
    Ok(half_tr * half_tr - det(&lin.matrix))
}

/// Both eigenvalues strictly in the open left half plane.
pub fn is_hurwitz<T: Scalar>(m: &Mat2<T>) -> bool {
    trace(m) < T::zero() && det(m) > T::zero()
}

/// True when the pair has no imaginary part.
pub fn is_real_pair<T: Scalar>(eigs: &[Complex<T>; 2]) -> bool {
    eigs.iter().all(|e| e.im == T::zero())
}

/// Agreement of two ordered eigenvalue pairs, relative to the larger
/// magnitude (absolute below 1). Pairs agree element-wise, or, near a
/// double root where the roots themselves are ill-conditioned, through
/// their sum and product (the coefficients of the characteristic
/// polynomial).
pub fn eigs_agree<T: Scalar>(a: &[Complex<T>; 2], b: &[Complex<T>; 2], tol: T) -> bool {
    let close = |x: Complex<T>, y: Complex<T>| {
        let scale = x.norm().max(y.norm()).max(T::one());
        (x - y).norm() <= tol * scale
    };
    (close(a[0], b[0]) && close(a[1], b[1]))
        || (close(a[0] + a[1], b[0] + b[1]) && close(a[0] * a[1], b[0] * b[1]))
}
