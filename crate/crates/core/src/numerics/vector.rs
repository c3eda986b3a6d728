//! Slice helpers for the vectors passed around the solvers.

use crate::scalar::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    // Scaled to avoid overflow on diverging iterates.
    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    scale * a.iter().map(|&v| (v / scale) * (v / scale)).sum::<T>().sqrt()
}

pub fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    let diff: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    norm2(&diff)
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `y += alpha * x`
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

/// Returns `a / ‖a‖₂`, or `None` for the zero vector.
pub fn normalized<T: Real>(a: &[T]) -> Option<Vec<T>> {
    let n = norm2(a);
    (n > T::zero() && n.is_finite()).then(|| scale(a, T::one() / n))
}

pub fn all_finite<T: Real>(a: &[T]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// `‖x − x*‖₂ / ‖x*‖₂`, falling back to the absolute error when `x* = 0`.
pub fn relative_error<T: Real>(x: &[T], reference: &[T]) -> T {
    let err = dist2(x, reference);
    let base = norm2(reference);
    if base > T::zero() {
        err / base
    } else {
        err
    }
}

/// Flips the sign of `v` so that its largest-magnitude entry is positive.
pub fn canonicalize_sign<T: Real>(v: &mut [T]) {
    let mut best = T::zero();
    let mut sign = T::one();
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = if x < T::zero() { -T::one() } else { T::one() };
        }
    }
    if sign < T::zero() {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        assert_eq!(norm2(&[3.0, 4.0]), 5.0);
        assert_eq!(norm2::<f64>(&[]), 0.0);
        assert!((norm2(&[1e200, 1e200]) - 1e200 * 2f64.sqrt()).abs() < 1e185);
        assert_eq!(relative_error(&[1.0, 1.0], &[0.0, 0.0]), 2f64.sqrt());
        assert_eq!(relative_error(&[2.0], &[1.0]), 1.0);
    }

    #[test]
    fn sign_canonicalization() {
        let mut v = vec![0.1, -0.9, 0.3];
        canonicalize_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
    }
}
