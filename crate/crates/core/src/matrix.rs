//! Small dense matrices over the rationals.

use num_traits::{One, Zero};

use crate::ntheory::{rat, Rational};

pub type Mat2 = [[Rational; 2]; 2];
pub type Mat4 = [[Rational; 4]; 4];

pub fn mat2(e: [[i64; 2]; 2]) -> Mat2 {
    e.map(|row| row.map(rat))
}

pub fn mat2_zero() -> Mat2 {
    mat2([[0, 0], [0, 0]])
}

pub fn mat2_identity() -> Mat2 {
    mat2([[1, 0], [0, 1]])
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j]))
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn mat2_scale(a: &Mat2, s: &Rational) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| &a[i][j] * s))
}

pub fn mat2_det(a: &Mat2) -> Rational {
    &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0]
}

pub fn mat2_inverse(a: &Mat2) -> Option<Mat2> {
    let det = mat2_det(a);
    if det.is_zero() {
        return None;
    }
    Some([
        [&a[1][1] / &det, -&a[0][1] / &det],
        [-&a[1][0] / &det, &a[0][0] / &det],
    ])
}

pub fn mat2_trace(a: &Mat2) -> Rational {
    &a[0][0] + &a[1][1]
}

pub fn mat2_is_symmetric(a: &Mat2) -> bool {
    a[0][1] == a[1][0]
}

pub fn mat4_identity() -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { Rational::one() } else { Rational::zero() }))
}

pub fn mat4_from_i64(e: [[i64; 4]; 4]) -> Mat4 {
    e.map(|row| row.map(rat))
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..4).map(|k| &a[i][k] * &b[k][j]).fold(Rational::zero(), |x, y| x + y))
    })
}

pub fn mat4_transpose(a: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn mat4_scale(a: &Mat4, s: &Rational) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| &a[i][j] * s))
}

/// `(A B; C D)` from its 2x2 blocks.
pub fn mat4_blocks(a: &Mat2, b: &Mat2, c: &Mat2, d: &Mat2) -> Mat4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let blk = match (i < 2, j < 2) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk[i % 2][j % 2].clone()
        })
    })
}

/// `J = (0 -I; I 0)`.
pub fn j_matrix() -> Mat4 {
    mat4_from_i64([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])
}

/// `J[M] = M^tr J M == J`.
pub fn is_symplectic(m: &Mat4) -> bool {
    mat4_mul(&mat4_mul(&mat4_transpose(m), &j_matrix()), m) == j_matrix()
}

/// Inverse of a symplectic matrix, `J^{-1} M^tr J`.
pub fn symplectic_inverse(m: &Mat4) -> Mat4 {
    let j = j_matrix();
    let j_inv = mat4_scale(&j, &rat(-1));
    mat4_mul(&mat4_mul(&j_inv, &mat4_transpose(m)), &j)
}

pub fn is_integral(x: &Rational) -> bool {
    x.is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_symplectic_helpers() {
        let a = mat2([[2, 1], [1, 1]]);
        let inv = mat2_inverse(&a).unwrap();
        assert_eq!(mat2_mul(&a, &inv), mat2_identity());
        assert!(is_symplectic(&j_matrix()));
        let s = mat4_from_i64([[1, 0, 3, 1], [0, 1, 1, 2], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert!(is_symplectic(&s));
        assert_eq!(mat4_mul(&s, &symplectic_inverse(&s)), mat4_identity());
        let not = mat4_from_i64([[1, 0, 3, 1], [0, 1, 2, 2], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert!(!is_symplectic(&not));
    }
}
