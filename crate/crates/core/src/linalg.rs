//! Fixed-size vectors and matrices on R^4.
//!
//! R^4 is identified with C^2 through `(x1, y1, x2, y2) -> (x1 + i y1, x2 + i y2)`.
//! Matrices are stored row-major and act on column vectors.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point or tangent vector of R^4 ⊃ S^3.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec4 {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl Vec4 {
    pub const ZERO: Vec4 = Vec4::new(0.0, 0.0, 0.0, 0.0);

    #[inline]
    pub const fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    #[inline]
    pub const fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub const fn to_array(self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    /// Euclidean inner product of R^4.
    #[inline]
    pub fn dot(self, other: Vec4) -> f64 {
        self.x1 * other.x1 + self.y1 * other.y1 + self.x2 * other.x2 + self.y2 * other.y2
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalized(self) -> Vec4 {
        self * (1.0 / self.norm())
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x1,
            1 => &self.y1,
            2 => &self.x2,
            3 => &self.y2,
            _ => panic!("Vec4 index {i} out of range"),
        }
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    #[inline]
    fn add(self, o: Vec4) -> Vec4 {
        Vec4::new(self.x1 + o.x1, self.y1 + o.y1, self.x2 + o.x2, self.y2 + o.y2)
    }
}

impl AddAssign for Vec4 {
    #[inline]
    fn add_assign(&mut self, o: Vec4) {
        *self = *self + o;
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    #[inline]
    fn sub(self, o: Vec4) -> Vec4 {
        Vec4::new(self.x1 - o.x1, self.y1 - o.y1, self.x2 - o.x2, self.y2 - o.y2)
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    #[inline]
    fn neg(self) -> Vec4 {
        Vec4::new(-self.x1, -self.y1, -self.x2, -self.y2)
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    #[inline]
    fn mul(self, s: f64) -> Vec4 {
        Vec4::new(self.x1 * s, self.y1 * s, self.x2 * s, self.y2 * s)
    }
}

impl Mul<Vec4> for f64 {
    type Output = Vec4;
    #[inline]
    fn mul(self, v: Vec4) -> Vec4 {
        v * self
    }
}

/// Row-major 4x4 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat4 {
    pub rows: [[f64; 4]; 4],
}

impl Default for Mat4 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4 {
        rows: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    };

    pub const ZERO: Mat4 = Mat4 { rows: [[0.0; 4]; 4] };

    pub const fn new(rows: [[f64; 4]; 4]) -> Self {
        Self { rows }
    }

    pub fn from_row_vectors(r: [Vec4; 4]) -> Self {
        Self::new([r[0].to_array(), r[1].to_array(), r[2].to_array(), r[3].to_array()])
    }

    #[inline]
    pub fn row(&self, i: usize) -> Vec4 {
        Vec4::from_array(self.rows[i])
    }

    #[inline]
    pub fn column(&self, j: usize) -> Vec4 {
        Vec4::new(self.rows[0][j], self.rows[1][j], self.rows[2][j], self.rows[3][j])
    }

    pub fn transpose(&self) -> Mat4 {
        let mut t = Mat4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                t.rows[j][i] = self.rows[i][j];
            }
        }
        t
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec4) -> Vec4 {
        Vec4::new(
            self.row(0).dot(v),
            self.row(1).dot(v),
            self.row(2).dot(v),
            self.row(3).dot(v),
        )
    }

    pub fn scale(&self, s: f64) -> Mat4 {
        let mut out = *self;
        out.rows.iter_mut().flatten().for_each(|x| *x *= s);
        out
    }

    /// Max-norm of the entrywise difference.
    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.rows;
        let minor = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        // Laplace expansion by the complementary 2x2 minors of rows (0,1) and (2,3).
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut det = 0.0;
        for &(a, b) in &pairs {
            let (c, d) = complement(a, b);
            let sign = if (a + b) % 2 == 1 { 1.0 } else { -1.0 };
            det += sign * minor(0, 1, a, b) * minor(2, 3, c, d);
        }
        det
    }
}

fn complement(a: usize, b: usize) -> (usize, usize) {
    let mut rest = (0..4).filter(|&k| k != a && k != b);
    (rest.next().unwrap(), rest.next().unwrap())
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, o: Mat4) -> Mat4 {
        let mut out = Mat4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                out.rows[i][j] = (0..4).map(|k| self.rows[i][k] * o.rows[k][j]).sum();
            }
        }
        out
    }
}

impl Mul<Vec4> for Mat4 {
    type Output = Vec4;
    #[inline]
    fn mul(self, v: Vec4) -> Vec4 {
        self.mul_vec(v)
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, o: Mat4) -> Mat4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.rows[i][j] += o.rows[i][j];
            }
        }
        out
    }
}

impl Neg for Mat4 {
    type Output = Mat4;
    fn neg(self) -> Mat4 {
        self.scale(-1.0)
    }
}

/// Solves the dense system `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `1e-300` in magnitude.
pub fn solve_dense<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let s: f64 = (row + 1..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Cross product of two coordinate triples.
#[inline]
pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
