use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix<T>", into = "RawMatrix<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Matrix2<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> TryFrom<RawMatrix<T>> for Matrix2<T> {
    type Error = Error;

    fn try_from(raw: RawMatrix<T>) -> Result<Self> {
        Matrix2::from_vec(raw.rows, raw.cols, raw.values)
    }
}

impl<T> From<Matrix2<T>> for RawMatrix<T> {
    fn from(m: Matrix2<T>) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            values: m.values,
        }
    }
}

impl<T: Scalar> Matrix2<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.values[i * n + i] = T::one();
        }
        m
    }

    /// Builds a matrix from row-major values, rejecting wrong lengths and NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::dims("matrix values", rows * cols, values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix values"));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::dims("matrix row", cols, r.len()));
            }
            values.extend_from_slice(r);
        }
        Self::from_vec(rows.len(), cols, values)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.values[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.values[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `self · x`
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::dims("matvec input", self.cols, x.len()));
        }
        Ok((0..self.rows)
            .map(|r| dot(self.row(r), x))
            .collect())
    }

    /// `selfᵀ · y`
    pub fn transpose_matvec(&self, y: &[T]) -> Result<Vec<T>> {
        if y.len() != self.rows {
            return Err(Error::dims("transpose matvec input", self.rows, y.len()));
        }
        let mut out = vec![T::zero(); self.cols];
        for (r, &yr) in y.iter().enumerate() {
            if yr == T::zero() {
                continue;
            }
            for (o, &w) in out.iter_mut().zip(self.row(r)) {
                *o += w * yr;
            }
        }
        Ok(out)
    }
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_length_and_nan() {
        assert!(matches!(
            Matrix2::<f64>::from_vec(2, 2, vec![1.0; 3]),
            Err(Error::DimensionMismatch { expected: 4, actual: 3, .. })
        ));
        assert!(Matrix2::from_vec(1, 1, vec![f64::NAN]).is_err());
        assert!(Matrix2::from_vec(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn matvec_and_transpose() {
        let m = Matrix2::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(m.matvec(&[1.0, 0.0, -1.0]).unwrap(), vec![-2.0, -2.0]);
        assert_eq!(m.transpose_matvec(&[1.0, 1.0]).unwrap(), vec![5.0, 7.0, 9.0]);
        assert_eq!(m.column(1), vec![2.0, 5.0]);
        assert!(m.matvec(&[1.0]).is_err());
    }

    #[test]
    fn serde_rejects_inconsistent_shape() {
        let bad = r#"{"rows":2,"cols":2,"values":[1.0,2.0]}"#;
        assert!(serde_json::from_str::<Matrix2<f64>>(bad).is_err());
        let good = r#"{"rows":1,"cols":2,"values":[1.0,2.0]}"#;
        let m: Matrix2<f64> = serde_json::from_str(good).unwrap();
        assert_eq!(m.shape(), (1, 2));
    }
}
