//! Small dense matrices of tower elements.

use std::sync::Arc;

use bkpd_precision::PrecisionContext;

use crate::element::TowerElement;
use crate::error::TowerError;
use crate::window::Agreement;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<TowerElement>,
}

impl Matrix {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> TowerElement,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix { rows, cols, entries }
    }

    pub fn try_from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Result<TowerElement, TowerError>,
    ) -> Result<Self, TowerError> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j)?);
            }
        }
        Ok(Matrix { rows, cols, entries })
    }

    /// Row-major entries.
    pub fn from_rows(rows: Vec<Vec<TowerElement>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        let nrows = rows.len();
        Matrix { rows: nrows, cols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn zero(ctx: &Arc<PrecisionContext>, level: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| TowerElement::zero(ctx, level))
    }

    pub fn identity(ctx: &Arc<PrecisionContext>, level: usize, d: usize) -> Self {
        Self::scalar(&TowerElement::one(ctx, level), d)
    }

    /// `s · I`.
    pub fn scalar(s: &TowerElement, d: usize) -> Self {
        Self::from_fn(d, d, |i, j| if i == j { s.clone() } else { TowerElement::zero(s.ctx(), s.level()) })
    }

    pub fn diagonal(diag: Vec<TowerElement>) -> Self {
        let d = diag.len();
        let (ctx, level) = (diag[0].ctx().clone(), diag[0].level());
        Self::from_fn(d, d, |i, j| if i == j { diag[i].clone() } else { TowerElement::zero(&ctx, level) })
    }

    /// A column vector.
    pub fn column(v: Vec<TowerElement>) -> Self {
        Matrix { rows: v.len(), cols: 1, entries: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TowerElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: TowerElement) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[TowerElement] {
        &self.entries
    }

    pub fn col(&self, j: usize) -> Vec<TowerElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<TowerElement> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn level(&self) -> usize {
        self.entries[0].level()
    }

    pub fn ctx(&self) -> &Arc<PrecisionContext> {
        self.entries[0].ctx()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&TowerElement) -> Result<TowerElement, TowerError>) -> Result<Self, TowerError> {
        let entries = self.entries.iter().map(f).collect::<Result<_, _>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn add(&self, other: &Matrix) -> Result<Self, TowerError> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self::try_from_fn(self.rows, self.cols, |i, j| self.get(i, j).add(other.get(i, j)))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Self, TowerError> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self::try_from_fn(self.rows, self.cols, |i, j| self.get(i, j).sub(other.get(i, j)))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Self, TowerError> {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        Self::try_from_fn(self.rows, other.cols, |i, j| {
            let mut acc = TowerElement::zero(self.ctx(), self.level());
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
            }
            Ok(acc)
        })
    }

    pub fn mul_vec(&self, v: &[TowerElement]) -> Result<Vec<TowerElement>, TowerError> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = TowerElement::zero(self.ctx(), self.level());
                for (k, vk) in v.iter().enumerate() {
                    acc = acc.add(&self.get(i, k).mul(vk)?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// Multiplies every entry by `s`.
    pub fn scale(&self, s: &TowerElement) -> Result<Self, TowerError> {
        self.map(|x| x.mul(s))
    }

    pub fn include_up(&self) -> Result<Self, TowerError> {
        self.map(|x| x.include_up())
    }

    pub fn include_to(&self, level: usize) -> Result<Self, TowerError> {
        self.map(|x| x.include_to(level))
    }

    /// Entrywise Frobenius down one level.
    pub fn frobenius(&self) -> Result<Self, TowerError> {
        self.map(|x| x.frobenius())
    }

    /// Entrywise Frobenius as an endomorphism of the current level.
    pub fn phi(&self) -> Self {
        self.map(|x| Ok(x.phi())).expect("phi is total")
    }

    pub fn frobenius_preimage(&self) -> Result<Self, TowerError> {
        self.map(|x| x.frobenius_preimage())
    }

    /// Entrywise comparison; the first disagreement wins.
    pub fn compare(&self, other: &Matrix) -> Agreement {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(Agreement::default(), |acc, (a, b)| acc.meet(a.compare(b)))
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Matrix {
        let rows: Vec<Vec<TowerElement>> = (0..self.rows)
            .filter(|&i| i != skip_row)
            .map(|i| (0..self.cols).filter(|&j| j != skip_col).map(|j| self.get(i, j).clone()).collect())
            .collect();
        Matrix::from_rows(rows)
    }

    /// Determinant by cofactor expansion; ranks here are small.
    pub fn det(&self) -> Result<TowerElement, TowerError> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        match self.rows {
            0 => unreachable!("empty matrix"),
            1 => Ok(self.get(0, 0).clone()),
            2 => self.get(0, 0).mul(self.get(1, 1))?.sub(&self.get(0, 1).mul(self.get(1, 0))?),
            n => {
                let mut acc = TowerElement::zero(self.ctx(), self.level());
                for j in 0..n {
                    let term = self.get(0, j).mul(&self.minor(0, j).det()?)?;
                    acc = if j % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
                }
                Ok(acc)
            }
        }
    }

    /// Classical adjoint: `M adj(M) = det(M) I`.
    pub fn adjugate(&self) -> Result<Matrix, TowerError> {
        let n = self.rows;
        if n == 1 {
            return Ok(Matrix::identity(self.ctx(), self.level(), 1));
        }
        Self::try_from_fn(n, n, |i, j| {
            let c = self.minor(j, i).det()?;
            Ok(if (i + j) % 2 == 0 { c } else { c.neg() })
        })
    }
}
