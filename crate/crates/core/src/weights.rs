//! Smoothing coefficients `alpha_i(x)` over a training sample.

use std::fmt;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightScheme {
    /// Uniform weight `1/k` on the `k` nearest training points.
    Knn { k: usize },
    /// Kernel ridge regression with a Gaussian kernel of bandwidth `sigma`.
    Krr { lambda: f64, sigma: f64 },
    /// `exp(-|x - x_i|^2 / h)`, optionally normalized to sum to one.
    NadarayaWatson { h: f64, normalized: bool },
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::Knn { k } => write!(f, "knn(k={k})"),
            WeightScheme::Krr { lambda, sigma } => write!(f, "krr(lambda={lambda}, sigma={sigma})"),
            WeightScheme::NadarayaWatson { h, normalized } => write!(f, "nw(h={h}, normalized={normalized})"),
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::Knn { k } if k == 0 => Err(Error::config("k must be positive")),
            WeightScheme::Krr { lambda, .. } if !(lambda > 0.0 && lambda.is_finite()) => {
                Err(Error::config(format!("ridge parameter must be positive, got {lambda}")))
            }
            WeightScheme::Krr { sigma, .. } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(Error::config(format!("bandwidth must be positive, got {sigma}")))
            }
            WeightScheme::NadarayaWatson { h, .. } if !(h > 0.0 && h.is_finite()) => {
                Err(Error::config(format!("bandwidth must be positive, got {h}")))
            }
            _ => Ok(()),
        }
    }

    pub fn fit(&self, x: Vec<Vec<f64>>) -> Result<FittedWeights> {
        self.validate()?;
        let n = x.len();
        if n == 0 {
            return Err(Error::validation("cannot fit weights on an empty sample"));
        }
        let dim = x[0].len();
        if x.iter().any(|r| r.len() != dim) {
            return Err(Error::validation("training inputs have inconsistent dimensions"));
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::validation("training inputs contain non-finite values"));
        }
        let krr = match *self {
            WeightScheme::Knn { k } if k > n => {
                return Err(Error::config(format!("k = {k} exceeds the {n} training points")));
            }
            WeightScheme::Krr { lambda, sigma } => {
                let mut gram = gaussian_gram(&x, &x, sigma);
                for i in 0..n {
                    gram[(i, i)] += n as f64 * lambda;
                }
                Some(Cholesky::new(gram).ok_or_else(|| Error::validation("regularized Gram matrix is not positive definite"))?)
            }
            _ => None,
        };
        Ok(FittedWeights { scheme: self.clone(), x, dim, krr })
    }
}

fn gaussian_gram(rows: &[Vec<f64>], cols: &[Vec<f64>], sigma: f64) -> DMatrix<f64> {
    let denom = 2.0 * sigma * sigma;
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| (-sq_dist(&rows[i], &cols[j]) / denom).exp())
}

/// A weight scheme bound to its training inputs.
#[derive(Clone, Debug)]
pub struct FittedWeights {
    scheme: WeightScheme,
    x: Vec<Vec<f64>>,
    dim: usize,
    krr: Option<Cholesky<f64, Dyn>>,
}

impl FittedWeights {
    pub fn scheme(&self) -> &WeightScheme {
        &self.scheme
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_query(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dim {
            return Err(Error::validation(format!(
                "query has dimension {}, training inputs have {}",
                q.len(),
                self.dim
            )));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("query contains non-finite values"));
        }
        Ok(())
    }

    /// `alpha(x)`, one coefficient per training point.
    pub fn weights_at(&self, q: &[f64]) -> Result<Vec<f64>> {
        self.check_query(q)?;
        Ok(match self.scheme {
            WeightScheme::Knn { k } => {
                let mut order: Vec<(f64, usize)> = self.x.iter().map(|xi| sq_dist(xi, q)).zip(0..).collect();
                let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if k < order.len() {
                    order.select_nth_unstable_by(k - 1, cmp);
                }
                let mut w = vec![0.0; self.n()];
                for &(_, i) in &order[..k] {
                    w[i] = 1.0 / k as f64;
                }
                w
            }
            WeightScheme::Krr { sigma, .. } => {
                let kx = DVector::from_iterator(
                    self.n(),
                    self.x.iter().map(|xi| (-sq_dist(xi, q) / (2.0 * sigma * sigma)).exp()),
                );
                self.krr.as_ref().expect("fitted").solve(&kx).iter().copied().collect()
            }
            WeightScheme::NadarayaWatson { h, normalized } => {
                let mut w: Vec<f64> = self.x.iter().map(|xi| (-sq_dist(xi, q) / h).exp()).collect();
                if normalized {
                    let total: f64 = w.iter().sum();
                    if total > 0.0 {
                        w.iter_mut().for_each(|v| *v /= total);
                    }
                }
                w
            }
        })
    }

    /// Weights for many queries; row `q` is `alpha(queries[q])`.
    pub fn weights_batch(&self, queries: &[Vec<f64>]) -> Result<WeightMatrix> {
        queries.iter().try_for_each(|q| self.check_query(q))?;
        if let (WeightScheme::Krr { sigma, .. }, Some(chol)) = (&self.scheme, &self.krr) {
            let kx = gaussian_gram(&self.x, queries, *sigma);
            let solved = chol.solve(&kx);
            return Ok(WeightMatrix::from_fn(queries.len(), self.n(), |q, i| solved[(i, q)]));
        }
        let rows = queries.par_iter().map(|q| self.weights_at(q)).collect::<Result<Vec<_>>>()?;
        WeightMatrix::from_rows(rows)
    }

    /// `A[i][j] = alpha_j(x_i)` over the training inputs themselves.
    pub fn weight_matrix(&self) -> WeightMatrix {
        self.weights_batch(&self.x).expect("training inputs are valid queries")
    }
}

/// Dense row-major weight matrix that also indexes its nonzero pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    row_nz: Vec<Vec<usize>>,
    col_nz: Vec<Vec<usize>>,
}

impl WeightMatrix {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_data(rows, cols, data)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::validation("weight matrix rows have different lengths"));
        }
        Ok(Self::from_data(r, c, rows.concat()))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        let mut row_nz = vec![Vec::new(); rows];
        let mut col_nz = vec![Vec::new(); cols];
        for i in 0..rows {
            for j in 0..cols {
                if data[i * cols + j] != 0.0 {
                    row_nz[i].push(j);
                    col_nz[j].push(i);
                }
            }
        }
        WeightMatrix { rows, cols, data, row_nz, col_nz }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_nonzeros(&self, i: usize) -> &[usize] {
        &self.row_nz[i]
    }

    pub fn col_nonzeros(&self, j: usize) -> &[usize] {
        &self.col_nz[j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// `sum_j A[i][j] * vectors[j]`.
    pub fn row_combination(&self, i: usize, vectors: &[Vec<f64>]) -> Vec<f64> {
        let dim = vectors.first().map_or(0, Vec::len);
        let mut out = vec![0.0; dim];
        for &j in self.row_nonzeros(i) {
            let a = self.get(i, j);
            for (o, v) in out.iter_mut().zip(&vectors[j]) {
                *o += a * v;
            }
        }
        out
    }

    /// `sum_i A[i][j] * vectors[i]`.
    pub fn col_combination(&self, j: usize, vectors: &[Vec<f64>]) -> Vec<f64> {
        let dim = vectors.first().map_or(0, Vec::len);
        let mut out = vec![0.0; dim];
        for &i in self.col_nonzeros(j) {
            let a = self.get(i, j);
            for (o, v) in out.iter_mut().zip(&vectors[i]) {
                *o += a * v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Vec<Vec<f64>> {
        points.iter().map(|&p| vec![p]).collect()
    }

    #[test]
    fn knn_two_nearest_on_the_line() {
        let w = WeightScheme::Knn { k: 2 }.fit(line(&[0.0, 1.0, 10.0])).unwrap();
        assert_eq!(w.weights_at(&[0.4]).unwrap(), vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn knn_fit_edge_cases() {
        assert!(WeightScheme::Knn { k: 1 }.fit(line(&[3.0])).is_ok());
        assert!(matches!(WeightScheme::Knn { k: 5 }.fit(line(&[0.0, 1.0, 2.0])), Err(Error::Config(_))));
        assert!(matches!(WeightScheme::Knn { k: 1 }.fit(vec![vec![f64::NAN]]), Err(Error::Validation(_))));
        let w = WeightScheme::Knn { k: 1 }.fit(line(&[0.0])).unwrap();
        assert!(matches!(w.weights_at(&[0.0, 1.0]), Err(Error::Validation(_))));
    }

    #[test]
    fn knn_ties_go_to_lowest_index() {
        let w = WeightScheme::Knn { k: 1 }.fit(line(&[1.0, -1.0])).unwrap();
        assert_eq!(w.weights_at(&[0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn one_nn_matrix_is_identity_on_distinct_points() {
        let w = WeightScheme::Knn { k: 1 }.fit(line(&[0.0, 2.0, 5.0, 9.0])).unwrap();
        assert_eq!(w.weight_matrix(), WeightMatrix::identity(4));
        let w = WeightScheme::Knn { k: 3 }.fit(line(&[0.0, 2.0, 5.0, 9.0])).unwrap();
        assert!(w.weight_matrix().row_sums().iter().all(|&s| (s - 1.0).abs() < 1e-15));
    }

    #[test]
    fn krr_single_point_closed_form() {
        let (lambda, sigma) = (1e-3, 0.1);
        let w = WeightScheme::Krr { lambda, sigma }.fit(vec![vec![0.2, 0.1]]).unwrap();
        let q = [0.25, 0.05];
        let d2 = 0.05f64.powi(2) * 2.0;
        let expected = (-d2 / (2.0 * sigma * sigma)).exp() / (1.0 + lambda);
        let got = w.weights_at(&q).unwrap()[0];
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
        let batch = w.weights_batch(&[q.to_vec()]).unwrap();
        assert!((batch.get(0, 0) - expected).abs() < 1e-14);
    }

    #[test]
    fn krr_matrix_matches_pointwise_weights() {
        let x = line(&[0.0, 0.13, 0.4, 0.77, 0.9]);
        let w = WeightScheme::Krr { lambda: 1e-2, sigma: 0.3 }.fit(x.clone()).unwrap();
        let a = w.weight_matrix();
        for (i, xi) in x.iter().enumerate() {
            let r = w.weights_at(xi).unwrap();
            for j in 0..5 {
                assert!((a.get(i, j) - r[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn krr_interpolates_gram_span_as_lambda_shrinks() {
        let x = line(&[0.0, 0.21, 0.43, 0.6, 0.95]);
        let sigma = 0.3;
        let gram = gaussian_gram(&x, &x, sigma);
        let coef = DVector::from_vec(vec![0.3, -1.0, 0.5, 2.0, -0.7]);
        let target = &gram * &coef;
        let mut last = f64::INFINITY;
        for lambda in [1e-2, 1e-4, 1e-6] {
            let a = WeightScheme::Krr { lambda, sigma }.fit(x.clone()).unwrap().weight_matrix().to_dmatrix();
            let err = (&a * &target - &target).amax();
            assert!(err < last, "lambda={lambda}: {err} !< {last}");
            last = err;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn krr_rejects_nonpositive_lambda() {
        assert!(WeightScheme::Krr { lambda: 0.0, sigma: 1.0 }.fit(line(&[0.0])).is_err());
    }

    #[test]
    fn nadaraya_watson_concentrates() {
        let w = WeightScheme::NadarayaWatson { h: 0.08, normalized: true }.fit(line(&[0.0, 5.0, -7.0])).unwrap();
        let a = w.weights_at(&[0.0]).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-12);
        let raw = WeightScheme::NadarayaWatson { h: 0.5, normalized: false }.fit(line(&[0.0, 1.0])).unwrap();
        let a = raw.weights_at(&[0.0]).unwrap();
        assert_eq!(a[0], 1.0);
        assert!((a[1] - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn combinations_use_rows_and_columns() {
        let a = WeightMatrix::from_rows(vec![vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
        let v = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(a.row_combination(0, &v), vec![1.0, 2.0]);
        assert_eq!(a.col_combination(1, &v), vec![2.0, 3.0]);
        assert_eq!(a.transpose().get(1, 0), 2.0);
    }
}
