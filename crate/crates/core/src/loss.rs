//! Losses on finite label spaces and their linear embeddings.
//!
//! Every loss is represented as `l(z, y) = <psi(z), phi(y)>` so that averages
//! of `phi` over training labels act as surrogates whose minimizing `z` is the
//! prediction. Three families are supported:
//!
//! * loss matrices over `m` classes, with `phi(y) = e_y` and `psi(z)` the
//!   `z`-th row of the matrix (or caller-supplied embeddings);
//! * the Kendall loss over permutations, `(m^2 - m - <k(y), k(z)>) / 2` where
//!   `k` is the pairwise sign embedding; `phi(y) = (k(y), 1)` and
//!   `psi(z) = (-k(z) / 2, (m^2 - m) / 2)`;
//! * the square loss on a real grid, `phi(y) = (1, y, y^2)` and
//!   `psi(z) = (z^2, -2z, 1)`.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::arcset::constrained_arcset;
use crate::error::{Error, Result};
use crate::linalg::jacobi_eigen;
use crate::space::{Label, LabelSpace, Permutation};
use crate::weak::WeakSet;

/// Eigenvalues below this magnitude are treated as exactly zero.
pub const EIGEN_CUTOFF: f64 = 1e-10;

/// `l(y, z) = <psi(y), psi(z)> - <phi(y), phi(z)>` with `|psi(y)| = |phi(y)| = c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticDecomposition {
    pub psi: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
    pub norm_const: f64,
}

impl QuadraticDecomposition {
    /// `<psi(y), psi(z)> - <phi(y), phi(z)>`.
    pub fn reconstruct(&self, y: usize, z: usize) -> f64 {
        dot(&self.psi[y], &self.psi[z]) - dot(&self.phi[y], &self.phi[z])
    }

    pub fn dim(&self) -> usize {
        self.psi.first().map_or(0, Vec::len)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_square(matrix: &[Vec<f64>]) -> Result<usize> {
    let m = matrix.len();
    if m == 0 {
        return Err(Error::validation("loss matrix is empty"));
    }
    if let Some(row) = matrix.iter().find(|r| r.len() != m) {
        return Err(Error::validation(format!("loss matrix row has {} entries, expected {m}", row.len())));
    }
    if matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::validation("loss matrix has non-finite entries"));
    }
    Ok(m)
}

fn check_proper(matrix: &[Vec<f64>]) -> Result<()> {
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if i == j && v != 0.0 {
                return Err(Error::validation(format!("loss is not proper: l({i},{i}) = {v}")));
            }
            if i != j && v <= 0.0 {
                return Err(Error::validation(format!("loss is not proper: l({i},{j}) = {v} <= 0")));
            }
        }
    }
    Ok(())
}

fn check_symmetric(matrix: &[Vec<f64>]) -> Result<()> {
    let scale = matrix.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..matrix.len() {
        for j in 0..i {
            if (matrix[i][j] - matrix[j][i]).abs() > 1e-12 * scale {
                return Err(Error::validation(format!("loss matrix is not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

/// Constant-norm quadratic decomposition of a proper symmetric loss matrix.
///
/// With `L = sum_k lambda_k u_k u_k^T`, the spectral parts are
/// `psi~(y)_k = sqrt(lambda_k^+) u_k[y]` and `phi~(y)_k = sqrt(lambda_k^-) u_k[y]`.
/// Both are padded with the correction `sqrt(C - |psi~(y)|^2) e_y`, where
/// `C = max |lambda_k|`, giving vectors of dimension `2m` and norm `sqrt(C)`.
pub fn quadratic_decomposition(matrix: &[Vec<f64>]) -> Result<QuadraticDecomposition> {
    let m = check_square(matrix)?;
    check_symmetric(matrix)?;
    check_proper(matrix)?;

    let l = DMatrix::from_fn(m, m, |i, j| 0.5 * (matrix[i][j] + matrix[j][i]));
    let eig = jacobi_eigen(&l)?;
    let cap = eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

    let mut psi = vec![vec![0.0; 2 * m]; m];
    let mut phi = vec![vec![0.0; 2 * m]; m];
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda.abs() < EIGEN_CUTOFF {
            continue;
        }
        let root = lambda.abs().sqrt();
        let target = if lambda > 0.0 { &mut psi } else { &mut phi };
        for (y, row) in target.iter_mut().enumerate() {
            row[k] = root * eig.vectors[(y, k)];
        }
    }
    for y in 0..m {
        let spectral: f64 = psi[y][..m].iter().map(|v| v * v).sum();
        let correction = (cap - spectral).max(0.0).sqrt();
        psi[y][m + y] = correction;
        phi[y][m + y] = correction;
    }
    Ok(QuadraticDecomposition { psi, phi, norm_const: cap.sqrt() })
}

/// Reads a loss matrix: first line `m`, then `m` rows of `m` reals.
pub fn parse_loss_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (first, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty file".into() })?;
    let m: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::Parse { line: first + 1, message: format!("expected matrix size, got `{header}`") })?;
    let mut rows = Vec::with_capacity(m);
    for (idx, line) in lines.by_ref().take(m) {
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
        if row.len() != m {
            return Err(Error::Parse { line: idx + 1, message: format!("expected {m} values, got {}", row.len()) });
        }
        rows.push(row);
    }
    if rows.len() != m {
        return Err(Error::Parse { line: first + rows.len() + 2, message: format!("expected {m} rows") });
    }
    if let Some((idx, _)) = lines.next() {
        return Err(Error::Parse { line: idx + 1, message: "trailing content after matrix".into() });
    }
    Ok(rows)
}

pub fn read_loss_matrix(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    parse_loss_matrix(&std::fs::read_to_string(path)?)
}

/// Serializable description from which a [`LossSpec`] is rebuilt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossDescriptor {
    ZeroOne { m: usize },
    Matrix { matrix: Vec<Vec<f64>> },
    Embedded { matrix: Vec<Vec<f64>>, psi: Vec<Vec<f64>>, phi: Vec<Vec<f64>> },
    Kendall { m: usize },
    Square { lo: f64, hi: f64, count: usize },
}

#[derive(Clone, Debug)]
struct TableLoss {
    m: usize,
    dim: usize,
    matrix: Vec<f64>,
    psi: Vec<f64>,
    phi: Vec<f64>,
    quadratic: Option<QuadraticDecomposition>,
}

#[derive(Clone, Debug)]
enum LossKind {
    Table(TableLoss),
    Kendall { m: usize },
    Square { lo: f64, hi: f64, count: usize },
}

/// A loss on a finite label space together with its linear embedding.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "LossDescriptor", into = "LossDescriptor")]
pub struct LossSpec {
    space: LabelSpace,
    kind: LossKind,
    descriptor: LossDescriptor,
}

impl From<LossSpec> for LossDescriptor {
    fn from(l: LossSpec) -> Self {
        l.descriptor
    }
}

impl TryFrom<LossDescriptor> for LossSpec {
    type Error = Error;

    fn try_from(d: LossDescriptor) -> Result<Self> {
        LossSpec::from_descriptor(d)
    }
}

impl PartialEq for LossSpec {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor
    }
}

/// Outcome of minimizing a linear score over labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMin {
    pub label: Label,
    pub value: f64,
    /// Every candidate attains the minimum: the score carries no information.
    pub all_tied: bool,
}

/// Relative tolerance under which two scores count as tied.
const TIE_REL: f64 = 1e-12;

fn tie_tol(v: f64) -> f64 {
    TIE_REL * v.abs()
}

/// Lowest-index minimizer of `scores`, plus whether all entries tie.
pub(crate) fn argmin_lowest(scores: impl Iterator<Item = f64>) -> (usize, f64, bool) {
    let values: Vec<f64> = scores.collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = TIE_REL * values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let idx = values.iter().position(|&v| v <= min + tol).unwrap_or(0);
    let all_tied = values.iter().all(|&v| v <= min + tol);
    (idx, values[idx], all_tied)
}

impl LossSpec {
    pub fn from_descriptor(d: LossDescriptor) -> Result<Self> {
        match &d {
            LossDescriptor::ZeroOne { m } => {
                if *m == 0 {
                    return Err(Error::validation("0-1 loss needs at least one class"));
                }
                let matrix: Vec<Vec<f64>> =
                    (0..*m).map(|i| (0..*m).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
                let mut spec = Self::table(&matrix, None)?;
                spec.descriptor = d;
                Ok(spec)
            }
            LossDescriptor::Matrix { matrix } => {
                let mut spec = Self::table(matrix, None)?;
                spec.descriptor = d;
                Ok(spec)
            }
            LossDescriptor::Embedded { matrix, psi, phi } => {
                let mut spec = Self::table(matrix, Some((psi, phi)))?;
                spec.descriptor = d;
                Ok(spec)
            }
            LossDescriptor::Kendall { m } => {
                if *m < 1 || *m > crate::arcset::MAX_EXACT_ITEMS {
                    return Err(Error::Capability(format!(
                        "Kendall loss supports 1..={} items, got {m}",
                        crate::arcset::MAX_EXACT_ITEMS
                    )));
                }
                Ok(LossSpec {
                    space: LabelSpace::permutations(*m)?,
                    kind: LossKind::Kendall { m: *m },
                    descriptor: d,
                })
            }
            LossDescriptor::Square { lo, hi, count } => Ok(LossSpec {
                space: LabelSpace::real_grid(*lo, *hi, *count)?,
                kind: LossKind::Square { lo: *lo, hi: *hi, count: *count },
                descriptor: d,
            }),
        }
    }

    fn table(matrix: &[Vec<f64>], embeddings: Option<(&Vec<Vec<f64>>, &Vec<Vec<f64>>)>) -> Result<Self> {
        let m = check_square(matrix)?;
        check_proper(matrix)?;
        let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
        let (dim, psi, phi) = match embeddings {
            None => {
                let mut phi = vec![0.0; m * m];
                for y in 0..m {
                    phi[y * m + y] = 1.0;
                }
                (m, flat.clone(), phi)
            }
            Some((psi, phi)) => {
                if psi.len() != m || phi.len() != m {
                    return Err(Error::validation("embeddings must list one vector per label"));
                }
                let dim = psi[0].len();
                if dim == 0 || psi.iter().chain(phi.iter()).any(|v| v.len() != dim) {
                    return Err(Error::validation("embeddings must share a nonzero dimension"));
                }
                for z in 0..m {
                    for y in 0..m {
                        let l = matrix[z][y];
                        let e = dot(&psi[z], &phi[y]);
                        if (e - l).abs() > 1e-9 * (1.0 + l.abs()) {
                            return Err(Error::validation(format!(
                                "embedding reproduces l({z},{y}) = {l} as {e}"
                            )));
                        }
                    }
                }
                (dim, psi.concat(), phi.concat())
            }
        };
        let quadratic = match check_symmetric(matrix) {
            Ok(()) => Some(quadratic_decomposition(matrix)?),
            Err(_) => None,
        };
        Ok(LossSpec {
            space: LabelSpace::classes(m)?,
            kind: LossKind::Table(TableLoss { m, dim, matrix: flat, psi, phi, quadratic }),
            descriptor: LossDescriptor::Matrix { matrix: matrix.to_vec() },
        })
    }

    pub fn zero_one(m: usize) -> Result<Self> {
        Self::from_descriptor(LossDescriptor::ZeroOne { m })
    }

    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_descriptor(LossDescriptor::Matrix { matrix })
    }

    pub fn with_embeddings(matrix: Vec<Vec<f64>>, psi: Vec<Vec<f64>>, phi: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_descriptor(LossDescriptor::Embedded { matrix, psi, phi })
    }

    pub fn kendall(m: usize) -> Result<Self> {
        Self::from_descriptor(LossDescriptor::Kendall { m })
    }

    pub fn square(lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::from_descriptor(LossDescriptor::Square { lo, hi, count })
    }

    /// The natural loss for a label space: 0-1, Kendall or square.
    pub fn default_for(space: &LabelSpace) -> Result<Self> {
        match *space {
            LabelSpace::Classes { m } => Self::zero_one(m),
            LabelSpace::Permutations { m } => Self::kendall(m),
            LabelSpace::RealGrid { lo, hi, count } => Self::square(lo, hi, count),
        }
    }

    pub fn space(&self) -> &LabelSpace {
        &self.space
    }

    pub fn descriptor(&self) -> &LossDescriptor {
        &self.descriptor
    }

    /// Dimension of the embedding vectors.
    pub fn dim(&self) -> usize {
        match &self.kind {
            LossKind::Table(t) => t.dim,
            LossKind::Kendall { m } => m * m + 1,
            LossKind::Square { .. } => 3,
        }
    }

    /// The full loss matrix, for finite class spaces.
    pub fn matrix(&self) -> Option<Vec<Vec<f64>>> {
        match &self.kind {
            LossKind::Table(t) => Some(t.matrix.chunks(t.m).map(<[f64]>::to_vec).collect()),
            _ => None,
        }
    }

    pub fn quadratic(&self) -> Option<&QuadraticDecomposition> {
        match &self.kind {
            LossKind::Table(t) => t.quadratic.as_ref(),
            _ => None,
        }
    }

    /// `l(z, y)`.
    pub fn eval(&self, z: &Label, y: &Label) -> Result<f64> {
        self.space.check(z)?;
        self.space.check(y)?;
        Ok(match (&self.kind, z, y) {
            (LossKind::Table(t), Label::Class(a), Label::Class(b)) => t.matrix[a * t.m + b],
            (LossKind::Kendall { m }, Label::Perm(a), Label::Perm(b)) => {
                let corr = dot(&kendall_embedding_unchecked(a), &kendall_embedding_unchecked(b));
                ((m * m - m) as f64 - corr) / 2.0
            }
            (LossKind::Square { .. }, Label::Real(a), Label::Real(b)) => (a - b) * (a - b),
            _ => unreachable!("space check guarantees matching label kinds"),
        })
    }

    pub fn phi(&self, y: &Label) -> Result<Vec<f64>> {
        self.space.check(y)?;
        Ok(match (&self.kind, y) {
            (LossKind::Table(t), Label::Class(c)) => t.phi[c * t.dim..(c + 1) * t.dim].to_vec(),
            (LossKind::Kendall { .. }, Label::Perm(p)) => {
                let mut v = kendall_embedding_unchecked(p);
                v.push(1.0);
                v
            }
            (LossKind::Square { .. }, Label::Real(v)) => vec![1.0, *v, v * v],
            _ => unreachable!(),
        })
    }

    pub fn psi(&self, z: &Label) -> Result<Vec<f64>> {
        self.space.check(z)?;
        Ok(match (&self.kind, z) {
            (LossKind::Table(t), Label::Class(c)) => t.psi[c * t.dim..(c + 1) * t.dim].to_vec(),
            (LossKind::Kendall { m }, Label::Perm(p)) => {
                let mut v: Vec<f64> = kendall_embedding_unchecked(p).into_iter().map(|s| -0.5 * s).collect();
                v.push((m * m - m) as f64 / 2.0);
                v
            }
            (LossKind::Square { .. }, Label::Real(v)) => vec![v * v, -2.0 * v, 1.0],
            _ => unreachable!(),
        })
    }

    fn check_dim(&self, g: &[f64]) -> Result<()> {
        if g.len() != self.dim() {
            return Err(Error::validation(format!(
                "surrogate has dimension {}, loss embedding has {}",
                g.len(),
                self.dim()
            )));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("surrogate has non-finite entries"));
        }
        Ok(())
    }

    /// `argmin_z <psi(z), g>` over the whole label space.
    ///
    /// Ties go to the smallest class, the lexicographically smallest ordering,
    /// or the lowest grid point.
    pub fn minimize_psi(&self, g: &[f64]) -> Result<LinearMin> {
        self.check_dim(g)?;
        match &self.kind {
            LossKind::Table(t) => {
                let (z, value, all_tied) =
                    argmin_lowest((0..t.m).map(|z| dot(&t.psi[z * t.dim..(z + 1) * t.dim], g)));
                Ok(LinearMin { label: Label::Class(z), value, all_tied })
            }
            LossKind::Kendall { m } => {
                let m = *m;
                let scores = &g[..m * m];
                let (y, best) = constrained_arcset(scores, m, None)?;
                let value = -0.5 * best + g[m * m] * (m * m - m) as f64 / 2.0;
                let scale = scores.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let all_tied = (0..m).all(|i| {
                    (0..m).all(|j| (scores[i * m + j] - scores[j * m + i]).abs() <= TIE_REL * scale)
                });
                Ok(LinearMin { label: Label::Perm(y), value, all_tied })
            }
            LossKind::Square { lo, hi, count } => {
                let (lo, hi, count) = (*lo, *hi, *count);
                let score = |z: f64| g[0] * z * z - 2.0 * g[1] * z + g[2];
                let step = (hi - lo) / (count - 1) as f64;
                let idx = if g[0] > 0.0 {
                    let centre = ((g[1] / g[0] - lo) / step).clamp(0.0, (count - 1) as f64);
                    let below = centre.floor() as usize;
                    let above = (below + 1).min(count - 1);
                    let zb = self.space.grid_point(below).unwrap();
                    let za = self.space.grid_point(above).unwrap();
                    if score(za) < score(zb) - tie_tol(score(zb)) {
                        above
                    } else {
                        below
                    }
                } else if score(hi) < score(lo) - tie_tol(score(lo)) {
                    count - 1
                } else {
                    0
                };
                let z = self.space.grid_point(idx).unwrap();
                let all_tied = g[0] == 0.0 && g[1] == 0.0;
                Ok(LinearMin { label: Label::Real(z), value: score(z), all_tied })
            }
        }
    }

    /// `argmin_{y in s} <c, phi(y)>`. Intervals are searched continuously.
    pub fn minimize_phi_over_set(&self, c: &[f64], s: &WeakSet) -> Result<LinearMin> {
        self.check_dim(c)?;
        s.validate_for(&self.space)?;
        match (&self.kind, s) {
            (LossKind::Table(t), _) => {
                let candidates: Vec<usize> = match s {
                    WeakSet::Full => (0..t.m).collect(),
                    WeakSet::Explicit(ls) => ls.iter().map(|l| l.as_class().unwrap()).collect(),
                    _ => unreachable!("validated"),
                };
                let (k, value, all_tied) =
                    argmin_lowest(candidates.iter().map(|&y| dot(&t.phi[y * t.dim..(y + 1) * t.dim], c)));
                Ok(LinearMin { label: Label::Class(candidates[k]), value, all_tied })
            }
            (LossKind::Kendall { m }, WeakSet::Explicit(ls)) => {
                let values = ls.iter().map(|l| self.phi(l).map(|p| dot(&p, c))).collect::<Result<Vec<_>>>()?;
                let (k, value, all_tied) = argmin_lowest(values.into_iter());
                let _ = m;
                Ok(LinearMin { label: ls[k].clone(), value, all_tied })
            }
            (LossKind::Kendall { m }, _) => {
                let m = *m;
                let po = match s {
                    WeakSet::PartialOrder(po) => Some(po),
                    _ => None,
                };
                let neg: Vec<f64> = c[..m * m].iter().map(|v| -v).collect();
                let (y, best) = constrained_arcset(&neg, m, po)?;
                let value = c[m * m] - best;
                let fixed = po.map(|po| po.below_masks()).unwrap_or_else(|| vec![0; m]);
                let scale = c[..m * m].iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let all_tied = (0..m).all(|i| {
                    (0..m).all(|j| {
                        let observed = fixed[i] & (1 << j) != 0 || fixed[j] & (1 << i) != 0;
                        observed || (c[i * m + j] - c[j * m + i]).abs() <= TIE_REL * scale
                    })
                });
                Ok(LinearMin { label: Label::Perm(y), value, all_tied })
            }
            (LossKind::Square { lo, hi, .. }, _) => {
                let score = |y: f64| c[0] + c[1] * y + c[2] * y * y;
                if let WeakSet::Explicit(ls) = s {
                    let (k, value, all_tied) = argmin_lowest(ls.iter().map(|l| score(l.as_real().unwrap())));
                    return Ok(LinearMin { label: ls[k].clone(), value, all_tied });
                }
                let (a, b) = clip_interval(s, *lo, *hi)?;
                let y = if c[2] > 0.0 {
                    (-c[1] / (2.0 * c[2])).clamp(a, b)
                } else if score(b) < score(a) - tie_tol(score(a)) {
                    b
                } else {
                    a
                };
                let all_tied = c[1] == 0.0 && c[2] == 0.0;
                Ok(LinearMin { label: Label::Real(y), value: score(y), all_tied })
            }
        }
    }

    /// A point of `hull psi(Y)` on which every label scores the same, if one exists.
    pub fn agnostic_psi(&self) -> Option<Vec<f64>> {
        match &self.kind {
            LossKind::Table(t) => {
                let mut mean = vec![0.0; t.dim];
                for z in 0..t.m {
                    for (acc, v) in mean.iter_mut().zip(&t.psi[z * t.dim..(z + 1) * t.dim]) {
                        *acc += v / t.m as f64;
                    }
                }
                Some(mean)
            }
            LossKind::Kendall { m } => {
                let mut v = vec![0.0; m * m + 1];
                v[m * m] = (m * m - m) as f64 / 2.0;
                Some(v)
            }
            LossKind::Square { .. } => None,
        }
    }

    /// A point of `hull phi(s)` used when every candidate of `s` ties.
    pub fn agnostic_phi(&self, s: &WeakSet) -> Result<Option<Vec<f64>>> {
        match &self.kind {
            LossKind::Table(_) => {
                let labels = s.enumerate(&self.space)?;
                Ok(Some(self.mean_phi(&labels)?))
            }
            LossKind::Kendall { .. } => match s {
                WeakSet::Explicit(ls) => Ok(Some(self.mean_phi(ls)?)),
                _ => Ok(None),
            },
            LossKind::Square { .. } => Ok(None),
        }
    }

    fn mean_phi(&self, labels: &[Label]) -> Result<Vec<f64>> {
        let mut mean = vec![0.0; self.dim()];
        for l in labels {
            for (acc, v) in mean.iter_mut().zip(self.phi(l)?) {
                *acc += v;
            }
        }
        let k = labels.len() as f64;
        mean.iter_mut().for_each(|v| *v /= k);
        Ok(mean)
    }

    /// Surrogate vector `xi_s` whose induced score is minimized on `s`.
    ///
    /// Explicit sets average `phi` uniformly, partial orders keep their
    /// observed signs and leave the rest at zero, intervals use the embedding
    /// of their midpoint, and the full space maps to the zero vector.
    pub fn wellbehaved_init(&self, s: &WeakSet) -> Result<Vec<f64>> {
        s.validate_for(&self.space)?;
        match s {
            WeakSet::Explicit(ls) => self.mean_phi(ls),
            WeakSet::Full => Ok(vec![0.0; self.dim()]),
            WeakSet::Interval { .. } => {
                let LabelSpace::RealGrid { lo, hi, .. } = self.space else { unreachable!("validated") };
                let (a, b) = clip_interval(s, lo, hi)?;
                self.phi(&Label::Real(0.5 * (a + b)))
            }
            WeakSet::PartialOrder(po) => {
                let m = po.m();
                let mut v = vec![0.0; m * m + 1];
                for &(i, j, sign) in po.observed() {
                    v[i * m + j] = sign as f64;
                    v[j * m + i] = -(sign as f64);
                }
                v[m * m] = 1.0;
                Ok(v)
            }
        }
    }

    /// `min_{y in s} l(z, y)` and a minimizer.
    pub fn infimum_over_set(&self, z: &Label, s: &WeakSet) -> Result<(f64, Label)> {
        self.extremum_over_set(z, s, false)
    }

    /// `max_{y in s} l(z, y)` and a maximizer.
    pub fn supremum_over_set(&self, z: &Label, s: &WeakSet) -> Result<(f64, Label)> {
        self.extremum_over_set(z, s, true)
    }

    fn extremum_over_set(&self, z: &Label, s: &WeakSet, maximize: bool) -> Result<(f64, Label)> {
        self.space.check(z)?;
        s.validate_for(&self.space)?;
        let pick = |better: f64, current: f64| if maximize { better > current } else { better < current };
        match (&self.kind, s) {
            (LossKind::Square { lo, hi, .. }, WeakSet::Interval { .. } | WeakSet::Full) => {
                let v = z.as_real().unwrap();
                let (a, b) = clip_interval(s, *lo, *hi)?;
                let y = if maximize {
                    if (v - a).abs() >= (v - b).abs() {
                        a
                    } else {
                        b
                    }
                } else {
                    v.clamp(a, b)
                };
                Ok(((v - y) * (v - y), Label::Real(y)))
            }
            (LossKind::Kendall { m }, WeakSet::PartialOrder(_) | WeakSet::Full) => {
                let m = *m;
                let zp = z.as_perm().unwrap();
                let sign = if maximize { -1.0 } else { 1.0 };
                let scores: Vec<f64> = kendall_embedding_unchecked(zp).into_iter().map(|v| sign * v).collect();
                let po = match s {
                    WeakSet::PartialOrder(po) => Some(po),
                    _ => None,
                };
                let (y, best) = constrained_arcset(&scores, m, po)?;
                let corr = sign * best;
                Ok((((m * m - m) as f64 - corr) / 2.0, Label::Perm(y)))
            }
            _ => {
                let candidates = s.enumerate(&self.space)?;
                let mut best: Option<(f64, Label)> = None;
                for y in candidates {
                    let v = self.eval(z, &y)?;
                    if best.as_ref().is_none_or(|(b, _)| pick(v, *b)) {
                        best = Some((v, y));
                    }
                }
                best.ok_or_else(|| Error::domain("candidate set is empty"))
            }
        }
    }
}

/// The part of an interval (or of the whole grid range for `Full`) inside `[lo, hi]`.
fn clip_interval(s: &WeakSet, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let (a, b) = match s {
        WeakSet::Interval { lo: a, hi: b } => (a.max(lo), b.min(hi)),
        _ => (lo, hi),
    };
    if a > b {
        return Err(Error::domain(format!("interval does not meet the label range [{lo}, {hi}]")));
    }
    Ok((a, b))
}

/// Pairwise sign embedding of a permutation, flattened row-major (`m * m`).
///
/// Entry `(i, j)` is `sign(y(i) - y(j))`; the diagonal is zero.
pub fn kendall_embedding(m: usize, y: &Permutation) -> Result<Vec<f64>> {
    if y.len() != m {
        return Err(Error::domain(format!("permutation has {} items, expected {m}", y.len())));
    }
    Ok(kendall_embedding_unchecked(y))
}

fn kendall_embedding_unchecked(y: &Permutation) -> Vec<f64> {
    let m = y.len();
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            v[i * m + j] = match y.rank(i).cmp(&y.rank(j)) {
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Less => -1.0,
                std::cmp::Ordering::Equal => 0.0,
            };
        }
    }
    v
}
