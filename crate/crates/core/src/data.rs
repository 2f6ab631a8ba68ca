//! Synthetic generators, corruption processes, LIBSVM ingestion and the
//! dataset archive format.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `SeedableRng::seed_from_u64`, so a seed fixes every stream.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Label, LabelSpace, Permutation};
use crate::weak::{PartialOrder, WeakSample, WeakSet};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A sample of inputs with their weak sets under a label space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub space: LabelSpace,
    pub samples: Vec<WeakSample>,
}

impl Dataset {
    pub fn new(space: LabelSpace, samples: Vec<WeakSample>) -> Result<Self> {
        let d = samples.first().map_or(0, |s| s.x.len());
        for (i, s) in samples.iter().enumerate() {
            if s.x.len() != d {
                return Err(Error::validation(format!("sample {i} has {} features, expected {d}", s.x.len())));
            }
            s.s.validate_for(&space)?;
            if let Some(y) = &s.hidden_y {
                space.check(y)?;
            }
        }
        Ok(Dataset { space, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.x.len())
    }

    pub fn inputs(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.x.clone()).collect()
    }

    pub fn sets(&self) -> Vec<WeakSet> {
        self.samples.iter().map(|s| s.s.clone()).collect()
    }

    pub fn hidden(&self) -> Option<Vec<Label>> {
        self.samples.iter().map(|s| s.hidden_y.clone()).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset { space: self.space.clone(), samples: indices.iter().map(|&i| self.samples[i].clone()).collect() }
    }

    /// CSV archive: a `# space=...` line, then `x_0..x_{d-1},set,hidden`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# space={}", self.space)?;
        let mut w = csv::Writer::from_writer(out);
        let d = self.dim();
        let mut header: Vec<String> = (0..d).map(|k| format!("x_{k}")).collect();
        header.push("set".into());
        header.push("hidden".into());
        w.write_record(&header)?;
        for s in &self.samples {
            let mut rec: Vec<String> = s.x.iter().map(f64::to_string).collect();
            rec.push(s.s.descriptor());
            rec.push(s.hidden_y.as_ref().map(Label::to_string).unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut first = String::new();
        input.read_line(&mut first)?;
        let space: LabelSpace = first
            .trim()
            .strip_prefix("# space=")
            .ok_or(Error::Parse { line: 1, message: "expected `# space=<label space>` header".into() })?
            .parse()
            .map_err(|e: Error| Error::Parse { line: 1, message: e.to_string() })?;
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        let cols = headers.len();
        if cols < 2 || &headers[cols - 2] != "set" || &headers[cols - 1] != "hidden" {
            return Err(Error::Parse { line: 2, message: "columns must end with `set,hidden`".into() });
        }
        let d = cols - 2;
        let mut samples = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let line = k + 3;
            let rec = rec?;
            let perr = |message: String| Error::Parse { line, message };
            let x = (0..d)
                .map(|j| rec[j].trim().parse::<f64>().map_err(|e| perr(format!("feature x_{j}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let s = WeakSet::from_descriptor(&rec[d]).map_err(|e| perr(format!("set: {e}")))?;
            let hidden_text = rec[d + 1].trim();
            let hidden = if hidden_text.is_empty() {
                None
            } else {
                Some(Label::parse_in(&space, hidden_text).map_err(|e| perr(format!("hidden label: {e}")))?)
            };
            samples.push(WeakSample::new(x, s, hidden).map_err(|e| perr(e.to_string()))?);
        }
        Dataset::new(space, samples)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::read_csv(text.as_bytes())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

/// Interval regression: `y = sin(omega x)` observed through skewed intervals.
///
/// `r_i = r - gamma log(u_i)`, `c_i ~ U[0, r_i]` and
/// `s_i = y_i + sign(y_i) c_i + [-r_i, r_i]`.
pub fn gen_interval_regression(n: usize, omega: f64, r: f64, gamma: f64, seed: u64) -> Result<Vec<WeakSample>> {
    if n == 0 {
        return Err(Error::validation("n must be positive"));
    }
    if !(r > 0.0) || gamma < 0.0 {
        return Err(Error::validation("interval noise needs r > 0 and gamma >= 0"));
    }
    let mut g = rng(seed);
    (0..n)
        .map(|_| {
            let x: f64 = g.random();
            let y = (omega * x).sin();
            let u = 1.0 - g.random::<f64>();
            let ri = r - gamma * u.ln();
            let ci = ri * g.random::<f64>();
            let centre = y + y.signum() * ci;
            let s = WeakSet::interval(centre - ri, centre + ri)?;
            WeakSample::new(vec![x], s, Some(Label::Real(y)))
        })
        .collect()
}

/// Skewed corruption: `{y_i}` with probability `gamma`, else `{anchor, y_i}`.
pub fn corrupt_classification(labels: &[usize], gamma: f64, anchor: usize, seed: u64) -> Result<Vec<WeakSet>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::validation(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let mut g = rng(seed);
    labels
        .iter()
        .map(|&y| {
            if g.random::<f64>() < gamma {
                WeakSet::classes([y])
            } else {
                WeakSet::classes([anchor, y])
            }
        })
        .collect()
}

/// Most frequent class, ties to the smallest.
pub fn majority_label(labels: &[usize]) -> Option<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &y in labels {
        *counts.entry(y).or_default() += 1;
    }
    counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(y, _)| y)
}

/// Gaussian blobs around centres spread evenly on a circle of radius `separation`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub n: usize,
    pub proportions: Vec<f64>,
    pub separation: f64,
    pub noise: f64,
}

pub fn gen_blobs(spec: &BlobSpec, seed: u64) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    let m = spec.proportions.len();
    if m == 0 || spec.proportions.iter().any(|p| !(*p > 0.0)) {
        return Err(Error::validation("blob proportions must be positive"));
    }
    if !(spec.noise > 0.0) {
        return Err(Error::validation("blob noise must be positive"));
    }
    let total: f64 = spec.proportions.iter().sum();
    // Deterministic class counts that sum to n.
    let mut counts: Vec<usize> = spec.proportions.iter().map(|p| (p / total * spec.n as f64).floor() as usize).collect();
    let mut k = 0;
    while counts.iter().sum::<usize>() < spec.n {
        counts[k % m] += 1;
        k += 1;
    }
    let normal = Normal::new(0.0, spec.noise).map_err(|e| Error::validation(e.to_string()))?;
    let mut g = rng(seed);
    let mut labels: Vec<usize> = counts.iter().enumerate().flat_map(|(c, &k)| std::iter::repeat_n(c, k)).collect();
    // Fisher-Yates so that fold splits see mixed classes.
    for i in (1..labels.len()).rev() {
        let j = g.random_range(0..=i);
        labels.swap(i, j);
    }
    let x = labels
        .iter()
        .map(|&c| {
            let angle = 2.0 * PI * c as f64 / m as f64;
            vec![
                spec.separation * angle.cos() + normal.sample(&mut g),
                spec.separation * angle.sin() + normal.sample(&mut g),
            ]
        })
        .collect();
    Ok((x, labels))
}

/// `m` random lines `a_j x + b_j`; the label at `x` ranks items by value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankingLines {
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
}

impl RankingLines {
    pub fn random(m: usize, seed: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::validation("ranking needs at least two items"));
        }
        let mut g = rng(seed);
        let slopes = (0..m).map(|_| g.random_range(-1.0..1.0)).collect();
        let intercepts = (0..m).map(|_| g.random_range(-1.0..1.0)).collect();
        Ok(RankingLines { slopes, intercepts })
    }

    pub fn m(&self) -> usize {
        self.slopes.len()
    }

    /// Ranks by ascending value: the item with the largest value gets rank `m - 1`.
    pub fn label_at(&self, x: f64) -> Permutation {
        let values: Vec<f64> = self.slopes.iter().zip(&self.intercepts).map(|(a, b)| a * x + b).collect();
        let mut order: Vec<usize> = (0..self.m()).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        Permutation::from_order(&order).expect("sorted indices form a permutation")
    }
}

/// Inputs uniform on `[0, 1]` labelled by `m` random lines.
pub fn gen_ranking_lines(m: usize, n: usize, seed: u64) -> Result<(Vec<Vec<f64>>, Vec<Permutation>, RankingLines)> {
    let lines = RankingLines::random(m, seed)?;
    let mut g = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let x: Vec<f64> = (0..n).map(|_| g.random()).collect();
    let y = x.iter().map(|&v| lines.label_at(v)).collect();
    Ok((x.into_iter().map(|v| vec![v]).collect(), y, lines))
}

/// Drops each unordered pair of the Kendall embedding with probability `p`.
///
/// Kept pairs carry their true sign; implied pairs are not added back. When
/// every pair is dropped the result is the full set.
pub fn corrupt_ordering_with(y: &Permutation, p: f64, g: &mut Rng64) -> Result<WeakSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation(format!("drop probability must lie in [0, 1], got {p}")));
    }
    let m = y.len();
    let mut kept = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if g.random::<f64>() >= p {
                kept.push((i, j));
            }
        }
    }
    if kept.is_empty() {
        return Ok(WeakSet::Full);
    }
    Ok(WeakSet::PartialOrder(PartialOrder::from_permutation(y, kept)?))
}

pub fn corrupt_ordering(y: &Permutation, p: f64, seed: u64) -> Result<WeakSet> {
    corrupt_ordering_with(y, p, &mut rng(seed))
}

/// Number of points on each ring and of rings in the circles problem.
pub const CIRCLE_POINTS: usize = 2000;
pub const CIRCLE_RINGS: usize = 4;

/// The four supervised points of the circles problem, one per ring.
pub fn circle_anchors() -> [([f64; 2], usize); 4] {
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    [([-2.0 * s3, 2.0], 4), ([1.0, -2.0 * s2], 3), ([-s3, -1.0], 2), ([-1.0, 0.0], 1)]
}

/// Semi-supervised concentric circles.
///
/// 2000 unlabelled points on rings of radius 1 to 4 (class `r - 1`), followed
/// by the four supervised anchors.
pub fn gen_concentric_circles(seed: u64) -> Result<Vec<WeakSample>> {
    let mut g = rng(seed);
    let mut out = Vec::with_capacity(CIRCLE_POINTS + 4);
    for _ in 0..CIRCLE_POINTS {
        let theta: f64 = g.random();
        let r = g.random_range(1..=CIRCLE_RINGS);
        let a = 2.0 * PI * theta;
        let x = vec![r as f64 * a.cos(), r as f64 * a.sin()];
        out.push(WeakSample::new(x, WeakSet::Full, Some(Label::Class(r - 1)))?);
    }
    for (x, r) in circle_anchors() {
        let y = Label::Class(r - 1);
        out.push(WeakSample::new(x.to_vec(), WeakSet::singleton(y.clone()), Some(y))?);
    }
    Ok(out)
}

/// Classification data read from a LIBSVM file.
#[derive(Clone, Debug, PartialEq)]
pub struct LibsvmData {
    pub x: Vec<Vec<f64>>,
    /// Dense labels in `0..m`.
    pub y: Vec<usize>,
    /// `raw_labels[c]` is the file's label for class `c`.
    pub raw_labels: Vec<f64>,
}

impl LibsvmData {
    pub fn num_classes(&self) -> usize {
        self.raw_labels.len()
    }
}

pub fn parse_libsvm_str(text: &str) -> Result<LibsvmData> {
    let mut rows: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut d = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let perr = |message: String| Error::Parse { line, message };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line");
        let label: f64 = label_tok.parse().map_err(|_| perr(format!("invalid label `{label_tok}`")))?;
        if !label.is_finite() {
            return Err(perr(format!("invalid label `{label_tok}`")));
        }
        let mut feats = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (i, v) = tok.split_once(':').ok_or_else(|| perr(format!("expected `index:value`, got `{tok}`")))?;
            let i: usize = i.parse().map_err(|_| perr(format!("invalid feature index `{i}`")))?;
            if i == 0 {
                return Err(perr("feature indices are 1-based".into()));
            }
            if i <= last {
                return Err(perr(format!("feature index {i} is not ascending")));
            }
            let v: f64 = v.parse().map_err(|_| perr(format!("invalid feature value `{v}`")))?;
            if !v.is_finite() {
                return Err(perr(format!("non-finite feature value `{v}`")));
            }
            last = i;
            feats.push((i, v));
        }
        d = d.max(last);
        rows.push((label, feats));
    }
    let mut raw_labels: Vec<f64> = rows.iter().map(|r| r.0).collect();
    raw_labels.sort_by(f64::total_cmp);
    raw_labels.dedup();
    let mut x = Vec::with_capacity(rows.len());
    let mut y = Vec::with_capacity(rows.len());
    for (label, feats) in rows {
        let mut v = vec![0.0; d];
        for (i, val) in feats {
            v[i - 1] = val;
        }
        x.push(v);
        y.push(raw_labels.binary_search_by(|p| p.total_cmp(&label)).expect("label was collected"));
    }
    Ok(LibsvmData { x, y, raw_labels })
}

pub fn parse_libsvm(path: impl AsRef<Path>) -> Result<LibsvmData> {
    parse_libsvm_str(&std::fs::read_to_string(path)?)
}

/// Writes `label idx:val ...` lines, omitting zero features.
pub fn write_libsvm<W: Write>(mut out: W, x: &[Vec<f64>], labels: &[f64]) -> Result<()> {
    if x.len() != labels.len() {
        return Err(Error::validation("feature and label counts differ"));
    }
    for (row, label) in x.iter().zip(labels) {
        write!(out, "{label}")?;
        for (k, v) in row.iter().enumerate() {
            if *v != 0.0 {
                write!(out, " {}:{v}", k + 1)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// How weak sets are produced from full labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorruptionSpec {
    SkewedPair { gamma: f64, anchor: usize },
    IntervalNoise { r: f64, gamma: f64 },
    CoordinateDrop { p: f64 },
    SemiSupervised { labeled_indices: Vec<usize> },
}

/// Estimated non-ambiguity degree with its Monte Carlo standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ambiguity {
    pub eta: f64,
    pub std_error: f64,
}

/// Largest probability that a wrong label belongs to the observed set.
///
/// Skewed pairs are known in closed form (`1 - gamma` for the anchor). For
/// dropped coordinates the probability is estimated from `draws` corruptions of
/// the identity on `m` items. Unlabelled points contain every label.
pub fn ambiguity_of(spec: &CorruptionSpec, m: usize, draws: usize, seed: u64) -> Result<Ambiguity> {
    match spec {
        CorruptionSpec::SkewedPair { gamma, .. } => {
            if !(0.0..=1.0).contains(gamma) {
                return Err(Error::validation("gamma must lie in [0, 1]"));
            }
            Ok(Ambiguity { eta: 1.0 - gamma, std_error: 0.0 })
        }
        CorruptionSpec::CoordinateDrop { p } => {
            if draws == 0 {
                return Err(Error::validation("need at least one draw"));
            }
            let y = Permutation::identity(m);
            let others: Vec<Permutation> = Permutation::all(m).filter(|z| *z != y).collect();
            let mut hits = vec![0usize; others.len()];
            let mut g = rng(seed);
            for _ in 0..draws {
                let s = corrupt_ordering_with(&y, *p, &mut g)?;
                for (h, z) in hits.iter_mut().zip(&others) {
                    if s.contains(&Label::Perm(z.clone())) {
                        *h += 1;
                    }
                }
            }
            let best = hits.iter().copied().max().unwrap_or(0) as f64 / draws as f64;
            Ok(Ambiguity { eta: best, std_error: (best * (1.0 - best) / draws as f64).sqrt() })
        }
        CorruptionSpec::SemiSupervised { .. } => Ok(Ambiguity { eta: 1.0, std_error: 0.0 }),
        CorruptionSpec::IntervalNoise { .. } => {
            Err(Error::Capability("non-ambiguity is defined here for finite label spaces only".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_samples_contain_their_label() {
        let samples = gen_interval_regression(2000, 10.0, 1.0, 1.0 / 3.0, 3).unwrap();
        assert!(samples.iter().all(|s| s.s.contains(s.hidden_y.as_ref().unwrap())));
        assert!(samples.iter().all(|s| (0.0..=1.0).contains(&s.x[0])));
        // Without noise the intervals are y +- r.
        let exact = gen_interval_regression(50, 10.0, 0.5, 0.0, 4).unwrap();
        for s in exact {
            let WeakSet::Interval { lo, hi } = s.s else { panic!() };
            assert!((hi - lo - 1.0).abs() < 1e-12 || (hi - lo) >= 1.0);
        }
    }

    #[test]
    fn skewed_corruption_extremes() {
        let labels: Vec<usize> = (0..100).map(|i| i % 3).collect();
        let full = corrupt_classification(&labels, 1.0, 0, 1).unwrap();
        assert!(full.iter().all(WeakSet::is_singleton));
        let none = corrupt_classification(&labels, 0.0, 0, 1).unwrap();
        assert!(none.iter().all(|s| s.contains(&Label::Class(0))));
        assert!(none.iter().zip(&labels).all(|(s, &y)| s.contains(&Label::Class(y))));
        assert_eq!(none[0], WeakSet::classes([0]).unwrap());
    }

    #[test]
    fn circles_layout() {
        let samples = gen_concentric_circles(7).unwrap();
        assert_eq!(samples.len(), 2004);
        for s in &samples[..2000] {
            let r = (s.x[0].powi(2) + s.x[1].powi(2)).sqrt();
            assert!((r - r.round()).abs() < 1e-12);
            assert_eq!(s.s, WeakSet::Full);
            assert_eq!(s.hidden_y, Some(Label::Class(r.round() as usize - 1)));
        }
        assert_eq!(samples[2003].x, vec![-1.0, 0.0]);
        assert_eq!(samples[2003].s, WeakSet::classes([0]).unwrap());
        assert_eq!(samples[2000].s, WeakSet::classes([3]).unwrap());
    }

    #[test]
    fn libsvm_lines() {
        let d = parse_libsvm_str("3 1:0.5 4:-1\n2\n").unwrap();
        assert_eq!(d.x[0], vec![0.5, 0.0, 0.0, -1.0]);
        assert_eq!(d.x[1], vec![0.0; 4]);
        assert_eq!(d.y, vec![1, 0]);
        assert_eq!(d.raw_labels, vec![2.0, 3.0]);
        assert!(matches!(parse_libsvm_str("1 1:2\n1 3:1 2:1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_libsvm_str("1 1:2\nx 1:1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_libsvm_str("1 1-2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_libsvm_str("1 0:2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn ranking_corruption_extremes() {
        let (_, ys, _) = gen_ranking_lines(5, 20, 2).unwrap();
        let mut g = rng(1);
        for y in &ys {
            let s = corrupt_ordering_with(y, 0.0, &mut g).unwrap();
            let consistent: Vec<_> = Permutation::all(5).filter(|z| s.contains(&Label::Perm(z.clone()))).collect();
            assert_eq!(consistent, vec![y.clone()]);
            assert_eq!(corrupt_ordering_with(y, 1.0, &mut g).unwrap(), WeakSet::Full);
        }
    }

    #[test]
    fn ambiguity_values() {
        let skew = |gamma| ambiguity_of(&CorruptionSpec::SkewedPair { gamma, anchor: 0 }, 3, 0, 0).unwrap().eta;
        assert_eq!(skew(1.0), 0.0);
        assert!((skew(0.4) - 0.6).abs() < 1e-15);
        let a = ambiguity_of(&CorruptionSpec::CoordinateDrop { p: 0.5 }, 3, 10_000, 5).unwrap();
        // An adjacent transposition survives when its single pair is dropped and
        // the remaining pairs do not pin it down; roughly half the time.
        assert!(a.eta > 0.3 && a.eta < 0.7, "{a:?}");
        assert!(a.std_error < 0.01);
    }

    #[test]
    fn dataset_csv_round_trip() {
        let samples = gen_interval_regression(5, 10.0, 1.0, 0.3, 9).unwrap();
        let ds = Dataset::new(LabelSpace::real_grid(-6.0, 6.0, 1000).unwrap(), samples).unwrap();
        let text = ds.to_csv_string();
        assert!(text.starts_with("# space=grid:-6:6:1000\nx_0,set,hidden\n"));
        assert_eq!(Dataset::from_csv_str(&text).unwrap(), ds);
        assert!(Dataset::from_csv_str("x_0,set,hidden\n").is_err());
    }

    #[test]
    fn blob_counts_follow_proportions() {
        let spec = BlobSpec { n: 100, proportions: vec![0.5, 0.3, 0.2], separation: 1.0, noise: 0.3 };
        let (x, y) = gen_blobs(&spec, 1).unwrap();
        assert_eq!(x.len(), 100);
        assert_eq!(y.iter().filter(|&&c| c == 0).count(), 50);
        assert_eq!(majority_label(&y), Some(0));
        assert_eq!(gen_blobs(&spec, 1).unwrap(), (x, y));
    }
}
