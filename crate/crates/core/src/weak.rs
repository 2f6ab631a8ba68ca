//! Set-valued supervision: candidate sets and weakly labelled samples.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Label, LabelSpace, Permutation};

/// Observed pairwise comparisons between `m` items.
///
/// Each entry `(i, j, s)` with `i < j` states `sign(y(i) - y(j)) = s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPartialOrder")]
pub struct PartialOrder {
    m: usize,
    observed: Vec<(usize, usize, i8)>,
}

#[derive(Deserialize)]
struct RawPartialOrder {
    m: usize,
    observed: Vec<(usize, usize, i8)>,
}

impl TryFrom<RawPartialOrder> for PartialOrder {
    type Error = Error;

    fn try_from(raw: RawPartialOrder) -> Result<Self> {
        PartialOrder::new(raw.m, raw.observed)
    }
}

impl PartialOrder {
    /// Accepts comparisons in either orientation; `(j, i, -s)` duplicates of
    /// `(i, j, s)` are merged, contradictory ones rejected.
    pub fn new(m: usize, pairs: impl IntoIterator<Item = (usize, usize, i8)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::validation("partial order needs at least one item"));
        }
        let mut sign = vec![0i8; m * m];
        for (i, j, s) in pairs {
            if i >= m || j >= m || i == j {
                return Err(Error::validation(format!("invalid comparison ({i}, {j}) for {m} items")));
            }
            if s != 1 && s != -1 {
                return Err(Error::validation(format!("comparison sign must be +1 or -1, got {s}")));
            }
            for (a, b, v) in [(i, j, s), (j, i, -s)] {
                let slot = &mut sign[a * m + b];
                if *slot != 0 && *slot != v {
                    return Err(Error::validation(format!("comparison ({i}, {j}) is not antisymmetric")));
                }
                *slot = v;
            }
        }
        let mut observed = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                if sign[i * m + j] != 0 {
                    observed.push((i, j, sign[i * m + j]));
                }
            }
        }
        let po = PartialOrder { m, observed };
        if po.consistent_order().is_none() {
            return Err(Error::validation("partial order contains a cycle"));
        }
        Ok(po)
    }

    /// The comparisons a total order makes on the listed pairs.
    pub fn from_permutation(y: &Permutation, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let pairs: Vec<_> = pairs
            .into_iter()
            .map(|(i, j)| (i, j, if y.rank(i) > y.rank(j) { 1 } else { -1 }))
            .collect();
        PartialOrder::new(y.len(), pairs)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn observed(&self) -> &[(usize, usize, i8)] {
        &self.observed
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    /// `below[t]` is the bitmask of items that must be ranked under item `t`.
    pub fn below_masks(&self) -> Vec<u64> {
        let mut below = vec![0u64; self.m];
        for &(i, j, s) in &self.observed {
            if s > 0 {
                below[i] |= 1 << j;
            } else {
                below[j] |= 1 << i;
            }
        }
        below
    }

    pub fn is_consistent(&self, y: &Permutation) -> bool {
        y.len() == self.m
            && self
                .observed
                .iter()
                .all(|&(i, j, s)| (y.rank(i) > y.rank(j)) == (s > 0))
    }

    /// Some total order satisfying every comparison, if one exists.
    pub fn consistent_order(&self) -> Option<Permutation> {
        // Kahn's algorithm on "must be below" edges.
        let m = self.m;
        let mut indegree = vec![0usize; m];
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); m];
        for &(i, j, s) in &self.observed {
            let (hi, lo) = if s > 0 { (i, j) } else { (j, i) };
            indegree[hi] += 1;
            above[lo].push(hi);
        }
        let mut ready: Vec<usize> = (0..m).filter(|&t| indegree[t] == 0).collect();
        let mut order = Vec::with_capacity(m);
        while let Some(t) = ready.pop() {
            order.push(t);
            for &h in &above[t] {
                indegree[h] -= 1;
                if indegree[h] == 0 {
                    ready.push(h);
                }
            }
        }
        (order.len() == m).then(|| Permutation::from_order(&order).expect("topological order"))
    }
}

/// A candidate set `s` known to contain the true label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", try_from = "RawWeakSet")]
pub enum WeakSet {
    Explicit(Vec<Label>),
    Interval { lo: f64, hi: f64 },
    PartialOrder(PartialOrder),
    /// The whole label space: an unlabelled point.
    Full,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawWeakSet {
    Explicit(Vec<Label>),
    Interval { lo: f64, hi: f64 },
    PartialOrder(PartialOrder),
    Full,
}

impl TryFrom<RawWeakSet> for WeakSet {
    type Error = Error;

    fn try_from(raw: RawWeakSet) -> Result<Self> {
        match raw {
            RawWeakSet::Explicit(labels) => WeakSet::explicit(labels),
            RawWeakSet::Interval { lo, hi } => WeakSet::interval(lo, hi),
            RawWeakSet::PartialOrder(po) => Ok(WeakSet::PartialOrder(po)),
            RawWeakSet::Full => Ok(WeakSet::Full),
        }
    }
}

fn label_order(a: &Label, b: &Label) -> Ordering {
    match (a, b) {
        (Label::Class(x), Label::Class(y)) => x.cmp(y),
        (Label::Real(x), Label::Real(y)) => x.total_cmp(y),
        (Label::Perm(x), Label::Perm(y)) => x.order().cmp(&y.order()),
        (Label::Class(_), _) => Ordering::Less,
        (_, Label::Class(_)) => Ordering::Greater,
        (Label::Perm(_), _) => Ordering::Less,
        (_, Label::Perm(_)) => Ordering::Greater,
    }
}

impl WeakSet {
    /// Explicit candidate set, stored sorted and deduplicated.
    pub fn explicit(mut labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::domain("explicit candidate set is empty"));
        }
        labels.sort_by(label_order);
        labels.dedup();
        Ok(WeakSet::Explicit(labels))
    }

    pub fn singleton(label: Label) -> Self {
        WeakSet::Explicit(vec![label])
    }

    pub fn classes(classes: impl IntoIterator<Item = usize>) -> Result<Self> {
        WeakSet::explicit(classes.into_iter().map(Label::Class).collect())
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::validation(format!("interval [{lo}, {hi}] is invalid")));
        }
        Ok(WeakSet::Interval { lo, hi })
    }

    pub fn contains(&self, label: &Label) -> bool {
        match (self, label) {
            (WeakSet::Full, _) => true,
            (WeakSet::Explicit(ls), l) => ls.contains(l),
            (WeakSet::Interval { lo, hi }, Label::Real(v)) => lo <= v && v <= hi,
            (WeakSet::PartialOrder(po), Label::Perm(p)) => po.is_consistent(p),
            _ => false,
        }
    }

    /// Checks that the set is meaningful in `space`.
    pub fn validate_for(&self, space: &LabelSpace) -> Result<()> {
        match (self, space) {
            (WeakSet::Full, _) => Ok(()),
            (WeakSet::Explicit(labels), _) => labels.iter().try_for_each(|l| space.check(l)),
            (WeakSet::Interval { .. }, LabelSpace::RealGrid { .. }) => Ok(()),
            (WeakSet::Interval { .. }, _) => Err(Error::validation(format!(
                "interval sets are only valid for real-valued outputs, not {space}"
            ))),
            (WeakSet::PartialOrder(po), LabelSpace::Permutations { m }) if po.m() == *m => Ok(()),
            (WeakSet::PartialOrder(po), _) => Err(Error::validation(format!(
                "partial order on {} items does not fit {space}",
                po.m()
            ))),
        }
    }

    /// The set's elements, when it is finite and small enough to list.
    pub fn enumerate(&self, space: &LabelSpace) -> Result<Vec<Label>> {
        match self {
            WeakSet::Explicit(labels) => Ok(labels.clone()),
            WeakSet::Full => Ok(space.labels()),
            WeakSet::PartialOrder(po) => Ok(Permutation::all(po.m())
                .filter(|p| po.is_consistent(p))
                .map(Label::Perm)
                .collect()),
            WeakSet::Interval { .. } => Err(Error::domain("cannot enumerate a continuous interval")),
        }
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self, WeakSet::Explicit(ls) if ls.len() == 1)
    }

    /// Compact JSON descriptor used in dataset archives.
    pub fn descriptor(&self) -> String {
        serde_json::to_string(self).expect("weak sets serialize")
    }

    pub fn from_descriptor(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// An observation `(x, s)`, optionally with the label it was generated from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakSample {
    pub x: Vec<f64>,
    pub s: WeakSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_y: Option<Label>,
}

impl WeakSample {
    pub fn new(x: Vec<f64>, s: WeakSet, hidden_y: Option<Label>) -> Result<Self> {
        if let Some(y) = &hidden_y {
            if !s.contains(y) {
                return Err(Error::domain(format!("hidden label {y} is not in its candidate set")));
            }
        }
        Ok(WeakSample { x, s, hidden_y })
    }
}
