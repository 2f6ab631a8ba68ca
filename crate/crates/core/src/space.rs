//! Label spaces and the labels living in them.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite output space: classes, total orders, or a fixed real grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LabelSpace {
    Classes { m: usize },
    Permutations { m: usize },
    RealGrid { lo: f64, hi: f64, count: usize },
}

impl LabelSpace {
    pub fn classes(m: usize) -> Result<Self> {
        let s = LabelSpace::Classes { m };
        s.validate()?;
        Ok(s)
    }

    pub fn permutations(m: usize) -> Result<Self> {
        let s = LabelSpace::Permutations { m };
        s.validate()?;
        Ok(s)
    }

    pub fn real_grid(lo: f64, hi: f64, count: usize) -> Result<Self> {
        let s = LabelSpace::RealGrid { lo, hi, count };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LabelSpace::Classes { m } | LabelSpace::Permutations { m } if m == 0 => {
                Err(Error::validation("label space needs at least one element"))
            }
            LabelSpace::RealGrid { lo, hi, count } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::validation(format!("grid bounds must satisfy lo < hi, got [{lo}, {hi}]")));
                }
                if count < 2 {
                    return Err(Error::validation("grid needs at least two points"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of labels, saturating for large permutation groups.
    pub fn cardinality(&self) -> u128 {
        match *self {
            LabelSpace::Classes { m } => m as u128,
            LabelSpace::Permutations { m } => (1..=m as u128).fold(1u128, |acc, k| acc.saturating_mul(k)),
            LabelSpace::RealGrid { count, .. } => count as u128,
        }
    }

    pub fn contains(&self, label: &Label) -> bool {
        match (self, label) {
            (LabelSpace::Classes { m }, Label::Class(c)) => c < m,
            (LabelSpace::Permutations { m }, Label::Perm(p)) => p.len() == *m,
            (LabelSpace::RealGrid { lo, hi, .. }, Label::Real(v)) => {
                let slack = 1e-9 * (hi - lo);
                v.is_finite() && *v >= lo - slack && *v <= hi + slack
            }
            _ => false,
        }
    }

    pub fn check(&self, label: &Label) -> Result<()> {
        if self.contains(label) {
            Ok(())
        } else {
            Err(Error::domain(format!("label {label} is not in {self}")))
        }
    }

    /// The `i`-th grid point; `None` for non-grid spaces.
    pub fn grid_point(&self, i: usize) -> Option<f64> {
        match *self {
            LabelSpace::RealGrid { lo, hi, count } if i < count => {
                if i + 1 == count {
                    Some(hi)
                } else {
                    Some(lo + (hi - lo) * i as f64 / (count - 1) as f64)
                }
            }
            _ => None,
        }
    }

    /// Enumerates every label. Only sensible for small spaces.
    pub fn labels(&self) -> Vec<Label> {
        match *self {
            LabelSpace::Classes { m } => (0..m).map(Label::Class).collect(),
            LabelSpace::Permutations { m } => Permutation::all(m).map(Label::Perm).collect(),
            LabelSpace::RealGrid { count, .. } => {
                (0..count).map(|i| Label::Real(self.grid_point(i).unwrap())).collect()
            }
        }
    }
}

impl fmt::Display for LabelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelSpace::Classes { m } => write!(f, "classes:{m}"),
            LabelSpace::Permutations { m } => write!(f, "perms:{m}"),
            LabelSpace::RealGrid { lo, hi, count } => write!(f, "grid:{lo}:{hi}:{count}"),
        }
    }
}

impl std::str::FromStr for LabelSpace {
    type Err = Error;

    /// Parses the compact `classes:4`, `perms:5`, `grid:-6:6:1000` notation.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::validation(format!("cannot parse label space `{s}`"));
        let int = |p: &str| p.parse::<usize>().map_err(|_| bad());
        let real = |p: &str| p.parse::<f64>().map_err(|_| bad());
        match parts.as_slice() {
            ["classes", m] => LabelSpace::classes(int(m)?),
            ["perms", m] => LabelSpace::permutations(int(m)?),
            ["grid", lo, hi, count] => LabelSpace::real_grid(real(lo)?, real(hi)?, int(count)?),
            _ => Err(bad()),
        }
    }
}

/// A total order on `m` items, stored as the rank of each item.
///
/// `ranks[i] > ranks[j]` means item `i` is placed above item `j`. Ties between
/// permutations are always broken on the *order* (the inverse permutation,
/// listing items from rank 0 upwards), lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn from_ranks(ranks: Vec<usize>) -> Result<Self> {
        let m = ranks.len();
        let mut seen = vec![false; m];
        for &r in &ranks {
            if r >= m || seen[r] {
                return Err(Error::domain(format!("{ranks:?} is not a permutation of 0..{m}")));
            }
            seen[r] = true;
        }
        Ok(Permutation(ranks))
    }

    /// Builds the permutation that puts `order[0]` at rank 0, `order[1]` at rank 1, ...
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let m = order.len();
        let mut ranks = vec![usize::MAX; m];
        for (r, &item) in order.iter().enumerate() {
            if item >= m || ranks[item] != usize::MAX {
                return Err(Error::domain(format!("{order:?} is not an ordering of 0..{m}")));
            }
            ranks[item] = r;
        }
        Ok(Permutation(ranks))
    }

    pub fn identity(m: usize) -> Self {
        Permutation((0..m).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self, item: usize) -> usize {
        self.0[item]
    }

    /// Items listed from rank 0 upwards.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.0.len()];
        for (item, &r) in self.0.iter().enumerate() {
            order[r] = item;
        }
        order
    }

    pub fn reversed(&self) -> Self {
        let m = self.0.len();
        Permutation(self.0.iter().map(|&r| m - 1 - r).collect())
    }

    /// All `m!` permutations, in lexicographic order of their orderings.
    pub fn all(m: usize) -> impl Iterator<Item = Permutation> {
        (0..m).permutations(m).map(|order| Permutation::from_order(&order).expect("valid ordering"))
    }

    /// Number of unordered item pairs ranked differently by `self` and `other`.
    pub fn discordant_pairs(&self, other: &Permutation) -> usize {
        let m = self.len();
        let mut count = 0;
        for i in 0..m {
            for j in (i + 1)..m {
                let a = self.0[i] > self.0[j];
                let b = other.0[i] > other.0[j];
                if a != b {
                    count += 1;
                }
            }
        }
        count
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(ranks: Vec<usize>) -> Result<Self> {
        Permutation::from_ranks(ranks)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

/// A single output value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Class(usize),
    Perm(Permutation),
    Real(f64),
}

impl Label {
    pub fn as_class(&self) -> Option<usize> {
        match self {
            Label::Class(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_perm(&self) -> Option<&Permutation> {
        match self {
            Label::Perm(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Label::Real(v) => Some(*v),
            _ => None,
        }
    }

    /// Parses a label in the compact text form used by dataset archives:
    /// an integer class, a real value, or space-separated ranks.
    pub fn parse_in(space: &LabelSpace, text: &str) -> Result<Label> {
        let text = text.trim();
        let bad = || Error::validation(format!("cannot parse `{text}` as a label of {space}"));
        let label = match space {
            LabelSpace::Classes { .. } => Label::Class(text.parse().map_err(|_| bad())?),
            LabelSpace::RealGrid { .. } => Label::Real(text.parse().map_err(|_| bad())?),
            LabelSpace::Permutations { .. } => {
                let ranks = text
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                Label::Perm(Permutation::from_ranks(ranks)?)
            }
        };
        space.check(&label)?;
        Ok(label)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Class(c) => write!(f, "{c}"),
            Label::Real(v) => write!(f, "{v}"),
            Label::Perm(p) => write!(f, "{}", p.ranks().iter().join(" ")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = LabelSpace::real_grid(-6.0, 6.0, 1000).unwrap();
        assert_eq!(g.grid_point(0), Some(-6.0));
        assert_eq!(g.grid_point(999), Some(6.0));
        assert_eq!(g.grid_point(1000), None);
        assert_eq!(g.cardinality(), 1000);
    }

    #[test]
    fn invalid_spaces_are_rejected() {
        assert!(LabelSpace::classes(0).is_err());
        assert!(LabelSpace::real_grid(1.0, 1.0, 10).is_err());
        assert!(LabelSpace::real_grid(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn permutation_round_trips_between_ranks_and_order() {
        let p = Permutation::from_ranks(vec![2, 0, 1]).unwrap();
        assert_eq!(p.order(), vec![1, 2, 0]);
        assert_eq!(Permutation::from_order(&p.order()).unwrap(), p);
        assert!(Permutation::from_ranks(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_ranks(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn all_permutations_are_distinct_and_ordered() {
        let all: Vec<_> = Permutation::all(4).collect();
        assert_eq!(all.len(), 24);
        let orders: Vec<_> = all.iter().map(|p| p.order()).collect();
        assert!(orders.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn space_notation_parses() {
        assert_eq!("classes:3".parse::<LabelSpace>().unwrap(), LabelSpace::Classes { m: 3 });
        assert_eq!("perms:4".parse::<LabelSpace>().unwrap(), LabelSpace::Permutations { m: 4 });
        let g: LabelSpace = "grid:-6:6:1000".parse().unwrap();
        assert_eq!(g.to_string(), "grid:-6:6:1000");
        assert!("blob:3".parse::<LabelSpace>().is_err());
    }

    #[test]
    fn labels_parse_and_print() {
        let perms = LabelSpace::permutations(3).unwrap();
        let l = Label::parse_in(&perms, "2 0 1").unwrap();
        assert_eq!(l.to_string(), "2 0 1");
        assert!(Label::parse_in(&LabelSpace::classes(3).unwrap(), "3").is_err());
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(serde_json::from_str::<Label>(&json).unwrap(), l);
        assert_eq!(serde_json::from_str::<Label>("2.5").unwrap(), Label::Real(2.5));
        assert_eq!(serde_json::from_str::<Label>("2").unwrap(), Label::Class(2));
    }
}
