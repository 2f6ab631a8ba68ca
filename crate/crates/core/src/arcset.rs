//! Minimum feedback arcset decoding for the Kendall embedding.
//!
//! The score of a total order `y` against an `m x m` matrix `S` is
//! `sum_{i,j} S[i][j] * sign(y(i) - y(j))`. Maximizing it is NP-hard in
//! general; here it is solved exactly by dynamic programming over the set of
//! items already placed at the lowest ranks, in `O(2^m m^2)` time.

use crate::error::{Error, Result};
use crate::space::Permutation;
use crate::weak::PartialOrder;

/// Largest number of items handled by the exact solver.
pub const MAX_EXACT_ITEMS: usize = 20;

/// `sum_{i,j} scores[i*m + j] * sign(y(i) - y(j))`.
pub fn arcset_score(scores: &[f64], y: &Permutation) -> f64 {
    let m = y.len();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let s = if y.rank(i) > y.rank(j) { 1.0 } else { -1.0 };
                total += scores[i * m + j] * s;
            }
        }
    }
    total
}

/// The order maximizing [`arcset_score`], ties broken towards the
/// lexicographically smallest ordering.
pub fn feedback_arcset_decode(scores: &[f64], m: usize) -> Result<Permutation> {
    Ok(constrained_arcset(scores, m, None)?.0)
}

/// Same as [`feedback_arcset_decode`] but only over orders consistent with
/// `constraints`. Returns the optimal order and its score.
pub fn constrained_arcset(
    scores: &[f64],
    m: usize,
    constraints: Option<&PartialOrder>,
) -> Result<(Permutation, f64)> {
    if m == 0 {
        return Err(Error::validation("feedback arcset needs at least one item"));
    }
    if scores.len() != m * m {
        return Err(Error::validation(format!(
            "score matrix has {} entries, expected {}",
            scores.len(),
            m * m
        )));
    }
    if m > MAX_EXACT_ITEMS {
        return Err(Error::Capability(format!(
            "exact feedback arcset is limited to {MAX_EXACT_ITEMS} items (got {m}); use greedy_arcset"
        )));
    }
    if let Some(po) = constraints {
        if po.m() != m {
            return Err(Error::validation("constraint size does not match score matrix"));
        }
    }
    let below = constraints.map(|po| po.below_masks()).unwrap_or_else(|| vec![0; m]);

    // margin[t][j]: gain of placing t directly above an already placed j.
    let mut margin = vec![0.0; m * m];
    for t in 0..m {
        for j in 0..m {
            if t != j {
                margin[t * m + j] = scores[t * m + j] - scores[j * m + t];
            }
        }
    }
    let gain = |t: usize, placed: usize| -> f64 {
        let mut g = 0.0;
        let mut rest = placed;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            g += margin[t * m + j];
            rest &= rest - 1;
        }
        g
    };

    let scale = margin.iter().fold(0.0f64, |a, v| a.max(v.abs())) * (m * m) as f64;
    let tol = 1e-12 * scale;
    let full = (1usize << m) - 1;
    // best[S]: best score still obtainable once the items of S hold ranks 0..|S|.
    let mut best = vec![f64::NEG_INFINITY; 1 << m];
    best[full] = 0.0;
    for placed in (0..full).rev() {
        let mut value = f64::NEG_INFINITY;
        for t in 0..m {
            let bit = 1usize << t;
            if placed & bit != 0 || (below[t] as usize) & !placed != 0 {
                continue;
            }
            let next = best[placed | bit];
            if next == f64::NEG_INFINITY {
                continue;
            }
            value = value.max(gain(t, placed) + next);
        }
        best[placed] = value;
    }
    if best[0] == f64::NEG_INFINITY {
        return Err(Error::domain("no total order satisfies the constraints"));
    }

    let mut order = Vec::with_capacity(m);
    let mut placed = 0usize;
    while placed != full {
        let target = best[placed];
        let t = (0..m)
            .find(|&t| {
                let bit = 1usize << t;
                placed & bit == 0
                    && (below[t] as usize) & !placed == 0
                    && best[placed | bit] != f64::NEG_INFINITY
                    && gain(t, placed) + best[placed | bit] >= target - tol
            })
            .expect("dynamic programming table is consistent");
        order.push(t);
        placed |= 1 << t;
    }
    let y = Permutation::from_order(&order)?;
    Ok((y, best[0]))
}

/// Approximate decoder for large `m`: insertion by best pairwise margin.
///
/// Items are inserted one at a time at the position that maximizes the score
/// of the partial ordering. No optimality guarantee.
pub fn greedy_arcset(scores: &[f64], m: usize) -> Result<Permutation> {
    if scores.len() != m * m || m == 0 {
        return Err(Error::validation("score matrix must be m x m with m >= 1"));
    }
    let margin = |a: usize, b: usize| scores[a * m + b] - scores[b * m + a];
    let mut order: Vec<usize> = Vec::with_capacity(m);
    for t in 0..m {
        // Inserting t at position p puts it above order[..p] and below order[p..].
        let mut value: f64 = order.iter().map(|&j| -margin(t, j)).sum();
        let (mut best_pos, mut best_val) = (0, value);
        for (p, &j) in order.iter().enumerate() {
            value += 2.0 * margin(t, j);
            if value > best_val {
                best_val = value;
                best_pos = p + 1;
            }
        }
        order.insert(best_pos, t);
    }
    Permutation::from_order(&order)
}
