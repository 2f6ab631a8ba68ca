//! Synthetic datasets on request.

use weaklab_api::{ClassificationSource, GenerateRequest};
use weaklab_core::bench::mix_seed;
use weaklab_core::data::{
    corrupt_classification, corrupt_ordering_with, gen_blobs, gen_concentric_circles, gen_interval_regression,
    gen_ranking_lines, majority_label, rng, Dataset,
};
use weaklab_core::error::{Error, Result};
use weaklab_core::space::{Label, LabelSpace};
use weaklab_core::weak::WeakSample;

/// Draws the requested dataset. Seeds are derived the same way as in the
/// benchmark experiments, so a generated dataset matches the one a benchmark
/// with the same seed trains on.
pub fn generate(req: &GenerateRequest) -> Result<Dataset> {
    match req {
        GenerateRequest::Classification { data, corruption, anchor, seed } => {
            let (x, y) = match data {
                ClassificationSource::Blobs(spec) => gen_blobs(spec, mix_seed(*seed, &[0]))?,
                ClassificationSource::Inline { x, y } => {
                    if x.len() != y.len() {
                        return Err(Error::validation(format!("{} inputs for {} labels", x.len(), y.len())));
                    }
                    (x.clone(), y.clone())
                }
            };
            let m = match data {
                ClassificationSource::Blobs(spec) => spec.proportions.len(),
                ClassificationSource::Inline { .. } => y.iter().max().map_or(0, |c| c + 1),
            };
            let anchor = match anchor {
                Some(a) => *a,
                None => majority_label(&y).ok_or_else(|| Error::validation("empty dataset"))?,
            };
            let m = m.max(anchor + 1);
            let sets = corrupt_classification(&y, 1.0 - corruption, anchor, mix_seed(*seed, &[2, corruption.to_bits()]))?;
            let samples = x
                .into_iter()
                .zip(sets)
                .zip(y)
                .map(|((x, s), y)| WeakSample::new(x, s, Some(Label::Class(y))))
                .collect::<Result<Vec<_>>>()?;
            Dataset::new(LabelSpace::classes(m)?, samples)
        }
        GenerateRequest::IntervalRegression { n, omega, r, gamma, grid, seed } => {
            let space = LabelSpace::real_grid(grid.0, grid.1, grid.2)?;
            Dataset::new(space, gen_interval_regression(*n, *omega, *r, *gamma, *seed)?)
        }
        GenerateRequest::Ranking { m, n, p, seed } => {
            let (x, y, _) = gen_ranking_lines(*m, *n, *seed)?;
            let mut g = rng(mix_seed(*seed, &[3, p.to_bits()]));
            let samples = x
                .into_iter()
                .zip(y)
                .map(|(x, y)| {
                    let s = corrupt_ordering_with(&y, *p, &mut g)?;
                    WeakSample::new(x, s, Some(Label::Perm(y)))
                })
                .collect::<Result<Vec<_>>>()?;
            Dataset::new(LabelSpace::permutations(*m)?, samples)
        }
        GenerateRequest::SemisupCircles { seed } => {
            Dataset::new(LabelSpace::classes(weaklab_core::data::CIRCLE_RINGS)?, gen_concentric_circles(*seed)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use weaklab_core::data::BlobSpec;
    use weaklab_core::weak::WeakSet;

    #[test]
    fn zero_corruption_gives_singletons() {
        let req = GenerateRequest::Classification {
            data: ClassificationSource::Blobs(BlobSpec {
                n: 50,
                proportions: vec![0.5, 0.5],
                separation: 2.0,
                noise: 1.0,
            }),
            corruption: 0.0,
            anchor: None,
            seed: 3,
        };
        let d = generate(&req).unwrap();
        assert_eq!(d.len(), 50);
        assert!(d.samples.iter().all(|s| s.s.is_singleton()));
        assert_eq!(generate(&req).unwrap(), d);
    }

    #[test]
    fn full_corruption_pairs_with_the_anchor() {
        let req = GenerateRequest::Classification {
            data: ClassificationSource::Inline { x: vec![vec![0.0], vec![1.0], vec![2.0]], y: vec![0, 1, 1] },
            corruption: 1.0,
            anchor: None,
            seed: 0,
        };
        let d = generate(&req).unwrap();
        assert_eq!(d.samples[0].s, WeakSet::classes([0, 1]).unwrap());
        assert!(d.samples[1].s.is_singleton());
    }

    #[test]
    fn every_task_produces_hidden_labels() {
        let reqs = [
            GenerateRequest::IntervalRegression { n: 20, omega: 10.0, r: 1.0, gamma: 1.0 / 3.0, grid: (-6.0, 6.0, 1000), seed: 1 },
            GenerateRequest::Ranking { m: 4, n: 30, p: 0.5, seed: 1 },
            GenerateRequest::SemisupCircles { seed: 1 },
        ];
        for req in &reqs {
            let d = generate(req).unwrap();
            assert!(d.hidden().is_some(), "{req:?}");
        }
    }
}
