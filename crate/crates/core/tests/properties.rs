use proptest::prelude::*;
use rand::Rng;
use weaklab_core::arcset::{arcset_score, constrained_arcset, feedback_arcset_decode};
use weaklab_core::baselines::{ac_fit, InfimumLossPredictor};
use weaklab_core::bench::{
    complement, fold_indices, ClassificationConfig, ClassificationData, Experiment, RateConfig, WeightGrid,
};
use weaklab_core::data::{corrupt_classification, gen_blobs, gen_interval_regression, rng, BlobSpec};
use weaklab_core::disambig::{alternating_minimization, iqp_disambiguation, wellbehaved_inits, AmOptions, IqpOptions};
use weaklab_core::infer::{decode, fit_predictor, Targets};
use weaklab_core::loss::{kendall_embedding, quadratic_decomposition, LossSpec};
use weaklab_core::space::{Label, Permutation};
use weaklab_core::weak::{PartialOrder, WeakSet};
use weaklab_core::weights::{WeightMatrix, WeightScheme};

fn cases() -> ProptestConfig {
    ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() }
}

fn random_loss(m: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut g = rng(seed);
    let mut l = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..i {
            let v = g.random_range(0.05..5.0);
            l[i][j] = v;
            l[j][i] = v;
        }
    }
    l
}

fn shuffled(m: usize, seed: u64) -> Permutation {
    let mut g = rng(seed);
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        order.swap(i, g.random_range(0..=i));
    }
    Permutation::from_order(&order).unwrap()
}

fn random_partial_order(m: usize, seed: u64) -> PartialOrder {
    let mut g = rng(seed);
    let y = shuffled(m, seed ^ 1);
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if g.random::<f64>() < 0.5 {
                pairs.push((i, j));
            }
        }
    }
    PartialOrder::from_permutation(&y, pairs).unwrap()
}

fn class_instance(n: usize, m: usize, seed: u64, nonneg: bool) -> (WeightMatrix, Vec<WeakSet>) {
    let mut g = rng(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let v: f64 = g.random();
                    if nonneg { v } else { v - 0.2 }
                })
                .collect()
        })
        .collect();
    let sets = (0..n)
        .map(|_| {
            let k = g.random_range(1..=m.min(3));
            WeakSet::classes((0..k).map(|_| g.random_range(0..m))).unwrap()
        })
        .collect();
    (WeightMatrix::from_rows(rows).unwrap(), sets)
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn decomposition_reconstructs_with_constant_norms(m in 2usize..=8, seed in any::<u64>()) {
        let l = random_loss(m, seed);
        let d = quadratic_decomposition(&l).unwrap();
        for y in 0..m {
            for z in 0..m {
                prop_assert!((d.reconstruct(y, z) - l[y][z]).abs() <= 1e-8);
            }
            let np = d.psi[y].iter().map(|v| v * v).sum::<f64>().sqrt();
            let nf = d.phi[y].iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((np - d.norm_const).abs() <= 1e-8 && (nf - d.norm_const).abs() <= 1e-8);
        }
    }

    #[test]
    fn infimum_over_own_singleton_is_zero(m in 2usize..=8, seed in any::<u64>(), y in 0usize..8) {
        let loss = LossSpec::from_matrix(random_loss(m, seed)).unwrap();
        let z = Label::Class(y % m);
        prop_assert_eq!(loss.infimum_over_set(&z, &WeakSet::singleton(z.clone())).unwrap().0, 0.0);
        let k = LossSpec::kendall(4).unwrap();
        let p = Label::Perm(shuffled(4, seed));
        prop_assert_eq!(k.infimum_over_set(&p, &WeakSet::singleton(p.clone())).unwrap().0, 0.0);
    }

    #[test]
    fn partial_order_init_singles_out_consistent_orders(m in 2usize..=4, seed in any::<u64>()) {
        let po = random_partial_order(m, seed);
        let s = WeakSet::PartialOrder(po.clone());
        let loss = LossSpec::kendall(m).unwrap();
        let xi = loss.wellbehaved_init(&s).unwrap();
        let score = |z: &Permutation| -> f64 {
            loss.psi(&Label::Perm(z.clone())).unwrap().iter().zip(&xi).map(|(a, b)| a * b).sum()
        };
        let best = Permutation::all(m).map(|z| score(&z)).fold(f64::INFINITY, f64::min);
        for z in Permutation::all(m) {
            if po.is_consistent(&z) {
                prop_assert!((score(&z) - best).abs() < 1e-9);
            } else {
                prop_assert!(score(&z) > best + 1e-9);
            }
        }
    }

    #[test]
    fn knn_ties_do_not_depend_on_sample_order(n in 2usize..25, k in 1usize..25, seed in any::<u64>()) {
        let k = k.min(n);
        let mut g = rng(seed);
        let x: Vec<Vec<f64>> = (0..n).map(|_| vec![g.random::<f64>(), g.random::<f64>()]).collect();
        let q = vec![g.random::<f64>(), g.random::<f64>()];
        let perm = shuffled(n, seed ^ 7).order();
        let xp: Vec<Vec<f64>> = perm.iter().map(|&i| x[i].clone()).collect();
        let w = WeightScheme::Knn { k }.fit(x).unwrap().weights_at(&q).unwrap();
        let wp = WeightScheme::Knn { k }.fit(xp).unwrap().weights_at(&q).unwrap();
        for (pos, &i) in perm.iter().enumerate() {
            prop_assert_eq!(w[i], wp[pos]);
        }
    }

    #[test]
    fn normalized_nadaraya_watson_rows_sum_to_one(n in 1usize..30, h in 0.05f64..5.0, seed in any::<u64>()) {
        let mut g = rng(seed);
        let x: Vec<Vec<f64>> = (0..n).map(|_| vec![g.random::<f64>()]).collect();
        let w = WeightScheme::NadarayaWatson { h, normalized: true }.fit(x).unwrap().weights_at(&[g.random()]).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn alternating_minimization_is_monotone_feasible_and_terminates(
        n in 2usize..=50, m in 2usize..=5, seed in any::<u64>(), nonneg in any::<bool>()
    ) {
        let (a, sets) = class_instance(n, m, seed, nonneg);
        let loss = LossSpec::zero_one(m).unwrap();
        let res = alternating_minimization(&a, &loss, &sets, wellbehaved_inits(&loss, &sets).unwrap(), AmOptions::default())
            .unwrap();
        prop_assert!(res.converged);
        let scale = a.to_rows().iter().flatten().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!(res.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12 * scale));
        prop_assert!(res.labels.iter().zip(&sets).all(|(y, s)| s.contains(y)));
    }

    #[test]
    fn relaxation_output_is_feasible(n in 2usize..=12, m in 2usize..=4, seed in any::<u64>()) {
        let (a, sets) = class_instance(n, m, seed, true);
        let loss = LossSpec::zero_one(m).unwrap();
        let res = iqp_disambiguation(&a, &loss, &sets, IqpOptions { steps: 30, ..IqpOptions::default() }).unwrap();
        prop_assert!(res.labels.iter().zip(&sets).all(|(y, s)| s.contains(y)));
    }

    #[test]
    fn identical_rows_reach_consensus(n in 1usize..=5, m in 2usize..=4, seed in any::<u64>()) {
        let mut g = rng(seed);
        let shared = g.random_range(0..m);
        let sets: Vec<WeakSet> = (0..n)
            .map(|_| WeakSet::classes([shared].into_iter().chain((0..g.random_range(0..m)).map(|_| g.random_range(0..m)))).unwrap())
            .collect();
        let row: Vec<f64> = (0..n).map(|_| 0.1 + g.random::<f64>()).collect();
        let a = WeightMatrix::from_rows(vec![row; n]).unwrap();
        let loss = LossSpec::zero_one(m).unwrap();
        let res = alternating_minimization(&a, &loss, &sets, wellbehaved_inits(&loss, &sets).unwrap(), AmOptions::default())
            .unwrap();
        prop_assert!(res.labels.windows(2).all(|w| w[0] == w[1]));
        prop_assert!(sets.iter().all(|s| s.contains(&res.labels[0])));
    }

    #[test]
    fn decoding_is_scale_invariant(m in 2usize..=8, seed in any::<u64>(), c in 1e-3f64..1e3) {
        let mut g = rng(seed);
        let loss = LossSpec::from_matrix(random_loss(m, seed)).unwrap();
        let v: Vec<f64> = (0..loss.dim()).map(|_| g.random_range(-1.0..1.0)).collect();
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        prop_assert_eq!(decode(&loss, &v).unwrap(), decode(&loss, &scaled).unwrap());
        let k = LossSpec::kendall(4).unwrap();
        let v: Vec<f64> = (0..k.dim()).map(|_| g.random_range(-1.0..1.0)).collect();
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        prop_assert_eq!(decode(&k, &v).unwrap(), decode(&k, &scaled).unwrap());
    }

    #[test]
    fn arcset_dp_matches_enumeration(m in 2usize..=6, seed in any::<u64>()) {
        let mut g = rng(seed);
        let scores: Vec<f64> = (0..m * m).map(|_| g.random_range(-1.0..1.0)).collect();
        let dp = feedback_arcset_decode(&scores, m).unwrap();
        let all: Vec<(f64, Permutation)> = Permutation::all(m).map(|y| (arcset_score(&scores, &y), y)).collect();
        let best = all.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((arcset_score(&scores, &dp) - best).abs() <= 1e-9);
        let winners: Vec<&Permutation> = all.iter().filter(|p| (p.0 - best).abs() <= 1e-9).map(|p| &p.1).collect();
        if winners.len() == 1 {
            prop_assert_eq!(&dp, winners[0]);
        }
        // The constrained variant only returns consistent orders and beats every one of them.
        let po = random_partial_order(m, seed);
        let (y, value) = constrained_arcset(&scores, m, Some(&po)).unwrap();
        prop_assert!(po.is_consistent(&y));
        let cbest = all.iter().filter(|p| po.is_consistent(&p.1)).map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((value - cbest).abs() <= 1e-9);
    }

    #[test]
    fn prediction_ignores_training_order(n in 2usize..30, seed in any::<u64>()) {
        let mut g = rng(seed);
        let x: Vec<Vec<f64>> = (0..n).map(|_| vec![g.random::<f64>()]).collect();
        let y: Vec<Label> = (0..n).map(|_| Label::Class(g.random_range(0..3))).collect();
        let perm = shuffled(n, seed ^ 3).order();
        let scheme = WeightScheme::Krr { lambda: 1e-2, sigma: 0.3 };
        let loss = LossSpec::zero_one(3).unwrap();
        let p = fit_predictor(&scheme, loss.clone(), x.clone(), Targets::Labels(y.clone())).unwrap();
        let pp = fit_predictor(
            &scheme,
            loss,
            perm.iter().map(|&i| x[i].clone()).collect(),
            Targets::Labels(perm.iter().map(|&i| y[i].clone()).collect()),
        )
        .unwrap();
        for _ in 0..5 {
            let q = [g.random::<f64>()];
            let (a, b) = (p.surrogate_at(&q).unwrap(), pp.surrogate_at(&q).unwrap());
            // Only decode when the surrogate is not within rounding of a tie.
            let mut sorted = a.clone();
            sorted.sort_by(|u, v| v.total_cmp(u));
            if sorted[0] - sorted[1] > 1e-9 {
                prop_assert_eq!(p.predict(&q).unwrap(), pp.predict(&q).unwrap());
            }
            prop_assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-8));
        }
    }

    #[test]
    fn ac_ignores_candidate_order(seed in any::<u64>(), m in 2usize..6) {
        let mut g = rng(seed);
        let labels: Vec<usize> = (0..m).map(|_| g.random_range(0..m)).collect();
        let mut rev = labels.clone();
        rev.reverse();
        let loss = LossSpec::zero_one(m).unwrap();
        let a = ac_fit(&WeightScheme::Knn { k: 1 }, loss.clone(), vec![vec![0.0]], &[WeakSet::explicit(labels.into_iter().map(Label::Class).collect()).unwrap()]).unwrap();
        let b = ac_fit(&WeightScheme::Knn { k: 1 }, loss, vec![vec![0.0]], &[WeakSet::explicit(rev.into_iter().map(Label::Class).collect()).unwrap()]).unwrap();
        prop_assert_eq!(a.train_xi(), b.train_xi());
    }

    #[test]
    fn methods_coincide_on_singletons(n in 3usize..25, seed in any::<u64>()) {
        let mut g = rng(seed);
        let x: Vec<Vec<f64>> = (0..n).map(|_| vec![g.random::<f64>(), g.random::<f64>()]).collect();
        let y: Vec<Label> = (0..n).map(|_| Label::Class(g.random_range(0..3))).collect();
        let sets: Vec<WeakSet> = y.iter().cloned().map(WeakSet::singleton).collect();
        let loss = LossSpec::zero_one(3).unwrap();
        let scheme = WeightScheme::Knn { k: 3.min(n) };
        let queries: Vec<Vec<f64>> = (0..10).map(|_| vec![g.random::<f64>(), g.random::<f64>()]).collect();
        let sup = fit_predictor(&scheme, loss.clone(), x.clone(), Targets::Labels(y)).unwrap().predict_batch(&queries).unwrap();
        let il = InfimumLossPredictor::fit(&scheme, loss.clone(), x.clone(), sets.clone()).unwrap().predict_batch(&queries).unwrap();
        let ac = ac_fit(&scheme, loss.clone(), x.clone(), &sets).unwrap().predict_batch(&queries).unwrap();
        let a = scheme.fit(x).unwrap().weight_matrix();
        let df = alternating_minimization(&a, &loss, &sets, wellbehaved_inits(&loss, &sets).unwrap(), AmOptions::default()).unwrap();
        prop_assert!(df.labels.iter().zip(&sets).all(|(l, s)| s.contains(l)));
        prop_assert_eq!(&il, &sup);
        prop_assert_eq!(&ac, &sup);
    }

    #[test]
    fn folds_are_a_partition(n in 2usize..200, folds in 2usize..10, seed in any::<u64>()) {
        prop_assume!(folds <= n);
        let parts = fold_indices(n, folds, seed).unwrap();
        let mut all: Vec<usize> = parts.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        prop_assert_eq!(complement(n, &parts[0]).len(), n - parts[0].len());
    }
}

#[test]
fn kendall_correlation_counts_discordant_pairs() {
    let m = 4;
    for y in Permutation::all(m) {
        let fy = kendall_embedding(m, &y).unwrap();
        for z in Permutation::all(m) {
            let fz = kendall_embedding(m, &z).unwrap();
            let corr: f64 = fy.iter().zip(&fz).map(|(a, b)| a * b).sum();
            let ordered_discordant = (0..m)
                .flat_map(|i| (0..m).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && (y.rank(i) < y.rank(j)) != (z.rank(i) < z.rank(j)))
                .count();
            assert_eq!(-corr, (2 * ordered_discordant) as f64 - (m * m - m) as f64);
            assert_eq!(ordered_discordant, 2 * y.discordant_pairs(&z));
        }
    }
}

#[test]
fn decode_recovers_every_label_exhaustively() {
    for m in 2..=8 {
        for seed in 0..5 {
            let loss = LossSpec::from_matrix(random_loss(m, seed)).unwrap();
            for y in loss.space().labels() {
                assert_eq!(decode(&loss, &loss.phi(&y).unwrap()).unwrap(), y);
            }
        }
    }
    let k = LossSpec::kendall(4).unwrap();
    for y in k.space().labels() {
        assert_eq!(decode(&k, &k.phi(&y).unwrap()).unwrap(), y);
    }
}

#[test]
fn krr_reproduces_constants_better_as_ridge_shrinks() {
    let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 / 39.0]).collect();
    let mut previous = f64::INFINITY;
    for lambda in [1.0, 1e-1, 1e-2, 1e-3, 1e-4] {
        let a = WeightScheme::Krr { lambda, sigma: 0.2 }.fit(x.clone()).unwrap().weight_matrix();
        let worst = a.row_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < previous, "lambda {lambda}: {worst} >= {previous}");
        previous = worst;
    }
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
fn ks_distance(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn interval_radii_follow_the_exponential_law() {
    let (r, gamma) = (1.0, 1.0 / 3.0);
    let draws = 100_000;
    let samples = gen_interval_regression(draws, 10.0, r, gamma, 11).unwrap();
    let radii: Vec<f64> = samples
        .iter()
        .map(|s| match s.s {
            WeakSet::Interval { lo, hi } => (hi - lo) / 2.0,
            _ => unreachable!(),
        })
        .collect();
    // r_i - r is exponential with mean gamma.
    let d = ks_distance(radii.clone(), |v| if v < r { 0.0 } else { 1.0 - (-(v - r) / gamma).exp() });
    // Critical value of the KS statistic at level 1e-3.
    assert!(d < 1.949 / (draws as f64).sqrt(), "KS distance {d}");

    // The shift c_i is uniform on [0, r_i]: c_i / r_i is uniform on [0, 1].
    let shifts: Vec<f64> = samples
        .iter()
        .zip(&radii)
        .map(|(s, &ri)| {
            let WeakSet::Interval { lo, hi } = s.s else { unreachable!() };
            let y = s.hidden_y.as_ref().unwrap().as_real().unwrap();
            ((lo + hi) / 2.0 - y).abs() / ri
        })
        .collect();
    let d = ks_distance(shifts, |v| v.clamp(0.0, 1.0));
    assert!(d < 1.949 / (draws as f64).sqrt(), "KS distance {d}");
}

#[test]
fn skewed_pairs_appear_at_the_documented_rate() {
    let draws = 100_000;
    let gamma = 0.3;
    let labels: Vec<usize> = (0..draws).map(|i| 1 + i % 2).collect();
    let sets = corrupt_classification(&labels, gamma, 0, 5).unwrap();
    let pairs = sets.iter().filter(|s| !s.is_singleton()).count() as f64;
    let p = 1.0 - gamma;
    let z = (pairs - p * draws as f64) / (draws as f64 * p * (1.0 - p)).sqrt();
    // Two-sided normal quantile at level 1e-3.
    assert!(z.abs() < 3.29, "z = {z}");
}

#[test]
fn experiments_are_pure_functions_of_their_config() {
    let cfg = ClassificationConfig {
        data: ClassificationData::Blobs(BlobSpec { n: 60, proportions: vec![0.5, 0.5], separation: 2.0, noise: 1.0 }),
        corruption: vec![0.0, 0.5],
        folds: 2,
        seeds: vec![9],
        weights: WeightGrid::krr(vec![1.0], vec![1e-2]),
        ..Default::default()
    };
    let a = Experiment::Classification(cfg.clone()).run().unwrap();
    let b = Experiment::Classification(cfg).run().unwrap();
    assert_eq!(a.table.to_csv_string(), b.table.to_csv_string());
    assert_eq!(a.table.columns, ["method", "corruption", "weights", "error", "std"]);
    let rate = Experiment::default_for("rate").unwrap();
    let mut small = rate.clone();
    if let Experiment::RateCurve(c) = &mut small {
        c.trials = 3;
        c.n_grid = vec![25, 50];
    }
    assert_eq!(small.run().unwrap().table.to_csv_string(), small.run().unwrap().table.to_csv_string());
    assert_eq!(gen_blobs(&BlobSpec { n: 30, proportions: vec![1.0, 2.0], separation: 1.0, noise: 0.5 }, 4).unwrap().1.len(), 30);
}

#[test]
fn quadrupling_trials_halves_the_standard_error() {
    let run = |trials| {
        let cfg = RateConfig { eta: 0.9, n_grid: vec![12, 25], trials, ..Default::default() };
        Experiment::RateCurve(cfg).run().unwrap().table
    };
    let (few, many) = (run(100), run(400));
    for row in 0..2 {
        let ratio = many.num(row, "se").unwrap() / few.num(row, "se").unwrap();
        assert!((ratio - 0.5).abs() <= 0.3 * 0.5, "row {row}: ratio {ratio}");
    }
}
