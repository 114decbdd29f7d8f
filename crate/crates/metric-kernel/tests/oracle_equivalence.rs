//! Randomized equivalence checks against independent brute-force oracles.
//!
//! The oracles here recompute each metric from its definition with no shared
//! code, so a bug in the library cannot cancel out in the check.

use std::collections::BTreeSet;

use metric_kernel::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const INSTANCES: usize = 1_000;
const TOL: f64 = 1e-9;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed)
}

fn random_id_set(rng: &mut ChaCha8Rng, universe: usize, max_len: usize) -> BTreeSet<String> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| format!("id{}", rng.gen_range(0..universe))).collect()
}

#[test]
fn f1_matches_counting_oracle() {
    let mut rng = rng();
    for _ in 0..INSTANCES {
        let predicted = random_id_set(&mut rng, 12, 8);
        let gold = random_id_set(&mut rng, 12, 8);

        // Oracle: count memberships directly.
        let expected = if predicted.is_empty() && gold.is_empty() {
            1.0
        } else {
            let mut hits = 0usize;
            for p in &predicted {
                if gold.contains(p) {
                    hits += 1;
                }
            }
            if hits == 0 || predicted.is_empty() || gold.is_empty() {
                0.0
            } else {
                let p = hits as f64 / predicted.len() as f64;
                let r = hits as f64 / gold.len() as f64;
                2.0 * p * r / (p + r)
            }
        };
        assert!((f1_result_set(&predicted, &gold) - expected).abs() < TOL);
    }
}

#[test]
fn ndcg_matches_definition_oracle() {
    let mut rng = rng();
    for _ in 0..INSTANCES {
        let len = rng.gen_range(1..10);
        let gains: Vec<f64> = (0..len).map(|_| rng.gen_range(0..4) as f64).collect();

        // Oracle: explicit DCG sums over the given and the ideal order.
        let dcg: f64 = gains
            .iter()
            .enumerate()
            .map(|(i, g)| g / ((i as f64) + 2.0).log2())
            .sum();
        let mut sorted = gains.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let idcg: f64 = sorted
            .iter()
            .enumerate()
            .map(|(i, g)| g / ((i as f64) + 2.0).log2())
            .sum();
        let expected = if idcg == 0.0 { 0.0 } else { dcg / idcg };

        assert!((ndcg(&gains) - expected).abs() < TOL);
    }
}

#[test]
fn recall_at_n_matches_scan_oracle() {
    let mut rng = rng();
    for _ in 0..INSTANCES {
        let ranked: Vec<String> =
            (0..rng.gen_range(0..40)).map(|_| format!("id{}", rng.gen_range(0..30))).collect();
        let gold = random_id_set(&mut rng, 30, 6);
        let n = rng.gen_range(1..35);

        let expected = if gold.is_empty() {
            0.0
        } else {
            let mut found = 0usize;
            for (i, id) in ranked.iter().enumerate() {
                if i < n && gold.contains(id) {
                    found += 1;
                }
            }
            found as f64 / gold.len() as f64
        };
        assert!((recall_at_n(&ranked, &gold, n) - expected).abs() < TOL);
    }
}

#[test]
fn estimated_recall_matches_scan_oracle() {
    let mut rng = rng();
    for _ in 0..INSTANCES {
        let items: Vec<(String, f64)> = (0..rng.gen_range(0..30))
            .map(|i| (format!("p{i}"), if rng.gen_bool(0.4) { 1.0 } else { 0.0 }))
            .collect();
        let k = rng.gen_range(1..40);
        let ranking = JudgedRanking { items: items.clone(), gold: BTreeSet::new(), estimated_set_size: k };

        let mut found = 0usize;
        for (i, (_, g)) in items.iter().enumerate() {
            if i < k && *g > 0.0 {
                found += 1;
            }
        }
        let expected = (found as f64 / k as f64).min(1.0);
        assert!((estimated_recall_at_k(&ranking) - expected).abs() < TOL);
    }
}

#[test]
fn harmonic_and_hms_match_formula_oracle() {
    let mut rng = rng();
    for _ in 0..INSTANCES {
        let a: f64 = rng.gen_range(0..=10) as f64 / 10.0;
        let b: f64 = rng.gen_range(0..=10) as f64 / 10.0;
        let expected = if a == 0.0 || b == 0.0 { 0.0 } else { 2.0 / (1.0 / a + 1.0 / b) };
        assert!((harmonic_mean(a, b) - expected).abs() < TOL);

        let c: f64 = rng.gen_range(0..=10) as f64 / 10.0;
        assert!((hypothesis_matching_score(a, b, c).unwrap() - a * b * c).abs() < TOL);
    }
}

#[test]
fn coverage_matches_weighted_sum_oracle() {
    let mut rng = rng();
    for _ in 0..INSTANCES {
        let items: Vec<CoverageItem> = (0..rng.gen_range(1..10))
            .map(|_| CoverageItem {
                importance: if rng.gen_bool(0.5) {
                    Importance::AnswerCritical
                } else {
                    Importance::Valuable
                },
                score: rng.gen_range(0..=2),
            })
            .collect();

        let facets = sqa_facets(
            &[ClaimJudgment {
                recall: ClaimRecallGrade::FullWithQuote,
                citations: vec![CitationGrade::SupportWithQuote],
            }],
            &[true],
            &items,
        )
        .unwrap();

        let mut num = 0.0;
        let mut den = 0.0;
        for item in &items {
            let w = match item.importance {
                Importance::AnswerCritical => 2.0,
                Importance::Valuable => 1.0,
            };
            num += w * item.score as f64 / 2.0;
            den += w;
        }
        assert!((facets.answer_coverage - num / den).abs() < TOL);
    }
}

#[test]
fn pareto_matches_quadratic_dominance_oracle() {
    let mut rng = rng();
    for _ in 0..INSTANCES {
        let points: Vec<ScoreCost> = (0..rng.gen_range(0..20))
            .map(|_| ScoreCost {
                score: rng.gen_range(0..100) as f64,
                cost: rng.gen_range(0..100) as f64 / 10.0,
            })
            .collect();

        let mut expected: Vec<usize> = Vec::new();
        for i in 0..points.len() {
            let mut dominated = false;
            for j in 0..points.len() {
                let (p, q) = (points[i], points[j]);
                if q.score >= p.score
                    && q.cost <= p.cost
                    && (q.score > p.score || q.cost < p.cost)
                {
                    dominated = true;
                    break;
                }
            }
            if !dominated {
                expected.push(i);
            }
        }
        expected.sort_by(|&a, &b| {
            points[a]
                .cost
                .partial_cmp(&points[b].cost)
                .unwrap()
                .then(points[a].score.partial_cmp(&points[b].score).unwrap())
                .then(a.cmp(&b))
        });

        assert_eq!(pareto_frontier_indices(&points), expected);
    }
}

#[test]
fn pareto_large_instance_matches_oracle() {
    let mut rng = rng();
    let points: Vec<ScoreCost> = (0..10_000)
        .map(|_| ScoreCost {
            score: rng.gen_range(0..10_000) as f64,
            cost: rng.gen_range(0..10_000) as f64,
        })
        .collect();
    let frontier = pareto_frontier_indices(&points);
    for &i in &frontier {
        assert!(!points.iter().any(|q| q.dominates(&points[i])));
    }
    for i in 0..points.len() {
        if !frontier.contains(&i) {
            assert!(points.iter().any(|q| q.dominates(&points[i])));
        }
    }
}

#[test]
fn ci_matches_hand_formula() {
    let mut rng = rng();
    for _ in 0..INSTANCES {
        let samples: Vec<f64> =
            (0..rng.gen_range(2..30)).map(|_| rng.gen_range(0..=1) as f64).collect();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var: f64 = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
        let expected = 1.96 * (var / n).sqrt();
        assert!((confidence_interval(&samples).unwrap() - expected).abs() < TOL);
    }
}
