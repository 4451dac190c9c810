use proptest::prelude::*;
use statbandit::bandit::{
    exploration_budget, rank_arms, Bandit, BanditConfig, Phase, RewardLedger, Strategy as Policy,
};

/// Random ledger: each row records a random subset of arms.
fn ledger_rows(k: usize) -> impl Strategy<Value = Vec<Vec<Option<f64>>>> {
    prop::collection::vec(
        prop::collection::vec(prop::option::of(-1.0f64..=0.0), k),
        1..60,
    )
}

fn build(k: usize, rows: &[Vec<Option<f64>>]) -> RewardLedger {
    let mut l = RewardLedger::new(k);
    for (i, row) in rows.iter().enumerate() {
        let rewards: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter_map(|(a, r)| r.map(|r| (a, r)))
            .collect();
        let selected = rewards.first().map_or(0, |&(a, _)| a);
        l.record(i, selected, Phase::Exploration, &rewards).unwrap();
    }
    l
}

fn batch_means(k: usize, rows: &[Vec<Option<f64>>]) -> Vec<Option<f64>> {
    (0..k)
        .map(|a| {
            let col: Vec<f64> = rows.iter().filter_map(|r| r[a]).collect();
            (!col.is_empty()).then(|| col.iter().sum::<f64>() / col.len() as f64)
        })
        .collect()
}

proptest! {
    #[test]
    fn running_means_match_batch_means(rows in ledger_rows(6)) {
        let l = build(6, &rows);
        for (got, want) in l.means().iter().zip(batch_means(6, &rows)) {
            match (got, want) {
                (Some(g), Some(w)) => prop_assert!((g - w).abs() <= 1e-12),
                (None, None) => {}
                other => prop_assert!(false, "mismatch {:?}", other),
            }
        }
    }

    #[test]
    fn ranking_matches_sort_oracle(rows in ledger_rows(7)) {
        let l = build(7, &rows);
        prop_assume!(l.total_pulls() > 0);
        let ranked: Vec<usize> = rank_arms(&l).unwrap().iter().map(|r| r.arm).collect();
        let means = batch_means(7, &rows);
        let counts: Vec<usize> = (0..7).map(|a| rows.iter().filter(|r| r[a].is_some()).count()).collect();
        let mut oracle: Vec<usize> = (0..7).collect();
        oracle.sort_by(|&a, &b| {
            let key = |x: usize| (means[x].is_none(), means[x].map(|m| -m).unwrap_or(0.0));
            let (na, ma) = key(a);
            let (nb, mb) = key(b);
            na.cmp(&nb)
                .then(ma.partial_cmp(&mb).unwrap())
                .then(counts[b].cmp(&counts[a]))
                .then(a.cmp(&b))
        });
        // running sums can differ from batch sums in the last bit; only
        // compare when adjacent means are clearly separated
        let separated = oracle.windows(2).all(|w| match (means[w[0]], means[w[1]]) {
            (Some(x), Some(y)) => x == y || (x - y).abs() > 1e-9,
            _ => true,
        });
        if separated {
            prop_assert_eq!(ranked, oracle);
        }
    }

    #[test]
    fn greedy_choice_ignores_positive_scaling(rows in ledger_rows(5), a in 0.01f64..1.0) {
        let scaled: Vec<Vec<Option<f64>>> =
            rows.iter().map(|r| r.iter().map(|x| x.map(|v| a * v)).collect()).collect();
        let l1 = build(5, &rows);
        let l2 = build(5, &scaled);
        let m = batch_means(5, &rows);
        let mut vals: Vec<f64> = m.iter().flatten().copied().collect();
        vals.sort_by(|x, y| y.total_cmp(x));
        if vals.len() < 2 || vals[0] - vals[1] > 1e-9 {
            prop_assert_eq!(l1.greedy_arm(), l2.greedy_arm());
        }
    }

    #[test]
    fn csv_round_trip(rows in ledger_rows(4)) {
        let l = build(4, &rows);
        let mut buf = Vec::new();
        l.write_csv(&mut buf).unwrap();
        let back = RewardLedger::read_csv(4, buf.as_slice()).unwrap();
        // rows with no rewards produce no CSV lines
        let nonempty: Vec<_> = l.rows().iter().filter(|r| !r.rewards.is_empty()).cloned().collect();
        prop_assert_eq!(back.rows(), nonempty.as_slice());
    }

    #[test]
    fn epsilon_first_phase_boundary(eps in 0.0f64..=1.0, n in 1usize..200, k in 2usize..12, seed in any::<u64>()) {
        let budget = exploration_budget(eps, n);
        let x = eps * n as f64;
        prop_assert!(budget as f64 >= x - 1e-9 && (budget as f64) < x + 1.0);
        let cfg = BanditConfig { strategy: Policy::EpsilonFirst, epsilon: eps, exploration_budget: budget, seed, record_all: true };
        let mut b = Bandit::new(cfg, k).unwrap();
        let mut l = RewardLedger::new(k);
        for it in 0..n + 5 {
            if it == budget && budget == 0 {
                prop_assert!(b.select(&l, it).is_err());
                break;
            }
            let s = b.select(&l, it).unwrap();
            if it < budget {
                prop_assert_eq!(s.phase, Phase::Exploration);
                let row: Vec<(usize, f64)> = (0..k).map(|a| (a, -(((a * 7 + it) % 10) as f64) / 10.0)).collect();
                l.record(it, s.arm, s.phase, &row).unwrap();
            } else {
                prop_assert_eq!(s.phase, Phase::Exploitation);
                prop_assert_eq!(Some(s.arm), l.greedy_arm());
                l.record(it, s.arm, s.phase, &[(s.arm, -0.5)]).unwrap();
            }
        }
    }
}

#[test]
fn out_of_range_reward_is_a_contract_error() {
    let mut l = RewardLedger::new(3);
    assert!(l.record(0, 0, Phase::Exploration, &[(0, 0.5)]).is_err());
    assert!(l.record(0, 0, Phase::Exploration, &[(1, -1.5)]).is_err());
    assert!(l
        .record(0, 0, Phase::Exploration, &[(1, f64::NAN)])
        .is_err());
    assert_eq!(l.total_pulls(), 0);
}

#[test]
fn greedy_strategies_start_by_exploring() {
    for strategy in [Policy::EpsilonGreedy, Policy::EpsilonDecreasing] {
        let cfg = BanditConfig::new(strategy, 0.0, 10).unwrap();
        let mut b = Bandit::new(cfg, 4).unwrap();
        let l = RewardLedger::new(4);
        let s = b.select(&l, 0).unwrap();
        assert!(s.arm < 4);
    }
}
