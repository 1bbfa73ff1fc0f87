use taut_core::error::TautError;
use taut_core::formal::{formal_cancellation, Source};

fn envelope() -> Vec<(u32, usize, usize)> {
    let mut out = Vec::new();
    for g in 0..=3u32 {
        for n in 1..=8usize {
            for m in 1..=2usize {
                if 2 * g as usize + n + m <= 8 && 2 * g as i64 - 2 + (n + m) as i64 > 0 {
                    out.push((g, n, m));
                }
            }
        }
    }
    out
}

#[test]
fn every_term_cancels_in_small_genus() {
    for (g, n, m) in envelope() {
        let dim = 3 * g as usize + n + m - 3;
        let c = formal_cancellation(g, n, m, dim).unwrap();
        assert!(c.ok(), "({g}, {n}, {m})");
        if m == 2 {
            assert!(c.residual.is_empty());
        }
        let paired: usize = c.pairs.len() * 2;
        let left: i64 = c.residual.iter().map(|r| r.1.abs()).sum();
        assert!(paired as i64 + left <= c.expanded as i64);
        println!("({g}, {n}, {m}): {} expanded, {} pairs, {} left", c.expanded, c.pairs.len(), c.residual.len());
    }
}

#[test]
fn pairs_match_the_expected_sources() {
    let c = formal_cancellation(1, 2, 1, 5).unwrap();
    for p in &c.pairs {
        let ok = matches!(
            (p.plus, p.minus),
            (Source::UpsilonPi, Source::HhhSolo)
                | (Source::HhhSolo, Source::UpsilonPi)
                | (Source::UpsilonD, Source::UpsilonExtraLevel)
                | (Source::UpsilonExtraLevel, Source::UpsilonD)
                | (Source::OmegaAGraft, Source::UpsilonExtraLevel)
                | (Source::UpsilonExtraLevel, Source::OmegaAGraft)
        );
        assert!(ok, "{:?}", p);
    }
    assert!(c.pairs.iter().any(|p| p.plus == Source::OmegaAGraft || p.minus == Source::OmegaAGraft));
}

#[test]
fn no_frozen_legs_is_rejected() {
    assert_eq!(formal_cancellation(1, 2, 0, 3).unwrap_err(), TautError::FrozenLegsRequired(0));
}
