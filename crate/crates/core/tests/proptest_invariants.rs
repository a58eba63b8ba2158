//! Property tests over generated laws and step functions.

use hardy_core::{decreasing_rearrangement, Atom, Distribution, Segment, StepFunction};
use proptest::prelude::*;

/// Builds a valid mixed law from raw knobs: component kinds, gaps, lengths
/// and weights. Masses are normalized to sum to 1 exactly.
fn law_strategy() -> impl Strategy<Value = Distribution> {
    let component = (any::<bool>(), 0.05f64..1.0, 0.1f64..1.5, 0.05f64..1.0);
    proptest::collection::vec(component, 1..8).prop_map(|parts| {
        let total: f64 = parts.iter().map(|p| p.3).sum();
        let mut atoms = Vec::new();
        let mut segments = Vec::new();
        let mut cursor = 0.0;
        let mut masses: Vec<f64> = parts.iter().map(|p| p.3 / total).collect();
        let partial: f64 = masses[..masses.len() - 1].iter().sum();
        let last = masses.len() - 1;
        masses[last] = 1.0 - partial;
        for ((is_atom, gap, len, _), mass) in parts.iter().zip(masses) {
            cursor += gap;
            if *is_atom {
                atoms.push(Atom { x: cursor, mass });
            } else {
                segments.push(Segment {
                    lo: cursor,
                    hi: cursor + len,
                    mass,
                });
                cursor += len;
            }
        }
        Distribution::new(atoms, segments).expect("strategy builds valid laws")
    })
}

fn step_strategy() -> impl Strategy<Value = StepFunction> {
    (
        proptest::collection::vec(0.0f64..1.0, 0..6),
        proptest::collection::vec(0.0f64..10.0, 7),
    )
        .prop_map(|(mut bps, values)| {
            bps.sort_by(|a, b| a.total_cmp(b));
            bps.dedup();
            let values = values[..bps.len() + 1].to_vec();
            StepFunction::new(bps, values).expect("sorted deduped breakpoints are valid")
        })
}

proptest! {
    #[test]
    fn galois_inequalities_hold(d in law_strategy(), u in 1e-9f64..1.0) {
        let q = d.quantile(u).unwrap();
        prop_assert!(d.cdf(q) >= u - 1e-12);
        prop_assert!(d.cdf_left(q) <= u + 1e-12);
    }

    #[test]
    fn cdf_is_monotone(d in law_strategy(), a in -2.0f64..12.0, b in -2.0f64..12.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(d.cdf(lo) <= d.cdf(hi) + 1e-15);
        prop_assert!(d.cdf_left(lo) <= d.cdf(lo));
    }

    #[test]
    fn rearrangement_preserves_norms_and_orders(chi in step_strategy()) {
        let re = decreasing_rearrangement(&chi).unwrap();
        prop_assert!(re.values().windows(2).all(|w| w[0] >= w[1]));
        let u01 = Distribution::new(
            vec![],
            vec![Segment { lo: 0.0, hi: 1.0, mass: 1.0 }],
        )
        .unwrap();
        for p in [0.5, 1.0, 2.0, 3.5] {
            let before = u01.moment_abs_pow(&chi, p);
            let after = u01.moment_abs_pow(&re, p);
            prop_assert!((before - after).abs() <= 1e-10 * before.max(1.0));
        }
    }

    #[test]
    fn distribution_json_round_trips(d in law_strategy()) {
        let text = serde_json::to_string(&d).unwrap();
        let back = Distribution::from_json_str(&text).unwrap();
        prop_assert_eq!(d, back);
    }
}
