//! Screen calculus: round trips, compatibility scalars, vanishing
//! constraints, and witnesses that the validators actually reject broken
//! data.

use fmlog::ratio::{qi, qr};
use fmlog::sample::Sampler;
use fmlog::screen::{screen_compose, screen_decompose, Covector, Screen};
use fmlog::sets::{Subset, Surjection};
use fmlog::verify::verify_screens;
use num_traits::Zero;
use proptest::prelude::*;
use std::collections::BTreeMap;

#[test]
fn screen_campaign_at_standard_scale() {
    for rep in verify_screens(150, 4, 3, 77) {
        assert!(rep.passed(), "{}: {:?}", rep.name, rep.failures());
    }
}

fn sample_composed(seed: u64) -> (Surjection, Screen) {
    let mut s = Sampler::derive(seed, "screen-tests");
    let q = Surjection::parse("1,1,2").unwrap();
    let outer = s.screen(q.codomain(), 2);
    let inners: Vec<Screen> = q
        .fibers()
        .into_iter()
        .map(|(_, f)| s.screen(f, 2))
        .collect();
    let composed = screen_compose(&q, &outer, &inners).unwrap();
    (q, composed)
}

#[test]
fn composed_screens_validate_and_vanish() {
    let (q, composed) = sample_composed(5);
    assert_eq!(composed.validate().unwrap(), None);
    assert!(composed.vanishing_satisfied(&q).unwrap());
}

#[test]
fn generic_screens_fail_the_vanishing_conditions() {
    let config = vec![
        (1, vec![qi(0), qi(0)]),
        (2, vec![qi(1), qi(0)]),
        (3, vec![qr(1, 2), qi(2)]),
    ];
    let screen = Screen::from_config(2, config).unwrap();
    let q = Surjection::parse("1,1,2").unwrap();
    assert!(!screen.vanishing_satisfied(&q).unwrap());
}

#[test]
fn tampering_breaks_validation() {
    let (_, composed) = sample_composed(5);
    // Corrupt the component of the full set: scale one entry.
    let full = composed.index_set();
    let mut components: Vec<(Subset, Covector)> = composed
        .components()
        .map(|(i, c)| (i, c.clone()))
        .collect();
    for (i, c) in &mut components {
        if *i == full {
            let key = *c.keys().next().unwrap();
            let entry = c.get_mut(&key).unwrap();
            *entry += qi(7);
            if entry.is_zero() {
                *entry = qi(1);
            }
        }
    }
    let map: BTreeMap<Subset, Covector> = components.into_iter().collect();
    let tampered = Screen::new(composed.dim(), full, map);
    match tampered {
        Err(_) => {}
        Ok(screen) => assert!(
            screen.validate().unwrap().is_some(),
            "corrupted screen should fail compatibility"
        ),
    }
}

#[test]
fn lambda_scalars_are_transitive_on_a_chain() {
    let mut s = Sampler::derive(11, "screen-chain");
    let q = Surjection::parse("1,1,1,2").unwrap();
    let outer = s.screen(q.codomain(), 1);
    let inners: Vec<Screen> = q
        .fibers()
        .into_iter()
        .map(|(_, f)| s.screen(f, 1))
        .collect();
    let composed = screen_compose(&q, &outer, &inners).unwrap();
    let inner = Subset::parse_key("1,2").unwrap();
    let mid = Subset::parse_key("1,2,3").unwrap();
    let full = composed.index_set();
    let l_im = composed.lambda(inner, mid).unwrap();
    let l_mf = composed.lambda(mid, full).unwrap();
    let l_if = composed.lambda(inner, full).unwrap();
    assert_eq!(l_if, l_im * l_mf);
}

proptest! {
    /// Compose/decompose round trips on random instances, any surjection.
    #[test]
    fn round_trip_random(seed in any::<u64>()) {
        let mut s = Sampler::derive(seed, "screen-roundtrip");
        let n = s.gen_range(2, 4);
        let d = s.gen_range(1, 3);
        let dom = Subset::range(n as u32).unwrap();
        let q = s.surjection(dom);
        let outer = s.screen(q.codomain(), d);
        let inners: Vec<Screen> = q
            .fibers()
            .into_iter()
            .map(|(_, f)| s.screen(f, d))
            .collect();
        let composed = screen_compose(&q, &outer, &inners).unwrap();
        let (o2, i2) = screen_decompose(&q, &composed).unwrap();
        prop_assert!(o2.components().eq(outer.components()));
        for (a, b) in i2.iter().zip(&inners) {
            prop_assert!(a.components().eq(b.components()));
        }
        let recomposed = screen_compose(&q, &o2, &i2).unwrap();
        prop_assert!(recomposed.components().eq(composed.components()));
    }

    /// The symmetric-group action is a group action: acting by sigma then
    /// tau equals acting by tau after sigma.
    #[test]
    fn sigma_action_composes(seed in any::<u64>()) {
        let mut s = Sampler::derive(seed, "screen-action");
        let set = Subset::range(3).unwrap();
        let screen = s.screen(set, 2);
        let sigma = s.permutation(set);
        let tau = s.permutation(set);
        let two_step = screen.sigma_act(&sigma).unwrap().sigma_act(&tau).unwrap();
        let one_step = screen.sigma_act(&tau.compose(&sigma).unwrap()).unwrap();
        prop_assert!(two_step.components().eq(one_step.components()));
    }
}
