mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use hypspec_core::geometry::*;
use proptest::prelude::*;

use common::{apply_to_i, mul, right_angled_walk_defect, rotate, translate, uhp_distance};

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

#[test]
fn hexagon_closes_in_the_half_plane() {
    for ls in [[1.0, 1.0, 1.0], [1.0, 1.0, 2.0], [0.05, 0.05, 0.05], [0.3, 4.0, 2.5]] {
        let h = hexagons_from_pants(ls[0], ls[1], ls[2]).unwrap();
        assert!(right_angled_walk_defect(&h.sides()) < 1e-9, "{ls:?}");
        // a wrong opposite side must not close
        let mut bad = h.sides();
        bad[1] *= 1.01;
        assert!(right_angled_walk_defect(&bad) > 1e-4);
    }
    let h = hexagons_from_pants(1.0, 1.0, 1.0).unwrap();
    let oracle = (0.5f64.cosh() / (0.5f64.cosh() - 1.0)).acosh();
    assert!((h.b[0] - oracle).abs() < 1e-12);
    assert!((oracle - 2.8687).abs() < 1e-4);
    let h = hexagons_from_pants(1.0, 1.0, 2.0).unwrap();
    assert!((h.b[0] - h.b[2]).abs() > 1e-3);
    assert!(h.relation_residuals().iter().all(|r| *r < 1e-10));
}

#[test]
fn half_plane_walk_measures_its_sides() {
    let sides = hexagons_from_pants(0.7, 1.1, 1.9).unwrap().sides();
    let mut g = [[1.0, 0.0], [0.0, 1.0]];
    let mut prev = apply_to_i(&g);
    for s in sides {
        g = mul(&g, &translate(s));
        let here = apply_to_i(&g);
        assert!((uhp_distance(prev, here) - s).abs() < 1e-10);
        g = mul(&g, &rotate(PI / 2.0));
        prev = here;
    }
}

#[test]
fn inequality_chain_of_cover_orders() {
    for l in log_grid(1e-3, 10.0, 400) {
        let s = (l / 2.0).sinh();
        let lhs = l * l.exp() / (2.0 * s);
        let rhs = 2.0 * l / (s * (1.0 / s).asinh().powi(2));
        assert!(lhs > rhs, "l = {l}: {lhs} <= {rhs}");
        for eps in [0.05, 0.1, 0.25] {
            let c = randol_cover_order(l, eps, 4.0 * PI).unwrap();
            assert!(c.collar_bound <= c.displayed_bound);
        }
    }
}

#[test]
fn genus_order_dominates_curve_orders() {
    for g in 2u64..=5 {
        let area = 2.0 * PI * (2 * g - 2) as f64;
        let lmax = nonsep_length_bound(g).unwrap().sharp;
        for eps in [0.05, 0.1, 0.25] {
            let kg = randol_genus_order(g, eps).unwrap();
            for l in log_grid(1e-3, lmax, 200) {
                assert!(
                    kg >= randol_cover_order(l, eps, area).unwrap().k,
                    "g={g} eps={eps} l={l}"
                );
            }
        }
    }
}

#[test]
fn nonsep_bound_forms() {
    let b = nonsep_length_bound(2).unwrap();
    assert!((b.sharp - 2.0 * 3f64.acosh()).abs() < 1e-12);
    assert!((b.log_form - 2.0 * 6f64.ln()).abs() < 1e-12);
    assert!(b.log_form > b.sharp);
    assert!(nonsep_length_bound(3).unwrap().sharp > b.sharp);
}

#[test]
fn surface_files_round_trip() {
    let text = r#"{"blocks": [{"kind": "ThreeHoles", "lengths": [1, 1, 1]},
                              {"kind": "ThreeHoles", "lengths": [1, 1, 1]}],
                   "gluings": [{"from": [0, 1], "to": [1, 0], "twist": 0.25},
                               {"from": [1, 1], "to": [0, 0]},
                               {"from": [0, 2], "to": [1, 2]}]}"#;
    let s = FNSurface::from_json_str(text).unwrap();
    assert_eq!(s.euler_characteristic(), -2);
    let again = FNSurface::from_json_str(&s.to_json_string()).unwrap();
    assert_eq!(s, again);
    let mobius = r#"{"blocks": [{"kind": "mobius", "lengths": [1]}]}"#;
    assert!(FNSurface::from_json_str(mobius).is_err());
}

/// A connected surface from `nb` blocks: a spanning tree of gluings plus
/// `extra` further pairings of free hole slots, cusps on some slots.
fn random_surface(nb: usize, cusp_mask: u32, extra: usize, lengths: &[f64]) -> Option<FNSurface> {
    let mut lens = vec![[None; 3]; nb];
    let mut li = 0;
    let mut next_len = || {
        li += 1;
        lengths[li % lengths.len()]
    };
    let is_cusp = |b: usize, s: usize| b > 0 && s == 2 && cusp_mask & (1 << b) != 0;
    let mut free: Vec<SlotRef> = Vec::new();
    let mut pairs = Vec::new();
    for b in 0..nb {
        for s in 0..3 {
            if !is_cusp(b, s) {
                free.push(SlotRef::new(b, s));
            }
        }
    }
    // attach each block to an earlier one
    for b in 1..nb {
        let mine = SlotRef::new(b, 0);
        let pos = free.iter().position(|r| r.block < b && *r != mine)?;
        let other = free.remove(pos);
        free.retain(|r| *r != mine);
        pairs.push((other, mine));
    }
    for _ in 0..extra {
        if free.len() < 2 {
            break;
        }
        let a = free.remove(0);
        let b = free.remove(free.len() - 1);
        pairs.push((a, b));
    }
    for (a, b) in &pairs {
        let l = next_len();
        lens[a.block][a.slot] = Some(l);
        lens[b.block][b.slot] = Some(l);
    }
    for r in &free {
        lens[r.block][r.slot] = Some(next_len());
    }
    let blocks = lens
        .iter()
        .map(|l| PantsBlock::new(*l))
        .collect::<Result<Vec<_>, _>>()
        .ok()?;
    let gluings = pairs
        .into_iter()
        .map(|(from, to)| Gluing { from, to, twist: 0.0 })
        .collect();
    FNSurface::new(blocks, gluings, BTreeMap::new()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn collar_width_is_an_antitone_bijection(a in 1e-6f64..50.0, b in 1e-6f64..50.0) {
        prop_assume!((a - b).abs() > 1e-9 * a.max(b));
        let (wa, wb) = (collar_width(a).unwrap(), collar_width(b).unwrap());
        prop_assert!(wa > 0.0 && wb > 0.0);
        prop_assert_eq!(a < b, wa > wb);
        let back = hypspec_core::geometry::trig::length_for_collar_width(wa).unwrap();
        prop_assert!((back - a).abs() <= 1e-9 * a);
    }
}

proptest! {
    #[test]
    fn hexagon_relations_hold(l1 in 1e-3f64..20.0, l2 in 1e-3f64..20.0, l3 in 1e-3f64..20.0) {
        let h = hexagons_from_pants(l1, l2, l3).unwrap();
        for r in h.relation_residuals() {
            prop_assert!(r < 1e-10);
        }
    }

    #[test]
    fn systole_interval_is_ordered(g in 2u64..12, t in 0.001f64..1.0) {
        let sys = t * nonsep_length_bound(g).unwrap().sharp;
        let chi = 2 - 2 * g as i64;
        let area = -2.0 * PI * chi as f64;
        let (lo, hi) = analytic_systole_interval(sys, area, chi, -1.0).unwrap();
        prop_assert!(lo < hi);
        prop_assert!((lo - (0.25 + sys * sys / (4.0 * PI * PI * (chi * chi) as f64))).abs() < 1e-12);
    }

    #[test]
    fn euler_characteristic_counts_blocks(
        nb in 1usize..7,
        mask in 0u32..128,
        extra in 0usize..4,
        lengths in prop::collection::vec(0.1f64..3.0, 1..6),
    ) {
        if let Some(s) = random_surface(nb, mask, extra, &lengths) {
            prop_assert_eq!(s.euler_characteristic(), -(nb as i64));
            let sig = s.signature();
            let chi = euler_characteristic(sig.genus, sig.punctures, sig.holes, 0).unwrap();
            prop_assert_eq!(chi, -(nb as i64));
            prop_assert!((gauss_bonnet_area(&s) - 2.0 * PI * nb as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn buser_bound_is_increasing(a in 0.0f64..3.0, b in 0.0f64..3.0) {
        prop_assume!(a < b);
        prop_assert!(buser_rayleigh_bound(a).unwrap() < buser_rayleigh_bound(b).unwrap());
    }
}
