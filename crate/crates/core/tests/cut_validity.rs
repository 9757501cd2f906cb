//! Generated cuts against enumeration of the mixed-integer set, and the
//! closed forms against the general builders.

mod common;

use common::{binary_context, context_on, knapsack_context, rng, same_cut, signed_instance};
use liftcut::concave_core::ConcaveFn;
use liftcut::cutgen::{
    knapsack_pack_cover_cuts, mir_closed_form, single_phase_cut, single_phase_is_facet,
    submodular_cut_closed_forms, two_phase_cut_i, two_phase_cut_ii, two_phase_i_is_facet,
    two_phase_ii_is_facet, SubmodularFamily,
};
use liftcut::lifting::{InstanceX, LiftContext};
use liftcut::polyoracle::{check_validity, face_dimension};
use liftcut::seed::Cut;

const TOL: f64 = 1e-9;

fn all_cuts(ctx: &LiftContext) -> Vec<(&'static str, Cut)> {
    vec![
        ("single", single_phase_cut(ctx)),
        ("two-i upper", two_phase_cut_i(ctx, false)),
        ("two-i exact", two_phase_cut_i(ctx, true)),
        ("two-ii upper", two_phase_cut_ii(ctx, false)),
        ("two-ii exact", two_phase_cut_ii(ctx, true)),
    ]
}

#[test]
fn every_cut_is_valid() {
    let mut r = rng(21);
    let mut failures = Vec::new();
    for case in 0..400 {
        let n = 1 + case % 4;
        let inst = signed_instance(&mut r, n, 3);
        let ctx = context_on(&mut r, &inst);
        for (name, cut) in all_cuts(&ctx) {
            let v = check_validity(&cut, &inst).unwrap();
            if !v.is_ok() {
                failures.push(format!("case {case} {name}: {v:?}"));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn exact_and_conditioned_cuts_are_facets() {
    let mut r = rng(22);
    let mut failures = Vec::new();
    let mut conditioned = 0;
    for case in 0..300 {
        let n = 1 + case % 4;
        let inst = signed_instance(&mut r, n, 3);
        let ctx = context_on(&mut r, &inst);
        let n = n as i64;
        let mut expect = Vec::new();
        if ctx.eta_exact_form().is_some() {
            expect.push(("two-i exact", two_phase_cut_i(&ctx, true)));
        }
        if ctx.phi_exact_form().is_some() {
            expect.push(("two-ii exact", two_phase_cut_ii(&ctx, true)));
        }
        if single_phase_is_facet(&ctx) {
            expect.push(("single", single_phase_cut(&ctx)));
        }
        if two_phase_i_is_facet(&ctx) {
            expect.push(("two-i upper", two_phase_cut_i(&ctx, false)));
        }
        if two_phase_ii_is_facet(&ctx) {
            expect.push(("two-ii upper", two_phase_cut_ii(&ctx, false)));
        }
        conditioned += expect.len();
        for (name, cut) in expect {
            let dim = face_dimension(&cut, &inst).unwrap();
            if dim != n {
                failures.push(format!("case {case} {name}: face dimension {dim}, want {n}"));
            }
        }
    }
    assert!(conditioned > 300, "too few facet cases: {conditioned}");
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn rounding_cut_is_the_single_phase_cut() {
    let mut r = rng(23);
    for case in 0..300 {
        let ctx = knapsack_context(&mut r, 4, 3);
        let mir = mir_closed_form(&ctx).unwrap();
        assert!(same_cut(&mir, &single_phase_cut(&ctx), TOL), "case {case}: {mir:?}");
    }
}

#[test]
fn pack_and_cover_are_the_two_phase_cuts() {
    let mut r = rng(24);
    for case in 0..300 {
        let ctx = knapsack_context(&mut r, 4, 3);
        let (pack, cover) = knapsack_pack_cover_cuts(&ctx).unwrap();
        let generic_i = two_phase_cut_i(&ctx, false);
        let generic_ii = two_phase_cut_ii(&ctx, false);
        assert!(same_cut(&pack, &generic_i, TOL), "case {case}: {pack:?} vs {generic_i:?}");
        assert!(same_cut(&cover, &generic_ii, TOL), "case {case}: {cover:?} vs {generic_ii:?}");
        assert!(check_validity(&pack, ctx.instance()).unwrap().is_ok());
        assert!(check_validity(&cover, ctx.instance()).unwrap().is_ok());
    }
}

#[test]
fn binary_forms_are_the_general_cuts() {
    let mut r = rng(25);
    for case in 0..300 {
        let ctx = binary_context(&mut r, 5);
        let single = submodular_cut_closed_forms(&ctx, SubmodularFamily::Single).unwrap();
        let one = submodular_cut_closed_forms(&ctx, SubmodularFamily::TwoI).unwrap();
        let two = submodular_cut_closed_forms(&ctx, SubmodularFamily::TwoII).unwrap();
        assert!(same_cut(&single, &single_phase_cut(&ctx), TOL), "case {case} single");
        assert!(same_cut(&one, &two_phase_cut_i(&ctx, true), TOL), "case {case} two-i");
        assert!(same_cut(&two, &two_phase_cut_ii(&ctx, true), TOL), "case {case} two-ii");
    }
}

/// At a binary point whose support is `S1` (seed off) the three binary
/// cuts are tight at `f(a'x)`.
#[test]
fn binary_forms_tight_on_fixed_support() {
    let mut r = rng(26);
    for _ in 0..200 {
        let ctx = binary_context(&mut r, 5);
        let inst = ctx.instance();
        let mut x = vec![0.0; inst.n()];
        for &i in ctx.s1() {
            x[i] = 1.0;
        }
        let x_orig: Vec<f64> = (0..inst.n())
            .map(|i| if inst.is_flipped(i) { 1.0 - x[i] } else { x[i] })
            .collect();
        let target = inst.f.eval(inst.a.iter().zip(&x).map(|(a, v)| a * v).sum());
        for fam in [SubmodularFamily::Single, SubmodularFamily::TwoI, SubmodularFamily::TwoII] {
            let cut = submodular_cut_closed_forms(&ctx, fam).unwrap();
            assert!((cut.rhs(&x_orig) - target).abs() < 1e-9);
        }
    }
}

#[test]
fn worked_binary_example_is_a_facet() {
    let inst = InstanceX::new(vec![1.0, 2.0, 2.0, 3.0], vec![1; 4], ConcaveFn::NegExp { c: 3.0 }).unwrap();
    let ctx = LiftContext::new(&inst, 0, 1, &[1, 2], &[3]).unwrap();
    let cut = single_phase_cut(&ctx);
    let step = 1.0 - (-1.0f64).exp();
    let want = [step, 2.0 * step, 2.0 * step, 3.0 * step];
    assert!((cut.alpha0 - (-1.0 - 3.0 * step)).abs() < 1e-12);
    for (got, want) in cut.alpha.iter().zip(want) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!(!single_phase_is_facet(&ctx));
    assert_eq!(face_dimension(&cut, &inst).unwrap(), 4);
}
