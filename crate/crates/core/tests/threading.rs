//! Operators are pure functions over immutable values; concurrent
//! applications over a shared input must agree with the sequential results.

use std::thread;

use discfrac::{apply, run_check, Family, Formulation, GridFunction, Kind, OperatorSpec, Side};

#[test]
fn concurrent_applications_match_sequential() {
    let f = GridFunction::new(0.0, (0..64).map(|i| (0.3 * i as f64).sin()).collect()).unwrap();
    let specs: Vec<OperatorSpec> = [Family::Delta, Family::Nabla]
        .into_iter()
        .flat_map(|family| {
            [Side::Left, Side::Right].into_iter().flat_map(move |side| {
                [Kind::Sum, Kind::Difference]
                    .into_iter()
                    .flat_map(move |kind| {
                        [Formulation::Riemann, Formulation::Binomial]
                            .into_iter()
                            .map(move |formulation| (family, side, kind, formulation))
                    })
            })
        })
        .map(|(family, side, kind, formulation)| {
            let anchor = match side {
                Side::Left => f.origin(),
                Side::Right => f.end(),
            };
            OperatorSpec::new(family, side, kind, formulation, 0.65, anchor).unwrap()
        })
        .collect();

    let sequential: Vec<GridFunction> = specs.iter().map(|s| apply(s, &f).unwrap()).collect();

    let concurrent: Vec<GridFunction> = thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|s| scope.spawn(|| apply(s, &f).unwrap()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    assert_eq!(sequential, concurrent);

    // verification checks are independent across threads as well
    let reports = thread::scope(|scope| {
        let a = scope.spawn(|| run_check("thm2.5-1", 5).unwrap());
        let b = scope.spawn(|| run_check("eq23", 5).unwrap());
        (a.join().unwrap(), b.join().unwrap())
    });
    assert_eq!(
        reports.0.to_json_line(),
        run_check("thm2.5-1", 5).unwrap().to_json_line()
    );
    assert_eq!(
        reports.1.to_json_line(),
        run_check("eq23", 5).unwrap().to_json_line()
    );
}
