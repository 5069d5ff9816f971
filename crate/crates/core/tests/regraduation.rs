use sumrule::regrad::{
    solve_associativity, verify_regraduation, OperatorSample, SolverConfig, BUILTIN_OPERATORS,
};

fn solve(name: &str, unit: f64) -> sumrule::regrad::Regraduation<f64> {
    let op = OperatorSample::<f64>::builtin(name).unwrap();
    solve_associativity(&op, &SolverConfig::new(unit)).unwrap()
}

#[test]
fn changing_the_unit_only_rescales() {
    for name in BUILTIN_OPERATORS {
        let op = OperatorSample::<f64>::builtin(name).unwrap();
        let (u, v) = (op.domain.hi, 0.6 * op.domain.hi);
        let (f, g) = (solve(name, u), solve(name, v));
        let scale = f.eval(v).unwrap();
        for x in op.domain.grid(97).into_iter().skip(1) {
            let (fx, gx) = (f.eval(x).unwrap(), g.eval(x).unwrap());
            assert!(
                (gx * scale / fx - 1.0).abs() <= 1e-5,
                "{name} at {x}: {fx} vs {gx}"
            );
        }
    }
}

#[test]
fn inverse_undoes_eval() {
    let f = solve("odds", 3.0);
    for x in [0.0, 0.01, 0.5, 1.0, 2.9, 7.5] {
        let y = f.eval(x).unwrap();
        assert!((f.inverse(y).unwrap() - x).abs() <= 1e-9, "{x}");
    }
}

#[test]
fn finer_grids_still_certify() {
    let op = OperatorSample::<f64>::builtin("pythagorean").unwrap();
    let f = solve("pythagorean", 2.0);
    for grid in [16, 64, 200] {
        let audit = verify_regraduation(&op, &f, grid, 1e-6);
        assert!(audit.passed, "{grid}: {audit:?}");
        assert!(audit.pairs_checked >= grid);
    }
}

#[test]
fn csv_lists_every_knot() {
    let f = solve("add", 1.0);
    let csv = f.to_csv();
    assert_eq!(csv.lines().count(), f.knots().len() + 1);
    assert!(csv.starts_with("x,f\n"));
}
