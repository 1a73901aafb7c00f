use super::*;
use crate::generators::gen_cycle7_family;
use crate::solver::principal_line;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn triangle() -> Instance {
    Instance::new(vec![1, 2, 4], vec![(0, 1), (1, 2), (0, 2)]).unwrap()
}

/// Walks each principal line through the forest and checks that every node on
/// it records the line's mover and, at Second nodes, the line's move.
fn assert_consistent(instance: &Instance, policy: TiePolicy) {
    let forest = extract_forest(instance, policy).unwrap();
    for a in instance.all_vertices() {
        let line = principal_line(instance, policy, a).unwrap();
        let mut node = forest.roots[a];
        for &(who, v) in &line[1..] {
            let here = &forest.nodes[node];
            assert_eq!(here.mover, Some(who), "mover at {:?}", here.state);
            let &(_, child) = here
                .children
                .iter()
                .find(|&&(u, _)| u == v)
                .unwrap_or_else(|| panic!("line move {v} missing at {:?}", here.state));
            node = child;
        }
        assert!(forest.nodes[node].children.is_empty());
    }
}

#[test]
fn shapes_parse() {
    assert_eq!(parse_shapes("cycle7").unwrap()[0].edges.len(), 7);
    assert_eq!(parse_shapes("cycle:4").unwrap()[0].vertex_count, 4);
    assert_eq!(parse_shapes("edge").unwrap()[0].edges, vec![(0, 1)]);
    let trees = parse_shapes("tree-enum:5").unwrap();
    assert_eq!(trees.len(), 3);
    assert_eq!(trees[2].name, "tree:5#2");
    for bad in ["cycle:0", "tree-enum:x", "star", "tree-enum:40"] {
        assert!(parse_shapes(bad).is_err(), "{bad}");
    }
}

#[test]
fn single_edge_forest_and_lp() {
    let inst = Instance::new(vec![3, 5], vec![(0, 1)]).unwrap();
    let forest = extract_forest(&inst, TiePolicy::ForbidTies).unwrap();
    assert_eq!(forest.roots.len(), 2);
    assert_eq!(forest.nodes.len(), 4);
    assert_eq!(forest.leaf_count(), 2);
    for &r in &forest.roots {
        assert_eq!(forest.nodes[r].mover, Some(Player::Second));
        assert_eq!(forest.nodes[r].children.len(), 1);
    }
    forest.validate(&inst).unwrap();

    // leaves bound w0 and w1 separately, so the optimum splits evenly
    let lp = lp_minimize(&forest, &default_floor(), &default_margin()).unwrap();
    assert_eq!(lp.t, q(1, 2));
    assert_eq!(lp.weights, vec![q(1, 2), q(1, 2)]);
}

#[test]
fn contradictory_annotations_are_infeasible() {
    let inst = Instance::new(vec![3, 5], vec![(0, 1)]).unwrap();
    let mut forest = extract_forest(&inst, TiePolicy::ForbidTies).unwrap();
    // the opening at 0 is annotated Second; add a copy that claims First moves
    let leaf = forest.nodes.len();
    forest.nodes.push(ForestNode {
        state: GameState::new(VertexSet::singleton(0).with(1), VertexSet::EMPTY),
        mover: None,
        tie: false,
        children: Vec::new(),
    });
    forest.nodes.push(ForestNode {
        state: GameState::opening(0),
        mover: Some(Player::First),
        tie: false,
        children: vec![(1, leaf)],
    });
    assert_eq!(
        lp_minimize(&forest, &default_floor(), &default_margin()),
        Err(AdversaryError::Infeasible)
    );
}

#[test]
fn lp_rejects_bad_parameters() {
    let inst = Instance::new(vec![3, 5], vec![(0, 1)]).unwrap();
    let forest = extract_forest(&inst, TiePolicy::ForbidTies).unwrap();
    assert!(matches!(
        lp_minimize(&forest, &q(0, 1), &default_margin()),
        Err(AdversaryError::InvalidForest(_))
    ));
    assert!(matches!(
        lp_minimize(&forest, &default_floor(), &q(-1, 5)),
        Err(AdversaryError::InvalidForest(_))
    ));
    // floors alone exceed the unit budget
    assert_eq!(
        lp_minimize(&forest, &q(2, 3), &default_margin()),
        Err(AdversaryError::Infeasible)
    );
}

#[test]
fn triangle_reply_and_validation() {
    let inst = triangle();
    let forest = extract_forest(&inst, TiePolicy::ForbidTies).unwrap();
    let root = &forest.nodes[forest.roots[0]];
    assert_eq!(root.mover, Some(Player::Second));
    assert_eq!(root.children.iter().map(|c| c.0).collect::<Vec<_>>(), vec![2]);
    forest.validate(&inst).unwrap();

    let mut broken = forest.clone();
    let first_node = broken
        .nodes
        .iter()
        .position(|n| n.mover == Some(Player::First))
        .expect("First moves somewhere");
    broken.nodes[first_node].children.pop();
    assert!(matches!(
        broken.validate(&inst),
        Err(AdversaryError::InvalidForest(_))
    ));

    let mut wrong_root = forest.clone();
    wrong_root.roots.swap(0, 1);
    assert!(wrong_root.validate(&inst).is_err());
    assert!(forest.validate(&Instance::new(vec![1, 1], vec![(0, 1)]).unwrap()).is_err());
}

#[test]
fn cycle7_forest_and_lp_bound() {
    let inst = gen_cycle7_family(1000).unwrap();
    let forest = extract_forest(&inst, TiePolicy::ForbidTies).unwrap();
    forest.validate(&inst).unwrap();
    // opening at d: Second answers with e
    let root = &forest.nodes[forest.roots[3]];
    assert_eq!(root.children.iter().map(|c| c.0).collect::<Vec<_>>(), vec![4]);

    // the family weights themselves satisfy every row, so the LP does no worse
    let lp = lp_minimize(&forest, &default_floor(), &default_margin()).unwrap();
    assert!(lp.t <= q(1069, 3095), "t = {}", lp.t);
    assert!(lp.t > q(1, 3));
    assert_eq!(lp.weights.iter().cloned().sum::<Rational>(), q(1, 1));
    assert!(lp.constraint_count > 0);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let shape = GraphShape::cycle(7);
    let (certified, report) = certify(&shape, &lp.weights, TiePolicy::ForbidTies, &mut rng).unwrap();
    assert_eq!(solve(&certified, TiePolicy::ForbidTies).unwrap().value, report.value);
    assert!(to_f64(&report.value) < 0.334);
}

#[test]
fn forest_matches_principal_lines() {
    assert_consistent(&triangle(), TiePolicy::ForbidTies);
    assert_consistent(&gen_cycle7_family(1000).unwrap(), TiePolicy::ForbidTies);
    let path = Instance::new(vec![4, 4, 1, 4], vec![(0, 1), (1, 2), (2, 3)]).unwrap();
    for policy in [TiePolicy::FirstMoves, TiePolicy::SecondMoves] {
        assert_consistent(&path, policy);
        let forest = extract_forest(&path, policy).unwrap();
        assert!(forest.nodes.iter().any(|n| n.tie));
    }
    assert!(extract_forest(&path, TiePolicy::ForbidTies).unwrap_err().is_tie());
}

#[test]
fn integer_weights_scale_exactly_or_round() {
    assert_eq!(integer_weights(&[q(1, 3), q(2, 3)], None), vec![1, 2]);
    assert_eq!(integer_weights(&[q(1, 2), q(1, 4), q(1, 4)], None), vec![2, 1, 1]);
    // common denominator above the scale: rounded onto INTEGER_SCALE units
    let (a, b) = (q(1, 999_999_937), q(1, 999_999_929));
    let rest = q(1, 1) - &a - &b;
    let rounded = integer_weights(&[a, b, rest], None);
    assert_eq!(rounded[0], 1_000_000);
    assert_eq!(rounded[1], 1_000_000);
    assert!(rounded[2].abs_diff(INTEGER_SCALE - 2_000_000) <= 1);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let jittered = integer_weights(&[q(1, 2), q(1, 2)], Some(&mut rng));
    for w in jittered {
        assert!((INTEGER_SCALE / 2..INTEGER_SCALE / 2 + JITTER).contains(&w));
    }
}

#[test]
fn single_vertex_is_worth_everything() {
    let shape = GraphShape::new("point", 1, Vec::new());
    let hill = hill_climb(&shape, TiePolicy::ForbidTies, 0, 100).unwrap();
    assert_eq!(hill.value, Fraction::new(1, 1));
    let alt = alternate_optimize(&shape, TiePolicy::ForbidTies, &AltConfig::default()).unwrap();
    assert_eq!(alt.value, Fraction::new(1, 1));
}

#[test]
fn edge_approaches_one_half() {
    let config = AltConfig {
        screen: 50,
        restarts: 2,
        ..AltConfig::default()
    };
    let alt = alternate_optimize(&GraphShape::edge(), TiePolicy::ForbidTies, &config).unwrap();
    let v = to_f64(&alt.value);
    assert!((0.5..0.5 + 1e-9).contains(&v), "alt value {v}");

    let hill = hill_climb(&GraphShape::edge(), TiePolicy::ForbidTies, 3, 4_000).unwrap();
    let v = to_f64(&hill.value);
    assert!((0.5..0.51).contains(&v), "hill value {v}");
}

#[test]
fn results_are_certified_and_traces_monotone() {
    let shape = GraphShape::cycle(5);
    let config = AltConfig {
        screen: 200,
        restarts: 3,
        seed: 11,
        ..AltConfig::default()
    };
    let alt = alternate_optimize(&shape, TiePolicy::ForbidTies, &config).unwrap();
    assert_eq!(solve(&alt.instance, TiePolicy::ForbidTies).unwrap().value, alt.value);
    assert_eq!(alt.stops.len(), 3);
    assert!(!alt.trace.is_empty());
    for pair in alt.trace.windows(2) {
        assert!(pair[1].best <= pair[0].best);
    }
    assert_eq!(alt.trace.last().unwrap().best, alt.value);
    assert_consistent(&alt.instance, TiePolicy::ForbidTies);

    let hill = hill_climb(&shape, TiePolicy::ForbidTies, 11, 2_000).unwrap();
    assert_eq!(solve(&hill.instance, TiePolicy::ForbidTies).unwrap().value, hill.value);
    for pair in hill.trace.windows(2) {
        assert!(pair[1].value < pair[0].value);
    }
}

#[test]
fn searches_are_deterministic() {
    let shapes = parse_shapes("tree-enum:4").unwrap();
    for method in [Method::Alternate, Method::HillClimb] {
        let a = search_shapes(&shapes, TiePolicy::FirstMoves, method, 5, 20).unwrap();
        let b = search_shapes(&shapes, TiePolicy::FirstMoves, method, 5, 20).unwrap();
        assert_eq!(a, b);
        let text = a.render(method, TiePolicy::FirstMoves, 5);
        assert!(text.contains("shapes_searched=2\n"));
        assert!(text.contains(&format!("value={}\n", format_fraction(&a.outcome.value))));
    }
}

#[test]
fn size_caps() {
    let big = GraphShape::cycle(ALTERNATE_VERTEX_CAP + 1);
    assert!(matches!(
        alternate_optimize(&big, TiePolicy::ForbidTies, &AltConfig::default()),
        Err(AdversaryError::ShapeTooLarge { .. })
    ));
    let bigger = GraphShape::cycle(HILL_VERTEX_CAP + 1);
    assert!(matches!(
        hill_climb(&bigger, TiePolicy::ForbidTies, 0, 10),
        Err(AdversaryError::ShapeTooLarge { .. })
    ));
}
