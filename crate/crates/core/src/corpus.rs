//! Small named groupoids and actions, plus a random generator of disjoint
//! unions of groups and pair groupoids.

use rand::Rng;

use crate::groupoid::{disjoint_union, FiniteGroupoid, GroupAction, Groupoid};

/// Pair groupoid (full equivalence relation) on the given points. The arrow
/// `(a,b)` has source `b` and range `a`. Units come first, then the
/// off-diagonal pairs in lexicographic order.
pub fn pair_groupoid(points: &[&str]) -> Groupoid {
    let k = points.len();
    let mut pairs: Vec<(usize, usize)> = (0..k).map(|i| (i, i)).collect();
    for a in 0..k {
        for b in 0..k {
            if a != b {
                pairs.push((a, b));
            }
        }
    }
    let n = pairs.len();
    let pos = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b)).unwrap();
    let mut table = vec![None; n * n];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for (j, &(c, d)) in pairs.iter().enumerate() {
            if b == c {
                table[i * n + j] = Some(pos(a, d));
            }
        }
    }
    FiniteGroupoid::from_parts(
        pairs.iter().map(|&(a, b)| format!("({},{})", points[a], points[b])).collect(),
        pairs.iter().map(|&(_, b)| pos(b, b)).collect(),
        pairs.iter().map(|&(a, _)| pos(a, a)).collect(),
        pairs.iter().map(|&(a, b)| pos(b, a)).collect(),
        table,
    )
    .expect("pair groupoid is valid")
}

fn cyclic_names(n: usize, generator: &str) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "e".to_owned(),
            1 => generator.to_owned(),
            _ => format!("{generator}{i}"),
        })
        .collect()
}

/// `ℤ/n` as a one-unit groupoid with elements `e, g, g2, …`.
pub fn cyclic_group_named(n: usize, generator: &str) -> Groupoid {
    assert!(n > 0);
    let mut table = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            table[i * n + j] = Some((i + j) % n);
        }
    }
    FiniteGroupoid::from_parts(cyclic_names(n, generator), vec![0; n], vec![0; n], (0..n).map(|i| (n - i) % n).collect(), table)
        .expect("cyclic group is valid")
}

/// `ℤ/n` with generator `a` for `n = 2`, `b` for `n = 3` and `g` otherwise.
pub fn cyclic_group(n: usize) -> Groupoid {
    let generator = match n {
        2 => "a",
        3 => "b",
        _ => "g",
    };
    cyclic_group_named(n, generator)
}

/// `n` units and no other arrows.
pub fn trivial_groupoid(n: usize) -> Groupoid {
    let mut table = vec![None; n * n];
    for i in 0..n {
        table[i * n + i] = Some(i);
    }
    FiniteGroupoid::from_parts(
        (0..n).map(|i| format!("x{i}")).collect(),
        (0..n).collect(),
        (0..n).collect(),
        (0..n).collect(),
        table,
    )
    .expect("unit groupoid is valid")
}

fn cyclic_action(n: usize, names: Vec<String>, space: &[&str], act: impl Fn(usize, usize) -> usize) -> GroupAction {
    let nx = space.len();
    let mul = (0..n * n).map(|i| (i / n + i % n) % n).collect();
    let act = (0..n * nx).map(|i| act(i / nx, i % nx)).collect();
    GroupAction::new(names, space.iter().map(|s| s.to_string()).collect(), mul, act).expect("valid cyclic action")
}

/// `ℤ/2 = {e, g}` swapping the two points `p, q`.
pub fn z2_swap() -> GroupAction {
    cyclic_action(2, vec!["e".into(), "g".into()], &["p", "q"], |g, x| (g + x) % 2)
}

/// `ℤ/2 = {e, a}` acting trivially on one point.
pub fn z2_trivial_on_point() -> GroupAction {
    cyclic_action(2, vec!["e".into(), "a".into()], &["p"], |_, x| x)
}

/// The trivial group acting on `n` points.
pub fn trivial_group_on(n: usize) -> GroupAction {
    let space: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    GroupAction::new(vec!["e".into()], space, vec![0], (0..n).collect()).expect("valid action")
}

/// `S₃` acting on `{1, 2, 3}` by permutation. Point stabilisers have order 2,
/// so the transformation groupoid is transitive but not principal.
pub fn s3_on_three_points() -> GroupAction {
    // One-line notation: perm[i] is the image of point i.
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
    let names = ["id", "(12)", "(13)", "(23)", "(123)", "(132)"];
    let find = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let mut mul = Vec::with_capacity(36);
    for g in &perms {
        for h in &perms {
            // (g·h)(x) = g(h(x))
            mul.push(find([g[h[0]], g[h[1]], g[h[2]]]));
        }
    }
    let act = perms.iter().flat_map(|p| p.iter().copied()).collect();
    GroupAction::new(names.iter().map(|s| s.to_string()).collect(), vec!["1".into(), "2".into(), "3".into()], mul, act)
        .expect("S3 action is valid")
}

/// The six groupoids shipped with the command-line tool, by file stem.
pub fn bundled() -> Vec<(&'static str, Groupoid)> {
    vec![
        ("r2", pair_groupoid(&["p", "q"])),
        ("z2", cyclic_group(2)),
        ("z3", cyclic_group(3)),
        ("z2_z3", disjoint_union(&cyclic_group(2), &cyclic_group(3))),
        ("z2_swap", z2_swap().transformation_groupoid()),
        ("s3_on_3", s3_on_three_points().transformation_groupoid()),
    ]
}

/// Random disjoint union of cyclic groups of order ≤ 4 and pair groupoids on
/// ≤ 3 points, with at most `max_arrows` arrows (and at least one).
pub fn random_groupoid<R: Rng + ?Sized>(rng: &mut R, max_arrows: usize) -> Groupoid {
    assert!(max_arrows >= 1);
    let mut acc: Option<Groupoid> = None;
    let mut used = 0;
    loop {
        let room = max_arrows - used;
        let mut choices: Vec<Groupoid> = Vec::new();
        for n in 1..=4.min(room) {
            choices.push(cyclic_group(n));
        }
        for k in 2..=3 {
            if k * k <= room {
                let pts: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
                let pts: Vec<&str> = pts.iter().map(String::as_str).collect();
                choices.push(pair_groupoid(&pts));
            }
        }
        let part = choices[rng.gen_range(0..choices.len())].clone();
        used += part.len();
        acc = Some(match acc {
            None => part,
            Some(prev) => disjoint_union(&prev, &part),
        });
        if used >= max_arrows || rng.gen_bool(0.4) {
            return acc.unwrap();
        }
    }
}
