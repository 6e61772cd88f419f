//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use combwork::async_iter::{
    self, build_companion, spectral_radius, BlockMatrix, DelayMatrix, DelayPattern, Ensemble, ExperimentConfig,
    ExperimentRow, CSV_HEADER,
};
use combwork::elimination::{self, EliminationStep, LinearizedDag};
use combwork::expressiveness::{self, BinaryMatrix};
use combwork::graph::{self, GraphKind, GraphSpec, WeightedGraph};
use combwork::hypergraph::{self, CutWeights, Hypergraph};
use combwork::reversal;
use combwork::tda::{self, DiagramPoint};
use combwork::zero_forcing;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit: Duration) -> String {
    format!("{:.2}s of {}s", elapsed.as_secs_f64(), limit.as_secs())
}

// ---------------------------------------------------------------- expressiveness

/// Count matching pairs directly over all (x, y), no histogram.
fn pair_count_oracle(a: &BinaryMatrix, t: usize) -> BigRational {
    let n = a.rows();
    let total = 1u64 << (t * n);
    let mask = (1u64 << n) - 1;
    let ind = |code: u64| -> Vec<u32> {
        a.columns()
            .iter()
            .map(|&col| (0..t).map(|j| ((code >> (j * n)) & mask & u64::from(col)).count_ones() & 1).sum())
            .collect()
    };
    let table: Vec<Vec<u32>> = (0..total).map(ind).collect();
    let mut hits = 0u64;
    for x in &table {
        hits += table.iter().filter(|y| *y == x).count() as u64;
    }
    BigRational::new(BigInt::from(hits), BigInt::from(1u64) << (2 * t * n))
}

fn identity_closed_form() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=3 {
        for t in 1..=3 {
            let a = BinaryMatrix::identity(n).unwrap();
            let brute = expressiveness::match_probability_bruteforce(&a, t, 30).unwrap();
            if brute != expressiveness::closed_form_identity(n, t) || (t * n <= 6 && brute != pair_count_oracle(&a, t)) {
                bad.push((n, t));
            }
        }
    }
    let el = start.elapsed();
    let limit = Duration::from_secs(10);
    outcome(bad.is_empty() && el < limit, format!("9 cases, mismatches {bad:?}, {}", within(el, limit)))
}

fn star_closed_form() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=3 {
        for t in 1..=3 {
            let a = BinaryMatrix::star(n).unwrap();
            let brute = expressiveness::match_probability_bruteforce(&a, t, 30).unwrap();
            if brute != expressiveness::closed_form_star(n, t).unwrap()
                || (t * n <= 6 && brute != pair_count_oracle(&a, t))
            {
                bad.push((n, t));
            }
        }
    }
    let el = start.elapsed();
    let limit = Duration::from_secs(30);
    outcome(bad.is_empty() && el < limit, format!("9 cases, mismatches {bad:?}, {}", within(el, limit)))
}

fn worked_example() -> Outcome {
    let a = BinaryMatrix::from_rows(&[
        &[1, 0, 0, 0, 1, 1, 1],
        &[0, 1, 0, 0, 1, 0, 0],
        &[0, 0, 1, 0, 0, 1, 0],
        &[0, 0, 0, 1, 0, 0, 1],
    ])
    .unwrap();
    let x = BinaryMatrix::from_rows(&[&[1, 0, 1, 0], &[1, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]).unwrap();
    let m = expressiveness::indicators(&a, &x).unwrap();
    outcome(m[4] == 2, format!("m5 = {}, m = {m:?}", m[4]))
}

// ---------------------------------------------------------------- zero forcing

fn all_connected_graphs(n: usize) -> Vec<WeightedGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let chosen: Vec<(usize, usize)> = (0..pairs.len()).filter(|b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
            WeightedGraph::unit(n, &chosen).unwrap()
        })
        .filter(|g| g.is_connected())
        .collect()
}

fn contingent_leaky() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut disagreements = 0usize;
    for n in 1..=5 {
        for g in all_connected_graphs(n) {
            for mask in 0u32..1 << n {
                let z: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
                for k in [1, 2] {
                    let c = zero_forcing::is_contingent_zfs(&g, &z, k).unwrap();
                    let l = zero_forcing::is_leaky_zfs(&g, &z, k).unwrap();
                    checked += 1;
                    disagreements += usize::from(c != l);
                }
            }
        }
    }
    let el = start.elapsed();
    let limit = Duration::from_secs(300);
    outcome(
        disagreements == 0 && el < limit,
        format!("{checked} (graph, Z, k) triples, {disagreements} disagreements, {}", within(el, limit)),
    )
}

fn tree_construction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7733);
    let mut counterexamples = Vec::new();
    let mut subsets = 0usize;
    for trial in 0..100 {
        let n = rng.random_range(2..=10);
        let tree = graph::generate(&GraphSpec::new(GraphKind::RandomTree { n }, rng.random())).unwrap();
        for k in [1, 2] {
            let expected: Vec<usize> = (0..n).filter(|&v| tree.degree(v) <= k).collect();
            let set = zero_forcing::tree_contingent_set(&tree, k).unwrap();
            if set != expected || !zero_forcing::is_contingent_zfs(&tree, &set, k).unwrap() {
                counterexamples.push((trial, k, "set fails"));
                continue;
            }
            for mask in 0u32..(1 << set.len()) - 1 {
                let sub: Vec<usize> = (0..set.len()).filter(|b| mask >> b & 1 == 1).map(|b| set[b]).collect();
                subsets += 1;
                if zero_forcing::is_contingent_zfs(&tree, &sub, k).unwrap() {
                    counterexamples.push((trial, k, "proper subset passes"));
                    break;
                }
            }
        }
    }
    outcome(
        counterexamples.is_empty(),
        format!("100 trees x k in {{1,2}}, {subsets} proper subsets checked, counterexamples {counterexamples:?}"),
    )
}

// ---------------------------------------------------------------- delays

/// Random instance with zero diagonal blocks and random off-diagonal delays.
fn delay_instance(rng: &mut ChaCha8Rng) -> (BlockMatrix, DelayMatrix) {
    let l = rng.random_range(2..=4);
    let n = rng.random_range(l..=12);
    let partition = BlockMatrix::equal_partition(n, l).unwrap();
    let mut data = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let mut offset = 0;
    for &b in &partition {
        data.view_mut((offset, offset), (b, b)).fill(0.0);
        offset += b;
    }
    let m = BlockMatrix::new(data, partition).unwrap();
    let delays = DelayMatrix::new(
        (0..l)
            .map(|j| (0..l).map(|i| if i == j { 0 } else { rng.random_range(0..=3) }).collect())
            .collect(),
    )
    .unwrap();
    (m, delays)
}

fn uniform_delay_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xde1a);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (m, _) = delay_instance(&mut rng);
        let rho_m = spectral_radius(m.data(), 1e-14).unwrap();
        for k in 1..=3 {
            let comp = build_companion(&m, &DelayMatrix::uniform(m.blocks(), k), k).unwrap();
            let rho = spectral_radius(&comp.to_dense(), 1e-14).unwrap();
            worst = worst.max((rho - rho_m.powf(1.0 / (k as f64 + 1.0))).abs());
        }
    }
    outcome(worst < 1e-8, format!("20 instances x k in {{1,2,3}}, max deviation {worst:.2e} (< 1e-8)"))
}

fn cospectrality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xde1a);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (m, delays) = delay_instance(&mut rng);
        let mut cases = vec![delays];
        cases.extend((1..=3).map(|k| DelayMatrix::uniform(m.blocks(), k)));
        for d in cases {
            let kappa = d.max();
            let a = build_companion(&m, &d, kappa).unwrap().spectral_radius(1e-14).unwrap();
            let b = build_companion(&m, &d, kappa + 3).unwrap().spectral_radius(1e-14).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    outcome(worst < 1e-8, format!("80 (M, delta) pairs, kappa vs kappa+3, max deviation {worst:.2e} (< 1e-8)"))
}

fn experiment_harness() -> Outcome {
    let start = Instant::now();
    let mut rows_total = 0usize;
    let mut problems = Vec::new();
    let mut uniform_rows = 0usize;
    let mut uniform_worst = 0.0f64;
    let mut below = Vec::new();
    let patterns = [
        (DelayPattern::Single { delay: 5 }, false),
        (DelayPattern::Poisson { mean: 3.0 }, false),
        (DelayPattern::Uniform { k: 1 }, true),
        (DelayPattern::Uniform { k: 2 }, true),
    ];
    for (pattern, uniform) in patterns {
        for ensemble in Ensemble::ALL {
            for jacobi in [false, true] {
                if uniform && !jacobi {
                    // the uniform law needs zero diagonal blocks
                    continue;
                }
                let cfg = ExperimentConfig::new(ensemble, jacobi, pattern.clone(), 2024);
                let rows = match async_iter::run_experiment(&cfg) {
                    Ok(r) => r,
                    Err(e) => {
                        problems.push(format!("{pattern:?}/{}/{jacobi}: {e}", ensemble.name()));
                        continue;
                    }
                };
                let mut buf = Vec::new();
                async_iter::write_csv(&rows, &mut buf).unwrap();
                let mut reader = csv::Reader::from_reader(buf.as_slice());
                let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
                if header != CSV_HEADER {
                    problems.push(format!("header {header:?}"));
                }
                let parsed: Vec<ExperimentRow> = reader.deserialize().collect::<Result<_, _>>().unwrap();
                if parsed.len() != cfg.trials * cfg.c_grid.len() || parsed.iter().any(|r| !r.rho.is_finite()) {
                    problems.push(format!("{pattern:?}/{}/{jacobi}: malformed rows", ensemble.name()));
                }
                rows_total += parsed.len();
                if let DelayPattern::Uniform { k } = pattern {
                    for r in &parsed {
                        uniform_rows += 1;
                        uniform_worst = uniform_worst.max((r.rho - r.c.powf(1.0 / (k as f64 + 1.0))).abs());
                    }
                } else {
                    below.push(format!(
                        "{}{}{}={:.3}",
                        ensemble.name(),
                        if jacobi { "+bj" } else { "" },
                        if matches!(pattern, DelayPattern::Single { .. }) { "/single" } else { "/poisson" },
                        async_iter::fraction_below_bound(&parsed, 0.0)
                    ));
                }
            }
        }
    }
    let el = start.elapsed();
    let limit = Duration::from_secs(600);
    let pass = problems.is_empty() && uniform_worst < 1e-6 && el < limit;
    outcome(
        pass,
        format!(
            "{rows_total} rows, {uniform_rows} uniform-delay rows max deviation {uniform_worst:.2e} (< 1e-6), {}; \
             problems {problems:?}; fraction under conjectured bound (reported only): {}",
            within(el, limit),
            below.join(" ")
        ),
    )
}

// ---------------------------------------------------------------- hypergraphs

fn random_subset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.truncate(size);
    all.sort_unstable();
    all
}

fn random_hypergraph(rng: &mut ChaCha8Rng, uniform: Option<usize>) -> Hypergraph {
    let n = rng.random_range(4..=10);
    let mut count = rng.random_range(1..=6);
    if let Some(r) = uniform {
        count = count.min(binomial(n, r));
    }
    let mut edges = BTreeSet::new();
    while edges.len() < count {
        let r = uniform.unwrap_or_else(|| rng.random_range(2..=n.min(6)));
        edges.insert(random_subset(rng, n, r));
    }
    let st = random_subset(rng, n, 2);
    let (s, t) = if rng.random_bool(0.5) { (st[0], st[1]) } else { (st[1], st[0]) };
    Hypergraph::new(n, s, t, edges.into_iter().collect()).unwrap()
}

fn max_cut_oracle(g: &WeightedGraph) -> usize {
    let n = g.vertex_count();
    (0u32..1 << n)
        .map(|mask| g.edges().iter().filter(|e| (mask >> e.u & 1) != (mask >> e.v & 1)).count())
        .max()
        .unwrap_or(0)
}

fn hypergraph_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c07);
    let mut gadget_bad = 0;
    for _ in 0..200 {
        let h = random_hypergraph(&mut rng, Some(4));
        for w2 in [1.0, 1.25, 1.5, 2.0] {
            let brute = hypergraph::brute_force_min_cut(&h, &CutWeights::four_uniform(1.0, w2).unwrap(), 20).unwrap();
            let flow = hypergraph::gadget_min_cut_4uniform(&h, w2).unwrap();
            let side_value = hypergraph::cut_value(&h, &flow.side, &CutWeights::four_uniform(1.0, w2).unwrap()).unwrap();
            if flow.value != brute.value || side_value != brute.value {
                gadget_bad += 1;
            }
        }
    }
    let mut lawler_bad = 0;
    for _ in 0..200 {
        let h = random_hypergraph(&mut rng, None);
        let w = CutWeights::all_ones(h.max_arity());
        let brute = hypergraph::brute_force_min_cut(&h, &w, 20).unwrap();
        let flow = hypergraph::lawler_min_cut(&h);
        if flow.value != brute.value || hypergraph::cut_value(&h, &flow.side, &w).unwrap() != brute.value {
            lawler_bad += 1;
        }
    }
    let mut maxcut_bad = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=8);
        let g = graph::generate(&GraphSpec::new(GraphKind::RandomEr { n, p: 0.5 }, rng.random())).unwrap();
        let h = hypergraph::maxcut_reduction(&g);
        let value = hypergraph::brute_force_min_cut(&h, &CutWeights::four_uniform(1.0, 0.0).unwrap(), 20)
            .unwrap()
            .value;
        if value != (g.edge_count() - max_cut_oracle(&g)) as f64 {
            maxcut_bad += 1;
        }
    }
    outcome(
        gadget_bad + lawler_bad + maxcut_bad == 0,
        format!(
            "gadget 800 checks ({gadget_bad} bad), lawler 200 ({lawler_bad} bad), max-cut 50 ({maxcut_bad} bad)"
        ),
    )
}

fn no_even_split() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe5e5);
    let mut bad = 0;
    for _ in 0..100 {
        let h = random_hypergraph(&mut rng, Some(4));
        let (value, side) = hypergraph::no_even_split_min(&h, 20).unwrap();
        let big = (h.edges().len() + 1) as f64;
        let brute = hypergraph::brute_force_min_cut(&h, &CutWeights::four_uniform(1.0, big).unwrap(), 20).unwrap();
        let splits = hypergraph::cut_value(&h, &side, &CutWeights::four_uniform(1.0, big).unwrap()).unwrap();
        if brute.value != value as f64 || splits != value as f64 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("100 instances, {bad} mismatches against w2 = |E|+1 brute force"))
}

// ---------------------------------------------------------------- tda

fn nonempty_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let size = rng.random_range(1..=n);
    random_subset(rng, n, size)
}

fn dowker_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd0d0);
    let mut bad = 0;
    let mut points = 0;
    for _ in 0..50 {
        let n = rng.random_range(3..=15);
        let mut spec = GraphSpec::new(GraphKind::RandomConnected { n, p: 0.2 }, rng.random());
        spec.weight_range = Some((0.5, 2.0));
        let g = graph::generate(&spec).unwrap();
        let d = graph::finite_geodesic_distances(&g).unwrap();
        let w = nonempty_subset(&mut rng, n);
        let l = nonempty_subset(&mut rng, n);
        let a = tda::persistence(&tda::dowker_complex(&d, &w, &l, 2).unwrap()).unwrap();
        let b = tda::persistence(&tda::dowker_complex(&d, &l, &w, 2).unwrap()).unwrap();
        for dim in [0, 1] {
            let (pa, pb) = (a.restrict(dim), b.restrict(dim));
            points += pa.points().len();
            if pa != pb {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("50 graphs, dims 0-1, {points} points compared, {bad} mismatching diagrams"))
}

fn vr_check() -> Outcome {
    let c4 = graph::generate(&GraphSpec::new(GraphKind::Cycle { m: 4, weight: None }, 0)).unwrap();
    let d = graph::finite_geodesic_distances(&c4).unwrap();
    let pd = tda::persistence(&tda::vietoris_rips(&d, d.diameter(), 2).unwrap()).unwrap();
    let pd1: Vec<DiagramPoint> = pd.in_dim(1).copied().collect();
    let c4_ok = pd1
        == vec![DiagramPoint {
            dim: 1,
            birth: 1.0,
            death: 2.0,
        }];
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e05);
    let (mut first, mut extended, mut subdivided, mut failed) = (0, 0, 0, Vec::new());
    for i in 0..30 {
        let n = rng.random_range(3..=10);
        let g = graph::generate(&GraphSpec::new(GraphKind::RandomConnected { n, p: 0.25 }, rng.random())).unwrap();
        let genus = g.edge_count() + 1 - g.vertex_count();
        let report = tda::genus_recovery(&g, 4).unwrap();
        assert_eq!(report.genus, genus);
        match report.attempts.iter().position(|a| a.matches) {
            Some(0) => first += 1,
            Some(1) => extended += 1,
            Some(_) => subdivided += 1,
            None => failed.push(i),
        }
    }
    outcome(
        c4_ok && failed.is_empty(),
        format!(
            "C4 PD1 {pd1:?}; genus recovered {first}/30 at diameter, {extended} more at 2x diameter, \
             {subdivided} more after 4-way subdivision, unrecovered {failed:?}"
        ),
    )
}

// ---------------------------------------------------------------- elimination

/// Sum over every source→sink path of the product of labels.
fn path_enumeration_jacobian(g: &LinearizedDag) -> Vec<Vec<f64>> {
    fn walk(g: &LinearizedDag, v: usize, acc: f64, out: &mut Vec<f64>) {
        if g.is_sink(v) {
            out[v - g.n() - g.p()] += acc;
        }
        for &w in g.succs(v) {
            walk(g, w, acc * g.label(v, w).unwrap(), out);
        }
    }
    let mut jac = vec![vec![0.0; g.n()]; g.m()];
    for s in 0..g.n() {
        let mut col = vec![0.0; g.m()];
        walk(g, s, 1.0, &mut col);
        for (row, x) in jac.iter_mut().zip(col) {
            row[s] = x;
        }
    }
    jac
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn elimination_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe11);
    let (mut sequences, mut jac_bad, mut greedy_bad, mut vertex_front_bad) = (0, 0, 0, 0);
    for _ in 0..50 {
        let n = rng.random_range(1..=3);
        let p = rng.random_range(1..=6);
        let m = rng.random_range(1..=3);
        let g = LinearizedDag::random(n, p, m, 0.4, true, rng.random()).unwrap();
        let oracle = path_enumeration_jacobian(&g);
        let lib = elimination::path_sum_jacobian(&g).unwrap();
        let agree = |j: &Vec<Vec<f64>>| j.iter().flatten().zip(oracle.iter().flatten()).all(|(&a, &b)| close(a, b));
        if !agree(&lib) {
            jac_bad += 1;
        }
        let inter: Vec<usize> = (n..n + p).collect();
        for order in permutations(&inter) {
            let steps: Vec<EliminationStep> = order.iter().map(|&j| EliminationStep::Vertex { j }).collect();
            let out = elimination::run_sequence(&g, &steps).unwrap();
            sequences += 1;
            if !out.is_complete || !agree(&out.dag.bipartite_jacobian().unwrap()) {
                jac_bad += 1;
            }
        }
        let (_, greedy) = elimination::greedy_vertex_sequence(&g);
        let (_, best) =
            elimination::optimal_sequence(&g, elimination::SearchMode::Vertex, Default::default()).unwrap();
        if greedy < best {
            greedy_bad += 1;
        }
        for &j in &inter {
            let (via_vertex, cost_v) = elimination::vertex_eliminate(&g, j).unwrap();
            let mut via_front = g.clone();
            let mut cost_f = 0;
            for i in g.preds(j).clone() {
                cost_f += via_front.apply_front(i, j).unwrap();
            }
            if via_vertex != via_front || cost_v != cost_f {
                vertex_front_bad += 1;
            }
        }
    }
    outcome(
        jac_bad + greedy_bad + vertex_front_bad == 0,
        format!(
            "50 dags, {sequences} complete vertex sequences; jacobian mismatches {jac_bad}, \
             greedy < optimal {greedy_bad}, vertex != front-of-in-edges {vertex_front_bad}"
        ),
    )
}

// ---------------------------------------------------------------- reversal

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Minimal re-evaluations to reverse l steps from a stored start with c
/// checkpoint slots: r·l − C(c+r, c+1), r least with C(c+r, c) ≥ l.
fn binomial_reversal_cost(l: usize, c: usize) -> usize {
    if l <= 1 {
        return 0;
    }
    if c == 0 {
        return l * (l - 1) / 2;
    }
    let mut r = 0;
    while binomial(c + r, c) < l {
        r += 1;
    }
    r * l - binomial(c + r, c + 1)
}

fn reversal_checks() -> Outcome {
    let mut recompute_bad = Vec::new();
    for p in 1..=50 {
        let chain = LinearizedDag::chain(p);
        let report =
            reversal::simulate_reversal(&chain, &reversal::recompute_all_schedule(&chain), chain.n()).unwrap();
        if report.computational_cost != p * (p - 1) / 2 {
            recompute_bad.push(p);
        }
    }
    let mut revolve_bad = Vec::new();
    for p in 1..=30 {
        for c in 0..=5 {
            // The first sweep is free and leaves x_p live, so the task is a
            // (p+1)-step reversal less the p evaluations already paid for.
            let expected = binomial_reversal_cost(p + 1, c + 1) - p;
            let schedule = reversal::chain_revolve(p, c);
            let chain = LinearizedDag::chain(p);
            let report = reversal::simulate_reversal(&chain, &schedule, chain.n() + c);
            let ok = reversal::chain_revolve_cost(p, c) == expected
                && report.is_ok_and(|r| r.computational_cost == expected && r.peak_persistent_memory <= 1 + c);
            if !ok {
                revolve_bad.push((p, c));
            }
        }
    }
    let chain3 = LinearizedDag::chain(3);
    let brute = reversal::optimal_reversal_bruteforce(&chain3, chain3.n()).map(|(_, cost)| cost);
    outcome(
        recompute_bad.is_empty() && revolve_bad.is_empty() && brute == Ok(3),
        format!(
            "recompute-all p<=50 mismatches {recompute_bad:?}; revolve vs binomial closed form p<=30 c<=5 \
             mismatches {revolve_bad:?}; brute force chain p=3, M=n: {brute:?}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("identity closed form", identity_closed_form),
        ("star closed form", star_closed_form),
        ("worked example m5 = 2", worked_example),
        ("contingent == leaky (n <= 5)", contingent_leaky),
        ("tree contingent construction (100 trees)", tree_construction),
        ("uniform-delay law", uniform_delay_law),
        ("co-spectrality across kappa", cospectrality),
        ("experiment harness", experiment_harness),
        ("hypergraph oracle equivalence", hypergraph_oracles),
        ("no-even-split", no_even_split),
        ("dowker duality", dowker_duality),
        ("vietoris-rips diagram and genus", vr_check),
        ("elimination", elimination_checks),
        ("reversal", reversal_checks),
    ];
    // ACCEPTANCE_FILTER=substring runs a subset
    let filter = std::env::var("ACCEPTANCE_FILTER").unwrap_or_default();
    let mut failures = 0;
    for (name, check) in criteria {
        if !name.contains(filter.as_str()) {
            continue;
        }
        let o = check();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.pass);
    }
    println!("acceptance: {failures} failing criteria");
    if failures > 0 {
        std::process::exit(1);
    }
}
