//! Acceptance gate: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rainbow_core::coupling::{chain_hit_estimates, exact_chain, pointwise_gap};
use rainbow_core::expectation::{candidate_lattice, lp_min_cover, min_cover_cost_integer, solve_q, solve_qf};
use rainbow_core::family::{GroundSet, IncreasingFamily, MultiHypergraph, Subset};
use rainbow_core::generators::{
    ell_cycles, hamilton_cycles, perfect_matchings, power_hamilton, random_family, single_edge, sunflower,
    tree_embeddings, HostGraph,
};
use rainbow_core::lift::{falling_factorial, lift_padded, lift_rainbow, verify_lift_spread};
use rainbow_core::measures::{mu_colored_all_exact, mu_colored_exact, mu_colored_mc, mu_exact, MeasureParams};
use rainbow_core::spread::{check_spread, intersection_profile, intersection_profile_from, optimal_spread, DegreeTable};
use rainbow_core::thresholds::{solve_pc, solve_pc_k, Attainment};

type Outcome = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fam(n: usize, edges: &[&[usize]]) -> IncreasingFamily {
    IncreasingFamily::new(
        GroundSet::alphabetic(n).unwrap(),
        edges.iter().map(|e| Subset::from_indices(e.iter().copied()).unwrap()).collect(),
    )
    .unwrap()
}

/// Every nontrivial antichain on `n` elements.
fn antichains(n: usize) -> Vec<IncreasingFamily> {
    let sets: Vec<Subset> = Subset::prefix(n).subsets().filter(|s| !s.is_empty()).collect();
    let mut out = Vec::new();
    for mask in 1u64..(1 << sets.len()) {
        let chosen: Vec<Subset> = (0..sets.len()).filter(|&i| mask >> i & 1 == 1).map(|i| sets[i]).collect();
        let anti = chosen
            .iter()
            .all(|a| chosen.iter().all(|b| a == b || !a.is_subset_of(*b)));
        if anti {
            out.push(IncreasingFamily::new(GroundSet::alphabetic(n).unwrap(), chosen).unwrap());
        }
    }
    out
}

fn tiny_families() -> Vec<IncreasingFamily> {
    let mut out: Vec<IncreasingFamily> = (1..=4).flat_map(antichains).collect();
    for n in 5..=6 {
        for seed in 0..40 {
            out.push(random_family(n, 5, 4, 1000 * n as u64 + seed).unwrap());
        }
    }
    out
}

/// `μ_p(F)` by summing over all `2^n` outcomes.
fn brute_mu(f: &IncreasingFamily, pvec: &[f64]) -> f64 {
    let n = f.ground().len();
    Subset::prefix(n)
        .subsets()
        .filter(|&s| f.contains(s).unwrap())
        .map(|s| (0..n).map(|i| if s.contains(i) { pvec[i] } else { 1.0 - pvec[i] }).product::<f64>())
        .sum()
}

fn closed_form_thresholds() -> Outcome {
    for r in 1..=3usize {
        let f = single_edge(r).unwrap();
        let want = 0.5f64.powf(1.0 / r as f64);
        let q = solve_q(&f, 1e-8).map_err(|e| e.to_string())?.value;
        let qf = solve_qf(&f, 1e-8).map_err(|e| e.to_string())?.value;
        let pc = solve_pc(&f, 1e-8).map_err(|e| e.to_string())?.value;
        for (name, v) in [("q", q), ("q_f", qf), ("p_c", pc)] {
            ensure((v - want).abs() <= 1e-6, || format!("r = {r}: {name} = {v}, want {want}"))?;
        }
    }
    Ok("r = 1, 2, 3".into())
}

fn rainbow_closed_form() -> Outcome {
    let pair = single_edge(2).unwrap();
    for k in 3..=10u32 {
        let got = solve_pc_k(&pair, k, 1e-9).map_err(|e| e.to_string())?;
        let want = (k as f64 / (2.0 * (k as f64 - 1.0))).sqrt();
        ensure(got.attained == Attainment::Interior && (got.value - want).abs() <= 1e-6, || {
            format!("k = {k}: {got:?}, want {want}")
        })?;
    }
    let two = solve_pc_k(&pair, 2, 1e-9).map_err(|e| e.to_string())?;
    ensure(two.value == 1.0 && two.attained == Attainment::Boundary, || format!("k = 2: {two:?}"))?;
    let triple = single_edge(3).unwrap();
    let t = solve_pc_k(&triple, 3, 1e-9).map_err(|e| e.to_string())?;
    ensure(t.value == 1.0 && t.attained == Attainment::NotAttained, || format!("triple: {t:?}"))?;
    let top = mu_colored_exact(&triple, &MeasureParams::uniform(3, 1.0).unwrap().with_colors(3).unwrap())
        .map_err(|e| e.to_string())?;
    ensure((top - 2.0 / 9.0).abs() <= 1e-12, || format!("triple sup {top}"))?;
    Ok("k = 3..10 interior, k = 2 boundary, triple not attained (sup 2/9)".into())
}

fn inequality_chain() -> Outcome {
    let slack = 2e-6;
    let tol = 1e-7;
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 30 {
        let f = random_family(8, 6, 4, 7000 + seed).unwrap();
        seed += 1;
        let q = solve_q(&f, tol).map_err(|e| e.to_string())?.value;
        let qf = solve_qf(&f, tol).map_err(|e| e.to_string())?.value;
        let pc = solve_pc(&f, tol).map_err(|e| e.to_string())?.value;
        let ell = f.ell().unwrap() as u32;
        ensure(q <= qf + slack && qf <= pc + slack, || {
            format!("seed {}: q = {q}, q_f = {qf}, p_c = {pc}", 7000 + seed - 1)
        })?;
        for k in ell.max(1)..=6 {
            let pck = solve_pc_k(&f, k, tol).map_err(|e| e.to_string())?;
            if pck.attained != Attainment::Interior {
                continue;
            }
            ensure(pc <= pck.value + slack, || format!("seed {}: p_c = {pc} > p_c^{k} = {}", 7000 + seed - 1, pck.value))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} random families on 8 elements"))
}

fn all_identity() -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for f in tiny_families() {
        let n = f.ground().len();
        for k in 1..=3u32 {
            for i in 1..=9 {
                let p = i as f64 / 10.0;
                let params = MeasureParams::uniform(n, p).unwrap();
                let plain = mu_exact(&f, &params).map_err(|e| e.to_string())?;
                let all = mu_colored_all_exact(&f, &params.clone().with_colors(k).unwrap()).map_err(|e| e.to_string())?;
                let brute = brute_mu(&f, params.pvec());
                let gap = (plain - all).abs().max((plain - brute).abs());
                worst = worst.max(gap);
                ensure(gap <= 1e-12, || format!("{f:?}, k = {k}, p = {p}: {plain} / {all} / {brute}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} evaluations, worst gap {worst:.1e}"))
}

fn strict_monotonicity() -> Outcome {
    let mut families = 0;
    let mut min_margin = f64::INFINITY;
    for f in tiny_families() {
        let n = f.ground().len();
        let ell = f.ell().unwrap() as u32;
        for k in ell.max(1)..=3 {
            families += 1;
            let at = |pvec: Vec<f64>| {
                mu_colored_exact(&f, &MeasureParams::per_element(pvec).unwrap().with_colors(k).unwrap()).unwrap()
            };
            let values: Vec<f64> = (1..=17).map(|i| at(vec![i as f64 / 18.0; n])).collect();
            for w in values.windows(2) {
                min_margin = min_margin.min(w[1] - w[0]);
                ensure(w[1] > w[0], || format!("{f:?}, k = {k}: not strictly increasing {values:?}"))?;
            }
            let base: Vec<f64> = (0..n).map(|i| 0.2 + 0.1 * i as f64).collect();
            let v0 = at(base.clone());
            let support = f.support();
            for i in 0..n {
                let mut raised = base.clone();
                raised[i] += 0.15;
                let v1 = at(raised);
                if support.contains(i) {
                    min_margin = min_margin.min(v1 - v0);
                    ensure(v1 > v0, || format!("{f:?}, k = {k}: raising p_{i} gave {v0} -> {v1}"))?;
                } else {
                    ensure(v1 >= v0, || format!("{f:?}, k = {k}: raising p_{i} decreased"))?;
                }
            }
        }
    }
    Ok(format!("{families} (family, k) pairs, smallest margin {min_margin:.2e}"))
}

fn lift_instances() -> Vec<(String, MultiHypergraph)> {
    let mut out = Vec::new();
    for n in 3..=5 {
        out.push((format!("hamilton({n})"), hamilton_cycles(n).unwrap()));
    }
    for n in [4, 6] {
        out.push((format!("matchings(K{n})"), perfect_matchings(&HostGraph::complete(n, 2).unwrap()).unwrap()));
    }
    for (c, p, e) in [(1, 3, 3), (2, 2, 4), (0, 3, 2), (1, 4, 2)] {
        out.push((format!("sunflower({c},{p},{e})"), sunflower(c, p, e).unwrap().to_hypergraph()));
    }
    out
}

fn lift_counting() -> Outcome {
    let mut cases = 0;
    for (name, h) in lift_instances() {
        let r = h.rank();
        for k in r..=r + 3 {
            let lifted = lift_rainbow(&h, k as u32).map_err(|e| format!("{name}: {e}"))?;
            // each edge of size t has k^t colorings; count the injective ones directly
            let mut injective = 0u64;
            for &(e, m) in h.edges() {
                let t = e.len() as u32;
                let count = (0..(k as u64).pow(t))
                    .filter(|&code| {
                        let cs: Vec<u64> = (0..t).map(|i| code / (k as u64).pow(i) % k as u64).collect();
                        (0..cs.len()).all(|i| (0..i).all(|j| cs[i] != cs[j]))
                    })
                    .count() as u64;
                injective += count * m;
            }
            ensure(lifted.size() == injective, || format!("{name}, k = {k}: |H′| = {} vs {injective}", lifted.size()))?;
            let padded = lift_padded(&h, k as u32).map_err(|e| format!("{name}: {e}"))?;
            let want = falling_factorial(k as u64, r as u64).unwrap() * h.size() as u128;
            let got: u128 = padded.hypergraph().edges().iter().map(|e| e.1 as u128).sum();
            ensure(got == want, || format!("{name}, k = {k}: |H″| = {got}, (k)_r|H| = {want}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (instance, k) pairs"))
}

fn lift_spread() -> Outcome {
    let mut cases = 0;
    let mut sets = 0;
    let mut worst = 0.0f64;
    for (name, h) in lift_instances() {
        let r = h.rank();
        let kappa = optimal_spread(&h).map_err(|e| e.to_string())?.kappa;
        for k in r..=r + 3 {
            let padded = lift_padded(&h, k as u32).map_err(|e| format!("{name}: {e}"))?;
            let rep = verify_lift_spread(&h, &padded, kappa, 3).map_err(|e| format!("{name}: {e}"))?;
            ensure(rep.identity_holds, || format!("{name}, k = {k}: degree identity fails at {:?}", rep.witness))?;
            ensure(rep.holds, || format!("{name}, k = {k}: {rep:?}"))?;
            worst = worst.max(rep.worst_ratio);
            sets += rep.sets_checked;
            cases += 1;
        }
    }
    Ok(format!("{cases} lifts, {sets} colored sets, worst ratio {worst:.3}"))
}

fn coupling() -> Outcome {
    let mut exact_cases = 0;
    let tiny: Vec<(&str, MultiHypergraph, u32)> = vec![
        ("ab", single_edge(2).unwrap().to_hypergraph(), 2),
        ("ab", single_edge(2).unwrap().to_hypergraph(), 3),
        ("abc", single_edge(3).unwrap().to_hypergraph(), 3),
        ("path", fam(3, &[&[0, 1], &[1, 2]]).to_hypergraph(), 2),
        ("path", fam(3, &[&[0, 1], &[1, 2]]).to_hypergraph(), 3),
        ("star", fam(4, &[&[0, 1], &[0, 2], &[0, 3]]).to_hypergraph(), 2),
        ("matchings(K4)", perfect_matchings(&HostGraph::complete(4, 2).unwrap()).unwrap(), 2),
        ("matchings(K4)", perfect_matchings(&HostGraph::complete(4, 2).unwrap()).unwrap(), 3),
        ("hamilton(3)", hamilton_cycles(3).unwrap(), 3),
        ("sunflower(1,2,2)", sunflower(1, 2, 2).unwrap().to_hypergraph(), 2),
        ("sunflower(1,2,2)", sunflower(1, 2, 2).unwrap().to_hypergraph(), 3),
    ];
    for (name, h, k) in &tiny {
        let n = h.ground().len();
        assert!(2f64.powi((*k as usize * n) as i32) <= 1e7);
        for p in [0.2, 0.5, 0.8, 1.0] {
            let chain = exact_chain(h, *k, p).map_err(|e| format!("{name}: {e}"))?;
            ensure(chain.windows(2).all(|w| w[0] <= w[1] + 1e-12), || format!("{name}, k = {k}, p = {p}: {chain:?}"))?;
            exact_cases += 1;
        }
    }
    let h6 = hamilton_cycles(6).unwrap();
    let mut worst_z = f64::NEG_INFINITY;
    for p in [0.5, 0.8] {
        let est = chain_hit_estimates(&h6, 6, p, 100_000, 20_240_611).map_err(|e| e.to_string())?;
        for w in est.windows(2) {
            let sd = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt().max(1e-5);
            let z = (w[0].estimate - w[1].estimate) / sd;
            worst_z = worst_z.max(z);
            ensure(z <= 3.0, || format!("hamilton(6), p = {p}: drop of {z:.2}σ"))?;
        }
    }
    let mut min_gap = f64::INFINITY;
    for pi in 1..=99 {
        let p = pi as f64 / 100.0;
        for k in 1..=50u32 {
            for d in 1..=k {
                let g = pointwise_gap(p, k, d).map_err(|e| e.to_string())?;
                min_gap = min_gap.min(g);
                ensure(g >= -1e-12, || format!("gap({p}, {k}, {d}) = {g}"))?;
            }
        }
    }
    Ok(format!(
        "{exact_cases} exact chains, largest MC drop {worst_z:.2}σ, smallest gap {min_gap:.1e}"
    ))
}

fn generator_corpus() -> Vec<(String, MultiHypergraph)> {
    let mut out = lift_instances();
    out.push(("hamilton(6)".into(), hamilton_cycles(6).unwrap()));
    out.push(("power_hamilton(5,2)".into(), power_hamilton(5, 2).unwrap()));
    out.push(("power_hamilton(6,2)".into(), power_hamilton(6, 2).unwrap()));
    out.push(("ell_cycles(6,3,2)".into(), ell_cycles(6, 3, 2).unwrap()));
    out.push(("ell_cycles(6,3,1)".into(), ell_cycles(6, 3, 1).unwrap()));
    out.push(("matchings(K6^3)".into(), perfect_matchings(&HostGraph::complete(6, 3).unwrap()).unwrap()));
    let path4 = HostGraph::graph(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let star5 = HostGraph::graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    out.push(("paths in K4".into(), tree_embeddings(&HostGraph::complete(4, 2).unwrap(), &path4).unwrap()));
    out.push(("stars in K5".into(), tree_embeddings(&HostGraph::complete(5, 2).unwrap(), &star5).unwrap()));
    for seed in 0..10 {
        out.push((format!("random({seed})"), random_family(8, 6, 4, 500 + seed).unwrap().to_hypergraph()));
    }
    out
}

/// `min_S (|H| / d(S))^{1/|S|}` over every nonempty `S` of the ground set.
fn brute_spread(h: &MultiHypergraph) -> f64 {
    let total = h.size() as f64;
    Subset::prefix(h.ground().len())
        .subsets()
        .filter(|s| !s.is_empty())
        .filter_map(|s| {
            let d: u64 = h.edges().iter().filter(|(e, _)| s.is_subset_of(*e)).map(|e| e.1).sum();
            (d > 0).then(|| (total / d as f64).powf(1.0 / s.len() as f64))
        })
        .fold(f64::INFINITY, f64::min)
}

fn spread_consistency() -> Outcome {
    let mut checks = 0;
    let mut profiles = 0;
    for (name, h) in generator_corpus() {
        let table = DegreeTable::new(&h).map_err(|e| format!("{name}: {e}"))?;
        let opt = optimal_spread(&h).map_err(|e| format!("{name}: {e}"))?;
        for factor in [0.25, 0.5, 0.9, 1.0 - 1e-9, 1.0, 1.0 + 1e-9, 1.1, 2.0] {
            let kappa = opt.kappa * factor;
            let holds = check_spread(&h, kappa).map_err(|e| e.to_string())?.holds;
            let want = kappa <= opt.kappa * (1.0 + 1e-12);
            ensure(holds == want, || format!("{name}: κ = {kappa} gave {holds}, κ* = {}", opt.kappa))?;
            checks += 1;
        }
        if h.ground().len() <= 15 {
            let brute = brute_spread(&h);
            ensure((brute - opt.kappa).abs() <= 1e-12 * brute, || format!("{name}: κ* {} vs brute {brute}", opt.kappa))?;
        }
        for a in table.sets() {
            let m = intersection_profile_from(&table, a);
            ensure(m.iter().sum::<u64>() == h.size(), || format!("{name}: Σ_j M_j({a:?}) ≠ |H|"))?;
            if profiles % 7 == 0 {
                ensure(m == intersection_profile(&h, a), || format!("{name}: profile of {a:?} disagrees with a scan"))?;
            }
            profiles += 1;
        }
    }
    let c4 = hamilton_cycles(4).unwrap();
    let kappa = optimal_spread(&c4).unwrap().kappa;
    let brute = brute_spread(&c4);
    ensure((kappa - 1.5f64.sqrt()).abs() <= 1e-12 && (brute - 1.5f64.sqrt()).abs() <= 1e-12, || {
        format!("κ*(C4) = {kappa}, brute {brute}")
    })?;
    Ok(format!("{checks} spread decisions, {profiles} partition identities"))
}

fn lp_families() -> Vec<IncreasingFamily> {
    let mut out: Vec<IncreasingFamily> = (1..=3).flat_map(antichains).collect();
    for seed in 0..30 {
        out.push(random_family(8, 6, 4, 9000 + seed).unwrap());
    }
    out.push(perfect_matchings(&HostGraph::complete(4, 2).unwrap()).unwrap().to_family());
    out.push(hamilton_cycles(4).unwrap().to_family());
    out.push(sunflower(1, 3, 3).unwrap());
    out
}

/// Packing optimum for a two-edge family by trying every vertex of the
/// feasible region: each pair of tight constraints among the lattice rows
/// and the two axes.
fn two_edge_lp(f: &IncreasingFamily, p: f64) -> f64 {
    let edges = f.minimal_edges();
    assert_eq!(edges.len(), 2);
    let mut rows: Vec<([f64; 2], f64)> = candidate_lattice(f)
        .unwrap()
        .into_iter()
        .map(|s| {
            let a = [s.is_subset_of(edges[0]) as u8 as f64, s.is_subset_of(edges[1]) as u8 as f64];
            (a, p.powi(s.len() as i32))
        })
        .collect();
    let feasible = |y: [f64; 2], rows: &[([f64; 2], f64)]| {
        y[0] >= -1e-12 && y[1] >= -1e-12 && rows.iter().all(|(a, b)| a[0] * y[0] + a[1] * y[1] <= b + 1e-12)
    };
    let body = rows.clone();
    rows.push(([1.0, 0.0], 0.0));
    rows.push(([0.0, 1.0], 0.0));
    let mut best = 0.0f64;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (rows[i], rows[j]);
            let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
            if det.abs() < 1e-15 {
                continue;
            }
            let y = [(a.1 * b.0[1] - a.0[1] * b.1) / det, (a.0[0] * b.1 - a.1 * b.0[0]) / det];
            // the axis rows stand for y_i = 0, not y_i ≤ 0
            if feasible(y, &body) {
                best = best.max(y[0] + y[1]);
            }
        }
    }
    best
}

/// Cheapest cover over every subfamily of the lattice.
fn brute_integer_cover(f: &IncreasingFamily, p: f64) -> f64 {
    let lattice = candidate_lattice(f).unwrap();
    let edges = f.minimal_edges();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << lattice.len()) {
        let chosen: Vec<Subset> = (0..lattice.len()).filter(|&i| mask >> i & 1 == 1).map(|i| lattice[i]).collect();
        if edges.iter().all(|t| chosen.iter().any(|s| s.is_subset_of(*t))) {
            best = best.min(chosen.iter().map(|s| p.powi(s.len() as i32)).sum());
        }
    }
    best
}

/// Largest grid-refined `p` with `cost(p) ≤ 1/2`, by bisection.
fn oracle_threshold(cost: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if cost(mid) > 0.5 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn lp_correctness() -> Outcome {
    let mut solves = 0;
    let mut worst_gap = 0.0f64;
    for f in lp_families() {
        for p in [0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95] {
            let lp = lp_min_cover(&f, p).map_err(|e| e.to_string())?;
            let check = lp.check_certificate(&f).map_err(|e| e.to_string())?;
            ensure(check.passes(), || format!("{f:?} at p = {p}: {check:?}"))?;
            worst_gap = worst_gap.max(check.objective_gap).max(check.max_violation);
            let (int_cost, cover) = min_cover_cost_integer(&f, p).map_err(|e| e.to_string())?;
            ensure(cover.verify(&f).is_ok(), || format!("{f:?} at p = {p}: integer cover is not a cover"))?;
            ensure(int_cost >= lp.cover.cost - 1e-12, || format!("{f:?} at p = {p}: integer {int_cost} < LP {}", lp.cover.cost))?;
            solves += 1;
        }
    }
    let f = fam(3, &[&[0, 1], &[0, 2]]);
    let q = solve_q(&f, 1e-9).map_err(|e| e.to_string())?.value;
    let qf = solve_qf(&f, 1e-9).map_err(|e| e.to_string())?.value;
    let q_oracle = oracle_threshold(|p| brute_integer_cover(&f, p));
    let qf_oracle = oracle_threshold(|p| two_edge_lp(&f, p));
    for (name, v) in [("q", q), ("q_f", qf), ("exhaustive q", q_oracle), ("vertex q_f", qf_oracle)] {
        ensure((v - 0.5).abs() <= 1e-6, || format!("{{ab, ac}}: {name} = {v}"))?;
    }
    Ok(format!("{solves} certified solves, worst certificate residual {worst_gap:.1e}"))
}

fn rainbow_demo() -> Outcome {
    let f = hamilton_cycles(7).unwrap().to_family();
    let n = f.ground().len();
    let samples = 20_000;
    let grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let mut est = Vec::new();
    for &p in &grid {
        let params = MeasureParams::uniform(n, p).unwrap().with_colors(7).unwrap();
        est.push(mu_colored_mc(&f, &params, samples, 77).map_err(|e| e.to_string())?);
    }
    for (i, w) in est.windows(2).enumerate() {
        let sd = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt().max(1.0 / samples as f64);
        ensure(w[1].estimate >= w[0].estimate - 3.0 * sd, || {
            format!("drop between p = {} and {}: {} -> {}", grid[i], grid[i + 1], w[0].estimate, w[1].estimate)
        })?;
    }
    let top = est.last().unwrap().estimate;
    ensure(top > 0.0, || "no rainbow Hamilton cycle seen at p = 1".into())?;
    let shown: Vec<String> = est.iter().map(|e| format!("{:.4}", e.estimate)).collect();
    Ok(format!("hit rates [{}]", shown.join(", ")))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "closed-form thresholds of a single edge", budget: Duration::from_secs(1), run: closed_form_thresholds },
        Criterion { id: 2, name: "rainbow threshold of a single edge", budget: Duration::from_secs(1), run: rainbow_closed_form },
        Criterion { id: 3, name: "q <= q_f <= p_c <= p_c^k on random families", budget: Duration::from_secs(300), run: inequality_chain },
        Criterion { id: 4, name: "mu_p(F) = mu_p^k(F^all) on tiny families", budget: Duration::from_secs(600), run: all_identity },
        Criterion { id: 5, name: "strict monotonicity of the rainbow measure", budget: Duration::from_secs(600), run: strict_monotonicity },
        Criterion { id: 6, name: "|H''| = (k)_r |H|", budget: Duration::from_secs(600), run: lift_counting },
        Criterion { id: 7, name: "lifted spread bound and degree identity", budget: Duration::from_secs(600), run: lift_spread },
        Criterion { id: 8, name: "hybrid chain monotone, pointwise gap nonnegative", budget: Duration::from_secs(600), run: coupling },
        Criterion { id: 9, name: "spread certifier consistency", budget: Duration::from_secs(600), run: spread_consistency },
        Criterion { id: 10, name: "LP certificates and cover ordering", budget: Duration::from_secs(600), run: lp_correctness },
        Criterion { id: 11, name: "rainbow Hamilton cycle hit rate rises with p", budget: Duration::from_secs(600), run: rainbow_demo },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; took {elapsed:.2?}, budget {:?}", c.budget)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {} ({detail}; {elapsed:.2?})", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {} ({why}; {elapsed:.2?})", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
