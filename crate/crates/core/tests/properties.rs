use proptest::prelude::*;
use rand::seq::index;

use redci_core::cimodel::{all_triples, CiStatement, CiTriple, VarSet, VariableUniverse};
use redci_core::citest::{partial_correlation, set_partial_correlation};
use redci_core::discovery::{mmd_tree_tally, tree_statements, Tally};
use redci_core::graphoid::ClosureEngine;
use redci_core::graphs::{dag_parent_sets, Dag, Graph, GraphClass, UndirectedGraph};
use redci_core::redundancy::Codebook;
use redci_core::synth::{
    er_dag, factor_gibbs_sample, linear_gaussian, random_spanning_tree, FactorModel, GibbsConfig, Rng,
};

/// Separation in the moralized ancestral graph.
fn moral_separates(d: &Dag, t: &CiTriple) -> bool {
    let keep = d.ancestral_closure(t.x.union(t.y).union(t.z));
    let mut edges = Vec::new();
    for v in keep.iter() {
        let pa = d.parents(v);
        edges.extend(pa.iter().map(|p| (p, v)));
        for a in pa.iter() {
            edges.extend(pa.iter().filter(|&b| b > a).map(|b| (a, b)));
        }
    }
    let moral = UndirectedGraph::new(d.universe().clone(), &edges).unwrap();
    let reach = moral.reachable(t.x, t.z.union(d.universe().all().minus(keep)));
    reach.is_disjoint(t.y)
}

fn codebook_graph(n: usize, class: GraphClass, pick: usize) -> Graph {
    let u = VariableUniverse::numbered("X", n).unwrap();
    let book = Codebook::get(n, class).unwrap();
    book.graph(pick % book.len(), &u)
}

fn spd(entries: &[f64], n: usize) -> nalgebra::DMatrix<f64> {
    let b = nalgebra::DMatrix::from_row_slice(n, n, &entries[..n * n]);
    &b * b.transpose() + nalgebra::DMatrix::identity(n, n) * 0.05
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn d_separation_matches_moralization(n in 2usize..=5, pick in any::<usize>()) {
        let g = codebook_graph(n, GraphClass::Dags, pick);
        let d = g.as_dag().unwrap();
        for t in all_triples(g.universe(), false, None).unwrap().iter() {
            prop_assert_eq!(d.d_separates(t.x, t.y, t.z), moral_separates(d, t));
        }
    }

    #[test]
    fn faithful_closure_agrees_with_the_graph(n in 2usize..=4, pick in any::<usize>(), undirected in any::<bool>()) {
        let class = if undirected { GraphClass::UndirectedGraphs } else { GraphClass::Dags };
        let g = codebook_graph(n, class, pick);
        let s = all_triples(g.universe(), true, None).unwrap();
        let faithful: Vec<CiStatement> = s.iter().map(|t| CiStatement::new(*t, g.verdict(t))).collect();
        let mut e = ClosureEngine::new(g.universe(), true).unwrap();
        prop_assert!(e.add_all(&faithful));
        for t in e.determined() {
            prop_assert_eq!(e.verdict(t), Some(g.verdict(t)));
        }
    }

    #[test]
    fn closure_is_order_independent(n in 3usize..=4, pick in any::<usize>(), seed in any::<u64>()) {
        let g = codebook_graph(n, GraphClass::Dags, pick);
        let s = all_triples(g.universe(), true, None).unwrap().to_vec();
        let mut rng = Rng::new(seed);
        let k = s.len().min(6);
        let chosen: Vec<CiStatement> = index::sample(&mut rng, s.len(), k)
            .into_iter()
            .map(|i| CiStatement::new(s[i], g.verdict(&s[i])))
            .collect();
        let mut a = ClosureEngine::new(g.universe(), true).unwrap();
        a.add_all(&chosen);
        let mut b = ClosureEngine::new(g.universe(), true).unwrap();
        for st in chosen.iter().rev() {
            b.add(st);
        }
        let all = all_triples(g.universe(), false, None).unwrap();
        for t in all.iter() {
            prop_assert_eq!(a.status(t), b.status(t));
        }
    }

    #[test]
    fn triples_are_symmetric_after_canonicalization(x in 0usize..6, y in 0usize..6, z in 0u64..64) {
        prop_assume!(x != y);
        let z = VarSet(z).without(x).without(y);
        let a = CiTriple::singleton(x, y, z).unwrap();
        let b = CiTriple::singleton(y, x, z).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a.is_canonical());
    }

    #[test]
    fn partial_correlations_are_bounded_and_symmetric(entries in proptest::collection::vec(-2.0f64..2.0, 16)) {
        let c = spd(&entries, 4);
        for z in VarSet::full(4).without(0).without(1).subsets() {
            let r = partial_correlation(&c, 0, 1, z).unwrap();
            prop_assert!(r.abs() <= 1.0 + 1e-12);
            prop_assert!((r - partial_correlation(&c, 1, 0, z).unwrap()).abs() < 1e-12);
        }
        let joint = set_partial_correlation(&c, VarSet::singleton(0), VarSet::singleton(1).with(3), VarSet::singleton(2)).unwrap();
        let single = partial_correlation(&c, 0, 1, VarSet::singleton(2)).unwrap().abs();
        prop_assert!(joint + 1e-12 >= single);
    }
}

#[test]
fn dag_counts_follow_robinson_recurrence() {
    fn binom(n: u64, k: u64) -> i128 {
        (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
    }
    let mut a = vec![1i128];
    for n in 1..=5u64 {
        let v = (1..=n)
            .map(|k| {
                let sign = if k % 2 == 1 { 1 } else { -1 };
                sign * binom(n, k) * (1i128 << (k * (n - k))) * a[(n - k) as usize]
            })
            .sum();
        a.push(v);
    }
    let counted: Vec<i128> = (0..=5).map(|n| dag_parent_sets(n).count() as i128).collect();
    assert_eq!(counted, a);
}

/// Decodes a tree from symmetric flips of the given triples.
fn decode_with_symmetric_flips(u: &VariableUniverse, tree: &Graph, flips: &[usize]) -> bool {
    let triples = tree_statements(u).to_vec();
    let tally: Vec<Tally> = triples
        .iter()
        .enumerate()
        .map(|(i, &triple)| {
            let indep = tree.separates_triple(&triple) != flips.contains(&i);
            Tally {
                triple,
                independent: if indep { 2 } else { 0 },
                dependent: if indep { 0 } else { 2 },
            }
        })
        .collect();
    let r = mmd_tree_tally(u, &tally).unwrap();
    r.is_unique() && Graph::from(r.representative().clone()) == *tree
}

#[test]
fn symmetric_flips_are_corrected_below_half_the_code_distance() {
    for n in 4..=6 {
        let u = VariableUniverse::numbered("X", n).unwrap();
        let len = tree_statements(&u).len();
        let root = Rng::new(11).child(n as u64);
        for t in 0..50 {
            let mut rng = root.child(t);
            let tree: Graph = random_spanning_tree(&u, &mut rng).into();
            let flips = index::sample(&mut rng, len, (n - 2) / 2).into_vec();
            assert!(decode_with_symmetric_flips(&u, &tree, &flips), "n={n} trial {t}");
        }
    }
}

#[test]
fn two_symmetric_flips_can_defeat_five_node_trees() {
    let u = VariableUniverse::numbered("X", 5).unwrap();
    let len = tree_statements(&u).len();
    let mut rng = Rng::new(5);
    let found = (0..500).any(|_| {
        let tree: Graph = random_spanning_tree(&u, &mut rng).into();
        let flips = index::sample(&mut rng, len, 2).into_vec();
        !decode_with_symmetric_flips(&u, &tree, &flips)
    });
    assert!(found);
}

#[test]
fn spanning_trees_cover_all_labelled_trees() {
    let u = VariableUniverse::numbered("X", 4).unwrap();
    let mut rng = Rng::new(3);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..2000 {
        let t = random_spanning_tree(&u, &mut rng);
        assert!(t.is_spanning_tree());
        seen.insert(t.edges());
    }
    assert_eq!(seen.len(), 16);
}

#[test]
fn er_dags_have_expected_edge_count() {
    let u = VariableUniverse::numbered("X", 5).unwrap();
    let mut rng = Rng::new(4);
    let trials = 20_000;
    let total: usize = (0..trials).map(|_| er_dag(&u, 0.3, &mut rng).unwrap().edge_count()).sum();
    let mean = total as f64 / trials as f64;
    assert!((mean - 3.0).abs() < 0.1, "mean edges {mean}");
}

#[test]
fn linear_gaussian_samples_match_exact_covariance() {
    let u = VariableUniverse::numbered("X", 4).unwrap();
    let mut rng = Rng::new(6);
    let d = Dag::new(u, &[(0, 1), (1, 2), (0, 3), (2, 3)]).unwrap();
    let scm = linear_gaussian(&d, &mut rng);
    let data = scm.sample(200_000, &mut rng);
    let gap = (data.covariance() - scm.exact_covariance()).abs().max();
    assert!(gap < 0.05, "covariance gap {gap}");
}

#[test]
fn gibbs_marginals_match_joint_table() {
    let mut rng = Rng::new(8);
    let model = FactorModel::square(&mut rng);
    let joint = model.joint();
    let data = factor_gibbs_sample(&model, 40_000, GibbsConfig::default(), &mut rng);
    for v in 0..model.graph().n() {
        let exact: f64 = joint.iter().enumerate().filter(|(s, _)| s >> v & 1 == 1).map(|(_, p)| p).sum();
        let observed = data.column(v).iter().sum::<f64>() / data.rows() as f64;
        assert!((exact - observed).abs() < 0.02, "variable {v}: {exact} vs {observed}");
    }
}
