use mampcg::sample::seeded_graph;
use mampcg::{
    check_properties, closure, determined_set, eampify, emampify, enumerate_model, marginalize,
    pairwise_base, parse_graph, sample_parameters, serialize_graph, triplexes, ComponentKind,
    Criterion, DeterminationMap, Family, MixedGraph, NodeSet, Relation, RuleKind, SemConfig,
    Separator,
};
use proptest::prelude::*;

fn graph_in(family: Family, max_n: usize) -> impl Strategy<Value = MixedGraph> {
    (any::<u64>(), 2..=max_n, 0.2f64..0.7)
        .prop_map(move |(seed, n, p)| seeded_graph(seed, n, p, family))
}

fn subset_of(n: usize) -> impl Strategy<Value = NodeSet> {
    any::<u64>().prop_map(move |bits| NodeSet::from_indices((0..n).filter(|i| bits >> i & 1 == 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_relations_are_symmetric(g in graph_in(Family::Mamp, 8)) {
        for a in 0..g.n() {
            for b in 0..g.n() {
                prop_assert_eq!(g.neighbors(a).contains(b), g.neighbors(b).contains(a));
                prop_assert_eq!(g.spouses(a).contains(b), g.spouses(b).contains(a));
                prop_assert_eq!(g.parents(a).contains(b), g.children(b).contains(a));
                prop_assert_eq!(g.adjacent(a, b), g.adjacents(a).contains(b));
            }
            let one = NodeSet::singleton(a);
            prop_assert_eq!(g.neighborhood(one, Relation::Neighbors), g.neighbors(a));
        }
    }

    #[test]
    fn undirected_components_refine_connectivity(g in graph_in(Family::Mamp, 8)) {
        let conn = g.components(ComponentKind::Connectivity);
        let und = g.components(ComponentKind::Undirected);
        let cover = und.iter().fold(NodeSet::EMPTY, |acc, c| acc.union(*c));
        prop_assert_eq!(cover, g.all());
        for u in &und {
            prop_assert_eq!(conn.iter().filter(|c| u.is_subset(**c)).count(), 1);
        }
    }

    #[test]
    fn determined_set_is_extensive_and_monotone(
        g in graph_in(Family::Amp, 5),
        a in any::<u64>(),
        b in any::<u64>(),
    ) {
        let eg = eampify(&g).unwrap();
        let n = eg.graph.n();
        let pick = |bits: u64| NodeSet::from_indices((0..n).filter(|i| bits >> i & 1 == 1));
        let z = pick(a);
        let wider = z.union(pick(b));
        let dz = determined_set(&eg.graph, z, &eg.det).unwrap();
        let dw = determined_set(&eg.graph, wider, &eg.det).unwrap();
        prop_assert!(z.is_subset(dz));
        prop_assert!(dz.is_subset(dw));
        prop_assert_eq!(determined_set(&eg.graph, dz, &eg.det).unwrap(), dz);
    }

    #[test]
    fn set_separation_is_pairwise(
        g in graph_in(Family::Mamp, 7),
        xs in any::<u64>(),
        ys in any::<u64>(),
        zs in any::<u64>(),
    ) {
        let n = g.n();
        let pick = |bits: u64| NodeSet::from_indices((0..n).filter(|i| bits >> i & 1 == 1));
        let z = pick(zs);
        let x = pick(xs).minus(z);
        let y = pick(ys).minus(z).minus(x);
        prop_assume!(!x.is_empty() && !y.is_empty());
        for criterion in [Criterion::Mamp, Criterion::MampSimplified] {
            let sep = Separator::new(&g, criterion, &DeterminationMap::new()).unwrap();
            let whole = sep.separated(x, y, z).unwrap();
            let pairs = x.iter().all(|a| {
                y.iter().all(|b| {
                    sep.separated(NodeSet::singleton(a), NodeSet::singleton(b), z).unwrap()
                })
            });
            prop_assert_eq!(whole, pairs);
        }
    }

    #[test]
    fn closure_is_extensive_and_idempotent(g in graph_in(Family::Mamp, 5)) {
        let base = pairwise_base(&g).unwrap();
        let once = closure(&base).unwrap().model;
        prop_assert!(base.is_subset(&once));
        let twice = closure(&once).unwrap().model;
        prop_assert_eq!(&once, &twice);
        prop_assert!(check_properties(&once, &RuleKind::COMPOSITIONAL).unwrap().is_empty());
    }

    #[test]
    fn pairwise_base_is_sound(g in graph_in(Family::Mamp, 6)) {
        let base = pairwise_base(&g).unwrap();
        let model = enumerate_model(&g, Criterion::Mamp, &DeterminationMap::new(), g.all()).unwrap();
        prop_assert!(base.is_subset(&model));
    }

    #[test]
    fn triplexes_are_local(g in graph_in(Family::Mamp, 7)) {
        let all = triplexes(&g).unwrap();
        for t in &all {
            let (a, c) = (g.index_of(&t.endpoints.0).unwrap(), g.index_of(&t.endpoints.1).unwrap());
            prop_assert!(!g.adjacent(a, c));
        }
        // every triplex is visible in the subgraph induced by its three nodes
        for t in &all {
            let nodes = g.set_of(&[&t.endpoints.0, &t.center, &t.endpoints.1]).unwrap();
            let sub = g.induced_subgraph(nodes);
            prop_assert!(triplexes(&sub).unwrap().contains(t));
        }
        let count: usize = (0..g.n())
            .map(|b| {
                let adj: Vec<usize> = g.adjacents(b).iter().collect();
                let mut k = 0;
                for (i, &a) in adj.iter().enumerate() {
                    for &c in &adj[i + 1..] {
                        if g.adjacent(a, c) {
                            continue;
                        }
                        let sub = g.induced_subgraph(NodeSet::from_indices([a, b, c]));
                        k += triplexes(&sub).unwrap().len();
                    }
                }
                k
            })
            .sum();
        prop_assert_eq!(count, all.len());
    }

    #[test]
    fn marginalization_order_does_not_matter(g in graph_in(Family::Mamp, 5), picks in subset_of(5)) {
        let eg = emampify(&g).unwrap();
        let chosen: Vec<String> = picks.iter().filter(|&i| i < g.n()).map(|i| g.name(i).to_string()).collect();
        prop_assume!(chosen.len() >= 2);
        let forward = marginalize(&eg, &chosen);
        let mut reversed = chosen.clone();
        reversed.reverse();
        let stepwise = reversed
            .iter()
            .try_fold(eg.clone(), |acc, name| marginalize(&acc, &[name.as_str()]));
        match (forward, stepwise) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.graph.edge_list_string(), b.graph.edge_list_string()),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "one order failed: {:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn sampling_is_seed_deterministic(seed in any::<u64>(), n in 2usize..7) {
        let a = seeded_graph(seed, n, 0.5, Family::Mamp);
        let b = seeded_graph(seed, n, 0.5, Family::Mamp);
        prop_assert!(a == b);
        let cfg = SemConfig::default();
        prop_assert_eq!(sample_parameters(&a, seed, &cfg).unwrap(), sample_parameters(&b, seed, &cfg).unwrap());
    }

    #[test]
    fn format_round_trips(g in graph_in(Family::Amp, 5)) {
        let eg = eampify(&g).unwrap();
        let text = serialize_graph(&eg.graph, &eg.det);
        let (back, det) = parse_graph(&text).unwrap();
        prop_assert!(back == eg.graph);
        prop_assert_eq!(&det, &eg.det);
        prop_assert_eq!(serialize_graph(&back, &det), text);
    }
}
