use rand::seq::SliceRandom;
use rand::Rng;
use rmhsbm::estimation::{aggregate_summaries, bic_delta, summarize};
use rmhsbm::hierarchy::{build_parameter_groups, presets, SymMatrix};
use rmhsbm::io::{load_population, read_graph, write_edge_list, write_membership, write_population};
use rmhsbm::sampling::{draw_model_parameters, sample_conditional_sbm, BetaPrior};
use rmhsbm::testing::run_tests;
use rmhsbm::{FlatModel, Membership, Method, Seed};

const INDIVIDUALS: usize = 57;
const BLOCKS: usize = 70;

/// 57 individuals on the 70-block two-hemisphere hierarchy, each with its own
/// block sizes and a scrambled vertex order, round-trip through files and run
/// through every method.
#[test]
fn heterogeneous_population_round_trip() {
    let spec = presets::bnu1(1);
    let groups = build_parameter_groups(&spec);
    let master = Seed::new(57);
    let model = draw_model_parameters(&groups, BetaPrior::default(), master).unwrap();
    let mut rng = master.derive("sizes", 0).rng();
    let graphs: Vec<_> = (0..INDIVIDUALS)
        .map(|i| {
            let sizes: Vec<usize> = (0..BLOCKS).map(|_| rng.random_range(2..=6)).collect();
            let mut labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect();
            labels.shuffle(&mut rng);
            let individual = FlatModel::new(model.matrix().clone(), sizes).unwrap();
            sample_conditional_sbm(&individual, &Membership::new(labels, BLOCKS).unwrap(), master.derive("graph", i as u64)).unwrap()
        })
        .collect();

    let dir = tempfile::tempdir().unwrap();
    let manifest = write_population(dir.path(), &graphs, 57).unwrap();
    let (loaded_manifest, loaded) = load_population(&manifest, Some(BLOCKS)).unwrap();
    assert_eq!(loaded_manifest.members.len(), INDIVIDUALS);
    assert_eq!(loaded, graphs);

    let population: Vec<_> = loaded.iter().map(|g| summarize(g).unwrap()).collect();
    let vertex_counts: std::collections::BTreeSet<usize> = population.iter().map(|s| s.vertex_count()).collect();
    assert!(vertex_counts.len() > 1, "individuals should differ in size");
    assert_eq!(aggregate_summaries(&population).unwrap().graph_count(), INDIVIDUALS);
    for method in Method::ALL {
        let report = run_tests(&population, &groups, method, 0.05).unwrap();
        assert_eq!(report.groups.len(), 631);
        assert_eq!(report.rejection_matrix.len(), BLOCKS);
        assert!(report.m <= 631);
    }
}

/// One graph at the low end of the real-data range: 9312 vertices in 70 blocks
/// with an average degree of about 43.
#[test]
fn full_size_graph_parses_and_runs() {
    let spec = presets::bnu1(1);
    let groups = build_parameter_groups(&spec);
    let mut sizes = vec![133; BLOCKS];
    sizes[0] += 9312 - 133 * BLOCKS;
    let k = BLOCKS;
    let values: Vec<f64> = rmhsbm::cell::cells(k).map(|c| if c.is_diagonal() { 0.05 } else { 0.0039 }).collect();
    let model = FlatModel::new(SymMatrix::from_upper(k, values).unwrap(), sizes.clone()).unwrap();
    let graph = sample_conditional_sbm(&model, &Membership::contiguous(&sizes), Seed::new(3)).unwrap();
    assert_eq!(graph.vertex_count(), 9312);
    let degree = 2.0 * graph.edge_count() as f64 / 9312.0;
    assert!((40.0..=50.0).contains(&degree), "average degree {degree}");

    let dir = tempfile::tempdir().unwrap();
    let (edges, labels) = (dir.path().join("g.edges.csv"), dir.path().join("g.membership.csv"));
    write_edge_list(&edges, &graph).unwrap();
    write_membership(&labels, graph.membership()).unwrap();
    let loaded = read_graph(&edges, &labels, Some(BLOCKS)).unwrap();
    assert_eq!(loaded, graph);
    let report = bic_delta(&summarize(&loaded).unwrap(), &groups).unwrap();
    assert!(report.delta.is_finite());
}
