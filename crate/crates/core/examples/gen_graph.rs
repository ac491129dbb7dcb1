//! Generates a ring-plus-random digraph and prints its edge list and degrees.
//!
//! ```text
//! cargo run --example gen_graph -- [nodes] [edge_prob] [seed]
//! ```

use quantcons::digraph::Digraph;
use quantcons::rng::{substream, Domain};

fn main() -> quantcons::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(6, |a| a.parse().expect("nodes"));
    let p: f64 = args.next().map_or(0.2, |a| a.parse().expect("edge_prob"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));

    let mut rng = substream(seed, Domain::Graph, 0, 0);
    let g = Digraph::ring_plus_random(n, p, &mut rng)?;
    print!("{}", g.to_edge_list());
    eprintln!("{} nodes, {} edges ({} beyond the ring)", g.n_nodes(), g.edge_count(), g.edge_count() - n);
    for i in 0..n {
        eprintln!("node {i}: out-degree {}, in-degree {}", g.out_degree(i), g.in_degree(i));
    }
    assert!(g.is_strongly_connected());
    Ok(())
}
