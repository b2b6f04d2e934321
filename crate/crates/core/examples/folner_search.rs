//! Følner witnesses for sets and measures: arcs in a cycle, and a measure
//! concentrated on one end of a path.

use coarse_lab::amenability::{folner_search, ula_mu_witness, Outcome, SearchOptions};
use coarse_lab::{FiniteMetricSpace, Graph, ProbMeasure};

fn show(label: &str, out: &Outcome) {
    match out {
        Outcome::Found(w) => println!(
            "{label}: E = {:?}, ratio {:.3}, diameter {}",
            w.set.as_slice(),
            w.ratio,
            w.diameter
        ),
        Outcome::NotFound { best, exhaustive } => println!(
            "{label}: none (proven: {exhaustive}), best ratio {:?}",
            best.as_ref().map(|c| c.ratio)
        ),
    }
}

fn main() -> coarse_lab::Result<()> {
    let c = FiniteMetricSpace::from_graph(&Graph::cycle(64));
    for s_max in [4, 9] {
        let out = folner_search(&c, &c.all_points(), 1, 0.25, s_max, SearchOptions::exact())?;
        show(&format!("C64, ε = 0.25, S_max = {s_max}"), &out);
    }
    // balls of radius 20 exceed the exhaustive cap; the heuristic is opt-in
    let out = folner_search(&c, &c.all_points(), 1, 0.1, 20, SearchOptions::heuristic())?;
    show("C64, ε = 0.1, S_max = 20 (heuristic)", &out);

    let p = FiniteMetricSpace::from_graph(&Graph::path(40));
    let weights: Vec<f64> = (0..40).map(|x| 0.8f64.powi(x)).collect();
    let mu = ProbMeasure::normalized(weights)?;
    let out = ula_mu_witness(&p, &mu, 1, 0.1, 6, SearchOptions::exact())?;
    show("P40 with geometric μ, ε = 0.1", &out);
    Ok(())
}
