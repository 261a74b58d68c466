use gspx_core::graphon::{AnalyticKernel, AnalyticSignal, KernelRange};
use gspx_core::homomorphism::{
    check_norm_sandwich, closed_walk_count, cut_norm_step, cycle_density_graph,
    cycle_density_graphon, hom_count, hom_density_graph, hom_density_graphon_mc,
    homomorphism_convergence_trace, trace_power, Motif,
};
use gspx_core::linalg::{eigen_projection, symmetric_eigenvalues, Matrix, SymmetricEigen};
use gspx_core::sampling::{sample_graphon_signal, sample_w_random_graph};
use gspx_core::spectral::{
    gft, graph_spectrum, igft, iwft, step_spectrum, wft_numeric, wft_step, SignedIndex,
};
use gspx_core::{Graph, GraphSignal, Graphon, GraphonSignal, StepGraphon, StepSignal};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn graph_from(n: usize, w: &[f64]) -> Graph {
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j, w[k]));
            k += 1;
        }
    }
    Graph::new(n, &edges).unwrap()
}

fn weighted_graph(max_n: usize) -> impl Strategy<Value = (Graph, GraphSignal)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], n * (n - 1) / 2),
            proptest::collection::vec(-3.0f64..3.0, n),
        )
            .prop_map(move |(w, x)| (graph_from(n, &w), GraphSignal::new(x).unwrap()))
    })
}

fn unweighted_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(prop_oneof![Just(0.0), Just(1.0)], n * (n.max(1) - 1) / 2)
            .prop_map(move |w| graph_from(n, &w))
    })
}

fn step_graphon(max_n: usize) -> impl Strategy<Value = StepGraphon> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0.0f64..=1.0, n * (n + 1) / 2).prop_map(move |v| {
            let mut m = Matrix::zeros(n, n);
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    m[(i, j)] = v[k];
                    m[(j, i)] = v[k];
                    k += 1;
                }
            }
            StepGraphon::new(m, KernelRange::UNIT).unwrap()
        })
    })
}

fn oracle_eigenvalues(m: &Matrix) -> Vec<f64> {
    let d = DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let mut v: Vec<f64> = d.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_match_independent_solver((g, _) in weighted_graph(40)) {
        let ours = symmetric_eigenvalues(g.weights()).unwrap();
        let theirs = oracle_eigenvalues(g.weights());
        let scale = g.weights().max_abs().max(1.0);
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn eigenpairs_have_small_residuals((g, _) in weighted_graph(40)) {
        let e = SymmetricEigen::new(g.weights()).unwrap();
        let n = g.n();
        for i in 0..n {
            let v = e.vector(i);
            let av = g.weights().mul_vec(v);
            let r: f64 = av.iter().zip(v).map(|(a, x)| (a - e.values[i] * x).powi(2)).sum();
            prop_assert!(r.sqrt() <= 1e-10 * (n as f64));
            for k in 0..i {
                let d: f64 = v.iter().zip(e.vector(k)).map(|(a, b)| a * b).sum();
                prop_assert!(d.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn projection_agrees_with_full_decomposition((g, x) in weighted_graph(30)) {
        let e = SymmetricEigen::new(g.weights()).unwrap();
        let (values, coeffs) = eigen_projection(g.weights(), x.values()).unwrap();
        prop_assert_eq!(&values, &e.values);
        for (i, c) in coeffs.iter().enumerate() {
            let full: f64 = e.vector(i).iter().zip(x.values()).map(|(a, b)| a * b).sum();
            prop_assert!((full.abs() - c.abs()).abs() <= 1e-10);
        }
    }

    #[test]
    fn parseval_and_inverse((g, x) in weighted_graph(60)) {
        let c = gft(&g, &x).unwrap();
        prop_assert!((c.norm() - x.norm()).abs() <= 1e-8);
        let back = igft(&g, &c).unwrap();
        for (a, b) in back.values().iter().zip(x.values()) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn induced_graphon_spectrum_is_scaled_graph_spectrum((g, x) in weighted_graph(50)) {
        let n = g.n() as f64;
        let gs = graph_spectrum(&g).unwrap();
        let gc = gft(&g, &x).unwrap();
        let w = StepGraphon::induced(&g);
        let sx = StepSignal::induced(&x).unwrap();
        let (ws, wc) = wft_step(&w, &sx).unwrap();
        prop_assert_eq!(gs.len(), ws.len());
        for (a, b) in gs.components().iter().zip(ws.components()) {
            prop_assert_eq!(a.index, b.index);
            prop_assert!((a.sigma / n - b.sigma).abs() <= 1e-10);
        }
        for (a, b) in gc.coefficients.iter().zip(&wc.coefficients) {
            prop_assert!((a.value / n.sqrt() - b.value).abs() <= 1e-10);
        }
        // indices outside the matrix spectrum carry nothing
        let outside = SignedIndex::new(g.n() as i64 + 1).unwrap();
        prop_assert_eq!(wc.get(outside), 0.0);
        prop_assert_eq!(ws.sigma(outside), 0.0);
    }

    #[test]
    fn step_eigenfunctions_satisfy_the_integral_equation((g, x) in weighted_graph(30)) {
        // (T_W φ)(block k) = (1/N) Σ_l W_kl φ_l, computed without the library's scaling
        let w = StepGraphon::induced(&g);
        let nb = w.blocks();
        let (spec, coeffs) = wft_step(&w, &StepSignal::induced(&x).unwrap()).unwrap();
        for (comp, c) in spec.components().iter().zip(&coeffs.coefficients) {
            let phi = &comp.vector;
            let l2: f64 = phi.iter().map(|v| v * v).sum::<f64>() / nb as f64;
            prop_assert!((l2 - 1.0).abs() <= 1e-10);
            for k in 0..nb {
                let tphi: f64 = (0..nb).map(|l| w.values()[(k, l)] * phi[l]).sum::<f64>() / nb as f64;
                prop_assert!((tphi - comp.sigma * phi[k]).abs() <= 1e-10);
            }
            let integral: f64 = x.values().iter().zip(phi).map(|(a, b)| a * b).sum::<f64>() / nb as f64;
            prop_assert!((integral - c.value).abs() <= 1e-10);
        }
        let back = iwft(&spec, &coeffs).unwrap();
        for (a, b) in back.values().iter().zip(x.values()) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn signed_indices_follow_eigenvalue_order((g, _) in weighted_graph(30)) {
        let s = graph_spectrum(&g).unwrap();
        let pos: Vec<f64> = s.components().iter().filter(|c| c.index.get() > 0).map(|c| c.sigma).collect();
        let neg: Vec<f64> = s.components().iter().filter(|c| c.index.get() < 0).map(|c| c.sigma).collect();
        prop_assert!(pos.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(pos.iter().all(|&v| v >= 0.0));
        prop_assert!(neg.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(neg.iter().all(|&v| v < 0.0));
        let idx: Vec<i64> = s.indices().map(|j| j.get()).collect();
        let expected: Vec<i64> = (1..=pos.len() as i64).chain((1..=neg.len() as i64).map(|k| -k)).collect();
        prop_assert_eq!(idx, expected);
    }

    #[test]
    fn closed_walks_equal_trace(g in unweighted_graph(7), k in 2usize..=5) {
        let brute = closed_walk_count(k, &g).unwrap();
        prop_assert_eq!(brute, trace_power(g.weights(), k));
        if k >= 3 {
            prop_assert_eq!(hom_count(&Motif::cycle(k).unwrap(), &g).unwrap(), brute);
        }
    }

    #[test]
    fn cycle_density_is_scale_free((g, _) in weighted_graph(25), k in 2usize..=6) {
        let spec = step_spectrum(&StepGraphon::induced(&g)).unwrap();
        let a = cycle_density_graphon(k, &spec).unwrap();
        let b = cycle_density_graph(k, &g).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn norm_sandwich_holds(w in step_graphon(10)) {
        let r = check_norm_sandwich(&w).unwrap();
        prop_assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn cut_norm_of_nonnegative_graphon_is_its_integral(w in step_graphon(12)) {
        let n = w.blocks();
        let total: f64 = w.values().as_slice().iter().sum();
        prop_assert_eq!(cut_norm_step(&w).unwrap().value, total / (n * n) as f64);
    }

    #[test]
    fn sampled_graphs_are_simple_and_reproducible(n in 1usize..60, seed in any::<u64>(), stream in any::<u64>()) {
        let w: Graphon = AnalyticKernel::soft_geometric(2.0).unwrap().into();
        let (g, labels) = sample_w_random_graph(&w, n, seed, stream).unwrap();
        prop_assert_eq!(g.weights().asymmetry(), 0.0);
        prop_assert!((0..n).all(|i| g.weight(i, i) == 0.0));
        prop_assert!(g.weights().as_slice().iter().all(|&v| v == 0.0 || v == 1.0));
        let again = sample_w_random_graph(&w, n, seed, stream).unwrap();
        prop_assert_eq!(&again.0, &g);
        prop_assert_eq!(&again.1, &labels);
        let x: GraphonSignal = AnalyticSignal::Identity.into();
        let xs = sample_graphon_signal(&x, &labels).unwrap();
        prop_assert_eq!(xs.values(), &labels.u[..]);
    }
}

#[test]
fn monte_carlo_agrees_with_exact_graph_density() {
    let g = Graph::new(
        5,
        &[
            (0, 1, 1.0),
            (1, 2, 1.0),
            (2, 0, 1.0),
            (2, 3, 1.0),
            (3, 4, 1.0),
            (4, 2, 1.0),
        ],
    )
    .unwrap();
    let w: Graphon = StepGraphon::induced(&g).into();
    for (motif, seed) in [
        (Motif::edge(), 1),
        (Motif::triangle(), 2),
        (Motif::cycle(4).unwrap(), 3),
    ] {
        let exact = hom_density_graph(&motif, &g).unwrap();
        let mc = hom_density_graphon_mc(&motif, &w, 200_000, seed).unwrap();
        assert!(
            (mc.estimate - exact).abs() <= 4.0 * mc.stderr,
            "{}: {} vs {exact} (stderr {})",
            motif.name(),
            mc.estimate,
            mc.stderr
        );
    }
}

#[test]
fn product_kernel_top_eigenvalue_converges_monotonically() {
    let mut prev = f64::INFINITY;
    for n in [50, 100, 200, 400] {
        let (spec, _) =
            wft_numeric(&AnalyticKernel::Product, &AnalyticSignal::Identity, n).unwrap();
        let err = (spec.sigma(SignedIndex::new(1).unwrap()) - 1.0 / 3.0).abs();
        assert!(err <= prev + 1e-9, "n = {n}: {err} after {prev}");
        prev = err;
    }
    let (spec, _) = wft_numeric(&AnalyticKernel::Product, &AnalyticSignal::Identity, 500).unwrap();
    assert!((spec.sigma(SignedIndex::new(1).unwrap()) - 1.0 / 3.0).abs() <= 5e-3);
}

#[test]
fn sampled_edge_density_approaches_kernel_value() {
    let w: Graphon = AnalyticKernel::constant(0.3).unwrap().into();
    let rows = homomorphism_convergence_trace(&w, &[Motif::edge()], &[10, 40, 160], 8, 5).unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r.mean_abs_error).collect();
    assert!(errs[2] < errs[0], "{errs:?}");
    assert!(errs[2] < 0.02);
}
