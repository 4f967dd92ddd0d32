use ndarray::Array2;

use super::Graph;

/// Unweighted combinatorial Laplacian `L = D - A`.
pub fn laplacian(g: &Graph) -> Array2<f64> {
    let n = g.node_count();
    let mut l = Array2::zeros((n, n));
    for (i, j) in g.edges() {
        l[[i, j]] = -1.0;
        l[[j, i]] = -1.0;
        l[[i, i]] += 1.0;
        l[[j, j]] += 1.0;
    }
    l
}

/// Eigenvalues of a symmetric matrix in ascending order, by cyclic Jacobi
/// rotations. Intended for the dense n <= 512 matrices used here.
pub fn symmetric_eigenvalues(mut a: Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[[p, q]] * a[[p, q]])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[[p, p]] -= t * apq;
                a[[q, q]] += t * apq;
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let g = a[[r, p]];
                    let h = a[[r, q]];
                    let new_rp = g - s * (h + g * tau);
                    let new_rq = h + s * (g - h * tau);
                    a[[r, p]] = new_rp;
                    a[[p, r]] = new_rp;
                    a[[r, q]] = new_rq;
                    a[[q, r]] = new_rq;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[[i, i]]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Second-smallest Laplacian eigenvalue (Fiedler value). Zero for graphs with
/// fewer than two nodes.
pub fn algebraic_connectivity(g: &Graph) -> f64 {
    if g.node_count() < 2 {
        return 0.0;
    }
    let eig = symmetric_eigenvalues(laplacian(g));
    eig[1].max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))).unwrap()
    }

    #[test]
    fn complete_graph_spectrum() {
        for n in 2..=20 {
            assert!((algebraic_connectivity(&complete(n)) - n as f64).abs() < 1e-6, "K_{n}");
        }
    }

    #[test]
    fn path_and_cycle_closed_forms() {
        use std::f64::consts::PI;
        let n = 9;
        let path = Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap();
        let expected = 2.0 - 2.0 * (PI / n as f64).cos();
        assert!((algebraic_connectivity(&path) - expected).abs() < 1e-10);
        let cycle = Graph::from_edges(n, (1..n).map(|v| (v - 1, v)).chain([(0, n - 1)])).unwrap();
        let expected = 2.0 - 2.0 * (2.0 * PI / n as f64).cos();
        assert!((algebraic_connectivity(&cycle) - expected).abs() < 1e-10);
    }

    #[test]
    fn disconnected_is_zero() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(algebraic_connectivity(&g).abs() < 1e-12);
        assert_eq!(algebraic_connectivity(&Graph::new(1)), 0.0);
    }

    #[test]
    fn eigenvalues_of_diagonal_and_2x2() {
        let a = ndarray::array![[2.0, 1.0], [1.0, 2.0]];
        let e = symmetric_eigenvalues(a);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }
}
