//! Two-parameter Nelder-Mead simplex minimization.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexResult {
    pub point: [f64; 2],
    pub value: f64,
    pub iterations: usize,
}

/// Minimize `f` from `start` with an initial simplex of edge `step`.
///
/// Stops after `max_iterations` or once every vertex lies within `xtol` of the best
/// one. The returned point is a vertex `f` was evaluated at, never an interpolation.
pub fn nelder_mead<F>(f: F, start: [f64; 2], step: f64, max_iterations: usize, xtol: f64) -> SimplexResult
where
    F: Fn([f64; 2]) -> f64,
{
    let mut simplex = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut values = simplex.map(&f);
    let mut iterations = 0;
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    while iterations < max_iterations {
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let spread = simplex[1..]
            .iter()
            .map(|v| (v[0] - simplex[0][0]).abs().max((v[1] - simplex[0][1]).abs()))
            .fold(0.0, f64::max);
        if spread <= xtol {
            break;
        }
        iterations += 1;

        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let (contracted, fc) = if fr < values[2] {
                let c = lerp(centroid, reflected, 0.5);
                (c, f(c))
            } else {
                let c = lerp(centroid, simplex[2], 0.5);
                (c, f(c))
            };
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = lerp(simplex[0], simplex[k], 0.5);
                    values[k] = f(simplex[k]);
                }
            }
        }
    }

    let best = (0..3)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)))
        .expect("three vertices");
    SimplexResult {
        point: simplex[best],
        value: values[best],
        iterations,
    }
}
