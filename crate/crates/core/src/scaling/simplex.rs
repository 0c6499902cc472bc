//! Downhill simplex (Nelder-Mead) in two dimensions.

pub struct SimplexResult {
    pub x: [f64; 2],
    pub value: f64,
    pub iterations: usize,
}

fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Minimises `f` from `start` with initial edge lengths `step`. Stops when
/// the spread of simplex values falls below `ftol` or after `max_iter`.
pub fn nelder_mead<F: Fn([f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    step: [f64; 2],
    ftol: f64,
    max_iter: usize,
) -> SimplexResult {
    let mut pts = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut vals = pts.map(&f);
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);
        let spread = (vals[2] - vals[0]).abs();
        if spread.is_finite() && spread <= ftol * (vals[0].abs() + ftol) {
            break;
        }
        let centroid = lerp(pts[0], pts[1], 0.5);
        let reflected = lerp(centroid, pts[2], -1.0);
        let fr = f(reflected);
        if fr < vals[0] {
            let expanded = lerp(centroid, pts[2], -2.0);
            let fe = f(expanded);
            if fe < fr {
                pts[2] = expanded;
                vals[2] = fe;
            } else {
                pts[2] = reflected;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = reflected;
            vals[2] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[2] {
            let c = lerp(centroid, reflected, 0.5);
            (c, f(c))
        } else {
            let c = lerp(centroid, pts[2], 0.5);
            (c, f(c))
        };
        if fc < vals[2].min(fr) {
            pts[2] = contracted;
            vals[2] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..3 {
            pts[i] = lerp(pts[0], pts[i], 0.5);
            vals[i] = f(pts[i]);
        }
    }
    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    SimplexResult { x: pts[best], value: vals[best], iterations }
}
