//! Globally adaptive Gauss-Kronrod (7/15) quadrature with infinite-endpoint
//! substitutions.

use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any single subinterval.
    pub max_depth: u32,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 50,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

impl Quadrature {
    /// Integrates over a finite interval.
    fn finite<F: Fn(f64) -> f64>(&self, f: &F, breaks: &[f64]) -> QuadResult {
        let mut heap = BinaryHeap::new();
        let mut value = 0.0;
        let mut error = 0.0;
        for w in breaks.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let (v, e) = gk15(f, w[0], w[1]);
            value += v;
            error += e;
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value: v,
                error: e,
                depth: 0,
            });
        }
        while error > self.abs_tol.max(self.rel_tol * value.abs()) && heap.len() < self.max_intervals
        {
            let Some(seg) = heap.pop() else { break };
            if seg.depth >= self.max_depth {
                // worst segment cannot be refined further; keep it and stop
                heap.push(seg);
                break;
            }
            let mid = 0.5 * (seg.a + seg.b);
            let (v1, e1) = gk15(f, seg.a, mid);
            let (v2, e2) = gk15(f, mid, seg.b);
            value += v1 + v2 - seg.value;
            error += e1 + e2 - seg.error;
            for (a, b, v, e) in [(seg.a, mid, v1, e1), (mid, seg.b, v2, e2)] {
                heap.push(Segment {
                    a,
                    b,
                    value: v,
                    error: e,
                    depth: seg.depth + 1,
                });
            }
        }
        // re-sum to shed the drift of the running totals
        let value = heap.iter().map(|s| s.value).sum();
        let error = heap.iter().map(|s| s.error).sum();
        QuadResult { value, error }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> QuadResult {
        self.integrate_with_breaks(f, a, b, &[])
    }

    /// Integrates over `[a, b]`, splitting first at every break point inside it.
    ///
    /// Infinite tails are mapped to a finite parameter interval.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> QuadResult {
        if a == b {
            return QuadResult {
                value: 0.0,
                error: 0.0,
            };
        }
        if a > b {
            let r = self.integrate_with_breaks(f, b, a, breaks);
            return QuadResult {
                value: -r.value,
                error: r.error,
            };
        }
        let mut inner: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|&x| x.is_finite() && x > a && x < b)
            .collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();

        // finite stretches are integrated in x; only the tails beyond the
        // outermost finite point are mapped, which keeps the mapping's
        // round-off away from features near the breaks
        let mut pts = Vec::with_capacity(inner.len() + 2);
        if a.is_finite() {
            pts.push(a);
        }
        pts.extend(inner);
        if b.is_finite() {
            pts.push(b);
        }
        if pts.is_empty() {
            pts.push(0.0);
        }
        let lo = pts[0];
        let hi = pts[pts.len() - 1];
        let mut total = self.finite(&f, &pts);
        if !a.is_finite() {
            // x = lo - (1 - s) / s, s in (0, 1]
            let g = |s: f64| f(lo - (1.0 - s) / s) / (s * s);
            let r = self.finite(&g, &[0.0, 1.0]);
            total.value += r.value;
            total.error += r.error;
        }
        if !b.is_finite() {
            // x = hi + s / (1 - s), s in [0, 1)
            let g = |s: f64| {
                let d = 1.0 - s;
                f(hi + s / d) / (d * d)
            };
            let r = self.finite(&g, &[0.0, 1.0]);
            total.value += r.value;
            total.error += r.error;
        }
        total
    }
}
