//! Adaptive Simpson quadrature for small vector-valued integrands.
//!
//! Several related integrals (normalizations and entropies) share the same
//! density evaluations, so the integrand returns a fixed-size array and the
//! refinement criterion is the worst component.

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<const K: usize> {
    pub value: [f64; K],
    /// Number of integrand evaluations.
    pub evaluations: usize,
    /// False if some subinterval hit the depth limit before meeting its tolerance.
    pub converged: bool,
}

struct Simpson<'a, F, const K: usize> {
    f: &'a F,
    evaluations: usize,
    converged: bool,
    max_depth: u32,
}

fn add<const K: usize>(a: [f64; K], b: [f64; K]) -> [f64; K] {
    std::array::from_fn(|i| a[i] + b[i])
}

fn simpson_rule<const K: usize>(h: f64, fa: &[f64; K], fm: &[f64; K], fb: &[f64; K]) -> [f64; K] {
    std::array::from_fn(|i| h / 6.0 * (fa[i] + 4.0 * fm[i] + fb[i]))
}

impl<F: Fn(f64) -> [f64; K], const K: usize> Simpson<'_, F, K> {
    fn eval(&mut self, x: f64) -> [f64; K] {
        self.evaluations += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: [f64; K],
        fm: [f64; K],
        fb: [f64; K],
        whole: [f64; K],
        tol: f64,
        depth: u32,
    ) -> [f64; K] {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let left = simpson_rule(m - a, &fa, &flm, &fm);
        let right = simpson_rule(b - m, &fm, &frm, &fb);
        let both = add(left, right);
        let err = (0..K)
            .map(|i| (both[i] - whole[i]).abs())
            .fold(0.0, f64::max);
        let scale = (0..K).map(|i| both[i].abs()).fold(0.0, f64::max);
        if err <= 15.0 * tol.max(64.0 * f64::EPSILON * scale) {
            // Richardson extrapolation
            return std::array::from_fn(|i| both[i] + (both[i] - whole[i]) / 15.0);
        }
        if depth >= self.max_depth {
            self.converged = false;
            return both;
        }
        let l = self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
        let r = self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
        add(l, r)
    }
}

/// Integrates `f` over `[a, b]`, first splitting into `panels` equal pieces and
/// then refining each adaptively until the absolute tolerance `tol` is met.
pub fn adaptive_simpson<F, const K: usize>(
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
    tol: f64,
    max_depth: u32,
) -> Integral<K>
where
    F: Fn(f64) -> [f64; K],
{
    let panels = panels.max(1);
    let mut s = Simpson {
        f,
        evaluations: 0,
        converged: true,
        max_depth,
    };
    let width = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total = [0.0; K];
    let mut x0 = a;
    let mut f0 = s.eval(a);
    for p in 0..panels {
        let x1 = if p + 1 == panels { b } else { a + width * (p + 1) as f64 };
        let xm = 0.5 * (x0 + x1);
        let fm = s.eval(xm);
        let f1 = s.eval(x1);
        let whole = simpson_rule(x1 - x0, &f0, &fm, &f1);
        let piece = s.refine(x0, x1, f0, fm, f1, whole, panel_tol, 0);
        total = add(total, piece);
        x0 = x1;
        f0 = f1;
    }
    Integral {
        value: total,
        evaluations: s.evaluations,
        converged: s.converged,
    }
}
