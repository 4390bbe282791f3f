/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmin, min)`. Stops once the bracket is narrower than `tol`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // The endpoints are candidates too: the optimum may sit on a bound.
    [(a, f(a)), (b, f(b)), (c, fc), (d, fd)]
        .into_iter()
        .filter(|(_, v)| !v.is_nan())
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((a, f64::NAN))
}
