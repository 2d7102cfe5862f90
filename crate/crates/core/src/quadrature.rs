//! Adaptive Gauss-Kronrod (7, 15) integration.

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_DEPTH: u32 = 48;

/// One 15-point Kronrod estimate with the embedded 7-point Gauss error.
fn kronrod<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5) * (b - a);
    let mid = T::lit(0.5) * (a + b);
    let fc = f(mid);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(mid - dx) + f(mid + dx);
        k = k + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            g = g + pair * T::lit(WG[j / 2]);
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Integrates `f` over `[a, b]`, bisecting until the summed error estimates
/// fall below `abs_tol`.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, abs_tol: T) -> T {
    fn recurse<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T, whole: (T, T), depth: u32) -> T {
        let (value, err) = whole;
        if err <= tol || depth >= MAX_DEPTH {
            return value;
        }
        let mid = T::lit(0.5) * (a + b);
        let left = kronrod(f, a, mid);
        let right = kronrod(f, mid, b);
        let half_tol = T::lit(0.5) * tol;
        recurse(f, a, mid, half_tol, left, depth + 1) + recurse(f, mid, b, half_tol, right, depth + 1)
    }
    if a == b {
        return T::zero();
    }
    let whole = kronrod(&f, a, b);
    recurse(&f, a, b, abs_tol, whole, 0)
}
