use std::f64::consts::PI;

use crate::circuit::Gate;

/// Appends `ccz(a, b, c)` as the nearest-neighbour T/CNOT network with eight
/// CNOTs: phases `a + b + c - (a^b) - (b^c) - (a^c) + (a^b^c)` in units of pi/4.
pub(crate) fn ccz(out: &mut Vec<Gate>, a: usize, b: usize, c: usize) {
    let sweep = |out: &mut Vec<Gate>| {
        out.push(Gate::pair("cx", a, b));
        out.push(Gate::pair("cx", b, c));
    };
    out.push(Gate::single("t", a));
    out.push(Gate::single("t", b));
    out.push(Gate::single("t", c));
    sweep(out);
    out.push(Gate::single("tdg", b));
    out.push(Gate::single("t", c));
    sweep(out);
    out.push(Gate::single("tdg", c));
    sweep(out);
    out.push(Gate::single("tdg", c));
    sweep(out);
}

/// Toffoli `target ^= c1 & c2` as `H ccz H`, eight CNOTs.
pub(crate) fn toffoli(out: &mut Vec<Gate>, c1: usize, c2: usize, target: usize) {
    out.push(Gate::single("h", target));
    ccz(out, c1, c2, target);
    out.push(Gate::single("h", target));
}

/// Same unitary as [`toffoli`] with the diagonal part emitted back to front.
pub(crate) fn toffoli_mirrored(out: &mut Vec<Gate>, c1: usize, c2: usize, target: usize) {
    let mut diag = Vec::with_capacity(17);
    ccz(&mut diag, c1, c2, target);
    out.push(Gate::single("h", target));
    out.extend(diag.into_iter().rev());
    out.push(Gate::single("h", target));
}

/// Controlled phase `diag(1, 1, 1, e^{i theta})`.
pub(crate) fn cphase(control: usize, target: usize, theta: f64) -> Gate {
    Gate::pair("cp", control, target).with_param(theta)
}

/// `pi / 2^k`.
pub(crate) fn phase_angle(k: usize) -> f64 {
    PI / f64::powi(2.0, k as i32)
}
