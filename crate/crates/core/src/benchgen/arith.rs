use super::toffoli::{cphase, phase_angle, toffoli, toffoli_mirrored};
use crate::circuit::{asap_schedule, Circuit, Gate};
use crate::error::{Error, Result};

/// Qubit layout of the ripple-carry adder: `c0, b0, a0, b1, a1, ..., z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CuccaroLayout {
    pub bits: usize,
}

impl CuccaroLayout {
    pub fn carry_in(&self) -> usize {
        0
    }

    pub fn a(&self, i: usize) -> usize {
        2 + 2 * i
    }

    pub fn b(&self, i: usize) -> usize {
        1 + 2 * i
    }

    pub fn carry_out(&self) -> usize {
        2 * self.bits + 1
    }

    pub fn width(&self) -> usize {
        2 * self.bits + 2
    }
}

fn maj(out: &mut Vec<Gate>, x: usize, y: usize, z: usize) {
    out.push(Gate::pair("cx", z, y));
    out.push(Gate::pair("cx", z, x));
    toffoli(out, x, y, z);
}

fn uma(out: &mut Vec<Gate>, x: usize, y: usize, z: usize) {
    out.push(Gate::single("x", y));
    out.push(Gate::pair("cx", x, y));
    toffoli_mirrored(out, x, y, z);
    out.push(Gate::single("x", y));
    out.push(Gate::pair("cx", z, x));
    out.push(Gate::pair("cx", z, y));
}

/// Ripple-carry adder `b += a` with carry in and carry out, over
/// `b = (data_qubits - 2) / 2` bit registers. Leftover data qubits stay idle.
pub fn gen_cuccaro(data_qubits: usize, total_qubits: usize) -> Result<Circuit> {
    if data_qubits < 4 {
        return Err(Error::Bench(format!(
            "cuccaro needs at least 4 data qubits, got {data_qubits}"
        )));
    }
    check_total(data_qubits, total_qubits)?;
    let l = CuccaroLayout {
        bits: (data_qubits - 2) / 2,
    };
    let n = l.bits;
    let mut g = Vec::new();
    let carry = |i: usize| if i == 0 { l.carry_in() } else { l.a(i - 1) };
    for i in 0..n {
        maj(&mut g, carry(i), l.b(i), l.a(i));
    }
    g.push(Gate::pair("cx", l.a(n - 1), l.carry_out()));
    for i in (0..n).rev() {
        uma(&mut g, carry(i), l.b(i), l.a(i));
    }
    asap_schedule(g, data_qubits)
}

/// Draper adder `b += a` in the Fourier basis: QFT on `b`, then the
/// controlled-phase additions from `a`. The result is left in the Fourier
/// basis. Registers are `a = 0..m` and `b = m..2m`, least significant first.
pub fn gen_qft_adder(data_qubits: usize, total_qubits: usize) -> Result<Circuit> {
    if data_qubits % 2 == 1 || data_qubits < 2 {
        return Err(Error::Bench(format!(
            "qft adder needs an even number of data qubits, got {data_qubits}"
        )));
    }
    check_total(data_qubits, total_qubits)?;
    let m = data_qubits / 2;
    let (a, b) = (|i: usize| i, |i: usize| m + i);
    let mut g = Vec::new();
    for j in (0..m).rev() {
        g.push(Gate::single("h", b(j)));
        for k in (0..j).rev() {
            g.push(cphase(b(k), b(j), phase_angle(j - k)));
        }
    }
    for j in 0..m {
        for i in (0..=j).rev() {
            g.push(cphase(a(i), b(j), phase_angle(j - i)));
        }
    }
    asap_schedule(g, data_qubits)
}

/// Number of controlled-phase gates emitted by [`gen_qft_adder`].
pub fn qft_adder_cphase_count(data_qubits: usize) -> usize {
    let m = data_qubits / 2;
    m * (m - 1) / 2 + m * (m + 1) / 2
}

pub(crate) fn check_total(data: usize, total: usize) -> Result<()> {
    if data > total {
        return Err(Error::Bench(format!(
            "data qubits {data} exceed total qubits {total}"
        )));
    }
    Ok(())
}
