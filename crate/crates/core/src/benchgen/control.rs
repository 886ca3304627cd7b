use super::arith::check_total;
use super::toffoli::toffoli;
use crate::circuit::{asap_schedule, Circuit, Gate};
use crate::error::{Error, Result};

pub const MAX_MULTI_CONTROL_DATA: usize = 87;

/// `target ^= AND(ctrls)` with a balanced tree of Toffolis into clean
/// ancillas, which are returned to zero. Needs `ctrls.len() - 2` ancillas.
fn and_tree(out: &mut Vec<Gate>, ctrls: &[usize], target: usize, anc: &[usize]) {
    match ctrls.len() {
        0 => out.push(Gate::single("x", target)),
        1 => out.push(Gate::pair("cx", ctrls[0], target)),
        2 => toffoli(out, ctrls[0], ctrls[1], target),
        _ => {
            let mut level = ctrls.to_vec();
            let mut used = Vec::new();
            let mut free = anc.iter().copied();
            while level.len() > 2 {
                let mut next = Vec::with_capacity(level.len() / 2 + 1);
                for pair in level.chunks(2) {
                    if let [x, y] = *pair {
                        let z = free.next().expect("and_tree ancilla budget");
                        toffoli(out, x, y, z);
                        used.push((x, y, z));
                        next.push(z);
                    } else {
                        next.push(pair[0]);
                    }
                }
                level = next;
            }
            toffoli(out, level[0], level[1], target);
            for &(x, y, z) in used.iter().rev() {
                toffoli(out, x, y, z);
            }
        }
    }
}

/// `target ^= AND(items)` with clean ancillas. When the ancillas cannot hold
/// a full tree, a wave of groups of at most `cap` items is folded into fresh
/// ancillas on disjoint helpers, the wave outputs join the remaining items,
/// and the rest is solved recursively before the wave is undone.
fn mcx(
    out: &mut Vec<Gate>,
    items: &[usize],
    target: usize,
    anc: &[usize],
    cap: usize,
) -> Option<()> {
    let n = items.len();
    if n <= 2 || anc.len() + 2 >= n {
        and_tree(out, items, target, anc);
        return Some(());
    }
    let mut sizes = Vec::new();
    let (mut excess, mut left) = (n - 2 - anc.len(), anc.len());
    while excess > 0 {
        let s = cap.min(excess + 2).min(left + 1);
        if s < 3 {
            break;
        }
        sizes.push(s);
        excess -= s - 2;
        left -= s - 1;
    }
    if sizes.is_empty() {
        return None;
    }
    if excess == 0 && sizes.len() > 1 {
        let (total, m) = (sizes.iter().sum::<usize>(), sizes.len());
        sizes = (0..m)
            .map(|i| total / m + usize::from(i < total % m))
            .collect();
    }
    let mut free = anc;
    let mut pos = 0;
    let mut outputs = Vec::with_capacity(sizes.len());
    let mut folds = Vec::with_capacity(sizes.len());
    for s in sizes {
        let (z, helpers) = (free[0], &free[1..s - 1]);
        free = &free[s - 1..];
        let mut fold = Vec::new();
        and_tree(&mut fold, &items[pos..pos + s], z, helpers);
        pos += s;
        out.extend(fold.iter().cloned());
        folds.push(fold);
        outputs.push(z);
    }
    let mut next = items[pos..].to_vec();
    next.extend(&outputs);
    let rest: Vec<usize> = anc
        .iter()
        .copied()
        .filter(|q| !outputs.contains(q))
        .collect();
    mcx(out, &next, target, &rest, cap)?;
    for fold in folds.into_iter().rev() {
        out.extend(fold);
    }
    Some(())
}

fn two_qubit_depth(gates: &[Gate], width: usize) -> usize {
    let mut level = vec![0usize; width];
    let mut depth = 0;
    for g in gates.iter().filter(|g| g.is_two_qubit()) {
        let l = g.qubits().iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in g.qubits() {
            level[q] = l;
        }
        depth = depth.max(l);
    }
    depth
}

/// Generalized Toffoli over the data qubits: qubits `0..data-1` control
/// qubit `data-1`; qubits `data..total` are clean ancillas. Every group cap
/// is tried and the shallowest decomposition kept.
pub fn gen_multi_control(data_qubits: usize, total_qubits: usize) -> Result<Circuit> {
    if data_qubits > MAX_MULTI_CONTROL_DATA {
        return Err(Error::Bench(format!(
            "multi-control supports at most {MAX_MULTI_CONTROL_DATA} data qubits, got {data_qubits}"
        )));
    }
    if data_qubits < 2 {
        return Err(Error::Bench(format!(
            "multi-control needs at least 2 data qubits, got {data_qubits}"
        )));
    }
    check_total(data_qubits, total_qubits)?;
    let ctrls: Vec<usize> = (0..data_qubits - 1).collect();
    let anc: Vec<usize> = (data_qubits..total_qubits).collect();
    let target = data_qubits - 1;
    let mut best: Option<(usize, usize, Vec<Gate>)> = None;
    let caps = if ctrls.len() <= anc.len() + 2 {
        3..=3
    } else {
        3..=anc.len() + 1
    };
    for cap in caps {
        let mut g = Vec::new();
        if mcx(&mut g, &ctrls, target, &anc, cap).is_none() {
            continue;
        }
        let key = (two_qubit_depth(&g, total_qubits), g.len());
        if best.as_ref().is_none_or(|(d, n, _)| key < (*d, *n)) {
            best = Some((key.0, key.1, g));
        }
    }
    match best {
        Some((_, _, g)) => asap_schedule(g, total_qubits),
        None => Err(Error::Bench(format!(
            "{} ancillas are too few for a {}-control Toffoli",
            anc.len(),
            ctrls.len()
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncillaKind {
    Clean,
    Dirty,
}

/// Copies of the control used to spread the fan-out.
fn copy_count(targets: usize, ancillas: usize) -> usize {
    (((targets as f64).sqrt() / 2.0).floor() as usize + 1).min(ancillas)
}

/// Round-robin assignment of targets to sources.
fn deal(targets: &[usize], sources: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); sources];
    for (i, &t) in targets.iter().enumerate() {
        out[i % sources].push(t);
    }
    out
}

fn interleave(out: &mut Vec<Gate>, sources: &[usize], dealt: &[Vec<usize>]) {
    let rounds = dealt.iter().map(Vec::len).max().unwrap_or(0);
    for r in 0..rounds {
        for (s, ts) in sources.iter().zip(dealt) {
            if let Some(&t) = ts.get(r) {
                out.push(Gate::pair("cx", *s, t));
            }
        }
    }
}

/// Fan-out of X from qubit 0 onto qubits `1..data`, spread through copies of
/// the control held in ancillas `data..total`.
///
/// Clean ancillas are loaded with the control by a doubling tree and later
/// cleared. Dirty ancillas are toggled by the control between two identical
/// rounds of CNOTs onto their targets, so their unknown contents cancel.
pub fn gen_multi_target(
    data_qubits: usize,
    total_qubits: usize,
    kind: AncillaKind,
) -> Result<Circuit> {
    if data_qubits < 2 {
        return Err(Error::Bench(format!(
            "multi-target needs at least 2 data qubits, got {data_qubits}"
        )));
    }
    check_total(data_qubits, total_qubits)?;
    let control = 0;
    let targets: Vec<usize> = (1..data_qubits).collect();
    let copies = copy_count(targets.len(), total_qubits - data_qubits);
    let anc: Vec<usize> = (data_qubits..data_qubits + copies).collect();
    let mut g = Vec::new();
    match kind {
        AncillaKind::Clean => {
            let mut sources = vec![control];
            let mut loads = Vec::new();
            let mut fresh = anc.iter().copied();
            while sources.len() < copies + 1 {
                for s in sources.clone() {
                    match fresh.next() {
                        Some(z) => {
                            loads.push(Gate::pair("cx", s, z));
                            sources.push(z);
                        }
                        None => break,
                    }
                }
            }
            g.extend(loads.iter().cloned());
            interleave(&mut g, &sources, &deal(&targets, sources.len()));
            g.extend(loads.into_iter().rev());
        }
        AncillaKind::Dirty => {
            let mut sources = vec![control];
            sources.extend(&anc);
            let dealt = deal(&targets, sources.len());
            let toggle: Vec<Gate> = anc.iter().map(|&z| Gate::pair("cx", control, z)).collect();
            interleave(&mut g, &sources[1..], &dealt[1..]);
            for &t in &dealt[0] {
                g.push(Gate::pair("cx", control, t));
            }
            g.extend(toggle.iter().cloned());
            interleave(&mut g, &sources[1..], &dealt[1..]);
            g.extend(toggle);
        }
    }
    asap_schedule(g, total_qubits)
}
