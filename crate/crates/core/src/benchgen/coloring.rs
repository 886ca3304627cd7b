//! Misra–Gries edge colouring with at most `max_degree + 1` colours.

const NONE: usize = usize::MAX;

struct Coloring {
    colors: usize,
    /// `at[v * colors + c]` is the neighbour joined to `v` by colour `c`.
    at: Vec<usize>,
}

impl Coloring {
    fn neighbour(&self, v: usize, c: usize) -> usize {
        self.at[v * self.colors + c]
    }

    fn is_free(&self, v: usize, c: usize) -> bool {
        self.neighbour(v, c) == NONE
    }

    fn free(&self, v: usize) -> usize {
        (0..self.colors)
            .find(|&c| self.is_free(v, c))
            .expect("a vertex has a free colour")
    }

    fn color_of(&self, u: usize, v: usize) -> Option<usize> {
        (0..self.colors).find(|&c| self.neighbour(u, c) == v)
    }

    fn set(&mut self, u: usize, v: usize, c: usize) {
        self.at[u * self.colors + c] = v;
        self.at[v * self.colors + c] = u;
    }

    fn unset(&mut self, u: usize, v: usize) {
        if let Some(c) = self.color_of(u, v) {
            self.at[u * self.colors + c] = NONE;
            self.at[v * self.colors + c] = NONE;
        }
    }

    fn is_fan(&self, u: usize, fan: &[usize]) -> bool {
        fan.windows(2).all(|w| {
            self.color_of(u, w[1])
                .is_some_and(|c| self.is_free(w[0], c))
        })
    }

    fn add(&mut self, u: usize, v: usize) {
        let mut fan = vec![v];
        loop {
            let last = *fan.last().unwrap();
            let next = (0..self.colors)
                .map(|c| (c, self.neighbour(u, c)))
                .find(|&(c, w)| w != NONE && !fan.contains(&w) && self.is_free(last, c));
            match next {
                Some((_, w)) => fan.push(w),
                None => break,
            }
        }
        let c = self.free(u);
        let d = self.free(*fan.last().unwrap());
        if !self.is_free(u, d) {
            let mut path = vec![u];
            let (mut x, mut want) = (u, d);
            while !self.is_free(x, want) {
                x = self.neighbour(x, want);
                path.push(x);
                want = if want == d { c } else { d };
            }
            let edges: Vec<_> = path
                .windows(2)
                .map(|w| (w[0], w[1], self.color_of(w[0], w[1]).unwrap()))
                .collect();
            for &(a, b, _) in &edges {
                self.unset(a, b);
            }
            for (a, b, col) in edges {
                self.set(a, b, if col == d { c } else { d });
            }
        }
        let w = (0..fan.len())
            .find(|&i| self.is_free(fan[i], d) && self.is_fan(u, &fan[..=i]))
            .expect("Misra-Gries fan rotation point");
        for i in 0..w {
            let col = self.color_of(u, fan[i + 1]).unwrap();
            self.unset(u, fan[i + 1]);
            self.set(u, fan[i], col);
        }
        self.set(u, fan[w], d);
    }
}

/// Colour per edge, in input order. Edges must be distinct with `a != b`.
pub(crate) fn edge_coloring(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut degree = vec![0usize; n];
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let colors = degree.iter().max().copied().unwrap_or(0) + 1;
    let mut st = Coloring {
        colors,
        at: vec![NONE; n * colors],
    };
    for &(a, b) in edges {
        st.add(a, b);
    }
    edges
        .iter()
        .map(|&(a, b)| st.color_of(a, b).expect("every edge coloured"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(n: usize, edges: &[(usize, usize)]) {
        let col = edge_coloring(n, edges);
        let mut degree = vec![0usize; n];
        for &(a, b) in edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let max = degree.iter().max().copied().unwrap_or(0);
        assert!(col.iter().all(|&c| c <= max));
        for (i, &(a, b)) in edges.iter().enumerate() {
            for (j, &(x, y)) in edges.iter().enumerate().skip(i + 1) {
                if a == x || a == y || b == x || b == y {
                    assert_ne!(
                        col[i], col[j],
                        "edges {i} and {j} share a vertex and a colour"
                    );
                }
            }
        }
    }

    #[test]
    fn complete_graphs() {
        for n in 2..9 {
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect();
            check(n, &edges);
        }
    }

    #[test]
    fn pseudo_random_graphs() {
        let mut x = 12345u64;
        for n in [5, 12, 30] {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    x = x
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    if x >> 62 == 0 {
                        edges.push((i, j));
                    }
                }
            }
            check(n, &edges);
        }
    }
}
